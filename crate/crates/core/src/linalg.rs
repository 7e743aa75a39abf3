//! Linear algebra over a prime field `F_p`.
//!
//! Vectors are rows and maps act on the right: the matrix of `f: V -> W` has
//! one row per basis vector of `V`, holding the coordinates of its image.
//! Dense elimination is used up to [`SPARSE_THRESHOLD`]; above it, ranks are
//! computed by sparse elimination.

use std::collections::BTreeMap;

/// Dimension above which [`rank`] switches to sparse elimination.
pub const SPARSE_THRESHOLD: usize = 2000;

/// Multiplicative inverse of a nonzero `a` modulo the prime `p`.
pub fn inv_mod(a: u32, p: u32) -> u32 {
    debug_assert!(!a.is_multiple_of(p));
    let mut result = 1u64;
    let mut base = (a % p) as u64;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    result as u32
}

/// `v += f * w` modulo `p`, for reduced inputs.
fn axpy(v: &mut [u32], f: u32, w: &[u32], p: u32) {
    if f == 0 {
        return;
    }
    for (x, &y) in v.iter_mut().zip(w) {
        *x = (*x + f * y) % p;
    }
}

/// Sparse matrix over `F_p`, stored as sorted rows of nonzero entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    p: u32,
    cols: usize,
    rows: Vec<Vec<(u32, u32)>>,
}

impl SparseMatrix {
    pub fn zeros(p: u32, rows: usize, cols: usize) -> Self {
        Self {
            p,
            cols,
            rows: vec![Vec::new(); rows],
        }
    }

    pub fn identity(p: u32, n: usize) -> Self {
        Self {
            p,
            cols: n,
            rows: (0..n).map(|i| vec![(i as u32, 1)]).collect(),
        }
    }

    /// Builds a matrix from rows of `(column, value)` pairs; values are
    /// reduced, duplicates summed and zeros dropped.
    pub fn from_entries(p: u32, cols: usize, rows: Vec<Vec<(u32, u32)>>) -> Self {
        let rows = rows
            .into_iter()
            .map(|mut row| {
                row.sort_unstable_by_key(|&(c, _)| c);
                let mut out: Vec<(u32, u32)> = Vec::with_capacity(row.len());
                for (c, v) in row {
                    assert!((c as usize) < cols, "column {c} out of range {cols}");
                    match out.last_mut() {
                        Some(last) if last.0 == c => last.1 = (last.1 + v % p) % p,
                        _ => out.push((c, v % p)),
                    }
                }
                out.retain(|&(_, v)| v != 0);
                out
            })
            .collect();
        Self { p, cols, rows }
    }

    pub fn from_dense(m: &DenseMatrix) -> Self {
        let rows = (0..m.rows())
            .map(|i| {
                m.row(i)
                    .iter()
                    .enumerate()
                    .filter(|(_, &v)| v != 0)
                    .map(|(c, &v)| (c as u32, v))
                    .collect()
            })
            .collect();
        Self {
            p: m.p(),
            cols: m.cols(),
            rows,
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[(u32, u32)] {
        &self.rows[i]
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(Vec::is_empty)
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.rows[i]
            .binary_search_by_key(&(j as u32), |&(c, _)| c)
            .map(|k| self.rows[i][k].1)
            .unwrap_or(0)
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.p, self.rows.len(), self.cols);
        for (i, row) in self.rows.iter().enumerate() {
            for &(c, v) in row {
                m.set(i, c as usize, v);
            }
        }
        m
    }

    /// `v * self` for a dense row vector `v`.
    pub fn apply(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.rows.len());
        let p = self.p as u64;
        let mut acc = vec![0u64; self.cols];
        for (&x, row) in v.iter().zip(&self.rows) {
            if x == 0 {
                continue;
            }
            for &(c, y) in row {
                acc[c as usize] += x as u64 * y as u64;
            }
        }
        acc.into_iter().map(|a| (a % p) as u32).collect()
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.cols, other.rows.len());
        assert_eq!(self.p, other.p);
        let p = self.p as u64;
        let mut acc = vec![0u64; other.cols];
        let mut touched: Vec<u32> = Vec::new();
        let rows = self
            .rows
            .iter()
            .map(|row| {
                for &(k, x) in row {
                    for &(c, y) in &other.rows[k as usize] {
                        if acc[c as usize] == 0 {
                            touched.push(c);
                        }
                        acc[c as usize] += x as u64 * y as u64;
                    }
                }
                touched.sort_unstable();
                let out = touched
                    .drain(..)
                    .filter_map(|c| {
                        let v = (std::mem::take(&mut acc[c as usize]) % p) as u32;
                        (v != 0).then_some((c, v))
                    })
                    .collect();
                out
            })
            .collect();
        SparseMatrix {
            p: self.p,
            cols: other.cols,
            rows,
        }
    }

    /// `self + scale * other`.
    pub fn add_scaled(&self, scale: u32, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!((self.rows.len(), self.cols), (other.rows.len(), other.cols));
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| {
                let mut row: Vec<(u32, u32)> = a.clone();
                row.extend(b.iter().map(|&(c, v)| (c, v * (scale % self.p))));
                row
            })
            .collect();
        SparseMatrix::from_entries(self.p, self.cols, rows)
    }

    pub fn pow(&self, e: u32) -> SparseMatrix {
        assert_eq!(self.rows.len(), self.cols);
        let mut out = SparseMatrix::identity(self.p, self.cols);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut rows = vec![Vec::new(); self.cols];
        for (i, row) in self.rows.iter().enumerate() {
            for &(c, v) in row {
                rows[c as usize].push((i as u32, v));
            }
        }
        SparseMatrix {
            p: self.p,
            cols: self.rows.len(),
            rows,
        }
    }
}

/// Row-major dense matrix over `F_p` with entries in `[0, p)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseMatrix {
    p: u32,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl DenseMatrix {
    pub fn zeros(p: u32, rows: usize, cols: usize) -> Self {
        Self {
            p,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(p: u32, n: usize) -> Self {
        let mut m = Self::zeros(p, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(p: u32, cols: usize, rows: &[Vec<u32>]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            assert_eq!(row.len(), cols);
            data.extend(row.iter().map(|&v| v % p));
        }
        Self {
            p,
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = v % self.p;
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn mul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.rows);
        let p = self.p;
        let mut out = DenseMatrix::zeros(p, self.rows, other.cols);
        for i in 0..self.rows {
            let mut acc = vec![0u64; other.cols];
            for k in 0..self.cols {
                let x = self.get(i, k) as u64;
                if x == 0 {
                    continue;
                }
                for (a, &y) in acc.iter_mut().zip(other.row(k)) {
                    *a += x * y as u64;
                }
            }
            for (j, a) in acc.into_iter().enumerate() {
                out.data[i * other.cols + j] = (a % p as u64) as u32;
            }
        }
        out
    }

    /// Gaussian elimination with pivots taken among the first `pivot_cols`
    /// columns. Leaves the matrix in row echelon form (pivot entries 1, all
    /// entries reduced) and returns the pivot columns in order.
    ///
    /// Row updates are accumulated without reduction; the whole active block
    /// is reduced whenever another update could overflow `u32`.
    fn echelonize(&mut self, pivot_cols: usize) -> Vec<usize> {
        let p = self.p;
        let cols = self.cols;
        let step = (p - 1) * (p - 1);
        let budget = (u32::MAX - p).checked_div(step).map_or(u32::MAX, |b| b - 1);
        let mut pending = 0u32;
        let mut pivots = Vec::new();
        let mut top = 0usize;

        for c in 0..pivot_cols.min(cols) {
            if top == self.rows {
                break;
            }
            let mut found = None;
            for r in top..self.rows {
                let v = self.data[r * cols + c] % p;
                self.data[r * cols + c] = v;
                if v != 0 && found.is_none() {
                    found = Some(r);
                }
            }
            let Some(r) = found else { continue };
            if r != top {
                let (a, b) = self.data.split_at_mut(r * cols);
                a[top * cols..(top + 1) * cols].swap_with_slice(&mut b[..cols]);
            }
            {
                let piv = &mut self.data[top * cols..(top + 1) * cols];
                let scale = inv_mod(piv[c], p);
                for x in piv[c..].iter_mut() {
                    *x = (*x % p) * scale % p;
                }
            }
            if pending >= budget {
                for x in self.data[(top + 1) * cols..].iter_mut() {
                    *x %= p;
                }
                pending = 0;
            }
            let (head, tail) = self.data.split_at_mut((top + 1) * cols);
            let piv = &head[top * cols + c..(top + 1) * cols];
            for row in tail.chunks_exact_mut(cols) {
                let f = row[c];
                if f == 0 {
                    continue;
                }
                let m = p - f;
                for (x, &y) in row[c..].iter_mut().zip(piv) {
                    *x += m * y;
                }
                row[c] = 0;
            }
            pending += 1;
            pivots.push(c);
            top += 1;
        }
        for x in self.data.iter_mut() {
            *x %= p;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().echelonize(self.cols).len()
    }

    /// Echelon basis of the row space.
    pub fn row_echelon(mut self) -> Echelon {
        let pivots = self.echelonize(self.cols);
        let rows = (0..pivots.len()).map(|i| self.row(i).to_vec()).collect();
        Echelon::from_echelon_rows(self.p, self.cols, rows, pivots)
    }

    /// Inverse of a square matrix, or `None` if it is singular.
    pub fn inverse(&self) -> Option<DenseMatrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let p = self.p;
        let mut aug = DenseMatrix::zeros(p, n, 2 * n);
        for i in 0..n {
            aug.data[i * 2 * n..i * 2 * n + n].copy_from_slice(self.row(i));
            aug.data[i * 2 * n + n + i] = 1;
        }
        if aug.echelonize(n).len() < n {
            return None;
        }
        // back substitution: pivots sit on the diagonal
        for c in (0..n).rev() {
            let piv = aug.row(c).to_vec();
            for r in 0..c {
                let f = aug.get(r, c);
                if f != 0 {
                    let row = &mut aug.data[r * 2 * n..(r + 1) * 2 * n];
                    axpy(row, p - f, &piv, p);
                }
            }
        }
        let mut out = DenseMatrix::zeros(p, n, n);
        for i in 0..n {
            out.data[i * n..(i + 1) * n].copy_from_slice(&aug.row(i)[n..]);
        }
        Some(out)
    }
}

/// Row echelon basis of a subspace of `F_p^width`.
///
/// Rows are kept sorted by pivot column, each with a unit pivot and zeros to
/// the left of it. Reducing a vector against the rows in order clears every
/// pivot column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Echelon {
    p: u32,
    width: usize,
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

impl Echelon {
    pub fn new(p: u32, width: usize) -> Self {
        Self {
            p,
            width,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Reduces `v` in place and returns the multiple of each row removed.
    pub fn reduce(&self, v: &mut [u32]) -> Vec<u32> {
        let p = self.p;
        self.rows
            .iter()
            .zip(&self.pivots)
            .map(|(row, &c)| {
                let f = v[c] % p;
                if f != 0 {
                    axpy(&mut v[c..], p - f, &row[c..], p);
                }
                f
            })
            .collect()
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(|&x| x == 0)
    }

    /// Adds `v` to the span; returns false if it was already there.
    pub fn insert(&mut self, v: &[u32]) -> bool {
        assert_eq!(v.len(), self.width);
        let mut w: Vec<u32> = v.iter().map(|&x| x % self.p).collect();
        self.reduce(&mut w);
        let Some(c) = w.iter().position(|&x| x != 0) else {
            return false;
        };
        let scale = inv_mod(w[c], self.p);
        for x in w[c..].iter_mut() {
            *x = *x * scale % self.p;
        }
        let at = self.pivots.partition_point(|&q| q < c);
        self.pivots.insert(at, c);
        self.rows.insert(at, w);
        true
    }

    /// Wraps rows that are already in echelon form, as produced by
    /// elimination.
    fn from_echelon_rows(p: u32, width: usize, rows: Vec<Vec<u32>>, pivots: Vec<usize>) -> Self {
        debug_assert_eq!(rows.len(), pivots.len());
        Self {
            p,
            width,
            rows,
            pivots,
        }
    }
}

/// Rank of a sparse matrix, dense or sparse elimination depending on size.
pub fn rank(m: &SparseMatrix) -> usize {
    if m.rows().max(m.cols()) > SPARSE_THRESHOLD {
        sparse_rank(m)
    } else {
        m.to_dense().rank()
    }
}

/// Rank by sparse elimination, pivoting on each row's leading column.
pub fn sparse_rank(m: &SparseMatrix) -> usize {
    let p = m.p();
    let mut pivots: BTreeMap<u32, Vec<(u32, u32)>> = BTreeMap::new();
    for row in &m.rows {
        let mut r = row.clone();
        while let Some(&(c, v)) = r.first() {
            match pivots.get(&c) {
                Some(piv) => r = sparse_axpy(&r, p - v, piv, p),
                None => {
                    let scale = inv_mod(v, p);
                    for e in r.iter_mut() {
                        e.1 = e.1 * scale % p;
                    }
                    pivots.insert(c, r);
                    break;
                }
            }
        }
    }
    pivots.len()
}

/// `a + f * b` for sorted sparse rows.
fn sparse_axpy(a: &[(u32, u32)], f: u32, b: &[(u32, u32)], p: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j == b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i == a.len() || (j < b.len() && b[j].0 < a[i].0);
        let (c, v) = if take_a {
            i += 1;
            a[i - 1]
        } else if take_b {
            j += 1;
            (b[j - 1].0, f * b[j - 1].1 % p)
        } else {
            i += 1;
            j += 1;
            (a[i - 1].0, (a[i - 1].1 + f * b[j - 1].1) % p)
        };
        if v != 0 {
            out.push((c, v));
        }
    }
    out
}

/// Image (as an echelon basis) and left kernel (as a list of vectors) of `m`.
pub fn image_and_kernel(m: &SparseMatrix) -> (Echelon, Vec<Vec<u32>>) {
    let n = m.rows();
    let w = m.cols();
    let p = m.p();
    let mut aug = DenseMatrix::zeros(p, n, w + n);
    for i in 0..n {
        for &(c, v) in m.row(i) {
            aug.data[i * (w + n) + c as usize] = v;
        }
        aug.data[i * (w + n) + w + i] = 1;
    }
    let pivots = aug.echelonize(w);
    let r = pivots.len();
    let image_rows = (0..r).map(|i| aug.row(i)[..w].to_vec()).collect();
    let kernel = (r..n).map(|i| aug.row(i)[w..].to_vec()).collect();
    (Echelon::from_echelon_rows(p, w, image_rows, pivots), kernel)
}
