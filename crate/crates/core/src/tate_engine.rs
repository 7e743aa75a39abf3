//! Tate spectral sequences for `C_p`, `F` and `G` at height `n = p - 1`.
//!
//! The E2-pages are taken as given: `F_q[a, b^±1, d^±1]/(a^2)` for `C_p` and
//! `F[A, B^±1, D^±1]/(A^2)` for `F` and `G`. There are two families of
//! differentials, `d_(2n+1)` and `d_(2n^2+1)`, both linear over a rank-two
//! lattice of invertible monomials. A page is therefore stored as a set of
//! survivors among the `2p` lattice-orbit representatives, and every class in
//! the plane is one of these translated by a lattice vector.
//!
//! The `F` generators sit inside the `C_p` page as `A = d a`, `B = b d^n` and
//! `D = d^(n^2)`; [`MonomialClass::embed_in_cp`] makes that explicit so the
//! two formula sets can be checked against each other.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, SparseMatrix};
use crate::mod_arith::{inverse_mod, invariant_delta_exponent, HeightParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Group {
    Cp,
    F,
    G,
}

impl Group {
    pub const ALL: [Group; 3] = [Group::Cp, Group::F, Group::G];

    pub fn name(self) -> &'static str {
        match self {
            Group::Cp => "Cp",
            Group::F => "F",
            Group::G => "G",
        }
    }

    /// True for the groups whose page uses the `A, B, D` generators.
    pub fn is_extended(self) -> bool {
        !matches!(self, Group::Cp)
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Group {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cp" | "c_p" | "c" => Ok(Group::Cp),
            "f" => Ok(Group::F),
            "g" => Ok(Group::G),
            _ => Err(Error::UnknownGroup(s.to_string())),
        }
    }
}

/// A group together with the prime, which fixes every degree and coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Family {
    pub group: Group,
    pub p: u64,
}

impl Family {
    pub fn new(group: Group, params: &HeightParams) -> Self {
        Self {
            group,
            p: params.p(),
        }
    }

    pub fn p(&self) -> i64 {
        self.p as i64
    }

    pub fn n(&self) -> i64 {
        self.p as i64 - 1
    }

    /// Page of the first differential family, `2n + 1`.
    pub fn short_page(&self) -> u32 {
        2 * self.n() as u32 + 1
    }

    /// Page of the second differential family, `2n^2 + 1`.
    pub fn long_page(&self) -> u32 {
        let n = self.n() as u32;
        2 * n * n + 1
    }

    /// Degree of the coefficient field over `F_p`.
    pub fn coeff_field_degree(&self) -> u32 {
        match self.group {
            Group::G => 1,
            _ => self.n() as u32,
        }
    }

    /// Translations in `(i, j)` commuting with both differential families.
    pub fn lattice(&self) -> Vec<LatticeVector> {
        let (n, p) = (self.n(), self.p());
        match self.group {
            Group::Cp => vec![
                LatticeVector {
                    label: format!("b d^{n}"),
                    di: 1,
                    dj: n,
                },
                LatticeVector {
                    label: format!("d^{p}"),
                    di: 0,
                    dj: p,
                },
            ],
            _ => vec![
                LatticeVector {
                    label: "B".into(),
                    di: 1,
                    dj: 0,
                },
                LatticeVector {
                    label: format!("D^{p}"),
                    di: 0,
                    dj: p,
                },
            ],
        }
    }

    /// Internal degree of the zero-line periodicity generator (`d^p` or `D^p`).
    pub fn periodicity(&self) -> i64 {
        let (n, p) = (self.n(), self.p());
        match self.group {
            Group::Cp => 2 * p * p,
            _ => 2 * n * n * p * p,
        }
    }

    /// The `2p` orbit representatives `(eps, 0, w)`, `0 <= w < p`.
    pub fn fundamental_domain(&self, dual: bool) -> Vec<MonomialClass> {
        let mut out = Vec::with_capacity(2 * self.p as usize);
        for eps in 0..=1 {
            for w in 0..self.p() {
                out.push(MonomialClass {
                    family: *self,
                    dual,
                    eps,
                    i: 0,
                    j: w,
                });
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeVector {
    pub label: String,
    pub di: i64,
    pub dj: i64,
}

/// `a^eps b^i d^j` (or `A^eps B^i D^j`), or the Pontryagin dual of one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MonomialClass {
    pub family: Family,
    /// Set on classes of the dual spectral sequence: this is `D(x)` for `x`
    /// the monomial described by the remaining fields.
    pub dual: bool,
    pub eps: u8,
    pub i: i64,
    pub j: i64,
}

impl MonomialClass {
    pub fn new(family: Family, eps: u8, i: i64, j: i64) -> Self {
        assert!(eps <= 1, "exterior generator squares to zero");
        Self {
            family,
            dual: false,
            eps,
            i,
            j,
        }
    }

    /// Bidegree of the underlying monomial, ignoring the dual flag.
    fn monomial_bidegree(&self) -> (i64, i64) {
        let (n, p) = (self.family.n(), self.family.p());
        let e = self.eps as i64;
        let s = e + 2 * self.i;
        let t = match self.family.group {
            Group::Cp => -2 * e + 2 * p * self.j,
            _ => 2 * n * e + 2 * p * n * self.i + 2 * p * n * n * self.j,
        };
        (s, t)
    }

    /// `(s, t)`. Dual classes sit at `(n - s - 1, 2n - t)`.
    pub fn bidegree(&self) -> (i64, i64) {
        let (s, t) = self.monomial_bidegree();
        if self.dual {
            dual_bidegree(self.family.n(), (s, t))
        } else {
            (s, t)
        }
    }

    pub fn s(&self) -> i64 {
        self.bidegree().0
    }

    pub fn t(&self) -> i64 {
        self.bidegree().1
    }

    /// Horizontal chart coordinate `t - s`.
    pub fn stem(&self) -> i64 {
        let (s, t) = self.bidegree();
        t - s
    }

    /// The `C_p` weight: `(m + i) mod p` for `a^eps d^m b^i`, computed through
    /// the embedding for `F` and `G`.
    pub fn weight(&self) -> i64 {
        let p = self.family.p();
        match self.family.group {
            Group::Cp => (self.j + self.i).rem_euclid(p),
            _ => (self.eps as i64 + self.j).rem_euclid(p),
        }
    }

    pub fn dualized(&self) -> Self {
        Self {
            dual: !self.dual,
            ..*self
        }
    }

    pub fn translate(&self, di: i64, dj: i64) -> Self {
        Self {
            i: self.i + di,
            j: self.j + dj,
            ..*self
        }
    }

    /// The orbit representative and the translation taking it back to `self`.
    pub fn canonical(&self) -> (Self, (i64, i64)) {
        let p = self.family.p();
        let w = match self.family.group {
            Group::Cp => (self.j + self.i).rem_euclid(p),
            _ => self.j.rem_euclid(p),
        };
        let rep = Self { i: 0, j: w, ..*self };
        (rep, (self.i, self.j - w))
    }

    /// The same monomial as a class on the `C_p` page: `A^e B^i D^j` maps to
    /// `a^e b^i d^(e + n i + n^2 j)`.
    pub fn embed_in_cp(&self) -> Self {
        match self.family.group {
            Group::Cp => *self,
            _ => {
                let n = self.family.n();
                Self {
                    family: Family {
                        group: Group::Cp,
                        p: self.family.p,
                    },
                    j: self.eps as i64 + n * self.i + n * n * self.j,
                    ..*self
                }
            }
        }
    }

    pub fn label(&self) -> String {
        let (a, b, d) = match self.family.group {
            Group::Cp => ("a", "b", "d"),
            _ => ("A", "B", "D"),
        };
        let mut parts = Vec::new();
        if self.eps == 1 {
            parts.push(a.to_string());
        }
        for (name, e) in [(b, self.i), (d, self.j)] {
            match e {
                0 => {}
                1 => parts.push(name.to_string()),
                _ => parts.push(format!("{name}^{e}")),
            }
        }
        let mono = if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join(" ")
        };
        if self.dual {
            format!("({mono})*")
        } else {
            mono
        }
    }

    pub fn record(&self) -> ClassRecord {
        let (s, t) = self.bidegree();
        ClassRecord {
            eps: self.eps,
            i: self.i,
            j: self.j,
            s,
            t,
        }
    }

    /// `d_(2n+1)` by the closed form, on an undualized monomial.
    fn short_formula(&self) -> Option<(Self, u32)> {
        if self.eps == 1 {
            return None;
        }
        let (n, p) = (self.family.n(), self.family.p());
        let (coeff, target) = match self.family.group {
            Group::Cp => (self.j + self.i, Self::new(self.family, 1, self.i + n, self.j + 1)),
            _ => (self.j, Self::new(self.family, 1, self.i + n, self.j - 1)),
        };
        let coeff = coeff.rem_euclid(p) as u32;
        (coeff != 0).then_some((target, coeff))
    }

    /// `d_(2n^2+1)` on an undualized `a`-class, coefficient 1.
    fn long_formula(&self) -> Option<(Self, u32)> {
        if self.eps == 0 {
            return None;
        }
        let n = self.family.n();
        let target = match self.family.group {
            Group::Cp => Self::new(self.family, 0, self.i + n * n + 1, self.j + n - 1),
            _ => Self::new(self.family, 0, self.i + n * n + 1, self.j - n),
        };
        Some((target, 1))
    }

    /// The only monomial the formula for `d_r` could send to `self`.
    fn formula_preimage(&self, r: u32) -> Option<Self> {
        let n = self.family.n();
        let f = self.family;
        if r == f.short_page() && self.eps == 1 {
            Some(match f.group {
                Group::Cp => Self::new(f, 0, self.i - n, self.j - 1),
                _ => Self::new(f, 0, self.i - n, self.j + 1),
            })
        } else if r == f.long_page() && self.eps == 0 {
            Some(match f.group {
                Group::Cp => Self::new(f, 1, self.i - n * n - 1, self.j - n + 1),
                _ => Self::new(f, 1, self.i - n * n - 1, self.j + n),
            })
        } else {
            None
        }
    }

    /// `d_r` by formula, ignoring which page the class is on. On dual
    /// classes this is the reversed differential `D(y) -> c D(x)`.
    fn formula(&self, r: u32) -> Option<(Self, u32)> {
        let f = self.family;
        let undual = |x: &Self| -> Option<(Self, u32)> {
            if r == f.short_page() {
                x.short_formula()
            } else if r == f.long_page() {
                x.long_formula()
            } else {
                None
            }
        };
        if !self.dual {
            return undual(self);
        }
        let y = self.dualized();
        let x = y.formula_preimage(r)?;
        match undual(&x) {
            Some((target, c)) if target == y => Some((x.dualized(), c)),
            _ => None,
        }
    }
}

impl fmt::Display for MonomialClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

fn dual_bidegree(n: i64, (s, t): (i64, i64)) -> (i64, i64) {
    (n - s - 1, 2 * n - t)
}

/// `d_(2n+1)` coefficient of `d^m b^i` on the `C_p` page, computed through
/// the Leibniz rule from `d(d) = a b^n d^2` and `d(b) = -n a b^(n+1) d` (the
/// latter forced by `b d^n` being a cycle). For `F` and `G` classes, the
/// coefficient of the embedded class.
pub fn leibniz_coefficient(class: &MonomialClass) -> u32 {
    let c = class.embed_in_cp();
    let (n, p) = (c.family.n(), c.family.p());
    if c.eps == 1 {
        return 0;
    }
    (c.j - n * c.i).rem_euclid(p) as u32
}

/// Chart-friendly serialization of a class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassRecord {
    pub eps: u8,
    pub i: i64,
    pub j: i64,
    pub s: i64,
    pub t: i64,
}

/// A page `E_r` as the set of surviving orbit representatives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Page {
    family: Family,
    dual: bool,
    r: u32,
    survivors: BTreeSet<MonomialClass>,
}

impl Page {
    pub fn family(&self) -> Family {
        self.family
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn is_dual(&self) -> bool {
        self.dual
    }

    pub fn survivors(&self) -> &BTreeSet<MonomialClass> {
        &self.survivors
    }

    pub fn is_empty(&self) -> bool {
        self.survivors.is_empty()
    }

    pub fn len(&self) -> usize {
        self.survivors.len()
    }

    pub fn lattice(&self) -> Vec<LatticeVector> {
        self.family.lattice()
    }

    pub fn coeff_field_degree(&self) -> u32 {
        self.family.coeff_field_degree()
    }

    /// Whether `class`, anywhere in the plane, survives to this page.
    pub fn contains(&self, class: &MonomialClass) -> bool {
        class.family == self.family && class.dual == self.dual && self.survivors.contains(&class.canonical().0)
    }

    /// The same page under a later index, allowed when no differential
    /// family acts on the pages in between.
    pub fn at_page(&self, r: u32) -> Result<Page> {
        let blocked = [self.family.short_page(), self.family.long_page()]
            .into_iter()
            .any(|d| self.r <= d && d < r);
        if r < self.r || blocked {
            return Err(Error::InvalidArgument(format!(
                "cannot relabel E_{} as E_{r}: a differential acts in between",
                self.r
            )));
        }
        Ok(Page { r, ..self.clone() })
    }

    /// Surviving classes with `t - s` in `stems` and `s` in `filtrations`
    /// (both inclusive), ordered by `(s, t - s)` and then by monomial.
    pub fn classes_in_window(&self, stems: (i64, i64), filtrations: (i64, i64)) -> Vec<MonomialClass> {
        classes_in_window(self.family, self.dual, stems, filtrations)
            .into_iter()
            .filter(|c| self.contains(c))
            .collect()
    }

    pub fn record(&self, differentials: &[&DifferentialMap]) -> PageRecord {
        PageRecord {
            group: self.family.group,
            p: self.family.p,
            r: self.r,
            dual: self.dual,
            lattice: self.lattice(),
            coeff_field_degree: self.coeff_field_degree(),
            fundamental_domain: self.survivors.iter().map(MonomialClass::record).collect(),
            differentials: differentials
                .iter()
                .flat_map(|d| {
                    d.pairs.iter().map(|(s, (t, c))| DifferentialRecord {
                        source: s.record(),
                        target: t.record(),
                        coeff: *c,
                        r: d.r,
                    })
                })
                .collect(),
        }
    }

    /// Rebuilds a page and its differentials from a record, checking every
    /// recorded bidegree against the class it names.
    pub fn from_record(record: &PageRecord) -> Result<(Page, Vec<DifferentialMap>)> {
        let params = HeightParams::new(record.p)?;
        let family = Family::new(record.group, &params);
        let class = |c: &ClassRecord| -> Result<MonomialClass> {
            if c.eps > 1 {
                return Err(Error::Parse(format!("eps = {} in a class record", c.eps)));
            }
            let m = MonomialClass {
                family,
                dual: record.dual,
                eps: c.eps,
                i: c.i,
                j: c.j,
            };
            if m.bidegree() != (c.s, c.t) {
                return Err(Error::Parse(format!(
                    "class {} recorded at ({}, {}) but lies at {:?}",
                    m.label(),
                    c.s,
                    c.t,
                    m.bidegree()
                )));
            }
            Ok(m)
        };
        let mut survivors = BTreeSet::new();
        for c in &record.fundamental_domain {
            let m = class(c)?;
            if m.canonical().0 != m {
                return Err(Error::Parse(format!("{} is not an orbit representative", m.label())));
            }
            survivors.insert(m);
        }
        if record.lattice != family.lattice() || record.coeff_field_degree != family.coeff_field_degree() {
            return Err(Error::Parse("lattice or coefficient field does not match the group".into()));
        }
        let page = Page {
            family,
            dual: record.dual,
            r: record.r,
            survivors,
        };
        let mut maps: BTreeMap<u32, DifferentialMap> = BTreeMap::new();
        for d in &record.differentials {
            let source = class(&d.source)?;
            let target = class(&d.target)?;
            check_bidegree_law(d.r, &source, &target)?;
            maps.entry(d.r)
                .or_insert_with(|| DifferentialMap {
                    r: d.r,
                    pairs: BTreeMap::new(),
                })
                .pairs
                .insert(source, (target, d.coeff));
        }
        Ok((page, maps.into_values().collect()))
    }
}

/// Every class of the family (surviving or not) in a window.
pub fn classes_in_window(family: Family, dual: bool, stems: (i64, i64), filtrations: (i64, i64)) -> Vec<MonomialClass> {
    let mut out = Vec::new();
    if stems.0 > stems.1 || filtrations.0 > filtrations.1 {
        return out;
    }
    let n = family.n();
    for s in filtrations.0..=filtrations.1 {
        // s of the underlying monomial
        let sx = if dual { n - s - 1 } else { s };
        for eps in 0..=1u8 {
            if (sx - eps as i64).rem_euclid(2) != 0 {
                continue;
            }
            let i = (sx - eps as i64) / 2;
            let probe = MonomialClass {
                family,
                dual,
                eps,
                i,
                j: 0,
            };
            // t is affine in j with step `unit` (negated for duals)
            let t0 = probe.t();
            let unit = probe.translate(0, 1).t() - t0;
            let (lo, hi) = (stems.0 + s - t0, stems.1 + s - t0);
            let (jlo, jhi) = if unit > 0 {
                (div_ceil(lo, unit), hi.div_euclid(unit))
            } else {
                (div_ceil(-hi, -unit), (-lo).div_euclid(-unit))
            };
            for j in jlo..=jhi {
                out.push(MonomialClass { j, ..probe });
            }
        }
    }
    out.sort_by_key(|c| (c.s(), c.stem(), *c));
    out
}

fn div_ceil(a: i64, b: i64) -> i64 {
    -((-a).div_euclid(b))
}

fn check_bidegree_law(r: u32, source: &MonomialClass, target: &MonomialClass) -> Result<()> {
    let (s0, t0) = source.bidegree();
    let (s1, t1) = target.bidegree();
    if s1 - s0 != r as i64 || t1 - t0 != r as i64 - 1 {
        return Err(Error::BidegreeLaw {
            r,
            source_label: format!("{} at ({s0}, {t0})", source.label()),
            target_label: format!("{} at ({s1}, {t1})", target.label()),
        });
    }
    Ok(())
}

pub fn e2_page(group: Group, params: &HeightParams) -> Page {
    let family = Family::new(group, params);
    Page {
        family,
        dual: false,
        r: 2,
        survivors: family.fundamental_domain(false).into_iter().collect(),
    }
}

/// `d_r(class)` on `page`, with `r` the page index. `None` when the class is a cycle.
pub fn differential(page: &Page, class: &MonomialClass) -> Result<Option<(MonomialClass, u32)>> {
    let f = page.family;
    if page.r != f.short_page() && page.r != f.long_page() {
        return Err(Error::UnsupportedPage {
            group: f.group.to_string(),
            r: page.r,
        });
    }
    if !page.contains(class) {
        return Err(Error::InvalidArgument(format!(
            "{} does not survive to E_{}",
            class.label(),
            page.r
        )));
    }
    match class.formula(page.r) {
        Some((target, c)) if page.contains(&target) => Ok(Some((target, c))),
        Some((target, _)) if !class.dual => Err(Error::Inconsistent(format!(
            "d_{} sends the survivor {} to {}, which is gone",
            page.r,
            class.label(),
            target.label()
        ))),
        _ => Ok(None),
    }
}

/// The differential `d_r` on a page, as a pairing on orbit representatives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DifferentialMap {
    r: u32,
    /// Representative source to (target in the plane, coefficient).
    pairs: BTreeMap<MonomialClass, (MonomialClass, u32)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DifferentialRecord {
    pub source: ClassRecord,
    pub target: ClassRecord,
    pub coeff: u32,
    pub r: u32,
}

impl DifferentialMap {
    pub fn compute(page: &Page) -> Result<Self> {
        let mut pairs = BTreeMap::new();
        for s in &page.survivors {
            if let Some((t, c)) = differential(page, s)? {
                check_bidegree_law(page.r, s, &t)?;
                pairs.insert(*s, (t, c));
            }
        }
        Ok(Self { r: page.r, pairs })
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn pairs(&self) -> &BTreeMap<MonomialClass, (MonomialClass, u32)> {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// The differential on any class in the plane, by lattice translation.
    pub fn apply(&self, class: &MonomialClass) -> Option<(MonomialClass, u32)> {
        let (rep, (di, dj)) = class.canonical();
        self.pairs.get(&rep).map(|(t, c)| (t.translate(di, dj), *c))
    }

    /// Reverses every pair onto the dual classes: `x -> c y` becomes `D(y) -> c D(x)`.
    fn dualized(&self) -> Result<Self> {
        let mut pairs = BTreeMap::new();
        for (x, (y, c)) in &self.pairs {
            let (y0, (di, dj)) = y.canonical();
            let source = y0.dualized();
            let target = x.translate(-di, -dj).dualized();
            check_bidegree_law(self.r, &source, &target)?;
            if pairs.insert(source, (target, *c)).is_some() {
                return Err(Error::Inconsistent(format!(
                    "d_{} hits {} twice",
                    self.r,
                    y0.label()
                )));
            }
        }
        Ok(Self { r: self.r, pairs })
    }
}

/// Homology of `page` under `diff`, for the monomial pairing.
pub fn turn_page(page: &Page, diff: &DifferentialMap) -> Result<Page> {
    if page.is_empty() {
        return Ok(Page {
            r: page.r + 1,
            ..page.clone()
        });
    }
    if diff.r != page.r {
        return Err(Error::InvalidArgument(format!(
            "d_{} applied to E_{}",
            diff.r, page.r
        )));
    }
    let mut sources = BTreeSet::new();
    let mut targets = BTreeSet::new();
    for (s, (t, c)) in &diff.pairs {
        check_bidegree_law(diff.r, s, t)?;
        if *c == 0 {
            continue;
        }
        if !page.contains(s) || !page.contains(t) {
            return Err(Error::Inconsistent(format!(
                "d_{} pairs {} with {} off the page",
                diff.r,
                s.label(),
                t.label()
            )));
        }
        sources.insert(s.canonical().0);
        if !targets.insert(t.canonical().0) {
            return Err(Error::Inconsistent(format!("d_{} is not injective at {}", diff.r, t.label())));
        }
    }
    if let Some(both) = sources.intersection(&targets).next() {
        return Err(Error::Inconsistent(format!(
            "d_{} o d_{} != 0 at {}",
            diff.r,
            diff.r,
            both.label()
        )));
    }
    let survivors = page
        .survivors
        .iter()
        .filter(|c| !sources.contains(*c) && !targets.contains(*c))
        .copied()
        .collect();
    Ok(Page {
        r: page.r + 1,
        survivors,
        ..page.clone()
    })
}

/// Homology dimensions of `page` under `diff`, grouped by the bidegree of the
/// orbit representative, computed as `dim - rank(out) - rank(in)` from the
/// matrix of the differential. Makes no use of the differential being a
/// monomial pairing.
pub fn homology_ranks(page: &Page, diff: &DifferentialMap) -> Result<BTreeMap<(i64, i64), usize>> {
    let basis: Vec<MonomialClass> = page.survivors.iter().copied().collect();
    let index: BTreeMap<MonomialClass, usize> = basis.iter().enumerate().map(|(k, c)| (*c, k)).collect();
    let p = page.family.p as u32;
    let mut rows = vec![Vec::new(); basis.len()];
    for (s, (t, c)) in &diff.pairs {
        let (Some(&a), Some(&b)) = (index.get(s), index.get(&t.canonical().0)) else {
            return Err(Error::Inconsistent(format!("d_{} leaves the page at {}", diff.r, s.label())));
        };
        rows[a].push((b as u32, *c % p));
    }
    let matrix = SparseMatrix::from_entries(p, basis.len(), rows);
    let transpose = matrix.transpose();
    let mut groups: BTreeMap<(i64, i64), Vec<usize>> = BTreeMap::new();
    for (k, c) in basis.iter().enumerate() {
        groups.entry(c.bidegree()).or_default().push(k);
    }
    let select = |m: &SparseMatrix, keep: &[usize]| {
        SparseMatrix::from_entries(p, m.cols(), keep.iter().map(|&k| m.row(k).to_vec()).collect())
    };
    Ok(groups
        .into_iter()
        .map(|(key, members)| {
            let out = linalg::rank(&select(&matrix, &members));
            let inc = linalg::rank(&select(&transpose, &members));
            (key, members.len() - out - inc)
        })
        .filter(|(_, d)| *d > 0)
        .collect())
}

/// What happens to an E2 class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Fate {
    Survives,
    /// Supports `d_r` hitting `partner`.
    Source { r: u32, partner: MonomialClass },
    /// Hit by `d_r` from `partner`.
    Target { r: u32, partner: MonomialClass },
}

impl Fate {
    pub fn describe(&self) -> String {
        match self {
            Fate::Survives => "survives".into(),
            Fate::Source { r, partner } => format!("d_{r} -> {}", partner.label()),
            Fate::Target { r, partner } => format!("hit by d_{r} from {}", partner.label()),
        }
    }

    pub fn killed_at(&self) -> Option<u32> {
        match self {
            Fate::Survives => None,
            Fate::Source { r, .. } | Fate::Target { r, .. } => Some(*r),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stage {
    pub differential: DifferentialMap,
    /// The page after taking homology, `E_(r+1)`.
    pub page: Page,
}

/// A fully recorded spectral sequence, from E2 to E-infinity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectralSequence {
    family: Family,
    dual: bool,
    e2: Page,
    stages: Vec<Stage>,
    fates: BTreeMap<MonomialClass, Fate>,
}

impl SpectralSequence {
    pub fn family(&self) -> Family {
        self.family
    }

    pub fn is_dual(&self) -> bool {
        self.dual
    }

    pub fn e2(&self) -> &Page {
        &self.e2
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    pub fn einfty(&self) -> &Page {
        self.stages.last().map_or(&self.e2, |s| &s.page)
    }

    pub fn fates(&self) -> &BTreeMap<MonomialClass, Fate> {
        &self.fates
    }

    pub fn differentials(&self) -> impl Iterator<Item = &DifferentialMap> {
        self.stages.iter().map(|s| &s.differential)
    }

    /// `E_r`, for any `r >= 2`.
    pub fn page_at(&self, r: u32) -> Page {
        let mut page = &self.e2;
        for stage in &self.stages {
            if stage.page.r <= r {
                page = &stage.page;
            }
        }
        Page { r: r.max(2), ..page.clone() }
    }

    /// Differentials acting on `E_r` or later, i.e. those drawn on a chart of `E_r`.
    pub fn differentials_from(&self, r: u32) -> Vec<&DifferentialMap> {
        self.differentials().filter(|d| d.r >= r).collect()
    }

    /// The fate of any class in the plane.
    pub fn fate(&self, class: &MonomialClass) -> Option<Fate> {
        let (rep, (di, dj)) = class.canonical();
        self.fates.get(&rep).map(|f| match f {
            Fate::Survives => Fate::Survives,
            Fate::Source { r, partner } => Fate::Source {
                r: *r,
                partner: partner.translate(di, dj),
            },
            Fate::Target { r, partner } => Fate::Target {
                r: *r,
                partner: partner.translate(di, dj),
            },
        })
    }
}

fn fates_from(e2: &Page, stages: &[Stage]) -> BTreeMap<MonomialClass, Fate> {
    let mut fates: BTreeMap<MonomialClass, Fate> = e2.survivors.iter().map(|c| (*c, Fate::Survives)).collect();
    for stage in stages {
        let d = &stage.differential;
        for (s, (t, _)) in &d.pairs {
            let (t0, (di, dj)) = t.canonical();
            fates.insert(*s, Fate::Source { r: d.r, partner: *t });
            fates.insert(
                t0,
                Fate::Target {
                    r: d.r,
                    partner: s.translate(-di, -dj),
                },
            );
        }
    }
    fates
}

/// Runs `d_(2n+1)` and then `d_(2n^2+1)`.
pub fn run_to_einfty(group: Group, params: &HeightParams) -> Result<SpectralSequence> {
    let e2 = e2_page(group, params);
    let family = e2.family;
    let mut stages: Vec<Stage> = Vec::with_capacity(2);
    let mut page = e2.clone();
    for r in [family.short_page(), family.long_page()] {
        let here = page.at_page(r)?;
        let differential = DifferentialMap::compute(&here)?;
        page = turn_page(&here, &differential)?;
        stages.push(Stage { differential, page: page.clone() });
    }
    let fates = fates_from(&e2, &stages);
    Ok(SpectralSequence {
        family,
        dual: false,
        e2,
        stages,
        fates,
    })
}

/// The Pontryagin-dual spectral sequence: classes move to `(n - s - 1, 2n - t)`
/// and every differential is reversed. Applying it twice gives back the input.
pub fn dualize(ss: &SpectralSequence) -> Result<SpectralSequence> {
    let flip = |page: &Page| Page {
        dual: !page.dual,
        survivors: page.survivors.iter().map(MonomialClass::dualized).collect(),
        ..page.clone()
    };
    let e2 = flip(&ss.e2);
    let stages = ss
        .stages
        .iter()
        .map(|s| {
            Ok(Stage {
                differential: s.differential.dualized()?,
                page: flip(&s.page),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let fates = fates_from(&e2, &stages);
    Ok(SpectralSequence {
        family: ss.family,
        dual: !ss.dual,
        e2,
        stages,
        fates,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ViewKind {
    /// `s >= 0`.
    Hfpss,
    /// `s <= -1`, regraded homologically.
    Hoss,
}

/// The part of a Tate spectral sequence in a half-plane of filtrations, with
/// differentials crossing the boundary discarded. Far from the boundary the
/// truncation agrees with the full sequence, whose E-infinity is empty, so
/// only a band of width `2n^2 + 2` next to the boundary is stored.
///
/// Classes are kept up to `d^p` (resp. `D^p`) translation, which preserves
/// `s`. The line `s = 0` reflects only the Tate part; the norm image is not
/// modelled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedView {
    family: Family,
    dual: bool,
    s_min: Option<i64>,
    s_max: Option<i64>,
    kind: Option<ViewKind>,
    pairs: Vec<(MonomialClass, MonomialClass, u32, u32)>,
    einfty: BTreeSet<MonomialClass>,
}

impl TruncatedView {
    fn compute(family: Family, dual: bool, s_min: Option<i64>, s_max: Option<i64>, kind: Option<ViewKind>) -> Self {
        let mut view = Self {
            family,
            dual,
            s_min,
            s_max,
            kind,
            pairs: Vec::new(),
            einfty: BTreeSet::new(),
        };
        let band = family.long_page() as i64 + 1;
        let (lo, hi) = match (s_min, s_max) {
            (Some(a), Some(b)) if a > b => return view,
            (Some(a), Some(b)) => (a, b),
            (Some(a), None) => (a, a + band),
            (None, Some(b)) => (b - band, b),
            (None, None) => (0, -1),
        };
        let margin = family.long_page() as i64;
        let in_view = |c: &MonomialClass| s_min.is_none_or(|m| c.s() >= m) && s_max.is_none_or(|m| c.s() <= m);
        let reduce = |c: &MonomialClass| {
            let p = family.p();
            MonomialClass {
                j: c.j.rem_euclid(p),
                ..*c
            }
        };
        let mut alive: BTreeSet<MonomialClass> = BTreeSet::new();
        for s in lo - margin..=hi + margin {
            let sx = if dual { family.n() - s - 1 } else { s };
            for eps in 0..=1u8 {
                if (sx - eps as i64).rem_euclid(2) != 0 {
                    continue;
                }
                for j in 0..family.p() {
                    let c = MonomialClass {
                        family,
                        dual,
                        eps,
                        i: (sx - eps as i64) / 2,
                        j,
                    };
                    if in_view(&c) {
                        alive.insert(c);
                    }
                }
            }
        }
        for r in [family.short_page(), family.long_page()] {
            let mut dead = BTreeSet::new();
            for c in &alive {
                if let Some((t, coeff)) = c.formula(r) {
                    let reduced = reduce(&t);
                    if alive.contains(&reduced) {
                        view.pairs.push((*c, t, coeff, r));
                        dead.insert(*c);
                        dead.insert(reduced);
                    }
                }
            }
            alive.retain(|c| !dead.contains(c));
        }
        view.einfty = alive.into_iter().filter(|c| (lo..=hi).contains(&c.s())).collect();
        view
    }

    pub fn kind(&self) -> Option<ViewKind> {
        self.kind
    }

    pub fn is_empty(&self) -> bool {
        self.s_min.zip(self.s_max).is_some_and(|(a, b)| a > b)
    }

    /// E-infinity of the truncation, classes taken up to `d^p` translation.
    pub fn einfty(&self) -> &BTreeSet<MonomialClass> {
        &self.einfty
    }

    /// Differentials with both ends in the view, as `(source, target, coeff, r)`
    /// with the source reduced modulo `d^p` and the target placed to match.
    pub fn differentials(&self) -> &[(MonomialClass, MonomialClass, u32, u32)] {
        &self.pairs
    }

    /// Whether line `s` lies in the view's half-plane.
    pub fn contains_s(&self, s: i64) -> bool {
        self.s_min.is_none_or(|m| s >= m) && self.s_max.is_none_or(|m| s <= m)
    }

    /// Whether a class of the view's sequence survives to E-infinity here.
    pub fn survives(&self, class: &MonomialClass) -> bool {
        let reduced = MonomialClass {
            j: class.j.rem_euclid(self.family.p()),
            ..*class
        };
        self.einfty.contains(&reduced)
    }

    pub fn einfty_on_line(&self, s: i64) -> Vec<MonomialClass> {
        self.einfty.iter().filter(|c| c.s() == s).copied().collect()
    }

    pub fn zero_line(&self) -> Vec<MonomialClass> {
        self.einfty_on_line(0)
    }

    /// Whether results on line `s` are exact; the zero line never is.
    pub fn exact_on_line(&self, s: i64) -> bool {
        s != 0
    }

    /// Bidegree after regrading: homological `-s - 1` on the orbit side.
    pub fn regraded(&self, class: &MonomialClass) -> (i64, i64) {
        let (s, t) = class.bidegree();
        match self.kind {
            Some(ViewKind::Hoss) => (-s - 1, t),
            _ => (s, t),
        }
    }

    fn intersect(&self, s_min: Option<i64>, s_max: Option<i64>, kind: ViewKind) -> Self {
        let lo = match (self.s_min, s_min) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        let hi = match (self.s_max, s_max) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        Self::compute(self.family, self.dual, lo, hi, Some(kind))
    }

    pub fn hfpss_view(&self) -> Self {
        self.intersect(Some(0), None, ViewKind::Hfpss)
    }

    pub fn hoss_view(&self) -> Self {
        self.intersect(None, Some(-1), ViewKind::Hoss)
    }
}

pub fn hfpss_view(ss: &SpectralSequence) -> TruncatedView {
    TruncatedView::compute(ss.family, ss.dual, Some(0), None, Some(ViewKind::Hfpss))
}

pub fn hoss_view(ss: &SpectralSequence) -> TruncatedView {
    TruncatedView::compute(ss.family, ss.dual, None, Some(-1), Some(ViewKind::Hoss))
}

/// The exponent `k` in `0..p` with `k gamma + lambda = 0 mod p`.
pub fn find_cycle_generator(lambda: u32, gamma: u32, params: &HeightParams) -> Result<i64> {
    let p = params.p() as i64;
    let g = gamma as i64 % p;
    if g == 0 {
        return Err(Error::ZeroGamma);
    }
    let inv = inverse_mod(g, p).ok_or(Error::ZeroGamma)?;
    Ok((-(lambda as i64) * inv).rem_euclid(p))
}

/// A page free of rank one on a generator `y` over the untwisted page.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistedPage {
    pub base: Page,
    pub generator_label: String,
    /// `d_(2n+1)(y) = lambda A B^n D^-1 y`.
    pub twist_lambda: u32,
    /// `d_(2n+1)(D) = gamma A B^n`; 1 under the page's normalization.
    pub gamma: u32,
    pub generator_degree: (i64, i64),
    /// The `d`-exponent `k` whose twist carries the generator.
    pub delta_exponent: i64,
}

impl TwistedPage {
    /// Coefficient of `d_(2n+1)(D^k y)` on `A B^n D^(k-1) y`.
    pub fn coefficient(&self, k: i64) -> u32 {
        let p = self.base.family.p();
        (k * self.gamma as i64 + self.twist_lambda as i64).rem_euclid(p) as u32
    }

    /// Bidegree of `D^k y`.
    pub fn class_degree(&self, k: i64) -> (i64, i64) {
        let n = self.base.family.n();
        let p = self.base.family.p();
        (self.generator_degree.0, self.generator_degree.1 + 2 * p * n * n * k)
    }

    /// The least `k >= 0` making `D^k y` a `d_(2n+1)`-cycle.
    pub fn cycle_exponent(&self) -> Result<i64> {
        let p = self.base.family.p;
        let params = HeightParams::new(p)?;
        find_cycle_generator(self.twist_lambda, self.gamma, &params)
    }

    /// Exponents `k` in `range` with `D^k y` a cycle.
    pub fn zero_line_cycles(&self, range: std::ops::RangeInclusive<i64>) -> Vec<i64> {
        range.filter(|&k| self.coefficient(k) == 0).collect()
    }
}

/// The E2-page of `Σ^n I E` for `F` or `G`, as the untwisted page on a
/// generator in internal degree `2pk`, where `d^k` carries the determinant.
///
/// The generator supports `d_(2n+1)(y) = -A B^n D^-1 y`; this is the twist
/// that puts the zero-line cycle on the `D`-translate of the generator.
pub fn twisted_e2(group: Group, params: &HeightParams) -> Result<TwistedPage> {
    if group == Group::Cp {
        return Err(Error::GroupNotSupported {
            what: "the determinant twist",
            group: group.to_string(),
        });
    }
    let k = invariant_delta_exponent(params)?.representative;
    let p = params.p() as i64;
    Ok(TwistedPage {
        base: e2_page(group, params),
        generator_label: "y".into(),
        twist_lambda: (p - 1) as u32,
        gamma: 1,
        generator_degree: (0, 2 * p * k),
        delta_exponent: k,
    })
}

/// JSON shape of a page with its differentials.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PageRecord {
    pub group: Group,
    pub p: u64,
    pub r: u32,
    pub dual: bool,
    pub lattice: Vec<LatticeVector>,
    pub coeff_field_degree: u32,
    pub fundamental_domain: Vec<ClassRecord>,
    pub differentials: Vec<DifferentialRecord>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(p: u64) -> HeightParams {
        HeightParams::new(p).unwrap()
    }

    fn fam(group: Group, p: u64) -> Family {
        Family::new(group, &params(p))
    }

    #[test]
    fn e2_generator_degrees() {
        let cp5 = fam(Group::Cp, 5);
        assert_eq!(MonomialClass::new(cp5, 1, 0, 0).bidegree(), (1, -2));
        assert_eq!(MonomialClass::new(cp5, 0, 1, 0).bidegree(), (2, 0));
        assert_eq!(MonomialClass::new(cp5, 0, 0, 1).bidegree(), (0, 10));
        assert_eq!(MonomialClass::new(fam(Group::F, 5), 1, 0, 0).bidegree(), (1, 8));
        assert_eq!(MonomialClass::new(fam(Group::F, 5), 0, 1, 0).bidegree(), (2, 40));
        assert_eq!(MonomialClass::new(fam(Group::G, 3), 0, 0, 1).bidegree(), (0, 24));
        let page = e2_page(Group::Cp, &params(5));
        assert_eq!(page.len(), 10);
        assert_eq!(page.r(), 2);
        assert_eq!(page.coeff_field_degree(), 4);
        assert_eq!(e2_page(Group::G, &params(5)).coeff_field_degree(), 1);
        assert!(page.contains(&MonomialClass::new(cp5, 1, 0, 0)));
        assert!("H".parse::<Group>().is_err());
    }

    #[test]
    fn extended_generators_embed_with_matching_degrees() {
        for p in [3, 5, 7] {
            let f = fam(Group::F, p);
            for (e, i, j) in [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, -3, 2), (0, 5, -1)] {
                let c = MonomialClass::new(f, e, i, j);
                assert_eq!(c.bidegree(), c.embed_in_cp().bidegree(), "{}", c.label());
            }
        }
    }

    #[test]
    fn differential_examples() {
        let p3 = params(3);
        let f = fam(Group::Cp, 3);
        let e5 = e2_page(Group::Cp, &p3).at_page(5).unwrap();
        let delta = MonomialClass::new(f, 0, 0, 1);
        assert_eq!(differential(&e5, &delta).unwrap(), Some((MonomialClass::new(f, 1, 2, 2), 1)));
        assert_eq!(differential(&e5, &MonomialClass::new(f, 0, 0, 3)).unwrap(), None);
        for (i, j) in [(0, 0), (3, -2), (-1, 7)] {
            assert_eq!(differential(&e5, &MonomialClass::new(f, 1, i, j)).unwrap(), None);
        }
        let ss = run_to_einfty(Group::Cp, &p3).unwrap();
        let e9 = ss.page_at(9);
        assert_eq!(
            differential(&e9, &MonomialClass::new(f, 1, 0, 0)).unwrap(),
            Some((MonomialClass::new(f, 0, 5, 1), 1))
        );
        assert!(matches!(
            differential(&e2_page(Group::Cp, &p3), &delta),
            Err(Error::UnsupportedPage { r: 2, .. })
        ));
    }

    #[test]
    fn extended_seed_differentials() {
        for p in [3, 5, 7] {
            let pr = params(p);
            let f = fam(Group::F, p);
            let n = f.n();
            let e = e2_page(Group::F, &pr).at_page(f.short_page()).unwrap();
            // d(D) = A B^n
            assert_eq!(
                differential(&e, &MonomialClass::new(f, 0, 0, 1)).unwrap(),
                Some((MonomialClass::new(f, 1, n, 0), 1))
            );
            // d(A D^n) = B^(n^2+1)
            let ss = run_to_einfty(Group::F, &pr).unwrap();
            let late = ss.page_at(f.long_page());
            assert_eq!(
                differential(&late, &MonomialClass::new(f, 1, 0, n)).unwrap(),
                Some((MonomialClass::new(f, 0, n * n + 1, 0), 1))
            );
        }
    }

    #[test]
    fn survivors_after_short_differential_p3() {
        let ss = run_to_einfty(Group::Cp, &params(3)).unwrap();
        let after = &ss.stages()[0].page;
        assert_eq!(after.r(), 6);
        // over three periods in each direction, survivors are exactly weight 0
        let f = fam(Group::Cp, 3);
        for eps in 0..=1 {
            for i in -9..9 {
                for j in -9..9 {
                    let c = MonomialClass::new(f, eps, i, j);
                    assert_eq!(after.contains(&c), (i + j).rem_euclid(3) == 0, "{}", c.label());
                }
            }
        }
    }

    #[test]
    fn full_cancellation() {
        for p in [3, 5, 7, 11] {
            for g in Group::ALL {
                let ss = run_to_einfty(g, &params(p)).unwrap();
                assert!(ss.einfty().is_empty(), "{g} p={p}");
                assert_eq!(ss.einfty().r(), ss.family().long_page() + 1);
                assert!(ss.fates().values().all(|f| f.killed_at().is_some()));
            }
        }
    }

    #[test]
    fn empty_page_turns_to_empty_page() {
        let ss = run_to_einfty(Group::Cp, &params(3)).unwrap();
        let empty = ss.einfty();
        let none = DifferentialMap {
            r: empty.r(),
            pairs: BTreeMap::new(),
        };
        assert!(turn_page(empty, &none).unwrap().is_empty());
        let any = ss.stages()[0].differential.clone();
        assert!(turn_page(empty, &any).unwrap().is_empty());
    }

    #[test]
    fn generic_homology_matches_monomial_turn() {
        for p in [3, 5, 7] {
            for g in Group::ALL {
                let ss = run_to_einfty(g, &params(p)).unwrap();
                let mut page = ss.e2().clone();
                for stage in ss.stages() {
                    let here = page.at_page(stage.differential.r()).unwrap();
                    let ranks = homology_ranks(&here, &stage.differential).unwrap();
                    let expected: BTreeMap<(i64, i64), usize> =
                        stage.page.survivors().iter().map(|c| (c.bidegree(), 1)).collect();
                    assert_eq!(ranks, expected, "{g} p={p} r={}", stage.differential.r());
                    page = stage.page.clone();
                }
            }
        }
    }

    #[test]
    fn fates_name_partners() {
        let ss = run_to_einfty(Group::Cp, &params(5)).unwrap();
        let f = ss.family();
        let delta = MonomialClass::new(f, 0, 0, 1);
        assert_eq!(
            ss.fate(&delta),
            Some(Fate::Source {
                r: 9,
                partner: MonomialClass::new(f, 1, 4, 2)
            })
        );
        let one = MonomialClass::new(f, 0, 0, 0);
        // 1 is hit by d_33(a d^-3 b^-17)
        match ss.fate(&one).unwrap() {
            Fate::Target { r, partner } => {
                assert_eq!(r, 33);
                assert_eq!(partner.formula(33).unwrap().0, one);
            }
            other => panic!("unexpected fate {other:?}"),
        }
    }

    #[test]
    fn dual_examples() {
        let p5 = params(5);
        let ss = run_to_einfty(Group::Cp, &p5).unwrap();
        let dual = dualize(&ss).unwrap();
        let eps = MonomialClass::new(ss.family(), 1, 1, -1);
        assert_eq!(eps.bidegree(), (3, -12));
        assert_eq!(eps.dualized().bidegree(), (0, 20));
        assert!(dual.e2().contains(&eps.dualized()));
        assert_eq!(dualize(&dual).unwrap(), ss);
    }

    #[test]
    fn dual_formula_agrees_with_reversal() {
        for p in [3, 5, 7] {
            for g in Group::ALL {
                let ss = run_to_einfty(g, &params(p)).unwrap();
                let dual = dualize(&ss).unwrap();
                for stage in dual.stages() {
                    let r = stage.differential.r();
                    let before = dual.page_at(r);
                    assert_eq!(DifferentialMap::compute(&before).unwrap(), stage.differential, "{g} p={p} r={r}");
                    assert_eq!(turn_page(&before, &stage.differential).unwrap(), stage.page);
                }
                assert!(dual.einfty().is_empty());
            }
        }
    }

    #[test]
    fn lattice_vectors_shift_bidegrees_consistently() {
        for g in Group::ALL {
            let f = fam(g, 5);
            for v in f.lattice() {
                let c = MonomialClass::new(f, 1, 2, 3);
                let moved = c.translate(v.di, v.dj);
                assert_eq!(moved.canonical().0, c.canonical().0, "{g} {}", v.label);
            }
        }
    }

    #[test]
    fn views() {
        let cp = run_to_einfty(Group::Cp, &params(3)).unwrap();
        let h = hfpss_view(&cp);
        let zero: Vec<(u8, i64, i64)> = h.zero_line().iter().map(|c| (c.eps, c.i, c.j)).collect();
        assert_eq!(zero, vec![(0, 0, 0)]);
        assert!(!h.exact_on_line(0));
        let f = run_to_einfty(Group::F, &params(5)).unwrap();
        let zero: Vec<(u8, i64, i64)> = hfpss_view(&f).zero_line().iter().map(|c| (c.eps, c.i, c.j)).collect();
        assert_eq!(zero, vec![(0, 0, 0)]);
        assert!(h.hoss_view().is_empty());
        assert!(h.hoss_view().einfty().is_empty());
        let o = hoss_view(&cp);
        assert!(o.einfty().iter().all(|c| c.s() <= -1));
        let c = o.einfty().iter().next().unwrap();
        assert_eq!(o.regraded(c).0, -c.s() - 1);
        // every view differential respects the bidegree law
        for (s, t, _, r) in h.differentials().iter().chain(o.differentials()) {
            assert_eq!(t.s() - s.s(), *r as i64);
            assert_eq!(t.t() - s.t(), *r as i64 - 1);
        }
    }

    #[test]
    fn cycle_generator_examples() {
        let p5 = params(5);
        assert_eq!(find_cycle_generator(0, 1, &p5).unwrap(), 0);
        assert_eq!(find_cycle_generator(2, 1, &p5).unwrap(), 3);
        for p in [3, 5, 7] {
            for g in 1..p as u32 {
                assert_eq!(find_cycle_generator(g, g, &params(p)).unwrap(), p as i64 - 1);
            }
        }
        assert_eq!(find_cycle_generator(1, 5, &p5), Err(Error::ZeroGamma));
    }

    #[test]
    fn twisted_pages() {
        assert_eq!(twisted_e2(Group::F, &params(3)).unwrap().generator_degree, (0, 0));
        assert_eq!(twisted_e2(Group::F, &params(5)).unwrap().generator_degree, (0, -40));
        assert_eq!(twisted_e2(Group::G, &params(7)).unwrap().generator_degree, (0, -168));
        assert!(matches!(
            twisted_e2(Group::Cp, &params(5)),
            Err(Error::GroupNotSupported { .. })
        ));
        let t = twisted_e2(Group::F, &params(5)).unwrap();
        assert_eq!(t.cycle_exponent().unwrap(), 1);
        assert_eq!(t.zero_line_cycles(-5..=10), vec![-4, 1, 6]);
        assert_eq!(t.class_degree(1), (0, -40 + 160));
    }

    #[test]
    fn window_enumeration_matches_brute_force() {
        for g in Group::ALL {
            for dual in [false, true] {
                let f = fam(g, 3);
                let (stems, fil) = ((-30, 40), (-12, 9));
                let fast = classes_in_window(f, dual, stems, fil);
                let mut slow = Vec::new();
                for eps in 0..=1 {
                    for i in -40..40 {
                        for j in -40..40 {
                            let mut c = MonomialClass::new(f, eps, i, j);
                            c.dual = dual;
                            let (s, _) = c.bidegree();
                            if (fil.0..=fil.1).contains(&s) && (stems.0..=stems.1).contains(&c.stem()) {
                                slow.push(c);
                            }
                        }
                    }
                }
                slow.sort_by_key(|c| (c.s(), c.stem(), *c));
                assert_eq!(fast, slow, "{g} dual={dual}");
            }
        }
    }

    #[test]
    fn page_record_round_trip() {
        let ss = run_to_einfty(Group::F, &params(5)).unwrap();
        let page = ss.page_at(9);
        let diffs = ss.differentials_from(9);
        let record = page.record(&diffs);
        let (back, maps) = Page::from_record(&record).unwrap();
        assert_eq!(back, page);
        assert_eq!(maps.len(), 2);
        assert_eq!(&maps[0], diffs[0]);
    }

    #[test]
    fn labels() {
        let f = fam(Group::Cp, 5);
        assert_eq!(MonomialClass::new(f, 1, 2, -1).label(), "a b^2 d^-1");
        assert_eq!(MonomialClass::new(f, 0, 0, 0).label(), "1");
        assert_eq!(MonomialClass::new(fam(Group::F, 5), 1, 1, -1).dualized().label(), "(A B D^-1)*");
    }
}
