//! The Gross-Hopkins shift `k_I` of `E^hH` for `H = C_p, F, G`, by two routes.
//!
//! Dual route: dualize the Tate spectral sequence and look for a
//! `d_(2n+1)`-cycle on its zero line. Its internal degree `t0` says the dual
//! sequence is that of `Σ^(t0) E^hH`, and removing the monochromatic shift
//! `n` leaves `k_I`.
//!
//! Determinant route (`F`, `G` only): the page of `Σ^n I E` is the untwisted
//! page on a generator in degree `2pk`, and the cycle generator of the
//! twisted page gives the shift directly.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mod_arith::HeightParams;
use crate::tate_engine::{
    differential, dualize, hfpss_view, run_to_einfty, twisted_e2, Family, Group, MonomialClass,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    Dual,
    Det,
    Both,
}

impl std::str::FromStr for Route {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dual" => Ok(Route::Dual),
            "det" => Ok(Route::Det),
            "both" => Ok(Route::Both),
            other => Err(Error::InvalidArgument(format!(
                "unknown route `{other}` (expected dual, det or both)"
            ))),
        }
    }
}

/// The zero-line class that fixes the shift.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub class: String,
    pub s: i64,
    pub t: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShiftReport {
    pub group: Group,
    pub p: u64,
    pub route: Route,
    pub k_i: i64,
    pub periodicity: i64,
    pub certificate: Certificate,
    /// The determinant-route certificate, when both routes ran.
    pub det_certificate: Option<Certificate>,
    pub agreement: Option<bool>,
}

/// The class `ε` whose dual certifies the shift: `a b^(n/2-1) d^(1-n/2)` for
/// `C_p`, `A B^(n/2-1) D^-1` for `F` and `G`.
pub fn epsilon_class(family: Family) -> MonomialClass {
    let n = family.n();
    match family.group {
        Group::Cp => MonomialClass::new(family, 1, n / 2 - 1, 1 - n / 2),
        _ => MonomialClass::new(family, 1, n / 2 - 1, -1),
    }
}

pub fn shift_dual_route(group: Group, params: &HeightParams) -> Result<ShiftReport> {
    let ss = run_to_einfty(group, params)?;
    let dual = dualize(&ss)?;
    let family = ss.family();
    let n = family.n();
    let period = periodicity(group, params)?;
    let page = dual.page_at(family.short_page());

    // zero-line classes of the dual over three periods
    let window = (-period, 2 * period - 1);
    let zero_line: Vec<MonomialClass> = page
        .classes_in_window(window, (0, 0))
        .into_iter()
        .filter(|c| (window.0..=window.1).contains(&c.t()))
        .collect();
    let mut cycles = Vec::new();
    for c in &zero_line {
        if differential(&page, c)?.is_none() {
            cycles.push(*c);
        }
    }
    if cycles.is_empty() {
        return Err(Error::Inconsistent(format!(
            "no d_{}-cycle on the zero line of the dual sequence for {group} at p = {}",
            family.short_page(),
            family.p
        )));
    }
    // uniqueness: consecutive cycle degrees differ by exactly one period
    let mut degrees: Vec<i64> = cycles.iter().map(MonomialClass::t).collect();
    degrees.sort_unstable();
    degrees.dedup();
    if degrees.len() != cycles.len() || degrees.windows(2).any(|w| w[1] - w[0] != period) {
        return Err(Error::Inconsistent(format!(
            "zero-line cycles of the dual at t = {degrees:?} are not spaced by the period {period}"
        )));
    }
    let eps = epsilon_class(family).dualized();
    let certificate = cycles.iter().find(|c| **c == eps).ok_or_else(|| {
        Error::Inconsistent(format!("the dual of {} is not a zero-line cycle", eps.dualized().label()))
    })?;
    let k_i = (certificate.t() - n).rem_euclid(period);
    Ok(ShiftReport {
        group,
        p: family.p,
        route: Route::Dual,
        k_i,
        periodicity: period,
        certificate: Certificate {
            class: certificate.label(),
            s: certificate.s(),
            t: certificate.t(),
        },
        det_certificate: None,
        agreement: None,
    })
}

pub fn shift_det_route(group: Group, params: &HeightParams) -> Result<ShiftReport> {
    if group == Group::Cp {
        return Err(Error::GroupNotSupported {
            what: "the determinant route",
            group: group.to_string(),
        });
    }
    let twisted = twisted_e2(group, params)?;
    let period = periodicity(group, params)?;
    let k = twisted.cycle_exponent()?;
    let (s, t) = twisted.class_degree(k);
    let n = params.n() as i64;
    let label = match k {
        0 => twisted.generator_label.clone(),
        1 => format!("D {}", twisted.generator_label),
        _ => format!("D^{k} {}", twisted.generator_label),
    };
    Ok(ShiftReport {
        group,
        p: params.p(),
        route: Route::Det,
        k_i: (t - n).rem_euclid(period),
        periodicity: period,
        certificate: Certificate { class: label, s, t },
        det_certificate: None,
        agreement: None,
    })
}

/// Runs both routes and fails unless they agree.
pub fn shift_both_routes(group: Group, params: &HeightParams) -> Result<ShiftReport> {
    let dual = shift_dual_route(group, params)?;
    let det = shift_det_route(group, params)?;
    if dual.k_i != det.k_i {
        return Err(Error::RouteDisagreement {
            group: group.to_string(),
            p: params.p(),
            dual: dual.k_i,
            dual_certificate: format!("{} at t = {}", dual.certificate.class, dual.certificate.t),
            det: det.k_i,
            det_certificate: format!("{} at t = {}", det.certificate.class, det.certificate.t),
        });
    }
    Ok(ShiftReport {
        route: Route::Both,
        det_certificate: Some(det.certificate),
        agreement: Some(true),
        ..dual
    })
}

pub fn shift(group: Group, params: &HeightParams, route: Route) -> Result<ShiftReport> {
    match route {
        Route::Dual => shift_dual_route(group, params),
        Route::Det => shift_det_route(group, params),
        Route::Both => shift_both_routes(group, params),
    }
}

pub fn verify_tate_vanishing(group: Group, params: &HeightParams) -> Result<bool> {
    Ok(run_to_einfty(group, params)?.einfty().is_empty())
}

/// Spacing of the zero-line survivors of the homotopy fixed point view.
pub fn periodicity(group: Group, params: &HeightParams) -> Result<i64> {
    let ss = run_to_einfty(group, params)?;
    let zero = hfpss_view(&ss).zero_line();
    let [generator] = zero.as_slice() else {
        return Err(Error::Inconsistent(format!(
            "expected one zero-line survivor class per period for {group}, found {}",
            zero.len()
        )));
    };
    let p = ss.family().p();
    Ok(generator.translate(0, p).t() - generator.t())
}

/// Shifts for all three groups at one prime.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShiftTable {
    pub p: u64,
    pub rows: Vec<ShiftReport>,
}

impl ShiftTable {
    pub fn get(&self, group: Group) -> Option<&ShiftReport> {
        self.rows.iter().find(|r| r.group == group)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "p = {}, n = {}", self.p, self.p - 1);
        let _ = writeln!(
            out,
            "{:<5} {:<5} {:>6} {:>8}  {:<28} agree",
            "group", "route", "k_I", "period", "certificate"
        );
        for r in &self.rows {
            let route = match r.route {
                Route::Dual => "dual",
                Route::Det => "det",
                Route::Both => "both",
            };
            let cert = format!("{} (0, {})", r.certificate.class, r.certificate.t);
            let agree = match r.agreement {
                Some(true) => "yes",
                Some(false) => "NO",
                None => "-",
            };
            let _ = writeln!(
                out,
                "{:<5} {:<5} {:>6} {:>8}  {:<28} {}",
                r.group.name(),
                route,
                r.k_i,
                r.periodicity,
                cert,
                agree
            );
            if let Some(det) = &r.det_certificate {
                let _ = writeln!(out, "{:<5} {:<5} {:>6} {:>8}  {} (0, {})", "", "", "", "", det.class, det.t);
            }
        }
        out
    }
}

/// The table for `route`. With `Both`, `C_p` uses the dual route alone since
/// no determinant route exists there; with `Det`, `C_p` is left out.
pub fn shifts_table_for(params: &HeightParams, route: Route) -> Result<ShiftTable> {
    let mut rows = Vec::new();
    for group in Group::ALL {
        let r = match (group, route) {
            (Group::Cp, Route::Det) => continue,
            (Group::Cp, Route::Both) => Route::Dual,
            (_, r) => r,
        };
        rows.push(shift(group, params, r)?);
    }
    Ok(ShiftTable { p: params.p(), rows })
}

pub fn shifts_table(params: &HeightParams) -> Result<ShiftTable> {
    shifts_table_for(params, Route::Both)
}
