//! Osserman-type inequalities, their predicted equality cases, the
//! Riemann–Roch bookkeeping and omitted values of `g`.

use serde::Serialize;

use crate::ends::{classify_ends, EndReport, EndType};
use crate::localanalysis::{degree_numeric, MeroFn};
use crate::sing::{singular_points, SingReport};
use crate::wdata::WeierstrassData;
use crate::{Error, Point, Result};

#[derive(Clone, Debug, Serialize)]
pub struct Inequality {
    pub lhs: i64,
    pub rhs: i64,
    pub holds: bool,
    pub equal: bool,
    pub predicted_equal: bool,
    /// `equal == predicted_equal`.
    pub consistent: bool,
}

impl Inequality {
    fn new(lhs: i64, rhs: i64, predicted_equal: bool) -> Inequality {
        let equal = lhs == rhs;
        Inequality { lhs, rhs, holds: lhs >= rhs, equal, predicted_equal, consistent: equal == predicted_equal }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Degree {
    pub value: u32,
    /// Curvature integral when the degree was computed numerically.
    pub numeric: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct OmittedReport {
    pub values: Vec<Point>,
    pub count: usize,
    /// `count <= 2` and `count <= 3 - k / deg g`.
    pub bound_ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct OssermanReport {
    pub name: String,
    pub n: usize,
    pub k: usize,
    pub chi: i32,
    pub deg_g: Degree,
    pub deg_gstar: Degree,
    pub singular_orders: Vec<u32>,
    /// Total turning of the expanding and shrinking ends against `2k`.
    pub ineq1: Inequality,
    /// `deg G + deg G* >= n + Σ d_j`.
    pub ineq2: Inequality,
    /// `deg G >= n + k - χ`.
    pub ineq3: Inequality,
    /// `Σ ord w over ends + Σ d_j`, which must equal `-χ`.
    pub riemann_roch_sum: i64,
    pub riemann_roch_ok: bool,
    pub omitted: Option<OmittedReport>,
    pub ends: Vec<EndReport>,
    pub singular: Vec<SingReport>,
}

impl OssermanReport {
    /// Every inequality holds with the predicted equality pattern, Riemann–Roch
    /// balances and any omitted-value bound holds.
    pub fn ok(&self) -> bool {
        [&self.ineq1, &self.ineq2, &self.ineq3].iter().all(|i| i.holds && i.consistent)
            && self.riemann_roch_ok
            && self.omitted.as_ref().is_none_or(|o| o.bound_ok)
    }
}

/// Mapping degree, exact for rational maps and by the curvature integral otherwise.
pub fn map_degree(f: &MeroFn, data: &WeierstrassData) -> Result<Degree> {
    match f {
        MeroFn::Rational(r) => Ok(Degree { value: r.map_degree() as u32, numeric: None }),
        MeroFn::Elliptic(_) if f.is_constant() => Ok(Degree { value: 0, numeric: None }),
        MeroFn::Elliptic(_) => {
            let d = degree_numeric(f, &data.dom).map_err(|e| match e {
                Error::NotNearInteger { value, .. } => Error::DegreeUncertain(format!("{value}")),
                e => e,
            })?;
            Ok(Degree { value: d.degree, numeric: Some(d.value) })
        }
    }
}

pub fn osserman_report(data: &WeierstrassData) -> Result<OssermanReport> {
    data.ensure_valid()?;
    let ends = classify_ends(data)?;
    let singular = singular_points(data)?;
    let n = ends.len();
    let k = ends.iter().filter(|e| e.ord_omega <= -2).count();
    let chi = data.dom.chi();
    let deg_g = map_degree(&data.g, data)?;
    let deg_gstar = map_degree(&data.gstar()?, data)?;
    let d_sum: i64 = singular.iter().map(|s| s.order as i64).sum();

    let lhs1: i64 = ends
        .iter()
        .map(|e| match e.ord_omega {
            o if o <= -2 => -(o as i64),
            o if o >= 0 => o as i64,
            _ => 0,
        })
        .sum();
    let all_embedded = ends.iter().all(|e| e.embedded);
    let cat_planar = ends.iter().all(|e| {
        matches!(e.end_type, EndType::Planar | EndType::ExpandingCatenoidal | EndType::ShrinkingCatenoidal)
    });
    let layered = ends
        .iter()
        .all(|e| matches!(e.end_type, EndType::Planar | EndType::ExpandingCatenoidal) || e.layered_family);
    let ineq1 = Inequality::new(lhs1, 2 * k as i64, all_embedded);
    let ineq2 = Inequality::new(deg_g.value as i64 + deg_gstar.value as i64, n as i64 + d_sum, cat_planar);
    let ineq3 = Inequality::new(deg_g.value as i64, n as i64 + k as i64 - chi as i64, layered);
    let rr: i64 = ends.iter().map(|e| e.ord_omega as i64).sum::<i64>() + d_sum;

    let omitted = match omitted_values(data) {
        Ok(o) => Some(o),
        Err(Error::ConstantGauss | Error::UnsupportedType(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(OssermanReport {
        name: data.name.clone(),
        n,
        k,
        chi,
        deg_g,
        deg_gstar,
        singular_orders: singular.iter().map(|s| s.order).collect(),
        ineq1,
        ineq2,
        ineq3,
        riemann_roch_sum: rr,
        riemann_roch_ok: rr == -(chi as i64),
        omitted,
        ends,
        singular,
    })
}

/// Values of `g` on the sphere whose whole preimage lies in the punctures.
pub fn omitted_values(data: &WeierstrassData) -> Result<OmittedReport> {
    data.ensure_valid()?;
    let g = match &data.g {
        MeroFn::Rational(r) => r,
        MeroFn::Elliptic(_) => return Err(Error::UnsupportedType("omitted values are computed on the sphere".into())),
    };
    if g.is_constant() {
        return Err(Error::ConstantGauss);
    }
    const TOL: f64 = 1e-9;
    let mut values: Vec<Point> = Vec::new();
    for p in &data.dom.punctures {
        let w = g.value_at(p).unwrap_or(Point::Infinity);
        if values.iter().any(|v| v.same(&w, TOL)) {
            continue;
        }
        let preimages: Vec<Point> = match &w {
            Point::Infinity => {
                let mut pre: Vec<Point> = g.poles()?.into_iter().map(|(q, _)| q).collect();
                if g.value_at(&Point::Infinity).is_none() {
                    pre.push(Point::Infinity);
                }
                pre
            }
            _ => {
                let shifted = match w.as_exact() {
                    Some(e) => g.sub(&crate::cxpoly::RationalFn::constant(e.clone())),
                    None => return Err(Error::UnsupportedType("omitted value test needs exact values".into())),
                };
                let mut pre: Vec<Point> = shifted.zeros()?.into_iter().map(|(q, _)| q).collect();
                if g.value_at(&Point::Infinity).is_some_and(|v| v.same(&w, TOL)) {
                    pre.push(Point::Infinity);
                }
                pre
            }
        };
        if preimages.iter().all(|q| data.dom.is_puncture(q, TOL)) {
            values.push(w);
        }
    }
    let count = values.len();
    let deg = g.map_degree() as f64;
    let k = classify_ends(data)?.iter().filter(|e| e.ord_omega <= -2).count() as f64;
    let bound_ok = count <= 2 && (count as f64) <= 3.0 - k / deg + 1e-12;
    Ok(OmittedReport { values, count, bound_ok })
}
