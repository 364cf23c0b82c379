use rayon::prelude::*;
use serde::Serialize;

use super::{DomainSpec, Kind, MeroFn};
use crate::cxpoly::GaussRat;
use crate::elliptic;
use crate::{Error, Point, Result, C64};

const GRID: usize = 12;
const SNAP_TOL: f64 = 1e-9;
const SNAP_DEN: i64 = 16;

/// A zero (positive order) or pole (negative order) of a function.
#[derive(Clone, Debug, Serialize)]
pub struct DivisorPoint {
    pub point: Point,
    pub order: i32,
}

fn newton_on_log_derivative(fs: [&MeroFn; 3], mut z: C64) -> Option<C64> {
    let mut last = f64::INFINITY;
    for _ in 0..80 {
        let [f, fp, fpp] = match MeroFn::eval_all(fs, z) {
            Ok(v) => v,
            Err(_) => return Some(z),
        };
        if fp.norm() == 0.0 {
            return (f.norm() == 0.0).then_some(z);
        }
        let u = f / fp;
        let du = 1.0 - f * fpp / (fp * fp);
        if du.norm() == 0.0 || !du.re.is_finite() {
            return None;
        }
        let mut step = u / du;
        if step.norm() > 0.25 {
            step *= 0.25 / step.norm();
        }
        z -= step;
        last = step.norm();
        if last < 1e-12 * z.norm().max(1.0) {
            return Some(z);
        }
    }
    // stalled in rounding noise next to a zero or pole; the contour pass refines it
    (last < 1e-6).then_some(z)
}

/// `(Σ m_k, Σ m_k (z_k - c))` over the zeros and poles inside `|z - c| = r`.
fn contour_moments(f: &MeroFn, fp: &MeroFn, c: C64, r: f64) -> Result<(f64, C64)> {
    const M: usize = 512;
    let mut n0 = C64::new(0.0, 0.0);
    let mut n1 = C64::new(0.0, 0.0);
    for j in 0..M {
        let e = C64::from_polar(r, 2.0 * std::f64::consts::PI * j as f64 / M as f64);
        let [v, dv] = MeroFn::eval_all([f, fp], c + e)?;
        let q = dv / v * e / M as f64;
        n0 += q;
        n1 += q * e;
    }
    Ok((n0.re, n1))
}

fn snap(z: C64) -> Point {
    match GaussRat::approximate(z, SNAP_DEN) {
        Some(g) if (g.to_c64() - z).norm() < SNAP_TOL => Point::Exact(g),
        _ => Point::Approx(z),
    }
}

/// Zeros and poles of an elliptic function on the torus, located by Newton's
/// method on `f/f'` from a seed grid and classified by contour jets.
pub fn divisor_search(f: &MeroFn, dom: &DomainSpec) -> Result<Vec<DivisorPoint>> {
    let fp = f.derivative();
    let fpp = fp.derivative();
    let seeds: Vec<C64> = (0..GRID * GRID)
        .map(|k| {
            let (i, j) = (k / GRID, k % GRID);
            C64::new(
                (i as f64 + 0.5) / GRID as f64 - 0.5 + 0.0131,
                (j as f64 + 0.5) / GRID as f64 - 0.5 + 0.0077,
            )
        })
        .collect();
    let found: Vec<C64> = seeds
        .par_iter()
        .filter_map(|&s| newton_on_log_derivative([f, &fp, &fpp], s))
        .map(elliptic::reduce)
        .collect();
    let mut reps: Vec<C64> = Vec::new();
    for z in found {
        if !reps.iter().any(|&r| dom.distance(r, z) < 1e-6) {
            reps.push(z);
        }
    }
    let mut out: Vec<DivisorPoint> = Vec::new();
    for (i, &z) in reps.iter().enumerate() {
        let near = reps
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &o)| dom.distance(o, z))
            .fold(f64::INFINITY, f64::min);
        let r = (0.4 * near).min(0.05);
        let (n0, n1) = contour_moments(f, &fp, z, r)?;
        let order = n0.round();
        if (n0 - order).abs() > 1e-3 {
            return Err(Error::NonConvergence(format!("winding number {n0} near {z}")));
        }
        if order == 0.0 {
            continue;
        }
        let point = snap(elliptic::reduce(z + n1 / order));
        if !out.iter().any(|d| dom.same_point(&d.point, &point, 1e-7)) {
            out.push(DivisorPoint { point, order: order as i32 });
        }
    }
    let total: i32 = out.iter().map(|d| d.order).sum();
    if total != 0 {
        return Err(Error::NonConvergence(format!("divisor search found total order {total}")));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::MeroExpr;

    #[test]
    fn wp_prime_divisor() {
        let dom = DomainSpec::torus(vec![]);
        let f = MeroFn::Elliptic(MeroExpr::WpPrime);
        let d = divisor_search(&f, &dom).unwrap();
        assert_eq!(d.len(), 4);
        let pole = d.iter().find(|p| p.order < 0).unwrap();
        assert_eq!(pole.order, -3);
        assert_eq!(pole.point, Point::exact(0, 0));
        assert_eq!(d.iter().filter(|p| p.order == 1).count(), 3);
    }
}

/// Divisor of `f` (as a function or as the coefficient of `f dz`) on the
/// compact surface: exact roots on the sphere, numeric search on the torus.
pub fn divisor_of(f: &MeroFn, dom: &DomainSpec, kind: Kind) -> Result<Vec<DivisorPoint>> {
    match f {
        MeroFn::Rational(r) => {
            if r.is_zero() {
                return Err(Error::ZeroFunction);
            }
            let mut out: Vec<DivisorPoint> = r
                .zeros()?
                .into_iter()
                .map(|(point, m)| DivisorPoint { point, order: m as i32 })
                .chain(r.poles()?.into_iter().map(|(point, m)| DivisorPoint { point, order: -(m as i32) }))
                .collect();
            if !dom.is_torus() {
                let o = r.order_at(&Point::Infinity)? - if kind == Kind::Form { 2 } else { 0 };
                if o != 0 {
                    out.push(DivisorPoint { point: Point::Infinity, order: o });
                }
            }
            Ok(out)
        }
        MeroFn::Elliptic(_) => {
            if f.is_zero() {
                return Err(Error::ZeroFunction);
            }
            divisor_search(f, dom)
        }
    }
}
