//! Singular points (zeros of `w` inside the domain) and the numerical
//! Whitney cross-cap criterion.

use serde::Serialize;

use crate::surface::SurfaceEvaluator;
use crate::wdata::WeierstrassData;
use crate::{Error, Point, Result, C64};

pub const DEFAULT_STEP: f64 = 1e-3;

#[derive(Clone, Debug, Serialize)]
pub struct WhitneyResult {
    /// `|det(f_u, f_uv, f_vv)|` in the rotated coordinates.
    pub det: f64,
    /// `|det| / (|f_u| S²)`, `S = max(|f_uv|, |f_vv|, |f_u|)`.
    pub ratio: f64,
    pub step: f64,
    pub cross_cap: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SingReport {
    pub point: Point,
    /// Order of the zero of `w`.
    pub order: u32,
    pub corank: u32,
    /// Cross cap as predicted from `order = 1`.
    pub cross_cap: bool,
    pub whitney: Option<WhitneyResult>,
}

/// Zeros of `w` inside the domain, each a corank-one singular point.
pub fn singular_points(data: &WeierstrassData) -> Result<Vec<SingReport>> {
    data.ensure_valid()?;
    Ok(data
        .omega_zeros()?
        .into_iter()
        .map(|(point, order)| SingReport { point, order, corank: 1, cross_cap: order == 1, whitney: None })
        .collect())
}

/// Singular points with the Whitney check run at each.
pub fn singular_points_checked(data: &WeierstrassData, h: f64) -> Result<Vec<SingReport>> {
    let ev = SurfaceEvaluator::new(data)?;
    let mut out = singular_points(data)?;
    for s in &mut out {
        let q = s.point.finite().expect("finite singular point");
        s.whitney = Some(whitney_with(&ev, q, h)?);
    }
    Ok(out)
}

pub fn whitney_check(data: &WeierstrassData, q: C64, h: f64) -> Result<WhitneyResult> {
    let ev = SurfaceEvaluator::new(data)?;
    whitney_with(&ev, q, h)
}

/// Central differences in coordinates `z = q + e^{iφ}(u + iv)` with
/// `φ = -arg(g w(q))`, chosen so that `f_v(q) = 0`.
fn whitney_with(ev: &SurfaceEvaluator, q: C64, h: f64) -> Result<WhitneyResult> {
    let gw = ev.data().g_omega.eval(q)?;
    let rot = if gw.norm() > 0.0 { C64::from_polar(1.0, -gw.arg()) } else { C64::new(1.0, 0.0) };
    let f = |u: f64, v: f64| ev.eval(q + rot * C64::new(u * h, v * h));
    let sub = |a: [f64; 3], b: [f64; 3]| [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    let norm = |a: [f64; 3]| (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
    let scale = |a: [f64; 3], s: f64| [a[0] * s, a[1] * s, a[2] * s];

    let c = f(0.0, 0.0)?;
    let fu = scale(sub(f(1.0, 0.0)?, f(-1.0, 0.0)?), 0.5 / h);
    let fvv = scale(sub(sub(f(0.0, 1.0)?, c), sub(c, f(0.0, -1.0)?)), 1.0 / (h * h));
    let fuv = scale(
        sub(sub(f(1.0, 1.0)?, f(1.0, -1.0)?), sub(f(-1.0, 1.0)?, f(-1.0, -1.0)?)),
        0.25 / (h * h),
    );
    let det = (fu[0] * (fuv[1] * fvv[2] - fuv[2] * fvv[1]) - fu[1] * (fuv[0] * fvv[2] - fuv[2] * fvv[0])
        + fu[2] * (fuv[0] * fvv[1] - fuv[1] * fvv[0]))
        .abs();
    let nu = norm(fu);
    let s = norm(fuv).max(norm(fvv)).max(nu);
    let ratio = if nu > 0.0 { det / (nu * s * s) } else { 0.0 };
    if ratio > 10.0 * h {
        Ok(WhitneyResult { det, ratio, step: h, cross_cap: true })
    } else if ratio < h * h {
        Ok(WhitneyResult { det, ratio, step: h, cross_cap: false })
    } else {
        Err(Error::IndeterminateScale { ratio, h })
    }
}

/// `Δ = |d(1/g) / (g w)|²` at a simple zero `q` of `w`, equal to `|w'(q)|² / |g w(q)|⁴`.
pub fn whitney_delta(data: &WeierstrassData, q: C64) -> Result<f64> {
    let w1 = data.omega.derivative().eval(q)?;
    let gw = data.g_omega.eval(q)?;
    Ok(w1.norm_sqr() / gw.norm_sqr().powi(2))
}
