//! End classification from the orders of `w`, `w* = dg` and `g w`, and the
//! asymptotic model of each end.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::localanalysis::{Kind, LaurentJet, LocalAnalyzer};
use crate::surface::{chart, SurfaceEvaluator};
use crate::wdata::{cx, WeierstrassData};
use crate::{Point, Result, C64};

const RES_ZERO: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndType {
    Planar,
    ExpandingCatenoidal,
    ShrinkingCatenoidal,
    EnneperParabolic,
    LayeredShrinkingCatenoidal,
    Other,
}

impl fmt::Display for EndType {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        let s = match self {
            EndType::Planar => "planar",
            EndType::ExpandingCatenoidal => "expanding catenoidal",
            EndType::ShrinkingCatenoidal => "shrinking catenoidal",
            EndType::EnneperParabolic => "Enneper parabolic",
            EndType::LayeredShrinkingCatenoidal => "layered shrinking catenoidal",
            EndType::Other => "other",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Growth {
    Expanding,
    Shrinking,
    Neither,
}

/// Label from the orders. `ord_omega_star` is `None` when `w* ≡ 0`, `ord_g_omega`
/// is `None` when `g w ≡ 0`. Returns the most specific label and whether the
/// end belongs to the layered family.
pub fn end_type_from_orders(
    ord_omega: i32,
    ord_omega_star: Option<i32>,
    ord_g_omega: Option<i32>,
    res_g_omega_zero: bool,
) -> (EndType, bool) {
    let layered = ord_omega >= 0 && ord_g_omega == Some(-1);
    let t = match (ord_omega, ord_omega_star) {
        (-2, None) => EndType::Planar,
        (-2, Some(s)) if s >= 1 => EndType::Planar,
        (-2, Some(0)) => EndType::ExpandingCatenoidal,
        (0, Some(-2)) => EndType::ShrinkingCatenoidal,
        (-2, Some(-2)) if res_g_omega_zero => EndType::EnneperParabolic,
        _ if layered => EndType::LayeredShrinkingCatenoidal,
        _ => EndType::Other,
    };
    (t, layered)
}

pub fn growth_of(ord_omega: i32) -> Growth {
    if ord_omega <= -2 {
        Growth::Expanding
    } else if ord_omega >= 0 {
        Growth::Shrinking
    } else {
        Growth::Neither
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EndReport {
    pub point: Point,
    pub ord_omega: i32,
    /// `None` when `w* = dg` vanishes identically.
    pub ord_omega_star: Option<i32>,
    /// `None` when `g w` vanishes identically.
    pub ord_g_omega: Option<i32>,
    pub res_g_omega: [f64; 2],
    pub growth: Growth,
    pub embedded: bool,
    pub end_type: EndType,
    pub layered_family: bool,
}

/// Classify the end at the puncture `p`.
pub fn classify_end(data: &WeierstrassData, p: &Point) -> Result<EndReport> {
    data.ensure_valid()?;
    classify_with(data, &data.analyzer()?, p)
}

/// Classify every end.
pub fn classify_ends(data: &WeierstrassData) -> Result<Vec<EndReport>> {
    data.ensure_valid()?;
    let an = data.analyzer()?;
    data.dom.punctures.iter().map(|p| classify_with(data, &an, p)).collect()
}

fn classify_with(data: &WeierstrassData, an: &LocalAnalyzer, p: &Point) -> Result<EndReport> {
    let ord_omega = an.order(&data.omega, p, Kind::Form)?;
    let gp = data.g_prime();
    let ord_omega_star = if gp.is_zero() { None } else { Some(an.order(gp, p, Kind::Form)?) };
    let (ord_g_omega, res) = if data.g_omega.is_zero() {
        (None, C64::new(0.0, 0.0))
    } else {
        let o = an.order(&data.g_omega, p, Kind::Form)?;
        let res = if o <= -1 {
            an.jet(&data.g_omega, p, (-o) as usize, Kind::Form)?.residue()
        } else {
            C64::new(0.0, 0.0)
        };
        (Some(o), res)
    };
    let (end_type, layered_family) = end_type_from_orders(ord_omega, ord_omega_star, ord_g_omega, res.norm() < RES_ZERO);
    Ok(EndReport {
        point: p.clone(),
        ord_omega,
        ord_omega_star,
        ord_g_omega,
        res_g_omega: cx(res),
        growth: growth_of(ord_omega),
        embedded: ord_omega == -2 || ord_omega == 0,
        end_type,
        layered_family,
    })
}

/// `f ≈ (Re A(t) + c log|t|, Re B(t), Im B(t)) + C` in the local coordinate
/// `t`, where `A`, `B` collect the terms of `∫ g w`, `∫ w` up to `t¹`.
#[derive(Clone, Debug, Serialize)]
pub struct AsymptoticModel {
    pub point: Point,
    pub end_type: EndType,
    /// `(power, coefficient)` of `A`.
    pub t_terms: Vec<(i32, [f64; 2])>,
    /// Coefficient of `log|t|` in `f⁰`.
    pub log_coeff: f64,
    /// `(power, coefficient)` of `B`.
    pub xy_terms: Vec<(i32, [f64; 2])>,
    pub constant: [f64; 3],
    /// Radius of the circle used for the constant.
    pub radius: f64,
}

impl AsymptoticModel {
    pub fn eval(&self, t: C64) -> [f64; 3] {
        let sum = |terms: &[(i32, [f64; 2])]| -> C64 {
            terms.iter().map(|(n, c)| C64::new(c[0], c[1]) * t.powi(*n)).sum()
        };
        let a = sum(&self.t_terms);
        let b = sum(&self.xy_terms);
        [
            a.re + self.log_coeff * t.norm().ln() + self.constant[0],
            b.re + self.constant[1],
            b.im + self.constant[2],
        ]
    }

    /// Scale used for the relative O(1) tolerance.
    pub fn scale(&self) -> f64 {
        self.t_terms
            .iter()
            .chain(&self.xy_terms)
            .map(|(_, c)| c[0].hypot(c[1]))
            .chain([self.log_coeff.abs()])
            .chain(self.constant.iter().map(|c| c.abs()))
            .fold(1.0, f64::max)
    }
}

/// Integrate a jet termwise, keeping powers up to `t¹`. The `t⁻¹` term is
/// returned separately as the log coefficient.
fn integrate_jet(j: &LaurentJet) -> (Vec<(i32, [f64; 2])>, C64) {
    let mut terms = Vec::new();
    for n in j.lead_order..=0 {
        let c = j.coeff(n);
        if n != -1 && c.norm() > 0.0 {
            terms.push((n + 1, cx(c / (n + 1) as f64)));
        }
    }
    (terms, j.coeff(-1))
}

fn jet_to_zero(an: &LocalAnalyzer, f: &crate::localanalysis::MeroFn, p: &Point) -> Result<Option<LaurentJet>> {
    if f.is_zero() {
        return Ok(None);
    }
    let o = an.order(f, p, Kind::Form)?;
    if o > 0 {
        return Ok(None);
    }
    Ok(Some(an.jet(f, p, (1 - o) as usize, Kind::Form)?))
}

pub fn asymptotic_model(data: &WeierstrassData, p: &Point) -> Result<AsymptoticModel> {
    let ev = SurfaceEvaluator::new(data)?;
    model_with(&ev, p)
}

fn model_with(ev: &SurfaceEvaluator, p: &Point) -> Result<AsymptoticModel> {
    let data = ev.data();
    let an = data.analyzer()?;
    let end = classify_with(data, &an, p)?;
    let (t_terms, log_coeff) = match jet_to_zero(&an, &data.g_omega, p)? {
        Some(j) => integrate_jet(&j),
        None => (Vec::new(), C64::new(0.0, 0.0)),
    };
    let (xy_terms, _) = match jet_to_zero(&an, &data.omega, p)? {
        Some(j) => integrate_jet(&j),
        None => (Vec::new(), C64::new(0.0, 0.0)),
    };
    let mut model = AsymptoticModel {
        point: p.clone(),
        end_type: end.end_type,
        t_terms,
        log_coeff: log_coeff.re,
        xy_terms,
        constant: [0.0; 3],
        radius: 0.0,
    };
    // f - model is harmonic across t = 0, so its circle mean is the constant
    let r = 0.5 * an.radius_at(p)?;
    const N: usize = 128;
    let ts: Vec<C64> = (0..N).map(|j| C64::from_polar(r, 2.0 * PI * (j as f64 + 0.25) / N as f64)).collect();
    let zs: Vec<C64> = ts.iter().map(|&t| chart(p, t)).collect();
    let vals = ev.eval_many(&zs)?;
    let mut c = [0.0; 3];
    for (t, v) in ts.iter().zip(&vals) {
        let m = model.eval(*t);
        for k in 0..3 {
            c[k] += (v[k] - m[k]) / N as f64;
        }
    }
    model.constant = c;
    model.radius = r;
    Ok(model)
}

#[derive(Clone, Debug, Serialize)]
pub struct O1Table {
    pub point: Point,
    pub radii: Vec<f64>,
    /// `sup |f - model|` over each circle, max norm.
    pub deviations: Vec<f64>,
    pub scale: f64,
    pub pass: bool,
}

pub const DEFAULT_RADII: [f64; 5] = [1e-1, 1e-1 * 0.31622776601683794, 1e-2, 1e-2 * 0.31622776601683794, 1e-3];

/// Sup-norm deviation of `f` from the model on circles of the given radii.
/// Passes when the deviations eventually decrease and the last is below
/// `1e-3` of the model scale.
pub fn verify_o1(data: &WeierstrassData, p: &Point, radii: &[f64]) -> Result<O1Table> {
    let ev = SurfaceEvaluator::new(data)?;
    let model = model_with(&ev, p)?;
    const ANGLES: usize = 64;
    let mut deviations = Vec::with_capacity(radii.len());
    for &r in radii {
        let ts: Vec<C64> = (0..ANGLES).map(|j| C64::from_polar(r, 2.0 * PI * j as f64 / ANGLES as f64)).collect();
        let zs: Vec<C64> = ts.iter().map(|&t| chart(p, t)).collect();
        let vals = ev.eval_many(&zs)?;
        let dev = ts
            .iter()
            .zip(&vals)
            .map(|(t, v)| {
                let m = model.eval(*t);
                (0..3).map(|k| (v[k] - m[k]).abs()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        deviations.push(dev);
    }
    let scale = model.scale();
    let noise = 1e-9 * scale;
    let peak = deviations
        .iter()
        .enumerate()
        .fold(0, |best, (i, &d)| if d > deviations[best] { i } else { best });
    let decreasing = deviations[peak..].windows(2).all(|w| w[1] <= w[0] + noise);
    let last_small = deviations.last().is_some_and(|&d| d < 1e-3 * scale);
    Ok(O1Table { point: p.clone(), radii: radii.to_vec(), deviations, scale, pass: decreasing && last_small })
}
