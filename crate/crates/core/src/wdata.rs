//! The Weierstrass data object: validation, duals and pointwise geometry.

use std::sync::OnceLock;

use serde::Serialize;

use crate::elliptic::MeroExpr;
use crate::localanalysis::{divisor_of, fs_density, DivisorPoint, DomainSpec, Kind, LocalAnalyzer, MeroFn};
use crate::quad;
use crate::{Error, Point, Result, C64};

const RES_TOL: f64 = 1e-9;
const CYCLE_TOL: f64 = 1e-8;
const SAME_TOL: f64 = 1e-7;

/// Closed forms `f⁰ = log|f0_log_abs|` and `f¹ + i f² = gstar`.
#[derive(Clone, Debug)]
pub struct ClosedForm {
    pub f0_log_abs: Option<MeroFn>,
    pub gstar: MeroFn,
}

/// Divisors of the form `w`, the form `g w` and the function `g`.
#[derive(Clone, Debug, Serialize)]
pub struct Divisors {
    pub omega: Vec<DivisorPoint>,
    pub g_omega: Vec<DivisorPoint>,
    pub g: Vec<DivisorPoint>,
}

/// Weierstrass data `(g, w)` with `w = omega(z) dz` on a punctured surface.
#[derive(Debug)]
pub struct WeierstrassData {
    pub name: String,
    pub dom: DomainSpec,
    pub g: MeroFn,
    pub omega: MeroFn,
    pub g_omega: MeroFn,
    pub closed_form: Option<ClosedForm>,
    g_prime: OnceLock<MeroFn>,
    divisors: OnceLock<std::result::Result<Divisors, Error>>,
    validation: OnceLock<std::result::Result<ValidationReport, Error>>,
}

impl Clone for WeierstrassData {
    fn clone(&self) -> Self {
        WeierstrassData::build(
            self.name.clone(),
            self.dom.clone(),
            self.g.clone(),
            self.omega.clone(),
            self.g_omega.clone(),
            self.closed_form.clone(),
        )
    }
}

fn product(a: &MeroFn, b: &MeroFn) -> Result<MeroFn> {
    match (a, b) {
        (MeroFn::Rational(x), MeroFn::Rational(y)) => Ok(MeroFn::Rational(x.mul(y))),
        (MeroFn::Elliptic(x), MeroFn::Elliptic(y)) => Ok(MeroFn::Elliptic(MeroExpr::mul(x.clone(), y.clone()))),
        _ => Err(Error::UnsupportedType("mixed rational and elliptic carriers".into())),
    }
}

impl WeierstrassData {
    fn build(
        name: String,
        dom: DomainSpec,
        g: MeroFn,
        omega: MeroFn,
        g_omega: MeroFn,
        closed_form: Option<ClosedForm>,
    ) -> WeierstrassData {
        WeierstrassData {
            name,
            dom,
            g,
            omega,
            g_omega,
            closed_form,
            g_prime: OnceLock::new(),
            divisors: OnceLock::new(),
            validation: OnceLock::new(),
        }
    }

    /// Data with `g w` formed as the product.
    pub fn new(name: impl Into<String>, dom: DomainSpec, g: MeroFn, omega: MeroFn) -> Result<WeierstrassData> {
        let g_omega = product(&g, &omega)?;
        WeierstrassData::with_g_omega(name, dom, g, omega, g_omega, None)
    }

    /// Data with an explicitly supplied `g w`, used where the product would
    /// form `0 · ∞` numerically.
    pub fn with_g_omega(
        name: impl Into<String>,
        dom: DomainSpec,
        g: MeroFn,
        omega: MeroFn,
        g_omega: MeroFn,
        closed_form: Option<ClosedForm>,
    ) -> Result<WeierstrassData> {
        if omega.is_zero() {
            return Err(Error::ZeroFunction);
        }
        Ok(WeierstrassData::build(name.into(), dom, g, omega, g_omega, closed_form))
    }

    pub fn is_rational(&self) -> bool {
        self.g.as_rational().is_some() && self.omega.as_rational().is_some()
    }

    pub fn g_prime(&self) -> &MeroFn {
        self.g_prime.get_or_init(|| self.g.derivative())
    }

    pub fn divisors(&self) -> Result<&Divisors> {
        self.divisors
            .get_or_init(|| {
                let omega = divisor_of(&self.omega, &self.dom, Kind::Form)?;
                let g_omega = if self.g_omega.is_zero() {
                    Vec::new()
                } else {
                    divisor_of(&self.g_omega, &self.dom, Kind::Form)?
                };
                let g = match &self.g {
                    MeroFn::Rational(r) if r.is_zero() => Vec::new(),
                    MeroFn::Rational(_) => divisor_of(&self.g, &self.dom, Kind::Function)?,
                    MeroFn::Elliptic(_) if self.g_omega.is_zero() => Vec::new(),
                    MeroFn::Elliptic(_) => self.quotient_divisor(&g_omega, &omega),
                };
                Ok(Divisors { omega, g_omega, g })
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    fn quotient_divisor(&self, num: &[DivisorPoint], den: &[DivisorPoint]) -> Vec<DivisorPoint> {
        let mut out: Vec<DivisorPoint> = num.to_vec();
        for d in den {
            match out.iter_mut().find(|p| self.dom.same_point(&p.point, &d.point, SAME_TOL)) {
                Some(p) => p.order -= d.order,
                None => out.push(DivisorPoint { point: d.point.clone(), order: -d.order }),
            }
        }
        out.retain(|p| p.order != 0);
        out
    }

    /// Every finite point where `g`, `w` or `g w` has a zero or pole.
    pub fn special_points(&self) -> Result<Vec<C64>> {
        let d = self.divisors()?;
        Ok(d.omega
            .iter()
            .chain(&d.g_omega)
            .chain(&d.g)
            .filter_map(|p| p.point.finite())
            .collect())
    }

    pub fn analyzer(&self) -> Result<LocalAnalyzer> {
        Ok(LocalAnalyzer::new(&self.dom, &self.special_points()?))
    }

    /// Zeros of `w` inside the domain with their orders.
    pub fn omega_zeros(&self) -> Result<Vec<(Point, u32)>> {
        Ok(self
            .divisors()?
            .omega
            .iter()
            .filter(|p| p.order > 0 && !self.dom.is_puncture(&p.point, SAME_TOL))
            .map(|p| (p.point.clone(), p.order as u32))
            .collect())
    }

    pub fn check_compatibility(&self) -> Result<CompatReport> {
        let d = self.divisors()?;
        let inside = |p: &Point| !self.dom.is_puncture(p, SAME_TOL);
        let gomega_poles_inside: Vec<Point> = d
            .g_omega
            .iter()
            .filter(|p| p.order < 0 && inside(&p.point))
            .map(|p| p.point.clone())
            .collect();
        let omega_poles_inside: Vec<Point> = d
            .omega
            .iter()
            .filter(|p| p.order < 0 && inside(&p.point))
            .map(|p| p.point.clone())
            .collect();
        let common_zeros: Vec<Point> = d
            .omega
            .iter()
            .filter(|p| p.order > 0 && inside(&p.point))
            .filter(|p| {
                self.g_omega.is_zero()
                    || d.g_omega
                        .iter()
                        .any(|q| q.order > 0 && self.dom.same_point(&p.point, &q.point, SAME_TOL))
            })
            .map(|p| p.point.clone())
            .collect();
        let removable_punctures: Vec<Point> = self
            .dom
            .punctures
            .iter()
            .filter(|p| {
                !d.omega
                    .iter()
                    .chain(&d.g_omega)
                    .any(|q| q.order < 0 && self.dom.same_point(p, &q.point, SAME_TOL))
            })
            .cloned()
            .collect();
        let ok = gomega_poles_inside.is_empty() && common_zeros.is_empty();
        let ends_ok = omega_poles_inside.is_empty() && removable_punctures.is_empty();
        Ok(CompatReport { ok, ends_ok, gomega_poles_inside, omega_poles_inside, common_zeros, removable_punctures })
    }

    pub fn check_periods(&self) -> Result<PeriodReport> {
        let mut residues = Vec::new();
        let analyzer = self.analyzer()?;
        for p in &self.dom.punctures {
            let exact = match (&self.omega, &self.g_omega, p) {
                (MeroFn::Rational(w), MeroFn::Rational(gw), Point::Exact(a)) => {
                    Some((w.residue_at(a), gw.residue_at(a)))
                }
                (MeroFn::Rational(w), MeroFn::Rational(gw), Point::Infinity) => {
                    Some((w.residue_at_infinity(), gw.residue_at_infinity()))
                }
                _ => None,
            };
            let row = match exact {
                Some((rw, rgw)) => ResidueRow {
                    point: p.clone(),
                    res_omega: cx(rw.to_c64()),
                    res_g_omega: cx(rgw.to_c64()),
                    exact: true,
                    ok: rw.is_zero() && rgw.im == num_rational::BigRational::from_integer(0.into()),
                },
                None => {
                    let rw = analyzer.residue_numeric(&self.omega, p)?;
                    let rgw = if self.g_omega.is_zero() {
                        C64::new(0.0, 0.0)
                    } else {
                        analyzer.residue_numeric(&self.g_omega, p)?
                    };
                    ResidueRow {
                        point: p.clone(),
                        res_omega: cx(rw),
                        res_g_omega: cx(rgw),
                        exact: false,
                        ok: rw.norm() < RES_TOL && rgw.im.abs() < RES_TOL,
                    }
                }
            };
            residues.push(row);
        }
        let cycles = if self.dom.is_torus() { Some(self.cycle_integrals()?) } else { None };
        let ok = residues.iter().all(|r| r.ok) && cycles.as_ref().is_none_or(|c| c.iter().all(|c| c.ok));
        Ok(PeriodReport { ok, residues, cycles })
    }

    /// `∮ w` and `∮ g w` along the two lattice generators.
    fn cycle_integrals(&self) -> Result<Vec<CycleRow>> {
        let special = self.special_points()?;
        let mut out = Vec::new();
        for (label, dir) in [("1", C64::new(1.0, 0.0)), ("i", C64::new(0.0, 1.0))] {
            let normal = dir * C64::new(0.0, 1.0);
            let offset = [0.13, 0.17, 0.29, -0.21, 0.37, -0.07, 0.43]
                .into_iter()
                .map(|s| normal * s)
                .find(|&o| {
                    special.iter().all(|&p| {
                        let rel = crate::elliptic::reduce(p - o);
                        // distance from the line through o with direction dir, modulo the lattice
                        let across = (rel * dir.conj()).im.abs();
                        across.min(1.0 - across) > 0.05
                    })
                })
                .ok_or_else(|| Error::PathThroughSingularity(format!("generator {label}")))?;
            let start = offset - 0.5 * dir;
            let v = quad::integrate(
                |t: f64| {
                    let z = start + dir * t;
                    let [w, gw] = MeroFn::eval_all([&self.omega, &self.g_omega], z)?;
                    Ok([w * dir, gw * dir])
                },
                0.0,
                1.0,
                1e-12,
                1e-13,
            )?;
            let ok = v[0].norm() < CYCLE_TOL && v[1].re.abs() < CYCLE_TOL;
            out.push(CycleRow { generator: label.to_string(), omega: cx(v[0]), g_omega: cx(v[1]), ok });
        }
        Ok(out)
    }

    /// Both conditions plus end bookkeeping; cached.
    pub fn validate(&self) -> Result<&ValidationReport> {
        self.validation
            .get_or_init(|| {
                let compat = self.check_compatibility()?;
                let periods = self.check_periods()?;
                Ok(ValidationReport {
                    compat_ok: compat.ok,
                    period_ok: periods.ok,
                    ends_ok: compat.ends_ok,
                    compat,
                    periods,
                })
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let v = self.validate()?;
        if v.ok() {
            Ok(())
        } else {
            Err(Error::NotValidated(format!(
                "{}: compatibility {}, periods {}, ends {}",
                self.name, v.compat_ok, v.period_ok, v.ends_ok
            )))
        }
    }

    /// `g*` as a function: closed form if supplied, else the rational primitive of `w`.
    pub fn gstar(&self) -> Result<MeroFn> {
        if let Some(c) = &self.closed_form {
            return Ok(c.gstar.clone());
        }
        match &self.omega {
            MeroFn::Rational(w) => {
                let a = w.antiderivative()?;
                if !a.logs.is_empty() {
                    return Err(Error::NotValidated("w has a residue, so g* is multivalued".into()));
                }
                Ok(MeroFn::Rational(a.rational))
            }
            MeroFn::Elliptic(_) => Err(Error::UnsupportedType("g* on the torus needs a closed form".into())),
        }
    }

    /// Dual data `(g*, w*) = (∫w, dg)` on the domain with singular points removed.
    pub fn dual_data(&self) -> Result<WeierstrassData> {
        self.ensure_valid()?;
        let gstar = self.gstar()?;
        let omega_star = self.g_prime().clone();
        if omega_star.is_zero() {
            return Err(Error::DegenerateDual(format!("{}: g is constant, so w* = 0", self.name)));
        }
        let mut punctures = self.dom.punctures.clone();
        punctures.extend(self.omega_zeros()?.into_iter().map(|(p, _)| p));
        let dom = DomainSpec { kind: self.dom.kind, punctures };
        let g_omega = product(&gstar, &omega_star)?;
        let closed_form = match (&self.closed_form, &self.g) {
            (Some(_), MeroFn::Elliptic(g)) => Some(ClosedForm {
                gstar: MeroFn::Elliptic(g.clone()),
                f0_log_abs: None,
            }),
            _ => None,
        };
        WeierstrassData::with_g_omega(format!("{}*", self.name), dom, gstar, omega_star, g_omega, closed_form)
    }

    /// `(|w|², (du², du dv, dv²))` with the second form `Re(w g' dz²)`.
    pub fn fundamental_forms(&self, z: C64) -> Result<(f64, [f64; 3])> {
        let [w, gp] = MeroFn::eval_all([&self.omega, self.g_prime()], z)?;
        let q = w * gp;
        Ok((w.norm_sqr(), [q.re, -2.0 * q.im, -q.re]))
    }

    /// Light-like normal `ν` in Minkowski 4-space.
    pub fn lightlike_gauss_map(&self, z: C64) -> Result<[f64; 4]> {
        let g = self.g.eval(z)?;
        let a = g.norm_sqr();
        Ok([-0.5 * a - 0.5, -g.re, g.im, -0.5 * a + 0.5])
    }

    /// Lift metric density `(2 + |g|²)|w|² = 2|w|² + |g w|²`.
    pub fn lift_metric_density(&self, z: C64) -> Result<f64> {
        let [w, gw] = MeroFn::eval_all([&self.omega, &self.g_omega], z)?;
        Ok(2.0 * w.norm_sqr() + gw.norm_sqr())
    }

    /// `(-K#) λ = 4|g'|²/(2+|g|²)²`.
    pub fn curvature_area_density(&self, z: C64) -> f64 {
        fs_density(&self.g, self.g_prime(), z)
    }

    /// Gaussian curvature `K#` of the lift metric, never positive.
    pub fn curvature_density(&self, z: C64) -> Result<f64> {
        Ok(-self.curvature_area_density(z) / self.lift_metric_density(z)?)
    }
}

/// Lorentzian product `-t t' + x x' + y y' + z z'`.
pub fn minkowski(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    -a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}

pub(crate) fn cx(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

#[derive(Clone, Debug, Serialize)]
pub struct CompatReport {
    pub ok: bool,
    pub ends_ok: bool,
    pub gomega_poles_inside: Vec<Point>,
    pub omega_poles_inside: Vec<Point>,
    pub common_zeros: Vec<Point>,
    pub removable_punctures: Vec<Point>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ResidueRow {
    pub point: Point,
    pub res_omega: [f64; 2],
    pub res_g_omega: [f64; 2],
    pub exact: bool,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CycleRow {
    pub generator: String,
    pub omega: [f64; 2],
    pub g_omega: [f64; 2],
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PeriodReport {
    pub ok: bool,
    pub residues: Vec<ResidueRow>,
    pub cycles: Option<Vec<CycleRow>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub compat_ok: bool,
    pub period_ok: bool,
    pub ends_ok: bool,
    pub compat: CompatReport,
    pub periods: PeriodReport,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.compat_ok && self.period_ok && self.ends_ok
    }
}
