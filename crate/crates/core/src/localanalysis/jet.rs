use std::f64::consts::PI;

use rustfft::FftPlanner;

use super::{DomainSpec, Kind, MeroFn};
use crate::cxpoly::RationalFn;
use crate::{Error, Point, Result, C64};

const M0: usize = 256;
const M_MAX: usize = 8192;
const AGREE: f64 = 1e-10;
const DETECT: f64 = 1e-8;
const SEPARATION: f64 = 1e3;
const MIN_SPACING: f64 = 1e-8;

/// Truncated Laurent expansion `Σ c_n t^n`, `n = lead_order, lead_order + 1, ...`,
/// in the local coordinate `t = z - p` (or `t = 1/z` at `∞`).
#[derive(Clone, Debug)]
pub struct LaurentJet {
    pub center: Point,
    pub lead_order: i32,
    pub coeffs: Vec<C64>,
    /// Contour radius used, `0` for exact jets.
    pub radius: f64,
}

impl LaurentJet {
    pub fn coeff(&self, n: i32) -> C64 {
        let k = n - self.lead_order;
        if k < 0 {
            return C64::new(0.0, 0.0);
        }
        self.coeffs.get(k as usize).copied().unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn residue(&self) -> C64 {
        self.coeff(-1)
    }

    /// Evaluate the truncated series at local coordinate `t`.
    pub fn eval(&self, t: C64) -> C64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * t.powi(self.lead_order + k as i32))
            .sum()
    }
}

/// Local analysis with a known set of special points bounding contour radii.
#[derive(Clone, Debug)]
pub struct LocalAnalyzer {
    dom: DomainSpec,
    special: Vec<C64>,
}

impl LocalAnalyzer {
    pub fn new(dom: &DomainSpec, extra: &[C64]) -> LocalAnalyzer {
        let mut special = dom.finite_punctures();
        special.extend_from_slice(extra);
        LocalAnalyzer { dom: dom.clone(), special }
    }

    /// Analyzer aware of the zeros and poles of a rational `f`.
    pub fn for_fn(dom: &DomainSpec, f: &MeroFn) -> LocalAnalyzer {
        let mut extra = Vec::new();
        if let MeroFn::Rational(r) = f {
            for set in [r.poles(), r.zeros()].into_iter().flatten() {
                extra.extend(set.iter().filter_map(|(p, _)| p.finite()));
            }
        }
        LocalAnalyzer::new(dom, &extra)
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.dom
    }

    /// `min(0.45 · distance to nearest other special point, 0.5)` in the local chart.
    pub fn radius_at(&self, p: &Point) -> Result<f64> {
        let d = match p {
            Point::Infinity => self
                .special
                .iter()
                .filter(|s| s.norm() > 0.0)
                .map(|s| 1.0 / s.norm())
                .fold(f64::INFINITY, f64::min),
            _ => {
                let c = p.finite().expect("finite");
                self.special
                    .iter()
                    .map(|&s| self.dom.distance(s, c))
                    .filter(|&d| d > 1e-12)
                    .fold(f64::INFINITY, f64::min)
            }
        };
        if d < MIN_SPACING {
            return Err(Error::RadiusTooSmall(p.to_string()));
        }
        Ok((0.45 * d).min(0.5))
    }

    /// Exact jet for rational carriers at exact points and `∞`, numeric otherwise.
    pub fn jet(&self, f: &MeroFn, p: &Point, depth: usize, kind: Kind) -> Result<LaurentJet> {
        if let (MeroFn::Rational(r), Point::Exact(_) | Point::Infinity) = (f, p) {
            return exact_jet(r, p, depth, kind);
        }
        self.numeric_jet(f, p, depth, kind)
    }

    /// Jet from trapezoidal Cauchy integrals on a circle.
    pub fn numeric_jet(&self, f: &MeroFn, p: &Point, depth: usize, kind: Kind) -> Result<LaurentJet> {
        let rho = self.radius_at(p)?;
        let sample = |t: C64| -> Result<C64> {
            match p {
                Point::Infinity => {
                    let v = f.eval(1.0 / t)?;
                    Ok(match kind {
                        Kind::Function => v,
                        Kind::Form => -v / (t * t),
                    })
                }
                _ => f.eval(p.finite().expect("finite") + t),
            }
        };
        let mut m = M0;
        let mut prev = scaled_coeffs(&sample, rho, m)?;
        let scaled = loop {
            m *= 2;
            let next = scaled_coeffs(&sample, rho, m)?;
            let smax = next.iter().map(|c| c.norm()).fold(0.0, f64::max);
            let half = (prev.len() / 2) as i64;
            let diff = (-half + 1..half)
                .map(|n| (at(&prev, n) - at(&next, n)).norm())
                .fold(0.0, f64::max);
            if diff <= AGREE * smax.max(f64::MIN_POSITIVE) {
                break next;
            }
            if m >= M_MAX {
                return Err(Error::NonConvergence(format!("Laurent jet at {p}")));
            }
            prev = next;
        };
        let half = (scaled.len() / 2) as i64;
        let smax = scaled.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if smax == 0.0 || !smax.is_finite() {
            return Err(Error::ZeroFunction);
        }
        let lead = (-half + 1..half)
            .find(|&n| at(&scaled, n).norm() > DETECT * smax)
            .expect("maximum exceeds threshold");
        let noise = (-half + 1..lead).map(|n| at(&scaled, n).norm()).fold(0.0, f64::max);
        if at(&scaled, lead).norm() < SEPARATION * noise {
            return Err(Error::JetAmbiguous(p.to_string()));
        }
        let coeffs = (lead..lead + depth as i64)
            .map(|n| if n < half { at(&scaled, n) / rho.powi(n as i32) } else { C64::new(0.0, 0.0) })
            .collect();
        Ok(LaurentJet { center: p.clone(), lead_order: lead as i32, coeffs, radius: rho })
    }

    /// Order at `p`; exact for rational carriers.
    pub fn order(&self, f: &MeroFn, p: &Point, kind: Kind) -> Result<i32> {
        if let MeroFn::Rational(r) = f {
            let o = r.order_at(p)?;
            return Ok(if p.is_infinity() && kind == Kind::Form { o - 2 } else { o });
        }
        Ok(self.numeric_jet(f, p, 1, kind)?.lead_order)
    }

    /// Residue of the form `f dz` at `p`, by contour integral.
    pub fn residue_numeric(&self, f: &MeroFn, p: &Point) -> Result<C64> {
        let jet = self.numeric_jet(f, p, 1, Kind::Form)?;
        Ok(if jet.lead_order > -1 {
            C64::new(0.0, 0.0)
        } else {
            let depth = (-jet.lead_order) as usize;
            self.numeric_jet(f, p, depth, Kind::Form)?.residue()
        })
    }
}

fn at(s: &[C64], n: i64) -> C64 {
    s[n.rem_euclid(s.len() as i64) as usize]
}

/// `s_n = c_n ρ^n` for `n` taken modulo `m`.
fn scaled_coeffs<F: Fn(C64) -> Result<C64>>(f: &F, rho: f64, m: usize) -> Result<Vec<C64>> {
    let mut buf = (0..m)
        .map(|j| f(C64::from_polar(rho, 2.0 * PI * j as f64 / m as f64)))
        .collect::<Result<Vec<_>>>()?;
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    let inv = 1.0 / m as f64;
    Ok(buf.into_iter().map(|c| c * inv).collect())
}

fn exact_jet(r: &RationalFn, p: &Point, depth: usize, kind: Kind) -> Result<LaurentJet> {
    let (mut lead, c) = r.laurent(p, depth)?;
    let mut coeffs: Vec<C64> = c.iter().map(|g| g.to_c64()).collect();
    if p.is_infinity() && kind == Kind::Form {
        lead -= 2;
        coeffs.iter_mut().for_each(|c| *c = -*c);
    }
    Ok(LaurentJet { center: p.clone(), lead_order: lead, coeffs, radius: 0.0 })
}

/// Laurent jet of a function at `p`.
pub fn laurent_jet(f: &MeroFn, p: &Point, depth: usize, dom: &DomainSpec) -> Result<LaurentJet> {
    LocalAnalyzer::for_fn(dom, f).jet(f, p, depth, Kind::Function)
}

/// Order of the 1-form `f dz` at `p`.
pub fn order_of_form_at(omega: &MeroFn, p: &Point, dom: &DomainSpec) -> Result<i32> {
    LocalAnalyzer::for_fn(dom, omega).order(omega, p, Kind::Form)
}

/// Order of the function `f` at `p`.
pub fn order_of_function_at(f: &MeroFn, p: &Point, dom: &DomainSpec) -> Result<i32> {
    LocalAnalyzer::for_fn(dom, f).order(f, p, Kind::Function)
}

/// Residue of `f dz` at `p` by contour integral, whatever the carrier.
pub fn residue_numeric(f: &MeroFn, p: &Point, dom: &DomainSpec) -> Result<C64> {
    LocalAnalyzer::for_fn(dom, f).residue_numeric(f, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cxpoly::CPoly;
    use crate::elliptic::MeroExpr;

    fn rat(n: &[i64], d: &[i64]) -> MeroFn {
        MeroFn::Rational(RationalFn::reduce(CPoly::from_ints(n), CPoly::from_ints(d)).unwrap())
    }

    fn sphere(ps: Vec<Point>) -> DomainSpec {
        DomainSpec::sphere(ps)
    }

    #[test]
    fn form_orders() {
        let dom = sphere(vec![Point::Infinity]);
        assert_eq!(order_of_form_at(&rat(&[1], &[1]), &Point::Infinity, &dom).unwrap(), -2);
        let w = rat(&[-1, 0, 1], &[0, 0, 1]);
        assert_eq!(order_of_form_at(&w, &Point::exact(1, 0), &dom).unwrap(), 1);
        let z3 = rat(&[0, 0, 0, 1], &[1]);
        assert_eq!(order_of_form_at(&z3, &Point::exact(0, 0), &dom).unwrap(), 3);
    }

    #[test]
    fn numeric_jets_match_exact_ones() {
        let dom = sphere(vec![Point::exact(0, 0), Point::Infinity]);
        let f = rat(&[1], &[0, 1]);
        let an = LocalAnalyzer::for_fn(&dom, &f);
        let j = an.numeric_jet(&f, &Point::exact(0, 0), 3, Kind::Function).unwrap();
        assert_eq!(j.lead_order, -1);
        assert!((j.coeffs[0] - 1.0).norm() < 1e-12);
        assert!(j.coeffs[1].norm() < 1e-12 && j.coeffs[2].norm() < 1e-12);
        // dz at infinity is -w^{-2} dw
        let one = rat(&[1], &[1]);
        let j = an.numeric_jet(&one, &Point::Infinity, 2, Kind::Form).unwrap();
        assert_eq!(j.lead_order, -2);
        assert!((j.coeffs[0] + 1.0).norm() < 1e-12);
    }

    #[test]
    fn residues_agree() {
        let dom = sphere(vec![Point::exact(0, 0), Point::exact(1, 0), Point::Infinity]);
        let w = rat(&[1, 0, 1], &[0, 0, 1]);
        assert!(residue_numeric(&w, &Point::exact(0, 0), &dom).unwrap().norm() < 1e-12);
        let gw = rat(&[1], &[-1, 1]);
        assert!((residue_numeric(&gw, &Point::exact(1, 0), &dom).unwrap() - 1.0).norm() < 1e-9);
        assert!(residue_numeric(&gw, &Point::exact(0, 1), &dom).unwrap().norm() < 1e-12);
    }

    #[test]
    fn elliptic_log_derivative_jet() {
        let dom = DomainSpec::torus(vec![Point::exact(0, 0)]);
        let f = MeroFn::Elliptic(MeroExpr::div(MeroExpr::WpPrime, MeroExpr::Wp));
        let j = laurent_jet(&f, &Point::exact(0, 0), 4, &dom).unwrap();
        assert_eq!(j.lead_order, -1);
        assert!((j.coeffs[0] + 2.0).norm() < 1e-6);
    }

    #[test]
    fn jet_reproduces_function() {
        let dom = sphere(vec![Point::exact(0, 0), Point::Infinity]);
        let f = rat(&[0, 1], &[-1, 0, 1]);
        let an = LocalAnalyzer::for_fn(&dom, &f);
        let j = an.numeric_jet(&f, &Point::exact(0, 0), 40, Kind::Function).unwrap();
        let t = C64::from_polar(0.2, 0.7);
        assert!((j.eval(t) - f.eval(t).unwrap()).norm() < 1e-6 * f.eval(t).unwrap().norm());
    }
}
