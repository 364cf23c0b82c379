//! Weierstrass `℘` on the square torus `C / (Z + Zi)` and expression trees over it.

use std::f64::consts::PI;
use std::fmt;
use std::sync::OnceLock;

use crate::{Error, Result, C64};

const SHELLS: i32 = 40;
const SERIES_RADIUS: f64 = 0.35;
const SERIES_TERMS: usize = 30;
const POLE_GUARD: f64 = 1e-12;

/// Invariants and cached sums for the lattice `Z + Zi`.
#[derive(Debug)]
pub struct SquareLattice {
    pub g2: C64,
    pub g3: C64,
    /// Laurent coefficients `c_k` of `℘ = z^-2 + Σ_{k>=2} c_k z^{2k-2}`, index `k`.
    series: Vec<f64>,
    /// Orbit representatives `w^4` for `w = m + ni`, `m >= 1`, `n >= 0`.
    w4: Vec<C64>,
    t4: C64,
    t8: C64,
}

fn sigma(n: u64, p: i32) -> f64 {
    (1..=n).filter(|d| n % d == 0).map(|d| (d as f64).powi(p)).sum()
}

impl SquareLattice {
    fn build() -> SquareLattice {
        let q = (-2.0 * PI).exp();
        let (mut e4, mut e6) = (1.0, 1.0);
        for n in 1..=12u64 {
            let qn = q.powi(n as i32);
            e4 += 240.0 * sigma(n, 3) * qn;
            e6 -= 504.0 * sigma(n, 5) * qn;
        }
        let g4 = PI.powi(4) / 45.0 * e4;
        let g6 = 2.0 * PI.powi(6) / 945.0 * e6;
        let g8 = 3.0 * g4 * g4 / 7.0;
        let g2 = 60.0 * g4;
        let g3 = 140.0 * g6;

        let mut series = vec![0.0; SERIES_TERMS + 1];
        series[2] = g2 / 20.0;
        series[3] = g3 / 28.0;
        for k in 4..=SERIES_TERMS {
            let s: f64 = (2..=k - 2).map(|m| series[m] * series[k - m]).sum();
            series[k] = 3.0 / ((2 * k + 1) as f64 * (k - 3) as f64) * s;
        }

        let mut w4 = Vec::with_capacity((SHELLS * (SHELLS + 1)) as usize);
        let (mut s4, mut s8) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        for m in 1..=SHELLS {
            for n in 0..=SHELLS {
                let w = C64::new(m as f64, n as f64);
                let p = w.powi(4);
                s4 += 4.0 / p;
                s8 += 4.0 / (p * p);
                w4.push(p);
            }
        }
        SquareLattice {
            g2: C64::new(g2, 0.0),
            g3: C64::new(g3, 0.0),
            series,
            w4,
            t4: g4 - s4,
            t8: g8 - s8,
        }
    }

    /// The shared instance.
    pub fn get() -> &'static SquareLattice {
        static LATTICE: OnceLock<SquareLattice> = OnceLock::new();
        LATTICE.get_or_init(SquareLattice::build)
    }

    pub fn invariants(&self) -> (C64, C64) {
        (self.g2, self.g3)
    }

    /// `(℘(z), ℘'(z))`.
    pub fn wp_both(&self, z: C64) -> Result<(C64, C64)> {
        let z = reduce(z);
        if z.norm() < POLE_GUARD {
            return Err(Error::PoleProximity(format!("lattice point near {z}")));
        }
        if z.norm() < SERIES_RADIUS {
            return Ok(self.series_eval(z));
        }
        let z2 = z * z;
        let z4 = z2 * z2;
        let mut s = C64::new(0.0, 0.0);
        let mut sp = C64::new(0.0, 0.0);
        for &w4 in &self.w4 {
            let d = z4 - w4;
            let d2 = d * d;
            s += 4.0 * z2 * (z4 + 3.0 * w4) / d2;
            sp += (4.0 * z4 * z4 + 48.0 * z4 * w4 + 12.0 * w4 * w4) * z / (d2 * d);
        }
        let wp = 1.0 / z2 + s + 3.0 * z2 * self.t4 + 7.0 * z4 * z2 * self.t8;
        let wpp = -2.0 / (z2 * z) - 2.0 * sp + 6.0 * z * self.t4 + 42.0 * z4 * z * self.t8;
        Ok((wp, wpp))
    }

    fn series_eval(&self, z: C64) -> (C64, C64) {
        let z2 = z * z;
        let mut p = C64::new(0.0, 0.0);
        let mut dp = C64::new(0.0, 0.0);
        for k in (2..=SERIES_TERMS).rev() {
            let c = self.series[k];
            // Horner in z^2 for Σ c_k z^{2k-4} and its derivative.
            p = p * z2 + c;
            dp = dp * z2 + c * (2 * k - 2) as f64;
        }
        let wp = 1.0 / z2 + p * z2;
        let wpp = -2.0 / (z2 * z) + dp * z;
        (wp, wpp)
    }
}

/// Representative of `z` in `[-1/2, 1/2)^2`.
pub fn reduce(z: C64) -> C64 {
    C64::new(z.re - (z.re + 0.5).floor(), z.im - (z.im + 0.5).floor())
}

pub fn wp(z: C64) -> Result<C64> {
    SquareLattice::get().wp_both(z).map(|x| x.0)
}

pub fn wp_prime(z: C64) -> Result<C64> {
    SquareLattice::get().wp_both(z).map(|x| x.1)
}

pub fn invariants() -> (C64, C64) {
    SquareLattice::get().invariants()
}

/// Meromorphic expression in `z`, `℘(z)` and `℘'(z)`.
#[derive(Clone, Debug, PartialEq)]
pub enum MeroExpr {
    Z,
    Wp,
    WpPrime,
    Const(C64),
    Add(Box<MeroExpr>, Box<MeroExpr>),
    Sub(Box<MeroExpr>, Box<MeroExpr>),
    Mul(Box<MeroExpr>, Box<MeroExpr>),
    Div(Box<MeroExpr>, Box<MeroExpr>),
    Neg(Box<MeroExpr>),
    Pow(Box<MeroExpr>, i32),
}

impl MeroExpr {
    pub fn c(v: f64) -> MeroExpr {
        MeroExpr::Const(C64::new(v, 0.0))
    }

    fn as_const(&self) -> Option<C64> {
        match self {
            MeroExpr::Const(c) => Some(*c),
            _ => None,
        }
    }

    fn is_const(&self, v: f64) -> bool {
        self.as_const() == Some(C64::new(v, 0.0))
    }

    pub fn add(a: MeroExpr, b: MeroExpr) -> MeroExpr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => MeroExpr::Const(x + y),
            _ if a.is_const(0.0) => b,
            _ if b.is_const(0.0) => a,
            _ => MeroExpr::Add(Box::new(a), Box::new(b)),
        }
    }

    pub fn sub(a: MeroExpr, b: MeroExpr) -> MeroExpr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => MeroExpr::Const(x - y),
            _ if b.is_const(0.0) => a,
            _ if a.is_const(0.0) => MeroExpr::neg(b),
            _ => MeroExpr::Sub(Box::new(a), Box::new(b)),
        }
    }

    pub fn mul(a: MeroExpr, b: MeroExpr) -> MeroExpr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => MeroExpr::Const(x * y),
            _ if a.is_const(0.0) || b.is_const(0.0) => MeroExpr::c(0.0),
            _ if a.is_const(1.0) => b,
            _ if b.is_const(1.0) => a,
            _ => MeroExpr::Mul(Box::new(a), Box::new(b)),
        }
    }

    pub fn div(a: MeroExpr, b: MeroExpr) -> MeroExpr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) if y != C64::new(0.0, 0.0) => MeroExpr::Const(x / y),
            _ if a.is_const(0.0) => MeroExpr::c(0.0),
            _ if b.is_const(1.0) => a,
            _ => MeroExpr::Div(Box::new(a), Box::new(b)),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(a: MeroExpr) -> MeroExpr {
        match a {
            MeroExpr::Const(c) => MeroExpr::Const(-c),
            MeroExpr::Neg(x) => *x,
            a => MeroExpr::Neg(Box::new(a)),
        }
    }

    pub fn pow(a: MeroExpr, n: i32) -> MeroExpr {
        match (n, a.as_const()) {
            (0, _) => MeroExpr::c(1.0),
            (1, _) => a,
            (_, Some(c)) => MeroExpr::Const(c.powi(n)),
            _ => MeroExpr::Pow(Box::new(a), n),
        }
    }

    /// Formal `d/dz`, with `℘'' = 6℘² - g2/2`.
    pub fn derivative(&self) -> MeroExpr {
        use MeroExpr::*;
        match self {
            Z => MeroExpr::c(1.0),
            Wp => WpPrime,
            WpPrime => {
                let (g2, _) = invariants();
                MeroExpr::sub(
                    MeroExpr::mul(MeroExpr::c(6.0), MeroExpr::pow(Wp, 2)),
                    MeroExpr::Const(g2 / 2.0),
                )
            }
            Const(_) => MeroExpr::c(0.0),
            Add(a, b) => MeroExpr::add(a.derivative(), b.derivative()),
            Sub(a, b) => MeroExpr::sub(a.derivative(), b.derivative()),
            Mul(a, b) => MeroExpr::add(
                MeroExpr::mul(a.derivative(), (**b).clone()),
                MeroExpr::mul((**a).clone(), b.derivative()),
            ),
            Div(a, b) => MeroExpr::div(
                MeroExpr::sub(
                    MeroExpr::mul(a.derivative(), (**b).clone()),
                    MeroExpr::mul((**a).clone(), b.derivative()),
                ),
                MeroExpr::pow((**b).clone(), 2),
            ),
            Neg(a) => MeroExpr::neg(a.derivative()),
            Pow(a, n) => MeroExpr::mul(
                MeroExpr::mul(MeroExpr::c(*n as f64), MeroExpr::pow((**a).clone(), n - 1)),
                a.derivative(),
            ),
        }
    }

    pub fn uses_wp(&self) -> bool {
        use MeroExpr::*;
        match self {
            Wp | WpPrime => true,
            Z | Const(_) => false,
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) => a.uses_wp() || b.uses_wp(),
            Neg(a) | Pow(a, _) => a.uses_wp(),
        }
    }

    /// Evaluate at `z`.
    pub fn eval(&self, z: C64) -> Result<C64> {
        let w = if self.uses_wp() {
            Some(SquareLattice::get().wp_both(z)?)
        } else {
            None
        };
        let v = self.eval_with(z, w)?;
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(Error::DivisionUnderflow(format!("{z}")))
        }
    }

    /// Evaluate with `(℘(z), ℘'(z))` already known.
    pub fn eval_given(&self, z: C64, w: (C64, C64)) -> Result<C64> {
        let v = self.eval_with(z, Some(w))?;
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(Error::DivisionUnderflow(format!("{z}")))
        }
    }

    fn eval_with(&self, z: C64, w: Option<(C64, C64)>) -> Result<C64> {
        use MeroExpr::*;
        Ok(match self {
            Z => z,
            Wp => w.expect("wp computed").0,
            WpPrime => w.expect("wp computed").1,
            Const(c) => *c,
            Add(a, b) => a.eval_with(z, w)? + b.eval_with(z, w)?,
            Sub(a, b) => a.eval_with(z, w)? - b.eval_with(z, w)?,
            Mul(a, b) => a.eval_with(z, w)? * b.eval_with(z, w)?,
            Div(a, b) => {
                let d = b.eval_with(z, w)?;
                if d.norm() == 0.0 {
                    return Err(Error::DivisionUnderflow(format!("{z}")));
                }
                a.eval_with(z, w)? / d
            }
            Neg(a) => -a.eval_with(z, w)?,
            Pow(a, n) => {
                let v = a.eval_with(z, w)?;
                if *n < 0 && v.norm() == 0.0 {
                    return Err(Error::DivisionUnderflow(format!("{z}")));
                }
                v.powi(*n)
            }
        })
    }
}

impl fmt::Display for MeroExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use MeroExpr::*;
        match self {
            Z => write!(f, "z"),
            Wp => write!(f, "wp(z)"),
            WpPrime => write!(f, "wpp(z)"),
            Const(c) if c.im == 0.0 => write!(f, "{}", c.re),
            Const(c) => write!(f, "({}{:+}i)", c.re, c.im),
            Add(a, b) => write!(f, "({a} + {b})"),
            Sub(a, b) => write!(f, "({a} - {b})"),
            Mul(a, b) => write!(f, "{a}*{b}"),
            Div(a, b) => write!(f, "{a}/({b})"),
            Neg(a) => write!(f, "-({a})"),
            Pow(a, n) => write!(f, "({a})^{n}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct_sum(z: C64, n: i32) -> (C64, C64) {
        let mut p = 1.0 / (z * z);
        let mut dp = -2.0 / (z * z * z);
        for a in -n..=n {
            for b in -n..=n {
                if a == 0 && b == 0 {
                    continue;
                }
                let w = C64::new(a as f64, b as f64);
                p += 1.0 / ((z - w) * (z - w)) - 1.0 / (w * w);
                dp += -2.0 / ((z - w) * (z - w) * (z - w));
            }
        }
        (p, dp)
    }

    #[test]
    fn invariants_are_lemniscatic() {
        let (g2, g3) = invariants();
        assert!(g3.norm() < 1e-10);
        assert!(g2.re > 0.0 && g2.im == 0.0);
        // 4 e1^3 - g2 e1 = 0 at the half period 1/2
        let e1 = wp(C64::new(0.5, 0.0)).unwrap();
        assert!((4.0 * e1 * e1 * e1 - g2 * e1).norm() < 1e-8 * e1.norm().powi(3));
    }

    #[test]
    fn principal_part() {
        let z = C64::new(1e-3, 0.0);
        assert!((z * z * wp(z).unwrap() - 1.0).norm() < 1e-5);
        assert!(matches!(wp(C64::new(1.0, 1.0)), Err(Error::PoleProximity(_))));
    }

    #[test]
    fn matches_theta_function_values() {
        // Frozen from the Jacobi theta representation at 30 digits, nome e^{-pi}.
        let cases = [
            (C64::new(0.5, 0.0), C64::new(6.875185818020372827, 0.0)),
            (C64::new(0.25, 0.0), C64::new(16.598166845699945861, 0.0)),
            (C64::new(0.3, 0.2), C64::new(3.372103673735819474, -5.991418600455642762)),
            (C64::new(0.1, 0.05), C64::new(48.070847808452914623, -63.905443172211423872)),
            (C64::new(0.45, -0.3), C64::new(1.768803554260783254, 0.911485131167192505)),
        ];
        for (z, want) in cases {
            let got = wp(z).unwrap();
            assert!((got - want).norm() < 1e-10 * want.norm(), "{z}: {got} vs {want}");
        }
        let d = wp_prime(C64::new(0.3, 0.2)).unwrap();
        let want = C64::new(12.822790453615712877, 45.838888178322270321);
        assert!((d - want).norm() < 1e-8 * want.norm());
        // g2 = Gamma(1/4)^8 / (16 pi^2)
        assert!((invariants().0.re - 189.072720129233852293).abs() < 1e-10 * 189.0);
    }

    #[test]
    fn center_of_cell_is_a_zero() {
        assert!(wp(C64::new(0.5, 0.5)).unwrap().norm() < 1e-9);
    }

    #[test]
    fn closed_orbit_sums_match_direct_summation() {
        // Direct summation over a large square converges slowly in the tail; the
        // comparison uses the tail-corrected reference only to 1e-6.
        for z in [C64::new(0.4, 0.1), C64::new(-0.2, 0.45), C64::new(0.37, -0.37)] {
            let (p, dp) = SquareLattice::get().wp_both(z).unwrap();
            let (q, dq) = direct_sum(z, 300);
            assert!((p - q).norm() < 1e-4, "{p} vs {q}");
            assert!((dp - dq).norm() < 1e-4, "{dp} vs {dq}");
        }
    }

    #[test]
    fn series_and_sum_agree_at_crossover() {
        let lat = SquareLattice::get();
        for k in 0..16 {
            let z = C64::from_polar(SERIES_RADIUS, 0.1 + k as f64 * 0.39);
            let (a, da) = lat.series_eval(z);
            let z2 = C64::from_polar(SERIES_RADIUS + 1e-12, 0.1 + k as f64 * 0.39);
            let (b, db) = lat.wp_both(z2).unwrap();
            assert!((a - b).norm() < 1e-9 * a.norm(), "{a} {b}");
            assert!((da - db).norm() < 1e-8 * da.norm(), "{da} {db}");
        }
    }

    #[test]
    fn expression_derivative_matches_finite_differences() {
        let e = MeroExpr::div(MeroExpr::WpPrime, MeroExpr::Wp);
        let de = e.derivative();
        let z = C64::new(0.25, 0.25);
        let h = 1e-5;
        let fd = (e.eval(z + h).unwrap() - e.eval(z - h).unwrap()) / (2.0 * h);
        assert!((fd - de.eval(z).unwrap()).norm() < 1e-6 * fd.norm().max(1.0));
        assert_eq!(MeroExpr::c(3.0).eval(z).unwrap(), C64::new(3.0, 0.0));
    }
}
