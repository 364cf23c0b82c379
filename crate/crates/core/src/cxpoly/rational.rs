use std::fmt;

use super::roots::{horner, root_points};
use super::{CPoly, GaussRat};
use crate::{Error, Point, Result, C64};

/// Reduced quotient `num/den` with `den` monic and `gcd(num, den) = 1`.
#[derive(Clone, Debug)]
pub struct RationalFn {
    num: CPoly,
    den: CPoly,
    num_f: Vec<C64>,
    den_f: Vec<C64>,
}

impl PartialEq for RationalFn {
    fn eq(&self, o: &Self) -> bool {
        self.num == o.num && self.den == o.den
    }
}

/// One term `coeff · log(z - pole)` of an antiderivative.
#[derive(Clone, Debug)]
pub struct LogTerm {
    pub pole: Point,
    /// Exact coefficient when the pole is Gaussian rational.
    pub coeff: Option<GaussRat>,
    pub coeff_value: C64,
}

/// `∫ r dz = rational + Σ coeff·log(z - pole)`.
#[derive(Clone, Debug)]
pub struct Antiderivative {
    pub rational: RationalFn,
    pub logs: Vec<LogTerm>,
}

impl RationalFn {
    pub fn reduce(num: CPoly, den: CPoly) -> Result<RationalFn> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if num.is_zero() {
            return Ok(RationalFn::from_poly(CPoly::zero()));
        }
        let g = num.gcd(&den);
        let (mut n, mut d) = (num.exact_div(&g), den.exact_div(&g));
        let l = d.lead().inv().expect("nonzero lead");
        n = n.scale(&l);
        d = d.scale(&l);
        Ok(RationalFn::raw(n, d))
    }

    fn raw(num: CPoly, den: CPoly) -> RationalFn {
        let num_f = num.to_c64();
        let den_f = den.to_c64();
        RationalFn { num, den, num_f, den_f }
    }

    pub fn from_poly(p: CPoly) -> RationalFn {
        RationalFn::raw(p, CPoly::one())
    }

    pub fn constant(c: GaussRat) -> RationalFn {
        RationalFn::from_poly(CPoly::constant(c))
    }

    pub fn zero() -> RationalFn {
        RationalFn::from_poly(CPoly::zero())
    }

    pub fn one() -> RationalFn {
        RationalFn::constant(GaussRat::one())
    }

    pub fn z() -> RationalFn {
        RationalFn::from_poly(CPoly::z())
    }

    pub fn num(&self) -> &CPoly {
        &self.num
    }

    pub fn den(&self) -> &CPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    pub fn add(&self, o: &RationalFn) -> RationalFn {
        let n = self.num.mul(&o.den).add(&o.num.mul(&self.den));
        RationalFn::reduce(n, self.den.mul(&o.den)).expect("nonzero denominator")
    }

    pub fn sub(&self, o: &RationalFn) -> RationalFn {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> RationalFn {
        RationalFn::raw(self.num.neg(), self.den.clone())
    }

    pub fn mul(&self, o: &RationalFn) -> RationalFn {
        RationalFn::reduce(self.num.mul(&o.num), self.den.mul(&o.den)).expect("nonzero denominator")
    }

    pub fn div(&self, o: &RationalFn) -> Result<RationalFn> {
        if o.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        RationalFn::reduce(self.num.mul(&o.den), self.den.mul(&o.num))
    }

    pub fn recip(&self) -> Result<RationalFn> {
        RationalFn::one().div(self)
    }

    pub fn powi(&self, k: i32) -> Result<RationalFn> {
        let base = if k < 0 { self.recip()? } else { self.clone() };
        let e = k.unsigned_abs();
        Ok(RationalFn::raw(base.num.pow(e), base.den.pow(e)))
    }

    pub fn scale(&self, c: &GaussRat) -> RationalFn {
        RationalFn::reduce(self.num.scale(c), self.den.clone()).expect("nonzero denominator")
    }

    pub fn derivative(&self) -> RationalFn {
        let n = self
            .num
            .derivative()
            .mul(&self.den)
            .sub(&self.num.mul(&self.den.derivative()));
        RationalFn::reduce(n, self.den.mul(&self.den)).expect("nonzero denominator")
    }

    /// `r(1/w)` as a rational function of `w`.
    pub fn recip_chart(&self) -> RationalFn {
        let n = self.num.deg_or_zero().max(self.den.deg_or_zero());
        RationalFn::reduce(self.num.reversed(n), self.den.reversed(n)).expect("nonzero denominator")
    }

    /// `r(z + a)`.
    pub fn shifted(&self, a: &GaussRat) -> RationalFn {
        RationalFn::raw(self.num.shift(a), self.den.shift(a))
    }

    pub fn eval(&self, z: &GaussRat) -> Option<GaussRat> {
        let d = self.den.eval(z);
        d.inv().map(|di| &self.num.eval(z) * &di)
    }

    /// Float evaluation; infinite or NaN at poles.
    pub fn eval_c64(&self, z: C64) -> C64 {
        if self.den_f.len() == 1 {
            return horner(&self.num_f, z).0 / self.den_f[0];
        }
        horner(&self.num_f, z).0 / horner(&self.den_f, z).0
    }

    /// Value or limit at `p`; `None` at a pole.
    pub fn value_at(&self, p: &Point) -> Option<Point> {
        match p {
            Point::Infinity => {
                let (dn, dd) = (self.num.deg_or_zero(), self.den.deg_or_zero());
                if self.num.is_zero() || dn < dd {
                    Some(Point::Exact(GaussRat::zero()))
                } else if dn == dd {
                    Some(Point::Exact(&self.num.lead() / &self.den.lead()))
                } else {
                    None
                }
            }
            Point::Exact(g) => self.eval(g).map(Point::Exact),
            Point::Approx(z) => {
                let v = self.eval_c64(*z);
                (v.re.is_finite() && v.im.is_finite() && v.norm() < 1e12).then_some(Point::Approx(v))
            }
        }
    }

    /// Order of vanishing at `p` (negative at poles), `r` viewed as a function.
    pub fn order_at(&self, p: &Point) -> Result<i32> {
        if self.is_zero() {
            return Err(Error::ZeroFunction);
        }
        Ok(match p {
            Point::Infinity => self.den.deg_or_zero() as i32 - self.num.deg_or_zero() as i32,
            Point::Exact(a) => {
                self.num.shift(a).trailing_zeros() as i32 - self.den.shift(a).trailing_zeros() as i32
            }
            Point::Approx(z) => mult_near(&self.num, *z)? as i32 - mult_near(&self.den, *z)? as i32,
        })
    }

    /// Exact Laurent expansion at a finite exact point or at `∞` (in `w = 1/z`,
    /// as a function). Returns the leading order and `terms` coefficients.
    pub fn laurent(&self, p: &Point, terms: usize) -> Result<(i32, Vec<GaussRat>)> {
        if self.is_zero() {
            return Err(Error::ZeroFunction);
        }
        let (n, d) = match p {
            Point::Infinity => {
                let r = self.recip_chart();
                (r.num, r.den)
            }
            Point::Exact(a) => (self.num.shift(a), self.den.shift(a)),
            Point::Approx(_) => {
                return Err(Error::UnsupportedType("exact Laurent expansion at an inexact point".into()))
            }
        };
        let (tn, td) = (n.trailing_zeros(), d.trailing_zeros());
        let nc = &n.coeffs()[tn..];
        let dc = &d.coeffs()[td..];
        Ok((tn as i32 - td as i32, series_div(nc, dc, terms)))
    }

    /// Exact coefficient of `(z-p)^{-1}`.
    pub fn residue_at(&self, p: &GaussRat) -> GaussRat {
        let pt = Point::Exact(p.clone());
        match self.order_at(&pt) {
            Ok(lead) if lead < 0 => {
                let (_, c) = self.laurent(&pt, (-lead) as usize).expect("exact point");
                c[(-1 - lead) as usize].clone()
            }
            _ => GaussRat::zero(),
        }
    }

    /// Residue of the form `r dz` at `∞`.
    pub fn residue_at_infinity(&self) -> GaussRat {
        // r = Σ c_k w^k with w = 1/z, so r dz = -Σ c_k w^{k-2} dw.
        match self.order_at(&Point::Infinity) {
            Ok(lead) if lead <= 1 => {
                let idx = (1 - lead) as usize;
                let (_, c) = self.laurent(&Point::Infinity, idx + 1).expect("infinity chart");
                -&c[idx]
            }
            _ => GaussRat::zero(),
        }
    }

    /// Number of preimages of a generic value, counted on the sphere.
    pub fn map_degree(&self) -> usize {
        if self.is_zero() {
            return 0;
        }
        self.num.deg_or_zero().max(self.den.deg_or_zero())
    }

    /// Finite poles with multiplicities.
    pub fn poles(&self) -> Result<Vec<(Point, usize)>> {
        if self.den.is_constant() {
            return Ok(Vec::new());
        }
        Ok(root_points(&self.den, 1e-10)?.into_iter().map(|r| (r.point, r.multiplicity)).collect())
    }

    /// Finite zeros with multiplicities.
    pub fn zeros(&self) -> Result<Vec<(Point, usize)>> {
        if self.num.is_constant() {
            return Ok(Vec::new());
        }
        Ok(root_points(&self.num, 1e-10)?.into_iter().map(|r| (r.point, r.multiplicity)).collect())
    }

    /// Antiderivative by Hermite reduction; the rational part has zero
    /// polynomial constant term.
    pub fn antiderivative(&self) -> Result<Antiderivative> {
        let (q, rem) = self.num.div_rem(&self.den);
        let mut rational = RationalFn::from_poly(q.integral());
        if rem.is_zero() {
            return Ok(Antiderivative { rational, logs: Vec::new() });
        }
        let (g, a, ds) = hermite(rem, self.den.clone());
        rational = rational.add(&g);
        let (q2, a) = a.div_rem(&ds);
        rational = rational.add(&RationalFn::from_poly(q2.integral()));
        let mut logs = Vec::new();
        if !a.is_zero() {
            let dsp = ds.derivative();
            for root in root_points(&ds, 1e-10)? {
                let (coeff, coeff_value) = match &root.point {
                    Point::Exact(b) => {
                        let c = &a.eval(b) / &dsp.eval(b);
                        let v = c.to_c64();
                        (Some(c), v)
                    }
                    _ => {
                        let z = root.value;
                        (None, horner(&a.to_c64(), z).0 / horner(&dsp.to_c64(), z).0)
                    }
                };
                if coeff.as_ref().is_some_and(GaussRat::is_zero) {
                    continue;
                }
                logs.push(LogTerm { pole: root.point, coeff, coeff_value });
            }
        }
        Ok(Antiderivative { rational, logs })
    }
}

/// Multiplicity of a root of `p` near `z`.
fn mult_near(p: &CPoly, z: C64) -> Result<usize> {
    if p.is_constant() {
        return Ok(0);
    }
    let tol = 1e-8 * z.norm().max(1.0);
    Ok(root_points(p, 1e-10)?
        .iter()
        .filter(|r| (r.value - z).norm() <= tol)
        .map(|r| r.multiplicity)
        .sum())
}

/// Power series quotient `n/d` to `terms` coefficients; `d[0] != 0`.
fn series_div(n: &[GaussRat], d: &[GaussRat], terms: usize) -> Vec<GaussRat> {
    let d0 = d[0].inv().expect("series denominator has nonzero constant term");
    let mut out: Vec<GaussRat> = Vec::with_capacity(terms);
    for k in 0..terms {
        let mut s = n.get(k).cloned().unwrap_or_else(GaussRat::zero);
        for j in 1..=k.min(d.len().saturating_sub(1)) {
            s = &s - &(&d[j] * &out[k - j]);
        }
        out.push(&s * &d0);
    }
    out
}

/// Hermite reduction of the proper fraction `a/d`: returns `(g, h, d*)` with
/// `a/d = g' + h/d*` and `d*` square-free.
fn hermite(mut a: CPoly, d: CPoly) -> (RationalFn, CPoly, CPoly) {
    let mut g = RationalFn::zero();
    let mut dm = d.gcd(&d.derivative());
    let ds = d.exact_div(&dm);
    while !dm.is_constant() {
        let dm2 = dm.gcd(&dm.derivative());
        let dms = dm.exact_div(&dm2);
        let x = ds.mul(&dm.derivative()).exact_div(&dm).neg();
        let (s, t, _) = x.ext_gcd(&dms);
        let (q, b) = s.mul(&a).div_rem(&dms);
        let c = t.mul(&a).add(&q.mul(&x));
        a = c.sub(&b.derivative().mul(&ds.exact_div(&dms)));
        g = g.add(&RationalFn::reduce(b, dm.clone()).expect("nonzero"));
        dm = dm2;
    }
    (g, a, ds)
}

impl fmt::Display for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_constant() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> CPoly {
        CPoly::from_ints(c)
    }

    fn r(n: &[i64], d: &[i64]) -> RationalFn {
        RationalFn::reduce(p(n), p(d)).unwrap()
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(r(&[-1, 0, 1], &[-1, 1]), RationalFn::from_poly(p(&[1, 1])));
        // (z^3 - z) / (z^2 (z - 1)) = (z + 1)/z
        let x = r(&[0, -1, 0, 1], &[0, 0, -1, 1]);
        assert_eq!(x.num(), &p(&[1, 1]));
        assert_eq!(x.den(), &p(&[0, 1]));
        assert!(RationalFn::reduce(p(&[1]), CPoly::zero()).is_err());
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(r(&[1], &[0, 1]).derivative(), r(&[-1], &[0, 0, 1]));
        // z/(z^2-1) -> -(z^2+1)/(z^2-1)^2
        let want = r(&[-1, 0, -1], &[1, 0, -2, 0, 1]);
        assert_eq!(r(&[0, 1], &[-1, 0, 1]).derivative(), want);
        assert!(RationalFn::constant(GaussRat::from_int(3)).derivative().is_zero());
    }

    #[test]
    fn orders() {
        let x = r(&[-1, 0, 1], &[0, 0, 1]);
        assert_eq!(x.order_at(&Point::exact(0, 0)).unwrap(), -2);
        assert_eq!(x.order_at(&Point::exact(1, 0)).unwrap(), 1);
        assert_eq!(x.order_at(&Point::Infinity).unwrap(), 0);
        assert_eq!(x.order_at(&Point::Approx(C64::new(-1.0, 1e-12))).unwrap(), 1);
        assert_eq!(RationalFn::one().order_at(&Point::exact(0, 0)).unwrap(), 0);
        assert_eq!(RationalFn::zero().order_at(&Point::Infinity), Err(Error::ZeroFunction));
    }

    #[test]
    fn residues() {
        assert_eq!(r(&[1], &[0, 1]).residue_at(&GaussRat::zero()), GaussRat::one());
        assert!(r(&[-1, 0, 1], &[0, 0, 1]).residue_at(&GaussRat::zero()).is_zero());
        assert_eq!(r(&[1], &[-1, 1]).residue_at(&GaussRat::one()), GaussRat::one());
        assert_eq!(r(&[1], &[0, 1]).residue_at_infinity(), GaussRat::from_int(-1));
        // z^3/(z^2 - 1): finite residues 1/2 + 1/2, residue at infinity -1
        let x = r(&[0, 0, 0, 1], &[-1, 0, 1]);
        let total = &x.residue_at(&GaussRat::one()) + &x.residue_at(&GaussRat::from_int(-1));
        assert_eq!(total, -&x.residue_at_infinity());
    }

    #[test]
    fn antiderivatives() {
        // 1 - z^{-2} -> z + 1/z
        let a = r(&[-1, 0, 1], &[0, 0, 1]).antiderivative().unwrap();
        assert_eq!(a.rational, r(&[1, 0, 1], &[0, 1]));
        assert!(a.logs.is_empty());
        let a = r(&[1], &[0, 1]).antiderivative().unwrap();
        assert!(a.rational.is_zero());
        assert_eq!(a.logs.len(), 1);
        assert_eq!(a.logs[0].pole, Point::exact(0, 0));
        assert_eq!(a.logs[0].coeff, Some(GaussRat::one()));
        let a = r(&[1], &[-1, 1]).antiderivative().unwrap();
        assert_eq!(a.logs[0].pole, Point::exact(1, 0));
        assert_eq!(a.logs[0].coeff, Some(GaussRat::one()));
    }

    #[test]
    fn antiderivative_with_repeated_and_irrational_poles() {
        // 1/(z^2 (z^2 - 2)): the log poles at ±sqrt 2 are inexact
        let x = r(&[1], &[0, 0, -2, 0, 1]);
        let a = x.antiderivative().unwrap();
        let z = C64::new(0.3, 0.7);
        let h = 1e-5;
        let f = |z: C64| {
            a.rational.eval_c64(z)
                + a.logs
                    .iter()
                    .map(|t| t.coeff_value * (z - t.pole.finite().unwrap()).ln())
                    .sum::<C64>()
        };
        let fd = (f(z + h) - f(z - h)) / (2.0 * h);
        assert!((fd - x.eval_c64(z)).norm() < 1e-8);
    }

    #[test]
    fn degrees() {
        assert_eq!(r(&[1], &[0, 1]).map_degree(), 1);
        assert_eq!(r(&[0, 1], &[-1, 0, 1]).map_degree(), 2);
        let g = RationalFn::reduce(p(&[0, 0, 1]), p(&[-1, 0, 1]).mul(&p(&[-1, 1]))).unwrap();
        assert_eq!(g.map_degree(), 3);
    }

    #[test]
    fn laurent_at_infinity() {
        // z/(z^2-1) = w/(1 - w^2) = w + w^3 + ...
        let (lead, c) = r(&[0, 1], &[-1, 0, 1]).laurent(&Point::Infinity, 3).unwrap();
        assert_eq!(lead, 1);
        assert_eq!(c, vec![GaussRat::one(), GaussRat::zero(), GaussRat::one()]);
    }
}
