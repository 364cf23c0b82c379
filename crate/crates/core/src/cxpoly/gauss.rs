use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::C64;

/// Exact complex number `re + i·im` with rational parts.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct GaussRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussRat { re, im }
    }

    pub fn zero() -> Self {
        GaussRat::new(BigRational::zero(), BigRational::zero())
    }

    pub fn one() -> Self {
        GaussRat::from_int(1)
    }

    pub fn i() -> Self {
        GaussRat::new(BigRational::zero(), BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        GaussRat::new(BigRational::from_integer(n.into()), BigRational::zero())
    }

    /// `(a/b) + i (c/d)`.
    pub fn from_ratios(a: i64, b: i64, c: i64, d: i64) -> Self {
        GaussRat::new(
            BigRational::new(a.into(), b.into()),
            BigRational::new(c.into(), d.into()),
        )
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        GaussRat::from_ratios(re, 1, im, 1)
    }

    pub fn real(re: BigRational) -> Self {
        GaussRat::new(re, BigRational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussRat::new(self.re.clone(), -self.im.clone())
    }

    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(GaussRat::new(&self.re / &n, -(&self.im / &n)))
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = GaussRat::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn to_c64(&self) -> C64 {
        C64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }

    /// Best Gaussian-rational approximation with denominators at most `max_den`,
    /// componentwise by continued fractions.
    pub fn approximate(z: C64, max_den: i64) -> Option<Self> {
        Some(GaussRat::new(
            best_rational(z.re, max_den)?,
            best_rational(z.im, max_den)?,
        ))
    }
}

pub(crate) fn rat_to_f64(r: &BigRational) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    let n = r.numer().to_f64().unwrap_or(f64::NAN);
    let d = r.denom().to_f64().unwrap_or(f64::NAN);
    n / d
}

/// Continued-fraction convergent of `x` with denominator `<= max_den`.
pub(crate) fn best_rational(x: f64, max_den: i64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e15 {
            break;
        }
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 > max_den as i128 {
            break;
        }
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        let frac = r - a;
        if frac.abs() < 1e-12 {
            break;
        }
        r = 1.0 / frac;
    }
    if k1 == 0 {
        return None;
    }
    Some(BigRational::new(BigInt::from(h1), BigInt::from(k1)))
}

fn fmt_rat(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", fmt_rat(&self.re)),
            (true, false) => write!(f, "{}i", fmt_rat(&self.im)),
            (false, false) => {
                let sign = if self.im.is_negative() { '-' } else { '+' };
                write!(f, "{}{}{}i", fmt_rat(&self.re), sign, fmt_rat(&self.im.abs()))
            }
        }
    }
}

impl<'a> Add<&'a GaussRat> for &'a GaussRat {
    type Output = GaussRat;
    fn add(self, o: &GaussRat) -> GaussRat {
        GaussRat::new(&self.re + &o.re, &self.im + &o.im)
    }
}

impl<'a> Sub<&'a GaussRat> for &'a GaussRat {
    type Output = GaussRat;
    fn sub(self, o: &GaussRat) -> GaussRat {
        GaussRat::new(&self.re - &o.re, &self.im - &o.im)
    }
}

impl<'a> Mul<&'a GaussRat> for &'a GaussRat {
    type Output = GaussRat;
    fn mul(self, o: &GaussRat) -> GaussRat {
        GaussRat::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }
}

impl<'a> Div<&'a GaussRat> for &'a GaussRat {
    type Output = GaussRat;
    /// Panics on division by zero; use [`GaussRat::inv`] when the divisor may vanish.
    fn div(self, o: &GaussRat) -> GaussRat {
        self * &o.inv().expect("division by zero GaussRat")
    }
}

impl Neg for &GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat::new(-self.re.clone(), -self.im.clone())
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<GaussRat> for GaussRat {
            type Output = GaussRat;
            fn $m(self, o: GaussRat) -> GaussRat { (&self).$m(&o) }
        }
        impl<'a> $tr<&'a GaussRat> for GaussRat {
            type Output = GaussRat;
            fn $m(self, o: &GaussRat) -> GaussRat { (&self).$m(o) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul, Div div);

impl Neg for GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        -&self
    }
}

impl From<i64> for GaussRat {
    fn from(n: i64) -> Self {
        GaussRat::from_int(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_ops() {
        let a = GaussRat::from_ratios(1, 2, 3, 4);
        let b = GaussRat::from_ints(2, -1);
        let q = &a / &b;
        assert_eq!(&q * &b, a);
        assert_eq!(&(&a + &b) - &b, a);
        assert_eq!(GaussRat::i().pow(2), GaussRat::from_int(-1));
        assert!(GaussRat::zero().inv().is_none());
    }

    #[test]
    fn display() {
        assert_eq!(GaussRat::from_ratios(1, 2, -1, 4).to_string(), "1/2-1/4i");
        assert_eq!(GaussRat::from_ints(0, 3).to_string(), "3i");
        assert_eq!(GaussRat::from_int(-7).to_string(), "-7");
    }

    #[test]
    fn continued_fraction_snaps() {
        assert_eq!(best_rational(0.25, 16).unwrap(), BigRational::new(1.into(), 4.into()));
        assert_eq!(best_rational(-1.0 / 3.0, 16).unwrap(), BigRational::new((-1).into(), 3.into()));
        let g = GaussRat::approximate(C64::new(0.5, -0.5), 16).unwrap();
        assert_eq!(g, GaussRat::from_ratios(1, 2, -1, 2));
    }
}
