use std::fmt;

use num_traits::Zero;

use super::GaussRat;
use crate::C64;

/// Polynomial over `Q(i)`, coefficients lowest degree first, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct CPoly {
    coeffs: Vec<GaussRat>,
}

impl CPoly {
    pub fn new(mut coeffs: Vec<GaussRat>) -> Self {
        while coeffs.last().is_some_and(GaussRat::is_zero) {
            coeffs.pop();
        }
        CPoly { coeffs }
    }

    pub fn zero() -> Self {
        CPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        CPoly::constant(GaussRat::one())
    }

    pub fn constant(c: GaussRat) -> Self {
        CPoly::new(vec![c])
    }

    /// The identity polynomial `z`.
    pub fn z() -> Self {
        CPoly::monomial(GaussRat::one(), 1)
    }

    pub fn monomial(c: GaussRat, k: usize) -> Self {
        let mut v = vec![GaussRat::zero(); k];
        v.push(c);
        CPoly::new(v)
    }

    /// `z - a`.
    pub fn linear_root(a: &GaussRat) -> Self {
        CPoly::new(vec![-a, GaussRat::one()])
    }

    pub fn from_ints(c: &[i64]) -> Self {
        CPoly::new(c.iter().map(|&x| GaussRat::from_int(x)).collect())
    }

    pub fn coeffs(&self) -> &[GaussRat] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> GaussRat {
        self.coeffs.get(k).cloned().unwrap_or_else(GaussRat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` stands for the degree of the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn deg_or_zero(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn lead(&self) -> GaussRat {
        self.coeffs.last().cloned().unwrap_or_else(GaussRat::zero)
    }

    /// Multiplicity of the root `0`.
    pub fn trailing_zeros(&self) -> usize {
        self.coeffs.iter().take_while(|c| c.is_zero()).count()
    }

    pub fn eval(&self, z: &GaussRat) -> GaussRat {
        let mut acc = GaussRat::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * z) + c;
        }
        acc
    }

    pub fn to_c64(&self) -> Vec<C64> {
        self.coeffs.iter().map(GaussRat::to_c64).collect()
    }

    pub fn add(&self, o: &CPoly) -> CPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        CPoly::new((0..n).map(|k| &self.coeff(k) + &o.coeff(k)).collect())
    }

    pub fn sub(&self, o: &CPoly) -> CPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        CPoly::new((0..n).map(|k| &self.coeff(k) - &o.coeff(k)).collect())
    }

    pub fn neg(&self) -> CPoly {
        CPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn mul(&self, o: &CPoly) -> CPoly {
        if self.is_zero() || o.is_zero() {
            return CPoly::zero();
        }
        let mut out = vec![GaussRat::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        CPoly::new(out)
    }

    pub fn scale(&self, c: &GaussRat) -> CPoly {
        CPoly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn pow(&self, k: u32) -> CPoly {
        let mut acc = CPoly::one();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn derivative(&self) -> CPoly {
        CPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * &GaussRat::from_int(k as i64))
                .collect(),
        )
    }

    /// Antiderivative with zero constant term.
    pub fn integral(&self) -> CPoly {
        let mut v = vec![GaussRat::zero()];
        for (k, c) in self.coeffs.iter().enumerate() {
            v.push(c / &GaussRat::from_int(k as i64 + 1));
        }
        CPoly::new(v)
    }

    /// Euclidean division. Panics if `d` is zero.
    pub fn div_rem(&self, d: &CPoly) -> (CPoly, CPoly) {
        let dd = d.degree().expect("polynomial division by zero");
        let lead_inv = d.lead().inv().expect("nonzero lead");
        let mut r = self.coeffs.clone();
        let n = r.len();
        if n <= dd {
            return (CPoly::zero(), self.clone());
        }
        let mut q = vec![GaussRat::zero(); n - dd];
        for k in (0..n - dd).rev() {
            let c = &r[k + dd] * &lead_inv;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[k + j] = &r[k + j] - &(&c * dc);
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (CPoly::new(q), CPoly::new(r))
    }

    /// Quotient of an exact division; panics if the remainder is nonzero.
    pub fn exact_div(&self, d: &CPoly) -> CPoly {
        let (q, r) = self.div_rem(d);
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    pub fn monic(&self) -> CPoly {
        match self.lead().inv() {
            Some(l) => self.scale(&l),
            None => CPoly::zero(),
        }
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(&self, o: &CPoly) -> CPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    /// Returns `(s, t, g)` with `s·self + t·o = g = gcd(self, o)` (monic).
    pub fn ext_gcd(&self, o: &CPoly) -> (CPoly, CPoly, CPoly) {
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (CPoly::one(), CPoly::zero());
        let (mut t0, mut t1) = (CPoly::zero(), CPoly::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let s = s0.sub(&q.mul(&s1));
            let t = t0.sub(&q.mul(&t1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
            t0 = std::mem::replace(&mut t1, t);
        }
        match r0.lead().inv() {
            Some(l) => (s0.scale(&l), t0.scale(&l), r0.scale(&l)),
            None => (s0, t0, r0),
        }
    }

    /// Taylor shift: the polynomial `p(z + a)`.
    pub fn shift(&self, a: &GaussRat) -> CPoly {
        let mut acc = CPoly::zero();
        let lin = CPoly::new(vec![a.clone(), GaussRat::one()]);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&lin).add(&CPoly::constant(c.clone()));
        }
        acc
    }

    /// `z^n p(1/z)` for `n >= deg p`.
    pub fn reversed(&self, n: usize) -> CPoly {
        let mut v = vec![GaussRat::zero(); n + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            v[n - k] = c.clone();
        }
        CPoly::new(v)
    }

    /// Square-free factorization by Yun's algorithm: monic, pairwise coprime
    /// factors `a_i` with `self = lead · Π a_i^i`. Factors equal to 1 are omitted.
    pub fn square_free(&self) -> Vec<(CPoly, usize)> {
        let f = self.monic();
        if f.is_constant() {
            return Vec::new();
        }
        let fp = f.derivative();
        let a0 = f.gcd(&fp);
        let mut b = f.exact_div(&a0);
        let c = fp.exact_div(&a0);
        let mut d = c.sub(&b.derivative());
        let mut out = Vec::new();
        let mut i = 1;
        while !b.is_constant() {
            let a = b.gcd(&d);
            b = b.exact_div(&a);
            let c = d.exact_div(&a);
            d = c.sub(&b.derivative());
            if !a.is_constant() {
                out.push((a, i));
            }
            i += 1;
        }
        out
    }
}

impl fmt::Display for CPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let cs = if c.is_real() || c.re.is_zero() {
                c.to_string()
            } else {
                format!("({c})")
            };
            match k {
                0 => write!(f, "{cs}")?,
                1 if c.is_one() => write!(f, "z")?,
                1 => write!(f, "{cs}*z")?,
                _ if c.is_one() => write!(f, "z^{k}")?,
                _ => write!(f, "{cs}*z^{k}")?,
            }
        }
        Ok(())
    }
}
