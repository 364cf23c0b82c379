use super::{CPoly, GaussRat};
use crate::{Error, Point, Result, C64};

const MAX_ITER: usize = 500;
const SNAP_DEN: i64 = 1024;

/// A root of a polynomial with its exact multiplicity.
#[derive(Clone, Debug)]
pub struct Root {
    pub point: Point,
    pub value: C64,
    pub multiplicity: usize,
}

/// Roots of `p` as floats with multiplicities from exact square-free decomposition.
pub fn roots(p: &CPoly, tol: f64) -> Result<Vec<(C64, usize)>> {
    Ok(root_points(p, tol)?
        .into_iter()
        .map(|r| (r.value, r.multiplicity))
        .collect())
}

/// Roots of `p`, exact whenever a root is Gaussian rational.
pub fn root_points(p: &CPoly, tol: f64) -> Result<Vec<Root>> {
    if p.is_zero() {
        return Err(Error::ZeroFunction);
    }
    let mut out = Vec::new();
    for (factor, m) in p.square_free() {
        for point in factor_roots(&factor, tol)? {
            let value = point.finite().expect("finite root");
            out.push(Root { point, value, multiplicity: m });
        }
    }
    Ok(out)
}

fn factor_roots(a: &CPoly, tol: f64) -> Result<Vec<Point>> {
    let n = a.deg_or_zero();
    if n == 1 {
        let r = &(-&a.coeff(0)) / &a.coeff(1);
        return Ok(vec![Point::Exact(r)]);
    }
    let mut out = Vec::with_capacity(n);
    let mut rest = a.clone();
    let zs = if a.trailing_zeros() > 0 {
        out.push(Point::Exact(GaussRat::zero()));
        rest = a.exact_div(&CPoly::z());
        if rest.is_constant() {
            return Ok(out);
        }
        aberth(&rest.to_c64())?
    } else {
        aberth(&a.to_c64())?
    };
    let coeffs = rest.to_c64();
    for z in zs {
        let z = polish(&coeffs, z);
        let scale: f64 = coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c.norm() * z.norm().powi(k as i32))
            .sum();
        if horner(&coeffs, z).0.norm() > tol * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::NonConvergence(format!("root residual too large near {z}")));
        }
        let snapped = GaussRat::approximate(z, SNAP_DEN).filter(|g| rest.eval(g).is_zero());
        out.push(match snapped {
            Some(g) => Point::Exact(g),
            None => Point::Approx(z),
        });
    }
    Ok(out)
}

/// Value and derivative by Horner's rule.
pub(crate) fn horner(c: &[C64], z: C64) -> (C64, C64) {
    let mut p = C64::new(0.0, 0.0);
    let mut dp = C64::new(0.0, 0.0);
    for a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

fn polish(c: &[C64], mut z: C64) -> C64 {
    for _ in 0..3 {
        let (p, dp) = horner(c, z);
        if dp.norm() == 0.0 {
            break;
        }
        let step = p / dp;
        z -= step;
        if step.norm() <= f64::EPSILON * z.norm() {
            break;
        }
    }
    z
}

/// `Σ |c_k| |z|^k`, the scale of rounding errors in `horner(c, z)`.
fn magnitude(c: &[C64], z: C64) -> f64 {
    let r = z.norm();
    c.iter().rev().fold(0.0, |acc, a| acc * r + a.norm())
}

/// Simultaneous Aberth–Ehrlich iteration on a square-free polynomial.
pub fn aberth(c: &[C64]) -> Result<Vec<C64>> {
    let n = c.len().saturating_sub(1);
    if n == 0 {
        return Ok(Vec::new());
    }
    let lead = c[n];
    let radius = (0..n)
        .map(|k| (c[k] / lead).norm().powf(1.0 / (n - k) as f64))
        .fold(0.0f64, f64::max)
        .max(1e-3);
    let mut z: Vec<C64> = (0..n)
        .map(|k| C64::from_polar(radius, 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4))
        .collect();
    let mut frozen = vec![false; n];
    for _ in 0..MAX_ITER {
        let mut done = true;
        for k in 0..n {
            if frozen[k] {
                continue;
            }
            let (p, dp) = horner(c, z[k]);
            // residual at the rounding level of Horner's rule: nothing left to gain
            if p.norm() <= 4.0 * n as f64 * f64::EPSILON * magnitude(c, z[k]) {
                frozen[k] = true;
                continue;
            }
            let ratio = p / dp;
            let s: C64 = (0..n).filter(|&j| j != k).map(|j| 1.0 / (z[k] - z[j])).sum();
            let w = ratio / (1.0 - ratio * s);
            if !w.re.is_finite() || !w.im.is_finite() {
                return Err(Error::NonConvergence("aberth step is not finite".into()));
            }
            z[k] -= w;
            if w.norm() > 1e-15 * z[k].norm().max(1e-300) {
                done = false;
            } else {
                frozen[k] = true;
            }
        }
        if done {
            return Ok(z);
        }
    }
    Err(Error::NonConvergence(format!("aberth iteration on degree {n}")))
}
