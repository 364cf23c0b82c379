//! Quadrature rules: adaptive Gauss–Kronrod on intervals and Gauss–Legendre nodes.

use crate::{Error, Result, C64};

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn zero<const N: usize>() -> [C64; N] {
    [C64::new(0.0, 0.0); N]
}

fn norm<const N: usize>(v: &[C64; N]) -> f64 {
    v.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// One 15-point Kronrod estimate with the embedded 7-point Gauss error.
pub fn gk15<const N: usize, F>(f: &F, a: f64, b: f64) -> Result<([C64; N], f64)>
where
    F: Fn(f64) -> Result<[C64; N]>,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let mut k = zero::<N>();
    let mut g = zero::<N>();
    for i in 0..N {
        k[i] = fc[i] * WGK[7];
        g[i] = fc[i] * WG[3];
    }
    for j in 0..7 {
        let x = h * XGK[j];
        let f1 = f(c - x)?;
        let f2 = f(c + x)?;
        for i in 0..N {
            let s = f1[i] + f2[i];
            k[i] += s * WGK[j];
            if j % 2 == 1 {
                g[i] += s * WG[j / 2];
            }
        }
    }
    let mut err = 0.0f64;
    for i in 0..N {
        k[i] *= h;
        g[i] *= h;
        err = err.max((k[i] - g[i]).norm());
    }
    Ok((k, err))
}

/// Globally adaptive G7K15 on `[a, b]`.
pub fn integrate<const N: usize, F>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<[C64; N]>
where
    F: Fn(f64) -> Result<[C64; N]>,
{
    const MAX_INTERVALS: usize = 2000;
    let (v, e) = gk15(&f, a, b)?;
    let mut parts = vec![(a, b, v, e)];
    loop {
        let mut total = zero::<N>();
        let mut err = 0.0;
        for p in &parts {
            for i in 0..N {
                total[i] += p.2[i];
            }
            err += p.3;
        }
        if err <= abs_tol.max(rel_tol * norm(&total)) {
            return Ok(total);
        }
        if parts.len() >= MAX_INTERVALS {
            return Err(Error::QuadratureFailure(format!(
                "error estimate {err:e} after {MAX_INTERVALS} subintervals"
            )));
        }
        let worst = (0..parts.len())
            .max_by(|&i, &j| parts[i].3.total_cmp(&parts[j].3))
            .expect("nonempty");
        let (lo, hi, _, _) = parts.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Err(Error::QuadratureFailure("interval cannot be bisected".into()));
        }
        let (v1, e1) = gk15(&f, lo, mid)?;
        let (v2, e2) = gk15(&f, mid, hi)?;
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_is_exact_on_polynomials() {
        let (v, _) = gk15(&|t: f64| Ok([C64::new(t.powi(20), t.powi(3))]), 0.0, 1.0).unwrap();
        assert!((v[0].re - 1.0 / 21.0).abs() < 1e-15);
        assert!((v[0].im - 0.25).abs() < 1e-15);
    }

    #[test]
    fn adaptive_handles_a_near_pole() {
        // ∫_0^1 dt / (t - i eps) = log((1 - i eps)/(-i eps))
        let eps = 1e-3;
        let f = |t: f64| Ok([1.0 / C64::new(t, -eps)]);
        let v = integrate(f, 0.0, 1.0, 1e-12, 1e-13).unwrap();
        let want = (C64::new(1.0, -eps) / C64::new(0.0, -eps)).ln();
        assert!((v[0] - want).norm() < 1e-10);
    }

    #[test]
    fn legendre_weights() {
        for n in [1, 2, 5, 16, 33] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            let m2: f64 = x.iter().zip(&w).map(|(x, w)| w * x * x).sum();
            assert!((m2 - 2.0 / 3.0).abs() < 1e-13 || n == 1);
        }
    }
}
