use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use super::{DomainKind, DomainSpec, MeroFn};
use crate::quad::gauss_legendre;
use crate::{Error, Result, C64};

const GL_NODES: usize = 16;
const MAX_TOL: f64 = 0.05;

/// Rounded degree with the raw curvature integral it came from.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DegreeEstimate {
    pub degree: u32,
    /// `(1/2π) ∫ 4|g'|²/(2+|g|²)² du dv` before rounding.
    pub value: f64,
}

/// Pullback density `4|g'|² / (2+|g|²)²`, evaluated in the `1/g` chart where
/// `|g| > 1` so it stays finite through poles of `g`.
pub fn fs_density(g: &MeroFn, gp: &MeroFn, z: C64) -> f64 {
    let mut z = z;
    for _ in 0..4 {
        if let Ok([v, dv]) = MeroFn::eval_all([g, gp], z) {
            let a = v.norm_sqr();
            return if a <= 1.0 {
                4.0 * dv.norm_sqr() / (2.0 + a).powi(2)
            } else {
                let h2 = 1.0 / a;
                let hp = dv.norm_sqr() * h2 * h2;
                4.0 * hp / (2.0 * h2 + 1.0).powi(2)
            };
        }
        z += C64::new(1e-9, 7e-10) * z.norm().max(1.0);
    }
    0.0
}

fn disk_integral<F: Fn(C64) -> f64 + Sync>(f: &F, panels: usize, angles: usize) -> f64 {
    let (x, w) = gauss_legendre(GL_NODES);
    let h = 1.0 / panels as f64;
    let nodes: Vec<(f64, f64)> = (0..panels)
        .flat_map(|p| {
            let a = p as f64 * h;
            x.iter().zip(&w).map(move |(xi, wi)| (a + 0.5 * h * (xi + 1.0), 0.5 * h * wi))
        })
        .collect();
    let dth = 2.0 * PI / angles as f64;
    nodes
        .par_iter()
        .map(|&(r, wr)| {
            let s: f64 = (0..angles)
                .map(|k| f(C64::from_polar(r, (k as f64 + 0.5) * dth)))
                .sum();
            s * dth * r * wr
        })
        .sum()
}

fn sphere_integral(g: &MeroFn, gp: &MeroFn, panels: usize, angles: usize) -> f64 {
    let inner = disk_integral(&|z| fs_density(g, gp, z), panels, angles);
    let outer = disk_integral(
        &|w: C64| {
            if w.norm() == 0.0 {
                return 0.0;
            }
            fs_density(g, gp, 1.0 / w) / w.norm_sqr().powi(2)
        },
        panels,
        angles,
    );
    inner + outer
}

fn torus_integral(g: &MeroFn, gp: &MeroFn, n: usize) -> f64 {
    let h = 1.0 / n as f64;
    let off = C64::new(0.0123, 0.0071);
    (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| {
                    let z = C64::new((i as f64 + 0.5) * h - 0.5, (j as f64 + 0.5) * h - 0.5) + off;
                    fs_density(g, gp, z)
                })
                .sum::<f64>()
        })
        .sum::<f64>()
        * h
        * h
}

/// Mapping degree of `g` from its total lift curvature.
pub fn degree_numeric(g: &MeroFn, dom: &DomainSpec) -> Result<DegreeEstimate> {
    let gp = g.derivative();
    let value = match dom.kind {
        DomainKind::Sphere => {
            let (mut panels, mut angles) = (4, 64);
            let mut prev = sphere_integral(g, &gp, panels, angles);
            loop {
                panels *= 2;
                angles *= 2;
                let next = sphere_integral(g, &gp, panels, angles);
                if (next - prev).abs() <= 1e-7 * next.abs().max(1.0) || panels >= 64 {
                    break next;
                }
                prev = next;
            }
        }
        DomainKind::Torus => {
            let mut n = 64;
            let mut prev = torus_integral(g, &gp, n);
            loop {
                n *= 2;
                let next = torus_integral(g, &gp, n);
                if (next - prev).abs() <= 1e-7 * next.abs().max(1.0) || n >= 256 {
                    break next;
                }
                prev = next;
            }
        }
    } / (2.0 * PI);
    let degree = value.round();
    if (value - degree).abs() > MAX_TOL || degree < 0.0 {
        return Err(Error::NotNearInteger { value, tol: MAX_TOL });
    }
    Ok(DegreeEstimate { degree: degree as u32, value })
}
