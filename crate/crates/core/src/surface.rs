//! Evaluation of the surface `f = Re ∫ (g, 1, -i) w`, its dual, meshes and the
//! proper-embeddedness probe.
//!
//! Coordinates are returned as `[t, x, y]` with `t` the degenerate direction.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::cxpoly::{Antiderivative, RationalFn};
use crate::elliptic;
use crate::localanalysis::{Kind, MeroFn};
use crate::wdata::WeierstrassData;
use crate::{Error, Point, Result, C64};

const PATH_ABS: f64 = 1e-10;
const PATH_REL: f64 = 1e-13;
/// Default closest approach of an integration path to a puncture.
pub const DEFAULT_GUARD: f64 = 1e-3;
const MAX_DISK: f64 = 0.25;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Rational primitives plus real logarithms.
    ExactPrimitive,
    /// `f⁰ = log|F|`, `f¹ + i f² = G` from the fixture.
    ClosedForm,
    /// Adaptive quadrature along a routed path from a base point where `f = 0`.
    PathIntegral,
}

/// Point of the surface for the local coordinate `t` at `p` (`z = 1/t` at `∞`).
pub fn chart(p: &Point, t: C64) -> C64 {
    match p {
        Point::Infinity => 1.0 / t,
        _ => p.finite().expect("finite") + t,
    }
}

/// Evaluates `f` on a validated surface with one fixed strategy.
pub struct SurfaceEvaluator<'a> {
    data: &'a WeierstrassData,
    strategy: Strategy,
    prim: Option<(Antiderivative, RationalFn)>,
    router: Option<Router>,
}

impl<'a> SurfaceEvaluator<'a> {
    /// Closed form if supplied, exact primitives for rational data, else paths.
    pub fn new(data: &'a WeierstrassData) -> Result<SurfaceEvaluator<'a>> {
        let s = if data.closed_form.is_some() {
            Strategy::ClosedForm
        } else if data.is_rational() && data.g_omega.as_rational().is_some() {
            Strategy::ExactPrimitive
        } else {
            Strategy::PathIntegral
        };
        SurfaceEvaluator::with_strategy(data, s)
    }

    pub fn with_strategy(data: &'a WeierstrassData, strategy: Strategy) -> Result<SurfaceEvaluator<'a>> {
        data.ensure_valid()?;
        let mut ev = SurfaceEvaluator { data, strategy, prim: None, router: None };
        match strategy {
            Strategy::ExactPrimitive => {
                let (Some(w), Some(gw)) = (data.omega.as_rational(), data.g_omega.as_rational()) else {
                    return Err(Error::UnsupportedType("exact primitives need rational data".into()));
                };
                let gstar = w.antiderivative()?;
                if !gstar.logs.is_empty() {
                    return Err(Error::NotValidated("w has a residue".into()));
                }
                ev.prim = Some((gw.antiderivative()?, gstar.rational));
            }
            Strategy::ClosedForm => {
                let Some(c) = &data.closed_form else {
                    return Err(Error::UnsupportedType("no closed form supplied".into()));
                };
                if c.f0_log_abs.is_none() {
                    return Err(Error::UnsupportedType("closed form lacks f0".into()));
                }
            }
            Strategy::PathIntegral => ev.router = Some(Router::new(data, DEFAULT_GUARD)?),
        }
        Ok(ev)
    }

    /// Path integration with a custom guard radius.
    pub fn path_integral(data: &'a WeierstrassData, guard: f64) -> Result<SurfaceEvaluator<'a>> {
        data.ensure_valid()?;
        let router = Router::new(data, guard)?;
        Ok(SurfaceEvaluator { data, strategy: Strategy::PathIntegral, prim: None, router: Some(router) })
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    pub fn data(&self) -> &WeierstrassData {
        self.data
    }

    pub fn eval(&self, z: C64) -> Result<[f64; 3]> {
        match self.strategy {
            Strategy::ExactPrimitive => {
                let (phi, gstar) = self.prim.as_ref().expect("primitives");
                let mut t = phi.rational.eval_c64(z).re;
                for l in &phi.logs {
                    let p = l.pole.finite().expect("finite pole");
                    t += l.coeff_value.re * (z - p).norm().ln();
                }
                let s = gstar.eval_c64(z);
                finite([t, s.re, s.im], z)
            }
            Strategy::ClosedForm => {
                let c = self.data.closed_form.as_ref().expect("closed form");
                let f0 = c.f0_log_abs.as_ref().expect("f0");
                let [a, s] = MeroFn::eval_all([f0, &c.gstar], z)?;
                finite([a.norm().ln(), s.re, s.im], z)
            }
            Strategy::PathIntegral => self.router.as_ref().expect("router").integrate(self.data, z),
        }
    }

    /// Parallel evaluation preserving order.
    pub fn eval_many(&self, zs: &[C64]) -> Result<Vec<[f64; 3]>> {
        zs.par_iter().map(|&z| self.eval(z)).collect()
    }
}

fn finite(v: [f64; 3], z: C64) -> Result<[f64; 3]> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(v)
    } else {
        Err(Error::PoleProximity(format!("{z}")))
    }
}

/// `f(z)` with the default strategy.
pub fn evaluate(data: &WeierstrassData, z: C64) -> Result<[f64; 3]> {
    SurfaceEvaluator::new(data)?.eval(z)
}

/// Dual surface `f* = (Re(g g*) - f⁰, Re g, -Im g)`.
pub fn evaluate_dual(data: &WeierstrassData, z: C64) -> Result<[f64; 3]> {
    DualEvaluator::new(data)?.eval(z)
}

/// Evaluates the dual surface through the primal one.
pub struct DualEvaluator<'a> {
    primal: SurfaceEvaluator<'a>,
    gstar: MeroFn,
}

impl<'a> DualEvaluator<'a> {
    pub fn new(data: &'a WeierstrassData) -> Result<DualEvaluator<'a>> {
        if data.g_prime().is_zero() {
            return Err(Error::DegenerateDual(format!("{}: g is constant", data.name)));
        }
        Ok(DualEvaluator { primal: SurfaceEvaluator::new(data)?, gstar: data.gstar()? })
    }

    pub fn eval(&self, z: C64) -> Result<[f64; 3]> {
        let f = self.primal.eval(z)?;
        let [g, s] = MeroFn::eval_all([&self.primal.data.g, &self.gstar], z)?;
        finite([(g * s).re - f[0], g.re, -g.im], z)
    }
}

#[derive(Clone, Copy, Debug)]
enum Seg {
    Line(C64, C64),
    Arc { c: C64, r: f64, a0: f64, a1: f64 },
}

impl Seg {
    fn at(&self, s: f64) -> (C64, C64) {
        match *self {
            Seg::Line(a, b) => (a + (b - a) * s, b - a),
            Seg::Arc { c, r, a0, a1 } => {
                let th = a0 + (a1 - a0) * s;
                let e = C64::from_polar(r, th);
                (c + e, C64::new(0.0, 1.0) * e * (a1 - a0))
            }
        }
    }
}

/// Polyline paths from a base point avoiding disks around the punctures.
#[derive(Clone, Debug)]
struct Router {
    torus: bool,
    guard: f64,
    obstacles: Vec<(C64, f64)>,
    base: C64,
}

impl Router {
    fn new(data: &WeierstrassData, guard: f64) -> Result<Router> {
        let torus = data.dom.is_torus();
        let mut centers: Vec<C64> = Vec::new();
        for p in data.dom.finite_punctures() {
            if torus {
                let p = elliptic::reduce(p);
                for m in -1..=1 {
                    for n in -1..=1 {
                        centers.push(p + C64::new(m as f64, n as f64));
                    }
                }
            } else {
                centers.push(p);
            }
        }
        let obstacles: Vec<(C64, f64)> = centers
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let near = centers
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, &o)| (o - c).norm())
                    .fold(f64::INFINITY, f64::min);
                (c, MAX_DISK.min(0.45 * near))
            })
            .collect();
        let base = [
            C64::new(0.3, 0.2),
            C64::new(-0.35, 0.15),
            C64::new(0.13, -0.41),
            C64::new(-0.27, -0.33),
            C64::new(0.44, 0.06),
            C64::new(0.07, 0.38),
        ]
        .into_iter()
        .find(|&b| obstacles.iter().all(|&(c, r)| (b - c).norm() > r + 0.02))
        .ok_or_else(|| Error::PathBlocked("no base point clear of the punctures".into()))?;
        Ok(Router { torus, guard, obstacles, base })
    }

    fn route(&self, target: C64) -> Result<Vec<Seg>> {
        let guard = self.guard * (1.0 - 1e-9);
        if let Some(&(c, _)) = self.obstacles.iter().find(|&&(c, _)| (target - c).norm() < guard) {
            return Err(Error::PathBlocked(format!("{target} is within {} of the puncture {c}", self.guard)));
        }
        let mut segs = Vec::new();
        let mut cur = self.base;
        let mut skip = usize::MAX;
        for _ in 0..=self.obstacles.len() {
            let d = target - cur;
            let a = d.norm_sqr();
            if a == 0.0 {
                return Ok(segs);
            }
            // first disk entered along cur -> target
            let mut hit: Option<(f64, usize, f64)> = None;
            for (i, &(c, r)) in self.obstacles.iter().enumerate() {
                if i == skip {
                    continue;
                }
                let f = cur - c;
                let b = 2.0 * (f * d.conj()).re;
                let disc = b * b - 4.0 * a * (f.norm_sqr() - r * r);
                if disc <= 0.0 {
                    continue;
                }
                let sq = disc.sqrt();
                let s1 = (-b - sq) / (2.0 * a);
                let s2 = (-b + sq) / (2.0 * a);
                if (0.0..1.0).contains(&s1) && hit.is_none_or(|h| s1 < h.0) {
                    hit = Some((s1, i, s2));
                }
            }
            let Some((s1, i, s2)) = hit else {
                segs.push(Seg::Line(cur, target));
                return Ok(segs);
            };
            let (c, r) = self.obstacles[i];
            let entry = cur + d * s1;
            segs.push(Seg::Line(cur, entry));
            let a0 = (entry - c).arg();
            if (target - c).norm() < r {
                let a1 = a0 + wrap((target - c).arg() - a0);
                segs.push(Seg::Arc { c, r, a0, a1 });
                segs.push(Seg::Line(c + C64::from_polar(r, a1), target));
                return Ok(segs);
            }
            let exit = cur + d * s2;
            let a1 = a0 + wrap((exit - c).arg() - a0);
            segs.push(Seg::Arc { c, r, a0, a1 });
            cur = exit;
            skip = i;
        }
        Err(Error::PathBlocked(format!("no route to {target}")))
    }

    fn integrate(&self, data: &WeierstrassData, z: C64) -> Result<[f64; 3]> {
        let target = if self.torus { elliptic::reduce(z) } else { z };
        integrate_segments(data, &self.route(target)?)
    }
}

fn integrate_segments(data: &WeierstrassData, segs: &[Seg]) -> Result<[f64; 3]> {
    let mut t = 0.0;
    let mut s = C64::new(0.0, 0.0);
    for seg in segs {
        let v = crate::quad::integrate(
            |u: f64| {
                let (p, dp) = seg.at(u);
                let [w, gw] = MeroFn::eval_all([&data.omega, &data.g_omega], p)?;
                Ok([gw * dp, w * dp])
            },
            0.0,
            1.0,
            PATH_ABS,
            PATH_REL,
        )?;
        t += v[0].re;
        s += v[1];
    }
    Ok([t, s.re, s.im])
}

/// Change of `f` along the polyline through `pts`, with no routing.
pub fn integrate_polyline(data: &WeierstrassData, pts: &[C64]) -> Result<[f64; 3]> {
    let segs: Vec<Seg> = pts.windows(2).map(|w| Seg::Line(w[0], w[1])).collect();
    integrate_segments(data, &segs)
}

fn wrap(a: f64) -> f64 {
    let mut a = a.rem_euclid(2.0 * PI);
    if a > PI {
        a -= 2.0 * PI;
    }
    a
}

/// Sampling parameters for [`mesh`].
#[derive(Clone, Debug, Serialize)]
pub struct MeshConfig {
    /// Smallest local radius around a finite puncture.
    pub rmin: f64,
    /// Largest `|z|` near `∞`.
    pub rmax: f64,
    pub angles: usize,
    /// Radial rings per end collar.
    pub rings: usize,
    /// Interior grid points per side.
    pub grid: usize,
}

impl Default for MeshConfig {
    fn default() -> Self {
        MeshConfig { rmin: 0.05, rmax: 20.0, angles: 96, rings: 32, grid: 64 }
    }
}

impl MeshConfig {
    pub fn hash(&self) -> String {
        let s = format!(
            "rmin={:e};rmax={:e};angles={};rings={};grid={}",
            self.rmin, self.rmax, self.angles, self.rings, self.grid
        );
        Sha256::digest(s.as_bytes()).iter().fold(String::new(), |mut h, b| {
            let _ = write!(h, "{b:02x}");
            h
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Marker {
    pub point: Point,
    pub position: [f64; 3],
}

/// Quad mesh of the surface; faces index `vertices` from 0.
#[derive(Clone, Debug, Serialize)]
pub struct Mesh {
    pub name: String,
    pub config: MeshConfig,
    pub strategy: Strategy,
    pub vertices: Vec<[f64; 3]>,
    pub faces: Vec<[usize; 4]>,
    /// Singular points, drawn as markers.
    pub markers: Vec<Marker>,
}

impl Mesh {
    /// `(min t, max t)` over the vertices.
    pub fn t_range(&self) -> (f64, f64) {
        self.vertices
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v[0]), hi.max(v[0])))
    }

    pub fn to_obj(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# zmc mesh");
        let _ = writeln!(s, "# fixture {}", self.name);
        let _ = writeln!(s, "# config sha256 {}", self.config.hash());
        let _ = writeln!(s, "# axes: v t x y, t is the isotropic direction, no rescaling");
        for m in &self.markers {
            let p = m.position;
            let _ = writeln!(s, "# singular {} at {:.12e} {:.12e} {:.12e}", m.point, p[0], p[1], p[2]);
        }
        for v in &self.vertices {
            let _ = writeln!(s, "v {:.12e} {:.12e} {:.12e}", v[0], v[1], v[2]);
        }
        for f in &self.faces {
            let _ = writeln!(s, "f {} {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1, f[3] + 1);
        }
        s
    }
}

/// Polar collars at the ends plus an interior grid, evaluated in parallel.
pub fn mesh(data: &WeierstrassData, cfg: &MeshConfig) -> Result<Mesh> {
    if cfg.angles < 3 || cfg.rings < 2 || cfg.grid < 2 || !(cfg.rmin > 0.0) || !(cfg.rmax > 0.0) {
        return Err(Error::Parse("mesh needs angles >= 3 and positive radii".into()));
    }
    let ev = SurfaceEvaluator::new(data)?;
    let mut params: Vec<C64> = Vec::new();
    let mut faces: Vec<[usize; 4]> = Vec::new();
    let finite = data.dom.finite_punctures();
    let disk = |i: usize| -> f64 {
        let near = finite
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &q)| data.dom.distance(q, finite[i]))
            .fold(f64::INFINITY, f64::min);
        let cap = if data.dom.is_torus() { MAX_DISK } else { 1.0 };
        cap.min(0.45 * near)
    };
    let disks: Vec<f64> = (0..finite.len()).map(disk).collect();

    let mut collar = |center: Option<C64>, r0: f64, r1: f64, params: &mut Vec<C64>| {
        let start = params.len();
        let n = cfg.rings;
        for k in 0..n {
            let r = r0 * (r1 / r0).powf(k as f64 / (n - 1) as f64);
            for j in 0..cfg.angles {
                let e = C64::from_polar(r, 2.0 * PI * j as f64 / cfg.angles as f64);
                params.push(match center {
                    Some(c) => c + e,
                    None => e,
                });
            }
        }
        for k in 0..n - 1 {
            for j in 0..cfg.angles {
                let jn = (j + 1) % cfg.angles;
                let a = start + k * cfg.angles;
                let b = a + cfg.angles;
                faces.push([a + j, a + jn, b + jn, b + j]);
            }
        }
    };

    for (i, &p) in finite.iter().enumerate() {
        let r1 = disks[i];
        collar(Some(p), cfg.rmin.min(0.5 * r1), r1, &mut params);
    }
    let has_inf = data.dom.punctures.iter().any(Point::is_infinity);
    let outer = finite
        .iter()
        .zip(&disks)
        .map(|(p, r)| p.norm() + r)
        .fold(1.0, f64::max);
    if has_inf {
        collar(None, outer, cfg.rmax.max(2.0 * outer), &mut params);
    }

    // interior grid, skipping the collar disks
    let (lo, hi, radius) = if data.dom.is_torus() {
        (-0.5, 0.5, f64::INFINITY)
    } else if has_inf {
        (-outer, outer, outer)
    } else {
        (-cfg.rmax, cfg.rmax, cfg.rmax)
    };
    let n = cfg.grid;
    let wrap_grid = data.dom.is_torus();
    let step = (hi - lo) / if wrap_grid { n as f64 } else { (n - 1) as f64 };
    let mut index = vec![usize::MAX; n * n];
    for i in 0..n {
        for j in 0..n {
            let z = C64::new(lo + step * i as f64, lo + step * j as f64);
            let inside = z.norm() <= radius
                && finite.iter().zip(&disks).all(|(&p, &r)| data.dom.distance(z, p) >= r);
            if inside {
                index[i * n + j] = params.len();
                params.push(z);
            }
        }
    }
    let lim = if wrap_grid { n } else { n - 1 };
    for i in 0..lim {
        for j in 0..lim {
            let (i1, j1) = ((i + 1) % n, (j + 1) % n);
            let q = [index[i * n + j], index[i1 * n + j], index[i1 * n + j1], index[i * n + j1]];
            if q.iter().all(|&v| v != usize::MAX) {
                faces.push(q);
            }
        }
    }

    let vertices = ev.eval_many(&params)?;
    let markers = data
        .omega_zeros()?
        .into_iter()
        .map(|(p, _)| {
            let z = p.finite().expect("finite singular point");
            Ok(Marker { position: ev.eval(z)?, point: p })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Mesh {
        name: data.name.clone(),
        config: cfg.clone(),
        strategy: ev.strategy(),
        vertices,
        faces,
        markers,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Inconclusive,
}

/// The image of one end collar `0 < |t| <= radius`.
#[derive(Clone, Debug, Serialize)]
pub struct ProbeEnd {
    pub point: Point,
    pub embedded: bool,
    pub radius: f64,
    /// Range of `t` on the collar; infinite bounds serialize as null.
    pub t_interval: [f64; 2],
    /// Disk containing the `(x, y)` image of a shrinking end.
    pub xy_disk: Option<([f64; 2], f64)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeReport {
    pub verdict: Verdict,
    pub bound: f64,
    pub ends: Vec<ProbeEnd>,
    pub notes: Vec<String>,
}

/// Sufficient check that the end collars are embedded and pairwise disjoint.
///
/// `t - Res log|t|` is harmonic on each collar disk, so its range is bounded by
/// the values on the outer circle; shrinking ends also get a disk for `(x, y)`.
pub fn proper_embeddedness_probe(data: &WeierstrassData, bound: f64) -> Result<ProbeReport> {
    let ev = SurfaceEvaluator::new(data)?;
    let an = data.analyzer()?;
    let mut ends = Vec::new();
    let mut notes = Vec::new();
    const SAMPLES: usize = 256;
    for p in &data.dom.punctures {
        let ord_w = an.order(&data.omega, p, Kind::Form)?;
        let embedded = ord_w == -2 || ord_w == 0;
        if !embedded {
            notes.push(format!("end {p} has ord w = {ord_w} and is not embedded"));
        }
        let r = bound.min(an.radius_at(p)?);
        let (ord_gw, res) = if data.g_omega.is_zero() {
            (i32::MAX, 0.0)
        } else {
            let o = an.order(&data.g_omega, p, Kind::Form)?;
            let res = if o <= -1 {
                an.jet(&data.g_omega, p, (-o) as usize, Kind::Form)?.residue().re
            } else {
                0.0
            };
            (o, res)
        };
        let ts: Vec<C64> = (0..SAMPLES)
            .map(|j| chart(p, C64::from_polar(r, 2.0 * PI * (j as f64 + 0.5) / SAMPLES as f64)))
            .collect();
        let vals = ev.eval_many(&ts)?;
        let t_interval = if ord_gw < -1 {
            [f64::NEG_INFINITY, f64::INFINITY]
        } else {
            let h: Vec<f64> = vals.iter().map(|v| v[0] - res * r.ln()).collect();
            let hmin = h.iter().copied().fold(f64::INFINITY, f64::min);
            let hmax = h.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let margin = 0.05 * (hmax - hmin) + 1e-9 * (1.0 + hmax.abs().max(hmin.abs()));
            let (hmin, hmax) = (hmin - margin, hmax + margin);
            let tol = 1e-9;
            if res > tol {
                [f64::NEG_INFINITY, hmax + res * r.ln()]
            } else if res < -tol {
                [hmin + res * r.ln(), f64::INFINITY]
            } else {
                [hmin, hmax]
            }
        };
        let xy_disk = (ord_w >= 0).then(|| {
            let n = vals.len() as f64;
            let c = vals.iter().fold([0.0, 0.0], |a, v| [a[0] + v[1] / n, a[1] + v[2] / n]);
            let rad = vals.iter().map(|v| (v[1] - c[0]).hypot(v[2] - c[1])).fold(0.0, f64::max);
            (c, 1.05 * rad + 1e-9)
        });
        ends.push(ProbeEnd { point: p.clone(), embedded, radius: r, t_interval, xy_disk });
    }
    let mut disjoint = true;
    for i in 0..ends.len() {
        for j in i + 1..ends.len() {
            let (a, b) = (&ends[i], &ends[j]);
            let t_sep = a.t_interval[1] < b.t_interval[0] || b.t_interval[1] < a.t_interval[0];
            let xy_sep = match (a.xy_disk, b.xy_disk) {
                (Some((c1, r1)), Some((c2, r2))) => (c1[0] - c2[0]).hypot(c1[1] - c2[1]) > r1 + r2,
                _ => false,
            };
            if !(t_sep || xy_sep) {
                disjoint = false;
                notes.push(format!("collars at {} and {} may meet", a.point, b.point));
            }
        }
    }
    let verdict = if disjoint && ends.iter().all(|e| e.embedded) {
        Verdict::Pass
    } else {
        Verdict::Inconclusive
    };
    Ok(ProbeReport { verdict, bound, ends, notes })
}
