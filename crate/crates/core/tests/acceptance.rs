//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use zmc::elliptic::{invariants, wp, wp_prime};
use zmc::ends::{classify_ends, verify_o1, EndType, DEFAULT_RADII};
use zmc::fixtures::{self, check_fixture, Fixture};
use zmc::localanalysis::{Kind, MeroFn};
use zmc::osserman::{osserman_report, omitted_values};
use zmc::sing::{singular_points, singular_points_checked, DEFAULT_STEP};
use zmc::surface::{mesh, MeshConfig, Strategy, SurfaceEvaluator};
use zmc::wdata::WeierstrassData;
use zmc::{Point, C64};

type Outcome = Result<String, String>;

fn fx(name: &str) -> Fixture {
    fixtures::load(name).expect("built-in fixture")
}

fn rational_fixtures() -> Vec<Fixture> {
    fixtures::catalogue().unwrap().into_iter().filter(|f| f.data.is_rational()).collect()
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed())
}

fn fixture_regression() -> Outcome {
    let (res, dt) = timed(|| {
        let all = fixtures::catalogue().map_err(|e| e.to_string())?;
        let mut bad = Vec::new();
        for f in &all {
            match check_fixture(f) {
                Ok(c) if c.ok() => {}
                Ok(c) => bad.push(format!("{}: {:?}", c.name, c.mismatches)),
                Err(e) => bad.push(format!("{}: {e}", f.name())),
            }
        }
        Ok::<_, String>((all.len(), bad))
    });
    let (n, bad) = res?;
    if n < 12 {
        return Err(format!("only {n} fixtures"));
    }
    if !bad.is_empty() {
        return Err(bad.join("; "));
    }
    if dt.as_secs_f64() >= 5.0 {
        return Err(format!("{n} fixtures took {:.2} s", dt.as_secs_f64()));
    }
    Ok(format!("{n} fixtures in {:.2} s", dt.as_secs_f64()))
}

fn equality_matrix() -> Outcome {
    let want = [
        ("two-catenoidal-ends", [true, true, true]),
        ("three-ends", [true, true, true]),
        ("layered-end", [false, false, true]),
        ("torus-wp", [true, true, true]),
        ("torus-wp-quarter", [true, true, true]),
    ];
    let mut notes = Vec::new();
    for (name, eq) in want {
        let r = osserman_report(&fx(name).data).map_err(|e| format!("{name}: {e}"))?;
        let got = [r.ineq1.equal, r.ineq2.equal, r.ineq3.equal];
        let holds = r.ineq1.holds && r.ineq2.holds && r.ineq3.holds;
        if got != eq || !holds || !r.ok() {
            return Err(format!("{name}: equalities {got:?}, want {eq:?}"));
        }
        for d in [&r.deg_g, &r.deg_gstar] {
            if let Some(v) = d.numeric {
                if (v - d.value as f64).abs() > 0.05 {
                    return Err(format!("{name}: numeric degree {v} not within 0.05 of {}", d.value));
                }
                notes.push(format!("{name} {v:.4}"));
            }
        }
    }
    Ok(format!("numeric degrees {}", notes.join(", ")))
}

/// `(1/2π) ∫ (-K#) dA#` with a midpoint rule in spherical coordinates
/// `z = tan(s/2) e^{iφ}` on the sphere and a plain grid on the torus.
fn curvature_integral(d: &WeierstrassData, n: usize) -> f64 {
    let sum: f64 = if d.dom.is_torus() {
        let h = 1.0 / n as f64;
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                let z = C64::new((i as f64 + 0.5) * h, (j as f64 + 0.5) * h);
                s += d.curvature_area_density(z);
            }
        }
        s * h * h
    } else {
        let (ds, dphi) = (PI / n as f64, 2.0 * PI / (2 * n) as f64);
        let mut s = 0.0;
        for i in 0..n {
            let th = (i as f64 + 0.5) * ds;
            let r = (th / 2.0).tan();
            let jac = r * 0.5 / (th / 2.0).cos().powi(2);
            for j in 0..2 * n {
                let z = C64::from_polar(r, (j as f64 + 0.5) * dphi);
                s += d.curvature_area_density(z) * jac;
            }
        }
        s * ds * dphi
    };
    sum / (2.0 * PI)
}

fn degree_curvature() -> Outcome {
    let mut notes = Vec::new();
    for (name, deg, tol, n) in [("catenoid", 1.0, 0.01, 400), ("two-catenoidal-ends", 2.0, 0.01, 400), ("torus-wp", 4.0, 0.02, 1200)] {
        let d = fx(name).data;
        let (v, dt) = timed(|| curvature_integral(&d, n));
        if ((v - deg) / deg).abs() > tol {
            return Err(format!("{name}: {v} vs {deg}"));
        }
        if dt.as_secs_f64() >= 30.0 {
            return Err(format!("{name}: {:.1} s", dt.as_secs_f64()));
        }
        notes.push(format!("{name} {v:.5}"));
    }
    Ok(notes.join(", "))
}

fn riemann_roch() -> Outcome {
    for f in fixtures::catalogue().unwrap() {
        let d = &f.data;
        let ends = classify_ends(d).map_err(|e| e.to_string())?;
        let sing = singular_points(d).map_err(|e| e.to_string())?;
        let s: i64 = ends.iter().map(|e| e.ord_omega as i64).sum::<i64>() + sing.iter().map(|s| s.order as i64).sum::<i64>();
        if s != -(d.dom.chi() as i64) {
            return Err(format!("{}: sum {s}, chi {}", f.name(), d.dom.chi()));
        }
    }
    Ok("every fixture balances".into())
}

fn oracle_equivalence() -> Outcome {
    let mut checked = 0;
    let mut worst: f64 = 0.0;
    for f in rational_fixtures() {
        let d = &f.data;
        let an = d.analyzer().map_err(|e| e.to_string())?;
        let mut pts: Vec<Point> = d.dom.punctures.clone();
        pts.extend(singular_points(d).map_err(|e| e.to_string())?.into_iter().map(|s| s.point));
        for p in &pts {
            for (label, h) in [("w", &d.omega), ("g w", &d.g_omega)] {
                if h.is_zero() {
                    continue;
                }
                let exact = an.order(h, p, Kind::Form).map_err(|e| e.to_string())?;
                let jet = an.numeric_jet(h, p, 1, Kind::Form).map_err(|e| format!("{} {label} at {p}: {e}", f.name()))?;
                if jet.lead_order != exact {
                    return Err(format!("{} {label} at {p}: order {} vs {exact}", f.name(), jet.lead_order));
                }
                let res_exact = if exact <= -1 {
                    an.jet(h, p, (-exact) as usize, Kind::Form).map_err(|e| e.to_string())?.residue()
                } else {
                    C64::new(0.0, 0.0)
                };
                let res_num = an.residue_numeric(h, p).map_err(|e| e.to_string())?;
                let err = (res_num - res_exact).norm();
                worst = worst.max(err);
                if err > 1e-9 {
                    return Err(format!("{} {label} at {p}: residue {res_num} vs {res_exact}", f.name()));
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} order/residue pairs, worst residue error {worst:.1e}"))
}

fn cross_caps() -> Outcome {
    let mut n = 0;
    for name in ["two-catenoidal-ends", "torus-wp", "singular-m1", "singular-m2", "singular-m3"] {
        let s = singular_points_checked(&fx(name).data, DEFAULT_STEP).map_err(|e| format!("{name}: {e}"))?;
        for r in &s {
            let w = r.whitney.as_ref().ok_or_else(|| format!("{name}: no Whitney result at {}", r.point))?;
            if w.cross_cap != r.cross_cap {
                return Err(format!("{name} at {}: order says {}, Whitney ratio {}", r.point, r.cross_cap, w.ratio));
            }
            n += 1;
        }
    }
    Ok(format!("{n} singular points agree"))
}

fn asymptotics() -> Outcome {
    let mut n = 0;
    for name in ["catenoid", "two-catenoidal-ends", "three-ends", "layered-end"] {
        let d = fx(name).data;
        for e in classify_ends(&d).map_err(|e| e.to_string())? {
            if e.end_type == EndType::Other {
                return Err(format!("{name}: end {} is unclassified", e.point));
            }
            let t = verify_o1(&d, &e.point, &DEFAULT_RADII).map_err(|err| format!("{name} {}: {err}", e.point))?;
            if !t.pass {
                return Err(format!("{name} end {}: deviations {:?}", e.point, t.deviations));
            }
            n += 1;
        }
    }
    Ok(format!("{n} ends"))
}

fn elliptic_layer() -> Outcome {
    let (g2, g3) = invariants();
    if g3.norm() >= 1e-10 {
        return Err(format!("g3 = {g3}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut ode, mut per) = (0.0f64, 0.0f64);
    let mut k = 0;
    while k < 100 {
        let z = C64::new(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0));
        let lattice = [0.0, 1.0].iter().flat_map(|&a| [0.0, 1.0].map(|b| C64::new(a, b)));
        if lattice.into_iter().any(|w| (z - w).norm() < 0.2) {
            continue;
        }
        let (p, pp) = (wp(z).unwrap(), wp_prime(z).unwrap());
        ode = ode.max((pp * pp - 4.0 * p * p * p + g2 * p + g3).norm());
        for w in [C64::new(1.0, 0.0), C64::new(0.0, 1.0)] {
            per = per.max((wp(z + w).unwrap() - p).norm());
        }
        k += 1;
    }
    let half = wp(C64::new(0.5, 0.5)).unwrap().norm();
    if ode >= 1e-8 || per >= 1e-9 || half >= 1e-9 {
        return Err(format!("ODE {ode:.1e}, periodicity {per:.1e}, |wp((1+i)/2)| {half:.1e}"));
    }
    Ok(format!("|g3| {:.1e}, ODE {ode:.1e}, periodicity {per:.1e}, |wp((1+i)/2)| {half:.1e}", g3.norm()))
}

fn omitted() -> Outcome {
    let count = |name: &str| omitted_values(&fx(name).data).map(|o| o.count).map_err(|e| format!("{name}: {e}"));
    if count("catenoid")? != 2 {
        return Err("catenoid does not omit two values".into());
    }
    for m in [2, 3] {
        if count(&format!("enneper-m{m}"))? != 1 {
            return Err(format!("enneper-m{m} does not omit exactly one value"));
        }
    }
    let mut n = 0;
    for f in rational_fixtures() {
        if f.data.g.is_constant() {
            continue;
        }
        let o = omitted_values(&f.data).map_err(|e| e.to_string())?;
        if !o.bound_ok {
            return Err(format!("{}: {} omitted values break the bound", f.name(), o.count));
        }
        n += 1;
    }
    Ok(format!("catenoid 2, enneper-m2/m3 1, bound holds on {n} fixtures"))
}

fn random_domain_point(rng: &mut ChaCha8Rng, d: &WeierstrassData) -> C64 {
    loop {
        let z = C64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        if d.dom.finite_punctures().iter().all(|&p| (z - p).norm() > 0.05) {
            return z;
        }
    }
}

fn surface_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst: f64 = 0.0;
    for f in rational_fixtures() {
        let d = &f.data;
        let exact = SurfaceEvaluator::new(d).map_err(|e| e.to_string())?;
        if exact.strategy() == Strategy::PathIntegral {
            return Err(format!("{}: no closed form", f.name()));
        }
        let path = SurfaceEvaluator::with_strategy(d, Strategy::PathIntegral).map_err(|e| e.to_string())?;
        let both = |z: C64| -> Result<([f64; 3], [f64; 3]), String> {
            Ok((exact.eval(z).map_err(|e| e.to_string())?, path.eval(z).map_err(|e| e.to_string())?))
        };
        // the two strategies fix different base points; compare differences from a common point
        let (a0, b0) = both(random_domain_point(&mut rng, d))?;
        for _ in 0..100 {
            let z = random_domain_point(&mut rng, d);
            let (a, b) = both(z)?;
            let err = (0..3).map(|i| (a[i] - a0[i] - b[i] + b0[i]).abs()).fold(0.0, f64::max);
            worst = worst.max(err);
            if err >= 1e-8 {
                return Err(format!("{} at {z}: {a:?} vs {b:?}", f.name()));
            }
        }
    }
    let cfg = MeshConfig { angles: 48, rings: 12, grid: 24, ..MeshConfig::default() };
    let mut phi_worst: f64 = 0.0;
    for m in 1..=3i32 {
        let mesh = mesh(&fx(&format!("inverse-enneper-m{m}")).data, &cfg).map_err(|e| e.to_string())?;
        let step = (mesh.vertices.len() / 200).max(1);
        for v in mesh.vertices.iter().step_by(step).take(200) {
            let w = C64::new(v[1], v[2]);
            let rho2 = w.norm_sqr();
            let phi = m as f64 * v[0] * rho2.powi(m) + w.powi(m).re;
            let scale = rho2.powi(m).max(1.0) * (1.0 + v[0].abs());
            phi_worst = phi_worst.max(phi.abs() / scale);
            if phi.abs() >= 1e-6 * scale {
                return Err(format!("inverse-enneper-m{m}: Phi = {phi} at {v:?}"));
            }
        }
    }
    Ok(format!("strategy gap {worst:.1e}, relative Phi {phi_worst:.1e}"))
}

fn entire_graphs() -> Outcome {
    let mut n = 0;
    for f in rational_fixtures() {
        let d = &f.data;
        let graph = d.omega.as_rational().is_some_and(|w| w.is_constant() && !w.is_zero())
            && d.dom.punctures.len() == 1
            && d.dom.punctures[0].is_infinity();
        let poly = match &d.g {
            MeroFn::Rational(g) if graph && g.is_polynomial() => g,
            _ => continue,
        };
        let r = osserman_report(d).map_err(|e| e.to_string())?;
        if poly.is_constant() {
            if !r.ineq3.equal {
                return Err(format!("{}: ineq3 {} vs {}", f.name(), r.ineq3.lhs, r.ineq3.rhs));
            }
        } else if !r.ineq1.equal || r.ineq3.lhs <= r.ineq3.rhs {
            return Err(format!("{}: ineq1 equal {}, ineq3 {} vs {}", f.name(), r.ineq1.equal, r.ineq3.lhs, r.ineq3.rhs));
        }
        n += 1;
    }
    if n < 4 {
        return Err(format!("only {n} graph fixtures"));
    }
    Ok(format!("{n} graph fixtures"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("fixture regression", fixture_regression),
        ("Osserman equality matrix", equality_matrix),
        ("degree-curvature identity", degree_curvature),
        ("Riemann-Roch ledger", riemann_roch),
        ("oracle equivalence", oracle_equivalence),
        ("cross-cap agreement", cross_caps),
        ("asymptotics", asymptotics),
        ("elliptic layer", elliptic_layer),
        ("omitted values", omitted),
        ("surface identities", surface_identities),
        ("entire graphs", entire_graphs),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let (out, dt) = timed(run);
        match out {
            Ok(msg) => println!("criterion {:>2} {name:<28} PASS ({:.2} s) {msg}", i + 1, dt.as_secs_f64()),
            Err(msg) => {
                failed += 1;
                println!("criterion {:>2} {name:<28} FAIL ({:.2} s) {msg}", i + 1, dt.as_secs_f64());
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
