use zmc::elliptic::wp;
use zmc::fixtures;
use zmc::surface::{
    evaluate, evaluate_dual, integrate_polyline, mesh, proper_embeddedness_probe, MeshConfig, Strategy, SurfaceEvaluator,
    Verdict,
};
use zmc::wdata::WeierstrassData;
use zmc::C64;

fn data(name: &str) -> WeierstrassData {
    fixtures::load(name).unwrap().data
}

const PTS: [C64; 5] = [
    C64::new(0.3, 0.7),
    C64::new(-1.2, 0.4),
    C64::new(2.1, -1.7),
    C64::new(0.15, -0.6),
    C64::new(-0.4, -0.35),
];

fn diff(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn max_abs(a: [f64; 3]) -> f64 {
    a.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// `f(z) - f(z0)` against an explicit formula.
fn matches_formula(d: &WeierstrassData, formula: impl Fn(C64) -> [f64; 3], pts: &[C64], tol: f64) {
    let z0 = pts[0];
    let (f0, o0) = (evaluate(d, z0).unwrap(), formula(z0));
    for &z in &pts[1..] {
        let got = diff(evaluate(d, z).unwrap(), f0);
        let want = diff(formula(z), o0);
        assert!(max_abs(diff(got, want)) < tol, "{} at {z}: {got:?} vs {want:?}", d.name);
    }
}

#[test]
fn closed_forms() {
    matches_formula(&data("catenoid"), |z| [z.norm().ln(), z.re, z.im], &PTS, 1e-12);
    matches_formula(&data("singular-m1"), |z| [z.re, 0.5 * (z.re * z.re - z.im * z.im), z.re * z.im], &PTS, 1e-12);
    matches_formula(&data("enneper-m2"), |z| [0.5 * (z * z).re, z.re, z.im], &PTS, 1e-12);

    let torus = data("torus-wp");
    let pts = [C64::new(0.1, 0.2), C64::new(0.35, 0.05), C64::new(0.6, 0.3), C64::new(0.2, 0.7)];
    let z0 = pts[0];
    let t0 = evaluate(&torus, z0).unwrap()[0];
    for z in &pts[1..] {
        let t = evaluate(&torus, *z).unwrap()[0] - t0;
        let want = wp(*z).unwrap().norm().ln() - wp(z0).unwrap().norm().ln();
        assert!((t - want).abs() < 1e-9, "{z}: {t} vs {want}");
    }
}

#[test]
fn strategies_agree() {
    for name in ["three-ends", "layered-end", "torus-wp", "torus-wp-quarter"] {
        let d = data(name);
        let exact = SurfaceEvaluator::new(&d).unwrap();
        assert_ne!(exact.strategy(), Strategy::PathIntegral, "{name}");
        let path = SurfaceEvaluator::with_strategy(&d, Strategy::PathIntegral).unwrap();
        let pts: Vec<C64> = if d.dom.is_torus() {
            vec![C64::new(0.1, 0.2), C64::new(0.35, 0.05), C64::new(0.6, 0.3), C64::new(0.2, 0.7)]
        } else {
            PTS.to_vec()
        };
        let (a0, b0) = (exact.eval(pts[0]).unwrap(), path.eval(pts[0]).unwrap());
        for &z in &pts[1..] {
            let gap = diff(diff(exact.eval(z).unwrap(), a0), diff(path.eval(z).unwrap(), b0));
            assert!(max_abs(gap) < 1e-8, "{name} at {z}: {gap:?}");
        }
    }
}

#[test]
fn eval_many_keeps_order() {
    let d = data("three-ends");
    let ev = SurfaceEvaluator::new(&d).unwrap();
    let many = ev.eval_many(&PTS).unwrap();
    for (z, v) in PTS.iter().zip(&many) {
        assert_eq!(*v, ev.eval(*z).unwrap());
    }
}

#[test]
fn dual_surface() {
    for name in ["catenoid", "enneper-m2", "singular-m2"] {
        let d = data(name);
        let dual = d.dual_data().unwrap();
        // the dual is built with (g*, 1, +i), the data path with (g, 1, -i)
        let z0 = PTS[0];
        let (a0, b0) = (evaluate_dual(&d, z0).unwrap(), evaluate(&dual, z0).unwrap());
        for &z in &PTS[1..] {
            let a = diff(evaluate_dual(&d, z).unwrap(), a0);
            let b = diff(evaluate(&dual, z).unwrap(), b0);
            let b = [b[0], b[1], -b[2]];
            assert!(max_abs(diff(a, b)) < 1e-9 * max_abs(a).max(1.0), "{name} at {z}: {a:?} vs {b:?}");
        }
    }
    // graph formula f* = (Re(g g*) - f⁰, Re g, -Im g) with g* = z for the catenoid
    let d = data("catenoid");
    let z0 = PTS[0];
    let formula = |z: C64| [(z / z).re - z.norm().ln(), (1.0 / z).re, -(1.0 / z).im];
    for &z in &PTS[1..] {
        let got = diff(evaluate_dual(&d, z).unwrap(), evaluate_dual(&d, z0).unwrap());
        let want = diff(formula(z), formula(z0));
        assert!(max_abs(diff(got, want)) < 1e-12, "{got:?} vs {want:?}");
    }
    assert!(evaluate_dual(&data("plane"), z0).is_err());
}

#[test]
fn path_independence() {
    let d = data("three-ends");
    let (a, b) = (C64::new(-0.5, 0.2), C64::new(1.8, 0.9));
    let p1 = integrate_polyline(&d, &[a, C64::new(0.5, 0.5), b]).unwrap();
    let p2 = integrate_polyline(&d, &[a, C64::new(-0.3, 1.8), C64::new(1.5, 1.8), b]).unwrap();
    assert!(max_abs(diff(p1, p2)) < 1e-9, "{p1:?} vs {p2:?}");

    // a loop around each puncture; g w has residue there but a real one
    for (name, c) in [("catenoid", C64::new(0.0, 0.0)), ("three-ends", C64::new(1.0, 0.0)), ("three-ends", C64::new(0.0, 0.0))] {
        let d = data(name);
        let r = 0.3;
        let square = [c + C64::new(r, -r), c + C64::new(r, r), c + C64::new(-r, r), c + C64::new(-r, -r), c + C64::new(r, -r)];
        let loop_f = integrate_polyline(&d, &square).unwrap();
        assert!(max_abs(loop_f) < 1e-9, "{name} around {c}: {loop_f:?}");
    }
}

fn laplacian(u: impl Fn(C64) -> f64, z: C64, h: f64) -> f64 {
    let at = |a: f64, b: f64| u(z + C64::new(a * h, b * h));
    let edges = at(1.0, 0.0) + at(-1.0, 0.0) + at(0.0, 1.0) + at(0.0, -1.0);
    let corners = at(1.0, 1.0) + at(1.0, -1.0) + at(-1.0, 1.0) + at(-1.0, -1.0);
    (4.0 * edges + corners - 20.0 * u(z)) / (6.0 * h * h)
}

#[test]
fn harmonic_and_conformal() {
    for name in ["catenoid", "two-catenoidal-ends", "three-ends", "layered-end", "inverse-enneper-m2"] {
        let d = data(name);
        let ev = SurfaceEvaluator::new(&d).unwrap();
        let f = |z: C64| ev.eval(z).unwrap();
        for &z in &PTS {
            let scale = max_abs(f(z)).max(1.0);
            for i in 0..3 {
                let lap = laplacian(|w| f(w)[i], z, 5e-3);
                assert!(lap.abs() < 1e-6 * scale, "{name} component {i} at {z}: {lap}");
            }
            let h = 1e-5;
            let (fu, fv): (Vec<f64>, Vec<f64>) = (0..3)
                .map(|i| {
                    let du = (f(z + h)[i] - f(z - h)[i]) / (2.0 * h);
                    let dv = (f(z + C64::new(0.0, h))[i] - f(z - C64::new(0.0, h))[i]) / (2.0 * h);
                    (du, dv)
                })
                .unzip();
            // degenerate metric: only the x and y components count
            let e = fu[1] * fu[1] + fu[2] * fu[2];
            let g = fv[1] * fv[1] + fv[2] * fv[2];
            let fm = fu[1] * fv[1] + fu[2] * fv[2];
            let s = e.max(1.0);
            assert!((e - g).abs() < 1e-8 * s && fm.abs() < 1e-8 * s, "{name} at {z}: {e} {g} {fm}");
            let w2 = d.omega.eval(z).unwrap().norm_sqr();
            assert!((e - w2).abs() < 1e-8 * s);
        }
    }
}

#[test]
fn mesh_is_deterministic() {
    let cfg = MeshConfig { angles: 24, rings: 6, grid: 12, ..MeshConfig::default() };
    for name in ["two-catenoidal-ends", "torus-wp"] {
        let d = data(name);
        let a = mesh(&d, &cfg).unwrap();
        let b = mesh(&d, &cfg).unwrap();
        assert_eq!(a.to_obj(), b.to_obj());
        assert!(a.faces.iter().flatten().all(|&i| i < a.vertices.len()));
        assert!(a.vertices.iter().flatten().all(|x| x.is_finite()));
        let obj = a.to_obj();
        assert!(obj.contains(&format!("# config sha256 {}", cfg.hash())));
        assert_eq!(obj.lines().filter(|l| l.starts_with("# singular")).count(), a.markers.len());
    }
    let other = MeshConfig { angles: 25, ..cfg.clone() };
    assert_ne!(cfg.hash(), other.hash());
}

#[test]
fn catenoid_mesh_spans_log_radii() {
    let cfg = MeshConfig { angles: 16, rings: 8, grid: 8, ..MeshConfig::default() };
    let m = mesh(&data("catenoid"), &cfg).unwrap();
    let (lo, hi) = m.t_range();
    assert!((lo - cfg.rmin.ln()).abs() < 1e-9 + 1e-3, "{lo}");
    assert!((hi - cfg.rmax.ln()).abs() < 1e-9 + 1e-3, "{hi}");
}

#[test]
fn embeddedness_probe() {
    for name in ["catenoid", "two-catenoidal-ends", "three-ends", "torus-wp", "torus-wp-quarter"] {
        let r = proper_embeddedness_probe(&data(name), 0.05).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{name}: {:?}", r.notes);
    }
    for name in ["layered-end", "singular-m2", "double-catenoid"] {
        let r = proper_embeddedness_probe(&data(name), 0.05).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive, "{name}");
    }
}
