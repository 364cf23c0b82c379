use zmc::ends::{asymptotic_model, classify_end, classify_ends, verify_o1, EndType, DEFAULT_RADII};
use zmc::fixtures;
use zmc::localanalysis::degree_numeric;
use zmc::osserman::{map_degree, omitted_values, osserman_report};
use zmc::sing::{singular_points, whitney_check, whitney_delta, DEFAULT_STEP};
use zmc::{Point, C64};

fn data(name: &str) -> zmc::wdata::WeierstrassData {
    fixtures::load(name).unwrap().data
}

fn term(terms: &[(i32, [f64; 2])], n: i32) -> [f64; 2] {
    terms.iter().find(|(k, _)| *k == n).map(|(_, c)| *c).unwrap_or([0.0, 0.0])
}

#[test]
fn catenoid_ends() {
    let d = data("catenoid");
    assert_eq!(classify_end(&d, &Point::Infinity).unwrap().end_type, EndType::ExpandingCatenoidal);
    assert_eq!(classify_end(&d, &Point::exact(0, 0)).unwrap().end_type, EndType::ShrinkingCatenoidal);
}

#[test]
fn asymptotic_models() {
    // (log r, r cos θ, r sin θ) at 0
    let m = asymptotic_model(&data("catenoid"), &Point::exact(0, 0)).unwrap();
    assert_eq!(m.log_coeff, 1.0);
    assert_eq!(term(&m.xy_terms, 1), [1.0, 0.0]);
    assert!(m.t_terms.iter().all(|(_, c)| c == &[0.0, 0.0]));

    // ½ Re z² in the chart t = 1/z
    let m = asymptotic_model(&data("enneper-m2"), &Point::Infinity).unwrap();
    assert_eq!(m.end_type, EndType::EnneperParabolic);
    assert!((term(&m.t_terms, -2)[0] - 0.5).abs() < 1e-15);
    assert_eq!(m.log_coeff, 0.0);

    let m = asymptotic_model(&data("three-ends"), &Point::exact(1, 0)).unwrap();
    assert!((m.log_coeff - 1.0).abs() < 1e-15);
}

#[test]
fn o1_tables() {
    let t = verify_o1(&data("catenoid"), &Point::exact(0, 0), &[0.1, 0.01, 0.001]).unwrap();
    assert!(t.pass);
    assert!(t.deviations.iter().all(|&d| d < 1e-12), "{:?}", t.deviations);

    for (name, p) in [("two-catenoidal-ends", Point::Infinity), ("layered-end", Point::exact(1, 0))] {
        let t = verify_o1(&data(name), &p, &DEFAULT_RADII).unwrap();
        assert!(t.pass, "{name}: {:?}", t.deviations);
        assert!(*t.deviations.last().unwrap() < 1e-3 * t.scale);
        assert!(t.deviations.windows(2).all(|w| w[1] <= w[0] + 1e-9 * t.scale));
    }
}

#[test]
fn validated_ends_never_have_a_simple_pole() {
    for f in fixtures::catalogue().unwrap() {
        for e in classify_ends(&f.data).unwrap() {
            assert_ne!(e.ord_omega, -1, "{} at {}", f.name(), e.point);
        }
    }
}

#[test]
fn duality_swaps_catenoidal_ends() {
    let mut checked = 0;
    for f in fixtures::catalogue().unwrap() {
        let d = &f.data;
        if !d.is_rational() || d.g.is_constant() {
            continue;
        }
        let dual = d.dual_data().unwrap();
        // duals often pick up a common zero of g* and dg or a removable puncture
        if !dual.validate().unwrap().ok() {
            continue;
        }
        for e in classify_ends(d).unwrap() {
            let de = classify_end(&dual, &e.point).unwrap();
            let want = match e.end_type {
                EndType::ExpandingCatenoidal => EndType::ShrinkingCatenoidal,
                EndType::ShrinkingCatenoidal => EndType::ExpandingCatenoidal,
                EndType::EnneperParabolic => EndType::EnneperParabolic,
                _ => continue,
            };
            assert_eq!(de.end_type, want, "{} at {}", f.name(), e.point);
            checked += 1;
        }
    }
    assert!(checked >= 3, "{checked}");
}

#[test]
fn whitney_examples() {
    let d = data("two-catenoidal-ends");
    for q in [C64::new(1.0, 0.0), C64::new(-1.0, 0.0)] {
        let w = whitney_check(&d, q, DEFAULT_STEP).unwrap();
        assert!(w.cross_cap);
        let gw = d.g_omega.eval(q).unwrap().norm();
        let closed = whitney_delta(&d, q).unwrap() * gw.powi(5);
        assert!((w.det.abs() / closed - 1.0).abs() < 0.1, "{} vs {closed}", w.det);
    }
    // |d(1/g)/(g w)|² at 1 for g = z/(z²-1), w = (z²-1)/z² dz
    assert!((whitney_delta(&d, C64::new(1.0, 0.0)).unwrap() - 4.0).abs() < 1e-12);

    let w = whitney_check(&data("singular-m2"), C64::new(0.0, 0.0), DEFAULT_STEP).unwrap();
    assert!(!w.cross_cap);
    assert!(w.ratio < DEFAULT_STEP * DEFAULT_STEP);
    let w = whitney_check(&data("singular-m1"), C64::new(0.0, 0.0), DEFAULT_STEP).unwrap();
    assert!(w.cross_cap);
    assert!(w.ratio > 10.0 * DEFAULT_STEP);
}

#[test]
fn singular_points_avoid_punctures() {
    for f in fixtures::catalogue().unwrap() {
        for s in singular_points(&f.data).unwrap() {
            assert!(!f.data.dom.is_puncture(&s.point, 1e-6), "{} at {}", f.name(), s.point);
            assert_eq!(s.cross_cap, s.order == 1);
        }
    }
}

#[test]
fn inequality_tables() {
    let r = osserman_report(&data("two-catenoidal-ends")).unwrap();
    assert_eq!((r.deg_g.value, r.deg_gstar.value, r.n, r.k, r.chi), (2, 2, 2, 2, 2));
    assert_eq!((r.ineq1.lhs, r.ineq1.rhs), (4, 4));
    assert_eq!((r.ineq2.lhs, r.ineq2.rhs), (4, 4));
    assert_eq!((r.ineq3.lhs, r.ineq3.rhs), (2, 2));

    let r = osserman_report(&data("layered-end")).unwrap();
    assert_eq!((r.deg_g.value, r.deg_gstar.value, r.n, r.k, r.chi), (3, 2, 3, 2, 2));
    assert_eq!(r.singular_orders, vec![1]);
    assert_eq!((r.ineq1.lhs, r.ineq1.rhs), (5, 4));
    assert_eq!((r.ineq2.lhs, r.ineq2.rhs), (5, 4));
    assert_eq!((r.ineq3.lhs, r.ineq3.rhs), (3, 3));

    // the two three-ended examples share n, k and deg g
    let a = osserman_report(&data("three-ends")).unwrap();
    assert_eq!((a.n, a.k, a.deg_g.value), (r.n, r.k, r.deg_g.value));

    let q = osserman_report(&data("torus-wp-quarter")).unwrap();
    assert_eq!((q.n, q.k, q.chi), (4, 2, 0));
    assert_eq!(q.ineq3.rhs, 6);
    assert!((q.deg_g.numeric.unwrap() - 6.0).abs() < 0.05);
    assert!(q.ineq3.equal);
}

#[test]
fn omitted_value_bound() {
    let o = omitted_values(&data("three-ends")).unwrap();
    assert!(o.count <= 2);
    assert!(o.count as f64 <= 3.0 - 2.0 / 3.0);
    assert!(o.bound_ok);
    assert!(omitted_values(&data("plane")).is_err());
    assert!(omitted_values(&data("torus-wp")).is_err());
}

#[test]
fn numeric_degree_matches_exact() {
    for f in fixtures::catalogue().unwrap() {
        let d = &f.data;
        if !d.is_rational() || d.g.is_constant() {
            continue;
        }
        let exact = map_degree(&d.g, d).unwrap().value;
        let num = degree_numeric(&d.g, &d.dom).unwrap();
        assert_eq!(num.degree, exact, "{}: {}", f.name(), num.value);
    }
}
