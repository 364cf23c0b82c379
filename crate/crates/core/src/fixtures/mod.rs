//! Fixture catalogue: Weierstrass data with expected invariants, stored as
//! TOML and embedded in the library.

pub mod expr;

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::ends::{EndType, Growth};
use crate::localanalysis::{DomainKind, DomainSpec, MeroFn};
use crate::wdata::{ClosedForm, WeierstrassData};
use crate::{Error, Point, Result};

use expr::{parse, parse_point, to_mero, to_rational, Constants};

const BUILTIN: &[(&str, &str)] = &[
    ("plane", include_str!("../../fixtures/plane.toml")),
    ("enneper-m1", include_str!("../../fixtures/enneper-m1.toml")),
    ("enneper-m2", include_str!("../../fixtures/enneper-m2.toml")),
    ("enneper-m3", include_str!("../../fixtures/enneper-m3.toml")),
    ("catenoid", include_str!("../../fixtures/catenoid.toml")),
    ("singular-m1", include_str!("../../fixtures/singular-m1.toml")),
    ("singular-m2", include_str!("../../fixtures/singular-m2.toml")),
    ("singular-m3", include_str!("../../fixtures/singular-m3.toml")),
    ("inverse-enneper-m1", include_str!("../../fixtures/inverse-enneper-m1.toml")),
    ("inverse-enneper-m2", include_str!("../../fixtures/inverse-enneper-m2.toml")),
    ("inverse-enneper-m3", include_str!("../../fixtures/inverse-enneper-m3.toml")),
    ("two-catenoidal-ends", include_str!("../../fixtures/two-catenoidal-ends.toml")),
    ("three-ends", include_str!("../../fixtures/three-ends.toml")),
    ("layered-end", include_str!("../../fixtures/layered-end.toml")),
    ("double-catenoid", include_str!("../../fixtures/double-catenoid.toml")),
    ("torus-wp", include_str!("../../fixtures/torus-wp.toml")),
    ("torus-wp-quarter", include_str!("../../fixtures/torus-wp-quarter.toml")),
];

/// Fixture file layout.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixtureFile {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub domain: DomainKind,
    pub punctures: Vec<String>,
    pub g: String,
    pub omega: String,
    /// Explicit `g w`, for carriers where the product cancels poles against zeros.
    #[serde(default)]
    pub gomega: Option<String>,
    /// Named constants; each may refer to the others.
    #[serde(default)]
    pub constants: BTreeMap<String, String>,
    #[serde(default)]
    pub closed_form: Option<ClosedFormFile>,
    #[serde(default)]
    pub expected: Option<Expected>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClosedFormFile {
    pub f0_log_abs: Option<String>,
    pub gstar: String,
}

/// Expected invariants; `source` records where a value comes from:
/// `reference` for the worked examples, `derived:<how>` otherwise.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expected {
    pub source: String,
    pub degree_g: u32,
    pub degree_gstar: Option<u32>,
    pub n: usize,
    pub k: usize,
    pub chi: i32,
    /// Equality in the three inequalities.
    pub equalities: [bool; 3],
    /// Omitted values of `g`, when computed.
    #[serde(default)]
    pub omitted: Option<Vec<String>>,
    #[serde(default)]
    pub ends: Vec<ExpectedEnd>,
    #[serde(default)]
    pub singular: Vec<ExpectedSingular>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectedEnd {
    pub point: String,
    #[serde(rename = "type")]
    pub end_type: EndType,
    pub growth: Growth,
    pub embedded: bool,
    pub ord_omega: i32,
    #[serde(default)]
    pub layered_family: bool,
    pub source: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectedSingular {
    pub point: String,
    pub order: u32,
    pub cross_cap: bool,
    pub source: String,
}

/// A parsed fixture with its Weierstrass data.
#[derive(Clone, Debug)]
pub struct Fixture {
    pub file: FixtureFile,
    pub constants: Constants,
    pub data: WeierstrassData,
}

impl Fixture {
    pub fn name(&self) -> &str {
        &self.file.name
    }

    pub fn expected(&self) -> Option<&Expected> {
        self.file.expected.as_ref()
    }

    /// Parse a point written in the fixture, using its constants.
    pub fn point(&self, s: &str) -> Result<Point> {
        parse_point(s, &self.constants)
    }
}

/// Names of the built-in fixtures in catalogue order.
pub fn names() -> Vec<&'static str> {
    BUILTIN.iter().map(|(n, _)| *n).collect()
}

/// Every built-in fixture.
pub fn catalogue() -> Result<Vec<Fixture>> {
    BUILTIN.iter().map(|(_, src)| from_toml_str(src)).collect()
}

/// A built-in fixture by name.
pub fn load(name: &str) -> Result<Fixture> {
    let (_, src) = BUILTIN
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::Parse(format!("unknown fixture '{name}'")))?;
    from_toml_str(src)
}

/// A built-in name, or else a path to a fixture file.
pub fn load_any(name_or_path: &str) -> Result<Fixture> {
    if BUILTIN.iter().any(|(n, _)| *n == name_or_path) {
        return load(name_or_path);
    }
    from_path(name_or_path)
}

pub fn from_path(path: impl AsRef<Path>) -> Result<Fixture> {
    let p = path.as_ref();
    let src = std::fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
    from_toml_str(&src)
}

pub fn from_toml_str(src: &str) -> Result<Fixture> {
    let file: FixtureFile = toml::from_str(src).map_err(|e| Error::Parse(e.to_string()))?;
    let constants = constants_of(&file.constants)?;
    let data = build(&file, &constants)?;
    Ok(Fixture { file, constants, data })
}

/// Resolve constants in dependency order by repeated passes.
fn constants_of(decls: &BTreeMap<String, String>) -> Result<Constants> {
    let mut done = Constants::new();
    let mut pending: Vec<(&String, &String)> = decls.iter().collect();
    while !pending.is_empty() {
        let before = pending.len();
        let mut last_err = None;
        pending.retain(|(name, src)| {
            match resolve_with(&done, name, src) {
                Ok(v) => {
                    done.insert((*name).clone(), v);
                    false
                }
                Err(e) => {
                    last_err = Some(e);
                    true
                }
            }
        });
        if pending.len() == before {
            return Err(last_err.expect("failed constant"));
        }
    }
    Ok(done)
}

fn resolve_with(done: &Constants, name: &String, src: &String) -> Result<expr::ConstValue> {
    let ast = parse(src)?;
    let exact = to_rational(&ast, done).ok().filter(|r| r.is_constant());
    if let Some(r) = exact {
        return Ok(expr::ConstValue::Exact(r.num().coeff(0)));
    }
    match to_mero(&ast, done)? {
        crate::elliptic::MeroExpr::Const(c) => Ok(expr::ConstValue::Float(c)),
        _ => Err(Error::Parse(format!("constant '{name}' depends on z"))),
    }
}

fn build(file: &FixtureFile, consts: &Constants) -> Result<WeierstrassData> {
    let punctures = file
        .punctures
        .iter()
        .map(|s| parse_point(s, consts))
        .collect::<Result<Vec<_>>>()?;
    let carrier = |s: &str| -> Result<MeroFn> {
        let ast = parse(s)?;
        Ok(match file.domain {
            DomainKind::Sphere => MeroFn::Rational(to_rational(&ast, consts)?),
            DomainKind::Torus => MeroFn::Elliptic(to_mero(&ast, consts)?),
        })
    };
    let dom = match file.domain {
        DomainKind::Sphere => DomainSpec::sphere(punctures),
        DomainKind::Torus => {
            if punctures.iter().any(Point::is_infinity) {
                return Err(Error::Parse("the torus has no point at infinity".into()));
            }
            DomainSpec::torus(punctures)
        }
    };
    let g = carrier(&file.g)?;
    let omega = carrier(&file.omega)?;
    let closed_form = match &file.closed_form {
        Some(c) => Some(ClosedForm {
            f0_log_abs: c.f0_log_abs.as_deref().map(carrier).transpose()?,
            gstar: carrier(&c.gstar)?,
        }),
        None => None,
    };
    match &file.gomega {
        Some(s) => {
            let gw = carrier(s)?;
            WeierstrassData::with_g_omega(file.name.clone(), dom, g, omega, gw, closed_form)
        }
        None if closed_form.is_none() => WeierstrassData::new(file.name.clone(), dom, g, omega),
        None => {
            let gw = WeierstrassData::new(file.name.clone(), dom.clone(), g.clone(), omega.clone())?.g_omega;
            WeierstrassData::with_g_omega(file.name.clone(), dom, g, omega, gw, closed_form)
        }
    }
}

/// Outcome of comparing one fixture's computed invariants with its expectations.
#[derive(Clone, Debug, Serialize)]
pub struct FixtureCheck {
    pub name: String,
    pub validated: bool,
    pub mismatches: Vec<String>,
    pub report: Option<crate::osserman::OssermanReport>,
}

impl FixtureCheck {
    pub fn ok(&self) -> bool {
        self.validated && self.mismatches.is_empty()
    }
}

/// Compare ends, singular points, degrees, equality flags and omitted values.
/// Numerical failures are returned as errors, disagreements as mismatches.
pub fn check_fixture(fx: &Fixture) -> Result<FixtureCheck> {
    let name = fx.name().to_string();
    let v = fx.data.validate()?;
    if !v.ok() {
        return Ok(FixtureCheck { name, validated: false, mismatches: vec!["validation failed".into()], report: None });
    }
    let report = crate::osserman::osserman_report(&fx.data)?;
    let mut bad = Vec::new();
    let Some(exp) = fx.expected() else {
        return Ok(FixtureCheck { name, validated: true, mismatches: bad, report: Some(report) });
    };
    let mut cmp = |what: &str, want: String, got: String| {
        if want != got {
            bad.push(format!("{what}: expected {want}, computed {got}"));
        }
    };
    cmp("n", exp.n.to_string(), report.n.to_string());
    cmp("k", exp.k.to_string(), report.k.to_string());
    cmp("chi", exp.chi.to_string(), report.chi.to_string());
    cmp("deg g", exp.degree_g.to_string(), report.deg_g.value.to_string());
    if let Some(d) = exp.degree_gstar {
        cmp("deg g*", d.to_string(), report.deg_gstar.value.to_string());
    }
    let eq = [report.ineq1.equal, report.ineq2.equal, report.ineq3.equal];
    cmp("equalities", format!("{:?}", exp.equalities), format!("{eq:?}"));
    cmp("end count", exp.ends.len().to_string(), report.ends.len().to_string());
    for e in &exp.ends {
        let p = fx.point(&e.point)?;
        match report.ends.iter().find(|r| fx.data.dom.same_point(&r.point, &p, 1e-9)) {
            None => cmp("end", e.point.clone(), "missing".into()),
            Some(r) => {
                let w = format!("{:?} {:?} {} {} {}", e.end_type, e.growth, e.embedded, e.ord_omega, e.layered_family);
                let g = format!("{:?} {:?} {} {} {}", r.end_type, r.growth, r.embedded, r.ord_omega, r.layered_family);
                cmp(&format!("end {}", e.point), w, g);
            }
        }
    }
    cmp("singular count", exp.singular.len().to_string(), report.singular.len().to_string());
    for s in &exp.singular {
        let p = fx.point(&s.point)?;
        match report.singular.iter().find(|r| fx.data.dom.same_point(&r.point, &p, 1e-7)) {
            None => cmp("singular point", s.point.clone(), "missing".into()),
            Some(r) => cmp(
                &format!("singular {}", s.point),
                format!("{} {}", s.order, s.cross_cap),
                format!("{} {}", r.order, r.cross_cap),
            ),
        }
    }
    if let Some(want) = &exp.omitted {
        match &report.omitted {
            None => cmp("omitted", format!("{want:?}"), "not computed".into()),
            Some(o) => {
                let pts = want.iter().map(|w| fx.point(w)).collect::<Result<Vec<_>>>()?;
                let same = o.count == pts.len() && pts.iter().all(|p| o.values.iter().any(|v| v.same(p, 1e-9)));
                let got: Vec<String> = o.values.iter().map(|v| v.to_string()).collect();
                if !same {
                    cmp("omitted", format!("{want:?}"), format!("{got:?}"));
                }
            }
        }
    }
    if !report.ok() {
        bad.push("inequality, equality prediction, Riemann-Roch or omitted-value check failed".into());
    }
    Ok(FixtureCheck { name, validated: true, mismatches: bad, report: Some(report) })
}
