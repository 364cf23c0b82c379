use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use zmc::ends::{classify_ends, verify_o1, EndType, DEFAULT_RADII};
use zmc::fixtures::{self, Fixture, FixtureCheck};
use zmc::osserman::osserman_report;
use zmc::report::{CheckResult, ClassifyResult, ReportDocument};
use zmc::sing::{singular_points_checked, DEFAULT_STEP};
use zmc::surface::{mesh, proper_embeddedness_probe, MeshConfig};
use zmc::Error;

const EXIT_INPUT: u8 = 2;
const EXIT_MISMATCH: u8 = 3;
const EXIT_NUMERIC: u8 = 4;

#[derive(Parser)]
#[command(name = "zmc", version, about = "Zero-mean-curvature surfaces in isotropic 3-space from Weierstrass data")]
struct Cli {
    /// Write a JSON report document to stdout.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate compatibility, periods and ends.
    Check { src: String },
    /// Classify ends and singular points.
    Classify {
        src: String,
        /// Finite-difference step of the Whitney check.
        #[arg(long, default_value_t = DEFAULT_STEP)]
        whitney_step: f64,
        /// Local collar radius for the embeddedness probe.
        #[arg(long, default_value_t = 0.05)]
        probe_bound: f64,
    },
    /// Degrees, the three inequalities, Riemann-Roch and omitted values.
    Osserman { src: String },
    /// Write an OBJ mesh of the surface.
    Mesh {
        src: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        rmin: f64,
        #[arg(long, default_value_t = 20.0)]
        rmax: f64,
        #[arg(long, default_value_t = 96)]
        angles: usize,
        #[arg(long, default_value_t = 32)]
        rings: usize,
        #[arg(long, default_value_t = 64)]
        grid: usize,
    },
    /// The built-in fixture catalogue.
    Fixtures {
        #[command(subcommand)]
        action: FixturesAction,
    },
}

#[derive(Subcommand)]
enum FixturesAction {
    List,
    RunAll,
}

/// Failure carrying its exit code.
struct Fail(u8, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Fail {
        let code = match e {
            Error::Parse(_)
            | Error::Io(_)
            | Error::NotValidated(_)
            | Error::ZeroDenominator
            | Error::ZeroFunction
            | Error::UnsupportedType(_)
            | Error::DegenerateDual(_)
            | Error::ConstantGauss => EXIT_INPUT,
            _ => EXIT_NUMERIC,
        };
        Fail(code, e.to_string())
    }
}

fn mismatch(msg: String) -> Fail {
    Fail(EXIT_MISMATCH, format!("THEOREM CHECK MISMATCH (a bug or a counterexample): {msg}"))
}

fn emit<T: Serialize>(json: bool, command: &str, source: Option<&str>, result: &T, start: Instant, text: impl FnOnce()) {
    if json {
        let doc = ReportDocument::new(command, source.map(String::from), result, start.elapsed());
        println!("{}", serde_json::to_string_pretty(&doc).expect("serializable report"));
    } else {
        text();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("ZMC_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail(code, msg)) => {
            eprintln!("zmc: {msg}");
            ExitCode::from(code)
        }
    }
}

fn load(src: &str) -> Result<Fixture, Fail> {
    Ok(fixtures::load_any(src)?)
}

fn run(cli: &Cli) -> Result<(), Fail> {
    let start = Instant::now();
    let json = cli.json;
    match &cli.command {
        Command::Check { src } => {
            let fx = load(src)?;
            let v = fx.data.validate()?.clone();
            let res = CheckResult {
                name: fx.name().to_string(),
                domain: fx.file.domain,
                punctures: fx.data.dom.punctures.clone(),
                g: fx.file.g.clone(),
                omega: fx.file.omega.clone(),
                validation: v.clone(),
            };
            emit(json, "check", Some(src), &res, start, || {
                println!("{}: compatibility {}, periods {}, ends {}", res.name, v.compat_ok, v.period_ok, v.ends_ok);
            });
            if !v.ok() {
                return Err(Fail(EXIT_INPUT, format!("{} does not validate", res.name)));
            }
        }
        Command::Classify { src, whitney_step, probe_bound } => {
            let fx = load(src)?;
            let d = &fx.data;
            let validation = d.validate()?.clone();
            d.ensure_valid()?;
            let ends = classify_ends(d)?;
            let asymptotics = ends
                .iter()
                .filter(|e| e.end_type != EndType::Other)
                .map(|e| verify_o1(d, &e.point, &DEFAULT_RADII))
                .collect::<zmc::Result<Vec<_>>>()?;
            let singular = singular_points_checked(d, *whitney_step)?;
            let probe = proper_embeddedness_probe(d, *probe_bound).ok();
            let res = ClassifyResult { name: fx.name().to_string(), validation, ends, asymptotics, singular, probe };
            emit(json, "classify", Some(src), &res, start, || {
                println!("{}", res.name);
                for e in &res.ends {
                    let layered = if e.layered_family { " (layered family)" } else { "" };
                    println!(
                        "  end {}: {}{}, ord w = {}, {}",
                        e.point,
                        e.end_type,
                        layered,
                        e.ord_omega,
                        if e.embedded { "embedded" } else { "not embedded" }
                    );
                }
                for t in &res.asymptotics {
                    println!("  O(1) at {}: {}", t.point, if t.pass { "PASS" } else { "FAIL" });
                }
                for s in &res.singular {
                    let w = s.whitney.as_ref().map(|w| w.cross_cap);
                    println!("  singular {}: order {}, cross cap {}, Whitney {:?}", s.point, s.order, s.cross_cap, w);
                }
                if let Some(p) = &res.probe {
                    println!("  embeddedness probe: {:?}", p.verdict);
                }
            });
            if let Some(t) = res.asymptotics.iter().find(|t| !t.pass) {
                return Err(mismatch(format!("end {} does not approach its asymptotic model", t.point)));
            }
            if let Some(s) = res.singular.iter().find(|s| s.whitney.as_ref().is_some_and(|w| w.cross_cap != s.cross_cap)) {
                return Err(mismatch(format!("order and Whitney criteria disagree at {}", s.point)));
            }
        }
        Command::Osserman { src } => {
            let fx = load(src)?;
            let r = osserman_report(&fx.data)?;
            emit(json, "osserman", Some(src), &r, start, || {
                println!("{}: n = {}, k = {}, chi = {}", r.name, r.n, r.k, r.chi);
                println!("  deg g = {}, deg g* = {}, singular orders {:?}", r.deg_g.value, r.deg_gstar.value, r.singular_orders);
                for (i, q) in [&r.ineq1, &r.ineq2, &r.ineq3].iter().enumerate() {
                    let rel = if q.equal { "=" } else if q.holds { ">" } else { "<" };
                    println!("  inequality {}: {} {} {} (equality predicted: {})", i + 1, q.lhs, rel, q.rhs, q.predicted_equal);
                }
                println!("  Riemann-Roch: {} (sum {})", r.riemann_roch_ok, r.riemann_roch_sum);
                if let Some(o) = &r.omitted {
                    let v: Vec<String> = o.values.iter().map(|p| p.to_string()).collect();
                    println!("  omitted values: {} {:?}, bound {}", o.count, v, o.bound_ok);
                }
            });
            if !r.ok() {
                return Err(mismatch(format!("{}: inequalities or equality predictions do not match", r.name)));
            }
        }
        Command::Mesh { src, out, rmin, rmax, angles, rings, grid } => {
            let fx = load(src)?;
            let cfg = MeshConfig { rmin: *rmin, rmax: *rmax, angles: *angles, rings: *rings, grid: *grid };
            let m = mesh(&fx.data, &cfg)?;
            std::fs::write(out, m.to_obj()).map_err(|e| Fail(EXIT_INPUT, format!("{}: {e}", out.display())))?;
            #[derive(Serialize)]
            struct MeshSummary {
                out: String,
                vertices: usize,
                faces: usize,
                t_range: (f64, f64),
                config_sha256: String,
                markers: Vec<zmc::surface::Marker>,
            }
            let s = MeshSummary {
                out: out.display().to_string(),
                vertices: m.vertices.len(),
                faces: m.faces.len(),
                t_range: m.t_range(),
                config_sha256: cfg.hash(),
                markers: m.markers.clone(),
            };
            emit(json, "mesh", Some(src), &s, start, || {
                println!("{}: {} vertices, {} faces, t in [{}, {}] -> {}", fx.name(), s.vertices, s.faces, s.t_range.0, s.t_range.1, s.out);
            });
        }
        Command::Fixtures { action: FixturesAction::List } => {
            let all = fixtures::catalogue()?;
            #[derive(Serialize)]
            struct Entry {
                name: String,
                domain: zmc::localanalysis::DomainKind,
                g: String,
                omega: String,
                description: String,
            }
            let list: Vec<Entry> = all
                .iter()
                .map(|f| Entry {
                    name: f.name().to_string(),
                    domain: f.file.domain,
                    g: f.file.g.clone(),
                    omega: f.file.omega.clone(),
                    description: f.file.description.clone(),
                })
                .collect();
            emit(json, "fixtures list", None, &list, start, || {
                for e in &list {
                    println!("{:<22} {:<6} g = {}, w = ({}) dz", e.name, format!("{:?}", e.domain).to_lowercase(), e.g, e.omega);
                }
            });
        }
        Command::Fixtures { action: FixturesAction::RunAll } => {
            let all = fixtures::catalogue()?;
            let results: Vec<Result<FixtureCheck, (String, Error)>> = all
                .par_iter()
                .map(|f| fixtures::check_fixture(f).map_err(|e| (f.name().to_string(), e)))
                .collect();
            #[derive(Serialize)]
            struct Row {
                name: String,
                ok: bool,
                mismatches: Vec<String>,
                error: Option<String>,
            }
            let rows: Vec<Row> = results
                .iter()
                .map(|r| match r {
                    Ok(c) => Row { name: c.name.clone(), ok: c.ok(), mismatches: c.mismatches.clone(), error: None },
                    Err((n, e)) => Row { name: n.clone(), ok: false, mismatches: vec![], error: Some(e.to_string()) },
                })
                .collect();
            emit(json, "fixtures run-all", None, &rows, start, || {
                for r in &rows {
                    println!("{:<22} {}", r.name, if r.ok { "ok" } else { "FAILED" });
                    for m in &r.mismatches {
                        println!("    {m}");
                    }
                    if let Some(e) = &r.error {
                        println!("    error: {e}");
                    }
                }
            });
            if let Some((n, e)) = results.iter().find_map(|r| r.as_ref().err()) {
                return Err(Fail::from(e.clone()).prefixed(n));
            }
            if let Some(r) = rows.iter().find(|r| !r.ok) {
                return Err(mismatch(format!("fixture {} disagrees with its expectations", r.name)));
            }
        }
    }
    Ok(())
}

impl Fail {
    fn prefixed(self, name: &str) -> Fail {
        Fail(self.0, format!("{name}: {}", self.1))
    }
}
