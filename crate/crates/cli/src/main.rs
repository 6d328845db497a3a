use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use rmaps::critical::critical_data;
use rmaps::error::{Error, ErrorClass};
use rmaps::fixtures;
use rmaps::gamma::{default_gamma, real_line_gamma, JordanPath};
use rmaps::io;
use rmaps::labelling::{
    admissible_q_range, check_consistent, enumerate_labellings, orbit_counts, CheckMode, QLabelling,
};
use rmaps::monodromy::realize;
use rmaps::render::{render_dot, render_svg, RenderStyle};
use rmaps::surfmap::{CombinatorialMap, MapKind};
use rmaps::trace::{pullback_rmap_with, TraceOptions};
use rmaps::{Embedded, Rational};

#[derive(Parser)]
#[command(name = "rmaps", version, about = "Tessellations induced by rational maps and their realization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the report to this file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for `--function random:D`.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Critical points, critical values and the Riemann-Hurwitz check.
    Critical {
        #[command(flatten)]
        function: FunctionArg,
        /// Largest accepted residual of the critical-point equation, relative to its coefficients.
        #[arg(long, default_value_t = 1e-9, value_parser = positive)]
        tol: f64,
    },
    /// Trace the tessellation pulled back along a Jordan path.
    Tessellate {
        #[command(flatten)]
        function: FunctionArg,
        #[command(flatten)]
        trace: TraceArgs,
        /// Also write an SVG figure here.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Enumerate consistent labellings of a t-graph.
    Labellings {
        #[command(flatten)]
        map: MapArg,
        /// Search `A..B` (or a single `q`) instead of the admissible range.
        #[arg(long, value_parser = parse_range)]
        q: Option<(usize, usize)>,
        /// One representative per global shift.
        #[arg(long)]
        canonical: bool,
    },
    /// Realize a labelled map as a branched covering: constellation, genus and gluings.
    Realize {
        #[command(flatten)]
        map: MapArg,
        /// Labelling JSON; defaults to the labels stored in the map.
        #[arg(long)]
        labelling: Option<PathBuf>,
    },
    /// Check a map (and optionally a labelling) against the definitions.
    Validate {
        #[command(flatten)]
        map: MapArg,
        #[arg(long)]
        labelling: Option<PathBuf>,
    },
    /// SVG of a traced function, or DOT text of a map.
    Render {
        #[arg(long, conflicts_with = "map", required_unless_present = "map")]
        function: Option<String>,
        #[arg(long)]
        map: Option<String>,
        #[command(flatten)]
        trace: TraceArgs,
        /// Output path for the SVG (defaults to `--out` or standard output).
        #[arg(long)]
        svg: Option<PathBuf>,
    },
}

#[derive(Args)]
struct FunctionArg {
    /// Function JSON `{"num": [...], "den": [...]}` with coefficients in increasing degree,
    /// or one of `example`, `belyi`, `power:N`, `random:D`.
    #[arg(long)]
    function: String,
}

#[derive(Args)]
struct MapArg {
    /// Map JSON, or one of `fig1a`, `example-rmap`, `torus[:K]`, `l-chessboard`,
    /// `hyperelliptic`, `bigon:N`, `belyi`, `fake-value`.
    #[arg(long)]
    map: String,
}

#[derive(Args)]
struct TraceArgs {
    /// `real`, `default`, or a polygon JSON file.
    #[arg(long, default_value = "default")]
    gamma: String,
    /// Arcs stop this fraction of the parameter range short of each vertex.
    #[arg(long, value_parser = positive)]
    epsilon: Option<f64>,
    /// Smallest continuation step as a fraction of the parameter range.
    #[arg(long, value_parser = positive)]
    step_floor: Option<f64>,
}

impl TraceArgs {
    fn options(&self) -> TraceOptions<f64> {
        let mut o = TraceOptions::default();
        if let Some(e) = self.epsilon {
            o.epsilon = e;
        }
        if let Some(s) = self.step_floor {
            o.step_floor = s;
        }
        o
    }
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        _ => Err(format!("expected a positive number, got {s}")),
    }
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let bad = || format!("expected A..B or a single integer, got {s}");
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (a, b.trim_start_matches('=')),
        None => (s, s),
    };
    let (a, b): (usize, usize) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
    if a > b {
        return Err(bad());
    }
    Ok((a, b))
}

enum Failure {
    Lib(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome<T> = Result<T, Failure>;

fn read(path: &Path) -> Outcome<String> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("cannot read {}: {}", path.display(), e)))
}

fn write_to(path: Option<&Path>, text: &str) -> Outcome<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Io(format!("cannot write {}: {}", p.display(), e))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Io(format!("cannot write output: {e}"))),
    }
}

fn builtin_count(spec: &str, name: &str) -> Option<Result<usize, Error>> {
    let rest = spec.strip_prefix(name)?.strip_prefix(':')?;
    Some(
        rest.parse()
            .map_err(|_| Error::InvalidInput(format!("bad count in {spec}"))),
    )
}

fn load_function(spec: &str, seed: u64) -> Outcome<Rational> {
    match spec {
        "example" => return Ok(fixtures::example_function()),
        "belyi" => return Ok(fixtures::belyi_cubic()),
        _ => {}
    }
    if let Some(n) = builtin_count(spec, "power") {
        let n = n?;
        if n < 2 {
            return Err(Error::DegenerateFunction(format!("degree {n} < 2")).into());
        }
        return Ok(fixtures::power_function(n));
    }
    if let Some(d) = builtin_count(spec, "random") {
        let d = d?;
        if d < 2 {
            return Err(Error::DegenerateFunction(format!("degree {d} < 2")).into());
        }
        return Ok(fixtures::random_function(&mut ChaCha8Rng::seed_from_u64(seed), d));
    }
    Ok(io::function_from_json(&io::parse(&read(Path::new(spec))?)?)?)
}

fn load_map(spec: &str) -> Outcome<CombinatorialMap> {
    let m = match spec {
        "fig1a" => fixtures::example_tgraph(),
        "example-rmap" => fixtures::example_rmap(),
        "torus" => fixtures::torus_chessboard(1),
        "l-chessboard" => fixtures::l_chessboard(),
        "hyperelliptic" => fixtures::hyperelliptic_map(),
        "belyi" => fixtures::belyi_map(),
        "fake-value" => fixtures::fake_value_map(),
        _ => {
            if let Some(k) = builtin_count(spec, "torus") {
                fixtures::torus_chessboard(k?)
            } else if let Some(n) = builtin_count(spec, "bigon") {
                fixtures::bigon(n?)
            } else {
                io::map_from_json(&io::parse(&read(Path::new(spec))?)?)?
            }
        }
    };
    Ok(m)
}

fn load_gamma(spec: &str, f: &Rational) -> Outcome<JordanPath<f64>> {
    let cd = critical_data(f)?;
    Ok(match spec {
        "real" => real_line_gamma(&cd)?,
        "default" => default_gamma(&cd)?,
        path => io::gamma_from_json(&io::parse(&read(Path::new(path))?)?)?,
    })
}

fn trace(f: &Rational, args: &TraceArgs) -> Outcome<(JordanPath<f64>, Embedded)> {
    let g = load_gamma(&args.gamma, f)?;
    let e = pullback_rmap_with(f, &g, &args.options())?;
    Ok((g, e))
}

fn kind_name(k: MapKind) -> &'static str {
    match k {
        MapKind::TGraph => "tgraph",
        MapKind::RMap => "rmap",
        MapKind::Raw => "raw",
    }
}

fn labelling_verdict(m: &CombinatorialMap, l: &QLabelling) -> (bool, Value) {
    let v = check_consistent(m, l);
    let mode = match v.mode {
        CheckMode::Hidden => "hidden",
        CheckMode::Full => "full",
    };
    (v.consistent, json!({ "consistent": v.consistent, "mode": mode, "q": l.q, "violations": v.violations }))
}

/// Runs a subcommand; the report is written even when the verdict is a failure.
fn run(cli: &Cli) -> Outcome<Option<Error>> {
    let out = cli.out.as_deref();
    let emit = |v: &Value| write_to(out, &io::to_canonical_string(v));
    match &cli.command {
        Command::Critical { function, tol } => {
            let f = load_function(&function.function, cli.seed)?;
            let cd = critical_data(&f)?;
            let report = io::critical_report(&f, &cd);
            emit(&report)?;
            let residual = report["max_scaled_residual"].as_f64().unwrap_or(f64::INFINITY);
            if residual > *tol {
                return Ok(Some(Error::NonConvergence(format!("residual {residual:e} exceeds {tol:e}"))));
            }
        }
        Command::Tessellate { function, trace: t, svg } => {
            let f = load_function(&function.function, cli.seed)?;
            let (g, e) = trace(&f, t)?;
            let mut v = io::embedded_to_json(&e);
            let m = &e.map;
            let consistent = m.labelling().map(|l| check_consistent(m, l).consistent);
            v["gamma"] = io::gamma_to_json(&g);
            v["summary"] = json!({
                "vertices": m.vertex_count(),
                "edges": m.edge_count(),
                "faces": m.face_count(),
                "genus": m.euler_genus()?,
                "gonality": m.classify().gonality,
                "valence2": (0..m.vertex_count()).filter(|&x| m.valence(x) == 2).count(),
                "labelling_consistent": consistent,
            });
            if let Some(p) = svg {
                write_to(Some(p), &render_svg(&e, &RenderStyle::default())?)?;
            }
            emit(&v)?;
        }
        Command::Labellings { map, q, canonical } => {
            let m = load_map(&map.map)?.without_labelling();
            let range = admissible_q_range(&m);
            let mut report = json!({ "canonical": canonical });
            match &range {
                Ok((lo, hi)) => report["admissible_range"] = json!([lo, hi]),
                Err(e) => {
                    report["admissible_range"] = Value::Null;
                    report["range_error"] = json!(e.to_string());
                }
            }
            let search = q.or(range.ok());
            let mut results = Vec::new();
            if let Some((lo, hi)) = search {
                report["searched"] = json!([lo, hi]);
                for q in lo..=hi {
                    let ls = enumerate_labellings(&m, q, *canonical);
                    let oc = orbit_counts(&m, &ls);
                    results.push(json!({
                        "q": q,
                        "count": ls.len(),
                        "shift_orbits": oc.shift_orbits,
                        "automorphism_orbits": oc.automorphism_orbits,
                        "labellings": ls.iter().map(|l| json!(l.labels)).collect::<Vec<_>>(),
                    }));
                }
            }
            report["results"] = Value::Array(results);
            emit(&report)?;
        }
        Command::Realize { map, labelling } => {
            let m = load_map(&map.map)?;
            let l = match labelling {
                Some(p) => io::labelling_from_json(&io::parse(&read(p)?)?, m.vertex_count())?,
                None => m
                    .labelling()
                    .cloned()
                    .ok_or_else(|| Error::InconsistentLabelling("map carries no labels; pass --labelling".into()))?,
            };
            let r = realize(&m, &l)?;
            emit(&json!({
                "genus": r.genus,
                "degree": r.constellation.n,
                "q": r.constellation.q,
                "constellation": io::constellation_to_json(&r.constellation),
                "cycle_types": r.constellation.cycle_types(),
                "surgery": io::surgery_to_json(&r.plan),
                "rmap": io::map_to_json(&r.rmap),
            }))?;
        }
        Command::Validate { map, labelling } => {
            let m = load_map(&map.map)?;
            let c = m.classify();
            let mut ok = c.kind != MapKind::Raw;
            let mut report = json!({
                "kind": kind_name(c.kind),
                "vertices": m.vertex_count(),
                "edges": m.edge_count(),
                "faces": m.face_count(),
                "degree": m.degree(),
                "genus": m.euler_genus()?,
                "gonality": c.gonality,
                "violations": c.violations,
            });
            let l = match labelling {
                Some(p) => Some(io::labelling_from_json(&io::parse(&read(p)?)?, m.vertex_count())?),
                None => m.labelling().cloned(),
            };
            if let Some(l) = l {
                let (consistent, v) = labelling_verdict(&m, &l);
                ok &= consistent;
                report["labelling"] = v;
            }
            report["ok"] = json!(ok);
            emit(&report)?;
            if !ok {
                return Ok(Some(Error::WrongKind("map or labelling failed validation".into())));
            }
        }
        Command::Render { function, map, trace: t, svg } => {
            if let Some(spec) = function {
                let f = load_function(spec, cli.seed)?;
                let (_, e) = trace(&f, t)?;
                let text = render_svg(&e, &RenderStyle::default())?;
                write_to(svg.as_deref().or(out), &text)?;
            } else if let Some(spec) = map {
                write_to(out, &render_dot(&load_map(spec)?))?;
            }
        }
    }
    Ok(None)
}

fn exit_for(e: &Error) -> ExitCode {
    match e.class() {
        ErrorClass::Validation => ExitCode::from(2),
        ErrorClass::Numeric => ExitCode::from(3),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(e)) | Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            exit_for(&e)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(4)
        }
    }
}
