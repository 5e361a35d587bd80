//! `mcenter`: mass centers, centered masses and Pappus volumes from the
//! command line.
//!
//! Exit codes: 0 success, 1 failed verification or numerical failure,
//! 2 no mass center, 64 malformed input or usage, 65 off-space point or
//! parameter out of range.

mod output;

use std::fs;
use std::io::Read;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mcenter_core::manifolds::{
    ball_centered_mass, ball_total_mass, ngon_centered_area, ngon_total_area, sphere_centered_mass,
    sphere_total_mass,
};
use mcenter_core::masscenter::{oplus, PointSet};
use mcenter_core::onedim::{fk_center, split_merge, FkSystem};
use mcenter_core::pappus::{oracle_volume_mc, oracle_volume_quadrature, Solid, SolidSpec};
use mcenter_core::verify::{run_suite, VerifyOptions, SUITES};
use mcenter_core::{Error, Geometry, GeometryKind, MaterialVector, QuadratureConfig};
use serde_json::{json, Value};

/// Zero-mass threshold for `center`, relative to the total mass.
const ZERO_MASS_RELATIVE: f64 = 1e-12;

#[derive(Debug, Parser)]
#[command(name = "mcenter", version, about = "Mass centers in Euclidean, spherical and hyperbolic space")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Json)]
    format: Format,

    /// Random seed for sampled computations.
    #[arg(long, global = true, env = "MCENTER_SEED", default_value_t = 0)]
    seed: u64,

    /// Quadrature preset: default, fast, precise, simpson or adaptive.
    #[arg(long, global = true, default_value = "default")]
    quadrature: String,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Mass center of a finite point set.
    Center(CenterArgs),
    /// Volume of a torus or cone, optionally checked by an oracle.
    Volume(VolumeArgs),
    /// Total and centered masses of balls, spheres or regular polygons.
    Table(TableArgs),
    /// Center of masses on the line under the F_k rule.
    Fk(FkArgs),
    /// Split-and-merge on the circle.
    SplitMerge(SplitMergeArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
struct CenterArgs {
    /// Point-set JSON file (`-` for stdin).
    file: Option<String>,
    /// Geometry of inline points.
    #[arg(long, value_enum, requires = "point")]
    geometry: Option<KindArg>,
    /// Inline point as `mass:x1,x2,...` (ambient coordinates); repeatable.
    #[arg(long, conflicts_with = "file")]
    point: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    #[value(alias = "e")]
    Euclidean,
    #[value(alias = "s")]
    Spherical,
    #[value(alias = "h")]
    Hyperbolic,
}

impl From<KindArg> for GeometryKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Euclidean => GeometryKind::Euclidean,
            KindArg::Spherical => GeometryKind::Spherical,
            KindArg::Hyperbolic => GeometryKind::Hyperbolic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SolidArg {
    Torus,
    Cone,
    BallCone,
    NgonCone,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OracleArg {
    Mc,
    Quad,
}

#[derive(Debug, Args)]
struct VolumeArgs {
    /// Solid; omit when `--spec` is given.
    #[arg(value_enum, required_unless_present = "spec")]
    solid: Option<SolidArg>,
    /// Solid spec JSON file.
    #[arg(long, conflicts_with = "solid")]
    spec: Option<String>,
    #[arg(long, value_enum, default_value_t = KindArg::Euclidean)]
    geometry: KindArg,
    /// Torus core radius.
    #[arg(short = 'R', long = "core-radius", allow_hyphen_values = true)]
    big_r: Option<f64>,
    /// Tube or base radius.
    #[arg(short = 'r', long, allow_hyphen_values = true)]
    radius: Option<f64>,
    /// Cone height.
    #[arg(short = 'H', long, allow_hyphen_values = true)]
    height: Option<f64>,
    /// Ball-cone dimension or polygon side count.
    #[arg(short = 'n', long)]
    n: Option<usize>,
    /// Polygon edge length.
    #[arg(short = 'a', long, allow_hyphen_values = true)]
    edge: Option<f64>,
    /// Independent check of the volume.
    #[arg(long, value_enum)]
    oracle: Option<OracleArg>,
    /// Monte Carlo samples.
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    Balls,
    Spheres,
    Ngons,
}

#[derive(Debug, Args)]
struct TableArgs {
    #[arg(value_enum)]
    family: Family,
    /// Geometries to include (default: all three).
    #[arg(long, value_enum, value_delimiter = ',')]
    geometry: Vec<KindArg>,
    /// Dimensions for balls and spheres.
    #[arg(short = 'k', long, value_delimiter = ',', default_values_t = [1usize, 2, 3])]
    k: Vec<usize>,
    /// Radii for balls and spheres.
    #[arg(short = 'r', long, value_delimiter = ',', default_values_t = [0.5])]
    r: Vec<f64>,
    /// Side counts for polygons.
    #[arg(short = 'n', long, value_delimiter = ',', default_values_t = [3usize, 5, 8])]
    n: Vec<usize>,
    /// Edge lengths for polygons.
    #[arg(short = 'a', long, value_delimiter = ',', default_values_t = [0.5])]
    a: Vec<f64>,
}

#[derive(Debug, Args)]
struct FkArgs {
    /// Family parameter k in [0, 50].
    #[arg(short = 'k', long)]
    k: f64,
    /// Line to embed the center in.
    #[arg(long, value_enum, default_value_t = KindArg::Euclidean)]
    geometry: KindArg,
    /// Masses, comma separated.
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    mass: Vec<f64>,
    /// Positions, comma separated.
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pos: Vec<f64>,
}

#[derive(Debug, Args)]
struct SplitMergeArgs {
    /// First point as `mass:angle`.
    #[arg(short = 'a', allow_hyphen_values = true)]
    a: String,
    /// Second point as `mass:angle`.
    #[arg(short = 'b', allow_hyphen_values = true)]
    b: String,
    #[arg(long, default_value_t = 40)]
    steps: usize,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// axioms, two-point, tables, derivative, pappus, fk or split-merge.
    suite: String,
    /// Replaces every upper-bound tolerance.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Random instances per geometry.
    #[arg(long, default_value_t = 1000)]
    instances: usize,
    /// Monte Carlo samples per solid (pappus suite).
    #[arg(long, default_value_t = 10_000_000)]
    samples: u64,
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: 64, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NoMassCenter(_) | Error::ZeroMass => 2,
            Error::Malformed(_) | Error::DimensionMismatch { .. } | Error::NonFinite | Error::EmptyInput => 64,
            Error::OffSpace { .. } | Error::OffCone { .. } | Error::InvalidParameter(_) | Error::Infeasible(_) => 65,
            _ => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

/// A report and the exit code to finish with.
struct Outcome {
    rows: Vec<Value>,
    code: u8,
}

impl Outcome {
    fn ok(v: Value) -> Self {
        Outcome { rows: vec![v], code: 0 }
    }
}

fn read_input(path: &str) -> Result<String, Failure> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::usage(format!("reading stdin: {e}")))?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("reading {path}: {e}")))
}

fn parse_pair(s: &str, what: &str) -> Result<(f64, Vec<f64>), Failure> {
    let (m, rest) = s
        .split_once(':')
        .ok_or_else(|| Failure::usage(format!("{what} '{s}' is not of the form mass:coords")))?;
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| Failure::usage(format!("'{t}' in {what} '{s}' is not a number")))
    };
    let coords = rest.split(',').map(num).collect::<Result<Vec<_>, _>>()?;
    Ok((num(m)?, coords))
}

fn cmd_center(args: &CenterArgs) -> Result<Outcome, Failure> {
    let set = match (&args.file, args.geometry) {
        (Some(path), _) => PointSet::from_json(&read_input(path)?)?,
        (None, Some(kind)) => {
            let pairs = args
                .point
                .iter()
                .map(|p| parse_pair(p, "point"))
                .collect::<Result<Vec<_>, _>>()?;
            let n = pairs[0].1.len().checked_sub(1).filter(|&n| n > 0).ok_or_else(|| {
                Failure::usage("inline points need at least two ambient coordinates")
            })?;
            let g = Geometry::new(kind.into(), n)?;
            let vs = pairs
                .iter()
                .map(|(m, p)| MaterialVector::from_point(g, *m, p))
                .collect::<mcenter_core::Result<Vec<_>>>()?;
            PointSet::new(g, vs)?
        }
        (None, None) => return Err(Failure::usage("give a point-set file or --geometry with --point")),
    };
    let g = set.geometry();
    let sum = oplus(&set);
    let total = set.total_mass();
    let centered = sum.mass();
    let mut report = json!({
        "geometry": g,
        "points": set.len(),
        "vector": sum.coords().as_slice(),
        "total_mass": total,
    });
    let degenerate = sum.is_zero() || centered.abs() <= ZERO_MASS_RELATIVE * total;
    let obj = report.as_object_mut().expect("object");
    if degenerate {
        obj.insert("status".into(), json!("no mass center"));
        return Ok(Outcome { rows: vec![report], code: 2 });
    }
    obj.insert("status".into(), json!("ok"));
    obj.insert("point".into(), json!(sum.point()?.as_slice()));
    obj.insert("centered_mass".into(), json!(centered));
    obj.insert("deviation".into(), json!(centered - total));
    Ok(Outcome::ok(report))
}

fn need(v: Option<f64>, flag: &str) -> Result<f64, Failure> {
    v.ok_or_else(|| Failure::usage(format!("missing {flag}")))
}

fn solid_from_args(args: &VolumeArgs) -> Result<SolidSpec, Failure> {
    if let Some(path) = &args.spec {
        return Ok(SolidSpec::from_json(&read_input(path)?)?);
    }
    let solid = match args.solid.expect("required unless --spec") {
        SolidArg::Torus => Solid::Torus { big_r: need(args.big_r, "-R")?, r: need(args.radius, "-r")? },
        SolidArg::Cone => Solid::RightCircularCone { r: need(args.radius, "-r")?, h: need(args.height, "-H")? },
        SolidArg::BallCone => Solid::BallBaseCone {
            n: args.n.ok_or_else(|| Failure::usage("missing -n"))?,
            r: need(args.radius, "-r")?,
            h: need(args.height, "-H")?,
        },
        SolidArg::NgonCone => Solid::NgonCone {
            n: args.n.ok_or_else(|| Failure::usage("missing -n"))?,
            a: need(args.edge, "-a")?,
            h: need(args.height, "-H")?,
        },
    };
    Ok(SolidSpec::new(solid, args.geometry.into())?)
}

fn cmd_volume(args: &VolumeArgs, seed: u64, q: &QuadratureConfig) -> Result<Outcome, Failure> {
    let spec = solid_from_args(args)?;
    let volume = spec.volume(q)?;
    let closed = matches!(spec.solid(), Solid::Torus { .. } | Solid::RightCircularCone { .. })
        || spec.kind() == GeometryKind::Euclidean;
    let mut report = spec.to_json_value();
    let obj = report.as_object_mut().expect("object");
    obj.insert("volume".into(), json!(volume));
    obj.insert("method".into(), json!(if closed { "closed-form" } else { "line-integral" }));
    if let Some(oracle) = args.oracle {
        let r = match oracle {
            OracleArg::Mc => oracle_volume_mc(&spec, args.samples, seed)?,
            OracleArg::Quad => oracle_volume_quadrature(&spec, q)?,
        };
        obj.insert("oracle".into(), serde_json::to_value(r).expect("reports serialize"));
        obj.insert("relative_difference".into(), json!((r.value - volume).abs() / volume));
        if oracle == OracleArg::Mc {
            obj.insert("sigmas".into(), json!(r.sigmas_from(volume)));
        }
    }
    Ok(Outcome::ok(report))
}

fn cmd_table(args: &TableArgs) -> Result<Outcome, Failure> {
    let kinds: Vec<GeometryKind> = if args.geometry.is_empty() {
        GeometryKind::ALL.to_vec()
    } else {
        args.geometry.iter().map(|&k| k.into()).collect()
    };
    let (orders, sizes) = match args.family {
        Family::Balls | Family::Spheres => (&args.k, &args.r),
        Family::Ngons => (&args.n, &args.a),
    };
    if orders.is_empty() || sizes.is_empty() {
        return Err(Failure::from(Error::EmptyInput));
    }
    let mut rows = Vec::new();
    for &kind in &kinds {
        for &order in orders {
            for &size in sizes {
                let row = match args.family {
                    Family::Balls => {
                        let g = Geometry::new(kind, order.max(1))?;
                        json!({"k": order, "r": size, "geometry": kind,
                            "total_mass": ball_total_mass(order, size, g)?,
                            "centered_mass": ball_centered_mass(order, size, g)?})
                    }
                    Family::Spheres => {
                        let g = Geometry::new(kind, order + 1)?;
                        json!({"k": order, "r": size, "geometry": kind,
                            "total_mass": sphere_total_mass(order, size, g)?,
                            "centered_mass": sphere_centered_mass(order, size, g)?})
                    }
                    Family::Ngons => {
                        let g = Geometry::new(kind, 2)?;
                        json!({"n": order, "a": size, "geometry": kind,
                            "total_mass": ngon_total_area(order, size, g)?,
                            "centered_mass": ngon_centered_area(order, size, g)?})
                    }
                };
                rows.push(row);
            }
        }
    }
    Ok(Outcome { rows, code: 0 })
}

fn cmd_fk(args: &FkArgs) -> Result<Outcome, Failure> {
    let g = Geometry::new(args.geometry.into(), 1)?;
    let sys = FkSystem::new(args.k, g)?;
    let c = fk_center(&sys, &args.mass, &args.pos)?;
    Ok(Outcome::ok(json!({
        "k": args.k,
        "geometry": g,
        "mass": c.mass,
        "position": c.position,
        "vector": sys.embed(c).coords().as_slice(),
    })))
}

fn circle_point(s: &str) -> Result<MaterialVector, Failure> {
    let (m, angle) = parse_pair(s, "point")?;
    let [theta] = angle[..] else {
        return Err(Failure::usage(format!("point '{s}' is not of the form mass:angle")));
    };
    Ok(MaterialVector::from_point(Geometry::spherical(1), m, &[theta.cos(), theta.sin()])?)
}

fn cmd_split_merge(args: &SplitMergeArgs) -> Result<Outcome, Failure> {
    let (a, b) = (circle_point(&args.a)?, circle_point(&args.b)?);
    let trace = split_merge(&a, &b, args.steps)?;
    let target = a.add(&b)?.point()?;
    let steps: Vec<Value> = trace
        .steps
        .iter()
        .enumerate()
        .map(|(i, s)| json!({"step": i, "mass_a": s.a.mass(), "mass_b": s.b.mass(), "distance": s.distance}))
        .collect();
    Ok(Outcome::ok(json!({
        "steps": steps,
        "terminated_early": trace.terminated_early,
        "halving_residual": trace.halving_residual(),
        "conservation_residual": trace.conservation_residual(),
        "limit_point": trace.limit_point.as_slice(),
        "center": target.as_slice(),
        "limit_error": trace.limit_point.max_abs_diff(&target),
    })))
}

fn cmd_verify(args: &VerifyArgs, seed: u64, q: &QuadratureConfig) -> Result<Outcome, Failure> {
    if !SUITES.contains(&args.suite.as_str()) {
        return Err(Failure::usage(format!(
            "unknown suite '{}'; expected one of {}",
            args.suite,
            SUITES.join(", ")
        )));
    }
    let opts = VerifyOptions {
        seed,
        tolerance: args.tolerance,
        instances: args.instances,
        mc_samples: args.samples,
        quadrature: *q,
    };
    let report = run_suite(&args.suite, &opts)?;
    let pass = report.passed();
    // timings are left out so the output is byte-stable
    let checks: Vec<Value> = report
        .checks
        .iter()
        .map(|c| json!({"name": c.name, "residual": c.residual, "tolerance": c.tolerance, "bound": c.bound, "pass": c.pass}))
        .collect();
    Ok(Outcome {
        rows: vec![json!({"suite": report.suite, "seed": seed, "pass": pass, "checks": checks})],
        code: if pass { 0 } else { 1 },
    })
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let q = QuadratureConfig::preset(&cli.quadrature).map_err(|e| Failure::usage(e.to_string()))?;
    match &cli.command {
        Command::Center(a) => cmd_center(a),
        Command::Volume(a) => cmd_volume(a, cli.seed, &q),
        Command::Table(a) => cmd_table(a),
        Command::Fk(a) => cmd_fk(a),
        Command::SplitMerge(a) => cmd_split_merge(a),
        Command::Verify(a) => cmd_verify(a, cli.seed, &q),
    }
}

fn render(outcome: &Outcome, format: Format, is_table: bool) -> String {
    match format {
        Format::Json if is_table => output::to_json(&Value::Array(outcome.rows.clone())) + "\n",
        Format::Json => output::to_json(&outcome.rows[0]) + "\n",
        // verify reports and split-merge traces become one row per check or step
        Format::Csv if is_table => output::to_csv(&outcome.rows),
        Format::Csv => match outcome.rows[0].get("checks").or_else(|| outcome.rows[0].get("steps")) {
            Some(Value::Array(items)) => output::to_csv(items),
            _ => output::to_csv(&outcome.rows),
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 64 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(outcome) => {
            let is_table = matches!(cli.command, Command::Table(_));
            print!("{}", render(&outcome, cli.format, is_table));
            ExitCode::from(outcome.code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
