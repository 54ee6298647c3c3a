//! `cartan`: batch verification of Cartan covers, Bernstein exponents,
//! resultants and Weierstrass preparation, with JSON reports.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use cartan_core::bernstein::{bernstein_exponent, BernsteinQuery};
use cartan_core::cartan::cartan_cover_poly_with;
use cartan_core::cover2d::{build_cover_seeded, estimate_inputs, verify_cover};
use cartan_core::curve::{build_atlas, ChartKind};
use cartan_core::family::{dirichlet_b0, dirichlet_determinant, taylor_truncation, TestFamilySpec};
use cartan_core::golden::verify_example_log_r;
use cartan_core::resultant::{check_common_root, resultant_product_oracle, resultant_sylvester, Verdict};
use cartan_core::weierstrass::{bounds_d_report, choose_r1, prepare, select_circle, Frame};
use cartan_core::{json, roots, svg, BivariatePoly, Disk, Error, Point2, UnivariatePoly, C64};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;

const SCHEMA: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "cartan", version, about, args_override_self = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Bernstein exponent of f on a ball or on the trace of {f2 = 0}.
    Bernstein(BernsteinArgs),
    /// Sylvester resultant of two univariate polynomials against the root-product oracle.
    Resultant(ResultantArgs),
    /// Cartan cover of the zeros of a univariate polynomial with a minimum-modulus certificate.
    Cover1d(Cover1dArgs),
    /// Cover of the joint near-zero set of a pair (f1, f2) in B(0, 1/4).
    Cover2d(Cover2dArgs),
    /// Numerical Weierstrass preparation f = P g in the identity frame.
    Weierstrass(WeierstrassArgs),
    /// Atlas of branch charts of {f2 = 0} in a ball.
    Curve(CurveArgs),
    /// Characteristic determinant of a quasi-periodic Schrödinger operator.
    Dirichlet(DirichletArgs),
    /// Built-in verification suites.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct Common {
    /// Write the report here instead of stdout.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BernsteinArgs {
    #[arg(long)]
    f: PathBuf,
    #[arg(long, default_value_t = 0.25)]
    mu: f64,
    /// Centre as re,im,re,im.
    #[arg(long, value_parser = parse_point2, default_value = "0,0,0,0")]
    center: Point2,
    #[arg(long = "R")]
    r: f64,
    /// Polynomial f2 whose zero set carries the trace.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long)]
    budget: Option<usize>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct ResultantArgs {
    #[arg(long)]
    f: PathBuf,
    #[arg(long)]
    g: PathBuf,
    /// Relative tolerance between the Sylvester value and the oracle.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Also check the quantitative common-root lemma at this delta.
    #[arg(long)]
    delta: Option<f64>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Cover1dArgs {
    #[arg(long)]
    f: PathBuf,
    #[arg(long = "H")]
    h: f64,
    /// Domain centre as re,im.
    #[arg(long, value_parser = parse_c64, default_value = "0,0")]
    center: C64,
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Cover2dArgs {
    #[arg(long)]
    f1: PathBuf,
    #[arg(long)]
    f2: PathBuf,
    #[arg(long = "H", default_value_t = 6.0)]
    h: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Level of the joint near-zero set fed to the pipeline.
    #[arg(long, default_value_t = 1e-3)]
    eps0: f64,
    /// Box subdivision depth for the input cover.
    #[arg(long, default_value_t = 7)]
    depth: usize,
    /// Exterior samples for the verification report.
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
    /// w-coordinate of the SVG slice as re,im.
    #[arg(long, value_parser = parse_c64, default_value = "0,0")]
    slice_w: C64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct WeierstrassArgs {
    #[arg(long)]
    f: PathBuf,
    /// Contour radius; chosen in (1/8, 1/4) when omitted.
    #[arg(long)]
    rho0: Option<f64>,
    /// Radius of the w-disk; chosen automatically when omitted.
    #[arg(long)]
    r1: Option<f64>,
    #[arg(long, default_value_t = 16)]
    grid: usize,
    /// Full factorization dump for replay.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct CurveArgs {
    #[arg(long)]
    f2: PathBuf,
    /// Ball as re,im,re,im,radius.
    #[arg(long, value_parser = parse_region, default_value = "0,0,0,0,0.5")]
    region: (Point2, f64),
    #[arg(long, default_value_t = 8)]
    grid: usize,
    #[arg(long)]
    atlas_out: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct DirichletArgs {
    /// Trigonometric degree of the potential.
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, value_parser = parse_pair, default_value = "0.6180339887498949,0.4142135623730951")]
    omega: [f64; 2],
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    #[arg(long = "N")]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Evaluation point as re,im,re,im.
    #[arg(long, value_parser = parse_point2, default_value = "0,0,0,0")]
    v: Point2,
    /// Rescaling radius for the Taylor truncation and the exponent estimate.
    #[arg(long)]
    r0: Option<f64>,
    #[arg(long, default_value_t = 12)]
    degree: usize,
    #[arg(long, default_value_t = 256)]
    budget: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    suite: String,
    /// Radii for example-logR.
    #[arg(long = "R", value_delimiter = ',', default_values_t = [0.05, 0.1, 0.2])]
    r: Vec<f64>,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Failure(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_) | Error::NonFinite | Error::Json(_) => CliError::Usage(e.to_string()),
            other => CliError::Failure(other.to_string()),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Serialize)]
struct Report<T: Serialize> {
    schema: u32,
    command: &'static str,
    pass: bool,
    failures: Vec<String>,
    result: T,
}

fn parse_floats(s: &str, n: usize) -> Result<Vec<f64>, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<Result<_, _>>()?;
    if v.len() != n {
        return Err(format!("expected {n} comma-separated numbers, got {}", v.len()));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err("non-finite number".into());
    }
    Ok(v)
}

fn parse_c64(s: &str) -> Result<C64, String> {
    let v = parse_floats(s, 2)?;
    Ok(C64::new(v[0], v[1]))
}

fn parse_pair(s: &str) -> Result<[f64; 2], String> {
    let v = parse_floats(s, 2)?;
    Ok([v[0], v[1]])
}

fn parse_point2(s: &str) -> Result<Point2, String> {
    let v = parse_floats(s, 4)?;
    Ok([C64::new(v[0], v[1]), C64::new(v[2], v[3])])
}

fn parse_region(s: &str) -> Result<(Point2, f64), String> {
    let v = parse_floats(s, 5)?;
    Ok(([C64::new(v[0], v[1]), C64::new(v[2], v[3])], v[4]))
}

fn read_to_string(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn read_bivariate(path: &Path) -> CliResult<BivariatePoly> {
    let s = read_to_string(path)?;
    json::from_str(&s).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn read_univariate(path: &Path) -> CliResult<UnivariatePoly> {
    let s = read_to_string(path)?;
    json::from_str(&s).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|e| CliError::Failure(format!("{}: {e}", path.display())))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut s = json::to_string_pretty(value)?;
    s.push('\n');
    write_file(path, &s)
}

fn emit<T: Serialize>(common: &Common, command: &'static str, failures: Vec<String>, result: T) -> CliResult<bool> {
    let pass = failures.is_empty();
    let report = Report { schema: SCHEMA, command, pass, failures, result };
    let mut s = json::to_string_pretty(&report)?;
    s.push('\n');
    match &common.report {
        Some(p) => write_file(p, &s)?,
        None => print!("{s}"),
    }
    Ok(pass)
}

fn run_bernstein(a: &BernsteinArgs) -> CliResult<bool> {
    let f = read_bivariate(&a.f)?;
    let mut q = match &a.trace {
        Some(p) => BernsteinQuery::on_trace(a.mu, a.center, a.r, read_bivariate(p)?),
        None => BernsteinQuery::ball(a.mu, a.center, a.r),
    };
    if let Some(b) = a.budget {
        q.budget = b;
    }
    let rep = bernstein_exponent(&f, &q)?;
    emit(&a.common, "bernstein", Vec::new(), rep)
}

#[derive(Serialize)]
struct ResultantResult {
    sylvester: C64,
    oracle: C64,
    relative_difference: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    common_root: Option<cartan_core::resultant::CommonRootReport>,
}

fn run_resultant(a: &ResultantArgs) -> CliResult<bool> {
    let f = read_univariate(&a.f)?;
    let g = read_univariate(&a.g)?;
    let sylvester = resultant_sylvester(&f, &g)?;
    let oracle = resultant_product_oracle(&f, &g, roots::DEFAULT_TOL)?;
    let scale = sylvester.norm().max(oracle.norm());
    let relative_difference = if scale == 0.0 { 0.0 } else { (sylvester - oracle).norm() / scale };
    let mut failures = Vec::new();
    if relative_difference > a.tol {
        failures.push(format!("sylvester and oracle differ by {relative_difference:e} > {:e}", a.tol));
    }
    let common_root = match a.delta {
        Some(d) => Some(check_common_root(&f, &g, d)?),
        None => None,
    };
    if let Some(l) = &common_root {
        for (name, v) in [("part0", l.part0), ("part1", l.part1), ("part2", l.part2)] {
            if v == Verdict::Violated {
                failures.push(format!("lemma {name} violated"));
            }
        }
    }
    emit(&a.common, "resultant", failures, ResultantResult { sylvester, oracle, relative_difference, common_root })
}

#[derive(Serialize)]
struct Cover1dResult {
    cover: cartan_core::cartan::Car1Cover,
    certificate: cartan_core::cartan::MinModulusCertificate,
    total_radius: f64,
}

fn run_cover1d(a: &Cover1dArgs) -> CliResult<bool> {
    let p = read_univariate(&a.f)?;
    let domain = Disk::new(a.center, a.radius)?;
    let (cover, certificate) = cartan_cover_poly_with(&p, domain, a.h, a.samples, a.seed)?;
    let mut failures = Vec::new();
    let total_radius = cover.total_radius();
    if !(total_radius <= (-a.h).exp()) {
        failures.push(format!("total radius {total_radius:e} exceeds e^-H"));
    }
    if let Some(out) = &a.out {
        write_json(out, &cover)?;
    }
    if let Some(path) = &a.svg {
        let zeros = if p.degree() >= 1 { roots::roots(&p, roots::DEFAULT_TOL)? } else { Vec::new() };
        write_file(path, &svg::cover1d_svg(&cover, &zeros, a.center, a.radius))?;
    }
    emit(&a.common, "cover1d", failures, Cover1dResult { cover, certificate, total_radius })
}

#[derive(Serialize)]
struct Cover2dResult {
    #[serde(rename = "H0")]
    h0: f64,
    #[serde(rename = "H1")]
    h1: f64,
    #[serde(rename = "K1")]
    k1: usize,
    #[serde(rename = "B0")]
    b0: f64,
    gates: cartan_core::cover2d::Gates,
    balls: usize,
    #[serde(rename = "K")]
    k: usize,
    threshold_log: f64,
    reference_threshold_log: f64,
    k_ratio: f64,
    leaves: usize,
    exterior_certificate: cartan_core::cartan::MinModulusCertificate,
    verification: cartan_core::cover2d::VerificationReport,
}

fn run_cover2d(a: &Cover2dArgs) -> CliResult<bool> {
    let f1 = read_bivariate(&a.f1)?;
    let f2 = read_bivariate(&a.f2)?;
    let data = estimate_inputs(&f1, &f2, a.eps0, a.depth)?;
    let res = build_cover_seeded(&f1, &f2, &data, a.h, a.seed)?;
    let verification = verify_cover(&f1, &f2, &res, a.samples, a.seed);
    let mut failures = Vec::new();
    if verification.violations > 0 {
        failures.push(format!("{} exterior samples below the certified threshold", verification.violations));
    }
    if let Some(out) = &a.out {
        write_json(out, &res.cover)?;
    }
    if let Some(path) = &a.svg {
        write_file(path, &svg::cover2d_slice_svg(&res.cover, a.slice_w))?;
    }
    let result = Cover2dResult {
        h0: data.h0,
        h1: data.h1,
        k1: data.k1,
        b0: data.b0,
        gates: data.gates,
        balls: res.cover.balls.len(),
        k: res.cover.k,
        threshold_log: res.threshold_log,
        reference_threshold_log: res.reference_threshold_log,
        k_ratio: res.k_ratio,
        leaves: res.provenance.len(),
        exterior_certificate: res.exterior_certificate,
        verification,
    };
    emit(&a.common, "cover2d", failures, result)
}

#[derive(Serialize)]
struct WeierstrassResult {
    k: usize,
    rho0: f64,
    r1: f64,
    residual: f64,
    max_root_modulus: f64,
    roots_confined: bool,
    bounds: cartan_core::weierstrass::BoundsDReport,
}

fn run_weierstrass(a: &WeierstrassArgs) -> CliResult<bool> {
    let f = read_bivariate(&a.f)?;
    let rho0 = match a.rho0 {
        Some(r) => r,
        None => select_circle(&[f.in_z(C64::new(0.0, 0.0))], -700.0)?.rho0,
    };
    let r1 = match a.r1 {
        Some(r) => r,
        None => choose_r1(std::slice::from_ref(&f), rho0, a.grid)?,
    };
    let wf = prepare(&f, Frame::identity(), rho0, r1, a.grid)?;
    let bounds = bounds_d_report(&wf);
    let mut failures = Vec::new();
    if !(wf.residual <= a.tol) {
        failures.push(format!("residual {:e} exceeds {:e}", wf.residual, a.tol));
    }
    let roots_confined = wf.roots_confined();
    if !roots_confined {
        failures.push("roots of P leave the contour disk".into());
    }
    if !bounds.lower_holds {
        failures.push("lower bound for log|g| violated".into());
    }
    if !bounds.upper_holds {
        failures.push("upper bound for log|g| violated".into());
    }
    if let Some(out) = &a.out {
        write_json(out, &wf)?;
    }
    let result = WeierstrassResult { k: wf.k, rho0, r1, residual: wf.residual, max_root_modulus: wf.max_root_modulus, roots_confined, bounds };
    emit(&a.common, "weierstrass", failures, result)
}

#[derive(Serialize)]
struct CurveResult {
    charts: usize,
    regular_charts: usize,
    puiseux_charts: usize,
    puiseux_orders: Vec<usize>,
    max_residual: f64,
    discriminant_points: Vec<C64>,
    singular_points: Vec<cartan_core::curve::SingularPoint>,
    horizontal_lines: Vec<C64>,
    skipped: usize,
}

fn run_curve(a: &CurveArgs) -> CliResult<bool> {
    let f2 = read_bivariate(&a.f2)?;
    let (center, radius) = a.region;
    let atlas = build_atlas(&f2, center, radius, a.grid)?;
    let max_residual = atlas.charts.iter().map(|c| c.residual).fold(0.0, f64::max);
    let mut failures = Vec::new();
    if max_residual > a.tol {
        failures.push(format!("chart residual {max_residual:e} exceeds {:e}", a.tol));
    }
    if let Some(out) = &a.atlas_out {
        write_json(out, &atlas)?;
    }
    let puiseux: Vec<usize> = atlas.charts.iter().filter(|c| c.kind == ChartKind::Puiseux).map(|c| c.p).collect();
    let result = CurveResult {
        charts: atlas.charts.len(),
        regular_charts: atlas.charts.len() - puiseux.len(),
        puiseux_charts: puiseux.len(),
        puiseux_orders: puiseux,
        max_residual,
        discriminant_points: atlas.discriminant_points,
        singular_points: atlas.singular_points,
        horizontal_lines: atlas.horizontal_lines,
        skipped: atlas.skipped,
    };
    emit(&a.common, "curve", failures, result)
}

#[derive(Serialize)]
struct DirichletResult {
    spec: TestFamilySpec,
    value: cartan_core::family::ScaledValue,
    log_abs: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    r0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    truncation_error_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    truncation_log_scale: Option<f64>,
    #[serde(rename = "B0", skip_serializing_if = "Option::is_none")]
    b0: Option<f64>,
}

fn run_dirichlet(a: &DirichletArgs) -> CliResult<bool> {
    let spec = TestFamilySpec::trig(a.k, a.omega, a.lambda, a.n, a.seed);
    let value = dirichlet_determinant(&spec, a.v)?;
    let (mut bound, mut scale, mut b0) = (None, None, None);
    if let Some(r0) = a.r0 {
        let t = taylor_truncation(&spec, r0, a.degree)?;
        bound = Some(t.error_bound);
        scale = Some(t.log_scale);
        b0 = Some(dirichlet_b0(&spec, r0, a.budget)?);
    }
    let result = DirichletResult {
        log_abs: value.log_abs(),
        spec,
        value,
        r0: a.r0,
        truncation_error_bound: bound,
        truncation_log_scale: scale,
        b0,
    };
    emit(&a.common, "dirichlet", Vec::new(), result)
}

fn run_verify(a: &VerifyArgs) -> CliResult<bool> {
    match a.suite.as_str() {
        "example-logR" => {
            let rep = verify_example_log_r(&a.r)?;
            let mut failures: Vec<String> = rep
                .entries
                .iter()
                .filter(|e| !e.pass)
                .map(|e| format!("R = {}: B = {} (expected {})", e.r, e.b, e.b_expected))
                .collect();
            if !rep.slope_pass {
                failures.push(format!("slope {:?} is not 1 +- 0.05", rep.slope));
            }
            emit(&a.common, "verify", failures, rep)
        }
        other => Err(CliError::Usage(format!("unknown suite {other:?} (available: example-logR)"))),
    }
}

fn run(cli: &Cli) -> CliResult<bool> {
    match &cli.command {
        Command::Bernstein(a) => run_bernstein(a),
        Command::Resultant(a) => run_resultant(a),
        Command::Cover1d(a) => run_cover1d(a),
        Command::Cover2d(a) => run_cover2d(a),
        Command::Weierstrass(a) => run_weierstrass(a),
        Command::Curve(a) => run_curve(a),
        Command::Dirichlet(a) => run_dirichlet(a),
        Command::Verify(a) => run_verify(a),
    }
}

/// Turns `{"command": "cover2d", "f1": "a.json", "H": 6, ...}` into argv.
fn config_args(path: &Path) -> CliResult<Vec<String>> {
    let s = read_to_string(path)?;
    let v: Value = serde_json::from_str(&s).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let obj = v.as_object().ok_or_else(|| CliError::Usage("config must be a JSON object".into()))?;
    let command = obj
        .get("command")
        .and_then(Value::as_str)
        .ok_or_else(|| CliError::Usage("config needs a string \"command\"".into()))?;
    let mut args = vec![command.to_string()];
    for (key, value) in obj {
        if key == "command" {
            continue;
        }
        let flag = format!("--{}", key.replace('_', "-"));
        match value {
            Value::Bool(true) => args.push(flag),
            Value::Bool(false) | Value::Null => {}
            Value::String(s) => args.extend([flag, s.clone()]),
            Value::Number(n) => args.extend([flag, n.to_string()]),
            Value::Array(items) => {
                let parts: Vec<String> = items
                    .iter()
                    .map(|x| match x {
                        Value::String(s) => s.clone(),
                        other => other.to_string(),
                    })
                    .collect();
                args.extend([flag, parts.join(",")]);
            }
            Value::Object(_) => return Err(CliError::Usage(format!("config key {key:?} must not be an object"))),
        }
    }
    Ok(args)
}

fn argv() -> CliResult<Vec<String>> {
    let mut raw: Vec<String> = std::env::args().collect();
    let bin = if raw.is_empty() { "cartan".to_string() } else { raw.remove(0) };
    let mut out = vec![bin];
    if raw.first().map(String::as_str) == Some("--config") {
        let path = raw.get(1).ok_or_else(|| CliError::Usage("--config needs a path".into()))?;
        out.extend(config_args(Path::new(path))?);
        out.extend(raw.into_iter().skip(2));
    } else if let Some(rest) = raw.first().and_then(|a| a.strip_prefix("--config=")) {
        out.extend(config_args(Path::new(rest))?);
        out.extend(raw.into_iter().skip(1));
    } else {
        out.extend(raw);
    }
    Ok(out)
}

fn init_threads() -> CliResult<()> {
    if let Ok(v) = std::env::var("CARTAN_BERNSTEIN_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Usage(format!("CARTAN_BERNSTEIN_THREADS must be a positive integer, got {v:?}")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Failure(e.to_string()))?;
    }
    Ok(())
}

fn fail(err: CliError) -> ExitCode {
    match err {
        CliError::Usage(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        CliError::Failure(msg) => {
            let report = serde_json::json!({ "schema": SCHEMA, "pass": false, "failures": [msg] });
            println!("{}", serde_json::to_string_pretty(&report).unwrap_or_default());
            ExitCode::from(1)
        }
    }
}

fn main() -> ExitCode {
    let args = match argv() {
        Ok(a) => a,
        Err(e) => return fail(e),
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(e) = init_threads() {
        return fail(e);
    }
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => fail(e),
    }
}
