use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use schwarzian_lab::classify::{
    check_c_beta, check_convex_order, check_kaplan, check_merom_convex, check_merom_starlike, check_starlike_order,
    BoundExpr, ClassVerdict, ClassifyError, GridSpec, JetSource,
};
use schwarzian_lab::constants::{c_alpha, delta_max, phi_psi, BetaParam, OrderAlpha, BISECTION_TOL};
use schwarzian_lab::expr::{parse, ParamEnv, ParseError};
use schwarzian_lab::ode::{fmt_num, ratio_schwarzian_check, solve_ray, theorem1b_witness, OdeError, PotentialP};
use schwarzian_lab::series::{a_to_b, b_to_a, schwarzian_series, series_arith, SeriesJson, SeriesOp, TruncatedSeries};
use schwarzian_lab::verify::{run_check, run_suite, SuiteConfig, SuiteMode, CRITERIA};

const THREADS_ENV: &str = "SCHWARZIAN_LAB_THREADS";

#[derive(Parser)]
#[command(name = "schwarzian-lab", version, about = "Schwarzian-derivative constants, class checks and ODE constructions")]
struct Cli {
    /// Report elapsed_ms as 0 so identical runs print identical bytes.
    #[arg(long, global = true)]
    no_timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// c_α for an order α, or φ, ψ and δ_max for a β.
    Constants(ConstantsArgs),
    /// Check a function against one of the geometric classes on a disk grid.
    Classify(ClassifyArgs),
    /// Real-axis point showing √c cot(√c z) is not convex of order α when c > c_α.
    Witness(WitnessArgs),
    /// Integrate w'' + p w = 0 along one ray and dump the solution as CSV.
    Ode(OdeArgs),
    /// Sweep η over [0, φ(β)] and write (η, δ_max) as CSV.
    Region(RegionArgs),
    /// Run the acceptance battery.
    VerifySuite(SuiteArgs),
    /// Truncated-series operations on JSON operands.
    Series(SeriesArgs),
}

#[derive(Args)]
struct ConstantsArgs {
    #[arg(long, conflicts_with = "beta", required_unless_present = "beta")]
    alpha: Option<f64>,
    /// β ≥ 3/2 or "inf".
    #[arg(long)]
    beta: Option<String>,
    #[arg(long, requires = "beta")]
    eta: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ClassName {
    MeromConvex,
    MeromStarlike,
    Convex,
    Starlike,
    Cbeta,
    Kaplan,
}

#[derive(Args)]
struct ClassifyArgs {
    #[arg(long)]
    function: String,
    /// Parameter binding `name=value`; the value may be any constant expression.
    #[arg(long = "param")]
    params: Vec<String>,
    #[arg(long = "class", value_enum)]
    class: ClassName,
    /// α for the meromorphic classes, β for convex and starlike.
    #[arg(long)]
    order: Option<f64>,
    /// β ≥ 3/2 or "inf" for cbeta.
    #[arg(long)]
    beta: Option<String>,
    /// rmin:rmax:nr:ntheta
    #[arg(long, default_value = "0.001:0.99:64:256")]
    grid: String,
    /// Circle radius for kaplan.
    #[arg(long, default_value_t = 0.95)]
    radius: f64,
    /// Quadrature nodes for kaplan.
    #[arg(long, default_value_t = 1024)]
    n_theta: usize,
}

#[derive(Args)]
struct WitnessArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    c: f64,
}

#[derive(Args)]
struct OdeArgs {
    /// Expression for p(z).
    #[arg(long)]
    p: String,
    #[arg(long = "param")]
    params: Vec<String>,
    #[arg(long, default_value_t = 0.0)]
    theta: f64,
    #[arg(long, default_value_t = 0.95)]
    r_max: f64,
    #[arg(long, default_value_t = 1024)]
    steps: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RegionArgs {
    #[arg(long)]
    beta: String,
    #[arg(long, default_value_t = 100)]
    eta_steps: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SuiteArgs {
    #[arg(long, conflicts_with = "full")]
    fast: bool,
    #[arg(long)]
    full: bool,
    /// Run only the listed criteria.
    #[arg(long = "only", value_delimiter = ',')]
    only: Vec<u8>,
    /// Shift every c_α by this amount (negative control).
    #[arg(long, default_value_t = 0.0, hide = true)]
    tamper_c_alpha: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum SeriesCmd {
    Add,
    Mul,
    Div,
    Derivative,
    BToA,
    AToB,
    Schwarzian,
}

#[derive(Args)]
struct SeriesArgs {
    #[arg(long, value_enum)]
    op: SeriesCmd,
    /// `{"lead": k, "coeffs": [[re, im], ...]}`
    #[arg(long)]
    a: String,
    #[arg(long)]
    b: Option<String>,
}

#[derive(Serialize)]
struct RunReport {
    command: &'static str,
    inputs: BTreeMap<&'static str, Value>,
    results: Value,
    elapsed_ms: u64,
    version: &'static str,
}

/// Exit-code contract shared by every subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Holds = 0,
    Fails = 1,
    Usage = 2,
    Io = 3,
}

struct Failure {
    outcome: Outcome,
    message: String,
    results: Value,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        let message = message.into();
        Self { outcome: Outcome::Usage, results: json!({ "error": message }), message }
    }

    fn io(path: &std::path::Path, e: impl std::fmt::Display) -> Self {
        let message = format!("{}: {e}", path.display());
        Self { outcome: Outcome::Io, results: json!({ "error": message }), message }
    }
}

struct Success {
    outcome: Outcome,
    summary: String,
    results: Value,
}

type Inputs = BTreeMap<&'static str, Value>;

fn point(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn parse_beta(text: &str) -> Result<BetaParam, Failure> {
    let beta = BetaParam::parse(text).map_err(Failure::usage)?;
    if let BetaParam::Finite(b) = beta {
        BetaParam::new(b).map_err(|e| Failure::usage(e.to_string()))
    } else {
        Ok(beta)
    }
}

fn parse_alpha(alpha: f64) -> Result<OrderAlpha, Failure> {
    OrderAlpha::new(alpha).map_err(|e| Failure::usage(e.to_string()))
}

fn parse_failure(text: &str, e: ParseError) -> Failure {
    let message = match e.column() {
        Some(col) => format!("{e}\n  {text}\n  {}^", " ".repeat(col - 1)),
        None => e.to_string(),
    };
    Failure { outcome: Outcome::Usage, results: json!({ "error": e.to_string(), "offset": e.offset() }), message }
}

fn bind(text: &str, params: &[String]) -> Result<BoundExpr, Failure> {
    let expr = parse(text).map_err(|e| parse_failure(text, e))?;
    let mut env = ParamEnv::new();
    for p in params {
        let (name, value) = ParamEnv::parse_binding(p).map_err(Failure::usage)?;
        env.insert(&name, value);
    }
    BoundExpr::new(expr, env).map_err(|e| Failure::usage(e.to_string()))
}

fn classify_failure(e: ClassifyError) -> Failure {
    // these disqualify membership in every class checked here
    let outcome = match e {
        ClassifyError::NotLocallyUnivalent { .. } | ClassifyError::ZeroOfF { .. } | ClassifyError::ZeroOfG { .. } => {
            Outcome::Fails
        }
        _ => Outcome::Usage,
    };
    let results = json!({ "holds": false, "error": e.to_string(), "witness": e.witness().map(point) });
    Failure { outcome, message: e.to_string(), results }
}

fn cmd_constants(a: &ConstantsArgs, inputs: &mut Inputs) -> Result<Success, Failure> {
    if let Some(alpha) = a.alpha {
        inputs.insert("alpha", json!(alpha));
        let c = c_alpha(parse_alpha(alpha)?, BISECTION_TOL);
        return Ok(Success { outcome: Outcome::Holds, summary: format!("c_alpha({alpha}) = {c}"), results: json!({ "c_alpha": c }) });
    }
    let beta_text = a.beta.as_deref().expect("clap requires --alpha or --beta");
    let beta = parse_beta(beta_text)?;
    inputs.insert("beta", json!(beta));
    let (phi, psi) = phi_psi(beta);
    let mut results = json!({ "phi": phi, "psi": psi });
    let mut summary = format!("beta = {beta}: phi = {phi}, psi = {psi}");
    let eta = a.eta.unwrap_or(0.0);
    if a.eta.is_some() {
        inputs.insert("eta", json!(eta));
    }
    let d = delta_max(eta, beta, BISECTION_TOL).map_err(|e| Failure::usage(e.to_string()))?;
    results["delta_max"] = json!(d);
    results["eta"] = json!(eta);
    summary.push_str(&format!(", delta_max(eta = {eta}) = {d}"));
    Ok(Success { outcome: Outcome::Holds, summary, results })
}

fn verdict_success(class: &str, v: ClassVerdict) -> Success {
    let outcome = if v.holds { Outcome::Holds } else { Outcome::Fails };
    let summary = format!(
        "{class}: {} (worst margin {:e} at {:.6})",
        if v.holds { "holds" } else { "fails" },
        v.worst_margin,
        v.witness
    );
    Success { outcome, summary, results: serde_json::to_value(v).expect("verdict serializes") }
}

fn cmd_classify(a: &ClassifyArgs, inputs: &mut Inputs) -> Result<Success, Failure> {
    inputs.insert("function", json!(a.function));
    inputs.insert("params", json!(a.params));
    let f = bind(&a.function, &a.params)?;
    let grid = GridSpec::parse(&a.grid).map_err(|e| Failure::usage(e.to_string()))?;
    let order = || a.order.ok_or_else(|| Failure::usage("this class needs --order"));
    let name = ClassName::to_possible_value(&a.class).expect("no skipped variants").get_name().to_owned();
    inputs.insert("class", json!(name));
    if !matches!(a.class, ClassName::Kaplan) {
        inputs.insert("grid", json!(grid));
    }
    let verdict = match a.class {
        ClassName::MeromConvex => {
            let alpha = order()?;
            inputs.insert("order", json!(alpha));
            check_merom_convex(&f, parse_alpha(alpha)?, &grid)
        }
        ClassName::MeromStarlike => {
            let alpha = order()?;
            inputs.insert("order", json!(alpha));
            check_merom_starlike(&f, parse_alpha(alpha)?, &grid)
        }
        ClassName::Convex => {
            let b = order()?;
            inputs.insert("order", json!(b));
            check_convex_order(&f, b, &grid)
        }
        ClassName::Starlike => {
            let b = order()?;
            inputs.insert("order", json!(b));
            check_starlike_order(&f, b, &grid)
        }
        ClassName::Cbeta => {
            let beta = parse_beta(a.beta.as_deref().ok_or_else(|| Failure::usage("cbeta needs --beta"))?)?;
            inputs.insert("beta", json!(beta));
            check_c_beta(&f, beta, &grid)
        }
        ClassName::Kaplan => {
            inputs.insert("radius", json!(a.radius));
            inputs.insert("n_theta", json!(a.n_theta));
            let (ok, prof) = check_kaplan(&f, a.radius, a.n_theta).map_err(classify_failure)?;
            let results = json!({
                "holds": ok,
                "min_arc": prof.min_arc,
                "total": prof.total(),
                "quadrature_tol": prof.quadrature_tol,
            });
            let summary = format!("kaplan at r = {}: {} (min arc {})", a.radius, if ok { "holds" } else { "fails" }, prof.min_arc);
            let outcome = if ok { Outcome::Holds } else { Outcome::Fails };
            return Ok(Success { outcome, summary, results });
        }
    };
    Ok(verdict_success(&name, verdict.map_err(classify_failure)?))
}

fn cmd_witness(a: &WitnessArgs, inputs: &mut Inputs) -> Result<Success, Failure> {
    inputs.insert("alpha", json!(a.alpha));
    inputs.insert("c", json!(a.c));
    let alpha = parse_alpha(a.alpha)?;
    let x0 = theorem1b_witness(alpha, a.c).map_err(|e| Failure::usage(e.to_string()))?;
    let f = BoundExpr::new(parse("sqrt(c)*cot(sqrt(c)*z)").expect("literal parses"), ParamEnv::new().with("c", a.c))
        .expect("c is bound");
    let j = f.jet(Complex64::new(x0, 0.0)).map_err(|e| Failure::usage(e.to_string()))?;
    let margin = -(1.0 + x0 * j.d2 / j.d1).re - a.alpha;
    let results = json!({ "x0": x0, "margin": margin, "c_alpha": c_alpha(alpha, BISECTION_TOL) });
    Ok(Success { outcome: Outcome::Holds, summary: format!("x0 = {x0}, margin {margin:e}"), results })
}

fn cmd_ode(a: &OdeArgs, inputs: &mut Inputs) -> Result<Success, Failure> {
    inputs.insert("p", json!(a.p));
    inputs.insert("params", json!(a.params));
    inputs.insert("theta", json!(a.theta));
    inputs.insert("r_max", json!(a.r_max));
    inputs.insert("steps", json!(a.steps));
    inputs.insert("out", json!(a.out));
    let p = PotentialP::Expr(bind(&a.p, &a.params)?);
    let ode_failure = |e: OdeError| Failure::usage(e.to_string());
    let sol = solve_ray(&p, a.theta, a.r_max, a.steps).map_err(ode_failure)?;
    let residual = ratio_schwarzian_check(&p, &sol).map_err(ode_failure)?;
    let file = File::create(&a.out).map_err(|e| Failure::io(&a.out, e))?;
    sol.write_csv(BufWriter::new(file)).map_err(|e| Failure::io(&a.out, e))?;
    let last = sol.len() - 1;
    let results = json!({
        "nodes": sol.len(),
        "wronskian_drift": sol.wronskian_drift(),
        "schwarzian_residual": residual,
        "w1_end": point(sol.w1[last]),
        "w2_end": point(sol.w2[last]),
    });
    let summary = format!("{} nodes written to {}, Wronskian drift {:e}", sol.len(), a.out.display(), sol.wronskian_drift());
    Ok(Success { outcome: Outcome::Holds, summary, results })
}

fn cmd_region(a: &RegionArgs, inputs: &mut Inputs) -> Result<Success, Failure> {
    let beta = parse_beta(&a.beta)?;
    inputs.insert("beta", json!(beta));
    inputs.insert("eta_steps", json!(a.eta_steps));
    inputs.insert("out", json!(a.out));
    if a.eta_steps < 1 {
        return Err(Failure::usage("--eta-steps must be at least 1"));
    }
    let (phi, _) = phi_psi(beta);
    let rows = (0..=a.eta_steps)
        .map(|k| {
            // the last row sits just inside the open condition η < φ
            let eta = if k == a.eta_steps { phi * (1.0 - 1e-12) } else { phi * k as f64 / a.eta_steps as f64 };
            delta_max(eta, beta, BISECTION_TOL).map(|d| (eta, d))
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Failure::usage(e.to_string()))?;
    let io_err = |e: csv::Error| Failure::io(&a.out, e);
    let mut w = csv::Writer::from_path(&a.out).map_err(io_err)?;
    w.write_record(["eta", "delta_max"]).map_err(io_err)?;
    for (eta, d) in &rows {
        w.write_record([fmt_num(*eta), fmt_num(*d)]).map_err(io_err)?;
    }
    w.flush().map_err(|e| Failure::io(&a.out, e))?;
    let results = json!({ "rows": rows.len(), "phi": phi, "delta_max_at_zero": rows[0].1 });
    Ok(Success { outcome: Outcome::Holds, summary: format!("{} rows written to {}", rows.len(), a.out.display()), results })
}

fn cmd_verify_suite(a: &SuiteArgs, inputs: &mut Inputs, out: &mut impl Write) -> Result<Success, Failure> {
    let mode = if a.fast { SuiteMode::Fast } else { SuiteMode::Full };
    inputs.insert("mode", json!(if a.fast { "fast" } else { "full" }));
    if !a.only.is_empty() {
        inputs.insert("only", json!(a.only));
    }
    if a.tamper_c_alpha != 0.0 {
        inputs.insert("tamper_c_alpha", json!(a.tamper_c_alpha));
    }
    let cfg = SuiteConfig { mode, c_alpha_offset: a.tamper_c_alpha };
    let results = if a.only.is_empty() {
        run_suite(&cfg)
    } else {
        a.only
            .iter()
            .map(|&id| run_check(id, &cfg).ok_or_else(|| Failure::usage(format!("no criterion {id} (1..={})", CRITERIA.len()))))
            .collect::<Result<Vec<_>, _>>()?
    };
    for r in &results {
        writeln!(out, "{}", serde_json::to_string(r).expect("check result serializes")).ok();
        eprintln!("[{}] {:>2} {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.id, r.name, r.detail);
    }
    let failed: Vec<u8> = results.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    let summary = format!("{} of {} checks passed", results.len() - failed.len(), results.len());
    let outcome = if failed.is_empty() { Outcome::Holds } else { Outcome::Fails };
    Ok(Success { outcome, summary, results: json!({ "checks": results.len(), "failed": failed }) })
}

fn read_series(text: &str) -> Result<TruncatedSeries, Failure> {
    let j: SeriesJson = serde_json::from_str(text).map_err(|e| Failure::usage(format!("series JSON: {e}")))?;
    TruncatedSeries::from_json(&j).map_err(|e| Failure::usage(e.to_string()))
}

fn cmd_series(a: &SeriesArgs, inputs: &mut Inputs) -> Result<Success, Failure> {
    let lhs = read_series(&a.a)?;
    inputs.insert("a", serde_json::to_value(lhs.to_json()).expect("series serializes"));
    let rhs = a.b.as_deref().map(read_series).transpose()?;
    if let Some(b) = &rhs {
        inputs.insert("b", serde_json::to_value(b.to_json()).expect("series serializes"));
    }
    let binary = |op: SeriesOp| {
        let b = rhs.as_ref().ok_or_else(|| Failure::usage("this operation needs --b"))?;
        series_arith(op, &lhs, Some(b)).map_err(|e| Failure::usage(e.to_string()))
    };
    let s = |r: Result<TruncatedSeries, _>| r.map_err(|e: schwarzian_lab::series::SeriesError| Failure::usage(e.to_string()));
    let result = match a.op {
        SeriesCmd::Add => binary(SeriesOp::Add)?,
        SeriesCmd::Mul => binary(SeriesOp::Mul)?,
        SeriesCmd::Div => binary(SeriesOp::Div)?,
        SeriesCmd::Derivative => s(series_arith(SeriesOp::Derivative, &lhs, None))?,
        SeriesCmd::BToA => s(b_to_a(&lhs))?,
        SeriesCmd::AToB => s(a_to_b(&lhs))?,
        SeriesCmd::Schwarzian => s(schwarzian_series(&lhs))?,
    };
    let summary = format!("result has lead {} and {} coefficients", result.lead(), result.coeffs().len());
    let results = serde_json::to_value(result.to_json()).expect("series serializes");
    Ok(Success { outcome: Outcome::Holds, summary, results })
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(text) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let n: usize = text
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::usage(format!("{THREADS_ENV} must be a positive integer, got {text:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::usage(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let mut inputs = Inputs::new();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let (command, result) = match &cli.command {
        Command::Constants(a) => ("constants", configure_threads().and_then(|_| cmd_constants(a, &mut inputs))),
        Command::Classify(a) => ("classify", configure_threads().and_then(|_| cmd_classify(a, &mut inputs))),
        Command::Witness(a) => ("witness", configure_threads().and_then(|_| cmd_witness(a, &mut inputs))),
        Command::Ode(a) => ("ode", configure_threads().and_then(|_| cmd_ode(a, &mut inputs))),
        Command::Region(a) => ("region", configure_threads().and_then(|_| cmd_region(a, &mut inputs))),
        Command::VerifySuite(a) => ("verify-suite", configure_threads().and_then(|_| cmd_verify_suite(a, &mut inputs, &mut out))),
        Command::Series(a) => ("series", configure_threads().and_then(|_| cmd_series(a, &mut inputs))),
    };
    let (outcome, results) = match result {
        Ok(s) => {
            eprintln!("{command}: {}", s.summary);
            (s.outcome, s.results)
        }
        Err(f) => {
            eprintln!("{command}: error: {}", f.message);
            (f.outcome, f.results)
        }
    };
    let elapsed_ms = if cli.no_timing { 0 } else { start.elapsed().as_millis() as u64 };
    let report = RunReport { command, inputs, results, elapsed_ms, version: env!("CARGO_PKG_VERSION") };
    let line = serde_json::to_string(&report).expect("report serializes");
    if writeln!(out, "{line}").and_then(|_| out.flush()).is_err() {
        return ExitCode::from(Outcome::Io as u8);
    }
    ExitCode::from(outcome as u8)
}
