mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use multcorr::charsum::{burgess_corr, factor_modulus, qnr_pair_densities};
use multcorr::config::{load_config, parse_count};
use multcorr::correlate::{theorem13_check, CorrelationRequest};
use multcorr::dickmann::{self, default_table, IntegralMethod};
use multcorr::experiments::{run_experiment, sweep, sweep_values, ExperimentConfig, OmegaExpr, PARAM_KEYS};
use multcorr::multfunc::{stability_gap, strong_uniformity_deficiency, uniformity_deficiency, DEFAULT_PROBES};
use multcorr::{scan, sieve, Error, IntegralRequest, MultFuncSpec, SieveRequest};

use output::{fmt_float, object, render, to_value, Format};

#[derive(Parser, Debug)]
#[command(name = "multcorr", version, about = "Correlations of multiplicative functions at desk scale")]
#[command(propagate_version = true)]
struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true, env = "MULTCORR_THREADS", value_parser = clap::value_parser!(u64).range(1..=1024))]
    threads: Option<u64>,
    /// Emit JSON.
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,
    /// Emit CSV.
    #[arg(long, global = true)]
    csv: bool,
    /// Integers per sieve segment.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..=1 << 31))]
    segment_size: Option<u64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Print the factorization of every integer in [lo, hi).
    Factor {
        #[arg(long, value_name = "LO:HI", value_parser = parse_range)]
        range: (u64, u64),
    },
    /// Evaluate or tabulate the Dickmann function.
    Rho(RhoArgs),
    /// Dickmann-weighted integrals.
    #[command(subcommand)]
    Integral(IntegralCmd),
    /// Logarithmic correlation of two multiplicative functions.
    Correlate {
        #[arg(long)]
        g1: String,
        #[arg(long)]
        g2: String,
        #[arg(long, allow_negative_numbers = true)]
        h: i64,
        #[arg(long, value_parser = parse_x)]
        x: u64,
        #[arg(long, default_value = "logx", value_parser = parse_omega)]
        omega: OmegaExpr,
    },
    /// Real character sums.
    #[command(subcommand)]
    Charsum(CharsumCmd),
    /// Density experiments.
    #[command(subcommand)]
    Experiment(ExperimentCmd),
    /// Uniformity in arithmetic progressions.
    #[command(subcommand)]
    Uniformity(UniformityCmd),
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("mode").required(true).args(["u", "table"]))]
struct RhoArgs {
    /// Point at which to evaluate.
    #[arg(long)]
    u: Option<f64>,
    /// Tabulate with the given grid step up to UMAX.
    #[arg(long, value_name = "STEP,UMAX", value_parser = parse_table)]
    table: Option<(f64, f64)>,
    /// Write the table to this file instead of stdout.
    #[arg(long, requires = "table")]
    out: Option<PathBuf>,
    /// Residual tolerance of the march.
    #[arg(long, default_value_t = dickmann::DEFAULT_TOL)]
    tol: f64,
}

#[derive(Subcommand, Debug)]
enum IntegralCmd {
    /// Integral over the simplex u_i >= alpha, sum u_i <= 1.
    #[command(name = "I")]
    I {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        m: usize,
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
        /// Nodes per axis piece, or Monte Carlo samples.
        #[arg(long)]
        nodes: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Integral over the triangle.
    #[command(name = "T")]
    T {
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = dickmann::DEFAULT_T_NODES)]
        nodes: usize,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum MethodArg {
    Quadrature,
    MonteCarlo,
}

#[derive(Subcommand, Debug)]
enum CharsumCmd {
    /// Logarithmic average of chi(n(n+h)) over the tail window.
    Corr {
        #[arg(long = "Q")]
        q: u64,
        #[arg(long, allow_negative_numbers = true)]
        h: i64,
        #[arg(long, value_parser = parse_x)]
        x: u64,
        #[arg(long, default_value = "logx", value_parser = parse_omega)]
        omega: OmegaExpr,
    },
    /// Densities of consecutive quadratic nonresidues.
    Qnr {
        #[arg(long = "Q")]
        q: u64,
        #[arg(long, value_parser = parse_x)]
        x: u64,
    },
}

#[derive(Subcommand, Debug)]
enum ExperimentCmd {
    /// Run one experiment.
    Run {
        name: String,
        #[command(flatten)]
        common: ExperimentArgs,
    },
    /// Run an experiment across a range of one parameter.
    Sweep {
        name: String,
        /// NAME=START:STOP:STEP
        #[arg(long, value_parser = parse_sweep)]
        param: (String, f64, f64, f64),
        #[command(flatten)]
        common: ExperimentArgs,
    },
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    #[arg(long, value_parser = parse_x)]
    x: Option<u64>,
    /// Parameters as k=v,...
    #[arg(long, value_parser = parse_params)]
    params: Option<Params>,
    /// key=value file; flags given here override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_parser = parse_omega)]
    omega: Option<OmegaExpr>,
    /// full or tail
    #[arg(long)]
    window: Option<String>,
    /// log or natural
    #[arg(long)]
    weighting: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum UniformityCmd {
    /// Smallest eta with g in U(x, Q, eta).
    Deficiency {
        #[arg(long)]
        spec: String,
        #[arg(long, value_parser = parse_x)]
        x: u64,
        #[arg(long = "Q")]
        q: u64,
    },
    /// Worst deviation over probe points of the tail window.
    Strong {
        #[arg(long)]
        spec: String,
        #[arg(long, value_parser = parse_x)]
        x: u64,
        #[arg(long = "Q")]
        q: u64,
        #[arg(long, default_value = "logx", value_parser = parse_omega)]
        omega: OmegaExpr,
        #[arg(long, default_value_t = DEFAULT_PROBES)]
        probes: usize,
    },
    /// Progression mean over [x, 2x] against the one at scale x/y.
    Stability {
        #[arg(long)]
        spec: String,
        #[arg(long, value_parser = parse_x)]
        x: u64,
        /// Shrink factor y, as an omega expression.
        #[arg(long, default_value = "logx", value_parser = parse_omega)]
        shrink: OmegaExpr,
        #[arg(long, default_value_t = 1)]
        a: u64,
        #[arg(long, default_value_t = 3)]
        q: u64,
    },
}

fn parse_x(s: &str) -> Result<u64, String> {
    parse_count(s).map_err(|e| e.to_string())
}

fn parse_omega(s: &str) -> Result<OmegaExpr, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_range(s: &str) -> Result<(u64, u64), String> {
    let (lo, hi) = s.split_once(':').ok_or("expected LO:HI")?;
    Ok((parse_x(lo)?, parse_x(hi)?))
}

fn parse_table(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected STEP,UMAX")?;
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("bad number `{t}`"));
    Ok((num(a)?, num(b)?))
}

#[derive(Clone, Debug)]
struct Params(Vec<(String, f64)>);

fn parse_params(s: &str) -> Result<Params, String> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            let (k, v) = t.split_once('=').ok_or_else(|| format!("expected k=v, found `{t}`"))?;
            let k = k.trim();
            if !PARAM_KEYS.contains(&k) {
                return Err(format!("unknown parameter `{k}`"));
            }
            let v = v.trim().parse().map_err(|_| format!("bad value `{v}` for `{k}`"))?;
            Ok((k.to_string(), v))
        })
        .collect::<Result<_, _>>()
        .map(Params)
}

fn parse_sweep(s: &str) -> Result<(String, f64, f64, f64), String> {
    let (k, range) = s.split_once('=').ok_or("expected NAME=START:STOP:STEP")?;
    let parts: Vec<f64> = range
        .split(':')
        .map(|t| t.trim().parse().map_err(|_| format!("bad number `{t}`")))
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [a, b, c] => Ok((k.trim().to_string(), a, b, c)),
        _ => Err("expected NAME=START:STOP:STEP".into()),
    }
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

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Lib(Error::Parse(_)) => 2,
            Failure::Lib(Error::Numeric(_) | Error::Integrity(_)) => 4,
            Failure::Lib(_) | Failure::Io(_) => 3,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Lib(e) => e.to_string(),
            Failure::Io(m) => format!("io error: {m}"),
        }
    }
}

/// What a subcommand produced. `text` replaces the generic human rendering
/// and `rows` the generic CSV one.
struct Outcome {
    value: Value,
    text: Option<String>,
    rows: Option<Value>,
    seed: Option<u64>,
    default_format: Format,
}

impl Outcome {
    fn new(value: Value) -> Self {
        Self { value, text: None, rows: None, seed: None, default_format: Format::Human }
    }
}

fn parse_spec(s: &str, x: u64) -> Result<MultFuncSpec, Error> {
    MultFuncSpec::parse_with_x(s, Some(x))
}

fn factor(lo: u64, hi: u64) -> Result<Outcome, Failure> {
    let req = SieveRequest::new(lo, hi, scan::segment_size())?;
    let mut rows = Vec::new();
    let mut text = String::new();
    for seg in sieve::sieve_range(&req)? {
        for (n, f) in seg.iter() {
            let shown = f.to_string();
            text.push_str(&format!("{n}\t{shown}\n"));
            rows.push(json!({ "n": n, "factors": shown }));
        }
    }
    Ok(Outcome { text: Some(text), ..Outcome::new(Value::Array(rows)) })
}

fn rho(args: &RhoArgs) -> Result<Outcome, Failure> {
    if let Some(u) = args.u {
        let e = default_table().rho_at(u)?;
        let value = object([("u", json!(u)), ("rho", json!(e.value)), ("truncated", json!(e.truncated))]);
        let mut out = Outcome::new(to_value(&value));
        out.text = Some(format!("{}\n", fmt_float(e.value)));
        return Ok(out);
    }
    let (step, u_max) = args.table.expect("clap enforces --u or --table");
    let t = dickmann::build_rho::<f64>(step, u_max, args.tol)?;
    let h = t.step();
    let rows: Vec<Value> =
        t.values().iter().enumerate().map(|(i, &r)| json!({ "u": i as f64 * h, "rho": r })).collect();
    let table = to_value(&rows);
    let csv = output::csv(&table);
    match &args.out {
        Some(path) => {
            std::fs::write(path, &csv).map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))?;
            let summary = object([
                ("path", json!(path.display().to_string())),
                ("points", json!(rows.len())),
                ("step", json!(h)),
                ("u_max", json!(t.u_max())),
                ("max_residual", json!(t.max_residual())),
            ]);
            Ok(Outcome::new(to_value(&summary)))
        }
        None => Ok(Outcome { text: Some(csv), ..Outcome::new(table) }),
    }
}

fn integral(cmd: &IntegralCmd) -> Result<Outcome, Failure> {
    let table = default_table();
    match *cmd {
        IntegralCmd::I { alpha, m, method, nodes, seed } => {
            let mut req = IntegralRequest::new(alpha, m)?;
            if let Some(method) = method {
                let (method, default_n) = match method {
                    MethodArg::Quadrature => (IntegralMethod::TensorQuadrature, dickmann::DEFAULT_I_NODES),
                    MethodArg::MonteCarlo => (IntegralMethod::MonteCarlo, dickmann::DEFAULT_MC_SAMPLES),
                };
                req = req.with_method(method, nodes.unwrap_or(default_n));
            } else if let Some(n) = nodes {
                req = req.with_method(req.method, n);
            }
            if let Some(s) = seed {
                req = req.with_seed(s);
            }
            let r = dickmann::integral_i(table, &req)?;
            let mc = req.method == IntegralMethod::MonteCarlo;
            let value = object([
                ("alpha", json!(alpha)),
                ("m", json!(m)),
                ("method", to_value(&req.method)),
                ("nodes_or_samples", json!(req.nodes_or_samples)),
                ("seed", if mc { json!(req.seed) } else { Value::Null }),
                ("value", json!(r.value)),
                ("error_bound", json!(r.error_bound)),
            ]);
            Ok(Outcome { seed: mc.then_some(req.seed), ..Outcome::new(to_value(&value)) })
        }
        IntegralCmd::T { alpha, nodes } => {
            let r = dickmann::integral_t(table, alpha, nodes)?;
            let value = object([
                ("alpha", json!(alpha)),
                ("nodes", json!(nodes)),
                ("value", json!(r.value)),
                ("error_bound", json!(r.error_bound)),
            ]);
            Ok(Outcome::new(to_value(&value)))
        }
    }
}

fn experiment_config(name: &str, a: &ExperimentArgs) -> Result<ExperimentConfig, Error> {
    let mut cfg = match &a.config {
        Some(path) => load_config(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(x) = a.x {
        cfg.x = x;
    }
    for (k, v) in a.params.iter().flat_map(|p| &p.0) {
        cfg.params.insert(k.clone(), *v);
    }
    if let Some(o) = a.omega {
        cfg.omega = o;
    }
    if let Some(w) = &a.window {
        cfg.window = w.parse()?;
    }
    if let Some(w) = &a.weighting {
        cfg.weighting = Some(w.parse()?);
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if !multcorr::experiments::EXPERIMENTS.contains(&name) {
        return Err(Error::Parse(format!(
            "unknown experiment `{name}` (known: {})",
            multcorr::experiments::EXPERIMENTS.join(", ")
        )));
    }
    Ok(cfg)
}

fn experiment(cmd: &ExperimentCmd) -> Result<Outcome, Failure> {
    match cmd {
        ExperimentCmd::Run { name, common } => {
            let cfg = experiment_config(name, common)?;
            let r = run_experiment(name, &cfg)?;
            let mut value = to_value(&r.estimate);
            let obj = value.as_object_mut().expect("estimate is an object");
            obj.insert("experiment".into(), json!(r.name));
            obj.insert("components".into(), to_value(&r.components));
            let rows = to_value(&std::iter::once(&r.estimate).chain(&r.components).collect::<Vec<_>>());
            Ok(Outcome { seed: Some(cfg.seed), rows: Some(rows), ..Outcome::new(value) })
        }
        ExperimentCmd::Sweep { name, param, common } => {
            let cfg = experiment_config(name, common)?;
            let (key, start, stop, step) = param;
            let values = sweep_values(*start, *stop, *step)?;
            let rows = sweep(name, &cfg, key, &values)?;
            Ok(Outcome { seed: Some(cfg.seed), default_format: Format::Csv, ..Outcome::new(to_value(&rows)) })
        }
    }
}

fn uniformity(cmd: &UniformityCmd) -> Result<Outcome, Failure> {
    let value = match *cmd {
        UniformityCmd::Deficiency { ref spec, x, q } => to_value(&uniformity_deficiency(&parse_spec(spec, x)?, x, q)?),
        UniformityCmd::Strong { ref spec, x, q, omega, probes } => {
            to_value(&strong_uniformity_deficiency(&parse_spec(spec, x)?, x, q, omega.eval(x), probes)?)
        }
        UniformityCmd::Stability { ref spec, x, shrink, a, q } => {
            let g = parse_spec(spec, x)?;
            let y = shrink.eval(x);
            let gap = stability_gap(&g, x, y, a, q)?;
            to_value(&object([
                ("spec", json!(g.to_string())),
                ("x", json!(x)),
                ("y_shrink", json!(y)),
                ("a", json!(a)),
                ("q", json!(q)),
                ("gap", json!(gap)),
            ]))
        }
    };
    Ok(Outcome::new(value))
}

fn dispatch(cmd: &Cmd) -> Result<Outcome, Failure> {
    match cmd {
        Cmd::Factor { range: (lo, hi) } => factor(*lo, *hi),
        Cmd::Rho(args) => rho(args),
        Cmd::Integral(c) => integral(c),
        Cmd::Correlate { g1, g2, h, x, omega } => {
            let req = CorrelationRequest::new(parse_spec(g1, *x)?, parse_spec(g2, *x)?, *h, *x, omega.eval(*x))?;
            Ok(Outcome::new(to_value(&theorem13_check(&req)?)))
        }
        Cmd::Charsum(CharsumCmd::Corr { q, h, x, omega }) => {
            let m = factor_modulus(*q)?;
            Ok(Outcome::new(to_value(&burgess_corr(&m, *h, *x, omega.eval(*x))?)))
        }
        Cmd::Charsum(CharsumCmd::Qnr { q, x }) => {
            let m = factor_modulus(*q)?;
            Ok(Outcome::new(to_value(&qnr_pair_densities(&m, *x)?)))
        }
        Cmd::Experiment(c) => experiment(c),
        Cmd::Uniformity(c) => uniformity(c),
    }
}

fn subcommand_path(cmd: &Cmd) -> &'static str {
    match cmd {
        Cmd::Factor { .. } => "factor",
        Cmd::Rho(_) => "rho",
        Cmd::Integral(IntegralCmd::I { .. }) => "integral I",
        Cmd::Integral(IntegralCmd::T { .. }) => "integral T",
        Cmd::Correlate { .. } => "correlate",
        Cmd::Charsum(CharsumCmd::Corr { .. }) => "charsum corr",
        Cmd::Charsum(CharsumCmd::Qnr { .. }) => "charsum qnr",
        Cmd::Experiment(ExperimentCmd::Run { .. }) => "experiment run",
        Cmd::Experiment(ExperimentCmd::Sweep { .. }) => "experiment sweep",
        Cmd::Uniformity(UniformityCmd::Deficiency { .. }) => "uniformity deficiency",
        Cmd::Uniformity(UniformityCmd::Strong { .. }) => "uniformity strong",
        Cmd::Uniformity(UniformityCmd::Stability { .. }) => "uniformity stability",
    }
}

/// Runs the command; returns stdout bytes, exit code and manifest details.
fn run(cli: &Cli) -> (String, u8, Option<u64>) {
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n as usize).build_global() {
            eprintln!("error: cannot build thread pool: {e}");
            return (String::new(), 3, None);
        }
    }
    if let Some(s) = cli.segment_size {
        scan::set_segment_size(s);
    }
    match dispatch(&cli.cmd) {
        Ok(out) => {
            let format = match (cli.json, cli.csv) {
                (true, _) => Format::Json,
                (_, true) => Format::Csv,
                _ => out.default_format,
            };
            let stdout = match (format, &out.text, &out.rows) {
                (Format::Human, Some(t), _) => t.clone(),
                (Format::Csv, _, Some(rows)) => render(rows, format),
                _ => render(&out.value, format),
            };
            (stdout, 0, out.seed)
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            (String::new(), f.code(), None)
        }
    }
}

fn main() -> ExitCode {
    let started = Instant::now();
    let argv: Vec<String> = std::env::args().collect();
    let (subcommand, stdout, code, seed, threads) = match Cli::try_parse_from(&argv) {
        Ok(cli) => {
            let (stdout, code, seed) = run(&cli);
            (Some(subcommand_path(&cli.cmd)), stdout, code, seed, cli.threads)
        }
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            if code == 0 {
                return ExitCode::SUCCESS;
            }
            (None, String::new(), code, None, None)
        }
    };

    let mut out = std::io::stdout().lock();
    let written = out.write_all(stdout.as_bytes()).and_then(|_| out.flush());
    let code = if written.is_err() && code == 0 { 3 } else { code };
    let manifest = json!({
        "subcommand": subcommand,
        "args": &argv[1..],
        "version": env!("CARGO_PKG_VERSION"),
        "seed": seed,
        "threads": threads.unwrap_or(rayon::current_num_threads() as u64),
        "segment_size": scan::segment_size(),
        "wall_time_s": started.elapsed().as_secs_f64(),
        "stdout_sha256": format!("{:x}", Sha256::digest(stdout.as_bytes())),
        "exit_code": code,
    });
    eprintln!("{manifest}");
    ExitCode::from(code)
}
