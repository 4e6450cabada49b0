use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use conidx_cli::output::atomic_write;
use conidx_cli::{
    cache_key, evaluate, fmt_f64, parse_config, parse_config_value, run_index, CliError, PointJson, RunOptions,
    WindowCache, EXIT_FAIL, EXIT_PASS, EXIT_USAGE, SCHEMA_VERSION,
};
use conidx_core::harness::suites::{run_suite, Suite};
use conidx_core::{g_profile, g_s_profile, hurwitz_zeta, lerch_j1, EvalAt, SeriesTolerance};
use serde_json::{json, Map, Value};

#[derive(Parser)]
#[command(name = "conidx", version, about = "Index of convergence experiments for Lagrange and Shepard operators")]
struct Cli {
    /// Reserved; every computation is deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a special function.
    Zeta {
        #[arg(value_enum)]
        function: ZetaFn,
        /// Argument `x`, `a` or `t`.
        arg: f64,
        /// Exponent for `gs` and `hurwitz`.
        #[arg(long)]
        s: Option<f64>,
    },
    /// Value of one operator at a single degree.
    Eval {
        #[arg(value_enum)]
        kind: Kind,
        #[command(flatten)]
        params: OperatorArgs,
        #[arg(long)]
        m: Option<usize>,
        /// Evaluation abscissa on the first axis; the jump when omitted.
        #[arg(long)]
        at_x: Option<f64>,
        #[arg(long)]
        at_y: Option<f64>,
        /// Also evaluate the direct double sum and compare.
        #[arg(long)]
        cross_check: bool,
    },
    /// Run one index experiment from a config file or from flags.
    Index {
        /// Operator, when no config file is given.
        #[arg(value_enum)]
        kind: Option<Kind>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        params: OperatorArgs,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        checkpoints: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        cross_check: bool,
        /// JSON report path.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        cache_dir: Option<PathBuf>,
    },
    /// Run built-in verification suites (all of them by default).
    Verify {
        #[arg(value_enum)]
        suites: Vec<SuiteArg>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Inspect or clear the window cache.
    Cache {
        #[arg(value_enum)]
        action: CacheAction,
        #[arg(long)]
        cache_dir: Option<PathBuf>,
        /// Config whose window `key` and `warm` refer to.
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ZetaFn {
    /// `g(x)`
    G,
    /// `g_s(t)`
    Gs,
    /// `J(1, a)`
    J1,
    /// `ζ(s, a)`
    Hurwitz,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Lagrange1d,
    Lagrange2d,
    Shepard1d,
    Shepard2d,
}

impl Kind {
    fn name(self) -> &'static str {
        match self {
            Kind::Lagrange1d => "lagrange1d",
            Kind::Lagrange2d => "lagrange2d",
            Kind::Shepard1d => "shepard1d",
            Kind::Shepard2d => "shepard2d",
        }
    }

    fn is_lagrange(self) -> bool {
        matches!(self, Kind::Lagrange1d | Kind::Lagrange2d)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Lagrange1,
    Lagrange2,
    Shepard,
    Props,
}

impl SuiteArg {
    fn suite(self) -> Suite {
        match self {
            SuiteArg::Lagrange1 => Suite::Lagrange1,
            SuiteArg::Lagrange2 => Suite::Lagrange2,
            SuiteArg::Shepard => Suite::Shepard,
            SuiteArg::Props => Suite::Props,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CacheAction {
    List,
    Clear,
    Key,
    Warm,
}

/// Operator parameters. For Lagrange kinds `--y0` is `γ₀/π`; points are
/// `p/q` or a preset irrational name.
#[derive(Args)]
struct OperatorArgs {
    /// Degree `n`, or the window `N` for `index`.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    s: Option<f64>,
    /// `θ₀/π` as `p/q`.
    #[arg(long, conflicts_with = "theta_irrational")]
    theta_rational: Option<String>,
    /// `θ₀/π` as a preset name.
    #[arg(long)]
    theta_irrational: Option<String>,
    #[arg(long)]
    x0: Option<String>,
    #[arg(long)]
    y0: Option<String>,
    /// Value of the univariate Lagrange step at its jump.
    #[arg(long)]
    d: Option<f64>,
}

fn point_value(text: &str) -> Result<Value, CliError> {
    let p = PointJson::parse_arg(text).map_err(|e| CliError::Config(vec![e]))?;
    Ok(serde_json::to_value(p).expect("point serializes"))
}

impl OperatorArgs {
    /// Writes the given flags into a config object, overriding its fields.
    fn merge_into(&self, kind: Option<Kind>, obj: &mut Map<String, Value>) -> Result<(), CliError> {
        let lagrange = kind
            .map(Kind::is_lagrange)
            .or_else(|| obj.get("kind").and_then(Value::as_str).map(|k| k.starts_with("lagrange")))
            .unwrap_or(false);
        if let Some(n) = self.n {
            obj.insert("n".into(), json!(n));
        }
        if let Some(s) = self.s {
            obj.insert("s".into(), json!(s));
        }
        if let Some(d) = self.d {
            obj.insert("d".into(), json!(d));
        }
        if let Some(t) = &self.theta_rational {
            obj.insert("theta".into(), point_value(t)?);
        }
        if let Some(t) = &self.theta_irrational {
            obj.insert("theta".into(), json!({ "irrational": t }));
        }
        if let Some(x) = &self.x0 {
            obj.insert("x0".into(), point_value(x)?);
        }
        if let Some(y) = &self.y0 {
            obj.insert(if lagrange { "gamma" } else { "y0" }.into(), point_value(y)?);
        }
        Ok(())
    }
}

fn read_config_value(path: &PathBuf) -> Result<Value, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })?;
    // validated once the flag overrides are merged in
    serde_json::from_str(&text).map_err(|e| CliError::Config(vec![format!("malformed JSON: {e}")]))
}

fn zeta(function: ZetaFn, arg: f64, s: Option<f64>) -> Result<u8, CliError> {
    let tol = SeriesTolerance::default();
    let need_s = || s.ok_or_else(|| CliError::Config(vec!["--s is required for this function".into()]));
    let value = match function {
        ZetaFn::G => g_profile(arg)?,
        ZetaFn::Gs => g_s_profile(need_s()?, arg)?,
        ZetaFn::J1 => lerch_j1(arg, tol)?,
        ZetaFn::Hurwitz => hurwitz_zeta(need_s()?, arg, tol)?,
    };
    println!("{}", fmt_f64(value));
    Ok(EXIT_PASS)
}

fn eval(kind: Kind, params: &OperatorArgs, m: Option<usize>, at: (Option<f64>, Option<f64>), cross_check: bool) -> Result<u8, CliError> {
    let n = params.n.ok_or_else(|| CliError::Config(vec!["--n is required".into()]))?;
    let bivariate = matches!(kind, Kind::Lagrange2d | Kind::Shepard2d);
    let m = if bivariate {
        m.ok_or_else(|| CliError::Config(vec!["--m is required for bivariate operators".into()]))?
    } else {
        1
    };
    let mut obj = Map::new();
    obj.insert("schema_version".into(), json!(SCHEMA_VERSION));
    obj.insert("kind".into(), json!(kind.name()));
    params.merge_into(Some(kind), &mut obj)?;
    // degree limits are the operator's own; the window bound only matters for index runs
    obj.insert("n".into(), json!(16));
    let mut spec = parse_config_value(&Value::Object(obj))?.to_spec()?;
    spec.at_x = at.0.map_or(EvalAt::Jump, EvalAt::Value);
    spec.at_y = at.1.map_or(EvalAt::Jump, EvalAt::Value);
    println!("{}", fmt_f64(evaluate(&spec, n, m, cross_check)?));
    Ok(EXIT_PASS)
}

#[allow(clippy::too_many_arguments)]
fn index(
    kind: Option<Kind>,
    config: Option<PathBuf>,
    params: &OperatorArgs,
    epsilon: Option<f64>,
    checkpoints: Option<usize>,
    tol: Option<f64>,
    cross_check: bool,
    opts: RunOptions,
) -> Result<u8, CliError> {
    let mut value = match (&config, kind) {
        (Some(path), None) => read_config_value(path)?,
        (None, Some(k)) => json!({ "schema_version": SCHEMA_VERSION, "kind": k.name() }),
        (Some(_), Some(_)) => return Err(CliError::Config(vec!["give either --config or an operator kind, not both".into()])),
        (None, None) => return Err(CliError::Config(vec!["give --config or an operator kind".into()])),
    };
    let obj = value
        .as_object_mut()
        .ok_or_else(|| CliError::Config(vec!["config must be a JSON object".into()]))?;
    params.merge_into(kind, obj)?;
    if let Some(e) = epsilon {
        obj.insert("epsilon".into(), json!(e));
    }
    if let Some(k) = checkpoints {
        obj.insert("checkpoints".into(), json!(k));
    }
    if let Some(t) = tol {
        obj.insert("tol".into(), json!(t));
    }
    if cross_check {
        obj.insert("cross_check".into(), json!(true));
    }
    let config = parse_config_value(&value)?;
    let report = run_index(&config, &opts)?;
    for t in &report.targets {
        let index = t.estimate.lower;
        match (&t.predicted, &t.verdict) {
            (Some(p), Some(v)) => println!(
                "{:<28} index {:.4}  predicted {:.4}  delta {:+.4}  {:?}",
                t.target.to_string(),
                index,
                p.value(),
                v.delta,
                v.status
            ),
            _ => println!("{:<28} index {:.4}", t.target.to_string(), index),
        }
    }
    if let Some(r) = report.residual_mass {
        println!("residual mass {r:.4}");
    }
    Ok(if report.passed() { EXIT_PASS } else { EXIT_FAIL })
}

fn verify(suites: &[SuiteArg], out: Option<PathBuf>) -> Result<u8, CliError> {
    let list: Vec<Suite> = if suites.is_empty() {
        Suite::ALL.to_vec()
    } else {
        suites.iter().map(|s| s.suite()).collect()
    };
    let mut reports = Vec::new();
    for suite in list {
        let report = run_suite(suite)?;
        println!("{}", suite.name());
        for c in &report.checks {
            println!("  [{}] {}: {}", if c.pass { "pass" } else { "FAIL" }, c.name, c.detail);
        }
        reports.push(report);
    }
    if let Some(path) = out {
        atomic_write(&path, serde_json::to_string_pretty(&reports).expect("reports serialize").as_bytes())?;
    }
    Ok(if reports.iter().all(|r| r.passed()) { EXIT_PASS } else { EXIT_FAIL })
}

fn cache(action: CacheAction, dir: Option<PathBuf>, config: Option<PathBuf>) -> Result<u8, CliError> {
    let spec = || -> Result<_, CliError> {
        let path = config.as_ref().ok_or_else(|| CliError::Config(vec!["--config is required".into()]))?;
        let text = fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        parse_config(&text)?.to_spec()
    };
    let cache = || {
        dir.clone()
            .map(WindowCache::new)
            .ok_or_else(|| CliError::Config(vec!["--cache-dir is required".into()]))
    };
    match action {
        CacheAction::Key => println!("{}", cache_key(&spec()?)),
        CacheAction::List => {
            for e in cache()?.entries()? {
                println!("{}\t{}", e.bytes, e.path.display());
            }
        }
        CacheAction::Clear => println!("removed {} entries", cache()?.clear()?),
        CacheAction::Warm => {
            let cache = cache()?;
            let spec = spec()?;
            let (_, hit) = cache.window(&spec)?;
            println!("{} {}", if hit { "present" } else { "stored" }, cache.path_for(&spec).display());
        }
    }
    Ok(EXIT_PASS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Zeta { function, arg, s } => zeta(function, arg, s),
        Command::Eval {
            kind,
            params,
            m,
            at_x,
            at_y,
            cross_check,
        } => eval(kind, &params, m, (at_x, at_y), cross_check),
        Command::Index {
            kind,
            config,
            params,
            epsilon,
            checkpoints,
            tol,
            cross_check,
            out,
            csv,
            cache_dir,
        } => index(kind, config, &params, epsilon, checkpoints, tol, cross_check, RunOptions { out, csv, cache_dir }),
        Command::Verify { suites, out } => verify(&suites, out),
        Command::Cache { action, cache_dir, config } => cache(action, cache_dir, config),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
