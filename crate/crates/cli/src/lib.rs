//! Command-line front end: config parsing, report and CSV emission, and the
//! window cache.

pub mod cache;
pub mod config;
pub mod error;
pub mod output;

use std::path::{Path, PathBuf};
use std::time::Instant;

use conidx_core::harness::run_index_experiment_on;
use conidx_core::{
    generate_window, lagrange_eval_2d, lagrange_step, shepard_eval_1d, shepard_eval_2d, Abscissa, EvalAt,
    ExperimentSpec, Operator, Orientation, SeqWindow, ShepardParams, StepFn1D, StepFn2D,
};

pub use cache::{cache_key, WindowCache};
pub use config::{parse_config, parse_config_value, ExperimentConfig, PointJson, SCHEMA_VERSION};
pub use error::{CliError, EXIT_FAIL, EXIT_PASS, EXIT_USAGE};
pub use output::{emit_csv, emit_report, fmt_f64, RunReport, VERSION};

/// Where an `index` run writes; each field overrides the config's `output`.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub out: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
}

/// Cache directory: explicit, else beside the report.
fn cache_dir(opts: &RunOptions, report: Option<&Path>) -> Option<PathBuf> {
    opts.cache_dir.clone().or_else(|| {
        report.map(|p| {
            p.parent()
                .filter(|d| !d.as_os_str().is_empty())
                .unwrap_or(Path::new("."))
                .join(".conidx-cache")
        })
    })
}

/// Runs one experiment and writes whatever outputs were requested.
pub fn run_index(config: &ExperimentConfig, opts: &RunOptions) -> Result<RunReport, CliError> {
    let start = Instant::now();
    let spec = config.to_spec()?;
    let paths = config.output.clone().unwrap_or_default();
    let report_path = opts.out.clone().or(paths.report);
    let csv_path = opts.csv.clone().or(paths.csv);

    let win = match cache_dir(opts, report_path.as_deref()) {
        Some(dir) => WindowCache::new(dir).window(&spec)?.0,
        None => generate_window(&spec)?,
    };
    if config.cross_check {
        cross_check_window(&spec, &win)?;
    }
    let outcome = run_index_experiment_on(&spec, &win)?;
    let report = RunReport::new(config.clone(), &outcome, start.elapsed().as_millis() as u64);
    if let Some(p) = &csv_path {
        emit_csv(&win, p)?;
    }
    if let Some(p) = &report_path {
        emit_report(&report, p)?;
    }
    Ok(report)
}

/// Compares a product-form window with the direct double sum at a spread
/// of index pairs.
pub fn cross_check_window(spec: &ExperimentSpec, win: &SeqWindow) -> Result<(), CliError> {
    if !spec.operator.is_bivariate() {
        return Ok(());
    }
    let len = win.len();
    let picks = [2, 3, len / 4, len / 2, len - 1, len];
    for &n in &picks {
        for &m in &picks {
            let direct = evaluate(spec, n, m, true)?;
            let stored = win.value(n, m);
            if (direct - stored).abs() > 1e-12 {
                return Err(conidx_core::Error::CrossCheckMismatch((direct - stored).abs()).into());
            }
        }
    }
    Ok(())
}

/// Value of the operator configured in `spec` at degree `n` (and `m`).
/// With `cross_check`, bivariate values are also summed directly.
pub fn evaluate(spec: &ExperimentSpec, n: usize, m: usize, cross_check: bool) -> Result<f64, CliError> {
    spec.validate()?;
    let s = spec.s.unwrap_or(1.0);
    let unit_point = |at: EvalAt, jump: Abscissa| match at {
        EvalAt::Jump => jump,
        EvalAt::Value(v) => Abscissa::Value(v),
    };
    let value = match spec.operator {
        Operator::Lagrange1d => {
            let h = StepFn1D::new(Abscissa::ChebAngle(spec.x), Orientation::Left0Right1 { d: spec.d });
            lagrange_step(&h, n, spec.at_x)
        }
        Operator::Lagrange2d => {
            let y = spec.y.expect("validated");
            let h = StepFn2D::new(Abscissa::ChebAngle(spec.x), Abscissa::ChebAngle(y), spec.convention);
            lagrange_eval_2d(&h, n, m, spec.at_x, spec.at_y, cross_check)?
        }
        Operator::Shepard1d => {
            let jump = Abscissa::Unit(spec.x);
            let h = StepFn1D::new(jump, spec.convention.factor());
            shepard_eval_1d(&h, &ShepardParams::new(s, n)?, &unit_point(spec.at_x, jump))?
        }
        Operator::Shepard2d => {
            let (jx, jy) = (Abscissa::Unit(spec.x), Abscissa::Unit(spec.y.expect("validated")));
            let h = StepFn2D::new(jx, jy, spec.convention);
            shepard_eval_2d(
                &h,
                &ShepardParams::new(s, n)?,
                &ShepardParams::new(s, m)?,
                &unit_point(spec.at_x, jx),
                &unit_point(spec.at_y, jy),
                cross_check,
            )?
        }
    };
    Ok(value)
}
