//! CSV and JSON emission. Every file is written to a temporary sibling and
//! renamed into place, so readers never see a partial file.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use conidx_core::density::{Prediction, Target, Verdict};
use conidx_core::harness::ExperimentOutcome;
use conidx_core::{Dim, SeqWindow};
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(CliError::io(dir))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(format!(".tmp{}", std::process::id()));
    let tmp = std::path::PathBuf::from(tmp);
    let write = || -> std::io::Result<()> {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    };
    write().map_err(|e| {
        let _ = fs::remove_file(&tmp);
        CliError::io(path)(e)
    })
}

/// `n,value` rows for a single sequence, `n,m,value` rows (row-major) for a
/// double one.
pub fn window_csv(win: &SeqWindow) -> String {
    let len = win.len();
    let mut out = String::new();
    match win.dim() {
        Dim::One => {
            out.push_str("n,value\n");
            for n in 1..=len {
                writeln!(out, "{n},{}", fmt_f64(win.value(n, 1))).unwrap();
            }
        }
        Dim::Two => {
            out.push_str("n,m,value\n");
            for n in 1..=len {
                for m in 1..=len {
                    writeln!(out, "{n},{m},{}", fmt_f64(win.value(n, m))).unwrap();
                }
            }
        }
    }
    out
}

pub fn emit_csv(win: &SeqWindow, path: &Path) -> Result<(), CliError> {
    atomic_write(path, window_csv(win).as_bytes())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateEntry {
    pub checkpoints: Vec<usize>,
    pub ratios: Vec<f64>,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictEntry {
    pub status: Status,
    /// Signed `estimate − predicted`.
    pub delta: f64,
    pub tol: f64,
}

impl From<Verdict> for VerdictEntry {
    fn from(v: Verdict) -> Self {
        Self {
            status: if v.pass { Status::Pass } else { Status::Fail },
            delta: v.delta,
            tol: v.tol,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetEntry {
    pub target: Target,
    pub epsilon: Option<f64>,
    pub estimate: EstimateEntry,
    pub predicted: Option<Prediction>,
    pub verdict: Option<VerdictEntry>,
    /// Explicit subsequences checked for this cluster; they enter the
    /// verdict.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<conidx_core::harness::WitnessReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: ExperimentConfig,
    pub targets: Vec<TargetEntry>,
    pub residual_mass: Option<f64>,
    pub runtime_ms: u64,
    pub version: String,
}

impl RunReport {
    pub fn new(config: ExperimentConfig, outcome: &ExperimentOutcome, runtime_ms: u64) -> Self {
        let targets = outcome
            .targets
            .iter()
            .map(|c| {
                let r = &c.report;
                // a failing witness fails the cluster even if the estimate is in range
                let verdict = r.verdict.map(|v| {
                    let mut e = VerdictEntry::from(v);
                    if !c.passed() {
                        e.status = Status::Fail;
                    }
                    e
                });
                TargetEntry {
                    target: r.target.clone(),
                    epsilon: r.epsilon,
                    estimate: EstimateEntry {
                        checkpoints: r.estimate.checkpoints.clone(),
                        ratios: r.estimate.ratios.clone(),
                        lower: r.estimate.lower_est,
                        upper: r.estimate.upper_est,
                    },
                    predicted: r.predicted,
                    verdict,
                    witnesses: c.witnesses.clone(),
                }
            })
            .collect();
        Self {
            config,
            targets,
            residual_mass: outcome.residual_mass,
            runtime_ms,
            version: VERSION.to_string(),
        }
    }

    pub fn passed(&self) -> bool {
        self.targets
            .iter()
            .all(|t| t.verdict.map_or(true, |v| v.status == Status::Pass))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub fn emit_report(report: &RunReport, path: &Path) -> Result<(), CliError> {
    atomic_write(path, report.to_json().as_bytes())
}
