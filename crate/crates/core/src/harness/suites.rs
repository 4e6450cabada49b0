//! Built-in verification suites, grouped by operator family.

use serde::{Deserialize, Serialize};

use crate::density::{default_checkpoints, index_to_target, Dilation, Interval, Prediction, SeqWindow, Target};
use crate::error::Result;
use crate::lagrange::{fn_sigma_decomposition, lagrange_step, EvalAt};
use crate::point::{AngleSpec, NamedIrrational, PointSpec};
use crate::step::{Abscissa, Convention, Orientation, StepFn1D};

use super::props::run_property_suite;
use super::rules::{check_product_rule, check_uniform_limit_rule};
use super::scan::{uniform_convergence_scan, Region, ScanOperator};
use super::{run_index_experiment, ExperimentOutcome, ExperimentSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Lagrange1,
    Lagrange2,
    Shepard,
    Props,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Lagrange1, Suite::Lagrange2, Suite::Shepard, Suite::Props];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Lagrange1 => "lagrange1",
            Suite::Lagrange2 => "lagrange2",
            Suite::Shepard => "shepard",
            Suite::Props => "props",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.name() == name)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, pass: bool, detail: String) -> Self {
        Self {
            name: name.to_string(),
            pass,
            detail,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

fn rat(p: u64, q: u64) -> PointSpec {
    PointSpec::Rational { p, q }
}

fn summarize(out: &ExperimentOutcome) -> String {
    let parts: Vec<String> = out
        .targets
        .iter()
        .map(|t| {
            let pred = t.report.predicted.map(|p| p.value()).unwrap_or(f64::NAN);
            format!("{}: {:.4} (predicted {:.4})", t.report.target, t.report.index(), pred)
        })
        .collect();
    let mut s = format!("eps={:.4}; {}", out.epsilon, parts.join("; "));
    if let Some(r) = out.residual_mass {
        s.push_str(&format!("; residual {r:.4}"));
    }
    s
}

fn experiment_check(name: &str, spec: &ExperimentSpec, max_residual: Option<f64>) -> Result<Check> {
    let out = run_index_experiment(spec)?;
    let residual_ok = match (max_residual, out.residual_mass) {
        (Some(limit), Some(r)) => r <= limit,
        _ => true,
    };
    Ok(Check::new(name, out.passed() && residual_ok, summarize(&out)))
}

/// Largest `|L_n h(x₀) − decomposition|` over `2 ≤ n ≤ n_max`.
pub fn decomposition_gap(spec: &AngleSpec, d: f64, n_max: usize) -> f64 {
    let h = StepFn1D::new(Abscissa::ChebAngle(*spec), Orientation::Left0Right1 { d });
    (2..=n_max)
        .map(|n| (lagrange_step(&h, n, EvalAt::Jump) - fn_sigma_decomposition(spec, d, n)).abs())
        .fold(0.0, f64::max)
}

/// `cos(nπ/2)·cos(mπ/2)` in exact arithmetic.
pub fn cosine_product_window(len: usize) -> SeqWindow {
    let c: Vec<f64> = (1..=len).map(|n| [1.0, 0.0, -1.0, 0.0][n % 4]).collect();
    SeqWindow::product(c.clone(), c)
}

fn scan_check(name: &str, op: ScanOperator, regions: &[Region]) -> Result<Check> {
    let table = uniform_convergence_scan(&op, regions, &[500, 1000, 2000])?;
    let pass = table.passed() && table.sup_by_n[0] <= super::scan::FINAL_SUP;
    Ok(Check::new(name, pass, format!("sup errors {:?}", table.sup_by_n)))
}

pub fn run_suite(suite: Suite) -> Result<SuiteReport> {
    let checks = match suite {
        Suite::Lagrange1 => {
            let inv = PointSpec::Irrational(NamedIrrational::InvSqrt2);
            let gaps = [decomposition_gap(&rat(1, 3), 1.0, 2000), decomposition_gap(&inv, 1.0, 2000)];
            vec![
                Check::new(
                    "decomposition oracle",
                    gaps.iter().all(|&g| g <= 1e-8),
                    format!("max gaps {gaps:?}"),
                ),
                experiment_check("rational angle 1/3", &ExperimentSpec::lagrange_1d(rat(1, 3), 1.0, 3000), None)?,
                experiment_check("irrational angle", &ExperimentSpec::lagrange_1d(inv, 1.0, 5000), None)?,
                scan_check(
                    "uniform convergence",
                    ScanOperator::Lagrange1d { theta: rat(1, 3), d: 1.0 },
                    &[Region::interval(-1.0, 0.3)?, Region::interval(0.7, 1.0)?],
                )?,
            ]
        }
        Suite::Lagrange2 => vec![
            experiment_check("corner 1/3 x 1/2", &ExperimentSpec::lagrange_2d(rat(1, 3), rat(1, 2), 600), Some(0.03))?,
            experiment_check(
                "edge x = x0",
                &ExperimentSpec::lagrange_2d(rat(1, 3), rat(1, 2), 600).at(EvalAt::Jump, EvalAt::Value(0.6)),
                Some(0.03),
            )?,
            scan_check(
                "uniform convergence",
                ScanOperator::Lagrange2d {
                    theta: rat(1, 3),
                    gamma: rat(1, 2),
                },
                &[Region::rect((-1.0, 0.3), (-1.0, 1.0))?, Region::rect((-1.0, 1.0), (-1.0, -0.2))?],
            )?,
        ],
        Suite::Shepard => {
            let half = rat(1, 2);
            let shepard_scan = ScanOperator::Shepard2d {
                s: 2.0,
                x0: half,
                y0: half,
                convention: Convention::LowerLeft,
            };
            vec![
                experiment_check(
                    "edge s=2",
                    &ExperimentSpec::shepard_2d(2.0, half, half, 1000)
                        .at(EvalAt::Value(0.25), EvalAt::Jump)
                        .with_tol(0.02),
                    None,
                )?,
                experiment_check("corner s=1", &ExperimentSpec::shepard_2d(1.0, half, half, 1000), Some(0.03))?,
                experiment_check("corner s=3, 1/3 x 2/5", &ExperimentSpec::shepard_2d(3.0, rat(1, 3), rat(2, 5), 1000), Some(0.03))?,
                scan_check(
                    "uniform convergence",
                    shepard_scan,
                    &[
                        Region::rect((0.7, 1.0), (0.0, 1.0))?,
                        Region::rect((0.0, 0.3), (0.0, 0.3))?,
                        Region::rect((0.0, 1.0), (0.7, 1.0))?,
                    ],
                )?,
            ]
        }
        Suite::Props => {
            let mut checks: Vec<Check> = run_property_suite(0x5eed, 100)?
                .into_iter()
                .map(|o| {
                    let detail = format!("{} cases, {} failures", o.cases, o.failures.len());
                    Check::new(&format!("{:?}", o.property), o.passed(), detail)
                })
                .collect();
            let win = cosine_product_window(2000);
            let cps = default_checkpoints(2000, 16);
            let mut ok = true;
            let mut detail = Vec::new();
            for (l, expect) in [(0.0, 0.75), (1.0, 0.125), (-1.0, 0.125)] {
                let r = index_to_target(&win, &Target::Value(l), &Dilation::Epsilon(0.1), &cps)?
                    .judge(Prediction::Exact(expect), 0.01);
                ok &= r.passed() == Some(true);
                detail.push(format!("{l}: {:.4}", r.index()));
            }
            checks.push(Check::new("cosine product", ok, detail.join("; ")));
            let r = check_product_rule(
                NamedIrrational::Sqrt2Minus1,
                NamedIrrational::GoldenFrac,
                Interval { lo: 0.0, hi: 0.5 },
                1500,
                0.02,
            )?;
            checks.push(Check::new("product rule", r.passed() == Some(true), format!("{:.4}", r.index())));
            let u = check_uniform_limit_rule(NamedIrrational::Sqrt2Minus1, Interval { lo: 0.0, hi: 0.5 }, 1000, 0.02)?;
            checks.push(Check::new(
                "uniform limit rule",
                u.holds,
                format!("single {:.4}, double {:.4}", u.single.index(), u.double.index()),
            ));
            checks
        }
    };
    Ok(SuiteReport { suite, checks })
}
