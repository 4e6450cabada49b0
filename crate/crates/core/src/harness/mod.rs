//! Experiments that generate operator sequences at a jump, estimate their
//! indices of convergence and compare them with the predicted cluster tables.

pub mod predict;
pub mod props;
pub mod rules;
pub mod scan;
pub mod suites;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::density::{default_checkpoints, density_bounds, index_to_target, Dilation, IndexReport, IndexSet, Interval, Prediction, SeqWindow, Target};
use crate::error::{Error, Result};
use crate::lagrange::{lagrange_step, EvalAt};
use crate::point::PointSpec;
use crate::shepard::{shepard_eval_1d, ShepardParams};
use crate::step::{Abscissa, Convention, Orientation, StepFn1D, StepFn2D};

pub use predict::{
    predict_lagrange_1d, predict_lagrange_2d, predict_shepard_1d, predict_shepard_2d, Arithmetic, Cluster, Location,
    MeasureProfile, PredictionTable, Residue, TableSource,
};

/// Window budget per axis.
pub const BUDGET_1D: usize = 10_000;
pub const BUDGET_2D: usize = 3_000;
/// Dilation used for interval targets.
pub const MEASURE_EPSILON: f64 = 1e-3;
/// Upper bound on the gap-derived dilation.
pub const EPSILON_CAP: f64 = 0.05;
/// Cluster gaps below this are reported as indistinguishable.
pub const MIN_RESOLVABLE_GAP: f64 = 2e-3;
pub const DEFAULT_TOL_1D: f64 = 0.02;
pub const DEFAULT_TOL_2D: f64 = 0.03;
/// Slack on the witness density.
pub const WITNESS_DENSITY_SLACK: f64 = 0.02;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Operator {
    Lagrange1d,
    Lagrange2d,
    Shepard1d,
    Shepard2d,
}

impl Operator {
    pub fn is_bivariate(self) -> bool {
        matches!(self, Operator::Lagrange2d | Operator::Shepard2d)
    }

    pub fn is_shepard(self) -> bool {
        matches!(self, Operator::Shepard1d | Operator::Shepard2d)
    }

    pub fn name(self) -> &'static str {
        match self {
            Operator::Lagrange1d => "lagrange1d",
            Operator::Lagrange2d => "lagrange2d",
            Operator::Shepard1d => "shepard1d",
            Operator::Shepard2d => "shepard2d",
        }
    }

    fn budget(self) -> usize {
        if self.is_bivariate() {
            BUDGET_2D
        } else {
            BUDGET_1D
        }
    }
}

/// One index experiment. For Lagrange operators the point specs are `θ₀/π`
/// and `γ₀/π`; for Shepard operators they are the jump abscissas.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub operator: Operator,
    pub x: PointSpec,
    pub y: Option<PointSpec>,
    /// Value at the jump of the univariate Lagrange step.
    pub d: f64,
    pub s: Option<f64>,
    /// Window bound `N` per axis.
    pub window: usize,
    pub epsilon: Option<f64>,
    pub checkpoints: usize,
    pub at_x: EvalAt,
    pub at_y: EvalAt,
    /// Shepard rectangle convention; Lagrange always uses `UpperRight`.
    pub convention: Convention,
    /// Interval targets used when the predicted limit set is a continuum.
    pub measure_targets: Vec<Interval>,
    pub tol: Option<f64>,
}

impl ExperimentSpec {
    fn base(operator: Operator, x: PointSpec, y: Option<PointSpec>, s: Option<f64>, window: usize) -> Self {
        Self {
            operator,
            x,
            y,
            d: 1.0,
            s,
            window,
            epsilon: None,
            checkpoints: 16,
            at_x: EvalAt::Jump,
            at_y: EvalAt::Jump,
            convention: if operator.is_shepard() {
                Convention::LowerLeft
            } else {
                Convention::UpperRight
            },
            measure_targets: vec![Interval { lo: 0.3, hi: 0.6 }],
            tol: None,
        }
    }

    pub fn lagrange_1d(theta: PointSpec, d: f64, window: usize) -> Self {
        Self {
            d,
            ..Self::base(Operator::Lagrange1d, theta, None, None, window)
        }
    }

    pub fn lagrange_2d(theta: PointSpec, gamma: PointSpec, window: usize) -> Self {
        Self::base(Operator::Lagrange2d, theta, Some(gamma), None, window)
    }

    pub fn shepard_1d(s: f64, x0: PointSpec, window: usize) -> Self {
        Self::base(Operator::Shepard1d, x0, None, Some(s), window)
    }

    pub fn shepard_2d(s: f64, x0: PointSpec, y0: PointSpec, window: usize) -> Self {
        Self::base(Operator::Shepard2d, x0, Some(y0), Some(s), window)
    }

    pub fn at(mut self, at_x: EvalAt, at_y: EvalAt) -> Self {
        self.at_x = at_x;
        self.at_y = at_y;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = Some(tol);
        self
    }

    pub fn with_epsilon(mut self, eps: f64) -> Self {
        self.epsilon = Some(eps);
        self
    }

    pub fn with_measure_targets(mut self, targets: Vec<Interval>) -> Self {
        self.measure_targets = targets;
        self
    }

    pub fn tol_or_default(&self) -> f64 {
        self.tol.unwrap_or(if self.operator.is_bivariate() {
            DEFAULT_TOL_2D
        } else {
            DEFAULT_TOL_1D
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.operator.is_bivariate() != self.y.is_some() {
            return Err(Error::Invalid(format!(
                "{} takes {} point spec(s)",
                self.operator.name(),
                if self.operator.is_bivariate() { 2 } else { 1 }
            )));
        }
        let specs = std::iter::once(&self.x).chain(self.y.as_ref());
        for spec in specs {
            if self.operator.is_shepard() {
                spec.validate_grid()?;
            } else {
                spec.validate_angle()?;
            }
        }
        if self.operator.is_shepard() {
            predict::check_s(self.s.ok_or_else(|| Error::Invalid("Shepard operators need s".into()))?)?;
        }
        if self.window < 16 {
            return Err(Error::WindowTooSmall {
                window: self.window,
                needed: 16,
            });
        }
        if self.window > self.operator.budget() {
            return Err(Error::BudgetExceeded {
                window: self.window,
                budget: self.operator.budget(),
            });
        }
        if self.checkpoints < 2 {
            return Err(Error::BadCheckpoints);
        }
        if let Some(eps) = self.epsilon {
            if !(eps > 0.0) {
                return Err(Error::NonPositiveEpsilon(eps));
            }
        }
        for iv in &self.measure_targets {
            Interval::new(iv.lo, iv.hi)?;
        }
        Ok(())
    }

    pub fn checkpoint_grid(&self) -> Vec<usize> {
        default_checkpoints(self.window, self.checkpoints)
    }

    pub fn prediction(&self) -> Result<PredictionTable> {
        let table = match self.operator {
            Operator::Lagrange1d => predict_lagrange_1d(&self.x, self.d)?,
            Operator::Lagrange2d => predict_lagrange_2d(&self.x, &self.y_spec(), self.at_x, self.at_y)?,
            Operator::Shepard1d => predict_shepard_1d(self.s_value(), &self.x, self.convention)?,
            Operator::Shepard2d => predict_shepard_2d(
                self.s_value(),
                &self.x,
                &self.y_spec(),
                self.at_x,
                self.at_y,
                self.convention,
            )?,
        };
        table.with_measure_targets(&self.measure_targets)
    }

    fn y_spec(&self) -> PointSpec {
        self.y.expect("validated arity")
    }

    fn s_value(&self) -> f64 {
        self.s.unwrap_or(1.0)
    }
}

fn lagrange_factor(n_max: usize, h: &StepFn1D, at: EvalAt) -> Vec<f64> {
    (1..=n_max).into_par_iter().map(|n| lagrange_step(h, n, at)).collect()
}

fn shepard_factor(n_max: usize, s: f64, h: &StepFn1D, at: EvalAt) -> Result<Vec<f64>> {
    let x = match at {
        EvalAt::Jump => h.at,
        EvalAt::Value(v) => Abscissa::Value(v),
    };
    (1..=n_max)
        .into_par_iter()
        .map(|n| shepard_eval_1d(h, &ShepardParams::new(s, n)?, &x))
        .collect()
}

/// Operator values for `n` (and `m`) in `1..=N`; bivariate windows are kept
/// in product form.
pub fn generate_window(spec: &ExperimentSpec) -> Result<SeqWindow> {
    spec.validate()?;
    let n = spec.window;
    match spec.operator {
        Operator::Lagrange1d => {
            let h = StepFn1D::new(Abscissa::ChebAngle(spec.x), Orientation::Left0Right1 { d: spec.d });
            Ok(SeqWindow::single(lagrange_factor(n, &h, spec.at_x)))
        }
        Operator::Lagrange2d => {
            let h = StepFn2D::new(
                Abscissa::ChebAngle(spec.x),
                Abscissa::ChebAngle(spec.y_spec()),
                Convention::UpperRight,
            );
            let (h1, h2) = h.factors();
            Ok(SeqWindow::product(lagrange_factor(n, &h1, spec.at_x), lagrange_factor(n, &h2, spec.at_y)))
        }
        Operator::Shepard1d => {
            let h = StepFn1D::new(Abscissa::Unit(spec.x), spec.convention.factor());
            Ok(SeqWindow::single(shepard_factor(n, spec.s_value(), &h, spec.at_x)?))
        }
        Operator::Shepard2d => {
            let h = StepFn2D::new(Abscissa::Unit(spec.x), Abscissa::Unit(spec.y_spec()), spec.convention);
            let (h1, h2) = h.factors();
            Ok(SeqWindow::product(
                shepard_factor(n, spec.s_value(), &h1, spec.at_x)?,
                shepard_factor(n, spec.s_value(), &h2, spec.at_y)?,
            ))
        }
    }
}

/// Check that an explicit subsequence realizes a cluster.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub residues: Vec<Residue>,
    /// Lower density estimate of the subsequence's index set.
    pub density: f64,
    pub expected_density: f64,
    /// Largest distance to the cluster over indices in the upper half of the
    /// window.
    pub tail_deviation: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterReport {
    #[serde(flatten)]
    pub report: IndexReport,
    pub witnesses: Vec<WitnessReport>,
}

impl ClusterReport {
    pub fn passed(&self) -> bool {
        self.report.passed().unwrap_or(true) && self.witnesses.iter().all(|w| w.pass)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentOutcome {
    pub source: TableSource,
    pub epsilon: f64,
    /// Two cluster values are closer than the resolvable gap.
    pub indistinguishable: bool,
    /// Fraction of the window outside every dilated cluster, for discrete
    /// tables.
    pub residual_mass: Option<f64>,
    pub targets: Vec<ClusterReport>,
}

impl ExperimentOutcome {
    pub fn passed(&self) -> bool {
        self.targets.iter().all(ClusterReport::passed)
    }

    /// Report whose target is the point `value`.
    pub fn cluster_at(&self, value: f64) -> Option<&ClusterReport> {
        self.targets
            .iter()
            .find(|c| matches!(c.report.target, Target::Value(v) if (v - value).abs() <= 1e-9))
    }
}

/// Dilation for a table: half the smallest gap between point clusters,
/// capped; interval targets use a fixed small dilation.
pub fn select_epsilon(table: &PredictionTable) -> (f64, bool) {
    if !table.is_discrete() {
        return (MEASURE_EPSILON, false);
    }
    match table.min_gap() {
        Some(gap) => ((0.5 * gap).min(EPSILON_CAP), gap < MIN_RESOLVABLE_GAP),
        None => (EPSILON_CAP, false),
    }
}

pub fn run_index_experiment(spec: &ExperimentSpec) -> Result<ExperimentOutcome> {
    let win = generate_window(spec)?;
    run_index_experiment_on(spec, &win)
}

/// Runs the experiment on a window generated earlier, e.g. from a cache.
pub fn run_index_experiment_on(spec: &ExperimentSpec, win: &SeqWindow) -> Result<ExperimentOutcome> {
    spec.validate()?;
    let table = spec.prediction()?;
    let (auto_eps, indistinguishable) = select_epsilon(&table);
    let epsilon = spec.epsilon.unwrap_or(auto_eps);
    let checkpoints = spec.checkpoint_grid();
    let tol = spec.tol_or_default();

    let mut targets = Vec::with_capacity(table.clusters.len());
    for cluster in &table.clusters {
        let report = index_to_target(win, &cluster.target, &Dilation::Epsilon(epsilon), &checkpoints)?
            .judge(cluster.predicted, tol);
        let witnesses = match cluster.target {
            Target::Value(v) => cluster
                .witnesses
                .iter()
                .map(|w| check_witness(win, w, v, epsilon, &checkpoints))
                .collect::<Result<Vec<_>>>()?,
            _ => Vec::new(),
        };
        targets.push(ClusterReport { report, witnesses });
    }

    let residual_mass = table.is_discrete().then(|| residual_mass(win, &table.values(), epsilon));
    Ok(ExperimentOutcome {
        source: table.source,
        epsilon,
        indistinguishable,
        residual_mass,
        targets,
    })
}

fn residue_set(residues: &[Residue]) -> IndexSet {
    let r = residues.to_vec();
    if r.len() == 1 {
        IndexSet::one_dim(move |n| r[0].contains(n))
    } else {
        IndexSet::two_dim(move |n, m| r[0].contains(n) && r[1].contains(m))
    }
}

fn check_witness(win: &SeqWindow, residues: &[Residue], value: f64, eps: f64, checkpoints: &[usize]) -> Result<WitnessReport> {
    let density = density_bounds(&residue_set(residues), checkpoints)?.lower_est;
    let expected_density: f64 = residues.iter().map(Residue::density).product();
    let len = win.len();
    let tail: Vec<usize> = (len / 2 + 1..=len).collect();
    let rx = residues[0];
    let tail_deviation = if residues.len() == 1 {
        tail.iter()
            .filter(|&&n| rx.contains(n))
            .map(|&n| (win.value(n, 1) - value).abs())
            .fold(0.0, f64::max)
    } else {
        let ry = residues[1];
        let ms: Vec<usize> = tail.iter().copied().filter(|&m| ry.contains(m)).collect();
        tail.par_iter()
            .filter(|&&n| rx.contains(n))
            .map(|&n| ms.iter().map(|&m| (win.value(n, m) - value).abs()).fold(0.0, f64::max))
            .reduce(|| 0.0, f64::max)
    };
    Ok(WitnessReport {
        residues: residues.to_vec(),
        density,
        expected_density,
        tail_deviation,
        pass: density >= expected_density - WITNESS_DENSITY_SLACK && tail_deviation <= eps,
    })
}

/// Fraction of `{1..N}^dim` whose value lies outside every `v + B_ε`.
fn residual_mass(win: &SeqWindow, values: &[f64], eps: f64) -> f64 {
    let values = values.to_vec();
    let n = win.len();
    let outside = win.select(move |x| values.iter().all(|v| (x - v).abs() > eps));
    outside.count_prefix(n) as f64 / win.dim().volume(n) as f64
}

/// Checks a prediction-free target against an explicit value.
pub fn judge_target(win: &SeqWindow, target: &Target, epsilon: f64, checkpoints: &[usize], predicted: Prediction, tol: f64) -> Result<IndexReport> {
    Ok(index_to_target(win, target, &Dilation::Epsilon(epsilon), checkpoints)?.judge(predicted, tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point::NamedIrrational;

    fn rat(p: u64, q: u64) -> PointSpec {
        PointSpec::rational(p, q).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(ExperimentSpec::lagrange_1d(rat(1, 3), 1.0, 100).validate().is_ok());
        let mut bad = ExperimentSpec::lagrange_1d(rat(1, 3), 1.0, 100);
        bad.y = Some(rat(1, 2));
        assert!(bad.validate().is_err());
        assert!(matches!(
            ExperimentSpec::lagrange_2d(rat(1, 3), rat(1, 2), 5000).validate(),
            Err(Error::BudgetExceeded { .. })
        ));
        assert!(ExperimentSpec::shepard_1d(0.5, rat(1, 2), 100).validate().is_err());
        assert!(ExperimentSpec::lagrange_1d(rat(1, 1), 1.0, 100).validate().is_err());
        assert!(ExperimentSpec::lagrange_1d(rat(1, 3), 1.0, 100).with_epsilon(0.0).validate().is_err());
    }

    #[test]
    fn small_lagrange_experiment() {
        let spec = ExperimentSpec::lagrange_1d(rat(1, 3), 1.0, 1200);
        let out = run_index_experiment(&spec).unwrap();
        assert_eq!(out.targets.len(), 3);
        assert!(out.passed(), "{out:#?}");
        assert!(out.residual_mass.unwrap() < 0.02);
        assert!(!out.indistinguishable);
    }

    #[test]
    fn window_has_product_form() {
        let spec = ExperimentSpec::shepard_2d(2.0, rat(1, 2), rat(1, 3), 40);
        let SeqWindow::Product { u, v } = generate_window(&spec).unwrap() else {
            panic!("expected product window");
        };
        // even n hits x₀ = 1/2, and the closed convention gives 1 there
        assert_eq!(u[1], 1.0);
        assert_eq!(v[2], 1.0);
    }

    #[test]
    fn irrational_measure_target() {
        let spec = ExperimentSpec::lagrange_1d(PointSpec::Irrational(NamedIrrational::GoldenFrac), 1.0, 1500);
        let out = run_index_experiment(&spec).unwrap();
        assert_eq!(out.epsilon, MEASURE_EPSILON);
        assert_eq!(out.residual_mass, None);
        assert!(out.passed(), "{out:#?}");
    }

    #[test]
    fn indistinguishable_clusters_flagged() {
        // g(m/q) for large q are closely packed
        let spec = ExperimentSpec::lagrange_1d(rat(1, 1000), 1.0, 200);
        let (eps, flagged) = select_epsilon(&spec.prediction().unwrap());
        assert!(flagged);
        assert!(eps < 1e-3);
    }
}
