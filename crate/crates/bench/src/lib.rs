//! Fixtures shared by the benchmarks.

use conidx_core::{Abscissa, ExperimentSpec, Orientation, PointSpec, SeqWindow, StepFn1D};

pub fn third() -> PointSpec {
    PointSpec::Rational { p: 1, q: 3 }
}

pub fn half() -> PointSpec {
    PointSpec::Rational { p: 1, q: 2 }
}

/// Univariate Lagrange step with its jump at `cos(π/3)`.
pub fn lagrange_step_fn() -> StepFn1D {
    StepFn1D::new(Abscissa::ChebAngle(third()), Orientation::Left0Right1 { d: 1.0 })
}

/// The bivariate experiments whose windows dominate run time.
pub fn bivariate_specs(window: usize) -> [(&'static str, ExperimentSpec); 2] {
    [
        ("lagrange2d", ExperimentSpec::lagrange_2d(third(), half(), window)),
        ("shepard2d", ExperimentSpec::shepard_2d(2.0, half(), half(), window)),
    ]
}

/// `frac(n·(√2 − 1))·frac(m·(√5 − 1)/2)` in product form.
pub fn rotation_product(len: usize) -> SeqWindow {
    let rot = |a: f64| (1..=len).map(|n| (n as f64 * a).fract()).collect::<Vec<_>>();
    SeqWindow::product(rot(std::f64::consts::SQRT_2 - 1.0), rot((5f64.sqrt() - 1.0) / 2.0))
}
