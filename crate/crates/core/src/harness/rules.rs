//! Concrete sequences on which the structural laws of the index can be
//! checked against closed forms.

use serde::{Deserialize, Serialize};

use crate::density::{default_checkpoints, index_to_target, Dilation, IndexReport, Interval, Prediction, SeqWindow, Target};
use crate::error::{Error, Result};
use crate::point::NamedIrrational;

/// Dilation used by the rule checks.
pub const RULE_EPSILON: f64 = 1e-3;

/// `x_n = frac(nα + β)`.
pub fn rotation_sequence(alpha: NamedIrrational, beta: f64, len: usize) -> Result<SeqWindow> {
    if !(0.0..1.0).contains(&beta) {
        return Err(Error::OutOfDomain {
            name: "beta",
            value: beta,
            expected: "[0, 1)",
        });
    }
    let a = alpha.value();
    Ok(SeqWindow::from_fn_1d(len, move |n| (n as f64 * a + beta).fract()))
}

/// Measure of `{(x, y) ∈ [0,1]² : xy ≤ t}` is `t − t·ln t`.
pub fn product_cdf(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        t - t * t.ln()
    }
}

/// Index of `frac(nα)·frac(mγ)` to `A`, judged against the area of
/// `{xy ∈ A}`.
pub fn check_product_rule(alpha: NamedIrrational, gamma: NamedIrrational, a: Interval, len: usize, tol: f64) -> Result<IndexReport> {
    let fa = |n: usize| (n as f64 * alpha.value()).fract();
    let fg = |n: usize| (n as f64 * gamma.value()).fract();
    let win = SeqWindow::product((1..=len).map(fa).collect(), (1..=len).map(fg).collect());
    let target = Target::interval(a.lo, a.hi)?;
    let predicted = product_cdf(a.hi) - product_cdf(a.lo);
    Ok(index_to_target(&win, &target, &Dilation::Epsilon(RULE_EPSILON), &default_checkpoints(len, 16))?
        .judge(Prediction::Exact(predicted), tol))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniformLimitRule {
    pub single: IndexReport,
    pub double: IndexReport,
    pub holds: bool,
}

/// `x_{n,m} = y_n + 1/m` with `y_n` a rotation sequence converges to `y_n`
/// uniformly in `n`, so its index to `A` is at least that of `y_n`.
pub fn check_uniform_limit_rule(alpha: NamedIrrational, a: Interval, len: usize, tol: f64) -> Result<UniformLimitRule> {
    check_uniform_limit_rule_with(&rotation_sequence(alpha, 0.0, len)?, a, tol)
}

/// Same check for an arbitrary base sequence `y_n`.
pub fn check_uniform_limit_rule_with(base: &SeqWindow, a: Interval, tol: f64) -> Result<UniformLimitRule> {
    let len = base.len();
    let checkpoints = default_checkpoints(len, 16);
    let target = Target::interval(a.lo, a.hi)?;
    let dil = Dilation::Epsilon(RULE_EPSILON);
    let single = index_to_target(base, &target, &dil, &checkpoints)?;
    let y = base.clone();
    let double_win = SeqWindow::dense(len, move |n, m| y.value(n, 1) + 1.0 / m as f64);
    let double = index_to_target(&double_win, &target, &dil, &checkpoints)?.judge(Prediction::AtLeast(single.index()), tol);
    let holds = double.passed().unwrap_or(false);
    Ok(UniformLimitRule { single, double, holds })
}
