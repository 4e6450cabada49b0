//! Randomized structural checks of the operators and the density machinery.

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::density::{complement_identity_check, default_checkpoints, index_to_target, sum_rule_check, Dilation, Interval, SeqWindow, Target};
use crate::error::Result;
use crate::lagrange::{cheb_grid, lagrange_eval_1d};
use crate::point::{NamedIrrational, PointSpec};
use crate::shepard::{shepard_eval_samples, shepard_weights_1d, ShepardParams};
use crate::step::Abscissa;

pub const SUM_RULE_TOL: f64 = 0.02;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    PartitionOfUnity,
    NodeInterpolation,
    WeightNormalization,
    EpsilonMonotonicity,
    ComplementIdentity,
    SumRule,
}

impl Property {
    pub const ALL: [Property; 6] = [
        Property::PartitionOfUnity,
        Property::NodeInterpolation,
        Property::WeightNormalization,
        Property::EpsilonMonotonicity,
        Property::ComplementIdentity,
        Property::SumRule,
    ];
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyOutcome {
    pub property: Property,
    pub cases: usize,
    pub failures: Vec<String>,
}

impl PropertyOutcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn random_window(rng: &mut StdRng) -> SeqWindow {
    let rotation = |rng: &mut StdRng, len: usize| -> Vec<f64> {
        let alpha = NamedIrrational::ALL.choose(rng).expect("nonempty").value();
        let beta: f64 = rng.gen();
        (1..=len).map(|n| (n as f64 * alpha + beta).fract()).collect()
    };
    if rng.gen_bool(0.5) {
        let len = rng.gen_range(200..=2000);
        SeqWindow::single(rotation(rng, len))
    } else {
        let len = rng.gen_range(60..=300);
        SeqWindow::product(rotation(rng, len), rotation(rng, len))
    }
}

fn random_interval(rng: &mut StdRng) -> Interval {
    let a: f64 = rng.gen();
    let b: f64 = rng.gen();
    Interval { lo: a.min(b), hi: a.max(b) }
}

fn check_case(property: Property, rng: &mut StdRng) -> Result<Option<String>> {
    let fail = |msg: String| Ok(Some(msg));
    match property {
        Property::PartitionOfUnity => {
            let n = rng.gen_range(2..=500);
            let x: f64 = rng.gen_range(-1.0..=1.0);
            let grid = cheb_grid(n)?;
            let sum: f64 = grid.weights(x).iter().sum();
            if (sum - 1.0).abs() > 1e-10 {
                return fail(format!("n={n} x={x}: sum of fundamental polynomials {sum}"));
            }
        }
        Property::NodeInterpolation => {
            let n = rng.gen_range(2..=300);
            let values: Vec<f64> = (0..n + 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let grid = cheb_grid(n)?;
            let k = rng.gen_range(0..n);
            let got = lagrange_eval_1d(&grid, &values[..n], grid.nodes()[k]);
            if got != values[k] {
                return fail(format!("lagrange n={n} node {k}: {got} != {}", values[k]));
            }
            let params = ShepardParams::new(rng.gen_range(1.0..6.0), n)?;
            let i = rng.gen_range(0..=n);
            let at = Abscissa::Unit(PointSpec::rational(i as u64, n as u64)?);
            let got = shepard_eval_samples(&params, &values, &at)?;
            if got != values[i] {
                return fail(format!("shepard n={n} node {i}: {got} != {}", values[i]));
            }
        }
        Property::WeightNormalization => {
            let params = ShepardParams::new(rng.gen_range(1.0..6.0), rng.gen_range(1..=500))?;
            let x: f64 = rng.gen();
            let w = shepard_weights_1d(&params, &Abscissa::Value(x))?;
            let sum: f64 = w.iter().sum();
            if w.iter().any(|&v| v < 0.0) || (sum - 1.0).abs() > 1e-12 {
                return fail(format!("{params:?} x={x}: weight sum {sum}"));
            }
        }
        Property::EpsilonMonotonicity => {
            let win = random_window(rng);
            let cps = default_checkpoints(win.len(), 12);
            let target = Target::Set(vec![random_interval(rng)]);
            let e1 = rng.gen_range(1e-4..0.05);
            let e2 = e1 + rng.gen_range(1e-4..0.05);
            let r1 = index_to_target(&win, &target, &Dilation::Epsilon(e1), &cps)?;
            let r2 = index_to_target(&win, &target, &Dilation::Epsilon(e2), &cps)?;
            let counts_ok = r1.estimate.counts.iter().zip(&r2.estimate.counts).all(|(a, b)| a <= b);
            if !counts_ok || r1.index() > r2.index() {
                return fail(format!("{target} eps {e1} vs {e2}: {} > {}", r1.index(), r2.index()));
            }
        }
        Property::ComplementIdentity => {
            let win = random_window(rng);
            let cps = default_checkpoints(win.len(), 12);
            let set = win.hit_set(&Target::Set(vec![random_interval(rng)]), rng.gen_range(1e-4..0.05));
            if !complement_identity_check(&set, &cps)? {
                return fail("complement identity violated".into());
            }
        }
        Property::SumRule => {
            let win = random_window(rng);
            let cps = default_checkpoints(win.len(), 12);
            let eps = rng.gen_range(1e-4..0.02);
            let k = rng.gen_range(2..=5);
            // k intervals separated by gaps wider than 2ε
            let mut cuts: Vec<f64> = (0..2 * k).map(|_| rng.gen::<f64>()).collect();
            cuts.sort_by(f64::total_cmp);
            let gap = 2.0 * eps + 1e-6;
            let targets: Vec<Target> = cuts
                .chunks(2)
                .enumerate()
                .map(|(j, c)| Target::Set(vec![Interval { lo: c[0] + j as f64 * 3.0 * gap, hi: c[1] + j as f64 * 3.0 * gap }]))
                .collect();
            let rule = sum_rule_check(&win, &targets, eps, &cps, SUM_RULE_TOL)?;
            if !rule.holds {
                return fail(format!("indices {:?} sum to {}", rule.indices, rule.sum));
            }
        }
    }
    Ok(None)
}

/// Runs every property on `cases` configurations drawn from a seeded
/// generator.
pub fn run_property_suite(seed: u64, cases: usize) -> Result<Vec<PropertyOutcome>> {
    let mut rng = StdRng::seed_from_u64(seed);
    Property::ALL
        .iter()
        .map(|&property| {
            let mut failures = Vec::new();
            for _ in 0..cases {
                if let Some(msg) = check_case(property, &mut rng)? {
                    failures.push(msg);
                }
            }
            Ok(PropertyOutcome {
                property,
                cases,
                failures,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_is_deterministic_and_green() {
        let a = run_property_suite(7, 10).unwrap();
        let b = run_property_suite(7, 10).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(PropertyOutcome::passed), "{a:?}");
    }
}
