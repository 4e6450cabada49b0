//! Sup-norm errors of the operators on regions away from the jump set.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::density::Interval;
use crate::error::{Error, Result};
use crate::lagrange::{lagrange_step, EvalAt};
use crate::point::PointSpec;
use crate::shepard::{shepard_eval_1d, ShepardParams};
use crate::step::{Abscissa, Convention, Orientation, StepFn1D, StepFn2D};

/// Regions must keep at least this distance from the jump set.
pub const MIN_REGION_DISTANCE: f64 = 0.1;
pub const GRID_2D: usize = 32;
pub const GRID_1D: usize = 64;
/// Largest admissible sup error at the largest `n`.
pub const FINAL_SUP: f64 = 0.05;
/// Allowed growth between consecutive `n`.
pub const MONOTONE_SLACK: f64 = 1.2;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanOperator {
    Lagrange1d { theta: PointSpec, d: f64 },
    Lagrange2d { theta: PointSpec, gamma: PointSpec },
    Shepard1d { s: f64, x0: PointSpec, convention: Convention },
    Shepard2d { s: f64, x0: PointSpec, y0: PointSpec, convention: Convention },
}

/// A closed rectangle; `y` is absent for univariate operators.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub x: Interval,
    pub y: Option<Interval>,
}

impl Region {
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Ok(Self {
            x: Interval::new(lo, hi)?,
            y: None,
        })
    }

    pub fn rect(x: (f64, f64), y: (f64, f64)) -> Result<Self> {
        Ok(Self {
            x: Interval::new(x.0, x.1)?,
            y: Some(Interval::new(y.0, y.1)?),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanTable {
    pub n_list: Vec<usize>,
    pub regions: Vec<Region>,
    /// `sup_errors[r][k]`: region `r`, `n = n_list[k]`.
    pub sup_errors: Vec<Vec<f64>>,
    /// Sup over all regions, per `n`.
    pub sup_by_n: Vec<f64>,
    pub final_ok: bool,
    pub monotone: bool,
}

impl ScanTable {
    pub fn passed(&self) -> bool {
        self.final_ok && self.monotone
    }
}

fn grid(iv: Interval, points: usize) -> Vec<f64> {
    (0..points)
        .map(|i| iv.lo + (iv.hi - iv.lo) * i as f64 / (points - 1) as f64)
        .collect()
}

/// Distance from a rectangle to the segment `[a, b] × {c}`.
fn distance_to_horizontal(rx: Interval, ry: Interval, a: f64, b: f64, c: f64) -> f64 {
    let dx = rx.gap(&Interval { lo: a, hi: b });
    dx.hypot(ry.distance(c))
}

impl ScanOperator {
    fn is_bivariate(&self) -> bool {
        matches!(self, ScanOperator::Lagrange2d { .. } | ScanOperator::Shepard2d { .. })
    }

    fn domain(&self) -> Interval {
        match self {
            ScanOperator::Lagrange1d { .. } | ScanOperator::Lagrange2d { .. } => Interval { lo: -1.0, hi: 1.0 },
            _ => Interval { lo: 0.0, hi: 1.0 },
        }
    }

    fn jump_abscissas(&self) -> (Abscissa, Option<Abscissa>) {
        match *self {
            ScanOperator::Lagrange1d { theta, .. } => (Abscissa::ChebAngle(theta), None),
            ScanOperator::Lagrange2d { theta, gamma } => (Abscissa::ChebAngle(theta), Some(Abscissa::ChebAngle(gamma))),
            ScanOperator::Shepard1d { x0, .. } => (Abscissa::Unit(x0), None),
            ScanOperator::Shepard2d { x0, y0, .. } => (Abscissa::Unit(x0), Some(Abscissa::Unit(y0))),
        }
    }

    /// Distance from a region to the set where the target function jumps.
    fn distance_to_jump_set(&self, region: &Region) -> f64 {
        let (jx, jy) = self.jump_abscissas();
        let (x0, d) = (jx.x(), self.domain());
        let Some((jy, ry)) = jy.zip(region.y) else {
            return region.x.distance(x0);
        };
        let y0 = jy.x();
        let upper = match self {
            ScanOperator::Shepard2d { convention, .. } => *convention == Convention::UpperRight,
            _ => true,
        };
        let (xa, xb, ya, yb) = if upper { (x0, d.hi, y0, d.hi) } else { (d.lo, x0, d.lo, y0) };
        let horizontal = distance_to_horizontal(region.x, ry, xa, xb, y0);
        let vertical = distance_to_horizontal(ry, region.x, ya, yb, x0);
        horizontal.min(vertical)
    }

    /// Operator values on the two axis grids, and the target function.
    fn axis_values(&self, n: usize, xs: &[f64], ys: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let (h1, h2) = self.factors();
        let eval = |h: &StepFn1D, pts: &[f64]| -> Result<Vec<f64>> {
            pts.iter()
                .map(|&x| match self {
                    ScanOperator::Lagrange1d { .. } | ScanOperator::Lagrange2d { .. } => {
                        Ok(lagrange_step(h, n, EvalAt::Value(x)))
                    }
                    ScanOperator::Shepard1d { s, .. } | ScanOperator::Shepard2d { s, .. } => {
                        shepard_eval_1d(h, &ShepardParams::new(*s, n)?, &Abscissa::Value(x))
                    }
                })
                .collect()
        };
        let u = eval(&h1, xs)?;
        let v = match h2 {
            Some(h2) => eval(&h2, ys)?,
            None => vec![1.0],
        };
        Ok((u, v))
    }

    fn factors(&self) -> (StepFn1D, Option<StepFn1D>) {
        match *self {
            ScanOperator::Lagrange1d { theta, d } => {
                (StepFn1D::new(Abscissa::ChebAngle(theta), Orientation::Left0Right1 { d }), None)
            }
            ScanOperator::Shepard1d { x0, convention, .. } => (StepFn1D::new(Abscissa::Unit(x0), convention.factor()), None),
            _ => {
                let h = self.step_2d().expect("bivariate");
                let (h1, h2) = h.factors();
                (h1, Some(h2))
            }
        }
    }

    fn step_2d(&self) -> Option<StepFn2D> {
        match *self {
            ScanOperator::Lagrange2d { theta, gamma } => Some(StepFn2D::new(
                Abscissa::ChebAngle(theta),
                Abscissa::ChebAngle(gamma),
                Convention::UpperRight,
            )),
            ScanOperator::Shepard2d { x0, y0, convention, .. } => {
                Some(StepFn2D::new(Abscissa::Unit(x0), Abscissa::Unit(y0), convention))
            }
            _ => None,
        }
    }

    fn target_value(&self, x: f64, y: f64) -> f64 {
        match self.step_2d() {
            Some(h) => h.eval(x, y),
            None => self.factors().0.eval(x),
        }
    }

    fn sup_error(&self, region: &Region, n: usize) -> Result<f64> {
        let points = if self.is_bivariate() { GRID_2D } else { GRID_1D };
        let xs = grid(region.x, points);
        let ys = region.y.map(|iv| grid(iv, points)).unwrap_or_else(|| vec![0.0]);
        let (u, v) = self.axis_values(n, &xs, &ys)?;
        let mut sup = 0.0f64;
        for (i, &x) in xs.iter().enumerate() {
            for (j, &y) in ys.iter().enumerate() {
                sup = sup.max((u[i] * v[j] - self.target_value(x, y)).abs());
            }
        }
        Ok(sup)
    }
}

/// Sup of `|operator − h|` over a grid on each region, for each `n`.
pub fn uniform_convergence_scan(op: &ScanOperator, regions: &[Region], n_list: &[usize]) -> Result<ScanTable> {
    if n_list.is_empty() || n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::BadCheckpoints);
    }
    let domain = op.domain();
    for r in regions {
        if r.y.is_some() != op.is_bivariate() {
            return Err(Error::Invalid("region dimension does not match the operator".into()));
        }
        for iv in std::iter::once(r.x).chain(r.y) {
            if iv.lo < domain.lo || iv.hi > domain.hi {
                return Err(Error::InvalidInterval { lo: iv.lo, hi: iv.hi });
            }
        }
        if op.distance_to_jump_set(r) < MIN_REGION_DISTANCE - 1e-12 {
            return Err(Error::RegionTouchesJump {
                min_distance: MIN_REGION_DISTANCE,
            });
        }
    }
    let sup_errors = regions
        .par_iter()
        .map(|r| n_list.iter().map(|&n| op.sup_error(r, n)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let sup_by_n: Vec<f64> = (0..n_list.len())
        .map(|k| sup_errors.iter().map(|row| row[k]).fold(0.0, f64::max))
        .collect();
    let final_ok = *sup_by_n.last().expect("nonempty") <= FINAL_SUP;
    let monotone = sup_by_n.windows(2).all(|w| w[1] <= MONOTONE_SLACK * w[0] + 1e-12);
    Ok(ScanTable {
        n_list: n_list.to_vec(),
        regions: regions.to_vec(),
        sup_errors,
        sup_by_n,
        final_ok,
        monotone,
    })
}
