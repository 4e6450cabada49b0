//! Jump functions: univariate steps in the three orientations the operators
//! use, and their bivariate tensor products.
//!
//! Node values are decided by exact integer comparison whenever the jump
//! abscissa and the grid are of matching kind (Chebyshev angle vs. angle
//! nodes, unit rational vs. equispaced nodes), so node hits are never lost to
//! rounding.

use std::cmp::Ordering;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::point::PointSpec;

/// Location of a jump.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Abscissa {
    /// `x₀ = cos(π·ν)` with `ν` declared rational or irrational.
    ChebAngle(PointSpec),
    /// `x₀ = ν ∈ [0, 1]`.
    Unit(PointSpec),
    Value(f64),
}

impl Abscissa {
    pub fn x(&self) -> f64 {
        match self {
            Abscissa::ChebAngle(spec) => (PI * spec.value()).cos(),
            Abscissa::Unit(spec) => spec.value(),
            Abscissa::Value(x) => *x,
        }
    }

    /// Position of the Chebyshev node `x_{n,k}` relative to this point.
    pub fn cmp_cheb_node(&self, n: usize, k: usize) -> Ordering {
        match self {
            Abscissa::ChebAngle(spec) => {
                if n < 2 {
                    // single node at x = 1 lies right of any interior point
                    return Ordering::Greater;
                }
                // larger angle means smaller abscissa
                spec.cmp_fraction((k - 1) as u64, (n - 1) as u64).reverse()
            }
            _ => cheb_node(n, k).partial_cmp(&self.x()).unwrap_or(Ordering::Equal),
        }
    }

    /// Position of the equispaced node `i/n` relative to this point.
    pub fn cmp_unit_node(&self, n: usize, i: usize) -> Ordering {
        match self {
            Abscissa::Unit(spec) => spec.cmp_fraction(i as u64, n as u64),
            _ => (i as f64 / n as f64).partial_cmp(&self.x()).unwrap_or(Ordering::Equal),
        }
    }
}

/// `x_{n,k} = cos((k−1)π/(n−1))`, written as a sine of the complementary
/// angle so that symmetric nodes are exactly antisymmetric and the middle
/// node is exactly 0.
pub(crate) fn cheb_node(n: usize, k: usize) -> f64 {
    if n < 2 {
        return 1.0;
    }
    let num = (n - 1) as f64 - 2.0 * (k - 1) as f64;
    (num * (PI / (2 * (n - 1)) as f64)).sin()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// 0 left of the jump, `d` at the jump, 1 right of it.
    Left0Right1 { d: f64 },
    /// 1 on `x ≥ x₀`.
    IndicatorGe,
    /// 1 on `x < x₀`.
    IndicatorLt,
    /// 1 on `x ≤ x₀`.
    IndicatorLe,
}

impl Orientation {
    /// Value at a point whose position relative to the jump is `ord`.
    pub fn value(&self, ord: Ordering) -> f64 {
        match (self, ord) {
            (Orientation::Left0Right1 { .. }, Ordering::Less) => 0.0,
            (Orientation::Left0Right1 { d }, Ordering::Equal) => *d,
            (Orientation::Left0Right1 { .. }, Ordering::Greater) => 1.0,
            (Orientation::IndicatorGe, Ordering::Less) => 0.0,
            (Orientation::IndicatorGe, _) => 1.0,
            (Orientation::IndicatorLt, Ordering::Less) => 1.0,
            (Orientation::IndicatorLt, _) => 0.0,
            (Orientation::IndicatorLe, Ordering::Greater) => 0.0,
            (Orientation::IndicatorLe, _) => 1.0,
        }
    }

    /// Value at the jump itself.
    pub fn at_jump(&self) -> f64 {
        self.value(Ordering::Equal)
    }

    /// One-sided limits `(left, right)`.
    pub fn limits(&self) -> (f64, f64) {
        (self.value(Ordering::Less), self.value(Ordering::Greater))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepFn1D {
    pub at: Abscissa,
    pub orientation: Orientation,
}

impl StepFn1D {
    pub fn new(at: Abscissa, orientation: Orientation) -> Self {
        Self { at, orientation }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let ord = x.partial_cmp(&self.at.x()).unwrap_or(Ordering::Equal);
        self.orientation.value(ord)
    }

    pub fn cheb_node_value(&self, n: usize, k: usize) -> f64 {
        self.orientation.value(self.at.cmp_cheb_node(n, k))
    }

    pub fn unit_node_value(&self, n: usize, i: usize) -> f64 {
        self.orientation.value(self.at.cmp_unit_node(n, i))
    }

    /// Samples at the `n` Chebyshev nodes, `k = 1..=n`.
    pub fn cheb_values(&self, n: usize) -> Vec<f64> {
        (1..=n).map(|k| self.cheb_node_value(n, k)).collect()
    }

    /// Samples at the `n + 1` nodes `i/n`, `i = 0..=n`.
    pub fn unit_values(&self, n: usize) -> Vec<f64> {
        (0..=n).map(|i| self.unit_node_value(n, i)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// 1 on `[x₀, 1] × [y₀, 1]`, 0 elsewhere.
    UpperRight,
    /// 1 on the closed rectangle `[0, x₀] × [0, y₀]`, 0 elsewhere.
    LowerLeft,
    /// 1 on `[0, x₀) × [0, y₀)`; differs from `LowerLeft` only on the two
    /// edges through the jump.
    LowerLeftOpen,
}

impl Convention {
    /// Orientation of each factor `h₁`, `h₂`.
    pub fn factor(self) -> Orientation {
        match self {
            Convention::UpperRight => Orientation::IndicatorGe,
            Convention::LowerLeft => Orientation::IndicatorLe,
            Convention::LowerLeftOpen => Orientation::IndicatorLt,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepFn2D {
    pub x0: Abscissa,
    pub y0: Abscissa,
    pub convention: Convention,
}

impl StepFn2D {
    pub fn new(x0: Abscissa, y0: Abscissa, convention: Convention) -> Self {
        Self { x0, y0, convention }
    }

    /// The factors `h₁, h₂` with `h(x, y) = h₁(x)·h₂(y)`.
    pub fn factors(&self) -> (StepFn1D, StepFn1D) {
        let o = self.convention.factor();
        (StepFn1D::new(self.x0, o), StepFn1D::new(self.y0, o))
    }

    /// Pointwise definition on the rectangle, not via the factors.
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let ox = x.partial_cmp(&self.x0.x()).unwrap_or(Ordering::Equal);
        let oy = y.partial_cmp(&self.y0.x()).unwrap_or(Ordering::Equal);
        self.value_from(ox, oy)
    }

    fn value_from(&self, ox: Ordering, oy: Ordering) -> f64 {
        use Ordering::*;
        let inside = match self.convention {
            Convention::UpperRight => ox != Less && oy != Less,
            Convention::LowerLeft => ox != Greater && oy != Greater,
            Convention::LowerLeftOpen => ox == Less && oy == Less,
        };
        if inside {
            1.0
        } else {
            0.0
        }
    }

    /// `h(x_{n,i}, y_{m,j})` on the Chebyshev tensor grid, from the rectangle
    /// definition.
    pub fn cheb_node_value(&self, n: usize, i: usize, m: usize, j: usize) -> f64 {
        self.value_from(self.x0.cmp_cheb_node(n, i), self.y0.cmp_cheb_node(m, j))
    }

    /// `h(i/n, j/m)` on the equispaced tensor grid.
    pub fn unit_node_value(&self, n: usize, i: usize, m: usize, j: usize) -> f64 {
        self.value_from(self.x0.cmp_unit_node(n, i), self.y0.cmp_unit_node(m, j))
    }
}
