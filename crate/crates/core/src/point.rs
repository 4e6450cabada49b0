//! Point specifications with declared arithmetic nature.
//!
//! A jump abscissa is either an exact rational `p/q` or one of a handful of
//! named irrational constants. Rationality is never inferred from a float:
//! the index of convergence at a jump depends on it, and no float test can
//! decide it.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Named irrational constants in `(0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedIrrational {
    /// `1/sqrt(2)`
    InvSqrt2,
    /// `sqrt(2) - 1`
    Sqrt2Minus1,
    /// `(sqrt(5) - 1) / 2`
    GoldenFrac,
    /// `e - 2`
    EMinus2,
}

impl NamedIrrational {
    pub const ALL: [NamedIrrational; 4] = [
        NamedIrrational::InvSqrt2,
        NamedIrrational::Sqrt2Minus1,
        NamedIrrational::GoldenFrac,
        NamedIrrational::EMinus2,
    ];

    pub fn value(self) -> f64 {
        match self {
            NamedIrrational::InvSqrt2 => std::f64::consts::FRAC_1_SQRT_2,
            NamedIrrational::Sqrt2Minus1 => std::f64::consts::SQRT_2 - 1.0,
            NamedIrrational::GoldenFrac => (5f64.sqrt() - 1.0) / 2.0,
            NamedIrrational::EMinus2 => std::f64::consts::E - 2.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            NamedIrrational::InvSqrt2 => "inv_sqrt2",
            NamedIrrational::Sqrt2Minus1 => "sqrt2_minus_1",
            NamedIrrational::GoldenFrac => "golden_frac",
            NamedIrrational::EMinus2 => "e_minus_2",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == name)
    }

    /// Comma separated list of the accepted names, for error messages.
    pub fn preset_list() -> String {
        Self::ALL
            .iter()
            .map(|c| c.name())
            .collect::<Vec<_>>()
            .join(", ")
    }
}

impl fmt::Display for NamedIrrational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A real number in `[0, 1]` given either exactly as a reduced fraction or as
/// a named irrational.
///
/// For Lagrange operators the number is `θ₀/π`, so the jump sits at
/// `cos(π·value)`. For Shepard operators it is the jump abscissa itself.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointSpec {
    Rational { p: u64, q: u64 },
    Irrational(NamedIrrational),
}

/// `θ₀/π` of a Lagrange jump; must lie strictly inside `(0, 1)`.
pub type AngleSpec = PointSpec;
/// Abscissa of a Shepard jump in `[0, 1]`.
pub type GridPointSpec = PointSpec;

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl PointSpec {
    /// Builds `p/q` in lowest terms.
    pub fn rational(p: u64, q: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidPoint("denominator q must be nonzero".into()));
        }
        if p > q {
            return Err(Error::InvalidPoint(format!("{p}/{q} exceeds 1")));
        }
        let g = gcd(p, q);
        Ok(PointSpec::Rational { p: p / g, q: q / g })
    }

    pub fn irrational(name: NamedIrrational) -> Self {
        PointSpec::Irrational(name)
    }

    pub fn value(&self) -> f64 {
        match *self {
            PointSpec::Rational { p, q } => p as f64 / q as f64,
            PointSpec::Irrational(c) => c.value(),
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, PointSpec::Rational { .. })
    }

    /// Denominator of a rational spec.
    pub fn denominator(&self) -> Option<u64> {
        match *self {
            PointSpec::Rational { q, .. } => Some(q),
            PointSpec::Irrational(_) => None,
        }
    }

    /// Checks the spec is usable as `θ₀/π`, i.e. lies in `(0, 1)` and is reduced.
    pub fn validate_angle(&self) -> Result<()> {
        match *self {
            PointSpec::Rational { p, q } => {
                if q == 0 || p == 0 || p >= q {
                    return Err(Error::InvalidPoint(format!(
                        "angle multiplier {p}/{q} must satisfy 0 < p < q"
                    )));
                }
                if gcd(p, q) != 1 {
                    return Err(Error::InvalidPoint(format!("{p}/{q} is not reduced")));
                }
                Ok(())
            }
            PointSpec::Irrational(_) => Ok(()),
        }
    }

    /// Checks the spec is usable as a grid abscissa in `[0, 1]`.
    pub fn validate_grid(&self) -> Result<()> {
        match *self {
            PointSpec::Rational { p, q } => {
                if q == 0 || p > q {
                    return Err(Error::InvalidPoint(format!(
                        "grid point {p}/{q} must lie in [0, 1]"
                    )));
                }
                if gcd(p, q) != 1 {
                    return Err(Error::InvalidPoint(format!("{p}/{q} is not reduced")));
                }
                Ok(())
            }
            PointSpec::Irrational(_) => Ok(()),
        }
    }

    /// Fractional part of `k·value`. Exact for rational specs, so a true
    /// integer multiple returns exactly `0.0`.
    pub fn frac_of_multiple(&self, k: u64) -> f64 {
        match *self {
            PointSpec::Rational { p, q } => {
                let r = ((k as u128 * p as u128) % q as u128) as u64;
                r as f64 / q as f64
            }
            PointSpec::Irrational(c) => (k as f64 * c.value()).fract(),
        }
    }

    /// Integer part of `k·value`.
    pub fn floor_of_multiple(&self, k: u64) -> u64 {
        match *self {
            PointSpec::Rational { p, q } => ((k as u128 * p as u128) / q as u128) as u64,
            PointSpec::Irrational(c) => (k as f64 * c.value()).floor() as u64,
        }
    }

    /// Compares the fraction `num/den` against the spec value.
    pub fn cmp_fraction(&self, num: u64, den: u64) -> Ordering {
        match *self {
            PointSpec::Rational { p, q } => (num as u128 * q as u128).cmp(&(p as u128 * den as u128)),
            PointSpec::Irrational(c) => (num as f64 / den as f64)
                .partial_cmp(&c.value())
                .unwrap_or(Ordering::Equal),
        }
    }
}

impl fmt::Display for PointSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PointSpec::Rational { p, q } => write!(f, "{p}/{q}"),
            PointSpec::Irrational(c) => write!(f, "{c}"),
        }
    }
}
