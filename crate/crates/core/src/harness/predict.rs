//! Cluster tables predicted for the operator sequences at a jump.
//!
//! Each axis contributes either a finite list of limits reached along
//! residue classes of `n`, or a continuous profile when the jump position is
//! irrational. Bivariate tables are tensor products of two axis tables.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::density::{Interval, Prediction, Target};
use crate::error::{Error, Result};
use crate::lagrange::{subsequence_k_m, EvalAt};
use crate::point::PointSpec;
use crate::step::{Convention, Orientation};
use crate::zeta::{g_profile, g_s_profile, preimage_measure_1d, preimage_measure_2d, Profile1D, Profile2D, BISECTION_TOL};

use super::Operator;

/// Indices `n ≡ class (mod modulus)`; modulus 1 selects every index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Residue {
    pub modulus: u64,
    pub class: u64,
}

impl Residue {
    pub const ALL: Residue = Residue { modulus: 1, class: 0 };

    pub fn contains(&self, n: usize) -> bool {
        n as u64 % self.modulus == self.class
    }

    pub fn density(&self) -> f64 {
        1.0 / self.modulus as f64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub target: Target,
    pub predicted: Prediction,
    /// Explicit subsequences realizing the cluster, one residue per axis.
    pub witnesses: Vec<Vec<Residue>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Location {
    /// Univariate operator at its jump.
    Jump,
    /// Bivariate, only the x-factor sits at its jump.
    EdgeX,
    /// Bivariate, only the y-factor sits at its jump.
    EdgeY,
    Corner,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Arithmetic {
    Rational,
    Irrational,
    /// Rational x-jump, irrational y-jump.
    RationalIrrational,
    IrrationalRational,
}

/// Which case of the characterization produced a table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableSource {
    pub operator: Operator,
    pub location: Location,
    pub arithmetic: Arithmetic,
    pub s: Option<f64>,
}

impl fmt::Display for TableSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} {:?} {:?}", self.operator, self.location, self.arithmetic)?;
        if let Some(s) = self.s {
            write!(f, " s={s}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureProfile {
    OneD(Profile1D),
    TwoD(Profile2D),
}

impl MeasureProfile {
    /// Predicted index of `A`: the measure of the profile's preimage.
    pub fn measure(&self, a: &[Interval]) -> Result<f64> {
        match self {
            MeasureProfile::OneD(p) => preimage_measure_1d(p, a, BISECTION_TOL),
            MeasureProfile::TwoD(p) => Ok(preimage_measure_2d(p, a, BISECTION_TOL)?.value),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredictionTable {
    pub source: TableSource,
    pub clusters: Vec<Cluster>,
    /// Present when the limit points fill a continuum; indices of sets are
    /// then preimage measures.
    pub profile: Option<MeasureProfile>,
}

impl PredictionTable {
    /// Sum of the exact predicted indices; lower bounds are left out.
    pub fn exact_total(&self) -> f64 {
        self.clusters
            .iter()
            .filter_map(|c| match c.predicted {
                Prediction::Exact(v) => Some(v),
                Prediction::AtLeast(_) => None,
            })
            .sum()
    }

    /// Exact indices of disjoint clusters cannot add up to more than 1.
    pub fn is_sane(&self) -> bool {
        self.exact_total() <= 1.0 + 1e-12
    }

    pub fn is_discrete(&self) -> bool {
        self.profile.is_none() && self.clusters.iter().all(|c| matches!(c.target, Target::Value(_)))
    }

    /// Cluster values, when the table is discrete.
    pub fn values(&self) -> Vec<f64> {
        self.clusters
            .iter()
            .filter_map(|c| match c.target {
                Target::Value(v) => Some(v),
                _ => None,
            })
            .collect()
    }

    /// Smallest distance between two distinct cluster values.
    pub fn min_gap(&self) -> Option<f64> {
        let mut v = self.values();
        v.sort_by(f64::total_cmp);
        v.windows(2).map(|w| w[1] - w[0]).reduce(f64::min)
    }

    /// Adds single-interval targets whose predicted index is the profile's
    /// preimage measure.
    pub fn with_measure_targets(mut self, targets: &[Interval]) -> Result<Self> {
        let Some(profile) = self.profile else {
            return Ok(self);
        };
        for iv in targets {
            let measure = profile.measure(std::slice::from_ref(iv))?;
            self.clusters.push(Cluster {
                target: Target::interval(iv.lo, iv.hi)?,
                predicted: Prediction::Exact(measure),
                witnesses: Vec::new(),
            });
        }
        Ok(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct AxisEntry {
    value: f64,
    weight: f64,
    witness: Residue,
}

#[derive(Clone, Debug, PartialEq)]
enum AxisTable {
    Discrete(Vec<AxisEntry>),
    Profile(Profile1D),
}

impl AxisTable {
    /// The factor converges to `limit` for every index.
    fn constant(limit: f64) -> Self {
        AxisTable::Discrete(vec![AxisEntry {
            value: limit,
            weight: 1.0,
            witness: Residue::ALL,
        }])
    }
}

fn residue_class(p: u64, q: u64, m: u64, shift: u64) -> Result<Residue> {
    let l = subsequence_k_m(p, q, m)?.l;
    Ok(Residue {
        modulus: q,
        class: (l + shift) % q,
    })
}

/// `L_n h(x₀)` with `h(x₀) = d`: `d` on the node-hit class, `g(m/q)` on the
/// others, or the profile `g` for irrational angles.
fn lagrange_axis(spec: &PointSpec, d: f64) -> Result<AxisTable> {
    spec.validate_angle()?;
    match *spec {
        PointSpec::Irrational(_) => Ok(AxisTable::Profile(Profile1D::g())),
        PointSpec::Rational { p, q } => {
            let weight = 1.0 / q as f64;
            (0..q)
                .map(|m| {
                    let value = if m == 0 { d } else { g_profile(m as f64 / q as f64)? };
                    // σ_n depends on n − 1
                    Ok(AxisEntry {
                        value,
                        weight,
                        witness: residue_class(p, q, m, 1)?,
                    })
                })
                .collect::<Result<Vec<_>>>()
                .map(AxisTable::Discrete)
        }
    }
}

/// `S_n h(x₀)` for an indicator factor: the value at the jump on the
/// node-hit class, and away from nodes `g_s(t)` with `t = frac(n·x₀)` (or
/// `g_s(1 − t)` when the factor is 1 above the jump). For `s = 1` both
/// harmonic tails diverge and the limit off the hit class is `1/2`.
fn shepard_axis(spec: &PointSpec, s: f64, orientation: Orientation) -> Result<AxisTable> {
    spec.validate_grid()?;
    let one_above = matches!(orientation, Orientation::IndicatorGe);
    let off_node = |t: f64| -> Result<f64> {
        if s == 1.0 {
            return Ok(0.5);
        }
        g_s_profile(s, if one_above { 1.0 - t } else { t })
    };
    match *spec {
        PointSpec::Irrational(_) if s == 1.0 => Ok(AxisTable::constant(0.5)),
        // t = frac(n·x₀) is equidistributed, and so is 1 − t, so both
        // orientations share the profile g_s
        PointSpec::Irrational(_) => Ok(AxisTable::Profile(Profile1D::g_s(s)?)),
        PointSpec::Rational { p, q } => {
            let weight = 1.0 / q as f64;
            (0..q)
                .map(|m| {
                    let value = if m == 0 {
                        orientation.at_jump()
                    } else {
                        off_node(m as f64 / q as f64)?
                    };
                    Ok(AxisEntry {
                        value,
                        weight,
                        witness: residue_class(p, q, m, 0)?,
                    })
                })
                .collect::<Result<Vec<_>>>()
                .map(AxisTable::Discrete)
        }
    }
}

/// Clusters whose values agree to `1e−12` are one cluster: indices add,
/// witnesses are kept side by side.
fn merge_coincident(mut clusters: Vec<Cluster>) -> Vec<Cluster> {
    clusters.sort_by(|a, b| match (&a.target, &b.target) {
        (Target::Value(x), Target::Value(y)) => y.total_cmp(x),
        _ => std::cmp::Ordering::Equal,
    });
    let mut out: Vec<Cluster> = Vec::with_capacity(clusters.len());
    for c in clusters {
        if let (Some(last), Target::Value(v)) = (out.last_mut(), &c.target) {
            if let (Target::Value(w), Prediction::Exact(a), Prediction::Exact(b)) =
                (&last.target, last.predicted, c.predicted)
            {
                if (v - w).abs() <= 1e-12 * v.abs().max(1.0) {
                    last.predicted = Prediction::Exact(a + b);
                    last.witnesses.extend(c.witnesses);
                    continue;
                }
            }
        }
        out.push(c);
    }
    out
}

fn single_axis_table(source: TableSource, axis: AxisTable, live_axis: usize) -> PredictionTable {
    match axis {
        AxisTable::Profile(p) => PredictionTable {
            source,
            clusters: Vec::new(),
            profile: Some(MeasureProfile::OneD(p)),
        },
        AxisTable::Discrete(entries) => {
            let dims = if source.operator.is_bivariate() { 2 } else { 1 };
            let clusters = entries
                .into_iter()
                .map(|e| {
                    let mut witness = vec![Residue::ALL; dims];
                    witness[live_axis] = e.witness;
                    Cluster {
                        target: Target::Value(e.value),
                        predicted: Prediction::Exact(e.weight),
                        witnesses: vec![witness],
                    }
                })
                .collect();
            PredictionTable {
                source,
                clusters: merge_coincident(clusters),
                profile: None,
            }
        }
    }
}

fn product_table(source: TableSource, ax: AxisTable, ay: AxisTable) -> Result<PredictionTable> {
    let (clusters, profile) = match (ax, ay) {
        (AxisTable::Discrete(xs), AxisTable::Discrete(ys)) => {
            let mut clusters = Vec::with_capacity(xs.len() * ys.len());
            for a in &xs {
                for b in &ys {
                    clusters.push(Cluster {
                        target: Target::Value(a.value * b.value),
                        predicted: Prediction::Exact(a.weight * b.weight),
                        witnesses: vec![vec![a.witness, b.witness]],
                    });
                }
            }
            (merge_coincident(clusters), None)
        }
        (AxisTable::Discrete(entries), AxisTable::Profile(p)) | (AxisTable::Profile(p), AxisTable::Discrete(entries)) => {
            // c·profile sweeps the interval between 0 and c
            let range = p.range();
            let clusters = entries
                .iter()
                .map(|e| {
                    let ends = [e.value * range.lo, e.value * range.hi, 0.0];
                    let lo = ends.iter().copied().fold(f64::INFINITY, f64::min);
                    let hi = ends.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    Ok(Cluster {
                        target: Target::interval(lo, hi)?,
                        predicted: Prediction::AtLeast(e.weight),
                        witnesses: Vec::new(),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            (clusters, None)
        }
        (AxisTable::Profile(px), AxisTable::Profile(py)) => {
            (Vec::new(), Some(MeasureProfile::TwoD(Profile2D::new(px, py))))
        }
    };
    Ok(PredictionTable {
        source,
        clusters,
        profile,
    })
}

fn arithmetic_of(x: &PointSpec, y: Option<&PointSpec>) -> Arithmetic {
    match (x.is_rational(), y.map(PointSpec::is_rational)) {
        (true, None | Some(true)) => Arithmetic::Rational,
        (false, None | Some(false)) => Arithmetic::Irrational,
        (true, Some(false)) => Arithmetic::RationalIrrational,
        (false, Some(true)) => Arithmetic::IrrationalRational,
    }
}

/// Table for `L_n h(x₀)`, `x₀ = cos(π·spec)`, `h(x₀) = d`.
pub fn predict_lagrange_1d(spec: &PointSpec, d: f64) -> Result<PredictionTable> {
    let source = TableSource {
        operator: Operator::Lagrange1d,
        location: Location::Jump,
        arithmetic: arithmetic_of(spec, None),
        s: None,
    };
    Ok(single_axis_table(source, lagrange_axis(spec, d)?, 0))
}

/// Where a bivariate evaluation point sits relative to the jump set.
fn locate(at_x: EvalAt, at_y: EvalAt, live: impl Fn(usize, f64) -> bool) -> Result<Location> {
    match (at_x, at_y) {
        (EvalAt::Jump, EvalAt::Jump) => Ok(Location::Corner),
        (EvalAt::Jump, EvalAt::Value(y)) if live(1, y) => Ok(Location::EdgeX),
        (EvalAt::Value(x), EvalAt::Jump) if live(0, x) => Ok(Location::EdgeY),
        _ => Err(Error::PointNotOnJumpSet),
    }
}

/// Table for `L_{n,m} h(x, y)` with `h` the indicator of
/// `[x₀, 1] × [y₀, 1]`, at a point of the edges through the corner.
pub fn predict_lagrange_2d(spec_x: &PointSpec, spec_y: &PointSpec, at_x: EvalAt, at_y: EvalAt) -> Result<PredictionTable> {
    let corner = [
        (std::f64::consts::PI * spec_x.value()).cos(),
        (std::f64::consts::PI * spec_y.value()).cos(),
    ];
    let location = locate(at_x, at_y, |axis, v| v > corner[axis] && v <= 1.0)?;
    let ax = lagrange_axis(spec_x, 1.0)?;
    let ay = lagrange_axis(spec_y, 1.0)?;
    let mut source = TableSource {
        operator: Operator::Lagrange2d,
        location,
        arithmetic: arithmetic_of(spec_x, Some(spec_y)),
        s: None,
    };
    match location {
        Location::EdgeX => {
            source.arithmetic = arithmetic_of(spec_x, None);
            Ok(single_axis_table(source, ax, 0))
        }
        Location::EdgeY => {
            source.arithmetic = arithmetic_of(spec_y, None);
            Ok(single_axis_table(source, ay, 1))
        }
        _ => product_table(source, ax, ay),
    }
}

/// Table for `S_n h(x₀)` with `h` one factor of the given convention.
pub fn predict_shepard_1d(s: f64, spec: &PointSpec, convention: Convention) -> Result<PredictionTable> {
    check_s(s)?;
    let source = TableSource {
        operator: Operator::Shepard1d,
        location: Location::Jump,
        arithmetic: arithmetic_of(spec, None),
        s: Some(s),
    };
    Ok(single_axis_table(source, shepard_axis(spec, s, convention.factor())?, 0))
}

/// Table for `S_{n,m} h(x, y)` at a point of the jump set of the rectangle
/// indicator `h`.
pub fn predict_shepard_2d(
    s: f64,
    spec_x: &PointSpec,
    spec_y: &PointSpec,
    at_x: EvalAt,
    at_y: EvalAt,
    convention: Convention,
) -> Result<PredictionTable> {
    check_s(s)?;
    let corner = [spec_x.value(), spec_y.value()];
    let location = locate(at_x, at_y, |axis, v| match convention {
        Convention::UpperRight => v > corner[axis] && v <= 1.0,
        Convention::LowerLeft | Convention::LowerLeftOpen => v >= 0.0 && v < corner[axis],
    })?;
    let o = convention.factor();
    let ax = shepard_axis(spec_x, s, o)?;
    let ay = shepard_axis(spec_y, s, o)?;
    let mut source = TableSource {
        operator: Operator::Shepard2d,
        location,
        arithmetic: arithmetic_of(spec_x, Some(spec_y)),
        s: Some(s),
    };
    match location {
        Location::EdgeX => {
            source.arithmetic = arithmetic_of(spec_x, None);
            Ok(single_axis_table(source, ax, 0))
        }
        Location::EdgeY => {
            source.arithmetic = arithmetic_of(spec_y, None);
            Ok(single_axis_table(source, ay, 1))
        }
        _ => product_table(source, ax, ay),
    }
}

pub(crate) fn check_s(s: f64) -> Result<()> {
    if !(s >= 1.0) || !s.is_finite() {
        return Err(Error::OutOfDomain {
            name: "s",
            value: s,
            expected: ">= 1",
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn rat(p: u64, q: u64) -> PointSpec {
        PointSpec::rational(p, q).unwrap()
    }

    fn point_values(t: &PredictionTable) -> Vec<(f64, f64)> {
        t.clusters
            .iter()
            .map(|c| match (&c.target, c.predicted) {
                (Target::Value(v), Prediction::Exact(w)) => (*v, w),
                other => panic!("unexpected cluster {other:?}"),
            })
            .collect()
    }

    #[test]
    fn lagrange_1d_third() {
        let t = predict_lagrange_1d(&rat(1, 3), 1.0).unwrap();
        let v = point_values(&t);
        assert_eq!(v.len(), 3);
        assert_eq!(v[0], (1.0, 1.0 / 3.0));
        assert_abs_diff_eq!(v[1].0, 0.691076034711422, epsilon = 1e-12);
        assert_abs_diff_eq!(v[2].0, 0.308923965288578, epsilon = 1e-12);
        assert!(t.is_sane() && t.is_discrete());
        // d arm on n ≡ 1 (mod 3): n − 1 divisible by 3
        assert_eq!(t.clusters[0].witnesses, vec![vec![Residue { modulus: 3, class: 1 }]]);
    }

    #[test]
    fn lagrange_1d_merge() {
        let t = predict_lagrange_1d(&rat(1, 2), 0.5).unwrap();
        let v = point_values(&t);
        assert_eq!(v.len(), 1);
        assert_abs_diff_eq!(v[0].0, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(v[0].1, 1.0, epsilon = 1e-15);
        assert_eq!(t.clusters[0].witnesses.len(), 2);
    }

    #[test]
    fn lagrange_irrational_carries_profile() {
        let spec = PointSpec::Irrational(crate::point::NamedIrrational::InvSqrt2);
        let t = predict_lagrange_1d(&spec, 1.0).unwrap();
        assert!(t.clusters.is_empty());
        assert_eq!(t.profile, Some(MeasureProfile::OneD(Profile1D::g())));
        let t = t.with_measure_targets(&[Interval { lo: 0.3, hi: 0.6 }]).unwrap();
        assert_eq!(t.clusters.len(), 1);
    }

    #[test]
    fn lagrange_2d_cases() {
        let t = predict_lagrange_2d(&rat(1, 3), &rat(1, 2), EvalAt::Jump, EvalAt::Jump).unwrap();
        assert_eq!(t.source.location, Location::Corner);
        let v = point_values(&t);
        assert_eq!(v.len(), 6);
        for (_, w) in &v {
            assert_abs_diff_eq!(*w, 1.0 / 6.0, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(t.min_gap().unwrap(), 0.0366, epsilon = 1e-3);

        let t = predict_lagrange_2d(&rat(1, 3), &rat(1, 2), EvalAt::Jump, EvalAt::Value(0.5)).unwrap();
        assert_eq!(t.source.location, Location::EdgeX);
        assert_eq!(point_values(&t).len(), 3);
        assert_eq!(t.clusters[0].witnesses[0][1], Residue::ALL);

        assert_eq!(
            predict_lagrange_2d(&rat(1, 3), &rat(1, 2), EvalAt::Jump, EvalAt::Value(-0.5)),
            Err(Error::PointNotOnJumpSet)
        );
        let irr = PointSpec::Irrational(crate::point::NamedIrrational::GoldenFrac);
        let t = predict_lagrange_2d(&rat(1, 3), &irr, EvalAt::Jump, EvalAt::Jump).unwrap();
        assert!(t.clusters.iter().all(|c| c.predicted.is_lower_bound()));
        assert_eq!(t.clusters.len(), 3);
        let t = predict_lagrange_2d(&irr, &irr, EvalAt::Jump, EvalAt::Jump).unwrap();
        assert!(matches!(t.profile, Some(MeasureProfile::TwoD(_))));
    }

    #[test]
    fn shepard_s1_tables() {
        let half = rat(1, 2);
        let t = predict_shepard_2d(1.0, &half, &half, EvalAt::Value(0.25), EvalAt::Jump, Convention::LowerLeft).unwrap();
        assert_eq!(point_values(&t), vec![(1.0, 0.5), (0.5, 0.5)]);
        let t = predict_shepard_2d(1.0, &half, &half, EvalAt::Jump, EvalAt::Jump, Convention::LowerLeft).unwrap();
        assert_eq!(point_values(&t), vec![(1.0, 0.25), (0.5, 0.5), (0.25, 0.25)]);
        let t = predict_shepard_2d(1.0, &half, &half, EvalAt::Jump, EvalAt::Jump, Convention::LowerLeftOpen).unwrap();
        assert_eq!(point_values(&t), vec![(0.25, 0.25), (0.0, 0.75)]);
        let irr = PointSpec::Irrational(crate::point::NamedIrrational::InvSqrt2);
        let t = predict_shepard_2d(1.0, &rat(1, 3), &irr, EvalAt::Jump, EvalAt::Jump, Convention::LowerLeft).unwrap();
        let v = point_values(&t);
        assert_eq!(v[0], (0.5, 1.0 / 3.0));
        assert_abs_diff_eq!(v[1].1, 2.0 / 3.0, epsilon = 1e-15);
        let t = predict_shepard_2d(1.0, &irr, &irr, EvalAt::Jump, EvalAt::Jump, Convention::LowerLeft).unwrap();
        assert_eq!(point_values(&t), vec![(0.25, 1.0)]);
        for t in [
            predict_shepard_2d(1.0, &rat(2, 5), &rat(1, 3), EvalAt::Jump, EvalAt::Jump, Convention::LowerLeft).unwrap(),
            predict_shepard_2d(3.0, &rat(2, 5), &rat(1, 3), EvalAt::Jump, EvalAt::Jump, Convention::LowerLeft).unwrap(),
        ] {
            assert_abs_diff_eq!(t.exact_total(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn shepard_s2_edge() {
        let half = rat(1, 2);
        let t = predict_shepard_2d(2.0, &half, &half, EvalAt::Value(0.25), EvalAt::Jump, Convention::LowerLeft).unwrap();
        assert_eq!(t.source.location, Location::EdgeY);
        let v = point_values(&t);
        assert_eq!(v[0], (1.0, 0.5));
        assert_abs_diff_eq!(v[1].0, 0.5, epsilon = 1e-12);
        assert_eq!(t.clusters[0].witnesses[0], vec![Residue::ALL, Residue { modulus: 2, class: 0 }]);
        assert!(predict_shepard_2d(2.0, &half, &half, EvalAt::Value(0.75), EvalAt::Jump, Convention::LowerLeft).is_err());
        assert!(predict_shepard_1d(0.5, &half, Convention::LowerLeft).is_err());
    }

    #[test]
    fn shepard_upper_right_reflects_profile() {
        let t = predict_shepard_1d(2.0, &rat(1, 3), Convention::UpperRight).unwrap();
        let v = point_values(&t);
        assert_eq!(v[0].0, 1.0);
        assert_abs_diff_eq!(v[1].0, g_s_profile(2.0, 1.0 / 3.0).unwrap(), epsilon = 1e-12);
    }
}
