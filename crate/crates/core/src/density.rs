//! Natural density of index sets in ℕ and ℕ², and the index of convergence
//! of single and double sequences to values, interval unions and ±∞.
//!
//! Densities are estimated at finite scale from prefix counts
//! `|K ∩ {1..n}^dim| / n^dim` taken on a checkpoint grid. The lower and upper
//! estimates are the min and max of these ratios over the tail half of the
//! grid, which discards the transient small-`n` part of the sequence.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of indices per multi-index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Dim {
    One,
    Two,
}

impl Dim {
    pub fn get(self) -> u32 {
        match self {
            Dim::One => 1,
            Dim::Two => 2,
        }
    }

    /// `n^dim`, the size of the prefix window `{1..n}^dim`.
    pub fn volume(self, n: usize) -> u64 {
        match self {
            Dim::One => n as u64,
            Dim::Two => n as u64 * n as u64,
        }
    }
}

type Membership = Arc<dyn Fn(usize, usize) -> bool + Send + Sync>;

/// A subset of ℕ (dim 1) or ℕ² (dim 2), indices starting at 1.
///
/// For dim 1 the second coordinate passed to the predicate is always 1.
#[derive(Clone)]
pub struct IndexSet {
    dim: Dim,
    member: Membership,
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IndexSet").field("dim", &self.dim).finish_non_exhaustive()
    }
}

impl IndexSet {
    pub fn one_dim(pred: impl Fn(usize) -> bool + Send + Sync + 'static) -> Self {
        Self {
            dim: Dim::One,
            member: Arc::new(move |n, _| pred(n)),
        }
    }

    pub fn two_dim(pred: impl Fn(usize, usize) -> bool + Send + Sync + 'static) -> Self {
        Self {
            dim: Dim::Two,
            member: Arc::new(pred),
        }
    }

    /// A set given by an explicit listing. Entries for dim 1 use `(n, 1)`.
    pub fn from_listing(dim: Dim, mut listing: Vec<(usize, usize)>) -> Self {
        listing.sort_unstable();
        listing.dedup();
        let listing: Arc<[(usize, usize)]> = listing.into();
        Self {
            dim,
            member: Arc::new(move |n, m| listing.binary_search(&(n, m)).is_ok()),
        }
    }

    pub fn empty(dim: Dim) -> Self {
        Self {
            dim,
            member: Arc::new(|_, _| false),
        }
    }

    pub fn full(dim: Dim) -> Self {
        Self {
            dim,
            member: Arc::new(|_, _| true),
        }
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn contains(&self, n: usize, m: usize) -> bool {
        match self.dim {
            Dim::One => (self.member)(n, 1),
            Dim::Two => (self.member)(n, m),
        }
    }

    pub fn complement(&self) -> Self {
        let inner = Arc::clone(&self.member);
        Self {
            dim: self.dim,
            member: Arc::new(move |n, m| !inner(n, m)),
        }
    }

    /// Exact count `|K ∩ {1..n}^dim|`.
    pub fn count_prefix(&self, n: usize) -> u64 {
        match self.dim {
            Dim::One => (1..=n).filter(|&i| (self.member)(i, 1)).count() as u64,
            Dim::Two => (1..=n)
                .into_par_iter()
                .map(|i| (1..=n).filter(|&j| (self.member)(i, j)).count() as u64)
                .sum(),
        }
    }

    /// Exact prefix counts at every checkpoint, in one pass over the largest
    /// window. Checkpoints must be ascending.
    pub fn prefix_counts(&self, checkpoints: &[usize]) -> Vec<u64> {
        let Some(&max_n) = checkpoints.last() else {
            return Vec::new();
        };
        // shells[k] counts members whose largest coordinate is exactly k
        let shells: Vec<u64> = match self.dim {
            Dim::One => {
                let mut shells = vec![0u64; max_n + 1];
                for i in 1..=max_n {
                    if (self.member)(i, 1) {
                        shells[i] += 1;
                    }
                }
                shells
            }
            Dim::Two => (1..=max_n)
                .into_par_iter()
                .fold(
                    || vec![0u64; max_n + 1],
                    |mut acc, i| {
                        for j in 1..=max_n {
                            if (self.member)(i, j) {
                                acc[i.max(j)] += 1;
                            }
                        }
                        acc
                    },
                )
                .reduce(
                    || vec![0u64; max_n + 1],
                    |mut a, b| {
                        a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                        a
                    },
                ),
        };
        let mut cumulative = 0u64;
        let mut out = Vec::with_capacity(checkpoints.len());
        let mut next = 0;
        for (k, c) in shells.iter().enumerate() {
            cumulative += c;
            while next < checkpoints.len() && checkpoints[next] == k {
                out.push(cumulative);
                next += 1;
            }
        }
        out
    }
}

/// Finite-scale estimate of the lower and upper density of an index set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityEstimate {
    pub checkpoints: Vec<usize>,
    pub counts: Vec<u64>,
    pub ratios: Vec<f64>,
    #[serde(rename = "lower")]
    pub lower_est: f64,
    #[serde(rename = "upper")]
    pub upper_est: f64,
}

impl DensityEstimate {
    fn from_counts(dim: Dim, checkpoints: &[usize], counts: Vec<u64>) -> Self {
        let ratios: Vec<f64> = checkpoints
            .iter()
            .zip(&counts)
            .map(|(&n, &c)| c as f64 / dim.volume(n) as f64)
            .collect();
        let tail = &ratios[ratios.len() / 2..];
        let lower_est = tail.iter().copied().fold(f64::INFINITY, f64::min);
        let upper_est = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Self {
            checkpoints: checkpoints.to_vec(),
            counts,
            ratios,
            lower_est,
            upper_est,
        }
    }

    /// Ratio at the largest checkpoint.
    pub fn last_ratio(&self) -> f64 {
        *self.ratios.last().unwrap_or(&0.0)
    }
}

pub(crate) fn validate_checkpoints(checkpoints: &[usize]) -> Result<()> {
    if checkpoints.is_empty() {
        return Err(Error::EmptyCheckpoints);
    }
    if checkpoints.len() < 2 || checkpoints[0] == 0 || checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::BadCheckpoints);
    }
    Ok(())
}

/// Geometric grid of `count` checkpoints from `n/8` to `n`, deduplicated.
pub fn default_checkpoints(n: usize, count: usize) -> Vec<usize> {
    let count = count.max(2);
    let lo = (n as f64 / 8.0).max(1.0);
    let ratio = (n as f64 / lo).powf(1.0 / (count - 1) as f64);
    let mut grid: Vec<usize> = (0..count)
        .map(|i| (lo * ratio.powi(i as i32)).round() as usize)
        .map(|c| c.clamp(1, n.max(1)))
        .collect();
    if let Some(last) = grid.last_mut() {
        *last = n.max(1);
    }
    grid.dedup();
    grid
}

pub fn density_bounds(set: &IndexSet, checkpoints: &[usize]) -> Result<DensityEstimate> {
    validate_checkpoints(checkpoints)?;
    let counts = set.prefix_counts(checkpoints);
    Ok(DensityEstimate::from_counts(set.dim(), checkpoints, counts))
}

/// Checks `δ₋(K) + δ⁺(Kᶜ) = 1` at finite scale: prefix counts of `K` and its
/// complement must add up to `n^dim` at every checkpoint.
pub fn complement_identity_check(set: &IndexSet, checkpoints: &[usize]) -> Result<bool> {
    let k = density_bounds(set, checkpoints)?;
    let kc = density_bounds(&set.complement(), checkpoints)?;
    let counts_exact = checkpoints
        .iter()
        .zip(k.counts.iter().zip(&kc.counts))
        .all(|(&n, (a, b))| a + b == set.dim().volume(n));
    Ok(counts_exact && (k.lower_est + kc.upper_est - 1.0).abs() <= 1e-12)
}

/// Closed interval `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::InvalidInterval { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    pub fn point(x: f64) -> Self {
        Self { lo: x, hi: x }
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.hi < self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// Distance from `x` to the interval (0 inside).
    pub fn distance(&self, x: f64) -> f64 {
        if x < self.lo {
            self.lo - x
        } else if x > self.hi {
            x - self.hi
        } else {
            0.0
        }
    }

    /// Gap between two intervals (0 when they intersect).
    pub fn gap(&self, other: &Interval) -> f64 {
        (other.lo - self.hi).max(self.lo - other.hi).max(0.0)
    }
}

/// Target of an index-of-convergence query.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Value(f64),
    Set(Vec<Interval>),
    PlusInfinity,
    MinusInfinity,
}

impl Target {
    /// A finite union of pairwise disjoint closed intervals, stored sorted.
    pub fn set(mut intervals: Vec<Interval>) -> Result<Self> {
        for iv in &intervals {
            Interval::new(iv.lo, iv.hi)?;
        }
        intervals.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        if intervals.windows(2).any(|w| w[1].lo <= w[0].hi) {
            return Err(Error::IntersectingIntervals);
        }
        Ok(Target::Set(intervals))
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Ok(Target::Set(vec![Interval::new(lo, hi)?]))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Target::PlusInfinity | Target::MinusInfinity)
    }

    /// Intervals making up a finite target; `None` for ±∞.
    pub fn intervals(&self) -> Option<Vec<Interval>> {
        match self {
            Target::Value(v) => Some(vec![Interval::point(*v)]),
            Target::Set(ivs) => Some(ivs.clone()),
            _ => None,
        }
    }

    /// Distance from `x` to a finite target.
    pub fn distance(&self, x: f64) -> f64 {
        match self {
            Target::Value(v) => (x - v).abs(),
            Target::Set(ivs) => ivs.iter().map(|iv| iv.distance(x)).fold(f64::INFINITY, f64::min),
            Target::PlusInfinity | Target::MinusInfinity => f64::INFINITY,
        }
    }

    /// Membership of `x` in the closed dilation `A + B_ε`.
    pub fn contains_dilated(&self, x: f64, epsilon: f64) -> bool {
        self.distance(x) <= epsilon
    }

    /// Smallest gap between the two targets' closures.
    pub fn gap(&self, other: &Target) -> f64 {
        match (self.intervals(), other.intervals()) {
            (Some(a), Some(b)) => a
                .iter()
                .flat_map(|x| b.iter().map(move |y| x.gap(y)))
                .fold(f64::INFINITY, f64::min),
            _ => 0.0,
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Value(v) => write!(f, "{v}"),
            Target::Set(ivs) => {
                let parts: Vec<String> = ivs.iter().map(|i| format!("[{}, {}]", i.lo, i.hi)).collect();
                f.write_str(&parts.join(" ∪ "))
            }
            Target::PlusInfinity => f.write_str("+inf"),
            Target::MinusInfinity => f.write_str("-inf"),
        }
    }
}

/// Finite prefix of a single or double sequence, indices `1..=len` per axis.
#[derive(Clone, Debug, PartialEq)]
pub enum SeqWindow {
    Single(Arc<[f64]>),
    /// `x_{n,m} = u[n]·v[m]`.
    Product { u: Arc<[f64]>, v: Arc<[f64]> },
    /// Row-major `len × len` values.
    Dense { len: usize, values: Arc<[f64]> },
}

impl SeqWindow {
    pub fn single(values: Vec<f64>) -> Self {
        SeqWindow::Single(values.into())
    }

    pub fn product(u: Vec<f64>, v: Vec<f64>) -> Self {
        SeqWindow::Product { u: u.into(), v: v.into() }
    }

    /// Materializes `x(n, m)` for `1 <= n, m <= len`.
    pub fn dense(len: usize, x: impl Fn(usize, usize) -> f64 + Sync) -> Self {
        let values: Vec<f64> = (0..len * len)
            .into_par_iter()
            .map(|idx| x(idx / len + 1, idx % len + 1))
            .collect();
        SeqWindow::Dense { len, values: values.into() }
    }

    pub fn from_fn_1d(len: usize, x: impl Fn(usize) -> f64 + Sync + Send) -> Self {
        SeqWindow::single((1..=len).into_par_iter().map(x).collect())
    }

    pub fn dim(&self) -> Dim {
        match self {
            SeqWindow::Single(_) => Dim::One,
            _ => Dim::Two,
        }
    }

    /// Usable window bound per axis.
    pub fn len(&self) -> usize {
        match self {
            SeqWindow::Single(v) => v.len(),
            SeqWindow::Product { u, v } => u.len().min(v.len()),
            SeqWindow::Dense { len, .. } => *len,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `x_n` (dim 1, `m` ignored) or `x_{n,m}`, 1-based.
    pub fn value(&self, n: usize, m: usize) -> f64 {
        match self {
            SeqWindow::Single(v) => v[n - 1],
            SeqWindow::Product { u, v } => u[n - 1] * v[m - 1],
            SeqWindow::Dense { len, values } => values[(n - 1) * len + (m - 1)],
        }
    }

    /// Index set `{indices : predicate(value)}`.
    pub fn select(&self, pred: impl Fn(f64) -> bool + Send + Sync + 'static) -> IndexSet {
        let win = self.clone();
        match self.dim() {
            Dim::One => IndexSet::one_dim(move |n| pred(win.value(n, 1))),
            Dim::Two => IndexSet::two_dim(move |n, m| pred(win.value(n, m))),
        }
    }

    /// Hit set `{indices : value ∈ target + B_ε}` for a finite target.
    pub fn hit_set(&self, target: &Target, epsilon: f64) -> IndexSet {
        let target = target.clone();
        self.select(move |x| target.contains_dilated(x, epsilon))
    }
}

/// How a target is thickened: by `B_ε` for finite targets, or by a grid of
/// cutoffs `M` for ±∞ targets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dilation {
    Epsilon(f64),
    Cutoffs(Vec<f64>),
}

/// Theoretical index attached to a target.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Prediction {
    Exact(f64),
    AtLeast(f64),
}

impl Prediction {
    pub fn value(&self) -> f64 {
        match *self {
            Prediction::Exact(v) | Prediction::AtLeast(v) => v,
        }
    }

    pub fn is_lower_bound(&self) -> bool {
        matches!(self, Prediction::AtLeast(_))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub pass: bool,
    pub tol: f64,
    /// Signed `estimate − predicted`.
    pub delta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexReport {
    pub target: Target,
    pub epsilon: Option<f64>,
    /// Cutoff realizing the infimum, for ±∞ targets.
    pub cutoff: Option<f64>,
    pub estimate: DensityEstimate,
    pub predicted: Option<Prediction>,
    pub verdict: Option<Verdict>,
}

impl IndexReport {
    /// The finite-scale index: the lower density estimate of the hit set.
    pub fn index(&self) -> f64 {
        self.estimate.lower_est
    }

    /// Attaches a prediction and judges the estimate against it.
    pub fn judge(mut self, predicted: Prediction, tol: f64) -> Self {
        let delta = self.index() - predicted.value();
        let pass = match predicted {
            Prediction::Exact(_) => delta.abs() <= tol,
            Prediction::AtLeast(_) => delta >= -tol,
        };
        self.predicted = Some(predicted);
        self.verdict = Some(Verdict { pass, tol, delta });
        self
    }

    pub fn passed(&self) -> Option<bool> {
        self.verdict.map(|v| v.pass)
    }
}

pub fn index_to_target(
    win: &SeqWindow,
    target: &Target,
    dilation: &Dilation,
    checkpoints: &[usize],
) -> Result<IndexReport> {
    validate_checkpoints(checkpoints)?;
    let needed = *checkpoints.last().unwrap_or(&0);
    if win.len() < needed {
        return Err(Error::WindowTooSmall {
            window: win.len(),
            needed,
        });
    }
    match (target, dilation) {
        (Target::Value(_) | Target::Set(_), Dilation::Epsilon(eps)) => {
            if !(*eps > 0.0) {
                return Err(Error::NonPositiveEpsilon(*eps));
            }
            let estimate = density_bounds(&win.hit_set(target, *eps), checkpoints)?;
            Ok(IndexReport {
                target: target.clone(),
                epsilon: Some(*eps),
                cutoff: None,
                estimate,
                predicted: None,
                verdict: None,
            })
        }
        (Target::PlusInfinity | Target::MinusInfinity, Dilation::Cutoffs(cutoffs)) => {
            if cutoffs.is_empty() {
                return Err(Error::DilationMismatch("cutoff grid is empty"));
            }
            let plus = matches!(target, Target::PlusInfinity);
            let mut best: Option<(f64, DensityEstimate)> = None;
            for &m in cutoffs {
                let set = if plus {
                    win.select(move |x| x > m)
                } else {
                    win.select(move |x| x < m)
                };
                let est = density_bounds(&set, checkpoints)?;
                if best.as_ref().map_or(true, |(_, b)| est.lower_est < b.lower_est) {
                    best = Some((m, est));
                }
            }
            let (cutoff, estimate) = best.expect("nonempty cutoff grid");
            Ok(IndexReport {
                target: target.clone(),
                epsilon: None,
                cutoff: Some(cutoff),
                estimate,
                predicted: None,
                verdict: None,
            })
        }
        (Target::PlusInfinity | Target::MinusInfinity, Dilation::Epsilon(_)) => {
            Err(Error::DilationMismatch("infinite targets need a cutoff grid"))
        }
        (_, Dilation::Cutoffs(_)) => Err(Error::DilationMismatch("finite targets need an epsilon")),
    }
}

/// Outcome of the disjoint-target sum rule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SumRule {
    pub indices: Vec<f64>,
    pub sum: f64,
    /// Sum of hit counts at the largest checkpoint never exceeds the window.
    pub counts_bounded: bool,
    pub holds: bool,
}

/// For targets whose ε-dilations are pairwise disjoint, the estimated indices
/// sum to at most `1 + tol`.
pub fn sum_rule_check(
    win: &SeqWindow,
    targets: &[Target],
    epsilon: f64,
    checkpoints: &[usize],
    tol: f64,
) -> Result<SumRule> {
    if !(epsilon > 0.0) {
        return Err(Error::NonPositiveEpsilon(epsilon));
    }
    for (i, a) in targets.iter().enumerate() {
        if a.is_infinite() {
            return Err(Error::DilationMismatch("sum rule takes finite targets"));
        }
        for b in &targets[i + 1..] {
            if a.gap(b) <= 2.0 * epsilon {
                return Err(Error::OverlappingTargets);
            }
        }
    }
    let reports = targets
        .iter()
        .map(|t| index_to_target(win, t, &Dilation::Epsilon(epsilon), checkpoints))
        .collect::<Result<Vec<_>>>()?;
    let indices: Vec<f64> = reports.iter().map(IndexReport::index).collect();
    let sum = indices.iter().sum();
    let counts_bounded = checkpoints.iter().enumerate().all(|(c, &n)| {
        reports.iter().map(|r| r.estimate.counts[c]).sum::<u64>() <= win.dim().volume(n)
    });
    Ok(SumRule {
        indices,
        sum,
        counts_bounded,
        holds: counts_bounded && sum <= 1.0 + tol,
    })
}

/// Pairs `(n, m) ∈ {1..len}²` with `u[n]·v[m] ∈ I + B_ε`, counted from the
/// factor arrays alone.
pub fn product_pair_count(u: &[f64], v: &[f64], interval: Interval, epsilon: f64, len: usize) -> u64 {
    let u = &u[..len];
    let v = &v[..len];
    u.par_iter()
        .map(|&a| v.iter().filter(|&&b| interval.distance(a * b) <= epsilon).count() as u64)
        .sum()
}
