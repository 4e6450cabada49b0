//! Limit profiles of the operators at a jump: the Lerch-based profile `g`,
//! the Hurwitz-based profile `g_s`, their products, affine rescalings, and
//! Peano–Jordan measures of their preimages.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::density::Interval;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesTolerance {
    pub abs_tol: f64,
    pub max_terms: usize,
}

impl SeriesTolerance {
    pub fn new(abs_tol: f64, max_terms: usize) -> Result<Self> {
        if !(abs_tol >= 1e-14) {
            return Err(Error::OutOfDomain {
                name: "abs_tol",
                value: abs_tol,
                expected: "[1e-14, inf)",
            });
        }
        if max_terms < 64 {
            return Err(Error::OutOfDomain {
                name: "max_terms",
                value: max_terms as f64,
                expected: ">= 64",
            });
        }
        Ok(Self { abs_tol, max_terms })
    }
}

impl Default for SeriesTolerance {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            max_terms: 1 << 20,
        }
    }
}

/// Default bisection tolerance for preimage endpoints.
pub const BISECTION_TOL: f64 = 1e-10;

/// `J(1, a) = Σ_{n≥0} (−1)ⁿ/(n+a)` for `a ∈ (0, 1]`.
///
/// Consecutive terms are folded into `Σ_k 1/((2k+a)(2k+1+a))`. After `K`
/// explicit pairs the tail is the closed-form integral `½·ln(1 + 1/(2K+a))`
/// plus Euler–Maclaurin corrections; `K` grows until the first omitted
/// correction is below half the tolerance.
pub fn lerch_j1(a: f64, tol: SeriesTolerance) -> Result<f64> {
    if !(a > 0.0 && a <= 1.0) {
        return Err(Error::OutOfDomain {
            name: "a",
            value: a,
            expected: "(0, 1]",
        });
    }
    // f(k) = 1/u − 1/(u+1) with u = 2k + a; its j-th derivative in k is
    // 2^j · (d/du)^j of the same expression.
    let remainder = |k: usize| {
        let u = 2.0 * k as f64 + a;
        // |f^(5)(k)| / 30240, with (d/du)^5 (1/u) = −120/u⁶
        32.0 * 120.0 * (u.powi(-6) - (u + 1.0).powi(-6)) / 30240.0
    };
    let mut k = 16usize;
    while remainder(k) > 0.5 * tol.abs_tol {
        k *= 2;
        if k > tol.max_terms {
            return Err(Error::SeriesNotConverged {
                max_terms: tol.max_terms,
            });
        }
    }
    let head: f64 = (0..k)
        .rev()
        .map(|j| {
            let u = 2.0 * j as f64 + a;
            1.0 / (u * (u + 1.0))
        })
        .sum();
    let u = 2.0 * k as f64 + a;
    let integral = 0.5 * (1.0 / u).ln_1p();
    let f0 = 1.0 / u - 1.0 / (u + 1.0);
    let f1 = 2.0 * (-u.powi(-2) + (u + 1.0).powi(-2));
    let f3 = 8.0 * (-6.0 * u.powi(-4) + 6.0 * (u + 1.0).powi(-4));
    Ok(head + integral + 0.5 * f0 - f1 / 12.0 + f3 / 720.0)
}

/// The Lagrange jump profile `g(x) = sin(πx)/π · J(1, x)` on `(0, 1)`,
/// extended by `g(0) = 1`.
pub fn g_profile(x: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&x) {
        return Err(Error::OutOfDomain {
            name: "x",
            value: x,
            expected: "[0, 1)",
        });
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    Ok((PI * x).sin() / PI * lerch_j1(x, SeriesTolerance::default())?)
}

/// Hurwitz zeta `ζ(s, a) = Σ_{n≥0} (n+a)^{−s}` for real `s > 1`, `a > 0`.
///
/// `M` explicit terms plus the Euler–Maclaurin tail
/// `(M+a)^{1−s}/(s−1) + (M+a)^{−s}/2 + s(M+a)^{−s−1}/12`, with `M` chosen so
/// that the next correction `s(s+1)(s+2)(M+a)^{−s−3}/720` is below tolerance.
pub fn hurwitz_zeta(s: f64, a: f64, tol: SeriesTolerance) -> Result<f64> {
    if !(s > 1.0) || !s.is_finite() {
        return Err(Error::OutOfDomain {
            name: "s",
            value: s,
            expected: "(1, inf)",
        });
    }
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::OutOfDomain {
            name: "a",
            value: a,
            expected: "(0, inf)",
        });
    }
    let next_term = |m: usize| s * (s + 1.0) * (s + 2.0) / 720.0 * (m as f64 + a).powf(-s - 3.0);
    let mut m = 8usize;
    while next_term(m) > 0.5 * tol.abs_tol {
        m *= 2;
        if m > tol.max_terms {
            return Err(Error::SeriesNotConverged {
                max_terms: tol.max_terms,
            });
        }
    }
    let head: f64 = (0..m).rev().map(|n| (n as f64 + a).powf(-s)).sum();
    let b = m as f64 + a;
    let tail = b.powf(1.0 - s) / (s - 1.0) + 0.5 * b.powf(-s) + s * b.powf(-s - 1.0) / 12.0;
    Ok(head + tail)
}

/// The Shepard jump profile `g_s(t) = ζ(s,t)/(ζ(s,t) + ζ(s,1−t))` on `(0, 1)`,
/// extended by `g_s(0) = 1`.
pub fn g_s_profile(s: f64, t: f64) -> Result<f64> {
    if !(s > 1.0) {
        return Err(Error::OutOfDomain {
            name: "s",
            value: s,
            expected: "(1, inf)",
        });
    }
    if !(0.0..1.0).contains(&t) {
        return Err(Error::OutOfDomain {
            name: "t",
            value: t,
            expected: "[0, 1)",
        });
    }
    if t == 0.0 {
        return Ok(1.0);
    }
    let tol = SeriesTolerance::default();
    let left = hurwitz_zeta(s, t, tol)?;
    let right = hurwitz_zeta(s, 1.0 - t, tol)?;
    Ok(left / (left + right))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    G,
    Gs(f64),
    /// `left + (right − left)·g(x)`
    Affine { left: f64, right: f64 },
    Identity,
}

/// A continuous strictly monotone profile on `[0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Profile1D {
    kind: ProfileKind,
    decreasing: bool,
}

const MONOTONE_GRID: usize = 1024;

impl Profile1D {
    /// Builds the profile and verifies strict monotonicity on a 1024-point grid.
    pub fn new(kind: ProfileKind) -> Result<Self> {
        match kind {
            ProfileKind::Gs(s) if !(s > 1.0) => {
                return Err(Error::OutOfDomain {
                    name: "s",
                    value: s,
                    expected: "(1, inf)",
                })
            }
            ProfileKind::Affine { left, right } if left == right => return Err(Error::DegenerateJump(left)),
            _ => {}
        }
        let mut p = Self { kind, decreasing: true };
        let values: Vec<f64> = (0..MONOTONE_GRID)
            .map(|i| p.eval((i as f64 + 0.5) / MONOTONE_GRID as f64))
            .collect();
        let decreasing = values.windows(2).all(|w| w[1] < w[0]);
        let increasing = values.windows(2).all(|w| w[1] > w[0]);
        if !(decreasing || increasing) {
            return Err(Error::NonMonotoneProfile);
        }
        p.decreasing = decreasing;
        Ok(p)
    }

    pub fn g() -> Self {
        Self {
            kind: ProfileKind::G,
            decreasing: true,
        }
    }

    pub fn g_s(s: f64) -> Result<Self> {
        Self::new(ProfileKind::Gs(s))
    }

    pub fn identity() -> Self {
        Self {
            kind: ProfileKind::Identity,
            decreasing: false,
        }
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    pub fn is_decreasing(&self) -> bool {
        self.decreasing
    }

    /// Value on `[0, 1)`; at `x = 1` returns the left limit.
    pub fn eval(&self, x: f64) -> f64 {
        if x >= 1.0 {
            return self.limit_at_one();
        }
        let x = x.max(0.0);
        match self.kind {
            ProfileKind::G => g_profile(x).expect("x in [0, 1)"),
            ProfileKind::Gs(s) => g_s_profile(s, x).expect("x in [0, 1)"),
            ProfileKind::Affine { left, right } => left + (right - left) * g_profile(x).expect("x in [0, 1)"),
            ProfileKind::Identity => x,
        }
    }

    /// `lim_{x→1⁻}` of the profile.
    pub fn limit_at_one(&self) -> f64 {
        match self.kind {
            ProfileKind::G | ProfileKind::Gs(_) => 0.0,
            ProfileKind::Affine { left, .. } => left,
            ProfileKind::Identity => 1.0,
        }
    }

    /// Closed hull of the range, `[min, max]`.
    pub fn range(&self) -> Interval {
        let (a, b) = (self.eval(0.0), self.limit_at_one());
        Interval {
            lo: a.min(b),
            hi: a.max(b),
        }
    }

    /// The abscissa in `[0, 1]` where the profile crosses `level`, clamped at
    /// the ends of the range.
    fn crossing(&self, level: f64, tol: f64) -> f64 {
        let sign = if self.decreasing { -1.0 } else { 1.0 };
        // h is increasing in x
        let h = |x: f64| sign * (self.eval(x) - level);
        if h(0.0) >= 0.0 {
            return 0.0;
        }
        if h(1.0) <= 0.0 {
            return 1.0;
        }
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if h(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// `affine(left, right)(x) = left + (right − left)·g(x)`: equals `right` at 0
/// and tends to `left` as `x → 1⁻`.
pub fn affine_jump_profile(left: f64, right: f64) -> Result<Profile1D> {
    Profile1D::new(ProfileKind::Affine { left, right })
}

/// Sorts and merges overlapping intervals.
fn merge_intervals(a: &[Interval]) -> Vec<Interval> {
    let mut v: Vec<Interval> = a.to_vec();
    v.sort_by(|x, y| x.lo.total_cmp(&y.lo));
    let mut out: Vec<Interval> = Vec::with_capacity(v.len());
    for iv in v {
        match out.last_mut() {
            Some(last) if iv.lo <= last.hi => last.hi = last.hi.max(iv.hi),
            _ => out.push(iv),
        }
    }
    out
}

/// Length of `p⁻¹(A) ⊂ [0, 1)` for a finite union of closed intervals `A`.
pub fn preimage_measure_1d(p: &Profile1D, a: &[Interval], tol: f64) -> Result<f64> {
    for iv in a {
        Interval::new(iv.lo, iv.hi)?;
    }
    Ok(merge_intervals(a)
        .iter()
        .map(|iv| (p.crossing(iv.lo, tol) - p.crossing(iv.hi, tol)).abs())
        .sum())
}

/// Product profile `(x, y) ↦ fx(x)·fy(y)` on `[0, 1)²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Profile2D {
    pub fx: Profile1D,
    pub fy: Profile1D,
}

impl Profile2D {
    pub fn new(fx: Profile1D, fy: Profile1D) -> Self {
        Self { fx, fy }
    }

    pub fn value(&self, x: f64, y: f64) -> f64 {
        self.fx.eval(x) * self.fy.eval(y)
    }
}

/// A 2D preimage measure with the slicing grid it was computed on.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Measure2D {
    pub value: f64,
    pub grid: usize,
    /// `|value(grid) − value(grid/2)|`.
    pub refinement: f64,
}

pub const DEFAULT_SLICES: usize = 4096;

fn sliced_measure(p: &Profile2D, a: &[Interval], tol: f64, slices: usize) -> f64 {
    const BLOCK: usize = 256;
    let h = 1.0 / slices as f64;
    let blocks: Vec<f64> = (0..slices.div_ceil(BLOCK))
        .into_par_iter()
        .map(|b| {
            (b * BLOCK..((b + 1) * BLOCK).min(slices))
                .map(|i| {
                    let c = p.fx.eval((i as f64 + 0.5) * h);
                    if c == 0.0 {
                        return if a.iter().any(|iv| iv.contains(0.0)) { 1.0 } else { 0.0 };
                    }
                    let scaled: Vec<Interval> = a
                        .iter()
                        .map(|iv| {
                            let (l, r) = (iv.lo / c, iv.hi / c);
                            Interval {
                                lo: l.min(r),
                                hi: l.max(r),
                            }
                        })
                        .collect();
                    preimage_measure_1d(&p.fy, &scaled, tol).expect("valid intervals")
                })
                .sum::<f64>()
        })
        .collect();
    blocks.iter().sum::<f64>() * h
}

/// Area of `{(x, y) ∈ [0,1)² : fx(x)·fy(y) ∈ A}` by slicing in `x`: each
/// `y`-section is a 1D preimage, integrated with the midpoint rule.
pub fn preimage_measure_2d(p: &Profile2D, a: &[Interval], tol: f64) -> Result<Measure2D> {
    preimage_measure_2d_with(p, a, tol, DEFAULT_SLICES)
}

pub fn preimage_measure_2d_with(p: &Profile2D, a: &[Interval], tol: f64, slices: usize) -> Result<Measure2D> {
    for iv in a {
        Interval::new(iv.lo, iv.hi)?;
    }
    let slices = slices.max(2);
    let a = merge_intervals(a);
    let value = sliced_measure(p, &a, tol, slices);
    let coarse = sliced_measure(p, &a, tol, slices / 2);
    Ok(Measure2D {
        value,
        grid: slices,
        refinement: (value - coarse).abs(),
    })
}
