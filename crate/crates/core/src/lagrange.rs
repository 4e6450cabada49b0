//! Lagrange interpolation at the Chebyshev nodes of the second kind
//! (extrema of `T_{n−1}`, endpoints included), in one and two variables.
//!
//! Besides the interpolants themselves this module carries the pieces used to
//! explain the value at a jump: the phase `σ_n`, the residue-class
//! subsequences along which `σ_n` is constant, and the three-term
//! decomposition of `L_n h(x₀)` that serves as an independent oracle for the
//! direct sum.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::AngleSpec;
use crate::step::{cheb_node, Abscissa, StepFn1D, StepFn2D};

/// The `n` Chebyshev nodes `x_{n,k} = cos θ_{n,k}`, `θ_{n,k} = (k−1)π/(n−1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChebGrid {
    n: usize,
    angles: Vec<f64>,
    nodes: Vec<f64>,
}

impl ChebGrid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::OutOfDomain {
                name: "n",
                value: n as f64,
                expected: ">= 2",
            });
        }
        Ok(Self::build(n))
    }

    /// Like `new` but also accepts the one-node grid `{1}`.
    pub(crate) fn build(n: usize) -> Self {
        let step = if n > 1 { PI / (n - 1) as f64 } else { 0.0 };
        Self {
            n,
            angles: (0..n).map(|k| k as f64 * step).collect(),
            nodes: (1..=n).map(|k| cheb_node(n, k)).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    fn collision_threshold(&self) -> f64 {
        1e-13 * self.n as f64
    }

    /// Index (0-based) of a node within the collision threshold of `x`.
    fn colliding_node(&self, x: f64) -> Option<usize> {
        let thr = self.collision_threshold();
        self.nodes.iter().position(|&xk| (x - xk).abs() <= thr)
    }

    /// `(−1)^k / ((n−1)(1 + δ_{k,1} + δ_{k,n}))`, 1-based `k`.
    fn prefactor(&self, k: usize) -> f64 {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let ends = if k == 1 || k == self.n { 2.0 } else { 1.0 };
        sign / ((self.n - 1) as f64 * ends)
    }

    /// All fundamental polynomials at `x`.
    pub fn weights(&self, x: f64) -> Vec<f64> {
        if let Some(hit) = self.colliding_node(x) {
            let mut w = vec![0.0; self.n];
            w[hit] = 1.0;
            return w;
        }
        let theta = x.clamp(-1.0, 1.0).acos();
        let sin_theta = ((1.0 - x) * (1.0 + x)).max(0.0).sqrt();
        let num = ((self.n - 1) as f64 * theta).sin() * sin_theta;
        (1..=self.n)
            .map(|k| self.prefactor(k) * num / (x - self.nodes[k - 1]))
            .collect()
    }

    /// All fundamental polynomials at `x₀ = cos(πν)`, with the phase and the
    /// node differences taken in exact arithmetic for rational `ν`.
    pub fn weights_at_angle(&self, spec: &AngleSpec) -> Vec<f64> {
        let n = self.n;
        if n < 2 {
            return vec![1.0];
        }
        let m = (n - 1) as u64;
        if spec.frac_of_multiple(m) == 0.0 && spec.is_rational() {
            let mut w = vec![0.0; n];
            w[spec.floor_of_multiple(m) as usize] = 1.0;
            return w;
        }
        let nu = spec.value();
        let theta0 = PI * nu;
        // sin((n−1)θ₀) with (n−1)ν reduced mod 2
        let turns = match *spec {
            AngleSpec::Rational { p, q } => ((m as u128 * p as u128) % (2 * q as u128)) as f64 / q as f64,
            AngleSpec::Irrational(_) => {
                let t = m as f64 * nu;
                t - 2.0 * (t / 2.0).floor()
            }
        };
        let num = (PI * turns).sin() * theta0.sin();
        let scaled = m as f64 * nu;
        (1..=n)
            .map(|k| {
                // θ_k − θ₀ = π·((k−1) − (n−1)ν)/(n−1)
                let diff = match *spec {
                    AngleSpec::Rational { p, q } => {
                        let top = (k as i128 - 1) * q as i128 - m as i128 * p as i128;
                        PI * top as f64 / (m as f64 * q as f64)
                    }
                    AngleSpec::Irrational(_) => PI * ((k - 1) as f64 - scaled) / m as f64,
                };
                let theta_k = self.angles[k - 1];
                // cos θ₀ − cos θ_k = 2 sin((θ₀+θ_k)/2) sin((θ_k−θ₀)/2)
                let denom = 2.0 * (0.5 * (theta0 + theta_k)).sin() * (0.5 * diff).sin();
                self.prefactor(k) * num / denom
            })
            .collect()
    }
}

pub fn cheb_grid(n: usize) -> Result<ChebGrid> {
    ChebGrid::new(n)
}

/// `ℓ_{n,k}(x)` by the closed trigonometric form, with the Kronecker value
/// at (numerically) colliding nodes.
pub fn fundamental_weight(grid: &ChebGrid, k: usize, x: f64) -> Result<f64> {
    if k == 0 || k > grid.n {
        return Err(Error::NodeIndexOutOfRange { k, n: grid.n });
    }
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::OutOfDomain {
            name: "x",
            value: x,
            expected: "[-1, 1]",
        });
    }
    if let Some(hit) = grid.colliding_node(x) {
        return Ok(if hit + 1 == k { 1.0 } else { 0.0 });
    }
    let theta = x.acos();
    let sin_theta = ((1.0 - x) * (1.0 + x)).sqrt();
    let num = ((grid.n - 1) as f64 * theta).sin() * sin_theta;
    Ok(grid.prefactor(k) * num / (x - grid.nodes[k - 1]))
}

/// Where to evaluate an interpolant along one axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalAt {
    /// At the jump abscissa of the function being interpolated.
    Jump,
    Value(f64),
}

/// `L_n f(x) = Σ_k ℓ_{n,k}(x) f(x_{n,k})` from node samples.
pub fn lagrange_eval_1d(grid: &ChebGrid, values: &[f64], x: f64) -> f64 {
    if grid.n == 1 {
        return values[0];
    }
    grid.weights(x).iter().zip(values).map(|(w, v)| w * v).sum()
}

/// `L_n f(cos πν)` from node samples, exact node hits for rational `ν`.
pub fn lagrange_eval_at_angle(grid: &ChebGrid, values: &[f64], spec: &AngleSpec) -> f64 {
    grid.weights_at_angle(spec).iter().zip(values).map(|(w, v)| w * v).sum()
}

/// `L_n h(at)` for a step function. `n = 1` is the one-node interpolant at
/// `x = 1`.
pub fn lagrange_step(h: &StepFn1D, n: usize, at: EvalAt) -> f64 {
    let grid = ChebGrid::build(n.max(1));
    let values = h.cheb_values(grid.n);
    match (at, h.at) {
        (EvalAt::Jump, Abscissa::ChebAngle(spec)) => lagrange_eval_at_angle(&grid, &values, &spec),
        (EvalAt::Jump, other) => lagrange_eval_1d(&grid, &values, other.x()),
        (EvalAt::Value(x), _) => lagrange_eval_1d(&grid, &values, x),
    }
}

/// `σ_n = frac((n−1)·θ₀/π)`, exact for rational specs.
pub fn sigma_n(spec: &AngleSpec, n: usize) -> f64 {
    spec.frac_of_multiple(n.saturating_sub(1) as u64)
}

/// The indices `k_m(j) = l + jq + 1`, `j ≥ 1`, along which `σ_k = m/q`, where
/// `l ∈ {0..q−1}` solves `l·p ≡ m (mod q)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsequenceKm {
    pub l: u64,
    pub q: u64,
    next: u64,
}

impl Iterator for SubsequenceKm {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        let k = self.l + self.next * self.q + 1;
        self.next += 1;
        Some(k)
    }
}

impl SubsequenceKm {
    pub fn contains(&self, k: u64) -> bool {
        k > self.q + self.l && (k - 1) % self.q == self.l
    }
}

pub fn subsequence_k_m(p: u64, q: u64, m: u64) -> Result<SubsequenceKm> {
    if q == 0 || m >= q || crate::point::gcd(p, q) != 1 {
        return Err(Error::InvalidPoint(format!(
            "need gcd(p, q) = 1 and 0 <= m < q, got p={p} q={q} m={m}"
        )));
    }
    let l = (0..q)
        .find(|&l| (l as u128 * p as u128) % q as u128 == m as u128)
        .expect("p is invertible mod q");
    Ok(SubsequenceKm { l, q, next: 1 })
}

/// `L_n h(x₀)` for `h` = 0 / `d` / 1 across `x₀ = cos θ₀`, assembled from the
/// boundary term, the alternating partial sum in `σ_n` and the bounded
/// correction sum; equals `d` when `σ_n = 0`.
pub fn fn_sigma_decomposition(spec: &AngleSpec, d: f64, n: usize) -> f64 {
    if n < 2 {
        return 1.0;
    }
    let sigma = sigma_n(spec, n);
    if sigma == 0.0 {
        return d;
    }
    let m1 = (n - 1) as f64;
    let k0 = spec.floor_of_multiple((n - 1) as u64) as usize + 1;
    let theta0 = PI * spec.value();
    let (sin0, cos0) = theta0.sin_cos();
    let sin_pi_sigma = (PI * sigma).sin();
    let sign = if (k0 - 1) % 2 == 0 { 1.0 } else { -1.0 };
    let boundary = sign * sin_pi_sigma * sin0 / (2.0 * m1 * (cos0 - 1.0));

    let mut alternating = 0.0;
    let mut correction = 0.0;
    for j in (0..k0).rev() {
        let sgn = if j % 2 == 0 { 1.0 } else { -1.0 };
        let shift = sigma + j as f64;
        alternating += sgn / shift;
        // g_θ₀ at θ = θ₀ − δ, δ = π(σ+j)/(n−1)
        let delta = PI * shift / m1;
        let theta = theta0 - delta;
        let cos_gap = 2.0 * (0.5 * (theta0 + theta)).sin() * (0.5 * delta).sin();
        correction += sgn * (sin0 / cos_gap - 1.0 / delta);
    }
    boundary + sin_pi_sigma / PI * alternating + sin_pi_sigma / m1 * correction
}

/// `L_{n,m} h(x, y) = L_n h₁(x)·L_m h₂(y)`. With `cross_check`, the direct
/// double sum over the tensor grid is evaluated as well and must agree to
/// `1e−9`.
pub fn lagrange_eval_2d(
    h: &StepFn2D,
    n: usize,
    m: usize,
    at_x: EvalAt,
    at_y: EvalAt,
    cross_check: bool,
) -> Result<f64> {
    for (name, v) in [("n", n), ("m", m)] {
        if v < 2 {
            return Err(Error::OutOfDomain {
                name,
                value: v as f64,
                expected: ">= 2",
            });
        }
    }
    let (h1, h2) = h.factors();
    let value = lagrange_step(&h1, n, at_x) * lagrange_step(&h2, m, at_y);
    if cross_check {
        let direct = lagrange_eval_2d_direct(h, n, m, at_x, at_y);
        let diff = (direct - value).abs();
        if diff > 1e-9 {
            return Err(Error::CrossCheckMismatch(diff));
        }
    }
    Ok(value)
}

fn axis_weights(grid: &ChebGrid, at: EvalAt, jump: Abscissa) -> Vec<f64> {
    match (at, jump) {
        (EvalAt::Jump, Abscissa::ChebAngle(spec)) => grid.weights_at_angle(&spec),
        (EvalAt::Jump, other) => grid.weights(other.x()),
        (EvalAt::Value(x), _) => grid.weights(x),
    }
}

/// `Σ_i Σ_j ω_{n,i}(x) ω_{m,j}(y) h(x_{n,i}, y_{m,j})`, `O(nm)`.
pub fn lagrange_eval_2d_direct(h: &StepFn2D, n: usize, m: usize, at_x: EvalAt, at_y: EvalAt) -> f64 {
    let gx = ChebGrid::build(n);
    let gy = ChebGrid::build(m);
    let wx = axis_weights(&gx, at_x, h.x0);
    let wy = axis_weights(&gy, at_y, h.y0);
    let mut total = 0.0;
    for (i, a) in wx.iter().enumerate() {
        for (j, b) in wy.iter().enumerate() {
            total += a * b * h.cheb_node_value(n, i + 1, m, j + 1);
        }
    }
    total
}

/// A jump of height `c` at `x`, with value `d` of the underlying step there.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jump {
    pub x: f64,
    pub d: f64,
    pub c: f64,
}

/// `L_n(F + Σ c_k h_{x_k,d_k})(x)` by linearity.
pub fn lagrange_eval_c_plus_h(f: &dyn Fn(f64) -> f64, jumps: &[Jump], n: usize, x: f64) -> Result<f64> {
    for (i, j) in jumps.iter().enumerate() {
        if !(j.x > -1.0 && j.x < 1.0) {
            return Err(Error::OutOfDomain {
                name: "jump abscissa",
                value: j.x,
                expected: "(-1, 1)",
            });
        }
        if jumps[..i].iter().any(|o| o.x == j.x) {
            return Err(Error::DuplicateJump(j.x));
        }
    }
    let grid = ChebGrid::new(n)?;
    let w = grid.weights(x);
    let mut total: f64 = w.iter().zip(grid.nodes()).map(|(wk, &xk)| wk * f(xk)).sum();
    for j in jumps {
        let h = StepFn1D::new(Abscissa::Value(j.x), crate::step::Orientation::Left0Right1 { d: j.d });
        let values = h.cheb_values(n);
        total += j.c * w.iter().zip(&values).map(|(a, b)| a * b).sum::<f64>();
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point::{NamedIrrational, PointSpec};
    use crate::step::{Convention, Orientation};
    use crate::zeta::g_profile;
    use approx::assert_abs_diff_eq;

    /// `Π_{i≠k} (x − x_i)/(x_k − x_i)`
    fn product_formula(nodes: &[f64], k: usize, x: f64) -> f64 {
        nodes
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != k)
            .map(|(_, &xi)| (x - xi) / (nodes[k] - xi))
            .product()
    }

    #[test]
    fn small_grids() {
        assert_eq!(cheb_grid(2).unwrap().nodes(), &[1.0, -1.0]);
        assert_eq!(cheb_grid(3).unwrap().nodes(), &[1.0, 0.0, -1.0]);
        assert_abs_diff_eq!(cheb_grid(5).unwrap().nodes()[1], 0.5f64.sqrt(), epsilon = 1e-15);
        assert!(cheb_grid(1).is_err());
        let g = cheb_grid(40).unwrap();
        assert!(g.nodes().windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn weight_matches_product_formula() {
        let g = cheb_grid(3).unwrap();
        assert_abs_diff_eq!(fundamental_weight(&g, 2, 0.5).unwrap(), 0.75, epsilon = 1e-14);
        for n in [2, 5, 12] {
            let g = cheb_grid(n).unwrap();
            for x in [-0.93, -0.4, 0.11, 0.77] {
                for k in 1..=n {
                    assert_abs_diff_eq!(
                        fundamental_weight(&g, k, x).unwrap(),
                        product_formula(g.nodes(), k - 1, x),
                        epsilon = 1e-12
                    );
                }
            }
        }
    }

    #[test]
    fn kronecker_at_nodes() {
        let g = cheb_grid(9).unwrap();
        for (j, &xj) in g.nodes().iter().enumerate() {
            for k in 1..=9 {
                let w = fundamental_weight(&g, k, xj).unwrap();
                assert_eq!(w, if k == j + 1 { 1.0 } else { 0.0 });
            }
        }
        assert!(fundamental_weight(&g, 0, 0.0).is_err());
        assert!(fundamental_weight(&g, 10, 0.0).is_err());
    }

    #[test]
    fn constants_and_polynomials_reproduced() {
        let g = cheb_grid(17).unwrap();
        let ones = vec![2.5; 17];
        for x in [-1.0, -0.3, 0.123, 0.99] {
            assert_abs_diff_eq!(lagrange_eval_1d(&g, &ones, x), 2.5, epsilon = 1e-10);
        }
        let r = lagrange_eval_c_plus_h(&|x| x * x, &[], 3, 0.3).unwrap();
        assert_abs_diff_eq!(r, 0.09, epsilon = 1e-10);
    }

    #[test]
    fn sigma_examples() {
        let third = PointSpec::Rational { p: 1, q: 3 };
        assert_eq!(sigma_n(&third, 4), 0.0);
        assert_eq!(sigma_n(&third, 5), 1.0 / 3.0);
        let c = PointSpec::Irrational(NamedIrrational::InvSqrt2);
        assert_abs_diff_eq!(sigma_n(&c, 2), 0.7071067812, epsilon = 1e-10);
    }

    #[test]
    fn subsequence_examples() {
        let s = subsequence_k_m(1, 3, 2).unwrap();
        assert_eq!(s.l, 2);
        assert_eq!(s.clone().take(3).collect::<Vec<_>>(), vec![6, 9, 12]);
        let third = PointSpec::Rational { p: 1, q: 3 };
        for k in s.take(20) {
            assert_eq!(sigma_n(&third, k as usize), 2.0 / 3.0);
        }
        let s = subsequence_k_m(1, 3, 0).unwrap();
        assert_eq!(s.l, 0);
        for k in s.take(10) {
            assert_eq!(fn_sigma_decomposition(&third, 0.4, k as usize), 0.4);
        }
        let s = subsequence_k_m(2, 5, 1).unwrap();
        assert_eq!(s.l, 3);
        assert_eq!(s.clone().next(), Some(9));
        assert!(s.contains(14) && !s.contains(4) && !s.contains(13));
        assert!(subsequence_k_m(2, 4, 1).is_err());
    }

    #[test]
    fn decomposition_matches_direct_sum() {
        let third = PointSpec::Rational { p: 1, q: 3 };
        let h = StepFn1D::new(Abscissa::ChebAngle(third), Orientation::Left0Right1 { d: 1.0 });
        assert_abs_diff_eq!(
            lagrange_step(&h, 7, EvalAt::Jump),
            fn_sigma_decomposition(&third, 1.0, 7),
            epsilon = 1e-10
        );
        assert_abs_diff_eq!(
            lagrange_step(&h, 500, EvalAt::Jump),
            fn_sigma_decomposition(&third, 1.0, 500),
            epsilon = 1e-9
        );
        // float evaluation at x₀ = 0.5 agrees with the exact-angle path
        assert_abs_diff_eq!(
            lagrange_step(&h, 7, EvalAt::Value(0.5)),
            lagrange_step(&h, 7, EvalAt::Jump),
            epsilon = 1e-10
        );
    }

    #[test]
    fn subsequence_limit_is_g() {
        let third = PointSpec::Rational { p: 1, q: 3 };
        let k = subsequence_k_m(1, 3, 1).unwrap().take_while(|&k| k <= 2000).last().unwrap();
        let v = fn_sigma_decomposition(&third, 1.0, k as usize);
        assert!((v - g_profile(1.0 / 3.0).unwrap()).abs() < 5e-3);
    }

    #[test]
    fn node_values_interpolated() {
        let h = StepFn1D::new(
            Abscissa::ChebAngle(PointSpec::Rational { p: 2, q: 5 }),
            Orientation::Left0Right1 { d: 0.7 },
        );
        let g = cheb_grid(11).unwrap();
        let values = h.cheb_values(11);
        for (k, &xk) in g.nodes().iter().enumerate() {
            assert_eq!(lagrange_eval_1d(&g, &values, xk), values[k]);
        }
    }

    #[test]
    fn bivariate_cases() {
        let h = StepFn2D::new(
            Abscissa::ChebAngle(PointSpec::Rational { p: 1, q: 3 }),
            Abscissa::ChebAngle(PointSpec::Rational { p: 1, q: 2 }),
            Convention::UpperRight,
        );
        // n = 4, m = 3: both jumps are nodes, so the value is h(x₀, y₀) = 1
        let v = lagrange_eval_2d(&h, 4, 3, EvalAt::Jump, EvalAt::Jump, true).unwrap();
        assert_eq!(v, 1.0);
        for (n, m) in [(5, 6), (11, 8), (30, 41)] {
            lagrange_eval_2d(&h, n, m, EvalAt::Jump, EvalAt::Jump, true).unwrap();
            lagrange_eval_2d(&h, n, m, EvalAt::Value(0.2), EvalAt::Value(-0.7), true).unwrap();
        }
        let g = cheb_grid(6).unwrap();
        let v = lagrange_eval_2d(&h, 6, 6, EvalAt::Value(g.nodes()[1]), EvalAt::Value(g.nodes()[4]), true).unwrap();
        assert_eq!(v, h.cheb_node_value(6, 2, 6, 5));
    }

    #[test]
    fn c_plus_h_reduces_to_single_step() {
        let x0 = (PI / 3.0).cos();
        let jumps = [Jump { x: x0, d: 0.3, c: 1.0 }];
        let h = StepFn1D::new(Abscissa::Value(x0), Orientation::Left0Right1 { d: 0.3 });
        for x in [-0.5, 0.2, 0.8] {
            assert_abs_diff_eq!(
                lagrange_eval_c_plus_h(&|_| 0.0, &jumps, 40, x).unwrap(),
                lagrange_step(&h, 40, EvalAt::Value(x)),
                epsilon = 1e-12
            );
        }
        let dup = [jumps[0], jumps[0]];
        assert_eq!(lagrange_eval_c_plus_h(&|_| 0.0, &dup, 40, 0.0), Err(Error::DuplicateJump(x0)));
    }
}
