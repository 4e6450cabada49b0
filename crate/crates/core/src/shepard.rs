//! Shepard operators on the equispaced nodes `i/n` of `[0, 1]` and their
//! tensor product on the unit square.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::PointSpec;
use crate::step::{Abscissa, StepFn1D, StepFn2D};

const HIT_TOL: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShepardParams {
    pub s: f64,
    pub n: usize,
}

impl ShepardParams {
    pub fn new(s: f64, n: usize) -> Result<Self> {
        if !(s >= 1.0) || !s.is_finite() {
            return Err(Error::OutOfDomain {
                name: "s",
                value: s,
                expected: ">= 1",
            });
        }
        if n == 0 {
            return Err(Error::OutOfDomain {
                name: "n",
                value: 0.0,
                expected: ">= 1",
            });
        }
        Ok(Self { s, n })
    }
}

fn check_unit(x: &Abscissa) -> Result<f64> {
    let v = x.x();
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::OutOfDomain {
            name: "x",
            value: v,
            expected: "[0, 1]",
        });
    }
    Ok(v)
}

/// Node index hit by `x`, exact for rational unit abscissas.
fn node_hit(n: usize, x: &Abscissa, v: f64) -> Option<usize> {
    match x {
        Abscissa::Unit(PointSpec::Rational { p, q }) => {
            let pn = *p as u128 * n as u128;
            (pn % *q as u128 == 0).then(|| (pn / *q as u128) as usize)
        }
        _ => {
            let i = (v * n as f64).round();
            ((v - i / n as f64).abs() <= HIT_TOL).then_some(i as usize)
        }
    }
}

/// `n·|x − i/n|`, with exact integer numerators for rational abscissas.
fn scaled_distance(n: usize, x: &Abscissa, v: f64, i: usize) -> f64 {
    match x {
        Abscissa::Unit(PointSpec::Rational { p, q }) => {
            let a = *p as i128 * n as i128;
            let b = i as i128 * *q as i128;
            (a - b).unsigned_abs() as f64 / *q as f64
        }
        _ => (v * n as f64 - i as f64).abs(),
    }
}

/// `|x − x_i|^{−s} / Σ_k |x − x_k|^{−s}` for `i = 0..=n`; the unit vector at
/// a node hit.
pub fn shepard_weights_1d(params: &ShepardParams, x: &Abscissa) -> Result<Vec<f64>> {
    let v = check_unit(x)?;
    let n = params.n;
    let mut w = vec![0.0; n + 1];
    if let Some(i) = node_hit(n, x, v) {
        w[i] = 1.0;
        return Ok(w);
    }
    let s = params.s;
    for (i, wi) in w.iter_mut().enumerate() {
        let d = scaled_distance(n, x, v, i);
        *wi = if s == 1.0 { d.recip() } else { d.powf(-s) };
    }
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|wi| *wi /= total);
    Ok(w)
}

/// `Σ_i w_i(x) f(i/n)` from the `n + 1` node samples.
pub fn shepard_eval_samples(params: &ShepardParams, values: &[f64], x: &Abscissa) -> Result<f64> {
    if values.len() != params.n + 1 {
        return Err(Error::Invalid(format!(
            "expected {} samples, got {}",
            params.n + 1,
            values.len()
        )));
    }
    let w = shepard_weights_1d(params, x)?;
    Ok(w.iter().zip(values).map(|(a, b)| a * b).sum())
}

/// `S_n h(x)`.
pub fn shepard_eval_1d(h: &StepFn1D, params: &ShepardParams, x: &Abscissa) -> Result<f64> {
    shepard_eval_samples(params, &h.unit_values(params.n), x)
}

/// `S_{n,m} h(x, y) = S_n h₁(x)·S_m h₂(y)`; with `cross_check` the direct
/// double sum over the tensor grid must agree to `1e−10`.
pub fn shepard_eval_2d(
    h: &StepFn2D,
    px: &ShepardParams,
    py: &ShepardParams,
    x: &Abscissa,
    y: &Abscissa,
    cross_check: bool,
) -> Result<f64> {
    let (h1, h2) = h.factors();
    let value = shepard_eval_1d(&h1, px, x)? * shepard_eval_1d(&h2, py, y)?;
    if cross_check {
        let wx = shepard_weights_1d(px, x)?;
        let wy = shepard_weights_1d(py, y)?;
        let mut direct = 0.0;
        for (i, a) in wx.iter().enumerate() {
            for (j, b) in wy.iter().enumerate() {
                direct += a * b * h.unit_node_value(px.n, i, py.n, j);
            }
        }
        let diff = (direct - value).abs();
        if diff > 1e-10 {
            return Err(Error::CrossCheckMismatch(diff));
        }
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::step::{Convention, Orientation};
    use approx::assert_abs_diff_eq;

    fn unit(p: u64, q: u64) -> Abscissa {
        Abscissa::Unit(PointSpec::rational(p, q).unwrap())
    }

    #[test]
    fn weight_examples() {
        let w = shepard_weights_1d(&ShepardParams::new(1.0, 2).unwrap(), &unit(1, 4)).unwrap();
        for (a, b) in w.iter().zip([3.0 / 7.0, 3.0 / 7.0, 1.0 / 7.0]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-15);
        }
        let w = shepard_weights_1d(&ShepardParams::new(2.0, 1).unwrap(), &unit(1, 2)).unwrap();
        assert_eq!(w, vec![0.5, 0.5]);
        let w = shepard_weights_1d(&ShepardParams::new(2.0, 6).unwrap(), &unit(1, 3)).unwrap();
        assert_eq!(w, vec![0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
        let w = shepard_weights_1d(&ShepardParams::new(2.0, 4).unwrap(), &Abscissa::Value(0.75)).unwrap();
        assert_eq!(w[3], 1.0);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(ShepardParams::new(0.5, 10).is_err());
        assert!(ShepardParams::new(f64::NAN, 10).is_err());
        assert!(ShepardParams::new(2.0, 0).is_err());
        let p = ShepardParams::new(2.0, 3).unwrap();
        assert!(shepard_weights_1d(&p, &Abscissa::Value(1.5)).is_err());
        assert!(shepard_eval_samples(&p, &[1.0], &Abscissa::Value(0.5)).is_err());
    }

    #[test]
    fn constants_reproduced() {
        let p = ShepardParams::new(2.5, 37).unwrap();
        let c = vec![0.3; 38];
        for x in [0.0, 0.013, 0.5, 0.99] {
            assert_abs_diff_eq!(shepard_eval_samples(&p, &c, &Abscissa::Value(x)).unwrap(), 0.3, epsilon = 1e-14);
        }
    }

    #[test]
    fn edge_value_matches_profile() {
        use crate::zeta::g_s_profile;
        let h = StepFn1D::new(unit(1, 2), Orientation::IndicatorLe);
        // odd n: the jump sits midway between two nodes
        let p = ShepardParams::new(2.0, 1999).unwrap();
        let v = shepard_eval_1d(&h, &p, &unit(1, 2)).unwrap();
        assert_abs_diff_eq!(v, g_s_profile(2.0, 0.5).unwrap(), epsilon = 5e-3);
        let p = ShepardParams::new(1.0, 1999).unwrap();
        assert_abs_diff_eq!(shepard_eval_1d(&h, &p, &unit(1, 2)).unwrap(), 0.5, epsilon = 5e-3);
        // even n hits the jump
        let p = ShepardParams::new(2.0, 2000).unwrap();
        assert_eq!(shepard_eval_1d(&h, &p, &unit(1, 2)).unwrap(), 1.0);
        // t = frac(n/3) = 1/3
        let h = StepFn1D::new(unit(1, 3), Orientation::IndicatorLe);
        let p = ShepardParams::new(3.0, 1501).unwrap();
        assert_abs_diff_eq!(
            shepard_eval_1d(&h, &p, &unit(1, 3)).unwrap(),
            g_s_profile(3.0, 1.0 / 3.0).unwrap(),
            epsilon = 5e-3
        );
    }

    #[test]
    fn tensor_cross_check() {
        for conv in [Convention::LowerLeft, Convention::LowerLeftOpen, Convention::UpperRight] {
            let h = StepFn2D::new(unit(1, 2), unit(2, 5), conv);
            for (n, m) in [(3, 4), (10, 7), (25, 30)] {
                let px = ShepardParams::new(1.5, n).unwrap();
                let py = ShepardParams::new(2.0, m).unwrap();
                shepard_eval_2d(&h, &px, &py, &unit(1, 2), &unit(2, 5), true).unwrap();
                shepard_eval_2d(&h, &px, &py, &Abscissa::Value(0.31), &Abscissa::Value(0.77), true).unwrap();
                // a grid node returns h there
                let v = shepard_eval_2d(&h, &px, &py, &unit(1, n as u64), &unit(1, m as u64), true).unwrap();
                assert_eq!(v, h.unit_node_value(n, 1, m, 1));
            }
        }
    }
}
