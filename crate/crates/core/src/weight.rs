//! Compactly supported smooth weights and the auxiliary functions `U`, `omega`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::quadform::RaryForm;

/// `exp(-1/t)` for `t > 0`, else 0.
#[inline]
fn flat(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / t).exp()
    }
}

/// Smooth descending step: 1 for `s <= 0`, 0 for `s >= 1`, `step(s) + step(1 - s) = 1`.
#[inline]
pub fn smooth_step(s: f64) -> f64 {
    if s <= 0.0 {
        return 1.0;
    }
    if s >= 1.0 {
        return 0.0;
    }
    let a = flat(1.0 - s);
    let b = flat(s);
    a / (a + b)
}

/// `U`: even, 1 on `[-1, 1]`, 0 outside `[-2, 2]`.
pub fn u_cutoff(t: f64) -> f64 {
    smooth_step(t.abs() - 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightKind {
    /// Function of the Euclidean distance to the center.
    Radial,
    /// Function of the sup-norm distance to the center.
    Box,
    /// Product of one-dimensional bumps.
    Product,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightSpec {
    pub kind: WeightKind,
    pub center: Vec<f64>,
    pub inner_radius: f64,
    pub outer_radius: f64,
}

impl WeightSpec {
    pub fn new(kind: WeightKind, center: Vec<f64>, inner_radius: f64, outer_radius: f64) -> Result<Self> {
        let s = Self { kind, center, inner_radius, outer_radius };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.center.is_empty() {
            return invalid("weight center is empty");
        }
        if !(self.inner_radius >= 0.0 && self.outer_radius > self.inner_radius && self.outer_radius.is_finite()) {
            return invalid(format!(
                "weight radii must satisfy 0 <= inner < outer, got {} and {}",
                self.inner_radius, self.outer_radius
            ));
        }
        if self.center.iter().any(|c| !c.is_finite()) {
            return invalid("weight center must be finite");
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    fn profile(&self, d: f64) -> f64 {
        smooth_step((d - self.inner_radius) / (self.outer_radius - self.inner_radius))
    }

    /// `w(y)`, in `[0, 1]`.
    pub fn eval(&self, y: &[f64]) -> f64 {
        debug_assert_eq!(y.len(), self.center.len());
        match self.kind {
            WeightKind::Radial => {
                let d2: f64 = y.iter().zip(&self.center).map(|(a, c)| (a - c) * (a - c)).sum();
                if d2 >= self.outer_radius * self.outer_radius {
                    return 0.0;
                }
                self.profile(d2.sqrt())
            }
            WeightKind::Box => {
                let d = y.iter().zip(&self.center).fold(0.0f64, |m, (a, c)| m.max((a - c).abs()));
                self.profile(d)
            }
            WeightKind::Product => {
                let mut v = 1.0;
                for (a, c) in y.iter().zip(&self.center) {
                    v *= self.profile((a - c).abs());
                    if v == 0.0 {
                        break;
                    }
                }
                v
            }
        }
    }

    /// The weight in `n = r + 2` variables: `w(y_1..y_r)` times a cutoff
    /// in the last two coordinates equal to one on `[-c, c]^2`.
    pub fn eval_extended(&self, y: &[f64], c: f64) -> f64 {
        let r = self.dim();
        self.eval(&y[..r]) * u_cutoff(y[r] / c) * u_cutoff(y[r + 1] / c)
    }

    /// Half-width of an axis-parallel box containing the support.
    pub fn box_radius(&self) -> f64 {
        self.outer_radius
    }

    /// Radius of a Euclidean ball containing the support.
    pub fn ball_radius(&self) -> f64 {
        match self.kind {
            WeightKind::Radial => self.outer_radius,
            WeightKind::Box | WeightKind::Product => self.outer_radius * (self.dim() as f64).sqrt(),
        }
    }

    /// Support at scale `b`: integer box `[lo_i, hi_i]` containing `b * supp(w)`.
    pub fn integer_box(&self, b: f64) -> Vec<(i64, i64)> {
        let rad = self.box_radius();
        self.center.iter().map(|&c| (((c - rad) * b).floor() as i64, ((c + rad) * b).ceil() as i64)).collect()
    }
}

/// Lower bounds for `Q1` and `|grad Q2|` on the support of `w`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SupportMargins {
    pub q1_min: f64,
    pub grad_q2_min: f64,
    pub q1_max: f64,
}

/// Rigorous margins from a Taylor expansion at the center over the enclosing ball.
pub fn support_margins(q1: &RaryForm, q2: &RaryForm, spec: &WeightSpec) -> SupportMargins {
    let c = &spec.center;
    let rad = spec.ball_radius();
    let q1c = q1.eval_f64(c);
    let g1 = q1.gradient_f64(c);
    let g1n = g1.iter().map(|x| x * x).sum::<f64>().sqrt();
    let (lo, hi) = q1.eigen_range();
    let q1_min = q1c - g1n * rad + lo.min(0.0) * rad * rad;
    let q1_max = q1c + g1n * rad + hi.max(0.0) * rad * rad;
    let g2 = q2.gradient_f64(c);
    let g2n = g2.iter().map(|x| x * x).sum::<f64>().sqrt();
    let m = nalgebra::DMatrix::from_fn(q2.r(), q2.r(), |i, j| q2.gram()[i][j] as f64);
    let op = m.singular_values().max();
    SupportMargins { q1_min, grad_q2_min: g2n - op * rad, q1_max }
}

/// `omega`: smooth, supported on `[1/2, 1]`, unit integral.
#[derive(Clone, Copy, Debug)]
pub struct Omega {
    norm: f64,
}

impl Omega {
    pub fn new() -> Self {
        let raw = |x: f64| Self::raw(x);
        let integral = adaptive_simpson(&raw, 0.5, 1.0, 1e-14, 50);
        Self { norm: 1.0 / integral }
    }

    fn raw(x: f64) -> f64 {
        if x <= 0.5 || x >= 1.0 {
            return 0.0;
        }
        // shifted so the peak value at x = 3/4 is 1
        (16.0 - 1.0 / ((x - 0.5) * (1.0 - x))).exp()
    }

    pub fn normalizer(&self) -> f64 {
        self.norm
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        self.norm * Self::raw(x)
    }
}

impl Default for Omega {
    fn default() -> Self {
        Self::new()
    }
}

/// Adaptive Simpson quadrature with Richardson correction.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = simpson(fa, fm, fb, a, b);
    rec(f, a, b, fa, fm, fb, whole, tol, depth)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_shape() {
        assert_eq!(smooth_step(-0.1), 1.0);
        assert_eq!(smooth_step(1.0), 0.0);
        assert_eq!(smooth_step(0.5), 0.5);
        for i in 1..100 {
            let s = i as f64 / 100.0;
            assert!((smooth_step(s) + smooth_step(1.0 - s) - 1.0).abs() < 1e-15);
            assert!(smooth_step(s) >= smooth_step(s + 0.005));
        }
        assert_eq!(u_cutoff(0.9), 1.0);
        assert_eq!(u_cutoff(-2.0), 0.0);
        assert_eq!(u_cutoff(1.5), u_cutoff(-1.5));
    }

    #[test]
    fn weight_regions() {
        for kind in [WeightKind::Radial, WeightKind::Box, WeightKind::Product] {
            let w = WeightSpec::new(kind, vec![1.0, 2.0, 0.0], 0.2, 0.5).unwrap();
            assert_eq!(w.eval(&[1.0, 2.0, 0.0]), 1.0);
            assert_eq!(w.eval(&[1.1, 2.0, 0.05]), 1.0);
            assert_eq!(w.eval(&[1.6, 2.0, 0.0]), 0.0);
            let mid = w.eval(&[1.35, 2.0, 0.0]);
            assert!((mid - 0.5).abs() < 1e-15, "{kind:?}: {mid}");
        }
        assert!(WeightSpec::new(WeightKind::Radial, vec![0.0], 0.5, 0.5).is_err());
    }

    #[test]
    fn weight_derivative_bounded_at_edges() {
        let w = WeightSpec::new(WeightKind::Radial, vec![0.0, 0.0], 0.2, 0.4).unwrap();
        let h = 1e-6;
        for r in [0.2, 0.2 + 1e-4, 0.3, 0.4 - 1e-4, 0.4] {
            let d = (w.eval(&[r + h, 0.0]) - w.eval(&[r - h, 0.0])) / (2.0 * h);
            assert!(d.abs() < 20.0, "r={r}: {d}");
        }
    }

    #[test]
    fn omega_normalized() {
        let om = Omega::new();
        let f = |x: f64| om.eval(x);
        let total = adaptive_simpson(&f, 0.5, 1.0, 1e-14, 50);
        assert!((total - 1.0).abs() < 1e-12);
        assert_eq!(om.eval(0.5), 0.0);
        assert_eq!(om.eval(1.2), 0.0);
    }

    #[test]
    fn margins_contain_samples() {
        let q1 = RaryForm::diagonal(&[1, 1, 1, 1]);
        let q2 = RaryForm::diagonal(&[-1, 1, 2, 3]);
        let c = vec![6f64.sqrt() / 3.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0];
        let w = WeightSpec::new(WeightKind::Radial, c.clone(), 0.2, 0.4).unwrap();
        let m = support_margins(&q1, &q2, &w);
        assert!(m.q1_min > 0.0 && m.grad_q2_min > 0.0, "{m:?}");
        for i in 0..200 {
            let t = i as f64 * 0.37;
            let y: Vec<f64> = (0..4).map(|j| c[j] + 0.4 * (t + j as f64 * 1.3).sin() / 2.0).collect();
            assert!(q1.eval_f64(&y) >= m.q1_min);
        }
    }
}
