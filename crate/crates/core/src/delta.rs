//! The kernel `h(x, y)` and the delta-symbol expansion
//! `delta(m) = c_Q Q^{-2} sum_q sum*_a e(am/q) h(q/Q, m/Q^2)`.
//!
//! The inner sum over `a` is the Ramanujan sum `c_q(m)`, and the `q`-sum stops
//! at `q < Q max(1, 2|m|/Q^2)` because `h(x, y) = 0` once `x >= max(1, 2|y|)`.

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{ramanujan_sum, RSum};
use crate::error::{invalid, Result};
use crate::weight::Omega;

/// `h(x, y) = sum_j (x j)^{-1} (omega(x j) - omega(|y| / (x j)))`.
#[derive(Clone, Copy, Debug)]
pub struct HKernel {
    omega: Omega,
    /// Extra `j` values summed on each side of the nonzero window.
    margin: u64,
}

impl Default for HKernel {
    fn default() -> Self {
        Self::new()
    }
}

impl HKernel {
    pub fn new() -> Self {
        Self { omega: Omega::new(), margin: 1 }
    }

    pub fn with_margin(margin: u64) -> Self {
        Self { omega: Omega::new(), margin }
    }

    pub fn omega(&self, x: f64) -> f64 {
        self.omega.eval(x)
    }

    /// `j` ranges outside which each part of the series vanishes.
    fn windows(&self, x: f64, y: f64) -> [(u64, u64); 2] {
        let m = self.margin;
        let span = |lo: f64, hi: f64| ((lo.floor() as u64).saturating_sub(m).max(1), hi.ceil() as u64 + m);
        let first = span(0.5 / x, 1.0 / x);
        let second = if y == 0.0 { (1, 0) } else { span(y.abs() / x, 2.0 * y.abs() / x) };
        [first, second]
    }

    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        if !(x > 0.0 && x.is_finite()) {
            return invalid(format!("h(x, y) needs x > 0, got {x}"));
        }
        Ok(self.eval_unchecked(x, y))
    }

    fn eval_unchecked(&self, x: f64, y: f64) -> f64 {
        let [(a0, a1), (b0, b1)] = self.windows(x, y);
        let ay = y.abs();
        let mut s = RSum::default();
        for j in a0..=a1 {
            let xj = x * j as f64;
            s.add(self.omega.eval(xj) / xj);
        }
        for j in b0..=b1 {
            let xj = x * j as f64;
            s.add(-self.omega.eval(ay / xj) / xj);
        }
        s.value()
    }

    /// Central differences `(dh/dx, dh/dy)`, for inspection only.
    pub fn partials(&self, x: f64, y: f64, step: f64) -> Result<(f64, f64)> {
        if x - step <= 0.0 {
            return invalid("finite-difference step reaches x <= 0");
        }
        let dx = (self.eval_unchecked(x + step, y) - self.eval_unchecked(x - step, y)) / (2.0 * step);
        let dy = (self.eval_unchecked(x, y + step) - self.eval_unchecked(x, y - step)) / (2.0 * step);
        Ok((dx, dy))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DeltaApprox {
    #[serde(rename = "Q")]
    pub q: f64,
    #[serde(rename = "c_Q")]
    pub c_q: f64,
    /// Largest `q` summed for `m = 0`.
    pub truncation: u64,
}

/// Largest `q` with a possibly nonzero term.
pub fn q_range(m: i64, q: f64) -> u64 {
    let bound = q * 1f64.max(2.0 * m.unsigned_abs() as f64 / (q * q));
    (bound.ceil() as u64).max(1)
}

/// `S(m, Q) = Q^{-2} sum_q c_q(m) h(q/Q, m/Q^2)`.
pub fn s_raw(kernel: &HKernel, m: i64, q: f64) -> Result<f64> {
    if !(q > 1.0 && q.is_finite()) {
        return invalid(format!("Q must exceed 1, got {q}"));
    }
    let y = m as f64 / (q * q);
    let top = q_range(m, q);
    let terms: Vec<f64> = (1..=top)
        .into_par_iter()
        .map(|k| {
            let c = ramanujan_sum(m, k);
            if c == 0 {
                0.0
            } else {
                c as f64 * kernel.eval_unchecked(k as f64 / q, y)
            }
        })
        .collect();
    let mut s = RSum::default();
    for t in terms {
        s.add(t);
    }
    Ok(s.value() / (q * q))
}

pub fn calibrate(kernel: &HKernel, q: f64) -> Result<DeltaApprox> {
    let s0 = s_raw(kernel, 0, q)?;
    Ok(DeltaApprox { q, c_q: 1.0 / s0, truncation: q_range(0, q) })
}

/// Largest `|m| / Q^2` accepted by [`delta_approx`].
pub const MAX_M_OVER_Q2: f64 = 64.0;

pub fn delta_approx(kernel: &HKernel, cal: &DeltaApprox, m: i64) -> Result<f64> {
    if m.unsigned_abs() as f64 > MAX_M_OVER_Q2 * cal.q * cal.q {
        return invalid(format!("|m| = {} exceeds {MAX_M_OVER_Q2} Q^2", m.unsigned_abs()));
    }
    Ok(cal.c_q * s_raw(kernel, m, cal.q)?)
}

#[derive(Clone, Debug, Serialize)]
pub struct DeltaRow {
    pub m: i64,
    pub value: f64,
}

/// `(m, c_Q S(m, Q))` for `m` in `lo..=hi`.
pub fn delta_table(q: f64, lo: i64, hi: i64) -> Result<(DeltaApprox, Vec<DeltaRow>)> {
    if lo > hi {
        return invalid("empty m range");
    }
    let kernel = HKernel::new();
    let cal = calibrate(&kernel, q)?;
    let rows = (lo..=hi).map(|m| Ok(DeltaRow { m, value: delta_approx(&kernel, &cal, m)? })).collect::<Result<_>>()?;
    Ok((cal, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_examples() {
        let h = HKernel::new();
        assert_eq!(h.eval(1.2, 0.3).unwrap(), 0.0);
        let expect = h.omega(0.8) / 0.8;
        assert!((h.eval(0.4, 0.0).unwrap() - expect).abs() < 1e-15);
        assert_eq!(h.eval(0.3, 0.7).unwrap(), h.eval(0.3, -0.7).unwrap());
        assert!(h.eval(0.0, 1.0).is_err());
        assert!(h.eval(-1.0, 1.0).is_err());
    }

    #[test]
    fn vanishes_past_the_corner() {
        let h = HKernel::new();
        for i in 0..100 {
            for k in 0..100 {
                let y = -3.0 + 6.0 * k as f64 / 99.0;
                let x = 1f64.max(2.0 * y.abs()) * (1.0 + i as f64 / 50.0);
                assert_eq!(h.eval(x, y).unwrap(), 0.0, "x={x} y={y}");
            }
        }
    }

    #[test]
    fn window_is_complete() {
        let (a, b) = (HKernel::new(), HKernel::with_margin(6));
        for &(x, y) in &[(0.05, 0.3), (0.31, -0.01), (0.77, 0.2), (0.013, 1.7)] {
            assert!((a.eval(x, y).unwrap() - b.eval(x, y).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn detects_zero() {
        let h = HKernel::new();
        let cal = calibrate(&h, 5.0).unwrap();
        assert!((delta_approx(&h, &cal, 0).unwrap() - 1.0).abs() < 1e-15);
        assert!(delta_approx(&h, &cal, 7).unwrap().abs() < 1e-6);
        for m in -50..=50 {
            let d = delta_approx(&h, &cal, m).unwrap();
            assert!((d - if m == 0 { 1.0 } else { 0.0 }).abs() < 1e-6, "m={m}: {d}");
        }
        assert!(calibrate(&h, 1.0).is_err());
    }
}
