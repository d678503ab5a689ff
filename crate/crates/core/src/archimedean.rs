//! Real densities: `tau_inf(Q, w)` and the singular integral, the latter both
//! through `J = 2 pi / sqrt|D| * tau_inf(Q2, w)` and through the double
//! window over all `n = r + 2` variables.
//!
//! One coordinate `y_j` is integrated by Gauss-Legendre over the exact
//! window `{t : |Q(y', t)| <= eps}`; the remaining coordinates are sampled by
//! a Halton sequence under Cranley-Patterson shifts, and the standard error
//! is taken across shifts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::model::ModelSystem;
use crate::quadform::RaryForm;
use crate::weight::WeightSpec;

/// `y^T A y + lin . y + c` over the reals.
#[derive(Clone, Debug, PartialEq)]
pub struct RealQuadric {
    pub a: Vec<Vec<f64>>,
    pub lin: Vec<f64>,
    pub c: f64,
}

impl RealQuadric {
    pub fn from_form(f: &RaryForm) -> Self {
        let r = f.r();
        let a = (0..r).map(|i| (0..r).map(|j| f.gram()[i][j] as f64 / 2.0).collect()).collect();
        Self { a, lin: vec![0.0; r], c: 0.0 }
    }

    /// The linear form `coeffs . y`.
    pub fn linear(coeffs: &[f64]) -> Self {
        let r = coeffs.len();
        Self { a: vec![vec![0.0; r]; r], lin: coeffs.to_vec(), c: 0.0 }
    }

    pub fn dim(&self) -> usize {
        self.lin.len()
    }

    pub fn eval(&self, y: &[f64]) -> f64 {
        let mut s = self.c;
        for (i, row) in self.a.iter().enumerate() {
            let ri: f64 = row.iter().zip(y).map(|(a, b)| a * b).sum();
            s += y[i] * ri + self.lin[i] * y[i];
        }
        s
    }

    /// `Q(y) = alpha t^2 + beta t + gamma` with `t = y_j` and the other coordinates from `y`.
    fn line(&self, y: &[f64], j: usize) -> (f64, f64, f64) {
        let alpha = self.a[j][j];
        let mut beta = self.lin[j];
        let mut gamma = self.c;
        for i in 0..self.dim() {
            if i == j {
                continue;
            }
            beta += 2.0 * self.a[i][j] * y[i];
            gamma += self.lin[i] * y[i];
            for k in 0..self.dim() {
                if k != j {
                    gamma += self.a[i][k] * y[i] * y[k];
                }
            }
        }
        (alpha, beta, gamma)
    }

    /// Lower bound for `|dQ/dy_j|` on the ball of radius `rad` about `center`.
    fn partial_margin(&self, j: usize, center: &[f64], rad: f64) -> f64 {
        let d: f64 = self.lin[j] + 2.0 * self.a[j].iter().zip(center).map(|(a, c)| a * c).sum::<f64>();
        let row: f64 = self.a[j].iter().map(|a| 4.0 * a * a).sum::<f64>().sqrt();
        d.abs() - row * rad
    }
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for k in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * k + 1) as f64 * z * p1 - k as f64 * p2) / (k + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

fn sorted_roots(a: f64, b: f64, c: f64) -> Option<(f64, f64)> {
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return None;
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    if q == 0.0 {
        return Some((0.0, 0.0));
    }
    let (r1, r2) = (q / a, c / q);
    Some(if r1 <= r2 { (r1, r2) } else { (r2, r1) })
}

/// `{t in [lo, hi] : |alpha t^2 + beta t + gamma| <= eps}` as at most two intervals.
fn window(alpha: f64, beta: f64, gamma: f64, eps: f64, lo: f64, hi: f64) -> Vec<(f64, f64)> {
    let (alpha, beta, gamma) = if alpha < 0.0 { (-alpha, -beta, -gamma) } else { (alpha, beta, gamma) };
    let mut raw = Vec::with_capacity(2);
    if alpha == 0.0 {
        if beta == 0.0 {
            if gamma.abs() <= eps {
                raw.push((lo, hi));
            }
        } else {
            let (a, b) = ((-eps - gamma) / beta, (eps - gamma) / beta);
            raw.push((a.min(b), a.max(b)));
        }
    } else if let Some((t1, t2)) = sorted_roots(alpha, beta, gamma - eps) {
        match sorted_roots(alpha, beta, gamma + eps) {
            Some((t3, t4)) => {
                raw.push((t1, t3));
                raw.push((t4, t2));
            }
            None => raw.push((t1, t2)),
        }
    }
    raw.into_iter().map(|(a, b)| (a.max(lo), b.min(hi))).filter(|(a, b)| b > a).collect()
}

/// Low-discrepancy points with random shifts.
struct Qmc {
    dim: usize,
    shifts: Vec<Vec<f64>>,
    per_shift: usize,
}

const PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];
pub const QMC_SHIFTS: usize = 16;

fn radical_inverse(mut i: u64, b: u64) -> f64 {
    let inv = 1.0 / b as f64;
    let mut f = inv;
    let mut x = 0.0;
    while i > 0 {
        x += (i % b) as f64 * f;
        i /= b;
        f *= inv;
    }
    x
}

impl Qmc {
    fn new(dim: usize, samples: usize, seed: u64) -> Result<Self> {
        if dim > PRIMES.len() {
            return invalid(format!("quasi-random sampling supports up to {} dimensions", PRIMES.len()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shifts = (0..QMC_SHIFTS).map(|_| (0..dim).map(|_| rng.random::<f64>()).collect()).collect();
        Ok(Self { dim, shifts, per_shift: samples.div_ceil(QMC_SHIFTS) })
    }

    fn point(&self, shift: usize, i: usize, out: &mut [f64]) {
        for (d, o) in out.iter_mut().enumerate().take(self.dim) {
            let x = radical_inverse(i as u64 + 1, PRIMES[d]) + self.shifts[shift][d];
            *o = x - x.floor();
        }
    }

    /// Mean over each shift of `f`, which returns `K` values per point.
    fn shift_means<const K: usize>(&self, f: &(dyn Fn(&[f64]) -> [f64; K] + Sync)) -> Vec<[f64; K]> {
        (0..self.shifts.len())
            .into_par_iter()
            .map(|s| {
                let mut acc = [0.0; K];
                let mut u = vec![0.0; self.dim];
                for i in 0..self.per_shift {
                    self.point(s, i, &mut u);
                    let v = f(&u);
                    for k in 0..K {
                        acc[k] += v[k];
                    }
                }
                acc.map(|a| a / self.per_shift as f64)
            })
            .collect()
    }
}

fn mean_and_stderr(xs: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = xs.clone().count() as f64;
    let mean = xs.clone().sum::<f64>() / n;
    let var = xs.map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[derive(Clone, Debug, Serialize)]
pub struct TauReport {
    /// Richardson value `(4 tau(eps/2) - tau(eps)) / 3`.
    pub tau: f64,
    pub stderr: f64,
    pub tau_eps: f64,
    pub tau_half_eps: f64,
    /// Surface integral `int_{Q = 0} w / |dQ/dy_j|`, the `eps -> 0` limit.
    pub tau_limit: f64,
    pub tau_limit_stderr: f64,
    pub eps: f64,
    pub samples: usize,
    pub seed: u64,
    pub solve_coordinate: usize,
    pub warning: Option<String>,
}

pub const MIN_SAMPLES: usize = 100_000;
const GL_NODES: usize = 12;

fn check_mc(eps: f64, samples: usize) -> Result<()> {
    if !(eps > 0.0 && eps.is_finite()) {
        return invalid(format!("eps must be positive, got {eps}"));
    }
    if samples < MIN_SAMPLES {
        return invalid(format!("need at least {MIN_SAMPLES} samples, got {samples}"));
    }
    Ok(())
}

fn pick_coordinate(q: &RealQuadric, spec: &WeightSpec) -> usize {
    let rad = spec.ball_radius();
    (0..q.dim())
        .max_by(|&i, &j| q.partial_margin(i, &spec.center, rad).total_cmp(&q.partial_margin(j, &spec.center, rad)))
        .unwrap_or(0)
}

/// Box coordinates from a unit-cube point, skipping the solve coordinate.
fn place(u: &[f64], spec: &WeightSpec, j: usize, y: &mut [f64]) {
    let rad = spec.box_radius();
    let mut k = 0;
    for (i, yi) in y.iter_mut().enumerate() {
        if i != j {
            *yi = spec.center[i] - rad + 2.0 * rad * u[k];
            k += 1;
        }
    }
}

fn gl_integrate(f: &mut dyn FnMut(f64) -> f64, ivs: &[(f64, f64)], gl: &(Vec<f64>, Vec<f64>)) -> f64 {
    let mut s = 0.0;
    for &(a, b) in ivs {
        let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
        for (x, w) in gl.0.iter().zip(&gl.1) {
            s += w * h * f(m + h * x);
        }
    }
    s
}

/// `(2 eps)^{-1} int_{|Q(y)| <= eps} w(y) dy` at `eps` and `eps / 2`, Richardson-combined.
pub fn tau_infinity(q: &RealQuadric, spec: &WeightSpec, eps: f64, samples: usize, seed: u64) -> Result<TauReport> {
    spec.validate()?;
    if q.dim() != spec.dim() {
        return invalid(format!("quadric has {} variables, weight has {}", q.dim(), spec.dim()));
    }
    check_mc(eps, samples)?;
    let r = q.dim();
    let j = pick_coordinate(q, spec);
    let rad = spec.box_radius();
    let vol = (2.0 * rad).powi(r as i32 - 1);
    let (lo, hi) = (spec.center[j] - rad, spec.center[j] + rad);
    let gl = gauss_legendre(GL_NODES);
    let qmc = Qmc::new(r - 1, samples, seed)?;

    let f = |u: &[f64]| -> [f64; 3] {
        let mut y = vec![0.0; r];
        place(u, spec, j, &mut y);
        let (al, be, ga) = q.line(&y, j);
        let mut out = [0.0; 3];
        for (k, e) in [eps, eps / 2.0].into_iter().enumerate() {
            let ivs = window(al, be, ga, e, lo, hi);
            let mut g = |t: f64| {
                y[j] = t;
                spec.eval(&y)
            };
            out[k] = vol * gl_integrate(&mut g, &ivs, &gl) / (2.0 * e);
        }
        if al != 0.0 || be != 0.0 {
            let roots = if al == 0.0 { Some((-ga / be, -ga / be)) } else { sorted_roots(al, be, ga) };
            if let Some((t1, t2)) = roots {
                let ts: &[f64] = if t1 == t2 { &[t1] } else { &[t1, t2] };
                for &t in ts {
                    let slope = (2.0 * al * t + be).abs();
                    if t >= lo && t <= hi && slope > 0.0 {
                        y[j] = t;
                        out[2] += vol * spec.eval(&y) / slope;
                    }
                }
            }
        }
        out
    };
    let means = qmc.shift_means(&f);
    let rich = |m: &[f64; 3]| (4.0 * m[1] - m[0]) / 3.0;
    let (tau, stderr) = mean_and_stderr(means.iter().map(rich));
    let (tau_eps, _) = mean_and_stderr(means.iter().map(|m| m[0]));
    let (tau_half_eps, _) = mean_and_stderr(means.iter().map(|m| m[1]));
    let (tau_limit, tau_limit_stderr) = mean_and_stderr(means.iter().map(|m| m[2]));
    let warning = (tau_eps == 0.0 && tau_half_eps == 0.0)
        .then(|| "the window |Q| <= eps misses the support of w".to_string());
    Ok(TauReport {
        tau,
        stderr,
        tau_eps,
        tau_half_eps,
        tau_limit,
        tau_limit_stderr,
        eps,
        samples: qmc.per_shift * QMC_SHIFTS,
        seed,
        solve_coordinate: j,
        warning,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SingularIntegralReport {
    pub tau: TauReport,
    pub j_identity: f64,
    pub j_identity_stderr: f64,
    /// Richardson value of the double-window estimate.
    pub j_direct: f64,
    pub j_direct_stderr: f64,
    pub j_direct_eps: f64,
    pub j_direct_half_eps: f64,
    /// The last two coordinates of `W` stay inside `[-C, C]^2`, where `W = w`.
    pub cutoff_c: f64,
    /// `|J_identity - J_direct|` in combined standard errors.
    pub sigmas: f64,
    pub rel_diff: f64,
    pub agree: bool,
    pub seeds: [u64; 2],
}

/// Agreement threshold in combined standard errors.
pub const SIGINT_SIGMAS: f64 = 3.0;

/// `J` via the identity and via the direct double window.
pub fn singular_integral(model: &ModelSystem, spec: &WeightSpec, eps: f64, samples: usize, seed: u64) -> Result<SingularIntegralReport> {
    if spec.dim() != model.r {
        return invalid(format!("weight has dimension {}, model has r = {}", spec.dim(), model.r));
    }
    check_mc(eps, samples)?;
    let q2 = RealQuadric::from_form(&model.q2);
    let q1 = RealQuadric::from_form(&model.q1);
    let margins = crate::weight::support_margins(&model.q1, &model.q2, spec);
    if margins.q1_min <= eps {
        return invalid(format!("Q1 must exceed eps on the support of w (lower bound {:.4})", margins.q1_min));
    }
    let absd = (model.d.abs()) as f64;
    let factor = 2.0 * std::f64::consts::PI / absd.sqrt();
    let tau = tau_infinity(&q2, spec, eps, samples, seed)?;
    let j_identity = factor * tau.tau;
    let j_identity_stderr = factor * tau.stderr;

    let r = model.r;
    let j = tau.solve_coordinate;
    let rad = spec.box_radius();
    let vol = (2.0 * rad).powi(r as i32 - 1) * std::f64::consts::PI;
    let (lo, hi) = (spec.center[j] - rad, spec.center[j] + rad);
    let gl = gauss_legendre(GL_NODES);
    let seed2 = seed ^ 0x9e37_79b9_7f4a_7c15;
    let qmc = Qmc::new(r, samples, seed2)?;
    let b = model.binary_form().b as f64;

    // F(u, v) = s^2 + |D| v^2 / 4 with s = u + b v / 2
    let f = |u: &[f64]| -> [f64; 2] {
        let mut y = vec![0.0; r];
        place(&u[..r - 1], spec, j, &mut y);
        let theta = std::f64::consts::PI * (u[r - 1] - 0.5);
        let (al, be, ga) = q2.line(&y, j);
        let mut out = [0.0; 2];
        for (k, e) in [eps, eps / 2.0].into_iter().enumerate() {
            let ivs = window(al, be, ga, e, lo, hi);
            let mut g = |t: f64| {
                y[j] = t;
                let w = spec.eval(&y);
                if w == 0.0 {
                    return 0.0;
                }
                let a1 = q1.eval(&y);
                let vmax = 2.0 * ((a1 + e) / absd).sqrt();
                let v = vmax * theta.sin();
                let core = absd * v * v / 4.0;
                let len = 2.0 * ((a1 + e - core).max(0.0).sqrt() - (a1 - e - core).max(0.0).sqrt());
                w * len * vmax * theta.cos()
            };
            out[k] = vol * gl_integrate(&mut g, &ivs, &gl) / (4.0 * e * e);
        }
        out
    };
    let means = qmc.shift_means(&f);
    let (j_direct, j_direct_stderr) = mean_and_stderr(means.iter().map(|m| (4.0 * m[1] - m[0]) / 3.0));
    let (j_direct_eps, _) = mean_and_stderr(means.iter().map(|m| m[0]));
    let (j_direct_half_eps, _) = mean_and_stderr(means.iter().map(|m| m[1]));

    let top = margins.q1_max + eps;
    let cutoff_c = (top.sqrt() * (1.0 + b.abs() / absd.sqrt())).max(2.0 * (top / absd).sqrt());
    let combined = (j_identity_stderr.powi(2) + j_direct_stderr.powi(2)).sqrt();
    let diff = (j_identity - j_direct).abs();
    let sigmas = if combined > 0.0 { diff / combined } else if diff == 0.0 { 0.0 } else { f64::INFINITY };
    let rel_diff = diff / j_identity.abs().max(f64::MIN_POSITIVE);
    Ok(SingularIntegralReport {
        tau,
        j_identity,
        j_identity_stderr,
        j_direct,
        j_direct_stderr,
        j_direct_eps,
        j_direct_half_eps,
        cutoff_c,
        sigmas,
        rel_diff,
        agree: sigmas <= SIGINT_SIGMAS,
        seeds: [seed, seed2],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weight::WeightKind;

    #[test]
    fn gauss_legendre_exact_for_polynomials() {
        let (x, w) = gauss_legendre(12);
        for k in 0..24 {
            let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(k)).sum();
            let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            assert!((s - exact).abs() < 1e-13, "k={k}: {s}");
        }
    }

    #[test]
    fn window_matches_definition() {
        for &(a, b, c) in &[(1.0, 0.3, -0.2), (-2.0, 1.0, 0.5), (0.0, 2.0, 0.1), (1.0, 0.0, 0.01)] {
            let ivs = window(a, b, c, 0.05, -1.0, 1.0);
            for i in 0..2001 {
                let t = -1.0 + i as f64 / 1000.0;
                let inside = (a * t * t + b * t + c).abs() <= 0.05;
                let found = ivs.iter().any(|&(l, h)| t >= l - 1e-12 && t <= h + 1e-12);
                assert_eq!(inside, found, "({a},{b},{c}) t={t}");
            }
        }
    }

    #[test]
    fn linear_form_gives_slice_integral() {
        // product bump centred at 0: each factor integrates to inner + outer
        let w = WeightSpec::new(WeightKind::Product, vec![0.0; 3], 0.2, 0.5).unwrap();
        let rep = tau_infinity(&RealQuadric::linear(&[1.0, 0.0, 0.0]), &w, 0.01, 100_000, 1).unwrap();
        let exact = 0.7f64 * 0.7;
        assert!((rep.tau - exact).abs() < 1e-4, "{rep:?}");
        assert!((rep.tau_limit - exact).abs() < 1e-4);
    }

    #[test]
    fn missed_support_is_zero() {
        let w = WeightSpec::new(WeightKind::Radial, vec![2.0, 0.0], 0.1, 0.3).unwrap();
        let rep = tau_infinity(&RealQuadric::linear(&[1.0, 0.0]), &w, 0.01, 100_000, 1).unwrap();
        assert_eq!(rep.tau, 0.0);
        assert!(rep.warning.is_some());
    }

    #[test]
    fn seeds_agree_and_paths_agree() {
        let m = ModelSystem::shipped("quartic").unwrap();
        let w = m.weight().unwrap().clone();
        let q2 = RealQuadric::from_form(&m.q2);
        let a = tau_infinity(&q2, &w, 0.02, 100_000, 1).unwrap();
        let b = tau_infinity(&q2, &w, 0.02, 100_000, 2).unwrap();
        let comb = (a.stderr.powi(2) + b.stderr.powi(2)).sqrt();
        assert!((a.tau - b.tau).abs() <= 3.0 * comb + 1e-12, "{a:?} {b:?}");
        assert!((a.tau - a.tau_limit).abs() < 1e-3 * a.tau);
        let s = singular_integral(&m, &w, 0.02, 100_000, 7).unwrap();
        assert!(s.rel_diff < 0.02, "{s:?}");
    }

    #[test]
    fn refusals() {
        let w = WeightSpec::new(WeightKind::Radial, vec![0.0, 0.0], 0.1, 0.3).unwrap();
        let q = RealQuadric::linear(&[1.0, 0.0]);
        assert!(tau_infinity(&q, &w, 0.0, 100_000, 1).is_err());
        assert!(tau_infinity(&q, &w, 0.1, 10, 1).is_err());
        assert!(tau_infinity(&RealQuadric::linear(&[1.0]), &w, 0.1, 100_000, 1).is_err());
    }
}
