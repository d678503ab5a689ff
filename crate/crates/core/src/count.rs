//! Weighted integer points on `Q1(x) = F(u, v)`, `Q2(x) = 0`, counted as
//! `sum_{Q2(x) = 0} w(x/B) r_F(Q1(x))`, and the comparison with
//! `S J B^{r-2}`.

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{exact_sqrt, RSum};
use crate::archimedean::singular_integral;
use crate::classgroup::ClassCharacter;
use crate::density::singular_series;
use crate::error::{charge, invalid, Result};
use crate::model::ModelSystem;
use crate::quadform::RaryForm;
use crate::repnum::{rep_table, RepEngine};
use crate::weight::WeightSpec;

pub type IntBox = Vec<(i64, i64)>;

pub fn symmetric_box(r: usize, b: i64) -> IntBox {
    vec![(-b, b); r]
}

fn box_cost(bx: &[(i64, i64)], dims: usize) -> f64 {
    bx.iter().take(dims).map(|(lo, hi)| (hi - lo + 1).max(0) as f64).product()
}

/// Integer zeros of `q` in the box, in lexicographic order. The last
/// coordinate is solved from the quadratic it satisfies.
pub fn enumerate_zeros(q: &RaryForm, bx: &[(i64, i64)], budget: f64) -> Result<Vec<Vec<i64>>> {
    let r = q.r();
    if bx.len() != r {
        return invalid(format!("box has {} coordinates, form has {r}", bx.len()));
    }
    if q.coeff(r - 1, r - 1) == 0 {
        return invalid("the last variable has no square term; reorder the variables so it does");
    }
    if bx.iter().any(|(lo, hi)| lo > hi) {
        return Ok(Vec::new());
    }
    charge("zero enumeration", box_cost(bx, r - 1), budget)?;
    let alpha = q.coeff(r - 1, r - 1) as i128;
    let (lo_t, hi_t) = bx[r - 1];
    let solve = |prefix: &[i64], out: &mut Vec<Vec<i64>>| {
        let mut beta = 0i128;
        let mut gamma = 0i128;
        for i in 0..r - 1 {
            beta += q.coeff(i, r - 1) as i128 * prefix[i] as i128;
            for j in i..r - 1 {
                gamma += q.coeff(i, j) as i128 * prefix[i] as i128 * prefix[j] as i128;
            }
        }
        let disc = beta * beta - 4 * alpha * gamma;
        if disc < 0 {
            return;
        }
        let Some(s) = isqrt_exact_128(disc) else { return };
        let mut ts = Vec::with_capacity(2);
        for num in [-beta - s, -beta + s] {
            if num % (2 * alpha) == 0 {
                ts.push((num / (2 * alpha)) as i64);
            }
        }
        ts.sort_unstable();
        ts.dedup();
        for t in ts {
            if t >= lo_t && t <= hi_t {
                let mut x = prefix.to_vec();
                x.push(t);
                out.push(x);
            }
        }
    };
    if r == 1 {
        let mut out = Vec::new();
        solve(&[], &mut out);
        return Ok(out);
    }
    let (lo0, hi0) = bx[0];
    let chunks: Vec<Vec<Vec<i64>>> = (lo0..=hi0)
        .into_par_iter()
        .map(|x0| {
            let mut out = Vec::new();
            let mut prefix: Vec<i64> = bx[..r - 1].iter().map(|b| b.0).collect();
            prefix[0] = x0;
            'outer: loop {
                solve(&prefix, &mut out);
                let mut i = r - 2;
                loop {
                    if i == 0 {
                        break 'outer;
                    }
                    prefix[i] += 1;
                    if prefix[i] <= bx[i].1 {
                        break;
                    }
                    prefix[i] = bx[i].0;
                    i -= 1;
                }
            }
            out
        })
        .collect();
    Ok(chunks.into_iter().flatten().collect())
}

fn isqrt_exact_128(n: i128) -> Option<i128> {
    if n < 0 {
        return None;
    }
    if n <= i64::MAX as i128 {
        return exact_sqrt(n as i64).map(|s| s as i128);
    }
    let mut s = (n as f64).sqrt() as i128;
    while s * s > n {
        s -= 1;
    }
    while (s + 1) * (s + 1) <= n {
        s += 1;
    }
    (s * s == n).then_some(s)
}

/// Zeros by meet-in-the-middle for forms without cross terms between the
/// first `split` variables and the rest. Output in lexicographic order.
pub fn enumerate_zeros_split(q: &RaryForm, bx: &[(i64, i64)], split: usize, budget: f64) -> Result<Vec<Vec<i64>>> {
    let r = q.r();
    if bx.len() != r || split == 0 || split >= r {
        return invalid(format!("need 0 < split < r = {r} and a box with r coordinates"));
    }
    for i in 0..split {
        for j in split..r {
            if q.coeff(i, j) != 0 {
                return invalid(format!("cross term x{i} x{j} couples the two halves"));
            }
        }
    }
    let left_cost = box_cost(bx, split);
    let right_cost = box_cost(&bx[split..], r - split);
    charge("split enumeration", left_cost + right_cost, budget)?;
    let part = |vars: std::ops::Range<usize>| -> Vec<(i128, Vec<i64>)> {
        let ranges: Vec<(i64, i64)> = bx[vars.clone()].to_vec();
        let mut out = Vec::new();
        if ranges.iter().any(|(lo, hi)| lo > hi) {
            return out;
        }
        let mut cur: Vec<i64> = ranges.iter().map(|r| r.0).collect();
        loop {
            let mut v = 0i128;
            for (a, i) in vars.clone().enumerate() {
                for (b, j) in vars.clone().enumerate().skip(a) {
                    v += q.coeff(i, j) as i128 * cur[a] as i128 * cur[b] as i128;
                }
            }
            out.push((v, cur.clone()));
            let mut k = cur.len();
            loop {
                if k == 0 {
                    return out;
                }
                k -= 1;
                cur[k] += 1;
                if cur[k] <= ranges[k].1 {
                    break;
                }
                cur[k] = ranges[k].0;
            }
        }
    };
    let left = part(0..split);
    let right = part(split..r);
    let mut index: HashMap<i128, Vec<usize>> = HashMap::new();
    for (k, (v, _)) in right.iter().enumerate() {
        index.entry(*v).or_default().push(k);
    }
    let mut out = Vec::new();
    for (v, a) in &left {
        if let Some(ks) = index.get(&-v) {
            for &k in ks {
                let mut x = a.clone();
                x.extend_from_slice(&right[k].1);
                out.push(x);
            }
        }
    }
    Ok(out)
}

/// Weighted zeros of `Q2` at scale `B`: `(Q1(x), w(x/B))` for `w > 0`.
fn weighted_zeros(model: &ModelSystem, spec: &WeightSpec, b: f64, budget: f64) -> Result<Vec<(i64, f64)>> {
    if spec.dim() != model.r {
        return invalid(format!("weight has dimension {}, model has r = {}", spec.dim(), model.r));
    }
    if !(b > 0.0 && b.is_finite()) {
        return invalid(format!("B must be positive, got {b}"));
    }
    let zeros = enumerate_zeros(&model.q2, &spec.integer_box(b), budget)?;
    let mut out = Vec::with_capacity(zeros.len());
    let mut y = vec![0.0; model.r];
    for x in zeros {
        for (yi, xi) in y.iter_mut().zip(&x) {
            *yi = *xi as f64 / b;
        }
        let w = spec.eval(&y);
        if w == 0.0 {
            continue;
        }
        let c = model.q1.eval(&x);
        if c < 0 {
            return invalid(format!("Q1 takes the negative value {c} at {x:?} on the support of w"));
        }
        out.push((c as i64, w));
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct CountResult {
    #[serde(rename = "B")]
    pub b: f64,
    pub lhs: f64,
    /// Weighted zeros of `Q2` on the support.
    pub zeros: usize,
    /// `N_c(B)`: weight of the zeros with `Q1(x) = c`.
    pub slice_counts: BTreeMap<i64, f64>,
}

impl CountResult {
    /// `sum_c g(c) N_c(B)`.
    pub fn resum(&self, g: impl Fn(i64) -> f64) -> f64 {
        let mut s = RSum::default();
        for (&c, &n) in &self.slice_counts {
            s.add(g(c) * n);
        }
        s.value()
    }
}

/// `sum_{Q2(x) = 0} w(x/B) r_F(Q1(x))`.
pub fn weighted_count(model: &ModelSystem, spec: &WeightSpec, b: f64, budget: f64) -> Result<CountResult> {
    let pts = weighted_zeros(model, spec, b, budget)?;
    let mut slice_counts: BTreeMap<i64, f64> = BTreeMap::new();
    for &(c, w) in &pts {
        *slice_counts.entry(c).or_insert(0.0) += w;
    }
    let cmax = slice_counts.keys().next_back().copied().unwrap_or(0);
    let r_f = rep_table(model.binary_form(), cmax);
    let mut lhs = RSum::default();
    for &(c, w) in &pts {
        lhs.add(w * r_f[c as usize] as f64);
    }
    Ok(CountResult { b, lhs: lhs.value(), zeros: pts.len(), slice_counts })
}

#[derive(Clone, Debug, Serialize)]
pub struct TwistedSum {
    #[serde(rename = "B")]
    pub b: f64,
    pub character: Vec<u64>,
    pub order: u64,
    pub value: Complex64,
    /// `sum |lambda_chi(Q1(x))| w(x/B)`.
    pub magnitude: f64,
    pub normalizer: f64,
    /// `|value| / B^{r-2}`.
    pub ratio: f64,
}

/// `lambda_chi(c)` for `0 < c <= cmax`, from per-class representation tables.
fn lambda_table(engine: &RepEngine, chi: &ClassCharacter, cmax: i64) -> Vec<Complex64> {
    let tables: Vec<Vec<u32>> = engine.group.classes.iter().map(|&f| rep_table(f, cmax)).collect();
    (0..=cmax as usize)
        .map(|c| {
            let counts: Vec<u64> = tables.iter().map(|t| t[c] as u64).collect();
            engine.lambda_from_counts(chi, &counts)
        })
        .collect()
}

/// `sum_{Q2(x) = 0} lambda_chi(Q1(x)) w(x/B)` for a class character of order at least 3.
pub fn cusp_twisted_sum(model: &ModelSystem, spec: &WeightSpec, chi: &ClassCharacter, b: f64, budget: f64) -> Result<TwistedSum> {
    if chi.discriminant != model.d {
        return invalid(format!("character belongs to D = {}, model has D = {}", chi.discriminant, model.d));
    }
    if chi.order() <= 2 {
        return invalid(format!("character has order {}; the twisted sum needs order at least 3", chi.order()));
    }
    let engine = RepEngine::for_discriminant(model.d)?;
    let pts = weighted_zeros(model, spec, b, budget)?;
    let cmax = pts.iter().map(|p| p.0).max().unwrap_or(0);
    let lam = lambda_table(&engine, chi, cmax);
    let (mut re, mut im, mut mag) = (RSum::default(), RSum::default(), RSum::default());
    for &(c, w) in &pts {
        if c == 0 {
            continue;
        }
        let l = lam[c as usize];
        re.add(w * l.re);
        im.add(w * l.im);
        mag.add(w * l.norm());
    }
    let value = Complex64::new(re.value(), im.value());
    let normalizer = b.powi(model.r as i32 - 2);
    Ok(TwistedSum {
        b,
        character: chi.numerators.clone(),
        order: chi.order(),
        value,
        magnitude: mag.value(),
        normalizer,
        ratio: value.norm() / normalizer,
    })
}

/// Characters of order at least three, one from each conjugate pair.
pub fn cusp_characters(d: i64) -> Result<Vec<ClassCharacter>> {
    let engine = RepEngine::for_discriminant(d)?;
    let mut out: Vec<ClassCharacter> = Vec::new();
    for c in engine.characters.into_iter().filter(|c| c.order() >= 3) {
        if !out.iter().any(|o| *o == c.conjugate()) {
            out.push(c);
        }
    }
    Ok(out)
}

/// Settings for the main-term ingredients.
#[derive(Clone, Debug, Serialize)]
pub struct MainTermConfig {
    pub prime_cutoff: i64,
    pub level_budget: f64,
    pub eps: f64,
    pub samples: usize,
    pub seed: u64,
}

impl Default for MainTermConfig {
    fn default() -> Self {
        Self { prime_cutoff: 50, level_budget: crate::density::DEFAULT_LEVEL_BUDGET, eps: 0.02, samples: 1_000_000, seed: 1 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceRow {
    #[serde(rename = "B")]
    pub b: f64,
    pub lhs: f64,
    #[serde(rename = "S_trunc")]
    pub s_trunc: f64,
    #[serde(rename = "J")]
    pub j: f64,
    pub main_term: f64,
    pub ratio: f64,
    pub twisted_max_ratio: Option<f64>,
}

pub const CONVERGENCE_COLUMNS: [&str; 7] = ["B", "lhs", "S_trunc", "J", "main_term", "ratio", "twisted_max_ratio"];

/// One row per `B`: the weighted count against `S_trunc J B^{r-2}`.
pub fn convergence_table(
    model: &ModelSystem,
    spec: &WeightSpec,
    b_list: &[f64],
    cfg: &MainTermConfig,
    budget: f64,
) -> Result<Vec<ConvergenceRow>> {
    if b_list.is_empty() {
        return invalid("empty B list");
    }
    let s = singular_series(model, cfg.prime_cutoff, cfg.level_budget)?.product;
    let j = singular_integral(model, spec, cfg.eps, cfg.samples, cfg.seed)?.j_identity;
    let chars = cusp_characters(model.d)?;
    b_list
        .iter()
        .map(|&b| {
            let cnt = weighted_count(model, spec, b, budget)?;
            let main_term = s * j * b.powi(model.r as i32 - 2);
            let twisted_max_ratio = if chars.is_empty() {
                None
            } else {
                let mut worst = 0.0f64;
                for chi in &chars {
                    worst = worst.max(cusp_twisted_sum(model, spec, chi, b, budget)?.ratio);
                }
                Some(worst)
            };
            let ratio = if main_term == 0.0 { if cnt.lhs == 0.0 { 1.0 } else { f64::INFINITY } } else { cnt.lhs / main_term };
            Ok(ConvergenceRow { b, lhs: cnt.lhs, s_trunc: s, j, main_term, ratio, twisted_max_ratio })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::DEFAULT_BUDGET;

    fn brute(q: &RaryForm, bx: &[(i64, i64)]) -> Vec<Vec<i64>> {
        let r = q.r();
        let mut out = Vec::new();
        let mut cur: Vec<i64> = bx.iter().map(|b| b.0).collect();
        loop {
            if q.eval(&cur) == 0 {
                out.push(cur.clone());
            }
            let mut k = r;
            loop {
                if k == 0 {
                    return out;
                }
                k -= 1;
                cur[k] += 1;
                if cur[k] <= bx[k].1 {
                    break;
                }
                cur[k] = bx[k].0;
            }
        }
    }

    #[test]
    fn enumeration_matches_brute_force() {
        let q = RaryForm::diagonal(&[1, 1, -1, -1]);
        let bx = symmetric_box(4, 5);
        let fast = enumerate_zeros(&q, &bx, DEFAULT_BUDGET).unwrap();
        assert_eq!(fast, brute(&q, &bx));
        let split = enumerate_zeros_split(&q, &bx, 2, DEFAULT_BUDGET).unwrap();
        let mut sorted = split.clone();
        sorted.sort();
        assert_eq!(sorted, fast);
        let mixed = RaryForm::from_triples(3, &[(0, 1, 3), (1, 2, -2), (2, 2, 1), (0, 0, -1)]).unwrap();
        let bx = vec![(-4, 6), (-3, 3), (0, 7)];
        assert_eq!(enumerate_zeros(&mixed, &bx, DEFAULT_BUDGET).unwrap(), brute(&mixed, &bx));
    }

    #[test]
    fn anisotropic_is_empty_and_reorder_is_requested() {
        let q = RaryForm::diagonal(&[1, 2, 3]);
        assert_eq!(enumerate_zeros(&q, &[(1, 9), (1, 9), (1, 9)], DEFAULT_BUDGET).unwrap().len(), 0);
        let q = RaryForm::from_triples(2, &[(0, 0, 1), (0, 1, 1)]).unwrap();
        assert!(enumerate_zeros(&q, &symmetric_box(2, 3), DEFAULT_BUDGET).is_err());
    }

    #[test]
    fn toy_count_matches_four_deep_brute_force() {
        let m = ModelSystem::shipped("toy").unwrap();
        let w = m.weight().unwrap().clone();
        let b = 10.0;
        let res = weighted_count(&m, &w, b, DEFAULT_BUDGET).unwrap();
        let f = m.binary_form();
        let bx = w.integer_box(b);
        let mut expect = 0.0;
        for x1 in bx[0].0..=bx[0].1 {
            for x2 in bx[1].0..=bx[1].1 {
                if m.q2.eval(&[x1, x2]) != 0 {
                    continue;
                }
                let wt = w.eval(&[x1 as f64 / b, x2 as f64 / b]);
                let c = m.q1.eval(&[x1, x2]) as i64;
                let lim = (c as f64).sqrt() as i64 + 1;
                for u in -lim..=lim {
                    for v in -lim..=lim {
                        if f.eval(u, v) == c {
                            expect += wt;
                        }
                    }
                }
            }
        }
        assert!(res.lhs > 0.0);
        assert!((res.lhs - expect).abs() < 1e-12, "{} vs {expect}", res.lhs);
        assert!((res.resum(|c| crate::repnum::rep_count(f, c) as f64) - res.lhs).abs() < 1e-10);
    }

    #[test]
    fn tiny_scale_counts_nothing() {
        let m = ModelSystem::shipped("quartic").unwrap();
        let w = m.weight().unwrap().clone();
        assert_eq!(weighted_count(&m, &w, 0.5, DEFAULT_BUDGET).unwrap().lhs, 0.0);
    }

    #[test]
    fn conjugate_character_conjugates_sum() {
        let m = ModelSystem::shipped("quartic").unwrap();
        let w = m.weight().unwrap().clone();
        let chi = &cusp_characters(-23).unwrap()[0];
        let a = cusp_twisted_sum(&m, &w, chi, 20.0, DEFAULT_BUDGET).unwrap();
        let b = cusp_twisted_sum(&m, &w, &chi.conjugate(), 20.0, DEFAULT_BUDGET).unwrap();
        assert!((a.value - b.value.conj()).norm() < 1e-9);
        let trivial = RepEngine::for_discriminant(-23).unwrap().characters.into_iter().find(|c| c.is_trivial()).unwrap();
        assert!(cusp_twisted_sum(&m, &w, &trivial, 20.0, DEFAULT_BUDGET).is_err());
    }
}
