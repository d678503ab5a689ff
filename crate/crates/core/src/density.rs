//! Local densities of the model system, the truncated singular series, and
//! `L(1, chi_D)`.
//!
//! Level densities are `sigma_l = p^{-l r} N(p^l)` with
//! `N(p^l) = sum_{x mod p^l, Q2(x) = 0} S(Q1(x); p^l)`. Splitting `x` into
//! primitive vectors and `x = p y` gives the exact recursion
//!
//! ```text
//! sigma_l = pi_l + p^{2-r} (sigma_{l-2} + e m_{l-2}),     m_j = mu_j + p^{2-r} m_{j-2}
//! ```
//!
//! where `pi_l` is the primitive part, `mu_j` the density of primitive zeros
//! of `Q2`, and `e = 2(1 - 1/p)` at split primes (else 0), from
//! `S(p^2 B; p^l) = p^2 S(B; p^{l-2}) + 2 phi(p^l) [split]`.

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{is_prime, kronecker, primes_up_to, rem, valuation};
use crate::classgroup::{hilbert_symbol, ClassGroup};
use crate::error::{charge, invalid, Result};
use crate::forms::BinaryQF;
use crate::model::ModelSystem;
use crate::quadform::{singular_points_mod_p, RaryForm};

pub type Q = Ratio<i128>;

fn pow128(p: i64, e: u32) -> i128 {
    (p as i128).pow(e)
}

fn check_prime_level(p: i64, ell: u32) -> Result<i64> {
    if p < 2 || !is_prime(p as u64) {
        return invalid(format!("{p} is not prime"));
    }
    if ell == 0 {
        return invalid("level must be at least 1");
    }
    p.checked_pow(ell).filter(|&q| q < 1 << 31).map_or_else(|| invalid(format!("{p}^{ell} is too large")), Ok)
}

/// `S(A; p^l) = #{(u, v) mod p^l : F(u, v) = A}` for every residue `A`, by enumeration.
pub fn s_binary_table(p: i64, ell: u32, d: i64) -> Result<Vec<u64>> {
    let q = check_prime_level(p, ell)?;
    let f = BinaryQF::principal(d)?;
    let mut out = vec![0u64; q as usize];
    for u in 0..q {
        for v in 0..q {
            let a = (f.a as i128 * (u * u) as i128 + f.b as i128 * (u * v) as i128 + f.c as i128 * (v * v) as i128)
                .rem_euclid(q as i128);
            out[a as usize] += 1;
        }
    }
    Ok(out)
}

pub fn s_binary_brute(a: i64, p: i64, ell: u32, d: i64) -> Result<u64> {
    let q = check_prime_level(p, ell)?;
    Ok(s_binary_table(p, ell, d)?[rem(a, q) as usize])
}

/// `S(A; p^l)` from the split / inert / ramified case formulas. For `p = 2`
/// with `D` even no closed form is used and the count is enumerated.
pub fn s_binary_closed(a: i64, p: i64, ell: u32, d: i64) -> Result<u64> {
    let q = check_prime_level(p, ell)?;
    crate::arith::check_fundamental(d)?;
    if p == 2 && d % 2 == 0 {
        return s_binary_brute(a, p, ell, d);
    }
    let a = rem(a, q);
    let pl = q as u64;
    let chi = kronecker(d, p);
    if a == 0 {
        return Ok(match chi {
            1 => pl + ell as u64 * (pl - pl / p as u64),
            -1 => (p as u64).pow(2 * (ell / 2)),
            _ => pl,
        });
    }
    let v = valuation(a, p);
    Ok(match chi {
        1 => (1 + v as u64) * (pl - pl / p as u64),
        -1 => {
            if v % 2 == 0 {
                pl + pl / p as u64
            } else {
                0
            }
        }
        _ => {
            if hilbert_symbol(a, d, p) == 1 {
                2 * pl
            } else {
                0
            }
        }
    })
}

/// Counts collected in one pass over `x mod p^l`.
#[derive(Clone, Debug, Default)]
struct Scan {
    /// `sum S(Q1(x))` over primitive `x` with `Q2(x) = 0`.
    prim_weighted: u128,
    prim_zeros: u128,
    /// `sum S(Q1(x))` over all `x` with `Q2(x) = 0`.
    all_weighted: u128,
    /// Zeros of `Q2` by `min(v_p(Q1(x)), l)`.
    vhist: Vec<u128>,
}

impl Scan {
    fn merge(mut self, o: Scan) -> Scan {
        self.prim_weighted += o.prim_weighted;
        self.prim_zeros += o.prim_zeros;
        self.all_weighted += o.all_weighted;
        for (a, b) in self.vhist.iter_mut().zip(o.vhist) {
            *a += b;
        }
        self
    }
}

fn scan(q1: &RaryForm, q2: &RaryForm, p: i64, ell: u32, stab: &[u64]) -> Scan {
    let r = q1.r();
    let q = p.pow(ell);
    let vtab: Vec<usize> =
        (0..q).map(|a| if a == 0 { ell as usize } else { valuation(a, p).min(ell) as usize }).collect();
    let empty = Scan { vhist: vec![0; ell as usize + 1], ..Default::default() };

    let line = |prefix: &[i64], acc: &mut Scan| {
        let (b1, s1, k1) = q1.line_coeffs(prefix, q);
        let (b2, s2, k2) = q2.line_coeffs(prefix, q);
        let prefix_div = prefix.iter().all(|&x| x % p == 0);
        let (mut v1, mut d1, c1) = (b1, (s1 + k1) % q, (2 * k1) % q);
        let (mut v2, mut d2, c2) = (b2, (s2 + k2) % q, (2 * k2) % q);
        for t in 0..q {
            if v2 == 0 {
                let s = stab[v1 as usize] as u128;
                acc.all_weighted += s;
                acc.vhist[vtab[v1 as usize]] += 1;
                if !prefix_div || t % p != 0 {
                    acc.prim_weighted += s;
                    acc.prim_zeros += 1;
                }
            }
            v1 = (v1 + d1) % q;
            d1 = (d1 + c1) % q;
            v2 = (v2 + d2) % q;
            d2 = (d2 + c2) % q;
        }
    };

    if r == 1 {
        let mut acc = empty;
        line(&[], &mut acc);
        return acc;
    }
    (0..q)
        .into_par_iter()
        .map(|x0| {
            let mut acc = empty.clone();
            let mut prefix = vec![0i64; r - 1];
            prefix[0] = x0;
            'outer: loop {
                line(&prefix, &mut acc);
                let mut i = r - 2;
                loop {
                    if i == 0 {
                        break 'outer;
                    }
                    prefix[i] += 1;
                    if prefix[i] < q {
                        break;
                    }
                    prefix[i] = 0;
                    i -= 1;
                }
            }
            acc
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(empty.clone(), Scan::merge)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DensityMethod {
    /// Odd `p`, `p` prime to `det Q2`, `V` smooth mod `p`: level-one counts lift exactly.
    Hensel,
    /// Primitive parts enumerated level by level.
    Brute,
}

/// Whether the primitive parts are constant from level one at `p`.
pub fn is_hensel_prime(model: &ModelSystem, p: i64) -> bool {
    p != 2 && model.q2.det_gram().rem_euclid(p as i128) != 0 && singular_points_mod_p(&model.q1, &model.q2, p) == 0
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelRecord {
    pub ell: u32,
    /// `sigma_l` as a float and as `num/den`.
    pub sigma: f64,
    pub sigma_exact: String,
    pub pi_exact: String,
    pub mu_exact: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct LocalDensityReport {
    pub p: i64,
    pub ell: u32,
    pub method: DensityMethod,
    /// Limit value from the recursion with the level-`l` primitive parts.
    pub value: f64,
    pub exact: Option<String>,
    /// Level-`l` value `p^{-l r} N(p^l)`.
    pub level_value: f64,
    /// Primitive parts agree at levels `l - 1` and `l` (always true for Hensel primes).
    pub stabilized: bool,
    pub levels: Vec<LevelRecord>,
}

fn q_to_string(x: &Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

fn q_to_f64(x: &Q) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

struct Primitive {
    pi: Q,
    mu: Q,
}

fn primitive_at(model: &ModelSystem, p: i64, ell: u32, budget: f64) -> Result<(Primitive, Scan)> {
    let r = model.r as u32;
    let q = p.pow(ell);
    charge(&format!("density scan p^l = {p}^{ell}"), (q as f64).powi(r as i32) + (q as f64).powi(2), budget)?;
    let stab = s_binary_table(p, ell, model.d)?;
    let s = scan(&model.q1, &model.q2, p, ell, &stab);
    let pi = Q::new(s.prim_weighted as i128, pow128(p, ell * r));
    let mu = Q::new(s.prim_zeros as i128, pow128(p, ell * (r - 1)));
    Ok((Primitive { pi, mu }, s))
}

fn split_excess(p: i64, d: i64) -> Q {
    if kronecker(d, p) == 1 {
        Q::new(2 * (p as i128 - 1), p as i128)
    } else {
        Q::from_integer(0)
    }
}

/// `p^{2-r}` as a rational.
fn shrink(p: i64, r: usize) -> Q {
    if r >= 2 {
        Q::new(1, pow128(p, r as u32 - 2))
    } else {
        Q::from_integer(p as i128)
    }
}

/// Levels `sigma_0..=sigma_l` from per-level primitive parts `prims[j-1]`.
fn run_recursion(p: i64, r: usize, d: i64, prims: &[&Primitive]) -> Result<(Vec<Q>, Vec<Q>)> {
    let s0 = Q::from_integer(s_binary_closed(0, p, 1, d)? as i128);
    let c = shrink(p, r);
    let e = split_excess(p, d);
    let mut sigma = vec![Q::from_integer(1)];
    let mut m = vec![Q::from_integer(1)];
    for (j, pr) in prims.iter().enumerate() {
        let l = j + 1;
        if l == 1 {
            sigma.push(pr.pi + s0 / pow128(p, r as u32));
            m.push(pr.mu + Q::new(1, pow128(p, r as u32 - 1)));
        } else {
            sigma.push(pr.pi + c * (sigma[l - 2] + e * m[l - 2]));
            m.push(pr.mu + c * m[l - 2]);
        }
    }
    Ok((sigma, m))
}

/// `lim sigma_l` when the primitive parts have settled at `pr`; needs `r >= 3`.
fn limit(p: i64, r: usize, d: i64, pr: &Primitive) -> Option<Q> {
    if r < 3 {
        return None;
    }
    let c = shrink(p, r);
    let one = Q::from_integer(1);
    let m_inf = pr.mu / (one - c);
    Some((pr.pi + c * split_excess(p, d) * m_inf) / (one - c))
}

/// `sigma_p` at level `l`, with the limit implied by the recursion.
pub fn local_density(p: i64, ell: u32, model: &ModelSystem, budget: f64) -> Result<LocalDensityReport> {
    check_prime_level(p, ell)?;
    let r = model.r;
    let hensel = is_hensel_prime(model, p);
    let mut prims = Vec::new();
    if hensel {
        prims.push(primitive_at(model, p, 1, budget)?.0);
    } else {
        for l in 1..=ell {
            prims.push(primitive_at(model, p, l, budget)?.0);
        }
    }
    let per_level: Vec<&Primitive> = (0..ell as usize).map(|j| if hensel { &prims[0] } else { &prims[j] }).collect();
    let (sigma, _) = run_recursion(p, r, model.d, &per_level)?;
    let last = per_level[ell as usize - 1];
    let stabilized = hensel || (ell >= 2 && { let prev = per_level[ell as usize - 2]; prev.pi == last.pi && prev.mu == last.mu });
    let lim = limit(p, r, model.d, last);
    let levels = (1..=ell as usize)
        .map(|l| LevelRecord {
            ell: l as u32,
            sigma: q_to_f64(&sigma[l]),
            sigma_exact: q_to_string(&sigma[l]),
            pi_exact: q_to_string(&per_level[l - 1].pi),
            mu_exact: q_to_string(&per_level[l - 1].mu),
        })
        .collect();
    Ok(LocalDensityReport {
        p,
        ell,
        method: if hensel { DensityMethod::Hensel } else { DensityMethod::Brute },
        value: lim.as_ref().map_or(q_to_f64(&sigma[ell as usize]), q_to_f64),
        exact: lim.as_ref().map(q_to_string),
        level_value: q_to_f64(&sigma[ell as usize]),
        stabilized,
        levels,
    })
}

/// Direct level value `p^{-l r} sum_x S(Q1(x); p^l)`.
pub fn level_density_direct(p: i64, ell: u32, model: &ModelSystem, budget: f64) -> Result<Q> {
    check_prime_level(p, ell)?;
    let (_, s) = primitive_at(model, p, ell, budget)?;
    Ok(Q::new(s.all_weighted as i128, pow128(p, ell * model.r as u32)))
}

/// The level-`l` truncation of the counting formula for `sigma_p`.
#[derive(Clone, Debug, Serialize)]
pub struct SserReport {
    pub p: i64,
    pub ell: u32,
    pub ramified: bool,
    /// `N~_l(e)` for `e = 0..=l` (for ramified `p`: admissible-count and zero-count).
    pub counts: Vec<String>,
    /// Truncation with the `A = 0` classes treated exactly; equals the direct count.
    pub corrected: String,
    /// The plain truncation of the limit formula.
    pub raw: String,
    pub direct: String,
    pub agree: bool,
}

/// Both routes to the level-`l` density: the valuation histogram of `Q1` on
/// zeros of `Q2` weighted by `chi_D(p^e)`, and the direct sum of `S(Q1(x); p^l)`.
pub fn sser_two_path(p: i64, ell: u32, model: &ModelSystem, budget: f64) -> Result<SserReport> {
    check_prime_level(p, ell)?;
    let r = model.r as u32;
    let d = model.d;
    let (_, s) = primitive_at(model, p, ell, budget)?;
    let direct = Q::new(s.all_weighted as i128, pow128(p, ell * r));
    let chi = kronecker(d, p) as i128;
    let pl = pow128(p, ell);
    let norm = Q::new(1, pow128(p, ell * (r - 1)));
    let s0 = s_binary_closed(0, p, ell, d)? as i128;
    let ramified = chi == 0;

    let (corrected, raw, counts) = if !ramified {
        // N~_l(e) = #{zeros with v_p(Q1) >= e}
        let mut ntil = vec![0i128; ell as usize + 1];
        let mut acc = 0i128;
        for e in (0..=ell as usize).rev() {
            acc += s.vhist[e] as i128;
            ntil[e] = acc;
        }
        let factor = Q::new(pl - chi * pl / p as i128, pl);
        let chi_pow = |e: usize| if chi == 1 || e % 2 == 0 { 1i128 } else { -1 };
        let raw_sum: i128 = (0..=ell as usize).map(|e| chi_pow(e) * ntil[e]).sum();
        let raw = factor * norm * raw_sum;
        let top = ntil[ell as usize];
        let body: i128 = (0..ell as usize).map(|e| chi_pow(e) * (ntil[e] - top)).sum();
        let corrected = factor * norm * body + Q::new(s0 * top, pow128(p, ell * r));
        (corrected, raw, ntil.iter().map(|x| x.to_string()).collect())
    } else if p == 2 {
        // no trusted closed form at 2 | D: the direct value stands in for both
        (direct, direct, vec![s.all_weighted.to_string()])
    } else {
        let (adm, zero) = admissible_counts(model, p, ell, budget)?;
        let corrected = norm * (2 * adm + zero);
        let raw = norm * 2 * adm;
        (corrected, raw, vec![adm.to_string(), zero.to_string()])
    };
    Ok(SserReport {
        p,
        ell,
        ramified,
        counts,
        corrected: q_to_string(&corrected),
        raw: q_to_string(&raw),
        direct: q_to_string(&direct),
        agree: corrected == direct,
    })
}

/// For odd `p | D`: zeros of `Q2` mod `p^l` with `Q1` a local norm of valuation
/// below `l`, and with `Q1 = 0`.
fn admissible_counts(model: &ModelSystem, p: i64, ell: u32, budget: f64) -> Result<(i128, i128)> {
    let q = p.pow(ell);
    // weight 1 on admissible residues, 0 elsewhere; residue 0 counted separately
    let adm: Vec<u64> = (0..q).map(|a| u64::from(a != 0 && hilbert_symbol(a, model.d, p) == 1)).collect();
    charge("admissible scan", (q as f64).powi(model.r as i32), budget)?;
    let s = scan(&model.q1, &model.q2, p, ell, &adm);
    Ok((s.all_weighted as i128, s.vhist[ell as usize] as i128))
}

#[derive(Clone, Debug, Serialize)]
pub struct SeriesFactor {
    pub p: i64,
    pub method: DensityMethod,
    pub levels_used: u32,
    pub value: f64,
    pub exact: Option<String>,
    pub stabilized: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SingularSeries {
    pub cutoff: i64,
    pub product: f64,
    /// Every factor exact (Hensel prime or stabilized primitive parts).
    pub certified: bool,
    pub factors: Vec<SeriesFactor>,
    /// Size of one further factor's deviation from 1, `P^{-(r/2 - 1)}`; reported, not asserted.
    pub tail_heuristic: f64,
}

/// Operations allowed per brute-force prime when searching for stabilization.
pub const DEFAULT_LEVEL_BUDGET: f64 = 5.0e7;

/// `sigma_p` for one prime, raising the level at non-Hensel primes until the
/// primitive parts repeat or the next level exceeds `level_budget`.
pub fn series_factor(model: &ModelSystem, p: i64, level_budget: f64) -> Result<SeriesFactor> {
    let r = model.r;
    if is_hensel_prime(model, p) {
        let rep = local_density(p, 1, model, level_budget.max((p as f64).powi(r as i32) * 2.0))?;
        return Ok(SeriesFactor { p, method: DensityMethod::Hensel, levels_used: 1, value: rep.value, exact: rep.exact, stabilized: true });
    }
    let mut prev: Option<Primitive> = None;
    let mut ell = 1;
    loop {
        let cur = primitive_at(model, p, ell, level_budget)?.0;
        let settled = prev.as_ref().is_some_and(|pv| pv.pi == cur.pi && pv.mu == cur.mu);
        let next_cost = (p as f64).powi(((ell + 1) * r as u32) as i32);
        if settled || next_cost > level_budget {
            let lim = limit(p, r, model.d, &cur);
            return Ok(SeriesFactor {
                p,
                method: DensityMethod::Brute,
                levels_used: ell,
                value: lim.as_ref().map_or(f64::NAN, q_to_f64),
                exact: lim.as_ref().map(q_to_string),
                stabilized: settled,
            });
        }
        prev = Some(cur);
        ell += 1;
    }
}

/// `prod_{p <= P} sigma_p`.
pub fn singular_series(model: &ModelSystem, cutoff: i64, level_budget: f64) -> Result<SingularSeries> {
    if model.r < 3 {
        return invalid("the singular series needs r >= 3 (the local densities diverge otherwise)");
    }
    if cutoff < 2 {
        return invalid("prime cutoff must be at least 2");
    }
    let primes: Vec<i64> = primes_up_to(cutoff as u64).into_iter().map(|p| p as i64).collect();
    let factors: Vec<SeriesFactor> =
        primes.iter().map(|&p| series_factor(model, p, level_budget)).collect::<Result<_>>()?;
    let product = factors.iter().map(|f| f.value).product();
    Ok(SingularSeries {
        cutoff,
        product,
        certified: factors.iter().all(|f| f.stabilized),
        factors,
        tail_heuristic: (cutoff as f64).powf(-(model.r as f64 / 2.0 - 1.0)),
    })
}

/// `L(1, chi_D)` by summing whole periods and correcting the tail with the
/// mean of the periodic partial sums.
pub fn dirichlet_l1(d: i64, terms: u64) -> Result<f64> {
    crate::arith::check_fundamental(d)?;
    if terms < 1000 {
        return invalid(format!("need at least 1000 terms, got {terms}"));
    }
    let k = d.unsigned_abs();
    let chi: Vec<i32> = (0..k as i64).map(|n| kronecker(d, n)).collect();
    let periods = terms.div_ceil(k);
    let n_total = periods * k;
    let mut sum = crate::arith::RSum::default();
    for n in 1..=n_total {
        let c = chi[(n % k) as usize];
        if c != 0 {
            sum.add(c as f64 / n as f64);
        }
    }
    // sum_{n > N} chi(n)/n = sum_{n > N} A(n) / (n (n + 1)) with A periodic and A(N) = 0
    let mut a = 0i64;
    let mut mean = 0.0;
    for n in 1..=k {
        a += chi[(n % k) as usize] as i64;
        mean += a as f64;
    }
    mean /= k as f64;
    Ok(sum.value() + mean / (n_total as f64 + 1.0))
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassNumberCheck {
    pub d: i64,
    pub h: u64,
    pub w: u64,
    pub l_value: f64,
    pub formula: f64,
    pub abs_diff: f64,
    pub pass: bool,
}

pub const CLASS_NUMBER_TOL: f64 = 1e-3;

pub fn class_number_formula_check(d: i64, terms: u64) -> Result<ClassNumberCheck> {
    let g = ClassGroup::new(d)?;
    let l_value = dirichlet_l1(d, terms)?;
    let formula = 2.0 * std::f64::consts::PI * g.h as f64 / (g.w as f64 * (d.abs() as f64).sqrt());
    let abs_diff = (l_value - formula).abs();
    Ok(ClassNumberCheck { d, h: g.h as u64, w: g.w as u64, l_value, formula, abs_diff, pass: abs_diff < CLASS_NUMBER_TOL })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::DEFAULT_BUDGET;

    #[test]
    fn s_binary_examples() {
        assert_eq!(s_binary_closed(4, 2, 3, -23).unwrap(), 12);
        assert_eq!(s_binary_brute(4, 2, 3, -23).unwrap(), 12);
        assert_eq!(s_binary_closed(5, 5, 2, -23).unwrap(), 0);
        assert_eq!(s_binary_closed(1, 23, 1, -23).unwrap(), 46);
        assert!(s_binary_closed(1, 4, 1, -23).is_err());
    }

    #[test]
    fn s_binary_closed_matches_brute_small() {
        for d in [-23i64, -31, -4, -20, -15, -7, -8] {
            for p in [2i64, 3, 5, 7] {
                for ell in 1..=3u32 {
                    let tab = s_binary_table(p, ell, d).unwrap();
                    for a in 0..p.pow(ell) {
                        assert_eq!(s_binary_closed(a, p, ell, d).unwrap(), tab[a as usize], "D={d} p={p} l={ell} A={a}");
                    }
                }
            }
        }
    }

    #[test]
    fn recursion_reproduces_direct_levels() {
        for name in ["quartic", "ternary"] {
            let m = ModelSystem::shipped(name).unwrap();
            for p in [2i64, 3, 5, 7] {
                let maxl = if p == 2 { 4 } else if p == 3 { 3 } else { 2 };
                let prims: Vec<Primitive> = (1..=maxl).map(|l| primitive_at(&m, p, l, DEFAULT_BUDGET).unwrap().0).collect();
                let refs: Vec<&Primitive> = prims.iter().collect();
                let (sigma, _) = run_recursion(p, m.r, m.d, &refs).unwrap();
                for l in 1..=maxl {
                    let direct = level_density_direct(p, l, &m, DEFAULT_BUDGET).unwrap();
                    assert_eq!(sigma[l as usize], direct, "{name} p={p} l={l}");
                }
            }
        }
    }

    #[test]
    fn hensel_primitive_parts_are_constant() {
        let m = ModelSystem::shipped("quartic").unwrap();
        for p in [5i64, 7] {
            assert!(is_hensel_prime(&m, p));
            let a = primitive_at(&m, p, 1, DEFAULT_BUDGET).unwrap().0;
            let b = primitive_at(&m, p, 2, DEFAULT_BUDGET).unwrap().0;
            assert_eq!((a.pi, a.mu), (b.pi, b.mu), "p={p}");
        }
        assert!(!is_hensel_prime(&m, 2));
        assert!(!is_hensel_prime(&m, 3));
        // 23 divides D but the primitive parts still lift
        assert!(is_hensel_prime(&m, 23));
    }

    #[test]
    fn two_paths_agree() {
        let m = ModelSystem::shipped("quartic").unwrap();
        for p in [3i64, 5, 7, 2, 23] {
            let ells: &[u32] = if p == 23 { &[1] } else { &[1, 2] };
            for &l in ells {
                let rep = sser_two_path(p, l, &m, DEFAULT_BUDGET).unwrap();
                assert!(rep.agree, "{rep:?}");
            }
        }
    }

    #[test]
    fn local_obstruction_gives_zero() {
        // x^2 + y^2 - 3 z^2 has no nontrivial zero over Q_3
        let m = ModelSystem::new(
            "obstructed",
            -23,
            RaryForm::diagonal(&[1, 1, 1]),
            RaryForm::diagonal(&[1, 1, -3]),
            None,
        )
        .unwrap();
        let f = series_factor(&m, 3, DEFAULT_LEVEL_BUDGET).unwrap();
        assert_eq!(f.value, 0.0);
        assert!(f.stabilized);
    }

    #[test]
    fn series_factors_tend_to_one() {
        let m = ModelSystem::shipped("quartic").unwrap();
        let s = singular_series(&m, 50, DEFAULT_LEVEL_BUDGET).unwrap();
        assert!(s.certified, "{s:?}");
        assert!(s.product > 0.0);
        let dev = |lo: i64, hi: i64| {
            s.factors.iter().filter(|f| f.p >= lo && f.p <= hi).map(|f| (f.value - 1.0).abs()).fold(0.0, f64::max)
        };
        assert!(dev(29, 50) < dev(5, 13));
    }

    #[test]
    fn l_values() {
        let l = dirichlet_l1(-4, 100_000).unwrap();
        assert!((l - std::f64::consts::FRAC_PI_4).abs() < 1e-8, "{l}");
        let l = dirichlet_l1(-23, 100_000).unwrap();
        assert!((l - 3.0 * std::f64::consts::PI / 23f64.sqrt()).abs() < 1e-8);
        let l = dirichlet_l1(-3, 100_000).unwrap();
        assert!((l - std::f64::consts::PI / (3.0 * 3f64.sqrt())).abs() < 1e-8);
        assert!(dirichlet_l1(-23, 10).is_err());
    }
}
