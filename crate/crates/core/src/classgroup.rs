//! The form class group of a negative fundamental discriminant, its
//! characters, genus structure and admissibility of integers.

use num_complex::Complex64;
use serde::Serialize;
use std::collections::HashMap;

use crate::arith::{self, e, factorize, gcd, kronecker, valuation};
use crate::error::{invalid, Result};
use crate::forms::{compose, reduce_form, reduced_forms, BinaryQF};
use crate::repnum::rep_count;
use crate::smith::smith;

/// Largest `|D|` accepted by default.
pub const DEFAULT_DISC_BOUND: i64 = 1_000_000;

#[derive(Clone, Debug, Serialize)]
pub struct ClassGroup {
    pub discriminant: i64,
    pub classes: Vec<BinaryQF>,
    pub composition_table: Vec<Vec<usize>>,
    /// Invariant factors `n_1 | n_2 | ...`, all greater than one.
    pub invariants: Vec<u64>,
    pub h: usize,
    pub mu: u32,
    pub w: u32,
    #[serde(skip)]
    index: HashMap<BinaryQF, usize>,
    /// Exponent vector of each class over `gens`.
    #[serde(skip)]
    coords: Vec<Vec<i64>>,
    #[serde(skip)]
    relations: Vec<Vec<i64>>,
}

/// A character of the class group with values `e(numerators[c] / denominator)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassCharacter {
    pub discriminant: i64,
    pub numerators: Vec<u64>,
    pub denominator: u64,
}

impl ClassCharacter {
    pub fn value(&self, class: usize) -> Complex64 {
        e(self.numerators[class] as i64, self.denominator as i64)
    }

    pub fn order(&self) -> u64 {
        let g = self
            .numerators
            .iter()
            .fold(self.denominator as i64, |g, &n| gcd(g, n as i64)) as u64;
        self.denominator / g
    }

    pub fn is_trivial(&self) -> bool {
        self.numerators.iter().all(|&n| n == 0)
    }

    pub fn conjugate(&self) -> Self {
        let den = self.denominator;
        Self {
            discriminant: self.discriminant,
            numerators: self.numerators.iter().map(|&n| (den - n) % den).collect(),
            denominator: den,
        }
    }
}

impl ClassGroup {
    pub fn new(d: i64) -> Result<Self> {
        Self::with_bound(d, DEFAULT_DISC_BOUND)
    }

    pub fn with_bound(d: i64, bound: i64) -> Result<Self> {
        if d >= 0 {
            return invalid(format!("D = {d} must be negative"));
        }
        arith::check_fundamental(d)?;
        if -d > bound {
            return invalid(format!("|D| = {} exceeds the configured bound {bound}", -d));
        }
        let classes = reduced_forms(d)?;
        let h = classes.len();
        let index: HashMap<BinaryQF, usize> = classes.iter().enumerate().map(|(i, f)| (*f, i)).collect();
        let mut table = vec![vec![0usize; h]; h];
        for i in 0..h {
            for j in i..h {
                let k = index[&compose(classes[i], classes[j])?];
                table[i][j] = k;
                table[j][i] = k;
            }
        }
        let mu = factorize(d.unsigned_abs()).len() as u32;
        let w = match d {
            -3 => 6,
            -4 => 4,
            _ => 2,
        };
        let mut g = Self {
            discriminant: d,
            classes,
            composition_table: table,
            invariants: Vec::new(),
            h,
            mu,
            w,
            index,
            coords: Vec::new(),
            relations: Vec::new(),
        };
        g.check_group_law()?;
        g.decompose();
        Ok(g)
    }

    fn check_group_law(&self) -> Result<()> {
        let h = self.h;
        let t = &self.composition_table;
        for i in 0..h {
            if t[0][i] != i {
                return invalid(format!("principal form is not an identity for D = {}", self.discriminant));
            }
            let inv = self.index[&self.classes[i].inverse()?];
            if t[i][inv] != 0 {
                return invalid(format!("inverse law fails for D = {}", self.discriminant));
            }
        }
        // exhaustive associativity for small groups, a fixed stride otherwise
        let step = if h <= 100 { 1 } else { h / 37 + 1 };
        for i in (0..h).step_by(step) {
            for j in (0..h).step_by(step) {
                for k in (0..h).step_by(step) {
                    if t[t[i][j]][k] != t[i][t[j][k]] {
                        return invalid(format!("associativity fails for D = {}", self.discriminant));
                    }
                }
            }
        }
        Ok(())
    }

    /// Greedy generating set with a triangular relation matrix, then Smith form.
    fn decompose(&mut self) {
        let h = self.h;
        let mut coords: Vec<Option<Vec<usize>>> = vec![None; h];
        coords[0] = Some(Vec::new());
        let mut members = vec![0usize];
        let mut gens: Vec<usize> = Vec::new();
        let mut relations: Vec<Vec<i64>> = Vec::new();
        for cand in 0..h {
            if coords[cand].is_some() {
                continue;
            }
            let k = gens.len();
            // relative order of cand over the current subgroup
            let mut power = cand;
            let mut e = 1usize;
            while coords[power].is_none() {
                power = self.composition_table[power][cand];
                e += 1;
            }
            let base = coords[power].clone().unwrap();
            let mut rel = vec![0i64; k + 1];
            for (j, &x) in base.iter().enumerate() {
                rel[j] = -(x as i64);
            }
            rel[k] = e as i64;
            for r in relations.iter_mut() {
                r.push(0);
            }
            relations.push(rel);
            // extend: new members are g^i * old for 1 <= i < e
            let old = members.clone();
            let mut gi = cand;
            for i in 1..e {
                for &m in &old {
                    let x = self.composition_table[gi][m];
                    let mut c = coords[m].clone().unwrap();
                    c.resize(k, 0);
                    c.push(i);
                    coords[x] = Some(c);
                    members.push(x);
                }
                gi = self.composition_table[gi][cand];
            }
            for m in &old {
                if let Some(c) = coords[*m].as_mut() {
                    c.resize(k + 1, 0);
                }
            }
            gens.push(cand);
        }
        let ngen = gens.len();
        self.coords = coords
            .into_iter()
            .map(|c| {
                let mut c: Vec<i64> = c.unwrap().into_iter().map(|x| x as i64).collect();
                c.resize(ngen, 0);
                c
            })
            .collect();
        self.relations = relations;
        if ngen == 0 {
            self.invariants = Vec::new();
            return;
        }
        let s = smith(&self.relations);
        self.invariants = s.diag.iter().filter(|&&d| d > 1).map(|&d| d as u64).collect();
    }

    pub fn class_index(&self, f: BinaryQF) -> Result<usize> {
        let g = reduce_form(f)?;
        self.index
            .get(&g)
            .copied()
            .ok_or_else(|| crate::error::Error::Invalid(format!("{f} is not a class of D = {}", self.discriminant)))
    }

    pub fn principal(&self) -> BinaryQF {
        self.classes[0]
    }

    pub fn is_cyclic(&self) -> bool {
        self.invariants.len() <= 1
    }

    /// Indices of the classes in the principal genus (the squares).
    pub fn squares(&self) -> Vec<usize> {
        let mut s: Vec<usize> = (0..self.h).map(|i| self.composition_table[i][i]).collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    /// All `h` characters; the trivial character comes first.
    pub fn characters(&self) -> Vec<ClassCharacter> {
        if self.relations.is_empty() {
            return vec![ClassCharacter { discriminant: self.discriminant, numerators: vec![0], denominator: 1 }];
        }
        let s = smith(&self.relations);
        let k = s.diag.len();
        let exponent = *s.diag.last().unwrap();
        let mut out = Vec::with_capacity(self.h);
        let mut t = vec![0i128; k];
        loop {
            // theta_j * exponent = sum_i V[j][i] t_i (exponent / s_i)
            let theta: Vec<i128> = (0..k)
                .map(|j| (0..k).map(|i| s.v[j][i] * t[i] * (exponent / s.diag[i])).sum::<i128>())
                .collect();
            let numerators = self
                .coords
                .iter()
                .map(|x| {
                    let a: i128 = x.iter().zip(&theta).map(|(&xi, th)| xi as i128 * th).sum();
                    a.rem_euclid(exponent) as u64
                })
                .collect();
            out.push(ClassCharacter { discriminant: self.discriminant, numerators, denominator: exponent as u64 });
            // odometer over t_i in [0, s_i)
            let mut i = 0;
            loop {
                if i == k {
                    return out;
                }
                t[i] += 1;
                if t[i] < s.diag[i] {
                    break;
                }
                t[i] = 0;
                i += 1;
            }
        }
    }

    /// Class count check: `#{classes}` should be `h` and the square subgroup
    /// should have index `2^(mu-1)`.
    pub fn genus_index(&self) -> usize {
        self.h / self.squares().len()
    }
}

/// `true` iff some form in the principal genus represents `m`.
pub fn is_admissible(m: i64, group: &ClassGroup) -> Result<bool> {
    if m <= 0 {
        return invalid(format!("admissibility is defined for positive integers, got {m}"));
    }
    for c in group.squares() {
        if rep_count(group.classes[c], m) > 0 {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Hilbert symbol `(a, b)_p` for nonzero integers.
pub fn hilbert_symbol(a: i64, b: i64, p: i64) -> i32 {
    let (alpha, beta) = (valuation(a, p), valuation(b, p));
    let u = a / p.pow(alpha);
    let v = b / p.pow(beta);
    if p == 2 {
        let eps = |x: i64| ((x.rem_euclid(4) - 1) / 2) as u32 & 1;
        let omega = |x: i64| {
            let r = x.rem_euclid(8);
            u32::from(r == 3 || r == 5)
        };
        let ex = eps(u) * eps(v) + alpha * omega(v) + beta * omega(u);
        if ex % 2 == 0 {
            1
        } else {
            -1
        }
    } else {
        let mut s = if (alpha * beta) % 2 == 1 && p % 4 == 3 { -1 } else { 1 };
        if beta % 2 == 1 {
            s *= kronecker(u, p);
        }
        if alpha % 2 == 1 {
            s *= kronecker(v, p);
        }
        s
    }
}

/// Local criterion: `m` is a norm from `Q_p(sqrt D)` at every prime.
pub fn is_admissible_local(m: i64, d: i64) -> Result<bool> {
    if m <= 0 {
        return invalid(format!("admissibility is defined for positive integers, got {m}"));
    }
    let mut primes: Vec<u64> = factorize(m as u64).into_iter().map(|(p, _)| p).collect();
    primes.extend(factorize(d.unsigned_abs()).into_iter().map(|(p, _)| p));
    primes.push(2);
    primes.sort_unstable();
    primes.dedup();
    Ok(primes.into_iter().all(|p| hilbert_symbol(m, d, p as i64) == 1))
}

#[derive(Clone, Debug, Serialize)]
pub struct AdmissibilityReport {
    pub m: i64,
    pub discriminant: i64,
    pub admissible: bool,
    pub local_check: bool,
    /// Set for even `D` with `gcd(m, 4) > 1`, where the 2-adic theory is thin.
    pub flagged_even: bool,
}

pub fn admissibility_report(m: i64, group: &ClassGroup) -> Result<AdmissibilityReport> {
    let admissible = is_admissible(m, group)?;
    let local_check = is_admissible_local(m, group.discriminant)?;
    Ok(AdmissibilityReport {
        m,
        discriminant: group.discriminant,
        admissible,
        local_check,
        flagged_even: group.discriminant % 2 == 0 && gcd(m, 4) > 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_discriminant_groups() {
        let g = ClassGroup::new(-4).unwrap();
        assert_eq!((g.h, g.w), (1, 4));
        let g = ClassGroup::new(-23).unwrap();
        assert_eq!(g.h, 3);
        assert!(g.is_cyclic());
        assert_eq!(g.invariants, vec![3]);
        let g = ClassGroup::new(-20).unwrap();
        assert_eq!(g.h, 2);
        assert_eq!(g.mu, 2);
        assert!(ClassGroup::new(23).is_err());
        assert!(ClassGroup::new(-12).is_err());
    }

    #[test]
    fn noncyclic_structure() {
        // D = -420 has class group (Z/2)^3
        let g = ClassGroup::new(-420).unwrap();
        assert_eq!(g.h, 8);
        assert_eq!(g.invariants, vec![2, 2, 2]);
        // D = -260: Z/2 x Z/4
        let g = ClassGroup::new(-260).unwrap();
        assert_eq!(g.invariants, vec![2, 4]);
    }

    fn check_characters(d: i64) {
        let g = ClassGroup::new(d).unwrap();
        let chars = g.characters();
        assert_eq!(chars.len(), g.h);
        for chi in &chars {
            for i in 0..g.h {
                for j in 0..g.h {
                    let k = g.composition_table[i][j];
                    let lhs = chi.numerators[k];
                    let rhs = (chi.numerators[i] + chi.numerators[j]) % chi.denominator;
                    assert_eq!(lhs, rhs, "D={d}");
                }
            }
        }
        for (a, ca) in chars.iter().enumerate() {
            for (b, cb) in chars.iter().enumerate() {
                let s: Complex64 = (0..g.h).map(|c| ca.value(c) * cb.value(c).conj()).sum();
                let expect = if a == b { g.h as f64 } else { 0.0 };
                assert!((s - Complex64::new(expect, 0.0)).norm() < 1e-10, "D={d}");
            }
        }
        let real = chars.iter().filter(|c| c.order() <= 2).count();
        assert_eq!(real, 1 << (g.mu - 1), "D={d}");
        assert_eq!(g.genus_index(), 1 << (g.mu - 1), "D={d}");
    }

    #[test]
    fn characters_orthogonal_and_genus_count() {
        for d in [-3i64, -4, -20, -23, -47, -56, -84, -260, -420, -1155, -3315] {
            check_characters(d);
        }
    }

    #[test]
    fn group_law_for_all_small_discriminants() {
        for d in (-1500..0).rev() {
            if arith::is_fundamental(d) {
                check_characters(d);
            }
        }
    }

    #[test]
    fn admissibility_examples() {
        let g = ClassGroup::new(-23).unwrap();
        assert!(is_admissible(1, &g).unwrap());
        assert!(is_admissible(2, &g).unwrap());
        assert!(is_admissible(0, &g).is_err());
        let g = ClassGroup::new(-4).unwrap();
        assert!(!is_admissible(3, &g).unwrap());
    }

    #[test]
    fn admissibility_agrees_with_local_symbols() {
        for d in [-3i64, -4, -8, -20, -23, -24, -31, -40, -47, -84, -120, -231, -420] {
            let g = ClassGroup::new(d).unwrap();
            for m in 1..2000 {
                assert_eq!(
                    is_admissible(m, &g).unwrap(),
                    is_admissible_local(m, d).unwrap(),
                    "D={d} m={m}"
                );
            }
        }
    }

    #[test]
    fn hilbert_symbol_known_values() {
        assert_eq!(hilbert_symbol(-1, -1, 2), -1);
        assert_eq!(hilbert_symbol(2, 3, 3), -1);
        assert_eq!(hilbert_symbol(5, 5, 5), 1);
        assert_eq!(hilbert_symbol(2, 5, 2), -1);
        assert_eq!(hilbert_symbol(3, 7, 2), -1);
    }
}
