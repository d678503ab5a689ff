//! Exact integer arithmetic, quadratic characters, and the basic
//! exponential sums (quadratic Gauss sums, Ramanujan sums).

use num_complex::Complex64;
use std::f64::consts::TAU;

use crate::error::{invalid, Result};

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a as i64
}

pub fn lcm(a: i64, b: i64) -> i64 {
    if a == 0 || b == 0 {
        return 0;
    }
    (a / gcd(a, b) * b).abs()
}

/// Extended Euclid: returns `(g, x, y)` with `a*x + b*y = g = gcd(a, b) >= 0`.
pub fn egcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1) = (a as i128, b as i128);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (r0, s0, t0) = (-r0, -s0, -t0);
    }
    (r0 as i64, s0 as i64, t0 as i64)
}

/// Least nonnegative residue.
#[inline]
pub fn rem(a: i64, m: i64) -> i64 {
    a.rem_euclid(m)
}

#[inline]
pub fn rem128(a: i128, m: i64) -> i64 {
    a.rem_euclid(m as i128) as i64
}

pub fn mul_mod(a: i64, b: i64, m: i64) -> i64 {
    rem128(a as i128 * b as i128, m)
}

pub fn pow_mod(base: i64, mut exp: u64, m: i64) -> i64 {
    if m == 1 {
        return 0;
    }
    let mut b = rem(base, m);
    let mut acc = 1i64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, if it exists. `mod_inv(_, 1) == Some(0)`.
pub fn mod_inv(a: i64, m: i64) -> Option<i64> {
    if m == 1 {
        return Some(0);
    }
    let (g, x, _) = egcd(rem(a, m), m);
    (g == 1).then(|| rem(x, m))
}

/// Chinese remaindering of `x = r_i mod m_i`; moduli need not be coprime.
pub fn crt(congruences: &[(i64, i64)]) -> Option<(i64, i64)> {
    let mut acc = (0i64, 1i64);
    for &(r, m) in congruences {
        let (r0, m0) = acc;
        let (g, p, _) = egcd(m0, m);
        if (r - r0) % g != 0 {
            return None;
        }
        let l = m0 / g * m;
        let t = rem128((r - r0) as i128 / g as i128 * p as i128, m / g);
        acc = (rem128(r0 as i128 + m0 as i128 * t as i128, l), l);
    }
    Some(acc)
}

pub fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u64;
    while x.checked_mul(x).is_none_or(|s| s > n) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).is_some_and(|s| s <= n) {
        x += 1;
    }
    x
}

/// Square root of `n` if `n` is a perfect square.
pub fn exact_sqrt(n: i64) -> Option<i64> {
    if n < 0 {
        return None;
    }
    let s = isqrt(n as u64) as i64;
    (s * s == n).then_some(s)
}

/// Trial-division factorization, primes ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Primes `p <= n` by a sieve.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    let n = n as usize;
    if n < 2 {
        return Vec::new();
    }
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            for j in (i * i..=n).step_by(i) {
                sieve[j] = false;
            }
        }
        i += 1;
    }
    (0..=n).filter(|&i| sieve[i]).map(|i| i as u64).collect()
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut ds = vec![1u64];
    for (p, e) in factorize(n) {
        let base = ds.clone();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            ds.extend(base.iter().map(|d| d * pk));
        }
    }
    ds.sort_unstable();
    ds
}

pub fn mobius(n: u64) -> i64 {
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n).iter().fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

/// p-adic valuation of a nonzero integer.
pub fn valuation(n: i64, p: i64) -> u32 {
    debug_assert!(n != 0 && p > 1);
    let mut n = n;
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// p-adic valuation of `a` capped at `cap` (so `a = 0` gives `cap`).
pub fn valuation_capped(a: i64, p: i64, cap: u32) -> u32 {
    if a == 0 {
        return cap;
    }
    valuation(a, p).min(cap)
}

pub fn squarefree(n: u64) -> bool {
    factorize(n).iter().all(|&(_, e)| e == 1)
}

/// Jacobi symbol `(a|n)` for odd positive `n`.
pub fn jacobi(a: i64, n: i64) -> i32 {
    assert!(n > 0 && n % 2 == 1, "jacobi symbol needs odd positive modulus");
    kronecker(a, n)
}

/// Kronecker symbol `(a|b)` for arbitrary integers.
pub fn kronecker(a: i64, b: i64) -> i32 {
    const TAB2: [i32; 8] = [0, 1, 0, -1, 0, -1, 0, 1];
    if b == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    if a % 2 == 0 && b % 2 == 0 {
        return 0;
    }
    let (mut a, mut b) = (a as i128, b as i128);
    let mut v = 0;
    while b % 2 == 0 {
        v += 1;
        b /= 2;
    }
    let mut k = if v % 2 == 0 { 1 } else { TAB2[(a & 7) as usize] };
    if b < 0 {
        b = -b;
        if a < 0 {
            k = -k;
        }
    }
    loop {
        if a == 0 {
            return if b == 1 { k } else { 0 };
        }
        v = 0;
        while a % 2 == 0 {
            v += 1;
            a /= 2;
        }
        if v % 2 == 1 {
            k *= TAB2[(b & 7) as usize];
        }
        if a & b & 2 != 0 {
            k = -k;
        }
        let r = a.abs();
        a = b % r;
        b = r;
    }
}

/// Checks that `d` is a fundamental discriminant, naming the failing condition.
pub fn check_fundamental(d: i64) -> Result<()> {
    if d == 0 || d == 1 {
        return invalid(format!("D = {d} is not a fundamental discriminant (D must not be 0 or 1)"));
    }
    match rem(d, 4) {
        1 => {
            if !squarefree(d.unsigned_abs()) {
                return invalid(format!("D = {d} is 1 mod 4 but not squarefree"));
            }
        }
        0 => {
            let m = d / 4;
            if !matches!(rem(m, 4), 2 | 3) {
                return invalid(format!("D = {d} = 4m needs m = 2 or 3 mod 4, got m = {m}"));
            }
            if !squarefree(m.unsigned_abs()) {
                return invalid(format!("D = {d} = 4m with m = {m} not squarefree"));
            }
        }
        _ => return invalid(format!("D = {d} is 2 or 3 mod 4")),
    }
    Ok(())
}

pub fn is_fundamental(d: i64) -> bool {
    check_fundamental(d).is_ok()
}

/// A real character attached to a fundamental discriminant, or to an odd
/// squarefree modulus `N` through `N* = (-1)^((N-1)/2) N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadCharacter {
    pub modulus: u64,
    pub twisted_modulus: i64,
}

impl QuadCharacter {
    pub fn from_discriminant(d: i64) -> Result<Self> {
        check_fundamental(d)?;
        Ok(Self { modulus: d.unsigned_abs(), twisted_modulus: d })
    }

    /// `chi_N` for odd positive `N`.
    pub fn odd_modulus(n: u64) -> Result<Self> {
        if n == 0 || n % 2 == 0 {
            return invalid(format!("chi_N needs odd N, got {n}"));
        }
        let star = if n % 4 == 1 { n as i64 } else { -(n as i64) };
        Ok(Self { modulus: n, twisted_modulus: star })
    }

    pub fn value(&self, a: i64) -> i32 {
        if self.modulus == 1 {
            return 1;
        }
        kronecker(self.twisted_modulus, a)
    }
}

/// `chi_D(n)`, the Kronecker symbol `(D|n)` for fundamental `D`.
pub fn kronecker_chi(d: i64, n: i64) -> Result<i32> {
    Ok(QuadCharacter::from_discriminant(d)?.value(n))
}

/// `e(num/den) = exp(2 pi i num/den)` from the reduced residue.
pub fn e(num: i64, den: i64) -> Complex64 {
    debug_assert!(den > 0);
    let mut r = rem(num, den);
    if r == 0 {
        return Complex64::new(1.0, 0.0);
    }
    if 2 * r > den {
        r -= den;
    }
    let t = TAU * (r as f64) / (den as f64);
    Complex64::new(t.cos(), t.sin())
}

/// Precomputed `e(j/q)` for `0 <= j < q`.
#[derive(Clone, Debug)]
pub struct RootTable {
    q: i64,
    roots: Vec<Complex64>,
}

impl RootTable {
    pub fn new(q: i64) -> Self {
        Self { q, roots: (0..q).map(|j| e(j, q)).collect() }
    }

    #[inline]
    pub fn get(&self, j: i64) -> Complex64 {
        self.roots[rem(j, self.q) as usize]
    }

    #[inline]
    pub fn at(&self, j: usize) -> Complex64 {
        self.roots[j]
    }

    pub fn modulus(&self) -> i64 {
        self.q
    }
}

/// Neumaier-compensated complex accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct CSum {
    re: f64,
    im: f64,
    cre: f64,
    cim: f64,
}

#[inline]
fn neumaier(sum: &mut f64, comp: &mut f64, x: f64) {
    let t = *sum + x;
    if sum.abs() >= x.abs() {
        *comp += (*sum - t) + x;
    } else {
        *comp += (x - t) + *sum;
    }
    *sum = t;
}

impl CSum {
    #[inline]
    pub fn add(&mut self, z: Complex64) {
        neumaier(&mut self.re, &mut self.cre, z.re);
        neumaier(&mut self.im, &mut self.cim, z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re + self.cre, self.im + self.cim)
    }
}

/// Neumaier-compensated real accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct RSum {
    s: f64,
    c: f64,
}

impl RSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        neumaier(&mut self.s, &mut self.c, x);
    }

    pub fn value(&self) -> f64 {
        self.s + self.c
    }
}

/// `sum_{t mod p} e(a t^2 / p)` by direct summation.
pub fn gauss_sum_quadratic(a: i64, p: i64) -> Result<Complex64> {
    if p < 3 || !is_prime(p as u64) {
        return invalid(format!("Gauss sum needs an odd prime modulus, got {p}"));
    }
    if rem(a, p) == 0 {
        return invalid(format!("Gauss sum needs p not dividing a (a = {a}, p = {p})"));
    }
    let mut acc = CSum::default();
    for t in 0..p {
        acc.add(e(mul_mod(a, t * t, p), p));
    }
    Ok(acc.value())
}

/// `eps_p (a|p) sqrt(p)`.
pub fn gauss_sum_closed(a: i64, p: i64) -> Complex64 {
    let s = jacobi(a, p) as f64 * (p as f64).sqrt();
    if p % 4 == 1 {
        Complex64::new(s, 0.0)
    } else {
        Complex64::new(0.0, s)
    }
}

/// Ramanujan sum `c_q(j)` via `sum_{d | (j, q)} d mu(q/d)`.
pub fn ramanujan_sum(j: i64, q: u64) -> i64 {
    assert!(q >= 1);
    let g = gcd(j, q as i64) as u64;
    let g = if g == 0 { q } else { g };
    divisors(g).into_iter().map(|d| d as i64 * mobius(q / d)).sum()
}

/// Ramanujan sum by direct exponential summation.
pub fn ramanujan_sum_direct(j: i64, q: u64) -> Complex64 {
    let q = q as i64;
    let mut acc = CSum::default();
    for a in 0..q {
        if gcd(a, q) == 1 {
            acc.add(e(mul_mod(a, j, q), q));
        }
    }
    acc.value()
}

/// Table of `c_q(j)` for `j mod q`.
pub fn ramanujan_table(q: u64) -> Vec<i64> {
    (0..q as i64).map(|j| ramanujan_sum(j, q)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chi_by_factoring(d: i64, n: i64) -> i32 {
        let mut v = if n < 0 { d.signum() as i32 } else { 1 };
        for (p, e) in factorize(n.unsigned_abs()) {
            let cp: i32 = if p == 2 {
                match rem(d, 8) {
                    1 => 1,
                    5 => -1,
                    _ => 0,
                }
            } else {
                let r = pow_mod(d, (p - 1) / 2, p as i64);
                if r == 0 {
                    0
                } else if r == 1 {
                    1
                } else {
                    -1
                }
            };
            v *= cp.pow(e);
        }
        v
    }

    #[test]
    fn kronecker_matches_euler_criterion_oracle() {
        for d in -300..300 {
            if !is_fundamental(d) {
                continue;
            }
            for n in -200..=200 {
                if n == 0 {
                    continue;
                }
                assert_eq!(kronecker_chi(d, n).unwrap(), chi_by_factoring(d, n), "D={d} n={n}");
            }
        }
    }

    #[test]
    fn known_character_values() {
        assert_eq!(kronecker_chi(-4, 5).unwrap(), 1);
        assert_eq!(kronecker_chi(-23, 1).unwrap(), 1);
        assert_eq!(kronecker_chi(-23, 2).unwrap(), 1);
        assert!(kronecker_chi(-12, 5).is_err());
        assert!(kronecker_chi(-8, 3).is_ok());
        assert!(kronecker_chi(-16, 3).is_err());
    }

    #[test]
    fn odd_modulus_character_is_jacobi_of_twist() {
        let c = QuadCharacter::odd_modulus(15).unwrap();
        assert_eq!(c.twisted_modulus, -15);
        for a in 1..60 {
            assert_eq!(c.value(a), kronecker(-15, a));
            if gcd(a, 15) > 1 {
                assert_eq!(c.value(a), 0);
            }
        }
        assert_eq!(QuadCharacter::odd_modulus(1).unwrap().value(7), 1);
    }

    #[test]
    fn gauss_sum_examples() {
        let g = gauss_sum_quadratic(1, 5).unwrap();
        assert!((g - Complex64::new(5f64.sqrt(), 0.0)).norm() < 1e-12);
        let g = gauss_sum_quadratic(1, 3).unwrap();
        assert!((g - Complex64::new(0.0, 3f64.sqrt())).norm() < 1e-12);
        let g = gauss_sum_quadratic(2, 3).unwrap();
        assert!((g - Complex64::new(0.0, -(3f64.sqrt()))).norm() < 1e-12);
        assert!(gauss_sum_quadratic(1, 4).is_err());
        assert!(gauss_sum_quadratic(7, 7).is_err());
    }

    #[test]
    fn ramanujan_examples_and_direct_agreement() {
        assert_eq!(ramanujan_sum(0, 7), 6);
        assert_eq!(ramanujan_sum(3, 7), -1);
        assert_eq!(ramanujan_sum(6, 12), -4);
        for q in 1..=60u64 {
            for j in -5..=60 {
                let d = ramanujan_sum_direct(j, q);
                assert!((d.re - ramanujan_sum(j, q) as f64).abs() < 1e-9);
                assert!(d.im.abs() < 1e-9);
            }
        }
    }

    #[test]
    fn crt_and_inverse() {
        assert_eq!(crt(&[(2, 3), (3, 5), (2, 7)]), Some((23, 105)));
        assert_eq!(crt(&[(1, 4), (3, 6)]), Some((9, 12)));
        assert_eq!(crt(&[(1, 4), (2, 6)]), None);
        assert_eq!(mod_inv(3, 7), Some(5));
        assert_eq!(mod_inv(2, 4), None);
    }

    #[test]
    fn small_number_functions() {
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(euler_phi(36), 12);
        assert_eq!(mobius(30), -1);
        assert_eq!(mobius(12), 0);
        assert_eq!(isqrt(u64::MAX), 4294967295);
        assert_eq!(exact_sqrt(49), Some(7));
        assert_eq!(exact_sqrt(50), None);
        assert_eq!(primes_up_to(20), vec![2, 3, 5, 7, 11, 13, 17, 19]);
    }
}
