//! Positive definite binary quadratic forms: reduction and composition.

use serde::Serialize;
use std::fmt;

use crate::arith::{check_fundamental, gcd, rem};
use crate::error::{invalid, Result};

/// `a x^2 + b x y + c y^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BinaryQF {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl fmt::Display for BinaryQF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.a, self.b, self.c)
    }
}

impl BinaryQF {
    pub const fn new(a: i64, b: i64, c: i64) -> Self {
        Self { a, b, c }
    }

    /// The principal form `F` of discriminant `d`: `x^2 + xy + (1-d)/4 y^2`
    /// for `d = 1 mod 4`, `x^2 - (d/4) y^2` for `d = 0 mod 4`.
    pub fn principal(d: i64) -> Result<Self> {
        match rem(d, 4) {
            1 => Ok(Self::new(1, 1, (1 - d) / 4)),
            0 => Ok(Self::new(1, 0, -d / 4)),
            _ => invalid(format!("{d} is not a discriminant (must be 0 or 1 mod 4)")),
        }
    }

    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn eval(&self, x: i64, y: i64) -> i64 {
        self.a * x * x + self.b * x * y + self.c * y * y
    }

    pub fn is_positive_definite(&self) -> bool {
        self.a > 0 && self.discriminant() < 0
    }

    pub fn is_primitive(&self) -> bool {
        gcd(gcd(self.a, self.b), self.c) == 1
    }

    /// `|b| <= a <= c`, with `b >= 0` when `|b| = a` or `a = c`.
    pub fn is_reduced(&self) -> bool {
        let (a, b, c) = (self.a, self.b, self.c);
        b.abs() <= a && a <= c && (b >= 0 || (b.abs() != a && a != c))
    }

    /// Inverse class representative `(a, -b, c)`, reduced.
    pub fn inverse(&self) -> Result<Self> {
        reduce_form(Self::new(self.a, -self.b, self.c))
    }
}

/// The reduced representative of the `SL_2(Z)`-orbit of `f`.
pub fn reduce_form(f: BinaryQF) -> Result<BinaryQF> {
    let d = f.discriminant() as i128;
    if d >= 0 {
        return invalid(format!("form {f} has discriminant {d} >= 0 (indefinite or degenerate)"));
    }
    if f.a <= 0 {
        return invalid(format!("form {f} is negative definite"));
    }
    let (mut a, mut b, mut c) = (f.a as i128, f.b as i128, f.c as i128);
    loop {
        if b > a || b <= -a {
            let k = (a - b).div_euclid(2 * a);
            b += 2 * a * k;
            c = (b * b - d) / (4 * a);
        }
        if a > c {
            (a, b, c) = (c, -b, a);
            continue;
        }
        if a == c && b < 0 {
            b = -b;
        }
        break;
    }
    Ok(BinaryQF::new(a as i64, b as i64, c as i64))
}

/// Composition of two primitive forms of the same discriminant, reduced.
pub fn compose(f1: BinaryQF, f2: BinaryQF) -> Result<BinaryQF> {
    let d = f1.discriminant();
    if f2.discriminant() != d {
        return invalid(format!("cannot compose {f1} and {f2}: discriminants differ"));
    }
    let (mut f1, mut f2) = (f1, f2);
    if f1.a > f2.a {
        std::mem::swap(&mut f1, &mut f2);
    }
    let (a1, b1) = (f1.a as i128, f1.b as i128);
    let (a2, b2, c2) = (f2.a as i128, f2.b as i128, f2.c as i128);
    let s = (b1 + b2) / 2;
    let n = b2 - s;

    let (y1, dd) = if a2 % a1 == 0 {
        (0i128, a1)
    } else {
        let (g, u, _) = egcd128(a2, a1);
        (u, g)
    };
    let (x2, y2, d1) = if s % dd == 0 {
        (0i128, -1i128, dd)
    } else {
        let (g, x, y) = egcd128(s, dd);
        (x, -y, g)
    };
    let v1 = a1 / d1;
    let v2 = a2 / d1;
    let r = (y1 * y2 * n - x2 * c2).rem_euclid(v1);
    let b3 = b2 + 2 * v2 * r;
    let a3 = v1 * v2;
    let num = b3 * b3 - d as i128;
    debug_assert_eq!(num % (4 * a3), 0);
    let c3 = num / (4 * a3);
    reduce_form(BinaryQF::new(a3 as i64, b3 as i64, c3 as i64))
}

fn egcd128(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
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
    (r0, s0, t0)
}

/// All reduced primitive forms of discriminant `d < 0`, principal form first.
pub fn reduced_forms(d: i64) -> Result<Vec<BinaryQF>> {
    if d >= 0 {
        return invalid(format!("D = {d} must be negative"));
    }
    check_fundamental(d)?;
    let mut out = Vec::new();
    let amax = ((-d) as f64 / 3.0).sqrt().floor() as i64 + 1;
    for a in 1..=amax {
        for b in -a + 1..=a {
            if rem(b - d, 2) != 0 {
                continue;
            }
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let f = BinaryQF::new(a, b, num / (4 * a));
            if f.is_reduced() && f.is_primitive() {
                out.push(f);
            }
        }
    }
    out.sort_by_key(|f| (f.a, std::cmp::Reverse(f.b), f.c));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Values of `f` on a small box, as a sorted multiset.
    fn values(f: BinaryQF, r: i64, cap: i64) -> Vec<i64> {
        let mut v: Vec<i64> = (-r..=r)
            .flat_map(|x| (-r..=r).map(move |y| f.eval(x, y)))
            .filter(|&t| t <= cap)
            .collect();
        v.sort_unstable();
        v
    }

    #[test]
    fn known_reductions() {
        assert_eq!(reduce_form(BinaryQF::new(1, 1, 6)).unwrap(), BinaryQF::new(1, 1, 6));
        assert_eq!(reduce_form(BinaryQF::new(3, 1, 2)).unwrap(), BinaryQF::new(2, -1, 3));
        assert_eq!(reduce_form(BinaryQF::new(6, 1, 1)).unwrap(), BinaryQF::new(1, 1, 6));
        assert!(reduce_form(BinaryQF::new(1, 0, -1)).is_err());
        assert!(reduce_form(BinaryQF::new(1, 2, 1)).is_err());
    }

    #[test]
    fn reduction_preserves_values() {
        // an SL2(Z) image has the same small values as its reduction
        for &(a, b, c) in &[(3, 1, 2), (6, 1, 1), (7, 11, 5), (10, 13, 5), (29, 37, 12)] {
            let f = BinaryQF::new(a, b, c);
            let g = reduce_form(f).unwrap();
            assert_eq!(g.discriminant(), f.discriminant());
            assert!(g.is_reduced());
            let cap = 60;
            assert_eq!(values(f, 40, cap), values(g, 40, cap), "{f} vs {g}");
        }
    }

    #[test]
    fn reduced_form_lists() {
        assert_eq!(reduced_forms(-4).unwrap(), vec![BinaryQF::new(1, 0, 1)]);
        assert_eq!(
            reduced_forms(-23).unwrap(),
            vec![BinaryQF::new(1, 1, 6), BinaryQF::new(2, 1, 3), BinaryQF::new(2, -1, 3)]
        );
        assert_eq!(reduced_forms(-20).unwrap(), vec![BinaryQF::new(1, 0, 5), BinaryQF::new(2, 2, 3)]);
        assert!(reduced_forms(-12).is_err());
    }

    /// Dirichlet composition through united forms, as an independent oracle.
    fn dirichlet_compose(f1: BinaryQF, f2: BinaryQF) -> BinaryQF {
        let d = f1.discriminant();
        // move f2 to an equivalent form whose leading coefficient is coprime to a1
        let mut g = f2;
        'search: for x in 0i64..30 {
            for y in -30i64..30 {
                if gcd(x, y) != 1 {
                    continue;
                }
                let m = f2.eval(x, y);
                if gcd(m, f1.a) != 1 {
                    continue;
                }
                let (_, s, t) = crate::arith::egcd(x, y);
                // x*s + y*t = 1, so [[x, -t], [y, s]] has determinant 1
                let (u, v) = (-t, s);
                let b = 2 * f2.a * x * u + f2.b * (x * v + y * u) + 2 * f2.c * y * v;
                g = BinaryQF::new(m, b, f2.eval(u, v));
                break 'search;
            }
        }
        let (a1, a2) = (f1.a, g.a);
        let modulus = 2 * a1 * a2;
        let bb = (0..modulus)
            .find(|&bb| {
                rem(bb - f1.b, 2 * a1) == 0 && rem(bb - g.b, 2 * a2) == 0 && rem(bb * bb - d, 4 * a1 * a2) == 0
            })
            .expect("united forms");
        reduce_form(BinaryQF::new(a1 * a2, bb, (bb * bb - d) / (4 * a1 * a2))).unwrap()
    }

    #[test]
    fn composition_matches_united_forms() {
        for d in [-23i64, -47, -56, -71, -84, -104, -231, -420, -971] {
            let forms = reduced_forms(d).unwrap();
            for &f in &forms {
                for &g in &forms {
                    assert_eq!(compose(f, g).unwrap(), dirichlet_compose(f, g), "D={d} {f}*{g}");
                }
            }
        }
    }

    #[test]
    fn composition_represents_products() {
        // if f represents m1 and g represents m2 then f*g represents m1*m2
        for d in [-23i64, -47, -71, -84, -104, -231] {
            let forms = reduced_forms(d).unwrap();
            for &f in &forms {
                for &g in &forms {
                    let h = compose(f, g).unwrap();
                    let hv = values(h, 60, 4000);
                    for (x1, y1) in [(1, 0), (0, 1), (1, 1), (1, -1), (2, 1)] {
                        for (x2, y2) in [(1, 0), (0, 1), (1, 1), (1, -1), (1, 2)] {
                            let m = f.eval(x1, y1) * g.eval(x2, y2);
                            if m <= 4000 {
                                assert!(hv.binary_search(&m).is_ok(), "D={d} {f}*{g}={h} misses {m}");
                            }
                        }
                    }
                }
            }
        }
    }
}
