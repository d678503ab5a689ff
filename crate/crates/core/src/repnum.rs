//! Representation numbers of binary forms and their splitting into the
//! genus (Eisenstein) part and the cuspidal part.

use num_complex::Complex64;
use num_rational::Ratio;
use serde::Serialize;

use crate::arith::{divisors, exact_sqrt, isqrt, kronecker};
use crate::classgroup::{is_admissible, ClassCharacter, ClassGroup};
use crate::error::{invalid, Result};
use crate::forms::BinaryQF;

/// `#{(x, y) in Z^2 : f(x, y) = m}` for positive definite `f`.
pub fn rep_count(f: BinaryQF, m: i64) -> u64 {
    if m < 0 {
        return 0;
    }
    if m == 0 {
        return 1;
    }
    let nd = -(f.discriminant() as i128);
    let a = f.a as i128;
    let b = f.b as i128;
    let four_am = 4 * a * m as i128;
    let ymax = isqrt((four_am / nd) as u64) as i128;
    let mut count = 0;
    for y in -ymax..=ymax {
        let s = four_am - nd * y * y;
        let Some(t) = exact_sqrt(s as i64) else { continue };
        let t = t as i128;
        for u in [t, -t] {
            if (u - b * y).rem_euclid(2 * a) == 0 {
                count += 1;
            }
            if t == 0 {
                break;
            }
        }
    }
    count
}

/// `r_f(c)` for all `0 <= c <= cmax` by enumerating the ellipse `f <= cmax`.
pub fn rep_table(f: BinaryQF, cmax: i64) -> Vec<u32> {
    let mut out = vec![0u32; cmax as usize + 1];
    let nd = -(f.discriminant() as f64);
    let a = f.a as f64;
    let ymax = (4.0 * a * cmax as f64 / nd).sqrt().floor() as i64 + 1;
    for y in -ymax..=ymax {
        // a x^2 + b y x + c y^2 <= cmax
        let (bb, cc) = ((f.b * y) as f64, (f.c * y * y) as f64);
        let disc = bb * bb - 4.0 * a * (cc - cmax as f64);
        if disc < 0.0 {
            continue;
        }
        let s = disc.sqrt();
        let lo = ((-bb - s) / (2.0 * a)).floor() as i64 - 1;
        let hi = ((-bb + s) / (2.0 * a)).ceil() as i64 + 1;
        for x in lo..=hi {
            let v = f.eval(x, y);
            if (0..=cmax).contains(&v) {
                out[v as usize] += 1;
            }
        }
    }
    out
}

/// `sum_{d | m} chi_D(d)`, the number of ideals of norm `m`.
pub fn ideal_count(m: i64, d: i64) -> Result<i64> {
    if m <= 0 {
        return invalid(format!("ideal_count needs m >= 1, got {m}"));
    }
    crate::arith::check_fundamental(d)?;
    Ok(divisors(m as u64).into_iter().map(|q| kronecker(d, q as i64) as i64).sum())
}

#[derive(Clone, Debug, Serialize)]
pub struct RepDecomposition {
    pub m: i64,
    pub total: i64,
    pub eisenstein: f64,
    /// `(numerator, denominator)` of the Eisenstein part.
    pub eisenstein_exact: (i64, i64),
    pub cuspidal: Complex64,
    pub per_character: Vec<Complex64>,
}

/// Representation-number engine over a fixed class group.
#[derive(Clone, Debug)]
pub struct RepEngine {
    pub group: ClassGroup,
    pub characters: Vec<ClassCharacter>,
}

impl RepEngine {
    pub fn new(group: ClassGroup) -> Self {
        let characters = group.characters();
        Self { group, characters }
    }

    pub fn for_discriminant(d: i64) -> Result<Self> {
        Ok(Self::new(ClassGroup::new(d)?))
    }

    /// `rep_count` for every class.
    pub fn class_counts(&self, m: i64) -> Vec<u64> {
        self.group.classes.iter().map(|&f| rep_count(f, m)).collect()
    }

    /// `lambda_chi(m) = (1/w) sum_c chi(c) r_{f_c}(m)`.
    pub fn lambda_from_counts(&self, chi: &ClassCharacter, counts: &[u64]) -> Complex64 {
        let s: Complex64 = counts.iter().enumerate().map(|(c, &n)| chi.value(c) * n as f64).sum();
        s / self.group.w as f64
    }

    pub fn char_coefficient(&self, chi: &ClassCharacter, m: i64) -> Result<Complex64> {
        if m <= 0 {
            return invalid(format!("char_coefficient needs m >= 1, got {m}"));
        }
        Ok(self.lambda_from_counts(chi, &self.class_counts(m)))
    }

    /// Sum of `lambda_chi(m)` over characters of order at most two.
    pub fn genus_sum(&self, m: i64) -> Result<Complex64> {
        let counts = self.class_counts(m);
        Ok(self
            .characters
            .iter()
            .filter(|c| c.order() <= 2)
            .map(|c| self.lambda_from_counts(c, &counts))
            .sum())
    }

    pub fn eisenstein_exact(&self, m: i64) -> Result<Ratio<i64>> {
        let g = &self.group;
        if !is_admissible(m, g)? {
            return Ok(Ratio::from_integer(0));
        }
        let n = ideal_count(m, g.discriminant)?;
        Ok(Ratio::new(g.w as i64 * (1i64 << (g.mu - 1)) * n, g.h as i64))
    }

    pub fn decompose(&self, m: i64) -> Result<RepDecomposition> {
        if m <= 0 {
            return invalid(format!("decompose needs m >= 1, got {m}"));
        }
        let g = &self.group;
        let counts = self.class_counts(m);
        let per_character: Vec<Complex64> =
            self.characters.iter().map(|c| self.lambda_from_counts(c, &counts)).collect();
        let scale = g.w as f64 / g.h as f64;
        let cusp: Complex64 = self
            .characters
            .iter()
            .zip(&per_character)
            .filter(|(c, _)| c.order() >= 3)
            .map(|(_, l)| *l)
            .sum();
        let eis = self.eisenstein_exact(m)?;
        Ok(RepDecomposition {
            m,
            total: counts[0] as i64,
            eisenstein: *eis.numer() as f64 / *eis.denom() as f64,
            eisenstein_exact: (*eis.numer(), *eis.denom()),
            cuspidal: cusp * scale,
            per_character,
        })
    }
}

/// One-shot convenience wrapper.
pub fn decompose(m: i64, d: i64) -> Result<RepDecomposition> {
    RepEngine::for_discriminant(d)?.decompose(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(f: BinaryQF, m: i64) -> u64 {
        let r = 2 * ((m as f64).sqrt() as i64 + 2);
        let mut n = 0;
        for x in -r..=r {
            for y in -r..=r {
                if f.eval(x, y) == m {
                    n += 1;
                }
            }
        }
        n
    }

    #[test]
    fn known_rep_counts() {
        assert_eq!(rep_count(BinaryQF::new(1, 0, 1), 25), 12);
        assert_eq!(rep_count(BinaryQF::new(1, 1, 6), 2), 0);
        assert_eq!(rep_count(BinaryQF::new(2, 1, 3), 0), 1);
        for f in [BinaryQF::new(1, 1, 6), BinaryQF::new(2, -1, 3), BinaryQF::new(2, 2, 3), BinaryQF::new(3, 1, 5)] {
            for m in 0..200 {
                assert_eq!(rep_count(f, m), brute(f, m), "{f} {m}");
            }
        }
    }

    #[test]
    fn table_matches_pointwise() {
        for f in [BinaryQF::new(1, 0, 1), BinaryQF::new(2, 1, 3), BinaryQF::new(1, 1, 6)] {
            let t = rep_table(f, 3000);
            for m in 0..=3000 {
                assert_eq!(t[m as usize] as u64, rep_count(f, m));
            }
        }
    }

    #[test]
    fn ideal_counts() {
        assert_eq!(ideal_count(6, -23).unwrap(), 4);
        assert_eq!(ideal_count(1, -7).unwrap(), 1);
        assert_eq!(ideal_count(3, -4).unwrap(), 0);
        let eng = RepEngine::for_discriminant(-23).unwrap();
        let s: u64 = eng.class_counts(6).iter().sum();
        assert_eq!(s, 8);
    }

    #[test]
    fn lambda_examples() {
        let eng = RepEngine::for_discriminant(-23).unwrap();
        let chi = eng.characters.iter().find(|c| c.order() == 3).unwrap().clone();
        for (m, want) in [(1, 1.0), (2, -1.0), (4, 0.0)] {
            let l = eng.char_coefficient(&chi, m).unwrap();
            assert!((l - Complex64::new(want, 0.0)).norm() < 1e-12, "m={m} got {l}");
        }
    }

    #[test]
    fn decomposition_examples() {
        let d = decompose(2, -23).unwrap();
        assert_eq!(d.total, 0);
        assert_eq!(d.eisenstein_exact, (4, 3));
        assert!((d.cuspidal - Complex64::new(-4.0 / 3.0, 0.0)).norm() < 1e-12);
        let d = decompose(1, -23).unwrap();
        assert_eq!(d.total, 2);
        assert_eq!(d.eisenstein_exact, (2, 3));
        assert!((d.cuspidal - Complex64::new(4.0 / 3.0, 0.0)).norm() < 1e-12);
        let d = decompose(5, -4).unwrap();
        assert_eq!((d.total, d.eisenstein_exact), (8, (8, 1)));
        assert!(d.cuspidal.norm() < 1e-12);
    }
}
