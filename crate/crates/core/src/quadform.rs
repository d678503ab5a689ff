//! Integral quadratic forms in `r` variables.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// `Q(x) = sum_{i <= j} c_ij x_i x_j`, with Gram matrix `2M`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RaryForm {
    r: usize,
    /// Upper-triangular coefficients; entries below the diagonal are zero.
    coeffs: Vec<Vec<i64>>,
    gram: Vec<Vec<i64>>,
}

impl RaryForm {
    /// From `(i, j, c)` triples with 0-based indices; repeated pairs add up.
    pub fn from_triples(r: usize, triples: &[(usize, usize, i64)]) -> Result<Self> {
        if r == 0 {
            return invalid("a form needs at least one variable");
        }
        let mut c = vec![vec![0i64; r]; r];
        for &(i, j, v) in triples {
            if i >= r || j >= r {
                return invalid(format!("coefficient index ({i},{j}) out of range for r = {r}"));
            }
            let (i, j) = if i <= j { (i, j) } else { (j, i) };
            c[i][j] += v;
        }
        Ok(Self::from_upper(c))
    }

    pub fn diagonal(d: &[i64]) -> Self {
        let r = d.len();
        let mut c = vec![vec![0i64; r]; r];
        for (i, &v) in d.iter().enumerate() {
            c[i][i] = v;
        }
        Self::from_upper(c)
    }

    /// From a symmetric integer Gram matrix with even diagonal.
    pub fn from_gram(g: &[Vec<i64>]) -> Result<Self> {
        let r = g.len();
        let mut c = vec![vec![0i64; r]; r];
        for i in 0..r {
            if g[i].len() != r {
                return invalid("Gram matrix must be square");
            }
            if g[i][i] % 2 != 0 {
                return invalid("Gram matrix of an integral form has even diagonal");
            }
            c[i][i] = g[i][i] / 2;
            for j in i + 1..r {
                if g[i][j] != g[j][i] {
                    return invalid("Gram matrix must be symmetric");
                }
                c[i][j] = g[i][j];
            }
        }
        Ok(Self::from_upper(c))
    }

    fn from_upper(coeffs: Vec<Vec<i64>>) -> Self {
        let r = coeffs.len();
        let mut gram = vec![vec![0i64; r]; r];
        for i in 0..r {
            gram[i][i] = 2 * coeffs[i][i];
            for j in i + 1..r {
                gram[i][j] = coeffs[i][j];
                gram[j][i] = coeffs[i][j];
            }
        }
        Self { r, coeffs, gram }
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn coeff(&self, i: usize, j: usize) -> i64 {
        if i <= j {
            self.coeffs[i][j]
        } else {
            self.coeffs[j][i]
        }
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    /// Nonzero coefficients as `(i, j, c)` with `i <= j`.
    pub fn triples(&self) -> Vec<(usize, usize, i64)> {
        let mut out = Vec::new();
        for i in 0..self.r {
            for j in i..self.r {
                if self.coeffs[i][j] != 0 {
                    out.push((i, j, self.coeffs[i][j]));
                }
            }
        }
        out
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.r).all(|i| (i + 1..self.r).all(|j| self.coeffs[i][j] == 0))
    }

    pub fn diagonal_coeffs(&self) -> Vec<i64> {
        (0..self.r).map(|i| self.coeffs[i][i]).collect()
    }

    pub fn eval(&self, x: &[i64]) -> i128 {
        let mut s = 0i128;
        for i in 0..self.r {
            if x[i] == 0 {
                continue;
            }
            let mut row = 0i128;
            for j in i..self.r {
                row += self.coeffs[i][j] as i128 * x[j] as i128;
            }
            s += row * x[i] as i128;
        }
        s
    }

    pub fn eval_f64(&self, y: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..self.r {
            let mut row = 0.0;
            for j in i..self.r {
                row += self.coeffs[i][j] as f64 * y[j];
            }
            s += row * y[i];
        }
        s
    }

    pub fn eval_mod(&self, x: &[i64], q: i64) -> i64 {
        self.eval(x).rem_euclid(q as i128) as i64
    }

    /// With the first `r - 1` coordinates fixed to `prefix`, `Q(prefix, t) =
    /// base + slope t + curv t^2`; all three reduced modulo `modulus`.
    pub fn line_coeffs(&self, prefix: &[i64], modulus: i64) -> (i64, i64, i64) {
        let r = self.r;
        debug_assert_eq!(prefix.len() + 1, r);
        let m = modulus as i128;
        let mut base = 0i128;
        let mut slope = 0i128;
        for i in 0..r - 1 {
            let xi = prefix[i] as i128;
            let mut row = 0i128;
            for j in i..r - 1 {
                row = (row + self.coeffs[i][j] as i128 * prefix[j] as i128).rem_euclid(m);
            }
            base = (base + row * xi).rem_euclid(m);
            slope = (slope + self.coeffs[i][r - 1] as i128 * xi).rem_euclid(m);
        }
        (base as i64, slope as i64, (self.coeffs[r - 1][r - 1] as i128).rem_euclid(m) as i64)
    }

    /// `grad Q(x) = (2M) x`.
    pub fn gradient(&self, x: &[i64]) -> Vec<i128> {
        self.gram.iter().map(|row| row.iter().zip(x).map(|(&g, &xi)| g as i128 * xi as i128).sum()).collect()
    }

    pub fn gradient_f64(&self, y: &[f64]) -> Vec<f64> {
        self.gram.iter().map(|row| row.iter().zip(y).map(|(&g, &yi)| g as f64 * yi).sum()).collect()
    }

    /// `det(2M)`.
    pub fn det_gram(&self) -> i128 {
        det(&self.gram.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect::<Vec<_>>())
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.det_gram() != 0
    }

    /// Adjugate of the Gram matrix.
    pub fn adjugate_gram(&self) -> Vec<Vec<i128>> {
        let r = self.r;
        let g: Vec<Vec<i128>> = self.gram.iter().map(|row| row.iter().map(|&x| x as i128).collect()).collect();
        if r == 1 {
            return vec![vec![1]];
        }
        let mut adj = vec![vec![0i128; r]; r];
        for i in 0..r {
            for j in 0..r {
                let minor: Vec<Vec<i128>> = (0..r)
                    .filter(|&a| a != i)
                    .map(|a| (0..r).filter(|&b| b != j).map(|b| g[a][b]).collect())
                    .collect();
                let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
                adj[j][i] = sign * det(&minor);
            }
        }
        adj
    }

    /// `(positive, negative, zero)` eigenvalue counts of the Gram matrix.
    pub fn signature(&self) -> (usize, usize, usize) {
        let m = nalgebra::DMatrix::from_fn(self.r, self.r, |i, j| self.gram[i][j] as f64);
        let ev = m.symmetric_eigen().eigenvalues;
        let scale = ev.iter().fold(1.0f64, |a, &b| a.max(b.abs()));
        let tol = 1e-9 * scale;
        let pos = ev.iter().filter(|&&x| x > tol).count();
        let neg = ev.iter().filter(|&&x| x < -tol).count();
        (pos, neg, self.r - pos - neg)
    }

    /// Extreme eigenvalues of `M` (half the Gram matrix).
    pub fn eigen_range(&self) -> (f64, f64) {
        let m = nalgebra::DMatrix::from_fn(self.r, self.r, |i, j| self.gram[i][j] as f64 / 2.0);
        let ev = m.symmetric_eigen().eigenvalues;
        (ev.min(), ev.max())
    }

    /// Smallest singular value of the Gram matrix.
    pub fn min_gram_singular(&self) -> f64 {
        let m = nalgebra::DMatrix::from_fn(self.r, self.r, |i, j| self.gram[i][j] as f64);
        m.singular_values().min()
    }

    pub fn is_positive_definite(&self) -> bool {
        self.signature().0 == self.r
    }

    pub fn is_isotropic_over_reals(&self) -> bool {
        let (p, n, z) = self.signature();
        z > 0 || (p > 0 && n > 0)
    }
}

/// Fraction-free (Bareiss) determinant.
pub fn det(m: &[Vec<i128>]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut a: Vec<Vec<i128>> = m.to_vec();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            let Some(p) = (k + 1..n).find(|&i| a[i][k] != 0) else { return 0 };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

/// The dual form `Q*(y) = y^T adj(2M) y`, an integral multiple of
/// `y^T det(M) M^{-1} y` by `2^scale_log2`.
#[derive(Clone, Debug, Serialize)]
pub struct DualForm {
    pub form: RaryForm,
    pub scale_log2: u32,
}

impl DualForm {
    pub fn eval(&self, y: &[i64]) -> i128 {
        self.form.eval(y)
    }
}

pub fn dual_form(q: &RaryForm) -> Result<DualForm> {
    if !q.is_nondegenerate() {
        return invalid("dual form needs a nondegenerate form");
    }
    let adj = q.adjugate_gram();
    let r = q.r();
    let mut triples = Vec::new();
    for i in 0..r {
        triples.push((i, i, i64::try_from(adj[i][i]).map_err(|_| crate::Error::Invalid("adjugate overflow".into()))?));
        for j in i + 1..r {
            let v = i64::try_from(2 * adj[i][j]).map_err(|_| crate::Error::Invalid("adjugate overflow".into()))?;
            triples.push((i, j, v));
        }
    }
    Ok(DualForm { form: RaryForm::from_triples(r, &triples)?, scale_log2: (r - 1) as u32 })
}

/// Projective points of `P^{r-1}(F_p)`, normalized so the first nonzero
/// coordinate is one.
pub fn projective_points(r: usize, p: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for lead in 0..r {
        let free = r - lead - 1;
        let count = (p as usize).pow(free as u32);
        for idx in 0..count {
            let mut x = vec![0i64; r];
            x[lead] = 1;
            let mut t = idx;
            for xi in x.iter_mut().skip(lead + 1) {
                *xi = (t % p as usize) as i64;
                t /= p as usize;
            }
            out.push(x);
        }
    }
    out
}

/// Number of `F_p`-points of `f = g = 0` in `P^{r-1}` where the Jacobian of
/// `(f, g)` has rank below two.
pub fn singular_points_mod_p(f: &RaryForm, g: &RaryForm, p: i64) -> usize {
    assert_eq!(f.r(), g.r());
    let r = f.r();
    projective_points(r, p)
        .into_iter()
        .filter(|x| {
            if f.eval_mod(x, p) != 0 || g.eval_mod(x, p) != 0 {
                return false;
            }
            let gf: Vec<i64> = f.gradient(x).into_iter().map(|v| v.rem_euclid(p as i128) as i64).collect();
            let gg: Vec<i64> = g.gradient(x).into_iter().map(|v| v.rem_euclid(p as i128) as i64).collect();
            (0..r).all(|i| (i + 1..r).all(|j| (gf[i] * gg[j] - gf[j] * gg[i]).rem_euclid(p) == 0))
        })
        .count()
}

/// Number of `F_p`-points of `f = 0` in `P^{r-1}` with vanishing gradient.
pub fn singular_points_single_mod_p(f: &RaryForm, p: i64) -> usize {
    projective_points(f.r(), p)
        .into_iter()
        .filter(|x| f.eval_mod(x, p) == 0 && f.gradient(x).iter().all(|v| v.rem_euclid(p as i128) == 0))
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_matches_half_gram() {
        let q = RaryForm::from_triples(3, &[(0, 0, 2), (0, 1, 3), (1, 2, -5), (2, 2, 1), (1, 1, -1)]).unwrap();
        for x in [[1i64, 2, 3], [-4, 0, 7], [5, -5, 1]] {
            let g = q.gradient(&x);
            let xtgx: i128 = g.iter().zip(&x).map(|(a, &b)| a * b as i128).sum();
            assert_eq!(2 * q.eval(&x), xtgx);
        }
    }

    #[test]
    fn dual_examples() {
        let d = dual_form(&RaryForm::diagonal(&[1, 2])).unwrap();
        assert_eq!(d.form.diagonal_coeffs(), vec![4, 2]);
        let d = dual_form(&RaryForm::diagonal(&[1, 1, -1, -1])).unwrap();
        assert_eq!(d.form.diagonal_coeffs(), vec![8, 8, -8, -8]);
        assert!(dual_form(&RaryForm::diagonal(&[1, 0])).is_err());
    }

    #[test]
    fn dual_of_gradient_is_det_times_form() {
        let q = RaryForm::from_triples(4, &[(0, 0, 1), (0, 1, 1), (1, 1, 3), (2, 3, 1), (2, 2, -2), (3, 3, 5), (0, 3, -1)]).unwrap();
        let d = dual_form(&q).unwrap();
        let det = q.det_gram();
        for x in [[1i64, 0, 0, 0], [1, -2, 3, 1], [4, 1, -1, 2]] {
            let g: Vec<i64> = q.gradient(&x).into_iter().map(|v| v as i64).collect();
            assert_eq!(d.eval(&g), 2 * det * q.eval(&x));
        }
    }

    #[test]
    fn projective_point_counts() {
        assert_eq!(projective_points(4, 3).len(), 40);
        assert_eq!(projective_points(3, 5).len(), 31);
        // x0^2 + x1^2 - x2^2 is smooth mod odd p
        let c = RaryForm::diagonal(&[1, 1, -1]);
        assert_eq!(singular_points_single_mod_p(&c, 5), 0);
        // two copies of the same quadric are singular wherever they vanish
        let n = projective_points(3, 5).iter().filter(|x| c.eval_mod(x, 5) == 0).count();
        assert_eq!(singular_points_mod_p(&c, &c, 5), n);
    }

    #[test]
    fn signatures() {
        assert_eq!(RaryForm::diagonal(&[1, 1, -1, -2]).signature(), (2, 2, 0));
        assert!(RaryForm::diagonal(&[1, 2, 3]).is_positive_definite());
        assert!(!RaryForm::diagonal(&[1, 2, 3]).is_isotropic_over_reals());
        assert_eq!(RaryForm::diagonal(&[1, 2, 3, 4]).det_gram(), 16 * 24);
    }
}
