//! Smith normal form over the integers, with unimodular transforms.
//!
//! Used for congruence counting `#{x mod q : Mx = a mod q}` and for the
//! invariant-factor decomposition of class groups.

pub type IMat = Vec<Vec<i128>>;

#[derive(Clone, Debug)]
pub struct Smith {
    /// Diagonal of `S`, length `min(rows, cols)`; nonnegative, each divides the next.
    pub diag: Vec<i128>,
    /// Row transform, `rows x rows`.
    pub u: IMat,
    /// Column transform, `cols x cols`.
    pub v: IMat,
    pub rows: usize,
    pub cols: usize,
}

fn identity(n: usize) -> IMat {
    (0..n).map(|i| (0..n).map(|j| i128::from(i == j)).collect()).collect()
}

/// Computes `U A V = S` with `U`, `V` unimodular and `S` diagonal.
pub fn smith(a: &[Vec<i64>]) -> Smith {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut m: IMat = a.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut u = identity(rows);
    let mut v = identity(cols);

    let row_swap = |m: &mut IMat, u: &mut IMat, i: usize, j: usize| {
        m.swap(i, j);
        u.swap(i, j);
    };
    let col_swap = |m: &mut IMat, v: &mut IMat, i: usize, j: usize| {
        for r in m.iter_mut() {
            r.swap(i, j);
        }
        for r in v.iter_mut() {
            r.swap(i, j);
        }
    };
    // row_i -= q * row_t
    let row_sub = |m: &mut IMat, u: &mut IMat, i: usize, t: usize, q: i128| {
        for k in 0..m[i].len() {
            m[i][k] -= q * m[t][k];
        }
        for k in 0..u[i].len() {
            u[i][k] -= q * u[t][k];
        }
    };
    // col_j -= q * col_t
    let col_sub = |m: &mut IMat, v: &mut IMat, j: usize, t: usize, q: i128| {
        for r in m.iter_mut() {
            r[j] -= q * r[t];
        }
        for r in v.iter_mut() {
            r[j] -= q * r[t];
        }
    };

    let n = rows.min(cols);
    for t in 0..n {
        loop {
            // smallest nonzero pivot in the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if m[i][j] != 0 && best.is_none_or(|(bi, bj)| m[i][j].abs() < m[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else { break };
            row_swap(&mut m, &mut u, t, bi);
            col_swap(&mut m, &mut v, t, bj);

            let mut clean = true;
            for i in t + 1..rows {
                if m[i][t] != 0 {
                    let q = m[i][t].div_euclid(m[t][t]);
                    row_sub(&mut m, &mut u, i, t, q);
                    if m[i][t] != 0 {
                        clean = false;
                    }
                }
            }
            for j in t + 1..cols {
                if m[t][j] != 0 {
                    let q = m[t][j].div_euclid(m[t][t]);
                    col_sub(&mut m, &mut v, j, t, q);
                    if m[t][j] != 0 {
                        clean = false;
                    }
                }
            }
            if !clean {
                continue;
            }
            // divisibility of the remaining block by the pivot
            let mut offender = None;
            'outer: for i in t + 1..rows {
                for j in t + 1..cols {
                    if m[i][j] % m[t][t] != 0 {
                        offender = Some(i);
                        break 'outer;
                    }
                }
            }
            match offender {
                Some(i) => {
                    // row_t += row_i
                    row_sub(&mut m, &mut u, t, i, -1);
                }
                None => break,
            }
        }
        if m[t][t] < 0 {
            for k in 0..cols {
                m[t][k] = -m[t][k];
            }
            for k in 0..rows {
                u[t][k] = -u[t][k];
            }
        }
    }
    let diag = (0..n).map(|i| m[i][i]).collect();
    Smith { diag, u, v, rows, cols }
}

fn gcd128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// `#{x mod q : M x = a (mod q)}` via the Smith form of `M`.
pub fn kernel_count(mat: &[Vec<i64>], a: &[i64], q: u64) -> u128 {
    assert!(q >= 1);
    assert_eq!(mat.len(), a.len(), "row count must match the right-hand side");
    let s = smith(mat);
    let q = q as i128;
    let ua: Vec<i128> = s
        .u
        .iter()
        .map(|row| row.iter().zip(a).map(|(x, &y)| x * y as i128).sum::<i128>().rem_euclid(q))
        .collect();
    let mut count: u128 = 1;
    for i in 0..s.rows.max(s.cols) {
        if i < s.diag.len() {
            let g = gcd128(s.diag[i], q);
            if ua[i] % g != 0 {
                return 0;
            }
            count *= g as u128;
        } else if i < s.rows {
            if ua[i] != 0 {
                return 0;
            }
        } else {
            count *= q as u128;
        }
    }
    count
}

/// Brute-force count for small cases.
pub fn kernel_count_brute(mat: &[Vec<i64>], a: &[i64], q: u64) -> u128 {
    let cols = if mat.is_empty() { 0 } else { mat[0].len() };
    let q = q as i64;
    let total = (q as u128).pow(cols as u32);
    let mut x = vec![0i64; cols];
    let mut count = 0;
    for idx in 0..total {
        let mut t = idx;
        for xi in x.iter_mut() {
            *xi = (t % q as u128) as i64;
            t /= q as u128;
        }
        let ok = mat.iter().zip(a).all(|(row, &ai)| {
            let s: i64 = row.iter().zip(&x).map(|(m, xi)| m * xi).sum();
            (s - ai).rem_euclid(q) == 0
        });
        if ok {
            count += 1;
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mul(a: &IMat, b: &IMat) -> IMat {
        let (n, m, p) = (a.len(), b.len(), b[0].len());
        (0..n).map(|i| (0..p).map(|j| (0..m).map(|k| a[i][k] * b[k][j]).sum()).collect()).collect()
    }

    #[test]
    fn transforms_reproduce_diagonal() {
        let a = vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]];
        let s = smith(&a);
        assert_eq!(s.diag, vec![2, 6, 12]);
        let a128: IMat = a.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
        let p = mul(&mul(&s.u, &a128), &s.v);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(p[i][j], if i == j { s.diag[i] } else { 0 });
            }
        }
    }

    #[test]
    fn known_normal_forms() {
        assert_eq!(kernel_count(&[vec![3, 0], vec![0, 3]], &[0, 0], 3), 9);
        assert_eq!(kernel_count(&[vec![2, 0], vec![0, 4]], &[1, 0], 4), 0);
        assert_eq!(kernel_count(&[vec![1, 2], vec![3, 4]], &[0, 0], 5), 1);
    }

    #[test]
    fn rectangular_cases() {
        let m = vec![vec![2, 4, 6]];
        for q in 1..12 {
            for a in 0..q as i64 {
                assert_eq!(kernel_count(&m, &[a], q), kernel_count_brute(&m, &[a], q));
            }
        }
        let m = vec![vec![1], vec![2], vec![3]];
        for q in 1..12 {
            assert_eq!(kernel_count(&m, &[1, 2, 3], q), kernel_count_brute(&m, &[1, 2, 3], q));
            assert_eq!(kernel_count(&m, &[1, 2, 4], q), kernel_count_brute(&m, &[1, 2, 4], q));
        }
    }
}
