//! Exact integer matrices and small interval linear algebra.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::interval::Interval;

pub type IntMatrix = Vec<Vec<BigInt>>;

pub fn int_matrix(rows: &[&[i64]]) -> IntMatrix {
    rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

pub fn identity(k: usize) -> IntMatrix {
    (0..k).map(|i| (0..k).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

pub fn transpose<T: Clone>(a: &[Vec<T>]) -> Vec<Vec<T>> {
    if a.is_empty() {
        return Vec::new();
    }
    (0..a[0].len()).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn int_mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> IntMatrix {
    let n = a.len();
    let m = b.first().map_or(0, Vec::len);
    let inner = b.len();
    let mut out = vec![vec![BigInt::zero(); m]; n];
    for i in 0..n {
        for t in 0..inner {
            if a[i][t].is_zero() {
                continue;
            }
            for j in 0..m {
                out[i][j] += &a[i][t] * &b[t][j];
            }
        }
    }
    out
}

pub fn int_mat_vec(a: &[Vec<BigInt>], v: &[BigInt]) -> Vec<BigInt> {
    a.iter().map(|r| r.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

/// Determinant by fraction-free Gaussian elimination.
pub fn det_bareiss(a: &[Vec<BigInt>]) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut m: IntMatrix = a.to_vec();
    let mut sign = 1;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    &m[n - 1][n - 1] * sign
}

/// Exact inverse over the rationals, or `None` if singular.
pub fn rat_inverse(a: &[Vec<BigRational>]) -> Option<Vec<Vec<BigRational>>> {
    let n = a.len();
    let mut m: Vec<Vec<BigRational>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !m[i][c].is_zero())?;
        m.swap(c, p);
        let piv = m[c][c].clone();
        for x in m[c].iter_mut() {
            *x /= &piv;
        }
        for i in 0..n {
            if i != c && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let pivot_row = m[c].clone();
                for (x, y) in m[i].iter_mut().zip(pivot_row) {
                    *x -= &f * y;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn to_rat_matrix(a: &[Vec<BigInt>]) -> Vec<Vec<BigRational>> {
    a.iter().map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect()).collect()
}

/// Rank over the rationals.
pub fn rat_rank(a: &[Vec<BigRational>]) -> usize {
    let mut m = a.to_vec();
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(rank, p);
        for i in rank + 1..rows {
            if !m[i][c].is_zero() {
                let f = &m[i][c] / &m[rank][c];
                let pivot_row = m[rank].clone();
                for (x, y) in m[i].iter_mut().zip(pivot_row) {
                    *x -= &f * y;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Determinant of an interval matrix by cofactor expansion (k ≤ 6 keeps this cheap).
pub fn interval_det(a: &[Vec<Interval>]) -> Interval {
    let n = a.len();
    let prec = a[0][0].prec();
    if n == 1 {
        return a[0][0].clone();
    }
    if n == 2 {
        return &(&a[0][0] * &a[1][1]) - &(&a[0][1] * &a[1][0]);
    }
    let mut acc = Interval::zero(prec);
    for j in 0..n {
        let minor: Vec<Vec<Interval>> =
            a[1..].iter().map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, x)| x.clone()).collect()).collect();
        let term = &a[0][j] * &interval_det(&minor);
        acc = if j % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    acc
}

/// Adjugate of an interval matrix (transpose of the cofactor matrix).
pub fn interval_adjugate(a: &[Vec<Interval>]) -> Vec<Vec<Interval>> {
    let n = a.len();
    let prec = a[0][0].prec();
    if n == 1 {
        return vec![vec![Interval::one(prec)]];
    }
    let mut adj = vec![vec![Interval::zero(prec); n]; n];
    for i in 0..n {
        for j in 0..n {
            let minor: Vec<Vec<Interval>> = a
                .iter()
                .enumerate()
                .filter(|&(r, _)| r != i)
                .map(|(_, row)| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, x)| x.clone()).collect())
                .collect();
            let d = interval_det(&minor);
            adj[j][i] = if (i + j) % 2 == 0 { d } else { -&d };
        }
    }
    adj
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bareiss_matches_small_cases() {
        assert_eq!(det_bareiss(&int_matrix(&[&[3, 4], &[2, 3]])), BigInt::one());
        assert_eq!(det_bareiss(&int_matrix(&[&[0, 0, 1], &[1, 0, 6], &[0, 1, 0]])), BigInt::one());
        assert_eq!(det_bareiss(&int_matrix(&[&[1, 2], &[2, 4]])), BigInt::zero());
        assert_eq!(det_bareiss(&int_matrix(&[&[0, 1], &[1, 0]])), BigInt::from(-1));
    }

    #[test]
    fn rational_inverse_roundtrip() {
        let a = to_rat_matrix(&int_matrix(&[&[2, 1], &[1, 1]]));
        let inv = rat_inverse(&a).unwrap();
        assert_eq!(inv, to_rat_matrix(&int_matrix(&[&[1, -1], &[-1, 2]])));
        assert!(rat_inverse(&to_rat_matrix(&int_matrix(&[&[1, 2], &[2, 4]]))).is_none());
    }

    #[test]
    fn rank_counts_independent_rows() {
        assert_eq!(rat_rank(&to_rat_matrix(&int_matrix(&[&[1, 2], &[2, 4]]))), 1);
        assert_eq!(rat_rank(&to_rat_matrix(&identity(3))), 3);
    }

    #[test]
    fn interval_det_and_adjugate() {
        let a: Vec<Vec<Interval>> = int_matrix(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]])
            .into_iter()
            .map(|r| r.into_iter().map(|x| Interval::from_int(x, 10)).collect())
            .collect();
        let d = interval_det(&a);
        assert!(d.is_exact());
        assert_eq!(d.mid_f64(), 18.0);
        let adj = interval_adjugate(&a);
        // a * adj = det * I
        for i in 0..3 {
            for j in 0..3 {
                let s: f64 = (0..3).map(|t| a[i][t].mid_f64() * adj[t][j].mid_f64()).sum();
                assert_eq!(s, if i == j { 18.0 } else { 0.0 });
            }
        }
    }
}
