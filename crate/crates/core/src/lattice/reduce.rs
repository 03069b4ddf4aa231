//! Basis reduction of an integer Gram matrix.
//!
//! LLL runs on exact integers (the Gram scaled by 2^prec and rounded), so every
//! decision is exact for that integer form. The unimodular transform it returns is then
//! applied to the interval Gram, which keeps enclosures honest.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::interval::Interval;

/// Integer form of an interval Gram: `round(mid · 2^prec)` per entry.
pub fn scaled_integer_gram(g: &[Vec<Interval>]) -> Vec<Vec<BigInt>> {
    let p = g.iter().flatten().map(Interval::prec).max().unwrap_or(0);
    g.iter()
        .map(|r| {
            r.iter()
                .map(|x| {
                    let x = x.with_prec(p);
                    (x.lo_scaled() + x.hi_scaled()) >> 1u32
                })
                .collect()
        })
        .collect()
}

fn bilinear(m: &[Vec<BigInt>], a: &[BigInt], b: &[BigInt]) -> BigInt {
    let mut acc = BigInt::zero();
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        let row: BigInt = m[i].iter().zip(b).map(|(x, y)| x * y).sum();
        acc += ai * row;
    }
    acc
}

fn round_div(a: &BigInt, b: &BigInt) -> BigInt {
    // nearest integer to a/b for b > 0, ties upward
    (a * 2u32 + b).div_floor(&(b * 2u32))
}

/// LLL reduction (δ = 99/100) of the positive definite integer Gram `m`.
/// Returns the reduced basis as rows of integer coordinates.
pub fn lll(m: &[Vec<BigInt>]) -> Result<Vec<Vec<BigInt>>> {
    let n = m.len();
    let mut h: Vec<Vec<BigInt>> = vec![Vec::new()];
    for i in 0..n {
        h.push((0..n).map(|j| BigInt::from((i == j) as i32)).collect());
    }
    if n <= 1 {
        h.remove(0);
        return Ok(h);
    }
    // 1-indexed tables following the integral LLL formulation.
    let mut d = vec![BigInt::zero(); n + 1];
    let mut lam = vec![vec![BigInt::zero(); n + 1]; n + 1];
    d[0] = BigInt::from(1);
    d[1] = bilinear(m, &h[1], &h[1]);
    if !d[1].is_positive() {
        return Err(Error::NotPositiveDefinite);
    }
    let (num, den) = (BigInt::from(99), BigInt::from(100));
    let mut k = 2;
    let mut kmax = 1;
    let mut guard = 0usize;
    while k <= n {
        guard += 1;
        if guard > 1_000_000 {
            return Err(Error::PrecisionInsufficient { retries: 0 });
        }
        if k > kmax {
            kmax = k;
            for j in 1..=k {
                let mut u = bilinear(m, &h[k], &h[j]);
                for i in 1..j {
                    u = (&d[i] * &u - &lam[k][i] * &lam[j][i]) / &d[i - 1];
                }
                if j < k {
                    lam[k][j] = u;
                } else {
                    if !u.is_positive() {
                        return Err(Error::NotPositiveDefinite);
                    }
                    d[k] = u;
                }
            }
        }
        reduce_pair(k, k - 1, &mut h, &mut lam, &d);
        let lhs = &den * &d[k] * &d[k - 2];
        let rhs = &num * &d[k - 1] * &d[k - 1] - &den * &lam[k][k - 1] * &lam[k][k - 1];
        if lhs < rhs {
            swap(k, kmax, &mut h, &mut lam, &mut d);
            k = (k - 1).max(2);
        } else {
            for l in (1..k - 1).rev() {
                reduce_pair(k, l, &mut h, &mut lam, &d);
            }
            k += 1;
        }
    }
    h.remove(0);
    Ok(h)
}

fn reduce_pair(k: usize, l: usize, h: &mut [Vec<BigInt>], lam: &mut [Vec<BigInt>], d: &[BigInt]) {
    let two_l = &lam[k][l] * 2u32;
    if two_l.abs() <= d[l] {
        return;
    }
    let q = round_div(&lam[k][l], &d[l]);
    let hl = h[l].clone();
    for (x, y) in h[k].iter_mut().zip(&hl) {
        *x -= &q * y;
    }
    lam[k][l] -= &q * &d[l];
    for i in 1..l {
        let t = &q * &lam[l][i];
        lam[k][i] -= t;
    }
}

fn swap(k: usize, kmax: usize, h: &mut [Vec<BigInt>], lam: &mut [Vec<BigInt>], d: &mut [BigInt]) {
    h.swap(k, k - 1);
    for j in 1..k - 1 {
        let t = std::mem::take(&mut lam[k][j]);
        lam[k][j] = std::mem::replace(&mut lam[k - 1][j], t);
    }
    let l = lam[k][k - 1].clone();
    let b = (&d[k - 2] * &d[k] + &l * &l) / &d[k - 1];
    for i in k + 1..=kmax {
        let t = lam[i][k].clone();
        lam[i][k] = (&d[k] * &lam[i][k - 1] - &l * &t) / &d[k - 1];
        lam[i][k - 1] = (&b * &t + &l * &lam[i][k]) / &d[k];
    }
    d[k - 1] = b;
}

/// Lagrange (Gauss) reduction of a 2-dimensional basis: afterwards
/// `|2 b1·b2| ≤ |b1|² ≤ |b2|²` for the integer form `m`.
pub fn lagrange(m: &[Vec<BigInt>], basis: &mut [Vec<BigInt>]) {
    assert_eq!(basis.len(), 2);
    loop {
        let n1 = bilinear(m, &basis[0], &basis[0]);
        let n2 = bilinear(m, &basis[1], &basis[1]);
        if n2 < n1 {
            basis.swap(0, 1);
            continue;
        }
        let dot = bilinear(m, &basis[0], &basis[1]);
        if (&dot * 2u32).abs() <= n1 {
            return;
        }
        let q = round_div(&dot, &n1);
        let b0 = basis[0].clone();
        for (x, y) in basis[1].iter_mut().zip(&b0) {
            *x -= &q * y;
        }
    }
}

/// Gram of a basis (rows) under an interval Gram: `B G Bᵀ`.
pub fn transform_gram(g: &[Vec<Interval>], basis: &[Vec<BigInt>]) -> Vec<Vec<Interval>> {
    let k = basis.len();
    let p = g[0][0].prec();
    // rows of B·G
    let bg: Vec<Vec<Interval>> = basis
        .iter()
        .map(|b| {
            (0..g.len())
                .map(|j| {
                    b.iter()
                        .enumerate()
                        .filter(|(_, x)| !x.is_zero())
                        .fold(Interval::zero(p), |acc, (i, x)| &acc + &g[i][j].mul_int(x))
                })
                .collect()
        })
        .collect();
    let mut out = vec![vec![Interval::zero(p); k]; k];
    for i in 0..k {
        for j in i..k {
            let v = basis[j]
                .iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .fold(Interval::zero(p), |acc, (t, x)| &acc + &bg[i][t].mul_int(x));
            out[j][i] = v.clone();
            out[i][j] = v;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{det_bareiss, int_matrix};

    fn gram_of(rows: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
        rows.iter().map(|a| rows.iter().map(|b| a.iter().zip(b).map(|(x, y)| x * y).sum()).collect()).collect()
    }

    #[test]
    fn lll_reduces_a_skewed_basis() {
        // Basis of Z^3 disguised by a unimodular matrix; the reduced basis must have
        // squared lengths 1.
        let u = int_matrix(&[&[1, 0, 0], &[37, 1, 0], &[1000, -41, 1]]);
        let m = gram_of(&u);
        let h = lll(&m).unwrap();
        assert_eq!(det_bareiss(&h).abs(), BigInt::from(1));
        for b in &h {
            assert_eq!(bilinear(&m, b, b), BigInt::from(1));
        }
    }

    #[test]
    fn lagrange_on_thin_form() {
        // x² + 2·1000·xy + (1000² + 1) y²  is equivalent to x² + y²
        let m = int_matrix(&[&[1, 1000], &[1000, 1_000_001]]);
        let mut basis = lll(&m).unwrap();
        lagrange(&m, &mut basis);
        let n: Vec<BigInt> = basis.iter().map(|b| bilinear(&m, b, b)).collect();
        assert_eq!(n, vec![BigInt::from(1), BigInt::from(1)]);
    }

    #[test]
    fn rejects_indefinite() {
        let m = int_matrix(&[&[1, 2], &[2, 1]]);
        assert!(matches!(lll(&m), Err(Error::NotPositiveDefinite)));
    }
}
