//! Fincke–Pohst enumeration of lattice points in an ellipsoid, in f64.
//!
//! Callers run this on an LLL-reduced Gram, where f64 is accurate to a small relative
//! error, widen the bound by a slack factor and re-check candidates exactly.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Relative slack added to every enumeration bound.
pub const SLACK: f64 = 1e-6;

/// Upper-triangular coefficients of `Q(x) = Σ_i q_ii (x_i + Σ_{j>i} q_ij x_j)²`.
#[derive(Clone, Debug)]
pub struct QuadraticDecomposition {
    q: Vec<Vec<f64>>,
}

impl QuadraticDecomposition {
    pub fn new(gram: &[Vec<f64>]) -> Result<Self> {
        let k = gram.len();
        let m = DMatrix::from_fn(k, k, |i, j| gram[i][j]);
        let chol = m.cholesky().ok_or(Error::NotPositiveDefinite)?;
        let l = chol.l();
        let mut q = vec![vec![0.0; k]; k];
        for i in 0..k {
            q[i][i] = l[(i, i)] * l[(i, i)];
            for j in i + 1..k {
                q[i][j] = l[(j, i)] / l[(i, i)];
            }
        }
        Ok(QuadraticDecomposition { q })
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }

    /// Calls `visit(x, Q(x − c))` for every integer `x` with `Q(x − c) ≤ bound`.
    /// Fails with [`Error::Overflow`] past `limit` points or when coordinates leave i64.
    pub fn enumerate(&self, center: &[f64], bound: f64, limit: usize, mut visit: impl FnMut(&[i64], f64)) -> Result<()> {
        let k = self.dim();
        let mut x = vec![0i64; k];
        let mut count = 0usize;
        self.level(k, center, bound, 0.0, &mut x, &mut count, limit, &mut visit)
    }

    #[allow(clippy::too_many_arguments)]
    fn level(
        &self,
        i: usize,
        c: &[f64],
        bound: f64,
        acc: f64,
        x: &mut [i64],
        count: &mut usize,
        limit: usize,
        visit: &mut impl FnMut(&[i64], f64),
    ) -> Result<()> {
        if i == 0 {
            *count += 1;
            if *count > limit {
                return Err(Error::Overflow);
            }
            visit(x, acc);
            return Ok(());
        }
        let i = i - 1;
        let k = self.dim();
        let s: f64 = (i + 1..k).map(|j| self.q[i][j] * (x[j] as f64 - c[j])).sum();
        let mid = c[i] - s;
        let rem = (bound - acc).max(0.0);
        let r = (rem / self.q[i][i]).sqrt();
        let lo = (mid - r).ceil();
        let hi = (mid + r).floor();
        if !(lo.abs() < 9e15 && hi.abs() < 9e15) {
            return Err(Error::Overflow);
        }
        let mut xi = lo as i64;
        while xi as f64 <= hi {
            x[i] = xi;
            let t = xi as f64 - mid;
            let part = acc + self.q[i][i] * t * t;
            if part <= bound {
                self.level(i, c, bound, part, x, count, limit, visit)?;
            }
            xi += 1;
        }
        x[i] = 0;
        Ok(())
    }
}

pub fn quad_f64(g: &[Vec<f64>], x: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 0..x.len() {
        for j in 0..x.len() {
            acc += g[i][j] * x[i] * x[j];
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_points_in_a_disc() {
        let d = QuadraticDecomposition::new(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let mut n = 0;
        d.enumerate(&[0.0, 0.0], 25.0 + 1e-9, 1_000_000, |_, _| n += 1).unwrap();
        // Gauss circle count N(5) = 81
        assert_eq!(n, 81);
    }

    #[test]
    fn values_match_direct_evaluation() {
        let g = vec![vec![2.0, 0.7, 0.1], vec![0.7, 1.5, -0.3], vec![0.1, -0.3, 1.2]];
        let d = QuadraticDecomposition::new(&g).unwrap();
        let c = [0.5, -0.25, 0.1];
        d.enumerate(&c, 6.0, 1_000_000, |x, v| {
            let y: Vec<f64> = x.iter().zip(&c).map(|(a, b)| *a as f64 - b).collect();
            assert!((quad_f64(&g, &y) - v).abs() < 1e-9);
        })
        .unwrap();
    }

    #[test]
    fn limit_is_enforced() {
        let d = QuadraticDecomposition::new(&[vec![1.0]]).unwrap();
        assert!(d.enumerate(&[0.0], 1e6, 10, |_, _| {}).is_err());
    }
}
