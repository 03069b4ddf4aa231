//! Eigenvalue comparison between two flat metrics on the same torus.
//!
//! If `τ' G ≤ G' ≤ τ G`, the indexed p-form eigenvalues satisfy
//! `(1/τ')(τ'/τ)^{3n/2} λ_j(G) ≤ λ_j(G') ≤ (1/τ)(τ/τ')^{3n/2} λ_j(G)` with n the dimension.

use nalgebra::DMatrix;

use super::torus::torus_hodge_spectrum;
use crate::error::{Error, Result};
use crate::lattice::GramSource;

/// Relative slack for rounding in the f64 comparison.
const TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct DodziukRow {
    pub index: usize,
    pub lambda: f64,
    pub lambda_prime: f64,
    pub lower: f64,
    pub upper: f64,
    pub holds: bool,
}

#[derive(Clone, Debug)]
pub struct DodziukReport {
    pub tau_lo: f64,
    pub tau_hi: f64,
    pub rows: Vec<DodziukRow>,
    pub holds: bool,
}

fn to_matrix(g: &GramSource) -> DMatrix<f64> {
    let e = g.entries(g.base_prec());
    let k = e.len();
    DMatrix::from_fn(k, k, |i, j| e[i][j].mid_f64())
}

/// Extreme generalized eigenvalues `(τ', τ)` of `G' x = τ G x`.
pub fn metric_bounds(g: &GramSource, g2: &GramSource) -> Result<(f64, f64)> {
    if g.dim() != g2.dim() {
        return Err(Error::InvalidInput("metrics of different dimension".into()));
    }
    let a = to_matrix(g);
    let b = to_matrix(g2);
    let l = a.cholesky().ok_or(Error::NotPositiveDefinite)?.l();
    let li = l.try_inverse().ok_or(Error::NotPositiveDefinite)?;
    let m = &li * b * li.transpose();
    let m = (&m + m.transpose()) * 0.5;
    let ev = m.symmetric_eigenvalues();
    let lo = ev.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ev.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if lo <= 0.0 {
        return Err(Error::NotPositiveDefinite);
    }
    Ok((lo, hi))
}

pub fn dodziuk_check(g: &GramSource, g2: &GramSource, p: usize, n_eigs: usize) -> Result<DodziukReport> {
    let (tlo, thi) = metric_bounds(g, g2)?;
    let n = g.dim() as f64;
    let e = 1.5 * n;
    let lo_factor = (1.0 / tlo) * (tlo / thi).powf(e);
    let hi_factor = (1.0 / thi) * (thi / tlo).powf(e);
    let a = torus_hodge_spectrum(g, p, n_eigs)?.eigenvalues();
    let b = torus_hodge_spectrum(g2, p, n_eigs)?.eigenvalues();
    let rows: Vec<DodziukRow> = a
        .iter()
        .zip(&b)
        .take(n_eigs)
        .enumerate()
        .map(|(index, (&lambda, &lambda_prime))| {
            let lower = lo_factor * lambda;
            let upper = hi_factor * lambda;
            let holds = lower <= lambda_prime * (1.0 + TOL) && lambda_prime <= upper * (1.0 + TOL);
            DodziukRow { index, lambda, lambda_prime, lower, upper, holds }
        })
        .collect();
    let holds = rows.iter().all(|r| r.holds);
    Ok(DodziukReport { tau_lo: tlo, tau_hi: thi, rows, holds })
}
