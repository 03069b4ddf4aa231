//! Rayleigh quotient of the flow's dual 1-form on S³ ⊂ C² under the collapsed metric.
//!
//! Hopf coordinates: a = cos η e^{iξ₁}, b = sin η e^{iξ₂}, η ∈ (0, π/2), round metric
//! dη² + cos²η dξ₁² + sin²η dξ₂². The flow is X = ∂_{ξ₁} + α ∂_{ξ₂}, so with
//! D = cos²η + α² sin²η (= |X|²):
//!
//!   ω  = (cos²η dξ₁ + α sin²η dξ₂) / D
//!   dω = (2α cos η sin η / D²) dη ∧ (dξ₂ − α dξ₁)
//!   |ω|² = 1/D,  |dω|² = 4α²/D³.
//!
//! The full computation below builds g_ε in coordinates and contracts numerically; the
//! factorised one uses the pointwise norms above and the scalings ε⁻¹, ε.

use nalgebra::Matrix3;
use rayon::prelude::*;
use std::f64::consts::{FRAC_PI_2, PI};

use crate::diophantine::ls_slope;
use crate::error::{Error, Result};

/// Richardson stopping tolerance on the relative change under N doubling.
pub const RICHARDSON_TOL: f64 = 1e-8;
const MAX_DOUBLINGS: u32 = 4;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HopfFormModel {
    pub alpha: f64,
    pub eps: f64,
    /// Gauss–Legendre nodes in η.
    pub n: usize,
}

impl HopfFormModel {
    pub fn new(alpha: f64, eps: f64, n: usize) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidInput(format!("flow parameter must be positive, got {alpha}")));
        }
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(Error::EpsilonOutOfRange(eps));
        }
        if n < 32 {
            return Err(Error::InvalidInput(format!("quadrature needs N ≥ 32, got {n}")));
        }
        Ok(HopfFormModel { alpha, eps, n })
    }
}

/// `|X|²` at latitude η.
pub fn x_norm2(alpha: f64, eta: f64) -> f64 {
    let (s, c) = eta.sin_cos();
    c * c + alpha * alpha * s * s
}

/// Coefficients of ω on dξ₁, dξ₂.
pub fn omega_coeffs(alpha: f64, eta: f64) -> (f64, f64) {
    let (s, c) = eta.sin_cos();
    let d = x_norm2(alpha, eta);
    (c * c / d, alpha * s * s / d)
}

/// Coefficients of dω on dη∧dξ₁, dη∧dξ₂.
pub fn domega_coeffs(alpha: f64, eta: f64) -> (f64, f64) {
    let (s, c) = eta.sin_cos();
    let d = x_norm2(alpha, eta);
    let f = 2.0 * alpha * c * s / (d * d);
    (-alpha * f, f)
}

pub fn omega_norm2(alpha: f64, eta: f64) -> f64 {
    1.0 / x_norm2(alpha, eta)
}

pub fn domega_norm2(alpha: f64, eta: f64) -> f64 {
    4.0 * alpha * alpha / x_norm2(alpha, eta).powi(3)
}

/// Closed-form R₁ = 2(α⁴ − 1)/(α² ln α²), with limit 4 at α = 1.
pub fn rayleigh_one_closed_form(alpha: f64) -> f64 {
    let a2 = alpha * alpha;
    if (a2 - 1.0).abs() < 1e-6 {
        let b = a2 - 1.0;
        // series of 2(a2+1)·b / (a2·ln(1+b)) about b = 0
        return 4.0 + b * b / 3.0;
    }
    2.0 * (a2 * a2 - 1.0) / (a2 * a2.ln())
}

pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * z * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Norms ‖ω‖², ‖dω‖² under one metric.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FormNorms {
    pub omega: f64,
    pub domega: f64,
}

/// Pointwise |ω|²_ε, |dω|²_ε and the volume density of g_ε, by contraction with the
/// numerically inverted coordinate metric.
fn full_point(alpha: f64, eps: f64, eta: f64) -> (f64, f64, f64) {
    let (s, c) = eta.sin_cos();
    let g = Matrix3::new(1.0, 0.0, 0.0, 0.0, c * c, 0.0, 0.0, 0.0, s * s);
    let xf = nalgebra::Vector3::new(0.0, c * c, alpha * s * s);
    let d = c * c + alpha * alpha * s * s;
    let ge = g - xf * xf.transpose() * ((1.0 - eps * eps) / d);
    let h = ge.try_inverse().expect("collapsed metric is nondegenerate away from the poles");
    let (w1, w2) = omega_coeffs(alpha, eta);
    let om = nalgebra::Vector3::new(0.0, w1, w2);
    let omega2 = (om.transpose() * h * om)[0];
    let (f1, f2) = domega_coeffs(alpha, eta);
    let mut f = Matrix3::zeros();
    f[(0, 1)] = f1;
    f[(1, 0)] = -f1;
    f[(0, 2)] = f2;
    f[(2, 0)] = -f2;
    // |F|² = ½ F_ij F_kl h^ik h^jl
    let mut domega2 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                for l in 0..3 {
                    domega2 += 0.5 * f[(i, j)] * f[(k, l)] * h[(i, k)] * h[(j, l)];
                }
            }
        }
    }
    (omega2, domega2, ge.determinant().max(0.0).sqrt())
}

/// Product quadrature of the full ε-metric integrals at resolution `n`.
pub fn full_norms(alpha: f64, eps: f64, n: usize) -> FormNorms {
    let (x, w) = gauss_legendre(n);
    // The integrands do not depend on the fiber angles, so the periodic trapezoid rule in
    // (ξ₁, ξ₂) is exact and contributes the factor 4π².
    let slabs: Vec<(f64, f64)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let eta = FRAC_PI_2 * (x[i] + 1.0) / 2.0;
            let wi = w[i] * FRAC_PI_2 / 2.0 * 4.0 * PI * PI;
            let (o, d, vol) = full_point(alpha, eps, eta);
            (o * vol * wi, d * vol * wi)
        })
        .collect();
    // summed in node order, so the result does not depend on the worker count
    let (omega, domega) = slabs.iter().fold((0.0, 0.0), |acc, s| (acc.0 + s.0, acc.1 + s.1));
    FormNorms { omega, domega }
}

/// Round-metric norms from the closed forms, by the same latitude rule.
pub fn round_norms(alpha: f64, n: usize) -> FormNorms {
    let (x, w) = gauss_legendre(n);
    let (mut omega, mut domega) = (0.0, 0.0);
    for i in 0..n {
        let eta = FRAC_PI_2 * (x[i] + 1.0) / 2.0;
        let (s, c) = eta.sin_cos();
        let wi = w[i] * FRAC_PI_2 / 2.0 * c * s * 4.0 * PI * PI;
        omega += omega_norm2(alpha, eta) * wi;
        domega += domega_norm2(alpha, eta) * wi;
    }
    FormNorms { omega, domega }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RayleighResult {
    pub alpha: f64,
    pub eps: f64,
    /// R_ε from the full ε-metric quadrature.
    pub r_eps: f64,
    pub r1: f64,
    /// ε²·R₁ from the factorised computation.
    pub r1_times_eps2: f64,
    pub rel_gap: f64,
    pub full: FormNorms,
    pub factorised: FormNorms,
    pub n_used: usize,
    pub richardson: f64,
}

impl RayleighResult {
    pub fn csv(&self) -> String {
        format!("{:e},{:.15e},{:.15e},{:.3e}", self.eps, self.r_eps, self.r1_times_eps2, self.rel_gap)
    }
}

pub const CSV_HEADER: &str = "eps,R_eps,R1_times_eps2,rel_gap";

pub fn hopf_rayleigh(model: &HopfFormModel) -> Result<RayleighResult> {
    let HopfFormModel { alpha, eps, n } = *model;
    let ratio = |f: &FormNorms| f.domega / f.omega;
    let mut n_cur = n;
    let mut prev = full_norms(alpha, eps, n_cur);
    let mut err = f64::INFINITY;
    for _ in 0..MAX_DOUBLINGS {
        let next = full_norms(alpha, eps, 2 * n_cur);
        n_cur *= 2;
        err = (ratio(&next) - ratio(&prev)).abs() / ratio(&next).abs();
        prev = next;
        if err <= RICHARDSON_TOL {
            break;
        }
    }
    if err > RICHARDSON_TOL {
        return Err(Error::QuadratureNonConvergence(err));
    }
    let round = round_norms(alpha, n_cur);
    let factorised = FormNorms { omega: round.omega / eps, domega: round.domega * eps };
    let r_eps = ratio(&prev);
    let r1 = ratio(&round);
    let r1_times_eps2 = ratio(&factorised);
    Ok(RayleighResult {
        alpha,
        eps,
        r_eps,
        r1,
        r1_times_eps2,
        rel_gap: (r_eps / r1_times_eps2 - 1.0).abs(),
        full: prev,
        factorised,
        n_used: n_cur,
        richardson: err,
    })
}

/// Rayleigh quotients over a list of ε, with the fitted slope of ln R_ε against ln ε.
pub fn rayleigh_scan(alpha: f64, eps: &[f64], n: usize) -> Result<(Vec<RayleighResult>, f64)> {
    let rows = eps
        .iter()
        .map(|&e| HopfFormModel::new(alpha, e, n).and_then(|m| hopf_rayleigh(&m)))
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = rows.iter().map(|r| r.eps.ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.r_eps.ln()).collect();
    let slope = if rows.len() >= 2 { ls_slope(&xs, &ys) } else { f64::NAN };
    Ok((rows, slope))
}

/// Largest relative size of i_X dω over `samples` latitudes: the dη coefficient is
/// −(F_{η1} + α F_{η2}), the others vanish.
pub fn ix_domega_residual(alpha: f64, samples: usize) -> f64 {
    (0..samples)
        .map(|j| {
            let eta = FRAC_PI_2 * (j as f64 + 0.5) / samples as f64;
            let (f1, f2) = domega_coeffs(alpha, eta);
            let scale = f1.abs() + (alpha * f2).abs();
            if scale == 0.0 { 0.0 } else { (f1 + alpha * f2).abs() / scale }
        })
        .fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiscreteCheck {
    /// Largest coefficient error relative to the largest closed-form coefficient.
    pub max_coeff_err: f64,
    /// Relative error of ‖dω‖²_g computed from the discrete coefficients.
    pub norm_rel_err: f64,
}

/// Discrete exterior derivative of ω on a uniform latitude grid (five-point stencil;
/// ω's coefficients are even about both poles, which supplies the ghost nodes).
pub fn discrete_domega_check(alpha: f64, n: usize) -> DiscreteCheck {
    let h = FRAC_PI_2 / n as f64;
    let coeff = |j: i64| {
        let j = if j < 0 { -j } else if j > n as i64 { 2 * n as i64 - j } else { j };
        omega_coeffs(alpha, j as f64 * h)
    };
    let mut max_err = 0.0f64;
    let mut max_ref = 0.0f64;
    let (mut disc, mut exact) = (0.0, 0.0);
    for j in 1..n as i64 {
        let eta = j as f64 * h;
        let d = |f: &dyn Fn((f64, f64)) -> f64| {
            (-f(coeff(j + 2)) + 8.0 * f(coeff(j + 1)) - 8.0 * f(coeff(j - 1)) + f(coeff(j - 2))) / (12.0 * h)
        };
        let g1 = d(&|c| c.0);
        let g2 = d(&|c| c.1);
        let (f1, f2) = domega_coeffs(alpha, eta);
        max_err = max_err.max((g1 - f1).abs()).max((g2 - f2).abs());
        max_ref = max_ref.max(f1.abs()).max(f2.abs());
        let (s, c) = eta.sin_cos();
        // |F|²_g = F_{η1}²/cos²η + F_{η2}²/sin²η, trapezoid weight cos η sin η
        disc += (g1 * g1 / (c * c) + g2 * g2 / (s * s)) * c * s;
        exact += domega_norm2(alpha, eta) * c * s;
    }
    DiscreteCheck { max_coeff_err: max_err / max_ref, norm_rel_err: (disc / exact - 1.0).abs() }
}
