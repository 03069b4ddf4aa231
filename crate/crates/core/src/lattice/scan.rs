//! ε-scans of the collapsed torus and the exponent checks built on them.

use rayon::prelude::*;

use super::geometry::{covering_radius_source, dual_min, shortest_vector_source};
use super::metric::{check_eps, GramSource};
use crate::diophantine::{badapprox_scan, mu_estimate, ContinuedFraction};
use crate::error::{Error, Result};
use crate::interval::ln_big;
use crate::linalg;
use crate::real::RealInput;

/// CSV header matching [`CollapseScanRow::csv`].
pub const CSV_HEADER: &str = "eps,injrad,diam_lo,diam_hi,vol,dual_min,exp_injrad,exp_diam";

#[derive(Clone, Debug, PartialEq)]
pub struct CollapseScanRow {
    pub eps: f64,
    /// Half the shortest vector length.
    pub injrad: f64,
    pub diam_lo: f64,
    pub diam_hi: f64,
    pub vol: f64,
    pub dual_min: f64,
    /// Convergent index when the row belongs to the convergent subgrid.
    pub convergent: Option<usize>,
}

fn exponent(x: f64, eps: f64) -> f64 {
    if eps == 1.0 { f64::NAN } else { x.ln() / eps.ln() }
}

impl CollapseScanRow {
    pub fn exp_injrad(&self) -> f64 {
        exponent(self.injrad, self.eps)
    }

    /// Exponent of the upper diameter bound (the exact diameter when k = 2).
    pub fn exp_diam(&self) -> f64 {
        exponent(self.diam_hi, self.eps)
    }

    pub fn exp_vol(&self) -> f64 {
        exponent(self.vol, self.eps)
    }

    pub fn csv(&self) -> String {
        format!(
            "{:e},{:e},{:e},{:e},{:e},{:e},{:.6},{:.6}",
            self.eps,
            self.injrad,
            self.diam_lo,
            self.diam_hi,
            self.vol,
            self.dual_min,
            self.exp_injrad(),
            self.exp_diam()
        )
    }
}

/// A range of ε values sampled at powers of two.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpsRange {
    pub eps_min: f64,
    pub eps_max: f64,
    /// Grid points per halving of ε.
    pub per_octave: u32,
}

impl EpsRange {
    pub fn octaves(lo_exp: i32, hi_exp: i32) -> Self {
        EpsRange { eps_min: 2f64.powi(lo_exp), eps_max: 2f64.powi(hi_exp), per_octave: 1 }
    }

    pub fn contains(&self, eps: f64) -> bool {
        eps >= self.eps_min && eps <= self.eps_max
    }

    /// `ε = 2^{-j/n}` for every integer `j` that lands inside the range, largest ε first.
    pub fn grid(&self) -> Result<Vec<f64>> {
        check_eps(self.eps_min)?;
        check_eps(self.eps_max)?;
        if self.eps_min > self.eps_max || self.per_octave == 0 {
            return Err(Error::InvalidInput("empty ε range".into()));
        }
        let n = self.per_octave as f64;
        let j_lo = (-self.eps_max.log2() * n - 1e-9).ceil() as i64;
        let j_hi = (-self.eps_min.log2() * n + 1e-9).floor() as i64;
        Ok((j_lo..=j_hi)
            .map(|j| {
                let n = self.per_octave as i64;
                if j % n == 0 { 2f64.powi(-(j / n) as i32) } else { (-(j as f64) / n as f64).exp2() }
            })
            .collect())
    }
}

/// Convergent-driven scales `ε_n = q_n^{-r_n}`, `r_n = 1 + ln q_{n+1} / ln q_n`, inside the range.
///
/// At `ε_n` the convergent vector `(q_n, p_n)` has its along-flow and transverse parts of
/// equal length, which is where the diameter dips lowest.
pub fn convergent_subgrid(cf: &ContinuedFraction, range: &EpsRange) -> Vec<(usize, f64)> {
    let conv = cf.convergents();
    let mut out = Vec::new();
    for n in 1..conv.len().saturating_sub(1) {
        let lq = ln_big(&conv[n].1);
        if lq <= 0.0 {
            continue;
        }
        let r = 1.0 + ln_big(&conv[n + 1].1) / lq;
        let eps = (-r * lq).exp();
        if eps > 0.0 && range.contains(eps) {
            out.push((n, eps));
        }
    }
    out
}

/// One scan row at a single ε.
pub fn scan_row(alpha: &[RealInput], eps: f64) -> Result<CollapseScanRow> {
    let source = GramSource::collapsed(alpha, eps)?;
    let sv = shortest_vector_source(&source)?;
    let cr = covering_radius_source(&source)?;
    let dm = dual_min(&source)?;
    let det = linalg::interval_det(&source.entries(source.base_prec()));
    Ok(CollapseScanRow {
        eps,
        injrad: sv.length / 2.0,
        diam_lo: cr.lower,
        diam_hi: cr.upper,
        vol: det.sqrt().mid_f64(),
        dual_min: dm,
        convergent: None,
    })
}

/// Rows for every grid value plus, when `cf` is given and k = 2, the convergent subgrid.
/// Rows are computed in parallel and returned in decreasing ε.
pub fn scan_collapse(
    k: usize,
    alpha: &[RealInput],
    grid: &[f64],
    cf: Option<(&ContinuedFraction, &EpsRange)>,
) -> Result<Vec<CollapseScanRow>> {
    if alpha.len() + 1 != k {
        return Err(Error::InvalidInput(format!("k = {k} needs {} direction components", k - 1)));
    }
    let mut points: Vec<(f64, Option<usize>)> = grid.iter().map(|&e| (e, None)).collect();
    if let (2, Some((cf, range))) = (k, cf) {
        points.extend(convergent_subgrid(cf, range).into_iter().map(|(n, e)| (e, Some(n))));
    }
    for (e, _) in &points {
        check_eps(*e)?;
    }
    let mut rows = points
        .par_iter()
        .map(|&(e, n)| scan_row(alpha, e).map(|r| CollapseScanRow { convergent: n, ..r }))
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| b.eps.total_cmp(&a.eps).then(a.convergent.cmp(&b.convergent)));
    Ok(rows)
}

/// Outcome of comparing the liminf of the diameter exponent with `1/μ̂`.
#[derive(Clone, Debug)]
pub struct Th2Report {
    pub mu_hat: f64,
    pub target: f64,
    /// min of ln diam / ln ε over the union grid.
    pub liminf: f64,
    pub witness_eps: f64,
    pub grid_min: f64,
    pub subgrid_min: Option<f64>,
    /// max of ln injrad / ln ε, compared with 1 − 1/μ̂.
    pub injrad_max: f64,
    pub injrad_target: f64,
    pub tol: f64,
    pub pass: bool,
    pub rows: Vec<CollapseScanRow>,
}

pub fn verify_th2(
    alpha: &RealInput,
    cf: &ContinuedFraction,
    range: &EpsRange,
    tail_start: Option<usize>,
    tol: f64,
) -> Result<Th2Report> {
    let tail = tail_start.unwrap_or(cf.len() / 3);
    let mu = mu_estimate(cf, tail)?;
    let alpha = std::slice::from_ref(alpha);
    let rows = scan_collapse(2, alpha, &range.grid()?, Some((cf, range)))?;
    let min_of = |it: &mut dyn Iterator<Item = &CollapseScanRow>| {
        it.map(|r| (r.exp_diam(), r.eps)).filter(|p| p.0.is_finite()).min_by(|a, b| a.0.total_cmp(&b.0))
    };
    let (liminf, witness_eps) =
        min_of(&mut rows.iter()).ok_or_else(|| Error::InvalidInput("scan produced no finite exponents".into()))?;
    let grid_min = min_of(&mut rows.iter().filter(|r| r.convergent.is_none())).map_or(f64::NAN, |p| p.0);
    let subgrid_min = min_of(&mut rows.iter().filter(|r| r.convergent.is_some())).map(|p| p.0);
    let injrad_max = rows.iter().map(CollapseScanRow::exp_injrad).filter(|x| x.is_finite()).fold(f64::MIN, f64::max);
    let target = 1.0 / mu.estimate;
    Ok(Th2Report {
        mu_hat: mu.estimate,
        target,
        liminf,
        witness_eps,
        grid_min,
        subgrid_min,
        injrad_max,
        injrad_target: 1.0 - target,
        tol,
        pass: (liminf - target).abs() <= tol,
        rows,
    })
}

/// Outcome of the two-sided bound `diam ≍ ε^{1/k}`.
#[derive(Clone, Debug)]
pub struct Th3Report {
    pub k: usize,
    pub badapprox_min: f64,
    pub badapprox_q: u64,
    /// Range of `diam_hi / ε^{1/k}` over the rows.
    pub ratio_min: f64,
    pub ratio_max: f64,
    /// max(diam_hi/ε^{1/k}, ε^{1/k}/diam_lo) over the rows.
    pub c: f64,
    /// `ratio_max / ratio_min` over the convergent subgrid when present, else over all rows.
    pub drift: f64,
    pub c_bound: f64,
    pub pass: bool,
    pub rows: Vec<CollapseScanRow>,
}

pub fn verify_th3(
    alpha: &[RealInput],
    range: &EpsRange,
    cf: Option<&ContinuedFraction>,
    q_scan: u64,
    c_bound: f64,
) -> Result<Th3Report> {
    let k = alpha.len() + 1;
    let cert = badapprox_scan(alpha, q_scan)?;
    let rows = scan_collapse(k, alpha, &range.grid()?, cf.map(|c| (c, range)))?;
    let ratio = |r: &CollapseScanRow| r.diam_hi / r.eps.powf(1.0 / k as f64);
    let ratio_min = rows.iter().map(ratio).fold(f64::INFINITY, f64::min);
    let ratio_max = rows.iter().map(ratio).fold(0.0, f64::max);
    let c = rows
        .iter()
        .map(|r| {
            let s = r.eps.powf(1.0 / k as f64);
            (r.diam_hi / s).max(s / r.diam_lo)
        })
        .fold(0.0, f64::max);
    let sub: Vec<f64> = rows.iter().filter(|r| r.convergent.is_some()).map(ratio).collect();
    let drift = if sub.len() >= 2 {
        sub.iter().cloned().fold(0.0, f64::max) / sub.iter().cloned().fold(f64::INFINITY, f64::min)
    } else {
        ratio_max / ratio_min
    };
    Ok(Th3Report {
        k,
        badapprox_min: cert.min_quality,
        badapprox_q: q_scan,
        ratio_min,
        ratio_max,
        c,
        drift,
        c_bound,
        pass: cert.min_quality > 0.0 && c <= c_bound,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diophantine::cf_expand;

    #[test]
    fn power_grid_hits_exact_powers() {
        let g = EpsRange::octaves(-8, -4).grid().unwrap();
        assert_eq!(g, vec![0.0625, 0.03125, 0.015625, 0.0078125, 0.00390625]);
        let g = EpsRange { eps_min: 0.25, eps_max: 1.0, per_octave: 2 }.grid().unwrap();
        assert_eq!(g.len(), 5);
        assert!((g[1] - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rows_are_ordered_and_volume_is_eps() {
        let grid = EpsRange::octaves(-10, -1).grid().unwrap();
        let rows = scan_collapse(2, &[RealInput::phi()], &grid, None).unwrap();
        assert!(rows.windows(2).all(|w| w[0].eps > w[1].eps));
        for r in &rows {
            assert!((r.vol / r.eps - 1.0).abs() < 1e-12);
            assert!(r.injrad <= r.diam_hi);
        }
    }

    #[test]
    fn subgrid_lies_in_range() {
        let cf = cf_expand(&RealInput::phi(), 40).unwrap();
        let range = EpsRange::octaves(-30, -4);
        let sub = convergent_subgrid(&cf, &range);
        assert!(sub.len() > 5);
        assert!(sub.iter().all(|(_, e)| range.contains(*e)));
    }

    #[test]
    fn csv_has_eight_fields() {
        let r = scan_row(&[RealInput::sqrt(2).unwrap()], 0.125).unwrap();
        assert_eq!(r.csv().split(',').count(), CSV_HEADER.split(',').count());
    }
}
