//! Hodge spectra of flat tori R^k / Z^k.
//!
//! On p-forms the Laplacian is diagonal in a constant coframe, so every dual vector w
//! contributes the eigenvalue 4π² wᵀG⁻¹w with multiplicity binom(k, p).

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::lattice::enumerate::SLACK;
use crate::lattice::geometry::{with_retries, ReducedLattice};
use crate::lattice::{GramSource, MAX_DIM};

pub const FOUR_PI2: f64 = 4.0 * PI * PI;
pub const MAX_COUNT: usize = 1_000_000;

pub fn binom(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

/// One distinct eigenvalue.
#[derive(Clone, Debug, PartialEq)]
pub struct Level {
    pub eigenvalue: f64,
    /// `wᵀG⁻¹w` shared by the dual vectors of this level.
    pub norm2: f64,
    pub lattice_count: usize,
    pub multiplicity: u64,
}

#[derive(Clone, Debug)]
pub struct TorusSpectrum {
    pub k: usize,
    pub p: usize,
    /// Levels in increasing order, complete up to `certified_up_to`.
    pub levels: Vec<Level>,
    pub certified_up_to: f64,
}

impl TorusSpectrum {
    /// Eigenvalues repeated by multiplicity, in increasing order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.levels.iter().flat_map(|l| std::iter::repeat_n(l.eigenvalue, l.multiplicity as usize)).collect()
    }

    pub fn zero_multiplicity(&self) -> u64 {
        self.levels.first().filter(|l| l.norm2 == 0.0).map_or(0, |l| l.multiplicity)
    }

    /// Smallest positive eigenvalue.
    pub fn first_positive(&self) -> Option<f64> {
        self.levels.iter().find(|l| l.norm2 > 0.0).map(|l| l.eigenvalue)
    }
}

/// Value of a dual vector, exact when the source is rational.
enum Value {
    Exact(BigRational),
    Enclosed(Interval),
}

impl Value {
    fn f64(&self) -> f64 {
        match self {
            Value::Exact(r) => Interval::from_rational(r, 80).mid_f64(),
            Value::Enclosed(i) => i.mid_f64(),
        }
    }

    fn same_level(&self, other: &Value) -> bool {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => a == b,
            (Value::Enclosed(a), Value::Enclosed(b)) => !(a.hi_rational() < b.lo_rational() || b.hi_rational() < a.lo_rational()),
            _ => false,
        }
    }
}

fn check(k: usize, p: usize) -> Result<()> {
    if k > MAX_DIM {
        return Err(Error::DimensionCap { dim: k, cap: MAX_DIM });
    }
    if p > k {
        return Err(Error::InvalidInput(format!("form degree {p} exceeds dimension {k}")));
    }
    Ok(())
}

/// Dual vectors with `wᵀG⁻¹w ≤ bound`, grouped into levels.
fn levels_up_to(dual: &GramSource, bound: f64, mult: u64) -> Result<Vec<Level>> {
    let exact = dual.exact_matrix().map(GramSource::Exact);
    with_retries(dual, |prec| {
        let lat = ReducedLattice::new(dual, prec)?;
        let k = lat.dim();
        let pts = lat.enumerate(&vec![0.0; k], bound * (1.0 + SLACK))?;
        let mut vals: Vec<Value> = pts
            .iter()
            .map(|(x, _)| {
                let w: Vec<BigInt> = lat.to_ambient(x);
                match &exact {
                    Some(e) => Value::Exact(e.quad_form_rational(&w).unwrap()),
                    None => Value::Enclosed(dual.quad_form(&w, prec)),
                }
            })
            .filter(|v| v.f64() <= bound)
            .collect();
        vals.sort_by(|a, b| a.f64().total_cmp(&b.f64()));
        let mut levels: Vec<(Value, usize)> = Vec::new();
        for v in vals {
            match levels.last_mut() {
                Some((l, n)) if l.same_level(&v) => *n += 1,
                _ => levels.push((v, 1)),
            }
        }
        Ok(levels
            .into_iter()
            .map(|(v, n)| {
                let norm2 = v.f64();
                Level { eigenvalue: FOUR_PI2 * norm2, norm2, lattice_count: n, multiplicity: n as u64 * mult }
            })
            .collect())
    })
}

/// All eigenvalues of the p-form Laplacian up to `lambda_max`.
pub fn torus_spectrum_up_to(g: &GramSource, p: usize, lambda_max: f64) -> Result<TorusSpectrum> {
    let k = g.dim();
    check(k, p)?;
    let dual = g.dual()?;
    let levels = levels_up_to(&dual, lambda_max / FOUR_PI2, binom(k, p))?;
    Ok(TorusSpectrum { k, p, levels, certified_up_to: lambda_max })
}

/// The `count` smallest eigenvalues (with multiplicity) of the p-form Laplacian on
/// `(R^k/Z^k, G)`. The search radius grows geometrically until `count` eigenvalues lie
/// inside it; levels beyond the `count`-th eigenvalue are dropped.
pub fn torus_hodge_spectrum(g: &GramSource, p: usize, count: usize) -> Result<TorusSpectrum> {
    let k = g.dim();
    check(k, p)?;
    if count == 0 || count > MAX_COUNT {
        return Err(Error::InvalidInput(format!("count must be in 1..={MAX_COUNT}")));
    }
    let mult = binom(k, p);
    if mult == 0 {
        return Err(Error::InvalidInput("no p-forms".into()));
    }
    let dual = g.dual()?;
    let lat = with_retries(&dual, |prec| ReducedLattice::new(&dual, prec))?;
    let mut bound = (0..k).map(|i| lat.gram_f64[i][i]).fold(0.0, f64::max);
    loop {
        let levels = levels_up_to(&dual, bound, mult)?;
        let total: u64 = levels.iter().map(|l| l.multiplicity).sum();
        if total >= count as u64 {
            let mut kept = Vec::new();
            let mut seen = 0u64;
            for l in levels {
                if seen >= count as u64 {
                    break;
                }
                seen += l.multiplicity;
                kept.push(l);
            }
            let top = kept.last().map_or(0.0, |l| l.eigenvalue);
            return Ok(TorusSpectrum { k, p, levels: kept, certified_up_to: top });
        }
        bound *= 2.0;
    }
}

/// Number of positive eigenvalues ≤ `threshold`, with multiplicity.
pub fn count_small(spec: &TorusSpectrum, threshold: f64) -> Result<u64> {
    if threshold > spec.certified_up_to {
        return Err(Error::IncompleteSpectrum { certified: spec.certified_up_to, threshold });
    }
    Ok(spec.levels.iter().filter(|l| l.norm2 > 0.0 && l.eigenvalue <= threshold).map(|l| l.multiplicity).sum())
}
