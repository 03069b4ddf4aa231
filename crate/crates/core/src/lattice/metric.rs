//! Gram forms on Z^k: the collapsed metric along a linear flow and arbitrary exact forms.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::linalg;
use crate::real::RealInput;

/// Largest dimension accepted by enumeration-based routines.
pub const MAX_DIM: usize = 6;

/// Where the entries of a Gram matrix come from; lets every routine re-evaluate at
/// higher precision.
#[derive(Clone, Debug, PartialEq)]
pub enum GramSource {
    /// `I + (s − 1) û ûᵀ` with `û = (1, α)/|(1, α)|` and `s = ε²` (or `ε⁻²` for the dual).
    Collapsed { alpha: Vec<RealInput>, eps: f64, dual: bool },
    /// Exact rational symmetric matrix.
    Exact(Vec<Vec<BigRational>>),
}

impl GramSource {
    pub fn collapsed(alpha: &[RealInput], eps: f64) -> Result<Self> {
        check_eps(eps)?;
        Ok(GramSource::Collapsed { alpha: alpha.to_vec(), eps, dual: false })
    }

    /// Exact Gram from f64 entries (each converted exactly). Symmetry is required.
    pub fn from_f64(g: &[Vec<f64>]) -> Result<Self> {
        let k = g.len();
        if k == 0 || g.iter().any(|r| r.len() != k) {
            return Err(Error::InvalidInput("Gram matrix must be square and non-empty".into()));
        }
        let mut m = vec![vec![BigRational::zero(); k]; k];
        for i in 0..k {
            for j in 0..k {
                if g[i][j] != g[j][i] || !g[i][j].is_finite() {
                    return Err(Error::InvalidInput("Gram matrix must be finite and symmetric".into()));
                }
                m[i][j] = BigRational::from_float(g[i][j]).unwrap();
            }
        }
        Ok(GramSource::Exact(m))
    }

    pub fn dim(&self) -> usize {
        match self {
            GramSource::Collapsed { alpha, .. } => alpha.len() + 1,
            GramSource::Exact(m) => m.len(),
        }
    }

    /// Default working precision in fractional bits.
    pub fn base_prec(&self) -> u32 {
        match self {
            GramSource::Collapsed { eps, .. } => {
                let e = eps.log2().abs().ceil() as u32;
                64 + 4 * e
            }
            GramSource::Exact(m) => {
                let bits = m.iter().flatten().map(|x| x.numer().bits().max(x.denom().bits())).max().unwrap_or(1) as u32;
                96 + 4 * bits
            }
        }
    }

    /// The same metric with exact rational entries, when α is rational.
    pub fn exact_matrix(&self) -> Option<Vec<Vec<BigRational>>> {
        match self {
            GramSource::Exact(m) => Some(m.clone()),
            GramSource::Collapsed { alpha, eps, dual } => {
                let mut v = vec![BigRational::one()];
                for a in alpha {
                    v.push(a.as_rational()?.clone());
                }
                let n2: BigRational = v.iter().map(|x| x * x).sum();
                let e = BigRational::from_float(*eps).unwrap();
                let s = if *dual { (&e * &e).recip() } else { &e * &e };
                let s = if fault::gram_sign_flipped() { BigRational::from_integer(2.into()) - s } else { s };
                let c = (s - BigRational::one()) / n2;
                let k = v.len();
                Some(
                    (0..k)
                        .map(|i| {
                            (0..k)
                                .map(|j| {
                                    let d = if i == j { BigRational::one() } else { BigRational::zero() };
                                    d + &c * &v[i] * &v[j]
                                })
                                .collect()
                        })
                        .collect(),
                )
            }
        }
    }

    pub fn dual(&self) -> Result<GramSource> {
        match self {
            GramSource::Collapsed { alpha, eps, dual } => {
                Ok(GramSource::Collapsed { alpha: alpha.clone(), eps: *eps, dual: !dual })
            }
            GramSource::Exact(m) => linalg::rat_inverse(m).map(GramSource::Exact).ok_or(Error::NotPositiveDefinite),
        }
    }

    fn direction(alpha: &[RealInput], prec: u32) -> (Vec<Interval>, Interval) {
        let mut v = vec![Interval::one(prec)];
        v.extend(alpha.iter().map(|a| a.eval(prec)));
        let n2 = v.iter().fold(Interval::zero(prec), |acc, x| &acc + &x.sqr());
        (v, n2)
    }

    fn scale(eps: f64, dual: bool, prec: u32) -> Interval {
        let e = Interval::from_f64(eps, prec + 64).with_prec(prec);
        let s = e.sqr();
        let s = if dual { s.recip() } else { s };
        if fault::gram_sign_flipped() {
            // s - 1 becomes 1 - s
            return &Interval::from_int(2, prec) - &s;
        }
        s
    }

    pub fn entries(&self, prec: u32) -> Vec<Vec<Interval>> {
        match self {
            GramSource::Exact(m) => {
                m.iter().map(|r| r.iter().map(|x| Interval::from_rational(x, prec)).collect()).collect()
            }
            GramSource::Collapsed { alpha, eps, dual } => {
                let (v, n2) = Self::direction(alpha, prec);
                let c = &(&Self::scale(*eps, *dual, prec) - &Interval::one(prec)) / &n2;
                let k = v.len();
                (0..k)
                    .map(|i| {
                        (0..k)
                            .map(|j| {
                                let t = &c * &(&v[i] * &v[j]);
                                if i == j { &t + &Interval::one(prec) } else { t }
                            })
                            .collect()
                    })
                    .collect()
            }
        }
    }

    /// `wᵀ G w` as an enclosure.
    pub fn quad_form(&self, w: &[BigInt], prec: u32) -> Interval {
        match self {
            GramSource::Exact(m) => {
                let r = quad_form_exact(m, w);
                Interval::from_rational(&r, prec)
            }
            GramSource::Collapsed { alpha, eps, dual } => {
                // |w|² + (s − 1)⟨w, v⟩² / |v|²
                let (v, n2) = Self::direction(alpha, prec);
                let dot = w.iter().zip(&v).fold(Interval::zero(prec), |acc, (wi, vi)| &acc + &vi.mul_int(wi));
                let w2: BigInt = w.iter().map(|x| x * x).sum();
                let c = &Self::scale(*eps, *dual, prec) - &Interval::one(prec);
                &Interval::from_int(w2, prec) + &(&(&c * &dot.sqr()) / &n2)
            }
        }
    }

    /// Exact `wᵀ G w` when the metric is rational.
    pub fn quad_form_rational(&self, w: &[BigInt]) -> Option<BigRational> {
        match self {
            GramSource::Exact(m) => Some(quad_form_exact(m, w)),
            GramSource::Collapsed { .. } => self.exact_matrix().map(|m| quad_form_exact(&m, w)),
        }
    }
}

fn quad_form_exact(m: &[Vec<BigRational>], w: &[BigInt]) -> BigRational {
    let mut acc = BigRational::zero();
    for (i, wi) in w.iter().enumerate() {
        if wi.is_zero() {
            continue;
        }
        for (j, wj) in w.iter().enumerate() {
            if wj.is_zero() {
                continue;
            }
            acc += &m[i][j] * BigRational::from_integer(wi * wj);
        }
    }
    acc
}

/// Deliberate defects for mutation smoke tests of the acceptance runner. Process-global;
/// never set outside a dedicated process.
pub mod fault {
    use std::sync::atomic::{AtomicBool, Ordering};

    static GRAM_SIGN: AtomicBool = AtomicBool::new(false);

    /// Flips the sign of the collapse term, so `G_ε = I + (1 − ε²) û ûᵀ`.
    pub fn set_gram_sign_flip(on: bool) {
        GRAM_SIGN.store(on, Ordering::SeqCst);
    }

    pub fn gram_sign_flipped() -> bool {
        GRAM_SIGN.load(Ordering::Relaxed)
    }
}

pub fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::EpsilonOutOfRange(eps));
    }
    Ok(())
}

/// The collapsed flat metric on T^k along the direction (1, α).
#[derive(Clone, Debug)]
pub struct CollapsedMetric {
    pub k: usize,
    pub alpha: Vec<RealInput>,
    pub eps: f64,
    pub prec: u32,
    /// Unit direction û in f64, for reporting.
    pub direction: Vec<f64>,
    pub gram: Vec<Vec<Interval>>,
    pub source: GramSource,
}

impl CollapsedMetric {
    pub fn det(&self) -> Interval {
        linalg::interval_det(&self.gram)
    }

    /// `√det G_ε`, the volume of the torus.
    pub fn volume(&self) -> Interval {
        self.det().sqrt()
    }

    pub fn gram_f64(&self) -> Vec<Vec<f64>> {
        self.gram.iter().map(|r| r.iter().map(Interval::mid_f64).collect()).collect()
    }
}

/// Gram form `G_ε = I + (ε² − 1) û ûᵀ` on Z^k.
pub fn gram(k: usize, alpha: &[RealInput], eps: f64) -> Result<CollapsedMetric> {
    if k < 2 {
        return Err(Error::InvalidInput(format!("dimension must be at least 2, got {k}")));
    }
    if alpha.len() != k - 1 {
        return Err(Error::InvalidInput(format!("k = {k} needs {} direction components, got {}", k - 1, alpha.len())));
    }
    let source = GramSource::collapsed(alpha, eps)?;
    let prec = source.base_prec();
    let gram = source.entries(prec);
    let mut d: Vec<f64> = std::iter::once(1.0).chain(alpha.iter().map(RealInput::to_f64)).collect();
    let n = d.iter().map(|x| x * x).sum::<f64>().sqrt();
    d.iter_mut().for_each(|x| *x /= n);
    Ok(CollapsedMetric { k, alpha: alpha.to_vec(), eps, prec, direction: d, gram, source })
}
