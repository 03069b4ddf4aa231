//! Continued fractions, irrationality exponents and simultaneous approximation.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::interval::{ln_big, Interval};
use crate::real::{floor_rational, RealInput};

/// Largest q_n allowed by the prescribed-exponent constructions, in decimal digits.
pub const MAX_DIGITS: u64 = 1_000_000;
pub const DEFAULT_LIOUVILLE_DEPTH: usize = 9;

/// Partial quotients with their convergents.
#[derive(Clone, Debug, PartialEq)]
pub struct ContinuedFraction {
    quotients: Vec<BigInt>,
    convergents: Vec<(BigInt, BigInt)>,
    exact: bool,
    terminated: bool,
}

impl ContinuedFraction {
    /// `exact` marks expansions of exactly known numbers; `terminated` marks a complete
    /// finite expansion of a rational.
    pub fn new(quotients: Vec<BigInt>, exact: bool, terminated: bool) -> Result<Self> {
        if quotients.is_empty() {
            return Err(Error::InvalidInput("continued fraction needs at least a_0".into()));
        }
        if quotients.iter().skip(1).any(|a| !a.is_positive()) {
            return Err(Error::InvalidInput("partial quotients a_i, i >= 1, must be positive".into()));
        }
        let convergents = convergents_of(&quotients);
        Ok(ContinuedFraction { quotients, convergents, exact, terminated })
    }

    pub fn from_i64(q: &[i64]) -> Result<Self> {
        Self::new(q.iter().map(|&a| BigInt::from(a)).collect(), true, false)
    }

    pub fn quotients(&self) -> &[BigInt] {
        &self.quotients
    }

    pub fn convergents(&self) -> &[(BigInt, BigInt)] {
        &self.convergents
    }

    pub fn len(&self) -> usize {
        self.quotients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quotients.is_empty()
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn is_terminated(&self) -> bool {
        self.terminated
    }

    /// Keeps the first `n` quotients.
    pub fn truncated(&self, n: usize) -> ContinuedFraction {
        let n = n.clamp(1, self.len());
        ContinuedFraction {
            quotients: self.quotients[..n].to_vec(),
            convergents: self.convergents[..n].to_vec(),
            exact: self.exact,
            terminated: self.terminated && n == self.len(),
        }
    }
}

fn convergents_of(a: &[BigInt]) -> Vec<(BigInt, BigInt)> {
    let mut out = Vec::with_capacity(a.len());
    let (mut p2, mut q2) = (BigInt::zero(), BigInt::one());
    let (mut p1, mut q1) = (BigInt::one(), BigInt::zero());
    for ai in a {
        let p = ai * &p1 + &p2;
        let q = ai * &q1 + &q2;
        p2 = std::mem::replace(&mut p1, p.clone());
        q2 = std::mem::replace(&mut q1, q.clone());
        out.push((p, q));
    }
    out
}

/// Convergents `p_n / q_n` of a continued fraction.
pub fn convergents(cf: &ContinuedFraction) -> Vec<(BigInt, BigInt)> {
    cf.convergents.clone()
}

/// Exact partial quotients of `x`, up to `n_terms`.
///
/// Rationals stop at their finite expansion. Decimal inputs fail with
/// [`Error::PrecisionExhausted`] when their declared digits cannot certify `n_terms`
/// quotients; use [`cf_expand_partial`] to get the certified prefix instead.
pub fn cf_expand(x: &RealInput, n_terms: usize) -> Result<ContinuedFraction> {
    if n_terms == 0 {
        return Err(Error::InvalidInput("n_terms must be at least 1".into()));
    }
    let cf = cf_expand_partial(x, n_terms)?;
    if cf.len() < n_terms && !cf.terminated {
        return Err(Error::PrecisionExhausted { determined: cf.len(), requested: n_terms });
    }
    Ok(cf)
}

/// Like [`cf_expand`] but returns the certified prefix when precision runs out.
pub fn cf_expand_partial(x: &RealInput, n_terms: usize) -> Result<ContinuedFraction> {
    match x {
        RealInput::Rational(r) => {
            let (q, done) = euclid(r, n_terms);
            ContinuedFraction::new(q, true, done)
        }
        RealInput::Surd { a, b, c, d } => ContinuedFraction::new(surd_quotients(a, b, c, d, n_terms), true, false),
        RealInput::Algebraic { .. } => {
            let mut bits = 64 + 8 * n_terms as u32;
            loop {
                let v = x.eval(bits);
                let (q, done) = interval_quotients(v.lo_rational(), v.hi_rational(), n_terms);
                if q.len() >= n_terms || done || bits > 1 << 22 {
                    return ContinuedFraction::new(q, true, done);
                }
                bits *= 2;
            }
        }
        RealInput::Decimal { .. } => {
            let (lo, hi) = decimal_bounds(x);
            let (q, done) = interval_quotients(lo, hi, n_terms);
            if q.is_empty() {
                return Err(Error::PrecisionExhausted { determined: 0, requested: n_terms });
            }
            ContinuedFraction::new(q, false, done)
        }
        RealInput::Cf { cf, .. } => Ok(cf.truncated(n_terms)),
    }
}

fn decimal_bounds(x: &RealInput) -> (BigRational, BigRational) {
    match x {
        RealInput::Decimal { value, digits, .. } => {
            let e = BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(10), *digits as usize));
            (value - &e, value + &e)
        }
        _ => unreachable!("decimal_bounds on non-decimal"),
    }
}

fn euclid(r: &BigRational, n: usize) -> (Vec<BigInt>, bool) {
    let mut num = r.numer().clone();
    let mut den = r.denom().clone();
    let mut out = Vec::new();
    while out.len() < n {
        let (a, rem) = num.div_mod_floor(&den);
        out.push(a);
        if rem.is_zero() {
            return (out, true);
        }
        num = std::mem::replace(&mut den, rem);
    }
    (out, false)
}

/// Quotients of `(a + b√d)/c` through the reduced-surd recurrence
/// `x = (P + √D)/Q`, `a_n = floor(x)`, `P' = a_n Q − P`, `Q' = (D − P'^2)/Q`.
fn surd_quotients(a: &BigInt, b: &BigInt, c: &BigInt, d: &BigInt, n: usize) -> Vec<BigInt> {
    // Absorb the sign of b so the radical carries a plus sign.
    let (mut p, mut q) = if b.is_negative() { (-a, -c) } else { (a.clone(), c.clone()) };
    let mut dd = b * b * d;
    if !((&dd - &p * &p) % &q).is_zero() {
        let qa = q.abs();
        p *= &qa;
        dd *= &q * &q;
        q *= &qa;
    }
    let s = dd.sqrt();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let ai = if q.is_positive() { (&p + &s).div_floor(&q) } else { (-(&p + &s) - BigInt::one()).div_floor(&-&q) };
        p = &ai * &q - &p;
        q = (&dd - &p * &p) / &q;
        out.push(ai);
    }
    out
}

/// Certified quotients of any number in `[lo, hi]`.
fn interval_quotients(mut lo: BigRational, mut hi: BigRational, n: usize) -> (Vec<BigInt>, bool) {
    let mut out = Vec::new();
    while out.len() < n {
        let a = floor_rational(&lo);
        if floor_rational(&hi) != a {
            break;
        }
        let a_r = BigRational::from_integer(a.clone());
        out.push(a);
        if lo == a_r {
            let done = hi == lo;
            return (out, done);
        }
        let new_lo = (&hi - &a_r).recip();
        let new_hi = (&lo - &a_r).recip();
        lo = new_lo;
        hi = new_hi;
    }
    (out, false)
}

/// Continued fraction of √d: `(a_0, period)` with the period ending in `2 a_0`.
pub fn sqrt_cf_period(d: &BigInt) -> Result<(BigInt, Vec<BigInt>)> {
    if !d.is_positive() {
        return Err(Error::InvalidInput(format!("sqrt period needs d > 0, got {d}")));
    }
    let a0 = d.sqrt();
    if &a0 * &a0 == *d {
        return Err(Error::PerfectSquare(d.to_i64().unwrap_or(i64::MAX)));
    }
    let (mut m, mut q, mut a) = (BigInt::zero(), BigInt::one(), a0.clone());
    let stop = &a0 * 2;
    let mut period = Vec::new();
    loop {
        m = &a * &q - &m;
        q = (d - &m * &m) / &q;
        a = (&a0 + &m) / &q;
        period.push(a.clone());
        if a == stop {
            return Ok((a0, period));
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MuEstimate {
    /// `1 +` least-squares slope of `ln q_{n+1}` against `ln q_n` over the window.
    pub estimate: f64,
    /// `(n, 1 + ln q_{n+1} / ln q_n)` for every n with q_n > 1.
    pub ratios: Vec<(usize, f64)>,
    /// Inclusive index range of the tail window.
    pub window: (usize, usize),
    /// Window maximum of the ratios (the plain limsup proxy).
    pub window_max: f64,
    pub lower: f64,
    pub upper: f64,
    /// `2 + max ln a_{n+1} / ln q_n` over the window.
    pub a_form: f64,
    pub forms_agree: bool,
    pub agreement_tol: f64,
}

/// Estimates the irrationality exponent from the convergent denominators.
pub fn mu_estimate(cf: &ContinuedFraction, tail_start: usize) -> Result<MuEstimate> {
    let conv = cf.convergents();
    if conv.len() < tail_start + 2 {
        return Err(Error::TooFewConvergents { needed: tail_start + 2, have: conv.len() });
    }
    let lnq: Vec<Option<f64>> = conv.iter().map(|(_, q)| (q > &BigInt::one()).then(|| ln_big(q))).collect();
    let ratios: Vec<(usize, f64)> =
        (0..conv.len() - 1).filter_map(|n| lnq[n].map(|l| (n, 1.0 + ln_big(&conv[n + 1].1) / l))).collect();
    let window: Vec<(usize, f64)> = ratios.iter().copied().filter(|&(n, _)| n >= tail_start).collect();
    if window.is_empty() {
        return Err(Error::TooFewConvergents { needed: tail_start + 3, have: conv.len() });
    }
    let first = window[0].0;
    let last = window[window.len() - 1].0;
    let window_max = window.iter().map(|w| w.1).fold(f64::NEG_INFINITY, f64::max);
    let window_min = window.iter().map(|w| w.1).fold(f64::INFINITY, f64::min);

    let estimate = if window.len() == 1 {
        window[0].1
    } else {
        let xs: Vec<f64> = window.iter().map(|&(n, _)| lnq[n].unwrap()).collect();
        let ys: Vec<f64> = window.iter().map(|&(n, _)| ln_big(&conv[n + 1].1)).collect();
        1.0 + ls_slope(&xs, &ys)
    };

    let a = cf.quotients();
    let a_form = window
        .iter()
        .map(|&(n, _)| 2.0 + ln_big(&a[n + 1]) / lnq[n].unwrap())
        .fold(f64::NEG_INFINITY, f64::max);
    let agreement_tol = 10.0 * std::f64::consts::LN_2 / lnq[first].unwrap();
    let forms_agree = (window_max - a_form).abs() <= agreement_tol;
    Ok(MuEstimate {
        estimate,
        ratios,
        window: (first, last),
        window_max,
        lower: window_min,
        upper: window_max,
        a_form,
        forms_agree,
        agreement_tol,
    })
}

/// Least-squares slope with intercept.
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// `floor(q^e)` for `e ≥ 0`. Exact for integer `e`; otherwise correct to 53 bits of
/// the leading mantissa (deterministic across platforms).
fn floor_pow(q: &BigInt, e: f64) -> BigInt {
    if e == 0.0 {
        return BigInt::one();
    }
    if e.fract() == 0.0 && e <= u32::MAX as f64 {
        return num_traits::pow(q.clone(), e as usize);
    }
    let log2 = e * ln_big(q) / std::f64::consts::LN_2;
    if log2 < 52.0 {
        return BigInt::from(log2.exp2().floor() as u64);
    }
    let int = log2.floor();
    let mant = ((log2 - int) + 52.0).exp2().floor() as u64;
    BigInt::from(mant) << (int as u64 - 52)
}

fn digits_estimate(q: &BigInt) -> u64 {
    (q.bits() as f64 * std::f64::consts::LOG10_2).ceil() as u64
}

/// Builds `[1; 1, a_2, ...]` with `a_{n+1} = max(1, floor(q_n^{mu_target − 2}))`.
pub fn construct_alpha_with_mu(mu_target: f64, depth: usize) -> Result<ContinuedFraction> {
    if mu_target.is_nan() || mu_target < 2.0 || !mu_target.is_finite() {
        return Err(Error::InvalidInput(format!("mu_target must be a finite real >= 2, got {mu_target}")));
    }
    build_recurrence(depth, |_, q| floor_pow(q, mu_target - 2.0), MAX_DIGITS)
}

/// Liouville-type expansion `a_{n+1} = q_n^n`, whose ratios grow without bound.
pub fn construct_liouville(depth: usize) -> Result<ContinuedFraction> {
    build_recurrence(depth, |n, q| num_traits::pow(q.clone(), n), MAX_DIGITS)
}

/// Deepest expansion of the prescribed-exponent construction whose q_n stays below
/// 10^4 digits, capped at 40 terms.
pub fn default_mu_depth(mu_target: f64) -> usize {
    let mut depth = 3;
    while depth < 40 {
        match construct_alpha_with_mu(mu_target, depth + 1) {
            Ok(cf) if digits_estimate(&cf.convergents().last().unwrap().1) < 10_000 => depth += 1,
            _ => break,
        }
    }
    depth
}

fn build_recurrence(depth: usize, next: impl Fn(usize, &BigInt) -> BigInt, max_digits: u64) -> Result<ContinuedFraction> {
    if depth < 3 {
        return Err(Error::InvalidInput(format!("depth must be at least 3, got {depth}")));
    }
    let mut a = vec![BigInt::one(), BigInt::one()];
    let (mut q_prev, mut q) = (BigInt::one(), BigInt::one());
    while a.len() < depth {
        let n = a.len() - 1;
        let an = next(n, &q).max(BigInt::one());
        if digits_estimate(&an) + digits_estimate(&q) > max_digits {
            return Err(Error::DepthCapExceeded { depth, max_digits });
        }
        let qn = &an * &q + &q_prev;
        q_prev = std::mem::replace(&mut q, qn);
        a.push(an);
    }
    ContinuedFraction::new(a, true, false)
}

/// Checks `|x − p_n/q_n| < 1/(q_n q_{n+1})` for every consecutive pair, in intervals.
pub fn check_convergent_bounds(x: &RealInput, cf: &ContinuedFraction) -> bool {
    let conv = cf.convergents();
    if conv.len() < 2 {
        return true;
    }
    let max_bits = conv.last().unwrap().1.bits() as u32;
    let prec = 64 + 4 * max_bits;
    let xv = x.eval(prec);
    conv.windows(2).all(|w| {
        let (p, q) = &w[0];
        let q1 = &w[1].1;
        let diff = (&xv - &Interval::from_ratio(p, q, prec)).abs();
        let bound = Interval::from_ratio(&BigInt::one(), &(q * q1), prec);
        diff.hi_rational() < bound.lo_rational()
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct BadApproxRow {
    pub q: u64,
    pub dist: f64,
    pub quality: f64,
    /// Nearest integer vector to q·α.
    pub p: Vec<BigInt>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BadApproxCertificate {
    pub dim: usize,
    pub alpha: Vec<RealInput>,
    pub q_bound: u64,
    pub min_quality: f64,
    /// Interval enclosure of the minimum quality.
    pub min_quality_bounds: (f64, f64),
    pub witness_q: u64,
    pub witness_p: Vec<BigInt>,
    pub rational_hit: bool,
}

/// Evaluation of α at fixed precision for a range of q.
pub struct BadApproxScanner {
    alpha: Vec<RealInput>,
    whole: Vec<BigInt>,
    frac: Vec<Interval>,
    prec: u32,
}

impl BadApproxScanner {
    pub fn new(alpha: &[RealInput], q_bound: u64) -> Result<Self> {
        if alpha.is_empty() {
            return Err(Error::InvalidInput("badapprox needs at least one component".into()));
        }
        if q_bound == 0 {
            return Err(Error::InvalidInput("scan bound must be at least 1".into()));
        }
        let qbits = 64 - q_bound.leading_zeros();
        let prec = 48 + 3 * qbits;
        let need = BigRational::new(BigInt::one(), BigInt::from(4u64) * BigInt::from(q_bound) * BigInt::from(q_bound));
        let (whole, frac) = split_parts(alpha, prec);
        if let Some(i) = frac.iter().position(|v| v.hi_rational() - v.lo_rational() >= need) {
            return Err(Error::InvalidInput(format!(
                "component {i} ({}) is not known to width < 1/(4Q^2)",
                alpha[i]
            )));
        }
        Ok(BadApproxScanner { alpha: alpha.to_vec(), whole, frac, prec })
    }

    /// Distance enclosure of qα to Z^{k−1} in the max norm, with the nearest integers.
    fn dist(&self, q: u64, frac: &[Interval]) -> (Interval, Vec<BigInt>) {
        let qb = BigInt::from(q);
        let mut best = Interval::zero(self.prec);
        let mut ps = Vec::with_capacity(frac.len());
        for (f, w) in frac.iter().zip(&self.whole) {
            let v = f.mul_int(&qb);
            let n = v.round_mid();
            let d = (&v - &Interval::from_int(n.clone(), self.prec)).abs();
            ps.push(n + w * &qb);
            best = max_interval(&best, &d);
        }
        (best, ps)
    }

    pub fn row(&self, q: u64) -> (BadApproxRow, Interval) {
        let (d, p) = self.dist(q, &self.frac);
        let (d, p) = if !d.is_exact() && d.rel_width() > 0.01 {
            // Rare: the value is tiny relative to the enclosure; redo at higher precision.
            let prec = self.prec * 2 + 64;
            let (whole, frac) = split_parts(&self.alpha, prec);
            let s = BadApproxScanner { alpha: self.alpha.clone(), whole, frac: frac.clone(), prec };
            s.dist(q, &frac)
        } else {
            (d, p)
        };
        let scale = (q as f64).powf(1.0 / self.alpha.len() as f64);
        let dist = d.mid_f64();
        (BadApproxRow { q, dist, quality: scale * dist, p }, d)
    }
}

/// Integer parts (from the lower endpoint) and the remaining fractional enclosures.
fn split_parts(alpha: &[RealInput], prec: u32) -> (Vec<BigInt>, Vec<Interval>) {
    alpha
        .iter()
        .map(|a| {
            let v = a.eval(prec);
            let w = v.floor_lo();
            let f = &v - &Interval::from_int(w.clone(), prec);
            (w, f)
        })
        .unzip()
}

fn max_interval(a: &Interval, b: &Interval) -> Interval {
    let p = a.prec().max(b.prec());
    let (a, b) = (a.with_prec(p), b.with_prec(p));
    let lo = a.lo_scaled().max(b.lo_scaled()).clone();
    let hi = a.hi_scaled().max(b.hi_scaled()).clone();
    Interval::from_scaled(lo, hi, p)
}

/// Scans `1 ≤ q ≤ Q` for the minimum of `q^{1/(k−1)} · dist(qα, Z^{k−1})`.
pub fn badapprox_scan(alpha: &[RealInput], q_bound: u64) -> Result<BadApproxCertificate> {
    let scanner = BadApproxScanner::new(alpha, q_bound)?;
    const CHUNK: u64 = 4096;
    let chunks: Vec<u64> = (0..q_bound.div_ceil(CHUNK)).collect();
    let best = chunks
        .par_iter()
        .map(|&c| {
            let start = c * CHUNK + 1;
            let end = ((c + 1) * CHUNK).min(q_bound);
            let mut best: Option<(BadApproxRow, Interval)> = None;
            for q in start..=end {
                let (row, d) = scanner.row(q);
                if best.as_ref().is_none_or(|b| row.quality < b.0.quality) {
                    let zero = d.is_exact() && d.sign() == Some(std::cmp::Ordering::Equal);
                    best = Some((row, d));
                    if zero {
                        break;
                    }
                }
            }
            best.unwrap()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .reduce(|a, b| if b.0.quality < a.0.quality { b } else { a })
        .unwrap();
    let (row, d) = best;
    let scale = (row.q as f64).powf(1.0 / alpha.len() as f64);
    let rational_hit = d.is_exact() && d.sign() == Some(std::cmp::Ordering::Equal);
    Ok(BadApproxCertificate {
        dim: alpha.len(),
        alpha: alpha.to_vec(),
        q_bound,
        min_quality: row.quality,
        min_quality_bounds: (scale * d.lo_f64(), scale * d.hi_f64()),
        witness_q: row.q,
        witness_p: row.p,
        rational_hit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn expansions_of_spec_examples() {
        let phi = cf_expand(&RealInput::phi(), 10).unwrap();
        assert_eq!(phi.quotients(), q(&[1; 10]).as_slice());
        assert!(phi.is_exact());
        let s2 = cf_expand(&RealInput::sqrt(2).unwrap(), 6).unwrap();
        assert_eq!(s2.quotients(), q(&[1, 2, 2, 2, 2, 2]).as_slice());
        let r = cf_expand(&RealInput::rational(355, 113), 10).unwrap();
        assert_eq!(r.quotients(), q(&[3, 7, 16]).as_slice());
        assert!(r.is_terminated() && r.is_exact());
    }

    #[test]
    fn negative_and_general_surds() {
        // -√2 = [-2; 1, 1, 2, 2, ...]
        let x = RealInput::surd(0, -1, 1, 2).unwrap();
        assert_eq!(cf_expand(&x, 5).unwrap().quotients(), q(&[-2, 1, 1, 2, 2]).as_slice());
        // (1 - √5)/2 = -0.618... = [-1; 2, 1, 1, ...]
        let y = RealInput::surd(1, -1, 2, 5).unwrap();
        assert_eq!(cf_expand(&y, 5).unwrap().quotients(), q(&[-1, 2, 1, 1, 1]).as_slice());
        // √3 = [1; 1, 2, 1, 2]
        assert_eq!(cf_expand(&RealInput::sqrt(3).unwrap(), 5).unwrap().quotients(), q(&[1, 1, 2, 1, 2]).as_slice());
        // (3 + √7)/5 needs the normalisation step: cross-check against intervals
        let z = RealInput::surd(3, 1, 5, 7).unwrap();
        let exact = cf_expand(&z, 30).unwrap();
        let v = z.eval(400);
        let (iv, _) = interval_quotients(v.lo_rational(), v.hi_rational(), 30);
        assert_eq!(exact.quotients(), iv.as_slice());
    }

    #[test]
    fn convergent_recurrence_examples() {
        let c = convergents(&ContinuedFraction::from_i64(&[1, 1, 1, 1, 1]).unwrap());
        let expect = [(1, 1), (2, 1), (3, 2), (5, 3), (8, 5)];
        for (got, want) in c.iter().zip(expect) {
            assert_eq!((got.0.clone(), got.1.clone()), (BigInt::from(want.0), BigInt::from(want.1)));
        }
        let c = convergents(&ContinuedFraction::from_i64(&[3, 7, 16]).unwrap());
        assert_eq!(c[1], (BigInt::from(22), BigInt::from(7)));
        assert_eq!(c[2], (BigInt::from(355), BigInt::from(113)));
        let c = convergents(&ContinuedFraction::from_i64(&[5]).unwrap());
        assert_eq!(c, vec![(BigInt::from(5), BigInt::one())]);
    }

    #[test]
    fn algebraic_expansion_of_cube_root() {
        // 2^(1/3) = [1; 3, 1, 5, 1, 1, 4, 1, 1, 8, 1, 14, 1, 10, 2, 1, 4, 12, 2, 3]
        let x = RealInput::cbrt(2).unwrap();
        let cf = cf_expand(&x, 20).unwrap();
        assert_eq!(cf.quotients(), q(&[1, 3, 1, 5, 1, 1, 4, 1, 1, 8, 1, 14, 1, 10, 2, 1, 4, 12, 2, 3]).as_slice());
        assert!(check_convergent_bounds(&x, &cf));
    }

    #[test]
    fn decimal_runs_out_of_precision() {
        let x = RealInput::parse("dec:1.41421356").unwrap();
        let err = cf_expand(&x, 40).unwrap_err();
        assert!(matches!(err, Error::PrecisionExhausted { requested: 40, .. }));
        let partial = cf_expand_partial(&x, 40).unwrap();
        assert!(!partial.is_exact());
        assert!(partial.len() >= 5);
        for a in partial.quotients().iter().skip(1) {
            assert_eq!(a, &BigInt::from(2));
        }
    }

    #[test]
    fn sqrt_periods() {
        assert_eq!(sqrt_cf_period(&BigInt::from(2)).unwrap(), (BigInt::from(1), q(&[2])));
        assert_eq!(sqrt_cf_period(&BigInt::from(7)).unwrap(), (BigInt::from(2), q(&[1, 1, 1, 4])));
        assert!(matches!(sqrt_cf_period(&BigInt::from(9)), Err(Error::PerfectSquare(9))));
    }

    #[test]
    fn mu_needs_enough_convergents() {
        let cf = ContinuedFraction::from_i64(&[1, 1, 1]).unwrap();
        assert!(matches!(mu_estimate(&cf, 5), Err(Error::TooFewConvergents { .. })));
    }

    #[test]
    fn prescribed_mu_two_is_fibonacci() {
        let cf = construct_alpha_with_mu(2.0, 20).unwrap();
        assert!(cf.quotients().iter().all(|a| a.is_one()));
        assert_eq!(cf.convergents()[19].1, BigInt::from(6765));
    }

    #[test]
    fn prescribed_mu_four_first_denominators() {
        let cf = construct_alpha_with_mu(4.0, 6).unwrap();
        let qs: Vec<BigInt> = cf.convergents().iter().map(|c| c.1.clone()).collect();
        assert_eq!(qs, q(&[1, 1, 2, 9, 731, 390_617_900]));
        assert!(construct_alpha_with_mu(1.5, 5).is_err());
        assert!(construct_alpha_with_mu(3.0, 2).is_err());
    }

    #[test]
    fn depth_cap_is_enforced() {
        assert!(matches!(construct_alpha_with_mu(6.0, 30), Err(Error::DepthCapExceeded { .. })));
    }

    #[test]
    fn floor_pow_fractional_exponent() {
        assert_eq!(floor_pow(&BigInt::from(100), 0.5), BigInt::from(10));
        assert_eq!(floor_pow(&BigInt::from(2), 1.5), BigInt::from(2));
        assert_eq!(floor_pow(&BigInt::from(7), 3.0), BigInt::from(343));
    }

    #[test]
    fn badapprox_rational_hit() {
        let c = badapprox_scan(&[RealInput::rational(1, 2)], 10).unwrap();
        assert_eq!(c.min_quality, 0.0);
        assert_eq!(c.witness_q, 2);
        assert!(c.rational_hit);
    }

    #[test]
    fn badapprox_small_sqrt2() {
        // Brute-force f64 oracle at small Q.
        let c = badapprox_scan(&[RealInput::sqrt(2).unwrap()], 2000).unwrap();
        let mut best = f64::INFINITY;
        let mut arg = 0;
        for q in 1..=2000u64 {
            let x = q as f64 * std::f64::consts::SQRT_2;
            let v = q as f64 * (x - x.round()).abs();
            if v < best {
                best = v;
                arg = q;
            }
        }
        assert_eq!(c.witness_q, arg);
        assert!((c.min_quality - best).abs() < 1e-9);
        assert!(c.min_quality_bounds.0 <= c.min_quality && c.min_quality <= c.min_quality_bounds.1);
    }
}
