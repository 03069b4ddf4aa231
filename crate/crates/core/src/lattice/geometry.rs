//! Shortest vectors and covering radii of (Z^k, G).

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use super::enumerate::{QuadraticDecomposition, SLACK};
use super::metric::{CollapsedMetric, GramSource, MAX_DIM};
use super::reduce;
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::linalg;

/// Precision doublings attempted before giving up.
pub const MAX_RETRIES: u32 = 4;
const ENUM_LIMIT: usize = 5_000_000;

/// Z^k with a reduced basis for a given Gram source, at a fixed precision.
#[derive(Clone, Debug)]
pub struct ReducedLattice {
    pub source: GramSource,
    pub prec: u32,
    /// Reduced basis vectors (rows) in ambient integer coordinates.
    pub basis: Vec<Vec<BigInt>>,
    /// Gram of the reduced basis.
    pub gram: Vec<Vec<Interval>>,
    pub gram_f64: Vec<Vec<f64>>,
    decomposition: QuadraticDecomposition,
}

impl ReducedLattice {
    pub fn new(source: &GramSource, prec: u32) -> Result<Self> {
        let k = source.dim();
        if k > MAX_DIM {
            return Err(Error::DimensionCap { dim: k, cap: MAX_DIM });
        }
        let g = source.entries(prec);
        let m = reduce::scaled_integer_gram(&g);
        let mut basis = reduce::lll(&m)?;
        if k == 2 {
            reduce::lagrange(&m, &mut basis);
        }
        let gram = reduce::transform_gram(&g, &basis);
        for (i, row) in gram.iter().enumerate() {
            if !row[i].is_positive() {
                return Err(Error::NotPositiveDefinite);
            }
            if row[i].rel_width() > 1e-12 {
                return Err(Error::PrecisionInsufficient { retries: 0 });
            }
        }
        let gram_f64: Vec<Vec<f64>> = gram.iter().map(|r| r.iter().map(Interval::mid_f64).collect()).collect();
        let decomposition = QuadraticDecomposition::new(&gram_f64)?;
        Ok(ReducedLattice { source: source.clone(), prec, basis, gram, gram_f64, decomposition })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Ambient coordinates of `Σ x_i b_i`.
    pub fn to_ambient(&self, x: &[i64]) -> Vec<BigInt> {
        let k = self.dim();
        let mut w = vec![BigInt::zero(); k];
        for (xi, b) in x.iter().zip(&self.basis) {
            if *xi == 0 {
                continue;
            }
            for (wj, bj) in w.iter_mut().zip(b) {
                *wj += bj * *xi;
            }
        }
        w
    }

    /// Points `x` (reduced coordinates) with `Q(x − c) ≤ bound`, with their f64 values.
    pub fn enumerate(&self, center: &[f64], bound: f64) -> Result<Vec<(Vec<i64>, f64)>> {
        let mut out = Vec::new();
        self.decomposition.enumerate(center, bound, ENUM_LIMIT, |x, v| out.push((x.to_vec(), v)))?;
        Ok(out)
    }

    /// `zᵀ R z` with the reduced Gram, as an enclosure.
    pub fn quad_reduced(&self, z: &[i64]) -> Interval {
        let mut acc = Interval::zero(self.prec);
        for i in 0..z.len() {
            for j in 0..z.len() {
                let c = z[i] as i128 * z[j] as i128;
                if c != 0 {
                    acc = &acc + &self.gram[i][j].mul_int(&BigInt::from(c));
                }
            }
        }
        acc
    }

    /// Gram–Schmidt squared norms for a given ordering of the reduced basis, in f64.
    fn gso_f64(&self, order: &[usize]) -> Vec<f64> {
        let k = order.len();
        let mut mu = vec![vec![0.0; k]; k];
        let mut b = vec![0.0; k];
        for i in 0..k {
            for j in 0..i {
                let mut s = self.gram_f64[order[i]][order[j]];
                for l in 0..j {
                    s -= mu[i][l] * mu[j][l] * b[l];
                }
                mu[i][j] = s / b[j];
            }
            b[i] = self.gram_f64[order[i]][order[i]] - (0..i).map(|j| mu[i][j] * mu[i][j] * b[j]).sum::<f64>();
        }
        b
    }

    /// Gram–Schmidt squared norms for an ordering, as enclosures.
    fn gso_interval(&self, order: &[usize]) -> Vec<Interval> {
        let k = order.len();
        let p = self.prec;
        let mut mu = vec![vec![Interval::zero(p); k]; k];
        let mut b: Vec<Interval> = Vec::with_capacity(k);
        for i in 0..k {
            for j in 0..i {
                let mut s = self.gram[order[i]][order[j]].clone();
                for l in 0..j {
                    s = &s - &(&(&mu[i][l] * &mu[j][l]) * &b[l]);
                }
                mu[i][j] = &s / &b[j];
            }
            let mut bi = self.gram[order[i]][order[i]].clone();
            for j in 0..i {
                bi = &bi - &(&mu[i][j].sqr() * &b[j]);
            }
            b.push(bi);
        }
        b
    }
}

#[derive(Clone, Debug)]
pub struct ShortestVector {
    pub w: Vec<BigInt>,
    pub norm2: Interval,
    pub length: f64,
    pub prec: u32,
}

/// Sign-normalised so the first nonzero coordinate is positive.
fn normalize_sign(mut w: Vec<BigInt>) -> Vec<BigInt> {
    if let Some(f) = w.iter().find(|x| !x.is_zero()) {
        if f.is_negative() {
            w.iter_mut().for_each(|x| *x = -&*x);
        }
    }
    w
}

/// Tie-break order: earliest nonzero coordinate first, then lexicographic.
fn tie_key(w: &[BigInt]) -> (usize, Vec<BigInt>) {
    (w.iter().position(|x| !x.is_zero()).unwrap_or(w.len()), w.to_vec())
}

/// Runs `f` at the source's base precision, doubling up to [`MAX_RETRIES`] times while it
/// reports insufficient precision.
pub fn with_retries<T>(source: &GramSource, mut f: impl FnMut(u32) -> Result<T>) -> Result<T> {
    let base = source.base_prec();
    for attempt in 0..=MAX_RETRIES {
        match f(base << attempt) {
            Err(Error::PrecisionInsufficient { .. }) => continue,
            other => return other,
        }
    }
    Err(Error::PrecisionInsufficient { retries: MAX_RETRIES })
}

/// Exact shortest nonzero vector of `(Z^k, G)`.
pub fn shortest_vector_source(source: &GramSource) -> Result<ShortestVector> {
    with_retries(source, |prec| shortest_at(source, prec))
}

fn shortest_at(source: &GramSource, prec: u32) -> Result<ShortestVector> {
    let lat = ReducedLattice::new(source, prec)?;
    let k = lat.dim();
    let min_diag = (0..k).map(|i| lat.gram_f64[i][i]).fold(f64::INFINITY, f64::min);
    let pts = lat.enumerate(&vec![0.0; k], min_diag * (1.0 + SLACK))?;
    let best = pts.iter().filter(|(x, _)| x.iter().any(|&c| c != 0)).map(|p| p.1).fold(f64::INFINITY, f64::min);
    let mut cands: Vec<Vec<BigInt>> = pts
        .iter()
        .filter(|(x, v)| x.iter().any(|&c| c != 0) && *v <= best * (1.0 + SLACK))
        .map(|(x, _)| normalize_sign(lat.to_ambient(x)))
        .collect();
    cands.sort_by_key(|w| tie_key(w));
    cands.dedup();
    if cands.is_empty() {
        return Err(Error::NotPositiveDefinite);
    }

    // Exact comparison when the metric is rational.
    if let Some(m) = source.exact_matrix() {
        let exact = GramSource::Exact(m);
        let norms: Vec<BigRational> = cands.iter().map(|w| exact.quad_form_rational(w).unwrap()).collect();
        let min = norms.iter().min().unwrap().clone();
        let i = norms.iter().position(|n| *n == min).unwrap();
        let norm2 = Interval::from_rational(&min, prec);
        let length = norm2.sqrt().mid_f64();
        return Ok(ShortestVector { w: cands[i].clone(), norm2, length, prec });
    }

    let norms: Vec<Interval> = cands.iter().map(|w| source.quad_form(w, prec)).collect();
    // The winner must be certainly ≤ every other candidate (exact ties allowed).
    let min_hi = norms.iter().map(|n| n.hi_rational()).min().unwrap();
    let contenders: Vec<usize> = (0..cands.len()).filter(|&i| norms[i].lo_rational() <= min_hi).collect();
    let first = contenders[0];
    for &i in &contenders[1..] {
        if norms[i].certain_cmp(&norms[first]) != Some(Ordering::Equal) {
            return Err(Error::PrecisionInsufficient { retries: 0 });
        }
    }
    let norm2 = norms[first].clone();
    let length = norm2.sqrt().mid_f64();
    Ok(ShortestVector { w: cands[first].clone(), norm2, length, prec })
}

pub fn shortest_vector(m: &CollapsedMetric) -> Result<ShortestVector> {
    shortest_vector_source(&m.source)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoveringRadius {
    pub lower: f64,
    pub upper: f64,
    /// True when lower = upper is the exact value (k = 2).
    pub exact: bool,
}

/// Covering radius (the diameter of the flat torus): exact for k = 2, bounds otherwise.
pub fn covering_radius_source(source: &GramSource) -> Result<CoveringRadius> {
    with_retries(source, |prec| {
        let lat = ReducedLattice::new(source, prec)?;
        if lat.dim() == 1 {
            let r = lat.gram[0][0].sqrt().mid_f64() / 2.0;
            return Ok(CoveringRadius { lower: r, upper: r, exact: true });
        }
        if lat.dim() == 2 { covering_2d(&lat) } else { covering_bounds(&lat) }
    })
}

pub fn covering_radius(m: &CollapsedMetric) -> Result<CoveringRadius> {
    covering_radius_source(&m.source)
}

/// Circumradius of the acute Delaunay triangle of a Lagrange-reduced basis.
fn covering_2d(lat: &ReducedLattice) -> Result<CoveringRadius> {
    let g = &lat.gram;
    let a2 = &g[0][0];
    let b2 = &g[1][1];
    let det = &(a2 * b2) - &g[0][1].sqr();
    if !det.is_positive() {
        return Err(Error::PrecisionInsufficient { retries: 0 });
    }
    let four_det = det.mul_i64(4);
    let ab = a2 * b2;
    let two_dot = g[0][1].mul_i64(2);
    // Of the two triangles spanned with b1 ± b2, the non-obtuse one has the smaller
    // circumradius, and that circumradius is the covering radius.
    let r_plus = &(&ab * &(&(a2 + b2) + &two_dot)) / &four_det;
    let r_minus = &(&ab * &(&(a2 + b2) - &two_dot)) / &four_det;
    let lo = r_plus.lo_rational().min(r_minus.lo_rational());
    let hi = r_plus.hi_rational().min(r_minus.hi_rational());
    let r2 = Interval::from_rational(&lo, lat.prec).hull(&Interval::from_rational(&hi, lat.prec));
    let r = r2.sqrt();
    if r.rel_width() > 1e-12 {
        return Err(Error::PrecisionInsufficient { retries: 0 });
    }
    let v = r.mid_f64();
    Ok(CoveringRadius { lower: v, upper: v, exact: true })
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 1 {
        return vec![vec![0]];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out
}

/// Sandwich bounds for k ≥ 3.
///
/// Upper: nearest-plane rounding reaches every point within ½√Σ‖b_i*‖², minimised over
/// basis orderings. Lower: the best of the layer spacing ½‖b_k*‖ over the choice of last
/// vector and exact closest-vector distances of the half-lattice points.
fn covering_bounds(lat: &ReducedLattice) -> Result<CoveringRadius> {
    let k = lat.dim();
    let best_order = permutations(k)
        .into_iter()
        .map(|o| {
            let s: f64 = lat.gso_f64(&o).iter().sum();
            (o, s)
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap()
        .0;
    let sum = lat.gso_interval(&best_order).into_iter().fold(Interval::zero(lat.prec), |acc, b| &acc + &b);
    let upper = sum.sqrt().hi_f64() / 2.0;

    // Layer spacing: ‖b_j*‖² with b_j last equals det R / cofactor_jj.
    let det = linalg::interval_det(&lat.gram);
    let adj = linalg::interval_adjugate(&lat.gram);
    let mut lower_sq = 0.0f64;
    for (j, row) in adj.iter().enumerate() {
        let spacing2 = &det / &row[j];
        lower_sq = lower_sq.max(spacing2.lo_f64() / 4.0);
    }

    // Half-lattice targets Σ e_i b_i / 2.
    let bound = 4.0 * upper * upper * (1.0 + SLACK);
    for mask in 1u32..(1 << k) {
        let e: Vec<i64> = (0..k).map(|i| ((mask >> i) & 1) as i64).collect();
        let c: Vec<f64> = e.iter().map(|&x| x as f64 / 2.0).collect();
        let pts = lat.enumerate(&c, bound / 4.0)?;
        let Some(best) = pts.iter().map(|p| p.1).min_by(f64::total_cmp) else { continue };
        let d2 = pts
            .iter()
            .filter(|p| p.1 <= best * (1.0 + SLACK) + 1e-300)
            .map(|(x, _)| {
                let z: Vec<i64> = x.iter().zip(&e).map(|(xi, ei)| 2 * xi - ei).collect();
                lat.quad_reduced(&z).lo_f64() / 4.0
            })
            .fold(f64::INFINITY, f64::min);
        lower_sq = lower_sq.max(d2);
    }
    let lower = lower_sq.max(0.0).sqrt();
    if lower > upper * (1.0 + 1e-12) {
        return Err(Error::PrecisionInsufficient { retries: 0 });
    }
    Ok(CoveringRadius { lower: lower.min(upper), upper, exact: false })
}

/// Length of the shortest dual vector (under G⁻¹).
pub fn dual_min(source: &GramSource) -> Result<f64> {
    Ok(shortest_vector_source(&source.dual()?)?.length)
}

/// Squared length of an ambient integer vector, in f64 (for reporting).
pub fn length_f64(source: &GramSource, w: &[BigInt]) -> f64 {
    source.quad_form(w, source.base_prec()).sqrt().mid_f64()
}

pub fn to_i64_vec(w: &[BigInt]) -> Option<Vec<i64>> {
    w.iter().map(|x| x.to_i64()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::metric::gram;
    use crate::real::RealInput;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn identity_shortest_is_first_axis() {
        let src = GramSource::from_f64(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let s = shortest_vector_source(&src).unwrap();
        assert_eq!(s.w, ints(&[1, 0]));
        assert_eq!(s.length, 1.0);
    }

    #[test]
    fn axis_aligned_collapse() {
        let m = gram(2, &[RealInput::rational(0, 1)], 0.25).unwrap();
        let s = shortest_vector(&m).unwrap();
        assert_eq!(s.w, ints(&[1, 0]));
        assert_eq!(s.length, 0.25);
        let c = covering_radius(&m).unwrap();
        assert!((c.upper - (0.0625f64 + 1.0).sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn identity_covering_radii() {
        let i2 = GramSource::from_f64(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let c = covering_radius_source(&i2).unwrap();
        assert!(c.exact);
        assert!((c.upper - std::f64::consts::SQRT_2 / 2.0).abs() < 1e-15);
        let i3 = GramSource::from_f64(&[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]).unwrap();
        let c = covering_radius_source(&i3).unwrap();
        let r = 3f64.sqrt() / 2.0;
        assert!(c.lower <= r + 1e-12 && r <= c.upper + 1e-12, "{c:?}");
    }

    #[test]
    fn hexagonal_covering_radius() {
        // A2 with unit minimal vectors: covering radius 1/√3.
        let src = GramSource::from_f64(&[vec![1.0, 0.5], vec![0.5, 1.0]]).unwrap();
        let c = covering_radius_source(&src).unwrap();
        assert!((c.upper - 1.0 / 3f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn fibonacci_scale_shortest_vector() {
        // Near the convergent scale the shortest vector is a convergent (q_n, p_n) of φ,
        // i.e. a pair of consecutive Fibonacci numbers nearly parallel to (1, φ).
        let s = shortest_vector(&gram(2, &[RealInput::phi()], 1.0 / (89.0 * 89.0)).unwrap()).unwrap();
        let w: Vec<i64> = to_i64_vec(&s.w).unwrap();
        let fib = [1i64, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144, 233];
        assert!(fib.windows(2).any(|p| w[0] == p[0] && w[1] == p[1]), "{w:?}");
    }

    #[test]
    fn dimension_cap() {
        let alpha: Vec<RealInput> = (2..9).map(|n| RealInput::sqrt(n).unwrap()).collect();
        let m = gram(8, &alpha, 0.5).unwrap();
        assert!(matches!(shortest_vector(&m), Err(Error::DimensionCap { dim: 8, cap: 6 })));
    }

    #[test]
    fn permutations_count() {
        assert_eq!(permutations(4).len(), 24);
    }
}
