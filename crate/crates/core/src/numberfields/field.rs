//! Exact arithmetic in Q(θ) for a real algebraic θ.
//!
//! θ is given by a squarefree polynomial and an isolating interval. The modulus is not
//! required to be irreducible: when a zero test or an inversion meets a proper factor,
//! the modulus is replaced by whichever factor still vanishes at θ. Every answer is
//! therefore correct for θ itself, without factoring over Q up front.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::linalg;
use crate::poly::{self, IntPoly, RatPoly};
use crate::real::RealInput;

#[derive(Clone, Debug)]
pub struct RealField {
    modulus: RatPoly,
    lo: BigRational,
    hi: BigRational,
}

fn rat_int(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Clears denominators: returns `(g, den)` with `e = g / den`, `g` integral, `den > 0`.
pub fn split_denominator(e: &RatPoly) -> (IntPoly, BigInt) {
    let den = e.coeffs().iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let g = IntPoly::new(e.coeffs().iter().map(|c| (c * rat_int(den.clone())).to_integer()).collect());
    (g, den)
}

impl RealField {
    /// The field generated by the root of `poly` in `(lo, hi]`.
    pub fn new(poly: &IntPoly, lo: BigRational, hi: BigRational) -> Result<Self> {
        if poly.degree() == 0 {
            return Err(Error::InvalidInput("constant modulus".into()));
        }
        if !poly.is_squarefree() {
            return Err(Error::NotSquarefree);
        }
        if lo >= hi || poly.count_roots_in(&lo, &hi) != 1 {
            return Err(Error::InvalidIsolatingInterval(format!("{poly} on ({lo}, {hi}]")));
        }
        Ok(RealField { modulus: poly.to_rat().monic(), lo, hi })
    }

    /// Q(√d) with generator +√d.
    pub fn quadratic(d: &BigInt) -> Result<Self> {
        let f = IntPoly::new(vec![-d.clone(), BigInt::zero(), BigInt::one()]);
        Self::new(&f, BigRational::zero(), rat_int(d.clone()))
    }

    /// The field attached to a non-rational exact real and the element it represents.
    pub fn from_real(x: &RealInput) -> Option<(Self, RatPoly)> {
        match x {
            RealInput::Surd { a, b, c, d } => {
                let f = Self::quadratic(d).ok()?;
                let cr = rat_int(c.clone());
                let e = RatPoly::new(vec![rat_int(a.clone()) / &cr, rat_int(b.clone()) / &cr]);
                Some((f, e))
            }
            RealInput::Algebraic { poly, lo, hi, expr } => {
                let f = Self::new(poly, lo.clone(), hi.clone()).ok()?;
                let e = f.reduce(&expr.to_rat());
                Some((f, e))
            }
            _ => None,
        }
    }

    /// Two descriptions of the same generator.
    pub fn same_generator(&self, other: &RealField) -> bool {
        self.modulus == other.modulus && self.lo < other.hi && other.lo < self.hi
    }

    pub fn modulus(&self) -> IntPoly {
        self.modulus.to_primitive_int()
    }

    pub fn degree(&self) -> usize {
        self.modulus.degree()
    }

    pub fn interval(&self) -> (&BigRational, &BigRational) {
        (&self.lo, &self.hi)
    }

    /// `Some(true)` when the current modulus is certified irreducible.
    pub fn is_minimal(&self) -> Option<bool> {
        self.modulus().is_irreducible()
    }

    pub fn reduce(&self, e: &RatPoly) -> RatPoly {
        e.div_rem(&self.modulus).1
    }

    pub fn mul(&self, a: &RatPoly, b: &RatPoly) -> RatPoly {
        self.reduce(&a.mul(b))
    }

    pub fn generator(&self) -> RatPoly {
        self.reduce(&RatPoly::from_int(&IntPoly::x()))
    }

    pub fn from_int(&self, n: &BigInt) -> RatPoly {
        RatPoly::constant(rat_int(n.clone()))
    }

    fn vanishes_at_theta(&self, g: &RatPoly) -> bool {
        g.to_primitive_int().count_roots_in(&self.lo, &self.hi) > 0
    }

    /// Exact test of `e(θ) = 0`. May shrink the modulus.
    pub fn is_zero(&mut self, e: &RatPoly) -> bool {
        let e = self.reduce(e);
        if e.is_zero() {
            return true;
        }
        let g = e.gcd(&self.modulus);
        if g.degree() == 0 {
            return false;
        }
        if self.vanishes_at_theta(&g) {
            self.modulus = g;
            true
        } else {
            self.modulus = self.modulus.div_rem(&g).0.monic();
            false
        }
    }

    /// `1/e(θ)`, or `None` when `e(θ) = 0`.
    pub fn inv(&mut self, e: &RatPoly) -> Option<RatPoly> {
        if self.is_zero(e) {
            return None;
        }
        // e and the modulus are now coprime
        let e = self.reduce(e);
        let (g, s, _) = ext_gcd(&e, &self.modulus);
        debug_assert_eq!(g.degree(), 0);
        Some(self.reduce(&s.scale(&g.coeffs()[0].recip())))
    }

    pub fn div(&mut self, a: &RatPoly, b: &RatPoly) -> Option<RatPoly> {
        let bi = self.inv(b)?;
        Some(self.mul(a, &bi))
    }

    /// Enclosure of θ of width at most `2^-bits`.
    pub fn theta(&self, bits: u32) -> Interval {
        let f = self.modulus();
        let (l, h) = poly::refine_root(&f, &self.lo, &self.hi, bits);
        let p = bits + 4;
        Interval::from_rational(&l, p).hull(&Interval::from_rational(&h, p))
    }

    /// Enclosure of `e(θ)` of width at most about `2^-prec`.
    pub fn eval(&self, e: &RatPoly, prec: u32) -> Interval {
        let (g, den) = split_denominator(&self.reduce(e));
        let target = BigRational::new(BigInt::one(), BigInt::one() << prec);
        let mut extra = 16u32;
        loop {
            let t = self.theta(prec + extra);
            let p = t.prec();
            let v = &g.eval_interval(&t) / &Interval::from_int(den.clone(), p);
            if v.hi_rational() - v.lo_rational() <= target || extra > 4096 {
                return v.with_prec(prec);
            }
            extra *= 2;
        }
    }

    /// Sign of `e(θ)`, exact.
    pub fn sign(&mut self, e: &RatPoly) -> std::cmp::Ordering {
        if self.is_zero(e) {
            return std::cmp::Ordering::Equal;
        }
        let mut prec = 64;
        loop {
            if let Some(s) = self.eval(e, prec).sign() {
                return s;
            }
            prec *= 2;
        }
    }

    /// Matrix of multiplication by `e` on the basis `1, θ, …, θ^{d-1}` of the current
    /// modulus; column `j` holds the coordinates of `e·θ^j`.
    pub fn mult_matrix(&self, e: &RatPoly) -> Vec<Vec<BigRational>> {
        let d = self.degree();
        let mut m = vec![vec![BigRational::zero(); d]; d];
        let mut col = self.reduce(e);
        let x = RatPoly::from_int(&IntPoly::x());
        for j in 0..d {
            for (i, c) in col.coeffs().iter().enumerate() {
                m[i][j] = c.clone();
            }
            col = self.mul(&col, &x);
        }
        m
    }

    /// `e(θ)` as a standalone real input. Quadratic fields give surds; integral
    /// elements of higher degree keep θ's polynomial; anything else gets its own
    /// defining polynomial from the characteristic polynomial of multiplication by `e`.
    pub fn to_real(&mut self, e: &RatPoly) -> Result<RealInput> {
        let e = self.reduce(e);
        if e.degree() == 0 {
            return Ok(RealInput::Rational(e.coeffs()[0].clone()));
        }
        if self.degree() == 2 {
            return self.quadratic_real(&e);
        }
        let (g, den) = split_denominator(&e);
        if den.is_one() {
            return RealInput::algebraic(self.modulus(), self.lo.clone(), self.hi.clone(), g);
        }
        let m = self.mult_matrix(&e);
        let n = m.iter().flatten().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let mi: Vec<Vec<BigInt>> =
            m.iter().map(|r| r.iter().map(|c| (c * rat_int(n.clone())).to_integer()).collect()).collect();
        // n·e(θ) is a root of charpoly(n·M), so e(θ) is a root of h(n x)
        let h = poly::charpoly(&mi);
        let mut pw = BigInt::one();
        let mut scaled = Vec::with_capacity(h.coeffs().len());
        for c in h.coeffs() {
            scaled.push(c * &pw);
            pw *= &n;
        }
        let h = IntPoly::new(scaled).to_rat();
        let sq = h.div_rem(&h.gcd(&h.derivative())).0.to_primitive_int();
        let roots = sq.isolate_real_roots();
        let mut prec = 64;
        loop {
            let v = self.eval(&e, prec);
            let (vl, vh) = (v.lo_rational(), v.hi_rational());
            let hits: Vec<_> = roots.iter().filter(|(l, h)| *l <= vh && vl <= *h).collect();
            if hits.len() == 1 {
                let (l, h) = hits[0].clone();
                if l == h {
                    return Ok(RealInput::Rational(l));
                }
                return RealInput::root(sq, l, h);
            }
            if prec > 1 << 14 {
                return Err(Error::PrecisionInsufficient { retries: 8 });
            }
            prec *= 2;
        }
    }

    fn quadratic_real(&mut self, e: &RatPoly) -> Result<RealInput> {
        // modulus x² + b x + c, θ = (-b ± √Δ)/2
        let mc = self.modulus.coeffs().to_vec();
        let (c, b) = (&mc[0], &mc[1]);
        let two = rat_int(2);
        let disc = b * b - rat_int(4) * c;
        let half_b = b / &two;
        let plus = self.sign(&self.generator().add(&RatPoly::constant(half_b.clone()))) == std::cmp::Ordering::Greater;
        let (e0, e1) = (e.coeffs()[0].clone(), e.coeffs()[1].clone());
        // e = e0 + e1 θ = (e0 - e1 b/2) ± (e1/2) √Δ, and √(n/m) = √(n m)/m
        let a = &e0 - &e1 * &half_b;
        let (n, m) = (disc.numer().clone(), disc.denom().clone());
        let (sq, rad) = square_part(&(&n * &m));
        let mut coef = &e1 / &two * rat_int(sq) / rat_int(m);
        if !plus {
            coef = -coef;
        }
        let den = a.denom().lcm(coef.denom());
        let an = (&a * rat_int(den.clone())).to_integer();
        let bn = (&coef * rat_int(den.clone())).to_integer();
        let g = an.gcd(&bn).gcd(&den);
        RealInput::surd_big(an / &g, bn / &g, den / &g, rad)
    }
}

/// `n = s² r` with `r` free of small square factors.
fn square_part(n: &BigInt) -> (BigInt, BigInt) {
    let mut r = n.clone();
    let mut s = BigInt::one();
    let mut p = BigInt::from(2);
    while &p * &p <= r && p < BigInt::from(1_000_000) {
        let pp = &p * &p;
        while (&r % &pp).is_zero() {
            r /= &pp;
            s *= &p;
        }
        p += 1;
    }
    (s, r)
}

/// Extended Euclid: `(g, s, t)` with `s a + t b = g`.
pub fn ext_gcd(a: &RatPoly, b: &RatPoly) -> (RatPoly, RatPoly, RatPoly) {
    let zero = RatPoly::constant(BigRational::zero());
    let one = RatPoly::constant(BigRational::one());
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (one.clone(), zero.clone());
    let (mut t0, mut t1) = (zero, one);
    while !r1.is_zero() {
        let (q, r) = r0.div_rem(&r1);
        let s2 = s0.sub(&q.mul(&s1));
        let t2 = t0.sub(&q.mul(&t1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    (r0, s0, t0)
}

/// Basis of the right kernel of a matrix over the field, from its reduced row echelon
/// form. Each basis vector has a 1 in its free position.
pub fn kernel(field: &mut RealField, m: &[Vec<RatPoly>]) -> Vec<Vec<RatPoly>> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut a: Vec<Vec<RatPoly>> = m.iter().map(|r| r.iter().map(|x| field.reduce(x)).collect()).collect();
    let zero = RatPoly::constant(BigRational::zero());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !field.is_zero(&a[i][c])) else { continue };
        a.swap(r, p);
        let inv = field.inv(&a[r][c]).expect("pivot is nonzero");
        a[r] = a[r].iter().map(|x| field.mul(x, &inv)).collect();
        for i in 0..rows {
            if i != r && !field.is_zero(&a[i][c]) {
                let f = a[i][c].clone();
                let pr = a[r].clone();
                for (x, y) in a[i].iter_mut().zip(&pr) {
                    *x = field.reduce(&x.sub(&field.mul(&f, y)));
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![zero.clone(); cols];
            v[f] = RatPoly::constant(BigRational::one());
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = field.reduce(&a[row][f].scale(&-BigRational::one()));
            }
            v
        })
        .collect()
}

/// Exact Q-rank of field elements, through their coordinates on the current modulus.
/// Meaningful only when the modulus is minimal.
pub fn q_rank(field: &RealField, elems: &[RatPoly]) -> usize {
    let d = field.degree();
    let rows: Vec<Vec<BigRational>> = elems
        .iter()
        .map(|e| {
            let e = field.reduce(e);
            (0..d).map(|i| e.coeffs().get(i).cloned().unwrap_or_else(BigRational::zero)).collect()
        })
        .collect();
    linalg::rat_rank(&rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rp(c: &[i64]) -> RatPoly {
        IntPoly::from_i64(c).to_rat()
    }

    #[test]
    fn inverse_in_q_sqrt2() {
        let mut f = RealField::quadratic(&2.into()).unwrap();
        let a = rp(&[1, 1]);
        let ai = f.inv(&a).unwrap();
        assert_eq!(ai, rp(&[-1, 1]));
        assert_eq!(f.to_real(&a).unwrap().to_string(), "surd:1,1,1,2");
    }

    #[test]
    fn reducible_modulus_splits_at_theta() {
        // (x² - 2)(x - 3), θ = √2: x - 3 is invertible, x² - 2 vanishes
        let p = IntPoly::from_i64(&[-2, 0, 1]).mul(&IntPoly::from_i64(&[-3, 1]));
        let mut f = RealField::new(&p, BigRational::one(), rat_int(2)).unwrap();
        assert!(!f.is_zero(&rp(&[-3, 1])));
        assert_eq!(f.degree(), 2);
        let mut g = RealField::new(&p, BigRational::one(), rat_int(2)).unwrap();
        assert!(g.is_zero(&rp(&[-2, 0, 1])));
    }

    #[test]
    fn golden_quadratic_prints_as_surd() {
        let mut f = RealField::new(&IntPoly::from_i64(&[1, -3, 1]), rat_int(2), rat_int(3)).unwrap();
        // θ = (3 + √5)/2, θ - 2 = (√5 - 1)/2
        let e = f.reduce(&rp(&[-2, 1]));
        assert_eq!(f.to_real(&e).unwrap().to_string(), "surd:-1,1,2,5");
    }

    #[test]
    fn cubic_with_denominators_gets_own_polynomial() {
        let mut f = RealField::new(&IntPoly::from_i64(&[-2, 0, 0, 1]), BigRational::one(), rat_int(2)).unwrap();
        let e = RatPoly::new(vec![BigRational::zero(), BigRational::new(1.into(), 2.into())]);
        let x = f.to_real(&e).unwrap();
        assert!((x.to_f64() - 2f64.cbrt() / 2.0).abs() < 1e-14);
        let RealInput::Algebraic { poly, .. } = x else { panic!("{x:?}") };
        assert_eq!(poly, IntPoly::from_i64(&[-1, 0, 0, 4]));
    }

    #[test]
    fn kernel_of_golden_eigenproblem() {
        let mut f = RealField::new(&IntPoly::from_i64(&[1, -3, 1]), rat_int(2), rat_int(3)).unwrap();
        let th = f.generator();
        let c = |n: i64| RatPoly::constant(rat_int(n));
        let m = vec![vec![c(2).sub(&th), c(1)], vec![c(1), c(1).sub(&th)]];
        let k = kernel(&mut f, &m);
        assert_eq!(k.len(), 1);
        let v0 = f.eval(&k[0][0], 60).mid_f64();
        let v1 = f.eval(&k[0][1], 60).mid_f64();
        assert!((v0 / v1 - 1.618033988749895).abs() < 1e-12);
    }
}
