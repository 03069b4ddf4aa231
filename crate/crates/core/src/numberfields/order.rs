//! The order Z[θ] of a real number field, with power basis 1, θ, …, θ^{k-1}.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::linalg::IntMatrix;
use crate::poly::IntPoly;
use crate::real::RealInput;

/// Number of real roots and of complex-conjugate pairs, by Sturm sequences.
pub fn signature(f: &IntPoly) -> Result<(usize, usize)> {
    if f.degree() == 0 {
        return Err(Error::InvalidInput("constant polynomial".into()));
    }
    if !f.is_squarefree() {
        return Err(Error::NotSquarefree);
    }
    let r = f.count_real_roots();
    Ok((r, (f.degree() - r) / 2))
}

#[derive(Clone, Debug, PartialEq)]
pub struct UnitRank {
    pub k: usize,
    pub r: usize,
    pub s: usize,
    pub rank: usize,
    /// rank ≤ k - 1
    pub upper_ok: bool,
    /// ⌈(k-1)/2⌉, what r ≥ 1 actually forces
    pub dirichlet_lower: usize,
    /// ⌊(k+1)/2⌋, the lower bound as it is usually quoted for this remark
    pub claimed_lower: usize,
    pub meets_claimed_lower: bool,
}

/// Dirichlet rank r + s - 1, with the range comparisons.
pub fn unit_rank(f: &IntPoly) -> Result<UnitRank> {
    let (r, s) = signature(f)?;
    let k = f.degree();
    if r == 0 {
        return Err(Error::InvalidInput(format!("{f} has no real root")));
    }
    let rank = r + s - 1;
    let claimed_lower = k.div_ceil(2);
    Ok(UnitRank {
        k,
        r,
        s,
        rank,
        upper_ok: rank < k,
        dirichlet_lower: k / 2,
        claimed_lower,
        meets_claimed_lower: rank >= claimed_lower,
    })
}

/// Z[θ] for a monic irreducible f with at least one real root. θ is the largest real
/// root.
#[derive(Clone, Debug)]
pub struct NumberFieldOrder {
    pub f: IntPoly,
    pub k: usize,
    pub r: usize,
    pub s: usize,
    pub lo: BigRational,
    pub hi: BigRational,
    /// Multiplication by θ: column j holds the coordinates of θ^{j+1}.
    companion: IntMatrix,
}

impl NumberFieldOrder {
    pub fn new(f: IntPoly) -> Result<Self> {
        if !f.is_monic() {
            return Err(Error::InvalidInput(format!("{f} is not monic")));
        }
        match f.is_irreducible() {
            Some(true) => {}
            Some(false) => return Err(Error::InvalidInput(format!("{f} is reducible over Q"))),
            None => return Err(Error::InvalidInput(format!("cannot certify irreducibility of {f} (degree > 4)"))),
        }
        let (r, s) = signature(&f)?;
        if r == 0 {
            return Err(Error::InvalidInput(format!("{f} has no real root")));
        }
        let (lo, hi) = f.isolate_real_roots().pop().expect("r ≥ 1");
        let k = f.degree();
        let mut companion = vec![vec![BigInt::zero(); k]; k];
        for j in 0..k {
            let c = IntPoly::new([vec![BigInt::zero(); j + 1], vec![BigInt::one()]].concat()).rem_monic(&f);
            for (i, x) in c.coeffs().iter().enumerate() {
                companion[i][j] = x.clone();
            }
        }
        Ok(NumberFieldOrder { f, k, r, s, lo, hi, companion })
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::new(IntPoly::parse(s)?)
    }

    pub fn quadratic(d: i64) -> Result<Self> {
        Self::new(IntPoly::from_i64(&[-d, 0, 1]))
    }

    pub fn theta(&self) -> RealInput {
        RealInput::root(self.f.clone(), self.lo.clone(), self.hi.clone()).expect("isolating interval of a simple root")
    }

    pub fn rank(&self) -> UnitRank {
        unit_rank(&self.f).expect("validated at construction")
    }

    pub fn companion(&self) -> &IntMatrix {
        &self.companion
    }

    pub fn element(&self, coeffs: Vec<BigInt>) -> OrderElement {
        let g = IntPoly::new(coeffs).rem_monic(&self.f);
        let mut c = g.coeffs().to_vec();
        c.resize(self.k, BigInt::zero());
        let norm = if g.is_zero() { BigInt::zero() } else { self.f.resultant(&g) };
        OrderElement { coeffs: c, norm }
    }

    pub fn element_i64(&self, coeffs: &[i64]) -> OrderElement {
        self.element(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn one(&self) -> OrderElement {
        self.element_i64(&[1])
    }

    pub fn mul(&self, a: &OrderElement, b: &OrderElement) -> OrderElement {
        let p = IntPoly::new(a.coeffs.clone()).mul(&IntPoly::new(b.coeffs.clone()));
        self.element(p.coeffs().to_vec())
    }

    pub fn pow(&self, a: &OrderElement, n: u32) -> OrderElement {
        (0..n).fold(self.one(), |acc, _| self.mul(&acc, a))
    }

    /// Enclosure of the θ-embedding.
    pub fn embed(&self, a: &OrderElement, prec: u32) -> Interval {
        let expr = IntPoly::new(a.coeffs.clone());
        if expr.degree() == 0 {
            return Interval::from_int(expr.coeffs()[0].clone(), prec);
        }
        RealInput::Algebraic { poly: self.f.clone(), lo: self.lo.clone(), hi: self.hi.clone(), expr }.eval(prec)
    }

    /// Enclosures of 1, θ, …, θ^{k-1}.
    pub fn power_basis(&self, prec: u32) -> Vec<Interval> {
        let t = self.theta().eval(prec + 16);
        let mut out = vec![Interval::one(prec + 16)];
        for i in 1..self.k {
            let next = &out[i - 1] * &t;
            out.push(next);
        }
        out.into_iter().map(|x| x.with_prec(prec)).collect()
    }
}

impl fmt::Display for NumberFieldOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z[θ], θ ≈ {:.12} root of {}", self.theta().to_f64(), self.f)
    }
}

/// Σ c_i θ^i with its field norm.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OrderElement {
    pub coeffs: Vec<BigInt>,
    pub norm: BigInt,
}

impl OrderElement {
    pub fn is_unit(&self) -> bool {
        self.norm.abs().is_one()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    pub fn coeffs_i64(&self) -> Vec<i64> {
        self.coeffs.iter().map(|c| i64::try_from(c).unwrap_or(i64::MAX)).collect()
    }
}

impl fmt::Display for OrderElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let a = c.abs();
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let coef = if a.is_one() && i > 0 { String::new() } else { a.to_string() };
            match i {
                0 => write!(f, "{a}")?,
                1 => write!(f, "{coef}θ")?,
                _ => write!(f, "{coef}θ^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}
