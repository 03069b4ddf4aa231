//! Univariate polynomials with integer and rational coefficients.
//!
//! Coefficients are stored lowest degree first. Provides what the number-field
//! and real-input code needs: Sturm sequences and real-root isolation,
//! resultants, squarefree decomposition and small-degree irreducibility tests.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::linalg;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

#[derive(Clone, PartialEq, Debug)]
pub struct RatPoly {
    coeffs: Vec<BigRational>,
}

fn rat(n: &BigInt) -> BigRational {
    BigRational::from_integer(n.clone())
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(BigInt::zero());
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        Self::from_i64(&[0, 1])
    }

    /// Parses `x^3-x-1`, `2*x^2 + 3x - 7`, or a plain integer.
    pub fn parse(s: &str) -> Result<Self> {
        let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if cleaned.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let mut terms: Vec<String> = Vec::new();
        let mut cur = String::new();
        for (i, ch) in cleaned.chars().enumerate() {
            if (ch == '+' || ch == '-') && i > 0 && !cur.ends_with('^') {
                terms.push(std::mem::take(&mut cur));
            }
            cur.push(ch);
        }
        terms.push(cur);
        let mut coeffs: Vec<BigInt> = Vec::new();
        for t in terms {
            let (sign, body) = match t.strip_prefix('-') {
                Some(b) => (-1, b.to_string()),
                None => (1, t.trim_start_matches('+').to_string()),
            };
            if body.is_empty() {
                return Err(Error::Parse(format!("dangling sign in '{s}'")));
            }
            let (coef, deg) = match body.find('x') {
                None => (body.parse::<BigInt>().map_err(|_| Error::Parse(format!("bad term '{body}'")))?, 0usize),
                Some(pos) => {
                    let c = body[..pos].trim_end_matches('*');
                    let c = if c.is_empty() {
                        BigInt::one()
                    } else {
                        c.parse::<BigInt>().map_err(|_| Error::Parse(format!("bad coefficient '{c}'")))?
                    };
                    let rest = &body[pos + 1..];
                    let d = if rest.is_empty() {
                        1
                    } else {
                        rest.strip_prefix('^')
                            .and_then(|e| e.parse::<usize>().ok())
                            .ok_or_else(|| Error::Parse(format!("bad exponent in '{body}'")))?
                    };
                    (c, d)
                }
            };
            if coeffs.len() <= deg {
                coeffs.resize(deg + 1, BigInt::zero());
            }
            coeffs[deg] += coef * sign;
        }
        Ok(Self::new(coeffs))
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_zero()
    }

    pub fn leading(&self) -> &BigInt {
        self.coeffs.last().unwrap()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_one()
    }

    pub fn to_rat(&self) -> RatPoly {
        RatPoly::new(self.coeffs.iter().map(rat).collect())
    }

    pub fn derivative(&self) -> IntPoly {
        if self.degree() == 0 {
            return IntPoly::from_i64(&[0]);
        }
        IntPoly::new(self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect())
    }

    pub fn eval_int(&self, x: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_rat(&self, x: &BigRational) -> BigRational {
        self.coeffs.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + rat(c))
    }

    pub fn eval_interval(&self, x: &Interval) -> Interval {
        let p = x.prec();
        self.coeffs
            .iter()
            .rev()
            .fold(Interval::zero(p), |acc, c| &(&acc * x) + &Interval::from_int(c.clone(), p))
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }

    /// Remainder of `self` modulo a monic polynomial, staying in Z[x].
    pub fn rem_monic(&self, m: &IntPoly) -> IntPoly {
        assert!(m.is_monic(), "rem_monic needs a monic modulus");
        let k = m.degree();
        let mut c = self.coeffs.clone();
        while c.len() > k {
            let top = c.pop().unwrap();
            if top.is_zero() {
                continue;
            }
            let shift = c.len() - k;
            for (i, mi) in m.coeffs.iter().take(k).enumerate() {
                c[shift + i] -= &top * mi;
            }
        }
        IntPoly::new(c)
    }

    pub fn is_squarefree(&self) -> bool {
        self.to_rat().gcd(&self.derivative().to_rat()).degree() == 0
    }

    /// Resultant via the Sylvester determinant.
    pub fn resultant(&self, other: &IntPoly) -> BigInt {
        let m = self.degree();
        let n = other.degree();
        if m == 0 && n == 0 {
            return BigInt::one();
        }
        let size = m + n;
        let mut s = vec![vec![BigInt::zero(); size]; size];
        for row in 0..n {
            for (i, c) in self.coeffs.iter().rev().enumerate() {
                s[row][row + i] = c.clone();
            }
        }
        for row in 0..m {
            for (i, c) in other.coeffs.iter().rev().enumerate() {
                s[n + row][row + i] = c.clone();
            }
        }
        linalg::det_bareiss(&s)
    }

    /// Real roots counted by sign changes of the Sturm sequence at the infinities.
    pub fn count_real_roots(&self) -> usize {
        let seq = sturm_sequence(&self.to_rat());
        let at = |pos: bool| -> usize {
            let signs: Vec<i32> = seq
                .iter()
                .filter(|p| !p.is_zero())
                .map(|p| {
                    let s = if p.leading().is_positive() { 1 } else { -1 };
                    if pos || p.degree() % 2 == 0 { s } else { -s }
                })
                .collect();
            sign_changes(&signs)
        };
        at(false) - at(true)
    }

    /// Number of distinct real roots in the half-open interval `(lo, hi]`.
    pub fn count_roots_in(&self, lo: &BigRational, hi: &BigRational) -> usize {
        let seq = sturm_sequence(&self.to_rat());
        let v = |x: &BigRational| -> usize {
            let signs: Vec<i32> = seq
                .iter()
                .map(|p| p.eval(x))
                .filter(|y| !y.is_zero())
                .map(|y| if y.is_positive() { 1 } else { -1 })
                .collect();
            sign_changes(&signs)
        };
        v(lo).saturating_sub(v(hi))
    }

    /// Isolating intervals `(lo, hi]` (or degenerate `[r, r]` for rational roots) for
    /// every real root, in increasing order.
    pub fn isolate_real_roots(&self) -> Vec<(BigRational, BigRational)> {
        let f = self.to_rat();
        let bound = cauchy_bound(&f);
        let mut out = Vec::new();
        let mut stack = vec![(-bound.clone(), bound)];
        while let Some((lo, hi)) = stack.pop() {
            let n = self.count_roots_in(&lo, &hi);
            if n == 0 {
                continue;
            }
            if n == 1 {
                out.push((lo, hi));
                continue;
            }
            let mid = (&lo + &hi) / BigRational::from_integer(2.into());
            if f.eval(&mid).is_zero() {
                out.push((mid.clone(), mid.clone()));
            }
            stack.push((lo, mid.clone()));
            stack.push((mid, hi));
        }
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    }

    /// Rational roots via the rational root theorem.
    pub fn rational_roots(&self) -> Vec<BigRational> {
        let mut f = self.coeffs.clone();
        let mut roots = Vec::new();
        while f.len() > 1 && f[0].is_zero() {
            f.remove(0);
            if !roots.contains(&BigRational::zero()) {
                roots.push(BigRational::zero());
            }
        }
        let g = IntPoly::new(f);
        if g.degree() == 0 {
            return roots;
        }
        let ps = divisors(&g.coeffs[0]);
        let qs = divisors(g.leading());
        for p in &ps {
            for q in &qs {
                for s in [1, -1] {
                    let r = BigRational::new(p * s, q.clone());
                    if g.eval_rat(&r).is_zero() && !roots.contains(&r) {
                        roots.push(r);
                    }
                }
            }
        }
        roots.sort();
        roots
    }

    /// Irreducibility over Q for monic polynomials of degree at most 4; `None` beyond that.
    pub fn is_irreducible(&self) -> Option<bool> {
        let d = self.degree();
        if d == 0 {
            return Some(false);
        }
        if d == 1 {
            return Some(true);
        }
        if !self.rational_roots().is_empty() {
            return Some(false);
        }
        match d {
            2 | 3 => Some(true),
            4 if self.is_monic() => Some(!self.has_monic_quadratic_factor()),
            _ => None,
        }
    }

    fn has_monic_quadratic_factor(&self) -> bool {
        // (x^2 + a x + b)(x^2 + c x + d) with integer coefficients (Gauss's lemma).
        let c = &self.coeffs;
        let (a0, a1, a2, a3) = (&c[0], &c[1], &c[2], &c[3]);
        for b_abs in divisors(a0) {
            for b in [b_abs.clone(), -b_abs] {
                let d = a0 / &b;
                // a + c = a3, a c = a2 - b - d
                let s = a3.clone();
                let p = a2 - &b - &d;
                let disc = &s * &s - BigInt::from(4) * &p;
                if disc.is_negative() {
                    continue;
                }
                let r = disc.sqrt();
                if &r * &r != disc {
                    continue;
                }
                for root in [&s + &r, &s - &r] {
                    if root.is_odd() {
                        continue;
                    }
                    let a = &root / 2;
                    let cc = &s - &a;
                    if &a * &d + &b * &cc == *a1 {
                        return true;
                    }
                }
            }
        }
        false
    }

    /// Squarefree decomposition: `(multiplicity, factor)` with non-constant factors.
    pub fn squarefree_decomposition(&self) -> Vec<(usize, RatPoly)> {
        yun(&self.to_rat())
    }
}

fn sign_changes(signs: &[i32]) -> usize {
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    if n.is_zero() {
        return vec![BigInt::one()];
    }
    let mut out = Vec::new();
    let mut i = BigInt::one();
    while &i * &i <= n {
        if (&n % &i).is_zero() {
            out.push(i.clone());
            let j = &n / &i;
            if j != i {
                out.push(j);
            }
        }
        i += 1;
    }
    out.sort();
    out
}

fn cauchy_bound(f: &RatPoly) -> BigRational {
    let lead = f.leading().abs();
    let m = f.coeffs.iter().take(f.degree()).map(|c| c.abs() / &lead).max().unwrap_or_else(BigRational::zero);
    // Round up to an integer so bisection midpoints stay dyadic-friendly.
    BigRational::from_integer((m + BigRational::one()).ceil().to_integer())
}

impl fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() && self.degree() > 0 {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            first = false;
            match i {
                0 => write!(f, "{a}")?,
                _ => {
                    if !a.is_one() {
                        write!(f, "{a}*")?;
                    }
                    if i == 1 { write!(f, "x")? } else { write!(f, "x^{i}")? }
                }
            }
        }
        Ok(())
    }
}

impl RatPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(BigRational::zero());
        }
        RatPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_zero()
    }

    pub fn leading(&self) -> &BigRational {
        self.coeffs.last().unwrap()
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> RatPoly {
        if self.degree() == 0 {
            return RatPoly::new(vec![BigRational::zero()]);
        }
        RatPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn from_int(p: &IntPoly) -> RatPoly {
        p.to_rat()
    }

    pub fn constant(c: BigRational) -> RatPoly {
        RatPoly::new(vec![c])
    }

    pub fn add(&self, other: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let z = BigRational::zero();
        RatPoly::new((0..n).map(|i| self.coeffs.get(i).unwrap_or(&z) + other.coeffs.get(i).unwrap_or(&z)).collect())
    }

    pub fn sub(&self, other: &RatPoly) -> RatPoly {
        sub(self, other)
    }

    pub fn mul(&self, other: &RatPoly) -> RatPoly {
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RatPoly::new(out)
    }

    pub fn scale(&self, c: &BigRational) -> RatPoly {
        RatPoly::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn monic(&self) -> RatPoly {
        let l = self.leading().clone();
        RatPoly::new(self.coeffs.iter().map(|c| c / &l).collect())
    }

    pub fn div_rem(&self, d: &RatPoly) -> (RatPoly, RatPoly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let mut r = self.coeffs.clone();
        let dd = d.degree();
        if self.degree() < dd {
            return (RatPoly::new(vec![BigRational::zero()]), self.clone());
        }
        let mut q = vec![BigRational::zero(); self.degree() - dd + 1];
        let lead = d.leading();
        for i in (0..q.len()).rev() {
            let c = &r[i + dd] / lead;
            for (j, dj) in d.coeffs.iter().enumerate() {
                r[i + j] -= &c * dj;
            }
            q[i] = c;
        }
        r.truncate(dd.max(1));
        (RatPoly::new(q), RatPoly::new(r))
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &RatPoly) -> RatPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() { a } else { a.monic() }
    }

    /// Clears denominators and content, returning a primitive integer polynomial with
    /// positive leading coefficient.
    pub fn to_primitive_int(&self) -> IntPoly {
        let lcm = self.coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self.coeffs.iter().map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer()).collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        let g = if g.is_zero() { BigInt::one() } else { g };
        let sign = if ints.last().unwrap().is_negative() { -1 } else { 1 };
        IntPoly::new(ints.into_iter().map(|c| c / &g * sign).collect())
    }
}

/// Standard Sturm sequence `f, f', -rem(f, f'), ...`.
pub fn sturm_sequence(f: &RatPoly) -> Vec<RatPoly> {
    let mut seq = vec![f.clone(), f.derivative()];
    loop {
        let n = seq.len();
        if seq[n - 1].is_zero() {
            seq.pop();
            break;
        }
        let (_, r) = seq[n - 2].div_rem(&seq[n - 1]);
        if r.is_zero() {
            break;
        }
        seq.push(RatPoly::new(r.coeffs.iter().map(|c| -c).collect()));
    }
    seq
}

fn yun(f: &RatPoly) -> Vec<(usize, RatPoly)> {
    let mut out = Vec::new();
    if f.degree() == 0 {
        return out;
    }
    let fp = f.derivative();
    let a0 = f.gcd(&fp);
    let mut b = f.div_rem(&a0).0;
    let mut c = fp.div_rem(&a0).0;
    let mut d = {
        let bp = b.derivative();
        sub(&c, &bp)
    };
    let mut i = 1;
    loop {
        let a = b.gcd(&d);
        if a.degree() > 0 {
            out.push((i, a.clone()));
        }
        b = b.div_rem(&a).0;
        if b.degree() == 0 {
            break;
        }
        c = d.div_rem(&a).0;
        d = sub(&c, &b.derivative());
        i += 1;
    }
    out
}

fn sub(a: &RatPoly, b: &RatPoly) -> RatPoly {
    let n = a.coeffs.len().max(b.coeffs.len());
    let z = BigRational::zero();
    RatPoly::new((0..n).map(|i| a.coeffs.get(i).unwrap_or(&z) - b.coeffs.get(i).unwrap_or(&z)).collect())
}

/// Bisects an isolating interval `(lo, hi]` of a simple root of `f` until its width is
/// below `2^-bits`.
pub fn refine_root(f: &IntPoly, lo: &BigRational, hi: &BigRational, bits: u32) -> (BigRational, BigRational) {
    let target = BigRational::new(BigInt::one(), BigInt::one() << bits);
    let mut lo = lo.clone();
    let mut hi = hi.clone();
    if lo == hi {
        return (lo, hi);
    }
    let two = BigRational::from_integer(2.into());
    let mut s_hi = f.eval_rat(&hi);
    if s_hi.is_zero() {
        return (hi.clone(), hi);
    }
    while &hi - &lo > target {
        let mid = (&lo + &hi) / &two;
        let v = f.eval_rat(&mid);
        if v.is_zero() {
            return (mid.clone(), mid);
        }
        if v.is_positive() == s_hi.is_positive() {
            hi = mid;
            s_hi = v;
        } else {
            lo = mid;
        }
    }
    (lo, hi)
}

/// Characteristic polynomial `det(xI - A)` of an integer matrix (Faddeev–LeVerrier).
pub fn charpoly(a: &[Vec<BigInt>]) -> IntPoly {
    let k = a.len();
    let mut coeffs = vec![BigInt::zero(); k + 1];
    coeffs[k] = BigInt::one();
    let mut m = vec![vec![BigInt::zero(); k]; k];
    for step in 1..=k {
        // M <- A M + c_{k-step+1} I
        let mut next = linalg::int_mat_mul(a, &m);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += &coeffs[k - step + 1];
        }
        m = next;
        let am = linalg::int_mat_mul(a, &m);
        let tr: BigInt = (0..k).map(|i| am[i][i].clone()).sum();
        let c = -tr / BigInt::from(step);
        coeffs[k - step] = c;
    }
    IntPoly::new(coeffs)
}

/// Converts an f64 polynomial root estimate into a short description, for diagnostics.
pub fn approx_real_roots(f: &IntPoly) -> Vec<f64> {
    f.isolate_real_roots()
        .into_iter()
        .map(|(lo, hi)| {
            let (l, h) = refine_root(f, &lo, &hi, 60);
            ((l + h) / BigRational::from_integer(2.into())).to_f64().unwrap_or(f64::NAN)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> IntPoly {
        IntPoly::parse(s).unwrap()
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(p("x^3-x-1").coeffs(), IntPoly::from_i64(&[-1, -1, 0, 1]).coeffs());
        assert_eq!(p("2*x^2 + 3x - 7"), IntPoly::from_i64(&[-7, 3, 2]));
        assert_eq!(p("-x"), IntPoly::from_i64(&[0, -1]));
        assert_eq!(p("x^3-x-1").to_string(), "x^3 - x - 1");
        assert!(IntPoly::parse("x^").is_err());
    }

    #[test]
    fn real_root_counts() {
        assert_eq!(p("x^2-2").count_real_roots(), 2);
        assert_eq!(p("x^3-2").count_real_roots(), 1);
        assert_eq!(p("x^3-x-1").count_real_roots(), 1);
        assert_eq!(p("x^3-3x-1").count_real_roots(), 3);
        assert_eq!(p("x^2+1").count_real_roots(), 0);
    }

    #[test]
    fn isolation_and_refinement() {
        let f = p("x^3-3x-1");
        let roots = f.isolate_real_roots();
        assert_eq!(roots.len(), 3);
        let approx = approx_real_roots(&f);
        // 2 cos(2 pi j / 9 + ...) roots of the Chebyshev-type cubic
        let expected = [-1.532088886237956, -0.3472963553338607, 1.879385241571817];
        for (a, e) in approx.iter().zip(expected) {
            assert!((a - e).abs() < 1e-12, "{a} vs {e}");
        }
    }

    #[test]
    fn rational_root_is_isolated_exactly() {
        let f = p("x^2-1");
        let r = f.isolate_real_roots();
        assert_eq!(r.len(), 2);
    }

    #[test]
    fn resultant_is_norm_for_monic() {
        // N(theta) for theta^3 = theta + 1 is 1
        assert_eq!(p("x^3-x-1").resultant(&p("x")), BigInt::one());
        // N(1 + sqrt2) = -1
        assert_eq!(p("x^2-2").resultant(&p("x+1")), BigInt::from(-1));
        // N(3 + 2 sqrt2) = 1
        assert_eq!(p("x^2-2").resultant(&p("2x+3")), BigInt::one());
    }

    #[test]
    fn irreducibility() {
        assert_eq!(p("x^3-x-1").is_irreducible(), Some(true));
        assert_eq!(p("x^3-2").is_irreducible(), Some(true));
        assert_eq!(p("x^3-1").is_irreducible(), Some(false));
        assert_eq!(p("x^4-4x^2+1").is_irreducible(), Some(true));
        assert_eq!(p("x^4-10x^2+1").is_irreducible(), Some(true));
        assert_eq!(p("x^4-6x^2+1").is_irreducible(), Some(false));
        // (x^2-3x+1)^2
        assert_eq!(p("x^4-6x^3+11x^2-6x+1").is_irreducible(), Some(false));
        assert_eq!(p("x^4+4").is_irreducible(), Some(false));
    }

    #[test]
    fn yun_multiplicities() {
        let f = p("x^4-6x^3+11x^2-6x+1");
        let d = f.squarefree_decomposition();
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].0, 2);
        let g = p("x^3-x^2-x+1"); // (x-1)^2 (x+1)
        let d = g.squarefree_decomposition();
        assert_eq!(d.iter().map(|x| x.0).collect::<Vec<_>>(), vec![1, 2]);
        assert!(!g.is_squarefree());
        assert!(p("x^3-2").is_squarefree());
    }

    #[test]
    fn charpoly_small() {
        let a = vec![vec![BigInt::from(2), BigInt::from(1)], vec![BigInt::from(1), BigInt::from(1)]];
        assert_eq!(charpoly(&a), p("x^2-3x+1"));
    }

    #[test]
    fn rem_monic_reduces_powers() {
        // x^3 mod (x^3 - x - 1) = x + 1
        assert_eq!(p("x^3").rem_monic(&p("x^3-x-1")), p("x+1"));
        assert_eq!(p("x^4").rem_monic(&p("x^3-x-1")), p("x^2+x"));
    }
}
