//! Dyadic interval arithmetic on big integers.
//!
//! An [`Interval`] holds `[lo, hi] * 2^-prec` with `lo`, `hi` big integers.
//! Every operation rounds outward, so the true value of any expression built
//! from exact inputs stays inside the resulting interval.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, PartialEq, Eq)]
pub struct Interval {
    lo: BigInt,
    hi: BigInt,
    prec: u32,
}

/// Multiplies `x` by `2^e`, splitting large exponents so intermediate powers stay finite.
pub fn ldexp(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
    }
    x * 2f64.powi(e as i32)
}

/// `m * 2^-p` as the nearest-ish f64 (truncation of low bits, then one rounding).
pub fn scaled_to_f64(m: &BigInt, p: u32) -> f64 {
    let bits = m.bits();
    if bits <= 1000 {
        return ldexp(m.to_f64().unwrap_or(0.0), -(p as i64));
    }
    let shift = bits - 64;
    let top = (m >> shift).to_f64().unwrap_or(0.0);
    ldexp(top, shift as i64 - p as i64)
}

/// Natural log of a positive big integer in f64.
pub fn ln_big(q: &BigInt) -> f64 {
    assert!(q.is_positive(), "ln of non-positive integer");
    let bits = q.bits();
    if bits <= 1000 {
        return q.to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    (q >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

fn shr_floor(x: &BigInt, n: u32) -> BigInt {
    // num-bigint's Shr on BigInt rounds toward negative infinity.
    x >> n
}

fn shr_ceil(x: &BigInt, n: u32) -> BigInt {
    -((-x) >> n)
}

fn div_floor(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_floor(b)
}

fn div_ceil(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

impl Interval {
    pub fn from_int(n: impl Into<BigInt>, prec: u32) -> Self {
        let v: BigInt = n.into() << prec;
        Interval { lo: v.clone(), hi: v, prec }
    }

    pub fn zero(prec: u32) -> Self {
        Self::from_int(0, prec)
    }

    pub fn one(prec: u32) -> Self {
        Self::from_int(1, prec)
    }

    /// Bounds given directly as scaled integers.
    pub fn from_scaled(lo: BigInt, hi: BigInt, prec: u32) -> Self {
        assert!(lo <= hi, "interval bounds out of order");
        Interval { lo, hi, prec }
    }

    pub fn from_ratio(num: &BigInt, den: &BigInt, prec: u32) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let (num, den) = if den.is_negative() { (-num, -den) } else { (num.clone(), den.clone()) };
        let scaled = num << prec;
        Interval { lo: div_floor(&scaled, &den), hi: div_ceil(&scaled, &den), prec }
    }

    pub fn from_rational(r: &BigRational, prec: u32) -> Self {
        Self::from_ratio(r.numer(), r.denom(), prec)
    }

    /// Encloses an f64 exactly when `prec` is large enough to hold its fractional bits.
    pub fn from_f64(x: f64, prec: u32) -> Self {
        assert!(x.is_finite(), "non-finite f64");
        let r = BigRational::from_float(x).expect("finite float");
        Self::from_rational(&r, prec)
    }

    /// Hull of two intervals.
    pub fn hull(&self, other: &Interval) -> Interval {
        let p = self.prec.max(other.prec);
        let a = self.with_prec(p);
        let b = other.with_prec(p);
        Interval { lo: a.lo.min(b.lo), hi: a.hi.max(b.hi), prec: p }
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn lo_scaled(&self) -> &BigInt {
        &self.lo
    }

    pub fn hi_scaled(&self) -> &BigInt {
        &self.hi
    }

    /// Re-expresses the interval with `p` fractional bits, rounding outward if `p` is smaller.
    pub fn with_prec(&self, p: u32) -> Interval {
        match p.cmp(&self.prec) {
            Ordering::Equal => self.clone(),
            Ordering::Greater => {
                let s = p - self.prec;
                Interval { lo: &self.lo << s, hi: &self.hi << s, prec: p }
            }
            Ordering::Less => {
                let s = self.prec - p;
                Interval { lo: shr_floor(&self.lo, s), hi: shr_ceil(&self.hi, s), prec: p }
            }
        }
    }

    fn aligned(&self, other: &Interval) -> (Interval, Interval) {
        let p = self.prec.max(other.prec);
        (self.with_prec(p), other.with_prec(p))
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn lo_f64(&self) -> f64 {
        scaled_to_f64(&self.lo, self.prec)
    }

    pub fn hi_f64(&self) -> f64 {
        scaled_to_f64(&self.hi, self.prec)
    }

    pub fn mid_f64(&self) -> f64 {
        scaled_to_f64(&(&self.lo + &self.hi), self.prec + 1)
    }

    pub fn width_f64(&self) -> f64 {
        scaled_to_f64(&(&self.hi - &self.lo), self.prec)
    }

    /// Midpoint as an exact rational.
    pub fn mid_rational(&self) -> BigRational {
        BigRational::new(&self.lo + &self.hi, BigInt::one() << (self.prec + 1))
    }

    pub fn lo_rational(&self) -> BigRational {
        BigRational::new(self.lo.clone(), BigInt::one() << self.prec)
    }

    pub fn hi_rational(&self) -> BigRational {
        BigRational::new(self.hi.clone(), BigInt::one() << self.prec)
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.hi.is_negative()
    }

    /// Sign if certain; exact zero counts as certain.
    pub fn sign(&self) -> Option<Ordering> {
        if self.lo.is_positive() {
            Some(Ordering::Greater)
        } else if self.hi.is_negative() {
            Some(Ordering::Less)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// Certain ordering between two intervals, if any. Identical exact values compare equal.
    pub fn certain_cmp(&self, other: &Interval) -> Option<Ordering> {
        let (a, b) = self.aligned(other);
        if a.hi < b.lo {
            Some(Ordering::Less)
        } else if a.lo > b.hi {
            Some(Ordering::Greater)
        } else if a.is_exact() && b.is_exact() && a.lo == b.lo {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// True when the whole interval lies inside `other`.
    pub fn subset_of(&self, other: &Interval) -> bool {
        let (a, b) = self.aligned(other);
        a.lo >= b.lo && a.hi <= b.hi
    }

    pub fn abs(&self) -> Interval {
        if self.lo.is_negative() && self.hi.is_positive() {
            let m = (-&self.lo).max(self.hi.clone());
            Interval { lo: BigInt::zero(), hi: m, prec: self.prec }
        } else if self.hi.is_positive() || self.hi.is_zero() && !self.lo.is_negative() {
            self.clone()
        } else {
            -self
        }
    }

    pub fn sqr(&self) -> Interval {
        let a = self.abs();
        let lo = shr_floor(&(&a.lo * &a.lo), self.prec);
        let hi = shr_ceil(&(&a.hi * &a.hi), self.prec);
        Interval { lo, hi, prec: self.prec }
    }

    /// Square root; negative lower bounds are clamped to zero.
    pub fn sqrt(&self) -> Interval {
        assert!(!self.hi.is_negative(), "sqrt of negative interval");
        let lo = if self.lo.is_positive() { (&self.lo << self.prec).sqrt() } else { BigInt::zero() };
        let hs = &self.hi << self.prec;
        let mut hi = hs.sqrt();
        if &hi * &hi < hs {
            hi += 1;
        }
        Interval { lo, hi, prec: self.prec }
    }

    pub fn recip(&self) -> Interval {
        Interval::one(self.prec) / self.clone()
    }

    pub fn mul_int(&self, k: &BigInt) -> Interval {
        let a = &self.lo * k;
        let b = &self.hi * k;
        if k.is_negative() {
            Interval { lo: b, hi: a, prec: self.prec }
        } else {
            Interval { lo: a, hi: b, prec: self.prec }
        }
    }

    pub fn mul_i64(&self, k: i64) -> Interval {
        self.mul_int(&BigInt::from(k))
    }

    pub fn powi(&self, n: u32) -> Interval {
        let mut acc = Interval::one(self.prec);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Nearest integer to the midpoint (ties toward +infinity).
    pub fn round_mid(&self) -> BigInt {
        let sum = &self.lo + &self.hi;
        // (sum / 2^(prec+1)) + 1/2, floored
        let half = BigInt::one() << self.prec;
        shr_floor(&(sum + half), self.prec + 1)
    }

    pub fn floor_lo(&self) -> BigInt {
        shr_floor(&self.lo, self.prec)
    }

    pub fn ceil_hi(&self) -> BigInt {
        shr_ceil(&self.hi, self.prec)
    }

    /// Floor of the value, if both endpoints share it.
    pub fn certain_floor(&self) -> Option<BigInt> {
        let a = shr_floor(&self.lo, self.prec);
        let b = shr_floor(&self.hi, self.prec);
        (a == b).then_some(a)
    }

    /// Relative width |hi - lo| / min(|lo|, |hi|); infinite when the interval touches zero.
    pub fn rel_width(&self) -> f64 {
        if self.contains_zero() {
            return if self.is_exact() { 0.0 } else { f64::INFINITY };
        }
        let w = &self.hi - &self.lo;
        let m = self.lo.abs().min(self.hi.abs());
        scaled_to_f64(&w, 0) / scaled_to_f64(&m, 0)
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]@{}", self.lo_f64(), self.hi_f64(), self.prec)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.mid_f64())
    }
}

impl Neg for &Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval { lo: -&self.hi, hi: -&self.lo, prec: self.prec }
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        -&self
    }
}

impl Add for &Interval {
    type Output = Interval;
    fn add(self, rhs: &Interval) -> Interval {
        let (a, b) = self.aligned(rhs);
        Interval { lo: a.lo + b.lo, hi: a.hi + b.hi, prec: a.prec }
    }
}

impl Sub for &Interval {
    type Output = Interval;
    fn sub(self, rhs: &Interval) -> Interval {
        let (a, b) = self.aligned(rhs);
        Interval { lo: a.lo - b.hi, hi: a.hi - b.lo, prec: a.prec }
    }
}

impl Mul for &Interval {
    type Output = Interval;
    fn mul(self, rhs: &Interval) -> Interval {
        let (a, b) = self.aligned(rhs);
        let p = a.prec;
        if a.is_exact() && b.is_exact() {
            let prod = &a.lo * &b.lo;
            return Interval { lo: shr_floor(&prod, p), hi: shr_ceil(&prod, p), prec: p };
        }
        let cands = [&a.lo * &b.lo, &a.lo * &b.hi, &a.hi * &b.lo, &a.hi * &b.hi];
        let mn = cands.iter().min().unwrap();
        let mx = cands.iter().max().unwrap();
        Interval { lo: shr_floor(mn, p), hi: shr_ceil(mx, p), prec: p }
    }
}

impl Div for &Interval {
    type Output = Interval;
    fn div(self, rhs: &Interval) -> Interval {
        assert!(!rhs.contains_zero(), "division by an interval containing zero");
        let (a, b) = self.aligned(rhs);
        let p = a.prec;
        let mut lo: Option<BigInt> = None;
        let mut hi: Option<BigInt> = None;
        for x in [&a.lo, &a.hi] {
            let xs = x << p;
            for y in [&b.lo, &b.hi] {
                let (xs, y) = if y.sign() == Sign::Minus { (-&xs, -y) } else { (xs.clone(), y.clone()) };
                let f = div_floor(&xs, &y);
                let c = div_ceil(&xs, &y);
                lo = Some(match lo { Some(l) if l <= f => l, _ => f });
                hi = Some(match hi { Some(h) if h >= c => h, _ => c });
            }
        }
        Interval { lo: lo.unwrap(), hi: hi.unwrap(), prec: p }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Interval {
            type Output = Interval;
            fn $m(self, rhs: Interval) -> Interval {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Interval> for Interval {
            type Output = Interval;
            fn $m(self, rhs: &Interval) -> Interval {
                (&self).$m(rhs)
            }
        }
        impl $tr<Interval> for &Interval {
            type Output = Interval;
            fn $m(self, rhs: Interval) -> Interval {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);
