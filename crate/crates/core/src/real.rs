//! Real inputs: exact rationals, quadratic surds, algebraic reals, decimal literals
//! and explicitly constructed continued fractions.
//!
//! One text grammar is shared by every command:
//!
//! | spec                          | value                                     |
//! |-------------------------------|-------------------------------------------|
//! | `phi`                         | (1+√5)/2                                  |
//! | `sqrt:N`                      | √N                                        |
//! | `surd:a,b,c,d`                | (a+b√d)/c                                 |
//! | `rat:p/q`                     | p/q                                       |
//! | `cbrt:N`                      | real cube root of N                       |
//! | `poly:f@lo,hi[:g]`            | g(θ) for the root θ of f in (lo, hi]      |
//! | `dec:<literal>[:digits]`      | literal ± 10^-digits                      |
//! | `mu:<target>[:depth]`         | prescribed irrationality exponent         |
//! | `mu:inf[:depth]`              | Liouville-type continued fraction         |
//!
//! In `poly:`, `f` and `g` are either `x`-expressions (`x^3-x-1`) or comma-separated
//! integer coefficients, lowest degree first.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::diophantine::{self, ContinuedFraction};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::poly::{self, IntPoly};

#[derive(Clone, Debug, PartialEq)]
pub enum RealInput {
    Rational(BigRational),
    /// `(a + b√d) / c` with `d > 1` not a perfect square and `b ≠ 0`, `c ≠ 0`.
    Surd { a: BigInt, b: BigInt, c: BigInt, d: BigInt },
    /// `expr(θ)` where θ is the unique root of `poly` in `(lo, hi]`.
    Algebraic { poly: IntPoly, lo: BigRational, hi: BigRational, expr: IntPoly },
    /// `value ± 10^-digits`.
    Decimal { value: BigRational, digits: u32, literal: String },
    /// A number known through its leading partial quotients; it lies between the last
    /// two convergents.
    Cf { cf: ContinuedFraction, label: String },
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| Error::Parse(format!("bad numerator '{p}'")))?;
        let q: BigInt = q.trim().parse().map_err(|_| Error::Parse(format!("bad denominator '{q}'")))?;
        if q.is_zero() {
            return Err(Error::InvalidInput("zero denominator".into()));
        }
        return Ok(BigRational::new(p, q));
    }
    parse_decimal_exact(s).map(|(v, _)| v)
}

/// Exact rational value of a decimal literal and its number of fractional digits.
fn parse_decimal_exact(s: &str) -> Result<(BigRational, u32)> {
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    let ok = |t: &str| t.chars().all(|c| c.is_ascii_digit());
    if (int_part.is_empty() && frac_part.is_empty()) || !ok(int_part) || !ok(frac_part) {
        return Err(Error::Parse(format!("bad decimal literal '{s}'")));
    }
    let digits = format!("{int_part}{frac_part}");
    let n: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().unwrap() };
    let den = num_traits::pow(BigInt::from(10), frac_part.len());
    let v = BigRational::new(if neg { -n } else { n }, den);
    Ok((v, frac_part.len() as u32))
}

fn parse_poly_arg(s: &str) -> Result<IntPoly> {
    if s.contains('x') {
        return IntPoly::parse(s);
    }
    let coeffs: Result<Vec<BigInt>> =
        s.split(',').map(|c| c.trim().parse::<BigInt>().map_err(|_| Error::Parse(format!("bad coefficient '{c}'")))).collect();
    Ok(IntPoly::new(coeffs?))
}

const KEYWORDS: [&str; 9] = ["phi", "sqrt:", "surd:", "rat:", "cbrt:", "poly:", "dec:", "mu:", "plastic"];

/// Splits a comma-separated list of specs, keeping commas that belong to a spec's body.
pub fn split_spec_list(s: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for piece in s.split(',') {
        let starts_new = KEYWORDS.iter().any(|k| piece.trim_start().starts_with(k));
        match out.last_mut() {
            Some(last) if !starts_new => {
                last.push(',');
                last.push_str(piece);
            }
            _ => out.push(piece.trim().to_string()),
        }
    }
    out
}

impl RealInput {
    pub fn rational(p: i64, q: i64) -> Self {
        RealInput::Rational(BigRational::new(p.into(), q.into()))
    }

    pub fn phi() -> Self {
        Self::surd(1, 1, 2, 5).unwrap()
    }

    pub fn sqrt(n: i64) -> Result<Self> {
        Self::surd(0, 1, 1, n)
    }

    /// `(a + b√d)/c`; collapses to a rational when `d` is a perfect square or `b = 0`.
    pub fn surd(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        Self::surd_big(a.into(), b.into(), c.into(), d.into())
    }

    pub fn surd_big(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Result<Self> {
        if c.is_zero() {
            return Err(Error::InvalidInput("surd denominator is zero".into()));
        }
        if d.is_negative() {
            return Err(Error::InvalidInput("surd radicand is negative".into()));
        }
        let r = d.sqrt();
        if &r * &r == d || b.is_zero() {
            return Ok(RealInput::Rational(BigRational::new(a + b * r, c)));
        }
        Ok(RealInput::Surd { a, b, c, d })
    }

    /// Algebraic real `expr(θ)` with θ the root of `poly` in `(lo, hi]`.
    pub fn algebraic(poly: IntPoly, lo: BigRational, hi: BigRational, expr: IntPoly) -> Result<Self> {
        if lo >= hi {
            return Err(Error::InvalidIsolatingInterval(format!("empty interval ({lo}, {hi}]")));
        }
        if poly.degree() == 0 {
            return Err(Error::InvalidInput("constant polynomial has no roots".into()));
        }
        if !poly.is_squarefree() {
            return Err(Error::NotSquarefree);
        }
        let n = poly.count_roots_in(&lo, &hi);
        if n != 1 {
            return Err(Error::InvalidIsolatingInterval(format!("{poly} has {n} roots in ({lo}, {hi}]")));
        }
        if poly.eval_rat(&hi).is_zero() {
            let v = expr.eval_rat(&hi);
            return Ok(RealInput::Rational(v));
        }
        Ok(RealInput::Algebraic { poly, lo, hi, expr })
    }

    /// Real root of `poly` in `(lo, hi]`.
    pub fn root(poly: IntPoly, lo: BigRational, hi: BigRational) -> Result<Self> {
        Self::algebraic(poly, lo, hi, IntPoly::x())
    }

    pub fn cbrt(n: i64) -> Result<Self> {
        let poly = IntPoly::from_i64(&[-n, 0, 0, 1]);
        let b = BigRational::from_integer(BigInt::from(n.unsigned_abs().max(1) + 1));
        Self::root(poly, -b.clone(), b)
    }

    pub fn decimal(literal: &str, digits: Option<u32>) -> Result<Self> {
        let (value, frac) = parse_decimal_exact(literal)?;
        let digits = digits.unwrap_or(frac);
        if digits == 0 {
            return Err(Error::InvalidInput("declared precision must be at least 1 digit".into()));
        }
        Ok(RealInput::Decimal { value, digits, literal: literal.trim().to_string() })
    }

    pub fn parse(spec: &str) -> Result<Self> {
        let s = spec.trim();
        if s == "phi" {
            return Ok(Self::phi());
        }
        if s == "plastic" {
            return Self::root(IntPoly::from_i64(&[-1, -1, 0, 1]), BigRational::one(), BigRational::from_integer(2.into()));
        }
        let (kind, body) = s.split_once(':').ok_or_else(|| Error::Parse(format!("unknown real spec '{s}'")))?;
        match kind {
            "sqrt" => {
                let n: i64 = body.trim().parse().map_err(|_| Error::Parse(format!("bad radicand '{body}'")))?;
                Self::sqrt(n)
            }
            "surd" => {
                let v: Vec<i64> = body
                    .split(',')
                    .map(|t| t.trim().parse::<i64>().map_err(|_| Error::Parse(format!("bad surd field '{t}'"))))
                    .collect::<Result<_>>()?;
                if v.len() != 4 {
                    return Err(Error::Parse("surd needs a,b,c,d".into()));
                }
                Self::surd(v[0], v[1], v[2], v[3])
            }
            "rat" => Ok(RealInput::Rational(parse_rational(body)?)),
            "cbrt" => {
                let n: i64 = body.trim().parse().map_err(|_| Error::Parse(format!("bad integer '{body}'")))?;
                Self::cbrt(n)
            }
            "poly" => {
                let (f, rest) = body.split_once('@').ok_or_else(|| Error::Parse("poly spec needs '@lo,hi'".into()))?;
                let (range, expr) = match rest.split_once(':') {
                    Some((r, e)) => (r, Some(e)),
                    None => (rest, None),
                };
                let (lo, hi) = range.split_once(',').ok_or_else(|| Error::Parse("poly range needs 'lo,hi'".into()))?;
                let expr = match expr {
                    Some(e) => parse_poly_arg(e)?,
                    None => IntPoly::x(),
                };
                Self::algebraic(parse_poly_arg(f)?, parse_rational(lo)?, parse_rational(hi)?, expr)
            }
            "dec" => {
                let (lit, digits) = match body.split_once(':') {
                    Some((l, d)) => (l, Some(d.trim().parse::<u32>().map_err(|_| Error::Parse(format!("bad digit count '{d}'")))?)),
                    None => (body, None),
                };
                Self::decimal(lit, digits)
            }
            "mu" => {
                let (target, depth) = match body.split_once(':') {
                    Some((t, d)) => (t, Some(d.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad depth '{d}'")))?)),
                    None => (body, None),
                };
                let cf = if target.trim() == "inf" {
                    diophantine::construct_liouville(depth.unwrap_or(diophantine::DEFAULT_LIOUVILLE_DEPTH))?
                } else {
                    let mu: f64 = target.trim().parse().map_err(|_| Error::Parse(format!("bad mu target '{target}'")))?;
                    let depth = depth.unwrap_or_else(|| diophantine::default_mu_depth(mu));
                    diophantine::construct_alpha_with_mu(mu, depth)?
                };
                Ok(RealInput::Cf { cf, label: s.to_string() })
            }
            _ => Err(Error::Parse(format!("unknown real spec kind '{kind}'"))),
        }
    }

    pub fn parse_list(spec: &str) -> Result<Vec<Self>> {
        split_spec_list(spec).iter().map(|s| Self::parse(s)).collect()
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            RealInput::Rational(r) => Some(r),
            _ => None,
        }
    }

    /// True when arbitrarily tight enclosures are available.
    pub fn is_exact(&self) -> bool {
        !matches!(self, RealInput::Decimal { .. } | RealInput::Cf { .. })
    }

    /// Enclosure with `prec` fractional bits. Exact inputs give width of a few units in
    /// the last place; decimals and continued fractions give their intrinsic width.
    pub fn eval(&self, prec: u32) -> Interval {
        match self {
            RealInput::Rational(r) => Interval::from_rational(r, prec),
            RealInput::Surd { a, b, c, d } => {
                let p = prec + 8 + (b.bits() as u32);
                let s = Interval::from_int(d.clone(), p).sqrt();
                let num = &Interval::from_int(a.clone(), p) + &s.mul_int(b);
                (&num / &Interval::from_int(c.clone(), p)).with_prec(prec)
            }
            RealInput::Algebraic { poly, lo, hi, expr } => eval_algebraic(poly, lo, hi, expr, prec),
            RealInput::Decimal { value, digits, .. } => {
                let e = BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(10), *digits as usize));
                Interval::from_rational(&(value - &e), prec).hull(&Interval::from_rational(&(value + &e), prec))
            }
            RealInput::Cf { cf, .. } => {
                let conv = cf.convergents();
                let n = conv.len();
                let a = Interval::from_ratio(&conv[n - 1].0, &conv[n - 1].1, prec);
                if n == 1 {
                    // only a_0 is known: the value lies in [a_0, a_0 + 1]
                    return a.hull(&Interval::from_int(&conv[0].0 + 1, prec));
                }
                a.hull(&Interval::from_ratio(&conv[n - 2].0, &conv[n - 2].1, prec))
            }
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.eval(80).mid_f64()
    }
}

fn eval_algebraic(f: &IntPoly, lo: &BigRational, hi: &BigRational, g: &IntPoly, prec: u32) -> Interval {
    let mut extra = 16u32;
    let target = BigRational::new(BigInt::one(), BigInt::one() << prec);
    loop {
        let (l, h) = poly::refine_root(f, lo, hi, prec + extra);
        let p = prec + extra;
        let theta = Interval::from_rational(&l, p).hull(&Interval::from_rational(&h, p));
        let v = g.eval_interval(&theta);
        if v.hi_rational() - v.lo_rational() <= target || extra > 4096 {
            return v.with_prec(prec);
        }
        extra *= 2;
    }
}

impl fmt::Display for RealInput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RealInput::Rational(r) => write!(f, "rat:{r}"),
            RealInput::Surd { a, b, c, d } => {
                if a.is_one() && b.is_one() && c == &BigInt::from(2) && d == &BigInt::from(5) {
                    write!(f, "phi")
                } else if a.is_zero() && b.is_one() && c.is_one() {
                    write!(f, "sqrt:{d}")
                } else {
                    write!(f, "surd:{a},{b},{c},{d}")
                }
            }
            RealInput::Algebraic { poly, lo, hi, expr } => {
                let compact = |p: &IntPoly| p.to_string().replace(' ', "");
                if *expr == IntPoly::x() {
                    write!(f, "poly:{}@{lo},{hi}", compact(poly))
                } else {
                    write!(f, "poly:{}@{lo},{hi}:{}", compact(poly), compact(expr))
                }
            }
            RealInput::Decimal { literal, digits, .. } => write!(f, "dec:{literal}:{digits}"),
            RealInput::Cf { label, .. } => write!(f, "{label}"),
        }
    }
}

/// Integer part and sign helpers used by the continued-fraction code.
pub(crate) fn floor_rational(r: &BigRational) -> BigInt {
    r.numer().div_floor(r.denom())
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grammar_roundtrip() {
        for s in ["phi", "sqrt:2", "rat:355/113", "poly:x^3-x-1@1,2", "dec:1.41421:5", "surd:1,2,3,7"] {
            let x = RealInput::parse(s).unwrap();
            assert_eq!(x.to_string(), s);
            assert_eq!(RealInput::parse(&x.to_string()).unwrap(), x);
        }
    }

    #[test]
    fn spec_values() {
        let close = |s: &str, v: f64| {
            let x = RealInput::parse(s).unwrap().to_f64();
            assert!((x - v).abs() < 1e-14, "{s}: {x} vs {v}");
        };
        close("phi", 1.618033988749895);
        close("sqrt:2", std::f64::consts::SQRT_2);
        close("cbrt:2", 1.2599210498948732);
        close("plastic", 1.324717957244746);
        close("poly:-2,0,0,1@1,2:0,0,1", 1.5874010519681994);
        close("rat:-7/2", -3.5);
        close("dec:3.25017", 3.25017);
    }

    #[test]
    fn list_splitting_keeps_poly_commas() {
        let v = split_spec_list("poly:-2,0,0,1@1,2,sqrt:3,phi");
        assert_eq!(v, vec!["poly:-2,0,0,1@1,2", "sqrt:3", "phi"]);
        assert_eq!(RealInput::parse_list("cbrt:2,poly:x^3-2@1,2:x^2").unwrap().len(), 2);
    }

    #[test]
    fn invalid_inputs() {
        assert!(matches!(RealInput::parse("poly:x^2-2@-2,2"), Err(Error::InvalidIsolatingInterval(_))));
        assert!(matches!(RealInput::parse("poly:x^2-2@2,1"), Err(Error::InvalidIsolatingInterval(_))));
        assert!(matches!(RealInput::parse("poly:x^2-2x+1@0,2"), Err(Error::NotSquarefree)));
        assert!(RealInput::parse("surd:1,1,0,5").is_err());
        assert!(RealInput::parse("dec:1.5:0").is_err());
        assert!(RealInput::parse("nope").is_err());
        assert_eq!(RealInput::parse("sqrt:9").unwrap(), RealInput::rational(3, 1));
    }

    #[test]
    fn enclosures_are_tight_and_correct() {
        let x = RealInput::sqrt(2).unwrap().eval(300);
        assert!(x.width_f64() < 1e-88);
        assert!(x.sqr().lo_rational() <= BigRational::from_integer(2.into()));
        assert!(x.sqr().hi_rational() >= BigRational::from_integer(2.into()));
        let t = RealInput::parse("plastic").unwrap().eval(200);
        let f = IntPoly::from_i64(&[-1, -1, 0, 1]).eval_interval(&t);
        assert!(f.contains_zero());
        assert!(t.width_f64() < 1e-59);
    }

    #[test]
    fn decimal_enclosure_has_declared_width() {
        let x = RealInput::parse("dec:1.4142").unwrap().eval(64);
        assert!((x.width_f64() - 2e-4).abs() < 1e-15);
        assert!(x.lo_f64() < std::f64::consts::SQRT_2 && std::f64::consts::SQRT_2 < x.hi_f64());
    }

    #[test]
    fn floor_helper_handles_negatives() {
        assert_eq!(floor_rational(&BigRational::new((-7).into(), 2.into())), BigInt::from(-4));
    }
}
