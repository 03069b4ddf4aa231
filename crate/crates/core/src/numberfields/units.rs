//! Units of Z[θ]: the continued-fraction route for quadratics, a bounded norm search
//! otherwise, and the integral representation a ↦ M_a.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use super::order::{NumberFieldOrder, OrderElement};
use crate::diophantine::{sqrt_cf_period, ContinuedFraction};
use crate::error::{Error, Result};
use crate::linalg::{self, IntMatrix};

pub const MAX_SEARCH_DEGREE: usize = 4;
pub const MAX_SEARCH_BOUND: u32 = 1000;

#[derive(Clone, Debug, PartialEq)]
pub struct PellUnit {
    pub d: i64,
    /// Fundamental solution x + y√d of x² - d y² = ±1.
    pub fundamental: OrderElement,
    /// Smallest power of norm +1 (the fundamental unit or its square).
    pub plus: OrderElement,
}

/// Fundamental unit of Z[√d] from the period of √d: the convergent just before the end
/// of the first period solves x² - d y² = (-1)^period.
pub fn pell_unit(d: i64) -> Result<PellUnit> {
    if d <= 1 {
        return Err(Error::InvalidInput(format!("pell_unit needs d > 1, got {d}")));
    }
    let (a0, period) = sqrt_cf_period(&BigInt::from(d))?;
    let mut q = vec![a0];
    q.extend_from_slice(&period[..period.len() - 1]);
    let cf = ContinuedFraction::new(q, true, false)?;
    let (x, y) = cf.convergents().last().expect("nonempty").clone();
    let order = NumberFieldOrder::quadratic(d)?;
    let fundamental = order.element(vec![x, y]);
    debug_assert!(fundamental.is_unit());
    let plus = if fundamental.norm.is_one() { fundamental.clone() } else { order.mul(&fundamental, &fundamental) };
    Ok(PellUnit { d, fundamental, plus })
}

#[derive(Clone, Debug)]
pub struct UnitSearch {
    pub bound: u32,
    /// Every coefficient vector in the box with norm ±1, lexicographically sorted.
    pub units: Vec<OrderElement>,
    /// Units with norm +1 and positive θ-embedding.
    pub positive: Vec<OrderElement>,
}

/// i128 powers of the companion matrix; `None` if they do not fit.
fn companion_powers(order: &NumberFieldOrder) -> Option<Vec<Vec<Vec<i128>>>> {
    let c: Vec<Vec<i128>> = order.companion().iter().map(|r| r.iter().map(|x| x.to_i128()).collect()).collect::<Option<_>>()?;
    let k = order.k;
    let mut out = vec![(0..k).map(|i| (0..k).map(|j| i128::from(i == j)).collect::<Vec<i128>>()).collect::<Vec<_>>()];
    for _ in 1..k {
        let p = out.last().unwrap();
        let mut n = vec![vec![0i128; k]; k];
        for i in 0..k {
            for j in 0..k {
                let mut s = 0i128;
                for l in 0..k {
                    s = s.checked_add(c[i][l].checked_mul(p[l][j])?)?;
                }
                n[i][j] = s;
            }
        }
        out.push(n);
    }
    Some(out)
}

fn det_i128(m: &[Vec<i128>]) -> Option<i128> {
    let k = m.len();
    if k == 1 {
        return Some(m[0][0]);
    }
    let mut acc = 0i128;
    for j in 0..k {
        if m[0][j] == 0 {
            continue;
        }
        let minor: Vec<Vec<i128>> = m[1..].iter().map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, x)| *x).collect()).collect();
        let t = m[0][j].checked_mul(det_i128(&minor)?)?;
        acc = if j % 2 == 0 { acc.checked_add(t)? } else { acc.checked_sub(t)? };
    }
    Some(acc)
}

fn norm_i128(powers: &[Vec<Vec<i128>>], c: &[i64]) -> Option<i128> {
    let k = c.len();
    let mut m = vec![vec![0i128; k]; k];
    for (ci, p) in c.iter().zip(powers) {
        if *ci == 0 {
            continue;
        }
        for i in 0..k {
            for j in 0..k {
                m[i][j] = m[i][j].checked_add((*ci as i128).checked_mul(p[i][j])?)?;
            }
        }
    }
    det_i128(&m)
}

/// All elements with |c_i| ≤ bound and norm ±1. The box is split along the first
/// coordinate across workers; results come back in lexicographic order.
pub fn unit_search(order: &NumberFieldOrder, bound: u32) -> Result<UnitSearch> {
    if order.k > MAX_SEARCH_DEGREE {
        return Err(Error::DimensionCap { dim: order.k, cap: MAX_SEARCH_DEGREE });
    }
    if bound > MAX_SEARCH_BOUND {
        return Err(Error::InvalidInput(format!("coefficient bound {bound} exceeds {MAX_SEARCH_BOUND}")));
    }
    let b = bound as i64;
    let k = order.k;
    let powers = companion_powers(order);
    let chunks: Vec<Vec<OrderElement>> = (-b..=b)
        .into_par_iter()
        .map(|c0| {
            let mut found = Vec::new();
            let mut c = vec![-b; k];
            c[0] = c0;
            loop {
                let n = powers.as_ref().and_then(|p| norm_i128(p, &c));
                let is_unit = match n {
                    Some(n) => n == 1 || n == -1,
                    None => order.element_i64(&c).is_unit(),
                };
                if is_unit {
                    found.push(order.element_i64(&c));
                }
                // odometer over c_1..c_{k-1}
                let mut i = k - 1;
                loop {
                    if i == 0 {
                        return found;
                    }
                    if c[i] < b {
                        c[i] += 1;
                        break;
                    }
                    c[i] = -b;
                    i -= 1;
                }
            }
        })
        .collect();
    let units: Vec<OrderElement> = chunks.into_iter().flatten().collect();
    let positive = units.iter().filter(|u| u.norm.is_one() && is_positive(order, u)).cloned().collect();
    Ok(UnitSearch { bound, units, positive })
}

fn is_positive(order: &NumberFieldOrder, a: &OrderElement) -> bool {
    let mut prec = 64;
    loop {
        if let Some(s) = order.embed(a, prec).sign() {
            return s == std::cmp::Ordering::Greater;
        }
        prec *= 2;
    }
}

/// Matrix of x ↦ a·x on the power basis: column j holds the coordinates of a·θ^j.
/// Accepts any unit; the determinant is the norm.
pub fn mult_matrix(order: &NumberFieldOrder, a: &OrderElement) -> Result<IntMatrix> {
    if !a.is_unit() {
        return Err(Error::NotUnit(format!("norm {}", a.norm)));
    }
    let k = order.k;
    let mut m = vec![vec![BigInt::zero(); k]; k];
    for j in 0..k {
        let mut e = vec![BigInt::zero(); k];
        e[j] = BigInt::one();
        let col = order.mul(a, &order.element(e));
        for i in 0..k {
            m[i][j] = col.coeffs[i].clone();
        }
    }
    Ok(m)
}

/// The G_v element attached to a ∈ U⁺: the transpose of M_a, which fixes the
/// direction (1, θ, …, θ^{k-1}) up to the factor a.
pub fn gv_element(order: &NumberFieldOrder, a: &OrderElement) -> Result<IntMatrix> {
    if !a.norm.is_one() {
        return Err(Error::NotUnit(format!("norm {}, need +1", a.norm)));
    }
    if !is_positive(order, a) {
        return Err(Error::NotUnit(format!("{a} has negative embedding")));
    }
    Ok(linalg::transpose(&mult_matrix(order, a)?))
}

/// max_i |(ᵀM_a b)_i - a·b_i| over the power basis b, as an upper bound.
pub fn transpose_identity_residual(order: &NumberFieldOrder, a: &OrderElement, prec: u32) -> Result<f64> {
    let m = mult_matrix(order, a)?;
    let b = order.power_basis(prec);
    let av = order.embed(a, prec);
    let mut worst = 0f64;
    for i in 0..order.k {
        let mut s = crate::interval::Interval::zero(prec);
        for j in 0..order.k {
            s = &s + &b[j].mul_int(&m[j][i]);
        }
        let r = (&s - &(&av * &b[i])).abs();
        worst = worst.max(r.hi_f64());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::int_matrix;

    #[test]
    fn pell_examples() {
        let u = pell_unit(2).unwrap();
        assert_eq!(u.fundamental.coeffs_i64(), vec![1, 1]);
        assert_eq!(u.fundamental.norm, BigInt::from(-1));
        assert_eq!(u.plus.coeffs_i64(), vec![3, 2]);
        let u = pell_unit(3).unwrap();
        assert_eq!(u.fundamental.coeffs_i64(), vec![2, 1]);
        assert_eq!(u.plus, u.fundamental);
        assert_eq!(pell_unit(5).unwrap().plus.coeffs_i64(), vec![9, 4]);
        assert_eq!(pell_unit(4), Err(Error::PerfectSquare(4)));
    }

    #[test]
    fn mult_matrix_of_three_plus_two_root_two() {
        let o = NumberFieldOrder::quadratic(2).unwrap();
        let m = mult_matrix(&o, &o.element_i64(&[3, 2])).unwrap();
        assert_eq!(m, int_matrix(&[&[3, 4], &[2, 3]]));
        assert!(transpose_identity_residual(&o, &o.element_i64(&[3, 2]), 200).unwrap() < 1e-50);
        assert!(matches!(mult_matrix(&o, &o.element_i64(&[2, 1])), Err(Error::NotUnit(_))));
    }

    #[test]
    fn i128_norm_agrees_with_resultant() {
        let o = NumberFieldOrder::parse("x^4-x-1").unwrap();
        let p = companion_powers(&o).unwrap();
        for c in [[1, 2, 3, 4], [-7, 0, 5, 1], [0, 1, 0, 0], [9, -9, 9, -9]] {
            assert_eq!(BigInt::from(norm_i128(&p, &c).unwrap()), o.element_i64(&c).norm);
        }
    }
}
