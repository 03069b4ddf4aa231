use collapse_core::diophantine::badapprox_scan;
use collapse_core::linalg::{det_bareiss, identity, int_mat_mul, int_matrix, transpose, IntMatrix};
use collapse_core::numberfields::{
    appendix_matrices_check, basis_direction, gv_check, gv_element, mult_matrix, pell_unit, suspension_model,
    transpose_identity_residual, unit_rank, unit_search, NumberFieldOrder,
};
use collapse_core::poly::IntPoly;
use collapse_core::real::RealInput;
use collapse_core::Error;
use num_bigint::BigInt;
use num_traits::One;
use proptest::prelude::*;

/// All complex roots of a monic polynomial by Durand–Kerner, for a floating norm oracle.
fn complex_roots(coeffs: &[f64]) -> Vec<(f64, f64)> {
    let k = coeffs.len() - 1;
    let mul = |a: (f64, f64), b: (f64, f64)| (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0);
    let eval = |z: (f64, f64)| coeffs.iter().rev().fold((0.0, 0.0), |acc, &c| {
        let m = mul(acc, z);
        (m.0 + c, m.1)
    });
    let mut z: Vec<(f64, f64)> = (0..k).map(|i| (0.4, 0.9).pipe_pow(i)).collect();
    for _ in 0..500 {
        for i in 0..k {
            let mut den = (1.0, 0.0);
            for j in 0..k {
                if i != j {
                    den = mul(den, (z[i].0 - z[j].0, z[i].1 - z[j].1));
                }
            }
            let num = eval(z[i]);
            let d2 = den.0 * den.0 + den.1 * den.1;
            let q = ((num.0 * den.0 + num.1 * den.1) / d2, (num.1 * den.0 - num.0 * den.1) / d2);
            z[i] = (z[i].0 - q.0, z[i].1 - q.1);
        }
    }
    z
}

trait PipePow {
    fn pipe_pow(self, n: usize) -> Self;
}

impl PipePow for (f64, f64) {
    fn pipe_pow(self, n: usize) -> Self {
        (0..n).fold((1.0, 0.0), |acc, _| (acc.0 * self.0 - acc.1 * self.1, acc.0 * self.1 + acc.1 * self.0))
    }
}

/// ∏ g(θ_i) over all conjugates, rounded.
fn oracle_norm(roots: &[(f64, f64)], c: &[i64]) -> i64 {
    let mut prod = (1.0, 0.0);
    for &r in roots {
        let mut g = (0.0, 0.0);
        let mut p = (1.0, 0.0);
        for &ci in c {
            g = (g.0 + ci as f64 * p.0, g.1 + ci as f64 * p.1);
            p = (p.0 * r.0 - p.1 * r.1, p.0 * r.1 + p.1 * r.0);
        }
        prod = (prod.0 * g.0 - prod.1 * g.1, prod.0 * g.1 + prod.1 * g.0);
    }
    assert!(prod.1.abs() < 1e-6 * prod.0.abs().max(1.0));
    prod.0.round() as i64
}

fn plastic() -> NumberFieldOrder {
    NumberFieldOrder::parse("x^3-x-1").unwrap()
}

#[test]
fn quadratic_unit_search_matches_the_pell_scan() {
    let o = NumberFieldOrder::quadratic(2).unwrap();
    let s = unit_search(&o, 5).unwrap();
    let got: Vec<Vec<i64>> = s.units.iter().map(|u| u.coeffs_i64()).collect();
    let mut oracle = Vec::new();
    for x in -5i64..=5 {
        for y in -5i64..=5 {
            if (x * x - 2 * y * y).abs() == 1 {
                oracle.push(vec![x, y]);
            }
        }
    }
    assert_eq!(got, oracle);
    for want in [[1, 1], [-1, -1], [1, -1], [-1, 1], [3, 2]] {
        assert!(got.contains(&want.to_vec()), "{want:?}");
    }
    let plus: Vec<Vec<i64>> = s.positive.iter().map(|u| u.coeffs_i64()).collect();
    assert!(plus.contains(&vec![3, 2]) && plus.contains(&vec![1, 0]) && plus.contains(&vec![3, -2]));
    assert!(!plus.contains(&vec![1, 1]) && !plus.contains(&vec![-3, -2]));
    assert_eq!(pell_unit(2).unwrap().plus.coeffs_i64(), vec![3, 2]);
}

#[test]
fn pell_units_against_exhaustive_scan() {
    for d in [2i64, 3, 5, 6, 7, 10, 13] {
        let u = pell_unit(d).unwrap();
        // smallest y > 0 with x² - d y² = ±1, x > 0
        let (x, y) = (1i64..)
            .find_map(|y| {
                let t = d * y * y;
                [t - 1, t + 1].iter().find_map(|&s| {
                    let x = (s as f64).sqrt().round() as i64;
                    (x * x == s).then_some((x, y))
                })
            })
            .unwrap();
        assert_eq!(u.fundamental.coeffs_i64(), vec![x, y], "d = {d}");
        assert!(u.plus.norm.is_one());
    }
    // in Z[√5] the smallest norm-1 unit with integer coordinates
    assert_eq!(pell_unit(5).unwrap().plus.coeffs_i64(), vec![9, 4]);
}

#[test]
fn plastic_norms_against_the_root_product() {
    let o = plastic();
    let roots = complex_roots(&[-1.0, -1.0, 0.0, 1.0]);
    for a in -3i64..=3 {
        for b in -3i64..=3 {
            for c in -3i64..=3 {
                let e = o.element_i64(&[a, b, c]);
                assert_eq!(e.norm, BigInt::from(oracle_norm(&roots, &[a, b, c])), "{e}");
            }
        }
    }
    let s = unit_search(&o, 10).unwrap();
    assert!(s.units.iter().any(|u| u.coeffs_i64() == [0, 1, 0]));
    assert!(s.positive.iter().any(|u| u.coeffs_i64() == [0, 1, 0]));
    for u in &s.units {
        assert_eq!(oracle_norm(&roots, &u.coeffs_i64()).abs(), 1);
    }
    let mut sorted = s.units.clone();
    sorted.sort_by_key(|u| u.coeffs_i64());
    assert_eq!(sorted, s.units);
}

#[test]
fn bound_one_contains_plus_minus_one() {
    for f in ["x^2-2", "x^2-3", "x^3-x-1", "x^3-2"] {
        let o = NumberFieldOrder::parse(f).unwrap();
        let u: Vec<Vec<i64>> = unit_search(&o, 1).unwrap().units.iter().map(|u| u.coeffs_i64()).collect();
        let mut one = vec![0; o.k];
        one[0] = 1;
        let minus: Vec<i64> = one.iter().map(|x| -x).collect();
        assert!(u.contains(&one) && u.contains(&minus), "{f}");
    }
}

fn check_morphism(o: &NumberFieldOrder, bound: u32) -> usize {
    let s = unit_search(o, bound).unwrap();
    let mats: Vec<IntMatrix> = s.units.iter().map(|u| mult_matrix(o, u).unwrap()).collect();
    let mut pairs = 0;
    for (a, ma) in s.units.iter().zip(&mats) {
        for (b, mb) in s.units.iter().zip(&mats) {
            let ab = o.mul(a, b);
            assert_eq!(mult_matrix(o, &ab).unwrap(), int_mat_mul(ma, mb), "{a} * {b}");
            pairs += 1;
        }
    }
    pairs
}

#[test]
fn multiplication_matrices_form_a_morphism() {
    assert!(check_morphism(&NumberFieldOrder::quadratic(2).unwrap(), 10) > 100);
    assert!(check_morphism(&plastic(), 10) > 100);
}

#[test]
fn named_multiplication_matrices() {
    let o = NumberFieldOrder::quadratic(2).unwrap();
    let a = o.element_i64(&[3, 2]);
    let m = mult_matrix(&o, &a).unwrap();
    assert_eq!(m, int_matrix(&[&[3, 4], &[2, 3]]));
    assert!(det_bareiss(&m).is_one());
    assert!(transpose_identity_residual(&o, &a, 128).unwrap() < 1e-10);
    assert_eq!(mult_matrix(&o, &o.one()).unwrap(), identity(2));

    let p = plastic();
    let m = mult_matrix(&p, &p.element_i64(&[0, 1])).unwrap();
    assert_eq!(m, int_matrix(&[&[0, 0, 1], &[1, 0, 1], &[0, 1, 0]]));
    assert!(det_bareiss(&m).is_one());
    assert!(matches!(mult_matrix(&p, &p.element_i64(&[2, 0, 0])), Err(Error::NotUnit(_))));
}

#[test]
fn representation_lands_in_the_stabilizer() {
    for f in ["x^2-2", "x^3-x-1", "x^3-2"] {
        let o = NumberFieldOrder::parse(f).unwrap();
        let mut v = vec![RealInput::rational(1, 1)];
        v.extend(basis_direction(&o));
        let s = unit_search(&o, 4).unwrap();
        assert!(!s.positive.is_empty());
        let gens: Vec<IntMatrix> = s.positive.iter().map(|u| gv_element(&o, u).unwrap()).collect();
        for (u, g) in s.positive.iter().zip(&gens) {
            let c = gv_check(g, &v).unwrap();
            assert!(c.exact && c.structure_ok(), "{f}: {u}");
            let emb = o.embed(u, 128);
            assert!((c.lambda() - emb.mid_f64()).abs() < 1e-12 * emb.mid_f64().max(1.0));
        }
        for a in &gens {
            for b in &gens {
                assert_eq!(int_mat_mul(a, b), int_mat_mul(b, a));
            }
        }
    }
}

#[test]
fn stabilizer_examples() {
    let v2 = vec![RealInput::rational(1, 1), RealInput::sqrt(2).unwrap()];
    // the stabilizing matrix is the transpose of M_a; M_a itself does not fix (1, √2)
    let m = int_matrix(&[&[3, 4], &[2, 3]]);
    assert!(matches!(gv_check(&m, &v2), Err(Error::NotInGv(_))));
    let c = gv_check(&transpose(&m), &v2).unwrap();
    assert!((c.lambda() - (3.0 + 2.0 * 2f64.sqrt())).abs() < 1e-14);

    let a = int_matrix(&[&[2, 1], &[1, 1]]);
    let v = vec![RealInput::rational(1, 1), RealInput::surd(-1, 1, 2, 5).unwrap()];
    let c = gv_check(&a, &v).unwrap();
    assert_eq!(c.lambda_exact.unwrap().to_string(), "surd:3,1,2,5");
    assert!(matches!(gv_check(&a, &[RealInput::rational(1, 1), RealInput::rational(0, 1)]), Err(Error::NotInGv(_))));

    // interval path: a decimal approximation of the golden direction
    let d = vec![RealInput::rational(1, 1), RealInput::parse("dec:0.6180339887498948:16").unwrap()];
    let c = gv_check(&a, &d).unwrap();
    assert!(!c.exact && c.residual < 1e-14);
    let id = gv_check(&identity(2), &v).unwrap();
    assert!((id.lambda() - 1.0).abs() < 1e-30);
}

#[test]
fn appendix_pair() {
    let r = appendix_matrices_check();
    assert!(r.commute);
    assert!(!r.conj_a_integral && r.conj_b_integral);
    assert!(r.a_diagonalizable && r.b_diagonalizable);
    assert!(r.eigen_residual < 1e-9, "{}", r.eigen_residual);
    assert!(r.a_member.is_ok(), "{:?}", r.a_member);
    assert!(r.ok());
}

#[test]
fn basis_directions() {
    let d = basis_direction(&NumberFieldOrder::quadratic(2).unwrap());
    assert_eq!(d, vec![RealInput::sqrt(2).unwrap()]);
    let d = basis_direction(&NumberFieldOrder::parse("x^3-2").unwrap());
    assert!((d[0].to_f64() - 2f64.cbrt()).abs() < 1e-15 && (d[1].to_f64() - 4f64.cbrt()).abs() < 1e-15);
    let d = basis_direction(&plastic());
    assert!((d[0].to_f64() - 1.324717957244746).abs() < 1e-15);
    assert!((d[1].to_f64() - 1.324717957244746f64.powi(2)).abs() < 1e-14);
}

#[test]
fn basis_directions_are_badly_approximable() {
    for f in ["x^2-2", "x^3-2", "x^3-x-1"] {
        let alpha = basis_direction(&NumberFieldOrder::parse(f).unwrap());
        let c = badapprox_scan(&alpha, 100_000).unwrap();
        assert!(c.min_quality > 0.0 && !c.rational_hit, "{f}: {c:?}");
    }
}

#[test]
fn shipped_fields_respect_the_rank_bounds() {
    for f in ["x^2-2", "x^2-3", "x^3-x-1", "x^3-2", "x^3-3x-1", "x^4-x-1"] {
        let r = unit_rank(&IntPoly::parse(f).unwrap()).unwrap();
        assert!(r.r >= 1 && r.upper_ok && r.rank == r.r + r.s - 1 && r.r + 2 * r.s == r.k, "{f}");
        assert!(r.rank >= r.dirichlet_lower);
    }
}

#[test]
fn suspension_models() {
    let s = suspension_model(&int_matrix(&[&[2, 1], &[1, 1]]), 0).unwrap();
    assert_eq!(s.alpha(), &[RealInput::surd(-1, 1, 2, 5).unwrap()]);
    assert!(!s.isometric);

    let a4 = int_matrix(&[&[2, 1, 0, 1], &[1, 1, 0, 0], &[0, 0, 2, 1], &[0, 0, 1, 1]]);
    let s = suspension_model(&a4, 0).unwrap();
    assert_eq!(s.factors, vec![(2, IntPoly::parse("x^2-3x+1").unwrap())]);
    assert!(!s.isometric);
    // the coupling block makes the double eigenvalue defective
    assert_eq!(s.geometric_multiplicity, 1);
    assert!(!s.diagonalizable);
    assert_eq!(s.direction[1], RealInput::surd(-1, 1, 2, 5).unwrap());
    assert_eq!(s.direction[2], RealInput::rational(0, 1));

    assert!(matches!(suspension_model(&identity(3), 0), Err(Error::NoIrrationalEigenvalue(0))));
    let appendix = suspension_model(&int_matrix(&[&[0, 0, 1], &[1, 0, 6], &[0, 1, 0]]), 1).unwrap();
    let c = gv_check(&int_matrix(&[&[0, 0, 1], &[1, 0, 6], &[0, 1, 0]]), &appendix.direction);
    // the middle root of x³ - 6x - 1 is negative, so A fixes that line with λ < 0
    assert!(matches!(c, Err(Error::NotInGv(s)) if s.contains("positive")));
}

proptest! {
    #[test]
    fn norm_is_multiplicative(a in prop::collection::vec(-20i64..20, 3), b in prop::collection::vec(-20i64..20, 3)) {
        let o = plastic();
        let (x, y) = (o.element_i64(&a), o.element_i64(&b));
        prop_assert_eq!(o.mul(&x, &y).norm, &x.norm * &y.norm);
    }

    #[test]
    fn unit_words_multiply_like_their_matrices(word in prop::collection::vec(0usize..4, 1..12)) {
        // θ, θ⁻¹ = θ² - 1, -1 and 1 + θ = θ³
        let o = plastic();
        let gens = [o.element_i64(&[0, 1]), o.element_i64(&[-1, 0, 1]), o.element_i64(&[-1]), o.element_i64(&[1, 1])];
        let mut acc = o.one();
        let mut m = identity(3);
        for &g in &word {
            prop_assert!(gens[g].is_unit());
            acc = o.mul(&acc, &gens[g]);
            m = int_mat_mul(&m, &mult_matrix(&o, &gens[g]).unwrap());
        }
        prop_assert_eq!(mult_matrix(&o, &acc).unwrap(), m);
        prop_assert_eq!(det_bareiss(&mult_matrix(&o, &acc).unwrap()), acc.norm);
    }
}
