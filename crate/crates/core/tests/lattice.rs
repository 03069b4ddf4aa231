use collapse_core::diophantine::{cf_expand, construct_alpha_with_mu, construct_liouville};
use collapse_core::lattice::{
    covering_radius, dual_min, gram, scan_collapse, shortest_vector, verify_th2, verify_th3, EpsRange, GramSource,
};
use collapse_core::lattice::geometry::{covering_radius_source, shortest_vector_source};
use collapse_core::real::RealInput;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn quad(g: &[Vec<f64>], w: &[i64]) -> f64 {
    let mut acc = 0.0;
    for i in 0..w.len() {
        for j in 0..w.len() {
            acc += g[i][j] * (w[i] * w[j]) as f64;
        }
    }
    acc
}

/// Minimum of `wᵀGw` over the box `|w_i| ≤ b`, excluding 0.
fn brute_min(g: &[Vec<f64>], b: i64) -> f64 {
    let k = g.len();
    let mut w = vec![-b; k];
    let mut best = f64::INFINITY;
    loop {
        if w.iter().any(|&x| x != 0) {
            best = best.min(quad(g, &w));
        }
        let mut i = 0;
        loop {
            if i == k {
                return best;
            }
            if w[i] < b {
                w[i] += 1;
                break;
            }
            w[i] = -b;
            i += 1;
        }
    }
}

fn random_spd(rng: &mut StdRng, k: usize) -> Vec<Vec<f64>> {
    let a: Vec<Vec<f64>> = (0..k).map(|_| (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
    let mut g = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in 0..k {
            g[i][j] = (0..k).map(|l| a[i][l] * a[j][l]).sum::<f64>() + if i == j { 0.2 } else { 0.0 };
        }
    }
    for i in 0..k {
        for j in 0..i {
            g[i][j] = g[j][i];
        }
    }
    g
}

fn as_i64(w: &[BigInt]) -> Vec<i64> {
    w.iter().map(|x| x.to_i64().unwrap()).collect()
}

#[test]
fn shortest_vector_matches_brute_force() {
    let mut rng = StdRng::seed_from_u64(7);
    for trial in 0..24 {
        let k = 2 + trial % 2;
        let g = random_spd(&mut rng, k);
        let src = GramSource::from_f64(&g).unwrap();
        let sv = shortest_vector_source(&src).unwrap();
        let oracle = brute_min(&g, 50);
        let got = quad(&g, &as_i64(&sv.w));
        assert!((got / oracle - 1.0).abs() < 1e-12, "trial {trial}: {got} vs {oracle}");
    }
}

#[test]
fn collapsed_shortest_vector_matches_brute_force() {
    let mut rng = StdRng::seed_from_u64(11);
    let alphas = [RealInput::phi(), RealInput::sqrt(3).unwrap(), RealInput::cbrt(2).unwrap()];
    for trial in 0..12 {
        let a = alphas[trial % 3].clone();
        let eps = 2f64.powf(-rng.gen_range(1.0..7.0));
        let m = gram(2, &[a], eps).unwrap();
        let g = m.gram_f64();
        let sv = shortest_vector(&m).unwrap();
        let oracle = brute_min(&g, 50);
        assert!((quad(&g, &as_i64(&sv.w)) / oracle - 1.0).abs() < 1e-9, "trial {trial}");
    }
    let m = gram(3, &[RealInput::sqrt(2).unwrap(), RealInput::sqrt(3).unwrap()], 0.1).unwrap();
    let g = m.gram_f64();
    let sv = shortest_vector(&m).unwrap();
    assert!((quad(&g, &as_i64(&sv.w)) / brute_min(&g, 20) - 1.0).abs() < 1e-9);
}

#[test]
fn convergent_scale_shortest_vector_is_a_fibonacci_pair() {
    let fib = [1i64, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89];
    for n in 4..9 {
        let eps = 1.0 / (fib[n] * fib[n]) as f64;
        let m = gram(2, &[RealInput::phi()], eps).unwrap();
        let g = m.gram_f64();
        let sv = shortest_vector(&m).unwrap();
        let w = as_i64(&sv.w);
        let oracle = brute_min(&g, 10 * fib[n]);
        assert!((quad(&g, &w) / oracle - 1.0).abs() < 1e-9);
        assert!(fib.windows(2).any(|p| w == [p[0], p[1]]), "{w:?}");
    }
}

#[test]
fn identity_and_axis_examples() {
    let m = gram(2, &[RealInput::rational(0, 1)], 0.25).unwrap();
    let sv = shortest_vector(&m).unwrap();
    assert_eq!(as_i64(&sv.w), vec![1, 0]);
    assert_eq!(sv.length, 0.25);
    let cr = covering_radius(&m).unwrap();
    assert!((cr.upper - (0.0625f64 + 1.0).sqrt() / 2.0).abs() < 1e-15);

    let id = gram(2, &[RealInput::phi()], 1.0).unwrap();
    let cr = covering_radius(&id).unwrap();
    assert!(cr.exact && (cr.lower - 0.5f64.sqrt()).abs() < 1e-15);
}

/// Farthest point from Z^k under G, sampled on an n^k grid of the unit cell.
fn sampled_covering(g: &[Vec<f64>], n: usize) -> f64 {
    let k = g.len();
    let mut far = 0.0f64;
    let total = n.pow(k as u32);
    for idx in 0..total {
        let x: Vec<f64> = (0..k).map(|i| ((idx / n.pow(i as u32)) % n) as f64 / n as f64).collect();
        let mut near = f64::INFINITY;
        for nb in 0..5usize.pow(k as u32) {
            let y: Vec<f64> = (0..k).map(|i| x[i] - (((nb / 5usize.pow(i as u32)) % 5) as f64 - 2.0)).collect();
            let mut q = 0.0;
            for i in 0..k {
                for j in 0..k {
                    q += g[i][j] * y[i] * y[j];
                }
            }
            near = near.min(q);
        }
        far = far.max(near);
    }
    far.sqrt()
}

#[test]
fn covering_radius_against_sampled_oracle() {
    let id3 = GramSource::from_f64(&[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]).unwrap();
    let cr = covering_radius_source(&id3).unwrap();
    let s3 = 3f64.sqrt() / 2.0;
    assert!(cr.lower <= s3 + 1e-12 && s3 <= cr.upper + 1e-12, "{cr:?}");

    let mut rng = StdRng::seed_from_u64(3);
    for _ in 0..6 {
        let g = random_spd(&mut rng, 2);
        let cr = covering_radius_source(&GramSource::from_f64(&g).unwrap()).unwrap();
        let n = 200;
        let oracle = sampled_covering(&g, n);
        // sampling can only undershoot, by at most the grid step in the G-norm
        let step = (g[0][0].sqrt() + g[1][1].sqrt()) / n as f64;
        assert!(oracle <= cr.upper + 1e-12 && cr.upper - oracle <= step, "{} vs {oracle}", cr.upper);
    }
    for _ in 0..3 {
        let g = random_spd(&mut rng, 3);
        let cr = covering_radius_source(&GramSource::from_f64(&g).unwrap()).unwrap();
        let oracle = sampled_covering(&g, 30);
        let step = (0..3).map(|i| g[i][i].sqrt()).sum::<f64>() / 30.0;
        assert!(cr.lower <= oracle + step, "{} vs {oracle}", cr.lower);
        assert!(oracle <= cr.upper + 1e-12);
        assert!(cr.upper <= 3f64.sqrt() * cr.lower * (1.0 + 1e-12));
    }
}

/// `ε²⟨w,u⟩² + (|w|² − ⟨w,u⟩²)` with α replaced by a 2^-200-close rational.
fn scaling_oracle(alpha: &RealInput, eps: f64, w: &[i64]) -> f64 {
    let a = alpha.eval(260).mid_rational();
    let v = [BigRational::one(), a];
    let wr: Vec<BigRational> = w.iter().map(|&x| BigRational::from_integer(x.into())).collect();
    let n2 = &v[0] * &v[0] + &v[1] * &v[1];
    let dot = &wr[0] * &v[0] + &wr[1] * &v[1];
    let along = &dot * &dot / n2;
    let e = BigRational::from_float(eps).unwrap();
    let w2 = &wr[0] * &wr[0] + &wr[1] * &wr[1];
    let r = &e * &e * &along + (w2 - along);
    r.to_f64().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]
    #[test]
    fn scaling_identity(w0 in -500i64..500, w1 in -500i64..500, e in 0.0f64..30.0, which in 0usize..3) {
        prop_assume!(w0 != 0 || w1 != 0);
        let alpha = [RealInput::phi(), RealInput::sqrt(2).unwrap(), RealInput::cbrt(2).unwrap()][which].clone();
        let eps = (-e).exp2();
        let src = GramSource::collapsed(std::slice::from_ref(&alpha), eps).unwrap();
        let w = [BigInt::from(w0), BigInt::from(w1)];
        let got = src.quad_form(&w, src.base_prec()).mid_f64();
        let want = scaling_oracle(&alpha, eps, &[w0, w1]);
        prop_assert!((got / want - 1.0).abs() < 1e-12, "{} vs {}", got, want);
    }
}

#[test]
fn volume_is_eps_on_random_directions() {
    let mut rng = StdRng::seed_from_u64(5);
    for _ in 0..100 {
        let alpha = RealInput::rational(rng.gen_range(-1000..1000), rng.gen_range(1..1000));
        let eps = 2f64.powf(-rng.gen_range(0.0..40.0));
        let m = gram(2, &[alpha], eps).unwrap();
        assert!((m.volume().mid_f64() / eps - 1.0).abs() < 1e-12);
    }
}

#[test]
fn scan_invariants() {
    let grid = EpsRange::octaves(-24, 0).grid().unwrap();
    for alpha in [vec![RealInput::phi()], vec![RealInput::sqrt(2).unwrap(), RealInput::sqrt(3).unwrap()]] {
        let k = alpha.len() + 1;
        let rows = scan_collapse(k, &alpha, &grid, None).unwrap();
        let vol1 = rows[0].vol;
        assert_eq!(rows[0].eps, 1.0);
        for r in &rows {
            // transference between the dual minimum and the covering radius
            assert!(r.dual_min * r.diam_hi >= 0.5 * (1.0 - 1e-12), "{r:?}");
            assert!(r.dual_min * r.diam_lo <= k as f64 / 2.0 * (1.0 + 1e-12), "{r:?}");
            assert!(r.diam_lo <= r.diam_hi && r.diam_hi <= (k as f64).sqrt() * r.diam_lo * (1.0 + 1e-12));
            assert!(r.injrad <= r.diam_hi);
            assert!((r.vol / (r.eps * vol1) - 1.0).abs() < 1e-12);
            if k == 2 {
                let p = r.injrad * r.diam_hi;
                assert!(p >= r.vol / 4.0 * (1.0 - 1e-12) && p <= 4.0 * r.vol, "{r:?}");
            }
        }
        for w in rows.windows(2) {
            assert!(w[1].injrad <= w[0].injrad * (1.0 + 1e-12));
        }
    }
}

#[test]
fn dual_minimum_is_inverse_shortest() {
    // the dual of diag(ε², 1) is diag(ε⁻², 1)
    let src = GramSource::collapsed(&[RealInput::rational(0, 1)], 0.125).unwrap();
    assert_eq!(dual_min(&src).unwrap(), 1.0);
}

#[test]
fn diameter_exponent_tracks_the_irrationality_exponent() {
    let range = EpsRange::octaves(-48, -4);
    for x in [RealInput::phi(), RealInput::sqrt(2).unwrap()] {
        let cf = cf_expand(&x, 60).unwrap();
        let r = verify_th2(&x, &cf, &range, Some(20), 0.05).unwrap();
        assert!(r.pass, "{x}: {} vs {}", r.liminf, r.target);
        assert!(r.subgrid_min.is_some());
    }
    let cf = construct_alpha_with_mu(4.0, 12).unwrap();
    let x = RealInput::parse("mu:4:12").unwrap();
    let r = verify_th2(&x, &cf, &range, Some(4), 0.08).unwrap();
    assert!(r.pass, "{} vs {}", r.liminf, r.target);
}

#[test]
fn badly_approximable_directions_give_bounded_ratios() {
    let range = EpsRange::octaves(-40, -4);
    let a = vec![RealInput::cbrt(2).unwrap(), RealInput::parse("poly:x^3-2@1,2:x^2").unwrap()];
    let r = verify_th3(&a, &range, None, 10_000, 10.0).unwrap();
    assert!(r.pass && r.ratio_min >= 0.1 && r.ratio_max <= 10.0, "{} {}", r.ratio_min, r.ratio_max);

    let s2 = RealInput::sqrt(2).unwrap();
    let r = verify_th3(std::slice::from_ref(&s2), &range, None, 10_000, 6.0).unwrap();
    assert!(r.pass, "c = {}", r.c);
}

#[test]
fn well_approximable_directions_fail_the_bound() {
    let range = EpsRange::octaves(-40, -4);
    let cf = construct_liouville(9).unwrap();
    let x = RealInput::parse("mu:inf").unwrap();
    let r = verify_th3(&[x], &range, Some(&cf), 10_000, 10.0).unwrap();
    assert!(!r.pass, "c = {}", r.c);

    let cf = construct_alpha_with_mu(4.0, 12).unwrap();
    let x = RealInput::parse("mu:4:12").unwrap();
    let r = verify_th3(&[x], &range, Some(&cf), 10_000, 10.0).unwrap();
    assert!(r.drift > 100.0, "drift {}", r.drift);
}

#[test]
fn shortest_vector_is_sign_normalised() {
    let m = gram(2, &[RealInput::sqrt(5).unwrap()], 0.01).unwrap();
    let w = shortest_vector(&m).unwrap().w;
    assert!(w.iter().find(|x| !x.is_zero()).unwrap().is_positive());
}
