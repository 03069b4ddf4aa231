use collapse_core::diophantine::{
    badapprox_scan, cf_expand, check_convergent_bounds, construct_alpha_with_mu, construct_liouville, mu_estimate,
    ContinuedFraction,
};
use collapse_core::real::RealInput;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};
use proptest::prelude::*;

#[test]
fn mu_of_quadratic_irrationals_is_two() {
    for x in [RealInput::phi(), RealInput::sqrt(2).unwrap(), RealInput::sqrt(3).unwrap()] {
        let cf = cf_expand(&x, 60).unwrap();
        let m = mu_estimate(&cf, 20).unwrap();
        assert!((m.estimate - 2.0).abs() <= 0.01, "{x}: {}", m.estimate);
        assert!(m.forms_agree);
        assert!(m.lower <= m.upper);
    }
}

#[test]
fn prescribed_mu_is_recovered() {
    let cf = construct_alpha_with_mu(4.0, 12).unwrap();
    let m = mu_estimate(&cf, 4).unwrap();
    assert!((m.estimate - 4.0).abs() <= 0.2, "{}", m.estimate);
    assert!(m.forms_agree);

    let cf = construct_alpha_with_mu(3.0, 14).unwrap();
    let m = mu_estimate(&cf, 14 / 3).unwrap();
    assert!((m.estimate - 3.0).abs() <= 0.15, "{}", m.estimate);
}

#[test]
fn liouville_ratios_grow() {
    let cf = construct_liouville(9).unwrap();
    let m = mu_estimate(&cf, 3).unwrap();
    let r: Vec<f64> = m.ratios.iter().filter(|r| r.0 >= 3).map(|r| r.1).collect();
    assert!(r.windows(2).all(|w| w[1] > w[0]), "{r:?}");
    assert!(m.window_max > 8.0);
}

#[test]
fn bounded_quotients_approach_two_monotonically_in_depth() {
    // Window maxima of [1; 2, 1, 2, ...] at increasing depth decrease towards 2.
    let a: Vec<i64> = (0..200).map(|i| if i % 2 == 0 { 1 } else { 2 }).collect();
    let mut last = f64::INFINITY;
    for depth in [40, 80, 160, 200] {
        let cf = ContinuedFraction::from_i64(&a[..depth]).unwrap();
        let m = mu_estimate(&cf, depth / 3).unwrap();
        assert!(m.window_max <= last + 1e-12);
        assert!((m.estimate - 2.0).abs() < 0.01);
        last = m.window_max;
    }
}

#[test]
fn decimal_and_surd_expansions_agree() {
    let digits_phi = "1.61803398874989484820458683436563811772030917980576286213544862270526046281890244970720720418939113748475408807538689175212663386222353693179318006076672635443338908659593958290563832266131992829026788067520876689250171169620703222104321626954862629631361443814975870122034080588795445474924618569536486444924104432077134494704956584678850987433944221254487706647809158846074998871240076521705751797883416625624940758907";
    let digits_sqrt2 = "1.41421356237309504880168872420969807856967187537694807317667973799073247846210703885038753432764157273501384623091229702492483605585073721264412149709993583141322266592750559275579995050115278206057147010955997160597027453459686201472851741864088919860955232923048430871432145083976260362799525140798968725339654633180882964062061525835239505474575028775996172983557522033753185701135437460340849884716038689997069900481503";
    let digits_sqrt3 = "1.73205080756887729352744634150587236694280525381038062805580697945193301690880003708114618675724857567562614141540670302996994509499895247881165551209437364852809323190230558206797482010108467492326501531234326690332288665067225466892183797122704713166036786158801904998653737985938946765034750657605075661834812960610094760218719032508314582952395983299778982450828871446383291734722416398458785539766795806381835366611084";
    for (lit, x) in [
        (digits_phi, RealInput::phi()),
        (digits_sqrt2, RealInput::sqrt(2).unwrap()),
        (digits_sqrt3, RealInput::sqrt(3).unwrap()),
    ] {
        let dec = RealInput::decimal(&lit[..202], None).unwrap();
        let partial = collapse_core::diophantine::cf_expand_partial(&dec, 1000).unwrap();
        assert!(partial.len() > 150, "only {} terms", partial.len());
        let exact = cf_expand(&x, partial.len()).unwrap();
        assert_eq!(partial.quotients(), exact.quotients());
    }
}

#[test]
fn convergent_error_bound_for_exact_inputs() {
    for x in [
        RealInput::phi(),
        RealInput::sqrt(7).unwrap(),
        RealInput::cbrt(2).unwrap(),
        RealInput::parse("plastic").unwrap(),
    ] {
        let cf = cf_expand(&x, 40).unwrap();
        assert!(check_convergent_bounds(&x, &cf), "{x}");
    }
}

#[test]
fn badapprox_is_monotone_in_the_bound() {
    let alpha = vec![RealInput::cbrt(2).unwrap(), RealInput::parse("poly:x^3-2@1,2:x^2").unwrap()];
    let mut last = f64::INFINITY;
    for q in [10, 100, 1000, 5000] {
        let c = badapprox_scan(&alpha, q).unwrap();
        assert!(c.min_quality <= last);
        assert!(c.min_quality > 0.0);
        last = c.min_quality;
    }
}

#[test]
fn badapprox_sqrt2_floor() {
    let c = badapprox_scan(&[RealInput::sqrt(2).unwrap()], 100_000).unwrap();
    assert!(c.min_quality >= 0.2, "{}", c.min_quality);
    assert!(!c.rational_hit);
}

fn euclid_oracle(mut p: i64, mut q: i64) -> Vec<i64> {
    let mut out = vec![];
    loop {
        let a = p.div_euclid(q);
        out.push(a);
        let r = p - a * q;
        if r == 0 {
            return out;
        }
        p = q;
        q = r;
    }
}

proptest! {
    #[test]
    fn rational_expansions_match_euclid(p in -100_000i64..100_000, q in 1i64..100_000) {
        let cf = cf_expand(&RealInput::rational(p, q), 1000).unwrap();
        let g = p.gcd(&q);
        let expect = euclid_oracle(p / g, q / g);
        let got: Vec<i64> = cf.quotients().iter().map(|a| a.try_into().unwrap()).collect();
        // A finite expansion has two forms; the Euclidean one ends in a quotient > 1 unless it is a_0.
        prop_assert_eq!(got, expect);
        prop_assert!(cf.is_terminated());
        let conv = cf.convergents();
        let (pn, qn) = conv.last().unwrap();
        prop_assert_eq!(pn, &BigInt::from(p / g));
        prop_assert_eq!(qn, &BigInt::from(q / g));
        for w in conv.windows(2) {
            // p_n q_{n-1} - p_{n-1} q_n = ±1 forces coprimality
            let det = &w[1].0 * &w[0].1 - &w[0].0 * &w[1].1;
            prop_assert!(det.abs().is_one());
        }
        for (i, c) in conv.iter().enumerate().skip(1) {
            if i >= 2 {
                prop_assert!(c.1 > conv[i - 1].1);
            }
        }
    }
}
