use collapse_core::cohomology::{
    catalog, gysin_consistency, lookup, m_p, twisted_dims, vanishing_criteria, FlowProfile,
};
use collapse_core::Error;
use proptest::prelude::*;

#[test]
fn catalog_counts() {
    let expect: &[(&str, &[u32])] = &[
        ("hopf-s3", &[0, 1, 1, 0]),
        ("sphere-s3", &[0, 1, 1, 0]),
        ("sphere-s5", &[0, 1, 1, 1, 1, 0]),
        ("sphere-s7", &[0, 1, 1, 1, 1, 1, 1, 0]),
        ("torus-t2", &[0, 0, 0]),
        ("torus-t3", &[0, 0, 0, 0]),
        ("carriere-sol", &[0, 0, 0, 0]),
        ("euler-surgery", &[0, 0, 0, 0, 0]),
    ];
    for (name, m) in expect {
        assert_eq!(m_p(&lookup(name).unwrap()).unwrap(), *m, "{name}");
    }
    let m = m_p(&lookup("suspension-t4").unwrap()).unwrap();
    assert_eq!(m[1], 0);
    assert!(m[2] > 0);
}

#[test]
fn every_catalog_entry_is_consistent() {
    for p in catalog() {
        p.validate().unwrap();
        let v = vanishing_criteria(&p).unwrap();
        assert!(v.passes(), "{p}");
        assert!(gysin_consistency(&p).unwrap().feasible, "{p}");
        assert_eq!(p.kappa_zero, p.h[p.n - 1] != 0, "{p}");
        let m = m_p(&p).unwrap();
        assert_eq!((m[0], m[p.n]), (0, 0));
    }
}

#[test]
fn vanishing_clauses_on_named_examples() {
    let hopf = vanishing_criteria(&lookup("hopf-s3").unwrap()).unwrap();
    assert_eq!(hopf.m[1], 1);
    let sol = lookup("carriere-sol").unwrap();
    assert!(!sol.kappa_zero && sol.euler_zero);
    assert!(vanishing_criteria(&sol).unwrap().passes());
    let s4 = lookup("suspension-t4").unwrap();
    assert!(!s4.kappa_zero && !s4.euler_zero);
}

fn profile_strategy() -> impl Strategy<Value = FlowProfile> {
    (2usize..7, any::<bool>(), any::<bool>()).prop_flat_map(|(n, kappa, euler)| {
        (Just(n), Just(kappa), Just(euler), prop::collection::vec(0u32..4, n), prop::collection::vec(0u32..5, n + 1))
            .prop_map(|(n, kappa_zero, euler_zero, mut h, mut b)| {
                h[0] = 1;
                if kappa_zero {
                    for p in 0..n {
                        h[n - 1 - p] = h[p];
                    }
                    h[n - 1] = 1;
                    h[0] = 1;
                } else {
                    h[n - 1] = 0;
                    if n == 1 {
                        h[0] = 1;
                    }
                }
                b[0] = 1;
                b[n] = 1;
                for p in 0..=n {
                    b[n - p] = b[p];
                }
                FlowProfile { name: "random".into(), n, h, b, kappa_zero, euler_zero, note: String::new() }
            })
    })
}

proptest! {
    #[test]
    fn counts_agree_with_the_exact_sequence(p in profile_strategy()) {
        prop_assume!(p.validate().is_ok());
        let g = gysin_consistency(&p).unwrap();
        match m_p(&p) {
            Ok(m) => {
                prop_assert_eq!(m[0], 0);
                prop_assert_eq!(m[p.n], 0);
                if g.feasible {
                    // exactness gives m_p = e_{p-2} + e_{p-1}, e_j the rank of ∧e on H^j_κ
                    let e = g.euler_ranks();
                    let at = |j: i64| if j < 0 { 0 } else { e.get(j as usize + 1).copied().unwrap_or(0) };
                    for (q, mq) in m.iter().enumerate() {
                        let q = q as i64;
                        prop_assert_eq!(*mq as i64, at(q - 2) + at(q - 1));
                    }
                    if p.euler_zero {
                        prop_assert!(m.iter().all(|&x| x == 0));
                    }
                }
            }
            Err(e) => prop_assert!(matches!(e, Error::ProfileInconsistent(_))),
        }
        let tw = twisted_dims(&p);
        for i in 0..p.n {
            prop_assert_eq!(tw[i], p.h[p.n - 1 - i]);
        }
    }

    #[test]
    fn profile_text_round_trips(p in profile_strategy()) {
        prop_assert_eq!(FlowProfile::parse(&p.to_text()).unwrap(), p);
    }
}
