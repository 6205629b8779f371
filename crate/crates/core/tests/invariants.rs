mod common;

use std::collections::BTreeSet;

use common::suites::*;
use common::*;
use cremona::cremona::{parse_map, CremonaMap};
use cremona::fibretrees::{act_on_vertex, JVertex};
use cremona::fields::{place_image, Place};
use cremona::fixpoint::{decent_fixpoint, verify_fixed, verify_report, GroupSpec};
use cremona::growth::{classify_growth, degree_table, GrowthClass};
use cremona::halphen::{check_parabolic_system, closed_form_degree, halphen_coefficients, push_forward_degree};
use cremona::jonquieres::{parse_jonq, singular_places, JonqElem};
use cremona::moebius::Moebius;
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn cfg(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

// --- fields -----------------------------------------------------------------



fn nonzero() -> impl Strategy<Value = i64> {
    prop_oneof![-5i64..=-1, 1i64..=5]
}

proptest! {
    #![proptest_config(cfg(128))]

    #[test]
    fn valuations_add_and_satisfy_the_product_formula(
        c in nonzero(), d in nonzero(),
        e in prop::collection::vec(-3i64..=3, 5),
        f in prop::collection::vec(-3i64..=3, 5),
    ) {
        check_valuations(c, d, e, f)?;
    }

    #[test]
    fn place_images_invert(a in -3i64..=3, b in -3i64..=3, c in -3i64..=3, d in -3i64..=3, i in 0usize..5) {
        prop_assume!(a * d != b * c);
        let h = Moebius::from_ints(Q, [a, b, c, d]);
        let p = if i == 4 { Place::Infinity } else { known_factor(i).1 };
        prop_assert_eq!(place_image(&place_image(&p, &h), &h.inverse()), p);
    }
}

// --- cremona ----------------------------------------------------------------

fn cremona_map() -> impl Strategy<Value = CremonaMap> {
    prop_oneof![
        jonq().prop_map(|f| f.to_cremona().unwrap()),
        (-2i64..=2).prop_map(|k| parse_map(&format!("(y, y^2 - x + {k})"), Q).unwrap()),
        (-2i64..=2).prop_map(|k| parse_map(&format!("(x + {k}*y^2, y)"), Q).unwrap()),
        Just(parse_map("(y, x)", Q).unwrap()),
    ]
}

proptest! {
    #![proptest_config(cfg(100))]

    #[test]
    fn composition_is_associative_and_submultiplicative(f in cremona_map(), g in cremona_map(), h in cremona_map()) {
        let fg = f.compose(&g).unwrap();
        prop_assert!(fg.degree() <= f.degree() * g.degree());
        prop_assert_eq!(fg.compose(&h).unwrap(), f.compose(&g.compose(&h).unwrap()).unwrap());
    }

    #[test]
    fn printed_maps_reparse(f in cremona_map(), j in jonq()) {
        prop_assert_eq!(parse_map(&f.to_string(), Q).unwrap(), f);
        prop_assert_eq!(parse_jonq(&j.to_string(), Q).unwrap(), j);
    }
}

// --- jonquieres -------------------------------------------------------------


proptest! {
    #![proptest_config(cfg(100))]

    #[test]
    fn cremona_image_is_a_homomorphism(f in jonq(), g in jonq()) {
        let lhs = f.compose(&g).unwrap().to_cremona().unwrap();
        let rhs = f.to_cremona().unwrap().compose(&g.to_cremona().unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn biregularity_calculus(f in jonq(), g in jonq()) {
        check_biregularity(f, g)?;
    }

    #[test]
    fn degree_is_subadditive(f in jonq(), g in jonq()) {
        check_subadditive(f, g)?;
    }

    #[test]
    fn singular_sets_are_transported(f in jonq()) {
        let z = JVertex::base();
        let fwd: BTreeSet<Place> = singular_places(&f, &z).unwrap().iter().map(|p| f.h().apply(p)).collect();
        prop_assert_eq!(singular_places(&f.inverse(), &z).unwrap(), fwd);
    }
}

// --- fibretrees ---------------------------------------------------------------


proptest! {
    #![proptest_config(cfg(100))]

    #[test]
    fn action_is_a_cocycle_and_an_isometry(f in jonq(), g in jonq(), v in vertex(), w in vertex()) {
        check_cocycle(f, g, v, w)?;
    }

    #[test]
    fn translation_length_matches_distance_slope(g in vertical(), i in 0usize..4) {
        check_translation(g, i)?;
    }
}

// --- growth -------------------------------------------------------------------

proptest! {
    #![proptest_config(cfg(24))]

    #[test]
    fn degree_tables_respect_the_bounds(seed in 0u64..10_000, k in 1usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gens: Vec<JonqElem> = (0..k).map(|_| random_degree2(&mut rng)).collect();
        let t = degree_table(&gens, 5, 1_000_000).unwrap();
        let maxdeg = gens.iter().map(|g| g.degree().unwrap().0).max().unwrap();
        for &(n, d) in &t.rows {
            prop_assert!(d <= maxdeg.pow(n as u32));
            if gens.iter().all(|g| g.degree().unwrap().0 >= 2) {
                prop_assert!(d <= n * (maxdeg - 1) + 1);
            }
        }
        prop_assert_eq!(t.base_point_bound, Some(true));
    }

    #[test]
    fn adding_a_word_keeps_the_growth_class(seed in 0u64..10_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_degree2(&mut rng);
        let t = classify_growth(&degree_table(&[g.clone()], 8, 1_000_000).unwrap()).unwrap();
        let more = classify_growth(&degree_table(&[g.clone(), g.pow(2)], 8, 1_000_000).unwrap()).unwrap();
        if t.class != GrowthClass::Inconclusive && more.class != GrowthClass::Inconclusive {
            prop_assert_eq!(std::mem::discriminant(&t.class), std::mem::discriminant(&more.class));
        }
    }
}

// --- fixpoint -----------------------------------------------------------------

/// Groups of vertical unipotent elements (x, y + c/(x − a)) with a twist by
/// (x, λy): purely elliptic and hence bounded.
fn bounded_group() -> impl Strategy<Value = GroupSpec> {
    (prop::collection::vec((1i64..=3, -2i64..=2), 1..=2), prop::bool::ANY).prop_map(|(ts, twist)| {
        let mut gens: Vec<String> = ts.iter().map(|(c, a)| format!("(x, y + {c}/(x - {a}))")).collect();
        if twist {
            gens.push("(x, -y)".into());
        }
        let refs: Vec<&str> = gens.iter().map(String::as_str).collect();
        GroupSpec::parse(Q, &refs).unwrap()
    })
}

fn conjugator() -> impl Strategy<Value = JonqElem> {
    prop_oneof![
        (-2i64..=2).prop_map(|k| parse_jonq(&format!("(x + {k}, y)"), Q).unwrap()),
        (1i64..=2).prop_map(|k| parse_jonq(&format!("(x, x^{k}*y)"), Q).unwrap()),
        (-2i64..=2).prop_map(|k| parse_jonq(&format!("(x, y + x + {k})"), Q).unwrap()),
        Just(parse_jonq("(1/x, y)", Q).unwrap()),
    ]
}

proptest! {
    #![proptest_config(cfg(24))]

    #[test]
    fn fixed_vertices_verify_and_bound_growth(g in bounded_group()) {
        let report = decent_fixpoint(&g).unwrap();
        let v = report.fixed_vertex().expect("bounded groups are purely elliptic").clone();
        prop_assert!(verify_fixed(&g, &v).unwrap().0);
        let t = degree_table(&g.gens, 8, 1_000_000).unwrap();
        prop_assert_eq!(classify_growth(&t).unwrap().class, GrowthClass::Bounded);
    }

    #[test]
    fn answers_are_equivariant(g in bounded_group(), phi in conjugator(), hyperbolic in prop::bool::ANY) {
        let mut gens = g.gens.clone();
        if hyperbolic {
            gens.push(parse_jonq("(x, x*y)", Q).unwrap());
        }
        let g = GroupSpec::from_elems(gens).unwrap();
        let conj = GroupSpec::from_elems(g.gens.iter().map(|e| e.conjugate_by(&phi).unwrap()).collect()).unwrap();
        let (r0, r1) = (decent_fixpoint(&g).unwrap(), decent_fixpoint(&conj).unwrap());
        prop_assert!(!r0.is_inconclusive() && !r1.is_inconclusive());
        prop_assert!(verify_report(&g, &r0, 32).unwrap());
        prop_assert!(verify_report(&conj, &r1, 32).unwrap());
        prop_assert_eq!(r0.fixed_vertex().is_some(), r1.fixed_vertex().is_some());
        if let (Some(v0), Some(v1)) = (r0.fixed_vertex(), r1.fixed_vertex()) {
            prop_assert!(verify_fixed(&conj, &act_on_vertex(&phi, v0).unwrap()).unwrap().0);
            prop_assert!(verify_fixed(&g, &act_on_vertex(&phi.inverse(), v1).unwrap()).unwrap().0);
        }
    }
}

// --- halphen ------------------------------------------------------------------

proptest! {
    #![proptest_config(cfg(100))]

    #[test]
    fn closed_form_matches_push_forward(seed in 0u64..1_000_000, r in 3usize..=5, k in 1usize..=2,
                                        n in prop::collection::vec(-50i64..=50, 2)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rs = random_system(&mut rng, r, k);
        let sys = check_parabolic_system(&rs.sys).map_err(|v| TestCaseError::fail(format!("{v:?}")))?;
        for f in &sys.autos {
            let g = big(&sys.gram);
            let m = big(f);
            prop_assert_eq!(mul_b(&mul_b(&tr_b(&m), &g), &m), g);
        }
        let n = &n[..k];
        let closed = closed_form_degree(&sys, n).unwrap();
        prop_assert_eq!(&closed, &push_forward_degree(&sys, n).unwrap());
        prop_assert_eq!(closed, BigInt::from(oracle_degree(&rs, n)));
        let c = halphen_coefficients(&sys).unwrap();
        // R_j = (A·D₀)·w_j + (…)·D₀, so t_ij = −(A·D₀)·(w_i·w_j)
        let ad0 = dot(&sys.gram, &sys.a, &sys.d0);
        for i in 0..k {
            for j in 0..k {
                prop_assert_eq!(&c.t[i][j], &c.t[j][i]);
                let wij: i64 = rs.ws[i].iter().zip(&rs.ws[j]).map(|(a, b)| a * b).sum();
                prop_assert_eq!(&c.t[i][j], &BigRational::from_integer(BigInt::from(ad0 * wij)));
            }
        }
    }

    #[test]
    fn degrees_grow_quadratically(seed in 0u64..1_000_000, r in 3usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rs = random_system(&mut rng, r, 1);
        let sys = check_parabolic_system(&rs.sys).unwrap();
        let d: Vec<BigInt> = (0..8).map(|n| closed_form_degree(&sys, &[n]).unwrap()).collect();
        let second: Vec<BigInt> = d.windows(3).map(|w| &w[2] - &w[1] * 2 + &w[0]).collect();
        prop_assert!(second.iter().all(|s| s == &second[0]));
        prop_assert!(second[0] > BigInt::from(0));
    }
}

fn big(m: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
    m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

fn mul_b(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    a.iter().map(|r| (0..b[0].len()).map(|j| r.iter().zip(b).map(|(x, row)| x * &row[j]).sum()).collect()).collect()
}

fn tr_b(a: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    (0..a[0].len()).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}
