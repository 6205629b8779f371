use std::collections::BTreeSet;

use cremona::fibretrees::{act_at, act_on_vertex, apply_matrix, translation_length_at_place, tree_distance, JVertex, TreeVertex};
use cremona::fields::{valuation, Place, Polynomial, RationalFunction, Val};
use cremona::jonquieres::{is_biregular_over, singular_places, JonqElem};
use proptest::prelude::*;

use super::*;

/// Irreducible factors whose places the test knows in advance.
pub fn known_factor(i: usize) -> (Polynomial, Place) {
    let p = match i {
        0 => Polynomial::from_ints(Q, &[0, 1]),
        1 => Polynomial::from_ints(Q, &[-1, 1]),
        2 => Polynomial::from_ints(Q, &[2, 1]),
        3 => Polynomial::from_ints(Q, &[1, 0, 1]),
        _ => Polynomial::from_ints(Q, &[-2, 0, 1]),
    };
    (p.clone(), Place::Finite(p))
}

/// c · Π pᵢ^eᵢ with the exponent vector known.
pub fn assemble(c: i64, exps: &[i64]) -> RationalFunction {
    let mut r = RationalFunction::constant(Q.int(c));
    for (i, &e) in exps.iter().enumerate() {
        let p = RationalFunction::from_poly(known_factor(i).0);
        r = &r * &p.pow(e);
    }
    r
}

/// Places to quantify over: singular sets of both elements and their images.
pub fn test_places(f: &JonqElem, g: &JonqElem) -> BTreeSet<Place> {
    let z = JVertex::base();
    let mut s: BTreeSet<Place> = BTreeSet::new();
    for e in [f, g] {
        s.extend(singular_places(e, &z).unwrap());
        s.extend(singular_places(&e.inverse(), &z).unwrap());
    }
    s.extend([Place::Infinity, Place::point(Q.int(0)), Place::point(Q.int(1))]);
    let more: Vec<Place> = s.iter().flat_map(|p| [f.h().apply(p), f.h().inverse().apply(p)]).collect();
    s.extend(more);
    s
}

/// A vertex with a few non-base coordinates, built as g(base).
pub fn vertex() -> impl Strategy<Value = JVertex> {
    vertical().prop_map(|g| act_on_vertex(&g, &JVertex::base()).unwrap())
}

pub fn check_valuations(c: i64, d: i64, e: Vec<i64>, f: Vec<i64>) -> Result<(), TestCaseError> {
    let r = assemble(c, &e);
    let s = assemble(d, &f);
    let mut total = 0i64;
    for i in 0..5 {
        let (p, place) = known_factor(i);
        prop_assert_eq!(valuation(&r, &place), Val::Finite(e[i]));
        prop_assert_eq!(valuation(&(&r * &s), &place), Val::Finite(e[i] + f[i]));
        total += e[i] * p.deg0() as i64;
    }
    // the only other place is ∞, where v = deg den − deg num
    prop_assert_eq!(valuation(&r, &Place::Infinity), Val::Finite(-total));
    let at = [Place::point(Q.int(3)), Place::point(Q.int(-4))];
    for p in &at {
        prop_assert_eq!(valuation(&r, p), Val::Finite(0));
    }
    let sum = &r + &s;
    if !sum.is_zero() {
        for i in 0..5 {
            let place = known_factor(i).1;
            let m = e[i].min(f[i]);
            let v = valuation(&sum, &place).finite().unwrap();
            prop_assert!(v >= m);
            if e[i] != f[i] {
                prop_assert_eq!(v, m);
            }
        }
    }
    Ok(())
}

pub fn check_biregularity(f: JonqElem, g: JonqElem) -> Result<(), TestCaseError> {
    let z = JVertex::base();
    for p in test_places(&f, &g) {
        let hp = f.h().apply(&p);
        prop_assert_eq!(is_biregular_over(&f, &p, &z), is_biregular_over(&f.inverse(), &hp, &z));
        if is_biregular_over(&f, &p, &z) && is_biregular_over(&g, &hp, &z) {
            prop_assert!(is_biregular_over(&g.compose(&f).unwrap(), &p, &z));
        }
        // biregular over P ⟺ f(base) has base coordinate at h(P)
        let image = act_on_vertex(&f, &z).unwrap();
        prop_assert_eq!(is_biregular_over(&f, &p, &z), image.coordinate(&hp).is_base());
    }
    Ok(())
}

pub fn check_subadditive(f: JonqElem, g: JonqElem) -> Result<(), TestCaseError> {
    let (df, dg) = (f.degree().unwrap().0, g.degree().unwrap().0);
    prop_assume!(df >= 2 && dg >= 2);
    prop_assert!(f.compose(&g).unwrap().degree().unwrap().0 <= df + dg - 1);
    Ok(())
}

pub fn check_cocycle(f: JonqElem, g: JonqElem, v: JVertex, w: JVertex) -> Result<(), TestCaseError> {
    let fg = f.compose(&g).unwrap();
    let lhs = act_on_vertex(&fg, &v).unwrap();
    let rhs = act_on_vertex(&f, &act_on_vertex(&g, &v).unwrap()).unwrap();
    prop_assert_eq!(&lhs, &rhs);
    let places: BTreeSet<Place> = v.support().chain(w.support()).cloned()
        .chain([Place::Infinity, Place::point(Q.int(0))]).collect();
    for p in &places {
        let d0 = tree_distance(&v.coordinate(p), &w.coordinate(p)).unwrap();
        let d1 = tree_distance(&act_at(&f, &v, p), &act_at(&f, &w, p)).unwrap();
        prop_assert_eq!(d0, d1);
        let fv = act_at(&f, &v, p);
        prop_assert_eq!(&fv.place, &f.h().apply(p));
    }
    // finite support is preserved and parity is respected
    prop_assert!(lhs.support().count() < 64);
    for c in lhs.coordinates() {
        let d = tree_distance(c, &TreeVertex::base(c.place.clone())).unwrap();
        prop_assert_eq!(d % 2 == 0, c.is_even());
    }
    Ok(())
}

pub fn check_translation(g: JonqElem, i: usize) -> Result<(), TestCaseError> {
    let a = g.matrix().clone();
    let place = match i {
        0 => Place::Infinity,
        1 => Place::point(Q.int(0)),
        2 => Place::point(Q.int(1)),
        _ => Place::point(Q.int(-2)),
    };
    let len = translation_length_at_place(&a, &place).unwrap();
    let v = TreeVertex::base(place.clone());
    let ds: Vec<u64> = (1..=8u32).map(|n| tree_distance(&v, &apply_matrix(&a.pow(n), &v)).unwrap()).collect();
    if len > 0 {
        // hyperbolic: d(v, Aⁿv) = n·ℓ + 2·d(v, axis)
        let offset = ds[0] - len;
        for (n, d) in ds.iter().enumerate() {
            prop_assert_eq!(*d, (n as u64 + 1) * len + offset);
        }
    } else {
        // elliptic: Fix(A) ⊂ Fix(Aⁿ), so d(v, Aⁿv) ≤ d(v, Av)
        prop_assert!(ds.iter().all(|d| *d <= ds[0]));
    }
    Ok(())
}
