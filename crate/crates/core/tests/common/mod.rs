#![allow(dead_code)]

use cremona::fields::Field;
use cremona::halphen::HalphenSystem;
use cremona::jonquieres::{parse_jonq, JonqElem};
use proptest::prelude::*;
use rand::Rng;

pub mod suites;

pub const Q: Field = Field::Rational;

pub fn linear(c0: i64, c1: i64) -> String {
    format!("({c0} + {c1}*x)")
}

/// `((a*x+b)/(c*x+d), (p*y+q)/(r*y+s))` with p, q, r, s linear in x.
pub fn jonq_text(h: [i64; 4], m: [[i64; 2]; 4]) -> String {
    let [a, b, c, d] = h;
    let [p, q, r, s] = m.map(|e| linear(e[0], e[1]));
    format!("(({a}*x + {b})/({c}*x + {d}), ({p}*y + {q})/({r}*y + {s}))")
}

fn small() -> impl Strategy<Value = i64> {
    prop_oneof![3 => Just(0i64), 4 => -2i64..=2]
}

fn moebius() -> impl Strategy<Value = [i64; 4]> {
    prop_oneof![
        Just([1, 0, 0, 1]),
        (-2i64..=2).prop_map(|k| [1, k, 0, 1]),
        prop_oneof![Just(-1i64), Just(2), Just(3)].prop_map(|k| [k, 0, 0, 1]),
        Just([0, 1, 1, 0]),
        ([small(), small(), small(), small()]).prop_filter("invertible", |e| e[0] * e[3] != e[1] * e[2]),
    ]
}

/// Random Jonquières elements with small coefficients.
pub fn jonq() -> impl Strategy<Value = JonqElem> {
    (moebius(), [[small(), small()], [small(), small()], [small(), small()], [small(), small()]])
        .prop_filter_map("degenerate", |(h, m)| parse_jonq(&jonq_text(h, m), Q).ok())
}

/// Vertical elements (x, (p y + q)/(r y + s)).
pub fn vertical() -> impl Strategy<Value = JonqElem> {
    [[small(), small()], [small(), small()], [small(), small()], [small(), small()]]
        .prop_filter_map("degenerate", |m| parse_jonq(&jonq_text([1, 0, 0, 1], m), Q).ok())
}

/// Random element of degree at most 2 drawn from a seeded generator.
pub fn random_degree2(rng: &mut impl Rng) -> JonqElem {
    loop {
        let h = match rng.gen_range(0..3) {
            0 => [1, rng.gen_range(-2..=2), 0, 1],
            1 => [rng.gen_range(2..=3), 0, 0, 1],
            _ => [0, 1, 1, 0],
        };
        let mut e = || -> [i64; 2] {
            if rng.gen_bool(0.5) {
                [0, 0]
            } else {
                [rng.gen_range(-2..=2), rng.gen_range(-1..=1)]
            }
        };
        let m = [e(), e(), e(), e()];
        if let Ok(f) = parse_jonq(&jonq_text(h, m), Q) {
            if !f.is_identity() && f.degree().map(|d| d.0 <= 2).unwrap_or(false) {
                return f;
            }
        }
    }
}

pub type M = Vec<Vec<i64>>;

pub fn mul(a: &M, b: &M) -> M {
    let n = b[0].len();
    a.iter().map(|r| (0..n).map(|j| r.iter().zip(b).map(|(x, row)| x * row[j]).sum()).collect()).collect()
}

pub fn apply(a: &M, v: &[i64]) -> Vec<i64> {
    a.iter().map(|r| r.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

pub fn transpose(a: &M) -> M {
    (0..a[0].len()).map(|j| a.iter().map(|r| r[j]).collect()).collect()
}

pub fn dot(g: &M, u: &[i64], v: &[i64]) -> i64 {
    u.iter().zip(apply(g, v)).map(|(x, y)| x * y).sum()
}

pub fn eye(r: usize) -> M {
    (0..r).map(|i| (0..r).map(|j| i64::from(i == j)).collect()).collect()
}

/// A system on U ⊕ ⟨−1⟩^(r−2) (basis e, f, c₁, ...) with D₀ = e and one
/// Eichler transvection per vector w, rewritten in a random unimodular
/// basis. With R_j = (A·D₀)·w_j + (…)·D₀ one gets
/// t_ij = (A·D₀)·Σ_k w_ik·w_jk.
#[derive(Clone, Debug)]
pub struct RandomSystem {
    pub sys: HalphenSystem,
    pub ws: Vec<Vec<i64>>,
    pub change: M,
    pub change_inv: M,
}

pub fn transvection(r: usize, w: &[i64]) -> M {
    // E(v) = v + (v·e)w − (v·w)e − ½(w·w)(v·e)e on the standard basis
    let ww: i64 = -w.iter().map(|x| x * x).sum::<i64>();
    assert!(ww % 2 == 0);
    let mut m = eye(r);
    // image of f (v·e = 1, v·w = 0)
    m[0][1] += -ww / 2;
    for (j, &wj) in w.iter().enumerate() {
        m[2 + j][1] += wj;
        // image of c_j: v·e = 0, v·w = −w_j
        m[0][2 + j] += wj;
    }
    m
}

pub fn random_system(rng: &mut impl Rng, r: usize, k: usize) -> RandomSystem {
    assert!(r >= 3);
    let neg = r - 2;
    let mut ws = Vec::new();
    while ws.len() < k {
        let w: Vec<i64> = (0..neg).map(|_| rng.gen_range(-2..=2)).collect();
        if w.iter().all(|&x| x == 0) || w.iter().map(|x| x * x).sum::<i64>() % 2 != 0 {
            continue;
        }
        ws.push(w);
    }
    let mut gram = eye(r);
    gram[0][0] = 0;
    gram[1][1] = 0;
    gram[0][1] = 1;
    gram[1][0] = 1;
    for i in 2..r {
        gram[i][i] = -1;
    }
    let b = rng.gen_range(1..=3);
    let cs: Vec<i64> = (0..neg).map(|_| rng.gen_range(-1..=1)).collect();
    let need = cs.iter().map(|x| x * x).sum::<i64>();
    let a_coef = need / (2 * b) + rng.gen_range(1..=3);
    let mut a = vec![a_coef, b];
    a.extend(&cs);
    let mut d0 = vec![0; r];
    d0[0] = 1;
    let autos: Vec<M> = ws.iter().map(|w| transvection(r, w)).collect();

    // random unimodular P with known inverse
    let (mut p, mut pinv) = (eye(r), eye(r));
    for _ in 0..2 * r {
        let (i, j) = (rng.gen_range(0..r), rng.gen_range(0..r));
        if i == j {
            continue;
        }
        let c = rng.gen_range(-1..=1);
        let mut e = eye(r);
        e[i][j] = c;
        let mut einv = eye(r);
        einv[i][j] = -c;
        p = mul(&p, &e);
        pinv = mul(&einv, &pinv);
    }
    let sys = HalphenSystem {
        gram: mul(&mul(&transpose(&p), &gram), &p),
        d0: apply(&pinv, &d0),
        a: apply(&pinv, &a),
        autos: autos.iter().map(|f| mul(&mul(&pinv, f), &p)).collect(),
    };
    RandomSystem { sys, ws, change: p, change_inv: pinv }
}

/// Independent push-forward: (f₁^n₁ ⋯ f_k^n_k)A · A with i64 arithmetic,
/// inverses taken from the standard-basis transvection with −w.
pub fn oracle_degree(rs: &RandomSystem, n: &[i64]) -> i64 {
    let r = rs.sys.gram.len();
    let mut v = rs.sys.a.clone();
    for (w, &e) in rs.ws.iter().zip(n) {
        let sign = if e < 0 { -1 } else { 1 };
        let step_std = transvection(r, &w.iter().map(|x| sign * x).collect::<Vec<_>>());
        let step = mul(&mul(&rs.change_inv, &step_std), &rs.change);
        for _ in 0..e.abs() {
            v = apply(&step, &v);
        }
    }
    dot(&rs.sys.gram, &v, &rs.sys.a)
}
