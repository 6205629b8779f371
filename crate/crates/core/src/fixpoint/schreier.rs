//! Coset transversals and Schreier generators for finite quotients.

use std::collections::HashMap;
use std::hash::Hash;

use super::words::Word;
use super::GroupSpec;
use crate::error::{Error, Result};
use crate::fields::Place;
use crate::moebius::Moebius;

pub(crate) struct Transversal<S> {
    /// States in breadth-first order with a word reaching each from the start.
    pub reps: Vec<(S, Word)>,
    /// Words generating the subgroup fixing the start state.
    pub gens: Vec<Word>,
}

/// Breadth-first transversal of the orbit of `start`, where `act(s, i)` is
/// the image of s under generator i.
pub(crate) fn transversal<S: Clone + Eq + Hash>(
    k: usize,
    start: S,
    act: impl Fn(&S, usize) -> S,
    bound: usize,
) -> Result<Transversal<S>> {
    let mut index: HashMap<S, usize> = HashMap::new();
    let mut reps = vec![(start.clone(), Word::identity())];
    index.insert(start, 0);
    let mut head = 0;
    while head < reps.len() {
        let (s, w) = reps[head].clone();
        for i in 0..k {
            let t = act(&s, i);
            if !index.contains_key(&t) {
                if reps.len() == bound {
                    return Err(Error::ClosureBoundExceeded(bound));
                }
                index.insert(t.clone(), reps.len());
                reps.push((t, Word::gen(i).concat(&w)));
            }
        }
        head += 1;
    }
    let mut gens: Vec<Word> = Vec::new();
    for (s, w) in &reps {
        for i in 0..k {
            let back = &reps[index[&act(s, i)]].1;
            let g = back.inverse().concat(&Word::gen(i)).concat(w);
            if !g.is_empty() && !gens.contains(&g) {
                gens.push(g);
            }
        }
    }
    Ok(Transversal { reps, gens })
}

/// The finite quotients used by the fixed-point routes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Quotient {
    /// G → ℏ(G); the subgroup is the kernel of ℏ.
    Horizontal,
    /// G acting on the ℏ(G)-orbit of a place; the subgroup is the stabilizer.
    PlaceStabilizer(Place),
}

/// Schreier generators of the finite-index subgroup cut out by `quotient`.
pub fn finite_index_generators(g: &GroupSpec, quotient: &Quotient, bound: usize) -> Result<Vec<Word>> {
    let hs = g.hs();
    let t = match quotient {
        Quotient::Horizontal => {
            transversal(hs.len(), Moebius::identity(g.field), |m: &Moebius, i| hs[i].compose(m), bound)?.gens
        }
        Quotient::PlaceStabilizer(p) => transversal(hs.len(), p.clone(), |q: &Place, i| hs[i].apply(q), bound)?.gens,
    };
    Ok(t)
}
