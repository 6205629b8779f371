//! Words in a generating set.

use serde::Serialize;

use crate::fields::Field;
use crate::jonquieres::JonqElem;
use crate::moebius::Moebius;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Letter {
    pub gen: usize,
    pub inverse: bool,
}

impl Letter {
    fn inv(self) -> Letter {
        Letter { gen: self.gen, inverse: !self.inverse }
    }
}

/// A freely reduced word, read as the composition of its letters from left
/// to right (the rightmost letter acts first).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn gen(i: usize) -> Self {
        Word(vec![Letter { gen: i, inverse: false }])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inv()).collect())
    }

    /// self · other, freely reduced.
    pub fn concat(&self, other: &Word) -> Word {
        let mut out = self.0.clone();
        for &l in &other.0 {
            if out.last() == Some(&l.inv()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn eval(&self, gens: &[JonqElem], field: Field) -> JonqElem {
        let mut acc = JonqElem::identity(field);
        for l in &self.0 {
            let g = if l.inverse { gens[l.gen].inverse() } else { gens[l.gen].clone() };
            acc = acc.compose(&g).expect("generators share a field");
        }
        acc
    }

    pub fn eval_h(&self, hs: &[Moebius], field: Field) -> Moebius {
        let mut acc = Moebius::identity(field);
        for l in &self.0 {
            let h = if l.inverse { hs[l.gen].inverse() } else { hs[l.gen].clone() };
            acc = acc.compose(&h);
        }
        acc
    }

    /// `a*b^-1*a`, or `1` for the empty word.
    pub fn format(&self, names: &[String]) -> String {
        if self.0.is_empty() {
            return "1".into();
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|l| if l.inverse { format!("{}^-1", names[l.gen]) } else { names[l.gen].clone() })
            .collect();
        parts.join("*")
    }
}

/// Nonempty reduced words of length at most `max_len` in shortlex order,
/// letters ordered g0, g0⁻¹, g1, g1⁻¹, ...; at most `cap` words.
pub fn reduced_words(k: usize, max_len: usize, cap: usize) -> Vec<Word> {
    let letters: Vec<Letter> =
        (0..k).flat_map(|g| [Letter { gen: g, inverse: false }, Letter { gen: g, inverse: true }]).collect();
    let mut out = Vec::new();
    let mut layer = vec![Word::identity()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for &l in &letters {
                if w.0.last() == Some(&l.inv()) {
                    continue;
                }
                let mut v = w.0.clone();
                v.push(l);
                next.push(Word(v));
                if out.len() + next.len() >= cap {
                    out.extend(next);
                    return out;
                }
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_order() {
        let ws = reduced_words(2, 3, usize::MAX);
        assert_eq!(ws.len(), 4 + 12 + 36);
        assert_eq!(ws[0], Word::gen(0));
        let names = vec!["a".to_string(), "b".to_string()];
        assert_eq!(ws[4].format(&names), "a*a");
        assert_eq!(ws[5].format(&names), "a*b");
        let w = Word::gen(0).concat(&Word::gen(1));
        assert!(w.concat(&w.inverse()).is_empty());
    }
}
