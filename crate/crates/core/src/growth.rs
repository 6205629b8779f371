//! Word balls B_T(n), degree tables D_T(n) and a finite-data growth verdict.

use std::collections::HashSet;
use std::hash::Hash;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use crate::cremona::CremonaMap;
use crate::error::{Error, Result};
use crate::jonquieres::JonqElem;

/// Default cap on the number of ball elements kept in memory.
pub const DEFAULT_BALL_BUDGET: usize = 2_000_000;

/// What the ball enumeration needs from a group element.
pub trait Element: Clone + Eq + Hash + Send + Sync {
    fn compose(&self, other: &Self) -> Result<Self>;
    fn inverse(&self) -> Result<Self>;
    fn degree(&self) -> Result<usize>;
    fn identity_like(&self) -> Self;
    /// Base points of a Jonquières element; None for general maps.
    fn base_points(&self) -> Option<usize> {
        None
    }
}

impl Element for JonqElem {
    fn compose(&self, other: &Self) -> Result<Self> {
        JonqElem::compose(self, other)
    }
    fn inverse(&self) -> Result<Self> {
        Ok(JonqElem::inverse(self))
    }
    fn degree(&self) -> Result<usize> {
        Ok(JonqElem::degree(self)?.0)
    }
    fn identity_like(&self) -> Self {
        JonqElem::identity(self.field())
    }
    fn base_points(&self) -> Option<usize> {
        JonqElem::degree(self).ok().map(|d| d.1)
    }
}

impl Element for CremonaMap {
    fn compose(&self, other: &Self) -> Result<Self> {
        CremonaMap::compose(self, other)
    }
    fn inverse(&self) -> Result<Self> {
        CremonaMap::inverse(self)
            .cloned()
            .ok_or_else(|| Error::invalid("generator has no known inverse; supply one"))
    }
    fn degree(&self) -> Result<usize> {
        Ok(CremonaMap::degree(self))
    }
    fn identity_like(&self) -> Self {
        CremonaMap::identity(self.field())
    }
}

/// Spheres of the word ball: `spheres[n]` holds the elements of word length n.
#[derive(Clone, Debug)]
pub struct Ball<E> {
    pub spheres: Vec<Vec<E>>,
    pub degrees: Vec<Vec<usize>>,
}

impl<E> Ball<E> {
    /// |B_T(n)| for n = 0..=radius.
    pub fn sizes(&self) -> Vec<usize> {
        self.spheres
            .iter()
            .scan(0, |acc, s| {
                *acc += s.len();
                Some(*acc)
            })
            .collect()
    }
}

/// B_T(n), breadth first, deduplicated by canonical form. Each sphere is
/// kept in the order of (frontier element, generator), so runs are
/// reproducible even though products are formed in parallel.
pub fn ball<E: Element>(gens: &[E], radius: usize, budget: usize) -> Result<Ball<E>> {
    let first = gens.first().ok_or_else(|| Error::invalid("a group needs at least one generator"))?;
    let mut letters: Vec<E> = Vec::with_capacity(2 * gens.len());
    for g in gens {
        letters.push(g.clone());
        letters.push(g.inverse()?);
    }
    let id = first.identity_like();
    let mut seen: HashSet<E> = HashSet::from([id.clone()]);
    let mut spheres = vec![vec![id]];
    let mut degrees = vec![vec![1]];
    for _ in 0..radius {
        let frontier = spheres.last().unwrap();
        let products: Vec<Result<E>> =
            frontier.par_iter().flat_map_iter(|w| letters.iter().map(move |s| s.compose(w))).collect();
        let mut sphere = Vec::new();
        for p in products {
            let p = p?;
            if seen.insert(p.clone()) {
                if seen.len() > budget {
                    return Err(Error::BallTooLarge(budget));
                }
                sphere.push(p);
            }
        }
        let degs = sphere.par_iter().map(Element::degree).collect::<Result<Vec<usize>>>()?;
        spheres.push(sphere);
        degrees.push(degs);
    }
    Ok(Ball { spheres, degrees })
}

/// (n, D_T(n)) rows with a fingerprint of the generating set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeTable {
    pub rows: Vec<(usize, usize)>,
    pub generators: Vec<String>,
    pub fingerprint: String,
    /// Ball sizes |B_T(n)|.
    pub sizes: Vec<usize>,
    /// For Jonquières generators: whether D_T(n) ≤ max(1, K·n) with K the
    /// largest base-point count of a generator.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base_point_bound: Option<bool>,
}

impl DegreeTable {
    pub fn values(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.1).collect()
    }

    /// `n<TAB>D` lines.
    pub fn to_tsv(&self) -> String {
        self.rows.iter().map(|(n, d)| format!("{n}\t{d}\n")).collect()
    }
}

/// 64-bit FNV-1a, used only as a stable label for generating sets.
fn fnv1a(text: &str) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in text.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{h:016x}")
}

pub fn degree_table<E: Element + std::fmt::Display>(gens: &[E], n_max: usize, budget: usize) -> Result<DegreeTable> {
    let b = ball(gens, n_max, budget)?;
    let mut rows = Vec::with_capacity(n_max + 1);
    let mut d = 0;
    for (n, degs) in b.degrees.iter().enumerate() {
        d = degs.iter().copied().fold(d, usize::max);
        rows.push((n, d));
    }
    let generators: Vec<String> = gens.iter().map(|g| g.to_string()).collect();
    let fingerprint = fnv1a(&generators.join(";"));
    let base_point_bound = gens
        .iter()
        .map(|g| g.base_points())
        .collect::<Option<Vec<usize>>>()
        .map(|bs| {
            let k = bs.into_iter().max().unwrap_or(0);
            rows.iter().skip(1).all(|&(n, d)| d <= (k * n).max(1))
        });
    Ok(DegreeTable { rows, generators, fingerprint, sizes: b.sizes(), base_point_bound })
}

/// Ratio bound 1 + δ for the exponential verdict.
const DELTA: (i64, i64) = (1, 8);
/// Number of trailing ratios or second differences examined.
const WINDOW: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "class")]
pub enum GrowthClass {
    Bounded,
    Linear,
    Quadratic,
    /// Smallest and largest ratio D(n+1)/D(n) in the window.
    Exponential {
        #[serde(serialize_with = "as_string")]
        lower: BigRational,
        #[serde(serialize_with = "as_string")]
        upper: BigRational,
    },
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GrowthVerdict {
    #[serde(flatten)]
    pub class: GrowthClass,
    /// Range of n the verdict rests on.
    pub window: (usize, usize),
}

fn as_string<S: serde::Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

fn ratio(a: usize, b: usize) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

/// Verdict from exact finite criteria on the tail of the table: a constant
/// final third is bounded; vanishing or constant positive second differences
/// are linear or quadratic; ratios at least 1 + 1/8 are exponential.
pub fn classify_growth(table: &DegreeTable) -> Result<GrowthVerdict> {
    let d = table.values();
    let len = d.len();
    if len < 6 {
        return Err(Error::PreconditionFailed("classification needs at least six table entries".into()));
    }
    let last = len - 1;
    let third = len.div_ceil(3);
    if d[len - third..].iter().all(|&v| v == d[last]) {
        return Ok(GrowthVerdict { class: GrowthClass::Bounded, window: (len - third, last) });
    }
    let lo = len - WINDOW - 2;
    let second: Vec<i64> =
        d[lo..].windows(3).map(|w| w[2] as i64 - 2 * w[1] as i64 + w[0] as i64).collect();
    let rising = d[lo..].windows(2).all(|w| w[1] > w[0]);
    if rising && second.iter().all(|&s| s == 0) {
        return Ok(GrowthVerdict { class: GrowthClass::Linear, window: (lo, last) });
    }
    if second.iter().all(|&s| s == second[0]) && second[0] > 0 {
        return Ok(GrowthVerdict { class: GrowthClass::Quadratic, window: (lo, last) });
    }
    let lo = len - WINDOW - 1;
    let ratios: Vec<BigRational> = d[lo..].windows(2).map(|w| ratio(w[1], w[0])).collect();
    let threshold = BigRational::new(BigInt::from(DELTA.1 + DELTA.0), BigInt::from(DELTA.1));
    if ratios.iter().all(|r| *r >= threshold) {
        let lower = ratios.iter().min().unwrap().clone();
        let upper = ratios.iter().max().unwrap().clone();
        return Ok(GrowthVerdict { class: GrowthClass::Exponential { lower, upper }, window: (lo, last) });
    }
    Ok(GrowthVerdict { class: GrowthClass::Inconclusive, window: (lo, last) })
}

/// JSON summary: verdict, window and the table itself.
pub fn growth_summary(table: &DegreeTable, verdict: &GrowthVerdict) -> serde_json::Value {
    serde_json::json!({
        "fingerprint": table.fingerprint,
        "generators": table.generators,
        "degrees": table.values(),
        "ball_sizes": table.sizes,
        "verdict": verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cremona::parse_map;
    use crate::fields::Field;
    use crate::jonquieres::parse_jonq;

    const Q: Field = Field::Rational;

    fn j(s: &str) -> JonqElem {
        parse_jonq(s, Q).unwrap()
    }

    fn table(values: &[usize]) -> DegreeTable {
        DegreeTable {
            rows: values.iter().copied().enumerate().collect(),
            generators: vec![],
            fingerprint: String::new(),
            sizes: vec![],
            base_point_bound: None,
        }
    }

    #[test]
    fn ball_sizes() {
        let s = ball(&[j("(-x, y)")], 4, DEFAULT_BALL_BUDGET).unwrap();
        assert_eq!(s.sizes(), vec![1, 2, 2, 2, 2]);
        let t = ball(&[j("(x, x*y)")], 4, DEFAULT_BALL_BUDGET).unwrap();
        assert_eq!(t.sizes(), vec![1, 3, 5, 7, 9]);
        let c = ball(&[j("(x + 1, y)"), j("(x, 2*y)")], 3, DEFAULT_BALL_BUDGET).unwrap();
        assert_eq!(c.sizes(), (0..=3).map(|n| 2 * n * n + 2 * n + 1).collect::<Vec<_>>());
        assert_eq!(ball(&[j("(x, x*y)")], 10, 5).unwrap_err(), Error::BallTooLarge(5));
    }

    #[test]
    fn degree_tables() {
        let t = degree_table(&[j("(x, x*y)")], 6, DEFAULT_BALL_BUDGET).unwrap();
        assert_eq!(t.values(), vec![1, 2, 3, 4, 5, 6, 7]);
        assert_eq!(t.base_point_bound, Some(true));
        assert_eq!(classify_growth(&t).unwrap().class, GrowthClass::Linear);
        assert!(t.to_tsv().starts_with("0\t1\n1\t2\n"));

        let b = degree_table(&[j("(x, y + 1/x)"), j("(x, y + 1/(x - 1))")], 6, DEFAULT_BALL_BUDGET).unwrap();
        assert_eq!(b.values(), vec![1, 2, 3, 3, 3, 3, 3]);
        assert_eq!(classify_growth(&b).unwrap().class, GrowthClass::Bounded);

        let f = parse_map("(y, y^2 - x)", Q).unwrap().with_inverse(parse_map("(x^2 - y, x)", Q).unwrap()).unwrap();
        let e = degree_table(&[f], 6, DEFAULT_BALL_BUDGET).unwrap();
        assert_eq!(e.values(), vec![1, 2, 4, 8, 16, 32, 64]);
        let v = classify_growth(&e).unwrap();
        let two = ratio(2, 1);
        assert_eq!(v.class, GrowthClass::Exponential { lower: two.clone(), upper: two });
    }

    #[test]
    fn classifier_examples() {
        assert_eq!(classify_growth(&table(&[1, 2, 3, 3, 3, 3])).unwrap().class, GrowthClass::Bounded);
        let quad: Vec<usize> = (0..8).map(|n| 2 + 2 * n * n).collect();
        assert_eq!(classify_growth(&table(&quad)).unwrap().class, GrowthClass::Quadratic);
        assert_eq!(classify_growth(&table(&[1, 2, 3, 4, 4, 5, 9])).unwrap().class, GrowthClass::Inconclusive);
        assert!(classify_growth(&table(&[1, 2, 3])).is_err());
        let id = degree_table(&[j("(x, y)")], 5, DEFAULT_BALL_BUDGET).unwrap();
        assert_eq!(id.values(), vec![1; 6]);
        assert_eq!(classify_growth(&id).unwrap().class, GrowthClass::Bounded);
    }
}
