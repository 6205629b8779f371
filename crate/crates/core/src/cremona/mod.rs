//! Birational maps of the projective plane as homogeneous triples.

pub mod bipoly;
pub mod map;
pub mod ntt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, ToPrimitive};
use serde::Serialize;

pub use bipoly::BiPoly;
pub use map::{parse_map, CremonaMap};

use crate::error::{Error, Result};
use crate::fields::Field;

/// Exact composition stops once the formal degree of a substitution exceeds this.
const EXACT_DEGREE_LIMIT: usize = 64;

/// How the degree of an iterate was established.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DegreeEvidence {
    /// Computed over the base field.
    Exact,
    /// A reduction modulo p gave a lower bound that meets the
    /// submultiplicative upper bound min deg(f^a)·deg(f^(n-a)).
    Squeezed { prime: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeSequence {
    pub degrees: Vec<usize>,
    pub evidence: Vec<DegreeEvidence>,
}

fn upper_bound(degs: &[usize], n: usize) -> usize {
    (1..n).map(|a| degs[a - 1] * degs[n - a - 1]).min().unwrap_or(usize::MAX)
}

/// Degrees of f, f², ..., f^N.
///
/// Small iterates are composed exactly. Once the substitution degree passes a
/// fixed limit, maps over Q are iterated modulo a word-sized prime: the degree
/// of a reduction never exceeds the true degree, so whenever it reaches the
/// upper bound min deg(f^a)·deg(f^(n-a)) the value is exact. Otherwise the
/// iterate is recomputed over Q.
pub fn degree_sequence(f: &CremonaMap, n_max: usize) -> Result<DegreeSequence> {
    if n_max == 0 {
        return Err(Error::PreconditionFailed("horizon must be at least 1".into()));
    }
    let mut degrees = vec![f.degree()];
    let mut evidence = vec![DegreeEvidence::Exact];
    // last exactly known iterate and its exponent
    let mut exact = (f.clone(), 1usize);
    let mut modular: Option<(CremonaMap, CremonaMap, u64)> = None;
    for n in 2..=n_max {
        let prev = degrees[n - 2];
        let use_modular = f.field() == Field::Rational && f.degree() * prev > EXACT_DEGREE_LIMIT;
        if use_modular {
            if modular.is_none() {
                modular = start_modular(f, &exact.0, exact.1 == n - 1);
            }
            if let Some((fp, gp, p)) = modular.take() {
                if let Ok(next) = fp.compose(&gp) {
                    let bound = upper_bound(&degrees, n);
                    if next.degree() == bound {
                        degrees.push(bound);
                        evidence.push(DegreeEvidence::Squeezed { prime: p });
                        modular = Some((fp, next, p));
                        continue;
                    }
                }
            }
        }
        // exact step, catching up from the last exact iterate if necessary
        let (mut g, mut k) = exact.clone();
        while k < n {
            g = f.compose(&g)?;
            k += 1;
        }
        degrees.push(g.degree());
        evidence.push(DegreeEvidence::Exact);
        exact = (g, n);
        modular = None;
    }
    Ok(DegreeSequence { degrees, evidence })
}

/// Reduces f and the current iterate modulo the first NTT prime that keeps
/// both degrees.
fn start_modular(f: &CremonaMap, g: &CremonaMap, current: bool) -> Option<(CremonaMap, CremonaMap, u64)> {
    if !current {
        return None;
    }
    for &(p, _) in &ntt::NTT_PRIMES {
        let (Ok(fp), Ok(gp)) = (f.reduce_mod(p), g.reduce_mod(p)) else { continue };
        if fp.degree() == f.degree() && gp.degree() == g.degree() {
            return Some((fp, gp, p));
        }
    }
    None
}

/// Bracket for deg(f^N)^(1/N) together with the successive ratios.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DynamicalDegree {
    pub horizon: usize,
    pub degree: usize,
    /// lower ≤ deg(f^N)^(1/N) < upper, both with four decimals.
    pub lower: BigRational,
    pub upper: BigRational,
    /// deg(f^(n+1))/deg(f^n).
    pub ratios: Vec<BigRational>,
    pub ratios_monotone: bool,
}

impl DynamicalDegree {
    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lower <= x && x <= &self.upper
    }

    pub fn lower_f64(&self) -> f64 {
        self.lower.to_f64().unwrap_or(f64::NAN)
    }

    pub fn upper_f64(&self) -> f64 {
        self.upper.to_f64().unwrap_or(f64::NAN)
    }
}

/// floor(D^(1/N) · 10^4) / 10^4 and the next grid point.
pub fn root_bracket(d: usize, n: usize) -> (BigRational, BigRational) {
    let scale = BigInt::from(10u32).pow(4u32);
    let big = BigInt::from(d) * scale.clone().pow(n as u32);
    let r = big.nth_root(n as u32);
    (BigRational::new(r.clone(), scale.clone()), BigRational::new(r + BigInt::one(), scale))
}

pub fn dynamical_degree_estimate(f: &CremonaMap, n: usize) -> Result<DynamicalDegree> {
    if n < 4 {
        return Err(Error::PreconditionFailed("horizon must be at least 4".into()));
    }
    let seq = degree_sequence(f, n)?;
    let d = seq.degrees[n - 1];
    let (lower, upper) = root_bracket(d, n);
    let ratios: Vec<BigRational> = seq
        .degrees
        .windows(2)
        .map(|w| BigRational::new(BigInt::from(w[1]), BigInt::from(w[0])))
        .collect();
    let ratios_monotone = ratios.windows(2).all(|w| w[0] <= w[1]) || ratios.windows(2).all(|w| w[0] >= w[1]);
    Ok(DynamicalDegree { horizon: n, degree: d, lower, upper, ratios, ratios_monotone })
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: Field = Field::Rational;

    #[test]
    fn linear_degrees() {
        let f = parse_map("(x, x*y)", Q).unwrap();
        assert_eq!(degree_sequence(&f, 5).unwrap().degrees, vec![2, 3, 4, 5, 6]);
        let id = CremonaMap::identity(Q);
        assert_eq!(degree_sequence(&id, 3).unwrap().degrees, vec![1, 1, 1]);
    }

    #[test]
    fn henon_doubles() {
        let f = parse_map("(y, y^2 - x)", Q).unwrap();
        let seq = degree_sequence(&f, 8).unwrap();
        assert_eq!(seq.degrees, vec![2, 4, 8, 16, 32, 64, 128, 256]);
        assert!(matches!(seq.evidence[7], DegreeEvidence::Squeezed { .. }));
        assert_eq!(seq.evidence[5], DegreeEvidence::Exact);
    }

    #[test]
    fn brackets() {
        let f = parse_map("(y, y^2 - x)", Q).unwrap();
        let est = dynamical_degree_estimate(&f, 8).unwrap();
        assert!(est.lower_f64() >= 1.99 && est.upper_f64() <= 2.0001);
        assert!(est.contains(&BigRational::from_integer(BigInt::from(2))));
        let g = parse_map("(x, x*y)", Q).unwrap();
        let est = dynamical_degree_estimate(&g, 8).unwrap();
        assert!(est.lower_f64() >= 1.0 && est.upper_f64() <= 1.4);
        let id = dynamical_degree_estimate(&CremonaMap::identity(Q), 4).unwrap();
        assert_eq!(id.lower, BigRational::one());
    }
}
