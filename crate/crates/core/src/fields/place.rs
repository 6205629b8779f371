use std::cmp::Ordering;
use std::fmt;

use serde::{Serialize, Serializer};

use super::factor;
use super::poly::Polynomial;
use super::ratfunc::RationalFunction;
use super::scalar::Scalar;
use crate::error::{Error, Result};
use crate::moebius::Moebius;

/// A discrete valuation value; `Infinite` is the valuation of zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Val {
    Finite(i64),
    Infinite,
}

impl Val {
    pub fn finite(self) -> Option<i64> {
        match self {
            Val::Finite(v) => Some(v),
            Val::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        self == Val::Infinite
    }
}

impl std::ops::Add for Val {
    type Output = Val;
    fn add(self, rhs: Val) -> Val {
        match (self, rhs) {
            (Val::Finite(a), Val::Finite(b)) => Val::Finite(a + b),
            _ => Val::Infinite,
        }
    }
}

impl fmt::Display for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Val::Finite(v) => write!(f, "{v}"),
            Val::Infinite => write!(f, "+inf"),
        }
    }
}

/// A closed point of the projective line over the base field.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Place {
    /// Monic irreducible polynomial.
    Finite(Polynomial),
    Infinity,
}

impl Place {
    /// Validating constructor.
    pub fn finite(p: Polynomial) -> Result<Self> {
        if p.deg0() == 0 {
            return Err(Error::invalid("a place needs a non-constant polynomial"));
        }
        if !p.is_monic() {
            return Err(Error::invalid(format!("place polynomial {p} is not monic")));
        }
        if !factor::is_irreducible(&p)? {
            return Err(Error::invalid(format!("place polynomial {p} is reducible")));
        }
        Ok(Place::Finite(p))
    }

    /// The rational point x = a.
    pub fn point(a: Scalar) -> Self {
        Place::Finite(Polynomial::linear(a))
    }

    pub fn degree(&self) -> usize {
        match self {
            Place::Finite(p) => p.deg0(),
            Place::Infinity => 1,
        }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, Place::Infinity)
    }

    /// The coordinate of a degree-one finite place.
    pub fn rational_point(&self) -> Option<Scalar> {
        match self {
            Place::Finite(p) if p.deg0() == 1 => Some(-&p.coeff(0)),
            _ => None,
        }
    }

    pub fn poly(&self) -> Option<&Polynomial> {
        match self {
            Place::Finite(p) => Some(p),
            Place::Infinity => None,
        }
    }
}

impl Ord for Place {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Place::Infinity, Place::Infinity) => Ordering::Equal,
            (Place::Infinity, _) => Ordering::Greater,
            (_, Place::Infinity) => Ordering::Less,
            (Place::Finite(a), Place::Finite(b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for Place {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Finite(p) => write!(f, "{p}"),
            Place::Infinity => write!(f, "inf"),
        }
    }
}

impl Serialize for Place {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Order of vanishing of a polynomial at a place.
pub fn poly_valuation(p: &Polynomial, place: &Place) -> Val {
    if p.is_zero() {
        return Val::Infinite;
    }
    match place {
        Place::Finite(q) => Val::Finite(p.multiplicity(q) as i64),
        Place::Infinity => Val::Finite(-(p.deg0() as i64)),
    }
}

/// Order of vanishing of a rational function at a place.
pub fn valuation(r: &RationalFunction, place: &Place) -> Val {
    if r.is_zero() {
        return Val::Infinite;
    }
    match place {
        Place::Finite(q) => Val::Finite(r.num().multiplicity(q) as i64 - r.den().multiplicity(q) as i64),
        Place::Infinity => Val::Finite(r.den().deg0() as i64 - r.num().deg0() as i64),
    }
}

/// The closed point h(P).
pub fn place_image(place: &Place, h: &Moebius) -> Place {
    let [a, b, c, d] = h.entries();
    match place {
        Place::Infinity => {
            if c.is_zero() {
                Place::Infinity
            } else {
                Place::point(a / c)
            }
        }
        Place::Finite(p) => {
            let n = p.deg0();
            if n == 1 {
                let alpha = -&p.coeff(0);
                let den = &(c * &alpha) + d;
                if den.is_zero() {
                    return Place::Infinity;
                }
                return Place::point(&(&(a * &alpha) + b) / &den);
            }
            // roots beta = h(alpha) satisfy p(h^{-1}(beta)) = 0
            let num = Polynomial::new(vec![-b, d.clone()]);
            let den = Polynomial::new(vec![a.clone(), -c]);
            let image = p.homogeneous_substitute(&num, &den, n);
            Place::Finite(image.monic())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::Field;

    fn q(c: &[i64]) -> Polynomial {
        Polynomial::from_ints(Field::Rational, c)
    }

    #[test]
    fn valuations() {
        let r = RationalFunction::new(q(&[0, 0, 1]), q(&[-1, 1]));
        assert_eq!(valuation(&r, &Place::Finite(q(&[0, 1]))), Val::Finite(2));
        assert_eq!(valuation(&r, &Place::Finite(q(&[-1, 1]))), Val::Finite(-1));
        let s = RationalFunction::new(q(&[1, 0, 0, 1]), q(&[0, 1]));
        assert_eq!(valuation(&s, &Place::Infinity), Val::Finite(-2));
        assert_eq!(valuation(&RationalFunction::zero(Field::Rational), &Place::Infinity), Val::Infinite);
    }

    #[test]
    fn images() {
        let f = Field::Rational;
        let shift = Moebius::from_ints(f, [1, 1, 0, 1]);
        assert_eq!(place_image(&Place::Finite(q(&[0, 1])), &shift), Place::Finite(q(&[-1, 1])));
        let recip = Moebius::from_ints(f, [0, 1, 1, 0]);
        assert_eq!(place_image(&Place::Finite(q(&[0, 1])), &recip), Place::Infinity);
        assert_eq!(place_image(&Place::Finite(q(&[1, 0, 1])), &shift), Place::Finite(q(&[2, -2, 1])));
    }

    #[test]
    fn ordering_puts_infinity_last() {
        let mut v = vec![Place::Infinity, Place::Finite(q(&[1, 0, 1])), Place::Finite(q(&[-1, 1])), Place::Finite(q(&[0, 1]))];
        v.sort();
        assert_eq!(v.last(), Some(&Place::Infinity));
        assert_eq!(v[0], Place::Finite(q(&[-1, 1])));
    }
}
