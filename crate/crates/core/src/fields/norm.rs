use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::scalar::{quad_sign, Scalar};
use crate::error::{Error, Result};

/// A place of the number field used for norm comparisons.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum NumberPlace {
    /// The real embedding with sqrt(d) > 0.
    ArchimedeanReal,
    PAdic(BigUint),
}

impl fmt::Display for NumberPlace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NumberPlace::ArchimedeanReal => write!(f, "real"),
            NumberPlace::PAdic(p) => write!(f, "{p}-adic"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum NormOrder {
    LessThanOne,
    One,
    GreaterThanOne,
}

/// p-adic valuation of a nonzero integer.
pub fn int_valuation(n: &BigInt, p: &BigUint) -> i64 {
    let p = BigInt::from(p.clone());
    let mut n = n.clone();
    let mut v = 0;
    while !n.is_zero() && n.is_multiple_of(&p) {
        n /= &p;
        v += 1;
    }
    v
}

pub fn rational_valuation(r: &BigRational, p: &BigUint) -> i64 {
    int_valuation(r.numer(), p) - int_valuation(r.denom(), p)
}

/// Exact comparison of |lambda|_v with 1.
pub fn norm_compare(lambda: &Scalar, v: &NumberPlace) -> Result<NormOrder> {
    if lambda.is_zero() {
        return Err(Error::invalid("norm comparison of zero"));
    }
    match (lambda, v) {
        (Scalar::Rational(r), NumberPlace::ArchimedeanReal) => Ok(match r.abs().cmp(&BigRational::one()) {
            Ordering::Less => NormOrder::LessThanOne,
            Ordering::Equal => NormOrder::One,
            Ordering::Greater => NormOrder::GreaterThanOne,
        }),
        (Scalar::Rational(r), NumberPlace::PAdic(p)) => Ok(match rational_valuation(r, p).cmp(&0) {
            Ordering::Greater => NormOrder::LessThanOne,
            Ordering::Equal => NormOrder::One,
            Ordering::Less => NormOrder::GreaterThanOne,
        }),
        (Scalar::Quad { a, b, d }, NumberPlace::ArchimedeanReal) => {
            let one = BigRational::one();
            let above = quad_sign(&(a - &one), b, *d);
            let below = quad_sign(&(a + &one), b, *d);
            Ok(if above == Ordering::Greater || below == Ordering::Less {
                NormOrder::GreaterThanOne
            } else if above == Ordering::Equal || below == Ordering::Equal {
                NormOrder::One
            } else {
                NormOrder::LessThanOne
            })
        }
        _ => Err(Error::UnsupportedPlace(format!("{lambda} at the {v} place"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_norms() {
        assert_eq!(norm_compare(&Scalar::from_int(2), &NumberPlace::ArchimedeanReal).unwrap(), NormOrder::GreaterThanOne);
        assert_eq!(norm_compare(&Scalar::from_int(2), &NumberPlace::PAdic(BigUint::from(2u32))).unwrap(), NormOrder::LessThanOne);
        assert_eq!(norm_compare(&Scalar::rational(3, 2), &NumberPlace::PAdic(BigUint::from(5u32))).unwrap(), NormOrder::One);
        assert_eq!(norm_compare(&Scalar::from_int(-1), &NumberPlace::ArchimedeanReal).unwrap(), NormOrder::One);
    }

    #[test]
    fn golden_ratio_square_exceeds_one() {
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        let three_halves = BigRational::new(BigInt::from(3), BigInt::from(2));
        let lambda = Scalar::quad(three_halves, half.clone(), 5);
        assert_eq!(norm_compare(&lambda, &NumberPlace::ArchimedeanReal).unwrap(), NormOrder::GreaterThanOne);
        // its conjugate (3 - sqrt5)/2 ~ 0.38
        let conj = Scalar::quad(BigRational::new(BigInt::from(3), BigInt::from(2)), -half, 5);
        assert_eq!(norm_compare(&conj, &NumberPlace::ArchimedeanReal).unwrap(), NormOrder::LessThanOne);
    }

    #[test]
    fn unsupported_combination() {
        let lambda = Scalar::quad(BigRational::one(), BigRational::one(), 2);
        assert!(matches!(
            norm_compare(&lambda, &NumberPlace::PAdic(BigUint::from(7u32))),
            Err(Error::UnsupportedPlace(_))
        ));
    }
}
