use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The base field a computation lives over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Field {
    /// The rationals.
    Rational,
    /// The prime field of the given order.
    Prime(u64),
    /// The real quadratic field Q(sqrt d), d squarefree and > 1.
    Quad(i64),
}

impl Field {
    pub fn prime(p: u64) -> Result<Self> {
        if p < 2 || p >= (1 << 62) || !crate::fields::intfactor::is_prime_u64(p) {
            return Err(Error::invalid(format!("{p} is not a supported prime")));
        }
        Ok(Field::Prime(p))
    }

    pub fn quad(d: i64) -> Result<Self> {
        if d <= 1 || !crate::fields::intfactor::is_squarefree_u64(d as u64) {
            return Err(Error::invalid(format!("{d} is not a squarefree integer > 1")));
        }
        Ok(Field::Quad(d))
    }

    pub fn zero(self) -> Scalar {
        match self {
            Field::Prime(p) => Scalar::Prime { value: 0, modulus: p },
            _ => Scalar::Rational(BigRational::zero()),
        }
    }

    pub fn one(self) -> Scalar {
        self.int(1)
    }

    pub fn int(self, n: i64) -> Scalar {
        match self {
            Field::Prime(p) => Scalar::Prime { value: n.rem_euclid(p as i64) as u64, modulus: p },
            _ => Scalar::Rational(BigRational::from_integer(BigInt::from(n))),
        }
    }

    pub fn characteristic(self) -> u64 {
        match self {
            Field::Prime(p) => p,
            _ => 0,
        }
    }

    /// Brings a scalar into this field.
    pub fn coerce(self, s: &Scalar) -> Result<Scalar> {
        match (self, s) {
            (Field::Prime(p), Scalar::Rational(r)) => rational_mod(r, p)
                .map(|value| Scalar::Prime { value, modulus: p })
                .ok_or_else(|| Error::invalid(format!("{r} has no image in F_{p}"))),
            (Field::Prime(p), Scalar::Prime { modulus, .. }) if *modulus == p => Ok(s.clone()),
            (Field::Rational, Scalar::Rational(_)) => Ok(s.clone()),
            (Field::Quad(_), Scalar::Rational(_)) => Ok(s.clone()),
            (Field::Quad(d), Scalar::Quad { d: e, .. }) if *e == d => Ok(s.clone()),
            _ => Err(Error::invalid(format!("{s} does not belong to {self}"))),
        }
    }

    pub fn contains(self, s: &Scalar) -> bool {
        match (self, s) {
            (Field::Prime(p), Scalar::Prime { modulus, .. }) => *modulus == p,
            (Field::Prime(_), _) => false,
            (_, Scalar::Rational(_)) => true,
            (Field::Quad(d), Scalar::Quad { d: e, .. }) => *e == d,
            _ => false,
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => write!(f, "Q"),
            Field::Prime(p) => write!(f, "F_{p}"),
            Field::Quad(d) => write!(f, "Q(sqrt({d}))"),
        }
    }
}

fn rational_mod(r: &BigRational, p: u64) -> Option<u64> {
    let pb = BigInt::from(p);
    let n = r.numer().mod_floor(&pb).to_u64()?;
    let d = r.denom().mod_floor(&pb).to_u64()?;
    if d == 0 {
        return None;
    }
    Some(mulmod(n, inv_mod(d, p), p))
}

pub(crate) fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    r
}

pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    powmod(a, p - 2, p)
}

/// An element of one of the supported base fields.
///
/// Quadratic elements with vanishing irrational part are always stored as
/// `Rational`, so equal values have equal representations within a field.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(BigRational),
    Prime { value: u64, modulus: u64 },
    Quad { a: BigRational, b: BigRational, d: i64 },
}

impl Scalar {
    pub fn rational(n: i64, d: i64) -> Self {
        Scalar::Rational(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn quad(a: BigRational, b: BigRational, d: i64) -> Self {
        if b.is_zero() {
            Scalar::Rational(a)
        } else {
            Scalar::Quad { a, b, d }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_zero(),
            Scalar::Prime { value, .. } => *value == 0,
            Scalar::Quad { .. } => false,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_one(),
            Scalar::Prime { value, .. } => *value == 1,
            Scalar::Quad { .. } => false,
        }
    }

    pub fn field(&self) -> Field {
        match self {
            Scalar::Rational(_) => Field::Rational,
            Scalar::Prime { modulus, .. } => Field::Prime(*modulus),
            Scalar::Quad { d, .. } => Field::Quad(*d),
        }
    }

    pub fn zero_like(&self) -> Scalar {
        match self {
            Scalar::Prime { modulus, .. } => Scalar::Prime { value: 0, modulus: *modulus },
            _ => Scalar::Rational(BigRational::zero()),
        }
    }

    pub fn one_like(&self) -> Scalar {
        match self {
            Scalar::Prime { modulus, .. } => Scalar::Prime { value: 1, modulus: *modulus },
            _ => Scalar::Rational(BigRational::one()),
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rational(r) => Some(r),
            _ => None,
        }
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn checked_inv(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Scalar::Rational(r) => Scalar::Rational(r.recip()),
            Scalar::Prime { value, modulus } => {
                Scalar::Prime { value: inv_mod(*value, *modulus), modulus: *modulus }
            }
            Scalar::Quad { a, b, d } => {
                let norm = a * a - b * b * BigRational::from_integer(BigInt::from(*d));
                Scalar::quad(a / &norm, -(b / &norm), *d)
            }
        })
    }

    pub fn inv(&self) -> Scalar {
        self.checked_inv().expect("inverse of zero")
    }

    pub fn pow(&self, e: i64) -> Scalar {
        if e < 0 {
            return self.inv().pow(-e);
        }
        let mut result = self.one_like();
        let mut base = self.clone();
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        result
    }

    /// A square root inside the same field, if one exists.
    pub fn sqrt(&self) -> Option<Scalar> {
        match self {
            Scalar::Rational(r) => rational_sqrt(r).map(Scalar::Rational),
            Scalar::Prime { value, modulus } => {
                sqrt_mod(*value, *modulus).map(|v| Scalar::Prime { value: v, modulus: *modulus })
            }
            Scalar::Quad { .. } => None,
        }
    }

    fn binary(&self, other: &Scalar) -> (Scalar, Scalar) {
        match (self, other) {
            (Scalar::Prime { modulus, .. }, o) if !matches!(o, Scalar::Prime { .. }) => {
                let f = Field::Prime(*modulus);
                (self.clone(), f.coerce(o).expect("scalar incompatible with prime field"))
            }
            (s, Scalar::Prime { modulus, .. }) if !matches!(s, Scalar::Prime { .. }) => {
                let f = Field::Prime(*modulus);
                (f.coerce(s).expect("scalar incompatible with prime field"), other.clone())
            }
            _ => (self.clone(), other.clone()),
        }
    }
}

fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

/// Tonelli–Shanks.
pub(crate) fn sqrt_mod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 || p == 2 {
        return Some(a);
    }
    if powmod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    let (mut q, mut s) = (p - 1, 0u32);
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let mut z = 2;
    while powmod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = powmod(z, q, p);
    let mut t = powmod(a, q, p);
    let mut r = powmod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = mulmod(tt, tt, p);
            i += 1;
        }
        let b = powmod(c, 1 << (m - i - 1), p);
        m = i;
        c = mulmod(b, b, p);
        t = mulmod(t, c, p);
        r = mulmod(r, b, p);
    }
    Some(r)
}

fn quad_d(d1: i64, d2: i64) -> i64 {
    assert_eq!(d1, d2, "mixing different quadratic fields");
    d1
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &'a Scalar) -> Scalar {
        let (x, y) = self.binary(rhs);
        match (x, y) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a + b),
            (Scalar::Prime { value: a, modulus }, Scalar::Prime { value: b, modulus: m2 }) => {
                assert_eq!(modulus, m2, "mixing prime fields");
                Scalar::Prime { value: ((a as u128 + b as u128) % modulus as u128) as u64, modulus }
            }
            (Scalar::Quad { a, b, d }, Scalar::Rational(r)) | (Scalar::Rational(r), Scalar::Quad { a, b, d }) => {
                Scalar::quad(a + r, b, d)
            }
            (Scalar::Quad { a, b, d }, Scalar::Quad { a: a2, b: b2, d: d2 }) => {
                Scalar::quad(a + a2, b + b2, quad_d(d, d2))
            }
            _ => unreachable!(),
        }
    }
}

impl<'a> Neg for &'a Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(a) => Scalar::Rational(-a),
            Scalar::Prime { value, modulus } => {
                Scalar::Prime { value: if *value == 0 { 0 } else { modulus - value }, modulus: *modulus }
            }
            Scalar::Quad { a, b, d } => Scalar::Quad { a: -a, b: -b, d: *d },
        }
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &'a Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &'a Scalar) -> Scalar {
        let (x, y) = self.binary(rhs);
        match (x, y) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a * b),
            (Scalar::Prime { value: a, modulus }, Scalar::Prime { value: b, modulus: m2 }) => {
                assert_eq!(modulus, m2, "mixing prime fields");
                Scalar::Prime { value: mulmod(a, b, modulus), modulus }
            }
            (Scalar::Quad { a, b, d }, Scalar::Rational(r)) | (Scalar::Rational(r), Scalar::Quad { a, b, d }) => {
                Scalar::quad(a * &r, b * r, d)
            }
            (Scalar::Quad { a, b, d }, Scalar::Quad { a: a2, b: b2, d: d2 }) => {
                let d = quad_d(d, d2);
                let dd = BigRational::from_integer(BigInt::from(d));
                Scalar::quad(&a * &a2 + &b * &b2 * dd, a * b2 + a2 * b, d)
            }
            _ => unreachable!(),
        }
    }
}

impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn div(self, rhs: &'a Scalar) -> Scalar {
        self * &rhs.inv()
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar { (&self).$m(&rhs) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul, Div div);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        fn rank(s: &Scalar) -> u8 {
            match s {
                Scalar::Rational(_) => 0,
                Scalar::Prime { .. } => 1,
                Scalar::Quad { .. } => 2,
            }
        }
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => a.cmp(b),
            (Scalar::Prime { value: a, modulus: m }, Scalar::Prime { value: b, modulus: n }) => (m, a).cmp(&(n, b)),
            (Scalar::Quad { a, b, d }, Scalar::Quad { a: a2, b: b2, d: d2 }) => (d, a, b).cmp(&(d2, a2, b2)),
            _ => rank(self).cmp(&rank(other)),
        }
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => write!(f, "{r}"),
            Scalar::Prime { value, .. } => write!(f, "{value}"),
            Scalar::Quad { a, b, d } => {
                write!(f, "(")?;
                if !a.is_zero() {
                    write!(f, "{a}")?;
                    if b.is_positive() {
                        write!(f, "+")?;
                    }
                }
                write!(f, "{b}*sqrt({d}))")
            }
        }
    }
}

/// Exact sign of a + b·sqrt(d) under the embedding sqrt(d) > 0.
pub fn quad_sign(a: &BigRational, b: &BigRational, d: i64) -> Ordering {
    let sa = a.cmp(&BigRational::zero());
    let sb = b.cmp(&BigRational::zero());
    if sb == Ordering::Equal {
        return sa;
    }
    if sa == Ordering::Equal || sa == sb {
        return sb;
    }
    // opposite signs: compare a^2 with b^2 d
    let lhs = a * a;
    let rhs = b * b * BigRational::from_integer(BigInt::from(d));
    match lhs.cmp(&rhs) {
        Ordering::Greater => sa,
        Ordering::Less => sb,
        Ordering::Equal => Ordering::Equal,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_arithmetic() {
        let f = Field::Prime(7);
        let a = f.int(3);
        let b = f.int(5);
        assert_eq!(&a * &b, f.int(1));
        assert_eq!(&a / &b, f.int(2));
        assert_eq!(-&a, f.int(4));
        assert_eq!(f.int(-1), f.int(6));
    }

    #[test]
    fn rational_coerces_into_prime_field() {
        let f = Field::Prime(5);
        assert_eq!(f.coerce(&Scalar::rational(1, 2)).unwrap(), f.int(3));
        assert!(f.coerce(&Scalar::rational(1, 5)).is_err());
    }

    #[test]
    fn quadratic_inverse() {
        let two = BigRational::from_integer(BigInt::from(2));
        let x = Scalar::quad(BigRational::from_integer(BigInt::from(3)), BigRational::one(), 5) / Scalar::Rational(two);
        let y = x.inv();
        assert!((&x * &y).is_one());
    }

    #[test]
    fn quadratic_collapses_to_rational() {
        let s = Scalar::quad(BigRational::one(), BigRational::one(), 2);
        let t = Scalar::quad(BigRational::one(), -BigRational::one(), 2);
        assert_eq!(&s * &t, Scalar::from_int(-1));
    }

    #[test]
    fn sign_of_quadratic() {
        let r = |n: i64| BigRational::from_integer(BigInt::from(n));
        assert_eq!(quad_sign(&r(-3), &r(2), 2), Ordering::Less);
        assert_eq!(quad_sign(&r(-2), &r(2), 2), Ordering::Greater);
        assert_eq!(quad_sign(&r(3), &r(-2), 2), Ordering::Greater);
    }

    #[test]
    fn square_roots_mod_p() {
        for p in [3u64, 5, 13, 17, 101] {
            for a in 1..p {
                if let Some(r) = sqrt_mod(a, p) {
                    assert_eq!(mulmod(r, r, p), a);
                }
            }
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}
