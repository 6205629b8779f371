//! PGL2 over the base field: group law, conjugacy classification, fixed
//! points and north-south places.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::intfactor::prime_factors;
use crate::fields::norm::{rational_valuation, NumberPlace};
use crate::fields::{place_image, Field, Place, Polynomial, RationalFunction, Scalar};

/// Projective class of an invertible 2x2 matrix `[[a, b], [c, d]]`, acting by
/// x ↦ (a x + b)/(c x + d). The first nonzero entry is scaled to 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Moebius {
    field: Field,
    m: [Scalar; 4],
}

impl Moebius {
    pub fn new(field: Field, entries: [Scalar; 4]) -> Result<Self> {
        let mut m = Vec::with_capacity(4);
        for e in &entries {
            m.push(field.coerce(e)?);
        }
        let m: [Scalar; 4] = m.try_into().unwrap();
        let det = &(&m[0] * &m[3]) - &(&m[1] * &m[2]);
        if det.is_zero() {
            return Err(Error::invalid("singular matrix"));
        }
        Ok(Self::canonical(field, m))
    }

    pub fn from_ints(field: Field, e: [i64; 4]) -> Self {
        Self::new(field, e.map(|v| field.int(v))).expect("singular matrix")
    }

    pub fn identity(field: Field) -> Self {
        Self::from_ints(field, [1, 0, 0, 1])
    }

    fn canonical(field: Field, m: [Scalar; 4]) -> Self {
        let lead = m.iter().find(|s| !s.is_zero()).unwrap().inv();
        Moebius { field, m: m.map(|s| &s * &lead) }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn entries(&self) -> [&Scalar; 4] {
        [&self.m[0], &self.m[1], &self.m[2], &self.m[3]]
    }

    pub fn det(&self) -> Scalar {
        &(&self.m[0] * &self.m[3]) - &(&self.m[1] * &self.m[2])
    }

    pub fn trace(&self) -> Scalar {
        &self.m[0] + &self.m[3]
    }

    pub fn is_identity(&self) -> bool {
        self.m[1].is_zero() && self.m[2].is_zero() && self.m[0] == self.m[3]
    }

    /// self ∘ other.
    pub fn compose(&self, other: &Moebius) -> Moebius {
        let [a, b, c, d] = &self.m;
        let [e, f, g, h] = &other.m;
        let m = [
            &(a * e) + &(b * g),
            &(a * f) + &(b * h),
            &(c * e) + &(d * g),
            &(c * f) + &(d * h),
        ];
        Self::canonical(self.field, m)
    }

    pub fn inverse(&self) -> Moebius {
        let [a, b, c, d] = &self.m;
        Self::canonical(self.field, [d.clone(), -b, -c, a.clone()])
    }

    pub fn pow(&self, n: i64) -> Moebius {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = Moebius::identity(self.field);
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&sq);
            }
            sq = sq.compose(&sq);
            e >>= 1;
        }
        acc
    }

    /// Image of a point of the affine line; `None` stands for ∞.
    pub fn apply_point(&self, x: Option<&Scalar>) -> Option<Scalar> {
        let [a, b, c, d] = &self.m;
        let (num, den) = match x {
            Some(x) => (&(a * x) + b, &(c * x) + d),
            None => (a.clone(), c.clone()),
        };
        if den.is_zero() {
            None
        } else {
            Some(&num / &den)
        }
    }

    pub fn apply(&self, p: &Place) -> Place {
        place_image(p, self)
    }

    /// (a x + b)/(c x + d) as an element of k(x).
    pub fn as_rational_function(&self) -> RationalFunction {
        let [a, b, c, d] = &self.m;
        RationalFunction::new(Polynomial::new(vec![b.clone(), a.clone()]), Polynomial::new(vec![d.clone(), c.clone()]))
    }

    /// Discriminant tr² − 4 det of the characteristic polynomial.
    pub fn discriminant(&self) -> Scalar {
        let t = self.trace();
        &(&t * &t) - &(&self.field.int(4) * &self.det())
    }
}

impl fmt::Display for Moebius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = &self.m;
        write!(f, "[[{a}, {b}], [{c}, {d}]]")
    }
}

impl Serialize for Moebius {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum MoebiusClass {
    Identity,
    FiniteOrder(u64),
    UnipotentInfinite,
    /// Carries the conjugacy invariant tr²/det.
    SemisimpleInfinite(Scalar),
}

impl MoebiusClass {
    pub fn is_finite(&self) -> bool {
        matches!(self, MoebiusClass::Identity | MoebiusClass::FiniteOrder(_))
    }
}

impl fmt::Display for MoebiusClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MoebiusClass::Identity => write!(f, "identity"),
            MoebiusClass::FiniteOrder(n) => write!(f, "finite order {n}"),
            MoebiusClass::UnipotentInfinite => write!(f, "unipotent"),
            MoebiusClass::SemisimpleInfinite(r) => write!(f, "semisimple (tr^2/det = {r})"),
        }
    }
}

pub fn classify_moebius(m: &Moebius) -> MoebiusClass {
    if m.is_identity() {
        return MoebiusClass::Identity;
    }
    let field = m.field();
    if let Field::Prime(p) = field {
        return MoebiusClass::FiniteOrder(prime_field_order(m, p));
    }
    let t = m.trace();
    let r = &(&t * &t) / &m.det();
    if r == field.int(4) {
        return MoebiusClass::UnipotentInfinite;
    }
    match field {
        Field::Rational => {
            // mu + 1/mu = r - 2 for a root of unity mu of degree <= 2
            for (rv, order) in [(0, 2), (1, 3), (2, 4), (3, 6)] {
                if r == field.int(rv) {
                    return MoebiusClass::FiniteOrder(order);
                }
            }
        }
        _ => {
            // roots of unity of degree <= 4 over Q have order dividing one of these
            for order in [2, 3, 4, 5, 6, 8, 10, 12] {
                if m.pow(order).is_identity() {
                    return MoebiusClass::FiniteOrder(order as u64);
                }
            }
        }
    }
    MoebiusClass::SemisimpleInfinite(r)
}

/// Exact order in PGL2(F_p), which divides p (unipotent), p - 1 (split) or p + 1.
fn prime_field_order(m: &Moebius, p: u64) -> u64 {
    if p < 64 {
        let mut acc = m.clone();
        let mut n = 1;
        while !acc.is_identity() {
            acc = acc.compose(m);
            n += 1;
        }
        return n;
    }
    let disc = m.discriminant();
    let bound = if disc.is_zero() {
        p
    } else if disc.sqrt().is_some() {
        p - 1
    } else {
        p + 1
    };
    let mut n = bound;
    for q in prime_factors(&BigInt::from(bound)) {
        let q = q.to_u64().unwrap();
        while n % q == 0 && m.pow((n / q) as i64).is_identity() {
            n /= q;
        }
    }
    debug_assert!(m.pow(n as i64).is_identity());
    n
}

/// Roots of the polynomial c y² + (d − a) y − b.
fn fixed_point_poly(m: &Moebius) -> Polynomial {
    let [a, b, c, d] = m.entries();
    Polynomial::new(vec![-b, d - a, c.clone()])
}

/// A square root of `s` inside the field, if one exists.
fn field_sqrt(s: &Scalar, field: Field) -> Option<Scalar> {
    if let Some(r) = s.sqrt() {
        return Some(r);
    }
    let Field::Quad(d) = field else { return None };
    let dq = BigRational::from_integer(BigInt::from(d));
    match s {
        Scalar::Rational(r) => Scalar::Rational(r / &dq).sqrt().map(|t| match t {
            Scalar::Rational(t) => Scalar::quad(BigRational::zero(), t, d),
            _ => unreachable!(),
        }),
        Scalar::Quad { a, b, .. } => {
            // (x + y√d)² = a + b√d  ⇒  x² = (a ± √(a² − d b²))/2
            let n = Scalar::Rational(a * a - b * b * &dq).sqrt()?;
            let n = n.as_rational()?.clone();
            let two = BigRational::from_integer(BigInt::from(2));
            for cand in [(a + &n) / &two, (a - &n) / &two] {
                if let Some(Scalar::Rational(x)) = Scalar::Rational(cand.clone()).sqrt() {
                    if !x.is_zero() {
                        let y = b / (&two * &x);
                        return Some(Scalar::quad(x, y, d));
                    }
                }
            }
            None
        }
        _ => None,
    }
}

/// Fixed closed points of a non-identity map (one or two places).
pub fn fixed_points(m: &Moebius) -> Result<Vec<Place>> {
    if m.is_identity() {
        return Err(Error::PreconditionFailed("the identity fixes every place".into()));
    }
    let field = m.field();
    let q = fixed_point_poly(m);
    let mut out = Vec::new();
    match q.deg0() {
        1 => {
            out.push(Place::Finite(q.monic()));
            out.push(Place::Infinity);
        }
        0 => out.push(Place::Infinity),
        _ => {
            let roots: Vec<Polynomial> = if matches!(field, Field::Quad(_)) {
                let disc = m.discriminant();
                let two_c = &field.int(2) * &q.coeff(2);
                let mid = &(m.entries()[0] - m.entries()[3]) / &two_c;
                if disc.is_zero() {
                    vec![Polynomial::linear(mid)]
                } else if let Some(s) = field_sqrt(&disc, field) {
                    let s = &s / &two_c;
                    vec![Polynomial::linear(&mid + &s), Polynomial::linear(&mid - &s)]
                } else {
                    vec![q.monic()]
                }
            } else {
                crate::fields::factor::irreducible_factors(&q)?
            };
            out.extend(roots.into_iter().map(Place::Finite));
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// One branch of a fixed place. `root` is an exact root in a real quadratic
/// field; `approx` is a rational number within p-adic distance p^-precision.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FixedBranch {
    pub place: Place,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub root: Option<Scalar>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub approx: Option<(Scalar, i64)>,
}

impl FixedBranch {
    fn plain(place: Place) -> Self {
        FixedBranch { place, root: None, approx: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NorthSouth {
    pub place: NumberPlace,
    pub attracting: FixedBranch,
    pub repelling: FixedBranch,
}

fn rat(s: &Scalar) -> BigRational {
    s.as_rational().cloned().expect("rational scalar")
}

/// Fixed point of m whose eigenvalue is `lambda`; `None` is ∞.
fn eigen_point(m: &Moebius, lambda: &Scalar) -> Option<Scalar> {
    let [a, b, c, d] = m.entries();
    if !c.is_zero() {
        Some(&(lambda - d) / c)
    } else if lambda == a {
        None
    } else {
        Some(&(-b) / &(d - a))
    }
}

fn point_place(p: Option<Scalar>) -> Place {
    p.map(Place::point).unwrap_or(Place::Infinity)
}

/// Squarefree part e and cofactor s of a positive rational, q = s² e.
fn squarefree_split(q: &BigRational) -> (BigRational, i64) {
    // q = n/d = n d / d²
    let n = q.numer() * q.denom();
    let mut e = BigInt::one();
    let mut s = BigInt::one();
    let fs = prime_factors(&n);
    let mut i = 0;
    while i < fs.len() {
        let mut j = i;
        while j < fs.len() && fs[j] == fs[i] {
            j += 1;
        }
        let p = BigInt::from(fs[i].clone());
        let k = j - i;
        for _ in 0..k / 2 {
            s *= &p;
        }
        if k % 2 == 1 {
            e *= &p;
        }
        i = j;
    }
    (BigRational::new(s, q.denom().clone()), e.to_i64().expect("squarefree part too large"))
}

/// A place where the eigenvalue ratio of a semisimple map of infinite order is
/// not a unit, with the attracting and repelling fixed points there.
pub fn find_ns_place(m: &Moebius) -> Result<NorthSouth> {
    if !matches!(classify_moebius(m), MoebiusClass::SemisimpleInfinite(_)) {
        return Err(Error::NoneFiniteOrder);
    }
    let field = m.field();
    let tr = m.trace();
    let disc = m.discriminant();
    let two = field.int(2);
    if let Some(s) = field_sqrt(&disc, field) {
        // eigenvalues inside the field
        let l1 = &(&tr + &s) / &two;
        let l2 = &(&tr - &s) / &two;
        let mu = &l1 / &l2;
        let ord = crate::fields::norm_compare(&mu, &NumberPlace::ArchimedeanReal)?;
        let (big, small) = match ord {
            crate::fields::NormOrder::GreaterThanOne => (l1, l2),
            crate::fields::NormOrder::LessThanOne => (l2, l1),
            crate::fields::NormOrder::One => {
                return Err(Error::UnsupportedPlace(format!("eigenvalue ratio {mu} is a real unit")))
            }
        };
        let attr = eigen_point(m, &big);
        let rep = eigen_point(m, &small);
        let branch = |p: Option<Scalar>| match &p {
            Some(Scalar::Quad { .. }) => FixedBranch {
                place: Place::Finite(fixed_point_poly(m).monic()),
                root: p.clone(),
                approx: None,
            },
            _ => FixedBranch::plain(point_place(p)),
        };
        return Ok(NorthSouth { place: NumberPlace::ArchimedeanReal, attracting: branch(attr), repelling: branch(rep) });
    }
    if field != Field::Rational {
        return Err(Error::UnsupportedPlace(format!("eigenvalues of {m} lie outside {field}")));
    }
    let [a, _, c, d] = m.entries();
    let (a, c, d) = (rat(a), rat(c), rat(d));
    let (trq, detq, dq) = (rat(&tr), rat(&m.det()), rat(&disc));
    let place = Place::Finite(fixed_point_poly(m).monic());
    if dq.is_positive() {
        // real quadratic eigenvalues: the larger one has the sign of the trace
        let (s, e) = squarefree_split(&dq);
        let sigma = if trq.is_negative() { -BigRational::one() } else { BigRational::one() };
        let two_c = &c * BigRational::from_integer(BigInt::from(2));
        let mid = (&a - &d) / &two_c;
        let off = &s / &two_c;
        let attr = Scalar::quad(mid.clone(), &sigma * &off, e);
        let rep = Scalar::quad(mid, -(&sigma * &off), e);
        return Ok(NorthSouth {
            place: NumberPlace::ArchimedeanReal,
            attracting: FixedBranch { place: place.clone(), root: Some(attr), approx: None },
            repelling: FixedBranch { place, root: Some(rep), approx: None },
        });
    }
    // complex eigenvalues: a prime in the denominator of tr²/det − 2
    let rq = &trq * &trq / &detq;
    let p = prime_factors(rq.denom()).into_iter().next().ok_or(Error::NoneFiniteOrder)?;
    // Newton iteration for the square root of the discriminant closest to tr
    let mut s = trq.clone();
    for _ in 0..6 {
        s = (&s + &dq / &s) / BigRational::from_integer(BigInt::from(2));
    }
    let two = BigRational::from_integer(BigInt::from(2));
    let e = rational_valuation(&(&s * &s - &dq), &p);
    let prec = e - rational_valuation(&(&two * &trq), &p) - rational_valuation(&(&two * &c), &p);
    let attr = (&a - &d + &s) / (&two * &c);
    // the other root, reached through the sum of roots (a − d)/c
    let rep = (&a - &d) / &c - &attr;
    Ok(NorthSouth {
        place: NumberPlace::PAdic(p),
        attracting: FixedBranch { place: place.clone(), root: None, approx: Some((Scalar::Rational(attr), prec)) },
        repelling: FixedBranch { place, root: None, approx: Some((Scalar::Rational(rep), prec)) },
    })
}

/// p-adic valuation of a rational number, exposed for callers checking north-south data.
pub fn padic_valuation(r: &BigRational, p: &BigUint) -> i64 {
    rational_valuation(r, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: Field = Field::Rational;

    #[test]
    fn canonical_composition() {
        let m = Moebius::from_ints(Q, [2, 0, 0, 1]).compose(&Moebius::from_ints(Q, [1, 1, 0, 1]));
        let expect = Moebius::new(Q, [Scalar::from_int(1), Scalar::from_int(1), Scalar::from_int(0), Scalar::rational(1, 2)]).unwrap();
        assert_eq!(m, expect);
        assert_eq!(Moebius::from_ints(Q, [1, 1, 0, 1]).inverse(), Moebius::from_ints(Q, [1, -1, 0, 1]));
    }

    #[test]
    fn classification() {
        assert_eq!(classify_moebius(&Moebius::from_ints(Q, [1, 1, 0, 1])), MoebiusClass::UnipotentInfinite);
        assert_eq!(
            classify_moebius(&Moebius::from_ints(Q, [2, 0, 0, 1])),
            MoebiusClass::SemisimpleInfinite(Scalar::rational(9, 2))
        );
        let m = Moebius::from_ints(Q, [1, -1, 1, 0]);
        assert_eq!(classify_moebius(&m), MoebiusClass::FiniteOrder(3));
        assert!(m.pow(3).is_identity());
        assert_eq!(classify_moebius(&Moebius::from_ints(Q, [0, -1, 1, 0])), MoebiusClass::FiniteOrder(2));
        assert_eq!(classify_moebius(&Moebius::from_ints(Q, [1, -1, 1, 1])), MoebiusClass::FiniteOrder(4));
        assert_eq!(classify_moebius(&Moebius::from_ints(Q, [2, -1, 1, 1])), MoebiusClass::FiniteOrder(6));
    }

    #[test]
    fn prime_field_orders() {
        let f = Field::Prime(7);
        assert_eq!(classify_moebius(&Moebius::from_ints(f, [1, 1, 0, 1])), MoebiusClass::FiniteOrder(7));
        assert_eq!(classify_moebius(&Moebius::from_ints(f, [3, 0, 0, 1])), MoebiusClass::FiniteOrder(6));
        let f2 = Field::Prime(2);
        assert_eq!(classify_moebius(&Moebius::from_ints(f2, [0, 1, 1, 0])), MoebiusClass::FiniteOrder(2));
        assert_eq!(classify_moebius(&Moebius::from_ints(f2, [0, 1, 1, 1])), MoebiusClass::FiniteOrder(3));
    }

    #[test]
    fn fixed_point_sets() {
        let q = |c: &[i64]| Polynomial::from_ints(Q, c);
        assert_eq!(fixed_points(&Moebius::from_ints(Q, [2, 0, 0, 1])).unwrap(), vec![Place::Finite(q(&[0, 1])), Place::Infinity]);
        assert_eq!(fixed_points(&Moebius::from_ints(Q, [1, 1, 0, 1])).unwrap(), vec![Place::Infinity]);
        assert_eq!(fixed_points(&Moebius::from_ints(Q, [0, -1, 1, 0])).unwrap(), vec![Place::Finite(q(&[1, 0, 1]))]);
    }

    #[test]
    fn north_south_rational() {
        let ns = find_ns_place(&Moebius::from_ints(Q, [2, 0, 0, 1])).unwrap();
        assert_eq!(ns.place, NumberPlace::ArchimedeanReal);
        assert_eq!(ns.attracting.place, Place::Infinity);
        assert_eq!(ns.repelling.place, Place::point(Scalar::from_int(0)));
        let ns = find_ns_place(&Moebius::from_ints(Q, [1, 0, 0, 2])).unwrap();
        assert_eq!(ns.attracting.place, Place::point(Scalar::from_int(0)));
        assert!(matches!(find_ns_place(&Moebius::from_ints(Q, [1, 1, 0, 1])), Err(Error::NoneFiniteOrder)));
    }

    #[test]
    fn north_south_real_quadratic() {
        let ns = find_ns_place(&Moebius::from_ints(Q, [1, 2, 1, 1])).unwrap();
        assert_eq!(ns.place, NumberPlace::ArchimedeanReal);
        assert_eq!(ns.attracting.place, Place::Finite(Polynomial::from_ints(Q, &[-2, 0, 1])));
        let half = BigRational::zero();
        assert_eq!(ns.attracting.root, Some(Scalar::quad(half, BigRational::one(), 2)));
    }

    #[test]
    fn north_south_complex_is_padic() {
        // tr = 1, det = 2: tr²/det − 2 = −3/2, eigenvalues complex
        let m = Moebius::from_ints(Q, [1, -2, 1, 0]);
        let ns = find_ns_place(&m).unwrap();
        assert_eq!(ns.place, NumberPlace::PAdic(BigUint::from(2u32)));
        let (approx, prec) = ns.attracting.approx.clone().unwrap();
        assert!(prec >= 8);
        // iterating a rational point approaches the attracting branch 2-adically
        let mut x = Scalar::rational(1, 3);
        for _ in 0..12 {
            x = m.apply_point(Some(&x)).unwrap();
        }
        let dist = padic_valuation(&rat(&(&x - &approx)), &BigUint::from(2u32));
        assert!(dist >= 8, "distance {dist}");
    }
}
