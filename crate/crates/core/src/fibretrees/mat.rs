//! 2x2 matrices over k(x).

use std::fmt;

use crate::fields::{valuation, Field, Place, Polynomial, RationalFunction, Scalar, Val};
use crate::moebius::Moebius;

/// Row-major `[[a, b], [c, d]]` with entries in k(x).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mat2(pub [RationalFunction; 4]);

impl Mat2 {
    pub fn identity(field: Field) -> Self {
        let (o, z) = (RationalFunction::one(field), RationalFunction::zero(field));
        Mat2([o.clone(), z.clone(), z, o])
    }

    pub fn from_polys(p: [Polynomial; 4]) -> Self {
        Mat2(p.map(RationalFunction::from_poly))
    }

    pub fn diag(a: RationalFunction, d: RationalFunction) -> Self {
        let f = a.field();
        Mat2([a, RationalFunction::zero(f), RationalFunction::zero(f), d])
    }

    /// Constant matrix with integer entries.
    pub fn from_ints(field: Field, e: [i64; 4]) -> Self {
        Mat2(e.map(|v| RationalFunction::constant(field.int(v))))
    }

    pub fn field(&self) -> Field {
        self.0.iter().find(|r| !r.is_zero()).map(RationalFunction::field).unwrap_or(Field::Rational)
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        let [a, b, c, d] = &self.0;
        let [e, f, g, h] = &o.0;
        Mat2([
            &(a * e) + &(b * g),
            &(a * f) + &(b * h),
            &(c * e) + &(d * g),
            &(c * f) + &(d * h),
        ])
    }

    pub fn det(&self) -> RationalFunction {
        let [a, b, c, d] = &self.0;
        &(a * d) - &(b * c)
    }

    pub fn trace(&self) -> RationalFunction {
        &self.0[0] + &self.0[3]
    }

    /// det · M⁻¹.
    pub fn adjugate(&self) -> Mat2 {
        let [a, b, c, d] = &self.0;
        Mat2([d.clone(), -b, -c, a.clone()])
    }

    pub fn scale(&self, r: &RationalFunction) -> Mat2 {
        Mat2(self.0.clone().map(|e| &e * r))
    }

    /// Entries r(h(x)).
    pub fn substitute(&self, h: &Moebius) -> Mat2 {
        let [a, b, c, d] = h.entries();
        Mat2(self.0.clone().map(|e| e.substitute_moebius(a, b, c, d)))
    }

    /// Entries r(1/x).
    pub fn reciprocal(&self) -> Mat2 {
        Mat2(self.0.clone().map(|e| e.substitute_reciprocal()))
    }

    pub fn pow(&self, n: u32) -> Mat2 {
        let mut acc = Mat2::identity(self.field());
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Smallest valuation of an entry at `place`.
    pub fn min_valuation(&self, place: &Place) -> Val {
        self.0.iter().map(|e| valuation(e, place)).min().unwrap()
    }

    pub fn is_scalar(&self) -> bool {
        self.0[1].is_zero() && self.0[2].is_zero() && self.0[0] == self.0[3]
    }

    /// Polynomial representative of the projective class: denominators
    /// cleared, content removed, leading coefficient of the first nonzero
    /// entry equal to 1.
    pub fn primitive_polys(&self) -> [Polynomial; 4] {
        let mut lcm = Polynomial::one(self.field());
        for e in &self.0 {
            let g = lcm.gcd(e.den());
            lcm = &lcm * &e.den().exact_div(&g);
        }
        let polys: Vec<Polynomial> = self.0.iter().map(|e| &e.num().clone() * &lcm.exact_div(e.den())).collect();
        let mut g = Polynomial::zero();
        for p in &polys {
            g = g.gcd(p);
        }
        let lead: Scalar = polys.iter().find(|p| !p.is_zero()).unwrap().exact_div(&g).lc().unwrap().inv();
        let out: Vec<Polynomial> = polys.iter().map(|p| p.exact_div(&g).scale(&lead)).collect();
        out.try_into().unwrap()
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = &self.0;
        write!(f, "[[{a}, {b}], [{c}, {d}]]")
    }
}
