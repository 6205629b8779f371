//! Homothety classes of rank-2 lattices over the local ring at a place.
//!
//! Everything here works in the local coordinate: x itself at a finite
//! place, t = 1/x at infinity. A primitive lattice of index π^d in O² is
//! O·v + π^d·O² for a primitive vector v, so a class is a depth d together
//! with a point of P¹(O/π^d), written [u : 1] or [1 : u] with π | u.

use std::fmt;

use super::mat::Mat2;
use crate::fields::{valuation, Field, Place, Polynomial, RationalFunction, Val};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lattice {
    pub depth: u32,
    /// Line [1 : u] instead of [u : 1].
    pub flipped: bool,
    /// Reduced modulo π^depth.
    pub u: Polynomial,
}

impl Lattice {
    pub fn base() -> Self {
        Lattice { depth: 0, flipped: false, u: Polynomial::zero() }
    }

    pub fn is_base(&self) -> bool {
        self.depth == 0
    }
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.depth == 0 {
            return write!(f, "(0)");
        }
        if self.flipped {
            write!(f, "({}, [1 : {}])", self.depth, self.u)
        } else {
            write!(f, "({}, [{} : 1])", self.depth, self.u)
        }
    }
}

/// Uniformizer and chart at a place.
#[derive(Clone, Debug)]
pub struct Local {
    pub pi: Polynomial,
    place: Place,
    reciprocal: bool,
    field: Field,
}

impl Local {
    pub fn new(place: &Place, field: Field) -> Self {
        match place {
            Place::Finite(p) => Local { pi: p.clone(), place: place.clone(), reciprocal: false, field },
            Place::Infinity => {
                let t = Polynomial::x(field);
                Local { pi: t.clone(), place: Place::Finite(t), reciprocal: true, field }
            }
        }
    }

    /// Global matrix to local coordinate and back (the chart change is an involution).
    pub fn chart(&self, m: &Mat2) -> Mat2 {
        if self.reciprocal {
            m.reciprocal()
        } else {
            m.clone()
        }
    }

    fn val(&self, r: &RationalFunction) -> Val {
        valuation(r, &self.place)
    }

    fn vmin(&self, m: &Mat2) -> i64 {
        m.min_valuation(&self.place).finite().expect("zero matrix")
    }

    fn pi_pow(&self, k: i64) -> RationalFunction {
        RationalFunction::from_poly(self.pi.clone()).pow(k)
    }

    fn reduce(&self, r: &RationalFunction, modulus: &Polynomial) -> Polynomial {
        let inv = r.den().inv_mod(modulus).expect("unit denominator");
        (r.num() * &inv).rem(modulus)
    }

    /// A column with a unit entry of a matrix with entries in O.
    fn primitive_column(&self, m: &Mat2) -> (RationalFunction, RationalFunction) {
        let [a, b, c, d] = &m.0;
        if self.val(a) == Val::Finite(0) || self.val(c) == Val::Finite(0) {
            (a.clone(), c.clone())
        } else {
            (b.clone(), d.clone())
        }
    }

    /// Class of the column span of a local matrix with nonzero determinant.
    pub fn canonicalize(&self, m: &Mat2) -> Lattice {
        let n = m.scale(&self.pi_pow(-self.vmin(m)));
        let d = self.val(&n.det()).finite().expect("singular matrix");
        debug_assert!(d >= 0);
        if d == 0 {
            return Lattice::base();
        }
        let modulus = self.pi.pow(d as u32);
        let (c1, c2) = self.primitive_column(&n);
        if self.val(&c2) == Val::Finite(0) {
            Lattice { depth: d as u32, flipped: false, u: self.reduce(&(&c1 / &c2), &modulus) }
        } else {
            Lattice { depth: d as u32, flipped: true, u: self.reduce(&(&c2 / &c1), &modulus) }
        }
    }

    /// Local representative matrix of a class.
    pub fn matrix(&self, l: &Lattice) -> Mat2 {
        let one = RationalFunction::one(self.field);
        let zero = RationalFunction::zero(self.field);
        let pd = self.pi_pow(l.depth as i64);
        let u = RationalFunction::from_poly(l.u.clone());
        if l.flipped {
            Mat2([one, zero, u, pd])
        } else {
            Mat2([pd, u, zero, one])
        }
    }

    /// Representative in the global coordinate x.
    pub fn global_matrix(&self, l: &Lattice) -> Mat2 {
        self.chart(&self.matrix(l))
    }

    /// Class of the span of a global matrix.
    pub fn class_of(&self, global: &Mat2) -> Lattice {
        self.canonicalize(&self.chart(global))
    }

    /// Number of elementary transformations between two classes.
    pub fn distance(&self, l1: &Lattice, l2: &Lattice) -> u64 {
        if l1 == l2 {
            return 0;
        }
        let n = self.matrix(l1).adjugate().mul(&self.matrix(l2));
        let dv = self.val(&n.det()).finite().unwrap();
        (dv - 2 * self.vmin(&n)) as u64
    }

    /// The class at distance k from l1 on the path to l2.
    pub fn step_toward(&self, l1: &Lattice, l2: &Lattice, k: u64) -> Lattice {
        if k == 0 {
            return l1.clone();
        }
        let m1 = self.matrix(l1);
        let n = m1.adjugate().mul(&self.matrix(l2));
        let n = n.scale(&self.pi_pow(-self.vmin(&n)));
        let (c1, c2) = self.primitive_column(&n);
        let pk = self.pi_pow(k as i64);
        let zero = RationalFunction::zero(self.field);
        let e = if self.val(&c2) == Val::Finite(0) {
            Mat2([c1, pk, c2, zero])
        } else {
            Mat2([c1, zero, c2, pk])
        };
        self.canonicalize(&m1.mul(&e))
    }

    /// The class A·L for a global matrix A.
    pub fn apply(&self, a: &Mat2, l: &Lattice) -> Lattice {
        self.canonicalize(&self.chart(a).mul(&self.matrix(l)))
    }

    /// Translation length of A on the (unsubdivided) tree.
    pub fn translation_length(&self, a: &Mat2) -> u64 {
        let a = self.chart(a);
        let vd = self.val(&a.det()).finite().expect("singular matrix");
        match self.val(&a.trace()) {
            Val::Infinite => 0,
            Val::Finite(vt) => (vd - 2 * vt).max(0) as u64,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: Field = Field::Rational;

    fn x() -> RationalFunction {
        RationalFunction::x(Q)
    }

    fn at_zero() -> Local {
        Local::new(&Place::point(Q.zero()), Q)
    }

    #[test]
    fn canonical_forms() {
        let loc = at_zero();
        assert!(loc.class_of(&Mat2::identity(Q)).is_base());
        let l = loc.class_of(&Mat2::diag(x(), RationalFunction::one(Q)));
        assert_eq!(l, Lattice { depth: 1, flipped: false, u: Polynomial::zero() });
        let l2 = loc.class_of(&Mat2::diag(RationalFunction::one(Q), x()));
        assert_eq!(l2, Lattice { depth: 1, flipped: true, u: Polynomial::zero() });
        let one = RationalFunction::one(Q);
        let m = Mat2([one.clone(), x().inv(), RationalFunction::zero(Q), one]);
        assert_eq!(loc.distance(&Lattice::base(), &loc.class_of(&m)), 2);
        assert_eq!(loc.distance(&l, &l2), 2);
    }

    #[test]
    fn representatives_round_trip() {
        let loc = at_zero();
        let l = Lattice { depth: 3, flipped: false, u: Polynomial::from_ints(Q, &[1, 2]) };
        assert_eq!(loc.canonicalize(&loc.matrix(&l)), l);
        let l = Lattice { depth: 2, flipped: true, u: Polynomial::from_ints(Q, &[0, 5]) };
        assert_eq!(loc.canonicalize(&loc.matrix(&l)), l);
    }

    #[test]
    fn geodesic_steps() {
        let loc = at_zero();
        let far = Lattice { depth: 3, flipped: false, u: Polynomial::from_ints(Q, &[1, 2, 3]) };
        for k in 0..=3 {
            let s = loc.step_toward(&Lattice::base(), &far, k);
            assert_eq!(loc.distance(&Lattice::base(), &s), k);
            assert_eq!(loc.distance(&s, &far), 3 - k);
        }
    }

    #[test]
    fn translation_lengths() {
        let loc = at_zero();
        let one = RationalFunction::one(Q);
        assert_eq!(loc.translation_length(&Mat2::diag(x(), one.clone())), 1);
        assert_eq!(loc.translation_length(&Mat2::diag(x(), x().inv())), 2);
        assert_eq!(loc.translation_length(&Mat2::from_ints(Q, [1, 1, 0, 1])), 0);
        let inf = Local::new(&Place::Infinity, Q);
        assert_eq!(inf.translation_length(&Mat2::diag(x(), one)), 1);
    }
}
