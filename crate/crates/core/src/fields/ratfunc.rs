use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use super::poly::Polynomial;
use super::scalar::{Field, Scalar};

/// Element of k(x) kept in lowest terms with a monic denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

impl RationalFunction {
    pub fn new(num: Polynomial, den: Polynomial) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            let one = Polynomial::constant(den.lc().unwrap().one_like());
            return RationalFunction { num, den: one };
        }
        let g = num.gcd(&den);
        let (mut num, mut den) = (num.exact_div(&g), den.exact_div(&g));
        let lc = den.lc().unwrap().clone();
        if !lc.is_one() {
            let inv = lc.inv();
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        RationalFunction { num, den }
    }

    pub fn from_poly(p: Polynomial) -> Self {
        let one = p.coeffs().first().map(Scalar::one_like).unwrap_or_else(|| Scalar::from_int(1));
        RationalFunction { num: p, den: Polynomial::constant(one) }
    }

    pub fn constant(c: Scalar) -> Self {
        Self::from_poly(Polynomial::constant(c))
    }

    pub fn zero(field: Field) -> Self {
        RationalFunction { num: Polynomial::zero(), den: Polynomial::one(field) }
    }

    pub fn one(field: Field) -> Self {
        Self::constant(field.one())
    }

    pub fn x(field: Field) -> Self {
        Self::from_poly(Polynomial::x(field))
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn into_parts(self) -> (Polynomial, Polynomial) {
        (self.num, self.den)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_one()
    }

    pub fn field(&self) -> Field {
        self.num.field().or(self.den.field()).unwrap_or(Field::Rational)
    }

    pub fn inv(&self) -> Self {
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        Self::new(self.num.scale(c), self.den.clone())
    }

    pub fn pow(&self, e: i64) -> Self {
        if e < 0 {
            return self.inv().pow(-e);
        }
        RationalFunction { num: self.num.pow(e as u32), den: self.den.pow(e as u32) }
    }

    /// r((a x + b)/(c x + d)).
    pub fn substitute_moebius(&self, a: &Scalar, b: &Scalar, c: &Scalar, d: &Scalar) -> Self {
        let lin_num = Polynomial::new(vec![b.clone(), a.clone()]);
        let lin_den = Polynomial::new(vec![d.clone(), c.clone()]);
        let (dn, dd) = (self.num.deg0(), self.den.deg0());
        let m = dn.max(dd);
        let num = self.num.homogeneous_substitute(&lin_num, &lin_den, m);
        let den = self.den.homogeneous_substitute(&lin_num, &lin_den, m);
        Self::new(num, den)
    }

    /// r(1/x).
    pub fn substitute_reciprocal(&self) -> Self {
        let m = self.num.deg0().max(self.den.deg0());
        Self::new(self.num.reversed(m), self.den.reversed(m))
    }

    pub fn eval(&self, x: &Scalar) -> Option<Scalar> {
        let d = self.den.eval(x);
        if d.is_zero() {
            None
        } else {
            Some(&self.num.eval(x) / &d)
        }
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl<'a> Add<&'a RationalFunction> for &'a RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: &'a RationalFunction) -> RationalFunction {
        if self.den == rhs.den {
            return RationalFunction::new(&self.num + &rhs.num, self.den.clone());
        }
        RationalFunction::new(&(&self.num * &rhs.den) + &(&rhs.num * &self.den), &self.den * &rhs.den)
    }
}

impl<'a> Neg for &'a RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction { num: -&self.num, den: self.den.clone() }
    }
}

impl<'a> Sub<&'a RationalFunction> for &'a RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: &'a RationalFunction) -> RationalFunction {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a RationalFunction> for &'a RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: &'a RationalFunction) -> RationalFunction {
        if self.is_zero() || rhs.is_zero() {
            return RationalFunction::zero(self.field());
        }
        // cross-cancel before multiplying
        let g1 = self.num.gcd(&rhs.den);
        let g2 = rhs.num.gcd(&self.den);
        let num = &self.num.exact_div(&g1) * &rhs.num.exact_div(&g2);
        let den = &self.den.exact_div(&g2) * &rhs.den.exact_div(&g1);
        let lc = den.lc().unwrap().clone();
        if lc.is_one() {
            RationalFunction { num, den }
        } else {
            let inv = lc.inv();
            RationalFunction { num: num.scale(&inv), den: den.scale(&inv) }
        }
    }
}

impl<'a> Div<&'a RationalFunction> for &'a RationalFunction {
    type Output = RationalFunction;
    fn div(self, rhs: &'a RationalFunction) -> RationalFunction {
        self * &rhs.inv()
    }
}

macro_rules! owned_rf_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<RationalFunction> for RationalFunction {
            type Output = RationalFunction;
            fn $m(self, rhs: RationalFunction) -> RationalFunction { (&self).$m(&rhs) }
        }
    )*};
}
owned_rf_ops!(Add add, Sub sub, Mul mul, Div div);

#[cfg(test)]
mod tests {
    use super::*;

    fn q(c: &[i64]) -> Polynomial {
        Polynomial::from_ints(Field::Rational, c)
    }

    #[test]
    fn lowest_terms() {
        let r = RationalFunction::new(&q(&[-1, 0, 1]) * &q(&[0, 2]), &q(&[-1, 1]) * &q(&[0, 0, 3]));
        assert_eq!(r.num(), &q(&[2, 2]).scale(&Scalar::rational(1, 3)));
        assert_eq!(r.den(), &q(&[0, 1]));
    }

    #[test]
    fn field_operations() {
        let a = RationalFunction::new(q(&[1]), q(&[0, 1]));
        let b = RationalFunction::new(q(&[1]), q(&[-1, 1]));
        let s = &a + &b;
        assert_eq!(s, RationalFunction::new(q(&[-1, 2]), q(&[0, -1, 1])));
        assert!((&(&s / &s) - &RationalFunction::one(Field::Rational)).is_zero());
    }

    #[test]
    fn moebius_substitution() {
        let r = RationalFunction::new(q(&[0, 0, 1]), q(&[-1, 1]));
        // x -> 2x + 1
        let one = Scalar::from_int(1);
        let s = r.substitute_moebius(&Scalar::from_int(2), &one, &Scalar::from_int(0), &one);
        assert_eq!(s, RationalFunction::new(q(&[1, 4, 4]), q(&[0, 2])));
        assert_eq!(r.substitute_reciprocal(), RationalFunction::new(q(&[-1]), q(&[0, -1, 1])));
    }
}
