use std::fmt;
use std::hash::{Hash, Hasher};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::bipoly::{fmt_homogeneous, BiPoly};
use crate::error::{Error, Result};
use crate::expr::{self, Bracket, Frac3, Poly3};
use crate::fields::{Field, Scalar};

/// A birational self-map of the projective plane, [f0 : f1 : f2].
///
/// Components are stored in the chart z = 1 together with the common degree
/// of the homogeneous forms; the exponent of z in a term is implied.
#[derive(Clone, Debug)]
pub struct CremonaMap {
    field: Field,
    degree: usize,
    comps: [BiPoly; 3],
    inverse: Option<Box<CremonaMap>>,
}

impl PartialEq for CremonaMap {
    fn eq(&self, o: &Self) -> bool {
        self.field == o.field && self.degree == o.degree && self.comps == o.comps
    }
}

impl Eq for CremonaMap {}

impl Hash for CremonaMap {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.degree.hash(h);
        self.comps.hash(h);
    }
}

impl CremonaMap {
    /// Normalizes chart components of formal degree `d`: removes the common
    /// factor of the homogeneous forms and fixes the scaling.
    pub fn from_chart(field: Field, d: usize, comps: [BiPoly; 3]) -> Result<Self> {
        if comps.iter().all(BiPoly::is_zero) {
            return Err(Error::NotDominant);
        }
        // power of z dividing all three forms
        let zpow = comps.iter().filter(|c| !c.is_zero()).map(|c| d - c.total_degree()).min().unwrap();
        let mut d = d - zpow;
        let mut comps = comps;
        if !comps.iter().any(|c| !c.is_zero() && c.is_constant()) {
            let nonzero: Vec<&BiPoly> = comps.iter().filter(|c| !c.is_zero()).collect();
            let mut g = nonzero[0].clone();
            for c in &nonzero[1..] {
                if g.is_constant() {
                    break;
                }
                g = g.gcd(c);
            }
            if !g.is_constant() {
                d -= g.total_degree();
                comps = comps.map(|c| if c.is_zero() { c } else { c.div_exact(&g).expect("gcd divides") });
            }
        }
        // first nonzero coefficient in (component, descending lex) order becomes 1
        let lead = comps
            .iter()
            .find(|c| !c.is_zero())
            .map(|c| c.lex_leading_coeff())
            .unwrap();
        if !lead.is_one() {
            let inv = lead.inv();
            comps = comps.map(|c| c.scale(&inv));
        }
        Ok(CremonaMap { field, degree: d, comps, inverse: None })
    }

    /// The map (x, y) ↦ (n1/d1, n2/d2) in the affine chart.
    pub fn from_affine(field: Field, n1: &BiPoly, d1: &BiPoly, n2: &BiPoly, d2: &BiPoly) -> Result<Self> {
        if d1.is_zero() || d2.is_zero() {
            return Err(Error::invalid("zero denominator"));
        }
        let g = d1.gcd(d2);
        let (e1, e2) = (d1.div_exact(&g).unwrap(), d2.div_exact(&g).unwrap());
        // common denominator l = d1 e2 = d2 e1
        let comps = [n1.mul(&e2), n2.mul(&e1), d1.mul(&e2)];
        let d = comps.iter().map(BiPoly::total_degree).max().unwrap();
        Self::from_chart(field, d, comps)
    }

    pub fn identity(field: Field) -> Self {
        CremonaMap { field, degree: 1, comps: [BiPoly::x(field), BiPoly::y(field), BiPoly::one(field)], inverse: None }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Components in the chart z = 1.
    pub fn chart(&self) -> &[BiPoly; 3] {
        &self.comps
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.field)
    }

    /// True when both affine components are polynomials.
    pub fn is_polynomial(&self) -> bool {
        self.comps[2].is_constant() && !self.comps[2].is_zero()
    }

    pub fn inverse(&self) -> Option<&CremonaMap> {
        self.inverse.as_deref()
    }

    /// Attaches a user-supplied inverse after checking both compositions.
    pub fn with_inverse(mut self, inv: CremonaMap) -> Result<Self> {
        if !self.compose(&inv)?.is_identity() || !inv.compose(&self)?.is_identity() {
            return Err(Error::invalid("supplied inverse does not invert the map"));
        }
        let mut inv = inv;
        inv.inverse = Some(Box::new(CremonaMap { inverse: None, ..self.clone() }));
        self.inverse = Some(Box::new(inv));
        Ok(self)
    }

    /// self ∘ g.
    pub fn compose(&self, g: &CremonaMap) -> Result<CremonaMap> {
        if self.field != g.field {
            return Err(Error::invalid("maps over different fields"));
        }
        let d = self.degree;
        // only the powers that actually occur in self
        let mut need = [0usize; 3];
        for f in &self.comps {
            for (i, j, _) in f.terms() {
                need[0] = need[0].max(i);
                need[1] = need[1].max(j);
                need[2] = need[2].max(d - i - j);
            }
        }
        let mut pows: Vec<Vec<BiPoly>> = Vec::with_capacity(3);
        for (c, &top) in g.comps.iter().zip(&need) {
            let mut v = vec![BiPoly::one(self.field)];
            for k in 1..=top {
                let next = v[k - 1].mul(c);
                v.push(next);
            }
            pows.push(v);
        }
        let mut out: Vec<BiPoly> = Vec::with_capacity(3);
        for f in &self.comps {
            let mut acc = BiPoly::zero(self.field);
            for (i, j, c) in f.terms() {
                let k = d - i - j;
                let t = pows[0][i].mul(&pows[1][j]).mul(&pows[2][k]).scale(c);
                acc = acc.add(&t);
            }
            out.push(acc);
        }
        let comps: [BiPoly; 3] = out.try_into().unwrap();
        let mut m = Self::from_chart(self.field, d * g.degree, comps)?;
        if let (Some(a), Some(b)) = (&g.inverse, &self.inverse) {
            m.inverse = Some(Box::new(a.compose(b)?.without_inverse()));
        }
        Ok(m)
    }

    fn without_inverse(mut self) -> Self {
        self.inverse = None;
        self
    }

    /// n-th iterate, n >= 1.
    pub fn iterate(&self, n: usize) -> Result<CremonaMap> {
        let mut g = self.clone();
        for _ in 1..n {
            g = self.compose(&g)?;
        }
        Ok(g)
    }

    /// Terms of the homogeneous component i.
    pub fn homogeneous_terms(&self, i: usize) -> Vec<(usize, usize, usize, Scalar)> {
        self.comps[i].homogeneous_terms(self.degree)
    }

    /// Reduction modulo a prime through the primitive integral triple.
    pub fn reduce_mod(&self, p: u64) -> Result<CremonaMap> {
        if self.field != Field::Rational {
            return Err(Error::Unsupported("reduction of maps not defined over Q".into()));
        }
        let mut lcm = BigInt::one();
        let mut content = BigInt::zero();
        for c in &self.comps {
            for (_, _, s) in c.terms() {
                let r = s.as_rational().unwrap();
                lcm = lcm.lcm(r.denom());
            }
        }
        for c in &self.comps {
            for (_, _, s) in c.terms() {
                let r = s.as_rational().unwrap() * BigRational::from_integer(lcm.clone());
                content = content.gcd(r.numer());
            }
        }
        let factor = Scalar::Rational(BigRational::new(lcm, content));
        let fp = Field::Prime(p);
        let comps = self.comps.clone().map(|c| c.scale(&factor));
        let mut out = Vec::with_capacity(3);
        for c in &comps {
            out.push(c.map_field(fp)?);
        }
        Self::from_chart(fp, self.degree, out.try_into().unwrap())
    }

    /// Affine form (F0/F2, F1/F2) as chart polynomials.
    pub fn affine_parts(&self) -> (&BiPoly, &BiPoly, &BiPoly) {
        (&self.comps[0], &self.comps[1], &self.comps[2])
    }
}

impl fmt::Display for CremonaMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..3 {
            if i > 0 {
                write!(f, " : ")?;
            }
            fmt_homogeneous(f, &self.homogeneous_terms(i))?;
        }
        write!(f, "]")
    }
}

/// Chart polynomial of a z-free sparse polynomial.
pub(crate) fn poly3_to_bipoly(p: &Poly3, field: Field, dehomogenize: bool) -> Result<BiPoly> {
    if !dehomogenize && p.degree_in(2) > 0 {
        return Err(Error::invalid("affine maps may only use x and y"));
    }
    Ok(BiPoly::from_terms(field, p.terms.iter().map(|(e, c)| (e[0] as usize, e[1] as usize, c.clone()))))
}

pub(crate) fn frac_to_bipolys(f: &Frac3, field: Field) -> Result<(BiPoly, BiPoly)> {
    Ok((poly3_to_bipoly(&f.num, field, false)?, poly3_to_bipoly(&f.den, field, false)?))
}

/// Parses an affine pair `(e1, e2)` in x, y or a homogeneous triple
/// `[f0 : f1 : f2]` (also accepted with parentheses and commas).
pub fn parse_map(text: &str, field: Field) -> Result<CremonaMap> {
    let (bracket, items) = expr::parse_tuple(text)?;
    let fracs = items.iter().map(|e| expr::eval(e, field)).collect::<Result<Vec<_>>>()?;
    match (bracket, fracs.len()) {
        (Bracket::Paren, 2) => {
            let (n1, d1) = frac_to_bipolys(&fracs[0], field)?;
            let (n2, d2) = frac_to_bipolys(&fracs[1], field)?;
            CremonaMap::from_affine(field, &n1, &d1, &n2, &d2)
        }
        (_, 3) => {
            let mut degree = None;
            let mut comps = Vec::new();
            for f in &fracs {
                let den = f.den.as_constant().flatten().ok_or_else(|| {
                    Error::invalid("homogeneous components must be polynomials")
                })?;
                let inv = den.inv();
                if let Some(d) = f.num.homogeneous_degree() {
                    if degree.is_some_and(|e| e != d) {
                        return Err(Error::invalid("components have different degrees"));
                    }
                    degree = Some(d);
                } else if !f.num.is_zero() {
                    return Err(Error::invalid("component is not homogeneous"));
                }
                comps.push(poly3_to_bipoly(&f.num, field, true)?.scale(&inv));
            }
            let d = degree.ok_or(Error::NotDominant)? as usize;
            CremonaMap::from_chart(field, d, comps.try_into().unwrap())
        }
        _ => Err(Error::invalid("expected an affine pair or a homogeneous triple")),
    }
}
