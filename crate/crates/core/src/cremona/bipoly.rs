use std::fmt;

use super::ntt;
use crate::fields::{Field, Polynomial, Scalar};

/// Dense polynomial in x and y, stored as coefficients of y^j in k[x].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BiPoly {
    field: Field,
    rows: Vec<Polynomial>,
}

/// Size above which products over NTT primes go through Kronecker substitution.
const NTT_THRESHOLD: usize = 2048;

impl BiPoly {
    pub fn from_rows(field: Field, mut rows: Vec<Polynomial>) -> Self {
        while rows.last().is_some_and(Polynomial::is_zero) {
            rows.pop();
        }
        BiPoly { field, rows }
    }

    pub fn zero(field: Field) -> Self {
        BiPoly { field, rows: Vec::new() }
    }

    pub fn constant(c: Scalar, field: Field) -> Self {
        Self::from_rows(field, vec![Polynomial::constant(c)])
    }

    pub fn one(field: Field) -> Self {
        Self::constant(field.one(), field)
    }

    pub fn x(field: Field) -> Self {
        Self::from_rows(field, vec![Polynomial::x(field)])
    }

    pub fn y(field: Field) -> Self {
        Self::from_rows(field, vec![Polynomial::zero(), Polynomial::one(field)])
    }

    /// Builds from (i, j, c) meaning c x^i y^j.
    pub fn from_terms(field: Field, terms: impl IntoIterator<Item = (usize, usize, Scalar)>) -> Self {
        let mut dense: Vec<Vec<Scalar>> = Vec::new();
        for (i, j, c) in terms {
            if dense.len() <= j {
                dense.resize(j + 1, Vec::new());
            }
            let row = &mut dense[j];
            if row.len() <= i {
                row.resize(i + 1, field.zero());
            }
            row[i] = &row[i] + &c;
        }
        Self::from_rows(field, dense.into_iter().map(Polynomial::new).collect())
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> &[Polynomial] {
        &self.rows
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.rows.len() <= 1 && self.rows.first().is_none_or(Polynomial::is_constant)
    }

    pub fn y_degree(&self) -> usize {
        self.rows.len().saturating_sub(1)
    }

    pub fn x_degree(&self) -> usize {
        self.rows.iter().map(Polynomial::deg0).max().unwrap_or(0)
    }

    /// Total degree; 0 for the zero polynomial.
    pub fn total_degree(&self) -> usize {
        self.rows.iter().enumerate().filter(|(_, r)| !r.is_zero()).map(|(j, r)| j + r.deg0()).max().unwrap_or(0)
    }

    pub fn coeff(&self, i: usize, j: usize) -> Scalar {
        self.rows.get(j).map(|r| r.coeff(i)).unwrap_or_else(|| self.field.zero())
    }

    /// Nonzero terms as (i, j, c).
    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, &Scalar)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(j, r)| r.coeffs().iter().enumerate().filter(|(_, c)| !c.is_zero()).map(move |(i, c)| (i, j, c)))
    }

    pub fn term_count(&self) -> usize {
        self.terms().count()
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        Self::from_rows(self.field, self.rows.iter().map(|r| r.scale(c)).collect())
    }

    pub fn neg(&self) -> Self {
        BiPoly { field: self.field, rows: self.rows.iter().map(|r| -r).collect() }
    }

    pub fn add(&self, o: &BiPoly) -> Self {
        let n = self.rows.len().max(o.rows.len());
        let zero = Polynomial::zero();
        let rows = (0..n).map(|j| self.rows.get(j).unwrap_or(&zero) + o.rows.get(j).unwrap_or(&zero)).collect();
        Self::from_rows(self.field, rows)
    }

    pub fn sub(&self, o: &BiPoly) -> Self {
        self.add(&o.neg())
    }

    /// Multiplication by x^a y^b.
    pub fn shift(&self, a: usize, b: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut rows = vec![Polynomial::zero(); b];
        rows.extend(self.rows.iter().map(|r| r.shift(a)));
        Self::from_rows(self.field, rows)
    }

    pub fn mul(&self, o: &BiPoly) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero(self.field);
        }
        if let Field::Prime(p) = self.field {
            let (s, t) = (self.term_count(), o.term_count());
            let len = (self.rows.len() + o.rows.len()) * (self.x_degree() + o.x_degree() + 1);
            if ntt::primitive_root(p).is_some()
                && s.min(t) > 64
                && s.saturating_mul(t) > NTT_THRESHOLD * 16
                && len <= ntt::max_len(p)
            {
                return self.mul_kronecker(o, p);
            }
        }
        let mut rows = vec![Polynomial::zero(); self.rows.len() + o.rows.len() - 1];
        for (j1, r1) in self.rows.iter().enumerate() {
            if r1.is_zero() {
                continue;
            }
            for (j2, r2) in o.rows.iter().enumerate() {
                if r2.is_zero() {
                    continue;
                }
                rows[j1 + j2] = &rows[j1 + j2] + &(r1 * r2);
            }
        }
        Self::from_rows(self.field, rows)
    }

    fn packed(&self, stride: usize) -> Vec<u64> {
        let mut v = vec![0u64; self.rows.len() * stride];
        for (j, r) in self.rows.iter().enumerate() {
            for (i, c) in r.coeffs().iter().enumerate() {
                if let Scalar::Prime { value, .. } = c {
                    v[j * stride + i] = *value;
                }
            }
        }
        v
    }

    fn mul_kronecker(&self, o: &BiPoly, p: u64) -> Self {
        let stride = self.x_degree() + o.x_degree() + 1;
        let a = self.packed(stride);
        let prod = if self == o { ntt::multiply(&a, &a, p) } else { ntt::multiply(&a, &o.packed(stride), p) };
        let rows = prod
            .chunks(stride)
            .map(|chunk| Polynomial::new(chunk.iter().map(|&v| Scalar::Prime { value: v, modulus: p }).collect()))
            .collect();
        Self::from_rows(self.field, rows)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.field);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Content in k[x] (monic gcd of the rows).
    pub fn content(&self) -> Polynomial {
        let mut g = Polynomial::zero();
        for r in &self.rows {
            g = g.gcd(r);
            if g.is_one() {
                break;
            }
        }
        g
    }

    fn div_rows(&self, d: &Polynomial) -> Self {
        Self::from_rows(self.field, self.rows.iter().map(|r| r.exact_div(d)).collect())
    }

    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.div_rows(&self.content())
    }

    fn lead_row(&self) -> &Polynomial {
        self.rows.last().expect("zero polynomial")
    }

    /// Pseudo-remainder with respect to y.
    fn prem(&self, b: &BiPoly) -> Self {
        let lb = b.lead_row();
        let db = b.y_degree();
        let mut a = self.clone();
        while !a.is_zero() && a.y_degree() >= db {
            let shift = a.y_degree() - db;
            let la = a.lead_row().clone();
            let lb_poly = BiPoly::from_rows(self.field, vec![lb.clone()]);
            let la_poly = BiPoly::from_rows(self.field, vec![la]);
            a = lb_poly.mul(&a).sub(&la_poly.mul(&b.shift(0, shift)));
        }
        a
    }

    /// Scales so the leading coefficient (highest y power, then highest x power) is 1.
    pub fn normalized(&self) -> Self {
        match self.rows.last().and_then(|r| r.lc()) {
            Some(c) if !c.is_one() => self.scale(&c.inv()),
            _ => self.clone(),
        }
    }

    pub fn gcd(&self, o: &BiPoly) -> Self {
        if self.is_zero() {
            return o.normalized();
        }
        if o.is_zero() {
            return self.normalized();
        }
        let content = self.content().gcd(&o.content());
        let mut a = self.primitive_part();
        let mut b = o.primitive_part();
        if a.y_degree() < b.y_degree() {
            std::mem::swap(&mut a, &mut b);
        }
        let g = loop {
            if b.y_degree() == 0 {
                break BiPoly::one(self.field);
            }
            let r = a.prem(&b);
            if r.is_zero() {
                break b;
            }
            a = b;
            b = r.primitive_part();
        };
        BiPoly::from_rows(self.field, vec![content]).mul(&g).normalized()
    }

    /// Exact quotient, `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &BiPoly) -> Option<Self> {
        assert!(!d.is_zero(), "division by zero");
        let ld = d.lead_row();
        let dd = d.y_degree();
        let mut a = self.clone();
        let mut q = vec![Polynomial::zero(); self.rows.len().saturating_sub(dd).max(1)];
        while !a.is_zero() {
            if a.y_degree() < dd {
                return None;
            }
            let shift = a.y_degree() - dd;
            let (c, r) = a.lead_row().div_rem(ld);
            if !r.is_zero() {
                return None;
            }
            a = a.sub(&BiPoly::from_rows(self.field, vec![c.clone()]).mul(&d.shift(0, shift)));
            q[shift] = &q[shift] + &c;
        }
        Some(Self::from_rows(self.field, q))
    }

    /// Substitutes x ↦ x/z, y ↦ y/z and multiplies by z^m, returning terms
    /// (i, j, k, c) of the homogeneous form, highest power of y first.
    pub fn homogeneous_terms(&self, m: usize) -> Vec<(usize, usize, usize, Scalar)> {
        let mut t: Vec<_> = self.terms().map(|(i, j, c)| (i, j, m - i - j, c.clone())).collect();
        t.sort_by(|a, b| (b.1, b.0).cmp(&(a.1, a.0)));
        t
    }

    /// Coefficient of the term with the largest (x-exponent, y-exponent).
    pub fn lex_leading_coeff(&self) -> Scalar {
        let (_, _, c) = self.terms().max_by_key(|&(i, j, _)| (i, j)).expect("zero polynomial");
        c.clone()
    }

    pub fn eval(&self, x: &Scalar, y: &Scalar) -> Scalar {
        let mut acc = self.field.zero();
        for r in self.rows.iter().rev() {
            acc = &(&acc * y) + &r.eval(x);
        }
        acc
    }

    /// Coerces all coefficients into another field.
    pub fn map_field(&self, field: Field) -> crate::error::Result<Self> {
        let mut rows = Vec::with_capacity(self.rows.len());
        for r in &self.rows {
            let mut c = Vec::with_capacity(r.coeffs().len());
            for s in r.coeffs() {
                c.push(field.coerce(s)?);
            }
            rows.push(Polynomial::new(c));
        }
        Ok(Self::from_rows(field, rows))
    }
}

fn fmt_monomial(f: &mut fmt::Formatter<'_>, c: &Scalar, exps: &[(usize, &str)], first: bool) -> fmt::Result {
    let vars: Vec<String> = exps
        .iter()
        .filter(|(e, _)| *e > 0)
        .map(|(e, v)| if *e == 1 { v.to_string() } else { format!("{v}^{e}") })
        .collect();
    let s = c.to_string();
    let (neg, mag) = match s.strip_prefix('-') {
        Some(rest) if !matches!(c, Scalar::Quad { .. }) => (true, rest.to_string()),
        _ => (false, s),
    };
    if first {
        if neg {
            write!(f, "-")?;
        }
    } else {
        write!(f, "{}", if neg { " - " } else { " + " })?;
    }
    let unit = mag == "1";
    if vars.is_empty() {
        write!(f, "{mag}")
    } else if unit {
        write!(f, "{}", vars.join("*"))
    } else {
        write!(f, "{mag}*{}", vars.join("*"))
    }
}

/// Writes a homogeneous form given by its terms.
pub(crate) fn fmt_homogeneous(f: &mut fmt::Formatter<'_>, terms: &[(usize, usize, usize, Scalar)]) -> fmt::Result {
    if terms.is_empty() {
        return write!(f, "0");
    }
    for (n, (i, j, k, c)) in terms.iter().enumerate() {
        fmt_monomial(f, c, &[(*i, "x"), (*j, "y"), (*k, "z")], n == 0)?;
    }
    Ok(())
}

impl fmt::Display for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut t: Vec<_> = self.terms().collect();
        if t.is_empty() {
            return write!(f, "0");
        }
        t.sort_by(|a, b| (b.0 + b.1, b.0).cmp(&(a.0 + a.1, a.0)));
        for (n, (i, j, c)) in t.iter().enumerate() {
            fmt_monomial(f, c, &[(*i, "x"), (*j, "y")], n == 0)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: Field = Field::Rational;

    fn bp(terms: &[(usize, usize, i64)]) -> BiPoly {
        BiPoly::from_terms(Q, terms.iter().map(|&(i, j, c)| (i, j, Scalar::from_int(c))))
    }

    #[test]
    fn gcd_of_products() {
        let g = bp(&[(1, 1, 1), (0, 0, 1)]); // xy + 1
        let a = g.mul(&bp(&[(1, 0, 1), (0, 1, 1)]));
        let b = g.mul(&bp(&[(2, 0, 1), (0, 0, -3)]));
        assert_eq!(a.gcd(&b), g);
        assert_eq!(a.div_exact(&g).unwrap(), bp(&[(1, 0, 1), (0, 1, 1)]));
        assert!(a.div_exact(&bp(&[(1, 0, 1), (0, 0, 1)])).is_none());
    }

    #[test]
    fn gcd_with_pure_x_content() {
        let a = bp(&[(2, 1, 1), (1, 0, 1)]); // x(xy + 1)
        let b = bp(&[(1, 2, 1)]); // x y²
        assert_eq!(a.gcd(&b), bp(&[(1, 0, 1)]));
        assert_eq!(bp(&[(0, 1, 1)]).gcd(&bp(&[(1, 0, 1)])), BiPoly::one(Q));
    }

    #[test]
    fn kronecker_matches_schoolbook() {
        let f = Field::Prime(998_244_353);
        let mut terms = Vec::new();
        for i in 0..40usize {
            for j in 0..(40 - i) {
                terms.push((i, j, f.int(((i * 31 + j * 17) % 13) as i64 - 6)));
            }
        }
        let a = BiPoly::from_terms(f, terms);
        let fast = a.mul(&a);
        let mut slow = vec![Polynomial::zero(); 2 * a.rows.len() - 1];
        for (j1, r1) in a.rows.iter().enumerate() {
            for (j2, r2) in a.rows.iter().enumerate() {
                slow[j1 + j2] = &slow[j1 + j2] + &(r1 * r2);
            }
        }
        assert_eq!(fast, BiPoly::from_rows(f, slow));
    }

    #[test]
    fn display() {
        assert_eq!(bp(&[(0, 2, 1), (1, 0, -1)]).to_string(), "y^2 - x");
    }
}
