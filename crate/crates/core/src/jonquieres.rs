//! The Jonquières group: maps (x, y) ↦ (h(x), A(x)·y) with h ∈ PGL2(k) and
//! A ∈ PGL2(k(x)), plus biregularity and persistence over the base.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::cremona::map::frac_to_bipolys;
use crate::cremona::{BiPoly, CremonaMap};
use crate::error::{Error, Result};
use crate::expr::{self, Bracket};
use crate::fibretrees::{act_at, nonbase_places, JVertex, Mat2};
use crate::fields::intfactor::prime_factors;
use crate::fields::{Field, Place, Polynomial, Scalar};
use crate::moebius::{classify_moebius, fixed_points, padic_valuation, Moebius, MoebiusClass};

/// Horizontal part h and vertical part A, kept as a content-1 polynomial
/// matrix whose first nonzero entry has leading coefficient 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct JonqElem {
    h: Moebius,
    a: Mat2,
}

impl JonqElem {
    pub fn new(h: Moebius, a: &Mat2) -> Result<Self> {
        if a.det().is_zero() {
            return Err(Error::invalid("vertical part has zero determinant"));
        }
        let a = Mat2::from_polys(a.primitive_polys());
        // entries that happen to be rational are typed as Q
        if a.field() != h.field() && !(a.field() == Field::Rational && !matches!(h.field(), Field::Prime(_))) {
            return Err(Error::invalid("horizontal and vertical parts live over different fields"));
        }
        Ok(JonqElem { h, a })
    }

    pub fn identity(field: Field) -> Self {
        JonqElem { h: Moebius::identity(field), a: Mat2::identity(field) }
    }

    /// The purely vertical element (x, A(x)·y).
    pub fn vertical(a: &Mat2) -> Result<Self> {
        Self::new(Moebius::identity(a.field()), a)
    }

    pub fn field(&self) -> Field {
        self.h.field()
    }

    pub fn h(&self) -> &Moebius {
        &self.h
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.a
    }

    pub fn is_identity(&self) -> bool {
        self.h.is_identity() && self.a.is_scalar()
    }

    /// self ∘ other = (h₁∘h₂, A₁(h₂(x))·A₂(x)).
    pub fn compose(&self, other: &JonqElem) -> Result<JonqElem> {
        if self.field() != other.field() {
            return Err(Error::invalid("elements live over different fields"));
        }
        let a = self.a.substitute(&other.h).mul(&other.a);
        Self::new(self.h.compose(&other.h), &a)
    }

    /// (h⁻¹, A(h⁻¹(x))⁻¹).
    pub fn inverse(&self) -> JonqElem {
        let hinv = self.h.inverse();
        let a = self.a.substitute(&hinv).adjugate();
        Self::new(hinv, &a).expect("inverse of an invertible element")
    }

    pub fn pow(&self, n: i64) -> JonqElem {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = JonqElem::identity(self.field());
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&sq).unwrap();
            }
            e >>= 1;
            if e > 0 {
                sq = sq.compose(&sq).unwrap();
            }
        }
        acc
    }

    /// g ∘ self ∘ g⁻¹.
    pub fn conjugate_by(&self, g: &JonqElem) -> Result<JonqElem> {
        g.compose(self)?.compose(&g.inverse())
    }

    fn affine_parts(&self) -> (BiPoly, BiPoly, BiPoly, BiPoly) {
        let field = self.field();
        let [ha, hb, hc, hd] = self.h.entries();
        let n1 = BiPoly::from_rows(field, vec![Polynomial::new(vec![hb.clone(), ha.clone()])]);
        let d1 = BiPoly::from_rows(field, vec![Polynomial::new(vec![hd.clone(), hc.clone()])]);
        let [a, b, c, d] = &self.a.0;
        let n2 = BiPoly::from_rows(field, vec![b.num().clone(), a.num().clone()]);
        let d2 = BiPoly::from_rows(field, vec![d.num().clone(), c.num().clone()]);
        (n1, d1, n2, d2)
    }

    pub fn to_cremona(&self) -> Result<CremonaMap> {
        let (n1, d1, n2, d2) = self.affine_parts();
        CremonaMap::from_affine(self.field(), &n1, &d1, &n2, &d2)
    }

    /// Recovers the fibred form; fails when x ↦ x-coordinate is not a
    /// Möbius function of x alone or the fibre map is not linear fractional.
    pub fn from_cremona(g: &CremonaMap) -> Result<JonqElem> {
        let [f0, f1, f2] = g.chart();
        from_affine_parts(g.field(), f0, f2, f1, f2)
    }

    /// (deg, number of base points) with 2·deg − 1 base points for deg ≥ 2.
    pub fn degree(&self) -> Result<(usize, usize)> {
        let d = self.to_cremona()?.degree();
        Ok((d, if d >= 2 { 2 * d - 1 } else { 0 }))
    }
}

fn reduced(n: &BiPoly, d: &BiPoly) -> (BiPoly, BiPoly) {
    if n.is_zero() {
        return (n.clone(), BiPoly::one(d.field()));
    }
    let g = n.gcd(d);
    (n.div_exact(&g).unwrap(), d.div_exact(&g).unwrap())
}

fn row(p: &BiPoly, j: usize) -> Polynomial {
    p.rows().get(j).cloned().unwrap_or_default()
}

/// The Jonquières element with x-coordinate xn/xd and y-coordinate yn/yd.
fn from_affine_parts(field: Field, xn: &BiPoly, xd: &BiPoly, yn: &BiPoly, yd: &BiPoly) -> Result<JonqElem> {
    let (xn, xd) = reduced(xn, xd);
    if xn.y_degree() > 0 || xd.y_degree() > 0 || xn.x_degree() > 1 || xd.x_degree() > 1 {
        return Err(Error::NotJonquieres);
    }
    let (p, q) = (row(&xn, 0), row(&xd, 0));
    let h = Moebius::new(field, [p.coeff(1), p.coeff(0), q.coeff(1), q.coeff(0)]).map_err(|_| Error::NotJonquieres)?;
    let (yn, yd) = reduced(yn, yd);
    if yn.y_degree() > 1 || yd.y_degree() > 1 {
        return Err(Error::NotJonquieres);
    }
    let a = Mat2::from_polys([row(&yn, 1), row(&yn, 0), row(&yd, 1), row(&yd, 0)]);
    if a.det().is_zero() {
        return Err(Error::NotJonquieres);
    }
    JonqElem::new(h, &a)
}

/// Parses `(h(x), (a(x)*y + b(x))/(c(x)*y + d(x)))`.
pub fn parse_jonq(text: &str, field: Field) -> Result<JonqElem> {
    let (bracket, items) = expr::parse_tuple(text)?;
    if bracket != Bracket::Paren || items.len() != 2 {
        return Err(Error::invalid("expected a pair (h(x), (a*y+b)/(c*y+d))"));
    }
    let fx = expr::eval(&items[0], field)?;
    let fy = expr::eval(&items[1], field)?;
    if fx.uses(1) {
        return Err(Error::NotJonquieres);
    }
    let (xn, xd) = frac_to_bipolys(&fx, field)?;
    let (yn, yd) = frac_to_bipolys(&fy, field)?;
    from_affine_parts(field, &xn, &xd, &yn, &yd)
}

impl fmt::Display for JonqElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (_, _, n2, d2) = self.affine_parts();
        write!(f, "({}, ", self.h.as_rational_function())?;
        if d2.is_constant() {
            write!(f, "{})", n2.scale(&d2.coeff(0, 0).inv()))
        } else {
            write!(f, "({})/({}))", n2, d2)
        }
    }
}

impl Serialize for JonqElem {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Whether f(z) agrees with z at h(P).
pub fn is_biregular_over(f: &JonqElem, place: &Place, z: &JVertex) -> bool {
    act_at(f, z, place) == z.coordinate(&f.h().apply(place))
}

/// Places P over which f is singular with respect to z.
pub fn singular_places(f: &JonqElem, z: &JVertex) -> Result<BTreeSet<Place>> {
    let hinv = f.h().inverse();
    let mut targets: BTreeSet<Place> = nonbase_places(&f.matrix().substitute(&hinv))?.into_iter().collect();
    for p in z.support() {
        targets.insert(p.clone());
        targets.insert(f.h().apply(p));
    }
    Ok(targets
        .into_iter()
        .map(|q| hinv.apply(&q))
        .filter(|p| !is_biregular_over(f, p, z))
        .collect())
}

/// Dynamics of h used to locate places in an orbit exactly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EscapeDynamics {
    /// h is conjugate to w ↦ λw with rational fixed points.
    Multiplier { lambda: Scalar },
    /// h is conjugate to w ↦ w + c.
    Translation { step: Scalar },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PersistenceProof {
    /// The orbit of P meets the singular places of f at the listed indices
    /// only, so beyond them the behaviour of fⁿ and f⁻ⁿ over P is constant.
    OrbitEscape { dynamics: EscapeDynamics, forward_hits: Vec<i64>, backward_hits: Vec<i64> },
    /// Checked for l ≤ n ≤ horizon only.
    Horizon { horizon: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PersistenceCertificate {
    pub l: usize,
    pub proof: PersistenceProof,
}

impl PersistenceCertificate {
    pub fn conclusive(&self) -> bool {
        matches!(self.proof, PersistenceProof::OrbitEscape { .. })
    }
}

pub(crate) enum OrbitModel {
    Finite,
    /// t conjugates h to the normal form.
    Exact { t: Moebius, dynamics: EscapeDynamics },
    Unknown,
}

pub(crate) fn orbit_model(h: &Moebius) -> OrbitModel {
    let class = classify_moebius(h);
    if class.is_finite() {
        return OrbitModel::Finite;
    }
    let field = h.field();
    if field != Field::Rational {
        return OrbitModel::Unknown;
    }
    let Ok(fps) = fixed_points(h) else { return OrbitModel::Unknown };
    let one = field.one();
    let zero = field.zero();
    let coord = |p: &Place| if p.is_infinity() { Some(None) } else { p.rational_point().map(Some) };
    match class {
        MoebiusClass::UnipotentInfinite => {
            let Some(alpha) = fps.first().and_then(coord) else { return OrbitModel::Unknown };
            let t = match alpha {
                None => Moebius::identity(field),
                Some(a) => Moebius::new(field, [zero.clone(), one.clone(), one.clone(), -&a]).unwrap(),
            };
            let conj = t.compose(h).compose(&t.inverse());
            let step = conj.apply_point(Some(&zero)).expect("translation");
            OrbitModel::Exact { t, dynamics: EscapeDynamics::Translation { step } }
        }
        MoebiusClass::SemisimpleInfinite(_) => {
            if fps.len() != 2 {
                return OrbitModel::Unknown;
            }
            let (Some(alpha), Some(beta)) = (coord(&fps[0]), coord(&fps[1])) else { return OrbitModel::Unknown };
            // alpha ↦ 0, beta ↦ ∞
            let entries = match (alpha, beta) {
                (Some(a), Some(b)) => [one.clone(), -&a, one.clone(), -&b],
                (Some(a), None) => [one.clone(), -&a, zero.clone(), one.clone()],
                (None, Some(b)) => [zero.clone(), one.clone(), one.clone(), -&b],
                (None, None) => unreachable!(),
            };
            let t = Moebius::new(field, entries).unwrap();
            let conj = t.compose(h).compose(&t.inverse());
            let lambda = conj.apply_point(Some(&one)).expect("multiplier");
            OrbitModel::Exact { t, dynamics: EscapeDynamics::Multiplier { lambda } }
        }
        _ => OrbitModel::Unknown,
    }
}

pub(crate) enum Hit {
    At(i64),
    Never,
    Unknown,
}

/// Largest exponent tried when verifying a candidate orbit index.
const MAX_ORBIT_INDEX: i64 = 100_000;

fn rat(s: &Scalar) -> BigRational {
    s.as_rational().expect("rational scalar").clone()
}

/// The n with hⁿ(p) = b, if any.
pub(crate) fn orbit_index(h: &Moebius, t: &Moebius, dynamics: &EscapeDynamics, p: &Place, b: &Place) -> Hit {
    if p == b {
        return Hit::At(0);
    }
    let (pp, bb) = (t.apply(p), t.apply(b));
    let (Some(pq), Some(bq)) = (pp.poly(), bb.poly()) else { return Hit::Never };
    let m = pq.deg0();
    if bq.deg0() != m {
        return Hit::Never;
    }
    let candidate = match dynamics {
        EscapeDynamics::Multiplier { lambda } => {
            // roots scale by λⁿ, so the constant terms differ by λ^(n·m)
            let (p0, b0) = (rat(&pq.coeff(0)), rat(&bq.coeff(0)));
            if p0.is_zero() || b0.is_zero() {
                return Hit::Never;
            }
            let lam = rat(lambda);
            let Some(q) = prime_factors(lam.numer()).into_iter().chain(prime_factors(lam.denom())).next() else {
                return Hit::Unknown;
            };
            let vl = padic_valuation(&lam, &q) * m as i64;
            let vr = padic_valuation(&(b0 / p0), &q);
            if vr % vl != 0 {
                return Hit::Never;
            }
            vr / vl
        }
        EscapeDynamics::Translation { step } => {
            // p(w − n c) has w^(m−1) coefficient p_(m−1) − m n c
            let num = rat(&pq.coeff(m - 1)) - rat(&bq.coeff(m - 1));
            let n = num / (rat(step) * BigRational::from_integer(BigInt::from(m)));
            if !n.is_integer() {
                return Hit::Never;
            }
            match n.to_integer().to_i64() {
                Some(n) => n,
                None => return Hit::Unknown,
            }
        }
    };
    if candidate.abs() > MAX_ORBIT_INDEX {
        return Hit::Unknown;
    }
    if h.pow(candidate).apply(p) == *b {
        Hit::At(candidate)
    } else {
        Hit::Never
    }
}

/// Whether fⁿ is singular over P for n = 1..=count, pushing the coordinate
/// at P one fibre at a time instead of forming fⁿ.
pub fn power_singularity(f: &JonqElem, place: &Place, z: &JVertex, count: usize) -> Vec<bool> {
    let mut cur = z.coordinate(place);
    let mut at = place.clone();
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        cur = act_at(f, &JVertex::base().with(cur), &at);
        at = f.h().apply(&at);
        out.push(cur != z.coordinate(&at));
    }
    out
}

/// For n = 1..=count: fⁿ singular and f⁻ⁿ biregular over P.
pub fn persistence_profile(f: &JonqElem, place: &Place, z: &JVertex, count: usize) -> Vec<bool> {
    let fwd = power_singularity(f, place, z, count);
    let bwd = power_singularity(&f.inverse(), place, z, count);
    fwd.into_iter().zip(bwd).map(|(s, t)| s && !t).collect()
}

fn persists(f: &JonqElem, place: &Place, z: &JVertex, n: i64) -> bool {
    persistence_profile(f, place, z, n as usize)[n as usize - 1]
}

/// A proof that fⁿ is singular and f⁻ⁿ biregular over P for all n ≥ l.
///
/// When h has rational fixed points the indices where the orbit of P meets
/// the singular places of f and f⁻¹ are found exactly; past the last of
/// them nothing changes, so the answer is exact in both directions.
/// Otherwise the condition is only checked up to the horizon and the
/// certificate is flagged as non-conclusive.
pub fn persistent_fibre_certificate(
    f: &JonqElem,
    place: &Place,
    horizon: usize,
    z: &JVertex,
) -> Result<Option<PersistenceCertificate>> {
    if horizon == 0 {
        return Err(Error::PreconditionFailed("horizon must be at least 1".into()));
    }
    let h = f.h();
    if h.apply(place) == *place {
        return Ok(None);
    }
    match orbit_model(h) {
        OrbitModel::Finite => Ok(None),
        OrbitModel::Exact { t, dynamics } => {
            let mut forward = Vec::new();
            for b in singular_places(f, z)? {
                match orbit_index(h, &t, &dynamics, place, &b) {
                    Hit::At(n) => forward.push(n),
                    Hit::Never => {}
                    Hit::Unknown => return horizon_certificate(f, place, horizon, z),
                }
            }
            let mut backward = Vec::new();
            for b in singular_places(&f.inverse(), z)? {
                match orbit_index(h, &t, &dynamics, place, &b) {
                    Hit::At(n) => backward.push(-n),
                    Hit::Never => {}
                    Hit::Unknown => return horizon_certificate(f, place, horizon, z),
                }
            }
            forward.sort_unstable();
            backward.sort_unstable();
            let jmax = forward.iter().copied().filter(|&n| n >= 0).max();
            let Some(jmax) = jmax else { return Ok(None) };
            let kmax = backward.iter().copied().filter(|&n| n >= 0).max().unwrap_or(-1);
            let mut l = (jmax + 1).max(kmax + 1).max(1);
            if !persists(f, place, z, l) {
                return Ok(None);
            }
            while l > 1 && persists(f, place, z, l - 1) {
                l -= 1;
            }
            if l as usize > horizon {
                return Ok(None);
            }
            Ok(Some(PersistenceCertificate {
                l: l as usize,
                proof: PersistenceProof::OrbitEscape { dynamics, forward_hits: forward, backward_hits: backward },
            }))
        }
        OrbitModel::Unknown => horizon_certificate(f, place, horizon, z),
    }
}

fn horizon_certificate(f: &JonqElem, place: &Place, horizon: usize, z: &JVertex) -> Result<Option<PersistenceCertificate>> {
    let ok = persistence_profile(f, place, z, horizon);
    let tail = ok.iter().rev().take_while(|&&b| b).count();
    if tail == 0 {
        return Ok(None);
    }
    Ok(Some(PersistenceCertificate { l: horizon - tail + 1, proof: PersistenceProof::Horizon { horizon } }))
}

/// (deg, base-point count) of a Jonquières element.
pub fn jonq_degree(f: &JonqElem) -> Result<(usize, usize)> {
    f.degree()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cremona::parse_map;

    const Q: Field = Field::Rational;

    fn j(s: &str) -> JonqElem {
        parse_jonq(s, Q).unwrap()
    }

    fn place(c: &[i64]) -> Place {
        Place::Finite(Polynomial::from_ints(Q, c))
    }

    #[test]
    fn group_law() {
        let t = j("(x, x*y)");
        assert_eq!(t.compose(&t).unwrap(), j("(x, x^2*y)"));
        let f = j("(2*x + 1, (x*y + 1)/(y - x^2))");
        assert!(f.compose(&f.inverse()).unwrap().is_identity());
        assert!(f.inverse().compose(&f).unwrap().is_identity());
        assert_eq!(j("(x, 2*y)").conjugate_by(&j("(2*x, y)")).unwrap(), j("(x, 2*y)"));
        assert_eq!(f.pow(3), f.compose(&f).unwrap().compose(&f).unwrap());
        assert_eq!(f.pow(-2), f.inverse().compose(&f.inverse()).unwrap());
    }

    #[test]
    fn cremona_conversions() {
        let t = j("(x, x*y)");
        assert_eq!(t.to_cremona().unwrap().to_string(), "[x*z : x*y : z^2]");
        assert_eq!(JonqElem::from_cremona(&parse_map("[y : x : z]", Q).unwrap()), Err(Error::NotJonquieres));
        assert_eq!(JonqElem::from_cremona(&CremonaMap::identity(Q)).unwrap(), JonqElem::identity(Q));
        let f = j("(1/(x + 1), (x*y + 1)/(y - x^2))");
        assert_eq!(JonqElem::from_cremona(&f.to_cremona().unwrap()).unwrap(), f);
        assert_eq!(parse_jonq("(y, x)", Q), Err(Error::NotJonquieres));
    }

    #[test]
    fn display_round_trip() {
        for s in ["(x, x*y)", "(2*x + 1, (x*y + 1)/(y - x^2))", "(1/(x - 1), -y/3 + x)", "(x, 2*y)"] {
            let f = j(s);
            assert_eq!(j(&f.to_string()), f, "{s} printed as {f}");
        }
    }

    #[test]
    fn degrees() {
        assert_eq!(jonq_degree(&j("(x, x*y)")).unwrap(), (2, 3));
        assert_eq!(jonq_degree(&JonqElem::identity(Q)).unwrap(), (1, 0));
        assert_eq!(jonq_degree(&j("(x, y + 1/(x - 1))")).unwrap(), (2, 3));
    }

    #[test]
    fn singular_place_examples() {
        let base = JVertex::base();
        let s = singular_places(&j("(x, x*y)"), &base).unwrap();
        assert_eq!(s, [place(&[0, 1]), Place::Infinity].into_iter().collect());
        let s = singular_places(&j("(x, y + 1/(x - 1))"), &base).unwrap();
        assert_eq!(s, [place(&[-1, 1])].into_iter().collect());
        assert!(singular_places(&JonqElem::identity(Q), &base).unwrap().is_empty());
        let t = j("(x, x*y)");
        assert!(is_biregular_over(&t, &place(&[-1, 1]), &base));
        assert!(!is_biregular_over(&t, &place(&[0, 1]), &base));
    }

    #[test]
    fn persistence_examples() {
        let base = JVertex::base();
        let f = j("(2*x, y + 1/(x - 1))");
        let cert = persistent_fibre_certificate(&f, &place(&[-1, 1]), 5, &base).unwrap().unwrap();
        assert_eq!(cert.l, 1);
        assert!(cert.conclusive());
        assert_eq!(persistent_fibre_certificate(&j("(x, x*y)"), &place(&[0, 1]), 5, &base).unwrap(), None);
        assert_eq!(persistent_fibre_certificate(&JonqElem::identity(Q), &place(&[0, 1]), 5, &base).unwrap(), None);
        // the translation x ↦ x + 1 escapes as well
        let g = j("(x + 1, y + 1/x)");
        let cert = persistent_fibre_certificate(&g, &place(&[0, 1]), 5, &base).unwrap().unwrap();
        assert_eq!(cert.l, 1);
        assert!(cert.conclusive());
    }
}
