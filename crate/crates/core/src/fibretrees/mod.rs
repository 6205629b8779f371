//! The per-fibre trees X_p and their restricted product.
//!
//! X_p is the barycentric subdivision of the lattice-class tree at p: even
//! vertices are lattice classes, odd vertices are edges between adjacent
//! classes. All distances are in the subdivided metric.

pub mod lattice;
pub mod mat;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

pub use lattice::{Lattice, Local};
pub use mat::Mat2;

use crate::error::{Error, Result};
use crate::fields::factor::irreducible_factors;
use crate::fields::{Field, Place};
use crate::jonquieres::JonqElem;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VertexKind {
    Even(Lattice),
    /// Adjacent classes, sorted.
    Odd(Lattice, Lattice),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeVertex {
    pub place: Place,
    pub kind: VertexKind,
}

impl TreeVertex {
    pub fn base(place: Place) -> Self {
        TreeVertex { place, kind: VertexKind::Even(Lattice::base()) }
    }

    pub fn even(place: Place, l: Lattice) -> Self {
        TreeVertex { place, kind: VertexKind::Even(l) }
    }

    fn odd(place: Place, a: Lattice, b: Lattice) -> Self {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        TreeVertex { place, kind: VertexKind::Odd(a, b) }
    }

    pub fn is_base(&self) -> bool {
        matches!(&self.kind, VertexKind::Even(l) if l.is_base())
    }

    pub fn is_even(&self) -> bool {
        matches!(self.kind, VertexKind::Even(_))
    }

    fn ends(&self) -> Vec<&Lattice> {
        match &self.kind {
            VertexKind::Even(l) => vec![l],
            VertexKind::Odd(a, b) => vec![a, b],
        }
    }
}

impl fmt::Display for TreeVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            VertexKind::Even(l) => write!(f, "{}: even {l}", self.place),
            VertexKind::Odd(a, b) => write!(f, "{}: odd {a} - {b}", self.place),
        }
    }
}

#[derive(Serialize)]
struct LatticeRecord {
    d: u32,
    u: String,
    flipped: bool,
}

impl From<&Lattice> for LatticeRecord {
    fn from(l: &Lattice) -> Self {
        LatticeRecord { d: l.depth, u: l.u.to_string(), flipped: l.flipped }
    }
}

#[derive(Serialize)]
struct VertexRecord<'a> {
    place: &'a Place,
    kind: &'static str,
    ends: Vec<LatticeRecord>,
}

impl Serialize for TreeVertex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let kind = if self.is_even() { "even" } else { "odd" };
        VertexRecord { place: &self.place, kind, ends: self.ends().into_iter().map(LatticeRecord::from).collect() }
            .serialize(s)
    }
}

/// Lattice class of the column span of a global matrix at a place.
pub fn canonicalize_lattice(m: &Mat2, place: &Place) -> Result<TreeVertex> {
    if m.det().is_zero() {
        return Err(Error::invalid("singular matrix"));
    }
    let loc = Local::new(place, m.field());
    Ok(TreeVertex::even(place.clone(), loc.class_of(m)))
}

fn nearest<'a>(loc: &Local, from: &'a [&'a Lattice], to: &Lattice) -> (&'a Lattice, u64) {
    from.iter().map(|l| (*l, loc.distance(l, to))).min_by_key(|&(_, d)| d).unwrap()
}

fn distance_in(loc: &Local, v: &TreeVertex, w: &TreeVertex) -> u64 {
    match (&v.kind, &w.kind) {
        (VertexKind::Even(a), VertexKind::Even(b)) => 2 * loc.distance(a, b),
        (VertexKind::Even(e), VertexKind::Odd(..)) | (VertexKind::Odd(..), VertexKind::Even(e)) => {
            let odd = if v.is_even() { w } else { v };
            2 * nearest(loc, &odd.ends(), e).1 + 1
        }
        (VertexKind::Odd(..), VertexKind::Odd(..)) => {
            if v == w {
                return 0;
            }
            let m = v.ends().iter().map(|a| nearest(loc, &w.ends(), a).1).min().unwrap();
            2 * m + 2
        }
    }
}

/// Base field recorded in the vertices; the rationals when nothing is recorded.
fn vertex_field(vs: &[&TreeVertex]) -> Field {
    vs.iter()
        .find_map(|v| v.ends().iter().find_map(|l| l.u.field()))
        .or_else(|| vs.iter().find_map(|v| v.place.poly().and_then(|p| p.field())))
        .unwrap_or(Field::Rational)
}

fn local_for(v: &TreeVertex, w: &TreeVertex) -> Local {
    Local::new(&v.place, vertex_field(&[v, w]))
}

/// Graph distance in the subdivided tree.
pub fn tree_distance(v: &TreeVertex, w: &TreeVertex) -> Result<u64> {
    if v.place != w.place {
        return Err(Error::PlaceMismatch);
    }
    Ok(distance_in(&local_for(v, w), v, w))
}

/// The vertex at subdivided distance `s` from `v` on the geodesic to `w`.
pub fn geodesic_point(v: &TreeVertex, w: &TreeVertex, s: u64) -> Result<TreeVertex> {
    if v.place != w.place {
        return Err(Error::PlaceMismatch);
    }
    let loc = local_for(v, w);
    let total = distance_in(&loc, v, w);
    if s > total {
        return Err(Error::PreconditionFailed("point beyond the end of the geodesic".into()));
    }
    if s == 0 {
        return Ok(v.clone());
    }
    if s == total {
        return Ok(w.clone());
    }
    let w_ends = w.ends();
    // leave an odd start through the endpoint nearer to w
    let (start, s) = match &v.kind {
        VertexKind::Even(l) => (l.clone(), s),
        VertexKind::Odd(..) => {
            let best = v.ends().into_iter().min_by_key(|a| nearest(&loc, &w_ends, a).1).unwrap().clone();
            (best, s - 1)
        }
    };
    let (end, n) = nearest(&loc, &w_ends, &start);
    let place = v.place.clone();
    if s > 2 * n {
        return Ok(w.clone());
    }
    Ok(if s % 2 == 0 {
        TreeVertex::even(place, loc.step_toward(&start, end, s / 2))
    } else {
        let a = loc.step_toward(&start, end, s / 2);
        let b = loc.step_toward(&start, end, s / 2 + 1);
        TreeVertex::odd(place, a, b)
    })
}

/// A·v for a matrix over k(x) acting on the tree at v's place.
pub fn apply_matrix(a: &Mat2, v: &TreeVertex) -> TreeVertex {
    let loc = Local::new(&v.place, a.field());
    let mut ends = v.ends().into_iter().map(|l| loc.apply(a, l));
    let first = ends.next().unwrap();
    match ends.next() {
        None => TreeVertex::even(v.place.clone(), first),
        Some(second) => TreeVertex::odd(v.place.clone(), first, second),
    }
}

/// 2·max(0, v(det A) − 2·v(tr A)).
pub fn translation_length_at_place(a: &Mat2, place: &Place) -> Result<u64> {
    if a.det().is_zero() {
        return Err(Error::invalid("singular matrix"));
    }
    Ok(2 * Local::new(place, a.field()).translation_length(a))
}

/// Projection of v to the fixed subtree of an elliptic A: the midpoint of [v, Av].
fn project_to_fixed(a: &Mat2, v: &TreeVertex) -> Result<TreeVertex> {
    let mut v = v.clone();
    loop {
        let av = apply_matrix(a, &v);
        let d = tree_distance(&v, &av)?;
        if d == 0 {
            return Ok(v);
        }
        if d % 2 == 1 {
            return Err(Error::Verification("odd displacement for an elliptic element".into()));
        }
        v = geodesic_point(&v, &av, d / 2)?;
    }
}

/// A vertex fixed by A, or None when A is hyperbolic at the place.
pub fn elliptic_fixed_vertex(a: &Mat2, place: &Place) -> Result<Option<TreeVertex>> {
    if translation_length_at_place(a, place)? > 0 {
        return Ok(None);
    }
    project_to_fixed(a, &TreeVertex::base(place.clone())).map(Some)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum CommonFixed {
    Fixed(TreeVertex),
    /// Indices of a product g_{i1}·g_{i2}·… with positive translation length.
    Witness { word: Vec<usize>, translation_length: u64 },
}

/// A vertex fixed by every matrix, or a hyperbolic word in them.
///
/// Fixed subtrees of elliptic elements intersect pairwise exactly when the
/// pairwise products are elliptic, and pairwise intersecting subtrees have a
/// common point. Projecting successively onto each fixed subtree stays inside
/// the earlier ones, so the last projection is a common fixed vertex.
pub fn common_fixed_vertex(gens: &[Mat2], place: &Place) -> Result<CommonFixed> {
    for (i, g) in gens.iter().enumerate() {
        let t = translation_length_at_place(g, place)?;
        if t > 0 {
            return Ok(CommonFixed::Witness { word: vec![i], translation_length: t });
        }
    }
    for i in 0..gens.len() {
        for j in i + 1..gens.len() {
            let t = translation_length_at_place(&gens[i].mul(&gens[j]), place)?;
            if t > 0 {
                return Ok(CommonFixed::Witness { word: vec![i, j], translation_length: t });
            }
        }
    }
    let mut v = TreeVertex::base(place.clone());
    for g in gens {
        v = project_to_fixed(g, &v)?;
    }
    for g in gens {
        if apply_matrix(g, &v) != v {
            return Err(Error::Verification("projection left the common fixed set".into()));
        }
    }
    Ok(CommonFixed::Fixed(v))
}

/// Circumcenter of a finite set of vertices at one place; on an odd
/// diameter the nearer of the two central vertices to the base is chosen.
pub fn finite_orbit_center(orbit: &[TreeVertex]) -> Result<TreeVertex> {
    let first = orbit.first().ok_or_else(|| Error::PreconditionFailed("empty orbit".into()))?;
    if orbit.iter().any(|v| v.place != first.place) {
        return Err(Error::PlaceMismatch);
    }
    let loc = Local::new(&first.place, vertex_field(&orbit.iter().collect::<Vec<_>>()));
    let mut best = (0, 0, 0);
    for i in 0..orbit.len() {
        for j in i + 1..orbit.len() {
            let d = distance_in(&loc, &orbit[i], &orbit[j]);
            if d > best.0 {
                best = (d, i, j);
            }
        }
    }
    let (d, i, j) = best;
    let (a, b) = (&orbit[i], &orbit[j]);
    let lo = geodesic_point(a, b, d / 2)?;
    if d % 2 == 0 {
        return Ok(lo);
    }
    let hi = geodesic_point(a, b, d / 2 + 1)?;
    let base = TreeVertex::base(first.place.clone());
    let key = |v: &TreeVertex| (distance_in(&loc, v, &base), v.clone());
    Ok(if key(&lo) <= key(&hi) { lo } else { hi })
}

/// A vertex of the restricted product: finitely many non-base coordinates.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct JVertex {
    coords: BTreeMap<Place, TreeVertex>,
}

impl JVertex {
    pub fn base() -> Self {
        Self::default()
    }

    pub fn coordinate(&self, place: &Place) -> TreeVertex {
        self.coords.get(place).cloned().unwrap_or_else(|| TreeVertex::base(place.clone()))
    }

    pub fn set(&mut self, v: TreeVertex) {
        if v.is_base() {
            self.coords.remove(&v.place);
        } else {
            self.coords.insert(v.place.clone(), v);
        }
    }

    pub fn with(mut self, v: TreeVertex) -> Self {
        self.set(v);
        self
    }

    pub fn support(&self) -> impl Iterator<Item = &Place> {
        self.coords.keys()
    }

    pub fn coordinates(&self) -> impl Iterator<Item = &TreeVertex> {
        self.coords.values()
    }

    pub fn is_base(&self) -> bool {
        self.coords.is_empty()
    }

    /// Sum of the per-place distances.
    pub fn distance(&self, other: &JVertex) -> Result<u64> {
        let places: BTreeSet<&Place> = self.support().chain(other.support()).collect();
        places.into_iter().map(|p| tree_distance(&self.coordinate(p), &other.coordinate(p))).sum()
    }
}

impl fmt::Display for JVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coords.is_empty() {
            return write!(f, "base");
        }
        let parts: Vec<String> = self.coords.values().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

impl Serialize for JVertex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.coords.len()))?;
        for v in self.coords.values() {
            seq.serialize_element(v)?;
        }
        seq.end()
    }
}

/// Places where the class of a global matrix differs from the base.
pub fn nonbase_places(m: &Mat2) -> Result<Vec<Place>> {
    let polys = m.primitive_polys();
    let prim = Mat2::from_polys(polys);
    let det = prim.det();
    let mut out = Vec::new();
    if !det.is_constant() {
        for p in irreducible_factors(det.num())? {
            out.push(Place::Finite(p));
        }
    }
    if !Local::new(&Place::Infinity, m.field()).class_of(m).is_base() {
        out.push(Place::Infinity);
    }
    Ok(out)
}

/// The coordinate of f(v) at h(P), computed from v's coordinate at P.
pub fn act_at(f: &JonqElem, v: &JVertex, place: &Place) -> TreeVertex {
    let h = f.h();
    let field = f.field();
    let target = h.apply(place);
    let src = Local::new(place, field);
    let dst = Local::new(&target, field);
    let hinv = h.inverse();
    let coord = v.coordinate(place);
    let mut ends = coord.ends().into_iter().map(|l| {
        let g = f.matrix().mul(&src.global_matrix(l)).substitute(&hinv);
        dst.class_of(&g)
    });
    let first = ends.next().unwrap();
    match ends.next() {
        None => TreeVertex::even(target, first),
        Some(second) => TreeVertex::odd(target, first, second),
    }
}

/// f(v), re-canonicalized with base coordinates dropped.
pub fn act_on_vertex(f: &JonqElem, v: &JVertex) -> Result<JVertex> {
    let h = f.h();
    let hinv = h.inverse();
    let mut sources: BTreeSet<Place> = v.support().cloned().collect();
    for q in nonbase_places(&f.matrix().substitute(&hinv))? {
        sources.insert(hinv.apply(&q));
    }
    let mut out = JVertex::base();
    for p in &sources {
        out.set(act_at(f, v, p));
    }
    Ok(out)
}
