//! Fixed points of finitely generated Jonquières groups on the restricted
//! product of fibre trees, with checkable certificates when there are none.
//!
//! Positive answers are always re-verified generator by generator. Negative
//! answers carry a witness element together with either a hyperbolic place
//! or a persistent fibre. Everything else is reported as inconclusive along
//! with the horizons that were exhausted.

pub mod local;
mod schreier;
pub mod words;

use std::collections::{BTreeSet, HashSet, VecDeque};

use serde::Serialize;

pub use local::local_translation_length;
pub use schreier::{finite_index_generators, Quotient};
pub use words::{reduced_words, Letter, Word};

use crate::error::{Error, Result};
use crate::fibretrees::{
    act_at, act_on_vertex, finite_orbit_center, nonbase_places, translation_length_at_place, JVertex,
};
use crate::fields::{Field, Place};
use crate::jonquieres::{
    orbit_index, orbit_model, parse_jonq, persistence_profile, persistent_fibre_certificate, singular_places, Hit,
    JonqElem, OrbitModel, PersistenceCertificate, PersistenceProof,
};
use crate::moebius::{classify_moebius, find_ns_place, fixed_points, Moebius, MoebiusClass};
use local::{local_common_fixed, LocalFixed};
use schreier::transversal;

/// Longest word tried when looking for a non-elliptic element.
const WITNESS_WORD_LENGTH: usize = 3;
/// Cap on the number of words enumerated in one search.
const WORD_CAP: usize = 20_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Horizons {
    /// Longest word searched for an element of infinite base order.
    pub word_length: usize,
    /// Largest finite image of ℏ (or place orbit) enumerated.
    pub closure: usize,
    /// Horizon handed to persistence certificates.
    pub certificate: usize,
}

impl Default for Horizons {
    fn default() -> Self {
        Horizons { word_length: 6, closure: 1000, certificate: 32 }
    }
}

impl Horizons {
    pub fn doubled(self) -> Self {
        Horizons { word_length: 2 * self.word_length, closure: 2 * self.closure, certificate: 2 * self.certificate }
    }
}

/// Named generators of G together with the marking z that plays the role of
/// the base vertex.
#[derive(Clone, Debug)]
pub struct GroupSpec {
    pub field: Field,
    pub names: Vec<String>,
    pub gens: Vec<JonqElem>,
    pub marking: JVertex,
}

fn default_name(i: usize) -> String {
    if i < 26 {
        ((b'a' + i as u8) as char).to_string()
    } else {
        format!("g{i}")
    }
}

impl GroupSpec {
    pub fn new(names: Vec<String>, gens: Vec<JonqElem>) -> Result<Self> {
        let Some(first) = gens.first() else { return Err(Error::invalid("a group needs at least one generator")) };
        let field = first.field();
        if gens.iter().any(|g| g.field() != field) {
            return Err(Error::invalid("generators live over different fields"));
        }
        if names.len() != gens.len() {
            return Err(Error::invalid("one name per generator"));
        }
        let distinct: HashSet<&String> = names.iter().collect();
        if distinct.len() != names.len() {
            return Err(Error::invalid("generator names must be distinct"));
        }
        Ok(GroupSpec { field, names, gens, marking: JVertex::base() })
    }

    /// Generators named a, b, c, ...
    pub fn from_elems(gens: Vec<JonqElem>) -> Result<Self> {
        let names = (0..gens.len()).map(default_name).collect();
        Self::new(names, gens)
    }

    pub fn parse(field: Field, gens: &[&str]) -> Result<Self> {
        Self::from_elems(gens.iter().map(|s| parse_jonq(s, field)).collect::<Result<_>>()?)
    }

    pub fn with_marking(mut self, z: JVertex) -> Self {
        self.marking = z;
        self
    }

    pub fn eval(&self, w: &Word) -> JonqElem {
        w.eval(&self.gens, self.field)
    }

    pub fn format(&self, w: &Word) -> String {
        w.format(&self.names)
    }

    pub(crate) fn hs(&self) -> Vec<Moebius> {
        self.gens.iter().map(|g| g.h().clone()).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    /// ℏ(G) is finite and nontrivial: kernel, then the finite orbit.
    FiniteOrbit,
    Abelian,
    Semisimple,
    Unipotent,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeneratorCheck {
    pub generator: String,
    pub fixed: bool,
    /// Places where g(v) and v differ.
    pub moved: Vec<Place>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum Certificate {
    /// fᵐ fixes the place and translates its tree by `length` (subdivided).
    PositiveTranslation { place: Place, length: u64, power: u64 },
    /// f has a persistent fibre over the place with respect to the marking.
    PersistentFibre { place: Place, certificate: PersistenceCertificate },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome")]
pub enum Outcome {
    FixedVertex {
        vertex: JVertex,
        transcript: Vec<GeneratorCheck>,
    },
    NoFixedPoint {
        witness: String,
        #[serde(skip)]
        word: Word,
        element: JonqElem,
        certificate: Certificate,
    },
    Inconclusive {
        diagnostics: Vec<String>,
        horizons: Horizons,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FixpointReport {
    pub route: Route,
    #[serde(flatten)]
    pub outcome: Outcome,
}

impl FixpointReport {
    pub fn fixed_vertex(&self) -> Option<&JVertex> {
        match &self.outcome {
            Outcome::FixedVertex { vertex, .. } => Some(vertex),
            _ => None,
        }
    }

    pub fn is_inconclusive(&self) -> bool {
        matches!(self.outcome, Outcome::Inconclusive { .. })
    }
}

/// Whether every generator fixes v, with the places each one moves.
pub fn verify_fixed(g: &GroupSpec, v: &JVertex) -> Result<(bool, Vec<GeneratorCheck>)> {
    let mut all = true;
    let mut transcript = Vec::with_capacity(g.gens.len());
    for (name, f) in g.names.iter().zip(&g.gens) {
        let image = act_on_vertex(f, v)?;
        let places: BTreeSet<&Place> = image.support().chain(v.support()).collect();
        let moved: Vec<Place> =
            places.into_iter().filter(|p| image.coordinate(p) != v.coordinate(p)).cloned().collect();
        all &= moved.is_empty();
        transcript.push(GeneratorCheck { generator: name.clone(), fixed: moved.is_empty(), moved });
    }
    Ok((all, transcript))
}

fn order_of(h: &Moebius) -> Option<u64> {
    match classify_moebius(h) {
        MoebiusClass::Identity => Some(1),
        MoebiusClass::FiniteOrder(n) => Some(n),
        _ => None,
    }
}

/// A proof that f fixes no vertex, with persistence measured against the
/// base vertex.
pub fn non_elliptic_witness(f: &JonqElem, horizon: usize) -> Result<Option<Certificate>> {
    non_elliptic_witness_marked(f, horizon, &JVertex::base())
}

/// As `non_elliptic_witness`, measuring persistence against the marking z.
/// Only conclusive certificates are returned.
pub fn non_elliptic_witness_marked(f: &JonqElem, horizon: usize, z: &JVertex) -> Result<Option<Certificate>> {
    if let Some(m) = order_of(f.h()) {
        // fᵐ lies over the identity, and f is elliptic iff fᵐ is
        let g = f.pow(m as i64);
        for place in sorted(nonbase_places(g.matrix())?) {
            let length = translation_length_at_place(g.matrix(), &place)?;
            if length > 0 {
                return Ok(Some(Certificate::PositiveTranslation { place, length, power: m }));
            }
        }
        return Ok(None);
    }
    let fixed = fixed_points(f.h())?;
    for place in &fixed {
        let length = local_translation_length(f, place)?;
        if length > 0 {
            return Ok(Some(Certificate::PositiveTranslation { place: place.clone(), length, power: 1 }));
        }
    }
    for place in singular_places(f, z)? {
        if fixed.contains(&place) {
            continue;
        }
        if let Some(c) = persistent_fibre_certificate(f, &place, horizon, z)? {
            if c.conclusive() {
                return Ok(Some(Certificate::PersistentFibre { place, certificate: c }));
            }
        }
    }
    Ok(None)
}

fn sorted(places: Vec<Place>) -> Vec<Place> {
    places.into_iter().collect::<BTreeSet<_>>().into_iter().collect()
}

/// Re-checks a certificate from scratch.
///
/// Translations are recomputed; a persistent fibre is checked directly for
/// l ≤ n ≤ 2·horizon and its recorded orbit hits are re-validated.
pub fn verify_certificate(f: &JonqElem, cert: &Certificate, horizon: usize, z: &JVertex) -> Result<bool> {
    match cert {
        Certificate::PositiveTranslation { place, length, power } => {
            let g = f.pow(*power as i64);
            let recomputed = if g.h().is_identity() {
                translation_length_at_place(g.matrix(), place)?
            } else {
                local_translation_length(&g, place)?
            };
            Ok(*length > 0 && recomputed == *length)
        }
        Certificate::PersistentFibre { place, certificate } => {
            let PersistenceProof::OrbitEscape { forward_hits, backward_hits, .. } = &certificate.proof else {
                return Ok(false);
            };
            let h = f.h();
            let sing = singular_places(f, z)?;
            let sing_inv = singular_places(&f.inverse(), z)?;
            if forward_hits.iter().any(|&n| !sing.contains(&h.pow(n).apply(place))) {
                return Ok(false);
            }
            if backward_hits.iter().any(|&n| !sing_inv.contains(&h.pow(-n).apply(place))) {
                return Ok(false);
            }
            let l = certificate.l;
            if forward_hits.iter().chain(backward_hits).any(|&n| n >= l as i64) {
                return Ok(false);
            }
            let profile = persistence_profile(f, place, z, (2 * horizon).max(l));
            Ok(l >= 1 && profile[l - 1..].iter().all(|&b| b))
        }
    }
}

/// Re-checks a report against its group: fixed vertices by `verify_fixed`,
/// witnesses by re-evaluating the word and the certificate.
pub fn verify_report(g: &GroupSpec, report: &FixpointReport, horizon: usize) -> Result<bool> {
    match &report.outcome {
        Outcome::FixedVertex { vertex, .. } => Ok(verify_fixed(g, vertex)?.0),
        Outcome::NoFixedPoint { word, element, certificate, .. } => {
            Ok(g.eval(word) == *element && verify_certificate(element, certificate, horizon, &g.marking)?)
        }
        Outcome::Inconclusive { .. } => Ok(true),
    }
}

/// Places in the ℏ(G)-orbit of o, each with a word w such that ℏ(w)(o) is
/// that place; None once the orbit outgrows the bound.
fn place_orbit(hs: &[Moebius], o: &Place, bound: usize) -> Option<Vec<(Place, Word)>> {
    let mut seen: HashSet<Place> = HashSet::from([o.clone()]);
    let mut out = vec![(o.clone(), Word::identity())];
    let mut head = 0;
    while head < out.len() {
        let (q, w) = out[head].clone();
        for (i, h) in hs.iter().enumerate() {
            for (img, letter) in [(h.apply(&q), Word::gen(i)), (h.inverse().apply(&q), Word::gen(i).inverse())] {
                if seen.insert(img.clone()) {
                    if out.len() == bound {
                        return None;
                    }
                    out.push((img, letter.concat(&w)));
                }
            }
        }
        head += 1;
    }
    Some(out)
}

/// A finite G-invariant set of vertices determines a fixed vertex: the
/// circumcenter of the coordinates at one place of each finite ℏ(G)-orbit,
/// carried around the orbit by G; on infinite orbits the coordinate is forced.
pub fn finite_orbit_fixpoint(g: &GroupSpec, orbit: &[JVertex]) -> Result<JVertex> {
    finite_orbit_fixpoint_bounded(g, orbit, Horizons::default().closure)
}

fn finite_orbit_fixpoint_bounded(g: &GroupSpec, orbit: &[JVertex], bound: usize) -> Result<JVertex> {
    if orbit.is_empty() {
        return Err(Error::PreconditionFailed("empty orbit".into()));
    }
    let members: HashSet<&JVertex> = orbit.iter().collect();
    for (name, f) in g.names.iter().zip(&g.gens) {
        for y in orbit {
            if !members.contains(&act_on_vertex(f, y)?) {
                return Err(Error::NotInvariant(format!("generator {name} moves {y} outside the set")));
            }
        }
    }
    let hs = g.hs();
    let support: BTreeSet<Place> = orbit.iter().flat_map(|y| y.support().cloned()).collect();
    let mut covered: BTreeSet<Place> = BTreeSet::new();
    let mut z = JVertex::base();
    for o in &support {
        if covered.contains(o) {
            continue;
        }
        let coords: Vec<_> = orbit.iter().map(|y| y.coordinate(o)).collect::<BTreeSet<_>>().into_iter().collect();
        match place_orbit(&hs, o, bound) {
            Some(places) => {
                let center = JVertex::base().with(finite_orbit_center(&coords)?);
                for (q, w) in places {
                    z.set(act_at(&g.eval(&w), &center, o));
                    covered.insert(q);
                }
            }
            None => {
                if coords.len() != 1 {
                    return Err(Error::ClosureBoundExceeded(bound));
                }
                z.set(coords[0].clone());
                covered.insert(o.clone());
            }
        }
    }
    if !verify_fixed(g, &z)?.0 {
        return Err(Error::Verification("finite-orbit construction is not fixed".into()));
    }
    Ok(z)
}

/// An element together with the word that produced it.
#[derive(Clone, Debug)]
struct Labeled {
    word: Word,
    elem: JonqElem,
}

enum Attempt {
    /// Candidate to be verified.
    Candidate(JVertex),
    /// A word that should act without fixed points.
    Witness(Word),
    Stuck(String),
}

fn label(g: &GroupSpec, words: Vec<Word>) -> Vec<Labeled> {
    let mut out: Vec<Labeled> = Vec::new();
    for word in words {
        let elem = g.eval(&word);
        if !elem.is_identity() && !out.iter().any(|l| l.elem == elem) {
            out.push(Labeled { word, elem });
        }
    }
    out
}

fn witness_word(elems: &[Labeled], ix: &[usize]) -> Word {
    ix.iter().fold(Word::identity(), |w, &i| w.concat(&elems[i].word))
}

/// Common fixed vertex of elements lying over the identity, or a word
/// among them (or a product of two) that is hyperbolic at some place.
fn vertical_fixpoint(elems: &[Labeled], marking: &JVertex) -> Result<std::result::Result<JVertex, Word>> {
    let mut places: BTreeSet<Place> = marking.support().cloned().collect();
    for l in elems {
        places.extend(nonbase_places(l.elem.matrix())?);
    }
    let gens: Vec<JonqElem> = elems.iter().map(|l| l.elem.clone()).collect();
    let mut z = marking.clone();
    for p in &places {
        match local_common_fixed(&gens, &marking.coordinate(p))? {
            LocalFixed::Fixed(v) => z.set(v),
            LocalFixed::Witness(ix) => return Ok(Err(witness_word(elems, &ix))),
        }
    }
    Ok(Ok(z))
}

/// ℏ(G) finite: a fixed vertex of the kernel, then its finite G-orbit.
fn finite_route(g: &GroupSpec, hz: &Horizons) -> Result<Attempt> {
    let hs = g.hs();
    let t = transversal(hs.len(), Moebius::identity(g.field), |m: &Moebius, i| hs[i].compose(m), hz.closure)?;
    let kernel = label(g, t.gens);
    let y = match vertical_fixpoint(&kernel, &g.marking)? {
        Ok(y) => y,
        Err(w) => return Ok(Attempt::Witness(w)),
    };
    let mut orbit: Vec<JVertex> = Vec::new();
    for (_, w) in &t.reps {
        let v = act_on_vertex(&g.eval(w), &y)?;
        if !orbit.contains(&v) {
            orbit.push(v);
        }
    }
    Ok(Attempt::Candidate(finite_orbit_fixpoint_bounded(g, &orbit, hz.closure)?))
}

/// n with hⁿ(p) = q, exactly when h has rational fixed points and by a
/// bounded scan otherwise.
fn orbit_offset(h: &Moebius, model: &OrbitModel, p: &Place, q: &Place, bound: usize) -> Option<i64> {
    if p.degree() != q.degree() {
        return None;
    }
    if let OrbitModel::Exact { t, dynamics } = model {
        match orbit_index(h, t, dynamics, p, q) {
            Hit::At(n) => return Some(n),
            Hit::Never => return None,
            Hit::Unknown => {}
        }
    }
    let hinv = h.inverse();
    let (mut fwd, mut bwd) = (p.clone(), p.clone());
    for n in 1..=bound as i64 {
        fwd = h.apply(&fwd);
        bwd = hinv.apply(&bwd);
        if fwd == *q {
            return Some(n);
        }
        if bwd == *q {
            return Some(-n);
        }
    }
    None
}

/// A vertex fixed by t (whose base map has infinite order), agreeing with
/// the marking away from finitely many places; Err explains a failure.
///
/// Along each infinite orbit through a singular place the coordinates are
/// pushed forward by t from the first singular place until past the last,
/// where they must rejoin the marking. At the fixed places of ℏ(t) the
/// marking coordinate is projected to the fixed subtree.
fn element_fixed_point(t: &JonqElem, m: &JVertex, bound: usize) -> Result<std::result::Result<JVertex, String>> {
    let h = t.h();
    let fixed: BTreeSet<Place> = fixed_points(h)?.into_iter().collect();
    let model = orbit_model(h);
    let sing: Vec<Place> = singular_places(t, m)?.into_iter().filter(|p| !fixed.contains(p)).collect();
    let mut z = m.clone();
    let mut seen: BTreeSet<Place> = BTreeSet::new();
    for p in &sing {
        if !seen.insert(p.clone()) {
            continue;
        }
        let mut offsets = vec![0i64];
        for q in &sing {
            if !seen.contains(q) {
                if let Some(n) = orbit_offset(h, &model, p, q, bound) {
                    offsets.push(n);
                    seen.insert(q.clone());
                }
            }
        }
        let (a, b) = (*offsets.iter().min().unwrap(), *offsets.iter().max().unwrap());
        let mut place = h.pow(a).apply(p);
        let mut cur = m.coordinate(&place);
        for j in a..=b {
            cur = act_at(t, &JVertex::base().with(cur), &place);
            place = h.apply(&place);
            if j < b {
                z.set(cur.clone());
            }
        }
        if cur != m.coordinate(&place) {
            return Ok(Err(format!("the orbit through {p} does not rejoin the marking")));
        }
    }
    for u in &fixed {
        if local_translation_length(t, u)? > 0 {
            return Ok(Err(format!("hyperbolic at the fixed place {u}")));
        }
        z.set(local::local_project(t, &m.coordinate(u))?);
    }
    if act_on_vertex(t, &z)? != z {
        return Ok(Err("orbit chains could not be matched within the bound".into()));
    }
    Ok(Ok(z))
}

/// A place r outside `avoid` and a word f with ℏ(f)(r) = u, if u's
/// ℏ(G)-orbit leaves `avoid`.
fn entry_word(hs: &[Moebius], u: &Place, avoid: &BTreeSet<Place>) -> Option<(Place, Word)> {
    let mut seen: HashSet<Place> = HashSet::from([u.clone()]);
    let mut queue = VecDeque::from([(u.clone(), Word::identity())]);
    while let Some((q, w)) = queue.pop_front() {
        for (i, h) in hs.iter().enumerate() {
            for (pre, letter) in [(h.inverse().apply(&q), Word::gen(i)), (h.apply(&q), Word::gen(i).inverse())] {
                let w2 = w.concat(&letter);
                if !avoid.contains(&pre) {
                    return Some((pre, w2));
                }
                if seen.insert(pre.clone()) {
                    queue.push_back((pre, w2));
                }
            }
        }
    }
    None
}

/// The construction around an element t with ℏ(t) of infinite order.
///
/// Let z be fixed by t. Off the fixed places F of ℏ(t) every ⟨ℏ(t)⟩-orbit
/// is infinite, so any vertex fixed by G agrees with z there. A place of F
/// reachable from outside F takes the coordinate transported from there;
/// on the ℏ(G)-invariant rest of F the coordinate is a fixed vertex of the
/// stabilizer, moved around its orbit. If G fixes anything, it fixes the
/// result.
fn element_route(g: &GroupSpec, t: &Labeled, hz: &Horizons) -> Result<Attempt> {
    let z = match element_fixed_point(&t.elem, &g.marking, hz.closure)? {
        Ok(z) => z,
        Err(reason) => {
            return Ok(if non_elliptic_witness_marked(&t.elem, hz.certificate, &g.marking)?.is_some() {
                Attempt::Witness(t.word.clone())
            } else {
                Attempt::Stuck(format!("no fixed vertex found for {}: {reason}", g.format(&t.word)))
            });
        }
    };
    let hs = g.hs();
    let fixed: BTreeSet<Place> = fixed_points(t.elem.h())?.into_iter().collect();
    let mut y = z.clone();
    let mut inner = Vec::new();
    for u in &fixed {
        match entry_word(&hs, u, &fixed) {
            Some((r, f)) => y.set(act_at(&g.eval(&f), &z, &r)),
            None => inner.push(u.clone()),
        }
    }
    let mut done: BTreeSet<Place> = BTreeSet::new();
    for o in &inner {
        if done.contains(o) {
            continue;
        }
        let tr = transversal(hs.len(), o.clone(), |q: &Place, i| hs[i].apply(q), hz.closure)?;
        let stab = label(g, tr.gens);
        let elems: Vec<JonqElem> = stab.iter().map(|l| l.elem.clone()).collect();
        match local_common_fixed(&elems, &z.coordinate(o))? {
            LocalFixed::Fixed(v) => {
                let v = JVertex::base().with(v);
                for (q, w) in &tr.reps {
                    y.set(act_at(&g.eval(w), &v, o));
                    done.insert(q.clone());
                }
            }
            LocalFixed::Witness(ix) => return Ok(Attempt::Witness(witness_word(&stab, &ix))),
        }
    }
    Ok(Attempt::Candidate(y))
}

/// Generators first, then reduced words in shortlex order; the first
/// certified element wins.
fn search_witness(g: &GroupSpec, hz: &Horizons) -> Result<Option<(Word, JonqElem, Certificate)>> {
    for w in reduced_words(g.gens.len(), WITNESS_WORD_LENGTH, WORD_CAP) {
        let e = g.eval(&w);
        if let Some(c) = non_elliptic_witness_marked(&e, hz.certificate, &g.marking)? {
            return Ok(Some((w, e, c)));
        }
    }
    Ok(None)
}

fn no_fixed_point(g: &GroupSpec, word: Word, element: JonqElem, certificate: Certificate) -> Outcome {
    Outcome::NoFixedPoint { witness: g.format(&word), word, element, certificate }
}

fn searched(g: &GroupSpec, hz: &Horizons, mut diagnostics: Vec<String>) -> Result<Outcome> {
    if let Some((w, e, c)) = search_witness(g, hz)? {
        return Ok(no_fixed_point(g, w, e, c));
    }
    diagnostics.push(format!("no certified witness among words of length at most {WITNESS_WORD_LENGTH}"));
    Ok(Outcome::Inconclusive { diagnostics, horizons: *hz })
}

fn conclude(g: &GroupSpec, attempt: Attempt, hz: &Horizons) -> Result<Outcome> {
    match attempt {
        Attempt::Candidate(y) => {
            let (ok, transcript) = verify_fixed(g, &y)?;
            if ok {
                return Ok(Outcome::FixedVertex { vertex: y, transcript });
            }
            let movers: Vec<&str> =
                transcript.iter().filter(|c| !c.fixed).map(|c| c.generator.as_str()).collect();
            searched(g, hz, vec![format!("the forced candidate {y} is moved by {}", movers.join(", "))])
        }
        Attempt::Witness(w) => {
            let e = g.eval(&w);
            match non_elliptic_witness_marked(&e, hz.certificate, &g.marking)? {
                Some(c) => Ok(no_fixed_point(g, w, e, c)),
                None => searched(g, hz, vec![format!("{} was expected to be non-elliptic", g.format(&w))]),
            }
        }
        Attempt::Stuck(reason) => searched(g, hz, vec![reason]),
    }
}

/// Turns the errors that only mean "outside what can be decided here" into
/// an inconclusive outcome.
fn soften(r: Result<Outcome>, hz: &Horizons) -> Result<Outcome> {
    match r {
        Err(e @ (Error::Unsupported(_) | Error::UnsupportedPlace(_) | Error::ClosureBoundExceeded(_))) => {
            Ok(Outcome::Inconclusive { diagnostics: vec![e.to_string()], horizons: *hz })
        }
        other => other,
    }
}

fn commuting(hs: &[Moebius]) -> bool {
    (0..hs.len()).all(|i| (i + 1..hs.len()).all(|j| hs[i].compose(&hs[j]) == hs[j].compose(&hs[i])))
}

/// Fixed vertex of a group whose base image ℏ(G) is abelian.
pub fn abelian_fixpoint(g: &GroupSpec) -> Result<FixpointReport> {
    let hz = Horizons::default();
    let hs = g.hs();
    if !commuting(&hs) {
        return Err(Error::PreconditionFailed("the base image is not abelian".into()));
    }
    let t = hs.iter().position(|h| order_of(h).is_none());
    let outcome = soften(
        (|| {
            let attempt = match t {
                // abelian and generated by elements of finite order: ℏ(G) is finite
                None => finite_route(g, &hz)?,
                Some(i) => element_route(g, &Labeled { word: Word::gen(i), elem: g.gens[i].clone() }, &hz)?,
            };
            conclude(g, attempt, &hz)
        })(),
        &hz,
    )?;
    Ok(FixpointReport { route: Route::Abelian, outcome })
}

/// Fixed vertex of G using an element t whose base map is semisimple of
/// infinite order.
pub fn semisimple_fixpoint(g: &GroupSpec, t: &Word) -> Result<FixpointReport> {
    let hz = Horizons::default();
    let elem = g.eval(t);
    if !matches!(classify_moebius(elem.h()), MoebiusClass::SemisimpleInfinite(_)) {
        return Err(Error::PreconditionFailed(format!("{} is not semisimple of infinite order", g.format(t))));
    }
    if g.field == Field::Rational {
        find_ns_place(elem.h()).map_err(|e| Error::PreconditionFailed(e.to_string()))?;
    }
    let lt = Labeled { word: t.clone(), elem };
    let outcome = soften(element_route(g, &lt, &hz).and_then(|a| conclude(g, a, &hz)), &hz)?;
    Ok(FixpointReport { route: Route::Semisimple, outcome })
}

/// The first semisimple word of infinite base order, else the first unipotent one.
fn find_infinite(g: &GroupSpec, hz: &Horizons) -> Option<(Route, Labeled)> {
    let hs = g.hs();
    let mut unipotent: Option<Word> = None;
    for w in reduced_words(hs.len(), hz.word_length, WORD_CAP) {
        match classify_moebius(&w.eval_h(&hs, g.field)) {
            MoebiusClass::SemisimpleInfinite(_) => {
                return Some((Route::Semisimple, Labeled { elem: g.eval(&w), word: w }));
            }
            MoebiusClass::UnipotentInfinite if unipotent.is_none() => unipotent = Some(w),
            _ => {}
        }
    }
    unipotent.map(|w| (Route::Unipotent, Labeled { elem: g.eval(&w), word: w }))
}

fn decent_once(g: &GroupSpec, hz: &Horizons) -> Result<FixpointReport> {
    let hs = g.hs();
    if hs.iter().all(|h| order_of(h).is_some()) {
        let route = if hs.iter().all(Moebius::is_identity) { Route::Abelian } else { Route::FiniteOrbit };
        match finite_route(g, hz) {
            Ok(a) => return Ok(FixpointReport { route, outcome: soften(conclude(g, a, hz), hz)? }),
            Err(Error::ClosureBoundExceeded(_)) => {}
            Err(e) => {
                return Ok(FixpointReport { route, outcome: soften(Err(e), hz)? });
            }
        }
    }
    match find_infinite(g, hz) {
        Some((route, t)) => {
            let outcome = soften(element_route(g, &t, hz).and_then(|a| conclude(g, a, hz)), hz)?;
            Ok(FixpointReport { route, outcome })
        }
        None => Ok(FixpointReport {
            route: Route::FiniteOrbit,
            outcome: Outcome::Inconclusive {
                diagnostics: vec![format!(
                    "base image has more than {} elements yet no word of length at most {} has infinite order",
                    hz.closure, hz.word_length
                )],
                horizons: *hz,
            },
        }),
    }
}

/// Decides whether G fixes a vertex, with default horizons.
pub fn decent_fixpoint(g: &GroupSpec) -> Result<FixpointReport> {
    decent_fixpoint_with(g, Horizons::default())
}

/// Runs the driver; an inconclusive answer is retried once with doubled horizons.
pub fn decent_fixpoint_with(g: &GroupSpec, hz: Horizons) -> Result<FixpointReport> {
    let first = decent_once(g, &hz)?;
    if !first.is_inconclusive() {
        return Ok(first);
    }
    decent_once(g, &hz.doubled())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fibretrees::VertexKind;
    use crate::fields::Polynomial;

    const Q: Field = Field::Rational;

    fn j(s: &str) -> JonqElem {
        parse_jonq(s, Q).unwrap()
    }

    fn place(c: &[i64]) -> Place {
        Place::Finite(Polynomial::from_ints(Q, c))
    }

    #[test]
    fn verify_fixed_examples() {
        let g = GroupSpec::parse(Q, &["(x, y)"]).unwrap();
        assert!(verify_fixed(&g, &JVertex::base()).unwrap().0);
        let g = GroupSpec::parse(Q, &["(2*x, y)"]).unwrap();
        assert!(verify_fixed(&g, &JVertex::base()).unwrap().0);
        let g = GroupSpec::parse(Q, &["(x, x*y)"]).unwrap();
        let (ok, tr) = verify_fixed(&g, &JVertex::base()).unwrap();
        assert!(!ok);
        assert!(tr[0].moved.contains(&place(&[0, 1])));
    }

    #[test]
    fn involution_orbit() {
        let g = GroupSpec::parse(Q, &["(1/x, y/x)"]).unwrap();
        let y1 = act_on_vertex(&g.gens[0], &JVertex::base()).unwrap();
        let z = finite_orbit_fixpoint(&g, &[JVertex::base(), y1.clone()]).unwrap();
        assert!(verify_fixed(&g, &z).unwrap().0);
        let support: Vec<&Place> = z.support().collect();
        assert_eq!(support, vec![&place(&[0, 1]), &Place::Infinity]);
        assert!(z.coordinates().all(|v| matches!(v.kind, VertexKind::Odd(..))));
        assert_eq!(finite_orbit_fixpoint(&g, &[JVertex::base()]), Err(Error::NotInvariant(
            format!("generator a moves base outside the set")
        )));
    }

    #[test]
    fn schreier_generators() {
        let g = GroupSpec::parse(Q, &["(1/x, y/x)", "(x, 2*y)"]).unwrap();
        let ws = finite_index_generators(&g, &Quotient::Horizontal, 100).unwrap();
        for w in &ws {
            assert!(g.eval(w).h().is_identity());
        }
        let names: Vec<String> = ws.iter().map(|w| g.format(w)).collect();
        assert!(names.contains(&"a*a".to_string()));
        assert!(names.contains(&"b".to_string()));
        let s = finite_index_generators(&g, &Quotient::PlaceStabilizer(place(&[0, 1])), 100).unwrap();
        assert!(s.iter().all(|w| g.eval(w).h().apply(&place(&[0, 1])) == place(&[0, 1])));
    }

    #[test]
    fn witness_examples() {
        let c = non_elliptic_witness(&j("(x, x*y)"), 32).unwrap().unwrap();
        assert_eq!(c, Certificate::PositiveTranslation { place: place(&[0, 1]), length: 2, power: 1 });
        let f = j("(2*x, y + 1/(x - 1))");
        match non_elliptic_witness(&f, 32).unwrap().unwrap() {
            Certificate::PersistentFibre { place: p, certificate } => {
                assert_eq!(p, place(&[-1, 1]));
                assert_eq!(certificate.l, 1);
                assert!(verify_certificate(&f, &Certificate::PersistentFibre { place: p, certificate }, 32, &JVertex::base()).unwrap());
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(non_elliptic_witness(&j("(x, y + 1/x)"), 32).unwrap(), None);
        // order two on the base, hyperbolic after squaring
        let c = non_elliptic_witness(&j("(-x, x*y)"), 32).unwrap().unwrap();
        assert!(matches!(c, Certificate::PositiveTranslation { power: 2, .. }));
        assert!(verify_certificate(&j("(-x, x*y)"), &c, 32, &JVertex::base()).unwrap());
    }

    #[test]
    fn abelian_examples() {
        let g = GroupSpec::parse(Q, &["(x, y + 1/x)", "(x, y + 1/(x - 1))"]).unwrap();
        let r = abelian_fixpoint(&g).unwrap();
        let v = r.fixed_vertex().expect("fixed vertex");
        assert_eq!(v.support().cloned().collect::<Vec<_>>(), vec![place(&[-1, 1]), place(&[0, 1])]);
        let g = GroupSpec::parse(Q, &["(x, x*y)"]).unwrap();
        match abelian_fixpoint(&g).unwrap().outcome {
            Outcome::NoFixedPoint { witness, certificate, .. } => {
                assert_eq!(witness, "a");
                assert_eq!(certificate, Certificate::PositiveTranslation { place: place(&[0, 1]), length: 2, power: 1 });
            }
            other => panic!("unexpected {other:?}"),
        }
        let g = GroupSpec::parse(Q, &["(x, y)"]).unwrap();
        assert!(abelian_fixpoint(&g).unwrap().fixed_vertex().unwrap().is_base());
        let g = GroupSpec::parse(Q, &["(x + 1, y)", "(1/x, y)"]).unwrap();
        assert!(matches!(abelian_fixpoint(&g), Err(Error::PreconditionFailed(_))));
    }

    #[test]
    fn semisimple_examples() {
        let g = GroupSpec::parse(Q, &["(2*x, y)"]).unwrap();
        let r = semisimple_fixpoint(&g, &Word::gen(0)).unwrap();
        assert!(r.fixed_vertex().unwrap().is_base());

        let phi = j("(x, x*y)");
        let gens = vec![j("(2*x, y)").conjugate_by(&phi).unwrap(), j("(x, 2*y)").conjugate_by(&phi).unwrap()];
        let z = act_on_vertex(&phi, &JVertex::base()).unwrap();
        let g = GroupSpec::from_elems(gens).unwrap().with_marking(z.clone());
        let r = semisimple_fixpoint(&g, &Word::gen(0)).unwrap();
        assert_eq!(r.fixed_vertex(), Some(&z));
        assert_eq!(z.support().cloned().collect::<Vec<_>>(), vec![place(&[0, 1]), Place::Infinity]);

        let g = GroupSpec::parse(Q, &["(2*x, y)", "(x, y + 1/(x - 1))"]).unwrap();
        let r = semisimple_fixpoint(&g, &Word::gen(0)).unwrap();
        match &r.outcome {
            Outcome::NoFixedPoint { witness, element, certificate, .. } => {
                assert_eq!(witness, "a*b");
                assert_eq!(*element, j("(2*x, y + 1/(x - 1))"));
                assert!(matches!(certificate, Certificate::PersistentFibre { .. }));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(verify_report(&g, &r, 32).unwrap());
        assert!(matches!(semisimple_fixpoint(&g, &Word::gen(1)), Err(Error::PreconditionFailed(_))));
    }

    #[test]
    fn remarking_moves_fixed_places() {
        // ℏ(G) = ⟨2x, x + 1⟩ moves 0 off the fixed places of 2x
        let g = GroupSpec::parse(Q, &["(2*x, y)", "(x + 1, y)"]).unwrap();
        let r = decent_fixpoint(&g).unwrap();
        assert_eq!(r.route, Route::Semisimple);
        assert!(r.fixed_vertex().unwrap().is_base());
        let phi = j("(x, (x^2 + 1)*y)");
        let gens: Vec<JonqElem> = g.gens.iter().map(|f| f.conjugate_by(&phi).unwrap()).collect();
        let z = act_on_vertex(&phi, &JVertex::base()).unwrap();
        let gc = GroupSpec::from_elems(gens).unwrap();
        let r = decent_fixpoint(&gc).unwrap();
        let v = r.fixed_vertex().expect("conjugate of a bounded group");
        assert!(verify_fixed(&gc, v).unwrap().0);
        let gm = gc.clone().with_marking(z.clone());
        assert_eq!(decent_fixpoint(&gm).unwrap().fixed_vertex(), Some(&z));
    }

    #[test]
    fn driver_examples() {
        let g = GroupSpec::parse(Q, &["(x, y + 1/x)", "(x, y + 1/(x - 1))"]).unwrap();
        assert!(decent_fixpoint(&g).unwrap().fixed_vertex().is_some());
        let g = GroupSpec::parse(Q, &["(x, y)"]).unwrap();
        assert!(decent_fixpoint(&g).unwrap().fixed_vertex().unwrap().is_base());
        let g = GroupSpec::parse(Q, &["(x + 1, y + x)"]).unwrap();
        let r = decent_fixpoint(&g).unwrap();
        assert_eq!(r.route, Route::Unipotent);
        assert!(!r.is_inconclusive());
        assert!(verify_report(&g, &r, 32).unwrap());
        let g = GroupSpec::parse(Q, &["(1/x, y/x)", "(x, x*y)"]).unwrap();
        let r = decent_fixpoint(&g).unwrap();
        assert_eq!(r.route, Route::FiniteOrbit);
        assert!(matches!(r.outcome, Outcome::NoFixedPoint { .. }));
        assert!(verify_report(&g, &r, 32).unwrap());
    }

    #[test]
    fn report_serializes() {
        let g = GroupSpec::parse(Q, &["(x, x*y)"]).unwrap();
        let s = serde_json::to_string(&decent_fixpoint(&g).unwrap()).unwrap();
        assert!(s.contains("\"outcome\":\"NoFixedPoint\""), "{s}");
        assert!(s.contains("\"witness\":\"a\""), "{s}");
    }
}
