//! The tree X_u as a space acted on by elements whose base map fixes u.
//!
//! When ℏ(g) fixes u but is not the identity, g acts on X_u semilinearly,
//! so translation lengths come from displacements rather than from the
//! matrix trace.

use crate::error::{Error, Result};
use crate::fibretrees::{act_at, geodesic_point, tree_distance, JVertex, TreeVertex};
use crate::fields::Place;
use crate::jonquieres::JonqElem;

/// Projections needed before giving up on an elliptic element.
const PROJECTION_STEPS: usize = 64;

pub(crate) fn act_local(g: &JonqElem, v: &TreeVertex) -> TreeVertex {
    debug_assert_eq!(g.h().apply(&v.place), v.place);
    act_at(g, &JVertex::base().with(v.clone()), &v.place)
}

fn check_fixes(g: &JonqElem, place: &Place) -> Result<()> {
    if g.h().apply(place) != *place {
        return Err(Error::PreconditionFailed(format!("element moves the place {place}")));
    }
    Ok(())
}

/// Subdivided translation length of g on X_u, for g whose base map fixes u.
///
/// For any vertex v this is max(0, d(v, g²v) − d(v, gv)).
pub fn local_translation_length(g: &JonqElem, place: &Place) -> Result<u64> {
    check_fixes(g, place)?;
    let v = TreeVertex::base(place.clone());
    let gv = act_local(g, &v);
    let ggv = act_local(g, &gv);
    Ok(tree_distance(&v, &ggv)?.saturating_sub(tree_distance(&v, &gv)?))
}

/// Nearest point to v fixed by an elliptic g.
pub(crate) fn local_project(g: &JonqElem, v: &TreeVertex) -> Result<TreeVertex> {
    check_fixes(g, &v.place)?;
    let mut v = v.clone();
    for _ in 0..PROJECTION_STEPS {
        let gv = act_local(g, &v);
        let d = tree_distance(&v, &gv)?;
        if d == 0 {
            return Ok(v);
        }
        if d % 2 == 1 {
            return Err(Error::Verification("odd displacement in a tree without inversions".into()));
        }
        v = geodesic_point(&v, &gv, d / 2)?;
    }
    Err(Error::Verification("projection to a fixed subtree did not settle".into()))
}

pub(crate) enum LocalFixed {
    Fixed(TreeVertex),
    /// A generator, or a product gens[i]·gens[j], acting hyperbolically.
    Witness(Vec<usize>),
}

/// A vertex of X_u fixed by all elements, reached by projecting from `start`.
pub(crate) fn local_common_fixed(gens: &[JonqElem], start: &TreeVertex) -> Result<LocalFixed> {
    let place = &start.place;
    for (i, g) in gens.iter().enumerate() {
        if local_translation_length(g, place)? > 0 {
            return Ok(LocalFixed::Witness(vec![i]));
        }
    }
    for i in 0..gens.len() {
        for j in i + 1..gens.len() {
            if local_translation_length(&gens[i].compose(&gens[j])?, place)? > 0 {
                return Ok(LocalFixed::Witness(vec![i, j]));
            }
        }
    }
    let mut v = start.clone();
    for g in gens {
        v = local_project(g, &v)?;
    }
    if gens.iter().any(|g| act_local(g, &v) != v) {
        return Err(Error::Verification("projection left the common fixed set".into()));
    }
    Ok(LocalFixed::Fixed(v))
}
