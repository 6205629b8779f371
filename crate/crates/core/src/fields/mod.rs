//! Exact arithmetic for the supported base fields, univariate polynomials,
//! rational functions and the places of the projective line.

pub mod factor;
pub mod intfactor;
pub mod norm;
pub mod place;
pub mod poly;
pub mod ratfunc;
pub mod scalar;

pub use norm::{norm_compare, NormOrder, NumberPlace};
pub use place::{place_image, poly_valuation, valuation, Place, Val};
pub use poly::Polynomial;
pub use ratfunc::RationalFunction;
pub use scalar::{Field, Scalar};
