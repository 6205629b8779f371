pub mod cli;
pub mod cremona;
pub mod error;
pub mod expr;
pub mod fibretrees;
pub mod fields;
pub mod fixpoint;
pub mod growth;
pub mod halphen;
pub mod jonquieres;
pub mod moebius;

pub use error::{Error, Result};
