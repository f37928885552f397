//! Spectral triples on twisted crossed products, built and checked at finite
//! truncation.

pub mod algebra;
pub mod coeff;
pub mod coverings;
pub mod error;
pub mod groups;
pub mod length;
pub mod linalg;
pub mod order;
pub mod phase;
pub mod registry;
pub mod regularity;
pub mod snf;
pub mod torus;
pub mod triple;
pub mod twist;

pub use error::{Error, Result};
