//! Inner functions, linear-fractional self-maps of the unit disk, and
//! certification of Beurling subspaces `theta H^2` invariant under a
//! composition operator `C_phi`, with finite-section numerical oracles.

pub mod certify;
pub mod crosscheck;
pub mod error;
pub mod inner;
pub mod maps;
pub mod numeric;
pub mod orbits;
pub mod poly;
pub mod series;

pub use error::{Error, Result};
