//! Exact and robust algorithms for perturbation-stable Max Cut and Minimum
//! Multiway Cut, with exhaustive oracles for small instances.

pub mod error;
pub mod generate;
pub mod graph;
pub mod io;
pub mod local;
pub mod oracle;
pub mod reduce;
pub mod lp;
pub mod sdp;

pub use error::{Error, Result};
