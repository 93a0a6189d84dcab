//! Cube-of-resolutions engine for Khovanov homology of link diagrams and
//! pseudo-diagrams, with filtered spectral sequences and classical invariants.

pub mod chain;
pub mod corpus;
pub mod cube;
pub mod diagram;
pub mod error;
pub mod filtration;
pub mod invariants;
pub mod khovanov;
pub mod oracle;
pub mod par;
pub mod selftest;

pub use error::{Error, Result};
