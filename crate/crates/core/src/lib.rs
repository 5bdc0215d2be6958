//! Renormalization-group flow and geometric entanglement of translation-invariant
//! matrix product states.

pub mod cli;
pub mod criticality;
pub mod error;
pub mod geometric;
pub mod linalg;
pub mod models;
pub mod mps;
pub mod observables;
pub mod transfer;

pub use error::{Error, Result};
