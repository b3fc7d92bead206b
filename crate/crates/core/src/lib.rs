//! Explicit dense Ruzsa–Szemerédi graphs and hypergraphs built from
//! Number-On-the-Forehead protocols, with exhaustive verification.
//!
//! The pipeline: pick a weak sub-permutation ([`functions`]), run a protocol
//! for it on every input ([`nof`]), keep the 1-inputs sharing one last-player
//! message, turn them into a layered (hyper)graph ([`construct`]) and check
//! every structural claim by brute force ([`verify`]).

pub mod bits;
pub mod cli;
pub mod construct;
pub mod error;
pub mod functions;
pub mod lattice;
pub mod nof;
pub mod par;
pub mod pipeline;
pub mod verify;

pub use bits::Bits;
pub use error::{Cap, Error, Result};
