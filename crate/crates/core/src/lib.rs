//! Dense simulation of energy-filtered state preparation.
//!
//! The crate builds the whole pipeline on top of an exact spectral oracle:
//! momentum filter states and inverse phase estimation ([`filter`]),
//! amplitude amplification with an abort rule ([`amplification`]),
//! Jordan's two-projector decomposition and the failure of the naive
//! phase-estimation-plus-Grover approach ([`jordan`]), the alternating
//! measurement filter used for witness preparation ([`qma`]) and
//! Gibbs-weighted energy sampling ([`thermal`]).
//!
//! Register ordering is fixed crate-wide: the system register occupies the
//! low bits of a basis index, the scratchpad the next bits and ancilla blocks
//! the high bits, in application order. See [`quantum::RegisterLayout`].

pub mod amplification;
pub mod error;
pub mod filter;
pub mod hamiltonians;
pub mod jordan;
pub mod qma;
pub mod quantum;
pub mod rng;
pub mod thermal;

pub use error::{Error, Result};
pub use quantum::C64;
pub use rng::RngStream;
