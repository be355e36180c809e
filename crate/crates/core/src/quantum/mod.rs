//! Dense complex linear algebra substrate.

mod layout;
mod operator;
mod projector;
mod spectral;
mod state;

pub use layout::{RegisterLayout, DEFAULT_QUBIT_CAP};
pub use operator::{expectation_value, HermitianOperator, HERMITICITY_TOLERANCE};
pub use projector::{
    measure_projector, AncillaZeroProjector, Measurement, Projector, ProjectorOp,
    PROJECTOR_TOLERANCE,
};
pub use spectral::{
    spectral_decompose, SpectralDecomposition, DEGENERACY_TOLERANCE, FULL_DECOMPOSITION_CAP,
};
pub use state::{random_amplitudes, random_state, random_state_from, StateVector, NORM_TOLERANCE};

pub type C64 = num_complex::Complex64;

pub(crate) fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// `⟨a|b⟩`, antilinear in the first argument.
pub(crate) fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Largest entry modulus of a complex matrix.
pub fn max_abs(m: &nalgebra::DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
