use rand_distr::{Distribution, StandardNormal};

use super::{inner, norm_sqr, RegisterLayout, C64};
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Maximum deviation of a stored state's norm from one.
pub const NORM_TOLERANCE: f64 = 1e-12;

/// Inputs further than this from unit norm are rejected by
/// [`StateVector::from_amplitudes`] instead of silently rescaled.
const ACCEPT_TOLERANCE: f64 = 1e-8;

/// Unit-norm amplitude vector over a [`RegisterLayout`].
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<C64>,
    layout: RegisterLayout,
}

impl StateVector {
    /// Wraps amplitudes that are already (close to) normalized.
    pub fn from_amplitudes(layout: RegisterLayout, amplitudes: Vec<C64>) -> Result<Self> {
        Error::check_dim(layout.dim(), amplitudes.len())?;
        let norm = norm_sqr(&amplitudes).sqrt();
        if (norm - 1.0).abs() > ACCEPT_TOLERANCE {
            return Err(Error::Numerical(format!(
                "state norm {norm} is not 1 within {ACCEPT_TOLERANCE}"
            )));
        }
        Ok(Self::rescaled(layout, amplitudes, norm))
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn normalized(layout: RegisterLayout, amplitudes: Vec<C64>) -> Result<Self> {
        Error::check_dim(layout.dim(), amplitudes.len())?;
        let norm = norm_sqr(&amplitudes).sqrt();
        if !norm.is_finite() || norm <= 1e-150 {
            return Err(Error::Numerical(format!(
                "cannot normalize vector of norm {norm}"
            )));
        }
        Ok(Self::rescaled(layout, amplitudes, norm))
    }

    fn rescaled(layout: RegisterLayout, mut amplitudes: Vec<C64>, norm: f64) -> Self {
        let inv = 1.0 / norm;
        amplitudes.iter_mut().for_each(|z| *z *= inv);
        StateVector { amplitudes, layout }
    }

    pub fn basis(layout: RegisterLayout, index: usize) -> Result<Self> {
        if index >= layout.dim() {
            return Err(Error::validation(format!(
                "basis index {index} out of range for dimension {}",
                layout.dim()
            )));
        }
        let mut amplitudes = vec![C64::new(0.0, 0.0); layout.dim()];
        amplitudes[index] = C64::new(1.0, 0.0);
        Ok(StateVector { amplitudes, layout })
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn layout(&self) -> RegisterLayout {
        self.layout
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        norm_sqr(&self.amplitudes).sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        Error::check_dim(self.dim(), other.dim())?;
        Ok(inner(&self.amplitudes, &other.amplitudes))
    }

    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// `self ⊗ ancilla`, with the ancilla amplitudes indexed by the full
    /// ancilla label of `layout`.
    pub fn tensor_ancilla(&self, layout: RegisterLayout, ancilla: &[C64]) -> Result<StateVector> {
        Error::check_dim(layout.register_dim(), self.dim())?;
        Error::check_dim(layout.ancilla_dim(), ancilla.len())?;
        let reg = self.dim();
        let mut amplitudes = Vec::with_capacity(layout.dim());
        for a in ancilla {
            amplitudes.extend(self.amplitudes.iter().map(|z| z * a));
        }
        debug_assert_eq!(amplitudes.len(), reg * ancilla.len());
        StateVector::normalized(layout, amplitudes)
    }

    /// Register amplitudes on the all-zero ancilla label, unnormalized.
    pub fn ancilla_zero_slice(&self) -> &[C64] {
        &self.amplitudes[..self.layout.register_dim()]
    }
}

/// Haar-random amplitudes: i.i.d. complex Gaussians, normalized.
pub fn random_amplitudes(dim: usize, rng: &mut RngStream) -> Vec<C64> {
    loop {
        let mut v: Vec<C64> = (0..dim)
            .map(|_| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                C64::new(re, im)
            })
            .collect();
        let norm = norm_sqr(&v).sqrt();
        if norm > 1e-300 {
            v.iter_mut().for_each(|z| *z /= norm);
            return v;
        }
    }
}

/// Haar-random state; stands in for a random stabilizer state.
pub fn random_state(layout: RegisterLayout, seed: u64) -> StateVector {
    random_state_from(layout, &mut RngStream::from_seed(seed))
}

pub fn random_state_from(layout: RegisterLayout, rng: &mut RngStream) -> StateVector {
    StateVector {
        amplitudes: random_amplitudes(layout.dim(), rng),
        layout,
    }
}
