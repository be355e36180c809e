use serde::Serialize;

use super::momentum::overlap_lower_bound_radius;
use crate::error::{Error, Result};
use crate::quantum::DEFAULT_QUBIT_CAP;

/// Absorbs rounding when a bound lands exactly on an integer.
const CEIL_SLACK: f64 = 1e-9;

/// Energy filter: center `mu`, bandwidth `eps`, `bits` phase bits per block
/// and `repetitions` independent blocks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FilterSpec {
    pub mu: f64,
    pub eps: f64,
    pub bits: usize,
    pub repetitions: usize,
}

impl FilterSpec {
    pub fn new(mu: f64, eps: f64, bits: usize, repetitions: usize) -> Result<Self> {
        validate_center(mu)?;
        validate_bandwidth(eps)?;
        if bits == 0 || repetitions == 0 {
            return Err(Error::validation(format!(
                "filter needs k >= 1 and eta >= 1, got k={bits}, eta={repetitions}"
            )));
        }
        Ok(FilterSpec {
            mu,
            eps,
            bits,
            repetitions,
        })
    }

    pub fn ancilla_qubits(&self) -> usize {
        self.bits * self.repetitions
    }

    /// Phase radius `2^{-k}/(2π√η)` inside which every eigenstate keeps at
    /// least half of its amplitude; also the sweep step.
    pub fn resolution(&self) -> f64 {
        overlap_lower_bound_radius(self.bits, self.repetitions)
    }

    /// Whether `k` and `η` satisfy the bounds that guarantee an output energy
    /// within `mu ± eps` for an `n`-qubit system.
    pub fn premises_met(&self, n: usize) -> bool {
        let (k_min, eta_min) = minimal_bits_and_repetitions(self.eps, n, self.mu);
        self.bits >= k_min && self.repetitions >= eta_min
    }

    pub fn with_center(&self, mu: f64) -> Result<Self> {
        Self::new(mu, self.eps, self.bits, self.repetitions)
    }
}

fn validate_center(mu: f64) -> Result<()> {
    if !(mu > 0.0 && mu < 1.0) {
        return Err(Error::validation(format!(
            "filter center {mu} must lie in (0, 1)"
        )));
    }
    Ok(())
}

fn validate_bandwidth(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::validation(format!(
            "bandwidth {eps} must lie in (0, 1/2)"
        )));
    }
    Ok(())
}

fn ceil_int(x: f64) -> usize {
    (x - CEIL_SLACK).ceil().max(1.0) as usize
}

/// `k = ⌈2 log₂(1/ε)⌉` and `η` the larger ceiling of
/// `1 + (n+1)/log₂(1/ε)` and `1 + (n + log₂ μ)/log₂(1/ε)`.
fn minimal_bits_and_repetitions(eps: f64, n: usize, mu: f64) -> (usize, usize) {
    let l = (1.0 / eps).log2();
    let bits = ceil_int(2.0 * l);
    let upper = ceil_int(1.0 + (n as f64 + 1.0) / l);
    let lower = ceil_int(1.0 + (n as f64 + mu.log2()) / l);
    (bits, upper.max(lower))
}

pub fn select_filter_params(eps: f64, n: usize, mu: f64) -> Result<FilterSpec> {
    select_filter_params_with_cap(eps, n, mu, DEFAULT_QUBIT_CAP)
}

pub fn select_filter_params_with_cap(
    eps: f64,
    n: usize,
    mu: f64,
    cap: usize,
) -> Result<FilterSpec> {
    validate_bandwidth(eps)?;
    validate_center(mu)?;
    let (bits, repetitions) = minimal_bits_and_repetitions(eps, n, mu);
    let total = n + bits * repetitions;
    if total > cap {
        return Err(Error::capacity(
            format!("filter register (n={n}, k={bits}, eta={repetitions})"),
            total,
            cap,
        ));
    }
    FilterSpec::new(mu, eps, bits, repetitions)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quarter_bandwidth_four_qubits() {
        let s = select_filter_params(0.25, 4, 0.5).unwrap();
        assert_eq!((s.bits, s.repetitions), (4, 4));
        assert!(s.premises_met(4));
    }

    #[test]
    fn boundary_bandwidth() {
        assert!(select_filter_params(0.5, 2, 0.5).is_err());
        let s = select_filter_params(0.49, 2, 0.5).unwrap();
        assert_eq!(s.bits, 3);
    }

    #[test]
    fn capacity_error_names_the_register() {
        match select_filter_params(0.01, 10, 0.5) {
            Err(Error::Capacity { what, .. }) => assert!(what.contains("n=10"), "{what}"),
            other => panic!("expected capacity error, got {other:?}"),
        }
    }

    #[test]
    fn shrinking_bandwidth_never_decreases_bits() {
        let mut last = 0;
        for i in 1..400 {
            let eps = 0.499 - i as f64 * 0.00124;
            let (k, _) = minimal_bits_and_repetitions(eps, 3, 0.5);
            assert!(k >= last);
            last = k;
        }
    }

    #[test]
    fn premises_flag_manual_specs() {
        let s = FilterSpec::new(0.5, 0.25, 2, 1).unwrap();
        assert!(!s.premises_met(3));
        assert!(FilterSpec::new(1.0, 0.25, 2, 1).is_err());
        assert!(FilterSpec::new(0.5, 0.25, 0, 1).is_err());
    }
}
