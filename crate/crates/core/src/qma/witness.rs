//! Witness preparation: random accepted state, inverse switch circuit on a
//! switch filter state, then amplification of the clean-scratchpad,
//! clean-record subspace.

use serde::Serialize;

use super::switch::{apply_inverse_switch_circuit, switch_layout};
use super::verifier::VerifierCircuit;
use crate::amplification::{amplify, AmplificationReport, AmplifyOptions};
use crate::error::{Error, Result};
use crate::quantum::{random_amplitudes, AncillaZeroProjector, ProjectorOp, StateVector, C64};
use crate::rng::RngStream;

const CEIL_SLACK: f64 = 1e-9;

/// `k = ⌈2μ(1−μ)/ε²⌉`, raised to the next odd number, at least 1.
pub fn witness_bits(mu: f64, eps: f64) -> Result<usize> {
    if !(mu > 0.0 && mu <= 1.0) {
        return Err(Error::validation(format!(
            "filter center {mu} must lie in (0, 1]"
        )));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::validation(format!(
            "bandwidth {eps} must be positive"
        )));
    }
    let k = (2.0 * mu * (1.0 - mu) / (eps * eps) - CEIL_SLACK)
        .ceil()
        .max(1.0) as usize;
    Ok(if k.is_multiple_of(2) { k + 1 } else { k })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WitnessReport {
    pub mu: f64,
    pub eps: f64,
    /// Record length `k`.
    pub bits: usize,
    /// Standard deviation `√(2μ(1−μ)/k)` of the filter profile `g²`.
    pub effective_bandwidth: f64,
    /// `‖R w‖²` of the prepared witness.
    pub acceptance_probability: Option<f64>,
    /// `‖(I − Q) w‖` of the prepared witness.
    pub scratch_residual: Option<f64>,
    pub amplification: AmplificationReport,
}

#[derive(Clone, Debug)]
pub struct WitnessOutcome {
    /// The witness on the `n + h` verifier qubits.
    pub state: Option<StateVector>,
    pub report: WitnessReport,
}

/// Random state in the image of `R`: output qubit `|1⟩`, Haar-random
/// remaining qubits, then `V†`.
fn random_accepted_state(verifier: &VerifierCircuit, rng: &mut RngStream) -> Result<StateVector> {
    let layout = verifier.register_layout();
    let d = layout.dim();
    let rest = random_amplitudes(d / 2, rng);
    let mut amps = vec![C64::new(0.0, 0.0); d];
    for (i, a) in rest.into_iter().enumerate() {
        amps[(i << 1) | 1] = a;
    }
    let v = nalgebra::DVector::from_vec(amps);
    let rotated = verifier.unitary().adjoint() * v;
    StateVector::normalized(layout, rotated.as_slice().to_vec())
}

/// Prepares a witness whose acceptance probability is close to `mu`.
///
/// The abort threshold is `1/N²` with `N = 2^{n+h}`; the initial state uses
/// `RngStream::from_seed(seed).split(0)` and amplification `split(1)`.
pub fn prepare_witness(
    verifier: &VerifierCircuit,
    mu: f64,
    eps: f64,
    seed: u64,
    max_retries: usize,
) -> Result<WitnessOutcome> {
    let k = witness_bits(mu, eps)?;
    let layout = switch_layout(verifier.witness_qubits, verifier.scratchpad_qubits, k)?;
    let q = verifier.q_projector();
    let r = verifier.r_projector()?;

    let root = RngStream::from_seed(seed);
    let psi = random_accepted_state(verifier, &mut root.split(0))?;
    let filtered = apply_inverse_switch_circuit(&q, &r, &psi, mu, k)?;
    let target = AncillaZeroProjector::with_register(layout, q.clone())?;
    let options = AmplifyOptions {
        max_retries,
        count_scale: Some(verifier.dim()),
        ..AmplifyOptions::default()
    };
    let (out, amplification) = amplify(&filtered, &target, &options, &mut root.split(1))?;

    let mut report = WitnessReport {
        mu,
        eps,
        bits: k,
        effective_bandwidth: (2.0 * mu * (1.0 - mu) / k as f64).sqrt(),
        acceptance_probability: None,
        scratch_residual: None,
        amplification,
    };
    let state = match out {
        Some(full) => {
            let witness = StateVector::normalized(
                verifier.register_layout(),
                full.ancilla_zero_slice().to_vec(),
            )?;
            let w = witness.amplitudes();
            report.acceptance_probability = Some(r.weight(w));
            let projected = q.project(w);
            let residual: f64 = w
                .iter()
                .zip(&projected)
                .map(|(a, p)| (a - p).norm_sqr())
                .sum::<f64>()
                .sqrt();
            report.scratch_residual = Some(residual);
            Some(witness)
        }
        None => None,
    };
    Ok(WitnessOutcome { state, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jordan::jordan_decompose;
    use crate::quantum::Projector;

    #[test]
    fn bits_rule() {
        assert_eq!(witness_bits(0.5, 0.25).unwrap(), 9);
        assert_eq!(witness_bits(1.0, 0.1).unwrap(), 1);
        assert_eq!(witness_bits(0.5, 0.5).unwrap(), 3);
        assert!(witness_bits(0.0, 0.1).is_err());
    }

    #[test]
    fn rotation_fixture_recovers_top_block() {
        let theta = std::f64::consts::PI / 12.0;
        let v = VerifierCircuit::rotation_fixture(theta).unwrap();
        let j = jordan_decompose(&v.q_projector(), &v.r_projector().unwrap()).unwrap();
        let top = j.blocks.iter().find(|b| b.p > 0.5).unwrap();
        let out = prepare_witness(&v, top.p, 0.0913, 7, 8).unwrap();
        assert_eq!(out.report.bits, 15);
        let w = out.state.expect("witness prepared");
        let overlap: C64 = top
            .q1
            .iter()
            .zip(w.amplitudes())
            .map(|(a, b)| a.conj() * b)
            .sum();
        assert!(overlap.norm_sqr() > 1.0 - 1e-6, "{}", overlap.norm_sqr());
        assert!(out.report.scratch_residual.unwrap() < 1e-9);
        let acc = out.report.acceptance_probability.unwrap();
        assert!((acc - top.p).abs() <= out.report.effective_bandwidth);
    }

    #[test]
    fn gap_center_aborts() {
        let v = VerifierCircuit::rotation_fixture(std::f64::consts::PI / 12.0).unwrap();
        for seed in 0..10 {
            let out = prepare_witness(&v, 0.5, 0.2, seed, 8).unwrap();
            assert!(out.report.amplification.aborted, "seed {seed}");
        }
    }

    #[test]
    fn commuting_fixture_reduces_to_grover() {
        let v = VerifierCircuit::identity_fixture();
        let q = v.q_projector();
        let qr = Projector::new(q.matrix() * v.r_projector().unwrap().matrix()).unwrap();
        for seed in 0..20 {
            let out = prepare_witness(&v, 1.0, 0.1, seed, 8).unwrap();
            let root = RngStream::from_seed(seed);
            let psi = random_accepted_state(&v, &mut root.split(0)).unwrap();
            let options = AmplifyOptions {
                count_scale: Some(v.dim()),
                ..AmplifyOptions::default()
            };
            let (plain, rep) = amplify(&psi, &qr, &options, &mut root.split(1)).unwrap();
            let a = &out.report.amplification;
            assert_eq!(a.succeeded, rep.succeeded);
            assert!((a.success_probability - rep.success_probability).abs() < 1e-6);
            if let (Some(w), Some(p)) = (&out.state, &plain) {
                assert!((w.fidelity(p).unwrap() - 1.0).abs() < 1e-9);
                assert!((out.report.acceptance_probability.unwrap() - 1.0).abs() < 1e-9);
            }
        }
    }
}
