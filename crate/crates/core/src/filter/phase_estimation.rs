//! The phase-estimation circuit on `η` blocks of `k` ancilla qubits.
//!
//! The forward circuit `W` applies a Hadamard to every ancilla qubit and then,
//! for ancilla qubit `t` of each block, a controlled `U^{2^t}` with
//! `U = e^{-i2πH}`. On `|a⟩ ⊗ |0_k⟩` one block therefore ends in the momentum
//! state `|φ_a⟩` of [`momentum_state`](super::momentum_state). The optional
//! Fourier readout ([`apply_readout_fourier`]) turns the momentum state into a
//! sharp `k`-bit estimate of `φ_a`.
//!
//! `U` is taken exactly from the spectral oracle. All controlled powers share
//! the eigenbasis of `H`, so the simulation rotates the system register into
//! that basis once, applies every controlled power as a diagonal phase and
//! rotates back.

use std::f64::consts::PI;

use rayon::prelude::*;

use super::{momentum_state, FilterSpec};
use crate::error::{Error, Result};
use crate::quantum::{
    AncillaZeroProjector, HermitianOperator, RegisterLayout, SpectralDecomposition, StateVector,
    C64,
};

pub fn filter_layout(n: usize, spec: &FilterSpec) -> Result<RegisterLayout> {
    RegisterLayout::new(n, 0, spec.repetitions, spec.bits)
}

/// `Q = I_n ⊗ |0_k⟩⟨0_k|^{⊗η}`.
pub fn filter_projector(layout: RegisterLayout) -> AncillaZeroProjector {
    AncillaZeroProjector::new(layout)
}

/// Every eigenvalue must lie strictly inside `(0, 1)` so that phases do not
/// wrap.
pub fn validate_phase_window(spectrum: &SpectralDecomposition) -> Result<()> {
    if spectrum.min() <= 0.0 || spectrum.max() >= 1.0 {
        return Err(Error::validation(format!(
            "eigenvalues must lie strictly inside (0, 1), found [{}, {}]; normalize the spectrum first",
            spectrum.min(),
            spectrum.max()
        )));
    }
    Ok(())
}

fn check_register(
    amps: &[C64],
    spectrum: &SpectralDecomposition,
    layout: RegisterLayout,
) -> Result<()> {
    Error::check_dim(layout.dim(), amps.len())?;
    Error::check_dim(layout.register_dim(), spectrum.dim())
}

fn hadamard_all_ancillas(amps: &mut [C64], layout: RegisterLayout) {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for q in 0..layout.ancilla_qubits() {
        let stride = 1usize << (layout.register_qubits() + q);
        amps.par_chunks_mut(2 * stride).for_each(|chunk| {
            let (lo, hi) = chunk.split_at_mut(stride);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = (x + y) * s;
                *b = (x - y) * s;
            }
        });
    }
}

/// Controlled `U^{±2^t}` for every ancilla qubit; `sign = -1` is the forward
/// direction (`U = e^{-i2πH}`), `+1` its inverse.
fn controlled_powers(
    amps: &mut [C64],
    spectrum: &SpectralDecomposition,
    layout: RegisterLayout,
    sign: f64,
) {
    let reg = layout.register_dim();
    let k = layout.block_bits();
    // phases[t][a] = exp(sign·i2π·φ_a·2^t)
    let phases: Vec<Vec<C64>> = (0..k)
        .map(|t| {
            spectrum
                .eigenvalues()
                .iter()
                .map(|&phi| {
                    let turns = (phi * (1u64 << t) as f64).rem_euclid(1.0);
                    C64::from_polar(1.0, sign * 2.0 * PI * turns)
                })
                .collect()
        })
        .collect();
    amps.par_chunks_mut(reg)
        .enumerate()
        .for_each(|(ancilla, chunk)| {
            let mut coeffs = spectrum.to_eigenbasis(chunk);
            for block in 0..layout.blocks() {
                let label = layout.block_label(ancilla, block);
                for (t, phase) in phases.iter().enumerate() {
                    if (label >> t) & 1 == 1 {
                        coeffs.iter_mut().zip(phase).for_each(|(c, p)| *c *= p);
                    }
                }
            }
            chunk.copy_from_slice(&spectrum.from_eigenbasis(&coeffs));
        });
}

/// Forward circuit `W` in place.
pub fn apply_phase_estimation(
    amps: &mut [C64],
    spectrum: &SpectralDecomposition,
    layout: RegisterLayout,
) -> Result<()> {
    check_register(amps, spectrum, layout)?;
    hadamard_all_ancillas(amps, layout);
    controlled_powers(amps, spectrum, layout, -1.0);
    Ok(())
}

/// `W†` in place.
pub fn inverse_phase_estimation_in_place(
    amps: &mut [C64],
    spectrum: &SpectralDecomposition,
    layout: RegisterLayout,
) -> Result<()> {
    check_register(amps, spectrum, layout)?;
    controlled_powers(amps, spectrum, layout, 1.0);
    hadamard_all_ancillas(amps, layout);
    Ok(())
}

/// Fourier readout `|j⟩ ↦ 2^{-k/2} Σ_y e^{±i2πjy/2^k} |y⟩` on every block
/// (`+` forward, `-` when `inverse`).
pub fn apply_readout_fourier(
    amps: &mut [C64],
    layout: RegisterLayout,
    inverse: bool,
) -> Result<()> {
    Error::check_dim(layout.dim(), amps.len())?;
    let k = layout.block_bits();
    let size = 1usize << k;
    let sign = if inverse { -1.0 } else { 1.0 };
    let norm = 1.0 / (size as f64).sqrt();
    let kernel: Vec<C64> = (0..size)
        .map(|m| C64::from_polar(norm, sign * 2.0 * PI * m as f64 / size as f64))
        .collect();
    let mut buf = vec![C64::new(0.0, 0.0); size];
    for block in 0..layout.blocks() {
        let shift = layout.register_qubits() + block * k;
        let mask = (size - 1) << shift;
        for base in (0..amps.len()).filter(|i| i & mask == 0) {
            for (y, slot) in buf.iter_mut().enumerate() {
                *slot = (0..size)
                    .map(|j| kernel[(j * y) % size] * amps[base | (j << shift)])
                    .sum();
            }
            for (y, &v) in buf.iter().enumerate() {
                amps[base | (y << shift)] = v;
            }
        }
    }
    Ok(())
}

/// Runs `W†` on `ψ ⊗ |μ⟩^{⊗η}`.
///
/// The amplitude of the result on `|a⟩ ⊗ |0_k⟩^{⊗η}` is `α_a ⟨φ_a|μ⟩^η`.
pub fn apply_inverse_phase_estimation_with(
    spectrum: &SpectralDecomposition,
    psi: &StateVector,
    spec: &FilterSpec,
) -> Result<StateVector> {
    validate_phase_window(spectrum)?;
    if psi.layout().ancilla_qubits() != 0 || psi.layout().scratchpad_qubits() != 0 {
        return Err(Error::validation(
            "input state must live on the system register only",
        ));
    }
    Error::check_dim(spectrum.dim(), psi.dim())?;
    let layout = filter_layout(psi.layout().system_qubits(), spec)?;
    let filter = momentum_state(spec.mu, spec.bits)?;
    let mut ancilla = vec![C64::new(1.0, 0.0)];
    for _ in 0..spec.repetitions {
        ancilla = filter
            .amplitudes()
            .iter()
            .flat_map(|m| ancilla.iter().map(move |a| a * m))
            .collect();
    }
    let mut amps = psi.tensor_ancilla(layout, &ancilla)?.into_amplitudes();
    inverse_phase_estimation_in_place(&mut amps, spectrum, layout)?;
    StateVector::from_amplitudes(layout, amps)
}

/// As [`apply_inverse_phase_estimation_with`], diagonalizing `h` first.
pub fn apply_inverse_phase_estimation(
    h: &HermitianOperator,
    psi: &StateVector,
    spec: &FilterSpec,
) -> Result<StateVector> {
    let spectrum = crate::quantum::spectral_decompose(h)?;
    apply_inverse_phase_estimation_with(&spectrum, psi, spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filter::momentum_overlap;
    use crate::hamiltonians::{build_model, ModelSpec, NormalizedHamiltonian};
    use crate::quantum::{random_state, spectral_decompose, RegisterLayout};
    use crate::rng::RngStream;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn exact_phase_returns_to_all_zero() {
        // φ = 5/16 is exactly representable with k = 4 bits.
        let h = HermitianOperator::from_real_diagonal(&[5.0 / 16.0, 0.75], "h").unwrap();
        let psi = StateVector::basis(RegisterLayout::system_only(1).unwrap(), 0).unwrap();
        let spec = FilterSpec::new(5.0 / 16.0, 0.25, 4, 1).unwrap();
        let out = apply_inverse_phase_estimation(&h, &psi, &spec).unwrap();
        assert!((out.amplitudes()[0] - c(1.0)).norm() < 1e-12);
    }

    #[test]
    fn single_phase_spectrum_at_center() {
        let h = HermitianOperator::from_real_diagonal(&[0.5; 4], "half").unwrap();
        let psi = random_state(RegisterLayout::system_only(2).unwrap(), 9);
        let spec = FilterSpec::new(0.5, 0.25, 3, 2).unwrap();
        let out = apply_inverse_phase_estimation(&h, &psi, &spec).unwrap();
        for (i, z) in out.amplitudes().iter().enumerate() {
            let want = if i < 4 { psi.amplitudes()[i] } else { c(0.0) };
            assert!((z - want).norm() < 1e-12, "index {i}");
        }
    }

    #[test]
    fn projected_block_matches_closed_form() {
        let h = build_model(&ModelSpec::RandomTwoLocal { n: 2, seed: 11 }).unwrap();
        let nh = NormalizedHamiltonian::new(&h, 0.125).unwrap();
        let psi = random_state(RegisterLayout::system_only(2).unwrap(), 11);
        let spec = FilterSpec::new(0.43, 0.25, 3, 2).unwrap();
        let out = apply_inverse_phase_estimation_with(&nh.spectrum, &psi, &spec).unwrap();
        let alpha = nh.spectrum.to_eigenbasis(psi.amplitudes());
        let block = nh.spectrum.to_eigenbasis(out.ancilla_zero_slice());
        for (a, &phi) in nh.spectrum.eigenvalues().iter().enumerate() {
            let want = alpha[a] * momentum_overlap(phi, spec.mu, spec.bits).powi(2);
            assert!((block[a] - want).norm() < 1e-9, "eigenstate {a}");
        }
    }

    #[test]
    fn rejects_unnormalized_spectrum() {
        let h = HermitianOperator::from_real_diagonal(&[0.0, 0.5], "h").unwrap();
        let psi = random_state(RegisterLayout::system_only(1).unwrap(), 1);
        let spec = FilterSpec::new(0.5, 0.25, 2, 1).unwrap();
        let err = apply_inverse_phase_estimation(&h, &psi, &spec).unwrap_err();
        assert!(err.to_string().contains("normalize"), "{err}");
    }

    #[test]
    fn inverse_is_unitary_and_undoes_forward() {
        let h = build_model(&ModelSpec::RandomTwoLocal { n: 2, seed: 4 }).unwrap();
        let nh = NormalizedHamiltonian::new(&h, 0.125).unwrap();
        let layout = RegisterLayout::new(2, 0, 2, 3).unwrap();
        let s = random_state(layout, 5);
        let mut amps = s.amplitudes().to_vec();
        inverse_phase_estimation_in_place(&mut amps, &nh.spectrum, layout).unwrap();
        let norm: f64 = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!((norm - 1.0).abs() < 1e-12);
        apply_phase_estimation(&mut amps, &nh.spectrum, layout).unwrap();
        for (a, b) in amps.iter().zip(s.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn forward_circuit_writes_momentum_state() {
        let h = HermitianOperator::from_real_diagonal(&[0.3, 0.71], "h").unwrap();
        let spectrum = spectral_decompose(&h).unwrap();
        let layout = RegisterLayout::new(1, 0, 1, 3).unwrap();
        let mut amps = vec![c(0.0); layout.dim()];
        amps[1] = c(1.0); // |a = 1⟩ ⊗ |0⟩, φ = 0.71
        apply_phase_estimation(&mut amps, &spectrum, layout).unwrap();
        let m = momentum_state(0.71, 3).unwrap();
        for j in 0..8 {
            assert!((amps[layout.index(1, j)] - m.amplitudes()[j]).norm() < 1e-12);
        }
    }

    #[test]
    fn fourier_readout_is_sharp_on_grid_phases() {
        let h = HermitianOperator::from_real_diagonal(&[0.375, 0.8], "h").unwrap();
        let spectrum = spectral_decompose(&h).unwrap();
        let layout = RegisterLayout::new(1, 0, 1, 3).unwrap();
        let mut amps = vec![c(0.0); layout.dim()];
        amps[0] = c(1.0);
        apply_phase_estimation(&mut amps, &spectrum, layout).unwrap();
        apply_readout_fourier(&mut amps, layout, false).unwrap();
        // 0.375 · 8 = 3.
        assert!((amps[layout.index(0, 3)].norm() - 1.0).abs() < 1e-12);
        apply_readout_fourier(&mut amps, layout, true).unwrap();
        let m = momentum_state(0.375, 3).unwrap();
        for j in 0..8 {
            assert!((amps[layout.index(0, j)] - m.amplitudes()[j]).norm() < 1e-12);
        }
    }

    #[test]
    fn hadamard_layer_is_involution() {
        let layout = RegisterLayout::new(1, 0, 2, 2).unwrap();
        let mut rng = RngStream::from_seed(3);
        let s = crate::quantum::random_state_from(layout, &mut rng);
        let mut amps = s.amplitudes().to_vec();
        hadamard_all_ancillas(&mut amps, layout);
        hadamard_all_ancillas(&mut amps, layout);
        for (a, b) in amps.iter().zip(s.amplitudes()) {
            assert!((a - b).norm() < 1e-14);
        }
    }
}
