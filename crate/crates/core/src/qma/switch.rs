//! Switch statistics, switch filter states and the alternating-measurement
//! circuit.
//!
//! A record `j = j_1 … j_k` is stored in a `k`-bit ancilla label with `j_t`
//! in bit `t − 1`. The circuit records `k` measurements (`k` odd) in the
//! order `R, Q, R, …, R`; each recording is the unitary
//! `P ⊗ X + (I − P) ⊗ I` onto a fresh ancilla qubit. Acting on a clean-record
//! state `q¹ ⊗ |0_k⟩` of a Jordan block with overlap `p`, it produces
//!
//! ```text
//! Σ_j (√p)^{k−s'(j)} (√(1−p))^{s'(j)} (−1)^{ℓ(j)} |r^{j_k}⟩ ⊗ |j⟩
//! ```
//!
//! where `ℓ(j)` counts adjacent `00` pairs in `j` and `s'(j)` counts the
//! switches of the record preceded by the initial `Q` outcome 1, i.e. the
//! switches inside `j` plus one when `j_1 = 0`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quantum::{ProjectorOp, RegisterLayout, StateVector, C64};

/// Largest record length whose `2^k` strings are enumerated.
pub const MAX_ENUMERATION_BITS: usize = 21;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SwitchStats {
    /// Adjacent unequal pairs inside the record.
    pub switches: usize,
    /// Adjacent `00` pairs inside the record.
    pub zero_pairs: usize,
    /// Switches counted from the initial accepted `Q` outcome:
    /// `switches + [j_1 = 0]`.
    pub recorded_switches: usize,
}

/// Statistics of `j_1 … j_k` given as `bits[0] = j_1`.
pub fn switch_stats(bits: &[bool]) -> Result<SwitchStats> {
    if bits.is_empty() {
        return Err(Error::validation("switch statistics need at least one bit"));
    }
    let switches = bits.windows(2).filter(|w| w[0] != w[1]).count();
    let zero_pairs = bits.windows(2).filter(|w| !w[0] && !w[1]).count();
    Ok(SwitchStats {
        switches,
        zero_pairs,
        recorded_switches: switches + usize::from(!bits[0]),
    })
}

/// Statistics of a `k`-bit label with `j_t` in bit `t − 1`.
pub fn switch_stats_label(label: usize, k: usize) -> SwitchStats {
    let pairs = (1usize << (k - 1)) - 1;
    let switches = ((label ^ (label >> 1)) & pairs).count_ones() as usize;
    let zero_pairs = (!label & !(label >> 1) & pairs).count_ones() as usize;
    SwitchStats {
        switches,
        zero_pairs,
        recorded_switches: switches + (1 - (label & 1)),
    }
}

fn validate_bits(k: usize) -> Result<()> {
    if k.is_multiple_of(2) {
        return Err(Error::validation(format!(
            "record length k = {k} must be odd"
        )));
    }
    if k > MAX_ENUMERATION_BITS {
        return Err(Error::capacity(
            "switch record length",
            k,
            MAX_ENUMERATION_BITS,
        ));
    }
    Ok(())
}

fn validate_center(mu: f64) -> Result<()> {
    if !(mu > 0.0 && mu <= 1.0) {
        return Err(Error::validation(format!(
            "filter center {mu} must lie in (0, 1]"
        )));
    }
    Ok(())
}

fn sign(zero_pairs: usize) -> f64 {
    if zero_pairs.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `(√x)^{k−s} (√(1−x))^{s}`.
fn branch_weight(x: f64, k: usize, s: usize) -> f64 {
    x.powf((k - s) as f64 / 2.0) * (1.0 - x).powf(s as f64 / 2.0)
}

/// Closed-form forward amplitude of record `label` on a block with overlap
/// `p`.
pub fn closed_form_amplitude(p: f64, label: usize, k: usize) -> f64 {
    let st = switch_stats_label(label, k);
    branch_weight(p, k, st.recorded_switches) * sign(st.zero_pairs)
}

/// `|μ⟩ ∝ Σ_j (√μ)^{k−s'(j)} (√(1−μ))^{s'(j)} (−1)^{ℓ(j)} |j⟩`, indexed by
/// record label.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SwitchFilterState {
    pub mu: f64,
    pub bits: usize,
    amplitudes: Vec<f64>,
}

impl SwitchFilterState {
    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn to_complex(&self) -> Vec<C64> {
        self.amplitudes.iter().map(|&a| C64::new(a, 0.0)).collect()
    }

    /// Per recorded-switch count `s'`, the sum over records ending in 1 of
    /// `amplitude · (−1)^ℓ`.
    fn accepted_coefficients(&self) -> Vec<f64> {
        let k = self.bits;
        let mut coeffs = vec![0.0; k + 1];
        let last = 1usize << (k - 1);
        for (label, &a) in self.amplitudes.iter().enumerate() {
            if label & last != 0 {
                let st = switch_stats_label(label, k);
                coeffs[st.recorded_switches] += a * sign(st.zero_pairs);
            }
        }
        coeffs
    }
}

/// Explicitly normalized switch filter state; `μ ∈ (0, 1]`, `k` odd.
pub fn switch_filter_state(mu: f64, k: usize) -> Result<SwitchFilterState> {
    validate_center(mu)?;
    validate_bits(k)?;
    let mut amplitudes: Vec<f64> = (0..1usize << k)
        .map(|label| {
            let st = switch_stats_label(label, k);
            branch_weight(mu, k, st.recorded_switches) * sign(st.zero_pairs)
        })
        .collect();
    let norm = amplitudes.iter().map(|a| a * a).sum::<f64>().sqrt();
    amplitudes.iter_mut().for_each(|a| *a /= norm);
    Ok(SwitchFilterState {
        mu,
        bits: k,
        amplitudes,
    })
}

/// `g(p, μ)`: the amplitude on `q¹ ⊗ |0_k⟩` left by the inverse circuit on
/// `r¹ ⊗ |μ⟩`, by exact enumeration of the records ending in 1.
pub fn g_filter(p: f64, mu: f64, k: usize) -> Result<f64> {
    Ok(g_filter_curve(mu, k, &[p])?[0])
}

/// `g(p, μ)` at many `p` with a single enumeration.
pub fn g_filter_curve(mu: f64, k: usize, ps: &[f64]) -> Result<Vec<f64>> {
    if let Some(p) = ps.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::validation(format!("overlap {p} outside [0, 1]")));
    }
    let coeffs = switch_filter_state(mu, k)?.accepted_coefficients();
    Ok(ps
        .iter()
        .map(|&p| {
            coeffs
                .iter()
                .enumerate()
                .map(|(s, c)| c * branch_weight(p, k, s))
                .sum()
        })
        .collect())
}

/// Regrouped form `Σ_ℓ C(k, 2ℓ) √(μ^{k−2ℓ}(1−μ)^{2ℓ} p^{k−2ℓ}(1−p)^{2ℓ})`.
pub fn g_filter_binomial(p: f64, mu: f64, k: usize) -> f64 {
    let mut binom = 1.0;
    let mut total = 0.0;
    for s in 0..=k {
        if s % 2 == 0 {
            total += binom * (branch_weight(mu, k, s) * branch_weight(p, k, s));
        }
        binom = binom * (k - s) as f64 / (s + 1) as f64;
    }
    total
}

/// Gaussian companion `½ exp(−(p−μ)²/2ε²)` with `ε² = 2μ(1−μ)/k`.
pub fn g_filter_gaussian(p: f64, mu: f64, k: usize) -> f64 {
    let var = 2.0 * mu * (1.0 - mu) / k as f64;
    if var == 0.0 {
        return if p == mu { 0.5 } else { 0.0 };
    }
    0.5 * (-(p - mu).powi(2) / (2.0 * var)).exp()
}

/// Variance of the normalized profile `g(p, μ)²` over `p ∈ [0, 1]`, next to
/// the two candidate scalings `2μ(1−μ)/k` and `2μ(1−μ)/k²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FilterVariance {
    pub mu: f64,
    pub bits: usize,
    pub measured: f64,
    pub per_k: f64,
    pub per_k_squared: f64,
}

impl FilterVariance {
    /// Which scaling is closer on a log scale.
    pub fn closer_scaling(&self) -> &'static str {
        let d1 = (self.measured / self.per_k).ln().abs();
        let d2 = (self.measured / self.per_k_squared).ln().abs();
        if d1 <= d2 {
            "2mu(1-mu)/k"
        } else {
            "2mu(1-mu)/k^2"
        }
    }
}

pub fn filter_variance(mu: f64, k: usize, grid_points: usize) -> Result<FilterVariance> {
    if grid_points < 3 {
        return Err(Error::validation("variance grid needs at least 3 points"));
    }
    let ps: Vec<f64> = (0..grid_points)
        .map(|i| i as f64 / (grid_points - 1) as f64)
        .collect();
    let w: Vec<f64> = g_filter_curve(mu, k, &ps)?.iter().map(|g| g * g).collect();
    let total: f64 = w.iter().sum();
    let mean = ps.iter().zip(&w).map(|(p, w)| p * w).sum::<f64>() / total;
    let measured = ps
        .iter()
        .zip(&w)
        .map(|(p, w)| (p - mean).powi(2) * w)
        .sum::<f64>()
        / total;
    let base = 2.0 * mu * (1.0 - mu);
    Ok(FilterVariance {
        mu,
        bits: k,
        measured,
        per_k: base / k as f64,
        per_k_squared: base / (k * k) as f64,
    })
}

/// Register plus one `k`-bit record block.
pub fn switch_layout(witness: usize, scratchpad: usize, k: usize) -> Result<RegisterLayout> {
    RegisterLayout::new(witness, scratchpad, 1, k)
}

fn check_circuit(
    q: &dyn ProjectorOp,
    r: &dyn ProjectorOp,
    amps: &[C64],
    layout: RegisterLayout,
) -> Result<()> {
    Error::check_dim(layout.dim(), amps.len())?;
    Error::check_dim(layout.register_dim(), q.dim())?;
    Error::check_dim(layout.register_dim(), r.dim())?;
    if layout.blocks() != 1 || layout.block_bits().is_multiple_of(2) {
        return Err(Error::validation(
            "switch circuit needs one record block of odd length",
        ));
    }
    Ok(())
}

/// Coherent recording of `P` onto record bit `t`: `P ⊗ X + (I − P) ⊗ I`.
fn record(amps: &mut [C64], p: &dyn ProjectorOp, layout: RegisterLayout, t: usize) {
    let reg = layout.register_dim();
    let stride = reg << t;
    amps.par_chunks_mut(2 * stride).for_each(|chunk| {
        let (lo, hi) = chunk.split_at_mut(stride);
        for (v0, v1) in lo.chunks_mut(reg).zip(hi.chunks_mut(reg)) {
            let diff: Vec<C64> = v1.iter().zip(v0.iter()).map(|(a, b)| a - b).collect();
            let w = p.project(&diff);
            for ((a, b), d) in v0.iter_mut().zip(v1.iter_mut()).zip(&w) {
                *a += d;
                *b -= d;
            }
        }
    });
}

fn measured_projector<'a>(
    q: &'a dyn ProjectorOp,
    r: &'a dyn ProjectorOp,
    t: usize,
) -> &'a dyn ProjectorOp {
    // Record bit t holds measurement t + 1; odd measurements are R.
    if t.is_multiple_of(2) {
        r
    } else {
        q
    }
}

/// Forward circuit in place: recordings of `R, Q, R, …, R`.
pub fn apply_forward_switch_circuit(
    q: &dyn ProjectorOp,
    r: &dyn ProjectorOp,
    amps: &mut [C64],
    layout: RegisterLayout,
) -> Result<()> {
    check_circuit(q, r, amps, layout)?;
    for t in 0..layout.block_bits() {
        record(amps, measured_projector(q, r, t), layout, t);
    }
    Ok(())
}

/// Inverse circuit in place: the self-inverse recordings in reverse order.
pub fn inverse_switch_circuit_in_place(
    q: &dyn ProjectorOp,
    r: &dyn ProjectorOp,
    amps: &mut [C64],
    layout: RegisterLayout,
) -> Result<()> {
    check_circuit(q, r, amps, layout)?;
    for t in (0..layout.block_bits()).rev() {
        record(amps, measured_projector(q, r, t), layout, t);
    }
    Ok(())
}

/// Runs the inverse circuit on `ψ ⊗ |μ⟩`.
pub fn apply_inverse_switch_circuit(
    q: &dyn ProjectorOp,
    r: &dyn ProjectorOp,
    psi: &StateVector,
    mu: f64,
    k: usize,
) -> Result<StateVector> {
    let reg = psi.layout();
    if reg.ancilla_qubits() != 0 {
        return Err(Error::validation(
            "input state must not carry ancilla qubits",
        ));
    }
    let layout = switch_layout(reg.system_qubits(), reg.scratchpad_qubits(), k)?;
    let filter = switch_filter_state(mu, k)?;
    let mut amps = psi
        .tensor_ancilla(layout, &filter.to_complex())?
        .into_amplitudes();
    inverse_switch_circuit_in_place(q, r, &mut amps, layout)?;
    StateVector::from_amplitudes(layout, amps)
}
