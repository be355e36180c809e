//! Witness preparation for a verifier circuit.
//!
//! The two projectors are `Q`, the all-zero scratchpad, and `R`, the
//! verifier's accepting subspace. Their Jordan blocks carry the acceptance
//! probabilities `p` of witnesses with clean scratchpads. An alternating
//! sequence of coherently recorded `R` and `Q` measurements writes `p` into
//! the switch statistics of the record; running that circuit backwards on a
//! switch filter state centered at `μ` and amplifying the clean-record,
//! clean-scratchpad subspace keeps only witnesses with `p ≈ μ`.

mod switch;
mod verifier;
mod witness;

pub use switch::{
    apply_forward_switch_circuit, apply_inverse_switch_circuit, closed_form_amplitude,
    filter_variance, g_filter, g_filter_binomial, g_filter_curve, g_filter_gaussian,
    inverse_switch_circuit_in_place, switch_filter_state, switch_layout, switch_stats,
    switch_stats_label, FilterVariance, SwitchFilterState, SwitchStats, MAX_ENUMERATION_BITS,
};
pub use verifier::{parse_verifier_matrix, VerifierCircuit, UNITARITY_TOLERANCE};
pub use witness::{prepare_witness, witness_bits, WitnessOutcome, WitnessReport};
