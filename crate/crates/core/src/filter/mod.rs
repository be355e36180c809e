//! Momentum filter states, the phase-estimation circuit and its inverse, and
//! the filter-parameter rules.

mod momentum;
mod params;
mod phase_estimation;

pub use momentum::{
    momentum_overlap, momentum_overlap_closed_form, momentum_state, overlap_lower_bound_radius,
    overlap_upper_bound, phase_distance, MomentumState, MAX_PHASE_BITS,
};
pub use params::{select_filter_params, select_filter_params_with_cap, FilterSpec};
pub use phase_estimation::{
    apply_inverse_phase_estimation, apply_inverse_phase_estimation_with, apply_phase_estimation,
    apply_readout_fourier, filter_layout, filter_projector, validate_phase_window,
};
