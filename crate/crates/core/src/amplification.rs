//! Amplitude amplification of the all-zero ancilla block.
//!
//! After the inverse phase-estimation filter the state `Φ` has overlap
//! `q = ‖QΦ‖²` with the filter projector `Q`. Grover rounds rotate `Φ` towards
//! the image of `Q` at angle `θ = asin √q` per half-step; a final projective
//! measurement of `Q` either succeeds (the output is the filtered state with
//! clean ancillas) or is retried. Runs whose overlap falls below the abort
//! threshold `1/N²` are declared aborted without amplification.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::filter::{
    apply_inverse_phase_estimation_with, filter_projector, select_filter_params, FilterSpec,
};
use crate::hamiltonians::{NormalizedHamiltonian, DEFAULT_WINDOW_MARGIN};
use crate::quantum::{
    expectation_value, inner, measure_projector, random_state_from, HermitianOperator, ProjectorOp,
    RegisterLayout, StateVector, C64,
};
use crate::rng::RngStream;

pub const DEFAULT_MAX_RETRIES: usize = 8;

/// Largest admissible drift of `‖(I-Q)ψ‖` on a successful output.
pub const PURITY_TOLERANCE: f64 = 1e-9;

const ROUNDING_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AmplifyOptions {
    pub max_retries: usize,
    /// `N`: sets the abort threshold `1/N²` and the count scale of `m̂`.
    /// `None` disables the abort rule.
    pub count_scale: Option<usize>,
    /// Relative standard deviation of multiplicative noise applied to the
    /// overlap before the iteration count is chosen; 0 gives the exact rule.
    pub overlap_noise: f64,
}

impl Default for AmplifyOptions {
    fn default() -> Self {
        AmplifyOptions {
            max_retries: DEFAULT_MAX_RETRIES,
            count_scale: None,
            overlap_noise: 0.0,
        }
    }
}

impl AmplifyOptions {
    pub fn abort_threshold(&self) -> f64 {
        match self.count_scale {
            Some(n) => 1.0 / (n as f64 * n as f64),
            None => 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AmplificationReport {
    /// Exact `‖QΦ‖²` of the filtered state.
    pub overlap: f64,
    /// The overlap used to pick the iteration count (differs from `overlap`
    /// only under overlap noise).
    pub estimated_overlap: f64,
    pub iterations: usize,
    /// Failed measurements before the final one.
    pub retries: usize,
    pub aborted: bool,
    pub succeeded: bool,
    /// `m̂ = clip(2Nq, 0, N)`; absent without a count scale.
    pub estimated_count: Option<f64>,
    /// Predicted probability of the `Q` outcome after the chosen rounds.
    pub success_probability: f64,
    /// `⟨H⟩` of the output in original units.
    pub output_energy: Option<f64>,
    /// `⟨H⟩` of the output in the normalized window.
    pub output_energy_normalized: Option<f64>,
    /// Whether the filter parameters satisfy the bandwidth rules for this
    /// register size.
    pub premises_met: bool,
}

/// `‖QΦ‖²`.
pub fn compute_overlap(phi: &StateVector, q: &dyn ProjectorOp) -> Result<f64> {
    Error::check_dim(q.dim(), phi.dim())?;
    Ok(q.weight(phi.amplitudes()))
}

fn rotation_angle(q: f64) -> Result<f64> {
    if !(q > 0.0 && q <= 1.0 + 1e-12) {
        return Err(Error::UndefinedAmplification(format!(
            "overlap {q} must lie in (0, 1]"
        )));
    }
    Ok(q.min(1.0).sqrt().asin())
}

/// Nearest integer to `π/(4θ) − 1/2`, ties rounded down, never negative.
pub fn grover_iterations(q: f64) -> Result<usize> {
    let theta = rotation_angle(q)?;
    let x = std::f64::consts::PI / (4.0 * theta) - 0.5;
    Ok((x - 0.5 - ROUNDING_SLACK).ceil().max(0.0) as usize)
}

/// `sin²((2m+1)θ)` with `θ = asin √q`.
pub fn grover_success_probability(q: f64, iterations: usize) -> Result<f64> {
    let theta = rotation_angle(q)?;
    Ok(((2 * iterations + 1) as f64 * theta).sin().powi(2))
}

/// `m̂ = clip(2Nq, 0, N)`.
pub fn estimated_count(q: f64, n: usize) -> f64 {
    (2.0 * n as f64 * q).clamp(0.0, n as f64)
}

/// One Grover round: the oracle `I − 2Q`, then the reflection about `Φ`.
pub fn grover_round(psi: &mut [C64], phi: &[C64], q: &dyn ProjectorOp) {
    let projected = q.project(psi);
    psi.iter_mut()
        .zip(&projected)
        .for_each(|(a, p)| *a -= 2.0 * p);
    let c = 2.0 * inner(phi, psi);
    psi.iter_mut().zip(phi).for_each(|(a, f)| *a = c * f - *a);
}

/// Amplifies `Φ` into the image of `Q` and measures.
///
/// The returned state is `QΦ/‖QΦ‖` on success and `None` on abort or when the
/// retries are exhausted.
pub fn amplify(
    phi: &StateVector,
    q: &dyn ProjectorOp,
    options: &AmplifyOptions,
    rng: &mut RngStream,
) -> Result<(Option<StateVector>, AmplificationReport)> {
    if (phi.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::validation(format!(
            "input norm {} is not 1",
            phi.norm()
        )));
    }
    let overlap = compute_overlap(phi, q)?;
    let mut report = AmplificationReport {
        overlap,
        estimated_overlap: overlap,
        iterations: 0,
        retries: 0,
        aborted: false,
        succeeded: false,
        estimated_count: options.count_scale.map(|n| estimated_count(overlap, n)),
        success_probability: overlap,
        output_energy: None,
        output_energy_normalized: None,
        premises_met: true,
    };
    if overlap < options.abort_threshold() || overlap <= 0.0 {
        report.aborted = true;
        return Ok((None, report));
    }
    let estimate = if options.overlap_noise > 0.0 {
        let z: f64 = rng.sample(StandardNormal);
        (overlap * (1.0 + options.overlap_noise * z)).clamp(f64::MIN_POSITIVE, 1.0)
    } else {
        overlap
    };
    report.estimated_overlap = estimate;
    report.iterations = grover_iterations(estimate)?;
    report.success_probability = grover_success_probability(overlap, report.iterations)?;

    let mut psi = phi.amplitudes().to_vec();
    for _ in 0..report.iterations {
        grover_round(&mut psi, phi.amplitudes(), q);
    }
    let amplified = StateVector::normalized(phi.layout(), psi)?;
    // Every retry re-runs the same deterministic circuit, so the
    // pre-measurement state is reused.
    for attempt in 0..=options.max_retries {
        let m = measure_projector(&amplified, q, rng)?;
        if m.outcome {
            let out = m.collapsed.amplitudes();
            let leak = crate::quantum::norm_sqr(
                &out.iter()
                    .zip(q.project(out))
                    .map(|(a, p)| a - p)
                    .collect::<Vec<_>>(),
            )
            .sqrt();
            if leak > PURITY_TOLERANCE {
                return Err(Error::Numerical(format!(
                    "post-measurement ancilla leakage {leak:e}"
                )));
            }
            report.retries = attempt;
            report.succeeded = true;
            return Ok((Some(m.collapsed), report));
        }
    }
    report.retries = options.max_retries;
    Ok((None, report))
}

/// Inverse phase-estimation filter followed by amplification, for one
/// Hamiltonian and one bandwidth.
///
/// Centers and bandwidths are in normalized units (the phase window
/// `[δ, 1−δ]`); reported energies are given in both unit systems.
#[derive(Clone, Debug)]
pub struct FilterPipeline {
    pub hamiltonian: NormalizedHamiltonian,
    pub eps: f64,
    pub options: AmplifyOptions,
    spec: FilterSpec,
}

#[derive(Clone, Debug)]
pub struct FilterOutcome {
    pub mu: f64,
    pub spec: FilterSpec,
    pub state: Option<StateVector>,
    pub report: AmplificationReport,
}

impl FilterPipeline {
    /// Picks `k` and `η` from the bandwidth rules at `μ = 1/2`; the
    /// repetitions are the larger of the two `η` bounds for any `μ ≤ 1`.
    pub fn new(h: &HermitianOperator, eps: f64) -> Result<Self> {
        let hamiltonian = NormalizedHamiltonian::new(h, DEFAULT_WINDOW_MARGIN)?;
        let spec = select_filter_params(eps, hamiltonian.system_qubits(), 0.5)?;
        let options = AmplifyOptions {
            count_scale: Some(hamiltonian.operator.dim()),
            ..AmplifyOptions::default()
        };
        Ok(FilterPipeline {
            hamiltonian,
            eps,
            options,
            spec,
        })
    }

    /// Uses explicit filter parameters; `spec.mu` is replaced per run.
    pub fn with_spec(h: &HermitianOperator, spec: FilterSpec) -> Result<Self> {
        let hamiltonian = NormalizedHamiltonian::new(h, DEFAULT_WINDOW_MARGIN)?;
        let n = hamiltonian.system_qubits();
        RegisterLayout::new(n, 0, spec.repetitions, spec.bits)?;
        let options = AmplifyOptions {
            count_scale: Some(hamiltonian.operator.dim()),
            ..AmplifyOptions::default()
        };
        Ok(FilterPipeline {
            hamiltonian,
            eps: spec.eps,
            options,
            spec,
        })
    }

    pub fn spec(&self) -> FilterSpec {
        self.spec
    }

    pub fn n(&self) -> usize {
        self.hamiltonian.system_qubits()
    }

    /// Normalized centers `δ, δ + step, …` up to `1 − δ`, with step
    /// `2^{-k}/(2π√η)`.
    pub fn mu_grid(&self) -> Vec<f64> {
        let step = self.spec.resolution();
        let delta = self.hamiltonian.map.margin();
        let count = ((1.0 - 2.0 * delta) / step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| delta + i as f64 * step).collect()
    }

    /// One run at normalized center `mu`. The random input state uses
    /// `rng.split(0)` and the measurement record `rng.split(1)`.
    pub fn run(&self, mu: f64, rng: &RngStream) -> Result<FilterOutcome> {
        let spec = self.spec.with_center(mu)?;
        let n = self.n();
        let psi = random_state_from(RegisterLayout::system_only(n)?, &mut rng.split(0));
        let filtered =
            apply_inverse_phase_estimation_with(&self.hamiltonian.spectrum, &psi, &spec)?;
        let q = filter_projector(filtered.layout());
        let (state, mut report) = amplify(&filtered, &q, &self.options, &mut rng.split(1))?;
        report.premises_met = spec.premises_met(n);
        if let Some(out) = &state {
            let e = expectation_value(out, &self.hamiltonian.operator)?;
            report.output_energy_normalized = Some(e);
            report.output_energy = Some(self.hamiltonian.map.to_original(e));
        }
        Ok(FilterOutcome {
            mu,
            spec,
            state,
            report,
        })
    }
}

/// Whole pipeline at normalized center `mu` and bandwidth `eps`.
pub fn prepare_filtered_state(
    h: &HermitianOperator,
    mu: f64,
    eps: f64,
    seed: u64,
    max_retries: usize,
) -> Result<(Option<StateVector>, AmplificationReport)> {
    let mut pipeline = FilterPipeline::new(h, eps)?;
    pipeline.options.max_retries = max_retries;
    let out = pipeline.run(mu, &RngStream::from_seed(seed))?;
    Ok((out.state, out.report))
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepPoint {
    pub mu: f64,
    pub report: AmplificationReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepResult {
    pub trace: Vec<SweepPoint>,
    /// The lowest successful center: the ground-energy estimate in
    /// normalized units.
    pub first_success: Option<f64>,
}

impl FilterPipeline {
    /// Runs every center of [`mu_grid`](Self::mu_grid) in parallel; the run at
    /// grid index `i` owns `RngStream::from_seed(seed).split(i)`.
    pub fn sweep(&self, seed: u64) -> Result<SweepResult> {
        let root = RngStream::from_seed(seed);
        let trace = self
            .mu_grid()
            .into_par_iter()
            .enumerate()
            .map(|(i, mu)| {
                self.run(mu, &root.split(i as u64)).map(|o| SweepPoint {
                    mu,
                    report: o.report,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let first_success = trace.iter().find(|p| p.report.succeeded).map(|p| p.mu);
        Ok(SweepResult {
            trace,
            first_success,
        })
    }
}

pub fn sweep_mu(h: &HermitianOperator, eps: f64, seed: u64) -> Result<SweepResult> {
    FilterPipeline::new(h, eps)?.sweep(seed)
}
