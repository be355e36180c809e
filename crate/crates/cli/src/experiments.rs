//! Turns a validated configuration into an ordered list of independent tasks,
//! one per output row.
//!
//! All heavy shared state (normalized Hamiltonian, filter pipeline, density
//! of states, verifier projectors) is built once while planning, so config
//! and capacity errors surface before any row is written.

use std::sync::Arc;
use std::time::Instant;

use eigenfilter::amplification::{AmplificationReport, FilterPipeline};
use eigenfilter::filter::{
    momentum_overlap, overlap_lower_bound_radius, overlap_upper_bound, phase_distance, FilterSpec,
};
use eigenfilter::jordan::{jordan_decompose, run_naive_demo, JordanDecomposition};
use eigenfilter::qma::{prepare_witness, VerifierCircuit};
use eigenfilter::quantum::{max_abs, spectral_decompose, HermitianOperator, Projector};
use eigenfilter::thermal::{DosOptions, ThermalSampler, ThermalSpec};
use eigenfilter::{RngStream, C64};
use nalgebra::DMatrix;

use crate::config::{Centers, ExperimentConfig, ExperimentKind, VerifierConfig, VerifierFixture};
use crate::error::{CliError, CliResult};
use crate::output::{Cell, Record, ResultRow};

pub type Task<R> = Box<dyn Fn() -> CliResult<R> + Send + Sync>;

/// Default readout length of the naive demo.
pub const DEFAULT_NAIVE_BITS: usize = 4;
pub const DEFAULT_BOUNDS_BITS: (usize, usize) = (2, 8);
pub const DEFAULT_GRID_POINTS: usize = 100_000;
pub const DEFAULT_LOWER_SAMPLES: usize = 1_000;
pub const MAX_BOUNDS_BITS: usize = 24;
pub const MAX_ETA_SAMPLED: usize = 16;

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn validate_centers(
    config: &ExperimentConfig,
    values: &[f64],
    lo_open: f64,
    hi: f64,
    hi_open: bool,
) -> CliResult<()> {
    if values.is_empty() {
        return Err(config.invalid("mu", "center list is empty"));
    }
    for &mu in values {
        let ok = mu > lo_open && if hi_open { mu < hi } else { mu <= hi };
        if !ok {
            let close = if hi_open { ')' } else { ']' };
            return Err(
                config.invalid("mu", format!("center {mu} outside ({lo_open}, {hi}{close}"))
            );
        }
    }
    Ok(())
}

fn build_pipeline(config: &ExperimentConfig, kind: ExperimentKind) -> CliResult<FilterPipeline> {
    let h = config.model(kind)?;
    let eps = config.require(&config.eps, "eps", kind)?;
    let mut pipeline = match (config.bits, config.repetitions) {
        (None, None) => FilterPipeline::new(&h, eps),
        (bits, reps) => {
            let auto = FilterPipeline::new(&h, eps).ok().map(|p| p.spec());
            let pick = |v: Option<usize>, field: &str, fallback: Option<usize>| {
                v.or(fallback).ok_or_else(|| {
                    config.invalid(
                        field,
                        "automatic selection failed; give both `bits` and `repetitions`",
                    )
                })
            };
            let bits = pick(bits, "bits", auto.map(|s| s.bits))?;
            let reps = pick(reps, "repetitions", auto.map(|s| s.repetitions))?;
            FilterSpec::new(0.5, eps, bits, reps)
                .and_then(|spec| FilterPipeline::with_spec(&h, spec))
        }
    }
    .map_err(|e| match e {
        eigenfilter::Error::Capacity { .. } => CliError::Core(e),
        other => config.invalid("eps", other),
    })?;
    if let Some(r) = config.max_retries {
        pipeline.options.max_retries = r;
    }
    Ok(pipeline)
}

fn amplification_row(
    kind: ExperimentKind,
    seed: u64,
    mu: f64,
    spec: &FilterSpec,
    report: &AmplificationReport,
    nearest: f64,
    wall_time_ms: f64,
) -> ResultRow {
    ResultRow {
        experiment: kind.name().to_owned(),
        seed,
        mu: Some(mu),
        eps: Some(spec.eps),
        k: Some(spec.bits as u64),
        eta: Some(spec.repetitions as u64),
        q: Some(report.overlap),
        iterations: Some(report.iterations as u64),
        retries: Some(report.retries as u64),
        aborted: report.aborted,
        energy_out: if report.succeeded {
            report.output_energy
        } else {
            None
        },
        energy_exact_nearest: Some(nearest),
        wall_time_ms,
        succeeded: report.succeeded,
    }
}

/// Nearest exact eigenvalue to a normalized center, in original units.
fn nearest_original(pipeline: &FilterPipeline, mu: f64) -> f64 {
    let h = &pipeline.hamiltonian;
    h.map.to_original(h.spectrum.nearest_eigenvalue(mu))
}

/// `filter`: every (center, seed) pair; `mu: "auto"` uses the sweep grid.
pub fn plan_filter(config: &ExperimentConfig, seeds: &[u64]) -> CliResult<Vec<Task<ResultRow>>> {
    let kind = ExperimentKind::Filter;
    let pipeline = Arc::new(build_pipeline(config, kind)?);
    let centers = match config.require(&config.mu, "mu", kind)? {
        Centers::Auto => pipeline.mu_grid(),
        Centers::Values(v) => {
            validate_centers(config, &v, 0.0, 1.0, true)?;
            v
        }
    };
    let mut tasks: Vec<Task<ResultRow>> = Vec::new();
    for mu in centers {
        for &seed in seeds {
            let pipeline = Arc::clone(&pipeline);
            tasks.push(Box::new(move || {
                let start = Instant::now();
                let out = pipeline.run(mu, &RngStream::from_seed(seed))?;
                let nearest = nearest_original(&pipeline, mu);
                Ok(amplification_row(
                    kind,
                    seed,
                    mu,
                    &out.spec,
                    &out.report,
                    nearest,
                    elapsed_ms(start),
                ))
            }));
        }
    }
    Ok(tasks)
}

/// `sweep`: the full center grid for every seed. Grid point `i` of seed `s`
/// uses `RngStream::from_seed(s).split(i)`, as `FilterPipeline::sweep` does.
pub fn plan_sweep(config: &ExperimentConfig, seeds: &[u64]) -> CliResult<Vec<Task<ResultRow>>> {
    let kind = ExperimentKind::Sweep;
    if let Some(Centers::Values(_)) = config.mu {
        return Err(config.invalid(
            "mu",
            "a sweep always covers the full grid; use \"auto\" or omit it",
        ));
    }
    let pipeline = Arc::new(build_pipeline(config, kind)?);
    let mut tasks: Vec<Task<ResultRow>> = Vec::new();
    for (i, mu) in pipeline.mu_grid().into_iter().enumerate() {
        for &seed in seeds {
            let pipeline = Arc::clone(&pipeline);
            tasks.push(Box::new(move || {
                let start = Instant::now();
                let out = pipeline.run(mu, &RngStream::from_seed(seed).split(i as u64))?;
                let nearest = nearest_original(&pipeline, mu);
                Ok(amplification_row(
                    kind,
                    seed,
                    mu,
                    &out.spec,
                    &out.report,
                    nearest,
                    elapsed_ms(start),
                ))
            }));
        }
    }
    Ok(tasks)
}

/// `thermal`: one Gibbs-sampled preparation per seed from a shared sampler.
pub fn plan_thermal(config: &ExperimentConfig, seeds: &[u64]) -> CliResult<Vec<Task<ResultRow>>> {
    let kind = ExperimentKind::Thermal;
    let pipeline = build_pipeline(config, kind)?;
    let temperature = config.require(&config.temperature, "temperature", kind)?;
    let spec = ThermalSpec::new(temperature).map_err(|e| config.invalid("temperature", e))?;
    let options = DosOptions {
        step: config.dos_step,
        ..DosOptions::default()
    };
    let sampler =
        ThermalSampler::with_pipeline(pipeline, spec, config.dos_seed.unwrap_or(0), &options)
            .map_err(|e| config.invalid("dos_step", e))?;
    let sampler = Arc::new(sampler);
    Ok(seeds
        .iter()
        .map(|&seed| {
            let sampler = Arc::clone(&sampler);
            Box::new(move || {
                let start = Instant::now();
                let out = sampler.prepare(seed)?;
                let spec = sampler.pipeline.spec();
                let nearest = nearest_original(&sampler.pipeline, out.energy);
                Ok(amplification_row(
                    kind,
                    seed,
                    out.energy,
                    &spec,
                    &out.report,
                    nearest,
                    elapsed_ms(start),
                ))
            }) as Task<ResultRow>
        })
        .collect())
}

fn load_verifier(
    config: &ExperimentConfig,
    verifier: &VerifierConfig,
) -> CliResult<VerifierCircuit> {
    let built = match verifier {
        VerifierConfig::Fixture(VerifierFixture::Identity) => {
            Ok(VerifierCircuit::identity_fixture())
        }
        VerifierConfig::Fixture(VerifierFixture::Rotation { theta }) => {
            VerifierCircuit::rotation_fixture(*theta)
        }
        VerifierConfig::Matrix(m) => {
            let path = config.base_dir.join(&m.matrix_file);
            let text = std::fs::read_to_string(&path).map_err(|e| {
                config.invalid(
                    "matrix_file",
                    format!("cannot read {}: {e}", path.display()),
                )
            })?;
            VerifierCircuit::from_matrix_text(
                &text,
                m.witness_qubits,
                m.scratchpad_qubits,
                m.completeness,
                m.soundness,
                path.display().to_string(),
            )
        }
    };
    built.map_err(|e| config.invalid("verifier", e))
}

/// `qma`: witness preparation for every (center, seed) pair. The energy
/// columns hold acceptance probabilities: `energy_out` is `‖R w‖²` of the
/// witness and `energy_exact_nearest` the closest Jordan overlap `p`.
/// `mu: "auto"` uses the distinct overlaps of the verifier's blocks.
pub fn plan_qma(config: &ExperimentConfig, seeds: &[u64]) -> CliResult<Vec<Task<ResultRow>>> {
    let kind = ExperimentKind::Qma;
    let verifier = load_verifier(config, &config.require(&config.verifier, "verifier", kind)?)?;
    let eps = config.require(&config.eps, "eps", kind)?;
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(config.invalid("eps", format!("bandwidth {eps} must be positive")));
    }
    let jordan = jordan_decompose(&verifier.q_projector(), &verifier.r_projector()?)?;
    let spectrum: Vec<f64> = jordan.q_side_spectrum();
    let centers = match config.require(&config.mu, "mu", kind)? {
        Centers::Auto => {
            let mut ps: Vec<f64> = spectrum.iter().copied().filter(|p| *p > 0.0).collect();
            ps.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
            if ps.is_empty() {
                return Err(config.invalid("mu", "verifier accepts no clean-scratchpad state"));
            }
            ps
        }
        Centers::Values(v) => {
            validate_centers(config, &v, 0.0, 1.0, false)?;
            v
        }
    };
    let max_retries = config
        .max_retries
        .unwrap_or(eigenfilter::amplification::DEFAULT_MAX_RETRIES);
    let verifier = Arc::new(verifier);
    let spectrum = Arc::new(spectrum);
    let mut tasks: Vec<Task<ResultRow>> = Vec::new();
    for mu in centers {
        for &seed in seeds {
            let verifier = Arc::clone(&verifier);
            let spectrum = Arc::clone(&spectrum);
            tasks.push(Box::new(move || {
                let start = Instant::now();
                let out = prepare_witness(&verifier, mu, eps, seed, max_retries)?;
                let r = &out.report;
                let nearest = spectrum
                    .iter()
                    .copied()
                    .min_by(|a, b| (a - mu).abs().total_cmp(&(b - mu).abs()));
                Ok(ResultRow {
                    experiment: kind.name().to_owned(),
                    seed,
                    mu: Some(mu),
                    eps: Some(eps),
                    k: Some(r.bits as u64),
                    eta: Some(1),
                    q: Some(r.amplification.overlap),
                    iterations: Some(r.amplification.iterations as u64),
                    retries: Some(r.amplification.retries as u64),
                    aborted: r.amplification.aborted,
                    energy_out: r.acceptance_probability,
                    energy_exact_nearest: nearest,
                    wall_time_ms: elapsed_ms(start),
                    succeeded: r.amplification.succeeded,
                })
            }));
        }
    }
    Ok(tasks)
}

/// One naive-algorithm run: measured residual overlap against the formula.
#[derive(Clone, Debug, PartialEq)]
pub struct NaiveRow {
    pub seed: u64,
    pub threshold: f64,
    pub bits: usize,
    pub iterations: usize,
    pub residual_overlap: f64,
    pub predicted: f64,
    pub wall_time_ms: f64,
}

impl Record for NaiveRow {
    fn header() -> &'static [&'static str] {
        &[
            "experiment",
            "seed",
            "threshold",
            "bits",
            "iterations",
            "residual_overlap",
            "predicted",
            "abs_error",
            "wall_time_ms",
        ]
    }

    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::Text("naive".into()),
            Cell::Int(Some(self.seed)),
            Cell::Real(Some(self.threshold)),
            Cell::Int(Some(self.bits as u64)),
            Cell::Int(Some(self.iterations as u64)),
            Cell::Real(Some(self.residual_overlap)),
            Cell::Real(Some(self.predicted)),
            Cell::Real(Some((self.residual_overlap - self.predicted).abs())),
            Cell::Real(Some(self.wall_time_ms)),
        ]
    }

    fn success(&self) -> bool {
        true
    }
}

pub fn plan_naive(config: &ExperimentConfig, seeds: &[u64]) -> CliResult<Vec<Task<NaiveRow>>> {
    let kind = ExperimentKind::Naive;
    let h = Arc::new(config.model(kind)?);
    let threshold = config.require(&config.threshold, "threshold", kind)?;
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(config.invalid(
            "threshold",
            format!("threshold {threshold} must lie in (0, 1)"),
        ));
    }
    let bits = config.bits.unwrap_or(DEFAULT_NAIVE_BITS);
    // Fail on capacity before any row is written.
    run_naive_demo(&h, threshold, bits, 0).map_err(|e| match e {
        eigenfilter::Error::Capacity { .. } => CliError::Core(e),
        other => config.invalid("bits", other),
    })?;
    Ok(seeds
        .iter()
        .map(|&seed| {
            let h = Arc::clone(&h);
            Box::new(move || {
                let start = Instant::now();
                let r = run_naive_demo(&h, threshold, bits, seed)?;
                Ok(NaiveRow {
                    seed,
                    threshold,
                    bits,
                    iterations: r.iterations,
                    residual_overlap: r.residual_overlap,
                    predicted: r.predicted,
                    wall_time_ms: elapsed_ms(start),
                })
            }) as Task<NaiveRow>
        })
        .collect())
}

/// Consistency of one Jordan decomposition.
#[derive(Clone, Debug, PartialEq)]
pub struct JordanRow {
    pub seed: u64,
    pub dim: usize,
    pub rank_q: usize,
    pub rank_r: usize,
    pub blocks: usize,
    pub fixed: usize,
    pub q_null: usize,
    pub r_null: usize,
    pub borderline: usize,
    pub min_p: Option<f64>,
    pub max_p: Option<f64>,
    /// Largest gap between the sorted nonzero spectra of `QRQ` and `RQR`.
    pub spectrum_mismatch: f64,
    pub max_relation_residual: f64,
    pub rebuild_error: f64,
    pub wall_time_ms: f64,
}

impl Record for JordanRow {
    fn header() -> &'static [&'static str] {
        &[
            "experiment",
            "seed",
            "dim",
            "rank_q",
            "rank_r",
            "blocks",
            "fixed",
            "q_null",
            "r_null",
            "borderline",
            "min_p",
            "max_p",
            "spectrum_mismatch",
            "max_relation_residual",
            "rebuild_error",
            "wall_time_ms",
        ]
    }

    fn cells(&self) -> Vec<Cell> {
        let int = |v: usize| Cell::Int(Some(v as u64));
        vec![
            Cell::Text("jordan".into()),
            Cell::Int(Some(self.seed)),
            int(self.dim),
            int(self.rank_q),
            int(self.rank_r),
            int(self.blocks),
            int(self.fixed),
            int(self.q_null),
            int(self.r_null),
            int(self.borderline),
            Cell::Real(self.min_p),
            Cell::Real(self.max_p),
            Cell::Real(Some(self.spectrum_mismatch)),
            Cell::Real(Some(self.max_relation_residual)),
            Cell::Real(Some(self.rebuild_error)),
            Cell::Real(Some(self.wall_time_ms)),
        ]
    }

    fn success(&self) -> bool {
        true
    }
}

/// Nonzero eigenvalues (above `1e-9`) of a Hermitian product, ascending.
fn nonzero_spectrum(m: DMatrix<C64>) -> CliResult<Vec<f64>> {
    let op = HermitianOperator::new((&m + m.adjoint()) * C64::new(0.5, 0.0), "product")?;
    Ok(spectral_decompose(&op)?
        .eigenvalues()
        .iter()
        .copied()
        .filter(|x| *x > 1e-9)
        .collect())
}

pub fn jordan_row(seed: u64, q: &Projector, r: &Projector, start: Instant) -> CliResult<JordanRow> {
    let j: JordanDecomposition = jordan_decompose(q, r)?;
    let (qm, rm) = (q.matrix(), r.matrix());
    let a = nonzero_spectrum(qm * rm * qm)?;
    let b = nonzero_spectrum(rm * qm * rm)?;
    let spectrum_mismatch = if a.len() != b.len() {
        f64::INFINITY
    } else {
        a.iter()
            .zip(&b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    };
    let max_relation_residual = j
        .blocks
        .iter()
        .map(|blk| blk.residuals(q, r).max())
        .fold(0.0, f64::max);
    let rebuild_error = max_abs(&(j.rebuild_q() - qm)).max(max_abs(&(j.rebuild_r() - rm)));
    let ps = j.blocks.iter().map(|b| b.p);
    Ok(JordanRow {
        seed,
        dim: j.dim,
        rank_q: q.rank(),
        rank_r: r.rank(),
        blocks: j.blocks.len(),
        fixed: j.fixed.len(),
        q_null: j.q_null.len(),
        r_null: j.r_null.len(),
        borderline: j.blocks.iter().filter(|b| b.borderline).count(),
        min_p: ps.clone().min_by(f64::total_cmp),
        max_p: ps.max_by(f64::total_cmp),
        spectrum_mismatch,
        max_relation_residual,
        rebuild_error,
        wall_time_ms: elapsed_ms(start),
    })
}

/// `jordan`: the verifier's projector pair when `verifier` is given,
/// otherwise a Haar-random pair per seed (`split(0)` for `Q`, `split(1)`
/// for `R`).
pub fn plan_jordan(config: &ExperimentConfig, seeds: &[u64]) -> CliResult<Vec<Task<JordanRow>>> {
    let kind = ExperimentKind::Jordan;
    if let Some(v) = &config.verifier {
        let verifier = load_verifier(config, v)?;
        let pair = Arc::new((verifier.q_projector(), verifier.r_projector()?));
        return Ok(seeds
            .iter()
            .map(|&seed| {
                let pair = Arc::clone(&pair);
                Box::new(move || jordan_row(seed, &pair.0, &pair.1, Instant::now()))
                    as Task<JordanRow>
            })
            .collect());
    }
    let dim = config.require(&config.dim, "dim", kind)?;
    let rank_q = config.require(&config.rank_q, "rank_q", kind)?;
    let rank_r = config.require(&config.rank_r, "rank_r", kind)?;
    if dim == 0 || dim > eigenfilter::jordan::NAIVE_DEMO_DIMENSION_CAP {
        return Err(config.invalid(
            "dim",
            format!(
                "dimension {dim} outside 1..={}",
                eigenfilter::jordan::NAIVE_DEMO_DIMENSION_CAP
            ),
        ));
    }
    for (field, rank) in [("rank_q", rank_q), ("rank_r", rank_r)] {
        if rank > dim {
            return Err(config.invalid(field, format!("rank {rank} exceeds dimension {dim}")));
        }
    }
    Ok(seeds
        .iter()
        .map(|&seed| {
            Box::new(move || {
                let start = Instant::now();
                let root = RngStream::from_seed(seed);
                let q = Projector::random(dim, rank_q, &mut root.split(0))?;
                let r = Projector::random(dim, rank_r, &mut root.split(1))?;
                jordan_row(seed, &q, &r, start)
            }) as Task<JordanRow>
        })
        .collect())
}

/// Grid check of both momentum-overlap bounds for one `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundsRow {
    pub seed: u64,
    pub k: usize,
    pub grid_points: usize,
    /// `max(|⟨φ|μ⟩| − 1/(2^{k+1} d), 0)` over the grid.
    pub max_upper_violation: f64,
    /// Largest `|⟨φ|μ⟩| · 2^{k+1} d`; at most 1 when the bound holds.
    pub max_upper_ratio: f64,
    pub lower_samples: usize,
    /// `max(1/2 − |⟨φ|μ⟩|^η, 0)` over samples inside the radius.
    pub max_lower_violation: f64,
    pub min_lower_value: f64,
    pub wall_time_ms: f64,
}

impl Record for BoundsRow {
    fn header() -> &'static [&'static str] {
        &[
            "experiment",
            "seed",
            "k",
            "grid_points",
            "max_upper_violation",
            "max_upper_ratio",
            "lower_samples",
            "max_lower_violation",
            "min_lower_value",
            "wall_time_ms",
        ]
    }

    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::Text("bounds".into()),
            Cell::Int(Some(self.seed)),
            Cell::Int(Some(self.k as u64)),
            Cell::Int(Some(self.grid_points as u64)),
            Cell::Real(Some(self.max_upper_violation)),
            Cell::Real(Some(self.max_upper_ratio)),
            Cell::Int(Some(self.lower_samples as u64)),
            Cell::Real(Some(self.max_lower_violation)),
            Cell::Real(Some(self.min_lower_value)),
            Cell::Real(Some(self.wall_time_ms)),
        ]
    }

    fn success(&self) -> bool {
        true
    }
}

/// Checks the upper bound on a `side × side` grid of `(φ, μ)` with
/// `side = ⌈√points⌉` (pairs at distance 0 skipped) and the lower bound on
/// `samples` random `(μ, η ≤ 16, φ)` triples inside the radius drawn from
/// `RngStream::from_seed(seed).split(k)`.
pub fn bounds_row(seed: u64, k: usize, points: usize, samples: usize) -> BoundsRow {
    let start = Instant::now();
    let side = (points as f64).sqrt().ceil() as usize;
    let mut max_upper_violation = 0.0f64;
    let mut max_upper_ratio = 0.0f64;
    let mut checked = 0;
    for i in 0..side {
        // Offsetting φ by an irrational fraction of a cell keeps the grid off
        // the exact zeros of the kernel.
        let phi = (i as f64 + 0.5 * std::f64::consts::FRAC_1_SQRT_2) / side as f64;
        for j in 0..side {
            let mu = j as f64 / side as f64;
            if phase_distance(phi, mu) == 0.0 {
                continue;
            }
            let value = momentum_overlap(phi, mu, k).norm();
            let bound = overlap_upper_bound(phi, mu, k);
            max_upper_violation = max_upper_violation.max(value - bound);
            max_upper_ratio = max_upper_ratio.max(value / bound);
            checked += 1;
        }
    }
    let mut rng = RngStream::from_seed(seed).split(k as u64);
    let mut max_lower_violation = 0.0f64;
    let mut min_lower_value = f64::INFINITY;
    for _ in 0..samples {
        let mu = rng.uniform();
        let eta = 1 + (rng.uniform() * MAX_ETA_SAMPLED as f64) as usize;
        let radius = overlap_lower_bound_radius(k, eta.min(MAX_ETA_SAMPLED));
        let phi = mu + (2.0 * rng.uniform() - 1.0) * radius;
        let value = momentum_overlap(phi, mu, k)
            .norm()
            .powi(eta.min(MAX_ETA_SAMPLED) as i32);
        min_lower_value = min_lower_value.min(value);
        max_lower_violation = max_lower_violation.max(0.5 - value);
    }
    BoundsRow {
        seed,
        k,
        grid_points: checked,
        max_upper_violation: max_upper_violation.max(0.0),
        max_upper_ratio,
        lower_samples: samples,
        max_lower_violation: max_lower_violation.max(0.0),
        min_lower_value: if samples == 0 {
            f64::NAN
        } else {
            min_lower_value
        },
        wall_time_ms: elapsed_ms(start),
    }
}

pub fn plan_bounds(config: &ExperimentConfig, seeds: &[u64]) -> CliResult<Vec<Task<BoundsRow>>> {
    let (lo, hi) = config.bits_range.unwrap_or(DEFAULT_BOUNDS_BITS);
    if lo == 0 || lo > hi || hi > MAX_BOUNDS_BITS {
        return Err(config.invalid(
            "bits_range",
            format!("range [{lo}, {hi}] must satisfy 1 <= lo <= hi <= {MAX_BOUNDS_BITS}"),
        ));
    }
    let points = config.grid_points.unwrap_or(DEFAULT_GRID_POINTS);
    let samples = config.lower_samples.unwrap_or(DEFAULT_LOWER_SAMPLES);
    let mut tasks: Vec<Task<BoundsRow>> = Vec::new();
    for k in lo..=hi {
        for &seed in seeds {
            tasks.push(Box::new(move || Ok(bounds_row(seed, k, points, samples))));
        }
    }
    Ok(tasks)
}
