//! Gibbs-weighted energy sampling on top of the energy filter.
//!
//! The density of states is estimated per energy bin from the filter overlap
//! `q` as `m̂ = clip(2Nq, 0, N)` (averaged over random input states), next
//! to the exact eigenvalue histogram from the spectral oracle. An energy bin
//! is drawn with probability `∝ e^{−E/T} · count(E)` and the filter then
//! prepares a state at that energy. Energies and temperatures are in
//! normalized units.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::amplification::{compute_overlap, estimated_count, AmplificationReport, FilterPipeline};
use crate::error::{Error, Result};
use crate::filter::{apply_inverse_phase_estimation_with, filter_projector};
use crate::quantum::{random_state_from, HermitianOperator, RegisterLayout, StateVector};
use crate::rng::RngStream;

pub const DEFAULT_DOS_SEEDS: usize = 8;
pub const DEFAULT_PREPARATION_RETRIES: usize = 16;

/// Smallest accepted temperature.
pub const MIN_TEMPERATURE: f64 = 1e-4;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityOfStates {
    /// Ascending bin centers.
    pub grid: Vec<f64>,
    /// Eigenvalues whose nearest bin center is this bin.
    pub exact: Vec<f64>,
    /// Mean `m̂` per bin; empty when only the exact histogram was built.
    pub estimated: Vec<f64>,
    /// `N`, the Hilbert-space dimension.
    pub dim: usize,
}

impl DensityOfStates {
    pub fn step(&self) -> f64 {
        if self.grid.len() < 2 {
            0.0
        } else {
            self.grid[1] - self.grid[0]
        }
    }

    pub fn counts(&self, source: CountSource) -> &[f64] {
        match source {
            CountSource::Exact => &self.exact,
            CountSource::Estimated => &self.estimated,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CountSource {
    /// Oracle eigenvalue histogram.
    #[default]
    Exact,
    /// Filter-based estimate `m̂`.
    Estimated,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoltzmannSign {
    /// `e^{−E/T}`.
    #[default]
    Standard,
    /// `e^{+E/T}`.
    Inverted,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThermalSpec {
    pub temperature: f64,
    #[serde(default)]
    pub sign: BoltzmannSign,
    #[serde(default)]
    pub source: CountSource,
}

impl ThermalSpec {
    pub fn new(temperature: f64) -> Result<Self> {
        let spec = ThermalSpec {
            temperature,
            sign: BoltzmannSign::default(),
            source: CountSource::default(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.temperature >= MIN_TEMPERATURE && self.temperature.is_finite()) {
            return Err(Error::validation(format!(
                "temperature {} must be at least {MIN_TEMPERATURE}",
                self.temperature
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DosOptions {
    /// Bin width; defaults to the filter resolution `2^{-k}/(2π√η)`.
    pub step: Option<f64>,
    /// Random input states averaged per bin.
    pub seeds: usize,
}

impl Default for DosOptions {
    fn default() -> Self {
        DosOptions {
            step: None,
            seeds: DEFAULT_DOS_SEEDS,
        }
    }
}

fn dos_grid(pipeline: &FilterPipeline, step: Option<f64>) -> Result<Vec<f64>> {
    let resolution = pipeline.spec().resolution();
    let step = match step {
        None => return Ok(pipeline.mu_grid()),
        Some(s) if s >= resolution * (1.0 - 1e-12) => s,
        Some(s) => {
            return Err(Error::validation(format!(
                "grid step {s} is below the filter resolution {resolution}"
            )))
        }
    };
    let delta = pipeline.hamiltonian.map.margin();
    let count = ((1.0 - 2.0 * delta) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| delta + i as f64 * step).collect())
}

/// Index of the grid center nearest to `x`.
fn nearest_bin(grid: &[f64], x: f64) -> usize {
    let mut best = 0;
    for (i, &g) in grid.iter().enumerate() {
        if (g - x).abs() < (grid[best] - x).abs() {
            best = i;
        }
    }
    best
}

/// Oracle eigenvalue histogram on the pipeline's grid, without the filter
/// estimate (`estimated` is left empty).
pub fn exact_dos(pipeline: &FilterPipeline, options: &DosOptions) -> Result<DensityOfStates> {
    let grid = dos_grid(pipeline, options.step)?;
    let spectrum = &pipeline.hamiltonian.spectrum;
    let mut exact = vec![0.0; grid.len()];
    for &phi in spectrum.eigenvalues() {
        exact[nearest_bin(&grid, phi)] += 1.0;
    }
    Ok(DensityOfStates {
        grid,
        exact,
        estimated: Vec::new(),
        dim: spectrum.dim(),
    })
}

/// Density of states on the pipeline's grid. Input state `s` of every bin
/// comes from `RngStream::from_seed(seed).split(s)`.
pub fn estimate_dos_with(
    pipeline: &FilterPipeline,
    seed: u64,
    options: &DosOptions,
) -> Result<DensityOfStates> {
    if options.seeds == 0 {
        return Err(Error::validation(
            "density estimate needs at least one seed",
        ));
    }
    let mut dos = exact_dos(pipeline, options)?;
    let spectrum = &pipeline.hamiltonian.spectrum;
    let n = pipeline.n();
    let root = RngStream::from_seed(seed);
    let inputs: Vec<StateVector> = (0..options.seeds)
        .map(|s| {
            RegisterLayout::system_only(n).map(|l| random_state_from(l, &mut root.split(s as u64)))
        })
        .collect::<Result<_>>()?;
    dos.estimated = dos
        .grid
        .par_iter()
        .map(|&mu| {
            let spec = pipeline.spec().with_center(mu)?;
            let mut total = 0.0;
            for psi in &inputs {
                let filtered = apply_inverse_phase_estimation_with(spectrum, psi, &spec)?;
                let q = compute_overlap(&filtered, &filter_projector(filtered.layout()))?;
                total += estimated_count(q, dos.dim);
            }
            Ok(total / options.seeds as f64)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(dos)
}

pub fn estimate_dos(h: &HermitianOperator, eps: f64, seed: u64) -> Result<DensityOfStates> {
    estimate_dos_with(&FilterPipeline::new(h, eps)?, seed, &DosOptions::default())
}

/// Normalized sampling probabilities `∝ e^{∓E/T} · count`, computed in log
/// space.
pub fn boltzmann_weights(dos: &DensityOfStates, spec: &ThermalSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    let counts = dos.counts(spec.source);
    if counts.len() != dos.grid.len() {
        return Err(Error::validation(format!(
            "{:?} counts cover {} of {} bins; build the density with `estimate_dos_with`",
            spec.source,
            counts.len(),
            dos.grid.len()
        )));
    }
    if counts.is_empty() || counts.iter().all(|&c| c <= 0.0) {
        return Err(Error::validation("density of states is empty"));
    }
    let sign = match spec.sign {
        BoltzmannSign::Standard => -1.0,
        BoltzmannSign::Inverted => 1.0,
    };
    let logs: Vec<f64> = dos
        .grid
        .iter()
        .zip(counts)
        .map(|(&e, &c)| {
            if c > 0.0 {
                sign * e / spec.temperature + c.ln()
            } else {
                f64::NEG_INFINITY
            }
        })
        .collect();
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
    let total: f64 = w.iter().sum();
    Ok(w.into_iter().map(|x| x / total).collect())
}

/// Draws a bin index.
pub fn sample_energy(
    dos: &DensityOfStates,
    spec: &ThermalSpec,
    rng: &mut RngStream,
) -> Result<usize> {
    let weights = boltzmann_weights(dos, spec)?;
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    let mut last = 0;
    for (i, w) in weights.iter().enumerate() {
        if *w > 0.0 {
            acc += w;
            last = i;
            if u < acc {
                return Ok(i);
            }
        }
    }
    Ok(last)
}

#[derive(Clone, Debug)]
pub struct ThermalOutcome {
    pub bin: usize,
    /// Sampled bin center, normalized units.
    pub energy: f64,
    pub state: Option<StateVector>,
    pub report: AmplificationReport,
    /// Preparation attempts at the sampled energy.
    pub attempts: usize,
}

/// Caches the filter pipeline and the density of states for repeated draws.
#[derive(Clone, Debug)]
pub struct ThermalSampler {
    pub pipeline: FilterPipeline,
    pub dos: DensityOfStates,
    pub spec: ThermalSpec,
    pub max_attempts: usize,
}

impl ThermalSampler {
    pub fn new(
        h: &HermitianOperator,
        eps: f64,
        spec: ThermalSpec,
        dos_seed: u64,
        dos_options: &DosOptions,
    ) -> Result<Self> {
        Self::with_pipeline(FilterPipeline::new(h, eps)?, spec, dos_seed, dos_options)
    }

    /// Uses an existing pipeline, e.g. one with explicit filter parameters.
    pub fn with_pipeline(
        pipeline: FilterPipeline,
        spec: ThermalSpec,
        dos_seed: u64,
        dos_options: &DosOptions,
    ) -> Result<Self> {
        spec.validate()?;
        // The filter estimate is only computed when it is sampled from.
        let dos = match spec.source {
            CountSource::Exact => exact_dos(&pipeline, dos_options)?,
            CountSource::Estimated => estimate_dos_with(&pipeline, dos_seed, dos_options)?,
        };
        Ok(ThermalSampler {
            pipeline,
            dos,
            spec,
            max_attempts: DEFAULT_PREPARATION_RETRIES,
        })
    }

    /// Samples an energy with `split(0)` and prepares a state there.
    ///
    /// An abort at a sampled occupied bin only reflects an unlucky input
    /// state, so the preparation is repeated at the same energy with fresh
    /// input states (`split(1)`, `split(2)`, …) instead of drawing a new
    /// energy, which would favor levels that abort less often.
    pub fn prepare(&self, seed: u64) -> Result<ThermalOutcome> {
        let root = RngStream::from_seed(seed);
        let bin = sample_energy(&self.dos, &self.spec, &mut root.split(0))?;
        let mu = self.dos.grid[bin];
        let mut last = None;
        for attempt in 1..=self.max_attempts {
            let out = self.pipeline.run(mu, &root.split(attempt as u64))?;
            if out.report.succeeded {
                return Ok(ThermalOutcome {
                    bin,
                    energy: mu,
                    state: out.state,
                    report: out.report,
                    attempts: attempt,
                });
            }
            last = Some(out.report);
        }
        Ok(ThermalOutcome {
            bin,
            energy: mu,
            state: None,
            report: last.expect("at least one attempt"),
            attempts: self.max_attempts,
        })
    }
}

pub fn prepare_thermal_state(
    h: &HermitianOperator,
    temperature: f64,
    eps: f64,
    seed: u64,
) -> Result<ThermalOutcome> {
    let sampler = ThermalSampler::new(
        h,
        eps,
        ThermalSpec::new(temperature)?,
        seed,
        &DosOptions::default(),
    )?;
    sampler.prepare(seed)
}
