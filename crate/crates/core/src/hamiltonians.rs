//! Model Hamiltonians and the affine map of their spectra into the
//! phase-estimation window.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quantum::{spectral_decompose, HermitianOperator, SpectralDecomposition, C64};
use crate::rng::RngStream;

/// Largest system size for which a dense model matrix is built.
pub const MAX_MODEL_QUBITS: usize = 12;

/// Default margin keeping normalized eigenvalues away from the 0/1 phase wrap.
pub const DEFAULT_WINDOW_MARGIN: f64 = 0.125;

/// Classical Ising couplings `Σ_{i<j} J_ij σ_i σ_j + Σ_i h_i σ_i` with
/// `σ_i ∈ {0, 1}`. Spin `i` is bit `i` of a computational basis index.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IsingParams {
    n: usize,
    couplings: BTreeMap<(usize, usize), f64>,
    fields: Vec<f64>,
}

impl IsingParams {
    pub fn new(
        n: usize,
        couplings: impl IntoIterator<Item = ((usize, usize), f64)>,
        fields: Vec<f64>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::validation("Ising model needs at least one spin"));
        }
        if fields.len() != n {
            return Err(Error::validation(format!(
                "expected {n} local fields, got {}",
                fields.len()
            )));
        }
        if let Some(h) = fields.iter().find(|h| !h.is_finite()) {
            return Err(Error::validation(format!("non-finite field {h}")));
        }
        let mut map = BTreeMap::new();
        for ((i, j), value) in couplings {
            if i >= j {
                return Err(Error::validation(format!(
                    "coupling key ({i}, {j}) must have i < j"
                )));
            }
            if j >= n {
                return Err(Error::validation(format!(
                    "coupling ({i}, {j}) out of range for n={n}"
                )));
            }
            if !value.is_finite() {
                return Err(Error::validation(format!("non-finite coupling J_{i}{j}")));
            }
            *map.entry((i, j)).or_insert(0.0) += value;
        }
        Ok(IsingParams {
            n,
            couplings: map,
            fields,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn couplings(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.couplings
    }

    pub fn fields(&self) -> &[f64] {
        &self.fields
    }

    fn energy_of_index(&self, x: usize) -> f64 {
        let bit = |i: usize| (x >> i) & 1 == 1;
        let pairs: f64 = self
            .couplings
            .iter()
            .filter(|((i, j), _)| bit(*i) && bit(*j))
            .map(|(_, v)| v)
            .sum();
        let singles: f64 = (0..self.n)
            .filter(|&i| bit(i))
            .map(|i| self.fields[i])
            .sum();
        pairs + singles
    }
}

/// Energy of a spin configuration; `config[i]` is `σ_i`.
pub fn classical_energy(params: &IsingParams, config: &[bool]) -> Result<f64> {
    if config.len() != params.n {
        return Err(Error::validation(format!(
            "configuration has {} spins, model has {}",
            config.len(),
            params.n
        )));
    }
    let index = config
        .iter()
        .enumerate()
        .fold(0usize, |acc, (i, &b)| acc | (usize::from(b) << i));
    Ok(params.energy_of_index(index))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ModelSpec {
    ClassicalIsing(IsingParams),
    /// Open chain `-J Σ Z_i Z_{i+1} - g Σ X_i`.
    TransverseIsing {
        n: usize,
        coupling: f64,
        field: f64,
    },
    /// Seeded sum of random Hermitian terms on every qubit pair, scaled by
    /// `1/sqrt(#pairs)`.
    RandomTwoLocal {
        n: usize,
        seed: u64,
    },
}

impl ModelSpec {
    pub fn n(&self) -> usize {
        match self {
            ModelSpec::ClassicalIsing(p) => p.n,
            ModelSpec::TransverseIsing { n, .. } | ModelSpec::RandomTwoLocal { n, .. } => *n,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            ModelSpec::ClassicalIsing(_) => "classical-ising",
            ModelSpec::TransverseIsing { .. } => "transverse-ising",
            ModelSpec::RandomTwoLocal { .. } => "random-two-local",
        }
    }
}

pub fn build_model(spec: &ModelSpec) -> Result<HermitianOperator> {
    let n = spec.n();
    if n == 0 {
        return Err(Error::validation("model needs at least one qubit"));
    }
    if n > MAX_MODEL_QUBITS {
        return Err(Error::capacity("model qubits", n, MAX_MODEL_QUBITS));
    }
    let d = 1usize << n;
    let label = format!("{}(n={n})", spec.kind());
    let matrix = match spec {
        ModelSpec::ClassicalIsing(params) => {
            DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                d,
                (0..d).map(|x| C64::new(params.energy_of_index(x), 0.0)),
            ))
        }
        ModelSpec::TransverseIsing {
            coupling, field, ..
        } => {
            if !coupling.is_finite() || !field.is_finite() {
                return Err(Error::validation("non-finite transverse-Ising parameter"));
            }
            let mut m = DMatrix::<C64>::zeros(d, d);
            for x in 0..d {
                let z = |i: usize| if (x >> i) & 1 == 0 { 1.0 } else { -1.0 };
                let zz: f64 = (0..n.saturating_sub(1)).map(|i| z(i) * z(i + 1)).sum();
                m[(x, x)] += C64::new(-coupling * zz, 0.0);
                for i in 0..n {
                    m[(x ^ (1 << i), x)] += C64::new(-field, 0.0);
                }
            }
            m
        }
        ModelSpec::RandomTwoLocal { seed, .. } => random_two_local(n, *seed),
    };
    HermitianOperator::new(matrix, label)
}

fn random_two_local(n: usize, seed: u64) -> DMatrix<C64> {
    let d = 1usize << n;
    let mut m = DMatrix::<C64>::zeros(d, d);
    if n == 1 {
        // No pairs: a single random one-qubit term.
        let term = random_hermitian_block(2, &mut RngStream::from_seed(seed));
        return term;
    }
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();
    let scale = 1.0 / (pairs.len() as f64).sqrt();
    let root = RngStream::from_seed(seed);
    for (t, &(i, j)) in pairs.iter().enumerate() {
        let term = random_hermitian_block(4, &mut root.split(t as u64));
        // Local index: bit 0 ↔ qubit i, bit 1 ↔ qubit j.
        let local = |x: usize| ((x >> i) & 1) | (((x >> j) & 1) << 1);
        let mask = !((1usize << i) | (1usize << j));
        for x in 0..d {
            for y in 0..d {
                if x & mask == y & mask {
                    m[(x, y)] += term[(local(x), local(y))] * scale;
                }
            }
        }
    }
    m
}

fn random_hermitian_block(dim: usize, rng: &mut RngStream) -> DMatrix<C64> {
    let mut g = DMatrix::<C64>::zeros(dim, dim);
    for entry in g.iter_mut() {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        *entry = C64::new(re, im);
    }
    (&g + g.adjoint()) * C64::new(0.5, 0.0)
}

/// Affine map `x ↦ scale·x + offset` taking a spectrum into `[δ, 1-δ]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpectrumMap {
    scale: f64,
    offset: f64,
    margin: f64,
}

impl SpectrumMap {
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn margin(&self) -> f64 {
        self.margin
    }

    pub fn to_normalized(&self, x: f64) -> f64 {
        self.scale * x + self.offset
    }

    pub fn to_original(&self, y: f64) -> f64 {
        (y - self.offset) / self.scale
    }

    /// Converts a normalized energy width into original units.
    pub fn width_to_original(&self, w: f64) -> f64 {
        w / self.scale
    }
}

/// A Hamiltonian mapped into the phase window, with its exact spectrum.
#[derive(Clone, Debug)]
pub struct NormalizedHamiltonian {
    pub original: HermitianOperator,
    pub operator: HermitianOperator,
    pub map: SpectrumMap,
    pub spectrum: SpectralDecomposition,
}

impl NormalizedHamiltonian {
    pub fn new(op: &HermitianOperator, margin: f64) -> Result<Self> {
        if !(margin > 0.0 && margin < 0.5) {
            return Err(Error::validation(format!(
                "window margin {margin} must lie in (0, 1/2)"
            )));
        }
        if !op.dim().is_power_of_two() {
            return Err(Error::validation(format!(
                "operator dimension {} is not a power of two",
                op.dim()
            )));
        }
        let original = spectral_decompose(op)?;
        let (lo, hi) = (original.min(), original.max());
        let (scale, offset) = if hi - lo < 1e-12 {
            (1.0, 0.5 - lo)
        } else {
            let scale = (1.0 - 2.0 * margin) / (hi - lo);
            (scale, margin - scale * lo)
        };
        let d = op.dim();
        let matrix = op.matrix() * C64::new(scale, 0.0)
            + DMatrix::<C64>::identity(d, d) * C64::new(offset, 0.0);
        let operator = HermitianOperator::new(matrix, format!("normalized {}", op.label()))?;
        // The eigenvectors are unchanged by an affine map; only the values move.
        let spectrum = spectral_decompose(&operator)?;
        Ok(NormalizedHamiltonian {
            original: op.clone(),
            operator,
            map: SpectrumMap {
                scale,
                offset,
                margin,
            },
            spectrum,
        })
    }

    pub fn system_qubits(&self) -> usize {
        self.operator.dim().trailing_zeros() as usize
    }
}

/// Maps the spectrum of `op` into `[δ, 1-δ]`. A zero-width spectrum maps to 1/2.
pub fn normalize_spectrum(
    op: &HermitianOperator,
    margin: f64,
) -> Result<(HermitianOperator, SpectrumMap)> {
    let n = NormalizedHamiltonian::new(op, margin)?;
    Ok((n.operator, n.map))
}
