//! Jordan's canonical form for two projectors and the failure of the naive
//! phase-estimation-plus-Grover algorithm.
//!
//! Any two projectors `Q` and `R` split the space into invariant blocks of
//! dimension at most two. A two-dimensional block carries an overlap
//! `p ∈ (0, 1)` and two orthonormal pairs related by
//!
//! ```text
//! q⁰ =  √p r⁰ − √(1−p) r¹        r⁰ = √p q⁰ + √(1−p) q¹
//! q¹ = √(1−p) r⁰ + √p r¹         r¹ = −√(1−p) q⁰ + √p q¹
//! ```
//!
//! with `Q qᵇ = b qᵇ` and `R rᵇ = b rᵇ`. The fourth relation carries the sign
//! that makes the two changes of basis mutually inverse.
//!
//! Phases are fixed by the `Q` side: `q¹` comes from an eigensolve of `QRQ`
//! on the image of `Q`, `r¹ = R q¹/√p`, `r⁰ = (I−R) q¹/√(1−p)` and `q⁰`
//! follows from the first relation.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::amplification::{amplify, AmplifyOptions};
use crate::error::{Error, Result};
use crate::filter::{apply_phase_estimation, apply_readout_fourier};
use crate::hamiltonians::{NormalizedHamiltonian, DEFAULT_WINDOW_MARGIN};
use crate::quantum::{
    random_state_from, spectral_decompose, AncillaZeroProjector, HermitianOperator, Projector,
    ProjectorOp, RegisterLayout, C64,
};
use crate::rng::RngStream;

/// Overlaps within this distance of 0 or 1 are binned as null or fixed.
pub const CLASSIFICATION_TOLERANCE: f64 = 1e-8;

/// Blocks with `min(p, 1−p)` below this are flagged as borderline.
pub const BORDERLINE_THRESHOLD: f64 = 1e-6;

/// Largest dimension accepted by the dense naive-algorithm demo.
pub const NAIVE_DEMO_DIMENSION_CAP: usize = 1024;

#[derive(Clone, Debug, PartialEq)]
pub struct JordanBlock {
    pub p: f64,
    pub q0: DVector<C64>,
    pub q1: DVector<C64>,
    pub r0: DVector<C64>,
    pub r1: DVector<C64>,
    pub borderline: bool,
}

/// Residual norms of the four pairing relations and the eigen-relations of a
/// block.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BlockResiduals {
    pub relations: [f64; 4],
    pub eigen: f64,
}

impl BlockResiduals {
    pub fn max(&self) -> f64 {
        self.relations.iter().copied().fold(self.eigen, f64::max)
    }
}

impl JordanBlock {
    pub fn residuals(&self, q: &Projector, r: &Projector) -> BlockResiduals {
        let a = C64::new(self.p.sqrt(), 0.0);
        let b = C64::new((1.0 - self.p).sqrt(), 0.0);
        let relations = [
            (&self.q0 - (&self.r0 * a - &self.r1 * b)).norm(),
            (&self.q1 - (&self.r0 * b + &self.r1 * a)).norm(),
            (&self.r0 - (&self.q0 * a + &self.q1 * b)).norm(),
            (&self.r1 - (&self.q1 * a - &self.q0 * b)).norm(),
        ];
        let (qm, rm) = (q.matrix(), r.matrix());
        let eigen = [
            (qm * &self.q1 - &self.q1).norm(),
            (qm * &self.q0).norm(),
            (rm * &self.r1 - &self.r1).norm(),
            (rm * &self.r0).norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max);
        BlockResiduals { relations, eigen }
    }
}

/// The decomposition keeps the original dimension: directions with
/// `p ∈ {0, 1}` are listed separately instead of being paired.
#[derive(Clone, Debug, PartialEq)]
pub struct JordanDecomposition {
    pub blocks: Vec<JordanBlock>,
    /// Common eigenvectors of `Q` and `R` with eigenvalue 1 (`p = 1`).
    pub fixed: Vec<DVector<C64>>,
    /// Orthonormal basis of `image(Q) ∩ ker(R)` (`p = 0` on the `Q` side).
    pub q_null: Vec<DVector<C64>>,
    /// Orthonormal basis of `image(R) ∩ ker(Q)`.
    pub r_null: Vec<DVector<C64>>,
    pub dim: usize,
}

impl JordanDecomposition {
    /// Block overlaps including `1` for each fixed direction and `0` for each
    /// `q_null` direction: the spectrum of `QRQ` on the image of `Q`.
    pub fn q_side_spectrum(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.blocks.iter().map(|b| b.p).collect();
        out.extend(std::iter::repeat_n(1.0, self.fixed.len()));
        out.extend(std::iter::repeat_n(0.0, self.q_null.len()));
        out.sort_by(f64::total_cmp);
        out
    }

    pub fn has_borderline(&self) -> bool {
        self.blocks.iter().any(|b| b.borderline)
    }

    /// `Σ q¹q¹† + Σ fixed + Σ q_null`.
    pub fn rebuild_q(&self) -> DMatrix<C64> {
        outer_sum(
            self.dim,
            self.blocks
                .iter()
                .map(|b| &b.q1)
                .chain(&self.fixed)
                .chain(&self.q_null),
        )
    }

    /// `Σ r¹r¹† + Σ fixed + Σ r_null`.
    pub fn rebuild_r(&self) -> DMatrix<C64> {
        outer_sum(
            self.dim,
            self.blocks
                .iter()
                .map(|b| &b.r1)
                .chain(&self.fixed)
                .chain(&self.r_null),
        )
    }
}

fn outer_sum<'a>(dim: usize, vectors: impl Iterator<Item = &'a DVector<C64>>) -> DMatrix<C64> {
    let mut m = DMatrix::zeros(dim, dim);
    for v in vectors {
        m += v * v.adjoint();
    }
    m
}

fn hermitian(m: DMatrix<C64>, label: &str) -> Result<HermitianOperator> {
    let sym = (&m + m.adjoint()) * C64::new(0.5, 0.0);
    HermitianOperator::new(sym, label)
}

/// Orthonormal columns spanning the image of a projector.
fn image_basis(p: &DMatrix<C64>, label: &str) -> Result<DMatrix<C64>> {
    let spectrum = spectral_decompose(&hermitian(p.clone(), label)?)?;
    let cols: Vec<DVector<C64>> = spectrum
        .eigenvalues()
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > 0.5)
        .map(|(a, _)| spectrum.eigenvector(a))
        .collect();
    if cols.is_empty() {
        return Ok(DMatrix::zeros(p.nrows(), 0));
    }
    Ok(DMatrix::from_columns(&cols))
}

pub fn jordan_decompose(q: &Projector, r: &Projector) -> Result<JordanDecomposition> {
    Error::check_dim(q.dim(), r.dim())?;
    let dim = q.dim();
    let scale = |v: &DVector<C64>, s: f64| v * C64::new(s, 0.0);

    let vq = image_basis(q.matrix(), "Q")?;
    let mut blocks = Vec::new();
    let mut fixed = Vec::new();
    let mut q_null = Vec::new();
    if vq.ncols() > 0 {
        let restricted = vq.adjoint() * r.matrix() * &vq;
        let spectrum = spectral_decompose(&hermitian(restricted, "QRQ on image(Q)")?)?;
        for (a, &p) in spectrum.eigenvalues().iter().enumerate() {
            let q1 = &vq * spectrum.eigenvector(a);
            if p > 1.0 - CLASSIFICATION_TOLERANCE {
                fixed.push(q1);
            } else if p < CLASSIFICATION_TOLERANCE {
                q_null.push(q1);
            } else {
                let rq1 = r.matrix() * &q1;
                let r1 = scale(&rq1, 1.0 / p.sqrt());
                let r0 = scale(&(&q1 - &rq1), 1.0 / (1.0 - p).sqrt());
                let q0 = scale(&r0, p.sqrt()) - scale(&r1, (1.0 - p).sqrt());
                blocks.push(JordanBlock {
                    p,
                    q0,
                    q1,
                    r0,
                    r1,
                    borderline: p.min(1.0 - p) < BORDERLINE_THRESHOLD,
                });
            }
        }
    }
    let remainder = r.matrix() - outer_sum(dim, blocks.iter().map(|b| &b.r1).chain(&fixed));
    let vr = image_basis(&remainder, "R remainder")?;
    let r_null = vr.column_iter().map(|c| c.into_owned()).collect();
    Ok(JordanDecomposition {
        blocks,
        fixed,
        q_null,
        r_null,
        dim,
    })
}

/// `⟨ψ'|Q|ψ'⟩ = Σ|α|²p² / Σ|α|²p` for `ψ' = Rψ/‖Rψ‖`, `ψ = Σ α q¹`.
pub fn naive_overlap_formula(weights: &[f64], probs: &[f64]) -> Result<f64> {
    Error::check_dim(weights.len(), probs.len())?;
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::validation(format!(
            "weights sum to {total}, expected 1"
        )));
    }
    if let Some(p) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::validation(format!("probability {p} outside [0, 1]")));
    }
    let num: f64 = weights.iter().zip(probs).map(|(w, p)| w * p * p).sum();
    let den: f64 = weights.iter().zip(probs).map(|(w, p)| w * p).sum();
    if den <= 0.0 {
        return Err(Error::UndefinedAmplification(
            "no weight on states accepted by R".into(),
        ));
    }
    Ok(num / den)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NaiveDemoReport {
    /// Threshold `E` on the measured phase, normalized units.
    pub threshold: f64,
    pub bits: usize,
    /// Measured `⟨ψ'|Q|ψ'⟩` after amplifying `R`.
    pub residual_overlap: f64,
    /// `Σ|α|²p² / Σ|α|²p`.
    pub predicted: f64,
    /// Normalized eigenvalues of `H`.
    pub phases: Vec<f64>,
    /// `|α_a|²` of the random input in the eigenbasis.
    pub weights: Vec<f64>,
    /// `p_a = ‖R(|a⟩⊗|0⟩)‖²`.
    pub acceptance: Vec<f64>,
    pub iterations: usize,
}

/// `R` for the naive algorithm: phase estimation with Fourier readout whose
/// `k`-bit outcome `y` satisfies `y/2^k < E`.
pub fn naive_acceptance_projector(
    hamiltonian: &NormalizedHamiltonian,
    threshold: f64,
    bits: usize,
) -> Result<Projector> {
    let n = hamiltonian.system_qubits();
    let layout = RegisterLayout::new(n, 0, 1, bits)?;
    if layout.dim() > NAIVE_DEMO_DIMENSION_CAP {
        return Err(Error::capacity(
            "naive demo dimension",
            layout.dim(),
            NAIVE_DEMO_DIMENSION_CAP,
        ));
    }
    let size = 1usize << bits;
    // R = C† Π C with C = readout ∘ estimation and Π the accepted outputs, so
    // its image is spanned by C†|b⟩: the conjugated rows of C.
    let circuit = circuit_matrix(hamiltonian, layout)?;
    let rows: Vec<DVector<C64>> = (0..size)
        .filter(|&y| (y as f64) / (size as f64) < threshold)
        .flat_map(|y| (0..layout.register_dim()).map(move |a| layout.index(a, y)))
        .map(|b| circuit.row(b).adjoint())
        .collect();
    if rows.is_empty() {
        return Ok(Projector::zero(layout.dim()));
    }
    Projector::from_orthonormal(&DMatrix::from_columns(&rows))
}

fn circuit_matrix(
    hamiltonian: &NormalizedHamiltonian,
    layout: RegisterLayout,
) -> Result<DMatrix<C64>> {
    let d = layout.dim();
    let mut m = DMatrix::zeros(d, d);
    for b in 0..d {
        let mut v = vec![C64::new(0.0, 0.0); d];
        v[b] = C64::new(1.0, 0.0);
        apply_phase_estimation(&mut v, &hamiltonian.spectrum, layout)?;
        apply_readout_fourier(&mut v, layout, false)?;
        m.set_column(b, &DVector::from_vec(v));
    }
    Ok(m)
}

/// Amplifies `R` on a random state of the system with clean ancillas and
/// measures how much weight stays on the clean-ancilla subspace.
///
/// `h` is normalized into the phase window first; `threshold` is in
/// normalized units.
pub fn run_naive_demo(
    h: &HermitianOperator,
    threshold: f64,
    bits: usize,
    seed: u64,
) -> Result<NaiveDemoReport> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::validation(format!(
            "threshold {threshold} must lie in (0, 1)"
        )));
    }
    let hamiltonian = NormalizedHamiltonian::new(h, DEFAULT_WINDOW_MARGIN)?;
    let n = hamiltonian.system_qubits();
    let r = naive_acceptance_projector(&hamiltonian, threshold, bits)?;
    let layout = RegisterLayout::new(n, 0, 1, bits)?;
    let q = AncillaZeroProjector::new(layout);

    let root = RngStream::from_seed(seed);
    let system = random_state_from(RegisterLayout::system_only(n)?, &mut root.split(0));
    let mut zero = vec![C64::new(0.0, 0.0); 1 << bits];
    zero[0] = C64::new(1.0, 0.0);
    let psi = system.tensor_ancilla(layout, &zero)?;

    let alpha = hamiltonian.spectrum.to_eigenbasis(system.amplitudes());
    let weights: Vec<f64> = alpha.iter().map(|a| a.norm_sqr()).collect();
    let acceptance: Vec<f64> = (0..hamiltonian.spectrum.dim())
        .map(|a| {
            let v = hamiltonian.spectrum.eigenvector(a);
            let mut full = vec![C64::new(0.0, 0.0); layout.dim()];
            full[..v.len()].copy_from_slice(v.as_slice());
            r.weight(&full).clamp(0.0, 1.0)
        })
        .collect();
    let predicted = naive_overlap_formula(&weights, &acceptance)?;

    let options = AmplifyOptions {
        max_retries: 64,
        ..AmplifyOptions::default()
    };
    let mut attempt = 1u64;
    let (out, report) = loop {
        let (out, report) = amplify(&psi, &r, &options, &mut root.split(attempt))?;
        if let Some(state) = out {
            break (state, report);
        }
        attempt += 1;
        if attempt > 16 {
            return Err(Error::Numerical(
                "amplification of R never succeeded".into(),
            ));
        }
    };
    let residual_overlap = q.weight(out.amplitudes());
    Ok(NaiveDemoReport {
        threshold,
        bits,
        residual_overlap,
        predicted,
        phases: hamiltonian.spectrum.eigenvalues().to_vec(),
        weights,
        acceptance,
        iterations: report.iterations,
    })
}

/// A three-qubit diagonal Hamiltonian whose normalized levels sit above the
/// threshold [`NAIVE_FIXTURE_THRESHOLD`], mostly off the 4-bit grid, so
/// phase estimation accepts them with small but nonzero probability.
pub fn naive_failure_fixture() -> HermitianOperator {
    HermitianOperator::from_real_diagonal(
        &[0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 1.0],
        "naive failure fixture",
    )
    .expect("diagonal fixture is Hermitian")
}

pub const NAIVE_FIXTURE_THRESHOLD: f64 = 0.1;
pub const NAIVE_FIXTURE_BITS: usize = 4;
