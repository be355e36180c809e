use nalgebra::{DMatrix, DVector};

use super::{inner, max_abs, norm_sqr, RegisterLayout, StateVector, C64};
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Tolerance for `P² = P` and `P = P†`.
pub const PROJECTOR_TOLERANCE: f64 = 1e-10;
const RANK_TOLERANCE: f64 = 1e-8;
const PROBABILITY_SLACK: f64 = 1e-12;

/// Anything that orthogonally projects amplitude vectors of a fixed dimension.
pub trait ProjectorOp: Sync {
    fn dim(&self) -> usize;

    fn project(&self, v: &[C64]) -> Vec<C64>;

    /// `‖P v‖²`.
    fn weight(&self, v: &[C64]) -> f64 {
        norm_sqr(&self.project(v))
    }
}

/// Dense orthogonal projector.
#[derive(Clone, Debug, PartialEq)]
pub struct Projector {
    matrix: DMatrix<C64>,
    rank: usize,
}

impl Projector {
    pub fn new(matrix: DMatrix<C64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::validation("projector must be square"));
        }
        let adjoint_defect = max_abs(&(&matrix - matrix.adjoint()));
        if adjoint_defect > PROJECTOR_TOLERANCE {
            return Err(Error::validation(format!(
                "projector is not Hermitian: max |P - P†| = {adjoint_defect:e}"
            )));
        }
        let idempotency_defect = max_abs(&(&matrix * &matrix - &matrix));
        if idempotency_defect > PROJECTOR_TOLERANCE {
            return Err(Error::validation(format!(
                "matrix is not idempotent: max |P² - P| = {idempotency_defect:e}"
            )));
        }
        let trace = matrix.trace().re;
        let rank = trace.round();
        if (trace - rank).abs() > RANK_TOLERANCE {
            return Err(Error::Numerical(format!(
                "projector trace {trace} is not an integer"
            )));
        }
        Ok(Projector {
            matrix,
            rank: rank as usize,
        })
    }

    /// Projector onto the span of the given orthonormal columns.
    pub fn from_orthonormal(columns: &DMatrix<C64>) -> Result<Self> {
        Self::new(columns * columns.adjoint())
    }

    pub fn from_vectors(dim: usize, vectors: &[DVector<C64>]) -> Result<Self> {
        let mut m = DMatrix::zeros(dim, dim);
        for v in vectors {
            Error::check_dim(dim, v.len())?;
            m += v * v.adjoint();
        }
        Self::new(m)
    }

    pub fn identity(dim: usize) -> Self {
        Projector {
            matrix: DMatrix::identity(dim, dim),
            rank: dim,
        }
    }

    pub fn zero(dim: usize) -> Self {
        Projector {
            matrix: DMatrix::zeros(dim, dim),
            rank: 0,
        }
    }

    /// Diagonal projector onto the basis states selected by `keep`.
    pub fn diagonal(dim: usize, keep: impl Fn(usize) -> bool) -> Self {
        let diag = DVector::from_iterator(
            dim,
            (0..dim).map(|i| {
                if keep(i) {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            }),
        );
        let rank = (0..dim).filter(|&i| keep(i)).count();
        Projector {
            matrix: DMatrix::from_diagonal(&diag),
            rank,
        }
    }

    /// `U P U†`.
    pub fn conjugated(&self, unitary: &DMatrix<C64>) -> Result<Self> {
        Error::check_dim(self.dim(), unitary.nrows())?;
        Self::new(unitary * &self.matrix * unitary.adjoint())
    }

    /// Projector onto a Haar-random `rank`-dimensional subspace.
    pub fn random(dim: usize, rank: usize, rng: &mut RngStream) -> Result<Self> {
        if rank > dim {
            return Err(Error::validation(format!(
                "rank {rank} exceeds dimension {dim}"
            )));
        }
        if rank == 0 {
            return Ok(Self::zero(dim));
        }
        let cols: Vec<DVector<C64>> = (0..rank)
            .map(|_| DVector::from_vec(super::random_amplitudes(dim, rng)))
            .collect();
        let q = DMatrix::from_columns(&cols).qr().q();
        Self::from_orthonormal(&q)
    }

    pub fn complement(&self) -> Self {
        let d = self.dim();
        Projector {
            matrix: DMatrix::identity(d, d) - &self.matrix,
            rank: d - self.rank,
        }
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn commutes_with(&self, other: &Projector, tol: f64) -> bool {
        max_abs(&(&self.matrix * &other.matrix - &other.matrix * &self.matrix)) <= tol
    }
}

impl ProjectorOp for Projector {
    fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    fn project(&self, v: &[C64]) -> Vec<C64> {
        let d = self.matrix.nrows();
        assert_eq!(v.len(), d, "projector dimension mismatch");
        let mut out = vec![C64::new(0.0, 0.0); d];
        for (c, &x) in v.iter().enumerate() {
            if x == C64::new(0.0, 0.0) {
                continue;
            }
            for (o, m) in out.iter_mut().zip(self.matrix.column(c).iter()) {
                *o += m * x;
            }
        }
        out
    }
}

/// `P_reg ⊗ |0…0⟩⟨0…0|` on every ancilla qubit of a layout; `P_reg` defaults
/// to the identity on the system-plus-scratchpad register.
///
/// With the identity this is the filter projector `Q = I_n ⊗ |0_k⟩⟨0_k|^{⊗η}`.
#[derive(Clone, Debug)]
pub struct AncillaZeroProjector {
    layout: RegisterLayout,
    register: Option<Projector>,
}

impl AncillaZeroProjector {
    pub fn new(layout: RegisterLayout) -> Self {
        AncillaZeroProjector {
            layout,
            register: None,
        }
    }

    pub fn with_register(layout: RegisterLayout, register: Projector) -> Result<Self> {
        Error::check_dim(layout.register_dim(), register.dim())?;
        Ok(AncillaZeroProjector {
            layout,
            register: Some(register),
        })
    }

    pub fn layout(&self) -> RegisterLayout {
        self.layout
    }
}

impl ProjectorOp for AncillaZeroProjector {
    fn dim(&self) -> usize {
        self.layout.dim()
    }

    fn project(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.layout.dim(), "projector dimension mismatch");
        let reg = self.layout.register_dim();
        let mut out = vec![C64::new(0.0, 0.0); v.len()];
        match &self.register {
            None => out[..reg].copy_from_slice(&v[..reg]),
            Some(p) => out[..reg].copy_from_slice(&p.project(&v[..reg])),
        }
        out
    }

    fn weight(&self, v: &[C64]) -> f64 {
        let reg = self.layout.register_dim();
        match &self.register {
            None => norm_sqr(&v[..reg]),
            Some(p) => p.weight(&v[..reg]),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Measurement {
    pub outcome: bool,
    pub collapsed: StateVector,
    /// Exact pre-measurement probability of outcome 1.
    pub probability: f64,
}

/// Projective measurement `{P, I - P}`; outcome `true` corresponds to `P`.
pub fn measure_projector(
    state: &StateVector,
    projector: &dyn ProjectorOp,
    rng: &mut RngStream,
) -> Result<Measurement> {
    Error::check_dim(state.dim(), projector.dim())?;
    let amps = state.amplitudes();
    let projected = projector.project(amps);
    let probability = inner(amps, &projected).re;
    if !(-PROBABILITY_SLACK..=1.0 + PROBABILITY_SLACK).contains(&probability) {
        return Err(Error::Numerical(format!(
            "measurement probability {probability} outside [0, 1]"
        )));
    }
    let probability = probability.clamp(0.0, 1.0);
    let outcome = rng.uniform() < probability;
    let branch = if outcome {
        projected
    } else {
        amps.iter().zip(&projected).map(|(a, p)| a - p).collect()
    };
    let collapsed = StateVector::normalized(state.layout(), branch)?;
    Ok(Measurement {
        outcome,
        collapsed,
        probability,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::random_state;

    fn plus_projector() -> Projector {
        let h = C64::new(0.5, 0.0);
        Projector::new(DMatrix::from_element(2, 2, h)).unwrap()
    }

    #[test]
    fn validation() {
        let bad = DMatrix::from_diagonal_element(2, 2, C64::new(0.5, 0.0));
        assert!(Projector::new(bad).is_err());
        let p = plus_projector();
        assert_eq!(p.rank(), 1);
        assert_eq!(p.complement().rank(), 1);
    }

    #[test]
    fn identity_and_zero_measurements() {
        let layout = RegisterLayout::system_only(2).unwrap();
        let s = random_state(layout, 8);
        let mut rng = RngStream::from_seed(0);
        let m = measure_projector(&s, &Projector::identity(4), &mut rng).unwrap();
        assert!(m.outcome);
        assert!((m.probability - 1.0).abs() < 1e-12);
        let m = measure_projector(&s, &Projector::zero(4), &mut rng).unwrap();
        assert!(!m.outcome);
        assert!(m.probability.abs() < 1e-12);
    }

    #[test]
    fn plus_measurement_statistics() {
        let layout = RegisterLayout::system_only(1).unwrap();
        let zero = StateVector::basis(layout, 0).unwrap();
        let p = plus_projector();
        let mut rng = RngStream::from_seed(11);
        let shots = 10_000;
        let mut ones = 0;
        for _ in 0..shots {
            let m = measure_projector(&zero, &p, &mut rng).unwrap();
            assert!((m.probability - 0.5).abs() < 1e-15);
            if m.outcome {
                ones += 1;
                let c = m.collapsed.amplitudes();
                assert!((c[0] - c[1]).norm() < 1e-15);
            }
        }
        let freq = ones as f64 / shots as f64;
        assert!((freq - 0.5).abs() < 0.02, "frequency {freq}");
    }

    #[test]
    fn ancilla_zero_projector_weight() {
        let layout = RegisterLayout::new(2, 0, 2, 1).unwrap();
        let s = random_state(layout, 2);
        let q = AncillaZeroProjector::new(layout);
        let want: f64 = s.amplitudes()[..4].iter().map(|z| z.norm_sqr()).sum();
        assert!((q.weight(s.amplitudes()) - want).abs() < 1e-15);
        let projected = q.project(s.amplitudes());
        assert!(projected[4..].iter().all(|z| z.norm() == 0.0));
    }
}
