use nalgebra::DMatrix;

use super::{StateVector, C64};
use crate::error::{Error, Result};

/// Bound on `max |A - A†|` accepted for a Hermitian operator.
pub const HERMITICITY_TOLERANCE: f64 = 1e-12;

/// Residual imaginary part of an expectation value that is still treated as
/// rounding noise.
const REALITY_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    matrix: DMatrix<C64>,
    label: String,
}

impl HermitianOperator {
    pub fn new(matrix: DMatrix<C64>, label: impl Into<String>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::validation(format!(
                "operator must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if !matrix.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::validation("operator has non-finite entries"));
        }
        let defect = hermiticity_defect(&matrix);
        if defect > HERMITICITY_TOLERANCE {
            return Err(Error::validation(format!(
                "operator is not Hermitian: max |A - A†| = {defect:e}"
            )));
        }
        // Exact symmetrization so downstream eigensolvers see a Hermitian input.
        let sym = (&matrix + matrix.adjoint()) * C64::new(0.5, 0.0);
        Ok(HermitianOperator {
            matrix: sym,
            label: label.into(),
        })
    }

    pub fn from_real_diagonal(diagonal: &[f64], label: impl Into<String>) -> Result<Self> {
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            diagonal.len(),
            diagonal.iter().map(|&x| C64::new(x, 0.0)),
        ));
        Self::new(d, label)
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Matrix-vector product on a raw amplitude slice.
    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>> {
        Error::check_dim(self.dim(), v.len())?;
        let d = self.dim();
        let mut out = vec![C64::new(0.0, 0.0); d];
        // Column-major storage: accumulate column by column.
        for (c, &x) in v.iter().enumerate() {
            if x == C64::new(0.0, 0.0) {
                continue;
            }
            let col = self.matrix.column(c);
            for (o, m) in out.iter_mut().zip(col.iter()) {
                *o += m * x;
            }
        }
        Ok(out)
    }
}

fn hermiticity_defect(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `⟨ψ|A|ψ⟩`.
///
/// `op` may act on the full state or on the system-plus-scratchpad register
/// only, in which case it is applied as `A ⊗ I` on the ancillas.
pub fn expectation_value(state: &StateVector, op: &HermitianOperator) -> Result<f64> {
    let layout = state.layout();
    let amps = state.amplitudes();
    let value = if op.dim() == state.dim() {
        let av = op.apply(amps)?;
        super::inner(amps, &av)
    } else if op.dim() == layout.register_dim() {
        let reg = layout.register_dim();
        amps.chunks(reg)
            .map(|slice| op.apply(slice).map(|av| super::inner(slice, &av)))
            .sum::<Result<C64>>()?
    } else {
        return Err(Error::DimensionMismatch {
            expected: state.dim(),
            found: op.dim(),
        });
    };
    if value.im.abs() >= REALITY_TOLERANCE {
        return Err(Error::Numerical(format!(
            "expectation value has imaginary part {:e}",
            value.im
        )));
    }
    Ok(value.re)
}
