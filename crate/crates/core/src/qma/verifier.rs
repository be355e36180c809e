//! Verifier circuits, their projectors, toy fixtures and the matrix file
//! format.
//!
//! A verifier acts on `m = n + h` qubits: `n` witness qubits in the low bits
//! and `h` scratchpad qubits above them. The output qubit is qubit 0.
//!
//! Matrix files are plain text:
//!
//! ```text
//! # comment lines start with '#'; blank lines are ignored
//! dim 4
//! 1 0 0 0
//! 0 0.5+0.5i 0.5-0.5i 0
//! ...
//! ```
//!
//! The first non-comment line must be `dim D`; exactly `D` rows of `D`
//! whitespace-separated entries follow. An entry is a real number, an
//! imaginary number with an `i` suffix, or `a+bi` / `a-bi` with no inner
//! whitespace, in the syntax of `num_complex::Complex64::from_str`.

use std::str::FromStr;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quantum::{max_abs, Projector, RegisterLayout, C64};

pub const UNITARITY_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifierCircuit {
    #[serde(skip)]
    unitary: DMatrix<C64>,
    pub witness_qubits: usize,
    pub scratchpad_qubits: usize,
    /// Completeness `u`.
    pub completeness: f64,
    /// Soundness `v < u`.
    pub soundness: f64,
    pub label: String,
}

impl VerifierCircuit {
    pub fn new(
        unitary: DMatrix<C64>,
        witness_qubits: usize,
        scratchpad_qubits: usize,
        completeness: f64,
        soundness: f64,
        label: impl Into<String>,
    ) -> Result<Self> {
        if witness_qubits == 0 {
            return Err(Error::validation(
                "verifier needs at least one witness qubit",
            ));
        }
        let layout = RegisterLayout::new(witness_qubits, scratchpad_qubits, 0, 0)?;
        if unitary.nrows() != layout.dim() || unitary.ncols() != layout.dim() {
            return Err(Error::DimensionMismatch {
                expected: layout.dim(),
                found: unitary.nrows(),
            });
        }
        let d = layout.dim();
        let defect = max_abs(&(unitary.adjoint() * &unitary - DMatrix::<C64>::identity(d, d)));
        if defect > UNITARITY_TOLERANCE {
            return Err(Error::validation(format!(
                "verifier is not unitary: max |V†V - I| = {defect:e}"
            )));
        }
        if completeness.is_nan() || soundness.is_nan() || completeness <= soundness {
            return Err(Error::validation(format!(
                "completeness {completeness} must exceed soundness {soundness}"
            )));
        }
        Ok(VerifierCircuit {
            unitary,
            witness_qubits,
            scratchpad_qubits,
            completeness,
            soundness,
            label: label.into(),
        })
    }

    pub fn unitary(&self) -> &DMatrix<C64> {
        &self.unitary
    }

    pub fn register_layout(&self) -> RegisterLayout {
        RegisterLayout::new(self.witness_qubits, self.scratchpad_qubits, 0, 0)
            .expect("validated at construction")
    }

    pub fn dim(&self) -> usize {
        self.unitary.nrows()
    }

    /// `Q = I_w ⊗ |0_h⟩⟨0_h|`.
    pub fn q_projector(&self) -> Projector {
        let n = self.witness_qubits;
        Projector::diagonal(self.dim(), |i| i >> n == 0)
    }

    /// `R = V (|1⟩⟨1| ⊗ I) V†` with the output on qubit 0.
    pub fn r_projector(&self) -> Result<Projector> {
        Projector::diagonal(self.dim(), |i| i & 1 == 1).conjugated(&self.unitary)
    }

    /// Identity verifier on one witness and one scratchpad qubit: `Q` and `R`
    /// commute and `|1⟩_w ⊗ |0⟩_s` is accepted with certainty.
    pub fn identity_fixture() -> Self {
        VerifierCircuit::new(DMatrix::identity(4, 4), 1, 1, 1.0, 0.0, "identity")
            .expect("identity is unitary")
    }

    /// `V(θ) = exp(−iθ Y_w ⊗ X_s)`: clean-scratchpad witnesses `|1⟩` and `|0⟩`
    /// are accepted with probabilities `cos²θ` and `sin²θ`, and `Q`, `R` do
    /// not commute for `0 < θ < π/2`.
    pub fn rotation_fixture(theta: f64) -> Result<Self> {
        let c = |re: f64, im: f64| C64::new(re, im);
        let y =
            DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]);
        let x =
            DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        // Kronecker order puts the scratchpad (high bit) first.
        let yx = x.kronecker(&y);
        let v = DMatrix::<C64>::identity(4, 4) * c(theta.cos(), 0.0) - yx * c(0.0, theta.sin());
        let (hi, lo) = {
            let (a, b) = (theta.cos().powi(2), theta.sin().powi(2));
            (a.max(b), a.min(b))
        };
        VerifierCircuit::new(v, 1, 1, hi, lo, format!("rotation({theta})"))
    }

    pub fn from_matrix_text(
        text: &str,
        witness_qubits: usize,
        scratchpad_qubits: usize,
        completeness: f64,
        soundness: f64,
        label: impl Into<String>,
    ) -> Result<Self> {
        let m = parse_verifier_matrix(text)?;
        Self::new(
            m,
            witness_qubits,
            scratchpad_qubits,
            completeness,
            soundness,
            label,
        )
    }
}

/// Parses the matrix file format described in the module documentation.
pub fn parse_verifier_matrix(text: &str) -> Result<DMatrix<C64>> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (line_no, header) = lines
        .next()
        .ok_or_else(|| Error::validation("matrix file is empty"))?;
    let dim = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["dim", d] => d
            .parse::<usize>()
            .map_err(|_| Error::validation(format!("line {line_no}: bad dimension '{d}'")))?,
        _ => {
            return Err(Error::validation(format!(
                "line {line_no}: expected header 'dim D', found '{header}'"
            )))
        }
    };
    if dim == 0 {
        return Err(Error::validation("matrix dimension must be positive"));
    }
    let mut entries = Vec::with_capacity(dim * dim);
    let mut rows = 0;
    for (line_no, line) in lines {
        if rows == dim {
            return Err(Error::validation(format!(
                "line {line_no}: more than {dim} rows"
            )));
        }
        let row: Vec<C64> = line
            .split_whitespace()
            .map(|tok| {
                C64::from_str(tok)
                    .map_err(|_| Error::validation(format!("line {line_no}: bad entry '{tok}'")))
            })
            .collect::<Result<_>>()?;
        if row.len() != dim {
            return Err(Error::validation(format!(
                "line {line_no}: expected {dim} entries, found {}",
                row.len()
            )));
        }
        entries.extend(row);
        rows += 1;
    }
    if rows != dim {
        return Err(Error::validation(format!(
            "expected {dim} rows, found {rows}"
        )));
    }
    Ok(DMatrix::from_row_slice(dim, dim, &entries))
}
