//! Exact dense diagonalization: the ground-truth oracle for every other module.

use nalgebra::{DMatrix, DVector};

use super::{max_abs, HermitianOperator, C64};
use crate::error::{Error, Result};

/// Largest matrix dimension accepted for a full dense eigensolve.
pub const FULL_DECOMPOSITION_CAP: usize = 1 << 12;

/// Eigenvalues closer than this are treated as one degenerate level.
pub const DEGENERACY_TOLERANCE: f64 = 1e-10;

const PIVOT_TIE: f64 = 1e-12;

/// Eigenvalues in ascending order with matching orthonormal eigenvector columns.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<C64>,
}

/// Diagonalizes `op`.
///
/// Eigenvectors are canonicalized so the output depends only on the operator:
/// inside every degenerate level (gap below [`DEGENERACY_TOLERANCE`]) the basis
/// is built by pivoted Gram-Schmidt on the level projector applied to the
/// standard basis, largest diagonal entry first and lowest index on ties. Each
/// vector's pivot entry is real and positive, so for a nondegenerate level
/// this fixes the global phase.
pub fn spectral_decompose(op: &HermitianOperator) -> Result<SpectralDecomposition> {
    let d = op.dim();
    if d > FULL_DECOMPOSITION_CAP {
        return Err(Error::capacity(
            "dense eigensolve dimension",
            d,
            FULL_DECOMPOSITION_CAP,
        ));
    }
    if d == 0 {
        return Err(Error::validation("cannot decompose an empty operator"));
    }
    let eig = op.matrix().clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let mut eigenvalues = Vec::with_capacity(d);
    let mut eigenvectors = DMatrix::zeros(d, d);
    let mut start = 0;
    while start < d {
        let mut end = start + 1;
        while end < d
            && eig.eigenvalues[order[end]] - eig.eigenvalues[order[end - 1]] < DEGENERACY_TOLERANCE
        {
            end += 1;
        }
        let level: Vec<usize> = order[start..end].to_vec();
        let raw = DMatrix::from_columns(
            &level
                .iter()
                .map(|&c| eig.eigenvectors.column(c))
                .collect::<Vec<_>>(),
        );
        let basis = canonical_basis(&raw);
        for (offset, v) in basis.into_iter().enumerate() {
            eigenvectors.set_column(start + offset, &v);
            eigenvalues.push(eig.eigenvalues[level[offset]]);
        }
        start = end;
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Pivoted Gram-Schmidt of `P e_i` where `P = raw raw†`.
fn canonical_basis(raw: &DMatrix<C64>) -> Vec<DVector<C64>> {
    let (d, c) = raw.shape();
    let mut diag: Vec<f64> = (0..d).map(|i| raw.row(i).norm_squared()).collect();
    let mut chosen: Vec<DVector<C64>> = Vec::with_capacity(c);
    for _ in 0..c {
        let mut pivot = 0;
        for i in 1..d {
            if diag[i] > diag[pivot] + PIVOT_TIE {
                pivot = i;
            }
        }
        // P_rem e_pivot = raw · conj(raw[pivot, :])ᵀ − Σ v · conj(v[pivot]).
        let row_conj: DVector<C64> = raw.row(pivot).adjoint();
        let mut v = raw * row_conj;
        for u in &chosen {
            let coeff = u[pivot].conj();
            v.axpy(-coeff, u, C64::new(1.0, 0.0));
        }
        // Re-orthogonalize once against accumulated rounding.
        for u in &chosen {
            let overlap = u.dotc(&v);
            v.axpy(-overlap, u, C64::new(1.0, 0.0));
        }
        let norm = v.norm();
        v /= C64::new(norm, 0.0);
        let phase = v[pivot] / v[pivot].norm();
        v /= phase;
        for (i, slot) in diag.iter_mut().enumerate() {
            *slot -= v[i].norm_sqr();
        }
        diag[pivot] = f64::NEG_INFINITY;
        chosen.push(v);
    }
    chosen
}

impl SpectralDecomposition {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<C64> {
        &self.eigenvectors
    }

    pub fn eigenvector(&self, a: usize) -> DVector<C64> {
        self.eigenvectors.column(a).into_owned()
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    /// `Σ φ_a |a⟩⟨a|`.
    pub fn reconstruct(&self) -> DMatrix<C64> {
        let mut scaled = self.eigenvectors.clone();
        for (a, &phi) in self.eigenvalues.iter().enumerate() {
            scaled.column_mut(a).scale_mut(phi);
        }
        scaled * self.eigenvectors.adjoint()
    }

    /// Max-entry deviation of the eigenvector Gram matrix from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let d = self.dim();
        max_abs(&(self.eigenvectors.adjoint() * &self.eigenvectors - DMatrix::identity(d, d)))
    }

    /// Coefficients `α_a = ⟨a|v⟩`.
    pub fn to_eigenbasis(&self, v: &[C64]) -> Vec<C64> {
        self.eigenvectors
            .column_iter()
            .map(|col| col.iter().zip(v).map(|(a, x)| a.conj() * x).sum())
            .collect()
    }

    /// `Σ_a c_a |a⟩`.
    pub fn from_eigenbasis(&self, coeffs: &[C64]) -> Vec<C64> {
        let d = self.dim();
        let mut out = vec![C64::new(0.0, 0.0); d];
        for (col, &c) in self.eigenvectors.column_iter().zip(coeffs) {
            for (o, a) in out.iter_mut().zip(col.iter()) {
                *o += a * c;
            }
        }
        out
    }

    /// Distinct eigenvalue levels with their multiplicities.
    pub fn levels(&self) -> Vec<(f64, usize)> {
        let mut out: Vec<(f64, usize)> = Vec::new();
        for &e in &self.eigenvalues {
            match out.last_mut() {
                Some((v, m)) if e - *v < DEGENERACY_TOLERANCE => *m += 1,
                _ => out.push((e, 1)),
            }
        }
        out
    }

    /// Eigenvalue closest to `x`.
    pub fn nearest_eigenvalue(&self, x: f64) -> f64 {
        self.eigenvalues
            .iter()
            .copied()
            .min_by(|a, b| (a - x).abs().total_cmp(&(b - x).abs()))
            .expect("nonempty spectrum")
    }
}
