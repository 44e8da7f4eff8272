//! Spectral calculus for symmetric operators and the semigroup `e^{−tL}`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::OperatorRep;
use crate::error::{param, Error, Result};
use crate::grid::{GridDomain, GridFunction};

/// Eigenvalues (ascending) and orthonormal eigenvectors of a symmetric operator.
#[derive(Clone, Debug)]
pub struct SpectralData {
    domain: GridDomain,
    eigenvalues: Vec<f64>,
    vectors: DMatrix<f64>,
}

impl SpectralData {
    pub fn new(op: &OperatorRep) -> Result<Self> {
        if !op.is_symmetric(1e-12) {
            return Err(Error::Spectrum("operator is not symmetric".into()));
        }
        let scale = op.matrix().amax();
        let eig = SymmetricEigen::new(op.matrix().clone());
        let n = eig.eigenvalues.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        if eigenvalues.first().is_some_and(|&v| v < -1e-10 * scale.max(1.0)) {
            return Err(Error::Spectrum(format!("negative eigenvalue {}", eigenvalues[0])));
        }
        let vectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
        Ok(Self { domain: *op.domain(), eigenvalues, vectors })
    }

    pub fn domain(&self) -> &GridDomain {
        &self.domain
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn vectors(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    pub fn eigenvector(&self, k: usize) -> GridFunction {
        GridFunction::new(self.domain, self.vectors.column(k).iter().copied().collect()).expect("square")
    }

    pub fn lambda_min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn lambda_max(&self) -> f64 {
        *self.eigenvalues.last().expect("nonempty spectrum")
    }

    /// `φ(L) f = V φ(Λ) Vᵀ f`.
    pub fn apply_fn(&self, phi: impl Fn(f64) -> f64, f: &[f64]) -> Vec<f64> {
        let coeffs = self.vectors.tr_mul(&DVector::from_column_slice(f));
        let scaled = DVector::from_iterator(
            coeffs.len(),
            coeffs.iter().zip(&self.eigenvalues).map(|(c, &l)| c * phi(l)),
        );
        (&self.vectors * scaled).data.into()
    }

    /// Dense matrix of `φ(L)`.
    pub fn matrix_fn(&self, phi: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let mut scaled = self.vectors.clone();
        for (k, &l) in self.eigenvalues.iter().enumerate() {
            let s = phi(l);
            scaled.column_mut(k).scale_mut(s);
        }
        scaled * self.vectors.transpose()
    }

    /// `‖L − VΛVᵀ‖_max`.
    pub fn reconstruction_error(&self, op: &OperatorRep) -> f64 {
        (self.matrix_fn(|l| l) - op.matrix()).amax()
    }
}

/// Source of a semigroup: exact spectral calculus, or a general square matrix
/// handled by scaling and squaring.
#[derive(Clone, Copy, Debug)]
pub enum Generator<'a> {
    Spectral(&'a SpectralData),
    Matrix(&'a OperatorRep),
}

impl Generator<'_> {
    pub fn domain(&self) -> &GridDomain {
        match self {
            Generator::Spectral(s) => s.domain(),
            Generator::Matrix(m) => m.domain(),
        }
    }

    /// Dense `e^{−tL}`.
    pub fn semigroup_matrix(&self, t: f64) -> DMatrix<f64> {
        match self {
            Generator::Spectral(s) => s.matrix_fn(|l| (-t * l).exp()),
            Generator::Matrix(m) => (m.matrix() * -t).exp(),
        }
    }
}

/// `e^{−tL} f`.
pub fn semigroup_apply(generator: Generator<'_>, t: f64, f: &GridFunction) -> Result<GridFunction> {
    if !(t > 0.0 && t.is_finite()) {
        return param(format!("semigroup time must be positive, got {t}"));
    }
    let values = match generator {
        Generator::Spectral(s) => s.apply_fn(|l| (-t * l).exp(), f.values()),
        Generator::Matrix(_) => {
            let e = generator.semigroup_matrix(t);
            (e * DVector::from_column_slice(f.values())).data.into()
        }
    };
    GridFunction::new(*f.domain(), values)
}
