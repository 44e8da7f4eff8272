//! Linear operators on grid functions.
//!
//! Every operator is materialized as a dense `cells × cells` matrix acting on
//! cell values; kernel operators fold the cell measure into the entries.

mod calculus;
mod commutator;
mod elliptic;
mod matrix_file;
mod offdiag;
mod quadrature;
mod riesz;
mod spectral;

pub use calculus::{p_coefficients, pnt_apply, pnt_matrix, q_integral_apply, qnt_apply, qnt_matrix};
pub use commutator::commutator_apply;
pub use elliptic::{divergence_form, Boundary};
pub use matrix_file::{read_matrix_file, write_matrix_file};
pub use offdiag::{offdiag_profile, OffDiagRow, OffDiagTable};
pub use quadrature::{fractional_power, fractional_power_spectral, QuadratureConfig, QuadratureRule};
pub use riesz::{riesz_constant, riesz_point, riesz_potential};
pub use spectral::{semigroup_apply, Generator, SpectralData};

use nalgebra::{DMatrix, DVector};

use crate::error::{param, Result};
use crate::grid::{GridDomain, GridFunction};

/// Anything that maps grid functions to grid functions (possibly sublinearly).
pub trait Operator {
    fn domain(&self) -> &GridDomain;
    fn eval(&self, f: &GridFunction) -> GridFunction;
}

/// Exponent metadata `(p₀, q₀, κ, α, ε)`; `q₀ = ∞` is `f64::INFINITY`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OperatorProfile {
    pub p0: f64,
    pub q0: f64,
    pub kappa: f64,
    pub alpha: f64,
    pub eps: f64,
}

impl Default for OperatorProfile {
    fn default() -> Self {
        Self { p0: 1.0, q0: f64::INFINITY, kappa: 2.0, alpha: 0.0, eps: 1.0 }
    }
}

/// A dense linear operator on the cells of a domain.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorRep {
    domain: GridDomain,
    matrix: DMatrix<f64>,
    pub profile: OperatorProfile,
}

impl OperatorRep {
    pub fn from_matrix(domain: GridDomain, matrix: DMatrix<f64>, profile: OperatorProfile) -> Result<Self> {
        let n = domain.cell_count();
        if matrix.nrows() != n || matrix.ncols() != n {
            return param(format!("matrix is {}x{}, domain has {n} cells", matrix.nrows(), matrix.ncols()));
        }
        Ok(Self { domain, matrix, profile })
    }

    pub fn identity(domain: GridDomain) -> Self {
        let n = domain.cell_count();
        Self { domain, matrix: DMatrix::identity(n, n), profile: OperatorProfile::default() }
    }

    pub fn zero(domain: GridDomain) -> Self {
        let n = domain.cell_count();
        Self { domain, matrix: DMatrix::zeros(n, n), profile: OperatorProfile::default() }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn domain(&self) -> &GridDomain {
        &self.domain
    }

    pub fn apply(&self, f: &GridFunction) -> GridFunction {
        GridFunction::new(self.domain, self.apply_values(f.values())).expect("square matrix")
    }

    pub fn apply_values(&self, f: &[f64]) -> Vec<f64> {
        (&self.matrix * DVector::from_column_slice(f)).data.into()
    }

    /// `Σ_{y ∈ cols} K(x, y) f(y)` for each `x ∈ rows`.
    pub fn apply_block(&self, rows: &[usize], cols: &[usize], f: &[f64]) -> Vec<f64> {
        rows.iter()
            .map(|&x| cols.iter().map(|&y| self.matrix[(x, y)] * f[y]).sum())
            .collect()
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        let scale = self.matrix.amax().max(f64::MIN_POSITIVE);
        (&self.matrix - self.matrix.transpose()).amax() <= tol * scale
    }

    pub fn compose(&self, other: &OperatorRep) -> OperatorRep {
        Self { domain: self.domain, matrix: &self.matrix * &other.matrix, profile: self.profile }
    }
}

impl Operator for OperatorRep {
    fn domain(&self) -> &GridDomain {
        &self.domain
    }

    fn eval(&self, f: &GridFunction) -> GridFunction {
        self.apply(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use proptest::prelude::*;

    #[test]
    fn rejects_wrong_shape() {
        let d = GridDomain::unit(1, 3).unwrap();
        assert!(OperatorRep::from_matrix(d, DMatrix::zeros(4, 4), OperatorProfile::default()).is_err());
        assert!(OperatorRep::from_matrix(d, DMatrix::zeros(8, 8), OperatorProfile::default()).is_ok());
    }

    #[test]
    fn block_application_matches_full() {
        let d = GridDomain::unit(1, 5).unwrap();
        let t = riesz_potential(d, 0.5).unwrap();
        let f = rng::signed(d, &mut rng::stream(3, 0));
        let all: Vec<usize> = (0..32).collect();
        let full = t.apply(&f);
        let block = t.apply_block(&all, &all, f.values());
        for (a, b) in full.values().iter().zip(&block) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn linearity(seed in 0u64..1000, a in -3.0f64..3.0, b in -3.0f64..3.0) {
            let d = GridDomain::unit(1, 5).unwrap();
            let ops = [
                riesz_potential(d, 0.5).unwrap(),
                divergence_form(d, &GridFunction::constant(d, 1.0), Boundary::Dirichlet, OperatorProfile::default()).unwrap(),
                OperatorRep::identity(d),
            ];
            let f = rng::signed(d, &mut rng::stream(seed, 0));
            let g = rng::signed(d, &mut rng::stream(seed, 1));
            let comb = f.zip_map(&g, |x, y| a * x + b * y);
            for t in &ops {
                let lhs = t.apply(&comb);
                let (tf, tg) = (t.apply(&f), t.apply(&g));
                let scale = 1.0 + t.matrix().amax();
                for i in 0..d.cell_count() {
                    let rhs = a * tf.values()[i] + b * tg.values()[i];
                    prop_assert!((lhs.values()[i] - rhs).abs() <= 1e-12 * scale * 32.0);
                }
            }
        }
    }
}
