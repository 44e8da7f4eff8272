//! Finite-difference `L = −div(a ∇ ·)` with a real scalar coefficient.
//!
//! Face coefficients are harmonic means of the adjacent cells. Dirichlet
//! boundaries place a zero ghost value one cell beyond the boundary, which
//! gives the standard `(−1, 2, −1)/h²` stencil for `a ≡ 1`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{OperatorProfile, OperatorRep};
use crate::error::{Error, Result};
use crate::grid::{GridDomain, GridFunction};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Dirichlet,
    Periodic,
}

fn harmonic(a: f64, b: f64) -> f64 {
    2.0 * a * b / (a + b)
}

/// Assembles the symmetric positive semidefinite matrix of `−div(a∇·)`.
/// `κ = 2` is forced; `(p₀, q₀, α, ε)` are taken from `profile`.
pub fn divergence_form(
    domain: GridDomain,
    coefficient: &GridFunction,
    boundary: Boundary,
    profile: OperatorProfile,
) -> Result<OperatorRep> {
    if let Some((cell, &value)) =
        coefficient.values().iter().enumerate().find(|(_, v)| !(v.is_finite() && **v > 0.0))
    {
        return Err(Error::Ellipticity { cell, value });
    }
    let n = domain.cell_count();
    let m = domain.per_axis();
    let inv_h2 = 1.0 / (domain.cell_size() * domain.cell_size());
    let a = coefficient.values();
    let mut mat = DMatrix::zeros(n, n);
    for i in 0..n {
        let c = domain.cell_coords(i);
        for axis in 0..domain.dim() {
            for step in [-1i64, 1] {
                let pos = c[axis] as i64 + step;
                let neighbour = if (0..m as i64).contains(&pos) {
                    Some(pos as usize)
                } else if boundary == Boundary::Periodic {
                    Some(pos.rem_euclid(m as i64) as usize)
                } else {
                    None
                };
                match neighbour {
                    Some(p) => {
                        let mut nc = c;
                        nc[axis] = p;
                        let j = domain.cell_index(nc);
                        if j == i {
                            continue;
                        }
                        let w = harmonic(a[i], a[j]) * inv_h2;
                        mat[(i, i)] += w;
                        mat[(i, j)] -= w;
                    }
                    None => mat[(i, i)] += a[i] * inv_h2,
                }
            }
        }
    }
    OperatorRep::from_matrix(domain, mat, OperatorProfile { kappa: 2.0, ..profile })
}
