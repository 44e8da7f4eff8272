//! Measured off-diagonal profile of `(tL)^k e^{−tL}`.
//!
//! For annuli `j ≥ 2` the reference is the decay bound
//! `max{r^n, r^{n/p}} (1 + t^{1/κ}/ℓ(Q))^{n/q} (1 + r)^{−n−ε} ⨍_{S_j}|f|^p)^{1/p}`
//! with `r = 3^j ℓ(Q)/t^{1/κ}`. For `j ∈ {0, 1}` only the global
//! `L^p → L^q` bound `t^{−(n/κ)(1/p−1/q)}` is available, localized to `Q`.

use super::{OperatorProfile, SpectralData};
use crate::error::{param, Result};
use crate::grid::{annulus, set_average, Cube, DyadicLattice};
use crate::util::recip;

#[derive(Clone, Debug, PartialEq)]
pub struct OffDiagRow {
    pub cube: Cube,
    pub t: f64,
    pub j: u32,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct OffDiagTable {
    pub rows: Vec<OffDiagRow>,
    pub max_ratio: f64,
}

impl OffDiagTable {
    /// Largest ratio among rows with the given annulus index.
    pub fn max_for(&self, j: u32) -> f64 {
        self.rows.iter().filter(|r| r.j == j).fold(0.0, |m, r| m.max(r.ratio))
    }
}

/// Samples up to `per_level` evenly spaced base cubes per level, tests
/// `f = χ_{S_j(Q)}` and `f = |x − c_Q|`-weighted variants on each annulus.
#[allow(clippy::too_many_arguments)]
pub fn offdiag_profile(
    l: &SpectralData,
    k: u32,
    t_grid: &[f64],
    j_max: u32,
    p: f64,
    q: f64,
    profile: OperatorProfile,
    per_level: usize,
) -> Result<OffDiagTable> {
    if !(1.0 <= p && p <= q) {
        return param(format!("need 1 ≤ p ≤ q, got p={p}, q={q}"));
    }
    if t_grid.iter().any(|&t| !(t > 0.0)) {
        return param("times must be positive");
    }
    let d = *l.domain();
    let n = d.dim() as f64;
    let kappa = profile.kappa;
    let eps = profile.eps;
    let mut table = OffDiagTable::default();
    for level in 1..d.depth() {
        let cubes = DyadicLattice::base().cubes_at_level(&d, level);
        let stride = (cubes.len() / per_level.max(1)).max(1);
        for cube in cubes.iter().step_by(stride) {
            let qcells = cube.cells(&d).to_vec();
            let ell = cube.side(&d);
            let center = cube.center(&d);
            for j in 0..=j_max {
                let ring = annulus(&d, cube, j);
                if ring.is_empty() {
                    continue;
                }
                let samples: [Box<dyn Fn(usize) -> f64>; 2] = [
                    Box::new(|_| 1.0),
                    Box::new(|c| {
                        let x = d.cell_center(c);
                        1.0 + (x[0] - center[0]).abs() / ell
                    }),
                ];
                for sample in &samples {
                    let mut f = vec![0.0; d.cell_count()];
                    for &c in &ring {
                        f[c] = sample(c);
                    }
                    let f_avg = set_average(&f, &ring, p);
                    for &t in t_grid {
                        let out = l.apply_fn(|lam| (t * lam).powi(k as i32) * (-t * lam).exp(), &f);
                        let lhs = set_average(&out, &qcells, q);
                        let rhs = if j >= 2 {
                            let r = 3f64.powi(j as i32) * ell / t.powf(1.0 / kappa);
                            r.powf(n).max(r.powf(n / p))
                                * (1.0 + t.powf(1.0 / kappa) / ell).powf(n * recip(q))
                                * (1.0 + r).powf(-n - eps)
                                * f_avg
                        } else {
                            let h = d.cell_measure();
                            t.powf(-(n / kappa) * (1.0 / p - recip(q)))
                                * (qcells.len() as f64 * h).powf(-recip(q))
                                * (ring.len() as f64 * h).powf(1.0 / p)
                                * f_avg
                        };
                        let ratio = lhs / rhs;
                        table.max_ratio = table.max_ratio.max(ratio);
                        table.rows.push(OffDiagRow { cube: *cube, t, j, lhs, rhs, ratio });
                    }
                }
            }
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{GridDomain, GridFunction};
    use crate::operators::{divergence_form, Boundary};

    fn table(k: u32, p: f64, q: f64) -> OffDiagTable {
        let d = GridDomain::unit(1, 6).unwrap();
        let l = divergence_form(d, &GridFunction::constant(d, 1.0), Boundary::Dirichlet, OperatorProfile::default())
            .unwrap();
        let s = SpectralData::new(&l).unwrap();
        let ts: Vec<f64> = (0..6).map(|i| 1e-6 * 10f64.powi(i)).collect();
        offdiag_profile(&s, k, &ts, 3, p, q, OperatorProfile::default(), 4).unwrap()
    }

    #[test]
    fn ratios_finite_and_bounded() {
        for (k, p, q) in [(0, 1.0, 2.0), (1, 1.0, f64::INFINITY), (0, 2.0, 2.0)] {
            let t = table(k, p, q);
            assert!(!t.rows.is_empty());
            assert!(t.rows.iter().all(|r| r.ratio.is_finite() && r.ratio >= 0.0));
            // Gaussian bounds: uniformly bounded over cubes, times and annuli
            assert!(t.max_ratio < 10.0, "k={k} p={p} q={q}: {}", t.max_ratio);
        }
    }

    #[test]
    fn global_bound_on_inner_annuli() {
        let t = table(0, 1.0, f64::INFINITY);
        // heat kernel sup ≤ (4πt)^{-1/2}: the j ≤ 1 ratios stay below 1
        assert!(t.max_for(0) <= 1.0 && t.max_for(1) <= 1.0, "{} {}", t.max_for(0), t.max_for(1));
    }

    #[test]
    fn rejects_bad_exponents() {
        let d = GridDomain::unit(1, 3).unwrap();
        let l = divergence_form(d, &GridFunction::constant(d, 1.0), Boundary::Dirichlet, OperatorProfile::default())
            .unwrap();
        let s = SpectralData::new(&l).unwrap();
        assert!(offdiag_profile(&s, 0, &[1.0], 2, 3.0, 2.0, OperatorProfile::default(), 2).is_err());
    }
}
