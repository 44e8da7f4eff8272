//! Testing constants `ζ`, `ζ*` for the bilinear sparse form.

use crate::error::{param, Error, Result};
use crate::grid::{Cube, GridDomain};
use crate::util::conjugate;
use crate::weights::Weight;

use super::family::SparseFamily;

/// Coefficients `λ_Q` of the form.
#[derive(Clone, Debug, PartialEq)]
pub enum LambdaRule {
    /// `λ_Q = |Q|^{1+α}`, `α` in measure units.
    Power { alpha: f64 },
    /// One coefficient per family cube.
    Explicit(Vec<f64>),
}

impl LambdaRule {
    pub fn coefficients(&self, cubes: &[Cube], domain: &GridDomain) -> Result<Vec<f64>> {
        match self {
            Self::Power { alpha } => Ok(cubes.iter().map(|q| q.measure(domain).powf(1.0 + alpha)).collect()),
            Self::Explicit(v) if v.len() == cubes.len() && v.iter().all(|&x| x >= 0.0) => Ok(v.clone()),
            Self::Explicit(v) => param(format!("{} coefficients for {} cubes, all must be ≥ 0", v.len(), cubes.len())),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TestingRow {
    pub cube: Cube,
    pub t_u: f64,
    pub u_norm: f64,
    pub t_v: f64,
    pub v_norm: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TestingReport {
    pub rows: Vec<TestingRow>,
    pub zeta: f64,
    pub zeta_star: f64,
}

/// `ζ = max_R ‖T_R u‖_{L^q(v)} / u(R)^{1/p}` and
/// `ζ* = max_R ‖T_R v‖_{L^{p′}(u)} / v(R)^{1/q′}` with
/// `T_R f = Σ_{Q⊂R} τ_Q ⟨f⟩_Q χ_Q`, `τ_Q = ⟨u⟩_Q^{1/r−1} ⟨v⟩_Q^{−1/s} λ_Q/|Q|`.
/// Averages and masses are over `Q ∩ D`.
#[allow(clippy::too_many_arguments)]
pub fn testing_norms(
    s: &SparseFamily,
    u: &Weight,
    v: &Weight,
    rule: &LambdaRule,
    p: f64,
    q: f64,
    r: f64,
    s_exp: f64,
) -> Result<TestingReport> {
    if !(1.0 <= p && p <= q && q < s_exp && r > 0.0 && r < p) {
        return param(format!("need 1 ≤ p ≤ q < s and 0 < r < p, got p={p}, q={q}, r={r}, s={s_exp}"));
    }
    let d = *u.domain();
    let h = d.cell_measure();
    let cubes = &s.cubes;
    let lambda = rule.coefficients(cubes, &d)?;
    let mut tau = Vec::with_capacity(cubes.len());
    let mut avg_u = Vec::with_capacity(cubes.len());
    let mut avg_v = Vec::with_capacity(cubes.len());
    for (qc, &l) in cubes.iter().zip(&lambda) {
        let size = qc.inner_measure(&d);
        let (um, vm) = (u.mass(qc), v.mass(qc));
        if !(size > 0.0 && um > 0.0 && vm > 0.0) {
            return Err(Error::DegenerateWeight(format!("zero mass on {qc:?}")));
        }
        let (au, av) = (um / size, vm / size);
        avg_u.push(au);
        avg_v.push(av);
        tau.push(au.powf(1.0 / r - 1.0) * av.powf(-1.0 / s_exp) * l / size);
    }
    let pp = conjugate(p);
    let qp = conjugate(q);
    let norm = |acc: &[f64], w: &Weight, e: f64| crate::grid::lp_norm(acc, e, Some(w.values()), h);
    let mut rows = Vec::with_capacity(cubes.len());
    let (mut zeta, mut zeta_star) = (0.0f64, 0.0f64);
    for big in cubes {
        let mut tu = vec![0.0; d.cell_count()];
        let mut tv = vec![0.0; d.cell_count()];
        for (k, qc) in cubes.iter().enumerate() {
            if !qc.contained_in(big, &d) {
                continue;
            }
            for c in qc.cells(&d).iter() {
                tu[c] += tau[k] * avg_u[k];
                tv[c] += tau[k] * avg_v[k];
            }
        }
        let t_u = norm(&tu, v, q);
        let t_v = if pp.is_infinite() {
            // L^∞(u): u > 0 everywhere, so the plain maximum
            tv.iter().fold(0.0f64, |m, x| m.max(x.abs()))
        } else {
            norm(&tv, u, pp)
        };
        let u_norm = u.mass(big).powf(1.0 / p);
        let v_norm = v.mass(big).powf(1.0 / qp);
        zeta = zeta.max(t_u / u_norm);
        zeta_star = zeta_star.max(t_v / v_norm);
        rows.push(TestingRow { cube: *big, t_u, u_norm, t_v, v_norm });
    }
    Ok(TestingReport { rows, zeta, zeta_star })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Lattice;
    use crate::rng;
    use approx::assert_relative_eq;

    fn d1() -> GridDomain {
        GridDomain::unit(1, 5).unwrap()
    }

    #[test]
    fn single_cube_closed_form() {
        let d = d1();
        let r = Cube::new(Lattice::Base, 1, [1, 0]);
        let fam = SparseFamily::new(Lattice::Base, vec![r], 0.5);
        let u = Weight::new(rng::uniform(d, &mut rng::stream(1, 0), 0.5, 2.0)).unwrap();
        let v = Weight::new(rng::uniform(d, &mut rng::stream(1, 1), 0.5, 2.0)).unwrap();
        let (p, q, rr, s) = (2.0, 3.0, 1.0, 6.0);
        let rep = testing_norms(&fam, &u, &v, &LambdaRule::Power { alpha: 0.2 }, p, q, rr, s).unwrap();
        let size = 0.5;
        let (au, av) = (u.mass(&r) / size, v.mass(&r) / size);
        let tau = au.powf(1.0 / rr - 1.0) * av.powf(-1.0 / s) * size.powf(1.2) / size;
        let want = tau * au * v.mass(&r).powf(1.0 / q) / u.mass(&r).powf(1.0 / p);
        assert_relative_eq!(rep.zeta, want, max_relative = 1e-12);
    }

    #[test]
    fn unit_weights_count_cubes() {
        let d = d1();
        let cubes: Vec<Cube> = (0..3).map(|k| Cube::new(Lattice::Base, k, [0, 0])).collect();
        let fam = SparseFamily::new(Lattice::Base, cubes.clone(), 0.5);
        let one = Weight::constant(d, 1.0).unwrap();
        // α = 0 gives λ_Q = |Q| and τ_Q = 1
        let rep = testing_norms(&fam, &one, &one, &LambdaRule::Power { alpha: 0.0 }, 2.0, 2.0, 1.0, 4.0).unwrap();
        // R = top cube: T_R 1 = 3 on [0,1/4), 2 on [1/4,1/2), 1 on [1/2,1)
        let want = (9.0f64 * 0.25 + 4.0 * 0.25 + 0.5).sqrt();
        assert_relative_eq!(rep.rows[0].t_u, want, max_relative = 1e-12);
        assert_relative_eq!(rep.zeta, want, max_relative = 1e-12);
        assert_relative_eq!(rep.zeta_star, want, max_relative = 1e-12);
        assert!(testing_norms(&fam, &one, &one, &LambdaRule::Explicit(vec![1.0]), 2.0, 2.0, 1.0, 4.0).is_err());
    }
}
