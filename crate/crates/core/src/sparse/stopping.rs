//! Stopping-time families for weighted averages.

use log::warn;

use crate::error::{param, Result};
use crate::grid::{weighted_average, Cube, GridDomain, GridFunction};

#[derive(Clone, Debug, PartialEq)]
pub struct StoppingFamily {
    /// Stopping cubes, `Q₀` first.
    pub cubes: Vec<Cube>,
    /// `⟨|f|⟩^u_{r,F}` per stopping cube.
    pub averages: Vec<f64>,
    /// For every visited cube, the index (into `cubes`) of its stopping parent.
    pub visited: Vec<(Cube, usize)>,
    /// `Σ_F ⟨|f|⟩^u_{r,F} u(F)`.
    pub carleson_sum: f64,
    /// Whether `⟨|f|⟩^u_{r,Q} ≤ 2 ⟨|f|⟩^u_{r,π(Q)}` held for every visited cube.
    pub parent_bound_holds: bool,
    pub pruned: usize,
}

/// `F₀ = {Q₀}`; `F_k` collects, below each `F ∈ F_{k−1}`, the maximal cubes
/// `F′` of the candidate list with `⟨|f|⟩^u_{r,F′} > 2⟨|f|⟩^u_{r,F}`.
/// Cubes on which `u` vanishes are skipped with a warning.
pub fn stopping_family(
    candidates: &[Cube],
    f: &GridFunction,
    u: &GridFunction,
    r: f64,
    q0: &Cube,
) -> Result<StoppingFamily> {
    let d: GridDomain = *f.domain();
    let top = weighted_average(f, q0, r, u)?;
    let mut inside: Vec<&Cube> = candidates.iter().filter(|q| *q != q0 && q.contained_in(q0, &d)).collect();
    // coarse to fine: an intermediate stopping cube is always decided first
    inside.sort_by_key(|q| q.level);
    let mut cubes = vec![*q0];
    let mut averages = vec![top];
    let mut visited = vec![(*q0, 0usize)];
    let mut visited_avg = vec![top];
    let mut pruned = 0;
    for q in inside {
        let avg = match weighted_average(f, q, r, u) {
            Ok(v) => v,
            Err(e) => {
                warn!("stopping family: pruned {q:?}: {e}");
                pruned += 1;
                continue;
            }
        };
        let parent = (0..cubes.len())
            .filter(|&k| q.contained_in(&cubes[k], &d))
            .max_by_key(|&k| cubes[k].level)
            .expect("Q₀ contains every candidate");
        visited_avg.push(avg);
        if avg > 2.0 * averages[parent] {
            cubes.push(*q);
            averages.push(avg);
            visited.push((*q, cubes.len() - 1));
        } else {
            visited.push((*q, parent));
        }
    }
    // independent pass: the minimal stopping cube above each visited cube
    let holds = visited.iter().zip(&visited_avg).all(|((q, _), &avg)| {
        let pi = (0..cubes.len())
            .filter(|&k| q.contained_in(&cubes[k], &d))
            .max_by_key(|&k| cubes[k].level)
            .expect("Q₀ contains every visited cube");
        avg <= 2.0 * averages[pi]
    });
    let mass = |q: &Cube| q.cells(&d).iter().map(|c| u.values()[c]).sum::<f64>() * d.cell_measure();
    let carleson_sum = cubes.iter().zip(&averages).map(|(q, a)| a * mass(q)).sum();
    Ok(StoppingFamily { cubes, averages, visited, carleson_sum, parent_bound_holds: holds, pruned })
}

/// Candidate list: every base-lattice cube inside `q0`.
pub fn base_candidates(domain: &GridDomain, q0: &Cube) -> Result<Vec<Cube>> {
    if q0.lattice != crate::grid::Lattice::Base {
        return param("stopping families run on base-lattice cubes");
    }
    let mut out = vec![*q0];
    let mut frontier = vec![*q0];
    while let Some(q) = frontier.pop() {
        if q.side_cells(domain) > 1 {
            for c in q.dyadic_children(domain)? {
                out.push(c);
                frontier.push(c);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Lattice;
    use crate::maximal::weighted_maximal;
    use crate::rng;

    fn d1() -> GridDomain {
        GridDomain::unit(1, 5).unwrap()
    }

    #[test]
    fn constant_stops_at_top() {
        let d = d1();
        let q0 = d.base_cube();
        let cands = base_candidates(&d, &q0).unwrap();
        let one = GridFunction::constant(d, 1.0);
        let s = stopping_family(&cands, &one, &one, 1.0, &q0).unwrap();
        assert_eq!(s.cubes, vec![q0]);
        assert!(s.parent_bound_holds);
    }

    #[test]
    fn spike_chain_head() {
        let d = d1();
        let q0 = d.base_cube();
        let cands = base_candidates(&d, &q0).unwrap();
        // f = 9 on the first four cells, 1 elsewhere
        let mut f = GridFunction::constant(d, 1.0);
        for c in 0..4 {
            f.values_mut()[c] = 9.0;
        }
        let one = GridFunction::constant(d, 1.0);
        let s = stopping_family(&cands, &f, &one, 1.0, &q0).unwrap();
        // ⟨f⟩: level 0 → 2, level 1 → 3, level 2 → 5, level 3 → 9 (cells 0..4)
        // first cube above 2·2 is the level-2 cube; nothing below it exceeds 2·5
        assert_eq!(s.cubes, vec![q0, Cube::new(Lattice::Base, 2, [0, 0])]);
        assert!(s.parent_bound_holds);
    }

    #[test]
    fn carleson_sum_against_maximal() {
        let d = d1();
        let q0 = d.base_cube();
        let cands = base_candidates(&d, &q0).unwrap();
        let l = [crate::grid::DyadicLattice::base()];
        let mut ratios = Vec::new();
        for seed in 0..10 {
            let f = rng::uniform(d, &mut rng::stream(seed, 0), 0.0, 1.0).map(|v| v.powi(6));
            let u = rng::uniform(d, &mut rng::stream(seed, 1), 0.2, 2.0);
            let s = stopping_family(&cands, &f, &u, 1.0, &q0).unwrap();
            assert!(s.parent_bound_holds);
            let m = weighted_maximal(&f, 1.0, &u, &l).unwrap();
            let norm = m.weighted_lp_norm(1.0, &u);
            ratios.push(s.carleson_sum / norm);
        }
        // children of F carry at most half of u(F), so Σ_F ⟨f⟩_F u(F) ≤ 2 ‖M_u f‖_{L¹(u)}
        assert!(ratios.iter().all(|&r| r.is_finite() && r <= 2.0), "{ratios:?}");
    }

    #[test]
    fn degenerate_weight_prunes() {
        let d = d1();
        let q0 = d.base_cube();
        let cands = base_candidates(&d, &q0).unwrap();
        let mut u = GridFunction::constant(d, 1.0);
        for c in 0..4 {
            u.values_mut()[c] = 0.0;
        }
        let s = stopping_family(&cands, &GridFunction::constant(d, 1.0), &u, 1.0, &q0).unwrap();
        assert!(s.pruned > 0);
    }
}
