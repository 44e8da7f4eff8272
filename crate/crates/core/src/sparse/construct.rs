//! Constructive sparse domination of `∫|T^m_b f||g|`.
//!
//! Each step on a base cube `Q` builds `η_k = (b − ⟨b⟩_{3Q})^k f χ_{3Q}`, marks
//! the exceptional set `Ω ⊂ Q` from the largest values of `|T η_k|` and
//! `M^#_{T,q₀} η_k` (each capped at `|Q|/(3(m+1)2^{n+2})`) and from the level
//! set `M_{p₀} η_k > c ⟨η_k⟩_{p₀,3Q}`, and selects the maximal dyadic subcubes
//! where `Ω` has density above `2^{−n−1}`. The cubes `3Q` are then re-housed in
//! the tripled lattices.
//!
//! The constant `c` comes from the weak type of `M_{p₀}`: over `L` lattices,
//! `|{M_{p₀} h > λ}| ≤ L ‖h‖^{p₀}_{p₀} / λ^{p₀}`, so
//! `c^{p₀} = L 3^n · 3(m+1)2^{n+2}` keeps that set within the same cap.

use log::debug;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::grid::{average, shifted_lattices, CellBox, Cube, GridDomain, GridFunction, Lattice};
use crate::maximal::{maximal_on, sharp_grand_truncation_on};
use crate::operators::{commutator_apply, OperatorRep};
use crate::util::top_cells;

use super::family::{verify_sparseness, SparseFamily};
use super::forms::{cube_terms, inner_mean};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DominationParams {
    pub m: u32,
    pub p0: f64,
    pub q0: f64,
    pub alpha: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RecursionStats {
    pub steps: usize,
    pub depth: u32,
    pub leaves: usize,
    /// `max Σ|Q′| / |Q|` over steps; at most 1/2.
    pub max_packing: f64,
    /// `max |Ω| / |Q|` over steps; at most `2^{−n−2}`.
    pub max_exceptional: f64,
    /// Every selected `Q′` had `2^{−n−1}|Q′| < |Q′ ∩ Ω| ≤ |Q′|/2`.
    pub density_window_holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DominationReport {
    /// `∫ |T^m_b f| |g|`.
    pub lhs: f64,
    /// The two symmetric form terms on the merged family (`b`-power on `f`, on `g`).
    pub form_f: f64,
    pub form_g: f64,
    /// `lhs / (form_f + form_g)`.
    pub c: f64,
    /// The same two terms summed over all tripled lattices.
    pub union_form_f: f64,
    pub union_form_g: f64,
    pub c_union: f64,
    /// `Σ_k Σ_Q ⟨|b−⟨b⟩_Q|^{m−k}|f|⟩_{p₀} ⟨|b−⟨b⟩_Q|^k|g|⟩_{q₀′} |Q|^{1+α/n}` over all tripled lattices.
    pub multi_form: f64,
    pub c_multi: f64,
    pub merged_lattice: Lattice,
    /// Total measure `Σ|3Q|` per tripled lattice, for the lattices that received cubes.
    pub lattice_measure: Vec<(Lattice, f64)>,
    pub pre_merge_eta: f64,
    pub post_merge_eta: f64,
    pub stats: RecursionStats,
    #[serde(skip)]
    pub pre_merge: SparseFamily,
    #[serde(skip)]
    pub tripled: Vec<SparseFamily>,
}

fn ratio(lhs: f64, rhs: f64) -> f64 {
    if lhs == 0.0 {
        0.0
    } else {
        lhs / rhs
    }
}

fn check_support(f: &GridFunction, q0: &CellBox, what: &str) -> Result<()> {
    if let Some(c) = f.values().iter().enumerate().find(|(c, v)| **v != 0.0 && !q0.contains(*c)).map(|(c, _)| c) {
        return Err(Error::Support(format!("{what} is nonzero at cell {c}, outside Q₀")));
    }
    Ok(())
}

/// Maximal base subcubes `Q′ ⊊ Q` with `|Q′ ∩ Ω| > |Q′| / 2^{n+1}`.
fn select(domain: &GridDomain, q: &Cube, omega: &[bool], out: &mut Vec<Cube>) -> Result<()> {
    let n = domain.dim() as u32;
    for child in q.dyadic_children(domain)? {
        let cells = child.cells(domain);
        let hits = cells.iter().filter(|&c| omega[c]).count();
        if hits == 0 {
            continue;
        }
        if hits * 2usize.pow(n + 1) > cells.len() {
            out.push(child);
        } else if child.side_cells(domain) > 1 {
            select(domain, &child, omega, out)?;
        }
    }
    Ok(())
}

/// Runs the recursion from `q0` and evaluates both sides of the domination.
pub fn construct_sparse(
    t: &OperatorRep,
    b: &GridFunction,
    f: &GridFunction,
    g: &GridFunction,
    q0: &Cube,
    params: DominationParams,
) -> Result<(SparseFamily, DominationReport)> {
    let d = *t.domain();
    let DominationParams { m, p0, q0: q0_exp, alpha } = params;
    if !(1.0 <= p0 && p0 < q0_exp) {
        return param(format!("need 1 ≤ p₀ < q₀, got p₀={p0}, q₀={q0_exp}"));
    }
    if q0.lattice != Lattice::Base || !q0.inside(&d) {
        return param("Q₀ must be a base-lattice cube inside the domain");
    }
    let root_cells = q0.cells(&d);
    check_support(f, &root_cells, "f")?;
    check_support(g, &root_cells, "g")?;
    let n = d.dim() as u32;
    let lattices = shifted_lattices(&d);
    let divisor = 3 * (m as usize + 1) * 2usize.pow(n + 2);
    let level_const = (lattices.len() as f64 * 3f64.powi(n as i32) * divisor as f64).powf(1.0 / p0);

    let mut stats = RecursionStats { density_window_holds: true, ..RecursionStats::default() };
    let mut cubes = Vec::new();
    let mut witness = Vec::new();
    let mut stack = vec![*q0];
    while let Some(q) = stack.pop() {
        let cells = q.cells(&d);
        stats.depth = stats.depth.max(q.level - q0.level);
        if q.side_cells(&d) == 1 {
            stats.leaves += 1;
            cubes.push(q);
            witness.push(cells.to_vec());
            continue;
        }
        stats.steps += 1;
        let cell_list = cells.to_vec();
        let budget = cell_list.len() / divisor;
        let mut omega = vec![false; d.cell_count()];
        if budget > 0 {
            let triple = q.dilated_cells(&d, 1).to_vec();
            let mean = inner_mean(b.values(), &triple);
            for k in 0..=m {
                let mut eta = vec![0.0; d.cell_count()];
                for &c in &triple {
                    eta[c] = (b.values()[c] - mean).powi(k as i32) * f.values()[c];
                }
                if eta.iter().all(|&v| v == 0.0) {
                    continue;
                }
                let eta = GridFunction::new(d, eta)?;
                let t_eta: Vec<f64> = t.apply_values(eta.values()).into_iter().map(f64::abs).collect();
                let sharp = sharp_grand_truncation_on(t, &eta, q0_exp, &lattices, &cells);
                for vals in [&t_eta[..], sharp.values()] {
                    for c in top_cells(vals, &cell_list, budget) {
                        omega[c] = true;
                    }
                }
                let mp = maximal_on(&eta, p0, &lattices, &cells);
                let threshold = level_const * average(&eta, &q.triple(&d)?, p0);
                for &c in &cell_list {
                    if mp.values()[c] > threshold {
                        omega[c] = true;
                    }
                }
            }
        }
        let marked = cell_list.iter().filter(|&&c| omega[c]).count();
        stats.max_exceptional = stats.max_exceptional.max(marked as f64 / cell_list.len() as f64);
        let mut selected = Vec::new();
        select(&d, &q, &omega, &mut selected)?;
        let mut covered = vec![false; d.cell_count()];
        let mut packed = 0usize;
        for s in &selected {
            let sc = s.cells(&d);
            let hits = sc.iter().filter(|&c| omega[c]).count();
            stats.density_window_holds &= hits * 2usize.pow(n + 1) > sc.len() && 2 * hits <= sc.len();
            packed += sc.len();
            for c in sc.iter() {
                covered[c] = true;
            }
        }
        stats.max_packing = stats.max_packing.max(packed as f64 / cell_list.len() as f64);
        cubes.push(q);
        witness.push(cell_list.into_iter().filter(|&c| !covered[c]).collect());
        stack.extend(selected.into_iter().rev());
    }
    debug!("sparse recursion: {} cubes, {} steps, depth {}", cubes.len(), stats.steps, stats.depth);

    let pre_merge = SparseFamily::with_witness(Lattice::Base, cubes.clone(), witness.clone(), 0.5);
    let pre_check = verify_sparseness(&pre_merge, &d);
    if !pre_check.ok {
        return Err(Error::UnverifiedFamily(format!("pre-merge: {}", pre_check.issues.join("; "))));
    }

    // re-house each 3Q, keeping E_Q as its witness
    let eta_post = 1.0 / (2.0 * 3f64.powi(n as i32));
    let lattice_count = 3usize.pow(n);
    let mut groups: Vec<(Vec<Cube>, Vec<Vec<usize>>)> = vec![(Vec::new(), Vec::new()); lattice_count];
    for (q, e) in cubes.iter().zip(witness) {
        let r = q.triple(&d)?;
        let Lattice::Tripled(j) = r.lattice else { unreachable!("triple lands in a tripled lattice") };
        groups[j].0.push(r);
        groups[j].1.push(e);
    }
    let mut tripled = Vec::new();
    let mut lattice_measure = Vec::new();
    let mut post_eta = 1.0f64;
    for (j, (cs, ws)) in groups.into_iter().enumerate() {
        if cs.is_empty() {
            continue;
        }
        let fam = SparseFamily::with_witness(Lattice::Tripled(j), cs, ws, eta_post);
        let check = verify_sparseness(&fam, &d);
        if !check.ok {
            return Err(Error::UnverifiedFamily(format!("lattice {j}: {}", check.issues.join("; "))));
        }
        post_eta = post_eta.min(check.achieved_eta);
        lattice_measure.push((fam.lattice, fam.total_measure(&d)));
        tripled.push(fam);
    }
    // largest total measure, first index on ties
    let best = lattice_measure
        .iter()
        .enumerate()
        .fold(0usize, |best, (k, (_, w))| if *w > lattice_measure[best].1 { k } else { best });
    let merged = tripled[best].clone();

    let h = d.cell_measure();
    let tb = commutator_apply(t, b, m, f);
    let lhs: f64 = tb.values().iter().zip(g.values()).map(|(x, y)| (x * y).abs()).sum::<f64>() * h;

    let mut totals = [0.0f64; 5]; // merged f, merged g, union f, union g, multi
    for (k, fam) in tripled.iter().enumerate() {
        for r in &fam.cubes {
            let terms = cube_terms(&d, r, b, m, f, g, p0, q0_exp, alpha);
            let mi = m as usize;
            let tf = terms.a[mi] * terms.b[0] * terms.scale;
            let tg = terms.a[0] * terms.b[mi] * terms.scale;
            let multi: f64 = (0..=mi).map(|j| terms.a[mi - j] * terms.b[j]).sum::<f64>() * terms.scale;
            if k == best {
                totals[0] += tf;
                totals[1] += tg;
            }
            totals[2] += tf;
            totals[3] += tg;
            totals[4] += multi;
        }
    }
    let report = DominationReport {
        lhs,
        form_f: totals[0],
        form_g: totals[1],
        c: ratio(lhs, totals[0] + totals[1]),
        union_form_f: totals[2],
        union_form_g: totals[3],
        c_union: ratio(lhs, totals[2] + totals[3]),
        multi_form: totals[4],
        c_multi: ratio(lhs, totals[4]),
        merged_lattice: merged.lattice,
        lattice_measure,
        pre_merge_eta: pre_check.achieved_eta,
        post_merge_eta: post_eta,
        stats,
        pre_merge,
        tripled,
    };
    Ok((merged, report))
}
