//! Sparse forms, sparse operators and the sum estimates used for weighted bounds.
//!
//! Averages `⟨·⟩_{r,Q}` of inputs use the geometric `|Q|` with zero extension;
//! `⟨b⟩_Q` and weight masses are taken over `Q ∩ D`.

use crate::error::{param, Error, Result};
use crate::grid::{Cube, DyadicLattice, GridDomain, GridFunction};
use crate::util::conjugate;
use crate::weights::{ainf_constant, Weight};

use super::family::{SparseFamily, VerifiedFamily};

/// Which argument of the form carries the `|b − ⟨b⟩_Q|^m` factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormSide {
    F,
    G,
}

/// Mean of `b` over `Q ∩ D`.
pub(crate) fn inner_mean(b: &[f64], cells: &[usize]) -> f64 {
    if cells.is_empty() {
        return 0.0;
    }
    cells.iter().map(|&c| b[c]).sum::<f64>() / cells.len() as f64
}

/// `⟨|b − c|^j |f|⟩_{r,Q}` with geometric normalization `#cells(Q)`.
fn weighted_power_avg(f: &[f64], b: &[f64], c: f64, j: u32, cells: &[usize], geometric: f64, r: f64) -> f64 {
    let term = |x: usize| (b[x] - c).abs().powi(j as i32) * f[x].abs();
    if r.is_infinite() {
        return cells.iter().fold(0.0, |m, &x| m.max(term(x)));
    }
    let s: f64 = cells.iter().map(|&x| term(x).powf(r)).sum();
    (s / geometric).powf(1.0 / r)
}

/// Per-cube factors `A_j = ⟨|b−⟨b⟩_Q|^j |f|⟩_{p₀,Q}`, `B_j = ⟨|b−⟨b⟩_Q|^j |g|⟩_{q₀′,Q}`
/// for `j = 0..=m`, and the scale `|Q|^{1+α/n}`.
pub(crate) struct CubeTerms {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub scale: f64,
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn cube_terms(
    domain: &GridDomain,
    q: &Cube,
    b: &GridFunction,
    m: u32,
    f: &GridFunction,
    g: &GridFunction,
    p0: f64,
    q0: f64,
    alpha: f64,
) -> CubeTerms {
    let cells = q.cells(domain).to_vec();
    let geometric = q.side_cells(domain).pow(domain.dim() as u32) as f64;
    let mean = inner_mean(b.values(), &cells);
    let q0p = conjugate(q0);
    let a = (0..=m).map(|j| weighted_power_avg(f.values(), b.values(), mean, j, &cells, geometric, p0)).collect();
    let bb = (0..=m).map(|j| weighted_power_avg(g.values(), b.values(), mean, j, &cells, geometric, q0p)).collect();
    let scale = q.measure(domain).powf(1.0 + alpha / domain.dim() as f64);
    CubeTerms { a, b: bb, scale }
}

fn check_exponents(p0: f64, q0: f64) -> Result<()> {
    if !(1.0 <= p0 && p0 < q0) {
        return param(format!("need 1 ≤ p₀ < q₀, got p₀={p0}, q₀={q0}"));
    }
    Ok(())
}

/// `B^{m,α}_{S,b,p₀,q₀}(f, g) = Σ_Q ⟨|b−⟨b⟩_Q|^m|f|⟩_{p₀,Q} ⟨|g|⟩_{q₀′,Q} |Q|^{1+α/n}`,
/// or the symmetric term with the `b`-power on `g`.
#[allow(clippy::too_many_arguments)]
pub fn sparse_form(
    s: &VerifiedFamily,
    b: &GridFunction,
    m: u32,
    f: &GridFunction,
    g: &GridFunction,
    p0: f64,
    q0: f64,
    alpha: f64,
    side: FormSide,
) -> Result<f64> {
    check_exponents(p0, q0)?;
    let d = f.domain();
    Ok(s.cubes()
        .iter()
        .map(|q| {
            let t = cube_terms(d, q, b, m, f, g, p0, q0, alpha);
            let (x, y) = match side {
                FormSide::F => (t.a[m as usize], t.b[0]),
                FormSide::G => (t.a[0], t.b[m as usize]),
            };
            x * y * t.scale
        })
        .sum())
}

/// `c_k = ⟨|b−⟨b⟩_Q|^{m−k}|f|⟩_{r,Q} ⟨|b−⟨b⟩_Q|^k|g|⟩_{t,Q}` for `k = 0..=m`.
pub fn midpoint_coefficients(
    b: &GridFunction,
    f: &GridFunction,
    g: &GridFunction,
    q: &Cube,
    m: u32,
    r: f64,
    t: f64,
) -> Vec<f64> {
    let d = f.domain();
    let cells = q.cells(d).to_vec();
    let geometric = q.side_cells(d).pow(d.dim() as u32) as f64;
    let mean = inner_mean(b.values(), &cells);
    (0..=m)
        .map(|k| {
            weighted_power_avg(f.values(), b.values(), mean, m - k, &cells, geometric, r)
                * weighted_power_avg(g.values(), b.values(), mean, k, &cells, geometric, t)
        })
        .collect()
}

/// `A^{r,α}_S f = (Σ_Q (|Q|^{−α} ∫_Q f)^r χ_Q)^{1/r}` for `f ≥ 0`.
pub fn sparse_operator(s: &SparseFamily, r: f64, alpha: f64, f: &GridFunction) -> Result<GridFunction> {
    if !(r > 0.0 && r.is_finite()) || !(alpha > 0.0 && alpha <= 1.0) {
        return param(format!("sparse operator needs r > 0 and 0 < α ≤ 1, got r={r}, α={alpha}"));
    }
    if f.values().iter().any(|&v| v < 0.0) {
        return param("sparse operator is defined for nonnegative inputs");
    }
    let d = f.domain();
    let mut acc = vec![0.0; d.cell_count()];
    for q in &s.cubes {
        let cells = q.cells(d);
        let integral: f64 = cells.iter().map(|c| f.values()[c]).sum::<f64>() * d.cell_measure();
        let v = (q.measure(d).powf(-alpha) * integral).powf(r);
        for c in cells.iter() {
            acc[c] += v;
        }
    }
    GridFunction::new(*d, acc.into_iter().map(|v| v.powf(1.0 / r)).collect())
}

/// `A_{S′} f = Σ_Q ⟨f⟩_Q χ_Q`.
fn sparse_average_sum(s: &SparseFamily, f: &[f64], domain: &GridDomain) -> Vec<f64> {
    let mut acc = vec![0.0; domain.cell_count()];
    for q in &s.cubes {
        let cells = q.cells(domain);
        let geometric = q.side_cells(domain).pow(domain.dim() as u32) as f64;
        let avg = cells.iter().map(|c| f[c]).sum::<f64>() / geometric;
        for c in cells.iter() {
            acc[c] += avg;
        }
    }
    acc
}

/// `A^k_{S′,ν} f` with `A_{S′,ν} f = ν A_{S′} f`.
pub fn iterated_sparse_avg(s: &SparseFamily, nu: &Weight, k: u32, f: &GridFunction) -> GridFunction {
    let d = *f.domain();
    let mut cur = f.values().to_vec();
    for _ in 0..k {
        cur = sparse_average_sum(s, &cur, &d).into_iter().zip(nu.values()).map(|(a, w)| a * w).collect();
    }
    GridFunction::new(d, cur).expect("cell count")
}

fn masses(cubes: &[Cube], w: &Weight) -> Result<Vec<f64>> {
    cubes
        .iter()
        .map(|q| {
            let m = w.mass(q);
            if m > 0.0 {
                Ok(m)
            } else {
                Err(Error::DegenerateWeight(format!("zero mass on {q:?}")))
            }
        })
        .collect()
}

fn check_coefficients(cubes: &[Cube], lambda: &[f64]) -> Result<()> {
    if cubes.len() != lambda.len() {
        return param(format!("{} coefficients for {} cubes", lambda.len(), cubes.len()));
    }
    if lambda.iter().any(|&l| !(l >= 0.0)) {
        return param("coefficients λ_Q must be nonnegative");
    }
    Ok(())
}

/// `(Σ_Q λ_Q (ω(Q)^{-1} Σ_{Q′⊂Q} λ_{Q′} ω(Q′))^{p−1} ω(Q))^{1/p}`.
pub fn cov_norm_rhs(cubes: &[Cube], lambda: &[f64], omega: &Weight, p: f64) -> Result<f64> {
    check_coefficients(cubes, lambda)?;
    if !(p >= 1.0 && p.is_finite()) {
        return param(format!("need 1 ≤ p < ∞, got {p}"));
    }
    let d = omega.domain();
    let mass = masses(cubes, omega)?;
    let mut total = 0.0;
    for (i, q) in cubes.iter().enumerate() {
        let inner: f64 = cubes
            .iter()
            .enumerate()
            .filter(|(_, r)| r.contained_in(q, d))
            .map(|(j, _)| lambda[j] * mass[j])
            .sum();
        total += lambda[i] * (inner / mass[i]).powf(p - 1.0) * mass[i];
    }
    Ok(total.powf(1.0 / p))
}

/// `‖Σ_Q λ_Q χ_Q‖_{L^p(ω)}` by direct summation.
pub fn cov_direct_norm(cubes: &[Cube], lambda: &[f64], omega: &Weight, p: f64) -> Result<f64> {
    check_coefficients(cubes, lambda)?;
    let d = omega.domain();
    let mut acc = vec![0.0; d.cell_count()];
    for (q, &l) in cubes.iter().zip(lambda) {
        for c in q.cells(d).iter() {
            acc[c] += l;
        }
    }
    Ok(crate::grid::lp_norm(&acc, p, Some(omega.values()), d.cell_measure()))
}

/// Which estimate [`sparse_sum_bound`] applied.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SumCase {
    /// `α > 0`: `rhs = |R|^α σ(R)^β ω(R)^γ`, with the explicit constant `slack`.
    Universal { slack: f64 },
    /// `α = 0`: `rhs = [σ]_{A∞}^β [ω]_{A∞}^γ σ(R)^β ω(R)^γ`.
    Ainf { sigma_ainf: f64, omega_ainf: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SparseSumBound {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub case: SumCase,
}

/// Constant for the universal case on a family whose cubes of one level are
/// disjoint: with `θ = β + γ`, each level contributes at most
/// `(|Q_k|/|R|)^e |R|^α σ(R)^β ω(R)^γ` with `e = min(α, α + θ − 1)` (Hölder),
/// so the sum is a geometric series in `2^{−n e}`; when `e = 0` it is bounded by
/// the number of levels. For `β = γ = 0, α = 1` sparseness alone gives `1/η`.
fn universal_slack(alpha: f64, beta: f64, gamma: f64, n: usize, levels: usize, eta: f64) -> f64 {
    let e = alpha.min(alpha + beta + gamma - 1.0);
    if e > 1e-12 {
        1.0 / (1.0 - 2f64.powf(-(n as f64) * e))
    } else if beta == 0.0 && gamma == 0.0 && eta > 0.0 {
        (levels.max(1) as f64).min(1.0 / eta)
    } else {
        levels.max(1) as f64
    }
}

/// `Σ_{Q⊂R} |Q|^α σ(Q)^β ω(Q)^γ` against the applicable right-hand side.
#[allow(clippy::too_many_arguments)]
pub fn sparse_sum_bound(
    s: &SparseFamily,
    omega: &Weight,
    sigma: &Weight,
    alpha: f64,
    beta: f64,
    gamma: f64,
    r: &Cube,
    lattices: &[DyadicLattice],
) -> Result<SparseSumBound> {
    if !(alpha >= 0.0 && beta >= 0.0 && gamma >= 0.0 && alpha + beta + gamma >= 1.0) {
        return param(format!("need α, β, γ ≥ 0 with α+β+γ ≥ 1, got ({alpha}, {beta}, {gamma})"));
    }
    let d = omega.domain();
    let inside: Vec<&Cube> = s.cubes.iter().filter(|q| q.contained_in(r, d)).collect();
    let lhs: f64 = inside
        .iter()
        .map(|q| q.measure(d).powf(alpha) * sigma.mass(q).powf(beta) * omega.mass(q).powf(gamma))
        .sum();
    let core = r.measure(d).powf(alpha) * sigma.mass(r).powf(beta) * omega.mass(r).powf(gamma);
    let (rhs, case) = if alpha > 0.0 {
        let mut levels: Vec<u32> = inside.iter().map(|q| q.level).collect();
        levels.sort_unstable();
        levels.dedup();
        let slack = universal_slack(alpha, beta, gamma, d.dim(), levels.len(), s.eta);
        (core, SumCase::Universal { slack })
    } else {
        let cubes: Vec<Cube> = s.cubes.clone();
        let sa = if beta > 0.0 { ainf_constant(sigma, &cubes, lattices)? } else { 1.0 };
        let oa = if gamma > 0.0 { ainf_constant(omega, &cubes, lattices)? } else { 1.0 };
        (sa.powf(beta) * oa.powf(gamma) * core, SumCase::Ainf { sigma_ainf: sa, omega_ainf: oa })
    };
    Ok(SparseSumBound { lhs, rhs, ratio: lhs / rhs, case })
}

/// `Σ_Q λ_Q` for the default `λ_Q = |Q|^{1+α}` (α in measure units).
pub fn default_lambda(cubes: &[Cube], domain: &GridDomain, alpha: f64) -> Vec<f64> {
    cubes.iter().map(|q| q.measure(domain).powf(1.0 + alpha)).collect()
}
