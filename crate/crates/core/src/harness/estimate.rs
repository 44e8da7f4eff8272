//! Empirical best constants of bilinear forms.
//!
//! `N̂ = max form(f, g) / (‖f‖ ‖g‖)` over random nonnegative trials, indicator
//! atoms and alternating maximization. Every evaluated ratio is attained by a
//! concrete pair, so `N̂` is a lower bound on the true best constant.

use crate::error::{param, Result};
use crate::grid::{Cube, GridDomain};
use crate::rng;
use crate::util::conjugate;
use crate::weights::Weight;

use rand::Rng;

/// A bilinear form on nonnegative cell-value vectors, monotone in each argument.
pub trait BilinearForm {
    fn domain(&self) -> &GridDomain;
    fn eval(&self, f: &[f64], g: &[f64]) -> f64;
    /// Density `D` with `form(f, g) = Σ_x g(x) D(x) hⁿ`, if the form is linear in `g`.
    fn dual_g(&self, _f: &[f64]) -> Option<Vec<f64>> {
        None
    }
    /// Density `D` with `form(f, g) = Σ_x f(x) D(x) hⁿ`, if the form is linear in `f`.
    fn dual_f(&self, _g: &[f64]) -> Option<Vec<f64>> {
        None
    }
}

/// `‖f‖_{L^p(w)}`.
#[derive(Clone, Debug)]
pub struct WeightedNorm<'a> {
    pub p: f64,
    pub w: &'a Weight,
}

impl WeightedNorm<'_> {
    pub fn norm(&self, f: &[f64]) -> f64 {
        crate::grid::lp_norm(f, self.p, Some(self.w.values()), self.w.domain().cell_measure())
    }

    /// A maximizer of `Σ f D` on the unit sphere (up to scaling):
    /// `f = (D/w)^{p′−1}`; for `p = 1`, the indicator of the largest `D/w`.
    pub fn extremizer(&self, density: &[f64]) -> Vec<f64> {
        let w = self.w.values();
        let ratio: Vec<f64> = density.iter().zip(w).map(|(&d, &w)| d.max(0.0) / w).collect();
        if self.p == 1.0 {
            let best = ratio.iter().copied().enumerate().fold((0, f64::NEG_INFINITY), |a, (i, r)| {
                if r > a.1 {
                    (i, r)
                } else {
                    a
                }
            });
            let mut out = vec![0.0; ratio.len()];
            out[best.0] = 1.0;
            return out;
        }
        if self.p.is_infinite() {
            return ratio.iter().map(|&r| if r > 0.0 { 1.0 } else { 0.0 }).collect();
        }
        let e = conjugate(self.p) - 1.0;
        // normalize before powering to stay in range
        let top = ratio.iter().fold(0.0f64, |m, &r| m.max(r));
        if top == 0.0 {
            return ratio;
        }
        ratio.iter().map(|&r| (r / top).powf(e)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EstimateOptions {
    pub trials: usize,
    pub rounds: usize,
    pub seed: u64,
    /// Extra trials with indicator atoms of these cubes.
    pub atoms: bool,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        Self { trials: 20, rounds: 10, seed: 0, atoms: true }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    /// Running maximum after each trial.
    pub running: Vec<f64>,
    /// Trials dropped for a zero norm.
    pub skipped: usize,
}

struct Tracker<'a, F: BilinearForm + ?Sized> {
    form: &'a F,
    nf: &'a WeightedNorm<'a>,
    ng: &'a WeightedNorm<'a>,
    rounds: usize,
    best: f64,
    running: Vec<f64>,
    skipped: usize,
}

impl<F: BilinearForm + ?Sized> Tracker<'_, F> {
    fn ratio(&self, f: &[f64], g: &[f64]) -> Option<f64> {
        let (a, b) = (self.nf.norm(f), self.ng.norm(g));
        if !(a > 0.0 && b > 0.0) {
            return None;
        }
        let r = self.form.eval(f, g) / (a * b);
        r.is_finite().then_some(r)
    }

    /// One trial: evaluate, then alternate cellwise dual extremizers.
    fn trial(&mut self, mut f: Vec<f64>, mut g: Vec<f64>) {
        let Some(mut local) = self.ratio(&f, &g) else {
            self.skipped += 1;
            self.running.push(self.best);
            return;
        };
        for _ in 0..self.rounds {
            let mut improved = false;
            if let Some(d) = self.form.dual_g(&f) {
                let cand = self.ng.extremizer(&d);
                if let Some(r) = self.ratio(&f, &cand) {
                    if r > local {
                        (local, g, improved) = (r, cand, true);
                    }
                }
            }
            if let Some(d) = self.form.dual_f(&g) {
                let cand = self.nf.extremizer(&d);
                if let Some(r) = self.ratio(&cand, &g) {
                    if r > local {
                        (local, f, improved) = (r, cand, true);
                    }
                }
            }
            if !improved {
                break;
            }
        }
        self.best = self.best.max(local);
        self.running.push(self.best);
    }
}

/// Best-constant estimate. Atoms are `(fχ_Q, gχ_Q)` with the supplied
/// per-cell profiles (e.g. `w^{1−p′}`), one per cube.
pub fn estimate_best_constant<F: BilinearForm + ?Sized>(
    form: &F,
    nf: &WeightedNorm<'_>,
    ng: &WeightedNorm<'_>,
    atoms: &[(Vec<f64>, Vec<f64>)],
    opts: &EstimateOptions,
) -> Result<Estimate> {
    let n = form.domain().cell_count();
    if opts.trials == 0 && atoms.is_empty() {
        return param("no trials requested");
    }
    let mut t = Tracker { form, nf, ng, rounds: opts.rounds, best: 0.0, running: Vec::new(), skipped: 0 };
    for k in 0..opts.trials {
        let mut s = rng::stream(opts.seed, k as u64);
        // mix dense and sparse random supports
        let density = [1.0, 0.25, 0.05][k % 3];
        let draw = |s: &mut rng::Stream| -> Vec<f64> {
            (0..n).map(|_| if s.random::<f64>() < density { s.random::<f64>() } else { 0.0 }).collect()
        };
        let f = draw(&mut s);
        let g = draw(&mut s);
        t.trial(f, g);
    }
    if opts.atoms {
        for (f, g) in atoms {
            t.trial(f.clone(), g.clone());
        }
    }
    Ok(Estimate { value: t.best, running: t.running, skipped: t.skipped })
}

/// `Σ_Q c_Q ⟨φ_Q f⟩_Q ⟨g⟩_Q` with geometric normalization `#cells(Q)`, where
/// `φ_Q` is an optional per-cell factor (e.g. `|b − ⟨b⟩_Q|^m`).
#[derive(Clone, Debug)]
pub struct LinearSparseForm {
    domain: GridDomain,
    cells: Vec<Vec<usize>>,
    geometric: Vec<f64>,
    coeff: Vec<f64>,
    factor: Option<Vec<Vec<f64>>>,
}

impl LinearSparseForm {
    pub fn new(domain: GridDomain, cubes: &[Cube], coeff: Vec<f64>) -> Result<Self> {
        if coeff.len() != cubes.len() {
            return param(format!("{} coefficients for {} cubes", coeff.len(), cubes.len()));
        }
        let cells = cubes.iter().map(|q| q.cells(&domain).to_vec()).collect();
        let geometric = cubes.iter().map(|q| q.side_cells(&domain).pow(domain.dim() as u32) as f64).collect();
        Ok(Self { domain, cells, geometric, coeff, factor: None })
    }

    /// The coefficient `|Q|^{1+α}` (α in measure units).
    pub fn power(domain: GridDomain, cubes: &[Cube], alpha: f64) -> Result<Self> {
        let coeff = cubes.iter().map(|q| q.measure(&domain).powf(1.0 + alpha)).collect();
        Self::new(domain, cubes, coeff)
    }

    /// Attach `φ_Q = |b − ⟨b⟩_{Q∩D}|^m` on the `f` side.
    pub fn with_oscillation(mut self, b: &[f64], m: u32) -> Self {
        let factor = self
            .cells
            .iter()
            .map(|cells| {
                let mean = cells.iter().map(|&c| b[c]).sum::<f64>() / cells.len().max(1) as f64;
                cells.iter().map(|&c| (b[c] - mean).abs().powi(m as i32)).collect()
            })
            .collect();
        self.factor = Some(factor);
        self
    }

    pub fn len(&self) -> usize {
        self.coeff.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeff.is_empty()
    }

    fn avg_f(&self, k: usize, f: &[f64]) -> f64 {
        let cells = &self.cells[k];
        let s: f64 = match &self.factor {
            Some(phi) => cells.iter().zip(&phi[k]).map(|(&c, &p)| p * f[c].abs()).sum(),
            None => cells.iter().map(|&c| f[c].abs()).sum(),
        };
        s / self.geometric[k]
    }

    fn avg_g(&self, k: usize, g: &[f64]) -> f64 {
        self.cells[k].iter().map(|&c| g[c].abs()).sum::<f64>() / self.geometric[k]
    }
}

impl BilinearForm for LinearSparseForm {
    fn domain(&self) -> &GridDomain {
        &self.domain
    }

    fn eval(&self, f: &[f64], g: &[f64]) -> f64 {
        (0..self.len()).map(|k| self.coeff[k] * self.avg_f(k, f) * self.avg_g(k, g)).sum()
    }

    fn dual_g(&self, f: &[f64]) -> Option<Vec<f64>> {
        let h = self.domain.cell_measure();
        let mut d = vec![0.0; self.domain.cell_count()];
        for k in 0..self.len() {
            let c = self.coeff[k] * self.avg_f(k, f) / (self.geometric[k] * h);
            for &x in &self.cells[k] {
                d[x] += c;
            }
        }
        Some(d)
    }

    fn dual_f(&self, g: &[f64]) -> Option<Vec<f64>> {
        let h = self.domain.cell_measure();
        let mut d = vec![0.0; self.domain.cell_count()];
        for k in 0..self.len() {
            let c = self.coeff[k] * self.avg_g(k, g) / (self.geometric[k] * h);
            match &self.factor {
                Some(phi) => {
                    for (&x, &p) in self.cells[k].iter().zip(&phi[k]) {
                        d[x] += c * p;
                    }
                }
                None => {
                    for &x in &self.cells[k] {
                        d[x] += c;
                    }
                }
            }
        }
        Some(d)
    }
}

/// `∫ |f| |g|` (the pairing), for calibration.
#[derive(Clone, Debug)]
pub struct Pairing(pub GridDomain);

impl BilinearForm for Pairing {
    fn domain(&self) -> &GridDomain {
        &self.0
    }

    fn eval(&self, f: &[f64], g: &[f64]) -> f64 {
        f.iter().zip(g).map(|(a, b)| (a * b).abs()).sum::<f64>() * self.0.cell_measure()
    }

    fn dual_g(&self, f: &[f64]) -> Option<Vec<f64>> {
        Some(f.iter().map(|x| x.abs()).collect())
    }

    fn dual_f(&self, g: &[f64]) -> Option<Vec<f64>> {
        Some(g.iter().map(|x| x.abs()).collect())
    }
}

/// Atoms `(ω^{1−p′}χ_Q, σ^{1−q}χ_Q)` — the extremal pair of a single-cube form
/// with norms `L^p(ω)` and `L^{q′}(σ)`.
pub fn weight_atoms(cubes: &[Cube], omega: &Weight, p: f64, sigma: &Weight, q_dual: f64) -> Vec<(Vec<f64>, Vec<f64>)> {
    let d = omega.domain();
    let ef = 1.0 - conjugate(p);
    let eg = 1.0 - conjugate(q_dual);
    cubes
        .iter()
        .map(|q| {
            let mut f = vec![0.0; d.cell_count()];
            let mut g = vec![0.0; d.cell_count()];
            for c in q.cells(d).iter() {
                f[c] = if p == 1.0 { 1.0 } else { omega.values()[c].powf(ef) };
                g[c] = if q_dual == 1.0 { 1.0 } else { sigma.values()[c].powf(eg) };
            }
            (f, g)
        })
        .collect()
}
