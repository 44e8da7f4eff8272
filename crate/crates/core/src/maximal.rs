//! Maximal operators over the shifted dyadic lattices and the empirical
//! locally-weak profile.
//!
//! Suprema "over cubes containing x" run over every cube of the given
//! lattices at levels `0..=J` that meets the region of interest. Averages of
//! inputs (which are zero-extended) use the geometric `|Q|`; averages and
//! oscillations of operator outputs, known only inside the domain, use
//! `|Q ∩ D|`.

use std::collections::HashMap;

use crate::error::{param, Error, Result};
use crate::grid::{
    average, power_sum, set_average, set_oscillation, weighted_average, CellBox, Cube, DyadicLattice, GridDomain,
    GridFunction,
};
use crate::operators::{p_coefficients, Operator, OperatorRep, SpectralData};

/// Bounding cell span of the nonzero entries, or `None` when `f ≡ 0`.
fn support_span(f: &GridFunction) -> Option<[(i64, i64); 2]> {
    let d = f.domain();
    let mut span = [(i64::MAX, i64::MIN), (0, 1)];
    let mut any = false;
    for (i, &v) in f.values().iter().enumerate() {
        if v != 0.0 {
            any = true;
            let c = d.cell_coords(i);
            for (a, s) in span.iter_mut().enumerate().take(d.dim()) {
                s.0 = s.0.min(c[a] as i64);
                s.1 = s.1.max(c[a] as i64 + 1);
            }
        }
    }
    any.then_some(span)
}

fn covers(outer: &[(i64, i64); 2], inner: &[(i64, i64); 2], dim: usize) -> bool {
    (0..dim).all(|i| outer[i].0 <= inner[i].0 && inner[i].1 <= outer[i].1)
}

/// `x ↦ max_{Q ∋ x} value(Q)` for `x` in `region`; zero outside it.
/// `value` returning `None` marks a cube as contributing nothing.
fn sup_over_cubes(
    domain: &GridDomain,
    lattices: &[DyadicLattice],
    region: &CellBox,
    mut value: impl FnMut(&Cube, &CellBox) -> Option<f64>,
) -> Vec<f64> {
    let mut out = vec![0.0f64; domain.cell_count()];
    for l in lattices {
        for level in 0..=domain.depth() {
            for q in l.cubes_meeting(domain, level, region.span()) {
                let cells = q.cells(domain);
                if let Some(v) = value(&q, &cells) {
                    for c in cells.intersect(region).iter() {
                        if v > out[c] {
                            out[c] = v;
                        }
                    }
                }
            }
        }
    }
    out
}

fn wrap(domain: &GridDomain, values: Vec<f64>) -> GridFunction {
    GridFunction::new(*domain, values).expect("cell count")
}

/// `M_r f(x) = max_{Q ∋ x} ⟨|f|⟩_{r,Q}`.
pub fn maximal(f: &GridFunction, r: f64, lattices: &[DyadicLattice]) -> GridFunction {
    maximal_on(f, r, lattices, &f.domain().all_cells())
}

pub fn maximal_on(f: &GridFunction, r: f64, lattices: &[DyadicLattice], region: &CellBox) -> GridFunction {
    let d = f.domain();
    wrap(d, sup_over_cubes(d, lattices, region, |q, _| Some(average(f, q, r))))
}

/// `M_{r,u} f(x) = max_{Q ∋ x} ⟨|f|⟩^u_{r,Q}`.
pub fn weighted_maximal(f: &GridFunction, r: f64, u: &GridFunction, lattices: &[DyadicLattice]) -> Result<GridFunction> {
    let d = f.domain();
    let mut err = None;
    let out = sup_over_cubes(d, lattices, &d.all_cells(), |q, _| match weighted_average(f, q, r, u) {
        Ok(v) => Some(v),
        Err(e) => {
            err.get_or_insert(e);
            None
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(wrap(d, out)),
    }
}

/// `M_{α,p} f(x) = max_{Q ∋ x} ℓ(Q)^α ⟨|f|⟩_{p,Q}`.
pub fn fractional_maximal(f: &GridFunction, alpha: f64, p: f64, lattices: &[DyadicLattice]) -> Result<GridFunction> {
    let d = f.domain();
    let n = d.dim() as f64;
    if !(alpha >= 0.0 && alpha * p < n) {
        return param(format!("fractional maximal needs 0 ≤ α < n/p, got α={alpha}, p={p}"));
    }
    Ok(wrap(d, sup_over_cubes(d, lattices, &d.all_cells(), |q, _| Some(q.side(d).powf(alpha) * average(f, q, p)))))
}

/// `T(f χ_{D∖3Q})` on the cells of `Q`, given `Tf`.
fn truncated_values(t: &OperatorRep, f: &GridFunction, tf: &[f64], q: &Cube, cells: &CellBox) -> Vec<f64> {
    let d = f.domain();
    let near: Vec<usize> = q.dilated_cells(d, 1).iter().filter(|&c| f.values()[c] != 0.0).collect();
    let rows = cells.to_vec();
    let local = t.apply_block(&rows, &near, f.values());
    let mut vals = vec![0.0; d.cell_count()];
    for (k, &x) in rows.iter().enumerate() {
        vals[x] = tf[x] - local[k];
    }
    vals
}

/// Cube scan shared by `M^#_{T,s}` and `M_{T,q₀}`: `stat` reduces the
/// truncated output over the cells of `Q ∩ D`.
fn truncation_scan(
    t: &OperatorRep,
    f: &GridFunction,
    lattices: &[DyadicLattice],
    region: &CellBox,
    stat: impl Fn(&[f64], &[usize]) -> f64,
) -> GridFunction {
    let d = f.domain();
    let Some(supp) = support_span(f) else {
        return GridFunction::zeros(*d);
    };
    let tf = t.apply_values(f.values());
    let out = sup_over_cubes(d, lattices, region, |q, cells| {
        if covers(&q.dilated_span(d, 1), &supp, d.dim()) {
            return None;
        }
        let vals = truncated_values(t, f, &tf, q, cells);
        Some(stat(&vals, &cells.to_vec()))
    });
    wrap(d, out)
}

/// `M^#_{T,s} f(x) = max_{Q ∋ x} osc_s(T(f χ_{D∖3Q}); Q)`.
pub fn sharp_grand_truncation(t: &OperatorRep, f: &GridFunction, s: f64, lattices: &[DyadicLattice]) -> GridFunction {
    sharp_grand_truncation_on(t, f, s, lattices, &f.domain().all_cells())
}

pub fn sharp_grand_truncation_on(
    t: &OperatorRep,
    f: &GridFunction,
    s: f64,
    lattices: &[DyadicLattice],
    region: &CellBox,
) -> GridFunction {
    truncation_scan(t, f, lattices, region, |v, cells| set_oscillation(v, cells, s))
}

/// `M_{T,q₀} f(x) = max_{Q ∋ x} ⟨|T(f χ_{D∖3Q})|⟩_{q₀,Q}`.
pub fn truncation_ml(t: &OperatorRep, f: &GridFunction, q0: f64, lattices: &[DyadicLattice]) -> GridFunction {
    truncation_ml_on(t, f, q0, lattices, &f.domain().all_cells())
}

pub fn truncation_ml_on(
    t: &OperatorRep,
    f: &GridFunction,
    q0: f64,
    lattices: &[DyadicLattice],
    region: &CellBox,
) -> GridFunction {
    truncation_scan(t, f, lattices, region, |v, cells| set_average(v, cells, q0))
}

/// `M_{T,q₀}` as an operator, for weak-type measurements.
pub struct Truncation<'a> {
    pub op: &'a OperatorRep,
    pub q0: f64,
    pub lattices: Vec<DyadicLattice>,
}

impl Operator for Truncation<'_> {
    fn domain(&self) -> &GridDomain {
        self.op.domain()
    }

    fn eval(&self, f: &GridFunction) -> GridFunction {
        truncation_ml(self.op, f, self.q0, &self.lattices)
    }
}

/// `T^♯_L f(x) = max_{Q ∋ x} ⟨|P_{N,ℓ(Q)^κ}(L) L^{−α/κ} f|⟩_{q₀,Q}`.
pub fn tsharp(
    l: &SpectralData,
    n: u32,
    alpha: f64,
    kappa: f64,
    q0: f64,
    f: &GridFunction,
    lattices: &[DyadicLattice],
) -> Result<GridFunction> {
    let d = *f.domain();
    if !(alpha > 0.0 && alpha < d.dim() as f64 && kappa > 0.0) {
        return param(format!("T♯ needs 0 < α < n and κ > 0, got α={alpha}, κ={kappa}"));
    }
    if !(l.lambda_min() > 1e-12 * l.lambda_max()) {
        return Err(Error::Spectrum(format!("singular operator: λ_min = {}", l.lambda_min())));
    }
    let a = alpha / kappa;
    let coeffs = p_coefficients(n)?;
    let base = l.apply_fn(|lam| lam.powf(-a), f.values());
    let mut cache: HashMap<i64, Vec<f64>> = HashMap::new();
    let out = sup_over_cubes(&d, lattices, &d.all_cells(), |q, cells| {
        let side = q.side_cells(&d);
        let vals = cache.entry(side).or_insert_with(|| {
            let t = q.side(&d).powf(kappa);
            l.apply_fn(|lam| coeffs.iter().rev().fold(0.0, |acc, c| acc * t * lam + c) * (-t * lam).exp(), &base)
        });
        Some(set_average(vals, &cells.to_vec(), q0))
    });
    Ok(wrap(&d, out))
}

/// Measured locally-weak profile `λ ↦ φ̂(λ)`, non-increasing.
#[derive(Clone, Debug, PartialEq)]
pub struct WeakBoundProfile {
    pub p0: f64,
    pub alpha: f64,
    pub lambdas: Vec<f64>,
    pub phi: Vec<f64>,
    pub samples_used: usize,
    pub samples_skipped: usize,
}

impl WeakBoundProfile {
    /// `p₀(α) = p₀ n / (n − α p₀)`.
    pub fn target_exponent(&self, n: usize) -> f64 {
        weak_target_exponent(self.p0, self.alpha, n)
    }
}

pub fn weak_target_exponent(p0: f64, alpha: f64, n: usize) -> f64 {
    let n = n as f64;
    p0 * n / (n - alpha * p0)
}

/// For each `λ`, the largest `(1−λ)`-quantile of `|T(fχ_Q)|` on `Q` over the
/// samples, divided by `⟨|f|⟩_{p₀,Q} |Q|^{α/n}`. The quantile is the smallest
/// `t` with `#{x ∈ Q : |T(fχ_Q)(x)| > t} ≤ λ #Q`.
pub fn weak_bound_profile(
    t: &dyn Operator,
    p0: f64,
    alpha: f64,
    lambdas: &[f64],
    cubes: &[Cube],
    fs: &[GridFunction],
) -> Result<WeakBoundProfile> {
    let d = *t.domain();
    let n = d.dim() as f64;
    if !(alpha >= 0.0 && alpha * p0 < n) {
        return param(format!("need 0 ≤ α < n/p₀, got α={alpha}, p₀={p0}"));
    }
    if cubes.is_empty() || fs.is_empty() || lambdas.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut order: Vec<usize> = (0..lambdas.len()).collect();
    order.sort_by(|&a, &b| lambdas[a].total_cmp(&lambdas[b]));
    let mut phi = vec![0.0f64; lambdas.len()];
    let (mut used, mut skipped) = (0, 0);
    for q in cubes {
        let cells = q.cells(&d);
        for f in fs {
            let local = f.restrict(&cells);
            let avg = average(&local, q, p0);
            if avg == 0.0 {
                skipped += 1;
                continue;
            }
            used += 1;
            let denom = avg * q.measure(&d).powf(alpha / n);
            let out = t.eval(&local);
            let mut v: Vec<f64> = cells.iter().map(|c| out.values()[c].abs()).collect();
            v.sort_by(|a, b| b.total_cmp(a));
            for (k, &lam) in lambdas.iter().enumerate() {
                let allowed = (lam * v.len() as f64).floor().max(0.0) as usize;
                let quantile = v.get(allowed).copied().unwrap_or(0.0);
                phi[k] = phi[k].max(quantile / denom);
            }
        }
    }
    if used == 0 {
        return Err(Error::EmptySample);
    }
    // smallest non-increasing majorant
    let mut running = 0.0f64;
    for &k in order.iter().rev() {
        running = running.max(phi[k]);
        phi[k] = running;
    }
    Ok(WeakBoundProfile { p0, alpha, lambdas: lambdas.to_vec(), phi, samples_used: used, samples_skipped: skipped })
}

/// `sup_λ λ |{|g| > λ}|^{1/q}`, attained in the limit `λ ↑` a value of `|g|`.
pub fn weak_quasi_norm(values: &[f64], cell_measure: f64, q: f64) -> f64 {
    let mut v: Vec<f64> = values.iter().map(|x| x.abs()).filter(|&x| x > 0.0).collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v.iter()
        .enumerate()
        .map(|(k, &x)| x * ((k + 1) as f64 * cell_measure).powf(1.0 / q))
        .fold(0.0, f64::max)
}

/// `(Σ_{cells} |f|^p h^n)^{1/p}` restricted to a box; convenience for samples.
pub fn local_lp(f: &GridFunction, cells: &CellBox, p: f64) -> f64 {
    let s = power_sum(f.values(), cells.iter(), p);
    if p.is_infinite() {
        s
    } else {
        (s * f.domain().cell_measure()).powf(1.0 / p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{all_cubes, shifted_lattices, Lattice};
    use crate::operators::{divergence_form, fractional_power_spectral, riesz_potential, Boundary, OperatorProfile};
    use crate::rng;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn d1(depth: u32) -> GridDomain {
        GridDomain::unit(1, depth).unwrap()
    }

    #[test]
    fn maximal_basics() {
        let d = d1(5);
        let l = shifted_lattices(&d);
        let c = GridFunction::constant(d, 2.0);
        assert!(maximal(&c, 1.5, &l).values().iter().all(|&v| (v - 2.0).abs() < 1e-14));
        let f = rng::signed(d, &mut rng::stream(1, 0));
        let m = maximal(&f, 1.0, &l);
        for i in 0..f.len() {
            assert!(m.values()[i] >= f.values()[i].abs());
        }
        let one = GridFunction::constant(d, 1.0);
        assert_eq!(weighted_maximal(&f, 2.0, &one, &l).unwrap(), maximal(&f, 2.0, &l));
        assert!(weighted_maximal(&c, 1.0, &one, &l).unwrap().values().iter().all(|&v| (v - 2.0).abs() < 1e-14));
    }

    #[test]
    fn point_mass_against_scan() {
        let d = d1(5);
        let l = shifted_lattices(&d);
        let mut f = GridFunction::zeros(d);
        f.values_mut()[11] = 1.0;
        let m = maximal(&f, 1.0, &l);
        let h = d.cell_size();
        for x in 0..32 {
            // best cube through x and cell 11: brute force over every cube of every lattice
            let mut best = 0.0f64;
            for q in all_cubes(&d, &l) {
                let cells = q.cells(&d);
                if cells.contains(x) && cells.contains(11) {
                    best = best.max(h / q.side(&d));
                }
            }
            assert_relative_eq!(m.values()[x], best, epsilon = 1e-14);
        }
    }

    #[test]
    fn fractional_maximal_examples() {
        let d = d1(5);
        let l = shifted_lattices(&d);
        let f = rng::signed(d, &mut rng::stream(2, 0));
        assert_eq!(fractional_maximal(&f, 0.0, 2.0, &l).unwrap(), maximal(&f, 2.0, &l));
        let one = GridFunction::constant(d, 1.0);
        let m = fractional_maximal(&one, 0.5, 1.0, &l).unwrap();
        assert!(m.values().iter().all(|&v| (v - 1.0).abs() < 1e-14));
        let scaled = f.map(|v| -3.0 * v);
        let a = fractional_maximal(&scaled, 0.3, 1.0, &l).unwrap();
        let b = fractional_maximal(&f, 0.3, 1.0, &l).unwrap();
        for i in 0..f.len() {
            assert_relative_eq!(a.values()[i], 3.0 * b.values()[i], max_relative = 1e-14);
        }
        assert!(fractional_maximal(&f, 1.0, 1.0, &l).is_err());
        // M_{α,p} ≤ diam^α M_p
        let mp = maximal(&f, 1.5, &l);
        let ma = fractional_maximal(&f, 0.4, 1.5, &l).unwrap();
        for i in 0..f.len() {
            // tripled root cubes have side 3·diam
            assert!(ma.values()[i] <= (3.0 * d.diameter()).powf(0.4) * mp.values()[i] + 1e-14);
        }
    }

    #[test]
    fn sharp_truncation_trivial_cases() {
        let d = d1(4);
        let l = shifted_lattices(&d);
        let f = rng::signed(d, &mut rng::stream(3, 0));
        let id = OperatorRep::identity(d);
        assert!(sharp_grand_truncation(&id, &f, 1.0, &l).max_abs() < 1e-14);
        // only cube: the whole domain, whose triple covers the support
        let t = riesz_potential(d, 0.5).unwrap();
        let root = [DyadicLattice::base()];
        let only_root = sup_over_cubes(&d, &root, &d.all_cells(), |q, _| (q.level == 0).then_some(1.0));
        assert!(only_root.iter().all(|&v| v == 1.0));
        let m = truncation_scan(&t, &f, &root, &d.all_cells(), |v, c| {
            if c.len() == d.cell_count() {
                set_oscillation(v, c, 1.0)
            } else {
                0.0
            }
        });
        assert!(m.max_abs() < 1e-14);
        assert!(truncation_ml(&t, &GridFunction::zeros(d), 2.0, &l).max_abs() == 0.0);
    }

    #[test]
    fn sharp_truncation_direct_oscillation() {
        let d = d1(5);
        let l = shifted_lattices(&d);
        let t = riesz_potential(d, 0.5).unwrap();
        let f = rng::signed(d, &mut rng::stream(4, 0));
        let x = 13;
        let got = sharp_grand_truncation(&t, &f, 2.0, &l).values()[x];
        let mut best = 0.0f64;
        for q in all_cubes(&d, &l) {
            let cells = q.cells(&d).to_vec();
            if !cells.contains(&x) {
                continue;
            }
            let triple = q.dilated_cells(&d, 1);
            let g: Vec<f64> = (0..32)
                .map(|xx| {
                    (0..32)
                        .filter(|y| !triple.contains(*y))
                        .map(|y| t.matrix()[(xx, y)] * f.values()[y])
                        .sum()
                })
                .collect();
            let mut s = 0.0;
            for &a in &cells {
                for &b in &cells {
                    s += (g[a] - g[b]).powi(2);
                }
            }
            best = best.max((s / (cells.len() * cells.len()) as f64).sqrt());
        }
        assert_relative_eq!(got, best, max_relative = 1e-12);
    }

    fn laplacian(depth: u32) -> SpectralData {
        let d = d1(depth);
        let l = divergence_form(d, &GridFunction::constant(d, 1.0), Boundary::Dirichlet, OperatorProfile::default())
            .unwrap();
        SpectralData::new(&l).unwrap()
    }

    #[test]
    fn tsharp_eigenvector_closed_form() {
        let s = laplacian(5);
        let d = *s.domain();
        let l = shifted_lattices(&d);
        let v = s.eigenvector(2);
        let lam = s.eigenvalues()[2];
        let got = tsharp(&s, 2, 0.5, 2.0, f64::INFINITY, &v, &l).unwrap();
        for x in [0usize, 7, 20] {
            let mut best = 0.0f64;
            for q in all_cubes(&d, &l) {
                let cells = q.cells(&d);
                if !cells.contains(x) {
                    continue;
                }
                let t = q.side(&d).powi(2);
                let factor = (1.0 + t * lam) * (-t * lam).exp() * lam.powf(-0.25);
                let sup = cells.iter().fold(0.0f64, |m, c| m.max(v.values()[c].abs()));
                best = best.max(factor * sup);
            }
            assert_relative_eq!(got.values()[x], best, max_relative = 1e-9);
        }
        assert!(tsharp(&s, 2, 0.5, 2.0, 2.0, &GridFunction::zeros(d), &l).unwrap().max_abs() == 0.0);
    }

    #[test]
    fn tsharp_dominated_by_maximal_of_fractional_power() {
        let s = laplacian(6);
        let d = *s.domain();
        let l = shifted_lattices(&d);
        let frac = fractional_power_spectral(&s, 0.5, 2.0).unwrap();
        let mut ratios = Vec::new();
        for seed in 0..6 {
            let f = rng::signed(d, &mut rng::stream(seed, 0));
            let ts = tsharp(&s, 2, 0.5, 2.0, 2.0, &f, &l).unwrap();
            let m = maximal(&frac.apply(&f), 1.0, &l);
            let r = (0..f.len()).map(|i| ts.values()[i] / m.values()[i]).fold(0.0, f64::max);
            ratios.push(r);
        }
        let (lo, hi) = ratios.iter().fold((f64::MAX, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
        assert!(hi.is_finite() && hi / lo < 3.0, "{ratios:?}");
    }

    #[test]
    fn weak_profile_examples() {
        let d = d1(5);
        let cubes: Vec<Cube> = (1..4).flat_map(|k| DyadicLattice::base().cubes_at_level(&d, k)).collect();
        let fs: Vec<GridFunction> = (0..4).map(|s| rng::signed(d, &mut rng::stream(s, 0))).collect();
        let lambdas: Vec<f64> = (1..8).map(|k| 2f64.powi(-k)).collect();
        let zero = OperatorRep::zero(d);
        let p = weak_bound_profile(&zero, 1.0, 0.0, &lambdas, &cubes, &fs).unwrap();
        assert!(p.phi.iter().all(|&v| v == 0.0));
        let id = OperatorRep::identity(d);
        let p = weak_bound_profile(&id, 1.0, 0.0, &lambdas, &cubes, &fs).unwrap();
        for (lam, phi) in p.lambdas.iter().zip(&p.phi) {
            assert!(*phi <= 1.0 / lam + 1e-12);
        }
        let t = riesz_potential(d, 0.5).unwrap();
        let p = weak_bound_profile(&t, 1.0, 0.5, &lambdas, &cubes, &fs).unwrap();
        assert!(p.phi.iter().all(|v| v.is_finite()));
        // lambdas decrease along the grid, so φ̂ increases
        assert!(p.phi.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(p.target_exponent(1), 2.0);
        let zeros = vec![GridFunction::zeros(d)];
        assert!(matches!(weak_bound_profile(&t, 1.0, 0.5, &lambdas, &cubes, &zeros), Err(Error::EmptySample)));
    }

    #[test]
    fn quasi_norm_of_indicator() {
        // χ of 4 cells of size 1/16: sup_λ λ |{> λ}|^{1/2} = (1/4)^{1/2}
        let mut v = vec![0.0; 16];
        v[..4].fill(1.0);
        assert_relative_eq!(weak_quasi_norm(&v, 1.0 / 16.0, 2.0), 0.5, epsilon = 1e-15);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn truncation_dominates_sharp(seed in 0u64..10_000, s in 1.0f64..3.0) {
            let d = d1(5);
            let l = shifted_lattices(&d);
            let t = riesz_potential(d, 0.5).unwrap();
            let f = rng::signed(d, &mut rng::stream(seed, 0));
            let sharp = sharp_grand_truncation(&t, &f, s, &l);
            let trunc = truncation_ml(&t, &f, s, &l);
            for i in 0..f.len() {
                prop_assert!(sharp.values()[i] <= 2.0 * trunc.values()[i] * (1.0 + 1e-12) + 1e-14);
            }
        }

        #[test]
        fn maximal_monotone(seed in 0u64..10_000, r in 0.5f64..3.0) {
            let d = d1(5);
            let l = shifted_lattices(&d);
            let f = rng::uniform(d, &mut rng::stream(seed, 0), 0.0, 1.0);
            let g = f.zip_map(&rng::uniform(d, &mut rng::stream(seed, 1), 0.0, 1.0), |a, b| a + b);
            let (mf, mg) = (maximal(&f, r, &l), maximal(&g, r, &l));
            for i in 0..f.len() {
                prop_assert!(mf.values()[i] <= mg.values()[i] * (1.0 + 1e-12));
            }
        }

        #[test]
        fn weighted_maximal_against_scan(seed in 0u64..10_000) {
            let d = d1(4);
            let l = shifted_lattices(&d);
            let f = rng::signed(d, &mut rng::stream(seed, 0));
            let u = rng::uniform(d, &mut rng::stream(seed, 1), 0.1, 2.0);
            let m = weighted_maximal(&f, 2.0, &u, &l).unwrap();
            for x in 0..16 {
                let best = all_cubes(&d, &l).iter()
                    .filter(|q| q.cells(&d).contains(x))
                    .map(|q| {
                        let cells = q.cells(&d).to_vec();
                        let num: f64 = cells.iter().map(|&c| f.values()[c].powi(2) * u.values()[c]).sum();
                        let den: f64 = cells.iter().map(|&c| u.values()[c]).sum();
                        (num / den).sqrt()
                    })
                    .fold(0.0, f64::max);
                prop_assert!((m.values()[x] - best).abs() <= 1e-12 * best.max(1.0));
            }
        }
    }

    #[test]
    fn region_restriction_matches_full() {
        let d = d1(6);
        let l = shifted_lattices(&d);
        let t = riesz_potential(d, 0.5).unwrap();
        let f = rng::signed(d, &mut rng::stream(8, 0));
        let q = Cube::new(Lattice::Base, 2, [1, 0]);
        let region = q.cells(&d);
        let full = sharp_grand_truncation(&t, &f, 1.0, &l);
        let part = sharp_grand_truncation_on(&t, &f, 1.0, &l, &region);
        for c in region.iter() {
            assert_eq!(full.values()[c], part.values()[c]);
        }
    }
}
