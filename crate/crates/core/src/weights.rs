//! Weight characteristics, the Bloom weight and the `BMO_ν` seminorm.
//!
//! Every characteristic is a maximum over an explicit cube collection. Plain
//! averages of a weight are taken over `Q ∩ D` and normalized by `|Q ∩ D|`, so
//! protruding cubes of the shifted lattices behave like cubes clipped to the
//! domain.

use log::warn;

use crate::error::{param, Error, Result};
use crate::grid::{Cube, DyadicLattice, GridDomain, GridFunction};
use crate::util::conjugate;

/// A strictly positive, finite grid function.
#[derive(Clone, Debug, PartialEq)]
pub struct Weight(GridFunction);

impl Weight {
    pub fn new(f: GridFunction) -> Result<Self> {
        if let Some(i) = f.values().iter().position(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::DegenerateWeight(format!("value {} at cell {i}", f.values()[i])));
        }
        Ok(Self(f))
    }

    pub fn constant(domain: GridDomain, c: f64) -> Result<Self> {
        Self::new(GridFunction::constant(domain, c))
    }

    /// `|x − center|^exponent`, with distances below `h/2` clamped to `h/2`.
    pub fn power(domain: GridDomain, center: &[f64], exponent: f64) -> Result<Self> {
        let floor = 0.5 * domain.cell_size();
        Self::new(GridFunction::from_fn(domain, |x| {
            let r = x.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            r.max(floor).powf(exponent)
        }))
    }

    pub fn as_fn(&self) -> &GridFunction {
        &self.0
    }

    pub fn values(&self) -> &[f64] {
        self.0.values()
    }

    pub fn domain(&self) -> &GridDomain {
        self.0.domain()
    }

    /// `w^e` cellwise.
    pub fn pow(&self, e: f64) -> Result<Self> {
        Self::new(self.0.map(|v| v.powf(e)))
    }

    /// `w(Q ∩ D)`.
    pub fn mass(&self, q: &Cube) -> f64 {
        let d = self.domain();
        q.cells(d).iter().map(|c| self.values()[c]).sum::<f64>() * d.cell_measure()
    }

    /// `w(E)` for a cell set.
    pub fn set_mass(&self, cells: &[usize]) -> f64 {
        cells.iter().map(|&c| self.values()[c]).sum::<f64>() * self.domain().cell_measure()
    }
}

/// Kind of characteristic, with its exponents.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Characteristic {
    Ap { p: f64 },
    Ainf,
    Rh { r: f64 },
    Apq { p: f64, q: f64 },
    TwoWeight { alpha: f64, beta: f64, gamma: f64 },
}

/// A computed characteristic together with the size of the cube collection.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightConstants {
    pub which: Characteristic,
    pub value: f64,
    pub cubes: usize,
}

/// Mean of `w^e` over `Q ∩ D`.
fn mean_pow(w: &Weight, q: &Cube, e: f64) -> Result<f64> {
    let cells = q.cells(w.domain());
    if cells.is_empty() {
        return Err(Error::DegenerateWeight(format!("{q:?} misses the domain")));
    }
    let s: f64 = if e == 1.0 {
        cells.iter().map(|c| w.values()[c]).sum()
    } else {
        cells.iter().map(|c| w.values()[c].powf(e)).sum()
    };
    Ok(s / cells.len() as f64)
}

fn nonempty(cubes: &[Cube]) -> Result<()> {
    if cubes.is_empty() {
        return param("empty cube collection");
    }
    Ok(())
}

fn checked(value: f64, what: &str) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::DegenerateWeight(format!("{what} evaluated to {value}")))
    }
}

/// `[w]_{A_p} = max_Q ⟨w⟩_Q ⟨w^{1−p'}⟩_Q^{p−1}`.
pub fn ap_constant(w: &Weight, p: f64, cubes: &[Cube]) -> Result<f64> {
    if !(p > 1.0 && p.is_finite()) {
        return param(format!("A_p needs 1 < p < ∞, got {p}"));
    }
    nonempty(cubes)?;
    let e = 1.0 - conjugate(p);
    let mut best = 0.0f64;
    for q in cubes {
        let v = mean_pow(w, q, 1.0)? * mean_pow(w, q, e)?.powf(p - 1.0);
        best = best.max(checked(v, "A_p average")?);
    }
    Ok(best)
}

/// Fujii–Wilson `[w]_{A_∞} = max_Q w(Q)^{-1} ∫_Q M(wχ_Q)`, with `M` the
/// maximal function over the given lattices (geometric `|R|`).
pub fn ainf_constant(w: &Weight, cubes: &[Cube], lattices: &[DyadicLattice]) -> Result<f64> {
    nonempty(cubes)?;
    let d = *w.domain();
    let mut best = 0.0f64;
    let mut m = vec![0.0f64; d.cell_count()];
    for q in cubes {
        let qcells = q.cells(&d);
        if qcells.is_empty() {
            continue;
        }
        for c in qcells.iter() {
            m[c] = 0.0;
        }
        for l in lattices {
            for level in 0..=d.depth() {
                for r in l.cubes_meeting(&d, level, qcells.span()) {
                    let inter = r.cells(&d).intersect(&qcells);
                    if inter.is_empty() {
                        continue;
                    }
                    let mass: f64 = inter.iter().map(|c| w.values()[c]).sum::<f64>() * d.cell_measure();
                    let avg = mass / r.measure(&d);
                    for c in inter.iter() {
                        m[c] = m[c].max(avg);
                    }
                }
            }
        }
        let integral: f64 = qcells.iter().map(|c| m[c]).sum::<f64>() * d.cell_measure();
        best = best.max(checked(integral / w.mass(q), "A_∞ ratio")?);
    }
    Ok(best)
}

/// `[w]_{RH_r} = max_Q ⟨w⟩_{r,Q} / ⟨w⟩_Q`, `r = ∞` allowed.
pub fn rh_constant(w: &Weight, r: f64, cubes: &[Cube]) -> Result<f64> {
    if !(r > 1.0) {
        return param(format!("RH_r needs r > 1, got {r}"));
    }
    nonempty(cubes)?;
    let mut best = 0.0f64;
    for q in cubes {
        let top = if r.is_infinite() {
            q.cells(w.domain()).iter().fold(0.0f64, |m, c| m.max(w.values()[c]))
        } else {
            mean_pow(w, q, r)?.powf(1.0 / r)
        };
        best = best.max(checked(top / mean_pow(w, q, 1.0)?, "RH ratio")?);
    }
    Ok(best)
}

/// `[w]_{A_{p,q}} = max_Q ⟨w^q⟩_Q ⟨w^{−p'}⟩_Q^{q/p'}`.
pub fn apq_constant(w: &Weight, p: f64, q: f64, cubes: &[Cube]) -> Result<f64> {
    if !(1.0 < p && p < q && q.is_finite()) {
        return param(format!("A_(p,q) needs 1 < p < q < ∞, got p={p}, q={q}"));
    }
    nonempty(cubes)?;
    let pp = conjugate(p);
    let mut best = 0.0f64;
    for cube in cubes {
        let v = mean_pow(w, cube, q)? * mean_pow(w, cube, -pp)?.powf(q / pp);
        best = best.max(checked(v, "A_(p,q) average")?);
    }
    Ok(best)
}

/// `[ω,σ]_{A^α_{β,γ}} = max_Q |Q|^α ω(Q)^β σ(Q)^γ`, with `|Q|` the measure of `Q ∩ D`.
pub fn two_weight_constant(
    omega: &Weight,
    sigma: &Weight,
    alpha: f64,
    beta: f64,
    gamma: f64,
    cubes: &[Cube],
) -> Result<f64> {
    nonempty(cubes)?;
    if alpha > 0.0 || alpha + beta + gamma < 0.0 {
        warn!("two-weight class with α={alpha}, α+β+γ={} is trivial", alpha + beta + gamma);
    }
    let d = omega.domain();
    let mut best = 0.0f64;
    for q in cubes {
        let size = q.inner_measure(d);
        let (om, sm) = (omega.mass(q), sigma.mass(q));
        if size == 0.0 || (om == 0.0 && beta < 0.0) || (sm == 0.0 && gamma < 0.0) {
            return Err(Error::DegenerateWeight(format!("zero mass on {q:?} with a negative exponent")));
        }
        best = best.max(size.powf(alpha) * om.powf(beta) * sm.powf(gamma));
    }
    Ok(best)
}

/// `ν = (μ/λ)^{1/m}`.
pub fn bloom_weight(mu: &Weight, lambda: &Weight, m: u32) -> Result<Weight> {
    if m == 0 {
        return Err(Error::UndefinedBloom);
    }
    let e = 1.0 / m as f64;
    Weight::new(mu.as_fn().zip_map(lambda.as_fn(), |a, b| (a / b).powf(e)))
}

/// `‖b‖_{BMO_ν} = max_Q ν(Q)^{-1} ∫_Q |b − ⟨b⟩_Q|`.
pub fn bmo_nu(b: &GridFunction, nu: &Weight, cubes: &[Cube]) -> Result<f64> {
    nonempty(cubes)?;
    let d = b.domain();
    let mut best = 0.0f64;
    for q in cubes {
        let cells = q.cells(d);
        let mass = nu.mass(q);
        if !(mass > 0.0) {
            return Err(Error::DegenerateWeight(format!("ν vanishes on {q:?}")));
        }
        let mean = cells.iter().map(|c| b.values()[c]).sum::<f64>() / cells.len() as f64;
        let dev: f64 = cells.iter().map(|c| (b.values()[c] - mean).abs()).sum::<f64>() * d.cell_measure();
        best = best.max(dev / mass);
    }
    Ok(best)
}

/// Dispatches on the characteristic kind. `sigma` is needed only for the two-weight class.
pub fn characteristic(
    which: Characteristic,
    w: &Weight,
    sigma: Option<&Weight>,
    cubes: &[Cube],
    lattices: &[DyadicLattice],
) -> Result<WeightConstants> {
    let value = match which {
        Characteristic::Ap { p } => ap_constant(w, p, cubes)?,
        Characteristic::Ainf => ainf_constant(w, cubes, lattices)?,
        Characteristic::Rh { r } => rh_constant(w, r, cubes)?,
        Characteristic::Apq { p, q } => apq_constant(w, p, q, cubes)?,
        Characteristic::TwoWeight { alpha, beta, gamma } => {
            let sigma = sigma.ok_or_else(|| Error::Parameter("two-weight class needs σ".into()))?;
            two_weight_constant(w, sigma, alpha, beta, gamma, cubes)?
        }
    };
    Ok(WeightConstants { which, value, cubes: cubes.len() })
}
