//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every export takes plain numbers and returns a JSON string (or throws a
//! string error), so the page needs no generated TypeScript glue beyond what
//! `wasm-bindgen` emits. The `*_json` functions are ordinary Rust and are what
//! the native tests exercise.

use fracsparse::grid::{shifted_lattices, DyadicLattice, GridDomain, GridFunction};
use fracsparse::maximal::{fractional_maximal, maximal};
use fracsparse::operators::{
    divergence_form, fractional_power, riesz_constant, riesz_potential, Boundary, Generator, OperatorProfile,
    QuadratureConfig, QuadratureRule, SpectralData,
};
use fracsparse::sparse::{construct_sparse, verify_sparseness, DominationParams};
use fracsparse::{rng, Result};
use serde::Serialize;
use wasm_bindgen::prelude::*;

const MAX_MAXIMAL_DEPTH: u32 = 10;
const MAX_SPECTRAL_DEPTH: u32 = 8;
const MAX_SPARSE_DEPTH: u32 = 8;

fn js<T: Serialize>(r: Result<T>) -> std::result::Result<String, JsError> {
    let v = r.map_err(|e| JsError::new(&e.to_string()))?;
    serde_json::to_string(&v).map_err(|e| JsError::new(&e.to_string()))
}

fn depth_in(depth: u32, max: u32) -> Result<u32> {
    if (1..=max).contains(&depth) {
        Ok(depth)
    } else {
        Err(fracsparse::Error::Parameter(format!("depth must lie in 1..={max}, got {depth}")))
    }
}

fn centers(d: &GridDomain) -> Vec<f64> {
    (0..d.cell_count()).map(|i| d.cell_center(i)[0]).collect()
}

#[derive(Debug, Serialize)]
pub struct MaximalOut {
    pub x: Vec<f64>,
    pub f: Vec<f64>,
    /// Over the standard dyadic lattice only.
    pub dyadic: Vec<f64>,
    /// Over the standard and the three shifted lattices.
    pub shifted: Vec<f64>,
    pub fractional: Vec<f64>,
}

/// Samples are held piecewise constant on `[0,1)` and resampled onto the
/// smallest dyadic grid with at least as many cells.
pub fn maximal_json(samples: &[f64], r: f64, alpha: f64) -> Result<MaximalOut> {
    if samples.is_empty() || samples.iter().any(|v| !v.is_finite()) {
        return Err(fracsparse::Error::Parameter("signal must be non-empty and finite".into()));
    }
    let depth = depth_in((samples.len().max(2) as f64).log2().ceil() as u32, MAX_MAXIMAL_DEPTH)?;
    let d = GridDomain::unit(1, depth)?;
    let n = samples.len();
    let f = GridFunction::from_fn(d, |x| samples[((x[0] * n as f64) as usize).min(n - 1)]);
    let dyadic = maximal(&f, r, &[DyadicLattice::base()]);
    let shifted = maximal(&f, r, &shifted_lattices(&d));
    let fractional = fractional_maximal(&f, alpha, r, &shifted_lattices(&d))?;
    Ok(MaximalOut {
        x: centers(&d),
        f: f.values().to_vec(),
        dyadic: dyadic.into_values(),
        shifted: shifted.into_values(),
        fractional: fractional.into_values(),
    })
}

#[derive(Debug, Serialize)]
pub struct FracPowOut {
    pub x: Vec<f64>,
    pub bump: Vec<f64>,
    /// `(−Δ_D)^{−α/2}` applied to the bump.
    pub fracpow: Vec<f64>,
    /// `c_{1,α} I_α` applied to the bump.
    pub riesz: Vec<f64>,
    /// Relative L² difference on the middle half of the interval.
    pub interior_error: f64,
}

/// Dirichlet Laplacian on `[0,1)` against the Riesz potential for an odd bump
/// centred at `center` with half-width `width`.
pub fn fracpow_json(depth: u32, alpha: f64, center: f64, width: f64) -> Result<FracPowOut> {
    let d = GridDomain::unit(1, depth_in(depth, MAX_SPECTRAL_DEPTH)?)?;
    if !(width > 0.0) {
        return Err(fracsparse::Error::Parameter(format!("width must be positive, got {width}")));
    }
    let l = divergence_form(d, &GridFunction::constant(d, 1.0), Boundary::Dirichlet, OperatorProfile::default())?;
    let s = SpectralData::new(&l)?;
    let rule = QuadratureRule::for_spectrum(&QuadratureConfig::default(), s.lambda_min(), s.lambda_max(), alpha / 2.0)?;
    let power = fractional_power(Generator::Spectral(&s), alpha, 2.0, &rule)?;
    let bump = fracsparse::harness::experiments::odd_bump(&d, center, width);
    let a = power.apply(&bump);
    let c = riesz_constant(1, alpha);
    let b = riesz_potential(d, alpha)?.apply(&bump).map(|v| c * v);
    let (mut num, mut den) = (0.0, 0.0);
    for (i, x) in centers(&d).into_iter().enumerate() {
        if (0.25..0.75).contains(&x) {
            num += (a.values()[i] - b.values()[i]).powi(2);
            den += b.values()[i].powi(2);
        }
    }
    Ok(FracPowOut {
        x: centers(&d),
        bump: bump.into_values(),
        fracpow: a.into_values(),
        riesz: b.into_values(),
        interior_error: if den > 0.0 { (num / den).sqrt() } else { 0.0 },
    })
}

#[derive(Debug, Serialize)]
pub struct CubeOut {
    pub lattice: String,
    pub level: u32,
    /// Interval `[a, b)` in domain coordinates (tripled cubes may overhang).
    pub a: f64,
    pub b: f64,
    /// Cells in the disjoint witness set `E_Q`.
    pub witness: usize,
}

#[derive(Debug, Serialize)]
pub struct SparseOut {
    pub cubes: Vec<CubeOut>,
    pub eta: f64,
    pub sparse: bool,
    /// `∫|T^m_b f||g|` over the sparse-form value.
    pub c: f64,
    pub lhs: f64,
    /// Plain-text family, one cube per line.
    pub text: String,
}

/// Run the sparse construction for `I_{1/2}` and its `m`-th commutator with
/// random `b`, `f`, `g` drawn from `seed`.
pub fn sparse_json(depth: u32, m: u32, seed: u64) -> Result<SparseOut> {
    let d = GridDomain::unit(1, depth_in(depth, MAX_SPARSE_DEPTH)?)?;
    let t = riesz_potential(d, 0.5)?;
    let mut s = rng::stream(seed, m as u64);
    let (b, f, g) = (rng::signed(d, &mut s), rng::signed(d, &mut s), rng::signed(d, &mut s));
    let params = DominationParams { m, p0: 1.0, q0: f64::INFINITY, alpha: 0.5 };
    let (fam, rep) = construct_sparse(&t, &b, &f, &g, &d.base_cube(), params)?;
    let check = verify_sparseness(&fam, &d);
    let h = d.cell_size();
    let cubes = fam
        .cubes
        .iter()
        .enumerate()
        .map(|(k, q)| {
            let span = q.span(&d)[0];
            CubeOut {
                lattice: q.lattice.to_string(),
                level: q.level,
                a: span.0 as f64 * h,
                b: span.1 as f64 * h,
                witness: fam.witness.as_ref().map_or(0, |w| w[k].len()),
            }
        })
        .collect();
    Ok(SparseOut { cubes, eta: check.achieved_eta, sparse: check.ok, c: rep.c, lhs: rep.lhs, text: fam.to_text(&d) })
}

#[wasm_bindgen]
pub fn maximal_functions(samples: &[f64], r: f64, alpha: f64) -> std::result::Result<String, JsError> {
    js(maximal_json(samples, r, alpha))
}

#[wasm_bindgen]
pub fn fracpow_vs_riesz(depth: u32, alpha: f64, center: f64, width: f64) -> std::result::Result<String, JsError> {
    js(fracpow_json(depth, alpha, center, width))
}

#[wasm_bindgen]
pub fn sparse_family(depth: u32, m: u32, seed: u64) -> std::result::Result<String, JsError> {
    js(sparse_json(depth, m, seed))
}
