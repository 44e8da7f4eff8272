//! End-to-end experiments. Each returns a typed report that can be flattened
//! into CSV records; nothing here reads the clock, so output depends only on
//! the configuration and seed.

use log::info;
use nalgebra::DMatrix;
use rand::Rng;
use serde::Serialize;

use crate::bounds::{lifted, thm31_bound, thm41_bloom_constant, BloomCharacteristics, ExponentProfile};
use crate::error::{param, Error, Result};
use crate::grid::{all_cubes, shifted_lattices, verify_three_lattice, Cube, DyadicLattice, GridDomain, GridFunction, Lattice};
use crate::maximal::{truncation_ml, weak_bound_profile, weak_quasi_norm, weak_target_exponent};
use crate::operators::{
    fractional_power, fractional_power_spectral, pnt_matrix, q_integral_apply, riesz_constant, riesz_potential,
    Generator, OperatorRep, QuadratureRule, SpectralData,
};
use crate::rng::{self, Stream};
use crate::sparse::{
    construct_sparse, cov_direct_norm, cov_norm_rhs, midpoint_coefficients, sparse_sum_bound, testing_norms,
    verify_sparseness, DominationParams, LambdaRule, SparseFamily, SumCase,
};
use crate::util::{conjugate, median};
use crate::weights::{ainf_constant, ap_constant, apq_constant, bloom_weight, bmo_nu, rh_constant, two_weight_constant, Weight};

use super::config::{CoefficientSpec, ExperimentConfig, FamilySpec, OperatorSpec, WeightSpec};
use super::estimate::{estimate_best_constant, weight_atoms, EstimateOptions, LinearSparseForm, WeightedNorm};
use super::report::{BoundReport, Record};

/// The experiments, one per CLI subcommand (plus the testing study).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExperimentKind {
    Weights,
    Dominate,
    TwoWeight,
    Testing,
    Bloom,
    FracPow,
    WeakType,
    Verify,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Weights => "weights",
            Self::Dominate => "dominate",
            Self::TwoWeight => "twoweight",
            Self::Testing => "testing",
            Self::Bloom => "bloom",
            Self::FracPow => "fracpow",
            Self::WeakType => "weaktype",
            Self::Verify => "verify",
        }
    }
}

impl ExperimentConfig {
    /// Defaults tuned per experiment; a JSON file is merged on top.
    pub fn preset(kind: ExperimentKind) -> Self {
        let mut c = Self::default();
        match kind {
            ExperimentKind::Weights | ExperimentKind::TwoWeight | ExperimentKind::Testing => {}
            ExperimentKind::Dominate => {
                c.operator = OperatorSpec::Riesz { alpha: 0.5 };
                c.profile.alpha = 0.5;
            }
            ExperimentKind::Bloom => {
                c.omega = WeightSpec::Power { center: vec![0.0], exponent: 0.1 };
                c.sigma = WeightSpec::Power { center: vec![0.0], exponent: -0.1 };
            }
            ExperimentKind::FracPow | ExperimentKind::WeakType => {
                c.operator = OperatorSpec::DivergenceForm {
                    coefficient: CoefficientSpec::Constant { value: 1.0 },
                    boundary: crate::operators::Boundary::Dirichlet,
                };
                c.profile.alpha = 0.5;
            }
            ExperimentKind::Verify => {
                c.domain.depth = 6;
                c.instances = 3;
                c.trials = 6;
                c.depths = vec![5, 6];
                c.sweep = vec![[-0.4, -0.1], [0.0, 0.1], [0.4, 0.25]];
            }
        }
        c
    }

    /// Merge a JSON document over `base`: objects merge key-wise, except
    /// tagged objects (with a `kind` key) and all other values, which replace.
    pub fn from_json_over(base: &Self, text: &str) -> Result<Self> {
        fn merge(into: &mut serde_json::Value, from: serde_json::Value) {
            use serde_json::Value::Object;
            match (into, from) {
                (Object(a), Object(b)) if !b.contains_key("kind") => {
                    for (k, v) in b {
                        match a.get_mut(&k) {
                            Some(slot) => merge(slot, v),
                            None => {
                                a.insert(k, v);
                            }
                        }
                    }
                }
                (slot, v) => *slot = v,
            }
        }
        let mut v = serde_json::to_value(base)?;
        merge(&mut v, serde_json::from_str(text)?);
        let cfg: Self = serde_json::from_value(v)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// A named pass/fail property with a short explanation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed, detail: detail.into() }
    }

    fn record(&self, experiment: &str, seed: u64) -> Record {
        Record::new(experiment, seed, format!("check:{}", self.name), if self.passed { 1.0 } else { 0.0 })
            .with_meta(self.detail.clone())
    }
}

fn max_of(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

fn min_of(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(f64::INFINITY, f64::min)
}

// ---------------------------------------------------------------- families

/// Nested base cubes `[0, 2^{−k})ⁿ`, `k = 0..=J` (1/2-sparse).
pub fn tower_family(domain: &GridDomain) -> SparseFamily {
    let cubes = (0..=domain.depth()).map(|k| Cube::new(Lattice::Base, k, [0, 0])).collect();
    SparseFamily::new(Lattice::Base, cubes, 0.5)
}

/// A random 1/2-sparse base family: below every selected cube pick nothing,
/// one child, one grandchild, or two grandchildren in different children.
/// Selected subcubes cover at most half of their parent, so `E_Q = Q ∖ ∪children`
/// has `|E_Q| ≥ |Q|/2`.
pub fn random_sparse_family(domain: &GridDomain, rng: &mut Stream, max_level: u32) -> Result<SparseFamily> {
    let max_level = max_level.min(domain.depth());
    let mut cubes = vec![domain.base_cube()];
    let mut stack = vec![domain.base_cube()];
    while let Some(q) = stack.pop() {
        if q.level + 2 > max_level {
            continue;
        }
        let children = q.dyadic_children(domain)?;
        let pick = |rng: &mut Stream, v: &[Cube]| v[rng.random_range(0..v.len())];
        let mut next = Vec::new();
        match rng.random_range(0..4) {
            0 => {}
            1 => next.push(pick(rng, &children)),
            2 => {
                let c = pick(rng, &children);
                next.push(pick(rng, &c.dyadic_children(domain)?));
            }
            _ => {
                let i = rng.random_range(0..children.len());
                let j = (i + 1 + rng.random_range(0..children.len() - 1)) % children.len();
                for k in [i, j] {
                    next.push(pick(rng, &children[k].dyadic_children(domain)?));
                }
            }
        }
        for c in next {
            cubes.push(c);
            stack.push(c);
        }
    }
    cubes.sort();
    Ok(SparseFamily::new(Lattice::Base, cubes, 0.5))
}

fn family_for(cfg: &ExperimentConfig, d: &GridDomain, rng: &mut Stream) -> Result<SparseFamily> {
    let fam = match &cfg.family {
        FamilySpec::Tower => tower_family(d),
        FamilySpec::Random => random_sparse_family(d, rng, d.depth())?,
        FamilySpec::File { path } => SparseFamily::read(path, d)?,
    };
    let check = verify_sparseness(&fam, d);
    if !check.ok {
        return Err(Error::UnverifiedFamily(format!("{check:?}")));
    }
    Ok(fam)
}

/// `|x − c|^a` with a random center in the domain and `a ∈ [lo, hi)`.
pub fn random_power_weight(d: &GridDomain, rng: &mut Stream, lo: f64, hi: f64) -> Result<Weight> {
    let center: Vec<f64> = (0..d.dim()).map(|i| d.origin()[i] + rng.random::<f64>() * d.side()).collect();
    Weight::power(*d, &center, rng.random_range(lo..hi))
}

// ---------------------------------------------------------------- operators

/// The operator `T` of a configuration: direct operators as given, and
/// `L^{−α/κ}` (by quadrature) for a divergence-form generator.
pub fn build_operator(cfg: &ExperimentConfig, d: &GridDomain) -> Result<OperatorRep> {
    match &cfg.operator {
        OperatorSpec::DivergenceForm { .. } => {
            let l = cfg.operator.build_generator(d)?;
            let s = SpectralData::new(&l)?;
            let (alpha, kappa) = (cfg.profile.alpha, cfg.profile.kappa);
            let rule = QuadratureRule::for_spectrum(&cfg.quadrature, s.lambda_min(), s.lambda_max(), alpha / kappa)?;
            fractional_power(Generator::Spectral(&s), alpha, kappa, &rule)
        }
        other => other.build_direct(d),
    }
}

// ---------------------------------------------------------------- weights

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeightsReport {
    pub rows: Vec<(String, f64)>,
    pub cubes: usize,
}

/// Characteristics of `ω` and `σ` over all cubes of the shifted lattices.
pub fn run_weights_experiment(cfg: &ExperimentConfig) -> Result<WeightsReport> {
    let d = cfg.domain.build()?;
    let lat = shifted_lattices(&d);
    let cubes = all_cubes(&d, &lat);
    let pr = cfg.profile.build(d.dim());
    let mut rows = Vec::new();
    for (name, spec) in [("omega", &cfg.omega), ("sigma", &cfg.sigma)] {
        let w = spec.build(&d)?;
        rows.push((format!("{name}:A_{}", pr.p), ap_constant(&w, pr.p, &cubes)?));
        rows.push((format!("{name}:A_inf"), ainf_constant(&w, &cubes, &lat)?));
        rows.push((format!("{name}:RH_2"), rh_constant(&w, 2.0, &cubes)?));
        if pr.p < pr.q {
            rows.push((format!("{name}:A_{},{}", pr.p, pr.q), apq_constant(&w, pr.p, pr.q, &cubes)?));
        }
    }
    Ok(WeightsReport { rows, cubes: cubes.len() })
}

impl WeightsReport {
    pub fn records(&self, seed: u64) -> Vec<Record> {
        self.rows
            .iter()
            .map(|(q, v)| Record::new("weights", seed, q.clone(), *v).with_meta(format!("cubes={}", self.cubes)))
            .collect()
    }
}

// ---------------------------------------------------------------- two-weight

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TwoWeightRow {
    /// `ω = |x|^a`, `σ = |x|^b` (or the configured weights when the sweep is empty).
    pub a: f64,
    pub b: f64,
    pub uv: f64,
    pub u_ainf: f64,
    pub v_ainf: f64,
    /// `N̂ / [u,v]`, at least 1 because the atoms attain the single-cube value.
    pub necessity: f64,
    pub report: BoundReport,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TwoWeightSweep {
    pub rows: Vec<TwoWeightRow>,
    /// `max N̂/bound`: the single slack of the sweep.
    pub slack: f64,
    /// `max / min` of `N̂/bound`.
    pub spread: f64,
    pub necessity_min: f64,
    pub family_size: usize,
}

fn check_linear_form(pr: &ExponentProfile) -> Result<()> {
    if pr.r != 1.0 || !pr.s.is_infinite() {
        return param(format!("the form estimator handles r = 1, s = ∞ (linear averages); got r={}, s={}", pr.r, pr.s));
    }
    Ok(())
}

/// `u = ω^{r/(r−p)}`, `v = σ^{s′/(s′−q′)}`.
pub fn dual_weights(pr: &ExponentProfile, omega: &Weight, sigma: &Weight) -> Result<(Weight, Weight)> {
    let sp = conjugate(pr.s);
    let qp = conjugate(pr.q);
    Ok((omega.pow(pr.r / (pr.r - pr.p))?, sigma.pow(sp / (sp - qp))?))
}

/// One two-weight measurement on a fixed family.
#[allow(clippy::too_many_arguments)]
fn two_weight_point(
    pr: &ExponentProfile,
    fam: &SparseFamily,
    omega: &Weight,
    sigma: &Weight,
    all: &[Cube],
    lat: &[DyadicLattice],
    opts: &EstimateOptions,
) -> Result<(f64, f64, f64, f64, f64, Vec<f64>)> {
    let d = *omega.domain();
    let a = pr.alpha_measure();
    let (u, v) = dual_weights(pr, omega, sigma)?;
    let uv = two_weight_constant(&u, &v, a - 1.0 / pr.r + 1.0 / pr.s, 1.0 / pr.r - 1.0 / pr.p, 1.0 / pr.q - 1.0 / pr.s, &fam.cubes)?;
    let ua = ainf_constant(&u, all, lat)?;
    let va = ainf_constant(&v, all, lat)?;
    let bound = thm31_bound(pr, uv, ua, va)?;
    let form = LinearSparseForm::power(d, &fam.cubes, a)?;
    let qd = conjugate(pr.q);
    let nf = WeightedNorm { p: pr.p, w: omega };
    let ng = WeightedNorm { p: qd, w: sigma };
    let atoms = weight_atoms(&fam.cubes, omega, pr.p, sigma, qd);
    let est = estimate_best_constant(&form, &nf, &ng, &atoms, opts)?;
    Ok((est.value, uv, ua, va, bound, est.running))
}

/// Sweep of power-weight pairs on one family: `N̂` of
/// `Σ_Q ⟨f⟩_Q ⟨g⟩_Q |Q|^{1+α}` on `L^p(ω) × L^{q′}(σ)` against the two-weight bound.
pub fn run_two_weight_experiment(cfg: &ExperimentConfig) -> Result<TwoWeightSweep> {
    let d = cfg.domain.build()?;
    let pr = cfg.profile.build(d.dim());
    check_linear_form(&pr)?;
    let lat = shifted_lattices(&d);
    let all = all_cubes(&d, &lat);
    let fam = family_for(cfg, &d, &mut rng::stream(cfg.seed, 1 << 32))?;
    let origin = d.origin().to_vec();
    let pairs: Vec<(f64, f64, Weight, Weight)> = if cfg.sweep.is_empty() {
        vec![(f64::NAN, f64::NAN, cfg.omega.build(&d)?, cfg.sigma.build(&d)?)]
    } else {
        cfg.sweep
            .iter()
            .map(|&[a, b]| Ok((a, b, Weight::power(d, &origin, a)?, Weight::power(d, &origin, b)?)))
            .collect::<Result<_>>()?
    };
    let mut rows = Vec::new();
    for (k, (a, b, omega, sigma)) in pairs.into_iter().enumerate() {
        let opts = EstimateOptions { trials: cfg.trials, rounds: cfg.rounds, seed: cfg.seed ^ (k as u64) << 20, atoms: true };
        let (n_hat, uv, ua, va, bound, running) = two_weight_point(&pr, &fam, &omega, &sigma, &all, &lat, &opts)?;
        info!("two-weight a={a} b={b}: N̂={n_hat:.4e} bound={bound:.4e}");
        let report = BoundReport::new(&format!("twoweight[{a},{b}]"), n_hat, bound, running)?;
        rows.push(TwoWeightRow { a, b, uv, u_ainf: ua, v_ainf: va, necessity: n_hat / uv, report });
    }
    let ratios: Vec<f64> = rows.iter().map(|r| r.report.ratio).collect();
    let slack = max_of(ratios.iter().copied());
    let spread = slack / min_of(ratios.iter().copied());
    let necessity_min = min_of(rows.iter().map(|r| r.necessity));
    Ok(TwoWeightSweep { rows, slack, spread, necessity_min, family_size: fam.len() })
}

impl TwoWeightSweep {
    pub fn checks(&self) -> Vec<Check> {
        vec![
            Check::new("necessity", self.necessity_min >= 1.0 - 1e-9, format!("min N̂/[u,v] = {:.4}", self.necessity_min)),
            Check::new(
                "upper",
                self.rows.iter().all(|r| r.report.measured <= self.slack * r.report.theoretical * (1.0 + 1e-12)),
                format!("slack = {:.4}", self.slack),
            ),
            Check::new("ratio_spread", self.spread < 10.0, format!("max/min N̂/bound = {:.4}", self.spread)),
        ]
    }

    pub fn records(&self, seed: u64) -> Vec<Record> {
        let mut out = Vec::new();
        for r in &self.rows {
            let meta = format!("a={},b={}", r.a, r.b);
            for (q, v) in [
                ("n_hat", r.report.measured),
                ("bound", r.report.theoretical),
                ("ratio", r.report.ratio),
                ("uv", r.uv),
                ("u_ainf", r.u_ainf),
                ("v_ainf", r.v_ainf),
                ("necessity", r.necessity),
            ] {
                out.push(Record::new("twoweight", seed, q, v).with_meta(meta.clone()));
            }
        }
        out.push(Record::new("twoweight", seed, "slack", self.slack));
        out.push(Record::new("twoweight", seed, "spread", self.spread));
        out.extend(self.checks().iter().map(|c| c.record("twoweight", seed)));
        out
    }
}

// ---------------------------------------------------------------- testing constants

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TestingRowOut {
    pub zeta: f64,
    pub zeta_star: f64,
    pub n_hat: f64,
    pub ratio: f64,
    pub family_size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TestingStudy {
    pub rows: Vec<TestingRowOut>,
    pub spread: f64,
}

/// `(ζ + ζ*)/N̂` over random sparse families and random power weights.
pub fn run_testing_experiment(cfg: &ExperimentConfig) -> Result<TestingStudy> {
    let d = cfg.domain.build()?;
    let pr = cfg.profile.build(d.dim());
    check_linear_form(&pr)?;
    let a = pr.alpha_measure();
    let qd = conjugate(pr.q);
    let mut rows = Vec::new();
    for k in 0..cfg.instances {
        let mut s = rng::stream(cfg.seed, 2000 + k as u64);
        let fam = random_sparse_family(&d, &mut s, d.depth())?;
        let omega = random_power_weight(&d, &mut s, -0.5, 0.5)?;
        let sigma = random_power_weight(&d, &mut s, -0.25, 0.25)?;
        let (u, v) = dual_weights(&pr, &omega, &sigma)?;
        let t = testing_norms(&fam, &u, &v, &LambdaRule::Power { alpha: a }, pr.p, pr.q, pr.r, pr.s)?;
        let form = LinearSparseForm::power(d, &fam.cubes, a)?;
        let nf = WeightedNorm { p: pr.p, w: &omega };
        let ng = WeightedNorm { p: qd, w: &sigma };
        let atoms = weight_atoms(&fam.cubes, &omega, pr.p, &sigma, qd);
        let opts = EstimateOptions { trials: cfg.trials, rounds: cfg.rounds, seed: s.random(), atoms: true };
        let n_hat = estimate_best_constant(&form, &nf, &ng, &atoms, &opts)?.value;
        let ratio = (t.zeta + t.zeta_star) / n_hat;
        rows.push(TestingRowOut { zeta: t.zeta, zeta_star: t.zeta_star, n_hat, ratio, family_size: fam.len() });
    }
    let spread = max_of(rows.iter().map(|r| r.ratio)) / min_of(rows.iter().map(|r| r.ratio));
    Ok(TestingStudy { rows, spread })
}

impl TestingStudy {
    pub fn checks(&self) -> Vec<Check> {
        vec![Check::new("ratio_spread", self.spread < 20.0, format!("max/min (ζ+ζ*)/N̂ = {:.4}", self.spread))]
    }

    pub fn records(&self, seed: u64) -> Vec<Record> {
        let mut out = Vec::new();
        for (k, r) in self.rows.iter().enumerate() {
            let meta = format!("instance={k},cubes={}", r.family_size);
            for (q, v) in [("zeta", r.zeta), ("zeta_star", r.zeta_star), ("n_hat", r.n_hat), ("ratio", r.ratio)] {
                out.push(Record::new("testing", seed, q, v).with_meta(meta.clone()));
            }
        }
        out.push(Record::new("testing", seed, "spread", self.spread));
        out.extend(self.checks().iter().map(|c| c.record("testing", seed)));
        out
    }
}

// ---------------------------------------------------------------- domination

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DominationRun {
    pub m: u32,
    pub instance: usize,
    pub lhs: f64,
    pub c: f64,
    pub c_union: f64,
    pub c_multi: f64,
    pub cubes: usize,
    pub post_merge_eta: f64,
    pub certified: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DominationSummary {
    pub m: u32,
    pub max: f64,
    pub median: f64,
    pub max_union: f64,
    pub median_union: f64,
    pub max_multi: f64,
    pub median_multi: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DominationStudy {
    pub runs: Vec<DominationRun>,
    pub summary: Vec<DominationSummary>,
}

/// `construct_sparse` on random `(b, f, g)` for every `m` and instance.
pub fn run_domination_experiment(cfg: &ExperimentConfig) -> Result<DominationStudy> {
    let d = cfg.domain.build()?;
    let t = build_operator(cfg, &d)?;
    let pr = cfg.profile.build(d.dim());
    let q0 = d.base_cube();
    let mut runs = Vec::new();
    for &m in &cfg.m_values {
        for k in 0..cfg.instances {
            let mut s = rng::stream(cfg.seed, ((m as u64) << 32) | k as u64);
            let (b, f, g) = (rng::signed(d, &mut s), rng::signed(d, &mut s), rng::signed(d, &mut s));
            let params = DominationParams { m, p0: pr.p0, q0: pr.q0, alpha: pr.alpha };
            let (fam, rep) = construct_sparse(&t, &b, &f, &g, &q0, params)?;
            let certified = verify_sparseness(&fam, &d).ok
                && rep.pre_merge_eta >= 0.5
                && rep.post_merge_eta >= 1.0 / (2.0 * 3f64.powi(d.dim() as i32)) - 1e-12
                && rep.stats.max_packing <= 0.5
                && rep.stats.density_window_holds;
            runs.push(DominationRun {
                m,
                instance: k,
                lhs: rep.lhs,
                c: rep.c,
                c_union: rep.c_union,
                c_multi: rep.c_multi,
                cubes: fam.len(),
                post_merge_eta: rep.post_merge_eta,
                certified,
            });
        }
    }
    let summary = cfg
        .m_values
        .iter()
        .map(|&m| {
            let of = |sel: fn(&DominationRun) -> f64| -> Vec<f64> { runs.iter().filter(|r| r.m == m).map(sel).collect() };
            let (c, cu, cm) = (of(|r| r.c), of(|r| r.c_union), of(|r| r.c_multi));
            DominationSummary {
                m,
                max: max_of(c.iter().copied()),
                median: median(&c),
                max_union: max_of(cu.iter().copied()),
                median_union: median(&cu),
                max_multi: max_of(cm.iter().copied()),
                median_multi: median(&cm),
            }
        })
        .collect();
    Ok(DominationStudy { runs, summary })
}

impl DominationStudy {
    pub fn checks(&self) -> Vec<Check> {
        let mut out = vec![Check::new(
            "certificates",
            self.runs.iter().all(|r| r.certified),
            format!("{}/{} certified", self.runs.iter().filter(|r| r.certified).count(), self.runs.len()),
        )];
        for s in &self.summary {
            let ok = s.max.is_finite() && (s.max == 0.0 || s.max <= 4.0 * s.median);
            out.push(Check::new(&format!("stability_m{}", s.m), ok, format!("max/median C = {:.4}", s.max / s.median)));
        }
        out
    }

    pub fn records(&self, seed: u64) -> Vec<Record> {
        let mut out = Vec::new();
        for r in &self.runs {
            let meta = format!("m={},instance={},cubes={}", r.m, r.instance, r.cubes);
            for (q, v) in [("lhs", r.lhs), ("c", r.c), ("c_union", r.c_union), ("c_multi", r.c_multi), ("eta", r.post_merge_eta)] {
                out.push(Record::new("dominate", seed, q, v).with_meta(meta.clone()));
            }
        }
        for s in &self.summary {
            let meta = format!("m={}", s.m);
            for (q, v) in [
                ("c_max", s.max),
                ("c_median", s.median),
                ("c_union_max", s.max_union),
                ("c_union_median", s.median_union),
                ("c_multi_max", s.max_multi),
                ("c_multi_median", s.median_multi),
            ] {
                out.push(Record::new("dominate", seed, q, v).with_meta(meta.clone()));
            }
        }
        out.extend(self.checks().iter().map(|c| c.record("dominate", seed)));
        out
    }
}

// ---------------------------------------------------------------- Bloom

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BloomRow {
    pub instance: usize,
    pub n_hat: f64,
    pub bmo: f64,
    /// `N̂ / (C₁ ‖b‖^m_{BMO_ν})`; 0 when `b` is constant (both sides vanish).
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BloomStudy {
    pub c1: f64,
    pub c2: f64,
    pub characteristics: BloomCharacteristics,
    pub rows: Vec<BloomRow>,
}

/// `A_p` characteristic, or `None` when the weight is not needed (`p ≤ 1`).
fn ap_opt(w: &Weight, p: f64, cubes: &[Cube]) -> Result<Option<f64>> {
    if p > 1.0 && p.is_finite() {
        Ok(Some(ap_constant(w, p, cubes)?))
    } else {
        Ok(None)
    }
}

/// The `b`-form `Σ_Q ⟨|b−⟨b⟩_Q|^m |f|⟩_Q ⟨|g|⟩_Q |Q|^{1+α/n}` on
/// `L^p(μ^p) × L^{q′}(λ^{−q′})` against `C₁(μ,λ) ‖b‖^m_{BMO_ν}`.
pub fn run_bloom_experiment(cfg: &ExperimentConfig) -> Result<BloomStudy> {
    let d = cfg.domain.build()?;
    let pr = cfg.profile.build(d.dim());
    if pr.p0 != 1.0 || !pr.q0.is_infinite() || pr.m == 0 {
        return param("the Bloom study uses p₀ = 1, q₀ = ∞ (linear averages) and m ≥ 1");
    }
    let lat = shifted_lattices(&d);
    let all = all_cubes(&d, &lat);
    let mu = cfg.omega.build(&d)?;
    let lambda = cfg.sigma.build(&d)?;
    let nu = bloom_weight(&mu, &lambda, pr.m)?;
    let (p, q) = (pr.p, pr.q);
    let lift = lifted(pr.q0, q);
    let lift_p = 1.0 + lift * (p - pr.p0) / (pr.p0 * p);
    let (qd, q0d) = (conjugate(q), conjugate(pr.q0));
    let ch = BloomCharacteristics {
        lambda_lifted: ap_opt(&lambda.pow(lift)?, lift_p, &all)?,
        mu_lifted: ap_opt(&mu.pow(lift)?, lift_p, &all)?,
        mu_p: ap_opt(&mu.pow(p)?, p / pr.p0, &all)?,
        lambda_p: ap_opt(&lambda.pow(p)?, p / pr.p0, &all)?,
        mu_dual: ap_opt(&mu.pow(-qd)?, qd / q0d, &all)?,
        lambda_dual: ap_opt(&lambda.pow(-qd)?, qd / q0d, &all)?,
    };
    let bc = thm41_bloom_constant(&pr, &ch)?;
    let wf = mu.pow(p)?;
    let wg = lambda.pow(-qd)?;
    let nf = WeightedNorm { p, w: &wf };
    let ng = WeightedNorm { p: qd, w: &wg };
    let mut rows = Vec::new();
    for k in 0..cfg.instances {
        let mut s = rng::stream(cfg.seed, 3000 + k as u64);
        let fam = family_for(cfg, &d, &mut s)?;
        let b = rng::signed(d, &mut s);
        let bmo = bmo_nu(&b, &nu, &all)?;
        let form = LinearSparseForm::power(d, &fam.cubes, pr.alpha_measure())?.with_oscillation(b.values(), pr.m);
        let atoms = weight_atoms(&fam.cubes, &wf, p, &wg, qd);
        let opts = EstimateOptions { trials: cfg.trials, rounds: cfg.rounds, seed: s.random(), atoms: true };
        let n_hat = estimate_best_constant(&form, &nf, &ng, &atoms, &opts)?.value;
        let rhs = bc.c1 * bmo.powi(pr.m as i32);
        let ratio = if n_hat == 0.0 && rhs == 0.0 { 0.0 } else { n_hat / rhs };
        rows.push(BloomRow { instance: k, n_hat, bmo, ratio });
    }
    Ok(BloomStudy { c1: bc.c1, c2: bc.c2, characteristics: ch, rows })
}

impl BloomStudy {
    pub fn checks(&self) -> Vec<Check> {
        let ok = self.rows.iter().all(|r| r.ratio.is_finite());
        let hi = max_of(self.rows.iter().map(|r| r.ratio));
        vec![Check::new("finite_ratio", ok, format!("max N̂/(C₁‖b‖^m) = {hi:.4}"))]
    }

    pub fn records(&self, seed: u64) -> Vec<Record> {
        let mut out = vec![Record::new("bloom", seed, "c1", self.c1), Record::new("bloom", seed, "c2", self.c2)];
        for r in &self.rows {
            let meta = format!("instance={}", r.instance);
            for (q, v) in [("n_hat", r.n_hat), ("bmo_nu", r.bmo), ("ratio", r.ratio)] {
                out.push(Record::new("bloom", seed, q, v).with_meta(meta.clone()));
            }
        }
        out.extend(self.checks().iter().map(|c| c.record("bloom", seed)));
        out
    }
}

// ---------------------------------------------------------------- fractional powers

/// `r e^{−1/(1−r²)}` with `r = (x − c)/w`, zero for `|r| ≥ 1`: a smooth bump
/// with zero mean, whose potential decays fast enough that the boundary
/// condition barely affects the middle of the domain.
pub fn odd_bump(d: &GridDomain, center: f64, width: f64) -> GridFunction {
    GridFunction::from_fn(*d, |x| {
        let r = (x[0] - center) / width;
        if r.abs() < 1.0 {
            r * (-1.0 / (1.0 - r * r)).exp()
        } else {
            0.0
        }
    })
}

fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    // symmetric inputs only
    m.clone().symmetric_eigenvalues().iter().fold(0.0f64, |a, v| a.max(v.abs()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FracPowReport {
    pub depth: u32,
    pub nodes: usize,
    /// `‖A_quad − A_spec‖₂ / ‖A_spec‖₂`.
    pub operator_error: f64,
    /// Relative `L²` error against `c_{n,α} I_α` on the middle half.
    pub riesz_error: f64,
    /// `max |P_{1,t} − e^{−tL}|`, `max |P_{2,t} − (I+tL)e^{−tL}|`.
    pub p1_error: f64,
    pub p2_error: f64,
    /// `max_N ‖f − P_{N,t} f − ∫₀^t Q_{N,s} f ds/s‖_∞ / ‖f‖_∞`, `N ≤ 4`.
    pub q_error: f64,
}

/// Quadrature against the spectral oracle, the Riesz identity in the interior
/// and the `P_{N,t}` calculus, for the configured divergence-form generator.
pub fn run_fracpow_experiment(cfg: &ExperimentConfig) -> Result<FracPowReport> {
    let d = cfg.domain.build()?;
    let l = cfg.operator.build_generator(&d)?;
    let s = SpectralData::new(&l)?;
    let (alpha, kappa) = (cfg.profile.alpha, cfg.profile.kappa);
    let rule = QuadratureRule::for_spectrum(&cfg.quadrature, s.lambda_min(), s.lambda_max(), alpha / kappa)?;
    let quad = fractional_power(Generator::Spectral(&s), alpha, kappa, &rule)?;
    let exact = fractional_power_spectral(&s, alpha, kappa)?;
    let operator_error = spectral_norm(&(quad.matrix() - exact.matrix())) / spectral_norm(exact.matrix());

    // interior identity L^{−α/2} = c I_α for the unit-coefficient Laplacian
    let riesz_error = if matches!(
        cfg.operator,
        OperatorSpec::DivergenceForm { coefficient: CoefficientSpec::Constant { value }, .. } if value == 1.0
    ) && kappa == 2.0
        && d.dim() == 1
    {
        let mid = d.origin()[0] + 0.5 * d.side();
        let f = odd_bump(&d, mid, 0.2 * d.side());
        let a = quad.apply(&f);
        let c = riesz_constant(d.dim(), alpha);
        let b = riesz_potential(d, alpha)?.apply(&f);
        let (lo, hi) = (d.origin()[0] + 0.25 * d.side(), d.origin()[0] + 0.75 * d.side());
        let (mut num, mut den) = (0.0, 0.0);
        for i in 0..d.cell_count() {
            let x = d.cell_center(i)[0];
            if (lo..hi).contains(&x) {
                let r = c * b.values()[i];
                num += (a.values()[i] - r).powi(2);
                den += r * r;
            }
        }
        (num / den).sqrt()
    } else {
        f64::NAN
    };

    let t = 1.0 / s.lambda_min().sqrt().max(1.0) * 0.05;
    // reference semigroup by scaling and squaring, independent of the eigenbasis
    let semi = Generator::Matrix(&l).semigroup_matrix(t);
    let p1_error = (pnt_matrix(&s, 1, t)? - &semi).amax();
    let n = d.cell_count();
    let p2_ref = (DMatrix::identity(n, n) + l.matrix() * t) * &semi;
    let p2_error = (pnt_matrix(&s, 2, t)? - p2_ref).amax();
    let f = rng::signed(d, &mut rng::stream(cfg.seed, 77));
    let scale = f.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut q_error = 0.0f64;
    for order in 1..=4 {
        let q = q_integral_apply(&s, order, t, &f, 4000)?;
        let p = crate::operators::pnt_apply(&s, order, t, &f)?;
        for i in 0..n {
            q_error = q_error.max((f.values()[i] - p.values()[i] - q.values()[i]).abs() / scale);
        }
    }
    Ok(FracPowReport { depth: d.depth(), nodes: rule.nodes.len(), operator_error, riesz_error, p1_error, p2_error, q_error })
}

impl FracPowReport {
    pub fn checks(&self) -> Vec<Check> {
        let mut out = vec![Check::new("operator_error", self.operator_error <= 1e-6, format!("{:.3e}", self.operator_error))];
        if self.riesz_error.is_finite() {
            out.push(Check::new("riesz_interior", self.riesz_error <= 0.05, format!("{:.3e}", self.riesz_error)));
        }
        out.push(Check::new(
            "p_identities",
            self.p1_error <= 1e-10 && self.p2_error <= 1e-10,
            format!("P1 {:.3e}, P2 {:.3e}", self.p1_error, self.p2_error),
        ));
        out.push(Check::new("q_integral", self.q_error <= 1e-6, format!("{:.3e}", self.q_error)));
        out
    }

    pub fn records(&self, seed: u64) -> Vec<Record> {
        let meta = format!("depth={},nodes={}", self.depth, self.nodes);
        let mut out: Vec<Record> = [
            ("operator_error", self.operator_error),
            ("p1_error", self.p1_error),
            ("p2_error", self.p2_error),
            ("q_error", self.q_error),
        ]
        .into_iter()
        .map(|(q, v)| Record::new("fracpow", seed, q, v).with_meta(meta.clone()))
        .collect();
        if self.riesz_error.is_finite() {
            out.push(Record::new("fracpow", seed, "riesz_error", self.riesz_error).with_meta(meta));
        }
        out.extend(self.checks().iter().map(|c| c.record("fracpow", seed)));
        out
    }
}

// ---------------------------------------------------------------- weak type

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeakTypeRow {
    pub depth: u32,
    /// `sup_f ‖Tf‖_{L^{p₀(α),∞}} / ‖f‖_{p₀}` for `T = L^{−α/κ}`.
    pub direct: f64,
    /// The same for the truncation `M_{T,q₀}`.
    pub truncation: f64,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeakTypeStudy {
    pub target: f64,
    pub rows: Vec<WeakTypeRow>,
    /// `max/min` over depths, per operator.
    pub growth_direct: f64,
    pub growth_truncation: f64,
    /// Local weak profile `φ̂(λ)` of `T` at the finest depth.
    pub profile: Vec<(f64, f64)>,
}

/// Indicators of the base cubes of every level containing a few fixed points.
fn weak_samples(d: &GridDomain) -> Vec<GridFunction> {
    let mut out = Vec::new();
    for frac in [0.3, 0.5, 0.77] {
        let x: Vec<f64> = (0..d.dim()).map(|i| d.origin()[i] + frac * d.side()).collect();
        let Some(cell) = d.locate(&x) else { continue };
        let cc = d.cell_coords(cell);
        for level in 0..=d.depth() {
            let shift = d.depth() - level;
            let coords = [(cc[0] >> shift) as i64, (cc[1] >> shift) as i64];
            let q = Cube::new(Lattice::Base, level, coords);
            out.push(GridFunction::indicator(*d, q.cells(d).iter()));
        }
    }
    out
}

/// Weak-type quasi-norms of `T` and `M_{T,q₀}` under grid refinement.
pub fn run_weak_type_experiment(cfg: &ExperimentConfig) -> Result<WeakTypeStudy> {
    let pr = cfg.profile.build(cfg.domain.dim);
    let target = weak_target_exponent(pr.p0, pr.alpha, pr.n);
    let mut rows = Vec::new();
    let mut profile = Vec::new();
    for (k, &depth) in cfg.depths.iter().enumerate() {
        let d = cfg.domain.with_depth(depth).build()?;
        let t = build_operator(cfg, &d)?;
        let lat = shifted_lattices(&d);
        let h = d.cell_measure();
        let fs = weak_samples(&d);
        let (mut direct, mut trunc) = (0.0f64, 0.0f64);
        for f in &fs {
            let norm = crate::grid::lp_norm(f.values(), pr.p0, None, h);
            direct = direct.max(weak_quasi_norm(t.apply(f).values(), h, target) / norm);
            trunc = trunc.max(weak_quasi_norm(truncation_ml(&t, f, pr.q0, &lat).values(), h, target) / norm);
        }
        rows.push(WeakTypeRow { depth, direct, truncation: trunc, samples: fs.len() });
        if k + 1 == cfg.depths.len() {
            let cubes: Vec<Cube> = (1..=3).map(|lv| Cube::new(Lattice::Base, lv, [0, 0])).collect();
            let mut s = rng::stream(cfg.seed, 4000);
            let fs: Vec<GridFunction> = (0..4).map(|_| rng::signed(d, &mut s)).collect();
            let wp = weak_bound_profile(&t, pr.p0, pr.alpha, &cfg.lambdas, &cubes, &fs)?;
            profile = wp.lambdas.iter().copied().zip(wp.phi.iter().copied()).collect();
        }
    }
    let growth = |sel: fn(&WeakTypeRow) -> f64| {
        let hi = max_of(rows.iter().map(sel));
        let lo = min_of(rows.iter().map(sel));
        if hi == 0.0 {
            1.0
        } else {
            hi / lo
        }
    };
    Ok(WeakTypeStudy {
        target,
        growth_direct: growth(|r| r.direct),
        growth_truncation: growth(|r| r.truncation),
        rows,
        profile,
    })
}

impl WeakTypeStudy {
    pub fn checks(&self) -> Vec<Check> {
        let finite = self.rows.iter().all(|r| r.direct.is_finite() && r.truncation.is_finite());
        vec![
            Check::new("finite", finite, format!("target exponent {}", self.target)),
            Check::new("growth_direct", self.growth_direct < 2.0, format!("{:.4}", self.growth_direct)),
            Check::new("growth_truncation", self.growth_truncation < 2.0, format!("{:.4}", self.growth_truncation)),
        ]
    }

    pub fn records(&self, seed: u64) -> Vec<Record> {
        let mut out = Vec::new();
        for r in &self.rows {
            let meta = format!("depth={},samples={}", r.depth, r.samples);
            out.push(Record::new("weaktype", seed, "direct", r.direct).with_meta(meta.clone()));
            out.push(Record::new("weaktype", seed, "truncation", r.truncation).with_meta(meta));
        }
        for &(l, phi) in &self.profile {
            out.push(Record::new("weaktype", seed, "phi", phi).with_meta(format!("lambda={l}")));
        }
        out.push(Record::new("weaktype", seed, "growth_direct", self.growth_direct));
        out.push(Record::new("weaktype", seed, "growth_truncation", self.growth_truncation));
        out.extend(self.checks().iter().map(|c| c.record("weaktype", seed)));
        out
    }
}

// ---------------------------------------------------------------- micro-suites

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct MicroSuites {
    pub trials: usize,
    /// Trials where some `c_k > c₀ + c_m`.
    pub midpoint_violations: usize,
    pub midpoint_trials: usize,
    /// `direct / formula` range for the COV norm identity.
    pub cov_min: f64,
    pub cov_max: f64,
    pub cov_trials: usize,
    /// Largest `ratio / slack` in the universal case.
    pub sum_universal_max: f64,
    /// Largest ratio in the `A_∞` case.
    pub sum_ainf_max: f64,
    pub sum_trials: usize,
}

/// Randomized checks of the midpoint inequality, the COV norm formula and
/// the sparse-sum estimates; `trials` are split 2:1:1.
pub fn run_micro_suites(seed: u64, trials: usize) -> Result<MicroSuites> {
    let mid = trials / 2;
    let cov = trials / 4;
    let sum = trials - mid - cov;
    let mut out = MicroSuites { trials, cov_min: f64::INFINITY, cov_max: 0.0, ..MicroSuites::default() };
    let d = GridDomain::unit(1, 6)?;
    let lat = shifted_lattices(&d);

    for k in 0..mid {
        let mut s = rng::stream(seed, 10_000 + k as u64);
        let (b, f, g) = (rng::signed(d, &mut s), rng::signed(d, &mut s), rng::signed(d, &mut s));
        let level = s.random_range(0..4u32);
        let q = Cube::new(Lattice::Base, level, [s.random_range(0..1i64 << level), 0]);
        let m = s.random_range(1..=4u32);
        let (r, t) = ([1.0, 1.5, 2.0][s.random_range(0..3)], [1.0, 2.0, 3.0][s.random_range(0..3)]);
        let c = midpoint_coefficients(&b, &f, &g, &q, m, r, t);
        let cap = c[0] + c[m as usize];
        if c.iter().any(|&ck| ck > cap * (1.0 + 1e-12)) {
            out.midpoint_violations += 1;
        }
        out.midpoint_trials += 1;
    }

    for k in 0..cov {
        let mut s = rng::stream(seed, 20_000 + k as u64);
        let fam = random_sparse_family(&d, &mut s, d.depth())?;
        let omega = random_power_weight(&d, &mut s, -0.6, 0.6)?;
        let lambda: Vec<f64> = fam.cubes.iter().map(|_| s.random_range(0.01..1.0)).collect();
        let p = if k % 2 == 0 { 2.0 } else { 3.0 };
        let ratio = cov_direct_norm(&fam.cubes, &lambda, &omega, p)? / cov_norm_rhs(&fam.cubes, &lambda, &omega, p)?;
        out.cov_min = out.cov_min.min(ratio);
        out.cov_max = out.cov_max.max(ratio);
        out.cov_trials += 1;
    }

    out.sum_universal_max = 0.0;
    out.sum_ainf_max = 0.0;
    for k in 0..sum {
        let mut s = rng::stream(seed, 30_000 + k as u64);
        let fam = random_sparse_family(&d, &mut s, d.depth())?;
        let omega = random_power_weight(&d, &mut s, -0.5, 0.5)?;
        let sigma = random_power_weight(&d, &mut s, -0.5, 0.5)?;
        let r = fam.cubes[s.random_range(0..fam.len())];
        let (alpha, beta, gamma) = if k % 2 == 0 {
            let a = s.random_range(0.05..1.0);
            let bg = s.random_range((1.0 - a)..(2.0 - a));
            let split = s.random::<f64>();
            (a, bg * split, bg * (1.0 - split))
        } else {
            let split = s.random_range(0.0..=1.0);
            (0.0, split, 1.0 - split)
        };
        let res = sparse_sum_bound(&fam, &omega, &sigma, alpha, beta, gamma, &r, &lat)?;
        match res.case {
            SumCase::Universal { slack } => out.sum_universal_max = out.sum_universal_max.max(res.ratio / slack),
            SumCase::Ainf { .. } => out.sum_ainf_max = out.sum_ainf_max.max(res.ratio),
        }
        out.sum_trials += 1;
    }
    Ok(out)
}

impl MicroSuites {
    pub fn checks(&self) -> Vec<Check> {
        vec![
            Check::new(
                "midpoint",
                self.midpoint_violations == 0,
                format!("{} violations in {}", self.midpoint_violations, self.midpoint_trials),
            ),
            Check::new(
                "cov",
                self.cov_trials == 0 || (self.cov_min >= 0.1 && self.cov_max <= 10.0),
                format!("direct/formula in [{:.4}, {:.4}]", self.cov_min, self.cov_max),
            ),
            Check::new(
                "sum_universal",
                self.sum_universal_max <= 1.0 + 1e-12,
                format!("max ratio/slack {:.4}", self.sum_universal_max),
            ),
            Check::new("sum_ainf", self.sum_ainf_max.is_finite(), format!("max ratio {:.4}", self.sum_ainf_max)),
        ]
    }

    pub fn records(&self, seed: u64) -> Vec<Record> {
        let mut out = vec![
            Record::new("micro", seed, "midpoint_violations", self.midpoint_violations as f64),
            Record::new("micro", seed, "sum_universal_max", self.sum_universal_max),
            Record::new("micro", seed, "sum_ainf_max", self.sum_ainf_max),
        ];
        if self.cov_trials > 0 {
            out.push(Record::new("micro", seed, "cov_min", self.cov_min));
            out.push(Record::new("micro", seed, "cov_max", self.cov_max));
        }
        out.extend(self.checks().iter().map(|c| c.record("micro", seed)));
        out
    }
}

// ---------------------------------------------------------------- verify

/// A small deterministic battery touching every experiment at reduced scale.
pub fn run_verify(cfg: &ExperimentConfig) -> Result<(Vec<Record>, Vec<Check>)> {
    let seed = cfg.seed;
    let mut records = Vec::new();
    let mut checks = Vec::new();
    for (dim, depth) in [(1, 4), (2, 3)] {
        let r = verify_three_lattice(&GridDomain::unit(dim, depth)?);
        let bad = r.violations.len();
        records.push(Record::new("verify", seed, "three_lattice_violations", bad as f64).with_meta(format!("dim={dim}")));
        checks.push(Check::new(&format!("three_lattice_{dim}d"), bad == 0, format!("{bad} violations")));
    }
    let mut sub = cfg.clone();
    sub.operator = OperatorSpec::Riesz { alpha: 0.5 };
    sub.profile.alpha = 0.5;
    sub.m_values = vec![0, 1];
    let dom = run_domination_experiment(&sub)?;
    records.extend(dom.records(seed));
    checks.extend(dom.checks().into_iter().filter(|c| c.name == "certificates"));

    let tw = run_two_weight_experiment(cfg)?;
    records.extend(tw.records(seed));
    checks.extend(tw.checks().into_iter().filter(|c| c.name == "necessity"));

    let mut fp = ExperimentConfig::preset(ExperimentKind::FracPow);
    fp.domain = cfg.domain.clone();
    fp.seed = seed;
    let f = run_fracpow_experiment(&fp)?;
    records.extend(f.records(seed));
    checks.extend(f.checks().into_iter().filter(|c| c.name != "riesz_interior"));

    let micro = run_micro_suites(seed, 80)?;
    records.extend(micro.records(seed));
    checks.extend(micro.checks());
    Ok((records, checks))
}

/// Run one experiment and flatten it to records plus checks.
pub fn run_experiment(kind: ExperimentKind, cfg: &ExperimentConfig) -> Result<(Vec<Record>, Vec<Check>)> {
    let seed = cfg.seed;
    info!("running {} (seed {seed})", kind.name());
    Ok(match kind {
        ExperimentKind::Weights => (run_weights_experiment(cfg)?.records(seed), Vec::new()),
        ExperimentKind::Dominate => {
            let r = run_domination_experiment(cfg)?;
            (r.records(seed), r.checks())
        }
        ExperimentKind::TwoWeight => {
            let r = run_two_weight_experiment(cfg)?;
            (r.records(seed), r.checks())
        }
        ExperimentKind::Testing => {
            let r = run_testing_experiment(cfg)?;
            (r.records(seed), r.checks())
        }
        ExperimentKind::Bloom => {
            let r = run_bloom_experiment(cfg)?;
            (r.records(seed), r.checks())
        }
        ExperimentKind::FracPow => {
            let r = run_fracpow_experiment(cfg)?;
            (r.records(seed), r.checks())
        }
        ExperimentKind::WeakType => {
            let r = run_weak_type_experiment(cfg)?;
            (r.records(seed), r.checks())
        }
        ExperimentKind::Verify => run_verify(cfg)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_families_are_half_sparse() {
        for depth in [5, 6] {
            for dim in [1, 2] {
                let d = GridDomain::unit(dim, depth.min(if dim == 2 { 4 } else { 6 })).unwrap();
                for seed in 0..10 {
                    let fam = random_sparse_family(&d, &mut rng::stream(seed, 0), d.depth()).unwrap();
                    let c = verify_sparseness(&fam, &d);
                    assert!(c.ok, "{c:?}");
                }
            }
        }
    }

    #[test]
    fn merge_over_preset() {
        let base = ExperimentConfig::preset(ExperimentKind::WeakType);
        let c = ExperimentConfig::from_json_over(&base, r#"{"depths": [4, 5], "profile": {"p0": 1}}"#).unwrap();
        assert_eq!(c.depths, vec![4, 5]);
        assert_eq!(c.profile.alpha, 0.5);
        assert!(matches!(c.operator, OperatorSpec::DivergenceForm { .. }));
        let c = ExperimentConfig::from_json_over(&base, r#"{"operator": {"kind": "riesz", "alpha": 0.3}}"#).unwrap();
        assert_eq!(c.operator, OperatorSpec::Riesz { alpha: 0.3 });
        assert!(ExperimentConfig::from_json_over(&base, r#"{"profile": {"pp": 1}}"#).is_err());
    }

    #[test]
    fn constant_weights_single_scale() {
        // one cube: N = |Q|^{α−1/p+1/q} = 1 at the endpoint α = 1/p − 1/q, bound = 2
        let cfg = ExperimentConfig::preset(ExperimentKind::TwoWeight);
        let d = GridDomain::unit(1, 5).unwrap();
        let pr = cfg.profile.build(1);
        let lat = shifted_lattices(&d);
        let all = all_cubes(&d, &lat);
        let fam = SparseFamily::new(Lattice::Base, vec![d.base_cube()], 0.5);
        let one = Weight::constant(d, 1.0).unwrap();
        let opts = EstimateOptions { trials: 10, ..Default::default() };
        let (n_hat, uv, _, _, bound, _) = two_weight_point(&pr, &fam, &one, &one, &all, &lat, &opts).unwrap();
        assert!((uv - 1.0).abs() < 1e-12);
        assert!((n_hat - 1.0).abs() < 1e-9, "{n_hat}");
        assert!(n_hat / bound <= 1.0);
        // the tower keeps the necessity direction
        let mut cfg = cfg;
        cfg.domain.depth = 5;
        cfg.sweep = vec![[0.0, 0.0]];
        cfg.trials = 4;
        let r = run_two_weight_experiment(&cfg).unwrap();
        assert!(r.rows[0].necessity >= 1.0 - 1e-12);
    }

    #[test]
    fn zero_operator_weak_type_is_zero() {
        let mut cfg = ExperimentConfig::preset(ExperimentKind::WeakType);
        cfg.operator = OperatorSpec::Zero;
        cfg.depths = vec![4, 5];
        let r = run_weak_type_experiment(&cfg).unwrap();
        assert!(r.rows.iter().all(|r| r.direct == 0.0 && r.truncation == 0.0));
        assert_eq!(r.target, 2.0);
    }

    #[test]
    fn zero_operator_domination() {
        let mut cfg = ExperimentConfig::preset(ExperimentKind::Dominate);
        cfg.operator = OperatorSpec::Zero;
        cfg.domain.depth = 5;
        cfg.instances = 2;
        let r = run_domination_experiment(&cfg).unwrap();
        assert!(r.runs.iter().all(|r| r.c == 0.0 && r.certified));
    }

    #[test]
    fn bloom_constant_b_is_trivial() {
        let mut cfg = ExperimentConfig::preset(ExperimentKind::Bloom);
        cfg.domain.depth = 5;
        cfg.instances = 2;
        cfg.trials = 4;
        let r = run_bloom_experiment(&cfg).unwrap();
        assert!(r.rows.iter().all(|x| x.ratio.is_finite() && x.ratio > 0.0));
        assert!(r.c1 >= 1.0);
    }

    #[test]
    fn micro_suites_small() {
        let m = run_micro_suites(5, 40).unwrap();
        assert!(m.checks().iter().all(|c| c.passed), "{:?}", m.checks());
    }
}
