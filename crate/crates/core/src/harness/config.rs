//! JSON experiment configuration. Unknown keys are rejected; every field has
//! a default, so `{}` is a valid configuration.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::bounds::ExponentProfile;
use crate::error::{param, Error, Result};
use crate::grid::{GridDomain, GridFunction};
use crate::operators::{
    divergence_form, read_matrix_file, riesz_potential, Boundary, OperatorProfile, OperatorRep, QuadratureConfig,
};
use crate::weights::Weight;

/// An exponent in `[0, ∞]`; JSON accepts a number or the string `"inf"`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Exponent(pub f64);

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Exponent;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number or \"inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Exponent, E> {
                Ok(Exponent(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Exponent, E> {
                Ok(Exponent(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Exponent, E> {
                Ok(Exponent(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Exponent, E> {
                match v {
                    "inf" | "infinity" | "∞" => Ok(Exponent(f64::INFINITY)),
                    _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
                }
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DomainSpec {
    pub dim: usize,
    pub depth: u32,
    pub origin: Vec<f64>,
    pub side: f64,
}

impl Default for DomainSpec {
    fn default() -> Self {
        Self { dim: 1, depth: 8, origin: vec![0.0], side: 1.0 }
    }
}

impl DomainSpec {
    pub fn build(&self) -> Result<GridDomain> {
        let origin = if self.origin.len() == self.dim { self.origin.clone() } else { vec![0.0; self.dim] };
        GridDomain::new(self.dim, &origin, self.side, self.depth)
    }

    pub fn with_depth(&self, depth: u32) -> Self {
        Self { depth, ..self.clone() }
    }
}

/// Scalar coefficient `a(·)` of a divergence-form operator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CoefficientSpec {
    Constant { value: f64 },
    /// `low` on the left half of the first axis, `high` on the right half.
    TwoPhase { low: f64, high: f64 },
    /// One value per cell, whitespace separated.
    File { path: PathBuf },
}

impl Default for CoefficientSpec {
    fn default() -> Self {
        Self::Constant { value: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OperatorSpec {
    /// The Riesz potential `I_α`.
    Riesz { alpha: f64 },
    /// The generator `L = −div(a∇·)` itself; experiments take fractional powers of it.
    DivergenceForm {
        #[serde(default)]
        coefficient: CoefficientSpec,
        #[serde(default = "dirichlet")]
        boundary: Boundary,
    },
    /// A matrix file in the `dim rows cols` format.
    MatrixFile {
        path: PathBuf,
        #[serde(default = "one")]
        p0: Exponent,
        #[serde(default = "infinite")]
        q0: Exponent,
        #[serde(default)]
        alpha: f64,
    },
    Zero,
}

fn dirichlet() -> Boundary {
    Boundary::Dirichlet
}

fn one() -> Exponent {
    Exponent(1.0)
}

fn infinite() -> Exponent {
    Exponent(f64::INFINITY)
}

impl Default for OperatorSpec {
    fn default() -> Self {
        Self::Riesz { alpha: 0.5 }
    }
}

fn read_values(path: &Path, domain: &GridDomain) -> Result<GridFunction> {
    let text = std::fs::read_to_string(path)?;
    let values = text
        .split_whitespace()
        .map(|t| t.parse::<f64>().map_err(|_| Error::Parse(format!("{}: bad value {t:?}", path.display()))))
        .collect::<Result<Vec<_>>>()?;
    if values.len() != domain.cell_count() {
        return Err(Error::Parse(format!(
            "{}: {} values for {} cells",
            path.display(),
            values.len(),
            domain.cell_count()
        )));
    }
    GridFunction::new(*domain, values)
}

impl CoefficientSpec {
    pub fn build(&self, domain: &GridDomain) -> Result<GridFunction> {
        let mid = domain.origin()[0] + 0.5 * domain.side();
        match self {
            Self::Constant { value } => Ok(GridFunction::constant(*domain, *value)),
            Self::TwoPhase { low, high } => {
                Ok(GridFunction::from_fn(*domain, |x| if x[0] < mid { *low } else { *high }))
            }
            Self::File { path } => read_values(path, domain),
        }
    }
}

impl OperatorSpec {
    /// The operator for the domination experiment; a divergence-form
    /// generator is turned into `L^{−α/2}` by the caller.
    pub fn build_direct(&self, domain: &GridDomain) -> Result<OperatorRep> {
        match self {
            Self::Riesz { alpha } => riesz_potential(*domain, *alpha),
            Self::MatrixFile { path, p0, q0, alpha } => {
                let profile = OperatorProfile { p0: p0.0, q0: q0.0, alpha: *alpha, ..OperatorProfile::default() };
                read_matrix_file(path, *domain, profile)
            }
            Self::Zero => Ok(OperatorRep::zero(*domain)),
            Self::DivergenceForm { .. } => param("a divergence-form generator has no direct form; take a power"),
        }
    }

    /// The generator `L` (divergence form only).
    pub fn build_generator(&self, domain: &GridDomain) -> Result<OperatorRep> {
        match self {
            Self::DivergenceForm { coefficient, boundary } => {
                divergence_form(*domain, &coefficient.build(domain)?, *boundary, OperatorProfile::default())
            }
            _ => param("expected a divergence_form operator"),
        }
    }
}

/// A weight on the domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightSpec {
    Constant {
        value: f64,
    },
    /// `|x − center|^exponent`, clamped at half a cell.
    Power {
        #[serde(default)]
        center: Vec<f64>,
        exponent: f64,
    },
    File {
        path: PathBuf,
    },
}

impl Default for WeightSpec {
    fn default() -> Self {
        Self::Constant { value: 1.0 }
    }
}

impl WeightSpec {
    pub fn build(&self, domain: &GridDomain) -> Result<Weight> {
        match self {
            Self::Constant { value } => Weight::constant(*domain, *value),
            Self::Power { center, exponent } => {
                let c = if center.len() == domain.dim() { center.clone() } else { domain.origin().to_vec() };
                Weight::power(*domain, &c, *exponent)
            }
            Self::File { path } => Weight::new(read_values(path, domain)?),
        }
    }
}

/// Exponents as they appear in JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProfileSpec {
    pub p0: Exponent,
    pub q0: Exponent,
    pub p: Exponent,
    pub q: Exponent,
    pub r: Exponent,
    pub s: Exponent,
    pub alpha: f64,
    pub kappa: f64,
    pub epsilon: f64,
    pub m: u32,
}

impl Default for ProfileSpec {
    fn default() -> Self {
        Self {
            p0: Exponent(1.0),
            q0: Exponent(f64::INFINITY),
            p: Exponent(2.0),
            q: Exponent(4.0),
            r: Exponent(1.0),
            s: Exponent(f64::INFINITY),
            alpha: 0.25,
            kappa: 2.0,
            epsilon: 1.0,
            m: 1,
        }
    }
}

impl ProfileSpec {
    pub fn build(&self, n: usize) -> ExponentProfile {
        ExponentProfile {
            n,
            p0: self.p0.0,
            q0: self.q0.0,
            p: self.p.0,
            q: self.q.0,
            r: self.r.0,
            s: self.s.0,
            alpha: self.alpha,
            kappa: self.kappa,
            epsilon: self.epsilon,
            m: self.m,
        }
    }
}

/// The cube family used by form-level experiments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    /// Nested dyadic cubes shrinking to the origin.
    Tower,
    /// Random 1/2-sparse families (fresh per instance).
    Random,
    /// A family in the text format.
    File { path: PathBuf },
}

impl Default for FamilySpec {
    fn default() -> Self {
        Self::Tower
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub domain: DomainSpec,
    pub operator: OperatorSpec,
    /// `ω` (two-weight) or `μ` (Bloom).
    pub omega: WeightSpec,
    /// `σ` (two-weight) or `λ` (Bloom).
    pub sigma: WeightSpec,
    /// Power exponents `(a, b)` of `ω = |x|^a`, `σ = |x|^b` for the two-weight sweep.
    pub sweep: Vec<[f64; 2]>,
    pub profile: ProfileSpec,
    pub family: FamilySpec,
    /// Commutator orders for the domination experiment.
    pub m_values: Vec<u32>,
    /// Random instances (seeds) per setting.
    pub instances: usize,
    /// Random trials of the best-constant estimator.
    pub trials: usize,
    /// Alternating-maximization rounds per trial.
    pub rounds: usize,
    pub seed: u64,
    /// `λ` grid of the local weak-type profile.
    pub lambdas: Vec<f64>,
    /// Depths of the refinement study.
    pub depths: Vec<u32>,
    pub quadrature: QuadratureConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let mut sweep = Vec::new();
        for a in [-0.8, -0.4, 0.0, 0.4, 0.8] {
            for b in [-0.3, -0.1, 0.1, 0.25] {
                sweep.push([a, b]);
            }
        }
        Self {
            domain: DomainSpec::default(),
            operator: OperatorSpec::default(),
            omega: WeightSpec::Power { center: vec![0.0], exponent: 0.4 },
            sigma: WeightSpec::Power { center: vec![0.0], exponent: -0.3 },
            sweep,
            profile: ProfileSpec::default(),
            family: FamilySpec::default(),
            m_values: vec![0, 1, 2],
            instances: 20,
            trials: 20,
            rounds: 10,
            seed: 42,
            lambdas: vec![0.5, 0.25, 0.125, 0.0625],
            depths: vec![6, 7, 8],
            quadrature: QuadratureConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Referenced files exist and the domain is valid.
    pub fn validate(&self) -> Result<()> {
        self.domain.build()?;
        let mut files: Vec<&Path> = Vec::new();
        if let OperatorSpec::MatrixFile { path, .. } = &self.operator {
            files.push(path);
        }
        if let OperatorSpec::DivergenceForm { coefficient: CoefficientSpec::File { path }, .. } = &self.operator {
            files.push(path);
        }
        for w in [&self.omega, &self.sigma] {
            if let WeightSpec::File { path } = w {
                files.push(path);
            }
        }
        if let FamilySpec::File { path } = &self.family {
            files.push(path);
        }
        if let Some(p) = files.iter().find(|p| !p.exists()) {
            return param(format!("referenced file {} does not exist", p.display()));
        }
        if self.instances == 0 {
            return param("instances must be positive");
        }
        if self.lambdas.iter().any(|&l| !(l > 0.0 && l <= 1.0)) {
            return param("λ grid must lie in (0, 1]");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_is_default() {
        assert_eq!(ExperimentConfig::from_json("{}").unwrap(), ExperimentConfig::default());
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(ExperimentConfig::from_json(r#"{"seeed": 1}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"domain": {"dim": 1, "deep": 3}}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"operator": {"kind": "riesz", "alpha": 0.5, "x": 1}}"#).is_err());
    }

    #[test]
    fn exponents_accept_inf() {
        let c = ExperimentConfig::from_json(r#"{"profile": {"q0": "inf", "p": 3, "q": 4.5}}"#).unwrap();
        assert!(c.profile.q0.0.is_infinite());
        assert_eq!(c.profile.p.0, 3.0);
        assert_eq!(c.profile.q.0, 4.5);
        assert!(ExperimentConfig::from_json(r#"{"profile": {"q0": "big"}}"#).is_err());
        let back: ExperimentConfig = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn missing_files_and_bad_domains() {
        let e = ExperimentConfig::from_json(r#"{"omega": {"kind": "file", "path": "/nonexistent/w.txt"}}"#);
        assert!(matches!(e, Err(Error::Parameter(_))));
        assert!(ExperimentConfig::from_json(r#"{"domain": {"dim": 3}}"#).is_err());
    }

    #[test]
    fn builders() {
        let d = DomainSpec::default().build().unwrap();
        let w = WeightSpec::Power { center: vec![], exponent: -0.5 }.build(&d).unwrap();
        assert!(w.values()[0] > w.values()[255]);
        let a = CoefficientSpec::TwoPhase { low: 1.0, high: 3.0 }.build(&d).unwrap();
        assert_eq!((a.values()[0], a.values()[255]), (1.0, 3.0));
        let l = OperatorSpec::DivergenceForm { coefficient: CoefficientSpec::default(), boundary: Boundary::Dirichlet };
        assert!(l.build_generator(&d).is_ok());
        assert!(l.build_direct(&d).is_err());
        assert!(OperatorSpec::Zero.build_direct(&d).unwrap().matrix().iter().all(|&v| v == 0.0));
    }
}
