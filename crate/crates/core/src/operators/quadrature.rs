//! Fractional powers `L^{−α/κ} = Γ(α/κ)^{-1} ∫_0^∞ s^{α/κ} e^{−sL} ds/s`.
//!
//! The integral is discretized by the trapezoid rule in `u = ln s` on
//! log-spaced nodes. Two corrections on the first node make the rule accurate
//! at the default node count: the truncated left tail `∫_{-∞}^{u_0} e^{au} du
//! = e^{a u_0}/a` (where `e^{−sλ} ≈ 1`), and the Euler–Maclaurin endpoint term
//! `a Δu²/12`. The right tail is exponentially small by the choice of `s_max`.

use log::warn;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{Generator, OperatorProfile, OperatorRep, SpectralData};
use crate::error::{param, Error, Result};

/// Nodes `s_j` and weights `w_j` with `∫_0^∞ s^a e^{−sλ} ds/s ≈ Σ w_j s_j^a e^{−s_j λ}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub exponent: f64,
}

impl QuadratureRule {
    pub fn log_spaced(count: usize, s_min: f64, s_max: f64, exponent: f64) -> Result<Self> {
        if count < 2 || !(0.0 < s_min && s_min < s_max && s_max.is_finite()) {
            return param(format!("bad quadrature range: {count} nodes on [{s_min}, {s_max}]"));
        }
        if !(exponent > 0.0) {
            return param(format!("quadrature exponent must be positive, got {exponent}"));
        }
        let (u0, u1) = (s_min.ln(), s_max.ln());
        let du = (u1 - u0) / (count - 1) as f64;
        let nodes = (0..count).map(|j| (u0 + j as f64 * du).exp()).collect();
        let mut weights = vec![du; count];
        weights[0] = 0.5 * du + 1.0 / exponent + exponent * du * du / 12.0;
        weights[count - 1] = 0.5 * du;
        Ok(Self { nodes, weights, exponent })
    }

    /// Nodes spanning `[c₁/λ_max, c₂/λ_min]`.
    pub fn for_spectrum(config: &QuadratureConfig, lambda_min: f64, lambda_max: f64, exponent: f64) -> Result<Self> {
        Self::log_spaced(config.nodes, config.c1 / lambda_max, config.c2 / lambda_min, exponent)
    }

    pub fn s_min(&self) -> f64 {
        self.nodes[0]
    }

    pub fn s_max(&self) -> f64 {
        *self.nodes.last().expect("nonempty")
    }

    /// The rule applied to one eigenvalue, divided by `Γ(a)`.
    pub fn scalar(&self, lambda: f64) -> f64 {
        let a = self.exponent;
        let s: f64 = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&s, &w)| w * s.powf(a) * (-s * lambda).exp())
            .sum();
        s / libm::tgamma(a)
    }

    /// Warnings when the right truncation cuts into the integrand of `λ_min`.
    pub fn diagnose(&self, lambda_min: f64) -> Vec<String> {
        let mut out = Vec::new();
        if self.s_max() * lambda_min < 20.0 {
            out.push(format!(
                "quadrature tail: s_max·λ_min = {:.3e} leaves e^(-s λ) ≈ {:.3e} at the cut",
                self.s_max() * lambda_min,
                (-self.s_max() * lambda_min).exp()
            ));
        }
        out
    }
}

/// Node count and range constants for [`QuadratureRule::for_spectrum`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureConfig {
    pub nodes: usize,
    pub c1: f64,
    pub c2: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self { nodes: 200, c1: 1e-6, c2: 50.0 }
    }
}

fn check_order(n: usize, alpha: f64, kappa: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < n as f64 && kappa > 0.0) {
        return param(format!("fractional power needs 0 < α < {n} and κ > 0, got α={alpha}, κ={kappa}"));
    }
    Ok(alpha / kappa)
}

fn check_spectrum(s: &SpectralData) -> Result<()> {
    if !(s.lambda_min() > 1e-12 * s.lambda_max()) {
        return Err(Error::Spectrum(format!("singular operator: λ_min = {}", s.lambda_min())));
    }
    Ok(())
}

/// Quadrature approximation of `L^{−α/κ}`.
pub fn fractional_power(
    generator: Generator<'_>,
    alpha: f64,
    kappa: f64,
    rule: &QuadratureRule,
) -> Result<OperatorRep> {
    let d = *generator.domain();
    let a = check_order(d.dim(), alpha, kappa)?;
    if (rule.exponent - a).abs() > 1e-15 * a {
        return param(format!("rule built for exponent {}, need {a}", rule.exponent));
    }
    let profile = OperatorProfile { alpha, kappa, ..OperatorProfile::default() };
    let matrix = match generator {
        Generator::Spectral(s) => {
            check_spectrum(s)?;
            for w in rule.diagnose(s.lambda_min()) {
                warn!("{w}");
            }
            // Σ_j w_j s_j^a e^{−s_j L} evaluated through the shared eigenbasis
            s.matrix_fn(|l| rule.scalar(l))
        }
        Generator::Matrix(op) => {
            let n = d.cell_count();
            let mut acc = DMatrix::zeros(n, n);
            for (&s, &w) in rule.nodes.iter().zip(&rule.weights) {
                acc += generator.semigroup_matrix(s) * (w * s.powf(a));
            }
            let g = libm::tgamma(a);
            return OperatorRep::from_matrix(d, acc / g, OperatorProfile { alpha, kappa, ..op.profile });
        }
    };
    OperatorRep::from_matrix(d, matrix, profile)
}

/// Spectral oracle `V Λ^{−α/κ} Vᵀ`.
pub fn fractional_power_spectral(s: &SpectralData, alpha: f64, kappa: f64) -> Result<OperatorRep> {
    let a = check_order(s.domain().dim(), alpha, kappa)?;
    check_spectrum(s)?;
    let profile = OperatorProfile { alpha, kappa, ..OperatorProfile::default() };
    OperatorRep::from_matrix(*s.domain(), s.matrix_fn(|l| l.powf(-a)), profile)
}
