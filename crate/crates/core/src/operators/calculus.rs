//! `Q_{N,t}(L) = (tL)^N e^{−tL}/(N−1)!` and `P_{N,t}(L) = p(tL) e^{−tL}`.
//!
//! `P_{N,t} = ∫_t^∞ Q_{N,s} ds/s`. Substituting `u = sλ` gives
//! `J_N(x)/(N−1)!` with `J_N(x) = ∫_x^∞ u^{N−1} e^{−u} du`, and integrating by
//! parts `J_N(x) = x^{N−1} e^{−x} + (N−1) J_{N−1}(x)`, `J_1(x) = e^{−x}`.

use nalgebra::DMatrix;

use super::SpectralData;
use crate::error::{param, Result};
use crate::grid::GridFunction;
use crate::util::factorial;

/// Coefficients `c_0..c_{N−1}` of `p` in `P_{N,t}(L) = Σ c_k (tL)^k e^{−tL}`.
pub fn p_coefficients(n: u32) -> Result<Vec<f64>> {
    if n == 0 {
        return param("P_{N,t} needs N ≥ 1");
    }
    // polynomial part of J_k, lowest degree first
    let mut poly = vec![1.0];
    for k in 2..=n {
        let mut next: Vec<f64> = poly.iter().map(|c| c * (k - 1) as f64).collect();
        next.push(1.0);
        poly = next;
    }
    let norm = factorial(n - 1);
    Ok(poly.into_iter().map(|c| c / norm).collect())
}

fn q_scalar(n: u32, norm: f64, x: f64) -> f64 {
    x.powi(n as i32) * (-x).exp() / norm
}

fn p_scalar(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c) * (-x).exp()
}

fn check_t(t: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return param(format!("t must be positive, got {t}"));
    }
    Ok(())
}

pub fn qnt_apply(l: &SpectralData, n: u32, t: f64, f: &GridFunction) -> Result<GridFunction> {
    if n == 0 {
        return param("Q_{N,t} needs N ≥ 1");
    }
    check_t(t)?;
    let norm = factorial(n - 1);
    GridFunction::new(*f.domain(), l.apply_fn(|lam| q_scalar(n, norm, t * lam), f.values()))
}

pub fn pnt_apply(l: &SpectralData, n: u32, t: f64, f: &GridFunction) -> Result<GridFunction> {
    check_t(t)?;
    let c = p_coefficients(n)?;
    GridFunction::new(*f.domain(), l.apply_fn(|lam| p_scalar(&c, t * lam), f.values()))
}

pub fn qnt_matrix(l: &SpectralData, n: u32, t: f64) -> Result<DMatrix<f64>> {
    if n == 0 {
        return param("Q_{N,t} needs N ≥ 1");
    }
    check_t(t)?;
    let norm = factorial(n - 1);
    Ok(l.matrix_fn(|lam| q_scalar(n, norm, t * lam)))
}

pub fn pnt_matrix(l: &SpectralData, n: u32, t: f64) -> Result<DMatrix<f64>> {
    check_t(t)?;
    let c = p_coefficients(n)?;
    Ok(l.matrix_fn(|lam| p_scalar(&c, t * lam)))
}

/// `∫₀^t Q_{N,s} ds/s` by composite Simpson in `u = ln s` over
/// `[ln t − 40, ln t]` (the dropped part is below `e^{−40N}` relative), applied
/// through the eigenbasis. `nodes` is rounded up to an even count.
pub fn q_integral_apply(l: &SpectralData, n: u32, t: f64, f: &GridFunction, nodes: usize) -> Result<GridFunction> {
    if n == 0 {
        return param("Q_{N,t} needs N ≥ 1");
    }
    check_t(t)?;
    let norm = factorial(n - 1);
    let k = (nodes.max(2) + 1) / 2 * 2;
    let (hi, lo) = (t.ln(), t.ln() - 40.0);
    let du = (hi - lo) / k as f64;
    let symbol = |lam: f64| {
        (0..=k)
            .map(|j| {
                let w = if j == 0 || j == k { 1.0 } else if j % 2 == 1 { 4.0 } else { 2.0 };
                w * q_scalar(n, norm, (lo + j as f64 * du).exp() * lam)
            })
            .sum::<f64>()
            * du
            / 3.0
    };
    GridFunction::new(*f.domain(), l.apply_fn(symbol, f.values()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridDomain;
    use crate::operators::{divergence_form, semigroup_apply, Boundary, Generator, OperatorProfile};
    use approx::assert_relative_eq;

    #[test]
    fn coefficients_are_taylor() {
        for n in 1..=6 {
            let c = p_coefficients(n).unwrap();
            assert_eq!(c.len(), n as usize);
            for (k, v) in c.iter().enumerate() {
                assert_relative_eq!(*v, 1.0 / factorial(k as u32), epsilon = 1e-15);
            }
        }
        assert!(p_coefficients(0).is_err());
    }

    #[test]
    fn low_order_identities() {
        let d = GridDomain::unit(1, 5).unwrap();
        let l = divergence_form(d, &GridFunction::constant(d, 1.0), Boundary::Dirichlet, OperatorProfile::default())
            .unwrap();
        let s = SpectralData::new(&l).unwrap();
        let f = GridFunction::from_fn(d, |x| (3.0 * x[0]).cos() + x[0]);
        let t = 3e-4;
        let e = semigroup_apply(Generator::Spectral(&s), t, &f).unwrap();
        let p1 = pnt_apply(&s, 1, t, &f).unwrap();
        let p2 = pnt_apply(&s, 2, t, &f).unwrap();
        let le = l.apply(&e);
        for i in 0..f.len() {
            assert!((p1.values()[i] - e.values()[i]).abs() < 1e-12);
            assert!((p2.values()[i] - (e.values()[i] + t * le.values()[i])).abs() < 1e-10);
        }
        assert!(qnt_apply(&s, 0, t, &f).is_err());
        for n in 1..=4 {
            let q = q_integral_apply(&s, n, t, &f, 4000).unwrap();
            let p = pnt_apply(&s, n, t, &f).unwrap();
            for i in 0..f.len() {
                assert!((f.values()[i] - p.values()[i] - q.values()[i]).abs() < 1e-8, "N={n}");
            }
        }
        assert!(pnt_apply(&s, 2, -1.0, &f).is_err());
    }
}
