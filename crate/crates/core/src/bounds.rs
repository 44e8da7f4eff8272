//! Closed-form weighted bounds used as theoretical right-hand sides.
//!
//! Every calculator returns the bound without the suppressed dimensional
//! constant; callers compare measured constants through ratios.
//!
//! `alpha` in [`ExponentProfile`] is the dimensional fractional order (the
//! form carries `|Q|^{1+α/n}`); calculators that work in measure units use
//! `α/n` internally.

use serde::{Deserialize, Serialize};

use crate::error::{param, Result};
use crate::util::{conjugate, recip};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentProfile {
    pub n: usize,
    pub p0: f64,
    pub q0: f64,
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub s: f64,
    pub alpha: f64,
    pub kappa: f64,
    pub epsilon: f64,
    pub m: u32,
}

impl Default for ExponentProfile {
    fn default() -> Self {
        Self {
            n: 1,
            p0: 1.0,
            q0: f64::INFINITY,
            p: 2.0,
            q: 2.0,
            r: 1.0,
            s: f64::INFINITY,
            alpha: 0.0,
            kappa: 2.0,
            epsilon: 1.0,
            m: 0,
        }
    }
}

impl ExponentProfile {
    /// `α/n`.
    pub fn alpha_measure(&self) -> f64 {
        self.alpha / self.n as f64
    }

    /// The profile of the sparse-form theorem reached from an operator
    /// profile: `r → p₀`, `s → q₀` (`α → α/n` happens inside the calculators).
    pub fn form_profile(&self) -> Self {
        Self { r: self.p0, s: self.q0, ..*self }
    }
}

/// `q₀q/(q₀−q)` with the limit `q` at `q₀ = ∞`.
pub fn lifted(q0: f64, q: f64) -> f64 {
    if q0.is_infinite() {
        q
    } else {
        q0 * q / (q0 - q)
    }
}

/// `(q₀−q)/(q₀q)`, the reciprocal of [`lifted`], with the limit `1/q`.
fn lifted_recip(q0: f64, q: f64) -> f64 {
    if q0.is_infinite() {
        1.0 / q
    } else {
        (q0 - q) / (q0 * q)
    }
}

fn check_chars(named: &[(&str, f64)], floor: f64) -> Result<()> {
    for &(name, v) in named {
        if !(v.is_finite() && v >= floor * (1.0 - 1e-12) && v > 0.0) {
            return param(format!("characteristic {name} = {v} must be finite and ≥ {floor}"));
        }
    }
    Ok(())
}

fn check_form_profile(pr: &ExponentProfile) -> Result<()> {
    let a = pr.alpha_measure();
    let (p, q, r, s) = (pr.p, pr.q, pr.r, pr.s);
    let ok = pr.n >= 1
        && 1.0 <= p
        && p <= q
        && q < s
        && r > 0.0
        && r < p
        && a >= recip(p) - recip(q) - 1e-12
        && a < 1.0 / r - recip(s);
    if !ok {
        return param(format!(
            "need 1 ≤ p ≤ q < s ≤ ∞, 0 < r < p and 1/p−1/q ≤ α/n < 1/r−1/s; got p={p}, q={q}, r={r}, s={s}, α/n={a}"
        ));
    }
    Ok(())
}

fn check_operator_profile(pr: &ExponentProfile) -> Result<()> {
    let (p0, q0, p, q) = (pr.p0, pr.q0, pr.p, pr.q);
    if !(pr.n >= 1 && 1.0 <= p0 && p0 < p && p <= q && q < q0) {
        return param(format!("need 1 ≤ p₀ < p ≤ q < q₀ ≤ ∞, got p₀={p0}, p={p}, q={q}, q₀={q0}"));
    }
    Ok(())
}

/// Two-weight bound for the fractional sparse form:
/// `[u,v]([u]^{1−1/p′²}[v]^{1/p′²} + [u]^{1/p²}[v]^{1−1/p²})` when `p = q`
/// and `α > 0`, else `[u,v]([u]^{1/q} + [v]^{1/p′})`.
pub fn thm31_bound(pr: &ExponentProfile, uv: f64, u_ainf: f64, v_ainf: f64) -> Result<f64> {
    check_form_profile(pr)?;
    check_chars(&[("[u,v]", uv)], 0.0)?;
    check_chars(&[("[u]_A∞", u_ainf), ("[v]_A∞", v_ainf)], 1.0)?;
    let (p, q) = (pr.p, pr.q);
    if p == q && pr.alpha_measure() > 0.0 {
        let e1 = recip(conjugate(p)).powi(2);
        let e2 = recip(p).powi(2);
        Ok(uv * (u_ainf.powf(1.0 - e1) * v_ainf.powf(e1) + u_ainf.powf(e2) * v_ainf.powf(1.0 - e2)))
    } else {
        Ok(uv * (u_ainf.powf(recip(q)) + v_ainf.powf(recip(conjugate(p)))))
    }
}

/// The admissible `δ` of the two-weight proof: `[1, hi]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeltaInterval {
    pub lo: f64,
    pub hi: f64,
    /// `hi ≥ 1`.
    pub feasible: bool,
    /// Some `δ > 1` is admissible (the universal sparse-sum case applies).
    pub interior: bool,
}

/// `[1, min{p/(p−r), (s−1)q/(s−q), α/(α−1/p+1/q), q/(q−1)}]`; inactive
/// constraints (infinite or with non-positive denominator) are dropped.
pub fn delta_feasible(pr: &ExponentProfile) -> Result<DeltaInterval> {
    check_form_profile(pr)?;
    let (p, q, r, s) = (pr.p, pr.q, pr.r, pr.s);
    let a = pr.alpha_measure();
    let mut hi = f64::INFINITY;
    hi = hi.min(p / (p - r));
    hi = hi.min(if s.is_infinite() { q } else { (s - 1.0) * q / (s - q) });
    let gap = a - recip(p) + recip(q);
    if gap > 0.0 {
        hi = hi.min(a / gap);
    }
    if q > 1.0 {
        hi = hi.min(q / (q - 1.0));
    }
    Ok(DeltaInterval { lo: 1.0, hi, feasible: hi >= 1.0 - 1e-12, interior: hi > 1.0 + 1e-12 })
}

/// Two-weight bound for the fractional-power operator, plus the index
/// dictionary `u = μ^{u_exponent}`, `v = λ^{v_exponent}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Thm12Bound {
    pub value: f64,
    /// `p₀p/(p₀−p)`.
    pub u_exponent: f64,
    /// `q₀q/(q₀−q)`.
    pub v_exponent: f64,
}

/// `[u,v]([u]^{1/q} + [v]^{1/p′})` for `p₀ < p < q < q₀`.
pub fn thm12_bound(pr: &ExponentProfile, uv: f64, u_ainf: f64, v_ainf: f64) -> Result<Thm12Bound> {
    check_operator_profile(pr)?;
    if pr.p >= pr.q {
        return param("the operator bound needs p < q");
    }
    check_chars(&[("[u,v]", uv)], 0.0)?;
    check_chars(&[("[u]_A∞", u_ainf), ("[v]_A∞", v_ainf)], 1.0)?;
    let value = uv * (u_ainf.powf(recip(pr.q)) + v_ainf.powf(recip(conjugate(pr.p))));
    Ok(Thm12Bound { value, u_exponent: pr.p0 * pr.p / (pr.p0 - pr.p), v_exponent: lifted(pr.q0, pr.q) })
}

/// Operator-level two-weight bound obtained by feeding `(r, s) = (p₀, q₀)`
/// to [`thm31_bound`].
pub fn cor32_bound(pr: &ExponentProfile, uv: f64, u_ainf: f64, v_ainf: f64) -> Result<f64> {
    check_operator_profile(pr)?;
    thm31_bound(&pr.form_profile(), uv, u_ainf, v_ainf)
}

/// `1 + max{p₀p/(p−p₀)·1/q, q₀q/(q₀−q)·1/p′}`.
pub fn cor13_exponent(pr: &ExponentProfile) -> Result<f64> {
    check_operator_profile(pr)?;
    let (p0, p, q) = (pr.p0, pr.p, pr.q);
    let a = p0 * p / (p - p0) / q;
    let b = lifted(pr.q0, q) * recip(conjugate(p));
    Ok(1.0 + a.max(b))
}

/// `([ω]_{A_{1+1/p₀−1/p}} [ω]_{RH_{q(q₀/q)′}})^{cor13_exponent}`.
pub fn cor13_bound(pr: &ExponentProfile, a_char: f64, rh_char: f64) -> Result<f64> {
    let e = cor13_exponent(pr)?;
    check_chars(&[("[ω]_A", a_char), ("[ω]_RH", rh_char)], 1.0)?;
    Ok((a_char * rh_char).powf(e))
}

/// `max{p₀p, p₀²p/(p−p₀), q₀′q′, q₀′²q′/(q′−q₀′)}`, the per-`m` increment.
pub fn bloom_increment(pr: &ExponentProfile) -> Result<f64> {
    check_operator_profile(pr)?;
    let (p0, p) = (pr.p0, pr.p);
    let (q0d, qd) = (conjugate(pr.q0), conjugate(pr.q));
    Ok([p0 * p, p0 * p0 * p / (p - p0), q0d * qd, q0d * q0d * qd / (qd - q0d)]
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max))
}

pub fn cor43_exponent(pr: &ExponentProfile, m: u32) -> Result<f64> {
    Ok(cor13_exponent(pr)? + bloom_increment(pr)? * m as f64)
}

/// Commutator bound under `ω ∈ A ∩ RH`.
pub fn cor43_bound(pr: &ExponentProfile, a_char: f64, rh_char: f64, m: u32) -> Result<f64> {
    let e = cor43_exponent(pr, m)?;
    check_chars(&[("[ω]_A", a_char), ("[ω]_RH", rh_char)], 1.0)?;
    Ok((a_char * rh_char).powf(e))
}

/// Characteristics consumed by [`thm41_bloom_constant`]; `None` means not
/// measured.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BloomCharacteristics {
    /// `[λ^{q₀q/(q₀−q)}]_{A_{1+q₀q/(q₀−q)·(p−p₀)/(p₀p)}}`.
    pub lambda_lifted: Option<f64>,
    /// `[μ^{q₀q/(q₀−q)}]_{A_{1+…}}`.
    pub mu_lifted: Option<f64>,
    /// `[μ^p]_{A_{p/p₀}}`.
    pub mu_p: Option<f64>,
    /// `[λ^p]_{A_{p/p₀}}`.
    pub lambda_p: Option<f64>,
    /// `[μ^{−q′}]_{A_{q′/q₀′}}`.
    pub mu_dual: Option<f64>,
    /// `[λ^{−q′}]_{A_{q′/q₀′}}`.
    pub lambda_dual: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BloomConstant {
    pub c1: f64,
    pub c2: f64,
    pub c: f64,
}

/// Split of `x·m` into the two floor-function exponents
/// `F = xm − ⌊xm⌋ + ⌊xm⌋²/(2xm) + ⌊xm⌋/(2xm)` and
/// `G = ⌊xm⌋ − ⌊xm⌋²/(2xm) − ⌊xm⌋/(2xm)`, so `F + G = xm`; both vanish at `m = 0`.
pub fn floor_split(x: f64, m: u32) -> (f64, f64) {
    let xm = x * m as f64;
    if xm == 0.0 {
        return (0.0, 0.0);
    }
    let fl = xm.floor();
    let t = fl * fl / (2.0 * xm) + fl / (2.0 * xm);
    (xm - fl + t, fl - t)
}

/// `C₁ + C₂` of the Bloom estimate. A characteristic is required only when
/// its exponent is non-zero.
pub fn thm41_bloom_constant(pr: &ExponentProfile, ch: &BloomCharacteristics) -> Result<BloomConstant> {
    check_operator_profile(pr)?;
    let (p0, p, q, m) = (pr.p0, pr.p, pr.q, pr.m);
    let lead = lifted_recip(pr.q0, q) * cor13_exponent(pr)?;
    let (q0d, qd) = (conjugate(pr.q0), conjugate(q));
    let kp = 1f64.max(p0 / (p - p0));
    let kq = 1f64.max(q0d / (qd - q0d));
    let (fp, gp) = floor_split(p0, m);
    let (fq, gq) = floor_split(q0d, m);
    let term = |name: &str, v: Option<f64>, e: f64| -> Result<f64> {
        if e == 0.0 {
            return Ok(1.0);
        }
        let v = v.ok_or_else(|| crate::Error::Parameter(format!("missing characteristic {name}")))?;
        check_chars(&[(name, v)], 1.0)?;
        Ok(v.powf(e))
    };
    let c1 = term("[λ^lift]", ch.lambda_lifted, lead)?
        * term("[μ^p]", ch.mu_p, kp * fp)?
        * term("[λ^p]", ch.lambda_p, kp * gp)?;
    let c2 = term("[μ^lift]", ch.mu_lifted, lead)?
        * term("[μ^-q′]", ch.mu_dual, kq * fq)?
        * term("[λ^-q′]", ch.lambda_dual, kq * gq)?;
    Ok(BloomConstant { c1, c2, c: c1 + c2 })
}

/// Sharp exponents of the classical one-weight theory.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ClassicalExponents {
    /// `1/(p−1)`.
    pub buckley: f64,
    /// `(1−α/n) max{1, p′/q}`.
    pub lacey: f64,
    factor: f64,
    alpha_measure: f64,
}

impl ClassicalExponents {
    /// `(m+1−α/n) max{1, p′/q}`.
    pub fn bloom_sharp(&self, m: u32) -> f64 {
        (m as f64 + 1.0 - self.alpha_measure) * self.factor
    }
}

pub fn classical_exponents(n: usize, p: f64, q: f64, alpha: f64) -> Result<ClassicalExponents> {
    if !(n >= 1 && p > 1.0 && q >= p && alpha >= 0.0) {
        return param(format!("need n ≥ 1, 1 < p ≤ q, α ≥ 0; got n={n}, p={p}, q={q}, α={alpha}"));
    }
    let a = alpha / n as f64;
    let factor = 1f64.max(conjugate(p) / q);
    Ok(ClassicalExponents { buckley: 1.0 / (p - 1.0), lacey: (1.0 - a) * factor, factor, alpha_measure: a })
}

/// Bound for `A^{r,α}_S(·σ): L^p(σ) → L^q(ω)` divided by nothing: returns
/// `[ω,σ] × (A∞ factor)`. For `r > p` the `r = p` value is used.
pub fn cor37_bound(pr: &ExponentProfile, ws: f64, w_ainf: f64, s_ainf: f64, r: f64) -> Result<f64> {
    let (p, q) = (pr.p, pr.q);
    let a = pr.alpha_measure();
    if !(1.0 < p && p <= q && q.is_finite() && r > 0.0 && a > 0.0 && a <= 1.0) {
        return param(format!("need 1 < p ≤ q < ∞, r > 0, 0 < α/n ≤ 1; got p={p}, q={q}, r={r}, α/n={a}"));
    }
    check_chars(&[("[ω,σ]", ws)], 0.0)?;
    check_chars(&[("[ω]_A∞", w_ainf), ("[σ]_A∞", s_ainf)], 1.0)?;
    let r = r.min(p);
    let factor = if p == q && p > r && a < 1.0 {
        let t = (1.0 - r / p).powi(2);
        let v = (r / p).powi(2);
        w_ainf.powf(t / r) * s_ainf.powf((1.0 - t) / r) + w_ainf.powf((1.0 - v) / r) * s_ainf.powf(v / r)
    } else {
        w_ainf.powf((1.0 / r - 1.0 / p).max(0.0)) + s_ainf.powf(1.0 / q)
    };
    Ok(ws * factor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::E;

    fn form(p: f64, q: f64, r: f64, s: f64, alpha: f64) -> ExponentProfile {
        ExponentProfile { p, q, r, s, alpha, ..Default::default() }
    }

    fn op(p0: f64, q0: f64, p: f64, q: f64) -> ExponentProfile {
        ExponentProfile { p0, q0, p, q, alpha: 1.0 / p - 1.0 / q, ..Default::default() }
    }

    #[test]
    fn thm31_examples() {
        let pr = form(2.0, 4.0, 1.0, f64::INFINITY, 0.25);
        assert_eq!(thm31_bound(&pr, 1.0, 1.0, 1.0).unwrap(), 2.0);
        let diag = form(2.0, 2.0, 1.0, f64::INFINITY, 0.3);
        assert_relative_eq!(thm31_bound(&diag, 1.0, E, E).unwrap(), 2.0 * E, max_relative = 1e-12);
        // p = q with α = 0 falls to the second branch: e^{1/2} + e^{1/2}
        let flat = form(2.0, 2.0, 1.0, f64::INFINITY, 0.0);
        assert_relative_eq!(thm31_bound(&flat, 1.0, E, E).unwrap(), 2.0 * E.sqrt(), max_relative = 1e-12);
        assert!(thm31_bound(&form(2.0, 4.0, 3.0, f64::INFINITY, 0.25), 1.0, 1.0, 1.0).is_err());
        assert!(thm31_bound(&pr, 1.0, 0.5, 1.0).is_err());
    }

    #[test]
    fn delta_examples() {
        let d = delta_feasible(&form(2.0, 2.0, 1.0, f64::INFINITY, 0.3)).unwrap();
        assert!(d.feasible && !d.interior);
        assert_eq!(d.hi, 1.0);
        let d = delta_feasible(&form(2.0, 4.0, 1.0, 8.0, 0.3)).unwrap();
        assert!(d.feasible && d.interior);
        // (s−1)q/(s−q) = 28/4 = 7, p/(p−r) = 2, α/(α−1/4) = 6, q/(q−1) = 4/3
        assert_relative_eq!(d.hi, 4.0 / 3.0, max_relative = 1e-15);
        let near = delta_feasible(&form(2.0, 8.0, 2.0 - 1e-9, f64::INFINITY, 0.5)).unwrap();
        assert_relative_eq!(near.hi, 8.0 / 7.0, max_relative = 1e-12);
    }

    #[test]
    fn thm12_and_dictionary() {
        let pr = op(1.0, f64::INFINITY, 2.0, 4.0);
        let b = thm12_bound(&pr, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(b.value, 2.0);
        assert_eq!(b.u_exponent, -2.0);
        assert_eq!(b.v_exponent, 4.0);
        let finite = op(1.5, 6.0, 2.0, 3.0);
        let b = thm12_bound(&finite, 1.0, 1.0, 1.0).unwrap();
        // μ^{u_exponent} and back again
        let mu = 1.7f64;
        assert_relative_eq!(mu.powf(b.u_exponent).powf(1.0 / b.u_exponent), mu, max_relative = 1e-14);
        assert_eq!(b.v_exponent, 6.0);
        let b = thm12_bound(&finite, 2.0, 1.5, 2.5).unwrap();
        assert_relative_eq!(b.value, cor32_bound(&finite, 2.0, 1.5, 2.5).unwrap(), max_relative = 1e-15);
        assert!(thm12_bound(&op(1.0, f64::INFINITY, 2.0, 2.0), 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn cor13_examples() {
        let pr = op(1.0, f64::INFINITY, 2.0, 4.0);
        assert_eq!(cor13_exponent(&pr).unwrap(), 3.0);
        assert_eq!(cor13_bound(&pr, 1.0, 1.0).unwrap(), 1.0);
        assert!(cor13_bound(&pr, 1.2, 1.0).unwrap() < cor13_bound(&pr, 1.3, 1.0).unwrap());
        assert!(cor13_bound(&pr, 1.2, 1.0).unwrap() < cor13_bound(&pr, 1.2, 1.1).unwrap());
    }

    #[test]
    fn cor43_examples() {
        let pr = op(1.0, f64::INFINITY, 2.0, 4.0);
        // increment max{2, 2, 4/3, 4} = 4
        assert_relative_eq!(cor43_exponent(&pr, 1).unwrap(), 7.0, max_relative = 1e-12);
        assert_eq!(cor43_bound(&pr, 1.3, 1.1, 0).unwrap(), cor13_bound(&pr, 1.3, 1.1).unwrap());
        assert_eq!(cor43_bound(&pr, 1.0, 1.0, 3).unwrap(), 1.0);
    }

    #[test]
    fn bloom_examples() {
        let (f, g) = floor_split(1.0, 2);
        assert_eq!((f, g), (1.5, 0.5));
        assert_eq!(floor_split(1.0, 0), (0.0, 0.0));
        let mut pr = op(1.0, f64::INFINITY, 2.0, 4.0);
        let ones = BloomCharacteristics {
            lambda_lifted: Some(1.0),
            mu_lifted: Some(1.0),
            mu_p: Some(1.0),
            lambda_p: Some(1.0),
            mu_dual: Some(1.0),
            lambda_dual: Some(1.0),
        };
        for m in 0..4 {
            pr.m = m;
            assert_eq!(thm41_bloom_constant(&pr, &ones).unwrap().c, 2.0);
        }
        pr.m = 0;
        let lead_only = BloomCharacteristics { lambda_lifted: Some(E), mu_lifted: Some(E), ..Default::default() };
        let c = thm41_bloom_constant(&pr, &lead_only).unwrap();
        // (1/q)·cor13 exponent = 3/4
        assert_relative_eq!(c.c1, E.powf(0.75), max_relative = 1e-14);
        assert_eq!(c.c1, c.c2);
        pr.m = 2;
        assert!(thm41_bloom_constant(&pr, &lead_only).is_err());
    }

    #[test]
    fn classical_examples() {
        let c = classical_exponents(1, 2.0, 2.0, 0.0).unwrap();
        assert_eq!(c.buckley, 1.0);
        let c = classical_exponents(1, 4.0 / 3.0, 4.0, 0.5).unwrap();
        assert_relative_eq!(c.lacey, 0.5, max_relative = 1e-15);
        assert_eq!(c.bloom_sharp(0), c.lacey);
        assert_relative_eq!(c.bloom_sharp(2), 2.5, max_relative = 1e-15);
    }

    #[test]
    fn cor37_examples() {
        let pr = ExponentProfile { p: 2.0, q: 3.0, alpha: 0.5, ..Default::default() };
        assert_eq!(cor37_bound(&pr, 1.0, 1.0, 1.0, 1.0).unwrap(), 2.0);
        let diag = ExponentProfile { p: 3.0, q: 3.0, alpha: 0.5, ..Default::default() };
        let r: f64 = 1.0;
        let t = (1.0 - r / 3.0).powi(2);
        assert_relative_eq!(t + (1.0 - t), 1.0);
        assert_relative_eq!(cor37_bound(&diag, 1.0, 1.0, 1.0, r).unwrap(), 2.0);
        let want = E.powf(t) * E.powf(1.0 - t) + E.powf(1.0 - 1.0 / 9.0) * E.powf(1.0 / 9.0);
        assert_relative_eq!(cor37_bound(&diag, 1.0, E, E, r).unwrap(), want, max_relative = 1e-14);
        // r > p reduces to r = p
        assert_eq!(cor37_bound(&pr, 1.5, 1.3, 2.0, 5.0).unwrap(), cor37_bound(&pr, 1.5, 1.3, 2.0, 2.0).unwrap());
    }

    fn admissible_form() -> impl Strategy<Value = ExponentProfile> {
        (1.0f64..4.0, 0.0f64..1.0, 0.05f64..0.95, prop::option::of(0.0f64..1.0), 0.0f64..1.0).prop_map(
            |(p, dq, rf, s_frac, af)| {
                let q = p + dq * 3.0;
                let r = rf * p;
                // s ∈ (q, ∞] and α/n ∈ [1/p−1/q, 1/r−1/s)
                let s = s_frac.map_or(f64::INFINITY, |t| q + 0.1 + 10.0 * t);
                let lo = 1.0 / p - 1.0 / q;
                let hi = 1.0 / r - recip(s);
                ExponentProfile { p, q, r, s, alpha: lo + af * 0.99 * (hi - lo), ..Default::default() }
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]

        #[test]
        fn delta_interval_contains_one(pr in admissible_form()) {
            let d = delta_feasible(&pr).unwrap();
            prop_assert!(d.feasible);
            prop_assert!(d.lo == 1.0 && d.hi >= 1.0);
        }

        #[test]
        fn substitution_coherence(p0 in 1.0f64..2.0, dp in 0.1f64..2.0, dq in 0.1f64..2.0, q0 in prop::option::of(0.0f64..5.0),
                                  uv in 0.1f64..5.0, ua in 1.0f64..5.0, va in 1.0f64..5.0) {
            let p = p0 + dp;
            let q = p + dq;
            let q0 = q0.map_or(f64::INFINITY, |t| q + 0.5 + t);
            let pr = op(p0, q0, p, q);
            let a = thm12_bound(&pr, uv, ua, va).unwrap().value;
            let b = thm31_bound(&ExponentProfile { r: p0, s: q0, ..pr }, uv, ua, va).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn calculators_monotone(pr in admissible_form(), x in 1.0f64..4.0, dx in 0.0f64..2.0, m in 0u32..3) {
            let y = x + dx;
            prop_assert!(thm31_bound(&pr, x, x, x).unwrap() <= thm31_bound(&pr, y, y, y).unwrap() * (1.0 + 1e-12));
            prop_assert!(thm31_bound(&pr, 1.0, x, x).unwrap() >= 2.0 - 1e-12);
            let opr = op(1.0, f64::INFINITY, pr.p.max(1.1), pr.q.max(1.1) + 0.5);
            let opr = ExponentProfile { m, ..opr };
            prop_assert!(cor13_bound(&opr, x, x).unwrap() <= cor13_bound(&opr, y, x).unwrap() * (1.0 + 1e-12));
            prop_assert!(cor13_bound(&opr, x, x).unwrap() >= 1.0);
            prop_assert!(cor43_bound(&opr, x, x, m).unwrap() <= cor43_bound(&opr, x, y, m).unwrap() * (1.0 + 1e-12));
            let all = |v: f64| BloomCharacteristics {
                lambda_lifted: Some(v), mu_lifted: Some(v), mu_p: Some(v),
                lambda_p: Some(v), mu_dual: Some(v), lambda_dual: Some(v),
            };
            let cx = thm41_bloom_constant(&opr, &all(x)).unwrap().c;
            prop_assert!(cx >= 2.0 - 1e-12 && cx <= thm41_bloom_constant(&opr, &all(y)).unwrap().c * (1.0 + 1e-12));
            let fh = ExponentProfile { alpha: 0.5, p: opr.p, q: opr.q, ..Default::default() };
            prop_assert!(cor37_bound(&fh, x, x, x, 1.0).unwrap() <= cor37_bound(&fh, y, y, y, 1.0).unwrap() * (1.0 + 1e-12));
        }
    }
}
