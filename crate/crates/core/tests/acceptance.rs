//! Acceptance suite: one PASS/FAIL line per criterion, with timings.
//! Run with `cargo test -p fracsparse --test acceptance`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use fracsparse::bounds::{
    classical_exponents, cor13_bound, cor13_exponent, cor37_bound, cor43_exponent, delta_feasible, floor_split,
    thm12_bound, thm31_bound, thm41_bloom_constant, BloomCharacteristics, ExponentProfile,
};
use fracsparse::grid::{verify_three_lattice, GridDomain};
use fracsparse::harness::experiments::{
    run_domination_experiment, run_fracpow_experiment, run_micro_suites, run_testing_experiment,
    run_two_weight_experiment, run_verify, run_weak_type_experiment, ExperimentKind,
};
use fracsparse::harness::report::to_csv;
use fracsparse::harness::ExperimentConfig;
use fracsparse::operators::riesz_potential;
use fracsparse::rng;
use fracsparse::sparse::{construct_sparse, verify_sparseness, DominationParams};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn run(id: u32, name: &str, limit: Option<Duration>, body: impl FnOnce() -> Result<Outcome, String>) -> bool {
    let start = Instant::now();
    let res = body();
    let took = start.elapsed();
    let (passed, detail) = match res {
        Ok(o) => (o.passed, o.detail),
        Err(e) => (false, format!("error: {e}")),
    };
    let in_time = limit.is_none_or(|l| took <= l);
    let ok = passed && in_time;
    let budget = limit.map(|l| format!(" (limit {:.0?})", l)).unwrap_or_default();
    println!(
        "{} {:>2} {name}: {detail}; {:.2?}{budget}",
        if ok { "PASS" } else { "FAIL" },
        id,
        took
    );
    ok
}

fn e<T: std::fmt::Display>(x: T) -> String {
    x.to_string()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * b.abs().max(1.0)
}

fn three_lattice() -> Result<Outcome, String> {
    let mut total = 0;
    let mut bad = 0;
    for (dim, depth) in [(1, 4), (2, 3)] {
        let r = verify_three_lattice(&GridDomain::unit(dim, depth).map_err(e)?);
        total += r.checked;
        bad += r.violations.len();
    }
    Ok(outcome(bad == 0, format!("{total} cubes checked, {bad} violations")))
}

fn certificates() -> Result<Outcome, String> {
    let d = GridDomain::unit(1, 8).map_err(e)?;
    let t = riesz_potential(d, 0.5).map_err(e)?;
    let q0 = d.base_cube();
    let post = 1.0 / 6.0;
    let mut ok = 0;
    for seed in 0..100u64 {
        let mut s = rng::stream(seed, 0);
        let (b, f, g) = (rng::signed(d, &mut s), rng::signed(d, &mut s), rng::signed(d, &mut s));
        let m = (seed % 3) as u32;
        let params = DominationParams { m, p0: 1.0, q0: f64::INFINITY, alpha: 0.5 };
        let (fam, rep) = construct_sparse(&t, &b, &f, &g, &q0, params).map_err(e)?;
        let pre = verify_sparseness(&rep.pre_merge, &d);
        let merged = verify_sparseness(&fam, &d);
        if pre.ok
            && merged.ok
            && rep.pre_merge_eta >= 0.5
            && rep.post_merge_eta >= post - 1e-12
            && rep.stats.max_packing <= 0.5
            && rep.stats.density_window_holds
        {
            ok += 1;
        }
    }
    Ok(outcome(ok == 100, format!("{ok}/100 runs certified")))
}

fn domination() -> Result<Outcome, String> {
    let cfg = ExperimentConfig::preset(ExperimentKind::Dominate);
    let study = run_domination_experiment(&cfg).map_err(e)?;
    let mut passed = study.runs.iter().all(|r| r.c.is_finite() && r.c > 0.0);
    let mut parts = Vec::new();
    for s in &study.summary {
        let r = s.max / s.median;
        passed &= r <= 4.0;
        parts.push(format!("m={} max/median={r:.3}", s.m));
    }
    Ok(outcome(passed, format!("{} runs, {}", study.runs.len(), parts.join(", "))))
}

fn fracpow() -> Result<Outcome, String> {
    let cfg = ExperimentConfig::preset(ExperimentKind::FracPow);
    let r = run_fracpow_experiment(&cfg).map_err(e)?;
    Ok(outcome(
        r.operator_error <= 1e-6 && r.riesz_error <= 0.05,
        format!("operator error {:.2e} ({} nodes), interior Riesz error {:.2e}", r.operator_error, r.nodes, r.riesz_error),
    ))
}

fn calculus() -> Result<Outcome, String> {
    let mut cfg = ExperimentConfig::preset(ExperimentKind::FracPow);
    cfg.domain.depth = 7;
    let r = run_fracpow_experiment(&cfg).map_err(e)?;
    Ok(outcome(
        r.p1_error <= 1e-10 && r.p2_error <= 1e-10 && r.q_error <= 1e-6,
        format!("P1 {:.2e}, P2 {:.2e}, Q-integral {:.2e}", r.p1_error, r.p2_error, r.q_error),
    ))
}

fn two_weight() -> Result<Outcome, String> {
    let cfg = ExperimentConfig::preset(ExperimentKind::TwoWeight);
    let r = run_two_weight_experiment(&cfg).map_err(e)?;
    let upper = r.rows.iter().all(|x| x.report.measured <= r.slack * x.report.theoretical * (1.0 + 1e-12));
    Ok(outcome(
        r.rows.len() == 20 && r.necessity_min >= 1.0 - 1e-9 && upper && r.spread < 10.0,
        format!(
            "{} pairs, min N̂/[u,v] = {:.3}, slack = {:.3}, N̂/bound spread = {:.3}",
            r.rows.len(),
            r.necessity_min,
            r.slack,
            r.spread
        ),
    ))
}

fn testing() -> Result<Outcome, String> {
    let cfg = ExperimentConfig::preset(ExperimentKind::Testing);
    let r = run_testing_experiment(&cfg).map_err(e)?;
    Ok(outcome(r.rows.len() == 20 && r.spread < 20.0, format!("{} instances, (ζ+ζ*)/N̂ spread = {:.3}", r.rows.len(), r.spread)))
}

fn micro() -> Result<Outcome, String> {
    let m = run_micro_suites(2024, 1000).map_err(e)?;
    let checks = m.checks();
    let passed = checks.iter().all(|c| c.passed);
    let detail = checks.iter().map(|c| format!("{}: {}", c.name, c.detail)).collect::<Vec<_>>().join("; ");
    Ok(outcome(passed && m.trials == 1000, format!("{} trials; {detail}", m.trials)))
}

fn weak_type() -> Result<Outcome, String> {
    let cfg = ExperimentConfig::preset(ExperimentKind::WeakType);
    let r = run_weak_type_experiment(&cfg).map_err(e)?;
    let finite = r.rows.iter().all(|x| x.direct.is_finite() && x.truncation.is_finite() && x.direct > 0.0);
    let vals = r.rows.iter().map(|x| format!("J={}: {:.3}/{:.3}", x.depth, x.direct, x.truncation)).collect::<Vec<_>>();
    Ok(outcome(
        finite && r.target == 2.0 && r.growth_direct < 2.0 && r.growth_truncation < 2.0,
        format!(
            "p₀(α) = {}, growth {:.3} (T) / {:.3} (M_T); {}",
            r.target,
            r.growth_direct,
            r.growth_truncation,
            vals.join(", ")
        ),
    ))
}

fn calculators() -> Result<Outcome, String> {
    let inf = f64::INFINITY;
    let form = |p, q, r, s, alpha| ExponentProfile { p, q, r, s, alpha, ..Default::default() };
    let op = |p0, q0, p: f64, q: f64| ExponentProfile { p0, q0, p, q, alpha: 1.0 / p - 1.0 / q, ..Default::default() };
    let ee = std::f64::consts::E;
    let mut fails = Vec::new();
    let mut n = 0;
    let mut check = |name: &str, ok: bool| {
        n += 1;
        if !ok {
            fails.push(name.to_string());
        }
    };
    let c = classical_exponents(1, 2.0, 2.0, 0.0).map_err(e)?;
    check("buckley p=2", close(c.buckley, 1.0));
    let c = classical_exponents(1, 4.0 / 3.0, 4.0, 0.5).map_err(e)?;
    check("lacey (1,1/2,4/3)", close(c.lacey, 0.5));
    check("bloom sharp m=2", close(c.bloom_sharp(2), 2.5));
    check("thm31 ones", close(thm31_bound(&form(2.0, 4.0, 1.0, inf, 0.25), 1.0, 1.0, 1.0).map_err(e)?, 2.0));
    check("thm31 diagonal", close(thm31_bound(&form(2.0, 2.0, 1.0, inf, 0.3), 1.0, ee, ee).map_err(e)?, 2.0 * ee));
    check("thm31 α=0", close(thm31_bound(&form(2.0, 2.0, 1.0, inf, 0.0), 1.0, ee, ee).map_err(e)?, 2.0 * ee.sqrt()));
    let d = delta_feasible(&form(2.0, 4.0, 1.0, 8.0, 0.3)).map_err(e)?;
    check("δ interval", d.feasible && d.interior && close(d.hi, 4.0 / 3.0));
    let pr = op(1.0, inf, 2.0, 4.0);
    let b = thm12_bound(&pr, 1.0, 1.0, 1.0).map_err(e)?;
    check("thm12 ones", close(b.value, 2.0) && b.u_exponent == -2.0 && b.v_exponent == 4.0);
    check("cor13 exponent", close(cor13_exponent(&pr).map_err(e)?, 3.0));
    check("cor13 ones", close(cor13_bound(&pr, 1.0, 1.0).map_err(e)?, 1.0));
    check("cor43 exponent", close(cor43_exponent(&pr, 1).map_err(e)?, 7.0));
    check("floor split", floor_split(1.0, 2) == (1.5, 0.5) && floor_split(1.0, 0) == (0.0, 0.0));
    let ones = BloomCharacteristics {
        lambda_lifted: Some(1.0),
        mu_lifted: Some(1.0),
        mu_p: Some(1.0),
        lambda_p: Some(1.0),
        mu_dual: Some(1.0),
        lambda_dual: Some(1.0),
    };
    for m in 0..4 {
        let pr = ExponentProfile { m, ..pr };
        check("bloom ones", close(thm41_bloom_constant(&pr, &ones).map_err(e)?.c, 2.0));
    }
    let fh = ExponentProfile { p: 2.0, q: 3.0, alpha: 0.5, ..Default::default() };
    check("cor37 ones", close(cor37_bound(&fh, 1.0, 1.0, 1.0, 1.0).map_err(e)?, 2.0));
    drop(check);
    Ok(outcome(fails.is_empty(), if fails.is_empty() { format!("{n} examples exact") } else { format!("mismatch: {}", fails.join(", ")) }))
}

fn reproducibility() -> Result<Outcome, String> {
    let mut cfg = ExperimentConfig::preset(ExperimentKind::Verify);
    cfg.seed = 42;
    let a = to_csv(&run_verify(&cfg).map_err(e)?.0).map_err(e)?;
    let b = to_csv(&run_verify(&cfg).map_err(e)?.0).map_err(e)?;
    Ok(outcome(a == b, format!("{} bytes, {} rows, identical = {}", a.len(), a.lines().count() - 1, a == b)))
}

fn main() -> ExitCode {
    let s = Duration::from_secs;
    let results = [
        run(1, "three-lattice decomposition", Some(s(1)), three_lattice),
        run(2, "sparseness certificates", Some(s(30)), certificates),
        run(3, "sparse domination stability", None, domination),
        run(4, "fractional-power consistency", Some(s(10)), fracpow),
        run(5, "P_{N,t} calculus", None, calculus),
        run(6, "two-weight sandwich", None, two_weight),
        run(7, "testing characterization", None, testing),
        run(8, "micro-suites", Some(s(60)), micro),
        run(9, "weak type under refinement", None, weak_type),
        run(10, "bound calculators", None, calculators),
        run(11, "reproducibility", None, reproducibility),
    ];
    let passed = results.iter().filter(|&&r| r).count();
    println!("{passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
