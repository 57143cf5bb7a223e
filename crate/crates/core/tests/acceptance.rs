//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! Runs with `harness = false` so the report is visible in plain
//! `cargo test` output.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use secure_noma::experiments::{run_sweep, AggregateResult, SweepSpec};
use secure_noma::maxmin::optimal_power_ratio_user1;
use secure_noma::oma::{noma_rate_region_boundary, second_differences};
use secure_noma::power_min::grid_min_power;
use secure_noma::secrecy::{empirical_outage, secrecy_outage_closed_form, secrecy_outage_in_order, stringency};
use secure_noma::{
    solve_maxmin_bisection, solve_maxmin_two_user, solve_min_power, tdma_maxmin, Channel, MinPowerSolution,
    Requirement, SolveOutcome, TdmaMode,
};

type Criterion = (&'static str, fn() -> Verdict);

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

fn sorted_gains(rng: &mut ChaCha8Rng, k: usize, lo: f64, hi: f64) -> Vec<f64> {
    let mut g: Vec<f64> = (0..k).map(|_| log_uniform(rng, lo, hi)).collect();
    g.sort_by(f64::total_cmp);
    g
}

/// Random feasible minimum-power instance with `num_users` users.
fn feasible_min_power(
    rng: &mut ChaCha8Rng,
    num_users: usize,
    max_total: f64,
) -> (Channel, Requirement, MinPowerSolution) {
    loop {
        let ch = Channel::new(sorted_gains(rng, num_users, 1.0, 100.0), rng.gen_range(0.2..3.0)).unwrap();
        let req = Requirement::new(rng.gen_range(0.05..1.5), rng.gen_range(0.05..0.6)).unwrap();
        if let SolveOutcome::Feasible(s) = solve_min_power(&ch, &req).unwrap() {
            if s.total_power <= max_total {
                return (ch, req, s);
            }
        }
    }
}

/// Random two-user instance with `γ1 > φ` and a positive budget.
fn feasible_two_user(rng: &mut ChaCha8Rng, equal: bool) -> (Channel, f64, f64) {
    loop {
        let g1 = log_uniform(rng, 1.0, 500.0);
        let g2 = if equal { g1 } else { g1 * log_uniform(rng, 1.01, 20.0) };
        let eaves = log_uniform(rng, 0.05, 5.0);
        let eps = rng.gen_range(0.02..0.9);
        if g1 > stringency(eaves, eps) * 1.01 {
            let ch = Channel::new(vec![g1, g2], eaves).unwrap();
            return (ch, eps, log_uniform(rng, 0.01, 100.0));
        }
    }
}

fn outage_vs_monte_carlo() -> Verdict {
    const TRIALS: u64 = 1_000_000;
    let start = Instant::now();
    let mut rng = rng(101);
    let (mut worst_z, mut checks) = (0.0f64, 0);
    for i in 0..50 {
        let k = 1 + i % 4;
        let (ch, req, sol) = feasible_min_power(&mut rng, k, f64::INFINITY);
        for user in 0..k {
            let exact = secrecy_outage_closed_form(&ch, &sol.allocation, req.qos_rate(), user).unwrap();
            let mc = empirical_outage(&ch, &sol.allocation, &sol.rate_pairs, user, TRIALS, 7_000 + i as u64).unwrap();
            let sigma = (exact * (1.0 - exact) / TRIALS as f64).sqrt();
            worst_z = worst_z.max((mc - exact).abs() / sigma);
            checks += 1;
        }
    }
    let elapsed = start.elapsed();
    verdict(
        worst_z < 3.0 && elapsed <= Duration::from_secs(60),
        format!("{checks} messages, worst |z| = {worst_z:.2}, {:.1}s", elapsed.as_secs_f64()),
    )
}

fn min_power_optimality() -> Verdict {
    let mut rng = rng(202);
    let (mut worst_gap, mut worst_active) = (f64::INFINITY, 0.0f64);
    for _ in 0..100 {
        let (ch, req, sol) = feasible_min_power(&mut rng, 2, 2.0);
        let (grid, _) = grid_min_power(&ch, &req, 1e-3, 2.0 + 2e-3).unwrap().expect("grid finds a point");
        worst_gap = worst_gap.min(grid - sol.total_power);
        for k in 0..2 {
            let out = secrecy_outage_closed_form(&ch, &sol.allocation, req.qos_rate(), k).unwrap();
            worst_active = worst_active.max((out - req.outage_budget()).abs());
        }
    }
    verdict(
        worst_gap >= -1e-6 && worst_active <= 1e-9,
        format!("min(grid - closed form) = {worst_gap:.3e}, max |outage - eps| = {worst_active:.1e}"),
    )
}

fn bisection_vs_closed_form() -> Verdict {
    let mut rng = rng(303);
    let (mut worst, mut bad_iters) = (0.0f64, 0);
    for _ in 0..200 {
        let (ch, eps, p) = feasible_two_user(&mut rng, false);
        let b = solve_maxmin_bisection(&ch, eps, p, 1e-10).unwrap().feasible().unwrap();
        let c = solve_maxmin_two_user(&ch, eps, p).unwrap().feasible().unwrap();
        worst = worst.max((b.rate - c.rate).abs());
        let expected = ((1.0 + ch.gain(0) * p).log2() / 1e-10).log2().ceil() as usize;
        if b.iterations_used != expected {
            bad_iters += 1;
        }
    }
    verdict(
        worst < 1e-8 && bad_iters == 0,
        format!("max |bisection - closed form| = {worst:.2e}, iteration mismatches = {bad_iters}"),
    )
}

fn worked_instance() -> Verdict {
    let ch = Channel::new(vec![5.0, 10.0], 1.0).unwrap();
    let eps = (-1.0f64).exp();
    let mut errs = Vec::new();
    let mut check = |name: &str, got: f64, want: f64| {
        if (got - want).abs() > 1e-6 {
            errs.push(format!("{name}: {got} vs {want}"));
        }
    };
    let mp = solve_min_power(&ch, &Requirement::new(1.0, eps).unwrap()).unwrap().feasible().unwrap();
    check("P1", mp.allocation.powers()[0], 0.769_736_842_105_263);
    check("P2", mp.allocation.powers()[1], 0.125);
    check("total", mp.total_power, 0.894_736_842_105_263);
    let mm = solve_maxmin_two_user(&ch, eps, 1.0).unwrap().feasible().unwrap();
    let alloc = mm.allocation.unwrap();
    check("R*", mm.rate, 1.033_648_381_480_42);
    check("P1*", alloc.powers()[0], 0.868_323_847_591_149);
    check("P2*", alloc.powers()[1], 0.131_676_152_408_851);
    let bis = solve_maxmin_bisection(&ch, eps, 1.0, 1e-10).unwrap().feasible().unwrap();
    check("R* bisection", bis.rate, 1.033_648_381_480_42);
    check("tdma optimal", tdma_maxmin(&ch, eps, 1.0, TdmaMode::OptimalTime).unwrap().rate, 0.963_829_630_245_430);
    check("tdma equal", tdma_maxmin(&ch, eps, 1.0, TdmaMode::EqualTime).unwrap().rate, 0.792_481_250_360_578);
    let pass = errs.is_empty();
    verdict(pass, if pass { "all 9 values within 1e-6".to_string() } else { errs.join("; ") })
}

fn noma_dominates_tdma() -> Verdict {
    let mut rng = rng(505);
    let (mut violations, mut not_strict, mut worst_equal) = (0, 0, 0.0f64);
    for i in 0..1000 {
        let equal = i % 10 == 0;
        let (ch, eps, p) = feasible_two_user(&mut rng, equal);
        let noma = solve_maxmin_two_user(&ch, eps, p).unwrap().feasible().unwrap().rate;
        let tdma = tdma_maxmin(&ch, eps, p, TdmaMode::OptimalTime).unwrap().rate;
        if equal {
            worst_equal = worst_equal.max((noma - tdma).abs());
        } else if noma < tdma {
            violations += 1;
        } else if noma <= tdma {
            not_strict += 1;
        }
    }
    verdict(
        violations == 0 && not_strict == 0 && worst_equal <= 1e-8,
        format!(
            "violations = {violations}, ties on distinct gains = {not_strict}, max equal-gain gap = {worst_equal:.1e}"
        ),
    )
}

fn weak_user_share_increases() -> Verdict {
    let mut rng = rng(606);
    let mut violations = 0;
    for _ in 0..100 {
        let g1 = log_uniform(&mut rng, 1.0, 100.0);
        let g2 = g1 * log_uniform(&mut rng, 1.1, 10.0);
        let p = log_uniform(&mut rng, 0.1, 10.0);
        let mut prev = f64::NEG_INFINITY;
        for j in 0..1000 {
            let phi = g1 * 0.999 * (j as f64 + 1.0) / 1001.0;
            let beta = optimal_power_ratio_user1(g1, g2, phi, p).unwrap();
            if !(beta > prev) {
                violations += 1;
            }
            prev = beta;
        }
    }
    verdict(violations == 0, format!("100 instances x 1000 stringency values, violations = {violations}"))
}

fn sorting_never_hurts() -> Verdict {
    let mut rng = rng(707);
    let (mut violations, mut swaps) = (0, 0);
    for _ in 0..500 {
        let k = rng.gen_range(2..=5);
        let mut gains: Vec<f64> = (0..k).map(|_| log_uniform(&mut rng, 0.5, 200.0)).collect();
        let powers: Vec<f64> = (0..k).map(|_| log_uniform(&mut rng, 0.01, 10.0)).collect();
        let eaves = log_uniform(&mut rng, 0.05, 5.0);
        let q = rng.gen_range(0.05..2.0);
        let outages = |g: &[f64]| (0..k).map(|m| secrecy_outage_in_order(g, &powers, eaves, q, m)).collect::<Vec<_>>();
        let mut current = outages(&gains);
        let mut sorted = false;
        while !sorted {
            sorted = true;
            for j in 0..k - 1 {
                if gains[j] > gains[j + 1] {
                    gains.swap(j, j + 1);
                    let next = outages(&gains);
                    swaps += 1;
                    if next.iter().zip(&current).any(|(n, c)| *n > *c + 1e-15) {
                        violations += 1;
                    }
                    current = next;
                    sorted = false;
                }
            }
        }
    }
    verdict(violations == 0, format!("{swaps} adjacent swaps, violations = {violations}"))
}

fn rate_region_shape() -> Verdict {
    let mut rng = rng(808);
    let (mut worst_curv, mut worst_end, mut worst_affine) = (f64::NEG_INFINITY, 0.0f64, 0.0f64);
    for i in 0..40 {
        let equal = i % 4 == 0;
        let (ch, eps, p) = feasible_two_user(&mut rng, equal);
        let region = noma_rate_region_boundary(&ch, eps, p, 201).unwrap();
        let r1: Vec<f64> = region.noma.iter().map(|(a, _)| *a).collect();
        let d2 = second_differences(&r1);
        for (n, t) in [(0, 0), (200, 200)] {
            let (a, b) = (region.noma[n], region.tdma[t]);
            worst_end = worst_end.max((a.0 - b.0).abs()).max((a.1 - b.1).abs());
        }
        if equal {
            worst_affine = worst_affine.max(d2.iter().fold(0.0f64, |m, v| m.max(v.abs())));
        } else {
            worst_curv = worst_curv.max(d2.iter().copied().fold(f64::NEG_INFINITY, f64::max));
        }
    }
    verdict(
        worst_curv <= 1e-9 && worst_end <= 1e-10 && worst_affine <= 1e-9,
        format!("max 2nd diff = {worst_curv:.1e}, endpoint gap = {worst_end:.1e}, equal-gain |2nd diff| = {worst_affine:.1e}"),
    )
}

fn config_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn series<'a>(rows: &'a [AggregateResult], scheme: &'a str, metric: &'a str) -> Vec<(f64, f64)> {
    rows.iter().filter(|r| r.scheme == scheme && r.metric == metric).map(|r| (r.x, r.value)).collect()
}

fn strictly_increasing(v: &[(f64, f64)]) -> bool {
    v.windows(2).all(|w| w[1].1 > w[0].1)
}

fn sweep_trends() -> Verdict {
    let start = Instant::now();
    let mut failures = Vec::new();

    // minimum power: monotone in Q, NOMA below TDMA, divergence at the feasibility edge
    let spec = SweepSpec::load(config_path("power_vs_q.spec")).unwrap();
    let rows = run_sweep(&spec).unwrap();
    let noma = series(&rows, "noma", "total_power");
    let tdma = series(&rows, "tdma_equal", "average_power");
    let finite: Vec<_> = noma.iter().copied().filter(|(_, v)| v.is_finite()).collect();
    if finite.len() < 3 || !strictly_increasing(&finite) {
        failures.push("power not increasing in Q".to_string());
    }
    if noma.iter().zip(&tdma).any(|(n, t)| n.1 > t.1) {
        failures.push("NOMA power above TDMA".to_string());
    }
    let ch = Channel::new(vec![25.0, 27.0, 29.0].into_iter().map(secure_noma::db_to_linear).collect(), 100.0).unwrap();
    let feasible = |q: f64| solve_min_power(&ch, &Requirement::new(q, 0.1).unwrap()).unwrap().feasible();
    let (mut lo, mut hi) = (1e-3, 10.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if feasible(mid).is_some() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let near = feasible(lo).map_or(0.0, |s| s.total_power);
    let half = feasible(lo / 2.0).map_or(f64::INFINITY, |s| s.total_power);
    if !(near > 1e6 * half) {
        failures.push(format!("no divergence at Q = {lo:.6}: {near:.3e} vs {half:.3e}"));
    }

    // weak-user share: decreasing in eps, larger for a stronger eavesdropper
    let mut spec = SweepSpec::load(config_path("beta_vs_eps.spec")).unwrap();
    let strong = series(&run_sweep(&spec).unwrap(), "noma", "beta1");
    spec.fixed_params.insert("eaves_db".into(), vec![17.0]);
    let weak = series(&run_sweep(&spec).unwrap(), "noma", "beta1");
    if !strong.windows(2).all(|w| w[1].1 < w[0].1) {
        failures.push("beta not decreasing in eps".to_string());
    }
    if strong.iter().zip(&weak).any(|(s, w)| !(s.1 > w.1)) {
        failures.push("beta not increasing in eavesdropper gain".to_string());
    }

    // fading: average rate increasing in eps, NOMA above both TDMA variants
    let spec = SweepSpec::load(config_path("avg_rate_vs_eps.spec")).unwrap();
    let rows = run_sweep(&spec).unwrap();
    let noma = series(&rows, "noma", "avg_min_rate");
    if !strictly_increasing(&noma) {
        failures.push("average rate not increasing in eps".to_string());
    }
    for scheme in ["tdma_optimal", "tdma_equal"] {
        if noma.iter().zip(series(&rows, scheme, "avg_min_rate")).any(|(n, t)| n.1 < t.1) {
            failures.push(format!("NOMA below {scheme}"));
        }
    }

    // gain over TDMA: above one and nondecreasing in K
    let spec = SweepSpec::load(config_path("gain_vs_k.spec")).unwrap();
    let rows = run_sweep(&spec).unwrap();
    let mut summary = Vec::new();
    for scheme in ["noma_over_tdma_equal", "noma_over_tdma_optimal"] {
        let ratio = series(&rows, scheme, "ratio");
        if ratio.len() != 5 || ratio.iter().any(|(_, v)| !(*v > 1.0)) || ratio.windows(2).any(|w| w[1].1 < w[0].1) {
            failures.push(format!("{scheme} not > 1 and nondecreasing"));
        }
        summary.push(format!("{scheme} {:.3}..{:.3}", ratio[0].1, ratio[ratio.len() - 1].1));
    }

    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(300) {
        failures.push("over time budget".to_string());
    }
    let pass = failures.is_empty();
    let detail =
        if pass { format!("{}, {:.1}s", summary.join(", "), elapsed.as_secs_f64()) } else { failures.join("; ") };
    verdict(pass, detail)
}

fn sweep_is_deterministic() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let config = config_path("gain_vs_k.spec");
    let run = |name: &str, threads: &str| {
        let out = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_secure-noma"))
            .args(["sweep", "--config"])
            .arg(&config)
            .arg("--output")
            .arg(&out)
            .env("RAYON_NUM_THREADS", threads)
            .output()
            .unwrap();
        assert!(status.status.success(), "sweep failed: {}", String::from_utf8_lossy(&status.stderr));
        std::fs::read(out).unwrap()
    };
    let a = run("a.csv", "1");
    let b = run("b.csv", "1");
    let c = run("c.csv", "4");
    verdict(
        !a.is_empty() && a == b && a == c,
        format!("{} bytes, repeat identical = {}, 1 vs 4 threads identical = {}", a.len(), a == b, a == c),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("closed-form outage matches Monte Carlo", outage_vs_monte_carlo),
        ("minimum-power closed form is optimal", min_power_optimality),
        ("bisection matches two-user closed form", bisection_vs_closed_form),
        ("worked instance regression", worked_instance),
        ("NOMA max-min dominates TDMA", noma_dominates_tdma),
        ("weak-user share increases with stringency", weak_user_share_increases),
        ("sorting decoding order never hurts", sorting_never_hurts),
        ("rate-region boundary shape", rate_region_shape),
        ("sweep trends", sweep_trends),
        ("sweep output is deterministic", sweep_is_deterministic),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let v = check();
        println!("criterion {:>2} {}: {} ({})", i + 1, if v.pass { "PASS" } else { "FAIL" }, name, v.detail);
        failed += usize::from(!v.pass);
    }
    println!("acceptance: {} passed, {} failed", criteria.len() - failed, failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
