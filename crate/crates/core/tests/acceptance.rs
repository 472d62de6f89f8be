//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails. Runtime limits are part of each check.

use std::f64::consts::LN_2;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use parking_ilu::bounds::{lower_bound_constant, mse_bound_bhat, prior_information_quadrature, upper_bound_constant};
use parking_ilu::fidelity::simulation_fidelity;
use parking_ilu::harness::{
    brute_force_threshold, estimator_mse_sweep, fit_log_growth_window, run_experiment, ExperimentConfig,
    ExperimentOutput, Policy, Quantity,
};
use parking_ilu::oracle::constant_gap;
use parking_ilu::{EnvironmentParams, IntensityModel, Oracle, Tolerances};

const SEED: u64 = 42;

struct Outcome {
    passed: bool,
    detail: String,
}

fn env(s: f64, l: f64) -> EnvironmentParams {
    EnvironmentParams::new(s, l).unwrap()
}

fn sinusoid() -> IntensityModel {
    IntensityModel::sinusoidal(1.5, 0.3, 1.0, env(-2.0, 2.0)).unwrap()
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut o = f();
    let took = start.elapsed();
    if took > limit {
        o.passed = false;
    }
    o.detail = format!("{} [{:.2?} of {:.0?}]", o.detail, took, limit);
    o
}

fn c1() -> Outcome {
    let mut worst: f64 = 0.0;
    for rate in [0.9, 1.0, 1.5, 2.0] {
        let o = Oracle::with_defaults(IntensityModel::constant(rate, env(-2.0, 2.5)).unwrap()).unwrap();
        worst = worst.max((o.b_star() + LN_2 / rate).abs());
    }
    Outcome {
        passed: worst <= 1e-8,
        detail: format!("max |b* + ln2/λ| = {worst:.3e} (tol 1e-8)"),
    }
}

fn c2() -> Outcome {
    let mut models: Vec<IntensityModel> = [0.9, 1.0, 1.5, 2.0]
        .iter()
        .map(|&r| IntensityModel::constant(r, env(-2.0, 2.5)).unwrap())
        .collect();
    models.push(sinusoid());
    let mut worst: f64 = 0.0;
    for m in models {
        let o = Oracle::with_defaults(m).unwrap();
        let cost = o.expected_cost(o.b_star()).unwrap();
        worst = worst.max((o.b_star().abs() - cost).abs());
    }
    Outcome {
        passed: worst <= 1e-6,
        detail: format!("max ||b*| − E|τ_b*|| = {worst:.3e} (tol 1e-6)"),
    }
}

fn c3() -> Outcome {
    let mut passed = true;
    let mut parts = Vec::new();
    for (name, m) in [
        ("constant(1.0)", IntensityModel::constant(1.0, env(-2.0, 2.0)).unwrap()),
        ("sinusoidal(1.5,0.3,1.0)", sinusoid()),
    ] {
        let b_star = Oracle::with_defaults(m.clone()).unwrap().b_star();
        let r = brute_force_threshold(&m, 1e-2, 100_000, SEED).unwrap();
        let err = (r.refined - b_star).abs();
        passed &= err <= 2e-2;
        parts.push(format!(
            "{name}: refined {:.4} vs b* {:.4} (|err| {:.4}; grid argmin {:.2})",
            r.refined, b_star, err, r.argmin
        ));
    }
    Outcome {
        passed,
        detail: format!("{} (tol 2e-2)", parts.join("; ")),
    }
}

fn c4() -> Outcome {
    let o = Oracle::with_defaults(IntensityModel::constant(1.0, env(-2.0, 2.0)).unwrap()).unwrap();
    let rows = estimator_mse_sweep(&o, &[10, 100, 1000], 2000, SEED).unwrap();
    let mut passed = true;
    let mut parts = Vec::new();
    for r in &rows {
        let ok = match r.quantity {
            Quantity::LambdaAtStart | Quantity::Tau0Mean => (0.7..=1.3).contains(&r.ratio),
            Quantity::SupError => r.empirical_mse <= r.theory,
            Quantity::Threshold => continue,
        };
        passed &= ok;
        parts.push(format!("n={} {} {:.3}", r.n, r.quantity.name(), r.ratio));
    }
    Outcome {
        passed,
        detail: format!("MSE/theory: {}", parts.join(", ")),
    }
}

fn c5() -> Outcome {
    let o = Oracle::with_defaults(IntensityModel::constant(1.0, env(-2.0, 2.0)).unwrap()).unwrap();
    let coef = mse_bound_bhat(&o).coefficient;
    let rows: Vec<_> = estimator_mse_sweep(&o, &[100, 1000, 10_000], 500, SEED)
        .unwrap()
        .into_iter()
        .filter(|r| r.quantity == Quantity::Threshold)
        .collect();
    let scaled: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r.n as f64 * r.empirical_mse, r.n as f64 * r.standard_error))
        .collect();
    let nonincreasing = scaled
        .windows(2)
        .all(|w| w[1].0 <= w[0].0 + 3.0 * (w[0].1.powi(2) + w[1].1.powi(2)).sqrt());
    let bounded = scaled.iter().all(|s| s.0 <= coef);
    let shown: Vec<_> = rows
        .iter()
        .zip(&scaled)
        .map(|(r, s)| format!("n={} {:.4}±{:.4}", r.n, s.0, s.1))
        .collect();
    Outcome {
        passed: nonincreasing && bounded,
        detail: format!(
            "n·MSE(b̂_n): {} (non-increasing within 3 SE: {nonincreasing}; ≤ coefficient {coef:.1}: {bounded})",
            shown.join(", ")
        ),
    }
}

fn main_experiment(policy: Policy, replications: u64) -> ExperimentOutput {
    run_experiment(&ExperimentConfig {
        model: IntensityModel::constant(1.0, env(-2.0, 2.0)).unwrap(),
        tolerances: Tolerances::default(),
        rounds: 5000,
        replications,
        master_seed: SEED,
        policy,
    })
    .unwrap()
}

fn c6(out: &ExperimentOutput) -> Outcome {
    let c = &out.curve.cumulative;
    let e = env(-2.0, 2.0);
    let bound = upper_bound_constant(&e).regret_bound(5000);
    let a = c[5000] <= bound;
    let fit = fit_log_growth_window(&out.curve, 500, 5000).unwrap();
    let b = fit.r_squared >= 0.98;
    let ratio = c[5000] / c[500];
    let ratio_limit = 1.6 * 5001f64.ln() / 501f64.ln();
    let cc = ratio <= ratio_limit;
    let per_round = c[5000] / 5000.0;
    let per_round_limit = 0.05 * constant_gap(1.0, 0.0);
    let d = per_round <= per_round_limit;

    // Context: the policy that observes [S, τ₀] every round.
    let full = main_experiment(Policy::FullInfo, 100);
    let fc = &full.curve.cumulative;
    let ffit = fit_log_growth_window(&full.curve, 500, 5000).unwrap();
    Outcome {
        passed: a && b && cc && d,
        detail: format!(
            "ILU R(5000)={:.3}±{:.3}: (a) ≤ C_upper·ln5001={bound:.3e} {a}; (b) R²={:.4} ≥ 0.98 {b}; \
             (c) R(5000)/R(500)={ratio:.3} ≤ {ratio_limit:.3} {cc}; (d) R/T={per_round:.5} ≤ {per_round_limit:.5} {d} \
             | full-info context (R=100): R(500)={:.3}, R(5000)={:.3}, R²={:.4}",
            c[5000],
            out.curve.cumulative_se[5000],
            fit.r_squared,
            fc[500],
            fc[5000],
            ffit.r_squared
        ),
    }
}

fn c7(out: &ExperimentOutput) -> Outcome {
    let iq = prior_information_quadrature(0.0, 1.0);
    let lb = lower_bound_constant(&env(-2.0, 2.0)).unwrap();
    let c_prime = 1.0 / (40.0 / (lb.b - lb.a).powi(2) + 1.0 / lb.a);
    let iq_ok = (iq - 40.0).abs() <= 1e-8;
    let cp_ok = (lb.c_prime - c_prime).abs() <= 1e-12 * c_prime;
    let below = (100..=5000).all(|t| lb.minimax_bound(t as u64) <= out.curve.cumulative[t]);
    Outcome {
        passed: iq_ok && cp_ok && below,
        detail: format!(
            "I_q(0,1)={iq:.12} {iq_ok}; C′={:.6e} vs {c_prime:.6e} {cp_ok}; C_lower·lnT ≤ R(T) on [100,5000] {below} (C_lower·ln5000={:.3e}, R(100)={:.3})",
            lb.c_prime,
            lb.minimax_bound(5000),
            out.curve.cumulative[100]
        ),
    }
}

fn c8() -> Outcome {
    let constant = IntensityModel::constant(1.0, env(-2.0, 2.0)).unwrap();
    let k = simulation_fidelity(&constant, 100_000, &[0.5, 1.0, 2.0], SEED).unwrap();
    let s = simulation_fidelity(&sinusoid(), 100_000, &[0.5, 1.0, 2.0], SEED).unwrap();
    let survival_ok = s.survival.iter().all(|r| r.passed()) && k.survival.iter().all(|r| r.passed());
    let counts_ok = k.counts.passed() && s.counts.passed();
    let inc_ok = k.increments.passed() && s.increments.passed();
    Outcome {
        passed: survival_ok && counts_ok && inc_ok,
        detail: format!(
            "constant: count mean {:.4}±{:.4}, var {:.4}±{:.4}, χ² p={:.3}; sinusoid χ² p={:.3}; \
             covariance {:.4}±{:.4} {inc_ok}; survival {survival_ok}",
            k.counts.mean,
            k.counts.mean_se,
            k.counts.variance,
            k.counts.variance_se,
            k.counts.p_value,
            s.counts.p_value,
            k.increments.covariance,
            k.increments.standard_error
        ),
    }
}

fn c9() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_parking-ilu");
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.toml");
    std::fs::write(
        &config,
        "[env]\nS = -2.0\nL = 2.0\n[intensity]\nmodel = \"sinusoidal(1.5, 0.3, 1.0)\"\n\
         [experiment]\nT = 400\nreplications = 40\nseed = 42\n[output]\nrounds = true\n",
    )
    .unwrap();
    let files = ["regret.csv", "diagnostics.csv", "fit.csv", "rounds.csv"];
    let mut runs = Vec::new();
    for (i, jobs) in ["1", "4", "4"].iter().enumerate() {
        let out = dir.path().join(format!("run{i}"));
        let status = Command::new(bin)
            .args(["run", config.to_str().unwrap(), "--jobs", jobs, "--set"])
            .arg(format!("output.directory={}", out.display()))
            .output()
            .unwrap()
            .status;
        if !status.success() {
            return Outcome {
                passed: false,
                detail: format!("run {i} exited with {status}"),
            };
        }
        runs.push(files.map(|f| std::fs::read(out.join(f)).unwrap()));
    }
    let identical = runs.windows(2).all(|w| w[0] == w[1]);
    Outcome {
        passed: identical,
        detail: format!("3 runs (--jobs 1, 4, 4) byte-identical across {}: {identical}", files.join(", ")),
    }
}

fn main() -> ExitCode {
    let mut results = Vec::new();
    let mut report = |n: u32, what: &str, o: Outcome| {
        println!(
            "criterion {n} {}: {what}: {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
        results.push(o.passed);
    };
    let secs = Duration::from_secs;
    report(1, "constant oracle exactness", timed(secs(1), c1));
    report(2, "indifference property", timed(secs(5), c2));
    report(3, "brute-force cross-validation", timed(secs(300), c3));
    report(4, "estimator rates", timed(secs(120), c4));
    report(5, "b̂_n rate and bound", timed(secs(300), c5));
    let start = Instant::now();
    let main = main_experiment(Policy::Ilu, 500);
    let main_time = start.elapsed();
    report(6, "logarithmic regret", timed(secs(600).saturating_sub(main_time), || c6(&main)));
    report(7, "lower-bound constants", timed(secs(1), || c7(&main)));
    report(8, "simulation fidelity", timed(secs(60), c8));
    report(9, "determinism", timed(secs(60), c9));
    let failed = results.iter().filter(|p| !**p).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
