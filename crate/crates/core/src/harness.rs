//! Multi-replication experiments: regret curves, estimator error sweeps,
//! the brute-force threshold search, and diagnostics against the bounds.
//!
//! Every random draw comes from an [`RngStream`] keyed by
//! `(seed, replication, round, domain)`; per-replication results are
//! collected in index order and reduced sequentially, so outputs do not
//! depend on the number of worker threads.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::bounds::{mse_bound_bhat, var_tau0};
use crate::error::{Error, Result};
use crate::ilu::{FullInfoRecord, IluState, RecordSet};
use crate::intensity::{EnvironmentParams, IntensityModel};
use crate::oracle::{cutoff_clamp, Oracle, Tolerances};
use crate::simulate::{sample_path, RngStream};

/// Stream domains, so one seed drives unrelated experiments independently.
pub mod domain {
    pub const EXPERIMENT: u64 = 0;
    pub const MSE_SWEEP: u64 = 1;
    pub const BRUTE_FORCE: u64 = 2;
    pub const SIMULATE: u64 = 3;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Policy {
    /// Indifference level updating.
    Ilu,
    /// Threshold from every previous round's full observation of `[S, τ₀]`.
    FullInfo,
    /// The same threshold every round.
    Fixed(f64),
    /// ILU with thresholds clamped at `−ln(2)/L`; proposes `0` until a
    /// full-information round has been seen.
    CutoffIlu,
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Policy::Ilu => write!(f, "ilu"),
            Policy::FullInfo => write!(f, "full_info"),
            Policy::Fixed(b) => write!(f, "fixed({b})"),
            Policy::CutoffIlu => write!(f, "cutoff_ilu"),
        }
    }
}

impl FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        match t.as_str() {
            "ilu" => return Ok(Policy::Ilu),
            "full_info" => return Ok(Policy::FullInfo),
            "cutoff_ilu" => return Ok(Policy::CutoffIlu),
            _ => {}
        }
        if let Some(arg) = t.strip_prefix("fixed(").and_then(|r| r.strip_suffix(')')) {
            let b = arg
                .trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("policy `{s}`: bad threshold")))?;
            return Ok(Policy::Fixed(b));
        }
        Err(Error::Config(format!(
            "unknown policy `{s}` (expected ilu, full_info, fixed(b), cutoff_ilu)"
        )))
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub model: IntensityModel,
    pub tolerances: Tolerances,
    /// Horizon `T`; rounds `0..=T` are played.
    pub rounds: u64,
    pub replications: u64,
    pub master_seed: u64,
    pub policy: Policy,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.rounds < 1 {
            return Err(Error::invalid("T", "must be at least 1"));
        }
        if self.replications < 1 {
            return Err(Error::invalid("replications", "must be at least 1"));
        }
        if let Policy::Fixed(b) = self.policy {
            let s = self.model.env().street_start();
            if !(s..=0.0).contains(&b) {
                return Err(Error::invalid("policy", format!("fixed threshold {b} outside [S, 0]")));
            }
        }
        self.tolerances.check()
    }
}

/// One round of one replication.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundRecord {
    pub threshold: f64,
    pub stop: f64,
    pub full_info: bool,
    /// `|I|` after this round.
    pub records_count: u64,
    pub gap: f64,
}

/// Per-round means over replications of `Δ(π_n)`, with their prefix sums.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretCurve {
    pub per_round_gap: Vec<f64>,
    pub standard_error: Vec<f64>,
    /// `R(T') = Σ_{n≤T'} mean gap`.
    pub cumulative: Vec<f64>,
    /// Standard error of the per-replication cumulative sums.
    pub cumulative_se: Vec<f64>,
}

impl RegretCurve {
    pub fn horizon(&self) -> u64 {
        self.cumulative.len() as u64 - 1
    }

    /// Builds the curve from per-replication gap sequences of equal length.
    pub fn from_gaps(gaps: &[Vec<f64>]) -> Self {
        let reps = gaps.len();
        let len = gaps.first().map_or(0, Vec::len);
        let mut per_round_gap = vec![0.0; len];
        let mut standard_error = vec![0.0; len];
        let mut cumulative = vec![0.0; len];
        let mut cumulative_se = vec![0.0; len];
        let mut running = vec![0.0; reps];
        let mut total = 0.0;
        for n in 0..len {
            for (r, g) in gaps.iter().enumerate() {
                running[r] += g[n];
            }
            let (m, se) = mean_se(gaps.iter().map(|g| g[n]));
            per_round_gap[n] = m;
            standard_error[n] = se;
            total += m;
            cumulative[n] = total;
            cumulative_se[n] = mean_se(running.iter().copied()).1;
        }
        Self {
            per_round_gap,
            standard_error,
            cumulative,
            cumulative_se,
        }
    }
}

/// Sample mean and its standard error, summed in iteration order.
pub fn mean_se(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let (n, sum) = values.clone().fold((0usize, 0.0), |(n, s), v| (n + 1, s + v));
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = sum / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let ss: f64 = values.map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1) as f64 / n as f64).sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct FullInfoDiagnostics {
    /// Mean `|I_n|` (full-information rounds among rounds `0..n`) for `n = 0..=T+1`.
    pub mean_records: Vec<f64>,
    /// Fraction of replications with full information in round `n`.
    pub full_info_fraction: Vec<f64>,
    /// Pooled gaps `σ(j+1) − σ(j)` between consecutive full-information rounds.
    pub waiting_times: Vec<u64>,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub curve: RegretCurve,
    pub diagnostics: FullInfoDiagnostics,
    pub traces: Vec<Vec<RoundRecord>>,
    pub oracle: Oracle,
}

fn stream(seed: u64, replication: u64, round: u64) -> RngStream {
    RngStream::new(seed, replication, round).with_domain(domain::EXPERIMENT)
}

fn run_replication(cfg: &ExperimentConfig, oracle: &Oracle, replication: u64) -> Result<Vec<RoundRecord>> {
    let model = &cfg.model;
    let env = *model.env();
    let mut out = Vec::with_capacity(cfg.rounds as usize + 1);
    match cfg.policy {
        Policy::FullInfo => {
            let mut set = RecordSet::new();
            for n in 0..=cfg.rounds {
                let threshold = if set.is_empty() {
                    0.0
                } else {
                    set.solve_threshold(env.street_start())?
                };
                let obs = sample_path(model, 0.0, &stream(cfg.master_seed, replication, n))?;
                let stop = obs
                    .stop_for(threshold)
                    .ok_or_else(|| Error::Numerical("full observation misses the stop".into()))?;
                set.push(FullInfoRecord::from_observation(&obs).expect("stop after 0"));
                out.push(RoundRecord {
                    threshold,
                    stop,
                    full_info: true,
                    records_count: set.len() as u64,
                    gap: oracle.gap(threshold)?,
                });
            }
        }
        policy => {
            let mut state = IluState::new(env.street_start());
            for n in 0..=cfg.rounds {
                let threshold = match policy {
                    Policy::Ilu => state.next_threshold()?,
                    Policy::CutoffIlu => {
                        let proposal = if state.records().is_empty() {
                            0.0
                        } else {
                            state.solve_threshold()?
                        };
                        cutoff_clamp(proposal, env.class_bound())
                    }
                    Policy::Fixed(b) => b,
                    Policy::FullInfo => unreachable!(),
                };
                let step = state.play(model, threshold, &stream(cfg.master_seed, replication, n))?;
                out.push(RoundRecord {
                    threshold,
                    stop: step.observation.stop_position,
                    full_info: step.full_information,
                    records_count: state.records().len() as u64,
                    gap: oracle.gap(threshold)?,
                });
            }
        }
    }
    Ok(out)
}

fn diagnostics(traces: &[Vec<RoundRecord>]) -> FullInfoDiagnostics {
    let reps = traces.len() as f64;
    let len = traces.first().map_or(0, Vec::len);
    let mut mean_records = vec![0.0; len + 1];
    let mut full_info_fraction = vec![0.0; len];
    for n in 0..len {
        let (mut count, mut full) = (0.0, 0.0);
        for t in traces {
            count += t[n].records_count as f64;
            full += f64::from(u8::from(t[n].full_info));
        }
        mean_records[n + 1] = count / reps;
        full_info_fraction[n] = full / reps;
    }
    let mut waiting_times = Vec::new();
    for t in traces {
        let mut last: Option<usize> = None;
        for (n, r) in t.iter().enumerate() {
            if r.full_info {
                if let Some(prev) = last {
                    waiting_times.push((n - prev) as u64);
                }
                last = Some(n);
            }
        }
    }
    FullInfoDiagnostics {
        mean_records,
        full_info_fraction,
        waiting_times,
    }
}

/// Runs `replications` independent learners for rounds `0..=T`, scoring each
/// chosen threshold by the exact optimality gap.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let oracle = Oracle::new(cfg.model.clone(), cfg.tolerances)?;
    let traces = (0..cfg.replications)
        .into_par_iter()
        .map(|r| run_replication(cfg, &oracle, r))
        .collect::<Result<Vec<_>>>()?;
    let gaps: Vec<Vec<f64>> = traces.iter().map(|t| t.iter().map(|r| r.gap).collect()).collect();
    Ok(ExperimentOutput {
        curve: RegretCurve::from_gaps(&gaps),
        diagnostics: diagnostics(&traces),
        traces,
        oracle,
    })
}

/// Least-squares fit `cumulative(T') ≈ intercept + slope·ln(T'+1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogFit {
    pub intercept: f64,
    pub slope: f64,
    pub r_squared: f64,
    pub window_start: u64,
    pub window_end: u64,
    /// Slope on the upper half of the window (in log scale) over the lower half.
    pub slope_ratio: f64,
    /// `r_squared ≥ 0.98` and `slope_ratio ≤ 1.5`.
    pub logarithmic: bool,
}

fn least_squares(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let sse: f64 = points.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let r2 = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    (intercept, slope, r2)
}

/// Fits over `T' ∈ [T/10, T]`.
pub fn fit_log_growth(curve: &RegretCurve) -> Result<LogFit> {
    let t = curve.horizon();
    if t < 100 {
        return Err(Error::InsufficientSamples {
            have: t as usize,
            need: 100,
        });
    }
    fit_log_growth_window(curve, t / 10, t)
}

pub fn fit_log_growth_window(curve: &RegretCurve, start: u64, end: u64) -> Result<LogFit> {
    if end > curve.horizon() || end < start + 2 {
        return Err(Error::invalid("window", format!("[{start}, {end}] not inside the curve")));
    }
    let point = |n: u64| (((n + 1) as f64).ln(), curve.cumulative[n as usize]);
    let points: Vec<_> = (start..=end).map(point).collect();
    let (intercept, slope, r_squared) = least_squares(&points);
    let mid_x = 0.5 * (points[0].0 + points[points.len() - 1].0);
    let (lower, upper): (Vec<_>, Vec<_>) = points.iter().partition(|p| p.0 <= mid_x);
    let slope_ratio = if lower.len() >= 2 && upper.len() >= 2 {
        let lo = least_squares(&lower).1;
        let hi = least_squares(&upper).1;
        if lo > 0.0 {
            hi / lo
        } else if hi <= 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        1.0
    };
    Ok(LogFit {
        intercept,
        slope,
        r_squared,
        window_start: start,
        window_end: end,
        slope_ratio,
        logarithmic: r_squared >= 0.98 && slope_ratio <= 1.5,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    /// `Λ̂_n(S)`.
    LambdaAtStart,
    /// `τ̂_{0,n}`.
    Tau0Mean,
    /// `sup_{y∈[S,0]} (Λ̂_n(y) − Λ(y))²`.
    SupError,
    /// `b̂_n`.
    Threshold,
}

impl Quantity {
    pub const ALL: [Quantity; 4] = [
        Quantity::LambdaAtStart,
        Quantity::Tau0Mean,
        Quantity::SupError,
        Quantity::Threshold,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Quantity::LambdaAtStart => "lambda_hat_S",
            Quantity::Tau0Mean => "tau0_hat",
            Quantity::SupError => "sup_error",
            Quantity::Threshold => "b_hat",
        }
    }

    /// Whether the theory column is an exact value or an upper bound.
    pub fn theory_kind(&self) -> &'static str {
        match self {
            Quantity::LambdaAtStart | Quantity::Tau0Mean => "exact",
            Quantity::SupError | Quantity::Threshold => "bound",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MseRow {
    pub n: u64,
    pub quantity: Quantity,
    pub empirical_mse: f64,
    pub standard_error: f64,
    pub theory: f64,
    pub ratio: f64,
}

/// `sup_{y∈[S,0]} (Λ̂(y) − Λ(y))²` for a pooled step estimator. The supremum
/// is attained at a jump (from either side) or at `S`.
pub fn sup_squared_error(model: &IntensityModel, set: &RecordSet) -> f64 {
    let m = set.len() as f64;
    let pooled = set.pooled_jumps();
    let s = model.env().street_start();
    let lam = |y: f64| -model.antiderivative(y);
    let mut worst = (pooled.len() as f64 / m - lam(s)).powi(2);
    for (i, &p) in pooled.iter().enumerate() {
        let after = (pooled.len() - i - 1) as f64 / m;
        let before = (pooled.len() - i) as f64 / m;
        let l = lam(p);
        worst = worst.max((after - l).powi(2)).max((before - l).powi(2));
    }
    worst
}

/// Empirical MSE of the full-information estimators at each `n` in
/// `n_values`, with theoretical values or bounds alongside. Each replication
/// draws `max(n_values)` full observations and is evaluated on prefixes.
pub fn estimator_mse_sweep(oracle: &Oracle, n_values: &[u64], replications: u64, seed: u64) -> Result<Vec<MseRow>> {
    if n_values.is_empty() || n_values.windows(2).any(|w| w[0] >= w[1]) || n_values[0] == 0 {
        return Err(Error::invalid("n_values", "must be positive and strictly increasing"));
    }
    if replications < 2 {
        return Err(Error::invalid("replications", "need at least 2"));
    }
    let model = oracle.model();
    let s = model.env().street_start();
    let n_max = *n_values.last().unwrap();
    let lam_s = -model.antiderivative(s);
    let tail = oracle.tail_mean();
    let b_star = oracle.b_star();

    // errors[rep][checkpoint][quantity]
    let errors = (0..replications)
        .into_par_iter()
        .map(|rep| -> Result<Vec<[f64; 4]>> {
            let mut records = Vec::with_capacity(n_max as usize);
            let mut out = Vec::with_capacity(n_values.len());
            let mut next = 0;
            for i in 0..n_max {
                let st = RngStream::new(seed, rep, i).with_domain(domain::MSE_SWEEP);
                let obs = sample_path(model, 0.0, &st)?;
                records.push(FullInfoRecord::from_observation(&obs).expect("stop after 0"));
                if i + 1 == n_values[next] {
                    let set = RecordSet::from_records(&records);
                    let n = records.len() as f64;
                    let lambda_hat = set.pooled_jumps().len() as f64 / n;
                    out.push([
                        (lambda_hat - lam_s).powi(2),
                        (set.phi_hat()? - tail).powi(2),
                        sup_squared_error(model, &set),
                        (set.solve_threshold(s)? - b_star).powi(2),
                    ]);
                    next += 1;
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;

    let var = var_tau0(model, oracle.tolerances());
    let mse_coef = mse_bound_bhat(oracle).coefficient;
    let mut rows = Vec::new();
    for (k, &n) in n_values.iter().enumerate() {
        for (q, quantity) in Quantity::ALL.into_iter().enumerate() {
            let (mse, se) = mean_se(errors.iter().map(|e| e[k][q]));
            let theory = match quantity {
                Quantity::LambdaAtStart => lam_s,
                Quantity::Tau0Mean => var,
                Quantity::SupError => 4.0 * lam_s,
                Quantity::Threshold => mse_coef,
            } / n as f64;
            rows.push(MseRow {
                n,
                quantity,
                empirical_mse: mse,
                standard_error: se,
                theory,
                ratio: mse / theory,
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BruteForceResult {
    /// `(b, estimated E|τ_b|, standard error)` per grid point.
    pub grid: Vec<(f64, f64, f64)>,
    /// Grid point with the smallest estimated cost.
    pub argmin: f64,
    pub cost: f64,
    pub standard_error: f64,
    /// Local minimum of a least-squares cubic through the grid points within
    /// [`REFINE_HALF_WIDTH`] of `argmin`; falls back to `argmin` when the fit
    /// has none.
    pub refined: f64,
}

pub const REFINE_HALF_WIDTH: f64 = 0.25;

fn refine_argmin(table: &[(f64, f64, f64)], argmin: f64) -> f64 {
    let pts: Vec<(f64, f64)> = table
        .iter()
        .filter(|p| (p.0 - argmin).abs() <= REFINE_HALF_WIDTH + 1e-12)
        .map(|p| (p.0 - argmin, p.1))
        .collect();
    if pts.len() < 6 {
        return argmin;
    }
    // Normal equations for y = c0 + c1 x + c2 x² + c3 x³.
    const K: usize = 4;
    let mut m = [[0.0f64; K + 1]; K];
    for &(x, y) in &pts {
        let row = [1.0, x, x * x, x * x * x];
        for i in 0..K {
            for j in 0..K {
                m[i][j] += row[i] * row[j];
            }
            m[i][K] += row[i] * y;
        }
    }
    for col in 0..K {
        let piv = (col..K).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs())).unwrap();
        m.swap(col, piv);
        if m[col][col].abs() < 1e-300 {
            return argmin;
        }
        for r in 0..K {
            if r != col {
                let f = m[r][col] / m[col][col];
                let pivot = m[col];
                for (dst, src) in m[r].iter_mut().zip(pivot).skip(col) {
                    *dst -= f * src;
                }
            }
        }
    }
    let c: Vec<f64> = (0..K).map(|i| m[i][K] / m[i][i]).collect();
    let lo = pts.first().unwrap().0;
    let hi = pts.last().unwrap().0;
    // Stationary points of the fit: 3c3 x² + 2c2 x + c1 = 0, keep the convex one.
    let (qa, qb, qc) = (3.0 * c[3], 2.0 * c[2], c[1]);
    let convex = |x: f64| 6.0 * c[3] * x + 2.0 * c[2] > 0.0;
    let root = if qa.abs() < 1e-12 * qb.abs().max(1e-300) {
        Some(-qc / qb).filter(|&x| convex(x))
    } else {
        let disc = qb * qb - 4.0 * qa * qc;
        if disc < 0.0 {
            None
        } else {
            let sq = disc.sqrt();
            [(-qb + sq) / (2.0 * qa), (-qb - sq) / (2.0 * qa)]
                .into_iter()
                .find(|&x| convex(x))
        }
    };
    match root {
        Some(x) if x.is_finite() => argmin + x.clamp(lo, hi),
        _ => argmin,
    }
}

const BRUTE_BLOCK: u64 = 1024;

/// Grid search for the threshold minimizing the simulated `E|τ_b|`.
///
/// Each simulated path is observed up to its first jump after 0, which
/// determines `τ_b` for every `b ∈ [S, 0]`; all grid points share the same
/// `paths` paths (common random numbers).
pub fn brute_force_threshold(model: &IntensityModel, grid_step: f64, paths: u64, seed: u64) -> Result<BruteForceResult> {
    if !(grid_step > 0.0 && grid_step.is_finite()) {
        return Err(Error::invalid("grid_step", "must be positive"));
    }
    if paths < 2 {
        return Err(Error::invalid("paths", "need at least 2"));
    }
    model.validate().into_result()?;
    let s = model.env().street_start();
    let points = ((-s) / grid_step).round() as usize;
    let grid: Vec<f64> = (0..=points)
        .map(|i| if i == points { 0.0 } else { s + grid_step * i as f64 })
        .collect();

    let blocks = paths.div_ceil(BRUTE_BLOCK);
    let partials = (0..blocks)
        .into_par_iter()
        .map(|blk| -> Result<Vec<(f64, f64)>> {
            let mut acc = vec![(0.0, 0.0); grid.len()];
            let end = ((blk + 1) * BRUTE_BLOCK).min(paths);
            for p in blk * BRUTE_BLOCK..end {
                let st = RngStream::new(seed, 0, p).with_domain(domain::BRUTE_FORCE);
                let obs = sample_path(model, 0.0, &st)?;
                for (slot, &b) in acc.iter_mut().zip(&grid) {
                    let cost = obs.stop_for(b).expect("observed past every grid threshold").abs();
                    slot.0 += cost;
                    slot.1 += cost * cost;
                }
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?;

    let n = paths as f64;
    let mut table = Vec::with_capacity(grid.len());
    for (i, &b) in grid.iter().enumerate() {
        let (sum, sq) = partials.iter().fold((0.0, 0.0), |a, p| (a.0 + p[i].0, a.1 + p[i].1));
        let mean = sum / n;
        let var = ((sq - n * mean * mean) / (n - 1.0)).max(0.0);
        table.push((b, mean, (var / n).sqrt()));
    }
    let best = table
        .iter()
        .copied()
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .expect("grid not empty");
    Ok(BruteForceResult {
        refined: refine_argmin(&table, best.0),
        grid: table,
        argmin: best.0,
        cost: best.1,
        standard_error: best.2,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaitingTimeCheck {
    pub samples: usize,
    pub mean: f64,
    pub standard_error: f64,
    /// `e^{L|S|}`.
    pub bound: f64,
    pub passed: bool,
}

/// Compares the mean wait between full-information rounds with `e^{L|S|}`.
pub fn waiting_time_check(diag: &FullInfoDiagnostics, env: &EnvironmentParams) -> Result<WaitingTimeCheck> {
    let samples = diag.waiting_times.len();
    if samples < 100 {
        return Err(Error::InsufficientSamples { have: samples, need: 100 });
    }
    let (mean, se) = mean_se(diag.waiting_times.iter().map(|&w| w as f64));
    let bound = (env.class_bound() * env.street_length()).exp();
    Ok(WaitingTimeCheck {
        samples,
        mean,
        standard_error: se,
        bound,
        passed: mean <= bound,
    })
}

/// Counts rounds where clamping the chosen threshold at `−ln(2)/L` would have
/// increased the gap by more than the oracle's clamp tolerance.
pub fn clamp_violations(oracle: &Oracle, traces: &[Vec<RoundRecord>]) -> Result<usize> {
    let l = oracle.model().env().class_bound();
    let tol = oracle.tolerances().gap_clamp();
    let mut bad = 0;
    for t in traces {
        for r in t {
            if oracle.gap(cutoff_clamp(r.threshold, l))? > r.gap + tol {
                bad += 1;
            }
        }
    }
    Ok(bad)
}
