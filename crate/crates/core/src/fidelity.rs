//! Statistical checks of the path simulator against the Poisson law.

use statrs::distribution::{ChiSquared, ContinuousCDF, Discrete, Poisson};

use crate::error::{Error, Result};
use crate::harness::mean_se;
use crate::intensity::IntensityModel;
use crate::simulate::{sample_path, RngStream};

/// Significance level of the goodness-of-fit test.
pub const GOF_ALPHA: f64 = 1e-3;

/// Bands for means and probabilities, in standard errors.
pub const SIGMA_BAND: f64 = 3.0;

/// Chi-square bins keep at least this expected count.
const MIN_EXPECTED: f64 = 5.0;

#[derive(Debug, Clone, PartialEq)]
pub struct CountCheck {
    /// `Λ(S)`, mean and variance of the count on `(S, 0]`.
    pub expected: f64,
    pub mean: f64,
    pub mean_se: f64,
    pub variance: f64,
    pub variance_se: f64,
    pub chi_square: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
}

impl CountCheck {
    pub fn mean_ok(&self) -> bool {
        (self.mean - self.expected).abs() <= SIGMA_BAND * self.mean_se
    }

    pub fn variance_ok(&self) -> bool {
        (self.variance - self.expected).abs() <= SIGMA_BAND * self.variance_se
    }

    pub fn gof_ok(&self) -> bool {
        self.p_value >= GOF_ALPHA
    }

    pub fn passed(&self) -> bool {
        self.mean_ok() && self.variance_ok() && self.gof_ok()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurvivalRow {
    pub t: f64,
    /// `e^{−A(t)}`.
    pub expected: f64,
    pub empirical: f64,
    /// Binomial standard error under the expected probability.
    pub standard_error: f64,
}

impl SurvivalRow {
    pub fn passed(&self) -> bool {
        (self.empirical - self.expected).abs() <= SIGMA_BAND * self.standard_error
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncrementCheck {
    /// Empirical covariance of counts on `(S, S/2]` and `(S/2, 0]`.
    pub covariance: f64,
    pub standard_error: f64,
}

impl IncrementCheck {
    pub fn passed(&self) -> bool {
        self.covariance.abs() <= SIGMA_BAND * self.standard_error
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FidelityReport {
    pub paths: u64,
    pub counts: CountCheck,
    pub increments: IncrementCheck,
    pub survival: Vec<SurvivalRow>,
}

impl FidelityReport {
    pub fn passed(&self) -> bool {
        self.counts.passed() && self.increments.passed() && self.survival.iter().all(SurvivalRow::passed)
    }
}

fn count_check(counts: &[u64], expected: f64) -> Result<CountCheck> {
    let n = counts.len() as f64;
    let (mean, mean_se) = mean_se(counts.iter().map(|&c| c as f64));
    let m2 = counts.iter().map(|&c| (c as f64 - mean).powi(2)).sum::<f64>() / n;
    let m4 = counts.iter().map(|&c| (c as f64 - mean).powi(4)).sum::<f64>() / n;
    let variance = m2 * n / (n - 1.0);
    let variance_se = ((m4 - m2 * m2) / n).max(0.0).sqrt();

    let poisson = Poisson::new(expected).map_err(|e| Error::Numerical(e.to_string()))?;
    let max = counts.iter().copied().max().unwrap_or(0);
    let mut observed = vec![0u64; max as usize + 1];
    for &c in counts {
        observed[c as usize] += 1;
    }
    // Bins 0..k individually while the expected count allows, then one tail bin.
    let mut chi_square = 0.0;
    let mut bins = 0;
    let mut k = 0u64;
    let mut covered = 0.0;
    loop {
        let e = n * poisson.pmf(k);
        let tail = n * (1.0 - covered - poisson.pmf(k));
        if e < MIN_EXPECTED || tail < MIN_EXPECTED {
            break;
        }
        let o = observed.get(k as usize).copied().unwrap_or(0) as f64;
        chi_square += (o - e).powi(2) / e;
        covered += poisson.pmf(k);
        bins += 1;
        k += 1;
    }
    let e_tail = n * (1.0 - covered);
    let o_tail = observed.iter().skip(k as usize).sum::<u64>() as f64;
    chi_square += (o_tail - e_tail).powi(2) / e_tail;
    bins += 1;
    if bins < 2 {
        return Err(Error::InsufficientSamples { have: bins, need: 2 });
    }
    let degrees_of_freedom = bins - 1;
    let dist = ChiSquared::new(degrees_of_freedom as f64).map_err(|e| Error::Numerical(e.to_string()))?;
    Ok(CountCheck {
        expected,
        mean,
        mean_se,
        variance,
        variance_se,
        chi_square,
        degrees_of_freedom,
        p_value: 1.0 - dist.cdf(chi_square),
    })
}

/// Simulates `paths` full observations at threshold `0` and checks the
/// window count law, independence of increments, and `P(τ₀ > t)` at each `t`.
pub fn simulation_fidelity(model: &IntensityModel, paths: u64, times: &[f64], seed: u64) -> Result<FidelityReport> {
    if paths < 100 {
        return Err(Error::InsufficientSamples {
            have: paths as usize,
            need: 100,
        });
    }
    let s = model.env().street_start();
    let half = 0.5 * s;
    let mut window = Vec::with_capacity(paths as usize);
    let mut left = Vec::with_capacity(paths as usize);
    let mut tau0 = Vec::with_capacity(paths as usize);
    for p in 0..paths {
        let obs = sample_path(model, 0.0, &RngStream::new(seed, 0, p).with_domain(crate::harness::domain::SIMULATE))?;
        let w = obs.window_jumps();
        window.push(w.len() as u64);
        left.push(w.iter().filter(|&&x| x <= half).count() as u64);
        tau0.push(obs.stop_position);
    }
    let counts = count_check(&window, -model.antiderivative(s))?;

    let n = paths as f64;
    let right: Vec<f64> = window.iter().zip(&left).map(|(&w, &l)| (w - l) as f64).collect();
    let left: Vec<f64> = left.iter().map(|&l| l as f64).collect();
    let ml = left.iter().sum::<f64>() / n;
    let mr = right.iter().sum::<f64>() / n;
    let products: Vec<f64> = left.iter().zip(&right).map(|(l, r)| (l - ml) * (r - mr)).collect();
    let (cov, cov_se) = mean_se(products.iter().copied());
    let increments = IncrementCheck {
        covariance: cov * n / (n - 1.0),
        standard_error: cov_se,
    };

    let survival = times
        .iter()
        .map(|&t| {
            let expected = (-model.cumulative(t)?).exp();
            let empirical = tau0.iter().filter(|&&x| x > t).count() as f64 / n;
            Ok(SurvivalRow {
                t,
                expected,
                empirical,
                standard_error: (expected * (1.0 - expected) / n).sqrt(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(FidelityReport {
        paths,
        counts,
        increments,
        survival,
    })
}
