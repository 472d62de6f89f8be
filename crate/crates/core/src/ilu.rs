//! Indifference level updating: estimate the integrated intensity and the
//! mean first jump after the target from full-information rounds, then solve
//! the empirical threshold equation exactly.

use crate::error::{Error, Result};
use crate::intensity::IntensityModel;
use crate::simulate::{sample_path, PathObservation, RngStream};

/// Data from one round whose stop fell after the target.
#[derive(Debug, Clone, PartialEq)]
pub struct FullInfoRecord {
    jumps_in_window: Vec<f64>,
    tau0: f64,
}

impl FullInfoRecord {
    /// `jumps` must be strictly increasing within `(S, 0]`; `tau0 > 0`.
    pub fn new(jumps_in_window: Vec<f64>, tau0: f64, street_start: f64) -> Result<Self> {
        if !(tau0 > 0.0 && tau0.is_finite()) {
            return Err(Error::invalid("tau0", format!("{tau0} must be positive")));
        }
        if jumps_in_window.windows(2).any(|w| w[0] >= w[1] || w[0].is_nan()) {
            return Err(Error::invalid("jumps", "must be strictly increasing"));
        }
        if jumps_in_window.iter().any(|&x| !(x > street_start && x <= 0.0)) {
            return Err(Error::invalid("jumps", "must lie in (S, 0]"));
        }
        Ok(Self { jumps_in_window, tau0 })
    }

    /// The record carried by a full-information observation, if any.
    pub fn from_observation(obs: &PathObservation) -> Option<Self> {
        obs.is_full_information().then(|| Self {
            jumps_in_window: obs.window_jumps().to_vec(),
            tau0: obs.stop_position,
        })
    }

    pub fn jumps(&self) -> &[f64] {
        &self.jumps_in_window
    }

    pub fn tau0(&self) -> f64 {
        self.tau0
    }
}

/// Pooled full-information data behind the estimators `Γ̂` and `φ̂`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RecordSet {
    records: Vec<FullInfoRecord>,
    /// All recorded jumps, ascending.
    pooled: Vec<f64>,
    tau0_sum: f64,
}

impl RecordSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds the pooled array with a single sort.
    pub fn from_records(records: &[FullInfoRecord]) -> Self {
        let mut pooled: Vec<f64> = records.iter().flat_map(|r| r.jumps_in_window.iter().copied()).collect();
        pooled.sort_by(f64::total_cmp);
        Self {
            tau0_sum: records.iter().map(|r| r.tau0).sum(),
            records: records.to_vec(),
            pooled,
        }
    }

    /// Appends one record, merging its (sorted) jumps into the pool.
    pub fn push(&mut self, record: FullInfoRecord) {
        let add = &record.jumps_in_window;
        if !add.is_empty() {
            let mut merged = Vec::with_capacity(self.pooled.len() + add.len());
            let (mut i, mut j) = (0, 0);
            while i < self.pooled.len() && j < add.len() {
                if self.pooled[i] <= add[j] {
                    merged.push(self.pooled[i]);
                    i += 1;
                } else {
                    merged.push(add[j]);
                    j += 1;
                }
            }
            merged.extend_from_slice(&self.pooled[i..]);
            merged.extend_from_slice(&add[j..]);
            self.pooled = merged;
        }
        self.tau0_sum += record.tau0;
        self.records.push(record);
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[FullInfoRecord] {
        &self.records
    }

    pub fn pooled_jumps(&self) -> &[f64] {
        &self.pooled
    }

    fn require(&self) -> Result<()> {
        if self.records.is_empty() {
            Err(Error::EmptyRecords)
        } else {
            Ok(())
        }
    }

    /// Number of pooled jumps in `(y, 0]`.
    pub fn count_after(&self, y: f64) -> usize {
        self.pooled.len() - self.pooled.partition_point(|&x| x <= y)
    }

    /// `Γ̂(y)`: mean number of recorded jumps in `(y, 0]`.
    pub fn gamma_hat(&self, y: f64) -> Result<f64> {
        self.require()?;
        Ok(self.count_after(y) as f64 / self.records.len() as f64)
    }

    /// `φ̂`: mean recorded first jump after 0.
    pub fn phi_hat(&self) -> Result<f64> {
        self.require()?;
        Ok(self.tau0_sum / self.records.len() as f64)
    }

    /// `∫_b^0 e^{Γ̂(y)} dy`, exact for the step function `Γ̂`.
    pub fn piecewise_mass(&self, b: f64) -> Result<f64> {
        self.require()?;
        let ratio = (1.0 / self.records.len() as f64).exp();
        let mut level = 1.0;
        let mut upper = 0.0;
        let mut mass = 0.0;
        for &p in self.pooled.iter().rev() {
            if p <= b {
                break;
            }
            mass += (upper - p) * level;
            upper = p;
            level *= ratio;
        }
        Ok(mass + (upper - b).max(0.0) * level)
    }

    /// Solves `∫_b^0 e^{Γ̂(y)} dy = φ̂` for `b ∈ [S, 0]`, returning `S` when
    /// the mass available on `[S, 0]` does not reach `φ̂`.
    ///
    /// Between consecutive pooled jumps the integrand is the constant
    /// `e^{k/m}`, so the mass grows linearly leftward from 0 and the root is
    /// found in closed form inside its segment.
    pub fn solve_threshold(&self, street_start: f64) -> Result<f64> {
        let target = self.phi_hat()?;
        let ratio = (1.0 / self.records.len() as f64).exp();
        let mut level = 1.0;
        let mut upper = 0.0;
        let mut mass = 0.0;
        for &p in self.pooled.iter().rev() {
            let seg = (upper - p) * level;
            if mass + seg >= target {
                return Ok((upper - (target - mass) / level).clamp(p, upper));
            }
            mass += seg;
            upper = p;
            level *= ratio;
        }
        let seg = (upper - street_start) * level;
        if mass + seg > target {
            Ok((upper - (target - mass) / level).clamp(street_start, upper))
        } else {
            Ok(street_start)
        }
    }
}

/// Threshold of the full-information policy after `records`; `0` when empty.
pub fn full_info_threshold(records: &[FullInfoRecord], street_start: f64) -> f64 {
    if records.is_empty() {
        return 0.0;
    }
    RecordSet::from_records(records)
        .solve_threshold(street_start)
        .expect("non-empty record set")
}

/// Learner state of one replication.
#[derive(Debug, Clone, PartialEq)]
pub struct IluState {
    records: RecordSet,
    round: u64,
    last_threshold: f64,
    street_start: f64,
}

/// What happened in one round.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub round: u64,
    pub threshold: f64,
    pub observation: PathObservation,
    pub full_information: bool,
}

impl IluState {
    pub fn new(street_start: f64) -> Self {
        Self {
            records: RecordSet::new(),
            round: 0,
            last_threshold: 0.0,
            street_start,
        }
    }

    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn last_threshold(&self) -> f64 {
        self.last_threshold
    }

    pub fn records(&self) -> &RecordSet {
        &self.records
    }

    pub fn gamma_hat(&self, y: f64) -> Result<f64> {
        self.records.gamma_hat(y)
    }

    pub fn phi_hat(&self) -> Result<f64> {
        self.records.phi_hat()
    }

    pub fn solve_threshold(&self) -> Result<f64> {
        self.records.solve_threshold(self.street_start)
    }

    /// Threshold for the coming round: `0` in round 0, otherwise the solution
    /// of the empirical threshold equation. Depends on past rounds only.
    pub fn next_threshold(&self) -> Result<f64> {
        if self.round == 0 {
            Ok(0.0)
        } else {
            self.solve_threshold()
        }
    }

    /// Plays one round at `threshold` with the given stream and records the
    /// observation when it carries full information.
    pub fn play(&mut self, model: &IntensityModel, threshold: f64, stream: &RngStream) -> Result<StepOutcome> {
        let observation = sample_path(model, threshold, stream)?;
        let record = FullInfoRecord::from_observation(&observation);
        let full_information = record.is_some();
        if let Some(r) = record {
            self.records.push(r);
        }
        let outcome = StepOutcome {
            round: self.round,
            threshold,
            observation,
            full_information,
        };
        self.last_threshold = threshold;
        self.round += 1;
        Ok(outcome)
    }

    /// One ILU round: choose the threshold, simulate, update.
    pub fn step(&mut self, model: &IntensityModel, stream: &RngStream) -> Result<StepOutcome> {
        let threshold = self.next_threshold()?;
        self.play(model, threshold, stream)
    }
}
