//! Exact simulation of the arrival process by thinning, with counter-keyed
//! random streams.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

use crate::error::{Error, Result};
use crate::intensity::IntensityModel;

/// Thinning candidates allowed per path before giving up.
pub const CANDIDATE_CAP: u64 = 10_000_000;

/// Identifies one independent random stream.
///
/// The four words form the ChaCha8 key directly, so distinct
/// `(master_seed, replication_id, round_id, domain)` tuples give unrelated
/// streams and the draw index is ChaCha's internal block counter. Nothing
/// depends on scheduling order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub master_seed: u64,
    pub replication_id: u64,
    pub round_id: u64,
    /// Separates unrelated uses of the same seed (experiments, brute force, sweeps).
    pub domain: u64,
}

impl RngStream {
    pub fn new(master_seed: u64, replication_id: u64, round_id: u64) -> Self {
        Self {
            master_seed,
            replication_id,
            round_id,
            domain: 0,
        }
    }

    pub fn with_domain(mut self, domain: u64) -> Self {
        self.domain = domain;
        self
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut key = [0u8; 32];
        for (chunk, word) in key.chunks_exact_mut(8).zip([
            self.master_seed,
            self.replication_id,
            self.round_id,
            self.domain,
        ]) {
            chunk.copy_from_slice(&word.to_le_bytes());
        }
        ChaCha8Rng::from_seed(key)
    }
}

/// One round's observation: every jump from `S` up to and including the stop.
#[derive(Debug, Clone, PartialEq)]
pub struct PathObservation {
    pub jump_positions: Vec<f64>,
    pub stop_position: f64,
    pub threshold: f64,
}

impl PathObservation {
    /// The stop fell after the target, so `[S, 0]` and `τ₀` were fully observed.
    pub fn is_full_information(&self) -> bool {
        self.stop_position > 0.0
    }

    /// Observed jumps in `(S, 0]`.
    pub fn window_jumps(&self) -> &[f64] {
        let end = self.jump_positions.partition_point(|&x| x <= 0.0);
        &self.jump_positions[..end]
    }

    /// `τ_b` for another threshold `b`, when the observation determines it.
    pub fn stop_for(&self, b: f64) -> Option<f64> {
        if b >= self.stop_position {
            return None;
        }
        let i = self.jump_positions.partition_point(|&x| x <= b);
        self.jump_positions.get(i).copied()
    }
}

/// Simulates jumps on `[S, ·)` until the first jump strictly after `threshold`.
///
/// Candidates come from a rate-`L` homogeneous process and are kept with
/// probability `λ(t)/L`.
pub fn sample_path(model: &IntensityModel, threshold: f64, stream: &RngStream) -> Result<PathObservation> {
    let env = model.env();
    let s = env.street_start();
    if !(s..=0.0).contains(&threshold) {
        return Err(Error::Domain {
            position: threshold,
            lower: s,
            upper: 0.0,
        });
    }
    let dominating = env.class_bound();
    let mut rng = stream.rng();
    let mut t = s;
    let mut jumps = Vec::new();
    for _ in 0..CANDIDATE_CAP {
        let gap: f64 = rng.sample(Exp1);
        t += gap / dominating;
        let rate = model.rate(t);
        if rate > dominating {
            return Err(Error::ClassViolation(format!(
                "lambda({t}) = {rate} exceeds the thinning rate L = {dominating}"
            )));
        }
        let u: f64 = rng.gen();
        if u * dominating < rate {
            jumps.push(t);
            if t > threshold {
                return Ok(PathObservation {
                    jump_positions: jumps,
                    stop_position: t,
                    threshold,
                });
            }
        }
    }
    Err(Error::CandidateCap { cap: CANDIDATE_CAP })
}

/// First jump strictly after 0.
pub fn sample_tau0(model: &IntensityModel, stream: &RngStream) -> Result<f64> {
    Ok(sample_path(model, 0.0, stream)?.stop_position)
}
