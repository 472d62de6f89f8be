//! Full-knowledge solution of the parking problem: the optimal threshold,
//! expected costs of threshold rules, and the optimality gap.
//!
//! Two routes to `E|τ_b|` are kept apart on purpose:
//!
//! * [`Oracle::expected_cost`] integrates the cost density directly,
//!   `-∫_b^0 yλ(y)e^{-∫_b^y λ} dy + ∫_0^∞ yλ(y)e^{-∫_b^y λ} dy`;
//! * the balance form `-b + e^{A(b)}(E τ₀ - ∫_b^0 e^{Λ(y)} dy)` obtained by
//!   integrating by parts, used by [`Oracle::gap`] for speed.
//!
//! Tests compare one route against the other.

use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::intensity::{EnvironmentParams, IntensityModel};
use crate::quadrature::adaptive_simpson;

/// Interval width at which bisection stops regardless of the residual.
pub const ROOT_WIDTH: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Absolute quadrature tolerance.
    pub quad_tol: f64,
    /// Target residual of the threshold equation.
    pub root_tol: f64,
    /// Bound on the truncated tail of integrals to infinity.
    pub tail_tol: f64,
    /// Acceptance band for `|b*| = E|τ_{b*}|`.
    pub indifference_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            quad_tol: 1e-10,
            root_tol: 1e-10,
            tail_tol: 1e-12,
            indifference_tol: 1e-6,
        }
    }
}

impl Tolerances {
    pub fn check(&self) -> Result<()> {
        for (name, v) in [
            ("quad_tol", self.quad_tol),
            ("root_tol", self.root_tol),
            ("tail_tol", self.tail_tol),
            ("indifference_tol", self.indifference_tol),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(name, format!("{v} must be positive")));
            }
        }
        Ok(())
    }

    /// Gaps within this distance of zero are reported as zero.
    pub fn gap_clamp(&self) -> f64 {
        2.0 * (self.root_tol + self.quad_tol)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleResult {
    pub b_star: f64,
    pub expected_cost_at_star: f64,
    pub tail_mean: f64,
    pub residual: f64,
}

/// Horizon for `∫_0^∞` such that `tail_bound(Y) < tail_tol`, doubling from `8/L_low`.
fn horizon(env: &EnvironmentParams, tail_tol: f64, tail_bound: impl Fn(f64) -> f64) -> f64 {
    let mut y = 8.0 / env.lower_bound();
    while tail_bound(y) >= tail_tol {
        y *= 2.0;
    }
    y
}

/// `∫_Y^∞ y e^{-c(y - shift)} dy`.
fn exp_moment_tail(c: f64, y: f64, shift: f64) -> f64 {
    (-c * (y - shift)).exp() * (y / c + 1.0 / (c * c))
}

/// `E(τ₀) = ∫_0^∞ e^{-A(y)} dy` by truncated quadrature.
pub fn tail_mean(model: &IntensityModel, tol: &Tolerances) -> f64 {
    let c = model.env().lower_bound();
    let y = horizon(model.env(), tol.tail_tol, |y| (-c * y).exp() / c);
    adaptive_simpson(|u| (-model.antiderivative(u)).exp(), 0.0, y, tol.quad_tol)
}

/// `E(τ₀²) = 2∫_0^∞ u e^{-A(u)} du` by truncated quadrature.
pub fn tail_second_moment(model: &IntensityModel, tol: &Tolerances) -> f64 {
    let c = model.env().lower_bound();
    let y = horizon(model.env(), tol.tail_tol, |y| 2.0 * exp_moment_tail(c, y, 0.0));
    2.0 * adaptive_simpson(|u| u * (-model.antiderivative(u)).exp(), 0.0, y, tol.quad_tol)
}

/// Solved parking problem for one intensity model.
#[derive(Debug, Clone)]
pub struct Oracle {
    model: IntensityModel,
    tol: Tolerances,
    result: OracleResult,
}

impl Oracle {
    /// Validates the model, then solves for `b*` by bisection on
    /// `F(b) = ∫_b^0 e^{Λ(y)} dy − E(τ₀)`, which is strictly decreasing.
    pub fn new(model: IntensityModel, tol: Tolerances) -> Result<Self> {
        tol.check()?;
        model.validate().into_result()?;
        let env = *model.env();
        let tail = tail_mean(&model, &tol);
        let balance = |b: f64| balance_mass(&model, b, tol.quad_tol) - tail;

        let (mut lo, mut hi) = (env.street_start(), 0.0);
        let at_start = balance(lo);
        if at_start < 0.0 {
            return Err(Error::ClassViolation(format!(
                "no root of the threshold equation in [S, 0]: F(S) = {at_start}"
            )));
        }
        let mut best;
        loop {
            let mid = 0.5 * (lo + hi);
            let f = balance(mid);
            best = (mid, f);
            if f.abs() <= tol.root_tol || hi - lo <= ROOT_WIDTH {
                break;
            }
            if f > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (b_star, residual) = (best.0, best.1.abs());
        let mut oracle = Self {
            model,
            tol,
            result: OracleResult {
                b_star,
                expected_cost_at_star: f64::NAN,
                tail_mean: tail,
                residual,
            },
        };
        oracle.result.expected_cost_at_star = oracle.expected_cost(b_star)?;
        Ok(oracle)
    }

    pub fn with_defaults(model: IntensityModel) -> Result<Self> {
        Self::new(model, Tolerances::default())
    }

    pub fn model(&self) -> &IntensityModel {
        &self.model
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    pub fn result(&self) -> OracleResult {
        self.result
    }

    pub fn b_star(&self) -> f64 {
        self.result.b_star
    }

    pub fn tail_mean(&self) -> f64 {
        self.result.tail_mean
    }

    fn check_threshold(&self, b: f64) -> Result<()> {
        let s = self.model.env().street_start();
        if (s..=0.0).contains(&b) {
            Ok(())
        } else {
            Err(Error::Domain {
                position: b,
                lower: s,
                upper: 0.0,
            })
        }
    }

    /// Splits `E|τ_b|` into the part stopping before 0 and the part after.
    /// Returns `(-∫_b^0 yλe^{..}, ∫_0^∞ yλe^{..})`, both nonnegative.
    fn cost_parts(&self, b: f64) -> (f64, f64) {
        let m = &self.model;
        let ab = m.antiderivative(b);
        let density = |y: f64| y * m.rate(y) * (ab - m.antiderivative(y)).exp();
        let before = -adaptive_simpson(density, b, 0.0, self.tol.quad_tol);
        let env = m.env();
        let (c, l) = (env.lower_bound(), env.class_bound());
        let y = horizon(env, self.tol.tail_tol, |y| l * exp_moment_tail(c, y, b));
        let after = adaptive_simpson(density, 0.0, y, self.tol.quad_tol);
        (before, after)
    }

    /// `E|τ_b|` by direct integration of the cost density.
    pub fn expected_cost(&self, b: f64) -> Result<f64> {
        self.check_threshold(b)?;
        let (before, after) = self.cost_parts(b);
        Ok(before + after)
    }

    /// `E|τ_b|` via `-b + e^{A(b)}(E τ₀ − ∫_b^0 e^{Λ})`.
    pub fn expected_cost_balance(&self, b: f64) -> Result<f64> {
        self.check_threshold(b)?;
        Ok(self.balance_cost(b))
    }

    fn balance_cost(&self, b: f64) -> f64 {
        let m = &self.model;
        -b + m.antiderivative(b).exp()
            * (self.result.tail_mean - balance_mass(m, b, self.tol.quad_tol))
    }

    /// `Δ(b) = E|τ_b| − E|τ_{b*}| ≥ 0`. Constant intensities use the closed
    /// form `(2e^{λb} − 1)/λ − b − ln(2)/λ`.
    pub fn gap(&self, b: f64) -> Result<f64> {
        self.check_threshold(b)?;
        let raw = match self.model.constant_rate() {
            Some(rate) => constant_gap(rate, b),
            None => self.balance_cost(b) - self.balance_cost(self.result.b_star),
        };
        if raw < 0.0 {
            if raw >= -self.tol.gap_clamp() {
                return Ok(0.0);
            }
            return Err(Error::Numerical(format!("negative optimality gap {raw} at b = {b}")));
        }
        Ok(raw)
    }

    /// `Δ''(b) = λ'(b)[b + E|τ_b|] + λ(b)[1 + λ(b)(b + E|τ_b|)]`, the expanded
    /// two-bracket form with the cost integrals evaluated by quadrature.
    pub fn gap_second_derivative(&self, b: f64) -> Result<f64> {
        self.check_threshold(b)?;
        let (before, after) = self.cost_parts(b);
        let rate = self.model.rate(b);
        let slope = self.model.slope(b);
        let first = b + before + after;
        let second = 1.0 + b * rate + rate * before + rate * after;
        Ok(slope * first + rate * second)
    }

    /// Per-model `sup_{b∈[S,0]} Δ''(b)` on a grid of step `10⁻³|S|`.
    /// Returns `(sup, argmax)`.
    pub fn sup_gap_second_derivative(&self) -> Result<(f64, f64)> {
        let s = self.model.env().street_start();
        let n = 1000;
        let mut best = (f64::NEG_INFINITY, s);
        for i in 0..=n {
            let b = if i == n { 0.0 } else { s - s * i as f64 / n as f64 };
            let v = self.gap_second_derivative(b)?;
            if v > best.0 {
                best = (v, b);
            }
        }
        Ok(best)
    }
}

/// `∫_b^0 e^{Λ(y)} dy`, the left side of the threshold equation.
fn balance_mass(model: &IntensityModel, b: f64, quad_tol: f64) -> f64 {
    adaptive_simpson(|y| (-model.antiderivative(y)).exp(), b, 0.0, quad_tol)
}

/// `Δ_λ(b)` for a constant rate.
pub fn constant_gap(rate: f64, b: f64) -> f64 {
    (2.0 * (rate * b).exp() - 1.0) / rate - b - LN_2 / rate
}

/// Certified upper bound on `sup_{λ∈M(L)} sup_{b∈[S,0]} Δ''_λ(b)`.
///
/// With `K = 2|S| + 1/L_low` bounding the first bracket term by term
/// (`|b| ≤ |S|`, `E[|τ_b|; τ_b ≤ 0] ≤ |S|`, `E[τ_b; τ_b > 0] ≤ E τ₀ ≤ 1/L_low`),
/// the bound is `L·K + L·(1 + L·K)`.
pub fn class_sup(env: &EnvironmentParams) -> f64 {
    let l = env.class_bound();
    let k = 2.0 * env.street_length() + 1.0 / env.lower_bound();
    l * k + l * (1.0 + l * k)
}

/// Convenience wrapper: `b*` and friends with default tolerances.
pub fn optimal_threshold(model: &IntensityModel) -> Result<OracleResult> {
    Ok(Oracle::with_defaults(model.clone())?.result())
}

/// Convenience wrapper: `E|τ_b|` with default tolerances.
pub fn expected_cost(model: &IntensityModel, b: f64) -> Result<f64> {
    Oracle::with_defaults(model.clone())?.expected_cost(b)
}

/// Convenience wrapper: `Δ(b)` with default tolerances.
pub fn optimality_gap(model: &IntensityModel, b: f64) -> Result<f64> {
    Oracle::with_defaults(model.clone())?.gap(b)
}

/// Clamp map of cut-off policies, `x ↦ min(x, −ln(2)/L)`.
pub fn cutoff_clamp(x: f64, class_bound: f64) -> f64 {
    x.min(-LN_2 / class_bound)
}
