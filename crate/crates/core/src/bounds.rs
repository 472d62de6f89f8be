//! Explicit constants of the regret analysis: the MSE bound for the
//! full-information threshold estimator, the logarithmic regret upper-bound
//! constant over M(L), and the minimax lower-bound constant obtained from
//! a Beta(3,3) prior and the van Trees inequality.

use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::intensity::{EnvironmentParams, IntensityModel};
use crate::oracle::{class_sup, tail_mean, tail_second_moment, Oracle, Tolerances};
use crate::quadrature::{adaptive_simpson, gauss_legendre_composite};

/// `Var(τ₀) = 2∫_0^∞ u e^{-A(u)} du − E(τ₀)²`.
pub fn var_tau0(model: &IntensityModel, tol: &Tolerances) -> f64 {
    let mean = tail_mean(model, tol);
    tail_second_moment(model, tol) - mean * mean
}

/// `2/L_low²`, the class-wide cap on `E(τ₀²)` and hence on `Var(τ₀)`.
pub fn var_tau0_cap(env: &EnvironmentParams) -> f64 {
    2.0 / (env.lower_bound() * env.lower_bound())
}

/// `M = min{m ∈ ℕ₀ : S + m/(2L) ≥ 0}`.
pub fn mse_grid_count(env: &EnvironmentParams) -> u64 {
    let (s, l) = (env.street_start(), env.class_bound());
    let mut m = (-s * 2.0 * l).ceil().max(0.0) as u64;
    while m > 0 && s + (m - 1) as f64 / (2.0 * l) >= 0.0 {
        m -= 1;
    }
    while s + m as f64 / (2.0 * l) < 0.0 {
        m += 1;
    }
    m
}

/// Coefficient `K` of the bound `E(b̂_n − b*)² ≤ K/n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MseBound {
    /// Radius used in the bound, half of its admissible supremum.
    pub epsilon: f64,
    pub m_grid: u64,
    pub var_tau0: f64,
    pub lambda_at_start: f64,
    /// `S²(4Λ(S) + Var τ₀)/ε²`, `S²·4Λ(S)(M+1)`, `2 Var τ₀`, `8|S|∫_S^0 e^{2Λ}Λ`.
    pub terms: [f64; 4],
    pub coefficient: f64,
}

impl MseBound {
    pub fn at(&self, n: u64) -> f64 {
        self.coefficient / n as f64
    }
}

/// Supremum of admissible radii, `min{E τ₀, 1, (b* − S)/(3 + 2E τ₀)}`.
pub fn epsilon_limit(oracle: &Oracle) -> f64 {
    let s = oracle.model().env().street_start();
    let t = oracle.tail_mean();
    t.min(1.0).min((oracle.b_star() - s) / (3.0 + 2.0 * t))
}

pub fn mse_bound_bhat(oracle: &Oracle) -> MseBound {
    let model = oracle.model();
    let tol = oracle.tolerances();
    let env = model.env();
    let s = env.street_start();
    let len = env.street_length();
    let epsilon = 0.5 * epsilon_limit(oracle);
    let m_grid = mse_grid_count(env);
    let var = var_tau0(model, tol);
    let lam_s = -model.antiderivative(s);
    let weighted = adaptive_simpson(
        |y| {
            let lam = -model.antiderivative(y);
            (2.0 * lam).exp() * lam
        },
        s,
        0.0,
        tol.quad_tol,
    );
    let terms = [
        s * s * (4.0 * lam_s + var) / (epsilon * epsilon),
        s * s * 4.0 * lam_s * (m_grid + 1) as f64,
        2.0 * var,
        8.0 * len * weighted,
    ];
    MseBound {
        epsilon,
        m_grid,
        var_tau0: var,
        lambda_at_start: lam_s,
        terms,
        coefficient: terms.iter().sum(),
    }
}

/// Factor `κ` with `H_T = Σ_{j≤T} 1/j ≤ κ·ln(T+1)` for all `T ≥ 1`
/// (tight at `T = 1`).
pub const HARMONIC_FACTOR: f64 = 1.0 / LN_2;

/// Upper-bound constant `C` with `sup_λ R^ILU_λ(T) ≤ C·ln(T+1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpperBound {
    pub lower_bound: f64,
    pub b_star_min: f64,
    pub c_upper: f64,
    pub epsilon_class: f64,
    pub var_cap: f64,
    pub d: f64,
    pub waiting_time_bound: f64,
    pub harmonic_factor: f64,
    pub constant: f64,
}

impl UpperBound {
    pub fn regret_bound(&self, rounds: u64) -> f64 {
        self.constant * ((rounds + 1) as f64).ln()
    }
}

pub fn upper_bound_constant(env: &EnvironmentParams) -> UpperBound {
    let s = env.street_start();
    let len = env.street_length();
    let l = env.class_bound();
    let low = env.lower_bound();
    let c_upper = class_sup(env);
    let var_cap = var_tau0_cap(env);
    let epsilon_class = (1.0 / l).min((len - LN_2 / low) / (3.0 + 2.0 / low));
    let d = s * s * (4.0 * l * len + var_cap) / (epsilon_class * epsilon_class)
        + 2.0 * var_cap
        + 8.0 * len.powi(3) * l * (2.0 * len * l).exp()
        + len.powi(3) * 4.0 * l * (2.0 * len * l + 2.0);
    let waiting_time_bound = (l * len).exp();
    let constant =
        (1.0 / low) / LN_2 + waiting_time_bound * 0.5 * c_upper * d * HARMONIC_FACTOR;
    UpperBound {
        lower_bound: low,
        b_star_min: env.min_optimal_threshold(),
        c_upper,
        epsilon_class,
        var_cap,
        d,
        waiting_time_bound,
        harmonic_factor: HARMONIC_FACTOR,
        constant,
    }
}

/// Beta(3,3) density rescaled to `[a, b]`.
pub fn prior_density(x: f64, a: f64, b: f64) -> f64 {
    if x <= a || x >= b {
        return 0.0;
    }
    30.0 * (x - a).powi(2) * (b - x).powi(2) / (b - a).powi(5)
}

pub fn prior_density_slope(x: f64, a: f64, b: f64) -> f64 {
    if x <= a || x >= b {
        return 0.0;
    }
    60.0 * (x - a) * (b - x) * (a + b - 2.0 * x) / (b - a).powi(5)
}

/// `∫ q'²/q` over `[a, b]` by composite Gauss-Legendre, which never touches
/// the endpoints where `q` vanishes.
pub fn prior_information_quadrature(a: f64, b: f64) -> f64 {
    gauss_legendre_composite(
        |x| {
            let d = prior_density_slope(x, a, b);
            d * d / prior_density(x, a, b)
        },
        a,
        b,
        20,
        8,
    )
}

/// `Σ_{n=1}^T 1/(I_q + n·fisher_unit)`, the van Trees sum.
pub fn van_trees_sum(prior_information: f64, fisher_unit: f64, rounds: u64) -> f64 {
    (1..=rounds)
        .map(|n| 1.0 / (prior_information + n as f64 * fisher_unit))
        .sum()
}

/// Lower-bound constant `C_lower` with minimax regret `≥ C_lower·ln T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBound {
    /// Constant-class endpoints `a = ln(2)/|S| + 1/L`, `b = L`.
    pub a: f64,
    pub b: f64,
    /// `40/(b − a)²`.
    pub prior_information: f64,
    /// `inf_{λ∈[a,b]} inf_{x∈[S,0]} 2λe^{λx}`.
    pub c: f64,
    /// `c·ln(2)/L²`.
    pub c_tilde: f64,
    /// `1/(40/(b−a)² + 1/a)` on the class endpoints (unit street length).
    pub c_prime: f64,
    /// The same expression on the rescaled interval `[|S|a, |S|b]`.
    pub c_prime_rescaled: f64,
    /// Per-round Fisher information cap of the street count, `|S|/a`.
    pub fisher_unit: f64,
    /// `c̃ / (40/(b−a)² + |S|/a)`.
    pub c_lower: f64,
}

impl LowerBound {
    pub fn minimax_bound(&self, rounds: u64) -> f64 {
        self.c_lower * (rounds as f64).ln()
    }
}

pub fn lower_bound_constant(env: &EnvironmentParams) -> Result<LowerBound> {
    let len = env.street_length();
    let a = env.lower_bound();
    let b = env.class_bound();
    if a >= b {
        return Err(Error::EmptyClass { lower: a, upper: b });
    }
    let s = env.street_start();
    let g = |lam: f64| 2.0 * lam * (lam * s).exp();
    let mut c = g(a).min(g(b));
    let stationary = 1.0 / len;
    if stationary > a && stationary < b {
        c = c.min(g(stationary));
    }
    let c_tilde = c * LN_2 / (b * b);
    let prior_information = 40.0 / ((b - a) * (b - a));
    let c_prime = 1.0 / (prior_information + 1.0 / a);
    let (ra, rb) = (len * a, len * b);
    let c_prime_rescaled = 1.0 / (40.0 / ((rb - ra) * (rb - ra)) + 1.0 / ra);
    let fisher_unit = len / a;
    let c_lower = c_tilde / (prior_information + fisher_unit);
    Ok(LowerBound {
        a,
        b,
        prior_information,
        c,
        c_tilde,
        c_prime,
        c_prime_rescaled,
        fisher_unit,
        c_lower,
    })
}

/// Every constant for one environment and model, as printed by `bounds`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub upper: UpperBound,
    pub mse: MseBound,
    pub lower: LowerBound,
    pub b_star: f64,
    pub tail_mean: f64,
    pub prior_information_unit: f64,
}

impl BoundReport {
    pub fn new(oracle: &Oracle) -> Result<Self> {
        let env = oracle.model().env();
        Ok(Self {
            upper: upper_bound_constant(env),
            mse: mse_bound_bhat(oracle),
            lower: lower_bound_constant(env)?,
            b_star: oracle.b_star(),
            tail_mean: oracle.tail_mean(),
            prior_information_unit: prior_information_quadrature(0.0, 1.0),
        })
    }

    /// Labeled rows `(name, value)` in a fixed order.
    pub fn rows(&self) -> Vec<(&'static str, f64)> {
        let (u, m, l) = (&self.upper, &self.mse, &self.lower);
        vec![
            ("L_low", u.lower_bound),
            ("b_star_min", u.b_star_min),
            ("b_star", self.b_star),
            ("tail_mean", self.tail_mean),
            ("var_tau0", m.var_tau0),
            ("var_tau0_cap", u.var_cap),
            ("epsilon", m.epsilon),
            ("M_grid", m.m_grid as f64),
            ("mse_coefficient", m.coefficient),
            ("c_upper", u.c_upper),
            ("epsilon_class", u.epsilon_class),
            ("D", u.d),
            ("waiting_time_bound", u.waiting_time_bound),
            ("harmonic_factor", u.harmonic_factor),
            ("C_upper", u.constant),
            ("a", l.a),
            ("b", l.b),
            ("I_q_unit", self.prior_information_unit),
            ("I_q", l.prior_information),
            ("fisher_unit", l.fisher_unit),
            ("c", l.c),
            ("c_tilde", l.c_tilde),
            ("C_prime", l.c_prime),
            ("C_prime_rescaled", l.c_prime_rescaled),
            ("C_lower", l.c_lower),
        ]
    }
}
