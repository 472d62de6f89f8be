//! Intensity functions of the arrival process and the environment class M(L).
//!
//! Positions are real numbers on the street `[S, ∞)`; the target sits at 0.
//! [`IntensityModel::cumulative`] is the signed integral `A(y) = ∫_0^y λ`, so
//! the integrated intensity ahead of a position `y ≤ 0` is `Λ(y) = -A(y)`.

use std::f64::consts::{LN_2, PI};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quadrature::adaptive_simpson;

/// Default absolute tolerance for quadrature of families without a closed form.
pub const DEFAULT_QUAD_TOL: f64 = 1e-10;

/// Class parameters `S < 0` (street start) and `L > 1` (class bound).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvironmentParams {
    street_start: f64,
    class_bound: f64,
}

impl EnvironmentParams {
    /// Rejects non-finite values, `S >= 0`, `L <= 1`, and parameter pairs for
    /// which the class M(L) is empty (`L_low >= L`).
    pub fn new(street_start: f64, class_bound: f64) -> Result<Self> {
        let env = Self::new_unchecked_class(street_start, class_bound)?;
        if env.lower_bound() >= class_bound {
            return Err(Error::EmptyClass {
                lower: env.lower_bound(),
                upper: class_bound,
            });
        }
        Ok(env)
    }

    /// Like [`EnvironmentParams::new`] but allows an empty class.
    pub(crate) fn new_unchecked_class(street_start: f64, class_bound: f64) -> Result<Self> {
        if !street_start.is_finite() || street_start >= 0.0 {
            return Err(Error::invalid("S", format!("{street_start} must be finite and negative")));
        }
        if !class_bound.is_finite() || class_bound <= 1.0 {
            return Err(Error::invalid("L", format!("{class_bound} must be finite and > 1")));
        }
        Ok(Self {
            street_start,
            class_bound,
        })
    }

    /// `S`.
    pub fn street_start(&self) -> f64 {
        self.street_start
    }

    /// `L`.
    pub fn class_bound(&self) -> f64 {
        self.class_bound
    }

    /// `|S|`.
    pub fn street_length(&self) -> f64 {
        -self.street_start
    }

    /// `L_low = ln(2)/|S| + 1/L`, the class-wide lower bound on λ.
    pub fn lower_bound(&self) -> f64 {
        LN_2 / self.street_length() + 1.0 / self.class_bound
    }

    /// Smallest optimal threshold over the class, `-ln(2)/L_low`.
    pub fn min_optimal_threshold(&self) -> f64 {
        -LN_2 / self.lower_bound()
    }
}

/// A user-supplied intensity without analytic class bounds or antiderivative.
/// Such models are validated on a grid and integrated by quadrature.
pub trait IntensityFn: Send + Sync + fmt::Debug {
    fn value(&self, u: f64) -> f64;
    fn slope(&self, u: f64) -> f64;
    fn name(&self) -> String {
        "custom".to_owned()
    }
}

/// Parametric intensity shapes.
#[derive(Debug, Clone)]
pub enum Family {
    /// `λ(u) = rate`.
    Constant { rate: f64 },
    /// `λ(u) = base + amplitude·sin(frequency·u)`.
    Sinusoidal {
        base: f64,
        amplitude: f64,
        frequency: f64,
    },
    /// `λ(u) = base + amplitude·tanh((u − center)/width)`.
    TanhRamp {
        base: f64,
        amplitude: f64,
        center: f64,
        width: f64,
    },
    Custom(Arc<dyn IntensityFn>),
}

impl Family {
    fn check_params(&self) -> Result<()> {
        let finite = |name: &'static str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(name, format!("{v} is not finite")))
            }
        };
        match *self {
            Family::Constant { rate } => finite("rate", rate)?,
            Family::Sinusoidal {
                base,
                amplitude,
                frequency,
            } => {
                finite("base", base)?;
                finite("amplitude", amplitude)?;
                finite("frequency", frequency)?;
                if frequency <= 0.0 {
                    return Err(Error::invalid("frequency", "must be positive"));
                }
            }
            Family::TanhRamp {
                base,
                amplitude,
                center,
                width,
            } => {
                finite("base", base)?;
                finite("amplitude", amplitude)?;
                finite("center", center)?;
                finite("width", width)?;
                if width <= 0.0 {
                    return Err(Error::invalid("width", "must be positive"));
                }
            }
            Family::Custom(_) => {}
        }
        Ok(())
    }

    fn has_closed_form(&self) -> bool {
        !matches!(self, Family::Custom(_))
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Constant { rate } => write!(f, "constant({rate})"),
            Family::Sinusoidal {
                base,
                amplitude,
                frequency,
            } => write!(f, "sinusoidal({base}, {amplitude}, {frequency})"),
            Family::TanhRamp {
                base,
                amplitude,
                center,
                width,
            } => write!(f, "tanh_ramp({base}, {amplitude}, {center}, {width})"),
            Family::Custom(c) => write!(f, "{}", c.name()),
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    /// Parses `constant(r)`, `sinusoidal(A, B, ω)` or `tanh_ramp(base, amp, center, width)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let open = s
            .find('(')
            .ok_or_else(|| Error::Config(format!("intensity `{s}`: expected name(args)")))?;
        if !s.ends_with(')') {
            return Err(Error::Config(format!("intensity `{s}`: missing closing parenthesis")));
        }
        let name = s[..open].trim().to_ascii_lowercase();
        let args: Vec<f64> = s[open + 1..s.len() - 1]
            .split(',')
            .map(|a| {
                a.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Config(format!("intensity `{s}`: bad number `{}`", a.trim())))
            })
            .collect::<Result<_>>()?;
        let want = |n: usize| {
            if args.len() == n {
                Ok(())
            } else {
                Err(Error::Config(format!(
                    "intensity `{name}` takes {n} arguments, got {}",
                    args.len()
                )))
            }
        };
        match name.as_str() {
            "constant" => {
                want(1)?;
                Ok(Family::Constant { rate: args[0] })
            }
            "sinusoidal" => {
                want(3)?;
                Ok(Family::Sinusoidal {
                    base: args[0],
                    amplitude: args[1],
                    frequency: args[2],
                })
            }
            "tanh_ramp" => {
                want(4)?;
                Ok(Family::TanhRamp {
                    base: args[0],
                    amplitude: args[1],
                    center: args[2],
                    width: args[3],
                })
            }
            other => Err(Error::Config(format!("unknown intensity family `{other}`"))),
        }
    }
}

/// `ln cosh x` without overflow.
fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - LN_2
}

/// An intensity function bound to its environment. Immutable after construction.
#[derive(Debug, Clone)]
pub struct IntensityModel {
    family: Family,
    env: EnvironmentParams,
    quad_tol: f64,
}

impl IntensityModel {
    pub fn new(family: Family, env: EnvironmentParams) -> Result<Self> {
        family.check_params()?;
        Ok(Self {
            family,
            env,
            quad_tol: DEFAULT_QUAD_TOL,
        })
    }

    pub fn constant(rate: f64, env: EnvironmentParams) -> Result<Self> {
        Self::new(Family::Constant { rate }, env)
    }

    pub fn sinusoidal(base: f64, amplitude: f64, frequency: f64, env: EnvironmentParams) -> Result<Self> {
        Self::new(
            Family::Sinusoidal {
                base,
                amplitude,
                frequency,
            },
            env,
        )
    }

    /// Overrides the quadrature tolerance used for families without a closed form.
    pub fn with_quad_tol(mut self, quad_tol: f64) -> Result<Self> {
        if !(quad_tol.is_finite() && quad_tol > 0.0) {
            return Err(Error::invalid("quad_tol", "must be positive"));
        }
        self.quad_tol = quad_tol;
        Ok(self)
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn env(&self) -> &EnvironmentParams {
        &self.env
    }

    pub fn quad_tol(&self) -> f64 {
        self.quad_tol
    }

    /// The rate if the family is constant.
    pub fn constant_rate(&self) -> Option<f64> {
        match self.family {
            Family::Constant { rate } => Some(rate),
            _ => None,
        }
    }

    fn check_domain(&self, u: f64) -> Result<()> {
        if u >= self.env.street_start && u.is_finite() {
            Ok(())
        } else {
            Err(Error::Domain {
                position: u,
                lower: self.env.street_start,
                upper: f64::INFINITY,
            })
        }
    }

    /// `λ(u)` for `u ≥ S`.
    pub fn evaluate(&self, u: f64) -> Result<f64> {
        self.check_domain(u)?;
        Ok(self.rate(u))
    }

    /// `λ'(u)` for `u ≥ S`.
    pub fn derivative(&self, u: f64) -> Result<f64> {
        self.check_domain(u)?;
        Ok(self.slope(u))
    }

    /// `A(y) = ∫_0^y λ(u) du` for `y ≥ S`.
    pub fn cumulative(&self, y: f64) -> Result<f64> {
        self.check_domain(y)?;
        Ok(self.antiderivative(y))
    }

    /// `Λ(y) = ∫_y^0 λ(u) du` for `y ∈ [S, 0]`.
    pub fn integrated_intensity(&self, y: f64) -> Result<f64> {
        if !(self.env.street_start..=0.0).contains(&y) {
            return Err(Error::Domain {
                position: y,
                lower: self.env.street_start,
                upper: 0.0,
            });
        }
        Ok(-self.antiderivative(y))
    }

    #[inline]
    pub(crate) fn rate(&self, u: f64) -> f64 {
        match &self.family {
            Family::Constant { rate } => *rate,
            Family::Sinusoidal {
                base,
                amplitude,
                frequency,
            } => base + amplitude * (frequency * u).sin(),
            Family::TanhRamp {
                base,
                amplitude,
                center,
                width,
            } => base + amplitude * ((u - center) / width).tanh(),
            Family::Custom(c) => c.value(u),
        }
    }

    #[inline]
    pub(crate) fn slope(&self, u: f64) -> f64 {
        match &self.family {
            Family::Constant { .. } => 0.0,
            Family::Sinusoidal {
                amplitude,
                frequency,
                ..
            } => amplitude * frequency * (frequency * u).cos(),
            Family::TanhRamp {
                amplitude,
                center,
                width,
                ..
            } => {
                let c = ((u - center) / width).cosh();
                amplitude / (width * c * c)
            }
            Family::Custom(c) => c.slope(u),
        }
    }

    #[inline]
    pub(crate) fn antiderivative(&self, y: f64) -> f64 {
        match &self.family {
            Family::Constant { rate } => rate * y,
            Family::Sinusoidal {
                base,
                amplitude,
                frequency,
            } => base * y + amplitude / frequency * (1.0 - (frequency * y).cos()),
            Family::TanhRamp {
                base,
                amplitude,
                center,
                width,
            } => {
                base * y
                    + amplitude * width * (ln_cosh((y - center) / width) - ln_cosh(-center / width))
            }
            Family::Custom(_) => adaptive_simpson(|u| self.rate(u), 0.0, y, self.quad_tol),
        }
    }

    /// Checks membership in M(L). See [`validate_class`].
    pub fn validate(&self) -> ValidationReport {
        validate_class(self)
    }
}

/// The class property a model violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassProperty {
    /// Property 2: `λ ≥ ln(2)/|S| + 1/L`.
    LowerBound,
    /// Property 3: `λ ≤ L`.
    UpperBound,
    /// Property 3: `|λ'| ≤ L`.
    SlopeBound,
}

impl fmt::Display for ClassProperty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassProperty::LowerBound => write!(f, "property 2 (lambda >= ln(2)/|S| + 1/L)"),
            ClassProperty::UpperBound => write!(f, "property 3 (lambda <= L)"),
            ClassProperty::SlopeBound => write!(f, "property 3 (|lambda'| <= L)"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckMethod {
    Analytic,
    GridVerified,
}

impl fmt::Display for CheckMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckMethod::Analytic => write!(f, "analytic"),
            CheckMethod::GridVerified => write!(f, "grid-verified"),
        }
    }
}

/// One failed class property. `witness` is a position where the extreme
/// value is attained, or `+∞` when it is only approached in the tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub property: ClassProperty,
    pub witness: f64,
    pub value: f64,
    pub limit: f64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} violated at u = {}: value {} vs limit {}",
            self.property, self.witness, self.value, self.limit
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub method: CheckMethod,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        match self.violations.first() {
            None => Ok(()),
            Some(v) => Err(Error::ClassViolation(v.to_string())),
        }
    }
}

/// Smallest `u ≥ start` with `ω·u ≡ phase (mod period)`.
fn next_phase(start: f64, frequency: f64, phase: f64, period: f64) -> f64 {
    let k = ((frequency * start - phase) / period).ceil();
    (phase + period * k) / frequency
}

/// Extremes of a family on `[S, ∞)`: (inf, witness), (sup, witness), (sup |λ'|, witness).
type Extremes = ((f64, f64), (f64, f64), (f64, f64));

fn analytic_extremes(family: &Family, s: f64) -> Option<Extremes> {
    match *family {
        Family::Constant { rate } => Some(((rate, s), (rate, s), (0.0, s))),
        Family::Sinusoidal {
            base,
            amplitude,
            frequency,
        } => {
            let b = amplitude.abs();
            if b == 0.0 {
                return Some(((base, s), (base, s), (0.0, s)));
            }
            // sin peaks at π/2, bottoms at 3π/2; a negative amplitude swaps them.
            let (low_phase, high_phase) = if amplitude > 0.0 {
                (1.5 * PI, 0.5 * PI)
            } else {
                (0.5 * PI, 1.5 * PI)
            };
            Some((
                (base - b, next_phase(s, frequency, low_phase, 2.0 * PI)),
                (base + b, next_phase(s, frequency, high_phase, 2.0 * PI)),
                (b * frequency, next_phase(s, frequency, 0.0, PI)),
            ))
        }
        Family::TanhRamp {
            base,
            amplitude,
            center,
            width,
        } => {
            let at_start = base + amplitude * ((s - center) / width).tanh();
            let at_tail = base + amplitude;
            let peak = center.max(s);
            let c = ((peak - center) / width).cosh();
            let slope = (amplitude / (width * c * c)).abs();
            if amplitude >= 0.0 {
                Some(((at_start, s), (at_tail, f64::INFINITY), (slope, peak)))
            } else {
                Some(((at_tail, f64::INFINITY), (at_start, s), (slope, peak)))
            }
        }
        Family::Custom(_) => None,
    }
}

/// Grid spacing factor (times |S|) of the fallback check.
pub const GRID_STEP_FACTOR: f64 = 1e-3;
/// The fallback grid covers `[S, S + GRID_SPAN_FACTOR·|S|]`.
pub const GRID_SPAN_FACTOR: f64 = 50.0;

fn grid_extremes(model: &IntensityModel) -> Extremes {
    let s = model.env.street_start;
    let step = GRID_STEP_FACTOR * model.env.street_length();
    let n = (GRID_SPAN_FACTOR / GRID_STEP_FACTOR).round() as usize;
    let mut lo = (f64::INFINITY, s);
    let mut hi = (f64::NEG_INFINITY, s);
    let mut sl = (0.0, s);
    for i in 0..=n {
        let u = s + step * i as f64;
        let v = model.rate(u);
        let d = model.slope(u).abs();
        if v < lo.0 {
            lo = (v, u);
        }
        if v > hi.0 {
            hi = (v, u);
        }
        if d > sl.0 {
            sl = (d, u);
        }
    }
    (lo, hi, sl)
}

/// Checks the three defining properties of M(L). Closed-form families are
/// checked analytically on their parameters; custom intensities on a dense
/// grid over `[S, S + 50|S|]`.
pub fn validate_class(model: &IntensityModel) -> ValidationReport {
    let env = model.env;
    let (method, (lo, hi, sl)) = match analytic_extremes(&model.family, env.street_start) {
        Some(ext) => (CheckMethod::Analytic, ext),
        None => (CheckMethod::GridVerified, grid_extremes(model)),
    };
    let mut violations = Vec::new();
    let lower = env.lower_bound();
    let upper = env.class_bound;
    if lo.0 < lower || lo.0.is_nan() {
        violations.push(Violation {
            property: ClassProperty::LowerBound,
            witness: lo.1,
            value: lo.0,
            limit: lower,
        });
    }
    if hi.0 > upper || hi.0.is_nan() {
        violations.push(Violation {
            property: ClassProperty::UpperBound,
            witness: hi.1,
            value: hi.0,
            limit: upper,
        });
    }
    if sl.0 > upper || sl.0.is_nan() {
        violations.push(Violation {
            property: ClassProperty::SlopeBound,
            witness: sl.1,
            value: sl.0,
            limit: upper,
        });
    }
    ValidationReport { method, violations }
}

impl IntensityModel {
    /// True when the cumulative integral is available in closed form.
    pub fn has_closed_form(&self) -> bool {
        self.family.has_closed_form()
    }
}
