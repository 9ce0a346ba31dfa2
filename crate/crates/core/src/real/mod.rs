//! Scalar back ends shared by every evaluator.
//!
//! Formulas are written once against [`Real`] and run either on [`Approx`]
//! (fast doubles, heuristic error) or on [`Interval`] (MPFR with outward
//! rounding, certified).

mod approx;
pub mod constants;
mod interval;

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rug::Rational;
use serde::{Deserialize, Serialize};

pub use approx::{Approx, ULPS_PER_OP};
pub use interval::{Enclosure, Interval};

/// Working precision for certified evaluation when nothing else is asked for.
pub const DEFAULT_PRECISION: u32 = 128;
/// Ceiling for on-demand precision doubling.
pub const MAX_PRECISION: u32 = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Fast,
    Certified,
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "fast" => Ok(Mode::Fast),
            "certified" => Ok(Mode::Certified),
            other => Err(format!("unknown mode '{other}' (expected fast|certified)")),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Fast => "fast",
            Mode::Certified => "certified",
        })
    }
}

/// Ordered-field operations plus the few elementary functions the formulas
/// need. Constructors take `&self` as the context (precision) carrier.
pub trait Real:
    Clone
    + Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn int(&self, n: i64) -> Self;
    fn rat(&self, r: &Rational) -> Self;
    fn ln(&self) -> Self;
    /// `ln(1 + self)`.
    fn ln_1p(&self) -> Self;
    fn exp(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn powi(&self, n: u32) -> Self;
    /// `self ^ e` for positive `self`.
    fn pow(&self, e: &Self) -> Self;
    fn euler_gamma(&self) -> Self;
    /// `self + [0, t]` for a non-negative remainder bound `t`.
    fn add_remainder(&self, t: &Self) -> Self;
    /// Point estimate used for control flow (never for certification).
    fn estimate(&self) -> f64;
    /// Outward-rounded enclosure in the certified sense for intervals, and
    /// `value ± err` for the fast back end.
    fn to_enclosure(&self) -> Interval;

    fn ratio(&self, n: i64, d: i64) -> Self {
        self.rat(&Rational::from((n, d)))
    }
}

impl Real for Interval {
    fn int(&self, n: i64) -> Self {
        Interval::from_int(self.prec(), n)
    }
    fn rat(&self, r: &Rational) -> Self {
        Interval::from_rational(self.prec(), r)
    }
    fn ln(&self) -> Self {
        Interval::ln(self)
    }
    fn ln_1p(&self) -> Self {
        Interval::ln_1p(self)
    }
    fn exp(&self) -> Self {
        Interval::exp(self)
    }
    fn sqrt(&self) -> Self {
        Interval::sqrt(self)
    }
    fn powi(&self, n: u32) -> Self {
        Interval::powi(self, n)
    }
    fn pow(&self, e: &Self) -> Self {
        Interval::pow(self, e)
    }
    fn euler_gamma(&self) -> Self {
        let (lo, hi) = constants::euler_gamma_bounds();
        Interval::hull_rational(self.prec(), &lo, &hi)
    }
    fn add_remainder(&self, t: &Self) -> Self {
        self.widen_up(t)
    }
    fn estimate(&self) -> f64 {
        self.mid_f64()
    }
    fn to_enclosure(&self) -> Interval {
        self.clone()
    }
}

impl Real for Approx {
    fn int(&self, n: i64) -> Self {
        Approx::exact(n as f64)
    }
    fn rat(&self, r: &Rational) -> Self {
        let v = r.to_f64();
        Approx { value: v, err: f64::EPSILON * v.abs() }
    }
    fn ln(&self) -> Self {
        Approx::ln(*self)
    }
    fn ln_1p(&self) -> Self {
        Approx::ln_1p(*self)
    }
    fn exp(&self) -> Self {
        Approx::exp(*self)
    }
    fn sqrt(&self) -> Self {
        Approx::sqrt(*self)
    }
    fn powi(&self, n: u32) -> Self {
        Approx::powi(*self, n)
    }
    fn pow(&self, e: &Self) -> Self {
        Approx::powf(*self, *e)
    }
    fn euler_gamma(&self) -> Self {
        Approx { value: 0.577_215_664_901_532_9, err: f64::EPSILON }
    }
    fn add_remainder(&self, t: &Self) -> Self {
        let half = 0.5 * t.hi().max(0.0);
        Approx { value: self.value + half, err: self.err + half }
    }
    fn estimate(&self) -> f64 {
        self.value
    }
    fn to_enclosure(&self) -> Interval {
        let lo = if self.err.is_finite() { self.lo().next_down() } else { f64::NEG_INFINITY };
        let hi = if self.err.is_finite() { self.hi().next_up() } else { f64::INFINITY };
        if lo.is_nan() || hi.is_nan() {
            return Interval::entire(53);
        }
        Interval::new(rug::Float::with_val(53, lo), rug::Float::with_val(53, hi))
    }
}
