//! Closed intervals over MPFR floats with outward rounding.
//!
//! Every operation rounds the lower endpoint toward -inf and the upper
//! endpoint toward +inf, so the result contains the exact value whenever the
//! operands contain theirs. Operations that leave the domain (division by an
//! interval containing zero, logarithm of a non-positive number) return the
//! whole extended line rather than failing; such enclosures never decide a
//! strict inequality.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rug::float::{Round, Special};
use rug::ops::{AssignRound, Pow};
use rug::{Float, Rational};

#[derive(Clone, PartialEq)]
pub struct Interval {
    lo: Float,
    hi: Float,
}

pub type Enclosure = Interval;

fn down<T>(prec: u32, v: T) -> Float
where
    Float: AssignRound<T, Round = Round, Ordering = Ordering>,
{
    Float::with_val_round(prec, v, Round::Down).0
}

fn up<T>(prec: u32, v: T) -> Float
where
    Float: AssignRound<T, Round = Round, Ordering = Ordering>,
{
    Float::with_val_round(prec, v, Round::Up).0
}

fn min_of(v: [Float; 4]) -> Float {
    v.into_iter().reduce(|a, b| if b < a { b } else { a }).unwrap()
}

fn max_of(v: [Float; 4]) -> Float {
    v.into_iter().reduce(|a, b| if b > a { b } else { a }).unwrap()
}

impl Interval {
    /// Builds `[lo, hi]`; panics if `lo > hi` or either endpoint is NaN.
    pub fn new(lo: Float, hi: Float) -> Self {
        assert!(!lo.is_nan() && !hi.is_nan(), "NaN interval endpoint");
        assert!(lo <= hi, "interval endpoints out of order");
        Interval { lo, hi }
    }

    pub fn entire(prec: u32) -> Self {
        Interval {
            lo: Float::with_val(prec, Special::NegInfinity),
            hi: Float::with_val(prec, Special::Infinity),
        }
    }

    pub fn from_rational(prec: u32, r: &Rational) -> Self {
        Interval { lo: down(prec, r), hi: up(prec, r) }
    }

    pub fn from_int(prec: u32, n: i64) -> Self {
        Interval { lo: down(prec, n), hi: up(prec, n) }
    }

    pub fn from_f64(prec: u32, x: f64) -> Self {
        Interval { lo: down(prec, x), hi: up(prec, x) }
    }

    /// `[a, b]` for rational endpoints `a <= b`.
    pub fn hull_rational(prec: u32, a: &Rational, b: &Rational) -> Self {
        assert!(a <= b);
        Interval { lo: down(prec, a), hi: up(prec, b) }
    }

    pub fn prec(&self) -> u32 {
        self.lo.prec().max(self.hi.prec())
    }

    pub fn lo(&self) -> &Float {
        &self.lo
    }

    pub fn hi(&self) -> &Float {
        &self.hi
    }

    /// Lower endpoint rounded down to `f64`.
    pub fn lo_f64(&self) -> f64 {
        self.lo.to_f64_round(Round::Down)
    }

    /// Upper endpoint rounded up to `f64`.
    pub fn hi_f64(&self) -> f64 {
        self.hi.to_f64_round(Round::Up)
    }

    pub fn mid_f64(&self) -> f64 {
        if !self.is_bounded() {
            return f64::NAN;
        }
        let m = Float::with_val(self.prec() + 1, &self.lo + &self.hi) / 2u32;
        m.to_f64()
    }

    /// Upper bound on `hi - lo` as an `f64`.
    pub fn width(&self) -> f64 {
        if !self.is_bounded() {
            return f64::INFINITY;
        }
        up(self.prec(), &self.hi - &self.lo).to_f64_round(Round::Up)
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn contains_f64(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_rational(&self, r: &Rational) -> bool {
        self.lo <= *r && self.hi >= *r
    }

    pub fn contains_zero(&self) -> bool {
        self.lo <= 0 && self.hi >= 0
    }

    pub fn intersects(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// Certified `self < other`: every point of `self` lies below every
    /// point of `other`.
    pub fn certainly_lt(&self, other: &Interval) -> bool {
        self.hi < other.lo
    }

    /// Certified `!(self < other)`: no choice of points makes `self < other`.
    pub fn certainly_not_lt(&self, other: &Interval) -> bool {
        self.lo >= other.hi
    }

    pub fn certainly_positive(&self) -> bool {
        self.lo > 0
    }

    pub fn certainly_negative(&self) -> bool {
        self.hi < 0
    }

    /// Smallest interval containing both operands.
    pub fn hull(&self, other: &Interval) -> Interval {
        let prec = self.prec().max(other.prec());
        let lo = if self.lo <= other.lo { &self.lo } else { &other.lo };
        let hi = if self.hi >= other.hi { &self.hi } else { &other.hi };
        Interval { lo: down(prec, lo), hi: up(prec, hi) }
    }

    /// `self + [0, t.hi]` for a non-negative bound `t`.
    pub fn widen_up(&self, t: &Interval) -> Interval {
        let prec = self.prec();
        let extra = if t.hi > 0 { up(prec, &self.hi + &t.hi) } else { self.hi.clone() };
        Interval { lo: self.lo.clone(), hi: extra }
    }

    pub fn sqr(&self) -> Interval {
        self.clone().mul(self.clone()).clamp_nonneg()
    }

    fn clamp_nonneg(mut self) -> Interval {
        if self.lo < 0 {
            self.lo = Float::with_val(self.lo.prec(), 0);
        }
        self
    }

    pub fn ln(&self) -> Interval {
        let prec = self.prec();
        if self.hi <= 0 {
            return Interval::entire(prec);
        }
        let hi = up(prec, self.hi.ln_ref());
        let lo = if self.lo <= 0 {
            Float::with_val(prec, Special::NegInfinity)
        } else {
            down(prec, self.lo.ln_ref())
        };
        Interval { lo, hi }
    }

    /// `ln(1 + self)`, accurate when `self` is tiny.
    pub fn ln_1p(&self) -> Interval {
        let prec = self.prec();
        if self.hi <= -1 {
            return Interval::entire(prec);
        }
        let hi = up(prec, self.hi.ln_1p_ref());
        let lo = if self.lo <= -1 {
            Float::with_val(prec, Special::NegInfinity)
        } else {
            down(prec, self.lo.ln_1p_ref())
        };
        Interval { lo, hi }
    }

    pub fn exp(&self) -> Interval {
        let prec = self.prec();
        Interval { lo: down(prec, self.lo.exp_ref()), hi: up(prec, self.hi.exp_ref()) }
    }

    pub fn sqrt(&self) -> Interval {
        let prec = self.prec();
        if self.hi < 0 {
            return Interval::entire(prec);
        }
        let lo = if self.lo <= 0 { Float::with_val(prec, 0) } else { down(prec, self.lo.sqrt_ref()) };
        Interval { lo, hi: up(prec, self.hi.sqrt_ref()) }
    }

    pub fn powi(&self, n: u32) -> Interval {
        let prec = self.prec();
        if n == 0 {
            return Interval::from_int(prec, 1);
        }
        if self.lo >= 0 {
            return Interval {
                lo: down(prec, (&self.lo).pow(n)),
                hi: up(prec, (&self.hi).pow(n)),
            };
        }
        if self.hi <= 0 {
            let flipped = (-self.clone()).powi(n);
            return if n % 2 == 0 { flipped } else { -flipped };
        }
        // straddles zero
        let a = up(prec, (&self.lo).pow(n));
        let b = up(prec, (&self.hi).pow(n));
        if n % 2 == 0 {
            let hi = if a > b { a } else { b };
            Interval { lo: Float::with_val(prec, 0), hi }
        } else {
            Interval { lo: down(prec, (&self.lo).pow(n)), hi: b }
        }
    }

    /// `self ^ e` for `self > 0`. The function is monotone in each argument
    /// on the positive base, so the extremes sit at the corners.
    pub fn pow(&self, e: &Interval) -> Interval {
        let prec = self.prec().max(e.prec());
        if self.lo <= 0 || !e.is_bounded() || !self.is_bounded() {
            return Interval::entire(prec);
        }
        let corners = |r: Round| {
            [
                Float::with_val_round(prec, (&self.lo).pow(&e.lo), r).0,
                Float::with_val_round(prec, (&self.lo).pow(&e.hi), r).0,
                Float::with_val_round(prec, (&self.hi).pow(&e.lo), r).0,
                Float::with_val_round(prec, (&self.hi).pow(&e.hi), r).0,
            ]
        };
        Interval { lo: min_of(corners(Round::Down)), hi: max_of(corners(Round::Up)) }
    }

    fn sanitize(lo: Float, hi: Float, prec: u32) -> Interval {
        if lo.is_nan() || hi.is_nan() {
            Interval::entire(prec)
        } else {
            Interval { lo, hi }
        }
    }
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, rhs: Interval) -> Interval {
        let prec = self.prec().max(rhs.prec());
        let lo = down(prec, &self.lo + &rhs.lo);
        let hi = up(prec, &self.hi + &rhs.hi);
        Interval::sanitize(lo, hi, prec)
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, rhs: Interval) -> Interval {
        let prec = self.prec().max(rhs.prec());
        let lo = down(prec, &self.lo - &rhs.hi);
        let hi = up(prec, &self.hi - &rhs.lo);
        Interval::sanitize(lo, hi, prec)
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, rhs: Interval) -> Interval {
        let prec = self.prec().max(rhs.prec());
        if self.lo >= 0 && rhs.lo >= 0 && self.is_bounded() && rhs.is_bounded() {
            return Interval { lo: down(prec, &self.lo * &rhs.lo), hi: up(prec, &self.hi * &rhs.hi) };
        }
        let products = |r: Round| {
            [
                Float::with_val_round(prec, &self.lo * &rhs.lo, r).0,
                Float::with_val_round(prec, &self.lo * &rhs.hi, r).0,
                Float::with_val_round(prec, &self.hi * &rhs.lo, r).0,
                Float::with_val_round(prec, &self.hi * &rhs.hi, r).0,
            ]
        };
        let lows = products(Round::Down);
        let highs = products(Round::Up);
        if lows.iter().chain(&highs).any(|f| f.is_nan()) {
            return Interval::entire(prec);
        }
        Interval { lo: min_of(lows), hi: max_of(highs) }
    }
}

impl Div for Interval {
    type Output = Interval;
    fn div(self, rhs: Interval) -> Interval {
        let prec = self.prec().max(rhs.prec());
        if rhs.contains_zero() {
            return Interval::entire(prec);
        }
        if self.lo >= 0 && rhs.lo > 0 && self.is_bounded() && rhs.is_bounded() {
            return Interval { lo: down(prec, &self.lo / &rhs.hi), hi: up(prec, &self.hi / &rhs.lo) };
        }
        let quotients = |r: Round| {
            [
                Float::with_val_round(prec, &self.lo / &rhs.lo, r).0,
                Float::with_val_round(prec, &self.lo / &rhs.hi, r).0,
                Float::with_val_round(prec, &self.hi / &rhs.lo, r).0,
                Float::with_val_round(prec, &self.hi / &rhs.hi, r).0,
            ]
        };
        let lows = quotients(Round::Down);
        let highs = quotients(Round::Up);
        if lows.iter().chain(&highs).any(|f| f.is_nan()) {
            return Interval::entire(prec);
        }
        Interval { lo: min_of(lows), hi: max_of(highs) }
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval { lo: -self.hi, hi: -self.lo }
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo_f64(), self.hi_f64())
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 128;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn rational_enclosure_is_tight_and_correct() {
        let third = Interval::from_rational(P, &rat(1, 3));
        assert!(third.contains_rational(&rat(1, 3)));
        assert!(third.width() < 1e-37);
        assert!(!third.contains_rational(&(rat(1, 3) + rat(1, 1_000_000_000_000))));
    }

    #[test]
    fn arithmetic_contains_exact_results() {
        let a = Interval::from_rational(P, &rat(1, 3));
        let b = Interval::from_rational(P, &rat(-2, 7));
        assert!((a.clone() + b.clone()).contains_rational(&rat(1, 21)));
        assert!((a.clone() - b.clone()).contains_rational(&rat(13, 21)));
        assert!((a.clone() * b.clone()).contains_rational(&rat(-2, 21)));
        assert!((a.clone() / b.clone()).contains_rational(&rat(-7, 6)));
        assert!(b.powi(3).contains_rational(&rat(-8, 343)));
        assert!(b.powi(2).contains_rational(&rat(4, 49)));
    }

    #[test]
    fn division_by_zero_interval_is_entire() {
        let a = Interval::from_int(P, 1);
        let z = Interval::new(Float::with_val(P, -1), Float::with_val(P, 1));
        assert!(!(a / z).is_bounded());
    }

    #[test]
    fn elementary_functions_enclose_mpfr_values() {
        let x = Interval::from_rational(P, &rat(117, 1000));
        let l = x.ln();
        assert!(l.contains_f64(-2.145581344184381) || l.width() < 1e-30);
        assert!(l.lo() < &-2.1455813441 && l.hi() > &-2.1455813442);
        let e = l.exp();
        assert!(e.contains_rational(&rat(117, 1000)));
        let s = Interval::from_int(P, 5).sqrt();
        assert!(s.sqr().contains_rational(&rat(5, 1)));
        let p = x.pow(&Interval::from_rational(P, &rat(1, 2)));
        assert!(p.sqr().contains_rational(&rat(117, 1000)));
    }

    #[test]
    fn strict_comparisons() {
        let a = Interval::from_rational(P, &rat(1, 3));
        let b = Interval::from_rational(P, &rat(1, 2));
        assert!(a.certainly_lt(&b));
        assert!(!b.certainly_lt(&a));
        assert!(!a.certainly_lt(&a));
        assert!(a.hull(&b).contains_rational(&rat(2, 5)));
    }
}
