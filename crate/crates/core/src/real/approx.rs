//! Native double evaluation with a running heuristic error estimate.
//!
//! Each operation adds `ULPS_PER_OP` units in the last place of its result to
//! the propagated error. The estimate is not a proof; values from this type
//! never feed a certificate.

use std::ops::{Add, Div, Mul, Neg, Sub};

pub const ULPS_PER_OP: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Approx {
    pub value: f64,
    pub err: f64,
}

fn rounding(v: f64) -> f64 {
    ULPS_PER_OP * f64::EPSILON * v.abs()
}

impl Approx {
    pub fn exact(value: f64) -> Self {
        Approx { value, err: 0.0 }
    }

    fn op(value: f64, propagated: f64) -> Self {
        Approx { value, err: propagated + rounding(value) }
    }

    pub fn lo(&self) -> f64 {
        self.value - self.err
    }

    pub fn hi(&self) -> f64 {
        self.value + self.err
    }

    pub fn ln(self) -> Self {
        let rel = if self.err < self.value.abs() {
            self.err / (self.value.abs() - self.err)
        } else {
            f64::INFINITY
        };
        Approx::op(self.value.ln(), rel)
    }

    pub fn ln_1p(self) -> Self {
        let base = 1.0 + self.value;
        let rel = if self.err < base { self.err / (base - self.err) } else { f64::INFINITY };
        Approx::op(self.value.ln_1p(), rel)
    }

    pub fn exp(self) -> Self {
        let v = self.value.exp();
        Approx::op(v, v * self.err.exp_m1())
    }

    pub fn sqrt(self) -> Self {
        let v = self.value.sqrt();
        let e = if v > 0.0 { self.err / (2.0 * v) } else { self.err.sqrt() };
        Approx::op(v, e)
    }

    pub fn powi(self, n: u32) -> Self {
        let v = self.value.powi(n as i32);
        let rel = if self.value != 0.0 { self.err / self.value.abs() } else { 0.0 };
        Approx::op(v, v.abs() * ((n as f64) * rel).exp_m1())
    }

    pub fn powf(self, e: Self) -> Self {
        (e * self.ln()).exp()
    }
}

impl Add for Approx {
    type Output = Approx;
    fn add(self, rhs: Approx) -> Approx {
        Approx::op(self.value + rhs.value, self.err + rhs.err)
    }
}

impl Sub for Approx {
    type Output = Approx;
    fn sub(self, rhs: Approx) -> Approx {
        Approx::op(self.value - rhs.value, self.err + rhs.err)
    }
}

impl Mul for Approx {
    type Output = Approx;
    fn mul(self, rhs: Approx) -> Approx {
        let e = self.value.abs() * rhs.err + rhs.value.abs() * self.err + self.err * rhs.err;
        Approx::op(self.value * rhs.value, e)
    }
}

impl Div for Approx {
    type Output = Approx;
    fn div(self, rhs: Approx) -> Approx {
        let v = self.value / rhs.value;
        let margin = rhs.value.abs() - rhs.err;
        let e = if margin > 0.0 {
            (self.err + v.abs() * rhs.err) / margin
        } else {
            f64::INFINITY
        };
        Approx::op(v, e)
    }
}

impl Neg for Approx {
    type Output = Approx;
    fn neg(self) -> Approx {
        Approx { value: -self.value, err: self.err }
    }
}
