//! Numerical evaluation of `T`, `psi_q`, `H`, `F` with proven truncation
//! bounds, and checkers for the double inequalities built on them.
//!
//! Truncation remainders (all terms are positive for `0 < q < 1`):
//!
//! * Lambert: `sum_{k>K} q^k/(1-q^k) <= q^(K+1) / ((1-q)(1-q^(K+1)))`
//! * divisor: `d(k) <= k` and `sum_{k>K} k q^k = q^(K+1) ((K+1) - K q) / (1-q)^2`
//! * Clausen: `<= (1+q)/(1-q) * q^((K+1)^2) / (1 - q^(2K+3))`
//! * psi series: `sum_{k>K} q^(kx)/(1-q^k) <= q^((K+1)x) / ((1-q^(K+1))(1-q^x))`

use std::fmt;
use std::str::FromStr;

use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::divisor::divisor_sieve;
use crate::error::{Error, Result};
use crate::real::constants::parse_number;
use crate::real::{Approx, Interval, Mode, Real, DEFAULT_PRECISION, MAX_PRECISION};
use crate::series::RepresentationId;

pub const DEFAULT_TERM_BUDGET: usize = 10_000_000;

/// A point of the open unit interval, held exactly.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct QPoint(Rational);

impl QPoint {
    pub fn new(q: Rational) -> Result<Self> {
        if q > 0 && q < 1 {
            Ok(QPoint(q))
        } else {
            Err(Error::Domain(format!("q = {} is outside (0, 1)", q.to_f64())))
        }
    }

    pub fn from_ratio(n: i64, d: i64) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidArgument("zero denominator".into()));
        }
        Self::new(Rational::from((n, d)))
    }

    /// Exact value of the double `q`.
    pub fn from_f64(q: f64) -> Result<Self> {
        let r = Rational::from_f64(q)
            .ok_or_else(|| Error::Domain(format!("q = {q} is not finite")))?;
        Self::new(r)
    }

    pub fn rational(&self) -> &Rational {
        &self.0
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    pub fn enclosure(&self, prec: u32) -> Interval {
        Interval::from_rational(prec, &self.0)
    }

    pub fn approx(&self) -> Approx {
        Approx::exact(0.0).rat(&self.0)
    }
}

impl FromStr for QPoint {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let r = parse_number(s)
            .ok_or_else(|| Error::InvalidArgument(format!("'{s}' is not a number")))?;
        QPoint::new(r)
    }
}

impl fmt::Display for QPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.to_f64())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeriesSource {
    Representation(RepresentationId),
    PsiFormula,
}

impl fmt::Display for SeriesSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeriesSource::Representation(r) => write!(f, "{r}"),
            SeriesSource::PsiFormula => f.write_str("PSI_FORMULA"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct EvalReport {
    pub value: Interval,
    pub representation: SeriesSource,
    pub terms_used: usize,
    /// Upper bound on the omitted remainder of the series.
    pub tail_bound: f64,
    pub mode: Mode,
    /// Working precision in bits (53 in fast mode).
    pub precision: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    /// Target enclosure width in certified mode.
    pub eps: f64,
    pub mode: Mode,
    pub precision: u32,
    pub max_precision: u32,
    pub term_budget: usize,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            eps: 1e-15,
            mode: Mode::Certified,
            precision: DEFAULT_PRECISION,
            max_precision: MAX_PRECISION,
            term_budget: DEFAULT_TERM_BUDGET,
        }
    }
}

impl EvalOptions {
    pub fn fast() -> Self {
        EvalOptions { mode: Mode::Fast, ..Default::default() }
    }

    pub fn certified() -> Self {
        EvalOptions::default()
    }

    pub fn with_eps(self, eps: f64) -> Self {
        EvalOptions { eps, ..self }
    }

    fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0) {
            return Err(Error::InvalidArgument(format!("eps must be positive, got {}", self.eps)));
        }
        if self.precision < 2 || self.precision > self.max_precision {
            return Err(Error::InvalidArgument(format!(
                "precision {} outside [2, {}]",
                self.precision, self.max_precision
            )));
        }
        Ok(())
    }

    /// Working precisions tried in certified mode: start, then doublings.
    fn precisions(&self) -> impl Iterator<Item = u32> + '_ {
        std::iter::successors(Some(self.precision), |p| p.checked_mul(2))
            .take_while(|p| *p <= self.max_precision)
    }
}

/// A truncated series value with its rigorous remainder already folded in.
#[derive(Debug, Clone)]
pub struct SeriesValue<R> {
    pub value: R,
    pub terms: usize,
    pub tail: R,
}

fn estimate_q<R: Real>(q: &R) -> Result<f64> {
    let qf = q.estimate();
    if qf > 0.0 && qf < 1.0 {
        Ok(qf)
    } else {
        Err(Error::Domain(format!("q = {qf} is outside (0, 1)")))
    }
}

/// Number of terms `K` until `tail(K) <= target`, bounded by the budget.
fn choose_terms(qf: f64, target: f64, budget: usize, tail: impl Fn(f64, usize) -> f64) -> Result<usize> {
    // geometric decay estimate: the remainder shrinks roughly like q^K
    let rough = ((target * (1.0 - qf).powi(2)).ln() / qf.ln()).max(1.0);
    if rough.is_finite() && rough > 4.0 * budget as f64 {
        return Err(Error::TermBudget { budget, needed: rough as usize });
    }
    let mut k = 1usize;
    while tail(qf, k) > target {
        k += 1;
        if k > budget {
            return Err(Error::TermBudget { budget, needed: rough.max(k as f64) as usize });
        }
    }
    Ok(k)
}

fn lambert_tail_f64(q: f64, k: usize) -> f64 {
    let qk1 = q.powf(k as f64 + 1.0);
    qk1 / ((1.0 - q) * (1.0 - qk1))
}

fn divisor_tail_f64(q: f64, k: usize) -> f64 {
    let kf = k as f64;
    q.powf(kf + 1.0) * ((kf + 1.0) - kf * q) / (1.0 - q).powi(2)
}

fn clausen_tail_f64(q: f64, k: usize) -> f64 {
    let kf = k as f64;
    (1.0 + q) / (1.0 - q) * q.powf((kf + 1.0) * (kf + 1.0)) / (1.0 - q.powf(2.0 * kf + 3.0))
}

/// `T(q)` from one of the numerically usable routes, remainder included.
pub fn t_series<R: Real>(
    q: &R,
    repr: RepresentationId,
    tail_target: f64,
    budget: usize,
) -> Result<SeriesValue<R>> {
    let qf = estimate_q(q)?;
    let one = q.int(1);
    let one_minus_q = one.clone() - q.clone();
    match repr {
        RepresentationId::Lambert => {
            let k_max = choose_terms(qf, tail_target, budget, lambert_tail_f64)?;
            let mut sum = q.int(0);
            let mut qk = q.clone();
            for _ in 1..=k_max {
                sum = sum + qk.clone() / (one.clone() - qk.clone());
                qk = qk * q.clone();
            }
            // qk = q^(K+1)
            let tail = qk.clone() / (one_minus_q * (one - qk));
            Ok(SeriesValue { value: sum.add_remainder(&tail), terms: k_max, tail })
        }
        RepresentationId::Divisor => {
            let k_max = choose_terms(qf, tail_target, budget, divisor_tail_f64)?;
            let table = divisor_sieve(k_max)?;
            let mut sum = q.int(0);
            let mut qk = q.clone();
            for &d in table.as_slice() {
                sum = sum + q.int(d as i64) * qk.clone();
                qk = qk * q.clone();
            }
            let k = k_max as i64;
            let tail = qk * (q.int(k + 1) - q.int(k) * q.clone())
                / (one_minus_q.clone() * one_minus_q);
            Ok(SeriesValue { value: sum.add_remainder(&tail), terms: k_max, tail })
        }
        RepresentationId::Clausen => {
            let k_max = choose_terms(qf, tail_target, budget, clausen_tail_f64)?;
            let q2 = q.clone() * q.clone();
            let mut sum = q.int(0);
            let mut qk = q.clone(); // q^k
            let mut qk2 = q.clone(); // q^(k^2)
            let mut odd = q.clone() * q2.clone(); // q^(2k+1)
            for _ in 1..=k_max {
                sum = sum + (one.clone() + qk.clone()) / (one.clone() - qk.clone()) * qk2.clone();
                qk = qk * q.clone();
                qk2 = qk2 * odd.clone();
                odd = odd * q2.clone();
            }
            // qk2 = q^((K+1)^2), odd = q^(2K+3)
            let tail = (one.clone() + q.clone()) / one_minus_q * qk2 / (one - odd);
            Ok(SeriesValue { value: sum.add_remainder(&tail), terms: k_max, tail })
        }
        other => Err(Error::InvalidArgument(format!(
            "{other} is a coefficient-level route; numeric evaluation supports DIVISOR, LAMBERT, CLAUSEN"
        ))),
    }
}

/// `psi_q(x) = -log(1-q) + log(q) sum_{k>=1} q^(kx)/(1-q^k)`.
pub fn psi_series<R: Real>(q: &R, x: &R, tail_target: f64, budget: usize) -> Result<SeriesValue<R>> {
    let qf = estimate_q(q)?;
    let xf = x.estimate();
    if !(xf > 0.0) {
        return Err(Error::Domain(format!("x = {xf} must be positive")));
    }
    let log_q = q.ln();
    let scaled_target = tail_target / qf.ln().abs();
    let k_max = choose_terms(qf, scaled_target, budget, |qf, k| {
        qf.powf((k as f64 + 1.0) * xf) / ((1.0 - qf.powf(k as f64 + 1.0)) * (1.0 - qf.powf(xf)))
    })?;
    let one = q.int(1);
    let qx = q.pow(x);
    let mut sum = q.int(0);
    let mut qk = q.clone();
    let mut qkx = qx.clone();
    for _ in 1..=k_max {
        sum = sum + qkx.clone() / (one.clone() - qk.clone());
        qk = qk * q.clone();
        qkx = qkx * qx.clone();
    }
    let tail = qkx / ((one.clone() - qk) * (one.clone() - qx));
    let value = -(one - q.clone()).ln() + log_q.clone() * sum.add_remainder(&tail);
    let scaled_tail = -log_q * tail;
    Ok(SeriesValue { value, terms: k_max, tail: scaled_tail })
}

/// `log(1-q) / log(q)`.
fn log_ratio<R: Real>(q: &R) -> R {
    (q.int(1) - q.clone()).ln() / q.ln()
}

pub fn h_from_t<R: Real>(q: &R, t: R) -> R {
    t - log_ratio(q)
}

pub fn f_from_t<R: Real>(q: &R, t: R) -> R {
    (q.int(1) - q.clone()) / q.clone() * h_from_t(q, t)
}

fn certified_loop(
    opts: &EvalOptions,
    mut attempt: impl FnMut(u32) -> Result<(SeriesValue<Interval>, Interval)>,
) -> Result<(SeriesValue<Interval>, Interval, u32)> {
    let mut last_width = f64::INFINITY;
    let mut last_prec = opts.precision;
    for prec in opts.precisions() {
        let (sv, value) = attempt(prec)?;
        let width = value.width();
        if width <= opts.eps {
            return Ok((sv, value, prec));
        }
        last_width = width;
        last_prec = prec;
    }
    Err(Error::PrecisionExhausted { eps: opts.eps, precision: last_prec, width: last_width })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Derived {
    T,
    H,
    F,
}

fn eval_derived(q: &QPoint, repr: RepresentationId, opts: &EvalOptions, which: Derived) -> Result<EvalReport> {
    opts.validate()?;
    // F scales the remainder of T by (1-q)/q
    let tail_target = match which {
        Derived::F => {
            let qf = q.to_f64();
            opts.eps / 4.0 * (qf / (1.0 - qf)).min(1.0)
        }
        _ => opts.eps / 4.0,
    };
    match opts.mode {
        Mode::Fast => {
            let qa = q.approx();
            let sv = t_series(&qa, repr, tail_target, opts.term_budget)?;
            let value = match which {
                Derived::T => sv.value,
                Derived::H => h_from_t(&qa, sv.value),
                Derived::F => f_from_t(&qa, sv.value),
            };
            Ok(EvalReport {
                value: value.to_enclosure(),
                representation: SeriesSource::Representation(repr),
                terms_used: sv.terms,
                tail_bound: sv.tail.hi(),
                mode: Mode::Fast,
                precision: 53,
            })
        }
        Mode::Certified => {
            let (sv, value, prec) = certified_loop(opts, |prec| {
                let qi = q.enclosure(prec);
                let sv = t_series(&qi, repr, tail_target, opts.term_budget)?;
                let value = match which {
                    Derived::T => sv.value.clone(),
                    Derived::H => h_from_t(&qi, sv.value.clone()),
                    Derived::F => f_from_t(&qi, sv.value.clone()),
                };
                Ok((sv, value))
            })?;
            Ok(EvalReport {
                value,
                representation: SeriesSource::Representation(repr),
                terms_used: sv.terms,
                tail_bound: sv.tail.hi_f64(),
                mode: Mode::Certified,
                precision: prec,
            })
        }
    }
}

pub fn eval_t(q: &QPoint, repr: RepresentationId, opts: &EvalOptions) -> Result<EvalReport> {
    eval_derived(q, repr, opts, Derived::T)
}

/// `H(q) = T(q) - log(1-q)/log(q)`, with `T` from the Lambert route.
pub fn eval_h(q: &QPoint, opts: &EvalOptions) -> Result<EvalReport> {
    eval_derived(q, RepresentationId::Lambert, opts, Derived::H)
}

/// `F(q) = (1-q)/q H(q)`.
pub fn eval_f(q: &QPoint, opts: &EvalOptions) -> Result<EvalReport> {
    eval_derived(q, RepresentationId::Lambert, opts, Derived::F)
}

pub fn eval_h_with(q: &QPoint, repr: RepresentationId, opts: &EvalOptions) -> Result<EvalReport> {
    eval_derived(q, repr, opts, Derived::H)
}

pub fn eval_f_with(q: &QPoint, repr: RepresentationId, opts: &EvalOptions) -> Result<EvalReport> {
    eval_derived(q, repr, opts, Derived::F)
}

pub fn eval_psi_q(q: &QPoint, x: &Rational, opts: &EvalOptions) -> Result<EvalReport> {
    opts.validate()?;
    if *x <= 0 {
        return Err(Error::Domain(format!("x = {} must be positive", x.to_f64())));
    }
    match opts.mode {
        Mode::Fast => {
            let qa = q.approx();
            let sv = psi_series(&qa, &qa.rat(x), opts.eps / 4.0, opts.term_budget)?;
            Ok(EvalReport {
                value: sv.value.to_enclosure(),
                representation: SeriesSource::PsiFormula,
                terms_used: sv.terms,
                tail_bound: sv.tail.hi(),
                mode: Mode::Fast,
                precision: 53,
            })
        }
        Mode::Certified => {
            let (sv, value, prec) = certified_loop(opts, |prec| {
                let qi = q.enclosure(prec);
                let sv = psi_series(&qi, &qi.rat(x), opts.eps / 4.0, opts.term_budget)?;
                let v = sv.value.clone();
                Ok((sv, v))
            })?;
            Ok(EvalReport {
                value,
                representation: SeriesSource::PsiFormula,
                terms_used: sv.terms,
                tail_bound: sv.tail.hi_f64(),
                mode: Mode::Certified,
                precision: prec,
            })
        }
    }
}

/// Double inequalities with a middle expression built from `T`, `psi_q` or `H`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TheoremId {
    /// `0 < 1 - (1-q)/(q log q) psi_q(1) < 1/2`
    #[serde(rename = "SALEM_1_3")]
    Salem13,
    /// `a q/(1-q) + L < T < b q/(1-q) + L`, `L = log(1-q)/log q`, `a = gamma`, `b = 1`
    #[serde(rename = "T4_1")]
    T41,
    /// `a0 + (1-q)L/q < (1/q - 1) T - 1 < b0 + (1-q)L/q`, `a0 = gamma - 1`, `b0 = 0`
    #[serde(rename = "T4_2")]
    T42,
    /// `l q/(1-q)^2 + L/(1-q) < T/(1-q) < m q/(1-q)^2 + L/(1-q)`, `l = gamma`, `m = 1`
    #[serde(rename = "T4_3")]
    T43,
    /// `l0 A - B < -log(1-q) T < m0 A - B`, `A = q log(1-q)/(1-q)`,
    /// `B = log(1-q)^2/log q`, `l0 = -gamma`, `m0 = -1`
    #[serde(rename = "T4_4")]
    T44,
    /// `r(1-s)/(s(1-r)) < H(r)/H(s) < 1` for `r < s`
    #[serde(rename = "C3_3")]
    C33,
}

impl TheoremId {
    pub const ALL: [TheoremId; 6] =
        [TheoremId::Salem13, TheoremId::T41, TheoremId::T42, TheoremId::T43, TheoremId::T44, TheoremId::C33];

    pub fn name(self) -> &'static str {
        match self {
            TheoremId::Salem13 => "SALEM_1_3",
            TheoremId::T41 => "T4_1",
            TheoremId::T42 => "T4_2",
            TheoremId::T43 => "T4_3",
            TheoremId::T44 => "T4_4",
            TheoremId::C33 => "C3_3",
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TheoremId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_uppercase().replace(['-', '.'], "_");
        TheoremId::ALL
            .into_iter()
            .find(|t| t.name() == norm)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown theorem id '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundsPoint {
    Single(QPoint),
    /// `(r, s)` with `r < s`, only for `C3_3`.
    Pair(QPoint, QPoint),
}

/// Replacement constants for the outer expressions; `None` keeps the sharp
/// default of the theorem.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BoundConstants {
    pub lower: Option<Rational>,
    pub upper: Option<Rational>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BoundsStatus {
    Pass,
    Fail,
    Indeterminate,
}

impl fmt::Display for BoundsStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundsStatus::Pass => "PASS",
            BoundsStatus::Fail => "FAIL",
            BoundsStatus::Indeterminate => "INDETERMINATE",
        })
    }
}

#[derive(Debug, Clone)]
pub struct BoundsRecord {
    pub theorem: TheoremId,
    pub lhs: Interval,
    pub mid: Interval,
    pub rhs: Interval,
    pub status: BoundsStatus,
    pub mode: Mode,
}

impl BoundsRecord {
    /// `lhs.hi < mid.lo && mid.hi < rhs.lo`, and certified.
    pub fn strict_ok(&self) -> bool {
        self.status == BoundsStatus::Pass && self.mode == Mode::Certified
    }
}

fn classify(lhs: &Interval, mid: &Interval, rhs: &Interval) -> BoundsStatus {
    if lhs.certainly_lt(mid) && mid.certainly_lt(rhs) {
        BoundsStatus::Pass
    } else if lhs.certainly_not_lt(mid) || mid.certainly_not_lt(rhs) {
        BoundsStatus::Fail
    } else {
        BoundsStatus::Indeterminate
    }
}

fn constant_or<R: Real>(ctx: &R, c: &Option<Rational>, default: R) -> R {
    match c {
        Some(r) => ctx.rat(r),
        None => default,
    }
}

/// The three sides of the chosen double inequality.
pub fn bound_sides<R: Real>(
    theorem: TheoremId,
    point: (&R, Option<&R>),
    consts: &BoundConstants,
    tail_target: f64,
    budget: usize,
) -> Result<(R, R, R)> {
    let (q, s) = point;
    let t_of = |x: &R| t_series(x, RepresentationId::Lambert, tail_target, budget).map(|sv| sv.value);
    let one = q.int(1);
    let gamma = q.euler_gamma();
    let one_minus_q = one.clone() - q.clone();
    Ok(match theorem {
        TheoremId::Salem13 => {
            let psi = psi_series(q, &one, tail_target, budget)?.value;
            let mid = one.clone() - one_minus_q / (q.clone() * q.ln()) * psi;
            let lhs = constant_or(q, &consts.lower, q.int(0));
            let rhs = constant_or(q, &consts.upper, q.ratio(1, 2));
            (lhs, mid, rhs)
        }
        TheoremId::T41 => {
            let p = q.clone() / one_minus_q;
            let l = log_ratio(q);
            let a = constant_or(q, &consts.lower, gamma);
            let b = constant_or(q, &consts.upper, one);
            (a * p.clone() + l.clone(), t_of(q)?, b * p + l)
        }
        TheoremId::T42 => {
            let m0 = log_ratio(q) * one_minus_q / q.clone();
            let a0 = constant_or(q, &consts.lower, gamma - one.clone());
            let b0 = constant_or(q, &consts.upper, q.int(0));
            let mid = (one.clone() / q.clone() - one.clone()) * t_of(q)? - one;
            (a0 + m0.clone(), mid, b0 + m0)
        }
        TheoremId::T43 => {
            let p = q.clone() / (one_minus_q.clone() * one_minus_q.clone());
            let l = log_ratio(q) / one_minus_q.clone();
            let lam = constant_or(q, &consts.lower, gamma);
            let mu = constant_or(q, &consts.upper, one);
            let mid = t_of(q)? / one_minus_q;
            (lam * p.clone() + l.clone(), mid, mu * p + l)
        }
        TheoremId::T44 => {
            let log1mq = one_minus_q.ln();
            let a = q.clone() * log1mq.clone() / one_minus_q;
            let b = log1mq.clone() * log1mq.clone() / q.ln();
            let lam0 = constant_or(q, &consts.lower, -gamma);
            let mu0 = constant_or(q, &consts.upper, -one);
            let mid = -log1mq * t_of(q)?;
            (lam0 * a.clone() - b.clone(), mid, mu0 * a - b)
        }
        TheoremId::C33 => {
            let s = s.ok_or_else(|| Error::InvalidArgument("C3_3 needs a pair r < s".into()))?;
            let r = q;
            let h_r = h_from_t(r, t_of(r)?);
            let h_s = h_from_t(s, t_of(s)?);
            let lhs = r.clone() * (one.clone() - s.clone()) / (s.clone() * (one.clone() - r.clone()));
            let rhs = constant_or(q, &consts.upper, one);
            (lhs, h_r / h_s, rhs)
        }
    })
}

pub fn check_bounds(theorem: TheoremId, point: &BoundsPoint, opts: &EvalOptions) -> Result<BoundsRecord> {
    check_bounds_with(theorem, point, &BoundConstants::default(), opts)
}

/// Evaluates the double inequality; in certified mode an undecided result is
/// retried at doubled precision up to the configured ceiling.
pub fn check_bounds_with(
    theorem: TheoremId,
    point: &BoundsPoint,
    consts: &BoundConstants,
    opts: &EvalOptions,
) -> Result<BoundsRecord> {
    opts.validate()?;
    let (q, s) = match (theorem, point) {
        (TheoremId::C33, BoundsPoint::Pair(r, s)) => {
            if r >= s {
                return Err(Error::InvalidArgument("C3_3 needs r < s".into()));
            }
            (r, Some(s))
        }
        (TheoremId::C33, BoundsPoint::Single(_)) => {
            return Err(Error::InvalidArgument("C3_3 needs a pair r < s".into()))
        }
        (_, BoundsPoint::Single(q)) => (q, None),
        (_, BoundsPoint::Pair(..)) => {
            return Err(Error::InvalidArgument(format!("{theorem} takes a single q")))
        }
    };
    match opts.mode {
        Mode::Fast => {
            let qa = q.approx();
            let sa = s.map(|s| s.approx());
            let (l, m, r) = bound_sides(theorem, (&qa, sa.as_ref()), consts, opts.eps, opts.term_budget)?;
            let (lhs, mid, rhs) = (l.to_enclosure(), m.to_enclosure(), r.to_enclosure());
            let status = classify(&lhs, &mid, &rhs);
            Ok(BoundsRecord { theorem, lhs, mid, rhs, status, mode: Mode::Fast })
        }
        Mode::Certified => {
            let mut last = None;
            for prec in opts.precisions() {
                let qi = q.enclosure(prec);
                let si = s.map(|s| s.enclosure(prec));
                let (lhs, mid, rhs) =
                    bound_sides(theorem, (&qi, si.as_ref()), consts, opts.eps, opts.term_budget)?;
                let status = classify(&lhs, &mid, &rhs);
                let record = BoundsRecord { theorem, lhs, mid, rhs, status, mode: Mode::Certified };
                if status != BoundsStatus::Indeterminate {
                    return Ok(record);
                }
                last = Some(record);
            }
            Ok(last.expect("at least one precision is tried"))
        }
    }
}

/// Fibonacci numbers with `F(1) = F(2) = 1`.
pub fn fibonacci(n: usize) -> Integer {
    let (mut a, mut b) = (Integer::from(0), Integer::from(1));
    for _ in 0..n {
        let next = Integer::from(&a + &b);
        a = std::mem::replace(&mut b, next);
    }
    a
}

/// Ratio cap `F(2k)/F(2k+2) <= 191/500` for all `k >= 1`; the ratios
/// increase toward `1/phi^2 = 0.381966...`.
const FIB_EVEN_RATIO_CAP: (i64, i64) = (191, 500);

/// Exact partial sum `sum_{k=1..k_max} 1/F(2k)`.
pub fn fibonacci_reciprocal_partial_sum(k_max: usize) -> Rational {
    (1..=k_max).fold(Rational::new(), |acc, k| acc + Rational::from((1, fibonacci(2 * k))))
}

/// Enclosure of `sum_{k>=1} 1/F(2k)` from `k_max` exact terms plus a
/// geometric remainder bound.
pub fn landau_fibonacci(k_max: usize, prec: u32) -> Result<Interval> {
    if k_max == 0 {
        return Err(Error::InvalidArgument("k_max must be at least 1".into()));
    }
    let partial = fibonacci_reciprocal_partial_sum(k_max);
    let (n, d) = FIB_EVEN_RATIO_CAP;
    let next = Rational::from((1, fibonacci(2 * k_max + 2)));
    let tail = next / (Rational::from(1) - Rational::from((n, d)));
    let upper = Rational::from(&partial + &tail);
    Ok(Interval::hull_rational(prec, &partial, &upper))
}

/// `sqrt(5) (T(c) - T(c^2))` with `c = ((sqrt(5)-1)/2)^2`.
pub fn landau_via_t<R: Real>(ctx: &R, tail_target: f64) -> Result<R> {
    let sqrt5 = ctx.int(5).sqrt();
    let golden = (sqrt5.clone() - ctx.int(1)) / ctx.int(2);
    let c = golden.clone() * golden;
    let c2 = c.clone() * c.clone();
    let t = |x: &R| t_series(x, RepresentationId::Lambert, tail_target, DEFAULT_TERM_BUDGET).map(|s| s.value);
    Ok(sqrt5 * (t(&c)? - t(&c2)?))
}

/// Rational grid `start, start + step, ...` up to and including `end`.
pub fn rational_grid(start: &Rational, end: &Rational, step: &Rational) -> Result<Vec<Rational>> {
    if *step <= 0 {
        return Err(Error::InvalidArgument("grid step must be positive".into()));
    }
    if start > end {
        return Err(Error::InvalidArgument("grid start exceeds end".into()));
    }
    let mut out = Vec::new();
    let mut q = start.clone();
    while q <= *end {
        out.push(q.clone());
        q += step;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> QPoint {
        s.parse().unwrap()
    }

    #[test]
    fn qpoint_domain() {
        assert!(QPoint::from_f64(1.5).is_err());
        assert!(QPoint::from_f64(0.0).is_err());
        assert!(QPoint::from_f64(1.0).is_err());
        assert!(QPoint::from_f64(f64::NAN).is_err());
        assert_eq!(q("0.25").rational(), &Rational::from((1, 4)));
    }

    #[test]
    fn lambert_divisor_clausen_agree_at_half() {
        let opts = EvalOptions::certified().with_eps(1e-12);
        let reps: Vec<_> = [RepresentationId::Divisor, RepresentationId::Lambert, RepresentationId::Clausen]
            .into_iter()
            .map(|r| eval_t(&q("0.5"), r, &opts).unwrap())
            .collect();
        for a in &reps {
            assert!(a.value.width() <= 1e-12);
            for b in &reps {
                assert!(a.value.intersects(&b.value));
            }
        }
        assert!(reps[2].terms_used < reps[1].terms_used);
    }

    #[test]
    fn small_q_leading_term() {
        let r = eval_t(&q("1e-6"), RepresentationId::Lambert, &EvalOptions::certified()).unwrap();
        let lo = 1e-6 * (1.0 - 1e-4);
        let hi = 1e-6 * (1.0 + 1e-4);
        assert!(r.value.lo_f64() > lo && r.value.hi_f64() < hi);
    }

    #[test]
    fn coefficient_routes_rejected_numerically() {
        let err = eval_t(&q("0.5"), RepresentationId::Uchimura, &EvalOptions::certified());
        assert!(matches!(err, Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn term_budget_is_enforced() {
        let opts = EvalOptions { term_budget: 1000, ..EvalOptions::certified() };
        let err = eval_t(&q("0.999"), RepresentationId::Lambert, &opts);
        assert!(matches!(err, Err(Error::TermBudget { .. })), "{err:?}");
    }

    #[test]
    fn unreachable_eps_reports_precision_exhausted() {
        let opts = EvalOptions { eps: 1e-60, max_precision: 128, ..EvalOptions::certified() };
        let err = eval_t(&q("0.5"), RepresentationId::Lambert, &opts);
        assert!(matches!(err, Err(Error::PrecisionExhausted { .. })), "{err:?}");
        let ok = EvalOptions { eps: 1e-60, ..EvalOptions::certified() };
        let r = eval_t(&q("0.5"), RepresentationId::Lambert, &ok).unwrap();
        assert!(r.precision > 128);
    }

    #[test]
    fn fast_mode_agrees_with_certified() {
        let fast = eval_f(&q("0.3"), &EvalOptions::fast()).unwrap();
        let cert = eval_f(&q("0.3"), &EvalOptions::certified()).unwrap();
        assert_eq!(fast.mode, Mode::Fast);
        assert!(fast.value.intersects(&cert.value));
        assert!(fast.value.width() < 1e-12);
    }

    #[test]
    fn psi_identity_at_point_three() {
        let opts = EvalOptions::certified();
        let one = Rational::from(1);
        let psi = eval_psi_q(&q("0.3"), &one, &opts).unwrap().value;
        let t = eval_t(&q("0.3"), RepresentationId::Lambert, &opts).unwrap().value;
        let qi = q("0.3").enclosure(128);
        let rhs = (psi + (qi.int(1) - qi.clone()).ln()) / qi.ln();
        assert!(rhs.intersects(&t));
    }

    #[test]
    fn psi_rejects_nonpositive_x() {
        let r = eval_psi_q(&q("0.3"), &Rational::from(0), &EvalOptions::certified());
        assert!(matches!(r, Err(Error::Domain(_))));
    }

    #[test]
    fn fibonacci_partial_sums() {
        assert_eq!(fibonacci(1), 1);
        assert_eq!(fibonacci(2), 1);
        assert_eq!(fibonacci(10), 55);
        assert_eq!(fibonacci_reciprocal_partial_sum(1), 1);
        let five = fibonacci_reciprocal_partial_sum(5);
        let expected = Rational::from(1)
            + Rational::from((1, 3))
            + Rational::from((1, 8))
            + Rational::from((1, 21))
            + Rational::from((1, 55));
        assert_eq!(five, expected);
        assert!((five.to_f64() - 1.524134).abs() < 1e-6);
    }

    #[test]
    fn fibonacci_remainder_bound_holds() {
        // brute-force remainder far down the sequence stays below the bound
        for k_max in [1usize, 2, 5, 10] {
            let enc = landau_fibonacci(k_max, 128).unwrap();
            let long = fibonacci_reciprocal_partial_sum(k_max + 60);
            assert!(enc.contains_rational(&long), "k_max = {k_max}");
        }
        for k in 1..200 {
            let ratio = Rational::from((fibonacci(2 * k), fibonacci(2 * k + 2)));
            assert!(ratio <= Rational::from(FIB_EVEN_RATIO_CAP));
        }
    }

    #[test]
    fn bounds_reject_mismatched_points() {
        let opts = EvalOptions::certified();
        assert!(check_bounds(TheoremId::C33, &BoundsPoint::Single(q("0.5")), &opts).is_err());
        assert!(check_bounds(
            TheoremId::T41,
            &BoundsPoint::Pair(q("0.2"), q("0.5")),
            &opts
        )
        .is_err());
        assert!(check_bounds(
            TheoremId::C33,
            &BoundsPoint::Pair(q("0.5"), q("0.2")),
            &opts
        )
        .is_err());
    }

    #[test]
    fn theorem_names_parse() {
        for t in TheoremId::ALL {
            assert_eq!(t.name().parse::<TheoremId>().unwrap(), t);
        }
        assert_eq!("t4.1".parse::<TheoremId>().unwrap(), TheoremId::T41);
    }

    #[test]
    fn grid_is_exact() {
        let g = rational_grid(
            &Rational::from((1, 100)),
            &Rational::from((99, 100)),
            &Rational::from((1, 100)),
        )
        .unwrap();
        assert_eq!(g.len(), 99);
        assert_eq!(g[98], Rational::from((99, 100)));
    }
}
