//! Computer-assisted verification: monotone sandwiches on exact rational
//! grids, Sturm root counts, analytic spot checks, and JSON certificates.

mod certificate;
mod grid;
mod poly;

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rug::Rational;
use serde::{Deserialize, Serialize};

pub use certificate::{Certificate, Stage, ValueRecord, CERTIFICATE_SCHEMA_VERSION};
pub use grid::{Cell, GridSpec, Segment};
pub use poly::{sign_variations, sturm_root_count, Polynomial};

use crate::error::{Error, Result};
use crate::lemma::{self, PhiPoint};
use crate::real::{Approx, Interval, Mode, Real, DEFAULT_PRECISION, MAX_PRECISION};

/// A real function of `q`, evaluable in either back end.
pub trait QFunction: Sync {
    fn eval<R: Real>(&self, q: &R) -> R;

    /// Exact value at points the formula cannot handle (such as a limit).
    fn exact_at(&self, _q: &Rational) -> Option<Rational> {
        None
    }
}

/// Constant function, for tests and degenerate checks.
pub struct Constant(pub Rational);

impl QFunction for Constant {
    fn eval<R: Real>(&self, q: &R) -> R {
        q.rat(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    pub mode: Mode,
    pub precision: u32,
    pub max_precision: u32,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            mode: Mode::Certified,
            precision: DEFAULT_PRECISION,
            max_precision: MAX_PRECISION,
            seed: 0x5eed,
        }
    }
}

impl VerifyOptions {
    pub fn fast() -> Self {
        VerifyOptions { mode: Mode::Fast, ..Self::default() }
    }
}

fn eval_at<F: QFunction>(f: &F, q: &Rational, mode: Mode, prec: u32) -> Interval {
    if let Some(exact) = f.exact_at(q) {
        return Interval::from_rational(prec, &exact);
    }
    match mode {
        Mode::Certified => f.eval(&Interval::from_rational(prec, q)),
        Mode::Fast => f.eval(&Approx::exact(0.0).rat(q)).to_enclosure(),
    }
}

/// `left - right` gap for one cell, refined in precision while undecided.
fn cell_margin<L: QFunction, U: QFunction>(
    lower: &L,
    upper: &U,
    cell: &Cell,
    opts: &VerifyOptions,
) -> Interval {
    let mut prec = opts.precision;
    loop {
        let m = eval_at(lower, &cell.left, opts.mode, prec) - eval_at(upper, &cell.right, opts.mode, prec);
        if m.certainly_positive()
            || m.certainly_negative()
            || opts.mode == Mode::Fast
            || prec >= opts.max_precision
        {
            return m;
        }
        prec = (prec * 2).min(opts.max_precision);
    }
}

/// Proves `lower > upper` on the grid's span by checking
/// `lower(left) - upper(right) > 0` on every cell. Sound only when both
/// functions are increasing; callers record that as a premise.
pub fn sandwich_verify<L: QFunction, U: QFunction>(
    target: &str,
    lower: &L,
    upper: &U,
    grid: &GridSpec,
    opts: &VerifyOptions,
) -> Certificate {
    let mut cert = Certificate::new(target, opts.mode);
    let cells = grid.cells();
    let margins: Vec<Interval> =
        cells.par_iter().map(|c| cell_margin(lower, upper, c, opts)).collect();
    for (cell, m) in cells.iter().zip(&margins) {
        if m.certainly_positive() {
            cert.observe_margin(m.lo_f64());
        } else {
            cert.failures.push(cell.index);
        }
    }
    cert.cells_checked = cells.len() as u64;
    cert.grid = Some(grid.clone());
    let detail = format!("{} of {} cells positive", cells.len() - cert.failures.len(), cells.len());
    cert.stage("sandwich", cert.failures.is_empty(), detail);
    cert
}

/// Strict increase of `f` on `pairs` random ordered pairs in `[a, b)`,
/// drawn as multiples of `(b - a) / 10^6`.
pub fn monotonicity_spot_check<F: QFunction>(
    f: &F,
    a: &Rational,
    b: &Rational,
    pairs: usize,
    opts: &VerifyOptions,
) -> std::result::Result<usize, (Rational, Rational)> {
    const SLOTS: u32 = 1_000_000;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let width = Rational::from(b - a);
    let at = |k: u32| Rational::from(a + Rational::from(&width * Rational::from((k, SLOTS))));
    let draws: Vec<(Rational, Rational)> = (0..pairs)
        .map(|_| {
            let i = rng.gen_range(0..SLOTS);
            let mut j = rng.gen_range(0..SLOTS);
            while j == i {
                j = rng.gen_range(0..SLOTS);
            }
            (at(i.min(j)), at(i.max(j)))
        })
        .collect();
    for (r, s) in draws {
        let fr = eval_at(f, &r, opts.mode, opts.precision);
        let fs = eval_at(f, &s, opts.mode, opts.precision);
        if !fr.certainly_lt(&fs) {
            return Err((r, s));
        }
    }
    Ok(pairs)
}

fn spot_check_stage<F: QFunction>(
    cert: &mut Certificate,
    name: &str,
    f: &F,
    a: &Rational,
    b: &Rational,
    opts: &VerifyOptions,
) {
    match monotonicity_spot_check(f, a, b, 100, opts) {
        Ok(n) => cert.stage(name, true, format!("{n} random pairs strictly increasing")),
        Err((r, s)) => cert.stage(name, false, format!("not separated at ({r}, {s})")),
    }
}

fn r(n: i64, d: i64) -> Rational {
    Rational::from((n, d))
}

/// `Phi_q(n+1) - Phi_q(1) - offset`, the integral of `phi_q` over `[1, n+1]`.
pub struct IntegralPart {
    pub upper: u32,
    pub offset: Rational,
}

impl QFunction for IntegralPart {
    fn eval<R: Real>(&self, q: &R) -> R {
        let log_q = q.ln();
        lemma::big_phi(&PhiPoint::at_integer_with_log(q, &log_q, self.upper))
            - lemma::big_phi(&PhiPoint::at_integer_with_log(q, &log_q, 1))
            - q.rat(&self.offset)
    }
}

/// `sum_{k=1}^{n} phi_q(k) + end_weight * phi_q(n+1)`, with its exact limit
/// at `q = 1` built from `(k - 1) / (2k)`.
pub struct PhiSum {
    pub terms: u32,
    pub end_weight: Rational,
}

impl PhiSum {
    pub fn limit_at_one(&self) -> Rational {
        let mut total = Rational::new();
        for k in 1..=self.terms {
            total += lemma::phi_limit_at_one(&Rational::from(k));
        }
        total + Rational::from(&self.end_weight * lemma::phi_limit_at_one(&Rational::from(self.terms + 1)))
    }
}

impl QFunction for PhiSum {
    fn eval<R: Real>(&self, q: &R) -> R {
        let log_q = q.ln();
        let mut total = q.int(0);
        for k in 1..=self.terms {
            total = total + lemma::phi(&PhiPoint::at_integer_with_log(q, &log_q, k));
        }
        if self.end_weight != 0 {
            let end = lemma::phi(&PhiPoint::at_integer_with_log(q, &log_q, self.terms + 1));
            total = total + q.rat(&self.end_weight) * end;
        }
        total
    }

    fn exact_at(&self, q: &Rational) -> Option<Rational> {
        (*q == 1).then(|| self.limit_at_one())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LemmaId {
    #[serde(rename = "L2_4_i")]
    L2_4I,
    #[serde(rename = "L2_4_ii")]
    L2_4Ii,
    #[serde(rename = "L2_5")]
    L2_5,
    #[serde(rename = "L2_8")]
    L2_8,
    #[serde(rename = "L2_9")]
    L2_9,
}

impl LemmaId {
    pub const ALL: [LemmaId; 5] = [LemmaId::L2_4I, LemmaId::L2_4Ii, LemmaId::L2_5, LemmaId::L2_8, LemmaId::L2_9];

    pub fn name(self) -> &'static str {
        match self {
            LemmaId::L2_4I => "L2_4_i",
            LemmaId::L2_4Ii => "L2_4_ii",
            LemmaId::L2_5 => "L2_5",
            LemmaId::L2_8 => "L2_8",
            LemmaId::L2_9 => "L2_9",
        }
    }
}

impl fmt::Display for LemmaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LemmaId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .trim_start_matches(['L', 'l'])
            .chars()
            .filter(|c| !matches!(c, '.' | '_' | '-'))
            .collect::<String>()
            .to_ascii_lowercase();
        match key.as_str() {
            "24i" => Ok(LemmaId::L2_4I),
            "24ii" => Ok(LemmaId::L2_4Ii),
            "25" => Ok(LemmaId::L2_5),
            "28" => Ok(LemmaId::L2_8),
            "29" => Ok(LemmaId::L2_9),
            _ => Err(Error::InvalidArgument(format!("unknown lemma '{s}'"))),
        }
    }
}

pub fn verify_lemma(id: LemmaId, opts: &VerifyOptions) -> Result<Certificate> {
    let cert = match id {
        LemmaId::L2_4I => verify_small_q(opts)?,
        LemmaId::L2_4Ii => verify_middle_sandwich(opts)?,
        LemmaId::L2_5 => verify_inflection_bound(opts)?,
        LemmaId::L2_8 => verify_derivative_floor(opts)?,
        LemmaId::L2_9 => verify_trapezoid_sandwich(opts)?,
    };
    Ok(cert.finalize())
}

/// Runs each certificate with its own cell fan-out; order follows `ids`.
pub fn verify_all(ids: &[LemmaId], opts: &VerifyOptions) -> Result<Vec<Certificate>> {
    ids.iter().map(|&id| verify_lemma(id, opts)).collect()
}

/// Evaluates `f` over the whole cell `[a, b]` in one enclosure.
fn over_cell(
    mode: Mode,
    prec: u32,
    a: &Rational,
    b: &Rational,
    f: impl Fn(&Interval) -> Interval,
    g: impl Fn(&Approx) -> Approx,
) -> Interval {
    match mode {
        Mode::Certified => f(&Interval::hull_rational(prec, a, b)),
        Mode::Fast => {
            let (x, y) = (a.to_f64(), b.to_f64());
            g(&Approx { value: 0.5 * (x + y), err: 0.5 * (y - x) + f64::EPSILON * y.abs() }).to_enclosure()
        }
    }
}

/// A point of evaluation in the requested back end.
struct PointArg {
    mode: Mode,
    prec: u32,
    q: Rational,
}

impl PointArg {
    fn run(&self, f: impl Fn(&Interval) -> Interval, g: impl Fn(&Approx) -> Approx) -> Interval {
        match self.mode {
            Mode::Certified => f(&Interval::from_rational(self.prec, &self.q)),
            Mode::Fast => g(&Approx::exact(0.0).rat(&self.q)).to_enclosure(),
        }
    }
}

macro_rules! both {
    ($arg:expr, |$x:ident| $body:expr) => {
        $arg.run(|$x: &Interval| $body, |$x: &Approx| $body)
    };
}

/// `C_q(1) > 0` on `(0, 0.117]` via `U(q) >= q V(-log q)` and the growth of `V`.
fn verify_small_q(opts: &VerifyOptions) -> Result<Certificate> {
    let mut cert = Certificate::new(LemmaId::L2_4I.name(), opts.mode);
    let (mode, prec) = (opts.mode, opts.precision);
    cert.premise("log(1+q) <= q and q - 1 - log(q) > 0, giving U(q) >= q V(-log q)");
    cert.premise("each term of V'(y) is positive for y >= sqrt(3); the grid covers [2.145, 50] explicitly");

    let grid = GridSpec::single(r(429, 200), r(1, 200), 9571)?;
    let cells = grid.cells();
    let values: Vec<Interval> = cells
        .par_iter()
        .map(|c| over_cell(mode, prec, &c.left, &c.right, lemma::v_prime, lemma::v_prime))
        .collect();
    for (c, v) in cells.iter().zip(&values) {
        if v.certainly_positive() {
            cert.observe_margin(v.lo_f64());
        } else {
            cert.failures.push(c.index);
        }
    }
    cert.cells_checked = cells.len() as u64;
    cert.stage("v_prime_positive", cert.failures.is_empty(), format!("{} cells on [2.145, 50]", cells.len()));
    cert.grid = Some(grid);

    let q0 = r(117, 1000);
    let y0_hi = both!(PointArg { mode, prec, q: q0.clone() }, |q| -q.ln());
    let v0 = both!(PointArg { mode, prec, q: q0.clone() }, |q| lemma::v_fn(&-q.ln()));
    cert.record("v_at_minus_log_0_117", ValueRecord::enclosure(&v0));
    cert.record("minus_log_0_117", ValueRecord::enclosure(&y0_hi));
    let start_ok = y0_hi.lo_f64() >= 2.145;
    cert.stage("grid_start", start_ok, "-log(0.117) lies beyond the first grid point 2.145");
    cert.stage("v_endpoint_positive", v0.certainly_positive(), format!("V(-log 0.117) in [{:.6e}, {:.6e}]", v0.lo_f64(), v0.hi_f64()));
    if v0.certainly_positive() {
        cert.observe_margin(v0.lo_f64());
    }

    let mut chain_ok = true;
    let mut worst = String::new();
    for k in 1..=117 {
        let q = r(k, 1000);
        let arg = PointArg { mode, prec, q: q.clone() };
        let gap = both!(arg, |q| lemma::u_fn(q) - q.clone() * lemma::v_fn(&-q.ln()));
        let grows = both!(arg, |q| lemma::v_fn(&-q.ln()) - lemma::v_fn(&-q.rat(&q0).ln()));
        let c1 = both!(arg, |q| lemma::correction_sums_generic(q, 1).map(|s| s.c_n).unwrap_or_else(|_| q.int(0)));
        let ok = gap.lo_f64() >= 0.0 && (k == 117 || grows.certainly_positive()) && c1.certainly_positive();
        if !ok && chain_ok {
            worst = format!("q = {q}");
        }
        chain_ok &= ok;
    }
    let detail = if chain_ok { "117 samples q = k/1000".to_string() } else { format!("chain broken at {worst}") };
    cert.stage("chain_samples", chain_ok, detail);
    Ok(cert)
}

/// `C_q(39) = W1(q) - W2(q) > 0` on `[0.117, 0.91]`.
fn middle_grid() -> Result<GridSpec> {
    GridSpec::new(vec![
        Segment::new(r(117, 1000), r(1, 1000), 718),
        Segment::new(r(835, 1000), r(1, 20000), 1300),
        Segment::new(r(9, 10), r(1, 500000), 5000),
    ])
}

pub fn w1() -> IntegralPart {
    IntegralPart { upper: 40, offset: Rational::new() }
}

pub fn w2() -> PhiSum {
    PhiSum { terms: 40, end_weight: Rational::new() }
}

pub fn j1() -> IntegralPart {
    IntegralPart { upper: 11, offset: r(36, 1000) }
}

pub fn j2() -> PhiSum {
    PhiSum { terms: 10, end_weight: r(1, 2) }
}

fn verify_middle_sandwich(opts: &VerifyOptions) -> Result<Certificate> {
    let grid = middle_grid()?;
    let (a, b) = (r(117, 1000), r(91, 100));
    let mut cert = sandwich_verify(LemmaId::L2_4Ii.name(), &w1(), &w2(), &grid, opts);
    cert.premise("W1(q) = Phi_q(40) - Phi_q(1) and W2(q) = sum_{k=1}^{40} phi_q(k) are increasing in q, since q -> phi_q(x) is increasing for x >= 1");
    cert.premise("C_q(39) = W1(q) - W2(q), with phi_q(1) = 0 absorbing the k = 1 term");
    cert.stage("tiling", grid.tiles(&a, &b), "segments tile [0.117, 0.91] exactly");
    spot_check_stage(&mut cert, "w1_increasing_samples", &w1(), &a, &b, opts);
    spot_check_stage(&mut cert, "w2_increasing_samples", &w2(), &a, &b, opts);
    Ok(cert)
}

fn verify_trapezoid_sandwich(opts: &VerifyOptions) -> Result<Certificate> {
    let grid = GridSpec::single(r(91, 100), r(1, 10000), 900)?;
    let (a, b) = (r(91, 100), r(1, 1));
    let mut cert = sandwich_verify(LemmaId::L2_9.name(), &j1(), &j2(), &grid, opts);
    cert.premise("J1(q) = Phi_q(11) - Phi_q(1) - 0.036 and J2(q) = sum_{k=1}^{10} phi_q(k) + phi_q(11)/2 are increasing in q on [0.91, 1)");
    cert.premise("J2(1) is the limit of J2 as q -> 1, from lim phi_q(k) = (k - 1)/(2k)");
    let limit = j2().limit_at_one();
    let expected = r(208609, 55440);
    cert.record("j2_at_one", ValueRecord::exact(&limit));
    cert.stage("j2_limit", limit == expected, format!("exact sum {limit}"));
    cert.stage("tiling", grid.tiles(&a, &b), "900 cells tile [0.91, 1]");
    spot_check_stage(&mut cert, "j1_increasing_samples", &j1(), &a, &b, opts);
    spot_check_stage(&mut cert, "j2_increasing_samples", &j2(), &a, &b, opts);
    Ok(cert)
}

/// `a_q(14) < 0` on `[0.91, 1)`, hence the inflection point is at least 14.
fn verify_inflection_bound(opts: &VerifyOptions) -> Result<Certificate> {
    let (mode, prec) = (opts.mode, opts.precision);
    let mut cert = Certificate::new(LemmaId::L2_5.name(), opts.mode);
    let (a, one) = (r(91, 100), r(1, 1));
    let delta = lemma::delta_polynomial();
    let g0 = lemma::g0_polynomial();
    cert.premise("Sturm counts are over (a, b]: a root at b is counted, one at a is not");
    cert.premise("-log(q) <= 1 - q + (11/20)(1 - q)^2 on [0.91, 1): the difference vanishes at 1 and has derivative (1 - q)(1/q - 11/10) < 0 there");
    cert.premise("a_q(14) = (1 - q) G(q) / positive factor, so G < 0 gives a_q(14) < 0; G(q) <= (1 - q) G0(q) once Delta > 0");

    let d_count = sturm_root_count(&delta, &a, &one)?;
    let d_at_a = delta.eval(&a);
    let d_at_one = delta.eval(&one);
    cert.record("delta_at_0_91", ValueRecord::exact(&d_at_a));
    cert.record("delta_at_1", ValueRecord::exact(&d_at_one));
    cert.stage(
        "delta_positive",
        d_count == 1 && d_at_one == 0 && d_at_a > 0,
        format!("{d_count} root(s) in (0.91, 1], Delta(1) = {d_at_one}"),
    );

    let g_count = sturm_root_count(&g0, &a, &one)?;
    let g_at_a = g0.eval(&a);
    let g_at_one = g0.eval(&one);
    cert.record("g0_at_0_91", ValueRecord::exact(&g_at_a));
    cert.record("g0_at_1", ValueRecord::exact(&g_at_one));
    cert.stage(
        "g0_negative",
        g_count == 1 && g_at_one == 0 && g_at_a < 0,
        format!("{g_count} root(s) in (0.91, 1], G0(1) = {g_at_one}"),
    );
    if d_at_a > 0 && g_at_a < 0 {
        let m = Interval::from_rational(64, &d_at_a).lo_f64().min(Interval::from_rational(64, &Rational::from(-&g_at_a)).lo_f64());
        cert.observe_margin(m);
    }

    let mut log_ok = true;
    let mut sample_ok = true;
    for k in 0..90 {
        let q = r(910 + k, 1000);
        let arg = PointArg { mode, prec, q };
        let log_gap = both!(arg, |q| {
            let w = q.int(1) - q.clone();
            w.clone() + q.ratio(11, 20) * w.clone() * w + q.ln()
        });
        log_ok &= log_gap.certainly_positive();
        let g = both!(arg, |q| lemma::g_fn(q));
        let a14 = both!(arg, |q| lemma::a_q(&PhiPoint::at_integer(q, 14)));
        sample_ok &= g.certainly_negative() && a14.certainly_negative();
    }
    cert.stage("log_bound_samples", log_ok, "90 samples q = 0.910 .. 0.999");
    cert.stage("a14_negative_samples", sample_ok, "G(q) < 0 and a_q(14) < 0 at 90 samples");

    let mut nq_ok = true;
    for q in [r(91, 100), r(95, 100), r(99, 100)] {
        let cp = lemma::critical_points(&q)?;
        nq_ok &= cp.n_q >= 14.0;
        cert.record(format!("n_q_at_{}", q.to_f64()), ValueRecord { lo: cp.n_q, hi: cp.n_q, exact: None });
    }
    cert.stage("n_q_diagnostic", nq_ok, "bisection inflection points at q = 0.91, 0.95, 0.99");
    Ok(cert)
}

/// `phi_q'(x) >= -0.035` on `[0.91, 1) x [1, inf)` through `Theta_q(14)`.
fn verify_derivative_floor(opts: &VerifyOptions) -> Result<Certificate> {
    let (mode, prec) = (opts.mode, opts.precision);
    let mut cert = Certificate::new(LemmaId::L2_8.name(), opts.mode);
    let omega = r(35, 1000);
    cert.premise("phi_q'(x) >= phi_q'(N_q) >= Theta_q(N_q) >= Theta_q(14) for x >= 1, using N_q >= 14 and Theta_q increasing");
    cert.premise("(1 - q)/log(q) <= -q, giving -Theta_q(14) <= h1 (h2 + h3)");
    cert.premise("h1 is increasing with limit 1/14; h2 and h3 are decreasing and positive on (0, 1)");

    let a = PointArg { mode, prec, q: r(91, 100) };
    let bound = both!(a, |q| (lemma::h2(q) + lemma::h3(q)) / q.int(14));
    cert.record("h_bound", ValueRecord::enclosure(&bound));
    cert.record("omega", ValueRecord::exact(&omega));
    let omega_i = Interval::from_rational(prec, &omega);
    let bound_ok = bound.certainly_lt(&omega_i);
    cert.stage("h_bound_below_omega", bound_ok, format!("(h2 + h3)(0.91)/14 <= {:.6}", bound.hi_f64()));
    if bound_ok {
        cert.observe_margin((omega_i - bound.clone()).lo_f64());
    }

    let samples: Vec<Rational> = (0..90).map(|k| r(910 + k, 1000)).chain([r(9999, 10000)]).collect();
    let fourteenth = Interval::from_rational(prec, &r(1, 14));
    let mut h_ok = true;
    let mut theta_ok = true;
    let mut prev: Option<[Interval; 3]> = None;
    for q in &samples {
        let arg = PointArg { mode, prec, q: q.clone() };
        let hs = [
            both!(arg, |q| lemma::h1(q)),
            both!(arg, |q| lemma::h2(q)),
            both!(arg, |q| lemma::h3(q)),
        ];
        h_ok &= hs[0].certainly_lt(&fourteenth) && hs.iter().all(Interval::certainly_positive);
        if let Some(p) = &prev {
            h_ok &= p[0].certainly_lt(&hs[0]) && hs[1].certainly_lt(&p[1]) && hs[2].certainly_lt(&p[2]);
        }
        let neg_theta = both!(arg, |q| -lemma::theta(&PhiPoint::at_integer(q, 14)));
        let product = hs[0].clone() * (hs[1].clone() + hs[2].clone());
        theta_ok &= !product.certainly_lt(&neg_theta) && neg_theta.certainly_lt(&bound);
        prev = Some(hs);
    }
    cert.stage("h_monotone_samples", h_ok, format!("{} samples on [0.91, 1)", samples.len()));
    cert.stage("theta_samples", theta_ok, "-Theta_q(14) <= h1 (h2 + h3) < bound at the same samples");

    let qs: Vec<Rational> = (91..=99).map(|k| r(k, 100)).chain([r(995, 1000), r(999, 1000), r(9999, 10000)]).collect();
    let grid: Vec<(Rational, u32)> = qs.iter().flat_map(|q| (2..=400).map(move |h| (q.clone(), h))).collect();
    let worst: Vec<Interval> = grid
        .par_iter()
        .map(|(q, h)| {
            let arg = PointArg { mode, prec, q: q.clone() };
            let x = r(*h as i64, 2);
            both!(arg, |q| lemma::phi_prime(&PhiPoint::new(q, &q.rat(&x))) + q.rat(&omega))
        })
        .collect();
    let floor_ok = worst.iter().all(Interval::certainly_positive);
    let min_gap = worst.iter().map(Interval::lo_f64).fold(f64::INFINITY, f64::min);
    cert.stage("phi_prime_samples", floor_ok, format!("{} points x in [1, 200], smallest gap {min_gap:.4}", worst.len()));
    Ok(cert)
}

/// The exact roll-up margin `0.036 - 0.035/2 - 0.035/8`.
pub fn roll_up_margin() -> Rational {
    r(36, 1000) - r(35, 2000) - r(35, 8000)
}

/// Checks every ingredient certificate and the final arithmetic step.
pub fn combine_theorem_3_2(certificates: &[Certificate]) -> Certificate {
    let all_certified = certificates.iter().all(|c| c.mode == Mode::Certified);
    let mode = if all_certified && !certificates.is_empty() { Mode::Certified } else { Mode::Fast };
    let mut cert = Certificate::new("THM3_2", mode);
    cert.premise("case q <= 0.91 rests on L2_4_i and L2_4_ii; case q > 0.91 on L2_5, L2_8 and L2_9");
    cert.premise("D_q(n) >= D_q(10) - omega/2 - omega/8 with omega = 0.035, D_q(10) > 0.036");
    for id in LemmaId::ALL {
        let found = certificates.iter().find(|c| c.target == id.name());
        let (ok, detail) = match found {
            None => (false, "missing".to_string()),
            Some(c) if c.passed => (true, format!("passed, min_margin {:e}", c.min_margin)),
            Some(c) => (false, format!("failed stages: {}", c.failed_stages().join(", "))),
        };
        cert.stage(format!("ingredient_{}", id.name()), ok, detail);
    }
    let margin = roll_up_margin();
    cert.record("roll_up_margin", ValueRecord::exact(&margin));
    let ingredients_ok = cert.stages.iter().all(|s| s.passed);
    cert.stage("margin_positive", margin > 0, format!("{margin}"));
    if ingredients_ok && margin > 0 {
        cert.observe_margin(margin.to_f64());
    }
    cert.finalize()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lemma_names_parse() {
        for (s, id) in [("2.4i", LemmaId::L2_4I), ("2.4ii", LemmaId::L2_4Ii), ("L2_5", LemmaId::L2_5), ("2.8", LemmaId::L2_8), ("l2-9", LemmaId::L2_9)] {
            assert_eq!(s.parse::<LemmaId>().unwrap(), id);
        }
        assert!("3.2".parse::<LemmaId>().is_err());
        for id in LemmaId::ALL {
            assert_eq!(id.name().parse::<LemmaId>().unwrap(), id);
        }
    }

    #[test]
    fn degenerate_sandwich() {
        let grid = GridSpec::single(r(0, 1), r(1, 2), 1).unwrap();
        let cert = sandwich_verify("unit", &Constant(r(1, 1)), &Constant(r(0, 1)), &grid, &VerifyOptions::default()).finalize();
        assert!(cert.passed);
        assert_eq!(cert.min_margin, 1.0);
        assert_eq!(cert.cells_checked, 1);
    }

    #[test]
    fn failing_cell_is_listed() {
        let grid = GridSpec::single(r(0, 1), r(1, 4), 4).unwrap();
        struct Identity;
        impl QFunction for Identity {
            fn eval<R: Real>(&self, q: &R) -> R {
                q.clone()
            }
        }
        let cert = sandwich_verify("id", &Identity, &Constant(r(1, 2)), &grid, &VerifyOptions::default()).finalize();
        assert!(!cert.passed);
        assert_eq!(cert.failures, vec![0, 1, 2]);
    }

    #[test]
    fn j2_limit_exact() {
        assert_eq!(j2().limit_at_one(), r(208609, 55440));
        let near = eval_at(&j2(), &r(999_999, 1_000_000), Mode::Certified, 128);
        assert!((near.mid_f64() - r(208609, 55440).to_f64()).abs() < 1e-3);
    }

    #[test]
    fn roll_up_value() {
        assert_eq!(roll_up_margin(), r(113, 8000));
        assert!(!combine_theorem_3_2(&[]).passed);
    }

    #[test]
    fn inflection_certificate() {
        let cert = verify_lemma(LemmaId::L2_5, &VerifyOptions::default()).unwrap();
        assert!(cert.passed, "{:?}", cert.stages);
        assert!((cert.values["delta_at_0_91"].lo - 1.767).abs() < 1e-3);
    }

    #[test]
    fn fast_mode_does_not_certify() {
        let cert = verify_lemma(LemmaId::L2_8, &VerifyOptions::fast()).unwrap();
        assert!(!cert.passed);
        assert_eq!(cert.failed_stages(), vec!["mode"]);
    }
}
