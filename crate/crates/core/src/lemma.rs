//! The auxiliary function `phi_q(x) = q^x (q^x - q x + x - 1) / (1 - q^x)^2`,
//! its derivatives and antiderivative, the rectangle/trapezoid error sums
//! built from it, and the bound functions used to control them.
//!
//! All functions are generic over [`Real`]; run them on [`Interval`] for
//! enclosures and on [`Approx`] for quick values.
//!
//! Note on `C_q(n)`: by definition it sums `phi_q(k)` for `k = 2..n+1`. Some
//! displays sum from `k = 1`; the two agree because `phi_q(1) = 0`.

use rug::Rational;

use crate::error::{Error, Result};
use crate::real::{Approx, Interval, Mode, Real, DEFAULT_PRECISION};
use crate::verifier::Polynomial;

/// `q`, `x` and the shared subexpressions `q^x`, `log q`.
#[derive(Debug, Clone)]
pub struct PhiPoint<R> {
    pub q: R,
    pub x: R,
    pub qx: R,
    pub log_q: R,
}

impl<R: Real> PhiPoint<R> {
    pub fn new(q: &R, x: &R) -> Self {
        PhiPoint { q: q.clone(), x: x.clone(), qx: q.pow(x), log_q: q.ln() }
    }

    /// Integer abscissa; `q^k` by repeated squaring instead of `exp/log`.
    pub fn at_integer(q: &R, k: u32) -> Self {
        Self::at_integer_with_log(q, &q.ln(), k)
    }

    pub fn at_integer_with_log(q: &R, log_q: &R, k: u32) -> Self {
        PhiPoint { q: q.clone(), x: q.int(k as i64), qx: q.powi(k), log_q: log_q.clone() }
    }

    fn one(&self) -> R {
        self.q.int(1)
    }

    fn one_minus_qx(&self) -> R {
        self.one() - self.qx.clone()
    }
}

pub fn phi<R: Real>(p: &PhiPoint<R>) -> R {
    let PhiPoint { q, x, qx, .. } = p;
    let d = p.one_minus_qx();
    qx.clone() * (qx.clone() - q.clone() * x.clone() + x.clone() - p.one()) / (d.clone() * d)
}

/// First derivative in `x`, closed form.
pub fn phi_prime<R: Real>(p: &PhiPoint<R>) -> R {
    let PhiPoint { q, x, qx, log_q } = p;
    let one = p.one();
    let d = p.one_minus_qx();
    let one_minus_q = one.clone() - q.clone();
    let bracket = -(x.clone() * one_minus_q.clone() * (one.clone() + qx.clone())) / d.clone() + one
        - one_minus_q / log_q.clone();
    -(qx.clone() * log_q.clone()) / (d.clone() * d) * bracket
}

/// The sign-carrying factor of the second derivative.
pub fn a_q<R: Real>(p: &PhiPoint<R>) -> R {
    let PhiPoint { q, x, qx, log_q } = p;
    let one = p.one();
    let one_minus_q = one.clone() - q.clone();
    let q2x = qx.clone() * qx.clone();
    let one_minus_q2x = one.clone() - q2x.clone();
    let first = -(x.clone() * (one + q.int(4) * qx.clone() + q2x) * log_q.clone());
    one_minus_q.clone()
        * (first - q.int(2) * one_minus_q2x.clone() + one_minus_q2x * log_q.clone() / one_minus_q)
}

/// Second derivative: `-q^x log(q) / (1 - q^x)^4 * a_q(x)`.
pub fn phi_second<R: Real>(p: &PhiPoint<R>) -> R {
    let d2 = p.one_minus_qx() * p.one_minus_qx();
    -(p.qx.clone() * p.log_q.clone()) / (d2.clone() * d2) * a_q(p)
}

/// `b_q(x)`, positive for `x >= 1`; `a_q'' = 4 q^x log(q)^2 (1-q) b_q`.
pub fn b_q<R: Real>(p: &PhiPoint<R>) -> R {
    let PhiPoint { q, x, qx, log_q } = p;
    let one = p.one();
    let one_minus_q = one.clone() - q.clone();
    -log_q.clone() / one_minus_q.clone() * (x.clone() * one_minus_q * (one + qx.clone()) + qx.clone())
        + qx.clone()
        - q.int(2)
}

/// Closed-form antiderivative `Phi_q` with `Phi_q' = phi_q`, `Phi_q(inf) = 0`.
///
/// The leading numerator `q^(x+1) - (1 + log q) q^x + 1 - q + log q` factors
/// as `(1 - q^x)(1 - q + log q)`; the factored form avoids the cancellation
/// of the expanded one when `q` is close to 1.
pub fn big_phi<R: Real>(p: &PhiPoint<R>) -> R {
    let PhiPoint { q, x, qx, log_q } = p;
    let one = p.one();
    let d = p.one_minus_qx();
    let one_minus_q = one.clone() - q.clone();
    let c = one_minus_q.clone() + log_q.clone();
    c * (-qx.clone()).ln_1p() / (log_q.clone() * log_q.clone())
        + x.clone() * qx.clone() * one_minus_q / (d * log_q.clone())
}

/// `Phi_q` transcribed term by term from its expanded display; kept for
/// cross-checking [`big_phi`].
pub fn big_phi_expanded<R: Real>(p: &PhiPoint<R>) -> R {
    let PhiPoint { q, x, qx, log_q } = p;
    let one = p.one();
    let d = p.one_minus_qx();
    let numer = (qx.clone() * q.clone() - (one.clone() + log_q.clone()) * qx.clone() + one.clone()
        - q.clone()
        + log_q.clone())
        * d.ln()
        + x.clone() * qx.clone() * (one - q.clone()) * log_q.clone();
    numer / (d * log_q.clone() * log_q.clone())
}

/// `A_q = int_1^inf phi_q = -Phi_q(1)`.
pub fn a_const<R: Real>(q: &R) -> R {
    let one = q.int(1);
    let log_q = q.ln();
    let one_minus_q = one - q.clone();
    -((one_minus_q.clone() + log_q.clone()) * one_minus_q.ln() + q.clone() * log_q.clone())
        / (log_q.clone() * log_q)
}

/// `lim_{q -> 1} phi_q(x) = (x - 1) / (2x)`.
pub fn phi_limit_at_one(x: &Rational) -> Rational {
    Rational::from(x - 1u32) / (Rational::from(2) * x)
}

/// `phi_q`, `phi_q'`, `a_q`, `phi_q''` at one point.
#[derive(Debug, Clone)]
pub struct PhiBundle<R> {
    pub phi: R,
    pub phi_prime: R,
    pub a_value: R,
    pub phi_second: R,
}

fn check_x(x: &Rational) -> Result<()> {
    if *x < 1 {
        Err(Error::Domain(format!("x = {} must be at least 1", x.to_f64())))
    } else {
        Ok(())
    }
}

fn check_q(q: &Rational) -> Result<()> {
    if *q > 0 && *q < 1 {
        Ok(())
    } else {
        Err(Error::Domain(format!("q = {} is outside (0, 1)", q.to_f64())))
    }
}

pub fn phi_bundle_generic<R: Real>(p: &PhiPoint<R>) -> PhiBundle<R> {
    PhiBundle { phi: phi(p), phi_prime: phi_prime(p), a_value: a_q(p), phi_second: phi_second(p) }
}

/// Bundle of enclosures (certified) or `value ± err` intervals (fast).
pub fn phi_bundle(q: &Rational, x: &Rational, mode: Mode) -> Result<PhiBundle<Interval>> {
    check_q(q)?;
    check_x(x)?;
    Ok(match mode {
        Mode::Certified => {
            let qi = Interval::from_rational(DEFAULT_PRECISION, q);
            let b = phi_bundle_generic(&PhiPoint::new(&qi, &qi.rat(x)));
            b
        }
        Mode::Fast => {
            let qa = Approx::exact(0.0).rat(q);
            let b = phi_bundle_generic(&PhiPoint::new(&qa, &qa.rat(x)));
            PhiBundle {
                phi: b.phi.to_enclosure(),
                phi_prime: b.phi_prime.to_enclosure(),
                a_value: b.a_value.to_enclosure(),
                phi_second: b.phi_second.to_enclosure(),
            }
        }
    })
}

pub fn phi_antiderivative(q: &Rational, x: &Rational, mode: Mode) -> Result<Interval> {
    check_q(q)?;
    check_x(x)?;
    Ok(match mode {
        Mode::Certified => {
            let qi = Interval::from_rational(DEFAULT_PRECISION, q);
            big_phi(&PhiPoint::new(&qi, &qi.rat(x)))
        }
        Mode::Fast => {
            let qa = Approx::exact(0.0).rat(q);
            big_phi(&PhiPoint::new(&qa, &qa.rat(x))).to_enclosure()
        }
    })
}

/// `sigma_q(j)`, `rho_q(j)` for `j = 1..=n` and their sums `C_q(n)`, `D_q(n)`.
#[derive(Debug, Clone)]
pub struct CorrectionSums<R> {
    pub sigma: Vec<R>,
    pub rho: Vec<R>,
    pub c_n: R,
    pub d_n: R,
}

/// Integrals are `Phi_q` differences, so every entry is a closed form.
pub fn correction_sums_generic<R: Real>(q: &R, n: u32) -> Result<CorrectionSums<R>> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let log_q = q.ln();
    let points: Vec<PhiPoint<R>> =
        (1..=n + 1).map(|k| PhiPoint::at_integer_with_log(q, &log_q, k)).collect();
    let phis: Vec<R> = points.iter().map(phi).collect();
    let antis: Vec<R> = points.iter().map(big_phi).collect();
    let half = q.ratio(1, 2);
    let mut sigma = Vec::with_capacity(n as usize);
    let mut rho = Vec::with_capacity(n as usize);
    for j in 0..n as usize {
        let integral = antis[j + 1].clone() - antis[j].clone();
        sigma.push(integral.clone() - phis[j + 1].clone());
        rho.push(integral - half.clone() * (phis[j].clone() + phis[j + 1].clone()));
    }
    let zero = q.int(0);
    let c_n = sigma.iter().cloned().fold(zero.clone(), |a, b| a + b);
    let d_n = rho.iter().cloned().fold(zero, |a, b| a + b);
    Ok(CorrectionSums { sigma, rho, c_n, d_n })
}

pub fn correction_sums(q: &Rational, n: u32, mode: Mode) -> Result<CorrectionSums<Interval>> {
    check_q(q)?;
    match mode {
        Mode::Certified => {
            correction_sums_generic(&Interval::from_rational(DEFAULT_PRECISION, q), n)
        }
        Mode::Fast => {
            let s = correction_sums_generic(&Approx::exact(0.0).rat(q), n)?;
            Ok(CorrectionSums {
                sigma: s.sigma.iter().map(Real::to_enclosure).collect(),
                rho: s.rho.iter().map(Real::to_enclosure).collect(),
                c_n: s.c_n.to_enclosure(),
                d_n: s.d_n.to_enclosure(),
            })
        }
    }
}

/// Maximizer `M_q` of `phi_q` and inflection point `N_q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalPoints {
    pub m_q: f64,
    pub n_q: f64,
    pub bracket_width: f64,
}

const BISECTION_WIDTH: f64 = 1e-10;
const BRACKET_START: f64 = 64.0;
const BRACKET_LIMIT: f64 = 1_048_576.0; // 2^20

/// Sign of `f(x)` from a certified enclosure; `None` when undecided.
fn enclosure_sign(v: &Interval) -> Option<bool> {
    if v.certainly_positive() {
        Some(true)
    } else if v.certainly_negative() {
        Some(false)
    } else {
        None
    }
}

/// Bisects on `[1, X]` for a sign change from `start_positive` to its
/// opposite. `X` doubles from 64 until the sign flips.
fn bisect_sign_change(
    what: &'static str,
    start_positive: bool,
    f: impl Fn(f64) -> Option<bool>,
) -> Result<(f64, f64)> {
    let mut hi = BRACKET_START;
    loop {
        if f(hi) == Some(!start_positive) {
            break;
        }
        hi *= 2.0;
        if hi > BRACKET_LIMIT {
            return Err(Error::SearchFailure { what, limit: BRACKET_LIMIT });
        }
    }
    let mut lo = 1.0;
    while hi - lo > BISECTION_WIDTH {
        let mid = 0.5 * (lo + hi);
        match f(mid) {
            Some(s) if s == start_positive => lo = mid,
            Some(_) => hi = mid,
            None => break,
        }
    }
    Ok((lo, hi))
}

pub fn critical_points(q: &Rational) -> Result<CriticalPoints> {
    check_q(q)?;
    let qi = Interval::from_rational(DEFAULT_PRECISION, q);
    let log_q = qi.ln();
    let point = |x: f64| {
        let xi = Interval::from_f64(DEFAULT_PRECISION, x);
        PhiPoint { q: qi.clone(), x: xi.clone(), qx: qi.pow(&xi), log_q: log_q.clone() }
    };
    let (m_lo, m_hi) =
        bisect_sign_change("phi_q'", true, |x| enclosure_sign(&phi_prime(&point(x))))?;
    let (n_lo, n_hi) = bisect_sign_change("a_q", false, |x| enclosure_sign(&a_q(&point(x))))?;
    Ok(CriticalPoints {
        m_q: 0.5 * (m_lo + m_hi),
        n_q: 0.5 * (n_lo + n_hi),
        bracket_width: (m_hi - m_lo).max(n_hi - n_lo),
    })
}

/// `U(q)`, with `C_q(1) = U(q) / ((q+1)^2 log(q)^2)`.
pub fn u_fn<R: Real>(q: &R) -> R {
    let one = q.int(1);
    let log_q = q.ln();
    let qp1 = q.clone() + one.clone();
    -((one.clone() - q.clone() * q.clone() + q.clone() * log_q.clone()) * q.clone() * log_q.clone())
        - qp1.clone() * qp1.clone() * (q.clone() - one - log_q) * qp1.ln()
}

/// `V(y) = 1 + (1 - 2y - y^2) e^-y - (1 + 2y) e^-2y - e^-3y`.
pub fn v_fn<R: Real>(y: &R) -> R {
    let one = y.int(1);
    let e1 = (-y.clone()).exp();
    let e2 = e1.clone() * e1.clone();
    let e3 = e2.clone() * e1.clone();
    one.clone() + (one.clone() - y.int(2) * y.clone() - y.clone() * y.clone()) * e1
        - (one + y.int(2) * y.clone()) * e2
        - e3
}

/// `V'(y) = (y^2 - 3) e^-y + 4y e^-2y + 3 e^-3y`; each term is positive for
/// `y >= sqrt(3)`.
pub fn v_prime<R: Real>(y: &R) -> R {
    let e1 = (-y.clone()).exp();
    let e2 = e1.clone() * e1.clone();
    let e3 = e2.clone() * e1.clone();
    (y.clone() * y.clone() - y.int(3)) * e1 + y.int(4) * y.clone() * e2 + y.int(3) * e3
}

/// `Theta_q(x)`: `phi_q'` with the `+1` inside the bracket replaced by `+q`.
pub fn theta<R: Real>(p: &PhiPoint<R>) -> R {
    let PhiPoint { q, x, qx, log_q } = p;
    let one = p.one();
    let d = p.one_minus_qx();
    let one_minus_q = one.clone() - q.clone();
    let bracket = -(x.clone() * one_minus_q.clone() * (one + qx.clone())) / d.clone() + q.clone()
        - one_minus_q / log_q.clone();
    -(qx.clone() * log_q.clone()) / (d.clone() * d) * bracket
}

/// `K_q(x) = x q^x / (1 - q^x)^2`.
pub fn k_fn<R: Real>(p: &PhiPoint<R>) -> R {
    let d = p.one_minus_qx();
    p.x.clone() * p.qx.clone() / (d.clone() * d)
}

pub fn h1<R: Real>(q: &R) -> R {
    let q14 = q.powi(14);
    -(q14.clone() * q.ln()) / (q.int(1) - q14)
}

pub fn h2<R: Real>(q: &R) -> R {
    (q.int(1) - q.clone()) / (q.int(1) - q.powi(14))
}

pub fn h3<R: Real>(q: &R) -> R {
    let one = q.int(1);
    let q14 = q.powi(14);
    let d = one.clone() - q14.clone();
    (q.int(14) * (one.clone() - q.clone()) * (one.clone() + q14) / d.clone() - q.clone() - one) / d
}

/// The polynomial `Delta(q) = 13 - 14q + 56q^14 - 56q^15 + 15q^28 - 14q^29`.
pub fn delta_polynomial() -> Polynomial {
    Polynomial::from_sparse_integers(&[(0, 13), (1, -14), (14, 56), (15, -56), (28, 15), (29, -14)])
}

/// `G_0(q) = (1 + 11/20 (1 - q)) Delta(q) + 2 (q^28 - 1)`.
pub fn g0_polynomial() -> Polynomial {
    let factor = Polynomial::new(vec![Rational::from((31, 20)), Rational::from((-11, 20))]);
    let tail = Polynomial::from_sparse_integers(&[(0, -2), (28, 2)]);
    &(&factor * &delta_polynomial()) + &tail
}

pub fn delta<R: Real>(q: &R) -> R {
    delta_polynomial().eval_real(q)
}

pub fn g0<R: Real>(q: &R) -> R {
    g0_polynomial().eval_real(q)
}

/// `G(q) = -log(q) Delta(q) + 2 (1 - q)(q^28 - 1)`, a positive multiple of
/// `a_q(14)` on `(0, 1)`.
pub fn g_fn<R: Real>(q: &R) -> R {
    let one = q.int(1);
    -q.ln() * delta(q) + q.int(2) * (one.clone() - q.clone()) * (q.powi(28) - one)
}
