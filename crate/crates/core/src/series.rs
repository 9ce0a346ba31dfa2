//! Exact truncated power series over the rationals and the six coefficient
//! routes to `T(q) = sum d(k) q^k`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use rug::Rational;
use serde::{Deserialize, Serialize};

use crate::divisor::{distinct_partition_stats, divisor_sieve};
use crate::error::{Error, Result};

/// `sum c[k] q^k + O(q^(N+1))` with exact rational coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    coeffs: Vec<Rational>,
}

impl TruncatedSeries {
    pub fn zero(order: usize) -> Self {
        TruncatedSeries { coeffs: vec![Rational::new(); order + 1] }
    }

    pub fn one(order: usize) -> Self {
        Self::monomial(order, 0, Rational::from(1))
    }

    /// `c q^power`, or zero if `power` exceeds the order.
    pub fn monomial(order: usize, power: usize, c: Rational) -> Self {
        let mut s = Self::zero(order);
        if power <= order {
            s.coeffs[power] = c;
        }
        s
    }

    /// Takes the first `order + 1` coefficients, padding with zeros.
    pub fn from_coeffs(order: usize, coeffs: impl IntoIterator<Item = Rational>) -> Self {
        let mut v: Vec<Rational> = coeffs.into_iter().take(order + 1).collect();
        v.resize(order + 1, Rational::new());
        TruncatedSeries { coeffs: v }
    }

    pub fn from_integers(order: usize, coeffs: impl IntoIterator<Item = i64>) -> Self {
        Self::from_coeffs(order, coeffs.into_iter().map(Rational::from))
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &Rational {
        &self.coeffs[k]
    }

    pub fn coeff_mut(&mut self, k: usize) -> &mut Rational {
        &mut self.coeffs[k]
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self::from_coeffs(order, self.coeffs.iter().cloned())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        TruncatedSeries { coeffs: self.coeffs.iter().map(|a| Rational::from(a * c)).collect() }
    }

    /// Multiplies by `q^k`, dropping what falls beyond the order.
    pub fn shift_up(&self, k: usize) -> Self {
        let n = self.order();
        let mut out = Self::zero(n);
        for i in 0..=n.saturating_sub(k) {
            if i + k <= n {
                out.coeffs[i + k] = self.coeffs[i].clone();
            }
        }
        out
    }

    /// Cauchy product truncated at the smaller order. Zero coefficients of
    /// the left factor are skipped, which keeps sparse products cheap.
    pub fn multiply(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        let mut out = Self::zero(n);
        for (i, a) in self.coeffs.iter().enumerate().take(n + 1) {
            if *a == 0 {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(n + 1 - i) {
                if *b != 0 {
                    out.coeffs[i + j] += Rational::from(a * b);
                }
            }
        }
        out
    }

    /// The series `b` with `self * b = 1` up to the order.
    pub fn reciprocal(&self) -> Result<Self> {
        let a0 = &self.coeffs[0];
        if *a0 == 0 {
            return Err(Error::ZeroConstantTerm);
        }
        let n = self.order();
        let inv0 = Rational::from(a0.recip_ref());
        let mut b: Vec<Rational> = Vec::with_capacity(n + 1);
        b.push(inv0.clone());
        for k in 1..=n {
            let mut acc = Rational::new();
            for i in 1..=k {
                let a = &self.coeffs[i];
                if *a != 0 {
                    acc += Rational::from(a * &b[k - i]);
                }
            }
            b.push(-(acc * &inv0));
        }
        Ok(TruncatedSeries { coeffs: b })
    }

    /// Index and both values of the first differing coefficient, comparing up
    /// to the smaller order.
    pub fn first_mismatch(&self, other: &Self) -> Option<usize> {
        self.coeffs.iter().zip(&other.coeffs).position(|(a, b)| a != b)
    }
}

impl fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if *c == 0 {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "{c}*q^{k}")?;
        }
        if first {
            f.write_str("0")?;
        }
        write!(f, " + O(q^{})", self.order() + 1)
    }
}

impl Add for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn add(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        let n = self.order().min(rhs.order());
        TruncatedSeries::from_coeffs(
            n,
            self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| Rational::from(a + b)),
        )
    }
}

impl Sub for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn sub(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        let n = self.order().min(rhs.order());
        TruncatedSeries::from_coeffs(
            n,
            self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| Rational::from(a - b)),
        )
    }
}

impl Mul for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn mul(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        self.multiply(rhs)
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        TruncatedSeries { coeffs: self.coeffs.iter().map(|c| Rational::from(-c)).collect() }
    }
}

/// Length of a q-shifted factorial `(q;q)_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PochhammerLength {
    Finite(usize),
    Infinite,
}

/// `(q;q)_k = prod_{j=1..k} (1 - q^j)` truncated at `order`. For the infinite
/// product only factors with `j <= order` can touch retained coefficients.
pub fn q_pochhammer(length: PochhammerLength, order: usize) -> TruncatedSeries {
    let factors = match length {
        PochhammerLength::Finite(k) => k.min(order),
        PochhammerLength::Infinite => order,
    };
    // in-place multiplication by (1 - q^j)
    let mut c = TruncatedSeries::one(order).coeffs;
    for j in 1..=factors {
        for i in (j..=order).rev() {
            let t = c[i - j].clone();
            c[i] -= t;
        }
    }
    TruncatedSeries { coeffs: c }
}

/// Coefficient routes to `T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RepresentationId {
    /// `sum d(k) q^k` straight from the divisor sieve.
    Divisor,
    /// `sum q^k / (1 - q^k)`.
    Lambert,
    /// `sum (1 + q^k)/(1 - q^k) q^(k^2)`.
    Clausen,
    /// `(q;q)_inf sum k q^k / (q;q)_k`.
    Uchimura,
    /// `1/(q;q)_inf sum (-1)^(k-1) k q^(k(k+1)/2) / (q;q)_k`.
    MercaAlt,
    /// `1/(q;q)_inf sum (s_o(k) - s_e(k)) q^k`.
    MercaPartition,
}

impl RepresentationId {
    pub const ALL: [RepresentationId; 6] = [
        RepresentationId::Divisor,
        RepresentationId::Lambert,
        RepresentationId::Clausen,
        RepresentationId::Uchimura,
        RepresentationId::MercaAlt,
        RepresentationId::MercaPartition,
    ];

    /// Every route except the reference `Divisor` one.
    pub fn alternatives() -> impl Iterator<Item = RepresentationId> {
        Self::ALL.into_iter().filter(|r| *r != RepresentationId::Divisor)
    }

    pub fn name(self) -> &'static str {
        match self {
            RepresentationId::Divisor => "DIVISOR",
            RepresentationId::Lambert => "LAMBERT",
            RepresentationId::Clausen => "CLAUSEN",
            RepresentationId::Uchimura => "UCHIMURA",
            RepresentationId::MercaAlt => "MERCA_ALT",
            RepresentationId::MercaPartition => "MERCA_PARTITION",
        }
    }
}

impl fmt::Display for RepresentationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RepresentationId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_uppercase().replace('-', "_");
        Self::ALL
            .into_iter()
            .find(|r| r.name() == norm)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown representation '{s}'")))
    }
}

fn check_order(order: usize) -> Result<()> {
    if order == 0 {
        Err(Error::InvalidArgument("series order must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// `1 / (1 - q^k)` up to `order`, i.e. `sum_m q^(km)`.
fn geometric(k: usize, order: usize) -> TruncatedSeries {
    let mut s = TruncatedSeries::zero(order);
    for m in (0..=order).step_by(k) {
        s.coeffs[m] = Rational::from(1);
    }
    s
}

pub fn build_representation(id: RepresentationId, order: usize) -> Result<TruncatedSeries> {
    check_order(order)?;
    let n = order;
    let series = match id {
        RepresentationId::Divisor => {
            let table = divisor_sieve(n)?;
            TruncatedSeries::from_coeffs(
                n,
                std::iter::once(Rational::new())
                    .chain(table.as_slice().iter().map(|&d| Rational::from(d))),
            )
        }
        RepresentationId::Lambert => {
            let mut acc = TruncatedSeries::zero(n);
            for k in 1..=n {
                // q^k / (1 - q^k)
                let term = geometric(k, n).shift_up(k);
                acc = &acc + &term;
            }
            acc
        }
        RepresentationId::Clausen => {
            let mut acc = TruncatedSeries::zero(n);
            for k in (1..).take_while(|k| k * k <= n) {
                let numer = &TruncatedSeries::one(n) + &TruncatedSeries::monomial(n, k, 1.into());
                let term = numer.multiply(&geometric(k, n)).shift_up(k * k);
                acc = &acc + &term;
            }
            acc
        }
        RepresentationId::Uchimura => {
            &q_pochhammer(PochhammerLength::Infinite, n) * &uchimura_inner(n)?
        }
        RepresentationId::MercaAlt => {
            let mut inner = TruncatedSeries::zero(n);
            for k in (1..).take_while(|k| k * (k + 1) / 2 <= n) {
                let sign = if k % 2 == 1 { 1 } else { -1 };
                let denom = q_pochhammer(PochhammerLength::Finite(k), n).reciprocal()?;
                let term = denom
                    .scale(&Rational::from(sign * k as i64))
                    .shift_up(k * (k + 1) / 2);
                inner = &inner + &term;
            }
            &q_pochhammer(PochhammerLength::Infinite, n).reciprocal()? * &inner
        }
        RepresentationId::MercaPartition => {
            &q_pochhammer(PochhammerLength::Infinite, n).reciprocal()? * &merca_partition_inner(n)?
        }
    };
    Ok(series)
}

/// `sum_{k=1..N} k q^k / (q;q)_k`.
pub fn uchimura_inner(order: usize) -> Result<TruncatedSeries> {
    check_order(order)?;
    let n = order;
    let mut inner = TruncatedSeries::zero(n);
    // running reciprocal of (q;q)_k, extended one factor at a time
    let mut recip = TruncatedSeries::one(n);
    for k in 1..=n {
        recip = recip.multiply(&geometric(k, n));
        let term = recip.scale(&Rational::from(k as i64)).shift_up(k);
        inner = &inner + &term;
    }
    Ok(inner)
}

/// `sum (s_o(k) - s_e(k)) q^k`.
pub fn merca_partition_inner(order: usize) -> Result<TruncatedSeries> {
    check_order(order)?;
    let stats = distinct_partition_stats(order)?;
    Ok(TruncatedSeries::from_coeffs(
        order,
        stats.differences().into_iter().map(|d| Rational::from(rug::Integer::from(d))),
    ))
}

/// Outcome of comparing one route against the divisor series.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityOutcome {
    #[serde(rename = "match")]
    pub matches: bool,
    pub first_mismatch_index: Option<usize>,
}

pub type IdentityReport = BTreeMap<RepresentationId, IdentityOutcome>;

pub fn identity_report(order: usize) -> Result<IdentityReport> {
    identity_report_with(order, build_representation)
}

/// Like [`identity_report`] with a caller-supplied builder, so a faulty
/// builder can be fed in and the mismatch location observed.
pub fn identity_report_with(
    order: usize,
    build: impl Fn(RepresentationId, usize) -> Result<TruncatedSeries> + Sync,
) -> Result<IdentityReport> {
    use rayon::prelude::*;
    check_order(order)?;
    let reference = build(RepresentationId::Divisor, order)?;
    let alternatives: Vec<_> = RepresentationId::alternatives().collect();
    alternatives
        .into_par_iter()
        .map(|id| {
            let s = build(id, order)?;
            let first = if s.order() < order {
                Some(s.order() + 1)
            } else {
                s.first_mismatch(&reference)
            };
            Ok((id, IdentityOutcome { matches: first.is_none(), first_mismatch_index: first }))
        })
        .collect()
}

/// The three companion series of `T`, each built from its coefficient
/// definition, and the closed form in `T` it equals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Companion {
    /// `sum (d(k+1) - d(k)) q^k  =  (1/q - 1) T(q) - 1`
    Difference,
    /// `sum_k (sum_{j<=k} d(j)) q^k  =  T(q) / (1 - q)`
    PartialSum,
    /// `sum_{k>=2} (sum_{j<k} d(j)/(k-j)) q^k  =  -log(1 - q) T(q)`
    LogConvolution,
}

pub fn companion_from_coefficients(which: Companion, order: usize) -> Result<TruncatedSeries> {
    check_order(order)?;
    let table = divisor_sieve(order + 1)?;
    let d = |k: usize| Rational::from(table.get(k));
    let mut s = TruncatedSeries::zero(order);
    for k in 1..=order {
        s.coeffs[k] = match which {
            Companion::Difference => d(k + 1) - d(k),
            Companion::PartialSum => (1..=k).map(d).fold(Rational::new(), |a, b| a + b),
            Companion::LogConvolution => (1..k)
                .map(|j| d(j) / Rational::from((k - j) as i64))
                .fold(Rational::new(), |a, b| a + b),
        };
    }
    Ok(s)
}

pub fn companion_closed_form(which: Companion, order: usize) -> Result<TruncatedSeries> {
    check_order(order)?;
    Ok(match which {
        Companion::Difference => {
            // (1/q) T needs T to one order higher
            let t = build_representation(RepresentationId::Divisor, order + 1)?;
            let over_q = TruncatedSeries::from_coeffs(order, t.coeffs[1..].iter().cloned());
            let t = t.truncate(order);
            &(&over_q - &t) - &TruncatedSeries::one(order)
        }
        Companion::PartialSum => {
            let t = build_representation(RepresentationId::Divisor, order)?;
            &t * &geometric(1, order)
        }
        Companion::LogConvolution => {
            let t = build_representation(RepresentationId::Divisor, order)?;
            // -log(1 - q) = sum q^m / m
            let log = TruncatedSeries::from_coeffs(
                order,
                std::iter::once(Rational::new())
                    .chain((1..=order as i64).map(|m| Rational::from((1, m)))),
            );
            &log * &t
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ints(s: &TruncatedSeries) -> Vec<i64> {
        s.coeffs()
            .iter()
            .map(|c| {
                assert_eq!(*c.denom(), 1);
                c.numer().to_i64().unwrap()
            })
            .collect()
    }

    /// Partition counts by recursion over the largest part.
    fn partitions_brute(n: usize) -> Vec<i64> {
        fn count(n: usize, max: usize) -> i64 {
            if n == 0 {
                return 1;
            }
            (1..=max.min(n)).map(|p| count(n - p, p)).sum()
        }
        (0..=n).map(|k| count(k, k)).collect()
    }

    #[test]
    fn multiply_examples() {
        let a = TruncatedSeries::from_integers(2, [1, 1]);
        let b = TruncatedSeries::from_integers(2, [1, -1]);
        assert_eq!(ints(&(&a * &b)), vec![1, 0, -1]);
        let geo = TruncatedSeries::from_integers(10, [1; 11]);
        let one_minus_q = TruncatedSeries::from_integers(10, [1, -1]);
        assert_eq!(&geo * &one_minus_q, TruncatedSeries::one(10));
        assert_eq!(&geo * &TruncatedSeries::one(10), geo);
    }

    #[test]
    fn multiply_truncates_to_smaller_order() {
        let a = TruncatedSeries::from_integers(5, [1, 2, 3, 4, 5, 6]);
        let b = TruncatedSeries::from_integers(2, [1, 1, 1]);
        assert_eq!((&a * &b).order(), 2);
    }

    #[test]
    fn reciprocal_examples() {
        let one_minus_q = TruncatedSeries::from_integers(4, [1, -1]);
        assert_eq!(ints(&one_minus_q.reciprocal().unwrap()), vec![1; 5]);
        let euler = q_pochhammer(PochhammerLength::Infinite, 20);
        assert_eq!(ints(&euler.reciprocal().unwrap()), partitions_brute(20));
        assert_eq!(
            TruncatedSeries::from_integers(3, [0, 1]).reciprocal(),
            Err(Error::ZeroConstantTerm)
        );
        let a = TruncatedSeries::from_coeffs(
            6,
            [(2, 3), (1, 5), (-7, 2), (0, 1), (4, 9), (1, 1), (3, 8)]
                .into_iter()
                .map(Rational::from),
        );
        assert_eq!(a.reciprocal().unwrap().reciprocal().unwrap(), a);
    }

    #[test]
    fn pochhammer_examples() {
        assert_eq!(ints(&q_pochhammer(PochhammerLength::Finite(0), 3)), vec![1, 0, 0, 0]);
        assert_eq!(ints(&q_pochhammer(PochhammerLength::Finite(2), 4)), vec![1, -1, -1, 1, 0]);
        // brute-force expansion of prod_{j<=15} (1 - q^j)
        let mut brute = vec![0i64; 16];
        brute[0] = 1;
        for j in 1..=15 {
            let mut next = brute.clone();
            for i in j..=15 {
                next[i] -= brute[i - j];
            }
            brute = next;
        }
        let euler = ints(&q_pochhammer(PochhammerLength::Infinite, 15));
        assert_eq!(euler, brute);
        assert_eq!(&euler[..8], &[1, -1, -1, 0, 0, 1, 0, 1]);
        let pentagonal: Vec<usize> = (1..4i64)
            .flat_map(|m| [m * (3 * m - 1) / 2, m * (3 * m + 1) / 2])
            .map(|v| v as usize)
            .collect();
        for (k, c) in euler.iter().enumerate() {
            if *c != 0 {
                assert!(k == 0 || pentagonal.contains(&k), "nonzero at {k}");
            }
        }
    }

    #[test]
    fn representation_examples() {
        let div = build_representation(RepresentationId::Divisor, 6).unwrap();
        assert_eq!(ints(&div), vec![0, 1, 2, 2, 3, 2, 4]);
        let lam = build_representation(RepresentationId::Lambert, 6).unwrap();
        assert_eq!(lam, div);
        let cl = build_representation(RepresentationId::Clausen, 1).unwrap();
        assert_eq!(ints(&cl), vec![0, 1]);
        assert!(build_representation(RepresentationId::Lambert, 0).is_err());
    }

    #[test]
    fn identity_report_small_orders() {
        for n in [1, 2, 7, 30, 50] {
            let report = identity_report(n).unwrap();
            assert_eq!(report.len(), 5);
            assert!(report.values().all(|o| o.matches), "order {n}: {report:?}");
        }
    }

    #[test]
    fn identity_report_flags_corrupted_builder() {
        let corrupt = |id, n| {
            let mut s = build_representation(id, n)?;
            if id == RepresentationId::Lambert {
                *s.coeff_mut(3) += 1;
            }
            Ok(s)
        };
        let report = identity_report_with(10, corrupt).unwrap();
        let lam = &report[&RepresentationId::Lambert];
        assert!(!lam.matches);
        assert_eq!(lam.first_mismatch_index, Some(3));
        assert!(report[&RepresentationId::Clausen].matches);
    }

    #[test]
    fn merca_partition_prefactor_identity() {
        let n = 60;
        let t = build_representation(RepresentationId::Divisor, n).unwrap();
        let lhs = &q_pochhammer(PochhammerLength::Infinite, n) * &t;
        assert_eq!(lhs, merca_partition_inner(n).unwrap());
    }

    #[test]
    fn uchimura_prefactor_identity() {
        let n = 100;
        let t = build_representation(RepresentationId::Divisor, n).unwrap();
        let rhs = &t * &q_pochhammer(PochhammerLength::Infinite, n).reciprocal().unwrap();
        assert_eq!(uchimura_inner(n).unwrap(), rhs);
    }

    #[test]
    fn companion_series_match_closed_forms() {
        for which in [Companion::Difference, Companion::PartialSum, Companion::LogConvolution] {
            let a = companion_from_coefficients(which, 60).unwrap();
            let b = companion_closed_form(which, 60).unwrap();
            assert_eq!(a, b, "{which:?}");
        }
    }

    #[test]
    fn representation_names_round_trip() {
        for id in RepresentationId::ALL {
            assert_eq!(id.name().parse::<RepresentationId>().unwrap(), id);
        }
        assert_eq!("merca-alt".parse::<RepresentationId>().unwrap(), RepresentationId::MercaAlt);
        assert!("fibonacci".parse::<RepresentationId>().is_err());
    }

    fn small_series() -> impl Strategy<Value = TruncatedSeries> {
        proptest::collection::vec((-20i64..20, 1i64..6), 8)
            .prop_map(|v| TruncatedSeries::from_coeffs(7, v.into_iter().map(Rational::from)))
    }

    proptest! {
        #[test]
        fn multiply_commutes_and_associates(a in small_series(), b in small_series(), c in small_series()) {
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        }

        #[test]
        fn product_coefficient_depends_on_prefix_only(a in small_series(), b in small_series(), k in 0usize..8) {
            let full = &a * &b;
            let prefix = &a.truncate(k) * &b.truncate(k);
            prop_assert_eq!(full.truncate(k), prefix);
        }
    }
}
