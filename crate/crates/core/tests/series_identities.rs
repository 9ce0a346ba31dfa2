use divisor_series::divisor::{distinct_partition_stats, divisor_sieve};
use divisor_series::series::{
    build_representation, identity_report, merca_partition_inner, q_pochhammer, uchimura_inner,
    PochhammerLength, RepresentationId, TruncatedSeries,
};
use proptest::prelude::*;
use rug::Rational;

fn divisor_counts_by_trial(n: usize) -> Vec<i64> {
    (0..=n).map(|k| if k == 0 { 0 } else { (1..=k).filter(|d| k % d == 0).count() as i64 }).collect()
}

#[test]
fn all_routes_match_at_order_200() {
    let report = identity_report(200).unwrap();
    assert_eq!(report.len(), 5);
    for (id, outcome) in &report {
        assert!(outcome.matches, "{id}: first mismatch {:?}", outcome.first_mismatch_index);
    }
}

#[test]
fn every_route_equals_trial_division_counts() {
    let want = divisor_counts_by_trial(120);
    for id in RepresentationId::ALL {
        let s = build_representation(id, 120).unwrap();
        let got: Vec<i64> = s.coeffs().iter().map(|c| c.to_f64() as i64).collect();
        assert_eq!(got, want, "{id}");
        assert!(s.coeffs().iter().all(|c| *c.denom() == 1));
    }
}

#[test]
fn partition_difference_identity_at_60() {
    let order = 60;
    let stats = distinct_partition_stats(order).unwrap();
    let euler = q_pochhammer(PochhammerLength::Infinite, order);
    let product = euler.multiply(&build_representation(RepresentationId::Divisor, order).unwrap());
    let diffs = stats.differences();
    for k in 1..=order {
        assert_eq!(*product.coeff(k), Rational::from(diffs[k]), "k = {k}");
    }
    assert_eq!(merca_partition_inner(order).unwrap(), product);
}

#[test]
fn uchimura_inner_sum_at_100() {
    let order = 100;
    let t = build_representation(RepresentationId::Divisor, order).unwrap();
    let over_euler = t.multiply(&q_pochhammer(PochhammerLength::Infinite, order).reciprocal().unwrap());
    assert_eq!(uchimura_inner(order).unwrap(), over_euler);
}

#[test]
fn partition_stats_reach_order_200() {
    let stats = distinct_partition_stats(200).unwrap();
    assert_eq!(stats.n_max(), 200);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn hyperbola_identity(n in 1usize..1500) {
        let table = divisor_sieve(n).unwrap();
        let lhs: u64 = (1..=n).map(|k| table.get(k) as u64).sum();
        let rhs: u64 = (1..=n).map(|k| (n / k) as u64).sum();
        prop_assert_eq!(lhs, rhs);
        prop_assert!((1..=n).all(|k| table.get(k) as usize <= k));
    }

    #[test]
    fn reciprocal_inverts(c in prop::collection::vec(-9i64..9, 1..10)) {
        let order = 12;
        let mut coeffs = c.clone();
        coeffs[0] = 1;
        let s = TruncatedSeries::from_integers(order, coeffs);
        let inv = s.reciprocal().unwrap();
        prop_assert_eq!(s.multiply(&inv), TruncatedSeries::one(order));
    }
}
