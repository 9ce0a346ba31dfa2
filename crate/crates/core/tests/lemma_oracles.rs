mod common;

use divisor_series::lemma::{self, PhiPoint};
use divisor_series::{Approx, Interval, Mode, Real};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Rational;

const P: u32 = 128;

fn fast(q: f64, x: f64) -> PhiPoint<Approx> {
    PhiPoint::new(&Approx::exact(q), &Approx::exact(x))
}

fn ival(n: i64, d: i64) -> Interval {
    Interval::from_rational(P, &Rational::from((n, d)))
}

#[test]
fn first_derivative_matches_central_difference() {
    for (q, x) in common::derivative_grid() {
        let want = common::central_difference(&|t| common::phi(q, t), x, 1e-5);
        let got = lemma::phi_prime(&fast(q, x)).value;
        if want.abs() > 1e-12 {
            assert!(common::relative_error(got, want) < 1e-5, "q={q} x={x}: {got} vs {want}");
        }
    }
}

#[test]
fn second_derivative_matches_central_difference() {
    for (q, x) in common::derivative_grid() {
        let h = 1e-5 * x;
        let f = |t: f64| lemma::phi_prime(&fast(q, t)).value;
        let want = common::central_difference(&f, x, h);
        let got = lemma::phi_second(&fast(q, x)).value;
        let coarse = common::second_difference(&|t| common::phi(q, t), x, 1e-3);
        if want.abs() > 1e-10 {
            assert!(common::relative_error(got, want) < 1e-5, "q={q} x={x}: {got} vs {want}");
            assert!(common::relative_error(got, coarse) < 1e-3);
        }
    }
}

#[test]
fn finite_difference_at_reference_point() {
    let (q, x, h) = (0.7, 3.0, 1e-6);
    let want = common::central_difference(&|t| common::phi(q, t), x, h);
    let got = lemma::phi_prime(&fast(q, x)).value;
    assert!(common::relative_error(got, want) < 1e-6);
}

#[test]
fn antiderivative_matches_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let q: f64 = rng.gen_range(0.05..0.97);
        let a: f64 = rng.gen_range(1.0..20.0);
        let b = a + rng.gen_range(0.1..15.0);
        let want = common::integrate(&|t| common::phi(q, t), a, b, 1e-13);
        let qi = Interval::from_f64(P, q);
        let at = |x: f64| lemma::big_phi(&PhiPoint::new(&qi, &Interval::from_f64(P, x)));
        let got = (at(b) - at(a)).mid_f64();
        assert!((got - want).abs() < 1e-8, "q={q} [{a},{b}]: {got} vs {want}");
    }
}

#[test]
fn quadrature_reference_interval() {
    let want = common::integrate(&|t| common::phi(0.6, t), 2.0, 5.0, 1e-13);
    let q = Rational::from((3, 5));
    let hi = lemma::phi_antiderivative(&q, &Rational::from(5), Mode::Certified).unwrap();
    let lo = lemma::phi_antiderivative(&q, &Rational::from(2), Mode::Certified).unwrap();
    assert!(((hi - lo).mid_f64() - want).abs() < 1e-8);
}

#[test]
fn phi_increasing_in_q() {
    for x in [1.5, 2.0, 3.0, 7.5, 14.0, 40.0] {
        let xi = Interval::from_f64(P, x);
        let vals: Vec<Interval> =
            (1..100).map(|k| lemma::phi(&PhiPoint::new(&ival(k, 100), &xi))).collect();
        assert!(vals.windows(2).all(|w| w[0].certainly_lt(&w[1])), "x = {x}");
    }
}

#[test]
fn k_decreasing_in_x() {
    for q in [5, 30, 60, 91, 99] {
        let qi = ival(q, 100);
        let vals: Vec<Interval> = (2..400).map(|h| lemma::k_fn(&PhiPoint::new(&qi, &ival(h, 4)))).collect();
        assert!(vals.windows(2).all(|w| w[1].certainly_lt(&w[0])), "q = {q}/100");
    }
}

#[test]
fn theta_increasing_in_x_near_one() {
    for q in [910, 930, 960, 990, 999] {
        let qi = ival(q, 1000);
        let vals: Vec<Interval> = (1..400).map(|h| lemma::theta(&PhiPoint::new(&qi, &ival(h, 4)))).collect();
        assert!(vals.windows(2).all(|w| w[0].certainly_lt(&w[1])), "q = {q}/1000");
    }
}

#[test]
fn derivative_floor_near_one() {
    let floor = ival(-35, 1000);
    for q in (910..1000).step_by(7) {
        let qi = ival(q, 1000);
        for h in 2..=200 {
            let v = lemma::phi_prime(&PhiPoint::at_integer(&qi, h));
            assert!(floor.certainly_lt(&v), "q = {q}/1000, x = {h}");
        }
    }
}

#[test]
fn limit_formula_near_one() {
    let q = Interval::from_rational(P, &(Rational::from(1) - Rational::from((1, 1_000_000))));
    for x in 1..=11u32 {
        let v = lemma::phi(&PhiPoint::at_integer(&q, x));
        let want = lemma::phi_limit_at_one(&Rational::from(x)).to_f64();
        assert!((v.mid_f64() - want).abs() < 1e-4, "x = {x}");
    }
}

#[test]
fn recorded_auxiliary_values() {
    let y = -ival(117, 1000).ln();
    let v = lemma::v_fn(&y);
    assert!((v.mid_f64() - 0.0022).abs() < 5e-4);
    let q = ival(91, 100);
    assert!((lemma::delta(&q).mid_f64() - 1.76).abs() < 0.01);
    assert!((lemma::g0(&q).mid_f64() + 0.0028).abs() < 5e-4);
    let h = (lemma::h2(&q) + lemma::h3(&q)) / q.int(14);
    assert!((h.mid_f64() - 0.034).abs() < 1e-3);
    let c = lemma::correction_sums(&Rational::from((1, 10)), 1, Mode::Certified).unwrap();
    assert!(c.c_n.certainly_positive());
    let d = lemma::correction_sums(&Rational::from((95, 100)), 10, Mode::Certified).unwrap();
    assert!(d.d_n.lo_f64() > 0.036);
}

#[test]
fn c39_positive_on_sample_points() {
    for q in [117, 300, 500, 700, 835, 900, 910] {
        let s = lemma::correction_sums(&Rational::from((q, 1000)), 39, Mode::Certified).unwrap();
        assert!(s.c_n.certainly_positive(), "q = {q}/1000");
    }
}

#[test]
fn critical_points_near_one() {
    let cp = lemma::critical_points(&Rational::from((91, 100))).unwrap();
    assert!(cp.n_q >= 14.0);
    let qi = ival(91, 100);
    let a = |x: f64| lemma::a_q(&PhiPoint::new(&qi, &Interval::from_f64(P, x)));
    assert!(a(cp.n_q - 1e-6).certainly_negative());
    assert!(a(cp.n_q + 1e-6).certainly_positive());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn phi_vanishes_at_one(n in 1i64..10_000) {
        let v = lemma::phi(&PhiPoint::at_integer(&ival(n, 10_001), 1));
        prop_assert!(v.contains_zero());
    }

    #[test]
    fn rho_sigma_relation(n in 1i64..99, m in 1u32..20) {
        let q = ival(n, 100);
        let s = lemma::correction_sums_generic(&q, m).unwrap();
        let at = |k| lemma::phi(&PhiPoint::at_integer(&q, k));
        let rhs = q.ratio(1, 2) * (at(1) - at(m + 1));
        prop_assert!((s.c_n - s.d_n).intersects(&rhs));
    }

    #[test]
    fn fast_and_certified_agree(n in 1i64..99, x in 1u32..60) {
        let q = Rational::from((n, 100));
        let x = Rational::from(x);
        let f = lemma::phi_bundle(&q, &x, Mode::Fast).unwrap();
        let c = lemma::phi_bundle(&q, &x, Mode::Certified).unwrap();
        prop_assert!(f.phi.intersects(&c.phi));
        prop_assert!(f.phi_prime.intersects(&c.phi_prime));
        prop_assert!(f.phi_second.intersects(&c.phi_second));
    }
}
