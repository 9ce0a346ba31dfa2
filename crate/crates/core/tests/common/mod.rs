//! Independent oracles: plain `f64` formulas, quadrature, finite differences
//! and root counting by sampling. None of these call into the library's
//! numerical code.
#![allow(dead_code)]

use divisor_series::verifier::Polynomial;
use rand::Rng;
use rug::Rational;

/// `phi_q(x)` from its defining formula.
pub fn phi(q: f64, x: f64) -> f64 {
    let qx = q.powf(x);
    qx * (qx - q * x + x - 1.0) / ((1.0 - qx) * (1.0 - qx))
}

/// Adaptive Simpson quadrature with Richardson correction.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + recurse(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    recurse(f, a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, 40)
}

pub fn central_difference(f: &dyn Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

pub fn second_difference(f: &dyn Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)
}

pub fn relative_error(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(1e-300)
}

/// Horner evaluation over exact rationals, lowest degree first.
pub fn eval_exact(coeffs: &[Rational], x: &Rational) -> Rational {
    coeffs.iter().rev().fold(Rational::new(), |acc, c| acc * x + c)
}

/// Distinct roots in `(a, b]` by exact sampling on `steps` points plus
/// bisection of every sign change down to `tol`.
///
/// Each sign change between neighbouring samples is refined to a bracket
/// narrower than `tol`, which must keep its sign change; exact zeros at
/// sample points are counted directly. Sound when distinct roots are more
/// than one sample step apart and every root has odd multiplicity or lands
/// on a sample point.
pub fn sampled_root_count(coeffs: &[Rational], a: &Rational, b: &Rational, steps: u32, tol: f64) -> usize {
    let sign = |x: &Rational| eval_exact(coeffs, x).cmp0();
    let width = Rational::from(b - a);
    let at = |k: u32| a + (&width * Rational::from((k, steps)));
    let mut count = 0;
    let mut prev = (a.clone(), sign(a));
    for k in 1..=steps {
        let x = at(k);
        let s = sign(&x);
        if s == std::cmp::Ordering::Equal {
            count += 1;
        } else if prev.1 != std::cmp::Ordering::Equal && s != prev.1 {
            let (mut lo, mut hi) = (prev.0.clone(), x.clone());
            while Rational::from(&hi - &lo).to_f64() > tol {
                let mid = Rational::from(&lo + &hi) / 2u32;
                let sm = sign(&mid);
                if sm == std::cmp::Ordering::Equal {
                    break;
                }
                if sm == prev.1 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            count += 1;
        }
        prev = (x, s);
    }
    count
}

fn r(n: i64, d: i64) -> Rational {
    Rational::from((n, d))
}

/// Degree <= 10, rational roots in `[-2, 2]`. Roots on the 1/60 lattice may
/// repeat; the others have denominators 7, 11 or 13 and are simple.
pub fn random_rooted_polynomial(rng: &mut impl Rng) -> Polynomial {
    let degree = rng.gen_range(1..=10);
    let mut roots = Vec::new();
    while roots.len() < degree {
        if rng.gen_bool(0.6) {
            let root = r(rng.gen_range(-120..=120), 60);
            let mult = rng.gen_range(1..=3).min(degree - roots.len());
            roots.extend(std::iter::repeat_n(root, mult));
        } else {
            let d = [7, 11, 13][rng.gen_range(0..3)];
            roots.push(r(rng.gen_range(-2 * d..2 * d), d));
        }
    }
    let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
    let scale = r(rng.gen_range(1..9) * sign, rng.gen_range(1..5));
    Polynomial::from_roots(&roots).scale(&scale)
}

/// `(q, x)` pairs for derivative checks: ten values of `q` in `(0, 1)` times
/// ten values of `x` in `[1.3, 25.6]`.
pub fn derivative_grid() -> Vec<(f64, f64)> {
    let qs = (0..10).map(|i| if i == 9 { 0.93 } else { 0.05 + 0.1 * i as f64 });
    qs.flat_map(|q| (0..10).map(move |j| (q, 1.3 + 2.7 * j as f64))).collect()
}
