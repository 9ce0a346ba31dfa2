//! Dense polynomials over the rationals and Sturm root counting.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rug::{Integer, Rational};

use crate::error::{Error, Result};
use crate::real::Real;

/// Coefficients lowest degree first; never carries trailing zeros.
#[derive(Clone, PartialEq, Eq)]
pub struct Polynomial {
    coeffs: Vec<Rational>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| *c == 0) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn from_integers(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Rational::from(c)).collect())
    }

    /// Builds from `(exponent, coefficient)` pairs.
    pub fn from_sparse_integers(terms: &[(usize, i64)]) -> Self {
        let len = terms.iter().map(|&(e, _)| e + 1).max().unwrap_or(0);
        let mut coeffs = vec![Rational::new(); len];
        for &(e, c) in terms {
            coeffs[e] += c;
        }
        Self::new(coeffs)
    }

    /// `prod (x - r)` over the given roots.
    pub fn from_roots(roots: &[Rational]) -> Self {
        roots.iter().fold(Self::from_integers(&[1]), |acc, r| {
            &acc * &Self::new(vec![Rational::from(-r), Rational::from(1)])
        })
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::new();
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    /// Horner evaluation in any [`Real`] back end.
    pub fn eval_real<R: Real>(&self, x: &R) -> R {
        let mut acc = x.int(0);
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + x.rat(c);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| Rational::from(c * Integer::from(k)))
                .collect(),
        )
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|c| Rational::from(c * s)).collect())
    }

    /// Euclidean division; `Err` when dividing by zero.
    pub fn div_rem(&self, divisor: &Polynomial) -> Result<(Polynomial, Polynomial)> {
        let dd = divisor.degree().ok_or(Error::ZeroPolynomial)?;
        let lead = divisor.coeffs[dd].clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Polynomial::zero(), self.clone()));
        }
        let mut quot = vec![Rational::new(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = Rational::from(&rem[k + dd] / &lead);
            if c != 0 {
                for (j, d) in divisor.coeffs.iter().enumerate() {
                    rem[k + j] -= Rational::from(&c * d);
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        Ok((Polynomial::new(quot), Polynomial::new(rem)))
    }

    /// Positive rational multiple with coprime integer coefficients.
    pub fn primitive(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut den = Integer::from(1);
        for c in &self.coeffs {
            den.lcm_mut(c.denom());
        }
        let ints: Vec<Integer> =
            self.coeffs.iter().map(|c| Integer::from(c.numer() * &den) / c.denom()).collect();
        let mut content = Integer::new();
        for i in &ints {
            content.gcd_mut(i);
        }
        Self::new(ints.into_iter().map(|i| Rational::from(i / &content)).collect())
    }

    /// `p, p', -rem(p_{i-1}, p_i), ...`, each reduced to its primitive part
    /// by a positive factor so signs are unchanged.
    pub fn sturm_chain(&self) -> Result<Vec<Polynomial>> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let mut chain = vec![self.primitive()];
        let d = self.derivative();
        if d.is_zero() {
            return Ok(chain);
        }
        chain.push(d.primitive());
        loop {
            let n = chain.len();
            let (_, r) = chain[n - 2].div_rem(&chain[n - 1])?;
            if r.is_zero() {
                return Ok(chain);
            }
            chain.push((-&r).primitive());
        }
    }

    /// `p / gcd(p, p')`: same roots, all simple.
    pub fn squarefree_part(&self) -> Result<Self> {
        let chain = self.sturm_chain()?;
        let g = chain.last().expect("chain is nonempty");
        if g.degree() == Some(0) {
            return Ok(chain[0].clone());
        }
        let (quot, rem) = chain[0].div_rem(g)?;
        debug_assert!(rem.is_zero());
        Ok(quot.primitive())
    }

    fn sign_at(&self, x: &Rational) -> i32 {
        self.eval(x).cmp0() as i32
    }
}

/// Sign changes in the chain at `x`, zeros skipped.
pub fn sign_variations(chain: &[Polynomial], x: &Rational) -> usize {
    let mut last = 0;
    let mut count = 0;
    for p in chain {
        let s = p.sign_at(x);
        if s != 0 {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
    }
    count
}

/// Number of distinct real roots of `p` in the half-open interval `(a, b]`.
///
/// The chain is built from the squarefree part, so multiple roots count
/// once and endpoints that are roots do not zero out the whole chain.
/// Zeros are dropped when counting sign variations: a root sitting on `b`
/// is counted and one on `a` is not.
pub fn sturm_root_count(p: &Polynomial, a: &Rational, b: &Rational) -> Result<usize> {
    if a >= b {
        return Err(Error::InvalidArgument(format!("empty interval ({a}, {b}]")));
    }
    let chain = p.squarefree_part()?.sturm_chain()?;
    let va = sign_variations(&chain, a);
    let vb = sign_variations(&chain, b);
    Ok(va - vb)
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0)
            .map(|(k, c)| match k {
                0 => format!("{c}"),
                1 => format!("({c})x"),
                _ => format!("({c})x^{k}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = vec![Rational::new(); n];
        for (k, c) in self.coeffs.iter().enumerate() {
            out[k] += c;
        }
        for (k, c) in rhs.coeffs.iter().enumerate() {
            out[k] += c;
        }
        Polynomial::new(out)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| Rational::from(-c)).collect())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![Rational::new(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == 0 {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += Rational::from(a * b);
            }
        }
        Polynomial::new(out)
    }
}
