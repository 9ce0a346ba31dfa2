//! Stored mathematical constants.

use rug::Rational;

/// Euler's constant truncated to 64 decimal places, so the true value lies in
/// `[EULER_GAMMA_DIGITS, EULER_GAMMA_DIGITS + 10^-64]`.
///
/// Digits from OEIS A001620 (computed there to well over 10^5 places); the
/// unit tests cross-check them against MPFR's independent `const_euler`.
pub const EULER_GAMMA_DIGITS: &str =
    "0.5772156649015328606065120900824024310421593359399235988057672348";

const GAMMA_TRUNCATION_EXP: u32 = 64;

/// Lower and upper rational bounds for Euler's constant.
pub fn euler_gamma_bounds() -> (Rational, Rational) {
    let lo = parse_decimal(EULER_GAMMA_DIGITS).expect("stored constant parses");
    let ulp = Rational::from((1, rug::Integer::from(rug::Integer::u_pow_u(10, GAMMA_TRUNCATION_EXP))));
    let hi = lo.clone() + ulp;
    (lo, hi)
}

/// Parses a plain decimal literal (`-12.5`, `3e-4`, `.25`) into an exact
/// rational. Returns `None` on malformed input.
/// A decimal as accepted by [`parse_decimal`], or an exact fraction `a/b`.
pub fn parse_number(text: &str) -> Option<Rational> {
    match text.split_once('/') {
        Some((n, d)) => {
            let n = parse_decimal(n)?;
            let d = parse_decimal(d)?;
            (d != 0).then(|| n / d)
        }
        None => parse_decimal(text),
    }
}

pub fn parse_decimal(text: &str) -> Option<Rational> {
    let text = text.trim();
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(i) => (&text[..i], text[i + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match digits.find('.') {
        Some(i) => (&digits[..i], &digits[i + 1..]),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all_digits = format!("{int_part}{frac_part}");
    let numer = rug::Integer::from_str_radix(&all_digits, 10).ok()?;
    let scale = exponent - frac_part.len() as i32;
    let mut value = Rational::from(numer);
    if scale >= 0 {
        value *= rug::Integer::from(rug::Integer::u_pow_u(10, scale as u32));
    } else {
        value /= rug::Integer::from(rug::Integer::u_pow_u(10, scale.unsigned_abs()));
    }
    if negative {
        value = -value;
    }
    Some(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::float::{Constant, Round};
    use rug::Float;

    #[test]
    fn gamma_bounds_bracket_mpfr_constant() {
        let (lo, hi) = euler_gamma_bounds();
        let below = Float::with_val_round(256, Constant::Euler, Round::Down).0;
        let above = Float::with_val_round(256, Constant::Euler, Round::Up).0;
        assert!(Float::with_val(256, &lo) <= above);
        assert!(Float::with_val(256, &hi) >= below);
        assert!(lo < hi);
    }

    #[test]
    fn decimal_parsing() {
        assert_eq!(parse_decimal("0.3"), Some(Rational::from((3, 10))));
        assert_eq!(parse_decimal("-1.25e2"), Some(Rational::from(-125)));
        assert_eq!(parse_decimal("5e-3"), Some(Rational::from((1, 200))));
        assert_eq!(parse_decimal(".5"), Some(Rational::from((1, 2))));
        assert_eq!(parse_decimal("1."), Some(Rational::from(1)));
        assert_eq!(parse_decimal("abc"), None);
        assert_eq!(parse_decimal(""), None);
        assert_eq!(parse_decimal("1.2.3"), None);
        assert_eq!(parse_number("91/100"), Some(Rational::from((91, 100))));
        assert_eq!(parse_number("0.5/2"), Some(Rational::from((1, 4))));
        assert_eq!(parse_number("1/0"), None);
    }
}
