//! Canonical string form for exact rationals: lowest terms, positive
//! denominator, `"p"` when the denominator is 1 and `"p/q"` otherwise.
//! This is the form used in all JSON interchange.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// Formats a rational in canonical form.
pub fn format_rational(r: &BigRational) -> String {
    // Ratio keeps the sign on the numerator and reduces on construction,
    // and its Display already omits a unit denominator.
    r.to_string()
}

/// Parses `"p"` or `"p/q"` into a reduced rational. Rejects a zero or
/// missing denominator and any non-integer component.
pub fn parse_rational(s: &str) -> Result<BigRational, String> {
    let s = s.trim();
    if s.is_empty() {
        return Err("empty rational".to_string());
    }
    let (num_str, den_str) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (s, None),
    };
    let num: BigInt = num_str
        .parse()
        .map_err(|_| format!("invalid integer {num_str:?}"))?;
    let den: BigInt = match den_str {
        Some(d) => d.parse().map_err(|_| format!("invalid integer {d:?}"))?,
        None => BigInt::from(1),
    };
    if den.is_zero() {
        return Err(format!("zero denominator in {s:?}"));
    }
    Ok(BigRational::new(num, den))
}

pub fn big_rational_from_i64(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio_i64(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Nearest f64; exact whenever numerator and denominator fit a double.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}
