//! Exact rational bookkeeping for degree parameters.
//!
//! Degree requirements ("index appears in at least delta*n sets") and their
//! conservation across projection rounds are integer statements, so delta is
//! carried as an exact fraction and only converted to floating point for display
//! or for the real-valued bounds derived from it.

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};

pub type Rational = Ratio<u64>;

/// Parses `p/q`, an integer, or a plain decimal such as `0.25` or `1.5e-1` into
/// an exact non-negative fraction. Decimal input is taken literally (`0.1` is
/// `1/10`, not the nearest binary float).
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: u64 = p.trim().parse().ok()?;
        let q: u64 = q.trim().parse().ok()?;
        return (q != 0).then(|| Ratio::new(p, q));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut num: u64 = if digits.is_empty() { 0 } else { digits.parse().ok()? };
    let mut den: u64 = 1;
    let scale = exp - frac_part.len() as i32;
    if scale >= 0 {
        num = num.checked_mul(10u64.checked_pow(scale as u32)?)?;
    } else {
        den = 10u64.checked_pow((-scale) as u32)?;
    }
    Some(Ratio::new(num, den))
}

/// Canonical text form: `p` when integral, `p/q` otherwise.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// `ceil(r)` as an integer.
pub fn ceil_u64(r: &Rational) -> u64 {
    r.ceil().to_integer()
}

/// `delta * n` as an exact fraction.
pub fn times_count(r: &Rational, n: usize) -> Rational {
    r * Ratio::from_integer(n as u64)
}

pub fn is_zero(r: &Rational) -> bool {
    r.is_zero()
}
