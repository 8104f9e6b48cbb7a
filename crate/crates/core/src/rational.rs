//! Exact rational helpers shared by the measure and bound code.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Renders as `num/den` in lowest terms, always with an explicit denominator.
pub fn to_ratio_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `num/den` or a bare integer.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("expected a rational `num/den`, got {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Rational::new(n, d))
        }
        None => {
            let n: BigInt = s.parse().map_err(|_| bad())?;
            Ok(Rational::from_integer(n))
        }
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // ratio of two huge integers: fall back to logarithms
        let sign = if r.is_negative() { -1.0 } else { 1.0 };
        let ln = ln_big(&r.numer().abs()) - ln_big(r.denom());
        sign * ln.exp()
    })
}

/// Natural logarithm of a positive rational, accurate even when numerator and
/// denominator overflow `f64`.
pub fn ln(r: &Rational) -> f64 {
    debug_assert!(r.is_positive());
    ln_big(r.numer()) - ln_big(r.denom())
}

fn ln_big(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits < 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 60;
    let top = (x >> shift).to_f64().unwrap_or(1.0);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Exact conversion of a finite float, used to compare a float bound against an
/// exact quantity without rounding the exact side.
pub fn from_f64(x: f64) -> Rational {
    Rational::from_float(x).expect("finite float")
}

pub fn pow(base: &Rational, exp: u32) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

pub fn min(a: Rational, b: Rational) -> Rational {
    if a <= b {
        a
    } else {
        b
    }
}

pub fn floor_to_i64(r: &Rational) -> i64 {
    r.floor().to_integer().to_i64().expect("floor fits i64")
}

pub fn ceil_to_i64(r: &Rational) -> i64 {
    r.ceil().to_integer().to_i64().expect("ceil fits i64")
}
