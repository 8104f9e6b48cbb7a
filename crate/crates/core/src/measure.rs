//! Exact `p`-biased measures.
//!
//! `mu_p({A}) = p^|A| (1 - p)^(m - |A|)`. Measures are evaluated from the
//! layer profile of a family, so the cost is `O(m)` big-integer operations
//! regardless of how many members the family has.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::family::Family;
use crate::rational::{self, Rational};

/// A probability strictly between 0 and 1, held exactly.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bias(Rational);

impl Bias {
    pub fn new(value: Rational) -> Result<Self> {
        if !value.is_positive() || value >= Rational::one() {
            return Err(Error::InvalidBias(rational::to_ratio_string(&value)));
        }
        Ok(Bias(value))
    }

    pub fn from_ratio(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidBias(format!("{num}/{den}")));
        }
        Self::new(rational::rat(num, den))
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }

    /// `1 - p`.
    pub fn complement(&self) -> Bias {
        Bias(Rational::one() - &self.0)
    }

    pub fn as_f64(&self) -> f64 {
        rational::to_f64(&self.0)
    }

    /// `p * n`.
    pub fn scaled(&self, n: u32) -> Rational {
        &self.0 * Rational::from_integer(BigInt::from(n))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }
}

impl fmt::Debug for Bias {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bias({})", self)
    }
}

impl fmt::Display for Bias {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl FromStr for Bias {
    type Err = Error;

    fn from_str(s: &str) -> Result<Bias> {
        Bias::new(rational::parse_rational(s)?)
    }
}

/// `counts[k]` is the number of members of cardinality `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerProfile {
    pub counts: Vec<u64>,
}

impl LayerProfile {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn ground_size(&self) -> u32 {
        self.counts.len() as u32 - 1
    }
}

pub fn layer_profile(f: &Family) -> LayerProfile {
    let mut counts = vec![0u64; f.ground_size() as usize + 1];
    for s in f.members() {
        counts[s.count_ones() as usize] += 1;
    }
    LayerProfile { counts }
}

/// `sum_k counts[k] * p^k (1-p)^(m-k)` as an exact rational.
pub fn mu_of_profile(profile: &LayerProfile, p: &Bias) -> Rational {
    let counts: Vec<BigInt> = profile.counts.iter().map(|&c| BigInt::from(c)).collect();
    weighted_layers(&counts, p)
}

/// `sum_k counts[k] * p^k (1-p)^(m-k)` with `m = counts.len() - 1`.
fn weighted_layers(counts: &[BigInt], p: &Bias) -> Rational {
    let m = counts.len() - 1;
    let a = p.numer().clone();
    let b = p.denom().clone();
    let c = &b - &a;
    // numerator over the common denominator b^m
    let mut a_pow = vec![BigInt::one(); m + 1];
    let mut c_pow = vec![BigInt::one(); m + 1];
    for k in 1..=m {
        a_pow[k] = &a_pow[k - 1] * &a;
        c_pow[k] = &c_pow[k - 1] * &c;
    }
    let mut numer = BigInt::zero();
    for (k, count) in counts.iter().enumerate() {
        if !count.is_zero() {
            numer += count * &a_pow[k] * &c_pow[m - k];
        }
    }
    Rational::new(numer, num_traits::pow(b, m))
}

pub fn mu(f: &Family, p: &Bias) -> Rational {
    mu_of_profile(&layer_profile(f), p)
}

/// Threshold families `[n]^{>= t}` and `[n]^{<= k}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tail {
    AtLeast(i64),
    AtMost(i64),
}

/// Exact `mu_p` of a threshold family over `[n]`.
pub fn tail_measure(n: u32, p: &Bias, tail: Tail) -> Rational {
    let counts = (0..=n)
        .map(|k| {
            let inside = match tail {
                Tail::AtLeast(t) => k as i64 >= t,
                Tail::AtMost(t) => k as i64 <= t,
            };
            if inside {
                binomial_big(n, k)
            } else {
                BigInt::zero()
            }
        })
        .collect::<Vec<_>>();
    weighted_layers(&counts, p)
}

/// Exact binomial coefficient; panics on `u64` overflow (n <= 66 is safe).
pub fn binomial_u64(n: u32, k: u32) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k) as u64;
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n as u128 - i as u128) / (i as u128 + 1);
    }
    u64::try_from(acc).expect("binomial coefficient overflows u64")
}

pub fn binomial_big(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}
