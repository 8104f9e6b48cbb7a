//! Measure concentration under Hamming expansion.

use crate::error::{Error, Result};
use crate::family::Family;
use crate::measure::{mu, Bias};
use crate::rational::{self, int, rat, Rational};

#[derive(Debug, Clone, PartialEq)]
pub struct ConcentrationReport {
    pub measure: Rational,
    pub t: u32,
    /// `exp(-t^2 / (c p(1-p) n))`, `c = 6` for `p <= 1/2` and `c = 2` above.
    pub tail: f64,
    /// `Some(holds)` when `mu_p(F) >= 1/2`: `mu_p(F_t) >= 1 - tail`.
    pub half_measure: Option<bool>,
    /// `Some(holds)` when `mu_p(F) > tail`: `mu_p(F_{2t}) > 1 - tail`.
    pub above_tail: Option<bool>,
}

impl ConcentrationReport {
    pub fn passed(&self) -> bool {
        self.half_measure != Some(false) && self.above_tail != Some(false)
    }
}

/// Exponent constant for the bias regime.
pub fn concentration_constant(p: &Bias) -> f64 {
    if *p.value() <= rat(1, 2) {
        6.0
    } else {
        2.0
    }
}

pub fn concentration_tail(n: u32, p: &Bias, t: u32) -> f64 {
    let q = p.as_f64();
    let t = t as f64;
    (-t * t / (concentration_constant(p) * q * (1.0 - q) * n as f64)).exp()
}

pub fn check_concentration(f: &Family, p: &Bias, t: u32) -> Result<ConcentrationReport> {
    let n = f.ground_size();
    if int(t as i64) > p.scaled(n) {
        return Err(Error::Precondition(format!("need t <= pn, got t = {t}, pn = {}", p.scaled(n))));
    }
    let measure = mu(f, p);
    let tail = concentration_tail(n, p, t);
    let tail_exact = rational::from_f64(tail);
    let target = int(1) - &tail_exact;

    let half_measure = (measure >= rat(1, 2)).then(|| mu(&f.expand(t), p) >= target);
    let above_tail = (measure > tail_exact).then(|| mu(&f.expand(2 * t), p) > target);
    Ok(ConcentrationReport { measure, t, tail, half_measure, above_tail })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_cube() {
        let half = Bias::from_ratio(1, 2).unwrap();
        for m in 2..=8u32 {
            let f = Family::from_predicate(m, |s| s >> (m - 1) == 0).unwrap();
            for t in 0..=m / 2 {
                let r = check_concentration(&f, &half, t).unwrap();
                assert_eq!(r.measure, rat(1, 2));
                assert_eq!(r.half_measure, Some(true), "m={m} t={t}");
                assert!(r.passed());
            }
        }
    }

    #[test]
    fn zero_radius_is_vacuous() {
        let p = Bias::from_ratio(1, 3).unwrap();
        let f = Family::new(3, [0b001]).unwrap();
        let r = check_concentration(&f, &p, 0).unwrap();
        assert_eq!(r.tail, 1.0);
        assert_eq!(r.above_tail, None);
        assert_eq!(r.half_measure, None);
    }

    #[test]
    fn full_cube() {
        let p = Bias::from_ratio(3, 4).unwrap();
        let f = Family::full(6).unwrap();
        let r = check_concentration(&f, &p, 4).unwrap();
        assert_eq!(r.half_measure, Some(true));
        assert_eq!(r.above_tail, Some(true));
        assert!(check_concentration(&f, &p, 5).is_err());
    }
}
