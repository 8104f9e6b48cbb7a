//! Closed-form bounds, constants and parameter formulas.
//!
//! Values are `f64`; preconditions that only involve rational inputs are
//! checked exactly before any floating-point work happens.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::measure::Bias;
use crate::rational::{self, int, rat, Rational};

/// `58`, the constant in the subgaussian exponent.
pub const SUBGAUSSIAN_CONST: f64 = 58.0;

/// `2^8 * 58^6 * 60^4`.
pub const SUPERSAT_C: u128 = 256 * 58u128.pow(6) * 60u128.pow(4);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Precondition(msg()))
    }
}

fn pq_n(n: u32, p: &Bias) -> f64 {
    let p = p.as_f64();
    p * (1.0 - p) * n as f64
}

/// `t = min{ell, pn - ell}`, exact. Requires `ell <= pn`.
pub fn distance_to_ends(n: u32, p: &Bias, ell: u32) -> Result<Rational> {
    let pn = p.scaled(n);
    let ell_r = int(ell as i64);
    ensure(ell_r <= pn, || format!("ell = {ell} exceeds pn = {pn}"))?;
    Ok(rational::min(ell_r.clone(), pn - ell_r))
}

/// `2 exp(-t^2 / (58^2 pn))` with `t = min{ell, pn - ell}`.
pub fn main_bound_rhs(n: u32, p: &Bias, ell: u32) -> Result<f64> {
    let t = rational::to_f64(&distance_to_ends(n, p, ell)?);
    let pn = rational::to_f64(&p.scaled(n));
    Ok(2.0 * (-t * t / (SUBGAUSSIAN_CONST * SUBGAUSSIAN_CONST * pn)).exp())
}

/// `min{ell / (58 pn), (pn - ell) / (51 pn)}`, which lies in `(0, 1/10)`
/// whenever `1 <= ell < pn`.
pub fn delta_choice(n: u32, p: &Bias, ell: u32) -> Result<Rational> {
    let pn = p.scaled(n);
    let ell_r = int(ell as i64);
    ensure(ell >= 1 && ell_r < pn, || {
        format!("need 1 <= ell < pn, got ell = {ell}, pn = {pn}")
    })?;
    let lower = &ell_r / (&pn * int(58));
    let upper = (&pn - &ell_r) / (&pn * int(51));
    let delta = rational::min(lower, upper);
    assert!(
        delta.is_positive() && delta < rat(1, 10),
        "delta {delta} outside (0, 1/10)"
    );
    Ok(delta)
}

/// `2 exp(-pn delta^2)`, the bound an initial pair must satisfy when `delta`
/// comes from [`delta_choice`].
pub fn strengthened_bound(n: u32, p: &Bias, delta: &Rational) -> f64 {
    let pn = rational::to_f64(&p.scaled(n));
    let d = rational::to_f64(delta);
    2.0 * (-pn * d * d).exp()
}

/// Which binomial upper-tail estimate to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChernoffCase {
    /// `p <= 1/2`, `pn <= t <= 2pn`, denominator `6 p (1-p) n`.
    SmallBias,
    /// `p >= 1/2`, `t >= pn`, denominator `2 p (1-p) n`.
    LargeBias,
}

impl ChernoffCase {
    /// `SmallBias` for `p <= 1/2` (including the overlap point), else `LargeBias`.
    pub fn for_bias(p: &Bias) -> Self {
        if *p.value() <= rat(1, 2) {
            ChernoffCase::SmallBias
        } else {
            ChernoffCase::LargeBias
        }
    }

    fn denominator_factor(self) -> f64 {
        match self {
            ChernoffCase::SmallBias => 6.0,
            ChernoffCase::LargeBias => 2.0,
        }
    }
}

/// Upper estimate for `mu_p([n]^{>= t})`.
pub fn chernoff_upper(n: u32, p: &Bias, t: &Rational, case: ChernoffCase) -> Result<f64> {
    let pn = p.scaled(n);
    let half = rat(1, 2);
    match case {
        ChernoffCase::SmallBias => ensure(*p.value() <= half && pn <= *t && *t <= &pn * int(2), || {
            format!("small-bias estimate needs p <= 1/2 and pn <= t <= 2pn (p = {p}, t = {t})")
        })?,
        ChernoffCase::LargeBias => ensure(*p.value() >= half && *t >= pn, || {
            format!("large-bias estimate needs p >= 1/2 and t >= pn (p = {p}, t = {t})")
        })?,
    }
    let dev = rational::to_f64(&(t - &pn));
    Ok((-dev * dev / (case.denominator_factor() * pq_n(n, p))).exp())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sandwich {
    pub lower: f64,
    pub upper: f64,
}

impl Sandwich {
    pub fn strictly_contains(&self, x: f64) -> bool {
        self.lower < x && x < self.upper
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }
}

fn check_inner_index(n: u32, k: u32) -> Result<()> {
    ensure(n >= 2 && k >= 1 && k < n, || {
        format!("need n >= 2 and 1 <= k <= n - 1, got n = {n}, k = {k}")
    })
}

/// `ln(n^n / (k^k (n-k)^(n-k)))`.
fn ln_stirling_core(n: u32, k: u32) -> f64 {
    let (n, k) = (n as f64, k as f64);
    n * n.ln() - k * k.ln() - (n - k) * (n - k).ln()
}

/// Strict bracket `(1/5, 2/5) * sqrt(n / (k(n-k))) * n^n / (k^k (n-k)^(n-k))`
/// around `C(n, k)`.
pub fn binomial_sandwich(n: u32, k: u32) -> Result<Sandwich> {
    check_inner_index(n, k)?;
    let root = (n as f64 / (k as f64 * (n - k) as f64)).sqrt();
    let core = ln_stirling_core(n, k).exp();
    Ok(Sandwich {
        lower: root * core / 5.0,
        upper: 2.0 * root * core / 5.0,
    })
}

/// `H(x) = -x log2 x - (1-x) log2 (1-x)`, with `H(0) = H(1) = 0`.
pub fn binary_entropy(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
}

/// Non-strict bracket `sqrt(n / (c k (n-k))) 2^{n H(k/n)}` around `C(n, k)`
/// with `c = 8` below and `c = pi` above.
pub fn entropy_bounds(n: u32, k: u32) -> Result<Sandwich> {
    check_inner_index(n, k)?;
    let nk = n as f64 / (k as f64 * (n - k) as f64);
    let growth = (n as f64 * binary_entropy(k as f64 / n as f64)).exp2();
    Ok(Sandwich {
        lower: (nk / 8.0).sqrt() * growth,
        upper: (nk / std::f64::consts::PI).sqrt() * growth,
    })
}

/// Multipliers `(5/2) sqrt(k(n-k)/n)` and `5 sqrt(k(n-k)/n)` that bracket
/// `|F| / C(n,k)` in units of `mu_{k/n}(F)` for `F` inside layer `k`.
pub fn layer_density_factors(n: u32, k: u32) -> Result<Sandwich> {
    check_inner_index(n, k)?;
    let root = (k as f64 * (n - k) as f64 / n as f64).sqrt();
    Ok(Sandwich {
        lower: 2.5 * root,
        upper: 5.0 * root,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntervalKind {
    /// Forbidden window `[0, alpha]`.
    Initial,
    /// Forbidden window `[pn - alpha, n]`.
    Final,
}

/// `exp(-alpha^2 / (24 p (1-p) n))`, doubled for a final window.
pub fn interval_bound_rhs(n: u32, p: &Bias, alpha: u32, kind: IntervalKind) -> Result<f64> {
    ensure(*p.value() <= rat(1, 2), || format!("need p <= 1/2, got {p}"))?;
    ensure(alpha >= 1 && int(alpha as i64) <= p.scaled(n), || {
        format!("need 1 <= alpha <= pn, got alpha = {alpha}, pn = {}", p.scaled(n))
    })?;
    let a = alpha as f64;
    let base = (-a * a / (24.0 * pq_n(n, p))).exp();
    Ok(match kind {
        IntervalKind::Initial => base,
        IntervalKind::Final => 2.0 * base,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerPart {
    /// `k <= n/2`, `m <= n - k`.
    Balanced,
    /// `k <= n/2 <= n - k < m <= n - k + ell`.
    Heavy,
}

/// Bound on `|F|/C(n,k) * |G|/C(n,m)` for `F` in layer `k`, `G` in layer `m`
/// avoiding cross intersections of size `ell`.
pub fn layer_bound_rhs(n: u32, k: u32, m: u32, ell: u32, part: LayerPart) -> Result<f64> {
    ensure(ell <= k && k <= m && m <= n && k >= 1, || {
        format!("need ell <= k <= m <= n with k >= 1, got ell = {ell}, k = {k}, m = {m}, n = {n}")
    })?;
    ensure(2 * k <= n, || format!("need k <= n/2, got k = {k}, n = {n}"))?;
    let (t, scale) = match part {
        LayerPart::Balanced => {
            ensure(m <= n - k, || format!("need m <= n - k, got m = {m}, n - k = {}", n - k))?;
            ((ell.min(k - ell)) as f64, k as f64)
        }
        LayerPart::Heavy => {
            ensure(n - k < m && m <= n - k + ell, || {
                format!("need n - k < m <= n - k + ell, got m = {m}, n - k = {}", n - k)
            })?;
            let gap = k - ell;
            (gap.min(n - m - gap) as f64, (n - m) as f64)
        }
    };
    let (nf, kf, mf) = (n as f64, k as f64, m as f64);
    let root = (kf * (nf - kf) * mf * (nf - mf) / (nf * nf)).sqrt();
    let decay = if t == 0.0 {
        1.0
    } else {
        (-t * t / (SUBGAUSSIAN_CONST * SUBGAUSSIAN_CONST * scale)).exp()
    };
    Ok(50.0 * root * decay)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WideRange {
    /// `t exp(-t^2 / (6 * 30^2 pn))`, needs `p < 1/2` and `t >= 3`.
    Polynomial,
    /// `exp(-t^2 / (90^2 pn))`, needs `6/n <= p <= 1/2` and
    /// `t >= 210 sqrt(pn ln(pn))`.
    Clean,
}

pub fn wide_range_bound(n: u32, p: &Bias, ell: u32, kind: WideRange) -> Result<f64> {
    let t_exact = distance_to_ends(n, p, ell)?;
    let t = rational::to_f64(&t_exact);
    let pn = rational::to_f64(&p.scaled(n));
    match kind {
        WideRange::Polynomial => {
            ensure(*p.value() < rat(1, 2), || format!("hypothesis p < 1/2 fails (p = {p})"))?;
            ensure(t_exact >= int(3), || format!("hypothesis t >= 3 fails (t = {t_exact})"))?;
            Ok(t * (-t * t / (6.0 * 900.0 * pn)).exp())
        }
        WideRange::Clean => {
            ensure(p.scaled(n) >= int(6), || format!("hypothesis p >= 6/n fails (p = {p}, n = {n})"))?;
            ensure(*p.value() <= rat(1, 2), || format!("hypothesis p <= 1/2 fails (p = {p})"))?;
            let needed = clean_range_threshold(pn);
            ensure(t >= needed, || {
                format!("hypothesis t >= 210 sqrt(pn ln pn) fails (t = {t_exact}, need {needed:.3})")
            })?;
            Ok((-t * t / (8100.0 * pn)).exp())
        }
    }
}

/// `210 sqrt(pn ln(pn))`.
pub fn clean_range_threshold(pn: f64) -> f64 {
    210.0 * (pn * pn.ln()).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LowerTail {
    /// `mu_p([n]^{<= k})` for `1 <= k <= pn`.
    AtMost,
    /// `mu_p([n]^{>= k})` for `pn <= k < 2pn`.
    AtLeast,
}

/// `exp(-(k - pn)^2 / (p(1-p)n)) / sqrt(8 n (1 - k/n)(k/n))`, a lower estimate
/// for the binomial tail on the side selected by `kind`.
pub fn lower_tail_bound(n: u32, k: u32, p: &Bias, kind: LowerTail) -> Result<f64> {
    ensure(*p.value() <= rat(1, 2), || format!("need p <= 1/2, got {p}"))?;
    ensure(k >= 1 && k < n, || format!("need 1 <= k < n, got k = {k}, n = {n}"))?;
    let pn = p.scaled(n);
    let k_r = int(k as i64);
    match kind {
        LowerTail::AtMost => ensure(k_r <= pn, || format!("need k <= pn, got k = {k}, pn = {pn}"))?,
        LowerTail::AtLeast => ensure(pn <= k_r && k_r < &pn * int(2), || {
            format!("need pn <= k < 2pn, got k = {k}, pn = {pn}")
        })?,
    }
    let (nf, kf) = (n as f64, k as f64);
    let dev = rational::to_f64(&(k_r - pn));
    let prefactor = 1.0 / (8.0 * nf * (1.0 - kf / nf) * (kf / nf)).sqrt();
    Ok(prefactor * (-dev * dev / pq_n(n, p)).exp())
}

/// Whether `16/n <= p` and `2 sqrt(pn ln pn) <= ell <= pn - 2 sqrt(pn ln pn)`.
pub fn optimality_regime(n: u32, p: &Bias, ell: u32) -> bool {
    if p.scaled(n) < int(16) {
        return false;
    }
    let pn = rational::to_f64(&p.scaled(n));
    let margin = 2.0 * (pn * pn.ln()).sqrt();
    let l = ell as f64;
    margin <= l && l <= pn - margin
}

/// The two successive lower estimates for `mu_p([n]^{< ell})`:
/// `exp(-(pn - ell + 1)^2 / (p(1-p)n)) / sqrt(8 (ell-1)(1 - (ell-1)/n))`
/// and `exp(-((pn-ell)^2 + 2(pn-ell) + 1) / (p(1-p)n)) / sqrt(8pn)`.
pub fn below_threshold_lower_bounds(n: u32, p: &Bias, ell: u32) -> Result<(f64, f64)> {
    ensure(ell >= 2 && int(ell as i64 - 1) <= p.scaled(n), || {
        format!("need 2 <= ell and ell - 1 <= pn, got ell = {ell}")
    })?;
    let pn = rational::to_f64(&p.scaled(n));
    let (nf, l) = (n as f64, ell as f64);
    let gap = pn - l;
    let first = (-(gap + 1.0) * (gap + 1.0) / pq_n(n, p)).exp()
        / (8.0 * (l - 1.0) * (1.0 - (l - 1.0) / nf)).sqrt();
    let second = (-(gap * gap + 2.0 * gap + 1.0) / pq_n(n, p)).exp() / (8.0 * pn).sqrt();
    Ok((first, second))
}

/// `delta^4 / (C T^2 ell ln(n/delta)^4)` with `T = max{ell, k - ell}`.
pub fn supersat_epsilon(n: u32, k: u32, ell: u32, delta: f64) -> Result<f64> {
    ensure(delta > 0.0 && delta < n as f64, || {
        format!("need 0 < delta < n, got delta = {delta}, n = {n}")
    })?;
    ensure(ell >= 1 && k > ell, || format!("need 1 <= ell < k, got ell = {ell}, k = {k}"))?;
    let big_t = ell.max(k - ell) as f64;
    let log = (n as f64 / delta).ln();
    Ok(delta.powi(4) / (SUPERSAT_C as f64 * big_t * big_t * ell as f64 * log.powi(4)))
}

/// `ell < k <= n/2` and `10^5 sqrt(k) (ln n)^{3/2} <= delta <= min{ell, k - ell}`.
pub fn supersat_hypothesis(n: u32, k: u32, ell: u32, delta: f64) -> bool {
    if !(ell >= 1 && ell < k && 2 * k <= n) {
        return false;
    }
    let floor = 1e5 * (k as f64).sqrt() * (n as f64).ln().powf(1.5);
    floor <= delta && delta <= ell.min(k - ell) as f64
}

/// `C` as an exact integer.
pub fn supersat_constant() -> BigInt {
    BigInt::from(2).pow(8) * BigInt::from(58).pow(6) * BigInt::from(60).pow(4)
}

/// `1 - delta - 2 (p/(1-p)) delta^2`, the per-step loss factor allowed when the
/// forbidden window widens.
pub fn widening_factor(p: &Bias, delta: &Rational) -> Rational {
    let ratio = odds(p);
    Rational::one() - delta - int(2) * ratio * delta * delta
}

/// `p / (1 - p)`.
pub fn odds(p: &Bias) -> Rational {
    p.value() / (Rational::one() - p.value())
}

/// `1 + (p/(1-p)) delta`.
pub fn side_increment_factor(p: &Bias, delta: &Rational) -> Rational {
    Rational::one() + odds(p) * delta
}

pub(crate) fn is_open_unit_tenth(delta: &Rational) -> bool {
    !delta.is_zero() && delta.is_positive() && *delta < rat(1, 10)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bias(n: i64, d: i64) -> Bias {
        Bias::from_ratio(n, d).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn main_bound_examples() {
        assert_eq!(main_bound_rhs(7, &bias(1, 3), 0).unwrap(), 2.0);
        // 2 exp(-100 / (3364 * 30)), evaluated independently
        let v = main_bound_rhs(100, &bias(3, 10), 10).unwrap();
        assert!(close(v, 1.998_019_213_789_799_7, 1e-14), "{v}");
        assert_eq!(main_bound_rhs(10, &bias(1, 2), 5).unwrap(), 2.0);
        assert!(main_bound_rhs(10, &bias(1, 2), 6).is_err());
    }

    #[test]
    fn main_bound_decreases_towards_middle() {
        for n in 1..=60 {
            for p in [bias(1, 5), bias(1, 3), bias(1, 2), bias(3, 4)] {
                let half_pn = rational::floor_to_i64(&(p.scaled(n) / int(2))) as u32;
                let values: Vec<f64> = (0..=half_pn).map(|l| main_bound_rhs(n, &p, l).unwrap()).collect();
                assert!(values.windows(2).all(|w| w[1] < w[0]), "n={n} p={p}");
            }
        }
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta_choice(100, &bias(3, 10), 10).unwrap(), rat(1, 174));
        assert_eq!(delta_choice(4, &bias(1, 2), 1).unwrap(), rat(1, 116));
        assert!(delta_choice(4, &bias(1, 2), 0).is_err());
        assert!(delta_choice(4, &bias(1, 2), 2).is_err());
        // crossover: ell / 58 = (pn - ell) / 51 at pn = 109, ell = 58
        let p = bias(1, 2);
        let d = delta_choice(218, &p, 58).unwrap();
        assert_eq!(d, rat(1, 109));
        assert_eq!(d, rat(51, 51 * 109));
    }

    #[test]
    fn chernoff_examples() {
        let half = bias(1, 2);
        assert_eq!(chernoff_upper(10, &half, &int(5), ChernoffCase::SmallBias).unwrap(), 1.0);
        let v = chernoff_upper(100, &bias(3, 10), &int(40), ChernoffCase::SmallBias).unwrap();
        assert!(close(v, 0.452_190_922_396_550_25, 1e-14), "{v}");
        let v = chernoff_upper(10, &half, &int(10), ChernoffCase::LargeBias).unwrap();
        assert!(close(v, (-5.0f64).exp(), 1e-15));
        assert!(chernoff_upper(10, &half, &int(11), ChernoffCase::SmallBias).is_err());
        assert!(chernoff_upper(10, &half, &int(4), ChernoffCase::LargeBias).is_err());
        assert!(chernoff_upper(10, &bias(3, 4), &int(8), ChernoffCase::SmallBias).is_err());
        assert_eq!(ChernoffCase::for_bias(&half), ChernoffCase::SmallBias);
        assert_eq!(ChernoffCase::for_bias(&bias(7, 10)), ChernoffCase::LargeBias);
    }

    #[test]
    fn stirling_examples() {
        let s = binomial_sandwich(4, 2).unwrap();
        assert!(close(s.lower, 3.2, 1e-14) && close(s.upper, 6.4, 1e-14));
        assert!(s.strictly_contains(6.0));
        let s = binomial_sandwich(2, 1).unwrap();
        assert!(close(s.lower, 1.131_370_849_898_476, 1e-14));
        assert!(close(s.upper, 2.262_741_699_796_952, 1e-14));
        assert_eq!(binary_entropy(0.5), 1.0);
        let e = entropy_bounds(2, 1).unwrap();
        assert!(close(e.upper, 3.191_538_243_211_461_4, 1e-14));
        assert!(e.contains(2.0));
        assert!(binomial_sandwich(4, 0).is_err());
        assert!(entropy_bounds(4, 4).is_err());
        assert!(binomial_sandwich(1, 1).is_err());
    }

    #[test]
    fn interval_examples() {
        let p = bias(3, 10);
        let a = interval_bound_rhs(100, &p, 10, IntervalKind::Initial).unwrap();
        let b = interval_bound_rhs(100, &p, 10, IntervalKind::Final).unwrap();
        assert_eq!(b, 2.0 * a);
        assert!(close(a, 0.820_031_357_654_694_1, 1e-14), "{a}");
        assert!(interval_bound_rhs(100, &p, 0, IntervalKind::Initial).is_err());
        assert!(interval_bound_rhs(100, &p, 31, IntervalKind::Initial).is_err());
    }

    #[test]
    fn layer_examples() {
        let v = layer_bound_rhs(4, 2, 2, 1, LayerPart::Balanced).unwrap();
        assert!(close(v, 49.992_568_923_250_656, 1e-14), "{v}");
        let v = layer_bound_rhs(4, 2, 2, 0, LayerPart::Balanced).unwrap();
        assert_eq!(v, 50.0);
        assert!(layer_bound_rhs(8, 3, 5, 1, LayerPart::Heavy).is_err());
        assert!(layer_bound_rhs(8, 3, 6, 1, LayerPart::Heavy).is_ok());
        assert!(layer_bound_rhs(8, 3, 6, 1, LayerPart::Balanced).is_err());
    }

    #[test]
    fn wide_range_examples() {
        // pn = 30, ell = 3
        let v = wide_range_bound(100, &bias(3, 10), 3, WideRange::Polynomial).unwrap();
        assert!(close(v, 2.999_833_337_962_877, 1e-14), "{v}");
        let err = wide_range_bound(100, &bias(3, 10), 2, WideRange::Polynomial).unwrap_err();
        assert!(err.to_string().contains("t >= 3"));
        assert!(close(clean_range_threshold(50.0), 2937.007_103_663_364, 1e-12));
        for ell in 0..=50 {
            let err = wide_range_bound(100, &bias(1, 2), ell, WideRange::Clean).unwrap_err();
            assert!(err.to_string().contains("210"), "{err}");
        }
        assert!(wide_range_bound(100, &bias(1, 2), 10, WideRange::Polynomial).is_err());
    }

    #[test]
    fn lower_tail_examples() {
        let half = bias(1, 2);
        let v = lower_tail_bound(4, 2, &half, LowerTail::AtMost).unwrap();
        assert!(close(v, 0.353_553_390_593_273_76, 1e-15));
        assert!(crate::rational::to_f64(&rat(11, 16)) >= v);
        assert!(lower_tail_bound(4, 0, &half, LowerTail::AtMost).is_err());
        assert!(lower_tail_bound(4, 3, &half, LowerTail::AtMost).is_err());
        assert!(lower_tail_bound(10, 9, &half, LowerTail::AtLeast).is_ok());
        assert!(lower_tail_bound(10, 4, &bias(3, 5), LowerTail::AtMost).is_err());
    }

    #[test]
    fn supersat_examples() {
        assert_eq!(SUPERSAT_C, 126_302_785_374_781_440_000);
        assert_eq!(supersat_constant(), BigInt::from(SUPERSAT_C));
        let (n, k, ell) = (1000u32, 20u32, 5u32);
        let delta = n as f64 / std::f64::consts::E;
        let eps = supersat_epsilon(n, k, ell, delta).unwrap();
        let want = delta.powi(4) / (SUPERSAT_C as f64 * 225.0 * 5.0);
        assert!(close(eps, want, 1e-12));
        assert!(supersat_epsilon(10, 4, 1, 0.0).is_err());
        assert!(supersat_epsilon(10, 4, 1, 10.0).is_err());
        for ell in 1..100 {
            assert!(!supersat_hypothesis(1_000_000, 100, ell, ell.min(100 - ell) as f64));
        }
    }

    #[test]
    fn regime_is_empty_at_small_scale() {
        for n in 1..=60 {
            for (a, b) in [(1, 4), (1, 3), (1, 2)] {
                let p = bias(a, b);
                for ell in 0..=n {
                    assert!(!optimality_regime(n, &p, ell));
                }
            }
        }
        assert!(optimality_regime(200, &bias(1, 2), 50));
    }
}
