//! `bound <name>`: evaluates one closed-form bound.

use clap::{Args, ValueEnum};
use serde_json::{json, Value};

use forbid_lab::bounds::{
    self, ChernoffCase, IntervalKind, LayerPart, LowerTail, Sandwich, WideRange,
};
use forbid_lab::rational::{parse_rational, to_f64, to_ratio_string};
use forbid_lab::{Bias, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundName {
    /// 2 exp(-t^2/(58^2 pn)), t = min{ell, pn - ell}; needs n, p, ell
    Main,
    /// min{ell/(58pn), (pn-ell)/(51pn)}; needs n, p, ell
    Delta,
    /// 2 exp(-pn delta^2); needs n, p and delta (or ell for the default delta)
    Strengthened,
    /// upper binomial tail estimate; needs n, p, t, optional kind small|large
    Chernoff,
    /// product bound for a forbidden initial or final window; needs n, p, alpha, kind initial|final
    Interval,
    /// layer pair density bound; needs n, k, m, ell, optional kind balanced|heavy
    Layer,
    /// product bound for ell far from pn; needs n, p, ell, kind polynomial|clean
    Wide,
    /// smallest ell covered by the clean wide-range bound; needs pn
    CleanThreshold,
    /// lower binomial tail estimate; needs n, k, p, kind at-most|at-least
    LowerTail,
    /// strict sandwich around C(n,k); needs n, k
    BinomialSandwich,
    /// entropy sandwich around C(n,k); needs n, k
    Entropy,
    /// multipliers relating layer density and layer measure; needs n, k
    LayerDensity,
    /// whether the lower-bound chain regime holds; needs n, p, ell
    Regime,
    /// lower estimates for the measure of sets smaller than ell; needs n, p, ell
    BelowThreshold,
    /// supersaturation epsilon; needs n, k, ell, delta
    SupersatEpsilon,
    /// supersaturation hypothesis; needs n, k, ell, delta
    SupersatHypothesis,
    /// the supersaturation constant as an exact integer
    SupersatConstant,
    /// 1 - delta - 2 (p/(1-p)) delta^2; needs p, delta
    WideningFactor,
    /// 1 + (p/(1-p)) delta; needs p, delta
    SideFactor,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[arg(value_enum)]
    pub name: BoundName,
    #[arg(long)]
    pub n: Option<u32>,
    /// Bias as `num/den`
    #[arg(long)]
    pub p: Option<String>,
    #[arg(long)]
    pub ell: Option<u32>,
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long)]
    pub m: Option<u32>,
    /// Deviation as `num/den`
    #[arg(long)]
    pub t: Option<String>,
    #[arg(long)]
    pub alpha: Option<u32>,
    /// Rational `num/den`
    #[arg(long)]
    pub delta: Option<String>,
    #[arg(long)]
    pub pn: Option<f64>,
    /// Variant selector for bounds with several forms
    #[arg(long)]
    pub kind: Option<String>,
}

fn need<T: Copy>(v: Option<T>, flag: &str) -> Result<T, String> {
    v.ok_or_else(|| format!("this bound needs --{flag}"))
}

fn need_rational(v: &Option<String>, flag: &str) -> Result<Rational, String> {
    let s = v.as_deref().ok_or_else(|| format!("this bound needs --{flag}"))?;
    parse_rational(s).map_err(|e| e.to_string())
}

fn need_bias(v: &Option<String>) -> Result<Bias, String> {
    Bias::new(need_rational(v, "p")?).map_err(|e| e.to_string())
}

fn sandwich(s: Sandwich) -> Value {
    json!({ "lower": s.lower, "upper": s.upper })
}

fn kind<'a>(args: &'a BoundArgs, choices: &[&str]) -> Result<Option<&'a str>, String> {
    match args.kind.as_deref() {
        None => Ok(None),
        Some(k) if choices.contains(&k) => Ok(Some(k)),
        Some(k) => Err(format!("unknown --kind {k:?}, expected one of {}", choices.join(", "))),
    }
}

/// The value, or a usage message.
pub fn evaluate(args: &BoundArgs) -> Result<Value, String> {
    let err = |e: forbid_lab::Error| e.to_string();
    let value = match args.name {
        BoundName::Main => json!(bounds::main_bound_rhs(need(args.n, "n")?, &need_bias(&args.p)?, need(args.ell, "ell")?).map_err(err)?),
        BoundName::Delta => {
            let d = bounds::delta_choice(need(args.n, "n")?, &need_bias(&args.p)?, need(args.ell, "ell")?).map_err(err)?;
            json!({ "exact": to_ratio_string(&d), "approx": to_f64(&d) })
        }
        BoundName::Strengthened => {
            let n = need(args.n, "n")?;
            let p = need_bias(&args.p)?;
            let delta = match &args.delta {
                Some(_) => need_rational(&args.delta, "delta")?,
                None => bounds::delta_choice(n, &p, need(args.ell, "ell or --delta")?).map_err(err)?,
            };
            json!(bounds::strengthened_bound(n, &p, &delta))
        }
        BoundName::Chernoff => {
            let p = need_bias(&args.p)?;
            let case = match kind(args, &["small", "large"])? {
                Some("small") => ChernoffCase::SmallBias,
                Some(_) => ChernoffCase::LargeBias,
                None => ChernoffCase::for_bias(&p),
            };
            json!(bounds::chernoff_upper(need(args.n, "n")?, &p, &need_rational(&args.t, "t")?, case).map_err(err)?)
        }
        BoundName::Interval => {
            let k = match kind(args, &["initial", "final"])? {
                Some("final") => IntervalKind::Final,
                Some(_) => IntervalKind::Initial,
                None => return Err("this bound needs --kind initial|final".into()),
            };
            json!(bounds::interval_bound_rhs(need(args.n, "n")?, &need_bias(&args.p)?, need(args.alpha, "alpha")?, k).map_err(err)?)
        }
        BoundName::Layer => {
            let (n, k, m) = (need(args.n, "n")?, need(args.k, "k")?, need(args.m, "m")?);
            let part = match kind(args, &["balanced", "heavy"])? {
                Some("balanced") => LayerPart::Balanced,
                Some(_) => LayerPart::Heavy,
                None if m + k <= n => LayerPart::Balanced,
                None => LayerPart::Heavy,
            };
            json!(bounds::layer_bound_rhs(n, k, m, need(args.ell, "ell")?, part).map_err(err)?)
        }
        BoundName::Wide => {
            let k = match kind(args, &["polynomial", "clean"])? {
                Some("polynomial") => WideRange::Polynomial,
                Some(_) => WideRange::Clean,
                None => return Err("this bound needs --kind polynomial|clean".into()),
            };
            json!(bounds::wide_range_bound(need(args.n, "n")?, &need_bias(&args.p)?, need(args.ell, "ell")?, k).map_err(err)?)
        }
        BoundName::CleanThreshold => json!(bounds::clean_range_threshold(need(args.pn, "pn")?)),
        BoundName::LowerTail => {
            let k = match kind(args, &["at-most", "at-least"])? {
                Some("at-most") => LowerTail::AtMost,
                Some(_) => LowerTail::AtLeast,
                None => return Err("this bound needs --kind at-most|at-least".into()),
            };
            json!(bounds::lower_tail_bound(need(args.n, "n")?, need(args.k, "k")?, &need_bias(&args.p)?, k).map_err(err)?)
        }
        BoundName::BinomialSandwich => sandwich(bounds::binomial_sandwich(need(args.n, "n")?, need(args.k, "k")?).map_err(err)?),
        BoundName::Entropy => sandwich(bounds::entropy_bounds(need(args.n, "n")?, need(args.k, "k")?).map_err(err)?),
        BoundName::LayerDensity => sandwich(bounds::layer_density_factors(need(args.n, "n")?, need(args.k, "k")?).map_err(err)?),
        BoundName::Regime => json!(bounds::optimality_regime(need(args.n, "n")?, &need_bias(&args.p)?, need(args.ell, "ell")?)),
        BoundName::BelowThreshold => {
            let (a, b) = bounds::below_threshold_lower_bounds(need(args.n, "n")?, &need_bias(&args.p)?, need(args.ell, "ell")?).map_err(err)?;
            json!({ "first": a, "second": b })
        }
        BoundName::SupersatEpsilon => {
            let delta = to_f64(&need_rational(&args.delta, "delta")?);
            json!(bounds::supersat_epsilon(need(args.n, "n")?, need(args.k, "k")?, need(args.ell, "ell")?, delta).map_err(err)?)
        }
        BoundName::SupersatHypothesis => {
            let delta = to_f64(&need_rational(&args.delta, "delta")?);
            json!(bounds::supersat_hypothesis(need(args.n, "n")?, need(args.k, "k")?, need(args.ell, "ell")?, delta))
        }
        BoundName::SupersatConstant => json!(bounds::supersat_constant().to_string()),
        BoundName::WideningFactor => {
            let v = bounds::widening_factor(&need_bias(&args.p)?, &need_rational(&args.delta, "delta")?);
            json!({ "exact": to_ratio_string(&v), "approx": to_f64(&v) })
        }
        BoundName::SideFactor => {
            let v = bounds::side_increment_factor(&need_bias(&args.p)?, &need_rational(&args.delta, "delta")?);
            json!({ "exact": to_ratio_string(&v), "approx": to_f64(&v) })
        }
    };
    Ok(value)
}
