//! Property suites shared by the command-line verifier and the test suites.
//!
//! Every function returns [`CheckOutcome`]s: how many cases ran, how many
//! failed, and the first few failures with exact values.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{self, ChernoffCase, IntervalKind, LayerPart, LowerTail};
use crate::deformation::{
    self, check_concentration, initial_product_within_bound, run_deformation, verify_trace,
    widening_family_check, DeformationInput,
};
use crate::extremal::{self, best_partner, best_partner_window, construction_high_ell, epsilon_oracle};
use crate::family::{forbids, intersection_spectrum, Family, Window};
use crate::measure::{binomial_u64, mu, tail_measure, Bias, Tail};
use crate::random::{self, PairShape};
use crate::rational::{self, int, rat, Rational};
use crate::supersat::{count_i_ell, count_i_ell_set};

/// Failure details kept per check; further failures are only counted.
const MAX_DETAILS: usize = 20;

/// Relative slack granted when an exact value is compared against a bound
/// evaluated in floating point.
pub const FLOAT_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub cases: u64,
    pub skipped: u64,
    pub failed: u64,
    pub failures: Vec<String>,
}

impl CheckOutcome {
    pub fn new(name: impl Into<String>) -> Self {
        CheckOutcome {
            name: name.into(),
            cases: 0,
            skipped: 0,
            failed: 0,
            failures: Vec::new(),
        }
    }

    /// Counts one case; `detail` is only evaluated on failure.
    pub fn record(&mut self, ok: bool, detail: impl FnOnce() -> String) -> bool {
        self.cases += 1;
        if !ok {
            self.failed += 1;
            if self.failures.len() < MAX_DETAILS {
                self.failures.push(detail());
            }
        }
        ok
    }

    pub fn skip(&mut self) {
        self.skipped += 1;
    }

    pub fn passed(&self) -> bool {
        self.failed == 0
    }

    /// Folds another run of the same check into this one.
    pub fn absorb(&mut self, other: CheckOutcome) {
        self.cases += other.cases;
        self.skipped += other.skipped;
        self.failed += other.failed;
        let room = MAX_DETAILS.saturating_sub(self.failures.len());
        self.failures.extend(other.failures.into_iter().take(room));
    }
}

/// Merges outcomes with equal names, keeping first-seen order.
pub fn merge_outcomes(outcomes: impl IntoIterator<Item = CheckOutcome>) -> Vec<CheckOutcome> {
    let mut merged: Vec<CheckOutcome> = Vec::new();
    for o in outcomes {
        match merged.iter_mut().find(|m| m.name == o.name) {
            Some(existing) => existing.absorb(o),
            None => merged.push(o),
        }
    }
    merged
}

pub fn all_passed(outcomes: &[CheckOutcome]) -> bool {
    outcomes.iter().all(CheckOutcome::passed)
}

pub fn at_most(exact: &Rational, bound: f64) -> bool {
    rational::to_f64(exact) <= bound * (1.0 + FLOAT_MARGIN)
}

pub fn at_least(exact: &Rational, bound: f64) -> bool {
    rational::to_f64(exact) >= bound * (1.0 - FLOAT_MARGIN)
}

/// Independent stream for task `index` of check `stream`.
pub fn task_rng(seed: u64, stream: u64, index: u64) -> ChaCha8Rng {
    let mixed = seed
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(stream.wrapping_mul(0xD1B5_4A32_D192_ED03))
        .wrapping_add(index);
    ChaCha8Rng::seed_from_u64(mixed)
}

fn bias(a: i64, b: i64) -> Bias {
    Bias::from_ratio(a, b).expect("static bias")
}

/// `{1/4, 1/3, 1/2}`.
pub fn small_bias_grid() -> Vec<Bias> {
    vec![bias(1, 4), bias(1, 3), bias(1, 2)]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Facts,
    Bounds,
    Widening,
    Concentration,
    Theorem,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Facts => "facts",
            Suite::Bounds => "bounds",
            Suite::Widening => "widening",
            Suite::Concentration => "concentration",
            Suite::Theorem => "theorem",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteConfig {
    pub max_n: u32,
    pub seed: u64,
    /// Random cases per randomized check.
    pub samples: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { max_n: 10, seed: 0, samples: 1000 }
    }
}

pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Vec<CheckOutcome> {
    match suite {
        Suite::Facts => facts(cfg.max_n.min(12), cfg.samples, cfg.seed),
        Suite::Bounds => {
            let mut out = bound_grid(60);
            out.push(layer_density(cfg.samples.min(500), cfg.seed));
            out.extend(interval_pairs(cfg.samples, cfg.max_n.min(12), cfg.seed));
            out.push(layer_pairs(cfg.max_n.min(8), cfg.seed));
            out
        }
        Suite::Widening => vec![
            widening_sampling(cfg.samples, cfg.seed),
            widening_families(cfg.samples, cfg.max_n.min(10), cfg.seed),
        ],
        Suite::Concentration => concentration_families(cfg.samples.min(500), cfg.max_n.min(12), cfg.seed),
        Suite::Theorem => {
            let mut out = theorem_exhaustive(cfg.max_n.min(extremal::ORACLE_MAX_N), &small_bias_grid());
            out.extend(deformation_runs(cfg.samples, cfg.max_n.clamp(4, 12), cfg.seed));
            out.extend(constructions(cfg.max_n.min(10)));
            out.push(high_ell_chain(400));
            out
        }
    }
}

// ---------------------------------------------------------------- families

/// Structural facts about sections, measures, expansion and complements.
pub fn facts(max_m: u32, count: u64, seed: u64) -> Vec<CheckOutcome> {
    let mut partition = CheckOutcome::new("sections partition members");
    let mut decomposition = CheckOutcome::new("measure splits over sections");
    let mut additivity = CheckOutcome::new("measure is additive");
    let mut propagation = CheckOutcome::new("window propagation to sections");
    let mut monotone = CheckOutcome::new("closed families are monotone in p");
    let mut duality = CheckOutcome::new("layer complement window duality");
    let mut symmetry = CheckOutcome::new("spectrum symmetry");
    let biases = [bias(1, 5), bias(1, 3), bias(1, 2), bias(2, 3)];

    for i in 0..count {
        let mut rng = task_rng(seed, 1, i);
        let m = rng.random_range(2..=max_m.max(2));
        let f = random::random_family(m, rng.random_range(0.05..0.95), &mut rng);
        let g = random::random_family(m, rng.random_range(0.05..0.95), &mut rng);
        let p = &biases[rng.random_range(0..biases.len())];

        let (f0, f1) = f.sections().expect("m >= 2");
        partition.record(f0.len() + f1.len() == f.len(), || format!("m = {m}: {} + {} != {}", f0.len(), f1.len(), f.len()));
        let split = p.value() * mu(&f1, p) + p.complement().value() * mu(&f0, p);
        decomposition.record(split == mu(&f, p), || format!("m = {m}, p = {p}"));
        let lhs = mu(&f.union(&g).unwrap(), p) + mu(&f.intersection(&g).unwrap(), p);
        additivity.record(lhs == mu(&f, p) + mu(&g, p), || format!("m = {m}, p = {p}"));
        symmetry.record(
            intersection_spectrum(&f, &g).unwrap() == intersection_spectrum(&g, &f).unwrap(),
            || format!("m = {m}"),
        );

        // window propagation on a pair that forbids a random window
        let a = rng.random_range(0..=m);
        let b = rng.random_range(a..=m);
        let window = Window { lo: a, hi: b };
        let shape = if rng.random_bool(0.5) { PairShape::Monotone } else { PairShape::Arbitrary };
        if let Some((pf, pg)) = random::random_window_pair(m, window, shape, &mut rng) {
            propagation_checks(&pf, &pg, window, &mut propagation);
        } else {
            propagation.skip();
        }

        // monotonicity in p for closed families
        let up = random::random_monotone_family(m, rng.random_range(1..=4), true, &mut rng);
        let down = random::random_monotone_family(m, rng.random_range(1..=4), false, &mut rng);
        for w in biases.windows(2) {
            let (lo, hi) = (&w[0], &w[1]);
            monotone.record(mu(&up, lo) <= mu(&up, hi), || format!("upper closed, m = {m}, {lo} vs {hi}"));
            monotone.record(mu(&down, lo) >= mu(&down, hi), || format!("downward closed, m = {m}, {lo} vs {hi}"));
        }

        // for F inside layer k: |A ∩ B| in [a, b] iff |A ∩ ([m] \ B)| in [k - b, k - a]
        let k = rng.random_range(0..=m);
        let lf = random::random_layer_family(m, k, rng.random_range(0.1..0.9), &mut rng);
        let hi = rng.random_range(0..=k);
        let lo = rng.random_range(0..=hi);
        let left = forbids(&lf, &g, Window { lo, hi }).unwrap();
        let right = forbids(&lf, &g.complement_family(), Window { lo: k - hi, hi: k - lo }).unwrap();
        duality.record(left == right, || format!("m = {m}, k = {k}, window [{lo}, {hi}]"));
    }

    let mut out = vec![partition, decomposition, additivity, propagation, monotone, duality, symmetry];
    out.push(expansion_laws(max_m.min(6)));
    out
}

/// Checks every derived pair of `(f, g)` against its propagated window.
pub fn propagation_checks(f: &Family, g: &Family, w: Window, out: &mut CheckOutcome) {
    let m = f.ground_size();
    let (f0, f1) = f.sections().expect("m >= 2");
    let (g0, g1) = g.sections().expect("m >= 2");
    let fu = f0.union(&f1).unwrap();
    let fi = f0.intersection(&f1).unwrap();
    let gu = g0.union(&g1).unwrap();
    let gi = g0.intersection(&g1).unwrap();
    let mut expect = |name: &str, a: &Family, b: &Family, win: Window| {
        out.record(forbids(a, b, win).unwrap(), || format!("m = {m}, window {w}: {name} meets {win}"));
    };
    expect("(F0, G0 ∪ G1)", &f0, &gu, w);
    expect("(F0 ∪ F1, G0)", &fu, &g0, w);
    if w.lo >= 1 {
        expect("(F1, G1)", &f1, &g1, Window { lo: w.lo - 1, hi: w.hi - 1 });
        expect("(F1, G0 ∩ G1)", &f1, &gi, Window { lo: w.lo - 1, hi: w.hi });
        expect("(F0 ∩ F1, G1)", &fi, &g1, Window { lo: w.lo - 1, hi: w.hi });
    }
}

/// Monotonicity and additivity of Hamming expansion, exhaustive over a
/// sample of families for `m <= max_m`.
fn expansion_laws(max_m: u32) -> CheckOutcome {
    let mut out = CheckOutcome::new("expansion is monotone and additive");
    for m in 1..=max_m {
        let mut rng = task_rng(0, 2, m as u64);
        for _ in 0..40 {
            let f = random::random_sparse_family(m, rng.random_range(1..=3), &mut rng);
            for s in 0..=m {
                let fs = f.expand(s);
                out.record(f.is_subfamily_of(&fs).unwrap(), || format!("m = {m}: F not inside F_{s}"));
                for t in 0..=m - s {
                    let twice = fs.expand(t);
                    out.record(twice == f.expand(s + t), || format!("m = {m}: (F_{s})_{t} != F_{}", s + t));
                    out.record(fs.is_subfamily_of(&f.expand(s + t)).unwrap(), || format!("m = {m}: F_{s} not inside F_{}", s + t));
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------- theorem

/// Exhaustive extremal products against the main bound, the strengthened
/// bound for the default `delta`, and the high-intersection construction.
pub fn theorem_exhaustive(max_n: u32, biases: &[Bias]) -> Vec<CheckOutcome> {
    let mut main = CheckOutcome::new("extremal product within main bound");
    let mut unbinding = CheckOutcome::new("main bound holds without float margin");
    let mut strong = CheckOutcome::new("extremal product within strengthened bound");
    let mut feasible = CheckOutcome::new("extremal product dominates construction");
    let mut witness = CheckOutcome::new("extremal witness forbids ell");
    for n in 2..=max_n {
        for p in biases {
            for pp in biases.iter().filter(|pp| p.value() <= pp.value()) {
                let top = rational::floor_to_i64(&p.scaled(n)) as u32;
                for ell in 0..=top {
                    let rec = match epsilon_oracle(n, p, pp, ell, false) {
                        Ok(r) => r,
                        Err(e) => {
                            main.record(false, || format!("n = {n}, p = {p}, p' = {pp}, ell = {ell}: {e}"));
                            continue;
                        }
                    };
                    let tag = || format!("n = {n}, p = {p}, p' = {pp}, ell = {ell}, product {}", rec.product);
                    let rhs = bounds::main_bound_rhs(n, p, ell).expect("ell <= pn");
                    main.record(at_most(&rec.product, rhs), || format!("{} > {rhs}", tag()));
                    unbinding.record(rational::to_f64(&rec.product) <= rhs, || format!("{} vs {rhs}", tag()));
                    witness.record(
                        forbids(&rec.witness_f, &rec.witness_g, Window::single(ell)).unwrap()
                            && mu(&rec.witness_f, p) * mu(&rec.witness_g, pp) == rec.product,
                        tag,
                    );
                    if let Ok(delta) = bounds::delta_choice(n, p, ell) {
                        let rhs = bounds::strengthened_bound(n, p, &delta);
                        strong.record(at_most(&rec.product, rhs), || format!("{} > {rhs}", tag()));
                    }
                    if ell >= 1 {
                        let (f, _) = construction_high_ell(n, ell).expect("1 <= ell <= n");
                        feasible.record(rec.product >= mu(&f, p), || {
                            format!("{} below construction {}", tag(), mu(&f, p))
                        });
                    }
                }
            }
        }
    }
    vec![main, unbinding, strong, feasible, witness]
}

/// Random valid inputs of the deformation procedure, each run to completion
/// and re-verified.
pub fn deformation_runs(count: u64, max_n: u32, seed: u64) -> Vec<CheckOutcome> {
    let biases = [bias(1, 4), bias(1, 3), bias(2, 5), bias(1, 2)];
    let results: Vec<Vec<CheckOutcome>> = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = task_rng(seed, 3, i);
            let input = loop {
                let n = rng.random_range(3..=max_n.max(3));
                let pi = rng.random_range(0..biases.len());
                let p = biases[pi].clone();
                let pp = biases[rng.random_range(pi..biases.len())].clone();
                let pn = p.scaled(n);
                let top = rational::ceil_to_i64(&pn) - 1;
                if top < 1 {
                    continue;
                }
                let ell = rng.random_range(1..=top) as u32;
                let shape = if i % 2 == 0 { PairShape::Monotone } else { PairShape::Arbitrary };
                let Some((f, g)) = random::random_forbidding_pair(n, ell, shape, &mut rng) else {
                    continue;
                };
                break DeformationInput::with_default_delta(p, pp, ell, f, g).expect("valid parameters");
            };
            let mut completes = CheckOutcome::new("run completes");
            let mut initial = CheckOutcome::new("initial product within strengthened bound");
            let (ok, value, bound) = initial_product_within_bound(&input);
            initial.record(ok, || format!("n = {}, ell = {}: {value} > {bound}", input.n, input.ell));
            let mut out = match run_deformation(&input) {
                Ok(outcome) => {
                    completes.record(true, String::new);
                    verify_trace(&outcome, &input).checks
                }
                Err(e) => {
                    completes.record(false, || format!("n = {}, ell = {}: {e}", input.n, input.ell));
                    Vec::new()
                }
            };
            out.insert(0, completes);
            out.push(initial);
            out
        })
        .collect();
    merge_outcomes(results.into_iter().flatten())
}

/// Constructions forbid `ell` and are nonempty.
pub fn constructions(max_n: u32) -> Vec<CheckOutcome> {
    let mut high = CheckOutcome::new("high-intersection construction forbids ell");
    let mut sym = CheckOutcome::new("symmetric construction forbids ell");
    for n in 1..=max_n.min(8) {
        for ell in 1..=n {
            let (f, g) = construction_high_ell(n, ell).expect("valid");
            high.record(
                !f.is_empty() && forbids(&f, &g, Window::single(ell)).unwrap(),
                || format!("n = {n}, ell = {ell}"),
            );
        }
    }
    let biases = [bias(1, 5), bias(1, 4), bias(1, 3), bias(2, 5), bias(1, 2)];
    for n in 1..=max_n {
        for p in &biases {
            let top = rational::floor_to_i64(&(p.scaled(n) / int(2))).max(0) as u32;
            for ell in 0..=top {
                match extremal::construction_symmetric(n, p, ell) {
                    Ok((f, g)) => {
                        sym.record(forbids(&f, &g, Window::single(ell)).unwrap(), || {
                            format!("n = {n}, p = {p}, ell = {ell}")
                        });
                    }
                    Err(_) => sym.skip(),
                }
            }
        }
    }
    vec![high, sym]
}

/// Lower-bound chain for `mu_p([n]^{< ell})` wherever its regime holds with
/// `n <= max_n`; the regime is empty below `n = 61` for every `p`.
pub fn high_ell_chain(max_n: u32) -> CheckOutcome {
    let mut out = CheckOutcome::new("high-intersection lower-bound chain");
    let biases = [bias(1, 4), bias(1, 3), bias(1, 2)];
    for n in 1..=max_n {
        for p in &biases {
            for ell in 0..=n {
                match extremal::high_ell_chain(n, p, ell) {
                    Ok(Some(c)) => {
                        out.record(c.holds(), || {
                            format!("n = {n}, p = {p}, ell = {ell}: {} vs {} vs {}", rational::to_f64(&c.measure), c.first, c.second)
                        });
                    }
                    Ok(None) => {}
                    Err(e) => {
                        out.record(false, || format!("n = {n}, p = {p}, ell = {ell}: {e}"));
                    }
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------- widening

/// At least `accepted` admissible tuples over the default grid.
pub fn widening_sampling(accepted: u64, seed: u64) -> CheckOutcome {
    let cells = deformation::default_widening_grid();
    let per_cell = accepted.div_ceil(cells.len() as u64).max(1);
    let summary = deformation::sample_widening(&cells, per_cell, seed);
    let mut out = CheckOutcome::new("numeric widening disjunction");
    out.cases = summary.accepted;
    out.skipped = summary.attempts - summary.accepted;
    out.failed = summary.counterexamples.len() as u64;
    out.failures = summary.counterexamples.iter().take(MAX_DETAILS).map(|t| format!("{t:?}")).collect();
    if summary.accepted < per_cell * cells.len() as u64 {
        out.record(false, || format!("only {} admissible tuples accepted", summary.accepted));
    }
    out
}

/// Random pairs over `m <= max_m`; whenever no increment step applies, one
/// of the widening moves keeps the required fraction of the product.
pub fn widening_families(count: u64, max_m: u32, seed: u64) -> CheckOutcome {
    let biases = [bias(1, 10), bias(1, 4), bias(1, 3), bias(1, 2)];
    let deltas = [rat(1, 100), rat(1, 20), rat(9, 100)];
    let parts: Vec<CheckOutcome> = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut out = CheckOutcome::new("widening lemma on families");
            let mut rng = task_rng(seed, 4, i);
            let m = rng.random_range(2..=max_m.max(2));
            let (f, g) = random_pair_for_widening(m, &mut rng);
            let pi = rng.random_range(0..biases.len());
            let p = &biases[pi];
            let pp = &biases[rng.random_range(pi..biases.len())];
            let delta = &deltas[rng.random_range(0..deltas.len())];
            match widening_family_check(&f, &g, p, pp, delta) {
                Ok(r) => match r.conclusion {
                    Some(holds) => {
                        out.record(holds, || {
                            format!(
                                "m = {m}, p = {p}, p' = {pp}, delta = {delta}: best {} vs product {}\nF:\n{f}G:\n{g}",
                                r.best_widening_product, r.product
                            )
                        });
                    }
                    None => out.skip(),
                },
                Err(e) => {
                    out.record(false, || format!("m = {m}: {e}"));
                }
            }
            out
        })
        .collect();
    merge_outcomes(parts).pop().unwrap_or_else(|| CheckOutcome::new("widening lemma on families"))
}

/// Nonempty pairs mixing shapes so that the no-increment case comes up often.
fn random_pair_for_widening(m: u32, rng: &mut ChaCha8Rng) -> (Family, Family) {
    loop {
        let pick = |rng: &mut ChaCha8Rng| match rng.random_range(0..4) {
            0 => random::random_family(m, rng.random_range(0.2..0.95), rng),
            1 => random::random_monotone_family(m, rng.random_range(1..=4), true, rng),
            2 => random::random_monotone_family(m, rng.random_range(1..=4), false, rng),
            _ => {
                // symmetric in the top coordinate, then perturbed
                let base = random::random_family(m - 1, rng.random_range(0.3..0.9), rng);
                let lifted: Vec<u32> = base.members().flat_map(|s| [s, s | 1 << (m - 1)]).collect();
                let f = Family::new(m, lifted).expect("fits");
                let noise = random::random_family(m, 0.05, rng);
                f.union(&noise).expect("same dimension")
            }
        };
        let f = pick(rng);
        let g = pick(rng);
        if !f.is_empty() && !g.is_empty() {
            return (f, g);
        }
    }
}

// ---------------------------------------------------------------- bounds

fn p_grid_low() -> Vec<Bias> {
    vec![bias(1, 10), bias(1, 5), bias(1, 4), bias(3, 10), bias(1, 3), bias(2, 5), bias(1, 2)]
}

fn p_grid_high() -> Vec<Bias> {
    vec![bias(1, 2), bias(3, 5), bias(2, 3), bias(7, 10), bias(3, 4), bias(9, 10)]
}

/// Tail estimates against exact binomial tails and the binomial sandwiches,
/// for every `n <= max_n`.
pub fn bound_grid(max_n: u32) -> Vec<CheckOutcome> {
    let mut upper_small = CheckOutcome::new("upper tail estimate for p <= 1/2");
    let mut upper_large = CheckOutcome::new("upper tail estimate for p >= 1/2");
    let mut lower_at_most = CheckOutcome::new("lower estimate for the tail at most k");
    let mut lower_at_least = CheckOutcome::new("lower estimate for the tail at least k");
    let mut sandwich = CheckOutcome::new("strict binomial sandwich");
    let mut entropy = CheckOutcome::new("entropy binomial sandwich");

    for n in 1..=max_n {
        for p in p_grid_low() {
            let pn = p.scaled(n);
            // t = pn itself and every integer in [pn, 2pn]
            let mut ts = vec![pn.clone()];
            let first = rational::ceil_to_i64(&pn);
            let last = rational::floor_to_i64(&(&pn * int(2)));
            ts.extend((first..=last).map(int));
            for t in ts {
                let exact = tail_measure(n, &p, Tail::AtLeast(rational::ceil_to_i64(&t)));
                let rhs = bounds::chernoff_upper(n, &p, &t, ChernoffCase::SmallBias).expect("in range");
                upper_small.record(at_most(&exact, rhs), || format!("n = {n}, p = {p}, t = {t}: {exact} > {rhs}"));
            }
            for k in 1..n {
                let k_r = int(k as i64);
                if k_r <= pn {
                    let exact = tail_measure(n, &p, Tail::AtMost(k as i64));
                    let rhs = bounds::lower_tail_bound(n, k, &p, LowerTail::AtMost).expect("in range");
                    lower_at_most.record(at_least(&exact, rhs), || format!("n = {n}, p = {p}, k = {k}: {exact} < {rhs}"));
                }
                if pn <= k_r && k_r < &pn * int(2) {
                    let exact = tail_measure(n, &p, Tail::AtLeast(k as i64));
                    let rhs = bounds::lower_tail_bound(n, k, &p, LowerTail::AtLeast).expect("in range");
                    lower_at_least.record(at_least(&exact, rhs), || format!("n = {n}, p = {p}, k = {k}: {exact} < {rhs}"));
                }
            }
        }
        for p in p_grid_high() {
            let pn = p.scaled(n);
            let mut ts = vec![pn.clone()];
            ts.extend((rational::ceil_to_i64(&pn)..=n as i64 + 1).map(int));
            for t in ts {
                let exact = tail_measure(n, &p, Tail::AtLeast(rational::ceil_to_i64(&t)));
                let rhs = bounds::chernoff_upper(n, &p, &t, ChernoffCase::LargeBias).expect("in range");
                upper_large.record(at_most(&exact, rhs), || format!("n = {n}, p = {p}, t = {t}: {exact} > {rhs}"));
            }
        }
        if n >= 2 {
            for k in 1..n {
                let c = binomial_u64(n, k) as f64;
                let s = bounds::binomial_sandwich(n, k).expect("inner index");
                sandwich.record(s.strictly_contains(c), || format!("C({n},{k}) = {c} outside ({}, {})", s.lower, s.upper));
                let e = bounds::entropy_bounds(n, k).expect("inner index");
                let lo_ok = c >= e.lower * (1.0 - FLOAT_MARGIN);
                let hi_ok = c <= e.upper * (1.0 + FLOAT_MARGIN);
                entropy.record(lo_ok && hi_ok, || format!("C({n},{k}) = {c} outside [{}, {}]", e.lower, e.upper));
            }
        }
    }
    vec![upper_small, upper_large, lower_at_most, lower_at_least, sandwich, entropy]
}

/// `|F|/C(n,k)` strictly between the two multiples of `mu_{k/n}(F)` for
/// random nonempty layer families.
pub fn layer_density(count: u64, seed: u64) -> CheckOutcome {
    let mut out = CheckOutcome::new("layer density versus layer measure");
    for i in 0..count {
        let mut rng = task_rng(seed, 5, i);
        let n = rng.random_range(2..=16u32);
        let k = rng.random_range(1..n);
        let f = loop {
            let f = random::random_layer_family(n, k, rng.random_range(0.01..1.0), &mut rng);
            if !f.is_empty() {
                break f;
            }
        };
        let density = f.len() as f64 / binomial_u64(n, k) as f64;
        let measure = rational::to_f64(&mu(&f, &Bias::from_ratio(k as i64, n as i64).expect("0 < k < n")));
        let factors = bounds::layer_density_factors(n, k).expect("inner index");
        let lo = factors.lower * measure;
        let hi = factors.upper * measure;
        out.record(lo < density && density < hi, || {
            format!("n = {n}, k = {k}, |F| = {}: {density} outside ({lo}, {hi})", f.len())
        });
    }
    out
}

/// Random pairs forbidding an initial window `[0, alpha]` or a final window
/// `[pn - alpha, n]`, against their product bounds.
pub fn interval_pairs(count: u64, max_n: u32, seed: u64) -> Vec<CheckOutcome> {
    let lows = [bias(1, 4), bias(1, 3), bias(1, 2)];
    let all = [bias(1, 4), bias(1, 3), bias(1, 2), bias(2, 3), bias(3, 4)];
    let mut initial = CheckOutcome::new("initial-window product bound");
    let mut terminal = CheckOutcome::new("final-window product bound");
    for i in 0..count {
        let mut rng = task_rng(seed, 6, i);
        let n = rng.random_range(2..=max_n.max(2));
        let p = &lows[rng.random_range(0..lows.len())];
        let partners: Vec<&Bias> = all
            .iter()
            .filter(|b| p.value() <= b.value() && *b.value() <= Rational::one() - p.value())
            .collect();
        let pp = partners[rng.random_range(0..partners.len())];
        let pn = p.scaled(n);
        let top = rational::floor_to_i64(&pn);
        if top < 1 {
            initial.skip();
            continue;
        }
        let alpha = rng.random_range(1..=top) as u32;
        let final_side = i % 2 == 1;
        let window = if final_side {
            let lo = rational::ceil_to_i64(&(&pn - int(alpha as i64))).max(0) as u32;
            Window { lo, hi: n }
        } else {
            Window { lo: 0, hi: alpha }
        };
        let shape = if rng.random_bool(0.5) { PairShape::Monotone } else { PairShape::Arbitrary };
        let Some((f, g)) = random::random_window_pair(n, window, shape, &mut rng) else {
            if final_side { terminal.skip() } else { initial.skip() }
            continue;
        };
        let product = mu(&f, p) * mu(&g, pp);
        let kind = if final_side { IntervalKind::Final } else { IntervalKind::Initial };
        let rhs = bounds::interval_bound_rhs(n, p, alpha, kind).expect("valid alpha");
        let check = if final_side { &mut terminal } else { &mut initial };
        check.record(at_most(&product, rhs), || {
            format!("n = {n}, p = {p}, p' = {pp}, alpha = {alpha}, window {window}: {product} > {rhs}")
        });
    }
    vec![initial, terminal]
}

/// Layer pairs forbidding `ell`: every `F` inside layer `k` when there are at
/// most `2^16` of them, otherwise a random sample, each with its largest
/// partner inside layer `m`.
pub fn layer_pairs(max_n: u32, seed: u64) -> CheckOutcome {
    let mut out = CheckOutcome::new("layer pair density bound");
    for n in 2..=max_n {
        for k in 1..=n / 2 {
            for ell in 1..=k {
                for m in k..=n {
                    let part = if m <= n - k {
                        LayerPart::Balanced
                    } else if m <= n - k + ell {
                        LayerPart::Heavy
                    } else {
                        continue;
                    };
                    let rhs = bounds::layer_bound_rhs(n, k, m, ell, part).expect("valid layer parameters");
                    let layer_k: Vec<u32> = Family::layer(n, k).unwrap().member_vec();
                    let layer_m = Family::layer(n, m).unwrap();
                    let total_k = binomial_u64(n, k) as f64;
                    let total_m = binomial_u64(n, m) as f64;
                    let mut check = |f: Family| {
                        let g = best_partner(&f, ell).intersection(&layer_m).unwrap();
                        let lhs = f.len() as f64 / total_k * (g.len() as f64 / total_m);
                        out.record(lhs <= rhs, || format!("n = {n}, k = {k}, m = {m}, ell = {ell}: {lhs} > {rhs}"));
                    };
                    if layer_k.len() <= 16 {
                        for mask in 1u32..1 << layer_k.len() {
                            let members = layer_k.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &s)| s);
                            check(Family::new(n, members).unwrap());
                        }
                    } else {
                        let mut rng = task_rng(seed, 7, ((n * 64 + k) * 64 + m) as u64 * 64 + ell as u64);
                        for _ in 0..2000 {
                            let f = random::random_subfamily(&Family::layer(n, k).unwrap(), rng.random_range(0.01..1.0), &mut rng);
                            check(f);
                        }
                    }
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------- concentration

/// Expansion bounds for `per_cell` families with `mu_p(F) >= 1/2` per
/// `(n, p)`, `n <= max_n`, `p in {1/4, 1/2, 3/4}`, plus as many unrestricted
/// families for the doubled-radius form, at every radius `t <= pn`.
pub fn concentration_families(per_cell: u64, max_n: u32, seed: u64) -> Vec<CheckOutcome> {
    let biases = [bias(1, 4), bias(1, 2), bias(3, 4)];
    let cells: Vec<(u32, usize)> = (1..=max_n).flat_map(|n| (0..biases.len()).map(move |b| (n, b))).collect();
    let parts: Vec<Vec<CheckOutcome>> = cells
        .par_iter()
        .map(|&(n, b)| {
            let p = &biases[b];
            let mut half = CheckOutcome::new("expansion of half-measure families");
            let mut doubled = CheckOutcome::new("doubled expansion above the tail");
            let mut rng = task_rng(seed, 8, (n as u64) << 8 | b as u64);
            let top = rational::floor_to_i64(&p.scaled(n)).max(0) as u32;
            let mut accepted = 0;
            let mut attempts = 0;
            while accepted < per_cell && attempts < per_cell * 50 {
                attempts += 1;
                let f = random_measure_family(n, &mut rng);
                if mu(&f, p) < rat(1, 2) {
                    continue;
                }
                accepted += 1;
                concentration_cases(&f, p, top, &mut half, &mut doubled);
            }
            if accepted < per_cell {
                half.record(false, || format!("n = {n}, p = {p}: only {accepted} families reached measure 1/2"));
            }
            for _ in 0..per_cell {
                let f = random_measure_family(n, &mut rng);
                concentration_cases(&f, p, top, &mut CheckOutcome::new(""), &mut doubled);
            }
            vec![half, doubled]
        })
        .collect();
    merge_outcomes(parts.into_iter().flatten())
}

fn random_measure_family(n: u32, rng: &mut ChaCha8Rng) -> Family {
    match rng.random_range(0..3) {
        0 => random::random_family(n, rng.random_range(0.05..1.0), rng),
        1 => random::random_monotone_family(n, rng.random_range(1..=4), false, rng),
        _ => random::random_monotone_family(n, rng.random_range(1..=4), true, rng),
    }
}

fn concentration_cases(f: &Family, p: &Bias, top: u32, half: &mut CheckOutcome, doubled: &mut CheckOutcome) {
    let n = f.ground_size();
    for t in 0..=top {
        let r = check_concentration(f, p, t).expect("t <= pn");
        if let Some(ok) = r.half_measure {
            half.record(ok, || format!("n = {n}, p = {p}, t = {t}, mu = {}\n{f}", r.measure));
        }
        match r.above_tail {
            Some(ok) => {
                doubled.record(ok, || format!("n = {n}, p = {p}, t = {t}, mu = {}\n{f}", r.measure));
            }
            None => doubled.skip(),
        }
    }
}

// ---------------------------------------------------------------- counting

/// Spectrum, per-level counts and per-set counts agree with each other.
pub fn counting_consistency(count: u64, max_m: u32, seed: u64) -> Vec<CheckOutcome> {
    let mut levels = CheckOutcome::new("spectrum matches level counts");
    let mut per_set = CheckOutcome::new("per-set counts sum to level counts");
    let mut total = CheckOutcome::new("spectrum sums to |F||G|");
    let mut layer_sym = CheckOutcome::new("layer complement count symmetry");
    for i in 0..count {
        let mut rng = task_rng(seed, 9, i);
        let m = rng.random_range(1..=max_m.max(1));
        let f = random::random_family(m, rng.random_range(0.0..0.5), &mut rng);
        let g = random::random_family(m, rng.random_range(0.0..0.5), &mut rng);
        let spectrum = intersection_spectrum(&f, &g).unwrap();
        total.record(spectrum.iter().sum::<u64>() == f.len() * g.len(), || format!("m = {m}"));
        for ell in 0..=m {
            let c = count_i_ell(&f, &g, ell).unwrap();
            levels.record(spectrum[ell as usize] == c, || format!("m = {m}, ell = {ell}: {} vs {c}", spectrum[ell as usize]));
            let summed: u64 = f.members().map(|s| count_i_ell_set(s, &g, ell)).sum();
            per_set.record(summed == c, || format!("m = {m}, ell = {ell}: {summed} vs {c}"));
        }
        let k = rng.random_range(0..=m);
        let lf = f.cardinality_filter(k, k);
        let gc = g.complement_family();
        for ell in 0..=k {
            let a = count_i_ell(&lf, &g, ell).unwrap();
            let b = count_i_ell(&lf, &gc, k - ell).unwrap();
            layer_sym.record(a == b, || format!("m = {m}, k = {k}, ell = {ell}: {a} vs {b}"));
        }
    }
    vec![levels, per_set, total, layer_sym]
}

/// Default `delta` for `(n, p, ell)` when it exists, for reports.
pub fn default_delta(n: u32, p: &Bias, ell: u32) -> Option<Rational> {
    bounds::delta_choice(n, p, ell).ok().filter(|d| !d.is_zero())
}

/// `F` with its largest partner avoiding `window`, for callers that only
/// need one such pair.
pub fn partner_pair(f: &Family, window: Window) -> (Family, Family) {
    (f.clone(), best_partner_window(f, window))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn outcome_bookkeeping() {
        let mut a = CheckOutcome::new("x");
        a.record(true, || unreachable!());
        a.record(false, || "bad".into());
        a.skip();
        assert_eq!((a.cases, a.failed, a.skipped), (2, 1, 1));
        let merged = merge_outcomes([a.clone(), CheckOutcome::new("y"), a]);
        assert_eq!(merged.len(), 2);
        assert_eq!(merged[0].cases, 4);
        assert!(!all_passed(&merged));
    }

    #[test]
    fn small_suites_pass() {
        for o in facts(6, 60, 1) {
            assert!(o.passed(), "{o:?}");
        }
        for o in theorem_exhaustive(3, &small_bias_grid()) {
            assert!(o.passed(), "{o:?}");
        }
        for o in deformation_runs(20, 8, 2) {
            assert!(o.passed(), "{o:?}");
        }
        for o in counting_consistency(50, 6, 3) {
            assert!(o.passed(), "{o:?}");
        }
    }
}
