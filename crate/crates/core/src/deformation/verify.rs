//! Independent re-derivation of a finished run.
//!
//! Sections are rebuilt from member lists rather than by slicing bit vectors,
//! and every step is replayed from the initial pair, so a bug in the engine's
//! fast paths shows up as a mismatch here.

use num_traits::Zero;

use super::engine::{DeformationInput, DeformationOutcome, Step, StepKind, Termination};
use crate::bounds::{self};
use crate::checks::CheckOutcome;
use crate::family::{forbids, Family, Window};
use crate::measure::mu;
use crate::rational::{self, Rational};

/// Brute-force window checks are skipped above this many member pairs.
pub const SOUNDNESS_PAIR_LIMIT: u64 = 1 << 28;

#[derive(Debug, Clone)]
pub struct TraceReport {
    pub checks: Vec<CheckOutcome>,
}

impl TraceReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckOutcome::passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failure_lines(&self) -> Vec<String> {
        self.checks
            .iter()
            .flat_map(|c| c.failures.iter().map(move |f| format!("{}: {f}", c.name)))
            .collect()
    }
}

fn split_top(f: &Family) -> (Family, Family) {
    let m = f.ground_size();
    let top = 1u32 << (m - 1);
    let lower = f.members().filter(|s| s & top == 0);
    let upper = f.members().filter(|s| s & top != 0).map(|s| s & !top);
    (
        Family::new(m - 1, lower).expect("section fits"),
        Family::new(m - 1, upper).expect("section fits"),
    )
}

fn derive(step: Step, f: &Family, g: &Family) -> (Family, Family) {
    let (f0, f1) = split_top(f);
    let (g0, g1) = split_top(g);
    let union = |a: &Family, b: &Family| a.union(b).expect("same dimension");
    let inter = |a: &Family, b: &Family| a.intersection(b).expect("same dimension");
    match step {
        Step::BothUpper => (f1, g1),
        Step::LowerWithMergedG => (f0, union(&g0, &g1)),
        Step::MergedFWithLower => (union(&f0, &f1), g0),
        Step::UpperWithCommonG => (f1, inter(&g0, &g1)),
        Step::CommonFWithUpper => (inter(&f0, &f1), g1),
    }
}

struct Checks {
    dimension: CheckOutcome,
    window_evolution: CheckOutcome,
    replay: CheckOutcome,
    branch: CheckOutcome,
    ratio: CheckOutcome,
    soundness: CheckOutcome,
    nonempty: CheckOutcome,
    counter_sum: CheckOutcome,
    lower_end_budget: CheckOutcome,
    termination: CheckOutcome,
    final_window: CheckOutcome,
    growth: CheckOutcome,
}

impl Checks {
    fn new() -> Self {
        Checks {
            dimension: CheckOutcome::new("dimension drops by one"),
            window_evolution: CheckOutcome::new("window evolution"),
            replay: CheckOutcome::new("replayed families and products"),
            branch: CheckOutcome::new("branch selection"),
            ratio: CheckOutcome::new("per-step measure ratio"),
            soundness: CheckOutcome::new("window soundness"),
            nonempty: CheckOutcome::new("families stay nonempty"),
            counter_sum: CheckOutcome::new("counters sum to n - m*"),
            lower_end_budget: CheckOutcome::new("lower-end moves at most ell"),
            termination: CheckOutcome::new("termination and output order"),
            final_window: CheckOutcome::new("final pair forbids its window"),
            growth: CheckOutcome::new("final product exceeds guaranteed growth"),
        }
    }

    fn into_vec(self) -> Vec<CheckOutcome> {
        vec![
            self.dimension,
            self.window_evolution,
            self.replay,
            self.branch,
            self.ratio,
            self.soundness,
            self.nonempty,
            self.counter_sum,
            self.lower_end_budget,
            self.termination,
            self.final_window,
            self.growth,
        ]
    }
}

fn check_soundness(c: &mut CheckOutcome, f: &Family, g: &Family, w: Window, iteration: usize) {
    if f.len().saturating_mul(g.len()) > SOUNDNESS_PAIR_LIMIT {
        c.skip();
        return;
    }
    let ok = forbids(f, g, w).unwrap_or(false);
    c.record(ok, || format!("iteration {iteration}: pair meets window {w}"));
}

fn product_of(input: &DeformationInput, f: &Family, g: &Family) -> Rational {
    mu(f, &input.p) * mu(g, &input.p_prime)
}

/// Replays `outcome` from `input` and checks every invariant of the run.
pub fn verify_trace(outcome: &DeformationOutcome, input: &DeformationInput) -> TraceReport {
    let mut c = Checks::new();
    let (p, delta) = (&input.p, &input.delta);

    let mut f = input.f.clone();
    let mut g = input.g.clone();
    let mut window = Window::single(input.ell);
    let mut m = input.n;
    let mut product = product_of(input, &f, &g);
    c.replay.record(product == outcome.initial_product, || {
        format!("initial product {} recorded as {}", product, outcome.initial_product)
    });
    check_soundness(&mut c.soundness, &f, &g, window, 0);
    let mut tally = super::engine::Counters::default();
    let mut replay_ok = true;

    for (idx, rec) in outcome.trace.records.iter().enumerate() {
        let iteration = idx + 1;
        let running = window.lo >= 1 && window.hi < m;
        c.termination.record(running, || {
            format!("iteration {iteration} taken although window {window} at m = {m} is terminal")
        });
        if !running || m < 2 {
            replay_ok = false;
            break;
        }
        c.dimension.record(rec.dim + 1 == m, || {
            format!("iteration {iteration}: dimension {} after {m}", rec.dim)
        });
        let expected_window = rec.step.next_window(window);
        c.window_evolution.record(rec.window == expected_window, || {
            format!(
                "iteration {iteration}: {} moved {window} to {}, expected {expected_window}",
                rec.step, rec.window
            )
        });

        // which steps were available, in order
        let mut first_taken = None;
        let mut next_state = None;
        for step in Step::ORDER {
            let (nf, ng) = derive(step, &f, &g);
            let next = product_of(input, &nf, &ng);
            let threshold = step.kind().factor(p, delta) * &product;
            let fires = step == Step::CommonFWithUpper || next > threshold;
            if fires && first_taken.is_none() {
                first_taken = Some(step);
            }
            if step == rec.step {
                c.ratio.record(next > threshold, || {
                    format!(
                        "iteration {iteration}: {step} product {next} not above {} x {product}",
                        rational::to_ratio_string(&step.kind().factor(p, delta))
                    )
                });
                next_state = Some((nf, ng, next));
            }
        }
        c.branch.record(first_taken == Some(rec.step), || {
            format!(
                "iteration {iteration}: recorded {}, first qualifying step is {}",
                rec.step,
                first_taken.map_or("none".to_string(), |s| s.to_string())
            )
        });

        let (nf, ng, next) = next_state.expect("every step is derived");
        c.replay.record(next == rec.product, || {
            format!("iteration {iteration}: product {next} recorded as {}", rec.product)
        });
        if let Some((sf, sg)) = &rec.families {
            c.replay.record(*sf == nf && *sg == ng, || {
                format!("iteration {iteration}: stored families differ from replay")
            });
        }
        c.nonempty.record(!nf.is_empty() && !ng.is_empty() && !next.is_zero(), || {
            format!("iteration {iteration}: empty family after {}", rec.step)
        });
        match rec.step.kind() {
            StepKind::UpperIncrement => tally.upper_increments += 1,
            StepKind::SideIncrement => tally.side_increments += 1,
            StepKind::Widening => tally.widenings += 1,
        }
        f = nf;
        g = ng;
        window = expected_window;
        m -= 1;
        product = next;
        check_soundness(&mut c.soundness, &f, &g, window, iteration);
    }

    let counters = outcome.counters;
    let n = input.n;
    c.counter_sum.record(counters.total() + outcome.m_star == n, || {
        format!(
            "{} + {} + {} != {n} - {}",
            counters.upper_increments, counters.side_increments, counters.widenings, outcome.m_star
        )
    });
    c.counter_sum.record(counters == tally, || {
        format!("counters {counters:?} disagree with the trace {tally:?}")
    });
    c.lower_end_budget.record(counters.upper_increments + counters.widenings <= input.ell, || {
        format!(
            "{} + {} > ell = {}",
            counters.upper_increments, counters.widenings, input.ell
        )
    });

    let (a, b, ms) = (outcome.a_star, outcome.b_star, outcome.m_star);
    c.termination.record(a <= b && b <= ms && ms >= 1, || {
        format!("output ({a}, {b}, {ms}) not ordered")
    });
    if replay_ok {
        c.termination.record(window.lo == a && window.hi == b && m == ms, || {
            format!("replay ends at {window} with m = {m}, outcome says [{a}, {b}] with m = {ms}")
        });
        let stops = match outcome.termination {
            Termination::LowerEnd => window.lo == 0,
            Termination::UpperEnd => window.lo > 0 && window.hi == m,
        };
        c.termination.record(stops, || {
            format!("{:?} does not match final window {window} at m = {m}", outcome.termination)
        });
        c.replay.record(f == outcome.f_star && g == outcome.g_star, || {
            "output families differ from replay".to_string()
        });
    }

    let final_window = if a == 0 {
        Window { lo: 0, hi: b }
    } else {
        Window { lo: a, hi: ms }
    };
    if outcome.f_star.ground_size() == ms && outcome.g_star.ground_size() == ms {
        check_soundness(&mut c.final_window, &outcome.f_star, &outcome.g_star, final_window, 0);
    } else {
        c.final_window.record(false, || "output families have the wrong dimension".to_string());
    }

    let final_product = product_of(input, &outcome.f_star, &outcome.g_star);
    c.growth.record(final_product == outcome.final_product, || {
        format!("final product {final_product} recorded as {}", outcome.final_product)
    });
    let floor = counters.guaranteed_growth(p, delta) * &outcome.initial_product;
    c.growth.record(final_product > floor, || {
        format!("final product {final_product} not above {floor}")
    });

    TraceReport { checks: c.into_vec() }
}

/// Whether the initial product respects `2 exp(-pn delta^2)`; only meaningful
/// when `delta` is the default choice for `(n, p, ell)`.
pub fn initial_product_within_bound(input: &DeformationInput) -> (bool, f64, f64) {
    let bound = bounds::strengthened_bound(input.n, &input.p, &input.delta);
    let value = rational::to_f64(&input.initial_product());
    (value <= bound * (1.0 + 1e-12), value, bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deformation::engine::run_deformation;
    use crate::measure::Bias;
    use crate::rational::rat;

    fn worked() -> DeformationInput {
        let half = Bias::from_ratio(1, 2).unwrap();
        DeformationInput {
            n: 4,
            p: half.clone(),
            p_prime: half,
            ell: 1,
            delta: rat(1, 116),
            f: Family::new(4, [0b1111]).unwrap(),
            g: Family::new(4, [0]).unwrap(),
        }
    }

    #[test]
    fn worked_example_verifies() {
        let input = worked();
        let out = run_deformation(&input).unwrap();
        let report = verify_trace(&out, &input);
        assert!(report.passed(), "{:?}", report.failure_lines());
        assert!(forbids(&out.f_star, &out.g_star, Window::single(1)).unwrap());
    }

    #[test]
    fn tampered_counter_is_caught() {
        let input = worked();
        let mut out = run_deformation(&input).unwrap();
        out.counters.side_increments -= 1;
        let report = verify_trace(&out, &input);
        assert!(!report.check("counters sum to n - m*").unwrap().passed());
    }

    #[test]
    fn tampered_step_is_caught() {
        let input = worked();
        let mut out = run_deformation(&input).unwrap();
        out.trace.records[1].step = Step::LowerWithMergedG;
        let report = verify_trace(&out, &input);
        assert!(!report.check("branch selection").unwrap().passed());
        assert!(!report.passed());
    }

    #[test]
    fn tampered_product_is_caught() {
        let input = worked();
        let mut out = run_deformation(&input).unwrap();
        out.final_product = rat(1, 2);
        assert!(!verify_trace(&out, &input).passed());
    }
}
