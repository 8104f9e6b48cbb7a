//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Runs with `cargo test -p forbid-lab-core --test acceptance`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use forbid_lab::checks::{self, CheckOutcome};
use forbid_lab::deformation::{run_deformation, verify_trace, DeformationInput, Termination};
use forbid_lab::extremal::epsilon_oracle;
use forbid_lab::random;
use forbid_lab::rational::rat;
use forbid_lab::supersat::{count_i_ell, count_i_ell_set};
use forbid_lab::{forbids, intersection_spectrum, Bias, Family, Window};

const SEED: u64 = 20_240_601;

struct Verdict {
    ok: bool,
    summary: String,
    details: Vec<String>,
}

impl Verdict {
    fn from_outcomes(outcomes: &[CheckOutcome]) -> Self {
        let ok = checks::all_passed(outcomes) && outcomes.iter().all(|o| o.cases > 0);
        let summary = outcomes
            .iter()
            .map(|o| format!("{}: {}/{} ok", o.name, o.cases - o.failed, o.cases))
            .collect::<Vec<_>>()
            .join("; ");
        let details = outcomes
            .iter()
            .filter(|o| !o.passed() || o.cases == 0)
            .flat_map(|o| {
                let head = format!("{}: {} failed of {}", o.name, o.failed, o.cases);
                std::iter::once(head).chain(o.failures.iter().take(5).cloned())
            })
            .collect();
        Verdict { ok, summary, details }
    }
}

fn half() -> Bias {
    Bias::from_ratio(1, 2).unwrap()
}

fn exhaustive_main_bound() -> Verdict {
    let outcomes = checks::theorem_exhaustive(4, &checks::small_bias_grid());
    Verdict::from_outcomes(&outcomes[..2])
}

fn two_cube_value() -> Verdict {
    let rec = epsilon_oracle(2, &half(), &half(), 1, false).unwrap();
    let witness_ok = forbids(&rec.witness_f, &rec.witness_g, Window::single(1)).unwrap();
    let ok = rec.product == rat(1, 4) && (rec.epsilon - 4f64.ln()).abs() < 1e-12 && witness_ok;
    Verdict {
        ok,
        summary: format!(
            "product {}, epsilon {} (ln 4 = {}), witness F = {:?}, G = {:?}",
            rec.product,
            rec.epsilon,
            4f64.ln(),
            rec.witness_f.members().map(forbid_lab::family::format_subset).collect::<Vec<_>>(),
            rec.witness_g.members().map(forbid_lab::family::format_subset).collect::<Vec<_>>(),
        ),
        details: Vec::new(),
    }
}

fn worked_instance() -> Verdict {
    let input = DeformationInput {
        n: 4,
        p: half(),
        p_prime: half(),
        ell: 1,
        delta: rat(1, 116),
        f: Family::new(4, [0b1111]).unwrap(),
        g: Family::new(4, [0]).unwrap(),
    };
    let out = run_deformation(&input).unwrap();
    let c = out.counters;
    let report = verify_trace(&out, &input);
    let shape_ok = (out.a_star, out.b_star, out.m_star) == (1, 1, 1)
        && (c.upper_increments, c.side_increments, c.widenings) == (0, 3, 0)
        && out.termination == Termination::UpperEnd;
    Verdict {
        ok: shape_ok && report.passed(),
        summary: format!(
            "a* = {}, b* = {}, m* = {}, counters ({}, {}, {}), {} trace checks",
            out.a_star,
            out.b_star,
            out.m_star,
            c.upper_increments,
            c.side_increments,
            c.widenings,
            report.checks.len()
        ),
        details: report.failure_lines(),
    }
}

fn deformation_at_scale() -> Verdict {
    Verdict::from_outcomes(&checks::deformation_runs(1000, 12, SEED))
}

fn widening_sampling() -> Verdict {
    Verdict::from_outcomes(&[checks::widening_sampling(100_000, SEED)])
}

fn widening_families() -> Verdict {
    let o = checks::widening_families(64_000, 10, SEED);
    let mut v = Verdict::from_outcomes(std::slice::from_ref(&o));
    v.summary = format!("{} ({} pairs where an increment step applies)", v.summary, o.skipped);
    v
}

fn bound_grid() -> Verdict {
    let mut outcomes = checks::bound_grid(60);
    outcomes.push(checks::layer_density(500, SEED));
    Verdict::from_outcomes(&outcomes)
}

fn concentration() -> Verdict {
    Verdict::from_outcomes(&checks::concentration_families(500, 12, SEED))
}

fn interval_windows() -> Verdict {
    Verdict::from_outcomes(&checks::interval_pairs(4000, 12, SEED))
}

/// Members listed, then every cross pair popcounted.
fn naive_spectrum(f: &Family, g: &Family) -> Vec<u64> {
    let m = f.ground_size();
    let fs: Vec<u32> = (0u32..1 << m).filter(|&s| f.contains(s)).collect();
    let gs: Vec<u32> = (0u32..1 << m).filter(|&s| g.contains(s)).collect();
    let mut out = vec![0u64; m as usize + 1];
    for a in &fs {
        for b in &gs {
            out[(a & b).count_ones() as usize] += 1;
        }
    }
    out
}

fn counting() -> Verdict {
    let mut naive = CheckOutcome::new("spectrum and counts match double loop");
    let mut decomposition = CheckOutcome::new("per-set counts sum to total");
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for _ in 0..10_000 {
        let m = rng.random_range(1..=10u32);
        let f = random::random_family(m, rng.random_range(0.0..0.4), &mut rng);
        let g = random::random_family(m, rng.random_range(0.0..0.4), &mut rng);
        let expected = naive_spectrum(&f, &g);
        let spectrum = intersection_spectrum(&f, &g).unwrap();
        let counts: Vec<u64> = (0..=m).map(|l| count_i_ell(&f, &g, l).unwrap()).collect();
        naive.record(spectrum == expected && counts == expected, || format!("m = {m}: {expected:?} vs {spectrum:?} / {counts:?}"));
        for ell in 0..=m {
            let summed: u64 = f.members().map(|s| count_i_ell_set(s, &g, ell)).sum();
            decomposition.record(summed == expected[ell as usize], || format!("m = {m}, ell = {ell}"));
        }
    }
    Verdict::from_outcomes(&[naive, decomposition])
}

fn layer_pairs() -> Verdict {
    Verdict::from_outcomes(&[checks::layer_pairs(8, SEED)])
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict, Duration); 11] = [
        ("exhaustive products within main bound, n <= 4", exhaustive_main_bound, Duration::from_secs(120)),
        ("two-cube value ln 4 with product 1/4", two_cube_value, Duration::from_secs(1)),
        ("worked deformation instance", worked_instance, Duration::from_secs(1)),
        ("deformation invariants on 1000 random instances", deformation_at_scale, Duration::from_secs(300)),
        ("widening disjunction on 1e5 sampled tuples", widening_sampling, Duration::from_secs(60)),
        ("widening lemma on 64000 family pairs", widening_families, Duration::MAX),
        ("bound soundness grid, n <= 60", bound_grid, Duration::from_secs(60)),
        ("measure concentration under expansion", concentration, Duration::MAX),
        ("interval-window product bounds", interval_windows, Duration::MAX),
        ("counting agrees with double loop", counting, Duration::MAX),
        ("layer pair bounds, n <= 8", layer_pairs, Duration::MAX),
    ];
    let mut failures = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = run();
        let elapsed = start.elapsed();
        let in_budget = elapsed <= *budget;
        let ok = verdict.ok && in_budget;
        if !ok {
            failures += 1;
        }
        println!(
            "{} criterion {:>2}: {} [{:.2?}] {}",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            name,
            elapsed,
            verdict.summary
        );
        if !in_budget {
            println!("    over time budget of {budget:?}");
        }
        for line in &verdict.details {
            println!("    {line}");
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
