//! `forbid-lab`: verification suites, deformation runs, extremal census and
//! bound evaluation.
//!
//! Exit status: 0 when every check passes, 1 when a check fails, 2 on usage
//! or I/O errors.

mod bound;
mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use forbid_lab::checks::{self, CheckOutcome, Suite, SuiteConfig};
use forbid_lab::deformation::export::{trace_csv, OutcomeDocument};
use forbid_lab::deformation::{run_deformation, verify_trace, DeformationInput};
use forbid_lab::extremal::{self, append_census, epsilon_oracle, CensusRow};
use forbid_lab::rational::{self, parse_rational};
use forbid_lab::{bounds, Bias, Family};

use config::{pick, FileConfig};

const SCHEMA: u32 = 1;

#[derive(Debug, Parser)]
#[command(name = "forbid-lab", version, about = "Workbench for families with forbidden cross-intersection sizes")]
struct Cli {
    /// TOML file with defaults for any subcommand; flags take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker thread cap [default: all cores]
    #[arg(long, global = true, env = "FORBID_LAB_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a property suite and write a JSON report
    Verify(VerifyArgs),
    /// Run the deformation procedure on a pair of fixture files
    Run(RunArgs),
    /// Exhaustive extremal products appended to a JSON-lines census
    Census(CensusArgs),
    /// Evaluate a closed-form bound by name
    Bound(bound::BoundArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SuiteArg {
    Facts,
    Bounds,
    Widening,
    Concentration,
    Theorem,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Suite {
        match s {
            SuiteArg::Facts => Suite::Facts,
            SuiteArg::Bounds => Suite::Bounds,
            SuiteArg::Widening => Suite::Widening,
            SuiteArg::Concentration => Suite::Concentration,
            SuiteArg::Theorem => Suite::Theorem,
        }
    }
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    suite: SuiteArg,
    /// Largest ground set size [default: 10]
    #[arg(long)]
    max_n: Option<u32>,
    /// [default: 0]
    #[arg(long)]
    seed: Option<u64>,
    /// Random cases per randomized check [default: 1000]
    #[arg(long)]
    samples: Option<u64>,
    /// Report path [default: stdout]
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Ground set size; must match the fixtures when given
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    p: String,
    #[arg(long)]
    p_prime: String,
    #[arg(long)]
    ell: u32,
    /// Fixture file for F
    #[arg(long)]
    f: PathBuf,
    /// Fixture file for G
    #[arg(long)]
    g: PathBuf,
    /// Step parameter `num/den` [default: the standard choice for (n, p, ell)]
    #[arg(long)]
    delta: Option<String>,
    /// Directory for outcome.json and trace.csv [default: .]
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CensusArgs {
    /// [default: 1]
    #[arg(long)]
    n_min: Option<u32>,
    /// [default: 4]
    #[arg(long)]
    n_max: Option<u32>,
    /// Comma-separated biases; every pair p <= p' is searched [default: 1/4,1/3,1/2]
    #[arg(long)]
    p_grid: Option<String>,
    /// Largest ell [default: floor(pn)]
    #[arg(long)]
    ell_max: Option<u32>,
    /// Permit n = 5
    #[arg(long)]
    allow_slow: bool,
    /// [default: census.jsonl]
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Checks,
}

impl From<String> for Failure {
    fn from(s: String) -> Self {
        Failure::Usage(s)
    }
}

impl From<forbid_lab::Error> for Failure {
    fn from(e: forbid_lab::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn header() -> Value {
    let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    json!({ "generated_unix": secs, "version": env!("CARGO_PKG_VERSION") })
}

fn report(command: &str, passed: bool, body: Value) -> Value {
    let mut doc = json!({ "schema": SCHEMA, "header": header(), "command": command, "passed": passed });
    if let (Value::Object(d), Value::Object(b)) = (&mut doc, body) {
        d.extend(b);
    }
    doc
}

fn emit(doc: &Value, out: Option<&Path>) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(doc).expect("serializable") + "\n";
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn finish(doc: Value, out: Option<&Path>) -> Result<(), Failure> {
    emit(&doc, out)?;
    if doc["passed"] == json!(true) {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

fn parse_bias(s: &str) -> Result<Bias, Failure> {
    Ok(Bias::new(parse_rational(s)?)?)
}

fn cmd_verify(args: VerifyArgs, file: &FileConfig) -> Result<(), Failure> {
    let cfg = SuiteConfig {
        max_n: pick(args.max_n, file.verify.max_n, config::DEFAULT_MAX_N),
        seed: pick(args.seed, file.verify.seed, config::DEFAULT_SEED),
        samples: pick(args.samples, file.verify.samples, config::DEFAULT_SAMPLES),
    };
    let suite = Suite::from(args.suite);
    let outcomes = checks::run_suite(suite, &cfg);
    let out = args.out.or(file.verify.out.clone());
    let doc = report(
        "verify",
        checks::all_passed(&outcomes),
        json!({
            "suite": suite.name(),
            "config": { "max_n": cfg.max_n, "seed": cfg.seed, "samples": cfg.samples },
            "checks": outcomes,
        }),
    );
    if out.is_some() {
        summarize(&outcomes);
    }
    finish(doc, out.as_deref())
}

fn summarize(outcomes: &[CheckOutcome]) {
    for o in outcomes {
        eprintln!("{} {} ({} cases, {} failed)", if o.passed() { "ok  " } else { "FAIL" }, o.name, o.cases, o.failed);
    }
}

fn read_fixture(path: &Path) -> Result<Family, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    Family::parse_fixture(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn cmd_run(args: RunArgs, file: &FileConfig) -> Result<(), Failure> {
    let f = read_fixture(&args.f)?;
    let g = read_fixture(&args.g)?;
    if let Some(n) = args.n {
        if f.ground_size() != n || g.ground_size() != n {
            return Err(format!("fixtures have m = {} and {}, expected n = {n}", f.ground_size(), g.ground_size()).into());
        }
    }
    let p = parse_bias(&args.p)?;
    let p_prime = parse_bias(&args.p_prime)?;
    let input = match &args.delta {
        Some(d) => DeformationInput { n: f.ground_size(), p, p_prime, ell: args.ell, delta: parse_rational(d)?, f, g },
        None => DeformationInput::with_default_delta(p, p_prime, args.ell, f, g)?,
    };
    let outcome = run_deformation(&input)?;
    let verification = verify_trace(&outcome, &input);

    let dir = args.out_dir.or(file.run.out_dir.clone()).unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir).map_err(|e| format!("cannot create {}: {e}", dir.display()))?;
    let outcome_path = dir.join("outcome.json");
    let trace_path = dir.join("trace.csv");
    let outcome_doc = serde_json::to_string_pretty(&OutcomeDocument::new(&outcome, &input)).expect("serializable") + "\n";
    std::fs::write(&outcome_path, outcome_doc).map_err(|e| format!("cannot write {}: {e}", outcome_path.display()))?;
    std::fs::write(&trace_path, trace_csv(&outcome)).map_err(|e| format!("cannot write {}: {e}", trace_path.display()))?;

    let doc = report(
        "run",
        verification.passed(),
        json!({
            "outcome": outcome_path,
            "trace": trace_path,
            "counters": {
                "S_d1": outcome.counters.upper_increments,
                "S_d2": outcome.counters.side_increments,
                "S_w": outcome.counters.widenings,
            },
            "delta": rational::to_ratio_string(&input.delta),
            "checks": verification.checks,
        }),
    );
    finish(doc, None)
}

#[derive(Serialize)]
struct CensusCheck {
    n: u32,
    p: String,
    p_prime: String,
    ell: u32,
    epsilon: f64,
    /// `t^2 / (58^2 pn) - ln 2`
    floor: f64,
}

fn cmd_census(args: CensusArgs, file: &FileConfig) -> Result<(), Failure> {
    let c = &file.census;
    let n_min = pick(args.n_min, c.n_min, config::DEFAULT_CENSUS_N_MIN);
    let n_max = pick(args.n_max, c.n_max, config::DEFAULT_CENSUS_N_MAX);
    let grid_text = pick(args.p_grid, c.p_grid.clone(), config::DEFAULT_P_GRID.to_string());
    let allow_slow = args.allow_slow || c.allow_slow.unwrap_or(false);
    let out = pick(args.out, c.out.clone(), PathBuf::from(config::DEFAULT_CENSUS_OUT));
    let ell_cap = args.ell_max.or(c.ell_max);

    let limit = if allow_slow { extremal::ORACLE_SLOW_MAX_N } else { extremal::ORACLE_MAX_N };
    if n_min < 1 || n_min > n_max || n_max > limit {
        return Err(format!("need 1 <= n-min <= n-max <= {limit}{}", if allow_slow { "" } else { " (more with --allow-slow)" }).into());
    }
    let mut grid = grid_text.split(',').map(parse_bias).collect::<Result<Vec<_>, _>>()?;
    grid.sort_by(|a, b| a.value().cmp(b.value()));
    grid.dedup();

    let mut rows = Vec::new();
    let mut violations = Vec::new();
    for n in n_min..=n_max {
        for (i, p) in grid.iter().enumerate() {
            let top = rational::floor_to_i64(&p.scaled(n)) as u32;
            for pp in &grid[i..] {
                for ell in 0..=ell_cap.map_or(top, |c| c.min(top)) {
                    let rec = epsilon_oracle(n, p, pp, ell, allow_slow)?;
                    let t = rational::to_f64(&bounds::distance_to_ends(n, p, ell)?);
                    let pn = p.as_f64() * n as f64;
                    let floor = t * t / (bounds::SUBGAUSSIAN_CONST.powi(2) * pn) - 2f64.ln();
                    if rec.epsilon < floor - checks::FLOAT_MARGIN {
                        violations.push(CensusCheck { n, p: p.to_string(), p_prime: pp.to_string(), ell, epsilon: rec.epsilon, floor });
                    }
                    rows.push(CensusRow::from(&rec));
                }
            }
        }
    }
    let added = append_census(&out, &rows)?;
    let doc = report(
        "census",
        violations.is_empty(),
        json!({ "path": out, "rows": rows.len(), "added": added, "violations": violations }),
    );
    finish(doc, None)
}

fn cmd_bound(args: bound::BoundArgs) -> Result<(), Failure> {
    let value = bound::evaluate(&args)?;
    let name = args.name.to_possible_value().expect("no skipped variants").get_name().to_string();
    let doc = json!({ "schema": SCHEMA, "bound": name, "value": value });
    emit(&doc, None)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = config::load(cli.config.as_deref()).map_err(Failure::Usage).and_then(|file| {
        if let Some(threads) = cli.threads.or(file.threads) {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads.max(1))
                .build_global()
                .map_err(|e| Failure::Usage(format!("thread pool: {e}")))?;
        }
        match cli.command {
            Command::Verify(a) => cmd_verify(a, &file),
            Command::Run(a) => cmd_run(a, &file),
            Command::Census(a) => cmd_census(a, &file),
            Command::Bound(a) => cmd_bound(a),
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failed_report_maps_to_check_failure() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.json");
        let doc = report("verify", false, json!({ "checks": [] }));
        assert!(matches!(finish(doc, Some(&path)), Err(Failure::Checks)));
        let written: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(written["schema"], 1);
        assert_eq!(written["passed"], false);
        assert!(finish(report("verify", true, json!({})), Some(&path)).is_ok());
    }
}
