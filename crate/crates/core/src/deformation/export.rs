//! Outcome JSON and trace CSV.

use serde::Serialize;

use super::engine::{DeformationInput, DeformationOutcome, Step, Termination};
use crate::error::{Error, Result};
use crate::rational::{to_ratio_string, Rational};

pub const TRACE_HEADER: &str = "iter,step,a,b,m,product_num,product_den";

#[derive(Debug, Serialize)]
pub struct CounterDocument {
    #[serde(rename = "S_d1")]
    pub upper_increments: u32,
    #[serde(rename = "S_d2")]
    pub side_increments: u32,
    #[serde(rename = "S_w")]
    pub widenings: u32,
}

#[derive(Debug, Serialize)]
pub struct OutcomeDocument {
    pub n: u32,
    pub p: String,
    pub p_prime: String,
    pub ell: u32,
    pub delta: String,
    pub a_star: u32,
    pub b_star: u32,
    pub m_star: u32,
    pub termination: &'static str,
    pub counters: CounterDocument,
    pub iterations: usize,
    pub initial_product: String,
    pub final_product: String,
    pub f_star: String,
    pub g_star: String,
}

impl OutcomeDocument {
    pub fn new(outcome: &DeformationOutcome, input: &DeformationInput) -> Self {
        OutcomeDocument {
            n: input.n,
            p: input.p.to_string(),
            p_prime: input.p_prime.to_string(),
            ell: input.ell,
            delta: to_ratio_string(&input.delta),
            a_star: outcome.a_star,
            b_star: outcome.b_star,
            m_star: outcome.m_star,
            termination: match outcome.termination {
                Termination::LowerEnd => "lower_end",
                Termination::UpperEnd => "upper_end",
            },
            counters: CounterDocument {
                upper_increments: outcome.counters.upper_increments,
                side_increments: outcome.counters.side_increments,
                widenings: outcome.counters.widenings,
            },
            iterations: outcome.trace.records.len(),
            initial_product: to_ratio_string(&outcome.initial_product),
            final_product: to_ratio_string(&outcome.final_product),
            f_star: outcome.f_star.to_fixture(),
            g_star: outcome.g_star.to_fixture(),
        }
    }
}

/// One CSV row per iteration, numbered from 1.
pub fn trace_csv(outcome: &DeformationOutcome) -> String {
    let mut out = String::from(TRACE_HEADER);
    out.push('\n');
    for (i, r) in outcome.trace.records.iter().enumerate() {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            i + 1,
            r.step,
            r.window.lo,
            r.window.hi,
            r.dim,
            r.product.numer(),
            r.product.denom()
        ));
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub iter: usize,
    pub step: Step,
    pub a: u32,
    pub b: u32,
    pub m: u32,
    pub product: Rational,
}

pub fn parse_trace_csv(text: &str) -> Result<Vec<TraceRow>> {
    let mut lines = text.lines();
    if lines.next() != Some(TRACE_HEADER) {
        return Err(Error::Parse("missing trace header".into()));
    }
    lines
        .filter(|l| !l.is_empty())
        .map(|line| {
            let cols: Vec<&str> = line.split(',').collect();
            let bad = || Error::Parse(format!("bad trace row `{line}`"));
            if cols.len() != 7 {
                return Err(bad());
            }
            let num = |i: usize| cols[i].parse::<u32>().map_err(|_| bad());
            Ok(TraceRow {
                iter: cols[0].parse().map_err(|_| bad())?,
                step: Step::from_label(cols[1]).ok_or_else(bad)?,
                a: num(2)?,
                b: num(3)?,
                m: num(4)?,
                product: Rational::new(
                    cols[5].parse().map_err(|_| bad())?,
                    cols[6].parse().map_err(|_| bad())?,
                ),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deformation::engine::run_deformation;
    use crate::family::Family;
    use crate::measure::Bias;
    use crate::rational::rat;

    #[test]
    fn worked_example_exports() {
        let half = Bias::from_ratio(1, 2).unwrap();
        let input = DeformationInput {
            n: 4,
            p: half.clone(),
            p_prime: half,
            ell: 1,
            delta: rat(1, 116),
            f: Family::new(4, [0b1111]).unwrap(),
            g: Family::new(4, [0]).unwrap(),
        };
        let out = run_deformation(&input).unwrap();
        let csv = trace_csv(&out);
        assert_eq!(
            csv,
            "iter,step,a,b,m,product_num,product_den\n\
             1,S5,1,1,3,1,64\n2,S5,1,1,2,1,16\n3,S5,1,1,1,1,4\n"
        );
        let rows = parse_trace_csv(&csv).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[2].product, rat(1, 4));

        let doc = serde_json::to_value(OutcomeDocument::new(&out, &input)).unwrap();
        assert_eq!(doc["counters"]["S_d2"], 3);
        assert_eq!(doc["delta"], "1/116");
        assert_eq!(doc["f_star"], "m=1\n1\n");
        assert_eq!(doc["g_star"], "m=1\n-\n");
    }

    #[test]
    fn rejects_malformed_rows() {
        assert!(parse_trace_csv("iter,step\n").is_err());
        assert!(parse_trace_csv(&format!("{TRACE_HEADER}\n1,S9,0,0,1,1,2\n")).is_err());
    }
}
