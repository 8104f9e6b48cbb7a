//! Exhaustive search for the largest measure product of a forbidding pair on
//! tiny cubes, the explicit near-extremal constructions, and the census file.

use std::collections::HashSet;
use std::fs::OpenOptions;
use std::io::{BufRead, BufReader, Write};
use std::ops::{Add, Mul};
use std::path::Path;

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds;
use crate::error::{Error, Result};
use crate::family::{Family, Window};
use crate::measure::{tail_measure, Bias, Tail};
use crate::rational::{self, int, Rational};

/// Largest cube the exhaustive search handles without the slow flag.
pub const ORACLE_MAX_N: u32 = 4;
/// Largest cube the exhaustive search handles at all.
pub const ORACLE_SLOW_MAX_N: u32 = 5;
/// Largest cube with a precomputed conflict table.
pub const CONFLICT_TABLE_MAX_M: u32 = 5;

/// `table[A]` has bit `B` set iff `|A ∩ B| = ell`.
pub fn conflict_neighbors(m: u32, ell: u32) -> Result<Vec<u32>> {
    if m > CONFLICT_TABLE_MAX_M {
        return Err(Error::DimensionOverflow { m, limit: CONFLICT_TABLE_MAX_M });
    }
    let size = 1u32 << m;
    Ok((0..size)
        .map(|a| {
            (0..size)
                .filter(|&b| (a & b).count_ones() == ell)
                .fold(0u32, |acc, b| acc | (1 << b))
        })
        .collect())
}

/// The largest `G` with no cross intersection of size `ell` against `F`.
pub fn best_partner(f: &Family, ell: u32) -> Family {
    let m = f.ground_size();
    let members = f.member_vec();
    Family::from_predicate(m, |b| members.iter().all(|&a| (a & b).count_ones() != ell))
        .expect("same dimension as F")
}

/// The largest `G` whose cross intersections with `F` avoid `window`.
pub fn best_partner_window(f: &Family, window: Window) -> Family {
    let m = f.ground_size();
    let members = f.member_vec();
    Family::from_predicate(m, |b| members.iter().all(|&a| !window.contains((a & b).count_ones())))
        .expect("same dimension as F")
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalRecord {
    pub n: u32,
    pub ell: u32,
    pub p: Bias,
    pub p_prime: Bias,
    pub product: Rational,
    /// `-ln(product)`.
    pub epsilon: f64,
    pub witness_f: Family,
    pub witness_g: Family,
}

/// Integer weights `a^k (b-a)^(n-k)` of every subset, over the common
/// denominator `b^n`.
fn subset_weights(n: u32, p: &Bias) -> Vec<BigUint> {
    let a = p.numer().to_biguint().expect("positive");
    let b = p.denom().to_biguint().expect("positive");
    let c = &b - &a;
    (0..1u32 << n)
        .map(|s| {
            let k = s.count_ones();
            num_traits::pow(a.clone(), k as usize) * num_traits::pow(c.clone(), (n - k) as usize)
        })
        .collect()
}

trait Weight: Clone + Ord + Zero + Add<Output = Self> + Mul<Output = Self> + Send + Sync {}
impl Weight for u128 {}
impl Weight for BigUint {}

struct Search<'a, W> {
    table: &'a [u32],
    wf: Vec<W>,
    /// `suffix[i] = wf[i] + ... + wf[last]`.
    suffix: Vec<W>,
    wg: Vec<W>,
    full: u32,
}

/// Best `(score, F mask)` seen in one subtree; ties keep the smaller mask.
type Best<W> = Option<(W, u64)>;

fn better<W: Ord>(candidate: &(W, u64), best: &Best<W>) -> bool {
    match best {
        None => true,
        Some((score, mask)) => candidate.0 > *score || (candidate.0 == *score && candidate.1 < *mask),
    }
}

impl<W: Weight> Search<'_, W> {
    fn g_weight(&self, blocked: u32) -> W {
        let mut free = self.full & !blocked;
        let mut sum = W::zero();
        while free != 0 {
            let b = free.trailing_zeros();
            sum = sum + self.wg[b as usize].clone();
            free &= free - 1;
        }
        sum
    }

    /// Depth-first over membership decisions for subsets `next..`, with
    /// `F = mask` so far, `blocked` the union of its conflict rows and
    /// `f_weight` its weight.
    fn dfs(&self, next: usize, mask: u64, blocked: u32, f_weight: W, best: &mut Best<W>) {
        if next == self.wf.len() {
            return;
        }
        let g_now = self.g_weight(blocked);
        if g_now.is_zero() {
            return;
        }
        if let Some((score, _)) = best {
            // G only shrinks as F grows
            if (f_weight.clone() + self.suffix[next].clone()) * g_now < *score {
                return;
            }
        }
        let blocked_in = blocked | self.table[next];
        if blocked_in != self.full {
            let f_in = f_weight.clone() + self.wf[next].clone();
            let mask_in = mask | (1u64 << next);
            let candidate = (f_in.clone() * self.g_weight(blocked_in), mask_in);
            if better(&candidate, best) {
                *best = Some(candidate);
            }
            self.dfs(next + 1, mask_in, blocked_in, f_in, best);
        }
        self.dfs(next + 1, mask, blocked, f_weight, best);
    }

    fn run(&self) -> Best<W> {
        let size = self.wf.len();
        let prefix_len = size.min(10);
        let results: Vec<Best<W>> = (0..1u64 << prefix_len)
            .into_par_iter()
            .map(|prefix| {
                let mut blocked = 0u32;
                let mut weight = W::zero();
                for i in 0..prefix_len {
                    if prefix >> i & 1 == 1 {
                        blocked |= self.table[i];
                        weight = weight + self.wf[i].clone();
                    }
                }
                let mut best: Best<W> = None;
                if blocked == self.full {
                    return best;
                }
                if prefix != 0 {
                    best = Some((weight.clone() * self.g_weight(blocked), prefix));
                }
                self.dfs(prefix_len, prefix, blocked, weight, &mut best);
                best
            })
            .collect();
        results.into_iter().fold(None, |acc, r| match r {
            Some(c) if better(&c, &acc) => Some(c),
            _ => acc,
        })
    }
}

fn search_with<W: Weight>(table: &[u32], wf: Vec<W>, wg: Vec<W>) -> Best<W> {
    let mut suffix = wf.clone();
    for i in (0..suffix.len().saturating_sub(1)).rev() {
        suffix[i] = suffix[i].clone() + suffix[i + 1].clone();
    }
    let full = if table.len() == 32 { u32::MAX } else { (1u32 << table.len()) - 1 };
    Search { table, wf, suffix, wg, full }.run()
}

/// Exact maximum of `mu_p(F) mu_p'(G)` over nonempty pairs over `[n]` with no
/// cross intersection of size `ell`. Ties go to the `F` with the smallest
/// membership mask (bit `A` set iff `A ∈ F`). `n = 5` needs `allow_slow`.
pub fn epsilon_oracle(n: u32, p: &Bias, p_prime: &Bias, ell: u32, allow_slow: bool) -> Result<ExtremalRecord> {
    let limit = if allow_slow { ORACLE_SLOW_MAX_N } else { ORACLE_MAX_N };
    if n > limit {
        return Err(Error::DimensionOverflow { m: n, limit });
    }
    if n == 0 || ell > n {
        return Err(Error::Precondition(format!("need 1 <= n and ell <= n, got n = {n}, ell = {ell}")));
    }
    let table = conflict_neighbors(n, ell)?;
    let wf = subset_weights(n, p);
    let wg = subset_weights(n, p_prime);
    let fits = (p.denom() * p_prime.denom()).pow(n).bits() < 120;
    let best = if fits {
        let small = |v: &[BigUint]| v.iter().map(|w| w.to_u128().expect("fits")).collect::<Vec<_>>();
        search_with(&table, small(&wf), small(&wg)).map(|(w, m)| (BigUint::from(w), m))
    } else {
        search_with(&table, wf, wg)
    };
    let (score, mask) = best.ok_or_else(|| Error::Precondition("no nonempty forbidding pair".into()))?;
    let denom = (p.denom() * p_prime.denom()).pow(n);
    let product = Rational::new(BigInt::from(score), denom);
    let witness_f = Family::new(n, (0..1u32 << n).filter(|&s| mask >> s & 1 == 1))?;
    let witness_g = best_partner(&witness_f, ell);
    Ok(ExtremalRecord {
        n,
        ell,
        p: p.clone(),
        p_prime: p_prime.clone(),
        epsilon: -rational::ln(&product),
        product,
        witness_f,
        witness_g,
    })
}

/// `F = [n]^{< ell}`, `G` the full cube.
pub fn construction_high_ell(n: u32, ell: u32) -> Result<(Family, Family)> {
    if ell == 0 || ell > n {
        return Err(Error::Precondition(format!("need 1 <= ell <= n, got ell = {ell}, n = {n}")));
    }
    let f = Family::from_predicate(n, |s| s.count_ones() < ell)?;
    Ok((f, Family::full(n)?))
}

/// `F = [n]^{> pn + ell/2}`, `G = [n]^{>= (1-p)n + ell/2}`, meant for the
/// measures `mu_p` and `mu_{1-p}`.
pub fn construction_symmetric(n: u32, p: &Bias, ell: u32) -> Result<(Family, Family)> {
    let pn = p.scaled(n);
    let ell_r = int(ell as i64);
    if &ell_r * int(2) > pn {
        return Err(Error::Precondition(format!("need ell <= pn/2, got ell = {ell}, pn = {pn}")));
    }
    let half_ell = ell_r / int(2);
    let f_floor = rational::floor_to_i64(&(&pn + &half_ell)) + 1;
    let g_floor = rational::ceil_to_i64(&(p.complement().scaled(n) + &half_ell));
    let f = Family::from_predicate(n, |s| s.count_ones() as i64 >= f_floor)?;
    let g = Family::from_predicate(n, |s| s.count_ones() as i64 >= g_floor)?;
    if f.is_empty() || g.is_empty() {
        return Err(Error::Precondition(format!(
            "construction is empty at n = {n}, p = {p}, ell = {ell}"
        )));
    }
    Ok((f, g))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainCheck {
    /// Exact `mu_p([n]^{< ell})`.
    pub measure: Rational,
    pub first: f64,
    pub second: f64,
}

impl ChainCheck {
    pub fn holds(&self) -> bool {
        let m = rational::to_f64(&self.measure);
        m >= self.first && self.first >= self.second
    }
}

/// Lower-bound chain for the high-intersection construction; `None` outside
/// the regime where it is claimed.
pub fn high_ell_chain(n: u32, p: &Bias, ell: u32) -> Result<Option<ChainCheck>> {
    if !bounds::optimality_regime(n, p, ell) {
        return Ok(None);
    }
    let (first, second) = bounds::below_threshold_lower_bounds(n, p, ell)?;
    let measure = tail_measure(n, p, Tail::AtMost(ell as i64 - 1));
    Ok(Some(ChainCheck { measure, first, second }))
}

/// One census line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusRow {
    pub n: u32,
    pub p: String,
    pub p_prime: String,
    pub ell: u32,
    pub product: String,
    pub epsilon: f64,
    pub witness_f: String,
    pub witness_g: String,
}

impl CensusRow {
    pub fn key(&self) -> (u32, String, String, u32) {
        (self.n, self.p.clone(), self.p_prime.clone(), self.ell)
    }
}

impl From<&ExtremalRecord> for CensusRow {
    fn from(r: &ExtremalRecord) -> Self {
        CensusRow {
            n: r.n,
            p: r.p.to_string(),
            p_prime: r.p_prime.to_string(),
            ell: r.ell,
            product: rational::to_ratio_string(&r.product),
            epsilon: r.epsilon,
            witness_f: r.witness_f.to_fixture(),
            witness_g: r.witness_g.to_fixture(),
        }
    }
}

pub fn read_census(path: &Path) -> Result<Vec<CensusRow>> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let file = std::fs::File::open(path)?;
    BufReader::new(file)
        .lines()
        .filter(|l| l.as_ref().map_or(true, |l| !l.trim().is_empty()))
        .map(|line| {
            let line = line?;
            serde_json::from_str(&line).map_err(|e| Error::Parse(format!("census line: {e}")))
        })
        .collect()
}

/// Appends rows whose key is not yet present; returns how many were written.
pub fn append_census(path: &Path, rows: &[CensusRow]) -> Result<usize> {
    let mut seen: HashSet<_> = read_census(path)?.iter().map(CensusRow::key).collect();
    let mut file = OpenOptions::new().create(true).append(true).open(path)?;
    let mut added = 0;
    for row in rows {
        if seen.insert(row.key()) {
            let line = serde_json::to_string(row).map_err(|e| Error::Parse(e.to_string()))?;
            writeln!(file, "{line}")?;
            added += 1;
        }
    }
    Ok(added)
}
