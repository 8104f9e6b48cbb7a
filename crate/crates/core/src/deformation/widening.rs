//! The widening step: the numeric inequality behind it and its family form.

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bounds::{self, widening_factor};
use crate::error::{Error, Result};
use crate::family::Family;
use crate::measure::{mu, Bias};
use crate::rational::{int, rat, Rational};

/// Eight ratios `x, x', y, y', z, z', w, w'` together with `p, p', delta`.
///
/// `x, x', w, w'` describe the `F` side under `mu_p`; `z, z', y, y'` the `G`
/// side under `mu_p'`.
#[derive(Debug, Clone, PartialEq)]
pub struct WideningTuple {
    pub x: Rational,
    pub x_p: Rational,
    pub y: Rational,
    pub y_p: Rational,
    pub z: Rational,
    pub z_p: Rational,
    pub w: Rational,
    pub w_p: Rational,
    pub p: Bias,
    pub p_prime: Bias,
    pub delta: Rational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WideningConclusions {
    /// `(1+x)(1+y') > 1 - delta - 2 r delta^2`.
    pub via_common_g: bool,
    /// `(1+z)(1+w') > 1 - delta - 2 r delta^2`.
    pub via_common_f: bool,
}

impl WideningConclusions {
    pub fn either(&self) -> bool {
        self.via_common_g || self.via_common_f
    }
}

/// `(1 - 2p) / (1 - p)`.
fn drift(p: &Bias) -> Rational {
    let one = Rational::one();
    (&one - int(2) * p.value()) / (one - p.value())
}

fn one_plus(a: &Rational) -> Rational {
    Rational::one() + a
}

impl WideningTuple {
    /// Completes the tuple from its free coordinates using
    /// `x' = -r x`, `w' = drift(p) x - w` and the analogues for `p'`.
    pub fn from_free(
        p: Bias,
        p_prime: Bias,
        delta: Rational,
        x: Rational,
        y: Rational,
        z: Rational,
        w: Rational,
    ) -> Self {
        let x_p = -bounds::odds(&p) * &x;
        let w_p = drift(&p) * &x - &w;
        let z_p = -bounds::odds(&p_prime) * &z;
        let y_p = drift(&p_prime) * &z - &y;
        WideningTuple { x, x_p, y, y_p, z, z_p, w, w_p, p, p_prime, delta }
    }

    /// Sign, range and order constraints plus the defining identities.
    pub fn check_constraints(&self) -> std::result::Result<(), String> {
        let one = Rational::one();
        let coords = [
            ("x", &self.x),
            ("x'", &self.x_p),
            ("y", &self.y),
            ("y'", &self.y_p),
            ("z", &self.z),
            ("z'", &self.z_p),
            ("w", &self.w),
            ("w'", &self.w_p),
        ];
        for (name, v) in coords {
            if v.abs() > one {
                return Err(format!("{name} = {v} outside [-1, 1]"));
            }
        }
        if self.y.is_negative() || self.w.is_negative() {
            return Err("y and w must be nonnegative".into());
        }
        if self.y_p.is_positive() || self.w_p.is_positive() {
            return Err("y' and w' must be nonpositive".into());
        }
        if self.x > self.w || self.x_p > self.w {
            return Err("max{x, x'} exceeds w".into());
        }
        if self.z > self.y || self.z_p > self.y {
            return Err("max{z, z'} exceeds y".into());
        }
        if !(self.p.value() <= self.p_prime.value() && *self.p_prime.value() <= rat(1, 2)) {
            return Err("need 0 < p <= p' <= 1/2".into());
        }
        if !bounds::is_open_unit_tenth(&self.delta) {
            return Err("need 0 < delta < 1/10".into());
        }
        let identities = self.x_p == -bounds::odds(&self.p) * &self.x
            && &self.w + &self.w_p == &self.x + &self.x_p
            && &self.x + &self.x_p == drift(&self.p) * &self.x
            && self.z_p == -bounds::odds(&self.p_prime) * &self.z
            && &self.y + &self.y_p == &self.z + &self.z_p
            && &self.z + &self.z_p == drift(&self.p_prime) * &self.z;
        if !identities {
            return Err("defining identities fail".into());
        }
        Ok(())
    }

    /// The three "no increment" inequalities.
    pub fn hypotheses_hold(&self) -> bool {
        let side = bounds::side_increment_factor(&self.p, &self.delta);
        one_plus(&self.x) * one_plus(&self.z) <= one_plus(&self.delta)
            && one_plus(&self.x_p) * one_plus(&self.y) <= side
            && one_plus(&self.z_p) * one_plus(&self.w) <= side
    }

    pub fn conclusions(&self) -> WideningConclusions {
        let floor = widening_factor(&self.p, &self.delta);
        WideningConclusions {
            via_common_g: one_plus(&self.x) * one_plus(&self.y_p) > floor,
            via_common_f: one_plus(&self.z) * one_plus(&self.w_p) > floor,
        }
    }
}

/// Evaluates both conclusions; rejects tuples outside the admissible region.
pub fn widening_numeric_check(t: &WideningTuple) -> Result<WideningConclusions> {
    t.check_constraints().map_err(Error::Precondition)?;
    if !t.hypotheses_hold() {
        return Err(Error::Precondition("no-increment inequalities fail".into()));
    }
    Ok(t.conclusions())
}

/// Cell of the sampling grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WideningCell {
    pub p: Bias,
    pub p_prime: Bias,
    pub delta: Rational,
}

/// `p <= p'` from `{1/10, 1/4, 1/3, 1/2}` against four values of `delta`.
pub fn default_widening_grid() -> Vec<WideningCell> {
    let biases = [(1, 10), (1, 4), (1, 3), (1, 2)];
    let deltas = [rat(1, 1000), rat(1, 100), rat(1, 20), rat(9, 100)];
    let mut cells = Vec::new();
    for (i, &(a, b)) in biases.iter().enumerate() {
        for &(c, d) in &biases[i..] {
            for delta in &deltas {
                cells.push(WideningCell {
                    p: Bias::from_ratio(a, b).expect("grid bias"),
                    p_prime: Bias::from_ratio(c, d).expect("grid bias"),
                    delta: delta.clone(),
                });
            }
        }
    }
    cells
}

#[derive(Debug, Clone, Default)]
pub struct SamplingSummary {
    pub cells: usize,
    pub attempts: u64,
    pub accepted: u64,
    pub counterexamples: Vec<WideningTuple>,
}

/// Resolution of the random rationals drawn inside each box.
const GRAIN: i64 = 1 << 20;

/// Uniform rational on the grid `lo + (hi - lo) k / GRAIN`.
fn draw_between(rng: &mut ChaCha8Rng, lo: &Rational, hi: &Rational) -> Rational {
    let k = rng.random_range(0..=GRAIN);
    lo + (hi - lo) * rat(k, GRAIN)
}

fn max_of(values: [Rational; 4]) -> Rational {
    values.into_iter().max().expect("nonempty")
}

/// Draws `x` uniformly in `[-2 delta, 2 delta]`, then `z`, `y` and `w` in
/// turn, each uniformly over the interval left open by the sign and order
/// constraints and the two side inequalities given the coordinates drawn so
/// far. Every admissible tuple has positive density. `None` when an interval
/// is empty.
fn sample_candidate(rng: &mut ChaCha8Rng, cell: &WideningCell) -> Option<WideningTuple> {
    let d = &cell.delta;
    let zero = Rational::zero();
    let side = bounds::side_increment_factor(&cell.p, d);
    let r_g = bounds::odds(&cell.p_prime);

    let x = draw_between(rng, &(-int(2) * d), &(int(2) * d));
    let x_p = -bounds::odds(&cell.p) * &x;
    // (1 + x')(1 + y) <= side with y >= max{0, z, z'}
    let y_hi = &side / one_plus(&x_p) - Rational::one();
    if y_hi < zero {
        return None;
    }
    let z = draw_between(rng, &(-&y_hi / &r_g), &y_hi);
    let z_p = -&r_g * &z;

    let y_lo = max_of([zero.clone(), z.clone(), z_p.clone(), drift(&cell.p_prime) * &z]);
    let w_lo = max_of([zero, x.clone(), x_p, drift(&cell.p) * &x]);
    let w_hi = &side / one_plus(&z_p) - Rational::one();
    if y_lo > y_hi || w_lo > w_hi {
        return None;
    }
    let y = draw_between(rng, &y_lo, &y_hi);
    let w = draw_between(rng, &w_lo, &w_hi);
    Some(WideningTuple::from_free(cell.p.clone(), cell.p_prime.clone(), d.clone(), x, y, z, w))
}

/// Draws until `accepted_per_cell` admissible tuples were checked in every
/// cell, or `accepted_per_cell * 200` attempts were spent there.
pub fn sample_widening(cells: &[WideningCell], accepted_per_cell: u64, seed: u64) -> SamplingSummary {
    const CHUNK: u64 = 500;
    let jobs: Vec<(usize, u64)> = (0..cells.len())
        .flat_map(|c| (0..accepted_per_cell.div_ceil(CHUNK)).map(move |j| (c, j)))
        .collect();
    let results: Vec<SamplingSummary> = jobs
        .par_iter()
        .map(|&(c, j)| {
            let target = CHUNK.min(accepted_per_cell - j * CHUNK);
            let job_seed = seed
                .wrapping_mul(0x9E37_79B9_7F4A_7C15)
                .wrapping_add(((c as u64) << 32) | j);
            let mut rng = ChaCha8Rng::seed_from_u64(job_seed);
            let mut out = SamplingSummary::default();
            while out.accepted < target && out.attempts < target * 200 {
                out.attempts += 1;
                let Some(t) = sample_candidate(&mut rng, &cells[c]) else {
                    continue;
                };
                if let Ok(conclusions) = widening_numeric_check(&t) {
                    out.accepted += 1;
                    if !conclusions.either() {
                        out.counterexamples.push(t);
                    }
                }
            }
            out
        })
        .collect();
    let mut total = SamplingSummary { cells: cells.len(), ..Default::default() };
    for r in results {
        total.attempts += r.attempts;
        total.accepted += r.accepted;
        total.counterexamples.extend(r.counterexamples);
    }
    total
}

/// Section-measure ratios of a pair, as in the numeric form.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyWidening {
    pub tuple: WideningTuple,
    pub hypotheses_hold: bool,
    /// `Some(holds)` when the hypotheses hold, `None` otherwise.
    pub conclusion: Option<bool>,
    /// `max{mu(F1) mu'(G0 ∩ G1), mu(F0 ∩ F1) mu'(G1)}`.
    pub best_widening_product: Rational,
    pub product: Rational,
}

/// Computes all section ratios for `(F, G)` and, when no increment step
/// applies, checks that one of the two widening moves loses at most the
/// factor `1 - delta - 2 r delta^2`.
pub fn widening_family_check(
    f: &Family,
    g: &Family,
    p: &Bias,
    p_prime: &Bias,
    delta: &Rational,
) -> Result<FamilyWidening> {
    if f.is_empty() || g.is_empty() {
        return Err(Error::Precondition("families must be nonempty".into()));
    }
    if !bounds::is_open_unit_tenth(delta) {
        return Err(Error::Precondition(format!("need 0 < delta < 1/10, got {delta}")));
    }
    if !(p.value() <= p_prime.value() && *p_prime.value() <= rat(1, 2)) {
        return Err(Error::Precondition("need 0 < p <= p' <= 1/2".into()));
    }
    let (f0, f1) = f.sections()?;
    let (g0, g1) = g.sections()?;
    let mf = mu(f, p);
    let mg = mu(g, p_prime);
    let ratio_f = |a: &Family| mu(a, p) / &mf - Rational::one();
    let ratio_g = |a: &Family| mu(a, p_prime) / &mg - Rational::one();
    let tuple = WideningTuple {
        x: ratio_f(&f1),
        x_p: ratio_f(&f0),
        w: ratio_f(&f0.union(&f1)?),
        w_p: ratio_f(&f0.intersection(&f1)?),
        z: ratio_g(&g1),
        z_p: ratio_g(&g0),
        y: ratio_g(&g0.union(&g1)?),
        y_p: ratio_g(&g0.intersection(&g1)?),
        p: p.clone(),
        p_prime: p_prime.clone(),
        delta: delta.clone(),
    };
    let hypotheses_hold = tuple.hypotheses_hold();
    let product = &mf * &mg;
    let a = mu(&f1, p) * mu(&g0.intersection(&g1)?, p_prime);
    let b = mu(&f0.intersection(&f1)?, p) * mu(&g1, p_prime);
    let best_widening_product = if a >= b { a } else { b };
    let conclusion = hypotheses_hold
        .then(|| best_widening_product > widening_factor(p, delta) * &product);
    Ok(FamilyWidening { tuple, hypotheses_hold, conclusion, best_widening_product, product })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bias(a: i64, b: i64) -> Bias {
        Bias::from_ratio(a, b).unwrap()
    }

    fn is_zero_tuple(t: &WideningTuple) -> bool {
        [&t.x, &t.x_p, &t.y, &t.y_p, &t.z, &t.z_p, &t.w, &t.w_p].iter().all(|v| v.is_zero())
    }

    #[test]
    fn zero_tuple_satisfies_both() {
        let zero = Rational::zero();
        let t = WideningTuple::from_free(
            bias(1, 2),
            bias(1, 2),
            rat(1, 20),
            zero.clone(),
            zero.clone(),
            zero.clone(),
            zero,
        );
        assert!(is_zero_tuple(&t));
        let c = widening_numeric_check(&t).unwrap();
        assert!(c.via_common_g && c.via_common_f);
    }

    #[test]
    fn boundary_case() {
        // x = -delta, z = 0: w = r delta, w' = -delta, y = y' = 0
        let (p, d) = (bias(1, 4), rat(1, 20));
        let r = bounds::odds(&p);
        let t = WideningTuple::from_free(
            p.clone(),
            p,
            d.clone(),
            -d.clone(),
            Rational::zero(),
            Rational::zero(),
            &r * &d,
        );
        assert_eq!(t.w_p, -d.clone());
        assert_eq!(t.y_p, Rational::zero());
        let c = widening_numeric_check(&t).unwrap();
        assert!(c.via_common_g && c.via_common_f);
        // both sides equal 1 - delta
        assert_eq!(one_plus(&t.x) * one_plus(&t.y_p), Rational::one() - &d);
    }

    #[test]
    fn rejects_negative_y() {
        let mut t = WideningTuple::from_free(
            bias(1, 2),
            bias(1, 2),
            rat(1, 20),
            Rational::zero(),
            Rational::zero(),
            Rational::zero(),
            Rational::zero(),
        );
        t.y = rat(-1, 100);
        t.y_p = rat(1, 100);
        assert!(widening_numeric_check(&t).is_err());
    }

    #[test]
    fn full_cube_pair() {
        let full = Family::full(2).unwrap();
        let half = bias(1, 2);
        let r = widening_family_check(&full, &full, &half, &half, &rat(1, 20)).unwrap();
        assert!(r.hypotheses_hold);
        assert_eq!(r.conclusion, Some(true));
        assert_eq!(r.best_widening_product, r.product);
        assert_eq!(widening_factor(&half, &rat(1, 20)), rat(189, 200));
    }

    #[test]
    fn single_top_set_against_full() {
        let f = Family::new(2, [0b11]).unwrap();
        let g = Family::full(2).unwrap();
        let half = bias(1, 2);
        let r = widening_family_check(&f, &g, &half, &half, &rat(1, 20)).unwrap();
        // F1 = {{1}} has mu 1/2 against mu(F) = 1/4
        assert_eq!(r.tuple.x, int(1));
        assert_eq!(r.tuple.x_p, int(-1));
        assert!(!r.hypotheses_hold);
        assert_eq!(r.conclusion, None);
    }

    #[test]
    fn small_sampling_run_is_deterministic() {
        let cells = &default_widening_grid()[..3];
        let a = sample_widening(cells, 200, 7);
        let b = sample_widening(cells, 200, 7);
        assert_eq!(a.accepted, 600);
        assert_eq!(a.attempts, b.attempts);
        assert!(a.counterexamples.is_empty());
    }

    #[test]
    fn grid_shape() {
        assert_eq!(default_widening_grid().len(), 40);
        assert!(crate::rational::to_f64(&default_widening_grid()[0].delta) < 0.1);
    }
}
