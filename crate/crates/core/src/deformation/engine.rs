use std::fmt;

use num_traits::{One, Zero};

use crate::bounds::{self, widening_factor};
use crate::error::{Error, Result};
use crate::family::{forbids, Family, Window};
use crate::measure::{mu, Bias};
use crate::rational::{int, rat, Rational};

/// Runs over at most this many coordinates keep every intermediate family in
/// the trace; larger runs keep counters and products only.
pub const FAMILY_TRACE_LIMIT: u32 = 16;

/// The five ways one iteration can shrink the dimension. `Fi`/`Gi` are the
/// sections along the top coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Step {
    /// `(F1, G1)`, window shifts down by one.
    BothUpper,
    /// `(F0, G0 ∪ G1)`, window unchanged.
    LowerWithMergedG,
    /// `(F0 ∪ F1, G0)`, window unchanged.
    MergedFWithLower,
    /// `(F1, G0 ∩ G1)`, lower end drops by one.
    UpperWithCommonG,
    /// `(F0 ∩ F1, G1)`, lower end drops by one. Taken unconditionally.
    CommonFWithUpper,
}

/// Which counter a step advances.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    UpperIncrement,
    SideIncrement,
    Widening,
}

impl Step {
    pub const ORDER: [Step; 5] = [
        Step::BothUpper,
        Step::LowerWithMergedG,
        Step::MergedFWithLower,
        Step::UpperWithCommonG,
        Step::CommonFWithUpper,
    ];

    /// Wire label used in exported traces.
    pub fn label(self) -> &'static str {
        match self {
            Step::BothUpper => "S3",
            Step::LowerWithMergedG => "S4",
            Step::MergedFWithLower => "S5",
            Step::UpperWithCommonG => "S6",
            Step::CommonFWithUpper => "S7",
        }
    }

    pub fn from_label(label: &str) -> Option<Step> {
        Step::ORDER.into_iter().find(|s| s.label() == label)
    }

    pub fn kind(self) -> StepKind {
        match self {
            Step::BothUpper => StepKind::UpperIncrement,
            Step::LowerWithMergedG | Step::MergedFWithLower => StepKind::SideIncrement,
            Step::UpperWithCommonG | Step::CommonFWithUpper => StepKind::Widening,
        }
    }

    /// Window after the step, given the window before it.
    pub fn next_window(self, w: Window) -> Window {
        match self.kind() {
            StepKind::UpperIncrement => Window { lo: w.lo - 1, hi: w.hi - 1 },
            StepKind::SideIncrement => w,
            StepKind::Widening => Window { lo: w.lo - 1, hi: w.hi },
        }
    }

    /// New pair built from the sections of the current pair.
    pub fn apply(self, f: (&Family, &Family), g: (&Family, &Family)) -> Result<(Family, Family)> {
        let ((f0, f1), (g0, g1)) = (f, g);
        Ok(match self {
            Step::BothUpper => (f1.clone(), g1.clone()),
            Step::LowerWithMergedG => (f0.clone(), g0.union(g1)?),
            Step::MergedFWithLower => (f0.union(f1)?, g0.clone()),
            Step::UpperWithCommonG => (f1.clone(), g0.intersection(g1)?),
            Step::CommonFWithUpper => (f0.intersection(f1)?, g1.clone()),
        })
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl StepKind {
    /// Factor by which the measure product is guaranteed to exceed the
    /// previous one.
    pub fn factor(self, p: &Bias, delta: &Rational) -> Rational {
        match self {
            StepKind::UpperIncrement => Rational::one() + delta,
            StepKind::SideIncrement => bounds::side_increment_factor(p, delta),
            StepKind::Widening => widening_factor(p, delta),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counters {
    pub upper_increments: u32,
    pub side_increments: u32,
    pub widenings: u32,
}

impl Counters {
    pub fn total(&self) -> u32 {
        self.upper_increments + self.side_increments + self.widenings
    }

    fn bump(&mut self, kind: StepKind) {
        match kind {
            StepKind::UpperIncrement => self.upper_increments += 1,
            StepKind::SideIncrement => self.side_increments += 1,
            StepKind::Widening => self.widenings += 1,
        }
    }

    /// `(1+delta)^d1 (1+r delta)^d2 (1-delta-2r delta^2)^w`.
    pub fn guaranteed_growth(&self, p: &Bias, delta: &Rational) -> Rational {
        let part = |kind: StepKind, count: u32| {
            crate::rational::pow(&kind.factor(p, delta), count)
        };
        part(StepKind::UpperIncrement, self.upper_increments)
            * part(StepKind::SideIncrement, self.side_increments)
            * part(StepKind::Widening, self.widenings)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub step: Step,
    /// Window after the step.
    pub window: Window,
    /// Dimension after the step.
    pub dim: u32,
    /// `mu_p(F) mu_p'(G)` after the step.
    pub product: Rational,
    pub families: Option<(Family, Family)>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DeformationTrace {
    pub records: Vec<StepRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// Stopped with `a = 0`; the pair forbids `[0, b]`.
    LowerEnd,
    /// Stopped with `b = m`; the pair forbids `[a, m]`.
    UpperEnd,
}

#[derive(Debug, Clone)]
pub struct DeformationInput {
    pub n: u32,
    pub p: Bias,
    pub p_prime: Bias,
    pub ell: u32,
    pub delta: Rational,
    pub f: Family,
    pub g: Family,
}

impl DeformationInput {
    /// Uses the default `delta` for `(n, p, ell)`.
    pub fn with_default_delta(p: Bias, p_prime: Bias, ell: u32, f: Family, g: Family) -> Result<Self> {
        let n = f.ground_size();
        let mut input = DeformationInput { n, p, p_prime, ell, delta: rat(1, 20), f, g };
        input.validate()?;
        input.delta = bounds::delta_choice(n, &input.p, ell)?;
        Ok(input)
    }

    pub fn validate(&self) -> Result<()> {
        let pre = |msg: String| Err(Error::Precondition(msg));
        if self.n < 2 {
            return pre(format!("need n >= 2, got {}", self.n));
        }
        for (name, fam) in [("F", &self.f), ("G", &self.g)] {
            if fam.ground_size() != self.n {
                return Err(Error::DimensionMismatch { left: self.n, right: fam.ground_size() });
            }
            if fam.is_empty() {
                return pre(format!("{name} is empty"));
            }
        }
        let half = rat(1, 2);
        if !(self.p.value() <= self.p_prime.value() && *self.p_prime.value() <= half) {
            return pre(format!("need p <= p' <= 1/2, got p = {}, p' = {}", self.p, self.p_prime));
        }
        let pn = self.p.scaled(self.n);
        if self.ell == 0 || int(self.ell as i64) >= pn {
            return pre(format!(
                "need 1 <= ell < pn, got ell = {}, pn = {pn}; the cases ell = 0 and ell = pn \
                 are trivial and handled without running the procedure",
                self.ell
            ));
        }
        if !bounds::is_open_unit_tenth(&self.delta) {
            return pre(format!("need 0 < delta < 1/10, got {}", self.delta));
        }
        if !forbids(&self.f, &self.g, Window::single(self.ell))? {
            return pre(format!("the pair has a cross intersection of size {}", self.ell));
        }
        Ok(())
    }

    pub fn initial_product(&self) -> Rational {
        mu(&self.f, &self.p) * mu(&self.g, &self.p_prime)
    }
}

#[derive(Debug, Clone)]
pub struct DeformationOutcome {
    pub a_star: u32,
    pub b_star: u32,
    pub m_star: u32,
    pub f_star: Family,
    pub g_star: Family,
    pub counters: Counters,
    pub termination: Termination,
    pub initial_product: Rational,
    pub final_product: Rational,
    pub trace: DeformationTrace,
}

impl DeformationOutcome {
    pub fn final_window(&self) -> Window {
        match self.termination {
            Termination::LowerEnd => Window { lo: 0, hi: self.b_star },
            Termination::UpperEnd => Window { lo: self.a_star, hi: self.m_star },
        }
    }
}

/// Measures of the four sections of the current pair plus the lazily built
/// unions and intersections.
struct SectionView<'a> {
    f: (Family, Family),
    g: (Family, Family),
    p: &'a Bias,
    p_prime: &'a Bias,
}

impl SectionView<'_> {
    fn candidate(&self, step: Step) -> Result<(Family, Family, Rational)> {
        let (f, g) = step.apply((&self.f.0, &self.f.1), (&self.g.0, &self.g.1))?;
        let product = mu(&f, self.p) * mu(&g, self.p_prime);
        Ok((f, g, product))
    }
}

/// Runs the dimension-reducing procedure to termination.
pub fn run_deformation(input: &DeformationInput) -> Result<DeformationOutcome> {
    input.validate()?;
    let keep_families = input.n <= FAMILY_TRACE_LIMIT;
    let initial_product = input.initial_product();

    let mut window = Window::single(input.ell);
    let mut m = input.n;
    let mut f = input.f.clone();
    let mut g = input.g.clone();
    let mut product = initial_product.clone();
    let mut counters = Counters::default();
    let mut trace = DeformationTrace::default();

    let termination = loop {
        if window.lo == 0 {
            break Termination::LowerEnd;
        }
        if window.hi == m {
            break Termination::UpperEnd;
        }
        let iteration = trace.records.len() + 1;
        let view = SectionView {
            f: f.sections()?,
            g: g.sections()?,
            p: &input.p,
            p_prime: &input.p_prime,
        };
        let mut chosen = None;
        for step in Step::ORDER {
            let (nf, ng, next) = view.candidate(step)?;
            let threshold = step.kind().factor(&input.p, &input.delta) * &product;
            if step == Step::CommonFWithUpper || next > threshold {
                chosen = Some((step, nf, ng, next));
                break;
            }
        }
        let (step, nf, ng, next) = chosen.expect("the last step is unconditional");
        if nf.is_empty() || ng.is_empty() || next.is_zero() {
            return Err(Error::Invariant {
                iteration,
                detail: format!("{step} produced an empty family"),
            });
        }
        counters.bump(step.kind());
        window = step.next_window(window);
        m -= 1;
        f = nf;
        g = ng;
        product = next;
        trace.records.push(StepRecord {
            step,
            window,
            dim: m,
            product: product.clone(),
            families: keep_families.then(|| (f.clone(), g.clone())),
        });
    };

    Ok(DeformationOutcome {
        a_star: window.lo,
        b_star: window.hi,
        m_star: m,
        f_star: f,
        g_star: g,
        counters,
        termination,
        initial_product,
        final_product: product,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half() -> Bias {
        Bias::from_ratio(1, 2).unwrap()
    }

    fn worked_example() -> DeformationInput {
        DeformationInput {
            n: 4,
            p: half(),
            p_prime: half(),
            ell: 1,
            delta: rat(1, 116),
            f: Family::new(4, [0b1111]).unwrap(),
            g: Family::new(4, [0]).unwrap(),
        }
    }

    #[test]
    fn worked_example_runs_three_merges() {
        let out = run_deformation(&worked_example()).unwrap();
        assert_eq!((out.a_star, out.b_star, out.m_star), (1, 1, 1));
        assert_eq!(out.counters, Counters { upper_increments: 0, side_increments: 3, widenings: 0 });
        assert_eq!(out.termination, Termination::UpperEnd);
        assert_eq!(out.f_star, Family::new(1, [1]).unwrap());
        assert_eq!(out.g_star, Family::new(1, [0]).unwrap());
        let steps: Vec<_> = out.trace.records.iter().map(|r| r.step).collect();
        assert_eq!(steps, vec![Step::MergedFWithLower; 3]);
        // each merge multiplies the product by 4
        let products: Vec<_> = out.trace.records.iter().map(|r| r.product.clone()).collect();
        assert_eq!(products, vec![rat(1, 64), rat(1, 16), rat(1, 4)]);
        assert_eq!(out.initial_product, rat(1, 256));
    }

    #[test]
    fn default_delta() {
        let w = worked_example();
        let input = DeformationInput::with_default_delta(w.p, w.p_prime, 1, w.f, w.g).unwrap();
        assert_eq!(input.delta, rat(1, 116));
    }

    #[test]
    fn rejects_bad_inputs() {
        let mut w = worked_example();
        w.ell = 2;
        assert!(matches!(run_deformation(&w), Err(Error::Precondition(_))));
        let mut w = worked_example();
        w.delta = rat(1, 10);
        assert!(run_deformation(&w).is_err());
        let mut w = worked_example();
        w.g = Family::new(4, [0b0001]).unwrap();
        assert!(run_deformation(&w).is_err());
        let mut w = worked_example();
        w.g = Family::empty(4).unwrap();
        assert!(run_deformation(&w).is_err());
        let mut w = worked_example();
        w.p_prime = Bias::from_ratio(1, 3).unwrap();
        assert!(run_deformation(&w).is_err());
    }

    #[test]
    fn labels_round_trip() {
        for s in Step::ORDER {
            assert_eq!(Step::from_label(s.label()), Some(s));
        }
        assert_eq!(Step::from_label("S8"), None);
    }
}
