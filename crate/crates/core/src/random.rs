//! Random families and forbidding pairs for property runs.

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::extremal::{best_partner, best_partner_window};
use crate::family::{Family, Subset, Window};

/// Each subset independently with probability `density`.
pub fn random_family<R: Rng>(m: u32, density: f64, rng: &mut R) -> Family {
    let members: Vec<Subset> = (0..1u32 << m).filter(|_| rng.random_bool(density)).collect();
    Family::new(m, members).expect("valid dimension")
}

/// `count` uniform draws (with repetition) from the cube.
pub fn random_sparse_family<R: Rng>(m: u32, count: usize, rng: &mut R) -> Family {
    let members: Vec<Subset> = (0..count).map(|_| random_subset(m, rng)).collect();
    Family::new(m, members).expect("valid dimension")
}

pub fn random_subset<R: Rng>(m: u32, rng: &mut R) -> Subset {
    if m == 0 {
        0
    } else {
        rng.random_range(0..1u32 << m)
    }
}

/// Upper closure (or downward closure) of a few random generators.
pub fn random_monotone_family<R: Rng>(m: u32, generators: usize, upward: bool, rng: &mut R) -> Family {
    let base = random_sparse_family(m, generators, rng);
    if upward {
        base.upper_closure()
    } else {
        base.downward_closure()
    }
}

/// Each `k`-subset of `[n]` independently with probability `density`.
pub fn random_layer_family<R: Rng>(n: u32, k: u32, density: f64, rng: &mut R) -> Family {
    let members: Vec<Subset> = (0..1u32 << n)
        .filter(|s| s.count_ones() == k && rng.random_bool(density))
        .collect();
    Family::new(n, members).expect("valid dimension")
}

/// Keeps each member with probability `keep`, but never returns an empty
/// family when the input is nonempty.
pub fn random_subfamily<R: Rng>(f: &Family, keep: f64, rng: &mut R) -> Family {
    let members = f.member_vec();
    let mut kept: Vec<Subset> = members.iter().copied().filter(|_| rng.random_bool(keep)).collect();
    if kept.is_empty() {
        if let Some(&s) = members.choose(rng) {
            kept.push(s);
        }
    }
    Family::new(f.ground_size(), kept).expect("same dimension")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairShape {
    /// `F` upper closed, `G` its largest partner.
    Monotone,
    /// `F` a few random sets, `G` a random nonempty part of its largest partner.
    Arbitrary,
}

/// A nonempty pair over `[n]` avoiding cross intersections of size `ell`,
/// or `None` if the draw left no partner.
pub fn random_forbidding_pair<R: Rng>(n: u32, ell: u32, shape: PairShape, rng: &mut R) -> Option<(Family, Family)> {
    random_window_pair(n, Window::single(ell), shape, rng)
}

/// Like [`random_forbidding_pair`] for an arbitrary window.
pub fn random_window_pair<R: Rng>(n: u32, window: Window, shape: PairShape, rng: &mut R) -> Option<(Family, Family)> {
    let generators = rng.random_range(1..=4);
    let f = match shape {
        PairShape::Monotone => random_monotone_family(n, generators, true, rng),
        PairShape::Arbitrary => random_sparse_family(n, generators, rng),
    };
    let g = if window.lo == window.hi {
        best_partner(&f, window.lo)
    } else {
        best_partner_window(&f, window)
    };
    if g.is_empty() {
        return None;
    }
    let g = match shape {
        PairShape::Monotone => g,
        PairShape::Arbitrary => random_subfamily(&g, rng.random_range(0.3..=1.0), rng),
    };
    Some((f, g))
}
