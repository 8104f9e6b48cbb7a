//! Families of subsets of a finite ground set whose cross intersections avoid
//! a prescribed size, together with exact `p`-biased measures, the
//! dimension-reducing deformation procedure, closed-form bounds and
//! brute-force oracles for small hypercubes.
//!
//! Subsets of `[m] = {1, ..., m}` are encoded as bit masks: element `i` is
//! bit `i - 1`. A [`Family`] stores one membership bit per subset.

pub mod bounds;
pub mod checks;
pub mod deformation;
pub mod error;
pub mod extremal;
pub mod family;
pub mod measure;
pub mod random;
pub mod rational;
pub mod supersat;

pub use error::{Error, Result};
pub use family::{forbids, intersection_spectrum, Family, Subset, Window, DEFAULT_MAX_N};
pub use measure::{layer_profile, mu, tail_measure, Bias, LayerProfile, Tail};
pub use rational::Rational;
