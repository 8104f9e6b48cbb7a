//! Counting cross pairs with a prescribed intersection size.

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::bounds;
use crate::error::{Error, Result};
use crate::family::{Family, Subset};
use crate::measure::{binomial_big, binomial_u64};
use crate::rational::{self, Rational};

fn check_dims(f: &Family, g: &Family) -> Result<()> {
    if f.ground_size() != g.ground_size() {
        return Err(Error::DimensionMismatch { left: f.ground_size(), right: g.ground_size() });
    }
    Ok(())
}

/// `|{B in G : |S ∩ B| = ell}|`.
pub fn count_i_ell_set(s: Subset, g: &Family, ell: u32) -> u64 {
    g.members().filter(|&b| (s & b).count_ones() == ell).count() as u64
}

/// `|{(A, B) in F x G : |A ∩ B| = ell}|`.
pub fn count_i_ell(f: &Family, g: &Family, ell: u32) -> Result<u64> {
    check_dims(f, g)?;
    if ell > f.ground_size() {
        return Err(Error::Precondition(format!(
            "ell = {ell} exceeds the ground size {}",
            f.ground_size()
        )));
    }
    let members = f.member_vec();
    Ok(members.par_iter().map(|&a| count_i_ell_set(a, g, ell)).sum())
}

/// Number of pairs `(A, B)` with `|A| = k`, `|B| = n - k`, `|A ∩ B| = ell`:
/// `C(n,k) C(k,ell) C(n-k,ell)`.
pub fn full_layer_count(n: u32, k: u32, ell: u32) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    binomial_big(n, k) * binomial_big(k, ell) * binomial_big(n - k, ell)
}

fn layer_of(f: &Family, k: u32, name: &str) -> Result<()> {
    match f.members().find(|s| s.count_ones() != k) {
        Some(s) => Err(Error::Precondition(format!(
            "{name} has member {} outside layer {k}",
            crate::family::format_subset(s)
        ))),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupersatReport {
    /// `i_ell(F, G) / i_ell(full layer k, full layer n-k)`.
    pub ratio: Rational,
    /// `|F|/C(n,k) * |G|/C(n,n-k)`.
    pub density_product: Rational,
    /// `exp(-delta)`.
    pub rhs: f64,
    /// Whether `ratio > exp(-delta)`.
    pub conclusion: bool,
    /// `epsilon(delta)` when its formula is defined.
    pub epsilon: Option<f64>,
    /// Whether the density product exceeds `exp(-epsilon(delta))`.
    pub dense_enough: Option<bool>,
    /// Whether `(n, k, ell, delta)` meets the size hypothesis on `delta`.
    /// Never true for cubes small enough to enumerate.
    pub hypothesis: bool,
}

/// `F` inside layer `k`, `G` inside layer `n - k`.
pub fn supersat_ratio(f: &Family, g: &Family, k: u32, ell: u32, delta: f64) -> Result<SupersatReport> {
    check_dims(f, g)?;
    let n = f.ground_size();
    if k > n {
        return Err(Error::Precondition(format!("layer {k} exceeds n = {n}")));
    }
    layer_of(f, k, "F")?;
    layer_of(g, n - k, "G")?;
    let denom = full_layer_count(n, k, ell);
    if denom == BigInt::from(0) {
        return Err(Error::Precondition(format!(
            "no pairs of layers {k} and {} meet in {ell} elements",
            n - k
        )));
    }
    let count = count_i_ell(f, g, ell)?;
    let ratio = Rational::new(BigInt::from(count), denom);
    let density_product = Rational::new(
        BigInt::from(f.len()) * BigInt::from(g.len()),
        BigInt::from(binomial_u64(n, k)) * BigInt::from(binomial_u64(n, n - k)),
    );
    let rhs = (-delta).exp();
    let conclusion = ratio > rational::from_f64(rhs);
    let epsilon = bounds::supersat_epsilon(n, k, ell, delta).ok();
    let dense_enough = epsilon.map(|e| density_product > rational::from_f64((-e).exp()));
    Ok(SupersatReport {
        ratio,
        density_product,
        rhs,
        conclusion,
        epsilon,
        dense_enough,
        hypothesis: bounds::supersat_hypothesis(n, k, ell, delta),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn counting_examples() {
        let full1 = Family::full(1).unwrap();
        assert_eq!(count_i_ell(&full1, &full1, 0).unwrap(), 3);
        let f = Family::full(3).unwrap();
        assert_eq!(count_i_ell(&f, &Family::empty(3).unwrap(), 1).unwrap(), 0);
        let top = Family::new(2, [0b11]).unwrap();
        assert_eq!(count_i_ell(&top, &top, 2).unwrap(), 1);
        assert!(count_i_ell(&top, &top, 3).is_err());

        let g = Family::full(3).unwrap();
        assert_eq!(count_i_ell_set(0, &g, 0), 8);
        assert_eq!(count_i_ell_set(0b01, &Family::full(2).unwrap(), 1), 2);
        assert_eq!(count_i_ell_set(0b111, &g, 4), 0);
    }

    #[test]
    fn layer_ratios() {
        assert_eq!(full_layer_count(4, 1, 0), BigInt::from(4));
        let f = Family::layer(4, 1).unwrap();
        let g = Family::layer(4, 3).unwrap();
        let r = supersat_ratio(&f, &g, 1, 0, 1.0).unwrap();
        assert_eq!(r.ratio, int(1));
        assert!(r.conclusion);
        assert!(!r.hypothesis);
        let r = supersat_ratio(&Family::empty(4).unwrap(), &g, 1, 0, 1.0).unwrap();
        assert_eq!(r.ratio, int(0));
        assert!(supersat_ratio(&g, &g, 1, 0, 1.0).is_err());
        assert!(supersat_ratio(&f, &g, 1, 2, 1.0).is_err());
    }
}
