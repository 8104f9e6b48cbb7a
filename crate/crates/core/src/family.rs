//! Dense families of subsets of `[m]`.
//!
//! A family over `[m]` keeps one membership bit for each of the `2^m` subsets,
//! packed into 64-bit words. Subset `A` is the mask with bit `i - 1` set for
//! every element `i` of `A`, so the top element `m` is bit `m - 1` and the two
//! sections of a family are the low and high halves of its indicator.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Default ceiling on the ground size; `2^24` bits is 2 MiB per family.
pub const DEFAULT_MAX_N: u32 = 24;

/// Largest limit accepted by [`Family::with_limit`].
pub const HARD_MAX_N: u32 = 30;

pub type Subset = u32;

/// Forbidden interval `[lo, hi]` of intersection sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Window {
    pub lo: u32,
    pub hi: u32,
}

impl Window {
    pub fn new(lo: u32, hi: u32) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidWindow { lo, hi });
        }
        Ok(Window { lo, hi })
    }

    pub fn single(size: u32) -> Self {
        Window { lo: size, hi: size }
    }

    #[inline]
    pub fn contains(&self, size: u32) -> bool {
        self.lo <= size && size <= self.hi
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Family {
    m: u32,
    words: Vec<u64>,
}

// in-word patterns selecting indices whose bit j is clear, j < 6
const LOW_PATTERN: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0F0F_0F0F_0F0F_0F0F,
    0x00FF_00FF_00FF_00FF,
    0x0000_FFFF_0000_FFFF,
    0x0000_0000_FFFF_FFFF,
];

fn word_count(m: u32) -> usize {
    if m <= 6 {
        1
    } else {
        1usize << (m - 6)
    }
}

fn tail_mask(m: u32) -> u64 {
    if m >= 6 {
        u64::MAX
    } else {
        (1u64 << (1u32 << m)) - 1
    }
}

impl Family {
    fn zeroed(m: u32) -> Self {
        Family {
            m,
            words: vec![0; word_count(m)],
        }
    }

    fn check_dim(m: u32, limit: u32) -> Result<()> {
        if m > limit || m > HARD_MAX_N {
            return Err(Error::DimensionOverflow { m, limit });
        }
        Ok(())
    }

    pub fn empty(m: u32) -> Result<Self> {
        Self::check_dim(m, DEFAULT_MAX_N)?;
        Ok(Self::zeroed(m))
    }

    pub fn full(m: u32) -> Result<Self> {
        Self::check_dim(m, DEFAULT_MAX_N)?;
        let mut f = Self::zeroed(m);
        f.words.iter_mut().for_each(|w| *w = u64::MAX);
        f.clear_tail();
        Ok(f)
    }

    /// Builds the family containing exactly `members` (duplicates collapse).
    pub fn new<I>(m: u32, members: I) -> Result<Self>
    where
        I: IntoIterator<Item = Subset>,
    {
        Self::with_limit(m, members, DEFAULT_MAX_N)
    }

    /// Like [`Family::new`] with a caller-chosen dimension ceiling.
    pub fn with_limit<I>(m: u32, members: I, limit: u32) -> Result<Self>
    where
        I: IntoIterator<Item = Subset>,
    {
        Self::check_dim(m, limit)?;
        let mut f = Self::zeroed(m);
        for s in members {
            if m < 32 && (s >> m) != 0 {
                return Err(Error::MaskOutOfRange { mask: s as u64, m });
            }
            f.insert(s);
        }
        Ok(f)
    }

    /// All subsets satisfying `pred`.
    pub fn from_predicate(m: u32, pred: impl Fn(Subset) -> bool) -> Result<Self> {
        Self::check_dim(m, DEFAULT_MAX_N)?;
        let mut f = Self::zeroed(m);
        for s in 0..(1u64 << m) {
            if pred(s as Subset) {
                f.insert(s as Subset);
            }
        }
        Ok(f)
    }

    /// The layer of all `k`-element subsets.
    pub fn layer(m: u32, k: u32) -> Result<Self> {
        Self::from_predicate(m, |s| s.count_ones() == k)
    }

    /// Members are the first `2^m` bits of `bits` (bit `i` of word `i / 64`).
    pub fn from_words(m: u32, words: Vec<u64>) -> Result<Self> {
        Self::check_dim(m, HARD_MAX_N)?;
        if words.len() != word_count(m) {
            return Err(Error::pre(format!(
                "expected {} indicator words for m = {m}, got {}",
                word_count(m),
                words.len()
            )));
        }
        let mut f = Family { m, words };
        f.clear_tail();
        Ok(f)
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub(crate) fn insert(&mut self, s: Subset) {
        let i = s as usize;
        self.words[i >> 6] |= 1u64 << (i & 63);
    }

    fn clear_tail(&mut self) {
        if let Some(last) = self.words.last_mut() {
            *last &= tail_mask(self.m);
        }
    }

    pub fn ground_size(&self) -> u32 {
        self.m
    }

    /// Number of members.
    pub fn len(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn contains(&self, s: Subset) -> bool {
        if self.m < 32 && (s >> self.m) != 0 {
            return false;
        }
        let i = s as usize;
        self.words[i >> 6] >> (i & 63) & 1 == 1
    }

    /// Members in increasing mask order.
    pub fn members(&self) -> Members<'_> {
        Members {
            words: &self.words,
            index: 0,
            current: self.words.first().copied().unwrap_or(0),
        }
    }

    pub fn member_vec(&self) -> Vec<Subset> {
        self.members().collect()
    }

    fn same_dim(&self, other: &Family) -> Result<()> {
        if self.m != other.m {
            return Err(Error::DimensionMismatch {
                left: self.m,
                right: other.m,
            });
        }
        Ok(())
    }

    fn zip_with(&self, other: &Family, op: impl Fn(u64, u64) -> u64) -> Result<Family> {
        self.same_dim(other)?;
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(&a, &b)| op(a, b))
            .collect();
        Ok(Family { m: self.m, words })
    }

    pub fn union(&self, other: &Family) -> Result<Family> {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &Family) -> Result<Family> {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &Family) -> Result<Family> {
        self.zip_with(other, |a, b| a & !b)
    }

    pub fn is_subfamily_of(&self, other: &Family) -> Result<bool> {
        self.same_dim(other)?;
        Ok(self.words.iter().zip(&other.words).all(|(&a, &b)| a & !b == 0))
    }

    /// `(F0, F1)` with respect to the top element `m`: `F0` holds the members
    /// avoiding `m`, `F1` the members containing it with `m` removed.
    pub fn sections(&self) -> Result<(Family, Family)> {
        if self.m < 2 {
            return Err(Error::SectionTooSmall(self.m));
        }
        let m = self.m - 1;
        if m >= 6 {
            let half = self.words.len() / 2;
            Ok((
                Family {
                    m,
                    words: self.words[..half].to_vec(),
                },
                Family {
                    m,
                    words: self.words[half..].to_vec(),
                },
            ))
        } else {
            let w = self.words[0];
            let width = 1u32 << m;
            let mask = tail_mask(m);
            Ok((
                Family {
                    m,
                    words: vec![w & mask],
                },
                Family {
                    m,
                    words: vec![(w >> width) & mask],
                },
            ))
        }
    }

    /// Members whose coordinate `j` (0-based bit) equals `set`.
    pub(crate) fn select_coordinate(&self, j: u32, set: bool) -> Family {
        debug_assert!(j < self.m);
        let mut out = self.clone();
        if j < 6 {
            let pattern = if set {
                !LOW_PATTERN[j as usize]
            } else {
                LOW_PATTERN[j as usize]
            };
            out.words.iter_mut().for_each(|w| *w &= pattern);
        } else {
            let shift = j - 6;
            for (i, w) in out.words.iter_mut().enumerate() {
                if ((i >> shift) & 1 == 1) != set {
                    *w = 0;
                }
            }
        }
        out
    }

    /// Image under `A -> A xor {j + 1}`.
    pub(crate) fn flip_coordinate(&self, j: u32) -> Family {
        debug_assert!(j < self.m);
        let mut out = self.clone();
        if j < 6 {
            let s = 1u32 << j;
            let lo = LOW_PATTERN[j as usize];
            out.words
                .iter_mut()
                .for_each(|w| *w = ((*w & lo) << s) | ((*w >> s) & lo));
        } else {
            let block = 1usize << (j - 6);
            for chunk in out.words.chunks_mut(2 * block) {
                let (a, b) = chunk.split_at_mut(block);
                a.swap_with_slice(b);
            }
        }
        out.clear_tail();
        out
    }

    fn or_assign(&mut self, other: &Family) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    /// `{[m] \ A : A in F}`.
    pub fn complement_family(&self) -> Family {
        let mut out = self.clone();
        if self.m >= 6 {
            out.words.reverse();
            out.words.iter_mut().for_each(|w| *w = w.reverse_bits());
        } else {
            let width = 1u32 << self.m;
            out.words[0] = self.words[0].reverse_bits() >> (64 - width);
        }
        out
    }

    /// Smallest upper-closed family containing `self`.
    pub fn upper_closure(&self) -> Family {
        let mut out = self.clone();
        for j in 0..self.m {
            let lifted = out.select_coordinate(j, false).flip_coordinate(j);
            out.or_assign(&lifted);
        }
        out
    }

    /// Smallest downward-closed family containing `self`.
    pub fn downward_closure(&self) -> Family {
        let mut out = self.clone();
        for j in 0..self.m {
            let lowered = out.select_coordinate(j, true).flip_coordinate(j);
            out.or_assign(&lowered);
        }
        out
    }

    pub fn is_upper_closed(&self) -> bool {
        (0..self.m).all(|j| {
            let lifted = self.select_coordinate(j, false).flip_coordinate(j);
            lifted.words.iter().zip(&self.words).all(|(&a, &b)| a & !b == 0)
        })
    }

    pub fn is_downward_closed(&self) -> bool {
        (0..self.m).all(|j| {
            let lowered = self.select_coordinate(j, true).flip_coordinate(j);
            lowered.words.iter().zip(&self.words).all(|(&a, &b)| a & !b == 0)
        })
    }

    /// Hamming expansion: all sets within symmetric-difference distance `t`
    /// of some member. Radii beyond `m` behave like `m`.
    pub fn expand(&self, t: u32) -> Family {
        let mut current = self.clone();
        for _ in 0..t.min(self.m) {
            let mut next = current.clone();
            for j in 0..self.m {
                next.or_assign(&current.flip_coordinate(j));
            }
            if next == current {
                break;
            }
            current = next;
        }
        current
    }

    /// Members with `lo <= |A| <= hi`.
    pub fn cardinality_filter(&self, lo: u32, hi: u32) -> Family {
        let mut out = Family::zeroed(self.m);
        for s in self.members() {
            let c = s.count_ones();
            if lo <= c && c <= hi {
                out.insert(s);
            }
        }
        out
    }

    /// Fixture text: `m=<int>` followed by one sorted member per line, `-` for
    /// the empty set.
    pub fn to_fixture(&self) -> String {
        self.to_string()
    }

    pub fn parse_fixture(text: &str) -> Result<Family> {
        text.parse()
    }
}

impl fmt::Debug for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Family(m={}, {{", self.m)?;
        for (i, s) in self.members().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", format_subset(s))?;
        }
        write!(f, "}})")
    }
}

pub fn format_subset(s: Subset) -> String {
    if s == 0 {
        return "-".to_string();
    }
    let mut parts = Vec::new();
    for i in 0..32 {
        if s >> i & 1 == 1 {
            parts.push((i + 1).to_string());
        }
    }
    parts.join(",")
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "m={}", self.m)?;
        for s in self.members() {
            writeln!(f, "{}", format_subset(s))?;
        }
        Ok(())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(text: &str) -> Result<Family> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("missing `m=<int>` header".into()))?;
        let m: u32 = header
            .strip_prefix("m=")
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad header {header:?}")))?;
        let mut members = Vec::new();
        for line in lines {
            if line == "-" {
                members.push(0);
                continue;
            }
            let mut mask: Subset = 0;
            for tok in line.split(',') {
                let e: u32 = tok
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad element {tok:?} in {line:?}")))?;
                if e == 0 || e > m {
                    return Err(Error::Parse(format!("element {e} outside [1, {m}]")));
                }
                mask |= 1 << (e - 1);
            }
            members.push(mask);
        }
        Family::new(m, members)
    }
}

pub struct Members<'a> {
    words: &'a [u64],
    index: usize,
    current: u64,
}

impl Iterator for Members<'_> {
    type Item = Subset;

    fn next(&mut self) -> Option<Subset> {
        loop {
            if self.current != 0 {
                let bit = self.current.trailing_zeros();
                self.current &= self.current - 1;
                return Some(((self.index << 6) as u32) | bit);
            }
            self.index += 1;
            if self.index >= self.words.len() {
                return None;
            }
            self.current = self.words[self.index];
        }
    }
}

/// Entry `l` counts pairs `(A, B)` in `F x G` with `|A ∩ B| = l`, for
/// `l = 0..=m`.
pub fn intersection_spectrum(f: &Family, g: &Family) -> Result<Vec<u64>> {
    f.same_dim(g)?;
    let mut spectrum = vec![0u64; f.m as usize + 1];
    let gs = g.member_vec();
    for a in f.members() {
        for &b in &gs {
            spectrum[(a & b).count_ones() as usize] += 1;
        }
    }
    Ok(spectrum)
}

/// Whether no cross intersection of `F` and `G` has its size inside `window`.
/// Vacuously true when either family is empty.
pub fn forbids(f: &Family, g: &Family, window: Window) -> Result<bool> {
    f.same_dim(g)?;
    if window.lo > f.m {
        return Ok(true);
    }
    let gs = g.member_vec();
    if gs.is_empty() {
        return Ok(true);
    }
    for a in f.members() {
        // |A ∩ B| <= |A|, so small members cannot reach the window
        if a.count_ones() < window.lo {
            continue;
        }
        if gs.iter().any(|&b| window.contains((a & b).count_ones())) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(m: u32, sets: &[&[u32]]) -> Family {
        Family::new(
            m,
            sets.iter()
                .map(|s| s.iter().fold(0, |acc, &e| acc | 1 << (e - 1))),
        )
        .unwrap()
    }

    #[test]
    fn construction() {
        assert_eq!(fam(2, &[]).len(), 0);
        assert_eq!(fam(2, &[&[], &[1], &[2], &[1, 2]]), Family::full(2).unwrap());
        assert_eq!(fam(3, &[&[1, 2], &[1, 2]]).len(), 1);
        assert!(matches!(
            Family::empty(25),
            Err(Error::DimensionOverflow { m: 25, .. })
        ));
        assert!(matches!(
            Family::new(2, [0b100]),
            Err(Error::MaskOutOfRange { .. })
        ));
        assert!(Family::with_limit(26, [], 26).is_ok());
        assert_eq!(Family::empty(0).unwrap().len(), 0);
        assert_eq!(Family::full(0).unwrap().len(), 1);
    }

    #[test]
    fn sections_examples() {
        let (f0, f1) = fam(2, &[&[2], &[1, 2]]).sections().unwrap();
        assert_eq!(f0, Family::empty(1).unwrap());
        assert_eq!(f1, fam(1, &[&[], &[1]]));

        let (f0, f1) = Family::full(2).unwrap().sections().unwrap();
        assert_eq!(f0, Family::full(1).unwrap());
        assert_eq!(f1, Family::full(1).unwrap());

        let (f0, f1) = fam(4, &[&[1, 2, 3, 4]]).sections().unwrap();
        assert!(f0.is_empty());
        assert_eq!(f1, fam(3, &[&[1, 2, 3]]));

        assert_eq!(
            Family::full(1).unwrap().sections(),
            Err(Error::SectionTooSmall(1))
        );
    }

    #[test]
    fn sections_across_word_boundary() {
        for m in [6, 7, 8, 9] {
            let f = Family::from_predicate(m, |s| s.count_ones() % 3 == 1).unwrap();
            let (f0, f1) = f.sections().unwrap();
            let top = 1u32 << (m - 1);
            let want0 = Family::new(m - 1, f.members().filter(|s| s & top == 0)).unwrap();
            let want1 =
                Family::new(m - 1, f.members().filter(|s| s & top != 0).map(|s| s ^ top)).unwrap();
            assert_eq!(f0, want0);
            assert_eq!(f1, want1);
            assert_eq!(f0.len() + f1.len(), f.len());
        }
    }

    #[test]
    fn set_operations() {
        let a = fam(1, &[&[]]);
        let b = fam(1, &[&[1]]);
        assert_eq!(a.union(&b).unwrap(), Family::full(1).unwrap());
        assert!(a.intersection(&b).unwrap().is_empty());
        let f = fam(3, &[&[1], &[2, 3]]);
        assert_eq!(f.intersection(&f).unwrap(), f);
        assert!(matches!(
            a.union(&f),
            Err(Error::DimensionMismatch { left: 1, right: 3 })
        ));
    }

    #[test]
    fn complements() {
        assert_eq!(fam(2, &[&[]]).complement_family(), fam(2, &[&[1, 2]]));
        let full = Family::full(5).unwrap();
        assert_eq!(full.complement_family(), full);
        let f = fam(3, &[&[1], &[2, 3]]);
        assert_eq!(f.complement_family().complement_family(), f);
        assert_eq!(f.complement_family(), fam(3, &[&[2, 3], &[1]]));
        for m in [6, 7, 9] {
            let g = Family::from_predicate(m, |s| s % 7 == 3).unwrap();
            let want = Family::new(m, g.members().map(|s| s ^ ((1 << m) - 1))).unwrap();
            assert_eq!(g.complement_family(), want);
        }
    }

    #[test]
    fn closure_predicates() {
        let f = fam(2, &[&[]]);
        assert!(f.is_downward_closed());
        assert!(!f.is_upper_closed());
        assert!(fam(2, &[&[1, 2]]).is_upper_closed());
        let g = fam(2, &[&[1]]);
        assert!(!g.is_upper_closed() && !g.is_downward_closed());
        for m in 0..4 {
            for f in [Family::empty(m).unwrap(), Family::full(m).unwrap()] {
                assert!(f.is_upper_closed() && f.is_downward_closed());
            }
        }
        let up = fam(8, &[&[1, 5], &[7]]).upper_closure();
        assert!(up.is_upper_closed());
        assert!(up.contains(0b1001_0001));
        assert!(!up.contains(0b1010_0001));
        assert!(!up.contains(0b0000_0001));
        let down = fam(8, &[&[1, 5, 8]]).downward_closure();
        assert!(down.is_downward_closed());
        assert_eq!(down.len(), 8);
    }

    #[test]
    fn expansion() {
        let f = fam(2, &[&[]]);
        assert_eq!(f.expand(1), fam(2, &[&[], &[1], &[2]]));
        assert_eq!(f.expand(0), f);
        assert_eq!(f.expand(2), Family::full(2).unwrap());
        assert_eq!(f.expand(9), Family::full(2).unwrap());
    }

    #[test]
    fn layer_filter() {
        let full = Family::full(2).unwrap();
        assert_eq!(full.cardinality_filter(1, 1), fam(2, &[&[1], &[2]]));
        assert_eq!(full.cardinality_filter(0, 2), full);
        assert_eq!(fam(2, &[&[], &[1, 2]]).cardinality_filter(2, 2), fam(2, &[&[1, 2]]));
    }

    #[test]
    fn spectra() {
        let full = Family::full(1).unwrap();
        assert_eq!(intersection_spectrum(&full, &full).unwrap(), vec![3, 1]);
        let empty = Family::empty(3).unwrap();
        assert_eq!(
            intersection_spectrum(&empty, &Family::full(3).unwrap()).unwrap(),
            vec![0; 4]
        );
        let top = fam(2, &[&[1, 2]]);
        assert_eq!(intersection_spectrum(&top, &top).unwrap(), vec![0, 0, 1]);
    }

    #[test]
    fn forbid_predicate() {
        let f = fam(2, &[&[1]]);
        let g = fam(2, &[&[2]]);
        assert!(!forbids(&f, &g, Window::single(0)).unwrap());
        assert!(forbids(&f, &g, Window::single(1)).unwrap());
        let f = fam(4, &[&[1, 2, 3, 4]]);
        let g = fam(4, &[&[]]);
        assert!(forbids(&f, &g, Window::single(1)).unwrap());
        assert!(forbids(&Family::empty(2).unwrap(), &g.cardinality_filter(0, 0), Window::single(0)).is_err());
        assert!(forbids(&Family::empty(4).unwrap(), &g, Window::single(0)).unwrap());
        assert!(Window::new(2, 1).is_err());
    }

    #[test]
    fn fixture_round_trip() {
        let text = "m=3\n-\n1,2\n3\n1,2,3\n";
        let f: Family = text.parse().unwrap();
        assert_eq!(f.len(), 4);
        // canonical output orders members by mask
        assert_eq!(f.to_fixture(), "m=3\n-\n1,2\n3\n1,2,3\n");
        assert_eq!(Family::parse_fixture(&f.to_fixture()).unwrap(), f);
        assert_eq!(Family::empty(2).unwrap().to_fixture(), "m=2\n");
        assert!("m=2\n3\n".parse::<Family>().is_err());
        assert!("2\n".parse::<Family>().is_err());
        assert!("m=2\n1,x\n".parse::<Family>().is_err());
    }
}
