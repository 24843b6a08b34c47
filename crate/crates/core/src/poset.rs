//! Shared order-theoretic machinery.
//!
//! Orientation follows the forcing convention: `le(p, q)` means `p` is the
//! *stronger* condition (it carries more information than `q`). The top
//! element is the empty condition.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Debug;

use thiserror::Error;

/// Stands in for an ordinal index; only the natural order on indices is used.
pub type Index = u32;

/// Default upper bound on the number of conditions [`enumerate_universe`] will
/// materialize.
pub const DEFAULT_UNIVERSE_CAP: usize = 1_000_000;

/// The finite shadow of an infinite poset: which indices may appear, how long
/// sequences may grow, and an exclusive bound on their entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Truncation {
    pub indices: BTreeSet<Index>,
    pub max_len: usize,
    pub max_val: u32,
}

impl Truncation {
    pub fn new(indices: impl IntoIterator<Item = Index>, max_len: usize, max_val: u32) -> Self {
        Truncation {
            indices: indices.into_iter().collect(),
            max_len,
            max_val,
        }
    }

    pub fn validate(&self) -> Result<(), EnumerationError> {
        if self.max_len == 0 {
            return Err(EnumerationError::InvalidTruncation("max_len must be at least 1"));
        }
        if self.max_val == 0 {
            return Err(EnumerationError::InvalidTruncation("max_val must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnumerationError {
    #[error("universe has {size} conditions, above the cap of {cap}")]
    Overflow { size: u128, cap: usize },
    #[error("invalid truncation: {0}")]
    InvalidTruncation(&'static str),
}

pub trait Poset {
    type Cond: Clone + Eq + Ord + Debug;

    /// `p ≤ q`: `p` extends (is at least as strong as) `q`.
    fn le(&self, p: &Self::Cond, q: &Self::Cond) -> bool;

    fn top(&self) -> Self::Cond;

    /// A constructive common strengthening, or `None` when the conditions are
    /// incompatible.
    fn common_lower_bound(&self, p: &Self::Cond, q: &Self::Cond) -> Option<Self::Cond>;

    fn compatible(&self, p: &Self::Cond, q: &Self::Cond) -> bool {
        self.common_lower_bound(p, q).is_some()
    }
}

/// Posets whose truncated universes can be listed.
pub trait Enumerable: Poset {
    /// Exact number of conditions [`Enumerable::enumerate_all`] would return.
    fn universe_size(&self, t: &Truncation) -> u128;

    fn enumerate_all(&self, t: &Truncation) -> Vec<Self::Cond>;
}

/// Every condition of the truncated universe, in a deterministic order.
pub fn enumerate_universe<P: Enumerable>(
    poset: &P,
    t: &Truncation,
    cap: usize,
) -> Result<Vec<P::Cond>, EnumerationError> {
    t.validate()?;
    let size = poset.universe_size(t);
    if size > cap as u128 {
        return Err(EnumerationError::Overflow { size, cap });
    }
    Ok(poset.enumerate_all(t))
}

/// True iff every distinct pair of members is incompatible.
pub fn is_antichain<P: Poset>(poset: &P, members: &[P::Cond]) -> bool {
    members
        .iter()
        .enumerate()
        .all(|(i, a)| members[i + 1..].iter().all(|b| a == b || !poset.compatible(a, b)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Predensity<C> {
    /// `member` is compatible with the probe, and `lower_bound` lies below both.
    Witness {
        member: C,
        lower_bound: C,
    },
    Failure,
}

impl<C> Predensity<C> {
    pub fn is_witness(&self) -> bool {
        matches!(self, Predensity::Witness { .. })
    }
}

/// Looks for a member of `members` compatible with `p0`, using the poset's
/// constructive common lower bound.
pub fn is_predense_below<P: Poset>(poset: &P, members: &[P::Cond], p0: &P::Cond) -> Predensity<P::Cond> {
    for a in members {
        if let Some(lb) = poset.common_lower_bound(a, p0) {
            return Predensity::Witness {
                member: a.clone(),
                lower_bound: lb,
            };
        }
    }
    Predensity::Failure
}

/// Same question as [`is_predense_below`], answered by searching `universe`
/// for a common lower bound. The answer is relative to the truncation the
/// universe came from: a failure only means no witness exists *inside* it.
pub fn is_predense_below_in<P: Poset>(
    poset: &P,
    members: &[P::Cond],
    p0: &P::Cond,
    universe: &[P::Cond],
) -> Predensity<P::Cond> {
    for a in members {
        if let Some(lb) = search_common_lower_bound(poset, a, p0, universe) {
            return Predensity::Witness {
                member: a.clone(),
                lower_bound: lb,
            };
        }
    }
    Predensity::Failure
}

/// Brute-force search for some `r` in `universe` with `r ≤ p` and `r ≤ q`.
pub fn search_common_lower_bound<P: Poset>(
    poset: &P,
    p: &P::Cond,
    q: &P::Cond,
    universe: &[P::Cond],
) -> Option<P::Cond> {
    universe.iter().find(|r| poset.le(r, p) && poset.le(r, q)).cloned()
}

/// Antichain membership together with predensity probes for a set of samples.
#[derive(Clone, Debug)]
pub struct AntichainReport<C> {
    pub antichain: Vec<C>,
    pub is_antichain: bool,
    pub is_predense_in: Vec<(C, Predensity<C>)>,
}

impl<C> AntichainReport<C> {
    pub fn predense_everywhere(&self) -> bool {
        self.is_predense_in.iter().all(|(_, w)| w.is_witness())
    }
}

pub fn antichain_report<P: Poset>(poset: &P, members: &[P::Cond], samples: &[P::Cond]) -> AntichainReport<P::Cond> {
    AntichainReport {
        antichain: members.to_vec(),
        is_antichain: is_antichain(poset, members),
        is_predense_in: samples
            .iter()
            .map(|p0| (p0.clone(), is_predense_below(poset, members, p0)))
            .collect(),
    }
}

/// Largest universe [`maximal_antichains`] will search exhaustively.
pub const MAX_ANTICHAIN_UNIVERSE: usize = 24;

/// All antichains of `universe` that are maximal inside it (every element of
/// the universe is compatible with some member). Brute force over subsets.
pub fn maximal_antichains<P: Poset>(poset: &P, universe: &[P::Cond]) -> Result<Vec<Vec<P::Cond>>, EnumerationError> {
    let n = universe.len();
    if n > MAX_ANTICHAIN_UNIVERSE {
        return Err(EnumerationError::Overflow {
            size: 1u128 << n,
            cap: 1 << MAX_ANTICHAIN_UNIVERSE,
        });
    }
    let mut compat = vec![0u32; n];
    for (row, a) in compat.iter_mut().zip(universe) {
        for (j, b) in universe.iter().enumerate() {
            if poset.compatible(a, b) {
                *row |= 1 << j;
            }
        }
    }
    let mut out = Vec::new();
    for mask in 1u32..(1u32 << n) {
        let mut covered = 0u32;
        let mut ok = true;
        for (i, &row) in compat.iter().enumerate() {
            if mask & (1 << i) == 0 {
                continue;
            }
            // another member compatible with i
            if row & mask & !(1 << i) != 0 {
                ok = false;
                break;
            }
            covered |= row;
        }
        let full = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
        if ok && covered == full {
            out.push(
                (0..n)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| universe[i].clone())
                    .collect(),
            );
        }
    }
    Ok(out)
}

/// Violation counts for the partial-order axioms over one universe.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OrderAxiomReport {
    pub size: usize,
    pub comparable_pairs: u64,
    pub reflexivity: u64,
    pub transitivity: u64,
    pub antisymmetry: u64,
    pub compat_reflexivity: u64,
    pub compat_symmetry: u64,
    /// pairs with `p ≤ q` that the compatibility test rejects
    pub le_not_compatible: u64,
}

impl OrderAxiomReport {
    pub fn violations(&self) -> u64 {
        self.reflexivity
            + self.transitivity
            + self.antisymmetry
            + self.compat_reflexivity
            + self.compat_symmetry
            + self.le_not_compatible
    }
}

struct BitRows {
    words: usize,
    bits: Vec<u64>,
}

impl BitRows {
    fn new(n: usize) -> Self {
        let words = n.div_ceil(64);
        BitRows {
            words,
            bits: vec![0; words * n],
        }
    }
    fn set(&mut self, r: usize, c: usize) {
        self.bits[r * self.words + c / 64] |= 1 << (c % 64);
    }
    fn get(&self, r: usize, c: usize) -> bool {
        self.bits[r * self.words + c / 64] & (1 << (c % 64)) != 0
    }
    fn row(&self, r: usize) -> &[u64] {
        &self.bits[r * self.words..(r + 1) * self.words]
    }
    fn ones(&self, r: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(r)
            .iter()
            .enumerate()
            .flat_map(|(w, &word)| (0..64).filter(move |b| word & (1 << b) != 0).map(move |b| w * 64 + b))
    }
}

/// Exhaustive check of reflexivity, transitivity and antisymmetry of `le`,
/// plus the basic compatibility laws, on `universe`. Quadratic in its size.
pub fn check_order_axioms<P: Poset>(poset: &P, universe: &[P::Cond]) -> OrderAxiomReport {
    let n = universe.len();
    let mut up = BitRows::new(n);
    let mut report = OrderAxiomReport {
        size: n,
        ..Default::default()
    };
    for i in 0..n {
        for j in 0..n {
            if poset.le(&universe[i], &universe[j]) {
                up.set(i, j);
                report.comparable_pairs += 1;
            }
        }
    }
    for i in 0..n {
        if !up.get(i, i) {
            report.reflexivity += 1;
        }
        let p = &universe[i];
        if !poset.compatible(p, p) {
            report.compat_reflexivity += 1;
        }
        for j in up.ones(i) {
            if i != j && up.get(j, i) && universe[i] != universe[j] {
                report.antisymmetry += 1;
            }
            let (ri, rj) = (up.row(i), up.row(j));
            if ri.iter().zip(rj).any(|(a, b)| b & !a != 0) {
                report.transitivity += 1;
            }
            if !poset.compatible(p, &universe[j]) {
                report.le_not_compatible += 1;
            }
        }
    }
    report
}

/// Symmetry of `compatible` over all unordered pairs; kept separate from
/// [`check_order_axioms`] because each test may build a witness.
pub fn compat_symmetry_violations<P: Poset>(poset: &P, universe: &[P::Cond]) -> u64 {
    let mut bad = 0;
    for (i, p) in universe.iter().enumerate() {
        for q in &universe[i + 1..] {
            if poset.compatible(p, q) != poset.compatible(q, p) {
                bad += 1;
            }
        }
    }
    bad
}

/// Every subset of `pool`, smallest bitmask first.
pub(crate) fn subsets(pool: &[Index]) -> impl Iterator<Item = Vec<Index>> + '_ {
    (0u64..(1u64 << pool.len())).map(move |mask| {
        pool.iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, &a)| a)
            .collect()
    })
}

/// Odometer over `len` digits each in `0..base`.
pub(crate) struct Odometer {
    digits: Vec<u32>,
    base: u32,
    done: bool,
}

impl Odometer {
    pub(crate) fn new(len: usize, base: u32) -> Self {
        Odometer {
            digits: vec![0; len],
            base,
            done: base == 0 && len > 0,
        }
    }

    /// The current digits, or `None` once exhausted. Call [`Odometer::advance`]
    /// after consuming.
    pub(crate) fn current(&self) -> Option<&[u32]> {
        if self.done {
            None
        } else {
            Some(&self.digits)
        }
    }

    pub(crate) fn advance(&mut self) {
        for d in self.digits.iter_mut().rev() {
            *d += 1;
            if *d < self.base {
                return;
            }
            *d = 0;
        }
        self.done = true;
    }
}

pub(crate) fn saturating_pow(base: u128, exp: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base);
    }
    acc
}

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn odometer_counts_all_words() {
        let mut o = Odometer::new(3, 2);
        let mut n = 0;
        while o.current().is_some() {
            n += 1;
            o.advance();
        }
        assert_eq!(n, 8);
        let mut empty = Odometer::new(0, 5);
        assert_eq!(empty.current(), Some(&[][..]));
        empty.advance();
        assert!(empty.current().is_none());
    }

    #[test]
    fn truncation_validation() {
        assert!(Truncation::new([0], 0, 2).validate().is_err());
        assert!(Truncation::new([0], 1, 0).validate().is_err());
        assert!(Truncation::new([], 1, 1).validate().is_ok());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(3, 0), 1);
        assert_eq!(binomial(3, 2), 3);
        assert_eq!(binomial(5, 2), 10);
    }
}
