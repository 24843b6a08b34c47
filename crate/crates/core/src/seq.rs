//! Conditions made of equal-length finite sequences indexed by a finite set,
//! shared by the scale poset and the eventually-different poset. The two
//! differ only in the rule imposed on the columns a strengthening adds.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::ops::Bound::{Excluded, Unbounded};

use rand::Rng;
use thiserror::Error;

use crate::poset::{binomial, saturating_pow, subsets, Enumerable, Index, Odometer, Poset, Truncation};

/// Which column rule a sequence poset enforces on newly added columns.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mode {
    /// values along a new column are non-decreasing in the index order
    Scale,
    /// values along a new column are pairwise distinct
    EvDiff,
}

impl Mode {
    /// The rule for indices `lower < upper` with column values `at_lower`, `at_upper`.
    #[inline]
    pub fn pair_ok(self, at_lower: u32, at_upper: u32) -> bool {
        match self {
            Mode::Scale => at_lower <= at_upper,
            Mode::EvDiff => at_lower != at_upper,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Mode::Scale => "scale",
            Mode::EvDiff => "evdiff",
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConditionError {
    #[error("sequence at index {index} has length {found}, expected {expected}")]
    LengthMismatch {
        index: Index,
        expected: usize,
        found: usize,
    },
    #[error("coder is not one-to-one on sequences of length {level}")]
    CoderNotInjective { level: usize },
    #[error("side set of index {index} must be the set of smaller indices in the domain")]
    SideSetMismatch { index: Index },
}

/// A finite map from indices to sequences of a common length `n`.
///
/// The empty condition always has `n = 0`, which makes it the unique top.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SeqCondition {
    n: usize,
    entries: BTreeMap<Index, Vec<u32>>,
}

pub type ScaleCondition = SeqCondition;
pub type EvDiffCondition = SeqCondition;

impl SeqCondition {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn new(entries: BTreeMap<Index, Vec<u32>>, n: usize) -> Result<Self, ConditionError> {
        for (&index, s) in &entries {
            if s.len() != n {
                return Err(ConditionError::LengthMismatch {
                    index,
                    expected: n,
                    found: s.len(),
                });
            }
        }
        let n = if entries.is_empty() { 0 } else { n };
        Ok(SeqCondition { n, entries })
    }

    /// Infers `n` from the first sequence.
    pub fn from_entries<I, S>(entries: I) -> Result<Self, ConditionError>
    where
        I: IntoIterator<Item = (Index, S)>,
        S: Into<Vec<u32>>,
    {
        let entries: BTreeMap<Index, Vec<u32>> = entries.into_iter().map(|(a, s)| (a, s.into())).collect();
        let n = entries.values().next().map_or(0, Vec::len);
        Self::new(entries, n)
    }

    pub(crate) fn from_parts_unchecked(entries: BTreeMap<Index, Vec<u32>>, n: usize) -> Self {
        debug_assert!(entries.values().all(|s| s.len() == n));
        let n = if entries.is_empty() { 0 } else { n };
        SeqCondition { n, entries }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &BTreeMap<Index, Vec<u32>> {
        &self.entries
    }

    pub fn into_entries(self) -> BTreeMap<Index, Vec<u32>> {
        self.entries
    }

    pub fn get(&self, alpha: Index) -> Option<&[u32]> {
        self.entries.get(&alpha).map(Vec::as_slice)
    }

    pub fn contains(&self, alpha: Index) -> bool {
        self.entries.contains_key(&alpha)
    }

    pub fn domain(&self) -> BTreeSet<Index> {
        self.entries.keys().copied().collect()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// Largest entry plus one, or 0 if there are no entries.
    pub fn value_bound(&self) -> u32 {
        self.entries
            .values()
            .flat_map(|s| s.iter().copied())
            .max()
            .map_or(0, |v| v + 1)
    }
}

/// Entries filtered to `j`; `n` is kept unless nothing survives.
pub fn restrict(p: &SeqCondition, j: &BTreeSet<Index>) -> SeqCondition {
    let entries: BTreeMap<Index, Vec<u32>> = p
        .entries
        .iter()
        .filter(|(a, _)| j.contains(a))
        .map(|(&a, s)| (a, s.clone()))
        .collect();
    SeqCondition::from_parts_unchecked(entries, p.n)
}

/// Whether `p1 ≤ p0` under the column rule of `mode`.
pub fn seq_leq(mode: Mode, p0: &SeqCondition, p1: &SeqCondition) -> bool {
    if p0.n > p1.n {
        return false;
    }
    for (a, s0) in &p0.entries {
        match p1.entries.get(a) {
            Some(s1) if s1[..p0.n] == s0[..] => {}
            _ => return false,
        }
    }
    if p1.n == p0.n {
        return true;
    }
    // pairs lower < upper, both in dom(p0), over the new columns
    for lower in p0.entries.keys() {
        let s_lower = &p1.entries[lower];
        for upper in p0.entries.range((Excluded(*lower), Unbounded)).map(|(k, _)| k) {
            let s_upper = &p1.entries[upper];
            for i in p0.n..p1.n {
                if !mode.pair_ok(s_lower[i], s_upper[i]) {
                    return false;
                }
            }
        }
    }
    true
}

/// The pair clause a strengthening must respect, evaluated directly: for all
/// indices `lower < upper` in `dom(p)` and columns `n_p ≤ i < n_q`.
pub fn column_clause_holds(mode: Mode, p: &SeqCondition, q: &SeqCondition) -> bool {
    let dom: Vec<Index> = p.entries.keys().copied().collect();
    for (x, &lower) in dom.iter().enumerate() {
        for &upper in &dom[x + 1..] {
            let (Some(f), Some(g)) = (q.get(lower), q.get(upper)) else {
                return false;
            };
            for i in p.n..q.n {
                if !mode.pair_ok(f[i], g[i]) {
                    return false;
                }
            }
        }
    }
    true
}

/// Fills the columns `from..to` for the indices of `dom`, where `fixed` gives
/// values already determined by another condition. Returns `None` when the
/// fixed values themselves break the column rule.
fn fill_columns(
    mode: Mode,
    dom: &BTreeMap<Index, Vec<u32>>,
    fixed: &BTreeMap<Index, Vec<u32>>,
    from: usize,
    to: usize,
) -> Option<BTreeMap<Index, Vec<u32>>> {
    let mut filled: BTreeMap<Index, Vec<u32>> = dom
        .iter()
        .filter(|(a, _)| !fixed.contains_key(a))
        .map(|(&a, s)| (a, s.clone()))
        .collect();
    for i in from..to {
        match mode {
            Mode::Scale => {
                let mut floor = 0;
                for a in dom.keys() {
                    if let Some(s) = fixed.get(a) {
                        if s[i] < floor {
                            return None;
                        }
                        floor = s[i];
                    } else {
                        filled.get_mut(a).unwrap().push(floor);
                    }
                }
            }
            Mode::EvDiff => {
                let mut used = BTreeSet::new();
                for a in dom.keys() {
                    if let Some(s) = fixed.get(a) {
                        if !used.insert(s[i]) {
                            return None;
                        }
                    }
                }
                for a in dom.keys() {
                    if !fixed.contains_key(a) {
                        let v = smallest_unused(&used);
                        used.insert(v);
                        filled.get_mut(a).unwrap().push(v);
                    }
                }
            }
        }
    }
    Some(filled)
}

pub(crate) fn smallest_unused(used: &BTreeSet<u32>) -> u32 {
    let mut v = 0;
    for &u in used {
        if u == v {
            v += 1;
        } else if u > v {
            break;
        }
    }
    v
}

/// Exact compatibility: a common lower bound of `p` and `q` of length
/// `max(n_p, n_q)`, or `None` if none exists at any length.
pub fn seq_common_lower_bound(mode: Mode, p: &SeqCondition, q: &SeqCondition) -> Option<SeqCondition> {
    let (short, long) = if p.n <= q.n { (p, q) } else { (q, p) };
    if short.is_empty() {
        return Some(long.clone());
    }
    if long.is_empty() {
        return Some(short.clone());
    }
    for (a, s) in &short.entries {
        if let Some(t) = long.entries.get(a) {
            if t[..short.n] != s[..] {
                return None;
            }
        }
    }
    let fixed: BTreeMap<Index, Vec<u32>> = long
        .entries
        .iter()
        .filter(|(a, _)| short.entries.contains_key(a))
        .map(|(&a, s)| (a, s.clone()))
        .collect();
    let filled = fill_columns(mode, &short.entries, &fixed, short.n, long.n)?;
    let mut entries = long.entries.clone();
    entries.extend(filled);
    Some(SeqCondition::from_parts_unchecked(entries, long.n))
}

/// Strengthens `p` within the same domain to length `n`: constant-zero columns
/// for the scale rule, `0, 1, 2, ...` in index order for the distinctness rule.
/// The empty condition is returned unchanged, since its length is free.
pub fn pad_to(mode: Mode, p: &SeqCondition, n: usize) -> SeqCondition {
    if p.is_empty() || n <= p.n {
        return p.clone();
    }
    let mut entries = p.entries.clone();
    for (k, s) in entries.values_mut().enumerate() {
        let fill = match mode {
            Mode::Scale => 0,
            Mode::EvDiff => k as u32,
        };
        s.resize(n, fill);
    }
    SeqCondition::from_parts_unchecked(entries, n)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AmalgamationError {
    #[error("index {0} of the small condition lies outside the subset")]
    OutsideSubset(Index),
    #[error("the small condition does not extend the restriction of the large one")]
    NotBelowRestriction,
    #[error("the small condition has length {found}, shorter than {required}; pad it first")]
    TooShort { found: usize, required: usize },
}

pub(crate) fn check_amalgamation_pre(
    mode: Mode,
    p0: &SeqCondition,
    j: &BTreeSet<Index>,
    p2: &SeqCondition,
) -> Result<usize, AmalgamationError> {
    if let Some(&a) = p2.entries.keys().find(|a| !j.contains(a)) {
        return Err(AmalgamationError::OutsideSubset(a));
    }
    if !seq_leq(mode, &restrict(p0, j), p2) {
        return Err(AmalgamationError::NotBelowRestriction);
    }
    if p2.is_empty() {
        return Ok(p0.n);
    }
    if p2.n < p0.n {
        return Err(AmalgamationError::TooShort {
            found: p2.n,
            required: p0.n,
        });
    }
    Ok(p2.n)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeqPoset {
    pub mode: Mode,
}

impl SeqPoset {
    pub const SCALE: SeqPoset = SeqPoset { mode: Mode::Scale };
    pub const EVDIFF: SeqPoset = SeqPoset { mode: Mode::EvDiff };
}

impl Poset for SeqPoset {
    type Cond = SeqCondition;

    fn le(&self, p: &SeqCondition, q: &SeqCondition) -> bool {
        seq_leq(self.mode, q, p)
    }

    fn top(&self) -> SeqCondition {
        SeqCondition::empty()
    }

    fn common_lower_bound(&self, p: &SeqCondition, q: &SeqCondition) -> Option<SeqCondition> {
        seq_common_lower_bound(self.mode, p, q)
    }
}

impl Enumerable for SeqPoset {
    fn universe_size(&self, t: &Truncation) -> u128 {
        seq_universe_size(t)
    }

    fn enumerate_all(&self, t: &Truncation) -> Vec<SeqCondition> {
        enumerate_seq(t)
    }
}

pub fn seq_universe_size(t: &Truncation) -> u128 {
    let m = t.indices.len();
    let v = t.max_val as u128;
    let mut total: u128 = 1;
    for k in 1..=m {
        let per_dom: u128 = (0..=t.max_len)
            .map(|n| saturating_pow(v, k * n))
            .fold(0, u128::saturating_add);
        total = total.saturating_add(binomial(m, k).saturating_mul(per_dom));
    }
    total
}

/// All conditions with domain inside `t.indices`, length at most `t.max_len`
/// and entries below `t.max_val`.
pub fn enumerate_seq(t: &Truncation) -> Vec<SeqCondition> {
    let pool: Vec<Index> = t.indices.iter().copied().collect();
    let mut out = Vec::new();
    for dom in subsets(&pool) {
        if dom.is_empty() {
            out.push(SeqCondition::empty());
            continue;
        }
        for n in 0..=t.max_len {
            let mut odo = Odometer::new(dom.len() * n, t.max_val);
            while let Some(cells) = odo.current() {
                let entries = dom
                    .iter()
                    .enumerate()
                    .map(|(k, &a)| (a, cells[k * n..(k + 1) * n].to_vec()))
                    .collect();
                out.push(SeqCondition::from_parts_unchecked(entries, n));
                odo.advance();
            }
        }
    }
    out
}

/// Every condition `q ≤ base` with domain inside `pool`, length at most
/// `max_len` and new entries below `max_val`. Generated by extending `base`
/// directly, then filtered through `seq_leq`.
pub fn enumerate_extensions(
    mode: Mode,
    base: &SeqCondition,
    pool: &BTreeSet<Index>,
    max_len: usize,
    max_val: u32,
) -> Vec<SeqCondition> {
    let mut out = Vec::new();
    let extra: Vec<Index> = pool.iter().copied().filter(|a| !base.contains(*a)).collect();
    if base.entries.keys().any(|a| !pool.contains(a)) {
        return out;
    }
    for add in subsets(&extra) {
        let mut dom: Vec<Index> = base.entries.keys().copied().chain(add.iter().copied()).collect();
        dom.sort_unstable();
        if dom.is_empty() {
            out.push(SeqCondition::empty());
            continue;
        }
        let lo = if base.is_empty() { 0 } else { base.n };
        for n in lo..=max_len {
            let free: usize = dom.iter().map(|&a| if base.contains(a) { n - base.n } else { n }).sum();
            let mut odo = Odometer::new(free, max_val);
            while let Some(cells) = odo.current() {
                let mut at = 0;
                let mut entries = BTreeMap::new();
                for &a in &dom {
                    let mut s = base.get(a).map(<[u32]>::to_vec).unwrap_or_default();
                    let need = n - s.len();
                    s.extend_from_slice(&cells[at..at + need]);
                    at += need;
                    entries.insert(a, s);
                }
                let q = SeqCondition::from_parts_unchecked(entries, n);
                if seq_leq(mode, base, &q) {
                    out.push(q);
                }
                odo.advance();
            }
        }
    }
    out
}

/// Appends `count` random columns obeying `mode` across the whole domain.
pub fn add_columns<R: Rng + ?Sized>(
    mode: Mode,
    p: &SeqCondition,
    count: usize,
    max_val: u32,
    rng: &mut R,
) -> SeqCondition {
    if p.is_empty() {
        return p.clone();
    }
    let max_val = max_val.max(1);
    let mut entries = p.entries.clone();
    let k = entries.len() as u32;
    for _ in 0..count {
        match mode {
            Mode::Scale => {
                let mut v = rng.gen_range(0..max_val);
                for s in entries.values_mut() {
                    s.push(v);
                    v += rng.gen_range(0..2);
                }
            }
            Mode::EvDiff => {
                let mut used = BTreeSet::new();
                for s in entries.values_mut() {
                    let v = loop {
                        let v = rng.gen_range(0..max_val + k);
                        if !used.contains(&v) {
                            break v;
                        }
                    };
                    used.insert(v);
                    s.push(v);
                }
            }
        }
    }
    SeqCondition::from_parts_unchecked(entries, p.n + count)
}

/// Adds `alpha` with a random sequence of the current length. No column rule
/// applies: a new index does not add columns.
pub fn add_index<R: Rng + ?Sized>(p: &SeqCondition, alpha: Index, max_val: u32, rng: &mut R) -> SeqCondition {
    let mut entries = p.entries.clone();
    let s = (0..p.n).map(|_| rng.gen_range(0..max_val.max(1))).collect();
    entries.insert(alpha, s);
    SeqCondition::from_parts_unchecked(entries, p.n)
}

/// A random strict strengthening: either a new index (preferring `pool`) or
/// one new column.
pub fn random_extension<R: Rng + ?Sized>(
    mode: Mode,
    p: &SeqCondition,
    pool: &[Index],
    max_val: u32,
    rng: &mut R,
) -> SeqCondition {
    let free: Vec<Index> = pool.iter().copied().filter(|&a| !p.contains(a)).collect();
    let grow_domain = p.is_empty() || (!free.is_empty() && rng.gen_bool(0.4));
    if grow_domain {
        let alpha = if free.is_empty() {
            p.entries.keys().next_back().map_or(0, |a| a + 1)
        } else {
            free[rng.gen_range(0..free.len())]
        };
        add_index(p, alpha, max_val, rng)
    } else {
        add_columns(mode, p, 1, max_val, rng)
    }
}

#[cfg(test)]
pub(crate) fn sc(entries: &[(Index, &[u32])]) -> SeqCondition {
    SeqCondition::from_entries(entries.iter().map(|&(a, s)| (a, s.to_vec()))).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::{enumerate_universe, search_common_lower_bound, DEFAULT_UNIVERSE_CAP};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn canonical_empty_condition() {
        let p = SeqCondition::new(BTreeMap::new(), 4).unwrap();
        assert_eq!(p.n(), 0);
        assert_eq!(p, SeqCondition::empty());
        assert!(SeqCondition::from_entries([(0, alloc::vec![1]), (1, alloc::vec![1, 2])]).is_err());
    }

    #[test]
    fn universe_with_no_indices_is_the_top_only() {
        let u = enumerate_universe(&SeqPoset::SCALE, &Truncation::new([], 2, 2), DEFAULT_UNIVERSE_CAP).unwrap();
        assert_eq!(u, [SeqCondition::empty()]);
    }

    #[test]
    fn universe_of_one_index_length_one() {
        // ∅, {0↦()}, {0↦(0)}, {0↦(1)}: the length-0 condition on a nonempty
        // domain is a genuine condition distinct from the top
        let u = enumerate_universe(&SeqPoset::SCALE, &Truncation::new([0], 1, 2), DEFAULT_UNIVERSE_CAP).unwrap();
        assert_eq!(u.len(), 4);
        assert!(u.contains(&sc(&[(0, &[])])));
        assert!(u.contains(&sc(&[(0, &[0])])));
        assert!(u.contains(&sc(&[(0, &[1])])));
    }

    #[test]
    fn universe_size_formula_matches_enumeration() {
        for t in [
            Truncation::new([0, 1, 2], 2, 3),
            Truncation::new([0, 4], 3, 2),
            Truncation::new([7], 1, 5),
        ] {
            let u = enumerate_seq(&t);
            assert_eq!(u.len() as u128, seq_universe_size(&t));
            let set: BTreeSet<_> = u.iter().collect();
            assert_eq!(set.len(), u.len());
        }
    }

    #[test]
    fn overflow_names_the_size() {
        let t = Truncation::new([0, 1, 2], 2, 3);
        let err = enumerate_universe(&SeqPoset::SCALE, &t, 100).unwrap_err();
        assert_eq!(err, crate::poset::EnumerationError::Overflow { size: 1070, cap: 100 });
    }

    #[test]
    fn universe_is_downward_closed_in_its_bounds() {
        let t = Truncation::new([0, 1], 2, 2);
        for mode in [Mode::Scale, Mode::EvDiff] {
            let u = enumerate_seq(&t);
            let set: BTreeSet<_> = u.iter().cloned().collect();
            for p in &u {
                // every weaker condition with smaller domain and length
                for d in subsets(&p.entries.keys().copied().collect::<Vec<_>>()) {
                    for n in 0..=p.n {
                        let entries = d.iter().map(|&a| (a, p.get(a).unwrap()[..n].to_vec())).collect();
                        let q = SeqCondition::from_parts_unchecked(entries, n);
                        if seq_leq(mode, &q, p) {
                            assert!(set.contains(&q));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn exact_compatibility_agrees_with_bounded_search() {
        // values up to 4 leave room for the fresh values the distinctness
        // rule may need on two indices
        let t = Truncation::new([0, 1], 2, 2);
        let big = Truncation::new([0, 1], 3, 3);
        let u = enumerate_seq(&t);
        let search_space = enumerate_seq(&big);
        for mode in [Mode::Scale, Mode::EvDiff] {
            let poset = SeqPoset { mode };
            for p in &u {
                for q in &u {
                    let exact = seq_common_lower_bound(mode, p, q);
                    if let Some(r) = &exact {
                        assert!(seq_leq(mode, p, r) && seq_leq(mode, q, r), "{p:?} {q:?} {r:?}");
                    }
                    let searched = search_common_lower_bound(&poset, p, q, &search_space);
                    assert_eq!(exact.is_some(), searched.is_some(), "{mode:?} {p:?} {q:?}");
                }
            }
        }
    }

    #[test]
    fn extensions_match_filtered_universe() {
        let pool: BTreeSet<Index> = [0, 1].into();
        let u = enumerate_seq(&Truncation::new([0, 1], 2, 2));
        for mode in [Mode::Scale, Mode::EvDiff] {
            for base in &u {
                let mut ext = enumerate_extensions(mode, base, &pool, 2, 2);
                ext.sort();
                let mut expected: Vec<_> = u.iter().filter(|q| seq_leq(mode, base, q)).cloned().collect();
                expected.sort();
                assert_eq!(ext, expected, "{mode:?} {base:?}");
            }
        }
    }

    #[test]
    fn pad_to_strengthens_within_the_domain() {
        let p = sc(&[(0, &[1]), (2, &[1])]);
        for mode in [Mode::Scale, Mode::EvDiff] {
            let q = pad_to(mode, &p, 3);
            assert_eq!(q.n(), 3);
            assert_eq!(q.domain(), p.domain());
            assert!(seq_leq(mode, &p, &q));
        }
        assert_eq!(pad_to(Mode::Scale, &SeqCondition::empty(), 3), SeqCondition::empty());
    }

    #[test]
    fn random_extensions_are_strict() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for mode in [Mode::Scale, Mode::EvDiff] {
            let mut p = SeqCondition::empty();
            for _ in 0..40 {
                let q = random_extension(mode, &p, &[0, 1, 2, 3], 3, &mut rng);
                assert!(seq_leq(mode, &p, &q));
                assert_ne!(p, q);
                assert!(column_clause_holds(mode, &p, &q));
                p = q;
            }
        }
    }

    #[test]
    fn smallest_unused_skips_taken_values() {
        assert_eq!(smallest_unused(&BTreeSet::new()), 0);
        assert_eq!(smallest_unused(&[0, 1, 3].into()), 2);
        assert_eq!(smallest_unused(&[1, 2].into()), 0);
    }
}
