//! Cohen conditions: finite partial functions from indices to `{0, 1}`,
//! ordered by extension.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use rand::Rng;

use crate::poset::{binomial, saturating_pow, subsets, Enumerable, Index, Odometer, Poset, Truncation};

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CohenCondition {
    entries: BTreeMap<Index, bool>,
}

impl CohenCondition {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_bits(bits: impl IntoIterator<Item = (Index, bool)>) -> Self {
        CohenCondition {
            entries: bits.into_iter().collect(),
        }
    }

    pub fn entries(&self) -> &BTreeMap<Index, bool> {
        &self.entries
    }

    pub fn get(&self, alpha: Index) -> Option<bool> {
        self.entries.get(&alpha).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn restrict(&self, j: &BTreeSet<Index>) -> Self {
        CohenCondition {
            entries: self
                .entries
                .iter()
                .filter(|(a, _)| j.contains(a))
                .map(|(&a, &b)| (a, b))
                .collect(),
        }
    }

    pub fn with(mut self, alpha: Index, bit: bool) -> Self {
        self.entries.insert(alpha, bit);
        self
    }
}

/// Whether `p1` extends `p0` (that is, `p1 ≤ p0`).
pub fn cohen_leq(p0: &CohenCondition, p1: &CohenCondition) -> bool {
    p0.entries.iter().all(|(a, b)| p1.entries.get(a) == Some(b))
}

/// Agreement on the common domain; the union is then a common lower bound.
pub fn cohen_compatible(p0: &CohenCondition, p1: &CohenCondition) -> bool {
    p0.entries.iter().all(|(a, b)| p1.entries.get(a).is_none_or(|c| c == b))
}

pub fn cohen_union(p0: &CohenCondition, p1: &CohenCondition) -> Option<CohenCondition> {
    if !cohen_compatible(p0, p1) {
        return None;
    }
    let mut entries = p0.entries.clone();
    entries.extend(p1.entries.iter().map(|(&a, &b)| (a, b)));
    Some(CohenCondition { entries })
}

#[derive(Clone, Copy, Debug, Default)]
pub struct CohenPoset;

impl Poset for CohenPoset {
    type Cond = CohenCondition;

    fn le(&self, p: &CohenCondition, q: &CohenCondition) -> bool {
        cohen_leq(q, p)
    }

    fn top(&self) -> CohenCondition {
        CohenCondition::empty()
    }

    fn common_lower_bound(&self, p: &CohenCondition, q: &CohenCondition) -> Option<CohenCondition> {
        cohen_union(p, q)
    }

    fn compatible(&self, p: &CohenCondition, q: &CohenCondition) -> bool {
        cohen_compatible(p, q)
    }
}

/// Entries are always bits; `max_len` and `max_val` of the truncation are ignored.
impl Enumerable for CohenPoset {
    fn universe_size(&self, t: &Truncation) -> u128 {
        // each index is absent, 0 or 1
        saturating_pow(3, t.indices.len())
    }

    fn enumerate_all(&self, t: &Truncation) -> Vec<CohenCondition> {
        let pool: Vec<Index> = t.indices.iter().copied().collect();
        let mut out = Vec::new();
        for dom in subsets(&pool) {
            let mut odo = Odometer::new(dom.len(), 2);
            while let Some(bits) = odo.current() {
                out.push(CohenCondition::from_bits(
                    dom.iter().zip(bits).map(|(&a, &b)| (a, b == 1)),
                ));
                odo.advance();
            }
        }
        debug_assert_eq!(out.len() as u128, {
            let m = pool.len();
            (0..=m).map(|k| binomial(m, k) << k).sum::<u128>()
        });
        out
    }
}

/// Adds one undecided index, preferring `pool`, falling back past the largest
/// index in use.
pub fn random_extension<R: Rng + ?Sized>(p: &CohenCondition, pool: &[Index], rng: &mut R) -> CohenCondition {
    let free: Vec<Index> = pool.iter().copied().filter(|a| !p.entries.contains_key(a)).collect();
    let alpha = if free.is_empty() {
        p.entries.keys().next_back().map_or(0, |a| a + 1)
    } else {
        free[rng.gen_range(0..free.len())]
    };
    p.clone().with(alpha, rng.gen_bool(0.5))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::{enumerate_universe, search_common_lower_bound, DEFAULT_UNIVERSE_CAP};

    fn c(bits: &[(Index, u8)]) -> CohenCondition {
        CohenCondition::from_bits(bits.iter().map(|&(a, b)| (a, b == 1)))
    }

    #[test]
    fn leq_examples() {
        assert!(cohen_leq(&c(&[]), &c(&[(0, 1)])));
        assert!(!cohen_leq(&c(&[(0, 1)]), &c(&[(0, 0)])));
        assert!(cohen_leq(&c(&[(0, 1)]), &c(&[(0, 1), (3, 0)])));
    }

    #[test]
    fn compatible_examples() {
        assert!(cohen_compatible(&c(&[(0, 1)]), &c(&[(1, 0)])));
        assert!(!cohen_compatible(&c(&[(0, 1)]), &c(&[(0, 0)])));
        let (p, q) = (c(&[(0, 1), (2, 0)]), c(&[(2, 0), (5, 1)]));
        assert!(cohen_compatible(&p, &q));
        let t = Truncation::new([0, 1, 2, 5], 1, 2);
        let u = enumerate_universe(&CohenPoset, &t, DEFAULT_UNIVERSE_CAP).unwrap();
        assert!(search_common_lower_bound(&CohenPoset, &p, &q, &u).is_some());
    }

    #[test]
    fn universe_of_two_indices_has_nine_conditions() {
        let t = Truncation::new([0, 1], 1, 2);
        let u = enumerate_universe(&CohenPoset, &t, DEFAULT_UNIVERSE_CAP).unwrap();
        assert_eq!(u.len(), 9);
        let distinct: BTreeSet<_> = u.iter().cloned().collect();
        assert_eq!(distinct.len(), 9);
    }

    #[test]
    fn compatibility_matches_union_being_a_function() {
        let t = Truncation::new([0, 1, 2], 1, 2);
        let u = enumerate_universe(&CohenPoset, &t, DEFAULT_UNIVERSE_CAP).unwrap();
        for p in &u {
            for q in &u {
                let mut merged: Vec<(Index, bool)> = p
                    .entries
                    .iter()
                    .chain(q.entries.iter())
                    .map(|(&a, &b)| (a, b))
                    .collect();
                merged.sort();
                merged.dedup();
                let is_function = merged.windows(2).all(|w| w[0].0 != w[1].0);
                assert_eq!(cohen_compatible(p, q), is_function);
                assert_eq!(search_common_lower_bound(&CohenPoset, p, q, &u).is_some(), is_function);
            }
        }
    }
}
