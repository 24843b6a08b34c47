//! The one-step residue poset of the iteration presentation, evaluated
//! against a concrete family of functions, together with the flat
//! presentation of the dense subset that is isomorphic to the sequence poset.
//!
//! A [`QCondition`] `⟨s, a⟩` is a finite sequence with a finite side set of
//! indices. Strengthening `⟨s0, a0⟩` to `⟨s1, a1⟩` extends both, and every new
//! position `i` of `s1` must avoid `f_γ(i)` (distinctness mode) or dominate it
//! (scale mode) for each `γ ∈ a0`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use thiserror::Error;

use crate::poset::{subsets, Index, Odometer, Poset};
use crate::seq::{ConditionError, Mode, SeqCondition};

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QCondition {
    pub s: Vec<u32>,
    pub a: BTreeSet<Index>,
}

impl QCondition {
    pub fn new(s: impl Into<Vec<u32>>, a: impl IntoIterator<Item = Index>) -> Self {
        QCondition {
            s: s.into(),
            a: a.into_iter().collect(),
        }
    }
}

/// A concrete family of functions: explicit tables of a common length `len`,
/// then `f_γ(i) = γ` from `len` on. Distinct indices therefore differ at every
/// position past the tables. An index without a table follows the tail rule
/// everywhere.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Environment {
    len: usize,
    tables: BTreeMap<Index, Vec<u32>>,
}

impl Environment {
    pub fn new(len: usize, tables: BTreeMap<Index, Vec<u32>>) -> Result<Self, ConditionError> {
        for (&index, t) in &tables {
            if t.len() != len {
                return Err(ConditionError::LengthMismatch {
                    index,
                    expected: len,
                    found: t.len(),
                });
            }
        }
        Ok(Environment { len, tables })
    }

    pub fn tails_only() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn tables(&self) -> &BTreeMap<Index, Vec<u32>> {
        &self.tables
    }

    #[inline]
    pub fn value(&self, gamma: Index, i: usize) -> u32 {
        if i < self.len {
            if let Some(t) = self.tables.get(&gamma) {
                return t[i];
            }
        }
        gamma
    }

    /// Least `m` such that `f_γ(i) ≠ f_δ(i)` for every `i ≥ m` and `δ ∈ others ∖ {γ}`.
    pub fn collision_bound(&self, gamma: Index, others: &BTreeSet<Index>) -> usize {
        (0..self.len)
            .rev()
            .find(|&i| {
                others
                    .iter()
                    .any(|&d| d != gamma && self.value(d, i) == self.value(gamma, i))
            })
            .map_or(0, |i| i + 1)
    }
}

#[inline]
fn side_ok(mode: Mode, v: u32, f: u32) -> bool {
    match mode {
        Mode::EvDiff => v != f,
        Mode::Scale => v >= f,
    }
}

/// Whether `q1 ≤ q0`.
pub fn q_leq(q0: &QCondition, q1: &QCondition, env: &Environment, mode: Mode) -> bool {
    q1.s.starts_with(&q0.s)
        && q0.a.is_subset(&q1.a)
        && (q0.s.len()..q1.s.len()).all(|i| q0.a.iter().all(|&g| side_ok(mode, q1.s[i], env.value(g, i))))
}

/// Exact compatibility: the sequences are comparable and the longer one obeys
/// the shorter one's side set on the positions it adds. The witness is then
/// `⟨longer s, a0 ∪ a1⟩`.
pub fn q_compatible(q0: &QCondition, q1: &QCondition, env: &Environment, mode: Mode) -> bool {
    q_common_lower_bound(q0, q1, env, mode).is_some()
}

pub fn q_common_lower_bound(q0: &QCondition, q1: &QCondition, env: &Environment, mode: Mode) -> Option<QCondition> {
    let (short, long) = if q0.s.len() <= q1.s.len() { (q0, q1) } else { (q1, q0) };
    if !long.s.starts_with(&short.s) {
        return None;
    }
    let ok = (short.s.len()..long.s.len()).all(|i| short.a.iter().all(|&g| side_ok(mode, long.s[i], env.value(g, i))));
    ok.then(|| QCondition {
        s: long.s.clone(),
        a: q0.a.union(&q1.a).copied().collect(),
    })
}

/// The residue poset over a fixed environment.
#[derive(Clone, Copy, Debug)]
pub struct QPoset<'e> {
    pub env: &'e Environment,
    pub mode: Mode,
}

impl Poset for QPoset<'_> {
    type Cond = QCondition;

    fn le(&self, p: &QCondition, q: &QCondition) -> bool {
        q_leq(q, p, self.env, self.mode)
    }

    fn top(&self) -> QCondition {
        QCondition::default()
    }

    fn common_lower_bound(&self, p: &QCondition, q: &QCondition) -> Option<QCondition> {
        q_common_lower_bound(p, q, self.env, self.mode)
    }
}

/// All `⟨s, a⟩` with `|s| ≤ max_len`, entries below `max_val`, `a ⊆ indices`.
pub fn enumerate_q(indices: &[Index], max_len: usize, max_val: u32) -> Vec<QCondition> {
    let sides: Vec<BTreeSet<Index>> = subsets(indices).map(|v| v.into_iter().collect()).collect();
    let mut out = Vec::new();
    for len in 0..=max_len {
        let mut odo = Odometer::new(len, max_val);
        while let Some(s) = odo.current() {
            for a in &sides {
                out.push(QCondition {
                    s: s.to_vec(),
                    a: a.clone(),
                });
            }
            odo.advance();
        }
    }
    out
}

/// Every environment over `indices` with tables of length at most `max_len`
/// and entries below `max_val`.
pub fn enumerate_environments(indices: &[Index], max_len: usize, max_val: u32) -> Vec<Environment> {
    let mut out = Vec::new();
    for len in 0..=max_len {
        let mut odo = Odometer::new(indices.len() * len, max_val);
        while let Some(cells) = odo.current() {
            let tables = indices
                .iter()
                .enumerate()
                .map(|(k, &g)| (g, cells[k * len..(k + 1) * len].to_vec()))
                .collect();
            out.push(Environment { len, tables });
            odo.advance();
        }
    }
    out
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeparationError {
    #[error("the first condition already extends the second; nothing separates them")]
    NotSeparable,
    #[error("side sets and sequences are nested yet the conditions are compatible; the environment is not eventually different")]
    Contradiction,
}

/// Which branch of the separation argument applied.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SeparationCase {
    /// `s1` is not an initial segment of `s0`
    Sequences,
    /// `s1 ⊆ s0` but `a1` has an index outside `a0`
    SideSets,
    /// both nested; `q0` is already incompatible with `q1`
    Nested,
}

/// Smallest value allowed at position `i` under `a`, avoiding `extra` too.
fn allowed_value(env: &Environment, a: &BTreeSet<Index>, i: usize, extra: Option<u32>) -> u32 {
    let banned: BTreeSet<u32> = a.iter().map(|&g| env.value(g, i)).chain(extra).collect();
    crate::seq::smallest_unused(&banned)
}

/// Separativity in distinctness mode: for `q0 ≰ q1`, some `q2 ≤ q0`
/// incompatible with `q1`.
pub fn separate(
    q0: &QCondition,
    q1: &QCondition,
    env: &Environment,
) -> Result<(QCondition, SeparationCase), SeparationError> {
    let mode = Mode::EvDiff;
    if q_leq(q1, q0, env, mode) {
        return Err(SeparationError::NotSeparable);
    }
    if !q0.s.starts_with(&q1.s) {
        if !q1.s.starts_with(&q0.s) {
            // the sequences already disagree somewhere
            return Ok((q0.clone(), SeparationCase::Sequences));
        }
        // s0 is a proper initial segment of s1: step off s1 at the next position
        let i = q0.s.len();
        let mut s2 = q0.s.clone();
        s2.push(allowed_value(env, &q0.a, i, Some(q1.s[i])));
        return Ok((QCondition { s: s2, a: q0.a.clone() }, SeparationCase::Sequences));
    }
    if let Some(&gamma) = q1.a.iter().find(|g| !q0.a.contains(g)) {
        // hit f_γ at a position past s0 and past every collision with a0
        let m = env.collision_bound(gamma, &q0.a);
        let target = m.max(q0.s.len());
        let mut s2 = q0.s.clone();
        for i in q0.s.len()..target {
            s2.push(allowed_value(env, &q0.a, i, None));
        }
        s2.push(env.value(gamma, target));
        return Ok((QCondition { s: s2, a: q0.a.clone() }, SeparationCase::SideSets));
    }
    if q_compatible(q0, q1, env, mode) {
        return Err(SeparationError::Contradiction);
    }
    Ok((q0.clone(), SeparationCase::Nested))
}

/// Brute-force search for a common extension of `q0` and `q1`: every sequence
/// extending either one by at most `depth` positions with entries below
/// `max_val`, paired with side set `a0 ∪ a1`.
pub fn search_common_extension(
    q0: &QCondition,
    q1: &QCondition,
    env: &Environment,
    mode: Mode,
    depth: usize,
    max_val: u32,
) -> Option<QCondition> {
    let a: BTreeSet<Index> = q0.a.union(&q1.a).copied().collect();
    for base in [&q0.s, &q1.s] {
        for extra in 0..=depth {
            let mut odo = Odometer::new(extra, max_val);
            while let Some(tail) = odo.current() {
                let mut s = base.clone();
                s.extend_from_slice(tail);
                let q3 = QCondition { s, a: a.clone() };
                if q_leq(q0, &q3, env, mode) && q_leq(q1, &q3, env, mode) {
                    return Some(q3);
                }
                odo.advance();
            }
        }
    }
    None
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WitnessError {
    #[error("index {0} occurs in a side set of the family or of the condition")]
    IndexOccurs(Index),
    #[error("a member of the family lies below the witness")]
    MemberBelow,
}

/// Adds to `q`'s side set an index `γ` that no member of `family` mentions; no
/// member can then lie below the result.
pub fn non_dense_witness(
    family: &[QCondition],
    gamma: Index,
    q: &QCondition,
    env: &Environment,
) -> Result<QCondition, WitnessError> {
    if q.a.contains(&gamma) || family.iter().any(|e| e.a.contains(&gamma)) {
        return Err(WitnessError::IndexOccurs(gamma));
    }
    let mut w = q.clone();
    w.a.insert(gamma);
    if family.iter().any(|e| q_leq(&w, e, env, Mode::EvDiff)) {
        return Err(WitnessError::MemberBelow);
    }
    Ok(w)
}

/// A condition of the dense subset of the iteration: at each index `β` a
/// sequence of the common length `n` and the side set `dom ∩ β`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FlatIterCondition {
    n: usize,
    entries: BTreeMap<Index, QCondition>,
}

impl FlatIterCondition {
    pub fn new(entries: BTreeMap<Index, QCondition>, n: usize) -> Result<Self, ConditionError> {
        let dom: Vec<Index> = entries.keys().copied().collect();
        for (k, (&b, q)) in entries.iter().enumerate() {
            if q.s.len() != n {
                return Err(ConditionError::LengthMismatch {
                    index: b,
                    expected: n,
                    found: q.s.len(),
                });
            }
            if !q.a.iter().copied().eq(dom[..k].iter().copied()) {
                return Err(ConditionError::SideSetMismatch { index: b });
            }
        }
        let n = if entries.is_empty() { 0 } else { n };
        Ok(FlatIterCondition { n, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &BTreeMap<Index, QCondition> {
        &self.entries
    }

    /// The environment this condition decides: each coordinate's sequence is
    /// the known part of its function.
    pub fn decided_environment(&self) -> Environment {
        Environment {
            len: self.n,
            tables: self.entries.iter().map(|(&b, q)| (b, q.s.clone())).collect(),
        }
    }
}

/// Whether `r1 ≤ r0` in the iteration, each coordinate compared in its residue
/// poset with the earlier functions read off `r1`.
pub fn flat_leq(r0: &FlatIterCondition, r1: &FlatIterCondition, mode: Mode) -> bool {
    flat_leq_in(r0, r1, &r1.decided_environment(), mode)
}

/// [`flat_leq`] with `r1`'s decided environment supplied by the caller.
pub fn flat_leq_in(r0: &FlatIterCondition, r1: &FlatIterCondition, env1: &Environment, mode: Mode) -> bool {
    r0.n <= r1.n
        && r0.entries.iter().all(|(b, q0)| match r1.entries.get(b) {
            Some(q1) => q_leq(q0, q1, env1, mode),
            None => false,
        })
}

pub fn flatten(r: &FlatIterCondition) -> SeqCondition {
    SeqCondition::from_parts_unchecked(r.entries.iter().map(|(&b, q)| (b, q.s.clone())).collect(), r.n)
}

pub fn unflatten(p: &SeqCondition) -> FlatIterCondition {
    let mut entries = BTreeMap::new();
    let mut below = BTreeSet::new();
    for (&b, s) in p.entries() {
        entries.insert(
            b,
            QCondition {
                s: s.clone(),
                a: below.clone(),
            },
        );
        below.insert(b);
    }
    FlatIterCondition { n: p.n(), entries }
}

#[derive(Clone, Copy, Debug)]
pub struct FlatPoset {
    pub mode: Mode,
}

impl Poset for FlatPoset {
    type Cond = FlatIterCondition;

    fn le(&self, p: &FlatIterCondition, q: &FlatIterCondition) -> bool {
        flat_leq(q, p, self.mode)
    }

    fn top(&self) -> FlatIterCondition {
        FlatIterCondition::default()
    }

    fn common_lower_bound(&self, p: &FlatIterCondition, q: &FlatIterCondition) -> Option<FlatIterCondition> {
        crate::seq::seq_common_lower_bound(self.mode, &flatten(p), &flatten(q)).map(|r| unflatten(&r))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::Truncation;
    use crate::seq::{enumerate_seq, sc, seq_leq};

    fn q(s: &[u32], a: &[Index]) -> QCondition {
        QCondition::new(s.to_vec(), a.iter().copied())
    }

    fn env(len: usize, tables: &[(Index, &[u32])]) -> Environment {
        Environment::new(len, tables.iter().map(|&(g, t)| (g, t.to_vec())).collect()).unwrap()
    }

    #[test]
    fn tail_rule() {
        let e = env(2, &[(0, &[5, 5]), (3, &[1, 0])]);
        assert_eq!(e.value(0, 1), 5);
        assert_eq!(e.value(0, 2), 0);
        assert_eq!(e.value(3, 7), 3);
        assert_eq!(e.value(9, 0), 9);
        assert_eq!(e.collision_bound(0, &[3].into()), 0);
        let e = env(2, &[(0, &[4, 1]), (1, &[4, 1])]);
        assert_eq!(e.collision_bound(0, &[1].into()), 2);
    }

    #[test]
    fn leq_examples() {
        let e = env(1, &[(0, &[7])]);
        assert!(q_leq(&q(&[], &[]), &q(&[3, 1], &[0, 1]), &e, Mode::EvDiff));
        assert!(!q_leq(&q(&[], &[0]), &q(&[7], &[0]), &e, Mode::EvDiff));
        // f_3 is 3 from position 1 on
        let e3 = env(1, &[(3, &[0])]);
        assert!(!q_leq(&q(&[1], &[3]), &q(&[1, 3], &[3, 2]), &e3, Mode::EvDiff));
        assert!(q_leq(&q(&[1], &[3]), &q(&[1, 3], &[3, 2]), &e3, Mode::Scale));
    }

    #[test]
    fn compatible_examples() {
        let e = env(1, &[(0, &[4])]);
        assert!(q_compatible(&q(&[], &[]), &q(&[4], &[0]), &e, Mode::EvDiff));
        assert!(!q_compatible(&q(&[0], &[]), &q(&[1], &[]), &e, Mode::EvDiff));
        assert!(!q_compatible(&q(&[], &[0]), &q(&[4], &[]), &e, Mode::EvDiff));
    }

    #[test]
    fn separate_examples() {
        let e = Environment::tails_only();
        let (q2, case) = separate(&q(&[5], &[]), &q(&[6], &[]), &e).unwrap();
        assert_eq!((q2.clone(), case), (q(&[5], &[]), SeparationCase::Sequences));
        assert!(!q_compatible(&q2, &q(&[6], &[]), &e, Mode::EvDiff));

        // f_2 is the constant 2 past an empty table
        let (q2, case) = separate(&q(&[], &[]), &q(&[], &[2]), &e).unwrap();
        assert_eq!(case, SeparationCase::SideSets);
        assert_eq!(q2, q(&[2], &[]));
        assert!(!q_compatible(&q2, &q(&[], &[2]), &e, Mode::EvDiff));

        // q0 extends q1 here, so there is nothing to separate
        let e = env(2, &[(0, &[0, 2])]);
        let (q0, q1) = (q(&[1, 2], &[0]), q(&[1], &[0]));
        assert!(!q_leq(&q1, &q0, &e, Mode::EvDiff));
        assert!(!q_leq(&q0, &q1, &e, Mode::EvDiff));
        let (q2, case) = separate(&q0, &q1, &e).unwrap();
        assert_eq!(case, SeparationCase::Nested);
        assert_eq!(q2, q0);
        let ok = q(&[1, 3], &[0]);
        assert_eq!(separate(&ok, &q1, &e), Err(SeparationError::NotSeparable));
    }

    #[test]
    fn separate_steps_off_a_longer_sequence() {
        let e = env(2, &[(0, &[0, 0])]);
        let (q2, case) = separate(&q(&[], &[0]), &q(&[1, 1], &[]), &e).unwrap();
        assert_eq!(case, SeparationCase::Sequences);
        assert!(q_leq(&q(&[], &[0]), &q2, &e, Mode::EvDiff));
        assert!(!q_compatible(&q2, &q(&[1, 1], &[]), &e, Mode::EvDiff));
    }

    #[test]
    fn separate_past_collisions() {
        // f_0 and f_1 agree at positions 0 and 1
        let e = env(2, &[(0, &[4, 1]), (1, &[4, 1])]);
        let (q0, q1) = (q(&[], &[0]), q(&[], &[0, 1]));
        let (q2, case) = separate(&q0, &q1, &e).unwrap();
        assert_eq!(case, SeparationCase::SideSets);
        assert_eq!(q2.s.len(), 3);
        assert!(q_leq(&q0, &q2, &e, Mode::EvDiff));
        assert!(!q_compatible(&q2, &q1, &e, Mode::EvDiff));
        assert!(search_common_extension(&q2, &q1, &e, Mode::EvDiff, 2, 6).is_none());
    }

    #[test]
    fn non_dense_witness_examples() {
        let e = Environment::tails_only();
        assert_eq!(non_dense_witness(&[], 0, &q(&[], &[]), &e), Ok(q(&[], &[0])));
        let w = non_dense_witness(&[q(&[1], &[])], 5, &q(&[], &[]), &e).unwrap();
        assert_eq!(w, q(&[], &[5]));
        assert!(!q_leq(&w, &q(&[1], &[]), &e, Mode::EvDiff));
        assert_eq!(
            non_dense_witness(&[q(&[], &[1])], 1, &q(&[], &[]), &e),
            Err(WitnessError::IndexOccurs(1))
        );
    }

    #[test]
    fn flatten_examples() {
        assert_eq!(flatten(&FlatIterCondition::default()), SeqCondition::empty());
        let r = FlatIterCondition::new([(0, q(&[2], &[])), (3, q(&[4], &[0]))].into_iter().collect(), 1).unwrap();
        assert_eq!(flatten(&r), sc(&[(0, &[2]), (3, &[4])]));
        assert_eq!(unflatten(&flatten(&r)), r);
        let bad = FlatIterCondition::new([(0, q(&[2], &[])), (3, q(&[4], &[]))].into_iter().collect(), 1);
        assert_eq!(bad, Err(ConditionError::SideSetMismatch { index: 3 }));
    }

    #[test]
    fn flat_order_matches_sequence_order_small() {
        let u = enumerate_seq(&Truncation::new([0, 1], 2, 2));
        for mode in [Mode::Scale, Mode::EvDiff] {
            for p in &u {
                for p1 in &u {
                    assert_eq!(flat_leq(&unflatten(p), &unflatten(p1), mode), seq_leq(mode, p, p1));
                }
            }
        }
    }
}
