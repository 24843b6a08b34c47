//! The product of Cohen-style coordinates that completely embeds the
//! eventually-different poset: per-index sequences, per-index cutoffs, and a
//! coder on finite sequences that is one-to-one on each length.
//!
//! [`proj`] maps the dense set of [`DCondition`]s onto eventually-different
//! conditions; it is monotone, and [`lift`] pulls any strengthening of a
//! projection back to a strengthening in the dense set.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use thiserror::Error;

use crate::evdiff::evdiff_leq;
use crate::poset::{Index, Poset};
use crate::seq::{smallest_unused, ConditionError, SeqCondition};

pub type Sequence = Vec<u32>;

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RCondition {
    seqs: BTreeMap<Index, Sequence>,
    cutoffs: BTreeMap<Index, usize>,
    coder: BTreeMap<Sequence, u32>,
}

impl RCondition {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Fails if the coder repeats a value on keys of equal length.
    pub fn new(
        seqs: BTreeMap<Index, Sequence>,
        cutoffs: BTreeMap<Index, usize>,
        coder: BTreeMap<Sequence, u32>,
    ) -> Result<Self, ConditionError> {
        let r = RCondition { seqs, cutoffs, coder };
        if let Some(level) = r.non_injective_level() {
            return Err(ConditionError::CoderNotInjective { level });
        }
        Ok(r)
    }

    fn non_injective_level(&self) -> Option<usize> {
        let mut seen: BTreeSet<(usize, u32)> = BTreeSet::new();
        for (k, &v) in &self.coder {
            if !seen.insert((k.len(), v)) {
                return Some(k.len());
            }
        }
        None
    }

    pub fn seqs(&self) -> &BTreeMap<Index, Sequence> {
        &self.seqs
    }

    pub fn cutoffs(&self) -> &BTreeMap<Index, usize> {
        &self.cutoffs
    }

    pub fn coder(&self) -> &BTreeMap<Sequence, u32> {
        &self.coder
    }

    pub fn is_empty(&self) -> bool {
        self.seqs.is_empty() && self.cutoffs.is_empty() && self.coder.is_empty()
    }

    fn used_at_level(&self, level: usize) -> BTreeSet<u32> {
        self.coder
            .iter()
            .filter(|(k, _)| k.len() == level)
            .map(|(_, &v)| v)
            .collect()
    }
}

/// Whether `r1 ≤ r0`: coordinatewise extension, with cutoffs preserved exactly.
pub fn r_leq(r0: &RCondition, r1: &RCondition) -> bool {
    r0.seqs
        .iter()
        .all(|(a, s)| r1.seqs.get(a).is_some_and(|t| t.starts_with(s)))
        && r0.cutoffs.iter().all(|(a, c)| r1.cutoffs.get(a) == Some(c))
        && r0.coder.iter().all(|(k, v)| r1.coder.get(k) == Some(v))
}

/// The coordinatewise union when it exists and keeps the coder one-to-one per length.
pub fn r_common_lower_bound(r0: &RCondition, r1: &RCondition) -> Option<RCondition> {
    let mut seqs = r0.seqs.clone();
    for (&a, t) in &r1.seqs {
        match seqs.get_mut(&a) {
            Some(s) => {
                if t.starts_with(s) {
                    *s = t.clone();
                } else if !s.starts_with(t) {
                    return None;
                }
            }
            None => {
                seqs.insert(a, t.clone());
            }
        }
    }
    let mut cutoffs = r0.cutoffs.clone();
    for (&a, &c) in &r1.cutoffs {
        if *cutoffs.entry(a).or_insert(c) != c {
            return None;
        }
    }
    let mut coder = r0.coder.clone();
    for (k, &v) in &r1.coder {
        if *coder.entry(k.clone()).or_insert(v) != v {
            return None;
        }
    }
    RCondition::new(seqs, cutoffs, coder).ok()
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ProductPoset;

impl Poset for ProductPoset {
    type Cond = RCondition;

    fn le(&self, p: &RCondition, q: &RCondition) -> bool {
        r_leq(q, p)
    }

    fn top(&self) -> RCondition {
        RCondition::empty()
    }

    fn common_lower_bound(&self, p: &RCondition, q: &RCondition) -> Option<RCondition> {
        r_common_lower_bound(p, q)
    }
}

/// The first clause of the dense set that a condition breaks.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DViolation {
    #[error("index {0} has a sequence but no cutoff, or a cutoff but no sequence")]
    DomainMismatch(Index),
    #[error("sequence at index {index} has length {found}, expected {expected}")]
    LengthMismatch {
        index: Index,
        expected: usize,
        found: usize,
    },
    #[error("indices {0} and {1} carry the same sequence")]
    DuplicateSequence(Index, Index),
    #[error("cutoff {cutoff} at index {index} exceeds the common length {n}")]
    CutoffTooLarge { index: Index, cutoff: usize, n: usize },
    #[error("coder misses the prefix {0:?}")]
    CoderMissingPrefix(Sequence),
    #[error("coder key {0:?} is not a prefix of any sequence")]
    CoderExtraKey(Sequence),
}

/// Checks membership in the dense set; on success returns the common length `n_r`
/// (0 for the empty condition).
pub fn in_d(r: &RCondition) -> Result<usize, DViolation> {
    for a in r.seqs.keys() {
        if !r.cutoffs.contains_key(a) {
            return Err(DViolation::DomainMismatch(*a));
        }
    }
    for a in r.cutoffs.keys() {
        if !r.seqs.contains_key(a) {
            return Err(DViolation::DomainMismatch(*a));
        }
    }
    let n = r.seqs.values().next().map_or(0, Vec::len);
    for (&index, s) in &r.seqs {
        if s.len() != n {
            return Err(DViolation::LengthMismatch {
                index,
                expected: n,
                found: s.len(),
            });
        }
    }
    let mut by_seq: BTreeMap<&Sequence, Index> = BTreeMap::new();
    for (&a, s) in &r.seqs {
        if let Some(&b) = by_seq.get(s) {
            return Err(DViolation::DuplicateSequence(b, a));
        }
        by_seq.insert(s, a);
    }
    for (&index, &cutoff) in &r.cutoffs {
        if cutoff > n {
            return Err(DViolation::CutoffTooLarge { index, cutoff, n });
        }
    }
    let prefixes = prefix_set(r.seqs.values());
    if let Some(p) = prefixes.iter().find(|p| !r.coder.contains_key(*p)) {
        return Err(DViolation::CoderMissingPrefix(p.clone()));
    }
    if let Some(k) = r.coder.keys().find(|k| !prefixes.contains(*k)) {
        return Err(DViolation::CoderExtraKey(k.clone()));
    }
    Ok(n)
}

/// All initial segments, including the empty one and the full sequences.
fn prefix_set<'a>(seqs: impl Iterator<Item = &'a Sequence>) -> BTreeSet<Sequence> {
    let mut out = BTreeSet::new();
    for s in seqs {
        for l in 0..=s.len() {
            out.insert(s[..l].to_vec());
        }
    }
    out
}

/// A member of the dense set together with its common length.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DCondition {
    r: RCondition,
    n: usize,
}

impl DCondition {
    pub fn empty() -> Self {
        DCondition {
            r: RCondition::empty(),
            n: 0,
        }
    }

    pub fn r(&self) -> &RCondition {
        &self.r
    }

    pub fn into_r(self) -> RCondition {
        self.r
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

impl TryFrom<RCondition> for DCondition {
    type Error = DViolation;

    fn try_from(r: RCondition) -> Result<Self, DViolation> {
        let n = in_d(&r)?;
        Ok(DCondition { r, n })
    }
}

impl AsRef<RCondition> for DCondition {
    fn as_ref(&self) -> &RCondition {
        &self.r
    }
}

/// Gives every prefix of every sequence a coder value, choosing the smallest
/// value unused on that length.
fn complete_coder(coder: &mut BTreeMap<Sequence, u32>, seqs: &BTreeMap<Index, Sequence>) {
    let mut used: BTreeMap<usize, BTreeSet<u32>> = BTreeMap::new();
    for (k, &v) in coder.iter() {
        used.entry(k.len()).or_default().insert(v);
    }
    for s in seqs.values() {
        for l in 0..=s.len() {
            let key = &s[..l];
            if !coder.contains_key(key) {
                let level = used.entry(l).or_default();
                let v = smallest_unused(level);
                level.insert(v);
                coder.insert(key.to_vec(), v);
            }
        }
    }
}

/// A member of the dense set below `r`. Identity on the dense set.
///
/// Coder keys that are not prefixes of any sequence get a new index carrying
/// them; sequences are zero-padded to a common length (at least every cutoff),
/// and one extra column `0, 1, 2, ...` is added when padding left duplicates.
/// Missing cutoffs are set to the common length.
pub fn densify(r: &RCondition) -> DCondition {
    if let Ok(n) = in_d(r) {
        return DCondition { r: r.clone(), n };
    }
    let mut seqs = r.seqs.clone();
    for a in r.cutoffs.keys() {
        seqs.entry(*a).or_default();
    }
    let mut keys: Vec<&Sequence> = r.coder.keys().collect();
    keys.sort_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));
    for k in keys {
        if !seqs.values().any(|s| s.starts_with(k)) {
            let fresh = seqs.keys().next_back().map_or(0, |a| a + 1);
            seqs.insert(fresh, k.clone());
        }
    }
    let mut n = seqs.values().map(Vec::len).max().unwrap_or(0);
    n = n.max(r.cutoffs.values().copied().max().unwrap_or(0));
    for s in seqs.values_mut() {
        s.resize(n, 0);
    }
    let distinct: BTreeSet<&Sequence> = seqs.values().collect();
    if distinct.len() < seqs.len() {
        for (k, s) in seqs.values_mut().enumerate() {
            s.push(k as u32);
        }
        n += 1;
    }
    let mut cutoffs = r.cutoffs.clone();
    for a in seqs.keys() {
        cutoffs.entry(*a).or_insert(n);
    }
    let mut coder = r.coder.clone();
    complete_coder(&mut coder, &seqs);
    let r = RCondition { seqs, cutoffs, coder };
    debug_assert_eq!(in_d(&r), Ok(n));
    DCondition { r, n }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProductError {
    #[error("coder has no value for {0:?}; the condition is not in the dense set")]
    MalformedD(Sequence),
    #[error("the target does not extend the projection of the starting condition")]
    LiftPrecondition,
    #[error("coder requirements collide at {0:?}")]
    CoderCollision(Sequence),
}

/// The eventually-different condition read off a dense-set member: below the
/// cutoff of an index its sequence is copied, from the cutoff on the value is
/// the coder applied to the prefix of length `k + 1`.
pub fn proj(d: &DCondition) -> Result<SeqCondition, ProductError> {
    let r = &d.r;
    let mut entries = BTreeMap::new();
    for (&a, s) in &r.seqs {
        let cutoff = r.cutoffs.get(&a).copied().unwrap_or(0);
        let mut p = Vec::with_capacity(d.n);
        for k in 0..d.n {
            if k < cutoff {
                p.push(s[k]);
            } else {
                let key = &s[..k + 1];
                let v = r.coder.get(key).ok_or_else(|| ProductError::MalformedD(key.to_vec()))?;
                p.push(*v);
            }
        }
        entries.insert(a, p);
    }
    Ok(SeqCondition::from_parts_unchecked(entries, d.n))
}

/// Given `p1 ≤ proj(r0)`, builds `r2 ≤ r0` in the dense set whose projection
/// lies below `p1`. The result has domain `dom(p1)` and length `n_{p1} + 1`.
///
/// * old indices extend their sequence by zeros and keep their cutoff;
/// * new indices copy `p1` and end with the smallest value that keeps all
///   sequences distinct, with cutoff `n_{p1}`;
/// * the coder sends each prefix of an old sequence with length in
///   `(n_{r0}, n_{p1}]` to the matching value of `p1`, and every other prefix
///   to the smallest value free on its length.
///
/// When `p1` is empty so is `r0`, and `r0` is returned.
pub fn lift(r0: &DCondition, p1: &SeqCondition) -> Result<DCondition, ProductError> {
    let p0 = proj(r0)?;
    if !evdiff_leq(&p0, p1) {
        return Err(ProductError::LiftPrecondition);
    }
    if p1.is_empty() {
        return Ok(r0.clone());
    }
    let n1 = p1.n();
    let n2 = n1 + 1;
    let mut seqs: BTreeMap<Index, Sequence> = BTreeMap::new();
    let mut cutoffs = BTreeMap::new();
    for (&a, s) in &r0.r.seqs {
        let mut t = s.clone();
        t.resize(n2, 0);
        seqs.insert(a, t);
        cutoffs.insert(a, r0.r.cutoffs[&a]);
    }
    for (&a, s) in p1.entries() {
        if seqs.contains_key(&a) {
            continue;
        }
        let taken: BTreeSet<u32> = seqs.values().filter(|t| t[..n1] == s[..]).map(|t| t[n1]).collect();
        let mut t = s.clone();
        t.push(smallest_unused(&taken));
        seqs.insert(a, t);
        cutoffs.insert(a, n1);
    }
    let mut coder = r0.r.coder.clone();
    for (&a, t) in &r0.r.seqs {
        let target = p1.get(a).expect("dom(p0) ⊆ dom(p1)");
        let full = &seqs[&a];
        debug_assert!(full.starts_with(t));
        for l in r0.n + 1..=n1 {
            let key = full[..l].to_vec();
            let v = target[l - 1];
            if let Some(&old) = coder.get(&key) {
                if old != v {
                    return Err(ProductError::CoderCollision(key));
                }
            }
            coder.insert(key, v);
        }
    }
    complete_coder(&mut coder, &seqs);
    let r = RCondition { seqs, cutoffs, coder };
    if let Some(level) = r.non_injective_level() {
        // only reachable if p1 failed the distinctness rule that evdiff_leq checked
        return Err(ProductError::CoderCollision(vec![level as u32]));
    }
    debug_assert_eq!(in_d(&r), Ok(n2));
    Ok(DCondition { r, n: n2 })
}

/// A random valid R-condition: sequences and cutoffs on random subsets of
/// `pool`, and a coder one-to-one per length on random short keys.
pub fn random_r<R: Rng + ?Sized>(pool: &[Index], max_len: usize, max_val: u32, rng: &mut R) -> RCondition {
    let max_val = max_val.max(1);
    let mut seqs = BTreeMap::new();
    let mut cutoffs = BTreeMap::new();
    for &a in pool {
        if rng.gen_bool(0.6) {
            let len = rng.gen_range(0..=max_len);
            seqs.insert(a, (0..len).map(|_| rng.gen_range(0..max_val)).collect());
        }
        if rng.gen_bool(0.4) {
            cutoffs.insert(a, rng.gen_range(0..=max_len));
        }
    }
    let mut r = RCondition {
        seqs,
        cutoffs,
        coder: BTreeMap::new(),
    };
    for _ in 0..rng.gen_range(0..4) {
        let len = rng.gen_range(0..=max_len);
        let key: Sequence = (0..len).map(|_| rng.gen_range(0..max_val)).collect();
        if r.coder.contains_key(&key) {
            continue;
        }
        let used = r.used_at_level(len);
        let v = rng.gen_range(0..max_val + used.len() as u32);
        if !used.contains(&v) {
            r.coder.insert(key, v);
        }
    }
    r
}

/// A random strict strengthening inside R.
pub fn random_r_extension<R: Rng + ?Sized>(r: &RCondition, pool: &[Index], max_val: u32, rng: &mut R) -> RCondition {
    let max_val = max_val.max(1);
    let mut out = r.clone();
    let free: Vec<Index> = pool.iter().copied().filter(|a| !r.seqs.contains_key(a)).collect();
    let uncut: Vec<Index> = r.seqs.keys().copied().filter(|a| !r.cutoffs.contains_key(a)).collect();
    match rng.gen_range(0..4) {
        0 if !free.is_empty() => {
            out.seqs.insert(free[rng.gen_range(0..free.len())], Vec::new());
        }
        1 if !uncut.is_empty() => {
            let a = uncut[rng.gen_range(0..uncut.len())];
            let len = r.seqs[&a].len();
            out.cutoffs.insert(a, rng.gen_range(0..=len));
        }
        2 if !r.seqs.is_empty() => {
            let missing: Vec<Sequence> = prefix_set(r.seqs.values())
                .into_iter()
                .filter(|k| !r.coder.contains_key(k))
                .collect();
            if let Some(k) = missing.first() {
                let v = smallest_unused(&r.used_at_level(k.len()));
                out.coder.insert(k.clone(), v);
            } else {
                return random_r_extension(r, pool, max_val, rng);
            }
        }
        _ => {
            if r.seqs.is_empty() {
                let a = free.first().copied().unwrap_or(0);
                out.seqs.insert(a, vec![rng.gen_range(0..max_val)]);
            } else {
                let keys: Vec<Index> = r.seqs.keys().copied().collect();
                let a = keys[rng.gen_range(0..keys.len())];
                out.seqs.get_mut(&a).unwrap().push(rng.gen_range(0..max_val));
            }
        }
    }
    out
}

/// A random member of the dense set: [`densify`] of a [`random_r`].
pub fn random_d<R: Rng + ?Sized>(pool: &[Index], max_len: usize, max_val: u32, rng: &mut R) -> DCondition {
    densify(&random_r(pool, max_len, max_val, rng))
}

/// Every member of the dense set with domain inside `pool`, common length at
/// most `max_len`, and sequence entries and coder values below `max_val`.
pub fn enumerate_d(pool: &[Index], max_len: usize, max_val: u32) -> Vec<DCondition> {
    let mut out = Vec::new();
    out.push(DCondition::empty());
    for dom in crate::poset::subsets(pool) {
        if dom.is_empty() {
            continue;
        }
        for n in 0..=max_len {
            let mut odo = crate::poset::Odometer::new(dom.len() * n, max_val);
            while let Some(cells) = odo.current() {
                let seqs: BTreeMap<Index, Sequence> = dom
                    .iter()
                    .enumerate()
                    .map(|(k, &a)| (a, cells[k * n..(k + 1) * n].to_vec()))
                    .collect();
                odo.advance();
                let distinct: BTreeSet<&Sequence> = seqs.values().collect();
                if distinct.len() < seqs.len() {
                    continue;
                }
                let prefixes: Vec<Sequence> = prefix_set(seqs.values()).into_iter().collect();
                let mut cut_odo = crate::poset::Odometer::new(dom.len(), n as u32 + 1);
                while let Some(cuts) = cut_odo.current() {
                    let cutoffs: BTreeMap<Index, usize> =
                        dom.iter().zip(cuts).map(|(&a, &c)| (a, c as usize)).collect();
                    cut_odo.advance();
                    for coder in injective_coders(&prefixes, max_val) {
                        out.push(DCondition {
                            r: RCondition {
                                seqs: seqs.clone(),
                                cutoffs: cutoffs.clone(),
                                coder,
                            },
                            n,
                        });
                    }
                }
            }
        }
    }
    out
}

/// Coders on exactly `keys` that are one-to-one per length, values below `max_val`.
fn injective_coders(keys: &[Sequence], max_val: u32) -> Vec<BTreeMap<Sequence, u32>> {
    let mut acc = vec![BTreeMap::new()];
    for key in keys {
        let mut next = Vec::new();
        for partial in &acc {
            let used: BTreeSet<u32> = partial
                .iter()
                .filter(|(k, _): &(&Sequence, &u32)| k.len() == key.len())
                .map(|(_, &v)| v)
                .collect();
            for v in 0..max_val {
                if !used.contains(&v) {
                    let mut m = partial.clone();
                    m.insert(key.clone(), v);
                    next.push(m);
                }
            }
        }
        acc = next;
    }
    acc
}

/// Every `r0 ≥ d` that is itself in the dense set. Such `r0` is fixed by its
/// domain and length: sequences are prefixes of `d`'s, cutoffs are copied,
/// and the coder is `d`'s restricted to the prefixes.
pub fn d_ancestors(d: &DCondition) -> Vec<DCondition> {
    let dom: Vec<Index> = d.r.seqs.keys().copied().collect();
    let mut out = Vec::new();
    for sub in crate::poset::subsets(&dom) {
        if sub.is_empty() {
            out.push(DCondition::empty());
            continue;
        }
        for n in 0..=d.n {
            let seqs: BTreeMap<Index, Sequence> = sub.iter().map(|&a| (a, d.r.seqs[&a][..n].to_vec())).collect();
            let cutoffs = sub.iter().map(|&a| (a, d.r.cutoffs[&a])).collect();
            let prefixes = prefix_set(seqs.values());
            let coder = prefixes
                .into_iter()
                .map(|k| {
                    let v = d.r.coder[&k];
                    (k, v)
                })
                .collect();
            let r = RCondition { seqs, cutoffs, coder };
            if let Ok(m) = in_d(&r) {
                out.push(DCondition { r, n: m });
            }
        }
    }
    out
}

/// Every R-condition with sequences and cutoffs on subsets of `pool`, sequence
/// lengths and cutoffs at most `max_len`, and a coder on sequences of length at
/// most `max_len` with entries and values below `max_val`.
pub fn enumerate_r(pool: &[Index], max_len: usize, max_val: u32) -> Vec<RCondition> {
    let mut all_seqs: Vec<Sequence> = Vec::new();
    for len in 0..=max_len {
        let mut odo = crate::poset::Odometer::new(len, max_val);
        while let Some(c) = odo.current() {
            all_seqs.push(c.to_vec());
            odo.advance();
        }
    }
    // per index: absent or one of the sequences; absent or one of the cutoffs
    let seq_choices = all_seqs.len() as u32 + 1;
    let cut_choices = max_len as u32 + 2;
    let mut coders: Vec<BTreeMap<Sequence, u32>> = Vec::new();
    let mut odo = crate::poset::Odometer::new(all_seqs.len(), max_val + 1);
    while let Some(c) = odo.current() {
        let coder: BTreeMap<Sequence, u32> = all_seqs
            .iter()
            .zip(c)
            .filter(|(_, &v)| v > 0)
            .map(|(k, &v)| (k.clone(), v - 1))
            .collect();
        odo.advance();
        let r = RCondition {
            coder,
            ..Default::default()
        };
        if r.non_injective_level().is_none() {
            coders.push(r.coder);
        }
    }
    let mut out = Vec::new();
    let mut odo = crate::poset::Odometer::new(pool.len(), seq_choices * cut_choices);
    while let Some(c) = odo.current() {
        let mut seqs = BTreeMap::new();
        let mut cutoffs = BTreeMap::new();
        for (&a, &x) in pool.iter().zip(c) {
            let (s, k) = (x / cut_choices, x % cut_choices);
            if s > 0 {
                seqs.insert(a, all_seqs[s as usize - 1].clone());
            }
            if k > 0 {
                cutoffs.insert(a, k as usize - 1);
            }
        }
        odo.advance();
        for coder in &coders {
            out.push(RCondition {
                seqs: seqs.clone(),
                cutoffs: cutoffs.clone(),
                coder: coder.clone(),
            });
        }
    }
    out
}

/// A random `p1 ≤ p` in the eventually-different poset: possibly new indices
/// from `pool`, then up to `max_cols` new columns whose values on `dom(p)` are
/// pairwise distinct.
pub fn random_evdiff_strengthening<R: Rng + ?Sized>(
    p: &SeqCondition,
    pool: &[Index],
    max_cols: usize,
    max_val: u32,
    rng: &mut R,
) -> SeqCondition {
    let max_val = max_val.max(1);
    let mut entries = p.entries().clone();
    let n = p.n();
    for &a in pool {
        if !entries.contains_key(&a) && rng.gen_bool(0.3) {
            entries.insert(a, (0..n).map(|_| rng.gen_range(0..max_val)).collect());
        }
    }
    if entries.is_empty() {
        return SeqCondition::empty();
    }
    let cols = rng.gen_range(0..=max_cols);
    let old: BTreeSet<Index> = p.domain();
    let k = old.len() as u32;
    for _ in 0..cols {
        let mut used = BTreeSet::new();
        for (a, s) in entries.iter_mut() {
            let v = if old.contains(a) {
                loop {
                    let v = rng.gen_range(0..max_val + k);
                    if !used.contains(&v) {
                        break v;
                    }
                }
            } else {
                rng.gen_range(0..max_val)
            };
            if old.contains(a) {
                used.insert(v);
            }
            s.push(v);
        }
    }
    SeqCondition::from_parts_unchecked(entries, n + cols)
}
