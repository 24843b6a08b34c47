//! Pseudo-generic filters: a descending chain that meets a finite list of
//! dense sets, the function family it determines, and the recovery of the
//! filter from that family.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Debug;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cohen::{self, CohenCondition, CohenPoset};
use crate::poset::{Index, Poset};
use crate::product::{densify, in_d, random_r_extension, ProductPoset, RCondition};
use crate::seq::{add_index, random_extension, Mode, SeqCondition, SeqPoset};

/// Where random growth may go: indices it prefers and the bound on new values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrowthPolicy {
    pub pool: Vec<Index>,
    pub max_val: u32,
}

impl GrowthPolicy {
    pub fn new(pool: impl IntoIterator<Item = Index>, max_val: u32) -> Self {
        GrowthPolicy {
            pool: pool.into_iter().collect(),
            max_val: max_val.max(1),
        }
    }
}

/// A poset with a random strict strengthening.
pub trait Growable: Poset {
    fn grow(&self, p: &Self::Cond, policy: &GrowthPolicy, rng: &mut dyn RngCore) -> Self::Cond;
}

impl Growable for SeqPoset {
    fn grow(&self, p: &SeqCondition, policy: &GrowthPolicy, rng: &mut dyn RngCore) -> SeqCondition {
        random_extension(self.mode, p, &policy.pool, policy.max_val, rng)
    }
}

impl Growable for CohenPoset {
    fn grow(&self, p: &CohenCondition, policy: &GrowthPolicy, rng: &mut dyn RngCore) -> CohenCondition {
        cohen::random_extension(p, &policy.pool, rng)
    }
}

impl Growable for ProductPoset {
    fn grow(&self, p: &RCondition, policy: &GrowthPolicy, rng: &mut dyn RngCore) -> RCondition {
        random_r_extension(p, &policy.pool, policy.max_val, rng)
    }
}

/// A dense set given by decidable membership and a procedure that strengthens
/// any condition into the set.
pub trait DenseSet<P: Poset> {
    fn name(&self) -> String;
    fn contains(&self, p: &P::Cond) -> bool;
    /// Some `q ≤ p` with `q` in the set.
    fn strengthen(&self, p: &P::Cond, policy: &GrowthPolicy, rng: &mut dyn RngCore) -> Option<P::Cond>;
}

/// Conditions whose domain contains a given index.
#[derive(Clone, Copy, Debug)]
pub struct IndexInDomain(pub Index);

/// Sequence conditions of common length at least `k`.
#[derive(Clone, Copy, Debug)]
pub struct LengthAtLeast(pub usize);

/// Conditions of the product poset lying in its dense subset.
#[derive(Clone, Copy, Debug)]
pub struct ProductDense;

impl DenseSet<SeqPoset> for IndexInDomain {
    fn name(&self) -> String {
        alloc::format!("index {} in domain", self.0)
    }

    fn contains(&self, p: &SeqCondition) -> bool {
        p.contains(self.0)
    }

    fn strengthen(&self, p: &SeqCondition, policy: &GrowthPolicy, rng: &mut dyn RngCore) -> Option<SeqCondition> {
        Some(if p.contains(self.0) {
            p.clone()
        } else {
            add_index(p, self.0, policy.max_val, rng)
        })
    }
}

impl DenseSet<CohenPoset> for IndexInDomain {
    fn name(&self) -> String {
        alloc::format!("index {} decided", self.0)
    }

    fn contains(&self, p: &CohenCondition) -> bool {
        p.get(self.0).is_some()
    }

    fn strengthen(&self, p: &CohenCondition, _: &GrowthPolicy, rng: &mut dyn RngCore) -> Option<CohenCondition> {
        use rand::Rng;
        Some(match p.get(self.0) {
            Some(_) => p.clone(),
            None => p.clone().with(self.0, rng.gen_bool(0.5)),
        })
    }
}

impl DenseSet<ProductPoset> for IndexInDomain {
    fn name(&self) -> String {
        alloc::format!("index {} has a sequence", self.0)
    }

    fn contains(&self, p: &RCondition) -> bool {
        p.seqs().contains_key(&self.0)
    }

    fn strengthen(&self, p: &RCondition, _: &GrowthPolicy, _: &mut dyn RngCore) -> Option<RCondition> {
        let mut seqs = p.seqs().clone();
        seqs.entry(self.0).or_default();
        RCondition::new(seqs, p.cutoffs().clone(), p.coder().clone()).ok()
    }
}

impl DenseSet<SeqPoset> for LengthAtLeast {
    fn name(&self) -> String {
        alloc::format!("length at least {}", self.0)
    }

    fn contains(&self, p: &SeqCondition) -> bool {
        !p.is_empty() && p.n() >= self.0
    }

    fn strengthen(&self, p: &SeqCondition, policy: &GrowthPolicy, rng: &mut dyn RngCore) -> Option<SeqCondition> {
        let base = if p.is_empty() {
            add_index(p, policy.pool.first().copied().unwrap_or(0), policy.max_val, rng)
        } else {
            p.clone()
        };
        let missing = self.0.saturating_sub(base.n());
        Some(add_increasing_columns(&base, missing, policy.max_val, rng))
    }
}

/// Appends columns whose values strictly increase along the index order; these
/// satisfy the column rule of either mode.
fn add_increasing_columns(p: &SeqCondition, count: usize, max_val: u32, rng: &mut dyn RngCore) -> SeqCondition {
    use rand::Rng;
    let mut entries = p.entries().clone();
    for _ in 0..count {
        let mut v = rng.gen_range(0..max_val.max(1));
        for s in entries.values_mut() {
            s.push(v);
            v += rng.gen_range(1..3);
        }
    }
    SeqCondition::new(entries, p.n() + count).expect("columns keep a common length")
}

impl DenseSet<ProductPoset> for ProductDense {
    fn name(&self) -> String {
        "dense subset of the product".to_string()
    }

    fn contains(&self, p: &RCondition) -> bool {
        in_d(p).is_ok()
    }

    fn strengthen(&self, p: &RCondition, _: &GrowthPolicy, _: &mut dyn RngCore) -> Option<RCondition> {
        Some(densify(p).into_r())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimError {
    #[error("dense set `{name}` failed to strengthen the condition at step {step}")]
    DenseSetViolation { name: String, step: usize },
    #[error("random growth at step {0} did not strictly strengthen the condition")]
    GrowthViolation(usize),
}

/// A descending chain with, per dense set, the first chain position inside it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FilterTrace<C> {
    pub chain: Vec<C>,
    pub met: Vec<(String, usize)>,
    pub seed: u64,
}

impl<C: Clone + Eq + Ord + Debug> FilterTrace<C> {
    pub fn last(&self) -> &C {
        self.chain.last().expect("a chain starts at the top")
    }

    /// Names of the dense sets first met at `step`.
    pub fn met_at(&self, step: usize) -> impl Iterator<Item = &str> {
        self.met
            .iter()
            .filter(move |(_, k)| *k == step)
            .map(|(n, _)| n.as_str())
    }

    /// Whether the chain strictly descends and is linearly ordered.
    pub fn is_descending<P: Poset<Cond = C>>(&self, poset: &P) -> bool {
        self.chain.windows(2).all(|w| w[0] != w[1] && poset.le(&w[1], &w[0]))
            && self
                .chain
                .iter()
                .enumerate()
                .all(|(i, p)| self.chain[i..].iter().all(|q| poset.le(q, p) && poset.compatible(p, q)))
    }
}

/// Builds a strictly descending chain from the top. Step `k` strengthens into
/// dense set `k mod |sets|` when the current condition is outside it, and
/// grows randomly otherwise. There are `max(steps, |sets|)` steps, so every
/// set is met.
pub fn build_filter<P: Growable>(
    poset: &P,
    policy: &GrowthPolicy,
    sets: &[Box<dyn DenseSet<P>>],
    steps: usize,
    seed: u64,
) -> Result<FilterTrace<P::Cond>, SimError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chain = alloc::vec![poset.top()];
    let total = steps.max(sets.len());
    for step in 0..total {
        let p = chain.last().unwrap();
        let target = (!sets.is_empty())
            .then(|| &sets[step % sets.len()])
            .filter(|d| !d.contains(p));
        let q = match target {
            Some(d) => {
                let violation = || SimError::DenseSetViolation { name: d.name(), step };
                let q = d.strengthen(p, policy, &mut rng).ok_or_else(violation)?;
                if !d.contains(&q) || !poset.le(&q, p) {
                    return Err(violation());
                }
                q
            }
            None => {
                let q = poset.grow(p, policy, &mut rng);
                if q == *p || !poset.le(&q, p) {
                    return Err(SimError::GrowthViolation(step));
                }
                q
            }
        };
        chain.push(q);
    }
    let met = sets
        .iter()
        .map(|d| {
            let k = chain.iter().position(|p| d.contains(p));
            k.map(|k| (d.name(), k)).ok_or_else(|| SimError::DenseSetViolation {
                name: d.name(),
                step: total,
            })
        })
        .collect::<Result<_, _>>()?;
    Ok(FilterTrace { chain, met, seed })
}

/// The function fragments a chain determines, with commitment thresholds.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DerivedFamily {
    pub fragments: BTreeMap<Index, Vec<u32>>,
    /// `n_p` of the first chain element containing the index
    pub index_thresholds: BTreeMap<Index, usize>,
    /// `n_p` of the first chain element containing both indices, keyed `(lower, upper)`
    pub pair_thresholds: BTreeMap<(Index, Index), usize>,
}

/// Unions the per-index sequences along the chain.
pub fn derive_family(chain: &[SeqCondition]) -> DerivedFamily {
    let mut fam = DerivedFamily::default();
    for p in chain {
        for (&a, s) in p.entries() {
            let frag = fam.fragments.entry(a).or_default();
            debug_assert!(s.starts_with(frag) || frag.starts_with(s), "chain is not descending");
            if s.len() > frag.len() {
                frag.clone_from(s);
            }
            fam.index_thresholds.entry(a).or_insert(p.n());
        }
        let dom: Vec<Index> = p.entries().keys().copied().collect();
        for (k, &a) in dom.iter().enumerate() {
            for &b in &dom[k + 1..] {
                fam.pair_thresholds.entry((a, b)).or_insert(p.n());
            }
        }
    }
    fam
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairCheck {
    pub lower: Index,
    pub upper: Index,
    pub threshold: usize,
    /// columns `threshold..checked_to` were compared
    pub checked_to: usize,
    pub first_failure: Option<usize>,
    /// scale mode: a column past the threshold where `lower < upper`
    pub strict_observed: bool,
}

impl PairCheck {
    pub fn holds(&self) -> bool {
        self.first_failure.is_none()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FamilyReport {
    pub pairs: Vec<PairCheck>,
}

impl FamilyReport {
    pub fn passed(&self) -> bool {
        self.pairs.iter().all(PairCheck::holds)
    }

    pub fn failures(&self) -> usize {
        self.pairs.iter().filter(|c| !c.holds()).count()
    }
}

/// Checks every committed pair from its threshold on, within the common
/// decided length.
pub fn check_family(fam: &DerivedFamily, mode: Mode) -> FamilyReport {
    let pairs = fam
        .pair_thresholds
        .iter()
        .map(|(&(lower, upper), &threshold)| {
            let f = &fam.fragments[&lower];
            let g = &fam.fragments[&upper];
            let checked_to = f.len().min(g.len());
            let cols = threshold.min(checked_to)..checked_to;
            PairCheck {
                lower,
                upper,
                threshold,
                checked_to,
                first_failure: cols.clone().find(|&i| !mode.pair_ok(f[i], g[i])),
                strict_observed: mode == Mode::Scale && cols.clone().any(|i| f[i] < g[i]),
            }
        })
        .collect();
    FamilyReport { pairs }
}

/// Whether `p` belongs to the filter the family determines: each sequence of
/// `p` is a prefix of its fragment, and the column rule holds between `p`'s
/// indices at every decided column from `n_p` on.
pub fn filter_membership(fam: &DerivedFamily, p: &SeqCondition, mode: Mode) -> bool {
    let prefixes = p
        .entries()
        .iter()
        .all(|(a, s)| fam.fragments.get(a).is_some_and(|f| f.starts_with(s)));
    if !prefixes {
        return false;
    }
    let dom: Vec<Index> = p.entries().keys().copied().collect();
    dom.iter().enumerate().all(|(k, a)| {
        let f = &fam.fragments[a];
        dom[k + 1..].iter().all(|b| {
            let g = &fam.fragments[b];
            (p.n()..f.len().min(g.len())).all(|i| mode.pair_ok(f[i], g[i]))
        })
    })
}

pub fn reconstruct_filter(fam: &DerivedFamily, universe: &[SeqCondition], mode: Mode) -> Vec<SeqCondition> {
    universe
        .iter()
        .filter(|p| filter_membership(fam, p, mode))
        .cloned()
        .collect()
}

/// The index and length dense sets used by the simulation: every pool index
/// enters the domain and the common length reaches `min_len`.
pub fn standard_seq_sets(pool: &[Index], min_len: usize) -> Vec<Box<dyn DenseSet<SeqPoset>>> {
    let mut sets: Vec<Box<dyn DenseSet<SeqPoset>>> = pool.iter().map(|&a| Box::new(IndexInDomain(a)) as _).collect();
    sets.push(Box::new(LengthAtLeast(min_len)));
    sets
}
