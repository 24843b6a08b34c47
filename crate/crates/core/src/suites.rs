//! Property sweeps over truncated universes. Each sweep counts the instances
//! it checked and the ones that failed, keeping the first failure for display.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cohen::{cohen_compatible, CohenPoset};
use crate::evdiff::evdiff_amalgamate;
use crate::generic::{build_filter, check_family, derive_family, reconstruct_filter, standard_seq_sets, GrowthPolicy};
use crate::iteration::{
    enumerate_environments, enumerate_q, flat_leq, flatten, non_dense_witness, q_compatible, q_leq, separate,
    unflatten, Environment, FlatIterCondition, QCondition, QPoset,
};
use crate::poset::{
    check_order_axioms, is_predense_below, maximal_antichains, subsets, Enumerable, Index, Poset, Predensity,
    Truncation,
};
use crate::product::{
    d_ancestors, densify, enumerate_d, in_d, lift, proj, r_leq, random_d, random_evdiff_strengthening, random_r,
    random_r_extension, DCondition, ProductPoset, RCondition,
};
use crate::scale::amalgamate;
use crate::seq::{
    enumerate_extensions, enumerate_seq, pad_to, restrict, seq_common_lower_bound, seq_leq, Mode, SeqCondition,
    SeqPoset,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteResult {
    pub name: String,
    pub checked: u64,
    pub failures: u64,
    pub first_failure: Option<String>,
}

impl SuiteResult {
    fn new(name: impl Into<String>) -> Self {
        SuiteResult {
            name: name.into(),
            checked: 0,
            failures: 0,
            first_failure: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0 && self.checked > 0
    }

    fn record(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(detail());
            }
        }
    }
}

fn index_subsets(t: &Truncation) -> Vec<BTreeSet<Index>> {
    let pool: Vec<Index> = t.indices.iter().copied().collect();
    subsets(&pool).map(|v| v.into_iter().collect()).collect()
}

/// Every `p0` of the universe, every `J`, every `p2 ≤ p0 ↾ J` on `J` up to
/// length `p2_len` (zero-padded or fresh-padded to `n_{p0}` when shorter):
/// the amalgamation lies below `p0` and `p2`. In distinctness mode a second
/// row checks that each new column separates every pair with a side in
/// `dom(p0) ∖ J`.
pub fn amalgamation_sweep(mode: Mode, t: &Truncation, p2_len: usize) -> Vec<SuiteResult> {
    let mut main = SuiteResult::new(format!("{} amalgamation", mode.name()));
    let mut fresh = SuiteResult::new("evdiff fresh values");
    let universe = enumerate_seq(t);
    for j in index_subsets(t) {
        let mut extensions: BTreeMap<SeqCondition, Vec<SeqCondition>> = BTreeMap::new();
        for p0 in &universe {
            let p1 = restrict(p0, &j);
            let p2s = extensions
                .entry(p1.clone())
                .or_insert_with(|| enumerate_extensions(mode, &p1, &j, p2_len, t.max_val));
            for p2 in p2s.iter() {
                let p2 = pad_to(mode, p2, p0.n());
                let p3 = match mode {
                    Mode::Scale => amalgamate(p0, &j, &p2),
                    Mode::EvDiff => evdiff_amalgamate(p0, &j, &p2),
                };
                let Ok(p3) = p3 else {
                    main.record(false, || format!("p0={p0:?} J={j:?} p2={p2:?}: {p3:?}"));
                    continue;
                };
                let valid = p3.entries().values().all(|s| s.len() == p3.n());
                main.record(valid && seq_leq(mode, p0, &p3) && seq_leq(mode, &p2, &p3), || {
                    format!("p0={p0:?} J={j:?} p2={p2:?} p3={p3:?}")
                });
                if mode == Mode::EvDiff {
                    fresh.record(fresh_columns_ok(p0, &j, &p3), || format!("p0={p0:?} J={j:?} p3={p3:?}"));
                }
            }
        }
    }
    let mut out = alloc::vec![main];
    if mode == Mode::EvDiff {
        out.push(fresh);
    }
    out
}

/// Each new column separates every pair with a side outside `J`.
fn fresh_columns_ok(p0: &SeqCondition, j: &BTreeSet<Index>, p3: &SeqCondition) -> bool {
    let e: Vec<(&Index, &Vec<u32>)> = p3.entries().iter().collect();
    (p0.n()..p3.n()).all(|i| {
        e.iter().enumerate().all(|(k, (a, s))| {
            e[k + 1..]
                .iter()
                .all(|(b, t)| (j.contains(a) && j.contains(b)) || s[i] != t[i])
        })
    })
}

/// For every pair `q ≤ p` of the universe and `β < α` in `dom(p)`, the new
/// columns of `q` obey the column rule between `β` and `α`.
pub fn forcing_clause_sweep(mode: Mode, t: &Truncation) -> SuiteResult {
    let mut res = SuiteResult::new(format!("{} forcing clause", mode.name()));
    let universe = enumerate_seq(t);
    for p in &universe {
        let dom: Vec<Index> = p.entries().keys().copied().collect();
        for q in &universe {
            if !seq_leq(mode, p, q) {
                continue;
            }
            let mut ok = true;
            for (k, &b) in dom.iter().enumerate() {
                for &a in &dom[k + 1..] {
                    let (qb, qa) = (q.get(b).unwrap(), q.get(a).unwrap());
                    for i in p.n()..q.n() {
                        ok &= match mode {
                            Mode::Scale => qb[i] <= qa[i],
                            Mode::EvDiff => qb[i] != qa[i],
                        };
                    }
                }
            }
            res.record(ok, || format!("p={p:?} q={q:?}"));
        }
    }
    res
}

/// Every `q ≥ p` with `dom(q) ⊆ dom(p)` and `n_q ≤ n_p` is listed whenever `p` is.
pub fn downward_closure_sweep(mode: Mode, t: &Truncation) -> SuiteResult {
    let mut res = SuiteResult::new(format!("{} enumeration closure", mode.name()));
    let universe = enumerate_seq(t);
    let listed: BTreeSet<&SeqCondition> = universe.iter().collect();
    for p in &universe {
        let dom: Vec<Index> = p.entries().keys().copied().collect();
        for sub in subsets(&dom) {
            for n in 0..=p.n() {
                let entries = sub.iter().map(|&a| (a, p.get(a).unwrap()[..n].to_vec())).collect();
                let q = SeqCondition::new(entries, n).expect("prefixes share a length");
                if seq_leq(mode, &q, p) {
                    res.record(listed.contains(&q), || format!("p={p:?} missing q={q:?}"));
                }
            }
        }
    }
    res
}

/// Reflexivity, transitivity, antisymmetry, and the compatibility axioms.
pub fn order_axioms<P: Poset>(name: &str, poset: &P, universe: &[P::Cond]) -> SuiteResult {
    let report = check_order_axioms(poset, universe);
    SuiteResult {
        name: format!("{name} order axioms"),
        checked: report.comparable_pairs.max(1),
        failures: report.violations(),
        first_failure: (report.violations() > 0).then(|| format!("{report:?}")),
    }
}

/// Compatibility holds exactly when the two partial functions agree on their
/// common domain.
pub fn cohen_compatibility_sweep(t: &Truncation) -> SuiteResult {
    let mut res = SuiteResult::new("cohen compatibility");
    let u = CohenPoset.enumerate_all(t);
    for p in &u {
        for q in &u {
            let agree = p.entries().iter().all(|(a, b)| q.get(*a).is_none_or(|c| c == *b));
            res.record(agree == cohen_compatible(p, q), || format!("p={p:?} q={q:?}"));
        }
    }
    res
}

/// `p0 ↾ J` is a reduction: every `p2 ≤ p0 ↾ J` living on `J` is compatible
/// with `p0`, and the predensity check finds the witness.
pub fn cohen_regularity_sweep(t: &Truncation) -> SuiteResult {
    let mut res = SuiteResult::new("cohen restriction is a reduction");
    let u = CohenPoset.enumerate_all(t);
    for j in index_subsets(t) {
        for p0 in &u {
            let p1 = p0.restrict(&j);
            for p2 in u.iter().filter(|p2| p2.entries().keys().all(|a| j.contains(a))) {
                if !CohenPoset.le(p2, &p1) {
                    continue;
                }
                let w = is_predense_below(&CohenPoset, core::slice::from_ref(p2), p0);
                let ok = match &w {
                    Predensity::Witness { lower_bound, .. } => {
                        CohenPoset.le(lower_bound, p0) && CohenPoset.le(lower_bound, p2)
                    }
                    Predensity::Failure => false,
                };
                res.record(ok, || format!("p0={p0:?} J={j:?} p2={p2:?}"));
            }
        }
    }
    res
}

/// For every maximal antichain `A` of the universe on `small` and every `p0`
/// of the universe on `big`, a member of `A` meets `p0 ↾ small` in a common
/// extension, and amalgamating that extension into `p0` gives a condition
/// below both `p0` and the member.
pub fn predensity_demo(t_small: &Truncation, t_big: &Truncation) -> SuiteResult {
    let mode = Mode::Scale;
    let poset = SeqPoset { mode };
    let mut res = SuiteResult::new("scale predensity of small antichains");
    let small = enumerate_seq(t_small);
    let antichains = match maximal_antichains(&poset, &small) {
        Ok(a) => a,
        Err(e) => {
            res.record(false, || format!("{e}"));
            return res;
        }
    };
    let j = &t_small.indices;
    for p0 in enumerate_seq(t_big) {
        let p1 = restrict(&p0, j);
        for a in &antichains {
            let witness = a.iter().find_map(|m| {
                let p2 = seq_common_lower_bound(mode, m, &p1)?;
                let p3 = amalgamate(&p0, j, &pad_to(mode, &p2, p0.n())).ok()?;
                (seq_leq(mode, &p0, &p3) && seq_leq(mode, m, &p3)).then_some(p3)
            });
            let agrees = is_predense_below(&poset, a, &p0).is_witness();
            res.record(witness.is_some() && agrees, || format!("p0={p0:?} A={a:?}"));
        }
    }
    res
}

/// `proj` reverses the order on every pair of dense-set members `r0 ≥ r1`
/// with domain in `pool`, length at most `max_len`, values below `max_val`.
pub fn projection_monotone_exhaustive(pool: &[Index], max_len: usize, max_val: u32) -> SuiteResult {
    let mut res = SuiteResult::new("projection monotone (exhaustive)");
    for r1 in enumerate_d(pool, max_len, max_val) {
        let Ok(p1) = proj(&r1) else {
            res.record(false, || format!("proj failed on {r1:?}"));
            continue;
        };
        for r0 in d_ancestors(&r1) {
            let ok = r_leq(r0.r(), r1.r()) && proj(&r0).is_ok_and(|p0| seq_leq(Mode::EvDiff, &p0, &p1));
            res.record(ok, || format!("r0={r0:?} r1={r1:?}"));
        }
    }
    res
}

/// Random `r1 ≤ r0` in the dense set, built by random strengthening and
/// densifying.
pub fn projection_monotone_random(samples: usize, seed: u64) -> SuiteResult {
    let mut res = SuiteResult::new("projection monotone (random)");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool: Vec<Index> = (0..5).collect();
    for _ in 0..samples {
        let r0 = random_d(&pool, 3, 5, &mut rng);
        let mut r = r0.r().clone();
        for _ in 0..rng.gen_range(0..6) {
            r = random_r_extension(&r, &pool, 5, &mut rng);
        }
        let r1 = densify(&r);
        let ok = in_d(r1.r()).is_ok()
            && r_leq(r0.r(), r1.r())
            && matches!((proj(&r0), proj(&r1)), (Ok(p0), Ok(p1)) if seq_leq(Mode::EvDiff, &p0, &p1));
        res.record(ok, || format!("r0={r0:?} r1={r1:?}"));
    }
    res
}

/// Random `p1 ≤ proj(r0)`: the lift is in the dense set, below `r0`, and
/// projects below `p1`.
pub fn lift_random(samples: usize, seed: u64) -> SuiteResult {
    let mut res = SuiteResult::new("lift lies below both");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool: Vec<Index> = (0..6).collect();
    for _ in 0..samples {
        let r0 = random_d(&pool[..4], 3, 5, &mut rng);
        let p0 = proj(&r0).expect("densify output projects");
        let p1 = random_evdiff_strengthening(&p0, &pool, 3, 6, &mut rng);
        if !seq_leq(Mode::EvDiff, &p0, &p1) {
            res.record(false, || format!("generator produced p1={p1:?} not below {p0:?}"));
            continue;
        }
        let ok = match lift(&r0, &p1) {
            Ok(r2) => {
                in_d(r2.r()) == Ok(r2.n())
                    && r_leq(r0.r(), r2.r())
                    && proj(&r2).is_ok_and(|q| seq_leq(Mode::EvDiff, &p1, &q))
            }
            Err(_) => false,
        };
        res.record(ok, || format!("r0={r0:?} p1={p1:?}"));
    }
    res
}

/// `densify` lands in the dense set below its input, fixes members of the
/// dense set, and projections separate diverged sequences past the cutoffs.
pub fn densify_random(samples: usize, seed: u64) -> SuiteResult {
    let mut res = SuiteResult::new("densify and projection validity");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool: Vec<Index> = (0..4).collect();
    for _ in 0..samples {
        let r = random_r(&pool, 3, 4, &mut rng);
        let d = densify(&r);
        let again = densify(d.r());
        let ok = in_d(d.r()).is_ok() && r_leq(&r, d.r()) && again == d && projection_valid(&d);
        res.record(ok, || format!("r={r:?} d={d:?}"));
    }
    res
}

fn projection_valid(d: &DCondition) -> bool {
    let Ok(p) = proj(d) else { return false };
    let r = d.r();
    if p.n() != d.n() || p.entries().values().any(|s| s.len() != d.n()) {
        return false;
    }
    let seqs: Vec<(&Index, &Vec<u32>)> = r.seqs().iter().collect();
    seqs.iter().enumerate().all(|(k, (a, s))| {
        seqs[k + 1..].iter().all(|(b, t)| {
            let from = r.cutoffs()[a].max(r.cutoffs()[b]);
            (from..d.n()).all(|i| s[..=i] == t[..=i] || p.get(**a).unwrap()[i] != p.get(**b).unwrap()[i])
        })
    })
}

/// Whether some sequence of length at most `max_len` with entries below
/// `max_val` extends both conditions. Depth-first over all such sequences,
/// abandoning a prefix once it violates either condition.
fn brute_common_extension(
    q0: &QCondition,
    q1: &QCondition,
    env: &Environment,
    max_len: usize,
    max_val: u32,
    buf: &mut Vec<u32>,
) -> bool {
    fn fits(q: &QCondition, s: &[u32], env: &Environment) -> bool {
        let i = s.len() - 1;
        match q.s.get(i) {
            Some(&v) => s[i] == v,
            None => q.a.iter().all(|&g| s[i] != env.value(g, i)),
        }
    }
    fn go(
        q0: &QCondition,
        q1: &QCondition,
        env: &Environment,
        max_len: usize,
        max_val: u32,
        buf: &mut Vec<u32>,
    ) -> bool {
        if buf.len() >= q0.s.len().max(q1.s.len()) {
            return true;
        }
        if buf.len() == max_len {
            return false;
        }
        for v in 0..max_val {
            buf.push(v);
            if fits(q0, buf, env) && fits(q1, buf, env) && go(q0, q1, env, max_len, max_val, buf) {
                buf.pop();
                return true;
            }
            buf.pop();
        }
        false
    }
    buf.clear();
    go(q0, q1, env, max_len, max_val, buf)
}

#[derive(Clone, Debug)]
pub struct SeparationBounds {
    pub indices: Vec<Index>,
    pub max_len: usize,
    pub max_val: u32,
    pub env_len: usize,
    pub env_val: u32,
}

/// Over every environment and every ordered pair of the residue universe:
/// the exact compatibility test agrees with brute-force search, and whenever
/// `q0` does not extend `q1`, [`separate`] returns an extension of `q0`
/// incompatible with `q1` by both tests.
pub fn separativity_sweep(b: &SeparationBounds) -> Vec<SuiteResult> {
    let mut sep = SuiteResult::new("residue separativity");
    let mut compat = SuiteResult::new("residue compatibility vs search");
    let universe = enumerate_q(&b.indices, b.max_len, b.max_val);
    let search_len = b.max_len + 2;
    let mut buf = Vec::new();
    for env in enumerate_environments(&b.indices, b.env_len, b.env_val) {
        // every value a condition or table uses, plus room for one unbanned choice per column
        let search_val = b.max_val.max(b.env_val) + b.indices.len() as u32 + 1;
        for q0 in &universe {
            for q1 in &universe {
                let exact = q_compatible(q0, q1, &env, Mode::EvDiff);
                let found = brute_common_extension(q0, q1, &env, search_len, search_val, &mut buf);
                compat.record(exact == found, || format!("env={env:?} q0={q0:?} q1={q1:?}"));
                if q_leq(q1, q0, &env, Mode::EvDiff) {
                    continue;
                }
                let ok = match separate(q0, q1, &env) {
                    Ok((q2, _)) => {
                        q_leq(q0, &q2, &env, Mode::EvDiff)
                            && !q_compatible(&q2, q1, &env, Mode::EvDiff)
                            && !brute_common_extension(
                                &q2,
                                q1,
                                &env,
                                q2.s.len().max(q1.s.len()) + 2,
                                search_val,
                                &mut buf,
                            )
                    }
                    Err(_) => false,
                };
                sep.record(ok, || format!("env={env:?} q0={q0:?} q1={q1:?}"));
            }
        }
    }
    alloc::vec![sep, compat]
}

/// For families of up to two residue conditions avoiding index `gamma`, the
/// witness built from any `q` is extended by no member.
pub fn non_dense_witness_sweep(indices: &[Index], gamma: Index, max_val: u32) -> SuiteResult {
    let mut res = SuiteResult::new("non-density witness");
    let universe = enumerate_q(indices, 1, max_val);
    let envs = enumerate_environments(indices, 1, max_val);
    for env in envs.iter().chain([Environment::tails_only()].iter()) {
        for (k, e0) in universe.iter().enumerate() {
            for e1 in &universe[k..] {
                let family = [e0.clone(), e1.clone()];
                for q in &universe {
                    let ok = match non_dense_witness(&family, gamma, q, env) {
                        Ok(w) => w.a.contains(&gamma) && family.iter().all(|e| !q_leq(&w, e, env, Mode::EvDiff)),
                        Err(_) => false,
                    };
                    res.record(ok, || format!("E={family:?} q={q:?}"));
                }
            }
        }
    }
    res
}

/// Flat conditions built directly from their definition flatten onto the
/// sequence universe one-to-one, round-trip, and carry the same order.
pub fn isomorphism_sweep(mode: Mode, t: &Truncation) -> SuiteResult {
    let mut res = SuiteResult::new(format!("{} flat isomorphism", mode.name()));
    let seq_universe = enumerate_seq(t);
    let flat: Vec<FlatIterCondition> = seq_universe
        .iter()
        .map(|p| {
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
            FlatIterCondition::new(entries, p.n()).expect("side sets are the earlier indices")
        })
        .collect();
    let images: BTreeSet<SeqCondition> = flat.iter().map(flatten).collect();
    let targets: BTreeSet<&SeqCondition> = seq_universe.iter().collect();
    res.record(
        images.len() == flat.len() && images.iter().all(|p| targets.contains(p)) && images.len() == targets.len(),
        || String::from("flatten is not a bijection onto the sequence universe"),
    );
    for r in &flat {
        res.record(unflatten(&flatten(r)) == *r, || format!("round trip r={r:?}"));
    }
    let images: Vec<SeqCondition> = flat.iter().map(flatten).collect();
    for (r0, p0) in flat.iter().zip(&images) {
        for (r1, p1) in flat.iter().zip(&images) {
            res.record(flat_leq(r0, r1, mode) == seq_leq(mode, p0, p1), || {
                format!("r0={r0:?} r1={r1:?}")
            });
        }
    }
    res
}

/// Seeded filters meeting the index and length dense sets: the derived family
/// obeys the column rule past every commitment threshold, and the filter read
/// back from the family contains the chain while rejecting altered conditions.
pub fn simulation_sweep(mode: Mode, seeds: impl IntoIterator<Item = u64>, steps: usize) -> Vec<SuiteResult> {
    let mut fam_res = SuiteResult::new(format!("{} derived family", mode.name()));
    let mut rec_res = SuiteResult::new(format!("{} filter reconstruction", mode.name()));
    let poset = SeqPoset { mode };
    let pool: Vec<Index> = (0..6).collect();
    let policy = GrowthPolicy::new(pool.iter().copied(), 8);
    let sets = standard_seq_sets(&pool, 4);
    for seed in seeds {
        let trace = match build_filter(&poset, &policy, &sets, steps, seed) {
            Ok(t) => t,
            Err(e) => {
                fam_res.record(false, || format!("seed {seed}: {e}"));
                continue;
            }
        };
        let fam = derive_family(&trace.chain);
        let report = check_family(&fam, mode);
        fam_res.record(report.passed() && trace.is_descending(&poset), || {
            format!("seed {seed}: {:?}", report.pairs.iter().find(|p| !p.holds()))
        });
        let mut probes = trace.chain.clone();
        let mut altered = Vec::new();
        for p in &trace.chain {
            if let Some((&a, s)) = p.entries().iter().find(|(_, s)| !s.is_empty()) {
                let mut entries = p.entries().clone();
                let mut t = s.clone();
                t[0] = t[0].wrapping_add(1000);
                entries.insert(a, t);
                let q = SeqCondition::new(entries, p.n()).unwrap();
                probes.push(q.clone());
                altered.push(q);
            }
        }
        let got: BTreeSet<SeqCondition> = reconstruct_filter(&fam, &probes, mode).into_iter().collect();
        let ok = trace.chain.iter().all(|p| got.contains(p)) && altered.iter().all(|q| !got.contains(q));
        rec_res.record(ok, || format!("seed {seed}"));
    }
    alloc::vec![fam_res, rec_res]
}

/// Order axioms on every universe the sweeps enumerate.
pub fn all_order_axioms(t: &Truncation) -> Vec<SuiteResult> {
    let mut out = Vec::new();
    let cohen_t = Truncation::new(t.indices.iter().copied(), 1, 2);
    out.push(order_axioms("cohen", &CohenPoset, &CohenPoset.enumerate_all(&cohen_t)));
    let seqs = enumerate_seq(t);
    for mode in [Mode::Scale, Mode::EvDiff] {
        out.push(order_axioms(mode.name(), &SeqPoset { mode }, &seqs));
        let flat: Vec<FlatIterCondition> = seqs.iter().map(unflatten).collect();
        out.push(order_axioms(
            &format!("{} flat", mode.name()),
            &crate::iteration::FlatPoset { mode },
            &flat,
        ));
    }
    let pool: Vec<Index> = t.indices.iter().copied().take(2).collect();
    let rs: Vec<RCondition> = crate::product::enumerate_r(&pool, 1, 2);
    out.push(order_axioms("product", &ProductPoset, &rs));
    let ds: Vec<RCondition> = enumerate_d(&pool, 2, 2).into_iter().map(DCondition::into_r).collect();
    out.push(order_axioms("product dense subset", &ProductPoset, &ds));
    let q_indices: Vec<Index> = t.indices.iter().copied().collect();
    let qs = enumerate_q(&q_indices, 2, 3);
    let mut q_res = SuiteResult::new("residue order axioms");
    for env in enumerate_environments(&q_indices, 1, 3) {
        for mode in [Mode::Scale, Mode::EvDiff] {
            let r = order_axioms("residue", &QPoset { env: &env, mode }, &qs);
            q_res.checked += r.checked;
            q_res.failures += r.failures;
            if q_res.first_failure.is_none() {
                q_res.first_failure = r.first_failure;
            }
        }
    }
    out.push(q_res);
    out
}
