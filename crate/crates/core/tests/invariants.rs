use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use semicohen_core::evdiff::evdiff_amalgamate;
use semicohen_core::product::{densify, in_d, lift, proj, r_leq, random_evdiff_strengthening, random_r};
use semicohen_core::scale::amalgamate;
use semicohen_core::seq::{pad_to, random_extension, restrict, seq_common_lower_bound, seq_leq};
use semicohen_core::{Index, Mode, SeqCondition};

fn seq_condition() -> impl Strategy<Value = SeqCondition> {
    (0usize..5, prop::collection::btree_set(0u32..6, 0..5)).prop_flat_map(|(n, dom)| {
        let k = dom.len();
        prop::collection::vec(prop::collection::vec(0u32..6, n), k).prop_map(move |seqs| {
            let entries: BTreeMap<Index, Vec<u32>> = dom.iter().copied().zip(seqs).collect();
            SeqCondition::new(entries, n).unwrap()
        })
    })
}

fn mode() -> impl Strategy<Value = Mode> {
    prop_oneof![Just(Mode::Scale), Just(Mode::EvDiff)]
}

proptest! {
    #[test]
    fn common_lower_bound_is_below_both(m in mode(), p in seq_condition(), q in seq_condition()) {
        let a = seq_common_lower_bound(m, &p, &q);
        let b = seq_common_lower_bound(m, &q, &p);
        prop_assert_eq!(a.is_some(), b.is_some());
        if let Some(r) = a {
            prop_assert!(seq_leq(m, &p, &r) && seq_leq(m, &q, &r));
        }
    }

    #[test]
    fn padding_strengthens(m in mode(), p in seq_condition(), extra in 0usize..4) {
        let q = pad_to(m, &p, p.n() + extra);
        prop_assert!(seq_leq(m, &p, &q));
    }

    #[test]
    fn amalgamation_beyond_exhaustive_bounds(
        m in mode(),
        p0 in seq_condition(),
        j in prop::collection::btree_set(0u32..6, 0..6),
        steps in 0usize..8,
        seed in any::<u64>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pool: Vec<Index> = j.iter().copied().collect();
        let mut p2 = restrict(&p0, &j);
        for _ in 0..steps {
            if pool.is_empty() {
                break;
            }
            p2 = random_extension(m, &p2, &pool, 7, &mut rng);
        }
        let p2 = pad_to(m, &p2, p0.n());
        let j: BTreeSet<Index> = j;
        let p3 = match m {
            Mode::Scale => amalgamate(&p0, &j, &p2),
            Mode::EvDiff => evdiff_amalgamate(&p0, &j, &p2),
        }
        .unwrap();
        prop_assert!(seq_leq(m, &p0, &p3));
        prop_assert!(seq_leq(m, &p2, &p3));
    }

    #[test]
    fn lift_postconditions(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pool: Vec<Index> = (0..7).collect();
        let r0 = densify(&random_r(&pool[..5], 4, 6, &mut rng));
        let p0 = proj(&r0).unwrap();
        let p1 = random_evdiff_strengthening(&p0, &pool, 4, 8, &mut rng);
        let r2 = lift(&r0, &p1).unwrap();
        prop_assert_eq!(in_d(r2.r()), Ok(r2.n()));
        prop_assert!(r_leq(r0.r(), r2.r()));
        prop_assert!(seq_leq(Mode::EvDiff, &p1, &proj(&r2).unwrap()));
    }
}
