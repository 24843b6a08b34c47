//! The eventually-different poset: conditions that grow a family of functions
//! pairwise different from some point on.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::poset::Index;
use crate::seq::{check_amalgamation_pre, seq_leq, smallest_unused, AmalgamationError, Mode, SeqCondition};

/// Whether `p1 ≤ p0`: `p1` extends every sequence of `p0`, and on each new
/// column the values of `p0`'s indices are pairwise distinct.
pub fn evdiff_leq(p0: &SeqCondition, p1: &SeqCondition) -> bool {
    seq_leq(Mode::EvDiff, p0, p1)
}

/// A common lower bound of `p0` and `p2`, where `p2` lives on `j` and extends
/// `p0 ↾ j`. Indices of `p0` outside `j` receive, column by column and in
/// increasing index order, the smallest value not yet present in that column.
pub fn evdiff_amalgamate(
    p0: &SeqCondition,
    j: &BTreeSet<Index>,
    p2: &SeqCondition,
) -> Result<SeqCondition, AmalgamationError> {
    let n3 = check_amalgamation_pre(Mode::EvDiff, p0, j, p2)?;
    let outside: Vec<Index> = p0.entries().keys().copied().filter(|a| !j.contains(a)).collect();
    let mut fresh: BTreeMap<Index, Vec<u32>> = outside.iter().map(|&a| (a, p0.get(a).unwrap().to_vec())).collect();
    for i in p0.n()..n3 {
        let mut column: BTreeSet<u32> = p2.entries().values().map(|s| s[i]).collect();
        for a in &outside {
            let v = smallest_unused(&column);
            column.insert(v);
            fresh.get_mut(a).unwrap().push(v);
        }
    }
    let mut entries = p2.entries().clone();
    entries.extend(fresh);
    Ok(SeqCondition::from_parts_unchecked(entries, n3))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::Truncation;
    use crate::seq::{enumerate_extensions, enumerate_seq, pad_to, restrict, sc};

    fn set(xs: &[Index]) -> BTreeSet<Index> {
        xs.iter().copied().collect()
    }

    #[test]
    fn leq_examples() {
        let p0 = sc(&[(0, &[2]), (1, &[3])]);
        assert!(evdiff_leq(&SeqCondition::empty(), &p0));
        assert!(!evdiff_leq(&p0, &sc(&[(0, &[2, 5]), (1, &[3, 5])])));
        assert!(evdiff_leq(&p0, &sc(&[(0, &[2, 5]), (1, &[3, 4])])));
    }

    #[test]
    fn amalgamate_examples() {
        let p0 = sc(&[(0, &[2]), (1, &[3])]);
        let p2 = sc(&[(0, &[2, 0])]);
        let p3 = evdiff_amalgamate(&p0, &set(&[0]), &p2).unwrap();
        assert_eq!(p3, sc(&[(0, &[2, 0]), (1, &[3, 1])]));
        assert!(evdiff_leq(&p0, &p3) && evdiff_leq(&p2, &p3));

        let e = SeqCondition::empty();
        assert_eq!(evdiff_amalgamate(&e, &set(&[]), &e).unwrap(), e);

        let p0 = sc(&[(2, &[7])]);
        let p2 = sc(&[(0, &[1, 1]), (1, &[2, 2])]);
        let p3 = evdiff_amalgamate(&p0, &set(&[0, 1]), &p2).unwrap();
        assert_eq!(p3, sc(&[(0, &[1, 1]), (1, &[2, 2]), (2, &[7, 0])]));
        assert!(evdiff_leq(&p0, &p3) && evdiff_leq(&p2, &p3));
    }

    #[test]
    fn rejects_collision_in_the_small_condition() {
        let p0 = sc(&[(0, &[2]), (1, &[3])]);
        assert_eq!(
            evdiff_amalgamate(&p0, &set(&[0, 1]), &sc(&[(0, &[2, 4]), (1, &[3, 4])])),
            Err(AmalgamationError::NotBelowRestriction)
        );
    }

    #[test]
    fn fresh_values_avoid_every_column_value() {
        let t = Truncation::new([0, 1, 2], 1, 3);
        for p0 in enumerate_seq(&t) {
            for jm in 0..8u32 {
                let j: BTreeSet<Index> = (0..3).filter(|b| jm & (1 << b) != 0).collect();
                let p1 = restrict(&p0, &j);
                for p2 in enumerate_extensions(Mode::EvDiff, &p1, &j, 2, 3) {
                    let p2 = pad_to(Mode::EvDiff, &p2, p0.n());
                    let p3 = evdiff_amalgamate(&p0, &j, &p2).unwrap();
                    for i in p0.n()..p3.n() {
                        for (&a, s) in p3.entries() {
                            for (&b, t) in p3.entries() {
                                let touches_p0 = p0.contains(a) || p0.contains(b);
                                let a_fresh = p0.contains(a) && !j.contains(&a);
                                if a != b && touches_p0 && a_fresh {
                                    assert_ne!(s[i], t[i]);
                                }
                            }
                        }
                    }
                    assert!(evdiff_leq(&p0, &p3) && evdiff_leq(&p2, &p3));
                }
            }
        }
    }
}
