//! The scale poset: conditions that grow a family of functions increasing in
//! the eventual-domination order along the index order.

use alloc::collections::{BTreeMap, BTreeSet};

use crate::poset::Index;
use crate::seq::{check_amalgamation_pre, restrict, seq_leq, AmalgamationError, Mode, SeqCondition};

/// Whether `p1 ≤ p0`: `p1` extends every sequence of `p0`, and on each new
/// column `i` the values of `p0`'s indices are non-decreasing in index order.
pub fn scale_leq(p0: &SeqCondition, p1: &SeqCondition) -> bool {
    seq_leq(Mode::Scale, p0, p1)
}

/// A common lower bound of `p0` and `p2`, where `p2` lives on the index subset
/// `j` and already extends `p0 ↾ j`.
///
/// Indices of `p0` outside `j` copy, on each new column, the value of the
/// largest smaller index of `dom(p0) ∩ j`, or take 0 when there is none.
pub fn amalgamate(
    p0: &SeqCondition,
    j: &BTreeSet<Index>,
    p2: &SeqCondition,
) -> Result<SeqCondition, AmalgamationError> {
    let n3 = check_amalgamation_pre(Mode::Scale, p0, j, p2)?;
    let mut entries: BTreeMap<Index, alloc::vec::Vec<u32>> = p2.entries().clone();
    for (&alpha, s0) in p0.entries() {
        if j.contains(&alpha) {
            continue;
        }
        let anchor = p0
            .entries()
            .range(..alpha)
            .rev()
            .map(|(b, _)| *b)
            .find(|b| j.contains(b));
        let mut s = s0.clone();
        for i in p0.n()..n3 {
            s.push(anchor.map_or(0, |b| p2.get(b).expect("dom(p0) ∩ j ⊆ dom(p2)")[i]));
        }
        entries.insert(alpha, s);
    }
    Ok(SeqCondition::from_parts_unchecked(entries, n3))
}

/// Regularity shadow: `p0 ↾ j` is a reduction of `p0`, witnessed by
/// [`amalgamate`] after padding.
pub fn reduction(p0: &SeqCondition, j: &BTreeSet<Index>) -> SeqCondition {
    restrict(p0, j)
}

/// Finite reading of `f ≪ g` with the finitely many exceptions confined below
/// `threshold`: `f(i) ≤ g(i)` for every `i ≥ threshold`, and `f(i) < g(i)` for
/// at least one `i`.
///
/// # Panics
/// If the fragments differ in length or `threshold` exceeds their length.
pub fn ll_check(f: &[u32], g: &[u32], threshold: usize) -> bool {
    assert_eq!(f.len(), g.len(), "fragments must have equal length");
    assert!(threshold <= f.len(), "threshold beyond the fragment");
    let tail_le = f[threshold..].iter().zip(&g[threshold..]).all(|(a, b)| a <= b);
    let strict = f.iter().zip(g).any(|(a, b)| a < b);
    tail_le && strict
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::Truncation;
    use crate::seq::{enumerate_extensions, enumerate_seq, pad_to, sc};

    fn set(xs: &[Index]) -> BTreeSet<Index> {
        xs.iter().copied().collect()
    }

    #[test]
    fn leq_examples() {
        let p0 = sc(&[(0, &[2]), (1, &[3])]);
        assert!(scale_leq(&SeqCondition::empty(), &p0));
        assert!(!scale_leq(&p0, &sc(&[(0, &[2, 5]), (1, &[3, 4])])));
        assert!(scale_leq(&p0, &sc(&[(0, &[2, 5]), (1, &[3, 5])])));
    }

    #[test]
    fn restrict_examples() {
        let p = sc(&[(0, &[2]), (1, &[3])]);
        assert_eq!(restrict(&p, &set(&[0])), sc(&[(0, &[2])]));
        assert_eq!(restrict(&p, &set(&[0, 1])), p);
        let r = restrict(&sc(&[(1, &[3])]), &set(&[0]));
        assert!(r.is_empty());
        assert_eq!(r.n(), 0);
    }

    #[test]
    fn amalgamate_copies_the_largest_smaller_anchor() {
        let p0 = sc(&[(0, &[2]), (1, &[3])]);
        let p2 = sc(&[(0, &[2, 5])]);
        let p3 = amalgamate(&p0, &set(&[0]), &p2).unwrap();
        assert_eq!(p3, sc(&[(0, &[2, 5]), (1, &[3, 5])]));
        assert!(scale_leq(&p0, &p3) && scale_leq(&p2, &p3));
    }

    #[test]
    fn amalgamate_fills_zero_without_anchor() {
        let p0 = sc(&[(1, &[3])]);
        let p2 = sc(&[(0, &[4, 4])]);
        let p3 = amalgamate(&p0, &set(&[0]), &p2).unwrap();
        assert_eq!(p3, sc(&[(0, &[4, 4]), (1, &[3, 0])]));
        assert!(scale_leq(&p0, &p3) && scale_leq(&p2, &p3));
    }

    #[test]
    fn amalgamate_of_tops_is_top() {
        let e = SeqCondition::empty();
        assert_eq!(amalgamate(&e, &set(&[]), &e).unwrap(), e);
    }

    #[test]
    fn amalgamate_rejects_bad_preconditions() {
        let p0 = sc(&[(0, &[2]), (1, &[3])]);
        assert_eq!(
            amalgamate(&p0, &set(&[0]), &sc(&[(1, &[3, 3])])),
            Err(AmalgamationError::OutsideSubset(1))
        );
        assert_eq!(
            amalgamate(&p0, &set(&[0]), &sc(&[(0, &[1, 3])])),
            Err(AmalgamationError::NotBelowRestriction)
        );
        assert_eq!(
            amalgamate(&p0, &set(&[0]), &sc(&[(0, &[2, 9])])),
            Ok(sc(&[(0, &[2, 9]), (1, &[3, 9])]))
        );
        let p0 = sc(&[(0, &[2, 2]), (1, &[3, 3])]);
        assert_eq!(
            amalgamate(&p0, &set(&[2]), &sc(&[(2, &[0])])),
            Err(AmalgamationError::TooShort { found: 1, required: 2 })
        );
    }

    #[test]
    fn amalgamation_sweep_small() {
        let t = Truncation::new([0, 1], 2, 2);
        for p0 in enumerate_seq(&t) {
            for jm in 0..4u32 {
                let j: BTreeSet<Index> = (0..2).filter(|b| jm & (1 << b) != 0).collect();
                let p1 = restrict(&p0, &j);
                for p2 in enumerate_extensions(Mode::Scale, &p1, &j, 3, 2) {
                    let padded = pad_to(Mode::Scale, &p2, p0.n());
                    let p3 = amalgamate(&p0, &j, &padded).unwrap();
                    assert!(scale_leq(&p0, &p3), "{p0:?} {j:?} {p2:?}");
                    assert!(scale_leq(&p2, &p3));
                }
            }
        }
    }

    #[test]
    fn ll_check_examples() {
        assert!(ll_check(&[0, 0, 0], &[1, 1, 1], 0));
        assert!(!ll_check(&[2, 0], &[1, 0], 1));
        assert!(!ll_check(&[1, 1], &[1, 1], 0));
        // an early exception is tolerated below the threshold
        assert!(ll_check(&[5, 0, 1], &[1, 0, 2], 1));
        assert!(!ll_check(&[5, 0, 1], &[1, 0, 2], 0));
    }
}
