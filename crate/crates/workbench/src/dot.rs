//! Hasse diagrams in DOT.

use std::fmt::Write;

use semicohen_core::Poset;

/// Pairs `(upper, lower)` of positions in `universe` where `lower < upper`
/// with nothing strictly between.
pub fn covering_pairs<P: Poset>(poset: &P, universe: &[P::Cond]) -> Vec<(usize, usize)> {
    let n = universe.len();
    let words = n.div_ceil(64);
    // below[i]: j ≤ i; above[i]: i ≤ j, both strict
    let mut below = vec![vec![0u64; words]; n];
    let mut above = vec![vec![0u64; words]; n];
    for (i, p) in universe.iter().enumerate() {
        for (j, q) in universe.iter().enumerate() {
            if i != j && poset.le(q, p) {
                below[i][j / 64] |= 1 << (j % 64);
                above[j][i / 64] |= 1 << (i % 64);
            }
        }
    }
    let mut out = Vec::new();
    for (upper, row) in below.iter().enumerate() {
        for lower in 0..n {
            if row[lower / 64] & (1 << (lower % 64)) == 0 {
                continue;
            }
            let between = row.iter().zip(&above[lower]).any(|(a, b)| a & b != 0);
            if !between {
                out.push((upper, lower));
            }
        }
    }
    out
}

fn escape(label: &str) -> String {
    label.replace('\\', "\\\\").replace('"', "\\\"")
}

/// The diagram with weaker conditions above stronger ones; nodes are labelled
/// by `label`.
pub fn hasse_dot<P: Poset>(poset: &P, universe: &[P::Cond], label: impl Fn(&P::Cond) -> String) -> String {
    let mut out = String::from("digraph hasse {\n  rankdir=TB;\n  node [shape=box, fontname=\"monospace\"];\n");
    for (i, p) in universe.iter().enumerate() {
        writeln!(out, "  n{i} [label=\"{}\"];", escape(&label(p))).unwrap();
    }
    for (upper, lower) in covering_pairs(poset, universe) {
        writeln!(out, "  n{upper} -> n{lower};").unwrap();
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use semicohen_core::{CohenPoset, Enumerable, Truncation};

    #[test]
    fn cohen_two_indices() {
        let u = CohenPoset.enumerate_all(&Truncation::new([0, 1], 1, 2));
        assert_eq!(u.len(), 9);
        // top covers the four one-bit conditions, each covering two total ones
        assert_eq!(covering_pairs(&CohenPoset, &u).len(), 4 + 8);
        let dot = hasse_dot(&CohenPoset, &u, |p| format!("{p:?}"));
        assert_eq!(dot.matches("[label=").count(), 9);
    }
}
