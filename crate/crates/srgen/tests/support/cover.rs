//! Exhaustive minimum set cover, for small instances.

use std::collections::BTreeSet;

/// The smallest subset of `sets` covering their union, lowest bitmask
/// among equals; returns the covered mutants and the subset size.
pub fn optimal_cover(sets: &[BTreeSet<usize>]) -> (BTreeSet<usize>, usize) {
    assert!(sets.len() <= 16);
    let union: BTreeSet<usize> = sets.iter().flatten().copied().collect();
    let mut best: Option<(u32, BTreeSet<usize>)> = None;
    for mask in 0u32..(1 << sets.len()) {
        let size = mask.count_ones();
        if best.as_ref().is_some_and(|(b, _)| *b <= size) {
            continue;
        }
        let covered: BTreeSet<usize> =
            (0..sets.len()).filter(|i| mask & (1 << i) != 0).flat_map(|i| sets[i].iter().copied()).collect();
        if covered == union {
            best = Some((size, covered));
        }
    }
    let (size, covered) = best.unwrap();
    (covered, size as usize)
}
