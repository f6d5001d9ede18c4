//! Pairing rules shared by playthrough and exact enumeration of dynamic
//! policies.

use std::cmp::Reverse;
use std::collections::BTreeMap;

use crate::types::{PlaceRef, Seed};

/// Best-vs-worst pairing of an ordered field: first against last, second
/// against second-to-last, and so on.
pub fn fold_pairs(ordered: &[Seed]) -> Vec<(Seed, Seed)> {
    let len = ordered.len();
    (0..len / 2)
        .map(|i| (ordered[i], ordered[len - 1 - i]))
        .collect()
}

/// Every perfect matching of the field, each equally likely under a uniform
/// random draw. The first free team is paired with each later team in turn.
pub fn all_matchings(field: &[Seed]) -> Vec<Vec<(Seed, Seed)>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(field.len() / 2);
    let mut pool: Vec<Seed> = field.to_vec();
    recurse_matchings(&mut pool, &mut current, &mut out);
    out
}

fn recurse_matchings(
    pool: &mut Vec<Seed>,
    current: &mut Vec<(Seed, Seed)>,
    out: &mut Vec<Vec<(Seed, Seed)>>,
) {
    if pool.is_empty() {
        out.push(current.clone());
        return;
    }
    let first = pool.remove(0);
    for i in 0..pool.len() {
        let partner = pool.remove(i);
        current.push((first, partner));
        recurse_matchings(pool, current, out);
        current.pop();
        pool.insert(i, partner);
    }
    pool.insert(0, first);
}

/// Swiss pairing for one round given per-seed win counts. Groups of equal
/// record pair internally, folded by seed with any spilled-down team ranked
/// first; an odd group spills its worst-seeded own member to the next group.
pub fn swiss_pairs(wins: &[u32]) -> Vec<(Seed, Seed)> {
    let mut groups: BTreeMap<Reverse<u32>, Vec<Seed>> = BTreeMap::new();
    for (i, &w) in wins.iter().enumerate() {
        groups
            .entry(Reverse(w))
            .or_default()
            .push(Seed((i + 1) as u32));
    }
    let mut pairs = Vec::with_capacity(wins.len() / 2);
    let mut spill: Option<Seed> = None;
    for (_, group) in groups {
        let mut ordered: Vec<Seed> = spill.take().into_iter().chain(group).collect();
        if ordered.len() % 2 == 1 {
            spill = ordered.pop();
        }
        pairs.extend(fold_pairs(&ordered));
    }
    debug_assert!(spill.is_none(), "even fields always pair off");
    pairs
}

/// Final standing per seed: teams with equal records share a tie block,
/// blocks ordered by wins descending.
pub fn record_blocks(wins: &[u32]) -> Vec<PlaceRef> {
    let mut counts: BTreeMap<Reverse<u32>, u32> = BTreeMap::new();
    for &w in wins {
        *counts.entry(Reverse(w)).or_insert(0) += 1;
    }
    let mut intervals: BTreeMap<u32, PlaceRef> = BTreeMap::new();
    let mut next = 1u32;
    for (Reverse(w), count) in counts {
        let lo = next;
        let hi = next + count - 1;
        next = hi + 1;
        intervals.insert(
            w,
            if lo == hi {
                PlaceRef::Place(lo)
            } else {
                PlaceRef::Tie { lo, hi }
            },
        );
    }
    wins.iter().map(|w| intervals[w]).collect()
}
