//! Monte Carlo estimation with reproducible parallel replication.

use std::collections::BTreeMap;

use super::rng::{replication_seed, SplitMix64};
use super::{check_runnable, play_unchecked, EngineError};
use crate::types::{Format, PlacementDistribution, StrengthModel};

/// Per-worker tallies. Integer counts make the merge associative and
/// order-independent, so results are bit-identical for any worker count.
#[derive(Clone)]
struct Tally {
    block_counts: Vec<BTreeMap<(u32, u32), u64>>,
    matches_played: Vec<u64>,
}

impl Tally {
    fn new(n: usize) -> Self {
        Self {
            block_counts: vec![BTreeMap::new(); n],
            matches_played: vec![0; n],
        }
    }

    fn absorb(&mut self, other: Tally) {
        for (mine, theirs) in self.block_counts.iter_mut().zip(other.block_counts) {
            for (block, count) in theirs {
                *mine.entry(block).or_insert(0) += count;
            }
        }
        for (mine, theirs) in self.matches_played.iter_mut().zip(other.matches_played) {
            *mine += theirs;
        }
    }
}

fn run_range(
    format: &Format,
    model: &StrengthModel,
    master_seed: u64,
    reps: std::ops::Range<u64>,
    n: usize,
) -> Tally {
    let mut tally = Tally::new(n);
    for rep in reps {
        let mut stream = SplitMix64::new(replication_seed(master_seed, rep));
        let outcome = play_unchecked(format, model, &mut stream);
        for (seed, place) in &outcome.placements {
            *tally.block_counts[seed.index()]
                .entry(place.interval())
                .or_insert(0) += 1;
        }
        for record in &outcome.match_results {
            tally.matches_played[record.winner.index()] += 1;
            tally.matches_played[record.loser.index()] += 1;
        }
    }
    tally
}

/// Estimates the placement distribution from `reps` independent
/// playthroughs. Replication `r` always draws from the stream derived from
/// `(master_seed, r)`, so the result does not depend on `workers`. Rows are
/// forced to sum to exactly 1, and each cell carries the standard error
/// `sqrt(p(1-p)/reps)`.
pub fn simulate(
    format: &Format,
    model: &StrengthModel,
    reps: u64,
    master_seed: u64,
    workers: usize,
) -> Result<PlacementDistribution, EngineError> {
    if reps == 0 {
        return Err(EngineError::ZeroReps);
    }
    check_runnable(format, model)?;
    let n = format.team_count() as usize;
    let workers = workers.max(1).min(reps as usize);

    let mut total = Tally::new(n);
    if workers == 1 {
        total = run_range(format, model, master_seed, 0..reps, n);
    } else {
        let chunk = reps.div_ceil(workers as u64);
        let tallies = std::thread::scope(|scope| {
            let handles: Vec<_> = (0..workers as u64)
                .map(|w| {
                    let lo = w * chunk;
                    let hi = ((w + 1) * chunk).min(reps);
                    scope.spawn(move || run_range(format, model, master_seed, lo..hi, n))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("worker panicked"))
                .collect::<Vec<_>>()
        });
        for t in tallies {
            total.absorb(t);
        }
    }

    let repsf = reps as f64;
    let mut d = vec![vec![0.0; n]; n];
    for (s, blocks) in total.block_counts.iter().enumerate() {
        for (&(lo, hi), &count) in blocks {
            let share = count as f64 / repsf / (hi - lo + 1) as f64;
            for p in lo..=hi {
                d[s][(p - 1) as usize] += share;
            }
        }
        // pin the row sum to exactly 1: recompute the last nonzero cell
        // from the left-to-right partial sum, so re-summing the row in
        // order reproduces 1.0 bit-exactly (trailing cells are exact
        // zeros). The nonzero cell holds at least one replication of mass,
        // so the rounding residual cannot push it out of [0, 1].
        let last = (0..n)
            .rev()
            .find(|&p| d[s][p] != 0.0)
            .expect("every replication places every seed");
        let partial: f64 = d[s][..last].iter().sum();
        d[s][last] = 1.0 - partial;
    }
    let std_err = d
        .iter()
        .map(|row| {
            row.iter()
                .map(|&p| (p.clamp(0.0, 1.0) * (1.0 - p.clamp(0.0, 1.0)) / repsf).sqrt())
                .collect()
        })
        .collect();
    let expected_matches: Vec<f64> = total
        .matches_played
        .iter()
        .map(|&m| m as f64 / repsf)
        .collect();
    let total_matches = expected_matches.iter().sum::<f64>() / 2.0;
    Ok(PlacementDistribution {
        d,
        std_err: Some(std_err),
        expected_matches,
        total_matches,
        reps: Some(reps),
    })
}
