//! Exact placement distributions by full outcome enumeration.
//!
//! Static graphs branch over every match outcome in topological order, so
//! correlated paths (rematches in nonlinear formats) are handled exactly.
//! Dynamic policies branch round by round and merge identical states:
//! knockout policies key on the surviving seed set, Swiss on the per-seed
//! record vector. Enumeration is single-threaded with a deterministic
//! branch order.

use std::collections::BTreeMap;

use super::dynamic::{all_matchings, fold_pairs, record_blocks, swiss_pairs};
use super::{check_runnable, EngineError};
use crate::flowchart;
use crate::types::{
    BracketSignature, DynamicPolicy, Format, Multibracket, PlacementDistribution, Seed, Sink,
    Source, StrengthModel,
};

/// Default branch budget: enough for any static format with 22 matches.
pub const DEFAULT_STATE_CAP: u64 = 1 << 22;

struct Accumulator {
    n: usize,
    block_mass: Vec<BTreeMap<(u32, u32), f64>>,
    expected_matches: Vec<f64>,
}

impl Accumulator {
    fn new(n: usize) -> Self {
        Self {
            n,
            block_mass: vec![BTreeMap::new(); n],
            expected_matches: vec![0.0; n],
        }
    }

    fn place(&mut self, seed: Seed, lo: u32, hi: u32, prob: f64) {
        *self.block_mass[seed.index()].entry((lo, hi)).or_insert(0.0) += prob;
    }

    fn finish(self) -> PlacementDistribution {
        let n = self.n;
        let mut d = vec![vec![0.0; n]; n];
        for (s, blocks) in self.block_mass.iter().enumerate() {
            for (&(lo, hi), &mass) in blocks {
                let share = mass / (hi - lo + 1) as f64;
                for p in lo..=hi {
                    d[s][(p - 1) as usize] += share;
                }
            }
        }
        let total_matches = self.expected_matches.iter().sum::<f64>() / 2.0;
        PlacementDistribution {
            d,
            std_err: None,
            expected_matches: self.expected_matches,
            total_matches,
            reps: None,
        }
    }
}

fn spend(budget: &mut u64, cap: u64) -> Result<(), EngineError> {
    if *budget == 0 {
        return Err(EngineError::StateCapExceeded { cap });
    }
    *budget -= 1;
    Ok(())
}

/// Computes the exact placement distribution by summing probability over
/// every outcome assignment, within a branch budget.
pub fn enumerate_exact(
    format: &Format,
    model: &StrengthModel,
    state_cap: u64,
) -> Result<PlacementDistribution, EngineError> {
    check_runnable(format, model)?;
    let mut budget = state_cap;
    let dist = match format {
        Format::Static(mb) => enumerate_static(mb, model, &mut budget, state_cap)?,
        Format::Dynamic(DynamicPolicy::Reseed { signature }) => {
            enumerate_knockout(signature, false, model, &mut budget, state_cap)?
        }
        Format::Dynamic(DynamicPolicy::RandomDraw { signature }) => {
            enumerate_knockout(signature, true, model, &mut budget, state_cap)?
        }
        Format::Dynamic(DynamicPolicy::Swiss {
            team_count, rounds, ..
        }) => enumerate_swiss(*team_count, *rounds, model, &mut budget, state_cap)?,
    };
    debug_assert!(
        dist.stochasticity_error() < 1e-9,
        "exact distribution drifted from doubly stochastic"
    );
    Ok(dist)
}

enum SlotRef {
    Entry(Seed),
    Winner(usize),
    Loser(usize),
}

struct CompiledMatch {
    slot_a: SlotRef,
    slot_b: SlotRef,
    win_block: Option<(u32, u32)>,
    lose_block: Option<(u32, u32)>,
}

fn enumerate_static(
    mb: &Multibracket,
    model: &StrengthModel,
    budget: &mut u64,
    cap: u64,
) -> Result<PlacementDistribution, EngineError> {
    let order = flowchart::topological_order(mb).expect("validated format is acyclic");
    let position: BTreeMap<_, _> = order.iter().enumerate().map(|(i, id)| (id, i)).collect();
    let compiled: Vec<CompiledMatch> = order
        .iter()
        .map(|id| {
            let m = mb.get(id).unwrap();
            let slot = |src: &Source| match src {
                Source::Entry(s) => SlotRef::Entry(*s),
                Source::WinnerOf(x) => SlotRef::Winner(position[x]),
                Source::LoserOf(x) => SlotRef::Loser(position[x]),
            };
            let block = |sink: &Sink| match sink {
                Sink::Place(p) => Some((*p, *p)),
                Sink::Tie { lo, hi } => Some((*lo, *hi)),
                Sink::ToSlot(..) => None,
            };
            CompiledMatch {
                slot_a: slot(&m.slot_a),
                slot_b: slot(&m.slot_b),
                win_block: block(&m.on_win),
                lose_block: block(&m.on_lose),
            }
        })
        .collect();

    let n = mb.team_count() as usize;
    let mut acc = Accumulator::new(n);
    let mut winners = vec![Seed(0); compiled.len()];
    let mut losers = vec![Seed(0); compiled.len()];
    let mut played = vec![0u32; n];
    descend_static(
        &compiled,
        model,
        0,
        1.0,
        &mut winners,
        &mut losers,
        &mut played,
        &mut acc,
        budget,
        cap,
    )?;
    Ok(acc.finish())
}

#[allow(clippy::too_many_arguments)]
fn descend_static(
    compiled: &[CompiledMatch],
    model: &StrengthModel,
    idx: usize,
    prob: f64,
    winners: &mut Vec<Seed>,
    losers: &mut Vec<Seed>,
    played: &mut Vec<u32>,
    acc: &mut Accumulator,
    budget: &mut u64,
    cap: u64,
) -> Result<(), EngineError> {
    if idx == compiled.len() {
        spend(budget, cap)?;
        for (k, m) in compiled.iter().enumerate() {
            if let Some((lo, hi)) = m.win_block {
                acc.place(winners[k], lo, hi, prob);
            }
            if let Some((lo, hi)) = m.lose_block {
                acc.place(losers[k], lo, hi, prob);
            }
        }
        for (s, &count) in played.iter().enumerate() {
            acc.expected_matches[s] += count as f64 * prob;
        }
        return Ok(());
    }
    let m = &compiled[idx];
    let resolve = |slot: &SlotRef, winners: &[Seed], losers: &[Seed]| match slot {
        SlotRef::Entry(s) => *s,
        SlotRef::Winner(k) => winners[*k],
        SlotRef::Loser(k) => losers[*k],
    };
    let a = resolve(&m.slot_a, winners, losers);
    let b = resolve(&m.slot_b, winners, losers);
    let p = model.win_probability(a, b);
    played[a.index()] += 1;
    played[b.index()] += 1;
    for (winner, loser, branch) in [(a, b, p), (b, a, 1.0 - p)] {
        if branch > 0.0 {
            winners[idx] = winner;
            losers[idx] = loser;
            descend_static(
                compiled,
                model,
                idx + 1,
                prob * branch,
                winners,
                losers,
                played,
                acc,
                budget,
                cap,
            )?;
        }
    }
    played[a.index()] -= 1;
    played[b.index()] -= 1;
    Ok(())
}

/// Branches over the outcomes of one round's pairs, invoking the callback
/// with winners, losers, and the branch probability.
fn branch_outcomes<F>(
    pairs: &[(Seed, Seed)],
    model: &StrengthModel,
    base: f64,
    f: &mut F,
) -> Result<(), EngineError>
where
    F: FnMut(&[Seed], &[Seed], f64) -> Result<(), EngineError>,
{
    fn rec<F>(
        pairs: &[(Seed, Seed)],
        model: &StrengthModel,
        k: usize,
        prob: f64,
        winners: &mut Vec<Seed>,
        losers: &mut Vec<Seed>,
        f: &mut F,
    ) -> Result<(), EngineError>
    where
        F: FnMut(&[Seed], &[Seed], f64) -> Result<(), EngineError>,
    {
        if k == pairs.len() {
            return f(winners, losers, prob);
        }
        let (a, b) = pairs[k];
        let p = model.win_probability(a, b);
        for (winner, loser, branch) in [(a, b, p), (b, a, 1.0 - p)] {
            if branch > 0.0 {
                winners.push(winner);
                losers.push(loser);
                rec(pairs, model, k + 1, prob * branch, winners, losers, f)?;
                winners.pop();
                losers.pop();
            }
        }
        Ok(())
    }
    let mut winners = Vec::with_capacity(pairs.len());
    let mut losers = Vec::with_capacity(pairs.len());
    rec(pairs, model, 0, base, &mut winners, &mut losers, f)
}

fn enumerate_knockout(
    sig: &BracketSignature,
    random: bool,
    model: &StrengthModel,
    budget: &mut u64,
    cap: u64,
) -> Result<PlacementDistribution, EngineError> {
    let n = sig.team_count() as usize;
    let mut acc = Accumulator::new(n);
    let mut states: BTreeMap<Vec<Seed>, f64> = BTreeMap::new();
    states.insert(Vec::new(), 1.0);
    for round in 1..=sig.rounds() {
        let entrants = sig.entrants_at_round(round);
        let (lo, hi) = sig.loser_places(round);
        let mut next: BTreeMap<Vec<Seed>, f64> = BTreeMap::new();
        for (alive, prob) in states {
            let mut field = alive;
            field.extend(entrants.iter().copied());
            field.sort();
            let pairings = if random {
                all_matchings(&field)
            } else {
                vec![fold_pairs(&field)]
            };
            let share = prob / pairings.len() as f64;
            for pairing in &pairings {
                branch_outcomes(pairing, model, share, &mut |winners, losers, p| {
                    spend(budget, cap)?;
                    for &l in losers {
                        acc.place(l, lo, hi, p);
                        let entered = sig.entry_round(l);
                        acc.expected_matches[l.index()] += (round - entered + 1) as f64 * p;
                    }
                    let mut key = winners.to_vec();
                    key.sort();
                    *next.entry(key).or_insert(0.0) += p;
                    Ok(())
                })?;
            }
        }
        states = next;
    }
    for (alive, prob) in states {
        let champion = alive[0];
        acc.place(champion, 1, 1, prob);
        let entered = sig.entry_round(champion);
        acc.expected_matches[champion.index()] += (sig.rounds() - entered + 1) as f64 * prob;
    }
    Ok(acc.finish())
}

fn enumerate_swiss(
    team_count: u32,
    rounds: u32,
    model: &StrengthModel,
    budget: &mut u64,
    cap: u64,
) -> Result<PlacementDistribution, EngineError> {
    let n = team_count as usize;
    let mut acc = Accumulator::new(n);
    let mut states: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
    states.insert(vec![0; n], 1.0);
    for _ in 0..rounds {
        let mut next: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
        for (wins, prob) in states {
            let pairs = swiss_pairs(&wins);
            branch_outcomes(&pairs, model, prob, &mut |winners, _, p| {
                spend(budget, cap)?;
                let mut advanced = wins.clone();
                for w in winners {
                    advanced[w.index()] += 1;
                }
                *next.entry(advanced).or_insert(0.0) += p;
                Ok(())
            })?;
        }
        states = next;
    }
    for (wins, prob) in states {
        for (i, block) in record_blocks(&wins).into_iter().enumerate() {
            let (lo, hi) = block.interval();
            acc.place(Seed((i + 1) as u32), lo, hi, prob);
        }
        for s in 0..n {
            acc.expected_matches[s] += rounds as f64 * prob;
        }
    }
    Ok(acc.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builder::{attach_consolation, build_proper_bracket, make_swiss};
    use crate::types::SwissTiebreak;

    fn sig(entrants: &[u32]) -> BracketSignature {
        BracketSignature::new(entrants.to_vec()).unwrap()
    }

    #[test]
    fn coin_on_symmetric_four_with_third_place_is_uniform() {
        let mb = attach_consolation(&build_proper_bracket(&sig(&[4, 0])), 1).unwrap();
        let dist = enumerate_exact(
            &Format::Static(mb),
            &StrengthModel::coin(),
            DEFAULT_STATE_CAP,
        )
        .unwrap();
        for row in &dist.d {
            for &cell in row {
                assert!((cell - 0.25).abs() < 1e-9, "cell {cell}");
            }
        }
        assert!((dist.total_matches - 4.0).abs() < 1e-9);
    }

    #[test]
    fn two_team_exact_probabilities() {
        let mb = build_proper_bracket(&sig(&[2]));
        let model = StrengthModel::matrix(vec![vec![0.0, 0.7], vec![0.3, 0.0]]).unwrap();
        let dist = enumerate_exact(&Format::Static(mb), &model, DEFAULT_STATE_CAP).unwrap();
        assert!((dist.d[0][0] - 0.7).abs() < 1e-12);
        assert!((dist.d[0][1] - 0.3).abs() < 1e-12);
        assert!((dist.d[1][0] - 0.3).abs() < 1e-12);
        assert!((dist.total_matches - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reseed_four_equals_static_four() {
        let s = sig(&[4, 0]);
        let model = StrengthModel::matrix(vec![
            vec![0.0, 0.6, 0.7, 0.8],
            vec![0.4, 0.0, 0.55, 0.65],
            vec![0.3, 0.45, 0.0, 0.6],
            vec![0.2, 0.35, 0.4, 0.0],
        ])
        .unwrap();
        let fixed = enumerate_exact(
            &Format::Static(build_proper_bracket(&s)),
            &model,
            DEFAULT_STATE_CAP,
        )
        .unwrap();
        let reseed = enumerate_exact(
            &Format::Dynamic(DynamicPolicy::Reseed { signature: s }),
            &model,
            DEFAULT_STATE_CAP,
        )
        .unwrap();
        for (ra, rb) in fixed.d.iter().zip(&reseed.d) {
            for (&a, &b) in ra.iter().zip(rb) {
                assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn swiss_coin_profile_marginals() {
        let format = Format::Dynamic(make_swiss(8, 3, SwissTiebreak::BySeed).unwrap());
        let dist = enumerate_exact(&format, &StrengthModel::coin(), DEFAULT_STATE_CAP).unwrap();
        assert!(dist.stochasticity_error() < 1e-9);
        // every seed plays exactly three matches
        for &m in &dist.expected_matches {
            assert!((m - 3.0).abs() < 1e-12);
        }
        assert!((dist.total_matches - 12.0).abs() < 1e-9);
    }

    #[test]
    fn per_seed_expected_matches_under_coin() {
        let mb = build_proper_bracket(&sig(&[8, 0, 0]));
        let dist = enumerate_exact(
            &Format::Static(mb),
            &StrengthModel::coin(),
            DEFAULT_STATE_CAP,
        )
        .unwrap();
        // geometric: one match always, half reach the semis, a quarter the final
        for &m in &dist.expected_matches {
            assert!((m - 1.75).abs() < 1e-12);
        }
        assert!((dist.total_matches - 7.0).abs() < 1e-12);
    }

    #[test]
    fn state_cap_is_enforced() {
        let mb = build_proper_bracket(&sig(&[8, 0, 0]));
        let err = enumerate_exact(&Format::Static(mb), &StrengthModel::coin(), 16).unwrap_err();
        assert!(matches!(err, EngineError::StateCapExceeded { cap: 16 }));
    }

    #[test]
    fn swiss_with_odd_groups_stays_stochastic() {
        // six teams over two rounds: round-two groups have odd sizes and
        // must spill downward
        let format = Format::Dynamic(make_swiss(6, 2, SwissTiebreak::BySeed).unwrap());
        let model = StrengthModel::bradley_terry(vec![3.0, 2.5, 2.0, 1.5, 1.0, 0.5]).unwrap();
        let dist = enumerate_exact(&format, &model, DEFAULT_STATE_CAP).unwrap();
        assert!(dist.stochasticity_error() < 1e-9);
        for &m in &dist.expected_matches {
            assert!((m - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn random_draw_coin_is_uniform_over_blocks() {
        let format = Format::Dynamic(DynamicPolicy::RandomDraw {
            signature: sig(&[4, 0]),
        });
        let dist = enumerate_exact(&format, &StrengthModel::coin(), DEFAULT_STATE_CAP).unwrap();
        for row in &dist.d {
            assert!((row[0] - 0.25).abs() < 1e-9);
        }
        assert!(dist.stochasticity_error() < 1e-9);
    }
}
