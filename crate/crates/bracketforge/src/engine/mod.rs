//! Execution of formats under strength models: single playthroughs, exact
//! enumeration, and reproducible parallel Monte Carlo.

pub mod dynamic;
mod exact;
mod mc;
pub mod rng;

pub use exact::{enumerate_exact, DEFAULT_STATE_CAP};
pub use mc::simulate;
pub use rng::{replication_seed, SplitMix64};

use std::collections::BTreeMap;

use crate::flowchart;
use crate::types::{
    DynamicPolicy, Format, MatchId, ModelError, Multibracket, PlaceRef, Seed, Sink, Source,
    StrengthModel,
};

#[derive(thiserror::Error, Clone, PartialEq, Debug)]
pub enum EngineError {
    #[error("invalid format: {reason}")]
    InvalidFormat { reason: String },
    #[error("model covers {model_teams} team(s) but the format has {format_teams}")]
    ModelMismatch { model_teams: u32, format_teams: u32 },
    #[error("enumeration needs more than {cap} branches; raise the state cap")]
    StateCapExceeded { cap: u64 },
    #[error("at least one replication is required")]
    ZeroReps,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Raw parameters for [`make_model`].
#[derive(Clone, PartialEq, Debug)]
pub enum ModelSpec {
    Coin,
    BradleyTerry { strengths: Vec<f64> },
    Matrix { p: Vec<Vec<f64>> },
}

/// Builds a validated strength model from raw parameters.
pub fn make_model(spec: ModelSpec) -> Result<StrengthModel, ModelError> {
    match spec {
        ModelSpec::Coin => Ok(StrengthModel::coin()),
        ModelSpec::BradleyTerry { strengths } => StrengthModel::bradley_terry(strengths),
        ModelSpec::Matrix { p } => StrengthModel::matrix(p),
    }
}

/// One decided match in an outcome: a static match id or a synthesized
/// `R{round}M{pair}` label for dynamic rounds.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MatchRecord {
    pub label: String,
    pub winner: Seed,
    pub loser: Seed,
}

/// The result of one complete playthrough.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Outcome {
    /// Final standing per seed; tie blocks stay blocks, they are not
    /// resolved to a single number.
    pub placements: BTreeMap<Seed, PlaceRef>,
    pub match_results: Vec<MatchRecord>,
}

impl Outcome {
    /// Matches played per seed, counting each match for both participants.
    pub fn matches_played(&self, team_count: u32) -> Vec<u32> {
        let mut played = vec![0u32; team_count as usize];
        for r in &self.match_results {
            played[r.winner.index()] += 1;
            played[r.loser.index()] += 1;
        }
        played
    }
}

pub(crate) fn check_runnable(format: &Format, model: &StrengthModel) -> Result<(), EngineError> {
    match format {
        Format::Static(mb) => {
            let report = flowchart::validate(mb);
            if !report.ok() {
                return Err(EngineError::InvalidFormat {
                    reason: report.to_string(),
                });
            }
        }
        Format::Dynamic(DynamicPolicy::Swiss {
            team_count, rounds, ..
        }) => {
            if *team_count < 2 || *team_count % 2 != 0 || *rounds < 1 {
                return Err(EngineError::InvalidFormat {
                    reason: format!(
                        "swiss needs an even team count of at least 2 and at least one round, got {team_count} team(s) over {rounds} round(s)"
                    ),
                });
            }
        }
        Format::Dynamic(_) => {}
    }
    let teams = format.team_count();
    if let Some(covered) = model.team_count() {
        if covered != teams {
            return Err(EngineError::ModelMismatch {
                model_teams: covered,
                format_teams: teams,
            });
        }
    }
    Ok(())
}

fn sink_place(sink: &Sink) -> Option<PlaceRef> {
    match sink {
        Sink::Place(p) => Some(PlaceRef::Place(*p)),
        Sink::Tie { lo, hi } => Some(PlaceRef::Tie { lo: *lo, hi: *hi }),
        Sink::ToSlot(..) => None,
    }
}

/// Plays a format once. Static DAGs execute in topological order; dynamic
/// policies run round by round under their pairing rule. Each match is
/// sampled independently from the model, and the outcome is a deterministic
/// function of the stream.
pub fn play(
    format: &Format,
    model: &StrengthModel,
    stream: &mut SplitMix64,
) -> Result<Outcome, EngineError> {
    check_runnable(format, model)?;
    Ok(play_unchecked(format, model, stream))
}

/// Playthrough without revalidation; used by the Monte Carlo loop after a
/// one-time check.
pub(crate) fn play_unchecked(
    format: &Format,
    model: &StrengthModel,
    stream: &mut SplitMix64,
) -> Outcome {
    match format {
        Format::Static(mb) => play_static(mb, model, stream),
        Format::Dynamic(policy) => play_dynamic(policy, model, stream),
    }
}

fn play_static(mb: &Multibracket, model: &StrengthModel, stream: &mut SplitMix64) -> Outcome {
    let order = flowchart::topological_order(mb).expect("validated format is acyclic");
    let mut winners: BTreeMap<&MatchId, Seed> = BTreeMap::new();
    let mut losers: BTreeMap<&MatchId, Seed> = BTreeMap::new();
    let mut outcome = Outcome {
        placements: BTreeMap::new(),
        match_results: Vec::with_capacity(order.len()),
    };
    for id in &order {
        let m = mb.get(id).unwrap();
        let resolve = |src: &Source| -> Seed {
            match src {
                Source::Entry(s) => *s,
                Source::WinnerOf(x) => winners[x],
                Source::LoserOf(x) => losers[x],
            }
        };
        let a = resolve(&m.slot_a);
        let b = resolve(&m.slot_b);
        let a_wins = stream.next_f64() < model.win_probability(a, b);
        let (winner, loser) = if a_wins { (a, b) } else { (b, a) };
        winners.insert(id, winner);
        losers.insert(id, loser);
        outcome.match_results.push(MatchRecord {
            label: id.to_string(),
            winner,
            loser,
        });
        if let Some(place) = sink_place(&m.on_win) {
            outcome.placements.insert(winner, place);
        }
        if let Some(place) = sink_place(&m.on_lose) {
            outcome.placements.insert(loser, place);
        }
    }
    outcome
}

fn interval_ref(lo: u32, hi: u32) -> PlaceRef {
    if lo == hi {
        PlaceRef::Place(lo)
    } else {
        PlaceRef::Tie { lo, hi }
    }
}

fn play_dynamic(policy: &DynamicPolicy, model: &StrengthModel, stream: &mut SplitMix64) -> Outcome {
    let mut outcome = Outcome {
        placements: BTreeMap::new(),
        match_results: Vec::new(),
    };
    match policy {
        DynamicPolicy::Reseed { signature } | DynamicPolicy::RandomDraw { signature } => {
            let random = matches!(policy, DynamicPolicy::RandomDraw { .. });
            let mut alive: Vec<Seed> = Vec::new();
            for round in 1..=signature.rounds() {
                alive.extend(signature.entrants_at_round(round));
                alive.sort();
                if random {
                    stream.shuffle(&mut alive);
                }
                let pairs = if random {
                    alive.chunks(2).map(|c| (c[0], c[1])).collect()
                } else {
                    dynamic::fold_pairs(&alive)
                };
                let (lo, hi) = signature.loser_places(round);
                alive = Vec::with_capacity(pairs.len());
                for (k, (a, b)) in pairs.into_iter().enumerate() {
                    let a_wins = stream.next_f64() < model.win_probability(a, b);
                    let (winner, loser) = if a_wins { (a, b) } else { (b, a) };
                    outcome.match_results.push(MatchRecord {
                        label: format!("R{round}M{}", k + 1),
                        winner,
                        loser,
                    });
                    outcome.placements.insert(loser, interval_ref(lo, hi));
                    alive.push(winner);
                }
            }
            outcome.placements.insert(alive[0], PlaceRef::Place(1));
        }
        DynamicPolicy::Swiss {
            team_count, rounds, ..
        } => {
            let mut wins = vec![0u32; *team_count as usize];
            for round in 1..=*rounds {
                let pairs = dynamic::swiss_pairs(&wins);
                for (k, (a, b)) in pairs.into_iter().enumerate() {
                    let a_wins = stream.next_f64() < model.win_probability(a, b);
                    let (winner, loser) = if a_wins { (a, b) } else { (b, a) };
                    outcome.match_results.push(MatchRecord {
                        label: format!("R{round}M{}", k + 1),
                        winner,
                        loser,
                    });
                    wins[winner.index()] += 1;
                }
            }
            for (i, block) in dynamic::record_blocks(&wins).into_iter().enumerate() {
                outcome.placements.insert(Seed((i + 1) as u32), block);
            }
        }
    }
    outcome
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builder::{build_proper_bracket, make_swiss};
    use crate::types::{BracketSignature, SwissTiebreak};

    fn favorites_matrix(n: usize) -> StrengthModel {
        let p = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            0.0
                        } else if i < j {
                            1.0
                        } else {
                            0.0
                        }
                    })
                    .collect()
            })
            .collect();
        StrengthModel::matrix(p).unwrap()
    }

    fn underdogs_matrix(n: usize) -> StrengthModel {
        let p = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            0.0
                        } else if i > j {
                            1.0
                        } else {
                            0.0
                        }
                    })
                    .collect()
            })
            .collect();
        StrengthModel::matrix(p).unwrap()
    }

    #[test]
    fn deterministic_favorite_wins_two_team() {
        let sig = BracketSignature::new(vec![2]).unwrap();
        let format = Format::Static(build_proper_bracket(&sig));
        let model = StrengthModel::matrix(vec![vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        let mut stream = SplitMix64::new(replication_seed(1, 0));
        let outcome = play(&format, &model, &mut stream).unwrap();
        assert_eq!(outcome.placements[&Seed(1)], PlaceRef::Place(1));
        assert_eq!(outcome.placements[&Seed(2)], PlaceRef::Place(2));
    }

    #[test]
    fn favorites_take_expected_places_in_eight_bracket() {
        let sig = BracketSignature::new(vec![8, 0, 0]).unwrap();
        let format = Format::Static(build_proper_bracket(&sig));
        let model = favorites_matrix(8);
        let mut stream = SplitMix64::new(replication_seed(5, 0));
        let outcome = play(&format, &model, &mut stream).unwrap();
        assert_eq!(outcome.placements[&Seed(1)], PlaceRef::Place(1));
        assert_eq!(outcome.placements[&Seed(2)], PlaceRef::Place(2));
        assert_eq!(outcome.placements[&Seed(3)], PlaceRef::Tie { lo: 3, hi: 4 });
        assert_eq!(outcome.placements[&Seed(4)], PlaceRef::Tie { lo: 3, hi: 4 });
        assert_eq!(outcome.placements[&Seed(8)], PlaceRef::Tie { lo: 5, hi: 8 });
    }

    #[test]
    fn same_stream_same_outcome() {
        let sig = BracketSignature::new(vec![8, 0, 0]).unwrap();
        let format = Format::Static(build_proper_bracket(&sig));
        let model = StrengthModel::coin();
        let mut s1 = SplitMix64::new(replication_seed(9, 3));
        let mut s2 = SplitMix64::new(replication_seed(9, 3));
        let o1 = play(&format, &model, &mut s1).unwrap();
        let o2 = play(&format, &model, &mut s2).unwrap();
        assert_eq!(o1, o2);
    }

    #[test]
    fn reseed_repairs_by_surviving_seeds() {
        // all round-one favorites fall, so the reseeded second round must
        // fold the surviving seeds 5..8 as {5,8} and {6,7}
        let sig = BracketSignature::new(vec![8, 0, 0]).unwrap();
        let format = Format::Dynamic(DynamicPolicy::Reseed { signature: sig });
        let model = underdogs_matrix(8);
        let mut stream = SplitMix64::new(replication_seed(2, 0));
        let outcome = play(&format, &model, &mut stream).unwrap();
        let round2: Vec<(u32, u32)> = outcome
            .match_results
            .iter()
            .filter(|r| r.label.starts_with("R2"))
            .map(|r| {
                let (a, b) = (r.winner.0, r.loser.0);
                (a.min(b), a.max(b))
            })
            .collect();
        assert_eq!(round2, vec![(5, 8), (6, 7)]);
    }

    #[test]
    fn swiss_favorite_sweeps() {
        let format = Format::Dynamic(make_swiss(8, 3, SwissTiebreak::BySeed).unwrap());
        let model = favorites_matrix(8);
        let mut stream = SplitMix64::new(replication_seed(7, 0));
        let outcome = play(&format, &model, &mut stream).unwrap();
        assert_eq!(outcome.placements[&Seed(1)], PlaceRef::Place(1));
        assert_eq!(outcome.placements[&Seed(8)], PlaceRef::Place(8));
        // 12 matches held, everyone plays three
        assert_eq!(outcome.match_results.len(), 12);
        assert!(outcome.matches_played(8).iter().all(|&m| m == 3));
    }

    #[test]
    fn swiss_two_teams_single_match() {
        let format = Format::Dynamic(make_swiss(2, 1, SwissTiebreak::BySeed).unwrap());
        let model = favorites_matrix(2);
        let mut stream = SplitMix64::new(replication_seed(4, 0));
        let outcome = play(&format, &model, &mut stream).unwrap();
        assert_eq!(outcome.placements[&Seed(1)], PlaceRef::Place(1));
        assert_eq!(outcome.placements[&Seed(2)], PlaceRef::Place(2));
    }

    #[test]
    fn make_model_builds_and_validates() {
        let bt = make_model(ModelSpec::BradleyTerry {
            strengths: vec![2.0, 1.0],
        })
        .unwrap();
        assert!((bt.win_probability(Seed(1), Seed(2)) - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(
            make_model(ModelSpec::Coin)
                .unwrap()
                .win_probability(Seed(1), Seed(2)),
            0.5
        );
        let err = make_model(ModelSpec::Matrix {
            p: vec![vec![0.0, 0.7], vec![0.4, 0.0]],
        })
        .unwrap_err();
        assert!(matches!(err, ModelError::BadMatrix(_)));
    }

    #[test]
    fn engine_refuses_invalid_formats() {
        // two matches both claiming place 1 and omitting place 3
        let mut matches = std::collections::BTreeMap::new();
        for (id, a, b) in [("A", 1, 2), ("B", 3, 4)] {
            matches.insert(
                crate::types::MatchId::new(id),
                crate::types::Match {
                    slot_a: Source::Entry(Seed(a)),
                    slot_b: Source::Entry(Seed(b)),
                    on_win: Sink::Place(1),
                    on_lose: Sink::Place(if a == 1 { 2 } else { 4 }),
                    round_hint: None,
                },
            );
        }
        let broken = Format::Static(Multibracket::new(4, matches));
        let mut stream = SplitMix64::new(0);
        assert!(matches!(
            play(&broken, &StrengthModel::coin(), &mut stream),
            Err(EngineError::InvalidFormat { .. })
        ));
        assert!(matches!(
            crate::engine::enumerate_exact(&broken, &StrengthModel::coin(), 1 << 20),
            Err(EngineError::InvalidFormat { .. })
        ));
        // a hand-built odd swiss policy is refused too
        let odd = Format::Dynamic(DynamicPolicy::Swiss {
            team_count: 7,
            rounds: 3,
            tiebreak: crate::types::SwissTiebreak::BySeed,
        });
        assert!(matches!(
            play(&odd, &StrengthModel::coin(), &mut stream),
            Err(EngineError::InvalidFormat { .. })
        ));
    }

    #[test]
    fn model_size_must_match_format() {
        let sig = BracketSignature::new(vec![8, 0, 0]).unwrap();
        let format = Format::Static(build_proper_bracket(&sig));
        let model = StrengthModel::bradley_terry(vec![1.0, 2.0]).unwrap();
        let mut stream = SplitMix64::new(0);
        assert!(matches!(
            play(&format, &model, &mut stream),
            Err(EngineError::ModelMismatch {
                model_teams: 2,
                format_teams: 8
            })
        ));
    }

    #[test]
    fn elimination_accounting() {
        let sig = BracketSignature::new(vec![8, 0, 0]).unwrap();
        let format = Format::Static(build_proper_bracket(&sig));
        let model = StrengthModel::coin();
        for rep in 0..20 {
            let mut stream = SplitMix64::new(replication_seed(11, rep));
            let outcome = play(&format, &model, &mut stream).unwrap();
            assert_eq!(outcome.match_results.len(), 7);
            let played: u32 = outcome.matches_played(8).iter().sum();
            assert_eq!(played, 2 * 7);
        }
    }
}
