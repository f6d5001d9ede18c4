//! Construction of executable formats: proper brackets from signatures,
//! standard seed orders, consolation and semibracket composition, and the
//! dynamic reseed, random-draw, and Swiss policies.

use std::collections::{BTreeMap, BTreeSet};

use crate::flowchart::{self, ValidationReport, ViolationCode, ViolationSubject};
use crate::signatures::SignatureError;
use crate::types::{
    BracketSignature, DynamicPolicy, Match, MatchId, Multibracket, Seed, Sink, SlotSide, Source,
    SwissTiebreak,
};

#[derive(thiserror::Error, Clone, PartialEq, Debug)]
pub enum BuildError {
    #[error("invalid signature: {0}")]
    InvalidSignature(#[from] SignatureError),
    #[error("{slots} slots is not a power of two")]
    NotPowerOfTwo { slots: u32 },
    #[error("not a bracket: {reason}")]
    NotABracket { reason: String },
    #[error("consolation depth {depth} does not fit a bracket with {rounds} round(s)")]
    DepthExceedsRounds { depth: u32, rounds: u32 },
    #[error("{got} entrant source(s) for a {expected}-team signature")]
    LengthMismatch { expected: usize, got: usize },
    #[error("place_lo {place_lo} must be at least 1")]
    PlaceOutOfRange { place_lo: u32 },
    #[error("place {place} awarded by more than one fragment")]
    PlaceOverlap { place: u32 },
    #[error("dangling source: {reference}")]
    DanglingSource { reference: String },
    #[error("duplicate match id {0}")]
    DuplicateMatchId(MatchId),
    #[error("swiss team count {0} must be even and at least 2")]
    OddTeamCount(u32),
    #[error("swiss rounds must be at least 1")]
    ZeroRounds,
    #[error("composed fragments do not form a linear chain")]
    NotLinear,
    #[error("composed format failed validation:\n{0}")]
    ValidationFailed(ValidationReport),
}

/// Recursive seed-to-slot arrangement for a full power-of-two round:
/// `order(1) = [1]`, and doubling replaces each `x` with the pair
/// `(x, 2m + 1 - x)`. Adjacent pairs are round-one opponents, and every
/// later round folds best-vs-worst when favorites win.
pub fn standard_seed_order(slots: u32) -> Result<Vec<u32>, BuildError> {
    if slots == 0 || !slots.is_power_of_two() {
        return Err(BuildError::NotPowerOfTwo { slots });
    }
    let mut order = vec![1u32];
    let mut m = 1u32;
    while m < slots {
        m *= 2;
        let mut next = Vec::with_capacity(m as usize);
        for &x in &order {
            next.push(x);
            next.push(m + 1 - x);
        }
        order = next;
    }
    Ok(order)
}

/// The conventional single-elimination signature for `team_count` teams:
/// byes fill the bracket up to the next power of two, so the first round
/// holds `2t - 2^k` teams and the byes enter at round two.
pub fn balanced_signature(team_count: u32) -> Result<BracketSignature, BuildError> {
    if team_count < 2 {
        return Err(BuildError::InvalidSignature(SignatureError::TooFewTeams {
            team_count,
        }));
    }
    let k = 32 - (team_count - 1).leading_zeros();
    let full = 1u32 << k;
    let mut entrants = vec![2 * team_count - full, full - team_count];
    entrants.resize(k as usize, 0);
    Ok(BracketSignature::new(entrants)?)
}

/// Builds the match set of a proper bracket over relative seeds `1..=t`,
/// with slot sources substituted from `sources[rel - 1]` and all awarded
/// places offset so the champion receives `place_lo`.
///
/// Match ids are `{prefix}R{round}M{j}` where `j` is the rank of the
/// match's favored participant within the round.
fn assemble_bracket(
    sig: &BracketSignature,
    place_lo: u32,
    sources: &[Source],
    prefix: &str,
) -> BTreeMap<MatchId, Match> {
    let rounds = sig.rounds();
    let n = sig.team_count();
    let offset = place_lo - 1;
    let alive = sig.alive();
    let id = |round: u32, j: u32| MatchId::new(format!("{prefix}R{round}M{j}"));

    let mut matches = BTreeMap::new();
    for round in 1..=rounds {
        let after = sig.entering_after(round);
        let after_prev = if round == 1 {
            n
        } else {
            sig.entering_after(round - 1)
        };
        let participants = alive[(round - 1) as usize] + sig.entrants()[(round - 1) as usize];
        let pair_sum = 2 * after + participants + 1;
        let held = alive[round as usize];

        // under all-favorites, round participants carry the contiguous
        // expected-seed interval (after, after + participants]; entrants are
        // the best of them and survivors arrive from the previous round
        let source_of = |expected: u32| -> Source {
            if expected <= after_prev {
                sources[(expected - 1) as usize].clone()
            } else {
                Source::WinnerOf(id(round - 1, expected - after_prev))
            }
        };

        for j in 1..=held {
            let favored = after + j;
            let other = pair_sum - favored;
            let on_win = if round == rounds {
                Sink::Place(1 + offset)
            } else {
                let after_next = sig.entering_after(round + 1);
                let held_next = alive[(round + 1) as usize];
                let participants_next = alive[round as usize] + sig.entrants()[round as usize];
                let pair_sum_next = 2 * after_next + participants_next + 1;
                if favored <= after_next + held_next {
                    Sink::ToSlot(id(round + 1, favored - after_next), SlotSide::A)
                } else {
                    Sink::ToSlot(
                        id(round + 1, pair_sum_next - favored - after_next),
                        SlotSide::B,
                    )
                }
            };
            let (lo, hi) = sig.loser_places(round);
            let on_lose = if lo == hi {
                Sink::Place(lo + offset)
            } else {
                Sink::Tie {
                    lo: lo + offset,
                    hi: hi + offset,
                }
            };
            matches.insert(
                id(round, j),
                Match {
                    slot_a: source_of(favored),
                    slot_b: source_of(other),
                    on_win,
                    on_lose,
                    round_hint: Some(round),
                },
            );
        }
    }
    matches
}

/// Builds the proper bracket for a signature: byes go to the best seeds,
/// each round folds best-vs-worst, the champion takes place 1, the final's
/// loser place 2, and earlier losers share a tie block per round.
pub fn build_proper_bracket(sig: &BracketSignature) -> Multibracket {
    let sources: Vec<Source> = (1..=sig.team_count())
        .map(|s| Source::Entry(Seed(s)))
        .collect();
    let matches = assemble_bracket(sig, 1, &sources, "");
    Multibracket::new(sig.team_count(), matches)
}

/// One reason a bracket fails the properness simulation.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PropernessViolation {
    pub round: u32,
    /// `None` for round-level violations (wrong participant set).
    pub match_id: Option<MatchId>,
    pub message: String,
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct PropernessReport {
    pub violations: Vec<PropernessViolation>,
}

impl PropernessReport {
    pub fn is_proper(&self) -> bool {
        self.violations.is_empty()
    }
}

struct FavoritesSim {
    winner: BTreeMap<MatchId, Seed>,
    loser: BTreeMap<MatchId, Seed>,
    pair: BTreeMap<MatchId, (Seed, Seed)>,
}

/// Plays out the bracket with the favorite (lower seed number) always
/// winning. Requires a validated, acyclic graph.
fn favorites_sim(mb: &Multibracket) -> Option<FavoritesSim> {
    let order = flowchart::topological_order(mb)?;
    let mut sim = FavoritesSim {
        winner: BTreeMap::new(),
        loser: BTreeMap::new(),
        pair: BTreeMap::new(),
    };
    for id in order {
        let m = mb.get(&id)?;
        let resolve = |src: &Source, sim: &FavoritesSim| -> Option<Seed> {
            match src {
                Source::Entry(s) => Some(*s),
                Source::WinnerOf(x) => sim.winner.get(x).copied(),
                Source::LoserOf(x) => sim.loser.get(x).copied(),
            }
        };
        let a = resolve(&m.slot_a, &sim)?;
        let b = resolve(&m.slot_b, &sim)?;
        sim.pair.insert(id.clone(), (a, b));
        sim.winner.insert(id.clone(), a.min(b));
        sim.loser.insert(id, a.max(b));
    }
    Some(sim)
}

/// Round assignment for the properness simulation. Round hints are the
/// schedule when every match carries one and feeders come strictly before
/// consumers. Hint-less graphs are scheduled as late as possible: each
/// match sits one round before its earliest consumer. The distinction
/// matters for byes, where a match between two late entrants has structural
/// depth one but is not played in round one; latest-possible scheduling
/// recovers the intended round whenever winners advance round by round.
fn schedule_rounds(mb: &Multibracket) -> BTreeMap<MatchId, u32> {
    let hinted: Option<BTreeMap<MatchId, u32>> = mb
        .matches()
        .iter()
        .map(|(id, m)| m.round_hint.map(|h| (id.clone(), h)))
        .collect();
    if let Some(hints) = hinted {
        let consistent = mb.matches().iter().all(|(id, m)| {
            [&m.slot_a, &m.slot_b].into_iter().all(|src| match src {
                Source::WinnerOf(x) | Source::LoserOf(x) => hints[x] < hints[id],
                Source::Entry(_) => true,
            })
        });
        if consistent {
            return hints;
        }
    }

    // longest chain from each match to a terminal sink, then flip so the
    // final lands in the last round
    let order = flowchart::topological_order(mb).expect("validated graph is acyclic");
    let mut heights: BTreeMap<MatchId, u32> = BTreeMap::new();
    for id in order.iter().rev() {
        let m = mb.get(id).unwrap();
        let mut height = 1;
        for sink in [&m.on_win, &m.on_lose] {
            if let Sink::ToSlot(next, _) = sink {
                height = height.max(heights[next] + 1);
            }
        }
        heights.insert(id.clone(), height);
    }
    let rounds = heights.values().copied().max().unwrap_or(0);
    heights
        .into_iter()
        .map(|(id, h)| (id, rounds - h + 1))
        .collect()
}

/// Simulates the all-favorites outcome and checks that every round is a
/// proper one: the teams playing must be exactly the worst of the remaining
/// field (byes reward seeding), paired i-th best against i-th worst.
pub fn check_proper(mb: &Multibracket) -> Result<PropernessReport, BuildError> {
    let validation = flowchart::validate(mb);
    if !validation.ok() {
        return Err(BuildError::NotABracket {
            reason: format!("fails validation: {validation}"),
        });
    }
    if !flowchart::classify(mb).is_bracket {
        return Err(BuildError::NotABracket {
            reason: "losers feed matches or win edges do not form a tree to place 1".to_string(),
        });
    }
    let depths = schedule_rounds(mb);
    let sim = favorites_sim(mb).expect("validated graph resolves");
    let max_round = depths.values().copied().max().unwrap_or(0);

    let mut by_round: BTreeMap<u32, Vec<&MatchId>> = BTreeMap::new();
    for (id, &d) in &depths {
        by_round.entry(d).or_default().push(id);
    }

    let mut report = PropernessReport::default();
    let mut eliminated: BTreeSet<Seed> = BTreeSet::new();
    for round in 1..=max_round {
        let ids = &by_round[&round];
        let mut participants: Vec<Seed> = Vec::with_capacity(ids.len() * 2);
        for id in ids.iter() {
            let (a, b) = sim.pair[*id];
            participants.push(a);
            participants.push(b);
        }
        participants.sort();

        let remaining: Vec<Seed> = (1..=mb.team_count())
            .map(Seed)
            .filter(|s| !eliminated.contains(s))
            .collect();
        let expected: BTreeSet<Seed> = remaining
            .iter()
            .rev()
            .take(participants.len())
            .copied()
            .collect();
        let actual: BTreeSet<Seed> = participants.iter().copied().collect();
        if actual != expected {
            report.violations.push(PropernessViolation {
                round,
                match_id: None,
                message: format!(
                    "round {round} is played by {:?} but the worst remaining teams are {:?}",
                    actual.iter().map(|s| s.0).collect::<Vec<_>>(),
                    expected.iter().map(|s| s.0).collect::<Vec<_>>(),
                ),
            });
        }

        let len = participants.len();
        let folds: BTreeSet<(Seed, Seed)> = (0..len / 2)
            .map(|i| (participants[i], participants[len - 1 - i]))
            .collect();
        for id in ids.iter() {
            let (a, b) = sim.pair[*id];
            let pair = (a.min(b), a.max(b));
            if !folds.contains(&pair) {
                report.violations.push(PropernessViolation {
                    round,
                    match_id: Some((*id).clone()),
                    message: format!(
                        "pair {{{},{}}} is not best-vs-worst among this round's participants",
                        pair.0 .0, pair.1 .0
                    ),
                });
            }
        }

        for id in ids.iter() {
            eliminated.insert(sim.loser[*id]);
        }
    }
    Ok(report)
}

/// Attaches consolation play for the losers of the last `depth` pre-final
/// rounds. Depth 1 is the classic third-place match; deeper tiers get a
/// proper semibracket over that round's losers, ordered by expected strength.
pub fn attach_consolation(mb: &Multibracket, depth: u32) -> Result<Multibracket, BuildError> {
    let proper = check_proper(mb)?;
    if !proper.is_proper() {
        return Err(BuildError::NotABracket {
            reason: "bracket is not proper".to_string(),
        });
    }
    let depths = schedule_rounds(mb);
    let rounds = depths.values().copied().max().unwrap_or(0);
    if depth < 1 || depth >= rounds {
        return Err(BuildError::DepthExceedsRounds { depth, rounds });
    }
    let sim = favorites_sim(mb).expect("validated graph resolves");

    let mut matches = mb.matches().clone();
    for j in 1..=depth {
        let tier_round = rounds - j;
        let mut tier: Vec<(Seed, MatchId)> = depths
            .iter()
            .filter(|&(_, &d)| d == tier_round)
            .map(|(id, _)| (sim.loser[id], id.clone()))
            .collect();
        tier.sort();
        if tier.len() < 2 {
            // a lone loser already holds an exact place
            continue;
        }
        let place_lo = match &matches[&tier[0].1].on_lose {
            Sink::Tie { lo, .. } => *lo,
            Sink::Place(p) => *p,
            Sink::ToSlot(..) => {
                return Err(BuildError::NotABracket {
                    reason: "loser tier already consumed".to_string(),
                })
            }
        };
        let sig = balanced_signature(tier.len() as u32)?;
        let sources: Vec<Source> = tier
            .iter()
            .map(|(_, id)| Source::LoserOf(id.clone()))
            .collect();
        let fragment = assemble_bracket(&sig, place_lo, &sources, &format!("P{place_lo}"));
        for (fid, fm) in &fragment {
            if matches.contains_key(fid) {
                return Err(BuildError::DuplicateMatchId(fid.clone()));
            }
            for side in [SlotSide::A, SlotSide::B] {
                if let Source::LoserOf(x) = fm.slot(side) {
                    if let Some(feeder) = matches.get_mut(x) {
                        feeder.on_lose = Sink::ToSlot(fid.clone(), side);
                    }
                }
            }
        }
        matches.extend(fragment);
    }

    let out = Multibracket::new(mb.team_count(), matches);
    let report = flowchart::validate(&out);
    if !report.ok() {
        return Err(BuildError::ValidationFailed(report));
    }
    Ok(out)
}

/// A bracket-shaped fragment whose champion receives a place other than
/// first. Entrant sources may be seeds or the winners/losers of external
/// matches.
#[derive(Clone, PartialEq, Debug)]
pub struct SemibracketSpec {
    pub signature: BracketSignature,
    /// Best place the fragment awards.
    pub place_lo: u32,
    /// By relative seed; length must equal the signature's team count.
    pub entrant_sources: Vec<Source>,
}

/// Builds a proper-bracket-shaped fragment awarding the place block
/// `[place_lo, place_lo + t - 1]`. The result usually references external
/// matches and only validates once composed.
pub fn build_semibracket(spec: &SemibracketSpec) -> Result<Multibracket, BuildError> {
    if spec.place_lo < 1 {
        return Err(BuildError::PlaceOutOfRange {
            place_lo: spec.place_lo,
        });
    }
    let expected = spec.signature.team_count() as usize;
    if spec.entrant_sources.len() != expected {
        return Err(BuildError::LengthMismatch {
            expected,
            got: spec.entrant_sources.len(),
        });
    }
    let prefix = if spec.place_lo == 1 {
        String::new()
    } else {
        format!("P{}", spec.place_lo)
    };
    let matches = assemble_bracket(
        &spec.signature,
        spec.place_lo,
        &spec.entrant_sources,
        &prefix,
    );
    let seeds = matches
        .values()
        .flat_map(|m| [&m.slot_a, &m.slot_b])
        .filter(|s| matches!(s, Source::Entry(_)))
        .count() as u32;
    Ok(Multibracket::new(seeds, matches))
}

/// Merges fragments into one multibracket, routing each winner or loser
/// consumed by a later fragment into its consuming slot. Fragments must be
/// given in chain order: a fragment may only consume outputs produced at or
/// before its own position.
pub fn compose_linear(fragments: &[Multibracket]) -> Result<Multibracket, BuildError> {
    let mut merged: BTreeMap<MatchId, Match> = BTreeMap::new();
    let mut fragment_of: BTreeMap<MatchId, usize> = BTreeMap::new();
    for (k, frag) in fragments.iter().enumerate() {
        for (id, m) in frag.matches() {
            if merged.contains_key(id) {
                return Err(BuildError::DuplicateMatchId(id.clone()));
            }
            merged.insert(id.clone(), m.clone());
            fragment_of.insert(id.clone(), k);
        }
    }

    for (k, frag) in fragments.iter().enumerate() {
        for (id, m) in frag.matches() {
            for side in [SlotSide::A, SlotSide::B] {
                if let Source::WinnerOf(x) | Source::LoserOf(x) = m.slot(side) {
                    match fragment_of.get(x) {
                        None => {
                            return Err(BuildError::DanglingSource {
                                reference: format!("match {id} consumes unknown match {x}"),
                            })
                        }
                        Some(&kx) if kx > k => {
                            return Err(BuildError::DanglingSource {
                                reference: format!(
                                    "match {id} consumes match {x} from a later fragment"
                                ),
                            })
                        }
                        _ => {}
                    }
                }
            }
        }
    }

    // route consumed outputs into their consuming slots, displacing the
    // fragment-local place sinks
    let mut consumptions: Vec<(MatchId, bool, MatchId, SlotSide)> = Vec::new();
    for (id, m) in &merged {
        for side in [SlotSide::A, SlotSide::B] {
            match m.slot(side) {
                Source::WinnerOf(x) => consumptions.push((x.clone(), true, id.clone(), side)),
                Source::LoserOf(x) => consumptions.push((x.clone(), false, id.clone(), side)),
                Source::Entry(_) => {}
            }
        }
    }
    for (producer, won, consumer, side) in consumptions {
        let pm = merged.get_mut(&producer).unwrap();
        let sink = if won { &mut pm.on_win } else { &mut pm.on_lose };
        if sink.is_place() {
            *sink = Sink::ToSlot(consumer, side);
        }
    }

    let team_count = merged
        .values()
        .flat_map(|m| [&m.slot_a, &m.slot_b])
        .filter(|s| matches!(s, Source::Entry(_)))
        .count() as u32;
    let out = Multibracket::new(team_count, merged);
    let report = flowchart::validate(&out);
    if !report.ok() {
        if let Some(v) = report
            .violations
            .iter()
            .find(|v| v.code == ViolationCode::PlaceDup)
        {
            if let ViolationSubject::Place(p) = v.subject {
                return Err(BuildError::PlaceOverlap { place: p });
            }
        }
        return Err(BuildError::ValidationFailed(report));
    }
    if !flowchart::classify(&out).is_linear {
        return Err(BuildError::NotLinear);
    }
    Ok(out)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum DynamicKind {
    Reseed,
    RandomDraw,
}

/// Builds a reseed or random-draw policy over a signature given as raw
/// entrant counts.
pub fn make_dynamic(kind: DynamicKind, entrants: &[u32]) -> Result<DynamicPolicy, BuildError> {
    let signature = BracketSignature::new(entrants.to_vec())?;
    Ok(match kind {
        DynamicKind::Reseed => DynamicPolicy::Reseed { signature },
        DynamicKind::RandomDraw => DynamicPolicy::RandomDraw { signature },
    })
}

/// Builds a Swiss policy: a fixed number of rounds pairing equal records,
/// folding by seed within groups and spilling odd groups downward.
pub fn make_swiss(
    team_count: u32,
    rounds: u32,
    tiebreak: SwissTiebreak,
) -> Result<DynamicPolicy, BuildError> {
    if team_count < 2 || !team_count.is_multiple_of(2) {
        return Err(BuildError::OddTeamCount(team_count));
    }
    if rounds < 1 {
        return Err(BuildError::ZeroRounds);
    }
    Ok(DynamicPolicy::Swiss {
        team_count,
        rounds,
        tiebreak,
    })
}
