//! Shared domain types: seeds, signatures, match graphs, pairing policies,
//! strength models, and placement distributions.
//!
//! Everything here is immutable after construction and safe to share across
//! threads. Structural validation of match graphs lives in [`crate::flowchart`];
//! the constructors in this module only enforce local invariants.

use std::collections::BTreeMap;
use std::fmt;

use crate::signatures::SignatureError;

/// Absolute probability tolerance used for model validation and
/// distribution checks throughout the crate.
pub const PROB_TOLERANCE: f64 = 1e-9;

/// A 1-based seed rank. Seed 1 is the a-priori strongest team.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Seed(pub u32);

impl Seed {
    /// Zero-based index into per-team arrays.
    pub fn index(self) -> usize {
        (self.0 - 1) as usize
    }
}

impl fmt::Display for Seed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "seed {}", self.0)
    }
}

/// Per-round entrant counts defining a single-elimination shape.
///
/// `entrants[i]` teams enter play at round `i + 1`. The derived `alive`
/// sequence follows the recurrence `c_0 = 0`, `c_i = (c_{i-1} + a_i) / 2`,
/// which must stay integral and end at exactly one champion. Sequence length
/// is part of a signature's identity: `[4, 0]` and `[4]` are different
/// inputs and only the former is valid.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BracketSignature {
    entrants: Vec<u32>,
    alive: Vec<u32>,
}

impl BracketSignature {
    /// Validates the entrant sequence and computes the alive counts.
    pub fn new(entrants: Vec<u32>) -> Result<Self, SignatureError> {
        let alive = crate::signatures::alive_counts(&entrants)?;
        Ok(Self { entrants, alive })
    }

    pub fn entrants(&self) -> &[u32] {
        &self.entrants
    }

    /// Alive counts `c_0..c_r`; `alive()[0] == 0` and `alive()[rounds] == 1`.
    pub fn alive(&self) -> &[u32] {
        &self.alive
    }

    pub fn rounds(&self) -> u32 {
        self.entrants.len() as u32
    }

    pub fn team_count(&self) -> u32 {
        self.entrants.iter().sum()
    }

    /// One team is eliminated per match, so this is `team_count - 1`.
    pub fn match_count(&self) -> u32 {
        self.team_count() - 1
    }

    /// Matches held in round `i` (1-based). Equals the alive count after the
    /// round, since every alive team plays every round.
    pub fn matches_in_round(&self, round: u32) -> u32 {
        self.alive[round as usize]
    }

    /// Teams entering play strictly after round `i` (1-based; `i = 0` gives
    /// the full team count). Later entrants are the best seeds, so this is
    /// also the number of seeds better than every round-`i` entrant.
    pub fn entering_after(&self, round: u32) -> u32 {
        self.entrants[round as usize..].iter().sum()
    }

    /// Seeds entering at round `i`, best first. Byes reward seeding: the
    /// seeds entering at later rounds are better than all earlier entrants.
    pub fn entrants_at_round(&self, round: u32) -> Vec<Seed> {
        let after = self.entering_after(round);
        let count = self.entrants[(round - 1) as usize];
        (after + 1..=after + count).map(Seed).collect()
    }

    /// Round at which a given seed enters play.
    pub fn entry_round(&self, seed: Seed) -> u32 {
        let mut after = self.team_count();
        for (i, &a) in self.entrants.iter().enumerate() {
            after -= a;
            if seed.0 > after {
                return (i + 1) as u32;
            }
        }
        unreachable!("seed outside signature range")
    }

    /// Place interval occupied by teams eliminated in round `i`:
    /// all alive teams and future entrants finish better.
    pub fn loser_places(&self, round: u32) -> (u32, u32) {
        let c = self.alive[round as usize];
        let b = self.entering_after(round);
        let m = self.matches_in_round(round);
        (c + b + 1, c + b + m)
    }
}

impl fmt::Display for BracketSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, a) in self.entrants.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "]")
    }
}

/// Identifier of a match inside a [`Multibracket`].
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct MatchId(pub String);

impl MatchId {
    pub fn new(s: impl Into<String>) -> Self {
        MatchId(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for MatchId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// One of the two slots of a match.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum SlotSide {
    A,
    B,
}

impl fmt::Display for SlotSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SlotSide::A => f.write_str("A"),
            SlotSide::B => f.write_str("B"),
        }
    }
}

/// Where the team occupying a match slot comes from.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Source {
    /// A team entering the format directly.
    Entry(Seed),
    /// The winner of another match.
    WinnerOf(MatchId),
    /// The loser of another match.
    LoserOf(MatchId),
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Entry(s) => write!(f, "seed {}", s.0),
            Source::WinnerOf(m) => write!(f, "winner {m}"),
            Source::LoserOf(m) => write!(f, "loser {m}"),
        }
    }
}

/// Where the winner or loser of a match goes.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Sink {
    /// Feeds a slot of a later match.
    ToSlot(MatchId, SlotSide),
    /// An exact final place, 1 being best.
    Place(u32),
    /// A shared interval of places the format does not distinguish,
    /// absorbing `hi - lo + 1` teams.
    Tie { lo: u32, hi: u32 },
}

impl Sink {
    /// Number of teams the sink absorbs; `None` for slot sinks.
    pub fn capacity(&self) -> Option<u32> {
        match self {
            Sink::ToSlot(..) => None,
            Sink::Place(_) => Some(1),
            Sink::Tie { lo, hi } => Some(hi - lo + 1),
        }
    }

    pub fn is_place(&self) -> bool {
        !matches!(self, Sink::ToSlot(..))
    }
}

impl fmt::Display for Sink {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sink::ToSlot(m, s) => write!(f, "match {m}.{s}"),
            Sink::Place(p) => write!(f, "place {p}"),
            Sink::Tie { lo, hi } => write!(f, "tie {lo}..{hi}"),
        }
    }
}

/// A single match: two fed slots and a routing for each outcome.
///
/// `round_hint` is rendering metadata and is ignored by equality; two
/// multibrackets that differ only in hints compile, execute, and serialize
/// identically.
#[derive(Clone, Debug)]
pub struct Match {
    pub slot_a: Source,
    pub slot_b: Source,
    pub on_win: Sink,
    pub on_lose: Sink,
    pub round_hint: Option<u32>,
}

impl PartialEq for Match {
    fn eq(&self, other: &Self) -> bool {
        self.slot_a == other.slot_a
            && self.slot_b == other.slot_b
            && self.on_win == other.on_win
            && self.on_lose == other.on_lose
    }
}

impl Eq for Match {}

impl Match {
    pub fn slot(&self, side: SlotSide) -> &Source {
        match side {
            SlotSide::A => &self.slot_a,
            SlotSide::B => &self.slot_b,
        }
    }

    pub fn sink(&self, won: bool) -> &Sink {
        if won {
            &self.on_win
        } else {
            &self.on_lose
        }
    }
}

/// A DAG of matches with win and lose edges terminating in final places or
/// tie blocks: the static executable format.
///
/// Construction is permissive so that arbitrary graphs can be assembled and
/// then checked; [`crate::flowchart::validate`] establishes the structural
/// invariants (acyclicity, single-feed slots, exact place partition) and the
/// engine refuses inputs that do not pass it.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Multibracket {
    team_count: u32,
    matches: BTreeMap<MatchId, Match>,
}

impl Multibracket {
    pub fn new(team_count: u32, matches: BTreeMap<MatchId, Match>) -> Self {
        Self {
            team_count,
            matches,
        }
    }

    pub fn team_count(&self) -> u32 {
        self.team_count
    }

    pub fn matches(&self) -> &BTreeMap<MatchId, Match> {
        &self.matches
    }

    pub fn match_count(&self) -> usize {
        self.matches.len()
    }

    pub fn get(&self, id: &MatchId) -> Option<&Match> {
        self.matches.get(id)
    }

    /// The multiset of place sinks (win and lose) across all matches.
    pub fn places(&self) -> Vec<Sink> {
        let mut out = Vec::new();
        for m in self.matches.values() {
            for sink in [&m.on_win, &m.on_lose] {
                if sink.is_place() {
                    out.push(sink.clone());
                }
            }
        }
        out
    }
}

/// How ties among equal final records are described for Swiss play.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SwissTiebreak {
    /// Order teams inside a record group by seed when a total order is
    /// required; placement distributions treat record groups as tie blocks.
    BySeed,
}

/// A round-based pairing rule: the dynamic executable format.
#[derive(Clone, PartialEq, Debug)]
pub enum DynamicPolicy {
    /// Before each round, survivors plus that round's entrants are sorted by
    /// seed and paired best-vs-worst.
    Reseed { signature: BracketSignature },
    /// Each round's participants are paired uniformly at random.
    RandomDraw { signature: BracketSignature },
    /// Fixed number of rounds pairing teams with equal records.
    Swiss {
        team_count: u32,
        rounds: u32,
        tiebreak: SwissTiebreak,
    },
}

impl DynamicPolicy {
    pub fn team_count(&self) -> u32 {
        match self {
            DynamicPolicy::Reseed { signature } | DynamicPolicy::RandomDraw { signature } => {
                signature.team_count()
            }
            DynamicPolicy::Swiss { team_count, .. } => *team_count,
        }
    }

    pub fn rounds(&self) -> u32 {
        match self {
            DynamicPolicy::Reseed { signature } | DynamicPolicy::RandomDraw { signature } => {
                signature.rounds()
            }
            DynamicPolicy::Swiss { rounds, .. } => *rounds,
        }
    }
}

/// A format the engine can execute: a static match graph or a dynamic
/// pairing policy.
#[derive(Clone, PartialEq, Debug)]
pub enum Format {
    Static(Multibracket),
    Dynamic(DynamicPolicy),
}

impl Format {
    pub fn team_count(&self) -> u32 {
        match self {
            Format::Static(mb) => mb.team_count(),
            Format::Dynamic(p) => p.team_count(),
        }
    }
}

/// Errors raised while constructing strength models.
#[derive(thiserror::Error, Clone, PartialEq, Debug)]
pub enum ModelError {
    #[error("strength for seed {seed} must be positive, got {value}")]
    NonPositiveStrength { seed: u32, value: f64 },
    #[error("bad matrix: {0}")]
    BadMatrix(String),
}

/// Pairwise win-probability function over seeds `1..=n`.
///
/// `Matrix` entries may be exactly 0 or 1 to express deterministic test
/// models; rows must complement (`P[i][j] + P[j][i] = 1`) within
/// [`PROB_TOLERANCE`].
#[derive(Clone, PartialEq, Debug)]
pub enum StrengthModel {
    /// Every match is a fair coin.
    Coin,
    /// `P[i][j] = s_i / (s_i + s_j)` from positive per-seed strengths.
    BradleyTerry { strengths: Vec<f64> },
    /// Explicit pairwise probabilities.
    Matrix { p: Vec<Vec<f64>> },
}

impl StrengthModel {
    pub fn coin() -> Self {
        StrengthModel::Coin
    }

    pub fn bradley_terry(strengths: Vec<f64>) -> Result<Self, ModelError> {
        for (i, &s) in strengths.iter().enumerate() {
            if !s.is_finite() || s <= 0.0 {
                return Err(ModelError::NonPositiveStrength {
                    seed: (i + 1) as u32,
                    value: s,
                });
            }
        }
        Ok(StrengthModel::BradleyTerry { strengths })
    }

    pub fn matrix(p: Vec<Vec<f64>>) -> Result<Self, ModelError> {
        let n = p.len();
        for (i, row) in p.iter().enumerate() {
            if row.len() != n {
                return Err(ModelError::BadMatrix(format!(
                    "row {} has {} entries, expected {}",
                    i + 1,
                    row.len(),
                    n
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                if i == j {
                    continue;
                }
                if !v.is_finite() || !(0.0..=1.0).contains(&v) {
                    return Err(ModelError::BadMatrix(format!(
                        "P[{}][{}] = {} outside [0,1]",
                        i + 1,
                        j + 1,
                        v
                    )));
                }
                if (v + p[j][i] - 1.0).abs() > PROB_TOLERANCE {
                    return Err(ModelError::BadMatrix(format!(
                        "P[{}][{}] + P[{}][{}] = {} does not sum to 1",
                        i + 1,
                        j + 1,
                        j + 1,
                        i + 1,
                        v + p[j][i]
                    )));
                }
            }
        }
        Ok(StrengthModel::Matrix { p })
    }

    /// Number of seeds the model covers; `None` means any.
    pub fn team_count(&self) -> Option<u32> {
        match self {
            StrengthModel::Coin => None,
            StrengthModel::BradleyTerry { strengths } => Some(strengths.len() as u32),
            StrengthModel::Matrix { p } => Some(p.len() as u32),
        }
    }

    /// Probability that `a` beats `b`.
    pub fn win_probability(&self, a: Seed, b: Seed) -> f64 {
        match self {
            StrengthModel::Coin => 0.5,
            StrengthModel::BradleyTerry { strengths } => {
                let sa = strengths[a.index()];
                let sb = strengths[b.index()];
                sa / (sa + sb)
            }
            StrengthModel::Matrix { p } => p[a.index()][b.index()],
        }
    }
}

/// A final standing for one team: an exact place or a shared tie block.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum PlaceRef {
    Place(u32),
    Tie { lo: u32, hi: u32 },
}

impl PlaceRef {
    pub fn interval(self) -> (u32, u32) {
        match self {
            PlaceRef::Place(p) => (p, p),
            PlaceRef::Tie { lo, hi } => (lo, hi),
        }
    }

    pub fn size(self) -> u32 {
        let (lo, hi) = self.interval();
        hi - lo + 1
    }
}

impl fmt::Display for PlaceRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlaceRef::Place(p) => write!(f, "{p}"),
            PlaceRef::Tie { lo, hi } => write!(f, "{lo}..{hi}"),
        }
    }
}

/// Team-by-place probability matrix plus expected-match statistics.
///
/// `d[seed-1][place-1]` is the probability that the seed finishes in the
/// place; tie blocks are spread uniformly across their interval, which keeps
/// the matrix doubly stochastic and comparable across formats.
#[derive(Clone, PartialEq, Debug)]
pub struct PlacementDistribution {
    pub d: Vec<Vec<f64>>,
    /// Per-cell standard error `sqrt(p(1-p)/reps)`; Monte Carlo results only.
    pub std_err: Option<Vec<Vec<f64>>>,
    /// Expected matches played per seed.
    pub expected_matches: Vec<f64>,
    /// Expected matches held: half the per-seed sum.
    pub total_matches: f64,
    /// Replication count; Monte Carlo results only.
    pub reps: Option<u64>,
}

impl PlacementDistribution {
    pub fn team_count(&self) -> u32 {
        self.d.len() as u32
    }

    /// Largest deviation of any row or column sum from 1.
    pub fn stochasticity_error(&self) -> f64 {
        let n = self.d.len();
        let mut worst: f64 = 0.0;
        for row in &self.d {
            worst = worst.max((row.iter().sum::<f64>() - 1.0).abs());
        }
        for p in 0..n {
            let col: f64 = self.d.iter().map(|row| row[p]).sum();
            worst = worst.max((col - 1.0).abs());
        }
        worst
    }
}
