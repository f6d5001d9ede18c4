//! The bracket-signature calculus: validation, enumeration, and Swiss
//! record profiles.

use crate::types::BracketSignature;

/// Why an entrant sequence is not a valid bracket signature.
#[derive(thiserror::Error, Clone, PartialEq, Eq, Debug)]
pub enum SignatureError {
    #[error("round {round}: {participants} participants cannot pair off")]
    Parity { round: u32, participants: u32 },
    #[error("signature ends with {alive} teams alive, expected exactly one champion")]
    NoChampion { alive: u32 },
    #[error("{team_count} team(s) is not enough for a tournament")]
    TooFewTeams { team_count: u32 },
    #[error("round {round} holds no matches")]
    EmptyRound { round: u32 },
    #[error("enumeration guard exceeded: {what}")]
    GuardExceeded { what: String },
    #[error("{n} is not 2^{rounds}; the record profile is only invariant for full powers of two")]
    NotPowerOfTwo { n: u32, rounds: u32 },
}

/// Runs the alive recurrence `c_0 = 0`, `c_i = (c_{i-1} + a_i) / 2` over an
/// entrant sequence, rejecting parity breaks, empty rounds, and sequences
/// that do not end with a single champion.
pub(crate) fn alive_counts(entrants: &[u32]) -> Result<Vec<u32>, SignatureError> {
    let team_count: u32 = entrants.iter().sum();
    if team_count < 2 {
        return Err(SignatureError::TooFewTeams { team_count });
    }
    let mut alive = Vec::with_capacity(entrants.len() + 1);
    alive.push(0u32);
    let mut c = 0u32;
    for (i, &a) in entrants.iter().enumerate() {
        let round = (i + 1) as u32;
        let participants = c + a;
        if participants == 0 {
            return Err(SignatureError::EmptyRound { round });
        }
        if !participants.is_multiple_of(2) {
            return Err(SignatureError::Parity {
                round,
                participants,
            });
        }
        c = participants / 2;
        alive.push(c);
    }
    if c != 1 {
        return Err(SignatureError::NoChampion { alive: c });
    }
    Ok(alive)
}

/// Validated shape summary of a bracket signature.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SignatureReport {
    pub team_count: u32,
    pub rounds: u32,
    /// Alive counts `c_0..c_r`.
    pub alive: Vec<u32>,
    /// Matches held per round; sums to `team_count - 1`.
    pub matches_per_round: Vec<u32>,
}

/// Checks an entrant sequence against the alive recurrence and reports the
/// resulting shape.
pub fn validate_bracket_signature(entrants: &[u32]) -> Result<SignatureReport, SignatureError> {
    let alive = alive_counts(entrants)?;
    // every alive team plays every round, so matches in round i equal the
    // survivor count c_i
    let matches_per_round = alive[1..].to_vec();
    Ok(SignatureReport {
        team_count: entrants.iter().sum(),
        rounds: entrants.len() as u32,
        alive,
        matches_per_round,
    })
}

/// Caps for [`enumerate_bracket_signatures_with_limits`]. Composition counts
/// grow fast; the defaults keep enumeration at desk scale.
#[derive(Clone, Copy, Debug)]
pub struct EnumerationLimits {
    pub max_team_count: u32,
    pub max_rounds: u32,
}

impl Default for EnumerationLimits {
    fn default() -> Self {
        Self {
            max_team_count: 32,
            max_rounds: 8,
        }
    }
}

/// Enumerates every valid signature for `n` teams with at most `max_rounds`
/// rounds, in lexicographic order, under the default guards.
pub fn enumerate_bracket_signatures(
    n: u32,
    max_rounds: u32,
) -> Result<Vec<BracketSignature>, SignatureError> {
    enumerate_bracket_signatures_with_limits(n, max_rounds, EnumerationLimits::default())
}

/// Enumeration with explicit guard overrides.
pub fn enumerate_bracket_signatures_with_limits(
    n: u32,
    max_rounds: u32,
    limits: EnumerationLimits,
) -> Result<Vec<BracketSignature>, SignatureError> {
    if n < 2 {
        return Err(SignatureError::TooFewTeams { team_count: n });
    }
    if n > limits.max_team_count {
        return Err(SignatureError::GuardExceeded {
            what: format!("n = {n} exceeds cap {}", limits.max_team_count),
        });
    }
    if max_rounds > limits.max_rounds {
        return Err(SignatureError::GuardExceeded {
            what: format!(
                "max_rounds = {max_rounds} exceeds cap {}",
                limits.max_rounds
            ),
        });
    }
    let mut out = Vec::new();
    let mut prefix = Vec::new();
    extend(&mut prefix, 0, n, max_rounds, &mut out);
    Ok(out)
}

/// Depth-first extension of a signature prefix. Entrant choices are tried in
/// ascending order, which yields lexicographic output with prefixes first.
fn extend(
    prefix: &mut Vec<u32>,
    alive: u32,
    remaining: u32,
    max_rounds: u32,
    out: &mut Vec<BracketSignature>,
) {
    if alive == 1 && remaining == 0 {
        out.push(
            BracketSignature::new(prefix.clone())
                .expect("pruned enumeration produced an invalid signature"),
        );
        // the recurrence cannot continue past a champion without entrants,
        // and any further entrants would change the sum
        return;
    }
    if prefix.len() as u32 == max_rounds {
        return;
    }
    for a in 0..=remaining {
        let participants = alive + a;
        if participants < 2 || !participants.is_multiple_of(2) {
            continue;
        }
        prefix.push(a);
        extend(prefix, participants / 2, remaining - a, max_rounds, out);
        prefix.pop();
    }
}

/// A Swiss record after a fixed number of rounds.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Record {
    pub wins: u32,
    pub losses: u32,
}

impl std::fmt::Display for Record {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}-{}", self.wins, self.losses)
    }
}

/// Team count per final record for a full power-of-two Swiss event.
///
/// With `n = 2^rounds`, groups pair evenly within records every round, so
/// the final profile is outcome-independent: `C(rounds, w)` teams finish
/// with `w` wins. For other sizes the profile depends on the pairing policy
/// and no closed form is offered.
pub fn swiss_record_profile(n: u32, rounds: u32) -> Result<Vec<(Record, u64)>, SignatureError> {
    if rounds >= 32 || n != 1u32 << rounds {
        return Err(SignatureError::NotPowerOfTwo { n, rounds });
    }
    let mut out = Vec::with_capacity(rounds as usize + 1);
    for w in (0..=rounds).rev() {
        out.push((
            Record {
                wins: w,
                losses: rounds - w,
            },
            binomial(rounds as u64, w as u64),
        ));
    }
    Ok(out)
}

fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    let mut acc = 1u64;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}
