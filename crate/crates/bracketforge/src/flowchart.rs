//! Validation, classification, analysis, and DOT rendering of multibracket
//! DAGs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::types::{MatchId, Multibracket, Seed, Sink, SlotSide, Source};

#[derive(thiserror::Error, Clone, PartialEq, Eq, Debug)]
pub enum FlowchartError {
    #[error("unknown match {0}")]
    UnknownMatch(MatchId),
}

/// What a validation violation is about.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ViolationSubject {
    Match(MatchId),
    Place(u32),
    Format,
}

impl fmt::Display for ViolationSubject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ViolationSubject::Match(id) => write!(f, "match {id}"),
            ViolationSubject::Place(p) => write!(f, "place {p}"),
            ViolationSubject::Format => f.write_str("format"),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ViolationCode {
    Cycle,
    SelfPair,
    RefUnknown,
    SlotMismatch,
    ConsumeDup,
    SeedDup,
    SeedRange,
    SeedMissing,
    PlaceDup,
    PlaceGap,
    PlaceRange,
    TieCapacity,
    TooFewTeams,
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ViolationCode::Cycle => "CYCLE",
            ViolationCode::SelfPair => "SELF_PAIR",
            ViolationCode::RefUnknown => "REF_UNKNOWN",
            ViolationCode::SlotMismatch => "SLOT_MISMATCH",
            ViolationCode::ConsumeDup => "CONSUME_DUP",
            ViolationCode::SeedDup => "SEED_DUP",
            ViolationCode::SeedRange => "SEED_RANGE",
            ViolationCode::SeedMissing => "SEED_MISSING",
            ViolationCode::PlaceDup => "PLACE_DUP",
            ViolationCode::PlaceGap => "PLACE_GAP",
            ViolationCode::PlaceRange => "PLACE_RANGE",
            ViolationCode::TieCapacity => "TIE_CAPACITY",
            ViolationCode::TooFewTeams => "TOO_FEW_TEAMS",
        };
        f.write_str(s)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Violation {
    pub code: ViolationCode,
    pub subject: ViolationSubject,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}: {}", self.code, self.subject, self.message)
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok() {
            return f.write_str("ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks the structural invariants of a multibracket: acyclicity, every
/// slot fed exactly once, each seed entering exactly once, winner/loser
/// outputs consumed at most once and consistently, and an exact place
/// partition of `1..=team_count` (tie blocks counted by capacity).
pub fn validate(mb: &Multibracket) -> ValidationReport {
    let mut report = ValidationReport::default();
    let n = mb.team_count();
    let push = |report: &mut ValidationReport, code, subject, message: String| {
        report.violations.push(Violation {
            code,
            subject,
            message,
        });
    };

    if n < 2 {
        push(
            &mut report,
            ViolationCode::TooFewTeams,
            ViolationSubject::Format,
            format!("{n} team(s)"),
        );
    }

    // reference existence, self-pairing, seed entries, consumption counts
    let mut seed_entries: BTreeMap<Seed, Vec<MatchId>> = BTreeMap::new();
    let mut winner_consumers: BTreeMap<MatchId, Vec<(MatchId, SlotSide)>> = BTreeMap::new();
    let mut loser_consumers: BTreeMap<MatchId, Vec<(MatchId, SlotSide)>> = BTreeMap::new();
    for (id, m) in mb.matches() {
        if m.slot_a == m.slot_b {
            push(
                &mut report,
                ViolationCode::SelfPair,
                ViolationSubject::Match(id.clone()),
                format!("both slots fed by {}", m.slot_a),
            );
        }
        for side in [SlotSide::A, SlotSide::B] {
            match m.slot(side) {
                Source::Entry(s) => {
                    seed_entries.entry(*s).or_default().push(id.clone());
                }
                Source::WinnerOf(x) => {
                    if mb.get(x).is_none() {
                        push(
                            &mut report,
                            ViolationCode::RefUnknown,
                            ViolationSubject::Match(id.clone()),
                            format!("slot {side} references winner of unknown match {x}"),
                        );
                    } else {
                        winner_consumers
                            .entry(x.clone())
                            .or_default()
                            .push((id.clone(), side));
                    }
                }
                Source::LoserOf(x) => {
                    if mb.get(x).is_none() {
                        push(
                            &mut report,
                            ViolationCode::RefUnknown,
                            ViolationSubject::Match(id.clone()),
                            format!("slot {side} references loser of unknown match {x}"),
                        );
                    } else {
                        loser_consumers
                            .entry(x.clone())
                            .or_default()
                            .push((id.clone(), side));
                    }
                }
            }
        }
        for (won, sink) in [(true, &m.on_win), (false, &m.on_lose)] {
            if let Sink::ToSlot(target, _) = sink {
                if mb.get(target).is_none() {
                    push(
                        &mut report,
                        ViolationCode::RefUnknown,
                        ViolationSubject::Match(id.clone()),
                        format!(
                            "{} sink routes to unknown match {target}",
                            if won { "win" } else { "lose" }
                        ),
                    );
                }
            }
        }
    }

    for (seed, entries) in &seed_entries {
        if seed.0 < 1 || seed.0 > n {
            push(
                &mut report,
                ViolationCode::SeedRange,
                ViolationSubject::Match(entries[0].clone()),
                format!("{seed} outside 1..={n}"),
            );
        }
        if entries.len() > 1 {
            push(
                &mut report,
                ViolationCode::SeedDup,
                ViolationSubject::Match(entries[1].clone()),
                format!("{seed} enters {} times", entries.len()),
            );
        }
    }
    for v in 1..=n {
        if !seed_entries.contains_key(&Seed(v)) {
            push(
                &mut report,
                ViolationCode::SeedMissing,
                ViolationSubject::Format,
                format!("seed {v} never enters"),
            );
        }
    }

    // each output consumed at most once, and sink/slot routing must agree
    for (won, consumers) in [(true, &winner_consumers), (false, &loser_consumers)] {
        let word = if won { "winner" } else { "loser" };
        for (producer, uses) in consumers {
            if uses.len() > 1 {
                push(
                    &mut report,
                    ViolationCode::ConsumeDup,
                    ViolationSubject::Match(producer.clone()),
                    format!("{word} consumed by {} slots", uses.len()),
                );
            }
        }
        for (id, m) in mb.matches() {
            let sink = m.sink(won);
            let consumer = consumers.get(id).and_then(|u| u.first());
            match (sink, consumer) {
                (Sink::ToSlot(target, side), Some((cid, cside))) => {
                    if target != cid || side != cside {
                        push(
                            &mut report,
                            ViolationCode::SlotMismatch,
                            ViolationSubject::Match(id.clone()),
                            format!(
                                "{word} sink routes to match {target}.{side} but is consumed by match {cid}.{cside}"
                            ),
                        );
                    }
                }
                (Sink::ToSlot(target, side), None) => {
                    push(
                        &mut report,
                        ViolationCode::SlotMismatch,
                        ViolationSubject::Match(id.clone()),
                        format!(
                            "{word} sink routes to match {target}.{side} whose slot is fed elsewhere"
                        ),
                    );
                }
                (_, Some((cid, _))) => {
                    push(
                        &mut report,
                        ViolationCode::SlotMismatch,
                        ViolationSubject::Match(id.clone()),
                        format!("{word} goes to {sink} but is also consumed by match {cid}"),
                    );
                }
                (_, None) => {}
            }
        }
    }

    if topological_order(mb).is_none() {
        push(
            &mut report,
            ViolationCode::Cycle,
            ViolationSubject::Format,
            "match-reference graph contains a cycle".to_string(),
        );
    }

    // place partition: every place 1..=n covered exactly once, tie blocks
    // referenced exactly capacity times
    let mut coverage = vec![0u32; n as usize + 1];
    let mut range_ok = true;
    let mut blocks: BTreeMap<(u32, u32), u32> = BTreeMap::new();
    for (id, m) in mb.matches() {
        for sink in [&m.on_win, &m.on_lose] {
            match sink {
                Sink::Place(p) => {
                    if *p < 1 || *p > n {
                        push(
                            &mut report,
                            ViolationCode::PlaceRange,
                            ViolationSubject::Match(id.clone()),
                            format!("place {p} outside 1..={n}"),
                        );
                        range_ok = false;
                    } else {
                        coverage[*p as usize] += 1;
                    }
                }
                Sink::Tie { lo, hi } => {
                    if *lo < 1 || *hi > n || lo >= hi {
                        push(
                            &mut report,
                            ViolationCode::PlaceRange,
                            ViolationSubject::Match(id.clone()),
                            format!("tie {lo}..{hi} is not a valid interval in 1..={n}"),
                        );
                        range_ok = false;
                    } else {
                        *blocks.entry((*lo, *hi)).or_insert(0) += 1;
                    }
                }
                Sink::ToSlot(..) => {}
            }
        }
    }
    for (&(lo, hi), &refs) in &blocks {
        let capacity = hi - lo + 1;
        if refs != capacity {
            push(
                &mut report,
                ViolationCode::TieCapacity,
                ViolationSubject::Place(lo),
                format!("tie {lo}..{hi} absorbs {capacity} teams but {refs} can reach it"),
            );
        }
        for p in lo..=hi {
            coverage[p as usize] += 1;
        }
    }
    if range_ok {
        for p in 1..=n {
            match coverage[p as usize] {
                0 => push(
                    &mut report,
                    ViolationCode::PlaceGap,
                    ViolationSubject::Place(p),
                    "no team can finish here".to_string(),
                ),
                1 => {}
                k => push(
                    &mut report,
                    ViolationCode::PlaceDup,
                    ViolationSubject::Place(p),
                    format!("awarded {k} times"),
                ),
            }
        }
    }

    report
}

/// Deterministic topological order of the match graph (Kahn's algorithm,
/// ties broken by ascending id), or `None` if the references form a cycle.
pub fn topological_order(mb: &Multibracket) -> Option<Vec<MatchId>> {
    let mut indegree: BTreeMap<&MatchId, usize> = BTreeMap::new();
    let mut consumers: BTreeMap<&MatchId, Vec<&MatchId>> = BTreeMap::new();
    for (id, m) in mb.matches() {
        indegree.entry(id).or_insert(0);
        for side in [SlotSide::A, SlotSide::B] {
            if let Source::WinnerOf(x) | Source::LoserOf(x) = m.slot(side) {
                if mb.get(x).is_some() {
                    consumers.entry(x).or_default().push(id);
                    *indegree.entry(id).or_insert(0) += 1;
                }
            }
        }
    }
    let mut ready: BTreeSet<&MatchId> = indegree
        .iter()
        .filter(|(_, &d)| d == 0)
        .map(|(&id, _)| id)
        .collect();
    let mut order = Vec::with_capacity(mb.match_count());
    while let Some(&id) = ready.iter().next() {
        ready.remove(id);
        order.push(id.clone());
        if let Some(next) = consumers.get(id) {
            for &c in next {
                let d = indegree.get_mut(c).unwrap();
                *d -= 1;
                if *d == 0 {
                    ready.insert(c);
                }
            }
        }
    }
    (order.len() == mb.match_count()).then_some(order)
}

/// Round of each match: one more than the deepest match feeding its slots.
pub fn match_depths(mb: &Multibracket) -> Option<BTreeMap<MatchId, u32>> {
    let order = topological_order(mb)?;
    let mut depths: BTreeMap<MatchId, u32> = BTreeMap::new();
    for id in order {
        let m = mb.get(&id).unwrap();
        let mut depth = 1;
        for side in [SlotSide::A, SlotSide::B] {
            if let Source::WinnerOf(x) | Source::LoserOf(x) = m.slot(side) {
                depth = depth.max(depths[x] + 1);
            }
        }
        depths.insert(id, depth);
    }
    Some(depths)
}

fn expand_into(sink: &Sink, out: &mut BTreeSet<u32>) {
    match sink {
        Sink::Place(p) => {
            out.insert(*p);
        }
        Sink::Tie { lo, hi } => {
            out.extend(*lo..=*hi);
        }
        Sink::ToSlot(..) => {}
    }
}

/// All final places attainable by the team that takes the given outcome in
/// the given match, over all continuations. Tie blocks expand to their full
/// interval.
pub fn reachable_places(
    mb: &Multibracket,
    id: &MatchId,
    won: bool,
) -> Result<BTreeSet<u32>, FlowchartError> {
    if mb.get(id).is_none() {
        return Err(FlowchartError::UnknownMatch(id.clone()));
    }
    let mut memo: BTreeMap<(MatchId, bool), BTreeSet<u32>> = BTreeMap::new();
    Ok(reach(mb, id, won, &mut memo))
}

fn reach(
    mb: &Multibracket,
    id: &MatchId,
    won: bool,
    memo: &mut BTreeMap<(MatchId, bool), BTreeSet<u32>>,
) -> BTreeSet<u32> {
    if let Some(cached) = memo.get(&(id.clone(), won)) {
        return cached.clone();
    }
    let mut out = BTreeSet::new();
    match mb.get(id).unwrap().sink(won) {
        Sink::ToSlot(next, _) => {
            out.extend(reach(mb, next, true, memo));
            out.extend(reach(mb, next, false, memo));
        }
        sink => expand_into(sink, &mut out),
    }
    memo.insert((id.clone(), won), out.clone());
    out
}

/// A match is meaningful iff winning and losing lead to different sets of
/// reachable places.
pub fn is_meaningful(mb: &Multibracket, id: &MatchId) -> Result<bool, FlowchartError> {
    Ok(reachable_places(mb, id, true)? != reachable_places(mb, id, false)?)
}

/// A multibracket is efficient iff every match is meaningful.
pub fn is_efficient(mb: &Multibracket) -> bool {
    mb.matches()
        .keys()
        .all(|id| is_meaningful(mb, id).unwrap_or(false))
}

/// True iff in every match, every place reachable by winning is at least as
/// good (numerically no worse) than every place reachable by losing.
pub fn is_monotone(mb: &Multibracket) -> bool {
    mb.matches().keys().all(|id| {
        let win = reachable_places(mb, id, true).unwrap_or_default();
        let lose = reachable_places(mb, id, false).unwrap_or_default();
        match (win.iter().next_back(), lose.iter().next()) {
            (Some(worst_win), Some(best_lose)) => worst_win <= best_lose,
            _ => false,
        }
    })
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Classification {
    /// No loser feeds any match and win edges form a single tree whose root
    /// awards place 1.
    pub is_bracket: bool,
    /// Matches partition into bracket-shaped fragments chained so that
    /// losers only flow to fragments deciding strictly worse places.
    pub is_linear: bool,
    pub is_nonlinear: bool,
}

/// Classifies a valid multibracket. Brackets are linear; anything valid that
/// fails the chain conditions is nonlinear.
pub fn classify(mb: &Multibracket) -> Classification {
    let mut uses_losers = false;
    let mut root_win_places = 0usize;
    let mut dangling_winners = 0usize;
    for m in mb.matches().values() {
        for side in [SlotSide::A, SlotSide::B] {
            if matches!(m.slot(side), Source::LoserOf(_)) {
                uses_losers = true;
            }
        }
        match &m.on_win {
            Sink::Place(1) => root_win_places += 1,
            Sink::ToSlot(..) => {}
            _ => dangling_winners += 1,
        }
    }
    let is_bracket = !uses_losers && root_win_places == 1 && dangling_winners == 0;
    let is_linear = is_linear_chain(mb);
    Classification {
        is_bracket,
        is_linear,
        is_nonlinear: !is_linear,
    }
}

/// Union-find over match indices keyed by win edges gives the fragments.
fn is_linear_chain(mb: &Multibracket) -> bool {
    let ids: Vec<&MatchId> = mb.matches().keys().collect();
    let index: BTreeMap<&MatchId, usize> = ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
    let mut parent: Vec<usize> = (0..ids.len()).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let root = find(parent, parent[i]);
            parent[i] = root;
        }
        parent[i]
    }
    for (id, m) in mb.matches() {
        for side in [SlotSide::A, SlotSide::B] {
            if let Source::WinnerOf(x) = m.slot(side) {
                let a = find(&mut parent, index[id]);
                let b = find(&mut parent, index[x]);
                parent[a] = b;
            }
        }
    }

    // per-fragment awarded places (tie blocks expanded once per block)
    let mut frag_places: BTreeMap<usize, BTreeSet<u32>> = BTreeMap::new();
    let mut frag_blocks: BTreeMap<usize, BTreeSet<(u32, u32)>> = BTreeMap::new();
    for (id, m) in mb.matches() {
        let f = find(&mut parent, index[id]);
        for sink in [&m.on_win, &m.on_lose] {
            match sink {
                Sink::Place(p) => {
                    frag_places.entry(f).or_default().insert(*p);
                }
                Sink::Tie { lo, hi } => {
                    frag_blocks.entry(f).or_default().insert((*lo, *hi));
                }
                Sink::ToSlot(..) => {}
            }
        }
    }
    for (f, blocks) in &frag_blocks {
        let set = frag_places.entry(*f).or_default();
        for &(lo, hi) in blocks {
            set.extend(lo..=hi);
        }
    }

    // loser edges must leave their fragment and flow to fragments whose
    // best place is strictly worse
    let mut frag_successors: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for (id, m) in mb.matches() {
        for side in [SlotSide::A, SlotSide::B] {
            if let Source::LoserOf(x) = m.slot(side) {
                let from = find(&mut parent, index[x]);
                let to = find(&mut parent, index[id]);
                if from == to {
                    return false;
                }
                let best_from = frag_places.get(&from).and_then(|s| s.iter().next());
                let best_to = frag_places.get(&to).and_then(|s| s.iter().next());
                match (best_from, best_to) {
                    (Some(a), Some(b)) if a < b => {}
                    _ => return false,
                }
                frag_successors.entry(from).or_default().insert(to);
            }
        }
    }

    // every fragment must govern a contiguous place interval once the
    // places of its loser-successor fragments are folded back in
    let frags: BTreeSet<usize> = (0..ids.len()).map(|i| find(&mut parent, i)).collect();
    for &f in &frags {
        let mut total = BTreeSet::new();
        let mut stack = vec![f];
        let mut seen = BTreeSet::new();
        while let Some(g) = stack.pop() {
            if !seen.insert(g) {
                continue;
            }
            if let Some(places) = frag_places.get(&g) {
                total.extend(places.iter().copied());
            }
            if let Some(next) = frag_successors.get(&g) {
                stack.extend(next.iter().copied());
            }
        }
        if let (Some(&lo), Some(&hi)) = (total.iter().next(), total.iter().next_back()) {
            if (hi - lo + 1) as usize != total.len() {
                return false;
            }
        }
    }
    true
}

/// Renders the multibracket as a Graphviz digraph: matches as boxes, seeds
/// as plaintext nodes, places as double circles, win edges solid and lose
/// edges dashed. Output is byte-stable for a given multibracket.
pub fn to_dot(mb: &Multibracket) -> String {
    use std::fmt::Write;

    let mut seeds: BTreeSet<Seed> = BTreeSet::new();
    let mut places: BTreeSet<(u32, u32)> = BTreeSet::new();
    for m in mb.matches().values() {
        for side in [SlotSide::A, SlotSide::B] {
            if let Source::Entry(s) = m.slot(side) {
                seeds.insert(*s);
            }
        }
        for sink in [&m.on_win, &m.on_lose] {
            match sink {
                Sink::Place(p) => {
                    places.insert((*p, *p));
                }
                Sink::Tie { lo, hi } => {
                    places.insert((*lo, *hi));
                }
                Sink::ToSlot(..) => {}
            }
        }
    }

    let place_node = |lo: u32, hi: u32| {
        if lo == hi {
            format!("p{lo}")
        } else {
            format!("t{lo}_{hi}")
        }
    };
    let mut out = String::new();
    out.push_str("digraph multibracket {\n");
    out.push_str("  rankdir=LR;\n");
    for s in &seeds {
        let _ = writeln!(
            out,
            "  \"s{}\" [shape=plaintext, label=\"seed {}\"];",
            s.0, s.0
        );
    }
    for (id, m) in mb.matches() {
        let label = match m.round_hint {
            Some(r) => format!("{id}\\nround {r}"),
            None => id.to_string(),
        };
        let _ = writeln!(out, "  \"m{id}\" [shape=box, label=\"{label}\"];");
    }
    for &(lo, hi) in &places {
        let label = if lo == hi {
            format!("{lo}")
        } else {
            format!("{lo}..{hi}")
        };
        let _ = writeln!(
            out,
            "  \"{}\" [shape=doublecircle, label=\"{label}\"];",
            place_node(lo, hi)
        );
    }
    for (id, m) in mb.matches() {
        for side in [SlotSide::A, SlotSide::B] {
            if let Source::Entry(s) = m.slot(side) {
                let _ = writeln!(out, "  \"s{}\" -> \"m{id}\";", s.0);
            }
        }
    }
    for (id, m) in mb.matches() {
        for (sink, style) in [(&m.on_win, "solid"), (&m.on_lose, "dashed")] {
            let target = match sink {
                Sink::ToSlot(next, _) => format!("m{next}"),
                Sink::Place(p) => place_node(*p, *p),
                Sink::Tie { lo, hi } => place_node(*lo, *hi),
            };
            let _ = writeln!(out, "  \"m{id}\" -> \"{target}\" [style={style}];");
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{Match, Multibracket};
    use std::collections::BTreeMap;

    fn entry(s: u32) -> Source {
        Source::Entry(Seed(s))
    }

    fn mk(matches: Vec<(&str, Match)>, teams: u32) -> Multibracket {
        let map: BTreeMap<MatchId, Match> = matches
            .into_iter()
            .map(|(id, m)| (MatchId::new(id), m))
            .collect();
        Multibracket::new(teams, map)
    }

    fn final_match(a: Source, b: Source) -> Match {
        Match {
            slot_a: a,
            slot_b: b,
            on_win: Sink::Place(1),
            on_lose: Sink::Place(2),
            round_hint: None,
        }
    }

    #[test]
    fn two_team_final_validates() {
        let mb = mk(vec![("F", final_match(entry(1), entry(2)))], 2);
        let report = validate(&mb);
        assert!(report.ok(), "{report}");
    }

    #[test]
    fn winner_cycle_is_reported() {
        let a = Match {
            slot_a: Source::WinnerOf(MatchId::new("B")),
            slot_b: entry(1),
            on_win: Sink::ToSlot(MatchId::new("B"), SlotSide::A),
            on_lose: Sink::Place(1),
            round_hint: None,
        };
        let b = Match {
            slot_a: Source::WinnerOf(MatchId::new("A")),
            slot_b: entry(2),
            on_win: Sink::ToSlot(MatchId::new("A"), SlotSide::A),
            on_lose: Sink::Place(2),
            round_hint: None,
        };
        let mb = mk(vec![("A", a), ("B", b)], 2);
        let report = validate(&mb);
        assert!(report
            .violations
            .iter()
            .any(|v| v.code == ViolationCode::Cycle));
    }

    #[test]
    fn duplicate_place_is_reported() {
        let a = final_match(entry(1), entry(2));
        let mut b = final_match(entry(3), entry(4));
        b.on_lose = Sink::Place(4);
        // both matches award place 1; places 2 and 3 differ
        let mb = mk(vec![("A", a), ("B", b)], 4);
        let report = validate(&mb);
        assert!(report
            .violations
            .iter()
            .any(|v| v.code == ViolationCode::PlaceDup));
        assert!(report
            .violations
            .iter()
            .any(|v| v.code == ViolationCode::PlaceGap));
    }

    #[test]
    fn tie_capacity_must_match_flow() {
        let mut a = final_match(entry(1), entry(2));
        a.on_lose = Sink::Tie { lo: 3, hi: 4 };
        let mut b = final_match(entry(3), entry(4));
        b.on_win = Sink::Place(2);
        b.on_lose = Sink::Place(4);
        // tie 3..4 referenced once but absorbs two teams, and place 1 double
        let mb = mk(vec![("A", a), ("B", b)], 4);
        let report = validate(&mb);
        assert!(report
            .violations
            .iter()
            .any(|v| v.code == ViolationCode::TieCapacity));
    }

    #[test]
    fn reachable_places_in_two_team_final() {
        let mb = mk(vec![("F", final_match(entry(1), entry(2)))], 2);
        let id = MatchId::new("F");
        assert_eq!(
            reachable_places(&mb, &id, true).unwrap(),
            BTreeSet::from([1])
        );
        assert_eq!(
            reachable_places(&mb, &id, false).unwrap(),
            BTreeSet::from([2])
        );
        assert!(is_meaningful(&mb, &id).unwrap());
        assert!(is_efficient(&mb));
        assert!(is_monotone(&mb));
        let missing = MatchId::new("ZZ");
        assert!(matches!(
            reachable_places(&mb, &missing, true),
            Err(FlowchartError::UnknownMatch(_))
        ));
    }

    #[test]
    fn double_consumption_is_reported() {
        let feeder = final_match(entry(1), entry(2));
        let mut left = final_match(Source::WinnerOf(MatchId::new("F")), entry(3));
        left.on_win = Sink::Place(2);
        left.on_lose = Sink::Place(3);
        let mut right = final_match(Source::WinnerOf(MatchId::new("F")), entry(4));
        right.on_win = Sink::Place(4);
        right.on_lose = Sink::Place(5);
        let mb = mk(vec![("F", feeder), ("L", left), ("R", right)], 5);
        let report = validate(&mb);
        assert!(report
            .violations
            .iter()
            .any(|v| v.code == ViolationCode::ConsumeDup));
    }

    #[test]
    fn eight_team_bracket_dot_shape() {
        let sig = crate::types::BracketSignature::new(vec![8, 0, 0]).unwrap();
        let mb = crate::builder::build_proper_bracket(&sig);
        let dot = to_dot(&mb);
        assert_eq!(dot.matches("shape=box").count(), 7);
        assert_eq!(dot.matches("shape=plaintext").count(), 8);
        // places 1 and 2 plus the two tie blocks
        assert_eq!(dot.matches("shape=doublecircle").count(), 4);
        assert!(dot.contains("label=\"5..8\""));
    }

    #[test]
    fn proper_brackets_are_monotone() {
        let sig = crate::types::BracketSignature::new(vec![8, 0, 0]).unwrap();
        let mb = crate::builder::build_proper_bracket(&sig);
        assert!(is_monotone(&mb));
        assert!(is_efficient(&mb));
    }

    #[test]
    fn dot_output_is_stable_and_shaped() {
        let mb = mk(vec![("F", final_match(entry(1), entry(2)))], 2);
        let dot = to_dot(&mb);
        assert_eq!(dot, to_dot(&mb));
        assert_eq!(dot.matches("shape=box").count(), 1);
        assert_eq!(dot.matches("shape=plaintext").count(), 2);
        assert_eq!(dot.matches("shape=doublecircle").count(), 2);
        assert_eq!(dot.matches("style=solid").count(), 1);
        assert_eq!(dot.matches("style=dashed").count(), 1);
    }
}
