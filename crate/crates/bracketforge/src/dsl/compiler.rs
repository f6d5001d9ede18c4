//! Lowers a parsed AST into an executable format.
//!
//! Bracket sugar expands through the proper-bracket builder and consolation
//! attachment. Explicit match statements build the graph directly; slot
//! sources are authoritative for wiring, so a place sink on an output that
//! another match consumes is displaced by the routing (this is how explicit
//! consolation matches can drain a sugar bracket's tie blocks). `match X.A`
//! sinks are redundant routing declarations and must agree with the
//! consuming slot.

use std::collections::BTreeMap;

use super::parser::{FormatAst, SinkNode, SrcNode, Statement, StatementNode};
use super::DslError;
use crate::builder::{attach_consolation, build_proper_bracket, make_swiss};
use crate::flowchart;
use crate::types::{
    BracketSignature, DynamicPolicy, Format, Match, MatchId, Multibracket, Seed, Sink, SlotSide,
    Source, SwissTiebreak,
};

/// A compiled format and the name it was declared under.
#[derive(Clone, PartialEq, Debug)]
pub struct Compiled {
    pub name: String,
    pub format: Format,
}

pub fn compile(ast: &FormatAst) -> Result<Compiled, DslError> {
    let policies: Vec<&Statement> = ast
        .statements
        .iter()
        .filter(|s| {
            matches!(
                s.node,
                StatementNode::PolicyReseed { .. }
                    | StatementNode::PolicyRandom { .. }
                    | StatementNode::PolicySwiss { .. }
            )
        })
        .collect();
    if !policies.is_empty() {
        if policies.len() > 1 || ast.statements.len() > 1 {
            return Err(DslError::MixedKind);
        }
        let policy = compile_policy(policies[0])?;
        return Ok(Compiled {
            name: ast.name.clone(),
            format: Format::Dynamic(policy),
        });
    }

    let mut matches: BTreeMap<MatchId, Match> = BTreeMap::new();

    // sugar first: brackets, then their consolations
    for stmt in &ast.statements {
        if let StatementNode::Bracket { ident, signature } = &stmt.node {
            let sig = BracketSignature::new(signature.clone())
                .map_err(|e| DslError::Build(e.into(), stmt.line, stmt.col))?;
            let mut bracket = build_proper_bracket(&sig);
            if let Some(consolation) = ast.statements.iter().find(
                |s| matches!(&s.node, StatementNode::Consolation { target, .. } if target == ident),
            ) {
                if let StatementNode::Consolation { depth, .. } = &consolation.node {
                    bracket = attach_consolation(&bracket, *depth)
                        .map_err(|e| DslError::Build(e, consolation.line, consolation.col))?;
                }
            }
            for (id, m) in bracket.matches() {
                if matches.contains_key(id) {
                    return Err(DslError::DuplicateIdentifier {
                        name: id.to_string(),
                        line: stmt.line,
                        col: stmt.col,
                    });
                }
                matches.insert(id.clone(), m.clone());
            }
        }
    }
    for stmt in &ast.statements {
        if let StatementNode::Consolation { target, .. } = &stmt.node {
            let declared = ast.statements.iter().any(
                |s| matches!(&s.node, StatementNode::Bracket { ident, .. } if ident == target),
            );
            if !declared {
                return Err(DslError::UnknownReference {
                    name: target.clone(),
                    line: stmt.line,
                    col: stmt.col,
                });
            }
        }
    }

    // explicit matches
    for stmt in &ast.statements {
        if let StatementNode::Match {
            ident,
            slot_a,
            slot_b,
            win,
            lose,
        } = &stmt.node
        {
            let id = MatchId::new(ident.clone());
            if matches.contains_key(&id) {
                return Err(DslError::DuplicateIdentifier {
                    name: ident.clone(),
                    line: stmt.line,
                    col: stmt.col,
                });
            }
            let source = |src: &SrcNode| -> Source {
                match src {
                    SrcNode::Seed(v) => Source::Entry(Seed(*v)),
                    SrcNode::Winner(m) => Source::WinnerOf(MatchId::new(m.clone())),
                    SrcNode::Loser(m) => Source::LoserOf(MatchId::new(m.clone())),
                }
            };
            let sink = |node: &SinkNode| -> Sink {
                match node {
                    SinkNode::Slot { target, side } => {
                        Sink::ToSlot(MatchId::new(target.clone()), *side)
                    }
                    SinkNode::Place(p) => Sink::Place(*p),
                    SinkNode::Tie { lo, hi } => Sink::Tie { lo: *lo, hi: *hi },
                }
            };
            matches.insert(
                id,
                Match {
                    slot_a: source(slot_a),
                    slot_b: source(slot_b),
                    on_win: sink(win),
                    on_lose: sink(lose),
                    round_hint: None,
                },
            );
        }
    }

    // every reference must resolve
    for stmt in &ast.statements {
        if let StatementNode::Match {
            slot_a,
            slot_b,
            win,
            lose,
            ..
        } = &stmt.node
        {
            let check = |name: &str| -> Result<(), DslError> {
                if !matches.contains_key(&MatchId::new(name.to_string())) {
                    return Err(DslError::UnknownReference {
                        name: name.to_string(),
                        line: stmt.line,
                        col: stmt.col,
                    });
                }
                Ok(())
            };
            for src in [slot_a, slot_b] {
                if let SrcNode::Winner(m) | SrcNode::Loser(m) = src {
                    check(m)?;
                }
            }
            for snk in [win, lose] {
                if let SinkNode::Slot { target, .. } = snk {
                    check(target)?;
                }
            }
        }
    }

    // route consumed outputs: a slot source names its feeder, displacing
    // the feeder's place sink
    let mut consumptions: Vec<(MatchId, bool, MatchId, SlotSide)> = Vec::new();
    for (id, m) in &matches {
        for side in [SlotSide::A, SlotSide::B] {
            match m.slot(side) {
                Source::WinnerOf(x) => consumptions.push((x.clone(), true, id.clone(), side)),
                Source::LoserOf(x) => consumptions.push((x.clone(), false, id.clone(), side)),
                Source::Entry(_) => {}
            }
        }
    }
    for (producer, won, consumer, side) in consumptions {
        let pm = matches.get_mut(&producer).unwrap();
        let sink = if won { &mut pm.on_win } else { &mut pm.on_lose };
        if sink.is_place() {
            *sink = Sink::ToSlot(consumer, side);
        }
    }

    let team_count = matches
        .values()
        .flat_map(|m| [&m.slot_a, &m.slot_b])
        .filter(|s| matches!(s, Source::Entry(_)))
        .count() as u32;
    let mb = Multibracket::new(team_count, matches);
    let report = flowchart::validate(&mb);
    if !report.ok() {
        return Err(DslError::ValidationFailed(report));
    }
    Ok(Compiled {
        name: ast.name.clone(),
        format: Format::Static(mb),
    })
}

fn compile_policy(stmt: &Statement) -> Result<DynamicPolicy, DslError> {
    let build = |entrants: &[u32], random: bool| -> Result<DynamicPolicy, DslError> {
        let signature = BracketSignature::new(entrants.to_vec())
            .map_err(|e| DslError::Build(e.into(), stmt.line, stmt.col))?;
        Ok(if random {
            DynamicPolicy::RandomDraw { signature }
        } else {
            DynamicPolicy::Reseed { signature }
        })
    };
    match &stmt.node {
        StatementNode::PolicyReseed { signature } => build(signature, false),
        StatementNode::PolicyRandom { signature } => build(signature, true),
        StatementNode::PolicySwiss { teams, rounds } => {
            make_swiss(*teams, *rounds, SwissTiebreak::BySeed)
                .map_err(|e| DslError::Build(e, stmt.line, stmt.col))
        }
        _ => unreachable!("caller filters policy statements"),
    }
}
