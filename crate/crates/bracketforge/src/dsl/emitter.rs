//! Canonical pretty-printing: statements sorted by identifier, one per
//! line, normalized whitespace. Parsing an emitted file reproduces the same
//! compiled object, and emitting is idempotent after one normalization.

use std::fmt::Write;

use super::parser::{FormatAst, SinkNode, SrcNode, Statement, StatementNode};
use crate::types::{Multibracket, Sink, Source};

fn signature_text(entrants: &[u32]) -> String {
    let parts: Vec<String> = entrants.iter().map(u32::to_string).collect();
    format!("[{}]", parts.join(","))
}

fn src_text(src: &SrcNode) -> String {
    match src {
        SrcNode::Seed(v) => format!("seed {v}"),
        SrcNode::Winner(m) => format!("winner {m}"),
        SrcNode::Loser(m) => format!("loser {m}"),
    }
}

fn sink_text(sink: &SinkNode) -> String {
    match sink {
        SinkNode::Slot { target, side } => format!("match {target}.{side}"),
        SinkNode::Place(p) => format!("place {p}"),
        SinkNode::Tie { lo, hi } => format!("tie {lo}..{hi}"),
    }
}

fn statement_text(node: &StatementNode) -> String {
    match node {
        StatementNode::Bracket { ident, signature } => {
            format!("bracket {ident}: signature {}", signature_text(signature))
        }
        StatementNode::Consolation { target, depth } => {
            format!("consolation {target} depth {depth}")
        }
        StatementNode::PolicyReseed { signature } => {
            format!("policy reseed signature {}", signature_text(signature))
        }
        StatementNode::PolicyRandom { signature } => {
            format!("policy random signature {}", signature_text(signature))
        }
        StatementNode::PolicySwiss { teams, rounds } => {
            format!("policy swiss teams {teams} rounds {rounds}")
        }
        StatementNode::Match {
            ident,
            slot_a,
            slot_b,
            win,
            lose,
        } => format!(
            "match {ident}: {} vs {} win {} lose {}",
            src_text(slot_a),
            src_text(slot_b),
            sink_text(win),
            sink_text(lose)
        ),
    }
}

/// Emits the canonical text of an AST.
pub fn emit_ast(ast: &FormatAst) -> String {
    let mut ordered: Vec<&Statement> = ast.statements.iter().collect();
    ordered.sort_by(|a, b| {
        (a.node.ident(), a.node.kind_rank()).cmp(&(b.node.ident(), b.node.kind_rank()))
    });
    let mut out = String::new();
    let _ = writeln!(out, "format \"{}\" {{", ast.name);
    for stmt in ordered {
        let _ = writeln!(out, "  {}", statement_text(&stmt.node));
    }
    out.push_str("}\n");
    out
}

/// Emits a multibracket as canonical explicit match statements.
pub fn emit_multibracket(name: &str, mb: &Multibracket) -> String {
    let statements = mb
        .matches()
        .iter()
        .map(|(id, m)| {
            let src = |source: &Source| match source {
                Source::Entry(s) => SrcNode::Seed(s.0),
                Source::WinnerOf(x) => SrcNode::Winner(x.to_string()),
                Source::LoserOf(x) => SrcNode::Loser(x.to_string()),
            };
            let sink = |s: &Sink| match s {
                Sink::ToSlot(target, side) => SinkNode::Slot {
                    target: target.to_string(),
                    side: *side,
                },
                Sink::Place(p) => SinkNode::Place(*p),
                Sink::Tie { lo, hi } => SinkNode::Tie { lo: *lo, hi: *hi },
            };
            Statement {
                line: 1,
                col: 1,
                node: StatementNode::Match {
                    ident: id.to_string(),
                    slot_a: src(&m.slot_a),
                    slot_b: src(&m.slot_b),
                    win: sink(&m.on_win),
                    lose: sink(&m.on_lose),
                },
            }
        })
        .collect();
    emit_ast(&FormatAst {
        name: name.to_string(),
        statements,
    })
}
