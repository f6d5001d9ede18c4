//! Hand-written recursive-descent parser for the format grammar:
//!
//! ```text
//! file     := "format" STRING "{" stmt* "}"
//! stmt     := bracketS | policyS | matchS | consolS
//! bracketS := "bracket" IDENT ":" "signature" "[" INT ("," INT)* "]"
//! consolS  := "consolation" IDENT "depth" INT
//! policyS  := "policy" ("reseed" | "random") "signature" "[" INT ("," INT)* "]"
//!           | "policy" "swiss" "teams" INT "rounds" INT
//! matchS   := "match" IDENT ":" src "vs" src "win" sink "lose" sink
//! src      := "seed" INT | "winner" IDENT | "loser" IDENT
//! sink     := "match" IDENT "." ("A"|"B") | "place" INT | "tie" INT ".." INT
//! ```

use std::collections::BTreeSet;

use super::lexer::{lex, Pos, Token, TokenKind};
use super::DslError;
use crate::types::SlotSide;

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SrcNode {
    Seed(u32),
    Winner(String),
    Loser(String),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SinkNode {
    Slot { target: String, side: SlotSide },
    Place(u32),
    Tie { lo: u32, hi: u32 },
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum StatementNode {
    Bracket {
        ident: String,
        signature: Vec<u32>,
    },
    Consolation {
        target: String,
        depth: u32,
    },
    PolicyReseed {
        signature: Vec<u32>,
    },
    PolicyRandom {
        signature: Vec<u32>,
    },
    PolicySwiss {
        teams: u32,
        rounds: u32,
    },
    Match {
        ident: String,
        slot_a: SrcNode,
        slot_b: SrcNode,
        win: SinkNode,
        lose: SinkNode,
    },
}

impl StatementNode {
    /// Sorting identifier for the canonical form; policies have none.
    pub fn ident(&self) -> &str {
        match self {
            StatementNode::Bracket { ident, .. } | StatementNode::Match { ident, .. } => ident,
            StatementNode::Consolation { target, .. } => target,
            _ => "",
        }
    }

    /// Orders statement kinds sharing an identifier (a bracket before its
    /// consolation).
    pub fn kind_rank(&self) -> u8 {
        match self {
            StatementNode::Bracket { .. } => 0,
            StatementNode::Consolation { .. } => 1,
            StatementNode::Match { .. } => 2,
            _ => 3,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Statement {
    pub line: u32,
    pub col: u32,
    pub node: StatementNode,
}

/// Parsed format file: a name plus declarations in source order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FormatAst {
    pub name: String,
    pub statements: Vec<Statement>,
}

struct Parser {
    tokens: Vec<Token>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.at]
    }

    fn advance(&mut self) -> Token {
        let t = self.tokens[self.at].clone();
        if self.at + 1 < self.tokens.len() {
            self.at += 1;
        }
        t
    }

    fn fail<T>(&self, pos: Pos, expected: impl Into<String>) -> Result<T, DslError> {
        Err(DslError::Syntax {
            line: pos.line,
            col: pos.col,
            expected: expected.into(),
        })
    }

    fn unexpected<T>(&self, expected: &str) -> Result<T, DslError> {
        let t = self.peek();
        self.fail(
            t.pos,
            format!("expected {expected}, found {}", t.kind.describe()),
        )
    }

    fn expect(&mut self, kind: TokenKind, expected: &str) -> Result<Token, DslError> {
        if self.peek().kind == kind {
            Ok(self.advance())
        } else {
            self.unexpected(expected)
        }
    }

    fn expect_ident(&mut self, what: &str) -> Result<(String, Pos), DslError> {
        match self.peek().kind.clone() {
            TokenKind::Ident(name) => {
                let pos = self.advance().pos;
                Ok((name, pos))
            }
            _ => self.unexpected(what),
        }
    }

    fn expect_int(&mut self, what: &str) -> Result<u32, DslError> {
        match self.peek().kind {
            TokenKind::Int(v) => {
                self.advance();
                Ok(v)
            }
            _ => self.unexpected(what),
        }
    }

    fn signature_list(&mut self) -> Result<Vec<u32>, DslError> {
        self.expect(TokenKind::KwSignature, "`signature`")?;
        self.expect(TokenKind::LBracket, "`[`")?;
        let mut entrants = vec![self.expect_int("an entrant count")?];
        loop {
            match self.peek().kind {
                TokenKind::Comma => {
                    self.advance();
                    entrants.push(self.expect_int("an entrant count")?);
                }
                TokenKind::RBracket => {
                    self.advance();
                    return Ok(entrants);
                }
                _ => return self.unexpected("`,` or `]`"),
            }
        }
    }

    fn src(&mut self) -> Result<SrcNode, DslError> {
        match self.peek().kind {
            TokenKind::KwSeed => {
                self.advance();
                Ok(SrcNode::Seed(self.expect_int("a seed number")?))
            }
            TokenKind::KwWinner => {
                self.advance();
                Ok(SrcNode::Winner(self.expect_ident("a match identifier")?.0))
            }
            TokenKind::KwLoser => {
                self.advance();
                Ok(SrcNode::Loser(self.expect_ident("a match identifier")?.0))
            }
            _ => self.unexpected("one of `seed`, `winner`, `loser`"),
        }
    }

    fn sink(&mut self) -> Result<SinkNode, DslError> {
        match self.peek().kind {
            TokenKind::KwMatch => {
                self.advance();
                let (target, _) = self.expect_ident("a match identifier")?;
                self.expect(TokenKind::Dot, "`.`")?;
                let (slot, pos) = self.expect_ident("slot `A` or `B`")?;
                let side = match slot.as_str() {
                    "A" => SlotSide::A,
                    "B" => SlotSide::B,
                    _ => {
                        return self.fail(pos, format!("expected slot `A` or `B`, found `{slot}`"))
                    }
                };
                Ok(SinkNode::Slot { target, side })
            }
            TokenKind::KwPlace => {
                self.advance();
                Ok(SinkNode::Place(self.expect_int("a place number")?))
            }
            TokenKind::KwTie => {
                self.advance();
                let lo = self.expect_int("the best place of the tie")?;
                self.expect(TokenKind::DotDot, "`..`")?;
                let hi = self.expect_int("the worst place of the tie")?;
                Ok(SinkNode::Tie { lo, hi })
            }
            _ => self.unexpected("one of `match`, `place`, `tie`"),
        }
    }

    fn statement(&mut self) -> Result<Statement, DslError> {
        let pos = self.peek().pos;
        let node = match self.peek().kind {
            TokenKind::KwBracket => {
                self.advance();
                let (ident, _) = self.expect_ident("a bracket identifier")?;
                self.expect(TokenKind::Colon, "`:`")?;
                let signature = self.signature_list()?;
                StatementNode::Bracket { ident, signature }
            }
            TokenKind::KwConsolation => {
                self.advance();
                let (target, _) = self.expect_ident("a bracket identifier")?;
                self.expect(TokenKind::KwDepth, "`depth`")?;
                let depth = self.expect_int("a depth")?;
                StatementNode::Consolation { target, depth }
            }
            TokenKind::KwPolicy => {
                self.advance();
                match self.peek().kind {
                    TokenKind::KwReseed => {
                        self.advance();
                        StatementNode::PolicyReseed {
                            signature: self.signature_list()?,
                        }
                    }
                    TokenKind::KwRandom => {
                        self.advance();
                        StatementNode::PolicyRandom {
                            signature: self.signature_list()?,
                        }
                    }
                    TokenKind::KwSwiss => {
                        self.advance();
                        self.expect(TokenKind::KwTeams, "`teams`")?;
                        let teams = self.expect_int("a team count")?;
                        self.expect(TokenKind::KwRounds, "`rounds`")?;
                        let rounds = self.expect_int("a round count")?;
                        StatementNode::PolicySwiss { teams, rounds }
                    }
                    _ => return self.unexpected("one of `reseed`, `random`, `swiss`"),
                }
            }
            TokenKind::KwMatch => {
                self.advance();
                let (ident, _) = self.expect_ident("a match identifier")?;
                self.expect(TokenKind::Colon, "`:`")?;
                let slot_a = self.src()?;
                self.expect(TokenKind::KwVs, "`vs`")?;
                let slot_b = self.src()?;
                self.expect(TokenKind::KwWin, "`win`")?;
                let win = self.sink()?;
                self.expect(TokenKind::KwLose, "`lose`")?;
                let lose = self.sink()?;
                StatementNode::Match {
                    ident,
                    slot_a,
                    slot_b,
                    win,
                    lose,
                }
            }
            TokenKind::KwCut => {
                return Err(DslError::ReservedKeyword {
                    keyword: "cut".to_string(),
                    line: pos.line,
                    col: pos.col,
                })
            }
            _ => {
                return self
                    .unexpected("one of `bracket`, `consolation`, `policy`, `match`, or `}`")
            }
        };
        Ok(Statement {
            line: pos.line,
            col: pos.col,
            node,
        })
    }

    fn file(&mut self) -> Result<FormatAst, DslError> {
        self.expect(TokenKind::KwFormat, "`format`")?;
        let name = match self.peek().kind.clone() {
            TokenKind::Str(s) => {
                self.advance();
                s
            }
            _ => return self.unexpected("a quoted format name"),
        };
        self.expect(TokenKind::LBrace, "`{`")?;
        let mut statements = Vec::new();
        while self.peek().kind != TokenKind::RBrace {
            if self.peek().kind == TokenKind::Eof {
                return self.unexpected("a statement or `}`");
            }
            statements.push(self.statement()?);
        }
        self.advance();
        self.expect(TokenKind::Eof, "end of file")?;

        // declared identifiers (brackets and matches) are unique per file;
        // a bracket may receive at most one consolation
        let mut declared: BTreeSet<&str> = BTreeSet::new();
        let mut consoled: BTreeSet<&str> = BTreeSet::new();
        for stmt in &statements {
            match &stmt.node {
                StatementNode::Bracket { ident, .. } | StatementNode::Match { ident, .. } => {
                    if !declared.insert(ident) {
                        return Err(DslError::DuplicateIdentifier {
                            name: ident.clone(),
                            line: stmt.line,
                            col: stmt.col,
                        });
                    }
                }
                StatementNode::Consolation { target, .. } if !consoled.insert(target) => {
                    return Err(DslError::DuplicateIdentifier {
                        name: target.clone(),
                        line: stmt.line,
                        col: stmt.col,
                    });
                }
                _ => {}
            }
        }
        Ok(FormatAst { name, statements })
    }
}

/// Parses UTF-8 text into an AST. Errors carry the offending line and
/// column plus a description of what was expected there.
pub fn parse(text: &str) -> Result<FormatAst, DslError> {
    let tokens = lex(text)?;
    Parser { tokens, at: 0 }.file()
}
