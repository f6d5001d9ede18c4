//! Tokenizer for the format language. Tracks 1-based line and column for
//! every token; `#` starts a comment running to end of line.

use super::DslError;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum TokenKind {
    KwFormat,
    KwBracket,
    KwSignature,
    KwConsolation,
    KwDepth,
    KwPolicy,
    KwReseed,
    KwRandom,
    KwSwiss,
    KwTeams,
    KwRounds,
    KwMatch,
    KwSeed,
    KwWinner,
    KwLoser,
    KwVs,
    KwWin,
    KwLose,
    KwPlace,
    KwTie,
    /// Reserved for parameterized cookbook formats; rejected with a
    /// dedicated diagnostic.
    KwCut,
    Ident(String),
    Int(u32),
    Str(String),
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Colon,
    Dot,
    DotDot,
    Eof,
}

impl TokenKind {
    pub fn describe(&self) -> String {
        match self {
            TokenKind::Ident(s) => format!("identifier `{s}`"),
            TokenKind::Int(v) => format!("integer `{v}`"),
            TokenKind::Str(_) => "string".to_string(),
            TokenKind::Eof => "end of input".to_string(),
            other => format!("`{}`", other.literal()),
        }
    }

    fn literal(&self) -> &'static str {
        match self {
            TokenKind::KwFormat => "format",
            TokenKind::KwBracket => "bracket",
            TokenKind::KwSignature => "signature",
            TokenKind::KwConsolation => "consolation",
            TokenKind::KwDepth => "depth",
            TokenKind::KwPolicy => "policy",
            TokenKind::KwReseed => "reseed",
            TokenKind::KwRandom => "random",
            TokenKind::KwSwiss => "swiss",
            TokenKind::KwTeams => "teams",
            TokenKind::KwRounds => "rounds",
            TokenKind::KwMatch => "match",
            TokenKind::KwSeed => "seed",
            TokenKind::KwWinner => "winner",
            TokenKind::KwLoser => "loser",
            TokenKind::KwVs => "vs",
            TokenKind::KwWin => "win",
            TokenKind::KwLose => "lose",
            TokenKind::KwPlace => "place",
            TokenKind::KwTie => "tie",
            TokenKind::KwCut => "cut",
            TokenKind::LBrace => "{",
            TokenKind::RBrace => "}",
            TokenKind::LBracket => "[",
            TokenKind::RBracket => "]",
            TokenKind::Comma => ",",
            TokenKind::Colon => ":",
            TokenKind::Dot => ".",
            TokenKind::DotDot => "..",
            _ => unreachable!(),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Token {
    pub kind: TokenKind,
    pub pos: Pos,
}

fn keyword(word: &str) -> Option<TokenKind> {
    Some(match word {
        "format" => TokenKind::KwFormat,
        "bracket" => TokenKind::KwBracket,
        "signature" => TokenKind::KwSignature,
        "consolation" => TokenKind::KwConsolation,
        "depth" => TokenKind::KwDepth,
        "policy" => TokenKind::KwPolicy,
        "reseed" => TokenKind::KwReseed,
        "random" => TokenKind::KwRandom,
        "swiss" => TokenKind::KwSwiss,
        "teams" => TokenKind::KwTeams,
        "rounds" => TokenKind::KwRounds,
        "match" => TokenKind::KwMatch,
        "seed" => TokenKind::KwSeed,
        "winner" => TokenKind::KwWinner,
        "loser" => TokenKind::KwLoser,
        "vs" => TokenKind::KwVs,
        "win" => TokenKind::KwWin,
        "lose" => TokenKind::KwLose,
        "place" => TokenKind::KwPlace,
        "tie" => TokenKind::KwTie,
        "cut" => TokenKind::KwCut,
        _ => return None,
    })
}

pub fn lex(text: &str) -> Result<Vec<Token>, DslError> {
    let mut tokens = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0usize;
    let mut line = 1u32;
    let mut col = 1u32;

    macro_rules! bump {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }

    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        match c {
            ' ' | '\t' | '\r' | '\n' => bump!(),
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    bump!();
                }
            }
            '{' => {
                tokens.push(Token {
                    kind: TokenKind::LBrace,
                    pos,
                });
                bump!();
            }
            '}' => {
                tokens.push(Token {
                    kind: TokenKind::RBrace,
                    pos,
                });
                bump!();
            }
            '[' => {
                tokens.push(Token {
                    kind: TokenKind::LBracket,
                    pos,
                });
                bump!();
            }
            ']' => {
                tokens.push(Token {
                    kind: TokenKind::RBracket,
                    pos,
                });
                bump!();
            }
            ',' => {
                tokens.push(Token {
                    kind: TokenKind::Comma,
                    pos,
                });
                bump!();
            }
            ':' => {
                tokens.push(Token {
                    kind: TokenKind::Colon,
                    pos,
                });
                bump!();
            }
            '.' => {
                bump!();
                if i < chars.len() && chars[i] == '.' {
                    bump!();
                    tokens.push(Token {
                        kind: TokenKind::DotDot,
                        pos,
                    });
                } else {
                    tokens.push(Token {
                        kind: TokenKind::Dot,
                        pos,
                    });
                }
            }
            '"' => {
                bump!();
                let mut value = String::new();
                loop {
                    if i >= chars.len() || chars[i] == '\n' {
                        return Err(DslError::Syntax {
                            line: pos.line,
                            col: pos.col,
                            expected: "a closing `\"` on the same line".to_string(),
                        });
                    }
                    if chars[i] == '"' {
                        bump!();
                        break;
                    }
                    value.push(chars[i]);
                    bump!();
                }
                tokens.push(Token {
                    kind: TokenKind::Str(value),
                    pos,
                });
            }
            '0'..='9' => {
                let mut value = String::new();
                while i < chars.len() && chars[i].is_ascii_digit() {
                    value.push(chars[i]);
                    bump!();
                }
                let parsed = value.parse::<u32>().map_err(|_| DslError::Syntax {
                    line: pos.line,
                    col: pos.col,
                    expected: "an integer below 2^32".to_string(),
                })?;
                tokens.push(Token {
                    kind: TokenKind::Int(parsed),
                    pos,
                });
            }
            c if c.is_ascii_alphabetic() => {
                let mut word = String::new();
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    word.push(chars[i]);
                    bump!();
                }
                let kind = keyword(&word).unwrap_or(TokenKind::Ident(word));
                tokens.push(Token { kind, pos });
            }
            other => {
                return Err(DslError::Syntax {
                    line: pos.line,
                    col: pos.col,
                    expected: format!("a token, found `{other}`"),
                });
            }
        }
    }
    tokens.push(Token {
        kind: TokenKind::Eof,
        pos: Pos { line, col },
    });
    Ok(tokens)
}
