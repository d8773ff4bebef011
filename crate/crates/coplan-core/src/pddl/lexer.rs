//! Tokenizer for the PDDL subset. Comments run from `;` to end of line;
//! symbols are normalized to lower case (keywords are case-insensitive
//! and identifiers follow the community lower-case convention).

use alloc::string::String;
use alloc::vec::Vec;

use super::PddlError;

#[derive(Clone, Debug, PartialEq)]
pub enum TokenKind {
    LParen,
    RParen,
    /// Any bare word: identifiers, keywords (`:action`), variables
    /// (`?x`), numbers, `=`, `-`.
    Symbol(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub line: u32,
    pub col: u32,
}

pub fn tokenize(text: &str) -> Result<Vec<Token>, PddlError> {
    let mut tokens = Vec::new();
    let mut line: u32 = 1;
    let mut col: u32 = 1;
    let mut chars = text.chars().peekable();

    while let Some(&c) = chars.peek() {
        match c {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            ';' => {
                while let Some(&c2) = chars.peek() {
                    if c2 == '\n' {
                        break;
                    }
                    chars.next();
                    col += 1;
                }
            }
            c if c.is_whitespace() => {
                chars.next();
                col += 1;
            }
            '(' => {
                tokens.push(Token {
                    kind: TokenKind::LParen,
                    line,
                    col,
                });
                chars.next();
                col += 1;
            }
            ')' => {
                tokens.push(Token {
                    kind: TokenKind::RParen,
                    line,
                    col,
                });
                chars.next();
                col += 1;
            }
            c if is_symbol_char(c) => {
                let start_col = col;
                let mut sym = String::new();
                while let Some(&c2) = chars.peek() {
                    if is_symbol_char(c2) {
                        sym.push(c2.to_ascii_lowercase());
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                tokens.push(Token {
                    kind: TokenKind::Symbol(sym),
                    line,
                    col: start_col,
                });
            }
            other => {
                return Err(PddlError::at(
                    line,
                    col,
                    alloc::format!("unexpected character `{other}`"),
                ));
            }
        }
    }
    Ok(tokens)
}

fn is_symbol_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, ':' | '?' | '-' | '_' | '=' | '.' | '+' | '*' | '/')
}
