//! Tokenizer for the supported Solidity subset.
//!
//! The token stream is lossless: whitespace and comments are kept as trivia
//! tokens, so concatenating every lexeme reproduces the input exactly.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::span::{LineIndex, Span};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TokenKind {
    Identifier,
    NumberLiteral,
    UnitSuffix,
    Keyword,
    StringLiteral,
    Operator,
    Punctuation,
    Comment,
    Whitespace,
}

impl TokenKind {
    pub fn is_trivia(self) -> bool {
        matches!(self, TokenKind::Comment | TokenKind::Whitespace)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub kind: TokenKind,
    pub lexeme: String,
    pub span: Span,
}

impl Token {
    pub fn is_trivia(&self) -> bool {
        self.kind.is_trivia()
    }

    pub fn is(&self, kind: TokenKind, lexeme: &str) -> bool {
        self.kind == kind && self.lexeme == lexeme
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {message}")]
pub struct LexError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

pub const ETHER_UNITS: [&str; 4] = ["wei", "szabo", "finney", "ether"];
pub const TIME_UNITS: [&str; 5] = ["seconds", "minutes", "hours", "days", "weeks"];

const KEYWORDS: &[&str] = &[
    "pragma", "import", "contract", "interface", "library", "is", "using", "for", "function",
    "constructor", "modifier", "event", "emit", "returns", "return", "if", "else", "while", "do",
    "break", "continue", "delete", "new", "public", "external", "internal", "private", "pure",
    "view", "payable", "constant", "memory", "storage", "calldata", "struct", "enum", "mapping",
    "true", "false", "anonymous", "indexed", "assembly", "throw", "var", "override", "virtual",
    "immutable", "try", "catch", "address", "bool", "string", "bytes", "byte", "int", "uint",
    "fixed", "ufixed",
];

/// Multi-character operators, longest first.
const OPERATORS: &[&str] = &[
    "<<=", ">>=", "**", "++", "--", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<", ">>",
    "<=", ">=", "==", "!=", "&&", "||", "=>", "->", ":=", "+", "-", "*", "/", "%", "<", ">", "=",
    "!", "~", "&", "|", "^", "?", ":",
];

const PUNCTUATION: &[u8] = b"(){}[];,.";

/// True for `uint8`..`uint256`, `int8`..`int256`, `bytes1`..`bytes32` and
/// the bare spellings handled by [`KEYWORDS`].
pub fn is_sized_elementary(word: &str) -> bool {
    fn suffix_ok(s: &str, max: u32, step: u32) -> bool {
        !s.starts_with('0')
            && s.parse::<u32>()
                .map(|n| n >= step && n <= max && n % step == 0)
                .unwrap_or(false)
    }
    if let Some(rest) = word.strip_prefix("uint") {
        suffix_ok(rest, 256, 8)
    } else if let Some(rest) = word.strip_prefix("int") {
        suffix_ok(rest, 256, 8)
    } else if let Some(rest) = word.strip_prefix("bytes") {
        suffix_ok(rest, 32, 1)
    } else {
        false
    }
}

pub fn is_keyword(word: &str) -> bool {
    KEYWORDS.contains(&word) || is_sized_elementary(word)
}

pub fn is_unit_suffix(word: &str) -> bool {
    ETHER_UNITS.contains(&word) || TIME_UNITS.contains(&word)
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_' || c == '$'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '$'
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    lines: LineIndex,
    tokens: Vec<Token>,
}

impl<'a> Lexer<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.src[self.pos..].chars().nth(n)
    }

    fn error(&self, at: usize, message: impl Into<String>) -> LexError {
        let (line, col) = self.lines.line_col(self.src, at);
        LexError {
            line,
            col,
            message: message.into(),
        }
    }

    fn push(&mut self, kind: TokenKind, start: usize) {
        let span = self.lines.span(self.src, start, self.pos);
        self.tokens.push(Token {
            kind,
            lexeme: self.src[start..self.pos].to_string(),
            span,
        });
    }

    fn eat_while(&mut self, pred: impl Fn(char) -> bool) {
        while let Some(c) = self.peek() {
            if !pred(c) {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn run(mut self) -> Result<Vec<Token>, LexError> {
        while let Some(c) = self.peek() {
            let start = self.pos;
            if c.is_whitespace() {
                self.eat_while(char::is_whitespace);
                self.push(TokenKind::Whitespace, start);
            } else if c == '/' && self.peek_at(1) == Some('/') {
                self.eat_while(|c| c != '\n');
                self.push(TokenKind::Comment, start);
            } else if c == '/' && self.peek_at(1) == Some('*') {
                match self.src[start + 2..].find("*/") {
                    Some(off) => self.pos = start + 2 + off + 2,
                    None => return Err(self.error(start, "unterminated block comment")),
                }
                self.push(TokenKind::Comment, start);
            } else if c == '"' || c == '\'' {
                self.string(start)?;
            } else if c.is_ascii_digit() || (c == '.' && self.peek_at(1).is_some_and(|d| d.is_ascii_digit())) {
                self.number(start)?;
            } else if is_ident_start(c) {
                self.eat_while(is_ident_continue);
                let word = &self.src[start..self.pos];
                if matches!(word, "hex" | "unicode") && matches!(self.peek(), Some('"' | '\'')) {
                    self.string(start)?;
                    continue;
                }
                let kind = if is_unit_suffix(word) {
                    TokenKind::UnitSuffix
                } else if is_keyword(word) {
                    TokenKind::Keyword
                } else {
                    TokenKind::Identifier
                };
                self.push(kind, start);
            } else if PUNCTUATION.contains(&(c as u8)) && c.is_ascii() {
                self.pos += 1;
                self.push(TokenKind::Punctuation, start);
            } else if let Some(op) = OPERATORS.iter().find(|op| self.src[start..].starts_with(**op)) {
                self.pos += op.len();
                self.push(TokenKind::Operator, start);
            } else {
                return Err(self.error(start, format!("illegal character {c:?}")));
            }
        }
        Ok(self.tokens)
    }

    /// Consumes a quoted literal; `self.pos` may sit on a `hex`/`unicode`
    /// prefix that has already been consumed.
    fn string(&mut self, start: usize) -> Result<(), LexError> {
        let quote = self.peek().expect("caller checked quote");
        let open = self.pos;
        self.pos += 1;
        loop {
            match self.peek() {
                None | Some('\n') => return Err(self.error(open, "unterminated string literal")),
                Some('\\') => {
                    self.pos += 1;
                    match self.peek() {
                        Some(c) => self.pos += c.len_utf8(),
                        None => return Err(self.error(open, "unterminated string literal")),
                    }
                }
                Some(c) if c == quote => {
                    self.pos += 1;
                    break;
                }
                Some(c) => self.pos += c.len_utf8(),
            }
        }
        self.push(TokenKind::StringLiteral, start);
        Ok(())
    }

    fn number(&mut self, start: usize) -> Result<(), LexError> {
        if self.src[start..].starts_with("0x") || self.src[start..].starts_with("0X") {
            self.pos += 2;
            self.eat_while(|c| c.is_ascii_hexdigit() || c == '_');
        } else {
            self.eat_while(|c| c.is_ascii_digit() || c == '_');
            if self.peek() == Some('.') && self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
                self.pos += 1;
                self.eat_while(|c| c.is_ascii_digit() || c == '_');
            }
            if matches!(self.peek(), Some('e' | 'E')) {
                let digits_at = if self.peek_at(1) == Some('-') { 2 } else { 1 };
                if self.peek_at(digits_at).is_some_and(|c| c.is_ascii_digit()) {
                    self.pos += digits_at;
                    self.eat_while(|c| c.is_ascii_digit() || c == '_');
                }
            }
        }
        if self.peek().is_some_and(is_ident_start) {
            return Err(self.error(self.pos, "identifier directly after number literal"));
        }
        self.push(TokenKind::NumberLiteral, start);
        Ok(())
    }
}

/// Split `source` into a lossless, ordered token stream.
pub fn tokenize(source: &str) -> Result<Vec<Token>, LexError> {
    Lexer {
        src: source,
        pos: 0,
        lines: LineIndex::new(source),
        tokens: Vec::new(),
    }
    .run()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn significant(src: &str) -> Vec<(TokenKind, String)> {
        tokenize(src)
            .unwrap()
            .into_iter()
            .filter(|t| !t.is_trivia())
            .map(|t| (t.kind, t.lexeme))
            .collect()
    }

    #[test]
    fn ether_suffix() {
        assert_eq!(
            significant("1 ether"),
            vec![
                (TokenKind::NumberLiteral, "1".into()),
                (TokenKind::UnitSuffix, "ether".into())
            ]
        );
    }

    #[test]
    fn empty_input() {
        assert!(tokenize("").unwrap().is_empty());
    }

    #[test]
    fn every_unit_is_a_suffix_token() {
        for unit in ETHER_UNITS.iter().chain(TIME_UNITS.iter()) {
            let toks = significant(&format!("3 {unit}"));
            assert_eq!(toks[1], (TokenKind::UnitSuffix, unit.to_string()));
        }
    }

    #[test]
    fn longest_operator_wins() {
        let toks = significant("a <<= b >= c == d && e ** f");
        let ops: Vec<_> = toks
            .iter()
            .filter(|(k, _)| *k == TokenKind::Operator)
            .map(|(_, l)| l.as_str())
            .collect();
        assert_eq!(ops, ["<<=", ">=", "==", "&&", "**"]);
    }

    #[test]
    fn lossless_concatenation() {
        let src = "contract C { // hi\n  uint x = 0x1F; /* b */ string s = \"a\\\"b\"; }";
        let joined: String = tokenize(src).unwrap().iter().map(|t| t.lexeme.as_str()).collect();
        assert_eq!(joined, src);
    }

    #[test]
    fn keyword_classification() {
        let toks = significant("uint256 bytes32 uint7 from msg");
        assert_eq!(toks[0].0, TokenKind::Keyword);
        assert_eq!(toks[1].0, TokenKind::Keyword);
        assert_eq!(toks[2].0, TokenKind::Identifier);
        assert_eq!(toks[3].0, TokenKind::Identifier);
    }

    #[test]
    fn scientific_and_hex_literals() {
        let toks = significant("1e18 2.5 0xdeadBEEF 1_000");
        assert!(toks.iter().all(|(k, _)| *k == TokenKind::NumberLiteral));
        assert_eq!(toks.len(), 4);
    }

    #[test]
    fn unterminated_comment_reports_position() {
        let err = tokenize("a\n  /* never closed").unwrap_err();
        assert_eq!((err.line, err.col), (2, 3));
    }

    #[test]
    fn unterminated_string() {
        let err = tokenize("x = \"abc").unwrap_err();
        assert_eq!((err.line, err.col), (1, 5));
    }

    #[test]
    fn illegal_character() {
        let err = tokenize("a # b").unwrap_err();
        assert!(err.message.contains("illegal"));
        assert_eq!(err.col, 3);
    }

    #[test]
    fn hex_string_literal() {
        let toks = significant("hex\"00ff\"");
        assert_eq!(toks, vec![(TokenKind::StringLiteral, "hex\"00ff\"".into())]);
    }
}
