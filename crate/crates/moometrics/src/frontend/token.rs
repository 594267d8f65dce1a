//! Hand-rolled lexer producing positioned tokens.
//!
//! The token stream is the contract between source text and parse tree: a
//! well-formed tree reproduces its token sequence exactly (see
//! [`crate::frontend::ast`]), which is what the round-trip tests check.

use super::{ParseDiagnostic, Severity};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    // keywords
    Package,
    Import,
    Interface,
    Abstract,
    Class,
    Extends,
    Implements,
    Field,
    Call,
    Access,
    Assign,
    If,
    Else,
    While,
    Return,
    // punctuation
    LBrace,
    RBrace,
    LParen,
    RParen,
    Semi,
    Comma,
    Dot,
    // everything else
    Ident(String),
}

impl TokenKind {
    /// The source text this token stands for.
    pub fn lexeme(&self) -> &str {
        match self {
            TokenKind::Package => "package",
            TokenKind::Import => "import",
            TokenKind::Interface => "interface",
            TokenKind::Abstract => "abstract",
            TokenKind::Class => "class",
            TokenKind::Extends => "extends",
            TokenKind::Implements => "implements",
            TokenKind::Field => "field",
            TokenKind::Call => "call",
            TokenKind::Access => "access",
            TokenKind::Assign => "assign",
            TokenKind::If => "if",
            TokenKind::Else => "else",
            TokenKind::While => "while",
            TokenKind::Return => "return",
            TokenKind::LBrace => "{",
            TokenKind::RBrace => "}",
            TokenKind::LParen => "(",
            TokenKind::RParen => ")",
            TokenKind::Semi => ";",
            TokenKind::Comma => ",",
            TokenKind::Dot => ".",
            TokenKind::Ident(name) => name,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    /// 1-based source line.
    pub line: u32,
    /// 1-based source column.
    pub column: u32,
}

fn keyword(word: &str) -> Option<TokenKind> {
    let kind = match word {
        "package" => TokenKind::Package,
        "import" => TokenKind::Import,
        "interface" => TokenKind::Interface,
        "abstract" => TokenKind::Abstract,
        "class" => TokenKind::Class,
        "extends" => TokenKind::Extends,
        "implements" => TokenKind::Implements,
        "field" => TokenKind::Field,
        "call" => TokenKind::Call,
        "access" => TokenKind::Access,
        "assign" => TokenKind::Assign,
        "if" => TokenKind::If,
        "else" => TokenKind::Else,
        "while" => TokenKind::While,
        "return" => TokenKind::Return,
        _ => return None,
    };
    Some(kind)
}

/// All reserved words; identifiers may not collide with these.
pub const KEYWORDS: [&str; 15] = [
    "package",
    "import",
    "interface",
    "abstract",
    "class",
    "extends",
    "implements",
    "field",
    "call",
    "access",
    "assign",
    "if",
    "else",
    "while",
    "return",
];

/// Split source text into tokens. Illegal characters are reported as
/// diagnostics and skipped so the parser can still look at the rest of the
/// file; `//` comments run to end of line.
pub fn lex(text: &str, path: &str) -> (Vec<Token>, Vec<ParseDiagnostic>) {
    let mut tokens = Vec::new();
    let mut diagnostics = Vec::new();
    let mut chars = text.chars().peekable();
    let mut line: u32 = 1;
    let mut column: u32 = 1;

    while let Some(&c) = chars.peek() {
        if c == '\n' {
            chars.next();
            line += 1;
            column = 1;
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            column += 1;
            continue;
        }
        if c == '/' {
            // only `//` comments exist; a lone slash is illegal
            let start_column = column;
            chars.next();
            column += 1;
            if chars.peek() == Some(&'/') {
                while let Some(&n) = chars.peek() {
                    if n == '\n' {
                        break;
                    }
                    chars.next();
                    column += 1;
                }
            } else {
                diagnostics.push(ParseDiagnostic {
                    path: path.to_string(),
                    line,
                    column: start_column,
                    message: "illegal character `/` (comments start with `//`)".to_string(),
                    severity: Severity::Error,
                });
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start_column = column;
            let mut word = String::new();
            while let Some(&n) = chars.peek() {
                if n.is_ascii_alphanumeric() || n == '_' {
                    word.push(n);
                    chars.next();
                    column += 1;
                } else {
                    break;
                }
            }
            let kind = keyword(&word).unwrap_or(TokenKind::Ident(word));
            tokens.push(Token {
                kind,
                line,
                column: start_column,
            });
            continue;
        }
        let punct = match c {
            '{' => Some(TokenKind::LBrace),
            '}' => Some(TokenKind::RBrace),
            '(' => Some(TokenKind::LParen),
            ')' => Some(TokenKind::RParen),
            ';' => Some(TokenKind::Semi),
            ',' => Some(TokenKind::Comma),
            '.' => Some(TokenKind::Dot),
            _ => None,
        };
        match punct {
            Some(kind) => {
                tokens.push(Token {
                    kind,
                    line,
                    column,
                });
                chars.next();
                column += 1;
            }
            None => {
                diagnostics.push(ParseDiagnostic {
                    path: path.to_string(),
                    line,
                    column,
                    message: format!("illegal character `{c}`"),
                    severity: Severity::Error,
                });
                chars.next();
                column += 1;
            }
        }
    }

    (tokens, diagnostics)
}
