//! Tokenizer for free-format COBOL source.
//!
//! Words are uppercased (COBOL is case-insensitive), `*>` starts a comment,
//! and a period only separates sentences when followed by whitespace or end
//! of input, so `12.5` stays a single numeric literal.

use super::diag::Diagnostic;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TokKind {
    /// Identifier or keyword, uppercased.
    Word(String),
    /// Scaled numeric literal.
    Number { raw: i128, scale: u32 },
    StrLit(String),
    Dot,
    LParen,
    RParen,
    Comma,
    Colon,
    Eq,
    NotEq,
    Lt,
    Gt,
    Le,
    Ge,
    Plus,
    Minus,
    Star,
    Slash,
    Eof,
}

#[derive(Clone, Debug)]
pub struct Token {
    pub kind: TokKind,
    /// Source text of the token, used to reassemble PIC strings and EXEC text.
    pub lexeme: String,
    pub line: u32,
    pub col: u32,
}

pub fn lex(source: &str) -> Result<Vec<Token>, Diagnostic> {
    let mut tokens = Vec::new();
    let mut line: u32 = 1;
    let mut col: u32 = 1;
    let chars: Vec<char> = source.chars().collect();
    let mut i = 0usize;

    macro_rules! push {
        ($kind:expr, $lexeme:expr, $c:expr) => {
            tokens.push(Token {
                kind: $kind,
                lexeme: $lexeme,
                line,
                col: $c,
            })
        };
    }

    while i < chars.len() {
        let c = chars[i];
        match c {
            '\n' => {
                line += 1;
                col = 1;
                i += 1;
            }
            ' ' | '\t' | '\r' => {
                col += 1;
                i += 1;
            }
            '*' if i + 1 < chars.len() && chars[i + 1] == '>' => {
                // comment to end of line
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '\'' | '"' => {
                let quote = c;
                let start_col = col;
                let mut text = String::new();
                i += 1;
                col += 1;
                loop {
                    if i >= chars.len() || chars[i] == '\n' {
                        return Err(Diagnostic::syntax(
                            line,
                            start_col,
                            "closing quote",
                            "end of line",
                        ));
                    }
                    if chars[i] == quote {
                        i += 1;
                        col += 1;
                        break;
                    }
                    text.push(chars[i]);
                    i += 1;
                    col += 1;
                }
                push!(TokKind::StrLit(text.clone()), format!("'{text}'"), start_col);
            }
            '0'..='9' => {
                let start_col = col;
                let mut lexeme = String::new();
                while i < chars.len() && chars[i].is_ascii_digit() {
                    lexeme.push(chars[i]);
                    i += 1;
                    col += 1;
                }
                let mut scale = 0u32;
                if i + 1 < chars.len() && chars[i] == '.' && chars[i + 1].is_ascii_digit() {
                    lexeme.push('.');
                    i += 1;
                    col += 1;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        lexeme.push(chars[i]);
                        scale += 1;
                        i += 1;
                        col += 1;
                    }
                }
                let digits: String = lexeme.chars().filter(|c| c.is_ascii_digit()).collect();
                let raw: i128 = digits.parse().map_err(|_| {
                    Diagnostic::syntax(line, start_col, "numeric literal", &lexeme)
                })?;
                push!(TokKind::Number { raw, scale }, lexeme.clone(), start_col);
            }
            c if c.is_ascii_alphabetic() => {
                let start_col = col;
                let mut word = String::new();
                while i < chars.len()
                    && (chars[i].is_ascii_alphanumeric() || chars[i] == '-' || chars[i] == '_')
                {
                    word.push(chars[i].to_ascii_uppercase());
                    i += 1;
                    col += 1;
                }
                push!(TokKind::Word(word.clone()), word.clone(), start_col);
            }
            '.' => {
                push!(TokKind::Dot, ".".into(), col);
                i += 1;
                col += 1;
            }
            '(' => {
                push!(TokKind::LParen, "(".into(), col);
                i += 1;
                col += 1;
            }
            ')' => {
                push!(TokKind::RParen, ")".into(), col);
                i += 1;
                col += 1;
            }
            ',' => {
                push!(TokKind::Comma, ",".into(), col);
                i += 1;
                col += 1;
            }
            ':' => {
                push!(TokKind::Colon, ":".into(), col);
                i += 1;
                col += 1;
            }
            '=' => {
                push!(TokKind::Eq, "=".into(), col);
                i += 1;
                col += 1;
            }
            '+' => {
                push!(TokKind::Plus, "+".into(), col);
                i += 1;
                col += 1;
            }
            '-' => {
                push!(TokKind::Minus, "-".into(), col);
                i += 1;
                col += 1;
            }
            '*' => {
                push!(TokKind::Star, "*".into(), col);
                i += 1;
                col += 1;
            }
            '/' => {
                push!(TokKind::Slash, "/".into(), col);
                i += 1;
                col += 1;
            }
            '<' => {
                let start_col = col;
                if i + 1 < chars.len() && chars[i + 1] == '>' {
                    push!(TokKind::NotEq, "<>".into(), start_col);
                    i += 2;
                    col += 2;
                } else if i + 1 < chars.len() && chars[i + 1] == '=' {
                    push!(TokKind::Le, "<=".into(), start_col);
                    i += 2;
                    col += 2;
                } else {
                    push!(TokKind::Lt, "<".into(), start_col);
                    i += 1;
                    col += 1;
                }
            }
            '>' => {
                let start_col = col;
                if i + 1 < chars.len() && chars[i + 1] == '=' {
                    push!(TokKind::Ge, ">=".into(), start_col);
                    i += 2;
                    col += 2;
                } else {
                    push!(TokKind::Gt, ">".into(), start_col);
                    i += 1;
                    col += 1;
                }
            }
            other => {
                return Err(Diagnostic::syntax(
                    line,
                    col,
                    "token",
                    &other.to_string(),
                ));
            }
        }
    }
    tokens.push(Token {
        kind: TokKind::Eof,
        lexeme: String::new(),
        line,
        col,
    });
    Ok(tokens)
}
