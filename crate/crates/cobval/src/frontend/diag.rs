//! Parser and resolver diagnostics, printable as `file:line:col: message`.

use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum Diagnostic {
    #[serde(rename_all = "camelCase")]
    Syntax {
        line: u32,
        col: u32,
        expected: String,
        found: String,
    },
    #[serde(rename_all = "camelCase")]
    UnknownIdentifier { name: String, line: u32 },
    #[serde(rename_all = "camelCase")]
    UnsupportedConstruct { keyword: String, line: u32 },
}

impl Diagnostic {
    pub fn syntax(line: u32, col: u32, expected: &str, found: &str) -> Diagnostic {
        Diagnostic::Syntax {
            line,
            col,
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }

    pub fn line(&self) -> u32 {
        match self {
            Diagnostic::Syntax { line, .. }
            | Diagnostic::UnknownIdentifier { line, .. }
            | Diagnostic::UnsupportedConstruct { line, .. } => *line,
        }
    }

    pub fn col(&self) -> u32 {
        match self {
            Diagnostic::Syntax { col, .. } => *col,
            _ => 1,
        }
    }

    /// Render with a file name prefix, e.g. `prog.cbl:12:3: expected ...`.
    pub fn render(&self, file: &str) -> String {
        format!("{file}:{}:{}: {self}", self.line(), self.col())
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::Syntax {
                expected, found, ..
            } => write!(f, "expected {expected}, found {found}"),
            Diagnostic::UnknownIdentifier { name, .. } => {
                write!(f, "unknown identifier {name}")
            }
            Diagnostic::UnsupportedConstruct { keyword, .. } => {
                write!(f, "unsupported construct {keyword}")
            }
        }
    }
}
