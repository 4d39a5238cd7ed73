//! Typed AST for the supported COBOL subset.

use crate::value::PicType;
use serde::{Deserialize, Serialize};

/// A WORKING-STORAGE data item. Leaves carry a picture; group items carry
/// children instead.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DataItem {
    pub name: String,
    pub level: u8,
    pub pic: Option<PicType>,
    pub children: Vec<DataItem>,
    pub line: u32,
}

impl DataItem {
    pub fn is_leaf(&self) -> bool {
        self.pic.is_some()
    }

    /// Leaf descendants in declaration order (the item itself if a leaf).
    pub fn leaves(&self) -> Vec<&DataItem> {
        let mut out = Vec::new();
        fn walk<'a>(item: &'a DataItem, out: &mut Vec<&'a DataItem>) {
            if item.is_leaf() {
                out.push(item);
            }
            for c in &item.children {
                walk(c, out);
            }
        }
        walk(self, &mut out);
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProgramAst {
    pub program_id: String,
    pub working_storage: Vec<DataItem>,
    pub paragraphs: Vec<Paragraph>,
}

impl ProgramAst {
    pub fn paragraph(&self, name: &str) -> Option<&Paragraph> {
        self.paragraphs.iter().find(|p| p.name == name)
    }

    /// All leaf items in declaration order.
    pub fn leaf_items(&self) -> Vec<&DataItem> {
        self.working_storage
            .iter()
            .flat_map(|i| i.leaves())
            .collect()
    }

    pub fn find_item(&self, name: &str) -> Option<&DataItem> {
        fn walk<'a>(items: &'a [DataItem], name: &str) -> Option<&'a DataItem> {
            for i in items {
                if i.name == name {
                    return Some(i);
                }
                if let Some(found) = walk(&i.children, name) {
                    return Some(found);
                }
            }
            None
        }
        walk(&self.working_storage, name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Paragraph {
    pub name: String,
    pub statements: Vec<Statement>,
    pub line: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Statement {
    pub kind: StatementKind,
    pub line: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StatementKind {
    Move {
        src: Expr,
        dsts: Vec<String>,
    },
    Compute {
        dst: String,
        expr: Expr,
    },
    /// ADD x TO y / ADD x TO y GIVING z (and the SUBTRACT/MULTIPLY/DIVIDE
    /// forms, normalized at parse time).
    Arith {
        op: ArithVerb,
        operand: Expr,
        target: String,
        giving: Option<String>,
    },
    If {
        cond: Cond,
        then_branch: Vec<Statement>,
        else_branch: Vec<Statement>,
    },
    Evaluate {
        subject: EvaluateSubject,
        whens: Vec<WhenArm>,
        other: Vec<Statement>,
    },
    PerformParagraph {
        name: String,
    },
    PerformUntil {
        cond: Cond,
        body: Vec<Statement>,
        test_before: bool,
    },
    PerformVarying {
        var: String,
        from: Expr,
        by: Expr,
        until: Cond,
        body: Vec<Statement>,
    },
    ExecSql(SqlStatement),
    ExecGeneric {
        system: String,
        verb: String,
        options: Vec<GenericOption>,
    },
    Call {
        name: String,
        using: Vec<String>,
    },
    Read {
        file: String,
        record: String,
    },
    Write {
        record: String,
    },
    Display {
        args: Vec<Expr>,
    },
    Continue,
    StopRun,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ArithVerb {
    Add,
    Subtract,
    Multiply,
    Divide,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EvaluateSubject {
    Var(String),
    True,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WhenArm {
    pub test: WhenTest,
    pub body: Vec<Statement>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum WhenTest {
    /// `WHEN <literal-or-identifier>` against an identifier subject.
    Value(Expr),
    /// `WHEN <condition>` against an `EVALUATE TRUE` subject.
    Cond(Cond),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Expr {
    Var(String),
    /// Scaled numeric literal: `12.5` is `raw: 125, scale: 1`.
    NumLit {
        raw: i128,
        scale: u32,
    },
    StrLit(String),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
}

impl Expr {
    pub fn num(raw: i128) -> Expr {
        Expr::NumLit { raw, scale: 0 }
    }

    pub fn var(name: &str) -> Expr {
        Expr::Var(name.to_string())
    }

    /// Variables referenced anywhere in the expression.
    pub fn vars(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Expr::Var(v) => out.push(v),
            Expr::NumLit { .. } | Expr::StrLit(_) => {}
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Expr::Neg(a) => a.collect_vars(out),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CmpOp {
    Eq,
    Ne,
    Gt,
    Lt,
    Ge,
    Le,
}

impl CmpOp {
    pub fn negate(self) -> CmpOp {
        match self {
            CmpOp::Eq => CmpOp::Ne,
            CmpOp::Ne => CmpOp::Eq,
            CmpOp::Gt => CmpOp::Le,
            CmpOp::Le => CmpOp::Gt,
            CmpOp::Lt => CmpOp::Ge,
            CmpOp::Ge => CmpOp::Lt,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "<>",
            CmpOp::Gt => ">",
            CmpOp::Lt => "<",
            CmpOp::Ge => ">=",
            CmpOp::Le => "<=",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Cond {
    Cmp { op: CmpOp, lhs: Expr, rhs: Expr },
    And(Box<Cond>, Box<Cond>),
    Or(Box<Cond>, Box<Cond>),
    Not(Box<Cond>),
}

impl Cond {
    pub fn vars(&self) -> Vec<&str> {
        match self {
            Cond::Cmp { lhs, rhs, .. } => {
                let mut v = lhs.vars();
                v.extend(rhs.vars());
                v
            }
            Cond::And(a, b) | Cond::Or(a, b) => {
                let mut v = a.vars();
                v.extend(b.vars());
                v
            }
            Cond::Not(a) => a.vars(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum SqlVerb {
    Select,
    Insert,
    Update,
    Delete,
}

impl SqlVerb {
    pub fn as_str(&self) -> &'static str {
        match self {
            SqlVerb::Select => "SELECT",
            SqlVerb::Insert => "INSERT",
            SqlVerb::Update => "UPDATE",
            SqlVerb::Delete => "DELETE",
        }
    }
}

/// An embedded SQL statement, tokenized just far enough to classify the verb
/// and extract host variables with their direction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SqlStatement {
    pub verb: SqlVerb,
    pub table: String,
    /// SELECT column list or INSERT column list.
    pub columns: Vec<String>,
    /// SELECT ... INTO host variables.
    pub into_vars: Vec<String>,
    /// INSERT ... VALUES arguments, in order.
    pub values: Vec<SqlArg>,
    /// UPDATE ... SET column/argument pairs.
    pub set_pairs: Vec<(String, SqlArg)>,
    /// WHERE column/op/argument triples, AND-joined.
    pub where_triples: Vec<(String, CmpOp, SqlArg)>,
    pub raw_text: String,
}

impl SqlStatement {
    /// Host variables in source order with their direction
    /// (`true` = received by the program, i.e. a resource input).
    pub fn host_vars(&self) -> Vec<(&str, bool)> {
        let mut out: Vec<(&str, bool)> = Vec::new();
        for v in &self.into_vars {
            out.push((v, true));
        }
        for a in &self.values {
            if let SqlArg::Host(v) = a {
                out.push((v, false));
            }
        }
        for (_, a) in &self.set_pairs {
            if let SqlArg::Host(v) = a {
                out.push((v, false));
            }
        }
        for (_, _, a) in &self.where_triples {
            if let SqlArg::Host(v) = a {
                out.push((v, false));
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SqlArg {
    Host(String),
    Lit(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenericOption {
    pub name: String,
    pub value: GenericArg,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GenericArg {
    Var(String),
    Lit(String),
}
