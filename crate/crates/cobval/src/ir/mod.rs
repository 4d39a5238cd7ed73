//! Primitive imperative IR with explicit control flow and classified
//! external calls.
//!
//! Lowering inlines `PERFORM paragraph` (rejecting cycles), desugars
//! `EVALUATE` into branch chains, and turns both `PERFORM UNTIL` and
//! `PERFORM VARYING` into header-branch loops. Each paragraph becomes one
//! self-contained CFG whose only `Halt` is the paragraph exit.

pub mod analysis;
pub mod dump;
pub mod eval;
pub mod lower;

use crate::frontend::ast::{Cond, Expr, GenericArg, ProgramAst, SqlArg, StatementKind};
use crate::value::PicType;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

pub use analysis::{bounded_path_count, branch_inventory, io_variables};
pub use lower::lower;

pub type NodeId = usize;

/// Variable implicitly declared by any embedded SQL statement.
pub const SQLCODE: &str = "SQLCODE";

pub fn sqlcode_pic() -> PicType {
    PicType::Numeric {
        signed: true,
        int_digits: 9,
        frac_digits: 0,
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", rename_all_fields = "camelCase")]
pub enum IrOp {
    Assign {
        dst: String,
        expr: Expr,
        next: NodeId,
    },
    Branch {
        cond: Cond,
        true_to: NodeId,
        false_to: NodeId,
        /// Set when this branch is a loop header; the true edge exits.
        loop_id: Option<usize>,
    },
    Jump {
        next: NodeId,
    },
    /// An external-call occurrence site; the statement body is never
    /// executed directly, see `cobol_runner`.
    Call {
        call_id: usize,
        next: NodeId,
    },
    Emit {
        args: Vec<Expr>,
        next: NodeId,
    },
    Halt,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IrNode {
    pub op: IrOp,
    pub line: u32,
}

/// A conditional edge: one arm of a branch node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeRef {
    pub node: NodeId,
    /// `true` for the branch's true arm.
    pub arm: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Cfg {
    pub nodes: Vec<IrNode>,
    pub entry: NodeId,
    /// Reachable conditional edges, in node order.
    pub branch_edges: Vec<EdgeRef>,
    pub loop_count: usize,
}

impl Cfg {
    pub fn node(&self, id: NodeId) -> &IrNode {
        &self.nodes[id]
    }

    /// Successors of a node in edge order (true arm first for branches).
    pub fn successors(&self, id: NodeId) -> Vec<NodeId> {
        match &self.nodes[id].op {
            IrOp::Assign { next, .. }
            | IrOp::Jump { next }
            | IrOp::Call { next, .. }
            | IrOp::Emit { next, .. } => vec![*next],
            IrOp::Branch {
                true_to, false_to, ..
            } => vec![*true_to, *false_to],
            IrOp::Halt => vec![],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum CallKind {
    Sql,
    Generic,
    File,
    Call,
}

impl CallKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CallKind::Sql => "SQL",
            CallKind::Generic => "GENERIC",
            CallKind::File => "FILE",
            CallKind::Call => "CALL",
        }
    }
}

/// A classified resource statement.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExternalCall {
    pub call_id: usize,
    pub kind: CallKind,
    pub verb: String,
    /// Normalized text: literals replaced by `⟨LIT⟩`, host variables by
    /// positional `⟨Hk⟩` placeholders.
    pub template: String,
    /// Variables the program receives from the resource, in order.
    pub resource_inputs: Vec<String>,
    /// Variables the program sends to the resource, in order.
    pub resource_outputs: Vec<String>,
    pub status_var: Option<String>,
    /// Resource-object tokens (table, file, callee) used for match scoring.
    pub anchors: Vec<String>,
    pub line: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct IrProgram {
    pub program_id: String,
    pub cfgs: BTreeMap<String, Cfg>,
    /// All resource statements in source order; call ids index this list.
    pub external_calls: Vec<ExternalCall>,
    pub var_table: BTreeMap<String, PicType>,
    /// Non-fatal findings, e.g. unreachable conditional edges.
    pub warnings: Vec<String>,
}

impl IrProgram {
    pub fn cfg(&self, paragraph: &str) -> Result<&Cfg, LowerError> {
        self.cfgs
            .get(paragraph)
            .ok_or_else(|| LowerError::UnknownParagraph(paragraph.to_string()))
    }

    pub fn call(&self, call_id: usize) -> &ExternalCall {
        &self.external_calls[call_id]
    }

    pub fn pic(&self, var: &str) -> Option<&PicType> {
        self.var_table.get(var)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LowerError {
    #[error("recursive PERFORM cycle: {}", .0.join(" -> "))]
    RecursivePerform(Vec<String>),
    #[error("unknown paragraph {0}")]
    UnknownParagraph(String),
}

/// Option names whose variable receives data from the resource.
const GENERIC_RECEIVERS: &[&str] = &["INTO", "RESP", "RESP2", "RET", "RETCODE", "STATUS"];

/// Classify a resource statement into an [`ExternalCall`]. Total on its
/// precondition: `stmt` must be one of EXEC SQL, EXEC generic, READ, WRITE
/// or CALL.
pub fn classify_external_call(
    stmt: &StatementKind,
    call_id: usize,
    line: u32,
    ast: &ProgramAst,
) -> ExternalCall {
    let record_leaves = |record: &str| -> Vec<String> {
        match ast.find_item(record) {
            Some(item) => item.leaves().iter().map(|l| l.name.clone()).collect(),
            None => vec![record.to_string()],
        }
    };

    match stmt {
        StatementKind::ExecSql(sql) => {
            let mut inputs: Vec<String> = Vec::new();
            let mut outputs: Vec<String> = Vec::new();
            let mut placeholders: Vec<String> = Vec::new();
            let mut k = 0usize;
            let mut next_ph = || {
                k += 1;
                format!("\u{27e8}H{k}\u{27e9}")
            };
            let mut ph_of: BTreeMap<usize, String> = BTreeMap::new();
            for (idx, (var, is_input)) in sql.host_vars().iter().enumerate() {
                let ph = next_ph();
                ph_of.insert(idx, ph.clone());
                placeholders.push(ph);
                if *is_input {
                    inputs.push((*var).to_string());
                } else {
                    outputs.push((*var).to_string());
                }
            }
            inputs.push(SQLCODE.to_string());

            fn arg_text(a: &SqlArg, hv_idx: &mut usize, ph_of: &BTreeMap<usize, String>) -> String {
                match a {
                    SqlArg::Host(_) => {
                        let t = ph_of[hv_idx].clone();
                        *hv_idx += 1;
                        t
                    }
                    SqlArg::Lit(_) => "\u{27e8}LIT\u{27e9}".to_string(),
                }
            }
            let mut hv_idx = 0usize;

            let mut template = format!("SQL {} {}", sql.verb.as_str(), sql.table);
            match sql.verb {
                crate::frontend::ast::SqlVerb::Select => {
                    hv_idx = sql.into_vars.len();
                    let into: Vec<String> =
                        (0..sql.into_vars.len()).map(|i| ph_of[&i].clone()).collect();
                    template.push_str(&format!(" INTO {}", into.join(",")));
                }
                crate::frontend::ast::SqlVerb::Insert => {
                    let vals: Vec<String> = sql
                        .values
                        .iter()
                        .map(|a| arg_text(a, &mut hv_idx, &ph_of))
                        .collect();
                    template.push_str(&format!(" VALUES {}", vals.join(",")));
                }
                crate::frontend::ast::SqlVerb::Update => {
                    let sets: Vec<String> = sql
                        .set_pairs
                        .iter()
                        .map(|(c, a)| format!("{c}={}", arg_text(a, &mut hv_idx, &ph_of)))
                        .collect();
                    template.push_str(&format!(" SET {}", sets.join(",")));
                }
                crate::frontend::ast::SqlVerb::Delete => {}
            }
            if !sql.where_triples.is_empty() {
                let parts: Vec<String> = sql
                    .where_triples
                    .iter()
                    .map(|(c, op, a)| {
                        format!("{c}{}{}", op.symbol(), arg_text(a, &mut hv_idx, &ph_of))
                    })
                    .collect();
                template.push_str(&format!(" WHERE {}", parts.join(" AND ")));
            }

            ExternalCall {
                call_id,
                kind: CallKind::Sql,
                verb: sql.verb.as_str().to_string(),
                template,
                resource_inputs: inputs,
                resource_outputs: outputs,
                status_var: Some(SQLCODE.to_string()),
                anchors: vec![sql.table.clone()],
                line,
            }
        }
        StatementKind::ExecGeneric {
            system,
            verb,
            options,
        } => {
            let mut inputs = Vec::new();
            let mut outputs = Vec::new();
            let mut parts = Vec::new();
            let mut k = 0usize;
            let mut anchors = Vec::new();
            for opt in options {
                match &opt.value {
                    GenericArg::Var(v) => {
                        let leaves = record_leaves(v);
                        let receiver = GENERIC_RECEIVERS.contains(&opt.name.as_str());
                        let mut phs = Vec::new();
                        for leaf in leaves {
                            k += 1;
                            phs.push(format!("\u{27e8}H{k}\u{27e9}"));
                            if receiver {
                                inputs.push(leaf);
                            } else {
                                outputs.push(leaf);
                            }
                        }
                        parts.push(format!("{}={}", opt.name, phs.join(",")));
                    }
                    GenericArg::Lit(l) => {
                        if anchors.is_empty() {
                            anchors.push(l.clone());
                        }
                        parts.push(format!("{}=\u{27e8}LIT\u{27e9}", opt.name));
                    }
                }
            }
            let template = format!("GENERIC {system} {verb} {}", parts.join(" "))
                .trim_end()
                .to_string();
            ExternalCall {
                call_id,
                kind: CallKind::Generic,
                verb: format!("{system} {verb}"),
                template,
                resource_inputs: inputs,
                resource_outputs: outputs,
                status_var: None,
                anchors,
                line,
            }
        }
        StatementKind::Read { file, record } => {
            let fields = record_leaves(record);
            let phs: Vec<String> = (1..=fields.len())
                .map(|k| format!("\u{27e8}H{k}\u{27e9}"))
                .collect();
            ExternalCall {
                call_id,
                kind: CallKind::File,
                verb: "READ".to_string(),
                template: format!("FILE READ {file} INTO {}", phs.join(",")),
                resource_inputs: fields,
                resource_outputs: Vec::new(),
                status_var: None,
                anchors: vec![file.clone()],
                line,
            }
        }
        StatementKind::Write { record } => {
            let fields = record_leaves(record);
            let phs: Vec<String> = (1..=fields.len())
                .map(|k| format!("\u{27e8}H{k}\u{27e9}"))
                .collect();
            ExternalCall {
                call_id,
                kind: CallKind::File,
                verb: "WRITE".to_string(),
                template: format!("FILE WRITE {record} {}", phs.join(",")),
                resource_inputs: Vec::new(),
                resource_outputs: fields,
                status_var: None,
                anchors: vec![record.clone()],
                line,
            }
        }
        StatementKind::Call { name, using } => {
            let mut fields = Vec::new();
            for v in using {
                fields.extend(record_leaves(v));
            }
            let phs: Vec<String> = (1..=fields.len())
                .map(|k| format!("\u{27e8}H{k}\u{27e9}"))
                .collect();
            // USING items travel both ways: sent to the callee and
            // possibly updated by it.
            ExternalCall {
                call_id,
                kind: CallKind::Call,
                verb: name.clone(),
                template: format!("CALL {name} USING {}", phs.join(",")),
                resource_inputs: fields.clone(),
                resource_outputs: fields,
                status_var: None,
                anchors: vec![name.clone()],
                line,
            }
        }
        other => panic!("classify_external_call on non-resource statement {other:?}"),
    }
}

pub fn is_resource_statement(kind: &StatementKind) -> bool {
    matches!(
        kind,
        StatementKind::ExecSql(_)
            | StatementKind::ExecGeneric { .. }
            | StatementKind::Read { .. }
            | StatementKind::Write { .. }
            | StatementKind::Call { .. }
    )
}
