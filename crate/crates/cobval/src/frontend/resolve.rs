//! Name resolution and category checking over the parsed AST.

use super::ast::*;
use super::diag::Diagnostic;
use crate::value::PicType;
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Cat {
    Num,
    Str,
}

pub struct Resolver<'a> {
    ast: &'a ProgramAst,
    leaves: BTreeMap<String, PicType>,
    groups: BTreeMap<String, ()>,
    diags: Vec<Diagnostic>,
}

/// Check every identifier reference, paragraph target, and operand category.
/// Returns the accumulated diagnostics (empty means the program is resolved).
pub fn resolve(ast: &ProgramAst) -> Vec<Diagnostic> {
    let mut r = Resolver {
        ast,
        leaves: BTreeMap::new(),
        groups: BTreeMap::new(),
        diags: Vec::new(),
    };
    r.collect_items();
    // any embedded SQL implicitly declares SQLCODE
    fn has_sql(stmts: &[Statement]) -> bool {
        stmts.iter().any(|s| match &s.kind {
            StatementKind::ExecSql(_) => true,
            StatementKind::If {
                then_branch,
                else_branch,
                ..
            } => has_sql(then_branch) || has_sql(else_branch),
            StatementKind::Evaluate { whens, other, .. } => {
                whens.iter().any(|w| has_sql(&w.body)) || has_sql(other)
            }
            StatementKind::PerformUntil { body, .. }
            | StatementKind::PerformVarying { body, .. } => has_sql(body),
            _ => false,
        })
    }
    if ast.paragraphs.iter().any(|p| has_sql(&p.statements)) {
        r.leaves
            .insert(crate::ir::SQLCODE.to_string(), crate::ir::sqlcode_pic());
    }
    r.check_paragraphs();
    for p in &ast.paragraphs {
        r.check_statements(&p.statements);
    }
    r.diags
}

impl<'a> Resolver<'a> {
    fn collect_items(&mut self) {
        fn walk(
            items: &[DataItem],
            parent_level: u8,
            leaves: &mut BTreeMap<String, PicType>,
            groups: &mut BTreeMap<String, ()>,
            diags: &mut Vec<Diagnostic>,
        ) {
            for item in items {
                if parent_level > 0 && item.level <= parent_level {
                    diags.push(Diagnostic::syntax(
                        item.line,
                        1,
                        "child level greater than parent",
                        &format!("{:02} {}", item.level, item.name),
                    ));
                }
                let duplicate =
                    leaves.contains_key(&item.name) || groups.contains_key(&item.name);
                if duplicate {
                    diags.push(Diagnostic::syntax(
                        item.line,
                        1,
                        "unique data name",
                        &item.name,
                    ));
                }
                match &item.pic {
                    Some(pic) => {
                        leaves.insert(item.name.clone(), pic.clone());
                    }
                    None => {
                        groups.insert(item.name.clone(), ());
                    }
                }
                walk(&item.children, item.level, leaves, groups, diags);
            }
        }
        walk(
            &self.ast.working_storage,
            0,
            &mut self.leaves,
            &mut self.groups,
            &mut self.diags,
        );
    }

    fn check_paragraphs(&mut self) {
        let mut seen = BTreeMap::new();
        for p in &self.ast.paragraphs {
            if seen.insert(p.name.clone(), ()).is_some() {
                self.diags.push(Diagnostic::syntax(
                    p.line,
                    1,
                    "unique paragraph name",
                    &p.name,
                ));
            }
        }
    }

    fn leaf_cat(&self, name: &str) -> Option<Cat> {
        self.leaves.get(name).map(|p| match p {
            PicType::Numeric { .. } => Cat::Num,
            PicType::Alphanumeric { .. } => Cat::Str,
        })
    }

    fn require_leaf(&mut self, name: &str, line: u32) -> Option<Cat> {
        match self.leaf_cat(name) {
            Some(c) => Some(c),
            None => {
                self.diags.push(Diagnostic::UnknownIdentifier {
                    name: name.to_string(),
                    line,
                });
                None
            }
        }
    }

    fn require_item(&mut self, name: &str, line: u32) {
        if !self.leaves.contains_key(name) && !self.groups.contains_key(name) {
            self.diags.push(Diagnostic::UnknownIdentifier {
                name: name.to_string(),
                line,
            });
        }
    }

    fn expr_cat(&mut self, e: &Expr, line: u32) -> Option<Cat> {
        match e {
            Expr::Var(v) => self.require_leaf(v, line),
            Expr::NumLit { .. } => Some(Cat::Num),
            Expr::StrLit(_) => Some(Cat::Str),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                let ca = self.expr_cat(a, line);
                let cb = self.expr_cat(b, line);
                if ca == Some(Cat::Str) || cb == Some(Cat::Str) {
                    self.diags.push(Diagnostic::syntax(
                        line,
                        1,
                        "numeric operand",
                        "alphanumeric value in arithmetic",
                    ));
                }
                Some(Cat::Num)
            }
            Expr::Neg(a) => {
                self.expr_cat(a, line);
                Some(Cat::Num)
            }
        }
    }

    fn check_cond(&mut self, cond: &Cond, line: u32) {
        match cond {
            Cond::Cmp { lhs, rhs, .. } => {
                let cl = self.expr_cat(lhs, line);
                let cr = self.expr_cat(rhs, line);
                if let (Some(a), Some(b)) = (cl, cr) {
                    if a != b {
                        self.diags.push(Diagnostic::syntax(
                            line,
                            1,
                            "operands of one category",
                            "numeric compared with alphanumeric",
                        ));
                    }
                }
            }
            Cond::And(a, b) | Cond::Or(a, b) => {
                self.check_cond(a, line);
                self.check_cond(b, line);
            }
            Cond::Not(a) => self.check_cond(a, line),
        }
    }

    fn check_statements(&mut self, stmts: &[Statement]) {
        for s in stmts {
            self.check_statement(s);
        }
    }

    fn check_statement(&mut self, s: &Statement) {
        let line = s.line;
        match &s.kind {
            StatementKind::Move { src, dsts } => {
                let src_cat = self.expr_cat(src, line);
                for d in dsts {
                    if let (Some(sc), Some(dc)) = (src_cat, self.require_leaf(d, line)) {
                        if sc != dc {
                            self.diags.push(Diagnostic::UnsupportedConstruct {
                                keyword: format!("MOVE across categories into {d}"),
                                line,
                            });
                        }
                    }
                }
            }
            StatementKind::Compute { dst, expr } => {
                if self.require_leaf(dst, line) == Some(Cat::Str) {
                    self.diags.push(Diagnostic::syntax(
                        line,
                        1,
                        "numeric COMPUTE target",
                        dst,
                    ));
                }
                self.expr_cat(expr, line);
            }
            StatementKind::Arith {
                operand,
                target,
                giving,
                ..
            } => {
                self.expr_cat(operand, line);
                if self.require_leaf(target, line) == Some(Cat::Str) {
                    self.diags
                        .push(Diagnostic::syntax(line, 1, "numeric operand", target));
                }
                if let Some(g) = giving {
                    if self.require_leaf(g, line) == Some(Cat::Str) {
                        self.diags
                            .push(Diagnostic::syntax(line, 1, "numeric GIVING target", g));
                    }
                }
            }
            StatementKind::If {
                cond,
                then_branch,
                else_branch,
            } => {
                self.check_cond(cond, line);
                self.check_statements(then_branch);
                self.check_statements(else_branch);
            }
            StatementKind::Evaluate {
                subject,
                whens,
                other,
            } => {
                let subj_cat = match subject {
                    EvaluateSubject::Var(v) => self.require_leaf(v, line),
                    EvaluateSubject::True => None,
                };
                for arm in whens {
                    match &arm.test {
                        WhenTest::Value(e) => {
                            let c = self.expr_cat(e, line);
                            if let (Some(a), Some(b)) = (subj_cat, c) {
                                if a != b {
                                    self.diags.push(Diagnostic::syntax(
                                        line,
                                        1,
                                        "WHEN value of subject's category",
                                        "mismatched literal",
                                    ));
                                }
                            }
                        }
                        WhenTest::Cond(c) => self.check_cond(c, line),
                    }
                    self.check_statements(&arm.body);
                }
                self.check_statements(other);
            }
            StatementKind::PerformParagraph { name } => {
                if self.ast.paragraph(name).is_none() {
                    self.diags.push(Diagnostic::UnknownIdentifier {
                        name: name.clone(),
                        line,
                    });
                }
            }
            StatementKind::PerformUntil { cond, body, .. } => {
                self.check_cond(cond, line);
                self.check_statements(body);
            }
            StatementKind::PerformVarying {
                var,
                from,
                by,
                until,
                body,
            } => {
                if self.require_leaf(var, line) == Some(Cat::Str) {
                    self.diags
                        .push(Diagnostic::syntax(line, 1, "numeric VARYING control", var));
                }
                self.expr_cat(from, line);
                self.expr_cat(by, line);
                self.check_cond(until, line);
                self.check_statements(body);
            }
            StatementKind::ExecSql(sql) => {
                for (v, _) in sql.host_vars() {
                    self.require_leaf(v, line);
                }
            }
            StatementKind::ExecGeneric { options, .. } => {
                for opt in options {
                    if let GenericArg::Var(v) = &opt.value {
                        self.require_item(v, line);
                    }
                }
            }
            StatementKind::Call { using, .. } => {
                for v in using {
                    self.require_item(v, line);
                }
            }
            StatementKind::Read { record, .. } | StatementKind::Write { record } => {
                self.require_item(record, line);
            }
            StatementKind::Display { args } => {
                for a in args {
                    self.expr_cat(a, line);
                }
            }
            StatementKind::Continue | StatementKind::StopRun => {}
        }
    }
}
