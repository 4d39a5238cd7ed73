//! AST-to-IR lowering.

use super::*;
use crate::frontend::ast::*;
use std::collections::HashMap;

struct LowerCtx<'a> {
    ast: &'a ProgramAst,
    nodes: Vec<IrNode>,
    /// Source-order call id per resource statement (pointer identity; the
    /// same statement inlined twice keeps one id).
    call_ids: HashMap<*const Statement, usize>,
    loop_count: usize,
    perform_stack: Vec<String>,
}

pub fn lower(ast: &ProgramAst) -> Result<IrProgram, LowerError> {
    // Number resource statements in source order, shared by every CFG.
    let mut call_ids = HashMap::new();
    let mut calls = Vec::new();
    for p in &ast.paragraphs {
        collect_calls(ast, &p.statements, &mut call_ids, &mut calls);
    }

    let mut var_table: BTreeMap<String, PicType> = BTreeMap::new();
    for leaf in ast.leaf_items() {
        var_table.insert(leaf.name.clone(), leaf.pic.clone().unwrap());
    }
    if calls.iter().any(|c: &ExternalCall| c.kind == CallKind::Sql) {
        var_table.insert(SQLCODE.to_string(), sqlcode_pic());
    }

    let mut cfgs = BTreeMap::new();
    let mut warnings = Vec::new();
    for p in &ast.paragraphs {
        let mut ctx = LowerCtx {
            ast,
            nodes: Vec::new(),
            call_ids: call_ids.clone(),
            loop_count: 0,
            perform_stack: vec![p.name.clone()],
        };
        let halt = ctx.push(IrOp::Halt, p.line);
        let entry = ctx.lower_stmts(&p.statements, halt)?;
        let cfg = finish_cfg(ctx.nodes, entry, ctx.loop_count, &p.name, &mut warnings);
        cfgs.insert(p.name.clone(), cfg);
    }

    Ok(IrProgram {
        program_id: ast.program_id.clone(),
        cfgs,
        external_calls: calls,
        var_table,
        warnings,
    })
}

fn collect_calls(
    ast: &ProgramAst,
    stmts: &[Statement],
    ids: &mut HashMap<*const Statement, usize>,
    calls: &mut Vec<ExternalCall>,
) {
    for s in stmts {
        if is_resource_statement(&s.kind) {
            let id = calls.len();
            ids.insert(s as *const Statement, id);
            calls.push(classify_external_call(&s.kind, id, s.line, ast));
        }
        match &s.kind {
            StatementKind::If {
                then_branch,
                else_branch,
                ..
            } => {
                collect_calls(ast, then_branch, ids, calls);
                collect_calls(ast, else_branch, ids, calls);
            }
            StatementKind::Evaluate { whens, other, .. } => {
                for w in whens {
                    collect_calls(ast, &w.body, ids, calls);
                }
                collect_calls(ast, other, ids, calls);
            }
            StatementKind::PerformUntil { body, .. }
            | StatementKind::PerformVarying { body, .. } => {
                collect_calls(ast, body, ids, calls);
            }
            _ => {}
        }
    }
}

impl<'a> LowerCtx<'a> {
    fn push(&mut self, op: IrOp, line: u32) -> NodeId {
        self.nodes.push(IrNode { op, line });
        self.nodes.len() - 1
    }

    /// Lower a statement list so that execution falls through to `follow`.
    /// Built back to front so forward targets are already known.
    fn lower_stmts(&mut self, stmts: &[Statement], follow: NodeId) -> Result<NodeId, LowerError> {
        let mut next = follow;
        for s in stmts.iter().rev() {
            next = self.lower_stmt(s, next)?;
        }
        Ok(next)
    }

    fn lower_stmt(&mut self, s: &Statement, follow: NodeId) -> Result<NodeId, LowerError> {
        let line = s.line;
        match &s.kind {
            StatementKind::Move { src, dsts } => {
                let mut next = follow;
                for dst in dsts.iter().rev() {
                    next = self.push(
                        IrOp::Assign {
                            dst: dst.clone(),
                            expr: src.clone(),
                            next,
                        },
                        line,
                    );
                }
                Ok(next)
            }
            StatementKind::Compute { dst, expr } => Ok(self.push(
                IrOp::Assign {
                    dst: dst.clone(),
                    expr: expr.clone(),
                    next: follow,
                },
                line,
            )),
            StatementKind::Arith {
                op,
                operand,
                target,
                giving,
            } => {
                let target_var = Expr::Var(target.clone());
                let expr = match op {
                    ArithVerb::Add => {
                        Expr::Add(Box::new(target_var), Box::new(operand.clone()))
                    }
                    ArithVerb::Subtract => {
                        Expr::Sub(Box::new(target_var), Box::new(operand.clone()))
                    }
                    ArithVerb::Multiply => {
                        Expr::Mul(Box::new(target_var), Box::new(operand.clone()))
                    }
                    ArithVerb::Divide => {
                        Expr::Div(Box::new(target_var), Box::new(operand.clone()))
                    }
                };
                let dst = giving.clone().unwrap_or_else(|| target.clone());
                Ok(self.push(
                    IrOp::Assign {
                        dst,
                        expr,
                        next: follow,
                    },
                    line,
                ))
            }
            StatementKind::If {
                cond,
                then_branch,
                else_branch,
            } => {
                let true_to = self.lower_stmts(then_branch, follow)?;
                let false_to = self.lower_stmts(else_branch, follow)?;
                Ok(self.push(
                    IrOp::Branch {
                        cond: cond.clone(),
                        true_to,
                        false_to,
                        loop_id: None,
                    },
                    line,
                ))
            }
            StatementKind::Evaluate {
                subject,
                whens,
                other,
            } => {
                let mut next = self.lower_stmts(other, follow)?;
                for arm in whens.iter().rev() {
                    let body = self.lower_stmts(&arm.body, follow)?;
                    let cond = match (&arm.test, subject) {
                        (WhenTest::Cond(c), _) => c.clone(),
                        (WhenTest::Value(v), EvaluateSubject::Var(subj)) => Cond::Cmp {
                            op: CmpOp::Eq,
                            lhs: Expr::Var(subj.clone()),
                            rhs: v.clone(),
                        },
                        (WhenTest::Value(_), EvaluateSubject::True) => unreachable!(),
                    };
                    next = self.push(
                        IrOp::Branch {
                            cond,
                            true_to: body,
                            false_to: next,
                            loop_id: None,
                        },
                        line,
                    );
                }
                Ok(next)
            }
            StatementKind::PerformParagraph { name } => {
                if self.perform_stack.contains(name) {
                    let mut cycle = self.perform_stack.clone();
                    cycle.push(name.clone());
                    return Err(LowerError::RecursivePerform(cycle));
                }
                let target = self
                    .ast
                    .paragraph(name)
                    .ok_or_else(|| LowerError::UnknownParagraph(name.clone()))?;
                self.perform_stack.push(name.clone());
                let entry = self.lower_stmts(&target.statements, follow)?;
                self.perform_stack.pop();
                Ok(entry)
            }
            StatementKind::PerformUntil {
                cond,
                body,
                test_before,
            } => {
                let loop_id = self.loop_count;
                self.loop_count += 1;
                let header = self.push(
                    IrOp::Branch {
                        cond: cond.clone(),
                        true_to: follow,
                        false_to: usize::MAX, // patched below
                        loop_id: Some(loop_id),
                    },
                    line,
                );
                let body_entry = self.lower_stmts(body, header)?;
                if let IrOp::Branch { false_to, .. } = &mut self.nodes[header].op {
                    *false_to = body_entry;
                }
                if *test_before {
                    Ok(header)
                } else {
                    Ok(body_entry)
                }
            }
            StatementKind::PerformVarying {
                var,
                from,
                by,
                until,
                body,
            } => {
                let loop_id = self.loop_count;
                self.loop_count += 1;
                let header = self.push(
                    IrOp::Branch {
                        cond: until.clone(),
                        true_to: follow,
                        false_to: usize::MAX, // patched below
                        loop_id: Some(loop_id),
                    },
                    line,
                );
                // increment runs after the body, then re-tests
                let incr = self.push(
                    IrOp::Assign {
                        dst: var.clone(),
                        expr: Expr::Add(
                            Box::new(Expr::Var(var.clone())),
                            Box::new(by.clone()),
                        ),
                        next: header,
                    },
                    line,
                );
                let body_entry = self.lower_stmts(body, incr)?;
                if let IrOp::Branch { false_to, .. } = &mut self.nodes[header].op {
                    *false_to = body_entry;
                }
                let init = self.push(
                    IrOp::Assign {
                        dst: var.clone(),
                        expr: from.clone(),
                        next: header,
                    },
                    line,
                );
                Ok(init)
            }
            StatementKind::ExecSql(_)
            | StatementKind::ExecGeneric { .. }
            | StatementKind::Call { .. }
            | StatementKind::Read { .. }
            | StatementKind::Write { .. } => {
                let call_id = self.call_ids[&(s as *const Statement)];
                Ok(self.push(
                    IrOp::Call {
                        call_id,
                        next: follow,
                    },
                    line,
                ))
            }
            StatementKind::Display { args } => Ok(self.push(
                IrOp::Emit {
                    args: args.clone(),
                    next: follow,
                },
                line,
            )),
            StatementKind::Continue => Ok(follow),
            StatementKind::StopRun => {
                // node 0 is the paragraph's single Halt
                Ok(self.push(IrOp::Jump { next: 0 }, line))
            }
        }
    }
}

fn finish_cfg(
    nodes: Vec<IrNode>,
    entry: NodeId,
    loop_count: usize,
    paragraph: &str,
    warnings: &mut Vec<String>,
) -> Cfg {
    // reachability sweep; unreachable conditional edges are reported
    let mut reachable = vec![false; nodes.len()];
    let mut stack = vec![entry];
    while let Some(n) = stack.pop() {
        if reachable[n] {
            continue;
        }
        reachable[n] = true;
        match &nodes[n].op {
            IrOp::Assign { next, .. }
            | IrOp::Jump { next }
            | IrOp::Call { next, .. }
            | IrOp::Emit { next, .. } => stack.push(*next),
            IrOp::Branch {
                true_to, false_to, ..
            } => {
                stack.push(*true_to);
                stack.push(*false_to);
            }
            IrOp::Halt => {}
        }
    }
    let mut branch_edges = Vec::new();
    for (id, node) in nodes.iter().enumerate() {
        if let IrOp::Branch { .. } = node.op {
            if reachable[id] {
                branch_edges.push(EdgeRef {
                    node: id,
                    arm: true,
                });
                branch_edges.push(EdgeRef {
                    node: id,
                    arm: false,
                });
            } else {
                warnings.push(format!(
                    "{paragraph}: conditional at line {} is unreachable",
                    node.line
                ));
            }
        }
    }
    Cfg {
        nodes,
        entry,
        branch_edges,
        loop_count,
    }
}
