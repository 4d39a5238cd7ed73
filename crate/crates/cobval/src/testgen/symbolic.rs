//! Per-path SSA renaming and symbolic path conditions.
//!
//! A path trace is linear, so SSA needs no φ-nodes: each assignment bumps
//! the destination's version, and every read references the latest prior
//! version. External calls assign fresh version-0 resource symbols, one per
//! occurrence, into the resource-input variables. The path condition
//! substitutes every intermediate version down to version-0 symbols,
//! producing linear atoms over scaled integers and base-95 string codes.

use crate::frontend::ast::{CmpOp, Cond, Expr};
use crate::ir::eval::num_div;
use crate::ir::{IrOp, IrProgram};
use crate::solver::{Atom, AtomOp, Clause, ConstraintSet, Domain, Sym};
use crate::value::{self, PicType, Value};
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

use super::PathTrace;

/// A versioned variable occurrence.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct VRef {
    pub var: String,
    pub version: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum SsaExpr {
    Ref(VRef),
    /// A fresh symbolic input (program input or per-occurrence resource
    /// input), always version 0.
    Input(Sym),
    Num { raw: i128, scale: u32 },
    Str(String),
    Add(Box<SsaExpr>, Box<SsaExpr>),
    Sub(Box<SsaExpr>, Box<SsaExpr>),
    Mul(Box<SsaExpr>, Box<SsaExpr>),
    Div(Box<SsaExpr>, Box<SsaExpr>),
    Neg(Box<SsaExpr>),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum SsaCond {
    Cmp {
        op: CmpOp,
        lhs: SsaExpr,
        rhs: SsaExpr,
    },
    And(Box<SsaCond>, Box<SsaCond>),
    Or(Box<SsaCond>, Box<SsaCond>),
    Not(Box<SsaCond>),
}

#[derive(Clone, Debug, Serialize)]
pub enum SsaOp {
    Assign {
        dst: VRef,
        expr: SsaExpr,
    },
    /// A branch the path took (`taken` is the arm).
    Branch {
        cond: SsaCond,
        taken: bool,
    },
    /// Values the program handed to the resource at a call, by version.
    ResourceOut {
        call_id: usize,
        occurrence: usize,
        vars: Vec<VRef>,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct SsaTrace {
    pub ops: Vec<SsaOp>,
    /// Final version of every variable touched on the path.
    pub version_table: BTreeMap<String, u32>,
}

/// Rename every variable occurrence along `trace` to (name, version).
pub fn ssa_rename(ir: &IrProgram, paragraph: &str, trace: &PathTrace) -> SsaTrace {
    let cfg = ir.cfg(paragraph).expect("trace paragraph exists");
    let mut versions: BTreeMap<String, u32> = BTreeMap::new();
    let mut occurrences: BTreeMap<usize, usize> = BTreeMap::new();
    let mut ops = Vec::new();
    let mut decision_idx = 0usize;

    let read = |versions: &BTreeMap<String, u32>, var: &str| VRef {
        var: var.to_string(),
        version: *versions.get(var).unwrap_or(&0),
    };

    fn rename_expr(e: &Expr, versions: &BTreeMap<String, u32>) -> SsaExpr {
        match e {
            Expr::Var(v) => SsaExpr::Ref(VRef {
                var: v.clone(),
                version: *versions.get(v).unwrap_or(&0),
            }),
            Expr::NumLit { raw, scale } => SsaExpr::Num {
                raw: *raw,
                scale: *scale,
            },
            Expr::StrLit(s) => SsaExpr::Str(s.clone()),
            Expr::Add(a, b) => SsaExpr::Add(
                Box::new(rename_expr(a, versions)),
                Box::new(rename_expr(b, versions)),
            ),
            Expr::Sub(a, b) => SsaExpr::Sub(
                Box::new(rename_expr(a, versions)),
                Box::new(rename_expr(b, versions)),
            ),
            Expr::Mul(a, b) => SsaExpr::Mul(
                Box::new(rename_expr(a, versions)),
                Box::new(rename_expr(b, versions)),
            ),
            Expr::Div(a, b) => SsaExpr::Div(
                Box::new(rename_expr(a, versions)),
                Box::new(rename_expr(b, versions)),
            ),
            Expr::Neg(a) => SsaExpr::Neg(Box::new(rename_expr(a, versions))),
        }
    }

    fn rename_cond(c: &Cond, versions: &BTreeMap<String, u32>) -> SsaCond {
        match c {
            Cond::Cmp { op, lhs, rhs } => SsaCond::Cmp {
                op: *op,
                lhs: rename_expr(lhs, versions),
                rhs: rename_expr(rhs, versions),
            },
            Cond::And(a, b) => SsaCond::And(
                Box::new(rename_cond(a, versions)),
                Box::new(rename_cond(b, versions)),
            ),
            Cond::Or(a, b) => SsaCond::Or(
                Box::new(rename_cond(a, versions)),
                Box::new(rename_cond(b, versions)),
            ),
            Cond::Not(a) => SsaCond::Not(Box::new(rename_cond(a, versions))),
        }
    }

    for &node_id in &trace.node_ids {
        match &cfg.nodes[node_id].op {
            IrOp::Assign { dst, expr, .. } => {
                let expr = rename_expr(expr, &versions);
                let v = versions.entry(dst.clone()).or_insert(0);
                *v += 1;
                ops.push(SsaOp::Assign {
                    dst: VRef {
                        var: dst.clone(),
                        version: *v,
                    },
                    expr,
                });
            }
            IrOp::Branch { cond, .. } => {
                let taken = trace.branch_decisions[decision_idx].arm;
                decision_idx += 1;
                ops.push(SsaOp::Branch {
                    cond: rename_cond(cond, &versions),
                    taken,
                });
            }
            IrOp::Call { call_id, .. } => {
                let occ = occurrences.entry(*call_id).or_insert(0);
                *occ += 1;
                let occurrence = *occ;
                let call = ir.call(*call_id);
                let outs = call
                    .resource_outputs
                    .iter()
                    .map(|v| read(&versions, v))
                    .collect();
                ops.push(SsaOp::ResourceOut {
                    call_id: *call_id,
                    occurrence,
                    vars: outs,
                });
                for var in &call.resource_inputs {
                    let v = versions.entry(var.clone()).or_insert(0);
                    *v += 1;
                    ops.push(SsaOp::Assign {
                        dst: VRef {
                            var: var.clone(),
                            version: *v,
                        },
                        expr: SsaExpr::Input(Sym::res(*call_id, occurrence, var)),
                    });
                }
            }
            IrOp::Emit { .. } | IrOp::Jump { .. } | IrOp::Halt => {}
        }
    }

    SsaTrace {
        ops,
        version_table: versions,
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SymbolicError {
    #[error("nonlinear constraint: {0}")]
    NonLinearUnsupported(String),
    #[error("unsupported symbolic operation: {0}")]
    Unsupported(String),
}

/// A linear combination of version-0 symbols.
#[derive(Clone, Debug, PartialEq)]
pub struct LinExpr {
    pub terms: BTreeMap<Sym, i128>,
    pub constant: i128,
}

impl LinExpr {
    fn constant(c: i128) -> LinExpr {
        LinExpr {
            terms: BTreeMap::new(),
            constant: c,
        }
    }

    fn symbol(s: Sym) -> LinExpr {
        let mut terms = BTreeMap::new();
        terms.insert(s, 1);
        LinExpr { terms, constant: 0 }
    }

    fn as_const(&self) -> Option<i128> {
        if self.terms.is_empty() {
            Some(self.constant)
        } else {
            None
        }
    }

    fn add(&self, other: &LinExpr, negate: bool) -> Result<LinExpr, SymbolicError> {
        let overflow = || SymbolicError::Unsupported("coefficient overflow".into());
        let mut terms = self.terms.clone();
        for (s, c) in &other.terms {
            let c = if negate { -c } else { *c };
            let entry = terms.entry(s.clone()).or_insert(0);
            *entry = entry.checked_add(c).ok_or_else(overflow)?;
        }
        terms.retain(|_, c| *c != 0);
        let oc = if negate {
            -other.constant
        } else {
            other.constant
        };
        Ok(LinExpr {
            terms,
            constant: self.constant.checked_add(oc).ok_or_else(overflow)?,
        })
    }

    fn scale_by(&self, factor: i128) -> Result<LinExpr, SymbolicError> {
        let overflow = || SymbolicError::Unsupported("coefficient overflow".into());
        let mut terms = BTreeMap::new();
        for (s, c) in &self.terms {
            terms.insert(s.clone(), c.checked_mul(factor).ok_or_else(overflow)?);
        }
        Ok(LinExpr {
            terms,
            constant: self.constant.checked_mul(factor).ok_or_else(overflow)?,
        })
    }
}

/// A typed symbolic value: a linear expression plus its interpretation.
/// Constant strings stay as text so lengths beyond the solver's encodable
/// range work fine until (unless) they meet a symbolic comparison.
#[derive(Clone, Debug)]
pub enum SymValue {
    Num { lin: LinExpr, scale: u32 },
    Str { lin: LinExpr, len: u32 },
    StrConst(String),
}

#[derive(Debug)]
pub struct PathCondition {
    pub constraints: ConstraintSet,
    /// Bindings of the final version of every variable, for inspection.
    pub bindings: BTreeMap<VRef, SymValue>,
}

struct CondBuilder<'a> {
    ir: &'a IrProgram,
    inputs: &'a [String],
    bindings: BTreeMap<VRef, SymValue>,
    cs: ConstraintSet,
}

/// Build the path condition of an SSA trace: the conjunction of every taken
/// branch condition (negated on false arms) plus store-back range guards,
/// fully reduced to version-0 program and resource input symbols.
pub fn path_condition(
    ir: &IrProgram,
    inputs: &[String],
    ssa: &SsaTrace,
) -> Result<PathCondition, SymbolicError> {
    let mut b = CondBuilder {
        ir,
        inputs,
        bindings: BTreeMap::new(),
        cs: ConstraintSet::default(),
    };
    for op in &ssa.ops {
        match op {
            SsaOp::Assign { dst, expr } => {
                let v = b.eval(expr)?;
                let pic = b
                    .ir
                    .pic(&dst.var)
                    .ok_or_else(|| SymbolicError::Unsupported(format!("no picture for {}", dst.var)))?
                    .clone();
                let stored = b.store(v, &pic)?;
                b.bindings.insert(dst.clone(), stored);
            }
            SsaOp::Branch { cond, taken } => {
                let clauses = b.cond_clauses(cond, *taken)?;
                b.cs.clauses.extend(clauses);
            }
            SsaOp::ResourceOut { .. } => {}
        }
    }
    Ok(PathCondition {
        constraints: b.cs,
        bindings: b.bindings,
    })
}

impl<'a> CondBuilder<'a> {
    fn sym_domain(&mut self, sym: &Sym) -> Result<(), SymbolicError> {
        if self.cs.domains.contains_key(sym) {
            return Ok(());
        }
        let pic = self
            .ir
            .pic(sym.var_name())
            .ok_or_else(|| {
                SymbolicError::Unsupported(format!("no picture for symbol {sym}"))
            })?
            .clone();
        let domain = Domain::of_pic(&pic)
            .map_err(|e| SymbolicError::Unsupported(e.to_string()))?;
        self.cs.domains.insert(sym.clone(), domain);
        Ok(())
    }

    fn input_value(&mut self, sym: Sym, pic: &PicType) -> Result<SymValue, SymbolicError> {
        self.sym_domain(&sym)?;
        Ok(match pic {
            PicType::Numeric { frac_digits, .. } => SymValue::Num {
                lin: LinExpr::symbol(sym),
                scale: *frac_digits,
            },
            PicType::Alphanumeric { length } => SymValue::Str {
                lin: LinExpr::symbol(sym),
                len: *length,
            },
        })
    }

    fn resolve(&mut self, r: &VRef) -> Result<SymValue, SymbolicError> {
        if let Some(v) = self.bindings.get(r) {
            return Ok(v.clone());
        }
        let pic = self
            .ir
            .pic(&r.var)
            .ok_or_else(|| SymbolicError::Unsupported(format!("no picture for {}", r.var)))?
            .clone();
        if r.version == 0 {
            if self.inputs.contains(&r.var) {
                return self.input_value(Sym::prog(&r.var), &pic);
            }
            // non-input variables start at zero/spaces
            return Ok(match pic.default_value() {
                Value::Num(n) => SymValue::Num {
                    lin: LinExpr::constant(n),
                    scale: pic.scale(),
                },
                Value::Str(s) => SymValue::StrConst(s),
            });
        }
        Err(SymbolicError::Unsupported(format!(
            "unbound version {}@{}",
            r.var, r.version
        )))
    }

    fn eval(&mut self, e: &SsaExpr) -> Result<SymValue, SymbolicError> {
        let nonlinear = |what: &str| SymbolicError::NonLinearUnsupported(what.to_string());
        match e {
            SsaExpr::Ref(r) => self.resolve(r),
            SsaExpr::Input(sym) => {
                let pic = self
                    .ir
                    .pic(sym.var_name())
                    .ok_or_else(|| {
                        SymbolicError::Unsupported(format!("no picture for {sym}"))
                    })?
                    .clone();
                self.input_value(sym.clone(), &pic)
            }
            SsaExpr::Num { raw, scale } => Ok(SymValue::Num {
                lin: LinExpr::constant(*raw),
                scale: *scale,
            }),
            SsaExpr::Str(s) => Ok(SymValue::StrConst(s.clone())),
            SsaExpr::Neg(inner) => {
                let v = self.eval(inner)?;
                match v {
                    SymValue::Num { lin, scale } => Ok(SymValue::Num {
                        lin: lin.scale_by(-1)?,
                        scale,
                    }),
                    _ => Err(SymbolicError::Unsupported("negated string".into())),
                }
            }
            SsaExpr::Add(a, b) | SsaExpr::Sub(a, b) => {
                let (SymValue::Num { lin: la, scale: sa }, SymValue::Num { lin: lb, scale: sb }) =
                    (self.eval(a)?, self.eval(b)?)
                else {
                    return Err(SymbolicError::Unsupported("string arithmetic".into()));
                };
                let scale = sa.max(sb);
                let la = la.scale_by(value::pow10(scale - sa))?;
                let lb = lb.scale_by(value::pow10(scale - sb))?;
                Ok(SymValue::Num {
                    lin: la.add(&lb, matches!(e, SsaExpr::Sub(..)))?,
                    scale,
                })
            }
            SsaExpr::Mul(a, b) => {
                let (SymValue::Num { lin: la, scale: sa }, SymValue::Num { lin: lb, scale: sb }) =
                    (self.eval(a)?, self.eval(b)?)
                else {
                    return Err(SymbolicError::Unsupported("string arithmetic".into()));
                };
                // linear only when one side is a constant
                if let Some(c) = la.as_const() {
                    Ok(SymValue::Num {
                        lin: lb.scale_by(c)?,
                        scale: sa + sb,
                    })
                } else if let Some(c) = lb.as_const() {
                    Ok(SymValue::Num {
                        lin: la.scale_by(c)?,
                        scale: sa + sb,
                    })
                } else {
                    Err(nonlinear("product of two symbolic values"))
                }
            }
            SsaExpr::Div(a, b) => {
                let (SymValue::Num { lin: la, scale: sa }, SymValue::Num { lin: lb, scale: sb }) =
                    (self.eval(a)?, self.eval(b)?)
                else {
                    return Err(SymbolicError::Unsupported("string arithmetic".into()));
                };
                // division folds only when fully constant; the truncating
                // quotient of a symbolic value is not linear
                match (la.as_const(), lb.as_const()) {
                    (Some(ca), Some(cb)) => {
                        if cb == 0 {
                            return Err(SymbolicError::Unsupported("division by zero".into()));
                        }
                        let (raw, scale) = num_div((ca, sa), (cb, sb))
                            .ok_or_else(|| SymbolicError::Unsupported("overflow".into()))?;
                        Ok(SymValue::Num {
                            lin: LinExpr::constant(raw),
                            scale,
                        })
                    }
                    _ => Err(nonlinear("symbolic division")),
                }
            }
        }
    }

    /// Interval of a linear expression under the collected symbol domains.
    fn lin_bounds(&self, lin: &LinExpr) -> Option<(i128, i128)> {
        let mut min = lin.constant;
        let mut max = lin.constant;
        for (s, c) in &lin.terms {
            let (lo, hi) = self.cs.domains.get(s)?.bounds();
            let (a, b) = (c.checked_mul(lo)?, c.checked_mul(hi)?);
            min = min.checked_add(a.min(b))?;
            max = max.checked_add(a.max(b))?;
        }
        Some((min, max))
    }

    /// Store-back: rescale into the picture and guard against silent
    /// truncation so witness inputs keep the symbolic and concrete runs in
    /// lock-step.
    fn store(&mut self, v: SymValue, pic: &PicType) -> Result<SymValue, SymbolicError> {
        match (v, pic) {
            (
                SymValue::Num { lin, scale },
                PicType::Numeric { frac_digits, .. },
            ) => {
                if let Some(c) = lin.as_const() {
                    return Ok(SymValue::Num {
                        lin: LinExpr::constant(value::store_num(c, scale, pic)),
                        scale: *frac_digits,
                    });
                }
                if scale > *frac_digits {
                    return Err(SymbolicError::NonLinearUnsupported(
                        "truncating store of a symbolic value".into(),
                    ));
                }
                let lin = lin.scale_by(value::pow10(*frac_digits - scale))?;
                let (lo, hi) = (pic.min_scaled(), pic.max_scaled());
                if let Some((min, max)) = self.lin_bounds(&lin) {
                    if min < lo {
                        // lin >= lo  ==  lin - lo >= 0
                        self.cs.clauses.push(Clause::unit(Atom::new(
                            lin.terms.clone().into_iter().collect(),
                            lin.constant - lo,
                            AtomOp::Ge,
                        )));
                    }
                    if max > hi {
                        self.cs.clauses.push(Clause::unit(Atom::new(
                            lin.terms.clone().into_iter().collect(),
                            lin.constant - hi,
                            AtomOp::Le,
                        )));
                    }
                } else {
                    return Err(SymbolicError::Unsupported("bound overflow".into()));
                }
                Ok(SymValue::Num {
                    lin,
                    scale: *frac_digits,
                })
            }
            (SymValue::StrConst(s), PicType::Alphanumeric { .. }) => {
                Ok(SymValue::StrConst(value::store_str(&s, pic)))
            }
            (SymValue::Str { lin, len }, PicType::Alphanumeric { length }) => {
                if len == *length {
                    Ok(SymValue::Str { lin, len })
                } else if len < *length {
                    // pad right with spaces: multiply the code
                    let lin = lin.scale_by(value::CHAR_BASE.pow(*length - len))?;
                    Ok(SymValue::Str {
                        lin,
                        len: *length,
                    })
                } else if let Some(c) = lin.as_const() {
                    let s = value::code_to_str(c, len);
                    Ok(SymValue::StrConst(value::store_str(&s, pic)))
                } else {
                    Err(SymbolicError::NonLinearUnsupported(
                        "truncating store of a symbolic string".into(),
                    ))
                }
            }
            _ => Err(SymbolicError::Unsupported(
                "store across categories".into(),
            )),
        }
    }

    fn atom(&mut self, op: CmpOp, lhs: &SsaExpr, rhs: &SsaExpr) -> Result<Atom, SymbolicError> {
        let l = self.eval(lhs)?;
        let r = self.eval(rhs)?;
        // constant-constant string comparisons fold without encoding, which
        // keeps long status texts out of the integer code space
        if let (SymValue::StrConst(a), SymValue::StrConst(b)) = (&l, &r) {
            let ord = value::compare_str(a, b);
            let holds = match op {
                CmpOp::Eq => ord.is_eq(),
                CmpOp::Ne => ord.is_ne(),
                CmpOp::Gt => ord.is_gt(),
                CmpOp::Lt => ord.is_lt(),
                CmpOp::Ge => ord.is_ge(),
                CmpOp::Le => ord.is_le(),
            };
            // 0 = 0 is true, 0 ≠ 0 is false
            let op = if holds { AtomOp::Eq } else { AtomOp::Ne };
            return Ok(Atom::new(vec![], 0, op));
        }
        let as_codes = |v: SymValue| -> Result<(LinExpr, u32), SymbolicError> {
            match v {
                SymValue::Str { lin, len } => Ok((lin, len)),
                SymValue::StrConst(s) => {
                    let code = value::try_str_to_code(&s).ok_or_else(|| {
                        SymbolicError::Unsupported(format!(
                            "string literal of {} chars exceeds the encodable range",
                            s.len()
                        ))
                    })?;
                    Ok((LinExpr::constant(code), s.len() as u32))
                }
                SymValue::Num { .. } => Err(SymbolicError::Unsupported(
                    "comparison across categories".into(),
                )),
            }
        };
        let diff = match (l, r) {
            (SymValue::Num { lin: la, scale: sa }, SymValue::Num { lin: lb, scale: sb }) => {
                let scale = sa.max(sb);
                let la = la.scale_by(value::pow10(scale - sa))?;
                let lb = lb.scale_by(value::pow10(scale - sb))?;
                la.add(&lb, true)?
            }
            (SymValue::Num { .. }, _) | (_, SymValue::Num { .. }) => {
                return Err(SymbolicError::Unsupported(
                    "comparison across categories".into(),
                ))
            }
            (l, r) => {
                let (la, na) = as_codes(l)?;
                let (lb, nb) = as_codes(r)?;
                let len = na.max(nb);
                let la = la.scale_by(value::CHAR_BASE.pow(len - na))?;
                let lb = lb.scale_by(value::CHAR_BASE.pow(len - nb))?;
                la.add(&lb, true)?
            }
        };
        for s in diff.terms.keys() {
            self.sym_domain(s)?;
        }
        let terms: Vec<(Sym, i128)> = diff.terms.into_iter().collect();
        // integer normalization: a < b  ==  a - b + 1 <= 0
        Ok(match op {
            CmpOp::Eq => Atom::new(terms, diff.constant, AtomOp::Eq),
            CmpOp::Ne => Atom::new(terms, diff.constant, AtomOp::Ne),
            CmpOp::Le => Atom::new(terms, diff.constant, AtomOp::Le),
            CmpOp::Ge => Atom::new(terms, diff.constant, AtomOp::Ge),
            CmpOp::Lt => Atom::new(terms, diff.constant + 1, AtomOp::Le),
            CmpOp::Gt => Atom::new(terms, diff.constant - 1, AtomOp::Ge),
        })
    }

    /// Negation-normal form, then conjunctive normal form by distribution.
    fn cond_clauses(&mut self, cond: &SsaCond, polarity: bool) -> Result<Vec<Clause>, SymbolicError> {
        match (cond, polarity) {
            (SsaCond::Not(inner), p) => self.cond_clauses(inner, !p),
            (SsaCond::And(a, b), true) | (SsaCond::Or(a, b), false) => {
                let mut out = self.cond_clauses(a, polarity)?;
                out.extend(self.cond_clauses(b, polarity)?);
                Ok(out)
            }
            (SsaCond::Or(a, b), true) | (SsaCond::And(a, b), false) => {
                let left = self.cond_clauses(a, polarity)?;
                let right = self.cond_clauses(b, polarity)?;
                let mut out = Vec::new();
                for cl in &left {
                    for cr in &right {
                        let mut merged = cl.any_of.clone();
                        merged.extend(cr.any_of.clone());
                        out.push(Clause { any_of: merged });
                    }
                }
                Ok(out)
            }
            (SsaCond::Cmp { op, lhs, rhs }, p) => {
                let op = if p { *op } else { op.negate() };
                Ok(vec![Clause::unit(self.atom(op, lhs, rhs)?)])
            }
        }
    }
}
