//! Shared expression evaluation.
//!
//! The concrete interpreter, the constant-aware path analysis, and test-data
//! self-verification all evaluate through this module, so arithmetic and
//! store-back truncation behave identically everywhere. Evaluation is
//! three-valued: an operand that is statically unknown yields `None`, and
//! `AND`/`OR` still short-circuit on known sides.

use crate::frontend::ast::{CmpOp, Cond, Expr};
use crate::value::{self, PicType, Value};
use thiserror::Error;

/// An evaluated number carries its own scale; strings are plain text.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Evaluated {
    Num { raw: i128, scale: u32 },
    Str(String),
}

impl Evaluated {
    pub fn from_value(v: &Value, pic: &PicType) -> Evaluated {
        match v {
            Value::Num(raw) => Evaluated::Num {
                raw: *raw,
                scale: pic.scale(),
            },
            Value::Str(s) => Evaluated::Str(s.clone()),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("arithmetic overflow")]
    Overflow,
    #[error("category mismatch in expression")]
    CategoryMismatch,
}

/// Division keeps two guard digits beyond the wider operand before the
/// store-back truncates to the target picture.
const DIV_GUARD_DIGITS: u32 = 2;

/// Scaled division, truncated toward zero. `None` on overflow; the caller
/// must reject a zero divisor first.
pub fn num_div(a: (i128, u32), b: (i128, u32)) -> Option<(i128, u32)> {
    let (ra, sa) = a;
    let (rb, sb) = b;
    let scale = sa.max(sb) + DIV_GUARD_DIGITS;
    // (a / b) at `scale` is a_raw * 10^(scale - sa + sb) / b_raw
    let shifted = ra.checked_mul(value::pow10(scale - sa + sb))?;
    Some((shifted / rb, scale))
}

pub fn eval_expr(
    expr: &Expr,
    lookup: &dyn Fn(&str) -> Option<Evaluated>,
) -> Result<Option<Evaluated>, EvalError> {
    match expr {
        Expr::Var(v) => Ok(lookup(v)),
        Expr::NumLit { raw, scale } => Ok(Some(Evaluated::Num {
            raw: *raw,
            scale: *scale,
        })),
        Expr::StrLit(s) => Ok(Some(Evaluated::Str(s.clone()))),
        Expr::Neg(inner) => match eval_expr(inner, lookup)? {
            Some(Evaluated::Num { raw, scale }) => Ok(Some(Evaluated::Num {
                raw: raw.checked_neg().ok_or(EvalError::Overflow)?,
                scale,
            })),
            Some(Evaluated::Str(_)) => Err(EvalError::CategoryMismatch),
            None => Ok(None),
        },
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
            let left = eval_expr(a, lookup)?;
            let right = eval_expr(b, lookup)?;
            let (Some(left), Some(right)) = (left, right) else {
                return Ok(None);
            };
            let (Evaluated::Num { raw: ra, scale: sa }, Evaluated::Num { raw: rb, scale: sb }) =
                (&left, &right)
            else {
                return Err(EvalError::CategoryMismatch);
            };
            let (ra, sa, rb, sb) = (*ra, *sa, *rb, *sb);
            let out = match expr {
                Expr::Add(..) | Expr::Sub(..) => {
                    let scale = sa.max(sb);
                    let la = value::rescale(ra, sa, scale);
                    let lb = value::rescale(rb, sb, scale);
                    let raw = if matches!(expr, Expr::Add(..)) {
                        la.checked_add(lb)
                    } else {
                        la.checked_sub(lb)
                    }
                    .ok_or(EvalError::Overflow)?;
                    Evaluated::Num { raw, scale }
                }
                Expr::Mul(..) => Evaluated::Num {
                    raw: ra.checked_mul(rb).ok_or(EvalError::Overflow)?,
                    scale: sa + sb,
                },
                Expr::Div(..) => {
                    if rb == 0 {
                        return Err(EvalError::DivisionByZero);
                    }
                    let (raw, scale) =
                        num_div((ra, sa), (rb, sb)).ok_or(EvalError::Overflow)?;
                    Evaluated::Num { raw, scale }
                }
                _ => unreachable!(),
            };
            Ok(Some(out))
        }
    }
}

pub fn compare(op: CmpOp, left: &Evaluated, right: &Evaluated) -> Result<bool, EvalError> {
    let ord = match (left, right) {
        (Evaluated::Num { raw: ra, scale: sa }, Evaluated::Num { raw: rb, scale: sb }) => {
            let scale = sa.max(sb);
            value::rescale(*ra, *sa, *scale).cmp(&value::rescale(*rb, *sb, *scale))
        }
        (Evaluated::Str(a), Evaluated::Str(b)) => value::compare_str(a, b),
        _ => return Err(EvalError::CategoryMismatch),
    };
    Ok(match op {
        CmpOp::Eq => ord.is_eq(),
        CmpOp::Ne => ord.is_ne(),
        CmpOp::Gt => ord.is_gt(),
        CmpOp::Lt => ord.is_lt(),
        CmpOp::Ge => ord.is_ge(),
        CmpOp::Le => ord.is_le(),
    })
}

pub fn eval_cond(
    cond: &Cond,
    lookup: &dyn Fn(&str) -> Option<Evaluated>,
) -> Result<Option<bool>, EvalError> {
    match cond {
        Cond::Cmp { op, lhs, rhs } => {
            let (Some(l), Some(r)) = (eval_expr(lhs, lookup)?, eval_expr(rhs, lookup)?) else {
                return Ok(None);
            };
            compare(*op, &l, &r).map(Some)
        }
        Cond::And(a, b) => {
            let la = eval_cond(a, lookup)?;
            let lb = eval_cond(b, lookup)?;
            Ok(match (la, lb) {
                (Some(false), _) | (_, Some(false)) => Some(false),
                (Some(true), Some(true)) => Some(true),
                _ => None,
            })
        }
        Cond::Or(a, b) => {
            let la = eval_cond(a, lookup)?;
            let lb = eval_cond(b, lookup)?;
            Ok(match (la, lb) {
                (Some(true), _) | (_, Some(true)) => Some(true),
                (Some(false), Some(false)) => Some(false),
                _ => None,
            })
        }
        Cond::Not(inner) => Ok(eval_cond(inner, lookup)?.map(|b| !b)),
    }
}

/// Store an evaluated result into a variable of the given picture,
/// truncating exactly as the interpreter does.
pub fn store(result: &Evaluated, pic: &PicType) -> Result<Value, EvalError> {
    match (result, pic) {
        (Evaluated::Num { raw, scale }, PicType::Numeric { .. }) => {
            Ok(Value::Num(value::store_num(*raw, *scale, pic)))
        }
        (Evaluated::Str(s), PicType::Alphanumeric { .. }) => {
            Ok(Value::Str(value::store_str(s, pic)))
        }
        _ => Err(EvalError::CategoryMismatch),
    }
}
