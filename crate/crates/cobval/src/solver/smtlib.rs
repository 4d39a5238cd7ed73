//! SMT-LIB 2 export for cross-validation with an external solver.
//!
//! Alphanumeric symbols are exported in their base-95 integer encoding with
//! a comment noting the original picture; any conforming QF_LIA solver can
//! consume the script, and a model fed back through [`super::check`] after
//! decoding must satisfy the original set.

use super::*;

pub fn export_smtlib(cs: &ConstraintSet) -> String {
    let mut out = String::new();
    out.push_str("(set-logic QF_LIA)\n");
    for (sym, domain) in &cs.domains {
        let name = smt_name(sym);
        match domain {
            Domain::Num { lo, hi, scale } => {
                out.push_str(&format!("; {sym}: numeric, scale {scale}\n"));
                out.push_str(&format!("(declare-const {name} Int)\n"));
                out.push_str(&format!("(assert (>= {name} {}))\n", lit(*lo)));
                out.push_str(&format!("(assert (<= {name} {}))\n", lit(*hi)));
            }
            Domain::Str { len } => {
                out.push_str(&format!(
                    "; {sym}: alphanumeric X({len}), base-95 code over printable ASCII\n"
                ));
                out.push_str(&format!("(declare-const {name} Int)\n"));
                out.push_str(&format!("(assert (>= {name} 0))\n"));
                out.push_str(&format!(
                    "(assert (<= {name} {}))\n",
                    lit(crate::value::str_code_max(*len))
                ));
            }
        }
    }
    for clause in &cs.clauses {
        let rendered: Vec<String> = clause.any_of.iter().map(atom_sexpr).collect();
        let body = match rendered.len() {
            1 => rendered.into_iter().next().unwrap(),
            _ => format!("(or {})", rendered.join(" ")),
        };
        out.push_str(&format!("(assert {body})\n"));
    }
    out.push_str("(check-sat)\n(get-model)\n");
    out
}

fn smt_name(sym: &Sym) -> String {
    format!("|{sym}|")
}

fn lit(v: i128) -> String {
    if v < 0 {
        format!("(- {})", v.unsigned_abs())
    } else {
        v.to_string()
    }
}

fn atom_sexpr(atom: &Atom) -> String {
    let mut parts: Vec<String> = atom
        .terms
        .iter()
        .map(|(s, c)| {
            if *c == 1 {
                smt_name(s)
            } else {
                format!("(* {} {})", lit(*c), smt_name(s))
            }
        })
        .collect();
    if atom.constant != 0 || parts.is_empty() {
        parts.push(lit(atom.constant));
    }
    let sum = match parts.len() {
        1 => parts.into_iter().next().unwrap(),
        _ => format!("(+ {})", parts.join(" ")),
    };
    match atom.op {
        AtomOp::Le => format!("(<= {sum} 0)"),
        AtomOp::Ge => format!("(>= {sum} 0)"),
        AtomOp::Eq => format!("(= {sum} 0)"),
        AtomOp::Ne => format!("(not (= {sum} 0))"),
    }
}
