//! AST pretty-printer producing parseable free-format source.
//!
//! `parse(print(ast))` yields a structurally equal AST, which the round-trip
//! property test exercises.

use super::ast::*;

pub fn print_program(ast: &ProgramAst) -> String {
    let mut out = String::new();
    out.push_str("IDENTIFICATION DIVISION.\n");
    out.push_str(&format!("PROGRAM-ID. {}.\n", ast.program_id));
    if !ast.working_storage.is_empty() {
        out.push_str("DATA DIVISION.\nWORKING-STORAGE SECTION.\n");
        for item in &ast.working_storage {
            print_item(item, &mut out);
        }
    }
    out.push_str("PROCEDURE DIVISION.\n");
    for p in &ast.paragraphs {
        out.push_str(&format!("{}.\n", p.name));
        for s in &p.statements {
            let mut text = String::new();
            print_statement(s, 1, &mut text);
            out.push_str(&text);
            // sentence period on the final line of the statement
            out.truncate(out.trim_end_matches('\n').len());
            out.push_str(".\n");
        }
    }
    out
}

fn print_item(item: &DataItem, out: &mut String) {
    let indent = "    ".repeat((item.level.saturating_sub(1) / 4) as usize);
    match &item.pic {
        Some(pic) => out.push_str(&format!(
            "{indent}{:02} {} PIC {}.\n",
            item.level, item.name, pic
        )),
        None => out.push_str(&format!("{indent}{:02} {}.\n", item.level, item.name)),
    }
    for c in &item.children {
        print_item(c, out);
    }
}

fn ind(depth: usize) -> String {
    "    ".repeat(depth)
}

fn print_statement(s: &Statement, depth: usize, out: &mut String) {
    let pad = ind(depth);
    match &s.kind {
        StatementKind::Move { src, dsts } => {
            out.push_str(&format!("{pad}MOVE {} TO {}\n", expr(src), dsts.join(" ")));
        }
        StatementKind::Compute { dst, expr: e } => {
            out.push_str(&format!("{pad}COMPUTE {dst} = {}\n", expr(e)));
        }
        StatementKind::Arith {
            op,
            operand,
            target,
            giving,
        } => {
            let (verb, prep) = match op {
                ArithVerb::Add => ("ADD", "TO"),
                ArithVerb::Subtract => ("SUBTRACT", "FROM"),
                ArithVerb::Multiply => ("MULTIPLY", "BY"),
                ArithVerb::Divide => ("DIVIDE", "INTO"),
            };
            let giving = giving
                .as_ref()
                .map(|g| format!(" GIVING {g}"))
                .unwrap_or_default();
            out.push_str(&format!(
                "{pad}{verb} {} {prep} {target}{giving}\n",
                expr(operand)
            ));
        }
        StatementKind::If {
            cond: c,
            then_branch,
            else_branch,
        } => {
            out.push_str(&format!("{pad}IF {}\n", cond(c)));
            for s in then_branch {
                print_statement(s, depth + 1, out);
            }
            if !else_branch.is_empty() {
                out.push_str(&format!("{pad}ELSE\n"));
                for s in else_branch {
                    print_statement(s, depth + 1, out);
                }
            }
            out.push_str(&format!("{pad}END-IF\n"));
        }
        StatementKind::Evaluate {
            subject,
            whens,
            other,
        } => {
            let subj = match subject {
                EvaluateSubject::Var(v) => v.clone(),
                EvaluateSubject::True => "TRUE".to_string(),
            };
            out.push_str(&format!("{pad}EVALUATE {subj}\n"));
            for arm in whens {
                match &arm.test {
                    WhenTest::Value(e) => {
                        out.push_str(&format!("{pad}WHEN {}\n", expr(e)));
                    }
                    WhenTest::Cond(c) => {
                        out.push_str(&format!("{pad}WHEN {}\n", cond(c)));
                    }
                }
                for s in &arm.body {
                    print_statement(s, depth + 1, out);
                }
            }
            if !other.is_empty() {
                out.push_str(&format!("{pad}WHEN OTHER\n"));
                for s in other {
                    print_statement(s, depth + 1, out);
                }
            }
            out.push_str(&format!("{pad}END-EVALUATE\n"));
        }
        StatementKind::PerformParagraph { name } => {
            out.push_str(&format!("{pad}PERFORM {name}\n"));
        }
        StatementKind::PerformUntil {
            cond: c,
            body,
            test_before,
        } => {
            let test = if *test_before {
                ""
            } else {
                "WITH TEST AFTER "
            };
            out.push_str(&format!("{pad}PERFORM {test}UNTIL {}\n", cond(c)));
            for s in body {
                print_statement(s, depth + 1, out);
            }
            out.push_str(&format!("{pad}END-PERFORM\n"));
        }
        StatementKind::PerformVarying {
            var,
            from,
            by,
            until,
            body,
        } => {
            out.push_str(&format!(
                "{pad}PERFORM VARYING {var} FROM {} BY {} UNTIL {}\n",
                expr(from),
                expr(by),
                cond(until)
            ));
            for s in body {
                print_statement(s, depth + 1, out);
            }
            out.push_str(&format!("{pad}END-PERFORM\n"));
        }
        StatementKind::ExecSql(sql) => {
            out.push_str(&format!("{pad}EXEC SQL {} END-EXEC\n", print_sql(sql)));
        }
        StatementKind::ExecGeneric {
            system,
            verb,
            options,
        } => {
            let opts: Vec<String> = options
                .iter()
                .map(|o| {
                    let v = match &o.value {
                        GenericArg::Var(v) => v.clone(),
                        GenericArg::Lit(l) => lit(l),
                    };
                    format!("{}({})", o.name, v)
                })
                .collect();
            out.push_str(&format!(
                "{pad}EXEC {system} {verb} {} END-EXEC\n",
                opts.join(" ")
            ));
        }
        StatementKind::Call { name, using } => {
            if using.is_empty() {
                out.push_str(&format!("{pad}CALL '{name}'\n"));
            } else {
                out.push_str(&format!("{pad}CALL '{name}' USING {}\n", using.join(" ")));
            }
        }
        StatementKind::Read { file, record } => {
            out.push_str(&format!("{pad}READ {file} INTO {record}\n"));
        }
        StatementKind::Write { record } => {
            out.push_str(&format!("{pad}WRITE {record}\n"));
        }
        StatementKind::Display { args } => {
            let rendered: Vec<String> = args.iter().map(expr).collect();
            out.push_str(&format!("{pad}DISPLAY {}\n", rendered.join(" ")));
        }
        StatementKind::Continue => out.push_str(&format!("{pad}CONTINUE\n")),
        StatementKind::StopRun => out.push_str(&format!("{pad}STOP RUN\n")),
    }
}

fn print_sql(sql: &SqlStatement) -> String {
    let arg = |a: &SqlArg| match a {
        SqlArg::Host(v) => format!(":{v}"),
        SqlArg::Lit(l) => lit(l),
    };
    let where_clause = |triples: &[(String, CmpOp, SqlArg)]| {
        if triples.is_empty() {
            String::new()
        } else {
            let parts: Vec<String> = triples
                .iter()
                .map(|(c, op, a)| format!("{c} {} {}", op.symbol(), arg(a)))
                .collect();
            format!(" WHERE {}", parts.join(" AND "))
        }
    };
    match sql.verb {
        SqlVerb::Select => format!(
            "SELECT {} INTO {} FROM {}{}",
            sql.columns.join(", "),
            sql.into_vars
                .iter()
                .map(|v| format!(":{v}"))
                .collect::<Vec<_>>()
                .join(", "),
            sql.table,
            where_clause(&sql.where_triples)
        ),
        SqlVerb::Insert => {
            let cols = if sql.columns.is_empty() {
                String::new()
            } else {
                format!(" ({})", sql.columns.join(", "))
            };
            format!(
                "INSERT INTO {}{cols} VALUES ({})",
                sql.table,
                sql.values.iter().map(arg).collect::<Vec<_>>().join(", ")
            )
        }
        SqlVerb::Update => format!(
            "UPDATE {} SET {}{}",
            sql.table,
            sql.set_pairs
                .iter()
                .map(|(c, a)| format!("{c} = {}", arg(a)))
                .collect::<Vec<_>>()
                .join(", "),
            where_clause(&sql.where_triples)
        ),
        SqlVerb::Delete => format!(
            "DELETE FROM {}{}",
            sql.table,
            where_clause(&sql.where_triples)
        ),
    }
}

fn lit(l: &str) -> String {
    if !l.is_empty()
        && l.chars()
            .all(|c| c.is_ascii_digit() || c == '.' || c == '-')
    {
        l.to_string()
    } else {
        format!("'{l}'")
    }
}

fn expr(e: &Expr) -> String {
    expr_prec(e, 0)
}

// precedence: 0 additive, 1 multiplicative, 2 atoms
fn expr_prec(e: &Expr, min_prec: u8) -> String {
    let (text, prec) = match e {
        Expr::Var(v) => (v.clone(), 2),
        Expr::NumLit { raw, scale } => (format_num_lit(*raw, *scale), 2),
        Expr::StrLit(s) => {
            let t = if s == " " {
                "SPACE".to_string()
            } else {
                format!("'{s}'")
            };
            (t, 2)
        }
        Expr::Add(a, b) => (
            format!("{} + {}", expr_prec(a, 0), expr_prec(b, 1)),
            0,
        ),
        Expr::Sub(a, b) => (
            format!("{} - {}", expr_prec(a, 0), expr_prec(b, 1)),
            0,
        ),
        Expr::Mul(a, b) => (
            format!("{} * {}", expr_prec(a, 1), expr_prec(b, 2)),
            1,
        ),
        Expr::Div(a, b) => (
            format!("{} / {}", expr_prec(a, 1), expr_prec(b, 2)),
            1,
        ),
        Expr::Neg(a) => (format!("- {}", expr_prec(a, 2)), 1),
    };
    if prec < min_prec {
        format!("({text})")
    } else {
        text
    }
}

fn format_num_lit(raw: i128, scale: u32) -> String {
    if scale == 0 {
        return raw.to_string();
    }
    let neg = raw < 0;
    let abs = raw.unsigned_abs().to_string();
    let abs = format!("{:0>width$}", abs, width = scale as usize + 1);
    let (int_part, frac_part) = abs.split_at(abs.len() - scale as usize);
    format!("{}{int_part}.{frac_part}", if neg { "-" } else { "" })
}

// precedence: 0 or, 1 and, 2 not/cmp
fn cond(c: &Cond) -> String {
    cond_prec(c, 0)
}

fn cond_prec(c: &Cond, min_prec: u8) -> String {
    let (text, prec) = match c {
        Cond::Or(a, b) => (
            format!("{} OR {}", cond_prec(a, 0), cond_prec(b, 1)),
            0,
        ),
        Cond::And(a, b) => (
            format!("{} AND {}", cond_prec(a, 1), cond_prec(b, 2)),
            1,
        ),
        Cond::Not(a) => (format!("NOT ({})", cond_prec(a, 0)), 2),
        Cond::Cmp { op, lhs, rhs } => (
            format!("{} {} {}", expr(lhs), op.symbol(), expr(rhs)),
            2,
        ),
    };
    if prec < min_prec {
        format!("({text})")
    } else {
        text
    }
}
