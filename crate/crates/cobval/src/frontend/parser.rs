//! Recursive-descent parser for the COBOL subset.
//!
//! No partial AST escapes: `parse_program` either returns a fully resolved
//! program or the accumulated diagnostic list.

use super::ast::*;
use super::diag::Diagnostic;
use super::lexer::{lex, TokKind, Token};
use crate::value::resolve_pic;

pub struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    diags: Vec<Diagnostic>,
}

/// Statement verbs; a word followed by a period that is none of these starts
/// a new paragraph.
const VERBS: &[&str] = &[
    "MOVE", "COMPUTE", "ADD", "SUBTRACT", "MULTIPLY", "DIVIDE", "IF", "EVALUATE", "PERFORM",
    "EXEC", "CALL", "READ", "WRITE", "DISPLAY", "CONTINUE", "STOP", "GOBACK",
];

/// Constructs we recognize and deliberately reject.
const UNSUPPORTED: &[&str] = &[
    "REDEFINES", "OCCURS", "COPY", "GO", "GOTO", "COMP", "COMP-1", "COMP-2", "COMP-3", "USAGE",
    "VALUE", "STRING", "UNSTRING", "INSPECT", "SEARCH", "SORT", "MERGE", "ACCEPT", "INITIALIZE",
    "SET", "ALTER", "ENVIRONMENT",
];

impl Parser {
    fn new(tokens: Vec<Token>) -> Self {
        Parser {
            tokens,
            pos: 0,
            diags: Vec::new(),
        }
    }

    fn current(&self) -> &Token {
        &self.tokens[self.pos.min(self.tokens.len() - 1)]
    }

    fn peek(&self, n: usize) -> &Token {
        &self.tokens[(self.pos + n).min(self.tokens.len() - 1)]
    }

    fn advance(&mut self) -> Token {
        let t = self.current().clone();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn at_eof(&self) -> bool {
        matches!(self.current().kind, TokKind::Eof)
    }

    fn check_word(&self, w: &str) -> bool {
        matches!(&self.current().kind, TokKind::Word(s) if s == w)
    }

    fn eat_word(&mut self, w: &str) -> bool {
        if self.check_word(w) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn syntax(&mut self, expected: &str) -> Diagnostic {
        let t = self.current();
        let found = if t.lexeme.is_empty() {
            "end of input".to_string()
        } else {
            t.lexeme.clone()
        };
        Diagnostic::syntax(t.line, t.col, expected, &found)
    }

    fn expect_word(&mut self, w: &str) -> Result<(), Diagnostic> {
        if self.eat_word(w) {
            Ok(())
        } else {
            Err(self.syntax(w))
        }
    }

    fn expect_dot(&mut self) -> Result<(), Diagnostic> {
        if matches!(self.current().kind, TokKind::Dot) {
            self.advance();
            Ok(())
        } else {
            Err(self.syntax("`.`"))
        }
    }

    fn expect_ident(&mut self) -> Result<String, Diagnostic> {
        match &self.current().kind {
            TokKind::Word(w) => {
                let w = w.clone();
                self.advance();
                Ok(w)
            }
            _ => Err(self.syntax("identifier")),
        }
    }

    // ── Program structure ──────────────────────────────────────────────

    fn parse_program(&mut self) -> Result<ProgramAst, Diagnostic> {
        self.expect_word("IDENTIFICATION")?;
        self.expect_word("DIVISION")?;
        self.expect_dot()?;
        self.expect_word("PROGRAM-ID")?;
        self.expect_dot()?;
        let program_id = self.expect_ident()?;
        self.expect_dot()?;

        if self.check_word("ENVIRONMENT") {
            let line = self.current().line;
            return Err(Diagnostic::UnsupportedConstruct {
                keyword: "ENVIRONMENT DIVISION".into(),
                line,
            });
        }

        let mut working_storage = Vec::new();
        if self.eat_word("DATA") {
            self.expect_word("DIVISION")?;
            self.expect_dot()?;
            self.expect_word("WORKING-STORAGE")?;
            self.expect_word("SECTION")?;
            self.expect_dot()?;
            working_storage = self.parse_data_items()?;
        }

        self.expect_word("PROCEDURE")?;
        self.expect_word("DIVISION")?;
        self.expect_dot()?;

        let mut paragraphs = Vec::new();
        while !self.at_eof() {
            paragraphs.push(self.parse_paragraph()?);
        }
        if paragraphs.is_empty() {
            return Err(self.syntax("at least one paragraph"));
        }

        Ok(ProgramAst {
            program_id,
            working_storage,
            paragraphs,
        })
    }

    // ── Data division ──────────────────────────────────────────────────

    fn parse_data_items(&mut self) -> Result<Vec<DataItem>, Diagnostic> {
        let mut flat: Vec<DataItem> = Vec::new();
        while let TokKind::Number { raw, scale: 0 } = self.current().kind {
            if !(1..=49).contains(&raw) && raw != 77 {
                return Err(self.syntax("level number 01-49 or 77"));
            }
            let line = self.current().line;
            self.advance();
            let name = self.expect_ident()?;
            if let Some(kw) = UNSUPPORTED.iter().find(|k| self.check_word(k)) {
                return Err(Diagnostic::UnsupportedConstruct {
                    keyword: (*kw).to_string(),
                    line: self.current().line,
                });
            }
            let pic = if self.eat_word("PIC") || self.eat_word("PICTURE") {
                let picture = self.collect_picture()?;
                match resolve_pic(&picture) {
                    Ok(p) => Some(p),
                    Err(e) => {
                        let t = self.current();
                        return Err(Diagnostic::syntax(
                            t.line,
                            t.col,
                            "valid picture",
                            &e.to_string(),
                        ));
                    }
                }
            } else {
                None
            };
            if let Some(kw) = UNSUPPORTED.iter().find(|k| self.check_word(k)) {
                return Err(Diagnostic::UnsupportedConstruct {
                    keyword: (*kw).to_string(),
                    line: self.current().line,
                });
            }
            self.expect_dot()?;
            flat.push(DataItem {
                name,
                level: raw as u8,
                pic,
                children: Vec::new(),
                line,
            });
        }
        build_hierarchy(flat, &mut self.diags)
    }

    /// Reassemble the picture text from raw lexemes up to the closing period
    /// (or the first word that cannot belong to a picture, e.g. VALUE).
    fn collect_picture(&mut self) -> Result<String, Diagnostic> {
        fn picture_word(w: &str) -> bool {
            w.chars().all(|c| matches!(c, 'S' | 'V' | 'X' | '0'..='9'))
        }
        let mut text = String::new();
        loop {
            match &self.current().kind {
                TokKind::Dot | TokKind::Eof => break,
                TokKind::Word(w) if picture_word(w) => {
                    text.push_str(&self.advance().lexeme);
                }
                TokKind::Word(_) => break,
                TokKind::Number { .. } | TokKind::LParen | TokKind::RParen => {
                    text.push_str(&self.advance().lexeme);
                }
                _ => return Err(self.syntax("picture text")),
            }
        }
        if text.is_empty() {
            return Err(self.syntax("picture text"));
        }
        Ok(text)
    }

    // ── Procedure division ─────────────────────────────────────────────

    fn parse_paragraph(&mut self) -> Result<Paragraph, Diagnostic> {
        let line = self.current().line;
        let name = self.expect_ident()?;
        if VERBS.contains(&name.as_str()) {
            return Err(Diagnostic::syntax(
                line,
                self.current().col,
                "paragraph name",
                &name,
            ));
        }
        self.expect_dot()?;
        let mut statements = Vec::new();
        while !self.at_eof() && !self.at_paragraph_start() {
            statements.push(self.parse_statement()?);
            // sentence period after top-level statements
            if matches!(self.current().kind, TokKind::Dot) {
                self.advance();
            }
        }
        Ok(Paragraph {
            name,
            statements,
            line,
        })
    }

    fn at_paragraph_start(&self) -> bool {
        if let TokKind::Word(w) = &self.current().kind {
            !VERBS.contains(&w.as_str())
                && !UNSUPPORTED.contains(&w.as_str())
                && matches!(self.peek(1).kind, TokKind::Dot)
        } else {
            false
        }
    }

    fn parse_statements_until(&mut self, stops: &[&str]) -> Result<Vec<Statement>, Diagnostic> {
        let mut out = Vec::new();
        loop {
            if self.at_eof() {
                return Err(self.syntax(&format!("one of {stops:?}")));
            }
            if let TokKind::Word(w) = &self.current().kind {
                if stops.contains(&w.as_str()) {
                    return Ok(out);
                }
            }
            if matches!(self.current().kind, TokKind::Dot) {
                return Err(self.syntax(&format!("one of {stops:?} before `.`")));
            }
            out.push(self.parse_statement()?);
        }
    }

    fn parse_statement(&mut self) -> Result<Statement, Diagnostic> {
        let line = self.current().line;
        if let Some(kw) = UNSUPPORTED.iter().find(|k| self.check_word(k)) {
            return Err(Diagnostic::UnsupportedConstruct {
                keyword: (*kw).to_string(),
                line,
            });
        }
        let kind = match &self.current().kind {
            TokKind::Word(w) => match w.as_str() {
                "MOVE" => self.parse_move()?,
                "COMPUTE" => self.parse_compute()?,
                "ADD" => self.parse_arith(ArithVerb::Add, "TO")?,
                "SUBTRACT" => self.parse_arith(ArithVerb::Subtract, "FROM")?,
                "MULTIPLY" => self.parse_arith(ArithVerb::Multiply, "BY")?,
                "DIVIDE" => self.parse_divide()?,
                "IF" => self.parse_if()?,
                "EVALUATE" => self.parse_evaluate()?,
                "PERFORM" => self.parse_perform()?,
                "EXEC" => self.parse_exec()?,
                "CALL" => self.parse_call()?,
                "READ" => self.parse_read()?,
                "WRITE" => self.parse_write()?,
                "DISPLAY" => self.parse_display()?,
                "CONTINUE" => {
                    self.advance();
                    StatementKind::Continue
                }
                "STOP" => {
                    self.advance();
                    self.expect_word("RUN")?;
                    StatementKind::StopRun
                }
                "GOBACK" => {
                    self.advance();
                    StatementKind::StopRun
                }
                _ => return Err(self.syntax("statement verb")),
            },
            _ => return Err(self.syntax("statement verb")),
        };
        Ok(Statement { kind, line })
    }

    fn parse_move(&mut self) -> Result<StatementKind, Diagnostic> {
        self.expect_word("MOVE")?;
        let src = self.parse_operand()?;
        self.expect_word("TO")?;
        let mut dsts = vec![self.expect_ident()?];
        while matches!(self.current().kind, TokKind::Comma) {
            self.advance();
            dsts.push(self.expect_ident()?);
        }
        // juxtaposed extra targets: MOVE X TO A B
        while matches!(&self.current().kind, TokKind::Word(w)
            if !VERBS.contains(&w.as_str()) && !is_clause_word(w))
        {
            dsts.push(self.expect_ident()?);
        }
        Ok(StatementKind::Move { src, dsts })
    }

    fn parse_compute(&mut self) -> Result<StatementKind, Diagnostic> {
        self.expect_word("COMPUTE")?;
        let dst = self.expect_ident()?;
        if !matches!(self.current().kind, TokKind::Eq) {
            return Err(self.syntax("="));
        }
        self.advance();
        let expr = self.parse_expr()?;
        Ok(StatementKind::Compute { dst, expr })
    }

    fn parse_arith(&mut self, op: ArithVerb, prep: &str) -> Result<StatementKind, Diagnostic> {
        self.advance(); // verb
        let operand = self.parse_operand()?;
        self.expect_word(prep)?;
        let target = self.expect_ident()?;
        let giving = if self.eat_word("GIVING") {
            Some(self.expect_ident()?)
        } else {
            None
        };
        Ok(StatementKind::Arith {
            op,
            operand,
            target,
            giving,
        })
    }

    fn parse_divide(&mut self) -> Result<StatementKind, Diagnostic> {
        self.expect_word("DIVIDE")?;
        let operand = self.parse_operand()?;
        if self.eat_word("INTO") {
            let target = self.expect_ident()?;
            let giving = if self.eat_word("GIVING") {
                Some(self.expect_ident()?)
            } else {
                None
            };
            Ok(StatementKind::Arith {
                op: ArithVerb::Divide,
                operand,
                target,
                giving,
            })
        } else {
            // DIVIDE a BY b GIVING c  =>  c = a / b
            self.expect_word("BY")?;
            let divisor = self.expect_ident()?;
            self.expect_word("GIVING")?;
            let giving = self.expect_ident()?;
            Ok(StatementKind::Compute {
                dst: giving,
                expr: Expr::Div(Box::new(operand), Box::new(Expr::Var(divisor))),
            })
        }
    }

    fn parse_if(&mut self) -> Result<StatementKind, Diagnostic> {
        self.expect_word("IF")?;
        let cond = self.parse_cond()?;
        self.eat_word("THEN");
        let then_branch = self.parse_statements_until(&["ELSE", "END-IF"])?;
        let else_branch = if self.eat_word("ELSE") {
            self.parse_statements_until(&["END-IF"])?
        } else {
            Vec::new()
        };
        self.expect_word("END-IF")?;
        Ok(StatementKind::If {
            cond,
            then_branch,
            else_branch,
        })
    }

    fn parse_evaluate(&mut self) -> Result<StatementKind, Diagnostic> {
        self.expect_word("EVALUATE")?;
        let subject = if self.eat_word("TRUE") {
            EvaluateSubject::True
        } else {
            EvaluateSubject::Var(self.expect_ident()?)
        };
        let mut whens = Vec::new();
        let mut other = Vec::new();
        while self.check_word("WHEN") {
            self.advance();
            if self.eat_word("OTHER") {
                other = self.parse_statements_until(&["END-EVALUATE"])?;
                break;
            }
            let test = match subject {
                EvaluateSubject::True => WhenTest::Cond(self.parse_cond()?),
                EvaluateSubject::Var(_) => WhenTest::Value(self.parse_operand()?),
            };
            let body = self.parse_statements_until(&["WHEN", "END-EVALUATE"])?;
            whens.push(WhenArm { test, body });
        }
        self.expect_word("END-EVALUATE")?;
        if whens.is_empty() {
            return Err(self.syntax("at least one WHEN arm"));
        }
        Ok(StatementKind::Evaluate {
            subject,
            whens,
            other,
        })
    }

    fn parse_perform(&mut self) -> Result<StatementKind, Diagnostic> {
        self.expect_word("PERFORM")?;
        // PERFORM VARYING v FROM e BY e UNTIL c ... END-PERFORM
        if self.eat_word("VARYING") {
            let var = self.expect_ident()?;
            self.expect_word("FROM")?;
            let from = self.parse_operand()?;
            self.expect_word("BY")?;
            let by = self.parse_operand()?;
            self.expect_word("UNTIL")?;
            let until = self.parse_cond()?;
            let body = self.parse_statements_until(&["END-PERFORM"])?;
            self.expect_word("END-PERFORM")?;
            return Ok(StatementKind::PerformVarying {
                var,
                from,
                by,
                until,
                body,
            });
        }
        // PERFORM [WITH TEST BEFORE|AFTER] UNTIL c ... END-PERFORM
        let mut test_before = true;
        let mut saw_test = false;
        if self.eat_word("WITH") {
            self.expect_word("TEST")?;
            if self.eat_word("AFTER") {
                test_before = false;
            } else {
                self.expect_word("BEFORE")?;
            }
            saw_test = true;
        }
        if self.eat_word("UNTIL") {
            let cond = self.parse_cond()?;
            let body = self.parse_statements_until(&["END-PERFORM"])?;
            self.expect_word("END-PERFORM")?;
            return Ok(StatementKind::PerformUntil {
                cond,
                body,
                test_before,
            });
        }
        if saw_test {
            return Err(self.syntax("UNTIL"));
        }
        // PERFORM paragraph-name
        let name = self.expect_ident()?;
        Ok(StatementKind::PerformParagraph { name })
    }

    fn parse_call(&mut self) -> Result<StatementKind, Diagnostic> {
        self.expect_word("CALL")?;
        let name = match &self.current().kind {
            TokKind::StrLit(s) => {
                let s = s.clone();
                self.advance();
                s
            }
            _ => return Err(self.syntax("quoted program name")),
        };
        let mut using = Vec::new();
        if self.eat_word("USING") {
            using.push(self.expect_ident()?);
            loop {
                if matches!(self.current().kind, TokKind::Comma) {
                    self.advance();
                    using.push(self.expect_ident()?);
                } else if matches!(&self.current().kind, TokKind::Word(w)
                    if !VERBS.contains(&w.as_str()) && !is_clause_word(w))
                {
                    using.push(self.expect_ident()?);
                } else {
                    break;
                }
            }
        }
        Ok(StatementKind::Call { name, using })
    }

    fn parse_read(&mut self) -> Result<StatementKind, Diagnostic> {
        self.expect_word("READ")?;
        let file = self.expect_ident()?;
        self.expect_word("INTO")?;
        let record = self.expect_ident()?;
        Ok(StatementKind::Read { file, record })
    }

    fn parse_write(&mut self) -> Result<StatementKind, Diagnostic> {
        self.expect_word("WRITE")?;
        let record = self.expect_ident()?;
        Ok(StatementKind::Write { record })
    }

    fn parse_display(&mut self) -> Result<StatementKind, Diagnostic> {
        self.expect_word("DISPLAY")?;
        let mut args = vec![self.parse_operand()?];
        while matches!(
            self.current().kind,
            TokKind::StrLit(_) | TokKind::Number { .. }
        ) || matches!(&self.current().kind, TokKind::Word(w)
                if !VERBS.contains(&w.as_str()) && !is_clause_word(w))
        {
            args.push(self.parse_operand()?);
        }
        Ok(StatementKind::Display { args })
    }

    // ── EXEC blocks ────────────────────────────────────────────────────

    fn parse_exec(&mut self) -> Result<StatementKind, Diagnostic> {
        self.expect_word("EXEC")?;
        let system = self.expect_ident()?;
        if system == "SQL" {
            self.parse_exec_sql()
        } else {
            self.parse_exec_generic(system)
        }
    }

    fn parse_exec_sql(&mut self) -> Result<StatementKind, Diagnostic> {
        let start = self.pos;
        let verb = match self.expect_ident()?.as_str() {
            "SELECT" => SqlVerb::Select,
            "INSERT" => SqlVerb::Insert,
            "UPDATE" => SqlVerb::Update,
            "DELETE" => SqlVerb::Delete,
            other => {
                let t = self.tokens[self.pos - 1].clone();
                return Err(Diagnostic::syntax(t.line, t.col, "SQL verb", other));
            }
        };
        let mut stmt = SqlStatement {
            verb,
            table: String::new(),
            columns: Vec::new(),
            into_vars: Vec::new(),
            values: Vec::new(),
            set_pairs: Vec::new(),
            where_triples: Vec::new(),
            raw_text: String::new(),
        };
        match verb {
            SqlVerb::Select => {
                stmt.columns.push(self.expect_ident()?);
                while matches!(self.current().kind, TokKind::Comma) {
                    self.advance();
                    stmt.columns.push(self.expect_ident()?);
                }
                self.expect_word("INTO")?;
                stmt.into_vars.push(self.expect_host_var()?);
                while matches!(self.current().kind, TokKind::Comma) {
                    self.advance();
                    stmt.into_vars.push(self.expect_host_var()?);
                }
                self.expect_word("FROM")?;
                stmt.table = self.expect_ident()?;
                stmt.where_triples = self.parse_sql_where()?;
            }
            SqlVerb::Insert => {
                self.expect_word("INTO")?;
                stmt.table = self.expect_ident()?;
                if matches!(self.current().kind, TokKind::LParen)
                    && !self.lookahead_values_list()
                {
                    self.advance();
                    stmt.columns.push(self.expect_ident()?);
                    while matches!(self.current().kind, TokKind::Comma) {
                        self.advance();
                        stmt.columns.push(self.expect_ident()?);
                    }
                    if !matches!(self.current().kind, TokKind::RParen) {
                        return Err(self.syntax(")"));
                    }
                    self.advance();
                }
                self.expect_word("VALUES")?;
                if !matches!(self.current().kind, TokKind::LParen) {
                    return Err(self.syntax("("));
                }
                self.advance();
                stmt.values.push(self.parse_sql_arg()?);
                while matches!(self.current().kind, TokKind::Comma) {
                    self.advance();
                    stmt.values.push(self.parse_sql_arg()?);
                }
                if !matches!(self.current().kind, TokKind::RParen) {
                    return Err(self.syntax(")"));
                }
                self.advance();
            }
            SqlVerb::Update => {
                stmt.table = self.expect_ident()?;
                self.expect_word("SET")?;
                loop {
                    let col = self.expect_ident()?;
                    if !matches!(self.current().kind, TokKind::Eq) {
                        return Err(self.syntax("="));
                    }
                    self.advance();
                    let arg = self.parse_sql_arg()?;
                    stmt.set_pairs.push((col, arg));
                    if matches!(self.current().kind, TokKind::Comma) {
                        self.advance();
                    } else {
                        break;
                    }
                }
                stmt.where_triples = self.parse_sql_where()?;
            }
            SqlVerb::Delete => {
                self.expect_word("FROM")?;
                stmt.table = self.expect_ident()?;
                stmt.where_triples = self.parse_sql_where()?;
            }
        }
        let end = self.pos;
        self.expect_word("END-EXEC")?;
        stmt.raw_text = self.tokens[start..end]
            .iter()
            .map(|t| t.lexeme.clone())
            .collect::<Vec<_>>()
            .join(" ");
        Ok(StatementKind::ExecSql(stmt))
    }

    /// Distinguish `INSERT INTO t (col, ...) VALUES ...` from a bare
    /// `INSERT INTO t VALUES (...)` when sitting on `(`.
    fn lookahead_values_list(&self) -> bool {
        false // `(` directly after the table name is always a column list here
    }

    fn parse_sql_where(&mut self) -> Result<Vec<(String, CmpOp, SqlArg)>, Diagnostic> {
        let mut out = Vec::new();
        if self.eat_word("WHERE") {
            loop {
                let col = self.expect_ident()?;
                let op = match self.current().kind {
                    TokKind::Eq => CmpOp::Eq,
                    TokKind::NotEq => CmpOp::Ne,
                    TokKind::Gt => CmpOp::Gt,
                    TokKind::Lt => CmpOp::Lt,
                    TokKind::Ge => CmpOp::Ge,
                    TokKind::Le => CmpOp::Le,
                    _ => return Err(self.syntax("comparison operator")),
                };
                self.advance();
                let arg = self.parse_sql_arg()?;
                out.push((col, op, arg));
                if !self.eat_word("AND") {
                    break;
                }
            }
        }
        Ok(out)
    }

    fn parse_sql_arg(&mut self) -> Result<SqlArg, Diagnostic> {
        match &self.current().kind {
            TokKind::Colon => Ok(SqlArg::Host(self.expect_host_var()?)),
            TokKind::StrLit(s) => {
                let s = s.clone();
                self.advance();
                Ok(SqlArg::Lit(s))
            }
            TokKind::Number { .. } => {
                let lex = self.advance().lexeme;
                Ok(SqlArg::Lit(lex))
            }
            _ => Err(self.syntax("host variable or literal")),
        }
    }

    fn expect_host_var(&mut self) -> Result<String, Diagnostic> {
        if !matches!(self.current().kind, TokKind::Colon) {
            return Err(self.syntax(": host variable"));
        }
        self.advance();
        self.expect_ident()
    }

    fn parse_exec_generic(&mut self, system: String) -> Result<StatementKind, Diagnostic> {
        let verb = self.expect_ident()?;
        let mut options = Vec::new();
        while !self.check_word("END-EXEC") {
            if self.at_eof() {
                return Err(self.syntax("END-EXEC"));
            }
            let name = self.expect_ident()?;
            if !matches!(self.current().kind, TokKind::LParen) {
                return Err(self.syntax("("));
            }
            self.advance();
            let value = match &self.current().kind {
                TokKind::StrLit(s) => {
                    let s = s.clone();
                    self.advance();
                    GenericArg::Lit(s)
                }
                TokKind::Number { .. } => {
                    let lex = self.advance().lexeme;
                    GenericArg::Lit(lex)
                }
                TokKind::Colon => {
                    self.advance();
                    GenericArg::Var(self.expect_ident()?)
                }
                TokKind::Word(_) => GenericArg::Var(self.expect_ident()?),
                _ => return Err(self.syntax("option value")),
            };
            if !matches!(self.current().kind, TokKind::RParen) {
                return Err(self.syntax(")"));
            }
            self.advance();
            options.push(GenericOption { name, value });
        }
        self.expect_word("END-EXEC")?;
        Ok(StatementKind::ExecGeneric {
            system,
            verb,
            options,
        })
    }

    // ── Conditions and expressions ─────────────────────────────────────

    fn parse_cond(&mut self) -> Result<Cond, Diagnostic> {
        let mut lhs = self.parse_cond_and()?;
        while self.eat_word("OR") {
            let rhs = self.parse_cond_and()?;
            lhs = Cond::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn parse_cond_and(&mut self) -> Result<Cond, Diagnostic> {
        let mut lhs = self.parse_cond_not()?;
        while self.eat_word("AND") {
            let rhs = self.parse_cond_not()?;
            lhs = Cond::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn parse_cond_not(&mut self) -> Result<Cond, Diagnostic> {
        if self.eat_word("NOT") {
            // NOT (cond) or NOT applied to a comparison
            let inner = self.parse_cond_not()?;
            return Ok(Cond::Not(Box::new(inner)));
        }
        self.parse_comparison()
    }

    fn parse_comparison(&mut self) -> Result<Cond, Diagnostic> {
        // Parenthesized sub-condition: `(` followed eventually by a
        // comparison operator inside; we try a simple backtrack.
        if matches!(self.current().kind, TokKind::LParen) {
            let save = self.pos;
            self.advance();
            if let Ok(cond) = self.parse_cond() {
                if matches!(self.current().kind, TokKind::RParen) {
                    self.advance();
                    return Ok(cond);
                }
            }
            self.pos = save;
        }
        let lhs = self.parse_expr()?;
        let negated = self.eat_word("NOT");
        let op = match self.current().kind {
            TokKind::Eq => CmpOp::Eq,
            TokKind::NotEq => CmpOp::Ne,
            TokKind::Gt => CmpOp::Gt,
            TokKind::Lt => CmpOp::Lt,
            TokKind::Ge => CmpOp::Ge,
            TokKind::Le => CmpOp::Le,
            _ => return Err(self.syntax("comparison operator")),
        };
        self.advance();
        let rhs = self.parse_expr()?;
        let op = if negated { op.negate() } else { op };
        Ok(Cond::Cmp { op, lhs, rhs })
    }

    fn parse_expr(&mut self) -> Result<Expr, Diagnostic> {
        let mut lhs = self.parse_term()?;
        loop {
            match self.current().kind {
                TokKind::Plus => {
                    self.advance();
                    let rhs = self.parse_term()?;
                    lhs = Expr::Add(Box::new(lhs), Box::new(rhs));
                }
                TokKind::Minus => {
                    self.advance();
                    let rhs = self.parse_term()?;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn parse_term(&mut self) -> Result<Expr, Diagnostic> {
        let mut lhs = self.parse_factor()?;
        loop {
            match self.current().kind {
                TokKind::Star => {
                    self.advance();
                    let rhs = self.parse_factor()?;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(rhs));
                }
                TokKind::Slash => {
                    self.advance();
                    let rhs = self.parse_factor()?;
                    lhs = Expr::Div(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn parse_factor(&mut self) -> Result<Expr, Diagnostic> {
        match &self.current().kind {
            TokKind::Minus => {
                self.advance();
                let inner = self.parse_factor()?;
                Ok(Expr::Neg(Box::new(inner)))
            }
            TokKind::LParen => {
                self.advance();
                let e = self.parse_expr()?;
                if !matches!(self.current().kind, TokKind::RParen) {
                    return Err(self.syntax(")"));
                }
                self.advance();
                Ok(e)
            }
            _ => self.parse_operand(),
        }
    }

    fn parse_operand(&mut self) -> Result<Expr, Diagnostic> {
        match &self.current().kind {
            TokKind::Word(w) => match w.as_str() {
                "SPACE" | "SPACES" => {
                    self.advance();
                    Ok(Expr::StrLit(" ".to_string()))
                }
                "ZERO" | "ZEROS" | "ZEROES" => {
                    self.advance();
                    Ok(Expr::num(0))
                }
                _ => Ok(Expr::Var(self.expect_ident()?)),
            },
            TokKind::Number { raw, scale } => {
                let e = Expr::NumLit {
                    raw: *raw,
                    scale: *scale,
                };
                self.advance();
                Ok(e)
            }
            TokKind::StrLit(s) => {
                let e = Expr::StrLit(s.clone());
                self.advance();
                Ok(e)
            }
            TokKind::Minus => {
                self.advance();
                match &self.current().kind {
                    TokKind::Number { raw, scale } => {
                        let e = Expr::NumLit {
                            raw: -raw,
                            scale: *scale,
                        };
                        self.advance();
                        Ok(e)
                    }
                    _ => Err(self.syntax("numeric literal after -")),
                }
            }
            _ => Err(self.syntax("operand")),
        }
    }
}

fn is_clause_word(w: &str) -> bool {
    matches!(
        w,
        "TO" | "FROM"
            | "BY"
            | "INTO"
            | "GIVING"
            | "UNTIL"
            | "VARYING"
            | "THEN"
            | "ELSE"
            | "END-IF"
            | "END-PERFORM"
            | "END-EVALUATE"
            | "END-EXEC"
            | "WHEN"
            | "OTHER"
            | "USING"
            | "AND"
            | "OR"
            | "NOT"
            | "WITH"
            | "TEST"
            | "BEFORE"
            | "AFTER"
            | "RUN"
    )
}

/// Nest a flat declaration list by level numbers.
fn build_hierarchy(
    flat: Vec<DataItem>,
    _diags: &mut [Diagnostic],
) -> Result<Vec<DataItem>, Diagnostic> {
    let mut top: Vec<DataItem> = Vec::new();
    let mut stack: Vec<DataItem> = Vec::new();

    fn close_into(stack: &mut Vec<DataItem>, top: &mut Vec<DataItem>, level: u8) {
        while let Some(last) = stack.last() {
            if last.level >= level {
                let done = stack.pop().unwrap();
                if let Some(parent) = stack.last_mut() {
                    parent.children.push(done);
                } else {
                    top.push(done);
                }
            } else {
                break;
            }
        }
    }

    for item in flat {
        if item.level == 77 || item.level == 1 {
            close_into(&mut stack, &mut top, 1);
        } else {
            close_into(&mut stack, &mut top, item.level);
            if stack.is_empty() {
                return Err(Diagnostic::syntax(
                    item.line,
                    1,
                    "01-level group above this item",
                    &format!("{:02} {}", item.level, item.name),
                ));
            }
        }
        stack.push(item);
    }
    close_into(&mut stack, &mut top, 1);

    // leaf <=> pic present
    fn check(items: &[DataItem]) -> Result<(), Diagnostic> {
        for i in items {
            if i.pic.is_none() && i.children.is_empty() {
                return Err(Diagnostic::syntax(
                    i.line,
                    1,
                    "PIC clause or subordinate items",
                    &i.name,
                ));
            }
            if i.pic.is_some() && !i.children.is_empty() {
                return Err(Diagnostic::syntax(
                    i.line,
                    1,
                    "group item without PIC",
                    &i.name,
                ));
            }
            check(&i.children)?;
        }
        Ok(())
    }
    check(&top)?;
    Ok(top)
}

/// Parse source text into an unresolved AST. Used by `parse_program` in the
/// module root, which adds name resolution.
pub fn parse_source(source: &str) -> Result<ProgramAst, Vec<Diagnostic>> {
    let tokens = lex(source).map_err(|d| vec![d])?;
    let mut parser = Parser::new(tokens);
    match parser.parse_program() {
        Ok(ast) => {
            if parser.diags.is_empty() {
                Ok(ast)
            } else {
                Err(parser.diags)
            }
        }
        Err(d) => {
            let mut diags = parser.diags;
            diags.push(d);
            Err(diags)
        }
    }
}
