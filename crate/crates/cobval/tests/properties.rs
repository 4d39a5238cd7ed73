//! Property tests: parser round-trips, lowering preserves semantics against
//! an AST-walking reference evaluator, and solver witnesses always check.

mod common;

use cobval::frontend::ast::*;
use cobval::frontend::{parse_program, print_program};
use cobval::ir::eval::{compare as eval_compare, eval_cond, eval_expr, store as store_back, Evaluated};
use cobval::ir::lower;
use cobval::runner::{run, MockScript, RunConfig};
use cobval::solver::{check, solve, SolveOutcome, SolverConfig};
use cobval::value::{format_value, PicType, Value};
use common::{random_program, TestRng};
use proptest::prelude::*;
use std::collections::BTreeMap;

fn strip_positions(mut ast: ProgramAst) -> ProgramAst {
    fn sl(s: &mut Statement) {
        s.line = 0;
        match &mut s.kind {
            StatementKind::If {
                then_branch,
                else_branch,
                ..
            } => {
                then_branch.iter_mut().for_each(sl);
                else_branch.iter_mut().for_each(sl);
            }
            StatementKind::Evaluate { whens, other, .. } => {
                whens
                    .iter_mut()
                    .for_each(|w| w.body.iter_mut().for_each(sl));
                other.iter_mut().for_each(sl);
            }
            StatementKind::PerformUntil { body, .. }
            | StatementKind::PerformVarying { body, .. } => body.iter_mut().for_each(sl),
            StatementKind::ExecSql(sql) => sql.raw_text.clear(),
            _ => {}
        }
    }
    fn di(item: &mut DataItem) {
        item.line = 0;
        item.children.iter_mut().for_each(di);
    }
    ast.working_storage.iter_mut().for_each(di);
    for p in &mut ast.paragraphs {
        p.line = 0;
        p.statements.iter_mut().for_each(sl);
    }
    ast
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Pretty-printing and re-parsing yields a structurally equal AST.
    #[test]
    fn print_parse_round_trip(seed in any::<u64>()) {
        let ast = random_program(seed);
        let printed = print_program(&ast);
        let reparsed = parse_program(&printed).unwrap_or_else(|d| {
            panic!("re-parse failed: {d:?}\n{printed}")
        });
        prop_assert_eq!(strip_positions(ast), strip_positions(reparsed));
    }

    /// solve() witnesses always satisfy check(); mirrors the acceptance
    /// criterion at property-test scale with proptest shrinking.
    #[test]
    fn solver_witnesses_check(seed in any::<u64>()) {
        let mut rng = TestRng::new(seed);
        let cs = common_cs(&mut rng);
        if let SolveOutcome::Sat(a) = solve(&cs, &SolverConfig::default()).unwrap() {
            prop_assert_eq!(check(&a, &cs), Ok(true));
        }
    }
}

fn common_cs(rng: &mut TestRng) -> cobval::solver::ConstraintSet {
    use cobval::solver::{Atom, AtomOp, Clause, ConstraintSet, Domain, Sym};
    let mut cs = ConstraintSet::default();
    let n = 1 + rng.below(3);
    let mut syms = Vec::new();
    for i in 0..n {
        let sym = Sym::prog(&format!("V{i}"));
        cs.domains.insert(
            sym.clone(),
            Domain::Num {
                lo: -(rng.below(100) as i128),
                hi: rng.below(1000) as i128,
                scale: 0,
            },
        );
        syms.push(sym);
    }
    for _ in 0..1 + rng.below(3) {
        let mut atoms = Vec::new();
        for _ in 0..1 + rng.below(2) {
            let a = syms[rng.below(syms.len() as u64) as usize].clone();
            let b = syms[rng.below(syms.len() as u64) as usize].clone();
            let op = match rng.below(4) {
                0 => AtomOp::Le,
                1 => AtomOp::Ge,
                2 => AtomOp::Eq,
                _ => AtomOp::Ne,
            };
            atoms.push(Atom::new(
                vec![(a, 1), (b, -1)],
                rng.below(20) as i128 - 10,
                op,
            ));
        }
        cs.clauses.push(Clause { any_of: atoms });
    }
    cs
}

// ── Reference evaluator: direct AST interpretation ──────────────────────

struct Stop;

struct AstEval<'a> {
    ast: &'a ProgramAst,
    pics: BTreeMap<String, PicType>,
    store: BTreeMap<String, Value>,
}

impl<'a> AstEval<'a> {
    fn lookup(&self, name: &str) -> Option<Evaluated> {
        self.store
            .get(name)
            .map(|v| Evaluated::from_value(v, &self.pics[name]))
    }

    fn assign(&mut self, dst: &str, ev: Evaluated) {
        let v = store_back(&ev, &self.pics[dst]).expect("category-correct");
        self.store.insert(dst.to_string(), v);
    }

    fn eval(&self, e: &Expr) -> Evaluated {
        let lookup = |n: &str| self.lookup(n);
        eval_expr(e, &lookup).expect("no traps").expect("constant")
    }

    fn truth(&self, c: &Cond) -> bool {
        let lookup = |n: &str| self.lookup(n);
        eval_cond(c, &lookup).expect("no traps").expect("constant")
    }

    fn exec(&mut self, stmts: &[Statement]) -> Result<(), Stop> {
        for s in stmts {
            match &s.kind {
                StatementKind::Move { src, dsts } => {
                    for d in dsts {
                        let ev = self.eval(src);
                        self.assign(d, ev);
                    }
                }
                StatementKind::Compute { dst, expr } => {
                    let ev = self.eval(expr);
                    self.assign(dst, ev);
                }
                StatementKind::Arith {
                    op,
                    operand,
                    target,
                    giving,
                } => {
                    let t = Expr::Var(target.clone());
                    let expr = match op {
                        ArithVerb::Add => Expr::Add(Box::new(t), Box::new(operand.clone())),
                        ArithVerb::Subtract => Expr::Sub(Box::new(t), Box::new(operand.clone())),
                        ArithVerb::Multiply => Expr::Mul(Box::new(t), Box::new(operand.clone())),
                        ArithVerb::Divide => Expr::Div(Box::new(t), Box::new(operand.clone())),
                    };
                    let ev = self.eval(&expr);
                    let dst = giving.as_deref().unwrap_or(target).to_string();
                    self.assign(&dst, ev);
                }
                StatementKind::If {
                    cond,
                    then_branch,
                    else_branch,
                } => {
                    if self.truth(cond) {
                        self.exec(then_branch)?;
                    } else {
                        self.exec(else_branch)?;
                    }
                }
                StatementKind::Evaluate {
                    subject,
                    whens,
                    other,
                } => {
                    let mut taken = false;
                    for arm in whens {
                        let hit = match (&arm.test, subject) {
                            (WhenTest::Cond(c), _) => self.truth(c),
                            (WhenTest::Value(v), EvaluateSubject::Var(s)) => {
                                let l = self.lookup(s).unwrap();
                                let r = self.eval(v);
                                eval_compare(CmpOp::Eq, &l, &r).unwrap()
                            }
                            _ => unreachable!(),
                        };
                        if hit {
                            self.exec(&arm.body)?;
                            taken = true;
                            break;
                        }
                    }
                    if !taken {
                        self.exec(other)?;
                    }
                }
                StatementKind::PerformParagraph { name } => {
                    let para = self.ast.paragraph(name).expect("target exists");
                    let stmts = para.statements.clone();
                    self.exec(&stmts)?;
                }
                StatementKind::PerformUntil {
                    cond,
                    body,
                    test_before,
                } => {
                    if !test_before {
                        self.exec(body)?;
                    }
                    let mut guard = 0;
                    while !self.truth(cond) {
                        self.exec(body)?;
                        guard += 1;
                        assert!(guard < 100_000, "runaway reference loop");
                    }
                }
                StatementKind::PerformVarying {
                    var,
                    from,
                    by,
                    until,
                    body,
                } => {
                    let ev = self.eval(from);
                    self.assign(var, ev);
                    let mut guard = 0;
                    while !self.truth(until) {
                        self.exec(body)?;
                        let next = self.eval(&Expr::Add(
                            Box::new(Expr::Var(var.clone())),
                            Box::new(by.clone()),
                        ));
                        self.assign(var, next);
                        guard += 1;
                        assert!(guard < 100_000, "runaway reference loop");
                    }
                }
                StatementKind::Display { .. } | StatementKind::Continue => {}
                StatementKind::StopRun => return Err(Stop),
                StatementKind::ExecSql(_)
                | StatementKind::ExecGeneric { .. }
                | StatementKind::Call { .. }
                | StatementKind::Read { .. }
                | StatementKind::Write { .. } => {
                    panic!("reference evaluator only handles resource-free programs")
                }
            }
        }
        Ok(())
    }
}

fn has_resource(stmts: &[Statement]) -> bool {
    stmts.iter().any(|s| match &s.kind {
        StatementKind::ExecSql(_)
        | StatementKind::ExecGeneric { .. }
        | StatementKind::Call { .. }
        | StatementKind::Read { .. }
        | StatementKind::Write { .. } => true,
        StatementKind::If {
            then_branch,
            else_branch,
            ..
        } => has_resource(then_branch) || has_resource(else_branch),
        StatementKind::Evaluate { whens, other, .. } => {
            whens.iter().any(|w| has_resource(&w.body)) || has_resource(other)
        }
        StatementKind::PerformUntil { body, .. }
        | StatementKind::PerformVarying { body, .. } => has_resource(body),
        _ => false,
    })
}

fn random_value(rng: &mut TestRng, pic: &PicType) -> Value {
    match pic {
        PicType::Numeric { .. } => {
            let (lo, hi) = (pic.min_scaled(), pic.max_scaled());
            Value::Num(lo + rng.below((hi - lo + 1) as u64) as i128)
        }
        PicType::Alphanumeric { length } => {
            let s: String = (0..*length)
                .map(|_| char::from(0x41 + rng.below(26) as u8))
                .collect();
            Value::Str(s)
        }
    }
}

/// Lowering preserves semantics: the CFG interpreter and a direct AST walk
/// agree on the final values of every output variable.
#[test]
fn lowering_preserves_semantics_on_random_programs() {
    let mut checked = 0;
    for seed in 0..300u64 {
        let ast = random_program(seed);
        if ast.paragraphs.iter().any(|p| has_resource(&p.statements)) {
            continue;
        }
        let ir = lower(&ast).unwrap();
        let (inputs, outputs) = cobval::list_io_variables(&ast, "MAIN-PARA").unwrap();

        let mut rng = TestRng::new(seed ^ 0xabcd);
        let mut pics = BTreeMap::new();
        for leaf in ast.leaf_items() {
            pics.insert(leaf.name.clone(), leaf.pic.clone().unwrap());
        }
        let mut store: BTreeMap<String, Value> = pics
            .iter()
            .map(|(n, p)| (n.clone(), p.default_value()))
            .collect();
        let mut input_text = BTreeMap::new();
        for name in &inputs {
            let v = random_value(&mut rng, &pics[name]);
            input_text.insert(name.clone(), format_value(&v, &pics[name]));
            store.insert(name.clone(), v);
        }

        let mut reference = AstEval {
            ast: &ast,
            pics: pics.clone(),
            store,
        };
        let stmts = ast.paragraphs[0].statements.clone();
        let _ = reference.exec(&stmts);

        let record = run(
            &ir,
            "MAIN-PARA",
            &input_text,
            &mut MockScript::default(),
            &RunConfig::default(),
        );
        assert_eq!(
            record.status,
            cobval::runner::RunStatus::Completed,
            "seed {seed}"
        );
        for var in &outputs {
            let expected = format_value(&reference.store[var], &pics[var]);
            assert_eq!(
                record.program_outputs[var], expected,
                "seed {seed}: {var} diverges between AST walk and IR run"
            );
        }
        checked += 1;
    }
    assert!(checked >= 100, "only {checked} resource-free programs checked");
}
