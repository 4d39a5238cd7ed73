//! Shared helpers for the integration and acceptance suites.
#![allow(dead_code)] // each test target uses its own slice of this module

use cobval::frontend::ast::*;
use cobval::value::PicType;
use std::path::PathBuf;

/// (fixture directory, paragraph under test) for the whole corpus.
pub const FIXTURES: &[(&str, &str)] = &[
    ("chann11", "FIRST-SENTENCE"),
    ("lgacdb01", "INSERT-CUSTOMER"),
    ("icscudat", "BEGIN"),
    ("icdbghnp", "GET-CUSTACC2"),
    ("icdbgnp", "GET-CUSTACC2"),
    ("iclogout", "LOGOUT"),
    ("lgapdb01", "INSERT-POLICY"),
    ("lgipvs01", "FIRST-SENTENCE"),
    ("icdbgacc", "FETCH-ACCOUNT-LIST"),
];

pub fn fixture_dir(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

pub fn fixture_source(name: &str) -> String {
    std::fs::read_to_string(fixture_dir(name).join("program.cbl")).expect("fixture source")
}

/// Deterministic pseudo-random generator mirroring the library's, kept
/// separate so test inputs do not depend on library internals.
pub struct TestRng(u64);

impl TestRng {
    pub fn new(seed: u64) -> TestRng {
        TestRng(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n.max(1)
    }

    pub fn pick<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[self.below(items.len() as u64) as usize]
    }
}

/// Generate a small well-formed program: a few numeric and string items,
/// straight-line arithmetic, nested IFs, an optional counted loop, and an
/// optional SQL fetch whose status drives a branch. Everything stays within
/// the linear fragment the path condition supports.
pub fn random_program(seed: u64) -> ProgramAst {
    let mut rng = TestRng::new(seed);

    let num_vars = 2 + rng.below(3) as usize;
    let str_vars = 1 + rng.below(2) as usize;
    let mut items = Vec::new();
    let mut num_names = Vec::new();
    let mut str_names = Vec::new();
    for i in 0..num_vars {
        let name = format!("WS-N{i}");
        let digits = 1 + rng.below(3) as u32;
        items.push(DataItem {
            name: name.clone(),
            level: 1,
            pic: Some(PicType::Numeric {
                signed: false,
                int_digits: digits,
                frac_digits: 0,
            }),
            children: vec![],
            line: 0,
        });
        num_names.push(name);
    }
    for i in 0..str_vars {
        let name = format!("WS-S{i}");
        items.push(DataItem {
            name: name.clone(),
            level: 1,
            pic: Some(PicType::Alphanumeric {
                length: 1 + rng.below(2) as u32,
            }),
            children: vec![],
            line: 0,
        });
        str_names.push(name);
    }

    fn num_operand(rng: &mut TestRng, nums: &[String]) -> Expr {
        if rng.below(2) == 0 {
            Expr::num(rng.below(9) as i128)
        } else {
            Expr::Var(rng.pick(nums).clone())
        }
    }

    fn simple_cond(rng: &mut TestRng, nums: &[String], strs: &[String]) -> Cond {
        let op = *rng.pick(&[CmpOp::Eq, CmpOp::Ne, CmpOp::Gt, CmpOp::Lt, CmpOp::Ge, CmpOp::Le]);
        if !strs.is_empty() && rng.below(3) == 0 {
            let letter = char::from(b'A' + rng.below(4) as u8);
            Cond::Cmp {
                op,
                lhs: Expr::Var(rng.pick(strs).clone()),
                rhs: Expr::StrLit(letter.to_string()),
            }
        } else {
            Cond::Cmp {
                op,
                lhs: Expr::Var(rng.pick(nums).clone()),
                rhs: num_operand(rng, nums),
            }
        }
    }

    fn statements(
        rng: &mut TestRng,
        nums: &[String],
        strs: &[String],
        depth: u32,
        budget: &mut u32,
    ) -> Vec<Statement> {
        let mut out = Vec::new();
        if nums.is_empty() {
            out.push(Statement {
                kind: StatementKind::Continue,
                line: 0,
            });
            return out;
        }
        // loops reserve their control variable, so nesting needs spares
        let can_nest = depth < 2;
        let can_loop = can_nest && nums.len() >= 2;
        let count = 1 + rng.below(3);
        for _ in 0..count {
            if *budget == 0 {
                break;
            }
            *budget -= 1;
            let choices = if can_loop {
                6
            } else if can_nest {
                5
            } else {
                4
            };
            let kind = match rng.below(choices) {
                0 => StatementKind::Move {
                    src: num_operand(rng, nums),
                    dsts: vec![rng.pick(nums).clone()],
                },
                1 => StatementKind::Arith {
                    op: *rng.pick(&[ArithVerb::Add, ArithVerb::Subtract]),
                    operand: num_operand(rng, nums),
                    target: rng.pick(nums).clone(),
                    giving: None,
                },
                2 => StatementKind::Compute {
                    dst: rng.pick(nums).clone(),
                    expr: Expr::Add(
                        Box::new(num_operand(rng, nums)),
                        Box::new(Expr::Mul(
                            Box::new(Expr::num(1 + rng.below(3) as i128)),
                            Box::new(num_operand(rng, nums)),
                        )),
                    ),
                },
                3 => StatementKind::Move {
                    src: Expr::StrLit(char::from(b'A' + rng.below(4) as u8).to_string()),
                    dsts: vec![rng.pick(strs).clone()],
                },
                4 => StatementKind::If {
                    cond: simple_cond(rng, nums, strs),
                    then_branch: statements(rng, nums, strs, depth + 1, budget),
                    else_branch: if rng.below(2) == 0 {
                        statements(rng, nums, strs, depth + 1, budget)
                    } else {
                        vec![]
                    },
                },
                _ => StatementKind::PerformVarying {
                    var: nums[0].clone(),
                    from: Expr::num(1),
                    by: Expr::num(1),
                    until: Cond::Cmp {
                        op: CmpOp::Gt,
                        lhs: Expr::Var(nums[0].clone()),
                        rhs: Expr::num(1 + rng.below(2) as i128),
                    },
                    body: statements(rng, &nums[1..], strs, depth + 1, budget),
                },
            };
            out.push(Statement { kind, line: 0 });
        }
        if out.is_empty() {
            out.push(Statement {
                kind: StatementKind::Continue,
                line: 0,
            });
        }
        out
    }

    let mut budget = 14u32;
    let mut body = statements(&mut rng, &num_names, &str_names, 0, &mut budget);

    // sometimes prepend a resource fetch whose status drives a branch
    if rng.below(2) == 0 {
        let sql = StatementKind::ExecSql(SqlStatement {
            verb: SqlVerb::Select,
            table: "T1".to_string(),
            columns: vec!["C1".to_string()],
            into_vars: vec![num_names[0].clone()],
            values: vec![],
            set_pairs: vec![],
            where_triples: vec![(
                "K1".to_string(),
                CmpOp::Eq,
                SqlArg::Host(num_names[num_names.len() - 1].clone()),
            )],
            raw_text: String::new(),
        });
        let check = StatementKind::If {
            cond: Cond::Cmp {
                op: CmpOp::Eq,
                lhs: Expr::var("SQLCODE"),
                rhs: Expr::num(0),
            },
            then_branch: vec![Statement {
                kind: StatementKind::Move {
                    src: Expr::StrLit("Y".to_string()),
                    dsts: vec![str_names[0].clone()],
                },
                line: 0,
            }],
            else_branch: vec![],
        };
        body.insert(0, Statement { kind: check, line: 0 });
        body.insert(0, Statement { kind: sql, line: 0 });
    }

    body.push(Statement {
        kind: StatementKind::StopRun,
        line: 0,
    });

    ProgramAst {
        program_id: format!("RAND{}", seed % 10_000),
        working_storage: items,
        paragraphs: vec![Paragraph {
            name: "MAIN-PARA".to_string(),
            statements: body,
            line: 0,
        }],
    }
}
