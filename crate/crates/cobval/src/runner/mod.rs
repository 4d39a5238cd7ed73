//! In-process oracle execution with mocked resources.
//!
//! Executes the IR concretely. At every external call the interpreter first
//! snapshots the values the program is sending to the resource (the resource
//! output event), then pops the call's mock queue and writes those values
//! into the resource-input variables, stepping over the call body entirely.
//! Execution touches no file, network, or environment: resource effects
//! exist only as recorded events.

use crate::ir::eval::{eval_cond, eval_expr, store as store_back, Evaluated};
use crate::ir::{io_variables, EdgeRef, IrOp, IrProgram};
use crate::testgen::{PathTrace, ResourceValues, TestCase, TestStatus, TestSuite};
use crate::value::{format_value, parse_value, Value};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, VecDeque};

/// FIFO of mock values per call id. Occurrences consume entries in order.
#[derive(Clone, Debug, Default)]
pub struct MockScript {
    pub queues: BTreeMap<usize, VecDeque<BTreeMap<String, String>>>,
}

impl MockScript {
    pub fn from_test_case(tc: &TestCase) -> MockScript {
        let mut queues: BTreeMap<usize, VecDeque<BTreeMap<String, String>>> = BTreeMap::new();
        // resource_inputs are in execution order, which per call id is
        // occurrence order
        for rv in &tc.resource_inputs {
            queues
                .entry(rv.call_id)
                .or_default()
                .push_back(rv.values.clone());
        }
        MockScript { queues }
    }

    fn pop(&mut self, call_id: usize) -> Option<BTreeMap<String, String>> {
        self.queues.get_mut(&call_id).and_then(|q| q.pop_front())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", tag = "kind", content = "reason")]
pub enum RunStatus {
    Completed,
    Trap(String),
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ExecutionRecord {
    pub program_outputs: BTreeMap<String, String>,
    pub resource_output_events: Vec<ResourceValues>,
    pub display_lines: Vec<String>,
    pub executed_path: PathTrace,
    pub status: RunStatus,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub step_limit: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            step_limit: 1_000_000,
        }
    }
}

/// Execute one paragraph with the given program inputs and mock script.
/// Inputs not supplied default to zero/spaces.
pub fn run(
    ir: &IrProgram,
    paragraph: &str,
    program_inputs: &BTreeMap<String, String>,
    mocks: &mut MockScript,
    config: &RunConfig,
) -> ExecutionRecord {
    let mut record = ExecutionRecord {
        program_outputs: BTreeMap::new(),
        resource_output_events: Vec::new(),
        display_lines: Vec::new(),
        executed_path: PathTrace {
            node_ids: Vec::new(),
            branch_decisions: Vec::new(),
            loop_iterations: BTreeMap::new(),
        },
        status: RunStatus::Completed,
    };
    let cfg = match ir.cfg(paragraph) {
        Ok(c) => c,
        Err(e) => {
            record.status = RunStatus::Trap(e.to_string());
            return record;
        }
    };
    let outputs = match io_variables(ir, paragraph) {
        Ok((_, o)) => o,
        Err(e) => {
            record.status = RunStatus::Trap(e.to_string());
            return record;
        }
    };

    let mut store: BTreeMap<String, Value> = BTreeMap::new();
    for (name, pic) in &ir.var_table {
        store.insert(name.clone(), pic.default_value());
    }
    for (name, text) in program_inputs {
        let Some(pic) = ir.pic(name) else {
            record.status = RunStatus::Trap(format!("unknown input variable {name}"));
            return record;
        };
        match parse_value(text, pic) {
            Ok(v) => {
                store.insert(name.clone(), v);
            }
            Err(e) => {
                record.status = RunStatus::Trap(e.to_string());
                return record;
            }
        }
    }

    let mut occurrences: BTreeMap<usize, usize> = BTreeMap::new();
    let mut loop_counts: BTreeMap<usize, u32> = BTreeMap::new();
    let mut node = cfg.entry;
    let mut steps = 0u64;
    loop {
        steps += 1;
        if steps > config.step_limit {
            record.status = RunStatus::Trap(format!(
                "infinite loop trap after {} steps",
                config.step_limit
            ));
            return record;
        }
        record.executed_path.node_ids.push(node);
        let lookup = |name: &str| -> Option<Evaluated> {
            store
                .get(name)
                .and_then(|v| ir.pic(name).map(|pic| Evaluated::from_value(v, pic)))
        };
        match &cfg.nodes[node].op {
            IrOp::Halt => {
                for var in &outputs {
                    let pic = ir.pic(var).expect("declared variable");
                    record
                        .program_outputs
                        .insert(var.clone(), format_value(&store[var], pic));
                }
                record.executed_path.loop_iterations = loop_counts;
                return record;
            }
            IrOp::Jump { next } => node = *next,
            IrOp::Emit { args, next } => {
                let mut parts = Vec::new();
                for a in args {
                    match eval_expr(a, &lookup) {
                        Ok(Some(Evaluated::Str(s))) => parts.push(s),
                        Ok(Some(Evaluated::Num { raw, scale })) => {
                            parts.push(render_num(raw, scale))
                        }
                        Ok(None) => parts.push("?".to_string()),
                        Err(e) => {
                            record.status = RunStatus::Trap(e.to_string());
                            return record;
                        }
                    }
                }
                record.display_lines.push(parts.join(""));
                node = *next;
            }
            IrOp::Assign { dst, expr, next } => {
                let next = *next;
                let outcome = eval_expr(expr, &lookup);
                match outcome {
                    Ok(Some(ev)) => {
                        let pic = ir.pic(dst).expect("declared variable");
                        match store_back(&ev, pic) {
                            Ok(v) => {
                                store.insert(dst.clone(), v);
                            }
                            Err(e) => {
                                record.status = RunStatus::Trap(e.to_string());
                                return record;
                            }
                        }
                    }
                    Ok(None) => {
                        record.status =
                            RunStatus::Trap(format!("uninitialized read assigning {dst}"));
                        return record;
                    }
                    Err(e) => {
                        record.status = RunStatus::Trap(e.to_string());
                        return record;
                    }
                }
                node = next;
            }
            IrOp::Call { call_id, next } => {
                let next = *next;
                let occ = occurrences.entry(*call_id).or_insert(0);
                *occ += 1;
                let occurrence = *occ;
                let call = ir.call(*call_id);
                // 1) snapshot what the program sends to the resource
                let mut sent = BTreeMap::new();
                for var in &call.resource_outputs {
                    let pic = ir.pic(var).expect("declared variable");
                    sent.insert(var.clone(), format_value(&store[var], pic));
                }
                record.resource_output_events.push(ResourceValues {
                    call_id: *call_id,
                    occurrence,
                    values: sent,
                });
                // 2) inject the mocked resource inputs; the call body itself
                //    is stepped over
                let Some(values) = mocks.pop(*call_id) else {
                    record.status = RunStatus::Trap(format!(
                        "mock underflow at call {call_id} occurrence {occurrence}"
                    ));
                    return record;
                };
                for var in &call.resource_inputs {
                    let Some(text) = values.get(var) else {
                        record.status = RunStatus::Trap(format!(
                            "mock underflow at call {call_id} occurrence {occurrence}: no value for {var}"
                        ));
                        return record;
                    };
                    let pic = ir.pic(var).expect("declared variable");
                    match parse_value(text, pic) {
                        Ok(v) => {
                            store.insert(var.clone(), v);
                        }
                        Err(e) => {
                            record.status = RunStatus::Trap(e.to_string());
                            return record;
                        }
                    }
                }
                node = next;
            }
            IrOp::Branch {
                cond,
                true_to,
                false_to,
                loop_id,
            } => {
                let arm = match eval_cond(cond, &lookup) {
                    Ok(Some(b)) => b,
                    Ok(None) => {
                        record.status =
                            RunStatus::Trap("branch on uninitialized value".to_string());
                        return record;
                    }
                    Err(e) => {
                        record.status = RunStatus::Trap(e.to_string());
                        return record;
                    }
                };
                record
                    .executed_path
                    .branch_decisions
                    .push(EdgeRef { node, arm });
                if !arm {
                    if let Some(l) = loop_id {
                        *loop_counts.entry(*l).or_insert(0) += 1;
                    }
                }
                node = if arm { *true_to } else { *false_to };
            }
        }
    }
}

fn render_num(raw: i128, scale: u32) -> String {
    if scale == 0 {
        return raw.to_string();
    }
    let neg = raw < 0;
    let abs = format!(
        "{:0>width$}",
        raw.unsigned_abs().to_string(),
        width = scale as usize + 1
    );
    let (i, f) = abs.split_at(abs.len() - scale as usize);
    format!("{}{i}.{f}", if neg { "-" } else { "" })
}

/// Fill every test's expected outputs from its oracle run. Traps mark the
/// test invalid; the batch always completes.
pub fn execute_suite(ir: &IrProgram, suite: &TestSuite, config: &RunConfig) -> TestSuite {
    let mut out = suite.clone();
    for tc in &mut out.tests {
        let mut mocks = MockScript::from_test_case(tc);
        let record = run(ir, &suite.paragraph, &tc.program_inputs, &mut mocks, config);
        match record.status {
            RunStatus::Completed => {
                tc.expected_program_outputs = record.program_outputs;
                tc.expected_resource_outputs = record.resource_output_events;
                tc.status = TestStatus::Completed;
            }
            RunStatus::Trap(reason) => {
                tc.status = TestStatus::Invalid(reason);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_program;
    use crate::ir::lower;
    use crate::testgen::{generate_tests, GenConfig};

    const HEADER: &str = "\
IDENTIFICATION DIVISION.
PROGRAM-ID. T.
DATA DIVISION.
WORKING-STORAGE SECTION.
01 WS-NAME PIC X(8).
01 WS-ID PIC 9(3).
01 WS-RC PIC X(2).
PROCEDURE DIVISION.
";

    fn ir_of(src: &str) -> IrProgram {
        lower(&parse_program(src).unwrap()).unwrap()
    }

    fn select_fixture() -> IrProgram {
        ir_of(&format!(
            "{HEADER}MAIN.
    EXEC SQL SELECT NAME INTO :WS-NAME FROM CUST WHERE ID = :WS-ID END-EXEC.
    IF SQLCODE = 0
        MOVE 'OK' TO WS-RC
    ELSE
        MOVE 'NF' TO WS-RC
    END-IF.
    STOP RUN.
"
        ))
    }

    fn mock(call_id: usize, pairs: &[(&str, &str)]) -> MockScript {
        let mut queues: BTreeMap<usize, VecDeque<BTreeMap<String, String>>> = BTreeMap::new();
        queues.entry(call_id).or_default().push_back(
            pairs
                .iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect(),
        );
        MockScript { queues }
    }

    #[test]
    fn injected_status_steers_the_branch() {
        let ir = select_fixture();
        let inputs = BTreeMap::from([("WS-ID".to_string(), "042".to_string())]);

        let mut ok = mock(0, &[("WS-NAME", "ALICE"), ("SQLCODE", "0")]);
        let rec = run(&ir, "MAIN", &inputs, &mut ok, &RunConfig::default());
        assert_eq!(rec.status, RunStatus::Completed);
        assert_eq!(rec.program_outputs["WS-RC"], "OK");

        let mut nf = mock(0, &[("WS-NAME", ""), ("SQLCODE", "100")]);
        let rec = run(&ir, "MAIN", &inputs, &mut nf, &RunConfig::default());
        assert_eq!(rec.program_outputs["WS-RC"], "NF");
    }

    #[test]
    fn events_snapshot_values_at_call_time() {
        let ir = select_fixture();
        let inputs = BTreeMap::from([("WS-ID".to_string(), "007".to_string())]);
        let mut m = mock(0, &[("WS-NAME", "X"), ("SQLCODE", "0")]);
        let rec = run(&ir, "MAIN", &inputs, &mut m, &RunConfig::default());
        assert_eq!(rec.resource_output_events.len(), 1);
        assert_eq!(rec.resource_output_events[0].values["WS-ID"], "007");
    }

    #[test]
    fn mock_underflow_traps_only_that_test() {
        let ir = select_fixture();
        let (suite, _) = generate_tests(&ir, "MAIN", &GenConfig::default()).unwrap();
        let mut broken = suite.clone();
        broken.tests[0].resource_inputs.clear(); // starve the first test
        let filled = execute_suite(&ir, &broken, &RunConfig::default());
        assert!(matches!(filled.tests[0].status, TestStatus::Invalid(_)));
        for tc in &filled.tests[1..] {
            assert_eq!(tc.status, TestStatus::Completed);
        }
    }

    #[test]
    fn empty_suite_round_trips() {
        let ir = select_fixture();
        let suite = TestSuite {
            program_id: "T".into(),
            paragraph: "MAIN".into(),
            seed: 0,
            tests: vec![],
        };
        let filled = execute_suite(&ir, &suite, &RunConfig::default());
        assert!(filled.tests.is_empty());
    }

    #[test]
    fn replay_matches_generated_paths() {
        let ir = select_fixture();
        let (suite, _) = generate_tests(&ir, "MAIN", &GenConfig::default()).unwrap();
        for tc in &suite.tests {
            let mut mocks = MockScript::from_test_case(tc);
            let rec = run(&ir, "MAIN", &tc.program_inputs, &mut mocks, &RunConfig::default());
            assert_eq!(rec.status, RunStatus::Completed);
            assert_eq!(
                rec.executed_path.branch_decisions, tc.path.branch_decisions,
                "oracle must replay the intended path"
            );
        }
    }

    #[test]
    fn infinite_loop_traps() {
        let ir = ir_of(&format!(
            "{HEADER}MAIN.
    PERFORM UNTIL WS-ID > 999
        MOVE 0 TO WS-ID
    END-PERFORM.
    STOP RUN.
"
        ));
        let rec = run(
            &ir,
            "MAIN",
            &BTreeMap::new(),
            &mut MockScript::default(),
            &RunConfig { step_limit: 5_000 },
        );
        assert!(matches!(rec.status, RunStatus::Trap(_)));
    }

    #[test]
    fn runs_are_deterministic() {
        let ir = select_fixture();
        let inputs = BTreeMap::from([("WS-ID".to_string(), "001".to_string())]);
        let rec1 = run(
            &ir,
            "MAIN",
            &inputs,
            &mut mock(0, &[("WS-NAME", "A"), ("SQLCODE", "0")]),
            &RunConfig::default(),
        );
        let rec2 = run(
            &ir,
            "MAIN",
            &inputs,
            &mut mock(0, &[("WS-NAME", "A"), ("SQLCODE", "0")]),
            &RunConfig::default(),
        );
        assert_eq!(
            serde_json::to_string(&rec1).unwrap(),
            serde_json::to_string(&rec2).unwrap()
        );
    }
}
