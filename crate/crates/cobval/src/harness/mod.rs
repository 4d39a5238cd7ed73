//! Validation harness: drive a translated program through the adapter
//! protocol, compare outputs assertion by assertion, render reports.

pub mod adapter;
pub mod pipeline;

use crate::emitter::{AssertionPlan, BundleTest, TestBundle};
use crate::testgen::TestStatus;
use crate::value::decimals_equal;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::time::Duration;

pub use adapter::{
    run_adapter_once, split_command, AdapterError, AdapterEvent, AdapterMockSeq, AdapterProcess,
    AdapterRequest, AdapterResult, AdapterStatus, MockFifoEntry,
};
pub use pipeline::{pipeline, PipelineConfig, PipelineInputs, StageError};

#[derive(Clone, Debug)]
pub struct HarnessConfig {
    pub timeout: Duration,
    /// Worker pool size; results are canonically re-sorted, so parallelism
    /// never changes the report.
    pub workers: usize,
    /// Reuse one adapter process for the whole suite instead of one per
    /// test. Faster, but a crash is no longer isolated to a single test.
    pub batch: bool,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        HarnessConfig {
            timeout: Duration::from_secs(30),
            workers: std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1),
            batch: false,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AssertionVerdict {
    /// `prog` or `res`.
    pub kind: String,
    pub cobol_var: String,
    pub target: String,
    pub expected: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub actual: Option<String>,
    pub passed: bool,
}

/// Match program assertions by target variable name and resource assertions
/// by (sequence, occurrence, slot), consuming adapter events in order.
/// A missing actual value fails the assertion rather than erroring.
pub fn compare(expected: &AssertionPlan, actual: &AdapterResult) -> Vec<AssertionVerdict> {
    let mut verdicts = Vec::new();
    for a in &expected.program_assertions {
        let got = actual.program_outputs.get(&a.target_name).cloned();
        let passed = got
            .as_deref()
            .map(|g| decimals_equal(&a.expected_value, g))
            .unwrap_or(false);
        verdicts.push(AssertionVerdict {
            kind: "prog".into(),
            cobol_var: a.cobol_var.clone(),
            target: a.target_name.clone(),
            expected: a.expected_value.clone(),
            actual: got,
            passed,
        });
    }
    // events are addressed by (sequence, occurrence); the first matching
    // event wins, so out-of-order or missing occurrences fail the
    // assertions that expected them
    for a in &expected.resource_assertions {
        let got = actual
            .resource_output_events
            .iter()
            .find(|e| e.seq_id == a.seq_id && e.occurrence == a.occurrence)
            .and_then(|e| e.slot_values.get(&a.target_slot).cloned());
        let passed = got
            .as_deref()
            .map(|g| decimals_equal(&a.expected_value, g))
            .unwrap_or(false);
        verdicts.push(AssertionVerdict {
            kind: "res".into(),
            cobol_var: a.var.clone(),
            target: format!("seq{}#{}@{}", a.seq_id, a.occurrence, a.target_slot),
            expected: a.expected_value.clone(),
            actual: got,
            passed,
        });
    }
    verdicts
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TestReport {
    pub name: String,
    pub status: String,
    pub vacuous: bool,
    pub passed: bool,
    pub verdicts: Vec<AssertionVerdict>,
}

/// One Table-1-style row.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ParagraphRow {
    pub program: String,
    pub paragraph: String,
    pub paths_covered_pct: f64,
    pub branches_covered_pct: f64,
    pub path_count: u64,
    pub test_count: usize,
    pub program_output_count: usize,
    pub resource_output_count: usize,
    pub assertion_count: usize,
    pub program_assertion_count: usize,
    pub resource_assertion_count: usize,
    pub tests_passed: usize,
    pub tests_total: usize,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ValidationReport {
    pub rows: Vec<ParagraphRow>,
    pub tests: Vec<TestReport>,
}

/// Validate a bundle against an adapter command.
pub fn validate(
    bundle: &TestBundle,
    adapter_cmd: &[String],
    config: &HarnessConfig,
) -> Result<ValidationReport, AdapterError> {
    let requests: Vec<(usize, AdapterRequest)> = bundle
        .tests
        .iter()
        .enumerate()
        .filter(|(_, bt)| bt.test.status == TestStatus::Completed)
        .map(|(i, bt)| (i, request_for(bt)))
        .collect();

    let mut outcomes: Vec<(usize, Result<AdapterResult, String>)> = Vec::new();
    if config.batch {
        let mut proc = AdapterProcess::spawn(adapter_cmd)?;
        for (i, req) in &requests {
            let outcome = proc
                .exchange(req, config.timeout)
                .map_err(|e| e.to_string());
            outcomes.push((*i, outcome));
        }
        proc.finish();
    } else if config.workers <= 1 || requests.len() <= 1 {
        for (i, req) in &requests {
            outcomes.push((
                *i,
                run_adapter_once(adapter_cmd, req, config.timeout).map_err(|e| e.to_string()),
            ));
        }
    } else {
        let chunk = requests.len().div_ceil(config.workers);
        let results: std::sync::Mutex<Vec<(usize, Result<AdapterResult, String>)>> =
            std::sync::Mutex::new(Vec::new());
        std::thread::scope(|scope| {
            for slice in requests.chunks(chunk) {
                let results = &results;
                scope.spawn(move || {
                    let mut local = Vec::new();
                    for (i, req) in slice {
                        local.push((
                            *i,
                            run_adapter_once(adapter_cmd, req, config.timeout)
                                .map_err(|e| e.to_string()),
                        ));
                    }
                    results.lock().unwrap().extend(local);
                });
            }
        });
        outcomes = results.into_inner().unwrap();
    }
    outcomes.sort_by_key(|(i, _)| *i);

    let mut report = ValidationReport::default();
    let mut by_index: std::collections::BTreeMap<usize, Result<AdapterResult, String>> =
        outcomes.into_iter().collect();
    for (i, bt) in bundle.tests.iter().enumerate() {
        let tc = &bt.test;
        if let TestStatus::Invalid(reason) = &tc.status {
            report.tests.push(TestReport {
                name: tc.name.clone(),
                status: format!("invalid: {reason}"),
                vacuous: false,
                passed: false,
                verdicts: vec![],
            });
            continue;
        }
        let vacuous = bt.assertion_plan.total() == 0;
        match by_index.remove(&i) {
            Some(Ok(result)) => {
                let ok_status = result.status == AdapterStatus::Ok;
                let verdicts = compare(&bt.assertion_plan, &result);
                let all_passed = verdicts.iter().all(|v| v.passed);
                report.tests.push(TestReport {
                    name: tc.name.clone(),
                    status: match &result.status {
                        AdapterStatus::Ok => "ok".to_string(),
                        AdapterStatus::Crash(t) => format!("crash: {t}"),
                        AdapterStatus::Timeout => "timeout".to_string(),
                    },
                    vacuous,
                    passed: ok_status && all_passed,
                    verdicts,
                });
            }
            Some(Err(protocol_error)) => report.tests.push(TestReport {
                name: tc.name.clone(),
                status: format!("protocol error: {protocol_error}"),
                vacuous,
                passed: false,
                verdicts: vec![],
            }),
            None => report.tests.push(TestReport {
                name: tc.name.clone(),
                status: "not executed".into(),
                vacuous,
                passed: false,
                verdicts: vec![],
            }),
        }
    }

    report.rows.push(summarize(bundle, &report.tests));
    Ok(report)
}

/// Aggregate counts the way the result table reports them: output counts
/// are distinct variables, program assertions are distinct assertion
/// templates across the suite, resource assertions are per-test instances.
pub fn summarize(bundle: &TestBundle, tests: &[TestReport]) -> ParagraphRow {
    let mut prog_outputs: BTreeSet<&str> = BTreeSet::new();
    let mut res_outputs: BTreeSet<&str> = BTreeSet::new();
    let mut prog_assertion_vars: BTreeSet<&str> = BTreeSet::new();
    let mut res_assertion_instances = 0usize;
    for bt in &bundle.tests {
        for var in bt.test.expected_program_outputs.keys() {
            prog_outputs.insert(var);
        }
        for rv in &bt.test.expected_resource_outputs {
            for var in rv.values.keys() {
                res_outputs.insert(var);
            }
        }
        for a in &bt.assertion_plan.program_assertions {
            prog_assertion_vars.insert(&a.cobol_var);
        }
        res_assertion_instances += bt.assertion_plan.resource_assertions.len();
    }
    let passed = tests.iter().filter(|t| t.passed).count();
    ParagraphRow {
        program: bundle.program_id.clone(),
        paragraph: bundle.paragraph.clone(),
        paths_covered_pct: bundle.coverage.paths_pct(),
        branches_covered_pct: bundle.coverage.branches_pct(),
        path_count: bundle.coverage.path_bound,
        test_count: bundle.tests.len(),
        program_output_count: prog_outputs.len(),
        resource_output_count: res_outputs.len(),
        assertion_count: prog_assertion_vars.len() + res_assertion_instances,
        program_assertion_count: prog_assertion_vars.len(),
        resource_assertion_count: res_assertion_instances,
        tests_passed: passed,
        tests_total: tests.len(),
    }
}

fn request_for(bt: &BundleTest) -> AdapterRequest {
    AdapterRequest {
        test_name: bt.test.name.clone(),
        program_inputs: bt.test.program_inputs.clone(),
        mocks: bt
            .mock_plan
            .sequences
            .iter()
            .map(|s| AdapterMockSeq {
                seq_id: s.seq_id,
                fifo: s
                    .fifo
                    .iter()
                    .map(|entry| MockFifoEntry {
                        slot_values: entry.clone(),
                    })
                    .collect(),
            })
            .collect(),
    }
}

fn pct(v: f64) -> String {
    if (v - v.round()).abs() < 1e-9 {
        format!("{:.0}", v)
    } else {
        format!("{:.1}", v)
    }
}

/// Markdown rendering with the experimental-results column set.
pub fn render_markdown(report: &ValidationReport) -> String {
    let mut out = String::new();
    out.push_str("| S. No | Program | Paragraph/Method | % Paths covered | % Branches covered | # Paths /tests | # Prog. output | # Res. output | # Assertions | # Prog. assertions | # Res. Assertions | # Tests Pass |\n");
    out.push_str("|---|---|---|---|---|---|---|---|---|---|---|---|\n");
    for (i, row) in report.rows.iter().enumerate() {
        let paths_tests = if row.path_count == row.test_count as u64 {
            format!("{}", row.test_count)
        } else {
            format!("{}/{}", row.path_count, row.test_count)
        };
        out.push_str(&format!(
            "| {} | {} | {} | {} | {} | {} | {} | {} | {} | {} | {} | {}/{} |\n",
            i + 1,
            row.program,
            row.paragraph,
            pct(row.paths_covered_pct),
            pct(row.branches_covered_pct),
            paths_tests,
            row.program_output_count,
            row.resource_output_count,
            row.assertion_count,
            row.program_assertion_count,
            row.resource_assertion_count,
            row.tests_passed,
            row.tests_total,
        ));
    }
    out
}

pub fn render_json(report: &ValidationReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}
