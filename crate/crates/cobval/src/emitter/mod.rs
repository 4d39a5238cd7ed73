//! Assertion planning, order-dependent mock planning, and bundle emission.
//!
//! The bundle is the canonical executable interface: it carries everything a
//! target-language adapter needs: inputs, ordered mock values, expected
//! outputs, the assertion plan, and the resource matching. Scaffold text
//! (see [`scaffold`]) is a rendering of the same data.

pub mod scaffold;

use crate::ir::IrProgram;
use crate::mapper::{Direction, Matching};
use crate::testgen::{CoverageReport, GenConfig, TestCase, TestStatus, TestSuite};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

pub use scaffold::{emit_test_scaffold, parse_scaffold_markers, Marker};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum VarForm {
    Field,
    Parameter,
    Local,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CjVarEntry {
    pub cobol_var: String,
    pub target_name: String,
    pub form: VarForm,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CjRecordEntry {
    pub cobol_record: String,
    pub target_class_name: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CjParagraphEntry {
    pub cobol_paragraph: String,
    pub target_method_name: String,
    pub target_class_name: String,
}

/// The COBOL-to-target element map produced by the translation pipeline
/// (`cjmap.json`); an input artifact here.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CjMap {
    #[serde(default)]
    pub records: Vec<CjRecordEntry>,
    #[serde(default)]
    pub variables: Vec<CjVarEntry>,
    #[serde(default)]
    pub paragraphs: Vec<CjParagraphEntry>,
}

impl CjMap {
    pub fn var(&self, cobol_var: &str) -> Option<&CjVarEntry> {
        self.variables.iter().find(|v| v.cobol_var == cobol_var)
    }

    pub fn paragraph(&self, cobol_paragraph: &str) -> Option<&CjParagraphEntry> {
        self.paragraphs
            .iter()
            .find(|p| p.cobol_paragraph == cobol_paragraph)
    }

    /// Every mapped variable must resolve against the program dictionary.
    pub fn validate(&self, ir: &IrProgram) -> Result<(), EmitError> {
        for v in &self.variables {
            if ir.pic(&v.cobol_var).is_none() {
                return Err(EmitError::SchemaViolation(format!(
                    "cjmap variable {} is not declared in the program",
                    v.cobol_var
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SkipReason {
    LocalInTarget,
    UnmatchedCall,
    UnmappedVar,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ProgramAssertion {
    pub cobol_var: String,
    pub target_name: String,
    pub expected_value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ResourceAssertion {
    pub call_id: usize,
    pub occurrence: usize,
    pub var: String,
    pub seq_id: usize,
    /// Target slot the value travels through, `callIndex:argSlot`.
    pub target_slot: String,
    pub expected_value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SkippedAssertion {
    pub cobol_var: String,
    pub reason: SkipReason,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub call_id: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub occurrence: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AssertionPlan {
    pub program_assertions: Vec<ProgramAssertion>,
    pub resource_assertions: Vec<ResourceAssertion>,
    pub skipped: Vec<SkippedAssertion>,
}

impl AssertionPlan {
    pub fn total(&self) -> usize {
        self.program_assertions.len() + self.resource_assertions.len()
    }
}

/// Mock values queued for one target sequence, FIFO per occurrence. Slot
/// keys are `callIndex:argSlot` for mapped variables and `var:<NAME>` for
/// unmapped ones (the status variable usually), so the bundle stays
/// self-contained.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SeqMocks {
    pub seq_id: usize,
    pub fifo: Vec<BTreeMap<String, String>>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MockPlan {
    pub sequences: Vec<SeqMocks>,
    /// Unmatched calls and other findings, for traceability.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Debug, Error)]
pub enum EmitError {
    #[error("schema violation: {0}")]
    SchemaViolation(String),
    #[error("unknown profile {0}")]
    UnknownProfile(String),
    #[error("test lacks mock values for call {call_id} occurrence {occurrence}")]
    OccurrenceGap { call_id: usize, occurrence: usize },
}

/// Plan the assertions for one executed test: program assertions for every
/// expected output mapped to a non-local target variable, resource
/// assertions for every expected resource output with a slot in the
/// matching, and an explicit skip entry for everything else.
pub fn plan_assertions(tc: &TestCase, cjmap: &CjMap, matching: &Matching) -> AssertionPlan {
    let mut plan = AssertionPlan::default();
    for (var, value) in &tc.expected_program_outputs {
        match cjmap.var(var) {
            None => plan.skipped.push(SkippedAssertion {
                cobol_var: var.clone(),
                reason: SkipReason::UnmappedVar,
                call_id: None,
                occurrence: None,
            }),
            Some(entry) if entry.form == VarForm::Local => plan.skipped.push(SkippedAssertion {
                cobol_var: var.clone(),
                reason: SkipReason::LocalInTarget,
                call_id: None,
                occurrence: None,
            }),
            Some(entry) => plan.program_assertions.push(ProgramAssertion {
                cobol_var: var.clone(),
                target_name: entry.target_name.clone(),
                expected_value: value.clone(),
            }),
        }
    }
    for rv in &tc.expected_resource_outputs {
        let pair = matching.pair_for_call(rv.call_id);
        for (var, value) in &rv.values {
            let Some(pair) = pair else {
                plan.skipped.push(SkippedAssertion {
                    cobol_var: var.clone(),
                    reason: SkipReason::UnmatchedCall,
                    call_id: Some(rv.call_id),
                    occurrence: Some(rv.occurrence),
                });
                continue;
            };
            match matching.slot_for(rv.call_id, var) {
                Some(slot) if slot.direction == Direction::ResourceOutput => {
                    plan.resource_assertions.push(ResourceAssertion {
                        call_id: rv.call_id,
                        occurrence: rv.occurrence,
                        var: var.clone(),
                        seq_id: pair.seq_id,
                        target_slot: format!("{}:{}", slot.call_index, slot.arg_slot),
                        expected_value: value.clone(),
                    })
                }
                _ => plan.skipped.push(SkippedAssertion {
                    cobol_var: var.clone(),
                    reason: SkipReason::UnmappedVar,
                    call_id: Some(rv.call_id),
                    occurrence: Some(rv.occurrence),
                }),
            }
        }
    }
    plan
}

/// Order-dependent mocking plan: per matched sequence, a FIFO of the test's
/// resource-input values in occurrence order. Repeated calls consume
/// successive entries.
pub fn plan_mocks(tc: &TestCase, matching: &Matching) -> Result<MockPlan, EmitError> {
    let mut plan = MockPlan::default();
    let mut by_seq: BTreeMap<usize, Vec<(usize, BTreeMap<String, String>)>> = BTreeMap::new();

    // verify the test carries values for every occurrence on its path
    let mut expected_occurrences: BTreeMap<usize, usize> = BTreeMap::new();
    for rv in &tc.resource_inputs {
        let seen = expected_occurrences.entry(rv.call_id).or_insert(0);
        if rv.occurrence != *seen + 1 {
            return Err(EmitError::OccurrenceGap {
                call_id: rv.call_id,
                occurrence: *seen + 1,
            });
        }
        *seen = rv.occurrence;
    }

    for rv in &tc.resource_inputs {
        let Some(pair) = matching.pair_for_call(rv.call_id) else {
            plan.notes.push(format!(
                "call {} occurrence {} is unmatched; no mock emitted",
                rv.call_id, rv.occurrence
            ));
            continue;
        };
        let mut slot_values = BTreeMap::new();
        for (var, value) in &rv.values {
            match matching.slot_for(rv.call_id, var) {
                Some(slot) if slot.direction == Direction::ResourceInput => {
                    slot_values.insert(
                        format!("{}:{}", slot.call_index, slot.arg_slot),
                        value.clone(),
                    );
                }
                _ => {
                    slot_values.insert(format!("var:{var}"), value.clone());
                }
            }
        }
        by_seq
            .entry(pair.seq_id)
            .or_default()
            .push((rv.occurrence, slot_values));
    }
    for (seq_id, mut entries) in by_seq {
        entries.sort_by_key(|(occ, _)| *occ);
        plan.sequences.push(SeqMocks {
            seq_id,
            fifo: entries.into_iter().map(|(_, v)| v).collect(),
        });
    }
    Ok(plan)
}

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GenerationMeta {
    pub seed: u64,
    pub config: GenConfig,
    pub tool_version: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BundleTest {
    #[serde(flatten)]
    pub test: TestCase,
    pub assertion_plan: AssertionPlan,
    pub mock_plan: MockPlan,
}

/// The self-contained validation bundle (`bundle.schema.json` documents the
/// wire shape).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TestBundle {
    pub format_version: u32,
    pub program_id: String,
    pub paragraph: String,
    pub generation: GenerationMeta,
    pub cjmap: CjMap,
    pub matching: Matching,
    pub coverage: CoverageReport,
    pub tests: Vec<BundleTest>,
}

/// Assemble and validate a bundle from the pipeline pieces.
pub fn build_bundle(
    ir: &IrProgram,
    suite: &TestSuite,
    coverage: &CoverageReport,
    cjmap: &CjMap,
    matching: &Matching,
    gen_config: &GenConfig,
) -> Result<TestBundle, EmitError> {
    cjmap.validate(ir)?;
    let mut tests = Vec::new();
    for tc in &suite.tests {
        let (assertion_plan, mock_plan) = match tc.status {
            TestStatus::Completed => (
                plan_assertions(tc, cjmap, matching),
                plan_mocks(tc, matching)?,
            ),
            _ => (AssertionPlan::default(), MockPlan::default()),
        };
        // no silent drops: every expected output is asserted or skipped
        let expected: usize = tc.expected_program_outputs.len()
            + tc
                .expected_resource_outputs
                .iter()
                .map(|rv| rv.values.len())
                .sum::<usize>();
        if tc.status == TestStatus::Completed
            && assertion_plan.total() + assertion_plan.skipped.len() != expected
        {
            return Err(EmitError::SchemaViolation(format!(
                "assertion accounting broken for {}: {} planned + {} skipped != {} expected",
                tc.name,
                assertion_plan.total(),
                assertion_plan.skipped.len(),
                expected
            )));
        }
        tests.push(BundleTest {
            test: tc.clone(),
            assertion_plan,
            mock_plan,
        });
    }
    // monotone injectivity of the matching
    for w in matching.pairs.windows(2) {
        if w[0].cobol_call_id >= w[1].cobol_call_id || w[0].seq_id >= w[1].seq_id {
            return Err(EmitError::SchemaViolation(
                "matching pairs are not strictly monotone".into(),
            ));
        }
    }
    Ok(TestBundle {
        format_version: 1,
        program_id: suite.program_id.clone(),
        paragraph: suite.paragraph.clone(),
        generation: GenerationMeta {
            seed: suite.seed,
            config: gen_config.clone(),
            tool_version: TOOL_VERSION.to_string(),
        },
        cjmap: cjmap.clone(),
        matching: matching.clone(),
        coverage: coverage.clone(),
        tests,
    })
}

/// Canonical JSON: stable key order, scale-preserving decimal strings.
/// Emission is a pure function of the bundle, so re-emission is
/// byte-identical.
pub fn emit_bundle(bundle: &TestBundle) -> Result<String, EmitError> {
    serde_json::to_string_pretty(bundle)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| EmitError::SchemaViolation(e.to_string()))
}

pub fn parse_bundle(text: &str) -> Result<TestBundle, EmitError> {
    serde_json::from_str(text).map_err(|e| EmitError::SchemaViolation(e.to_string()))
}
