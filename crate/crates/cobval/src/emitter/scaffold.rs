//! Target-language unit-test scaffolding.
//!
//! One test class per paragraph, one test method per test case: field and
//! parameter initialization from the CJMap, ordered stub returns from the
//! mock plan, the invocation, then the assertion section. Mocking renders
//! against an abstract `OrderedStubs` facade: `queue(seqId, slotValues)`
//! arms the next occurrence, `captured(seqId, occurrence, slot)` returns
//! what the code under test sent. The text is never compiled here; the
//! bundle stays the executable interface.
//!
//! Every assertion and skip line carries a machine-readable marker comment
//! so scaffold/bundle agreement can be checked by re-parsing.

use super::{EmitError, TestBundle, VarForm};
use crate::testgen::TestStatus;

/// The single built-in profile.
pub const PROFILE_JVM_JUNIT: &str = "jvm-junit";

pub fn emit_test_scaffold(
    bundle: &TestBundle,
    profile: &str,
) -> Result<Vec<(String, String)>, EmitError> {
    if profile != PROFILE_JVM_JUNIT {
        return Err(EmitError::UnknownProfile(profile.to_string()));
    }
    let para = bundle.cjmap.paragraph(&bundle.paragraph);
    let class_name = para
        .map(|p| p.target_class_name.clone())
        .unwrap_or_else(|| pascal_case(&bundle.program_id));
    let method_name = para
        .map(|p| p.target_method_name.clone())
        .unwrap_or_else(|| camel_case(&bundle.paragraph));
    let test_class = format!("{class_name}_{}_Test", pascal_case(&bundle.paragraph));

    let mut out = String::new();
    out.push_str(&format!(
        "// Generated by cobval {}: profile {PROFILE_JVM_JUNIT}\n",
        super::TOOL_VERSION
    ));
    out.push_str(&format!(
        "// program {} paragraph {} seed {}\n",
        bundle.program_id, bundle.paragraph, bundle.generation.seed
    ));
    out.push_str("import static org.junit.Assert.assertEquals;\n");
    out.push_str("import org.junit.Test;\n\n");
    out.push_str(&format!("public class {test_class} {{\n"));
    out.push_str(&format!(
        "    private final OrderedStubs stubs = OrderedStubs.install();\n    private final {class_name} target = new {class_name}();\n"
    ));

    let params: Vec<&super::CjVarEntry> = bundle
        .cjmap
        .variables
        .iter()
        .filter(|v| v.form == VarForm::Parameter)
        .collect();

    for bt in &bundle.tests {
        let tc = &bt.test;
        out.push('\n');
        if let TestStatus::Invalid(reason) = &tc.status {
            out.push_str(&format!(
                "    // skipped invalid test {}: {reason}\n",
                tc.name
            ));
            continue;
        }
        out.push_str("    @Test\n");
        out.push_str(&format!("    public void {}() {{\n", tc.name.to_lowercase()));

        // initialization: fields set, parameters declared, locals untouched
        out.push_str("        // -- initialize inputs\n");
        for (var, value) in &tc.program_inputs {
            match bundle.cjmap.var(var) {
                Some(entry) if entry.form == VarForm::Field => {
                    out.push_str(&format!(
                        "        target.{} = {};\n",
                        entry.target_name,
                        java_str(value)
                    ));
                }
                Some(entry) if entry.form == VarForm::Parameter => {
                    out.push_str(&format!(
                        "        String {} = {};\n",
                        entry.target_name,
                        java_str(value)
                    ));
                }
                Some(_) => out.push_str(&format!(
                    "        // {var} is a local in the target; the method initializes it\n"
                )),
                None => out.push_str(&format!("        // {var} has no target mapping\n")),
            }
        }

        // ordered stub returns
        if !bt.mock_plan.sequences.is_empty() {
            out.push_str("        // -- arm order-dependent stubs\n");
        }
        for seq in &bt.mock_plan.sequences {
            for (idx, entry) in seq.fifo.iter().enumerate() {
                out.push_str(&format!(
                    "        // mock:seq={} entry={}\n",
                    seq.seq_id, idx
                ));
                let pairs: Vec<String> = entry
                    .iter()
                    .map(|(k, v)| format!("{}, {}", java_str(k), java_str(v)))
                    .collect();
                out.push_str(&format!(
                    "        stubs.queue({}, java.util.Map.of({}));\n",
                    seq.seq_id,
                    pairs.join(", ")
                ));
            }
        }
        for note in &bt.mock_plan.notes {
            out.push_str(&format!("        // note: {note}\n"));
        }

        // invocation
        let args: Vec<String> = params.iter().map(|p| p.target_name.clone()).collect();
        out.push_str("        // -- invoke\n");
        out.push_str(&format!(
            "        target.{method_name}({});\n",
            args.join(", ")
        ));

        // assertions
        let plan = &bt.assertion_plan;
        if plan.total() == 0 {
            out.push_str("        // vacuous: no assertable outputs\n");
        } else {
            out.push_str("        // -- assert\n");
        }
        for a in &plan.program_assertions {
            out.push_str(&format!("        // assert:prog {}\n", a.cobol_var));
            out.push_str(&format!(
                "        assertEquals({}, target.{});\n",
                java_str(&a.expected_value),
                a.target_name
            ));
        }
        for a in &plan.resource_assertions {
            out.push_str(&format!(
                "        // assert:res call={} occ={} var={} slot={}\n",
                a.call_id, a.occurrence, a.var, a.target_slot
            ));
            out.push_str(&format!(
                "        assertEquals({}, stubs.captured({}, {}, {}));\n",
                java_str(&a.expected_value),
                a.seq_id,
                a.occurrence,
                java_str(&a.target_slot)
            ));
        }
        for s in &plan.skipped {
            out.push_str(&format!(
                "        // skip:{} reason={:?}\n",
                s.cobol_var, s.reason
            ));
        }
        out.push_str("    }\n");
    }
    out.push_str("}\n");

    Ok(vec![(format!("{test_class}.java"), out)])
}

fn java_str(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn pascal_case(name: &str) -> String {
    name.split(|c: char| !c.is_ascii_alphanumeric())
        .filter(|p| !p.is_empty())
        .map(|p| {
            let mut chars = p.chars();
            let first = chars.next().unwrap().to_ascii_uppercase();
            let rest: String = chars.map(|c| c.to_ascii_lowercase()).collect();
            format!("{first}{rest}")
        })
        .collect()
}

fn camel_case(name: &str) -> String {
    let pascal = pascal_case(name);
    let mut chars = pascal.chars();
    match chars.next() {
        Some(first) => format!("{}{}", first.to_ascii_lowercase(), chars.as_str()),
        None => pascal,
    }
}

/// A marker comment recovered from emitted scaffold text.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Marker {
    ProgramAssertion { cobol_var: String },
    ResourceAssertion {
        call_id: usize,
        occurrence: usize,
        var: String,
        target_slot: String,
    },
    Skip { cobol_var: String },
    Mock { seq_id: usize, entry: usize },
}

/// Recover the markers, in order, for scaffold/bundle agreement checks.
pub fn parse_scaffold_markers(text: &str) -> Vec<Marker> {
    let mut out = Vec::new();
    for line in text.lines() {
        let line = line.trim_start();
        if let Some(rest) = line.strip_prefix("// assert:prog ") {
            out.push(Marker::ProgramAssertion {
                cobol_var: rest.trim().to_string(),
            });
        } else if let Some(rest) = line.strip_prefix("// assert:res ") {
            let mut call_id = 0;
            let mut occurrence = 0;
            let mut var = String::new();
            let mut target_slot = String::new();
            for part in rest.split_whitespace() {
                if let Some(v) = part.strip_prefix("call=") {
                    call_id = v.parse().unwrap_or(0);
                } else if let Some(v) = part.strip_prefix("occ=") {
                    occurrence = v.parse().unwrap_or(0);
                } else if let Some(v) = part.strip_prefix("var=") {
                    var = v.to_string();
                } else if let Some(v) = part.strip_prefix("slot=") {
                    target_slot = v.to_string();
                }
            }
            out.push(Marker::ResourceAssertion {
                call_id,
                occurrence,
                var,
                target_slot,
            });
        } else if let Some(rest) = line.strip_prefix("// skip:") {
            let var = rest.split_whitespace().next().unwrap_or("").to_string();
            out.push(Marker::Skip { cobol_var: var });
        } else if let Some(rest) = line.strip_prefix("// mock:seq=") {
            let mut it = rest.split(" entry=");
            let seq_id = it.next().and_then(|v| v.parse().ok()).unwrap_or(0);
            let entry = it.next().and_then(|v| v.parse().ok()).unwrap_or(0);
            out.push(Marker::Mock { seq_id, entry });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn case_helpers() {
        assert_eq!(pascal_case("INSERT-CUSTOMER"), "InsertCustomer");
        assert_eq!(camel_case("FIRST-SENTENCE"), "firstSentence");
        assert_eq!(pascal_case("LGACDB01"), "Lgacdb01");
    }

    #[test]
    fn markers_round_trip() {
        let text = "\
        // assert:prog WS-RC
        assertEquals(\"OK\", target.wsRc);
        // assert:res call=2 occ=1 var=WS-ID slot=1:1
        // skip:WS-TMP reason=LocalInTarget
        // mock:seq=0 entry=0
";
        let markers = parse_scaffold_markers(text);
        assert_eq!(markers.len(), 4);
        assert_eq!(
            markers[1],
            Marker::ResourceAssertion {
                call_id: 2,
                occurrence: 1,
                var: "WS-ID".into(),
                target_slot: "1:1".into()
            }
        );
    }
}
