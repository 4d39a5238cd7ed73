//! Cross-language resource-call mapping.
//!
//! Offline, COBOL/target statement pairs generalize into reusable patterns
//! (CJResourceMap). Online, each COBOL resource call is scored against the
//! translated method's call sequences and the best position-respecting
//! one-to-one alignment is found by dynamic programming over the weighted
//! sum: monotone matching is exactly sequence alignment, so the DP is both
//! simpler than a general assignment solver and exact.
//!
//! Weights are handled in integer thousandths end to end; ties break toward
//! the lexicographically smallest (cobolCallId, seqId) pair list.

use crate::ir::{CallKind, ExternalCall};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TargetArg {
    Var { var: String },
    Lit { lit: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TargetCall {
    pub callee: String,
    #[serde(default)]
    pub args: Vec<TargetArg>,
}

impl TargetCall {
    pub fn arg_count(&self) -> usize {
        self.args.len()
    }

    pub fn literal_args(&self) -> Vec<&str> {
        self.args
            .iter()
            .filter_map(|a| match a {
                TargetArg::Lit { lit } => Some(lit.as_str()),
                TargetArg::Var { .. } => None,
            })
            .collect()
    }

    pub fn var_args(&self) -> Vec<(usize, &str)> {
        self.args
            .iter()
            .enumerate()
            .filter_map(|(i, a)| match a {
                TargetArg::Var { var } => Some((i, var.as_str())),
                TargetArg::Lit { .. } => None,
            })
            .collect()
    }
}

/// One call sequence in the translated method, in source order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TargetCallSeq {
    pub seq_id: usize,
    pub calls: Vec<TargetCall>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_span: Option<(u32, u32)>,
}

impl TargetCallSeq {
    fn var_slot_count(&self) -> usize {
        self.calls.iter().map(|c| c.var_args().len()).sum()
    }
}

/// The translated method's external-call manifest (`target-manifest.json`).
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TargetManifest {
    #[serde(default)]
    pub method: String,
    pub sequences: Vec<TargetCallSeq>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Direction {
    ResourceInput,
    ResourceOutput,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SlotRef {
    pub call_index: usize,
    pub arg_slot: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ParamMapEntry {
    /// Source placeholder, e.g. `H1`.
    pub placeholder: String,
    pub target: SlotRef,
    pub direction: Direction,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PatternCall {
    pub callee: String,
    pub arity: usize,
}

/// A generalized source-statement/target-sequence pairing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ResourcePattern {
    pub kind: CallKind,
    pub verb: String,
    pub source_template: String,
    pub target_sequence: Vec<PatternCall>,
    pub param_map: Vec<ParamMapEntry>,
}

/// The pattern corpus (`patterns.json`).
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CjResourceMap {
    pub patterns: Vec<ResourcePattern>,
}

impl CjResourceMap {
    /// Candidate patterns for a kind/verb pair.
    pub fn lookup(&self, kind: CallKind, verb: &str) -> Vec<&ResourcePattern> {
        self.patterns
            .iter()
            .filter(|p| p.kind == kind && p.verb == verb)
            .collect()
    }

    /// Insert, deduplicating on template equality.
    pub fn add(&mut self, pattern: ResourcePattern) {
        if !self
            .patterns
            .iter()
            .any(|p| p.source_template == pattern.source_template)
        {
            self.patterns.push(pattern);
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MapError {
    #[error("no shared anchor token between source statement and target sequence")]
    NoAnchor,
    #[error("source placeholder {0} has no co-occurring target argument")]
    UnmappedPlaceholder(String),
}

/// Uppercased alphanumeric spine of an identifier, so `WS-CUST-NUM`,
/// `wsCustNum` and `CUSTNUM` can be compared.
fn norm(s: &str) -> String {
    s.chars()
        .filter(|c| c.is_ascii_alphanumeric())
        .map(|c| c.to_ascii_uppercase())
        .collect()
}

fn names_match(host: &str, arg: &str) -> bool {
    let h = norm(host);
    let a = norm(arg);
    if h == a {
        return true;
    }
    // tolerate the WS- storage prefix on either side
    h.strip_prefix("WS").map(|t| t == a).unwrap_or(false)
        || a.strip_prefix("WS").map(|t| t == h).unwrap_or(false)
}

/// Tokens that name the resource object within a sequence's literals:
/// identifiers following FROM/INTO/UPDATE in SQL-ish strings, plus any
/// single-token non-numeric literal (queue and program names).
fn seq_anchor_tokens(seq: &TargetCallSeq) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for call in &seq.calls {
        for lit in call.literal_args() {
            let tokens: Vec<String> = lit
                .split(|c: char| !c.is_ascii_alphanumeric() && c != '-' && c != '_')
                .filter(|t| !t.is_empty())
                .map(norm)
                .collect();
            if tokens.len() == 1 && !tokens[0].chars().all(|c| c.is_ascii_digit()) {
                out.insert(tokens[0].clone());
                continue;
            }
            for window in tokens.windows(2) {
                if matches!(window[0].as_str(), "FROM" | "INTO" | "UPDATE") {
                    out.insert(window[1].clone());
                }
            }
        }
    }
    out
}

fn call_anchor_tokens(call: &ExternalCall) -> BTreeSet<String> {
    call.anchors.iter().map(|a| norm(a)).collect()
}

/// Offline pair generalization: abstract the shared anchors, derive the
/// placeholder-to-argument map from name co-occurrence.
pub fn generalize_pair(
    call: &ExternalCall,
    seq: &TargetCallSeq,
) -> Result<ResourcePattern, MapError> {
    let source_anchors = call_anchor_tokens(call);
    let target_tokens: BTreeSet<String> = {
        let mut t = seq_anchor_tokens(seq);
        for c in &seq.calls {
            t.insert(norm(&c.callee));
            for (_, v) in c.var_args() {
                t.insert(norm(v));
            }
            for lit in c.literal_args() {
                for tok in lit
                    .split(|c: char| !c.is_ascii_alphanumeric() && c != '-' && c != '_')
                    .filter(|t| !t.is_empty())
                {
                    t.insert(norm(tok));
                }
            }
        }
        t
    };
    let shared: Vec<&String> = source_anchors.intersection(&target_tokens).collect();
    if shared.is_empty() {
        return Err(MapError::NoAnchor);
    }

    // abstract shared anchors out of the source template
    let mut template = call.template.clone();
    for (i, anchor) in call.anchors.iter().enumerate() {
        if shared.contains(&&norm(anchor)) {
            template = template.replace(anchor.as_str(), &format!("\u{27e8}A{}\u{27e9}", i + 1));
        }
    }

    // host variables in statement order carry placeholders H1..Hk
    let mut param_map = Vec::new();
    let ordered_vars: Vec<(String, Direction)> = ordered_host_vars(call);
    for (k, (var, direction)) in ordered_vars.iter().enumerate() {
        let placeholder = format!("H{}", k + 1);
        let mut found = None;
        'outer: for (call_index, tc) in seq.calls.iter().enumerate() {
            for (arg_slot, name) in tc.var_args() {
                if names_match(var, name) {
                    found = Some(SlotRef {
                        call_index,
                        arg_slot,
                    });
                    break 'outer;
                }
            }
        }
        let target = found.ok_or_else(|| MapError::UnmappedPlaceholder(placeholder.clone()))?;
        param_map.push(ParamMapEntry {
            placeholder,
            target,
            direction: *direction,
        });
    }

    Ok(ResourcePattern {
        kind: call.kind,
        verb: call.verb.clone(),
        source_template: template,
        target_sequence: seq
            .calls
            .iter()
            .map(|c| PatternCall {
                callee: c.callee.clone(),
                arity: c.arg_count(),
            })
            .collect(),
        param_map,
    })
}

/// Host variables of a call in statement order, excluding the implicit
/// status variable, with their direction. CALL USING variables appear in
/// both lists; they get one slot with the output direction so their final
/// values stay assertable (their mock values travel under `var:` keys).
fn ordered_host_vars(call: &ExternalCall) -> Vec<(String, Direction)> {
    let mut out = Vec::new();
    for v in &call.resource_inputs {
        if call.status_var.as_deref() == Some(v.as_str()) {
            continue;
        }
        let direction = if call.resource_outputs.contains(v) {
            Direction::ResourceOutput
        } else {
            Direction::ResourceInput
        };
        out.push((v.clone(), direction));
    }
    for v in &call.resource_outputs {
        if out.iter().any(|(n, _)| n == v) {
            continue;
        }
        out.push((v.clone(), Direction::ResourceOutput));
    }
    out
}

#[derive(Clone, Debug)]
pub struct MatchConfig {
    /// Pairs below this weight never enter a matching.
    pub theta: f64,
    pub verb_weight: f64,
    pub anchor_weight: f64,
    pub arity_weight: f64,
}

impl Default for MatchConfig {
    fn default() -> Self {
        MatchConfig {
            theta: 0.25,
            verb_weight: 0.4,
            anchor_weight: 0.3,
            arity_weight: 0.3,
        }
    }
}

fn is_subsequence(needle: &[String], hay: &[String]) -> bool {
    let mut it = hay.iter();
    needle.iter().all(|n| it.any(|h| h == n))
}

/// Degree of match between one COBOL call and one target sequence:
/// verb/kind agreement, anchor-literal overlap (Jaccard over the
/// resource-object tokens), and placeholder-arity fit. Zero when the
/// sequence fits no pattern of the call's kind.
pub fn score_match(
    call: &ExternalCall,
    seq: &TargetCallSeq,
    map: &CjResourceMap,
    config: &MatchConfig,
) -> f64 {
    let seq_callees: Vec<String> = seq.calls.iter().map(|c| norm(&c.callee)).collect();
    let kind_patterns: Vec<&ResourcePattern> = map
        .patterns
        .iter()
        .filter(|p| p.kind == call.kind)
        .collect();
    let fits = |p: &ResourcePattern| {
        let pattern_callees: Vec<String> =
            p.target_sequence.iter().map(|c| norm(&c.callee)).collect();
        is_subsequence(&pattern_callees, &seq_callees)
    };
    if !kind_patterns.iter().any(|p| fits(p)) {
        return 0.0; // kind mismatch
    }
    let verb_component = if kind_patterns
        .iter()
        .any(|p| p.verb == call.verb && fits(p))
    {
        1.0
    } else {
        0.0
    };

    let a = call_anchor_tokens(call);
    let b = seq_anchor_tokens(seq);
    let inter = a.intersection(&b).count();
    let union = a.union(&b).count();
    let anchor_component = if union == 0 {
        1.0
    } else {
        inter as f64 / union as f64
    };

    let host_vars = ordered_host_vars(call).len();
    let slots = seq.var_slot_count();
    let arity_component = if host_vars == 0 && slots == 0 {
        1.0
    } else {
        host_vars.min(slots) as f64 / host_vars.max(slots) as f64
    };

    config.verb_weight * verb_component
        + config.anchor_weight * anchor_component
        + config.arity_weight * arity_component
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MatchedPair {
    pub cobol_call_id: usize,
    pub seq_id: usize,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VarArgEntry {
    pub call_id: usize,
    pub var: String,
    pub seq_id: usize,
    pub call_index: usize,
    pub arg_slot: usize,
    pub direction: Direction,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Matching {
    pub pairs: Vec<MatchedPair>,
    pub unmatched_source: Vec<usize>,
    pub unmatched_target: Vec<usize>,
    pub var_arg_map: Vec<VarArgEntry>,
    /// Variables of unmatched or demoted calls, with the call they belong to.
    pub unmappable_vars: Vec<(usize, String)>,
}

impl Matching {
    pub fn pair_for_call(&self, call_id: usize) -> Option<&MatchedPair> {
        self.pairs.iter().find(|p| p.cobol_call_id == call_id)
    }

    pub fn slot_for(&self, call_id: usize, var: &str) -> Option<&VarArgEntry> {
        self.var_arg_map
            .iter()
            .find(|e| e.call_id == call_id && e.var == var)
    }
}

/// Exact maximum-weight monotone matching in integer thousandths.
/// Exposed for the optimality property tests.
pub fn align_monotone(
    n_calls: usize,
    n_seqs: usize,
    weight_milli: &dyn Fn(usize, usize) -> u64,
    theta_milli: u64,
) -> Vec<(usize, usize, u64)> {
    // best[i][j]: max total weight using calls[i..] and seqs[j..]
    let mut best = vec![vec![0u64; n_seqs + 1]; n_calls + 1];
    for i in (0..n_calls).rev() {
        for j in (0..n_seqs).rev() {
            let mut b = best[i + 1][j].max(best[i][j + 1]);
            let w = weight_milli(i, j);
            if w >= theta_milli && w > 0 {
                b = b.max(w + best[i + 1][j + 1]);
            }
            best[i][j] = b;
        }
    }
    // reconstruct the lexicographically smallest optimal pair list: scan
    // candidate first-pairs in (call, seq) order
    let mut out = Vec::new();
    let (mut i, mut j) = (0usize, 0usize);
    while i < n_calls && j < n_seqs {
        let target = best[i][j];
        if target == 0 {
            break;
        }
        let mut advanced = false;
        'scan: for ci in i..n_calls {
            for sj in j..n_seqs {
                let w = weight_milli(ci, sj);
                if w >= theta_milli && w > 0 && w + best[ci + 1][sj + 1] == target {
                    out.push((ci, sj, w));
                    i = ci + 1;
                    j = sj + 1;
                    advanced = true;
                    break 'scan;
                }
            }
        }
        if !advanced {
            break;
        }
    }
    out
}

fn to_milli(w: f64) -> u64 {
    (w * 1000.0).round().max(0.0) as u64
}

/// Position-respecting diversified matching of calls to sequences,
/// maximizing total weight. Injective on both sides; both coordinates
/// strictly increase along the pair list.
pub fn match_calls(
    calls: &[ExternalCall],
    seqs: &[TargetCallSeq],
    map: &CjResourceMap,
    config: &MatchConfig,
) -> Matching {
    let weights: Vec<Vec<u64>> = calls
        .iter()
        .map(|c| {
            seqs.iter()
                .map(|s| to_milli(score_match(c, s, map, config)))
                .collect()
        })
        .collect();
    let theta = to_milli(config.theta);
    let raw = align_monotone(
        calls.len(),
        seqs.len(),
        &|i, j| weights[i][j],
        theta,
    );

    let mut matching = Matching::default();
    for (i, j, w) in raw {
        matching.pairs.push(MatchedPair {
            cobol_call_id: calls[i].call_id,
            seq_id: seqs[j].seq_id,
            weight: w as f64 / 1000.0,
        });
    }
    let matched_calls: BTreeSet<usize> =
        matching.pairs.iter().map(|p| p.cobol_call_id).collect();
    let matched_seqs: BTreeSet<usize> = matching.pairs.iter().map(|p| p.seq_id).collect();
    for c in calls {
        if !matched_calls.contains(&c.call_id) {
            matching.unmatched_source.push(c.call_id);
        }
    }
    for s in seqs {
        if !matched_seqs.contains(&s.seq_id) {
            matching.unmatched_target.push(s.seq_id);
        }
    }
    matching
}

/// Instantiate the winning pattern's parameter map for every matched pair.
/// Arity conflicts demote the pair to unmatched; variables of unmatched
/// calls are reported unmappable.
pub fn derive_var_arg_map(
    mut matching: Matching,
    calls: &[ExternalCall],
    seqs: &[TargetCallSeq],
    map: &CjResourceMap,
    _config: &MatchConfig,
) -> Matching {
    let call_by_id: BTreeMap<usize, &ExternalCall> =
        calls.iter().map(|c| (c.call_id, c)).collect();
    let seq_by_id: BTreeMap<usize, &TargetCallSeq> =
        seqs.iter().map(|s| (s.seq_id, s)).collect();

    let mut demoted: Vec<usize> = Vec::new();
    let mut entries: Vec<VarArgEntry> = Vec::new();
    for pair in &matching.pairs {
        let call = call_by_id[&pair.cobol_call_id];
        let seq = seq_by_id[&pair.seq_id];
        // deterministic winner: first corpus pattern of the call's
        // kind/verb whose callee shape fits this sequence, else first
        // kind/verb pattern at all
        let seq_callees: Vec<String> = seq.calls.iter().map(|c| norm(&c.callee)).collect();
        let candidates = map.lookup(call.kind, &call.verb);
        let pattern = candidates
            .iter()
            .find(|p| {
                let pc: Vec<String> =
                    p.target_sequence.iter().map(|c| norm(&c.callee)).collect();
                is_subsequence(&pc, &seq_callees)
            })
            .or_else(|| candidates.first())
            .copied();
        let Some(pattern) = pattern else {
            demoted.push(pair.cobol_call_id);
            continue;
        };
        let host_vars = ordered_host_vars(call);
        let mut pair_entries = Vec::new();
        let mut ok = true;
        for (k, (var, _)) in host_vars.iter().enumerate() {
            let placeholder = format!("H{}", k + 1);
            let Some(entry) = pattern
                .param_map
                .iter()
                .find(|e| e.placeholder == placeholder)
            else {
                ok = false; // pattern has fewer slots than the statement
                break;
            };
            let valid = seq
                .calls
                .get(entry.target.call_index)
                .map(|c| entry.target.arg_slot < c.arg_count())
                .unwrap_or(false);
            if !valid {
                ok = false; // SlotArityMismatch
                break;
            }
            pair_entries.push(VarArgEntry {
                call_id: call.call_id,
                var: var.clone(),
                seq_id: seq.seq_id,
                call_index: entry.target.call_index,
                arg_slot: entry.target.arg_slot,
                direction: entry.direction,
            });
        }
        if ok {
            entries.extend(pair_entries);
        } else {
            demoted.push(pair.cobol_call_id);
        }
    }

    for call_id in &demoted {
        let seq_id = matching.pair_for_call(*call_id).map(|p| p.seq_id);
        matching.pairs.retain(|p| p.cobol_call_id != *call_id);
        matching.unmatched_source.push(*call_id);
        if let Some(s) = seq_id {
            matching.unmatched_target.push(s);
        }
    }
    matching.unmatched_source.sort_unstable();
    matching.unmatched_target.sort_unstable();
    matching.var_arg_map = entries;

    for call_id in &matching.unmatched_source {
        if let Some(call) = call_by_id.get(call_id) {
            for (var, _) in ordered_host_vars(call) {
                matching.unmappable_vars.push((*call_id, var));
            }
        }
    }
    matching
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_program;
    use crate::ir::lower;

    fn select_call() -> ExternalCall {
        let ast = parse_program(
            "\
IDENTIFICATION DIVISION.
PROGRAM-ID. M.
DATA DIVISION.
WORKING-STORAGE SECTION.
01 WS-NAME PIC X(10).
01 WS-ID PIC 9(5).
PROCEDURE DIVISION.
MAIN.
    EXEC SQL SELECT NAME INTO :WS-NAME FROM CUST WHERE ID = :WS-ID END-EXEC.
    STOP RUN.
",
        )
        .unwrap();
        lower(&ast).unwrap().external_calls[0].clone()
    }

    fn jdbc_seq(seq_id: usize, table: &str) -> TargetCallSeq {
        TargetCallSeq {
            seq_id,
            calls: vec![
                TargetCall {
                    callee: "prepareStatement".into(),
                    args: vec![TargetArg::Lit {
                        lit: format!("SELECT NAME FROM {table} WHERE ID = ?"),
                    }],
                },
                TargetCall {
                    callee: "setInt".into(),
                    args: vec![
                        TargetArg::Lit { lit: "1".into() },
                        TargetArg::Var { var: "wsId".into() },
                    ],
                },
                TargetCall {
                    callee: "executeQuery".into(),
                    args: vec![],
                },
                TargetCall {
                    callee: "getString".into(),
                    args: vec![TargetArg::Var {
                        var: "wsName".into(),
                    }],
                },
            ],
            source_span: None,
        }
    }

    fn corpus() -> CjResourceMap {
        let mut map = CjResourceMap::default();
        map.add(generalize_pair(&select_call(), &jdbc_seq(0, "CUST")).unwrap());
        map
    }

    #[test]
    fn generalize_links_placeholders_by_name() {
        let p = generalize_pair(&select_call(), &jdbc_seq(0, "CUST")).unwrap();
        assert_eq!(p.kind, CallKind::Sql);
        assert_eq!(p.verb, "SELECT");
        // H1 = WS-NAME -> getString slot; H2 = WS-ID -> setInt arg 1
        assert_eq!(
            p.param_map[0],
            ParamMapEntry {
                placeholder: "H1".into(),
                target: SlotRef {
                    call_index: 3,
                    arg_slot: 0
                },
                direction: Direction::ResourceInput,
            }
        );
        assert_eq!(
            p.param_map[1],
            ParamMapEntry {
                placeholder: "H2".into(),
                target: SlotRef {
                    call_index: 1,
                    arg_slot: 1
                },
                direction: Direction::ResourceOutput,
            }
        );
        // the shared table anchor is abstracted out of the template
        assert!(p.source_template.contains("\u{27e8}A1\u{27e9}"));
        assert!(!p.source_template.contains("CUST"));
    }

    #[test]
    fn generalize_is_idempotent_under_dedup() {
        let mut map = CjResourceMap::default();
        let p = generalize_pair(&select_call(), &jdbc_seq(0, "CUST")).unwrap();
        map.add(p.clone());
        map.add(p);
        assert_eq!(map.patterns.len(), 1);
    }

    #[test]
    fn zero_shared_tokens_is_no_anchor() {
        let seq = TargetCallSeq {
            seq_id: 0,
            calls: vec![TargetCall {
                callee: "frobnicate".into(),
                args: vec![TargetArg::Lit {
                    lit: "unrelated text".into(),
                }],
            }],
            source_span: None,
        };
        assert_eq!(
            generalize_pair(&select_call(), &seq),
            Err(MapError::NoAnchor)
        );
    }

    #[test]
    fn exact_instance_scores_one() {
        let map = corpus();
        let score = score_match(
            &select_call(),
            &jdbc_seq(0, "CUST"),
            &map,
            &MatchConfig::default(),
        );
        assert!((score - 1.0).abs() < 1e-9, "score = {score}");
    }

    #[test]
    fn different_table_drops_the_anchor_component() {
        let map = corpus();
        let score = score_match(
            &select_call(),
            &jdbc_seq(0, "ORDERS"),
            &map,
            &MatchConfig::default(),
        );
        // 0.4 (verb/kind) + 0 (anchors) + 0.3 (arity) = 0.7
        assert!((score - 0.7).abs() < 1e-9, "score = {score}");
    }

    #[test]
    fn kind_mismatch_scores_zero() {
        let map = corpus();
        let file_seq = TargetCallSeq {
            seq_id: 1,
            calls: vec![TargetCall {
                callee: "write".into(),
                args: vec![TargetArg::Var { var: "rec".into() }],
            }],
            source_span: None,
        };
        let score = score_match(&select_call(), &file_seq, &map, &MatchConfig::default());
        assert_eq!(score, 0.0);
    }

    #[test]
    fn identical_calls_match_diversified_one_to_one() {
        let map = corpus();
        let mut c1 = select_call();
        let mut c2 = select_call();
        c1.call_id = 0;
        c2.call_id = 1;
        let seqs = vec![jdbc_seq(0, "CUST"), jdbc_seq(1, "CUST")];
        let m = match_calls(&[c1, c2], &seqs, &map, &MatchConfig::default());
        assert_eq!(m.pairs.len(), 2);
        assert_eq!(
            (m.pairs[0].cobol_call_id, m.pairs[0].seq_id),
            (0, 0)
        );
        assert_eq!(
            (m.pairs[1].cobol_call_id, m.pairs[1].seq_id),
            (1, 1)
        );
        assert!(m.unmatched_source.is_empty() && m.unmatched_target.is_empty());
    }

    #[test]
    fn empty_inputs_empty_matching() {
        let m = match_calls(&[], &[], &corpus(), &MatchConfig::default());
        assert_eq!(m, Matching::default());
    }

    #[test]
    fn dp_equals_brute_force_on_small_grids() {
        // every weight matrix over {0, 0.3, 0.7, 1.0} for 3 calls x 2 seqs
        let grid = [0u64, 300, 700, 1000];
        let (n, m) = (3usize, 2usize);
        let cells = n * m;
        let mut combo = vec![0usize; cells];
        loop {
            let w = |i: usize, j: usize| grid[combo[i * m + j]];
            let got: u64 = align_monotone(n, m, &w, 250)
                .iter()
                .map(|(_, _, w)| w)
                .sum();
            let want = brute_force_max(n, m, &w, 250);
            assert_eq!(got, want, "combo {combo:?}");
            // odometer
            let mut k = 0;
            loop {
                if k == cells {
                    return;
                }
                combo[k] += 1;
                if combo[k] < grid.len() {
                    break;
                }
                combo[k] = 0;
                k += 1;
            }
        }
    }

    /// Independent oracle: all monotone injective matchings by recursion.
    pub fn brute_force_max(
        n: usize,
        m: usize,
        w: &dyn Fn(usize, usize) -> u64,
        theta: u64,
    ) -> u64 {
        fn rec(i: usize, j: usize, n: usize, m: usize, w: &dyn Fn(usize, usize) -> u64, theta: u64) -> u64 {
            if i >= n || j >= m {
                return 0;
            }
            let skip = rec(i + 1, j, n, m, w, theta).max(rec(i, j + 1, n, m, w, theta));
            let wij = w(i, j);
            if wij >= theta && wij > 0 {
                skip.max(wij + rec(i + 1, j + 1, n, m, w, theta))
            } else {
                skip
            }
        }
        rec(0, 0, n, m, w, theta)
    }

    #[test]
    fn conservation_and_monotonicity_hold() {
        let map = corpus();
        let mut calls = vec![select_call(), select_call(), select_call()];
        for (i, c) in calls.iter_mut().enumerate() {
            c.call_id = i;
        }
        let seqs = vec![jdbc_seq(0, "CUST"), jdbc_seq(1, "OTHER")];
        let m = match_calls(&calls, &seqs, &map, &MatchConfig::default());
        assert_eq!(m.pairs.len() + m.unmatched_source.len(), calls.len());
        assert_eq!(m.pairs.len() + m.unmatched_target.len(), seqs.len());
        for w in m.pairs.windows(2) {
            assert!(w[0].cobol_call_id < w[1].cobol_call_id);
            assert!(w[0].seq_id < w[1].seq_id);
        }
    }

    #[test]
    fn var_arg_map_instantiates_the_pattern() {
        let map = corpus();
        let call = select_call();
        let seqs = vec![jdbc_seq(0, "CUST")];
        let m = match_calls(std::slice::from_ref(&call), &seqs, &map, &MatchConfig::default());
        let m = derive_var_arg_map(m, &[call], &seqs, &map, &MatchConfig::default());
        assert_eq!(m.var_arg_map.len(), 2);
        let name_slot = m.slot_for(0, "WS-NAME").unwrap();
        assert_eq!((name_slot.call_index, name_slot.arg_slot), (3, 0));
    }

    #[test]
    fn arity_conflict_demotes_to_unmatched() {
        let map = corpus();
        let call = select_call();
        // a compatible-looking sequence that is too short to instantiate
        let seqs = vec![TargetCallSeq {
            seq_id: 0,
            calls: vec![
                TargetCall {
                    callee: "prepareStatement".into(),
                    args: vec![TargetArg::Lit {
                        lit: "SELECT NAME FROM CUST WHERE ID = ?".into(),
                    }],
                },
                TargetCall {
                    callee: "setInt".into(),
                    args: vec![TargetArg::Lit { lit: "1".into() }],
                },
                TargetCall {
                    callee: "executeQuery".into(),
                    args: vec![],
                },
                TargetCall {
                    callee: "getString".into(),
                    args: vec![],
                },
            ],
            source_span: None,
        }];
        let m = match_calls(std::slice::from_ref(&call), &seqs, &map, &MatchConfig::default());
        assert_eq!(m.pairs.len(), 1);
        let m = derive_var_arg_map(m, &[call], &seqs, &map, &MatchConfig::default());
        assert!(m.pairs.is_empty());
        assert_eq!(m.unmatched_source, vec![0]);
        assert_eq!(m.unmatched_target, vec![0]);
        assert!(m
            .unmappable_vars
            .iter()
            .any(|(_, v)| v == "WS-NAME"));
    }

    #[test]
    fn unmatched_calls_report_unmappable_vars() {
        let map = corpus();
        let call = select_call();
        let m = match_calls(std::slice::from_ref(&call), &[], &map, &MatchConfig::default());
        let m = derive_var_arg_map(m, &[call], &[], &map, &MatchConfig::default());
        assert_eq!(m.unmappable_vars.len(), 2);
    }
}
