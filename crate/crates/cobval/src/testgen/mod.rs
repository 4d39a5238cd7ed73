//! Coverage-directed path enumeration and test-data generation.

pub mod generate;
pub mod symbolic;

use crate::ir::analysis::input_unknown_store;
use crate::ir::eval::{eval_cond, Evaluated};
use crate::ir::{Cfg, EdgeRef, IrOp, IrProgram, NodeId};
use crate::value::Value;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

pub use generate::{
    generate_tests, self_verify, CoverageReport, CoverageTarget, GenConfig, GenError,
    ResourceValues, TestCase, TestStatus, TestSuite, Verdict,
};
pub use symbolic::{path_condition, ssa_rename, SsaTrace, SymbolicError};

/// One enumerated execution path.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PathTrace {
    pub node_ids: Vec<NodeId>,
    pub branch_decisions: Vec<EdgeRef>,
    /// Body entries per loop id. JSON object keys are strings, so the map
    /// round-trips through a keyed helper.
    #[serde(with = "loop_iteration_keys")]
    pub loop_iterations: BTreeMap<usize, u32>,
}

mod loop_iteration_keys {
    use serde::de::Error;
    use serde::{Deserialize, Deserializer, Serializer};
    use std::collections::BTreeMap;

    pub fn serialize<S: Serializer>(
        map: &BTreeMap<usize, u32>,
        serializer: S,
    ) -> Result<S::Ok, S::Error> {
        serializer.collect_map(map.iter().map(|(k, v)| (k.to_string(), v)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        deserializer: D,
    ) -> Result<BTreeMap<usize, u32>, D::Error> {
        let raw = BTreeMap::<String, u32>::deserialize(deserializer)?;
        raw.into_iter()
            .map(|(k, v)| k.parse::<usize>().map(|k| (k, v)).map_err(D::Error::custom))
            .collect()
    }
}

impl PathTrace {
    /// Identity of a path for dedup and replay comparison.
    pub fn signature(&self) -> &[EdgeRef] {
        &self.branch_decisions
    }
}

/// SplitMix64, kept in-tree so suites are byte-stable across builds.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n.max(1)
    }
}

/// Branch coverage bookkeeping. `weight(e)` counts the uncovered conditional
/// edges reachable from `e`'s target; selection probability at a branch is
/// proportional to `1 + weight`.
#[derive(Clone, Debug)]
pub struct CoverageState {
    pub covered: BTreeSet<EdgeRef>,
    pub weights: BTreeMap<EdgeRef, u64>,
    total_edges: usize,
}

impl CoverageState {
    pub fn new(cfg: &Cfg) -> CoverageState {
        let mut cov = CoverageState {
            covered: BTreeSet::new(),
            weights: BTreeMap::new(),
            total_edges: cfg.branch_edges.len(),
        };
        cov.recompute(cfg);
        cov
    }

    pub fn fully_covered(&self) -> bool {
        self.covered.len() == self.total_edges
    }

    pub fn record(&mut self, trace: &PathTrace, cfg: &Cfg) {
        for d in &trace.branch_decisions {
            self.covered.insert(*d);
        }
        self.recompute(cfg);
    }

    pub fn uncovered(&self, cfg: &Cfg) -> Vec<EdgeRef> {
        cfg.branch_edges
            .iter()
            .filter(|e| !self.covered.contains(e))
            .copied()
            .collect()
    }

    /// Recompute every edge weight by forward reachability from its target.
    pub fn recompute(&mut self, cfg: &Cfg) {
        self.weights.clear();
        for edge in &cfg.branch_edges {
            let target = match &cfg.nodes[edge.node].op {
                IrOp::Branch {
                    true_to, false_to, ..
                } => {
                    if edge.arm {
                        *true_to
                    } else {
                        *false_to
                    }
                }
                _ => continue,
            };
            let mut seen = vec![false; cfg.nodes.len()];
            let mut stack = vec![target];
            while let Some(n) = stack.pop() {
                if seen[n] {
                    continue;
                }
                seen[n] = true;
                stack.extend(cfg.successors(n));
            }
            let weight = cfg
                .branch_edges
                .iter()
                .filter(|e| seen[e.node] && !self.covered.contains(e))
                .count() as u64;
            self.weights.insert(*edge, weight);
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EnumError {
    #[error("path exceeded the step budget of {0}")]
    PathBudgetExceeded(u64),
}

/// Enumerate one path with coverage-weighted random branch selection.
/// Statically decided branches follow their only live arm; loops are forced
/// onto the exit edge after `max_unroll` iterations.
pub fn enumerate_path(
    ir: &IrProgram,
    paragraph: &str,
    cov: &CoverageState,
    max_unroll: u32,
    max_steps: u64,
    rng: &mut SplitMix64,
) -> Result<PathTrace, EnumError> {
    let cfg = ir.cfg(paragraph).expect("paragraph exists");
    let mut store = input_unknown_store(ir, paragraph);
    let mut loop_counts: BTreeMap<usize, u32> = BTreeMap::new();
    let mut trace = PathTrace {
        node_ids: Vec::new(),
        branch_decisions: Vec::new(),
        loop_iterations: BTreeMap::new(),
    };
    let mut node = cfg.entry;
    let mut steps = 0u64;
    loop {
        steps += 1;
        if steps > max_steps {
            return Err(EnumError::PathBudgetExceeded(max_steps));
        }
        trace.node_ids.push(node);
        match &cfg.nodes[node].op {
            IrOp::Halt => {
                trace.loop_iterations = loop_counts;
                return Ok(trace);
            }
            IrOp::Jump { next } | IrOp::Emit { next, .. } => node = *next,
            IrOp::Assign { dst, expr, next } => {
                let v = constant_store_update(ir, dst, expr, &store);
                store.insert(dst.clone(), v);
                node = *next;
            }
            IrOp::Call { call_id, next } => {
                for v in &ir.call(*call_id).resource_inputs {
                    store.insert(v.clone(), None);
                }
                node = *next;
            }
            IrOp::Branch {
                cond,
                true_to,
                false_to,
                loop_id,
            } => {
                let lookup = make_lookup(ir, &store);
                let decided = eval_cond(cond, &lookup).unwrap_or(None);
                let iterations = loop_id
                    .map(|l| *loop_counts.get(&l).unwrap_or(&0))
                    .unwrap_or(0);
                let forced_exit = loop_id.is_some() && iterations >= max_unroll;
                let arm = if forced_exit {
                    true
                } else if let Some(d) = decided {
                    d
                } else {
                    let wt = 1 + cov.weights.get(&EdgeRef { node, arm: true }).unwrap_or(&0);
                    let wf = 1 + cov.weights.get(&EdgeRef { node, arm: false }).unwrap_or(&0);
                    rng.below(wt + wf) < wt
                };
                trace.branch_decisions.push(EdgeRef { node, arm });
                if arm {
                    node = *true_to;
                } else {
                    if let Some(l) = loop_id {
                        *loop_counts.entry(*l).or_insert(0) += 1;
                    }
                    node = *false_to;
                }
            }
        }
    }
}

/// Enumerate every bounded path in deterministic DFS order (true arm first),
/// pruning statically dead arms exactly like `bounded_path_count`.
pub fn enumerate_all_bounded(
    ir: &IrProgram,
    paragraph: &str,
    max_unroll: u32,
    cap: usize,
) -> Vec<PathTrace> {
    let Ok(cfg) = ir.cfg(paragraph) else {
        return Vec::new();
    };
    let mut store = input_unknown_store(ir, paragraph);
    let mut out = Vec::new();
    let mut trace = PathTrace {
        node_ids: Vec::new(),
        branch_decisions: Vec::new(),
        loop_iterations: BTreeMap::new(),
    };
    sweep(
        ir,
        cfg,
        cfg.entry,
        &mut store,
        &mut BTreeMap::new(),
        &mut trace,
        max_unroll,
        cap,
        &mut out,
    );
    out
}

#[allow(clippy::too_many_arguments)]
fn sweep(
    ir: &IrProgram,
    cfg: &Cfg,
    node: NodeId,
    store: &mut BTreeMap<String, Option<Value>>,
    loop_counts: &mut BTreeMap<usize, u32>,
    trace: &mut PathTrace,
    max_unroll: u32,
    cap: usize,
    out: &mut Vec<PathTrace>,
) {
    if out.len() >= cap {
        return;
    }
    trace.node_ids.push(node);
    match &cfg.nodes[node].op {
        IrOp::Halt => {
            let mut done = trace.clone();
            done.loop_iterations = loop_counts.clone();
            out.push(done);
        }
        IrOp::Jump { next } | IrOp::Emit { next, .. } => {
            sweep(ir, cfg, *next, store, loop_counts, trace, max_unroll, cap, out)
        }
        IrOp::Assign { dst, expr, next } => {
            let v = constant_store_update(ir, dst, expr, store);
            let old = store.insert(dst.clone(), v);
            sweep(ir, cfg, *next, store, loop_counts, trace, max_unroll, cap, out);
            if let Some(old) = old {
                store.insert(dst.clone(), old);
            }
        }
        IrOp::Call { call_id, next } => {
            let call = ir.call(*call_id);
            let mut olds = Vec::new();
            for v in &call.resource_inputs {
                olds.push((v.clone(), store.insert(v.clone(), None)));
            }
            sweep(ir, cfg, *next, store, loop_counts, trace, max_unroll, cap, out);
            for (v, old) in olds.into_iter().rev() {
                if let Some(old) = old {
                    store.insert(v, old);
                }
            }
        }
        IrOp::Branch {
            cond,
            true_to,
            false_to,
            loop_id,
        } => {
            let lookup = make_lookup(ir, store);
            let decided = eval_cond(cond, &lookup).unwrap_or(None);
            drop(lookup);
            let iterations = loop_id
                .map(|l| *loop_counts.get(&l).unwrap_or(&0))
                .unwrap_or(0);
            let forced_exit = loop_id.is_some() && iterations >= max_unroll;

            if decided != Some(false) {
                trace.branch_decisions.push(EdgeRef { node, arm: true });
                sweep(ir, cfg, *true_to, store, loop_counts, trace, max_unroll, cap, out);
                trace.branch_decisions.pop();
            }
            if decided != Some(true) && !forced_exit {
                trace.branch_decisions.push(EdgeRef { node, arm: false });
                if let Some(l) = loop_id {
                    *loop_counts.entry(*l).or_insert(0) += 1;
                }
                sweep(ir, cfg, *false_to, store, loop_counts, trace, max_unroll, cap, out);
                if let Some(l) = loop_id {
                    *loop_counts.get_mut(l).unwrap() -= 1;
                }
                trace.branch_decisions.pop();
            }
        }
    }
    trace.node_ids.pop();
}

fn constant_store_update(
    ir: &IrProgram,
    dst: &str,
    expr: &crate::frontend::ast::Expr,
    store: &BTreeMap<String, Option<Value>>,
) -> Option<Value> {
    let lookup = make_lookup(ir, store);
    match crate::ir::eval::eval_expr(expr, &lookup) {
        Ok(Some(ev)) => ir
            .pic(dst)
            .and_then(|pic| crate::ir::eval::store(&ev, pic).ok()),
        _ => None,
    }
}

fn make_lookup<'a>(
    ir: &'a IrProgram,
    store: &'a BTreeMap<String, Option<Value>>,
) -> impl Fn(&str) -> Option<Evaluated> + 'a {
    move |name: &str| {
        store
            .get(name)
            .and_then(|v| v.as_ref())
            .and_then(|v| ir.pic(name).map(|pic| Evaluated::from_value(v, pic)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_program;
    use crate::ir::lower;

    const HEADER: &str = "\
IDENTIFICATION DIVISION.
PROGRAM-ID. T.
DATA DIVISION.
WORKING-STORAGE SECTION.
01 WS-A PIC 9(3).
01 WS-B PIC 9(3).
01 WS-N PIC 9(1).
01 WS-I PIC 9(3).
PROCEDURE DIVISION.
";

    fn ir_of(src: &str) -> IrProgram {
        lower(&parse_program(src).unwrap()).unwrap()
    }

    #[test]
    fn straight_line_trace_is_unique() {
        let ir = ir_of(&format!(
            "{HEADER}MAIN.
    MOVE 1 TO WS-A.
    STOP RUN.
"
        ));
        let cfg = ir.cfg("MAIN").unwrap();
        let cov = CoverageState::new(cfg);
        let mut a = SplitMix64::new(1);
        let mut b = SplitMix64::new(99);
        let ta = enumerate_path(&ir, "MAIN", &cov, 3, 10_000, &mut a).unwrap();
        let tb = enumerate_path(&ir, "MAIN", &cov, 3, 10_000, &mut b).unwrap();
        assert_eq!(ta, tb);
        assert!(ta.branch_decisions.is_empty());
    }

    #[test]
    fn symmetric_weights_split_roughly_evenly() {
        // chi-squared sanity: 10,000 draws on a fresh 50/50 branch must not
        // deviate beyond the 0.001 quantile (10.83 at one degree of freedom)
        let ir = ir_of(&format!(
            "{HEADER}MAIN.
    IF WS-A > 1 MOVE 1 TO WS-B ELSE MOVE 2 TO WS-B END-IF.
    STOP RUN.
"
        ));
        let cfg = ir.cfg("MAIN").unwrap();
        let cov = CoverageState::new(cfg);
        let mut rng = SplitMix64::new(42);
        let draws = 10_000usize;
        let mut truthy = 0usize;
        for _ in 0..draws {
            let t = enumerate_path(&ir, "MAIN", &cov, 3, 10_000, &mut rng).unwrap();
            if t.branch_decisions[0].arm {
                truthy += 1;
            }
        }
        let expected = draws as f64 / 2.0;
        let falsy = (draws - truthy) as f64;
        let chi2 = (truthy as f64 - expected).powi(2) / expected
            + (falsy - expected).powi(2) / expected;
        assert!(chi2 < 10.83, "chi2 = {chi2}, truthy = {truthy}");
    }

    #[test]
    fn loops_never_exceed_the_unroll_bound() {
        let ir = ir_of(&format!(
            "{HEADER}MAIN.
    PERFORM VARYING WS-I FROM 1 BY 1 UNTIL WS-I > WS-N
        ADD 1 TO WS-B
    END-PERFORM.
    STOP RUN.
"
        ));
        let cfg = ir.cfg("MAIN").unwrap();
        let cov = CoverageState::new(cfg);
        let mut rng = SplitMix64::new(7);
        for _ in 0..200 {
            let t = enumerate_path(&ir, "MAIN", &cov, 3, 10_000, &mut rng).unwrap();
            for (_, n) in &t.loop_iterations {
                assert!(*n <= 3);
            }
        }
    }

    #[test]
    fn sweep_agrees_with_bounded_path_count() {
        let ir = ir_of(&format!(
            "{HEADER}MAIN.
    PERFORM VARYING WS-I FROM 1 BY 1 UNTIL WS-I > WS-N
        IF WS-A > 1 ADD 1 TO WS-B ELSE ADD 2 TO WS-B END-IF
    END-PERFORM.
    STOP RUN.
"
        ));
        let all = enumerate_all_bounded(&ir, "MAIN", 2, 10_000);
        let count = crate::ir::bounded_path_count(&ir, "MAIN", 2);
        assert_eq!(all.len() as u64, count);
        // signatures are pairwise distinct
        let sigs: BTreeSet<Vec<EdgeRef>> = all
            .iter()
            .map(|t| t.branch_decisions.clone())
            .collect();
        assert_eq!(sigs.len(), all.len());
    }

    #[test]
    fn weight_prefers_uncovered_rich_arm() {
        // one arm leads to two more conditionals, the other is empty
        let ir = ir_of(&format!(
            "{HEADER}MAIN.
    IF WS-A > 1
        IF WS-B > 1 MOVE 1 TO WS-I END-IF
        IF WS-N > 1 MOVE 2 TO WS-I END-IF
    END-IF.
    STOP RUN.
"
        ));
        let cfg = ir.cfg("MAIN").unwrap();
        let cov = CoverageState::new(cfg);
        let outer = cfg
            .branch_edges
            .iter()
            .map(|e| (e, cov.weights[e]))
            .max_by_key(|(_, w)| *w)
            .unwrap();
        assert_eq!(outer.1, 4, "true arm of the outer IF sees 4 uncovered edges");
    }
}
