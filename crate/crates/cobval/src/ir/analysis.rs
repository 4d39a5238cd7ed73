//! CFG analyses: input/output variable discovery and bounded path counting.

use super::eval::{eval_cond, Evaluated};
use super::*;
use crate::value::Value;
use std::collections::{BTreeMap, BTreeSet};

/// Reads and writes of one node. External calls write their resource inputs
/// (values arrive from the resource) and read their resource outputs.
fn node_accesses(ir: &IrProgram, node: &IrNode) -> (Vec<String>, Vec<String>) {
    match &node.op {
        IrOp::Assign { dst, expr, .. } => (
            expr.vars().iter().map(|s| s.to_string()).collect(),
            vec![dst.clone()],
        ),
        IrOp::Branch { cond, .. } => {
            (cond.vars().iter().map(|s| s.to_string()).collect(), vec![])
        }
        IrOp::Call { call_id, .. } => {
            let call = ir.call(*call_id);
            (
                call.resource_outputs.clone(),
                call.resource_inputs.clone(),
            )
        }
        IrOp::Emit { args, .. } => (
            args.iter()
                .flat_map(|a| a.vars())
                .map(|s| s.to_string())
                .collect(),
            vec![],
        ),
        IrOp::Jump { .. } | IrOp::Halt => (vec![], vec![]),
    }
}

/// Inputs: variables that on some path are read before being written
/// (a must-write dataflow over the CFG). Outputs: variables written by the
/// program itself: external-call injections do not count as program writes.
pub fn io_variables(
    ir: &IrProgram,
    paragraph: &str,
) -> Result<(Vec<String>, Vec<String>), LowerError> {
    let cfg = ir.cfg(paragraph)?;
    let universe: BTreeSet<String> = ir.var_table.keys().cloned().collect();

    // predecessor lists
    let mut preds: Vec<Vec<NodeId>> = vec![Vec::new(); cfg.nodes.len()];
    for id in 0..cfg.nodes.len() {
        for s in cfg.successors(id) {
            preds[s].push(id);
        }
    }

    // must-written-at-entry fixpoint; non-entry nodes start at ⊤
    let mut must: Vec<BTreeSet<String>> = vec![universe.clone(); cfg.nodes.len()];
    must[cfg.entry] = BTreeSet::new();
    let mut changed = true;
    while changed {
        changed = false;
        for id in 0..cfg.nodes.len() {
            if id == cfg.entry {
                continue;
            }
            let mut inter: Option<BTreeSet<String>> = None;
            for &p in &preds[id] {
                let (_, writes) = node_accesses(ir, &cfg.nodes[p]);
                let mut out = must[p].clone();
                out.extend(writes);
                inter = Some(match inter {
                    None => out,
                    Some(acc) => acc.intersection(&out).cloned().collect(),
                });
            }
            let inter = inter.unwrap_or_else(|| universe.clone());
            if inter != must[id] {
                must[id] = inter;
                changed = true;
            }
        }
    }

    let reachable = reachable_nodes(cfg);
    let mut inputs = BTreeSet::new();
    let mut outputs = BTreeSet::new();
    for id in 0..cfg.nodes.len() {
        if !reachable[id] {
            continue;
        }
        let (reads, _) = node_accesses(ir, &cfg.nodes[id]);
        for r in reads {
            if !must[id].contains(&r) {
                inputs.insert(r);
            }
        }
        if let IrOp::Assign { dst, .. } = &cfg.nodes[id].op {
            outputs.insert(dst.clone());
        }
    }
    Ok((
        inputs.into_iter().collect(),
        outputs.into_iter().collect(),
    ))
}

fn reachable_nodes(cfg: &Cfg) -> Vec<bool> {
    let mut seen = vec![false; cfg.nodes.len()];
    let mut stack = vec![cfg.entry];
    while let Some(n) = stack.pop() {
        if seen[n] {
            continue;
        }
        seen[n] = true;
        stack.extend(cfg.successors(n));
    }
    seen
}

/// Cap on counted paths; fixtures sit far below this.
pub const PATH_COUNT_CAP: u64 = 1_000_000;

/// Initial constant store for paragraph analyses: every variable at its
/// zero/spaces default, paragraph inputs unknown.
pub fn input_unknown_store(
    ir: &IrProgram,
    paragraph: &str,
) -> BTreeMap<String, Option<Value>> {
    let mut store: BTreeMap<String, Option<Value>> = BTreeMap::new();
    for (name, pic) in &ir.var_table {
        store.insert(name.clone(), Some(pic.default_value()));
    }
    if let Ok((inputs, _)) = io_variables(ir, paragraph) {
        for v in inputs {
            store.insert(v, None);
        }
    }
    store
}

/// Count distinct bounded execution paths by DFS with a per-loop iteration
/// cap of `unroll_k`. The walk propagates constants: a branch whose condition
/// is statically decided follows only the live arm, so paths that no input
/// could ever drive are not counted. External calls invalidate the constant
/// knowledge of their resource inputs.
pub fn bounded_path_count(ir: &IrProgram, paragraph: &str, unroll_k: u32) -> u64 {
    let Ok(cfg) = ir.cfg(paragraph) else {
        return 0;
    };
    let mut store = input_unknown_store(ir, paragraph);
    let mut budget = PATH_COUNT_CAP;
    walk(ir, cfg, cfg.entry, &mut store, &mut BTreeMap::new(), unroll_k, &mut budget)
}

pub(crate) fn lookup_in<'a>(
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

fn walk(
    ir: &IrProgram,
    cfg: &Cfg,
    node: NodeId,
    store: &mut BTreeMap<String, Option<Value>>,
    loop_counts: &mut BTreeMap<usize, u32>,
    unroll_k: u32,
    budget: &mut u64,
) -> u64 {
    if *budget == 0 {
        return 0;
    }
    match &cfg.nodes[node].op {
        IrOp::Halt => {
            *budget -= 1;
            1
        }
        IrOp::Jump { next } => walk(ir, cfg, *next, store, loop_counts, unroll_k, budget),
        IrOp::Emit { next, .. } => walk(ir, cfg, *next, store, loop_counts, unroll_k, budget),
        IrOp::Assign { dst, expr, next } => {
            let value = match super::eval::eval_expr(expr, &lookup_in(ir, store)) {
                Ok(Some(ev)) => ir
                    .pic(dst)
                    .and_then(|pic| super::eval::store(&ev, pic).ok()),
                _ => None,
            };
            let old = store.insert(dst.clone(), value);
            let n = walk(ir, cfg, *next, store, loop_counts, unroll_k, budget);
            if let Some(old) = old {
                store.insert(dst.clone(), old);
            }
            n
        }
        IrOp::Call { call_id, next } => {
            let call = ir.call(*call_id);
            let mut olds = Vec::new();
            for v in &call.resource_inputs {
                olds.push((v.clone(), store.insert(v.clone(), None)));
            }
            let n = walk(ir, cfg, *next, store, loop_counts, unroll_k, budget);
            for (v, old) in olds.into_iter().rev() {
                if let Some(old) = old {
                    store.insert(v, old);
                }
            }
            n
        }
        IrOp::Branch {
            cond,
            true_to,
            false_to,
            loop_id,
        } => {
            let decided = eval_cond(cond, &lookup_in(ir, store)).unwrap_or(None);
            let iterations = loop_id
                .map(|l| *loop_counts.get(&l).unwrap_or(&0))
                .unwrap_or(0);
            let forced_exit = loop_id.is_some() && iterations >= unroll_k;

            let mut total = 0u64;
            // true arm (loop exit for headers)
            if decided != Some(false) {
                total += walk(ir, cfg, *true_to, store, loop_counts, unroll_k, budget);
            }
            // false arm (loop body for headers), unless the cap forces exit
            if decided != Some(true) && !forced_exit {
                if let Some(l) = loop_id {
                    *loop_counts.entry(*l).or_insert(0) += 1;
                    total = total
                        .saturating_add(walk(ir, cfg, *false_to, store, loop_counts, unroll_k, budget));
                    *loop_counts.get_mut(l).unwrap() -= 1;
                } else {
                    total = total
                        .saturating_add(walk(ir, cfg, *false_to, store, loop_counts, unroll_k, budget));
                }
            }
            total
        }
    }
}

/// Branch and bounded-path counts for one paragraph.
pub fn branch_inventory(ir: &IrProgram, paragraph: &str, unroll_k: u32) -> (usize, u64) {
    let branch_count = ir
        .cfg(paragraph)
        .map(|c| c.branch_edges.len())
        .unwrap_or(0);
    (branch_count, bounded_path_count(ir, paragraph, unroll_k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_program;

    fn ir_of(src: &str) -> IrProgram {
        lower(&parse_program(src).unwrap()).unwrap()
    }

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

    #[test]
    fn straight_line_paragraph_counts() {
        let ir = ir_of(&format!(
            "{HEADER}MAIN.
    MOVE 1 TO WS-A.
    STOP RUN.
"
        ));
        assert_eq!(branch_inventory(&ir, "MAIN", 3), (0, 1));
    }

    #[test]
    fn single_if_counts() {
        let ir = ir_of(&format!(
            "{HEADER}MAIN.
    IF WS-A > 1 MOVE 1 TO WS-B END-IF.
    STOP RUN.
"
        ));
        assert_eq!(branch_inventory(&ir, "MAIN", 3), (2, 2));
    }

    #[test]
    fn def_before_use_is_not_an_input() {
        let ir = ir_of(&format!(
            "{HEADER}MAIN.
    MOVE 5 TO WS-A.
    MOVE WS-A TO WS-B.
    STOP RUN.
"
        ));
        let (inputs, outputs) = io_variables(&ir, "MAIN").unwrap();
        assert!(!inputs.contains(&"WS-A".to_string()));
        assert_eq!(outputs, vec!["WS-A".to_string(), "WS-B".to_string()]);
    }

    #[test]
    fn read_then_write_is_an_input() {
        let ir = ir_of(&format!(
            "{HEADER}MAIN.
    MOVE WS-A TO WS-B.
    MOVE 0 TO WS-A.
    STOP RUN.
"
        ));
        let (inputs, _) = io_variables(&ir, "MAIN").unwrap();
        assert!(inputs.contains(&"WS-A".to_string()));
    }

    #[test]
    fn sqlcode_is_neither_input_nor_output() {
        let ir = ir_of(&format!(
            "{HEADER}MAIN.
    EXEC SQL SELECT C INTO :WS-A FROM T WHERE K = :WS-B END-EXEC.
    IF SQLCODE = 0 MOVE 1 TO WS-I END-IF.
    STOP RUN.
"
        ));
        let (inputs, outputs) = io_variables(&ir, "MAIN").unwrap();
        assert!(!inputs.contains(&"SQLCODE".to_string()));
        assert!(!outputs.contains(&"SQLCODE".to_string()));
        // the WHERE host var is sent to the resource before any write
        assert!(inputs.contains(&"WS-B".to_string()));
        // the INTO target is written by the call, not by the program
        assert!(!outputs.contains(&"WS-A".to_string()));
    }

    #[test]
    fn input_bounded_loop_with_inner_if_matches_enumeration_oracle() {
        // loop over WS-N (an input), inner IF on WS-A (an input)
        let ir = ir_of(&format!(
            "{HEADER}MAIN.
    PERFORM VARYING WS-I FROM 1 BY 1 UNTIL WS-I > WS-N
        IF WS-A > 1
            ADD 1 TO WS-B
        ELSE
            ADD 2 TO WS-B
        END-IF
    END-PERFORM.
    STOP RUN.
"
        ));
        let k = 2;
        let (_, bound) = branch_inventory(&ir, "MAIN", k);
        // Exhaustive oracle, no constant reasoning: every decision sequence
        // with at most k body entries per loop.
        let cfg = ir.cfg("MAIN").unwrap();
        fn enumerate(cfg: &Cfg, node: NodeId, counts: &mut BTreeMap<usize, u32>, k: u32) -> u64 {
            match &cfg.nodes[node].op {
                IrOp::Halt => 1,
                IrOp::Assign { next, .. }
                | IrOp::Jump { next }
                | IrOp::Call { next, .. }
                | IrOp::Emit { next, .. } => enumerate(cfg, *next, counts, k),
                IrOp::Branch {
                    true_to,
                    false_to,
                    loop_id,
                    ..
                } => {
                    let mut total = enumerate(cfg, *true_to, counts, k);
                    let at_cap = loop_id
                        .map(|l| *counts.get(&l).unwrap_or(&0) >= k)
                        .unwrap_or(false);
                    if !at_cap {
                        if let Some(l) = loop_id {
                            *counts.entry(*l).or_insert(0) += 1;
                            total += enumerate(cfg, *false_to, counts, k);
                            *counts.get_mut(l).unwrap() -= 1;
                        } else {
                            total += enumerate(cfg, *false_to, counts, k);
                        }
                    }
                    total
                }
            }
        }
        let oracle = enumerate(cfg, cfg.entry, &mut BTreeMap::new(), k);
        assert_eq!(bound, oracle);
        assert_eq!(bound, 7); // 0 iters, 1 iter x {T,F}, 2 iters x {TT,TF,FT,FF}
    }

    #[test]
    fn constant_driven_loop_counts_one_path() {
        let ir = ir_of(&format!(
            "{HEADER}MAIN.
    PERFORM VARYING WS-I FROM 1 BY 1 UNTIL WS-I > 3
        EVALUATE WS-I
            WHEN 1 MOVE 1 TO WS-A
            WHEN 2 MOVE 2 TO WS-A
            WHEN OTHER MOVE 3 TO WS-A
        END-EVALUATE
    END-PERFORM.
    STOP RUN.
"
        ));
        assert_eq!(bounded_path_count(&ir, "MAIN", 3), 1);
    }
}
