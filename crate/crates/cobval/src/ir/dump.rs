//! IR inspection output: JSON and Graphviz DOT.

use super::*;

pub fn to_json(ir: &IrProgram) -> String {
    serde_json::to_string_pretty(ir).expect("IR serializes")
}

/// One digraph per paragraph CFG.
pub fn to_dot(ir: &IrProgram) -> String {
    let mut out = String::new();
    for (name, cfg) in &ir.cfgs {
        out.push_str(&format!("digraph \"{name}\" {{\n"));
        out.push_str("  node [shape=box, fontname=\"monospace\"];\n");
        for (id, node) in cfg.nodes.iter().enumerate() {
            let label = match &node.op {
                IrOp::Assign { dst, .. } => format!("{id}: {dst} := ..."),
                IrOp::Branch { loop_id, .. } => match loop_id {
                    Some(l) => format!("{id}: branch (loop {l})"),
                    None => format!("{id}: branch"),
                },
                IrOp::Jump { .. } => format!("{id}: jump"),
                IrOp::Call { call_id, .. } => {
                    let call = ir.call(*call_id);
                    format!("{id}: call#{call_id} {}", call.verb)
                }
                IrOp::Emit { .. } => format!("{id}: display"),
                IrOp::Halt => format!("{id}: halt"),
            };
            let shape = if id == cfg.entry {
                ", style=bold"
            } else {
                ""
            };
            out.push_str(&format!("  n{id} [label=\"{label}\"{shape}];\n"));
        }
        for (id, node) in cfg.nodes.iter().enumerate() {
            match &node.op {
                IrOp::Assign { next, .. }
                | IrOp::Jump { next }
                | IrOp::Call { next, .. }
                | IrOp::Emit { next, .. } => {
                    out.push_str(&format!("  n{id} -> n{next};\n"));
                }
                IrOp::Branch {
                    true_to, false_to, ..
                } => {
                    out.push_str(&format!("  n{id} -> n{true_to} [label=\"T\"];\n"));
                    out.push_str(&format!("  n{id} -> n{false_to} [label=\"F\"];\n"));
                }
                IrOp::Halt => {}
            }
        }
        out.push_str("}\n");
    }
    out
}
