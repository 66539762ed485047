use std::fmt::Write;

use crate::knowledge::{CausalityGraph, EdgeKind, NodeKind};

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Graphviz rendering: one statement per node (sorted by id), then one per
/// edge (sorted by endpoints). Byte-identical for equal graphs.
pub fn export_dot(cg: &CausalityGraph) -> String {
    let mut out = String::from("digraph causality {\n");
    for node in cg.nodes.values() {
        let shape = match node.kind {
            NodeKind::Barrier { .. } => "box",
            NodeKind::Gate(_) => "diamond",
            NodeKind::Consequence { .. } => "doubleoctagon",
            NodeKind::Event { .. } | NodeKind::Action { .. } => "ellipse",
        };
        let label = match &node.kind {
            NodeKind::Gate(g) => format!("{}\n{}", node.label, g.as_str()),
            NodeKind::Consequence { category, severity } => {
                format!("{}\n{category} {severity}", node.label)
            }
            _ => node.label.clone(),
        };
        let _ = writeln!(
            out,
            "  {} [shape={shape}, label={}];",
            quote(node.id.as_str()),
            quote(&label)
        );
    }
    for edge in &cg.edges {
        let style = match edge.kind {
            EdgeKind::Causal => "",
            EdgeKind::Subsumption => " [style=dashed]",
        };
        let _ = writeln!(
            out,
            "  {} -> {}{style};",
            quote(edge.from.as_str()),
            quote(edge.to.as_str())
        );
    }
    out.push_str("}\n");
    out
}
