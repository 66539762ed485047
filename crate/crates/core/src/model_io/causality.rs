use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::knowledge::{
    validate_graph_structure, CausalNode, CausalityGraph, Edge, EdgeKind, GateType, NodeId,
    NodeKind, TaskId, MAX_SEVERITY,
};
use crate::model_io::{parse_document, require_ok, to_document, FORMAT_VERSION};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphDoc {
    format_version: u64,
    #[serde(default)]
    nodes: Vec<NodeEntry>,
    #[serde(default)]
    edges: Vec<EdgeEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeEntry {
    id: NodeId,
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    task_ref: Option<TaskId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gate_type: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    category: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    severity: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lead_time: Option<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeEntry {
    from: NodeId,
    to: NodeId,
    #[serde(default = "causal")]
    kind: String,
}

fn causal() -> String {
    EdgeKind::Causal.as_str().to_string()
}

impl NodeEntry {
    fn into_node(self) -> Result<CausalNode> {
        let kind_name = self.kind.to_ascii_uppercase();
        let id = &self.id;
        let forbid = |field: &str, present: bool| -> Result<()> {
            if present {
                Err(Error::Schema(format!(
                    "node `{id}`: field {field} is not allowed on {kind_name}"
                )))
            } else {
                Ok(())
            }
        };
        let require = |field: &str| Error::Schema(format!("node `{id}`: {kind_name} requires {field}"));
        let lead_time = match self.lead_time {
            Some(t) if !(t.is_finite() && t >= 0.0) => {
                return Err(Error::Schema(format!(
                    "node `{id}`: lead_time must be a non-negative number, got {t}"
                )))
            }
            other => other,
        };

        let takes_task = matches!(kind_name.as_str(), "ACTION" | "BARRIER");
        let timed = matches!(kind_name.as_str(), "EVENT" | "ACTION");
        let is_gate = kind_name == "GATE";
        let is_consequence = kind_name == "CONSEQUENCE";
        forbid("task_ref", !takes_task && self.task_ref.is_some())?;
        forbid("lead_time", !timed && lead_time.is_some())?;
        forbid("gate_type", !is_gate && self.gate_type.is_some())?;
        forbid("category", !is_consequence && self.category.is_some())?;
        forbid("severity", !is_consequence && self.severity.is_some())?;

        let kind = match kind_name.as_str() {
            "EVENT" => NodeKind::Event { lead_time },
            "ACTION" => NodeKind::Action {
                task_ref: self.task_ref.ok_or_else(|| require("task_ref"))?,
                lead_time,
            },
            "BARRIER" => NodeKind::Barrier {
                task_ref: self.task_ref.ok_or_else(|| require("task_ref"))?,
            },
            "GATE" => NodeKind::Gate(
                self.gate_type
                    .ok_or_else(|| require("gate_type"))?
                    .parse::<GateType>()?,
            ),
            "CONSEQUENCE" => {
                let category = self.category.ok_or_else(|| require("category"))?.parse()?;
                let severity = self.severity.ok_or_else(|| require("severity"))?;
                let severity = u8::try_from(severity)
                    .ok()
                    .filter(|s| *s <= MAX_SEVERITY)
                    .ok_or_else(|| {
                        Error::Schema(format!(
                            "node `{id}`: severity {severity} outside 0..={MAX_SEVERITY}"
                        ))
                    })?;
                NodeKind::Consequence { category, severity }
            }
            other => return Err(Error::Schema(format!("node `{id}`: unsupported kind `{other}`"))),
        };
        Ok(CausalNode {
            label: self.label.unwrap_or_else(|| self.id.to_string()),
            id: self.id,
            kind,
        })
    }

    fn from_node(n: &CausalNode) -> Self {
        let mut entry = NodeEntry {
            id: n.id.clone(),
            kind: n.kind.name().to_string(),
            label: (n.label != n.id.as_str()).then(|| n.label.clone()),
            task_ref: n.kind.task_ref().cloned(),
            gate_type: None,
            category: None,
            severity: None,
            lead_time: n.kind.lead_time(),
        };
        match n.kind {
            NodeKind::Gate(g) => entry.gate_type = Some(g.as_str().to_string()),
            NodeKind::Consequence { category, severity } => {
                entry.category = Some(category.as_str().to_string());
                entry.severity = Some(i64::from(severity));
            }
            _ => {}
        }
        entry
    }
}

/// Parses a causality document and checks everything that does not need
/// the task model.
pub fn parse_causality_graph(text: &str) -> Result<CausalityGraph> {
    let cg = decode_causality_graph(text)?;
    require_ok(validate_graph_structure(&cg))?;
    Ok(cg)
}

pub(crate) fn decode_causality_graph(text: &str) -> Result<CausalityGraph> {
    let doc: GraphDoc = parse_document(text)?;
    let mut nodes = BTreeMap::new();
    for entry in doc.nodes {
        let node = entry.into_node()?;
        if let Some(prev) = nodes.insert(node.id.clone(), node) {
            return Err(Error::Schema(format!("duplicate node id `{}`", prev.id)));
        }
    }
    let mut edges = std::collections::BTreeSet::new();
    for e in doc.edges {
        let edge = Edge {
            from: e.from,
            to: e.to,
            kind: e.kind.parse()?,
        };
        if !edges.insert(edge.clone()) {
            return Err(Error::Schema(format!("duplicate edge {} -> {}", edge.from, edge.to)));
        }
    }
    Ok(CausalityGraph { nodes, edges })
}

/// Nodes in id order, edges in (from, to, kind) order.
pub fn serialize_causality_graph(cg: &CausalityGraph) -> String {
    let doc = GraphDoc {
        format_version: FORMAT_VERSION,
        nodes: cg.nodes.values().map(NodeEntry::from_node).collect(),
        edges: cg
            .edges
            .iter()
            .map(|e| EdgeEntry {
                from: e.from.clone(),
                to: e.to.clone(),
                kind: e.kind.as_str().to_string(),
            })
            .collect(),
    };
    to_document(&doc)
}
