//! Bowtie-style causality graph: events, agent actions, prevention barriers,
//! logical gates and negative consequences.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::knowledge::condition::{NodeId, TaskId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GateType {
    And,
    Or,
}

impl GateType {
    pub fn as_str(self) -> &'static str {
        match self {
            GateType::And => "AND",
            GateType::Or => "OR",
        }
    }
}

impl FromStr for GateType {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "AND" => Ok(GateType::And),
            "OR" => Ok(GateType::Or),
            _ => Err(Error::Schema(format!("unsupported gate_type `{s}`"))),
        }
    }
}

/// Kind of negative consequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Category {
    /// Victims, injuries, material damage.
    Gravity,
    /// Breaches of rules, norms, orders or moral values.
    Violations,
    /// Loss of performance or licence points.
    Points,
}

impl Category {
    pub const ALL: [Category; 3] = [Category::Gravity, Category::Violations, Category::Points];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::Gravity => "GRAVITY",
            Category::Violations => "VIOLATIONS",
            Category::Points => "POINTS",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Category {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "GRAVITY" => Ok(Category::Gravity),
            "VIOLATIONS" => Ok(Category::Violations),
            "POINTS" => Ok(Category::Points),
            _ => Err(Error::Schema(format!("unknown consequence category `{s}`"))),
        }
    }
}

pub const MAX_SEVERITY: u8 = 5;

#[derive(Debug, Clone, PartialEq)]
pub enum NodeKind {
    Event { lead_time: Option<f64> },
    Action { task_ref: TaskId, lead_time: Option<f64> },
    Barrier { task_ref: TaskId },
    Gate(GateType),
    Consequence { category: Category, severity: u8 },
}

impl NodeKind {
    pub fn name(&self) -> &'static str {
        match self {
            NodeKind::Event { .. } => "EVENT",
            NodeKind::Action { .. } => "ACTION",
            NodeKind::Barrier { .. } => "BARRIER",
            NodeKind::Gate(_) => "GATE",
            NodeKind::Consequence { .. } => "CONSEQUENCE",
        }
    }

    pub fn task_ref(&self) -> Option<&TaskId> {
        match self {
            NodeKind::Action { task_ref, .. } | NodeKind::Barrier { task_ref } => Some(task_ref),
            _ => None,
        }
    }

    pub fn lead_time(&self) -> Option<f64> {
        match self {
            NodeKind::Event { lead_time } | NodeKind::Action { lead_time, .. } => *lead_time,
            _ => None,
        }
    }

    pub fn is_barrier(&self) -> bool {
        matches!(self, NodeKind::Barrier { .. })
    }

    pub fn is_action(&self) -> bool {
        matches!(self, NodeKind::Action { .. })
    }

    pub fn is_event(&self) -> bool {
        matches!(self, NodeKind::Event { .. })
    }

    pub fn is_consequence(&self) -> bool {
        matches!(self, NodeKind::Consequence { .. })
    }

    pub fn is_and_gate(&self) -> bool {
        matches!(self, NodeKind::Gate(GateType::And))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CausalNode {
    pub id: NodeId,
    pub label: String,
    pub kind: NodeKind,
}

impl CausalNode {
    pub fn new(id: NodeId, kind: NodeKind) -> Self {
        CausalNode {
            label: id.to_string(),
            id,
            kind,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeKind {
    Causal,
    /// From a specific event to the more general event it is a kind of.
    Subsumption,
}

impl EdgeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgeKind::Causal => "CAUSAL",
            EdgeKind::Subsumption => "SUBSUMPTION",
        }
    }
}

impl FromStr for EdgeKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "CAUSAL" => Ok(EdgeKind::Causal),
            "SUBSUMPTION" => Ok(EdgeKind::Subsumption),
            _ => Err(Error::Schema(format!("unknown edge kind `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub from: NodeId,
    pub to: NodeId,
    pub kind: EdgeKind,
}

impl Edge {
    pub fn causal(from: NodeId, to: NodeId) -> Self {
        Edge {
            from,
            to,
            kind: EdgeKind::Causal,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CausalityGraph {
    pub nodes: BTreeMap<NodeId, CausalNode>,
    pub edges: BTreeSet<Edge>,
}

impl CausalityGraph {
    pub fn node(&self, id: &str) -> Result<&CausalNode> {
        self.nodes
            .get(id)
            .ok_or_else(|| Error::UnknownNode(id.to_string()))
    }

    pub fn successors<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a NodeId> + 'a {
        self.edges
            .iter()
            .filter(move |e| e.from.as_str() == id)
            .map(|e| &e.to)
    }

    pub fn predecessors<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a NodeId> + 'a {
        self.edges
            .iter()
            .filter(move |e| e.to.as_str() == id)
            .map(|e| &e.from)
    }

    /// Nodes whose kind references `task`.
    pub fn nodes_for_task<'a>(
        &'a self,
        task: &'a str,
    ) -> impl Iterator<Item = &'a CausalNode> + 'a {
        self.nodes
            .values()
            .filter(move |n| n.kind.task_ref().is_some_and(|t| t.as_str() == task))
    }

    /// Task ids referenced by any ACTION or BARRIER node.
    pub fn referenced_tasks(&self) -> BTreeSet<&TaskId> {
        self.nodes.values().filter_map(|n| n.kind.task_ref()).collect()
    }
}
