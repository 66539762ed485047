//! Reachability and propagation semantics over the causality graph.

mod index;
mod propagation;
mod reachability;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::knowledge::{Category, NodeId, NodeKind, TaskId};

pub use index::GraphIndex;
pub use propagation::{propagate, FiringState, Propagator};
pub(crate) use propagation::Inputs;
pub use reachability::{
    common_and_descendant, common_and_gates, negative_actions, negative_barriers,
    unguarded_consequences,
};
pub(crate) use reachability::unguarded_from;

/// A negative consequence together with one path witnessing how it is
/// reached.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ConsequenceOutcome {
    pub node: NodeId,
    pub category: Category,
    pub severity: u8,
    /// From the source to `node`; no BARRIER except possibly the first.
    pub via: Vec<NodeId>,
}

impl ConsequenceOutcome {
    /// `path` must end at a CONSEQUENCE node.
    pub(crate) fn from_path(index: &GraphIndex<'_>, path: &[usize]) -> Self {
        let last = *path.last().expect("non-empty path");
        let node = index.node(last);
        let NodeKind::Consequence { category, severity } = node.kind else {
            panic!("path must end at a consequence, ends at {}", node.id);
        };
        ConsequenceOutcome {
            node: node.id.clone(),
            category,
            severity,
            via: path.iter().map(|&i| index.id(i).clone()).collect(),
        }
    }
}

/// What the learner does and which events the world supplies.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ActivationScenario {
    pub performed_tasks: BTreeSet<TaskId>,
    pub ambient_events: BTreeSet<NodeId>,
}

/// Merges outcome lists, keeping the first witness per consequence node.
pub(crate) fn merge_outcomes<'a>(
    lists: impl IntoIterator<Item = &'a ConsequenceOutcome>,
) -> Vec<ConsequenceOutcome> {
    let mut by_node = std::collections::BTreeMap::new();
    for o in lists {
        by_node.entry(o.node.clone()).or_insert_with(|| o.clone());
    }
    by_node.into_values().collect()
}
