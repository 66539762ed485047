//! Hierarchical task model.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::knowledge::condition::{ConditionSet, TaskId};

/// Temporal constructor relating the children of a task.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Constructor {
    Seq,
    Par,
    Ind,
    Leaf,
}

impl Constructor {
    pub fn as_str(self) -> &'static str {
        match self {
            Constructor::Seq => "SEQ",
            Constructor::Par => "PAR",
            Constructor::Ind => "IND",
            Constructor::Leaf => "LEAF",
        }
    }

    /// Whether two subtrees under this constructor can be carried out
    /// independently of each other.
    pub fn allows_concurrency(self) -> bool {
        matches!(self, Constructor::Par | Constructor::Ind)
    }
}

impl fmt::Display for Constructor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Constructor {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "SEQ" => Ok(Constructor::Seq),
            "PAR" => Ok(Constructor::Par),
            "IND" => Ok(Constructor::Ind),
            "LEAF" => Ok(Constructor::Leaf),
            _ => Err(Error::Schema(format!("unsupported constructor `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaskNode {
    pub id: TaskId,
    pub name: String,
    pub constructor: Constructor,
    pub children: Vec<TaskId>,
    pub preconditions_contextual: ConditionSet,
    /// Carried through parsing and goal output; no compatibility check reads it.
    pub preconditions_favorable: ConditionSet,
    pub postconditions: ConditionSet,
}

impl TaskNode {
    pub fn leaf(id: TaskId) -> Self {
        TaskNode {
            name: id.to_string(),
            id,
            constructor: Constructor::Leaf,
            children: Vec::new(),
            preconditions_contextual: ConditionSet::new(),
            preconditions_favorable: ConditionSet::new(),
            postconditions: ConditionSet::new(),
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

/// A task tree keyed by id.
///
/// The structure is not enforced by construction so that malformed models
/// can still be inspected by [`validate_task_model`](crate::validate_task_model).
#[derive(Debug, Clone, PartialEq)]
pub struct TaskModel {
    pub root: TaskId,
    pub nodes: BTreeMap<TaskId, TaskNode>,
}

impl TaskModel {
    pub fn get(&self, id: &str) -> Result<&TaskNode> {
        self.nodes
            .get(id)
            .ok_or_else(|| Error::UnknownTask(id.to_string()))
    }

    pub fn contains(&self, id: &str) -> bool {
        self.nodes.contains_key(id)
    }

    /// Child → parent map; the first parent wins when a model is malformed.
    pub fn parents(&self) -> BTreeMap<&TaskId, &TaskId> {
        let mut parents = BTreeMap::new();
        for node in self.nodes.values() {
            for child in &node.children {
                parents.entry(child).or_insert(&node.id);
            }
        }
        parents
    }

    /// `id` followed by its ancestors up to the root.
    pub fn ancestor_chain(&self, id: &str) -> Result<Vec<TaskId>> {
        let start = self.get(id)?;
        let parents = self.parents();
        let mut chain = vec![start.id.clone()];
        let mut seen: BTreeSet<&TaskId> = BTreeSet::from([&start.id]);
        let mut cursor = &start.id;
        while let Some(parent) = parents.get(cursor) {
            if !seen.insert(parent) {
                break;
            }
            chain.push((*parent).clone());
            cursor = parent;
        }
        Ok(chain)
    }
}

/// The deepest task having both `t1` and `t2` in its subtree.
///
/// A task counts as part of its own subtree, so if `t1` is an ancestor of
/// `t2` the result is `t1`.
pub fn lowest_common_ancestor(tm: &TaskModel, t1: &str, t2: &str) -> Result<TaskId> {
    let chain1 = tm.ancestor_chain(t1)?;
    let chain2: BTreeSet<TaskId> = tm.ancestor_chain(t2)?.into_iter().collect();
    chain1
        .into_iter()
        .find(|id| chain2.contains(id))
        .ok_or_else(|| Error::Schema(format!("`{t1}` and `{t2}` share no ancestor")))
}
