//! Path-based selection: which barriers and actions lead to negative
//! consequences with no other barrier in between.
//!
//! Gates are traversed as ordinary path nodes here; whether an AND gate can
//! actually be satisfied is left to [`propagate`](super::propagate).

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::knowledge::{CausalityGraph, NodeId, NodeKind};
use crate::reasoner::index::GraphIndex;
use crate::reasoner::ConsequenceOutcome;

/// Consequences reachable from a BARRIER or ACTION node along a path that
/// crosses no other barrier. One shortest witness path per consequence,
/// sorted by consequence id.
pub fn unguarded_consequences(
    cg: &CausalityGraph,
    source: &str,
) -> Result<Vec<ConsequenceOutcome>> {
    let index = GraphIndex::new(cg);
    let start = index.position(source)?;
    let kind = &index.node(start).kind;
    if !(kind.is_barrier() || kind.is_action()) {
        return Err(Error::WrongKind {
            node: source.to_string(),
            expected: "BARRIER or ACTION",
            actual: kind.name(),
        });
    }
    Ok(unguarded_from(&index, start))
}

pub(crate) fn unguarded_from(index: &GraphIndex<'_>, start: usize) -> Vec<ConsequenceOutcome> {
    let mut parent: Vec<Option<usize>> = vec![None; index.len()];
    let mut seen = vec![false; index.len()];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    let mut found = Vec::new();
    while let Some(i) = queue.pop_front() {
        if i != start && index.node(i).kind.is_consequence() {
            found.push(i);
        }
        for &j in index.successors(i) {
            if seen[j] || index.node(j).kind.is_barrier() {
                continue;
            }
            seen[j] = true;
            parent[j] = Some(i);
            queue.push_back(j);
        }
    }
    found.sort_unstable();
    found
        .into_iter()
        .map(|c| {
            let mut via = vec![c];
            while let Some(p) = parent[*via.last().unwrap()] {
                via.push(p);
            }
            via.reverse();
            ConsequenceOutcome::from_path(index, &via)
        })
        .collect()
}

fn negative_of_kind(
    cg: &CausalityGraph,
    keep: impl Fn(&NodeKind) -> bool,
) -> Vec<(NodeId, Vec<ConsequenceOutcome>)> {
    let index = GraphIndex::new(cg);
    (0..index.len())
        .filter(|&i| keep(&index.node(i).kind))
        .filter_map(|i| {
            let outcomes = unguarded_from(&index, i);
            (!outcomes.is_empty()).then(|| (index.id(i).clone(), outcomes))
        })
        .collect()
}

/// Barriers whose omission leads to a negative consequence. Sorted by id.
pub fn negative_barriers(cg: &CausalityGraph) -> Vec<(NodeId, Vec<ConsequenceOutcome>)> {
    negative_of_kind(cg, NodeKind::is_barrier)
}

/// Actions whose execution leads to a negative consequence. Sorted by id.
pub fn negative_actions(cg: &CausalityGraph) -> Vec<(NodeId, Vec<ConsequenceOutcome>)> {
    negative_of_kind(cg, NodeKind::is_action)
}

/// AND gates below both nodes that continue to a consequence along a
/// barrier-free path. Sorted by id.
pub fn common_and_gates(cg: &CausalityGraph, n1: &str, n2: &str) -> Result<Vec<NodeId>> {
    let index = GraphIndex::new(cg);
    let a = index.position(n1)?;
    let b = index.position(n2)?;
    if a == b {
        return Ok(Vec::new());
    }
    let below_a = index.descendants(a);
    let below_b = index.descendants(b);
    Ok((0..index.len())
        .filter(|&g| below_a[g] && below_b[g] && index.node(g).kind.is_and_gate())
        .filter(|&g| !unguarded_from(&index, g).is_empty())
        .map(|g| index.id(g).clone())
        .collect())
}

pub fn common_and_descendant(cg: &CausalityGraph, n1: &str, n2: &str) -> Result<bool> {
    common_and_gates(cg, n1, n2).map(|gates| !gates.is_empty())
}
