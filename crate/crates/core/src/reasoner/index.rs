use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::knowledge::{CausalNode, CausalityGraph, NodeId};

/// Dense, id-sorted view of a causality graph.
///
/// Node `i` is the `i`-th node of the graph in id order, and adjacency lists
/// are sorted by id, so every traversal over the index is deterministic.
#[derive(Debug, Clone)]
pub struct GraphIndex<'a> {
    pub(crate) graph: &'a CausalityGraph,
    pub(crate) nodes: Vec<&'a CausalNode>,
    pos: HashMap<&'a str, usize>,
    pub(crate) succ: Vec<Vec<usize>>,
    pub(crate) pred: Vec<Vec<usize>>,
    /// Topological order; `None` when the graph has a cycle.
    pub(crate) topo: Option<Vec<usize>>,
}

impl<'a> GraphIndex<'a> {
    pub fn new(graph: &'a CausalityGraph) -> Self {
        let nodes: Vec<&CausalNode> = graph.nodes.values().collect();
        let pos: HashMap<&str, usize> = nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.id.as_str(), i))
            .collect();
        let mut succ = vec![Vec::new(); nodes.len()];
        let mut pred = vec![Vec::new(); nodes.len()];
        for edge in &graph.edges {
            let (Some(&f), Some(&t)) = (pos.get(edge.from.as_str()), pos.get(edge.to.as_str()))
            else {
                continue;
            };
            succ[f].push(t);
            pred[t].push(f);
        }
        for list in succ.iter_mut().chain(pred.iter_mut()) {
            list.sort_unstable();
            list.dedup();
        }
        let topo = topological_order(&succ, &pred);
        GraphIndex {
            graph,
            nodes,
            pos,
            succ,
            pred,
            topo,
        }
    }

    pub fn graph(&self) -> &'a CausalityGraph {
        self.graph
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn position(&self, id: &str) -> Result<usize> {
        self.pos
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownNode(id.to_string()))
    }

    pub fn node(&self, i: usize) -> &'a CausalNode {
        self.nodes[i]
    }

    pub fn id(&self, i: usize) -> &'a NodeId {
        &self.nodes[i].id
    }

    pub fn successors(&self, i: usize) -> &[usize] {
        &self.succ[i]
    }

    pub fn predecessors(&self, i: usize) -> &[usize] {
        &self.pred[i]
    }

    pub(crate) fn topo(&self) -> Result<&[usize]> {
        self.topo
            .as_deref()
            .ok_or_else(|| Error::Schema("cycle in causality graph".into()))
    }

    /// Every node reachable from `start` (excluding `start` unless it lies
    /// on a cycle), over all edge kinds.
    pub fn descendants(&self, start: usize) -> Vec<bool> {
        let mut seen = vec![false; self.len()];
        let mut stack: Vec<usize> = self.succ[start].clone();
        while let Some(i) = stack.pop() {
            if !seen[i] {
                seen[i] = true;
                stack.extend(&self.succ[i]);
            }
        }
        seen
    }
}

fn topological_order(succ: &[Vec<usize>], pred: &[Vec<usize>]) -> Option<Vec<usize>> {
    let mut indegree: Vec<usize> = pred.iter().map(Vec::len).collect();
    let mut ready: std::collections::BTreeSet<usize> =
        (0..succ.len()).filter(|&i| indegree[i] == 0).collect();
    let mut order = Vec::with_capacity(succ.len());
    while let Some(i) = ready.pop_first() {
        order.push(i);
        for &j in &succ[i] {
            indegree[j] -= 1;
            if indegree[j] == 0 {
                ready.insert(j);
            }
        }
    }
    (order.len() == succ.len()).then_some(order)
}
