//! Structural checks over loaded models. Violations are reported, never
//! raised.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::knowledge::causality::{CausalityGraph, EdgeKind, NodeKind, MAX_SEVERITY};
use crate::knowledge::condition::Ident;
use crate::knowledge::task::{Constructor, TaskModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum IssueSeverity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Issue {
    pub severity: IssueSeverity,
    pub location: String,
    pub message: String,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.severity {
            IssueSeverity::Error => "error",
            IssueSeverity::Warning => "warning",
        };
        write!(f, "{tag}: {}: {}", self.location, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    fn from_issues(issues: Vec<Issue>) -> Self {
        ValidationReport {
            ok: !issues.iter().any(|i| i.severity == IssueSeverity::Error),
            issues,
        }
    }

    pub fn errors(&self) -> impl Iterator<Item = &Issue> {
        self.issues
            .iter()
            .filter(|i| i.severity == IssueSeverity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Issue> {
        self.issues
            .iter()
            .filter(|i| i.severity == IssueSeverity::Warning)
    }

    pub fn merge(mut self, other: ValidationReport) -> Self {
        self.issues.extend(other.issues);
        ValidationReport::from_issues(self.issues)
    }

    pub fn has_error_containing(&self, needle: &str) -> bool {
        self.errors().any(|i| i.message.contains(needle))
    }
}

#[derive(Default)]
struct Issues(Vec<Issue>);

impl Issues {
    fn error(&mut self, location: impl fmt::Display, message: impl Into<String>) {
        self.0.push(Issue {
            severity: IssueSeverity::Error,
            location: location.to_string(),
            message: message.into(),
        });
    }

    fn warning(&mut self, location: impl fmt::Display, message: impl Into<String>) {
        self.0.push(Issue {
            severity: IssueSeverity::Warning,
            location: location.to_string(),
            message: message.into(),
        });
    }
}

pub fn validate_task_model(tm: &TaskModel) -> ValidationReport {
    let mut issues = Issues::default();

    if !tm.nodes.contains_key(&tm.root) {
        issues.error(&tm.root, "root task does not exist");
    }

    let mut parent_of: BTreeMap<&Ident, &Ident> = BTreeMap::new();
    for (key, node) in &tm.nodes {
        if *key != node.id {
            issues.error(key, format!("node keyed `{key}` carries id `{}`", node.id));
        }
        let is_leaf = node.constructor == Constructor::Leaf;
        if is_leaf != node.children.is_empty() {
            issues.error(
                key,
                if is_leaf {
                    "constructor LEAF but children listed"
                } else {
                    "non-leaf constructor without children"
                },
            );
        }
        if !is_leaf && node.children.len() == 1 {
            issues.error(
                key,
                format!(
                    "constructor arity: {} needs at least 2 children, found 1",
                    node.constructor
                ),
            );
        }
        for child in &node.children {
            if child == key {
                issues.error(key, "cycle: task lists itself as a child");
                continue;
            }
            if !tm.nodes.contains_key(child) {
                issues.error(key, format!("child `{child}` does not exist"));
                continue;
            }
            if child == &tm.root {
                issues.error(key, format!("root `{child}` listed as a child"));
            }
            if let Some(prev) = parent_of.insert(child, key) {
                issues.error(
                    child,
                    format!("task referenced as child of both `{prev}` and `{key}`"),
                );
            }
        }
    }

    // Cycles and orphans: walk from the root, then look for cycles among
    // whatever the walk did not reach.
    let mut reached = BTreeSet::new();
    if tm.nodes.contains_key(&tm.root) {
        let mut queue = VecDeque::from([&tm.root]);
        while let Some(id) = queue.pop_front() {
            if !reached.insert(id) {
                continue;
            }
            if let Some(node) = tm.nodes.get(id) {
                queue.extend(node.children.iter().filter(|c| tm.nodes.contains_key(*c)));
            }
        }
    }
    for id in tm.nodes.keys() {
        if !reached.contains(id) && *id != tm.root {
            issues.error(id, "task is not reachable from the root");
        }
    }
    for id in task_cycle_members(tm) {
        issues.error(id, "cycle in task hierarchy");
    }

    ValidationReport::from_issues(issues.0)
}

fn task_cycle_members(tm: &TaskModel) -> Vec<&Ident> {
    let edges = tm.nodes.iter().flat_map(|(k, n)| {
        n.children
            .iter()
            .filter(move |c| *c != k && tm.nodes.contains_key(*c))
            .map(move |c| (k, c))
    });
    cycle_members(tm.nodes.keys(), edges)
}

/// Nodes left over after Kahn's algorithm, i.e. on or behind a cycle.
fn cycle_members<'a>(
    nodes: impl Iterator<Item = &'a Ident>,
    edges: impl Iterator<Item = (&'a Ident, &'a Ident)>,
) -> Vec<&'a Ident> {
    let mut indegree: BTreeMap<&Ident, usize> = nodes.map(|n| (n, 0)).collect();
    let mut out: BTreeMap<&Ident, Vec<&Ident>> = BTreeMap::new();
    for (from, to) in edges {
        if indegree.contains_key(from) && indegree.contains_key(to) {
            *indegree.get_mut(to).unwrap() += 1;
            out.entry(from).or_default().push(to);
        }
    }
    let mut queue: VecDeque<&Ident> = indegree
        .iter()
        .filter(|(_, d)| **d == 0)
        .map(|(n, _)| *n)
        .collect();
    while let Some(n) = queue.pop_front() {
        for next in out.get(n).into_iter().flatten() {
            let d = indegree.get_mut(next).unwrap();
            *d -= 1;
            if *d == 0 {
                queue.push_back(next);
            }
        }
    }
    indegree
        .into_iter()
        .filter(|(_, d)| *d > 0)
        .map(|(n, _)| n)
        .collect()
}

pub fn validate_causality_graph(cg: &CausalityGraph, tm: &TaskModel) -> ValidationReport {
    check_causality_graph(cg, Some(tm))
}

/// Graph checks that need no task model: everything except `task_ref`
/// resolution.
pub fn validate_graph_structure(cg: &CausalityGraph) -> ValidationReport {
    check_causality_graph(cg, None)
}

fn check_causality_graph(cg: &CausalityGraph, tm: Option<&TaskModel>) -> ValidationReport {
    let mut issues = Issues::default();
    let resolves = |task: &Ident| tm.is_none_or(|tm| tm.contains(task.as_str()));

    for (key, node) in &cg.nodes {
        if *key != node.id {
            issues.error(key, format!("node keyed `{key}` carries id `{}`", node.id));
        }
        match &node.kind {
            NodeKind::Action { task_ref, lead_time } => {
                if !resolves(task_ref) {
                    issues.error(key, format!("dangling task_ref `{task_ref}`"));
                }
                check_lead_time(&mut issues, key, *lead_time);
            }
            NodeKind::Barrier { task_ref } => {
                if !resolves(task_ref) {
                    issues.error(key, format!("dangling task_ref `{task_ref}`"));
                }
            }
            NodeKind::Event { lead_time } => check_lead_time(&mut issues, key, *lead_time),
            NodeKind::Consequence { severity, .. } => {
                if *severity > MAX_SEVERITY {
                    issues.error(
                        key,
                        format!("severity {severity} outside 0..{MAX_SEVERITY}"),
                    );
                }
            }
            NodeKind::Gate(_) => {}
        }
    }

    let mut in_degree: BTreeMap<&Ident, usize> = BTreeMap::new();
    let mut out_degree: BTreeMap<&Ident, usize> = BTreeMap::new();
    for edge in &cg.edges {
        let location = format!("{}->{}", edge.from, edge.to);
        let (Some(from), Some(to)) = (cg.nodes.get(&edge.from), cg.nodes.get(&edge.to)) else {
            issues.error(location, "edge references an unknown node");
            continue;
        };
        *out_degree.entry(&edge.from).or_default() += 1;
        *in_degree.entry(&edge.to).or_default() += 1;
        if edge.from == edge.to {
            issues.error(&location, "cycle: self-loop");
        }
        if from.kind.is_consequence() {
            issues.error(&location, "consequence has outgoing edge");
        }
        if to.kind.is_action() && edge.kind == EdgeKind::Causal {
            issues.error(&location, "action has incoming causal edge");
        }
        if edge.kind == EdgeKind::Subsumption && !(from.kind.is_event() && to.kind.is_event()) {
            issues.error(&location, "subsumption edge must connect EVENT to EVENT");
        }
    }

    for (id, node) in &cg.nodes {
        if let NodeKind::Gate(gate) = node.kind {
            let ins = in_degree.get(id).copied().unwrap_or(0);
            let outs = out_degree.get(id).copied().unwrap_or(0);
            if ins < 2 {
                issues.error(
                    id,
                    format!("{} gate needs at least 2 incoming edges, has {ins}", gate.as_str()),
                );
            }
            if outs < 1 {
                issues.error(id, format!("{} gate has no outgoing edge", gate.as_str()));
            }
        }
    }

    let edges = cg
        .edges
        .iter()
        .filter(|e| e.from != e.to)
        .map(|e| (&e.from, &e.to));
    for id in cycle_members(cg.nodes.keys(), edges) {
        issues.error(id, "cycle in causality graph");
    }

    // Consequences nobody can be held responsible for.
    let mut reachable = BTreeSet::new();
    let mut queue: VecDeque<&Ident> = cg
        .nodes
        .values()
        .filter(|n| n.kind.is_action() || n.kind.is_barrier())
        .map(|n| &n.id)
        .collect();
    while let Some(id) = queue.pop_front() {
        if reachable.insert(id) {
            queue.extend(cg.successors(id.as_str()));
        }
    }
    for node in cg.nodes.values() {
        if node.kind.is_consequence() && !reachable.contains(&node.id) {
            issues.warning(
                &node.id,
                "consequence unreachable from any ACTION or BARRIER",
            );
        }
    }

    ValidationReport::from_issues(issues.0)
}

fn check_lead_time(issues: &mut Issues, key: &Ident, lead_time: Option<f64>) {
    if let Some(t) = lead_time {
        if !t.is_finite() || t < 0.0 {
            issues.error(key, format!("lead_time {t} must be a non-negative number"));
        }
    }
}
