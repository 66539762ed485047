//! Candidate discovery: contradictory barrier pairs for obligation
//! dilemmas, AND-joined action pairs for prohibition dilemmas, then the
//! instantiation filters.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::knowledge::{
    condition_set_conflict, first_conflict, lowest_common_ancestor, ModelBundle, NodeId, TaskId,
    TaskModel,
};
use crate::reasoner::{
    merge_outcomes, negative_actions, negative_barriers, unguarded_from, ConsequenceOutcome,
    GraphIndex,
};
use crate::scoring::{rank, PedagogicalInstruction, ScoreBreakdown, ScoringConfig};
use crate::verifier::Verifier;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum DilemmaType {
    /// Both tasks are required, but they exclude each other.
    Obligation,
    /// Both tasks cause harm, and doing neither causes harm too.
    Prohibition,
}

impl DilemmaType {
    pub fn as_str(self) -> &'static str {
        match self {
            DilemmaType::Obligation => "OBLIGATION",
            DilemmaType::Prohibition => "PROHIBITION",
        }
    }
}

impl fmt::Display for DilemmaType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DilemmaType {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "obligation" => Ok(DilemmaType::Obligation),
            "prohibition" => Ok(DilemmaType::Prohibition),
            _ => Err(Error::InvalidInstruction(format!("unknown dilemma type `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DilemmaCandidate {
    pub kind: DilemmaType,
    /// `task_a < task_b`.
    pub task_a: TaskId,
    pub task_b: TaskId,
    /// Consequences of omitting (obligation) or doing (prohibition) `task_a`.
    pub evidence_a: Vec<ConsequenceOutcome>,
    pub evidence_b: Vec<ConsequenceOutcome>,
    /// Consequences of doing neither task; prohibition only.
    pub nonchoice_evidence: Vec<ConsequenceOutcome>,
    pub score: Option<ScoreBreakdown>,
}

impl DilemmaCandidate {
    /// Builds a candidate with the pair in canonical order, swapping the
    /// evidence along with the tasks.
    pub fn new(
        kind: DilemmaType,
        t1: TaskId,
        e1: Vec<ConsequenceOutcome>,
        t2: TaskId,
        e2: Vec<ConsequenceOutcome>,
        nonchoice: Vec<ConsequenceOutcome>,
    ) -> Self {
        let ((task_a, evidence_a), (task_b, evidence_b)) = if t1 <= t2 {
            ((t1, e1), (t2, e2))
        } else {
            ((t2, e2), (t1, e1))
        };
        DilemmaCandidate {
            kind,
            task_a,
            task_b,
            evidence_a,
            evidence_b,
            nonchoice_evidence: nonchoice,
            score: None,
        }
    }

    pub fn key(&self) -> (DilemmaType, &TaskId, &TaskId) {
        (self.kind, &self.task_a, &self.task_b)
    }

    pub fn pair(&self) -> (&TaskId, &TaskId) {
        (&self.task_a, &self.task_b)
    }

    pub fn all_evidence(&self) -> impl Iterator<Item = &ConsequenceOutcome> {
        self.evidence_a
            .iter()
            .chain(&self.evidence_b)
            .chain(&self.nonchoice_evidence)
    }
}

impl fmt::Display for DilemmaCandidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {{{}, {}}}", self.kind, self.task_a, self.task_b)
    }
}

/// Selected BARRIER or ACTION nodes grouped by the task they stand for.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskEvidence {
    pub task: TaskId,
    pub nodes: Vec<NodeId>,
    pub outcomes: Vec<ConsequenceOutcome>,
}

/// Groups per-node selection results by `task_ref`, sorted by task id.
pub fn group_by_task(
    bundle: &ModelBundle,
    results: &[(NodeId, Vec<ConsequenceOutcome>)],
) -> Result<Vec<TaskEvidence>> {
    let mut grouped: BTreeMap<TaskId, (Vec<NodeId>, Vec<&ConsequenceOutcome>)> = BTreeMap::new();
    for (node, outcomes) in results {
        let task = bundle
            .causality
            .node(node.as_str())?
            .kind
            .task_ref()
            .ok_or_else(|| Error::WrongKind {
                node: node.to_string(),
                expected: "BARRIER or ACTION",
                actual: "a node without task_ref",
            })?;
        if !bundle.task_model.contains(task.as_str()) {
            return Err(Error::DanglingTaskRef {
                node: node.to_string(),
                task: task.to_string(),
            });
        }
        let entry = grouped.entry(task.clone()).or_default();
        entry.0.push(node.clone());
        entry.1.extend(outcomes);
    }
    Ok(grouped
        .into_iter()
        .map(|(task, (nodes, outcomes))| TaskEvidence {
            task,
            nodes,
            outcomes: merge_outcomes(outcomes),
        })
        .collect())
}

/// Pairs of negative-barrier tasks whose postconditions conflict.
pub fn contradictory_pairs(tm: &TaskModel, barriers: &[TaskEvidence]) -> Result<Vec<DilemmaCandidate>> {
    let mut out = Vec::new();
    for (i, x) in barriers.iter().enumerate() {
        let tx = tm.get(x.task.as_str()).map_err(|_| dangling(x))?;
        for y in &barriers[i + 1..] {
            let ty = tm.get(y.task.as_str()).map_err(|_| dangling(y))?;
            if x.task != y.task && condition_set_conflict(&tx.postconditions, &ty.postconditions) {
                out.push(DilemmaCandidate::new(
                    DilemmaType::Obligation,
                    x.task.clone(),
                    x.outcomes.clone(),
                    y.task.clone(),
                    y.outcomes.clone(),
                    Vec::new(),
                ));
            }
        }
    }
    out.sort_by(|a, b| a.key().cmp(&b.key()));
    Ok(out)
}

fn dangling(ev: &TaskEvidence) -> Error {
    Error::DanglingTaskRef {
        node: ev.nodes.first().map(ToString::to_string).unwrap_or_default(),
        task: ev.task.to_string(),
    }
}

/// Pairs of negative-action tasks whose BARRIER nodes share an AND gate
/// leading on to a consequence: omitting both fires the gate.
pub fn prohibition_pairs(bundle: &ModelBundle, actions: &[TaskEvidence]) -> Result<Vec<DilemmaCandidate>> {
    let cg = &bundle.causality;
    let index = GraphIndex::new(cg);
    let barrier_nodes = |task: &TaskId| -> Vec<usize> {
        cg.nodes_for_task(task.as_str())
            .filter(|n| n.kind.is_barrier())
            .filter_map(|n| index.position(n.id.as_str()).ok())
            .collect()
    };
    let below: BTreeMap<usize, Vec<bool>> = cg
        .nodes
        .values()
        .filter(|n| n.kind.is_barrier())
        .filter_map(|n| index.position(n.id.as_str()).ok())
        .map(|b| (b, index.descendants(b)))
        .collect();

    let mut out = Vec::new();
    for (i, x) in actions.iter().enumerate() {
        if !bundle.task_model.contains(x.task.as_str()) {
            return Err(dangling(x));
        }
        for y in &actions[i + 1..] {
            if !bundle.task_model.contains(y.task.as_str()) {
                return Err(dangling(y));
            }
            if x.task == y.task {
                continue;
            }
            let mut nonchoice = Vec::new();
            for bx in barrier_nodes(&x.task) {
                for by in barrier_nodes(&y.task) {
                    let both = below[&bx].iter().zip(&below[&by]).map(|(a, b)| *a && *b);
                    for (g, shared) in both.enumerate() {
                        if shared && index.node(g).kind.is_and_gate() {
                            nonchoice.extend(unguarded_from(&index, g));
                        }
                    }
                }
            }
            let nonchoice = merge_outcomes(&nonchoice);
            if !nonchoice.is_empty() {
                out.push(DilemmaCandidate::new(
                    DilemmaType::Prohibition,
                    x.task.clone(),
                    x.outcomes.clone(),
                    y.task.clone(),
                    y.outcomes.clone(),
                    nonchoice,
                ));
            }
        }
    }
    out.sort_by(|a, b| a.key().cmp(&b.key()));
    Ok(out)
}

/// One world state can enable both tasks: their contextual preconditions
/// do not conflict.
pub fn contextually_compatible(tm: &TaskModel, c: &DilemmaCandidate) -> Result<bool> {
    let a = tm.get(c.task_a.as_str())?;
    let b = tm.get(c.task_b.as_str())?;
    Ok(!condition_set_conflict(
        &a.preconditions_contextual,
        &b.preconditions_contextual,
    ))
}

/// Neither task orders the other: their lowest common ancestor is PAR or
/// IND.
pub fn temporally_compatible(tm: &TaskModel, c: &DilemmaCandidate) -> Result<bool> {
    let lca = lowest_common_ancestor(tm, c.task_a.as_str(), c.task_b.as_str())?;
    Ok(tm.get(lca.as_str())?.constructor.allows_concurrency())
}

/// Why a pair was dropped between construction and ranking.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub kind: DilemmaType,
    pub task_a: TaskId,
    pub task_b: TaskId,
    pub reason: String,
}

/// Every intermediate stage of one generation run.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineTrace {
    pub barriers: Vec<(NodeId, Vec<ConsequenceOutcome>)>,
    pub actions: Vec<(NodeId, Vec<ConsequenceOutcome>)>,
    pub obligation_pairs: Vec<DilemmaCandidate>,
    pub prohibition_pairs: Vec<DilemmaCandidate>,
    /// Pairs of either type that passed both compatibility filters and the
    /// verifier, before the type filter and ranking.
    pub filtered: Vec<DilemmaCandidate>,
    pub ranked: Vec<DilemmaCandidate>,
    pub diagnostics: Vec<Diagnostic>,
}

impl PipelineTrace {
    pub fn barrier_tasks(&self, bundle: &ModelBundle) -> Result<Vec<TaskId>> {
        Ok(group_by_task(bundle, &self.barriers)?
            .into_iter()
            .map(|t| t.task)
            .collect())
    }

    pub fn action_tasks(&self, bundle: &ModelBundle) -> Result<Vec<TaskId>> {
        Ok(group_by_task(bundle, &self.actions)?
            .into_iter()
            .map(|t| t.task)
            .collect())
    }
}

pub fn run_pipeline(
    bundle: &ModelBundle,
    instruction: &PedagogicalInstruction,
    config: &ScoringConfig,
) -> Result<PipelineTrace> {
    let tm = &bundle.task_model;
    let barriers = negative_barriers(&bundle.causality);
    let actions = negative_actions(&bundle.causality);
    let obligation_pairs = contradictory_pairs(tm, &group_by_task(bundle, &barriers)?)?;
    let prohibition_pairs = prohibition_pairs(bundle, &group_by_task(bundle, &actions)?)?;

    let verifier = Verifier::new(bundle)?;
    let mut diagnostics = Vec::new();
    let mut filtered = Vec::new();
    for cand in obligation_pairs.iter().chain(&prohibition_pairs) {
        let drop = |reason: String| Diagnostic {
            kind: cand.kind,
            task_a: cand.task_a.clone(),
            task_b: cand.task_b.clone(),
            reason,
        };
        if !contextually_compatible(tm, cand)? {
            let a = &tm.get(cand.task_a.as_str())?.preconditions_contextual;
            let b = &tm.get(cand.task_b.as_str())?.preconditions_contextual;
            let why = first_conflict(a, b)
                .map(|(x, y)| format!("contextually incompatible: {x} vs {y}"))
                .unwrap_or_else(|| "contextually incompatible".into());
            diagnostics.push(drop(why));
            continue;
        }
        if !temporally_compatible(tm, cand)? {
            let lca = lowest_common_ancestor(tm, cand.task_a.as_str(), cand.task_b.as_str())?;
            let cons = tm.get(lca.as_str())?.constructor;
            diagnostics.push(drop(format!(
                "temporally incompatible: common ancestor `{lca}` is {cons}"
            )));
            continue;
        }
        let report = verifier.verify(cand.kind, cand.task_a.as_str(), cand.task_b.as_str())?;
        if !report.holds {
            let failed: Vec<&str> = report
                .checks
                .iter()
                .filter(|c| !c.passed)
                .map(|c| c.name.as_str())
                .collect();
            diagnostics.push(drop(format!(
                "rejected by propagation check: {}",
                failed.join(", ")
            )));
            continue;
        }
        filtered.push(cand.clone());
    }

    let mut wanted = Vec::new();
    for cand in &filtered {
        if instruction.dilemma_type.admits(cand.kind) {
            wanted.push(cand.clone());
        } else {
            diagnostics.push(Diagnostic {
                kind: cand.kind,
                task_a: cand.task_a.clone(),
                task_b: cand.task_b.clone(),
                reason: format!("excluded by requested type {}", instruction.dilemma_type),
            });
        }
    }
    let ranked = rank(wanted, instruction, bundle, config)?;

    Ok(PipelineTrace {
        barriers,
        actions,
        obligation_pairs,
        prohibition_pairs,
        filtered,
        ranked,
        diagnostics,
    })
}

/// Ranked candidates for `instruction` under the default scoring constants.
pub fn generate(
    bundle: &ModelBundle,
    instruction: &PedagogicalInstruction,
) -> Result<Vec<DilemmaCandidate>> {
    Ok(run_pipeline(bundle, instruction, &ScoringConfig::default())?.ranked)
}

/// Candidates of both types that survive every filter, before ranking.
pub fn unranked_candidates(bundle: &ModelBundle) -> Result<Vec<DilemmaCandidate>> {
    let trace = run_pipeline(
        bundle,
        &PedagogicalInstruction::default(),
        &ScoringConfig::default(),
    )?;
    Ok(trace.filtered)
}
