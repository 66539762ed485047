use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::generator::{DilemmaCandidate, DilemmaType};
use crate::knowledge::{Category, ConditionSet, NodeId, TaskId};
use crate::model_io::{parse_document, to_document, FORMAT_VERSION};
use crate::reasoner::merge_outcomes;
use crate::scoring::{DilemmaFilter, GoalState};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultDocument {
    pub format_version: u64,
    pub dilemma_type: DilemmaFilter,
    pub candidates: Vec<CandidateRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CandidateRecord {
    pub tasks: (TaskId, TaskId),
    #[serde(rename = "type")]
    pub kind: DilemmaType,
    pub score: f64,
    pub pedagogical_fit: f64,
    pub scenario_fit: f64,
    pub raw_availability: f64,
    pub flagged: bool,
    pub details: BTreeMap<String, f64>,
    pub consequences: Vec<ConsequenceRecord>,
    /// Present on the top candidate only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub goal_state: Option<ConditionSet>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConsequenceRecord {
    pub node: NodeId,
    pub category: Category,
    pub severity: u8,
}

impl CandidateRecord {
    fn from_candidate(c: &DilemmaCandidate) -> Self {
        let score = c.score.clone().unwrap_or_else(|| crate::scoring::ScoreBreakdown {
            pedagogical_fit: 0.0,
            scenario_fit: 0.0,
            total: 0.0,
            raw_availability: 0.0,
            flagged: true,
            details: BTreeMap::new(),
        });
        CandidateRecord {
            tasks: (c.task_a.clone(), c.task_b.clone()),
            kind: c.kind,
            score: score.total,
            pedagogical_fit: score.pedagogical_fit,
            scenario_fit: score.scenario_fit,
            raw_availability: score.raw_availability,
            flagged: score.flagged,
            details: score.details,
            consequences: merge_outcomes(c.all_evidence())
                .into_iter()
                .map(|o| ConsequenceRecord {
                    node: o.node,
                    category: o.category,
                    severity: o.severity,
                })
                .collect(),
            goal_state: None,
        }
    }
}

impl ResultDocument {
    /// `goal` is attached to the first candidate.
    pub fn new(
        dilemma_type: DilemmaFilter,
        candidates: &[DilemmaCandidate],
        goal: Option<&GoalState>,
    ) -> Self {
        let mut records: Vec<CandidateRecord> =
            candidates.iter().map(CandidateRecord::from_candidate).collect();
        if let (Some(top), Some(goal)) = (records.first_mut(), goal) {
            top.goal_state = Some(goal.conditions.clone());
        }
        ResultDocument {
            format_version: FORMAT_VERSION,
            dilemma_type,
            candidates: records,
        }
    }
}

/// Ranked candidates as a JSON document, fields in a fixed order.
pub fn write_result(
    dilemma_type: DilemmaFilter,
    candidates: &[DilemmaCandidate],
    goal: Option<&GoalState>,
) -> String {
    to_document(&ResultDocument::new(dilemma_type, candidates, goal))
}

pub fn parse_result(text: &str) -> Result<ResultDocument> {
    parse_document(text)
}
