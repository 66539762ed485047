//! Ranking candidates against an author's pedagogical instruction and the
//! scenario's instantiability, and extracting the goal world state.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generator::{DilemmaCandidate, DilemmaType};
use crate::knowledge::{
    first_conflict, CausalityGraph, Category, ConditionSet, ModelBundle, TaskId, TaskModel,
    WorldModel, MAX_SEVERITY,
};
use crate::reasoner::ConsequenceOutcome;

/// Which dilemma types an instruction asks for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum DilemmaFilter {
    Obligation,
    Prohibition,
    #[default]
    Both,
}

impl DilemmaFilter {
    pub fn admits(self, kind: DilemmaType) -> bool {
        match self {
            DilemmaFilter::Both => true,
            DilemmaFilter::Obligation => kind == DilemmaType::Obligation,
            DilemmaFilter::Prohibition => kind == DilemmaType::Prohibition,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DilemmaFilter::Obligation => "OBLIGATION",
            DilemmaFilter::Prohibition => "PROHIBITION",
            DilemmaFilter::Both => "BOTH",
        }
    }
}

impl fmt::Display for DilemmaFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DilemmaFilter {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "obligation" => Ok(DilemmaFilter::Obligation),
            "prohibition" => Ok(DilemmaFilter::Prohibition),
            "both" => Ok(DilemmaFilter::Both),
            _ => Err(Error::InvalidInstruction(format!(
                "unknown dilemma type `{s}` (expected obligation, prohibition or both)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PedagogicalInstruction {
    pub dilemma_type: DilemmaFilter,
    pub gravity_min: u8,
    pub gravity_max: u8,
    /// Wanted severity difference between the two sides; 0 is hardest.
    pub gravity_gap_target: u8,
    /// Empty means any.
    pub required_categories: BTreeSet<Category>,
    pub weight_pedagogical: f64,
    pub weight_scenaristic: f64,
}

impl Default for PedagogicalInstruction {
    fn default() -> Self {
        PedagogicalInstruction {
            dilemma_type: DilemmaFilter::Both,
            gravity_min: 0,
            gravity_max: MAX_SEVERITY,
            gravity_gap_target: 0,
            required_categories: BTreeSet::new(),
            weight_pedagogical: 1.0,
            weight_scenaristic: 1.0,
        }
    }
}

impl PedagogicalInstruction {
    /// Gravity bounds centred on a criticality level: `k-1 ..= k+1`,
    /// clamped to the severity scale.
    pub fn criticality_bounds(k: u8) -> Result<(u8, u8)> {
        if k > MAX_SEVERITY {
            return Err(Error::InvalidInstruction(format!(
                "criticality {k} outside 0..={MAX_SEVERITY}"
            )));
        }
        Ok((k.saturating_sub(1), (k + 1).min(MAX_SEVERITY)))
    }

    pub fn with_criticality(mut self, k: u8) -> Result<Self> {
        (self.gravity_min, self.gravity_max) = Self::criticality_bounds(k)?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidInstruction(msg));
        if self.gravity_max > MAX_SEVERITY {
            return bad(format!("gravity_max {} exceeds {MAX_SEVERITY}", self.gravity_max));
        }
        if self.gravity_min > self.gravity_max {
            return bad(format!(
                "gravity_min {} exceeds gravity_max {}",
                self.gravity_min, self.gravity_max
            ));
        }
        for (name, w) in [
            ("weight_pedagogical", self.weight_pedagogical),
            ("weight_scenaristic", self.weight_scenaristic),
        ] {
            if !(0.0..=1.0).contains(&w) {
                return bad(format!("{name} {w} outside [0, 1]"));
            }
        }
        if self.weight_pedagogical + self.weight_scenaristic <= 0.0 {
            return bad("weights must not both be zero".into());
        }
        Ok(())
    }
}

/// Scoring constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScoringConfig {
    /// Temporality half-score horizon, seconds.
    pub tau_seconds: f64,
    /// Severity span the gap penalty is normalized by.
    pub gravity_scale: f64,
}

impl Default for ScoringConfig {
    fn default() -> Self {
        ScoringConfig {
            tau_seconds: 60.0,
            gravity_scale: f64::from(MAX_SEVERITY),
        }
    }
}

impl ScoringConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: ScoringConfig = serde_json::from_str(text).map_err(|e| {
            if e.is_syntax() || e.is_eof() {
                Error::Parse {
                    line: e.line(),
                    column: e.column(),
                    message: e.to_string(),
                }
            } else {
                Error::Schema(e.to_string())
            }
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("tau_seconds", self.tau_seconds),
            ("gravity_scale", self.gravity_scale),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Schema(format!("{name} must be a positive number, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreBreakdown {
    pub pedagogical_fit: f64,
    pub scenario_fit: f64,
    pub total: f64,
    /// Summed instance counts behind the availability term; breaks ties.
    pub raw_availability: f64,
    /// Total is zero: kept for explanation, not recommended.
    pub flagged: bool,
    pub details: BTreeMap<String, f64>,
}

fn max_severity(evidence: &[ConsequenceOutcome]) -> u8 {
    evidence.iter().map(|o| o.severity).max().unwrap_or(0)
}

fn categories(evidence: &[ConsequenceOutcome]) -> BTreeSet<Category> {
    evidence.iter().map(|o| o.category).collect()
}

/// Fit to the author's gravity and category constraints, with its terms.
pub fn pedagogical_fit(
    c: &DilemmaCandidate,
    instr: &PedagogicalInstruction,
    config: &ScoringConfig,
) -> (f64, BTreeMap<String, f64>) {
    let (ga, gb) = (max_severity(&c.evidence_a), max_severity(&c.evidence_b));
    let in_bounds = instr.gravity_min <= ga.min(gb) && ga.max(gb) <= instr.gravity_max;
    let bounds = if in_bounds { 1.0 } else { 0.0 };

    let diff = f64::from(ga.abs_diff(gb));
    let miss = (diff - f64::from(instr.gravity_gap_target)).abs();
    let gap = (1.0 - miss / config.gravity_scale).clamp(0.0, 1.0);

    // each side must show every required category on its own
    let category = [&c.evidence_a, &c.evidence_b]
        .iter()
        .all(|side| instr.required_categories.is_subset(&categories(side)));
    let category = if category { 1.0 } else { 0.0 };

    let details = BTreeMap::from([
        ("bounds_term".to_string(), bounds),
        ("gap_term".to_string(), gap),
        ("category_term".to_string(), category),
    ]);
    (bounds * category * gap, details)
}

/// Availability of the entities the two tasks' contextual preconditions
/// mention: `(term in [0,1], summed raw counts)`.
pub fn availability(c: &DilemmaCandidate, tm: &TaskModel, wm: &WorldModel) -> Result<(f64, f64)> {
    let a = tm.get(c.task_a.as_str())?;
    let b = tm.get(c.task_b.as_str())?;
    let conditions: ConditionSet = a
        .preconditions_contextual
        .iter()
        .chain(&b.preconditions_contextual)
        .cloned()
        .collect();
    if conditions.is_empty() {
        return Ok((1.0, 0.0));
    }
    let mut log_sum = 0.0;
    let mut zero = false;
    let mut raw = 0.0;
    for cond in &conditions {
        let classes = wm.classes_mentioned(cond);
        let Some(least) = classes.iter().map(|cl| wm.count(cl)).min() else {
            continue; // mentions no world class: neutral
        };
        raw += classes.iter().map(|cl| wm.count(cl) as f64).sum::<f64>();
        let term = (least as f64).min(1.0);
        if term == 0.0 {
            zero = true;
        } else {
            log_sum += term.ln();
        }
    }
    let term = if zero {
        0.0
    } else {
        (log_sum / conditions.len() as f64).exp()
    };
    Ok((term, raw))
}

/// Longest lead time on any evidence witness path, in seconds.
pub fn max_lead_time(c: &DilemmaCandidate, cg: &CausalityGraph) -> f64 {
    c.all_evidence()
        .flat_map(|o| &o.via)
        .filter_map(|id| cg.nodes.get(id).and_then(|n| n.kind.lead_time()))
        .fold(0.0, f64::max)
}

/// How readily the scenario can be staged: entity availability times a
/// hyperbolic discount on lead time. Returns `(fit, raw availability,
/// details)`.
pub fn scenario_fit(
    c: &DilemmaCandidate,
    tm: &TaskModel,
    wm: &WorldModel,
    cg: &CausalityGraph,
    config: &ScoringConfig,
) -> Result<(f64, f64, BTreeMap<String, f64>)> {
    let (avail, raw) = availability(c, tm, wm)?;
    let temporality = 1.0 / (1.0 + max_lead_time(c, cg) / config.tau_seconds);
    let details = BTreeMap::from([
        ("availability_term".to_string(), avail),
        ("temporality_term".to_string(), temporality),
    ]);
    Ok((avail * temporality, raw, details))
}

pub fn score(
    c: &DilemmaCandidate,
    instr: &PedagogicalInstruction,
    bundle: &ModelBundle,
    config: &ScoringConfig,
) -> Result<ScoreBreakdown> {
    let (p, mut details) = pedagogical_fit(c, instr, config);
    let (s, raw, sdetails) = scenario_fit(
        c,
        &bundle.task_model,
        &bundle.world,
        &bundle.causality,
        config,
    )?;
    details.extend(sdetails);
    let (wp, ws) = (instr.weight_pedagogical, instr.weight_scenaristic);
    let total = ((wp * p + ws * s) / (wp + ws)).clamp(0.0, 1.0);
    Ok(ScoreBreakdown {
        pedagogical_fit: p,
        scenario_fit: s,
        total,
        raw_availability: raw,
        flagged: total == 0.0,
        details,
    })
}

/// Totals equal up to float noise compare equal, so that scaling both
/// weights cannot reorder candidates.
fn quantized(total: f64) -> i64 {
    (total * 1e9).round() as i64
}

/// Annotates every candidate with its score and sorts: total descending,
/// raw availability descending, then pair and type ascending. Nothing is
/// dropped; zero-total candidates end up at the tail, flagged.
pub fn rank(
    cands: Vec<DilemmaCandidate>,
    instr: &PedagogicalInstruction,
    bundle: &ModelBundle,
    config: &ScoringConfig,
) -> Result<Vec<DilemmaCandidate>> {
    let mut scored = cands
        .into_iter()
        .map(|mut c| {
            c.score = Some(score(&c, instr, bundle, config)?);
            Ok(c)
        })
        .collect::<Result<Vec<_>>>()?;
    scored.sort_by(|x, y| {
        let (sx, sy) = (x.score.as_ref().unwrap(), y.score.as_ref().unwrap());
        quantized(sy.total)
            .cmp(&quantized(sx.total))
            .then(sy.raw_availability.total_cmp(&sx.raw_availability))
            .then_with(|| x.pair().cmp(&y.pair()))
            .then(x.kind.cmp(&y.kind))
    });
    Ok(scored)
}

/// The world state a planner must bring about to stage a candidate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoalState {
    pub conditions: ConditionSet,
    pub for_candidate: (TaskId, TaskId),
}

/// Union of both tasks' contextual preconditions.
pub fn extract_goal_state(c: &DilemmaCandidate, tm: &TaskModel) -> Result<GoalState> {
    let a = tm.get(c.task_a.as_str())?;
    let b = tm.get(c.task_b.as_str())?;
    let conditions: ConditionSet = a
        .preconditions_contextual
        .union(&b.preconditions_contextual)
        .cloned()
        .collect();
    if first_conflict(&conditions, &conditions).is_some() {
        return Err(Error::ConflictingGoal(c.task_a.to_string(), c.task_b.to_string()));
    }
    Ok(GoalState {
        conditions,
        for_candidate: (c.task_a.clone(), c.task_b.clone()),
    })
}
