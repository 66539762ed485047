//! Brute-force check of task pairs against the formal dilemma conditions,
//! by propagation over exhaustively enumerated scenarios.
//!
//! A consequence is *attributed* to a source node when a chain of fired
//! nodes leads from the source to it without crossing any other barrier.
//! Scenarios range over which action-bearing tasks the learner performs;
//! every root EVENT is asserted ambient while searching, since asserting
//! more events can only make more nodes fire, and the ambient set of a
//! witness is then shrunk greedily.
//!
//! This module deliberately shares nothing with the generator's selection
//! logic: it is the generator's oracle.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generator::{contextually_compatible, temporally_compatible, DilemmaCandidate, DilemmaType};
use crate::knowledge::{first_conflict, Condition, ModelBundle, TaskId};
use crate::reasoner::{ActivationScenario, ConsequenceOutcome, GraphIndex, Inputs, Propagator};

/// Most free scenario dimensions enumerated, i.e. at most 2^16 scenarios
/// per check.
pub const MAX_SCENARIO_DIMENSIONS: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// Replaying `scenario` through propagation triggers `outcome`.
    Causal {
        scenario: ActivationScenario,
        outcome: ConsequenceOutcome,
    },
    /// Postconditions that cannot hold together.
    Conflict { left: Condition, right: Condition },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub pair: (TaskId, TaskId),
    pub claimed_type: DilemmaType,
    pub holds: bool,
    pub checks: Vec<Check>,
}

/// Result of a successful causal search.
#[derive(Debug, Clone)]
struct Found {
    scenario: ActivationScenario,
    outcome: ConsequenceOutcome,
    /// Every consequence attributed to the sources in that scenario.
    evidence: Vec<ConsequenceOutcome>,
}

enum Goal {
    /// A chain from any of these nodes to a consequence.
    Chain(Vec<usize>),
    /// A fired AND gate reached by chains from both sides and chained
    /// onward to a consequence.
    Join(Vec<usize>, Vec<usize>),
}

struct Search<'s> {
    /// Tasks performed in every scenario.
    fixed: &'s [&'s str],
    /// Tasks never performed.
    excluded: &'s [&'s str],
    goal: Goal,
}

pub struct Verifier<'a> {
    bundle: &'a ModelBundle,
    prop: Propagator<'a>,
    /// Tasks referenced by ACTION or BARRIER nodes, sorted.
    tasks: Vec<&'a TaskId>,
    node_task: Vec<Option<usize>>,
    /// Tasks owning at least one ACTION node: the only tasks worth
    /// performing, since performing anything else merely holds barriers.
    actors: Vec<usize>,
    roots: Vec<usize>,
}

impl<'a> Verifier<'a> {
    pub fn new(bundle: &'a ModelBundle) -> Result<Self> {
        let prop = Propagator::new(bundle)?;
        let index = prop.index();
        let tasks: Vec<&TaskId> = bundle.causality.referenced_tasks().into_iter().collect();
        let node_task: Vec<Option<usize>> = (0..index.len())
            .map(|i| {
                index
                    .node(i)
                    .kind
                    .task_ref()
                    .and_then(|t| tasks.binary_search(&t).ok())
            })
            .collect();
        let actors: BTreeSet<usize> = (0..index.len())
            .filter(|&i| index.node(i).kind.is_action())
            .filter_map(|i| node_task[i])
            .collect();
        let roots = (0..index.len())
            .filter(|&i| index.node(i).kind.is_event() && index.predecessors(i).is_empty())
            .collect();
        Ok(Verifier {
            bundle,
            prop,
            tasks,
            node_task,
            actors: actors.into_iter().collect(),
            roots,
        })
    }

    fn index(&self) -> &GraphIndex<'a> {
        self.prop.index()
    }

    fn task_nodes(&self, task: &str, barrier: bool) -> Vec<usize> {
        let index = self.index();
        (0..index.len())
            .filter(|&i| {
                let kind = &index.node(i).kind;
                (if barrier { kind.is_barrier() } else { kind.is_action() })
                    && kind.task_ref().is_some_and(|t| t.as_str() == task)
            })
            .collect()
    }

    /// Breadth-first over chains: from the fired `sources`, through fired
    /// non-barrier nodes. Returns BFS parents and the reached set.
    fn chains(&self, fired: &[bool], sources: &[usize]) -> (Vec<Option<usize>>, Vec<bool>) {
        let index = self.index();
        let mut parent = vec![None; index.len()];
        let mut reached = vec![false; index.len()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if fired[s] && !reached[s] {
                reached[s] = true;
                queue.push_back(s);
            }
        }
        while let Some(i) = queue.pop_front() {
            for &j in index.successors(i) {
                if reached[j] || !fired[j] || index.node(j).kind.is_barrier() {
                    continue;
                }
                reached[j] = true;
                parent[j] = Some(i);
                queue.push_back(j);
            }
        }
        (parent, reached)
    }

    fn path_to(parent: &[Option<usize>], end: usize) -> Vec<usize> {
        let mut path = vec![end];
        while let Some(p) = parent[*path.last().unwrap()] {
            path.push(p);
        }
        path.reverse();
        path
    }

    fn consequences(&self, reached: &[bool]) -> impl Iterator<Item = usize> + '_ {
        let index = self.index();
        let reached = reached.to_vec();
        (0..index.len()).filter(move |&i| reached[i] && index.node(i).kind.is_consequence())
    }

    /// Witness path and full evidence when `goal` is met under `fired`.
    fn goal_met(&self, fired: &[bool], goal: &Goal) -> Option<(Vec<usize>, Vec<ConsequenceOutcome>)> {
        let index = self.index();
        match goal {
            Goal::Chain(sources) => {
                let (parent, reached) = self.chains(fired, sources);
                let found: Vec<usize> = self.consequences(&reached).collect();
                let first = *found.first()?;
                let evidence = found
                    .iter()
                    .map(|&c| ConsequenceOutcome::from_path(index, &Self::path_to(&parent, c)))
                    .collect();
                Some((Self::path_to(&parent, first), evidence))
            }
            Goal::Join(left, right) => {
                let (parent, r1) = self.chains(fired, left);
                let (_, r2) = self.chains(fired, right);
                let mut witness = None;
                let mut evidence = BTreeMap::new();
                for g in (0..index.len()).filter(|&g| r1[g] && r2[g] && index.node(g).kind.is_and_gate()) {
                    let (below, reached) = self.chains(fired, &[g]);
                    let lead_in = Self::path_to(&parent, g);
                    for c in self.consequences(&reached) {
                        let mut path = lead_in.clone();
                        path.extend(&Self::path_to(&below, c)[1..]);
                        witness.get_or_insert_with(|| path.clone());
                        evidence
                            .entry(c)
                            .or_insert_with(|| ConsequenceOutcome::from_path(index, &path));
                    }
                }
                witness.map(|w| (w, evidence.into_values().collect()))
            }
        }
    }

    fn inputs(&self, performed: &[bool], ambient: &[bool]) -> Inputs {
        let n = self.index().len();
        let mut amb = vec![false; n];
        for (k, &r) in self.roots.iter().enumerate() {
            amb[r] = ambient[k];
        }
        Inputs {
            ambient: amb,
            performed: (0..n)
                .map(|i| self.node_task[i].is_some_and(|t| performed[t]))
                .collect(),
        }
    }

    fn search(&self, s: &Search<'_>) -> Result<Option<Found>> {
        let lookup = |t: &str| self.tasks.iter().position(|x| x.as_str() == t);
        let fixed: Vec<usize> = s.fixed.iter().filter_map(|t| lookup(t)).collect();
        let blocked: Vec<usize> = s.excluded.iter().filter_map(|t| lookup(t)).collect();
        let free: Vec<usize> = self
            .actors
            .iter()
            .copied()
            .filter(|t| !fixed.contains(t) && !blocked.contains(t))
            .collect();
        if free.len() > MAX_SCENARIO_DIMENSIONS {
            return Err(Error::ModelTooLarge {
                dimensions: free.len(),
                cap: MAX_SCENARIO_DIMENSIONS,
            });
        }

        // Cheap necessary condition: the goal must hold with every node
        // firing.
        let all = vec![true; self.index().len()];
        if self.goal_met(&all, &s.goal).is_none() {
            return Ok(None);
        }

        let every_root = vec![true; self.roots.len()];
        for mask in (0..1u32 << free.len()).rev() {
            let mut performed = vec![false; self.tasks.len()];
            for &t in &fixed {
                performed[t] = true;
            }
            for (bit, &t) in free.iter().enumerate() {
                performed[t] = mask >> bit & 1 == 1;
            }
            let fired = self.prop.run_inputs(&self.inputs(&performed, &every_root));
            if self.goal_met(&fired, &s.goal).is_none() {
                continue;
            }
            // shrink the ambient set while the goal still holds
            let mut ambient = every_root.clone();
            for k in 0..ambient.len() {
                ambient[k] = false;
                let fired = self.prop.run_inputs(&self.inputs(&performed, &ambient));
                if self.goal_met(&fired, &s.goal).is_none() {
                    ambient[k] = true;
                }
            }
            let fired = self.prop.run_inputs(&self.inputs(&performed, &ambient));
            let (path, evidence) = self
                .goal_met(&fired, &s.goal)
                .expect("goal holds for the shrunk scenario");
            let index = self.index();
            let scenario = ActivationScenario {
                performed_tasks: (0..self.tasks.len())
                    .filter(|&t| performed[t])
                    .map(|t| self.tasks[t].clone())
                    .collect(),
                ambient_events: (0..self.roots.len())
                    .filter(|&k| ambient[k])
                    .map(|k| index.id(self.roots[k]).clone())
                    .collect(),
            };
            return Ok(Some(Found {
                scenario,
                outcome: ConsequenceOutcome::from_path(index, &path),
                evidence,
            }));
        }
        Ok(None)
    }

    fn causal_check(&self, name: String, s: Search<'_>) -> Result<(Check, Vec<ConsequenceOutcome>)> {
        Ok(match self.search(&s)? {
            Some(found) => (
                Check {
                    name,
                    passed: true,
                    witness: Some(Witness::Causal {
                        scenario: found.scenario,
                        outcome: found.outcome,
                    }),
                },
                found.evidence,
            ),
            None => (
                Check {
                    name,
                    passed: false,
                    witness: None,
                },
                Vec::new(),
            ),
        })
    }

    /// Omitting `t` leads to harm through one of its barriers, whatever
    /// else is done.
    fn omission(&self, t: &str) -> Result<(Check, Vec<ConsequenceOutcome>)> {
        self.causal_check(
            format!("omission:{t}"),
            Search {
                fixed: &[],
                excluded: &[t],
                goal: Goal::Chain(self.task_nodes(t, true)),
            },
        )
    }

    /// Doing `t` while not doing `other` leads to harm through one of its
    /// actions.
    fn action(&self, t: &str, other: &str) -> Result<(Check, Vec<ConsequenceOutcome>)> {
        self.causal_check(
            format!("action:{t}"),
            Search {
                fixed: &[t],
                excluded: &[t, other],
                goal: Goal::Chain(self.task_nodes(t, false)),
            },
        )
    }

    /// Doing neither task leads to harm through an AND gate fed by both
    /// tasks' omitted barriers.
    fn non_choice(&self, a: &str, b: &str) -> Result<(Check, Vec<ConsequenceOutcome>)> {
        self.causal_check(
            "non_choice".into(),
            Search {
                fixed: &[],
                excluded: &[a, b],
                goal: Goal::Join(self.task_nodes(a, true), self.task_nodes(b, true)),
            },
        )
    }

    fn exclusivity(&self, a: &str, b: &str) -> Result<Check> {
        let tm = &self.bundle.task_model;
        let pa = &tm.get(a)?.postconditions;
        let pb = &tm.get(b)?.postconditions;
        let conflict = first_conflict(pa, pb);
        Ok(Check {
            name: "exclusivity".into(),
            passed: conflict.is_some(),
            witness: conflict.map(|(l, r)| Witness::Conflict {
                left: l.clone(),
                right: r.clone(),
            }),
        })
    }

    fn canonical<'t>(&self, t1: &'t str, t2: &'t str) -> Result<(&'t str, &'t str)> {
        for t in [t1, t2] {
            self.bundle.task_model.get(t)?;
        }
        if t1 == t2 {
            return Err(Error::SameTask(t1.to_string()));
        }
        Ok(if t1 < t2 { (t1, t2) } else { (t2, t1) })
    }

    fn report(&self, kind: DilemmaType, a: &str, b: &str, checks: Vec<Check>) -> VerificationReport {
        VerificationReport {
            pair: (TaskId::new(a).unwrap(), TaskId::new(b).unwrap()),
            claimed_type: kind,
            holds: checks.iter().all(|c| c.passed),
            checks,
        }
    }

    pub fn verify_obligation(&self, t1: &str, t2: &str) -> Result<VerificationReport> {
        let (a, b) = self.canonical(t1, t2)?;
        let checks = vec![self.omission(a)?.0, self.omission(b)?.0, self.exclusivity(a, b)?];
        Ok(self.report(DilemmaType::Obligation, a, b, checks))
    }

    pub fn verify_prohibition(&self, t1: &str, t2: &str) -> Result<VerificationReport> {
        let (a, b) = self.canonical(t1, t2)?;
        let checks = vec![
            self.action(a, b)?.0,
            self.action(b, a)?.0,
            self.non_choice(a, b)?.0,
        ];
        Ok(self.report(DilemmaType::Prohibition, a, b, checks))
    }

    pub fn verify(&self, kind: DilemmaType, t1: &str, t2: &str) -> Result<VerificationReport> {
        match kind {
            DilemmaType::Obligation => self.verify_obligation(t1, t2),
            DilemmaType::Prohibition => self.verify_prohibition(t1, t2),
        }
    }

    fn cached_omission(
        &self,
        cache: &mut BTreeMap<String, Option<Vec<ConsequenceOutcome>>>,
        t: &str,
    ) -> Result<Option<Vec<ConsequenceOutcome>>> {
        if let Some(hit) = cache.get(t) {
            return Ok(hit.clone());
        }
        let (check, evidence) = self.omission(t)?;
        let hit = check.passed.then_some(evidence);
        cache.insert(t.to_string(), hit.clone());
        Ok(hit)
    }

    /// Every task pair that is a dilemma of either type and passes both
    /// compatibility predicates, sorted by (type, task_a, task_b).
    pub fn enumerate(&self) -> Result<Vec<DilemmaCandidate>> {
        let tm = &self.bundle.task_model;
        let ids: Vec<&str> = tm.nodes.keys().map(|t| t.as_str()).collect();
        let mut omissions = BTreeMap::new();

        let mut out = Vec::new();
        for (i, &a) in ids.iter().enumerate() {
            for &b in &ids[i + 1..] {
                let probe = DilemmaCandidate::new(
                    DilemmaType::Obligation,
                    TaskId::new(a)?,
                    Vec::new(),
                    TaskId::new(b)?,
                    Vec::new(),
                    Vec::new(),
                );
                if !contextually_compatible(tm, &probe)? || !temporally_compatible(tm, &probe)? {
                    continue;
                }
                // obligation
                if self.exclusivity(a, b)?.passed {
                    if let Some(ea) = self.cached_omission(&mut omissions, a)? {
                        if let Some(eb) = self.cached_omission(&mut omissions, b)? {
                            let mut c = probe.clone();
                            c.evidence_a = ea;
                            c.evidence_b = eb;
                            out.push(c);
                        }
                    }
                }
                // prohibition
                let (nc, enc) = self.non_choice(a, b)?;
                if !nc.passed {
                    continue;
                }
                let (ca, ea) = self.action(a, b)?;
                if !ca.passed {
                    continue;
                }
                let (cb, eb) = self.action(b, a)?;
                if !cb.passed {
                    continue;
                }
                let mut c = probe;
                c.kind = DilemmaType::Prohibition;
                c.evidence_a = ea;
                c.evidence_b = eb;
                c.nonchoice_evidence = enc;
                out.push(c);
            }
        }
        out.sort_by(|x, y| x.key().cmp(&y.key()));
        Ok(out)
    }
}

pub fn verify_obligation(bundle: &ModelBundle, t1: &str, t2: &str) -> Result<VerificationReport> {
    Verifier::new(bundle)?.verify_obligation(t1, t2)
}

pub fn verify_prohibition(bundle: &ModelBundle, t1: &str, t2: &str) -> Result<VerificationReport> {
    Verifier::new(bundle)?.verify_prohibition(t1, t2)
}

/// All dilemmas of either type in the bundle, by exhaustive verification of
/// every task pair.
pub fn enumerate_dilemmas(bundle: &ModelBundle) -> Result<Vec<DilemmaCandidate>> {
    Verifier::new(bundle)?.enumerate()
}
