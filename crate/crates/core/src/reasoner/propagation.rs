//! Truth propagation over the causality graph for a given activation
//! scenario.
//!
//! Firing rules, all monotone in predecessor truth so the least fixpoint is
//! unique and independent of evaluation order:
//!
//! * ACTION fires iff its task is performed.
//! * BARRIER is held iff its task is performed; it transmits iff not held and
//!   some predecessor fired (a root barrier transmits iff not held).
//! * EVENT fires iff ambient, or any predecessor fired. Incoming SUBSUMPTION
//!   edges come from more specific events, so specifics fire upward.
//! * GATE(AND) fires iff all predecessors fired; GATE(OR) iff any did.
//! * CONSEQUENCE is triggered iff any predecessor fired.

use crate::error::{Error, Result};
use crate::knowledge::{CausalityGraph, GateType, ModelBundle, NodeKind, TaskModel};
use crate::reasoner::index::GraphIndex;
use crate::reasoner::{ActivationScenario, ConsequenceOutcome};

/// Per-node inputs derived from a scenario.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Inputs {
    /// Ambient EVENT nodes.
    pub ambient: Vec<bool>,
    /// Task performed, for ACTION and BARRIER nodes.
    pub performed: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiringState {
    pub fired: Vec<bool>,
    /// Sweeps that changed at least one value.
    pub sweeps: usize,
    ambient: Vec<bool>,
}

impl FiringState {
    pub fn is_fired(&self, i: usize) -> bool {
        self.fired[i]
    }

    /// Triggered consequences, each with a backward-traced witness path that
    /// starts at its originating barrier, action, ambient event or root.
    pub fn triggered(&self, index: &GraphIndex<'_>) -> Vec<ConsequenceOutcome> {
        (0..index.len())
            .filter(|&i| self.fired[i] && index.node(i).kind.is_consequence())
            .map(|c| {
                let mut via = vec![c];
                let mut cur = c;
                loop {
                    let kind = &index.node(cur).kind;
                    if (cur != c && kind.is_barrier()) || self.ambient[cur] {
                        break;
                    }
                    match index.predecessors(cur).iter().find(|&&p| self.fired[p]) {
                        Some(&p) => {
                            via.push(p);
                            cur = p;
                        }
                        None => break,
                    }
                }
                via.reverse();
                ConsequenceOutcome::from_path(index, &via)
            })
            .collect()
    }
}

pub struct Propagator<'a> {
    index: GraphIndex<'a>,
    tasks: Option<&'a TaskModel>,
}

impl<'a> Propagator<'a> {
    pub fn new(bundle: &'a ModelBundle) -> Result<Self> {
        Self::build(&bundle.causality, Some(&bundle.task_model))
    }

    /// A propagator that does not check performed task ids against a task
    /// model.
    pub fn for_graph(cg: &'a CausalityGraph) -> Result<Self> {
        Self::build(cg, None)
    }

    fn build(cg: &'a CausalityGraph, tasks: Option<&'a TaskModel>) -> Result<Self> {
        let index = GraphIndex::new(cg);
        index.topo()?;
        Ok(Propagator { index, tasks })
    }

    pub fn index(&self) -> &GraphIndex<'a> {
        &self.index
    }

    pub(crate) fn inputs(&self, scenario: &ActivationScenario) -> Result<Inputs> {
        if let Some(tm) = self.tasks {
            if let Some(t) = scenario
                .performed_tasks
                .iter()
                .find(|t| !tm.contains(t.as_str()))
            {
                return Err(Error::UnknownTask(t.to_string()));
            }
        }
        let n = self.index.len();
        let mut ambient = vec![false; n];
        for ev in &scenario.ambient_events {
            let i = self.index.position(ev.as_str())?;
            let kind = &self.index.node(i).kind;
            if !kind.is_event() {
                return Err(Error::WrongKind {
                    node: ev.to_string(),
                    expected: "EVENT",
                    actual: kind.name(),
                });
            }
            ambient[i] = true;
        }
        let performed = (0..n)
            .map(|i| {
                self.index
                    .node(i)
                    .kind
                    .task_ref()
                    .is_some_and(|t| scenario.performed_tasks.contains(t))
            })
            .collect();
        Ok(Inputs { ambient, performed })
    }

    fn eval(&self, i: usize, inputs: &Inputs, fired: &[bool]) -> bool {
        let preds = self.index.predecessors(i);
        let any = || preds.iter().any(|&p| fired[p]);
        match &self.index.node(i).kind {
            NodeKind::Action { .. } => inputs.performed[i],
            NodeKind::Barrier { .. } => !inputs.performed[i] && (preds.is_empty() || any()),
            NodeKind::Event { .. } => inputs.ambient[i] || any(),
            NodeKind::Gate(GateType::And) => !preds.is_empty() && preds.iter().all(|&p| fired[p]),
            NodeKind::Gate(GateType::Or) | NodeKind::Consequence { .. } => any(),
        }
    }

    /// Single pass in topological order.
    pub(crate) fn run_inputs(&self, inputs: &Inputs) -> Vec<bool> {
        let mut fired = vec![false; self.index.len()];
        for &i in self.index.topo.as_deref().unwrap_or_default() {
            fired[i] = self.eval(i, inputs, &fired);
        }
        fired
    }

    pub fn run(&self, scenario: &ActivationScenario) -> Result<FiringState> {
        let inputs = self.inputs(scenario)?;
        let fired = self.run_inputs(&inputs);
        let sweeps = usize::from(fired.iter().any(|&f| f));
        Ok(FiringState {
            fired,
            sweeps,
            ambient: inputs.ambient,
        })
    }

    /// Chaotic iteration from all-false, visiting nodes in `order` on every
    /// sweep until nothing changes.
    pub fn run_in_order(&self, scenario: &ActivationScenario, order: &[usize]) -> Result<FiringState> {
        let inputs = self.inputs(scenario)?;
        let mut fired = vec![false; self.index.len()];
        let mut sweeps = 0;
        loop {
            let mut changed = false;
            for &i in order {
                let value = self.eval(i, &inputs, &fired);
                if value != fired[i] {
                    fired[i] = value;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
            sweeps += 1;
        }
        Ok(FiringState {
            fired,
            sweeps,
            ambient: inputs.ambient,
        })
    }
}

/// Consequences triggered under `scenario`, sorted by node id.
pub fn propagate(
    bundle: &ModelBundle,
    scenario: &ActivationScenario,
) -> Result<Vec<ConsequenceOutcome>> {
    let propagator = Propagator::new(bundle)?;
    let state = propagator.run(scenario)?;
    Ok(state.triggered(propagator.index()))
}
