use crate::error::{Error, Result};
use crate::knowledge::causality::CausalityGraph;
use crate::knowledge::task::TaskModel;
use crate::knowledge::validation::{validate_causality_graph, validate_task_model, ValidationReport};
use crate::knowledge::world::WorldModel;

/// The three knowledge models the generator reasons over.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelBundle {
    pub task_model: TaskModel,
    pub causality: CausalityGraph,
    pub world: WorldModel,
}

impl ModelBundle {
    /// Cross-checks the models. Every ACTION/BARRIER `task_ref` must resolve;
    /// with `strict`, every task condition subject must also name a world
    /// class or instance.
    pub fn new(
        task_model: TaskModel,
        causality: CausalityGraph,
        world: WorldModel,
        strict: bool,
    ) -> Result<Self> {
        for node in causality.nodes.values() {
            if let Some(task) = node.kind.task_ref() {
                if !task_model.contains(task.as_str()) {
                    return Err(Error::DanglingTaskRef {
                        node: node.id.to_string(),
                        task: task.to_string(),
                    });
                }
            }
        }
        if strict {
            for task in task_model.nodes.values() {
                let conditions = task
                    .preconditions_contextual
                    .iter()
                    .chain(&task.preconditions_favorable)
                    .chain(&task.postconditions);
                for cond in conditions {
                    if !world.resolves(&cond.subject) {
                        return Err(Error::Schema(format!(
                            "task `{}`: subject `{}` of {cond} names no world class or instance",
                            task.id, cond.subject
                        )));
                    }
                }
            }
        }
        Ok(ModelBundle {
            task_model,
            causality,
            world,
        })
    }

    /// Task and causality validation combined.
    pub fn validate(&self) -> ValidationReport {
        validate_task_model(&self.task_model)
            .merge(validate_causality_graph(&self.causality, &self.task_model))
    }
}
