//! Domain types shared by every stage of the generator.

pub mod bundle;
pub mod causality;
pub mod condition;
pub mod task;
pub mod validation;
pub mod world;

pub use bundle::ModelBundle;
pub use causality::{
    CausalNode, CausalityGraph, Category, Edge, EdgeKind, GateType, NodeKind, MAX_SEVERITY,
};
pub use condition::{
    condition_conflict, condition_set_conflict, first_conflict, Condition, ConditionSet, Ident,
    Literal, NodeId, TaskId,
};
pub use task::{lowest_common_ancestor, Constructor, TaskModel, TaskNode};
pub use validation::{
    validate_causality_graph, validate_graph_structure, validate_task_model, Issue, IssueSeverity, ValidationReport,
};
pub use world::{Instance, WorldModel};
