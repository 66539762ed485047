use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::knowledge::{validate_task_model, ConditionSet, Constructor, TaskId, TaskModel, TaskNode};
use crate::model_io::{parse_document, require_ok, to_document, FORMAT_VERSION};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TaskDoc {
    format_version: u64,
    root: TaskId,
    tasks: Vec<TaskEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TaskEntry {
    id: TaskId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    constructor: String,
    #[serde(default)]
    children: Vec<TaskId>,
    #[serde(default)]
    pre_contextual: ConditionSet,
    #[serde(default)]
    pre_favorable: ConditionSet,
    #[serde(default)]
    post: ConditionSet,
}

/// Parses and validates a task model document.
pub fn parse_task_model(text: &str) -> Result<TaskModel> {
    let tm = decode_task_model(text)?;
    require_ok(validate_task_model(&tm))?;
    Ok(tm)
}

/// Parses without structural validation, so that a malformed model can
/// still be reported on in full.
pub(crate) fn decode_task_model(text: &str) -> Result<TaskModel> {
    let doc: TaskDoc = parse_document(text)?;
    let mut nodes = BTreeMap::new();
    for entry in doc.tasks {
        let constructor: Constructor = entry.constructor.parse()?;
        let node = TaskNode {
            name: entry.name.unwrap_or_else(|| entry.id.to_string()),
            id: entry.id.clone(),
            constructor,
            children: entry.children,
            preconditions_contextual: entry.pre_contextual,
            preconditions_favorable: entry.pre_favorable,
            postconditions: entry.post,
        };
        if nodes.insert(entry.id.clone(), node).is_some() {
            return Err(Error::Schema(format!("duplicate task id `{}`", entry.id)));
        }
    }
    Ok(TaskModel {
        root: doc.root,
        nodes,
    })
}

/// Tasks in id order; names equal to the id are omitted.
pub fn serialize_task_model(tm: &TaskModel) -> String {
    let doc = TaskDoc {
        format_version: FORMAT_VERSION,
        root: tm.root.clone(),
        tasks: tm
            .nodes
            .values()
            .map(|n| TaskEntry {
                id: n.id.clone(),
                name: (n.name != n.id.as_str()).then(|| n.name.clone()),
                constructor: n.constructor.as_str().to_string(),
                children: n.children.clone(),
                pre_contextual: n.preconditions_contextual.clone(),
                pre_favorable: n.preconditions_favorable.clone(),
                post: n.postconditions.clone(),
            })
            .collect(),
    };
    to_document(&doc)
}
