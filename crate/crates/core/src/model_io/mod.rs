//! JSON documents for the three knowledge models and the generation
//! result, plus Graphviz export of the causality graph.
//!
//! Every document carries `"format_version": 1`. Malformed JSON yields
//! [`Error::Parse`] with a position; well-formed documents that do not
//! describe a valid model yield [`Error::Schema`].

mod causality;
mod dot;
mod result;
mod tasks;
mod world;

use serde::de::DeserializeOwned;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::knowledge::{ModelBundle, ValidationReport};

pub use causality::{parse_causality_graph, serialize_causality_graph};
pub(crate) use causality::decode_causality_graph;
pub use dot::export_dot;
pub use result::{parse_result, write_result, CandidateRecord, ConsequenceRecord, ResultDocument};
pub use tasks::{parse_task_model, serialize_task_model};
pub(crate) use tasks::decode_task_model;
pub use world::{parse_world_model, serialize_world_model};

pub const FORMAT_VERSION: u64 = 1;

fn json_error(e: serde_json::Error) -> Error {
    if e.is_syntax() || e.is_eof() {
        Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    } else {
        Error::Schema(e.to_string())
    }
}

/// Syntax first, then the version, then the shape.
pub(crate) fn parse_document<T: DeserializeOwned>(text: &str) -> Result<T> {
    let value: Value = serde_json::from_str(text).map_err(json_error)?;
    let Some(obj) = value.as_object() else {
        return Err(Error::Schema("document must be a JSON object".into()));
    };
    match obj.get("format_version") {
        None => return Err(Error::Schema("missing format_version".into())),
        Some(v) if v.as_u64() == Some(FORMAT_VERSION) => {}
        Some(v) => return Err(Error::Schema(format!("unsupported format_version {v}"))),
    }
    serde_json::from_value(value).map_err(|e| Error::Schema(e.to_string()))
}

pub(crate) fn to_document<T: serde::Serialize>(doc: &T) -> String {
    let mut out = serde_json::to_string_pretty(doc).expect("documents always serialize");
    out.push('\n');
    out
}

/// Turns a failed validation into a schema error listing every problem.
pub(crate) fn require_ok(report: ValidationReport) -> Result<()> {
    if report.ok {
        return Ok(());
    }
    let msgs: Vec<String> = report.errors().map(ToString::to_string).collect();
    Err(Error::Schema(msgs.join("; ")))
}

/// Parses and cross-checks the three model documents.
pub fn load_bundle(tasks: &str, causality: &str, world: &str, strict: bool) -> Result<ModelBundle> {
    ModelBundle::new(
        parse_task_model(tasks)?,
        parse_causality_graph(causality)?,
        parse_world_model(world)?,
        strict,
    )
}
