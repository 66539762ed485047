use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::knowledge::{ConditionSet, Ident, Instance, WorldModel};
use crate::model_io::{parse_document, to_document, FORMAT_VERSION};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WorldDoc {
    format_version: u64,
    #[serde(default)]
    classes: Vec<Ident>,
    #[serde(default)]
    instances: Vec<InstanceEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceEntry {
    id: Ident,
    class: Ident,
    #[serde(default)]
    properties: ConditionSet,
}

pub fn parse_world_model(text: &str) -> Result<WorldModel> {
    let doc: WorldDoc = parse_document(text)?;
    let classes: BTreeSet<Ident> = doc.classes.into_iter().collect();
    let mut instances = BTreeMap::new();
    for entry in doc.instances {
        let inst = Instance {
            class: entry.class,
            properties: entry.properties,
        };
        if instances.insert(entry.id.clone(), inst).is_some() {
            return Err(Error::Schema(format!("duplicate instance id `{}`", entry.id)));
        }
    }
    WorldModel::new(classes, instances)
}

pub fn serialize_world_model(wm: &WorldModel) -> String {
    let doc = WorldDoc {
        format_version: FORMAT_VERSION,
        classes: wm.classes().iter().cloned().collect(),
        instances: wm
            .instances()
            .iter()
            .map(|(id, inst)| InstanceEntry {
                id: id.clone(),
                class: inst.class.clone(),
                properties: inst.properties.clone(),
            })
            .collect(),
    };
    to_document(&doc)
}
