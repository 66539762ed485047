//! Flat world model: declared classes and their instances.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::knowledge::condition::{Condition, ConditionSet, Ident};

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub class: Ident,
    pub properties: ConditionSet,
}

/// Classes and instances; `class_counts` is derived on construction.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct WorldModel {
    classes: BTreeSet<Ident>,
    instances: BTreeMap<Ident, Instance>,
    class_counts: BTreeMap<Ident, usize>,
}

impl WorldModel {
    pub fn new(classes: BTreeSet<Ident>, instances: BTreeMap<Ident, Instance>) -> Result<Self> {
        let mut class_counts = BTreeMap::new();
        for (id, inst) in &instances {
            if !classes.contains(&inst.class) {
                return Err(Error::Schema(format!(
                    "instance `{id}` has undeclared class `{}`",
                    inst.class
                )));
            }
            if classes.contains(id) {
                return Err(Error::Schema(format!(
                    "instance id `{id}` collides with a class name"
                )));
            }
            *class_counts.entry(inst.class.clone()).or_insert(0) += 1;
        }
        Ok(WorldModel {
            classes,
            instances,
            class_counts,
        })
    }

    pub fn classes(&self) -> &BTreeSet<Ident> {
        &self.classes
    }

    pub fn instances(&self) -> &BTreeMap<Ident, Instance> {
        &self.instances
    }

    /// Instances per class; classes without instances are absent.
    pub fn class_counts(&self) -> &BTreeMap<Ident, usize> {
        &self.class_counts
    }

    pub fn count(&self, class: &Ident) -> usize {
        self.class_counts.get(class).copied().unwrap_or(0)
    }

    /// The class an identifier designates: the class itself, or the class
    /// of the named instance.
    pub fn class_of(&self, id: &Ident) -> Option<&Ident> {
        if let Some(class) = self.classes.get(id) {
            return Some(class);
        }
        self.instances.get(id).map(|inst| &inst.class)
    }

    /// World classes designated by a condition's subject or object.
    pub fn classes_mentioned(&self, cond: &Condition) -> BTreeSet<&Ident> {
        let mut out = BTreeSet::new();
        out.extend(self.class_of(&cond.subject));
        if let Some(obj) = cond.object.as_ident() {
            out.extend(self.class_of(obj));
        }
        out
    }

    pub fn resolves(&self, id: &Ident) -> bool {
        self.class_of(id).is_some()
    }
}
