//! Models shipped with the crate: the driving proof of concept, the
//! barrier/action selection example and a minimal prohibition dilemma.
//!
//! The CLI accepts these names wherever a model path is expected.

use crate::error::Result;
use crate::knowledge::ModelBundle;
use crate::model_io::load_bundle;

const FIXTURES: &[(&str, &str)] = &[
    ("driving_tasks", include_str!("../fixtures/driving_tasks.json")),
    ("driving_causality", include_str!("../fixtures/driving_causality.json")),
    ("driving_world", include_str!("../fixtures/driving_world.json")),
    ("fig6_tasks", include_str!("../fixtures/fig6_tasks.json")),
    ("fig6_causality", include_str!("../fixtures/fig6_causality.json")),
    ("fig6_world", include_str!("../fixtures/empty_world.json")),
    ("two_evils_tasks", include_str!("../fixtures/two_evils_tasks.json")),
    ("two_evils_causality", include_str!("../fixtures/two_evils_causality.json")),
    ("two_evils_world", include_str!("../fixtures/two_evils_world.json")),
    ("empty_world", include_str!("../fixtures/empty_world.json")),
];

/// Document text of a built-in fixture.
pub fn builtin(name: &str) -> Option<&'static str> {
    FIXTURES.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

pub fn names() -> impl Iterator<Item = &'static str> {
    FIXTURES.iter().map(|(n, _)| *n)
}

fn bundle(prefix: &str, strict: bool) -> Result<ModelBundle> {
    let get = |suffix: &str| builtin(&format!("{prefix}_{suffix}")).expect("fixture exists");
    load_bundle(get("tasks"), get("causality"), get("world"), strict)
}

pub fn driving() -> ModelBundle {
    bundle("driving", true).expect("driving fixture is valid")
}

pub fn fig6() -> ModelBundle {
    bundle("fig6", false).expect("fig6 fixture is valid")
}

pub fn two_evils() -> ModelBundle {
    bundle("two_evils", true).expect("two_evils fixture is valid")
}
