//! Seeded generator of small valid model bundles.

use std::collections::{BTreeMap, BTreeSet};

use dilemma_core::{
    CausalNode, CausalityGraph, Category, Condition, ConditionSet, Constructor, Edge, EdgeKind,
    GateType, Ident, Instance, ModelBundle, NodeKind, TaskModel, TaskNode, WorldModel,
};
use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const MAX_TASKS: usize = 12;
pub const MAX_NODES: usize = 25;

pub fn id(s: &str) -> Ident {
    Ident::new(s).unwrap()
}

fn pick<'a, T>(rng: &mut impl Rng, items: &'a [T]) -> &'a T {
    &items[rng.random_range(0..items.len())]
}

// Small vocabularies so that conflicts actually happen.
const SUBJECTS: &[&str] = &["Car", "Light", "Road", "Phone"];
const PRE_PREDICATES: &[&str] = &["is-ahead", "has-state"];
const POST_PREDICATES: &[&str] = &["is-stopped", "has-speed"];
const OBJECTS: &[&str] = &["true", "false", "high"];

fn random_condition(rng: &mut impl Rng, predicates: &[&str]) -> Condition {
    Condition::parse(
        pick(rng, SUBJECTS),
        pick(rng, predicates),
        pick(rng, OBJECTS),
    )
    .unwrap()
}

/// Conflict-free set of up to `max` conditions.
fn random_conditions(rng: &mut impl Rng, predicates: &[&str], max: usize) -> ConditionSet {
    let mut set = ConditionSet::new();
    for _ in 0..rng.random_range(0..=max) {
        let c = random_condition(rng, predicates);
        if !set.iter().any(|d| dilemma_core::condition_conflict(&c, d)) {
            set.insert(c);
        }
    }
    set
}

/// Task tree over 2–6 leaves merged bottom-up, at most 11 tasks.
pub fn random_task_model(rng: &mut impl Rng) -> TaskModel {
    let leaves = rng.random_range(2..=6);
    let mut nodes = BTreeMap::new();
    let mut pending: Vec<Ident> = Vec::new();
    for i in 0..leaves {
        let mut leaf = TaskNode::leaf(id(&format!("L{i}")));
        leaf.preconditions_contextual = random_conditions(rng, PRE_PREDICATES, 2);
        leaf.postconditions = random_conditions(rng, POST_PREDICATES, 2);
        pending.push(leaf.id.clone());
        nodes.insert(leaf.id.clone(), leaf);
    }
    let mut next = 0;
    while pending.len() > 1 {
        let take = if pending.len() == 3 || rng.random_bool(0.3) {
            pending.len().min(3)
        } else {
            2
        };
        let start = rng.random_range(0..=pending.len() - take);
        let children: Vec<Ident> = pending.drain(start..start + take).collect();
        let constructor = *pick(rng, &[Constructor::Seq, Constructor::Par, Constructor::Ind]);
        let mut node = TaskNode::leaf(id(&format!("N{next}")));
        next += 1;
        node.constructor = constructor;
        node.children = children;
        if rng.random_bool(0.3) {
            node.postconditions = random_conditions(rng, POST_PREDICATES, 1);
        }
        pending.insert(start, node.id.clone());
        nodes.insert(node.id.clone(), node);
    }
    let root = pending.pop().unwrap();
    debug_assert!(nodes.len() <= MAX_TASKS);
    TaskModel { root, nodes }
}

#[derive(Clone, Copy)]
enum Draft {
    Event,
    Action,
    Barrier,
    Gate(GateType),
    Consequence,
}

/// Makes the postconditions of `a` and `b` contradict each other.
fn force_post_conflict(rng: &mut impl Rng, tm: &mut TaskModel, a: &Ident, b: &Ident) {
    let subject = *pick(rng, SUBJECTS);
    for (task, object) in [(a, "true"), (b, "false")] {
        let post = &mut tm.nodes.get_mut(task).unwrap().postconditions;
        post.retain(|c| !(c.subject.as_str() == subject && c.predicate.as_str() == "is-stopped"));
        post.insert(Condition::parse(subject, "is-stopped", object).unwrap());
    }
}

/// Distinct sorted positions in `0..n`.
fn positions(rng: &mut impl Rng, n: usize, k: usize) -> Vec<usize> {
    let mut all: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = rng.random_range(i..n);
        all.swap(i, j);
    }
    let mut chosen = all[..k].to_vec();
    chosen.sort_unstable();
    chosen
}

/// Two distinct tasks, usually leaves.
fn motif_pair(rng: &mut impl Rng, leaves: &[Ident], all: &[Ident]) -> (Ident, Ident) {
    let pool = if rng.random_bool(0.8) { leaves } else { all };
    let a = pick(rng, pool).clone();
    let mut b = a.clone();
    while b == a {
        b = pick(rng, pool).clone();
    }
    (a, b)
}

/// Sorted positions not used by an earlier motif.
fn free_positions(
    rng: &mut impl Rng,
    n: usize,
    k: usize,
    taken: &mut BTreeSet<usize>,
) -> Vec<usize> {
    loop {
        let p = positions(rng, n, k);
        if p.iter().all(|i| !taken.contains(i)) {
            taken.extend(p.iter().copied());
            return p;
        }
    }
}

/// Graph of 3–`max_nodes` nodes; edges only run from lower to higher index
/// so the result is acyclic. Random noise is drawn around planted obligation
/// and prohibition motifs, then kind constraints are repaired. May edit the
/// postconditions of the motif tasks.
pub fn random_causality(rng: &mut impl Rng, tm: &mut TaskModel, max_nodes: usize) -> CausalityGraph {
    let plant_obligation = rng.random_bool(0.5);
    let plant_prohibition = rng.random_bool(0.35);
    let needed = 3.max(4 * usize::from(plant_obligation) + 6 * usize::from(plant_prohibition));
    let n = rng.random_range(needed..=max_nodes.max(needed));

    let all: Vec<Ident> = tm.nodes.keys().cloned().collect();
    let leaves: Vec<Ident> = tm
        .nodes
        .values()
        .filter(|t| t.is_leaf())
        .map(|t| t.id.clone())
        .collect();
    // a few tasks own several nodes, so both representations of one task
    // show up
    let mut owners: Vec<Ident> = (0..rng.random_range(2..=all.len().min(6)))
        .map(|_| pick(rng, &all).clone())
        .collect();

    let mut drafts: Vec<Draft> = (0..n)
        .map(|_| match rng.random_range(0..100) {
            0..30 => Draft::Event,
            30..45 => Draft::Action,
            45..65 => Draft::Barrier,
            65..73 => Draft::Gate(GateType::And),
            73..80 => Draft::Gate(GateType::Or),
            _ => Draft::Consequence,
        })
        .collect();
    let mut refs: BTreeMap<usize, Ident> = BTreeMap::new();
    let mut forced: Vec<(usize, usize)> = Vec::new();
    let mut taken: BTreeSet<usize> = BTreeSet::new();

    if plant_obligation {
        let (a, b) = motif_pair(rng, &leaves, &all);
        if rng.random_bool(0.7) {
            force_post_conflict(rng, tm, &a, &b);
        }
        let p = free_positions(rng, n, 4, &mut taken);
        drafts[p[0]] = Draft::Barrier;
        drafts[p[1]] = Draft::Barrier;
        drafts[p[2]] = Draft::Consequence;
        drafts[p[3]] = Draft::Consequence;
        refs.insert(p[0], a.clone());
        refs.insert(p[1], b.clone());
        forced.extend([(p[0], p[2]), (p[1], p[3])]);
        owners.extend([a, b]);
    }
    if plant_prohibition {
        let (a, b) = motif_pair(rng, &leaves, &all);
        let p = free_positions(rng, n, 6, &mut taken);
        drafts[p[0]] = Draft::Action;
        drafts[p[1]] = Draft::Action;
        drafts[p[2]] = Draft::Barrier;
        drafts[p[3]] = Draft::Barrier;
        drafts[p[4]] = Draft::Gate(GateType::And);
        drafts[p[5]] = Draft::Consequence;
        for (i, t) in [(0, &a), (1, &b), (2, &a), (3, &b)] {
            refs.insert(p[i], t.clone());
        }
        forced.extend([(p[0], p[5]), (p[1], p[5]), (p[2], p[4]), (p[3], p[4]), (p[4], p[5])]);
        owners.extend([a, b]);
    }

    let density = rng.random_range(0.05..0.25);
    let mut edges: BTreeMap<(usize, usize), EdgeKind> = BTreeMap::new();
    for i in 0..n {
        for j in i + 1..n {
            if matches!(drafts[i], Draft::Consequence) || matches!(drafts[j], Draft::Action) {
                continue;
            }
            if rng.random_bool(density) {
                let sub = matches!(drafts[i], Draft::Event)
                    && matches!(drafts[j], Draft::Event)
                    && rng.random_bool(0.2);
                let kind = if sub {
                    EdgeKind::Subsumption
                } else {
                    EdgeKind::Causal
                };
                edges.insert((i, j), kind);
            }
        }
    }
    for e in forced {
        edges.insert(e, EdgeKind::Causal);
    }
    // under-connected gates become plain events; subsumption edges never
    // touch gates, so this cannot break them
    for (g, draft) in drafts.iter_mut().enumerate() {
        if let Draft::Gate(_) = draft {
            let ins = edges.keys().filter(|(_, to)| *to == g).count();
            let outs = edges.keys().filter(|(from, _)| *from == g).count();
            if ins < 2 || outs < 1 {
                *draft = Draft::Event;
            }
        }
    }

    let names: Vec<Ident> = (0..n).map(|i| id(&format!("n{i:02}"))).collect();
    let mut cg = CausalityGraph::default();
    for (i, draft) in drafts.iter().enumerate() {
        let lead_time = rng.random_bool(0.2).then(|| rng.random_range(0..120) as f64);
        let task_ref = refs.get(&i).cloned().unwrap_or_else(|| pick(rng, &owners).clone());
        let kind = match *draft {
            Draft::Event => NodeKind::Event { lead_time },
            Draft::Action => NodeKind::Action { task_ref, lead_time },
            Draft::Barrier => NodeKind::Barrier { task_ref },
            Draft::Gate(g) => NodeKind::Gate(g),
            Draft::Consequence => NodeKind::Consequence {
                category: *pick(rng, &Category::ALL),
                severity: rng.random_range(0..=5),
            },
        };
        cg.nodes
            .insert(names[i].clone(), CausalNode::new(names[i].clone(), kind));
    }
    for ((i, j), kind) in edges {
        cg.edges.insert(Edge {
            from: names[i].clone(),
            to: names[j].clone(),
            kind,
        });
    }
    cg
}

/// Instances for the vocabulary subjects, some missing, some repeated.
pub fn random_world(rng: &mut impl Rng) -> WorldModel {
    let mut classes = BTreeSet::new();
    let mut instances = BTreeMap::new();
    for subject in SUBJECTS {
        let class = id(&format!("{subject}Class"));
        classes.insert(class.clone());
        let count = rng.random_range(0..=3);
        for k in 0..count {
            let name = if k == 0 {
                subject.to_string()
            } else {
                format!("{subject}_{k}")
            };
            instances.insert(
                id(&name),
                Instance {
                    class: class.clone(),
                    properties: ConditionSet::new(),
                },
            );
        }
    }
    WorldModel::new(classes, instances).unwrap()
}

pub fn random_bundle(rng: &mut impl Rng) -> ModelBundle {
    random_bundle_sized(rng, MAX_NODES)
}

pub fn random_bundle_sized(rng: &mut impl Rng, max_nodes: usize) -> ModelBundle {
    let mut tm = random_task_model(rng);
    let cg = random_causality(rng, &mut tm, max_nodes);
    let wm = random_world(rng);
    let bundle = ModelBundle::new(tm, cg, wm, false).expect("task refs resolve");
    let report = bundle.validate();
    assert!(
        report.errors().next().is_none(),
        "generator produced an invalid model: {:?}",
        report.errors().collect::<Vec<_>>()
    );
    bundle
}

pub fn bundle_from_seed(seed: u64) -> ModelBundle {
    random_bundle(&mut ChaCha8Rng::seed_from_u64(seed))
}

/// Random tree of `n` tasks: node `i` hangs below some node `< i`. Arity is
/// not enforced; only the shape matters here.
pub fn random_tree(rng: &mut impl Rng, n: usize) -> TaskModel {
    let mut children: Vec<Vec<Ident>> = vec![Vec::new(); n];
    for i in 1..n {
        let parent = rng.random_range(0..i);
        children[parent].push(id(&format!("T{i}")));
    }
    let nodes = children
        .into_iter()
        .enumerate()
        .map(|(i, kids)| {
            let mut node = TaskNode::leaf(id(&format!("T{i}")));
            if !kids.is_empty() {
                node.constructor = Constructor::Ind;
                node.children = kids;
            }
            (node.id.clone(), node)
        })
        .collect();
    TaskModel {
        root: id("T0"),
        nodes,
    }
}
