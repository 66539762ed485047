//! Brute-force reference implementations, written without the library's
//! graph index or search helpers.

use std::collections::{BTreeMap, BTreeSet};

use dilemma_core::{CausalityGraph, Ident, NodeKind, TaskModel};

/// (source, consequence) pairs such that some simple path from the source
/// reaches the consequence without entering another barrier. Sources are
/// the nodes accepted by `keep`.
pub fn unguarded_pairs(
    cg: &CausalityGraph,
    keep: impl Fn(&NodeKind) -> bool,
) -> BTreeSet<(Ident, Ident)> {
    let mut out = BTreeSet::new();
    for node in cg.nodes.values().filter(|n| keep(&n.kind)) {
        let mut path = vec![node.id.clone()];
        all_paths(cg, &mut path, &mut |p| {
            let last = p.last().unwrap();
            if p.len() > 1 && cg.nodes[last].kind.is_consequence() {
                out.insert((node.id.clone(), last.clone()));
            }
        });
    }
    out
}

/// Visits every simple path that starts with `path` and never enters a
/// barrier after its first node.
fn all_paths(cg: &CausalityGraph, path: &mut Vec<Ident>, visit: &mut impl FnMut(&[Ident])) {
    visit(path);
    let last = path.last().unwrap().clone();
    let next: Vec<Ident> = cg
        .edges
        .iter()
        .filter(|e| e.from == last)
        .map(|e| e.to.clone())
        .collect();
    for n in next {
        if path.contains(&n) || cg.nodes[&n].kind.is_barrier() {
            continue;
        }
        path.push(n);
        all_paths(cg, path, visit);
        path.pop();
    }
}

/// Nodes reachable from any node without predecessors, skipping `blocked`.
pub fn reachable_from_roots(cg: &CausalityGraph, blocked: &BTreeSet<Ident>) -> BTreeSet<Ident> {
    let has_pred: BTreeSet<&Ident> = cg.edges.iter().map(|e| &e.to).collect();
    let mut stack: Vec<Ident> = cg
        .nodes
        .keys()
        .filter(|n| !has_pred.contains(n) && !blocked.contains(*n))
        .cloned()
        .collect();
    let mut seen = BTreeSet::new();
    while let Some(n) = stack.pop() {
        if !seen.insert(n.clone()) {
            continue;
        }
        for e in cg.edges.iter().filter(|e| e.from == n) {
            if !blocked.contains(&e.to) {
                stack.push(e.to.clone());
            }
        }
    }
    seen
}

/// Deepest node present in the ancestor sets of both tasks, ancestor sets
/// being computed from the children lists alone.
pub fn brute_lca(tm: &TaskModel, t1: &str, t2: &str) -> Ident {
    let mut parent: BTreeMap<&Ident, &Ident> = BTreeMap::new();
    for node in tm.nodes.values() {
        for c in &node.children {
            parent.insert(c, &node.id);
        }
    }
    let ancestors = |t: &str| {
        let mut set = BTreeSet::new();
        let mut cur = tm.nodes.get_key_value(t).unwrap().0;
        set.insert(cur.clone());
        while let Some(p) = parent.get(cur) {
            set.insert((*p).clone());
            cur = p;
        }
        set
    };
    let depth = |t: &Ident| {
        let mut d = 0;
        let mut cur = t;
        while let Some(p) = parent.get(cur) {
            d += 1;
            cur = p;
        }
        d
    };
    let (a, b) = (ancestors(t1), ancestors(t2));
    a.intersection(&b)
        .max_by_key(|n| depth(n))
        .cloned()
        .expect("root is common to all")
}
