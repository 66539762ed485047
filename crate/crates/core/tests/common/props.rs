//! Property checks shared by the proptest suite and the acceptance runner.
//! Each check drives its own deterministic `TestRunner` and returns the
//! first (shrunk) failure as text.

use std::collections::{BTreeMap, BTreeSet};

use dilemma_core::{
    condition_conflict, condition_set_conflict, contextually_compatible, enumerate_dilemmas,
    export_dot, extract_goal_state, lowest_common_ancestor, negative_actions, negative_barriers,
    parse_causality_graph, parse_result, parse_task_model, parse_world_model, pedagogical_fit,
    propagate, rank, run_pipeline, scenario_fit, serialize_causality_graph, serialize_task_model,
    serialize_world_model, validate_causality_graph, validate_task_model,
    write_result, ActivationScenario, CausalNode, CausalityGraph, Category, Condition,
    ConditionSet, ConsequenceOutcome, Constructor, DilemmaCandidate, DilemmaFilter, DilemmaType,
    Ident, Instance, ModelBundle, NodeKind, PedagogicalInstruction, Propagator,
    ResultDocument, ScoringConfig, TaskModel, TaskNode, Verifier, WorldModel, Witness,
};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};
use rand::seq::SliceRandom;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::models::{bundle_from_seed, id, random_bundle_sized, random_tree};
use super::oracles::{brute_lca, reachable_from_roots, unguarded_pairs};

pub type Outcome = Result<(), String>;

fn runner(cases: u32) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn check<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Outcome {
    runner(cases)
        .run(&strategy, test)
        .map_err(|e| e.to_string())
}

fn fail(msg: impl Into<String>) -> TestCaseError {
    TestCaseError::fail(msg.into())
}

// ---------------------------------------------------------------- knowledge

fn condition() -> impl Strategy<Value = Condition> {
    (
        prop::sample::select(vec!["Car", "Light", "car"]),
        prop::sample::select(vec!["is-on", "has-color"]),
        prop::sample::select(vec!["true", "True", "false", "1", "1.0", "2", "Red", "red"]),
    )
        .prop_map(|(s, p, o)| Condition::parse(s, p, o).unwrap())
}

fn condition_set() -> impl Strategy<Value = ConditionSet> {
    prop::collection::btree_set(condition(), 0..6)
}

fn conflict_free(set: ConditionSet) -> ConditionSet {
    let mut out = ConditionSet::new();
    for c in set {
        if !out.iter().any(|d| condition_conflict(&c, d)) {
            out.insert(c);
        }
    }
    out
}

pub fn conflict_symmetry_irreflexivity(cases: u32) -> Outcome {
    check(cases, (condition(), condition()), |(a, b)| {
        prop_assert!(!condition_conflict(&a, &a), "{a} conflicts with itself");
        prop_assert_eq!(condition_conflict(&a, &b), condition_conflict(&b, &a));
        Ok(())
    })
}

pub fn set_conflict_self_and_superset(cases: u32) -> Outcome {
    let strategy = (condition_set(), condition_set(), condition_set());
    check(cases, strategy, |(s, t, extra)| {
        let s = conflict_free(s);
        prop_assert!(!condition_set_conflict(&s, &s));
        if condition_set_conflict(&s, &t) {
            let bigger: ConditionSet = s.union(&extra).cloned().collect();
            prop_assert!(condition_set_conflict(&bigger, &t));
            prop_assert!(condition_set_conflict(&t, &bigger));
        }
        Ok(())
    })
}

pub fn lca_matches_brute_force(cases: u32) -> Outcome {
    check(cases, (any::<u64>(), 1usize..=50), |(seed, n)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tm = random_tree(&mut rng, n);
        for _ in 0..10 {
            let a = format!("T{}", rng.random_range(0..n));
            let b = format!("T{}", rng.random_range(0..n));
            let got = lowest_common_ancestor(&tm, &a, &b).map_err(|e| fail(e.to_string()))?;
            prop_assert_eq!(got, brute_lca(&tm, &a, &b), "lca({}, {})", a, b);
        }
        Ok(())
    })
}

pub fn validation_is_pure(cases: u32) -> Outcome {
    check(cases, any::<u64>(), |seed| {
        let b = bundle_from_seed(seed);
        prop_assert_eq!(validate_task_model(&b.task_model), validate_task_model(&b.task_model));
        prop_assert_eq!(
            validate_causality_graph(&b.causality, &b.task_model),
            validate_causality_graph(&b.causality, &b.task_model)
        );
        prop_assert_eq!(b.validate(), b.clone().validate());
        Ok(())
    })
}

// ----------------------------------------------------------------- model_io

pub fn model_round_trip(cases: u32) -> Outcome {
    check(cases, any::<u64>(), |seed| {
        let b = bundle_from_seed(seed);
        let tm = parse_task_model(&serialize_task_model(&b.task_model))
            .map_err(|e| fail(e.to_string()))?;
        prop_assert_eq!(&tm, &b.task_model);
        prop_assert!(validate_task_model(&tm).ok);
        let cg = parse_causality_graph(&serialize_causality_graph(&b.causality))
            .map_err(|e| fail(e.to_string()))?;
        prop_assert_eq!(&cg, &b.causality);
        prop_assert!(validate_causality_graph(&cg, &tm).ok);
        let wm = parse_world_model(&serialize_world_model(&b.world))
            .map_err(|e| fail(e.to_string()))?;
        prop_assert_eq!(&wm, &b.world);
        Ok(())
    })
}

pub fn result_round_trip(cases: u32) -> Outcome {
    check(cases, any::<u64>(), |seed| {
        let b = bundle_from_seed(seed);
        let ranked = run_pipeline(&b, &PedagogicalInstruction::default(), &ScoringConfig::default())
            .map_err(|e| fail(e.to_string()))?
            .ranked;
        let goal = ranked
            .first()
            .map(|c| extract_goal_state(c, &b.task_model).unwrap());
        let text = write_result(DilemmaFilter::Both, &ranked, goal.as_ref());
        let doc = parse_result(&text).map_err(|e| fail(e.to_string()))?;
        prop_assert_eq!(doc, ResultDocument::new(DilemmaFilter::Both, &ranked, goal.as_ref()));
        Ok(())
    })
}

pub fn dot_is_deterministic(cases: u32) -> Outcome {
    check(cases, any::<u64>(), |seed| {
        let b = bundle_from_seed(seed);
        let reparsed = parse_causality_graph(&serialize_causality_graph(&b.causality)).unwrap();
        let dot = export_dot(&b.causality);
        prop_assert_eq!(&dot, &export_dot(&b.causality.clone()));
        prop_assert_eq!(&dot, &export_dot(&reparsed));
        Ok(())
    })
}

// ----------------------------------------------------------------- reasoner

fn small_bundle(seed: u64) -> ModelBundle {
    random_bundle_sized(&mut ChaCha8Rng::seed_from_u64(seed), 20)
}

fn outcome_pairs(found: &[(Ident, Vec<ConsequenceOutcome>)]) -> BTreeSet<(Ident, Ident)> {
    found
        .iter()
        .flat_map(|(src, outs)| outs.iter().map(move |o| (src.clone(), o.node.clone())))
        .collect()
}

/// Witness paths must be real edges, start at the source and cross no other
/// barrier.
fn check_witnesses(
    cg: &CausalityGraph,
    found: &[(Ident, Vec<ConsequenceOutcome>)],
) -> Result<(), TestCaseError> {
    for (src, outs) in found {
        for o in outs {
            prop_assert_eq!(o.via.first(), Some(src));
            prop_assert_eq!(o.via.last(), Some(&o.node));
            for w in o.via.windows(2) {
                prop_assert!(cg.edges.iter().any(|e| e.from == w[0] && e.to == w[1]));
                prop_assert!(!cg.nodes[&w[1]].kind.is_barrier());
            }
        }
    }
    Ok(())
}

pub fn negative_sets_match_oracle(cases: u32) -> Outcome {
    check(cases, any::<u64>(), |seed| {
        let b = small_bundle(seed);
        let cg = &b.causality;
        let barriers = negative_barriers(cg);
        let actions = negative_actions(cg);
        prop_assert_eq!(outcome_pairs(&barriers), unguarded_pairs(cg, NodeKind::is_barrier));
        prop_assert_eq!(outcome_pairs(&actions), unguarded_pairs(cg, NodeKind::is_action));
        check_witnesses(cg, &barriers)?;
        check_witnesses(cg, &actions)?;
        Ok(())
    })
}

fn random_scenario(rng: &mut ChaCha8Rng, b: &ModelBundle) -> ActivationScenario {
    let has_pred: BTreeSet<&Ident> = b.causality.edges.iter().map(|e| &e.to).collect();
    ActivationScenario {
        performed_tasks: b
            .task_model
            .nodes
            .keys()
            .filter(|_| rng.random_bool(0.4))
            .cloned()
            .collect(),
        ambient_events: b
            .causality
            .nodes
            .values()
            .filter(|n| n.kind.is_event() && !has_pred.contains(&n.id))
            .filter(|_| rng.random_bool(0.6))
            .map(|n| n.id.clone())
            .collect(),
    }
}

pub fn propagation_order_independent(cases: u32) -> Outcome {
    check(cases, any::<u64>(), |seed| {
        let b = small_bundle(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let p = Propagator::new(&b).map_err(|e| fail(e.to_string()))?;
        let n = p.index().len();
        for _ in 0..4 {
            let scenario = random_scenario(&mut rng, &b);
            let reference = p.run(&scenario).unwrap();
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut rng);
            let chaotic = p.run_in_order(&scenario, &order).unwrap();
            prop_assert_eq!(&chaotic.fired, &reference.fired, "order {:?}", order);
            prop_assert!(chaotic.sweeps <= n, "{} sweeps over {} nodes", chaotic.sweeps, n);
        }
        Ok(())
    })
}

pub fn harm_removal_monotone(cases: u32) -> Outcome {
    check(cases, any::<u64>(), |seed| {
        let b = small_bundle(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xba77);
        for task in b.causality.referenced_tasks() {
            let mut scenario = random_scenario(&mut rng, &b);
            scenario.performed_tasks.insert(task.clone());
            let held: BTreeSet<Ident> = b
                .causality
                .nodes_for_task(task.as_str())
                .filter(|n| n.kind.is_barrier())
                .map(|n| n.id.clone())
                .collect();
            let open = reachable_from_roots(&b.causality, &held);
            for o in propagate(&b, &scenario).unwrap() {
                prop_assert!(
                    open.contains(&o.node),
                    "{} triggered although every path crosses a held barrier of {}",
                    o.node,
                    task
                );
            }
        }
        Ok(())
    })
}

// ------------------------------------------------------------------ scoring

const SCORING_TASKS: usize = 6;

/// Flat task model whose leaves each need one instance of their own class.
fn scoring_bundle(counts: &[usize], leads: &[f64]) -> ModelBundle {
    let mut nodes = BTreeMap::new();
    let mut root = TaskNode::leaf(id("Root"));
    root.constructor = Constructor::Ind;
    for i in 0..SCORING_TASKS {
        let mut leaf = TaskNode::leaf(id(&format!("K{i}")));
        leaf.preconditions_contextual
            .insert(Condition::parse(&format!("C{i}"), "is-present", "true").unwrap());
        root.children.push(leaf.id.clone());
        nodes.insert(leaf.id.clone(), leaf);
    }
    nodes.insert(root.id.clone(), root);
    let tm = TaskModel {
        root: id("Root"),
        nodes,
    };
    let mut cg = CausalityGraph::default();
    for (i, &lead) in leads.iter().enumerate() {
        let n = id(&format!("X{i}"));
        cg.nodes.insert(
            n.clone(),
            CausalNode::new(n, NodeKind::Event { lead_time: Some(lead) }),
        );
    }
    ModelBundle::new(tm, cg, world_with_counts(counts), false).unwrap()
}

fn world_with_counts(counts: &[usize]) -> WorldModel {
    let classes = (0..SCORING_TASKS).map(|i| id(&format!("C{i}"))).collect();
    let mut instances = BTreeMap::new();
    for (i, &count) in counts.iter().enumerate() {
        for k in 0..count {
            instances.insert(
                id(&format!("C{i}_{k}")),
                Instance {
                    class: id(&format!("C{i}")),
                    properties: ConditionSet::new(),
                },
            );
        }
    }
    WorldModel::new(classes, instances).unwrap()
}

fn evidence() -> impl Strategy<Value = Vec<(u8, u8, usize)>> {
    prop::collection::vec((0u8..3, 0u8..=5, 0usize..4), 1..3)
}

fn outcomes(raw: &[(u8, u8, usize)]) -> Vec<ConsequenceOutcome> {
    raw.iter()
        .enumerate()
        .map(|(k, &(cat, severity, lead))| {
            let node = id(&format!("NC{k}"));
            ConsequenceOutcome {
                node: node.clone(),
                category: Category::ALL[cat as usize],
                severity,
                via: vec![id(&format!("X{lead}")), node],
            }
        })
        .collect()
}

type CandidateSpec = ((usize, usize), bool, Vec<(u8, u8, usize)>, Vec<(u8, u8, usize)>);

fn candidates() -> impl Strategy<Value = Vec<CandidateSpec>> {
    prop::collection::vec(
        ((0..SCORING_TASKS, 0..SCORING_TASKS), any::<bool>(), evidence(), evidence()),
        1..8,
    )
}

/// Distinct keys only; self-pairs are skipped.
fn build_candidates(specs: &[CandidateSpec]) -> Vec<DilemmaCandidate> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for ((a, b), prohibition, ea, eb) in specs {
        if a == b {
            continue;
        }
        let kind = if *prohibition {
            DilemmaType::Prohibition
        } else {
            DilemmaType::Obligation
        };
        let c = DilemmaCandidate::new(
            kind,
            id(&format!("K{a}")),
            outcomes(ea),
            id(&format!("K{b}")),
            outcomes(eb),
            Vec::new(),
        );
        if seen.insert((c.kind, c.task_a.clone(), c.task_b.clone())) {
            out.push(c);
        }
    }
    out
}

fn instruction() -> impl Strategy<Value = PedagogicalInstruction> {
    (
        0u8..=5,
        0u8..=5,
        0u8..=5,
        prop::sample::subsequence(Category::ALL.to_vec(), 0..=2),
        0.01f64..=1.0,
        0.01f64..=1.0,
    )
        .prop_map(|(x, y, gap, cats, wp, ws)| PedagogicalInstruction {
            gravity_min: x.min(y),
            gravity_max: x.max(y),
            gravity_gap_target: gap,
            required_categories: cats.into_iter().collect(),
            weight_pedagogical: wp,
            weight_scenaristic: ws,
            ..PedagogicalInstruction::default()
        })
}

fn counts() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0usize..4, SCORING_TASKS)
}

fn leads() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..600.0, 4)
}

fn keys(cands: &[DilemmaCandidate]) -> Vec<(DilemmaType, Ident, Ident)> {
    cands
        .iter()
        .map(|c| (c.kind, c.task_a.clone(), c.task_b.clone()))
        .collect()
}

pub fn fits_are_bounded(cases: u32) -> Outcome {
    let strategy = (candidates(), instruction(), counts(), leads());
    check(cases, strategy, |(specs, instr, counts, leads)| {
        let bundle = scoring_bundle(&counts, &leads);
        let config = ScoringConfig::default();
        for c in build_candidates(&specs) {
            let (p, _) = pedagogical_fit(&c, &instr, &config);
            let (s, _, _) = scenario_fit(&c, &bundle.task_model, &bundle.world, &bundle.causality, &config)
                .unwrap();
            prop_assert!((0.0..=1.0).contains(&p), "pedagogical fit {}", p);
            prop_assert!((0.0..=1.0).contains(&s), "scenario fit {}", s);
        }
        for c in rank(build_candidates(&specs), &instr, &bundle, &config).unwrap() {
            let total = c.score.unwrap().total;
            prop_assert!((0.0..=1.0).contains(&total), "total {}", total);
        }
        Ok(())
    })
}

pub fn rank_is_permutation(cases: u32) -> Outcome {
    check(cases, (candidates(), instruction(), counts()), |(specs, instr, counts)| {
        let bundle = scoring_bundle(&counts, &[0.0; 4]);
        let cands = build_candidates(&specs);
        let ranked = rank(cands.clone(), &instr, &bundle, &ScoringConfig::default()).unwrap();
        let mut before = keys(&cands);
        let mut after = keys(&ranked);
        before.sort();
        after.sort();
        prop_assert_eq!(before, after);
        Ok(())
    })
}

pub fn argmax_invariant_under_weight_scaling(cases: u32) -> Outcome {
    let strategy = (candidates(), instruction(), counts(), leads(), 0.001f64..1000.0);
    check(cases, strategy, |(specs, instr, counts, leads, k)| {
        let bundle = scoring_bundle(&counts, &leads);
        let config = ScoringConfig::default();
        let cands = build_candidates(&specs);
        let base = rank(cands.clone(), &instr, &bundle, &config).unwrap();
        let scaled_instr = PedagogicalInstruction {
            weight_pedagogical: instr.weight_pedagogical * k,
            weight_scenaristic: instr.weight_scenaristic * k,
            ..instr.clone()
        };
        let scaled = rank(cands, &scaled_instr, &bundle, &config).unwrap();
        prop_assert_eq!(keys(&base), keys(&scaled), "scale {}", k);
        Ok(())
    })
}

pub fn availability_monotone(cases: u32) -> Outcome {
    let strategy = (candidates(), instruction(), counts(), leads(), 1usize..4);
    check(cases, strategy, |(specs, instr, counts, leads, extra)| {
        let config = ScoringConfig::default();
        let cands = build_candidates(&specs);
        for target in &cands {
            // a task that belongs to this candidate and no other
            let owned = [&target.task_a, &target.task_b].into_iter().find(|t| {
                cands
                    .iter()
                    .filter(|c| c.task_a == **t || c.task_b == **t)
                    .count()
                    == 1
            });
            let Some(task) = owned else { continue };
            let class: usize = task.as_str()[1..].parse().unwrap();
            let before = scoring_bundle(&counts, &leads);
            let mut more = counts.clone();
            more[class] += extra;
            let after = scoring_bundle(&more, &leads);
            let pos = |bundle: &ModelBundle| {
                rank(cands.clone(), &instr, bundle, &config)
                    .unwrap()
                    .iter()
                    .position(|c| c.key() == target.key())
                    .unwrap()
            };
            let (p0, p1) = (pos(&before), pos(&after));
            prop_assert!(p1 <= p0, "{:?} fell from {} to {}", target.key(), p0, p1);
        }
        Ok(())
    })
}

pub fn goal_state_conflict_free(cases: u32) -> Outcome {
    check(cases, any::<u64>(), |seed| {
        let b = bundle_from_seed(seed);
        let tm = &b.task_model;
        let ids: Vec<&Ident> = tm.nodes.keys().collect();
        for (i, a) in ids.iter().enumerate() {
            for bb in &ids[i + 1..] {
                let c = DilemmaCandidate::new(
                    DilemmaType::Obligation,
                    (*a).clone(),
                    Vec::new(),
                    (*bb).clone(),
                    Vec::new(),
                    Vec::new(),
                );
                if !contextually_compatible(tm, &c).unwrap() {
                    continue;
                }
                let goal = extract_goal_state(&c, tm).map_err(|e| fail(e.to_string()))?;
                prop_assert!(!condition_set_conflict(&goal.conditions, &goal.conditions));
            }
        }
        Ok(())
    })
}

// ----------------------------------------------------------------- verifier

pub fn verifier_symmetric_and_replayable(cases: u32) -> Outcome {
    check(cases, any::<u64>(), |seed| {
        let b = bundle_from_seed(seed);
        let v = Verifier::new(&b).unwrap();
        let tasks: Vec<&str> = b.causality.referenced_tasks().iter().map(|t| t.as_str()).collect();
        for (i, &x) in tasks.iter().enumerate() {
            for &y in &tasks[i + 1..] {
                for kind in [DilemmaType::Obligation, DilemmaType::Prohibition] {
                    let fwd = v.verify(kind, x, y).map_err(|e| fail(e.to_string()))?;
                    let bwd = v.verify(kind, y, x).map_err(|e| fail(e.to_string()))?;
                    prop_assert_eq!(fwd.holds, bwd.holds, "{:?} {} {}", kind, x, y);
                    if fwd.holds {
                        replay(&b, &fwd.checks)?;
                    }
                }
            }
        }
        Ok(())
    })
}

/// Every causal witness, replayed through propagation, triggers the
/// consequence it claims.
pub fn replay(b: &ModelBundle, checks: &[dilemma_core::Check]) -> Result<(), TestCaseError> {
    for check in checks {
        prop_assert!(check.witness.is_some(), "check {} passed without witness", check.name);
        if let Some(Witness::Causal { scenario, outcome }) = &check.witness {
            let triggered = propagate(b, scenario).unwrap();
            prop_assert!(
                triggered.iter().any(|o| o.node == outcome.node),
                "witness of {} does not trigger {}",
                check.name,
                outcome.node
            );
        }
    }
    Ok(())
}

// ---------------------------------------------------------- oracle agreement

#[derive(Debug, Default)]
pub struct AgreementStats {
    pub models: usize,
    pub obligations: usize,
    pub prohibitions: usize,
    /// Path-selected pairs that propagation turned down.
    pub rejected_by_propagation: usize,
}

/// Generator pre-ranking output against exhaustive enumeration, plus a
/// propagation re-check of every emitted candidate. Seeds are consecutive
/// from `first_seed`.
pub fn oracle_agreement(first_seed: u64, models: usize) -> Result<AgreementStats, String> {
    let mut stats = AgreementStats::default();
    for seed in first_seed..first_seed + models as u64 {
        let b = bundle_from_seed(seed);
        let trace = run_pipeline(&b, &PedagogicalInstruction::default(), &ScoringConfig::default())
            .map_err(|e| format!("seed {seed}: {e}"))?;
        stats.rejected_by_propagation += trace
            .diagnostics
            .iter()
            .filter(|d| d.reason.starts_with("rejected by propagation"))
            .count();
        let produced = trace.filtered;
        let oracle = enumerate_dilemmas(&b).map_err(|e| format!("seed {seed}: {e}"))?;
        let (mut p, mut o) = (keys(&produced), keys(&oracle));
        p.sort();
        o.sort();
        if p != o {
            return Err(format!("seed {seed}: generator {p:?} vs oracle {o:?}"));
        }
        soundness(&b, &produced).map_err(|e| format!("seed {seed}: {e}"))?;
        stats.models += 1;
        for c in &produced {
            match c.kind {
                DilemmaType::Obligation => stats.obligations += 1,
                DilemmaType::Prohibition => stats.prohibitions += 1,
            }
        }
    }
    Ok(stats)
}

/// Re-verifies each candidate and replays its witnesses.
pub fn soundness(b: &ModelBundle, cands: &[DilemmaCandidate]) -> Result<(), String> {
    let v = Verifier::new(b).map_err(|e| e.to_string())?;
    for c in cands {
        let report = v
            .verify(c.kind, c.task_a.as_str(), c.task_b.as_str())
            .map_err(|e| e.to_string())?;
        if !report.holds {
            return Err(format!("{:?} fails verification: {:?}", c.key(), report.checks));
        }
        // two causal checks plus exclusivity or non-choice
        if report.checks.len() != 3 {
            return Err(format!("{:?}: {} checks", c.key(), report.checks.len()));
        }
        replay(b, &report.checks).map_err(|e| e.to_string())?;
    }
    Ok(())
}
