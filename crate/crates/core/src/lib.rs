//! Discovers obligation and prohibition dilemmas in declarative knowledge
//! models (task tree, causality graph, world), ranks them against a
//! pedagogical instruction and emits the goal world state that stages the
//! chosen one.
//!
//! ```
//! use dilemma_core::{fixtures, generate, PedagogicalInstruction};
//!
//! let bundle = fixtures::driving();
//! let ranked = generate(&bundle, &PedagogicalInstruction::default()).unwrap();
//! assert_eq!(ranked[0].task_a.as_str(), "Handle_aquaplaning");
//! assert_eq!(ranked[0].task_b.as_str(), "Handle_red_light");
//! ```

pub mod cli;
pub mod error;
pub mod fixtures;
pub mod generator;
pub mod knowledge;
pub mod model_io;
pub mod reasoner;
pub mod scoring;
pub mod verifier;

pub use error::{Error, Result};
pub use generator::{
    contextually_compatible, contradictory_pairs, generate, group_by_task, prohibition_pairs,
    run_pipeline, temporally_compatible, unranked_candidates, DilemmaCandidate, DilemmaType,
    Diagnostic, PipelineTrace, TaskEvidence,
};
pub use knowledge::*;
pub use model_io::{
    export_dot, load_bundle, parse_causality_graph, parse_result, parse_task_model,
    parse_world_model, serialize_causality_graph, serialize_task_model, serialize_world_model,
    write_result, ResultDocument,
};
pub use reasoner::{
    common_and_descendant, common_and_gates, negative_actions, negative_barriers, propagate,
    unguarded_consequences, ActivationScenario, ConsequenceOutcome, FiringState, GraphIndex,
    Propagator,
};
pub use scoring::{
    extract_goal_state, pedagogical_fit, rank, scenario_fit, DilemmaFilter, GoalState,
    PedagogicalInstruction, ScoreBreakdown, ScoringConfig,
};
pub use verifier::{
    enumerate_dilemmas, verify_obligation, verify_prohibition, Check, VerificationReport,
    Verifier, Witness, MAX_SCENARIO_DIMENSIONS,
};
