//! Command-line front end. Results go to standard output (or `--out`),
//! everything meant for humans goes to standard error.
//!
//! Exit codes: 0 success, 1 invalid model, 2 usage error, 3 nothing
//! generated under `--require-result`.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::Path;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::fixtures;
use crate::generator::{group_by_task, run_pipeline, DilemmaType, PipelineTrace};
use crate::knowledge::{
    validate_causality_graph, validate_graph_structure, validate_task_model, CausalityGraph,
    Category, ModelBundle, TaskModel, ValidationReport, WorldModel,
};
use crate::model_io::{
    decode_causality_graph, decode_task_model, export_dot, parse_causality_graph,
    parse_task_model, parse_world_model, write_result,
};
use crate::reasoner::{negative_actions, negative_barriers, ConsequenceOutcome};
use crate::scoring::{extract_goal_state, DilemmaFilter, PedagogicalInstruction, ScoringConfig};
use crate::verifier::Verifier;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NO_RESULT: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "dilemma",
    version,
    about = "Generate obligation and prohibition dilemmas from knowledge models",
    after_help = "Model arguments take a file path or the name of a built-in fixture \
                  (e.g. driving_tasks, driving_causality, driving_world)."
)]
struct Cli {
    /// More detail on standard error.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check models for structural problems.
    Validate {
        #[command(flatten)]
        models: ModelArgs,
    },
    /// Run the whole pipeline and write the ranked result document.
    Generate {
        #[command(flatten)]
        models: ModelArgs,
        #[command(flatten)]
        instruction: InstructionArgs,
        /// Keep only the first N candidates.
        #[arg(long, value_name = "N")]
        top: Option<usize>,
        /// Accepted for forward compatibility; generation is deterministic.
        #[arg(long)]
        seed: Option<u64>,
        /// Write the result here instead of standard output.
        #[arg(long, value_name = "PATH")]
        out: Option<String>,
        /// Exit with status 3 when no candidate survives.
        #[arg(long)]
        require_result: bool,
    },
    /// Check one task pair against the dilemma conditions.
    Verify {
        #[command(flatten)]
        models: ModelArgs,
        #[arg(long = "type", value_enum, default_value = "obligation")]
        kind: KindArg,
        task1: String,
        task2: String,
    },
    /// Print one intermediate pipeline stage.
    Inspect {
        #[arg(value_enum)]
        stage: Stage,
        #[command(flatten)]
        models: ModelArgs,
        #[command(flatten)]
        instruction: InstructionArgs,
    },
    /// Render the causality graph in Graphviz DOT.
    ExportDot {
        #[arg(long)]
        causality: String,
        #[arg(long, value_name = "PATH")]
        out: Option<String>,
    },
}

#[derive(Debug, Args)]
struct ModelArgs {
    #[arg(long)]
    tasks: Option<String>,
    #[arg(long)]
    causality: Option<String>,
    #[arg(long)]
    world: Option<String>,
    /// Require every condition subject to name a world class or instance.
    #[arg(long)]
    strict: bool,
}

#[derive(Debug, Args)]
struct InstructionArgs {
    #[arg(long = "type", value_enum, default_value = "both")]
    dilemma_type: TypeArg,
    #[arg(long)]
    gmin: Option<u8>,
    #[arg(long)]
    gmax: Option<u8>,
    #[arg(long, default_value_t = 0)]
    gap: u8,
    /// Comma-separated: gravity,violations,points.
    #[arg(long, value_delimiter = ',')]
    categories: Vec<CategoryArg>,
    #[arg(long, default_value_t = 1.0)]
    wp: f64,
    #[arg(long, default_value_t = 1.0)]
    ws: f64,
    /// Preset gravity bounds k-1..=k+1; --gmin/--gmax override.
    #[arg(long, value_name = "0..5")]
    criticality: Option<u8>,
    /// Scoring constants file ({tau_seconds, gravity_scale}).
    #[arg(long, value_name = "PATH")]
    config: Option<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TypeArg {
    Obligation,
    Prohibition,
    Both,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    Obligation,
    Prohibition,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CategoryArg {
    Gravity,
    Violations,
    Points,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Stage {
    Barriers,
    Actions,
    Pairs,
    Filtered,
    Ranked,
}

/// Failure with the exit code it maps to.
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let code = match err {
            Error::Io(_)
            | Error::InvalidInstruction(_)
            | Error::UnknownTask(_)
            | Error::UnknownNode(_)
            | Error::SameTask(_) => EXIT_USAGE,
            _ => EXIT_INVALID,
        };
        Failure {
            code,
            message: err.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// A model argument: an existing file, else a built-in fixture name.
fn read_model(arg: &str) -> CliResult<String> {
    if Path::new(arg).is_file() {
        return std::fs::read_to_string(arg).map_err(|e| usage(format!("cannot read `{arg}`: {e}")));
    }
    fixtures::builtin(arg)
        .map(str::to_string)
        .ok_or_else(|| usage(format!("cannot read `{arg}`: no such file or built-in fixture")))
}

fn required<'a>(value: &'a Option<String>, flag: &str) -> CliResult<&'a str> {
    value
        .as_deref()
        .ok_or_else(|| usage(format!("--{flag} is required for this command")))
}

impl ModelArgs {
    fn causality(&self) -> CliResult<CausalityGraph> {
        Ok(parse_causality_graph(&read_model(required(&self.causality, "causality")?)?)?)
    }

    fn world(&self) -> CliResult<WorldModel> {
        match &self.world {
            Some(arg) => Ok(parse_world_model(&read_model(arg)?)?),
            None => Ok(WorldModel::default()),
        }
    }

    fn bundle(&self) -> CliResult<ModelBundle> {
        let tm = parse_task_model(&read_model(required(&self.tasks, "tasks")?)?)?;
        let cg = self.causality()?;
        Ok(ModelBundle::new(tm, cg, self.world()?, self.strict)?)
    }
}

impl InstructionArgs {
    fn instruction(&self) -> CliResult<PedagogicalInstruction> {
        let mut instr = PedagogicalInstruction {
            dilemma_type: match self.dilemma_type {
                TypeArg::Obligation => DilemmaFilter::Obligation,
                TypeArg::Prohibition => DilemmaFilter::Prohibition,
                TypeArg::Both => DilemmaFilter::Both,
            },
            gravity_gap_target: self.gap,
            required_categories: self
                .categories
                .iter()
                .map(|c| match c {
                    CategoryArg::Gravity => Category::Gravity,
                    CategoryArg::Violations => Category::Violations,
                    CategoryArg::Points => Category::Points,
                })
                .collect(),
            weight_pedagogical: self.wp,
            weight_scenaristic: self.ws,
            ..Default::default()
        };
        if let Some(k) = self.criticality {
            instr = instr.with_criticality(k)?;
        }
        if let Some(g) = self.gmin {
            instr.gravity_min = g;
        }
        if let Some(g) = self.gmax {
            instr.gravity_max = g;
        }
        instr.validate()?;
        Ok(instr)
    }

    fn config(&self) -> CliResult<ScoringConfig> {
        match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| usage(format!("cannot read `{path}`: {e}")))?;
                Ok(ScoringConfig::from_json(&text)?)
            }
            None => Ok(ScoringConfig::default()),
        }
    }
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
    verbose: u8,
}

impl Io<'_> {
    fn note(&mut self, msg: impl std::fmt::Display) {
        let _ = writeln!(self.err, "{msg}");
    }

    fn emit(&mut self, text: &str, dest: Option<&str>) -> CliResult<()> {
        match dest {
            Some(path) => std::fs::write(path, text)
                .map_err(|e| usage(format!("cannot write `{path}`: {e}"))),
            None => self
                .out
                .write_all(text.as_bytes())
                .map_err(|e| usage(format!("cannot write output: {e}"))),
        }
    }
}

/// Runs the CLI on `argv` (program name first) and returns the exit code.
pub fn run_with(argv: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(rendered.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = err.write_all(rendered.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };
    let mut io = Io {
        out,
        err,
        verbose: cli.verbose,
    };
    match dispatch(cli.command, &mut io) {
        Ok(code) => code,
        Err(f) => {
            io.note(format_args!("error: {}", f.message));
            f.code
        }
    }
}

/// Entry point for the binary.
pub fn run(argv: &[String]) -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let mut out = stdout.lock();
    let mut err = stderr.lock();
    let code = run_with(argv, &mut out, &mut err);
    let _ = out.flush();
    code
}

fn dispatch(command: Command, io: &mut Io<'_>) -> CliResult<i32> {
    match command {
        Command::Validate { models } => validate(&models, io),
        Command::Generate {
            models,
            instruction,
            top,
            seed: _,
            out,
            require_result,
        } => {
            let bundle = models.bundle()?;
            let instr = instruction.instruction()?;
            let trace = run_pipeline(&bundle, &instr, &instruction.config()?)?;
            let mut ranked = trace.ranked.clone();
            if let Some(n) = top {
                ranked.truncate(n);
            }
            let goal = ranked
                .first()
                .map(|c| extract_goal_state(c, &bundle.task_model))
                .transpose()?;
            io.emit(&write_result(instr.dilemma_type, &ranked, goal.as_ref()), out.as_deref())?;
            summarize(&trace, &ranked, io);
            if ranked.is_empty() && require_result {
                io.note("no candidate satisfied the instruction");
                return Ok(EXIT_NO_RESULT);
            }
            Ok(EXIT_OK)
        }
        Command::Verify {
            models,
            kind,
            task1,
            task2,
        } => {
            let bundle = models.bundle()?;
            let kind = match kind {
                KindArg::Obligation => DilemmaType::Obligation,
                KindArg::Prohibition => DilemmaType::Prohibition,
            };
            let report = Verifier::new(&bundle)?.verify(kind, &task1, &task2)?;
            let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
            text.push('\n');
            io.emit(&text, None)?;
            io.note(format_args!(
                "{kind} {{{}, {}}}: {}",
                report.pair.0,
                report.pair.1,
                if report.holds { "holds" } else { "does not hold" }
            ));
            Ok(EXIT_OK)
        }
        Command::Inspect {
            stage,
            models,
            instruction,
        } => inspect(stage, &models, &instruction, io),
        Command::ExportDot { causality, out } => {
            let cg = parse_causality_graph(&read_model(&causality)?)?;
            io.emit(&export_dot(&cg), out.as_deref())?;
            Ok(EXIT_OK)
        }
    }
}

fn summarize(trace: &PipelineTrace, ranked: &[crate::generator::DilemmaCandidate], io: &mut Io<'_>) {
    io.note(format_args!(
        "{} obligation pair(s), {} prohibition pair(s), {} after filtering, {} ranked",
        trace.obligation_pairs.len(),
        trace.prohibition_pairs.len(),
        trace.filtered.len(),
        trace.ranked.len()
    ));
    for (i, c) in ranked.iter().enumerate() {
        let s = c.score.as_ref().expect("ranked candidates are scored");
        io.note(format_args!(
            "#{} {c}: total {:.4} (pedagogical {:.4}, scenario {:.4}){}",
            i + 1,
            s.total,
            s.pedagogical_fit,
            s.scenario_fit,
            if s.flagged { " [flagged: zero score]" } else { "" }
        ));
        if io.verbose > 0 {
            for (k, v) in &s.details {
                io.note(format_args!("    {k} = {v:.4}"));
            }
        }
    }
    if io.verbose > 0 || trace.ranked.is_empty() {
        for d in &trace.diagnostics {
            io.note(format_args!(
                "dropped {} {{{}, {}}}: {}",
                d.kind, d.task_a, d.task_b, d.reason
            ));
        }
    }
}

fn print_issues(report: &ValidationReport, io: &mut Io<'_>) {
    for issue in &report.issues {
        io.note(issue);
    }
}

fn validate(models: &ModelArgs, io: &mut Io<'_>) -> CliResult<i32> {
    if models.tasks.is_none() && models.causality.is_none() && models.world.is_none() {
        return Err(usage("validate needs at least one of --tasks, --causality, --world"));
    }
    let mut errors = 0;
    let mut warnings = 0;
    let mut count = |report: &ValidationReport, io: &mut Io<'_>| {
        print_issues(report, io);
        errors += report.errors().count();
        warnings += report.warnings().count();
    };
    let failed = |e: Error, what: &str, io: &mut Io<'_>| -> CliResult<()> {
        if let Error::Io(_) = e {
            return Err(e.into());
        }
        io.note(format_args!("error: {what}: {e}"));
        Ok(())
    };
    let mut parse_errors = 0;

    let tm: Option<TaskModel> = match &models.tasks {
        Some(arg) => match decode_task_model(&read_model(arg)?) {
            Ok(tm) => Some(tm),
            Err(e) => {
                parse_errors += 1;
                failed(e, "tasks", io)?;
                None
            }
        },
        None => None,
    };
    let cg: Option<CausalityGraph> = match &models.causality {
        Some(arg) => match decode_causality_graph(&read_model(arg)?) {
            Ok(cg) => Some(cg),
            Err(e) => {
                parse_errors += 1;
                failed(e, "causality", io)?;
                None
            }
        },
        None => None,
    };
    let world: Option<WorldModel> = match &models.world {
        Some(arg) => match parse_world_model(&read_model(arg)?) {
            Ok(w) => Some(w),
            Err(e) => {
                parse_errors += 1;
                failed(e, "world", io)?;
                None
            }
        },
        None => None,
    };

    if let Some(tm) = &tm {
        count(&validate_task_model(tm), io);
    }
    match (&tm, &cg) {
        (Some(tm), Some(cg)) => count(&validate_causality_graph(cg, tm), io),
        (None, Some(cg)) => count(&validate_graph_structure(cg), io),
        _ => {}
    }
    if let (Some(tm), Some(cg), Some(world)) = (&tm, &cg, &world) {
        if errors == 0 && models.strict {
            if let Err(e) = ModelBundle::new(tm.clone(), cg.clone(), world.clone(), true) {
                io.note(format_args!("error: bundle: {e}"));
                parse_errors += 1;
            }
        }
    }
    let errors = errors + parse_errors;
    io.note(format_args!("{errors} errors, {warnings} warnings"));
    Ok(if errors == 0 { EXIT_OK } else { EXIT_INVALID })
}

fn task_refs(
    cg: &CausalityGraph,
    results: &[(crate::knowledge::NodeId, Vec<ConsequenceOutcome>)],
) -> BTreeSet<String> {
    results
        .iter()
        .filter_map(|(n, _)| cg.nodes.get(n).and_then(|n| n.kind.task_ref()))
        .map(ToString::to_string)
        .collect()
}

fn inspect(
    stage: Stage,
    models: &ModelArgs,
    instruction: &InstructionArgs,
    io: &mut Io<'_>,
) -> CliResult<i32> {
    let mut text = String::new();
    match stage {
        Stage::Barriers | Stage::Actions => {
            let cg = models.causality()?;
            let results = if stage == Stage::Barriers {
                negative_barriers(&cg)
            } else {
                negative_actions(&cg)
            };
            for task in task_refs(&cg, &results) {
                text.push_str(&task);
                text.push('\n');
            }
            if io.verbose > 0 {
                for (node, outcomes) in &results {
                    let reached: Vec<&str> = outcomes.iter().map(|o| o.node.as_str()).collect();
                    io.note(format_args!("{node} -> {}", reached.join(", ")));
                }
            }
        }
        Stage::Pairs | Stage::Filtered | Stage::Ranked => {
            let bundle = models.bundle()?;
            let instr = instruction.instruction()?;
            let trace = run_pipeline(&bundle, &instr, &instruction.config()?)?;
            match stage {
                Stage::Pairs => {
                    for c in trace.obligation_pairs.iter().chain(&trace.prohibition_pairs) {
                        text.push_str(&format!("{} {} {}\n", c.kind, c.task_a, c.task_b));
                    }
                }
                Stage::Filtered => {
                    for c in &trace.filtered {
                        text.push_str(&format!("{} {} {}\n", c.kind, c.task_a, c.task_b));
                    }
                    for d in &trace.diagnostics {
                        io.note(format_args!(
                            "dropped {} {{{}, {}}}: {}",
                            d.kind, d.task_a, d.task_b, d.reason
                        ));
                    }
                }
                _ => {
                    for c in &trace.ranked {
                        let s = c.score.as_ref().expect("ranked candidates are scored");
                        text.push_str(&format!(
                            "{} {} {} {:.6}\n",
                            c.kind, c.task_a, c.task_b, s.total
                        ));
                    }
                }
            }
            if io.verbose > 0 {
                let barrier_tasks = group_by_task(&bundle, &trace.barriers)?;
                io.note(format_args!("{} barrier task(s)", barrier_tasks.len()));
            }
        }
    }
    io.emit(&text, None)?;
    Ok(EXIT_OK)
}
