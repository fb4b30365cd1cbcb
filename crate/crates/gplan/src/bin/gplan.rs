//! Batch command-line frontend. Every subcommand emits a JSON run report
//! (see `schemas/report.schema.json`) and a one-line summary on stdout.
//!
//! Exit codes: 0 success, 1 domain-level failure (e.g. a policy that does
//! not solve), 2 usage or IO error.

use clap::{Args, Parser, Subcommand};
use gplan::bench;
use gplan::graph::{expand, Graph, GraphBundle, Limits};
use gplan::learner::{learn_policy, learn_sketch, LearnConfig, SketchConfig};
use gplan::model::{self, HypothesisSpace, SolverCfg};
use gplan::pddl::{parse_domain, parse_problem, print_domain, print_problem, ParseOutcome};
use gplan::policy::{execute, verify, Policy, TieBreak, VerifyOutcome};
use gplan::report::RunReport;
use gplan::strips::{ground, Domain, GroundTask, Instance};
use gplan::width::{siw_r, width, SiwLimits, Sketch};
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "gplan", version, about = "Generalized planning toolkit")]
struct Cli {
    /// RNG seed; all commands are deterministic given the seed.
    #[arg(long, global = true, env = "GPLAN_SEED", default_value_t = 0)]
    seed: u64,
    /// Worker cap for parallel sections (1 = fully sequential).
    #[arg(long, global = true, env = "GPLAN_THREADS", default_value_t = 1)]
    threads: usize,
    /// Path for the JSON run report.
    #[arg(long, global = true, env = "GPLAN_OUT")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct ProblemArgs {
    /// PDDL domain file.
    #[arg(long)]
    domain: PathBuf,
    /// PDDL problem file.
    #[arg(long)]
    problem: PathBuf,
}

#[derive(Subcommand)]
enum Cmd {
    /// Expand the full reachable state space of a problem.
    Expand {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, default_value_t = 1_000_000)]
        max_states: usize,
        /// Write the labeled graph as JSON.
        #[arg(long)]
        out_graph: Option<PathBuf>,
    },
    /// Solve a problem with SIW_R (plain SIW when no sketch is given).
    SolveSiw {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Sketch file (policy JSON); omitted = goal-only serialization.
        #[arg(long)]
        sketch: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        kmax: usize,
        #[arg(long, default_value_t = 1_000_000)]
        node_budget: usize,
        /// Write the plan, one ground action per line.
        #[arg(long)]
        out_plan: Option<PathBuf>,
    },
    /// Exhaustively verify a policy on a problem.
    VerifyPolicy {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long)]
        policy: PathBuf,
        #[arg(long, default_value_t = 1_000_000)]
        max_states: usize,
    },
    /// Execute a policy greedily from the initial state.
    RunPolicy {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long)]
        policy: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        max_steps: usize,
        /// Break ties randomly (seeded) instead of lexicographically.
        #[arg(long)]
        random_ties: bool,
    },
    /// Measure the width of a problem (least k with IW(k) solving it).
    Width {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, default_value_t = 3)]
        kmax: usize,
        #[arg(long, default_value_t = 1_000_000)]
        node_budget: usize,
    },
    /// Learn a general policy from training problems.
    LearnPolicy {
        /// PDDL domain file.
        #[arg(long)]
        domain: PathBuf,
        /// Training problem files.
        #[arg(long, required = true, num_args = 1..)]
        train: Vec<PathBuf>,
        /// Held-out validation problem files.
        #[arg(long, num_args = 0..)]
        validate: Vec<PathBuf>,
        #[arg(long, default_value_t = 8)]
        max_complexity: u32,
        #[arg(long, default_value_t = 400)]
        max_pool: usize,
        /// Write the learned policy as JSON.
        #[arg(long)]
        out_policy: Option<PathBuf>,
    },
    /// Learn a policy sketch for width-bounded serialization.
    LearnSketch {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long, required = true, num_args = 1..)]
        train: Vec<PathBuf>,
        /// Width bound every segment must respect.
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        max_rules: usize,
        #[arg(long, default_value_t = 4)]
        max_complexity: u32,
        #[arg(long)]
        out_sketch: Option<PathBuf>,
    },
    /// Learn a lifted domain from labeled state-space graphs.
    LearnModel {
        /// Graph bundle JSON ({"graphs": [...]}) or a single graph JSON.
        #[arg(long)]
        graphs: PathBuf,
        /// Schema arity bound applied to every edge label.
        #[arg(long, default_value_t = 3)]
        max_arity: usize,
        #[arg(long, default_value_t = 1)]
        max_predicates: usize,
        #[arg(long, default_value_t = 2)]
        max_pred_arity: usize,
        /// Objects per input graph.
        #[arg(long)]
        objects: usize,
        /// Write the learned domain as PDDL.
        #[arg(long)]
        out_domain: Option<PathBuf>,
    },
    /// Check whether a frozen domain explains a labeled graph.
    ValidateModel {
        /// PDDL domain file.
        #[arg(long)]
        domain: PathBuf,
        /// Labeled graph JSON.
        #[arg(long)]
        graph: PathBuf,
        /// Maximum object count to try (ascending).
        #[arg(long)]
        objects: usize,
    },
    /// Generate a benchmark instance and write it as PDDL.
    GenDomain {
        /// delivery | blocks-clear | hanoi | gripper
        #[arg(long)]
        kind: String,
        /// Grid rows (delivery).
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Grid columns (delivery).
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        packages: usize,
        #[arg(long, default_value_t = 2)]
        blocks: usize,
        #[arg(long, default_value_t = 3)]
        disks: usize,
        #[arg(long, default_value_t = 3)]
        pegs: usize,
        #[arg(long, default_value_t = 2)]
        balls: usize,
        #[arg(long)]
        out_domain: PathBuf,
        #[arg(long)]
        out_problem: PathBuf,
    },
}

/// A domain-level failure: the run completed but the answer is negative.
struct Failure(String);

enum RunError {
    /// Usage or IO problem → exit 2.
    Usage(String),
    /// Domain-level failure → exit 1.
    Domain(String),
}

impl From<Failure> for RunError {
    fn from(f: Failure) -> Self {
        RunError::Domain(f.0)
    }
}

fn usage<E: std::fmt::Display>(e: E) -> RunError {
    RunError::Usage(e.to_string())
}

fn read(path: &PathBuf) -> Result<String, RunError> {
    std::fs::read_to_string(path)
        .map_err(|e| RunError::Usage(format!("{}: {e}", path.display())))
}

fn write(path: &PathBuf, text: &str) -> Result<(), RunError> {
    std::fs::write(path, text).map_err(|e| RunError::Usage(format!("{}: {e}", path.display())))
}

fn checked<T>(outcome: ParseOutcome<T>, path: &PathBuf) -> Result<T, RunError> {
    let errors: Vec<String> = outcome
        .errors()
        .map(|d| d.render(&path.display().to_string()))
        .collect();
    match outcome.value {
        Some(v) if errors.is_empty() => Ok(v),
        _ => Err(RunError::Usage(errors.join("\n"))),
    }
}

fn load_domain(path: &PathBuf) -> Result<Arc<Domain>, RunError> {
    Ok(Arc::new(checked(parse_domain(&read(path)?), path)?))
}

fn load_task(args: &ProblemArgs) -> Result<Arc<GroundTask>, RunError> {
    let domain = load_domain(&args.domain)?;
    let inst = checked(parse_problem(&read(&args.problem)?, domain), &args.problem)?;
    Ok(Arc::new(ground(Arc::new(inst)).map_err(usage)?))
}

fn load_task_for(domain: Arc<Domain>, path: &PathBuf) -> Result<Arc<GroundTask>, RunError> {
    let inst = checked(parse_problem(&read(path)?, domain), path)?;
    Ok(Arc::new(ground(Arc::new(inst)).map_err(usage)?))
}

fn load_policy(path: &PathBuf) -> Result<Policy, RunError> {
    Policy::from_json(&read(path)?).map_err(usage)
}

fn load_bundle(path: &PathBuf) -> Result<GraphBundle, RunError> {
    let text = read(path)?;
    if let Ok(bundle) = serde_json::from_str::<GraphBundle>(&text) {
        return Ok(bundle);
    }
    let graph: Graph = serde_json::from_str(&text).map_err(usage)?;
    Ok(GraphBundle {
        graphs: vec![graph],
    })
}

fn run(cli: &Cli, report: &mut RunReport) -> Result<String, RunError> {
    let t0 = Instant::now();
    let result = dispatch(cli, report);
    report.timing("total", t0.elapsed().as_millis() as u64);
    result
}

fn dispatch(cli: &Cli, report: &mut RunReport) -> Result<String, RunError> {
    match &cli.command {
        Cmd::Expand {
            problem,
            max_states,
            out_graph,
        } => {
            report.input("domain", problem.domain.display());
            report.input("problem", problem.problem.display());
            let task = load_task(problem)?;
            let limits = Limits {
                max_states: *max_states,
                max_time: None,
            };
            let ssg = expand(&task, &limits).map_err(usage)?;
            let graph = ssg.to_graph(&task);
            if let Some(path) = out_graph {
                write(path, &serde_json::to_string_pretty(&graph).map_err(usage)?)?;
                report.artifacts.push(path.display().to_string());
            }
            Ok(format!(
                "states={} edges={} goals={}",
                graph.n,
                graph.edges.len(),
                graph.goals.as_ref().map_or(0, |g| g.len())
            ))
        }
        Cmd::SolveSiw {
            problem,
            sketch,
            kmax,
            node_budget,
            out_plan,
        } => {
            report.input("domain", problem.domain.display());
            report.input("problem", problem.problem.display());
            let task = load_task(problem)?;
            let sketch = match sketch {
                Some(path) => {
                    report.input("sketch", path.display());
                    load_policy(path)?
                }
                None => Sketch {
                    features: vec![],
                    rules: vec![],
                },
            };
            let limits = SiwLimits {
                k_max: *kmax,
                node_budget: *node_budget,
                max_segments: 10_000,
            };
            let res = siw_r(&task, &sketch, &limits)
                .map_err(|e| Failure(format!("siw failed: {e}")))?;
            if let Some(path) = out_plan {
                let lines: Vec<String> =
                    res.plan.iter().map(|&a| task.action_name(a)).collect();
                write(path, &(lines.join("\n") + "\n"))?;
                report.artifacts.push(path.display().to_string());
            }
            let widths: Vec<String> =
                res.segments.iter().map(|s| s.k.to_string()).collect();
            Ok(format!(
                "plan_len={} segments={} widths=[{}]",
                res.plan.len(),
                res.segments.len(),
                widths.join(",")
            ))
        }
        Cmd::VerifyPolicy {
            problem,
            policy,
            max_states,
        } => {
            report.input("domain", problem.domain.display());
            report.input("problem", problem.problem.display());
            report.input("policy", policy.display());
            let task = load_task(problem)?;
            let policy = load_policy(policy)?;
            let limits = Limits {
                max_states: *max_states,
                max_time: None,
            };
            match verify(&policy, &task, &limits).map_err(usage)? {
                VerifyOutcome::Solves => Ok("Solves".to_string()),
                other => Err(Failure(format!("{other:?}")).into()),
            }
        }
        Cmd::RunPolicy {
            problem,
            policy,
            max_steps,
            random_ties,
        } => {
            report.input("domain", problem.domain.display());
            report.input("problem", problem.problem.display());
            report.input("policy", policy.display());
            let task = load_task(problem)?;
            let policy = load_policy(policy)?;
            let ties = if *random_ties {
                TieBreak::Seeded(cli.seed)
            } else {
                TieBreak::Lexicographic
            };
            let traj = execute(&policy, &task, *max_steps, ties).map_err(usage)?;
            let line = format!("{:?} steps={}", traj.outcome, traj.actions.len());
            if traj.outcome == gplan::policy::ExecOutcome::GoalReached {
                Ok(line)
            } else {
                Err(Failure(line).into())
            }
        }
        Cmd::Width {
            problem,
            kmax,
            node_budget,
        } => {
            report.input("domain", problem.domain.display());
            report.input("problem", problem.problem.display());
            report.input("kmax", kmax);
            let task = load_task(problem)?;
            let goal = |s: &gplan::strips::State| task.is_goal(s);
            match width(&task, &task.init, &goal, *kmax, *node_budget) {
                Some((k, plan)) => Ok(format!("width={k} plan_len={}", plan.len())),
                None => Err(Failure(format!("width exceeds kmax={kmax}")).into()),
            }
        }
        Cmd::LearnPolicy {
            domain,
            train,
            validate,
            max_complexity,
            max_pool,
            out_policy,
        } => {
            report.input("domain", domain.display());
            let dom = load_domain(domain)?;
            let mut tasks = Vec::new();
            for p in train {
                report.input("train", p.display());
                tasks.push(load_task_for(dom.clone(), p)?);
            }
            let mut val_tasks = Vec::new();
            for p in validate {
                report.input("validate", p.display());
                val_tasks.push(load_task_for(dom.clone(), p)?);
            }
            let config = LearnConfig {
                max_complexity: *max_complexity,
                max_pool: *max_pool,
                ..LearnConfig::default()
            };
            let (policy, lr) = learn_policy(&tasks, &val_tasks, &config)
                .map_err(|e| Failure(format!("learning failed: {e}")))?;
            if let Some(path) = out_policy {
                write(path, &policy.to_json())?;
                report.artifacts.push(path.display().to_string());
            }
            report.detail = serde_json::to_string(&lr).ok();
            Ok(format!(
                "features={} cost={} validate=[{}]",
                lr.selected.len(),
                lr.total_cost,
                lr.validate_outcomes.join(",")
            ))
        }
        Cmd::LearnSketch {
            domain,
            train,
            k,
            max_rules,
            max_complexity,
            out_sketch,
        } => {
            report.input("domain", domain.display());
            let dom = load_domain(domain)?;
            let mut tasks = Vec::new();
            for p in train {
                report.input("train", p.display());
                tasks.push(load_task_for(dom.clone(), p)?);
            }
            let config = SketchConfig {
                max_complexity: *max_complexity,
                k: *k,
                max_rules: *max_rules,
                ..SketchConfig::default()
            };
            let (sketch, sr) = learn_sketch(&tasks, &config)
                .map_err(|e| Failure(format!("sketch learning failed: {e}")))?;
            if let Some(path) = out_sketch {
                write(path, &sketch.to_json())?;
                report.artifacts.push(path.display().to_string());
            }
            report.detail = serde_json::to_string(&sr).ok();
            Ok(format!(
                "rules={} cost={} candidates={}",
                sketch.rules.len(),
                sr.total_cost,
                sr.candidates_tried
            ))
        }
        Cmd::LearnModel {
            graphs,
            max_arity,
            max_predicates,
            max_pred_arity,
            objects,
            out_domain,
        } => {
            report.input("graphs", graphs.display());
            let bundle = load_bundle(graphs)?;
            let mut schema_arity = BTreeMap::new();
            for g in &bundle.graphs {
                for l in g.labels() {
                    schema_arity.insert(l.to_string(), *max_arity);
                }
            }
            let space = HypothesisSpace {
                max_predicates: *max_predicates,
                max_pred_arity: *max_pred_arity,
                schema_arity,
                objects: *objects,
            };
            let hyp = model::learn_domain(&bundle, &space, &SolverCfg::default())
                .map_err(|e| Failure(format!("model learning failed: {e}")))?;
            if let Some(path) = out_domain {
                write(path, &print_domain(&hyp.domain))?;
                report.artifacts.push(path.display().to_string());
            }
            Ok(format!(
                "cost={} schemas={} predicates={}",
                hyp.cost,
                hyp.domain.schemas.len(),
                hyp.domain.predicates.len()
            ))
        }
        Cmd::ValidateModel {
            domain,
            graph,
            objects,
        } => {
            report.input("domain", domain.display());
            report.input("graph", graph.display());
            let dom = load_domain(domain)?;
            let bundle = load_bundle(graph)?;
            let g = &bundle.graphs[0];
            let mut schema_arity = BTreeMap::new();
            for s in &dom.schemas {
                schema_arity.insert(s.name.clone(), s.params.len());
            }
            let space = HypothesisSpace {
                max_predicates: 0,
                max_pred_arity: 0,
                schema_arity,
                objects: *objects,
            };
            match model::validate_domain(&dom, g, &space, &SolverCfg::default())
                .map_err(|e| Failure(format!("validation error: {e}")))?
            {
                Some(w) => Ok(format!("valid objects={}", w.objects.len())),
                None => Err(Failure("no instance explains the graph".to_string()).into()),
            }
        }
        Cmd::GenDomain {
            kind,
            n,
            m,
            packages,
            blocks,
            disks,
            pegs,
            balls,
            out_domain,
            out_problem,
        } => {
            report.input("kind", kind);
            let inst: Instance = match kind.as_str() {
                "delivery" => bench::make_delivery(*n, *m, *packages, cli.seed).map_err(usage)?,
                "blocks-clear" => bench::make_blocks_clear(*blocks, cli.seed).map_err(usage)?,
                "hanoi" => bench::make_hanoi(*disks, *pegs).map_err(usage)?,
                "gripper" => bench::make_gripper(*balls).map_err(usage)?,
                other => return Err(RunError::Usage(format!("unknown domain kind `{other}`"))),
            };
            write(out_domain, &print_domain(&inst.domain))?;
            write(out_problem, &print_problem(&inst))?;
            report.artifacts.push(out_domain.display().to_string());
            report.artifacts.push(out_problem.display().to_string());
            Ok(format!(
                "objects={} init_atoms={}",
                inst.objects.len(),
                inst.init.len()
            ))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = match &cli.command {
        Cmd::Expand { .. } => "expand",
        Cmd::SolveSiw { .. } => "solve-siw",
        Cmd::VerifyPolicy { .. } => "verify-policy",
        Cmd::RunPolicy { .. } => "run-policy",
        Cmd::Width { .. } => "width",
        Cmd::LearnPolicy { .. } => "learn-policy",
        Cmd::LearnSketch { .. } => "learn-sketch",
        Cmd::LearnModel { .. } => "learn-model",
        Cmd::ValidateModel { .. } => "validate-model",
        Cmd::GenDomain { .. } => "gen-domain",
    };
    let mut report = RunReport::new(name, cli.seed);
    let (code, outcome) = match run(&cli, &mut report) {
        Ok(summary) => {
            println!("{name}: {summary}");
            (ExitCode::SUCCESS, summary)
        }
        Err(RunError::Domain(msg)) => {
            eprintln!("{name}: {msg}");
            (ExitCode::from(1), msg)
        }
        Err(RunError::Usage(msg)) => {
            eprintln!("{name}: error: {msg}");
            (ExitCode::from(2), format!("error: {msg}"))
        }
    };
    report.outcome = outcome;
    if let Some(path) = &cli.out {
        if let Err(e) = report.write(path) {
            eprintln!("{name}: error writing report: {e}");
            return ExitCode::from(2);
        }
    }
    code
}
