//! `ggd`: validate property graphs against GGDs and reason about GGD sets.

mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use ggd_core::chase::{extract_model, init_chase, run_chase, ChaseConfig, ChaseVerdict, FireMode, DEFAULT_CAP};
use ggd_core::gen::{generate_suite, threshold_ggd, threshold_graph, write_generated, GenSpec};
use ggd_core::graph::{dump_graph, load_graph, PropertyGraph};
use ggd_core::lang::{parse_ggds, GgdSet};
use ggd_core::matcher::{plan_pattern, PlanOptions};
use ggd_core::reasoner::{check_implication, check_satisfiability, is_weakly_acyclic, ImplVerdict, SatVerdict};
use ggd_core::validator::{validate_set, PlanKind};

use output::{Verdict, WitnessGraph};

#[derive(Parser, Debug)]
#[command(
    name = "ggd",
    version,
    about = "Graph generating dependencies: validation, chase and reasoning"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Report the source matches of each GGD that lack a satisfying target.
    Validate(ValidateArgs),
    /// Decide whether a GGD set admits a graph matching every source.
    Sat(ReasonArgs),
    /// Decide whether the GGDs before the last one imply the last one.
    Implies(ReasonArgs),
    /// Check weak acyclicity of the dependency graph.
    Wacyclic(WacyclicArgs),
    /// Chase a data graph: generate missing targets and write the result.
    Chase(ChaseArgs),
    /// Write a synthetic graph with its GGD suite and ground truth.
    Gen(GenArgs),
    /// Print the matching plans chosen for each GGD on a graph.
    Explain(ExplainArgs),
}

#[derive(Args, Debug)]
struct Common {
    /// File with GGD definitions.
    #[arg(long)]
    ggds: PathBuf,
    /// Write the document here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Include wall times (`ms`) in the output.
    #[arg(long)]
    timings: bool,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    #[command(flatten)]
    common: Common,
    /// Directory with `vertices.csv` and `edges.csv`.
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value = "anti")]
    plan: PlanKind,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Print matching plans to standard error.
    #[arg(long)]
    explain: bool,
}

#[derive(Args, Debug)]
struct ReasonArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: usize,
    /// Print the chase log to standard error.
    #[arg(long)]
    explain: bool,
}

#[derive(Args, Debug)]
struct WacyclicArgs {
    #[command(flatten)]
    common: Common,
    /// Print the dependency graph in DOT format to standard error.
    #[arg(long)]
    explain: bool,
}

#[derive(Args, Debug)]
struct ChaseArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: usize,
    /// Directory for the chased graph.
    #[arg(long)]
    result: Option<PathBuf>,
    #[arg(long)]
    explain: bool,
}

#[derive(Args, Debug)]
struct GenArgs {
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    /// Violation rate applied to every GGD of the suite.
    #[arg(long, default_value_t = 0.01)]
    rate: f64,
    /// `suite` or `threshold` (name families for edit-distance sweeps).
    #[arg(long, default_value = "suite")]
    workload: String,
    /// Vertex count of the threshold workload.
    #[arg(long, default_value_t = 10_000)]
    vertices: usize,
}

#[derive(Args, Debug)]
struct ExplainArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    ggds: PathBuf,
}

fn read_ggds(path: &Path) -> Result<GgdSet> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_ggds(&text).with_context(|| format!("parsing {}", path.display()))
}

fn read_graph(dir: &Path) -> Result<PropertyGraph> {
    load_graph(dir).with_context(|| format!("loading graph from {}", dir.display()))
}

fn emit(common: &Common, text: &str) -> Result<()> {
    match &common.out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn plans(g: &PropertyGraph, sigma: &GgdSet) -> String {
    let mut out = String::new();
    for ggd in sigma {
        let target_vars = ggd.target.variables();
        let mut bound = ggd.shared_vars();
        for c in &ggd.target_constraints {
            for v in c.vars() {
                if !target_vars.contains(&v) && !bound.iter().any(|b| b == v) {
                    bound.push(v.to_string());
                }
            }
        }
        for (side, p, phi, fixed) in [
            ("source", &ggd.source, &ggd.source_constraints, &[][..]),
            ("target", &ggd.target, &ggd.target_constraints, &bound[..]),
        ] {
            let plan = plan_pattern(g, p, phi, fixed, PlanOptions::default());
            out.push_str(&format!("{} {side}:\n{}\n", ggd.name, plan.explain()));
        }
    }
    out
}

fn validate(a: ValidateArgs) -> Result<u8> {
    let sigma = read_ggds(&a.common.ggds)?;
    let g = read_graph(&a.graph)?;
    if a.explain {
        eprint!("{}", plans(&g, &sigma));
    }
    let mut reports = validate_set(&g, &sigma, a.plan, a.workers);
    if !a.common.timings {
        for r in &mut reports {
            r.ms = None;
        }
    }
    emit(&a.common, &(serde_json::to_string_pretty(&reports)? + "\n"))?;
    Ok(if reports.iter().all(|r| r.is_valid()) { 0 } else { 1 })
}

fn sat(a: ReasonArgs) -> Result<u8> {
    let sigma = read_ggds(&a.common.ggds)?;
    let r = check_satisfiability(&sigma, a.cap);
    let (name, code) = match r.verdict {
        SatVerdict::Satisfiable => ("Satisfiable", 0),
        SatVerdict::Unsatisfiable => ("Unsatisfiable", 1),
        SatVerdict::Unknown => ("Unknown", 3),
    };
    let doc = Verdict {
        problem: "sat",
        verdict: name.into(),
        witness: r.witness.as_ref().map(|g| WitnessGraph::of(g).into_value()),
        reason: r.reason.clone(),
        steps: r.steps,
        ms: a.common.timings.then_some(r.ms),
    };
    emit(&a.common, &doc.render()?)?;
    Ok(code)
}

fn implies(a: ReasonArgs) -> Result<u8> {
    let mut ggds = read_ggds(&a.common.ggds)?.ggds;
    let Some(target) = ggds.pop() else {
        bail!("{} defines no GGD to test", a.common.ggds.display());
    };
    let sigma = GgdSet::new(ggds).map_err(anyhow::Error::msg)?;
    let r = check_implication(&sigma, &target, a.cap);
    let (name, code) = match r.verdict {
        ImplVerdict::Implied => ("Implied", 0),
        ImplVerdict::NotImplied => ("NotImplied", 1),
        ImplVerdict::Unknown => ("Unknown", 3),
    };
    let doc = Verdict {
        problem: "implies",
        verdict: name.into(),
        witness: None,
        reason: r.reason.clone(),
        steps: r.steps,
        ms: a.common.timings.then_some(r.ms),
    };
    emit(&a.common, &doc.render()?)?;
    Ok(code)
}

fn wacyclic(a: WacyclicArgs) -> Result<u8> {
    let start = std::time::Instant::now();
    let sigma = read_ggds(&a.common.ggds)?;
    let (ok, dg) = is_weakly_acyclic(&sigma);
    if a.explain {
        eprint!("{}", dg.to_dot());
    }
    let cycles: Vec<String> = dg
        .cyclic_special_edges()
        .iter()
        .map(|(s, t)| format!("{s} -> {t}"))
        .collect();
    let doc = Verdict {
        problem: "wacyclic",
        verdict: if ok { "WeaklyAcyclic" } else { "NotWeaklyAcyclic" }.into(),
        witness: (!ok).then(|| serde_json::json!(cycles)),
        reason: None,
        steps: 0,
        ms: a.common.timings.then(|| start.elapsed().as_secs_f64() * 1000.0),
    };
    emit(&a.common, &doc.render()?)?;
    Ok(if ok { 0 } else { 1 })
}

fn chase(a: ChaseArgs) -> Result<u8> {
    let start = std::time::Instant::now();
    let sigma = read_ggds(&a.common.ggds)?;
    let g = read_graph(&a.graph)?;
    let out = run_chase(
        init_chase(g),
        &sigma,
        ChaseConfig {
            cap: a.cap,
            mode: FireMode::Compatible,
        },
    );
    if a.explain {
        for r in out.state.log() {
            eprintln!("{r}");
        }
    }
    let (name, mut code, mut reason) = match &out.verdict {
        ChaseVerdict::TerminatedValid => ("TerminatedValid", 0, None),
        ChaseVerdict::Inconsistent { step, reason } => ("Inconsistent", 1, Some(format!("step {step}: {reason}"))),
        ChaseVerdict::StepCapExceeded => ("StepCapExceeded", 3, Some(format!("more than {} steps", a.cap))),
    };
    if let (Some(dir), ChaseVerdict::TerminatedValid) = (&a.result, &out.verdict) {
        match extract_model(&out.state) {
            Ok(model) => {
                std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
                dump_graph(&model, dir).with_context(|| format!("writing graph to {}", dir.display()))?;
            }
            Err(e) => {
                code = 3;
                reason = Some(format!("no concrete values: {e}"));
            }
        }
    }
    let doc = Verdict {
        problem: "chase",
        verdict: name.into(),
        witness: None,
        reason,
        steps: out.state.steps(),
        ms: a.common.timings.then(|| start.elapsed().as_secs_f64() * 1000.0),
    };
    emit(&a.common, &doc.render()?)?;
    Ok(code)
}

fn gen(a: GenArgs) -> Result<u8> {
    std::fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    match a.workload.as_str() {
        "suite" => {
            let generated = generate_suite(&GenSpec::with_rate(a.rate), a.seed, a.scale).map_err(anyhow::Error::msg)?;
            write_generated(&generated, &a.out)?;
        }
        "threshold" => {
            let g = threshold_graph(a.vertices, a.seed);
            dump_graph(&g, &a.out)?;
            let sweep: String = [0, 2, 4, 6, 8, 10]
                .iter()
                .map(|&t| threshold_ggd(t).replace("similar_names", &format!("similar_names_t{t}")))
                .collect::<Vec<_>>()
                .join("\n");
            std::fs::write(a.out.join("sweep.ggd"), sweep)?;
        }
        other => bail!("unknown workload `{other}` (expected suite or threshold)"),
    }
    Ok(0)
}

fn explain(a: ExplainArgs) -> Result<u8> {
    let sigma = read_ggds(&a.ggds)?;
    let g = read_graph(&a.graph)?;
    print!("{}", plans(&g, &sigma));
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Validate(a) => validate(a),
        Command::Sat(a) => sat(a),
        Command::Implies(a) => implies(a),
        Command::Wacyclic(a) => wacyclic(a),
        Command::Chase(a) => chase(a),
        Command::Gen(a) => gen(a),
        Command::Explain(a) => explain(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
