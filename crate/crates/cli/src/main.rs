//! `fuzzpool`: fuzzy graph analysis, vertex pooling, theorem audits and
//! neuron-pooling experiments.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or graph error, 3 the audit
//! found violations.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{ArgGroup, Parser, Subcommand};

use fuzzpool::audit::{run_suite, Suite};
use fuzzpool::experiment::{emit_report, load_report, render_figures, run_experiment, DatasetSpec, Mode, RunConfig};
use fuzzpool::graph::{parse_graph, serialize_graph, FuzzyGraph};
use fuzzpool::nn::{MergeStrategy, TrainConfig};
use fuzzpool::pooling::{pool_block, pool_cfg, pool_cycle, pool_pair, PoolResult};

#[derive(Parser)]
#[command(name = "fuzzpool", version, about = "Fuzzy graph pooling toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Edge classes, bridges, cutvertices, degrees and structural predicates.
    Analyze {
        #[arg(long)]
        graph: PathBuf,
    },
    /// Pool a pair, cycle, block or complete subgraph into one vertex.
    #[command(group(ArgGroup::new("target").required(true).args(["pair", "cycle", "block", "cfg"])))]
    Pool {
        #[arg(long)]
        graph: PathBuf,
        /// Two vertices, `p,q`.
        #[arg(long, value_delimiter = ',')]
        pair: Option<Vec<String>>,
        /// Cycle in order, `a,b,c,...`.
        #[arg(long, value_delimiter = ',')]
        cycle: Option<Vec<String>>,
        /// Vertices inducing a fuzzy block.
        #[arg(long, value_delimiter = ',')]
        block: Option<Vec<String>>,
        /// Vertices inducing a complete fuzzy graph.
        #[arg(long, value_delimiter = ',')]
        cfg: Option<Vec<String>>,
        /// Write the pooled graph here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a randomized theorem suite.
    Audit {
        /// Suite name, or `all`.
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 500)]
        cases: usize,
        /// Directory for the text report and counterexample graphs.
        #[arg(long, default_value = "audit-report")]
        out: PathBuf,
    },
    /// Train baseline and/or pooling networks and write a report directory.
    Train {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        dataset: u8,
        #[arg(long, default_value = "both")]
        mode: Mode,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 50_000)]
        epochs: usize,
        #[arg(long, default_value_t = 0.025)]
        lr: f64,
        #[arg(long, default_value_t = 10_000)]
        pool_interval: usize,
        #[arg(long, default_value_t = 0.95)]
        tau: f64,
        #[arg(long, default_value = "min", value_parser = parse_merge)]
        merge: MergeStrategy,
        /// Fraction of points held out for evaluation.
        #[arg(long)]
        holdout: Option<f64>,
        /// Number of points for dataset 2.
        #[arg(long, default_value_t = 1000)]
        points: usize,
        /// Decision grid resolution.
        #[arg(long, default_value_t = 100)]
        grid: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Regenerate the SVG figures of a report directory from its data files.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

fn parse_merge(s: &str) -> Result<MergeStrategy, String> {
    s.parse().map_err(|e: fuzzpool::nn::NnError| e.to_string())
}

/// Bad arguments that clap cannot catch on its own.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(message: impl Into<String>) -> anyhow::Error {
    UsageError(message.into()).into()
}

fn read_graph(path: &Path) -> Result<FuzzyGraph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_graph(&text).with_context(|| format!("parsing {}", path.display()))
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn analyze(path: &Path) -> Result<ExitCode> {
    let g = read_graph(path)?;
    let mut out = String::new();
    let w = &mut out;
    writeln!(w, "vertices: {}", g.vertex_count())?;
    writeln!(w, "edges: {}", g.edge_count())?;
    writeln!(w, "connected: {}", yes_no(g.is_connected()))?;
    writeln!(w, "f-tree: {}", yes_no(g.is_f_tree()))?;
    writeln!(w, "f-block: {}", yes_no(g.is_f_block()))?;
    writeln!(w, "complete fuzzy graph: {}", yes_no(g.is_complete_fuzzy()))?;
    writeln!(w, "edge classes:")?;
    for (p, q, class) in g.edge_classes() {
        let mu = g.mu(p.as_str(), q.as_str()).unwrap_or(0.0);
        writeln!(w, "  {p} {q} {mu} {}", class.as_str())?;
    }
    let bridges: Vec<String> = g.fuzzy_bridges().iter().map(|(p, q)| format!("{p}-{q}")).collect();
    writeln!(w, "fuzzy bridges: {}", bridges.join(" "))?;
    let cuts: Vec<String> = g.fuzzy_cutvertices().iter().map(ToString::to_string).collect();
    writeln!(w, "fuzzy cutvertices: {}", cuts.join(" "))?;
    writeln!(w, "degrees (vertex degree strong_degree):")?;
    for r in g.degree_reports() {
        writeln!(w, "  {} {} {}", r.vertex, r.degree, r.strong_degree)?;
    }
    if let (Some(lo), Some(hi)) = (g.min_degree(), g.max_degree()) {
        writeln!(w, "min degree: {lo}")?;
        writeln!(w, "max degree: {hi}")?;
    }
    print!("{out}");
    Ok(ExitCode::SUCCESS)
}

fn pooled_text(result: &PoolResult) -> String {
    let mut out = String::new();
    for (from, to) in &result.mapping {
        if from != to {
            writeln!(out, "# {from} -> {to}").unwrap();
        }
    }
    out.push_str(&serialize_graph(&result.graph));
    out
}

fn pool(
    path: &Path,
    pair: Option<Vec<String>>,
    cycle: Option<Vec<String>>,
    block: Option<Vec<String>>,
    cfg: Option<Vec<String>>,
    out: Option<PathBuf>,
) -> Result<ExitCode> {
    let g = read_graph(path)?;
    let result = if let Some(pair) = pair {
        let [p, q] = pair.as_slice() else {
            return Err(usage(format!("--pair takes exactly two vertices, got {}", pair.len())));
        };
        pool_pair(&g, p, q)?
    } else if let Some(cycle) = cycle {
        pool_cycle(&g, &cycle)?
    } else if let Some(block) = block {
        pool_block(&g, &block)?
    } else if let Some(cfg) = cfg {
        pool_cfg(&g, &cfg)?
    } else {
        return Err(usage("one of --pair, --cycle, --block or --cfg is required"));
    };
    let text = pooled_text(&result);
    match out {
        Some(path) => {
            fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
            eprintln!("wrote {}", path.display());
        }
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn audit(suite: &str, seed: u64, cases: usize, out: &Path) -> Result<ExitCode> {
    let suites: Vec<Suite> = if suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![suite.parse().map_err(usage)?]
    };
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let mut violations = false;
    for s in suites {
        let report = run_suite(s, seed, cases);
        let text = report.render();
        print!("{text}");
        let report_path = out.join(format!("{s}.txt"));
        fs::write(&report_path, &text).with_context(|| format!("writing {}", report_path.display()))?;
        let files = report
            .write_counterexamples(&out.join("counterexamples"))
            .context("writing counterexamples")?;
        println!("report: {}", report_path.display());
        if !files.is_empty() {
            println!("counterexample files: {}", files.len());
        }
        println!();
        violations |= report.has_violations();
    }
    Ok(if violations { ExitCode::from(3) } else { ExitCode::SUCCESS })
}

#[allow(clippy::too_many_arguments)]
fn train_command(
    dataset: u8,
    mode: Mode,
    seed: u64,
    epochs: usize,
    lr: f64,
    pool_interval: usize,
    tau: f64,
    merge: MergeStrategy,
    holdout: Option<f64>,
    points: usize,
    grid: usize,
    out: &Path,
) -> Result<ExitCode> {
    let train = TrainConfig {
        learning_rate: lr,
        epochs,
        pool_interval,
        tau,
        merge,
        seed,
        ..TrainConfig::default()
    };
    train.validate().map_err(|e| usage(e.to_string()))?;
    if let Some(f) = holdout {
        if !(f > 0.0 && f < 1.0) {
            return Err(usage(format!("--holdout must lie in (0, 1), got {f}")));
        }
    }
    if points == 0 || grid == 0 {
        return Err(usage("--points and --grid must be at least 1"));
    }
    let config = RunConfig {
        dataset: if dataset == 1 {
            DatasetSpec::One
        } else {
            DatasetSpec::Two { seed, n: points }
        },
        mode,
        train,
        holdout,
        grid_resolution: grid,
    };
    let started = Instant::now();
    let report = run_experiment(&config)?;
    let seconds = started.elapsed().as_secs_f64();
    let files = emit_report(&report, out)?;
    for m in &report.models {
        println!(
            "{}: final loss {}, accuracy {}, layer sizes {:?}, pool events {}",
            m.kind,
            m.final_loss,
            m.confusion.accuracy(),
            m.network.layer_sizes(),
            m.events.len()
        );
    }
    println!("wrote {} files to {}", files.len(), out.display());
    println!("wall clock: {seconds:.2} s");
    Ok(ExitCode::SUCCESS)
}

fn report_command(dir: &Path) -> Result<ExitCode> {
    let report = load_report(dir)?;
    for path in render_figures(&report, dir)? {
        println!("wrote {}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Analyze { graph } => analyze(&graph),
        Command::Pool {
            graph,
            pair,
            cycle,
            block,
            cfg,
            out,
        } => pool(&graph, pair, cycle, block, cfg, out),
        Command::Audit { suite, seed, cases, out } => audit(&suite, seed, cases, &out),
        Command::Train {
            dataset,
            mode,
            seed,
            epochs,
            lr,
            pool_interval,
            tau,
            merge,
            holdout,
            points,
            grid,
            out,
        } => train_command(
            dataset,
            mode,
            seed,
            epochs,
            lr,
            pool_interval,
            tau,
            merge,
            holdout,
            points,
            grid,
            &out,
        ),
        Command::Report { input } => report_command(&input),
    }
}

/// The error chain joined with `: `, skipping causes that an outer message
/// already spells out.
fn describe(e: &anyhow::Error) -> String {
    let mut text = String::new();
    for cause in e.chain() {
        let msg = cause.to_string();
        if !text.contains(&msg) {
            if !text.is_empty() {
                text.push_str(": ");
            }
            text.push_str(&msg);
        }
    }
    text
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) if e.is::<UsageError>() => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {}", describe(&e));
            ExitCode::from(2)
        }
    }
}
