//! Command-line front end for `thue-tree`.

pub mod experiment;
pub mod io;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use thiserror::Error;
use thue_tree::entropy::{counting_report, decode_verified, LogError, RunLog};
use thue_tree::oracle::{exhaustive_choosable, thue_ternary, verify_coloring, PathMode, Violation};
use thue_tree::power::PowerSpec;
use thue_tree::solver::{solve, Mode, SolveOutcome, SolverConfig};
use thue_tree::tree::{Color, ListAssignment, RootedTree, TreeModel};

use crate::experiment::{run_experiment, ExperimentSpec};
use crate::io::{field_or_self, load_lists, load_tree, parse_epsilon, parse_json, read_text, write_text, ConfigFile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_BUDGET: i32 = 2;
pub const EXIT_MALFORMED_LOG: i32 = 3;
pub const EXIT_VIOLATIONS: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("malformed log: {0}")]
    MalformedLog(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::MalformedLog(_) => EXIT_MALFORMED_LOG,
        }
    }
}

/// What a command printed and how it wants the process to exit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { code: EXIT_OK, stdout }
    }
}

#[derive(Debug, Parser)]
#[command(name = "thue-tree", version, about = "Nonrepetitive list colorings of trees")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Color a tree from lists.
    Solve(SolveArgs),
    /// Check a coloring for forbidden blocks.
    Verify(VerifyArgs),
    /// Recover the seed behind a run log.
    Decode(DecodeArgs),
    /// Sweep list sizes and write a CSV summary.
    Experiment(ExperimentArgs),
    /// Reference computations.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Write a generated tree as JSON or DOT.
    Generate(GenerateArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Vertical,
    Full,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Vertical => Mode::Vertical,
            ModeArg::Full => Mode::Full,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ConfigArgs {
    /// JSON file with `mode`, `epsilon`, `budget` and `seed`; flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Exact fraction `p/q`.
    #[arg(long)]
    pub epsilon: Option<String>,
}

impl ConfigArgs {
    fn settings(&self, budget: Option<u64>, seed: Option<u64>) -> Result<ConfigFile, CliError> {
        Ok(ConfigFile::load(self.config.as_deref())?.merge(ConfigFile {
            mode: self.mode.map(Mode::from),
            epsilon: self.epsilon.clone(),
            budget,
            seed,
        }))
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub tree: PathBuf,
    /// JSON array of lists indexed by vertex label.
    #[arg(long, conflicts_with = "random_lists")]
    pub lists: Option<PathBuf>,
    /// Draw lists of SIZE colors out of PALETTE.
    #[arg(long, num_args = 2, value_names = ["SIZE", "PALETTE"])]
    pub random_lists: Option<Vec<usize>>,
    #[command(flatten)]
    pub config: ConfigArgs,
    #[arg(long)]
    pub budget: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write the result here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the run log on its own.
    #[arg(long)]
    pub log_out: Option<PathBuf>,
    /// Also write the lists used, by vertex label.
    #[arg(long)]
    pub lists_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub tree: PathBuf,
    /// Colors by vertex label, or a solve result.
    #[arg(long)]
    pub coloring: PathBuf,
    /// Also check that each color comes from its list.
    #[arg(long)]
    pub lists: Option<PathBuf>,
    #[command(flatten)]
    pub config: ConfigArgs,
}

#[derive(Debug, Args)]
pub struct DecodeArgs {
    /// A run log, or a solve result containing one.
    #[arg(long)]
    pub log: PathBuf,
    #[arg(long)]
    pub tree: PathBuf,
    #[arg(long)]
    pub lists: PathBuf,
    #[command(flatten)]
    pub config: ConfigArgs,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(long)]
    pub spec: PathBuf,
    /// CSV destination; overrides the spec's `output`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum OracleCommand {
    /// Prefix of the square-free ternary word, over `abc`.
    Thue {
        #[arg(long)]
        length: usize,
    },
    /// Backtracking search over all colorings from the lists.
    Exhaustive {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        lists: PathBuf,
        /// Exponent `r` as `p/q`.
        #[arg(long, default_value = "2/1")]
        exponent: String,
        #[arg(long, value_enum, default_value = "vertical")]
        paths: PathsArg,
    },
    /// Bit counts of the seed-counting bound.
    Counting {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        list_size: Option<usize>,
        #[arg(long)]
        max_degree: Option<usize>,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        steps: u64,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PathsArg {
    Vertical,
    All,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Tree model as JSON, e.g. `{"model":"random","n":100,"max_degree":4}`.
    #[arg(long)]
    pub model: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub dot: bool,
}

pub fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Solve(a) => cmd_solve(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Decode(a) => cmd_decode(&a),
        Command::Experiment(a) => cmd_experiment(&a),
        Command::Oracle(o) => cmd_oracle(o),
        Command::Generate(a) => cmd_generate(&a),
    }
}

fn pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn by_label<T: Copy + Default>(tree: &RootedTree, values: &[T]) -> Vec<T> {
    let mut out = vec![T::default(); values.len()];
    for (v, &x) in values.iter().enumerate() {
        out[tree.label(v)] = x;
    }
    out
}

fn to_preorder(tree: &RootedTree, by_label: &[Color]) -> Result<Vec<Color>, CliError> {
    if by_label.len() != tree.len() {
        return Err(CliError::Input(format!(
            "coloring has {} entries for {} vertices",
            by_label.len(),
            tree.len()
        )));
    }
    Ok((0..tree.len()).map(|v| by_label[tree.label(v)]).collect())
}

/// All violations of the mode's target property, with original labels.
fn violations(tree: &RootedTree, coloring: &[Color], config: &SolverConfig) -> Result<Vec<Violation>, CliError> {
    let check = |spec, mode| verify_coloring(tree, coloring, spec, mode).map_err(|e| CliError::Input(e.to_string()));
    let mut all = check(config.vertical_spec(), PathMode::Vertical)?;
    if config.mode == Mode::Full {
        all.extend(check(PowerSpec::square(), PathMode::AllSimplePaths)?);
    }
    Ok(all
        .into_iter()
        .map(|v| Violation {
            from: tree.label(v.from),
            to: tree.label(v.to),
            ..v
        })
        .collect())
}

fn cmd_solve(a: &SolveArgs) -> Result<Outcome, CliError> {
    let tree = load_tree(&a.tree)?;
    let settings = a.config.settings(a.budget, a.seed)?;
    let seed = settings.seed.unwrap_or(0);
    let lists = match (&a.lists, &a.random_lists) {
        (Some(path), _) => load_lists(path, &tree)?,
        (None, Some(sp)) => ListAssignment::random(tree.len(), sp[0], sp[1], seed).map_err(|e| CliError::Input(e.to_string()))?,
        (None, None) => return Err(CliError::Input("give --lists or --random-lists".into())),
    };
    if let Some(path) = &a.lists_out {
        write_text(path, &serde_json::to_string(&lists.by_label(&tree)).expect("serializable"))?;
    }
    let config = settings.solver_config(&tree, lists.list_size())?;
    let outcome = solve(&tree, &lists, &config, seed).map_err(|e| CliError::Input(e.to_string()))?;
    let solution = match outcome {
        SolveOutcome::BudgetExhausted(stats) => {
            let body = pretty(&json!({ "status": "budget_exhausted", "stats": stats }));
            return Ok(Outcome { code: EXIT_BUDGET, stdout: body });
        }
        SolveOutcome::Solved(s) => s,
    };
    let found = violations(&tree, &solution.coloring, &config)?;
    if !found.is_empty() {
        return Err(CliError::Input(format!("solver output has {} violations", found.len())));
    }
    let body = pretty(&json!({
        "status": "solved",
        "config": config,
        "coloring": by_label(&tree, &solution.coloring),
        "seed": solution.seed,
        "stats": solution.stats,
        "log": solution.log,
    }));
    if let Some(path) = &a.log_out {
        write_text(path, &solution.log.to_json())?;
    }
    match &a.out {
        Some(path) => {
            write_text(path, &body)?;
            // the persisted artifact must verify on its own
            let stored: Vec<Color> = field_or_self(&read_text(path)?, "coloring", "result")?;
            if !violations(&tree, &to_preorder(&tree, &stored)?, &config)?.is_empty() {
                return Err(CliError::Input("stored coloring fails verification".into()));
            }
            Ok(Outcome::ok(String::new()))
        }
        None => Ok(Outcome::ok(body)),
    }
}

fn cmd_verify(a: &VerifyArgs) -> Result<Outcome, CliError> {
    let tree = load_tree(&a.tree)?;
    let stored: Vec<Color> = field_or_self(&read_text(&a.coloring)?, "coloring", "coloring")?;
    let coloring = to_preorder(&tree, &stored)?;
    let settings = a.config.settings(None, None)?;
    let config = settings.solver_config(&tree, 1)?;
    let found = violations(&tree, &coloring, &config)?;
    let off_list: Vec<usize> = match &a.lists {
        Some(path) => {
            let lists = load_lists(path, &tree)?;
            (0..tree.len())
                .filter(|&v| lists.index_of(v, coloring[v]).is_none())
                .map(|v| tree.label(v))
                .collect()
        }
        None => Vec::new(),
    };
    let clean = found.is_empty() && off_list.is_empty();
    let body = pretty(&json!({ "clean": clean, "violations": found, "off_list": off_list }));
    Ok(Outcome {
        code: if clean { EXIT_OK } else { EXIT_VIOLATIONS },
        stdout: body,
    })
}

fn cmd_decode(a: &DecodeArgs) -> Result<Outcome, CliError> {
    let tree = load_tree(&a.tree)?;
    let lists = load_lists(&a.lists, &tree)?;
    let text = read_text(&a.log)?;
    let log: RunLog = field_or_self(&text, "log", "log").map_err(|e| CliError::MalformedLog(e.to_string()))?;
    let settings = a.config.settings(None, None)?;
    let config = settings.solver_config(&tree, lists.list_size())?;
    let seed = decode_verified(&log, &tree, &lists, &config).map_err(|e| match e {
        LogError::MalformedLog(m) => CliError::MalformedLog(m),
        other => CliError::Input(other.to_string()),
    })?;
    Ok(Outcome::ok(format!("{}\n", serde_json::to_string(&seed).expect("serializable"))))
}

fn cmd_experiment(a: &ExperimentArgs) -> Result<Outcome, CliError> {
    let spec: ExperimentSpec = parse_json(&read_text(&a.spec)?, "experiment spec")?;
    let csv = run_experiment(&spec)?;
    let target = a.out.clone().or_else(|| spec.output.as_ref().map(PathBuf::from));
    match target {
        Some(path) => {
            write_text(&path, &csv)?;
            Ok(Outcome::ok(String::new()))
        }
        None => Ok(Outcome::ok(csv)),
    }
}

fn cmd_oracle(o: OracleCommand) -> Result<Outcome, CliError> {
    match o {
        OracleCommand::Thue { length } => {
            let word: String = thue_ternary(length).iter().map(|&c| (b'a' + c as u8) as char).collect();
            Ok(Outcome::ok(format!("{word}\n")))
        }
        OracleCommand::Exhaustive { tree, lists, exponent, paths } => {
            let tree = load_tree(&tree)?;
            let lists = load_lists(&lists, &tree)?;
            let spec = PowerSpec::new(parse_epsilon(&exponent)?).map_err(|e| CliError::Input(e.to_string()))?;
            let mode = match paths {
                PathsArg::Vertical => PathMode::Vertical,
                PathsArg::All => PathMode::AllSimplePaths,
            };
            let verdict = exhaustive_choosable(&tree, &lists, spec, mode).map_err(|e| CliError::Input(e.to_string()))?;
            Ok(Outcome::ok(pretty(&json!({
                "colorable": verdict.colorable,
                "witness": verdict.witness.map(|w| by_label(&tree, &w)),
                "nodes_explored": verdict.nodes_explored,
            }))))
        }
        OracleCommand::Counting { config, list_size, max_degree, n, steps } => {
            let settings = config.settings(None, None)?;
            let epsilon = parse_epsilon(settings.epsilon.as_deref().unwrap_or("1/1"))?;
            let base = match settings.mode.unwrap_or(Mode::Vertical) {
                Mode::Vertical => SolverConfig::vertical(epsilon),
                Mode::Full => SolverConfig::full(epsilon, max_degree.unwrap_or(2)),
            }
            .map_err(|e| CliError::Input(e.to_string()))?;
            let solver_config = match list_size {
                Some(c) => base.with_list_size(c),
                None => base,
            };
            let report = counting_report(&solver_config, n, steps).map_err(|e| CliError::Input(e.to_string()))?;
            Ok(Outcome::ok(pretty(&report)))
        }
    }
}

fn cmd_generate(a: &GenerateArgs) -> Result<Outcome, CliError> {
    let model: TreeModel = parse_json(&a.model, "tree model")?;
    let tree = RootedTree::generate(model, a.seed).map_err(|e| CliError::Input(e.to_string()))?;
    Ok(Outcome::ok(if a.dot { tree.to_dot() } else { format!("{}\n", tree.to_json()) }))
}

/// Worker count from `THUE_TREE_THREADS`, if set and valid.
pub fn threads_from_env() -> Option<usize> {
    std::env::var("THUE_TREE_THREADS").ok()?.trim().parse().ok().filter(|&n| n > 0)
}
