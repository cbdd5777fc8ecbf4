//! List-size sweeps with per-trial seeds derived from one master seed.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thue_tree::entropy::counting_report;
use thue_tree::solver::{solve, Mode, RunStats, SolveOutcome, SolverConfig};
use thue_tree::tree::{ListAssignment, RootedTree, TreeModel};

use crate::io::parse_epsilon;
use crate::CliError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub mode: Mode,
    pub epsilon: String,
    pub tree: TreeModel,
    pub list_sizes: Vec<usize>,
    pub trials: usize,
    pub master_seed: u64,
    /// Colors available to the random lists; defaults to twice the list size.
    #[serde(default)]
    pub palette: Option<usize>,
    #[serde(default)]
    pub budget: Option<u64>,
    #[serde(default)]
    pub output: Option<String>,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<(), CliError> {
        parse_epsilon(&self.epsilon)?;
        if self.trials == 0 {
            return Err(CliError::Input("trials must be at least 1".into()));
        }
        if self.list_sizes.is_empty() || self.list_sizes.contains(&0) {
            return Err(CliError::Input("list sizes must be nonempty and positive".into()));
        }
        if let Some(p) = self.palette {
            if let Some(&c) = self.list_sizes.iter().find(|&&c| c > p) {
                return Err(CliError::Input(format!("palette {p} is smaller than list size {c}")));
            }
        }
        Ok(())
    }

    fn max_degree(&self) -> usize {
        match self.tree {
            TreeModel::Path { n } => n.min(3).saturating_sub(1),
            TreeModel::Complete { arity, height } => match height {
                0 | 1 => 0,
                2 => arity,
                _ => arity + 1,
            },
            TreeModel::Random { max_degree, .. } => max_degree,
        }
    }

    fn tree_size(&self) -> usize {
        match self.tree {
            TreeModel::Path { n } | TreeModel::Random { n, .. } => n,
            TreeModel::Complete { arity, height } => (0..height).map(|h| arity.pow(h as u32)).sum(),
        }
    }
}

/// SplitMix64 finalizer, used to derive independent per-trial seeds.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn trial_seed(master: u64, point: usize, trial: usize) -> u64 {
    mix(mix(master ^ mix(point as u64)) ^ trial as u64)
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Trial {
    solved: bool,
    stats: RunStats,
}

fn run_trial(spec: &ExperimentSpec, point: usize, trial: usize) -> Result<Trial, CliError> {
    let c = spec.list_sizes[point];
    let seed = trial_seed(spec.master_seed, point, trial);
    let tree = RootedTree::generate(spec.tree, mix(seed ^ 1)).map_err(|e| CliError::Input(e.to_string()))?;
    let palette = spec.palette.unwrap_or(2 * c);
    let lists = ListAssignment::random(tree.len(), c, palette, mix(seed ^ 2)).map_err(|e| CliError::Input(e.to_string()))?;
    let config = config_for(spec, &tree, c)?;
    match solve(&tree, &lists, &config, mix(seed ^ 3)).map_err(|e| CliError::Input(e.to_string()))? {
        SolveOutcome::Solved(s) => Ok(Trial { solved: true, stats: s.stats }),
        SolveOutcome::BudgetExhausted(stats) => Ok(Trial { solved: false, stats }),
    }
}

fn config_for(spec: &ExperimentSpec, tree: &RootedTree, list_size: usize) -> Result<SolverConfig, CliError> {
    let epsilon = parse_epsilon(&spec.epsilon)?;
    let config = match spec.mode {
        Mode::Vertical => SolverConfig::vertical(epsilon),
        Mode::Full => SolverConfig::full(epsilon, tree.max_degree()),
    }
    .map_err(|e| CliError::Input(e.to_string()))?
    .with_list_size(list_size);
    Ok(match spec.budget {
        Some(b) => config.with_budget(b),
        None => config,
    })
}

pub const CSV_HEADER: &str = "list_size,trials,successes,success_rate,mean_steps,p95_steps,\
vertical_negative_fraction,square_negative_fraction,resume_fraction,crossover_m,crossover_log2_m";

/// Runs every trial and returns the CSV table, one row per list size.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<String, CliError> {
    spec.validate()?;
    let jobs: Vec<(usize, usize)> = (0..spec.list_sizes.len())
        .flat_map(|p| (0..spec.trials).map(move |t| (p, t)))
        .collect();
    let results: Vec<Trial> = jobs
        .par_iter()
        .map(|&(p, t)| run_trial(spec, p, t))
        .collect::<Result<_, _>>()?;

    let mut csv = String::from(CSV_HEADER);
    csv.push('\n');
    for (point, &c) in spec.list_sizes.iter().enumerate() {
        let trials = &results[point * spec.trials..(point + 1) * spec.trials];
        let successes = trials.iter().filter(|t| t.solved).count();
        let mut steps: Vec<u64> = trials.iter().map(|t| t.stats.steps).collect();
        steps.sort_unstable();
        let total: u64 = steps.iter().sum();
        let mean = total as f64 / steps.len() as f64;
        let p95 = steps[((steps.len() as f64 * 0.95).ceil() as usize).clamp(1, steps.len()) - 1];
        let fraction = |f: fn(&RunStats) -> u64| {
            let part: u64 = trials.iter().map(|t| f(&t.stats)).sum();
            if total == 0 {
                0.0
            } else {
                part as f64 / total as f64
            }
        };
        let mut bound_config = match spec.mode {
            Mode::Vertical => SolverConfig::vertical(parse_epsilon(&spec.epsilon)?),
            Mode::Full => SolverConfig::full(parse_epsilon(&spec.epsilon)?, spec.max_degree()),
        }
        .map_err(|e| CliError::Input(e.to_string()))?
        .with_list_size(c);
        bound_config.step_budget = spec.budget;
        let report = counting_report(&bound_config, spec.tree_size(), 1).map_err(|e| CliError::Input(e.to_string()))?;
        let _ = writeln!(
            csv,
            "{c},{},{successes},{:.6},{:.3},{p95},{:.6},{:.6},{:.6},{},{}",
            spec.trials,
            successes as f64 / spec.trials as f64,
            mean,
            fraction(|s| s.vertical_negative),
            fraction(|s| s.square_negative),
            fraction(|s| s.resume),
            report.crossover_m.map_or(String::new(), |m| m.to_string()),
            report.crossover_log2_m.map_or(String::new(), |x| format!("{x:.4}")),
        );
    }
    Ok(csv)
}
