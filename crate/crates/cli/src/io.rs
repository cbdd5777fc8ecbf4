use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thue_tree::solver::{Mode, SolverConfig};
use thue_tree::tree::{Color, ListAssignment, RootedTree};
use thue_tree::{parse_rational, Rational};

use crate::CliError;

pub fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn parse_json<T: DeserializeOwned>(text: &str, what: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Input(format!("{what}: {e}")))
}

/// Tree JSON, or DOT when the file says `digraph`.
pub fn load_tree(path: &Path) -> Result<RootedTree, CliError> {
    let text = read_text(path)?;
    let tree = if text.trim_start().starts_with("digraph") {
        RootedTree::from_dot(&text)
    } else {
        RootedTree::from_json(&text)
    };
    tree.map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Lists as a JSON array indexed by original vertex label.
pub fn load_lists(path: &Path, tree: &RootedTree) -> Result<ListAssignment, CliError> {
    let by_label: Vec<Vec<Color>> = parse_json(&read_text(path)?, "lists")?;
    ListAssignment::for_tree(tree, by_label).map_err(|e| CliError::Input(e.to_string()))
}

/// A bare value, or the named field of a result object.
pub fn field_or_self<T: DeserializeOwned>(text: &str, field: &str, what: &str) -> Result<T, CliError> {
    let value: Value = parse_json(text, what)?;
    let inner = match value {
        Value::Object(mut map) if map.contains_key(field) => map.remove(field).unwrap(),
        other => other,
    };
    serde_json::from_value(inner).map_err(|e| CliError::Input(format!("{what}: {e}")))
}

pub fn parse_epsilon(s: &str) -> Result<Rational, CliError> {
    if !s.contains('/') {
        return Err(CliError::Input(format!("epsilon must be a fraction p/q, got {s:?}")));
    }
    parse_rational(s).map_err(|e| CliError::Input(e.to_string()))
}

/// Solver settings from a config file; command-line flags override them.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub mode: Option<Mode>,
    #[serde(default)]
    pub epsilon: Option<String>,
    #[serde(default)]
    pub budget: Option<u64>,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            Some(p) => parse_json(&read_text(p)?, "config"),
            None => Ok(Self::default()),
        }
    }

    pub fn merge(self, flags: ConfigFile) -> ConfigFile {
        ConfigFile {
            mode: flags.mode.or(self.mode),
            epsilon: flags.epsilon.or(self.epsilon),
            budget: flags.budget.or(self.budget),
            seed: flags.seed.or(self.seed),
        }
    }

    /// Configuration for `tree` with lists of `list_size` colors.
    pub fn solver_config(&self, tree: &RootedTree, list_size: usize) -> Result<SolverConfig, CliError> {
        let epsilon = parse_epsilon(self.epsilon.as_deref().unwrap_or("1/1"))?;
        let config = match self.mode.unwrap_or(Mode::Vertical) {
            Mode::Vertical => SolverConfig::vertical(epsilon),
            Mode::Full => SolverConfig::full(epsilon, tree.max_degree()),
        }
        .map_err(|e| CliError::Input(e.to_string()))?
        .with_list_size(list_size);
        Ok(match self.budget {
            Some(b) => config.with_budget(b),
            None => config,
        })
    }
}
