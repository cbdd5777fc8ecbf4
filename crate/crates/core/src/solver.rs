//! Erase-and-retry colorings driven by a seed of list indices.
//!
//! The state is a [`PartialColoring`] whose domain is always a preorder
//! prefix. Each step either finds a forbidden block ending at the current
//! vertex, erases the repeated part together with everything after it in
//! preorder and recolors the topmost erased vertex, or moves on to the next
//! vertex in preorder. The vertex touched by a step depends only on the
//! state; the seed entry only picks its color.

use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coloring::PartialColoring;
use crate::entropy::{self, RunLog};
use crate::oracle::{self, PathMode};
use crate::power::{find_square_from, find_vertical_power, PowerSpec, Rational};
use crate::tree::{Color, ListAssignment, RootedTree, VertexId};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolverError {
    #[error("seed entry {entry} at position {position} is outside 1..={list_size}")]
    SeedIndexOutOfRange {
        position: usize,
        entry: usize,
        list_size: usize,
    },
    #[error("a seed holds at least one entry")]
    EmptySeed,
    #[error("lists do not match the configuration: {0}")]
    ListSizeMismatch(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("completed coloring failed verification with {0} violations")]
    VerificationFailed(usize),
    #[error("square with tip index {tip} and half-length {half} leaves nothing to erase")]
    TipOutOfRange { half: usize, tip: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Avoid `x^{1+ε}` on vertical paths.
    Vertical,
    /// Avoid squares on all simple paths and `x^{1+δ}` on vertical paths.
    Full,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub mode: Mode,
    #[serde(with = "rational_str")]
    pub epsilon: Rational,
    pub list_size: usize,
    /// Maximum degree the default list size was computed for (Full mode).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_degree: Option<usize>,
    /// Step budget for [`solve`]; `None` means `100·n`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step_budget: Option<u64>,
}

mod rational_str {
    use super::Rational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(&format_args!("{}/{}", r.numer(), r.denom()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        crate::power::parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

fn ceil_ratio(r: Rational) -> u64 {
    r.ceil().to_integer()
}

/// `⌈base^e⌉` for a rational exponent `e = p/q`, computed exactly.
pub fn ceil_rational_power(base: u64, e: Rational) -> Option<u64> {
    let (p, q) = (*e.numer(), *e.denom());
    let target = (base as u128).checked_pow(u32::try_from(p).ok()?)?;
    let q = u32::try_from(q).ok()?;
    let (mut lo, mut hi) = (0u128, (base as u128).checked_pow(u32::try_from(p.div_ceil(q as u64)).ok()?)?.max(1));
    // smallest x with x^q >= target
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        match mid.checked_pow(q) {
            Some(v) if v < target => lo = mid + 1,
            _ => hi = mid,
        }
    }
    u64::try_from(lo).ok()
}

impl SolverConfig {
    /// Vertical mode with lists of size `4·⌈1/ε⌉`.
    pub fn vertical(epsilon: Rational) -> Result<Self, SolverError> {
        if epsilon <= Rational::new(0, 1) {
            return Err(SolverError::InvalidConfig("epsilon must be positive".into()));
        }
        let list_size = 4 * ceil_ratio(epsilon.recip()) as usize;
        Ok(SolverConfig {
            mode: Mode::Vertical,
            epsilon,
            list_size,
            max_degree: None,
            step_budget: None,
        })
    }

    /// Full mode with `δ = ε/(2+ε)` and lists of size
    /// `12·(⌈1/δ⌉+1)·⌈Δ^{1+ε}⌉`.
    pub fn full(epsilon: Rational, max_degree: usize) -> Result<Self, SolverError> {
        let mut config = SolverConfig {
            mode: Mode::Full,
            epsilon,
            list_size: 1,
            max_degree: Some(max_degree),
            step_budget: None,
        };
        config.validate()?;
        let delta = config.delta();
        let scale = ceil_rational_power(max_degree.max(1) as u64, Rational::one() + epsilon)
            .ok_or_else(|| SolverError::InvalidConfig("degree power overflows".into()))?;
        config.list_size = (12 * (ceil_ratio(delta.recip()) + 1) * scale) as usize;
        Ok(config)
    }

    pub fn with_list_size(mut self, list_size: usize) -> Self {
        self.list_size = list_size;
        self
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.step_budget = Some(budget);
        self
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        if self.epsilon <= Rational::new(0, 1) {
            return Err(SolverError::InvalidConfig("epsilon must be positive".into()));
        }
        if self.list_size == 0 {
            return Err(SolverError::InvalidConfig("list size must be positive".into()));
        }
        if self.mode == Mode::Full && self.delta() >= Rational::new(1, 2) {
            return Err(SolverError::InvalidConfig(format!(
                "delta = {} must stay below 1/2 (epsilon < 2)",
                self.delta()
            )));
        }
        Ok(())
    }

    /// `δ` with `1+ε = (1+δ)/(1−δ)`; equal to `ε` in Vertical mode.
    pub fn delta(&self) -> Rational {
        match self.mode {
            Mode::Vertical => self.epsilon,
            Mode::Full => self.epsilon / (Rational::from_integer(2) + self.epsilon),
        }
    }

    /// The vertical pattern the procedure erases: `x^{1+ε}` or `x^{1+δ}`.
    pub fn vertical_spec(&self) -> PowerSpec {
        PowerSpec::from_epsilon(self.delta()).expect("validated epsilon is positive")
    }

    /// Number of annotation values for vertical-negative steps, `⌈1/ε⌉` or `⌈1/δ⌉`.
    pub fn annotation_values(&self) -> usize {
        ceil_ratio(self.delta().recip()) as usize
    }

    pub fn budget_for(&self, tree: &RootedTree) -> u64 {
        self.step_budget.unwrap_or(100 * tree.len() as u64)
    }
}

/// A sequence of 1-based list indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Seed(pub Vec<usize>);

impl Seed {
    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn check(&self, list_size: usize) -> Result<(), SolverError> {
        if self.0.is_empty() {
            return Err(SolverError::EmptySeed);
        }
        match self.0.iter().position(|&e| e == 0 || e > list_size) {
            Some(position) => Err(SolverError::SeedIndexOutOfRange {
                position,
                entry: self.0[position],
                list_size,
            }),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StepKind {
    /// The root receives its first color.
    Start,
    /// The first child of the current vertex is colored.
    Positive,
    /// The current vertex closed a finished subtree; the next vertex in
    /// preorder (a later child of some ancestor) is colored.
    Resume,
    VerticalNegative { base: usize, repeat: usize },
    SquareNegative {
        half: usize,
        tip: usize,
        repeat: usize,
        /// Child positions along the descent from the tip, topmost first.
        descent: Vec<usize>,
    },
}

impl StepKind {
    pub fn is_negative(&self) -> bool {
        matches!(
            self,
            StepKind::VerticalNegative { .. } | StepKind::SquareNegative { .. }
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepOutcome {
    #[serde(flatten)]
    pub kind: StepKind,
    pub recolored: VertexId,
    pub color: Color,
    /// Depth of the recolored vertex, the step's entry in the supporting walk.
    pub depth: usize,
    /// Erased colors of vertices off the erased path, in preorder.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub erased: Vec<Color>,
}

/// What the next step will do, before a color is chosen.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Plan {
    Completed,
    Recolor {
        target: VertexId,
        kind: StepKind,
        erased: Vec<Color>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    Colored(StepOutcome),
    Completed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Completed,
    SeedExhausted,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Run {
    pub coloring: PartialColoring,
    /// One outcome per consumed seed entry.
    pub outcomes: Vec<StepOutcome>,
    pub status: RunStatus,
}

impl Run {
    pub fn consumed(&self) -> usize {
        self.outcomes.len()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunStats {
    pub steps: u64,
    pub max_depth: usize,
    pub positive: u64,
    pub resume: u64,
    pub vertical_negative: u64,
    pub square_negative: u64,
}

impl RunStats {
    fn record(&mut self, outcome: &StepOutcome) {
        self.steps += 1;
        self.max_depth = self.max_depth.max(outcome.depth);
        match outcome.kind {
            StepKind::Start | StepKind::Positive => self.positive += 1,
            StepKind::Resume => self.resume += 1,
            StepKind::VerticalNegative { .. } => self.vertical_negative += 1,
            StepKind::SquareNegative { .. } => self.square_negative += 1,
        }
    }

    pub fn from_outcomes<'a>(outcomes: impl IntoIterator<Item = &'a StepOutcome>) -> Self {
        let mut stats = RunStats::default();
        for o in outcomes {
            stats.record(o);
        }
        stats
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    /// Total coloring in preorder.
    pub coloring: Vec<Color>,
    pub seed: Seed,
    pub outcomes: Vec<StepOutcome>,
    pub log: RunLog,
    pub stats: RunStats,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    Solved(Box<Solution>),
    BudgetExhausted(RunStats),
}

pub struct Solver<'a> {
    tree: &'a RootedTree,
    lists: &'a ListAssignment,
    config: SolverConfig,
    vertical: PowerSpec,
}

impl<'a> Solver<'a> {
    pub fn new(
        tree: &'a RootedTree,
        lists: &'a ListAssignment,
        config: &SolverConfig,
    ) -> Result<Self, SolverError> {
        config.validate()?;
        if lists.len() != tree.len() {
            return Err(SolverError::ListSizeMismatch(format!(
                "{} lists for {} vertices",
                lists.len(),
                tree.len()
            )));
        }
        if lists.list_size() != config.list_size {
            return Err(SolverError::ListSizeMismatch(format!(
                "lists hold {} colors, configuration expects {}",
                lists.list_size(),
                config.list_size
            )));
        }
        Ok(Solver {
            tree,
            lists,
            vertical: config.vertical_spec(),
            config: config.clone(),
        })
    }

    pub fn tree(&self) -> &RootedTree {
        self.tree
    }

    pub fn lists(&self) -> &ListAssignment {
        self.lists
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    fn nth_color(&self, v: VertexId, n: usize, position: usize) -> Result<Color, SolverError> {
        self.lists
            .nth(v, n)
            .ok_or(SolverError::SeedIndexOutOfRange {
                position,
                entry: n,
                list_size: self.config.list_size,
            })
    }

    /// `h(n)`: the root colored with the `n`-th color of its list.
    pub fn start(&self, n: usize) -> Result<(PartialColoring, StepOutcome), SolverError> {
        let color = self.nth_color(0, n, 0)?;
        let outcome = StepOutcome {
            kind: StepKind::Start,
            recolored: 0,
            color,
            depth: 1,
            erased: Vec::new(),
        };
        Ok((PartialColoring::root(color), outcome))
    }

    /// Colors of `u..=v` that are not ancestors of `v`, i.e. off the erased path.
    fn off_path(&self, state: &PartialColoring, u: VertexId, v: VertexId) -> Vec<Color> {
        (u..=v)
            .filter(|&w| !self.tree.is_descendant(v, w))
            .map(|w| state.colors()[w])
            .collect()
    }

    fn advance(&self, state: &PartialColoring) -> Plan {
        let v = state.current();
        let u = v + 1;
        if u >= self.tree.len() {
            return Plan::Completed;
        }
        let kind = if self.tree.parent(u) == Some(v) {
            StepKind::Positive
        } else {
            StepKind::Resume
        };
        Plan::Recolor {
            target: u,
            kind,
            erased: Vec::new(),
        }
    }

    fn vertical_plan(&self, state: &PartialColoring) -> Option<Plan> {
        let v = state.current();
        let hit = find_vertical_power(self.tree, state, v, self.vertical)
            .expect("the current vertex and its ancestors are colored")?;
        let u = hit.erase_root();
        Some(Plan::Recolor {
            target: u,
            kind: StepKind::VerticalNegative {
                base: hit.base,
                repeat: hit.repeat,
            },
            erased: self.off_path(state, u, v),
        })
    }

    /// The deterministic part of `nextV`: which vertex gets recolored and why.
    pub fn plan_vertical(&self, state: &PartialColoring) -> Plan {
        self.vertical_plan(state).unwrap_or_else(|| self.advance(state))
    }

    /// The deterministic part of `nextT`.
    pub fn plan_full(&self, state: &PartialColoring) -> Result<Plan, SolverError> {
        if let Some(plan) = self.vertical_plan(state) {
            return Ok(plan);
        }
        let v = state.current();
        let Some(hit) = find_square_from(self.tree, state, v).expect("v is the current vertex") else {
            return Ok(self.advance(state));
        };
        let (l, k) = (hit.half, hit.tip);
        // the query itself is never the tip, so k < 2l
        if k >= 2 * l {
            return Err(SolverError::TipOutOfRange { half: l, tip: k });
        }
        let top = l.max(k);
        let u = hit.vertex(top + 1);
        let descent = (1..k)
            .rev()
            .map(|j| self.tree.child_position(hit.vertex(j)))
            .collect();
        Ok(Plan::Recolor {
            target: u,
            kind: StepKind::SquareNegative {
                half: l,
                tip: k,
                repeat: 2 * l - top,
                descent,
            },
            erased: self.off_path(state, u, v),
        })
    }

    pub fn plan(&self, state: &PartialColoring) -> Result<Plan, SolverError> {
        match self.config.mode {
            Mode::Vertical => Ok(self.plan_vertical(state)),
            Mode::Full => self.plan_full(state),
        }
    }

    fn apply(&self, state: &mut PartialColoring, plan: Plan, n: usize, position: usize) -> Result<Step, SolverError> {
        match plan {
            Plan::Completed => Ok(Step::Completed),
            Plan::Recolor { target, kind, erased } => {
                let color = self.nth_color(target, n, position)?;
                state.recolor(target, color);
                Ok(Step::Colored(StepOutcome {
                    kind,
                    recolored: target,
                    color,
                    depth: self.tree.depth(target),
                    erased,
                }))
            }
        }
    }

    /// One call of `nextV`.
    pub fn next_v(&self, state: &mut PartialColoring, n: usize) -> Result<Step, SolverError> {
        let plan = self.plan_vertical(state);
        self.apply(state, plan, n, 0)
    }

    /// One call of `nextT`.
    pub fn next_t(&self, state: &mut PartialColoring, n: usize) -> Result<Step, SolverError> {
        let plan = self.plan_full(state)?;
        self.apply(state, plan, n, 0)
    }

    fn step_at(&self, state: &mut PartialColoring, n: usize, position: usize) -> Result<Step, SolverError> {
        let plan = self.plan(state)?;
        self.apply(state, plan, n, position)
    }

    pub fn step(&self, state: &mut PartialColoring, n: usize) -> Result<Step, SolverError> {
        self.step_at(state, n, 0)
    }

    /// True when the state is a total coloring with nothing left to fix.
    pub fn is_complete(&self, state: &PartialColoring) -> Result<bool, SolverError> {
        Ok(state.is_total(self.tree) && self.plan(state)? == Plan::Completed)
    }

    /// Deterministic replay of `h(s)`. Stops early once the coloring is
    /// complete; the remaining seed entries are not consumed.
    pub fn run(&self, seed: &Seed) -> Result<Run, SolverError> {
        seed.check(self.config.list_size)?;
        let entries = seed.entries();
        let (mut state, first) = self.start(entries[0])?;
        let mut outcomes = vec![first];
        for (position, &n) in entries.iter().enumerate().skip(1) {
            match self.step_at(&mut state, n, position)? {
                Step::Colored(o) => outcomes.push(o),
                Step::Completed => {
                    return Ok(Run {
                        coloring: state,
                        outcomes,
                        status: RunStatus::Completed,
                    })
                }
            }
        }
        let status = if self.is_complete(&state)? {
            RunStatus::Completed
        } else {
            RunStatus::SeedExhausted
        };
        Ok(Run {
            coloring: state,
            outcomes,
            status,
        })
    }

    /// Draws seed entries uniformly until the coloring completes or the step
    /// budget runs out. Successes are verified before they are returned.
    pub fn solve(&self, rng_seed: u64) -> Result<SolveOutcome, SolverError> {
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        let budget = self.config.budget_for(self.tree);
        let c = self.config.list_size;
        let mut stats = RunStats::default();
        if budget == 0 {
            return Ok(SolveOutcome::BudgetExhausted(stats));
        }
        let mut seed = vec![rng.gen_range(1..=c)];
        let (mut state, first) = self.start(seed[0])?;
        stats.record(&first);
        let mut outcomes = vec![first];
        loop {
            let plan = self.plan(&state)?;
            if plan == Plan::Completed {
                break;
            }
            if stats.steps >= budget {
                return Ok(SolveOutcome::BudgetExhausted(stats));
            }
            let n = rng.gen_range(1..=c);
            seed.push(n);
            if let Step::Colored(o) = self.apply(&mut state, plan, n, seed.len() - 1)? {
                stats.record(&o);
                outcomes.push(o);
            }
        }
        let violations = self.verify(state.colors())?;
        if violations > 0 {
            return Err(SolverError::VerificationFailed(violations));
        }
        let run = Run {
            coloring: state,
            outcomes,
            status: RunStatus::Completed,
        };
        let log = entropy::encode(self.tree, &run, &self.config)
            .expect("a genuine run always encodes");
        Ok(SolveOutcome::Solved(Box::new(Solution {
            coloring: run.coloring.into_colors(),
            seed: Seed(seed),
            outcomes: run.outcomes,
            log,
            stats,
        })))
    }

    /// Number of violations of the mode's target property in a total coloring.
    pub fn verify(&self, coloring: &[Color]) -> Result<usize, SolverError> {
        let count = |spec, mode| {
            oracle::verify_coloring(self.tree, coloring, spec, mode)
                .map(|v| v.len())
                .map_err(|e| SolverError::InvalidConfig(e.to_string()))
        };
        let vertical = count(self.vertical, PathMode::Vertical)?;
        let squares = match self.config.mode {
            Mode::Vertical => 0,
            Mode::Full => count(PowerSpec::square(), PathMode::AllSimplePaths)?,
        };
        Ok(vertical + squares)
    }
}

pub fn run(
    tree: &RootedTree,
    lists: &ListAssignment,
    config: &SolverConfig,
    seed: &Seed,
) -> Result<Run, SolverError> {
    Solver::new(tree, lists, config)?.run(seed)
}

pub fn solve(
    tree: &RootedTree,
    lists: &ListAssignment,
    config: &SolverConfig,
    rng_seed: u64,
) -> Result<SolveOutcome, SolverError> {
    Solver::new(tree, lists, config)?.solve(rng_seed)
}
