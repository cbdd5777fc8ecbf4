//! Compact records of solver runs and the counting bound they support.
//!
//! A [`RunLog`] stores the depth walk of a run, one annotation per step, the
//! square descriptors and the final coloring. [`decode`] rebuilds the seed
//! by undoing the steps from the last one back.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coloring::PartialColoring;
use crate::solver::{Mode, Run, Seed, Solver, SolverConfig, SolverError, StepKind};
use crate::tree::{Color, ListAssignment, RootedTree, VertexId};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LogError {
    #[error("malformed log: {0}")]
    MalformedLog(String),
    #[error("log does not fit the configuration: {0}")]
    ConfigMismatch(String),
    #[error("walk is not supporting: {0}")]
    BadWalk(String),
}

fn malformed<T>(msg: impl Into<String>) -> Result<T, LogError> {
    Err(LogError::MalformedLog(msg.into()))
}

/// Colors erased off the erased path by one negative step, in preorder.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErasedBlock {
    pub step: usize,
    pub colors: Vec<Color>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunLog {
    /// Depth of the vertex recolored at each step.
    #[serde(rename = "W")]
    pub walk: Vec<usize>,
    /// `⌊m/ε⌋ − l` on vertical-negative steps, a sentinel elsewhere.
    #[serde(rename = "A")]
    pub annotations: Vec<i64>,
    #[serde(rename = "Bstar")]
    pub bstar: Vec<i8>,
    #[serde(rename = "Cstar")]
    pub cstar: Vec<usize>,
    /// Final colors from the root down to the last current vertex.
    #[serde(rename = "Path")]
    pub path: Vec<Color>,
    /// Final colors of the other colored vertices, in preorder.
    #[serde(rename = "Side", default, skip_serializing_if = "Vec::is_empty")]
    pub side: Vec<Color>,
    /// Steps that moved to a later child of an ancestor.
    #[serde(rename = "Resumes", default, skip_serializing_if = "Vec::is_empty")]
    pub resumes: Vec<usize>,
    #[serde(rename = "Erased", default, skip_serializing_if = "Vec::is_empty")]
    pub erased: Vec<ErasedBlock>,
}

impl RunLog {
    pub fn steps(&self) -> usize {
        self.walk.len()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("logs always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, LogError> {
        serde_json::from_str(text).map_err(|e| LogError::MalformedLog(e.to_string()))
    }
}

/// Annotation written on steps that are not vertical-negative.
pub fn sentinel(mode: Mode) -> i64 {
    match mode {
        Mode::Vertical => 0,
        Mode::Full => -1,
    }
}

pub fn encode(tree: &RootedTree, run: &Run, config: &SolverConfig) -> Result<RunLog, LogError> {
    let spec = config.vertical_spec();
    let values = config.annotation_values() as i64;
    let mut log = RunLog {
        walk: Vec::with_capacity(run.outcomes.len()),
        annotations: Vec::with_capacity(run.outcomes.len()),
        bstar: Vec::new(),
        cstar: Vec::new(),
        path: run.coloring.root_path(tree),
        side: Vec::new(),
        resumes: Vec::new(),
        erased: Vec::new(),
    };
    for (i, o) in run.outcomes.iter().enumerate() {
        log.walk.push(o.depth);
        let mut annotation = sentinel(config.mode);
        match &o.kind {
            StepKind::Start | StepKind::Positive => {}
            StepKind::Resume => log.resumes.push(i),
            StepKind::VerticalNegative { base, repeat } => {
                annotation = spec.floor_div(*repeat) as i64 - *base as i64;
                if !(0..values).contains(&annotation) {
                    return Err(LogError::ConfigMismatch(format!(
                        "annotation {annotation} at step {i} outside 0..{values}"
                    )));
                }
            }
            StepKind::SquareNegative { half, tip, repeat, descent } => {
                if config.mode != Mode::Full {
                    return Err(LogError::ConfigMismatch(format!("square step {i} in Vertical mode")));
                }
                let d = *half as i64 - *tip as i64;
                let mut block = vec![0i8; *repeat];
                if d != 0 {
                    let at = d.unsigned_abs() as usize - 1;
                    if at >= *repeat {
                        return Err(LogError::ConfigMismatch(format!(
                            "offset {d} does not fit a block of {repeat} at step {i}"
                        )));
                    }
                    block[at] = d.signum() as i8;
                }
                log.bstar.extend(block);
                log.cstar.extend(descent);
            }
        }
        if !o.erased.is_empty() {
            log.erased.push(ErasedBlock {
                step: i,
                colors: o.erased.clone(),
            });
        }
        log.annotations.push(annotation);
    }
    let current = run.coloring.current();
    log.side = (0..run.coloring.len())
        .filter(|&w| !tree.is_descendant(current, w))
        .map(|w| run.coloring.colors()[w])
        .collect();
    Ok(log)
}

/// Rebuilds the final partial coloring from `Path` and `Side`.
fn final_coloring(log: &RunLog, tree: &RootedTree) -> Result<PartialColoring, LogError> {
    let total = log.path.len() + log.side.len();
    if total == 0 || total > tree.len() {
        return malformed(format!("{total} final colors for {} vertices", tree.len()));
    }
    let current = total - 1;
    if tree.depth(current) != log.path.len() {
        return malformed("Path length differs from the depth of the final vertex");
    }
    let mut side = log.side.iter();
    let colors = (0..total)
        .map(|w| {
            if tree.is_descendant(current, w) {
                log.path[tree.depth(w) - 1]
            } else {
                *side.next().expect("side count follows from the depth check")
            }
        })
        .collect();
    Ok(PartialColoring::from_prefix(colors))
}

/// Pops `len` entries from the back of `v`.
fn pop_block<T: Clone>(v: &mut Vec<T>, len: usize, name: &str) -> Result<Vec<T>, LogError> {
    if v.len() < len {
        return malformed(format!("{name} runs out"));
    }
    Ok(v.split_off(v.len() - len))
}

/// `(l, k)` from a `Bstar` block of length `m`.
fn decode_offset(block: &[i8]) -> Result<(usize, usize), LogError> {
    let m = block.len();
    let nonzero: Vec<_> = block.iter().enumerate().filter(|(_, &b)| b != 0).collect();
    let d = match nonzero.as_slice() {
        [] => 0i64,
        [(at, &s)] if s == 1 || s == -1 => s as i64 * (*at as i64 + 1),
        _ => return malformed("Bstar block is not a signed unit vector"),
    };
    let m = m as i64;
    let (l, k) = if d >= 0 { (m, m - d) } else { (m - d, m - 2 * d) };
    if k < 1 || k >= 2 * l {
        return malformed("Bstar block encodes an impossible tip");
    }
    Ok((l as usize, k as usize))
}

/// Recovers the seed a log was produced from.
pub fn decode(
    log: &RunLog,
    tree: &RootedTree,
    lists: &ListAssignment,
    config: &SolverConfig,
) -> Result<Seed, LogError> {
    config
        .validate()
        .map_err(|e| LogError::ConfigMismatch(e.to_string()))?;
    if lists.len() != tree.len() || lists.list_size() != config.list_size {
        return Err(LogError::ConfigMismatch("lists do not match tree and configuration".into()));
    }
    let steps = log.walk.len();
    if steps == 0 || log.annotations.len() != steps {
        return malformed("W and A must be nonempty and of equal length");
    }
    if log.walk[0] != 1 {
        return malformed("W starts at the root");
    }
    let spec = config.vertical_spec();
    let values = config.annotation_values() as i64;
    let idle = sentinel(config.mode);

    let mut f = final_coloring(log, tree)?;
    if tree.depth(f.current()) != log.walk[steps - 1] {
        return malformed("last W entry differs from the depth of the final vertex");
    }
    let mut bstar = log.bstar.clone();
    let mut cstar = log.cstar.clone();
    let mut resumes = log.resumes.clone();
    let mut erased = log.erased.clone();
    let mut seed = vec![0usize; steps];

    for i in (1..steps).rev() {
        let u = f.current();
        if tree.depth(u) != log.walk[i] {
            return malformed(format!("W[{i}] disagrees with the reconstructed state"));
        }
        seed[i] = lists
            .index_of(u, f.colors()[u])
            .ok_or_else(|| LogError::MalformedLog(format!("color at step {i} is not in its list")))?;
        let (prev, cur, a) = (log.walk[i - 1], log.walk[i], log.annotations[i]);
        let off = match erased.last() {
            Some(b) if b.step == i => erased.pop().unwrap().colors,
            Some(b) if b.step > i => return malformed("Erased entries out of order"),
            _ => Vec::new(),
        };
        if resumes.last() == Some(&i) {
            resumes.pop();
            if a != idle || !off.is_empty() || cur > prev || u == 0 || tree.parent(u) == Some(u - 1) {
                return malformed(format!("step {i} is not a resume"));
            }
            if tree.depth(u - 1) != prev {
                return malformed(format!("W[{}] disagrees with the resumed vertex", i - 1));
            }
            f.truncate(u);
            continue;
        }
        if cur == prev + 1 {
            if a != idle || !off.is_empty() || tree.parent(u) != Some(u - 1) {
                return malformed(format!("step {i} is not a positive step"));
            }
            f.truncate(u);
            continue;
        }
        if cur > prev {
            return malformed(format!("W jumps up by more than one at step {i}"));
        }
        // negative step: the old current vertex lies m - 1 levels below u
        let m = prev - cur + 1;
        let last = u + m + off.len() - 1;
        if last >= tree.len() || !tree.is_descendant(last, u) || tree.depth(last) != prev {
            return malformed(format!("step {i} erases an impossible region"));
        }
        let chain: Vec<VertexId> = tree.ancestors(last).take(m).collect();
        let mut path_colors: Vec<Color> = vec![0; m];
        if a >= 0 || config.mode == Mode::Vertical {
            if !(0..values).contains(&a) {
                return malformed(format!("annotation {a} at step {i} out of range"));
            }
            let l = spec.floor_div(m) as i64 - a;
            if l < 1 || spec.repeat_len(l as usize) != m || l as usize + m > prev {
                return malformed(format!("annotation {a} at step {i} names no block"));
            }
            let l = l as usize;
            // c[j] = c[j + l], reading colors upward from the old current vertex
            let above: Vec<VertexId> = tree.ancestors(last).take(l + m).collect();
            let mut c: Vec<Color> = vec![0; l + m];
            for j in m..l + m {
                c[j] = f.colors()[above[j]];
            }
            for j in (0..m).rev() {
                c[j] = c[j + l];
            }
            path_colors.copy_from_slice(&c[..m]);
        } else {
            if a != -1 {
                return malformed(format!("annotation {a} at step {i} out of range"));
            }
            let block = pop_block(&mut bstar, m, "Bstar")?;
            let (l, k) = decode_offset(&block)?;
            let descent = pop_block(&mut cstar, k - 1, "Cstar")?;
            let top = l.max(k);
            if 2 * l - top != m {
                return malformed(format!("Bstar block at step {i} disagrees with W"));
            }
            // v_j for 1 <= j <= 2l, stored at index j
            let mut v = vec![0; 2 * l + 1];
            for (t, &w) in chain.iter().enumerate() {
                v[2 * l - t] = w;
            }
            let tip = tree
                .ancestor_at(u, top + 1 - k)
                .ok_or_else(|| LogError::MalformedLog(format!("tip above the root at step {i}")))?;
            // v_top .. v_k run from u's parent up to the tip
            let mut y = tree.parent(u).expect("tip lies above u");
            for j in (k..=top).rev() {
                v[j] = y;
                if j > k {
                    y = tree.parent(y).expect("tip lies above u");
                }
            }
            if y != tip {
                return malformed("tip mismatch");
            }
            let mut y = tip;
            for (t, &pos) in descent.iter().enumerate() {
                let child = *tree
                    .children(y)
                    .get(pos.wrapping_sub(1))
                    .ok_or_else(|| LogError::MalformedLog(format!("Cstar child {pos} missing at step {i}")))?;
                if child >= u {
                    return malformed(format!("Cstar descends into uncolored vertices at step {i}"));
                }
                y = child;
                v[k - 1 - t] = y;
            }
            for j in top + 1..=2 * l {
                let color = f.colors()[v[j - l]];
                path_colors[2 * l - j] = color;
            }
        }
        // path_colors[t] belongs to chain[t], counted from the old current vertex
        let mut side = off.into_iter();
        let mut restored = Vec::with_capacity(last + 1 - u);
        for w in u..=last {
            if tree.is_descendant(last, w) {
                restored.push(path_colors[prev - tree.depth(w)]);
            } else {
                restored.push(side.next().expect("off-path count follows from the interval"));
            }
        }
        f.truncate(u);
        for c in restored {
            f.push(c);
        }
    }
    if f.len() != 1 {
        return malformed("steps do not unwind to the root");
    }
    seed[0] = lists
        .index_of(0, f.colors()[0])
        .ok_or_else(|| LogError::MalformedLog("root color is not in its list".into()))?;
    if !bstar.is_empty() || !cstar.is_empty() || !resumes.is_empty() || !erased.is_empty() {
        return malformed("unused log entries");
    }
    Ok(Seed(seed))
}

/// [`decode`], then a replay check: the seed must reproduce the log.
pub fn decode_verified(
    log: &RunLog,
    tree: &RootedTree,
    lists: &ListAssignment,
    config: &SolverConfig,
) -> Result<Seed, LogError> {
    let seed = decode(log, tree, lists, config)?;
    let replay = Solver::new(tree, lists, config)
        .and_then(|s| s.run(&seed))
        .map_err(|e: SolverError| LogError::MalformedLog(e.to_string()))?;
    if replay.consumed() != seed.len() || encode(tree, &replay, config)? != *log {
        return malformed("replaying the decoded seed gives a different log");
    }
    Ok(seed)
}

/// A supporting walk written as `±1` steps from its first height.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkExpansion {
    pub start: usize,
    pub steps: Vec<i8>,
}

/// Replaces each step `W_i → W_{i+1}` by `+1` and then `W_i + 1 − W_{i+1}`
/// down-steps.
pub fn expand_walk(walk: &[usize]) -> Result<WalkExpansion, LogError> {
    let Some(&start) = walk.first() else {
        return Err(LogError::BadWalk("empty walk".into()));
    };
    if walk.contains(&0) {
        return Err(LogError::BadWalk("heights must be positive".into()));
    }
    let mut steps = Vec::new();
    for w in walk.windows(2) {
        if w[1] > w[0] + 1 {
            return Err(LogError::BadWalk(format!("{} → {} climbs more than one", w[0], w[1])));
        }
        steps.push(1);
        steps.extend(std::iter::repeat_n(-1, w[0] + 1 - w[1]));
    }
    Ok(WalkExpansion { start, steps })
}

impl WalkExpansion {
    /// Inverse of [`expand_walk`].
    pub fn collapse(&self) -> Result<Vec<usize>, LogError> {
        let mut walk = vec![self.start];
        let mut h = self.start as i64;
        let mut iter = self.steps.iter().peekable();
        while let Some(&s) = iter.next() {
            if s != 1 {
                return Err(LogError::BadWalk("each step opens with +1".into()));
            }
            h += 1;
            while iter.peek() == Some(&&-1) {
                iter.next();
                h -= 1;
            }
            if h < 1 {
                return Err(LogError::BadWalk("height drops below 1".into()));
            }
            walk.push(h as usize);
        }
        Ok(walk)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountingReport {
    pub mode: Mode,
    pub steps: u64,
    /// `M·log₂ c`: bits needed to name a seed of length `M`.
    pub left_bits: f64,
    pub walk_bits: f64,
    pub annotation_bits: f64,
    pub bstar_bits: f64,
    pub cstar_bits: f64,
    pub path_bits: f64,
    pub right_bits: f64,
    /// Per-step growth of the left side.
    pub left_rate: f64,
    /// Per-step growth of the right side, counting 2 bits per walk step.
    pub right_rate: f64,
    /// `C(2M, M)`, when it fits.
    pub walks_exact_len: Option<u128>,
    /// `Σ_{L ≤ 2M} C(L, ⌊L/2⌋)`, when it fits.
    pub walks_up_to_len: Option<u128>,
    /// Number of supporting walks of length `M` starting at 1.
    pub supporting_walks: Option<u128>,
    /// Least `M` from which the left side exceeds the right side.
    pub crossover_m: Option<u64>,
    pub crossover_log2_m: Option<f64>,
}

/// Largest `M` for which the walk counts are computed exactly.
pub const EXACT_WALK_LIMIT: u64 = 60;

pub fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

fn walks_up_to(m: u64) -> Option<u128> {
    (0..=2 * m).try_fold(0u128, |acc, len| acc.checked_add(binomial(len, len / 2)?))
}

/// `2M − log₂ Σ_{L ≤ 2M} C(L, ⌊L/2⌋)`: how far the walk count falls short of
/// `4^M`. Exact for small `M`.
fn walk_deficit(m: f64) -> f64 {
    if m <= EXACT_WALK_LIMIT as f64 {
        return 2.0 * m - (walks_up_to(m.round() as u64).unwrap() as f64).log2();
    }
    // 2·C(2M, M)(1 + O(1/M)) with C(2M, M) ≈ 4^M / √(πM) · (1 − 1/(8M))
    0.5 * (std::f64::consts::PI * m).log2() - 1.0 - (1.0 - 1.0 / (8.0 * m)).log2()
}

pub fn counting_report(
    config: &SolverConfig,
    tree_size: usize,
    steps: u64,
) -> Result<CountingReport, LogError> {
    config
        .validate()
        .map_err(|e| LogError::ConfigMismatch(e.to_string()))?;
    let c = config.list_size as f64;
    let a = config.annotation_values() as f64;
    let left_rate = c.log2();
    let (annotation_rate, b_rate, c_rate) = match config.mode {
        Mode::Vertical => (a.log2(), 0.0, 0.0),
        Mode::Full => {
            let degree = config
                .max_degree
                .ok_or_else(|| LogError::ConfigMismatch("Full mode needs a maximum degree".into()))?;
            let e = *config.epsilon.numer() as f64 / *config.epsilon.denom() as f64;
            ((a + 1.0).log2(), 3f64.log2(), (1.0 + e) * (degree.max(1) as f64).log2())
        }
    };
    let right_rate = 2.0 + annotation_rate + b_rate + c_rate;
    let path_bits = (tree_size.max(1) as f64).log2() + tree_size as f64 * c.log2();
    let m = steps as f64;
    let walk_bits = if steps == 0 { 0.0 } else { 2.0 * m - walk_deficit(m) };
    let right_bits = walk_bits + (annotation_rate + b_rate + c_rate) * m + path_bits;

    // diff(M) = left − right; increasing in M when the per-step rates allow it
    let rate = left_rate - right_rate;
    let diff = |m: f64| rate * m + walk_deficit(m) - path_bits;
    let (crossover_m, crossover_log2_m) = crossover(rate, diff, path_bits);

    let exact = steps <= EXACT_WALK_LIMIT;
    Ok(CountingReport {
        mode: config.mode,
        steps,
        left_bits: m * left_rate,
        walk_bits,
        annotation_bits: m * annotation_rate,
        bstar_bits: m * b_rate,
        cstar_bits: m * c_rate,
        path_bits,
        right_bits,
        left_rate,
        right_rate,
        walks_exact_len: exact.then(|| binomial(2 * steps, steps)).flatten(),
        walks_up_to_len: exact.then(|| walks_up_to(steps)).flatten(),
        supporting_walks: exact
            .then(|| binomial(2 * steps, steps).map(|b| b / (steps as u128 + 1)))
            .flatten(),
        crossover_m,
        crossover_log2_m,
    })
}

fn crossover(rate: f64, diff: impl Fn(f64) -> f64, path_bits: f64) -> (Option<u64>, Option<f64>) {
    const RATE_TOL: f64 = 1e-12;
    if rate < -RATE_TOL {
        return (None, None);
    }
    // in log space, M = 2^x; the deficit 2M − log₂(walks) is ½·log₂(πM) − 1 for large M
    let g = |x: f64| {
        if x <= 60.0 {
            diff(x.exp2())
        } else if rate > RATE_TOL {
            if x > 1000.0 {
                f64::INFINITY
            } else {
                rate * x.exp2() + 0.5 * (std::f64::consts::PI.log2() + x) - 1.0 - path_bits
            }
        } else {
            0.5 * (std::f64::consts::PI.log2() + x) - 1.0 - path_bits
        }
    };
    let mut hi = 1.0;
    while g(hi) <= 0.0 {
        hi *= 2.0;
        if hi > 1e12 {
            return (None, None);
        }
    }
    let mut lo = 0.0;
    if g(lo) > 0.0 {
        return (Some(1), Some(0.0));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    if hi > 62.0 {
        return (None, Some(hi));
    }
    // exact integer search around the real root
    let mut lo = 1u64;
    let mut hi_m = (hi.exp2().ceil() as u64).max(2) * 2;
    while diff(hi_m as f64) <= 0.0 {
        hi_m *= 2;
    }
    while lo < hi_m {
        let mid = lo + (hi_m - lo) / 2;
        if diff(mid as f64) > 0.0 {
            hi_m = mid;
        } else {
            lo = mid + 1;
        }
    }
    (Some(lo), Some((lo as f64).log2()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::power::Rational;
    use crate::solver::{RunStatus, SolveOutcome};
    use crate::tree::TreeModel;
    use proptest::prelude::*;

    fn eps(p: u64, q: u64) -> Rational {
        Rational::new(p, q)
    }

    #[test]
    fn walk_expansion_examples() {
        assert_eq!(expand_walk(&[1, 2, 3]).unwrap().steps, vec![1, 1]);
        assert_eq!(expand_walk(&[1, 2, 3, 2]).unwrap().steps, vec![1, 1, 1, -1, -1]);
        assert!(expand_walk(&[1, 3]).is_err());
        assert!(expand_walk(&[]).is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), Some(6));
        assert_eq!(binomial(0, 0), Some(1));
        assert_eq!(binomial(120, 60), binomial(119, 59).map(|b| 2 * b));
        assert_eq!(binomial(3, 5), Some(0));
        assert_eq!(walks_up_to(1), Some(1 + 1 + 2));
    }

    #[test]
    fn vertical_rates_balance_at_four_colors() {
        let config = SolverConfig::vertical(eps(1, 1)).unwrap();
        let r = counting_report(&config, 10, 20).unwrap();
        assert_eq!(r.left_rate, 2.0);
        assert_eq!(r.right_rate, 2.0);
        assert_eq!(r.left_bits, 40.0);
        // only the walk deficit, about ½·log₂(πM) − 1, separates the sides
        let expected = 2.0 * (r.path_bits + 1.0) - std::f64::consts::PI.log2();
        assert!((r.crossover_log2_m.unwrap() - expected).abs() < 1e-3);
        let big = counting_report(&config, 1000, 20).unwrap();
        assert!(big.crossover_m.is_none());
        assert!(big.crossover_log2_m.unwrap() > 62.0);
    }

    #[test]
    fn larger_lists_cross_over() {
        let config = SolverConfig::vertical(eps(1, 1)).unwrap().with_list_size(8);
        let r = counting_report(&config, 10, 20).unwrap();
        let m = r.crossover_m.unwrap();
        let at = |steps| counting_report(&config, 10, steps).unwrap();
        assert!(at(m).left_bits > at(m).right_bits);
        assert!(at(m - 1).left_bits <= at(m - 1).right_bits);
    }

    fn solved_log(tree: &RootedTree, lists: &ListAssignment, config: &SolverConfig, seed: u64) -> (Seed, RunLog) {
        match crate::solver::solve(tree, lists, config, seed).unwrap() {
            SolveOutcome::Solved(s) => (s.seed, s.log),
            SolveOutcome::BudgetExhausted(_) => panic!("budget"),
        }
    }

    #[test]
    fn path_logs_have_no_extras() {
        let t = RootedTree::generate(TreeModel::Path { n: 40 }, 0).unwrap();
        let lists = ListAssignment::random(40, 4, 9, 2).unwrap();
        let config = SolverConfig::vertical(eps(1, 1)).unwrap().with_budget(100_000);
        let (seed, log) = solved_log(&t, &lists, &config, 5);
        assert!(log.side.is_empty() && log.resumes.is_empty() && log.erased.is_empty());
        assert!(!log.to_json().contains("Side"));
        assert_eq!(decode_verified(&log, &t, &lists, &config).unwrap(), seed);
    }

    #[test]
    fn round_trip_on_random_trees() {
        for trial in 0..30u64 {
            let n = 5 + (trial as usize * 13) % 60;
            let t = RootedTree::generate(TreeModel::Random { n, max_degree: 2 + trial as usize % 4 }, trial).unwrap();
            let config = if trial % 2 == 0 {
                SolverConfig::vertical(eps(1, 1 + trial % 3)).unwrap()
            } else {
                SolverConfig::full(eps(1, 1), t.max_degree()).unwrap().with_list_size(6)
            }
            .with_budget(200_000);
            let lists = ListAssignment::random(n, config.list_size, config.list_size + 3, trial).unwrap();
            let (seed, log) = solved_log(&t, &lists, &config, trial);
            let text = log.to_json();
            let back = RunLog::from_json(&text).unwrap();
            assert_eq!(back, log);
            assert_eq!(decode(&back, &t, &lists, &config).unwrap(), seed);
        }
    }

    #[test]
    fn partial_runs_round_trip() {
        let t = RootedTree::generate(TreeModel::Random { n: 40, max_degree: 3 }, 4).unwrap();
        let config = SolverConfig::full(eps(3, 2), 3).unwrap().with_list_size(5);
        let lists = ListAssignment::random(40, 5, 5, 4).unwrap();
        let solver = Solver::new(&t, &lists, &config).unwrap();
        let mut squares = 0;
        for s in 0..60u64 {
            let seed = Seed((0..400).map(|i| 1 + ((i * 7 + s * 13 + i * i * s) % 5) as usize).collect());
            let run = solver.run(&seed).unwrap();
            squares += run.outcomes.iter().filter(|o| matches!(o.kind, StepKind::SquareNegative { .. })).count();
            let log = encode(&t, &run, &config).unwrap();
            let consumed = Seed(seed.0[..run.consumed()].to_vec());
            assert_eq!(decode_verified(&log, &t, &lists, &config).unwrap(), consumed);
            if run.status == RunStatus::Completed {
                continue;
            }
        }
        assert!(squares > 0, "square steps should occur");
    }

    #[test]
    fn tampered_logs_are_rejected() {
        let t = RootedTree::generate(TreeModel::Random { n: 30, max_degree: 3 }, 1).unwrap();
        let config = SolverConfig::vertical(eps(1, 1)).unwrap().with_budget(100_000);
        let lists = ListAssignment::random(30, 4, 6, 1).unwrap();
        let (_, log) = solved_log(&t, &lists, &config, 1);
        let mut bad = log.clone();
        bad.walk.push(1);
        assert!(decode_verified(&bad, &t, &lists, &config).is_err());
        let mut bad = log.clone();
        bad.path.pop();
        assert!(decode_verified(&bad, &t, &lists, &config).is_err());
        let mut bad = log.clone();
        bad.annotations[0] = 7;
        assert!(decode_verified(&bad, &t, &lists, &config).is_err());
        let mut bad = log.clone();
        bad.path[0] = 999;
        assert!(decode_verified(&bad, &t, &lists, &config).is_err());
    }

    proptest! {
        #[test]
        fn expansion_is_invertible(deltas in proptest::collection::vec(0usize..4, 0..40), start in 1usize..4) {
            let mut walk = vec![start];
            for d in deltas {
                let h = *walk.last().unwrap();
                walk.push((h + 1).saturating_sub(d).max(1));
            }
            let e = expand_walk(&walk).unwrap();
            prop_assert!(e.steps.len() <= 2 * (walk.len() - 1) + start);
            prop_assert_eq!(e.steps.iter().filter(|&&s| s == 1).count(), walk.len() - 1);
            prop_assert_eq!(e.collapse().unwrap(), walk);
        }
    }
}
