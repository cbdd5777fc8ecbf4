//! Independent checks: verifiers, exhaustive search and reference solvers.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::power::{contains_power, is_of_form, occurrences, vertical_in_chain, PowerSpec, Rational};
use crate::tree::{Color, ListAssignment, RootedTree, VertexId};

/// Search spaces larger than this are refused by [`exhaustive_choosable`].
pub const SEARCH_LIMIT: f64 = 1e8;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("expected a total coloring of {expected} vertices, got {got}")]
    PartialColoringGiven { expected: usize, got: usize },
    #[error("search space of {list_size}^{n} assignments is too large")]
    SearchSpaceTooLarge { list_size: usize, n: usize },
    #[error("list for position {position} holds {size} colors, at least 4 are needed")]
    ListTooShort { position: usize, size: usize },
    #[error("no square-free sequence found within the budget")]
    BudgetExhausted,
    #[error("lists do not match the tree")]
    ListMismatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathMode {
    Vertical,
    AllSimplePaths,
}

/// A forbidden block on the simple path from `from` to `to`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Violation {
    pub from: VertexId,
    pub to: VertexId,
    /// Offset of the block along the path, counted from `from`.
    pub start: usize,
    pub base: usize,
}

fn check_total(tree: &RootedTree, coloring: &[Color]) -> Result<(), OracleError> {
    if coloring.len() != tree.len() {
        return Err(OracleError::PartialColoringGiven {
            expected: tree.len(),
            got: coloring.len(),
        });
    }
    Ok(())
}

/// Every `x^r` block of a total coloring on the chosen family of paths.
///
/// Vertical blocks are reported once, on the root-to-leaf chain through the
/// first leaf below them. On all simple paths each endpoint pair `a < b`
/// whose path carries a block is reported with its leftmost block.
pub fn verify_coloring(
    tree: &RootedTree,
    coloring: &[Color],
    spec: PowerSpec,
    mode: PathMode,
) -> Result<Vec<Violation>, OracleError> {
    check_total(tree, coloring)?;
    let mut out = Vec::new();
    match mode {
        PathMode::Vertical => {
            let mut seen = HashSet::new();
            for leaf in tree.leaves() {
                let mut chain: Vec<VertexId> = tree.ancestors(leaf).collect();
                chain.reverse();
                let colors: Vec<Color> = chain.iter().map(|&v| coloring[v]).collect();
                for occ in occurrences(&colors, spec) {
                    let bottom = chain[occ.start + occ.len - 1];
                    if seen.insert((bottom, occ.base)) {
                        out.push(Violation {
                            from: tree.root(),
                            to: leaf,
                            start: occ.start,
                            base: occ.base,
                        });
                    }
                }
            }
        }
        PathMode::AllSimplePaths => {
            for a in 0..tree.len() {
                for b in a + 1..tree.len() {
                    let colors: Vec<Color> = tree.path_between(a, b).iter().map(|&v| coloring[v]).collect();
                    if let Some(occ) = contains_power(&colors, spec) {
                        out.push(Violation {
                            from: a,
                            to: b,
                            start: occ.start,
                            base: occ.base,
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub colorable: bool,
    /// Lexicographically first valid coloring in list order, in preorder.
    pub witness: Option<Vec<Color>>,
    pub nodes_explored: u64,
}

/// Backtracking search for a coloring from the lists with no `x^r` block on
/// the chosen paths.
pub fn exhaustive_choosable(
    tree: &RootedTree,
    lists: &ListAssignment,
    spec: PowerSpec,
    mode: PathMode,
) -> Result<Verdict, OracleError> {
    exhaustive_choosable_bounded(tree, lists, spec, mode, SEARCH_LIMIT)
}

pub fn exhaustive_choosable_bounded(
    tree: &RootedTree,
    lists: &ListAssignment,
    spec: PowerSpec,
    mode: PathMode,
    limit: f64,
) -> Result<Verdict, OracleError> {
    if lists.len() != tree.len() {
        return Err(OracleError::ListMismatch);
    }
    let space = (lists.list_size() as f64).powi(tree.len() as i32);
    if space > limit {
        return Err(OracleError::SearchSpaceTooLarge {
            list_size: lists.list_size(),
            n: tree.len(),
        });
    }
    let mut search = Backtrack {
        tree,
        lists,
        spec,
        mode,
        colors: Vec::with_capacity(tree.len()),
        nodes: 0,
    };
    let colorable = search.extend();
    Ok(Verdict {
        colorable,
        witness: colorable.then(|| search.colors.clone()),
        nodes_explored: search.nodes,
    })
}

struct Backtrack<'a> {
    tree: &'a RootedTree,
    lists: &'a ListAssignment,
    spec: PowerSpec,
    mode: PathMode,
    colors: Vec<Color>,
    nodes: u64,
}

impl Backtrack<'_> {
    /// Blocks that involve the newest vertex and no later one.
    fn newest_is_clean(&self) -> bool {
        let v = self.colors.len() - 1;
        match self.mode {
            PathMode::Vertical => {
                let up: Vec<Color> = self.tree.ancestors(v).map(|u| self.colors[u]).collect();
                vertical_in_chain(&up, self.spec).is_none()
            }
            PathMode::AllSimplePaths => (0..v).all(|w| {
                // v is a leaf of the colored part, so it ends every path through it
                let colors: Vec<Color> = self.tree.path_between(v, w).iter().map(|&x| self.colors[x]).collect();
                is_of_form(&colors, self.spec).is_none()
            }),
        }
    }

    fn extend(&mut self) -> bool {
        if self.colors.len() == self.tree.len() {
            return true;
        }
        let v = self.colors.len();
        for &c in self.lists.list(v) {
            self.nodes += 1;
            self.colors.push(c);
            if self.newest_is_clean() && self.extend() {
                return true;
            }
            self.colors.pop();
        }
        false
    }
}

/// The first `length` letters of the fixed point of `a → abc, b → ac, c → b`,
/// with `a, b, c` written as `0, 1, 2`.
pub fn thue_ternary(length: usize) -> Vec<Color> {
    let mut word: Vec<Color> = vec![0];
    while word.len() < length {
        word = word
            .iter()
            .flat_map(|&x| match x {
                0 => &[0, 1, 2][..],
                1 => &[0, 2][..],
                _ => &[1][..],
            })
            .copied()
            .collect();
    }
    word.truncate(length);
    word
}

/// Square-free sequence from lists of size at least 4, built by appending a
/// random color and deleting the second half of any square that appears.
pub fn list_sequence_solve(lists: &[Vec<Color>], rng_seed: u64, budget: u64) -> Result<Vec<Color>, OracleError> {
    if let Some((position, l)) = lists.iter().enumerate().find(|(_, l)| l.len() < 4) {
        return Err(OracleError::ListTooShort { position, size: l.len() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut seq: Vec<Color> = Vec::with_capacity(lists.len());
    let mut steps = 0;
    while seq.len() < lists.len() {
        if steps >= budget {
            return Err(OracleError::BudgetExhausted);
        }
        steps += 1;
        let list = &lists[seq.len()];
        seq.push(list[rng.gen_range(0..list.len())]);
        if let Some(l) = suffix_square(&seq) {
            seq.truncate(seq.len() - l);
        }
    }
    Ok(seq)
}

/// Half-length of the shortest square ending the sequence.
fn suffix_square(seq: &[Color]) -> Option<usize> {
    let n = seq.len();
    (1..=n / 2).find(|&l| (0..l).all(|i| seq[n - 2 * l + i] == seq[n - l + i]))
}

/// Checks that each `x^{2+ε}` block on a simple path has a vertical part on
/// one side of its tip carrying an `x^{1+ε/2}` block.
pub fn check_reduction(tree: &RootedTree, coloring: &[Color], epsilon: Rational) -> Result<bool, OracleError> {
    Ok(reduction_counterexample(tree, coloring, epsilon)?.is_none())
}

pub fn reduction_counterexample(
    tree: &RootedTree,
    coloring: &[Color],
    epsilon: Rational,
) -> Result<Option<Violation>, OracleError> {
    check_total(tree, coloring)?;
    let two = Rational::from_integer(2);
    let long = PowerSpec::new(two + epsilon).expect("exponent above one");
    let short = PowerSpec::from_epsilon(epsilon / two).expect("positive epsilon");
    for a in 0..tree.len() {
        for b in a + 1..tree.len() {
            let path = tree.path_between(a, b);
            let colors: Vec<Color> = path.iter().map(|&v| coloring[v]).collect();
            for occ in occurrences(&colors, long) {
                let block = &path[occ.start..occ.start + occ.len];
                let tip = (0..block.len())
                    .min_by_key(|&i| tree.depth(block[i]))
                    .expect("blocks are nonempty");
                let left: Vec<Color> = block[..=tip].iter().map(|&v| coloring[v]).collect();
                let right: Vec<Color> = block[tip..].iter().map(|&v| coloring[v]).collect();
                if contains_power(&left, short).is_none() && contains_power(&right, short).is_none() {
                    return Ok(Some(Violation {
                        from: a,
                        to: b,
                        start: occ.start,
                        base: occ.base,
                    }));
                }
            }
        }
    }
    Ok(None)
}
