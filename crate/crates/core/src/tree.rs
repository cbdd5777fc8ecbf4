//! Rooted, planar-embedded trees.
//!
//! Vertices are renumbered to preorder at construction time, so the root is
//! always `0`, every parent precedes its children, and the descendants of a
//! vertex form the contiguous interval `v..subtree_end(v)`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::ops::Range;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Preorder index of a vertex.
pub type VertexId = usize;

/// A color from some palette.
pub type Color = u32;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TreeError {
    #[error("edges contain a cycle")]
    CycleDetected,
    #[error("vertex {0} is not connected to the root")]
    DisconnectedInput(usize),
    #[error("vertex {0} has more than one parent")]
    DuplicateChild(usize),
    #[error("unknown vertex {0}")]
    UnknownVertex(usize),
    #[error("path of length {len} requested from a vertex of depth {depth}")]
    PathTooLong { len: usize, depth: usize },
    #[error("infeasible generator parameters: {0}")]
    InfeasibleParameters(String),
    #[error("malformed tree file: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedTree {
    parent: Vec<Option<VertexId>>,
    children: Vec<Vec<VertexId>>,
    depth: Vec<usize>,
    subtree_end: Vec<VertexId>,
    /// 1-based position of each vertex on its parent's child list.
    child_pos: Vec<usize>,
    /// Original label of each preorder vertex.
    labels: Vec<usize>,
}

impl RootedTree {
    /// Builds a tree on vertices `0..n` from `(parent, child)` pairs.
    ///
    /// Child order is the order in which edges appear. The result is
    /// renumbered to preorder; [`RootedTree::label`] maps back.
    pub fn build(n: usize, root: usize, edges: &[(usize, usize)]) -> Result<Self, TreeError> {
        if n == 0 || root >= n {
            return Err(TreeError::UnknownVertex(root));
        }
        let mut parent_of: Vec<Option<usize>> = vec![None; n];
        let mut kids: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(p, c) in edges {
            if p >= n {
                return Err(TreeError::UnknownVertex(p));
            }
            if c >= n {
                return Err(TreeError::UnknownVertex(c));
            }
            if p == c || c == root {
                return Err(TreeError::CycleDetected);
            }
            if parent_of[c].is_some() {
                return Err(TreeError::DuplicateChild(c));
            }
            parent_of[c] = Some(p);
            kids[p].push(c);
        }
        if let Some(v) = (0..n).find(|&v| v != root && parent_of[v].is_none()) {
            return Err(TreeError::DisconnectedInput(v));
        }

        // Every non-root vertex has exactly one parent, so anything the
        // traversal misses sits on a cycle.
        let mut order = Vec::with_capacity(n);
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            order.push(v);
            stack.extend(kids[v].iter().rev().copied());
        }
        if order.len() != n {
            return Err(TreeError::CycleDetected);
        }

        let mut new_id = vec![0usize; n];
        for (i, &old) in order.iter().enumerate() {
            new_id[old] = i;
        }
        let mut parent = vec![None; n];
        let mut children = vec![Vec::new(); n];
        for (i, &old) in order.iter().enumerate() {
            parent[i] = parent_of[old].map(|p| new_id[p]);
            children[i] = kids[old].iter().map(|&c| new_id[c]).collect();
        }
        Ok(Self::from_preorder_parts(parent, children, order))
    }

    fn from_preorder_parts(
        parent: Vec<Option<VertexId>>,
        children: Vec<Vec<VertexId>>,
        labels: Vec<usize>,
    ) -> Self {
        let n = parent.len();
        let mut depth = vec![1usize; n];
        let mut child_pos = vec![0usize; n];
        for v in 0..n {
            for (i, &c) in children[v].iter().enumerate() {
                depth[c] = depth[v] + 1;
                child_pos[c] = i + 1;
            }
        }
        let mut subtree_end: Vec<VertexId> = (1..=n).collect();
        for v in (1..n).rev() {
            let p = parent[v].expect("non-root vertex has a parent");
            subtree_end[p] = subtree_end[p].max(subtree_end[v]);
        }
        RootedTree {
            parent,
            children,
            depth,
            subtree_end,
            child_pos,
            labels,
        }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn root(&self) -> VertexId {
        0
    }

    pub fn parent(&self, v: VertexId) -> Option<VertexId> {
        self.parent[v]
    }

    pub fn children(&self, v: VertexId) -> &[VertexId] {
        &self.children[v]
    }

    pub fn first_child(&self, v: VertexId) -> Option<VertexId> {
        self.children[v].first().copied()
    }

    /// The child of `v` following `u` in the embedding.
    pub fn next_child(&self, v: VertexId, u: VertexId) -> Option<VertexId> {
        if self.parent[u] != Some(v) {
            return None;
        }
        self.children[v].get(self.child_pos[u]).copied()
    }

    /// Number of vertices on the path from `v` to the root (the root has depth 1).
    pub fn depth(&self, v: VertexId) -> usize {
        self.depth[v]
    }

    /// 1-based position of `v` among its parent's children (0 for the root).
    pub fn child_position(&self, v: VertexId) -> usize {
        self.child_pos[v]
    }

    /// Exclusive end of the preorder interval covered by `v`'s subtree.
    pub fn subtree_end(&self, v: VertexId) -> VertexId {
        self.subtree_end[v]
    }

    pub fn label(&self, v: VertexId) -> usize {
        self.labels[v]
    }

    /// Inverse of [`RootedTree::label`].
    pub fn label_map(&self) -> HashMap<usize, VertexId> {
        self.labels.iter().enumerate().map(|(v, &l)| (l, v)).collect()
    }

    /// `u` is a descendant of `v` (every vertex is a descendant of itself).
    pub fn is_descendant(&self, u: VertexId, v: VertexId) -> bool {
        v <= u && u < self.subtree_end[v]
    }

    /// The set `v↓` as a preorder interval.
    pub fn descendants(&self, v: VertexId) -> Result<Range<VertexId>, TreeError> {
        self.check(v)?;
        Ok(v..self.subtree_end[v])
    }

    /// `(v, parent(v), ...)` of exactly `len` vertices.
    pub fn upward_path(&self, v: VertexId, len: usize) -> Result<Vec<VertexId>, TreeError> {
        self.check(v)?;
        if len > self.depth[v] {
            return Err(TreeError::PathTooLong {
                len,
                depth: self.depth[v],
            });
        }
        Ok(self.ancestors(v).take(len).collect())
    }

    /// `v` followed by all its ancestors up to the root.
    pub fn ancestors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        std::iter::successors(Some(v), move |&u| self.parent[u])
    }

    /// Ancestor of `v` lying `up` edges above it.
    pub fn ancestor_at(&self, v: VertexId, up: usize) -> Option<VertexId> {
        self.ancestors(v).nth(up)
    }

    /// Vertices of the simple path from `a` to `b`, both included.
    pub fn path_between(&self, a: VertexId, b: VertexId) -> Vec<VertexId> {
        let (mut x, mut y) = (a, b);
        let mut left = Vec::new();
        let mut right = Vec::new();
        while self.depth[x] > self.depth[y] {
            left.push(x);
            x = self.parent[x].unwrap();
        }
        while self.depth[y] > self.depth[x] {
            right.push(y);
            y = self.parent[y].unwrap();
        }
        while x != y {
            left.push(x);
            right.push(y);
            x = self.parent[x].unwrap();
            y = self.parent[y].unwrap();
        }
        left.push(x);
        left.extend(right.into_iter().rev());
        left
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.children[v].len() + usize::from(self.parent[v].is_some())
    }

    /// Maximum number of neighbours of any vertex.
    pub fn max_degree(&self) -> usize {
        (0..self.len()).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn height(&self) -> usize {
        self.depth.iter().copied().max().unwrap_or(0)
    }

    pub fn leaves(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.len()).filter(|&v| self.children[v].is_empty())
    }

    fn check(&self, v: VertexId) -> Result<(), TreeError> {
        if v < self.len() {
            Ok(())
        } else {
            Err(TreeError::UnknownVertex(v))
        }
    }

    pub fn to_file(&self) -> TreeFile {
        let mut edges = Vec::with_capacity(self.len().saturating_sub(1));
        for v in 0..self.len() {
            for &c in &self.children[v] {
                edges.push([self.labels[v], self.labels[c]]);
            }
        }
        TreeFile {
            n: self.len(),
            root: self.labels[0],
            edges,
        }
    }

    pub fn from_file(file: &TreeFile) -> Result<Self, TreeError> {
        let edges: Vec<(usize, usize)> = file.edges.iter().map(|e| (e[0], e[1])).collect();
        Self::build(file.n, file.root, &edges)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("tree file serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, TreeError> {
        let file: TreeFile =
            serde_json::from_str(text).map_err(|e| TreeError::Parse(e.to_string()))?;
        Self::from_file(&file)
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph T {\n");
        let file = self.to_file();
        if file.edges.is_empty() {
            let _ = writeln!(out, "  {};", file.root);
        }
        for [p, c] in file.edges {
            let _ = writeln!(out, "  {p} -> {c};");
        }
        out.push_str("}\n");
        out
    }

    /// Parses the subset of DOT emitted by [`RootedTree::to_dot`]: numeric
    /// node ids and `a -> b` edges. The root is the vertex without a parent.
    pub fn from_dot(text: &str) -> Result<Self, TreeError> {
        let body = text
            .find('{')
            .and_then(|s| text.rfind('}').map(|e| &text[s + 1..e]))
            .ok_or_else(|| TreeError::Parse("missing digraph body".into()))?;
        let parse_id = |s: &str| {
            s.trim()
                .trim_matches('"')
                .parse::<usize>()
                .map_err(|_| TreeError::Parse(format!("bad vertex id {s:?}")))
        };
        let mut edges = Vec::new();
        let mut max_id = None::<usize>;
        for stmt in body.split([';', '\n']) {
            let stmt = stmt.trim();
            if stmt.is_empty() {
                continue;
            }
            if let Some((a, b)) = stmt.split_once("->") {
                let (a, b) = (parse_id(a)?, parse_id(b)?);
                max_id = max_id.max(Some(a.max(b)));
                edges.push((a, b));
            } else {
                max_id = max_id.max(Some(parse_id(stmt)?));
            }
        }
        let n = max_id.map_or(0, |m| m + 1);
        let mut has_parent = vec![false; n];
        for &(_, c) in &edges {
            has_parent[c] = true;
        }
        let root = (0..n)
            .find(|&v| !has_parent[v])
            .ok_or(TreeError::CycleDetected)?;
        Self::build(n, root, &edges)
    }

    pub fn generate(model: TreeModel, rng_seed: u64) -> Result<Self, TreeError> {
        match model {
            TreeModel::Path { n } => {
                if n == 0 {
                    return Err(TreeError::InfeasibleParameters("n must be at least 1".into()));
                }
                let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
                Self::build(n, 0, &edges)
            }
            TreeModel::Complete { arity, height } => {
                if height == 0 || arity == 0 {
                    return Err(TreeError::InfeasibleParameters(
                        "arity and height must be at least 1".into(),
                    ));
                }
                let mut edges = Vec::new();
                let mut level = vec![0usize];
                let mut next_id = 1usize;
                for _ in 1..height {
                    let mut next_level = Vec::with_capacity(level.len() * arity);
                    for &p in &level {
                        for _ in 0..arity {
                            edges.push((p, next_id));
                            next_level.push(next_id);
                            next_id += 1;
                        }
                    }
                    level = next_level;
                }
                Self::build(next_id, 0, &edges)
            }
            TreeModel::Random { n, max_degree } => {
                if n == 0 {
                    return Err(TreeError::InfeasibleParameters("n must be at least 1".into()));
                }
                if n > 1 && max_degree < 2 {
                    return Err(TreeError::InfeasibleParameters(format!(
                        "degree cap {max_degree} admits no tree on {n} vertices"
                    )));
                }
                let cap = max_degree.saturating_sub(1);
                let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
                let mut open: Vec<usize> = vec![0];
                let mut child_count = vec![0usize; n];
                let mut edges = Vec::with_capacity(n - 1);
                for v in 1..n {
                    let i = rng.gen_range(0..open.len());
                    let p = open[i];
                    edges.push((p, v));
                    child_count[p] += 1;
                    if child_count[p] >= cap {
                        open.swap_remove(i);
                    }
                    if cap > 0 {
                        open.push(v);
                    }
                }
                Self::build(n, 0, &edges)
            }
        }
    }
}

/// Interchange format: `{"n":.., "root":.., "edges":[[parent, child], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeFile {
    pub n: usize,
    pub root: usize,
    pub edges: Vec<[usize; 2]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum TreeModel {
    Path { n: usize },
    /// `height` counts levels, so height 1 is a single vertex.
    Complete { arity: usize, height: usize },
    /// Each new vertex attaches to a uniformly random vertex that still has
    /// fewer than `max_degree - 1` children.
    Random { n: usize, max_degree: usize },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ListError {
    #[error("expected {expected} lists, found {found}")]
    WrongCount { expected: usize, found: usize },
    #[error("list of vertex {vertex} has {found} colors, expected {expected}")]
    WrongSize {
        vertex: usize,
        expected: usize,
        found: usize,
    },
    #[error("list of vertex {0} repeats a color")]
    RepeatedColor(usize),
    #[error("palette of {palette} colors cannot fill lists of size {size}")]
    PaletteTooSmall { palette: usize, size: usize },
    #[error("lists must hold at least one color")]
    Empty,
}

/// Per-vertex color lists of a common size, indexed by preorder vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ListAssignment {
    lists: Vec<Vec<Color>>,
    size: usize,
}

impl ListAssignment {
    pub fn new(lists: Vec<Vec<Color>>) -> Result<Self, ListError> {
        let size = lists.first().map_or(0, Vec::len);
        if size == 0 {
            return Err(ListError::Empty);
        }
        for (v, list) in lists.iter().enumerate() {
            if list.len() != size {
                return Err(ListError::WrongSize {
                    vertex: v,
                    expected: size,
                    found: list.len(),
                });
            }
            let mut sorted = list.clone();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(ListError::RepeatedColor(v));
            }
        }
        Ok(ListAssignment { lists, size })
    }

    /// The same list at every vertex.
    pub fn uniform(n: usize, list: Vec<Color>) -> Result<Self, ListError> {
        Self::new(vec![list; n])
    }

    /// Lists of `size` distinct colors drawn uniformly from `0..palette`.
    pub fn random(n: usize, size: usize, palette: usize, rng_seed: u64) -> Result<Self, ListError> {
        if size == 0 {
            return Err(ListError::Empty);
        }
        if palette < size {
            return Err(ListError::PaletteTooSmall { palette, size });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        let lists = (0..n)
            .map(|_| {
                index::sample(&mut rng, palette, size)
                    .into_iter()
                    .map(|c| c as Color)
                    .collect()
            })
            .collect();
        Self::new(lists)
    }

    /// Reorders lists given by original vertex label into preorder.
    pub fn for_tree(tree: &RootedTree, by_label: Vec<Vec<Color>>) -> Result<Self, ListError> {
        if by_label.len() != tree.len() {
            return Err(ListError::WrongCount {
                expected: tree.len(),
                found: by_label.len(),
            });
        }
        let mut by_label: Vec<Option<Vec<Color>>> = by_label.into_iter().map(Some).collect();
        let lists = (0..tree.len())
            .map(|v| by_label[tree.label(v)].take().unwrap())
            .collect();
        Self::new(lists)
    }

    /// Lists in original-label order, the inverse of [`ListAssignment::for_tree`].
    pub fn by_label(&self, tree: &RootedTree) -> Vec<Vec<Color>> {
        let mut out = vec![Vec::new(); self.lists.len()];
        for (v, list) in self.lists.iter().enumerate() {
            out[tree.label(v)] = list.clone();
        }
        out
    }

    pub fn len(&self) -> usize {
        self.lists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lists.is_empty()
    }

    pub fn list_size(&self) -> usize {
        self.size
    }

    pub fn list(&self, v: VertexId) -> &[Color] {
        &self.lists[v]
    }

    /// The `n`-th color of `L(v)`, 1-based.
    pub fn nth(&self, v: VertexId, n: usize) -> Option<Color> {
        n.checked_sub(1).and_then(|i| self.lists[v].get(i)).copied()
    }

    /// 1-based index of `color` in `L(v)`.
    pub fn index_of(&self, v: VertexId, color: Color) -> Option<usize> {
        self.lists[v].iter().position(|&c| c == color).map(|i| i + 1)
    }
}
