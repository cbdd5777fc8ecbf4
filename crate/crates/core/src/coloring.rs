use serde::{Deserialize, Serialize};

use crate::tree::{Color, RootedTree, VertexId};

/// A partial coloring `(f, v)`: colors on the preorder prefix `0..=v`, where
/// `v` is the current vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PartialColoring {
    colors: Vec<Color>,
}

impl PartialColoring {
    /// Only the root colored.
    pub fn root(color: Color) -> Self {
        PartialColoring { colors: vec![color] }
    }

    /// Colors of vertices `0..colors.len()` in preorder. Panics on an empty prefix.
    pub fn from_prefix(colors: Vec<Color>) -> Self {
        assert!(!colors.is_empty(), "a partial coloring colors at least the root");
        PartialColoring { colors }
    }

    pub fn current(&self) -> VertexId {
        self.colors.len() - 1
    }

    pub fn color(&self, v: VertexId) -> Option<Color> {
        self.colors.get(v).copied()
    }

    pub fn is_colored(&self, v: VertexId) -> bool {
        v < self.colors.len()
    }

    pub fn colors(&self) -> &[Color] {
        &self.colors
    }

    pub fn into_colors(self) -> Vec<Color> {
        self.colors
    }

    /// Number of colored vertices.
    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn is_total(&self, tree: &RootedTree) -> bool {
        self.colors.len() == tree.len()
    }

    /// Erases `u` and everything after it in preorder, then colors `u`.
    pub(crate) fn recolor(&mut self, u: VertexId, color: Color) {
        self.colors.truncate(u);
        self.colors.push(color);
    }

    pub(crate) fn truncate(&mut self, len: usize) {
        self.colors.truncate(len);
    }

    pub(crate) fn push(&mut self, color: Color) {
        self.colors.push(color);
    }

    /// Colors from the root down to the current vertex.
    pub fn root_path(&self, tree: &RootedTree) -> Vec<Color> {
        let mut path: Vec<Color> = tree
            .ancestors(self.current())
            .map(|u| self.colors[u])
            .collect();
        path.reverse();
        path
    }
}
