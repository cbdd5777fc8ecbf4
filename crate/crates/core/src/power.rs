//! Fractional powers `x^r` in sequences and on tree paths.
//!
//! A block of the form `x^r` with a base of length `l` has exactly
//! `l + ⌈l·(r-1)⌉` symbols and period `l`. All ceilings are computed on exact
//! rationals.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::coloring::PartialColoring;
use crate::tree::{Color, RootedTree, VertexId};

pub type Rational = Ratio<u64>;

/// Default length bound for [`brute_force_power_free`].
pub const BRUTE_FORCE_LIMIT: usize = 64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PowerError {
    #[error("exponent {0} must exceed 1")]
    ExponentTooSmall(Rational),
    #[error("cannot parse exponent {0:?}; expected p/q")]
    BadRational(String),
    #[error("vertex {0} or one of its ancestors is uncolored")]
    UncoloredAncestor(VertexId),
    #[error("vertex {0} is not the current vertex of the coloring")]
    NotCurrent(VertexId),
    #[error("sequence of length {len} exceeds the brute-force bound {limit}")]
    InputTooLarge { len: usize, limit: usize },
}

/// Parses an exact fraction `p/q` (or an integer `p`). Decimals are rejected.
pub fn parse_rational(s: &str) -> Result<Rational, PowerError> {
    let bad = || PowerError::BadRational(s.to_string());
    let (p, q) = match s.trim().split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s.trim(), "1"),
    };
    let p: u64 = p.parse().map_err(|_| bad())?;
    let q: u64 = q.parse().map_err(|_| bad())?;
    if q == 0 {
        return Err(bad());
    }
    Ok(Rational::new(p, q))
}

/// The exponent `r > 1` of an `x^r` pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PowerSpec {
    r: Rational,
}

impl PowerSpec {
    pub fn new(r: Rational) -> Result<Self, PowerError> {
        if r <= Rational::one() {
            return Err(PowerError::ExponentTooSmall(r));
        }
        Ok(PowerSpec { r })
    }

    pub fn ratio(num: u64, den: u64) -> Result<Self, PowerError> {
        if den == 0 {
            return Err(PowerError::BadRational(format!("{num}/{den}")));
        }
        Self::new(Rational::new(num, den))
    }

    /// `x^{1+ε}`.
    pub fn from_epsilon(epsilon: Rational) -> Result<Self, PowerError> {
        Self::new(Rational::one() + epsilon)
    }

    pub fn square() -> Self {
        PowerSpec {
            r: Rational::from_integer(2),
        }
    }

    pub fn exponent(&self) -> Rational {
        self.r
    }

    pub fn epsilon(&self) -> Rational {
        self.r - Rational::one()
    }

    /// `m = ⌈l·ε⌉`, the number of repeated symbols after a base of length `l`.
    pub fn repeat_len(&self, l: usize) -> usize {
        let eps = self.epsilon();
        let num = l as u64 * eps.numer();
        num.div_ceil(*eps.denom()) as usize
    }

    /// `⌊m/ε⌋`.
    pub fn floor_div(&self, m: usize) -> usize {
        let eps = self.epsilon();
        ((m as u64 * eps.denom()) / eps.numer()) as usize
    }

    /// Total length `l + ⌈l·ε⌉` of an occurrence with base `l`.
    pub fn span(&self, l: usize) -> usize {
        l + self.repeat_len(l)
    }
}

impl fmt::Display for PowerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.r.numer(), self.r.denom())
    }
}

impl FromStr for PowerSpec {
    type Err = PowerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::new(parse_rational(s)?)
    }
}

impl Serialize for PowerSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PowerSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Literal block test: `seq` splits into `⌈r⌉` blocks, all but the last equal
/// to a base `x_1..x_n` and the last equal to its prefix of length
/// `⌈frac(r)·n⌉`. For integer `r` the sequence is `r` full copies.
/// Returns the base length.
pub fn is_of_form<T: PartialEq>(seq: &[T], spec: PowerSpec) -> Option<usize> {
    let r = spec.exponent();
    let blocks = r.ceil().to_integer() as usize;
    let frac = r.fract();
    let len = seq.len();
    for n in 1..=len {
        let last = if frac.is_zero() {
            n
        } else {
            (frac * Rational::from_integer(n as u64)).ceil().to_integer() as usize
        };
        if (blocks - 1) * n + last != len {
            continue;
        }
        let base = &seq[..n];
        let full_ok = (1..blocks - 1).all(|b| &seq[b * n..(b + 1) * n] == base);
        let tail_ok = seq[(blocks - 1) * n..] == base[..last];
        return (full_ok && tail_ok).then_some(n);
    }
    None
}

/// A contiguous occurrence of some `x^r` inside a sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Occurrence {
    pub start: usize,
    /// Base length `l`.
    pub base: usize,
    /// Total length `l + ⌈l·ε⌉`.
    pub len: usize,
}

/// Finds an `x^r` block, preferring the smallest start and then the smallest
/// base.
///
/// An occurrence with base `l` is a run of at least `m = ⌈l·ε⌉` consecutive
/// positions `i` with `seq[i] == seq[i + l]`. Any such run contains a
/// position `j ≡ m-1 (mod m)`, so only those positions are probed; the run
/// around a probe is measured with early-exit comparisons.
pub fn contains_power<T: PartialEq>(seq: &[T], spec: PowerSpec) -> Option<Occurrence> {
    let n = seq.len();
    let mut best: Option<Occurrence> = None;
    for l in 1..n {
        let m = spec.repeat_len(l);
        if l + m > n {
            break;
        }
        let limit = n - l;
        let mut j = m - 1;
        while j < limit {
            if let Some(b) = best {
                // a start below b.start needs a probe at most b.start + m - 2
                if j + 1 >= b.start + m {
                    break;
                }
            }
            if seq[j] == seq[j + l] {
                let mut back = 0;
                while back < m && back < j && seq[j - back - 1] == seq[j - back - 1 + l] {
                    back += 1;
                }
                let start = j - back;
                let mut end = j + 1;
                while end < start + m && end < limit && seq[end] == seq[end + l] {
                    end += 1;
                }
                if end - start >= m {
                    if best.is_none_or(|b| start < b.start) {
                        best = Some(Occurrence {
                            start,
                            base: l,
                            len: l + m,
                        });
                    }
                    break;
                }
            }
            j += m;
        }
    }
    best
}

/// Every `(start, base)` occurrence of `x^r`, by base then start.
pub fn occurrences<T: PartialEq>(seq: &[T], spec: PowerSpec) -> Vec<Occurrence> {
    let n = seq.len();
    let mut out = Vec::new();
    let mut run = vec![0usize; n + 1];
    for l in 1..n {
        let m = spec.repeat_len(l);
        if l + m > n {
            break;
        }
        run[n - l] = 0;
        for i in (0..n - l).rev() {
            run[i] = if seq[i] == seq[i + l] { run[i + 1] + 1 } else { 0 };
        }
        out.extend((0..n - l).filter(|&i| run[i] >= m).map(|start| Occurrence {
            start,
            base: l,
            len: l + m,
        }));
    }
    out
}

/// Checks every window against [`is_of_form`]. Cubic; meant as an oracle.
pub fn brute_force_power_free<T: PartialEq>(seq: &[T], spec: PowerSpec) -> Result<bool, PowerError> {
    brute_force_power_free_bounded(seq, spec, BRUTE_FORCE_LIMIT)
}

pub fn brute_force_power_free_bounded<T: PartialEq>(
    seq: &[T],
    spec: PowerSpec,
    limit: usize,
) -> Result<bool, PowerError> {
    if seq.len() > limit {
        return Err(PowerError::InputTooLarge {
            len: seq.len(),
            limit,
        });
    }
    for i in 0..seq.len() {
        for j in i + 1..=seq.len() {
            if is_of_form(&seq[i..j], spec).is_some() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// An `x^r` block on the vertical path going up from the query vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerticalHit {
    /// Base length `l`.
    pub base: usize,
    /// `m = ⌈l·ε⌉`.
    pub repeat: usize,
    /// `(v_{l+m}, ..., v_1)`: the query vertex first, then upward.
    pub vertices: Vec<VertexId>,
}

impl VerticalHit {
    /// `v_{l+1}`, the topmost vertex of the repeated part.
    pub fn erase_root(&self) -> VertexId {
        self.vertices[self.repeat - 1]
    }

    /// Checks `f(v_i) = f(v_{l+i})` for `1 ≤ i ≤ m` and the vertical shape.
    pub fn holds(&self, tree: &RootedTree, coloring: &PartialColoring, spec: PowerSpec) -> bool {
        let (l, m) = (self.base, self.repeat);
        self.vertices.len() == l + m
            && m == spec.repeat_len(l)
            && self.vertices.windows(2).all(|w| tree.parent(w[0]) == Some(w[1]))
            && (0..m).all(|j| {
                coloring.color(self.vertices[j]).is_some()
                    && coloring.color(self.vertices[j]) == coloring.color(self.vertices[j + l])
            })
    }
}

/// An `x^2` block on a simple path starting at the query vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SquareHit {
    /// Half-length `l`.
    pub half: usize,
    /// Index `k` of the tip: the least `i` with the query a descendant of `v_i`.
    pub tip: usize,
    /// `(v_{2l}, ..., v_1)` with `v_{2l}` the query vertex.
    pub vertices: Vec<VertexId>,
}

impl SquareHit {
    /// `v_i` for `1 ≤ i ≤ 2l`.
    pub fn vertex(&self, i: usize) -> VertexId {
        self.vertices[2 * self.half - i]
    }

    pub fn holds(&self, tree: &RootedTree, coloring: &PartialColoring) -> bool {
        let l = self.half;
        if self.vertices.len() != 2 * l || l == 0 || self.tip == 0 || self.tip > 2 * l {
            return false;
        }
        let query = self.vertices[0];
        let colored = (1..=2 * l).all(|i| coloring.is_colored(self.vertex(i)));
        let square = (1..=l).all(|i| coloring.color(self.vertex(i)) == coloring.color(self.vertex(l + i)));
        let adjacent = self.vertices.windows(2).all(|w| {
            tree.parent(w[0]) == Some(w[1]) || tree.parent(w[1]) == Some(w[0])
        });
        let least_tip = (1..=2 * l)
            .find(|&i| tree.is_descendant(query, self.vertex(i)))
            == Some(self.tip);
        colored && square && adjacent && least_tip
    }
}

fn up_colors(
    tree: &RootedTree,
    coloring: &PartialColoring,
    v: VertexId,
) -> Result<(Vec<VertexId>, Vec<Color>), PowerError> {
    if !coloring.is_colored(v) || v >= tree.len() {
        return Err(PowerError::UncoloredAncestor(v));
    }
    let up: Vec<VertexId> = tree.ancestors(v).collect();
    let colors = up.iter().map(|&u| coloring.color(u).unwrap()).collect();
    Ok((up, colors))
}

/// Smallest-base `x^r` block whose deepest vertex is `v`, read upward.
pub fn find_vertical_power(
    tree: &RootedTree,
    coloring: &PartialColoring,
    v: VertexId,
    spec: PowerSpec,
) -> Result<Option<VerticalHit>, PowerError> {
    let (up, c) = up_colors(tree, coloring, v)?;
    Ok(vertical_in_chain(&c, spec).map(|(l, m)| VerticalHit {
        base: l,
        repeat: m,
        vertices: up[..l + m].to_vec(),
    }))
}

/// `c` lists colors from a vertex upward; finds the least `l` with
/// `c[j] == c[j + l]` for all `j < ⌈l·ε⌉`.
pub(crate) fn vertical_in_chain(c: &[Color], spec: PowerSpec) -> Option<(usize, usize)> {
    (1..c.len())
        .map(|l| (l, spec.repeat_len(l)))
        .take_while(|&(l, m)| l + m <= c.len())
        .find(|&(l, m)| (0..m).all(|j| c[j] == c[j + l]))
}

/// Finds a square on a simple path with `v` as an endpoint.
///
/// `v` must be the current vertex, so every other colored vertex precedes it
/// in preorder. Paths climb `a` edges to a tip and then descend into a
/// subtree of the tip's earlier children. Hits are ordered by length, then by
/// `a`, then lexicographically by the child positions of the descent.
pub fn find_square_from(
    tree: &RootedTree,
    coloring: &PartialColoring,
    v: VertexId,
) -> Result<Option<SquareHit>, PowerError> {
    if !coloring.is_colored(v) {
        return Err(PowerError::UncoloredAncestor(v));
    }
    if v != coloring.current() {
        return Err(PowerError::NotCurrent(v));
    }
    let (up, cu) = up_colors(tree, coloring, v)?;
    let depth = up.len();
    let max_len = depth + tree.height() - 1;

    let mut search = Descent {
        tree,
        coloring,
        seq: Vec::with_capacity(max_len),
        path: Vec::with_capacity(max_len),
    };
    for len in (2..=max_len).step_by(2) {
        let l = len / 2;
        for a in 0..depth.min(len) {
            let d = len - a - 1;
            // constraints wholly inside the climb
            if !(0..l).take_while(|&i| i + l <= a).all(|i| cu[i] == cu[i + l]) {
                continue;
            }
            if d == 0 {
                return Ok(Some(SquareHit {
                    half: l,
                    tip: 1,
                    vertices: up[..len].to_vec(),
                }));
            }
            if a == 0 {
                continue;
            }
            let tip = up[a];
            if d > tree.height() - tree.depth(tip) {
                continue;
            }
            search.seq.clear();
            search.seq.extend_from_slice(&cu[..=a]);
            search.path.clear();
            let toward = up[a - 1];
            let found = tree
                .children(tip)
                .iter()
                .take_while(|&&c| c < toward)
                .any(|&c| search.extend(c, l, len));
            if found {
                let mut vertices = up[..=a].to_vec();
                vertices.extend_from_slice(&search.path);
                return Ok(Some(SquareHit {
                    half: l,
                    tip: len - a,
                    vertices,
                }));
            }
        }
    }
    Ok(None)
}

struct Descent<'a> {
    tree: &'a RootedTree,
    coloring: &'a PartialColoring,
    seq: Vec<Color>,
    path: Vec<VertexId>,
}

impl Descent<'_> {
    /// Tries to continue the path through `w`; leaves the successful path in place.
    fn extend(&mut self, w: VertexId, l: usize, len: usize) -> bool {
        let p = self.seq.len();
        let color = self.coloring.color(w).expect("earlier subtrees are colored");
        if p >= l && self.seq[p - l] != color {
            return false;
        }
        self.seq.push(color);
        self.path.push(w);
        if p + 1 == len {
            return true;
        }
        for &c in self.tree.children(w) {
            if self.extend(c, l, len) {
                return true;
            }
        }
        self.seq.pop();
        self.path.pop();
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn spec(p: u64, q: u64) -> PowerSpec {
        PowerSpec::ratio(p, q).unwrap()
    }

    fn b(s: &str) -> Vec<u8> {
        s.bytes().collect()
    }

    /// Earliest (start, base) by exhaustive windows, via the literal block test.
    fn brute_first(seq: &[u8], spec: PowerSpec) -> Option<(usize, usize)> {
        (0..seq.len())
            .flat_map(|i| (i + 1..=seq.len()).map(move |j| (i, j)))
            .filter_map(|(i, j)| is_of_form(&seq[i..j], spec).map(|l| (i, l)))
            .min()
    }

    #[test]
    fn form_examples() {
        assert_eq!(is_of_form(&b("abcdabcdab"), spec(5, 2)), Some(4));
        assert_eq!(is_of_form(&b("aa"), spec(2, 1)), Some(1));
        assert_eq!(is_of_form(&b("abcab"), spec(3, 2)), Some(3));
        assert_eq!(is_of_form(&b("abcbc"), spec(2, 1)), None);
        assert_eq!(is_of_form(&b("aaa"), spec(3, 1)), Some(1));
        assert_eq!(is_of_form(&b("a"), spec(2, 1)), None);
    }

    #[test]
    fn contains_examples() {
        let hit = contains_power(&b("abcbc"), spec(2, 1)).unwrap();
        assert_eq!((hit.start, hit.base), (1, 2));
        assert_eq!(contains_power(&b("abcdefg"), spec(3, 2)), None);
        let hit = contains_power(&b("aabb"), spec(2, 1)).unwrap();
        assert_eq!((hit.start, hit.base), (0, 1));
        assert_eq!(brute_first(&b("aabb"), spec(2, 1)), Some((0, 1)));
    }

    #[test]
    fn brute_force_examples() {
        assert_eq!(brute_force_power_free(&b("aba"), spec(2, 1)), Ok(true));
        assert_eq!(brute_force_power_free(&b("abab"), spec(2, 1)), Ok(false));
        assert_eq!(
            brute_force_power_free(&[0u8; 65], spec(2, 1)),
            Err(PowerError::InputTooLarge { len: 65, limit: 64 })
        );
    }

    #[test]
    fn exponent_arithmetic() {
        let s = spec(3, 2);
        assert_eq!(s.repeat_len(3), 2);
        assert_eq!(s.repeat_len(4), 2);
        assert_eq!(s.floor_div(2), 4);
        assert_eq!(spec(4, 3).repeat_len(3), 1);
        assert_eq!(spec(4, 3).repeat_len(4), 2);
        assert!(PowerSpec::ratio(1, 1).is_err());
        assert_eq!("5/2".parse::<PowerSpec>().unwrap(), spec(5, 2));
        assert!("2.5".parse::<PowerSpec>().is_err());
        assert_eq!(spec(4, 2).to_string(), "2/1");
    }

    #[test]
    fn ternary_agreement_up_to_eight() {
        // the full length-12 sweep lives in the acceptance suite
        for r in [spec(3, 2), spec(2, 1), spec(5, 2), spec(3, 1)] {
            for len in 1..=8u32 {
                for code in 0..3u32.pow(len) {
                    let seq: Vec<u8> = (0..len).map(|i| (code / 3u32.pow(i) % 3) as u8).collect();
                    let fast = contains_power(&seq, r).map(|o| (o.start, o.base));
                    assert_eq!(fast, brute_first(&seq, r), "{seq:?} r={r}");
                }
            }
        }
    }

    fn path_tree(n: usize) -> RootedTree {
        let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        RootedTree::build(n, 0, &edges).unwrap()
    }

    #[test]
    fn vertical_examples() {
        let t = path_tree(4);
        let f = PartialColoring::from_prefix(vec![0, 1, 0, 1]);
        let hit = find_vertical_power(&t, &f, 3, spec(2, 1)).unwrap().unwrap();
        assert_eq!((hit.base, hit.repeat), (2, 2));
        assert_eq!(hit.vertices, vec![3, 2, 1, 0]);
        assert_eq!(hit.erase_root(), 2);

        let t = path_tree(5);
        let f = PartialColoring::from_prefix(vec![0, 1, 2, 0, 1]);
        let hit = find_vertical_power(&t, &f, 4, spec(3, 2)).unwrap().unwrap();
        assert_eq!((hit.base, hit.repeat), (3, 2));
        assert!(hit.holds(&t, &f, spec(3, 2)));
        // exhaustive scan of every base at depth 5: only l = 3 fits
        let chain = [1, 0, 2, 1, 0];
        let bases: Vec<usize> = (1..5)
            .filter(|&l| {
                let m = spec(3, 2).repeat_len(l);
                l + m <= 5 && (0..m).all(|j| chain[j] == chain[j + l])
            })
            .collect();
        assert_eq!(bases, vec![3]);

        let f = PartialColoring::from_prefix(vec![0, 1, 2, 3, 4]);
        assert_eq!(find_vertical_power(&t, &f, 4, spec(3, 2)).unwrap(), None);
        let partial = PartialColoring::from_prefix(vec![0, 1]);
        assert_eq!(
            find_vertical_power(&t, &partial, 3, spec(2, 1)),
            Err(PowerError::UncoloredAncestor(3))
        );
    }

    /// R -> A, A -> {B, C}, B -> D, in preorder R=0 A=1 B=2 D=3 C=4.
    fn forked() -> RootedTree {
        RootedTree::build(5, 0, &[(0, 1), (1, 2), (2, 3), (1, 4)]).unwrap()
    }

    /// Every simple path ending at `v` through colored vertices that spells a
    /// square, as (len, vertices from v).
    fn square_paths_by_enumeration(t: &RootedTree, f: &PartialColoring, v: VertexId) -> Vec<Vec<VertexId>> {
        let mut out = Vec::new();
        for w in 0..f.len() {
            if w == v {
                continue;
            }
            let p = t.path_between(v, w);
            let c: Vec<_> = p.iter().map(|&u| f.color(u).unwrap()).collect();
            if c.len() % 2 == 0 && is_of_form(&c, PowerSpec::square()).is_some() {
                out.push(p);
            }
        }
        out
    }

    #[test]
    fn square_example_with_tip() {
        let t = forked();
        // R=c, A=a, B=b, D=a, C=b
        let f = PartialColoring::from_prefix(vec![2, 0, 1, 0, 1]);
        let hit = find_square_from(&t, &f, 4).unwrap().unwrap();
        assert_eq!(hit.vertices, vec![4, 1, 2, 3]);
        assert_eq!((hit.half, hit.tip), (2, 3));
        assert!(hit.holds(&t, &f));
        assert_eq!(square_paths_by_enumeration(&t, &f, 4), vec![vec![4, 1, 2, 3]]);
    }

    #[test]
    fn vertical_square_has_tip_one() {
        let t = path_tree(4);
        let f = PartialColoring::from_prefix(vec![0, 1, 0, 1]);
        let hit = find_square_from(&t, &f, 3).unwrap().unwrap();
        assert_eq!(hit.vertices, vec![3, 2, 1, 0]);
        assert_eq!((hit.half, hit.tip), (2, 1));
        assert!(hit.holds(&t, &f));
    }

    #[test]
    fn square_requires_frontier() {
        let t = forked();
        let f = PartialColoring::from_prefix(vec![0, 1, 2, 3, 4]);
        assert_eq!(find_square_from(&t, &f, 4).unwrap(), None);
        assert_eq!(find_square_from(&t, &f, 2), Err(PowerError::NotCurrent(2)));
    }

    #[test]
    fn square_search_matches_enumeration_on_random_trees() {
        use crate::tree::TreeModel;
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for trial in 0..300u64 {
            let n = rng.gen_range(1..=14);
            let t = RootedTree::generate(TreeModel::Random { n, max_degree: 4 }, trial).unwrap();
            let colored = rng.gen_range(1..=n);
            let f = PartialColoring::from_prefix((0..colored).map(|_| rng.gen_range(0..3)).collect());
            let v = f.current();
            let expected = square_paths_by_enumeration(&t, &f, v);
            match find_square_from(&t, &f, v).unwrap() {
                None => assert!(expected.is_empty()),
                Some(hit) => {
                    assert!(hit.holds(&t, &f));
                    let shortest = expected.iter().map(Vec::len).min().unwrap();
                    assert_eq!(hit.vertices.len(), shortest);
                    assert!(expected.contains(&hit.vertices));
                }
            }
        }
    }

    proptest! {
        #[test]
        fn vertical_agrees_with_suffix_occurrences(seq in prop::collection::vec(0u32..3, 1..30), p in 3u64..8) {
            let s = spec(p, 2);
            let t = path_tree(seq.len());
            let f = PartialColoring::from_prefix(seq.clone());
            let v = seq.len() - 1;
            let hit = find_vertical_power(&t, &f, v, s).unwrap();
            let suffix = occurrences(&seq, s)
                .into_iter()
                .filter(|o| o.start + o.len == seq.len())
                .map(|o| o.base)
                .min();
            prop_assert_eq!(hit.map(|h| h.base), suffix);
        }

        #[test]
        fn vertical_is_monotone_under_restriction(seq in prop::collection::vec(0u32..3, 2..25), cut in 0usize..25) {
            // on a path the root path of a prefix vertex is itself a prefix
            let s = PowerSpec::square();
            let t = path_tree(seq.len());
            let v = cut % seq.len();
            let full = PartialColoring::from_prefix(seq.clone());
            let all_clear = (0..=v).all(|u| find_vertical_power(&t, &full, u, s).unwrap().is_none());
            if all_clear {
                let restricted = PartialColoring::from_prefix(seq[..=v].to_vec());
                for u in 0..=v {
                    prop_assert!(find_vertical_power(&t, &restricted, u, s).unwrap().is_none());
                }
            }
        }

        #[test]
        fn occurrences_contain_first_hit(seq in prop::collection::vec(0u8..3, 1..40), p in 3u64..7) {
            let s = spec(p, 2);
            let first = contains_power(&seq, s);
            let all = occurrences(&seq, s);
            prop_assert_eq!(first.is_none(), all.is_empty());
            if let Some(o) = first {
                let min = all.iter().map(|o| (o.start, o.base)).min().unwrap();
                prop_assert_eq!((o.start, o.base), min);
            }
            for o in all {
                prop_assert_eq!(is_of_form(&seq[o.start..o.start + o.len], s), Some(o.base));
            }
        }
    }
}
