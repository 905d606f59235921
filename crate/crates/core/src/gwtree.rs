//! Poisson Galton–Watson trees with i.i.d. edge weights, tilted trees and
//! depth truncation.
//!
//! Trees live in a flat arena in breadth-first order: `parent[i] < i`, the
//! parent sequence is nondecreasing, and the children of a node occupy a
//! contiguous index range. Truncation to depth `j` is therefore a prefix.

use std::fmt::Write as _;
use std::ops::Range;

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{invalid, Error, Result};
use crate::seed::{self, counter_uniform, derive_seed, tag};
use crate::wgraph::{WeightDist, WeightedGraph};

pub const DEFAULT_NODE_CAP: usize = 10_000_000;

const NO_PARENT: usize = usize::MAX;

#[derive(Debug, Clone, PartialEq)]
pub struct RootedTree {
    parent: Vec<usize>,
    weight: Vec<f64>,
    depth: Vec<usize>,
    child_start: Vec<usize>,
    child_end: Vec<usize>,
    level_end: Vec<usize>,
}

impl RootedTree {
    pub fn single() -> Self {
        Self::from_bfs(vec![NO_PARENT], vec![0.0]).expect("single node is a valid tree")
    }

    /// Builds a tree from a breadth-first parent array. `parents[0]` is
    /// ignored (the root); `weights[i]` is the weight of the edge from `i` to
    /// its parent.
    pub fn from_bfs(mut parents: Vec<usize>, mut weights: Vec<f64>) -> Result<Self> {
        let n = parents.len();
        if n == 0 || weights.len() != n {
            return Err(invalid("tree", "parent and weight arrays must be nonempty and of equal length"));
        }
        parents[0] = NO_PARENT;
        weights[0] = 0.0;
        for i in 1..n {
            let p = parents[i];
            if p >= i || (i > 1 && p < parents[i - 1]) {
                return Err(invalid("tree", format!("node {i} has parent {p}; not breadth-first order")));
            }
            let w = weights[i];
            if !(w >= 0.0) || !w.is_finite() {
                return Err(invalid("tree", format!("node {i} has edge weight {w}")));
            }
        }
        let mut depth = vec![0usize; n];
        let mut child_start = vec![0usize; n];
        let mut child_end = vec![0usize; n];
        let mut cursor = 1usize;
        for v in 0..n {
            child_start[v] = cursor;
            while cursor < n && parents[cursor] == v {
                depth[cursor] = depth[v] + 1;
                cursor += 1;
            }
            child_end[v] = cursor;
        }
        for i in 1..n {
            if depth[i] < depth[i - 1] {
                return Err(invalid("tree", "depths must be nondecreasing in breadth-first order"));
            }
        }
        let max_depth = depth[n - 1];
        let mut level_end = vec![0usize; max_depth + 1];
        for &d in &depth {
            level_end[d] += 1;
        }
        for d in 1..=max_depth {
            level_end[d] += level_end[d - 1];
        }
        Ok(RootedTree { parent: parents, weight: weights, depth, child_start, child_end, level_end })
    }

    /// Builds a tree from arbitrary child lists rooted at `root`, relabelling
    /// nodes in breadth-first order. Returns the tree and, for every arena
    /// index, the original label.
    pub fn from_child_lists(children: &[Vec<(usize, f64)>], root: usize) -> Result<(Self, Vec<usize>)> {
        if root >= children.len() {
            return Err(invalid("root", format!("{root} out of range")));
        }
        let mut seen = vec![false; children.len()];
        let mut order = vec![root];
        let mut parents = vec![NO_PARENT];
        let mut weights = vec![0.0];
        seen[root] = true;
        let mut i = 0;
        while i < order.len() {
            for &(c, w) in &children[order[i]] {
                if c >= children.len() || seen[c] {
                    return Err(invalid("tree", format!("node {c} reached twice or out of range")));
                }
                seen[c] = true;
                order.push(c);
                parents.push(i);
                weights.push(w);
            }
            i += 1;
        }
        Ok((Self::from_bfs(parents, weights)?, order))
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn max_depth(&self) -> usize {
        self.level_end.len() - 1
    }

    pub fn depth(&self, i: usize) -> usize {
        self.depth[i]
    }

    pub fn parent(&self, i: usize) -> Option<usize> {
        (i > 0).then(|| self.parent[i])
    }

    pub fn parent_weight(&self, i: usize) -> Option<f64> {
        (i > 0).then(|| self.weight[i])
    }

    pub fn children(&self, i: usize) -> Range<usize> {
        self.child_start[i]..self.child_end[i]
    }

    pub fn is_leaf(&self, i: usize) -> bool {
        self.child_start[i] == self.child_end[i]
    }

    pub fn root_degree(&self) -> usize {
        self.children(0).len()
    }

    /// Number of nodes at depth at most `d`.
    pub fn count_to_depth(&self, d: usize) -> usize {
        self.level_end[d.min(self.max_depth())]
    }

    /// The subtree of nodes at depth at most `j` (a prefix of the arena).
    pub fn truncate_to_depth(&self, j: usize) -> Self {
        if j >= self.max_depth() {
            return self.clone();
        }
        let m = self.level_end[j];
        Self::from_bfs(self.parent[..m].to_vec(), self.weight[..m].to_vec())
            .expect("prefix of a breadth-first tree is a tree")
    }

    /// The tree as a graph on arena labels.
    pub fn to_graph(&self) -> WeightedGraph {
        WeightedGraph::new(self.len(), (1..self.len()).map(|i| (self.parent[i], i, self.weight[i])))
            .expect("tree edges form a simple graph")
    }

    /// Parenthesized preorder text: a node is `(` followed by its children
    /// as `weight:node`, separated by spaces, and `)`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        enum Step {
            Open(usize),
            Close,
        }
        let mut stack = vec![Step::Open(0)];
        while let Some(step) = stack.pop() {
            match step {
                Step::Open(v) => {
                    if v != 0 {
                        if !s.ends_with('(') {
                            s.push(' ');
                        }
                        write!(s, "{:.16e}:", self.weight[v]).unwrap();
                    }
                    s.push('(');
                    stack.push(Step::Close);
                    for c in self.children(v).rev() {
                        stack.push(Step::Open(c));
                    }
                }
                Step::Close => s.push(')'),
            }
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let err = |msg: String| Error::Parse { line: 1, msg };
        let bytes = text.trim().as_bytes();
        let mut children: Vec<Vec<(usize, f64)>> = Vec::new();
        let mut stack: Vec<usize> = Vec::new();
        let mut pending: Option<f64> = None;
        let mut pos = 0;
        let mut closed_root = false;
        while pos < bytes.len() {
            match bytes[pos] {
                b'(' => {
                    if closed_root {
                        return Err(err(format!("trailing input at byte {pos}")));
                    }
                    let id = children.len();
                    children.push(Vec::new());
                    match stack.last() {
                        Some(&p) => {
                            let w = pending.take().ok_or_else(|| err(format!("child without weight at byte {pos}")))?;
                            children[p].push((id, w));
                        }
                        None if id != 0 => return Err(err("more than one root".into())),
                        None => {}
                    }
                    stack.push(id);
                    pos += 1;
                }
                b')' => {
                    stack.pop().ok_or_else(|| err(format!("unbalanced `)` at byte {pos}")))?;
                    if pending.is_some() {
                        return Err(err(format!("weight without child before byte {pos}")));
                    }
                    closed_root = stack.is_empty();
                    pos += 1;
                }
                b' ' | b'\t' | b'\n' | b'\r' => pos += 1,
                _ => {
                    let start = pos;
                    while pos < bytes.len() && bytes[pos] != b':' {
                        pos += 1;
                    }
                    let tok = std::str::from_utf8(&bytes[start..pos]).unwrap_or("");
                    let w = tok.trim().parse::<f64>().map_err(|_| err(format!("bad weight `{tok}`")))?;
                    if pos == bytes.len() || stack.is_empty() {
                        return Err(err(format!("dangling weight `{tok}`")));
                    }
                    pending = Some(w);
                    pos += 1;
                }
            }
        }
        if !closed_root || !stack.is_empty() {
            return Err(err("unbalanced parentheses".into()));
        }
        Ok(Self::from_child_lists(&children, 0)?.0)
    }
}

/// `T(k, λ, F_w)` with the default node cap.
pub fn sample_gw_tree(k: usize, lambda: f64, dist: WeightDist, seed: u64) -> Result<RootedTree> {
    sample_gw_tree_capped(k, lambda, dist, seed, DEFAULT_NODE_CAP)
}

/// `T(k, λ, F_w)`: every node above depth `k` has Poisson(λ) children, each
/// edge weight drawn from `dist`. Offspring counts are read from one stream
/// in breadth-first order; the weight of node `i` is the `i`-th counter draw
/// of a separate stream, so truncations of one sample are nested.
pub fn sample_gw_tree_capped(
    k: usize,
    lambda: f64,
    dist: WeightDist,
    seed: u64,
    cap: usize,
) -> Result<RootedTree> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(invalid("lambda", format!("must be positive and finite, got {lambda}")));
    }
    let poisson = Poisson::new(lambda).map_err(|e| invalid("lambda", e.to_string()))?;
    let mut rng = seed::stream(seed, tag::TREE_OFFSPRING);
    let wkey = derive_seed(seed, tag::TREE_WEIGHTS);
    let mut parents = vec![NO_PARENT];
    let mut weights = vec![0.0];
    let mut level = 0..1usize;
    for _ in 0..k {
        let next_start = parents.len();
        for v in level.clone() {
            let c = poisson.sample(&mut rng) as usize;
            if parents.len() + c > cap {
                return Err(Error::TreeSizeCap { cap });
            }
            for _ in 0..c {
                let i = parents.len() as u64;
                parents.push(v);
                weights.push(dist.quantile(counter_uniform(wkey, i)));
            }
        }
        level = next_start..parents.len();
        if level.is_empty() {
            break;
        }
    }
    RootedTree::from_bfs(parents, weights)
}

/// `T̃(k, λ, F_w)`: a depth-`k` tree whose root gets one extra child `∅′`
/// carrying an independent depth-`(k-1)` tree through a bridge edge.
#[derive(Debug, Clone, PartialEq)]
pub struct TiltedTree {
    pub combined: RootedTree,
    pub base: RootedTree,
    pub attached: RootedTree,
    pub bridge_weight: f64,
    /// Index of `∅′` in `combined`; always the last child of the root.
    pub attached_root: usize,
    /// For each node of `combined`, whether it belongs to the attached part.
    pub from_attached: Vec<bool>,
}

impl TiltedTree {
    /// Merges `base` and `attached` level by level, base nodes first within
    /// each level.
    pub fn assemble(base: RootedTree, attached: RootedTree, bridge_weight: f64) -> Result<Self> {
        let depth = base.max_depth().max(attached.max_depth() + 1);
        let mut parents = vec![NO_PARENT];
        let mut weights = vec![0.0];
        let mut from_attached = vec![false];
        let mut base_idx = vec![0usize; base.len()];
        let mut att_idx = vec![0usize; attached.len()];
        let mut attached_root = 0;
        let level = |t: &RootedTree, d: usize| -> Range<usize> {
            if d > t.max_depth() {
                return 0..0;
            }
            let start = if d == 0 { 0 } else { t.level_end[d - 1] };
            start..t.level_end[d]
        };
        for d in 1..=depth {
            for i in level(&base, d) {
                base_idx[i] = parents.len();
                parents.push(base_idx[base.parent[i]]);
                weights.push(base.weight[i]);
                from_attached.push(false);
            }
            for i in level(&attached, d - 1) {
                att_idx[i] = parents.len();
                if i == 0 {
                    attached_root = parents.len();
                    parents.push(0);
                    weights.push(bridge_weight);
                } else {
                    parents.push(att_idx[attached.parent[i]]);
                    weights.push(attached.weight[i]);
                }
                from_attached.push(true);
            }
        }
        let combined = RootedTree::from_bfs(parents, weights)?;
        Ok(TiltedTree { combined, base, attached, bridge_weight, attached_root, from_attached })
    }

    /// `T̃_j` for `1 <= j`: the base truncated at `j` and the attached tree at
    /// `j - 1`.
    pub fn truncate_to_depth(&self, j: usize) -> Result<Self> {
        if j == 0 {
            return Err(invalid("k", "a tilted tree has depth at least 1"));
        }
        Self::assemble(self.base.truncate_to_depth(j), self.attached.truncate_to_depth(j - 1), self.bridge_weight)
    }

    /// `combined` with the subtree of `∅′` removed.
    pub fn without_attached(&self) -> RootedTree {
        let mut map = vec![usize::MAX; self.combined.len()];
        let mut parents = Vec::new();
        let mut weights = Vec::new();
        for i in 0..self.combined.len() {
            if self.from_attached[i] {
                continue;
            }
            map[i] = parents.len();
            parents.push(if i == 0 { NO_PARENT } else { map[self.combined.parent[i]] });
            weights.push(self.combined.weight[i]);
        }
        RootedTree::from_bfs(parents, weights).expect("removing a subtree keeps breadth-first order")
    }
}

pub fn sample_tilted_tree(k: usize, lambda: f64, dist: WeightDist, seed: u64) -> Result<TiltedTree> {
    if k == 0 {
        return Err(invalid("k", "a tilted tree needs k >= 1"));
    }
    let base = sample_gw_tree(k, lambda, dist, derive_seed(seed, tag::TILT_BASE))?;
    let attached = sample_gw_tree(k - 1, lambda, dist, derive_seed(seed, tag::TILT_ATTACHED))?;
    let bridge = dist.quantile(seed::stream(seed, tag::TILT_BRIDGE).random::<f64>());
    if base.len() + attached.len() > DEFAULT_NODE_CAP {
        return Err(Error::TreeSizeCap { cap: DEFAULT_NODE_CAP });
    }
    TiltedTree::assemble(base, attached, bridge)
}
