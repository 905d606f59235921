//! Weighted simple graphs, sparse Erdős–Rényi samplers, depth-k
//! neighborhoods and single-edge resampling.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::gwtree::RootedTree;
use crate::seed::{self, counter_uniform, derive_seed, tag};

/// Edge-weight distributions used by the samplers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightDist {
    /// Exponential with mean one.
    Exp1,
    /// `n·Exp(1)` conditioned on `[0, λ]`.
    TruncatedScaledExp { n: f64, lambda: f64 },
    /// Uniform on `[0, λ]`.
    Uniform { lambda: f64 },
}

impl WeightDist {
    pub fn truncated_scaled_exp(n: usize, lambda: f64) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n", "must be at least 1"));
        }
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(invalid("lambda", format!("must be positive and finite, got {lambda}")));
        }
        Ok(WeightDist::TruncatedScaledExp { n: n as f64, lambda })
    }

    pub fn uniform(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(invalid("lambda", format!("must be positive and finite, got {lambda}")));
        }
        Ok(WeightDist::Uniform { lambda })
    }

    /// Closed support `[lo, hi]`.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            WeightDist::Exp1 => (0.0, f64::INFINITY),
            WeightDist::TruncatedScaledExp { lambda, .. } | WeightDist::Uniform { lambda } => {
                (0.0, lambda)
            }
        }
    }

    /// Inverse CDF applied to `u ∈ [0, 1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        match *self {
            WeightDist::Exp1 => -(-u).ln_1p(),
            WeightDist::TruncatedScaledExp { n, lambda } => {
                let mass = -(-lambda / n).exp_m1();
                (-n * (-u * mass).ln_1p()).min(lambda)
            }
            WeightDist::Uniform { lambda } => lambda * u,
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x <= lo {
            return 0.0;
        }
        if x >= hi {
            return 1.0;
        }
        match *self {
            WeightDist::Exp1 => -(-x).exp_m1(),
            WeightDist::TruncatedScaledExp { n, lambda } => {
                (-x / n).exp_m1() / (-lambda / n).exp_m1()
            }
            WeightDist::Uniform { lambda } => x / lambda,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(rng.random::<f64>())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

/// Finite simple graph on vertices `0..n` with nonnegative edge weights.
///
/// Edges are stored once with `u < v`, sorted; adjacency is kept in CSR form.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<Edge>,
    offsets: Vec<usize>,
    adj: Vec<(usize, usize)>,
}

impl WeightedGraph {
    pub fn empty(n: usize) -> Self {
        Self::from_sorted_unchecked(n, Vec::new())
    }

    /// Builds a graph from `(u, v, w)` triples, rejecting self-loops, parallel
    /// edges, out-of-range endpoints and negative or non-finite weights.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let mut list = Vec::new();
        for (a, b, w) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidGraph(format!("edge ({a},{b}) out of range for n = {n}")));
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop at {a}")));
            }
            if !(w >= 0.0) || !w.is_finite() {
                return Err(Error::InvalidGraph(format!("edge ({a},{b}) has weight {w}")));
            }
            let (u, v) = if a < b { (a, b) } else { (b, a) };
            list.push(Edge { u, v, w });
        }
        list.sort_by_key(|x| (x.u, x.v));
        if let Some(pair) = list.windows(2).find(|p| (p[0].u, p[0].v) == (p[1].u, p[1].v)) {
            return Err(Error::InvalidGraph(format!(
                "parallel edge ({},{})",
                pair[0].u, pair[0].v
            )));
        }
        Ok(Self::from_sorted_unchecked(n, list))
    }

    fn from_sorted_unchecked(n: usize, edges: Vec<Edge>) -> Self {
        let mut deg = vec![0usize; n + 1];
        for e in &edges {
            deg[e.u] += 1;
            deg[e.v] += 1;
        }
        let mut offsets = vec![0usize; n + 1];
        for i in 0..n {
            offsets[i + 1] = offsets[i] + deg[i];
        }
        let mut fill = offsets.clone();
        let mut adj = vec![(0usize, 0usize); 2 * edges.len()];
        for (k, e) in edges.iter().enumerate() {
            adj[fill[e.u]] = (e.v, k);
            fill[e.u] += 1;
            adj[fill[e.v]] = (e.u, k);
            fill[e.v] += 1;
        }
        WeightedGraph { n, edges, offsets, adj }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    /// `(neighbor, weight)` pairs of `v`.
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.adj[self.offsets[v]..self.offsets[v + 1]]
            .iter()
            .map(move |&(u, k)| (u, self.edges[k].w))
    }

    /// `(neighbor, edge index)` pairs of `v`.
    pub fn incident(&self, v: usize) -> &[(usize, usize)] {
        &self.adj[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        let (u, v) = if a < b { (a, b) } else { (b, a) };
        self.edges.binary_search_by(|e| (e.u, e.v).cmp(&(u, v))).ok()
    }

    pub fn weight(&self, a: usize, b: usize) -> Option<f64> {
        self.edge_index(a, b).map(|k| self.edges[k].w)
    }

    /// Smallest incident weight, `None` for isolated vertices.
    pub fn min_incident_weight(&self, v: usize) -> Option<f64> {
        self.neighbors(v).map(|(_, w)| w).reduce(f64::min)
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.w).sum()
    }

    /// Same structure, weights replaced by `f(w)`; edges mapped to a negative
    /// or non-finite value are an error.
    pub fn map_weights(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.n, self.edges.iter().map(|e| (e.u, e.v, f(e.w))))
    }

    /// Keeps only the edges for which `keep` holds.
    pub fn filter_edges(&self, keep: impl Fn(&Edge) -> bool) -> Self {
        Self::from_sorted_unchecked(self.n, self.edges.iter().copied().filter(|e| keep(e)).collect())
    }

    /// Rounds every weight to the nearest multiple of `2^-bits`.
    ///
    /// With weights on a coarse dyadic grid, sums and differences of a few
    /// thousand weights are exact in `f64`, so independently computed optimal
    /// values can be compared without tolerance.
    pub fn quantized(&self, bits: i32) -> Self {
        let scale = 2f64.powi(bits);
        let edges = self
            .edges
            .iter()
            .map(|e| Edge { w: (e.w * scale).round() / scale, ..*e })
            .collect();
        Self::from_sorted_unchecked(self.n, edges)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "n {}", self.n).unwrap();
        for e in &self.edges {
            writeln!(s, "{} {} {:.16e}", e.u, e.v, e.w).unwrap();
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "missing header".into() })?;
        let n = header
            .strip_prefix("n ")
            .and_then(|t| t.trim().parse::<usize>().ok())
            .ok_or(Error::Parse { line: hline, msg: format!("expected `n <count>`, got `{header}`") })?;
        let mut edges = Vec::new();
        for (line, l) in lines {
            let parts: Vec<&str> = l.split_whitespace().collect();
            let bad = || Error::Parse { line, msg: format!("expected `u v w`, got `{l}`") };
            if parts.len() != 3 {
                return Err(bad());
            }
            let u = parts[0].parse::<usize>().map_err(|_| bad())?;
            let v = parts[1].parse::<usize>().map_err(|_| bad())?;
            let w = parts[2].parse::<f64>().map_err(|_| bad())?;
            edges.push((u, v, w));
        }
        Self::new(n, edges).map_err(|e| Error::Parse { line: hline, msg: e.to_string() })
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid("p", format!("must lie in [0, 1], got {p}")));
    }
    Ok(())
}

/// `G(n, p)` with i.i.d. weights from `dist`.
///
/// Present pairs are found by geometric skipping over the linearized pair
/// index `v(v-1)/2 + u` (`u < v`), so the cost is `O(n + m)`. The weight of
/// pair `t` is the `t`-th counter draw of the weight stream, which makes
/// weights independent of the structure stream.
pub fn sample_er_graph(n: usize, p: f64, dist: WeightDist, seed: u64) -> Result<WeightedGraph> {
    if n == 0 {
        return Err(invalid("n", "must be at least 1"));
    }
    check_p(p)?;
    let pairs = present_pairs(n, p, seed);
    let wkey = derive_seed(seed, tag::EDGE_WEIGHTS);
    let edges = pairs
        .into_iter()
        .map(|(u, v)| {
            let t = (v as u64) * (v as u64 - 1) / 2 + u as u64;
            Edge { u, v, w: dist.quantile(counter_uniform(wkey, t)) }
        })
        .collect::<Vec<_>>();
    let mut edges = edges;
    edges.sort_by_key(|x| (x.u, x.v));
    Ok(WeightedGraph::from_sorted_unchecked(n, edges))
}

fn present_pairs(n: usize, p: f64, seed: u64) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    if p == 0.0 || n < 2 {
        return out;
    }
    if p == 1.0 {
        for v in 1..n {
            for u in 0..v {
                out.push((u, v));
            }
        }
        return out;
    }
    let mut rng = seed::stream(seed, tag::EDGE_STRUCTURE);
    let log_q = (-p).ln_1p();
    let total = (n as f64) * (n as f64);
    let mut v: usize = 1;
    let mut w: i64 = -1;
    loop {
        let r: f64 = rng.random();
        let skip = ((-r).ln_1p() / log_q).floor().min(total);
        w += 1 + skip as i64;
        while v < n && w >= v as i64 {
            w -= v as i64;
            v += 1;
        }
        if v >= n {
            break;
        }
        out.push((w as usize, v));
    }
    out
}

/// The sparse representation of the complete graph with `n·Exp(1)` weights
/// restricted to edges of weight at most `λ`: `G(n, 1 - e^{-λ/n})` with
/// `n·Exp(1)` weights conditioned on `[0, λ]`.
pub fn sample_kn_lambda(n: usize, lambda: f64, seed: u64) -> Result<WeightedGraph> {
    let dist = WeightDist::truncated_scaled_exp(n, lambda)?;
    let p = -(-lambda / n as f64).exp_m1();
    let g = sample_er_graph(n, p, dist, seed)?;
    assert!(
        g.edges().iter().all(|e| (0.0..=lambda).contains(&e.w)),
        "K_n(lambda) weight outside [0, lambda]"
    );
    Ok(g)
}

/// Complete graph on `n` vertices with i.i.d. `n·Exp(1)` weights.
pub fn sample_complete_scaled_exp(n: usize, seed: u64) -> Result<WeightedGraph> {
    if n == 0 {
        return Err(invalid("n", "must be at least 1"));
    }
    let g = sample_er_graph(n, 1.0, WeightDist::Exp1, seed)?;
    g.map_weights(|w| w * n as f64)
}

/// The depth-k neighborhood `B_k(v, G)`: union of all paths of length at
/// most `k` starting at the root.
#[derive(Debug, Clone)]
pub struct Neighborhood {
    pub root: usize,
    pub depth: usize,
    /// Subgraph on the original vertex labels.
    pub subgraph: WeightedGraph,
    /// Vertices of the neighborhood in breadth-first order (root first).
    pub vertices: Vec<usize>,
    pub is_tree: bool,
    /// Present iff `is_tree`; node `i` of the tree is `vertices[i]`.
    pub as_tree: Option<RootedTree>,
}

impl Neighborhood {
    /// Tree node holding graph vertex `v`, if the neighborhood is a tree
    /// containing it.
    pub fn node_of(&self, v: usize) -> Option<usize> {
        self.as_tree.as_ref()?;
        self.vertices.iter().position(|&x| x == v)
    }
}

pub fn neighborhood(g: &WeightedGraph, root: usize, k: usize) -> Result<Neighborhood> {
    if root >= g.n() {
        return Err(invalid("v", format!("vertex {root} out of range for n = {}", g.n())));
    }
    let mut dist: HashMap<usize, usize> = HashMap::new();
    let mut order = vec![root];
    let mut bfs_parent = vec![(usize::MAX, 0.0)];
    dist.insert(root, 0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let x = order[i];
        let dx = dist[&x];
        if dx == k {
            continue;
        }
        for (y, w) in g.neighbors(x) {
            if let std::collections::hash_map::Entry::Vacant(slot) = dist.entry(y) {
                slot.insert(dx + 1);
                order.push(y);
                bfs_parent.push((i, w));
                queue.push_back(order.len() - 1);
            }
        }
    }
    // An edge lies on a path of length <= k from the root iff its nearer
    // endpoint is at distance < k.
    let mut sub = Vec::new();
    for &x in &order {
        let dx = dist[&x];
        for (y, w) in g.neighbors(x) {
            if x < y {
                if let Some(&dy) = dist.get(&y) {
                    if dx.min(dy) < k {
                        sub.push(Edge { u: x, v: y, w });
                    }
                }
            }
        }
    }
    sub.sort_by_key(|a| (a.u, a.v));
    let is_tree = sub.len() + 1 == order.len();
    let as_tree = if is_tree {
        let parents: Vec<usize> = bfs_parent.iter().map(|p| p.0).collect();
        let weights: Vec<f64> = bfs_parent.iter().map(|p| p.1).collect();
        Some(RootedTree::from_bfs(parents, weights)?)
    } else {
        None
    };
    Ok(Neighborhood {
        root,
        depth: k,
        subgraph: WeightedGraph::from_sorted_unchecked(g.n(), sub),
        vertices: order,
        is_tree,
        as_tree,
    })
}

/// Presence bit and weight of one vertex pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeState {
    pub present: bool,
    pub weight: f64,
}

/// An edge `e = (v, u)` with its current state and an independent resample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeEnv {
    /// `(v, u)`; `v` is the root side used by the local approximations.
    pub edge: (usize, usize),
    pub primary: EdgeState,
    pub resample: EdgeState,
}

impl EdgeEnv {
    pub fn new(edge: (usize, usize), primary: EdgeState, resample: EdgeState) -> Self {
        EdgeEnv { edge, primary, resample }
    }

    /// Primary pair read from `g` (an absent edge carries a latent weight
    /// drawn from `dist`); resample pair drawn fresh with presence
    /// probability `p`. The two pairs come from disjoint streams.
    pub fn sample(
        g: &WeightedGraph,
        edge: (usize, usize),
        p: f64,
        dist: WeightDist,
        seed: u64,
    ) -> Result<Self> {
        check_p(p)?;
        let (v, u) = edge;
        if v == u || v >= g.n() || u >= g.n() {
            return Err(invalid("edge", format!("({v},{u}) is not a vertex pair of the graph")));
        }
        let mut prim = seed::stream(seed, tag::ENV_PRIMARY);
        let primary = match g.weight(v, u) {
            Some(w) => EdgeState { present: true, weight: w },
            None => EdgeState { present: false, weight: dist.sample(&mut prim) },
        };
        let mut res = seed::stream(seed, tag::ENV_RESAMPLE);
        let present = res.random::<f64>() < p;
        let resample = EdgeState { present, weight: dist.sample(&mut res) };
        Ok(EdgeEnv { edge, primary, resample })
    }

    /// The same edge with the two pairs swapped.
    pub fn swapped(&self) -> Self {
        EdgeEnv { edge: self.edge, primary: self.resample, resample: self.primary }
    }
}

/// `G^e`: `g` with edge `e` present iff the resample bit is set, at the
/// resampled weight. All other edges are untouched.
pub fn resample_edge(g: &WeightedGraph, env: &EdgeEnv) -> Result<WeightedGraph> {
    let (a, b) = env.edge;
    if a == b || a >= g.n() || b >= g.n() {
        return Err(invalid("edge", format!("({a},{b}) is not a vertex pair of the graph")));
    }
    let (u, v) = if a < b { (a, b) } else { (b, a) };
    let mut edges: Vec<Edge> = g.edges().iter().copied().filter(|e| (e.u, e.v) != (u, v)).collect();
    if env.resample.present {
        let w = env.resample.weight;
        if !(w >= 0.0) || !w.is_finite() {
            return Err(Error::InvalidGraph(format!("resampled weight {w}")));
        }
        let pos = edges.partition_point(|e| (e.u, e.v) < (u, v));
        edges.insert(pos, Edge { u, v, w });
    }
    Ok(WeightedGraph::from_sorted_unchecked(g.n(), edges))
}

/// `G - U`: removes every edge touching `U`. Vertex labels are kept, so the
/// deleted vertices remain as isolated labels; see [`compact_without`].
pub fn delete_vertices(g: &WeightedGraph, removed: &[usize]) -> WeightedGraph {
    let mut gone = vec![false; g.n()];
    for &x in removed {
        if x < g.n() {
            gone[x] = true;
        }
    }
    g.filter_edges(|e| !gone[e.u] && !gone[e.v])
}

/// `G - U` on dense labels `0..n-|U|`. Returns the graph and, for each new
/// label, the original vertex.
pub fn compact_without(g: &WeightedGraph, removed: &[usize]) -> (WeightedGraph, Vec<usize>) {
    let mut gone = vec![false; g.n()];
    for &x in removed {
        if x < g.n() {
            gone[x] = true;
        }
    }
    let mut new_label = vec![usize::MAX; g.n()];
    let mut old = Vec::new();
    for x in 0..g.n() {
        if !gone[x] {
            new_label[x] = old.len();
            old.push(x);
        }
    }
    let edges = g
        .edges()
        .iter()
        .filter(|e| !gone[e.u] && !gone[e.v])
        .map(|e| Edge { u: new_label[e.u], v: new_label[e.v], w: e.w })
        .collect();
    (WeightedGraph::from_sorted_unchecked(old.len(), edges), old)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> WeightedGraph {
        WeightedGraph::new(3, [(0, 1, 1.5), (1, 2, 2.5)]).unwrap()
    }

    fn triangle() -> WeightedGraph {
        WeightedGraph::new(3, [(0, 1, 1.0), (1, 2, 2.0), (0, 2, 3.0)]).unwrap()
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(WeightedGraph::new(2, [(0, 0, 1.0)]).is_err());
        assert!(WeightedGraph::new(2, [(0, 1, -1.0)]).is_err());
        assert!(WeightedGraph::new(2, [(0, 1, 1.0), (1, 0, 2.0)]).is_err());
        assert!(WeightedGraph::new(2, [(0, 2, 1.0)]).is_err());
    }

    #[test]
    fn symmetric_lookup() {
        let g = triangle();
        assert_eq!(g.weight(2, 0), Some(3.0));
        assert_eq!(g.weight(0, 2), Some(3.0));
    }

    #[test]
    fn er_parameter_checks() {
        assert!(sample_er_graph(0, 0.5, WeightDist::Exp1, 1).is_err());
        assert!(sample_er_graph(5, 1.5, WeightDist::Exp1, 1).is_err());
        assert!(sample_er_graph(5, -0.1, WeightDist::Exp1, 1).is_err());
        assert!(sample_kn_lambda(5, 0.0, 1).is_err());
    }

    #[test]
    fn p_zero_and_one() {
        let g = sample_er_graph(5, 0.0, WeightDist::Exp1, 3).unwrap();
        assert_eq!(g.edge_count(), 0);
        let lam = 2.0;
        let g = sample_er_graph(3, 1.0, WeightDist::uniform(lam).unwrap(), 3).unwrap();
        assert_eq!(g.edge_count(), 3);
        assert!(g.edges().iter().all(|e| (0.0..=lam).contains(&e.w)));
    }

    #[test]
    fn kn_lambda_two_vertices_large_lambda() {
        let g = sample_kn_lambda(2, 200.0, 11).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert!((0.0..=200.0).contains(&g.edges()[0].w));
    }

    #[test]
    fn edge_count_concentrates() {
        let n = 10_000usize;
        let p = 2.0 / n as f64;
        let g = sample_er_graph(n, p, WeightDist::Exp1, 2024).unwrap();
        let pairs = (n * (n - 1) / 2) as f64;
        let mean = pairs * p;
        let sd = (pairs * p * (1.0 - p)).sqrt();
        assert!((g.edge_count() as f64 - mean).abs() < 4.0 * sd, "{} vs {mean}", g.edge_count());
    }

    #[test]
    fn determinism() {
        let a = sample_kn_lambda(300, 3.0, 77).unwrap();
        let b = sample_kn_lambda(300, 3.0, 77).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_text(), b.to_text());
    }

    #[test]
    fn neighborhood_examples() {
        let g = triangle();
        let b0 = neighborhood(&g, 1, 0).unwrap();
        assert!(b0.is_tree);
        assert_eq!(b0.vertices, vec![1]);
        assert_eq!(b0.as_tree.unwrap().len(), 1);
        assert!(!neighborhood(&g, 0, 2).unwrap().is_tree);
        // The edge between the two depth-1 vertices is not on a path of length 1.
        assert!(neighborhood(&g, 0, 1).unwrap().is_tree);

        let p = path3();
        let b = neighborhood(&p, 0, 1).unwrap();
        assert!(b.is_tree);
        assert_eq!(b.subgraph.edge_count(), 1);
        assert_eq!(b.subgraph.weight(0, 1), Some(1.5));
        assert_eq!(b.vertices, vec![0, 1]);
        let t = b.as_tree.unwrap();
        assert_eq!(t.parent_weight(1), Some(1.5));
    }

    #[test]
    fn neighborhoods_are_nested() {
        let g = sample_er_graph(200, 3.0 / 200.0, WeightDist::Exp1, 5).unwrap();
        for v in [0, 17, 150] {
            for k in 0..5 {
                let a = neighborhood(&g, v, k).unwrap();
                let b = neighborhood(&g, v, k + 1).unwrap();
                for e in a.subgraph.edges() {
                    assert_eq!(b.subgraph.weight(e.u, e.v), Some(e.w));
                }
            }
        }
    }

    #[test]
    fn resample_cases() {
        let g = path3();
        let absent = EdgeState { present: false, weight: 0.3 };
        let env = EdgeEnv::new((0, 2), absent, absent);
        assert_eq!(resample_edge(&g, &env).unwrap(), g);

        let env = EdgeEnv::new((0, 1), EdgeState { present: true, weight: 1.5 }, absent);
        let h = resample_edge(&g, &env).unwrap();
        assert_eq!(h.weight(0, 1), None);
        assert_eq!(h.edge_count(), 1);

        let env = EdgeEnv::new((2, 0), absent, EdgeState { present: true, weight: 7.0 });
        let h = resample_edge(&g, &env).unwrap();
        assert_eq!(h.weight(0, 2), Some(7.0));
        assert_eq!(h.weight(0, 1), Some(1.5));
        assert_eq!(h.weight(1, 2), Some(2.5));
    }

    #[test]
    fn deletion() {
        let g = triangle();
        assert_eq!(delete_vertices(&g, &[]), g);
        assert_eq!(delete_vertices(&g, &[0, 1, 2]).edge_count(), 0);
        let star = WeightedGraph::new(4, [(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)]).unwrap();
        let d = delete_vertices(&star, &[0]);
        assert_eq!(d.n(), 4);
        assert_eq!(d.edge_count(), 0);
        let (c, old) = compact_without(&star, &[0]);
        assert_eq!(c.n(), 3);
        assert_eq!(old, vec![1, 2, 3]);
    }

    #[test]
    fn text_round_trip() {
        let g = sample_er_graph(40, 0.2, WeightDist::Exp1, 9).unwrap();
        let back = WeightedGraph::from_text(&g.to_text()).unwrap();
        assert_eq!(g, back);
        assert!(WeightedGraph::from_text("n 3\n0 1\n").is_err());
    }

    #[test]
    fn quantiles_stay_in_support() {
        let d = WeightDist::truncated_scaled_exp(1000, 2.0).unwrap();
        for u in [0.0, 0.5, 1.0 - f64::EPSILON] {
            let x = d.quantile(u);
            assert!((0.0..=2.0).contains(&x));
        }
    }
}
