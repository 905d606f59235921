//! Exhaustive solvers used as oracles.
//!
//! Matchings: dynamic program over vertex subsets, branching on the lowest
//! vertex of the subset (`n <= 20`). Covers: depth-first enumeration of all
//! edge subsets (`|E| <= 24`), plus a vertex-subset program for the subset
//! variant of the diluted cover.

use crate::error::{Error, Result};
use crate::wgraph::WeightedGraph;

pub const MAX_DP_VERTICES: usize = 20;
pub const MAX_ENUM_EDGES: usize = 24;

fn check_dp(g: &WeightedGraph) -> Result<()> {
    if g.n() > MAX_DP_VERTICES {
        return Err(Error::TooLarge { what: "vertices", got: g.n(), cap: MAX_DP_VERTICES });
    }
    Ok(())
}

fn check_enum(g: &WeightedGraph) -> Result<()> {
    if g.edge_count() > MAX_ENUM_EDGES {
        return Err(Error::TooLarge { what: "edges", got: g.edge_count(), cap: MAX_ENUM_EDGES });
    }
    Ok(())
}

fn adjacency(g: &WeightedGraph) -> Vec<Vec<(usize, f64)>> {
    (0..g.n()).map(|v| g.neighbors(v).collect()).collect()
}

/// `f[mask]` = maximum weight of a matching inside the vertex set `mask`.
pub fn mwm_table(g: &WeightedGraph) -> Result<Vec<f64>> {
    check_dp(g)?;
    let adj = adjacency(g);
    let mut f = vec![0.0f64; 1 << g.n()];
    for mask in 1usize..f.len() {
        let i = mask.trailing_zeros() as usize;
        let rest = mask & !(1 << i);
        let mut best = f[rest];
        for &(j, w) in &adj[i] {
            if rest >> j & 1 == 1 {
                best = best.max(w + f[rest & !(1 << j)]);
            }
        }
        f[mask] = best;
    }
    Ok(f)
}

/// `f[mask]` = minimum λ-diluted matching cost of the vertex set `mask`.
pub fn dmm_table(g: &WeightedGraph, lambda: f64) -> Result<Vec<f64>> {
    check_dp(g)?;
    let half = lambda / 2.0;
    let adj = adjacency(g);
    let mut f = vec![0.0f64; 1 << g.n()];
    for mask in 1usize..f.len() {
        let i = mask.trailing_zeros() as usize;
        let rest = mask & !(1 << i);
        let mut best = half + f[rest];
        for &(j, w) in &adj[i] {
            if rest >> j & 1 == 1 {
                best = best.min(w + f[rest & !(1 << j)]);
            }
        }
        f[mask] = best;
    }
    Ok(f)
}

/// `f[S]` = `EC_λ(G, S)`, the cheapest collection of edges of `G` plus a
/// penalty `λ/2` per vertex of `S` left uncovered. Edges may leave `S`.
///
/// The lowest vertex `i` of `S` is either uncovered, or covered by some edge
/// `(i, j)`; in the latter case the rest of the collection covers
/// `S - {i, j}` at least as well as an optimal collection for that set.
pub fn ec_subset_table(g: &WeightedGraph, lambda: f64) -> Result<Vec<f64>> {
    check_dp(g)?;
    let half = lambda / 2.0;
    let adj = adjacency(g);
    let mut f = vec![0.0f64; 1 << g.n()];
    for mask in 1usize..f.len() {
        let i = mask.trailing_zeros() as usize;
        let rest = mask & !(1 << i);
        let mut best = half + f[rest];
        for &(j, w) in &adj[i] {
            best = best.min(w + f[rest & !(1 << j)]);
        }
        f[mask] = best;
    }
    Ok(f)
}

/// Minimum over all edge subsets of `Σ w + penalty · #(uncovered vertices of
/// S)` for each `S` in `subsets`. `penalty = ∞` demands full coverage of `S`.
pub fn cover_enumerate(g: &WeightedGraph, penalty: f64, subsets: &[u32]) -> Result<Vec<f64>> {
    check_enum(g)?;
    if g.n() > 32 {
        return Err(Error::TooLarge { what: "vertices", got: g.n(), cap: 32 });
    }
    let edges: Vec<(usize, usize, f64)> = g.edges().iter().map(|e| (e.u, e.v, e.w)).collect();
    let mut best = vec![f64::INFINITY; subsets.len()];
    enumerate(&edges, 0, 0.0, full_mask(g.n()), penalty, subsets, &mut best);
    Ok(best)
}

fn enumerate(
    edges: &[(usize, usize, f64)],
    k: usize,
    sum: f64,
    uncovered: u32,
    penalty: f64,
    subsets: &[u32],
    best: &mut [f64],
) {
    if k == edges.len() {
        for (b, &s) in best.iter_mut().zip(subsets) {
            let miss = (uncovered & s).count_ones();
            let cost = if miss == 0 { sum } else { sum + penalty * miss as f64 };
            if cost < *b {
                *b = cost;
            }
        }
        return;
    }
    enumerate(edges, k + 1, sum, uncovered, penalty, subsets, best);
    let (u, v, w) = edges[k];
    let covered = uncovered & !(1 << u) & !(1 << v);
    enumerate(edges, k + 1, sum + w, covered, penalty, subsets, best);
}

pub fn mwm(g: &WeightedGraph) -> Result<f64> {
    Ok(*mwm_table(g)?.last().unwrap())
}

pub fn dmm(g: &WeightedGraph, lambda: f64) -> Result<f64> {
    Ok(*dmm_table(g, lambda)?.last().unwrap())
}

fn full_mask(n: usize) -> u32 {
    if n == 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

pub fn edge_cover(g: &WeightedGraph) -> Result<f64> {
    Ok(cover_enumerate(g, f64::INFINITY, &[full_mask(g.n())])?[0])
}

pub fn diluted_edge_cover(g: &WeightedGraph, lambda: f64) -> Result<f64> {
    Ok(cover_enumerate(g, lambda / 2.0, &[full_mask(g.n())])?[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wgraph::{sample_er_graph, WeightDist};

    #[test]
    fn hand_cases() {
        let tri = WeightedGraph::new(3, [(0, 1, 1.0), (1, 2, 2.0), (0, 2, 3.0)]).unwrap();
        assert_eq!(edge_cover(&tri).unwrap(), 3.0);
        assert_eq!(mwm(&tri).unwrap(), 3.0);
        assert_eq!(mwm(&WeightedGraph::empty(4)).unwrap(), 0.0);
        let one = WeightedGraph::new(2, [(0, 1, 10.0)]).unwrap();
        assert_eq!(dmm(&one, 4.0).unwrap(), 4.0);
        assert_eq!(edge_cover(&WeightedGraph::empty(2)).unwrap(), f64::INFINITY);
    }

    #[test]
    fn caps() {
        let g = sample_er_graph(21, 0.0, WeightDist::Exp1, 1).unwrap();
        assert!(matches!(mwm(&g), Err(Error::TooLarge { .. })));
        let g = sample_er_graph(10, 1.0, WeightDist::Exp1, 1).unwrap();
        assert!(matches!(edge_cover(&g), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn subset_program_matches_enumeration() {
        for s in 0..150u64 {
            let n = 3 + (s % 6) as usize;
            let g = sample_er_graph(n, 0.5, WeightDist::Exp1, s).unwrap();
            if g.edge_count() > 16 {
                continue;
            }
            let lambda = [0.5, 2.0, 8.0][(s % 3) as usize];
            let table = ec_subset_table(&g, lambda).unwrap();
            let subsets: Vec<u32> = (0..1u32 << n).collect();
            let direct = cover_enumerate(&g, lambda / 2.0, &subsets).unwrap();
            for (a, b) in table.iter().zip(&direct) {
                assert!((a - b).abs() <= 1e-12, "seed {s}: {a} vs {b}");
            }
        }
    }
}
