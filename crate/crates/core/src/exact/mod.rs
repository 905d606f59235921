//! Exact optimal values for maximum weight matching, λ-diluted minimum
//! matching, edge cover and λ-diluted edge cover.
//!
//! Matching uses the blossom solver on each connected component. The other
//! three problems reduce to it:
//!
//! * diluted matching: `nλ/2 - MWM` under gains `λ - w` on edges with `w < λ`;
//! * edge cover: `Σ μ_v - MWM` under gains `μ_u + μ_v - w`, where `μ_v` is the
//!   cheapest edge at `v` (for the diluted cover, capped at `λ/2`).

pub mod blossom;
pub mod brute;

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::wgraph::WeightedGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Problem {
    Mwm,
    Dmm,
    Ec,
    EcDiluted,
}

impl Problem {
    pub const ALL: [Problem; 4] = [Problem::Mwm, Problem::Dmm, Problem::Ec, Problem::EcDiluted];

    pub fn name(self) -> &'static str {
        match self {
            Problem::Mwm => "MWM",
            Problem::Dmm => "DMM",
            Problem::Ec => "EC",
            Problem::EcDiluted => "ECdiluted",
        }
    }

    pub fn needs_lambda(self) -> bool {
        matches!(self, Problem::Dmm | Problem::EcDiluted)
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Problem {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mwm" => Ok(Problem::Mwm),
            "dmm" => Ok(Problem::Dmm),
            "ec" => Ok(Problem::Ec),
            "ecdiluted" | "ec_lambda" | "ec_diluted" => Ok(Problem::EcDiluted),
            _ => Err(invalid("problem", format!("unknown problem `{s}` (expected MWM, DMM, EC or ECdiluted)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub problem: Problem,
    pub value: f64,
    /// Chosen edges as `(u, v)` with `u < v`, sorted.
    pub chosen_edges: Vec<(usize, usize)>,
    pub lambda: Option<f64>,
}

impl Solution {
    /// The objective recomputed from the certificate.
    pub fn certificate_value(&self, g: &WeightedGraph) -> Result<f64> {
        let mut sum = 0.0;
        let mut hit = vec![0usize; g.n()];
        for &(u, v) in &self.chosen_edges {
            let w = g
                .weight(u, v)
                .ok_or_else(|| Error::InvalidGraph(format!("certificate edge ({u},{v}) not in graph")))?;
            sum += w;
            hit[u] += 1;
            hit[v] += 1;
        }
        let matching = hit.iter().all(|&c| c <= 1);
        let missed = hit.iter().filter(|&&c| c == 0).count();
        let half = self.lambda.unwrap_or(0.0) / 2.0;
        match self.problem {
            Problem::Mwm | Problem::Dmm if !matching => {
                Err(Error::InvalidGraph("certificate is not a matching".into()))
            }
            Problem::Ec if missed > 0 => Err(Error::InvalidGraph("certificate does not cover".into())),
            Problem::Mwm | Problem::Ec => Ok(sum),
            Problem::Dmm | Problem::EcDiluted => Ok(sum + half * missed as f64),
        }
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(invalid("lambda", format!("must be positive and finite, got {lambda}")));
    }
    Ok(())
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Maximum weight matching of `(u, v, gain)` triples on `0..n`, solved per
/// connected component of the positive-gain edges. Returns matched pairs
/// `(u, v)`, `u < v`, sorted.
fn match_gains(n: usize, gains: &[(usize, usize, f64)]) -> Vec<(usize, usize)> {
    let positive: Vec<(usize, usize, f64)> = gains.iter().copied().filter(|e| e.2 > 0.0).collect();
    let mut parent: Vec<usize> = (0..n).collect();
    for &(u, v, _) in &positive {
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        if a != b {
            parent[a] = b;
        }
    }
    let mut comp_of_root = vec![usize::MAX; n];
    let mut local = vec![0usize; n];
    let mut sizes: Vec<usize> = Vec::new();
    let mut members: Vec<Vec<usize>> = Vec::new();
    for v in 0..n {
        let r = find(&mut parent, v);
        if comp_of_root[r] == usize::MAX {
            comp_of_root[r] = sizes.len();
            sizes.push(0);
            members.push(Vec::new());
        }
        let c = comp_of_root[r];
        local[v] = sizes[c];
        sizes[c] += 1;
        members[c].push(v);
    }
    let mut comp_edges: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); sizes.len()];
    for &(u, v, w) in &positive {
        let c = comp_of_root[find(&mut parent, u)];
        comp_edges[c].push((local[u], local[v], w));
    }
    let mut matched = Vec::new();
    for (c, edges) in comp_edges.iter().enumerate() {
        if edges.is_empty() {
            continue;
        }
        if edges.len() == 1 {
            let (a, b, _) = edges[0];
            let (u, v) = (members[c][a], members[c][b]);
            matched.push((u.min(v), u.max(v)));
            continue;
        }
        let mate = blossom::max_weight_matching(sizes[c], edges);
        for (a, m) in mate.iter().enumerate() {
            if let Some(b) = *m {
                if a < b {
                    let (u, v) = (members[c][a], members[c][b]);
                    matched.push((u.min(v), u.max(v)));
                }
            }
        }
    }
    matched.sort_unstable();
    matched
}

fn weight_sum(g: &WeightedGraph, edges: &[(usize, usize)]) -> f64 {
    edges.iter().map(|&(u, v)| g.weight(u, v).expect("edge of g")).sum()
}

pub fn max_weight_matching(g: &WeightedGraph) -> Solution {
    let gains: Vec<_> = g.edges().iter().map(|e| (e.u, e.v, e.w)).collect();
    let chosen = match_gains(g.n(), &gains);
    Solution { problem: Problem::Mwm, value: weight_sum(g, &chosen), chosen_edges: chosen, lambda: None }
}

pub fn diluted_min_matching(g: &WeightedGraph, lambda: f64) -> Result<Solution> {
    check_lambda(lambda)?;
    let gains: Vec<_> = g
        .edges()
        .iter()
        .filter(|e| e.w < lambda)
        .map(|e| (e.u, e.v, lambda - e.w))
        .collect();
    let chosen = match_gains(g.n(), &gains);
    let unmatched = g.n() - 2 * chosen.len();
    let value = weight_sum(g, &chosen) + lambda / 2.0 * unmatched as f64;
    Ok(Solution { problem: Problem::Dmm, value, chosen_edges: chosen, lambda: Some(lambda) })
}

/// Cheapest incident edge of each vertex (ties broken by edge order).
fn cheapest_edges(g: &WeightedGraph) -> Vec<Option<(usize, usize, f64)>> {
    (0..g.n())
        .map(|v| {
            let mut best: Option<(usize, usize, f64)> = None;
            for &(_, k) in g.incident(v) {
                let e = g.edges()[k];
                if best.is_none_or(|b| e.w < b.2) {
                    best = Some((e.u, e.v, e.w));
                }
            }
            best
        })
        .collect()
}

fn cover_reduction(g: &WeightedGraph, cap: f64) -> (Vec<(usize, usize)>, usize) {
    let cheapest = cheapest_edges(g);
    let mu: Vec<f64> = cheapest.iter().map(|c| c.map_or(cap, |e| e.2.min(cap))).collect();
    let gains: Vec<_> = g
        .edges()
        .iter()
        .map(|e| (e.u, e.v, mu[e.u] + mu[e.v] - e.w))
        .collect();
    let matched = match_gains(g.n(), &gains);
    let mut in_match = vec![false; g.n()];
    for &(u, v) in &matched {
        in_match[u] = true;
        in_match[v] = true;
    }
    let mut chosen = matched;
    for v in 0..g.n() {
        if in_match[v] {
            continue;
        }
        if let Some((a, b, w)) = cheapest[v] {
            if w < cap {
                chosen.push((a, b));
            }
        }
    }
    chosen.sort_unstable();
    chosen.dedup();
    let mut covered = vec![false; g.n()];
    for &(u, v) in &chosen {
        covered[u] = true;
        covered[v] = true;
    }
    let uncovered = covered.iter().filter(|&&c| !c).count();
    (chosen, uncovered)
}

pub fn edge_cover(g: &WeightedGraph) -> Result<Solution> {
    if let Some(v) = (0..g.n()).find(|&v| g.degree(v) == 0) {
        return Err(Error::Infeasible { vertex: v });
    }
    let (chosen, _) = cover_reduction(g, f64::INFINITY);
    Ok(Solution { problem: Problem::Ec, value: weight_sum(g, &chosen), chosen_edges: chosen, lambda: None })
}

pub fn diluted_edge_cover(g: &WeightedGraph, lambda: f64) -> Result<Solution> {
    check_lambda(lambda)?;
    let (chosen, uncovered) = cover_reduction(g, lambda / 2.0);
    let value = weight_sum(g, &chosen) + lambda / 2.0 * uncovered as f64;
    Ok(Solution { problem: Problem::EcDiluted, value, chosen_edges: chosen, lambda: Some(lambda) })
}

/// `EC_λ(G, S)`: the cheapest edge collection plus `λ/2` per vertex of `S`
/// left uncovered; edges leaving `S` may be used. Exhaustive, so limited to
/// small graphs (`n <= 20`, or `|E| <= 24` with `n <= 32`).
pub fn diluted_edge_cover_subset(g: &WeightedGraph, lambda: f64, subset: &[usize]) -> Result<f64> {
    check_lambda(lambda)?;
    if let Some(&v) = subset.iter().find(|&&v| v >= g.n()) {
        return Err(invalid("S", format!("vertex {v} out of range for n = {}", g.n())));
    }
    if g.n() <= brute::MAX_DP_VERTICES {
        let mask = subset.iter().fold(0usize, |m, &v| m | 1 << v);
        return Ok(brute::ec_subset_table(g, lambda)?[mask]);
    }
    let mask = subset.iter().fold(0u32, |m, &v| m | 1 << v);
    Ok(brute::cover_enumerate(g, lambda / 2.0, &[mask])?[0])
}

/// Optimal value by exhaustive search.
pub fn brute_force(problem: Problem, g: &WeightedGraph, lambda: Option<f64>) -> Result<f64> {
    let need = |l: Option<f64>| -> Result<f64> {
        let l = l.ok_or_else(|| invalid("lambda", format!("required for {problem}")))?;
        check_lambda(l)?;
        Ok(l)
    };
    match problem {
        Problem::Mwm => brute::mwm(g),
        Problem::Dmm => brute::dmm(g, need(lambda)?),
        Problem::Ec => {
            if let Some(v) = (0..g.n()).find(|&v| g.degree(v) == 0) {
                return Err(Error::Infeasible { vertex: v });
            }
            brute::edge_cover(g)
        }
        Problem::EcDiluted => brute::diluted_edge_cover(g, need(lambda)?),
    }
}

/// Dispatches to the reduction solver for `problem`.
pub fn solve(problem: Problem, g: &WeightedGraph, lambda: Option<f64>) -> Result<Solution> {
    let need = || lambda.ok_or_else(|| invalid("lambda", format!("required for {problem}")));
    match problem {
        Problem::Mwm => Ok(max_weight_matching(g)),
        Problem::Dmm => diluted_min_matching(g, need()?),
        Problem::Ec => edge_cover(g),
        Problem::EcDiluted => diluted_edge_cover(g, need()?),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::derive_seed;
    use crate::wgraph::{sample_er_graph, sample_kn_lambda, WeightDist};

    fn star(ws: &[f64]) -> WeightedGraph {
        WeightedGraph::new(ws.len() + 1, ws.iter().enumerate().map(|(i, &w)| (0, i + 1, w))).unwrap()
    }

    #[test]
    fn spot_values() {
        let empty = WeightedGraph::empty(5);
        assert_eq!(max_weight_matching(&empty).value, 0.0);
        assert!(max_weight_matching(&empty).chosen_edges.is_empty());
        let path = WeightedGraph::new(3, [(0, 1, 5.0), (1, 2, 3.0)]).unwrap();
        let s = max_weight_matching(&path);
        assert_eq!((s.value, s.chosen_edges.clone()), (5.0, vec![(0, 1)]));

        assert_eq!(diluted_min_matching(&empty, 3.0).unwrap().value, 7.5);
        let one = WeightedGraph::new(2, [(0, 1, 1.25)]).unwrap();
        assert_eq!(diluted_min_matching(&one, 4.0).unwrap().value, 1.25);
        assert!(diluted_min_matching(&one, 0.0).is_err());

        assert_eq!(edge_cover(&one).unwrap().value, 1.25);
        assert_eq!(edge_cover(&star(&[1.0, 2.0, 3.0])).unwrap().value, 6.0);
        assert!(matches!(edge_cover(&empty), Err(Error::Infeasible { vertex: 0 })));

        assert_eq!(diluted_edge_cover(&empty, 2.0).unwrap().value, 5.0);
        for (w, lam) in [(1.0, 4.0), (3.0, 2.0), (2.0, 2.0)] {
            let g = WeightedGraph::new(2, [(0, 1, w)]).unwrap();
            assert_eq!(diluted_edge_cover(&g, lam).unwrap().value, f64::min(w, lam));
        }
    }

    #[test]
    fn brute_spot_values() {
        let one = WeightedGraph::new(2, [(0, 1, 10.0)]).unwrap();
        assert_eq!(brute_force(Problem::Dmm, &one, Some(4.0)).unwrap(), 4.0);
        let tri = WeightedGraph::new(3, [(0, 1, 1.0), (1, 2, 2.0), (0, 2, 3.0)]).unwrap();
        assert_eq!(brute_force(Problem::Ec, &tri, None).unwrap(), 3.0);
        assert_eq!(brute_force(Problem::Mwm, &WeightedGraph::empty(3), None).unwrap(), 0.0);
        assert!(brute_force(Problem::Dmm, &one, None).is_err());
    }

    #[test]
    fn subset_examples() {
        let g = sample_er_graph(7, 0.5, WeightDist::Exp1, 4).unwrap();
        let lam = 2.0;
        assert_eq!(diluted_edge_cover_subset(&g, lam, &[]).unwrap(), 0.0);
        for v in 0..7 {
            let nn = g.min_incident_weight(v).unwrap_or(f64::INFINITY);
            assert_eq!(diluted_edge_cover_subset(&g, lam, &[v]).unwrap(), f64::min(lam / 2.0, nn));
        }
        let all: Vec<usize> = (0..7).collect();
        let a = diluted_edge_cover_subset(&g, lam, &all).unwrap();
        let b = diluted_edge_cover(&g, lam).unwrap().value;
        assert!((a - b).abs() < 1e-12);
    }

    fn instance(i: u64, max_n: usize) -> (WeightedGraph, f64) {
        let s = derive_seed(0x0AC1E, i);
        let n = 1 + (s % max_n as u64) as usize;
        let p = [0.3, 0.6, 0.9][(s >> 8) as usize % 3];
        let lam = [0.5, 2.0, 8.0][(s >> 16) as usize % 3];
        (sample_er_graph(n, p, WeightDist::Exp1, s).unwrap(), lam)
    }

    #[test]
    fn matching_solvers_match_oracle() {
        for i in 0..500 {
            let (g, lam) = instance(i, 8);
            let a = max_weight_matching(&g);
            assert!((a.value - brute_force(Problem::Mwm, &g, None).unwrap()).abs() <= 1e-9, "{}", g.to_text());
            assert!((a.certificate_value(&g).unwrap() - a.value).abs() <= 1e-9);
            let d = diluted_min_matching(&g, lam).unwrap();
            assert!((d.value - brute_force(Problem::Dmm, &g, Some(lam)).unwrap()).abs() <= 1e-9);
            assert!((d.certificate_value(&g).unwrap() - d.value).abs() <= 1e-9);
        }
    }

    #[test]
    fn cover_solvers_match_oracle() {
        let mut feasible = 0;
        for i in 0..500 {
            let (g, lam) = instance(i, 7);
            let d = diluted_edge_cover(&g, lam).unwrap();
            assert!((d.value - brute_force(Problem::EcDiluted, &g, Some(lam)).unwrap()).abs() <= 1e-9);
            assert!((d.certificate_value(&g).unwrap() - d.value).abs() <= 1e-9);
            match edge_cover(&g) {
                Ok(c) => {
                    feasible += 1;
                    assert!((c.value - brute_force(Problem::Ec, &g, None).unwrap()).abs() <= 1e-9);
                    assert!((c.certificate_value(&g).unwrap() - c.value).abs() <= 1e-9);
                    assert!(d.value <= c.value + 1e-12);
                }
                Err(Error::Infeasible { .. }) => {
                    assert!(matches!(brute_force(Problem::Ec, &g, None), Err(Error::Infeasible { .. })));
                }
                Err(e) => panic!("{e}"),
            }
        }
        assert!(feasible > 100);
    }

    #[test]
    fn dmm_mwm_identity_on_dyadic_weights() {
        for i in 0..300u64 {
            let lam = [0.5, 2.0, 8.0][(i % 3) as usize];
            let g = sample_kn_lambda(40, lam, derive_seed(17, i)).unwrap().quantized(30);
            let d = diluted_min_matching(&g, lam).unwrap();
            let gains = g.filter_edges(|e| e.w < lam).map_weights(|w| lam - w).unwrap();
            let m = max_weight_matching(&gains);
            assert_eq!(d.value + m.value, g.n() as f64 * lam / 2.0);
        }
    }

    #[test]
    fn diluted_values_monotone_in_lambda() {
        for i in 0..100u64 {
            let g = sample_er_graph(30, 0.1, WeightDist::Exp1, derive_seed(5, i)).unwrap();
            let mut prev = (0.0, 0.0);
            for lam in [0.25, 0.5, 1.0, 2.0, 4.0, 8.0] {
                let d = diluted_min_matching(&g, lam).unwrap().value;
                let c = diluted_edge_cover(&g, lam).unwrap().value;
                assert!(d >= prev.0 - 1e-12 && c >= prev.1 - 1e-12);
                prev = (d, c);
            }
        }
    }

    #[test]
    fn larger_instances_against_dp() {
        for i in 0..60u64 {
            let s = derive_seed(99, i);
            let g = sample_er_graph(18, 0.25, WeightDist::Exp1, s).unwrap();
            let a = max_weight_matching(&g).value;
            assert!((a - brute::mwm(&g).unwrap()).abs() <= 1e-9);
            let d = diluted_min_matching(&g, 2.0).unwrap().value;
            assert!((d - brute::dmm(&g, 2.0).unwrap()).abs() <= 1e-9);
            let all = (1usize << 18) - 1;
            let c = diluted_edge_cover(&g, 2.0).unwrap().value;
            assert!((c - brute::ec_subset_table(&g, 2.0).unwrap()[all]).abs() <= 1e-9);
        }
    }

    #[test]
    fn problem_names_round_trip() {
        for p in Problem::ALL {
            assert_eq!(p.name().parse::<Problem>().unwrap(), p);
        }
        assert!("foo".parse::<Problem>().is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn graph() -> impl Strategy<Value = WeightedGraph> {
            (1usize..9).prop_flat_map(|n| {
                let pairs: Vec<(usize, usize)> = (0..n).flat_map(|v| (0..v).map(move |u| (u, v))).collect();
                let m = pairs.len();
                (Just(n), Just(pairs), proptest::collection::vec(proptest::option::of(0u32..64), m))
                    .prop_map(|(n, pairs, ws)| {
                        let edges = pairs
                            .into_iter()
                            .zip(ws)
                            .filter_map(|((u, v), w)| w.map(|w| (u, v, w as f64 / 8.0)));
                        WeightedGraph::new(n, edges).unwrap()
                    })
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(256))]
            #[test]
            fn blossom_equals_dp_with_ties(g in graph()) {
                prop_assert_eq!(max_weight_matching(&g).value, brute::mwm(&g).unwrap());
            }

            #[test]
            fn dmm_equals_dp_with_ties(g in graph(), l in 1u32..40) {
                let lam = l as f64 / 4.0;
                prop_assert_eq!(diluted_min_matching(&g, lam).unwrap().value, brute::dmm(&g, lam).unwrap());
            }

            #[test]
            fn diluted_cover_equals_dp_with_ties(g in graph(), l in 1u32..40) {
                let lam = l as f64 / 4.0;
                let all = (1usize << g.n()) - 1;
                prop_assert_eq!(
                    diluted_edge_cover(&g, lam).unwrap().value,
                    brute::ec_subset_table(&g, lam).unwrap()[all]
                );
            }
        }
    }
}
