//! Cavity recursions on rooted trees and the local approximations built from
//! them.
//!
//! All recursions run as a single reverse pass over the breadth-first arena,
//! so deep trees need no call stack.

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::exact::Problem;
use crate::gwtree::{sample_tilted_tree, RootedTree, TiltedTree};
use crate::report::{fmt_f64, CsvRecord};
use crate::seed::derive_seed;
use crate::wgraph::{EdgeEnv, Neighborhood, WeightDist};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityBracket {
    pub problem: Problem,
    pub k: usize,
    pub lower: f64,
    pub upper: f64,
}

impl CavityBracket {
    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }
}

/// Maximum weight matching recursion `h(u) = max(0, max_c ℓ_c - h(c))` with
/// every leaf set to 0. Returns the value at every node.
pub fn mwm_cavity_values(t: &RootedTree) -> Vec<f64> {
    let mut h = vec![0.0; t.len()];
    for v in (0..t.len()).rev() {
        let mut best = 0.0f64;
        for c in t.children(v) {
            best = best.max(t.parent_weight(c).unwrap() - h[c]);
        }
        h[v] = best;
    }
    h
}

pub fn mwm_cavity(t: &RootedTree) -> f64 {
    mwm_cavity_values(t)[0]
}

/// `(h_{i_L}, h_{i_U})` at the root with `i_L = 2⌊(k-1)/2⌋`, `i_U = i_L + 1`,
/// each on the corresponding truncation of `t`.
pub fn mwm_tree_bracket(t: &RootedTree, k: usize) -> Result<CavityBracket> {
    if k == 0 {
        return Err(invalid("k", "the matching bracket needs k >= 1"));
    }
    let i_l = 2 * ((k - 1) / 2);
    let i_u = i_l + 1;
    Ok(CavityBracket {
        problem: Problem::Mwm,
        k,
        lower: mwm_cavity(&t.truncate_to_depth(i_l)),
        upper: mwm_cavity(&t.truncate_to_depth(i_u)),
    })
}

fn tree_of(neigh: &Neighborhood) -> Result<&RootedTree> {
    neigh.as_tree.as_ref().ok_or(Error::NotATree { root: neigh.root, depth: neigh.depth })
}

pub fn mwm_bracket(neigh: &Neighborhood) -> Result<CavityBracket> {
    mwm_tree_bracket(tree_of(neigh)?, neigh.depth)
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(invalid("lambda", format!("must be positive and finite, got {lambda}")));
    }
    Ok(())
}

/// Diluted matching recursion `h(u) = min(λ/2, min_c ℓ_c - h(c))`, clamped to
/// `[-λ/2, λ/2]`. Leaves above depth `k` take `λ/2`; nodes at depth `k` take
/// `boundary`.
pub fn dmm_cavity_values(t: &RootedTree, k: usize, lambda: f64, boundary: f64) -> Vec<f64> {
    let half = lambda / 2.0;
    let mut h = vec![0.0; t.len()];
    for v in (0..t.len()).rev() {
        if t.depth(v) >= k {
            h[v] = boundary;
            continue;
        }
        let mut best = half;
        for c in t.children(v) {
            best = best.min(t.parent_weight(c).unwrap() - h[c]);
        }
        h[v] = best.clamp(-half, half);
    }
    h
}

/// Root bracket for `M_λ(G) - M_λ(G - v)` from a depth-`k` tree.
///
/// The map from child values to the parent value is antitone, so seeding
/// depth `k` with `+λ/2` gives a lower bound at the root when `k` is odd and
/// an upper bound when `k` is even; `-λ/2` gives the opposite.
pub fn dmm_cavity_bracket(t: &RootedTree, k: usize, lambda: f64) -> Result<CavityBracket> {
    check_lambda(lambda)?;
    for i in 1..t.len() {
        let w = t.parent_weight(i).unwrap();
        if w > lambda {
            return Err(invalid("tree", format!("edge weight {w} exceeds lambda = {lambda}")));
        }
    }
    let half = lambda / 2.0;
    let plus = dmm_cavity_values(t, k, lambda, half)[0];
    let minus = dmm_cavity_values(t, k, lambda, -half)[0];
    let (lower, upper) = if k % 2 == 1 { (plus, minus) } else { (minus, plus) };
    Ok(CavityBracket { problem: Problem::Dmm, k, lower, upper })
}

/// `(h^L_k, h^U_k)` at every node of a tree of depth at most `k`.
pub fn ec_cavity_values(t: &RootedTree, k: usize, lambda: f64) -> (Vec<f64>, Vec<f64>) {
    let half = lambda / 2.0;
    let (seed_l, seed_u) = if k.is_multiple_of(2) { (0.0, half) } else { (half, 0.0) };
    let mut hl = vec![0.0; t.len()];
    let mut hu = vec![0.0; t.len()];
    for v in (0..t.len()).rev() {
        if t.depth(v) >= k {
            hl[v] = seed_l;
            hu[v] = seed_u;
            continue;
        }
        let (mut bl, mut bu) = (half, half);
        for c in t.children(v) {
            let w = t.parent_weight(c).unwrap();
            bl = bl.min(w - hl[c]);
            bu = bu.min(w - hu[c]);
        }
        hl[v] = bl.max(0.0);
        hu[v] = bu.max(0.0);
    }
    (hl, hu)
}

pub fn ec_cavity_bracket(t: &RootedTree, k: usize, lambda: f64) -> Result<CavityBracket> {
    check_lambda(lambda)?;
    if t.max_depth() > k {
        return Err(invalid("k", format!("tree depth {} exceeds k = {k}", t.max_depth())));
    }
    let (hl, hu) = ec_cavity_values(t, k, lambda);
    Ok(CavityBracket { problem: Problem::Ec, k, lower: hl[0], upper: hu[0] })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalApproxPair {
    pub la_lower: f64,
    pub la_upper: f64,
    pub k: usize,
    /// `(b_e, b'_e)`.
    pub edge_state: (bool, bool),
}

/// One side of the edge `e = (v, u)`: the depth-`k` tree at `v`, and if `e`
/// is present there, the node holding `u` and the weight of `e`.
#[derive(Debug, Clone, Copy)]
pub struct EdgeSide<'a> {
    pub tree: &'a RootedTree,
    pub u: Option<(usize, f64)>,
}

/// Lower and upper local approximations of `EC_λ(G) - EC_λ(G^e)` from the
/// trees `B = B_k(v, G)` and `B' = B_k(v, G^e)`.
///
/// `LA^L = h^L(v;B) - h^U(v;B')`
/// `     + 1(1,0) [min(h^U(u;B), w) - h^L(u;B)]`
/// `     + 1(0,1) [h^U(u;B') - min(h^L(u;B'), w')]`
/// `     + 1(1,1) [min(h^U(u;B), w) - min(h^L(u;B'), w')]`,
/// and `LA^U` is the same with `h^L` and `h^U` exchanged.
pub fn ec_local_approx_trees(b: EdgeSide<'_>, bp: EdgeSide<'_>, k: usize, lambda: f64) -> LocalApproxPair {
    let (bl, bu) = ec_cavity_values(b.tree, k, lambda);
    let (pl, pu) = ec_cavity_values(bp.tree, k, lambda);
    let la = |x: &[f64], y: &[f64], px: &[f64], py: &[f64]| -> f64 {
        // x, y: the "first" and "second" bracket values on B; px, py on B'.
        let mut s = x[0] - py[0];
        match (b.u, bp.u) {
            (Some((u, w)), None) => s += y[u].min(w) - x[u],
            (None, Some((u, w))) => s += py[u] - px[u].min(w),
            (Some((u, w)), Some((up, wp))) => s += y[u].min(w) - px[up].min(wp),
            (None, None) => {}
        }
        s
    };
    LocalApproxPair {
        la_lower: la(&bl, &bu, &pl, &pu),
        la_upper: la(&bu, &bl, &pu, &pl),
        k,
        edge_state: (b.u.is_some(), bp.u.is_some()),
    }
}

/// [`ec_local_approx_trees`] on the neighborhoods of `v` in `G` and `G^e`.
pub fn ec_local_approx(
    bk: &Neighborhood,
    bk_prime: &Neighborhood,
    env: &EdgeEnv,
    lambda: f64,
) -> Result<LocalApproxPair> {
    check_lambda(lambda)?;
    let (v, u) = env.edge;
    if bk.root != v || bk_prime.root != v || bk.depth != bk_prime.depth {
        return Err(invalid("neighborhoods", "both must be rooted at v of e = (v, u) with equal depth"));
    }
    let t = tree_of(bk)?;
    let tp = tree_of(bk_prime)?;
    let side = |n: &Neighborhood, tree: &RootedTree, present: bool, w: f64| -> Result<Option<(usize, f64)>> {
        if !present {
            return Ok(None);
        }
        let node = n
            .node_of(u)
            .filter(|&i| i > 0 && tree.depth(i) == 1)
            .ok_or_else(|| invalid("env", format!("edge ({v},{u}) not present in the neighborhood")))?;
        Ok(Some((node, w)))
    };
    let ub = side(bk, t, env.primary.present, env.primary.weight)?;
    let up = side(bk_prime, tp, env.resample.present, env.resample.weight)?;
    Ok(ec_local_approx_trees(EdgeSide { tree: t, u: ub }, EdgeSide { tree: tp, u: up }, bk.depth, lambda))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaKEstimate {
    pub problem: Problem,
    pub k: usize,
    pub lambda: f64,
    pub mean_sq: f64,
    pub std_err: f64,
    pub n_samples: usize,
}

impl CsvRecord for DeltaKEstimate {
    const HEADER: &'static [&'static str] = &["problem", "k", "lambda", "n_samples", "mean_sq", "std_err"];
    fn fields(&self) -> Vec<String> {
        vec![
            self.problem.to_string(),
            self.k.to_string(),
            fmt_f64(self.lambda),
            self.n_samples.to_string(),
            fmt_f64(self.mean_sq),
            fmt_f64(self.std_err),
        ]
    }
}

fn mean_se(xs: impl Iterator<Item = f64>) -> (f64, f64, usize) {
    let v: Vec<f64> = xs.collect();
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt(), v.len())
}

/// The two directional squared gaps for edge cover at depth `k` on one
/// tilted sample: the pair `(T̃_k, T_k)` (edge present, then absent) and the
/// pair `(T_k, T̃_k)`.
pub fn ec_directional_gaps(tt: &TiltedTree, k: usize, lambda: f64) -> (f64, f64) {
    let u = Some((tt.attached_root, tt.bridge_weight));
    let tilted = EdgeSide { tree: &tt.combined, u };
    let plain = EdgeSide { tree: &tt.base, u: None };
    let a = ec_local_approx_trees(tilted, plain, k, lambda);
    let b = ec_local_approx_trees(plain, tilted, k, lambda);
    ((a.la_upper - a.la_lower).powi(2), (b.la_upper - b.la_lower).powi(2))
}

/// Squared bracket gaps `(h_{i_U} - h_{i_L})²` at the root of `T_k` and of
/// `T̃_k` for the matching bracket at depth `k`.
pub fn mwm_directional_gaps(tt: &TiltedTree, k: usize) -> Result<(f64, f64)> {
    let i_l = 2 * ((k - 1) / 2);
    let i_u = i_l + 1;
    let plain = mwm_cavity(&tt.base.truncate_to_depth(i_u)) - mwm_cavity(&tt.base.truncate_to_depth(i_l));
    let tilted = if i_l == 0 {
        mwm_cavity(&tt.truncate_to_depth(1)?.combined)
    } else {
        mwm_cavity(&tt.truncate_to_depth(i_u)?.combined) - mwm_cavity(&tt.truncate_to_depth(i_l)?.combined)
    };
    Ok((plain * plain, tilted * tilted))
}

/// Monte Carlo estimates of `δ_k` for each depth in `ks`, all computed on the
/// same nested samples (one tilted tree of the largest depth per sample,
/// truncated). For matching, `k` is the bracket depth, so the gap is
/// `h_{2r+1} - h_{2r}` with `r = ⌊(k-1)/2⌋`. Each estimate is the larger of
/// the two directional means, with its standard error.
pub fn estimate_delta_ladder(
    problem: Problem,
    ks: &[usize],
    lambda: f64,
    dist: WeightDist,
    n_samples: usize,
    seed: u64,
) -> Result<Vec<DeltaKEstimate>> {
    check_lambda(lambda)?;
    if n_samples < 100 {
        return Err(invalid("n_samples", format!("need at least 100, got {n_samples}")));
    }
    if ks.is_empty() || ks.contains(&0) {
        return Err(invalid("k", "depths must be at least 1"));
    }
    if !matches!(problem, Problem::Mwm | Problem::Ec | Problem::EcDiluted) {
        return Err(invalid("problem", format!("δ_k is estimated for MWM and EC, not {problem}")));
    }
    let kmax = *ks.iter().max().unwrap();
    let depth = match problem {
        Problem::Mwm => 2 * ((kmax - 1) / 2) + 1,
        _ => kmax,
    };
    let per_sample: Vec<Vec<(f64, f64)>> = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| -> Result<Vec<(f64, f64)>> {
            let tt = sample_tilted_tree(depth, lambda, dist, derive_seed(seed, i))?;
            ks.iter()
                .map(|&k| match problem {
                    Problem::Mwm => mwm_directional_gaps(&tt, k),
                    _ => Ok(ec_directional_gaps(&tt.truncate_to_depth(k)?, k, lambda)),
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(ks
        .iter()
        .enumerate()
        .map(|(j, &k)| {
            let a = mean_se(per_sample.iter().map(|s| s[j].0));
            let b = mean_se(per_sample.iter().map(|s| s[j].1));
            let (mean_sq, std_err, _) = if a.0 >= b.0 { a } else { b };
            DeltaKEstimate { problem, k, lambda, mean_sq, std_err, n_samples }
        })
        .collect())
}

pub fn estimate_delta_k(
    problem: Problem,
    k: usize,
    lambda: f64,
    dist: WeightDist,
    n_samples: usize,
    seed: u64,
) -> Result<DeltaKEstimate> {
    Ok(estimate_delta_ladder(problem, &[k], lambda, dist, n_samples, seed)?[0])
}

/// `h_0, h_1, ..., h_{2r_max+1}` at the root of the nested truncations of a
/// single tree.
pub fn mwm_parity_sequence(t: &RootedTree, r_max: usize) -> Vec<f64> {
    (0..=2 * r_max + 1).map(|i| mwm_cavity(&t.truncate_to_depth(i))).collect()
}

/// Whether `h_{2r+1}` is nonincreasing, `h_{2r}` nondecreasing and
/// `h_{2r} <= h_{2r+1}` along a sequence from [`mwm_parity_sequence`].
pub fn parity_monotone(h: &[f64]) -> bool {
    let r_max = h.len() / 2;
    (0..r_max).all(|r| h[2 * r] <= h[2 * r + 1])
        && (1..r_max).all(|r| h[2 * r + 1] <= h[2 * r - 1] && h[2 * r] >= h[2 * r - 2])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticBounds {
    pub epsilon_k: f64,
    pub rho_k: f64,
    pub lambda: f64,
    pub lambda_n: f64,
    pub k: usize,
    pub n: f64,
    pub d_tv: f64,
    pub c0: f64,
}

/// The two error terms of the general normal-approximation bound:
///
/// `ε_k(n) = (2λ+3)^k / n^{1/3} + C₀ (λ_n+1)^k / min(λ,1) · (|λ_n-λ| + d_TV + λ²/(2n))`
/// `ρ_k(n) = min((λ_n+C₀)^{2k+C₀} / n, 1)`
pub fn diagnostic_bounds(lambda: f64, lambda_n: f64, k: usize, n: f64, d_tv: f64, c0: f64) -> Result<DiagnosticBounds> {
    for (name, x) in [("lambda", lambda), ("lambda_n", lambda_n), ("n", n), ("C0", c0)] {
        if !(x > 0.0) || !x.is_finite() {
            return Err(invalid(name, format!("must be positive and finite, got {x}")));
        }
    }
    if !(0.0..=1.0).contains(&d_tv) {
        return Err(invalid("d_tv", format!("must lie in [0, 1], got {d_tv}")));
    }
    let kf = k as f64;
    let epsilon_k = (2.0 * lambda + 3.0).powf(kf) / n.cbrt()
        + c0 * (lambda_n + 1.0).powf(kf) / lambda.min(1.0)
            * ((lambda_n - lambda).abs() + d_tv + lambda * lambda / (2.0 * n));
    let rho_k = ((lambda_n + c0).powf(2.0 * kf + c0) / n).min(1.0);
    Ok(DiagnosticBounds { epsilon_k, rho_k, lambda, lambda_n, k, n, d_tv, c0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{brute, max_weight_matching};
    use crate::gwtree::sample_gw_tree;

    fn star(ws: &[f64]) -> RootedTree {
        RootedTree::from_bfs(
            std::iter::once(usize::MAX).chain(ws.iter().map(|_| 0)).collect(),
            std::iter::once(0.0).chain(ws.iter().copied()).collect(),
        )
        .unwrap()
    }

    fn path(ws: &[f64]) -> RootedTree {
        let parents = std::iter::once(usize::MAX).chain(0..ws.len()).collect();
        RootedTree::from_bfs(parents, std::iter::once(0.0).chain(ws.iter().copied()).collect()).unwrap()
    }

    #[test]
    fn mwm_small_trees() {
        assert_eq!(mwm_cavity(&RootedTree::single()), 0.0);
        assert_eq!(mwm_cavity(&star(&[0.5, 2.0, 1.0])), 2.0);
        for (w1, w2) in [(1.0, 0.25), (0.5, 2.0), (3.0, 3.0)] {
            let t = path(&[w1, w2]);
            let h = mwm_cavity(&t);
            assert_eq!(h, f64::max(0.0, w1 - w2));
            let g = t.to_graph();
            let (rest, _) = crate::wgraph::compact_without(&g, &[0]);
            let exact = max_weight_matching(&g).value - max_weight_matching(&rest).value;
            assert!((h - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn mwm_bracket_at_depth_one() {
        let t = star(&[0.5, 2.0]);
        let b = mwm_tree_bracket(&t, 1).unwrap();
        assert_eq!((b.lower, b.upper), (0.0, 2.0));
        assert!(mwm_tree_bracket(&t, 0).is_err());
    }

    #[test]
    fn dmm_small_trees() {
        let lam = 2.0;
        let b = dmm_cavity_bracket(&RootedTree::single(), 0, lam).unwrap();
        assert_eq!((b.lower, b.upper), (-1.0, 1.0));
        // An isolated vertex pays its own penalty.
        let b = dmm_cavity_bracket(&RootedTree::single(), 2, lam).unwrap();
        assert_eq!((b.lower, b.upper), (1.0, 1.0));
        let w = 0.75;
        let b = dmm_cavity_bracket(&star(&[w]), 1, lam).unwrap();
        assert_eq!((b.lower, b.upper), (f64::min(1.0, w - 1.0), f64::min(1.0, w + 1.0)));
        // Exact value on the tree itself lies in the bracket.
        let g = star(&[w]).to_graph();
        let exact = brute::dmm(&g, lam).unwrap() - lam / 2.0;
        assert!(b.contains(exact));
        assert!(dmm_cavity_bracket(&star(&[3.0]), 1, lam).is_err());
    }

    #[test]
    fn ec_small_trees() {
        let lam = 3.0;
        let b = ec_cavity_bracket(&RootedTree::single(), 0, lam).unwrap();
        assert_eq!((b.lower, b.upper), (0.0, 1.5));
        let ws = [0.5, 2.25, 1.0];
        let b = ec_cavity_bracket(&star(&ws), 1, lam).unwrap();
        let min_w = ws.iter().copied().fold(f64::INFINITY, f64::min);
        assert_eq!(b.upper, f64::min(1.5, min_w));
        let lower = ws.iter().map(|w| f64::min(1.5, w - 1.5)).fold(f64::INFINITY, f64::min).max(0.0);
        assert_eq!(b.lower, lower);
        assert!(ec_cavity_bracket(&path(&[1.0, 1.0]), 1, lam).is_err());
    }

    #[test]
    fn ec_values_in_range() {
        for s in 0..200 {
            let lam = 2.0;
            let t = sample_gw_tree(4, 2.0, WeightDist::uniform(lam).unwrap(), s).unwrap();
            let (hl, hu) = ec_cavity_values(&t, 4, lam);
            assert!(hl.iter().chain(&hu).all(|&x| (0.0..=1.0).contains(&x)));
            assert!(hl[0] <= hu[0]);
        }
    }

    #[test]
    fn unperturbed_edge_gives_zero_inside() {
        let lam = 2.0;
        for s in 0..100 {
            let t = sample_gw_tree(3, 1.5, WeightDist::uniform(lam).unwrap(), s).unwrap();
            let side = EdgeSide { tree: &t, u: None };
            let la = ec_local_approx_trees(side, side, 3, lam);
            assert!(la.la_lower <= 0.0 && 0.0 <= la.la_upper);
            assert_eq!(la.edge_state, (false, false));
        }
    }

    #[test]
    fn parity_sequence_is_monotone() {
        for s in 0..300 {
            let t = sample_gw_tree(7, 2.0, WeightDist::Exp1, s).unwrap();
            let h = mwm_parity_sequence(&t, 3);
            assert!(parity_monotone(&h), "{h:?}");
            let max_child = t.children(0).map(|c| t.parent_weight(c).unwrap()).fold(0.0, f64::max);
            assert!(h.iter().all(|&x| 0.0 <= x && x <= max_child));
        }
    }

    #[test]
    fn delta_estimates_in_range() {
        let lam = 2.0;
        let dist = WeightDist::uniform(lam).unwrap();
        let est = estimate_delta_k(Problem::Ec, 1, lam, dist, 2000, 3).unwrap();
        // Each of the four bracket differences in LA^U - LA^L lies in [0, λ/2].
        assert!(est.mean_sq >= 0.0 && est.mean_sq <= (2.0 * lam).powi(2));
        assert!(est.std_err >= 0.0);
        assert!(estimate_delta_k(Problem::Ec, 1, lam, dist, 50, 3).is_err());
        assert!(estimate_delta_k(Problem::Dmm, 1, lam, dist, 500, 3).is_err());
    }

    #[test]
    fn diagnostics() {
        let d = diagnostic_bounds(2.0, 2.0, 3, 1e3, 0.0, 1.0).unwrap();
        assert_eq!(d.rho_k, 1.0);
        let d = diagnostic_bounds(1.0, 1.0, 2, 1e12, 0.0, 1.0).unwrap();
        assert!(d.epsilon_k < 1e-2);
        let mut prev = f64::INFINITY;
        for n in [1e20, 1e22, 1e24] {
            let d = diagnostic_bounds(2.0, 2.0, 3, n, 0.0, 1.0).unwrap();
            assert!(d.rho_k < 1.0 && d.rho_k < prev);
            prev = d.rho_k;
        }
        assert!(diagnostic_bounds(0.0, 2.0, 3, 1e3, 0.0, 1.0).is_err());
    }
}
