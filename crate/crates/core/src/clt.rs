//! Monte Carlo harness: replicate optimal values, normality and variance
//! diagnostics, truncation checks, and neighborhood statistics.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::exact::{self, brute, Problem};
use crate::gwtree::sample_gw_tree;
use crate::report::{fmt_f64, CsvRecord};
use crate::seed::{derive_seed, stream, tag};
use crate::stats;
use crate::wgraph::{
    neighborhood, resample_edge, sample_complete_scaled_exp, sample_er_graph, sample_kn_lambda, EdgeEnv,
    WeightDist, WeightedGraph,
};

/// Growth rule for the truncation level of the edge-cover route:
/// `λ_n = 8 ln n`.
pub fn lambda_n(n: usize) -> f64 {
    8.0 * (n as f64).ln()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateRecord {
    pub seed: u64,
    pub n: usize,
    pub lambda: f64,
    pub problem: Problem,
    pub value: f64,
}

impl CsvRecord for ReplicateRecord {
    const HEADER: &'static [&'static str] = &["seed", "n", "lambda", "problem", "value"];
    fn fields(&self) -> Vec<String> {
        vec![
            self.seed.to_string(),
            self.n.to_string(),
            fmt_f64(self.lambda),
            self.problem.to_string(),
            fmt_f64(self.value),
        ]
    }
}

/// The random instance a replicate solves: `G(n, λ/n)` with `Exp(1)` weights
/// for MWM, `K_n(λ)` for the diluted problems, and the complete graph with
/// `n·Exp(1)` weights for EC (`λ` ignored).
pub fn sample_instance(problem: Problem, n: usize, lambda: f64, seed: u64) -> Result<WeightedGraph> {
    match problem {
        Problem::Mwm => {
            if !(lambda >= 0.0) || lambda > n as f64 {
                return Err(invalid("lambda", format!("need 0 <= λ <= n, got {lambda}")));
            }
            sample_er_graph(n, lambda / n as f64, WeightDist::Exp1, seed)
        }
        Problem::Dmm | Problem::EcDiluted => sample_kn_lambda(n, lambda, seed),
        Problem::Ec => sample_complete_scaled_exp(n, seed),
    }
}

fn solve_value(problem: Problem, g: &WeightedGraph, lambda: f64) -> Result<f64> {
    let l = problem.needs_lambda().then_some(lambda);
    Ok(exact::solve(problem, g, l)?.value)
}

pub fn run_replicates(problem: Problem, n: usize, lambda: f64, reps: usize, master_seed: u64) -> Result<Vec<ReplicateRecord>> {
    if reps < 2 {
        return Err(invalid("reps", format!("need at least 2, got {reps}")));
    }
    (0..reps as u64)
        .into_par_iter()
        .map(|i| {
            let seed = derive_seed(master_seed, i);
            let g = sample_instance(problem, n, lambda, seed)?;
            let value = solve_value(problem, &g, lambda)?;
            Ok(ReplicateRecord { seed, n, lambda, problem, value })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct KsReport {
    pub problem: Problem,
    pub n: usize,
    pub lambda: f64,
    pub n_reps: usize,
    pub ks_distance: f64,
    pub mean: f64,
    pub sd: f64,
}

impl CsvRecord for KsReport {
    const HEADER: &'static [&'static str] = &["problem", "n", "lambda", "reps", "ks", "mean", "sd"];
    fn fields(&self) -> Vec<String> {
        vec![
            self.problem.to_string(),
            self.n.to_string(),
            fmt_f64(self.lambda),
            self.n_reps.to_string(),
            fmt_f64(self.ks_distance),
            fmt_f64(self.mean),
            fmt_f64(self.sd),
        ]
    }
}

pub fn ks_to_normal(records: &[ReplicateRecord]) -> Result<KsReport> {
    if records.len() < 50 {
        return Err(invalid("records", format!("need at least 50, got {}", records.len())));
    }
    let values: Vec<f64> = records.iter().map(|r| r.value).collect();
    let (ks_distance, mean, sd) = stats::ks_normal(&values)?;
    let r = &records[0];
    Ok(KsReport { problem: r.problem, n: r.n, lambda: r.lambda, n_reps: records.len(), ks_distance, mean, sd })
}

#[derive(Debug, Clone, PartialEq)]
pub struct VarianceRow {
    pub problem: Problem,
    pub lambda: f64,
    pub n: usize,
    pub mean_over_n: f64,
    pub var_over_n: f64,
    /// `var_over_n` divided by the previous row's, if any.
    pub ratio: Option<f64>,
}

impl CsvRecord for VarianceRow {
    const HEADER: &'static [&'static str] = &["problem", "lambda", "n", "mean_over_n", "var_over_n", "ratio"];
    fn fields(&self) -> Vec<String> {
        vec![
            self.problem.to_string(),
            fmt_f64(self.lambda),
            self.n.to_string(),
            fmt_f64(self.mean_over_n),
            fmt_f64(self.var_over_n),
            self.ratio.map(fmt_f64).unwrap_or_default(),
        ]
    }
}

/// Rows from already collected replicate batches, one batch per `n`.
pub fn variance_rows(batches: &[Vec<ReplicateRecord>]) -> Vec<VarianceRow> {
    let mut out: Vec<VarianceRow> = Vec::with_capacity(batches.len());
    for b in batches {
        let values: Vec<f64> = b.iter().map(|r| r.value).collect();
        let n = b[0].n;
        let var_over_n = stats::variance(&values) / n as f64;
        let ratio = out.last().map(|p| var_over_n / p.var_over_n);
        out.push(VarianceRow {
            problem: b[0].problem,
            lambda: b[0].lambda,
            n,
            mean_over_n: stats::mean(&values) / n as f64,
            var_over_n,
            ratio,
        });
    }
    out
}

/// `Var̂/n` along `n_list`. Each `n` uses its own master seed
/// `derive_seed(master_seed, n)`.
pub fn variance_profile(problem: Problem, lambda: f64, n_list: &[usize], reps: usize, master_seed: u64) -> Result<Vec<VarianceRow>> {
    let batches = n_list
        .iter()
        .map(|&n| run_replicates(problem, n, lambda, reps, derive_seed(master_seed, n as u64)))
        .collect::<Result<Vec<_>>>()?;
    Ok(variance_rows(&batches))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncationReport {
    pub n: usize,
    pub reps: usize,
    /// Replicates with `EC = EC_{4K}`.
    pub four_k_equal: usize,
    pub lambda_n: f64,
    /// Replicates with `EC_{λ_n} = EC`.
    pub lambda_n_equal: usize,
    /// Largest weight used by any optimal cover, over `2K`.
    pub max_edge_over_2k: f64,
}

impl TruncationReport {
    pub fn lambda_n_frequency(&self) -> f64 {
        self.lambda_n_equal as f64 / self.reps as f64
    }
}

impl CsvRecord for TruncationReport {
    const HEADER: &'static [&'static str] =
        &["n", "reps", "four_k_equal", "lambda_n", "lambda_n_equal", "lambda_n_freq", "max_edge_over_2k"];
    fn fields(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            self.reps.to_string(),
            self.four_k_equal.to_string(),
            fmt_f64(self.lambda_n),
            self.lambda_n_equal.to_string(),
            fmt_f64(self.lambda_n_frequency()),
            fmt_f64(self.max_edge_over_2k),
        ]
    }
}

/// On complete graphs with `n·Exp(1)` weights, compares `EC` with the
/// `4K`-diluted cover (`K` the largest cheapest-incident weight) and with
/// the `λ_n`-diluted cover.
pub fn ec_truncation_check(n: usize, reps: usize, master_seed: u64) -> Result<TruncationReport> {
    if !(2..=300).contains(&n) {
        return Err(invalid("n", format!("need 2 <= n <= 300, got {n}")));
    }
    if reps == 0 {
        return Err(invalid("reps", "must be positive"));
    }
    let ln = lambda_n(n);
    let rows = (0..reps as u64)
        .into_par_iter()
        .map(|i| {
            let g = sample_complete_scaled_exp(n, derive_seed(master_seed, i))?;
            let k = (0..n).filter_map(|v| g.min_incident_weight(v)).fold(0.0, f64::max);
            let ec = exact::edge_cover(&g)?;
            let heaviest = ec.chosen_edges.iter().filter_map(|&(u, v)| g.weight(u, v)).fold(0.0, f64::max);
            let four_k = exact::diluted_edge_cover(&g, 4.0 * k)?.value == ec.value;
            let at_ln = exact::diluted_edge_cover(&g, ln)?.value == ec.value;
            Ok((four_k, at_ln, heaviest / (2.0 * k)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TruncationReport {
        n,
        reps,
        four_k_equal: rows.iter().filter(|r| r.0).count(),
        lambda_n: ln,
        lambda_n_equal: rows.iter().filter(|r| r.1).count(),
        max_edge_over_2k: rows.iter().map(|r| r.2).fold(0.0, f64::max),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeProbReport {
    pub n: usize,
    pub lambda: f64,
    pub k: usize,
    pub reps: usize,
    pub trees: usize,
}

impl TreeProbReport {
    pub fn probability(&self) -> f64 {
        self.trees as f64 / self.reps as f64
    }

    pub fn failure_rate(&self) -> f64 {
        1.0 - self.probability()
    }

    pub fn std_err(&self) -> f64 {
        stats::binomial_se(self.probability(), self.reps)
    }
}

impl CsvRecord for TreeProbReport {
    const HEADER: &'static [&'static str] = &["n", "lambda", "k", "reps", "trees", "p_tree", "failure_rate", "se"];
    fn fields(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            fmt_f64(self.lambda),
            self.k.to_string(),
            self.reps.to_string(),
            self.trees.to_string(),
            fmt_f64(self.probability()),
            fmt_f64(self.failure_rate()),
            fmt_f64(self.std_err()),
        ]
    }
}

fn check_sparse(n: usize, lambda: f64) -> Result<f64> {
    if n < 2 {
        return Err(invalid("n", format!("need at least 2, got {n}")));
    }
    if !(lambda >= 0.0) || lambda > n as f64 {
        return Err(invalid("lambda", format!("need 0 <= λ <= n, got {lambda}")));
    }
    Ok(lambda / n as f64)
}

/// Frequency with which `B_k(0, G(n, λ/n))` is a tree.
pub fn tree_probability(n: usize, lambda: f64, k: usize, reps: usize, master_seed: u64) -> Result<TreeProbReport> {
    let p = check_sparse(n, lambda)?;
    if reps < 100 {
        return Err(invalid("reps", format!("need at least 100, got {reps}")));
    }
    let flags = (0..reps as u64)
        .into_par_iter()
        .map(|i| {
            let g = sample_er_graph(n, p, WeightDist::Exp1, derive_seed(master_seed, i))?;
            Ok(neighborhood(&g, 0, k)?.is_tree)
        })
        .collect::<Result<Vec<bool>>>()?;
    Ok(TreeProbReport { n, lambda, k, reps, trees: flags.iter().filter(|&&t| t).count() })
}

/// Integer statistic of a depth-k neighborhood.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NbdStatistic {
    RootDegree,
    NodeCount,
}

impl std::str::FromStr for NbdStatistic {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "root_degree" => Ok(NbdStatistic::RootDegree),
            "node_count" => Ok(NbdStatistic::NodeCount),
            _ => Err(invalid("statistic", format!("unknown statistic {s:?}"))),
        }
    }
}

impl std::fmt::Display for NbdStatistic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            NbdStatistic::RootDegree => "root_degree",
            NbdStatistic::NodeCount => "node_count",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CouplingReport {
    pub n: usize,
    pub lambda: f64,
    pub k: usize,
    pub reps: usize,
    pub statistic: NbdStatistic,
    pub tv: f64,
    pub bootstrap_se: f64,
}

impl CsvRecord for CouplingReport {
    const HEADER: &'static [&'static str] = &["n", "lambda", "k", "reps", "statistic", "tv", "bootstrap_se"];
    fn fields(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            fmt_f64(self.lambda),
            self.k.to_string(),
            self.reps.to_string(),
            self.statistic.to_string(),
            fmt_f64(self.tv),
            fmt_f64(self.bootstrap_se),
        ]
    }
}

pub const BOOTSTRAP_RESAMPLES: usize = 200;

fn resample_pmf<R: Rng>(xs: &[usize], rng: &mut R) -> Vec<f64> {
    let draw: Vec<usize> = (0..xs.len()).map(|_| xs[rng.random_range(0..xs.len())]).collect();
    stats::empirical_pmf(&draw)
}

/// Half the L1 distance between the empirical laws of `statistic` on
/// `B_k(0, G(n, λ/n))` and on a Galton–Watson tree of depth `k`, with a
/// bootstrap standard error.
pub fn coupling_statistic_tv(
    n: usize,
    lambda: f64,
    k: usize,
    reps: usize,
    statistic: NbdStatistic,
    master_seed: u64,
) -> Result<CouplingReport> {
    let p = check_sparse(n, lambda)?;
    if reps < 1000 {
        return Err(invalid("reps", format!("need at least 1000, got {reps}")));
    }
    let stat_graph = |g: &WeightedGraph| -> Result<usize> {
        let nb = neighborhood(g, 0, k)?;
        Ok(match statistic {
            NbdStatistic::RootDegree => if k == 0 { 0 } else { nb.subgraph.degree(0) },
            NbdStatistic::NodeCount => nb.vertices.len(),
        })
    };
    let pairs = (0..reps as u64)
        .into_par_iter()
        .map(|i| {
            let s = derive_seed(master_seed, i);
            let g = sample_er_graph(n, p, WeightDist::Exp1, derive_seed(s, 0))?;
            let a = stat_graph(&g)?;
            let b = if lambda == 0.0 {
                if statistic == NbdStatistic::NodeCount { 1 } else { 0 }
            } else {
                let t = sample_gw_tree(k, lambda, WeightDist::Exp1, derive_seed(s, 1))?;
                match statistic {
                    NbdStatistic::RootDegree => if k == 0 { 0 } else { t.root_degree() },
                    NbdStatistic::NodeCount => t.len(),
                }
            };
            Ok((a, b))
        })
        .collect::<Result<Vec<_>>>()?;
    let (xs, ys): (Vec<usize>, Vec<usize>) = pairs.into_iter().unzip();
    let tv = stats::tv_distance(&stats::empirical_pmf(&xs), &stats::empirical_pmf(&ys));
    let mut rng = stream(master_seed, tag::BOOTSTRAP);
    let boot: Vec<f64> = (0..BOOTSTRAP_RESAMPLES)
        .map(|_| stats::tv_distance(&resample_pmf(&xs, &mut rng), &resample_pmf(&ys, &mut rng)))
        .collect();
    Ok(CouplingReport { n, lambda, k, reps, statistic, tv, bootstrap_se: stats::std_dev(&boot) })
}

/// `TV(Binomial(n-1, λ/n), Poisson(λ))`, summed in log space.
pub fn binomial_poisson_tv(n: usize, lambda: f64) -> f64 {
    let p = lambda / n as f64;
    let m = n - 1;
    let hi = m.max((lambda + 40.0 * lambda.sqrt() + 40.0) as usize);
    let (mut ln_fact, mut sum) = (0.0f64, 0.0f64);
    for j in 0..=hi {
        if j > 0 {
            ln_fact += (j as f64).ln();
        }
        let pois = (j as f64 * lambda.ln() - lambda - ln_fact).exp();
        let bin = if j <= m {
            let ln_choose = libm::lgamma(m as f64 + 1.0) - ln_fact - libm::lgamma((m - j) as f64 + 1.0);
            (ln_choose + j as f64 * p.ln() + (m - j) as f64 * (-p).ln_1p()).exp()
        } else {
            0.0
        };
        sum += (pois - bin).abs();
    }
    0.5 * sum
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport {
    pub n: usize,
    pub lambda: f64,
    pub reps: usize,
    pub passed: usize,
    pub max_abs_diff: f64,
    /// Replicates by `(b_e, b'_e)` as `[00, 01, 10, 11]`.
    pub cases: [usize; 4],
}

impl CsvRecord for IdentityReport {
    const HEADER: &'static [&'static str] =
        &["n", "lambda", "reps", "passed", "max_abs_diff", "case00", "case01", "case10", "case11"];
    fn fields(&self) -> Vec<String> {
        let mut f = vec![
            self.n.to_string(),
            fmt_f64(self.lambda),
            self.reps.to_string(),
            self.passed.to_string(),
            fmt_f64(self.max_abs_diff),
        ];
        f.extend(self.cases.iter().map(|c| c.to_string()));
        f
    }
}

pub const IDENTITY_TOL: f64 = 1e-9;

/// Direct `EC_λ(G) - EC_λ(G^e)` against the four cavity differences
/// `h(v,G,V) - h(v,G^e,V) + h(u,G,V-v) - h(u,G^e,V-v)`, all from the subset
/// table, for `e = (0, 1)`.
pub fn perturbation_identity_check(n: usize, lambda: f64, reps: usize, master_seed: u64) -> Result<IdentityReport> {
    if !(2..=8).contains(&n) {
        return Err(invalid("n", format!("need 2 <= n <= 8, got {n}")));
    }
    let p = -(-lambda / n as f64).exp_m1();
    let dist = WeightDist::truncated_scaled_exp(n, lambda)?;
    let rows = (0..reps as u64)
        .into_par_iter()
        .map(|i| {
            let s = derive_seed(master_seed, i);
            let g = sample_kn_lambda(n, lambda, derive_seed(s, 0))?;
            let env = EdgeEnv::sample(&g, (0, 1), p, dist, derive_seed(s, 1))?;
            let ge = resample_edge(&g, &env)?;
            let direct = exact::diluted_edge_cover(&g, lambda)?.value - exact::diluted_edge_cover(&ge, lambda)?.value;
            let (t, te) = (brute::ec_subset_table(&g, lambda)?, brute::ec_subset_table(&ge, lambda)?);
            let full = (1usize << n) - 1;
            let (no_v, no_vu) = (full & !1, full & !3);
            let four = (t[full] - t[no_v]) - (te[full] - te[no_v]) + (t[no_v] - t[no_vu]) - (te[no_v] - te[no_vu]);
            let case = 2 * env.primary.present as usize + env.resample.present as usize;
            Ok(((direct - four).abs(), case))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut cases = [0; 4];
    rows.iter().for_each(|r| cases[r.1] += 1);
    Ok(IdentityReport {
        n,
        lambda,
        reps,
        passed: rows.iter().filter(|r| r.0 <= IDENTITY_TOL).count(),
        max_abs_diff: rows.iter().map(|r| r.0).fold(0.0, f64::max),
        cases,
    })
}
