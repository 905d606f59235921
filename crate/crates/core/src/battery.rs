//! The acceptance battery: one check per criterion, each returning a
//! pass/fail line with the measured quantities.

use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::cavity::{
    dmm_cavity_bracket, ec_cavity_bracket, ec_cavity_values, ec_local_approx, estimate_delta_ladder, mwm_bracket,
    mwm_parity_sequence, parity_monotone,
};
use crate::clt::{
    coupling_statistic_tv, ec_truncation_check, ks_to_normal, lambda_n, perturbation_identity_check, run_replicates,
    tree_probability, variance_rows, NbdStatistic,
};
use crate::error::{invalid, Result};
use crate::exact::{self, brute, Problem};
use crate::gwtree::sample_gw_tree;
use crate::report::{fmt_f64, CsvRecord};
use crate::seed::{derive_seed, stream, tag};
use crate::stats::ls_slope_with_errors;
use crate::vlambda::{alpha_sweep, convergence_bound_check, fixed_point_a};
use crate::wgraph::{
    compact_without, neighborhood, resample_edge, sample_er_graph, sample_kn_lambda, EdgeEnv, EdgeState,
    WeightDist, WeightedGraph,
};

/// Master seed of every acceptance run.
pub const ACCEPTANCE_SEED: u64 = 0x00C0_FFEE_5EED_0001;

pub const ORACLE_TOL: f64 = 1e-9;
pub const ORACLE_INSTANCES: usize = 500;
pub const BRACKET_INSTANCES: usize = 1000;
pub const PARITY_TREES: usize = 1000;
pub const DELTA_SAMPLES: usize = 10_000;
pub const DELTA_LAMBDA: f64 = 2.0;
pub const DELTA_SE_MULT: f64 = 2.0;
pub const SLOPE_SE_MULT: f64 = 3.0;
pub const VLAMBDA_GRID: [f64; 5] = [0.5, 1.0, 2.0, 8.0, 32.0];
pub const VLAMBDA_RESIDUAL: f64 = 1e-12;
pub const VLAMBDA_K_MAX: usize = 60;
pub const RATIO_TOL: f64 = 1e-6;
pub const A_INF: f64 = 0.5671432904;
pub const A_INF_TOL: f64 = 1e-9;
pub const ALPHA_GRID: [f64; 4] = [1.0, 4.0, 16.0, 64.0];
pub const ALPHA_M: usize = 1024;
pub const ALPHA_K_MAX: usize = 400;
pub const TRUNC_REPS: usize = 200;
pub const TRUNC_MIN_FREQ: f64 = 0.99;
pub const IDENTITY_REPS: usize = 500;
pub const CLT_REPS: usize = 2000;
pub const CLT_LADDER: [usize; 3] = [100, 400, 1600];
pub const CLT_EC_LADDER: [usize; 3] = [50, 100, 200];
pub const CLT_KS_MAX: f64 = 0.06;
pub const CLT_EC_KS_MAX: f64 = 0.08;
pub const VAR_RATIO: (f64, f64) = (0.5, 2.0);
pub const TREEPROB_REPS: usize = 5000;
pub const TREEPROB_RATIO: (f64, f64) = (0.25, 1.0);
pub const COUPLING_REPS: usize = 10_000;
pub const COUPLING_LADDER: [usize; 3] = [250, 1000, 4000];
pub const NBD_SE_MULT: f64 = 2.0;

/// Weights are rounded to this many binary digits wherever a check compares
/// floating-point values with zero tolerance, so that every sum involved is
/// exact.
pub const QUANT_BITS: i32 = 30;

#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub elapsed: Duration,
    /// Set when the only failing part is one that the sample sizes cannot
    /// resolve; the text says which.
    pub unresolvable: Option<&'static str>,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2} {}: {} ({:.1}s){}",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.elapsed.as_secs_f64(),
            self.unresolvable.filter(|_| !self.pass).map(|u| format!(" [{u}]")).unwrap_or_default()
        )
    }
}

pub const CRITERIA: [(usize, &str); 10] = [
    (1, "oracle equivalence"),
    (2, "bracket soundness"),
    (3, "matching parity monotonicity"),
    (4, "delta_k decay"),
    (5, "V_lambda analysis"),
    (6, "matching operator contraction"),
    (7, "edge cover truncation"),
    (8, "perturbation identity"),
    (9, "CLT at desk scale"),
    (10, "neighborhood diagnostics"),
];

/// Runs one criterion by number.
pub fn run_criterion(id: usize, seed: u64) -> Result<CriterionResult> {
    let name = CRITERIA
        .iter()
        .find(|c| c.0 == id)
        .map(|c| c.1)
        .ok_or_else(|| invalid("criterion", format!("no criterion {id}")))?;
    let start = Instant::now();
    let s = derive_seed(seed, id as u64);
    let mut unresolvable = None;
    let (pass, detail) = match id {
        1 => oracle_equivalence(s)?,
        2 => bracket_soundness(s)?,
        3 => parity_monotonicity(s)?,
        4 => delta_decay(s)?,
        5 => vlambda_analysis()?,
        6 => operator_contraction()?,
        7 => truncation(s)?,
        8 => identity(s)?,
        9 => {
            let (pass, rest_ok, detail) = clt_desk(s)?;
            if !pass && rest_ok {
                unresolvable = Some(KS_LADDER_NOTE);
            }
            (pass, detail)
        }
        _ => neighborhood_diagnostics(s)?,
    };
    Ok(CriterionResult { id, name, pass, detail, elapsed: start.elapsed(), unresolvable })
}

pub fn run_all(seed: u64) -> Result<Vec<CriterionResult>> {
    CRITERIA.iter().map(|c| run_criterion(c.0, seed)).collect()
}

fn quantize(x: f64) -> f64 {
    let s = (QUANT_BITS as f64).exp2();
    (x * s).round() / s
}

/// Reduction solver against exhaustive search for every problem.
pub fn oracle_equivalence(seed: u64) -> Result<(bool, String)> {
    let densities = [0.3, 0.6, 0.9];
    let lambdas = [0.5, 2.0, 8.0];
    let mut parts = Vec::new();
    let mut all = true;
    for (pi, &problem) in Problem::ALL.iter().enumerate() {
        let max_n = if matches!(problem, Problem::Ec | Problem::EcDiluted) { 7 } else { 8 };
        let rows = (0..ORACLE_INSTANCES as u64)
            .into_par_iter()
            .map(|i| -> Result<f64> {
                let s = derive_seed(derive_seed(seed, pi as u64), i);
                let n = 2 + (s % (max_n - 1)) as usize;
                let p = densities[(i % 3) as usize];
                let lambda = lambdas[((i / 3) % 3) as usize];
                let mut attempt = 0u64;
                loop {
                    let g = sample_er_graph(n, p, WeightDist::Exp1, derive_seed(s, attempt))?;
                    attempt += 1;
                    if problem == Problem::Ec && (0..n).any(|v| g.degree(v) == 0) {
                        continue;
                    }
                    let l = problem.needs_lambda().then_some(lambda);
                    let fast = exact::solve(problem, &g, l)?;
                    let slow = exact::brute_force(problem, &g, l)?;
                    let cert = fast.certificate_value(&g)?;
                    return Ok((fast.value - slow).abs().max((cert - fast.value).abs()));
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let worst = rows.iter().copied().fold(0.0, f64::max);
        let ok = worst <= ORACLE_TOL;
        all &= ok;
        parts.push(format!("{problem} {} max|diff|={worst:.1e}", rows.len()));
    }
    Ok((all, parts.join("; ")))
}

struct BracketTally {
    trees: usize,
    inside: usize,
    checks: usize,
}

impl BracketTally {
    fn ok(&self) -> bool {
        self.trees >= BRACKET_INSTANCES && self.inside == self.checks
    }

    fn show(&self, what: &str) -> String {
        format!("{what} {}/{} in {} trees", self.inside, self.checks, self.trees)
    }
}

/// Collects the first [`BRACKET_INSTANCES`] attempts whose neighborhood is a
/// tree, in index order, from batches evaluated in parallel.
fn tally<F>(attempt: F) -> Result<BracketTally>
where
    F: Fn(u64) -> Result<Option<(usize, usize)>> + Sync,
{
    const BATCH: u64 = 512;
    let mut results: Vec<(usize, usize)> = Vec::new();
    let mut next = 0u64;
    while results.len() < BRACKET_INSTANCES && next < 100 * BRACKET_INSTANCES as u64 {
        let out = (next..next + BATCH).into_par_iter().map(&attempt).collect::<Result<Vec<_>>>()?;
        next += BATCH;
        results.extend(out.into_iter().flatten());
    }
    results.truncate(BRACKET_INSTANCES);
    Ok(BracketTally {
        trees: results.len(),
        inside: results.iter().map(|r| r.0).sum(),
        checks: results.iter().map(|r| r.1).sum(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BracketRow {
    pub seed: u64,
    pub problem: Problem,
    pub n: usize,
    pub lambda: f64,
    pub k: usize,
    pub lower: f64,
    pub exact: f64,
    pub upper: f64,
}

impl BracketRow {
    pub fn inside(&self) -> bool {
        self.lower <= self.exact && self.exact <= self.upper
    }
}

impl CsvRecord for BracketRow {
    const HEADER: &'static [&'static str] = &["seed", "problem", "n", "lambda", "k", "lower", "exact", "upper", "inside"];
    fn fields(&self) -> Vec<String> {
        vec![
            self.seed.to_string(),
            self.problem.to_string(),
            self.n.to_string(),
            fmt_f64(self.lambda),
            self.k.to_string(),
            fmt_f64(self.lower),
            fmt_f64(self.exact),
            fmt_f64(self.upper),
            self.inside().to_string(),
        ]
    }
}

fn bracket_graph(problem: Problem, n: usize, lambda: f64, seed: u64) -> Result<WeightedGraph> {
    let g = match problem {
        Problem::Mwm => sample_er_graph(n, lambda / n as f64, WeightDist::Exp1, seed)?,
        _ => sample_kn_lambda(n, lambda, seed)?,
    };
    Ok(g.quantized(QUANT_BITS))
}

/// The cavity value of vertex 0 against its depth-`k` bracket, on
/// `G(n, λ/n)` with `Exp(1)` weights for MWM and on `K_n(λ)` otherwise, with
/// weights rounded to [`QUANT_BITS`] digits. `None` when the neighborhood is
/// not a tree. The edge-cover value comes from the subset table, so `n <= 20`
/// there.
pub fn bracket_instance(problem: Problem, n: usize, lambda: f64, k: usize, seed: u64) -> Result<Option<BracketRow>> {
    if n < 2 {
        return Err(invalid("n", format!("need at least 2, got {n}")));
    }
    let g = bracket_graph(problem, n, lambda, seed)?;
    let nb = neighborhood(&g, 0, k)?;
    let Some(t) = nb.as_tree.as_ref() else { return Ok(None) };
    let (gv, _) = compact_without(&g, &[0]);
    let (bracket, exact) = match problem {
        Problem::Mwm => {
            (mwm_bracket(&nb)?, exact::max_weight_matching(&g).value - exact::max_weight_matching(&gv).value)
        }
        Problem::Dmm => (
            dmm_cavity_bracket(t, k, lambda)?,
            exact::diluted_min_matching(&g, lambda)?.value - exact::diluted_min_matching(&gv, lambda)?.value,
        ),
        Problem::Ec | Problem::EcDiluted => {
            let table = brute::ec_subset_table(&g, lambda)?;
            let full = (1usize << n) - 1;
            (ec_cavity_bracket(t, k, lambda)?, table[full] - table[full & !1])
        }
    };
    Ok(Some(BracketRow { seed, problem, n, lambda, k, lower: bracket.lower, exact, upper: bracket.upper }))
}

fn root_attempt(problem: Problem, n: usize, seed: u64, i: u64) -> Result<Option<(usize, usize)>> {
    let k = 1 + (i % 3) as usize;
    Ok(bracket_instance(problem, n, 2.0, k, derive_seed(seed, i))?.map(|r| (r.inside() as usize, 1)))
}

/// The root bracket plus, for every child `u`, the sandwich
/// `min(h^U(u), w) <= h_λ(u, G, V-v) <= min(h^L(u), w)`.
fn ec_bracket_attempt(seed: u64, i: u64) -> Result<Option<(usize, usize)>> {
    let (n, lambda) = (16, 2.0);
    let k = 1 + (i % 3) as usize;
    let s = derive_seed(seed, i);
    let Some(root) = bracket_instance(Problem::Ec, n, lambda, k, s)? else { return Ok(None) };
    let g = bracket_graph(Problem::Ec, n, lambda, s)?;
    let nb = neighborhood(&g, 0, k)?;
    let t = nb.as_tree.as_ref().expect("tree checked above");
    let table = brute::ec_subset_table(&g, lambda)?;
    let no_v = ((1usize << n) - 1) & !1;
    let mut inside = root.inside() as usize;
    let mut checks = 1;
    let (hl, hu) = ec_cavity_values(t, k, lambda);
    for c in t.children(0) {
        let x = nb.vertices[c];
        let w = t.parent_weight(c).unwrap();
        let h = table[no_v] - table[no_v & !(1 << x)];
        inside += (hu[c].min(w) <= h && h <= hl[c].min(w)) as usize;
        checks += 1;
    }
    Ok(Some((inside, checks)))
}

/// `(A1)` for the edge-cover local approximations: each of the four presence
/// cases of `e = (0, 1)` in turn, with the true difference from the subset
/// table.
fn ec_local_attempt(seed: u64, i: u64) -> Result<Option<(usize, usize)>> {
    let (n, lambda) = (12, 2.0);
    let k = 1 + (i % 3) as usize;
    let case = (i / 3) % 4;
    let s = derive_seed(seed, i);
    let dist = WeightDist::truncated_scaled_exp(n, lambda)?;
    let base = sample_kn_lambda(n, lambda, derive_seed(s, 0))?.quantized(QUANT_BITS);
    let mut rng = stream(s, tag::AUX);
    let primary = EdgeState { present: case & 2 != 0, weight: quantize(dist.sample(&mut rng)) };
    let resample = EdgeState { present: case & 1 != 0, weight: quantize(dist.sample(&mut rng)) };
    let g = resample_edge(&base, &EdgeEnv::new((0, 1), primary, primary))?;
    let env = EdgeEnv::new((0, 1), primary, resample);
    let ge = resample_edge(&g, &env)?;
    let (nb, nbe) = (neighborhood(&g, 0, k)?, neighborhood(&ge, 0, k)?);
    if !nb.is_tree || !nbe.is_tree {
        return Ok(None);
    }
    let full = (1usize << n) - 1;
    let delta = brute::ec_subset_table(&g, lambda)?[full] - brute::ec_subset_table(&ge, lambda)?[full];
    let la = ec_local_approx(&nb, &nbe, &env, lambda)?;
    Ok(Some(((la.la_lower <= delta && delta <= la.la_upper) as usize, 1)))
}

pub fn bracket_soundness(seed: u64) -> Result<(bool, String)> {
    let parts = [
        ("MWM", tally(|i| root_attempt(Problem::Mwm, 40, derive_seed(seed, 1), i))?),
        ("DMM", tally(|i| root_attempt(Problem::Dmm, 40, derive_seed(seed, 2), i))?),
        ("EC", tally(|i| ec_bracket_attempt(derive_seed(seed, 3), i))?),
        ("EC local", tally(|i| ec_local_attempt(derive_seed(seed, 4), i))?),
    ];
    let pass = parts.iter().all(|p| p.1.ok());
    Ok((pass, parts.iter().map(|(w, t)| t.show(w)).collect::<Vec<_>>().join("; ")))
}

pub fn parity_monotonicity(seed: u64) -> Result<(bool, String)> {
    let flags = (0..PARITY_TREES as u64)
        .into_par_iter()
        .map(|i| {
            let t = sample_gw_tree(7, 2.0, WeightDist::Exp1, derive_seed(seed, i))?;
            Ok(parity_monotone(&mwm_parity_sequence(&t, 3)))
        })
        .collect::<Result<Vec<bool>>>()?;
    let good = flags.iter().filter(|&&f| f).count();
    Ok((good == PARITY_TREES, format!("{good}/{PARITY_TREES} trees monotone")))
}

pub fn delta_decay(seed: u64) -> Result<(bool, String)> {
    let lam = DELTA_LAMBDA;
    let mwm = estimate_delta_ladder(Problem::Mwm, &[3, 5, 7, 9], lam, WeightDist::Exp1, DELTA_SAMPLES, derive_seed(seed, 1))?;
    let ec_ks: Vec<usize> = (1..=8).collect();
    let ec = estimate_delta_ladder(Problem::Ec, &ec_ks, lam, WeightDist::uniform(lam)?, DELTA_SAMPLES, derive_seed(seed, 2))?;
    let nonincreasing = |l: &[crate::cavity::DeltaKEstimate]| {
        l.windows(2).all(|w| {
            w[1].mean_sq <= w[0].mean_sq + DELTA_SE_MULT * (w[0].std_err.powi(2) + w[1].std_err.powi(2)).sqrt()
        })
    };
    let xs: Vec<f64> = ec.iter().map(|e| e.k as f64).collect();
    let ys: Vec<f64> = ec.iter().map(|e| e.mean_sq.ln()).collect();
    let ses: Vec<f64> = ec.iter().map(|e| e.std_err / e.mean_sq).collect();
    let (slope, slope_se) = ls_slope_with_errors(&xs, &ys, &ses);
    let a2 = fixed_point_a(lam, 1e-14)?;
    let slope_ok = slope < 0.0 && slope.abs() >= a2 / 2.0 - SLOPE_SE_MULT * slope_se;
    let (m_ok, e_ok) = (nonincreasing(&mwm), nonincreasing(&ec));
    let show = |l: &[crate::cavity::DeltaKEstimate]| {
        l.iter().map(|e| format!("{}:{:.3e}", e.k, e.mean_sq)).collect::<Vec<_>>().join(" ")
    };
    Ok((
        m_ok && e_ok && slope_ok,
        format!(
            "MWM [{}] {}; EC [{}] {}; EC log-slope {slope:.3} (SE {slope_se:.3}, A_2/2 = {:.3})",
            show(&mwm),
            if m_ok { "nonincreasing" } else { "NOT nonincreasing" },
            show(&ec),
            if e_ok { "nonincreasing" } else { "NOT nonincreasing" },
            a2 / 2.0
        ),
    ))
}

pub fn vlambda_analysis() -> Result<(bool, String)> {
    let mut pass = true;
    let mut prev = 0.0;
    let mut worst_ratio = 0.0f64;
    let mut worst_resid = 0.0f64;
    for &lam in &VLAMBDA_GRID {
        let a = fixed_point_a(lam, VLAMBDA_RESIDUAL)?;
        let resid = (a - crate::vlambda::phi(lam, a)).abs();
        worst_resid = worst_resid.max(resid);
        pass &= resid < VLAMBDA_RESIDUAL && a > prev;
        prev = a;
        let rep = convergence_bound_check(lam, VLAMBDA_K_MAX)?;
        pass &= rep.bounds_hold && rep.sandwich_holds;
        match rep.two_step_ratio {
            Some(r) => {
                worst_ratio = worst_ratio.max((r - a * a).abs());
                pass &= (r - a * a).abs() < RATIO_TOL;
            }
            None => pass = false,
        }
    }
    let a_inf = fixed_point_a(f64::INFINITY, VLAMBDA_RESIDUAL)?;
    pass &= (a_inf - A_INF).abs() <= A_INF_TOL;
    Ok((
        pass,
        format!(
            "max residual {worst_resid:.1e}; max |ratio - A^2| {worst_ratio:.1e}; A_inf = {a_inf:.10}"
        ),
    ))
}

pub fn operator_contraction() -> Result<(bool, String)> {
    let runs = alpha_sweep(&ALPHA_GRID, ALPHA_M, ALPHA_K_MAX)?;
    let alphas: Vec<f64> = runs.iter().map(|r| r.alpha_hat).collect();
    let pass = alphas.windows(2).all(|w| w[1] > w[0]) && alphas[3] > alphas[0];
    let shown = ALPHA_GRID.iter().zip(&alphas).map(|(l, a)| format!("α({l})={a:.4} (1-α={:.1e})", 1.0 - a)).collect::<Vec<_>>();
    Ok((pass, shown.join(" ")))
}

pub fn truncation(seed: u64) -> Result<(bool, String)> {
    let a = ec_truncation_check(50, TRUNC_REPS, derive_seed(seed, 50))?;
    let b = ec_truncation_check(100, TRUNC_REPS, derive_seed(seed, 100))?;
    let pass = a.four_k_equal == TRUNC_REPS && b.lambda_n_frequency() >= TRUNC_MIN_FREQ;
    Ok((
        pass,
        format!(
            "n=50 EC=EC_4K {}/{}; n=100 EC_(8 ln n)=EC {}/{}",
            a.four_k_equal, a.reps, b.lambda_n_equal, b.reps
        ),
    ))
}

pub fn identity(seed: u64) -> Result<(bool, String)> {
    let r = perturbation_identity_check(6, 2.0, IDENTITY_REPS, seed)?;
    Ok((
        r.passed == r.reps,
        format!("{}/{} equal, max |diff| {:.1e}, cases {:?}", r.passed, r.reps, r.max_abs_diff, r.cases),
    ))
}

fn ladder(problem: Problem, ns: &[usize], lambda: impl Fn(usize) -> f64, seed: u64) -> Result<Vec<Vec<crate::clt::ReplicateRecord>>> {
    ns.iter().map(|&n| run_replicates(problem, n, lambda(n), CLT_REPS, derive_seed(seed, n as u64))).collect()
}

/// Shown when the KS ladder is the only failing part of the CLT criterion.
pub const KS_LADDER_NOTE: &str =
    "KS ladder order is within sampling noise: E[KS] of an exactly normal sample of 2000 is about 0.019";

/// Returns the verdict, whether everything except the strict ordering of the
/// KS ladder passed, and the measurements.
pub fn clt_desk(seed: u64) -> Result<(bool, bool, String)> {
    let mut rest_ok = true;
    let mut ladder_ok = true;
    let mut parts = Vec::new();
    let runs = [
        (Problem::Mwm, ladder(Problem::Mwm, &CLT_LADDER, |_| 2.0, derive_seed(seed, 1))?, CLT_KS_MAX, true),
        (Problem::Dmm, ladder(Problem::Dmm, &CLT_LADDER, |_| 2.0, derive_seed(seed, 2))?, CLT_KS_MAX, true),
        (Problem::EcDiluted, ladder(Problem::EcDiluted, &CLT_EC_LADDER, lambda_n, derive_seed(seed, 3))?, CLT_EC_KS_MAX, false),
    ];
    for (problem, batches, ks_max, monotone) in &runs {
        let ks: Vec<f64> = batches.iter().map(|b| ks_to_normal(b).map(|r| r.ks_distance)).collect::<Result<_>>()?;
        let rows = variance_rows(batches);
        ladder_ok &= !monotone || ks.windows(2).all(|w| w[1] <= w[0]);
        let ks_ok = *ks.last().unwrap() < *ks_max;
        let var_ok = rows.iter().all(|r| r.var_over_n > 0.0)
            && rows.iter().filter_map(|r| r.ratio).all(|q| (VAR_RATIO.0..=VAR_RATIO.1).contains(&q));
        rest_ok &= ks_ok && var_ok;
        parts.push(format!(
            "{problem} KS [{}] Var/n [{}]",
            ks.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(" "),
            rows.iter().map(|r| format!("{:.4}", r.var_over_n)).collect::<Vec<_>>().join(" ")
        ));
    }
    Ok((rest_ok && ladder_ok, rest_ok, parts.join("; ")))
}

pub fn neighborhood_diagnostics(seed: u64) -> Result<(bool, String)> {
    let a = tree_probability(500, 2.0, 2, TREEPROB_REPS, derive_seed(seed, 500))?;
    let b = tree_probability(1000, 2.0, 2, TREEPROB_REPS, derive_seed(seed, 1000))?;
    let (fa, fb) = (a.failure_rate(), b.failure_rate());
    let ratio = fb / fa;
    let ratio_se = ratio * ((a.std_err() / fa).powi(2) + (b.std_err() / fb).powi(2)).sqrt();
    let ratio_ok = ratio + NBD_SE_MULT * ratio_se >= TREEPROB_RATIO.0 && ratio - NBD_SE_MULT * ratio_se <= TREEPROB_RATIO.1;
    let tvs = COUPLING_LADDER
        .iter()
        .map(|&n| coupling_statistic_tv(n, 2.0, 2, COUPLING_REPS, NbdStatistic::NodeCount, derive_seed(seed, n as u64 + 7)))
        .collect::<Result<Vec<_>>>()?;
    let tv_ok = tvs.windows(2).all(|w| {
        w[1].tv <= w[0].tv + NBD_SE_MULT * (w[0].bootstrap_se.powi(2) + w[1].bootstrap_se.powi(2)).sqrt()
    });
    Ok((
        ratio_ok && tv_ok,
        format!(
            "non-tree rate {fa:.4} -> {fb:.4} (ratio {ratio:.3} ± {ratio_se:.3}); node_count TV [{}]",
            tvs.iter().map(|t| format!("{:.4}±{:.4}", t.tv, t.bootstrap_se)).collect::<Vec<_>>().join(" ")
        ),
    ))
}
