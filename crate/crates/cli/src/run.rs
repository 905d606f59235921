//! Executes a [`Plan`] and writes its tables.

use anyhow::Result;
use cavlab::battery::bracket_instance;
use cavlab::cavity::estimate_delta_ladder;
use cavlab::clt::{
    coupling_statistic_tv, ec_truncation_check, ks_to_normal, perturbation_identity_check, run_replicates,
    tree_probability, variance_rows,
};
use cavlab::report::{fmt_f64, to_csv, CsvRecord};
use cavlab::seed::derive_seed;
use cavlab::vlambda::{alpha_sweep, convergence_bound_check};
use cavlab::{exact, Problem};
use rayon::prelude::*;

use crate::config::Plan;

/// One emitted table: a file-name suffix (empty for the main output) and its
/// CSV text.
pub struct Table {
    pub suffix: &'static str,
    pub csv: String,
}

fn main_table(csv: String) -> Vec<Table> {
    vec![Table { suffix: "", csv }]
}

struct SolveRow {
    problem: Problem,
    n: usize,
    lambda: Option<f64>,
    value: f64,
    brute_force: Option<f64>,
    chosen: Vec<(usize, usize)>,
}

impl CsvRecord for SolveRow {
    const HEADER: &'static [&'static str] = &["problem", "n", "lambda", "value", "brute_force", "chosen_edges"];
    fn fields(&self) -> Vec<String> {
        vec![
            self.problem.to_string(),
            self.n.to_string(),
            self.lambda.map(fmt_f64).unwrap_or_default(),
            fmt_f64(self.value),
            self.brute_force.map(fmt_f64).unwrap_or_default(),
            self.chosen.iter().map(|(u, v)| format!("{u}-{v}")).collect::<Vec<_>>().join(" "),
        ]
    }
}

pub fn execute(plan: &Plan) -> Result<Vec<Table>> {
    Ok(match plan {
        Plan::Solve { problem, graph, lambda } => {
            let sol = exact::solve(*problem, graph, *lambda)?;
            let brute_force = exact::brute_force(*problem, graph, *lambda).ok();
            main_table(to_csv(&[SolveRow {
                problem: *problem,
                n: graph.n(),
                lambda: *lambda,
                value: sol.value,
                brute_force,
                chosen: sol.chosen_edges,
            }]))
        }
        Plan::Bracket { problem, n, lambda, k, reps, seed } => {
            let rows = (0..*reps as u64)
                .into_par_iter()
                .map(|i| bracket_instance(*problem, *n, *lambda, *k, derive_seed(*seed, i)))
                .collect::<cavlab::Result<Vec<_>>>()?;
            let rows: Vec<_> = rows.into_iter().flatten().collect();
            main_table(to_csv(&rows))
        }
        Plan::DeltaK { problem, ks, lambda, dist, reps, seed } => {
            main_table(to_csv(&estimate_delta_ladder(*problem, ks, *lambda, *dist, *reps, *seed)?))
        }
        Plan::Vlambda { lambda, k_max } => main_table(to_csv(&convergence_bound_check(*lambda, *k_max)?.rows)),
        Plan::Vlambda6 { lambdas, m, k_max } => main_table(to_csv(&alpha_sweep(lambdas, *m, *k_max)?)),
        Plan::Clt { problem, ns, lambda, reps, seed } => {
            let mut records = Vec::new();
            let mut ks = Vec::new();
            for &n in ns {
                let r = run_replicates(*problem, n, lambda.at(n), *reps, derive_seed(*seed, n as u64))?;
                if r.len() >= 50 {
                    ks.push(ks_to_normal(&r)?);
                }
                records.extend(r);
            }
            vec![Table { suffix: "", csv: to_csv(&records) }, Table { suffix: "ks", csv: to_csv(&ks) }]
        }
        Plan::Varprofile { problem, ns, lambda, reps, seed } => {
            let batches = ns
                .iter()
                .map(|&n| run_replicates(*problem, n, lambda.at(n), *reps, derive_seed(*seed, n as u64)))
                .collect::<cavlab::Result<Vec<_>>>()?;
            main_table(to_csv(&variance_rows(&batches)))
        }
        Plan::Truncation { ns, reps, seed } => {
            let rows = ns
                .iter()
                .map(|&n| ec_truncation_check(n, *reps, derive_seed(*seed, n as u64)))
                .collect::<cavlab::Result<Vec<_>>>()?;
            main_table(to_csv(&rows))
        }
        Plan::Treeprob { ns, lambda, k, reps, seed } => {
            let rows = ns
                .iter()
                .map(|&n| tree_probability(n, *lambda, *k, *reps, derive_seed(*seed, n as u64)))
                .collect::<cavlab::Result<Vec<_>>>()?;
            main_table(to_csv(&rows))
        }
        Plan::Coupling { ns, lambda, k, reps, statistic, seed } => {
            let rows = ns
                .iter()
                .map(|&n| coupling_statistic_tv(n, *lambda, *k, *reps, *statistic, derive_seed(*seed, n as u64)))
                .collect::<cavlab::Result<Vec<_>>>()?;
            main_table(to_csv(&rows))
        }
        Plan::Identity { n, lambda, reps, seed } => {
            main_table(to_csv(&[perturbation_identity_check(*n, *lambda, *reps, *seed)?]))
        }
    })
}
