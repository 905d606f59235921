//! Flat JSON experiment configs and their validation into a [`Plan`].

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use cavlab::clt::NbdStatistic;
use cavlab::{Problem, WeightDist, WeightedGraph};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Solve,
    Bracket,
    DeltaK,
    Vlambda,
    Vlambda6,
    Clt,
    Varprofile,
    Truncation,
    Treeprob,
    Coupling,
    Identity,
}

impl Experiment {
    pub fn tag(self) -> &'static str {
        match self {
            Experiment::Solve => "solve",
            Experiment::Bracket => "bracket",
            Experiment::DeltaK => "delta_k",
            Experiment::Vlambda => "vlambda",
            Experiment::Vlambda6 => "vlambda6",
            Experiment::Clt => "clt",
            Experiment::Varprofile => "varprofile",
            Experiment::Truncation => "truncation",
            Experiment::Treeprob => "treeprob",
            Experiment::Coupling => "coupling",
            Experiment::Identity => "identity",
        }
    }
}

/// One experiment per file. Keys not used by the chosen experiment are
/// ignored; keys not listed here are rejected.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub experiment: Experiment,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub problem: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_list: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_list: Option<Vec<f64>>,
    /// `"fixed"` (default) or `"8ln"` for `λ_n = 8 ln n`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_rule: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ks: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub master_seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub statistic: Option<String>,
    /// Edge weight law for `delta_k`: `"exp1"` or `"uniform"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dist: Option<String>,
    /// Inline graph for `solve`, as `[u, v, w]` triples on `0..n`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<(usize, usize, f64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph_file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| anyhow!("config: {e}"))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaRule {
    Fixed(f64),
    EightLogN,
}

impl LambdaRule {
    pub fn at(self, n: usize) -> f64 {
        match self {
            LambdaRule::Fixed(l) => l,
            LambdaRule::EightLogN => cavlab::clt::lambda_n(n),
        }
    }
}

#[derive(Debug, Clone)]
pub enum Plan {
    Solve { problem: Problem, graph: WeightedGraph, lambda: Option<f64> },
    Bracket { problem: Problem, n: usize, lambda: f64, k: usize, reps: usize, seed: u64 },
    DeltaK { problem: Problem, ks: Vec<usize>, lambda: f64, dist: WeightDist, reps: usize, seed: u64 },
    Vlambda { lambda: f64, k_max: usize },
    Vlambda6 { lambdas: Vec<f64>, m: usize, k_max: usize },
    Clt { problem: Problem, ns: Vec<usize>, lambda: LambdaRule, reps: usize, seed: u64 },
    Varprofile { problem: Problem, ns: Vec<usize>, lambda: LambdaRule, reps: usize, seed: u64 },
    Truncation { ns: Vec<usize>, reps: usize, seed: u64 },
    Treeprob { ns: Vec<usize>, lambda: f64, k: usize, reps: usize, seed: u64 },
    Coupling { ns: Vec<usize>, lambda: f64, k: usize, reps: usize, statistic: NbdStatistic, seed: u64 },
    Identity { n: usize, lambda: f64, reps: usize, seed: u64 },
}

fn need<T: Clone>(v: &Option<T>, key: &str, exp: Experiment) -> Result<T> {
    v.clone().ok_or_else(|| anyhow!("missing key `{key}` required by experiment `{}`", exp.tag()))
}

fn positive_usize(x: usize, key: &str) -> Result<usize> {
    if x == 0 {
        bail!("key `{key}` must be positive");
    }
    Ok(x)
}

fn positive_f64(x: f64, key: &str) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        bail!("key `{key}` must be positive and finite, got {x}");
    }
    Ok(x)
}

fn nonneg_f64(x: f64, key: &str) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        bail!("key `{key}` must be nonnegative and finite, got {x}");
    }
    Ok(x)
}

impl Config {
    fn problem(&self) -> Result<Problem> {
        need(&self.problem, "problem", self.experiment)?.parse::<Problem>().map_err(|e| anyhow!("key `problem`: {e}"))
    }

    fn seed(&self) -> u64 {
        self.master_seed.unwrap_or(0)
    }

    fn reps(&self) -> Result<usize> {
        positive_usize(need(&self.reps, "reps", self.experiment)?, "reps")
    }

    fn lambda(&self) -> Result<f64> {
        positive_f64(need(&self.lambda, "lambda", self.experiment)?, "lambda")
    }

    fn k(&self) -> Result<usize> {
        need(&self.k, "k", self.experiment)
    }

    /// `n_list`, or `n` as a one-element list.
    fn ns(&self) -> Result<Vec<usize>> {
        let ns = match (&self.n_list, self.n) {
            (Some(l), _) => l.clone(),
            (None, Some(n)) => vec![n],
            (None, None) => bail!("missing key `n_list` (or `n`) required by experiment `{}`", self.experiment.tag()),
        };
        if ns.is_empty() {
            bail!("key `n_list` must not be empty");
        }
        ns.into_iter().map(|n| positive_usize(n, "n")).collect()
    }

    fn lambda_rule(&self, allow_zero: bool) -> Result<LambdaRule> {
        match self.lambda_rule.as_deref() {
            None | Some("fixed") => {
                let l = need(&self.lambda, "lambda", self.experiment)?;
                Ok(LambdaRule::Fixed(if allow_zero { nonneg_f64(l, "lambda")? } else { positive_f64(l, "lambda")? }))
            }
            Some("8ln") => Ok(LambdaRule::EightLogN),
            Some(r) => bail!("key `lambda_rule`: expected \"fixed\" or \"8ln\", got {r:?}"),
        }
    }

    /// Checks every key the experiment needs and resolves it into a plan.
    pub fn plan(&self, base_dir: &Path) -> Result<Plan> {
        let exp = self.experiment;
        if let Some(w) = self.workers {
            positive_usize(w, "workers")?;
        }
        Ok(match exp {
            Experiment::Solve => {
                let problem = self.problem()?;
                let graph = match (&self.edges, &self.graph_file) {
                    (Some(edges), _) => {
                        let n = need(&self.n, "n", exp)?;
                        WeightedGraph::new(n, edges.iter().copied()).map_err(|e| anyhow!("key `edges`: {e}"))?
                    }
                    (None, Some(path)) => {
                        let path = if path.is_absolute() { path.clone() } else { base_dir.join(path) };
                        let text = std::fs::read_to_string(&path)
                            .with_context(|| format!("key `graph_file`: reading {}", path.display()))?;
                        WeightedGraph::from_text(&text).map_err(|e| anyhow!("key `graph_file`: {e}"))?
                    }
                    (None, None) => bail!("missing key `edges` (or `graph_file`) required by experiment `solve`"),
                };
                let lambda = if problem.needs_lambda() { Some(self.lambda()?) } else { None };
                Plan::Solve { problem, graph, lambda }
            }
            Experiment::Bracket => {
                let problem = self.problem()?;
                let k = positive_usize(self.k()?, "k")?;
                Plan::Bracket {
                    problem,
                    n: positive_usize(need(&self.n, "n", exp)?, "n")?,
                    lambda: self.lambda()?,
                    k,
                    reps: self.reps()?,
                    seed: self.seed(),
                }
            }
            Experiment::DeltaK => {
                let problem = self.problem()?;
                let lambda = self.lambda()?;
                let ks = match (&self.ks, self.k) {
                    (Some(ks), _) => ks.clone(),
                    (None, Some(k)) => vec![k],
                    (None, None) => bail!("missing key `ks` (or `k`) required by experiment `delta_k`"),
                };
                let dist = match self.dist.as_deref() {
                    Some("exp1") => WeightDist::Exp1,
                    Some("uniform") => WeightDist::uniform(lambda)?,
                    None if problem == Problem::Mwm => WeightDist::Exp1,
                    None => WeightDist::uniform(lambda)?,
                    Some(d) => bail!("key `dist`: expected \"exp1\" or \"uniform\", got {d:?}"),
                };
                Plan::DeltaK { problem, ks, lambda, dist, reps: self.reps()?, seed: self.seed() }
            }
            Experiment::Vlambda => Plan::Vlambda { lambda: self.lambda()?, k_max: need(&self.k_max, "k_max", exp)? },
            Experiment::Vlambda6 => {
                let lambdas = match (&self.lambda_list, self.lambda) {
                    (Some(l), _) => l.clone(),
                    (None, Some(l)) => vec![l],
                    (None, None) => bail!("missing key `lambda_list` (or `lambda`) required by experiment `vlambda6`"),
                };
                for &l in &lambdas {
                    positive_f64(l, "lambda_list")?;
                }
                Plan::Vlambda6 { lambdas, m: self.m.unwrap_or(1024), k_max: self.k_max.unwrap_or(400) }
            }
            Experiment::Clt | Experiment::Varprofile => {
                let problem = self.problem()?;
                let lambda = self.lambda_rule(problem == Problem::Mwm)?;
                let (ns, reps, seed) = (self.ns()?, self.reps()?, self.seed());
                if exp == Experiment::Clt {
                    Plan::Clt { problem, ns, lambda, reps, seed }
                } else {
                    Plan::Varprofile { problem, ns, lambda, reps, seed }
                }
            }
            Experiment::Truncation => Plan::Truncation { ns: self.ns()?, reps: self.reps()?, seed: self.seed() },
            Experiment::Treeprob => Plan::Treeprob {
                ns: self.ns()?,
                lambda: nonneg_f64(need(&self.lambda, "lambda", exp)?, "lambda")?,
                k: self.k()?,
                reps: self.reps()?,
                seed: self.seed(),
            },
            Experiment::Coupling => Plan::Coupling {
                ns: self.ns()?,
                lambda: nonneg_f64(need(&self.lambda, "lambda", exp)?, "lambda")?,
                k: self.k()?,
                reps: self.reps()?,
                statistic: need(&self.statistic, "statistic", exp)?
                    .parse()
                    .map_err(|e| anyhow!("key `statistic`: {e}"))?,
                seed: self.seed(),
            },
            Experiment::Identity => Plan::Identity {
                n: need(&self.n, "n", exp)?,
                lambda: self.lambda()?,
                reps: self.reps()?,
                seed: self.seed(),
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_key_rejected() {
        let e = Config::parse(r#"{"experiment": "vlambda", "lambda": 2, "k_max": 3, "lamda": 1}"#).unwrap_err();
        assert!(e.to_string().contains("lamda"), "{e}");
    }

    #[test]
    fn missing_lambda_named() {
        let c = Config::parse(r#"{"experiment": "vlambda", "k_max": 60}"#).unwrap();
        let e = c.plan(Path::new(".")).unwrap_err();
        assert!(e.to_string().contains("`lambda`"), "{e}");
    }

    #[test]
    fn parse_error_has_line() {
        let e = Config::parse("{\n\"experiment\": \"clt\",\n\"n\": ,\n}").unwrap_err();
        assert!(e.to_string().contains("line 3"), "{e}");
    }

    #[test]
    fn rules() {
        let c = Config::parse(r#"{"experiment": "clt", "problem": "ECdiluted", "n_list": [50], "lambda_rule": "8ln", "reps": 60}"#)
            .unwrap();
        let Plan::Clt { lambda, .. } = c.plan(Path::new(".")).unwrap() else { panic!() };
        assert_eq!(lambda.at(50), cavlab::clt::lambda_n(50));
        let c = Config::parse(r#"{"experiment": "clt", "problem": "DMM", "n": 50, "lambda": 0, "reps": 60}"#).unwrap();
        assert!(c.plan(Path::new(".")).is_err());
    }
}
