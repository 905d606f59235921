//! The distribution operator of the edge-cover bracket values and its
//! minimum-matching analogue.
//!
//! `(V_λ F)(x) = exp(-∫₀^{λ/2} F) e^{-x}` maps everything onto the family
//! `c·e^{-x}`, so iterating it reduces to the scalar recursion
//! `a_{k+1} = φ(b_k)`, `b_{k+1} = φ(a_k)` with `φ(x) = e^{-x}(1 - e^{-λ/2})`,
//! where `a_k = E_λ(F_k)` and `b_k = E_λ(G_k)`. The matching operator
//! `(V F)(x) = exp(-∫_{-x}^{λ/2} F)` has no such closed family and is
//! iterated on a grid.

use crate::error::{invalid, Error, Result};
use crate::report::{fmt_f64, CsvRecord};
use crate::stats::ls_slope;

fn mass(lambda: f64) -> Result<f64> {
    if lambda == f64::INFINITY {
        return Ok(1.0);
    }
    if !(lambda > 0.0) {
        return Err(invalid("lambda", format!("must be positive, got {lambda}")));
    }
    Ok(-(-lambda / 2.0).exp_m1())
}

/// `φ(x) = e^{-x}(1 - e^{-λ/2})`.
pub fn phi(lambda: f64, x: f64) -> f64 {
    let c = if lambda == f64::INFINITY { 1.0 } else { -(-lambda / 2.0).exp_m1() };
    (-x).exp() * c
}

/// The root of `A = e^{-A}(1 - e^{-λ/2})` by Newton's method from 0.
/// `λ = ∞` gives the root of `A = e^{-A}`.
pub fn fixed_point_a(lambda: f64, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(invalid("tol", format!("must be positive, got {tol}")));
    }
    let c = mass(lambda)?;
    let g = |a: f64| a - c * (-a).exp();
    let mut a = 0.0f64;
    for _ in 0..100 {
        let e = c * (-a).exp();
        let step = (a - e) / (1.0 + e);
        a -= step;
        if g(a).abs() < tol && step.abs() <= 4.0 * f64::EPSILON * a.max(f64::MIN_POSITIVE) {
            break;
        }
    }
    if g(a).abs() < tol {
        Ok(a)
    } else {
        Err(Error::Degenerate(format!("Newton residual {} above tolerance {tol}", g(a).abs())))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarIterate {
    pub k: usize,
    /// `E_λ(F_k)`.
    pub a: f64,
    /// `E_λ(G_k)`.
    pub b: f64,
    pub lambda: f64,
    /// `F_k(x) = f_coeff · e^{-x}` for `k >= 1`.
    pub f_coeff: f64,
    /// `G_k(x) = g_coeff · e^{-x}` for `k >= 1`.
    pub g_coeff: f64,
}

impl ScalarIterate {
    /// `F_k(x)` on `(0, λ/2]`; `F_0 ≡ 0`.
    pub fn f_at(&self, x: f64) -> f64 {
        if self.k == 0 { 0.0 } else { self.f_coeff * (-x).exp() }
    }

    /// `G_k(x)` on `(0, λ/2]`; `G_0 ≡ 1`.
    pub fn g_at(&self, x: f64) -> f64 {
        if self.k == 0 { 1.0 } else { self.g_coeff * (-x).exp() }
    }
}

/// Iterates `0..=k_max` of the scalar recursion from `a_0 = 0`, `b_0 = λ/2`.
pub fn scalar_iteration(lambda: f64, k_max: usize) -> Result<Vec<ScalarIterate>> {
    mass(lambda)?;
    if !lambda.is_finite() {
        return Err(invalid("lambda", "the iteration starts from b_0 = λ/2 and needs finite λ"));
    }
    let mut out = Vec::with_capacity(k_max + 1);
    let mut cur = ScalarIterate { k: 0, a: 0.0, b: lambda / 2.0, lambda, f_coeff: 0.0, g_coeff: 1.0 };
    out.push(cur);
    for k in 1..=k_max {
        cur = ScalarIterate {
            k,
            a: phi(lambda, cur.b),
            b: phi(lambda, cur.a),
            lambda,
            f_coeff: (-cur.b).exp(),
            g_coeff: (-cur.a).exp(),
        };
        out.push(cur);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundRow {
    pub lambda: f64,
    pub k: usize,
    pub a_k: f64,
    pub b_k: f64,
    /// `b_k - a_k`.
    pub gap: f64,
    /// `λ e^{-⌊k/2⌋ A_λ}`.
    pub bound: f64,
    pub pass: bool,
}

impl CsvRecord for BoundRow {
    const HEADER: &'static [&'static str] = &["lambda", "k", "a_k", "b_k", "gap", "bound", "pass"];
    fn fields(&self) -> Vec<String> {
        vec![
            fmt_f64(self.lambda),
            self.k.to_string(),
            fmt_f64(self.a_k),
            fmt_f64(self.b_k),
            fmt_f64(self.gap),
            fmt_f64(self.bound),
            self.pass.to_string(),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub lambda: f64,
    pub a_lambda: f64,
    pub rows: Vec<BoundRow>,
    /// Every row satisfies both exponential bounds.
    pub bounds_hold: bool,
    /// `a_k <= A_λ <= b_k` for every row, and `a_k` nondecreasing, `b_k`
    /// nonincreasing, up to [`SANDWICH_ULPS`] units in the last place of `A_λ`.
    pub sandwich_holds: bool,
    /// `(b_{k+2} - A_λ)/(b_k - A_λ)` at the first `k` where `b_k - A_λ`
    /// drops below [`RATIO_PROBE`], if reached.
    pub two_step_ratio: Option<f64>,
}

/// Rounding slack allowed in the sandwich comparisons once the iterates have
/// converged to `A_λ` in floating point.
pub const SANDWICH_ULPS: f64 = 4.0;

/// Distance from `A_λ` at which the two-step contraction ratio is measured:
/// small enough that the second-order term is negligible, large enough that
/// rounding is.
pub const RATIO_PROBE: f64 = 1e-7;

pub fn convergence_bound_check(lambda: f64, k_max: usize) -> Result<ConvergenceReport> {
    if k_max < 2 {
        return Err(invalid("k_max", "need at least 2"));
    }
    let a_lambda = fixed_point_a(lambda, 1e-14)?;
    let iters = scalar_iteration(lambda, k_max)?;
    let slack = SANDWICH_ULPS * f64::EPSILON * a_lambda;
    let mut rows = Vec::with_capacity(iters.len());
    let mut sandwich_holds = true;
    for (i, it) in iters.iter().enumerate() {
        let decay = (-((it.k / 2) as f64) * a_lambda).exp();
        let bound = lambda * decay;
        let pass = it.b - a_lambda <= bound && a_lambda - it.a <= a_lambda * decay;
        sandwich_holds &= it.a <= a_lambda + slack && a_lambda <= it.b + slack;
        if i > 0 {
            sandwich_holds &= iters[i - 1].a <= it.a + slack && it.b <= iters[i - 1].b + slack;
        }
        rows.push(BoundRow { lambda, k: it.k, a_k: it.a, b_k: it.b, gap: it.b - it.a, bound, pass });
    }
    let two_step_ratio = iters
        .iter()
        .position(|it| it.b - a_lambda < RATIO_PROBE)
        .filter(|&k| k + 2 < iters.len() && iters[k].b - a_lambda > 0.0)
        .map(|k| (iters[k + 2].b - a_lambda) / (iters[k].b - a_lambda));
    Ok(ConvergenceReport {
        lambda,
        a_lambda,
        bounds_hold: rows.iter().all(|r| r.pass),
        rows,
        sandwich_holds,
        two_step_ratio,
    })
}

/// A function sampled on `m` equally spaced points of `[lo, hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFn {
    pub lo: f64,
    pub hi: f64,
    pub values: Vec<f64>,
}

impl GridFn {
    pub fn constant(lo: f64, hi: f64, m: usize, c: f64) -> Self {
        GridFn { lo, hi, values: vec![c; m] }
    }

    pub fn m(&self) -> usize {
        self.values.len()
    }

    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / (self.m() - 1) as f64
    }

    pub fn sup_distance(&self, other: &GridFn) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// One application of `(V F)(x) = exp(-∫_{-x}^{λ/2} F)` on the symmetric grid
/// over `[-λ/2, λ/2]`, with trapezoid suffix integrals. Grid point `i` has
/// `-x_i = x_{m-1-i}`.
pub fn matching_operator(f: &GridFn) -> GridFn {
    let m = f.m();
    let h = f.step();
    let mut suffix = vec![0.0; m];
    for j in (0..m - 1).rev() {
        suffix[j] = suffix[j + 1] + 0.5 * h * (f.values[j] + f.values[j + 1]);
    }
    let values = (0..m).map(|i| (-suffix[m - 1 - i]).exp()).collect();
    GridFn { lo: f.lo, hi: f.hi, values }
}

/// `(V_λ F)(x) = exp(-∫₀^{λ/2} F) e^{-x}` on a grid over `[0, λ/2]`.
pub fn edge_cover_operator(f: &GridFn) -> GridFn {
    let h = f.step();
    let m = f.m();
    let integral: f64 = (0..m - 1).map(|j| 0.5 * h * (f.values[j] + f.values[j + 1])).sum();
    let c = (-integral).exp();
    let values = (0..m).map(|i| c * (-(f.lo + i as f64 * h)).exp()).collect();
    GridFn { lo: f.lo, hi: f.hi, values }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchingOperatorRun {
    pub lambda: f64,
    pub m: usize,
    pub k_max: usize,
    /// Iterates from `F ≡ 0`, index `k = 0..=k_max`.
    pub from_zero: Vec<GridFn>,
    /// Iterates from `F ≡ 1`.
    pub from_one: Vec<GridFn>,
    /// Sup-norm gap between the two families at each `k`.
    pub gaps: Vec<f64>,
    /// Estimated contraction of the gap per two steps.
    pub alpha_hat: f64,
    /// Number of gaps used for `alpha_hat`.
    pub fit_points: usize,
    /// `false` when the fitted two-step ratio is not below one.
    pub contracting: bool,
}

impl CsvRecord for MatchingOperatorRun {
    const HEADER: &'static [&'static str] = &["lambda", "alpha_hat", "m", "k_max"];
    fn fields(&self) -> Vec<String> {
        vec![fmt_f64(self.lambda), fmt_f64(self.alpha_hat), self.m.to_string(), self.k_max.to_string()]
    }
}

/// Gaps below this are treated as rounding noise and excluded from the fit.
pub const GAP_FLOOR: f64 = 1e-13;
/// Number of trailing gaps used in the least-squares fit.
pub const FIT_WINDOW: usize = 20;

pub fn matching_operator_iterate(lambda: f64, m: usize, k_max: usize) -> Result<MatchingOperatorRun> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(invalid("lambda", format!("must be positive and finite, got {lambda}")));
    }
    if m < 64 {
        return Err(invalid("m", format!("grid needs at least 64 points, got {m}")));
    }
    if k_max < 2 {
        return Err(invalid("k_max", "need at least 2"));
    }
    let (lo, hi) = (-lambda / 2.0, lambda / 2.0);
    let mut from_zero = vec![GridFn::constant(lo, hi, m, 0.0)];
    let mut from_one = vec![GridFn::constant(lo, hi, m, 1.0)];
    for k in 0..k_max {
        from_zero.push(matching_operator(&from_zero[k]));
        from_one.push(matching_operator(&from_one[k]));
    }
    let gaps: Vec<f64> = from_zero.iter().zip(&from_one).map(|(a, b)| a.sup_distance(b)).collect();
    let usable = gaps.iter().position(|&g| g < GAP_FLOOR).unwrap_or(gaps.len());
    let start = usable.saturating_sub(FIT_WINDOW);
    let (xs, ys): (Vec<f64>, Vec<f64>) = (start..usable).map(|k| (k as f64, gaps[k].ln())).unzip();
    if xs.len() < 3 {
        return Err(Error::Degenerate(format!("only {} usable gaps for the contraction fit", xs.len())));
    }
    let (slope, _) = ls_slope(&xs, &ys);
    let alpha_hat = (2.0 * slope).exp();
    Ok(MatchingOperatorRun {
        lambda,
        m,
        k_max,
        from_zero,
        from_one,
        gaps,
        alpha_hat,
        fit_points: xs.len(),
        contracting: alpha_hat < 1.0,
    })
}

/// `α̂` for each `λ` in the sweep.
pub fn alpha_sweep(lambdas: &[f64], m: usize, k_max: usize) -> Result<Vec<MatchingOperatorRun>> {
    use rayon::prelude::*;
    lambdas.par_iter().map(|&l| matching_operator_iterate(l, m, k_max)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a_infinity() {
        let a = fixed_point_a(f64::INFINITY, 1e-15).unwrap();
        assert!((a - 0.5671432904097838).abs() < 1e-12);
        assert!((a - (-a).exp()).abs() < 1e-15);
    }

    #[test]
    fn residual_and_monotone_in_lambda() {
        let mut prev = 0.0;
        for lam in [0.1, 0.5, 1.0, 2.0, 8.0, 32.0, 200.0] {
            let a = fixed_point_a(lam, 1e-12).unwrap();
            assert!((a - phi(lam, a)).abs() < 1e-12);
            assert!(a > prev);
            prev = a;
        }
        assert!(fixed_point_a(0.0, 1e-12).is_err());
        assert!(fixed_point_a(1.0, 0.0).is_err());
    }

    #[test]
    fn first_step() {
        let it = scalar_iteration(2.0, 1).unwrap();
        assert_eq!(it[0].a, 0.0);
        assert_eq!(it[0].b, 1.0);
        assert!((it[1].b - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
        assert_eq!(it[0].f_at(0.3), 0.0);
        assert_eq!(it[0].g_at(0.3), 1.0);
    }

    #[test]
    fn scalar_recursion_matches_grid_operator() {
        // E_λ(V_λ G_k) computed on a fine grid agrees with φ(b_k).
        let lam = 2.0;
        let it = scalar_iteration(lam, 3).unwrap();
        let m = 4001;
        let mut g = GridFn::constant(0.0, lam / 2.0, m, 1.0);
        for k in 1..=3 {
            g = edge_cover_operator(&g);
            let h = g.step();
            let e: f64 = (0..m - 1).map(|j| 0.5 * h * (g.values[j] + g.values[j + 1])).sum();
            let target = if k % 2 == 1 { it[k].a } else { it[k].b };
            assert!((e - target).abs() < 1e-6, "k={k}: {e} vs {target}");
        }
    }

    #[test]
    fn lambda_two_at_sixty() {
        let lam = 2.0;
        let a = fixed_point_a(lam, 1e-14).unwrap();
        let it = scalar_iteration(lam, 60).unwrap();
        assert!((it[60].b - a).abs() < 1e-10);
        let rep = convergence_bound_check(lam, 60).unwrap();
        assert!((rep.two_step_ratio.unwrap() - a * a).abs() < 1e-6);
    }

    #[test]
    fn bounds_hold() {
        for lam in [0.5, 2.0] {
            let rep = convergence_bound_check(lam, 40).unwrap();
            assert!(rep.bounds_hold && rep.sandwich_holds);
            assert!(rep.two_step_ratio.unwrap() <= (-rep.a_lambda).exp());
            assert!(rep.rows[0].b_k - rep.a_lambda <= lam);
        }
    }

    #[test]
    fn operator_from_zero_is_one() {
        let f = GridFn::constant(-1.0, 1.0, 128, 0.0);
        assert!(matching_operator(&f).values.iter().all(|&v| v == 1.0));
    }

    #[test]
    fn operator_is_antitone() {
        let m = 256;
        let lo = GridFn { lo: -2.0, hi: 2.0, values: (0..m).map(|i| 0.3 * (i as f64 / m as f64)).collect() };
        let hi = GridFn { lo: -2.0, hi: 2.0, values: lo.values.iter().map(|v| v + 0.2).collect() };
        let (a, b) = (matching_operator(&lo), matching_operator(&hi));
        assert!(a.values.iter().zip(&b.values).all(|(x, y)| x >= y));
        let (a, b) = (edge_cover_operator(&lo), edge_cover_operator(&hi));
        assert!(a.values.iter().zip(&b.values).all(|(x, y)| x >= y));
    }

    #[test]
    fn contraction_at_lambda_one() {
        let run = matching_operator_iterate(1.0, 1024, 100).unwrap();
        assert!(run.contracting && run.alpha_hat < 1.0);
        assert!(run.gaps.windows(2).take(10).all(|w| w[1] < w[0]));
    }

    #[test]
    fn grid_refinement_is_stable() {
        for lam in [1.0, 4.0, 16.0] {
            let a = matching_operator_iterate(lam, 1024, 200).unwrap().alpha_hat;
            let b = matching_operator_iterate(lam, 2048, 200).unwrap().alpha_hat;
            assert!((a - b).abs() < 1e-3, "λ={lam}: {a} vs {b}");
        }
    }
}
