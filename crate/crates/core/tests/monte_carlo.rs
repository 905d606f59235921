use cavlab::clt::{run_replicates, tree_probability, variance_profile};
use cavlab::stats::{mean, std_err};
use cavlab::Problem;

#[test]
fn matching_mean_per_vertex_is_consistent() {
    let a: Vec<f64> = run_replicates(Problem::Mwm, 100, 2.0, 2000, 21).unwrap().iter().map(|r| r.value / 100.0).collect();
    let b: Vec<f64> = run_replicates(Problem::Mwm, 200, 2.0, 2000, 22).unwrap().iter().map(|r| r.value / 200.0).collect();
    let se = (std_err(&a).powi(2) + std_err(&b).powi(2)).sqrt();
    // The per-vertex mean drifts by O(1/n); allow that on top of the noise.
    assert!((mean(&a) - mean(&b)).abs() <= 3.0 * se + 2.0 / 100.0, "{} vs {} (se {se})", mean(&a), mean(&b));
}

#[test]
fn variance_grows_linearly() {
    for problem in [Problem::Mwm, Problem::EcDiluted] {
        let rows = variance_profile(problem, 2.0, &[100, 200, 400], 2000, 5).unwrap();
        for r in &rows {
            assert!(r.var_over_n > 0.0);
            if let Some(q) = r.ratio {
                assert!((0.5..=2.0).contains(&q), "{problem} n={}: ratio {q}", r.n);
            }
        }
    }
}

#[test]
fn non_tree_rate_shrinks_with_n() {
    let a = tree_probability(500, 2.0, 2, 5000, 31).unwrap();
    let b = tree_probability(1000, 2.0, 2, 5000, 32).unwrap();
    let se = (a.std_err().powi(2) + b.std_err().powi(2)).sqrt();
    assert!(b.failure_rate() <= a.failure_rate() + 2.0 * se);
}
