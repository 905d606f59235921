use cavlab::battery::bracket_instance;
use cavlab::cavity::{ec_local_approx, mwm_parity_sequence, parity_monotone};
use cavlab::exact::brute::ec_subset_table;
use cavlab::gwtree::sample_gw_tree;
use cavlab::seed::derive_seed;
use cavlab::wgraph::{neighborhood, resample_edge, sample_kn_lambda, EdgeEnv, WeightDist};
use cavlab::Problem;

#[test]
fn brackets_contain_cavity_values() {
    for problem in [Problem::Mwm, Problem::Dmm, Problem::Ec] {
        let n = if problem == Problem::Ec { 12 } else { 30 };
        let mut trees = 0;
        for i in 0..300u64 {
            let k = 1 + (i % 3) as usize;
            if let Some(r) = bracket_instance(problem, n, 2.0, k, derive_seed(77, i)).unwrap() {
                assert!(r.inside(), "{r:?}");
                trees += 1;
            }
        }
        assert!(trees > 50, "{problem}: only {trees} tree neighborhoods");
    }
}

#[test]
fn local_approximation_brackets_sampled_perturbations() {
    let (n, lambda) = (10, 2.0);
    let dist = WeightDist::truncated_scaled_exp(n, lambda).unwrap();
    let p = -(-lambda / n as f64).exp_m1();
    let mut checked = 0;
    for i in 0..400u64 {
        let s = derive_seed(5, i);
        let g = sample_kn_lambda(n, lambda, derive_seed(s, 0)).unwrap().quantized(30);
        let env = EdgeEnv::sample(&g, (0, 1), p, dist, derive_seed(s, 1)).unwrap();
        let env = EdgeEnv::new(
            env.edge,
            env.primary,
            cavlab::wgraph::EdgeState { weight: (env.resample.weight * 2f64.powi(30)).round() / 2f64.powi(30), ..env.resample },
        );
        let ge = resample_edge(&g, &env).unwrap();
        let k = 1 + (i % 3) as usize;
        let (a, b) = (neighborhood(&g, 0, k).unwrap(), neighborhood(&ge, 0, k).unwrap());
        if !a.is_tree || !b.is_tree {
            continue;
        }
        let full = (1 << n) - 1;
        let delta = ec_subset_table(&g, lambda).unwrap()[full] - ec_subset_table(&ge, lambda).unwrap()[full];
        let la = ec_local_approx(&a, &b, &env, lambda).unwrap();
        assert!(la.la_lower <= delta && delta <= la.la_upper, "{la:?} {delta}");
        checked += 1;
    }
    assert!(checked > 50);
}

#[test]
fn parity_sequences_are_monotone() {
    for i in 0..200 {
        let t = sample_gw_tree(7, 2.0, WeightDist::Exp1, i).unwrap();
        assert!(parity_monotone(&mwm_parity_sequence(&t, 3)));
    }
}
