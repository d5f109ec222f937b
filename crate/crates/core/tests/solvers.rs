//! Cross-solver properties through the public API.

use ckoc_core::arrangement::{solve_weighted_graph, solve_weighted_graph_with, Strategy};
use ckoc_core::feasibility::is_feasible_graph;
use ckoc_core::generate::{random_graph, random_tree, GenParams};
use ckoc_core::graph::emit_instance;
use ckoc_core::klevel::solve_unweighted_graph;
use ckoc_core::tree_solver::{is_feasible_tree, solve_unweighted_tree, solve_weighted_tree};
use ckoc_core::{all_pairs_distances, parse_instance, Error, Rational};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn emitted_instances_parse_back(n in 2usize..20, density in 0.0f64..0.5, weighted: bool, seed: u64) {
        let g = random_graph(&GenParams { n, density, weighted, max_den: 16, seed }).unwrap();
        let inst = parse_instance(&emit_instance(&g, n / 2 + 1)).unwrap();
        prop_assert_eq!(inst.graph, g);
        prop_assert_eq!(inst.k, n / 2 + 1);
    }

    #[test]
    fn graph_solvers_agree(n in 2usize..9, density in 0.0f64..0.4, seed: u64) {
        let g = random_graph(&GenParams { n, density, weighted: false, max_den: 8, seed }).unwrap();
        let dm = all_pairs_distances(&g);
        for k in 1..=n {
            let a = solve_weighted_graph_with(&g, k, Strategy::Explicit).unwrap();
            let b = solve_weighted_graph_with(&g, k, Strategy::Counting).unwrap();
            let c = solve_unweighted_graph(&g, k).unwrap();
            prop_assert_eq!(&a.lambda_star, &b.lambda_star);
            prop_assert_eq!(&a.lambda_star, &c.lambda_star);
            for s in [&a, &b, &c] {
                prop_assert!(s.validate(&g, &dm, k).is_ok());
            }
        }
    }

    /// On a tree the graph and tree solvers see the same problem.
    #[test]
    fn tree_and_graph_solvers_agree(n in 2usize..10, weighted: bool, seed: u64) {
        let g = random_tree(n, weighted, seed).unwrap();
        let dm = all_pairs_distances(&g);
        for k in 1..=n {
            let tree = solve_weighted_tree(&g, k).unwrap();
            let graph = solve_weighted_graph(&g, k).unwrap();
            prop_assert_eq!(&tree.lambda_star, &graph.lambda_star);
            if !weighted {
                prop_assert_eq!(&solve_unweighted_tree(&g, k).unwrap().lambda_star, &tree.lambda_star);
            }
            let lam = &tree.lambda_star;
            prop_assert!(is_feasible_tree(&g, k, lam).unwrap().feasible);
            prop_assert!(is_feasible_graph(&g, &dm, k, lam).feasible);
            if lam.is_positive() {
                let below = lam * &Rational::new(999, 1000);
                prop_assert!(!is_feasible_tree(&g, k, &below).unwrap().feasible);
                prop_assert!(!is_feasible_graph(&g, &dm, k, &below).feasible);
            }
        }
    }
}

#[test]
fn errors_surface_through_the_api() {
    let g = random_graph(&GenParams { n: 5, density: 0.5, weighted: true, max_den: 4, seed: 1 }).unwrap();
    assert!(matches!(solve_weighted_graph(&g, 6), Err(Error::KOutOfRange { k: 6, n: 5 })));
    assert!(matches!(solve_unweighted_graph(&g, 2), Err(Error::Weighted)));
    assert!(matches!(solve_weighted_tree(&g, 2), Err(Error::NotATree)));
    assert!(matches!(parse_instance("p ckoc 2 1 1 0\ne 1 1 1\n"), Err(Error::SelfLoop(_) | Error::Syntax { .. })));
}
