//! Exact decision procedure for general graphs: is there a point `x` and a k-subtree
//! hanging off `x` along shortest paths whose weighted radius is at most `λ`?

mod coverage;
mod predecessor;

pub use coverage::{classify_edge, coverage_profile, coverage_profile_with, Breakpoint, CoverageProfile, EdgeClassification};
pub use predecessor::{build_predecessor_structure, PredecessorStructure};

use crate::graph::{k_closest, DistanceMatrix, EdgePoint, Graph};
use crate::par;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub point: EdgePoint,
    pub subtree: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeasibilityResult {
    pub feasible: bool,
    pub witness: Option<Witness>,
}

impl FeasibilityResult {
    fn no() -> Self {
        FeasibilityResult { feasible: false, witness: None }
    }
}

/// Vertices within `λ` of `x` that stay reachable from `x` through light vertices only.
pub fn light_vertices(g: &Graph, dm: &DistanceMatrix, x: &EdgePoint, lambda: &Rational) -> Vec<usize> {
    let heavy: Vec<usize> = (0..g.n())
        .filter(|&v| g.weight(v) * &x.distance_to(g, dm, v) > *lambda)
        .collect();
    let mut ps = PredecessorStructure::at_point(g, dm, x);
    ps.remove_set_and_descendants(&heavy);
    ps.alive_vertices()
}

/// Per-edge classification computed once and shared by every test at different `λ`.
pub struct FeasibilityTester<'a> {
    g: &'a Graph,
    dm: &'a DistanceMatrix,
    edges: Vec<EdgeClassification>,
}

impl<'a> FeasibilityTester<'a> {
    pub fn new(g: &'a Graph, dm: &'a DistanceMatrix) -> Self {
        let edges = par::map_indices(g.m(), |e| classify_edge(g, dm, e));
        FeasibilityTester { g, dm, edges }
    }

    pub fn profile(&self, edge: usize, lambda: &Rational) -> CoverageProfile {
        coverage_profile_with(self.g, self.dm, &self.edges[edge], lambda)
    }

    /// Witness on the smallest edge id, at the smallest offset reaching `k`.
    pub fn test(&self, k: usize, lambda: &Rational) -> FeasibilityResult {
        if lambda.is_negative() {
            return FeasibilityResult::no();
        }
        let found = par::find_map_first(self.g.m(), |e| {
            self.profile(e, lambda).first_reaching(k).map(|t| EdgePoint::new(self.g, e, t))
        });
        match found {
            None => FeasibilityResult::no(),
            Some(point) => {
                let light = light_vertices(self.g, self.dm, &point, lambda);
                let subtree = k_closest(self.g, self.dm, &point, &light, k);
                FeasibilityResult { feasible: true, witness: Some(Witness { point, subtree }) }
            }
        }
    }

    pub fn is_feasible(&self, k: usize, lambda: &Rational) -> bool {
        !lambda.is_negative() && par::find_map_first(self.g.m(), |e| self.profile(e, lambda).first_reaching(k)).is_some()
    }
}

pub fn is_feasible_graph(g: &Graph, dm: &DistanceMatrix, k: usize, lambda: &Rational) -> FeasibilityResult {
    FeasibilityTester::new(g, dm).test(k, lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::all_pairs_distances;
    use crate::graph::fixtures::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn decisions_on_small_graphs() {
        let cases = [
            (path3(), 2, "1/2", true),
            (path3(), 2, "499/1000", false),
            (path3(), 3, "1", true),
            (path3(), 3, "999/1000", false),
            (wedge2(), 2, "4", true),
            (wedge2(), 2, "39/10", false),
            (cycle4(), 3, "1", true),
            (cycle4(), 4, "3/2", true),
            (cycle4(), 4, "149/100", false),
            (triangle(), 2, "-1", false),
        ];
        for (inst, k, lambda, expect) in cases {
            let dm = all_pairs_distances(&inst.graph);
            let res = is_feasible_graph(&inst.graph, &dm, k, &q(lambda));
            assert_eq!(res.feasible, expect, "k={k} λ={lambda}");
            if let Some(w) = res.witness {
                assert_eq!(w.subtree.len(), k);
                crate::graph::validate_covered_subtree(&inst.graph, &dm, &w.point, &w.subtree, &q(lambda)).unwrap();
            }
        }
    }

    #[test]
    fn witness_is_deterministic() {
        let inst = wedge2();
        let dm = all_pairs_distances(&inst.graph);
        let w = is_feasible_graph(&inst.graph, &dm, 2, &q("4")).witness.unwrap();
        assert_eq!(w.point, EdgePoint::new(&inst.graph, 0, q("2")));
        assert_eq!(w.subtree, vec![0, 1]);
    }

    #[test]
    fn light_set_matches_profile_value() {
        let inst = cycle4();
        let dm = all_pairs_distances(&inst.graph);
        let tester = FeasibilityTester::new(&inst.graph, &dm);
        for lambda in ["1/2", "1", "3/2"] {
            let lambda = q(lambda);
            for e in 0..inst.graph.m() {
                let p = tester.profile(e, &lambda);
                for t in ["0", "1/4", "1/2", "1"] {
                    let x = EdgePoint::new(&inst.graph, e, q(t));
                    assert_eq!(p.value_at(&q(t)), light_vertices(&inst.graph, &dm, &x, &lambda).len());
                }
            }
        }
    }
}

#[cfg(test)]
mod oracle_agreement {
    use super::*;
    use crate::generate::{random_graph, GenParams};
    use crate::graph::all_pairs_distances;
    use crate::oracle::Oracle;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn profile_matches_definition(
            n in 2usize..8,
            density in 0.0f64..0.6,
            weighted in any::<bool>(),
            seed in any::<u64>(),
            pick in any::<prop::sample::Index>(),
            ts in prop::collection::vec((0i64..=16, 1i64..=16), 8),
        ) {
            let g = random_graph(&GenParams { n, density, weighted, max_den: 16, seed }).unwrap();
            let dm = all_pairs_distances(&g);
            let oracle = Oracle::new(&g);
            let cands = oracle.candidates();
            let lambda = cands[pick.index(cands.len())].clone();
            let tester = FeasibilityTester::new(&g, &dm);
            for e in 0..g.m() {
                let p = tester.profile(e, &lambda);
                let len = &g.edge(e).len;
                let mut probes: Vec<Rational> = p.breakpoints.iter().map(|b| b.t.clone()).collect();
                probes.extend(ts.iter().map(|&(a, b)| len * &Rational::new(a.min(b), b)));
                for t in probes {
                    let x = EdgePoint { edge: e, t: t.clone() };
                    prop_assert_eq!(p.value_at(&t), oracle.coverage_count(&x, &lambda), "edge {} t {}", e, t);
                }
            }
            for k in 1..=n {
                prop_assert_eq!(tester.is_feasible(k, &lambda), oracle.feasible(k, &lambda));
            }
        }
    }
}
