//! Feasibility and exact solvers on trees.

mod centroid;
mod unweighted;

pub use centroid::{CentroidDecomposition, ChainEntry, Length, Spot, TreeFrame};
pub use unweighted::{kth_smallest_sorted_arrays, solve_unweighted_tree};

use crate::arrangement::{lowest_feasible_vertex, Line, LineOrigin, Strategy};
use crate::error::{Error, Result};
use crate::feasibility::{FeasibilityResult, Witness};
use crate::graph::{EdgePoint, Graph, Solution};
use crate::par;
use crate::rational::Rational;
use crate::tree::{CoverageArrays, TreeEngine};

/// One point per vertex, on its path to vertex 0.
pub type CriticalPointSet = Vec<EdgePoint>;

/// For every vertex `v`, the point on its path to vertex 0 at weighted distance `λ`
/// from `v`, or vertex 0 itself when that is closer.
pub fn critical_points(g: &Graph, lambda: &Rational) -> Result<CriticalPointSet> {
    let frame = TreeFrame::new(g, Rational::clone)?;
    Ok(critical_spots(g, &frame, lambda).iter().map(|s| s.to_edge_point(g)).collect())
}

fn critical_spots(g: &Graph, frame: &TreeFrame<Rational>, lambda: &Rational) -> Vec<Spot<Rational>> {
    frame.critical_spots(|v| lambda / g.weight(v))
}

/// Per-tree preprocessing reused by every feasibility test.
pub struct TreeFeasibility<'g> {
    g: &'g Graph,
    frame: TreeFrame<Rational>,
    engine: TreeEngine<'g>,
}

impl<'g> TreeFeasibility<'g> {
    pub fn new(g: &'g Graph) -> Result<Self> {
        let frame = TreeFrame::new(g, Rational::clone)?;
        let engine = TreeEngine::new(g)?;
        Ok(TreeFeasibility { g, frame, engine })
    }

    /// First critical point (by vertex id) whose covered subtree reaches `k` vertices.
    fn find(&self, k: usize, lambda: &Rational) -> Option<(EdgePoint, CoverageArrays)> {
        if lambda.is_negative() {
            return None;
        }
        let ca = self.engine.build(lambda, k);
        let spots = critical_spots(self.g, &self.frame, lambda);
        let found = par::find_map_first(spots.len(), |v| {
            let x = spots[v].to_edge_point(self.g);
            crate::tree::query_at_least_k(&self.engine, &ca, &x, k).then_some(x)
        });
        found.map(|x| (x, ca))
    }

    pub fn is_feasible(&self, k: usize, lambda: &Rational) -> bool {
        self.find(k, lambda).is_some()
    }

    /// Witness: the `k` covered vertices closest to the point, ties by id.
    pub fn test(&self, k: usize, lambda: &Rational) -> FeasibilityResult {
        let Some((point, ca)) = self.find(k, lambda) else {
            return FeasibilityResult { feasible: false, witness: None };
        };
        let covered = crate::tree::query_count(&self.engine, &ca, &point, true).reported.unwrap_or_default();
        let p = self.engine.map_point(&point);
        let mut keyed: Vec<(Rational, usize)> =
            covered.into_iter().map(|v| (self.engine.bt.distance_from(&p, v), v)).collect();
        keyed.sort();
        keyed.truncate(k);
        let subtree = keyed.into_iter().map(|(_, v)| v).collect();
        FeasibilityResult { feasible: true, witness: Some(Witness { point, subtree }) }
    }

    /// Lines `y = w·(d + x)` and `y = w·(d − x)` for every vertex and every centroid above
    /// it; each pair of vertices split by a centroid meets at the value of that pair.
    pub fn centroid_lines(&self) -> Vec<Line> {
        let cd = CentroidDecomposition::new(&self.frame);
        let mut lines = Vec::new();
        for (v, chain) in cd.chain.iter().enumerate() {
            let inv = self.g.weight(v).recip();
            for entry in chain {
                let origin = LineOrigin::Centroid { vertex: v, centroid: entry.centroid as usize };
                lines.push(Line { p: inv.clone(), q: -&entry.dist, origin });
                lines.push(Line { p: -&inv, q: entry.dist.clone(), origin });
            }
        }
        lines.sort_by(|a, b| (&a.p, &a.q).cmp(&(&b.p, &b.q)));
        lines.dedup_by(|a, b| a.p == b.p && a.q == b.q);
        lines
    }
}

pub fn is_feasible_tree(g: &Graph, k: usize, lambda: &Rational) -> Result<FeasibilityResult> {
    check_k(g, k)?;
    Ok(TreeFeasibility::new(g)?.test(k, lambda))
}

pub(crate) fn check_k(g: &Graph, k: usize) -> Result<()> {
    if k == 0 || k > g.n() {
        return Err(Error::KOutOfRange { k, n: g.n() });
    }
    Ok(())
}

/// `k = 1`: any vertex is optimal; vertex 0 is used.
pub(crate) fn single_vertex(g: &Graph) -> Solution {
    Solution { lambda_star: Rational::zero(), center: EdgePoint::at_vertex(g, 0), subtree: vec![0] }
}

pub fn solve_weighted_tree(g: &Graph, k: usize) -> Result<Solution> {
    solve_weighted_tree_with(g, k, Strategy::Auto)
}

pub fn solve_weighted_tree_with(g: &Graph, k: usize, strategy: Strategy) -> Result<Solution> {
    check_k(g, k)?;
    let tf = TreeFeasibility::new(g)?;
    if k == 1 {
        return Ok(single_vertex(g));
    }
    let lines = tf.centroid_lines();
    let answer = lowest_feasible_vertex(&lines, &|y| tf.is_feasible(k, y), strategy)?;
    let lambda_star = answer.v1.y;
    let witness = tf
        .test(k, &lambda_star)
        .witness
        .ok_or_else(|| Error::Internal("feasible value lost its witness".into()))?;
    Ok(Solution { lambda_star, center: witness.point, subtree: witness.subtree })
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
    fn critical_point_examples() {
        let g = path3().graph;
        let pts = critical_points(&g, &q("1/2")).unwrap();
        assert_eq!(pts[2], EdgePoint::new(&g, 1, q("1/2")));
        let pts = critical_points(&g, &q("2")).unwrap();
        assert!(pts.iter().all(|p| p.vertex(&g) == Some(0)));
        let g = wedge2().graph;
        let pts = critical_points(&g, &q("4")).unwrap();
        assert_eq!(pts[1], EdgePoint::new(&g, 0, q("2")));
        assert!(critical_points(&cycle4().graph, &q("1")).is_err());
    }

    #[test]
    fn feasibility_examples() {
        let cases = [(path5(), 3, "1", true), (path5(), 3, "99/100", false), (star3(), 2, "1/2", true)];
        for (inst, k, lam, expect) in cases {
            let g = &inst.graph;
            let res = is_feasible_tree(g, k, &q(lam)).unwrap();
            assert_eq!(res.feasible, expect, "k={k} λ={lam}");
            if let Some(w) = res.witness {
                let dm = all_pairs_distances(g);
                crate::graph::validate_covered_subtree(g, &dm, &w.point, &w.subtree, &q(lam)).unwrap();
                assert_eq!(w.subtree.len(), k);
                assert!(critical_points(g, &q(lam)).unwrap().contains(&w.point));
            }
        }
    }

    #[test]
    fn weighted_examples() {
        let cases = [(wedge2(), 2, "4"), (path5(), 3, "1"), (star3(), 4, "1"), (star3(), 1, "0")];
        for (inst, k, lam) in cases {
            let g = &inst.graph;
            let sol = solve_weighted_tree(g, k).unwrap();
            assert_eq!(sol.lambda_star, q(lam));
            sol.validate(g, &all_pairs_distances(g), k).unwrap();
        }
        let sol = solve_weighted_tree(&star3().graph, 4).unwrap();
        assert_eq!(sol.center.vertex(&star3().graph), Some(0));
        assert!(solve_weighted_tree(&path5().graph, 6).is_err());
    }

    mod prop {
        use super::*;
        use crate::generate::random_tree;
        use crate::arrangement::Strategy as Search;
        use crate::oracle::Oracle;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(40))]
            #[test]
            fn weighted_solver_matches_oracle(n in 2usize..10, weighted: bool, seed: u64, counting: bool) {
                let g = random_tree(n, weighted, seed).unwrap();
                let dm = all_pairs_distances(&g);
                let oracle = Oracle::new(&g);
                let strategy = if counting { Search::Counting } else { Search::Explicit };
                for (i, expect) in oracle.lambda_all_k().into_iter().enumerate() {
                    let k = i + 1;
                    let sol = solve_weighted_tree_with(&g, k, strategy).unwrap();
                    prop_assert_eq!(&sol.lambda_star, &expect);
                    prop_assert!(sol.validate(&g, &dm, k).is_ok());
                }
            }

            #[test]
            fn feasibility_matches_oracle(n in 2usize..12, weighted: bool, seed: u64, lam in 0i64..48) {
                let g = random_tree(n, weighted, seed).unwrap();
                let oracle = Oracle::new(&g);
                let tf = TreeFeasibility::new(&g).unwrap();
                let lambda = Rational::new(lam, 4);
                for k in 1..=n {
                    prop_assert_eq!(tf.is_feasible(k, &lambda), oracle.feasible(k, &lambda));
                }
            }
        }
    }
}
