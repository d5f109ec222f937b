//! Brute-force reference implementations. Nothing here calls into the solvers; the
//! distances, candidate values and coverage counts are all recomputed from scratch.

use std::cell::RefCell;
use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph::{EdgePoint, Graph};
use crate::rational::Rational;

pub const LAMBDA_CAP: usize = 14;
pub const DIAMETER_CAP_N: usize = 12;
pub const DIAMETER_CAP_K: usize = 6;

#[allow(clippy::needless_range_loop)]
pub fn floyd_warshall(g: &Graph) -> Vec<Vec<Option<Rational>>> {
    let n = g.n();
    let mut d = vec![vec![None; n]; n];
    for (v, row) in d.iter_mut().enumerate() {
        row[v] = Some(Rational::zero());
    }
    for e in g.edges() {
        for (a, b) in [(e.u, e.v), (e.v, e.u)] {
            if d[a][b].as_ref().is_none_or(|cur| e.len < *cur) {
                d[a][b] = Some(e.len.clone());
            }
        }
    }
    for m in 0..n {
        for a in 0..n {
            let Some(am) = d[a][m].clone() else { continue };
            for b in 0..n {
                if let Some(mb) = &d[m][b] {
                    let via = &am + mb;
                    if d[a][b].as_ref().is_none_or(|cur| via < *cur) {
                        d[a][b] = Some(via);
                    }
                }
            }
        }
    }
    d
}

/// Cached brute-force state for one graph.
pub struct Oracle<'a> {
    g: &'a Graph,
    d: Vec<Vec<Rational>>,
    best: RefCell<HashMap<Rational, usize>>,
}

impl<'a> Oracle<'a> {
    pub fn new(g: &'a Graph) -> Self {
        let d = floyd_warshall(g)
            .into_iter()
            .map(|row| row.into_iter().map(|x| x.expect("graph is connected")).collect())
            .collect();
        Oracle { g, d, best: RefCell::new(HashMap::new()) }
    }

    pub fn distance(&self, u: usize, v: usize) -> &Rational {
        &self.d[u][v]
    }

    fn point_distances(&self, x: &EdgePoint) -> Vec<Rational> {
        let e = self.g.edge(x.edge);
        let back = &e.len - &x.t;
        (0..self.g.n())
            .map(|v| Rational::min_of(&x.t + &self.d[v][e.u], &back + &self.d[v][e.v]))
            .collect()
    }

    /// Light vertices of `x` that are reached through light vertices only.
    pub fn light_set(&self, x: &EdgePoint, lambda: &Rational) -> Vec<usize> {
        let g = self.g;
        let e = g.edge(x.edge);
        let dist = self.point_distances(x);
        let mut order: Vec<usize> = (0..g.n()).collect();
        order.sort_by(|&a, &b| dist[a].cmp(&dist[b]));
        let mut kept = vec![false; g.n()];
        for v in order {
            if g.weight(v) * &dist[v] > *lambda {
                continue;
            }
            let from_point = dist[v].is_zero()
                || (v == e.u && dist[v] == x.t)
                || (v == e.v && dist[v] == &e.len - &x.t);
            let from_kept = g
                .neighbors(v)
                .iter()
                .any(|&(p, id)| kept[p] && &dist[p] + &g.edge(id).len == dist[v]);
            kept[v] = from_point || from_kept;
        }
        (0..g.n()).filter(|&v| kept[v]).collect()
    }

    pub fn coverage_count(&self, x: &EdgePoint, lambda: &Rational) -> usize {
        self.light_set(x, lambda).len()
    }

    /// Offsets on `edge` between which the count cannot change: endpoints, the points
    /// where a distance function turns, the points where it crosses `λ`, and midpoints.
    pub fn probes(&self, edge: usize, lambda: &Rational) -> Vec<Rational> {
        let e = self.g.edge(edge);
        let len = &e.len;
        let mut ts = vec![Rational::zero(), len.clone()];
        for v in 0..self.g.n() {
            let (a, b) = (&self.d[v][e.u], &self.d[v][e.v]);
            ts.push((&(b + len) - a) / Rational::from_integer(2));
            let reach = lambda / self.g.weight(v);
            ts.push(&reach - a);
            ts.push(len - &(&reach - b));
        }
        ts.retain(|t| !t.is_negative() && t <= len);
        ts.sort();
        ts.dedup();
        let mids: Vec<Rational> = ts.windows(2).map(|w| w[0].midpoint(&w[1])).collect();
        ts.extend(mids);
        ts.sort();
        ts
    }

    pub fn max_coverage(&self, lambda: &Rational) -> usize {
        if let Some(&c) = self.best.borrow().get(lambda) {
            return c;
        }
        let mut best = 0;
        for edge in 0..self.g.m() {
            for t in self.probes(edge, lambda) {
                best = best.max(self.coverage_count(&EdgePoint { edge, t }, lambda));
            }
        }
        self.best.borrow_mut().insert(lambda.clone(), best);
        best
    }

    pub fn feasible(&self, k: usize, lambda: &Rational) -> bool {
        self.max_coverage(lambda) >= k
    }

    /// Every crossing value of two vertex distance pieces on a common edge, their values
    /// at the edge endpoints, and every vertex's value at each interior point where some
    /// vertex has two shortest paths; non-negative, sorted, deduplicated.
    pub fn candidates(&self) -> Vec<Rational> {
        let g = self.g;
        let mut out = vec![Rational::zero()];
        for e in g.edges() {
            // piece = (slope, value at t = 0)
            let mut pieces = Vec::with_capacity(2 * g.n());
            for v in 0..g.n() {
                let w = g.weight(v);
                pieces.push((w.clone(), w * &self.d[v][e.u]));
                pieces.push((-w, w * &(&e.len + &self.d[v][e.v])));
            }
            for v in 0..g.n() {
                let (a, b) = (&self.d[v][e.u], &self.d[v][e.v]);
                let t = (&(b + &e.len) - a) / Rational::from_integer(2);
                if t.is_positive() && t < e.len {
                    for u in 0..g.n() {
                        let du = Rational::min_of(&self.d[u][e.u] + &t, &(&self.d[u][e.v] + &e.len) - &t);
                        out.push(g.weight(u) * &du);
                    }
                }
            }
            for (i, (s1, c1)) in pieces.iter().enumerate() {
                out.push(c1.clone());
                out.push(c1 + &(s1 * &e.len));
                for (s2, c2) in &pieces[i + 1..] {
                    if s1 != s2 {
                        let t = (c2 - c1) / (s1 - s2);
                        out.push(c1 + &(s1 * &t));
                    }
                }
            }
        }
        out.retain(|x| !x.is_negative());
        out.sort();
        out.dedup();
        out
    }

    pub fn lambda(&self, k: usize) -> Rational {
        let cands = self.candidates();
        self.lambda_in(&cands, k)
    }

    fn lambda_in(&self, cands: &[Rational], k: usize) -> Rational {
        let i = cands.partition_point(|c| !self.feasible(k, c));
        cands[i.min(cands.len() - 1)].clone()
    }

    /// `λ*` for `k = 1..=n`, sharing the coverage evaluations between the searches.
    pub fn lambda_all_k(&self) -> Vec<Rational> {
        let cands = self.candidates();
        (1..=self.g.n()).map(|k| self.lambda_in(&cands, k)).collect()
    }

    /// `(a, c)` per vertex with distance to offset `t` equal to `min(t + a, c - t)`.
    pub fn chains(&self, edge: usize) -> Vec<(Rational, Rational)> {
        let e = self.g.edge(edge);
        (0..self.g.n())
            .map(|v| (self.d[v][e.u].clone(), &self.d[v][e.v] + &e.len))
            .collect()
    }

    /// Lowest point `(t, y)` of the k-th level of the unweighted distances on `edge`,
    /// ties to the smaller `t`.
    pub fn level_minimum(&self, edge: usize, k: usize) -> (Rational, Rational) {
        let len = self.g.edge(edge).len.clone();
        let chains = self.chains(edge);
        let mut ts = vec![Rational::zero(), len.clone()];
        for (a, _) in &chains {
            for (_, c) in &chains {
                ts.push((c - a) / Rational::from_integer(2));
            }
        }
        ts.retain(|t| !t.is_negative() && *t <= len);
        ts.sort();
        ts.dedup();
        ts.into_iter()
            .map(|t| {
                let y = brute_kth_level(&chains, k, &t);
                (t, y)
            })
            .min_by(|p, q| p.1.cmp(&q.1).then(p.0.cmp(&q.0)))
            .expect("probe set is non-empty")
    }

    /// Minimum over connected k-vertex sets `S` and spanning trees `T` of `G[S]` of the
    /// largest `w_u w_v d_T(u, v) / (w_u + w_v)`.
    pub fn min_diameter_ksubtree(&self, k: usize) -> Result<(Rational, Vec<usize>)> {
        let g = self.g;
        let n = g.n();
        if n > DIAMETER_CAP_N || k > DIAMETER_CAP_K {
            return Err(Error::TooLarge(format!("min-diameter enumeration capped at n ≤ {DIAMETER_CAP_N}, k ≤ {DIAMETER_CAP_K}")));
        }
        if k == 0 || k > n {
            return Err(Error::KOutOfRange { k, n });
        }
        let mut best: Option<(Rational, Vec<usize>)> = None;
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != k {
                continue;
            }
            let set: Vec<usize> = (0..n).filter(|&v| mask & (1 << v) != 0).collect();
            let inner: Vec<LenEdge> = g
                .edges()
                .iter()
                .filter(|e| mask & (1 << e.u) != 0 && mask & (1 << e.v) != 0)
                .map(|e| (e.u, e.v, e.len.clone()))
                .collect();
            for_each_spanning_tree(&set, &inner, |tree| {
                let w = weighted_tree_diameter(g, &set, tree);
                if best.as_ref().is_none_or(|(b, _)| w < *b) {
                    best = Some((w, set.clone()));
                }
            });
        }
        best.ok_or(Error::Internal("no connected k-subset".into()))
    }
}

/// `(u, v, length)`.
type LenEdge = (usize, usize, Rational);

fn for_each_spanning_tree(set: &[usize], edges: &[LenEdge], mut visit: impl FnMut(&[LenEdge])) {
    let need = set.len() - 1;
    let mut chosen: Vec<LenEdge> = Vec::with_capacity(need);
    fn find(parent: &mut [usize], v: usize) -> usize {
        if parent[v] != v {
            let r = find(parent, parent[v]);
            parent[v] = r;
        }
        parent[v]
    }
    fn rec(
        start: usize,
        need: usize,
        edges: &[LenEdge],
        chosen: &mut Vec<LenEdge>,
        visit: &mut dyn FnMut(&[LenEdge]),
    ) {
        if chosen.len() == need {
            let mut parent: Vec<usize> = (0..64).collect();
            let acyclic = chosen.iter().all(|(a, b, _)| {
                let (ra, rb) = (find(&mut parent, *a), find(&mut parent, *b));
                parent[ra] = rb;
                ra != rb
            });
            if acyclic {
                visit(chosen);
            }
            return;
        }
        for i in start..edges.len() {
            if edges.len() - i < need - chosen.len() {
                break;
            }
            chosen.push(edges[i].clone());
            rec(i + 1, need, edges, chosen, visit);
            chosen.pop();
        }
    }
    rec(0, need, edges, &mut chosen, &mut visit);
}

fn weighted_tree_diameter(g: &Graph, set: &[usize], tree: &[LenEdge]) -> Rational {
    let mut worst = Rational::zero();
    for &src in set {
        let mut dist: HashMap<usize, Rational> = HashMap::from([(src, Rational::zero())]);
        let mut stack = vec![src];
        while let Some(a) = stack.pop() {
            for (u, v, l) in tree {
                let b = if *u == a { *v } else if *v == a { *u } else { continue };
                if !dist.contains_key(&b) {
                    let db = &dist[&a] + l;
                    dist.insert(b, db);
                    stack.push(b);
                }
            }
        }
        for (&v, d) in &dist {
            let (wu, wv) = (g.weight(src), g.weight(v));
            let w = &(&(wu * wv) * d) / &(wu + wv);
            worst = worst.max(w);
        }
    }
    worst
}

pub fn brute_coverage_count(g: &Graph, x: &EdgePoint, lambda: &Rational) -> usize {
    Oracle::new(g).coverage_count(x, lambda)
}

pub fn brute_feasible(g: &Graph, k: usize, lambda: &Rational) -> bool {
    Oracle::new(g).feasible(k, lambda)
}

pub fn candidate_set(g: &Graph) -> Vec<Rational> {
    Oracle::new(g).candidates()
}

fn check_cap(g: &Graph) -> Result<()> {
    if g.n() > LAMBDA_CAP {
        return Err(Error::TooLarge(format!("brute-force λ* capped at n ≤ {LAMBDA_CAP}")));
    }
    Ok(())
}

pub fn brute_lambda(g: &Graph, k: usize) -> Result<Rational> {
    check_cap(g)?;
    if k == 0 || k > g.n() {
        return Err(Error::KOutOfRange { k, n: g.n() });
    }
    Ok(Oracle::new(g).lambda(k))
}

pub fn brute_lambda_all_k(g: &Graph) -> Result<Vec<Rational>> {
    check_cap(g)?;
    Ok(Oracle::new(g).lambda_all_k())
}

/// k-th smallest of `min(x + a, c - x)` over the chains.
pub fn brute_kth_level(chains: &[(Rational, Rational)], k: usize, x: &Rational) -> Rational {
    let mut vals: Vec<Rational> = chains.iter().map(|(a, c)| Rational::min_of(x + a, c - x)).collect();
    vals.sort();
    vals.swap_remove(k - 1)
}

pub fn brute_min_diameter_ksubtree(g: &Graph, k: usize) -> Result<(Rational, Vec<usize>)> {
    Oracle::new(g).min_diameter_ksubtree(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn coverage_examples() {
        let g = path3().graph;
        assert_eq!(brute_coverage_count(&g, &EdgePoint::new(&g, 0, q("1/2")), &q("1/2")), 2);
        assert_eq!(brute_coverage_count(&g, &EdgePoint::new(&g, 1, q("1/3")), &q("0")), 0);
        assert_eq!(brute_coverage_count(&g, &EdgePoint::new(&g, 0, q("1")), &q("1")), 3);
    }

    #[test]
    fn heavy_vertices_block_their_descendants() {
        let g = graph("p ckoc 3 2 2 1 / v 1 1 / v 2 10 / v 3 1 / e 1 2 1 / e 2 3 1").graph;
        let x = EdgePoint::at_vertex(&g, 0);
        assert_eq!(brute_coverage_count(&g, &x, &q("5")), 1);
        assert_eq!(brute_coverage_count(&g, &x, &q("10")), 3);
    }

    #[test]
    fn feasibility_examples() {
        let g = path3().graph;
        assert!(brute_feasible(&g, 2, &q("1/2")));
        assert!(!brute_feasible(&g, 3, &q("1/2")));
        assert!(brute_feasible(&triangle().graph, 1, &q("0")));
    }

    #[test]
    fn lambda_examples() {
        assert_eq!(brute_lambda(&wedge2().graph, 2).unwrap(), q("4"));
        assert_eq!(brute_lambda(&path3().graph, 2).unwrap(), q("1/2"));
        assert_eq!(brute_lambda(&cycle4().graph, 3).unwrap(), q("1"));
        assert_eq!(brute_lambda(&path5().graph, 3).unwrap(), q("1"));
        let all = brute_lambda_all_k(&cycle4().graph).unwrap();
        assert_eq!(all, vec![q("0"), q("1/2"), q("1"), q("3/2")]);
    }

    #[test]
    fn kth_level_examples() {
        // y = x and y = 2 - x on [0, 2]
        let lines = vec![(q("0"), q("100")), (q("100"), q("2"))];
        assert_eq!(brute_kth_level(&lines, 2, &q("1")), q("1"));
        assert_eq!(brute_kth_level(&lines, 1, &q("0")), q("0"));
        let g = path3().graph;
        let o = Oracle::new(&g);
        assert_eq!(brute_kth_level(&o.chains(0), 2, &q("1/2")), q("1/2"));
        assert_eq!(o.level_minimum(0, 2), (q("1/2"), q("1/2")));
    }

    #[test]
    fn min_diameter_examples() {
        assert_eq!(brute_min_diameter_ksubtree(&path5().graph, 3).unwrap(), (q("1"), vec![0, 1, 2]));
        assert_eq!(brute_min_diameter_ksubtree(&star3().graph, 2).unwrap().0, q("1/2"));
        assert_eq!(brute_min_diameter_ksubtree(&wedge2().graph, 2).unwrap().0, q("4"));
        assert_eq!(brute_min_diameter_ksubtree(&cycle4().graph, 4).unwrap().0, q("3/2"));
    }

    /// With vertex weights the min-diameter subtree and the optimum can disagree; a small
    /// random search finds such an instance.
    #[test]
    fn weighted_graphs_break_the_diameter_equality() {
        use crate::generate::{random_graph, GenParams};
        let found = (0..2000u64).find_map(|seed| {
            let g = random_graph(&GenParams { n: 5, density: 0.5, weighted: true, max_den: 4, seed }).unwrap();
            let o = Oracle::new(&g);
            (2..=4).find_map(|k| {
                let (w, _) = o.min_diameter_ksubtree(k).unwrap();
                let lam = o.lambda(k);
                (w != lam).then_some(seed)
            })
        });
        assert!(found.is_some(), "no weighted instance separates the two values");
    }

    #[test]
    fn caps_are_enforced() {
        let g = path5().graph;
        assert!(matches!(brute_min_diameter_ksubtree(&g, 7), Err(Error::TooLarge(_))));
        assert!(matches!(brute_lambda(&g, 0), Err(Error::KOutOfRange { .. })));
    }
}
