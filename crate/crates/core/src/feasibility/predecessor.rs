use std::collections::{BTreeSet, VecDeque};

use crate::graph::{DistanceMatrix, EdgePoint, Graph};
use crate::rational::Rational;

/// Shortest-path predecessor/successor sets toward a source point, supporting removal of a
/// vertex set together with every vertex whose shortest paths all run through it.
///
/// Vertices are `0..n`; an interior source gets an extra dummy vertex with index `n`.
#[derive(Debug, Clone)]
pub struct PredecessorStructure {
    n: usize,
    root: usize,
    dist: Vec<Rational>,
    pred: Vec<BTreeSet<usize>>,
    succ: Vec<BTreeSet<usize>>,
    adj: Vec<BTreeSet<usize>>,
    alive: Vec<bool>,
}

pub fn build_predecessor_structure(g: &Graph, dm: &DistanceMatrix, x: &EdgePoint) -> PredecessorStructure {
    PredecessorStructure::at_point(g, dm, x)
}

impl PredecessorStructure {
    pub fn at_point(g: &Graph, dm: &DistanceMatrix, x: &EdgePoint) -> Self {
        let n = g.n();
        if let Some(v) = x.vertex(g) {
            return Self::rooted_at(g, dm, v, &vec![true; n]);
        }
        let e = g.edge(x.edge);
        let mut dist: Vec<Rational> = (0..n).map(|v| x.distance_to(g, dm, v)).collect();
        dist.push(Rational::zero());
        let mut ps = Self::empty(n, n + 1, n, dist);
        for (id, edge) in g.edges().iter().enumerate() {
            if id != x.edge {
                ps.link(edge.u, edge.v, &edge.len);
            }
        }
        let to_s = &e.len - &x.t;
        ps.link(n, e.u, &x.t);
        ps.link(n, e.v, &to_s);
        ps
    }

    /// Source at vertex `root`, restricted to the vertices flagged in `members`.
    pub fn rooted_at(g: &Graph, dm: &DistanceMatrix, root: usize, members: &[bool]) -> Self {
        debug_assert!(members[root]);
        let n = g.n();
        let dist = dm.row(root).to_vec();
        let mut ps = Self::empty(n, n, root, dist);
        for (v, &m) in members.iter().enumerate() {
            ps.alive[v] = m;
        }
        for edge in g.edges() {
            if members[edge.u] && members[edge.v] {
                ps.link(edge.u, edge.v, &edge.len);
            }
        }
        ps
    }

    fn empty(n: usize, size: usize, root: usize, dist: Vec<Rational>) -> Self {
        PredecessorStructure {
            n,
            root,
            dist,
            pred: vec![BTreeSet::new(); size],
            succ: vec![BTreeSet::new(); size],
            adj: vec![BTreeSet::new(); size],
            alive: vec![true; size],
        }
    }

    fn link(&mut self, a: usize, b: usize, len: &Rational) {
        self.adj[a].insert(b);
        self.adj[b].insert(a);
        if &self.dist[a] + len == self.dist[b] {
            self.pred[b].insert(a);
            self.succ[a].insert(b);
        } else if &self.dist[b] + len == self.dist[a] {
            self.pred[a].insert(b);
            self.succ[b].insert(a);
        }
    }

    /// Index of the dummy source vertex, when the source is interior to an edge.
    pub fn dummy(&self) -> Option<usize> {
        (self.pred.len() > self.n).then_some(self.n)
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn distance(&self, v: usize) -> &Rational {
        &self.dist[v]
    }

    pub fn pred(&self, v: usize) -> &BTreeSet<usize> {
        &self.pred[v]
    }

    pub fn succ(&self, v: usize) -> &BTreeSet<usize> {
        &self.succ[v]
    }

    pub fn neighbors(&self, v: usize) -> &BTreeSet<usize> {
        &self.adj[v]
    }

    pub fn is_alive(&self, v: usize) -> bool {
        self.alive[v]
    }

    /// Surviving real vertices (the dummy is never listed).
    pub fn alive_vertices(&self) -> Vec<usize> {
        (0..self.n).filter(|&v| self.alive[v]).collect()
    }

    fn detach(&mut self, v: usize) {
        self.alive[v] = false;
        for p in std::mem::take(&mut self.pred[v]) {
            self.succ[p].remove(&v);
        }
        for a in std::mem::take(&mut self.adj[v]) {
            self.adj[a].remove(&v);
        }
    }

    /// Removes `set` and returns its descendants (also removed), in discovery order.
    /// Vertices of `set` that are already gone are ignored.
    pub fn remove_set_and_descendants(&mut self, set: &[usize]) -> Vec<usize> {
        if set.contains(&self.root) && self.alive[self.root] {
            let doomed: Vec<usize> = (0..self.alive.len())
                .filter(|&v| self.alive[v] && !set.contains(&v) && v < self.n)
                .collect();
            for v in 0..self.alive.len() {
                if self.alive[v] {
                    self.detach(v);
                }
                self.succ[v].clear();
            }
            return doomed;
        }
        let mut queued = vec![false; self.alive.len()];
        for &v in set {
            queued[v] = true;
        }
        let mut queue: VecDeque<usize> = VecDeque::new();
        let mut descendants = Vec::new();
        let mut pending: VecDeque<usize> = set.iter().copied().filter(|&v| self.alive[v]).collect();
        let mut from_set = pending.len();
        while let Some(v) = pending.pop_front().or_else(|| queue.pop_front()) {
            if from_set > 0 {
                from_set -= 1;
            } else {
                descendants.push(v);
            }
            for c in std::mem::take(&mut self.succ[v]) {
                self.pred[c].remove(&v);
                if self.pred[c].is_empty() && self.alive[c] && !queued[c] {
                    queued[c] = true;
                    queue.push_back(c);
                }
            }
            self.detach(v);
        }
        descendants
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::all_pairs_distances;
    use crate::graph::fixtures::*;

    fn set(items: &[usize]) -> BTreeSet<usize> {
        items.iter().copied().collect()
    }

    fn at_vertex(inst: &crate::graph::Instance, v: usize) -> PredecessorStructure {
        let dm = all_pairs_distances(&inst.graph);
        PredecessorStructure::rooted_at(&inst.graph, &dm, v, &vec![true; inst.graph.n()])
    }

    #[test]
    fn path_from_endpoint() {
        let ps = at_vertex(&path3(), 0);
        assert_eq!(ps.pred(1), &set(&[0]));
        assert_eq!(ps.pred(2), &set(&[1]));
        assert_eq!(ps.succ(0), &set(&[1]));
        assert_eq!(ps.succ(1), &set(&[2]));
        assert!(ps.pred(0).is_empty());
        assert_eq!(ps.dummy(), None);
    }

    #[test]
    fn cycle_has_two_predecessors_opposite_the_source() {
        let ps = at_vertex(&cycle4(), 0);
        assert_eq!(ps.pred(2), &set(&[1, 3]));
    }

    #[test]
    fn interior_source_gets_a_dummy() {
        let inst = path3();
        let dm = all_pairs_distances(&inst.graph);
        let x = EdgePoint::new(&inst.graph, 0, Rational::new(1, 2));
        let ps = build_predecessor_structure(&inst.graph, &dm, &x);
        let d = ps.dummy().unwrap();
        assert_eq!(ps.pred(0), &set(&[d]));
        assert_eq!(ps.pred(1), &set(&[d]));
        assert_eq!(ps.pred(2), &set(&[1]));
        assert!(ps.pred(d).is_empty());
    }

    #[test]
    fn removal_examples() {
        let mut ps = at_vertex(&path3(), 0);
        assert_eq!(ps.remove_set_and_descendants(&[1]), vec![2]);
        assert_eq!(ps.alive_vertices(), vec![0]);

        let mut ps = at_vertex(&cycle4(), 0);
        assert!(ps.remove_set_and_descendants(&[1]).is_empty());
        assert_eq!(ps.alive_vertices(), vec![0, 2, 3]);

        let mut ps = at_vertex(&cycle4(), 0);
        assert_eq!(ps.remove_set_and_descendants(&[1, 3]), vec![2]);
    }

    #[test]
    fn removal_is_incremental() {
        let mut ps = at_vertex(&cycle4(), 0);
        assert!(ps.remove_set_and_descendants(&[1]).is_empty());
        assert_eq!(ps.remove_set_and_descendants(&[3]), vec![2]);
        assert!(ps.remove_set_and_descendants(&[3]).is_empty());
    }

    #[test]
    fn removing_nothing_or_everything() {
        let mut ps = at_vertex(&cycle4(), 0);
        assert!(ps.remove_set_and_descendants(&[]).is_empty());
        assert_eq!(ps.alive_vertices(), vec![0, 1, 2, 3]);
        let mut desc = ps.remove_set_and_descendants(&[0, 1, 2, 3]);
        desc.sort();
        assert!(desc.is_empty());
        assert!(ps.alive_vertices().is_empty());

        let mut ps = at_vertex(&cycle4(), 0);
        let mut desc = ps.remove_set_and_descendants(&[0]);
        desc.sort();
        assert_eq!(desc, vec![1, 2, 3]);
        assert!(ps.alive_vertices().is_empty());
    }

    #[test]
    fn restricted_membership() {
        let inst = cycle4();
        let dm = all_pairs_distances(&inst.graph);
        let ps = PredecessorStructure::rooted_at(&inst.graph, &dm, 0, &[true, true, true, false]);
        assert_eq!(ps.pred(2), &set(&[1]));
        assert_eq!(ps.alive_vertices(), vec![0, 1, 2]);
    }
}
