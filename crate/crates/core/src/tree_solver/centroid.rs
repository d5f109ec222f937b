use std::fmt::Debug;

use crate::error::{Error, Result};
use crate::graph::{EdgePoint, Graph};
use crate::rational::Rational;

/// Exact length arithmetic: rationals, or integers after scaling every length by a
/// common multiple of the denominators.
pub trait Length: Clone + Ord + Send + Sync + Debug {
    fn zero() -> Self;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn half(&self) -> Self;
}

impl Length for Rational {
    fn zero() -> Self {
        Rational::zero()
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn half(&self) -> Self {
        self * &Rational::new(1, 2)
    }
}

impl Length for i64 {
    fn zero() -> Self {
        0
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn half(&self) -> Self {
        debug_assert!(self % 2 == 0, "scaled lengths are even");
        self / 2
    }
}

/// A point of the tree: a vertex, or `from_upper` below `upper` on the edge to its child
/// `lower` (possibly at either end).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Spot<L> {
    Vertex(usize),
    Edge { upper: usize, lower: usize, from_upper: L },
}

/// The tree rooted at vertex 0 with lengths in `L`.
#[derive(Debug, Clone)]
pub struct TreeFrame<L> {
    pub adj: Vec<Vec<(usize, L)>>,
    pub parent: Vec<Option<usize>>,
    pub plen: Vec<L>,
    pub depth: Vec<L>,
    /// Preorder from the root.
    pub order: Vec<usize>,
}

impl<L: Length> TreeFrame<L> {
    pub fn new(g: &Graph, len: impl Fn(&Rational) -> L) -> Result<Self> {
        if !g.is_tree() {
            return Err(Error::NotATree);
        }
        let n = g.n();
        let mut adj = vec![Vec::new(); n];
        for e in g.edges() {
            let l = len(&e.len);
            adj[e.u].push((e.v, l.clone()));
            adj[e.v].push((e.u, l));
        }
        let mut parent = vec![None; n];
        let mut plen = vec![L::zero(); n];
        let mut depth = vec![L::zero(); n];
        let mut order = Vec::with_capacity(n);
        let mut stack = vec![0];
        while let Some(v) = stack.pop() {
            order.push(v);
            for (u, l) in &adj[v] {
                if Some(*u) != parent[v] {
                    parent[*u] = Some(v);
                    plen[*u] = l.clone();
                    depth[*u] = depth[v].plus(l);
                    stack.push(*u);
                }
            }
        }
        Ok(TreeFrame { adj, parent, plen, depth, order })
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    /// For every vertex, the point on its path to the root at distance `radius(v)`,
    /// or the root when the root is closer. One binary search on the current root path
    /// per vertex.
    pub fn critical_spots(&self, radius: impl Fn(usize) -> L) -> Vec<Spot<L>> {
        let mut out = vec![Spot::Vertex(0); self.len()];
        let mut path: Vec<usize> = Vec::new();
        let mut stack = vec![(0usize, 0usize)];
        while let Some(top) = stack.last_mut() {
            let (v, next) = *top;
            if next == 0 {
                path.push(v);
                let r = radius(v);
                if self.depth[v] > r {
                    let target = self.depth[v].minus(&r);
                    let i = path.partition_point(|&a| self.depth[a] < target);
                    let (upper, lower) = (path[i - 1], path[i]);
                    out[v] = Spot::Edge { upper, lower, from_upper: target.minus(&self.depth[upper]) };
                }
            }
            let kids = &self.adj[v];
            let mut i = next;
            while i < kids.len() && Some(kids[i].0) == self.parent[v] {
                i += 1;
            }
            if i < kids.len() {
                top.1 = i + 1;
                stack.push((kids[i].0, 0));
            } else {
                stack.pop();
                path.pop();
            }
        }
        out
    }

    /// Distances from a spot to every vertex.
    pub fn distances_from(&self, spot: &Spot<L>) -> Vec<L> {
        let n = self.len();
        let mut dist: Vec<Option<L>> = vec![None; n];
        let mut stack = Vec::new();
        match spot {
            Spot::Vertex(v) => {
                dist[*v] = Some(L::zero());
                stack.push(*v);
            }
            Spot::Edge { upper, lower, from_upper } => {
                dist[*upper] = Some(from_upper.clone());
                dist[*lower] = Some(self.plen[*lower].minus(from_upper));
                stack.extend([*upper, *lower]);
            }
        }
        while let Some(v) = stack.pop() {
            let dv = dist[v].clone().expect("visited");
            for (u, l) in &self.adj[v] {
                if dist[*u].is_none() {
                    dist[*u] = Some(dv.plus(l));
                    stack.push(*u);
                }
            }
        }
        dist.into_iter().map(|d| d.expect("tree is connected")).collect()
    }
}

impl Spot<Rational> {
    pub fn to_edge_point(&self, g: &Graph) -> EdgePoint {
        match self {
            Spot::Vertex(v) => EdgePoint::at_vertex(g, *v),
            Spot::Edge { upper, lower, from_upper } => {
                let id = g.edge_between(*upper, *lower).expect("tree edge");
                let e = g.edge(id);
                let t = if e.u == *upper { from_upper.clone() } else { &e.len - from_upper };
                EdgePoint::new(g, id, t)
            }
        }
    }
}

/// Slot of a centroid itself in its own chain.
pub const SELF: u32 = u32::MAX;

/// One level of a vertex's centroid chain.
#[derive(Debug, Clone)]
pub struct ChainEntry<L> {
    pub centroid: u32,
    /// Neighbor of the centroid through which the vertex is reached.
    pub slot: u32,
    pub dist: L,
}

/// Recursive centroid decomposition. Every vertex keeps its chain of centroids from the
/// top level down to the level where it is the centroid itself.
#[derive(Debug, Clone)]
pub struct CentroidDecomposition<L> {
    pub chain: Vec<Vec<ChainEntry<L>>>,
    /// Sorted distances from each centroid to its whole component.
    pub all: Vec<Vec<L>>,
    /// Same, split by slot.
    pub by_slot: Vec<Vec<Vec<L>>>,
}

impl<L: Length> CentroidDecomposition<L> {
    pub fn new(frame: &TreeFrame<L>) -> Self {
        let n = frame.len();
        let adj = &frame.adj;
        let mut removed = vec![false; n];
        let mut bpar = vec![usize::MAX; n];
        let mut size = vec![0usize; n];
        let mut heaviest = vec![0usize; n];
        let mut chain: Vec<Vec<ChainEntry<L>>> = vec![Vec::new(); n];
        let mut all = vec![Vec::new(); n];
        let mut by_slot = vec![Vec::new(); n];
        let mut pending = vec![0usize];
        let mut comp = Vec::new();
        while let Some(s) = pending.pop() {
            comp.clear();
            comp.push(s);
            bpar[s] = usize::MAX;
            let mut i = 0;
            while i < comp.len() {
                let v = comp[i];
                size[v] = 1;
                heaviest[v] = 0;
                for &(u, _) in &adj[v] {
                    if !removed[u] && u != bpar[v] {
                        bpar[u] = v;
                        comp.push(u);
                    }
                }
                i += 1;
            }
            for &v in comp.iter().skip(1).rev() {
                let p = bpar[v];
                size[p] += size[v];
                heaviest[p] = heaviest[p].max(size[v]);
            }
            let total = comp.len();
            let c = comp
                .iter()
                .copied()
                .filter(|&v| 2 * heaviest[v].max(total - size[v]) <= total)
                .min()
                .expect("every tree has a centroid");

            let mut dists = vec![L::zero()];
            let mut slots = Vec::new();
            chain[c].push(ChainEntry { centroid: c as u32, slot: SELF, dist: L::zero() });
            let mut stack = Vec::new();
            for (j, (u, l)) in adj[c].iter().filter(|(u, _)| !removed[*u]).enumerate() {
                let mut part = Vec::new();
                stack.push((*u, c, l.clone()));
                while let Some((v, from, d)) = stack.pop() {
                    chain[v].push(ChainEntry { centroid: c as u32, slot: j as u32, dist: d.clone() });
                    for (w, lw) in &adj[v] {
                        if *w != from && !removed[*w] {
                            stack.push((*w, v, d.plus(lw)));
                        }
                    }
                    part.push(d);
                }
                part.sort();
                dists.extend(part.iter().cloned());
                slots.push(part);
                pending.push(*u);
            }
            dists.sort();
            all[c] = dists;
            by_slot[c] = slots;
            removed[c] = true;
        }
        CentroidDecomposition { chain, all, by_slot }
    }

    pub fn level(&self, v: usize) -> usize {
        self.chain[v].len() - 1
    }

    /// Vertices of `v`'s component at `entry.centroid`'s level within `r` of the centroid,
    /// minus those in `v`'s own slot.
    fn through(&self, entry: &ChainEntry<L>, r: &L) -> usize {
        let c = entry.centroid as usize;
        let mut count = within(&self.all[c], r);
        if entry.slot != SELF {
            count -= within(&self.by_slot[c][entry.slot as usize], r);
        }
        count
    }

    /// Vertices within `r` of vertex `v`, counting only components from level `from` down.
    pub fn ball_at_vertex(&self, v: usize, r: &L, from: usize) -> usize {
        self.chain[v][from..].iter().map(|e| self.through(e, &r.minus(&e.dist))).sum()
    }

    /// Vertices within `r` of a point on the edge `a`–`b`, `ta` from `a` and `tb` from `b`.
    pub fn ball_at_point(&self, a: usize, b: usize, ta: &L, tb: &L, r: &L) -> usize {
        // the endpoint that became a centroid first
        let (top, other, t_top, t_other) =
            if self.level(a) < self.level(b) { (a, b, ta, tb) } else { (b, a, tb, ta) };
        let lt = self.level(top);
        let mut count = 0;
        for l in 0..lt {
            let (ea, eb) = (&self.chain[a][l], &self.chain[b][l]);
            let d = std::cmp::min(ta.plus(&ea.dist), tb.plus(&eb.dist));
            count += self.through(&self.chain[top][l], &r.minus(&d));
        }
        let slot = self.chain[other][lt].slot;
        let c = top;
        let rest = r.minus(t_top);
        count += within(&self.all[c], &rest) - within(&self.by_slot[c][slot as usize], &rest);
        count + self.ball_at_vertex(other, &r.minus(t_other), lt + 1)
    }
}

/// Entries of the sorted slice at most `r`.
fn within<L: Length>(sorted: &[L], r: &L) -> usize {
    sorted.partition_point(|d| d <= r)
}
