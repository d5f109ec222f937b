use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rational::Rational;

/// A rooted tree with root distances and constant-time lowest common ancestors
/// (Euler tour plus a sparse table over first occurrences).
#[derive(Debug, Clone)]
pub struct RootedTree {
    pub root: usize,
    pub parent: Vec<Option<usize>>,
    /// Length of the edge to the parent (zero at the root).
    pub plen: Vec<Rational>,
    /// Children sorted by id.
    pub children: Vec<Vec<usize>>,
    pub depth: Vec<Rational>,
    /// Vertices in preorder.
    pub order: Vec<usize>,
    tin: Vec<usize>,
    tout: Vec<usize>,
    first: Vec<usize>,
    euler: Vec<usize>,
    level: Vec<u32>,
    sparse: Vec<Vec<u32>>,
}

pub type TreeDistanceOracle = RootedTree;

pub fn build_distance_oracle(g: &Graph) -> Result<TreeDistanceOracle> {
    RootedTree::from_graph(g, 0)
}

impl RootedTree {
    pub fn from_graph(g: &Graph, root: usize) -> Result<Self> {
        if !g.is_tree() {
            return Err(Error::NotATree);
        }
        let n = g.n();
        let mut parent = vec![None; n];
        let mut plen = vec![Rational::zero(); n];
        let mut seen = vec![false; n];
        let mut stack = vec![root];
        seen[root] = true;
        while let Some(v) = stack.pop() {
            for &(u, e) in g.neighbors(v) {
                if !seen[u] {
                    seen[u] = true;
                    parent[u] = Some(v);
                    plen[u] = g.edge(e).len.clone();
                    stack.push(u);
                }
            }
        }
        Ok(Self::from_parents(root, parent, plen))
    }

    pub fn from_parents(root: usize, parent: Vec<Option<usize>>, plen: Vec<Rational>) -> Self {
        let n = parent.len();
        let mut children = vec![Vec::new(); n];
        for (v, p) in parent.iter().enumerate() {
            if let Some(p) = p {
                children[*p].push(v);
            }
        }
        let mut depth = vec![Rational::zero(); n];
        let mut level = vec![0u32; n];
        let mut order = Vec::with_capacity(n);
        let mut tin = vec![0; n];
        let mut tout = vec![0; n];
        let mut first = vec![0; n];
        let mut euler = Vec::with_capacity(2 * n);
        // (vertex, next child index)
        let mut stack = vec![(root, 0usize)];
        tin[root] = 0;
        order.push(root);
        first[root] = 0;
        euler.push(root);
        while let Some(top) = stack.last_mut() {
            let (v, next) = *top;
            if let Some(&c) = children[v].get(next) {
                top.1 += 1;
                depth[c] = &depth[v] + &plen[c];
                level[c] = level[v] + 1;
                tin[c] = order.len();
                order.push(c);
                first[c] = euler.len();
                euler.push(c);
                stack.push((c, 0));
            } else {
                tout[v] = order.len();
                stack.pop();
                if let Some(&(p, _)) = stack.last() {
                    euler.push(p);
                }
            }
        }
        let levels: Vec<u32> = euler.iter().map(|&v| level[v]).collect();
        let mut sparse: Vec<Vec<u32>> = vec![(0..euler.len() as u32).collect()];
        let mut width = 1;
        while 2 * width <= euler.len() {
            let prev = sparse.last().unwrap();
            let row = (0..=euler.len() - 2 * width)
                .map(|i| {
                    let (a, b) = (prev[i], prev[i + width]);
                    if levels[a as usize] <= levels[b as usize] {
                        a
                    } else {
                        b
                    }
                })
                .collect();
            sparse.push(row);
            width *= 2;
        }
        RootedTree { root, parent, plen, children, depth, order, tin, tout, first, euler, level: levels, sparse }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    /// Whether `a` is an ancestor of `b` (or `b` itself).
    pub fn is_ancestor(&self, a: usize, b: usize) -> bool {
        self.tin[a] <= self.tin[b] && self.tout[b] <= self.tout[a]
    }

    pub fn lca(&self, a: usize, b: usize) -> usize {
        let (mut l, mut r) = (self.first[a], self.first[b]);
        if l > r {
            std::mem::swap(&mut l, &mut r);
        }
        let span = r - l + 1;
        let j = (usize::BITS - 1 - span.leading_zeros()) as usize;
        let (x, y) = (self.sparse[j][l], self.sparse[j][r + 1 - (1 << j)]);
        let pick = if self.level[x as usize] <= self.level[y as usize] { x } else { y };
        self.euler[pick as usize]
    }

    pub fn distance(&self, a: usize, b: usize) -> Rational {
        let c = self.lca(a, b);
        &(&self.depth[a] + &self.depth[b]) - &(&self.depth[c] * &Rational::from_integer(2))
    }

    /// Number of vertices in the subtree of `v`.
    pub fn subtree_size(&self, v: usize) -> usize {
        self.tout[v] - self.tin[v]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;

    #[test]
    fn distances_on_small_trees() {
        let t = build_distance_oracle(&path5().graph).unwrap();
        assert_eq!(t.distance(0, 4), Rational::from_integer(4));
        let t = build_distance_oracle(&star3().graph).unwrap();
        assert_eq!(t.distance(1, 2), Rational::from_integer(2));
        for v in 0..4 {
            assert!(t.distance(v, v).is_zero());
        }
        assert!(build_distance_oracle(&cycle4().graph).is_err());
    }

    #[test]
    fn ancestry_and_sizes() {
        let t = RootedTree::from_graph(&path5().graph, 2).unwrap();
        assert_eq!(t.lca(0, 4), 2);
        assert_eq!(t.lca(0, 1), 1);
        assert!(t.is_ancestor(2, 0));
        assert!(!t.is_ancestor(0, 2));
        assert_eq!(t.subtree_size(2), 5);
        assert_eq!(t.subtree_size(1), 2);
        assert_eq!(t.children[2], vec![1, 3]);
    }

    #[test]
    fn matches_graph_distances_on_random_trees() {
        use crate::generate::random_tree;
        use crate::graph::all_pairs_distances;
        for seed in 0..20 {
            let g = random_tree(30, false, seed).unwrap();
            let dm = all_pairs_distances(&g);
            let t = RootedTree::from_graph(&g, (seed as usize) % 30).unwrap();
            for a in 0..30 {
                for b in 0..30 {
                    assert_eq!(&t.distance(a, b), dm.get(a, b));
                }
            }
        }
    }
}
