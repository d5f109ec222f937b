use crate::graph::{EdgePoint, Graph};
use crate::rational::Rational;

use super::rooted::RootedTree;

/// The tree with every vertex of more than two children expanded into a zero-length
/// chain of copies, so each vertex has at most two children. Original vertices keep
/// their ids; copies are numbered from `n` on.
#[derive(Debug, Clone)]
pub struct BinaryTransform {
    pub tree: RootedTree,
    /// True for original vertices.
    pub marked: Vec<bool>,
    /// Original vertex each vertex stands for.
    pub original: Vec<usize>,
    pub weight: Vec<Rational>,
    pub n_original: usize,
}

/// A point on the transformed tree: `up` above `lower` on the edge to its parent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreePoint {
    pub lower: usize,
    pub up: Rational,
}

pub fn binarize(g: &Graph, rooted: &RootedTree) -> BinaryTransform {
    let n = rooted.len();
    let mut parent: Vec<Option<usize>> = rooted.parent.clone();
    let mut plen = rooted.plen.clone();
    let mut original: Vec<usize> = (0..n).collect();
    for v in 0..n {
        let kids = &rooted.children[v];
        if kids.len() <= 2 {
            continue;
        }
        // v keeps kids[0]; copy i takes kids[i] and the next copy; the last copy takes two.
        let mut holder = v;
        for (i, &c) in kids.iter().enumerate().skip(1) {
            if i == kids.len() - 1 {
                parent[c] = Some(holder);
                break;
            }
            let copy = parent.len();
            parent.push(Some(holder));
            plen.push(Rational::zero());
            original.push(v);
            parent[c] = Some(copy);
            holder = copy;
        }
    }
    let marked = (0..parent.len()).map(|v| v < n).collect();
    let weight = original.iter().map(|&v| g.weight(v).clone()).collect();
    let tree = RootedTree::from_parents(rooted.root, parent, plen);
    BinaryTransform { tree, marked, original, weight, n_original: n }
}

impl BinaryTransform {
    pub fn len(&self) -> usize {
        self.tree.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tree.is_empty()
    }

    /// The same point of the tree expressed on the transformed tree.
    pub fn map_point(&self, g: &Graph, x: &EdgePoint) -> TreePoint {
        let e = g.edge(x.edge);
        let lower = if self.original_parent(e.v) == Some(e.u) { e.v } else { e.u };
        let up = if lower == e.u { x.t.clone() } else { &e.len - &x.t };
        TreePoint { lower, up }
    }

    fn original_parent(&self, v: usize) -> Option<usize> {
        self.tree.parent[v].map(|p| self.original[p])
    }

    /// Distance from `p` to vertex `y`.
    pub fn distance_from(&self, p: &TreePoint, y: usize) -> Rational {
        let t = &self.tree;
        if t.is_ancestor(p.lower, y) {
            &t.distance(p.lower, y) + &p.up
        } else {
            let par = t.parent[p.lower].expect("a point below the root has a parent");
            &t.distance(par, y) + &(&t.plen[p.lower] - &p.up)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;

    fn star(leaves: usize) -> Graph {
        let mut text = format!("p ckoc {} {} 1 0", leaves + 1, leaves);
        for l in 0..leaves {
            text.push_str(&format!(" / e 1 {} 1", l + 2));
        }
        graph(&text).graph
    }

    #[test]
    fn star_gets_copies() {
        let g = star3().graph;
        let bt = binarize(&g, &RootedTree::from_graph(&g, 0).unwrap());
        assert_eq!(bt.len(), 5);
        assert_eq!(bt.marked, vec![true, true, true, true, false]);
        assert_eq!(bt.tree.children[0], vec![1, 4]);
        assert_eq!(bt.tree.children[4], vec![2, 3]);
        assert!(bt.tree.plen[4].is_zero());

        let g = star(4);
        let bt = binarize(&g, &RootedTree::from_graph(&g, 0).unwrap());
        assert_eq!(bt.len(), 7);
        assert_eq!(bt.tree.children[0], vec![1, 5]);
        assert_eq!(bt.tree.children[5], vec![2, 6]);
        assert_eq!(bt.tree.children[6], vec![3, 4]);
        assert_eq!(bt.original[6], 0);
        for v in 0..bt.len() {
            assert!(bt.tree.children[v].len() <= 2);
        }
    }

    #[test]
    fn path_is_unchanged() {
        let g = path5().graph;
        let rooted = RootedTree::from_graph(&g, 0).unwrap();
        let bt = binarize(&g, &rooted);
        assert_eq!(bt.len(), 5);
        let x = EdgePoint::new(&g, 2, Rational::new(1, 3));
        let p = bt.map_point(&g, &x);
        assert_eq!(p, TreePoint { lower: 3, up: Rational::new(2, 3) });
        assert_eq!(bt.distance_from(&p, 0), Rational::new(7, 3));
        assert_eq!(bt.distance_from(&p, 4), Rational::new(5, 3));
    }

    #[test]
    fn distances_survive_the_transform() {
        let g = star(5);
        let rooted = RootedTree::from_graph(&g, 0).unwrap();
        let bt = binarize(&g, &rooted);
        for e in 0..g.m() {
            let x = EdgePoint::new(&g, e, Rational::new(1, 4));
            let p = bt.map_point(&g, &x);
            for v in 0..g.n() {
                let direct = x.distance_to(&g, &crate::graph::all_pairs_distances(&g), v);
                assert_eq!(bt.distance_from(&p, v), direct);
            }
        }
    }
}
