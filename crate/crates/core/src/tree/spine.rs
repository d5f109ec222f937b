use super::binary::BinaryTransform;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    /// A spine vertex without a light child.
    Leaf(usize),
    /// A spine vertex together with the search tree of its light child's spine.
    Hang { v: usize, child: usize },
    /// Two adjacent stretches of one spine; `left` is the lower one.
    Join { left: usize, right: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpineNode {
    pub kind: NodeKind,
    pub parent: Option<usize>,
    /// Highest and lowest spine vertex covered by the node.
    pub top: usize,
    pub bottom: usize,
    /// Vertices in the node's subtree of the tree.
    pub size: usize,
}

/// Heavy-path decomposition with one weight-balanced search tree per path, linked
/// through the light edges into a single tree of logarithmic height. Nodes are stored
/// children first.
#[derive(Debug, Clone)]
pub struct SpineTree {
    pub nodes: Vec<SpineNode>,
    /// Leaf or hang node of each vertex.
    pub leaf_of: Vec<usize>,
    pub root: usize,
}

struct Builder<'a> {
    bt: &'a BinaryTransform,
    nodes: Vec<SpineNode>,
    leaf_of: Vec<usize>,
}

impl Builder<'_> {
    fn heavy(&self, v: usize) -> Option<usize> {
        let t = &self.bt.tree;
        t.children[v].iter().copied().max_by(|&a, &b| t.subtree_size(a).cmp(&t.subtree_size(b)).then(b.cmp(&a)))
    }

    fn push(&mut self, node: SpineNode) -> usize {
        self.nodes.push(node);
        self.nodes.len() - 1
    }

    fn spine(&mut self, top: usize) -> usize {
        let mut path = vec![top];
        while let Some(h) = self.heavy(*path.last().unwrap()) {
            path.push(h);
        }
        let mut leaves = Vec::with_capacity(path.len());
        for &v in path.iter().rev() {
            let heavy = self.heavy(v);
            let light = self.bt.tree.children[v].iter().copied().find(|&c| Some(c) != heavy);
            let node = match light {
                Some(c) => {
                    let child = self.spine(c);
                    let size = 1 + self.nodes[child].size;
                    let id = self.push(SpineNode { kind: NodeKind::Hang { v, child }, parent: None, top: v, bottom: v, size });
                    self.nodes[child].parent = Some(id);
                    id
                }
                None => self.push(SpineNode { kind: NodeKind::Leaf(v), parent: None, top: v, bottom: v, size: 1 }),
            };
            self.leaf_of[v] = node;
            leaves.push(node);
        }
        self.balanced(&leaves)
    }

    /// Search tree over `items` (bottom to top), split where the weights balance best.
    fn balanced(&mut self, items: &[usize]) -> usize {
        if items.len() == 1 {
            return items[0];
        }
        let total: usize = items.iter().map(|&i| self.nodes[i].size).sum();
        let mut acc = 0;
        let mut split = 1;
        let mut best = usize::MAX;
        for (m, &i) in items.iter().enumerate().take(items.len() - 1) {
            acc += self.nodes[i].size;
            let gap = (2 * acc).abs_diff(total);
            if gap < best {
                best = gap;
                split = m + 1;
            }
        }
        let left = self.balanced(&items[..split]);
        let right = self.balanced(&items[split..]);
        let node = SpineNode {
            kind: NodeKind::Join { left, right },
            parent: None,
            top: self.nodes[right].top,
            bottom: self.nodes[left].bottom,
            size: self.nodes[left].size + self.nodes[right].size,
        };
        let id = self.push(node);
        self.nodes[left].parent = Some(id);
        self.nodes[right].parent = Some(id);
        id
    }
}

pub fn spine_decompose(bt: &BinaryTransform) -> SpineTree {
    let mut b = Builder { bt, nodes: Vec::with_capacity(2 * bt.len()), leaf_of: vec![0; bt.len()] };
    let root = b.spine(bt.tree.root);
    SpineTree { nodes: b.nodes, leaf_of: b.leaf_of, root }
}

impl SpineTree {
    pub fn height(&self) -> usize {
        let mut depth = vec![0usize; self.nodes.len()];
        for id in (0..self.nodes.len()).rev() {
            if let Some(p) = self.nodes[id].parent {
                depth[id] = depth[p] + 1;
            }
        }
        depth.into_iter().max().unwrap_or(0)
    }
}
