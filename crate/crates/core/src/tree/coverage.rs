use crate::graph::{EdgePoint, Graph};
use crate::rational::Rational;

use super::binary::{BinaryTransform, TreePoint};
use super::spine::{NodeKind, SpineTree};

/// Piecewise-constant description of the covered subtree of one spine node as seen
/// from an outside point at distance x from its top (or bottom) vertex. Tuple `i` holds
/// for every x in `[x[i+1], x[i])`; `x[0]` is +∞ (stored as `None`).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CoverageArray {
    pub x: Vec<Option<Rational>>,
    /// Covered vertices, copies included.
    pub y: Vec<u32>,
    /// Covered original vertices.
    pub z: Vec<u32>,
    /// Tuple whose x is the largest distance at which the whole subspine is covered.
    pub full: Option<usize>,
    /// Indices at which `z` increases, truncated to the first `cap`.
    pub gate: Vec<u32>,
    q_start: Vec<u32>,
    q: Vec<u32>,
}

impl CoverageArray {
    fn single(v: usize, marked: bool, lambda: &Rational, w: &Rational) -> Self {
        let r = lambda / w;
        let m = u32::from(marked);
        let mut a = CoverageArray {
            x: vec![None, Some(r.clone())],
            y: vec![0, 1],
            z: vec![0, m],
            full: Some(1),
            gate: Vec::new(),
            q_start: vec![0, 0, m],
            q: if marked { vec![v as u32] } else { Vec::new() },
        };
        if r.is_positive() {
            a.x.push(Some(Rational::zero()));
            a.y.push(1);
            a.z.push(m);
            a.q_start.push(m);
        }
        a
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Last tuple whose x is at least `key`.
    pub fn lookup(&self, key: &Rational) -> usize {
        self.x.partition_point(|x| x.as_ref().is_none_or(|x| x >= key)) - 1
    }

    pub fn count(&self, key: &Rational) -> u32 {
        self.z[self.lookup(key)]
    }

    /// Exact below the truncation, otherwise at least the truncation.
    pub fn capped_count(&self, key: &Rational) -> u32 {
        let j = self.gate.partition_point(|&i| self.x[i as usize].as_ref().is_none_or(|x| x >= key));
        if j == 0 {
            0
        } else {
            self.z[self.gate[j - 1] as usize]
        }
    }

    /// Original vertices covered at `key`.
    pub fn reported(&self, key: &Rational) -> &[u32] {
        &self.q[..self.q_start[self.lookup(key) + 1] as usize]
    }

    pub fn threshold(&self) -> Option<&Rational> {
        self.full.map(|i| self.x[i].as_ref().expect("thresholds are finite"))
    }

    /// Whether the whole subspine is covered from distance `key`.
    pub fn covers(&self, key: &Rational) -> bool {
        self.threshold().is_some_and(|x| key <= x)
    }

    fn position(&self, x: &Rational) -> Option<usize> {
        let i = self.lookup(x);
        (self.x[i].as_ref() == Some(x)).then_some(i)
    }

    fn set_gate(&mut self, cap: usize) {
        self.gate = (1..self.len()).filter(|&i| self.z[i] > self.z[i - 1]).take(cap).map(|i| i as u32).collect();
    }

    /// `a` from distance x plus `b` from distance x + d, the latter only once x is within
    /// `a`'s threshold.
    fn combine(a: &CoverageArray, b: &CoverageArray, d: &Rational) -> CoverageArray {
        let gate = a.threshold();
        let mut cands: Vec<Rational> = a.x[1..].iter().flatten().cloned().collect();
        if let Some(g) = gate {
            for xb in b.x[1..].iter().flatten() {
                let s = xb - d;
                if !s.is_negative() && &s <= g {
                    cands.push(s);
                }
            }
        }
        cands.sort_unstable_by(|p, q| q.cmp(p));
        cands.dedup();

        let mut out = CoverageArray {
            x: Vec::with_capacity(cands.len() + 1),
            y: Vec::with_capacity(cands.len() + 1),
            z: Vec::with_capacity(cands.len() + 1),
            q_start: Vec::with_capacity(cands.len() + 2),
            ..Default::default()
        };
        out.x.push(None);
        out.y.push(a.y[0] + b.y[0]);
        out.z.push(a.z[0] + b.z[0]);
        out.q_start.extend([0, 0]);
        let (mut pa, mut pb) = (0, 0);
        for x in cands {
            while pa + 1 < a.len() && a.x[pa + 1].as_ref().is_some_and(|ax| ax >= &x) {
                pa += 1;
                out.q.extend_from_slice(&a.q[a.q_start[pa] as usize..a.q_start[pa + 1] as usize]);
            }
            if gate.is_some_and(|g| &x <= g) {
                let reach = &x + d;
                while pb + 1 < b.len() && b.x[pb + 1].as_ref().is_some_and(|bx| bx >= &reach) {
                    pb += 1;
                    out.q.extend_from_slice(&b.q[b.q_start[pb] as usize..b.q_start[pb + 1] as usize]);
                }
            }
            out.x.push(Some(x));
            out.y.push(a.y[pa] + b.y[pb]);
            out.z.push(a.z[pa] + b.z[pb]);
            out.q_start.push(out.q.len() as u32);
        }
        out
    }

    /// Panics if the array is malformed.
    pub fn check(&self) {
        assert!(self.x[0].is_none() && self.y[0] == 0 && self.z[0] == 0);
        for i in 1..self.len() {
            let x = self.x[i].as_ref().expect("only the first tuple is unbounded");
            assert!(!x.is_negative());
            if let Some(prev) = &self.x[i - 1] {
                assert!(x < prev, "x must strictly decrease");
            }
            assert!(self.y[i] >= self.y[i - 1] && self.z[i] >= self.z[i - 1]);
            assert!(self.z[i] <= self.y[i]);
            assert_eq!(self.q_start[i + 1] as usize, self.z[i] as usize);
        }
    }
}

/// Coverage arrays of every spine node for one λ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageArrays {
    pub lambda: Rational,
    /// Truncation of the `gate` arrays.
    pub cap: usize,
    top: Vec<CoverageArray>,
    /// `None` where the bottom array equals the top array.
    bottom: Vec<Option<CoverageArray>>,
}

impl CoverageArrays {
    pub fn top(&self, node: usize) -> &CoverageArray {
        &self.top[node]
    }

    pub fn bottom(&self, node: usize) -> &CoverageArray {
        self.bottom[node].as_ref().unwrap_or(&self.top[node])
    }

    pub fn check(&self) {
        for (id, a) in self.top.iter().enumerate() {
            a.check();
            self.bottom(id).check();
        }
    }
}

/// Marked vertices of the covered subtree at a point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageAnswer {
    pub count: usize,
    pub reported: Option<Vec<usize>>,
}

/// λ-independent preprocessing of a tree for coverage queries.
#[derive(Debug, Clone)]
pub struct TreeEngine<'g> {
    g: &'g Graph,
    pub bt: BinaryTransform,
    pub spine: SpineTree,
}

impl<'g> TreeEngine<'g> {
    pub fn new(g: &'g Graph) -> crate::error::Result<Self> {
        let rooted = super::rooted::RootedTree::from_graph(g, 0)?;
        let bt = super::binary::binarize(g, &rooted);
        let spine = super::spine::spine_decompose(&bt);
        Ok(TreeEngine { g, bt, spine })
    }

    pub fn graph(&self) -> &'g Graph {
        self.g
    }

    fn depth(&self, v: usize) -> &Rational {
        &self.bt.tree.depth[v]
    }

    fn single(&self, v: usize, lambda: &Rational) -> CoverageArray {
        CoverageArray::single(self.bt.original[v], self.bt.marked[v], lambda, &self.bt.weight[v])
    }

    pub fn build(&self, lambda: &Rational, cap: usize) -> CoverageArrays {
        let nodes = &self.spine.nodes;
        let mut top: Vec<CoverageArray> = Vec::with_capacity(nodes.len());
        let mut bottom: Vec<Option<CoverageArray>> = Vec::with_capacity(nodes.len());
        for node in nodes {
            let (mut t, mut b) = match node.kind {
                NodeKind::Leaf(v) => (self.single(v, lambda), None),
                NodeKind::Hang { v, child } => {
                    let c = nodes[child].top;
                    let mut t = CoverageArray::combine(&self.single(v, lambda), &top[child], &self.bt.tree.plen[c]);
                    t.full = Some(1);
                    (t, None)
                }
                NodeKind::Join { left, right } => {
                    let (l, r) = (&nodes[left], &nodes[right]);
                    let d = self.depth(l.top) - self.depth(r.top);
                    let mut t = CoverageArray::combine(&top[right], &top[left], &d);
                    t.full = joined_threshold(top[right].threshold(), top[left].threshold(), &d)
                        .map(|x| t.position(&x).expect("threshold is a breakpoint"));
                    let (bl, br) = (bottom[left].as_ref().unwrap_or(&top[left]), bottom[right].as_ref().unwrap_or(&top[right]));
                    let d = self.depth(l.bottom) - self.depth(r.bottom);
                    let mut b = CoverageArray::combine(bl, br, &d);
                    b.full = joined_threshold(bl.threshold(), br.threshold(), &d)
                        .map(|x| b.position(&x).expect("threshold is a breakpoint"));
                    (t, Some(b))
                }
            };
            t.set_gate(cap);
            if let Some(b) = b.as_mut() {
                b.set_gate(cap);
            }
            top.push(t);
            bottom.push(b);
        }
        CoverageArrays { lambda: lambda.clone(), cap, top, bottom }
    }

    pub fn map_point(&self, x: &EdgePoint) -> TreePoint {
        self.bt.map_point(self.g, x)
    }

    /// Walks from the point's leaf to the root of the spine tree, adding the covered
    /// parts hanging off the path. Stops early once `stop_at` vertices are counted.
    fn walk(&self, ca: &CoverageArrays, p: &TreePoint, stop_at: Option<usize>, mut report: Option<&mut Vec<usize>>) -> usize {
        let nodes = &self.spine.nodes;
        let capped = stop_at.is_some_and(|k| k <= ca.cap);
        let lookup = |a: &CoverageArray, key: &Rational, report: &mut Option<&mut Vec<usize>>| -> usize {
            if let Some(out) = report.as_deref_mut() {
                out.extend(a.reported(key).iter().map(|&v| v as usize));
            }
            if capped {
                a.capped_count(key) as usize
            } else {
                a.count(key) as usize
            }
        };
        let done = |count: usize| stop_at.is_some_and(|k| count >= k);

        let mut cur = self.spine.leaf_of[p.lower];
        let start = ca.top(cur);
        let mut count = lookup(start, &p.up, &mut report);
        // `down`: everything from the point down to the bottom of `cur` is light.
        // `up`: everything from the point up to the top of `cur` is light.
        let mut down = start.covers(&p.up);
        let mut up = true;
        while let Some(parent) = nodes[cur].parent {
            if done(count) {
                return count;
            }
            match nodes[parent].kind {
                NodeKind::Join { left, right } => {
                    if cur == right {
                        if down {
                            let key = self.bt.distance_from(p, nodes[left].top);
                            let a = ca.top(left);
                            count += lookup(a, &key, &mut report);
                            down = a.covers(&key);
                        }
                    } else if up {
                        let key = self.bt.distance_from(p, nodes[right].bottom);
                        let a = ca.bottom(right);
                        count += lookup(a, &key, &mut report);
                        up = a.covers(&key);
                    }
                }
                NodeKind::Hang { v, .. } => {
                    let dist = self.bt.distance_from(p, v);
                    if !up || &self.bt.weight[v] * &dist > ca.lambda {
                        return count;
                    }
                    if self.bt.marked[v] {
                        count += 1;
                        if let Some(out) = report.as_deref_mut() {
                            out.push(v);
                        }
                    }
                    down = true;
                }
                NodeKind::Leaf(_) => unreachable!("leaves have no children"),
            }
            cur = parent;
        }
        count
    }
}

fn joined_threshold(upper: Option<&Rational>, lower: Option<&Rational>, d: &Rational) -> Option<Rational> {
    let x = Rational::min_of(upper?.clone(), lower? - d);
    (!x.is_negative()).then_some(x)
}

pub fn build_coverage_arrays(engine: &TreeEngine, lambda: &Rational, cap: usize) -> CoverageArrays {
    engine.build(lambda, cap)
}

pub fn query_count(engine: &TreeEngine, ca: &CoverageArrays, x: &EdgePoint, report: bool) -> CoverageAnswer {
    let p = engine.map_point(x);
    if report {
        let mut out = Vec::new();
        let count = engine.walk(ca, &p, None, Some(&mut out));
        out.sort_unstable();
        debug_assert_eq!(out.len(), count);
        CoverageAnswer { count, reported: Some(out) }
    } else {
        CoverageAnswer { count: engine.walk(ca, &p, None, None), reported: None }
    }
}

pub fn query_at_least_k(engine: &TreeEngine, ca: &CoverageArrays, x: &EdgePoint, k: usize) -> bool {
    engine.walk(ca, &engine.map_point(x), Some(k), None) >= k
}
