//! Problem instances, exact shortest distances and the per-edge view of the weighted
//! distance functions.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::par;
use crate::rational::Rational;

/// An undirected edge with `u < v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub len: Rational,
}

/// Connected simple graph with positive vertex weights and positive edge lengths.
///
/// Edges are kept sorted by `(u, v)`, so edge ids do not depend on input order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    weights: Vec<Rational>,
    edges: Vec<Edge>,
    adj: Vec<Vec<(usize, usize)>>,
}

impl Graph {
    /// Vertices are `0..weights.len()`.
    pub fn new(weights: Vec<Rational>, edges: Vec<(usize, usize, Rational)>) -> Result<Graph> {
        let n = weights.len();
        if n < 2 {
            return Err(Error::InvalidParameter("a graph needs at least two vertices".into()));
        }
        if let Some(v) = weights.iter().position(|w| !w.is_positive()) {
            return Err(Error::NonpositiveWeight(v));
        }
        let mut seen = HashSet::new();
        let mut list = Vec::with_capacity(edges.len());
        for (a, b, len) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidParameter(format!("edge ({a}, {b}) references a missing vertex")));
            }
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            let (u, v) = (a.min(b), a.max(b));
            if !len.is_positive() {
                return Err(Error::NonpositiveLength(u, v));
            }
            if !seen.insert((u, v)) {
                return Err(Error::ParallelEdge(u, v));
            }
            list.push(Edge { u, v, len });
        }
        list.sort_by_key(|e| (e.u, e.v));
        let mut adj = vec![Vec::new(); n];
        for (id, e) in list.iter().enumerate() {
            adj[e.u].push((e.v, id));
            adj[e.v].push((e.u, id));
        }
        let g = Graph { weights, edges: list, adj };
        if !g.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(g)
    }

    /// Same graph with every weight replaced by one.
    pub fn with_unit_weights(&self) -> Graph {
        Graph { weights: vec![Rational::one(); self.n()], ..self.clone() }
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn weight(&self, v: usize) -> &Rational {
        &self.weights[v]
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// `(neighbor, edge id)` pairs.
    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adj[v]
    }

    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        self.adj[a].iter().find(|&&(w, _)| w == b).map(|&(_, e)| e)
    }

    pub fn is_unit_weight(&self) -> bool {
        self.weights.iter().all(|w| *w == Rational::one())
    }

    pub fn is_tree(&self) -> bool {
        self.m() + 1 == self.n()
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n()];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &(w, _) in &self.adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.n()
    }
}

/// A graph together with the number of vertices to cover.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub graph: Graph,
    pub k: usize,
}

fn syntax(line: usize, msg: impl Into<String>) -> Error {
    Error::Syntax { line, msg: msg.into() }
}

/// Parses the line-oriented instance format (`c`, `p ckoc n m k weighted`, `v id w`,
/// `e u v len`). Vertex ids in the text are 1-based.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut header: Option<(usize, usize, usize, bool)> = None;
    let mut weights: Vec<Option<Rational>> = Vec::new();
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields[0] {
            "p" => {
                if header.is_some() {
                    return Err(syntax(line_no, "duplicate problem line"));
                }
                if fields.len() != 6 || fields[1] != "ckoc" {
                    return Err(syntax(line_no, "expected `p ckoc <n> <m> <k> <weighted>`"));
                }
                let num = |s: &str| s.parse::<usize>().map_err(|_| syntax(line_no, format!("bad count `{s}`")));
                let (n, m, k) = (num(fields[2])?, num(fields[3])?, num(fields[4])?);
                let weighted = match fields[5] {
                    "0" => false,
                    "1" => true,
                    other => return Err(syntax(line_no, format!("weighted flag must be 0 or 1, got `{other}`"))),
                };
                if n == 0 {
                    return Err(syntax(line_no, "n must be positive"));
                }
                weights = vec![if weighted { None } else { Some(Rational::one()) }; n];
                header = Some((n, m, k, weighted));
            }
            "v" | "e" => {
                let Some((n, _, _, weighted)) = header else {
                    return Err(syntax(line_no, "record before problem line"));
                };
                let vertex = |s: &str| -> Result<usize> {
                    let id: usize = s.parse().map_err(|_| syntax(line_no, format!("bad vertex id `{s}`")))?;
                    if id == 0 || id > n {
                        return Err(syntax(line_no, format!("vertex id {id} outside 1..={n}")));
                    }
                    Ok(id - 1)
                };
                let value = |s: &str| -> Result<Rational> {
                    s.parse().map_err(|_| syntax(line_no, format!("bad number `{s}`")))
                };
                if fields[0] == "v" {
                    if fields.len() != 3 {
                        return Err(syntax(line_no, "expected `v <id> <weight>`"));
                    }
                    if !weighted {
                        return Err(syntax(line_no, "vertex weights given for an unweighted instance"));
                    }
                    let v = vertex(fields[1])?;
                    if weights[v].is_some() {
                        return Err(syntax(line_no, format!("duplicate weight for vertex {}", v + 1)));
                    }
                    weights[v] = Some(value(fields[2])?);
                } else {
                    if fields.len() != 4 {
                        return Err(syntax(line_no, "expected `e <u> <v> <length>`"));
                    }
                    edges.push((vertex(fields[1])?, vertex(fields[2])?, value(fields[3])?));
                }
            }
            other => return Err(syntax(line_no, format!("unknown record type `{other}`"))),
        }
    }
    let Some((n, m, k, _)) = header else {
        return Err(syntax(0, "missing problem line"));
    };
    if edges.len() != m {
        return Err(syntax(0, format!("declared {m} edges, found {}", edges.len())));
    }
    let weights = weights
        .into_iter()
        .enumerate()
        .map(|(v, w)| w.ok_or_else(|| syntax(0, format!("missing weight for vertex {}", v + 1))))
        .collect::<Result<Vec<_>>>()?;
    let graph = Graph::new(weights, edges).map_err(|e| match e {
        Error::SelfLoop(v) => Error::SelfLoop(v + 1),
        Error::ParallelEdge(u, v) => Error::ParallelEdge(u + 1, v + 1),
        Error::NonpositiveWeight(v) => Error::NonpositiveWeight(v + 1),
        Error::NonpositiveLength(u, v) => Error::NonpositiveLength(u + 1, v + 1),
        other => other,
    })?;
    if k == 0 || k > n {
        return Err(Error::KOutOfRange { k, n });
    }
    Ok(Instance { graph, k })
}

/// Writes `g` in the instance format. Weights are emitted only when some weight is not one.
pub fn emit_instance(g: &Graph, k: usize) -> String {
    let weighted = !g.is_unit_weight();
    let mut out = String::new();
    let _ = writeln!(out, "p ckoc {} {} {} {}", g.n(), g.m(), k, u8::from(weighted));
    if weighted {
        for (v, w) in g.weights().iter().enumerate() {
            let _ = writeln!(out, "v {} {}", v + 1, w);
        }
    }
    for e in g.edges() {
        let _ = writeln!(out, "e {} {} {}", e.u + 1, e.v + 1, e.len);
    }
    out
}

/// Exact all-pairs shortest path lengths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMatrix {
    d: Vec<Vec<Rational>>,
}

impl DistanceMatrix {
    pub fn get(&self, u: usize, v: usize) -> &Rational {
        &self.d[u][v]
    }

    pub fn row(&self, u: usize) -> &[Rational] {
        &self.d[u]
    }

    pub fn n(&self) -> usize {
        self.d.len()
    }
}

/// Single-source shortest path lengths by Dijkstra with exact keys.
pub fn single_source(g: &Graph, src: usize) -> Vec<Rational> {
    let mut dist: Vec<Option<Rational>> = vec![None; g.n()];
    let mut done = vec![false; g.n()];
    let mut heap = BinaryHeap::new();
    dist[src] = Some(Rational::zero());
    heap.push(Reverse((Rational::zero(), src)));
    while let Some(Reverse((d, v))) = heap.pop() {
        if done[v] {
            continue;
        }
        done[v] = true;
        for &(w, e) in g.neighbors(v) {
            if done[w] {
                continue;
            }
            let cand = &d + &g.edge(e).len;
            if dist[w].as_ref().is_none_or(|cur| cand < *cur) {
                dist[w] = Some(cand.clone());
                heap.push(Reverse((cand, w)));
            }
        }
    }
    dist.into_iter().map(|d| d.expect("graph is connected")).collect()
}

pub fn all_pairs_distances(g: &Graph) -> DistanceMatrix {
    DistanceMatrix { d: par::map_indices(g.n(), |s| single_source(g, s)) }
}

/// A point on an edge, `t` measured from the smaller endpoint `u`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EdgePoint {
    pub edge: usize,
    pub t: Rational,
}

/// Identity of a point independent of which edge names it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Location {
    Vertex(usize),
    Interior { edge: usize, t: Rational },
}

impl EdgePoint {
    pub fn new(g: &Graph, edge: usize, t: Rational) -> EdgePoint {
        assert!(!t.is_negative() && t <= g.edge(edge).len, "offset outside edge");
        EdgePoint { edge, t }
    }

    /// The point of `v` on its smallest incident edge.
    pub fn at_vertex(g: &Graph, v: usize) -> EdgePoint {
        let &(_, edge) = g.neighbors(v).iter().min_by_key(|&&(_, e)| e).expect("connected graph with n > 1");
        let e = g.edge(edge);
        let t = if e.u == v { Rational::zero() } else { e.len.clone() };
        EdgePoint { edge, t }
    }

    pub fn vertex(&self, g: &Graph) -> Option<usize> {
        let e = g.edge(self.edge);
        if self.t.is_zero() {
            Some(e.u)
        } else if self.t == e.len {
            Some(e.v)
        } else {
            None
        }
    }

    pub fn location(&self, g: &Graph) -> Location {
        match self.vertex(g) {
            Some(v) => Location::Vertex(v),
            None => Location::Interior { edge: self.edge, t: self.t.clone() },
        }
    }

    /// d(x, v).
    pub fn distance_to(&self, g: &Graph, dm: &DistanceMatrix, v: usize) -> Rational {
        let e = g.edge(self.edge);
        let via_u = &self.t + dm.get(e.u, v);
        let via_v = &(&e.len - &self.t) + dm.get(e.v, v);
        Rational::min_of(via_u, via_v)
    }

    pub fn to_json(&self, g: &Graph) -> String {
        let e = g.edge(self.edge);
        format!("{{\"edge\":[{},{}],\"t\":\"{}\"}}", e.u + 1, e.v + 1, self.t.to_fraction_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistanceCase {
    Increasing,
    Decreasing,
    Peak,
}

/// `D(v, x) = w_v d(v, x)` restricted to one edge `(r, s)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeDistanceFn {
    pub vertex: usize,
    pub edge: usize,
    pub case: DistanceCase,
    /// Interior semicircular point when `case == Peak`.
    pub peak: Option<EdgePoint>,
    /// Offset of the semicircular point, including the endpoint cases.
    pub semicircular: Option<Rational>,
    pub at_r: Rational,
    pub at_s: Rational,
}

impl EdgeDistanceFn {
    pub fn eval(&self, g: &Graph, dm: &DistanceMatrix, t: &Rational) -> Rational {
        let e = g.edge(self.edge);
        let w = g.weight(self.vertex);
        let left = t + dm.get(self.vertex, e.u);
        let right = &(&e.len - t) + dm.get(self.vertex, e.v);
        w * &Rational::min_of(left, right)
    }
}

/// Whether some shortest path from `from` to `to` avoids `avoid`.
pub fn has_shortest_path_avoiding(g: &Graph, dm: &DistanceMatrix, from: usize, to: usize, avoid: usize) -> bool {
    if from == avoid || to == avoid {
        return false;
    }
    let mut seen = vec![false; g.n()];
    let mut stack = vec![from];
    seen[from] = true;
    while let Some(a) = stack.pop() {
        if a == to {
            return true;
        }
        for &(b, e) in g.neighbors(a) {
            if b == avoid || seen[b] {
                continue;
            }
            if *dm.get(a, to) == &g.edge(e).len + dm.get(b, to) {
                seen[b] = true;
                stack.push(b);
            }
        }
    }
    false
}

pub fn edge_distance_fn(g: &Graph, dm: &DistanceMatrix, v: usize, edge: usize) -> EdgeDistanceFn {
    let e = g.edge(edge);
    let (a, b) = (dm.get(v, e.u), dm.get(v, e.v));
    let w = g.weight(v);
    let (case, semicircular) = if *b == a + &e.len {
        let at_s = has_shortest_path_avoiding(g, dm, v, e.v, e.u);
        (DistanceCase::Increasing, at_s.then(|| e.len.clone()))
    } else if *a == b + &e.len {
        let at_r = has_shortest_path_avoiding(g, dm, v, e.u, e.v);
        (DistanceCase::Decreasing, at_r.then(Rational::zero))
    } else {
        let apex = (&(b + &e.len) - a) / Rational::from_integer(2);
        (DistanceCase::Peak, Some(apex))
    };
    let peak = match case {
        DistanceCase::Peak => semicircular.clone().map(|t| EdgePoint { edge, t }),
        _ => None,
    };
    EdgeDistanceFn { vertex: v, edge, case, peak, semicircular, at_r: w * a, at_s: w * b }
}

/// Split of the vertex set by which end of the edge their shortest paths to `x` use.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VertexPartition {
    pub neutral: Vec<usize>,
    pub by_r: Vec<usize>,
    pub by_s: Vec<usize>,
}

pub fn classify_at_point(g: &Graph, dm: &DistanceMatrix, x: &EdgePoint) -> VertexPartition {
    let e = g.edge(x.edge);
    let mut part = VertexPartition::default();
    for v in 0..g.n() {
        let left = &x.t + dm.get(v, e.u);
        let right = &(&e.len - &x.t) + dm.get(v, e.v);
        let side = match left.cmp(&right) {
            std::cmp::Ordering::Less => &mut part.by_r,
            std::cmp::Ordering::Greater => &mut part.by_s,
            std::cmp::Ordering::Equal if x.t.is_zero() => {
                if has_shortest_path_avoiding(g, dm, v, e.u, e.v) {
                    &mut part.neutral
                } else {
                    &mut part.by_s
                }
            }
            std::cmp::Ordering::Equal if x.t == e.len => {
                if has_shortest_path_avoiding(g, dm, v, e.v, e.u) {
                    &mut part.neutral
                } else {
                    &mut part.by_r
                }
            }
            std::cmp::Ordering::Equal => &mut part.neutral,
        };
        side.push(v);
    }
    part
}

/// Optimal value, partial center and a witness k-subtree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub lambda_star: Rational,
    pub center: EdgePoint,
    pub subtree: Vec<usize>,
}

impl Solution {
    pub fn to_json(&self, g: &Graph) -> String {
        let ids: Vec<String> = self.subtree.iter().map(|v| (v + 1).to_string()).collect();
        format!(
            "{{\"lambda_star\":\"{}\",\"center\":{},\"subtree\":[{}]}}",
            self.lambda_star.to_fraction_string(),
            self.center.to_json(g),
            ids.join(",")
        )
    }

    /// Checks size, coverage and that the subtree hangs off the center along shortest paths.
    pub fn validate(&self, g: &Graph, dm: &DistanceMatrix, k: usize) -> std::result::Result<(), String> {
        if self.subtree.len() != k {
            return Err(format!("subtree has {} vertices, expected {k}", self.subtree.len()));
        }
        validate_covered_subtree(g, dm, &self.center, &self.subtree, &self.lambda_star)?;
        let worst = self
            .subtree
            .iter()
            .map(|&v| g.weight(v) * &self.center.distance_to(g, dm, v))
            .max()
            .unwrap_or_default();
        if worst != self.lambda_star {
            return Err(format!("max weighted distance {worst} differs from lambda {}", self.lambda_star));
        }
        Ok(())
    }
}

/// Every vertex is within `lambda` of `x` and is reached from `x` through a shortest
/// path whose last step comes from inside the set (or from `x` itself).
pub fn validate_covered_subtree(
    g: &Graph,
    dm: &DistanceMatrix,
    x: &EdgePoint,
    set: &[usize],
    lambda: &Rational,
) -> std::result::Result<(), String> {
    let inside: HashSet<usize> = set.iter().copied().collect();
    if inside.len() != set.len() {
        return Err("duplicate vertices in subtree".into());
    }
    let e = g.edge(x.edge);
    let at = x.vertex(g);
    for &v in set {
        let dv = x.distance_to(g, dm, v);
        if g.weight(v) * &dv > *lambda {
            return Err(format!("vertex {} is not covered", v + 1));
        }
        if at == Some(v) {
            continue;
        }
        let from_point = match at {
            None => (v == e.u && dv == x.t) || (v == e.v && dv == &e.len - &x.t),
            Some(_) => false,
        };
        let from_set = g.neighbors(v).iter().any(|&(p, id)| {
            inside.contains(&p) && x.distance_to(g, dm, p) + &g.edge(id).len == dv
        });
        if !from_point && !from_set {
            return Err(format!("vertex {} is not attached along a shortest path", v + 1));
        }
    }
    Ok(())
}

/// The `k` vertices of `candidates` closest to `x`, ties by id, in that order.
pub fn k_closest(g: &Graph, dm: &DistanceMatrix, x: &EdgePoint, candidates: &[usize], k: usize) -> Vec<usize> {
    let mut keyed: Vec<(Rational, usize)> = candidates.iter().map(|&v| (x.distance_to(g, dm, v), v)).collect();
    keyed.sort();
    keyed.truncate(k);
    keyed.into_iter().map(|(_, v)| v).collect()
}
