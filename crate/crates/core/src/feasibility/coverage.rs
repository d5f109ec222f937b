use crate::graph::{DistanceMatrix, Graph};
use crate::rational::Rational;

use super::predecessor::PredecessorStructure;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Shape {
    Rising,
    Falling,
    Peak(Rational),
}

#[derive(Debug, Clone)]
struct SideVertex {
    shape: Shape,
    /// Semicircular point measured from the near end.
    sp: Option<Rational>,
    member: bool,
}

/// The edge seen from one end: which vertices can be reached through `near`, and how.
#[derive(Debug, Clone)]
struct Side {
    near: usize,
    verts: Vec<SideVertex>,
}

/// λ-independent data for one edge, reused across feasibility tests.
#[derive(Debug, Clone)]
pub struct EdgeClassification {
    edge: usize,
    len: Rational,
    sides: [Side; 2],
}

/// Vertices whose every shortest path from `root` passes through `cut` (plus `cut`).
fn only_through(g: &Graph, dm: &DistanceMatrix, root: usize, cut: usize) -> Vec<bool> {
    let mut ps = PredecessorStructure::rooted_at(g, dm, root, &vec![true; g.n()]);
    let mut mark = vec![false; g.n()];
    mark[cut] = true;
    for v in ps.remove_set_and_descendants(&[cut]) {
        mark[v] = true;
    }
    mark
}

fn side(g: &Graph, dm: &DistanceMatrix, near: usize, far: usize, len: &Rational, via_far: &[bool], via_near: &[bool]) -> Side {
    let verts = (0..g.n())
        .map(|v| {
            let (a, b) = (dm.get(v, near), dm.get(v, far));
            if *b == a + len {
                let sp = (!via_near[v]).then(|| len.clone());
                SideVertex { shape: Shape::Rising, sp, member: true }
            } else if *a == b + len {
                let sp = (!via_far[v]).then(Rational::zero);
                SideVertex { shape: Shape::Falling, member: sp.is_some(), sp }
            } else {
                let apex = (&(b + len) - a) / Rational::from_integer(2);
                SideVertex { shape: Shape::Peak(apex.clone()), sp: Some(apex), member: true }
            }
        })
        .collect();
    Side { near, verts }
}

pub fn classify_edge(g: &Graph, dm: &DistanceMatrix, e: usize) -> EdgeClassification {
    let edge = g.edge(e);
    let (r, s) = (edge.u, edge.v);
    let r_via_s = only_through(g, dm, r, s);
    let s_via_r = only_through(g, dm, s, r);
    EdgeClassification {
        edge: e,
        len: edge.len.clone(),
        sides: [
            side(g, dm, r, s, &edge.len, &r_via_s, &s_via_r),
            side(g, dm, s, r, &edge.len, &s_via_r, &r_via_s),
        ],
    }
}

struct SideCount {
    /// `(t, count)`: count of vertices reachable through the near end on `(prev t, t]`.
    groups: Vec<(Rational, usize)>,
    tail: usize,
    /// Vertex still counted when its semicircular point is reached.
    intact: Vec<bool>,
}

impl SideCount {
    fn at(&self, t: &Rational) -> usize {
        let i = self.groups.partition_point(|(g, _)| g < t);
        self.groups.get(i).map_or(self.tail, |(_, c)| *c)
    }

    fn just_after(&self, t: &Rational) -> usize {
        let i = self.groups.partition_point(|(g, _)| g <= t);
        self.groups.get(i).map_or(self.tail, |(_, c)| *c)
    }
}

fn count_side(g: &Graph, dm: &DistanceMatrix, side: &Side, len: &Rational, lambda: &Rational) -> SideCount {
    let n = g.n();
    let members: Vec<bool> = side.verts.iter().map(|sv| sv.member).collect();
    let mut keyed: Vec<(Option<Rational>, usize)> = Vec::new();
    for v in (0..n).filter(|&v| members[v]) {
        let w = g.weight(v);
        let a = dm.get(v, side.near);
        if w * a > *lambda {
            keyed.push((None, v));
            continue;
        }
        let reach = &(lambda / w) - a;
        let turn = match &side.verts[v].shape {
            Shape::Rising => Rational::min_of(reach, len.clone()),
            Shape::Peak(apex) => Rational::min_of(reach, apex.clone()),
            Shape::Falling => Rational::zero(),
        };
        keyed.push((Some(turn), v));
    }
    keyed.sort();

    let mut ps = PredecessorStructure::rooted_at(g, dm, side.near, &members);
    let mut alive = keyed.len();
    let mut intact = vec![true; n];
    let mut groups = Vec::new();
    let mut i = 0;
    while i < keyed.len() {
        let t = keyed[i].0.clone();
        let mut j = i;
        while j < keyed.len() && keyed[j].0 == t {
            j += 1;
        }
        if let Some(t) = &t {
            groups.push((t.clone(), alive));
        }
        let set: Vec<usize> = keyed[i..j].iter().map(|&(_, v)| v).filter(|&v| ps.is_alive(v)).collect();
        let desc = ps.remove_set_and_descendants(&set);
        alive -= set.len() + desc.len();
        for v in set.into_iter().chain(desc) {
            if let Some(sp) = &side.verts[v].sp {
                if t.as_ref().is_none_or(|t| t < sp) {
                    intact[v] = false;
                }
            }
        }
        i = j;
    }
    SideCount { groups, tail: alive, intact }
}

/// Coverage value at one breakpoint and on the open interval just before it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Breakpoint {
    pub t: Rational,
    pub left_open: usize,
    pub at: usize,
}

/// Number of light vertices reachable along shortest paths from each point of one edge,
/// as a step function of the offset `t` from the smaller endpoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageProfile {
    pub edge: usize,
    pub breakpoints: Vec<Breakpoint>,
}

impl CoverageProfile {
    pub fn value_at(&self, t: &Rational) -> usize {
        let i = self.breakpoints.partition_point(|b| b.t < *t);
        let b = &self.breakpoints[i.min(self.breakpoints.len() - 1)];
        if b.t == *t {
            b.at
        } else {
            b.left_open
        }
    }

    pub fn max_value(&self) -> usize {
        self.breakpoints.iter().map(|b| b.at.max(b.left_open)).max().unwrap_or(0)
    }

    /// Smallest offset (an interval midpoint or a breakpoint) where the count reaches `k`.
    pub fn first_reaching(&self, k: usize) -> Option<Rational> {
        let mut prev: Option<&Rational> = None;
        for b in &self.breakpoints {
            if let Some(p) = prev {
                if b.left_open >= k {
                    return Some(p.midpoint(&b.t));
                }
            }
            if b.at >= k {
                return Some(b.t.clone());
            }
            prev = Some(&b.t);
        }
        None
    }
}

pub fn coverage_profile_with(g: &Graph, dm: &DistanceMatrix, cls: &EdgeClassification, lambda: &Rational) -> CoverageProfile {
    let len = &cls.len;
    let from_r = count_side(g, dm, &cls.sides[0], len, lambda);
    let from_s = count_side(g, dm, &cls.sides[1], len, lambda);

    let mut both: Vec<(Rational, usize)> = cls.sides[0]
        .verts
        .iter()
        .enumerate()
        .filter_map(|(v, sv)| sv.sp.clone().map(|sp| (sp, v)))
        .filter(|&(_, v)| from_r.intact[v] && from_s.intact[v] && cls.sides[1].verts[v].member)
        .collect();
    both.sort();
    let shared = |t: &Rational| {
        let lo = both.partition_point(|(p, _)| p < t);
        let hi = both.partition_point(|(p, _)| p <= t);
        hi - lo
    };

    let mut ts: Vec<Rational> = vec![Rational::zero(), len.clone()];
    ts.extend(from_r.groups.iter().map(|(t, _)| t.clone()));
    ts.extend(from_s.groups.iter().map(|(u, _)| len - u));
    ts.sort();
    ts.dedup();

    let breakpoints = ts
        .into_iter()
        .map(|t| {
            let u = len - &t;
            let r = from_r.at(&t);
            let at = r + from_s.at(&u) - shared(&t);
            let left_open = if t.is_zero() { at } else { r + from_s.just_after(&u) };
            Breakpoint { t, left_open, at }
        })
        .collect();
    CoverageProfile { edge: cls.edge, breakpoints }
}

pub fn coverage_profile(g: &Graph, dm: &DistanceMatrix, edge: usize, lambda: &Rational) -> CoverageProfile {
    coverage_profile_with(g, dm, &classify_edge(g, dm, edge), lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::all_pairs_distances;
    use crate::graph::fixtures::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn profile(inst: &crate::graph::Instance, e: usize, lambda: &str) -> CoverageProfile {
        let dm = all_pairs_distances(&inst.graph);
        coverage_profile(&inst.graph, &dm, e, &q(lambda))
    }

    #[test]
    fn path_half_unit_budget() {
        let p = profile(&path3(), 0, "1/2");
        assert_eq!(p.value_at(&q("0")), 1);
        assert_eq!(p.value_at(&q("1/4")), 1);
        assert_eq!(p.value_at(&q("1/2")), 2);
        assert_eq!(p.value_at(&q("3/4")), 1);
        assert_eq!(p.value_at(&q("1")), 1);
        assert_eq!(p.max_value(), 2);
        assert_eq!(p.first_reaching(2), Some(q("1/2")));
    }

    #[test]
    fn path_unit_budget_covers_all_at_middle() {
        let p = profile(&path3(), 0, "1");
        assert_eq!(p.value_at(&q("1")), 3);
        assert_eq!(p.value_at(&q("0")), 2);
        assert_eq!(p.value_at(&q("1/2")), 2);
        let p = profile(&path3(), 0, "499/1000");
        assert!(p.max_value() < 2);
    }

    #[test]
    fn weighted_wedge() {
        let p = profile(&wedge2(), 0, "4");
        assert_eq!(p.value_at(&q("1")), 1);
        assert_eq!(p.value_at(&q("2")), 2);
        assert_eq!(p.value_at(&q("3")), 1);
        assert_eq!(p.value_at(&q("4")), 1);
        assert_eq!(p.value_at(&q("5")), 1);
        assert_eq!(p.first_reaching(2), Some(q("2")));
        assert!(profile(&wedge2(), 0, "39/10").max_value() < 2);
    }

    #[test]
    fn cycle_counts_both_routes() {
        let inst = cycle4();
        let p = profile(&inst, 0, "2");
        assert_eq!(p.value_at(&q("0")), 4);
        assert_eq!(p.value_at(&q("1/2")), 4);
        let p = profile(&inst, 0, "1");
        assert_eq!(p.value_at(&q("0")), 3);
        assert_eq!(p.value_at(&q("1/2")), 2);
    }

    #[test]
    fn negative_budget_covers_nothing() {
        let p = profile(&triangle(), 1, "-1");
        assert_eq!(p.max_value(), 0);
    }
}
