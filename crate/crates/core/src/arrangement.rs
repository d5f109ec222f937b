//! Candidate lines in the (offset, λ) plane and the search for the lowest arrangement
//! vertex whose λ-coordinate passes a monotone feasibility test.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::feasibility::FeasibilityTester;
use crate::graph::{all_pairs_distances, DistanceMatrix, Graph, Solution};
use crate::par;
use crate::rational::Rational;

/// Where a candidate line came from (first origin kept after deduplication).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineOrigin {
    Vertex { vertex: usize, edge: usize },
    Endpoint { edge: usize },
    /// Vertical line through the interior semicircular point of `vertex` on `edge`.
    Semicircular { vertex: usize, edge: usize },
    /// Distance of `vertex` through `centroid` on a tree.
    Centroid { vertex: usize, centroid: usize },
}

/// The line `x = p·y + q`, with `x` an offset along an edge and `y` a weighted distance.
/// Vertical lines have `p = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Line {
    pub p: Rational,
    pub q: Rational,
    pub origin: LineOrigin,
}

impl Line {
    pub fn x_at(&self, y: &Rational) -> Rational {
        &(&self.p * y) + &self.q
    }

    /// `y` where the two lines meet, `None` when parallel.
    pub fn meet(&self, other: &Line) -> Option<Rational> {
        (self.p != other.p).then(|| (&other.q - &self.q) / (&self.p - &other.p))
    }

    pub fn is_vertical(&self) -> bool {
        self.p.is_zero()
    }
}

pub fn edge_lines(g: &Graph, dm: &DistanceMatrix, edge: usize) -> Vec<Line> {
    let e = g.edge(edge);
    let mut out = vec![
        Line { p: Rational::zero(), q: Rational::zero(), origin: LineOrigin::Endpoint { edge } },
        Line { p: Rational::zero(), q: e.len.clone(), origin: LineOrigin::Endpoint { edge } },
    ];
    for v in 0..g.n() {
        let (a, b) = (dm.get(v, e.u), dm.get(v, e.v));
        let inv = g.weight(v).recip();
        let origin = LineOrigin::Vertex { vertex: v, edge };
        let rising = *a != b + &e.len;
        let falling = *b != a + &e.len;
        if rising {
            out.push(Line { p: inv.clone(), q: -a, origin });
        }
        if falling {
            out.push(Line { p: -&inv, q: &e.len + b, origin });
        }
        // the optimum may sit where one vertex has two shortest paths, at a height set by
        // another vertex, which no pair of sloped lines produces
        if rising && falling {
            let peak = (&(b + &e.len) - a) / Rational::from_integer(2);
            out.push(Line { p: Rational::zero(), q: peak, origin: LineOrigin::Semicircular { vertex: v, edge } });
        }
    }
    out
}

/// Lines of every edge pooled together, duplicates removed.
pub fn candidate_lines(g: &Graph, dm: &DistanceMatrix) -> Vec<Line> {
    let mut all: Vec<Line> = par::map_indices(g.m(), |e| edge_lines(g, dm, e)).into_iter().flatten().collect();
    all.sort_by(|a, b| (&a.p, &a.q).cmp(&(&b.p, &b.q)));
    all.dedup_by(|a, b| a.p == b.p && a.q == b.q);
    all
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrangementVertex {
    pub x: Rational,
    pub y: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrangementAnswer {
    /// Lowest vertex with a feasible y-coordinate.
    pub v1: ArrangementVertex,
    /// Highest vertex strictly below `v1`, if any.
    pub v2: Option<ArrangementVertex>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Enumerate every pairwise intersection and binary search the sorted ordinates.
    Explicit,
    /// Randomized selection of ordinates through inversion counting.
    Counting,
    /// Explicit up to [`EXPLICIT_LIMIT`] lines, counting above.
    Auto,
}

pub const EXPLICIT_LIMIT: usize = 1500;

fn vertex_of(lines: &[Line], i: usize, j: usize) -> Option<ArrangementVertex> {
    let y = lines[i].meet(&lines[j])?;
    Some(ArrangementVertex { x: lines[i].x_at(&y), y })
}

/// Sorted distinct ordinates, each with one witnessing vertex.
fn distinct_vertices(lines: &[Line], pairs: impl Iterator<Item = (usize, usize)>) -> Vec<ArrangementVertex> {
    let mut verts: Vec<ArrangementVertex> = pairs.filter_map(|(i, j)| vertex_of(lines, i, j)).collect();
    verts.sort_by(|a, b| a.y.cmp(&b.y).then_with(|| a.x.cmp(&b.x)));
    verts.dedup_by(|a, b| a.y == b.y);
    verts
}

fn search_sorted(
    verts: Vec<ArrangementVertex>,
    below: Option<ArrangementVertex>,
    feasible: &dyn Fn(&Rational) -> bool,
) -> Option<ArrangementAnswer> {
    let i = verts.partition_point(|v| !feasible(&v.y));
    if i == verts.len() {
        return None;
    }
    let v2 = if i > 0 { Some(verts[i - 1].clone()) } else { below };
    Some(ArrangementAnswer { v1: verts[i].clone(), v2 })
}

fn explicit(lines: &[Line], feasible: &dyn Fn(&Rational) -> bool) -> Option<ArrangementAnswer> {
    let n = lines.len();
    let pairs = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
    search_sorted(distinct_vertices(lines, pairs), None, feasible)
}

/// Line order just above (`above = true`) or just below `y`; `None` stands for ∓∞.
fn order_near(lines: &[Line], y: Option<&Rational>, above: bool) -> Vec<usize> {
    let mut keyed: Vec<(Rational, Rational, usize)> = lines
        .iter()
        .enumerate()
        .map(|(i, l)| match y {
            Some(y) => {
                let tilt = if above { l.p.clone() } else { -&l.p };
                (l.x_at(y), tilt, i)
            }
            None if above => (-&l.p, l.q.clone(), i),
            None => (l.p.clone(), l.q.clone(), i),
        })
        .collect();
    keyed.sort();
    keyed.into_iter().map(|(_, _, i)| i).collect()
}

enum Visit {
    Count,
    Select(u64),
    Collect,
}

/// Inversions of `perm` through a bottom-up merge sort, reported as pairs of original
/// indices. Returns the count and, depending on `visit`, the selected or all pairs.
fn inversions(perm: &[usize], visit: Visit) -> (u64, Vec<(usize, usize)>) {
    let n = perm.len();
    let mut cur: Vec<(usize, usize)> = perm.iter().copied().enumerate().map(|(i, v)| (v, i)).collect();
    let mut buf = cur.clone();
    let mut count = 0u64;
    let mut found = Vec::new();
    let mut width = 1;
    while width < n {
        let mut start = 0;
        while start < n {
            let mid = (start + width).min(n);
            let end = (start + 2 * width).min(n);
            let (mut i, mut j, mut k) = (start, mid, start);
            while i < mid || j < end {
                if j >= end || (i < mid && cur[i].0 < cur[j].0) {
                    buf[k] = cur[i];
                    i += 1;
                } else {
                    let left = mid - i;
                    match visit {
                        Visit::Count => {}
                        Visit::Select(r) => {
                            if r >= count && r < count + left as u64 {
                                let a = cur[i + (r - count) as usize].1;
                                found.push((a, cur[j].1));
                            }
                        }
                        Visit::Collect => found.extend(cur[i..mid].iter().map(|&(_, a)| (a, cur[j].1))),
                    }
                    count += left as u64;
                    buf[k] = cur[j];
                    j += 1;
                }
                k += 1;
            }
            start = end;
        }
        std::mem::swap(&mut cur, &mut buf);
        width *= 2;
    }
    (count, found)
}

/// Ordinates strictly between `lo` and `hi` as pairs of line indices.
fn pairs_between(lines: &[Line], lo: Option<&Rational>, hi: Option<&Rational>, visit: Visit) -> (u64, Vec<(usize, usize)>) {
    let first = order_near(lines, lo, true);
    let last = order_near(lines, hi, false);
    let mut pos = vec![0; lines.len()];
    for (k, &i) in last.iter().enumerate() {
        pos[i] = k;
    }
    let perm: Vec<usize> = first.iter().map(|&i| pos[i]).collect();
    let (count, pairs) = inversions(&perm, visit);
    (count, pairs.into_iter().map(|(a, b)| (first[a], first[b])).collect())
}

fn counting(lines: &[Line], feasible: &dyn Fn(&Rational) -> bool, seed: u64) -> Option<ArrangementAnswer> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let threshold = (4 * lines.len()).max(1024) as u64;
    let mut lo: Option<ArrangementVertex> = None;
    let mut hi: Option<ArrangementVertex> = None;
    loop {
        let (lo_y, hi_y) = (lo.as_ref().map(|v| &v.y), hi.as_ref().map(|v| &v.y));
        let (count, _) = pairs_between(lines, lo_y, hi_y, Visit::Count);
        if count <= threshold {
            let (_, pairs) = pairs_between(lines, lo_y, hi_y, Visit::Collect);
            let mut verts = distinct_vertices(lines, pairs.into_iter());
            verts.extend(hi.clone());
            return search_sorted(verts, lo, feasible);
        }
        let r = rng.gen_range(0..count);
        let (_, pick) = pairs_between(lines, lo_y, hi_y, Visit::Select(r));
        let (i, j) = pick[0];
        let v = vertex_of(lines, i, j).expect("inverted lines are not parallel");
        if feasible(&v.y) {
            hi = Some(v);
        } else {
            lo = Some(v);
        }
    }
}

/// Lowest arrangement vertex whose y passes the upward-closed test `feasible`.
pub fn lowest_feasible_vertex(lines: &[Line], feasible: &dyn Fn(&Rational) -> bool, strategy: Strategy) -> Result<ArrangementAnswer> {
    let strategy = match strategy {
        Strategy::Auto if lines.len() <= EXPLICIT_LIMIT => Strategy::Explicit,
        Strategy::Auto => Strategy::Counting,
        s => s,
    };
    let answer = match strategy {
        Strategy::Explicit => explicit(lines, feasible),
        _ => counting(lines, feasible, 0x5eed),
    };
    answer.ok_or(Error::NoFeasibleCandidate)
}

pub fn solve_weighted_graph(g: &Graph, k: usize) -> Result<Solution> {
    solve_weighted_graph_with(g, k, Strategy::Auto)
}

pub fn solve_weighted_graph_with(g: &Graph, k: usize, strategy: Strategy) -> Result<Solution> {
    if k == 0 || k > g.n() {
        return Err(Error::KOutOfRange { k, n: g.n() });
    }
    let dm = all_pairs_distances(g);
    let tester = FeasibilityTester::new(g, &dm);
    let lines = candidate_lines(g, &dm);
    let answer = lowest_feasible_vertex(&lines, &|y| tester.is_feasible(k, y), strategy)?;
    let lambda_star = answer.v1.y;
    let witness = tester
        .test(k, &lambda_star)
        .witness
        .ok_or_else(|| Error::Internal("feasible value lost its witness".into()))?;
    Ok(Solution { lambda_star, center: witness.point, subtree: witness.subtree })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use crate::graph::EdgePoint;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn line(p: &str, qq: &str) -> Line {
        Line { p: q(p), q: q(qq), origin: LineOrigin::Endpoint { edge: 0 } }
    }

    #[test]
    fn wedge_lines() {
        let inst = wedge2();
        let dm = all_pairs_distances(&inst.graph);
        let lines = edge_lines(&inst.graph, &dm, 0);
        let pq: Vec<(Rational, Rational)> = lines.iter().map(|l| (l.p.clone(), l.q.clone())).collect();
        assert_eq!(pq, vec![(q("0"), q("0")), (q("0"), q("6")), (q("1/2"), q("0")), (q("-1"), q("6"))]);
    }

    #[test]
    fn peak_contributes_three_lines_and_monotone_one() {
        let inst = triangle();
        let dm = all_pairs_distances(&inst.graph);
        assert_eq!(edge_lines(&inst.graph, &dm, 0).len(), 2 + 4 + 1);
        let inst = path3();
        let dm = all_pairs_distances(&inst.graph);
        let lines = edge_lines(&inst.graph, &dm, 0);
        let third: Vec<&Line> = lines.iter().filter(|l| l.origin == LineOrigin::Vertex { vertex: 2, edge: 0 }).collect();
        assert_eq!(third.len(), 1);
        assert_eq!((third[0].p.clone(), third[0].q.clone()), (q("-1"), q("2")));
    }

    /// The optimum lies at the semicircular point of one vertex while another vertex sets
    /// the value, so it is reachable only through a vertical line at that point.
    #[test]
    fn optimum_at_semicircular_point() {
        let inst = graph(
            "p ckoc 9 15 5 1 / v 1 4/3 / v 2 21/8 / v 3 16/7 / v 4 1/2 / v 5 2/3 / v 6 11/5 / v 7 5/2 / v 8 3 / v 9 18/7 \
             / e 1 3 8/7 / e 1 6 9/4 / e 1 7 4 / e 2 3 3/4 / e 2 9 7/5 / e 3 5 37/10 / e 3 8 5/3 / e 4 6 4 \
             / e 4 8 26/15 / e 4 9 25/7 / e 5 7 1 / e 5 9 2 / e 6 7 1/3 / e 6 8 31/16 / e 8 9 15/7",
        );
        let g = &inst.graph;
        let sol = solve_weighted_graph(g, 5).unwrap();
        assert_eq!(sol.lambda_star, q("130/49"));
        assert_eq!(sol.center, EdgePoint::new(g, 4, q("23/56")));
        sol.validate(g, &all_pairs_distances(g), 5).unwrap();
        assert_eq!(crate::oracle::brute_lambda(g, 5).unwrap(), q("130/49"));
    }

    #[test]
    fn constructed_oracle() {
        // y = x, y = 2 - x, x = 0, x = 2
        let lines = vec![line("1", "0"), line("-1", "2"), line("0", "0"), line("0", "2")];
        for strategy in [Strategy::Explicit, Strategy::Counting] {
            let ans = lowest_feasible_vertex(&lines, &|y| *y >= q("1"), strategy).unwrap();
            assert_eq!(ans.v1, ArrangementVertex { x: q("1"), y: q("1") });
            assert_eq!(ans.v2.unwrap().y, q("0"));
        }
        assert!(lowest_feasible_vertex(&lines, &|_| false, Strategy::Explicit).is_err());
    }

    #[test]
    fn counting_matches_explicit_on_many_lines() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let lines: Vec<Line> = (0..120)
            .map(|_| {
                let p = Rational::new(rng.gen_range(-6..=6), rng.gen_range(1..=4));
                let qq = Rational::new(rng.gen_range(-20..=20), rng.gen_range(1..=3));
                Line { p, q: qq, origin: LineOrigin::Endpoint { edge: 0 } }
            })
            .collect();
        for cut in ["-7", "0", "1/3", "5", "40"] {
            let cut = q(cut);
            let f = |y: &Rational| *y >= cut;
            let a = lowest_feasible_vertex(&lines, &f, Strategy::Explicit);
            let b = lowest_feasible_vertex(&lines, &f, Strategy::Counting);
            match (a, b) {
                (Ok(a), Ok(b)) => {
                    assert_eq!(a.v1.y, b.v1.y);
                    assert_eq!(a.v2.map(|v| v.y), b.v2.map(|v| v.y));
                }
                (a, b) => assert_eq!(a.is_err(), b.is_err()),
            }
        }
    }

    #[test]
    fn inversion_count_and_listing() {
        let perm = [3, 0, 2, 1];
        let (count, all) = inversions(&perm, Visit::Collect);
        assert_eq!(count, 4);
        let mut all = all;
        all.sort();
        assert_eq!(all, vec![(0, 1), (0, 2), (0, 3), (2, 3)]);
        for r in 0..4 {
            let (_, one) = inversions(&perm, Visit::Select(r));
            assert_eq!(one.len(), 1);
            assert!(all.contains(&one[0]));
        }
    }

    #[test]
    fn small_graph_solutions() {
        let s = solve_weighted_graph(&path3().graph, 2).unwrap();
        assert_eq!(s.lambda_star, q("1/2"));
        assert_eq!(s.center, EdgePoint::new(&path3().graph, 0, q("1/2")));

        let g = wedge2().graph;
        let s = solve_weighted_graph(&g, 2).unwrap();
        assert_eq!(s.lambda_star, q("4"));
        assert_eq!(s.center, EdgePoint::new(&g, 0, q("2")));

        let g = cycle4().graph;
        let s = solve_weighted_graph(&g, 3).unwrap();
        assert_eq!(s.lambda_star, q("1"));
        assert!(s.center.vertex(&g).is_some());
        s.validate(&g, &all_pairs_distances(&g), 3).unwrap();

        for strategy in [Strategy::Explicit, Strategy::Counting] {
            assert_eq!(solve_weighted_graph_with(&g, 4, strategy).unwrap().lambda_star, q("3/2"));
        }
        assert!(solve_weighted_graph(&g, 0).is_err());
        assert!(solve_weighted_graph(&g, 5).is_err());
    }
}

#[cfg(test)]
mod oracle_agreement {
    use super::{all_pairs_distances, solve_weighted_graph_with, Strategy as Search};
    use crate::generate::{random_graph, GenParams};
    use crate::oracle::Oracle;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(30))]

        #[test]
        fn both_strategies_match_brute_force(
            n in 2usize..7,
            density in 0.0f64..0.5,
            weighted in any::<bool>(),
            seed in any::<u64>(),
        ) {
            let g = random_graph(&GenParams { n, density, weighted, max_den: 16, seed }).unwrap();
            let expect = Oracle::new(&g).lambda_all_k();
            let dm = all_pairs_distances(&g);
            for k in 1..=n {
                for strategy in [Search::Explicit, Search::Counting] {
                    let s = solve_weighted_graph_with(&g, k, strategy).unwrap();
                    prop_assert_eq!(&s.lambda_star, &expect[k - 1]);
                    prop_assert!(s.validate(&g, &dm, k).is_ok());
                }
            }
        }
    }
}
