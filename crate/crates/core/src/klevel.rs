//! The k-th level of the unit-slope distance chains on one edge, and the unweighted
//! general-graph solver built on its lowest point.

use crate::error::{Error, Result};
use crate::graph::{all_pairs_distances, k_closest, DistanceMatrix, EdgePoint, Graph, Solution};
use crate::par;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChainShape {
    /// Rising over the whole edge.
    XOnly,
    /// Falling over the whole edge.
    YOnly,
    /// Rising up to the apex offset, falling after it.
    Peak(Rational),
}

/// Graph of `t ↦ d(v, (e, t))` on `[0, l(e)]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chain {
    pub vertex: usize,
    /// `d(v, r)`, the intercept of the rising line `y = t + a`.
    pub a: Rational,
    /// `d(v, s) + l(e)`, the intercept of the falling line `y = c - t`.
    pub c: Rational,
    pub shape: ChainShape,
}

impl Chain {
    pub fn apex(&self) -> Rational {
        (&self.c - &self.a) / Rational::from_integer(2)
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        Rational::min_of(t + &self.a, &self.c - t)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainSet {
    pub edge: usize,
    pub len: Rational,
    pub chains: Vec<Chain>,
}

impl ChainSet {
    /// `(a, c)` per chain.
    pub fn pairs(&self) -> Vec<(Rational, Rational)> {
        self.chains.iter().map(|c| (c.a.clone(), c.c.clone())).collect()
    }
}

pub fn build_chains(g: &Graph, dm: &DistanceMatrix, edge: usize) -> Result<ChainSet> {
    if !g.is_unit_weight() {
        return Err(Error::Weighted);
    }
    let e = g.edge(edge);
    let chains = (0..g.n())
        .map(|v| {
            let a = dm.get(v, e.u).clone();
            let c = dm.get(v, e.v) + &e.len;
            let apex = (&c - &a) / Rational::from_integer(2);
            let shape = if apex.is_zero() {
                ChainShape::YOnly
            } else if apex == e.len {
                ChainShape::XOnly
            } else {
                ChainShape::Peak(apex)
            };
            Chain { vertex: v, a, c, shape }
        })
        .collect();
    Ok(ChainSet { edge, len: e.len.clone(), chains })
}

/// Collinear segments of one slope sharing an intercept, with their apex offsets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sequence {
    pub intercept: Rational,
    /// Apexes of the member chains: descending for rising segments, ascending for falling.
    pub apexes: Vec<Rational>,
    pub members: Vec<usize>,
}

/// Rising segments grouped by intercept `a` (descending), falling ones by `c` (ascending).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentSequences {
    pub splus: Vec<Sequence>,
    pub sminus: Vec<Sequence>,
}

fn group(mut items: Vec<(Rational, Rational, usize)>) -> Vec<Sequence> {
    items.sort();
    let mut out: Vec<Sequence> = Vec::new();
    for (key, apex, v) in items {
        match out.last_mut() {
            Some(s) if s.intercept == key => {
                s.apexes.push(apex);
                s.members.push(v);
            }
            _ => out.push(Sequence { intercept: key, apexes: vec![apex], members: vec![v] }),
        }
    }
    out
}

pub fn segment_sequences(cs: &ChainSet) -> SegmentSequences {
    let rising = cs
        .chains
        .iter()
        .filter(|c| c.shape != ChainShape::YOnly)
        .map(|c| (-&c.a, -&c.apex(), c.vertex))
        .collect();
    let mut splus = group(rising);
    for s in &mut splus {
        s.intercept = -&s.intercept;
        for a in &mut s.apexes {
            *a = -&*a;
        }
    }
    let falling = cs
        .chains
        .iter()
        .filter(|c| c.shape != ChainShape::XOnly)
        .map(|c| (c.c.clone(), c.apex(), c.vertex))
        .collect();
    SegmentSequences { splus, sminus: group(falling) }
}

/// The k-th level as a polyline of alternating unit slopes from `t = 0` to `t = l(e)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelChain {
    pub edge: usize,
    pub k: usize,
    pub vertices: Vec<(Rational, Rational)>,
}

impl LevelChain {
    pub fn value_at(&self, t: &Rational) -> Rational {
        let i = self.vertices.partition_point(|(x, _)| x <= t).clamp(1, self.vertices.len() - 1);
        let (x0, y0) = &self.vertices[i - 1];
        let (x1, y1) = &self.vertices[i];
        if y1 > y0 {
            y0 + &(t - x0)
        } else if y1 < y0 {
            y0 - &(t - x0)
        } else {
            debug_assert_eq!(x0, x1);
            y0.clone()
        }
    }

    /// Lowest vertex, ties to the smaller offset.
    pub fn lowest(&self) -> (Rational, Rational) {
        self.vertices
            .iter()
            .min_by(|p, q| p.1.cmp(&q.1).then(p.0.cmp(&q.0)))
            .cloned()
            .expect("a level has at least two vertices")
    }

    pub fn to_json(&self, g: &Graph) -> String {
        let e = g.edge(self.edge);
        let pts: Vec<String> = self
            .vertices
            .iter()
            .map(|(x, y)| format!("[\"{}\",\"{}\"]", x.to_fraction_string(), y.to_fraction_string()))
            .collect();
        format!("{{\"edge\":[{},{}],\"k\":{},\"vertices\":[{}]}}", e.u + 1, e.v + 1, self.k, pts.join(","))
    }
}

enum Track {
    /// On the falling line `y = c - t`.
    Down(Rational),
    /// On the rising line of `splus[group]`.
    Up(usize),
}

/// Walks the level left to right. `count` is always the number of chains not above the
/// line currently followed, just right of the current position.
pub fn kth_level(cs: &ChainSet, k: usize) -> Result<LevelChain> {
    let n = cs.chains.len();
    if k == 0 || k > n {
        return Err(Error::KOutOfRange { k, n });
    }
    let len = &cs.len;
    let seqs = segment_sequences(cs);
    let (splus, sminus) = (&seqs.splus, &seqs.sminus);

    let mut starts: Vec<&Rational> = cs.chains.iter().map(|c| &c.a).collect();
    starts.sort();
    let y1 = starts[k - 1].clone();
    let below = cs.chains.iter().filter(|c| c.a < y1).count();
    let flat = cs.chains.iter().filter(|c| c.a == y1 && c.c == y1).count();

    let mut vertices = vec![(Rational::zero(), y1.clone())];
    let mut ip = splus.partition_point(|s| s.intercept >= y1);
    let mut im = sminus.partition_point(|s| s.intercept <= y1);
    let (mut track, mut count) = if below + flat >= k {
        (Track::Down(y1.clone()), below + flat)
    } else {
        let gi = splus
            .iter()
            .position(|s| s.intercept == y1)
            .ok_or_else(|| Error::Internal("starting rising line has no segments".into()))?;
        (Track::Up(gi), cs.chains.iter().filter(|c| c.a <= y1).count())
    };

    loop {
        match track {
            Track::Down(c) => {
                let mut turned = None;
                while let Some(s) = splus.get(ip) {
                    let q = (&c - &s.intercept) / Rational::from_integer(2);
                    if q >= *len {
                        break;
                    }
                    let leaving = s.apexes.partition_point(|ap| *ap > q);
                    if count - leaving < k {
                        turned = Some((q, ip));
                        break;
                    }
                    count -= leaving;
                    ip += 1;
                }
                match turned {
                    Some((q, gi)) => {
                        let y = &c - &q;
                        vertices.push((q, y));
                        track = Track::Up(gi);
                    }
                    None => {
                        vertices.push((len.clone(), &c - len));
                        break;
                    }
                }
            }
            Track::Up(gi) => {
                let a = &splus[gi].intercept;
                let mut turned = None;
                while let Some(s) = sminus.get(im) {
                    let q = (&s.intercept - a) / Rational::from_integer(2);
                    if q >= *len {
                        break;
                    }
                    count += s.apexes.partition_point(|ap| *ap < q);
                    let rest = count - splus[gi].apexes.partition_point(|ap| *ap > q);
                    im += 1;
                    if rest >= k {
                        count = rest;
                        turned = Some((q, s.intercept.clone()));
                        break;
                    }
                }
                match turned {
                    Some((q, c)) => {
                        let y = &q + a;
                        vertices.push((q, y));
                        ip = gi + 1;
                        track = Track::Down(c);
                    }
                    None => {
                        vertices.push((len.clone(), len + a));
                        break;
                    }
                }
            }
        }
    }
    Ok(LevelChain { edge: cs.edge, k, vertices })
}

pub fn solve_unweighted_graph(g: &Graph, k: usize) -> Result<Solution> {
    if !g.is_unit_weight() {
        return Err(Error::Weighted);
    }
    if k == 0 || k > g.n() {
        return Err(Error::KOutOfRange { k, n: g.n() });
    }
    let dm = all_pairs_distances(g);
    let lows = par::map_indices(g.m(), |e| -> Result<(Rational, Rational)> {
        let level = kth_level(&build_chains(g, &dm, e)?, k)?;
        let (x, y) = level.lowest();
        Ok((y, x))
    });
    let mut best: Option<(Rational, usize, Rational)> = None;
    for (e, low) in lows.into_iter().enumerate() {
        let (y, x) = low?;
        if best.as_ref().is_none_or(|(by, _, _)| y < *by) {
            best = Some((y, e, x));
        }
    }
    let (lambda_star, edge, t) = best.ok_or_else(|| Error::Internal("graph without edges".into()))?;
    let center = EdgePoint::new(g, edge, t);
    let all: Vec<usize> = (0..g.n()).collect();
    let subtree = k_closest(g, &dm, &center, &all, k);
    Ok(Solution { lambda_star, center, subtree })
}


#[cfg(test)]
mod oracle_agreement {
    use super::*;
    use crate::generate::{random_graph, GenParams};
    use crate::oracle::{brute_kth_level, Oracle};
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(60))]

        #[test]
        fn level_matches_sorted_values(
            n in 2usize..9,
            density in 0.0f64..0.6,
            seed in any::<u64>(),
            ts in prop::collection::vec((0i64..=32, 1i64..=32), 12),
        ) {
            let g = random_graph(&GenParams { n, density, weighted: false, max_den: 4, seed }).unwrap();
            let dm = all_pairs_distances(&g);
            let oracle = Oracle::new(&g);
            for e in 0..g.m() {
                let cs = build_chains(&g, &dm, e).unwrap();
                for k in 1..=n {
                    let level = kth_level(&cs, k).unwrap();
                    for w in level.vertices.windows(2) {
                        prop_assert!(w[0].0 < w[1].0);
                    }
                    for &(a, b) in &ts {
                        let t = &cs.len * &Rational::new(a.min(b), b);
                        prop_assert_eq!(level.value_at(&t), brute_kth_level(&cs.pairs(), k, &t));
                    }
                    prop_assert_eq!(level.lowest().1, oracle.level_minimum(e, k).1);
                }
            }
            let expect = oracle.lambda_all_k();
            for k in 1..=n {
                let s = solve_unweighted_graph(&g, k).unwrap();
                prop_assert_eq!(&s.lambda_star, &expect[k - 1]);
                prop_assert!(s.validate(&g, &dm, k).is_ok());
            }
        }
    }
}
