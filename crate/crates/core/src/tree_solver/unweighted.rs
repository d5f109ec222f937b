use num::{BigInt, Integer, One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, Solution};
use crate::par;
use crate::rational::Rational;

use super::centroid::{CentroidDecomposition, Length, Spot, TreeFrame};
use super::{check_k, single_vertex};

/// Pair sums left for explicit enumeration.
const ENUMERATE_BELOW: u64 = 4096;

/// The k-th smallest element (1-based) of the union of sorted slices.
pub fn kth_smallest_sorted_arrays<T: Ord + Clone>(views: &[&[T]], k: usize) -> Result<T> {
    let total: usize = views.iter().map(|v| v.len()).sum();
    if k == 0 || k > total {
        return Err(Error::InvalidParameter(format!("k = {k} outside 1..={total}")));
    }
    let mut lo = vec![0; views.len()];
    let mut hi: Vec<usize> = views.iter().map(|v| v.len()).collect();
    let mut k = k;
    loop {
        // weighted median of the middle elements of the live ranges
        let mut mids: Vec<(&T, usize)> =
            (0..views.len()).filter(|&i| lo[i] < hi[i]).map(|i| (&views[i][(lo[i] + hi[i]) / 2], hi[i] - lo[i])).collect();
        mids.sort_by(|a, b| a.0.cmp(b.0));
        let live: usize = mids.iter().map(|m| m.1).sum();
        let mut acc = 0;
        let pivot = mids
            .iter()
            .find(|m| {
                acc += m.1;
                2 * acc >= live
            })
            .expect("some range is live")
            .0
            .clone();
        let less: Vec<usize> = (0..views.len()).map(|i| views[i][lo[i]..hi[i]].partition_point(|x| *x < pivot)).collect();
        let leq: Vec<usize> = (0..views.len()).map(|i| views[i][lo[i]..hi[i]].partition_point(|x| *x <= pivot)).collect();
        let (nless, nleq): (usize, usize) = (less.iter().sum(), leq.iter().sum());
        if k <= nless {
            for i in 0..views.len() {
                hi[i] = lo[i] + less[i];
            }
        } else if k <= nleq {
            return Ok(pivot);
        } else {
            k -= nleq;
            for i in 0..views.len() {
                lo[i] += leq[i];
            }
        }
    }
}

/// Common scale turning every length into an even integer, if all path lengths then fit
/// comfortably in an `i64`.
fn integer_scale(g: &Graph) -> Option<i64> {
    let mut l: BigInt = BigInt::one();
    for e in g.edges() {
        l = l.lcm(&e.len.denom());
    }
    let scale: BigInt = l * 2;
    let mut total = BigInt::from(0);
    for e in g.edges() {
        total += e.len.numer() * (&scale / e.len.denom());
    }
    if total > BigInt::from(1i64 << 60) {
        return None;
    }
    scale.to_i64()
}

fn to_units(len: &Rational, scale: i64) -> i64 {
    (len.numer() * (BigInt::from(scale) / len.denom())).to_i64().expect("checked by integer_scale")
}

pub fn solve_unweighted_tree(g: &Graph, k: usize) -> Result<Solution> {
    check_k(g, k)?;
    if !g.is_unit_weight() {
        return Err(Error::Weighted);
    }
    if !g.is_tree() {
        return Err(Error::NotATree);
    }
    if k == 1 {
        return Ok(single_vertex(g));
    }
    match integer_scale(g) {
        Some(scale) => Selection::<i64>::new(g, |l| to_units(l, scale))?.solve(g, k, |x| Rational::new(*x, scale)),
        None => Selection::<Rational>::new(g, Rational::clone)?.solve(g, k, Rational::clone),
    }
}

/// Search over the sums `d(u, c) + d(c, v)` for pairs in the component of a centroid `c`.
/// Every pair distance appears there, so the smallest feasible sum is twice the optimum.
struct Selection<L> {
    frame: TreeFrame<L>,
    cd: CentroidDecomposition<L>,
}

/// Pairs `i < j` of a sorted slice with `a_i + a_j <= x` (or `< x` when `strict`).
fn pairs_below<L: Length>(a: &[L], x: &L, strict: bool) -> u64 {
    let below = |s: &L| if strict { s < x } else { s <= x };
    let mut count = 0u64;
    let mut j = a.len();
    for i in 0..a.len() {
        while j > i + 1 && !below(&a[i].plus(&a[j - 1])) {
            j -= 1;
        }
        if j <= i + 1 {
            break;
        }
        count += (j - i - 1) as u64;
    }
    count
}

/// Indices `j > i` with `lo < a_i + a_j < hi`.
fn partner_range<L: Length>(a: &[L], i: usize, lo: Option<&L>, hi: Option<&L>) -> (usize, usize) {
    let rest = &a[i + 1..];
    let from = lo.map_or(0, |lo| rest.partition_point(|b| a[i].plus(b) <= *lo));
    let to = hi.map_or(rest.len(), |hi| rest.partition_point(|b| a[i].plus(b) < *hi));
    (i + 1 + from, i + 1 + to.max(from))
}

impl<L: Length> Selection<L> {
    fn new(g: &Graph, len: impl Fn(&Rational) -> L) -> Result<Self> {
        let frame = TreeFrame::new(g, len)?;
        let cd = CentroidDecomposition::new(&frame);
        Ok(Selection { frame, cd })
    }

    fn ball(&self, spot: &Spot<L>, r: &L) -> usize {
        match spot {
            Spot::Vertex(v) => self.cd.ball_at_vertex(*v, r, 0),
            Spot::Edge { upper, lower, from_upper } => {
                let rest = self.frame.plen[*lower].minus(from_upper);
                self.cd.ball_at_point(*upper, *lower, from_upper, &rest, r)
            }
        }
    }

    /// A critical point holding `k` vertices within half of `sum`.
    fn feasible(&self, k: usize, sum: &L) -> Option<Spot<L>> {
        let lambda = sum.half();
        let spots = self.frame.critical_spots(|_| lambda.clone());
        par::find_map_first(spots.len(), |v| (self.ball(&spots[v], &lambda) >= k).then(|| spots[v].clone()))
    }

    fn count_between(&self, lo: Option<&L>, hi: Option<&L>) -> Vec<u64> {
        par::map_slice(&self.cd.all, |a| {
            let upto = hi.map_or((a.len() * a.len().saturating_sub(1) / 2) as u64, |hi| pairs_below(a, hi, true));
            upto - lo.map_or(0, |lo| pairs_below(a, lo, false))
        })
    }

    fn pick(&self, counts: &[u64], mut r: u64, lo: Option<&L>, hi: Option<&L>) -> L {
        let c = counts
            .iter()
            .position(|&n| {
                if r < n {
                    true
                } else {
                    r -= n;
                    false
                }
            })
            .expect("rank below the total");
        let a = &self.cd.all[c];
        for i in 0..a.len() {
            let (from, to) = partner_range(a, i, lo, hi);
            let n = (to - from) as u64;
            if r < n {
                return a[i].plus(&a[from + r as usize]);
            }
            r -= n;
        }
        unreachable!("rank lies in this component")
    }

    fn enumerate(&self, lo: Option<&L>, hi: Option<&L>) -> Vec<L> {
        let mut out = Vec::new();
        for a in &self.cd.all {
            for i in 0..a.len() {
                let (from, to) = partner_range(a, i, lo, hi);
                out.extend(a[from..to].iter().map(|b| a[i].plus(b)));
            }
        }
        out.sort();
        out.dedup();
        out
    }

    /// Smallest feasible pair sum.
    fn smallest_sum(&self, k: usize) -> Result<L> {
        // a ball around any centroid holding k vertices of its own component is feasible
        let mut hi: Option<L> =
            self.cd.all.iter().filter(|a| a.len() >= k).map(|a| a[k - 1].plus(&a[k - 1])).min();
        let mut lo: Option<L> = None;
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        loop {
            let counts = self.count_between(lo.as_ref(), hi.as_ref());
            let total: u64 = counts.iter().sum();
            if total <= ENUMERATE_BELOW {
                let sums = self.enumerate(lo.as_ref(), hi.as_ref());
                let i = sums.partition_point(|s| self.feasible(k, s).is_none());
                return sums.get(i).cloned().or(hi).ok_or(Error::NoFeasibleCandidate);
            }
            let s = self.pick(&counts, rng.gen_range(0..total), lo.as_ref(), hi.as_ref());
            if self.feasible(k, &s).is_some() {
                hi = Some(s);
            } else {
                lo = Some(s);
            }
        }
    }

    fn solve(&self, g: &Graph, k: usize, back: impl Fn(&L) -> Rational) -> Result<Solution> {
        let sum = self.smallest_sum(k)?;
        let spot = self.feasible(k, &sum).ok_or_else(|| Error::Internal("optimum is not feasible".into()))?;
        let dist = self.frame.distances_from(&spot);
        let mut order: Vec<usize> = (0..g.n()).collect();
        order.sort_by(|&a, &b| dist[a].cmp(&dist[b]).then(a.cmp(&b)));
        order.truncate(k);
        let center = self.diameter_midpoint(&order);
        order.sort_unstable();
        let to_rational = |s: &Spot<L>| match s {
            Spot::Vertex(v) => Spot::Vertex(*v),
            Spot::Edge { upper, lower, from_upper } => {
                Spot::Edge { upper: *upper, lower: *lower, from_upper: back(from_upper) }
            }
        };
        Ok(Solution { lambda_star: back(&sum.half()), center: to_rational(&center).to_edge_point(g), subtree: order })
    }

    /// Middle of a longest path inside the connected vertex set `set`.
    fn diameter_midpoint(&self, set: &[usize]) -> Spot<L> {
        let farthest = |from: usize| -> (usize, Vec<L>) {
            let d = self.frame.distances_from(&Spot::Vertex(from));
            let far = set.iter().copied().max_by(|&a, &b| d[a].cmp(&d[b]).then(b.cmp(&a))).expect("non-empty set");
            (far, d)
        };
        let (a, _) = farthest(set[0]);
        let (b, da) = farthest(a);
        let mid = da[b].half();
        // walk from b towards a until the distance to a drops to the middle
        let mut v = b;
        loop {
            if da[v] == mid {
                return Spot::Vertex(v);
            }
            let p = self.frame.adj[v]
                .iter()
                .find(|(u, l)| da[*u].plus(l) == da[v])
                .map(|(u, _)| *u)
                .expect("a shortest path leads back to a");
            if da[p] < mid {
                return if self.frame.parent[v] == Some(p) {
                    Spot::Edge { upper: p, lower: v, from_upper: mid.minus(&da[p]) }
                } else {
                    Spot::Edge { upper: v, lower: p, from_upper: da[v].minus(&mid) }
                };
            }
            v = p;
        }
    }
}
