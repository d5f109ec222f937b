//! Seeded random instances: a random spanning tree plus extra edges, rational lengths and
//! (optionally) rational weights with small denominators.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq)]
pub struct GenParams {
    pub n: usize,
    /// Fraction of the non-tree vertex pairs that become extra edges.
    pub density: f64,
    pub weighted: bool,
    /// Largest denominator of generated lengths and weights.
    pub max_den: i64,
    pub seed: u64,
}

impl GenParams {
    pub fn tree(n: usize, weighted: bool, seed: u64) -> Self {
        GenParams { n, density: 0.0, weighted, max_den: 16, seed }
    }
}

fn random_rational(rng: &mut ChaCha8Rng, max_den: i64, max_value: i64) -> Rational {
    let q = rng.gen_range(1..=max_den);
    let p = rng.gen_range(1..=max_value * q);
    Rational::new(p, q)
}

pub fn random_graph(params: &GenParams) -> Result<Graph> {
    let n = params.n;
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 vertices, got {n}")));
    }
    if !(0.0..=1.0).contains(&params.density) {
        return Err(Error::InvalidParameter(format!("density {} outside [0, 1]", params.density)));
    }
    if params.max_den < 1 {
        return Err(Error::InvalidParameter("max_den must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut label: Vec<usize> = (0..n).collect();
    label.shuffle(&mut rng);

    let mut present: HashSet<(usize, usize)> = HashSet::with_capacity(n);
    let mut pairs = Vec::new();
    for v in 1..n {
        let p = rng.gen_range(0..v);
        let (a, b) = (label[p].min(label[v]), label[p].max(label[v]));
        present.insert((a, b));
        pairs.push((a, b));
    }
    let spare_count = n * (n - 1) / 2 - (n - 1);
    let extra = (params.density * spare_count as f64).round() as usize;
    if 2 * extra > spare_count {
        let mut spare: Vec<(usize, usize)> = (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .filter(|pair| !present.contains(pair))
            .collect();
        spare.shuffle(&mut rng);
        pairs.extend(spare.into_iter().take(extra));
    } else {
        // sparse: draw pairs until enough new ones are found
        while pairs.len() < n - 1 + extra {
            let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
            let pair = (a.min(b), a.max(b));
            if a != b && present.insert(pair) {
                pairs.push(pair);
            }
        }
    }

    let edges = pairs
        .into_iter()
        .map(|(a, b)| (a, b, random_rational(&mut rng, params.max_den, 4)))
        .collect();
    let weights = (0..n)
        .map(|_| {
            if params.weighted {
                random_rational(&mut rng, params.max_den, 3)
            } else {
                Rational::one()
            }
        })
        .collect();
    Graph::new(weights, edges)
}

pub fn random_tree(n: usize, weighted: bool, seed: u64) -> Result<Graph> {
    random_graph(&GenParams::tree(n, weighted, seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_graph() {
        let p = GenParams { n: 8, density: 0.3, weighted: true, max_den: 16, seed: 7 };
        assert_eq!(random_graph(&p).unwrap(), random_graph(&p).unwrap());
        let other = GenParams { seed: 8, ..p.clone() };
        assert_ne!(random_graph(&p).unwrap(), random_graph(&other).unwrap());
    }

    #[test]
    fn shapes() {
        let t = random_tree(12, false, 3).unwrap();
        assert!(t.is_tree());
        assert!(t.is_unit_weight());
        let full = random_graph(&GenParams { n: 6, density: 1.0, weighted: true, max_den: 16, seed: 1 }).unwrap();
        assert_eq!(full.m(), 15);
        for e in full.edges() {
            assert!(e.len.denom() <= num::BigInt::from(16));
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(random_tree(1, false, 0).is_err());
        assert!(random_graph(&GenParams { n: 4, density: 1.5, weighted: false, max_den: 16, seed: 0 }).is_err());
    }
}
