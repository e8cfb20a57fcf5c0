//! Seeded random instances.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::io::{ArcDocument, InstanceDocument, RatValue, SinkDocument, SourceDocument};
use crate::network::{TerminalSet, MAX_TERMINALS};
use crate::rational::int;
use crate::sfm::DEFAULT_BRUTE_FORCE_CAP;

const MAX_ATTEMPTS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneratorParams {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub max_capacity: u32,
    pub max_transit: u32,
    pub max_supply: u32,
    pub seed: u64,
}

impl GeneratorParams {
    fn check(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Parameter(msg));
        if self.k < 2 {
            return fail(format!("k = {} but at least one source and one sink are needed", self.k));
        }
        if self.k > self.n.min(MAX_TERMINALS) {
            return fail(format!("k = {} exceeds min(n, {MAX_TERMINALS}) with n = {}", self.k, self.n));
        }
        if self.m + 1 < self.n {
            return fail(format!("m = {} is below n - 1 = {}", self.m, self.n - 1));
        }
        if self.max_capacity == 0 || self.max_supply == 0 {
            return fail("max capacity and max supply must be positive".into());
        }
        Ok(())
    }
}

/// Generates a weakly connected instance in which every source reaches a
/// sink and no terminal set has positive net supply without any path out,
/// so the instance has a finite quickest horizon. Deterministic per seed.
pub fn generate_instance(params: &GeneratorParams) -> Result<InstanceDocument> {
    params.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    for _ in 0..MAX_ATTEMPTS {
        let doc = draw(params, &mut rng);
        if has_finite_horizon(&doc) {
            return Ok(doc);
        }
    }
    Err(Error::Parameter(format!(
        "no instance with a finite horizon after {MAX_ATTEMPTS} attempts"
    )))
}

fn draw(p: &GeneratorParams, rng: &mut ChaCha8Rng) -> InstanceDocument {
    let mut order: Vec<usize> = (0..p.n).collect();
    order.shuffle(rng);
    let source_count = rng.gen_range(1..p.k);
    let sources: Vec<usize> = order[..source_count].to_vec();
    let sinks: Vec<usize> = order[source_count..p.k].to_vec();

    // in-tree towards the first sink: every node reaches it
    let root = sinks[0];
    let mut tree_order: Vec<usize> = order.iter().copied().filter(|&v| v != root).collect();
    tree_order.shuffle(rng);
    tree_order.insert(0, root);
    let mut ends: Vec<(usize, usize)> = (1..p.n)
        .map(|i| (tree_order[i], tree_order[rng.gen_range(0..i)]))
        .collect();
    while ends.len() < p.m {
        let tail = rng.gen_range(0..p.n);
        let head = rng.gen_range(0..p.n);
        if tail != head {
            ends.push((tail, head));
        }
    }
    ends.shuffle(rng);
    let arcs = ends
        .into_iter()
        .map(|(tail, head)| ArcDocument {
            tail,
            head,
            capacity: RatValue(int(rng.gen_range(1..=p.max_capacity) as i64)),
            transit: RatValue(int(rng.gen_range(0..=p.max_transit) as i64)),
        })
        .collect();

    let mut supply: Vec<i64> = (0..sources.len()).map(|_| rng.gen_range(1..=p.max_supply) as i64).collect();
    let mut demand: Vec<i64> = (0..sinks.len()).map(|_| rng.gen_range(1..=p.max_supply) as i64).collect();
    let (s_total, d_total): (i64, i64) = (supply.iter().sum(), demand.iter().sum());
    if s_total > d_total {
        shave(&mut supply, s_total - d_total, rng);
    } else {
        shave(&mut demand, d_total - s_total, rng);
    }

    InstanceDocument {
        nodes: p.n,
        arcs,
        sources: sources
            .into_iter()
            .zip(supply)
            .map(|(node, s)| SourceDocument { node, supply: RatValue(int(s)) })
            .collect(),
        sinks: sinks
            .into_iter()
            .zip(demand)
            .map(|(node, d)| SinkDocument { node, demand: RatValue(int(d)) })
            .collect(),
    }
}

/// Removes `excess` units, one at a time from random positive entries.
fn shave(values: &mut [i64], mut excess: i64, rng: &mut ChaCha8Rng) {
    while excess > 0 {
        let i = rng.gen_range(0..values.len());
        if values[i] > 0 {
            values[i] -= 1;
            excess -= 1;
        }
    }
}

/// Every terminal set with positive net supply needs a path from one of its
/// sources to a sink outside it. Exact for `k` up to the brute-force cap,
/// otherwise requires every source to reach every sink.
fn has_finite_horizon(doc: &InstanceDocument) -> bool {
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); doc.nodes];
    for a in &doc.arcs {
        if a.capacity.0 > int(0) {
            out[a.tail].push(a.head);
        }
    }
    let reach: Vec<Vec<bool>> = doc
        .sources
        .iter()
        .map(|s| {
            let seen = reachable(&out, s.node);
            doc.sinks.iter().map(|t| seen[t.node]).collect()
        })
        .collect();
    let ns = doc.sources.len();
    let k = ns + doc.sinks.len();
    if k > DEFAULT_BRUTE_FORCE_CAP {
        return reach.iter().all(|row| row.iter().all(|&r| r));
    }
    let b: Vec<_> = doc
        .sources
        .iter()
        .map(|s| s.supply.0.clone())
        .chain(doc.sinks.iter().map(|t| -t.demand.0.clone()))
        .collect();
    TerminalSet::all_subsets(k).all(|set| {
        let total: crate::rational::Rat = set.iter().map(|i| &b[i]).sum();
        if total <= int(0) {
            return true;
        }
        set.iter()
            .filter(|&i| i < ns)
            .any(|i| (0..doc.sinks.len()).any(|j| !set.contains(ns + j) && reach[i][j]))
    })
}

fn reachable(out: &[Vec<usize>], from: usize) -> Vec<bool> {
    let mut seen = vec![false; out.len()];
    seen[from] = true;
    let mut queue = VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        for &v in &out[u] {
            if !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    seen
}

/// Corpus parameters: `n ≤ 10`, `m ≤ 25`, `k ∈ 2..=6`, transit times and
/// capacities at most 10, supplies at most 30. Derived from `seed` alone.
pub fn corpus_params(seed: u64) -> GeneratorParams {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let k = rng.gen_range(2..=6);
    let n = rng.gen_range(k.max(3)..=10);
    let m = rng.gen_range(n - 1..=25);
    GeneratorParams { n, m, k, max_capacity: 10, max_transit: 10, max_supply: 30, seed }
}

pub fn corpus_instance(seed: u64) -> Result<InstanceDocument> {
    generate_instance(&corpus_params(seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::validate_instance;
    use num_traits::Signed;

    fn params(seed: u64) -> GeneratorParams {
        GeneratorParams { n: 6, m: 12, k: 4, max_capacity: 5, max_transit: 5, max_supply: 10, seed }
    }

    #[test]
    fn deterministic_per_seed() {
        let a = generate_instance(&params(1)).unwrap().to_json();
        let b = generate_instance(&params(1)).unwrap().to_json();
        assert_eq!(a, b);
        assert_ne!(a, generate_instance(&params(2)).unwrap().to_json());
    }

    #[test]
    fn parameter_errors() {
        let mut p = params(1);
        p.k = 7;
        assert!(generate_instance(&p).is_err());
        let mut p = params(1);
        p.k = 1;
        assert!(generate_instance(&p).is_err());
        let mut p = params(1);
        p.m = 3;
        assert!(generate_instance(&p).is_err());
    }

    #[test]
    fn generated_instances_are_valid() {
        for seed in 0..50 {
            let doc = generate_instance(&params(seed)).unwrap();
            let inst = doc.to_instance().unwrap();
            assert!(validate_instance(&inst.network, &inst.supply).is_empty());
            assert_eq!(inst.network.arcs.len(), 12);
            assert_eq!(inst.k(), 4);
        }
    }

    #[test]
    fn corpus_stays_in_bounds() {
        for seed in 0..200 {
            let p = corpus_params(seed);
            assert!(p.n <= 10 && p.m <= 25 && (2..=6).contains(&p.k) && p.k <= p.n);
            let inst = corpus_instance(seed).unwrap().to_instance().unwrap();
            assert!(inst.supply.values.iter().all(|v| v.abs() <= int(30)));
        }
    }
}
