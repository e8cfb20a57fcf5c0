//! Successive shortest paths on the extended network `N^S`.
//!
//! For a terminal set `S`, the maximum flow over time from `S+ ∩ S` to
//! `S- \ S` is the temporally repeated flow of a static min-cost flow whose
//! path decomposition comes out of successive shortest path augmentations
//! with transit times as costs. The resulting [`SspProfile`] lists the
//! augmenting path lengths and amounts, and encodes `θ ↦ o^θ(S)` exactly:
//!
//! ```text
//! o^θ(S) = Σ_{ℓ_i ≤ θ} f_i · (θ − ℓ_i)
//! ```
//!
//! The parametric return arc of cost `−θ` is never built; its breakpoints
//! are exactly the path lengths produced here.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, VecDeque};
use std::sync::{Arc as Shared, RwLock};

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::network::{FlowNetwork, NodeId, TerminalSet};
use crate::rational::Rat;

/// An arc of the extended network.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendedArc {
    pub tail: NodeId,
    pub head: NodeId,
    pub capacity: Rat,
    pub cost: Rat,
    /// Index of the original arc, `None` for super source/sink arcs.
    pub original: Option<usize>,
}

/// `N^S`: the base network plus a super source and super sink.
#[derive(Debug, Clone)]
pub struct ExtendedNetwork {
    pub node_count: usize,
    pub source: NodeId,
    pub sink: NodeId,
    pub arcs: Vec<ExtendedArc>,
}

impl ExtendedNetwork {
    pub fn super_arcs(&self) -> impl Iterator<Item = &ExtendedArc> {
        self.arcs.iter().filter(|a| a.original.is_none())
    }
}

/// Builds `N^S`. The super source is node `n`, the super sink node `n + 1`;
/// the added arcs have zero transit and capacity `U = Σ u_a`.
pub fn build_extended(network: &FlowNetwork, set: TerminalSet) -> ExtendedNetwork {
    let n = network.node_count;
    let (source, sink) = (n, n + 1);
    let big = network.capacity_bound();
    let mut arcs: Vec<ExtendedArc> = network
        .arcs
        .iter()
        .enumerate()
        .map(|(i, a)| ExtendedArc {
            tail: a.tail,
            head: a.head,
            capacity: a.capacity.clone(),
            cost: a.transit.clone(),
            original: Some(i),
        })
        .collect();
    for (i, &v) in network.sources.iter().enumerate() {
        if set.contains(i) {
            arcs.push(ExtendedArc {
                tail: source,
                head: v,
                capacity: big.clone(),
                cost: Rat::zero(),
                original: None,
            });
        }
    }
    let offset = network.sources.len();
    for (j, &v) in network.sinks.iter().enumerate() {
        if !set.contains(offset + j) {
            arcs.push(ExtendedArc {
                tail: v,
                head: sink,
                capacity: big.clone(),
                cost: Rat::zero(),
                original: None,
            });
        }
    }
    ExtendedNetwork { node_count: n + 2, source, sink, arcs }
}

/// One augmenting path: its length, the amount pushed, and the signed arc
/// incidence `λ ∈ {−1,0,1}^A` with `length = Σ λ_a τ_a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub length: Rat,
    pub amount: Rat,
    pub certificate: Vec<i8>,
}

impl Segment {
    /// `Σ λ_a τ_a` recomputed from the certificate.
    pub fn certified_length(&self, network: &FlowNetwork) -> Rat {
        self.certificate
            .iter()
            .zip(&network.arcs)
            .map(|(&l, a)| match l {
                1 => a.transit.clone(),
                -1 => -a.transit.clone(),
                _ => Rat::zero(),
            })
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SspProfile {
    pub segments: Vec<Segment>,
    /// `Σ f_i`.
    pub max_static_value: Rat,
    /// True iff the residual network has no further augmenting path.
    pub exhausted: bool,
}

impl SspProfile {
    pub fn empty() -> Self {
        SspProfile { segments: Vec::new(), max_static_value: Rat::zero(), exhausted: true }
    }

    /// Static max-flow value; only meaningful for an exhausted profile.
    pub fn max_static_value(&self) -> Result<Rat> {
        if !self.exhausted {
            return Err(Error::TruncatedProfile { theta: "infinity".into() });
        }
        Ok(self.max_static_value.clone())
    }

    pub fn last_length(&self) -> Option<&Rat> {
        self.segments.last().map(|s| &s.length)
    }
}

#[derive(Debug, Clone)]
struct ResidualEdge {
    to: NodeId,
    cap: Rat,
    cost: Rat,
    /// Original arc and direction (+1 forward, −1 backward).
    original: Option<(usize, i8)>,
}

struct Residual {
    edges: Vec<ResidualEdge>,
    adj: Vec<Vec<usize>>,
}

impl Residual {
    fn new(ext: &ExtendedNetwork) -> Self {
        let mut r = Residual { edges: Vec::new(), adj: vec![Vec::new(); ext.node_count] };
        for a in &ext.arcs {
            let fwd = r.edges.len();
            r.edges.push(ResidualEdge {
                to: a.head,
                cap: a.capacity.clone(),
                cost: a.cost.clone(),
                original: a.original.map(|i| (i, 1)),
            });
            r.edges.push(ResidualEdge {
                to: a.tail,
                cap: Rat::zero(),
                cost: -a.cost.clone(),
                original: a.original.map(|i| (i, -1)),
            });
            r.adj[a.tail].push(fwd);
            r.adj[a.head].push(fwd + 1);
        }
        r
    }

    fn reduced_cost(&self, tail: NodeId, e: usize, potential: &[Rat]) -> Rat {
        let edge = &self.edges[e];
        &edge.cost + &potential[tail] - &potential[edge.to]
    }
}

/// Computes the full profile of `S`.
pub fn compute_profile(network: &FlowNetwork, set: TerminalSet) -> SspProfile {
    compute_profile_limited(network, set, usize::MAX)
}

/// Like [`compute_profile`] but stops after `max_segments` augmentations.
/// The result is marked not exhausted if an augmenting path remains.
pub fn compute_profile_limited(
    network: &FlowNetwork,
    set: TerminalSet,
    max_segments: usize,
) -> SspProfile {
    let ext = build_extended(network, set);
    let mut residual = Residual::new(&ext);
    let nodes = ext.node_count;
    let mut potential = vec![Rat::zero(); nodes];
    let mut segments = Vec::new();
    let mut total = Rat::zero();

    loop {
        let dist = dijkstra(&residual, ext.source, &potential);
        let Some(dist_sink) = dist[ext.sink].clone() else {
            break;
        };
        if segments.len() >= max_segments {
            return SspProfile { segments, max_static_value: total, exhausted: false };
        }
        let path = lexmin_tight_path(&residual, &dist, &potential, ext.source, ext.sink);

        let amount = path
            .iter()
            .map(|&e| &residual.edges[e].cap)
            .min()
            .expect("augmenting path has at least one edge")
            .clone();
        let mut certificate = vec![0i8; network.arcs.len()];
        let mut length = Rat::zero();
        for &e in &path {
            let edge = &mut residual.edges[e];
            edge.cap -= &amount;
            length += &edge.cost;
            if let Some((a, dir)) = edge.original {
                certificate[a] += dir;
            }
            residual.edges[e ^ 1].cap += &amount;
        }
        debug_assert_eq!(length, dist_sink + &potential[ext.sink] - &potential[ext.source]);

        for (v, d) in dist.iter().enumerate() {
            if let Some(d) = d {
                potential[v] += d;
            }
        }
        total += &amount;
        segments.push(Segment { length, amount, certificate });
    }
    SspProfile { segments, max_static_value: total, exhausted: true }
}

/// Shortest distances w.r.t. reduced costs; `None` for unreachable nodes.
fn dijkstra(residual: &Residual, source: NodeId, potential: &[Rat]) -> Vec<Option<Rat>> {
    let n = residual.adj.len();
    let mut dist: Vec<Option<Rat>> = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[source] = Some(Rat::zero());
    heap.push(Reverse((Rat::zero(), source)));
    while let Some(Reverse((d, u))) = heap.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        for &e in &residual.adj[u] {
            let edge = &residual.edges[e];
            if !edge.cap.is_positive() || done[edge.to] {
                continue;
            }
            let rc = residual.reduced_cost(u, e, potential);
            debug_assert!(!rc.is_negative(), "negative reduced cost");
            let nd = &d + rc;
            if dist[edge.to].as_ref().is_none_or(|old| nd < *old) {
                dist[edge.to] = Some(nd.clone());
                heap.push(Reverse((nd, edge.to)));
            }
        }
    }
    dist
}

/// Among all shortest residual paths, the one with the lexicographically
/// smallest node sequence. Returns residual edge indices.
fn lexmin_tight_path(
    residual: &Residual,
    dist: &[Option<Rat>],
    potential: &[Rat],
    source: NodeId,
    sink: NodeId,
) -> Vec<usize> {
    let n = residual.adj.len();
    // tight[u] = (head, edge) pairs on some shortest path, smallest edge per head
    let mut tight: Vec<Vec<(NodeId, usize)>> = vec![Vec::new(); n];
    for u in 0..n {
        let Some(du) = &dist[u] else { continue };
        for &e in &residual.adj[u] {
            let edge = &residual.edges[e];
            if !edge.cap.is_positive() {
                continue;
            }
            let Some(dv) = &dist[edge.to] else { continue };
            if du + residual.reduced_cost(u, e, potential) == *dv
                && !tight[u].iter().any(|&(h, _)| h == edge.to)
            {
                tight[u].push((edge.to, e));
            }
        }
        tight[u].sort();
    }
    let mut reverse: Vec<Vec<NodeId>> = vec![Vec::new(); n];
    for (u, outs) in tight.iter().enumerate() {
        for &(v, _) in outs {
            reverse[v].push(u);
        }
    }

    let mut visited = vec![false; n];
    let mut path = Vec::new();
    let mut current = source;
    visited[source] = true;
    while current != sink {
        let reach = reaches_sink(&reverse, sink, &visited);
        let &(next, e) = tight[current]
            .iter()
            .find(|&&(v, _)| !visited[v] && reach[v])
            .expect("a shortest path to the sink exists");
        path.push(e);
        visited[next] = true;
        current = next;
    }
    path
}

/// Nodes that can reach `sink` through unvisited nodes.
fn reaches_sink(reverse: &[Vec<NodeId>], sink: NodeId, visited: &[bool]) -> Vec<bool> {
    let mut reach = vec![false; reverse.len()];
    reach[sink] = true;
    let mut queue = VecDeque::from([sink]);
    while let Some(v) = queue.pop_front() {
        for &u in &reverse[v] {
            if !reach[u] && !visited[u] {
                reach[u] = true;
                queue.push_back(u);
            }
        }
    }
    reach
}

/// Per-instance memo of profiles, keyed by terminal set. Many readers may
/// look up concurrently; insertion takes the write lock.
#[derive(Debug, Default)]
pub struct ProfileCache {
    map: RwLock<HashMap<TerminalSet, Shared<SspProfile>>>,
}

impl ProfileCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get_or_compute(&self, network: &FlowNetwork, set: TerminalSet) -> Shared<SspProfile> {
        if let Some(p) = self.map.read().expect("profile cache poisoned").get(&set) {
            return p.clone();
        }
        let profile = Shared::new(compute_profile(network, set));
        self.map
            .write()
            .expect("profile cache poisoned")
            .entry(set)
            .or_insert(profile)
            .clone()
    }

    pub fn len(&self) -> usize {
        self.map.read().expect("profile cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::Arc;
    use crate::rational::int;

    fn single_arc() -> FlowNetwork {
        FlowNetwork::new(2, vec![Arc::new(0, 1, int(1), int(2))], vec![0], vec![1])
    }

    /// s1 = 0, s2 = 1, t = 2; s1→t (u=2, τ=0), s2→t (u=1, τ=1).
    fn instance_b() -> FlowNetwork {
        FlowNetwork::new(
            3,
            vec![Arc::new(0, 2, int(2), int(0)), Arc::new(1, 2, int(1), int(1))],
            vec![0, 1],
            vec![2],
        )
    }

    #[test]
    fn extended_network_wiring() {
        let net = instance_b();
        let ext = build_extended(&net, TerminalSet::EMPTY);
        assert!(ext.arcs.iter().all(|a| a.tail != ext.source));
        let ext = build_extended(&net, net.full_set());
        assert!(ext.arcs.iter().all(|a| a.head != ext.sink));
        let ext = build_extended(&net, TerminalSet::from_indices([0, 1]));
        let added: Vec<_> = ext.super_arcs().collect();
        assert_eq!(added.len(), 3);
        assert!(added.iter().all(|a| a.cost.is_zero() && a.capacity == int(3)));
    }

    #[test]
    fn instance_b_profile() {
        let net = instance_b();
        let p = compute_profile(&net, TerminalSet::from_indices([0, 1]));
        let pairs: Vec<_> = p.segments.iter().map(|s| (s.length.clone(), s.amount.clone())).collect();
        assert_eq!(pairs, vec![(int(0), int(2)), (int(1), int(1))]);
        assert_eq!(p.max_static_value().unwrap(), int(3));
        assert!(p.exhausted);
        assert_eq!(p.segments[0].certificate, vec![1, 0]);
        assert_eq!(p.segments[1].certificate, vec![0, 1]);
    }

    #[test]
    fn single_arc_profile() {
        let p = compute_profile(&single_arc(), TerminalSet::from_indices([0]));
        assert_eq!(p.segments.len(), 1);
        assert_eq!((p.segments[0].length.clone(), p.segments[0].amount.clone()), (int(2), int(1)));
        assert_eq!(p.max_static_value().unwrap(), int(1));
    }

    #[test]
    fn empty_set_has_empty_profile() {
        for net in [single_arc(), instance_b()] {
            let p = compute_profile(&net, TerminalSet::EMPTY);
            assert!(p.segments.is_empty());
            assert_eq!(p.max_static_value().unwrap(), int(0));
        }
    }

    #[test]
    fn truncated_profile_is_flagged() {
        let p = compute_profile_limited(&instance_b(), TerminalSet::from_indices([0, 1]), 1);
        assert!(!p.exhausted);
        assert_eq!(p.segments.len(), 1);
        assert!(p.max_static_value().is_err());
        let p = compute_profile_limited(&instance_b(), TerminalSet::from_indices([0, 1]), 2);
        assert!(p.exhausted);
    }

    #[test]
    fn backward_arc_appears_in_certificate() {
        // First path 0→1→2→3 (length 1) blocks both direct routes; the
        // second path 0→2→1→3 cancels flow on 1→2 (length 1 + 10).
        let net = FlowNetwork::new(
            4,
            vec![
                Arc::new(0, 1, int(1), int(0)),
                Arc::new(1, 3, int(1), int(10)),
                Arc::new(0, 2, int(1), int(1)),
                Arc::new(2, 3, int(1), int(1)),
                Arc::new(1, 2, int(1), int(0)),
            ],
            vec![0],
            vec![3],
        );
        let p = compute_profile(&net, TerminalSet::from_indices([0]));
        assert_eq!(p.segments.len(), 2);
        assert_eq!(p.segments[0].length, int(1));
        assert_eq!(p.segments[0].certificate, vec![1, 0, 0, 1, 1]);
        assert_eq!(p.segments[1].length, int(11));
        assert_eq!(p.segments[1].certificate, vec![0, 1, 1, 0, -1]);
        for s in &p.segments {
            assert_eq!(s.certified_length(&net), s.length);
        }
    }

    #[test]
    fn cache_returns_same_profile() {
        let net = instance_b();
        let cache = ProfileCache::new();
        let a = cache.get_or_compute(&net, TerminalSet::from_indices([0]));
        let b = cache.get_or_compute(&net, TerminalSet::from_indices([0]));
        assert!(Shared::ptr_eq(&a, &b));
        assert_eq!(cache.len(), 1);
    }
}
