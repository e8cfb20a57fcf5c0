//! Time-expanded networks: an independent feasibility check and extraction
//! of an explicit transshipment over time.
//!
//! Rational data is first stretched to integral transit times and horizon
//! (`τ' = qτ`, `T = qθ`, `u' = u/q`, supplies unchanged). Layer `t` of the
//! expanded network stands for the time step `[t, t+1)`; a copy of arc `a`
//! in layer `t` carries what enters `a` during that step, which leaves `a`
//! during step `t + τ'_a`. A copy exists only if that step ends by `T`.
//! Every node may hold flow over from one step to the next.

use std::collections::VecDeque;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::network::{Arc, FlowNetwork, Instance, NodeId};
use crate::rational::{format_rat, int, lcm_of_denominators, Rat};

/// Default bound on `(T + 1) · n`.
pub const DEFAULT_NODE_CAP: u128 = 200_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaledNetwork {
    pub network: FlowNetwork,
    pub horizon: u64,
    pub scale: u64,
}

fn to_u64(v: &BigInt, what: &'static str) -> Result<u64> {
    v.to_u64().ok_or(Error::CapExceeded { what, size: u128::MAX, cap: u64::MAX as u128 })
}

/// Scales time by `q`, the lcm of the denominators of `θ` and all transit
/// times, so that `T = qθ` and every `qτ_a` are integers. Capacities are
/// rates and shrink to `u/q` so that a step of length one in the scaled
/// model carries the volume that rate `u` carries over time `1/q`.
pub fn scale_to_integral(network: &FlowNetwork, theta: &Rat) -> Result<ScaledNetwork> {
    if theta.is_negative() {
        return Err(Error::Parameter("time horizon must be nonnegative".into()));
    }
    let q = lcm_of_denominators(std::iter::once(theta).chain(network.arcs.iter().map(|a| &a.transit)));
    scale_by(network, theta, &q)
}

/// Scales by an explicit common multiple `q` of the relevant denominators.
pub fn scale_by(network: &FlowNetwork, theta: &Rat, q: &BigInt) -> Result<ScaledNetwork> {
    let qr = Rat::from_integer(q.clone());
    let horizon = &qr * theta;
    if !horizon.is_integer() {
        return Err(Error::Parameter(format!("{q} does not make theta integral")));
    }
    let mut arcs = Vec::with_capacity(network.arcs.len());
    for a in &network.arcs {
        let transit = &qr * &a.transit;
        if !transit.is_integer() {
            return Err(Error::Parameter(format!("{q} does not make all transit times integral")));
        }
        arcs.push(Arc::new(a.tail, a.head, &a.capacity / &qr, transit));
    }
    Ok(ScaledNetwork {
        network: FlowNetwork::new(network.node_count, arcs, network.sources.clone(), network.sinks.clone()),
        horizon: to_u64(horizon.numer(), "scaled horizon")?,
        scale: to_u64(q, "time scale")?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CopyKind {
    /// Copy of base arc `arc` entered during step `layer`.
    Movement { arc: usize, layer: u64 },
    /// Storage at `node` from step `layer` to `layer + 1`.
    Holdover { node: NodeId, layer: u64 },
    /// Super source to a source in step 0, capacity `b(s)`.
    Supply { terminal: usize },
    /// Sink copy in `layer` to the collector of that sink.
    Arrival { terminal: usize, layer: u64 },
    /// Collector to super sink, capacity `−b(t)`.
    Demand { terminal: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpandedArc {
    pub tail: usize,
    pub head: usize,
    pub capacity: Rat,
    pub kind: CopyKind,
}

#[derive(Debug, Clone)]
pub struct TimeExpandedNetwork {
    pub base_nodes: usize,
    pub horizon: u64,
    pub node_count: usize,
    pub source: usize,
    pub sink: usize,
    pub arcs: Vec<ExpandedArc>,
}

impl TimeExpandedNetwork {
    pub fn node(&self, v: NodeId, layer: u64) -> usize {
        layer as usize * self.base_nodes + v
    }

    pub fn movement_copies(&self, arc: usize) -> usize {
        self.arcs
            .iter()
            .filter(|a| matches!(a.kind, CopyKind::Movement { arc: x, .. } if x == arc))
            .count()
    }
}

/// Builds the expanded network of `instance` (integral transit times
/// required) over `horizon` steps. Fails if `(T + 1) · n` exceeds
/// `node_cap`.
pub fn build_time_expanded(instance: &Instance, horizon: u64, node_cap: u128) -> Result<TimeExpandedNetwork> {
    let network = &instance.network;
    let ns = network.sources.len();
    let sources: Vec<_> = network
        .sources
        .iter()
        .zip(&instance.supply.values)
        .map(|(&v, b)| (v, b.clone()))
        .collect();
    let sinks: Vec<_> = network
        .sinks
        .iter()
        .zip(&instance.supply.values[ns..])
        .map(|(&v, b)| (v, -b.clone()))
        .collect();
    // no node ever holds more than the total supply
    layered(network, horizon, &sources, &sinks, &instance.supply.total_supply(), node_cap)
}

/// Layered network with `sources` fed from a super source at step 0 and
/// `sinks` drained into a super sink from every step, each through an arc of
/// the given capacity. Terminal indices in [`CopyKind`] count sources first.
fn layered(
    network: &FlowNetwork,
    horizon: u64,
    sources: &[(NodeId, Rat)],
    sinks: &[(NodeId, Rat)],
    storage: &Rat,
    node_cap: u128,
) -> Result<TimeExpandedNetwork> {
    let n = network.node_count;
    let size = (horizon as u128 + 1) * n as u128;
    if size > node_cap {
        return Err(Error::CapExceeded { what: "time-expanded network size", size, cap: node_cap });
    }
    let mut transits = Vec::with_capacity(network.arcs.len());
    for (i, a) in network.arcs.iter().enumerate() {
        if !a.transit.is_integer() {
            return Err(Error::Parameter(format!("arc {i} has non-integral transit time")));
        }
        transits.push(to_u64(a.transit.numer(), "transit time")?);
    }

    let layers = horizon as usize;
    let source = layers * n;
    let sink = source + 1;
    let collectors = sink + 1;
    let node_count = collectors + sinks.len();
    let mut arcs = Vec::new();

    for t in 0..horizon {
        for (i, a) in network.arcs.iter().enumerate() {
            if t + transits[i] < horizon {
                arcs.push(ExpandedArc {
                    tail: t as usize * n + a.tail,
                    head: (t + transits[i]) as usize * n + a.head,
                    capacity: a.capacity.clone(),
                    kind: CopyKind::Movement { arc: i, layer: t },
                });
            }
        }
        if t + 1 < horizon {
            for v in 0..n {
                arcs.push(ExpandedArc {
                    tail: t as usize * n + v,
                    head: (t + 1) as usize * n + v,
                    capacity: storage.clone(),
                    kind: CopyKind::Holdover { node: v, layer: t },
                });
            }
        }
    }
    if horizon > 0 {
        for (i, (s, cap)) in sources.iter().enumerate() {
            arcs.push(ExpandedArc {
                tail: source,
                head: *s,
                capacity: cap.clone(),
                kind: CopyKind::Supply { terminal: i },
            });
        }
        let offset = sources.len();
        for (j, (v, cap)) in sinks.iter().enumerate() {
            for t in 0..horizon {
                arcs.push(ExpandedArc {
                    tail: t as usize * n + v,
                    head: collectors + j,
                    capacity: storage.clone(),
                    kind: CopyKind::Arrival { terminal: offset + j, layer: t },
                });
            }
            arcs.push(ExpandedArc {
                tail: collectors + j,
                head: sink,
                capacity: cap.clone(),
                kind: CopyKind::Demand { terminal: offset + j },
            });
        }
    }
    Ok(TimeExpandedNetwork { base_nodes: n, horizon, node_count, source, sink, arcs })
}

/// Maximum volume that can leave the nodes `from` and reach the nodes `to`
/// by time `θ`, computed as a max flow in the time-expanded network with
/// unlimited supply and demand. `from` and `to` must be disjoint.
pub fn max_flow_over_time(
    network: &FlowNetwork,
    from: &[NodeId],
    to: &[NodeId],
    theta: &Rat,
    node_cap: u128,
) -> Result<Rat> {
    if from.iter().any(|v| to.contains(v)) {
        return Err(Error::Parameter("source and sink node sets overlap".into()));
    }
    let scaled = scale_to_integral(network, theta)?;
    // every unit crosses at least one arc copy
    let bound: Rat = scaled.network.arcs.iter().map(|a| &a.capacity).sum::<Rat>() * int(scaled.horizon as i64);
    let sources: Vec<_> = from.iter().map(|&v| (v, bound.clone())).collect();
    let sinks: Vec<_> = to.iter().map(|&v| (v, bound.clone())).collect();
    let te = layered(&scaled.network, scaled.horizon, &sources, &sinks, &bound, node_cap)?;
    let mut mf = MaxFlow::new(te.node_count);
    for a in &te.arcs {
        mf.add_edge(a.tail, a.head, a.capacity.clone());
    }
    Ok(mf.run(te.source, te.sink))
}

/// Dinic's algorithm over exact rationals.
struct MaxFlow {
    adj: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<Rat>,
}

impl MaxFlow {
    fn new(nodes: usize) -> Self {
        MaxFlow { adj: vec![Vec::new(); nodes], to: Vec::new(), cap: Vec::new() }
    }

    fn add_edge(&mut self, u: usize, v: usize, c: Rat) -> usize {
        let id = self.to.len();
        self.to.push(v);
        self.cap.push(c);
        self.adj[u].push(id);
        self.to.push(u);
        self.cap.push(Rat::zero());
        self.adj[v].push(id + 1);
        id
    }

    /// Flow currently on forward edge `id`.
    fn flow(&self, id: usize) -> &Rat {
        &self.cap[id ^ 1]
    }

    fn levels(&self, s: usize, t: usize) -> Option<Vec<usize>> {
        let mut level = vec![usize::MAX; self.adj.len()];
        level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.adj[u] {
                let v = self.to[e];
                if level[v] == usize::MAX && self.cap[e].is_positive() {
                    level[v] = level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        (level[t] != usize::MAX).then_some(level)
    }

    fn run(&mut self, s: usize, t: usize) -> Rat {
        let mut total = Rat::zero();
        while let Some(mut level) = self.levels(s, t) {
            let mut next = vec![0usize; self.adj.len()];
            while let Some(pushed) = self.augment(s, t, &mut level, &mut next) {
                total += pushed;
            }
        }
        total
    }

    fn augment(&mut self, s: usize, t: usize, level: &mut [usize], next: &mut [usize]) -> Option<Rat> {
        let mut path: Vec<usize> = Vec::new();
        let mut u = s;
        loop {
            if u == t {
                let amount = path.iter().map(|&e| &self.cap[e]).min().expect("nonempty path").clone();
                for &e in &path {
                    self.cap[e] -= &amount;
                    self.cap[e ^ 1] += &amount;
                }
                return Some(amount);
            }
            let mut advanced = false;
            while next[u] < self.adj[u].len() {
                let e = self.adj[u][next[u]];
                let v = self.to[e];
                if self.cap[e].is_positive() && level[v] == level[u] + 1 {
                    path.push(e);
                    u = v;
                    advanced = true;
                    break;
                }
                next[u] += 1;
            }
            if !advanced {
                if u == s {
                    return None;
                }
                level[u] = usize::MAX;
                let e = path.pop().expect("retreat from a non-source node");
                u = self.to[e ^ 1];
                next[u] += 1;
            }
        }
    }
}

struct Solved {
    scaled: ScaledNetwork,
    expanded: TimeExpandedNetwork,
    value: Rat,
    flows: Vec<Rat>,
}

fn solve_expanded(instance: &Instance, theta: &Rat, node_cap: u128) -> Result<Solved> {
    let scaled = scale_to_integral(&instance.network, theta)?;
    let scaled_instance = Instance { network: scaled.network.clone(), supply: instance.supply.clone() };
    let expanded = build_time_expanded(&scaled_instance, scaled.horizon, node_cap)?;
    let mut mf = MaxFlow::new(expanded.node_count);
    let ids: Vec<usize> = expanded
        .arcs
        .iter()
        .map(|a| mf.add_edge(a.tail, a.head, a.capacity.clone()))
        .collect();
    let value = mf.run(expanded.source, expanded.sink);
    let flows = ids.iter().map(|&id| mf.flow(id).clone()).collect();
    Ok(Solved { scaled, expanded, value, flows })
}

/// True iff the expanded max flow routes the entire supply by `θ`.
pub fn feasible_by_expansion(instance: &Instance, theta: &Rat, node_cap: u128) -> Result<bool> {
    Ok(solve_expanded(instance, theta, node_cap)?.value == instance.supply.total_supply())
}

/// A piecewise-constant inflow rate starting at `time`, in force until the
/// next piece begins. The last piece of a nonempty list has rate zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatePiece {
    pub time: Rat,
    pub rate: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ArcFlow {
    pub pieces: Vec<RatePiece>,
}

impl ArcFlow {
    /// Volume entered during `[0, t]`.
    pub fn volume_until(&self, t: &Rat) -> Rat {
        let mut total = Rat::zero();
        for (i, p) in self.pieces.iter().enumerate() {
            if p.time >= *t {
                break;
            }
            let end = match self.pieces.get(i + 1) {
                Some(next) if next.time < *t => next.time.clone(),
                _ => t.clone(),
            };
            total += &p.rate * (end - &p.time);
        }
        total
    }

    /// Start and end of each piece; the last piece runs to `None` (forever).
    pub fn intervals(&self) -> impl Iterator<Item = (&Rat, Option<&Rat>, &Rat)> {
        self.pieces
            .iter()
            .enumerate()
            .map(|(i, p)| (&p.time, self.pieces.get(i + 1).map(|n| &n.time), &p.rate))
    }
}

/// Inflow rates on every base arc over `[0, θ]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowOverTime {
    pub horizon: Rat,
    pub arcs: Vec<ArcFlow>,
}

impl FlowOverTime {
    pub fn zero(horizon: Rat, arc_count: usize) -> Self {
        FlowOverTime { horizon, arcs: vec![ArcFlow::default(); arc_count] }
    }
}

fn compress(rates: &[Rat], q: &Rat) -> ArcFlow {
    let mut pieces: Vec<RatePiece> = Vec::new();
    for (t, r) in rates.iter().enumerate() {
        let current = pieces.last().map(|p| &p.rate).cloned().unwrap_or_else(Rat::zero);
        if *r != current {
            pieces.push(RatePiece { time: int(t as i64) / q, rate: r.clone() });
        }
    }
    if pieces.last().is_some_and(|p| !p.rate.is_zero()) {
        pieces.push(RatePiece { time: int(rates.len() as i64) / q, rate: Rat::zero() });
    }
    ArcFlow { pieces }
}

/// A transshipment over time with horizon `θ`, read off an expanded max
/// flow: the volume on the copy of `a` in step `t` becomes rate
/// `volume · q` on `[t/q, (t+1)/q)`.
pub fn extract_transshipment(instance: &Instance, theta: &Rat, node_cap: u128) -> Result<FlowOverTime> {
    let solved = solve_expanded(instance, theta, node_cap)?;
    if solved.value != instance.supply.total_supply() {
        return Err(Error::InfeasibleHorizon { theta: format_rat(theta) });
    }
    let q = int(solved.scaled.scale as i64);
    let layers = solved.scaled.horizon as usize;
    let mut rates = vec![vec![Rat::zero(); layers]; instance.network.arcs.len()];
    for (arc, flow) in solved.expanded.arcs.iter().zip(&solved.flows) {
        if let CopyKind::Movement { arc: a, layer } = arc.kind {
            rates[a][layer as usize] = flow * &q;
        }
    }
    Ok(FlowOverTime { horizon: theta.clone(), arcs: rates.iter().map(|r| compress(r, &q)).collect() })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FlowViolation {
    ArcCount { expected: usize, found: usize },
    Unordered { arc: usize },
    NegativeTime { arc: usize },
    NegativeRate { arc: usize, time: Rat },
    Capacity { arc: usize, time: Rat },
    /// Positive inflow at a time when it cannot arrive by the horizon.
    LateArrival { arc: usize, time: Rat },
    /// A node sends out more than it has received (plus its supply).
    Conservation { node: NodeId, time: Rat },
    /// Net inflow at the horizon differs from the demand.
    Balance { node: NodeId, net_inflow: Rat, expected: Rat },
}

impl fmt::Display for FlowViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FlowViolation::ArcCount { expected, found } => {
                write!(f, "flow has {found} arcs, network has {expected}")
            }
            FlowViolation::Unordered { arc } => write!(f, "arc {arc}: piece times not increasing"),
            FlowViolation::NegativeTime { arc } => write!(f, "arc {arc}: flow before time 0"),
            FlowViolation::NegativeRate { arc, time } => {
                write!(f, "arc {arc}: negative rate at {}", format_rat(time))
            }
            FlowViolation::Capacity { arc, time } => {
                write!(f, "arc {arc}: rate above capacity at {}", format_rat(time))
            }
            FlowViolation::LateArrival { arc, time } => {
                write!(f, "arc {arc}: flow entering at {} arrives after the horizon", format_rat(time))
            }
            FlowViolation::Conservation { node, time } => {
                write!(f, "node {node}: sends more than it holds at {}", format_rat(time))
            }
            FlowViolation::Balance { node, net_inflow, expected } => write!(
                f,
                "node {node}: net inflow {} at the horizon, expected {}",
                format_rat(net_inflow),
                format_rat(expected)
            ),
        }
    }
}

/// Checks capacities, arrival by `θ`, conservation over every prefix
/// `[0, t]` (storage allowed) and supply/demand balance at `θ`.
pub fn verify_flow(instance: &Instance, flow: &FlowOverTime, theta: &Rat) -> Vec<FlowViolation> {
    let network = &instance.network;
    let mut out = Vec::new();
    if flow.arcs.len() != network.arcs.len() {
        out.push(FlowViolation::ArcCount { expected: network.arcs.len(), found: flow.arcs.len() });
        return out;
    }

    let mut events: Vec<Rat> = vec![Rat::zero(), theta.clone()];
    for (i, (arc, af)) in network.arcs.iter().zip(&flow.arcs).enumerate() {
        if af.pieces.windows(2).any(|w| w[0].time >= w[1].time) {
            out.push(FlowViolation::Unordered { arc: i });
            continue;
        }
        let latest = theta - &arc.transit;
        for (start, end, rate) in af.intervals() {
            if rate.is_zero() {
                continue;
            }
            if rate.is_negative() {
                out.push(FlowViolation::NegativeRate { arc: i, time: start.clone() });
            }
            if *rate > arc.capacity {
                out.push(FlowViolation::Capacity { arc: i, time: start.clone() });
            }
            if start.is_negative() {
                out.push(FlowViolation::NegativeTime { arc: i });
            }
            if end.is_none_or(|e| *e > latest) {
                out.push(FlowViolation::LateArrival { arc: i, time: start.clone() });
            }
        }
        for p in &af.pieces {
            events.push(p.time.clone());
            events.push(&p.time + &arc.transit);
        }
    }
    if !out.is_empty() {
        return out;
    }
    events.retain(|t| !t.is_negative() && t <= theta);
    events.sort();
    events.dedup();

    let mut b_of_node = vec![Rat::zero(); network.node_count];
    for (i, v) in instance.supply.values.iter().enumerate() {
        b_of_node[network.terminal(i)] = v.clone();
    }
    // Cumulative in/out volumes are piecewise linear between events, so
    // checking at events covers every prefix.
    for t in &events {
        let mut net_in = vec![Rat::zero(); network.node_count];
        for (arc, af) in network.arcs.iter().zip(&flow.arcs) {
            let sent = af.volume_until(t);
            let arrived = af.volume_until(&(t - &arc.transit));
            net_in[arc.tail] -= sent;
            net_in[arc.head] += arrived;
        }
        for v in 0..network.node_count {
            let available = if b_of_node[v].is_positive() { b_of_node[v].clone() } else { Rat::zero() };
            if (&net_in[v] + available).is_negative() {
                out.push(FlowViolation::Conservation { node: v, time: t.clone() });
            }
            if t == theta && net_in[v] != -&b_of_node[v] {
                out.push(FlowViolation::Balance {
                    node: v,
                    net_inflow: net_in[v].clone(),
                    expected: -&b_of_node[v],
                });
            }
        }
    }
    out
}
