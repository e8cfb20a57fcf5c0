//! Flow-over-time networks, supplies and terminal subsets.

use std::fmt;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{format_rat, Rat};

/// Terminal subsets are stored in one `u64`, which bounds the number of
/// terminals.
pub const MAX_TERMINALS: usize = 62;

pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arc {
    pub tail: NodeId,
    pub head: NodeId,
    /// Maximum inflow rate.
    pub capacity: Rat,
    pub transit: Rat,
}

impl Arc {
    pub fn new(tail: NodeId, head: NodeId, capacity: Rat, transit: Rat) -> Self {
        Arc { tail, head, capacity, transit }
    }
}

/// A network `(D, u, tau, S+, S-)`. Terminals are indexed in the order
/// `sources ++ sinks`; that index is what a [`TerminalSet`] bit refers to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowNetwork {
    pub node_count: usize,
    pub arcs: Vec<Arc>,
    pub sources: Vec<NodeId>,
    pub sinks: Vec<NodeId>,
}

impl FlowNetwork {
    pub fn new(node_count: usize, arcs: Vec<Arc>, sources: Vec<NodeId>, sinks: Vec<NodeId>) -> Self {
        FlowNetwork { node_count, arcs, sources, sinks }
    }

    pub fn terminal_count(&self) -> usize {
        self.sources.len() + self.sinks.len()
    }

    /// Node id of terminal `index`.
    pub fn terminal(&self, index: usize) -> NodeId {
        if index < self.sources.len() {
            self.sources[index]
        } else {
            self.sinks[index - self.sources.len()]
        }
    }

    pub fn is_source_index(&self, index: usize) -> bool {
        index < self.sources.len()
    }

    /// Finite stand-in for infinite capacity: no s-t flow can exceed the
    /// total capacity of the original arcs.
    pub fn capacity_bound(&self) -> Rat {
        self.arcs.iter().map(|a| &a.capacity).sum()
    }

    pub fn full_set(&self) -> TerminalSet {
        TerminalSet::full(self.terminal_count())
    }
}

/// Supplies `b(v)` indexed by terminal index (sources first, then sinks).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupplyVector {
    pub values: Vec<Rat>,
}

impl SupplyVector {
    pub fn new(values: Vec<Rat>) -> Self {
        SupplyVector { values }
    }

    /// Builds `b` from source supplies and sink demands given as
    /// nonnegative amounts; sinks get `b(t) = -demand`.
    pub fn from_supplies_and_demands(supplies: Vec<Rat>, demands: Vec<Rat>) -> Self {
        let mut values = supplies;
        values.extend(demands.into_iter().map(|d| -d));
        SupplyVector { values }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Zero::is_zero)
    }

    pub fn total_supply(&self) -> Rat {
        self.values.iter().filter(|v| v.is_positive()).sum()
    }

    /// `b(S)`, the sum of `b(v)` over members of `set`.
    pub fn b_of_set(&self, set: TerminalSet) -> Rat {
        set.iter().map(|i| &self.values[i]).sum()
    }
}

/// A subset of terminals as a bit set over terminal indices.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct TerminalSet(u64);

impl TerminalSet {
    pub const EMPTY: TerminalSet = TerminalSet(0);

    pub fn from_bits(bits: u64) -> Self {
        TerminalSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn full(k: usize) -> Self {
        assert!(k <= MAX_TERMINALS, "at most {MAX_TERMINALS} terminals");
        TerminalSet((1u64 << k) - 1)
    }

    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> Self {
        let mut bits = 0u64;
        for i in indices {
            assert!(i < MAX_TERMINALS, "terminal index {i} out of range");
            bits |= 1 << i;
        }
        TerminalSet(bits)
    }

    pub fn contains(self, index: usize) -> bool {
        index < 64 && self.0 >> index & 1 == 1
    }

    pub fn with(self, index: usize) -> Self {
        TerminalSet(self.0 | 1 << index)
    }

    pub fn union(self, other: Self) -> Self {
        TerminalSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        TerminalSet(self.0 & other.0)
    }

    pub fn is_subset_of(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..64).filter(move |i| bits >> i & 1 == 1)
    }

    /// All `2^k` subsets of a `k`-terminal ground set, in increasing bit order.
    pub fn all_subsets(k: usize) -> impl Iterator<Item = TerminalSet> {
        assert!(k <= MAX_TERMINALS);
        (0..1u64 << k).map(TerminalSet)
    }

    /// Node ids of the members, for display.
    pub fn nodes(self, network: &FlowNetwork) -> Vec<NodeId> {
        self.iter().map(|i| network.terminal(i)).collect()
    }
}

impl fmt::Debug for TerminalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for TerminalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (n, i) in self.iter().enumerate() {
            if n > 0 {
                f.write_str(",")?;
            }
            write!(f, "{i}")?;
        }
        f.write_str("}")
    }
}

/// One violated instance invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Unbalanced { total: Rat },
    TerminalsOverlap { node: NodeId },
    DuplicateTerminal { node: NodeId },
    TooManyTerminals { count: usize },
    NodeOutOfRange { node: NodeId },
    SelfLoop { arc: usize },
    NegativeCapacity { arc: usize },
    NegativeTransit { arc: usize },
    SupplyLength { expected: usize, found: usize },
    NegativeSupply { node: NodeId },
    PositiveDemand { node: NodeId },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Unbalanced { total } => {
                write!(f, "supplies do not sum to zero (sum = {})", format_rat(total))
            }
            Violation::TerminalsOverlap { node } => {
                write!(f, "terminal sets overlap (node {node} is both source and sink)")
            }
            Violation::DuplicateTerminal { node } => write!(f, "terminal {node} listed twice"),
            Violation::TooManyTerminals { count } => {
                write!(f, "too many terminals ({count} > {MAX_TERMINALS})")
            }
            Violation::NodeOutOfRange { node } => write!(f, "node {node} out of range"),
            Violation::SelfLoop { arc } => write!(f, "arc {arc} is a self-loop"),
            Violation::NegativeCapacity { arc } => write!(f, "arc {arc} has negative capacity"),
            Violation::NegativeTransit { arc } => write!(f, "arc {arc} has negative transit time"),
            Violation::SupplyLength { expected, found } => {
                write!(f, "supply vector has {found} entries, expected {expected}")
            }
            Violation::NegativeSupply { node } => write!(f, "source {node} has negative supply"),
            Violation::PositiveDemand { node } => write!(f, "sink {node} has positive b-value"),
        }
    }
}

/// Returns every violated invariant of `(network, b)`; empty means valid.
pub fn validate_instance(network: &FlowNetwork, b: &SupplyVector) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = network.node_count;

    for (i, arc) in network.arcs.iter().enumerate() {
        for node in [arc.tail, arc.head] {
            if node >= n {
                out.push(Violation::NodeOutOfRange { node });
            }
        }
        if arc.tail == arc.head {
            out.push(Violation::SelfLoop { arc: i });
        }
        if arc.capacity.is_negative() {
            out.push(Violation::NegativeCapacity { arc: i });
        }
        if arc.transit.is_negative() {
            out.push(Violation::NegativeTransit { arc: i });
        }
    }

    let mut seen = std::collections::HashSet::new();
    for &v in network.sources.iter().chain(&network.sinks) {
        if v >= n {
            out.push(Violation::NodeOutOfRange { node: v });
        }
        if !seen.insert(v) {
            if network.sources.contains(&v) && network.sinks.contains(&v) {
                out.push(Violation::TerminalsOverlap { node: v });
            } else {
                out.push(Violation::DuplicateTerminal { node: v });
            }
        }
    }

    let k = network.terminal_count();
    if k > MAX_TERMINALS {
        out.push(Violation::TooManyTerminals { count: k });
    }

    if b.values.len() != k {
        out.push(Violation::SupplyLength { expected: k, found: b.values.len() });
    } else {
        for (i, v) in b.values.iter().enumerate() {
            let node = network.terminal(i);
            if network.is_source_index(i) && v.is_negative() {
                out.push(Violation::NegativeSupply { node });
            } else if !network.is_source_index(i) && v.is_positive() {
                out.push(Violation::PositiveDemand { node });
            }
        }
        let total: Rat = b.values.iter().sum();
        if !total.is_zero() {
            out.push(Violation::Unbalanced { total });
        }
    }
    out
}

/// A validated `(network, b)` pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub network: FlowNetwork,
    pub supply: SupplyVector,
}

impl Instance {
    pub fn new(network: FlowNetwork, supply: SupplyVector) -> Result<Self> {
        let violations = validate_instance(&network, &supply);
        if !violations.is_empty() {
            return Err(Error::Invalid(violations));
        }
        Ok(Instance { network, supply })
    }

    pub fn k(&self) -> usize {
        self.network.terminal_count()
    }
}
