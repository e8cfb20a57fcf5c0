//! JSON documents for instances, flows over time and solver traces.
//!
//! Rationals are written as bare integers or `"p/q"` strings and read back
//! exactly; integers, integer strings, fractions and finite decimal strings
//! are all accepted on input.
//!
//! ```json
//! {
//!   "nodes": 2,
//!   "arcs": [{ "tail": 0, "head": 1, "capacity": 1, "transit": "7/3" }],
//!   "sources": [{ "node": 0, "supply": 3 }],
//!   "sinks": [{ "node": 1, "demand": 3 }]
//! }
//! ```
//!
//! A sink's `demand` is the nonnegative amount it absorbs, i.e. `-b(t)`.

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::expansion::{ArcFlow, FlowOverTime, RatePiece};
use crate::network::{Arc, FlowNetwork, Instance, SupplyVector};
use crate::rational::{approx, format_rat, parse_rat, Rat};
use crate::solver::{IterationClass, SolveResult};

/// Serde wrapper for an exact rational.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatValue(pub Rat);

impl Serialize for RatValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_integer() {
            if let Ok(v) = i64::try_from(self.0.numer()) {
                return s.serialize_i64(v);
            }
        }
        s.serialize_str(&format_rat(&self.0))
    }
}

impl<'de> Deserialize<'de> for RatValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct RatVisitor;

        impl Visitor<'_> for RatVisitor {
            type Value = RatValue;

            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("an integer or a rational string like \"7/3\"")
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<RatValue, E> {
                Ok(RatValue(crate::rational::int(v)))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<RatValue, E> {
                Ok(RatValue(Rat::from_integer(v.into())))
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<RatValue, E> {
                Err(E::custom(format!("bare float {v} is not exact; write it as a string")))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<RatValue, E> {
                parse_rat(v).map(RatValue).map_err(E::custom)
            }
        }

        d.deserialize_any(RatVisitor)
    }
}

impl From<Rat> for RatValue {
    fn from(v: Rat) -> Self {
        RatValue(v)
    }
}

impl From<&Rat> for RatValue {
    fn from(v: &Rat) -> Self {
        RatValue(v.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArcDocument {
    pub tail: usize,
    pub head: usize,
    pub capacity: RatValue,
    pub transit: RatValue,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceDocument {
    pub node: usize,
    pub supply: RatValue,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SinkDocument {
    pub node: usize,
    pub demand: RatValue,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDocument {
    pub nodes: usize,
    pub arcs: Vec<ArcDocument>,
    pub sources: Vec<SourceDocument>,
    pub sinks: Vec<SinkDocument>,
}

impl InstanceDocument {
    /// Converts and validates.
    pub fn to_instance(&self) -> Result<Instance> {
        let arcs = self
            .arcs
            .iter()
            .map(|a| Arc::new(a.tail, a.head, a.capacity.0.clone(), a.transit.0.clone()))
            .collect();
        let network = FlowNetwork::new(
            self.nodes,
            arcs,
            self.sources.iter().map(|s| s.node).collect(),
            self.sinks.iter().map(|s| s.node).collect(),
        );
        let supply = SupplyVector::from_supplies_and_demands(
            self.sources.iter().map(|s| s.supply.0.clone()).collect(),
            self.sinks.iter().map(|s| s.demand.0.clone()).collect(),
        );
        Instance::new(network, supply)
    }

    pub fn from_instance(instance: &Instance) -> Self {
        let net = &instance.network;
        let ns = net.sources.len();
        InstanceDocument {
            nodes: net.node_count,
            arcs: net
                .arcs
                .iter()
                .map(|a| ArcDocument {
                    tail: a.tail,
                    head: a.head,
                    capacity: (&a.capacity).into(),
                    transit: (&a.transit).into(),
                })
                .collect(),
            sources: net
                .sources
                .iter()
                .zip(&instance.supply.values)
                .map(|(&node, b)| SourceDocument { node, supply: b.into() })
                .collect(),
            sinks: net
                .sinks
                .iter()
                .zip(&instance.supply.values[ns..])
                .map(|(&node, b)| SinkDocument { node, demand: RatValue(-b.clone()) })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance documents always serialize")
    }
}

/// Parses and validates an instance document.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let doc: InstanceDocument = serde_json::from_str(text)
        .map_err(|e| Error::Malformed(format!("line {} column {}: {e}", e.line(), e.column())))?;
    doc.to_instance()
}

pub fn serialize_instance(instance: &Instance) -> String {
    InstanceDocument::from_instance(instance).to_json()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatePieceDocument {
    pub time: RatValue,
    pub rate: RatValue,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArcFlowDocument {
    pub arc: usize,
    pub tail: usize,
    pub head: usize,
    pub pieces: Vec<RatePieceDocument>,
}

/// Serialized [`FlowOverTime`]: one entry per base arc, in arc order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowDocument {
    pub horizon: RatValue,
    pub arcs: Vec<ArcFlowDocument>,
}

impl FlowDocument {
    pub fn from_flow(network: &FlowNetwork, flow: &FlowOverTime) -> Self {
        FlowDocument {
            horizon: (&flow.horizon).into(),
            arcs: flow
                .arcs
                .iter()
                .zip(&network.arcs)
                .enumerate()
                .map(|(i, (af, a))| ArcFlowDocument {
                    arc: i,
                    tail: a.tail,
                    head: a.head,
                    pieces: af
                        .pieces
                        .iter()
                        .map(|p| RatePieceDocument { time: (&p.time).into(), rate: (&p.rate).into() })
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn to_flow(&self) -> FlowOverTime {
        let mut arcs = self.arcs.clone();
        arcs.sort_by_key(|a| a.arc);
        FlowOverTime {
            horizon: self.horizon.0.clone(),
            arcs: arcs
                .iter()
                .map(|a| ArcFlow {
                    pieces: a
                        .pieces
                        .iter()
                        .map(|p| RatePiece { time: p.time.0.clone(), rate: p.rate.0.clone() })
                        .collect(),
                })
                .collect(),
        }
    }
}

pub fn parse_flow(text: &str) -> Result<FlowOverTime> {
    let doc: FlowDocument = serde_json::from_str(text)
        .map_err(|e| Error::Malformed(format!("line {} column {}: {e}", e.line(), e.column())))?;
    Ok(doc.to_flow())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationDocument {
    pub index: usize,
    pub theta: RatValue,
    /// Node ids of `S_i`.
    pub set: Vec<usize>,
    pub d_at_theta: RatValue,
    pub theta_prime: RatValue,
    pub jump: u64,
    pub cut: Option<RatValue>,
    pub theta_next: RatValue,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub class: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveDocument {
    pub theta_star: RatValue,
    pub decimal: f64,
    pub algorithm: String,
    pub iterations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<IterationDocument>>,
}

impl SolveDocument {
    pub fn new(
        network: &FlowNetwork,
        result: &SolveResult,
        with_trace: bool,
        classes: Option<&[IterationClass]>,
    ) -> Self {
        let trace = with_trace.then(|| {
            result
                .trace
                .iter()
                .map(|r| IterationDocument {
                    index: r.index,
                    theta: (&r.theta).into(),
                    set: r.set.nodes(network),
                    d_at_theta: (&r.d_at_theta).into(),
                    theta_prime: (&r.theta_prime).into(),
                    jump: r.jump,
                    cut: r.cut.as_ref().map(Into::into),
                    theta_next: (&r.theta_next).into(),
                    class: classes.map(|c| c[r.index].to_string()),
                })
                .collect()
        });
        SolveDocument {
            theta_star: (&result.theta_star).into(),
            decimal: approx(&result.theta_star),
            algorithm: result.algorithm.to_string(),
            iterations: result.trace.len(),
            trace,
        }
    }
}
