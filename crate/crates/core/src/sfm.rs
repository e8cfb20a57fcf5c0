//! Minimizing the submodular slack function `S ↦ d^θ(S)` over terminal
//! subsets, and the feasibility test built on it.

use std::fmt;
use std::sync::Arc as Shared;

use num_traits::Signed;

use crate::error::{Error, Result};
use crate::horizon;
use crate::network::{Instance, TerminalSet};
use crate::rational::Rat;
use crate::ssp::{ProfileCache, SspProfile};

/// Default largest `k` for exhaustive enumeration.
pub const DEFAULT_BRUTE_FORCE_CAP: usize = 20;

/// A set-function minimizer over subsets of `k` terminals. It must return a
/// minimizer and its value; [`Problem::minimize_d`] reduces it to the
/// minimal minimizer where it can.
pub trait SubmodularMinimizer: Send + Sync {
    fn name(&self) -> &str;

    fn minimize(
        &self,
        k: usize,
        eval: &mut dyn FnMut(TerminalSet) -> Result<Rat>,
    ) -> Result<(TerminalSet, Rat)>;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Strategy {
    BruteForce,
    Plugged(String),
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::BruteForce => f.write_str("brute-force"),
            Strategy::Plugged(name) => write!(f, "plugged:{name}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SfmResult {
    pub minimizer: TerminalSet,
    pub value: Rat,
    pub strategy: Strategy,
}

/// An instance together with its memoized profiles and SFM configuration.
/// Every evaluation of `d^θ` goes through here.
pub struct Problem {
    instance: Instance,
    cache: ProfileCache,
    brute_force_cap: usize,
    plugged: Option<Shared<dyn SubmodularMinimizer>>,
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("instance", &self.instance)
            .field("cached_profiles", &self.cache.len())
            .field("brute_force_cap", &self.brute_force_cap)
            .field("plugged", &self.plugged.as_ref().map(|p| p.name().to_owned()))
            .finish()
    }
}

impl Problem {
    pub fn new(instance: Instance) -> Self {
        Problem {
            instance,
            cache: ProfileCache::new(),
            brute_force_cap: DEFAULT_BRUTE_FORCE_CAP,
            plugged: None,
        }
    }

    pub fn with_brute_force_cap(mut self, cap: usize) -> Self {
        self.brute_force_cap = cap;
        self
    }

    /// Installs a minimizer used when `k` exceeds the brute-force cap.
    pub fn with_minimizer(mut self, minimizer: Shared<dyn SubmodularMinimizer>) -> Self {
        self.plugged = Some(minimizer);
        self
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn k(&self) -> usize {
        self.instance.k()
    }

    pub fn brute_force_cap(&self) -> usize {
        self.brute_force_cap
    }

    pub fn profile(&self, set: TerminalSet) -> Shared<SspProfile> {
        self.cache.get_or_compute(&self.instance.network, set)
    }

    pub fn cached_profiles(&self) -> usize {
        self.cache.len()
    }

    pub fn d_theta(&self, set: TerminalSet, theta: &Rat) -> Result<Rat> {
        horizon::d_theta(&self.profile(set), &self.instance.supply, set, theta)
    }

    /// `min{θ ≥ 0 : d^θ(S) ≥ 0}`.
    pub fn zero_of(&self, set: TerminalSet) -> Result<Rat> {
        horizon::zero_of(&self.profile(set), &self.instance.supply, set)
    }

    pub fn cut_left(&self, set: TerminalSet, theta: &Rat) -> Result<Rat> {
        horizon::cut_left(&self.profile(set), theta)
    }

    pub(crate) fn require_enumerable(&self) -> Result<()> {
        if self.k() > self.brute_force_cap {
            return Err(self.cap_error());
        }
        Ok(())
    }

    fn cap_error(&self) -> Error {
        Error::CapExceeded {
            what: "terminal count for subset enumeration",
            size: self.k() as u128,
            cap: self.brute_force_cap as u128,
        }
    }

    /// Global minimizer of `d^θ`; among all minimizers the minimal one
    /// (the intersection of all minimizers, itself a minimizer by
    /// submodularity).
    pub fn minimize_d(&self, theta: &Rat) -> Result<SfmResult> {
        if theta.is_negative() {
            return Err(Error::Parameter("time horizon must be nonnegative".into()));
        }
        let k = self.k();
        if k <= self.brute_force_cap {
            return self.minimize_brute_force(theta);
        }
        let Some(plugged) = &self.plugged else {
            return Err(self.cap_error());
        };
        let (found, value) = plugged.minimize(k, &mut |s| self.d_theta(s, theta))?;
        let minimizer = self.shrink_to_minimal(found, &value, theta)?;
        Ok(SfmResult { minimizer, value, strategy: Strategy::Plugged(plugged.name().to_owned()) })
    }

    fn minimize_brute_force(&self, theta: &Rat) -> Result<SfmResult> {
        let k = self.k();
        let mut best: Option<Rat> = None;
        let mut meet = TerminalSet::full(k);
        for set in TerminalSet::all_subsets(k) {
            let value = self.d_theta(set, theta)?;
            match &best {
                Some(b) if value > *b => {}
                Some(b) if value == *b => meet = meet.intersection(set),
                _ => {
                    best = Some(value);
                    meet = set;
                }
            }
        }
        let value = best.expect("at least the empty set is enumerated");
        if self.d_theta(meet, theta)? != value {
            return Err(Error::Internal(format!(
                "intersection of minimizers {meet} is not a minimizer; d is not submodular"
            )));
        }
        Ok(SfmResult { minimizer: meet, value, strategy: Strategy::BruteForce })
    }

    /// Drops members one at a time while the value stays minimal.
    fn shrink_to_minimal(&self, mut set: TerminalSet, value: &Rat, theta: &Rat) -> Result<TerminalSet> {
        let mut changed = true;
        while changed {
            changed = false;
            for i in set.iter().collect::<Vec<_>>() {
                let smaller = TerminalSet::from_bits(set.bits() & !(1 << i));
                if self.d_theta(smaller, theta)? == *value {
                    set = smaller;
                    changed = true;
                }
            }
        }
        Ok(set)
    }

    /// `θ` is feasible iff `d^θ(S) ≥ 0` for every `S`.
    pub fn is_feasible(&self, theta: &Rat) -> Result<bool> {
        Ok(!self.minimize_d(theta)?.value.is_negative())
    }

    /// The lower envelope `d(θ) = min_S d^θ(S)`.
    pub fn envelope_d(&self, theta: &Rat) -> Result<Rat> {
        Ok(self.minimize_d(theta)?.value)
    }
}

/// Exhaustive enumeration as a pluggable minimizer; returns the first
/// minimizer in bit order.
#[derive(Debug, Clone, Copy, Default)]
pub struct Enumerate;

impl SubmodularMinimizer for Enumerate {
    fn name(&self) -> &str {
        "enumerate"
    }

    fn minimize(
        &self,
        k: usize,
        eval: &mut dyn FnMut(TerminalSet) -> Result<Rat>,
    ) -> Result<(TerminalSet, Rat)> {
        let mut best: Option<(TerminalSet, Rat)> = None;
        for set in TerminalSet::all_subsets(k) {
            let v = eval(set)?;
            if best.as_ref().is_none_or(|(_, b)| v < *b) {
                best = Some((set, v));
            }
        }
        Ok(best.expect("nonempty enumeration"))
    }
}
