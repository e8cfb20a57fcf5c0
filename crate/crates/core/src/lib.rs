//! Exact quickest transshipment in flow-over-time networks.
//!
//! Given a network with capacities (rates) and transit times, and supplies
//! at sources and demands at sinks, find the smallest time horizon `θ*`
//! within which all supplies can reach the sinks, and a flow over time that
//! achieves it.
//!
//! A horizon `θ` is feasible iff `d^θ(S) = o^θ(S) − b(S) ≥ 0` for every
//! subset `S` of terminals, where `o^θ(S)` is the most flow that can leave
//! the sources in `S` for the sinks outside `S` by time `θ`. The crate
//! evaluates `o^θ(S)` exactly from a successive-shortest-path profile
//! ([`ssp`], [`horizon`]), minimizes `d^θ` over subsets ([`sfm`]), and runs
//! discrete Newton iterations on the lower envelope ([`solver`]). The
//! [`expansion`] module cross-checks feasibility on a time-expanded network
//! and extracts an explicit transshipment.
//!
//! ```
//! use quickest::prelude::*;
//!
//! let net = FlowNetwork::new(2, vec![Arc::new(0, 1, int(1), int(2))], vec![0], vec![1]);
//! let instance = Instance::new(net, SupplyVector::new(vec![int(3), int(-3)])).unwrap();
//! let problem = Problem::new(instance);
//! assert_eq!(solve_newton_jumps(&problem).unwrap().theta_star, int(5));
//! ```

pub mod bench;
pub mod error;
pub mod expansion;
pub mod generate;
pub mod horizon;
pub mod io;
pub mod network;
pub mod rational;
pub mod sfm;
pub mod solver;
pub mod ssp;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::error::{Error, Result};
    pub use crate::network::{validate_instance, Arc, FlowNetwork, Instance, SupplyVector, TerminalSet};
    pub use crate::rational::{format_rat, int, parse_rat, ratio, Rat};
    pub use crate::sfm::Problem;
    pub use crate::solver::{
        check_halving, classify_iterations, solve_newton_jumps, solve_newton_simple, theta_star_bruteforce,
        Algorithm, IterationClass, SolveResult,
    };
}
