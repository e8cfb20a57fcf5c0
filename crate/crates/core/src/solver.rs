//! Discrete Newton iterations for the minimum feasible time horizon.
//!
//! Both solvers walk a strictly increasing sequence of infeasible horizons
//! `0 = θ_0 < θ_1 < …`. In iteration `i` they take the minimal minimizer
//! `S_i` of `d^{θ_i}` and move to the zero `θ'_i` of `θ ↦ d^{θ_i}(S_i)`.
//! The jump variant then tries to go further, along rays from
//! `(θ'_i, d(θ'_i))` whose slopes are `cut(θ'_i) / j` for `j` in the jump
//! set, keeping the longest jump that still lands on an infeasible horizon.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::network::TerminalSet;
use crate::rational::{format_rat, int, Rat};
use crate::sfm::Problem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Simple,
    Jumps,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Simple => "simple",
            Algorithm::Jumps => "jumps",
        })
    }
}

/// How the jump variant finds the largest admissible multiplier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum JumpSearch {
    /// Binary search over the ordered jump set; valid because `d` is
    /// nondecreasing.
    #[default]
    Binary,
    /// Test every multiplier. Kept for differential testing.
    Linear,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IterationRecord {
    pub index: usize,
    pub theta: Rat,
    pub set: TerminalSet,
    /// `d^{θ_i}(S_i)`, always negative.
    pub d_at_theta: Rat,
    pub theta_prime: Rat,
    /// Chosen multiplier, 0 when `θ_{i+1} = θ'_i`.
    pub jump: u64,
    /// Left slope of `d^θ(S_i)` at `θ'_i`, present when a jump was
    /// attempted (the divisor of the jump length).
    pub cut: Option<Rat>,
    pub theta_next: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    pub theta_star: Rat,
    pub trace: Vec<IterationRecord>,
    pub algorithm: Algorithm,
    /// The jump set used; empty for the simple solver.
    pub jump_set: Vec<u64>,
}

impl SolveResult {
    pub fn max_jump(&self) -> Option<u64> {
        self.jump_set.last().copied()
    }
}

/// `{1, 2, 4, …, 2^⌈log2(k²/4)⌉}`.
pub fn jump_set(k: usize) -> Result<Vec<u64>> {
    if k < 2 {
        return Err(Error::Parameter(format!("jump set needs at least two terminals, got {k}")));
    }
    // smallest e >= 0 with 2^e >= k^2/4, i.e. 2^(e+2) >= k^2
    let k2 = (k as u128) * (k as u128);
    let mut e = 0u32;
    while 4u128 << e < k2 {
        e += 1;
    }
    Ok((0..=e).map(|i| 1u64 << i).collect())
}

/// Discrete Newton without jumps.
pub fn solve_newton_simple(problem: &Problem) -> Result<SolveResult> {
    run(problem, Algorithm::Simple, JumpSearch::Binary)
}

/// Discrete Newton with long jumps.
pub fn solve_newton_jumps(problem: &Problem) -> Result<SolveResult> {
    run(problem, Algorithm::Jumps, JumpSearch::Binary)
}

pub fn solve_newton_jumps_with(problem: &Problem, search: JumpSearch) -> Result<SolveResult> {
    run(problem, Algorithm::Jumps, search)
}

pub fn solve(problem: &Problem, algorithm: Algorithm) -> Result<SolveResult> {
    run(problem, algorithm, JumpSearch::Binary)
}

fn run(problem: &Problem, algorithm: Algorithm, search: JumpSearch) -> Result<SolveResult> {
    let b = &problem.instance().supply;
    if b.is_zero() {
        return Ok(SolveResult {
            theta_star: Rat::zero(),
            trace: Vec::new(),
            algorithm,
            jump_set: Vec::new(),
        });
    }
    let k = problem.k();
    let jumps = match algorithm {
        Algorithm::Simple => Vec::new(),
        Algorithm::Jumps => jump_set(k)?,
    };
    // distinct minimizers bound the number of iterations by 2^k
    let max_iterations: u128 = 1u128 << k;

    let mut theta = Rat::zero();
    let mut trace = Vec::new();
    loop {
        let min = problem.minimize_d(&theta)?;
        if !min.value.is_negative() {
            break;
        }
        if trace.len() as u128 >= max_iterations {
            return Err(Error::Internal(format!("more than 2^{k} iterations")));
        }
        let set = min.minimizer;
        let theta_prime = problem.zero_of(set)?;
        if theta_prime <= theta {
            return Err(Error::Internal(format!(
                "zero {} of d(S_i) does not exceed theta_i = {}",
                format_rat(&theta_prime),
                format_rat(&theta)
            )));
        }

        let (jump, cut, theta_next) = match algorithm {
            Algorithm::Simple => (0, None, theta_prime.clone()),
            Algorithm::Jumps => long_jump(problem, set, &theta_prime, &jumps, search)?,
        };
        trace.push(IterationRecord {
            index: trace.len(),
            theta: theta.clone(),
            set,
            d_at_theta: min.value,
            theta_prime,
            jump,
            cut,
            theta_next: theta_next.clone(),
        });
        theta = theta_next;
    }
    Ok(SolveResult { theta_star: theta, trace, algorithm, jump_set: jumps })
}

/// The second update of the jump variant: the largest `θ'_i + j·(−d(θ'_i))/cut`
/// with `j ∈ J` that is still infeasible, or `θ'_i` if there is none.
fn long_jump(
    problem: &Problem,
    set: TerminalSet,
    theta_prime: &Rat,
    jumps: &[u64],
    search: JumpSearch,
) -> Result<(u64, Option<Rat>, Rat)> {
    let gap = problem.envelope_d(theta_prime)?;
    if !gap.is_negative() {
        // every ray has zero length
        return Ok((0, None, theta_prime.clone()));
    }
    let cut = problem.cut_left(set, theta_prime)?;
    if !cut.is_positive() {
        return Err(Error::Internal(format!(
            "left slope of d(S_i) at its zero {} is not positive",
            format_rat(theta_prime)
        )));
    }
    let step = -gap / &cut;
    let candidate = |j: u64| theta_prime + &step * int(j as i64);
    let infeasible = |j: u64| -> Result<bool> { Ok(problem.envelope_d(&candidate(j))?.is_negative()) };

    let chosen = match search {
        JumpSearch::Linear => {
            let mut best = None;
            for &j in jumps {
                if infeasible(j)? {
                    best = Some(j);
                }
            }
            best
        }
        JumpSearch::Binary => {
            // infeasible(j) holds on a prefix of the ordered jump set
            let (mut lo, mut hi) = (0usize, jumps.len());
            while lo < hi {
                let mid = (lo + hi) / 2;
                if infeasible(jumps[mid])? {
                    lo = mid + 1;
                } else {
                    hi = mid;
                }
            }
            lo.checked_sub(1).map(|i| jumps[i])
        }
    };
    Ok(match chosen {
        Some(j) => (j, Some(cut), candidate(j)),
        None => (0, Some(cut), theta_prime.clone()),
    })
}

/// `θ* = max_S min{θ : d^θ(S) ≥ 0}` by enumerating all subsets.
pub fn theta_star_bruteforce(problem: &Problem) -> Result<Rat> {
    problem.require_enumerable()?;
    let mut best = Rat::zero();
    for set in TerminalSet::all_subsets(problem.k()) {
        let z = problem.zero_of(set)?;
        if z > best {
            best = z;
        }
    }
    Ok(best)
}

/// Iteration classes of the jump variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IterationClass {
    /// Took the largest jump in the jump set.
    I1,
    /// Not `I1`, and some `d^θ(S)` has a breakpoint in `[θ_i, θ_{i+1}]`.
    I2,
    I3,
}

impl fmt::Display for IterationClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IterationClass::I1 => "I1",
            IterationClass::I2 => "I2",
            IterationClass::I3 => "I3",
        })
    }
}

/// Union of the breakpoints of all `2^k` curves `θ ↦ d^θ(S)`.
pub fn all_breakpoints(problem: &Problem) -> Result<BTreeSet<Rat>> {
    problem.require_enumerable()?;
    let mut out = BTreeSet::new();
    for set in TerminalSet::all_subsets(problem.k()) {
        for seg in &problem.profile(set).segments {
            out.insert(seg.length.clone());
        }
    }
    Ok(out)
}

pub fn classify_iterations(result: &SolveResult, problem: &Problem) -> Result<Vec<IterationClass>> {
    if result.trace.is_empty() {
        return Ok(Vec::new());
    }
    let breakpoints = all_breakpoints(problem)?;
    let top = result.max_jump();
    Ok(result
        .trace
        .iter()
        .map(|r| {
            if top.is_some_and(|t| r.jump == t) {
                IterationClass::I1
            } else if breakpoints.range(r.theta.clone()..=r.theta_next.clone()).next().is_some() {
                IterationClass::I2
            } else {
                IterationClass::I3
            }
        })
        .collect())
}

/// Indices of non-final iterations outside `I1` that fail to halve the
/// distance to `θ*`:
///
/// ```text
/// ½(θ* − θ_i)  ≤ θ_{i+1} − θ_i
/// ½(θ* − θ'_i) ≤ θ_{i+1} − θ'_i      (only when j_i > 0)
/// ```
pub fn check_halving(result: &SolveResult) -> Vec<usize> {
    let Some(last) = result.trace.len().checked_sub(1) else {
        return Vec::new();
    };
    let half = int(1) / int(2);
    let star = &result.theta_star;
    let top = result.max_jump();
    result.trace[..last]
        .iter()
        .filter(|r| !top.is_some_and(|t| r.jump == t))
        .filter(|r| {
            let first = &half * (star - &r.theta) <= &r.theta_next - &r.theta;
            let second = r.jump == 0 || &half * (star - &r.theta_prime) <= &r.theta_next - &r.theta_prime;
            !(first && second)
        })
        .map(|r| r.index)
        .collect()
}

/// Structural checks on a trace: strictly increasing horizons, distinct
/// minimizers, negative slack, `θ'_i ≤ θ_{i+1}`, admissible multipliers and
/// positive divisors. Returns human-readable violations.
pub fn check_trace(result: &SolveResult) -> Vec<String> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    let mut prev_next: Option<&Rat> = None;
    for r in &result.trace {
        let i = r.index;
        if prev_next.is_some_and(|p| *p != r.theta) {
            out.push(format!("iteration {i}: theta does not continue the previous step"));
        }
        if r.theta >= r.theta_next {
            out.push(format!("iteration {i}: theta_i >= theta_(i+1)"));
        }
        if r.theta_prime > r.theta_next {
            out.push(format!("iteration {i}: theta'_i > theta_(i+1)"));
        }
        if !r.d_at_theta.is_negative() {
            out.push(format!("iteration {i}: d(S_i) at theta_i is not negative"));
        }
        if !seen.insert(r.set) {
            out.push(format!("iteration {i}: minimizer {} repeated", r.set));
        }
        if r.jump != 0 && !result.jump_set.contains(&r.jump) {
            out.push(format!("iteration {i}: multiplier {} not in the jump set", r.jump));
        }
        if r.cut.as_ref().is_some_and(|c| !c.is_positive()) {
            out.push(format!("iteration {i}: non-positive jump divisor"));
        }
        prev_next = Some(&r.theta_next);
    }
    if let Some(last) = result.trace.last() {
        if last.theta_next != result.theta_star {
            out.push("final theta differs from theta*".into());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{Arc, FlowNetwork, Instance, SupplyVector};
    use crate::rational::ratio;

    fn single_arc(b: (i64, i64)) -> Problem {
        let net = FlowNetwork::new(2, vec![Arc::new(0, 1, int(1), int(2))], vec![0], vec![1]);
        Problem::new(Instance::new(net, SupplyVector::new(vec![int(b.0), int(b.1)])).unwrap())
    }

    fn instance_b(b: [i64; 3]) -> Problem {
        let net = FlowNetwork::new(
            3,
            vec![Arc::new(0, 2, int(2), int(0)), Arc::new(1, 2, int(1), int(1))],
            vec![0, 1],
            vec![2],
        );
        Problem::new(Instance::new(net, SupplyVector::new(b.iter().map(|&v| int(v)).collect())).unwrap())
    }

    #[test]
    fn jump_set_examples() {
        assert_eq!(jump_set(4).unwrap(), vec![1, 2, 4]);
        assert_eq!(jump_set(2).unwrap(), vec![1]);
        assert_eq!(jump_set(10).unwrap(), vec![1, 2, 4, 8, 16, 32]);
        assert_eq!(jump_set(3).unwrap(), vec![1, 2, 4]);
        assert!(jump_set(1).is_err());
    }

    #[test]
    fn jump_set_matches_ceil_log2() {
        for k in 2..=62usize {
            let j = jump_set(k).unwrap();
            let top = *j.last().unwrap() as f64;
            let bound = (k * k) as f64 / 4.0;
            assert!(top >= bound && (top / 2.0 < bound || top == 1.0), "k = {k}");
        }
    }

    #[test]
    fn simple_solver_examples() {
        let r = solve_newton_simple(&single_arc((3, -3))).unwrap();
        assert_eq!(r.theta_star, int(5));
        assert_eq!(r.trace.len(), 1);

        let r = solve_newton_simple(&instance_b([5, 1, -6])).unwrap();
        assert_eq!(r.theta_star, ratio(5, 2));

        let r = solve_newton_simple(&single_arc((0, 0))).unwrap();
        assert_eq!(r.theta_star, int(0));
        assert!(r.trace.is_empty());
    }

    #[test]
    fn jump_solver_examples() {
        let r = solve_newton_jumps(&single_arc((3, -3))).unwrap();
        assert_eq!(r.theta_star, int(5));
        assert_eq!(r.trace[0].jump, 0);
        let r = solve_newton_jumps(&instance_b([5, 1, -6])).unwrap();
        assert_eq!(r.theta_star, ratio(5, 2));
        assert!(check_trace(&r).is_empty());
    }

    #[test]
    fn bruteforce_examples() {
        assert_eq!(theta_star_bruteforce(&single_arc((3, -3))).unwrap(), int(5));
        assert_eq!(theta_star_bruteforce(&instance_b([5, 1, -6])).unwrap(), ratio(5, 2));
        assert_eq!(theta_star_bruteforce(&instance_b([4, 2, -6])).unwrap(), int(3));
    }

    #[test]
    fn unreachable_sink_is_infeasible_forever() {
        let net = FlowNetwork::new(3, vec![Arc::new(0, 1, int(1), int(1))], vec![0], vec![2]);
        let p = Problem::new(Instance::new(net, SupplyVector::new(vec![int(1), int(-1)])).unwrap());
        for res in [solve_newton_simple(&p), solve_newton_jumps(&p)] {
            assert!(matches!(res, Err(Error::InfeasibleForever { .. })));
        }
        assert!(matches!(theta_star_bruteforce(&p), Err(Error::InfeasibleForever { .. })));
    }

    #[test]
    fn classify_examples() {
        let p = single_arc((3, -3));
        let r = solve_newton_jumps(&p).unwrap();
        assert_eq!(classify_iterations(&r, &p).unwrap(), vec![IterationClass::I2]);

        let empty = solve_newton_jumps(&single_arc((0, 0))).unwrap();
        assert!(classify_iterations(&empty, &p).unwrap().is_empty());

        let mut forced = r.clone();
        forced.jump_set = vec![1];
        forced.trace[0].jump = 1;
        assert_eq!(classify_iterations(&forced, &p).unwrap(), vec![IterationClass::I1]);
    }

    #[test]
    fn halving_examples() {
        let r = solve_newton_jumps(&single_arc((3, -3))).unwrap();
        assert!(check_halving(&r).is_empty());
        let r = solve_newton_jumps(&instance_b([5, 1, -6])).unwrap();
        assert!(check_halving(&r).is_empty());
    }

    #[test]
    fn halving_detects_corrupted_trace() {
        let r = SolveResult {
            theta_star: int(10),
            trace: vec![
                IterationRecord {
                    index: 0,
                    theta: int(0),
                    set: TerminalSet::from_indices([0]),
                    d_at_theta: int(-1),
                    theta_prime: int(1),
                    jump: 0,
                    cut: None,
                    theta_next: int(1),
                },
                IterationRecord {
                    index: 1,
                    theta: int(1),
                    set: TerminalSet::from_indices([1]),
                    d_at_theta: int(-1),
                    theta_prime: int(10),
                    jump: 0,
                    cut: None,
                    theta_next: int(10),
                },
            ],
            algorithm: Algorithm::Jumps,
            jump_set: vec![1, 2],
        };
        assert_eq!(check_halving(&r), vec![0]);
    }

    #[test]
    fn linear_and_binary_jump_search_agree() {
        for p in [instance_b([5, 1, -6]), instance_b([4, 2, -6]), single_arc((3, -3))] {
            let a = solve_newton_jumps_with(&p, JumpSearch::Binary).unwrap();
            let b = solve_newton_jumps_with(&p, JumpSearch::Linear).unwrap();
            assert_eq!(a, b);
        }
    }
}
