//! Seeded comparison of the simple and jump solvers, with envelope samples
//! for plotting.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::generate::corpus_instance;
use crate::network::Instance;
use crate::rational::{approx, format_rat, Rat};
use crate::sfm::Problem;
use crate::solver::{
    all_breakpoints, classify_iterations, solve_newton_jumps, solve_newton_simple, IterationClass, SolveResult,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub theta_star: String,
    pub iters_simple: usize,
    pub iters_jumps: usize,
    #[serde(rename = "count_I1")]
    pub count_i1: usize,
    #[serde(rename = "count_I2")]
    pub count_i2: usize,
    #[serde(rename = "count_I3")]
    pub count_i3: usize,
    pub wall_time_simple: f64,
    pub wall_time_jumps: f64,
}

/// A point `(θ, d(θ))` of the lower envelope.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeSample {
    pub seed: u64,
    pub theta: String,
    pub theta_decimal: f64,
    pub d: String,
    pub d_decimal: f64,
}

#[derive(Debug, Clone)]
pub struct BenchCase {
    pub row: BenchRow,
    pub simple: SolveResult,
    pub jumps: SolveResult,
    pub classes: Vec<IterationClass>,
    pub envelope: Vec<EnvelopeSample>,
}

#[derive(Debug, Clone, Default)]
pub struct BenchReport {
    pub cases: Vec<BenchCase>,
}

impl BenchReport {
    pub fn rows(&self) -> impl Iterator<Item = &BenchRow> {
        self.cases.iter().map(|c| &c.row)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for row in self.rows() {
            w.serialize(row).map_err(csv_error)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_envelope_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for s in self.cases.iter().flat_map(|c| &c.envelope) {
            w.serialize(s).map_err(csv_error)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Runs one instance through both solvers and classifies the jump trace.
pub fn bench_instance(seed: u64, instance: Instance, bf_cap: usize) -> Result<BenchCase> {
    let (n, m, k) = (instance.network.node_count, instance.network.arcs.len(), instance.k());
    let problem = Problem::new(instance).with_brute_force_cap(bf_cap);

    let start = Instant::now();
    let simple = solve_newton_simple(&problem)?;
    let wall_time_simple = start.elapsed().as_secs_f64();
    let start = Instant::now();
    let jumps = solve_newton_jumps(&problem)?;
    let wall_time_jumps = start.elapsed().as_secs_f64();

    if simple.theta_star != jumps.theta_star {
        return Err(Error::Internal(format!(
            "seed {seed}: solvers disagree ({} vs {})",
            format_rat(&simple.theta_star),
            format_rat(&jumps.theta_star)
        )));
    }
    let classes = classify_iterations(&jumps, &problem)?;
    let count = |c: IterationClass| classes.iter().filter(|&&x| x == c).count();
    let envelope = envelope_samples(seed, &problem, &[&simple, &jumps])?;

    Ok(BenchCase {
        row: BenchRow {
            seed,
            n,
            m,
            k,
            theta_star: format_rat(&jumps.theta_star),
            iters_simple: simple.trace.len(),
            iters_jumps: jumps.trace.len(),
            count_i1: count(IterationClass::I1),
            count_i2: count(IterationClass::I2),
            count_i3: count(IterationClass::I3),
            wall_time_simple,
            wall_time_jumps,
        },
        simple,
        jumps,
        classes,
        envelope,
    })
}

/// `d(θ)` at every subset breakpoint and every horizon visited by the
/// given traces, in increasing `θ`.
pub fn envelope_samples(seed: u64, problem: &Problem, results: &[&SolveResult]) -> Result<Vec<EnvelopeSample>> {
    let mut thetas = all_breakpoints(problem)?;
    for r in results {
        thetas.insert(r.theta_star.clone());
        for it in &r.trace {
            thetas.insert(it.theta.clone());
            thetas.insert(it.theta_prime.clone());
            thetas.insert(it.theta_next.clone());
        }
    }
    thetas
        .into_iter()
        .map(|theta: Rat| {
            let d = problem.envelope_d(&theta)?;
            Ok(EnvelopeSample {
                seed,
                theta: format_rat(&theta),
                theta_decimal: approx(&theta),
                d: format_rat(&d),
                d_decimal: approx(&d),
            })
        })
        .collect()
}

/// Benchmarks the corpus instances for `count` consecutive seeds starting
/// at `first_seed`. Instances run in parallel; output order follows seeds.
pub fn run_bench(first_seed: u64, count: u64, bf_cap: usize) -> Result<BenchReport> {
    let cases = (first_seed..first_seed + count)
        .into_par_iter()
        .map(|seed| bench_instance(seed, corpus_instance(seed)?.to_instance()?, bf_cap))
        .collect::<Result<Vec<_>>>()?;
    Ok(BenchReport { cases })
}
