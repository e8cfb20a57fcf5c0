//! Command-line front end: solve, check feasibility, extract flows and
//! benchmark the two solvers.
//!
//! Exit codes: 0 ok, 1 no finite feasible horizon, 2 input error,
//! 3 resource cap exceeded, 4 internal error.

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use quickest::bench::run_bench;
use quickest::expansion::{extract_transshipment, verify_flow, DEFAULT_NODE_CAP};
use quickest::generate::{generate_instance, GeneratorParams};
use quickest::io::{parse_instance, FlowDocument, RatValue, SolveDocument};
use quickest::network::Instance;
use quickest::rational::{approx, format_rat, parse_rat, Rat};
use quickest::sfm::{Problem, DEFAULT_BRUTE_FORCE_CAP};
use quickest::solver::{classify_iterations, solve, theta_star_bruteforce, Algorithm, SolveResult};
use quickest::{Error, Result};

#[derive(Parser)]
#[command(name = "qtsp", version, about = "Exact quickest transshipment solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AlgoArg {
    Simple,
    Jumps,
    Both,
}

#[derive(clap::Args)]
struct InputArgs {
    /// Instance document; reads stdin when omitted or `-`.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Largest terminal count for subset enumeration.
    #[arg(long, default_value_t = DEFAULT_BRUTE_FORCE_CAP)]
    bf_cap: usize,
    /// Print JSON instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Minimum feasible time horizon.
    Solve {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum, default_value = "jumps")]
        algo: AlgoArg,
        /// Also print the iteration trace.
        #[arg(long)]
        trace: bool,
    },
    /// Feasibility of one horizon; reports the most violated terminal set.
    Feas {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_parser = rat_arg)]
        theta: Rat,
    },
    /// Minimum horizon by enumerating every terminal subset.
    Oracle {
        #[command(flatten)]
        input: InputArgs,
    },
    /// Writes a transshipment over time as a flow document.
    Extract {
        #[command(flatten)]
        input: InputArgs,
        /// Horizon to realize; defaults to the minimum feasible one.
        #[arg(long, value_parser = rat_arg)]
        theta: Option<Rat>,
        /// Bound on (T + 1) * n for the time-expanded network.
        #[arg(long, default_value_t = DEFAULT_NODE_CAP)]
        expansion_cap: u128,
        /// Output file; stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Iteration records with their I1/I2/I3 classes.
    Trace {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum, default_value = "jumps")]
        algo: AlgoArg,
    },
    /// Runs both solvers on a seeded corpus and writes CSV.
    Bench {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: u64,
        #[arg(long, default_value_t = DEFAULT_BRUTE_FORCE_CAP)]
        bf_cap: usize,
        /// Bench rows; stdout when omitted.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Envelope sample points (theta, d(theta)).
        #[arg(long)]
        envelope: Option<PathBuf>,
    },
    /// Writes a random instance document.
    Generate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 10)]
        max_u: u32,
        #[arg(long, default_value_t = 10)]
        max_tau: u32,
        #[arg(long, default_value_t = 30)]
        max_b: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn rat_arg(s: &str) -> std::result::Result<Rat, String> {
    parse_rat(s).map_err(|e| e.to_string())
}

fn read_instance(args: &InputArgs) -> Result<Instance> {
    let text = match &args.input {
        Some(p) if p.as_os_str() != "-" => fs::read_to_string(p)?,
        _ => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s)?;
            s
        }
    };
    parse_instance(&text)
}

fn problem(args: &InputArgs) -> Result<Problem> {
    Ok(Problem::new(read_instance(args)?).with_brute_force_cap(args.bf_cap))
}

fn algorithms(algo: AlgoArg) -> Vec<Algorithm> {
    match algo {
        AlgoArg::Simple => vec![Algorithm::Simple],
        AlgoArg::Jumps => vec![Algorithm::Jumps],
        AlgoArg::Both => vec![Algorithm::Simple, Algorithm::Jumps],
    }
}

fn print_trace(out: &mut impl Write, problem: &Problem, r: &SolveResult, classes: Option<&[quickest::solver::IterationClass]>) -> Result<()> {
    let net = &problem.instance().network;
    for it in &r.trace {
        write!(
            out,
            "{} theta={} set={:?} d={} theta'={} j={} theta_next={}",
            it.index,
            format_rat(&it.theta),
            it.set.nodes(net),
            format_rat(&it.d_at_theta),
            format_rat(&it.theta_prime),
            it.jump,
            format_rat(&it.theta_next)
        )?;
        if let Some(c) = classes {
            write!(out, " class={}", c[it.index])?;
        }
        writeln!(out)?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Solve { input, algo, trace } => {
            let problem = problem(&input)?;
            let results = algorithms(algo)
                .into_iter()
                .map(|a| solve(&problem, a))
                .collect::<Result<Vec<_>>>()?;
            if results.windows(2).any(|w| w[0].theta_star != w[1].theta_star) {
                return Err(Error::Internal("solvers disagree".into()));
            }
            if input.json {
                let docs: Vec<_> = results
                    .iter()
                    .map(|r| SolveDocument::new(&problem.instance().network, r, trace, None))
                    .collect();
                let value = if docs.len() == 1 { json!(docs[0]) } else { json!(docs) };
                writeln!(out, "{}", serde_json::to_string_pretty(&value).expect("serializable"))?;
            } else {
                let star = &results[0].theta_star;
                writeln!(out, "{}", format_rat(star))?;
                writeln!(out, "{:?}", approx(star))?;
                for r in &results {
                    if results.len() > 1 || trace {
                        writeln!(out, "# {}: {} iterations", r.algorithm, r.trace.len())?;
                    }
                    if trace {
                        print_trace(&mut out, &problem, r, None)?;
                    }
                }
            }
        }
        Command::Feas { input, theta } => {
            let problem = problem(&input)?;
            let min = problem.minimize_d(&theta)?;
            let feasible = min.value >= Rat::from_integer(0.into());
            let nodes = min.minimizer.nodes(&problem.instance().network);
            if input.json {
                let doc = json!({
                    "theta": RatValue(theta),
                    "feasible": feasible,
                    "violated_set": if feasible { None } else { Some(&nodes) },
                    "min_d": RatValue(min.value.clone()),
                });
                writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("serializable"))?;
            } else if feasible {
                writeln!(out, "feasible")?;
            } else {
                writeln!(out, "infeasible")?;
                writeln!(out, "violated set: {nodes:?}")?;
                writeln!(out, "d = {}", format_rat(&min.value))?;
            }
        }
        Command::Oracle { input } => {
            let problem = problem(&input)?;
            let star = theta_star_bruteforce(&problem)?;
            if input.json {
                let doc = json!({ "theta_star": RatValue(star.clone()), "decimal": approx(&star) });
                writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("serializable"))?;
            } else {
                writeln!(out, "{}", format_rat(&star))?;
            }
        }
        Command::Extract { input, theta, expansion_cap, output } => {
            let problem = problem(&input)?;
            let theta = match theta {
                Some(t) => t,
                None => solve(&problem, Algorithm::Jumps)?.theta_star,
            };
            let instance = problem.instance();
            let flow = extract_transshipment(instance, &theta, expansion_cap)?;
            let violations = verify_flow(instance, &flow, &theta);
            if !violations.is_empty() {
                return Err(Error::Internal(format!("extracted flow fails verification: {}", violations[0])));
            }
            let text = serde_json::to_string_pretty(&FlowDocument::from_flow(&instance.network, &flow))
                .expect("serializable");
            match output {
                Some(p) => fs::write(p, text + "\n")?,
                None => writeln!(out, "{text}")?,
            }
        }
        Command::Trace { input, algo } => {
            let problem = problem(&input)?;
            for a in algorithms(algo) {
                let r = solve(&problem, a)?;
                let classes = classify_iterations(&r, &problem)?;
                if input.json {
                    let doc = SolveDocument::new(&problem.instance().network, &r, true, Some(&classes));
                    writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("serializable"))?;
                } else {
                    writeln!(out, "# {} theta*={}", r.algorithm, format_rat(&r.theta_star))?;
                    print_trace(&mut out, &problem, &r, Some(&classes))?;
                }
            }
        }
        Command::Bench { seed, count, bf_cap, csv, envelope } => {
            let report = run_bench(seed, count, bf_cap)?;
            match csv {
                Some(p) => report.write_csv(fs::File::create(p)?)?,
                None => report.write_csv(&mut out)?,
            }
            if let Some(p) = envelope {
                report.write_envelope_csv(fs::File::create(p)?)?;
            }
        }
        Command::Generate { n, m, k, max_u, max_tau, max_b, seed } => {
            let params = GeneratorParams {
                n,
                m,
                k,
                max_capacity: max_u,
                max_transit: max_tau,
                max_supply: max_b,
                seed,
            };
            writeln!(out, "{}", generate_instance(&params)?.to_json())?;
        }
    }
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InfeasibleForever { .. } => 1,
        Error::CapExceeded { .. } => 3,
        Error::Internal(_) | Error::TruncatedProfile { .. } => 4,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let doc = json!({ "error": e.kind(), "message": e.to_string() });
            eprintln!("{doc}");
            ExitCode::from(exit_code(&e))
        }
    }
}
