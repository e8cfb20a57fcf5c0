//! Compares the plain discrete Newton method with the long-jump variant on a
//! few generated instances.

use quickest::generate::corpus_instance;
use quickest::prelude::*;

fn main() -> quickest::Result<()> {
    println!("{:>4} {:>2} {:>12} {:>7} {:>6}", "seed", "k", "theta*", "simple", "jumps");
    for seed in 0..12 {
        let problem = Problem::new(corpus_instance(seed)?.to_instance()?);
        let simple = solve_newton_simple(&problem)?;
        let jumps = solve_newton_jumps(&problem)?;
        assert_eq!(simple.theta_star, jumps.theta_star);
        println!(
            "{seed:>4} {:>2} {:>12} {:>7} {:>6}",
            problem.k(),
            format_rat(&jumps.theta_star),
            simple.trace.len(),
            jumps.trace.len()
        );
    }
    Ok(())
}
