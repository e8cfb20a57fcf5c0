//! Prints a long-jump trace with the class of each iteration.

use quickest::generate::{generate_instance, GeneratorParams};
use quickest::prelude::*;

fn main() -> quickest::Result<()> {
    let params = GeneratorParams {
        n: 9,
        m: 20,
        k: 6,
        max_capacity: 10,
        max_transit: 10,
        max_supply: 30,
        seed: 17,
    };
    let problem = Problem::new(generate_instance(&params)?.to_instance()?);
    let result = solve_newton_jumps(&problem)?;
    let classes = classify_iterations(&result, &problem)?;

    println!("jump set {:?}", result.jump_set);
    for (r, class) in result.trace.iter().zip(&classes) {
        println!(
            "{:>2} {:?}  theta {:>8} -> {:>8}  S = {}  j = {}",
            r.index,
            class,
            format_rat(&r.theta),
            format_rat(&r.theta_next),
            r.set,
            r.jump
        );
    }
    println!("theta* = {}", format_rat(&result.theta_star));
    println!("halving violations: {:?}", check_halving(&result));
    Ok(())
}
