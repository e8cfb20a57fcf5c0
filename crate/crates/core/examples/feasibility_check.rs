//! Tests individual horizons and prints the most violated terminal set.

use num_traits::Signed;
use quickest::prelude::*;

fn main() -> quickest::Result<()> {
    // two sources feeding one sink, the second over a slower arc
    let network = FlowNetwork::new(
        3,
        vec![Arc::new(0, 2, int(2), int(0)), Arc::new(1, 2, int(1), int(1))],
        vec![0, 1],
        vec![2],
    );
    let instance = Instance::new(network, SupplyVector::new(vec![int(5), int(1), int(-6)]))?;
    let problem = Problem::new(instance);

    for theta in [int(2), ratio(9, 4), ratio(5, 2), int(3)] {
        let min = problem.minimize_d(&theta)?;
        let verdict = if min.value.is_negative() { "infeasible" } else { "feasible" };
        println!(
            "theta = {:>4}: {verdict:<10} min d = {:>4} at {}",
            format_rat(&theta),
            format_rat(&min.value),
            min.minimizer
        );
    }
    Ok(())
}
