//! Quickest transshipment on one arc: 3 units over capacity 1, transit 2.

use quickest::prelude::*;

fn main() -> quickest::Result<()> {
    let network = FlowNetwork::new(2, vec![Arc::new(0, 1, int(1), int(2))], vec![0], vec![1]);
    let instance = Instance::new(network, SupplyVector::new(vec![int(3), int(-3)]))?;
    let problem = Problem::new(instance);

    let result = solve_newton_jumps(&problem)?;
    println!("theta* = {}", format_rat(&result.theta_star));
    println!("iterations = {}", result.trace.len());
    Ok(())
}
