//! Prints the successive-shortest-path profile and breakpoints of every
//! terminal subset.

use quickest::horizon::{breakpoints, o_theta};
use quickest::prelude::*;

fn main() -> quickest::Result<()> {
    let network = FlowNetwork::new(
        4,
        vec![
            Arc::new(0, 2, int(2), int(1)),
            Arc::new(1, 2, int(1), int(3)),
            Arc::new(2, 3, int(2), int(2)),
            Arc::new(1, 3, int(1), int(6)),
        ],
        vec![0, 1],
        vec![3],
    );
    let instance = Instance::new(network, SupplyVector::new(vec![int(4), int(3), int(-7)]))?;
    let problem = Problem::new(instance);

    for set in TerminalSet::all_subsets(problem.k()) {
        let profile = problem.profile(set);
        println!("S = {set}  b(S) = {}", format_rat(&problem.instance().supply.b_of_set(set)));
        for seg in &profile.segments {
            println!("  length {:>3}  amount {:>2}  certificate {:?}", format_rat(&seg.length), format_rat(&seg.amount), seg.certificate);
        }
        let kinks: Vec<_> = breakpoints(&profile).iter().map(|b| format_rat(&b.theta)).collect();
        println!("  breakpoints {kinks:?}  o(10) = {}", format_rat(&o_theta(&profile, &int(10))?));
    }
    Ok(())
}
