use proptest::prelude::*;

use quickest::expansion::{extract_transshipment, feasible_by_expansion, max_flow_over_time, verify_flow};
use quickest::generate::{generate_instance, GeneratorParams};
use quickest::horizon::o_theta;
use quickest::io::{parse_flow, parse_instance, serialize_instance, FlowDocument};
use quickest::prelude::*;
use quickest::solver::{solve_newton_jumps_with, JumpSearch};

const CAP: u128 = 20_000;

fn small_instance() -> impl Strategy<Value = Instance> {
    (2usize..=4, 0usize..=3, 0usize..=6, any::<u64>()).prop_map(|(k, extra_nodes, extra_arcs, seed)| {
        let n = k.max(3) + extra_nodes;
        let params = GeneratorParams {
            n,
            m: n - 1 + extra_arcs,
            k,
            max_capacity: 4,
            max_transit: 4,
            max_supply: 8,
            seed,
        };
        generate_instance(&params).unwrap().to_instance().unwrap()
    })
}

fn horizon() -> impl Strategy<Value = Rat> {
    (0i64..=40, 1i64..=3).prop_map(|(p, q)| ratio(p, q))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn profile_matches_expanded_max_flow(instance in small_instance(), theta in horizon(), bits in any::<u64>()) {
        let problem = Problem::new(instance);
        let network = &problem.instance().network;
        let set = TerminalSet::from_bits(bits & network.full_set().bits());
        let from: Vec<_> = set.iter().filter(|&i| network.is_source_index(i)).map(|i| network.terminal(i)).collect();
        let to: Vec<_> = (0..network.terminal_count())
            .filter(|&i| !network.is_source_index(i) && !set.contains(i))
            .map(|i| network.terminal(i))
            .collect();
        let expected = max_flow_over_time(network, &from, &to, &theta, CAP).unwrap();
        prop_assert_eq!(o_theta(&problem.profile(set), &theta).unwrap(), expected);
    }

    #[test]
    fn solvers_agree_with_oracle(instance in small_instance()) {
        let problem = Problem::new(instance);
        let brute = theta_star_bruteforce(&problem).unwrap();
        prop_assert_eq!(&solve_newton_simple(&problem).unwrap().theta_star, &brute);
        let binary = solve_newton_jumps_with(&problem, JumpSearch::Binary).unwrap();
        let linear = solve_newton_jumps_with(&problem, JumpSearch::Linear).unwrap();
        prop_assert_eq!(&binary.theta_star, &brute);
        prop_assert_eq!(binary.trace, linear.trace);
    }

    #[test]
    fn expansion_agrees_with_submodular_test(instance in small_instance(), theta in horizon()) {
        let problem = Problem::new(instance);
        let expected = problem.is_feasible(&theta).unwrap();
        prop_assert_eq!(feasible_by_expansion(problem.instance(), &theta, CAP).unwrap(), expected);
        if expected {
            let flow = extract_transshipment(problem.instance(), &theta, CAP).unwrap();
            prop_assert!(verify_flow(problem.instance(), &flow, &theta).is_empty());
        }
    }

    #[test]
    fn envelope_is_nondecreasing(instance in small_instance(), a in horizon(), b in horizon()) {
        let problem = Problem::new(instance);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(problem.envelope_d(&lo).unwrap() <= problem.envelope_d(&hi).unwrap());
    }

    #[test]
    fn instance_round_trip(instance in small_instance()) {
        let text = serialize_instance(&instance);
        prop_assert_eq!(parse_instance(&text).unwrap(), instance);
    }

    #[test]
    fn flow_round_trip(instance in small_instance()) {
        let problem = Problem::new(instance);
        let theta = solve_newton_jumps(&problem).unwrap().theta_star;
        let network = &problem.instance().network;
        match extract_transshipment(problem.instance(), &theta, CAP) {
            Ok(flow) => {
                let text = serde_json::to_string(&FlowDocument::from_flow(network, &flow)).unwrap();
                prop_assert_eq!(parse_flow(&text).unwrap(), flow);
            }
            Err(Error::CapExceeded { .. }) => {}
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }
}
