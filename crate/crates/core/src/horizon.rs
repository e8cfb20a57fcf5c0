//! Exact evaluation of `o^θ(S)`, `d^θ(S)`, one-sided slopes and zeros from
//! an [`SspProfile`].

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::network::{SupplyVector, TerminalSet};
use crate::rational::{format_rat, Rat};
use crate::ssp::SspProfile;

fn require_nonnegative(theta: &Rat) -> Result<()> {
    if theta.is_negative() {
        return Err(Error::Parameter(format!("time horizon {} is negative", format_rat(theta))));
    }
    Ok(())
}

/// A truncated profile can only answer for `θ` strictly below the next
/// unseen path length, which is at least the last recorded one.
fn require_certified(profile: &SspProfile, theta: &Rat, strict: bool) -> Result<()> {
    if profile.exhausted {
        return Ok(());
    }
    let ok = match profile.last_length() {
        Some(last) if strict => last > theta,
        Some(last) => last >= theta,
        None => false,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::TruncatedProfile { theta: format_rat(theta) })
    }
}

/// `o^θ(S) = Σ_{ℓ_i ≤ θ} f_i (θ − ℓ_i)`.
pub fn o_theta(profile: &SspProfile, theta: &Rat) -> Result<Rat> {
    require_nonnegative(theta)?;
    require_certified(profile, theta, true)?;
    Ok(profile
        .segments
        .iter()
        .take_while(|s| s.length <= *theta)
        .map(|s| &s.amount * (theta - &s.length))
        .sum())
}

/// `d^θ(S) = o^θ(S) − b(S)`.
pub fn d_theta(profile: &SspProfile, b: &SupplyVector, set: TerminalSet, theta: &Rat) -> Result<Rat> {
    Ok(o_theta(profile, theta)? - b.b_of_set(set))
}

/// Left-hand derivative of `θ ↦ d^θ(S)`: total amount on paths strictly
/// shorter than `θ`.
pub fn cut_left(profile: &SspProfile, theta: &Rat) -> Result<Rat> {
    if !theta.is_positive() {
        return Err(Error::Parameter("left derivative needs theta > 0".into()));
    }
    require_certified(profile, theta, false)?;
    Ok(profile
        .segments
        .iter()
        .take_while(|s| s.length < *theta)
        .map(|s| &s.amount)
        .sum())
}

/// Right-hand derivative: total amount on paths of length at most `θ`.
pub fn cut_right(profile: &SspProfile, theta: &Rat) -> Result<Rat> {
    require_nonnegative(theta)?;
    require_certified(profile, theta, true)?;
    Ok(profile
        .segments
        .iter()
        .take_while(|s| s.length <= *theta)
        .map(|s| &s.amount)
        .sum())
}

/// `min{θ ≥ 0 : d^θ(S) ≥ 0}`, found by walking the linear pieces of
/// `o^θ(S)`. Fails with [`Error::InfeasibleForever`] when `b(S) > 0` and no
/// flow at all can leave `S`.
pub fn zero_of(profile: &SspProfile, b: &SupplyVector, set: TerminalSet) -> Result<Rat> {
    let target = b.b_of_set(set);
    if !target.is_positive() {
        return Ok(Rat::zero());
    }
    if !profile.exhausted {
        return Err(Error::TruncatedProfile { theta: "zero".into() });
    }
    let mut value = Rat::zero();
    let mut slope = Rat::zero();
    let mut at = Rat::zero();
    for seg in &profile.segments {
        let reached = &value + &slope * (&seg.length - &at);
        if slope.is_positive() && reached >= target {
            return Ok(&at + (&target - &value) / &slope);
        }
        value = reached;
        at = seg.length.clone();
        slope += &seg.amount;
    }
    if slope.is_positive() {
        Ok(&at + (&target - &value) / &slope)
    } else {
        Err(Error::InfeasibleForever { set, supply: format_rat(&target) })
    }
}

/// A distinct path length of the profile with the certificate of the first
/// path attaining it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Breakpoint {
    pub theta: Rat,
    pub certificate: Vec<i8>,
}

pub fn breakpoints(profile: &SspProfile) -> Vec<Breakpoint> {
    let mut out: Vec<Breakpoint> = Vec::new();
    for seg in &profile.segments {
        if out.last().is_none_or(|b| b.theta != seg.length) {
            out.push(Breakpoint { theta: seg.length.clone(), certificate: seg.certificate.clone() });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{Arc, FlowNetwork};
    use crate::rational::{int, ratio};
    use crate::ssp::{compute_profile, compute_profile_limited};
    use proptest::prelude::*;

    fn single_arc_profile() -> SspProfile {
        let net = FlowNetwork::new(2, vec![Arc::new(0, 1, int(1), int(2))], vec![0], vec![1]);
        compute_profile(&net, TerminalSet::from_indices([0]))
    }

    fn instance_b_profile() -> SspProfile {
        let net = FlowNetwork::new(
            3,
            vec![Arc::new(0, 2, int(2), int(0)), Arc::new(1, 2, int(1), int(1))],
            vec![0, 1],
            vec![2],
        );
        compute_profile(&net, TerminalSet::from_indices([0, 1]))
    }

    #[test]
    fn o_theta_examples() {
        assert_eq!(o_theta(&instance_b_profile(), &int(2)).unwrap(), int(5));
        assert_eq!(o_theta(&instance_b_profile(), &int(0)).unwrap(), int(0));
        assert_eq!(o_theta(&single_arc_profile(), &int(0)).unwrap(), int(0));
        assert_eq!(o_theta(&single_arc_profile(), &int(5)).unwrap(), int(3));
        assert!(o_theta(&single_arc_profile(), &int(-1)).is_err());
    }

    #[test]
    fn d_theta_examples() {
        let b = SupplyVector::new(vec![int(3), int(-3)]);
        let s = TerminalSet::from_indices([0]);
        assert_eq!(d_theta(&single_arc_profile(), &b, s, &int(5)).unwrap(), int(0));
        assert_eq!(d_theta(&single_arc_profile(), &b, s, &int(0)).unwrap(), int(-3));
        let b = SupplyVector::new(vec![int(5), int(1), int(-6)]);
        let s = TerminalSet::from_indices([0, 1]);
        assert_eq!(d_theta(&instance_b_profile(), &b, s, &int(2)).unwrap(), int(-1));
    }

    #[test]
    fn cut_examples() {
        let p = instance_b_profile();
        assert_eq!(cut_left(&p, &int(2)).unwrap(), int(3));
        assert_eq!(cut_left(&p, &int(1)).unwrap(), int(2));
        assert_eq!(cut_right(&p, &int(1)).unwrap(), int(3));
        let p = single_arc_profile();
        assert_eq!(cut_left(&p, &int(1)).unwrap(), int(0));
        assert_eq!(cut_right(&p, &int(1)).unwrap(), int(0));
        assert!(cut_left(&p, &int(0)).is_err());
    }

    #[test]
    fn zero_examples() {
        let b = SupplyVector::new(vec![int(3), int(-3)]);
        assert_eq!(zero_of(&single_arc_profile(), &b, TerminalSet::from_indices([0])).unwrap(), int(5));
        let b = SupplyVector::new(vec![int(5), int(1), int(-6)]);
        let s = TerminalSet::from_indices([0, 1]);
        assert_eq!(zero_of(&instance_b_profile(), &b, s).unwrap(), ratio(7, 3));
        // b(S) <= 0
        let s = TerminalSet::from_indices([0, 1, 2]);
        assert_eq!(zero_of(&instance_b_profile(), &b, s).unwrap(), int(0));
    }

    #[test]
    fn zero_on_disconnected_set_is_infeasible_forever() {
        let b = SupplyVector::new(vec![int(3), int(-3)]);
        let err = zero_of(&SspProfile::empty(), &b, TerminalSet::from_indices([0])).unwrap_err();
        assert!(matches!(err, Error::InfeasibleForever { .. }));
    }

    #[test]
    fn zero_beyond_static_value_is_finite() {
        // b(S) = 6 exceeds the static max flow 3; the slope keeps growing the
        // value linearly so a zero still exists.
        let b = SupplyVector::new(vec![int(4), int(2), int(-6)]);
        let s = TerminalSet::from_indices([0, 1]);
        assert_eq!(zero_of(&instance_b_profile(), &b, s).unwrap(), ratio(7, 3));
    }

    #[test]
    fn breakpoint_examples() {
        let bps: Vec<_> = breakpoints(&instance_b_profile()).into_iter().map(|b| b.theta).collect();
        assert_eq!(bps, vec![int(0), int(1)]);
        assert!(breakpoints(&SspProfile::empty()).is_empty());
        let bps: Vec<_> = breakpoints(&single_arc_profile()).into_iter().map(|b| b.theta).collect();
        assert_eq!(bps, vec![int(2)]);
    }

    #[test]
    fn truncated_profile_certifies_only_below_next_length() {
        let net = FlowNetwork::new(
            3,
            vec![Arc::new(0, 2, int(2), int(0)), Arc::new(1, 2, int(1), int(1))],
            vec![0, 1],
            vec![2],
        );
        let p = compute_profile_limited(&net, TerminalSet::from_indices([0, 1]), 1);
        // last recorded length is 0; nothing is certified at theta >= 0
        assert!(matches!(o_theta(&p, &ratio(1, 2)), Err(Error::TruncatedProfile { .. })));
        let b = SupplyVector::new(vec![int(5), int(1), int(-6)]);
        assert!(zero_of(&p, &b, TerminalSet::from_indices([0, 1])).is_err());
    }

    fn arb_profile() -> impl Strategy<Value = SspProfile> {
        proptest::collection::vec((0i64..20, 1i64..6), 0..6).prop_map(|mut raw| {
            raw.sort();
            let segments: Vec<_> = raw
                .into_iter()
                .map(|(l, f)| crate::ssp::Segment { length: int(l), amount: int(f), certificate: vec![] })
                .collect();
            let max_static_value = segments.iter().map(|s| &s.amount).sum();
            SspProfile { segments, max_static_value, exhausted: true }
        })
    }

    proptest! {
        #[test]
        fn one_sided_slopes_are_ordered_and_monotone(p in arb_profile(), a in 1i64..100, c in 1i64..100) {
            let (lo, hi) = if a <= c { (ratio(a, 4), ratio(c, 4)) } else { (ratio(c, 4), ratio(a, 4)) };
            prop_assert!(cut_left(&p, &lo).unwrap() <= cut_right(&p, &lo).unwrap());
            prop_assert!(cut_left(&p, &lo).unwrap() <= cut_left(&p, &hi).unwrap());
            prop_assert!(cut_right(&p, &lo).unwrap() <= cut_right(&p, &hi).unwrap());
        }

        #[test]
        fn interior_slope_matches_difference_quotient(p in arb_profile(), a in 0i64..80) {
            let theta = ratio(2 * a + 1, 8);
            let next = p.segments.iter().map(|s| s.length.clone()).find(|l| *l > theta);
            let delta = match next {
                Some(l) => (l - &theta) / int(2),
                None => int(1),
            };
            let prev_ok = p.segments.iter().all(|s| s.length != theta);
            prop_assume!(prev_ok);
            let quotient = (o_theta(&p, &(&theta + &delta)).unwrap() - o_theta(&p, &theta).unwrap()) / &delta;
            prop_assert_eq!(&quotient, &cut_left(&p, &theta).unwrap());
            prop_assert_eq!(&quotient, &cut_right(&p, &theta).unwrap());
        }

        #[test]
        fn zero_is_exact_and_first(p in arb_profile(), supply in 1i64..40) {
            let b = SupplyVector::new(vec![int(supply), int(-supply)]);
            let s = TerminalSet::from_indices([0]);
            match zero_of(&p, &b, s) {
                Ok(z) => {
                    prop_assert_eq!(d_theta(&p, &b, s, &z).unwrap(), int(0));
                    prop_assert!(z.is_positive());
                    let before = &z - &z / int(1000);
                    prop_assert!(d_theta(&p, &b, s, &before).unwrap().is_negative());
                    prop_assert!(cut_left(&p, &z).unwrap().is_positive());
                }
                Err(Error::InfeasibleForever { .. }) => prop_assert!(p.segments.is_empty()),
                Err(e) => prop_assert!(false, "unexpected error {e}"),
            }
        }
    }
}
