mod common;

use common::{build, rng};
use mobgossip::gossip::{
    first_passage, run_trial, run_trial_sampled, GossipConfig, GossipState, InitialProfile,
};
use mobgossip::mobility::MobilitySpec;
use mobgossip::topology::{build_cycle, build_rgg, build_torus, Topology};
use proptest::prelude::*;
use rand::Rng;

fn topology() -> impl Strategy<Value = Topology> {
    prop_oneof![
        (2usize..=7).prop_map(|s| build_torus(s).unwrap()),
        (3usize..=20).prop_map(|n| build_cycle(n).unwrap()),
    ]
}

fn mobility() -> impl Strategy<Value = MobilitySpec> {
    prop_oneof![
        Just(MobilitySpec::Static),
        Just(MobilitySpec::Full),
        Just(MobilitySpec::Horizontal),
        Just(MobilitySpec::Vertical),
        Just(MobilitySpec::Bidirectional),
        (1usize..=3).prop_map(MobilitySpec::Local),
        (1usize..=5).prop_map(MobilitySpec::RandomWalk),
        (1usize..=3).prop_map(MobilitySpec::PlusMobile),
    ]
}

fn exact_deviation(x: &[f64], mean: f64) -> f64 {
    x.iter().map(|v| (v - mean).powi(2)).sum::<f64>().sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mass_is_conserved_and_error_never_grows(
        t in topology(),
        spec in mobility(),
        seed in any::<u64>(),
    ) {
        let a = build(t, spec, seed).unwrap();
        let mut r = rng(seed);
        let positions = a.initial_positions(&mut r);
        let values: Vec<f64> = (0..a.len()).map(|_| r.random_range(-10.0..10.0)).collect();
        let sum0: f64 = values.iter().sum();
        let scale: f64 = values.iter().map(|v| v.abs()).sum();
        let mut s = GossipState::new(positions, values);
        let mean = s.mean();
        let mut prev = exact_deviation(s.values(), mean);
        for _ in 0..300 {
            s.step(&a, &mut r);
            let sum: f64 = s.values().iter().sum();
            prop_assert!((sum - sum0).abs() <= 1e-12 * scale.max(1.0));
            let dev = exact_deviation(s.values(), mean);
            prop_assert!(dev <= prev + 1e-12);
            prop_assert!((s.deviation() - dev).abs() <= 1e-6 * dev + 1e-12);
            prev = dev;
        }
    }

    #[test]
    fn sampled_runs_agree_with_full_traces(seed in 0u64..1000, stride in 1usize..50) {
        let t = build_torus(4).unwrap();
        let a = build(t, MobilitySpec::Horizontal, 0).unwrap();
        let mut c = GossipConfig::new(a, 400);
        c.seed = seed;
        c.epsilon = 0.05;
        let full = run_trial(&c, 3).unwrap();
        let sampled = run_trial_sampled(&c, 3, stride).unwrap();
        let ticks = mobgossip::gossip::sample_ticks(400, stride);
        for (k, &tick) in ticks.iter().enumerate() {
            prop_assert_eq!(sampled.trace.errors[k], full.errors[tick]);
        }
        prop_assert_eq!(sampled.first_below, full.first_below(0.05));
        prop_assert_eq!(first_passage(&c, 3).unwrap(), full.first_below(0.05));
    }
}

#[test]
fn trials_are_reproducible_and_independent() {
    let t = build_torus(5).unwrap();
    let a = build(t, MobilitySpec::Full, 0).unwrap();
    let c = GossipConfig::new(a, 200);
    assert_eq!(run_trial(&c, 0).unwrap(), run_trial(&c, 0).unwrap());
    assert_ne!(run_trial(&c, 0).unwrap(), run_trial(&c, 1).unwrap());
}

#[test]
fn spike_profile_on_geometric_torus() {
    let (t, homes) = build_rgg(60, 2.0, 4).unwrap();
    let a = MobilitySpec::Static.build(t, &homes, 0).unwrap();
    let mut c = GossipConfig::new(a, 2000);
    c.profile = InitialProfile::Spike;
    let tr = run_trial(&c, 0).unwrap();
    approx::assert_relative_eq!(tr.errors[0], (1.0f64 - 1.0 / 60.0).sqrt(), max_relative = 1e-14);
    assert!(tr.final_error() < tr.errors[0]);
}
