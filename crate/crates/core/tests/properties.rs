mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use stabiliq::dsl::{parse_protocol, render, ParseOptions};
use stabiliq::explorer::{image, run, Policy, TransitionSystem};
use stabiliq::kernel::{Program, SpecState};
use stabiliq::mapping::merge_closure;
use stabiliq::protocols::{make_abp, make_alternator, make_cm, make_pif, ProtocolBundle};

fn spec_set(per: Vec<usize>, picks: Vec<u64>) -> (stabiliq::kernel::Schema, BTreeSet<SpecState>) {
    let schema = common::bool_schema(&per);
    let size = schema.universe_size().unwrap() as u64;
    let set = picks
        .into_iter()
        .map(|i| SpecState::from_values(schema.decode(i % size)))
        .collect();
    (schema, set)
}

fn shapes() -> impl Strategy<Value = (Vec<usize>, Vec<u64>)> {
    (
        prop::collection::vec(1usize..=2, 1..=4),
        prop::collection::vec(any::<u64>(), 0..6),
    )
}

fn bundle(kind: u8, n: usize, seed: u64) -> ProtocolBundle {
    match kind % 4 {
        0 => {
            let mut ids: Vec<i64> = (1..=n as i64).collect();
            let k = (seed as usize) % n;
            ids.rotate_left(k);
            make_cm(&ids).unwrap()
        }
        1 => make_alternator(n.max(3)).unwrap(),
        2 => make_pif(n.max(3)).unwrap(),
        _ => make_abp().unwrap(),
    }
}

fn program(kind: u8, n: usize, seed: u64) -> Program {
    bundle(kind, n, seed).program
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn merge_closure_matches_brute_force((per, picks) in shapes()) {
        let (schema, set) = spec_set(per, picks);
        prop_assert_eq!(merge_closure(&schema, &set), common::brute_merge_closure(&schema, &set));
    }

    #[test]
    fn merge_closure_is_extensive_and_idempotent((per, picks) in shapes()) {
        let (schema, set) = spec_set(per, picks);
        let closed = merge_closure(&schema, &set);
        prop_assert!(set.is_subset(&closed));
        prop_assert_eq!(merge_closure(&schema, &closed), closed);
    }

    #[test]
    fn merge_closure_is_monotone((per, picks) in shapes(), extra in prop::collection::vec(any::<u64>(), 0..4)) {
        let (schema, small) = spec_set(per.clone(), picks.clone());
        let (_, large) = spec_set(per, picks.into_iter().chain(extra).collect());
        prop_assert!(merge_closure(&schema, &small).is_subset(&merge_closure(&schema, &large)));
    }

    #[test]
    fn encode_decode_round_trip(kind in any::<u8>(), n in 2usize..=5, seed in any::<u64>(), raw in any::<u64>()) {
        let p = program(kind, n, seed);
        let size = p.universe_size().unwrap() as u64;
        let s = p.state_from_index(raw % size);
        prop_assert_eq!(p.index_of(&s), raw % size);
        prop_assert_eq!(p.parse_state(&p.render_state(&s)).unwrap(), s.clone());
        prop_assert_eq!(p.schema().encode(&p.schema().decode(raw % size)), raw % size);
    }

    #[test]
    fn transition_edges_are_kernel_successors(kind in any::<u8>(), n in 2usize..=5, seed in any::<u64>()) {
        let p = program(kind, n, seed);
        let ts = TransitionSystem::build(&p).unwrap();
        for v in 0..ts.len() {
            let mut from_ts: Vec<_> = ts.edges().filter(|e| e.from == v).map(|e| (e.action, ts.state(e.to))).collect();
            let mut from_kernel = p.successors(&ts.state(v));
            from_ts.sort();
            from_kernel.sort();
            prop_assert_eq!(from_ts, from_kernel);
        }
    }

    #[test]
    fn simulation_is_deterministic_and_follows_the_kernel(
        kind in any::<u8>(), n in 2usize..=5, seed in any::<u64>(), start in any::<u64>(), steps in 0usize..40,
    ) {
        let b = bundle(kind, n, seed);
        let p = &b.program;
        let s = p.state_from_index(start % p.universe_size().unwrap() as u64);
        for policy in [Policy::RoundRobin, Policy::UniformRandom] {
            let c = run(p, &s, steps, seed, policy).unwrap();
            prop_assert_eq!(&c, &run(p, &s, steps, seed, policy).unwrap());
            prop_assert_eq!(c.actions.len() + 1, c.states.len());
            for (i, a) in c.actions.iter().enumerate() {
                prop_assert_eq!(p.apply(&c.states[i], *a).unwrap(), c.states[i + 1].clone());
            }
            let seq = image(&c, &b.mapping);
            prop_assert!(seq.states.windows(2).all(|w| w[0] != w[1]));
        }
    }

    #[test]
    fn render_parse_round_trip(kind in any::<u8>(), n in 2usize..=6, seed in any::<u64>()) {
        let p = program(kind, n, seed);
        let opts = ParseOptions { n: Some(p.n()), ids: Some(p.ids()) };
        let parsed = parse_protocol(&render(&p), &opts).unwrap().program;
        prop_assert_eq!(render(&parsed), render(&p));
        let ts_a = TransitionSystem::build(&p).unwrap();
        let ts_b = TransitionSystem::build(&parsed).unwrap();
        prop_assert_eq!(ts_a.edge_count(), ts_b.edge_count());
    }

    #[test]
    fn conflict_manager_maps_to_the_oracle(n in 2usize..=6, seed in any::<u64>(), raw in any::<u64>()) {
        let b = bundle(0, n, seed);
        let p = &b.program;
        let s = p.state_from_index(raw % p.universe_size().unwrap() as u64);
        let access: Vec<bool> = s.values().iter().map(|&v| v != 0).collect();
        let expected: Vec<u8> = common::cm_in(&access, &p.ids()).into_iter().map(u8::from).collect();
        prop_assert_eq!(b.mapping.map(&s).into_values(), expected);
    }
}
