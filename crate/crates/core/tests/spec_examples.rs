mod common;

use std::collections::BTreeSet;
use std::sync::Arc;

use stabiliq::explorer::{
    condense, image, induced_specification, run, terminals, Computation, Policy, TransitionSystem,
};
use stabiliq::kernel::{Program, ProgramState, SpecState};
use stabiliq::mapping::{
    check_ideal_possibility, check_merge_symmetry, in_schema, merge_closure, CustomMap, MappingKind, StateMapping,
};
use stabiliq::protocols::{make_abp, make_alternator, make_cm, make_le, make_pif, ProtocolBundle};
use stabiliq::specs::abp::{classify, AbpClass};
use stabiliq::specs::pif::{classify as pif_classify, St};
use stabiliq::specs::{
    check_closed, check_convergence, check_ideal_stabilizing, check_stabilizing, no_adjacent_in, pif, replay,
    Predicate, Witness,
};

fn st(p: &Program, text: &str) -> ProgramState {
    p.parse_state(text).unwrap()
}

fn ts(b: &ProtocolBundle) -> TransitionSystem {
    TransitionSystem::build(&b.program).unwrap()
}

fn labels(p: &Program, s: &ProgramState) -> Vec<String> {
    p.enabled_actions(s).into_iter().map(|a| p.action_label(a)).collect()
}

fn step(p: &Program, from: &str, action: &str) -> String {
    let a = p.parse_action(action).unwrap();
    p.render_state(&p.apply(&st(p, from), a).unwrap())
}

#[test]
fn enabled_actions_of_reference_states() {
    let cm = make_cm(&[2, 1, 3, 4]).unwrap().program;
    for i in 0..16 {
        assert_eq!(cm.enabled_actions(&cm.state_from_index(i)).len(), 4);
    }
    let la = make_alternator(4).unwrap().program;
    assert_eq!(labels(&la, &st(&la, "0,0,0,0")), ["1:toggle"]);
    let pif = make_pif(4).unwrap().program;
    assert_eq!(labels(&pif, &st(&pif, "i,i,i,i")), ["1:request"]);
}

#[test]
fn single_steps() {
    let cm = make_cm(&[2, 1, 3, 4]).unwrap().program;
    assert_eq!(
        step(&cm, "1,1,0,0", "1:flip"),
        "access.1=0 access.2=1 access.3=0 access.4=0"
    );
    let pif = make_pif(4).unwrap().program;
    assert_eq!(step(&pif, "rq,rq,rq,i", "4:reflect"), "st.1=rq st.2=rq st.3=rq st.4=rp");
    assert_eq!(step(&pif, "rq,rq,rq,rp", "3:back"), "st.1=rq st.2=rq st.3=rp st.4=rp");
    assert_eq!(step(&pif, "i,rp,rp,rp", "2:stop"), "st.1=i st.2=i st.3=rp st.4=rp");
    let abp = make_abp().unwrap().program;
    assert_eq!(
        step(&abp, "ns=1 nr=0 chpq=d1 chqp=empty", "2:reply"),
        "ns=1 chpq=empty nr=1 chqp=a1"
    );
    assert_eq!(
        step(&abp, "ns=1 nr=1 chpq=empty chqp=a1", "1:next"),
        "ns=0 chpq=d0 nr=1 chqp=empty"
    );
    // the acknowledgment is lost because the ack channel is full
    assert_eq!(
        step(&abp, "ns=0 nr=1 chpq=d1 chqp=a0", "2:reply"),
        "ns=0 chpq=empty nr=1 chqp=a0"
    );
}

#[test]
fn successors_of_reference_states() {
    let cm = make_cm(&[1, 2, 3, 4]).unwrap().program;
    for i in 0..16 {
        let s = cm.state_from_index(i);
        let succ = cm.successors(&s);
        assert_eq!(succ.len(), 4);
        for (_, t) in succ {
            let diff = s.values().iter().zip(t.values()).filter(|(a, b)| a != b).count();
            assert_eq!(diff, 1);
        }
    }
    let pif = make_pif(4).unwrap().program;
    let succ = pif.successors(&st(&pif, "i,i,i,i"));
    assert_eq!(succ.len(), 1);
    assert_eq!(pif.render_state(&succ[0].1), "st.1=rq st.2=i st.3=i st.4=i");
    let abp = make_abp().unwrap().program;
    let succ = abp.successors(&st(&abp, "ns=0 nr=0 chpq=empty chqp=empty"));
    assert_eq!(succ.len(), 1);
    assert_eq!(abp.action_label(succ[0].0), "1:timeout");
    assert_eq!(abp.render_state(&succ[0].1), "ns=0 chpq=d0 nr=0 chqp=empty");
}

#[test]
fn extended_states() {
    let target = in_schema(4).unwrap();
    let s3 = [1u8, 0, 0, 1];
    let w2: Vec<u8> = target.window(2).map(|i| s3[i]).collect();
    assert_eq!(w2, [1, 0, 0]);
    let s1 = [1u8, 0, 0, 0];
    let w4: Vec<u8> = target.window(4).map(|i| s1[i]).collect();
    assert_eq!(w4, [0, 0]);

    let pif = make_pif(4).unwrap().program;
    let e = pif.extended_state(&st(&pif, "rq,rp,i,rp"), 1);
    assert_eq!(e.slots, [0, 1]);
}

#[test]
fn universe_sizes() {
    assert_eq!(ts(&make_cm(&[2, 1, 3, 4]).unwrap()).len(), 16);
    assert_eq!(ts(&make_cm(&[1, 2]).unwrap()).len(), 4);
    assert_eq!(ts(&make_alternator(4).unwrap()).len(), 16);
    assert_eq!(ts(&make_pif(4).unwrap()).len(), 36);
    assert_eq!(ts(&make_abp().unwrap()).len(), 36);
    assert!(make_cm(&[5, 5]).is_err());
    assert!(make_alternator(2).is_err());
    assert!(make_le(3).is_err());
}

#[test]
fn transition_system_shapes() {
    let cm = ts(&make_cm(&[2, 1, 3, 4]).unwrap());
    assert_eq!((cm.len(), cm.edge_count()), (16, 64));
    let pif = ts(&make_pif(4).unwrap());
    let idle = pif.index_of(&st(pif.program(), "i,i,i,i"));
    assert_eq!(pif.out_degree(idle), 1);
    let abp = ts(&make_abp().unwrap());
    let empty = abp.index_of(&st(abp.program(), "ns=0 nr=0 chpq=empty chqp=empty"));
    assert_eq!(abp.out_degree(empty), 1);
    for t in [&cm, &pif, &abp] {
        assert!(terminals(t).is_empty());
    }
}

#[test]
fn abp_has_one_bottom_component_on_the_handshake_cycle() {
    let b = make_abp().unwrap();
    let t = ts(&b);
    let cond = condense(&t);
    let bottoms = cond.bottoms();
    assert_eq!(bottoms.len(), 1);
    let members: BTreeSet<String> = cond.members(bottoms[0]).iter().map(|&v| t.render(v)).collect();
    let expected: BTreeSet<String> = [
        "ns=0 chpq=d0 nr=1 chqp=empty",
        "ns=0 chpq=empty nr=0 chqp=a0",
        "ns=1 chpq=d1 nr=0 chqp=empty",
        "ns=1 chpq=empty nr=1 chqp=a1",
    ]
    .into_iter()
    .map(String::from)
    .collect();
    assert_eq!(members, expected);
    let legit = b.invariant("legitimate").unwrap();
    for v in 0..t.len() {
        assert_eq!(legit.eval(&t.state(v)), members.contains(&t.render(v)));
    }
}

#[test]
fn pif_bottom_component_is_rq_or_rp() {
    let b = make_pif(4).unwrap();
    let t = ts(&b);
    let cond = condense(&t);
    let bottoms = cond.bottoms();
    assert_eq!(bottoms.len(), 1);
    for v in 0..t.len() {
        let legit = common::pif_legitimate(&common::texts(b.program.schema(), t.state(v).values()));
        assert_eq!(cond.comp_of(v) == bottoms[0], legit, "{}", t.render(v));
    }
}

#[test]
fn convergence_examples() {
    let cm = make_cm(&[2, 1, 3, 4]).unwrap();
    let t = ts(&cm);
    assert!(check_convergence(&t, &Predicate::always()).holds);
    assert!(!check_convergence(&t, &Predicate::new("false", |_| false)).holds);
    let p1_idle = Predicate::new("access.1=0", |s| s.values()[0] == 0);
    let v = check_convergence(&t, &p1_idle);
    assert!(!v.holds);
    match v.witness.as_ref().unwrap() {
        Witness::Cycle { states, .. } => {
            assert!(states.iter().all(|s| s.starts_with("access.1=1")));
        }
        w => panic!("unexpected witness {w:?}"),
    }
    assert!(replay(&t, v.witness.as_ref().unwrap()));

    let pif = make_pif(4).unwrap();
    assert!(check_convergence(&ts(&pif), &pif.invariants[0]).holds);
    let abp = make_abp().unwrap();
    assert!(check_convergence(&ts(&abp), abp.invariant("legitimate").unwrap()).holds);
}

#[test]
fn closure_examples() {
    let pif = make_pif(4).unwrap();
    let t = ts(&pif);
    assert!(check_closed(&t, &Predicate::always()).holds);
    assert!(check_closed(&t, &pif.invariants[0]).holds);
    let root_idle = Predicate::new("root idle", |s| s.values()[0] == 0);
    let v = check_closed(&t, &root_idle);
    assert!(!v.holds);
    assert_eq!(
        v.witness,
        Some(Witness::Edge {
            from: "st.1=i st.2=i st.3=i st.4=i".into(),
            action: "1:request".into(),
            to: "st.1=rq st.2=i st.3=i st.4=i".into(),
            image: None,
        })
    );
}

#[test]
fn simulation_examples() {
    let pif = make_pif(4).unwrap().program;
    let start = st(&pif, "i,i,i,i");
    let c = run(&pif, &start, 0, 1, Policy::UniformRandom).unwrap();
    assert_eq!(c.states, vec![start.clone()]);
    for policy in [Policy::RoundRobin, Policy::UniformRandom] {
        let c = run(&pif, &start, 4, 3, policy).unwrap();
        let trace: Vec<String> = c.states.iter().map(|s| pif.render_state(s)).collect();
        assert_eq!(
            trace,
            [
                "st.1=i st.2=i st.3=i st.4=i",
                "st.1=rq st.2=i st.3=i st.4=i",
                "st.1=rq st.2=rq st.3=i st.4=i",
                "st.1=rq st.2=rq st.3=rq st.4=i",
                "st.1=rq st.2=rq st.3=rq st.4=rp",
            ]
        );
    }
    let cm = make_cm(&[1, 2, 3, 4, 5]).unwrap().program;
    let s = cm.state_from_index(11);
    assert_eq!(
        run(&cm, &s, 50, 7, Policy::UniformRandom).unwrap(),
        run(&cm, &s, 50, 7, Policy::UniformRandom).unwrap()
    );
}

fn lasso(p: &Program, states: &[&str], actions: &[&str], back_to: usize) -> Computation {
    let states: Vec<ProgramState> = states.iter().map(|s| st(p, s)).collect();
    Computation {
        lasso: Some((back_to, states.len() - 1)),
        actions: actions.iter().map(|a| p.parse_action(a).unwrap()).collect(),
        states,
        terminal: false,
    }
}

#[test]
fn stutter_elimination_examples() {
    let b = make_cm(&[2, 1, 3, 4]).unwrap();
    let p = &b.program;
    let toggling = lasso(p, &["0,0,0,0", "1,0,0,0", "0,0,0,0"], &["1:flip", "1:flip"], 0);
    let seq = image(&toggling, &b.mapping);
    let bits: Vec<Vec<u8>> = seq.states.iter().map(|s| s.values().to_vec()).collect();
    assert_eq!(bits, [vec![0, 0, 0, 0], vec![1, 0, 0, 0]]);
    assert!(!seq.stutter_divergent);

    let dominated = lasso(p, &["1,0,0,0", "1,1,0,0", "1,0,0,0"], &["2:flip", "2:flip"], 0);
    let seq = image(&dominated, &b.mapping);
    assert_eq!(seq.states, vec![SpecState::from_values(vec![1, 0, 0, 0])]);
    assert!(seq.stutter_divergent);
    assert!(seq.states.windows(2).all(|w| w[0] != w[1]));
}

#[test]
fn induced_specifications() {
    let pif = make_pif(4).unwrap();
    let t = ts(&pif);
    let spec = induced_specification(&t, &pif.mapping);
    assert_eq!(spec.nodes.len(), 36);
    let non_stutter = t.edges().filter(|e| t.state(e.from) != t.state(e.to)).count();
    assert_eq!(spec.edges.len(), non_stutter);

    let cm = make_cm(&[2, 1, 3, 4]).unwrap();
    let spec = induced_specification(&ts(&cm), &cm.mapping);
    assert!(spec.nodes.iter().all(no_adjacent_in));
}

#[test]
fn mapping_examples() {
    let cm = make_cm(&[2, 1, 3, 4]).unwrap();
    let p = &cm.program;
    assert_eq!(cm.mapping.map(&st(p, "1,1,0,0")).values(), [1, 0, 0, 0]);
    assert_eq!(cm.mapping.map(&st(p, "0,0,0,0")).values(), [0, 0, 0, 0]);
    let la = make_alternator(4).unwrap();
    assert_eq!(la.mapping.map(&st(&la.program, "0,0,0,0")).values(), [1, 0, 0, 0]);
}

#[test]
fn merge_symmetry_examples() {
    let cm = make_cm(&[2, 1, 3, 4]).unwrap();
    assert!(check_merge_symmetry(&cm.mapping, None).unwrap().holds);
    for b in [make_pif(4).unwrap(), make_abp().unwrap()] {
        assert!(check_merge_symmetry(&b.mapping, None).unwrap().holds);
    }
}

fn custom(program: &Program, images: Vec<(Vec<u8>, Vec<u8>)>) -> StateMapping {
    let n = program.n();
    let f = move |s: &ProgramState| {
        let image = images
            .iter()
            .find(|(from, _)| from.as_slice() == s.values())
            .map(|(_, to)| to.clone());
        SpecState::from_values(image.unwrap_or(vec![0; n]))
    };
    let kind = MappingKind::Custom(CustomMap {
        name: "table".into(),
        target: Arc::new(in_schema(n).unwrap()),
        f: Arc::new(f),
    });
    StateMapping::new(program, kind).unwrap()
}

#[test]
fn contrived_mapping_without_merge_symmetry() {
    // two chain ends are each "in" in some image, never together
    let program = make_cm(&[1, 2, 3, 4]).unwrap().program;
    let m = custom(
        &program,
        vec![
            (vec![1, 0, 0, 0], vec![1, 0, 0, 0]),
            (vec![0, 0, 0, 1], vec![0, 0, 0, 1]),
        ],
    );
    let r = check_merge_symmetry(&m, None).unwrap();
    assert!(!r.holds);
    assert_eq!(r.witness.unwrap().values(), [1, 0, 0, 1]);
    assert!(r.donors.iter().all(Option::is_some));

    // on two processes every window covers the whole chain, so <T,T> is not a merge
    let program = make_cm(&[1, 2]).unwrap().program;
    let m = custom(&program, vec![(vec![1, 0], vec![1, 0]), (vec![0, 1], vec![0, 1])]);
    let r = check_merge_symmetry(&m, None).unwrap();
    assert!(r.holds);
    let images: BTreeSet<SpecState> = [vec![1, 0], vec![0, 1]]
        .into_iter()
        .map(SpecState::from_values)
        .collect();
    assert!(!common::brute_merge_closure(m.target(), &images).contains(&SpecState::from_values(vec![1, 1])));
}

#[test]
fn merge_closure_examples() {
    let target = in_schema(4).unwrap();
    let single: BTreeSet<SpecState> = [SpecState::from_values(vec![0, 1, 0, 1])].into();
    assert_eq!(merge_closure(&target, &single), single);

    let le = make_le(4).unwrap();
    let s1 = le.forced_state(&[true, false, false, false]).unwrap();
    let s2 = le.forced_state(&[false, false, false, true]).unwrap();
    assert!(le.allowed.contains(&s1) && le.allowed.contains(&s2));
    let pair: BTreeSet<SpecState> = [s1, s2].into();
    let s3 = SpecState::from_values(vec![1, 1, 0, 0, 0, 0, 1, 1]);
    assert!(merge_closure(&le.schema, &pair).contains(&s3));
    assert!(le.disallowed.contains(&s3));

    let udp: BTreeSet<SpecState> = target
        .iter_universe()
        .map(SpecState::from_values)
        .filter(no_adjacent_in)
        .collect();
    assert!(merge_closure(&target, &udp).iter().all(no_adjacent_in));
}

#[test]
fn possibility_examples() {
    let le = make_le(4).unwrap();
    let p = check_ideal_possibility(&le.schema, &le.allowed, &le.disallowed).unwrap();
    assert!(!p.possible);
    let w = p.witness.unwrap();
    assert!(w.values().iter().skip(1).step_by(2).filter(|&&v| v != 0).count() >= 2);

    let target = in_schema(4).unwrap();
    let (allowed, disallowed): (BTreeSet<SpecState>, BTreeSet<SpecState>) = target
        .iter_universe()
        .map(SpecState::from_values)
        .partition(no_adjacent_in);
    assert!(
        check_ideal_possibility(&target, &allowed, &disallowed)
            .unwrap()
            .possible
    );
    let everything: BTreeSet<SpecState> = allowed.union(&disallowed).cloned().collect();
    assert!(
        check_ideal_possibility(&target, &everything, &BTreeSet::new())
            .unwrap()
            .possible
    );
}

#[test]
fn stabilization_examples() {
    let pif = make_pif(4).unwrap();
    let t = ts(&pif);
    assert!(
        check_stabilizing(&t, &pif.mapping, &pif.specs[0], &pif.invariants[0])
            .unwrap()
            .holds
    );
    let v = check_stabilizing(&t, &pif.mapping, &pif.specs[0], &Predicate::always()).unwrap();
    assert!(!v.holds);
    assert!(!v.part("states").unwrap().holds);

    let abp = make_abp().unwrap();
    let t = ts(&abp);
    let legit = abp.invariant("legitimate").unwrap();
    assert!(check_stabilizing(&t, &abp.mapping, &abp.specs[0], legit).unwrap().holds);
    assert!(check_ideal_stabilizing(&t, &abp.mapping, &abp.specs[1]).unwrap().holds);

    // all eight single-message states: one of them lets ns flip before nr catches up
    let schema = abp.program.schema().clone();
    let eight = Predicate::new("single message", move |s| {
        let t = common::texts(&schema, s.values());
        let msgs: Vec<&String> = [&t[1], &t[3]].into_iter().filter(|m| *m != "empty").collect();
        msgs.len() == 1 && msgs[0].ends_with(t[0].as_str())
    });
    let v = check_stabilizing(&t, &abp.mapping, &abp.specs[0], &eight).unwrap();
    assert!(!v.holds);
    assert!(!v.part("edges").unwrap().holds);
    assert!(replay(&t, v.witness.as_ref().unwrap()));

    let cm = make_cm(&[2, 1, 3, 4]).unwrap();
    let v = check_ideal_stabilizing(&ts(&cm), &cm.mapping, &cm.specs[0]).unwrap();
    assert!(v.part("states").unwrap().holds && v.part("edges").unwrap().holds);

    let la = make_alternator(4).unwrap();
    let v = check_ideal_stabilizing(&ts(&la), &la.mapping, &la.specs[0]).unwrap();
    assert!(v.part("states").unwrap().holds);
}

#[test]
fn ideal_wave_verdict_and_coverage() {
    let pif = make_pif(4).unwrap();
    let t = ts(&pif);
    let v = check_ideal_stabilizing(&t, &pif.mapping, &pif.specs[1]).unwrap();
    assert!(!v.holds);
    let cov = pif::coverage(&t);
    assert!(!cov.holds);
    assert!(cov.part("operational-convergence").unwrap().holds);
    match &cov.witness {
        Some(Witness::States { states }) => {
            assert_eq!(states.len(), 5);
            assert!(states.contains(&"st.1=rq st.2=rp st.3=i st.4=rp".to_string()));
        }
        w => panic!("unexpected witness {w:?}"),
    }
}

#[test]
fn wave_and_abp_classification() {
    use St::*;
    let c = pif_classify(&[I, I, I, I]);
    assert_eq!(c.rq, [(0, 4)]);
    let c = pif_classify(&[Rq, Rq, Rp, Rp]);
    assert_eq!(
        (c.rp.as_slice(), c.rp_prime.as_slice()),
        ([2].as_slice(), [2].as_slice())
    );
    let c = pif_classify(&[Rq, Rp, I, Rp]);
    assert!(!c.strict() && !c.relaxed());

    let abp = make_abp().unwrap().program;
    let class = |text: &str| classify(abp.schema(), st(&abp, text).values()).unwrap();
    assert_eq!(class("ns=1 nr=0 chpq=d1 chqp=empty"), AbpClass::Legitimate);
    assert_eq!(class("ns=0 nr=0 chpq=empty chqp=empty"), AbpClass::Transient);
    assert_eq!(class("ns=0 nr=1 chpq=d1 chqp=a0"), AbpClass::Transient);
}

#[test]
fn witnesses_replay_through_the_kernel() {
    let cm = make_cm(&[2, 1, 3, 4]).unwrap();
    let t = ts(&cm);
    let v = check_ideal_stabilizing(&t, &cm.mapping, &cm.specs[0]).unwrap();
    let w = v.witness.expect("stutter cycle under the default policy");
    assert!(matches!(w, Witness::Cycle { .. }));
    assert!(replay(&t, &w));
    let forged = Witness::Edge {
        from: "access.1=0 access.2=0 access.3=0 access.4=0".into(),
        action: "1:flip".into(),
        to: "access.1=0 access.2=0 access.3=0 access.4=0".into(),
        image: None,
    };
    assert!(!replay(&t, &forged));
}
