use std::time::Instant;

use rayon::prelude::*;

use super::spec::{Acceptance, Predicate, Specification, StutterPolicy};
use super::verdict::{Stats, Verdict, Witness};
use crate::error::{Error, Result};
use crate::explorer::{condense, cycle_at, cycle_through, cycles_outside, tarjan, Cycle, Edge, TransitionSystem};
use crate::kernel::SpecState;
use crate::mapping::StateMapping;

fn stats(ts: &TransitionSystem, start: Instant) -> Stats {
    Stats {
        states: ts.len() as u64,
        edges: ts.edge_count() as u64,
        components: None,
        elapsed_ms: start.elapsed().as_millis() as u64,
    }
}

pub(crate) fn edge_witness(ts: &TransitionSystem, e: &Edge, image: Option<(String, String)>) -> Witness {
    Witness::Edge {
        from: ts.render(e.from),
        action: ts.program().action_label(e.action),
        to: ts.render(e.to),
        image,
    }
}

pub(crate) fn cycle_witness(ts: &TransitionSystem, c: &Cycle, images: Option<&Images>) -> Witness {
    Witness::Cycle {
        states: c.states.iter().map(|&s| ts.render(s)).collect(),
        actions: c.actions.iter().map(|&a| ts.program().action_label(a)).collect(),
        images: images
            .map(|im| c.states.iter().map(|&s| im.render(s)).collect())
            .unwrap_or_default(),
    }
}

/// Specification images of every node.
pub(crate) struct Images<'a> {
    spec: &'a Specification,
    of: Vec<SpecState>,
}

impl Images<'_> {
    fn render(&self, i: usize) -> String {
        self.spec.schema.render(self.of[i].values())
    }

    fn stutter(&self, e: &Edge) -> bool {
        self.of[e.from] == self.of[e.to]
    }
}

fn closed_part(ts: &TransitionSystem, inside: &[bool], name: &str) -> Verdict {
    let escaping = (0..ts.len())
        .filter(|&i| inside[i])
        .flat_map(|i| ts.edges_from(i))
        .find(|e| !inside[e.to]);
    match escaping {
        Some(e) => Verdict::fails("closed", edge_witness(ts, &e, None)),
        None => Verdict::holds("closed"),
    }
    .with_note(format!("predicate {name}"))
}

fn convergence_part(ts: &TransitionSystem, inside: &[bool], name: &str) -> Verdict {
    let v = if let Some(t) = (0..ts.len()).find(|&i| !inside[i] && ts.out_degree(i) == 0) {
        Verdict::fails("convergence", Witness::Terminal { state: ts.render(t) })
    } else if let Some(c) = cycles_outside(ts, inside) {
        Verdict::fails("convergence", cycle_witness(ts, &c, None))
    } else {
        Verdict::holds("convergence")
    };
    v.with_note(format!("predicate {name}"))
}

/// No transition leaves the predicate.
pub fn check_closed(ts: &TransitionSystem, pred: &Predicate) -> Verdict {
    let start = Instant::now();
    let inside = ts.mask(|s| pred.eval(s));
    let v = closed_part(ts, &inside, &pred.name);
    v.with_stats(stats(ts, start))
}

/// Every maximal computation from every state reaches the predicate.
///
/// With no fairness this holds iff no terminal state and no cycle lies outside it.
pub fn check_convergence(ts: &TransitionSystem, pred: &Predicate) -> Verdict {
    let start = Instant::now();
    let inside = ts.mask(|s| pred.eval(s));
    let v = convergence_part(ts, &inside, &pred.name);
    v.with_stats(stats(ts, start))
}

/// Closure and convergence of `inv`, plus conformance to `spec` of every state,
/// edge and cycle inside it.
pub fn check_stabilizing(
    ts: &TransitionSystem,
    mapping: &StateMapping,
    spec: &Specification,
    inv: &Predicate,
) -> Result<Verdict> {
    stabilizing("stabilizing", ts, mapping, spec, inv)
}

/// [`check_stabilizing`] with the invariant `true`.
pub fn check_ideal_stabilizing(ts: &TransitionSystem, mapping: &StateMapping, spec: &Specification) -> Result<Verdict> {
    stabilizing("ideal", ts, mapping, spec, &Predicate::always())
}

fn stabilizing(
    check: &str,
    ts: &TransitionSystem,
    mapping: &StateMapping,
    spec: &Specification,
    inv: &Predicate,
) -> Result<Verdict> {
    if **mapping.target() != *spec.schema {
        return Err(Error::Mapping(format!(
            "mapping {} produces `{}` but {} is over `{}`",
            mapping.describe(),
            mapping.target(),
            spec.name,
            spec.schema
        )));
    }
    let start = Instant::now();
    let inside = ts.mask(|s| inv.eval(s));
    let images = Images {
        spec,
        of: (0..ts.len())
            .into_par_iter()
            .map(|i| mapping.map(&ts.state(i)))
            .collect(),
    };

    let closed = closed_part(ts, &inside, &inv.name);
    let convergence = convergence_part(ts, &inside, &inv.name);

    let states = match (0..ts.len()).find(|&i| inside[i] && !spec.allows_state(&images.of[i])) {
        Some(i) => Verdict::fails(
            "states",
            Witness::State {
                state: ts.render(i),
                image: Some(images.render(i)),
            },
        ),
        None => Verdict::holds("states"),
    };

    let bad_edge = ts
        .edges()
        .find(|e| inside[e.from] && inside[e.to] && !spec.allows_edge(&images.of[e.from], &images.of[e.to]));
    let edges = match bad_edge {
        Some(e) => Verdict::fails(
            "edges",
            edge_witness(ts, &e, Some((images.render(e.from), images.render(e.to)))),
        ),
        None => Verdict::holds("edges"),
    };

    let acceptance = acceptance_part(ts, &inside, &images, spec);
    let stutter = stutter_part(ts, &inside, &images, spec.stutter_policy);

    let components = condense(ts).len() as u64;
    let mut v = Verdict::all(check, vec![closed, convergence, states, edges, acceptance, stutter])
        .with_note(format!(
            "specification {} via mapping {}",
            spec.name,
            mapping.describe()
        ))
        .with_note(format!("stutter policy {}", spec.stutter_policy));
    v.stats = Stats {
        components: Some(components),
        ..stats(ts, start)
    };
    Ok(v)
}

fn acceptance_part(ts: &TransitionSystem, inside: &[bool], images: &Images, spec: &Specification) -> Verdict {
    let name = "acceptance";
    let note = spec.acceptance.describe();
    if spec.infinite {
        if let Some(t) = (0..ts.len()).find(|&i| inside[i] && ts.out_degree(i) == 0) {
            return Verdict::fails(name, Witness::Terminal { state: ts.render(t) })
                .with_note(format!("{note}; sequences are infinite but this state is terminal"));
        }
    }
    let within = |e: &Edge| inside[e.from] && inside[e.to];
    let v = match &spec.acceptance {
        Acceptance::Any => Verdict::holds(name),
        Acceptance::Recurrence(obligations) => {
            let mut failed = None;
            for ob in obligations {
                let avoid = |e: &Edge| within(e) && !(ob.edge)(&images.of[e.from], &images.of[e.to]);
                let comps = tarjan(ts.len(), |v| ts.edges_from(v).filter(|e| avoid(e)).map(|e| e.to));
                let excused = |e: &Edge| spec.stutter_policy == StutterPolicy::DivergenceAllowed && images.stutter(e);
                let bad = ts
                    .edges()
                    .find(|e| avoid(e) && comps.comp_of[e.from] == comps.comp_of[e.to] && !excused(e));
                if let Some(e) = bad {
                    let c = cycle_through(ts, e, avoid).expect("edge lies in a component of the avoiding graph");
                    failed = Some(
                        Verdict::fails(name, cycle_witness(ts, &c, Some(images)))
                            .with_note(format!("cycle never satisfies `{}`", ob.name)),
                    );
                    break;
                }
            }
            failed.unwrap_or_else(|| Verdict::holds(name))
        }
        Acceptance::CycleWithin { name: pname, pred } => {
            let comps = tarjan(ts.len(), |v| ts.edges_from(v).filter(|e| within(e)).map(|e| e.to));
            let on_cycle = |i: usize| {
                let c = comps.comp_of[i];
                comps.members[c].len() > 1 || ts.succ(i).contains(&i)
            };
            match (0..ts.len()).find(|&i| inside[i] && on_cycle(i) && !pred(&images.of[i])) {
                Some(i) => {
                    let c = comps.comp_of[i];
                    let cyc =
                        cycle_at(ts, i, |e| within(e) && comps.comp_of[e.to] == c).expect("state lies on a cycle");
                    Verdict::fails(name, cycle_witness(ts, &cyc, Some(images)))
                        .with_note(format!("cycle leaves {pname}"))
                }
                None => Verdict::holds(name),
            }
        }
        Acceptance::FiniteTerminal { name: pname, pred } => {
            if let Some(c) = cycles_outside(ts, &inside.iter().map(|b| !b).collect::<Vec<_>>()) {
                Verdict::fails(name, cycle_witness(ts, &c, Some(images))).with_note("sequences must be finite")
            } else if let Some(t) = (0..ts.len()).find(|&i| inside[i] && ts.out_degree(i) == 0 && !pred(&images.of[i]))
            {
                Verdict::fails(name, Witness::Terminal { state: ts.render(t) })
                    .with_note(format!("terminal state violates {pname}"))
            } else {
                Verdict::holds(name)
            }
        }
    };
    v.with_note(note)
}

/// Cycles made only of stutter edges are infinite computations with a constant image.
fn stutter_part(ts: &TransitionSystem, inside: &[bool], images: &Images, policy: StutterPolicy) -> Verdict {
    let stutter = |e: &Edge| inside[e.from] && inside[e.to] && images.stutter(e);
    let comps = tarjan(ts.len(), |v| ts.edges_from(v).filter(|e| stutter(e)).map(|e| e.to));
    let found = ts
        .edges()
        .find(|e| stutter(e) && comps.comp_of[e.from] == comps.comp_of[e.to])
        .map(|e| cycle_through(ts, e, stutter).expect("edge lies in a stutter component"));
    let name = "stutter";
    match (found, policy) {
        (None, _) => Verdict::holds(name).with_note("no stutter-divergent computation"),
        (Some(c), StutterPolicy::DivergenceForbidden) => {
            Verdict::fails(name, cycle_witness(ts, &c, Some(images))).with_note("stutter-divergent computation")
        }
        (Some(c), StutterPolicy::DivergenceAllowed) => {
            Verdict::new(name, true, Some(cycle_witness(ts, &c, Some(images))))
                .with_note("stutter-divergent computation exists; accepted under divergence-allowed")
        }
    }
}

/// Replays a witness through the kernel: every listed action must be enabled and
/// lead to the next listed state. Returns false for malformed witnesses.
pub fn replay(ts: &TransitionSystem, w: &Witness) -> bool {
    let p = ts.program();
    let step = |from: &str, action: &str, to: &str| -> bool {
        let (Ok(f), Some(a), Ok(t)) = (p.parse_state(from), p.parse_action(action), p.parse_state(to)) else {
            return false;
        };
        p.apply(&f, a).map(|s| s == t).unwrap_or(false)
    };
    match w {
        Witness::Edge { from, action, to, .. } => step(from, action, to),
        Witness::Cycle { states, actions, .. } => {
            !states.is_empty()
                && states.len() == actions.len()
                && (0..states.len()).all(|i| step(&states[i], &actions[i], &states[(i + 1) % states.len()]))
        }
        Witness::Terminal { state } => p
            .parse_state(state)
            .map(|s| p.enabled_actions(&s).is_empty())
            .unwrap_or(false),
        Witness::State { state, .. } => p.parse_state(state).is_ok(),
        Witness::Merge { .. } | Witness::States { .. } => true,
    }
}
