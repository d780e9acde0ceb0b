use std::sync::Arc;

use serde::Serialize;

use super::spec::{Acceptance, Obligation, Predicate, Specification, StutterPolicy};
use super::verdict::{Verdict, Witness};
use crate::error::{Error, Result};
use crate::explorer::TransitionSystem;
use crate::kernel::{Schema, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum St {
    I,
    Rq,
    Rp,
}

impl St {
    fn parse(text: &str) -> Option<St> {
        match text {
            "i" => Some(St::I),
            "rq" => Some(St::Rq),
            "rp" => Some(St::Rp),
            _ => None,
        }
    }
}

/// Reads the `st` value of every process.
pub fn decode(schema: &Schema, values: &[Value]) -> Result<Vec<St>> {
    (1..=schema.n())
        .map(|p| {
            let slot = schema
                .find(p, "st")
                .ok_or_else(|| Error::InvalidArgument(format!("process {p} has no `st` variable")))?;
            let text = schema.slot(slot).domain.text(values[slot]);
            St::parse(text).ok_or_else(|| Error::InvalidArgument(format!("`{text}` is not a wave value")))
        })
        .collect()
}

/// All parameterizations of the wave predicates that a state satisfies.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct PifClass {
    pub rq: Vec<(usize, usize)>,
    pub rp: Vec<usize>,
    pub rq_prime: Vec<(usize, usize)>,
    pub rp_prime: Vec<usize>,
}

impl PifClass {
    pub fn strict(&self) -> bool {
        !self.rq.is_empty() || !self.rp.is_empty()
    }

    pub fn relaxed(&self) -> bool {
        !self.rq_prime.is_empty() || !self.rp_prime.is_empty()
    }
}

fn all(st: &[St], range: std::ops::Range<usize>, v: St) -> bool {
    st[range].iter().all(|&x| x == v)
}

/// Positions are 1-based in the predicate names and 0-based in `st`.
pub fn classify(st: &[St]) -> PifClass {
    let n = st.len();
    let mut c = PifClass::default();
    for l in 0..n {
        for m in l + 1..=n {
            let head = all(st, 0..l, St::Rq) && all(st, l..m, St::I);
            if head {
                c.rq_prime.push((l, m));
                if all(st, m..n, St::Rp) {
                    c.rq.push((l, m));
                }
            }
        }
    }
    for k in 1..n {
        if all(st, 0..k, St::Rq) && st[k] == St::Rp {
            if all(st, k + 1..n, St::Rp) {
                c.rp.push(k);
            }
            if st[k + 1..].iter().all(|&x| x != St::I) {
                c.rp_prime.push(k);
            }
        }
    }
    c
}

fn classifier(schema: Arc<Schema>) -> impl Fn(&[Value]) -> PifClass + Send + Sync + Clone {
    move |v| decode(&schema, v).map(|st| classify(&st)).unwrap_or_default()
}

/// Steps the strict wave may take between predicate instances.
fn spif_step(a: &PifClass, b: &PifClass, n: usize) -> bool {
    let rq_rq = a.rq.iter().any(|&(l, m)| {
        b.rq.iter()
            .any(|&(l2, m2)| (l2 == l + 1 && m2 == m) || (l2 == l && m2 == m + 1))
    });
    let rq_rp = a.rq.contains(&(n - 1, n)) && b.rp.contains(&(n - 1));
    let rp_rp = a.rp.iter().any(|&k| b.rp.contains(&(k.wrapping_sub(1))));
    let rp_rq = a.rp.contains(&1) && b.rq.contains(&(0, 1));
    rq_rq || rq_rp || rp_rp || rp_rq
}

/// Strict wave specification: states in RQ or RP, steps along the wave, and both
/// phase changes on every cycle.
pub fn spif(schema: Arc<Schema>) -> Specification {
    let n = schema.n();
    let cls = classifier(schema.clone());
    let (c1, c2, c3) = (cls.clone(), cls.clone(), cls.clone());
    Specification {
        name: "SPIF".into(),
        schema,
        allowed_state: Arc::new(move |s| cls(s.values()).strict()),
        allowed_edge: Arc::new(move |a, b| spif_step(&c1(a.values()), &c1(b.values()), n)),
        acceptance: Acceptance::Recurrence(vec![
            Obligation::new("RQ to RP", move |a, b| {
                !c2(a.values()).rq.is_empty() && !c2(b.values()).rp.is_empty()
            }),
            Obligation::new("RP to RQ", move |a, b| {
                !c3(a.values()).rp.is_empty() && !c3(b.values()).rq.is_empty()
            }),
        ]),
        stutter_policy: StutterPolicy::DivergenceForbidden,
        infinite: true,
    }
}

/// Ideal wave specification: states in RP' or RQ', exits from the RQ' family only
/// into RP, and every cycle within RQ or RP.
pub fn ipif(schema: Arc<Schema>) -> Specification {
    let cls = classifier(schema.clone());
    let (c1, c2) = (cls.clone(), cls.clone());
    Specification {
        name: "IPIF".into(),
        schema,
        allowed_state: Arc::new(move |s| cls(s.values()).relaxed()),
        allowed_edge: Arc::new(move |a, b| {
            let (a, b) = (c1(a.values()), c1(b.values()));
            a.rq_prime.is_empty() || !b.rq_prime.is_empty() || !b.rp.is_empty()
        }),
        acceptance: Acceptance::CycleWithin {
            name: "RQ or RP".into(),
            pred: Arc::new(move |s| c2(s.values()).strict()),
        },
        stutter_policy: StutterPolicy::DivergenceForbidden,
        infinite: true,
    }
}

/// `RQ(l,m) or RP(k)` over program states of a wave program.
pub fn rq_or_rp(schema: Arc<Schema>) -> Predicate {
    let cls = classifier(schema);
    Predicate::new("rq-or-rp", move |s| cls(s.values()).strict())
}

/// `RQ'(l,m) or RP'(k)` over program states of a wave program.
pub fn rq_or_rp_relaxed(schema: Arc<Schema>) -> Predicate {
    let cls = classifier(schema);
    Predicate::new("rq'-or-rp'", move |s| cls(s.values()).relaxed())
}

/// Whether RP' or RQ' covers the whole universe, listing uncovered states.
/// The operational claim (every state converges to RQ or RP) is reported as a
/// separate part and does not affect the verdict.
pub fn coverage(ts: &TransitionSystem) -> Verdict {
    let schema = Arc::new(ts.program().schema().clone());
    let relaxed = rq_or_rp_relaxed(schema.clone());
    let uncovered: Vec<String> = (0..ts.len())
        .filter(|&i| !relaxed.eval(&ts.state(i)))
        .map(|i| ts.render(i))
        .collect();
    let literal = if uncovered.is_empty() {
        Verdict::holds("literal-coverage")
    } else {
        Verdict::fails(
            "literal-coverage",
            Witness::States {
                states: uncovered.clone(),
            },
        )
    }
    .with_note(format!(
        "{} of {} states satisfy neither RP' nor RQ'",
        uncovered.len(),
        ts.len()
    ));
    let operational = super::checks::check_convergence(ts, &rq_or_rp(schema));
    let operational = Verdict {
        check: "operational-convergence".into(),
        ..operational
    };
    let mut v = Verdict::new("pif-coverage", literal.holds, literal.witness.clone());
    v.stats = operational.stats.clone();
    v.parts = vec![literal, operational];
    v
}
