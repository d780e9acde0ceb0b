use std::sync::Arc;

use super::spec::{Acceptance, Obligation, Specification, StutterPolicy};
use crate::error::Result;
use crate::kernel::SpecState;
use crate::mapping::in_schema;

/// No two neighbors have `in` set.
pub fn no_adjacent_in(s: &SpecState) -> bool {
    s.values().windows(2).all(|w| w[0] == 0 || w[1] == 0)
}

/// Unfair dining philosophers: neighbor exclusion, and some `in` changes on every cycle.
pub fn udp(n: usize) -> Result<Specification> {
    Ok(Specification {
        name: "UDP".into(),
        schema: Arc::new(in_schema(n)?),
        allowed_state: Arc::new(no_adjacent_in),
        allowed_edge: Arc::new(|_, _| true),
        acceptance: Acceptance::Recurrence(vec![Obligation::new("some in changes", |a, b| a != b)]),
        stutter_policy: StutterPolicy::DivergenceForbidden,
        infinite: true,
    })
}

/// Fair dining philosophers: as [`udp`], but every `in` toggles on every cycle.
pub fn fdp(n: usize) -> Result<Specification> {
    let obligations = (0..n)
        .map(|p| Obligation::new(format!("in.{} toggles", p + 1), move |a, b| a.get(p) != b.get(p)))
        .collect();
    Ok(Specification {
        name: "FDP".into(),
        schema: Arc::new(in_schema(n)?),
        allowed_state: Arc::new(no_adjacent_in),
        allowed_edge: Arc::new(|_, _| true),
        acceptance: Acceptance::Recurrence(obligations),
        stutter_policy: StutterPolicy::DivergenceForbidden,
        infinite: true,
    })
}
