use std::collections::BTreeSet;
use std::sync::Arc;

use super::check_n;
use crate::error::Result;
use crate::kernel::{Domain, Schema, Slot, SpecState, Value, VarKind};
use crate::specs::{Acceptance, Specification, StutterPolicy};

/// Specification-state sets of leader election on a chain.
///
/// There is no program: the fixture only feeds the merge-closure engine.
#[derive(Debug, Clone)]
pub struct LeFixture {
    pub n: usize,
    pub schema: Arc<Schema>,
    /// At most one leader, and only a contender may lead.
    pub allowed: BTreeSet<SpecState>,
    pub disallowed: BTreeSet<SpecState>,
    /// One elected state per singleton-contender input; every input-complete
    /// subset must contain these.
    pub forced: BTreeSet<SpecState>,
}

fn le_schema(n: usize) -> Result<Schema> {
    let b = Domain::shared_bool();
    let slots = (1..=n)
        .flat_map(|position| {
            [("contend", VarKind::Input), ("leader", VarKind::Output)].map(|(name, kind)| Slot {
                position,
                name: name.into(),
                domain: b.clone(),
                kind,
            })
        })
        .collect();
    Schema::new(n, slots)
}

fn split(s: &[Value]) -> (Vec<bool>, Vec<bool>) {
    (
        s.iter().step_by(2).map(|&v| v != 0).collect(),
        s.iter().skip(1).step_by(2).map(|&v| v != 0).collect(),
    )
}

fn allowed_state(s: &[Value]) -> bool {
    let (contend, leader) = split(s);
    leader.iter().filter(|&&l| l).count() <= 1 && leader.iter().zip(&contend).all(|(&l, &c)| !l || c)
}

pub fn make_le(n: usize) -> Result<LeFixture> {
    check_n("leader election", n, 4)?;
    let schema = le_schema(n)?;
    let (allowed, disallowed): (BTreeSet<SpecState>, BTreeSet<SpecState>) = schema
        .iter_universe()
        .map(SpecState::from_values)
        .partition(|s| allowed_state(s.values()));
    let forced = (0..n)
        .map(|i| {
            let contend: Vec<bool> = (0..n).map(|j| j == i).collect();
            LeFixture::elected(&contend, i)
        })
        .collect();
    Ok(LeFixture {
        n,
        schema: Arc::new(schema),
        allowed,
        disallowed,
        forced,
    })
}

impl LeFixture {
    fn elected(contend: &[bool], leader: usize) -> SpecState {
        SpecState::from_values(
            contend
                .iter()
                .enumerate()
                .flat_map(|(j, &c)| [c as Value, (j == leader) as Value])
                .collect(),
        )
    }

    /// The state every input-complete subset must contain for this input, if it
    /// has exactly one contender.
    pub fn forced_state(&self, contend: &[bool]) -> Option<SpecState> {
        if contend.len() != self.n {
            return None;
        }
        let mut it = contend.iter().enumerate().filter(|(_, &c)| c);
        match (it.next(), it.next()) {
            (Some((i, _)), None) => Some(Self::elected(contend, i)),
            _ => None,
        }
    }
}

/// Finite-sequence leader election: inputs never change, at most one contender
/// leads, and sequences end with exactly one leader.
pub fn le_spec(n: usize) -> Result<Specification> {
    check_n("leader election", n, 4)?;
    Ok(Specification {
        name: "LE".into(),
        schema: Arc::new(le_schema(n)?),
        allowed_state: Arc::new(|s| allowed_state(s.values())),
        allowed_edge: Arc::new(|a, b| split(a.values()).0 == split(b.values()).0),
        acceptance: Acceptance::FiniteTerminal {
            name: "leader elected".into(),
            pred: Arc::new(|s| split(s.values()).1.iter().filter(|&&l| l).count() == 1),
        },
        stutter_policy: StutterPolicy::DivergenceForbidden,
        infinite: false,
    })
}
