use std::sync::Arc;

use serde::Serialize;

use super::spec::{Acceptance, Obligation, Predicate, Specification, StutterPolicy};
use crate::error::{Error, Result};
use crate::kernel::{Schema, Value};

/// Decoded alternating-bit state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AbpView {
    pub ns: bool,
    pub nr: bool,
    /// Payload bit of the data message in transit, if any.
    pub data: Option<bool>,
    /// Payload bit of the acknowledgment in transit, if any.
    pub ack: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AbpClass {
    Legitimate,
    Transient,
}

fn message(text: &str) -> Option<Option<bool>> {
    match text {
        "empty" => Some(None),
        "d0" | "a0" => Some(Some(false)),
        "d1" | "a1" => Some(Some(true)),
        _ => None,
    }
}

pub fn decode(schema: &Schema, values: &[Value]) -> Result<AbpView> {
    let get = |pos: usize, name: &str| -> Result<&str> {
        let i = schema
            .find(pos, name)
            .ok_or_else(|| Error::InvalidArgument(format!("no `{name}` at process {pos}")))?;
        Ok(schema.slot(i).domain.text(values[i]))
    };
    let bit = |t: &str| t == "1";
    let bad = |t: &str| Error::InvalidArgument(format!("`{t}` is not a channel value"));
    let pq = get(1, "chpq")?;
    let qp = get(2, "chqp")?;
    Ok(AbpView {
        ns: bit(get(1, "ns")?),
        nr: bit(get(2, "nr")?),
        data: message(pq).ok_or_else(|| bad(pq))?,
        ack: message(qp).ok_or_else(|| bad(qp))?,
    })
}

impl AbpView {
    /// Exactly one message in transit, carrying the sender's sequence number.
    pub fn single_message(&self) -> bool {
        match (self.data, self.ack) {
            (Some(b), None) | (None, Some(b)) => b == self.ns,
            _ => false,
        }
    }

    /// On the handshake cycle: a single message bearing `ns`, which is new data
    /// the receiver has not taken yet, or the acknowledgment of data it has.
    pub fn legitimate(&self) -> bool {
        self.single_message() && (self.data.is_some() != (self.nr == self.ns))
    }

    pub fn class(&self) -> AbpClass {
        if self.legitimate() {
            AbpClass::Legitimate
        } else {
            AbpClass::Transient
        }
    }
}

pub fn classify(schema: &Schema, values: &[Value]) -> Result<AbpClass> {
    decode(schema, values).map(|v| v.class())
}

fn viewer(schema: Arc<Schema>) -> impl Fn(&[Value]) -> Option<AbpView> + Send + Sync + Clone {
    move |v| decode(&schema, v).ok()
}

/// Strict specification: a single message bearing `ns`; `ns` changes only once the
/// receiver has caught up, and `nr` changes only to match `ns`; both recur.
pub fn sabp(schema: Arc<Schema>) -> Specification {
    let view = viewer(schema.clone());
    let (v1, v2, v3) = (view.clone(), view.clone(), view.clone());
    Specification {
        name: "SABP".into(),
        schema,
        allowed_state: Arc::new(move |s| view(s.values()).is_some_and(|v| v.single_message())),
        allowed_edge: Arc::new(move |a, b| match (v1(a.values()), v1(b.values())) {
            (Some(a), Some(b)) => (a.ns == b.ns || a.ns == a.nr) && (a.nr == b.nr || b.nr == b.ns),
            _ => false,
        }),
        acceptance: Acceptance::Recurrence(vec![
            Obligation::new(
                "ns changes",
                move |a, b| matches!((v2(a.values()), v2(b.values())), (Some(a), Some(b)) if a.ns != b.ns),
            ),
            Obligation::new(
                "nr changes",
                move |a, b| matches!((v3(a.values()), v3(b.values())), (Some(a), Some(b)) if a.nr != b.nr),
            ),
        ]),
        stutter_policy: StutterPolicy::DivergenceForbidden,
        infinite: true,
    }
}

/// Ideal specification: any state and step, with every cycle inside SABP's states.
pub fn iabp(schema: Arc<Schema>) -> Specification {
    let view = viewer(schema.clone());
    Specification {
        name: "IABP".into(),
        schema,
        allowed_state: Arc::new(|_| true),
        allowed_edge: Arc::new(|_, _| true),
        acceptance: Acceptance::CycleWithin {
            name: "SABP states".into(),
            pred: Arc::new(move |s| view(s.values()).is_some_and(|v| v.single_message())),
        },
        stutter_policy: StutterPolicy::DivergenceForbidden,
        infinite: true,
    }
}

/// Legitimate SABP states over program states of the alternating-bit program.
pub fn legitimate(schema: Arc<Schema>) -> Predicate {
    let view = viewer(schema);
    Predicate::new("legitimate", move |s| view(s.values()).is_some_and(|v| v.legitimate()))
}
