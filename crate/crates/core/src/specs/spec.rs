use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::error::Error;
use crate::kernel::{ProgramState, Schema, SpecState};

pub type StatePred = Arc<dyn Fn(&SpecState) -> bool + Send + Sync>;
pub type EdgePred = Arc<dyn Fn(&SpecState, &SpecState) -> bool + Send + Sync>;

/// A named predicate over program states.
#[derive(Clone)]
pub struct Predicate {
    pub name: String,
    f: Arc<dyn Fn(&ProgramState) -> bool + Send + Sync>,
}

impl Predicate {
    pub fn new(name: impl Into<String>, f: impl Fn(&ProgramState) -> bool + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    pub fn always() -> Self {
        Self::new("true", |_| true)
    }

    pub fn eval(&self, s: &ProgramState) -> bool {
        (self.f)(s)
    }
}

impl fmt::Debug for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Predicate({})", self.name)
    }
}

/// An edge condition that must occur on every cycle.
#[derive(Clone)]
pub struct Obligation {
    pub name: String,
    pub edge: EdgePred,
}

impl Obligation {
    pub fn new(name: impl Into<String>, f: impl Fn(&SpecState, &SpecState) -> bool + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            edge: Arc::new(f),
        }
    }
}

/// Condition on eventual behavior.
#[derive(Clone)]
pub enum Acceptance {
    /// Every state on a cycle satisfies the predicate.
    CycleWithin {
        name: String,
        pred: StatePred,
    },
    /// Every cycle contains an edge satisfying each obligation.
    Recurrence(Vec<Obligation>),
    /// Sequences are finite: no cycles, and terminal states satisfy the predicate.
    FiniteTerminal {
        name: String,
        pred: StatePred,
    },
    Any,
}

impl Acceptance {
    pub fn describe(&self) -> String {
        match self {
            Acceptance::CycleWithin { name, .. } => format!("cycle-within({name})"),
            Acceptance::Recurrence(obs) => {
                let names: Vec<&str> = obs.iter().map(|o| o.name.as_str()).collect();
                format!("recurrence({})", names.join(", "))
            }
            Acceptance::FiniteTerminal { name, .. } => format!("finite-terminal({name})"),
            Acceptance::Any => "any".into(),
        }
    }
}

/// Whether an infinite computation with an eventually constant image is acceptable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StutterPolicy {
    DivergenceForbidden,
    DivergenceAllowed,
}

impl FromStr for StutterPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "forbid" | "forbidden" | "divergence-forbidden" => Ok(StutterPolicy::DivergenceForbidden),
            "allow" | "allowed" | "divergence-allowed" => Ok(StutterPolicy::DivergenceAllowed),
            other => Err(Error::InvalidArgument(format!("unknown stutter policy `{other}`"))),
        }
    }
}

impl fmt::Display for StutterPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StutterPolicy::DivergenceForbidden => "divergence-forbidden",
            StutterPolicy::DivergenceAllowed => "divergence-allowed",
        })
    }
}

/// A memoryless specification: allowed states, allowed non-stutter edges and an
/// acceptance condition on cycles or terminal states.
#[derive(Clone)]
pub struct Specification {
    pub name: String,
    pub schema: Arc<Schema>,
    pub allowed_state: StatePred,
    /// Consulted for edges whose endpoints differ; stutter pairs are always allowed.
    pub allowed_edge: EdgePred,
    pub acceptance: Acceptance,
    pub stutter_policy: StutterPolicy,
    /// Sequences are infinite, so terminal states are not acceptable.
    pub infinite: bool,
}

impl Specification {
    pub fn with_stutter_policy(mut self, policy: StutterPolicy) -> Self {
        self.stutter_policy = policy;
        self
    }

    pub fn allows_state(&self, s: &SpecState) -> bool {
        (self.allowed_state)(s)
    }

    pub fn allows_edge(&self, from: &SpecState, to: &SpecState) -> bool {
        from == to || (self.allowed_edge)(from, to)
    }
}

impl fmt::Debug for Specification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Specification")
            .field("name", &self.name)
            .field("acceptance", &self.acceptance.describe())
            .field("stutter_policy", &self.stutter_policy)
            .finish_non_exhaustive()
    }
}
