use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::kernel::Program;
use crate::kernel::{Domain, ProgramState, Schema, Slot, SpecState, Value, VarKind};

/// Named mapping rules that read only each process's extended state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    /// `in.p` holds iff `access.p` holds and `p` has the highest identifier
    /// among itself and its neighbors with `access` set.
    HighestId,
    /// `in.p` holds iff some action of `p` is enabled.
    Enabled,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::HighestId => "highest-id",
            Rule::Enabled => "enabled",
        }
    }
}

type MapFn = Arc<dyn Fn(&ProgramState) -> SpecState + Send + Sync>;

/// A mapping defined by an arbitrary function, for fixtures and extensions.
#[derive(Clone)]
pub struct CustomMap {
    pub name: String,
    pub target: Arc<Schema>,
    pub f: MapFn,
}

impl fmt::Debug for CustomMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomMap")
            .field("name", &self.name)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone)]
pub enum MappingKind {
    Identical,
    /// Keeps the listed external variables, by schema label.
    Projection(Vec<String>),
    Rule(Rule),
    Custom(CustomMap),
}

/// A total function from program states to specification states.
#[derive(Debug, Clone)]
pub struct StateMapping {
    program: Program,
    kind: MappingKind,
    target: Arc<Schema>,
    projection: Vec<usize>,
}

const ACCESS: &str = "access";

impl StateMapping {
    pub fn new(program: &Program, kind: MappingKind) -> Result<Self> {
        let schema = program.schema();
        let mut projection = Vec::new();
        let target = match &kind {
            MappingKind::Identical => {
                if let Some(s) = schema.slots().iter().find(|s| !s.kind.is_external()) {
                    return Err(Error::Mapping(format!(
                        "identical mapping needs every variable external; `{}` at process {} is internal",
                        s.name, s.position
                    )));
                }
                Arc::new(schema.clone())
            }
            MappingKind::Projection(labels) => {
                for label in labels {
                    let i = (0..schema.len())
                        .find(|&i| schema.label(i) == label)
                        .ok_or_else(|| Error::Mapping(format!("no variable `{label}`")))?;
                    if !schema.slot(i).kind.is_external() {
                        return Err(Error::Mapping(format!("projection names internal variable `{label}`")));
                    }
                    projection.push(i);
                }
                // keep canonical slot order regardless of how the list was written
                projection.sort_unstable();
                projection.dedup();
                let slots = projection.iter().map(|&i| schema.slot(i).clone()).collect();
                Arc::new(Schema::new(program.n(), slots)?)
            }
            MappingKind::Rule(rule) => {
                if *rule == Rule::HighestId {
                    for pos in 1..=program.n() {
                        match schema.find(pos, ACCESS) {
                            Some(i) if schema.slot(i).domain.is_bool() => {}
                            _ => {
                                return Err(Error::Mapping(format!(
                                    "highest-id rule needs a boolean `{ACCESS}` at process {pos}"
                                )))
                            }
                        }
                    }
                }
                Arc::new(in_schema(program.n())?)
            }
            MappingKind::Custom(c) => {
                if c.target.n() != program.n() {
                    return Err(Error::Mapping(
                        "custom mapping target has a different chain length".into(),
                    ));
                }
                c.target.clone()
            }
        };
        Ok(Self {
            program: program.clone(),
            kind,
            target,
            projection,
        })
    }

    pub fn identical(program: &Program) -> Result<Self> {
        Self::new(program, MappingKind::Identical)
    }

    pub fn rule(program: &Program, rule: Rule) -> Result<Self> {
        Self::new(program, MappingKind::Rule(rule))
    }

    pub fn program(&self) -> &Program {
        &self.program
    }

    pub fn kind(&self) -> &MappingKind {
        &self.kind
    }

    /// The specification-state signature this mapping produces.
    pub fn target(&self) -> &Arc<Schema> {
        &self.target
    }

    pub fn describe(&self) -> String {
        match &self.kind {
            MappingKind::Identical => "identical".into(),
            MappingKind::Projection(l) => format!("projection({})", l.join(", ")),
            MappingKind::Rule(r) => format!("rule({})", r.name()),
            MappingKind::Custom(c) => format!("custom({})", c.name),
        }
    }

    pub fn map(&self, s: &ProgramState) -> SpecState {
        match &self.kind {
            MappingKind::Identical => SpecState::from_values(s.values().to_vec()),
            MappingKind::Projection(_) => SpecState::from_values(self.projection.iter().map(|&i| s.get(i)).collect()),
            MappingKind::Rule(Rule::HighestId) => self.highest_id(s),
            MappingKind::Rule(Rule::Enabled) => {
                let mut out = vec![0; self.program.n()];
                for a in self.program.enabled_actions(s) {
                    out[a.position - 1] = 1;
                }
                SpecState::from_values(out)
            }
            MappingKind::Custom(c) => (c.f)(s),
        }
    }

    fn highest_id(&self, s: &ProgramState) -> SpecState {
        let schema = self.program.schema();
        let n = self.program.n();
        let access = |pos: usize| s.get(schema.find(pos, ACCESS).expect("checked at construction")) != 0;
        let id = |pos: usize| self.program.process(pos).id;
        let out: Vec<Value> = (1..=n)
            .map(|p| {
                let beats = |q: usize| !access(q) || id(q) < id(p);
                let wins = access(p) && (p == 1 || beats(p - 1)) && (p == n || beats(p + 1));
                wins as Value
            })
            .collect();
        SpecState::from_values(out)
    }
}

/// Signature with one boolean output `in` per process.
pub fn in_schema(n: usize) -> Result<Schema> {
    let b = Domain::shared_bool();
    let slots = (1..=n)
        .map(|position| Slot {
            position,
            name: "in".into(),
            domain: b.clone(),
            kind: VarKind::Output,
        })
        .collect();
    Schema::new(n, slots)
}
