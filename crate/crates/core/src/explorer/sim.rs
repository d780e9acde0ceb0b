use std::collections::HashMap;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{ActionId, Program, ProgramState, SpecState};
use crate::mapping::StateMapping;

/// How the central daemon picks among enabled actions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Policy {
    UniformRandom,
    /// Cycles through actions in canonical order, picking the next enabled one.
    RoundRobin,
}

impl FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform-random" | "random" => Ok(Policy::UniformRandom),
            "round-robin" => Ok(Policy::RoundRobin),
            other => Err(Error::InvalidArgument(format!("unknown policy `{other}`"))),
        }
    }
}

/// A finite prefix of a computation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Computation {
    pub states: Vec<ProgramState>,
    /// `actions[i]` leads from `states[i]` to `states[i + 1]`.
    pub actions: Vec<ActionId>,
    /// First revisit: `states[a] == states[b]` with `a < b`.
    pub lasso: Option<(usize, usize)>,
    /// The last state has no enabled action.
    pub terminal: bool,
}

impl Computation {
    /// Maximal iff it ends in a terminal state or closes a lasso.
    pub fn is_maximal(&self) -> bool {
        self.terminal || self.lasso.is_some()
    }
}

/// Runs the program for up to `steps` steps, stopping early only at a terminal state.
pub fn run(program: &Program, start: &ProgramState, steps: usize, seed: u64, policy: Policy) -> Result<Computation> {
    if !program.contains(start) {
        return Err(Error::InvalidState(
            "start state is outside the program universe".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ids = program.action_ids();
    let mut cursor = 0usize;
    let mut states = vec![start.clone()];
    let mut actions = Vec::new();
    let mut seen: HashMap<ProgramState, usize> = HashMap::from([(start.clone(), 0)]);
    let mut lasso = None;
    let mut terminal = false;
    for _ in 0..steps {
        let cur = states.last().expect("nonempty");
        let enabled = program.enabled_actions(cur);
        if enabled.is_empty() {
            terminal = true;
            break;
        }
        let a = match policy {
            Policy::UniformRandom => enabled[rng.gen_range(0..enabled.len())],
            Policy::RoundRobin => {
                let k = (0..ids.len())
                    .map(|d| (cursor + d) % ids.len())
                    .find(|&k| enabled.contains(&ids[k]))
                    .expect("some action is enabled");
                cursor = (k + 1) % ids.len();
                ids[k]
            }
        };
        let next = program.apply(cur, a)?;
        let at = states.len();
        if lasso.is_none() {
            if let Some(&first) = seen.get(&next) {
                lasso = Some((first, at));
            } else {
                seen.insert(next.clone(), at);
            }
        }
        actions.push(a);
        states.push(next);
    }
    if !terminal && program.enabled_actions(states.last().expect("nonempty")).is_empty() {
        terminal = true;
    }
    Ok(Computation {
        states,
        actions,
        lasso,
        terminal,
    })
}

/// Picks a start state uniformly from the universe.
pub fn random_state(program: &Program, seed: u64) -> Result<ProgramState> {
    let size = program.schema().checked_size(u64::MAX)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    Ok(program.state_from_index(rng.gen_range(0..size)))
}

/// Stutter-free image of a computation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecSequence {
    pub states: Vec<SpecState>,
    /// For each image state, the index of the first computation state mapped to it.
    pub origins: Vec<usize>,
    pub stutter_divergent: bool,
}

/// Maps each state and drops consecutive repeats.
///
/// A lasso `(a, b)` stands for the infinite computation `states[..b]` followed by
/// `states[a..b]` forever; it is stutter-divergent iff the loop maps to one state.
/// A lasso whose loop image is not constant contributes its image once.
pub fn image(comp: &Computation, mapping: &StateMapping) -> SpecSequence {
    let end = comp.lasso.map(|(_, b)| b).unwrap_or(comp.states.len());
    let mapped: Vec<SpecState> = comp.states[..end].iter().map(|s| mapping.map(s)).collect();
    let mut states: Vec<SpecState> = Vec::new();
    let mut origins = Vec::new();
    for (i, m) in mapped.iter().enumerate() {
        if states.last() != Some(m) {
            states.push(m.clone());
            origins.push(i);
        }
    }
    let stutter_divergent = match comp.lasso {
        Some((a, _)) => mapped[a..].windows(2).all(|w| w[0] == w[1]),
        None => false,
    };
    SpecSequence {
        states,
        origins,
        stutter_divergent,
    }
}

/// Image of an explicit lasso given as a state list with a loop start; used when
/// a computation is built from a cycle witness rather than a simulation.
pub fn image_of_lasso(states: &[ProgramState], loop_start: usize, mapping: &StateMapping) -> SpecSequence {
    let comp = Computation {
        states: states
            .iter()
            .cloned()
            .chain(std::iter::once(states[loop_start].clone()))
            .collect(),
        actions: Vec::new(),
        lasso: Some((loop_start, states.len())),
        terminal: false,
    };
    image(&comp, mapping)
}
