//! Whole-universe transition systems, cycle and terminal analysis, simulation.

mod induced;
mod scc;
mod sim;
mod ts;

pub use induced::{induced_specification, InducedSpec};
pub use scc::{
    condense, cycle_at, cycle_through, cycles_outside, path, tarjan, terminals, Components, Condensation, Cycle,
};
pub use sim::{image, image_of_lasso, random_state, run, Computation, Policy, SpecSequence};
pub use ts::{Edge, TransitionSystem};
