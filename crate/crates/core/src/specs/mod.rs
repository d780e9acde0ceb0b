//! Specifications and the closure, convergence and stabilization checkers.

pub mod abp;
mod checks;
mod dining;
pub mod pif;
mod spec;
mod verdict;

pub use checks::{check_closed, check_convergence, check_ideal_stabilizing, check_stabilizing, replay};
pub use dining::{fdp, no_adjacent_in, udp};
pub use spec::{Acceptance, EdgePred, Obligation, Predicate, Specification, StatePred, StutterPolicy};
pub use verdict::{Stats, Verdict, Witness};
