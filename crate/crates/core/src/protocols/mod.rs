//! Built-in protocols bundled with their mappings, specifications and invariants.

mod abp;
mod cm;
mod la;
mod le;
mod pif;

pub use abp::make_abp;
pub use cm::make_cm;
pub use la::make_alternator;
pub use le::{le_spec, make_le, LeFixture};
pub use pif::make_pif;

use crate::kernel::Program;
use crate::mapping::StateMapping;
use crate::specs::{Predicate, Specification};

/// A program with the mapping and specifications it is checked against.
/// The first specification is the primary one.
#[derive(Debug, Clone)]
pub struct ProtocolBundle {
    pub program: Program,
    pub mapping: StateMapping,
    pub specs: Vec<Specification>,
    pub invariants: Vec<Predicate>,
}

impl ProtocolBundle {
    pub fn spec(&self, name: &str) -> Option<&Specification> {
        self.specs.iter().find(|s| s.name.eq_ignore_ascii_case(name))
    }

    pub fn primary_spec(&self) -> &Specification {
        &self.specs[0]
    }

    pub fn invariant(&self, name: &str) -> Option<&Predicate> {
        self.invariants.iter().find(|p| p.name == name)
    }
}

fn check_n(what: &str, n: usize, min: usize) -> crate::Result<()> {
    if n < min {
        return Err(crate::Error::InvalidArgument(format!(
            "{what} needs at least {min} processes, got {n}"
        )));
    }
    Ok(())
}
