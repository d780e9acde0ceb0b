//! Program-to-specification state mappings and the merge-closure engine.

mod merge;
mod state_mapping;
mod stateset;

pub use merge::{
    check_ideal_possibility, check_ideal_possibility_subset, check_merge_symmetry, donors, image_of_universe,
    merge_closure, MergeSymmetry, Possibility,
};
pub use state_mapping::{in_schema, CustomMap, MappingKind, Rule, StateMapping};
pub use stateset::{infer_schema, read_states, write_states};
