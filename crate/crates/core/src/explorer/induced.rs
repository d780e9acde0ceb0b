use std::collections::{BTreeMap, BTreeSet};

use super::ts::TransitionSystem;
use crate::kernel::SpecState;
use crate::mapping::StateMapping;

/// Image of a transition system under a mapping, with stutter edges dropped.
///
/// The program ideally stabilizes to the specification whose sequences are the
/// maximal paths of this graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedSpec {
    pub nodes: Vec<SpecState>,
    pub edges: BTreeSet<(usize, usize)>,
}

impl InducedSpec {
    pub fn index_of(&self, s: &SpecState) -> Option<usize> {
        self.nodes.binary_search(s).ok()
    }

    pub fn has_edge(&self, from: &SpecState, to: &SpecState) -> bool {
        match (self.index_of(from), self.index_of(to)) {
            (Some(a), Some(b)) => self.edges.contains(&(a, b)),
            _ => false,
        }
    }
}

pub fn induced_specification(ts: &TransitionSystem, mapping: &StateMapping) -> InducedSpec {
    let images: Vec<SpecState> = (0..ts.len()).map(|i| mapping.map(&ts.state(i))).collect();
    let nodes: BTreeSet<SpecState> = images.iter().cloned().collect();
    let nodes: Vec<SpecState> = nodes.into_iter().collect();
    let index: BTreeMap<&SpecState, usize> = nodes.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let mut edges = BTreeSet::new();
    for e in ts.edges() {
        let (a, b) = (index[&images[e.from]], index[&images[e.to]]);
        if a != b {
            edges.insert((a, b));
        }
    }
    InducedSpec { nodes, edges }
}
