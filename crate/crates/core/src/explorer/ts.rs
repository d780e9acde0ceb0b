use rayon::prelude::*;

use crate::error::Result;
use crate::kernel::{state_cap, ActionId, Program, ProgramState};

/// Explicit transition graph over the entire universe of a program.
///
/// Nodes are universe indices in canonical order. Edges are stored in CSR form,
/// per source in canonical action order.
#[derive(Debug, Clone)]
pub struct TransitionSystem {
    program: Program,
    offsets: Vec<usize>,
    targets: Vec<usize>,
    /// Index into `program.action_ids()` per edge.
    labels: Vec<u32>,
}

/// One labeled edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub from: usize,
    pub action: ActionId,
    pub to: usize,
}

impl TransitionSystem {
    pub fn build(program: &Program) -> Result<Self> {
        Self::build_with_cap(program, state_cap())
    }

    pub fn build_with_cap(program: &Program, cap: u64) -> Result<Self> {
        let size = program.schema().checked_size(cap)?;
        let actions = program.action_ids();
        let rows: Vec<Vec<(u32, usize)>> = (0..size)
            .into_par_iter()
            .map(|i| {
                let s = program.state_from_index(i);
                actions
                    .iter()
                    .enumerate()
                    .filter(|(_, &a)| program.is_enabled(&s, a))
                    .map(|(k, &a)| (k as u32, program.index_of(&program.apply_unchecked(&s, a)) as usize))
                    .collect()
            })
            .collect();
        let mut offsets = Vec::with_capacity(rows.len() + 1);
        let edge_count: usize = rows.iter().map(Vec::len).sum();
        let mut targets = Vec::with_capacity(edge_count);
        let mut labels = Vec::with_capacity(edge_count);
        offsets.push(0);
        for row in rows {
            for (l, t) in row {
                labels.push(l);
                targets.push(t);
            }
            offsets.push(targets.len());
        }
        Ok(Self {
            program: program.clone(),
            offsets,
            targets,
            labels,
        })
    }

    pub fn program(&self) -> &Program {
        &self.program
    }

    /// Number of nodes (the universe size).
    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len()
    }

    pub fn state(&self, i: usize) -> ProgramState {
        self.program.state_from_index(i as u64)
    }

    pub fn index_of(&self, s: &ProgramState) -> usize {
        self.program.index_of(s) as usize
    }

    pub fn render(&self, i: usize) -> String {
        self.program.render_state(&self.state(i))
    }

    /// Successor indices of `i`, one per enabled action.
    pub fn succ(&self, i: usize) -> &[usize] {
        &self.targets[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn out_degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn edges_from(&self, i: usize) -> impl Iterator<Item = Edge> + '_ {
        let ids = self.program.action_ids();
        (self.offsets[i]..self.offsets[i + 1]).map(move |e| Edge {
            from: i,
            action: ids[self.labels[e] as usize],
            to: self.targets[e],
        })
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        (0..self.len()).flat_map(move |i| self.edges_from(i))
    }

    /// Evaluates a predicate on every node.
    pub fn mask<F>(&self, pred: F) -> Vec<bool>
    where
        F: Fn(&ProgramState) -> bool + Sync,
    {
        (0..self.len()).into_par_iter().map(|i| pred(&self.state(i))).collect()
    }

    /// Reverse adjacency, for backward reachability.
    pub fn predecessors(&self) -> Vec<Vec<usize>> {
        let mut pred = vec![Vec::new(); self.len()];
        for i in 0..self.len() {
            for &t in self.succ(i) {
                pred[t].push(i);
            }
        }
        pred
    }
}
