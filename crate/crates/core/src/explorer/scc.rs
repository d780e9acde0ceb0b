use std::collections::VecDeque;

use super::ts::{Edge, TransitionSystem};
use crate::kernel::ActionId;

/// Strongly connected components of a graph over `0..n`.
///
/// Components are numbered by their smallest member; member lists are sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Components {
    pub comp_of: Vec<usize>,
    pub members: Vec<Vec<usize>>,
}

impl Components {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Iterative Tarjan.
pub fn tarjan<I, F>(n: usize, succ: F) -> Components
where
    F: Fn(usize) -> I,
    I: Iterator<Item = usize>,
{
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut raw_of = vec![UNSEEN; n];
    let mut raw_count = 0;
    let mut next = 0;
    let mut frames: Vec<(usize, I)> = Vec::new();

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        frames.push((root, succ(root)));
        while let Some((v, it)) = frames.last_mut() {
            let v = *v;
            if let Some(w) = it.next() {
                if index[w] == UNSEEN {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    frames.push((w, succ(w)));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            frames.pop();
            if let Some((u, _)) = frames.last() {
                low[*u] = low[*u].min(low[v]);
            }
            if low[v] == index[v] {
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    raw_of[w] = raw_count;
                    if w == v {
                        break;
                    }
                }
                raw_count += 1;
            }
        }
    }

    // renumber by smallest member; scanning nodes in order visits those first
    let mut renumber = vec![UNSEEN; raw_count];
    let mut members: Vec<Vec<usize>> = Vec::with_capacity(raw_count);
    let mut comp_of = vec![0; n];
    for v in 0..n {
        let r = raw_of[v];
        if renumber[r] == UNSEEN {
            renumber[r] = members.len();
            members.push(Vec::new());
        }
        comp_of[v] = renumber[r];
        members[renumber[r]].push(v);
    }
    Components { comp_of, members }
}

/// SCC condensation of a transition system.
#[derive(Debug, Clone)]
pub struct Condensation {
    pub components: Components,
    /// Singleton components without a self-loop.
    pub trivial: Vec<bool>,
    /// Sorted, deduplicated successor components.
    pub dag: Vec<Vec<usize>>,
}

impl Condensation {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn members(&self, c: usize) -> &[usize] {
        &self.components.members[c]
    }

    pub fn comp_of(&self, v: usize) -> usize {
        self.components.comp_of[v]
    }

    pub fn is_bottom(&self, c: usize) -> bool {
        self.dag[c].is_empty()
    }

    /// Components without outgoing edges.
    pub fn bottoms(&self) -> Vec<usize> {
        (0..self.len()).filter(|&c| self.is_bottom(c)).collect()
    }

    /// Components in a topological order of the DAG (sources first).
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let mut indeg = vec![0usize; self.len()];
        for outs in &self.dag {
            for &d in outs {
                indeg[d] += 1;
            }
        }
        let mut queue: VecDeque<usize> = (0..self.len()).filter(|&c| indeg[c] == 0).collect();
        let mut order = Vec::with_capacity(self.len());
        while let Some(c) = queue.pop_front() {
            order.push(c);
            for &d in &self.dag[c] {
                indeg[d] -= 1;
                if indeg[d] == 0 {
                    queue.push_back(d);
                }
            }
        }
        (order.len() == self.len()).then_some(order)
    }
}

pub fn condense(ts: &TransitionSystem) -> Condensation {
    let components = tarjan(ts.len(), |v| ts.succ(v).iter().copied());
    let k = components.len();
    let mut trivial = vec![false; k];
    let mut dag = vec![Vec::new(); k];
    for c in 0..k {
        let m = &components.members[c];
        trivial[c] = m.len() == 1 && !ts.succ(m[0]).contains(&m[0]);
        for &v in m {
            for &w in ts.succ(v) {
                let d = components.comp_of[w];
                if d != c {
                    dag[c].push(d);
                }
            }
        }
        dag[c].sort_unstable();
        dag[c].dedup();
    }
    Condensation {
        components,
        trivial,
        dag,
    }
}

/// States with no enabled action.
pub fn terminals(ts: &TransitionSystem) -> Vec<usize> {
    (0..ts.len()).filter(|&i| ts.out_degree(i) == 0).collect()
}

/// A closed walk: `actions[i]` leads from `states[i]` to `states[(i + 1) % len]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cycle {
    pub states: Vec<usize>,
    pub actions: Vec<ActionId>,
}

impl Cycle {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        (0..self.len()).map(move |i| Edge {
            from: self.states[i],
            action: self.actions[i],
            to: self.states[(i + 1) % self.len()],
        })
    }
}

/// Shortest path from `from` to `to` over edges accepted by `allow`.
/// Returns the visited states (starting at `from`, excluding `to`) and the actions taken.
pub fn path<F>(ts: &TransitionSystem, from: usize, to: usize, allow: F) -> Option<(Vec<usize>, Vec<ActionId>)>
where
    F: Fn(&Edge) -> bool,
{
    if from == to {
        return Some((Vec::new(), Vec::new()));
    }
    let mut parent: Vec<Option<Edge>> = vec![None; ts.len()];
    let mut seen = vec![false; ts.len()];
    seen[from] = true;
    let mut queue = VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        for e in ts.edges_from(v) {
            if seen[e.to] || !allow(&e) {
                continue;
            }
            seen[e.to] = true;
            parent[e.to] = Some(e);
            if e.to == to {
                let mut states = Vec::new();
                let mut actions = Vec::new();
                let mut cur = to;
                while let Some(p) = parent[cur] {
                    states.push(p.from);
                    actions.push(p.action);
                    cur = p.from;
                }
                states.reverse();
                actions.reverse();
                return Some((states, actions));
            }
            queue.push_back(e.to);
        }
    }
    None
}

/// A cycle that starts with `edge` and otherwise uses edges accepted by `allow`.
pub fn cycle_through<F>(ts: &TransitionSystem, edge: Edge, allow: F) -> Option<Cycle>
where
    F: Fn(&Edge) -> bool,
{
    let (mut rest_states, mut rest_actions) = path(ts, edge.to, edge.from, allow)?;
    let mut states = vec![edge.from];
    let mut actions = vec![edge.action];
    states.append(&mut rest_states);
    actions.append(&mut rest_actions);
    Some(Cycle { states, actions })
}

/// Some cycle through `v` using only accepted edges, preferring the shortest.
pub fn cycle_at<F>(ts: &TransitionSystem, v: usize, allow: F) -> Option<Cycle>
where
    F: Fn(&Edge) -> bool,
{
    ts.edges_from(v)
        .filter(|e| allow(e))
        .filter_map(|e| cycle_through(ts, e, &allow))
        .min_by_key(Cycle::len)
}

/// A cycle all of whose states lie outside `inside`, if any exists.
///
/// Under no fairness such a cycle is exactly a computation that never reaches `inside`.
pub fn cycles_outside(ts: &TransitionSystem, inside: &[bool]) -> Option<Cycle> {
    let comps = tarjan(ts.len(), |v| {
        let keep = !inside[v];
        ts.succ(v).iter().copied().filter(move |&w| keep && !inside[w])
    });
    let allow = |e: &Edge| !inside[e.from] && !inside[e.to];
    comps.members.iter().filter(|m| !inside[m[0]]).find_map(|m| {
        if m.len() == 1 && !ts.succ(m[0]).contains(&m[0]) {
            return None;
        }
        cycle_at(ts, m[0], allow)
    })
}
