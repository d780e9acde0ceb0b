//! Independent oracles shared by the integration tests. None of them call the
//! explorer or the merge engine.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::Arc;

use stabiliq::kernel::{Domain, Program, ProgramState, Schema, Slot, SpecState, Value, VarKind};

/// Slot indices a process at `p` can observe, from slot positions alone.
pub fn window_slots(schema: &Schema, p: usize) -> Vec<usize> {
    (0..schema.len())
        .filter(|&i| schema.slot(i).position.abs_diff(p) <= 1)
        .collect()
}

/// Repeats single merge steps over the whole universe until nothing changes.
pub fn brute_merge_closure(schema: &Schema, set: &BTreeSet<SpecState>) -> BTreeSet<SpecState> {
    let windows: Vec<Vec<usize>> = (1..=schema.n()).map(|p| window_slots(schema, p)).collect();
    let project = |v: &[Value], w: &[usize]| w.iter().map(|&i| v[i]).collect::<Vec<Value>>();
    let mut cur = set.clone();
    loop {
        let seen: Vec<HashSet<Vec<Value>>> = windows
            .iter()
            .map(|w| cur.iter().map(|s| project(s.values(), w)).collect())
            .collect();
        let next: BTreeSet<SpecState> = schema
            .iter_universe()
            .filter(|v| windows.iter().zip(&seen).all(|(w, s)| s.contains(&project(v, w))))
            .map(SpecState::from_values)
            .chain(cur.iter().cloned())
            .collect();
        if next == cur {
            return cur;
        }
        cur = next;
    }
}

/// Whether every maximal computation from every state reaches `p`, found by
/// exploring paths with the kernel directly. A gray state revisited on the
/// current path closes a lasso outside `p`.
pub fn converges(program: &Program, p: &dyn Fn(&ProgramState) -> bool) -> bool {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Gray,
        Black,
    }
    fn visit(
        program: &Program,
        p: &dyn Fn(&ProgramState) -> bool,
        s: &ProgramState,
        marks: &mut HashMap<ProgramState, Mark>,
    ) -> bool {
        if p(s) {
            return true;
        }
        match marks.get(s) {
            Some(Mark::Gray) => return false,
            Some(Mark::Black) => return true,
            None => {}
        }
        let succ = program.successors(s);
        if succ.is_empty() {
            return false;
        }
        marks.insert(s.clone(), Mark::Gray);
        for (_, t) in succ {
            if !visit(program, p, &t, marks) {
                return false;
            }
        }
        marks.insert(s.clone(), Mark::Black);
        true
    }
    let size = program.universe_size().unwrap() as u64;
    let mut marks = HashMap::new();
    (0..size).all(|i| visit(program, p, &program.state_from_index(i), &mut marks))
}

/// Text of each variable value, in slot order.
pub fn texts(schema: &Schema, values: &[Value]) -> Vec<String> {
    values
        .iter()
        .enumerate()
        .map(|(i, &v)| schema.slot(i).domain.values()[usize::from(v)].clone())
        .collect()
}

/// `in` bits of the conflict manager, recomputed from `access` and identifiers.
pub fn cm_in(access: &[bool], ids: &[i64]) -> Vec<bool> {
    let n = access.len();
    (0..n)
        .map(|p| {
            access[p]
                && [p.wrapping_sub(1), p + 1]
                    .iter()
                    .filter(|&&q| q < n && access[q])
                    .all(|&q| ids[q] < ids[p])
        })
        .collect()
}

/// `rq* i+ rp*` or `rq+ rp+`.
pub fn pif_legitimate(st: &[String]) -> bool {
    let rq = st.iter().take_while(|s| *s == "rq").count();
    let idle = st[rq..].iter().take_while(|s| *s == "i").count();
    let rp = st[rq + idle..].iter().take_while(|s| *s == "rp").count();
    rq + idle + rp == st.len() && (idle > 0 || (rq > 0 && rp > 0))
}

/// Boolean output slots spread over `n` positions, `per[p]` at position `p + 1`.
pub fn bool_schema(per: &[usize]) -> Schema {
    let b: Arc<Domain> = Domain::shared_bool();
    let slots = per
        .iter()
        .enumerate()
        .flat_map(|(p, &k)| {
            let b = b.clone();
            (0..k).map(move |j| Slot {
                position: p + 1,
                name: format!("v{j}"),
                domain: b.clone(),
                kind: VarKind::Output,
            })
        })
        .collect();
    Schema::new(per.len(), slots).unwrap()
}
