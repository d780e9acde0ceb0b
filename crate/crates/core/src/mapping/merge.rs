use std::collections::{BTreeSet, HashSet};
use std::ops::Range;

use rayon::prelude::*;

use super::state_mapping::StateMapping;
use crate::error::{Error, Result};
use crate::kernel::{state_cap, Schema, SpecState, Value};

/// Per-process windows of a signature: own slots plus both neighbors' slots.
fn windows(schema: &Schema) -> Vec<Range<usize>> {
    (1..=schema.n()).map(|p| schema.window(p)).collect()
}

/// All states assembled by picking, for every process, a window that occurs in
/// some member of `set`, with overlapping windows agreeing.
///
/// This is the merge closure of `set`. A single pass reaches the fixpoint: every
/// window of a merged state already occurs in `set`, so merging merged states
/// produces nothing new.
pub fn merge_closure(schema: &Schema, set: &BTreeSet<SpecState>) -> BTreeSet<SpecState> {
    let n = schema.n();
    if set.is_empty() || n == 0 {
        return set.clone();
    }
    let wins = windows(schema);
    let present: Vec<HashSet<&[Value]>> = wins
        .iter()
        .map(|w| set.iter().map(|s| &s.values()[w.clone()]).collect())
        .collect();
    // windows of process p+1 restricted to positions p and p+1, for pruning
    let prefix: Vec<HashSet<&[Value]>> = (1..=n)
        .map(|p| {
            let r = wins[p - 1].start..schema.slots_at(p).end;
            set.iter().map(|s| &s.values()[r.clone()]).collect()
        })
        .collect();
    let locals: Vec<Vec<Vec<Value>>> = (1..=n)
        .map(|p| {
            let r = schema.slots_at(p);
            let uniq: BTreeSet<&[Value]> = set.iter().map(|s| &s.values()[r.clone()]).collect();
            uniq.into_iter().map(<[Value]>::to_vec).collect()
        })
        .collect();

    let mut out = BTreeSet::new();
    let mut buf = vec![0; schema.len()];
    let ctx = Dfs {
        schema,
        wins: &wins,
        present: &present,
        prefix: &prefix,
        locals: &locals,
    };
    ctx.extend(1, &mut buf, &mut out);
    out
}

struct Dfs<'a> {
    schema: &'a Schema,
    wins: &'a [Range<usize>],
    present: &'a [HashSet<&'a [Value]>],
    prefix: &'a [HashSet<&'a [Value]>],
    locals: &'a [Vec<Vec<Value>>],
}

impl Dfs<'_> {
    fn extend(&self, p: usize, buf: &mut [Value], out: &mut BTreeSet<SpecState>) {
        let n = self.schema.n();
        let own = self.schema.slots_at(p);
        for local in &self.locals[p - 1] {
            buf[own.clone()].copy_from_slice(local);
            // the window of p-1 is now complete
            if p > 1 && !self.present[p - 2].contains(&buf[self.wins[p - 2].clone()]) {
                continue;
            }
            let pre = self.wins[p - 1].start..own.end;
            if !self.prefix[p - 1].contains(&buf[pre]) {
                continue;
            }
            if p == n {
                if self.present[n - 1].contains(&buf[self.wins[n - 1].clone()]) {
                    out.insert(SpecState::from_values(buf.to_vec()));
                }
            } else {
                self.extend(p + 1, buf, out);
            }
        }
    }
}

/// For each process, the first member of `set` whose window agrees with `state`.
pub fn donors(schema: &Schema, set: &BTreeSet<SpecState>, state: &SpecState) -> Vec<Option<SpecState>> {
    windows(schema)
        .into_iter()
        .map(|w| {
            set.iter()
                .find(|s| s.values()[w.clone()] == state.values()[w.clone()])
                .cloned()
        })
        .collect()
}

/// Outcome of a merge-symmetry check.
#[derive(Debug, Clone)]
pub struct MergeSymmetry {
    pub holds: bool,
    pub image_size: usize,
    pub closure_size: usize,
    /// A merged state without a preimage.
    pub witness: Option<SpecState>,
    pub donors: Vec<Option<SpecState>>,
}

/// Image of the whole program universe under the mapping.
pub fn image_of_universe(mapping: &StateMapping) -> Result<BTreeSet<SpecState>> {
    let program = mapping.program();
    let size = program.schema().checked_size(state_cap())?;
    let chunks: Vec<BTreeSet<SpecState>> = (0..size)
        .into_par_iter()
        .fold(BTreeSet::new, |mut acc, i| {
            acc.insert(mapping.map(&program.state_from_index(i)));
            acc
        })
        .collect();
    Ok(chunks.into_iter().flatten().collect())
}

/// Checks that every state merged from `spec_states` has a program preimage.
/// `spec_states` defaults to the image of the universe.
pub fn check_merge_symmetry(
    mapping: &StateMapping,
    spec_states: Option<&BTreeSet<SpecState>>,
) -> Result<MergeSymmetry> {
    let image = image_of_universe(mapping)?;
    let base = spec_states.unwrap_or(&image);
    let schema = mapping.target();
    let closure = merge_closure(schema, base);
    let witness = closure.iter().find(|s| !image.contains(s)).cloned();
    let donors = witness.as_ref().map(|w| donors(schema, base, w)).unwrap_or_default();
    Ok(MergeSymmetry {
        holds: witness.is_none(),
        image_size: image.len(),
        closure_size: closure.len(),
        witness,
        donors,
    })
}

/// Outcome of the necessary-condition test for ideal stabilization.
#[derive(Debug, Clone)]
pub struct Possibility {
    pub possible: bool,
    /// Size of the set that was closed.
    pub base_size: usize,
    pub closure_size: usize,
    /// A disallowed state in the closure, with one donor per process.
    pub witness: Option<SpecState>,
    pub donors: Vec<Option<SpecState>>,
}

fn validate_partition(schema: &Schema, allowed: &BTreeSet<SpecState>, disallowed: &BTreeSet<SpecState>) -> Result<()> {
    if let Some(s) = allowed.iter().chain(disallowed).find(|s| !schema.contains(s.values())) {
        return Err(Error::Partition(format!(
            "{} is not a state of the signature",
            schema.render(s.values())
        )));
    }
    if let Some(s) = allowed.intersection(disallowed).next() {
        return Err(Error::Partition(format!(
            "{} is both allowed and disallowed",
            schema.render(s.values())
        )));
    }
    let size = schema.checked_size(state_cap())?;
    if (allowed.len() + disallowed.len()) as u64 != size {
        let missing = schema
            .iter_universe()
            .map(SpecState::from_values)
            .find(|s| !allowed.contains(s) && !disallowed.contains(s))
            .map(|s| schema.render(s.values()))
            .unwrap_or_default();
        return Err(Error::Partition(format!(
            "allowed and disallowed sets cover {} of {size} states; e.g. {missing} is in neither",
            allowed.len() + disallowed.len()
        )));
    }
    Ok(())
}

/// Impossible iff the merge closure of `allowed` meets `disallowed`.
pub fn check_ideal_possibility(
    schema: &Schema,
    allowed: &BTreeSet<SpecState>,
    disallowed: &BTreeSet<SpecState>,
) -> Result<Possibility> {
    check_ideal_possibility_subset(schema, allowed, allowed, disallowed)
}

/// As [`check_ideal_possibility`], closing only `subset` (for example the states
/// forced into every input-complete subset) after validating the partition.
pub fn check_ideal_possibility_subset(
    schema: &Schema,
    subset: &BTreeSet<SpecState>,
    allowed: &BTreeSet<SpecState>,
    disallowed: &BTreeSet<SpecState>,
) -> Result<Possibility> {
    validate_partition(schema, allowed, disallowed)?;
    if allowed.is_empty() {
        return Err(Error::Partition("allowed set is empty".into()));
    }
    if let Some(s) = subset.iter().find(|s| !allowed.contains(s)) {
        return Err(Error::Partition(format!(
            "{} is closed over but not allowed",
            schema.render(s.values())
        )));
    }
    let closure = merge_closure(schema, subset);
    let witness = closure.iter().find(|s| disallowed.contains(s)).cloned();
    let donors = witness.as_ref().map(|w| donors(schema, subset, w)).unwrap_or_default();
    Ok(Possibility {
        possible: witness.is_none(),
        base_size: subset.len(),
        closure_size: closure.len(),
        witness,
        donors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapping::in_schema;

    fn st(bits: &[u8]) -> SpecState {
        SpecState::from_values(bits.to_vec())
    }

    #[test]
    fn singleton_is_closed() {
        let schema = in_schema(4).unwrap();
        let set = BTreeSet::from([st(&[1, 0, 1, 0])]);
        assert_eq!(merge_closure(&schema, &set), set);
    }

    #[test]
    fn far_apart_windows_merge() {
        let schema = in_schema(4).unwrap();
        let set = BTreeSet::from([st(&[1, 0, 0, 0]), st(&[0, 0, 0, 1])]);
        let c = merge_closure(&schema, &set);
        assert!(c.contains(&st(&[1, 0, 0, 1])));
        assert!(c.contains(&st(&[0, 0, 0, 0])));
        assert_eq!(c.len(), 4);
    }

    #[test]
    fn partition_is_validated() {
        let schema = in_schema(2).unwrap();
        let a = BTreeSet::from([st(&[0, 0])]);
        let d = BTreeSet::from([st(&[1, 1])]);
        assert!(matches!(
            check_ideal_possibility(&schema, &a, &d),
            Err(Error::Partition(_))
        ));
        let d = BTreeSet::from([st(&[0, 0]), st(&[1, 1]), st(&[0, 1]), st(&[1, 0])]);
        assert!(matches!(
            check_ideal_possibility(&schema, &a, &d),
            Err(Error::Partition(_))
        ));
    }
}
