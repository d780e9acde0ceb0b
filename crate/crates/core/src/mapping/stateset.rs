//! Line-oriented spec-state sets: one state per line as `label=value` pairs,
//! `#` starts a comment, blank lines are ignored.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::kernel::{Domain, Schema, Slot, SpecState, VarKind};

fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

pub fn read_states(schema: &Schema, text: &str) -> Result<BTreeSet<SpecState>> {
    lines(text)
        .map(|(no, l)| {
            schema
                .parse(&qualify(schema, l))
                .map(SpecState::from_values)
                .map_err(|e| Error::InvalidArgument(format!("line {no}: {e}")))
        })
        .collect()
}

/// Bare labels name the variable at position 1, as `infer_schema` places them.
fn qualify(schema: &Schema, line: &str) -> String {
    line.split_whitespace()
        .map(|pair| match pair.split_once('=') {
            Some((label, value)) if !label.contains('.') && schema.slot_by_label(label).is_none() => {
                format!("{label}.1={value}")
            }
            _ => pair.to_string(),
        })
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn write_states<'a>(schema: &Schema, states: impl IntoIterator<Item = &'a SpecState>) -> String {
    let mut out = String::new();
    for s in states {
        out.push_str(&schema.render(s.values()));
        out.push('\n');
    }
    out
}

/// Infers a signature from the labels and values used in state-set texts.
///
/// `name.pos` labels place a variable at a chain position; bare names sit at
/// position 1. A variable whose values are all `0`/`1` is boolean, otherwise its
/// domain is the sorted set of observed values.
pub fn infer_schema(texts: &[&str]) -> Result<Schema> {
    let mut vars: BTreeMap<(usize, String), BTreeSet<String>> = BTreeMap::new();
    for text in texts {
        for (no, l) in lines(text) {
            for pair in l.split_whitespace() {
                let (label, value) = pair
                    .split_once('=')
                    .ok_or_else(|| Error::InvalidArgument(format!("line {no}: expected label=value, got `{pair}`")))?;
                let (name, pos) = match label.rsplit_once('.') {
                    Some((name, pos)) => {
                        let pos: usize =
                            pos.parse().ok().filter(|&p| p >= 1).ok_or_else(|| {
                                Error::InvalidArgument(format!("line {no}: bad position in `{label}`"))
                            })?;
                        (name.to_string(), pos)
                    }
                    None => (label.to_string(), 1),
                };
                vars.entry((pos, name)).or_default().insert(value.to_string());
            }
        }
    }
    if vars.is_empty() {
        return Err(Error::InvalidArgument("no states to infer a signature from".into()));
    }
    let n = vars.keys().map(|(p, _)| *p).max().unwrap_or(1);
    let slots = vars
        .into_iter()
        .map(|((position, name), values)| {
            let domain = if values.iter().all(|v| v == "0" || v == "1") {
                Domain::shared_bool()
            } else {
                Arc::new(Domain::new(name.clone(), values)?)
            };
            Ok(Slot {
                position,
                name,
                domain,
                kind: VarKind::Output,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Schema::new(n, slots)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_through_text() {
        let text = "# two states\nin.1=1 in.2=0\n\nin.1=0 in.2=0  # trailing\n";
        let schema = infer_schema(&[text]).unwrap();
        assert_eq!(schema.n(), 2);
        let set = read_states(&schema, text).unwrap();
        assert_eq!(set.len(), 2);
        let again = read_states(&schema, &write_states(&schema, &set)).unwrap();
        assert_eq!(again, set);
    }

    #[test]
    fn bare_labels_sit_at_position_one() {
        let schema = infer_schema(&["x=1", "x=0"]).unwrap();
        assert_eq!(schema.n(), 1);
        assert_eq!(read_states(&schema, "x=1\nx=0").unwrap().len(), 2);
    }

    #[test]
    fn reports_bad_lines() {
        let schema = infer_schema(&["in.1=0 in.2=1"]).unwrap();
        let err = read_states(&schema, "in.1=0 in.2=1\nin.1=7 in.2=1").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }
}
