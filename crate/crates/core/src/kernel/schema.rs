//! Variable layouts shared by program states and specification states.
//!
//! A [`Schema`] fixes the order of variables (chain position major, declaration
//! order minor). States are value vectors in that order and are encoded as a
//! mixed-radix integer with the first variable most significant, so that the
//! numeric order of encodings is the lexicographic order of value vectors.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::domain::{Domain, Value};
use crate::error::{Error, Result};

pub const DEFAULT_STATE_CAP: u64 = 10_000_000;
pub const STATE_CAP_ENV: &str = "STABILIQ_STATE_CAP";

/// Universe cap from `STABILIQ_STATE_CAP`, or the default of 10^7 states.
pub fn state_cap() -> u64 {
    std::env::var(STATE_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_STATE_CAP)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VarKind {
    Internal,
    Input,
    Output,
    /// An output slot that chain neighbors may also assign (unit-capacity channel).
    Channel,
}

impl VarKind {
    pub fn is_external(self) -> bool {
        !matches!(self, VarKind::Internal)
    }

    pub fn keyword(self) -> &'static str {
        match self {
            VarKind::Internal => "var",
            VarKind::Input => "input",
            VarKind::Output => "output",
            VarKind::Channel => "channel",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Slot {
    pub position: usize,
    pub name: String,
    pub domain: Arc<Domain>,
    pub kind: VarKind,
}

#[derive(Debug, Clone)]
pub struct Schema {
    n: usize,
    slots: Vec<Slot>,
    labels: Vec<String>,
    by_label: HashMap<String, usize>,
    by_pos_name: HashMap<(usize, String), usize>,
    first_at: Vec<usize>,
}

impl PartialEq for Schema {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.slots == other.slots
    }
}

impl Eq for Schema {}

impl Schema {
    /// Builds a schema over positions `1..=n`. Slots must be sorted by position.
    pub fn new(n: usize, slots: Vec<Slot>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("a chain needs at least one process".into()));
        }
        let mut by_pos_name = HashMap::new();
        let mut prev = 1;
        for (i, s) in slots.iter().enumerate() {
            if s.position == 0 || s.position > n || s.position < prev {
                return Err(Error::InvalidArgument(format!(
                    "slot `{}` has position {} outside the ordered chain 1..{n}",
                    s.name, s.position
                )));
            }
            prev = s.position;
            if by_pos_name.insert((s.position, s.name.clone()), i).is_some() {
                return Err(Error::InvalidArgument(format!(
                    "variable `{}` declared twice at position {}",
                    s.name, s.position
                )));
            }
        }
        let mut name_count: HashMap<&str, usize> = HashMap::new();
        for s in &slots {
            *name_count.entry(s.name.as_str()).or_default() += 1;
        }
        let labels: Vec<String> = slots
            .iter()
            .map(|s| {
                if name_count[s.name.as_str()] == 1 && n > 1 {
                    s.name.clone()
                } else {
                    format!("{}.{}", s.name, s.position)
                }
            })
            .collect();
        let by_label = labels.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect();
        // first_at[p]: index of the first slot at position >= p
        let first_at = (0..=n + 1)
            .map(|p| slots.iter().position(|s| s.position >= p).unwrap_or(slots.len()))
            .collect();
        Ok(Self {
            n,
            slots,
            labels,
            by_label,
            by_pos_name,
            first_at,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn slot(&self, i: usize) -> &Slot {
        &self.slots[i]
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn slot_by_label(&self, label: &str) -> Option<usize> {
        self.by_label.get(label).copied()
    }

    pub fn find(&self, position: usize, name: &str) -> Option<usize> {
        self.by_pos_name.get(&(position, name.to_string())).copied()
    }

    /// Slot indices owned by the process at `position`.
    pub fn slots_at(&self, position: usize) -> std::ops::Range<usize> {
        self.first_at[position]..self.first_at[position + 1]
    }

    /// Slot indices of the extended neighborhood of `position`: its own slots
    /// and those of its chain neighbors.
    pub fn window(&self, position: usize) -> std::ops::Range<usize> {
        let lo = position.saturating_sub(1).max(1);
        let hi = (position + 1).min(self.n);
        self.first_at[lo]..self.first_at[hi + 1]
    }

    /// Number of states in the Cartesian product, or `None` on overflow.
    pub fn universe_size(&self) -> Option<u128> {
        self.slots
            .iter()
            .try_fold(1u128, |acc, s| acc.checked_mul(s.domain.size() as u128))
    }

    /// Universe size as a `u64`, refusing universes above `cap`.
    pub fn checked_size(&self, cap: u64) -> Result<u64> {
        match self.universe_size() {
            Some(size) if size <= u128::from(cap) => Ok(size as u64),
            Some(size) => Err(Error::StateCap { size, cap }),
            None => Err(Error::StateCap { size: u128::MAX, cap }),
        }
    }

    pub fn encode(&self, values: &[Value]) -> u64 {
        debug_assert_eq!(values.len(), self.slots.len());
        values
            .iter()
            .zip(&self.slots)
            .fold(0u64, |acc, (&v, s)| acc * s.domain.size() as u64 + u64::from(v))
    }

    pub fn decode(&self, mut index: u64) -> Vec<Value> {
        let mut out = vec![0; self.slots.len()];
        for (i, s) in self.slots.iter().enumerate().rev() {
            let r = s.domain.size() as u64;
            out[i] = (index % r) as Value;
            index /= r;
        }
        out
    }

    pub fn contains(&self, values: &[Value]) -> bool {
        values.len() == self.slots.len()
            && values
                .iter()
                .zip(&self.slots)
                .all(|(&v, s)| usize::from(v) < s.domain.size())
    }

    /// Canonical text: space-separated `label=value` pairs in slot order.
    pub fn render(&self, values: &[Value]) -> String {
        let mut out = String::new();
        for (i, (&v, s)) in values.iter().zip(&self.slots).enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push_str(&self.labels[i]);
            out.push('=');
            out.push_str(s.domain.text(v));
        }
        out
    }

    /// Compact tuple form, e.g. `<rq,rp,i,rp>`.
    pub fn render_tuple(&self, values: &[Value]) -> String {
        let parts: Vec<&str> = values.iter().zip(&self.slots).map(|(&v, s)| s.domain.text(v)).collect();
        format!("<{}>", parts.join(","))
    }

    /// Parses either the canonical `label=value` form (any order, every
    /// variable exactly once) or a comma-separated value list in slot order.
    pub fn parse(&self, text: &str) -> Result<Vec<Value>> {
        let text = text.trim();
        if text.contains('=') {
            self.parse_pairs(text)
        } else {
            self.parse_tuple(text)
        }
    }

    fn parse_pairs(&self, text: &str) -> Result<Vec<Value>> {
        let mut out: Vec<Option<Value>> = vec![None; self.slots.len()];
        for pair in text
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|p| !p.is_empty())
        {
            let (label, value) = pair
                .split_once('=')
                .ok_or_else(|| Error::InvalidState(format!("expected `var=value`, found `{pair}`")))?;
            let i = *self
                .by_label
                .get(label)
                .or_else(|| self.by_label.get(&label.replace('_', "")))
                .ok_or_else(|| Error::InvalidState(format!("unknown variable `{label}`")))?;
            let v = self.slots[i]
                .domain
                .lookup(value)
                .ok_or_else(|| Error::InvalidState(format!("value `{value}` is not in the domain of `{label}`")))?;
            if out[i].replace(v).is_some() {
                return Err(Error::InvalidState(format!("variable `{label}` assigned twice")));
            }
        }
        out.iter()
            .enumerate()
            .map(|(i, v)| v.ok_or_else(|| Error::InvalidState(format!("variable `{}` not assigned", self.labels[i]))))
            .collect()
    }

    fn parse_tuple(&self, text: &str) -> Result<Vec<Value>> {
        let inner = text
            .trim_start_matches(['<', '(', '[', '⟨'])
            .trim_end_matches(['>', ')', ']', '⟩']);
        let tokens: Vec<&str> = inner.split(',').map(str::trim).filter(|t| !t.is_empty()).collect();
        if tokens.len() != self.slots.len() {
            return Err(Error::InvalidState(format!(
                "expected {} values, found {}",
                self.slots.len(),
                tokens.len()
            )));
        }
        tokens
            .iter()
            .zip(&self.slots)
            .enumerate()
            .map(|(i, (t, s))| {
                s.domain.lookup(t).ok_or_else(|| {
                    Error::InvalidState(format!("value `{t}` is not in the domain of `{}`", self.labels[i]))
                })
            })
            .collect()
    }

    /// Iterates over the whole universe in canonical order.
    pub fn iter_universe(&self) -> impl Iterator<Item = Vec<Value>> + '_ {
        let size = self.universe_size().unwrap_or(0) as u64;
        (0..size).map(move |i| self.decode(i))
    }
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.slots.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}:{}", self.labels[i], s.domain.name())?;
        }
        Ok(())
    }
}

macro_rules! valuation {
    ($(#[$m:meta])* $name:ident) => {
        $(#[$m])*
        #[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name(Vec<Value>);

        impl $name {
            pub fn from_values(values: Vec<Value>) -> Self {
                Self(values)
            }

            pub fn values(&self) -> &[Value] {
                &self.0
            }

            pub fn into_values(self) -> Vec<Value> {
                self.0
            }

            pub fn get(&self, slot: usize) -> Value {
                self.0[slot]
            }
        }

        impl From<Vec<Value>> for $name {
            fn from(v: Vec<Value>) -> Self {
                Self(v)
            }
        }
    };
}

valuation!(
    /// Total assignment of values to every program variable, in schema order.
    ProgramState
);
valuation!(
    /// Assignment of values to the external variables of a specification.
    SpecState
);

#[cfg(test)]
mod tests {
    use super::*;

    fn pif_like() -> Schema {
        let root = Arc::new(Domain::new("r", ["i", "rq"]).unwrap());
        let mid = Arc::new(Domain::new("m", ["i", "rq", "rp"]).unwrap());
        let leaf = Arc::new(Domain::new("l", ["i", "rp"]).unwrap());
        let slot = |p, d: &Arc<Domain>| Slot {
            position: p,
            name: "st".into(),
            domain: d.clone(),
            kind: VarKind::Output,
        };
        Schema::new(4, vec![slot(1, &root), slot(2, &mid), slot(3, &mid), slot(4, &leaf)]).unwrap()
    }

    #[test]
    fn encode_decode_roundtrip_and_order() {
        let s = pif_like();
        assert_eq!(s.universe_size(), Some(36));
        let all: Vec<_> = s.iter_universe().collect();
        for (i, v) in all.iter().enumerate() {
            assert_eq!(s.encode(v), i as u64);
        }
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(sorted, all);
    }

    #[test]
    fn labels_and_parsing() {
        let s = pif_like();
        let v = s.parse("st.1=rq st.2=rp st.3=i st.4=rp").unwrap();
        assert_eq!(s.render(&v), "st.1=rq st.2=rp st.3=i st.4=rp");
        assert_eq!(s.parse("rq,rp,i,rp").unwrap(), v);
        assert_eq!(s.parse("<rq,rp,i,rp>").unwrap(), v);
        assert!(s.parse("st.1=rp st.2=rp st.3=i st.4=rp").is_err());
        assert!(s.parse("st.1=rq st.2=rp st.3=i").is_err());
    }

    #[test]
    fn windows_cover_neighbors() {
        let s = pif_like();
        assert_eq!(s.window(1), 0..2);
        assert_eq!(s.window(2), 0..3);
        assert_eq!(s.window(4), 2..4);
    }

    #[test]
    fn cap_refusal() {
        let s = pif_like();
        assert!(matches!(s.checked_size(10), Err(Error::StateCap { size: 36, cap: 10 })));
        assert_eq!(s.checked_size(36).unwrap(), 36);
    }
}
