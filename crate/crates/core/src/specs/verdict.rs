use serde::Serialize;

/// Concrete evidence for a failed (or, for coverage, noteworthy) check.
/// States are in canonical `label=value` text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    Edge {
        from: String,
        action: String,
        to: String,
        #[serde(skip_serializing_if = "Option::is_none")]
        image: Option<(String, String)>,
    },
    Cycle {
        states: Vec<String>,
        actions: Vec<String>,
        #[serde(skip_serializing_if = "Vec::is_empty")]
        images: Vec<String>,
    },
    State {
        state: String,
        #[serde(skip_serializing_if = "Option::is_none")]
        image: Option<String>,
    },
    Terminal {
        state: String,
    },
    /// A merged specification state and one donor per process.
    Merge {
        state: String,
        donors: Vec<Option<String>>,
    },
    States {
        states: Vec<String>,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Stats {
    pub states: u64,
    pub edges: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub components: Option<u64>,
    pub elapsed_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub check: String,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub stats: Stats,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub parts: Vec<Verdict>,
}

impl Verdict {
    pub fn new(check: impl Into<String>, holds: bool, witness: Option<Witness>) -> Self {
        Self {
            check: check.into(),
            holds,
            witness,
            stats: Stats::default(),
            notes: Vec::new(),
            parts: Vec::new(),
        }
    }

    pub fn holds(check: impl Into<String>) -> Self {
        Self::new(check, true, None)
    }

    pub fn fails(check: impl Into<String>, witness: Witness) -> Self {
        Self::new(check, false, Some(witness))
    }

    /// A verdict that holds iff all parts hold; the first failing part's witness is lifted.
    pub fn all(check: impl Into<String>, parts: Vec<Verdict>) -> Self {
        let failing = parts.iter().find(|p| !p.holds);
        Self {
            check: check.into(),
            holds: failing.is_none(),
            witness: failing.and_then(|p| p.witness.clone()),
            stats: Stats::default(),
            notes: Vec::new(),
            parts,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn with_stats(mut self, stats: Stats) -> Self {
        self.stats = stats;
        self
    }

    pub fn part(&self, check: &str) -> Option<&Verdict> {
        self.parts.iter().find(|p| p.check == check)
    }

    /// Human-readable multi-line summary.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        self.write_summary(&mut out, 0);
        out
    }

    fn write_summary(&self, out: &mut String, depth: usize) {
        let pad = "  ".repeat(depth);
        let status = if self.holds { "holds" } else { "FAILS" };
        out.push_str(&format!("{pad}{}: {status}", self.check));
        if depth == 0 || self.stats.states > 0 {
            out.push_str(&format!(" ({} states, {} edges", self.stats.states, self.stats.edges));
            if let Some(c) = self.stats.components {
                out.push_str(&format!(", {c} components"));
            }
            out.push(')');
        }
        out.push('\n');
        if let Some(w) = &self.witness {
            if !self.holds || self.parts.is_empty() {
                for line in describe_witness(w) {
                    out.push_str(&format!("{pad}  {line}\n"));
                }
            }
        }
        for n in &self.notes {
            out.push_str(&format!("{pad}  note: {n}\n"));
        }
        for p in &self.parts {
            p.write_summary(out, depth + 1);
        }
    }
}

fn describe_witness(w: &Witness) -> Vec<String> {
    match w {
        Witness::Edge {
            from,
            action,
            to,
            image,
        } => {
            let mut v = vec![format!("edge {from} --{action}--> {to}")];
            if let Some((a, b)) = image {
                v.push(format!("image {a} -> {b}"));
            }
            v
        }
        Witness::Cycle {
            states,
            actions,
            images,
        } => {
            let mut v = vec![format!("cycle of length {}:", states.len())];
            for (i, s) in states.iter().enumerate() {
                let img = images.get(i).map(|m| format!("   [{m}]")).unwrap_or_default();
                v.push(format!("  {s}{img}"));
                v.push(format!("    --{}-->", actions[i]));
            }
            v.push(format!("  {}", states[0]));
            v
        }
        Witness::State { state, image } => match image {
            Some(m) => vec![format!("state {state} maps to {m}")],
            None => vec![format!("state {state}")],
        },
        Witness::Terminal { state } => vec![format!("terminal state {state}")],
        Witness::Merge { state, donors } => {
            let mut v = vec![format!("merged state {state}")];
            for (i, d) in donors.iter().enumerate() {
                if let Some(d) = d {
                    v.push(format!("  process {} window from {d}", i + 1));
                }
            }
            v
        }
        Witness::States { states } => states.iter().map(|s| format!("state {s}")).collect(),
    }
}
