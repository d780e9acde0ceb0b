//! Versioned machine-readable reports.

use serde::Serialize;

use crate::explorer::{Computation, SpecSequence};
use crate::kernel::{Program, Schema};
use crate::specs::Verdict;

pub const SCHEMA_VERSION: u32 = 1;

/// What a report is about.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Subject {
    pub protocol: String,
    pub n: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub ids: Vec<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub universe: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mapping: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SimulationReport {
    pub policy: String,
    pub seed: u64,
    pub steps: usize,
    pub states: Vec<String>,
    pub actions: Vec<String>,
    /// Indices `(a, b)` of the first revisited state.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lasso: Option<(usize, usize)>,
    pub terminal: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub image: Option<Vec<String>>,
    pub stutter_divergent: bool,
}

impl SimulationReport {
    pub fn new(
        program: &Program,
        comp: &Computation,
        image: Option<(&Schema, &SpecSequence)>,
        policy: &str,
        seed: u64,
    ) -> Self {
        Self {
            policy: policy.to_string(),
            seed,
            steps: comp.actions.len(),
            states: comp.states.iter().map(|s| program.render_state(s)).collect(),
            actions: comp.actions.iter().map(|&a| program.action_label(a)).collect(),
            lasso: comp.lasso,
            terminal: comp.terminal,
            image: image.map(|(schema, seq)| seq.states.iter().map(|s| schema.render(s.values())).collect()),
            stutter_divergent: image.is_some_and(|(_, seq)| seq.stutter_divergent),
        }
    }

    pub fn text(&self) -> String {
        let mut out = String::new();
        for (i, s) in self.states.iter().enumerate() {
            out.push_str(&format!("{i:>4}  {s}\n"));
            if let Some(a) = self.actions.get(i) {
                out.push_str(&format!("        --{a}-->\n"));
            }
        }
        if let Some((a, b)) = self.lasso {
            out.push_str(&format!("lasso: state {b} repeats state {a}\n"));
        }
        if self.terminal {
            out.push_str("terminal: no action enabled\n");
        }
        if let Some(image) = &self.image {
            out.push_str(&format!("image ({} states after stutter elimination):\n", image.len()));
            for s in image {
                out.push_str(&format!("      {s}\n"));
            }
            if self.stutter_divergent {
                out.push_str("stutter-divergent: the loop maps to a single specification state\n");
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub subject: Subject,
    pub holds: bool,
    pub verdicts: Vec<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub simulation: Option<SimulationReport>,
}

impl Report {
    pub fn new(command: &str, subject: Subject) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            subject,
            holds: true,
            verdicts: Vec::new(),
            simulation: None,
        }
    }

    pub fn push(&mut self, v: Verdict) {
        self.holds &= v.holds;
        self.verdicts.push(v);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn text(&self) -> String {
        let s = &self.subject;
        let mut out = format!("{} {} (N = {}", self.command, s.protocol, s.n);
        if !s.ids.is_empty() {
            let ids: Vec<String> = s.ids.iter().map(ToString::to_string).collect();
            out.push_str(&format!(", ids = {}", ids.join(",")));
        }
        if let Some(u) = s.universe {
            out.push_str(&format!(", {u} states"));
        }
        out.push_str(")\n");
        if let Some(sim) = &self.simulation {
            out.push_str(&sim.text());
        }
        for v in &self.verdicts {
            out.push('\n');
            out.push_str(&v.summary());
        }
        out
    }
}
