//! Graphviz export of transition systems and their condensations.

use std::fmt::Write;

use crate::explorer::{condense, TransitionSystem};
use crate::specs::Predicate;

#[derive(Default)]
pub struct DotOptions<'a> {
    /// Emit the DAG of strongly connected components instead of every state.
    pub condensed: bool,
    /// States satisfying this predicate are filled.
    pub highlight: Option<&'a Predicate>,
}

fn quote(s: &str) -> String {
    format!(
        "\"{}\"",
        s.replace('\\', "\\\\").replace('"', "\\\"").replace('\n', "\\n")
    )
}

pub fn to_dot(ts: &TransitionSystem, opts: &DotOptions<'_>) -> String {
    if opts.condensed {
        condensed(ts, opts)
    } else {
        full(ts, opts)
    }
}

fn full(ts: &TransitionSystem, opts: &DotOptions<'_>) -> String {
    let program = ts.program();
    let cond = condense(ts);
    let marked = opts.highlight.map(|p| ts.mask(|s| p.eval(s)));
    let mut out = format!(
        "digraph {} {{\n  node [shape=box, fontname=monospace];\n",
        quote(program.name())
    );
    for i in 0..ts.len() {
        let mut attrs = vec![format!("label={}", quote(&ts.render(i)))];
        if marked.as_ref().is_some_and(|m| m[i]) {
            attrs.push("style=filled, fillcolor=lightblue".into());
        }
        if cond.is_bottom(cond.comp_of(i)) {
            attrs.push("penwidth=2".into());
        }
        let _ = writeln!(out, "  s{i} [{}];", attrs.join(", "));
    }
    for e in ts.edges() {
        let _ = writeln!(
            out,
            "  s{} -> s{} [label={}];",
            e.from,
            e.to,
            quote(&program.action_label(e.action))
        );
    }
    out.push_str("}\n");
    out
}

fn condensed(ts: &TransitionSystem, opts: &DotOptions<'_>) -> String {
    let cond = condense(ts);
    let marked = opts.highlight.map(|p| ts.mask(|s| p.eval(s)));
    let mut out = format!(
        "digraph {} {{\n  node [shape=box, fontname=monospace];\n",
        quote(&format!("{} components", ts.program().name()))
    );
    for c in 0..cond.len() {
        let members = cond.members(c);
        let mut label = format!("C{c} ({} states)", members.len());
        for &m in members.iter().take(4) {
            label.push('\n');
            label.push_str(&ts.render(m));
        }
        if members.len() > 4 {
            label.push_str("\n...");
        }
        let mut attrs = vec![format!("label={}", quote(&label))];
        if cond.is_bottom(c) {
            attrs.push("penwidth=2, peripheries=2".into());
        }
        if let Some(m) = &marked {
            if members.iter().all(|&v| m[v]) {
                attrs.push("style=filled, fillcolor=lightblue".into());
            }
        }
        let _ = writeln!(out, "  c{c} [{}];", attrs.join(", "));
    }
    for c in 0..cond.len() {
        for &d in &cond.dag[c] {
            let _ = writeln!(out, "  c{c} -> c{d};");
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::make_cm;

    #[test]
    fn counts_nodes_and_edges() {
        let b = make_cm(&[2, 1]).unwrap();
        let ts = TransitionSystem::build(&b.program).unwrap();
        let dot = to_dot(&ts, &DotOptions::default());
        assert_eq!(dot.matches(" [label=").count() - dot.matches(" -> ").count(), 4);
        assert_eq!(dot.matches(" -> ").count(), 8);
        assert!(dot.contains("label=\"1:flip\""));
    }
}
