//! Graphviz export.

use std::fmt::Write;

use crate::automata::{Letter, Nfa};
use crate::gtype::GlobalType;
use crate::semantics::System;

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn automaton_body<L: Letter>(out: &mut String, prefix: &str, indent: &str, nfa: &Nfa<L>, show: impl Fn(&L) -> String) {
    for s in 0..nfa.num_states() {
        let shape = if nfa.is_accepting(s) { "doublecircle" } else { "circle" };
        writeln!(out, "{indent}{prefix}{s} [label=\"{}\", shape={shape}];", escape(nfa.state_name(s))).unwrap();
    }
    for &s in nfa.initial_states() {
        writeln!(out, "{indent}{prefix}start{s} [shape=point, label=\"\"];").unwrap();
        writeln!(out, "{indent}{prefix}start{s} -> {prefix}{s};").unwrap();
    }
    for (s, l, t) in nfa.transitions() {
        let label = l.map(&show).unwrap_or_else(|| "ε".into());
        writeln!(out, "{indent}{prefix}{s} -> {prefix}{t} [label=\"{}\"];", escape(&label)).unwrap();
    }
}

/// One node `n<i>` per state; initial states get an extra point node.
pub fn render_dot(g: &GlobalType) -> String {
    let decl = g.decl();
    let mut out = format!("digraph \"{}\" {{\n  rankdir=LR;\n", escape(g.name()));
    automaton_body(&mut out, "n", "  ", g.automaton(), |a| decl.show_arrow(a));
    out.push_str("}\n");
    out
}

/// One cluster per process.
pub fn render_dot_system(system: &System, name: &str) -> String {
    let decl = system.decl();
    let mut out = format!("digraph \"{}\" {{\n  rankdir=LR;\n", escape(name));
    for m in system.machines() {
        let p = decl.process_name(m.process());
        let prefix = format!("p{}_", m.process().0);
        writeln!(out, "  subgraph \"cluster_{}\" {{\n    label=\"{}\";", escape(p), escape(p)).unwrap();
        automaton_body(&mut out, &prefix, "    ", m.automaton(), |a| a.show(decl));
        out.push_str("  }\n");
    }
    out.push_str("}\n");
    out
}
