//! DOT export for quick visual inspection of automata.

use std::fmt::Write;

use crate::automaton::Automaton;

pub fn to_dot(a: &Automaton, name: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph \"{}\" {{", escape(name));
    let _ = writeln!(out, "  rankdir=LR;");
    let _ = writeln!(out, "  __init [shape=point, label=\"\"];");
    for s in 0..a.state_count() {
        let shape = if a.has_marking() && a.is_marked(s) {
            "doublecircle"
        } else {
            "circle"
        };
        let _ = writeln!(
            out,
            "  s{} [shape={}, label=\"{}\"];",
            s,
            shape,
            escape(a.state_name(s))
        );
    }
    let _ = writeln!(out, "  __init -> s{};", a.initial());
    for s in 0..a.state_count() {
        for (e, d) in a.transitions_from(s) {
            let _ = writeln!(
                out,
                "  s{} -> s{} [label=\"{}\"];",
                s,
                d,
                escape(a.alphabet().name(e))
            );
        }
    }
    out.push_str("}\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}
