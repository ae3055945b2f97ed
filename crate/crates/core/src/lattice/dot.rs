use std::fmt::Write;

use super::{Lattice, Poset};

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Hasse diagram of a lattice in DOT, cover edges only, bottom drawn lowest.
pub fn hasse_dot(l: &Lattice, name: &str) -> String {
    let mut out = String::new();
    writeln!(out, "digraph \"{}\" {{", escape(name)).unwrap();
    writeln!(out, "  rankdir=BT;").unwrap();
    writeln!(out, "  node [shape=plaintext];").unwrap();
    for x in l.elements() {
        writeln!(out, "  n{x} [label=\"{}\"];", escape(l.label(x))).unwrap();
    }
    for (a, b) in l.covers() {
        writeln!(out, "  n{a} -> n{b} [arrowhead=none];").unwrap();
    }
    out.push_str("}\n");
    out
}

pub fn poset_dot(p: &Poset, name: &str) -> String {
    let mut out = String::new();
    writeln!(out, "digraph \"{}\" {{", escape(name)).unwrap();
    writeln!(out, "  rankdir=BT;").unwrap();
    for i in 0..p.len() {
        writeln!(out, "  n{i} [label=\"{}\"];", escape(p.name(i))).unwrap();
    }
    for (a, b) in p.covers() {
        writeln!(out, "  n{a} -> n{b} [arrowhead=none];").unwrap();
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use crate::lattice::Frame;

    use super::*;

    #[test]
    fn diamond_has_four_cover_edges() {
        let dot = hasse_dot(&Frame::diamond(), "BD");
        assert_eq!(dot.matches("->").count(), 4);
        assert!(dot.contains("n0 -> n1"));
        assert!(!dot.contains("n0 -> n3"));
    }
}
