//! Graphviz export.

use alloc::format;
use alloc::string::String;
use core::fmt::Write;

use crate::core::{Grouping, Manager, Wcflobdd};
use crate::semifield::Semifield;

/// DOT text for `c`: one cluster per distinct grouping, with entry, middle
/// and exit vertices; call edges are dashed, return edges dotted.
pub fn export_dot<W: Semifield>(mgr: &Manager<W>, c: &Wcflobdd<W>) -> String {
    let mut out = String::from("digraph wcflobdd {\n  compound=true;\n  node [shape=circle, label=\"\"];\n");
    for g in mgr.reachable(c.head) {
        let id = g.index();
        let level = mgr.level(g);
        let _ = writeln!(out, "  subgraph cluster_{id} {{\n    label=\"g{id} (level {level})\";");
        let _ = writeln!(out, "    g{id}_entry;");
        if let Grouping::Internal(i) = mgr.grouping(g) {
            for m in 1..=i.b_connections.len() {
                let _ = writeln!(out, "    g{id}_m{m};");
            }
        }
        for e in 1..=mgr.exits(g) {
            let _ = writeln!(out, "    g{id}_x{e};");
        }
        match mgr.grouping(g) {
            Grouping::Fork { lw, rw } => {
                let _ = writeln!(out, "    g{id}_entry -> g{id}_x1 [label=\"0:{}\"];", lw.to_display());
                let _ = writeln!(out, "    g{id}_entry -> g{id}_x2 [label=\"1:{}\"];", rw.to_display());
            }
            Grouping::DontCare { lw, rw } => {
                let _ = writeln!(out, "    g{id}_entry -> g{id}_x1 [label=\"0:{}\"];", lw.to_display());
                let _ = writeln!(out, "    g{id}_entry -> g{id}_x1 [label=\"1:{}\"];", rw.to_display());
            }
            Grouping::Internal(_) => {}
        }
        out.push_str("  }\n");
        if let Grouping::Internal(i) = mgr.grouping(g) {
            let a = i.a_connection.index();
            let _ = writeln!(out, "  g{id}_entry -> g{a}_entry [style=dashed];");
            for m in 1..=i.b_connections.len() {
                let _ = writeln!(out, "  g{a}_x{m} -> g{id}_m{m} [style=dotted];");
            }
            for (m, (b, rt)) in i.b_connections.iter().zip(&i.b_return_tuples).enumerate() {
                let b = b.index();
                let _ = writeln!(out, "  g{id}_m{} -> g{b}_entry [style=dashed];", m + 1);
                for (x, e) in rt.iter().enumerate() {
                    let _ = writeln!(out, "  g{b}_x{} -> g{id}_x{e} [style=dotted];", x + 1);
                }
            }
        }
    }
    let head = c.head.index();
    let _ = writeln!(out, "  top [shape=box, label=\"{}\"];", c.factor.to_display());
    let _ = writeln!(out, "  top -> g{head}_entry;");
    for (e, v) in c.values.bits().iter().enumerate() {
        let t = format!("t{}", *v as u8);
        let _ = writeln!(out, "  {t} [shape=box, label=\"{}\"];", *v as u8);
        let _ = writeln!(out, "  g{head}_x{} -> {t};", e + 1);
    }
    out.push_str("}\n");
    out
}
