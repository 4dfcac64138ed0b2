//! Hasse diagrams in DOT: cover edges only, nodes ranked by height and
//! emitted in canonical index order.

use std::fmt::Write;

use crate::dlattice::DistLattice;
use crate::error::Result;
use crate::frame::NucleusLattice;
use crate::poset::FinitePoset;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

pub fn poset_dot(p: &FinitePoset) -> String {
    let mut out = String::from("digraph hasse {\n  rankdir=BT;\n  node [shape=plaintext];\n");
    for i in 0..p.len() {
        writeln!(out, "  n{i} [label={}];", quote(p.name(i))).unwrap();
    }
    let heights = p.heights();
    let top = heights.iter().copied().max().unwrap_or(0);
    for h in 0..=top {
        let row: Vec<String> = (0..p.len()).filter(|&i| heights[i] == h).map(|i| format!("n{i}")).collect();
        if row.len() > 1 {
            writeln!(out, "  {{ rank=same; {}; }}", row.join("; ")).unwrap();
        }
    }
    for (lo, hi) in p.covers() {
        writeln!(out, "  n{lo} -> n{hi};").unwrap();
    }
    out.push_str("}\n");
    out
}

pub fn lattice_dot(l: &DistLattice) -> String {
    poset_dot(&l.order_poset().0)
}

pub fn nucleus_lattice_dot(n: &NucleusLattice) -> Result<String> {
    let p = FinitePoset::from_leq_table(&n.labels(), &n.leq_table())?;
    Ok(poset_dot(&p))
}
