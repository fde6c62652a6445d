//! Graphviz rendering of `G_n` with the edge strata as attributes.

use std::fmt::Write;

use super::{GnGraph, Stratum};

fn stratum_color(s: Stratum) -> &'static str {
    match s {
        Stratum::E1 => "black",
        Stratum::E2 => "darkgreen",
        Stratum::E3 => "blue",
        Stratum::E4 => "gray50",
    }
}

pub fn to_dot(g: &GnGraph) -> String {
    let spec = g.spec();
    let mut out = String::new();
    writeln!(out, "graph G_{} {{", spec.n()).unwrap();
    writeln!(out, "  label=\"gamma = {}\";", spec.gamma()).unwrap();
    for v in spec.vertices() {
        let classes: Vec<String> = spec.classes_of(v).iter().map(|c| c.to_string()).collect();
        writeln!(out, "  \"{v}\" [label=\"{v}\\n{}\"];", classes.join(" ")).unwrap();
    }
    for (a, b, s) in g.edges() {
        writeln!(out, "  \"{a}\" -- \"{b}\" [stratum=\"{s}\", color=\"{}\"];", stratum_color(s)).unwrap();
    }
    out.push_str("}\n");
    out
}
