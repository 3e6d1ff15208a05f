//! Directed cographs of formulas.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use super::formula::{Connective, Formula};

/// How two vertices of a dicograph are related, seen from the first one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RLink {
    /// An arc from the first vertex to the second.
    Out,
    /// An arc from the second vertex to the first.
    In,
    /// A symmetric edge.
    Edge,
}

/// Vertices are atom occurrences keyed by occurrence number. Each pair of
/// vertices carries at most one arc or edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dicograph {
    labels: BTreeMap<usize, String>,
    arcs: BTreeSet<(usize, usize)>,
    /// Stored with the smaller endpoint first.
    edges: BTreeSet<(usize, usize)>,
}

pub fn dicograph_of(formula: &Formula) -> Dicograph {
    let mut g = Dicograph {
        labels: formula
            .atoms()
            .into_iter()
            .map(|a| (a.occ, a.label()))
            .collect(),
        arcs: BTreeSet::new(),
        edges: BTreeSet::new(),
    };
    add_links(formula, &mut g);
    g
}

fn add_links(f: &Formula, g: &mut Dicograph) {
    let Formula::Binary(c, l, r) = f else {
        return;
    };
    if *c != Connective::Par {
        for x in l.atoms() {
            for y in r.atoms() {
                if *c == Connective::Tensor {
                    g.edges.insert((x.occ.min(y.occ), x.occ.max(y.occ)));
                } else {
                    g.arcs.insert((x.occ, y.occ));
                }
            }
        }
    }
    add_links(l, g);
    add_links(r, g);
}

impl Dicograph {
    pub fn vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.labels.keys().copied()
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, v: usize) -> Option<&str> {
        self.labels.get(&v).map(String::as_str)
    }

    pub fn arcs(&self) -> &BTreeSet<(usize, usize)> {
        &self.arcs
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn link(&self, u: usize, v: usize) -> Option<RLink> {
        if self.edges.contains(&(u.min(v), u.max(v))) {
            Some(RLink::Edge)
        } else if self.arcs.contains(&(u, v)) {
            Some(RLink::Out)
        } else if self.arcs.contains(&(v, u)) {
            Some(RLink::In)
        } else {
            None
        }
    }

    /// Can an alternating walk take an `R` step from `u` to `v`?
    pub fn r_step(&self, u: usize, v: usize) -> bool {
        matches!(self.link(u, v), Some(RLink::Out | RLink::Edge))
    }

    /// Are `u` and `v` joined by any arc or edge?
    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.link(u, v).is_some()
    }

    /// Vertex names for export: the label alone when it is unique, otherwise
    /// the label with a suffix counting same-labelled vertices in occurrence
    /// order.
    pub fn display_names(&self) -> BTreeMap<usize, String> {
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for label in self.labels.values() {
            *counts.entry(label.as_str()).or_default() += 1;
        }
        let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
        self.labels
            .iter()
            .map(|(&v, label)| {
                let name = if counts[label.as_str()] == 1 {
                    label.clone()
                } else {
                    let k = seen.entry(label.as_str()).or_default();
                    *k += 1;
                    format!("{label}#{k}")
                };
                (v, name)
            })
            .collect()
    }

    /// DOT text with vertices and links sorted by name. `bold` lists extra
    /// undirected pairs drawn bold, such as axiom links.
    pub fn to_dot(&self, bold: &[(usize, usize)]) -> String {
        let names = self.display_names();
        let q = |v: usize| format!("\"{}\"", names[&v].replace('"', "\\\""));
        let mut vertices: Vec<String> = self.labels.keys().map(|&v| q(v)).collect();
        vertices.sort();
        let mut arcs: Vec<String> = self
            .arcs
            .iter()
            .map(|&(u, v)| format!("{} -> {}", q(u), q(v)))
            .collect();
        arcs.sort();
        let undirected = |u: usize, v: usize| {
            let (a, b) = (q(u), q(v));
            if a <= b {
                format!("{a} -> {b}")
            } else {
                format!("{b} -> {a}")
            }
        };
        let mut edges: Vec<String> = self.edges.iter().map(|&(u, v)| undirected(u, v)).collect();
        edges.sort();
        let mut axioms: Vec<String> = bold.iter().map(|&(u, v)| undirected(u, v)).collect();
        axioms.sort();

        let mut out = String::from("digraph dicograph {\n");
        for v in vertices {
            let _ = writeln!(out, "  {v};");
        }
        for a in arcs {
            let _ = writeln!(out, "  {a};");
        }
        for e in edges {
            let _ = writeln!(out, "  {e} [dir=none];");
        }
        for e in axioms {
            let _ = writeln!(out, "  {e} [dir=none, style=bold, color=blue];");
        }
        out.push_str("}\n");
        out
    }
}
