//! The correctness criterion: every elementary circuit alternating `R` and
//! `B` links has an `R` chord.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::structure::ProofStructure;
use super::ProofNetError;

/// Default bound on the number of atom occurrences searched.
pub const DEFAULT_CIRCUIT_CAP: usize = 20;

/// An elementary alternating circuit as its vertex sequence in a valid
/// direction, starting at its least vertex. Steps alternate between `R`
/// links and axiom links; `r_first` tells which kind the first step is.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Circuit {
    pub vertices: Vec<usize>,
    pub r_first: bool,
}

impl Circuit {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// The `R` steps of the circuit as unordered pairs.
    fn r_pairs(&self) -> BTreeSet<(usize, usize)> {
        let n = self.vertices.len();
        let first = usize::from(!self.r_first);
        (first..n)
            .step_by(2)
            .map(|i| {
                let (u, v) = (self.vertices[i], self.vertices[(i + 1) % n]);
                (u.min(v), u.max(v))
            })
            .collect()
    }

    /// `R` links between circuit vertices that are not steps of the circuit.
    pub fn chords(&self, s: &ProofStructure) -> Vec<(usize, usize)> {
        let on_circuit = self.r_pairs();
        let mut out = Vec::new();
        for (i, &u) in self.vertices.iter().enumerate() {
            for &v in &self.vertices[i + 1..] {
                let key = (u.min(v), u.max(v));
                if s.dicograph().adjacent(u, v) && !on_circuit.contains(&key) {
                    out.push(key);
                }
            }
        }
        out.sort();
        out
    }

    /// Vertex labels, closed by repeating the first one.
    pub fn describe(&self, s: &ProofStructure) -> String {
        let mut labels: Vec<&str> = self
            .vertices
            .iter()
            .map(|&v| s.dicograph().label(v).unwrap_or("?"))
            .collect();
        if let Some(&first) = labels.first() {
            labels.push(first);
        }
        labels.join(", ")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    /// A chordless alternating circuit.
    Fail(Circuit),
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Pass => f.write_str("PASS"),
            Verdict::Fail(c) => write!(f, "FAIL {:?}", c.vertices),
        }
    }
}

/// Vertex set and undirected `R` pairs: equal for the two readings of
/// one circuit.
type CircuitKey = (BTreeSet<usize>, BTreeSet<(usize, usize)>);

/// All elementary alternating circuits, each once, sorted. A circuit
/// whose `R` links are all edges can be read in both directions; it is
/// reported with an `R` step first.
pub fn ae_circuits(s: &ProofStructure, cap: usize) -> Result<Vec<Circuit>, ProofNetError> {
    let g = s.dicograph();
    let n = g.vertex_count();
    if n > cap {
        return Err(ProofNetError::TooManyVertices { count: n, cap });
    }
    let mut found: BTreeMap<CircuitKey, Circuit> = BTreeMap::new();
    // walks leaving the least vertex by an R step, then the same against
    // the arcs, which are circuits leaving it by an axiom link
    for reversed in [false, true] {
        for start in g.vertices() {
            let mut search = Search {
                s,
                start,
                reversed,
                path: vec![start],
                visited: BTreeSet::from([start]),
                found: Vec::new(),
            };
            search.extend();
            for walk in search.found {
                let circuit = if reversed {
                    let mut vertices = walk;
                    vertices[1..].reverse();
                    Circuit {
                        vertices,
                        r_first: false,
                    }
                } else {
                    Circuit {
                        vertices: walk,
                        r_first: true,
                    }
                };
                let key = (
                    circuit.vertices.iter().copied().collect(),
                    circuit.r_pairs(),
                );
                found.entry(key).or_insert(circuit);
            }
        }
    }
    let mut out: Vec<Circuit> = found.into_values().collect();
    out.sort();
    Ok(out)
}

struct Search<'a> {
    s: &'a ProofStructure,
    start: usize,
    reversed: bool,
    path: Vec<usize>,
    visited: BTreeSet<usize>,
    found: Vec<Vec<usize>>,
}

impl Search<'_> {
    fn r_step(&self, u: usize, v: usize) -> bool {
        let g = self.s.dicograph();
        if self.reversed {
            g.r_step(v, u)
        } else {
            g.r_step(u, v)
        }
    }

    /// `path` is `[start]` or ends with an axiom step. Tries every `R` step
    /// onward through vertices above `start`.
    fn extend(&mut self) {
        let here = *self.path.last().expect("non-empty path");
        let closing = self.s.mate(self.start);
        let vertices: Vec<usize> = self.s.dicograph().vertices().collect();
        for next in vertices {
            if next <= self.start || self.visited.contains(&next) || !self.r_step(here, next) {
                continue;
            }
            if next == closing {
                let mut walk = self.path.clone();
                walk.push(next);
                self.found.push(walk);
                continue;
            }
            let partner = self.s.mate(next);
            if partner <= self.start || self.visited.contains(&partner) {
                continue;
            }
            self.path.extend([next, partner]);
            self.visited.extend([next, partner]);
            self.extend();
            self.visited.remove(&partner);
            self.visited.remove(&next);
            self.path.truncate(self.path.len() - 2);
        }
    }
}

/// The criterion. A failing structure reports its least chordless circuit.
pub fn is_correct(s: &ProofStructure) -> Result<Verdict, ProofNetError> {
    is_correct_with_cap(s, DEFAULT_CIRCUIT_CAP)
}

pub fn is_correct_with_cap(s: &ProofStructure, cap: usize) -> Result<Verdict, ProofNetError> {
    for circuit in ae_circuits(s, cap)? {
        if circuit.chords(s).is_empty() {
            return Ok(Verdict::Fail(circuit));
        }
    }
    Ok(Verdict::Pass)
}
