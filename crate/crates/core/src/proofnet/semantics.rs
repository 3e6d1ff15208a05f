//! Experiments and the semantic side of the criterion.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use super::criterion::{is_correct_with_cap, Verdict, DEFAULT_CIRCUIT_CAP};
use super::formula::{Connective, Formula};
use super::structure::ProofStructure;
use super::ProofNetError;
use crate::coherence::{before, is_clique, negation, par, tensor, CoherenceSpace, Token};

/// A coherence space for each propositional variable. A negative atom is
/// interpreted by the negation of its variable's space.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AtomInterpretation {
    spaces: BTreeMap<Arc<str>, CoherenceSpace>,
    names: BTreeMap<Arc<str>, String>,
}

impl AtomInterpretation {
    pub fn new() -> AtomInterpretation {
        AtomInterpretation::default()
    }

    pub fn with(mut self, var: &str, space: CoherenceSpace) -> AtomInterpretation {
        self.insert(var, space, None);
        self
    }

    /// `name` is a short description used in reports.
    pub fn insert(&mut self, var: &str, space: CoherenceSpace, name: Option<&str>) {
        let var: Arc<str> = Arc::from(var);
        if let Some(name) = name {
            self.names.insert(var.clone(), name.to_string());
        }
        self.spaces.insert(var, space);
    }

    pub fn get(&self, var: &str) -> Option<&CoherenceSpace> {
        self.spaces.get(var)
    }

    fn space(&self, var: &str) -> Result<&CoherenceSpace, ProofNetError> {
        self.get(var)
            .ok_or_else(|| ProofNetError::MissingInterpretation(var.to_string()))
    }

    pub fn from_spaces(spaces: Vec<(String, CoherenceSpace)>) -> AtomInterpretation {
        let mut out = AtomInterpretation::new();
        for (name, space) in spaces {
            out.insert(&name, space, None);
        }
        out
    }
}

impl fmt::Display for AtomInterpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .spaces
            .iter()
            .map(|(var, space)| match self.names.get(var) {
                Some(name) => format!("{var}={name}"),
                None => format!("{var}={space}"),
            })
            .collect();
        f.write_str(&parts.join(" "))
    }
}

/// The coherence space of a formula under an interpretation.
pub fn conclusion_space(
    formula: &Formula,
    interp: &AtomInterpretation,
) -> Result<CoherenceSpace, ProofNetError> {
    Ok(match formula {
        Formula::Atom(a) if a.positive => interp.space(&a.var)?.clone(),
        Formula::Atom(a) => negation(interp.space(&a.var)?),
        Formula::Binary(c, l, r) => {
            let (l, r) = (conclusion_space(l, interp)?, conclusion_space(r, interp)?);
            match c {
                Connective::Tensor => tensor(&l, &r),
                Connective::Par => par(&l, &r),
                Connective::Before => before(&l, &r),
            }
        }
    })
}

fn token_of(formula: &Formula, values: &BTreeMap<usize, Token>) -> Token {
    match formula {
        Formula::Atom(a) => values[&a.occ].clone(),
        Formula::Binary(_, l, r) => Token::pair(token_of(l, values), token_of(r, values)),
    }
}

/// Results of all succeeding experiments: one token per axiom link,
/// propagated to the conclusion. An experiment succeeds when each cut
/// `K ⊗ K⊥` carries the same token on both sides.
pub fn experiments(
    s: &ProofStructure,
    interp: &AtomInterpretation,
) -> Result<BTreeSet<Token>, ProofNetError> {
    let links = s.links();
    let formula = s.formula();
    let atoms: BTreeMap<usize, _> = formula.atoms().into_iter().map(|a| (a.occ, a)).collect();
    let webs: Vec<Vec<Token>> = links
        .iter()
        .map(|(u, _)| interp.space(&atoms[u].var).map(CoherenceSpace::web))
        .collect::<Result<_, _>>()?;
    let total: usize = webs.iter().map(Vec::len).product();
    let cuts: Vec<(&Formula, &Formula)> = s
        .cuts()
        .iter()
        .map(|path| match formula.subformula(path) {
            Some(Formula::Binary(_, k, k_dual)) => (&**k, &**k_dual),
            _ => unreachable!("cuts are validated on construction"),
        })
        .collect();
    let results = (0..total)
        .into_par_iter()
        .filter_map(|mut index| {
            let mut values = BTreeMap::new();
            for ((u, v), web) in links.iter().zip(&webs) {
                let token = web[index % web.len()].clone();
                index /= web.len();
                values.insert(*u, token.clone());
                values.insert(*v, token);
            }
            cuts.iter()
                .all(|(k, k_dual)| token_of(k, &values) == token_of(k_dual, &values))
                .then(|| token_of(formula, &values))
        })
        .collect();
    Ok(results)
}

/// Per-variable spaces tried when looking for a separating interpretation.
pub fn catalog_spaces() -> Vec<(&'static str, CoherenceSpace)> {
    vec![
        ("one", CoherenceSpace::one()),
        ("coh2", CoherenceSpace::complete(&["x", "y"])),
        ("incoh2", CoherenceSpace::discrete(&["x", "y"])),
        (
            "mixed3",
            CoherenceSpace::from_names(&["x", "y", "z"], &[("x", "y"), ("y", "z")])
                .expect("valid catalog space"),
        ),
    ]
}

/// Every combination of catalog spaces over `vars`.
pub fn catalog_interpretations(vars: &[Arc<str>]) -> Vec<AtomInterpretation> {
    let catalog = catalog_spaces();
    let mut out = vec![AtomInterpretation::new()];
    for var in vars {
        out = out
            .into_iter()
            .flat_map(|base| {
                catalog.iter().map(move |(name, space)| {
                    let mut next = base.clone();
                    next.insert(var, space.clone(), Some(name));
                    next
                })
            })
            .collect();
    }
    out
}

#[derive(Debug, Clone)]
pub struct InterpretationOutcome {
    pub interpretation: AtomInterpretation,
    pub results: BTreeSet<Token>,
    pub clique: bool,
}

#[derive(Debug, Clone)]
pub struct SemanticReport {
    pub verdict: Verdict,
    pub outcomes: Vec<InterpretationOutcome>,
}

impl SemanticReport {
    /// The first interpretation whose results are not a clique.
    pub fn separating(&self) -> Option<&InterpretationOutcome> {
        self.outcomes.iter().find(|o| !o.clique)
    }

    /// Whether the criterion and the interpretations agree: all cliques for
    /// a correct structure, some non-clique for an incorrect one. Only
    /// meaningful without cuts, so `None` otherwise.
    pub fn agreement(&self, cut_free: bool) -> Option<bool> {
        cut_free.then(|| self.verdict.is_pass() == self.separating().is_none())
    }
}

/// Runs the criterion and computes the interpretation under each catalog
/// entry.
pub fn semantic_correctness_check(
    s: &ProofStructure,
    catalog: &[AtomInterpretation],
) -> Result<SemanticReport, ProofNetError> {
    let verdict = is_correct_with_cap(s, DEFAULT_CIRCUIT_CAP)?;
    let outcomes = catalog
        .iter()
        .map(|interp| {
            let space = conclusion_space(s.formula(), interp)?;
            let results = experiments(s, interp)?;
            let clique = is_clique(&space, results.iter());
            Ok(InterpretationOutcome {
                interpretation: interp.clone(),
                results,
                clique,
            })
        })
        .collect::<Result<_, ProofNetError>>()?;
    Ok(SemanticReport { verdict, outcomes })
}
