//! Exhaustive property suites over small instances, shared by the command
//! line and the test suites.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::coherence::{
    before, before_assoc_iso, is_trace_clique, negation, par, relation_equal, sp_space,
    spaces_isomorphic, tensor, Coherence, CoherenceSpace, LinearTrace, SpOrder, Token,
};
use crate::flag::{
    compose_relations, contraction_iso_violation, flag_compose_witness, flag_lift_contains,
    flag_self_duality_violation, merge, project_tree, retract_embed, retract_project, split,
    verify_no_counit, FlagSpace, Tree,
};
use crate::hyper::{
    hc_before, hc_lollipop, hc_negation, hc_par, hc_tensor, hflag_contraction_check,
    is_hyper_trace, subsets, HFlag, Hyper, Hypercoherence,
};
use crate::proofnet::{
    all_matchings, catalog_interpretations, experiments, is_correct_with_cap,
    semantic_correctness_check, Connective, Formula, ProofStructure,
};
use crate::trees::enumerate_trees;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suite {
    Before,
    Flag,
    Functor,
    Nomonad,
    Hyper,
    Nets,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Before,
        Suite::Flag,
        Suite::Functor,
        Suite::Nomonad,
        Suite::Hyper,
        Suite::Nets,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Before => "before",
            Suite::Flag => "flag",
            Suite::Functor => "functor",
            Suite::Nomonad => "nomonad",
            Suite::Hyper => "hyper",
            Suite::Nets => "nets",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Suite, String> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| format!("unknown suite `{s}`"))
    }
}

/// Bounds for the exhaustive suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteConfig {
    /// Deepest trees enumerated by the flag suite; the functor and
    /// hypercoherence suites use one level less.
    pub max_depth: usize,
    /// Largest base web used by the coherence-space suites.
    pub max_web: usize,
    /// Circuit search bound for the proof-net suite.
    pub circuit_cap: usize,
}

impl Default for SuiteConfig {
    fn default() -> SuiteConfig {
        SuiteConfig {
            max_depth: 3,
            max_web: 3,
            circuit_cap: crate::proofnet::DEFAULT_CIRCUIT_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyOutcome {
    pub name: String,
    pub passed: bool,
    /// Counterexample on failure, or a short summary of what was checked.
    pub witness: String,
}

impl PropertyOutcome {
    fn new(name: &str, failure: Option<String>, checked: String) -> PropertyOutcome {
        PropertyOutcome {
            name: name.to_string(),
            passed: failure.is_none(),
            witness: failure.unwrap_or(checked),
        }
    }
}

pub fn run_suite(suite: Suite, config: &SuiteConfig) -> Vec<PropertyOutcome> {
    match suite {
        Suite::Before => before_suite(config),
        Suite::Flag => flag_suite(config),
        Suite::Functor => functor_suite(config),
        Suite::Nomonad => nomonad_suite(),
        Suite::Hyper => hyper_suite(config),
        Suite::Nets => nets_suite(config),
    }
}

const NAMES: [&str; 6] = ["a", "b", "c", "d", "e", "f"];

/// Every coherence space on the web `names`: one per set of strictly
/// coherent pairs.
pub fn all_spaces(names: &[&str]) -> Vec<CoherenceSpace> {
    let pairs: Vec<(&str, &str)> = names
        .iter()
        .enumerate()
        .flat_map(|(i, &x)| names[i + 1..].iter().map(move |&y| (x, y)))
        .collect();
    (0u32..(1 << pairs.len()))
        .map(|mask| {
            let scoh: Vec<(&str, &str)> = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &p)| p)
                .collect();
            CoherenceSpace::from_names(names, &scoh).expect("pairs are over the web")
        })
        .collect()
}

/// Every coherence space with between 1 and `max` tokens.
pub fn small_spaces(max: usize) -> Vec<CoherenceSpace> {
    (1..=max.min(NAMES.len()))
        .flat_map(|n| all_spaces(&NAMES[..n]))
        .collect()
}

/// Every hypercoherence on the web `names`.
pub fn all_hypercoherences(names: &[&str]) -> Vec<Hypercoherence> {
    let web: Vec<Token> = names.iter().map(|n| Token::atom(n)).collect();
    let candidates = subsets(&web, 2).expect("small web");
    (0u64..(1 << candidates.len()))
        .map(|mask| {
            let gamma = candidates
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, s)| s.clone());
            Hypercoherence::new(web.clone(), gamma).expect("subsets of the web")
        })
        .collect()
}

fn first_failure<T: Sync, F>(items: &[T], check: F) -> Option<String>
where
    F: Fn(&T) -> Option<String> + Send + Sync,
{
    items.par_iter().find_map_first(check)
}

fn before_suite(config: &SuiteConfig) -> Vec<PropertyOutcome> {
    let spaces = small_spaces(config.max_web);
    let pairs: Vec<(&CoherenceSpace, &CoherenceSpace)> = spaces
        .iter()
        .flat_map(|a| spaces.iter().map(move |b| (a, b)))
        .collect();
    let checked = format!("{} pairs of spaces", pairs.len());
    let mut out = Vec::new();

    let de_morgan = first_failure(&pairs, |(a, b)| {
        let par_dual = negation(&par(a, b)).materialize();
        let before_dual = negation(&before(a, b)).materialize();
        if !relation_equal(&par_dual, &tensor(&negation(a), &negation(b))) {
            Some(format!("(A ⅋ B)⊥ ≠ A⊥ ⊗ B⊥ for A = {a}, B = {b}"))
        } else if !relation_equal(&before_dual, &before(&negation(a), &negation(b))) {
            Some(format!("(A ◁ B)⊥ ≠ A⊥ ◁ B⊥ for A = {a}, B = {b}"))
        } else {
            None
        }
    });
    out.push(PropertyOutcome::new(
        "de-morgan",
        de_morgan,
        checked.clone(),
    ));

    let sandwich = first_failure(&pairs, |(a, b)| {
        let (t, m, p) = (tensor(a, b), before(a, b), par(a, b));
        let web = t.web();
        for (i, x) in web.iter().enumerate() {
            for y in &web[i..] {
                let coh = |s: &CoherenceSpace| s.coherent(x, y).unwrap_or(false);
                if (coh(&t) && !coh(&m)) || (coh(&m) && !coh(&p)) {
                    return Some(format!("{x}, {y} in A = {a}, B = {b}"));
                }
            }
        }
        None
    });
    out.push(PropertyOutcome::new("sandwich", sandwich, checked));

    let witness_a = CoherenceSpace::complete(&["a", "b"]);
    let witness_b = CoherenceSpace::discrete(&["c", "d"]);
    let non_commutative = match spaces_isomorphic(
        &before(&witness_a, &witness_b),
        &before(&witness_b, &witness_a),
    ) {
        Ok(None) => None,
        Ok(Some(_)) => Some("A ◁ B ≅ B ◁ A for the two-token witness".to_string()),
        Err(e) => Some(e.to_string()),
    };
    out.push(PropertyOutcome::new(
        "non-commutative",
        non_commutative,
        format!("A = {witness_a}, B = {witness_b}"),
    ));

    let assoc_spaces = small_spaces(config.max_web.min(2));
    let triples = triples_of(&assoc_spaces);
    let assoc = first_failure(&triples, |&[a, b, c]| {
        let iso = before_assoc_iso(a, b, c);
        assoc_violation(&iso).map(|m| format!("{m} for A = {a}, B = {b}, C = {c}"))
    });
    out.push(PropertyOutcome::new(
        "associativity",
        assoc,
        format!("{} triples of spaces", triples.len()),
    ));

    let series = first_failure(&pairs, |(a, b)| {
        let order = SpOrder::series(SpOrder::leaf(0), SpOrder::leaf(1));
        let parallel = SpOrder::parallel(SpOrder::leaf(0), SpOrder::leaf(1));
        let spaces = [(*a).clone(), (*b).clone()];
        let as_before = sp_space(&order, &spaces).ok()?.materialize();
        let as_par = sp_space(&parallel, &spaces).ok()?.materialize();
        let strict = |s: &CoherenceSpace| -> BTreeSet<(Token, Token)> {
            s.scoh_pairs().into_iter().collect()
        };
        if strict(&as_before) != strict(&before(a, b).materialize())
            || strict(&as_par) != strict(&par(a, b).materialize())
        {
            Some(format!("sp-order spaces disagree for A = {a}, B = {b}"))
        } else {
            None
        }
    });
    out.push(PropertyOutcome::new(
        "sp-order",
        series,
        format!("{} pairs of spaces", pairs.len()),
    ));
    out
}

fn triples_of<T>(items: &[T]) -> Vec<[&T; 3]> {
    let mut out = Vec::new();
    for a in items {
        for b in items {
            for c in items {
                out.push([a, b, c]);
            }
        }
    }
    out
}

/// A bijection of webs preserving the three-way classification.
fn assoc_violation(iso: &LinearTrace) -> Option<String> {
    let pairs: Vec<&(Token, Token)> = iso.pairs().iter().collect();
    let inputs: BTreeSet<&Token> = pairs.iter().map(|(x, _)| x).collect();
    let outputs: BTreeSet<&Token> = pairs.iter().map(|(_, y)| y).collect();
    if inputs.len() != pairs.len()
        || outputs.len() != pairs.len()
        || pairs.len() != iso.source().web_size()
        || pairs.len() != iso.target().web_size()
    {
        return Some("re-pairing is not a bijection".into());
    }
    for (x, y) in &pairs {
        for (x2, y2) in &pairs {
            if iso.source().rel3(x, x2).ok() != iso.target().rel3(y, y2).ok() {
                return Some(format!("{x}, {x2} change relation"));
            }
        }
    }
    None
}

fn ordered_pairs(trees: &[Tree]) -> Vec<(&Tree, &Tree)> {
    trees
        .iter()
        .flat_map(|f| trees.iter().map(move |g| (f, g)))
        .collect()
}

fn flag_suite(config: &SuiteConfig) -> Vec<PropertyOutcome> {
    let spaces: Vec<CoherenceSpace> = (2..=config.max_web.clamp(2, 3))
        .flat_map(|n| all_spaces(&NAMES[..n]))
        .collect();
    let mut out = Vec::new();
    let total_pairs: usize = spaces
        .iter()
        .map(|a| {
            let n = enumerate_trees(&a.web(), config.max_depth).len();
            n * (n - 1)
        })
        .sum();
    let checked = format!(
        "{} spaces, {total_pairs} ordered pairs of distinct trees",
        spaces.len()
    );

    let duality = first_failure(&spaces, |a| {
        let trees = enumerate_trees(&a.web(), config.max_depth);
        match flag_self_duality_violation(a, ordered_pairs(&trees)) {
            Ok(None) => None,
            Ok(Some((f, g))) => Some(format!("{f}, {g} over {a}")),
            Err(e) => Some(e.to_string()),
        }
    });
    out.push(PropertyOutcome::new(
        "self-duality",
        duality,
        checked.clone(),
    ));

    let contraction = first_failure(&spaces, |a| {
        let trees = enumerate_trees(&a.web(), config.max_depth);
        for h in &trees {
            let (h0, h1) = split(h);
            if merge(&h0, &h1) != *h {
                return Some(format!("merge(split {h}) ≠ {h}"));
            }
        }
        let halves = enumerate_trees(&a.web(), config.max_depth.saturating_sub(1));
        for h0 in &halves {
            for h1 in &halves {
                if split(&merge(h0, h1)) != (h0.clone(), h1.clone()) {
                    return Some(format!("split(merge {h0} {h1}) differs"));
                }
            }
        }
        match contraction_iso_violation(a, ordered_pairs(&trees)) {
            Ok(None) => None,
            Ok(Some((h, g))) => Some(format!("{h}, {g} over {a}")),
            Err(e) => Some(e.to_string()),
        }
    });
    out.push(PropertyOutcome::new("contraction", contraction, checked));

    let retract = first_failure(&spaces, |a| {
        let embed = retract_embed(a);
        let project = retract_project(a);
        let flag = FlagSpace::new(a);
        if !is_trace_clique(a, &flag, &embed) || !is_trace_clique(&flag, a, &project) {
            return Some(format!("embedding or projection is not linear over {a}"));
        }
        let identity: BTreeSet<(Token, Token)> =
            a.web().into_iter().map(|t| (t.clone(), t)).collect();
        if compose_relations(&embed, &project) != identity {
            return Some(format!("project ∘ embed ≠ Id over {a}"));
        }
        let trees = enumerate_trees(&a.web(), config.max_depth);
        let defined = trees.iter().filter(|t| project_tree(t).is_some()).count();
        if defined != a.web_size() || defined == trees.len() {
            return Some(format!("embed ∘ project is not strictly partial over {a}"));
        }
        None
    });
    out.push(PropertyOutcome::new(
        "retract",
        retract,
        format!("{} spaces", spaces.len()),
    ));
    out
}

/// Every linear trace between two finite spaces.
pub fn all_linear_traces(source: &CoherenceSpace, target: &CoherenceSpace) -> Vec<LinearTrace> {
    let product: Vec<(Token, Token)> = source
        .web()
        .into_iter()
        .flat_map(|x| target.web().into_iter().map(move |y| (x.clone(), y)))
        .collect();
    assert!(
        product.len() < 20,
        "web product too large to enumerate traces"
    );
    (0u32..(1 << product.len()))
        .filter_map(|mask| {
            let pairs = product
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, p)| p.clone());
            LinearTrace::new(source, target, pairs).ok()
        })
        .collect()
}

fn functor_suite(config: &SuiteConfig) -> Vec<PropertyOutcome> {
    let depth = config.max_depth.saturating_sub(1).max(1);
    let spaces = all_spaces(&["a", "b"]);
    let mut out = Vec::new();

    let identity = first_failure(&spaces, |a| {
        let id = LinearTrace::identity(a);
        let trees = enumerate_trees(&a.web(), depth);
        for (f, g) in ordered_pairs(&trees) {
            if flag_lift_contains(&id, f, g).ok()? != (f == g) {
                return Some(format!("flag(Id) relates {f} and {g} over {a}"));
            }
        }
        None
    });
    out.push(PropertyOutcome::new(
        "identity",
        identity,
        format!("{} spaces, trees of depth ≤ {depth}", spaces.len()),
    ));

    let mut cases = Vec::new();
    for a in &spaces {
        for b in &spaces {
            for c in &spaces {
                for l in all_linear_traces(a, b) {
                    for l2 in all_linear_traces(b, c) {
                        cases.push((l.clone(), l2));
                    }
                }
            }
        }
    }
    let composition = first_failure(&cases, |(l, l2)| {
        let composite = l.then(l2).ok()?;
        let source = enumerate_trees(&l.source().web(), depth);
        let middle = enumerate_trees(&l.target().web(), depth);
        let target = enumerate_trees(&l2.target().web(), depth);
        for f in &source {
            for h in &target {
                let whole = flag_lift_contains(&composite, f, h).ok()?;
                if whole {
                    let g = match flag_compose_witness(l, l2, f, h) {
                        Ok(g) => g,
                        Err(e) => return Some(e.to_string()),
                    };
                    if !flag_lift_contains(l, f, &g).ok()? || !flag_lift_contains(l2, &g, h).ok()? {
                        return Some(format!("witness {g} for {f}, {h} does not mediate"));
                    }
                }
                for g in &middle {
                    let through =
                        flag_lift_contains(l, f, g).ok()? && flag_lift_contains(l2, g, h).ok()?;
                    if through && !whole {
                        return Some(format!("{f} → {g} → {h} is not in flag of the composite"));
                    }
                }
            }
        }
        let flag_source = FlagSpace::new(l.source());
        let flag_target = FlagSpace::new(l.target());
        let lifted: Vec<(Tree, Tree)> = source
            .iter()
            .flat_map(|f| middle.iter().map(move |g| (f.clone(), g.clone())))
            .filter(|(f, g)| flag_lift_contains(l, f, g).unwrap_or(false))
            .collect();
        if !is_trace_clique(&flag_source, &flag_target, &lifted) {
            return Some("flag of a linear trace is not a clique".into());
        }
        None
    });
    out.push(PropertyOutcome::new(
        "composition",
        composition,
        format!(
            "{} composable pairs of traces, trees of depth ≤ {depth}",
            cases.len()
        ),
    ));
    out
}

fn nomonad_suite() -> Vec<PropertyOutcome> {
    let report = verify_no_counit();
    let survivors = report.survivors();
    let failure = survivors
        .first()
        .map(|c| format!("surviving candidate {c}"));
    vec![PropertyOutcome::new(
        "no-counit",
        failure,
        format!(
            "{} candidates, {} natural, {} surviving",
            report.examined(),
            report.natural().len(),
            survivors.len()
        ),
    )]
}

fn hyper_suite(config: &SuiteConfig) -> Vec<PropertyOutcome> {
    let depth = config.max_depth.saturating_sub(1).max(1);
    let mut out = Vec::new();
    let two = all_hypercoherences(&["a", "b"]);
    let small: Vec<Hypercoherence> = all_hypercoherences(&["a"])
        .into_iter()
        .chain(two.iter().cloned())
        .collect();
    let pairs: Vec<(&Hypercoherence, &Hypercoherence)> = small
        .iter()
        .flat_map(|x| small.iter().map(move |y| (x, y)))
        .collect();

    let singletons = first_failure(&pairs, |(x, y)| {
        for space in [
            hc_tensor(x, y),
            hc_par(x, y),
            hc_lollipop(x, y),
            hc_before(x, y),
            hc_negation(x),
        ] {
            for t in space.web() {
                if !space
                    .in_gamma(&BTreeSet::from([t.clone()]))
                    .unwrap_or(false)
                {
                    return Some(format!("{{{t}}} ∉ Γ({space})"));
                }
            }
        }
        None
    });
    out.push(PropertyOutcome::new(
        "singletons",
        singletons,
        format!("{} pairs", pairs.len()),
    ));

    let laws = first_failure(&pairs, |(x, y)| {
        let lollipop = hc_lollipop(x, y);
        let encoded = hc_negation(&hc_tensor(x, &hc_negation(y)));
        let web = lollipop.web();
        let before_dual = hc_negation(&hc_before(x, y));
        let dual_before = hc_before(&hc_negation(x), &hc_negation(y));
        let (t, b, p) = (hc_tensor(x, y), hc_before(x, y), hc_par(x, y));
        for w in subsets(&web, 2).ok()? {
            if lollipop.in_gamma_star(&w).ok()? != encoded.in_gamma_star(&w).ok()? {
                return Some(format!("X ⊸ Y ≠ (X ⊗ Y⊥)⊥ at {w:?} for X = {x}, Y = {y}"));
            }
            if before_dual.in_gamma_star(&w).ok()? != dual_before.in_gamma_star(&w).ok()? {
                return Some(format!("(X ◁ Y)⊥ ≠ X⊥ ◁ Y⊥ at {w:?} for X = {x}, Y = {y}"));
            }
            let (in_t, in_b, in_p) = (
                t.in_gamma_star(&w).ok()?,
                b.in_gamma_star(&w).ok()?,
                p.in_gamma_star(&w).ok()?,
            );
            if (in_t && !in_b) || (in_b && !in_p) {
                return Some(format!("sandwich fails at {w:?} for X = {x}, Y = {y}"));
            }
        }
        None
    });
    out.push(PropertyOutcome::new(
        "connective-laws",
        laws,
        format!("{} pairs", pairs.len()),
    ));

    let triples = triples_of(&small);
    let assoc = first_failure(&triples, |&[x, y, z]| {
        let left = hc_before(&hc_before(x, y), z);
        let right = hc_before(x, &hc_before(y, z));
        let repair = |t: &Token| -> Token {
            let (xy, c) = t.as_pair().expect("pair");
            let (a, b) = xy.as_pair().expect("pair");
            Token::pair(a.clone(), Token::pair(b.clone(), c.clone()))
        };
        for w in subsets(&left.web(), 2).ok()? {
            let image: BTreeSet<Token> = w.iter().map(repair).collect();
            if left.in_gamma_star(&w).ok()? != right.in_gamma_star(&image).ok()? {
                return Some(format!("re-pairing fails at {w:?} for {x}, {y}, {z}"));
            }
        }
        None
    });
    out.push(PropertyOutcome::new(
        "before-associativity",
        assoc,
        format!("{} triples", triples.len()),
    ));

    let flag_spaces: Vec<Hypercoherence> = two
        .iter()
        .cloned()
        .chain(all_hypercoherences(&["a", "b", "c"]))
        .collect();
    let flag = first_failure(&flag_spaces, |x| {
        let trees = enumerate_trees(&x.web(), depth);
        let families = subsets(&trees, 2).ok()?;
        let dual = hc_negation(x);
        let hflag = HFlag::new(x);
        let hflag_dual = HFlag::new(&dual);
        for family in &families {
            let here = hflag.in_gamma_star(family).ok()?;
            let there = hflag_dual.in_gamma_star(family).ok()?;
            if here == there {
                return Some(format!("self-duality fails at {family:?} over {x}"));
            }
            if !hflag_contraction_check(x, family).ok()? {
                return Some(format!("contraction fails at {family:?} over {x}"));
            }
        }
        let embed: Vec<(Token, Tree)> = retract_embed_h(x);
        let project: Vec<(Tree, Token)> =
            embed.iter().map(|(t, f)| (f.clone(), t.clone())).collect();
        if !is_hyper_trace(x, &hflag, &embed).ok()? || !is_hyper_trace(&hflag, x, &project).ok()? {
            return Some(format!(
                "retraction maps are not hypercoherent traces over {x}"
            ));
        }
        let identity: BTreeSet<(Token, Token)> =
            x.web().into_iter().map(|t| (t.clone(), t)).collect();
        if compose_relations(&embed, &project) != identity {
            return Some(format!("project ∘ embed ≠ Id over {x}"));
        }
        None
    });
    out.push(PropertyOutcome::new(
        "hflag",
        flag,
        format!(
            "{} spaces, families of trees of depth ≤ {depth}",
            flag_spaces.len()
        ),
    ));
    out
}

fn retract_embed_h(x: &Hypercoherence) -> Vec<(Token, Tree)> {
    x.web()
        .into_iter()
        .map(|t| (t.clone(), crate::trees::GenericTree::leaf(t)))
        .collect()
}

/// The skeleton of the sample structures in `data/`, with every assignment of
/// connectives to their five binary nodes.
pub fn sample_skeleton_formulas() -> Vec<Formula> {
    let leaves = [
        ("a", true),
        ("c", false),
        ("a", false),
        ("c", true),
        ("b", true),
        ("b", false),
    ];
    let atom = |i: usize| Formula::atom(leaves[i].0, leaves[i].1, i);
    let mut out = Vec::new();
    for c in 0..243usize {
        let pick = |k: u32| Connective::ALL[(c / 3usize.pow(k)) % 3];
        let left = Formula::binary(
            pick(1),
            Formula::binary(pick(2), atom(0), atom(1)),
            Formula::binary(pick(3), atom(2), atom(3)),
        );
        let right = Formula::binary(pick(4), atom(4), atom(5));
        out.push(Formula::binary(pick(0), left, right));
    }
    out
}

/// Every formula over the given atom sequence: all bracketings and all
/// connectives.
pub fn formulas_over(atoms: &[(&str, bool)]) -> Vec<Formula> {
    fn shapes(lo: usize, hi: usize, atoms: &[(&str, bool)]) -> Vec<Formula> {
        if hi - lo == 1 {
            return vec![Formula::atom(atoms[lo].0, atoms[lo].1, lo)];
        }
        let mut out = Vec::new();
        for mid in lo + 1..hi {
            let lefts = shapes(lo, mid, atoms);
            let rights = shapes(mid, hi, atoms);
            for l in &lefts {
                for r in &rights {
                    for c in Connective::ALL {
                        out.push(Formula::binary(c, l.clone(), r.clone()));
                    }
                }
            }
        }
        out
    }
    shapes(0, atoms.len(), atoms)
}

/// Structures checked by the proof-net suite: every matching of every
/// formula over `a a⊥`, over the orders of `a a⊥ b b⊥` and `a a⊥ a a⊥`,
/// and over the sample structures' atom sequence.
pub fn suite_structures() -> Vec<ProofStructure> {
    let mut formulas = formulas_over(&[("a", true), ("a", false)]);
    let mut sequences: BTreeSet<Vec<(&str, bool)>> = BTreeSet::new();
    for base in [
        [("a", true), ("a", false), ("b", true), ("b", false)],
        [("a", true), ("a", false), ("a", true), ("a", false)],
    ] {
        for perm in permutations(4) {
            sequences.insert(perm.iter().map(|&i| base[i]).collect());
        }
    }
    for seq in &sequences {
        formulas.extend(formulas_over(seq));
    }
    formulas.extend(sample_skeleton_formulas());
    formulas
        .into_iter()
        .flat_map(|f| {
            all_matchings(&f).into_iter().map(move |links| {
                ProofStructure::new(f.clone(), &links, Vec::new()).expect("matchings are valid")
            })
        })
        .collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn nets_suite(config: &SuiteConfig) -> Vec<PropertyOutcome> {
    let structures = suite_structures();
    let mut out = Vec::new();
    let count = format!("{} structures", structures.len());

    let agreement = first_failure(&structures, |s| {
        let catalog = catalog_interpretations(&s.formula().variables());
        let report = match semantic_correctness_check(s, &catalog) {
            Ok(r) => r,
            Err(e) => return Some(e.to_string()),
        };
        match (report.verdict.is_pass(), report.separating()) {
            (true, Some(o)) => Some(format!(
                "correct {} is not a clique under {}",
                one_line(s),
                o.interpretation
            )),
            (false, None) => Some(format!(
                "incorrect {} is a clique under every catalog entry",
                one_line(s)
            )),
            _ => None,
        }
    });
    out.push(PropertyOutcome::new(
        "semantic-agreement",
        agreement,
        count.clone(),
    ));

    let weakening = first_failure(&structures, |s| {
        if !is_correct_with_cap(s, config.circuit_cap).ok()?.is_pass() {
            return None;
        }
        for path in s.formula().binary_paths() {
            let mut f = s.formula().clone();
            let Some(Formula::Binary(c, ..)) = f.subformula(&path) else {
                continue;
            };
            let weaker = match c {
                Connective::Tensor => Connective::Before,
                Connective::Before => Connective::Par,
                Connective::Par => continue,
            };
            set_connective(&mut f, &path, weaker);
            let t = ProofStructure::new(f, &s.links(), Vec::new()).ok()?;
            if !is_correct_with_cap(&t, config.circuit_cap).ok()?.is_pass() {
                return Some(format!(
                    "weakening {} at {path:?} breaks correctness",
                    one_line(s)
                ));
            }
        }
        None
    });
    out.push(PropertyOutcome::new("weakening", weakening, count.clone()));

    let stability = first_failure(&structures, |s| {
        let interp = catalog_interpretations(&s.formula().variables()).pop()?;
        let expected = experiments(s, &interp).ok()?.len();
        let base_graph = s.dicograph().clone();
        for path in s.formula().binary_paths() {
            for rewrite in [
                Formula::commute_at as fn(&mut Formula, &[bool]) -> bool,
                Formula::reassociate_at,
            ] {
                let mut f = s.formula().clone();
                if !rewrite(&mut f, &path) {
                    continue;
                }
                let t = ProofStructure::new(f, &s.links(), Vec::new()).ok()?;
                if *t.dicograph() != base_graph {
                    return Some(format!(
                        "rewriting {} at {path:?} changes the dicograph",
                        one_line(s)
                    ));
                }
                if experiments(&t, &interp).ok()?.len() != expected {
                    return Some(format!(
                        "rewriting {} at {path:?} changes the result count",
                        one_line(s)
                    ));
                }
            }
        }
        None
    });
    out.push(PropertyOutcome::new("rewrite-stability", stability, count));
    out
}

fn set_connective(f: &mut Formula, path: &[bool], c: Connective) {
    match (f, path.split_first()) {
        (Formula::Binary(d, ..), None) => *d = c,
        (Formula::Binary(_, l, r), Some((&right, rest))) => {
            set_connective(if right { r } else { l }, rest, c)
        }
        _ => {}
    }
}

fn one_line(s: &ProofStructure) -> String {
    let links: Vec<String> = s.links().iter().map(|(u, v)| format!("{u}-{v}")).collect();
    format!("{} [{}]", s.formula(), links.join(" "))
}

/// Counts of `R` links by kind, for summaries.
pub fn link_counts(s: &ProofStructure) -> BTreeMap<&'static str, usize> {
    BTreeMap::from([
        ("arcs", s.dicograph().arcs().len()),
        ("edges", s.dicograph().edges().len()),
    ])
}
