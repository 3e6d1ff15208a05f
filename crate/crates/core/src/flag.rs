//! The flag modality on coherence spaces.
//!
//! `|flag A|` is the set of generic trees over `|A|`. Two distinct trees are
//! strictly coherent when they are strictly coherent in `A` at the least
//! point where they disagree. The web is infinite, so [`FlagSpace`] only
//! decides membership and classifies pairs.

use std::collections::BTreeSet;
use std::fmt;

use crate::coherence::{CohError, Coherence, CoherenceSpace, LinearTrace, Rel3, Token};
use crate::trees::{common_refinement, first_difference, GenericTree, PrefixCover};

pub type Tree = GenericTree<Token>;

/// `flag A` for a finite coherence space `A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlagSpace {
    base: CoherenceSpace,
}

impl FlagSpace {
    pub fn new(base: &CoherenceSpace) -> FlagSpace {
        FlagSpace { base: base.clone() }
    }

    pub fn base(&self) -> &CoherenceSpace {
        &self.base
    }

    /// A tree is a token of `flag A` when all its labels are tokens of `A`.
    pub fn contains(&self, tree: &Tree) -> bool {
        self.check_tree(tree).is_ok()
    }

    fn check_tree(&self, tree: &Tree) -> Result<(), CohError> {
        match tree
            .term()
            .labels()
            .into_iter()
            .find(|t| !self.base.contains(t))
        {
            None => Ok(()),
            Some(t) => Err(CohError::TokenNotInWeb {
                token: format!("{t} (in tree {tree})"),
                space: self.base.to_string(),
            }),
        }
    }
}

impl Coherence for FlagSpace {
    type Token = Tree;

    fn rel3(&self, f: &Tree, g: &Tree) -> Result<Rel3, CohError> {
        flag_rel3(&self.base, f, g)
    }
}

impl fmt::Display for FlagSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "flag {}", self.base)
    }
}

/// Classifies two trees in `flag A`. The only possible witness of strict
/// coherence or incoherence is the least disagreement point.
pub fn flag_rel3(a: &CoherenceSpace, f: &Tree, g: &Tree) -> Result<Rel3, CohError> {
    let space = FlagSpace::new(a);
    space.check_tree(f)?;
    space.check_tree(g)?;
    match first_difference(f, g) {
        None => Ok(Rel3::Equal),
        Some(m) => a.rel3(f.eval(&m), g.eval(&m)),
    }
}

/// First sampled pair whose classifications in `flag A` and `flag (A⊥)` are
/// not opposite.
pub fn flag_self_duality_violation<'a>(
    a: &CoherenceSpace,
    pairs: impl IntoIterator<Item = (&'a Tree, &'a Tree)>,
) -> Result<Option<(Tree, Tree)>, CohError> {
    let dual = crate::coherence::negation(a);
    for (f, g) in pairs {
        let here = flag_rel3(a, f, g)?;
        let there = flag_rel3(&dual, f, g)?;
        let consistent = if f == g {
            here == Rel3::Equal && there == Rel3::Equal
        } else {
            here.is_strict() && there == here.dual()
        };
        if !consistent {
            return Ok(Some((f.clone(), g.clone())));
        }
    }
    Ok(None)
}

pub fn flag_self_duality_check<'a>(
    a: &CoherenceSpace,
    pairs: impl IntoIterator<Item = (&'a Tree, &'a Tree)>,
) -> Result<bool, CohError> {
    Ok(flag_self_duality_violation(a, pairs)?.is_none())
}

pub fn split(h: &Tree) -> (Tree, Tree) {
    h.split()
}

pub fn merge(h0: &Tree, h1: &Tree) -> Tree {
    GenericTree::merge(h0.clone(), h1.clone())
}

/// Classification of `(h0, h1)` and `(g0, g1)` in `flag A ◁ flag A`.
pub fn flag_before_rel3(
    a: &CoherenceSpace,
    h: (&Tree, &Tree),
    g: (&Tree, &Tree),
) -> Result<Rel3, CohError> {
    Ok(Rel3::before(
        flag_rel3(a, h.0, g.0)?,
        flag_rel3(a, h.1, g.1)?,
    ))
}

/// First sampled pair on which `h ⌢ g [flag A]` and
/// `split h ⌢ split g [flag A ◁ flag A]` disagree.
pub fn contraction_iso_violation<'a>(
    a: &CoherenceSpace,
    pairs: impl IntoIterator<Item = (&'a Tree, &'a Tree)>,
) -> Result<Option<(Tree, Tree)>, CohError> {
    for (h, g) in pairs {
        let whole = flag_rel3(a, h, g)?;
        let (h0, h1) = split(h);
        let (g0, g1) = split(g);
        let halves = flag_before_rel3(a, (&h0, &h1), (&g0, &g1))?;
        if whole != halves {
            return Ok(Some((h.clone(), g.clone())));
        }
    }
    Ok(None)
}

pub fn contraction_iso_check<'a>(
    a: &CoherenceSpace,
    pairs: impl IntoIterator<Item = (&'a Tree, &'a Tree)>,
) -> Result<bool, CohError> {
    Ok(contraction_iso_violation(a, pairs)?.is_none())
}

/// Trace of `A ⊸ flag A`: every token to its constant tree.
pub fn retract_embed(a: &CoherenceSpace) -> Vec<(Token, Tree)> {
    a.web()
        .into_iter()
        .map(|t| (t.clone(), GenericTree::leaf(t)))
        .collect()
}

/// Trace of `flag A ⊸ A`: constant trees back to their value.
pub fn retract_project(a: &CoherenceSpace) -> Vec<(Tree, Token)> {
    a.web()
        .into_iter()
        .map(|t| (GenericTree::leaf(t.clone()), t))
        .collect()
}

/// The projection as a partial map: defined exactly on constant trees.
pub fn project_tree(tree: &Tree) -> Option<Token> {
    tree.as_leaf().cloned()
}

/// Relational composition of finite traces, `first` then `second`.
pub fn compose_relations<X, Y, Z>(first: &[(X, Y)], second: &[(Y, Z)]) -> BTreeSet<(X, Z)>
where
    X: Ord + Clone,
    Y: Eq,
    Z: Ord + Clone,
{
    let mut out = BTreeSet::new();
    for (x, y) in first {
        for (y2, z) in second {
            if y == y2 {
                out.insert((x.clone(), z.clone()));
            }
        }
    }
    out
}

fn check_alphabet(space: &CoherenceSpace, tree: &Tree, role: &str) -> Result<(), CohError> {
    match tree
        .term()
        .labels()
        .into_iter()
        .find(|t| !space.contains(t))
    {
        None => Ok(()),
        Some(t) => Err(CohError::SpaceMismatch(format!(
            "{role} tree {tree} uses {t}, which is not a token of {space}"
        ))),
    }
}

/// `(f, g) ∈ flag ℓ`: at every point the pair of values is in `ℓ`.
pub fn flag_lift_contains(l: &LinearTrace, f: &Tree, g: &Tree) -> Result<bool, CohError> {
    check_alphabet(l.source(), f, "input")?;
    check_alphabet(l.target(), g, "output")?;
    Ok(common_refinement(f, g)
        .into_iter()
        .all(|(_, a, b)| l.contains(a, b)))
}

/// Given `(f, h) ∈ flag(ℓ′ ∘ ℓ)`, builds a tree `g` over the middle space
/// with `(f, g) ∈ flag ℓ` and `(g, h) ∈ flag ℓ′`: on every piece of the
/// superposition of `f` and `h`, pick the least mediating token, then
/// normalise.
pub fn flag_compose_witness(
    first: &LinearTrace,
    second: &LinearTrace,
    f: &Tree,
    h: &Tree,
) -> Result<Tree, CohError> {
    let composite = first.then(second)?;
    if !flag_lift_contains(&composite, f, h)? {
        return Err(CohError::Precondition(format!(
            "({f}, {h}) is not in flag of the composite trace"
        )));
    }
    let mut pairs = Vec::new();
    for (word, a, c) in common_refinement(f, h) {
        let b = first
            .outputs(a)
            .find(|b| second.contains(b, c))
            .expect("a mediating token exists for pairs of the composite");
        pairs.push((word, b.clone()));
    }
    Ok(GenericTree::from_pairs(&PrefixCover::new(pairs))
        .expect("superposition words partition the Cantor space"))
}

/// The three naturality squares of the non-comonad argument.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Square {
    A,
    B,
    AB,
}

impl fmt::Display for Square {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Square::A => "square a",
            Square::B => "square b",
            Square::AB => "square ab",
        })
    }
}

/// One candidate counit fragment and the checks it fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CounitCandidate {
    /// `r_{1⊕1}` restricted to the fragment `{a̲, b̲, <a̲ b̲>}`.
    pub r: BTreeSet<(Tree, Token)>,
    /// `r_1` is `Id_1` (true) or empty (false).
    pub r_one: bool,
    pub failed_squares: Vec<Square>,
    /// The counit law at the unit space: `flag 1 ≅ 1` forces `r_1 = Id_1`.
    pub fails_counit_law: bool,
}

impl CounitCandidate {
    pub fn is_natural(&self) -> bool {
        self.failed_squares.is_empty()
    }

    pub fn survives(&self) -> bool {
        self.is_natural() && !self.fails_counit_law
    }
}

impl fmt::Display for CounitCandidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r: Vec<String> = self.r.iter().map(|(t, x)| format!("({t},{x})")).collect();
        write!(
            f,
            "r = {{{}}}, r_1 = {}",
            r.join(", "),
            if self.r_one { "Id" } else { "∅" }
        )
    }
}

#[derive(Clone, Debug)]
pub struct NoCounitReport {
    pub candidates: Vec<CounitCandidate>,
}

impl NoCounitReport {
    pub fn examined(&self) -> usize {
        self.candidates.len()
    }

    /// Candidates satisfying every naturality square.
    pub fn natural(&self) -> Vec<&CounitCandidate> {
        self.candidates.iter().filter(|c| c.is_natural()).collect()
    }

    /// Candidates satisfying the squares and the counit law.
    pub fn survivors(&self) -> Vec<&CounitCandidate> {
        self.candidates.iter().filter(|c| c.survives()).collect()
    }
}

/// Exhaustively checks every candidate component of a counit `flag ⇒ id`
/// on the fragment `{a̲, b̲, <a̲ b̲>}` of `flag(1 ⊕ 1)` against the squares
/// `r_1 ∘ flag(ℓ_x) = ℓ_x ∘ r_{1⊕1}` for `ℓ_a`, `ℓ_b`, `ℓ_ab`.
///
/// The empty transformation is natural; it is ruled out by the counit
/// law, reported separately in [`CounitCandidate::fails_counit_law`].
pub fn verify_no_counit() -> NoCounitReport {
    let two = CoherenceSpace::one_plus_one();
    let one = CoherenceSpace::one();
    let (a, b, star) = (Token::atom("a"), Token::atom("b"), Token::star());
    let maps = [
        (Square::A, vec![(a.clone(), star.clone())]),
        (Square::B, vec![(b.clone(), star.clone())]),
        (
            Square::AB,
            vec![(a.clone(), star.clone()), (b.clone(), star.clone())],
        ),
    ];
    let maps: Vec<(Square, LinearTrace)> = maps
        .into_iter()
        .map(|(sq, pairs)| {
            let trace = LinearTrace::new(&two, &one, pairs).expect("ℓ_x are linear");
            (sq, trace)
        })
        .collect();

    let fragment = vec![
        GenericTree::leaf(a.clone()),
        GenericTree::leaf(b.clone()),
        GenericTree::merge(GenericTree::leaf(a.clone()), GenericTree::leaf(b.clone())),
    ];
    let all_pairs: Vec<(Tree, Token)> = fragment
        .iter()
        .flat_map(|t| [(t.clone(), a.clone()), (t.clone(), b.clone())])
        .collect();
    // |flag 1| has the single constant tree *.
    let star_tree = GenericTree::leaf(star.clone());

    let mut candidates = Vec::new();
    for mask in 0u32..(1 << all_pairs.len()) {
        let r: BTreeSet<(Tree, Token)> = all_pairs
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, p)| p.clone())
            .collect();
        for r_one in [false, true] {
            let mut failed = Vec::new();
            for (sq, l) in &maps {
                for t in &fragment {
                    // r_1 ∘ flag(ℓ_x) relates t to * iff (t, *) ∈ flag ℓ_x and r_1 = Id
                    let lhs = r_one
                        && flag_lift_contains(l, t, &star_tree)
                            .expect("fragment trees are over 1⊕1");
                    // ℓ_x ∘ r relates t to * iff r maps t to something ℓ_x sends to *
                    let rhs = r.iter().any(|(u, x)| u == t && l.contains(x, &star));
                    if lhs != rhs {
                        failed.push(*sq);
                        break;
                    }
                }
            }
            candidates.push(CounitCandidate {
                r: r.clone(),
                r_one,
                failed_squares: failed,
                fails_counit_law: !r_one,
            });
        }
    }
    NoCounitReport { candidates }
}
