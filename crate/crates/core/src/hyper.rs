//! Hypercoherences and the flag modality on them.
//!
//! A hypercoherence is a web with a set `Γ` of finite non-empty subsets
//! containing every singleton. Everything here works on `Γ* = Γ` minus the
//! singletons. Compound spaces only look at the size of a subset and its
//! two projections, so the membership rules are written once, generically,
//! and reused for finite spaces and for `flag X`.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::coherence::Token;
use crate::syntax::{comma_list, Cursor, Joined, ParseError};
use crate::trees::{refine_many, GenericTree};

/// Largest web whose subsets are enumerated explicitly.
pub const SUBSET_ENUMERATION_CAP: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HyperError {
    #[error("token {token} is not in the web of {space}")]
    TokenNotInWeb { token: String, space: String },
    #[error("atomic coherence is only defined on non-empty sets")]
    EmptySet,
    #[error("{size} tokens exceed the subset enumeration cap of {cap}")]
    WebTooLarge { size: usize, cap: usize },
    #[error("invalid atomic coherence: {0}")]
    InvalidGamma(String),
}

/// A space with atomic coherence.
pub trait Hyper {
    type Token: Clone + Ord + fmt::Debug;

    fn contains(&self, token: &Self::Token) -> bool;

    /// Strict atomic coherence. Singletons are never in `Γ*`.
    fn in_gamma_star(&self, w: &BTreeSet<Self::Token>) -> Result<bool, HyperError>;

    fn in_gamma(&self, w: &BTreeSet<Self::Token>) -> Result<bool, HyperError> {
        match w.len() {
            0 => Err(HyperError::EmptySet),
            1 => {
                let t = w.iter().next().expect("one element");
                if self.contains(t) {
                    Ok(true)
                } else {
                    Err(HyperError::TokenNotInWeb {
                        token: format!("{t:?}"),
                        space: "the space".into(),
                    })
                }
            }
            _ => self.in_gamma_star(w),
        }
    }
}

fn gamma_of<X: Hyper>(x: &X, w: &BTreeSet<X::Token>) -> Result<bool, HyperError> {
    x.in_gamma(w)
}

/// `w ∈ Γ*(X ⊗ Y)` from `#w` and the projections of `w`.
pub fn tensor_gamma_star<X: Hyper, Y: Hyper>(
    x: &X,
    y: &Y,
    size: usize,
    left: &BTreeSet<X::Token>,
    right: &BTreeSet<Y::Token>,
) -> Result<bool, HyperError> {
    if size < 2 {
        return Ok(false);
    }
    Ok(gamma_of(x, left)? && gamma_of(y, right)?)
}

/// `w ∈ Γ*(X ⊸ Y)`: if `π1 w ∈ Γ(X)` then `π2 w ∈ Γ(Y)`, and if moreover
/// `#π1 w ≥ 2` then `#π2 w ≥ 2`.
pub fn lollipop_gamma_star<X: Hyper, Y: Hyper>(
    x: &X,
    y: &Y,
    size: usize,
    left: &BTreeSet<X::Token>,
    right: &BTreeSet<Y::Token>,
) -> Result<bool, HyperError> {
    if size < 2 {
        return Ok(false);
    }
    let input = gamma_of(x, left)?;
    let output = gamma_of(y, right)?;
    Ok((!input || output) && (!(input && left.len() >= 2) || (output && right.len() >= 2)))
}

/// `w ∈ Γ*(X ◁ Y)` iff `π1 w ∈ Γ*(X)`, or `#π1 w = 1` and `π2 w ∈ Γ*(Y)`.
pub fn before_gamma_star<X: Hyper, Y: Hyper>(
    x: &X,
    y: &Y,
    size: usize,
    left: &BTreeSet<X::Token>,
    right: &BTreeSet<Y::Token>,
) -> Result<bool, HyperError> {
    if size < 2 {
        return Ok(false);
    }
    // evaluate both sides so tokens outside the webs are always reported
    let first = gamma_of(x, left)? && left.len() >= 2;
    let second = gamma_of(y, right)? && right.len() >= 2;
    Ok(first || (left.len() == 1 && second))
}

/// A finite hypercoherence.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Hypercoherence(Arc<Shape>);

#[derive(PartialEq, Eq, Hash)]
enum Shape {
    Base {
        web: BTreeSet<Token>,
        gamma_star: BTreeSet<BTreeSet<Token>>,
    },
    Neg(Hypercoherence),
    Tensor(Hypercoherence, Hypercoherence),
    Lollipop(Hypercoherence, Hypercoherence),
    Before(Hypercoherence, Hypercoherence),
}

fn projections(w: &BTreeSet<Token>) -> Option<(BTreeSet<Token>, BTreeSet<Token>)> {
    let mut left = BTreeSet::new();
    let mut right = BTreeSet::new();
    for t in w {
        let (l, r) = t.as_pair()?;
        left.insert(l.clone());
        right.insert(r.clone());
    }
    Some((left, right))
}

impl Hypercoherence {
    /// Builds a base hypercoherence from its web and the non-singleton
    /// members of `Γ`. Listed singletons are accepted and ignored.
    pub fn new(
        web: impl IntoIterator<Item = Token>,
        gamma: impl IntoIterator<Item = BTreeSet<Token>>,
    ) -> Result<Hypercoherence, HyperError> {
        let web: BTreeSet<Token> = web.into_iter().collect();
        let mut gamma_star = BTreeSet::new();
        for set in gamma {
            if set.is_empty() {
                return Err(HyperError::InvalidGamma("the empty set".into()));
            }
            if let Some(t) = set.iter().find(|t| !web.contains(t)) {
                return Err(HyperError::InvalidGamma(format!("{t} is not in the web")));
            }
            if set.len() >= 2 {
                gamma_star.insert(set);
            }
        }
        Ok(Hypercoherence(Arc::new(Shape::Base { web, gamma_star })))
    }

    pub fn from_names(names: &[&str], gamma: &[&[&str]]) -> Result<Hypercoherence, HyperError> {
        Hypercoherence::new(
            names.iter().map(|n| Token::atom(n)),
            gamma
                .iter()
                .map(|set| set.iter().map(|n| Token::atom(n)).collect()),
        )
    }

    pub fn web(&self) -> Vec<Token> {
        match &*self.0 {
            Shape::Base { web, .. } => web.iter().cloned().collect(),
            Shape::Neg(x) => x.web(),
            Shape::Tensor(x, y) | Shape::Lollipop(x, y) | Shape::Before(x, y) => {
                let right = y.web();
                x.web()
                    .into_iter()
                    .flat_map(|a| right.iter().map(move |b| Token::pair(a.clone(), b.clone())))
                    .collect()
            }
        }
    }

    pub fn web_size(&self) -> usize {
        match &*self.0 {
            Shape::Base { web, .. } => web.len(),
            Shape::Neg(x) => x.web_size(),
            Shape::Tensor(x, y) | Shape::Lollipop(x, y) | Shape::Before(x, y) => {
                x.web_size() * y.web_size()
            }
        }
    }

    fn not_in_web(&self, w: &BTreeSet<Token>) -> HyperError {
        let token = w
            .iter()
            .find(|t| !Hyper::contains(self, t))
            .map_or_else(String::new, |t| t.to_string());
        HyperError::TokenNotInWeb {
            token,
            space: self.to_string(),
        }
    }

    /// All members of `Γ*`, by explicit enumeration of subsets.
    pub fn gamma_star_sets(&self) -> Result<Vec<BTreeSet<Token>>, HyperError> {
        let web = self.web();
        let mut out = Vec::new();
        for w in subsets(&web, 2)? {
            if self.in_gamma_star(&w)? {
                out.push(w);
            }
        }
        Ok(out)
    }

    /// Renders the space as a `hspace NAME { ... }` literal.
    pub fn to_literal(&self, name: &str) -> Result<String, HyperError> {
        let sets: Vec<String> = self
            .gamma_star_sets()?
            .iter()
            .map(|s| format!("{{{}}}", Joined(&s.iter().collect::<Vec<_>>(), ",")))
            .collect();
        Ok(format!(
            "hspace {name} {{ tokens: {}; gamma: {}; }}",
            Joined(&self.web(), ", "),
            Joined(&sets, ", ")
        ))
    }
}

/// Subsets of `web` with at least `min` elements.
pub fn subsets<T: Clone + Ord>(web: &[T], min: usize) -> Result<Vec<BTreeSet<T>>, HyperError> {
    if web.len() > SUBSET_ENUMERATION_CAP {
        return Err(HyperError::WebTooLarge {
            size: web.len(),
            cap: SUBSET_ENUMERATION_CAP,
        });
    }
    Ok((0u32..(1 << web.len()))
        .filter(|mask| mask.count_ones() as usize >= min)
        .map(|mask| {
            web.iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, t)| t.clone())
                .collect()
        })
        .collect())
}

impl Hyper for Hypercoherence {
    type Token = Token;

    fn contains(&self, token: &Token) -> bool {
        match &*self.0 {
            Shape::Base { web, .. } => web.contains(token),
            Shape::Neg(x) => Hyper::contains(x, token),
            Shape::Tensor(x, y) | Shape::Lollipop(x, y) | Shape::Before(x, y) => token
                .as_pair()
                .is_some_and(|(a, b)| Hyper::contains(x, a) && Hyper::contains(y, b)),
        }
    }

    fn in_gamma_star(&self, w: &BTreeSet<Token>) -> Result<bool, HyperError> {
        if w.is_empty() {
            return Err(HyperError::EmptySet);
        }
        if !w.iter().all(|t| Hyper::contains(self, t)) {
            return Err(self.not_in_web(w));
        }
        if w.len() == 1 {
            return Ok(false);
        }
        match &*self.0 {
            Shape::Base { gamma_star, .. } => Ok(gamma_star.contains(w)),
            Shape::Neg(x) => Ok(!x.in_gamma_star(w)?),
            Shape::Tensor(x, y) | Shape::Lollipop(x, y) | Shape::Before(x, y) => {
                let (left, right) = projections(w).expect("membership checked");
                match &*self.0 {
                    Shape::Tensor(..) => tensor_gamma_star(x, y, w.len(), &left, &right),
                    Shape::Lollipop(..) => lollipop_gamma_star(x, y, w.len(), &left, &right),
                    _ => before_gamma_star(x, y, w.len(), &left, &right),
                }
            }
        }
    }
}

impl fmt::Display for Hypercoherence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            Shape::Base { web, gamma_star } => {
                let web: Vec<&Token> = web.iter().collect();
                let sets: Vec<String> = gamma_star
                    .iter()
                    .map(|s| format!("{{{}}}", Joined(&s.iter().collect::<Vec<_>>(), ",")))
                    .collect();
                write!(f, "{{{}", Joined(&web, ","))?;
                if !sets.is_empty() {
                    write!(f, " | {}", Joined(&sets, ","))?;
                }
                f.write_str("}")
            }
            Shape::Neg(x) => write!(f, "{x}⊥"),
            Shape::Tensor(x, y) => write!(f, "({x} ⊗ {y})"),
            Shape::Lollipop(x, y) => write!(f, "({x} ⊸ {y})"),
            Shape::Before(x, y) => write!(f, "({x} ◁ {y})"),
        }
    }
}

impl fmt::Debug for Hypercoherence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `X⊥ = (|X|, P*_fin(|X|) ∖ Γ*(X))`. Negating twice gives back `X`.
pub fn hc_negation(x: &Hypercoherence) -> Hypercoherence {
    match &*x.0 {
        Shape::Neg(inner) => inner.clone(),
        _ => Hypercoherence(Arc::new(Shape::Neg(x.clone()))),
    }
}

pub fn hc_tensor(x: &Hypercoherence, y: &Hypercoherence) -> Hypercoherence {
    Hypercoherence(Arc::new(Shape::Tensor(x.clone(), y.clone())))
}

/// `X ⅋ Y = (X⊥ ⊗ Y⊥)⊥`.
pub fn hc_par(x: &Hypercoherence, y: &Hypercoherence) -> Hypercoherence {
    hc_negation(&hc_tensor(&hc_negation(x), &hc_negation(y)))
}

pub fn hc_lollipop(x: &Hypercoherence, y: &Hypercoherence) -> Hypercoherence {
    Hypercoherence(Arc::new(Shape::Lollipop(x.clone(), y.clone())))
}

pub fn hc_before(x: &Hypercoherence, y: &Hypercoherence) -> Hypercoherence {
    Hypercoherence(Arc::new(Shape::Before(x.clone(), y.clone())))
}

/// Same web and same `Γ*`, compared by enumerating subsets.
pub fn hc_relation_equal(x: &Hypercoherence, y: &Hypercoherence) -> Result<bool, HyperError> {
    let web = x.web();
    let mut sorted = web.clone();
    sorted.sort();
    let mut other = y.web();
    other.sort();
    if sorted != other {
        return Ok(false);
    }
    for w in subsets(&web, 2)? {
        if x.in_gamma_star(&w)? != y.in_gamma_star(&w)? {
            return Ok(false);
        }
    }
    Ok(true)
}

pub type Tree = GenericTree<Token>;

/// `flag X` for a finite hypercoherence `X`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HFlag {
    base: Hypercoherence,
}

impl HFlag {
    pub fn new(base: &Hypercoherence) -> HFlag {
        HFlag { base: base.clone() }
    }

    pub fn base(&self) -> &Hypercoherence {
        &self.base
    }
}

impl Hyper for HFlag {
    type Token = Tree;

    fn contains(&self, tree: &Tree) -> bool {
        tree.term()
            .labels()
            .into_iter()
            .all(|t| Hyper::contains(&self.base, t))
    }

    fn in_gamma_star(&self, trees: &BTreeSet<Tree>) -> Result<bool, HyperError> {
        hflag_gamma_star(&self.base, trees)
    }
}

/// `{f1, …, fk} ∈ Γ*(flag X)`: at the least point where the trees do not
/// all agree, their set of values is in `Γ*(X)`.
pub fn hflag_gamma_star(x: &Hypercoherence, trees: &BTreeSet<Tree>) -> Result<bool, HyperError> {
    if trees.is_empty() {
        return Err(HyperError::EmptySet);
    }
    for tree in trees {
        if let Some(t) = tree
            .term()
            .labels()
            .into_iter()
            .find(|t| !Hyper::contains(x, t))
        {
            return Err(HyperError::TokenNotInWeb {
                token: format!("{t} (in tree {tree})"),
                space: x.to_string(),
            });
        }
    }
    if trees.len() < 2 {
        return Ok(false);
    }
    let refs: Vec<&Tree> = trees.iter().collect();
    for (_, labels) in refine_many(&refs) {
        let values: BTreeSet<Token> = labels.into_iter().cloned().collect();
        if values.len() >= 2 {
            return x.in_gamma_star(&values);
        }
    }
    Ok(false)
}

/// `h ↦ (h0, h1)` preserves atomic coherence between `flag X` and
/// `flag X ◁ flag X` on this family.
pub fn hflag_contraction_check(
    x: &Hypercoherence,
    family: &BTreeSet<Tree>,
) -> Result<bool, HyperError> {
    let flag = HFlag::new(x);
    let whole = flag.in_gamma_star(family)?;
    let halves: BTreeSet<(Tree, Tree)> = family.iter().map(|h| h.split()).collect();
    let left: BTreeSet<Tree> = halves.iter().map(|(h0, _)| h0.clone()).collect();
    let right: BTreeSet<Tree> = halves.iter().map(|(_, h1)| h1.clone()).collect();
    let split = before_gamma_star(&flag, &flag, halves.len(), &left, &right)?;
    Ok(whole == split && halves.len() == family.len())
}

/// Is every non-empty subset of `pairs` in `Γ(X ⊸ Y)`?
pub fn is_hyper_trace<X: Hyper, Y: Hyper>(
    x: &X,
    y: &Y,
    pairs: &[(X::Token, Y::Token)],
) -> Result<bool, HyperError> {
    for w in subsets(pairs, 1)? {
        let w: Vec<&(X::Token, Y::Token)> = pairs.iter().filter(|p| w.contains(p)).collect();
        let left: BTreeSet<X::Token> = w.iter().map(|(a, _)| a.clone()).collect();
        let right: BTreeSet<Y::Token> = w.iter().map(|(_, b)| b.clone()).collect();
        let ok = if w.len() == 1 {
            x.in_gamma(&left)? && y.in_gamma(&right)?
        } else {
            lollipop_gamma_star(x, y, w.len(), &left, &right)?
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Parses one or more `hspace NAME { tokens: ...; gamma: {a,b}, ...; }`
/// blocks. Singletons are implicit.
pub fn parse_hspaces(text: &str) -> Result<Vec<(String, Hypercoherence)>, ParseError> {
    let mut cur = Cursor::new(text);
    let mut out = Vec::new();
    while !cur.at_end() {
        cur.expect_keyword("hspace")?;
        let name = cur.name()?.to_string();
        cur.expect('{')?;
        let start = cur.pos();
        cur.expect_keyword("tokens")?;
        cur.expect(':')?;
        let tokens = comma_list(&mut cur, ';', Token::parse_from)?;
        let mut gamma = Vec::new();
        if cur.eat(';') && cur.eat_keyword("gamma") {
            cur.expect(':')?;
            gamma = comma_list(&mut cur, ';', |c| {
                c.expect('{')?;
                let set = comma_list(c, '}', Token::parse_from)?;
                c.expect('}')?;
                Ok(set.into_iter().collect::<BTreeSet<Token>>())
            })?;
            cur.eat(';');
        }
        cur.expect('}')?;
        let space = Hypercoherence::new(tokens, gamma)
            .map_err(|e| ParseError::new(start, format!("hspace {name}: {e}")))?;
        out.push((name, space));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(names: &[&str]) -> BTreeSet<Token> {
        names.iter().map(|n| Token::atom(n)).collect()
    }

    fn tree(s: &str) -> Tree {
        s.parse().unwrap()
    }

    fn pair_set(pairs: &[(&str, &str)]) -> BTreeSet<Token> {
        pairs
            .iter()
            .map(|(a, b)| Token::pair(Token::atom(a), Token::atom(b)))
            .collect()
    }

    #[test]
    fn negation_basics() {
        let x = Hypercoherence::from_names(&["a", "b", "c"], &[&["a", "b"]]).unwrap();
        let neg = hc_negation(&x);
        assert!(x.in_gamma_star(&set(&["a", "b"])).unwrap());
        assert!(!neg.in_gamma_star(&set(&["a", "b"])).unwrap());
        assert!(neg.in_gamma_star(&set(&["a", "b", "c"])).unwrap());
        assert!(neg.in_gamma(&set(&["a"])).unwrap());
        assert!(x.in_gamma(&set(&["c"])).unwrap());
        assert_eq!(hc_negation(&neg), x);
        assert!(matches!(
            x.in_gamma(&BTreeSet::new()),
            Err(HyperError::EmptySet)
        ));
        assert!(matches!(
            x.in_gamma_star(&set(&["a", "z"])),
            Err(HyperError::TokenNotInWeb { .. })
        ));
    }

    #[test]
    fn tensor_projections() {
        let x = Hypercoherence::from_names(&["a", "b"], &[]).unwrap();
        let y = Hypercoherence::from_names(&["u", "v"], &[&["u", "v"]]).unwrap();
        let t = hc_tensor(&x, &y);
        // w1 = {a}, w2 = {u, v}
        assert!(t
            .in_gamma_star(&pair_set(&[("a", "u"), ("a", "v")]))
            .unwrap());
        // w1 = {a, b} ∉ Γ(X)
        assert!(!t
            .in_gamma_star(&pair_set(&[("a", "u"), ("b", "u")]))
            .unwrap());
        assert!(t.in_gamma(&pair_set(&[("b", "v")])).unwrap());
    }

    #[test]
    fn lollipop_second_implication() {
        let x = Hypercoherence::from_names(&["a", "b"], &[&["a", "b"]]).unwrap();
        let y = Hypercoherence::from_names(&["u", "v"], &[]).unwrap();
        let l = hc_lollipop(&x, &y);
        // w1 = {a,b} ∈ Γ, #w1 ≥ 2, #w2 = 1
        assert!(!l
            .in_gamma_star(&pair_set(&[("a", "u"), ("b", "u")]))
            .unwrap());
        assert!(l
            .in_gamma(&pair_set(&[("a", "a")].map(|_| ("a", "u"))))
            .unwrap());
    }

    #[test]
    fn before_second_disjunct() {
        let x = Hypercoherence::from_names(&["a", "b"], &[]).unwrap();
        let y = Hypercoherence::from_names(&["u", "v"], &[&["u", "v"]]).unwrap();
        let b = hc_before(&x, &y);
        assert!(b
            .in_gamma_star(&pair_set(&[("a", "u"), ("a", "v")]))
            .unwrap());
        assert!(!b
            .in_gamma_star(&pair_set(&[("a", "u"), ("b", "v")]))
            .unwrap());
    }

    #[test]
    fn hflag_small_cases() {
        let x = Hypercoherence::from_names(&["a", "b"], &[&["a", "b"]]).unwrap();
        let one: BTreeSet<Tree> = [tree("a")].into();
        assert!(!hflag_gamma_star(&x, &one).unwrap());
        let fam: BTreeSet<Tree> = [tree("a"), tree("<a b>")].into();
        assert!(hflag_gamma_star(&x, &fam).unwrap());
        assert!(!hflag_gamma_star(&hc_negation(&x), &fam).unwrap());
        assert!(hflag_contraction_check(&x, &fam).unwrap());
    }

    #[test]
    fn literal_round_trip() {
        let text = "hspace X { tokens: a, b, c; gamma: {a,b}, {a,b,c}, {c}; }";
        let parsed = parse_hspaces(text).unwrap();
        let (name, x) = &parsed[0];
        assert_eq!(name, "X");
        assert!(x.in_gamma_star(&set(&["a", "b", "c"])).unwrap());
        assert!(!x.in_gamma_star(&set(&["b", "c"])).unwrap());
        let again = parse_hspaces(&x.to_literal("X").unwrap()).unwrap();
        assert_eq!(&again[0].1, x);
        assert!(parse_hspaces("hspace X { tokens: a; gamma: {a,q}; }").is_err());
    }
}
