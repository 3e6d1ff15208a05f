//! Finite coherence spaces and the multiplicative connectives.
//!
//! A [`CoherenceSpace`] is an immutable, cheaply clonable expression: base
//! spaces store their web and the set of strictly coherent unordered pairs,
//! compound spaces (`⊥`, `⊗`, `⅋`, `◁`, `▷`, sp-orders) derive their
//! coherence from their components. Tokens of compound spaces are nested
//! [`Token::Pair`]s, so decomposing a token is syntactic.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::syntax::{comma_list, Cursor, Joined, ParseError};

/// Default bound on web size for [`spaces_isomorphic`].
pub const DEFAULT_ISO_CAP: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CohError {
    #[error("token {token} is not in the web of {space}")]
    TokenNotInWeb { token: String, space: String },
    #[error("sp-order has {expected} leaves but {found} spaces were given")]
    ArityMismatch { expected: usize, found: usize },
    #[error("invalid sp-order: {0}")]
    InvalidOrder(String),
    #[error("invalid coherence relation: {0}")]
    InvalidRelation(String),
    #[error("space mismatch: {0}")]
    SpaceMismatch(String),
    #[error("pairs are not a clique of {from} ⊸ {to}")]
    NotLinear { from: String, to: String },
    #[error("tokens are not a clique of {space}")]
    NotAClique { space: String },
    #[error("web of {size} tokens exceeds the search cap of {cap}")]
    WebTooLarge { size: usize, cap: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
}

/// A token of a web. Tokens of compound spaces are pairs of component tokens.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Token {
    Atom(Arc<str>),
    Pair(Arc<Token>, Arc<Token>),
}

impl Token {
    pub fn atom(name: &str) -> Token {
        Token::Atom(Arc::from(name))
    }

    pub fn pair(left: Token, right: Token) -> Token {
        Token::Pair(Arc::new(left), Arc::new(right))
    }

    /// The unique token `*` of the unit space.
    pub fn star() -> Token {
        Token::atom("*")
    }

    pub fn as_pair(&self) -> Option<(&Token, &Token)> {
        match self {
            Token::Pair(l, r) => Some((l, r)),
            Token::Atom(_) => None,
        }
    }

    pub(crate) fn parse_from(cur: &mut Cursor<'_>) -> Result<Token, ParseError> {
        if cur.eat('(') {
            let left = Token::parse_from(cur)?;
            cur.expect(',')?;
            let right = Token::parse_from(cur)?;
            cur.expect(')')?;
            Ok(Token::pair(left, right))
        } else {
            Ok(Token::atom(cur.name()?))
        }
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Atom(name) => f.write_str(name),
            Token::Pair(l, r) => write!(f, "({l},{r})"),
        }
    }
}

impl fmt::Debug for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Token {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut cur = Cursor::new(s);
        let token = Token::parse_from(&mut cur)?;
        cur.finish()?;
        Ok(token)
    }
}

/// Three-way classification of a pair of tokens: strictly incoherent,
/// equal, or strictly coherent. Exactly one holds for any pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rel3 {
    Sincoh,
    Equal,
    Scoh,
}

impl Rel3 {
    pub fn is_coherent(self) -> bool {
        self != Rel3::Sincoh
    }

    pub fn is_strict(self) -> bool {
        self != Rel3::Equal
    }

    /// Classification of the same pair in the negated space.
    pub fn dual(self) -> Rel3 {
        match self {
            Rel3::Sincoh => Rel3::Scoh,
            Rel3::Equal => Rel3::Equal,
            Rel3::Scoh => Rel3::Sincoh,
        }
    }

    pub fn tensor(left: Rel3, right: Rel3) -> Rel3 {
        if left == Rel3::Equal && right == Rel3::Equal {
            Rel3::Equal
        } else if left.is_coherent() && right.is_coherent() {
            Rel3::Scoh
        } else {
            Rel3::Sincoh
        }
    }

    pub fn par(left: Rel3, right: Rel3) -> Rel3 {
        if left == Rel3::Equal && right == Rel3::Equal {
            Rel3::Equal
        } else if left == Rel3::Scoh || right == Rel3::Scoh {
            Rel3::Scoh
        } else {
            Rel3::Sincoh
        }
    }

    /// `◁`: the left component decides unless it is equal.
    pub fn before(left: Rel3, right: Rel3) -> Rel3 {
        match left {
            Rel3::Equal => right,
            strict => strict,
        }
    }

    pub fn lollipop(input: Rel3, output: Rel3) -> Rel3 {
        Rel3::par(input.dual(), output)
    }
}

impl fmt::Display for Rel3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rel3::Sincoh => "⌣",
            Rel3::Equal => "=",
            Rel3::Scoh => "⌢",
        })
    }
}

/// Anything whose tokens can be classified pairwise: finite coherence
/// spaces, and intensional ones like `flag A`.
pub trait Coherence {
    type Token: Clone + Ord + fmt::Debug;

    fn rel3(&self, x: &Self::Token, y: &Self::Token) -> Result<Rel3, CohError>;

    fn coherent(&self, x: &Self::Token, y: &Self::Token) -> Result<bool, CohError> {
        self.rel3(x, y).map(Rel3::is_coherent)
    }
}

/// Pairwise coherence check. Tokens outside the web make the set a
/// non-clique.
pub fn is_clique<'a, C, I>(space: &C, tokens: I) -> bool
where
    C: Coherence,
    C::Token: 'a,
    I: IntoIterator<Item = &'a C::Token>,
{
    let tokens: Vec<&C::Token> = tokens.into_iter().collect();
    for (i, x) in tokens.iter().enumerate() {
        for y in &tokens[i..] {
            match space.rel3(x, y) {
                Ok(rel) if rel.is_coherent() => {}
                _ => return false,
            }
        }
    }
    true
}

/// Checks that a set of input/output pairs is a clique of `source ⊸ target`,
/// for any two pairwise-classifiable spaces.
pub fn is_trace_clique<'a, S, T, I>(source: &S, target: &T, pairs: I) -> bool
where
    S: Coherence,
    T: Coherence,
    S::Token: 'a,
    T::Token: 'a,
    I: IntoIterator<Item = &'a (S::Token, T::Token)>,
{
    let pairs: Vec<&(S::Token, T::Token)> = pairs.into_iter().collect();
    for (i, (a, b)) in pairs.iter().map(|p| (&p.0, &p.1)).enumerate() {
        for (a2, b2) in pairs[i..].iter().map(|p| (&p.0, &p.1)) {
            let rel = match (source.rel3(a, a2), target.rel3(b, b2)) {
                (Ok(input), Ok(output)) => Rel3::lollipop(input, output),
                _ => return false,
            };
            if !rel.is_coherent() {
                return false;
            }
        }
    }
    true
}

/// A finite coherence space.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CoherenceSpace(Arc<Shape>);

#[derive(PartialEq, Eq, Hash)]
enum Shape {
    Base {
        web: BTreeSet<Token>,
        // unordered pairs stored with the smaller token first
        scoh: BTreeSet<(Token, Token)>,
    },
    Neg(CoherenceSpace),
    Tensor(CoherenceSpace, CoherenceSpace),
    Par(CoherenceSpace, CoherenceSpace),
    Before(CoherenceSpace, CoherenceSpace),
    /// `A ▷ B`, held as `B ◁ A`; tokens are swapped on the way in.
    After(CoherenceSpace),
    Sp {
        order: SpOrder,
        spaces: Vec<CoherenceSpace>,
        preds: Vec<Vec<usize>>,
    },
}

fn ordered(x: &Token, y: &Token) -> (Token, Token) {
    if x <= y {
        (x.clone(), y.clone())
    } else {
        (y.clone(), x.clone())
    }
}

fn product(left: &[Token], right: &[Token]) -> Vec<Token> {
    let mut out = Vec::with_capacity(left.len() * right.len());
    for a in left {
        for b in right {
            out.push(Token::pair(a.clone(), b.clone()));
        }
    }
    out
}

impl CoherenceSpace {
    /// Builds a base space from its web and its strictly coherent pairs.
    pub fn new(
        web: impl IntoIterator<Item = Token>,
        scoh: impl IntoIterator<Item = (Token, Token)>,
    ) -> Result<Self, CohError> {
        let web: BTreeSet<Token> = web.into_iter().collect();
        let mut pairs = BTreeSet::new();
        for (x, y) in scoh {
            for t in [&x, &y] {
                if !web.contains(t) {
                    return Err(CohError::InvalidRelation(format!(
                        "token {t} of a coherent pair is not in the web"
                    )));
                }
            }
            if x == y {
                return Err(CohError::InvalidRelation(format!(
                    "({x},{x}) is not a pair of distinct tokens; reflexivity is implicit"
                )));
            }
            pairs.insert(ordered(&x, &y));
        }
        Ok(CoherenceSpace(Arc::new(Shape::Base { web, scoh: pairs })))
    }

    /// Convenience constructor from atom names.
    pub fn from_names(names: &[&str], scoh: &[(&str, &str)]) -> Result<Self, CohError> {
        CoherenceSpace::new(
            names.iter().map(|n| Token::atom(n)),
            scoh.iter().map(|(x, y)| (Token::atom(x), Token::atom(y))),
        )
    }

    /// Every pair of distinct tokens strictly coherent.
    pub fn complete(names: &[&str]) -> Self {
        let tokens: Vec<Token> = names.iter().map(|n| Token::atom(n)).collect();
        let mut pairs = Vec::new();
        for (i, x) in tokens.iter().enumerate() {
            for y in &tokens[i + 1..] {
                pairs.push((x.clone(), y.clone()));
            }
        }
        CoherenceSpace::new(tokens, pairs).expect("complete graph over its own web")
    }

    /// Every pair of distinct tokens strictly incoherent.
    pub fn discrete(names: &[&str]) -> Self {
        CoherenceSpace::new(names.iter().map(|n| Token::atom(n)), []).expect("empty relation")
    }

    /// The unit space with web `{*}`.
    pub fn one() -> Self {
        CoherenceSpace::discrete(&["*"])
    }

    /// The space `1 ⊕ 1`: web `{a, b}` with `a ⌣ b`.
    pub fn one_plus_one() -> Self {
        CoherenceSpace::discrete(&["a", "b"])
    }

    pub fn is_base(&self) -> bool {
        matches!(&*self.0, Shape::Base { .. })
    }

    /// All tokens of the web, sorted.
    pub fn web(&self) -> Vec<Token> {
        match &*self.0 {
            Shape::Base { web, .. } => web.iter().cloned().collect(),
            Shape::Neg(a) => a.web(),
            Shape::Tensor(a, b) | Shape::Par(a, b) | Shape::Before(a, b) => {
                product(&a.web(), &b.web())
            }
            Shape::After(swapped) => {
                let mut web: Vec<Token> = swapped
                    .web()
                    .into_iter()
                    .map(|t| {
                        let (l, r) = t.as_pair().expect("product token");
                        Token::pair(r.clone(), l.clone())
                    })
                    .collect();
                web.sort();
                web
            }
            Shape::Sp { order, spaces, .. } => sp_web(order, spaces),
        }
    }

    pub fn web_size(&self) -> usize {
        match &*self.0 {
            Shape::Base { web, .. } => web.len(),
            Shape::Neg(a) | Shape::After(a) => a.web_size(),
            Shape::Tensor(a, b) | Shape::Par(a, b) | Shape::Before(a, b) => {
                a.web_size() * b.web_size()
            }
            Shape::Sp { spaces, .. } => spaces.iter().map(CoherenceSpace::web_size).product(),
        }
    }

    pub fn contains(&self, token: &Token) -> bool {
        self.rel3(token, token).is_ok()
    }

    /// Classifies a pair of tokens of the web.
    pub fn rel3(&self, x: &Token, y: &Token) -> Result<Rel3, CohError> {
        match &*self.0 {
            Shape::Base { web, scoh } => {
                for t in [x, y] {
                    if !web.contains(t) {
                        return Err(self.not_in_web(t));
                    }
                }
                Ok(if x == y {
                    Rel3::Equal
                } else if scoh.contains(&ordered(x, y)) {
                    Rel3::Scoh
                } else {
                    Rel3::Sincoh
                })
            }
            Shape::Neg(a) => a.rel3(x, y).map(Rel3::dual),
            Shape::Tensor(a, b) => {
                let ((x1, x2), (y1, y2)) = (self.split(x)?, self.split(y)?);
                Ok(Rel3::tensor(a.rel3(x1, y1)?, b.rel3(x2, y2)?))
            }
            Shape::Par(a, b) => {
                let ((x1, x2), (y1, y2)) = (self.split(x)?, self.split(y)?);
                Ok(Rel3::par(a.rel3(x1, y1)?, b.rel3(x2, y2)?))
            }
            Shape::Before(a, b) => {
                let ((x1, x2), (y1, y2)) = (self.split(x)?, self.split(y)?);
                Ok(Rel3::before(a.rel3(x1, y1)?, b.rel3(x2, y2)?))
            }
            Shape::After(swapped) => {
                let ((x1, x2), (y1, y2)) = (self.split(x)?, self.split(y)?);
                swapped.rel3(
                    &Token::pair(x2.clone(), x1.clone()),
                    &Token::pair(y2.clone(), y1.clone()),
                )
            }
            Shape::Sp {
                order,
                spaces,
                preds,
            } => {
                let mut rels = vec![Rel3::Equal; spaces.len()];
                sp_collect(order, spaces, x, y, &mut rels)
                    .ok_or_else(|| self.not_in_web(if self.contains(x) { y } else { x }))?;
                Ok(sp_clause(&rels, preds))
            }
        }
    }

    fn split<'t>(&self, token: &'t Token) -> Result<(&'t Token, &'t Token), CohError> {
        token.as_pair().ok_or_else(|| self.not_in_web(token))
    }

    fn not_in_web(&self, token: &Token) -> CohError {
        CohError::TokenNotInWeb {
            token: token.to_string(),
            space: self.to_string(),
        }
    }

    /// The same web and relation, as a base space.
    pub fn materialize(&self) -> CoherenceSpace {
        if self.is_base() {
            return self.clone();
        }
        let web = self.web();
        let mut pairs = Vec::new();
        for (i, x) in web.iter().enumerate() {
            for y in &web[i + 1..] {
                if self.rel3(x, y) == Ok(Rel3::Scoh) {
                    pairs.push((x.clone(), y.clone()));
                }
            }
        }
        CoherenceSpace::new(web, pairs).expect("relation derived from own web")
    }

    /// Strictly coherent unordered pairs, smaller token first.
    pub fn scoh_pairs(&self) -> Vec<(Token, Token)> {
        match &*self.materialize().0 {
            Shape::Base { scoh, .. } => scoh.iter().cloned().collect(),
            _ => unreachable!("materialize returns a base space"),
        }
    }

    /// Renders the space in the `space NAME { ... }` literal format.
    pub fn to_literal(&self, name: &str) -> String {
        let web = self.web();
        let pairs: Vec<String> = self
            .scoh_pairs()
            .iter()
            .map(|(x, y)| format!("({x},{y})"))
            .collect();
        format!(
            "space {name} {{ tokens: {}; scoh: {}; }}",
            Joined(&web, ", "),
            Joined(&pairs, ", ")
        )
    }
}

impl Coherence for CoherenceSpace {
    type Token = Token;

    fn rel3(&self, x: &Token, y: &Token) -> Result<Rel3, CohError> {
        CoherenceSpace::rel3(self, x, y)
    }
}

impl fmt::Display for CoherenceSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            Shape::Base { web, scoh } => {
                let web: Vec<&Token> = web.iter().collect();
                let pairs: Vec<String> = scoh.iter().map(|(x, y)| format!("{x}⌢{y}")).collect();
                write!(f, "{{{}", Joined(&web, ","))?;
                if !pairs.is_empty() {
                    write!(f, " | {}", Joined(&pairs, ","))?;
                }
                f.write_str("}")
            }
            Shape::Neg(a) => write!(f, "{a}⊥"),
            Shape::Tensor(a, b) => write!(f, "({a} ⊗ {b})"),
            Shape::Par(a, b) => write!(f, "({a} ⅋ {b})"),
            Shape::Before(a, b) => write!(f, "({a} ◁ {b})"),
            Shape::After(swapped) => match &*swapped.0 {
                Shape::Before(b, a) => write!(f, "({a} ▷ {b})"),
                _ => unreachable!("after wraps a before"),
            },
            Shape::Sp { order, spaces, .. } => {
                write!(f, "sp[{order}]({})", Joined(spaces, ", "))
            }
        }
    }
}

impl fmt::Debug for CoherenceSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `A⊥`. Negating twice gives back the original space.
pub fn negation(a: &CoherenceSpace) -> CoherenceSpace {
    match &*a.0 {
        Shape::Neg(inner) => inner.clone(),
        _ => CoherenceSpace(Arc::new(Shape::Neg(a.clone()))),
    }
}

pub fn tensor(a: &CoherenceSpace, b: &CoherenceSpace) -> CoherenceSpace {
    CoherenceSpace(Arc::new(Shape::Tensor(a.clone(), b.clone())))
}

pub fn par(a: &CoherenceSpace, b: &CoherenceSpace) -> CoherenceSpace {
    CoherenceSpace(Arc::new(Shape::Par(a.clone(), b.clone())))
}

pub fn before(a: &CoherenceSpace, b: &CoherenceSpace) -> CoherenceSpace {
    CoherenceSpace(Arc::new(Shape::Before(a.clone(), b.clone())))
}

/// `A ▷ B`, which is `B ◁ A` read with swapped components.
pub fn after(a: &CoherenceSpace, b: &CoherenceSpace) -> CoherenceSpace {
    CoherenceSpace(Arc::new(Shape::After(before(b, a))))
}

/// `A ⊸ B = A⊥ ⅋ B`.
pub fn lollipop(a: &CoherenceSpace, b: &CoherenceSpace) -> CoherenceSpace {
    par(&negation(a), b)
}

/// A series-parallel order on leaf positions `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SpOrder {
    Leaf(usize),
    Series(Box<SpOrder>, Box<SpOrder>),
    Parallel(Box<SpOrder>, Box<SpOrder>),
}

impl SpOrder {
    pub fn leaf(position: usize) -> SpOrder {
        SpOrder::Leaf(position)
    }

    pub fn series(first: SpOrder, then: SpOrder) -> SpOrder {
        SpOrder::Series(Box::new(first), Box::new(then))
    }

    pub fn parallel(left: SpOrder, right: SpOrder) -> SpOrder {
        SpOrder::Parallel(Box::new(left), Box::new(right))
    }

    /// Leaf positions in left-to-right order.
    pub fn positions(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.push_positions(&mut out);
        out
    }

    fn push_positions(&self, out: &mut Vec<usize>) {
        match self {
            SpOrder::Leaf(i) => out.push(*i),
            SpOrder::Series(l, r) | SpOrder::Parallel(l, r) => {
                l.push_positions(out);
                r.push_positions(out);
            }
        }
    }

    /// Checks that the positions are exactly `0..n` and returns `n`.
    pub fn validate(&self) -> Result<usize, CohError> {
        let mut positions = self.positions();
        let n = positions.len();
        positions.sort_unstable();
        if positions.iter().copied().eq(0..n) {
            Ok(n)
        } else {
            Err(CohError::InvalidOrder(format!(
                "leaf positions {positions:?} are not a permutation of 0..{n}"
            )))
        }
    }

    /// `preds[i]` lists every `j` with `j <_O i`.
    pub fn predecessors(&self) -> Vec<Vec<usize>> {
        let n = self.positions().into_iter().max().map_or(0, |m| m + 1);
        let mut preds = vec![Vec::new(); n];
        self.push_predecessors(&mut preds);
        for p in &mut preds {
            p.sort_unstable();
        }
        preds
    }

    fn push_predecessors(&self, preds: &mut [Vec<usize>]) {
        match self {
            SpOrder::Leaf(_) => {}
            SpOrder::Parallel(l, r) => {
                l.push_predecessors(preds);
                r.push_predecessors(preds);
            }
            SpOrder::Series(l, r) => {
                l.push_predecessors(preds);
                r.push_predecessors(preds);
                let earlier = l.positions();
                for i in r.positions() {
                    preds[i].extend_from_slice(&earlier);
                }
            }
        }
    }
}

impl fmt::Display for SpOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpOrder::Leaf(i) => write!(f, "{}", i + 1),
            SpOrder::Series(l, r) => write!(f, "({l} ◁ {r})"),
            SpOrder::Parallel(l, r) => write!(f, "({l} ⅋ {r})"),
        }
    }
}

fn sp_web(order: &SpOrder, spaces: &[CoherenceSpace]) -> Vec<Token> {
    match order {
        SpOrder::Leaf(i) => spaces[*i].web(),
        SpOrder::Series(l, r) | SpOrder::Parallel(l, r) => {
            product(&sp_web(l, spaces), &sp_web(r, spaces))
        }
    }
}

fn sp_collect(
    order: &SpOrder,
    spaces: &[CoherenceSpace],
    x: &Token,
    y: &Token,
    rels: &mut [Rel3],
) -> Option<()> {
    match order {
        SpOrder::Leaf(i) => {
            rels[*i] = spaces[*i].rel3(x, y).ok()?;
            Some(())
        }
        SpOrder::Series(l, r) | SpOrder::Parallel(l, r) => {
            let (x1, x2) = x.as_pair()?;
            let (y1, y2) = y.as_pair()?;
            sp_collect(l, spaces, x1, y1, rels)?;
            sp_collect(r, spaces, x2, y2, rels)
        }
    }
}

// Strictly coherent iff some component is strictly coherent while every
// component before it in the order is equal.
fn sp_clause(rels: &[Rel3], preds: &[Vec<usize>]) -> Rel3 {
    if rels.iter().all(|&r| r == Rel3::Equal) {
        return Rel3::Equal;
    }
    let witnessed = rels
        .iter()
        .enumerate()
        .any(|(i, &r)| r == Rel3::Scoh && preds[i].iter().all(|&j| rels[j] == Rel3::Equal));
    if witnessed {
        Rel3::Scoh
    } else {
        Rel3::Sincoh
    }
}

/// The space `O(A_1, …, A_n)` for an sp-order `O`, defined directly by the
/// order rather than through the binary connectives. Tokens nest following
/// the shape of the order term.
pub fn sp_space(order: &SpOrder, spaces: &[CoherenceSpace]) -> Result<CoherenceSpace, CohError> {
    let n = order.validate()?;
    if n != spaces.len() {
        return Err(CohError::ArityMismatch {
            expected: n,
            found: spaces.len(),
        });
    }
    Ok(CoherenceSpace(Arc::new(Shape::Sp {
        order: order.clone(),
        spaces: spaces.to_vec(),
        preds: order.predecessors(),
    })))
}

/// Same web and same classification of every pair.
pub fn relation_equal(a: &CoherenceSpace, b: &CoherenceSpace) -> bool {
    let web = a.web();
    if web != b.web() {
        return false;
    }
    web.iter().enumerate().all(|(i, x)| {
        web[i + 1..]
            .iter()
            .all(|y| a.rel3(x, y).ok() == b.rel3(x, y).ok())
    })
}

/// A set of pairwise coherent tokens of a space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clique {
    space: CoherenceSpace,
    tokens: BTreeSet<Token>,
}

impl Clique {
    pub fn new(
        space: &CoherenceSpace,
        tokens: impl IntoIterator<Item = Token>,
    ) -> Result<Clique, CohError> {
        let tokens: BTreeSet<Token> = tokens.into_iter().collect();
        if !is_clique(space, &tokens) {
            return Err(CohError::NotAClique {
                space: space.to_string(),
            });
        }
        Ok(Clique {
            space: space.clone(),
            tokens,
        })
    }

    pub fn empty(space: &CoherenceSpace) -> Clique {
        Clique {
            space: space.clone(),
            tokens: BTreeSet::new(),
        }
    }

    pub fn space(&self) -> &CoherenceSpace {
        &self.space
    }

    pub fn tokens(&self) -> &BTreeSet<Token> {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn contains(&self, token: &Token) -> bool {
        self.tokens.contains(token)
    }
}

/// Is `pairs` a clique of `source ⊸ target`?
pub fn is_linear_trace<'a>(
    source: &CoherenceSpace,
    target: &CoherenceSpace,
    pairs: impl IntoIterator<Item = &'a (Token, Token)>,
) -> bool {
    is_trace_clique(source, target, pairs)
}

/// The trace of a linear morphism: a clique of `source ⊸ target`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearTrace {
    source: CoherenceSpace,
    target: CoherenceSpace,
    pairs: BTreeSet<(Token, Token)>,
}

impl LinearTrace {
    pub fn new(
        source: &CoherenceSpace,
        target: &CoherenceSpace,
        pairs: impl IntoIterator<Item = (Token, Token)>,
    ) -> Result<LinearTrace, CohError> {
        let pairs: BTreeSet<(Token, Token)> = pairs.into_iter().collect();
        if !is_linear_trace(source, target, &pairs) {
            return Err(CohError::NotLinear {
                from: source.to_string(),
                to: target.to_string(),
            });
        }
        Ok(LinearTrace {
            source: source.clone(),
            target: target.clone(),
            pairs,
        })
    }

    fn new_unchecked(
        source: &CoherenceSpace,
        target: &CoherenceSpace,
        pairs: BTreeSet<(Token, Token)>,
    ) -> LinearTrace {
        debug_assert!(is_linear_trace(source, target, &pairs));
        LinearTrace {
            source: source.clone(),
            target: target.clone(),
            pairs,
        }
    }

    pub fn identity(space: &CoherenceSpace) -> LinearTrace {
        let pairs = space.web().into_iter().map(|t| (t.clone(), t)).collect();
        LinearTrace::new_unchecked(space, space, pairs)
    }

    pub fn source(&self) -> &CoherenceSpace {
        &self.source
    }

    pub fn target(&self) -> &CoherenceSpace {
        &self.target
    }

    pub fn pairs(&self) -> &BTreeSet<(Token, Token)> {
        &self.pairs
    }

    pub fn contains(&self, input: &Token, output: &Token) -> bool {
        self.pairs.contains(&(input.clone(), output.clone()))
    }

    /// Outputs related to `input`.
    pub fn outputs<'a>(&'a self, input: &'a Token) -> impl Iterator<Item = &'a Token> + 'a {
        self.pairs
            .iter()
            .filter(move |(a, _)| a == input)
            .map(|(_, b)| b)
    }

    /// The same pairs read backwards, if that is linear from target to source.
    pub fn converse(&self) -> Result<LinearTrace, CohError> {
        LinearTrace::new(
            &self.target,
            &self.source,
            self.pairs.iter().map(|(a, b)| (b.clone(), a.clone())),
        )
    }

    /// The trace as a clique of `source ⊸ target`.
    pub fn as_clique(&self) -> Clique {
        Clique {
            space: lollipop(&self.source, &self.target),
            tokens: self
                .pairs
                .iter()
                .map(|(a, b)| Token::pair(a.clone(), b.clone()))
                .collect(),
        }
    }

    pub fn apply(&self, x: &Clique) -> Result<Clique, CohError> {
        trace_apply(self, x)
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &LinearTrace) -> Result<LinearTrace, CohError> {
        trace_compose(self, next)
    }
}

/// `F(x) = { β | ∃ α ∈ x, (α, β) ∈ t }`.
pub fn trace_apply(t: &LinearTrace, x: &Clique) -> Result<Clique, CohError> {
    if x.space != t.source {
        return Err(CohError::SpaceMismatch(format!(
            "clique of {} given to a trace from {}",
            x.space, t.source
        )));
    }
    let tokens = t
        .pairs
        .iter()
        .filter(|(a, _)| x.tokens.contains(a))
        .map(|(_, b)| b.clone())
        .collect();
    let image = Clique {
        space: t.target.clone(),
        tokens,
    };
    debug_assert!(is_clique(&image.space, &image.tokens));
    Ok(image)
}

/// Relational composition: `first` then `second`.
pub fn trace_compose(first: &LinearTrace, second: &LinearTrace) -> Result<LinearTrace, CohError> {
    if first.target != second.source {
        return Err(CohError::SpaceMismatch(format!(
            "cannot compose a trace into {} with a trace from {}",
            first.target, second.source
        )));
    }
    let mut by_input: BTreeMap<&Token, Vec<&Token>> = BTreeMap::new();
    for (b, c) in &second.pairs {
        by_input.entry(b).or_default().push(c);
    }
    let mut pairs = BTreeSet::new();
    for (a, b) in &first.pairs {
        for c in by_input.get(b).into_iter().flatten() {
            pairs.insert((a.clone(), (*c).clone()));
        }
    }
    Ok(LinearTrace::new_unchecked(
        &first.source,
        &second.target,
        pairs,
    ))
}

/// `A ◁ (B ◁ C) ⊸ (A ◁ B) ◁ C`, re-pairing `(α,(β,γ))` as `((α,β),γ)`.
pub fn before_assoc_iso(a: &CoherenceSpace, b: &CoherenceSpace, c: &CoherenceSpace) -> LinearTrace {
    let source = before(a, &before(b, c));
    let target = before(&before(a, b), c);
    let mut pairs = BTreeSet::new();
    for x in a.web() {
        for y in b.web() {
            for z in c.web() {
                pairs.insert((
                    Token::pair(x.clone(), Token::pair(y.clone(), z.clone())),
                    Token::pair(Token::pair(x.clone(), y.clone()), z),
                ));
            }
        }
    }
    LinearTrace::new_unchecked(&source, &target, pairs)
}

fn diagonal_trace(source: &CoherenceSpace, target: &CoherenceSpace) -> LinearTrace {
    let pairs = source.web().into_iter().map(|t| (t.clone(), t)).collect();
    LinearTrace::new_unchecked(source, target, pairs)
}

/// The identity on `|A| × |B|` as a morphism `A ⊗ B ⊸ A ◁ B`.
pub fn tensor_to_before(a: &CoherenceSpace, b: &CoherenceSpace) -> LinearTrace {
    diagonal_trace(&tensor(a, b), &before(a, b))
}

/// The identity on `|A| × |B|` as a morphism `A ◁ B ⊸ A ⅋ B`.
pub fn before_to_par(a: &CoherenceSpace, b: &CoherenceSpace) -> LinearTrace {
    diagonal_trace(&before(a, b), &par(a, b))
}

/// Searches for a bijection of webs preserving the three-way relation.
pub fn spaces_isomorphic(
    a: &CoherenceSpace,
    b: &CoherenceSpace,
) -> Result<Option<BTreeMap<Token, Token>>, CohError> {
    spaces_isomorphic_with_cap(a, b, DEFAULT_ISO_CAP)
}

pub fn spaces_isomorphic_with_cap(
    a: &CoherenceSpace,
    b: &CoherenceSpace,
    cap: usize,
) -> Result<Option<BTreeMap<Token, Token>>, CohError> {
    let (wa, wb) = (a.web(), b.web());
    let size = wa.len().max(wb.len());
    if size > cap {
        return Err(CohError::WebTooLarge { size, cap });
    }
    if wa.len() != wb.len() {
        return Ok(None);
    }
    let matrix = |space: &CoherenceSpace, web: &[Token]| -> Result<Vec<Vec<bool>>, CohError> {
        web.iter()
            .map(|x| {
                web.iter()
                    .map(|y| space.rel3(x, y).map(|r| r == Rel3::Scoh))
                    .collect()
            })
            .collect()
    };
    let (ma, mb) = (matrix(a, &wa)?, matrix(b, &wb)?);
    let degrees = |m: &[Vec<bool>]| -> Vec<usize> {
        m.iter()
            .map(|row| row.iter().filter(|&&c| c).count())
            .collect()
    };
    let (da, db) = (degrees(&ma), degrees(&mb));
    let (mut sa, mut sb) = (da.clone(), db.clone());
    sa.sort_unstable();
    sb.sort_unstable();
    if sa != sb {
        return Ok(None);
    }

    fn extend(
        i: usize,
        assign: &mut Vec<usize>,
        used: &mut [bool],
        ma: &[Vec<bool>],
        mb: &[Vec<bool>],
        da: &[usize],
        db: &[usize],
    ) -> bool {
        if i == ma.len() {
            return true;
        }
        for j in 0..mb.len() {
            if used[j] || da[i] != db[j] {
                continue;
            }
            if assign
                .iter()
                .enumerate()
                .any(|(k, &jk)| ma[i][k] != mb[j][jk])
            {
                continue;
            }
            used[j] = true;
            assign.push(j);
            if extend(i + 1, assign, used, ma, mb, da, db) {
                return true;
            }
            assign.pop();
            used[j] = false;
        }
        false
    }

    let mut assign = Vec::with_capacity(wa.len());
    let mut used = vec![false; wb.len()];
    if extend(0, &mut assign, &mut used, &ma, &mb, &da, &db) {
        Ok(Some(
            assign
                .iter()
                .enumerate()
                .map(|(i, &j)| (wa[i].clone(), wb[j].clone()))
                .collect(),
        ))
    } else {
        Ok(None)
    }
}

/// Parses one or more `space NAME { tokens: ...; scoh: (x,y), ...; }` blocks.
pub fn parse_spaces(text: &str) -> Result<Vec<(String, CoherenceSpace)>, ParseError> {
    let mut cur = Cursor::new(text);
    let mut out = Vec::new();
    while !cur.at_end() {
        out.push(parse_space_block(&mut cur)?);
    }
    Ok(out)
}

fn parse_space_block(cur: &mut Cursor<'_>) -> Result<(String, CoherenceSpace), ParseError> {
    cur.expect_keyword("space")?;
    let name = cur.name()?.to_string();
    cur.expect('{')?;
    let start = cur.pos();
    cur.expect_keyword("tokens")?;
    cur.expect(':')?;
    let tokens = comma_list(cur, ';', Token::parse_from)?;
    let mut pairs = Vec::new();
    if cur.eat(';') && cur.eat_keyword("scoh") {
        cur.expect(':')?;
        pairs = comma_list(cur, ';', |c| {
            c.expect('(')?;
            let x = Token::parse_from(c)?;
            c.expect(',')?;
            let y = Token::parse_from(c)?;
            c.expect(')')?;
            Ok((x, y))
        })?;
        cur.eat(';');
    }
    cur.expect('}')?;
    let space = CoherenceSpace::new(tokens, pairs)
        .map_err(|e| ParseError::new(start, format!("space {name}: {e}")))?;
    Ok((name, space))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Token {
        s.parse().unwrap()
    }

    #[test]
    fn rel3_basic_cases() {
        let one = CoherenceSpace::one();
        assert_eq!(one.rel3(&t("*"), &t("*")), Ok(Rel3::Equal));
        let ab = CoherenceSpace::one_plus_one();
        assert_eq!(ab.rel3(&t("a"), &t("b")), Ok(Rel3::Sincoh));
        let coh = CoherenceSpace::complete(&["a", "b"]);
        assert_eq!(coh.rel3(&t("a"), &t("b")), Ok(Rel3::Scoh));
        assert!(matches!(
            coh.rel3(&t("a"), &t("z")),
            Err(CohError::TokenNotInWeb { .. })
        ));
    }

    #[test]
    fn negation_flips_and_is_involutive() {
        let ab = CoherenceSpace::one_plus_one();
        let neg = negation(&ab);
        assert_eq!(neg.rel3(&t("a"), &t("b")), Ok(Rel3::Scoh));
        assert_eq!(negation(&neg), ab);
        assert_eq!(negation(&CoherenceSpace::one()).web(), vec![t("*")]);
    }

    #[test]
    fn connective_cells() {
        let coh = CoherenceSpace::complete(&["x", "y"]);
        let inc = CoherenceSpace::discrete(&["u", "v"]);
        let p = |a: &str, b: &str| Token::pair(t(a), t(b));
        // before: equal first component, strictly coherent second
        let bef = before(&inc, &coh);
        assert_eq!(bef.rel3(&p("u", "x"), &p("u", "y")), Ok(Rel3::Scoh));
        // tensor NE cell
        let ten = tensor(&coh, &inc);
        assert_eq!(ten.rel3(&p("x", "u"), &p("y", "v")), Ok(Rel3::Sincoh));
        // par SW cell
        let pa = par(&inc, &coh);
        assert_eq!(pa.rel3(&p("u", "x"), &p("v", "y")), Ok(Rel3::Scoh));
    }

    #[test]
    fn lollipop_table_matches_cells() {
        // rows: input relation, columns: output relation
        use Rel3::*;
        let table = [
            (Sincoh, [Scoh, Scoh, Scoh]),
            (Equal, [Sincoh, Equal, Scoh]),
            (Scoh, [Sincoh, Sincoh, Scoh]),
        ];
        for (input, row) in table {
            for (output, expected) in [Sincoh, Equal, Scoh].into_iter().zip(row) {
                assert_eq!(Rel3::lollipop(input, output), expected, "{input} {output}");
            }
        }
    }

    #[test]
    fn after_is_swapped_before() {
        let coh = CoherenceSpace::complete(&["x", "y"]);
        let inc = CoherenceSpace::discrete(&["u", "v"]);
        let aft = after(&coh, &inc);
        let bef = before(&inc, &coh);
        let web = aft.web();
        let swap = |tok: &Token| {
            let (l, r) = tok.as_pair().unwrap();
            Token::pair(r.clone(), l.clone())
        };
        for x in &web {
            for y in &web {
                assert_eq!(aft.rel3(x, y), bef.rel3(&swap(x), &swap(y)));
            }
        }
        assert_eq!(aft.to_string(), format!("({coh} ▷ {inc})"));
    }

    #[test]
    fn sp_order_validation_and_arity() {
        let bad = SpOrder::series(SpOrder::leaf(0), SpOrder::leaf(0));
        assert!(matches!(bad.validate(), Err(CohError::InvalidOrder(_))));
        let ok = SpOrder::series(SpOrder::leaf(0), SpOrder::leaf(1));
        let one = CoherenceSpace::one();
        assert!(matches!(
            sp_space(&ok, std::slice::from_ref(&one)),
            Err(CohError::ArityMismatch {
                expected: 2,
                found: 1
            })
        ));
        let single = sp_space(&SpOrder::leaf(0), std::slice::from_ref(&one)).unwrap();
        assert!(relation_equal(&single, &one));
        assert_eq!(ok.predecessors(), vec![vec![], vec![0]]);
    }

    #[test]
    fn clique_and_trace_basics() {
        let ab = CoherenceSpace::one_plus_one();
        let one = CoherenceSpace::one();
        assert!(is_clique(&ab, &[]));
        assert!(!is_clique(&ab, &[t("a"), t("b")]));
        assert!(!is_clique(&ab, &[t("q")]));
        let l_ab = [(t("a"), t("*")), (t("b"), t("*"))];
        assert!(is_linear_trace(&ab, &one, &l_ab));
        let trace = LinearTrace::new(&ab, &one, l_ab).unwrap();
        let image = trace.apply(&Clique::new(&ab, [t("a")]).unwrap()).unwrap();
        assert_eq!(image.tokens().iter().collect::<Vec<_>>(), vec![&t("*")]);
        assert!(trace.apply(&Clique::empty(&ab)).unwrap().is_empty());
        assert!(matches!(
            trace.apply(&Clique::empty(&one)),
            Err(CohError::SpaceMismatch(_))
        ));
    }

    #[test]
    fn trace_into_incoherent_pair_from_coherent_pair_is_not_linear() {
        let src = CoherenceSpace::complete(&["a", "b"]);
        let tgt = CoherenceSpace::discrete(&["x", "y"]);
        let pairs = [(t("a"), t("x")), (t("b"), t("y"))];
        assert!(!is_linear_trace(&src, &tgt, &pairs));
        assert!(matches!(
            LinearTrace::new(&src, &tgt, pairs),
            Err(CohError::NotLinear { .. })
        ));
    }

    #[test]
    fn compose_requires_matching_spaces() {
        let a = CoherenceSpace::one();
        let b = CoherenceSpace::one_plus_one();
        let id_a = LinearTrace::identity(&a);
        let id_b = LinearTrace::identity(&b);
        assert!(matches!(
            trace_compose(&id_a, &id_b),
            Err(CohError::SpaceMismatch(_))
        ));
        let l_a = LinearTrace::new(&b, &a, [(t("a"), t("*"))]).unwrap();
        assert_eq!(trace_compose(&l_a, &id_a).unwrap(), l_a);
        assert_eq!(trace_compose(&id_b, &l_a).unwrap(), l_a);
    }

    #[test]
    fn space_literal_round_trip() {
        let text = "space A { tokens: a, b, c; scoh: (a,b), (b,c); }\nspace B { tokens: *; }";
        let spaces = parse_spaces(text).unwrap();
        assert_eq!(spaces.len(), 2);
        let (name, a) = &spaces[0];
        assert_eq!(name, "A");
        assert_eq!(a.rel3(&t("a"), &t("c")), Ok(Rel3::Sincoh));
        assert_eq!(a.rel3(&t("c"), &t("b")), Ok(Rel3::Scoh));
        let again = parse_spaces(&a.to_literal("A")).unwrap();
        assert_eq!(&again[0].1, a);
        assert!(parse_spaces("space A { tokens: a; scoh: (a,z); }").is_err());
        assert!(parse_spaces("space A { tokens a }").is_err());
    }

    #[test]
    fn isomorphism_search_respects_cap() {
        let big = CoherenceSpace::discrete(&["1", "2", "3"]);
        let sq = tensor(&big, &big);
        assert!(matches!(
            spaces_isomorphic(&sq, &sq),
            Err(CohError::WebTooLarge { size: 9, cap: 8 })
        ));
        assert!(spaces_isomorphic_with_cap(&sq, &sq, 9).unwrap().is_some());
    }
}
