//! Generic trees: finite binary trees whose sister leaves carry distinct
//! labels. They are exactly the continuous functions from the Cantor space
//! `2^ω` to a discrete alphabet, evaluated on words of the form `m·0^ω`.
//!
//! Three interchangeable descriptions are provided: raw [`Term`]s with the
//! reduction `<x x> ⟶ x`, normal [`GenericTree`]s, and [`PrefixCover`]s
//! (finite sets of `(word, label)` pairs).

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::coherence::Token;
use crate::syntax::{Cursor, ParseError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TreeError {
    #[error("words {first} and {second} overlap: one is a prefix of the other")]
    Overlap { first: BitWord, second: BitWord },
    #[error("no pair covers the words starting with {word}")]
    Gap { word: BitWord },
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// A finite word over `{0, 1}`, standing for the infinite word `m·0^ω`.
///
/// The derived `Ord` is the plain lexicographic order on finite words (a
/// prefix sorts first). [`BitWord::point_cmp`] compares the infinite words
/// they stand for.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BitWord(Vec<bool>);

impl BitWord {
    pub fn empty() -> BitWord {
        BitWord(Vec::new())
    }

    pub fn from_bits(bits: impl IntoIterator<Item = bool>) -> BitWord {
        BitWord(bits.into_iter().collect())
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, bit: bool) {
        self.0.push(bit);
    }

    pub fn pop(&mut self) -> Option<bool> {
        self.0.pop()
    }

    pub fn child(&self, bit: bool) -> BitWord {
        let mut w = self.clone();
        w.push(bit);
        w
    }

    /// Bit `i` of `m·0^ω`.
    pub fn padded_bit(&self, i: usize) -> bool {
        self.0.get(i).copied().unwrap_or(false)
    }

    /// Is this word a prefix of the infinite word `other·0^ω`?
    pub fn prefixes_point(&self, other: &BitWord) -> bool {
        self.0
            .iter()
            .enumerate()
            .all(|(i, &b)| b == other.padded_bit(i))
    }

    pub fn is_prefix_of(&self, other: &BitWord) -> bool {
        other.0.starts_with(&self.0)
    }

    /// Lexicographic order of `self·0^ω` and `other·0^ω`.
    pub fn point_cmp(&self, other: &BitWord) -> Ordering {
        let n = self.len().max(other.len());
        (0..n)
            .map(|i| self.padded_bit(i).cmp(&other.padded_bit(i)))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    }
}

impl fmt::Display for BitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl FromStr for BitWord {
    type Err = ParseError;

    /// Accepts `0`/`1` strings; `ε` or `-` for the empty word.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "ε" || s == "-" {
            return Ok(BitWord::empty());
        }
        s.char_indices()
            .map(|(i, c)| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(ParseError::new(i, format!("`{c}` is not a bit"))),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(BitWord)
    }
}

/// A raw term `T ::= x | <T T>`, possibly containing redexes `<x x>`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term<T> {
    Leaf(T),
    Node(Box<Term<T>>, Box<Term<T>>),
}

impl<T> Term<T> {
    pub fn leaf(label: T) -> Term<T> {
        Term::Leaf(label)
    }

    pub fn node(left: Term<T>, right: Term<T>) -> Term<T> {
        Term::Node(Box::new(left), Box::new(right))
    }

    /// Number of constructors.
    pub fn size(&self) -> usize {
        match self {
            Term::Leaf(_) => 1,
            Term::Node(l, r) => 1 + l.size() + r.size(),
        }
    }

    /// Number of levels: a single leaf has depth 1.
    pub fn depth(&self) -> usize {
        match self {
            Term::Leaf(_) => 1,
            Term::Node(l, r) => 1 + l.depth().max(r.depth()),
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            Term::Leaf(_) => 1,
            Term::Node(l, r) => l.leaf_count() + r.leaf_count(),
        }
    }

    pub fn labels(&self) -> Vec<&T> {
        let mut out = Vec::new();
        self.push_labels(&mut out);
        out
    }

    fn push_labels<'a>(&'a self, out: &mut Vec<&'a T>) {
        match self {
            Term::Leaf(x) => out.push(x),
            Term::Node(l, r) => {
                l.push_labels(out);
                r.push_labels(out);
            }
        }
    }

    pub fn subterm(&self, path: &BitWord) -> Option<&Term<T>> {
        let mut cur = self;
        for &bit in path.bits() {
            cur = match cur {
                Term::Node(l, r) => {
                    if bit {
                        r
                    } else {
                        l
                    }
                }
                Term::Leaf(_) => return None,
            };
        }
        Some(cur)
    }
}

impl<T: Clone + Eq> Term<T> {
    fn is_redex(&self) -> bool {
        matches!(self, Term::Node(l, r) if matches!((&**l, &**r), (Term::Leaf(x), Term::Leaf(y)) if x == y))
    }

    /// Positions of all redexes `<x x>`, in left-to-right order.
    pub fn redex_positions(&self) -> Vec<BitWord> {
        let mut out = Vec::new();
        let mut path = BitWord::empty();
        self.push_redexes(&mut path, &mut out);
        out
    }

    fn push_redexes(&self, path: &mut BitWord, out: &mut Vec<BitWord>) {
        if let Term::Node(l, r) = self {
            if self.is_redex() {
                out.push(path.clone());
            }
            path.push(false);
            l.push_redexes(path, out);
            path.pop();
            path.push(true);
            r.push_redexes(path, out);
            path.pop();
        }
    }

    /// Contracts the redex at `path`; `None` if there is no redex there.
    pub fn reduce_at(&self, path: &BitWord) -> Option<Term<T>> {
        self.reduce_from(path.bits())
    }

    fn reduce_from(&self, path: &[bool]) -> Option<Term<T>> {
        match (path.split_first(), self) {
            (None, Term::Node(l, _)) if self.is_redex() => Some((**l).clone()),
            (None, _) => None,
            (Some((&bit, rest)), Term::Node(l, r)) => {
                if bit {
                    Some(Term::node((**l).clone(), r.reduce_from(rest)?))
                } else {
                    Some(Term::node(l.reduce_from(rest)?, (**r).clone()))
                }
            }
            (Some(_), Term::Leaf(_)) => None,
        }
    }

    pub fn is_normal(&self) -> bool {
        match self {
            Term::Leaf(_) => true,
            Term::Node(l, r) => !self.is_redex() && l.is_normal() && r.is_normal(),
        }
    }

    /// Innermost normalisation. Every step shrinks the term, and the result
    /// does not depend on the order in which redexes are contracted.
    pub fn normalize(self) -> GenericTree<T> {
        match self {
            Term::Leaf(x) => GenericTree::leaf(x),
            Term::Node(l, r) => GenericTree::node(l.normalize(), r.normalize()),
        }
    }
}

impl<T: fmt::Display> fmt::Display for Term<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Leaf(x) => write!(f, "{x}"),
            Term::Node(l, r) => write!(f, "<{l} {r}>"),
        }
    }
}

impl Term<Token> {
    pub(crate) fn parse_from(cur: &mut Cursor<'_>) -> Result<Term<Token>, ParseError> {
        if cur.eat('<') {
            let left = Term::parse_from(cur)?;
            let right = Term::parse_from(cur)?;
            cur.expect('>')?;
            Ok(Term::node(left, right))
        } else {
            Ok(Term::Leaf(Token::parse_from(cur)?))
        }
    }
}

impl FromStr for Term<Token> {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut cur = Cursor::new(s);
        let term = Term::parse_from(&mut cur)?;
        cur.finish()?;
        Ok(term)
    }
}

/// A term in normal form: no node has two leaf children with equal labels.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GenericTree<T>(Term<T>);

impl<T> GenericTree<T> {
    pub fn term(&self) -> &Term<T> {
        &self.0
    }

    pub fn into_term(self) -> Term<T> {
        self.0
    }

    pub fn as_leaf(&self) -> Option<&T> {
        match &self.0 {
            Term::Leaf(x) => Some(x),
            Term::Node(..) => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_leaf().is_some()
    }

    pub fn depth(&self) -> usize {
        self.0.depth()
    }

    pub fn size(&self) -> usize {
        self.0.size()
    }

    pub fn leaf_count(&self) -> usize {
        self.0.leaf_count()
    }

    /// Value at the point `m·0^ω`: follow `m`, then keep going left.
    pub fn eval(&self, m: &BitWord) -> &T {
        let mut cur = &self.0;
        let mut i = 0;
        loop {
            match cur {
                Term::Leaf(x) => return x,
                Term::Node(l, r) => {
                    cur = if m.padded_bit(i) { r } else { l };
                    i += 1;
                }
            }
        }
    }

    /// Leaves with their words, in lexicographic order.
    pub fn leaves(&self) -> Vec<(BitWord, &T)> {
        let mut out = Vec::new();
        let mut path = BitWord::empty();
        push_leaves(&self.0, &mut path, &mut out);
        out
    }
}

fn push_leaves<'a, T>(term: &'a Term<T>, path: &mut BitWord, out: &mut Vec<(BitWord, &'a T)>) {
    match term {
        Term::Leaf(x) => out.push((path.clone(), x)),
        Term::Node(l, r) => {
            path.push(false);
            push_leaves(l, path, out);
            path.pop();
            path.push(true);
            push_leaves(r, path, out);
            path.pop();
        }
    }
}

impl<T: Clone + Eq> GenericTree<T> {
    /// The constant function.
    pub fn leaf(label: T) -> GenericTree<T> {
        GenericTree(Term::Leaf(label))
    }

    /// `<left right>`, contracted when both halves are the same constant.
    pub fn node(left: GenericTree<T>, right: GenericTree<T>) -> GenericTree<T> {
        match (left.0, right.0) {
            (Term::Leaf(x), Term::Leaf(y)) if x == y => GenericTree(Term::Leaf(x)),
            (l, r) => GenericTree(Term::node(l, r)),
        }
    }

    /// Normal form of any term.
    pub fn from_term(term: Term<T>) -> GenericTree<T> {
        term.normalize()
    }

    /// The two halves `h0(w) = h(0w)` and `h1(w) = h(1w)`. A constant
    /// splits into two copies of itself.
    pub fn split(&self) -> (GenericTree<T>, GenericTree<T>) {
        match &self.0 {
            Term::Leaf(_) => (self.clone(), self.clone()),
            Term::Node(l, r) => (GenericTree((**l).clone()), GenericTree((**r).clone())),
        }
    }

    /// Inverse of [`GenericTree::split`].
    pub fn merge(h0: GenericTree<T>, h1: GenericTree<T>) -> GenericTree<T> {
        GenericTree::node(h0, h1)
    }

    pub fn to_pairs(&self) -> PrefixCover<T> {
        PrefixCover {
            entries: self
                .leaves()
                .into_iter()
                .map(|(w, x)| (w, x.clone()))
                .collect(),
        }
    }

    /// Builds a tree from a cover of `2^ω`; sibling words with equal labels
    /// are merged by normalisation.
    pub fn from_pairs(cover: &PrefixCover<T>) -> Result<GenericTree<T>, TreeError> {
        cover.check_partition()?;
        let entries: Vec<(&BitWord, &T)> = cover.entries.iter().map(|(w, x)| (w, x)).collect();
        Ok(build_term(&entries, &mut BitWord::empty()).normalize())
    }
}

impl<T: Ord> GenericTree<T> {
    pub fn alphabet(&self) -> BTreeSet<&T> {
        self.0.labels().into_iter().collect()
    }
}

fn build_term<T: Clone>(entries: &[(&BitWord, &T)], prefix: &mut BitWord) -> Term<T> {
    let depth = prefix.len();
    if let [(w, x)] = entries {
        if w.len() == depth {
            return Term::Leaf((*x).clone());
        }
    }
    let split = entries.partition_point(|(w, _)| !w.bits()[depth]);
    prefix.push(false);
    let left = build_term(&entries[..split], prefix);
    prefix.pop();
    prefix.push(true);
    let right = build_term(&entries[split..], prefix);
    prefix.pop();
    Term::node(left, right)
}

impl<T: fmt::Display> fmt::Display for GenericTree<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl<T: fmt::Display> fmt::Debug for GenericTree<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl FromStr for GenericTree<Token> {
    type Err = ParseError;

    /// Parses `a` or `<T T>`; the result is normalised.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(s.parse::<Term<Token>>()?.normalize())
    }
}

/// A finite set of `(word, label)` pairs describing a function on `2^ω`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrefixCover<T> {
    // sorted by word
    entries: Vec<(BitWord, T)>,
}

impl<T> PrefixCover<T> {
    pub fn new(pairs: impl IntoIterator<Item = (BitWord, T)>) -> PrefixCover<T> {
        let mut entries: Vec<(BitWord, T)> = pairs.into_iter().collect();
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        PrefixCover { entries }
    }

    pub fn entries(&self) -> &[(BitWord, T)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Every infinite word has exactly one word of the cover as a prefix.
    pub fn check_partition(&self) -> Result<(), TreeError> {
        // Sorted words: a prefix sorts immediately before some extension.
        for pair in self.entries.windows(2) {
            if pair[0].0.is_prefix_of(&pair[1].0) {
                return Err(TreeError::Overlap {
                    first: pair[0].0.clone(),
                    second: pair[1].0.clone(),
                });
            }
        }
        let words: Vec<&BitWord> = self.entries.iter().map(|(w, _)| w).collect();
        find_gap(&words, &mut BitWord::empty()).map_or(Ok(()), |word| Err(TreeError::Gap { word }))
    }

    /// The label of the unique pair whose word is a prefix of `m·0^ω`.
    pub fn lookup(&self, m: &BitWord) -> Option<&T> {
        let mut found = self.entries.iter().filter(|(w, _)| w.prefixes_point(m));
        let first = found.next()?;
        if found.next().is_some() {
            None
        } else {
            Some(&first.1)
        }
    }
}

impl<T: Eq> PrefixCover<T> {
    /// Sibling words `m0`, `m1` carry distinct labels.
    pub fn siblings_distinct(&self) -> bool {
        self.entries.iter().all(|(w, x)| {
            if w.bits().last() != Some(&false) {
                return true;
            }
            let mut sibling = w.clone();
            sibling.pop();
            sibling.push(true);
            self.entries
                .iter()
                .find(|(v, _)| *v == sibling)
                .is_none_or(|(_, y)| y != x)
        })
    }
}

// Words are prefix-free and sorted; returns the first uncovered prefix.
fn find_gap(words: &[&BitWord], prefix: &mut BitWord) -> Option<BitWord> {
    match words {
        [] => Some(prefix.clone()),
        [w] if w.len() == prefix.len() => None,
        _ => {
            let depth = prefix.len();
            let split = words.partition_point(|w| !w.bits()[depth]);
            prefix.push(false);
            let gap = find_gap(&words[..split], prefix);
            prefix.pop();
            if gap.is_some() {
                return gap;
            }
            prefix.push(true);
            let gap = find_gap(&words[split..], prefix);
            prefix.pop();
            gap
        }
    }
}

impl<T: fmt::Display> fmt::Display for PrefixCover<T> {
    /// One `word label` line per pair.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (w, x) in &self.entries {
            writeln!(f, "{w} {x}")?;
        }
        Ok(())
    }
}

impl FromStr for PrefixCover<Token> {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut pairs = Vec::new();
        let mut offset = 0;
        for line in s.split_inclusive('\n') {
            let content = line.split('#').next().unwrap_or("").trim();
            if !content.is_empty() {
                let (word, label) = content
                    .split_once(char::is_whitespace)
                    .ok_or_else(|| ParseError::new(offset, "expected `word label` on each line"))?;
                let word: BitWord = word
                    .parse()
                    .map_err(|e: ParseError| ParseError::new(offset + e.pos, e.message))?;
                let label: Token = label
                    .trim()
                    .parse()
                    .map_err(|e: ParseError| ParseError::new(offset, e.message))?;
                pairs.push((word, label));
            }
            offset += line.len();
        }
        Ok(PrefixCover::new(pairs))
    }
}

/// Superposes two trees: a cover of `2^ω` on which both are constant,
/// with both labels on every piece, in lexicographic order of words.
pub fn common_refinement<'a, T, U>(
    f: &'a GenericTree<T>,
    g: &'a GenericTree<U>,
) -> Vec<(BitWord, &'a T, &'a U)> {
    fn go<'a, T, U>(
        f: &'a Term<T>,
        g: &'a Term<U>,
        path: &mut BitWord,
        out: &mut Vec<(BitWord, &'a T, &'a U)>,
    ) {
        let (fl, fr, gl, gr) = match (f, g) {
            (Term::Leaf(x), Term::Leaf(y)) => {
                out.push((path.clone(), x, y));
                return;
            }
            (Term::Node(fl, fr), Term::Leaf(_)) => (&**fl, &**fr, g, g),
            (Term::Leaf(_), Term::Node(gl, gr)) => (f, f, &**gl, &**gr),
            (Term::Node(fl, fr), Term::Node(gl, gr)) => (&**fl, &**fr, &**gl, &**gr),
        };
        path.push(false);
        go(fl, gl, path, out);
        path.pop();
        path.push(true);
        go(fr, gr, path, out);
        path.pop();
    }
    let mut out = Vec::new();
    go(&f.0, &g.0, &mut BitWord::empty(), &mut out);
    out
}

/// Superposition of any number of trees.
pub fn refine_many<'a, T>(trees: &[&'a GenericTree<T>]) -> Vec<(BitWord, Vec<&'a T>)> {
    fn go<'a, T>(terms: &[&'a Term<T>], path: &mut BitWord, out: &mut Vec<(BitWord, Vec<&'a T>)>) {
        if terms.iter().all(|t| matches!(t, Term::Leaf(_))) {
            let labels = terms
                .iter()
                .map(|t| match t {
                    Term::Leaf(x) => x,
                    Term::Node(..) => unreachable!(),
                })
                .collect();
            out.push((path.clone(), labels));
            return;
        }
        for bit in [false, true] {
            let halves: Vec<&Term<T>> = terms
                .iter()
                .map(|t| match t {
                    Term::Leaf(_) => *t,
                    Term::Node(l, r) => {
                        if bit {
                            &**r
                        } else {
                            &**l
                        }
                    }
                })
                .collect();
            path.push(bit);
            go(&halves, path, out);
            path.pop();
        }
    }
    let terms: Vec<&Term<T>> = trees.iter().map(|t| &t.0).collect();
    let mut out = Vec::new();
    go(&terms, &mut BitWord::empty(), &mut out);
    out
}

/// The word `m` such that `m·0^ω` is the least point where `f` and `g`
/// disagree, or `None` when they are equal.
pub fn first_difference<T: Eq>(f: &GenericTree<T>, g: &GenericTree<T>) -> Option<BitWord> {
    fn go<T: Eq>(f: &Term<T>, g: &Term<T>, path: &mut BitWord) -> bool {
        let (fl, fr, gl, gr) = match (f, g) {
            (Term::Leaf(x), Term::Leaf(y)) => return x != y,
            (Term::Node(fl, fr), Term::Leaf(_)) => (&**fl, &**fr, g, g),
            (Term::Leaf(_), Term::Node(gl, gr)) => (f, f, &**gl, &**gr),
            (Term::Node(fl, fr), Term::Node(gl, gr)) => (&**fl, &**fr, &**gl, &**gr),
        };
        path.push(false);
        if go(fl, gl, path) {
            return true;
        }
        path.pop();
        path.push(true);
        if go(fr, gr, path) {
            return true;
        }
        path.pop();
        false
    }
    let mut path = BitWord::empty();
    go(&f.0, &g.0, &mut path).then_some(path)
}

/// Every normal tree over `alphabet` with at most `max_depth` levels.
/// There are `k^(2^(d-1))` of them for `k` labels and depth `d ≥ 1`.
pub fn enumerate_trees<T: Clone + Eq>(alphabet: &[T], max_depth: usize) -> Vec<GenericTree<T>> {
    if max_depth == 0 {
        return Vec::new();
    }
    let mut trees: Vec<GenericTree<T>> = alphabet.iter().cloned().map(GenericTree::leaf).collect();
    for _ in 1..max_depth {
        let mut next: Vec<GenericTree<T>> =
            alphabet.iter().cloned().map(GenericTree::leaf).collect();
        for l in &trees {
            for r in &trees {
                if let (Some(x), Some(y)) = (l.as_leaf(), r.as_leaf()) {
                    if x == y {
                        continue;
                    }
                }
                next.push(GenericTree(Term::node(l.0.clone(), r.0.clone())));
            }
        }
        trees = next;
    }
    trees
}

/// A random raw term with at most `max_depth` levels; redexes are likely.
pub fn random_term<T: Clone, R: Rng + ?Sized>(
    rng: &mut R,
    alphabet: &[T],
    max_depth: usize,
) -> Term<T> {
    assert!(!alphabet.is_empty(), "alphabet must be non-empty");
    if max_depth <= 1 || rng.random_bool(0.3) {
        Term::Leaf(alphabet[rng.random_range(0..alphabet.len())].clone())
    } else {
        Term::node(
            random_term(rng, alphabet, max_depth - 1),
            random_term(rng, alphabet, max_depth - 1),
        )
    }
}

pub fn random_tree<T: Clone + Eq, R: Rng + ?Sized>(
    rng: &mut R,
    alphabet: &[T],
    max_depth: usize,
) -> GenericTree<T> {
    random_term(rng, alphabet, max_depth).normalize()
}
