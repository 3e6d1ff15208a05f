//! Formulas in negation normal form over `⊗`, `⅋` and `◁`.
//!
//! Concrete syntax: `*` or `⊗` for tensor, `|` or `⅋` for par, `;` or `◁`
//! for before, `~a`, `a'` or `a⊥` for a negative atom. A chain may repeat one
//! connective (it associates to the left); mixing connectives needs
//! parentheses. Top-level commas separate conclusions and read as `⅋`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::syntax::{Cursor, ParseError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Connective {
    Tensor,
    Par,
    Before,
}

impl Connective {
    pub const ALL: [Connective; 3] = [Connective::Tensor, Connective::Par, Connective::Before];

    pub fn dual(self) -> Connective {
        match self {
            Connective::Tensor => Connective::Par,
            Connective::Par => Connective::Tensor,
            Connective::Before => Connective::Before,
        }
    }

    pub fn is_commutative(self) -> bool {
        self != Connective::Before
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Connective::Tensor => "⊗",
            Connective::Par => "⅋",
            Connective::Before => "◁",
        }
    }

    pub fn ascii(self) -> char {
        match self {
            Connective::Tensor => '*',
            Connective::Par => '|',
            Connective::Before => ';',
        }
    }

    fn from_char(c: char) -> Option<Connective> {
        match c {
            '*' | '⊗' => Some(Connective::Tensor),
            '|' | '⅋' => Some(Connective::Par),
            ';' | '◁' => Some(Connective::Before),
            _ => None,
        }
    }
}

/// An atom occurrence. `occ` numbers occurrences left to right from 0 at
/// parse time and is kept through rewrites.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Atom {
    pub var: Arc<str>,
    pub positive: bool,
    pub occ: usize,
}

impl Atom {
    pub fn label(&self) -> String {
        if self.positive {
            self.var.to_string()
        } else {
            format!("{}⊥", self.var)
        }
    }

    pub fn is_dual_of(&self, other: &Atom) -> bool {
        self.var == other.var && self.positive != other.positive
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(Atom),
    Binary(Connective, Box<Formula>, Box<Formula>),
}

/// A subformula address: `false` goes left, `true` goes right.
pub type Path = Vec<bool>;

impl Formula {
    pub fn atom(var: &str, positive: bool, occ: usize) -> Formula {
        Formula::Atom(Atom {
            var: Arc::from(var),
            positive,
            occ,
        })
    }

    pub fn binary(c: Connective, left: Formula, right: Formula) -> Formula {
        Formula::Binary(c, Box::new(left), Box::new(right))
    }

    /// Atom occurrences in left-to-right order.
    pub fn atoms(&self) -> Vec<&Atom> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a Atom>) {
        match self {
            Formula::Atom(a) => out.push(a),
            Formula::Binary(_, l, r) => {
                l.collect_atoms(out);
                r.collect_atoms(out);
            }
        }
    }

    pub fn atom_count(&self) -> usize {
        match self {
            Formula::Atom(_) => 1,
            Formula::Binary(_, l, r) => l.atom_count() + r.atom_count(),
        }
    }

    /// Variables in order of first occurrence.
    pub fn variables(&self) -> Vec<Arc<str>> {
        let mut out: Vec<Arc<str>> = Vec::new();
        for a in self.atoms() {
            if !out.contains(&a.var) {
                out.push(a.var.clone());
            }
        }
        out
    }

    /// Renumbers occurrences left to right from 0.
    pub fn renumbered(&self) -> Formula {
        fn go(f: &Formula, next: &mut usize) -> Formula {
            match f {
                Formula::Atom(a) => {
                    let occ = *next;
                    *next += 1;
                    Formula::Atom(Atom { occ, ..a.clone() })
                }
                Formula::Binary(c, l, r) => {
                    let l = go(l, next);
                    Formula::binary(*c, l, go(r, next))
                }
            }
        }
        go(self, &mut 0)
    }

    /// De Morgan dual; `◁` keeps its order. Occurrence numbers are kept.
    pub fn dual(&self) -> Formula {
        match self {
            Formula::Atom(a) => Formula::Atom(Atom {
                positive: !a.positive,
                ..a.clone()
            }),
            Formula::Binary(c, l, r) => Formula::binary(c.dual(), l.dual(), r.dual()),
        }
    }

    /// Equality up to occurrence numbering.
    pub fn same_shape(&self, other: &Formula) -> bool {
        match (self, other) {
            (Formula::Atom(a), Formula::Atom(b)) => a.var == b.var && a.positive == b.positive,
            (Formula::Binary(c, l, r), Formula::Binary(d, l2, r2)) => {
                c == d && l.same_shape(l2) && r.same_shape(r2)
            }
            _ => false,
        }
    }

    pub fn subformula(&self, path: &[bool]) -> Option<&Formula> {
        match (self, path.split_first()) {
            (_, None) => Some(self),
            (Formula::Binary(_, l, r), Some((&right, rest))) => {
                if right { r } else { l }.subformula(rest)
            }
            (Formula::Atom(_), Some(_)) => None,
        }
    }

    fn subformula_mut(&mut self, path: &[bool]) -> Option<&mut Formula> {
        match path.split_first() {
            None => Some(self),
            Some((&right, rest)) => match self {
                Formula::Binary(_, l, r) => if right { r } else { l }.subformula_mut(rest),
                Formula::Atom(_) => None,
            },
        }
    }

    /// Paths of all binary nodes, in prefix order.
    pub fn binary_paths(&self) -> Vec<Path> {
        fn go(f: &Formula, path: &mut Path, out: &mut Vec<Path>) {
            if let Formula::Binary(_, l, r) = f {
                out.push(path.clone());
                path.push(false);
                go(l, path, out);
                path.pop();
                path.push(true);
                go(r, path, out);
                path.pop();
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// Swaps the arguments of a `⊗` or `⅋` node. Returns `false` and leaves
    /// the formula unchanged anywhere else.
    pub fn commute_at(&mut self, path: &[bool]) -> bool {
        match self.subformula_mut(path) {
            Some(Formula::Binary(c, l, r)) if c.is_commutative() => {
                std::mem::swap(l, r);
                true
            }
            _ => false,
        }
    }

    /// Rewrites `(A∗B)∗C` to `A∗(B∗C)` at `path`, or the converse when the
    /// left-nested form does not apply. Returns `false` if neither applies.
    pub fn reassociate_at(&mut self, path: &[bool]) -> bool {
        let Some(node) = self.subformula_mut(path) else {
            return false;
        };
        let Formula::Binary(c, l, r) = node else {
            return false;
        };
        let c = *c;
        let placeholder = || Box::new(Formula::atom("", true, 0));
        if matches!(&**l, Formula::Binary(d, ..) if *d == c) {
            let Formula::Binary(_, a, b) = *std::mem::replace(l, placeholder()) else {
                unreachable!()
            };
            let rest = std::mem::replace(r, placeholder());
            *node = Formula::Binary(c, a, Box::new(Formula::Binary(c, b, rest)));
            true
        } else if matches!(&**r, Formula::Binary(d, ..) if *d == c) {
            let Formula::Binary(_, b, rest) = *std::mem::replace(r, placeholder()) else {
                unreachable!()
            };
            let a = std::mem::replace(l, placeholder());
            *node = Formula::Binary(c, Box::new(Formula::Binary(c, a, b)), rest);
            true
        } else {
            false
        }
    }

    /// Same formula with every connective rewritten by `f`.
    pub fn map_connectives(&self, f: &impl Fn(Connective) -> Connective) -> Formula {
        match self {
            Formula::Atom(_) => self.clone(),
            Formula::Binary(c, l, r) => {
                Formula::binary(f(*c), l.map_connectives(f), r.map_connectives(f))
            }
        }
    }

    /// ASCII rendering accepted by [`parse_formula`].
    pub fn to_ascii(&self) -> String {
        match self {
            Formula::Atom(a) if a.positive => a.var.to_string(),
            Formula::Atom(a) => format!("~{}", a.var),
            Formula::Binary(c, l, r) => {
                format!("({}{}{})", l.to_ascii(), c.ascii(), r.to_ascii())
            }
        }
    }

    fn fmt_inner(&self, f: &mut fmt::Formatter<'_>, top: bool) -> fmt::Result {
        match self {
            Formula::Atom(a) => f.write_str(&a.label()),
            Formula::Binary(c, l, r) => {
                if !top {
                    f.write_str("(")?;
                }
                l.fmt_inner(f, false)?;
                write!(f, " {} ", c.symbol())?;
                r.fmt_inner(f, false)?;
                if !top {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_inner(f, true)
    }
}

pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut cur = Cursor::new(text);
    let formula = parse_with_cursor(&mut cur)?;
    cur.finish()?;
    Ok(formula)
}

pub(crate) fn parse_with_cursor(cur: &mut Cursor<'_>) -> Result<Formula, ParseError> {
    let mut next = 0;
    let mut formula = parse_chain(cur, &mut next)?;
    while cur.eat(',') {
        let right = parse_chain(cur, &mut next)?;
        formula = Formula::binary(Connective::Par, formula, right);
    }
    Ok(formula)
}

fn peek_connective(cur: &mut Cursor<'_>) -> Option<Connective> {
    cur.peek().and_then(Connective::from_char)
}

fn parse_chain(cur: &mut Cursor<'_>, next: &mut usize) -> Result<Formula, ParseError> {
    let mut formula = parse_operand(cur, next)?;
    let Some(c) = peek_connective(cur) else {
        return Ok(formula);
    };
    while peek_connective(cur) == Some(c) {
        if !cur.eat(c.ascii()) {
            cur.eat(c.symbol().chars().next().expect("non-empty symbol"));
        }
        let right = parse_operand(cur, next)?;
        formula = Formula::binary(c, formula, right);
    }
    if let Some(other) = peek_connective(cur) {
        return Err(cur.error(format!(
            "mixing {} and {} needs parentheses",
            c.symbol(),
            other.symbol()
        )));
    }
    Ok(formula)
}

fn parse_operand(cur: &mut Cursor<'_>, next: &mut usize) -> Result<Formula, ParseError> {
    if cur.eat('(') {
        let inner = parse_chain(cur, next)?;
        cur.expect(')')?;
        return Ok(inner);
    }
    let negated = cur.eat('~');
    let name = cur.take_while(|c| c.is_alphanumeric() || c == '_');
    if name.is_empty() {
        return Err(cur.unexpected("an atom or `(`"));
    }
    let mut positive = !negated;
    if cur.rest().starts_with('\'') {
        cur.eat('\'');
        positive = !positive;
    } else if cur.rest().starts_with('⊥') {
        cur.eat('⊥');
        positive = !positive;
    }
    let atom = Formula::atom(name, positive, *next);
    *next += 1;
    Ok(atom)
}

impl FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Formula, ParseError> {
        parse_formula(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sample_formula() {
        let f = parse_formula("((a*~c)|(~a*c));(b|~b)").unwrap();
        assert_eq!(f.to_string(), "((a ⊗ c⊥) ⅋ (a⊥ ⊗ c)) ◁ (b ⅋ b⊥)");
        let labels: Vec<String> = f.atoms().iter().map(|a| a.label()).collect();
        assert_eq!(labels, ["a", "c⊥", "a⊥", "c", "b", "b⊥"]);
        let occs: Vec<usize> = f.atoms().iter().map(|a| a.occ).collect();
        assert_eq!(occs, [0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn alternative_negation_spellings() {
        let f = parse_formula("a' ⅋ b⊥ ⅋ ~c").unwrap();
        assert!(f.atoms().iter().all(|a| !a.positive));
        assert!(parse_formula("~a'").unwrap().atoms()[0].positive);
    }

    #[test]
    fn single_atom_and_errors() {
        assert_eq!(parse_formula("a").unwrap(), Formula::atom("a", true, 0));
        assert!(parse_formula("a|").is_err());
        assert!(parse_formula("a|b*c").is_err());
        assert!(parse_formula("(a|b").is_err());
        assert!(parse_formula("a b").is_err());
    }

    #[test]
    fn commas_are_par() {
        let f = parse_formula("a;b, ~a, ~b").unwrap();
        assert_eq!(f.to_string(), "((a ◁ b) ⅋ a⊥) ⅋ b⊥");
    }

    #[test]
    fn ascii_round_trip_and_dual() {
        let f = parse_formula("((a*~c)|(~a*c));(b|~b)").unwrap();
        assert_eq!(parse_formula(&f.to_ascii()).unwrap(), f);
        assert_eq!(f.dual().to_string(), "((a⊥ ⅋ c) ⊗ (a ⅋ c⊥)) ◁ (b⊥ ⊗ b)");
        assert_eq!(f.dual().dual(), f);
    }

    #[test]
    fn rewrites() {
        let mut f = parse_formula("(a*b)*c").unwrap();
        assert!(f.reassociate_at(&[]));
        assert_eq!(f.to_string(), "a ⊗ (b ⊗ c)");
        assert!(f.reassociate_at(&[]));
        assert_eq!(f.to_string(), "(a ⊗ b) ⊗ c");
        assert!(f.commute_at(&[]));
        assert_eq!(f.to_string(), "c ⊗ (a ⊗ b)");
        let mut g = parse_formula("a;b").unwrap();
        assert!(!g.commute_at(&[]));
        assert!(!g.reassociate_at(&[]));
    }
}
