//! Proof structures: a conclusion formula, axiom links and cuts.

use std::collections::BTreeMap;
use std::fmt;

use super::dicograph::{dicograph_of, Dicograph};
use super::formula::{parse_with_cursor, Connective, Formula, Path};
use super::ProofNetError;
use crate::syntax::{Cursor, ParseError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofStructure {
    formula: Formula,
    dicograph: Dicograph,
    mate: BTreeMap<usize, usize>,
    cuts: Vec<Path>,
}

impl ProofStructure {
    /// Checks that `links` is a perfect matching of the occurrences by dual
    /// atoms and that every cut addresses a subformula `K ⊗ K⊥`.
    pub fn new(
        formula: Formula,
        links: &[(usize, usize)],
        cuts: Vec<Path>,
    ) -> Result<ProofStructure, ProofNetError> {
        let atoms: BTreeMap<usize, _> = formula.atoms().into_iter().map(|a| (a.occ, a)).collect();
        let invalid = |m: String| Err(ProofNetError::InvalidStructure(m));
        if atoms.len() != formula.atom_count() {
            return invalid("occurrence numbers are not distinct".into());
        }
        let mut mate = BTreeMap::new();
        for &(u, v) in links {
            let (Some(a), Some(b)) = (atoms.get(&u), atoms.get(&v)) else {
                return invalid(format!("link {u} {v} names a missing occurrence"));
            };
            if !a.is_dual_of(b) {
                return invalid(format!(
                    "link {u} {v} joins {} and {}, which are not dual",
                    a.label(),
                    b.label()
                ));
            }
            if let Some(w) = [u, v].into_iter().find(|w| mate.contains_key(w)) {
                return invalid(format!("occurrence {w} is linked twice"));
            }
            mate.insert(u, v);
            mate.insert(v, u);
        }
        if let Some(&v) = atoms.keys().find(|v| !mate.contains_key(v)) {
            return invalid(format!(
                "occurrence {v} ({}) has no axiom link",
                atoms[&v].label()
            ));
        }
        for path in &cuts {
            match formula.subformula(path) {
                Some(Formula::Binary(Connective::Tensor, k, k_dual))
                    if k.dual().same_shape(k_dual) => {}
                _ => {
                    return invalid(format!(
                        "cut {} does not address a subformula K ⊗ K⊥",
                        path_to_string(path)
                    ))
                }
            }
        }
        let dicograph = dicograph_of(&formula);
        Ok(ProofStructure {
            formula,
            dicograph,
            mate,
            cuts,
        })
    }

    pub fn formula(&self) -> &Formula {
        &self.formula
    }

    pub fn dicograph(&self) -> &Dicograph {
        &self.dicograph
    }

    pub fn mate(&self, v: usize) -> usize {
        self.mate[&v]
    }

    /// Axiom links with the smaller occurrence first, sorted.
    pub fn links(&self) -> Vec<(usize, usize)> {
        self.mate
            .iter()
            .filter(|(u, v)| u < v)
            .map(|(&u, &v)| (u, v))
            .collect()
    }

    pub fn cuts(&self) -> &[Path] {
        &self.cuts
    }

    pub fn is_cut_free(&self) -> bool {
        self.cuts.is_empty()
    }

    pub fn to_dot(&self) -> String {
        self.dicograph.to_dot(&self.links())
    }
}

impl fmt::Display for ProofStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.formula.to_ascii())?;
        for (u, v) in self.links() {
            writeln!(f, "link {u} {v}")?;
        }
        for path in &self.cuts {
            writeln!(f, "cut {}", path_to_string(path))?;
        }
        Ok(())
    }
}

/// `l`/`r` letters from the root; the root itself is `ε`.
pub fn path_to_string(path: &[bool]) -> String {
    if path.is_empty() {
        return "ε".into();
    }
    path.iter()
        .map(|&right| if right { 'r' } else { 'l' })
        .collect()
}

pub fn parse_path(text: &str) -> Option<Path> {
    if text == "ε" || text == "-" {
        return Some(Vec::new());
    }
    text.chars()
        .map(|c| match c {
            'l' => Some(false),
            'r' => Some(true),
            _ => None,
        })
        .collect()
}

/// Reads a structure file: the formula, then `link i j` lines, then
/// optional `cut PATH` lines.
pub fn parse_structure(text: &str) -> Result<ProofStructure, ProofNetError> {
    let mut cur = Cursor::new(text);
    let formula = parse_formula_line(&mut cur)?;
    let mut links = Vec::new();
    let mut cuts = Vec::new();
    while !cur.at_end() {
        if cur.eat_keyword("link") {
            let u = number(&mut cur)?;
            let v = number(&mut cur)?;
            links.push((u, v));
        } else if cur.eat_keyword("cut") {
            let word = cur.take_while(|c| !c.is_whitespace());
            let path =
                parse_path(word).ok_or_else(|| cur.error(format!("invalid cut path `{word}`")))?;
            cuts.push(path);
        } else {
            return Err(cur.unexpected("`link` or `cut`").into());
        }
    }
    ProofStructure::new(formula, &links, cuts)
}

fn parse_formula_line(cur: &mut Cursor<'_>) -> Result<Formula, ParseError> {
    cur.skip_ws();
    let line_end = cur.rest().find('\n').unwrap_or(cur.rest().len());
    let line = &cur.rest()[..line_end];
    let offset = cur.pos();
    let mut inner = Cursor::new(line);
    let formula = parse_with_cursor(&mut inner)
        .and_then(|f| inner.finish().map(|()| f))
        .map_err(|e| ParseError::new(offset + e.pos, e.message))?;
    cur.take_while(|c| c != '\n');
    Ok(formula)
}

fn number(cur: &mut Cursor<'_>) -> Result<usize, ParseError> {
    let digits = cur.take_while(|c| c.is_ascii_digit());
    if digits.is_empty() {
        return Err(cur.unexpected("an occurrence number"));
    }
    digits
        .parse()
        .map_err(|_| cur.error(format!("occurrence number `{digits}` is too large")))
}

/// Every perfect matching of the occurrences of `formula` by dual atoms,
/// each as a sorted list of links.
pub fn all_matchings(formula: &Formula) -> Vec<Vec<(usize, usize)>> {
    let atoms = formula.atoms();
    let mut out = Vec::new();
    let mut used = vec![false; atoms.len()];
    let mut current = Vec::new();
    fn go(
        atoms: &[&super::formula::Atom],
        used: &mut [bool],
        current: &mut Vec<(usize, usize)>,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        let Some(i) = used.iter().position(|u| !u) else {
            let mut links = current.clone();
            links.sort();
            out.push(links);
            return;
        };
        used[i] = true;
        for j in i + 1..atoms.len() {
            if !used[j] && atoms[i].is_dual_of(atoms[j]) {
                used[j] = true;
                let (u, v) = (atoms[i].occ, atoms[j].occ);
                current.push((u.min(v), u.max(v)));
                go(atoms, used, current, out);
                current.pop();
                used[j] = false;
            }
        }
        used[i] = false;
    }
    go(&atoms, &mut used, &mut current, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::super::formula::parse_formula;
    use super::*;

    #[test]
    fn parses_and_prints() {
        let text = "((a*~c)|(~a*c));(b|~b)\nlink 0 2\nlink 1 3\nlink 4 5\n";
        let s = parse_structure(text).unwrap();
        assert_eq!(s.links(), [(0, 2), (1, 3), (4, 5)]);
        assert_eq!(s.mate(3), 1);
        assert_eq!(parse_structure(&s.to_string()).unwrap(), s);
    }

    #[test]
    fn rejects_bad_links() {
        let f = "a|~a|b|~b\n";
        assert!(parse_structure(&format!("{f}link 0 2\nlink 1 3")).is_err());
        assert!(parse_structure(&format!("{f}link 0 1")).is_err());
        assert!(parse_structure(&format!("{f}link 0 1\nlink 0 1\nlink 2 3")).is_err());
        assert!(parse_structure(&format!("{f}link 0 1\nlink 2 9")).is_err());
        assert!(parse_structure(&format!("{f}link 0 1\nlink 2 3\nfoo")).is_err());
        assert!(parse_structure("a|\nlink 0 1").is_err());
    }

    #[test]
    fn cuts_are_validated() {
        let ok = "(a|~a)|(b*~b)\nlink 0 1\nlink 2 3\ncut r\n";
        assert_eq!(parse_structure(ok).unwrap().cuts(), [vec![true]]);
        let bad = "(a|~a)|(b*~b)\nlink 0 1\nlink 2 3\ncut l\n";
        assert!(parse_structure(bad).is_err());
    }

    #[test]
    fn matchings_are_enumerated() {
        let f = parse_formula("a|a|~a|~a").unwrap();
        assert_eq!(all_matchings(&f).len(), 2);
        assert_eq!(all_matchings(&parse_formula("a|b").unwrap()).len(), 0);
    }
}
