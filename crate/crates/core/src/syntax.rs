//! Small hand-written lexer shared by the text formats: tokens, space
//! literals, hypercoherence literals, trees and formulas.

use std::fmt;

/// A syntax error with the byte offset where it was detected.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("parse error at byte {pos}: {message}")]
pub struct ParseError {
    pub pos: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(pos: usize, message: impl Into<String>) -> Self {
        ParseError {
            pos,
            message: message.into(),
        }
    }
}

pub(crate) struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

pub(crate) fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '*' | '+' | '-' | '.')
}

impl<'a> Cursor<'a> {
    pub fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0 }
    }

    pub fn pos(&self) -> usize {
        self.pos
    }

    pub fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    pub fn skip_ws(&mut self) {
        loop {
            let rest = self.rest();
            let trimmed = rest.trim_start();
            self.pos += rest.len() - trimmed.len();
            if trimmed.starts_with('#') {
                let line_end = trimmed.find('\n').unwrap_or(trimmed.len());
                self.pos += line_end;
            } else {
                break;
            }
        }
    }

    pub fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    pub fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    pub fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{c}`")))
        }
    }

    pub fn eat_keyword(&mut self, kw: &str) -> bool {
        self.skip_ws();
        let rest = self.rest();
        if let Some(after) = rest.strip_prefix(kw) {
            if !after.chars().next().is_some_and(is_name_char) {
                self.pos += kw.len();
                return true;
            }
        }
        false
    }

    pub fn expect_keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.eat_keyword(kw) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{kw}`")))
        }
    }

    /// Reads a maximal run of characters accepted by `accept`.
    pub fn take_while(&mut self, accept: impl Fn(char) -> bool) -> &'a str {
        self.skip_ws();
        let rest = self.rest();
        let len = rest
            .char_indices()
            .find(|&(_, c)| !accept(c))
            .map_or(rest.len(), |(i, _)| i);
        self.pos += len;
        &rest[..len]
    }

    pub fn name(&mut self) -> Result<&'a str, ParseError> {
        let start = self.pos;
        let name = self.take_while(is_name_char);
        if name.is_empty() {
            self.pos = start;
            Err(self.unexpected("a name"))
        } else {
            Ok(name)
        }
    }

    pub fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError::new(self.pos, message)
    }

    pub fn unexpected(&mut self, what: &str) -> ParseError {
        let next = self.describe_next();
        self.error(format!("expected {what}, found {next}"))
    }

    pub fn describe_next(&mut self) -> String {
        match self.peek() {
            Some(c) => format!("`{c}`"),
            None => "end of input".to_string(),
        }
    }

    pub fn finish(&mut self) -> Result<(), ParseError> {
        if self.at_end() {
            Ok(())
        } else {
            {
                let next = self.describe_next();
                Err(self.error(format!("unexpected trailing input {next}")))
            }
        }
    }
}

/// Comma separated list helper: parses `item (, item)*` until `close` is
/// seen (not consumed). An empty list is allowed.
pub(crate) fn comma_list<'a, T>(
    cur: &mut Cursor<'a>,
    close: char,
    mut item: impl FnMut(&mut Cursor<'a>) -> Result<T, ParseError>,
) -> Result<Vec<T>, ParseError> {
    let mut out = Vec::new();
    if cur.peek() == Some(close) {
        return Ok(out);
    }
    loop {
        out.push(item(cur)?);
        if !cur.eat(',') {
            break;
        }
    }
    Ok(out)
}

pub(crate) struct Joined<'a, T>(pub &'a [T], pub &'a str);

impl<T: fmt::Display> fmt::Display for Joined<'_, T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, item) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(self.1)?;
            }
            write!(f, "{item}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_and_whitespace_are_skipped() {
        let mut cur = Cursor::new("  # note\n  foo bar");
        assert_eq!(cur.name().unwrap(), "foo");
        assert_eq!(cur.name().unwrap(), "bar");
        assert!(cur.at_end());
    }

    #[test]
    fn keyword_requires_boundary() {
        let mut cur = Cursor::new("spaces");
        assert!(!cur.eat_keyword("space"));
        assert!(cur.eat_keyword("spaces"));
    }

    #[test]
    fn error_reports_position() {
        let mut cur = Cursor::new("ab )");
        cur.name().unwrap();
        let err = cur.expect(',').unwrap_err();
        assert_eq!(err.pos, 3);
    }
}
