//! Concrete syntax, abstract syntax and well-formedness of rewbs.
//!
//! The concrete syntax is small and whitespace-insensitive:
//!
//! ```text
//! a .. z        terminal
//! ~             epsilon
//! \i            reference to capture group i (i >= 1, decimal)
//! (_i ... )_i   capture group i
//! ( ... )       plain grouping
//! r*            star (postfix, binds tightest)
//! r s           concatenation (juxtaposition, left associative)
//! r + s         alternation (loosest)
//! ```

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Abstract syntax tree of a regular expression with backreferences.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rewb {
    Terminal(char),
    Epsilon,
    Ref(u32),
    Concat(Box<Rewb>, Box<Rewb>),
    Alt(Box<Rewb>, Box<Rewb>),
    Star(Box<Rewb>),
    Group(u32, Box<Rewb>),
}

impl Rewb {
    pub fn concat(left: Rewb, right: Rewb) -> Rewb {
        Rewb::Concat(Box::new(left), Box::new(right))
    }

    pub fn alt(left: Rewb, right: Rewb) -> Rewb {
        Rewb::Alt(Box::new(left), Box::new(right))
    }

    pub fn star(body: Rewb) -> Rewb {
        Rewb::Star(Box::new(body))
    }

    pub fn group(index: u32, body: Rewb) -> Rewb {
        Rewb::Group(index, Box::new(body))
    }

    /// Parses the concrete syntax. Equivalent to [`parse`].
    pub fn parse(text: &str) -> Result<Rewb, ParseError> {
        parse(text)
    }

    /// The largest index used by a group or a reference, 0 if there is none.
    pub fn max_group_index(&self) -> u32 {
        match self {
            Rewb::Terminal(_) | Rewb::Epsilon => 0,
            Rewb::Ref(i) => *i,
            Rewb::Concat(l, r) | Rewb::Alt(l, r) => l.max_group_index().max(r.max_group_index()),
            Rewb::Star(b) => b.max_group_index(),
            Rewb::Group(i, b) => (*i).max(b.max_group_index()),
        }
    }

    /// Terminal letters occurring in the expression.
    pub fn letters(&self) -> BTreeSet<char> {
        let mut out = BTreeSet::new();
        self.collect_letters(&mut out);
        out
    }

    fn collect_letters(&self, out: &mut BTreeSet<char>) {
        match self {
            Rewb::Terminal(c) => {
                out.insert(*c);
            }
            Rewb::Epsilon | Rewb::Ref(_) => {}
            Rewb::Concat(l, r) | Rewb::Alt(l, r) => {
                l.collect_letters(out);
                r.collect_letters(out);
            }
            Rewb::Star(b) | Rewb::Group(_, b) => b.collect_letters(out),
        }
    }

    /// Checks the capture-group side condition: inside `(_i ... )_i` there is
    /// neither another group `i` nor a reference `\i`, at any depth.
    pub fn validate(&self) -> Result<(), Violation> {
        let mut path = Vec::new();
        validate_in(self, &mut Vec::new(), &mut path)
    }

    pub fn size(&self) -> usize {
        match self {
            Rewb::Terminal(_) | Rewb::Epsilon | Rewb::Ref(_) => 1,
            Rewb::Concat(l, r) | Rewb::Alt(l, r) => 1 + l.size() + r.size(),
            Rewb::Star(b) | Rewb::Group(_, b) => 1 + b.size(),
        }
    }
}

/// Free-function form of [`Rewb::max_group_index`].
pub fn max_group_index(r: &Rewb) -> u32 {
    r.max_group_index()
}

/// Free-function form of [`Rewb::validate`].
pub fn validate(r: &Rewb) -> Result<(), Violation> {
    r.validate()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathStep {
    Left,
    Right,
    Body,
}

impl fmt::Display for PathStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PathStep::Left => "left",
            PathStep::Right => "right",
            PathStep::Body => "body",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    /// A group `i` nested (at any depth) inside another group `i`.
    NestedGroup,
    /// A reference `\i` inside group `i`.
    RefInsideGroup,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{}: index {index} at /{}", match kind {
    ViolationKind::NestedGroup => "capture group nested inside a group with the same index",
    ViolationKind::RefInsideGroup => "reference inside the group it refers to",
}, path.iter().map(|s| s.to_string()).collect::<Vec<_>>().join("/"))]
pub struct Violation {
    pub kind: ViolationKind,
    pub index: u32,
    /// Path from the root to the offending node.
    pub path: Vec<PathStep>,
}

fn validate_in(r: &Rewb, open: &mut Vec<u32>, path: &mut Vec<PathStep>) -> Result<(), Violation> {
    match r {
        Rewb::Terminal(_) | Rewb::Epsilon => Ok(()),
        Rewb::Ref(i) => {
            if open.contains(i) {
                Err(Violation {
                    kind: ViolationKind::RefInsideGroup,
                    index: *i,
                    path: path.clone(),
                })
            } else {
                Ok(())
            }
        }
        Rewb::Concat(l, rr) | Rewb::Alt(l, rr) => {
            path.push(PathStep::Left);
            validate_in(l, open, path)?;
            path.pop();
            path.push(PathStep::Right);
            validate_in(rr, open, path)?;
            path.pop();
            Ok(())
        }
        Rewb::Star(b) => {
            path.push(PathStep::Body);
            validate_in(b, open, path)?;
            path.pop();
            Ok(())
        }
        Rewb::Group(i, b) => {
            if open.contains(i) {
                return Err(Violation {
                    kind: ViolationKind::NestedGroup,
                    index: *i,
                    path: path.clone(),
                });
            }
            open.push(*i);
            path.push(PathStep::Body);
            validate_in(b, open, path)?;
            path.pop();
            open.pop();
            Ok(())
        }
    }
}

// ---------------------------------------------------------------------------
// Pretty printing

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Prec {
    Alt,
    Concat,
    Postfix,
}

fn prec_of(r: &Rewb) -> Prec {
    match r {
        Rewb::Alt(..) => Prec::Alt,
        Rewb::Concat(..) => Prec::Concat,
        _ => Prec::Postfix,
    }
}

fn write_at(r: &Rewb, min: Prec, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if prec_of(r) < min {
        f.write_str("(")?;
        write_at(r, Prec::Alt, f)?;
        return f.write_str(")");
    }
    match r {
        Rewb::Terminal(c) => write!(f, "{c}"),
        Rewb::Epsilon => f.write_str("~"),
        Rewb::Ref(i) => write!(f, "\\{i}"),
        Rewb::Concat(l, rr) => {
            write_at(l, Prec::Concat, f)?;
            // a right operand that is itself a concatenation needs parentheses
            // to survive the left-associative reparse
            write_at(rr, Prec::Postfix, f)
        }
        Rewb::Alt(l, rr) => {
            write_at(l, Prec::Alt, f)?;
            f.write_str("+")?;
            write_at(rr, Prec::Concat, f)
        }
        Rewb::Star(b) => {
            write_at(b, Prec::Postfix, f)?;
            f.write_str("*")
        }
        Rewb::Group(i, b) => {
            write!(f, "(_{i}")?;
            write_at(b, Prec::Alt, f)?;
            write!(f, ")_{i}")
        }
    }
}

impl fmt::Display for Rewb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_at(self, Prec::Alt, f)
    }
}

// ---------------------------------------------------------------------------
// Parsing

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("syntax error at byte {position}: {message}")]
pub struct ParseError {
    /// Byte offset into the original text.
    pub position: usize,
    pub message: String,
}

impl FromStr for Rewb {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

/// Parses a rewb from its concrete syntax.
pub fn parse(text: &str) -> Result<Rewb, ParseError> {
    let chars: Vec<(usize, char)> = text
        .char_indices()
        .filter(|(_, c)| !c.is_whitespace())
        .collect();
    let mut p = Parser {
        chars,
        pos: 0,
        end: text.len(),
    };
    let r = p.alternation()?;
    if p.pos < p.chars.len() {
        let (at, c) = p.chars[p.pos];
        return Err(ParseError {
            position: at,
            message: format!("unexpected `{c}`"),
        });
    }
    Ok(r)
}

struct Parser {
    chars: Vec<(usize, char)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn peek2(&self) -> Option<char> {
        self.chars.get(self.pos + 1).map(|&(_, c)| c)
    }

    fn offset(&self) -> usize {
        self.chars.get(self.pos).map_or(self.end, |&(i, _)| i)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            position: self.offset(),
            message: message.into(),
        })
    }

    fn alternation(&mut self) -> Result<Rewb, ParseError> {
        let mut left = self.concatenation()?;
        while self.peek() == Some('+') {
            self.pos += 1;
            let right = self.concatenation()?;
            left = Rewb::alt(left, right);
        }
        Ok(left)
    }

    fn concatenation(&mut self) -> Result<Rewb, ParseError> {
        let mut acc: Option<Rewb> = None;
        while let Some(c) = self.peek() {
            if c == '+' || c == ')' {
                break;
            }
            let f = self.postfix()?;
            acc = Some(match acc {
                None => f,
                Some(l) => Rewb::concat(l, f),
            });
        }
        match acc {
            Some(r) => Ok(r),
            None => self.err("expected an expression (write `~` for the empty string)"),
        }
    }

    fn postfix(&mut self) -> Result<Rewb, ParseError> {
        let mut r = self.atom()?;
        while self.peek() == Some('*') {
            self.pos += 1;
            r = Rewb::star(r);
        }
        Ok(r)
    }

    fn index(&mut self) -> Result<u32, ParseError> {
        let start = self.pos;
        let at = self.offset();
        let mut digits = String::new();
        while let Some(c) = self.peek().filter(char::is_ascii_digit) {
            digits.push(c);
            self.pos += 1;
        }
        if self.pos == start {
            return self.err("expected a decimal index");
        }
        match digits.parse::<u32>() {
            Ok(0) => Err(ParseError {
                position: at,
                message: "index 0 is not allowed".into(),
            }),
            Ok(i) => Ok(i),
            Err(_) => Err(ParseError {
                position: at,
                message: "index out of range".into(),
            }),
        }
    }

    fn atom(&mut self) -> Result<Rewb, ParseError> {
        let Some(c) = self.peek() else {
            return self.err("unexpected end of input");
        };
        match c {
            'a'..='z' => {
                self.pos += 1;
                Ok(Rewb::Terminal(c))
            }
            '~' => {
                self.pos += 1;
                Ok(Rewb::Epsilon)
            }
            '\\' => {
                self.pos += 1;
                Ok(Rewb::Ref(self.index()?))
            }
            '(' if self.peek2() == Some('_') => {
                self.pos += 2;
                let i = self.index()?;
                let body = self.alternation()?;
                if self.peek() != Some(')') || self.peek2() != Some('_') {
                    return self.err(format!("expected `)_{i}`"));
                }
                self.pos += 2;
                let at = self.offset();
                let j = self.index()?;
                if i != j {
                    return Err(ParseError {
                        position: at,
                        message: format!("group `(_{i}` closed by `)_{j}`"),
                    });
                }
                Ok(Rewb::group(i, body))
            }
            '(' => {
                self.pos += 1;
                let body = self.alternation()?;
                if self.peek() != Some(')') {
                    return self.err("expected `)`");
                }
                if self.peek2() == Some('_') {
                    return self.err("plain `(` closed by a capture bracket `)_`");
                }
                self.pos += 1;
                Ok(body)
            }
            '*' => self.err("`*` without an operand"),
            _ => self.err(format!("unexpected `{c}`")),
        }
    }
}
