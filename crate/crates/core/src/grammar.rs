//! (Parallel) multiple context-free grammars.
//!
//! A nonterminal of dimension `d` derives `d`-tuples of words. A rule
//! `A -> f[A1, ..., Al]` combines tuples derived from `A1..Al` with the
//! concatenation function `f`, whose output components are patterns over
//! terminal words and argument components. A grammar is an MCFG when no
//! function uses an argument component twice.
//!
//! Text format, one declaration per line, `#` starts a comment:
//!
//! ```text
//! pmcfg
//! start S
//! nonterm S dim 1
//! nonterm A dim 1
//! fun cp : 1 -> 1 = <$1.1 $1.1>
//! fun e : -> 1 = <>
//! fun pa : 1 -> 1 = <$1.1 "a">
//! rule S -> cp[A]
//! rule A -> e[]
//! rule A -> pa[A]
//! ```

use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GrammarKind {
    Pmcfg,
    Mcfg,
}

impl fmt::Display for GrammarKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GrammarKind::Pmcfg => "pmcfg",
            GrammarKind::Mcfg => "mcfg",
        })
    }
}

/// One item of a pattern. Argument and component indices are 0-based here
/// and 1-based in the text format.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Item {
    Word(String),
    Arg { arg: usize, comp: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Function {
    pub name: String,
    pub arg_dims: Vec<usize>,
    /// One pattern per output component.
    pub body: Vec<Vec<Item>>,
}

impl Function {
    pub fn new(
        name: impl Into<String>,
        arg_dims: Vec<usize>,
        body: Vec<Vec<Item>>,
    ) -> Result<Self> {
        let f = Function {
            name: name.into(),
            arg_dims,
            body: body.into_iter().map(normalize).collect(),
        };
        f.check()?;
        Ok(f)
    }

    pub fn arity(&self) -> usize {
        self.arg_dims.len()
    }

    pub fn out_dim(&self) -> usize {
        self.body.len()
    }

    fn check(&self) -> Result<()> {
        for pat in &self.body {
            for item in pat {
                if let Item::Arg { arg, comp } = *item {
                    if arg >= self.arg_dims.len() || comp >= self.arg_dims[arg] {
                        return Err(Error::Dimension(format!(
                            "function {} refers to ${}.{} out of range",
                            self.name,
                            arg + 1,
                            comp + 1
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Applies the function to argument tuples.
    pub fn eval(&self, args: &[&[String]]) -> Result<Vec<String>> {
        if args.len() != self.arg_dims.len()
            || args.iter().zip(&self.arg_dims).any(|(a, &d)| a.len() != d)
        {
            let got: Vec<usize> = args.iter().map(|a| a.len()).collect();
            return Err(Error::Dimension(format!(
                "function {} expects argument dimensions {:?}, got {:?}",
                self.name, self.arg_dims, got
            )));
        }
        Ok(self.eval_unchecked(args))
    }

    pub(crate) fn eval_unchecked(&self, args: &[&[String]]) -> Vec<String> {
        self.body
            .iter()
            .map(|pat| {
                let mut out = String::new();
                for item in pat {
                    match item {
                        Item::Word(w) => out.push_str(w),
                        Item::Arg { arg, comp } => out.push_str(&args[*arg][*comp]),
                    }
                }
                out
            })
            .collect()
    }

    /// True iff some argument component is used more than once.
    pub fn is_duplicating(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.body.iter().flatten().any(|item| match item {
            Item::Arg { arg, comp } => !seen.insert((*arg, *comp)),
            Item::Word(_) => false,
        })
    }

    /// True iff the first component of every argument occurs in the first
    /// output component, so the output's first component is at least as long
    /// as every argument's.
    pub fn is_first_monotone(&self) -> bool {
        let first = self.body.first().map(Vec::as_slice).unwrap_or(&[]);
        (0..self.arity()).all(|a| first.contains(&Item::Arg { arg: a, comp: 0 }))
    }
}

/// Merges adjacent words and drops empty ones.
fn normalize(pat: Vec<Item>) -> Vec<Item> {
    let mut out: Vec<Item> = Vec::with_capacity(pat.len());
    for item in pat {
        match item {
            Item::Word(w) if w.is_empty() => {}
            Item::Word(w) => match out.last_mut() {
                Some(Item::Word(prev)) => prev.push_str(&w),
                _ => out.push(Item::Word(w)),
            },
            arg => out.push(arg),
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nonterminal {
    pub name: String,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Rule {
    pub lhs: usize,
    pub fun: usize,
    pub args: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grammar {
    pub kind: GrammarKind,
    pub nonterminals: Vec<Nonterminal>,
    pub functions: Vec<Function>,
    pub rules: Vec<Rule>,
    pub start: usize,
}

impl Grammar {
    pub fn new(kind: GrammarKind) -> Self {
        Grammar {
            kind,
            nonterminals: Vec::new(),
            functions: Vec::new(),
            rules: Vec::new(),
            start: 0,
        }
    }

    pub fn add_nonterminal(&mut self, name: impl Into<String>, dim: usize) -> usize {
        self.nonterminals.push(Nonterminal {
            name: name.into(),
            dim,
        });
        self.nonterminals.len() - 1
    }

    pub fn add_function(&mut self, f: Function) -> usize {
        self.functions.push(f);
        self.functions.len() - 1
    }

    pub fn add_rule(&mut self, lhs: usize, fun: usize, args: Vec<usize>) {
        self.rules.push(Rule { lhs, fun, args });
    }

    pub fn nonterminal_index(&self, name: &str) -> Option<usize> {
        self.nonterminals.iter().position(|n| n.name == name)
    }

    pub fn function_index(&self, name: &str) -> Option<usize> {
        self.functions.iter().position(|f| f.name == name)
    }

    /// Largest nonterminal dimension.
    pub fn dimension(&self) -> usize {
        self.nonterminals.iter().map(|n| n.dim).max().unwrap_or(0)
    }

    /// Checks the start dimension, the rule signatures and the declared kind.
    pub fn check(&self) -> Result<()> {
        let start = self
            .nonterminals
            .get(self.start)
            .ok_or_else(|| Error::Dimension("no start symbol".into()))?;
        if start.dim != 1 {
            return Err(Error::Dimension(format!(
                "start symbol {} has dimension {}",
                start.name, start.dim
            )));
        }
        for f in &self.functions {
            f.check()?;
        }
        for r in &self.rules {
            self.check_rule(r)?;
        }
        if self.kind == GrammarKind::Mcfg && !self.is_nonduplicating() {
            return Err(Error::Dimension(
                "grammar declared mcfg uses a duplicating function".into(),
            ));
        }
        Ok(())
    }

    fn check_rule(&self, r: &Rule) -> Result<()> {
        let f = &self.functions[r.fun];
        let lhs = &self.nonterminals[r.lhs];
        let arg_dims: Vec<usize> = r.args.iter().map(|&a| self.nonterminals[a].dim).collect();
        if f.out_dim() != lhs.dim || f.arg_dims != arg_dims {
            return Err(Error::Dimension(format!(
                "rule {} -> {}[..]: function has signature {:?} -> {}, rule needs {:?} -> {}",
                lhs.name,
                f.name,
                f.arg_dims,
                f.out_dim(),
                arg_dims,
                lhs.dim
            )));
        }
        Ok(())
    }

    /// True iff no function used by the grammar copies an argument component.
    pub fn is_nonduplicating(&self) -> bool {
        self.functions.iter().all(|f| !f.is_duplicating())
    }

    /// True iff every function is nullary or unary.
    pub fn is_unary(&self) -> bool {
        self.functions.iter().all(|f| f.arity() <= 1)
    }

    /// Every function used by a non-nullary rule is first-component
    /// monotone; length pruning on the first component is then exact.
    pub fn has_monotonicity_certificate(&self) -> bool {
        self.rules
            .iter()
            .all(|r| r.args.is_empty() || self.functions[r.fun].is_first_monotone())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{}", self.kind);
        let _ = writeln!(s, "start {}", self.nonterminals[self.start].name);
        for n in &self.nonterminals {
            let _ = writeln!(s, "nonterm {} dim {}", n.name, n.dim);
        }
        for f in &self.functions {
            let dims: Vec<String> = f.arg_dims.iter().map(usize::to_string).collect();
            let _ = write!(s, "fun {} : ", f.name);
            if !dims.is_empty() {
                let _ = write!(s, "{} ", dims.join(","));
            }
            let _ = write!(s, "-> {} = <", f.out_dim());
            for (k, pat) in f.body.iter().enumerate() {
                if k > 0 {
                    s.push_str(" ; ");
                }
                let items: Vec<String> = pat
                    .iter()
                    .map(|item| match item {
                        Item::Word(w) => format!("\"{w}\""),
                        Item::Arg { arg, comp } => format!("${}.{}", arg + 1, comp + 1),
                    })
                    .collect();
                s.push_str(&items.join(" "));
            }
            s.push_str(">\n");
        }
        for r in &self.rules {
            let args: Vec<&str> = r
                .args
                .iter()
                .map(|&a| self.nonterminals[a].name.as_str())
                .collect();
            let _ = writeln!(
                s,
                "rule {} -> {}[{}]",
                self.nonterminals[r.lhs].name,
                self.functions[r.fun].name,
                args.join(",")
            );
        }
        s
    }

    pub fn parse(text: &str) -> Result<Grammar> {
        parse_grammar(text)
    }
}

impl fmt::Display for Grammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for Grammar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_grammar(s)
    }
}

fn syntax(line: usize, message: impl Into<String>) -> Error {
    Error::GrammarSyntax {
        line,
        message: message.into(),
    }
}

fn valid_name(name: &str) -> bool {
    !name.is_empty() && !name.contains(|c: char| c.is_whitespace() || "[]<>\"#".contains(c))
}

fn parse_pattern(line: usize, text: &str) -> Result<Vec<Item>> {
    let mut items = Vec::new();
    let mut rest = text.trim_start();
    while !rest.is_empty() {
        if let Some(after) = rest.strip_prefix('"') {
            let end = after
                .find('"')
                .ok_or_else(|| syntax(line, "unterminated word"))?;
            items.push(Item::Word(after[..end].to_string()));
            rest = after[end + 1..].trim_start();
        } else if let Some(after) = rest.strip_prefix('$') {
            let end = after.find(char::is_whitespace).unwrap_or(after.len());
            let (a, c) = after[..end]
                .split_once('.')
                .ok_or_else(|| syntax(line, format!("bad reference `${}`", &after[..end])))?;
            let parse_idx = |t: &str| match t.parse::<usize>() {
                Ok(n) if n >= 1 => Ok(n - 1),
                _ => Err(syntax(line, format!("bad reference `${}`", &after[..end]))),
            };
            items.push(Item::Arg {
                arg: parse_idx(a)?,
                comp: parse_idx(c)?,
            });
            rest = after[end..].trim_start();
        } else {
            return Err(syntax(line, format!("unexpected pattern text `{rest}`")));
        }
    }
    Ok(items)
}

/// Parses the line-based grammar text format.
pub fn parse_grammar(text: &str) -> Result<Grammar> {
    let mut kind = None;
    let mut start_name: Option<(usize, String)> = None;
    let mut g = Grammar::new(GrammarKind::Pmcfg);
    let mut nt_index: HashMap<String, usize> = HashMap::new();
    let mut fun_index: HashMap<String, usize> = HashMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let content = match raw.find('#') {
            // `#` inside a quoted word is not a comment
            Some(p) if raw[..p].matches('"').count() % 2 == 0 => &raw[..p],
            _ => raw,
        }
        .trim();
        if content.is_empty() {
            continue;
        }
        let (keyword, rest) = content
            .split_once(char::is_whitespace)
            .unwrap_or((content, ""));
        let rest = rest.trim();
        match keyword {
            "pmcfg" | "mcfg" if rest.is_empty() => {
                if kind.is_some() {
                    return Err(syntax(line, "duplicate header"));
                }
                kind = Some(if keyword == "pmcfg" {
                    GrammarKind::Pmcfg
                } else {
                    GrammarKind::Mcfg
                });
            }
            "start" => {
                if !valid_name(rest) {
                    return Err(syntax(line, "bad start symbol"));
                }
                start_name = Some((line, rest.to_string()));
            }
            "nonterm" => {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                let [name, "dim", d] = parts[..] else {
                    return Err(syntax(line, "expected `nonterm NAME dim D`"));
                };
                let dim: usize = d.parse().map_err(|_| syntax(line, "bad dimension"))?;
                if !valid_name(name) || name.contains(',') {
                    return Err(syntax(line, format!("bad nonterminal name `{name}`")));
                }
                if nt_index.contains_key(name) {
                    return Err(syntax(line, format!("duplicate nonterminal `{name}`")));
                }
                nt_index.insert(name.to_string(), g.add_nonterminal(name, dim));
            }
            "fun" => {
                let (name, sig) = rest
                    .split_once(" : ")
                    .ok_or_else(|| syntax(line, "expected `fun NAME : ...`"))?;
                let name = name.trim();
                if !valid_name(name) {
                    return Err(syntax(line, format!("bad function name `{name}`")));
                }
                let (dims, body) = sig
                    .split_once('=')
                    .ok_or_else(|| syntax(line, "expected `=`"))?;
                let (ins, out) = dims
                    .split_once("->")
                    .ok_or_else(|| syntax(line, "expected `->`"))?;
                let arg_dims = if ins.trim().is_empty() {
                    Vec::new()
                } else {
                    ins.split(',')
                        .map(|d| {
                            d.trim()
                                .parse::<usize>()
                                .map_err(|_| syntax(line, "bad argument dimension"))
                        })
                        .collect::<Result<Vec<_>>>()?
                };
                let out_dim: usize = out
                    .trim()
                    .parse()
                    .map_err(|_| syntax(line, "bad output dimension"))?;
                let body = body.trim();
                let inner = body
                    .strip_prefix('<')
                    .and_then(|b| b.strip_suffix('>'))
                    .ok_or_else(|| syntax(line, "pattern tuple must be enclosed in < >"))?;
                let mut pats = Vec::new();
                // split on `;` outside quotes
                let mut cur = String::new();
                let mut quoted = false;
                for c in inner.chars() {
                    match c {
                        '"' => {
                            quoted = !quoted;
                            cur.push(c);
                        }
                        ';' if !quoted => pats.push(std::mem::take(&mut cur)),
                        _ => cur.push(c),
                    }
                }
                pats.push(cur);
                let pats = pats
                    .iter()
                    .map(|p| parse_pattern(line, p))
                    .collect::<Result<Vec<_>>>()?;
                if pats.len() != out_dim {
                    return Err(syntax(
                        line,
                        format!(
                            "{} components given for output dimension {out_dim}",
                            pats.len()
                        ),
                    ));
                }
                let f =
                    Function::new(name, arg_dims, pats).map_err(|e| syntax(line, e.to_string()))?;
                if fun_index.contains_key(name) {
                    return Err(syntax(line, format!("duplicate function `{name}`")));
                }
                fun_index.insert(name.to_string(), g.add_function(f));
            }
            "rule" => {
                let (lhs, rhs) = rest
                    .split_once("->")
                    .ok_or_else(|| syntax(line, "expected `->`"))?;
                let lhs = lhs.trim();
                let rhs = rhs.trim();
                let open = rhs.find('[').ok_or_else(|| syntax(line, "expected `[`"))?;
                let fname = rhs[..open].trim();
                let args = rhs[open + 1..]
                    .strip_suffix(']')
                    .ok_or_else(|| syntax(line, "expected `]`"))?;
                let lhs_id = *nt_index
                    .get(lhs)
                    .ok_or_else(|| syntax(line, format!("unknown nonterminal `{lhs}`")))?;
                let fun = *fun_index
                    .get(fname)
                    .ok_or_else(|| syntax(line, format!("unknown function `{fname}`")))?;
                let args = if args.trim().is_empty() {
                    Vec::new()
                } else {
                    args.split(',')
                        .map(|a| {
                            nt_index.get(a.trim()).copied().ok_or_else(|| {
                                syntax(line, format!("unknown nonterminal `{}`", a.trim()))
                            })
                        })
                        .collect::<Result<Vec<_>>>()?
                };
                let rule = Rule {
                    lhs: lhs_id,
                    fun,
                    args,
                };
                g.check_rule(&rule)
                    .map_err(|e| syntax(line, e.to_string()))?;
                g.rules.push(rule);
            }
            _ => return Err(syntax(line, format!("unknown declaration `{keyword}`"))),
        }
    }
    g.kind = kind.ok_or_else(|| syntax(1, "missing `pmcfg` or `mcfg` header"))?;
    let (line, name) = start_name.ok_or_else(|| syntax(1, "missing `start` declaration"))?;
    g.start = *nt_index
        .get(&name)
        .ok_or_else(|| syntax(line, format!("unknown start symbol `{name}`")))?;
    g.check()?;
    Ok(g)
}
