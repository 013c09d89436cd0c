//! Ref-strings and the dereferencing pipeline.
//!
//! A ref-string is a word over the extended alphabet: letters, open and
//! close brackets `[i`, `]i`, and number characters `#i`. Dereferencing
//! replaces, left to right, each `#i` by the letters of the rightmost
//! `i`-bracketed segment of the already dereferenced prefix, then erases
//! the brackets.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::Error;
use crate::syntax::Rewb;

/// A symbol of the extended alphabet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtSymbol {
    Letter(char),
    Open(u32),
    Close(u32),
    Num(u32),
}

impl ExtSymbol {
    pub fn index(self) -> Option<u32> {
        match self {
            ExtSymbol::Letter(_) => None,
            ExtSymbol::Open(i) | ExtSymbol::Close(i) | ExtSymbol::Num(i) => Some(i),
        }
    }

    pub fn is_bracket(self) -> bool {
        matches!(self, ExtSymbol::Open(_) | ExtSymbol::Close(_))
    }
}

impl fmt::Display for ExtSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtSymbol::Letter(c) => write!(f, "{c}"),
            ExtSymbol::Open(i) => write!(f, "[{i}"),
            ExtSymbol::Close(i) => write!(f, "]{i}"),
            ExtSymbol::Num(i) => write!(f, "#{i}"),
        }
    }
}

impl FromStr for ExtSymbol {
    type Err = Error;

    fn from_str(tok: &str) -> Result<Self, Self::Err> {
        let bad = || Error::RefToken(tok.to_string());
        let mut chars = tok.chars();
        let first = chars.next().ok_or_else(bad)?;
        let rest = chars.as_str();
        let index = || match rest.parse::<u32>() {
            Ok(i) if i >= 1 && rest.bytes().all(|b| b.is_ascii_digit()) => Ok(i),
            _ => Err(bad()),
        };
        match first {
            'a'..='z' if rest.is_empty() => Ok(ExtSymbol::Letter(first)),
            '[' => Ok(ExtSymbol::Open(index()?)),
            ']' => Ok(ExtSymbol::Close(index()?)),
            '#' => Ok(ExtSymbol::Num(index()?)),
            _ => Err(bad()),
        }
    }
}

/// A word over the extended alphabet. The text form is space-separated
/// tokens, e.g. `[1 a b ]1 #1`; the empty string is the empty ref-string.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RefString(pub Vec<ExtSymbol>);

impl RefString {
    pub fn new() -> Self {
        RefString(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[ExtSymbol] {
        &self.0
    }

    pub fn push(&mut self, s: ExtSymbol) {
        self.0.push(s);
    }
}

impl From<Vec<ExtSymbol>> for RefString {
    fn from(v: Vec<ExtSymbol>) -> Self {
        RefString(v)
    }
}

impl fmt::Display for RefString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, s) in self.0.iter().enumerate() {
            if n > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl FromStr for RefString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split_whitespace()
            .map(str::parse)
            .collect::<Result<Vec<_>, _>>()
            .map(RefString)
    }
}

fn letters_of(v: &[ExtSymbol]) -> impl Iterator<Item = char> + '_ {
    v.iter().filter_map(|s| match s {
        ExtSymbol::Letter(c) => Some(*c),
        _ => None,
    })
}

/// Letters of the rightmost `i`-bracketed segment of `v`: from the last `[i`
/// up to the next `]i`, or to the end if it is unclosed. Empty when `v` has
/// no `[i`. Number characters in `v`, if any, are ignored.
pub fn fetch(i: u32, v: &[ExtSymbol]) -> String {
    let Some(start) = v.iter().rposition(|s| *s == ExtSymbol::Open(i)) else {
        return String::new();
    };
    let tail = &v[start + 1..];
    let end = tail
        .iter()
        .position(|s| *s == ExtSymbol::Close(i))
        .unwrap_or(tail.len());
    letters_of(&tail[..end]).collect()
}

/// Replaces every number character, left to right, by what it fetches from
/// the already-processed prefix. The result has no number characters.
pub fn deref_pre(v: &[ExtSymbol]) -> Vec<ExtSymbol> {
    let mut out = Vec::with_capacity(v.len());
    for &s in v {
        match s {
            ExtSymbol::Num(i) => {
                let fetched = fetch(i, &out);
                out.extend(fetched.chars().map(ExtSymbol::Letter));
            }
            other => out.push(other),
        }
    }
    out
}

pub fn deref(v: &[ExtSymbol]) -> String {
    letters_of(&deref_pre(v)).collect()
}

/// Content of memory cell `i` after reading `v`.
pub fn mem(i: u32, v: &[ExtSymbol]) -> String {
    fetch(i, &deref_pre(v))
}

pub fn open_set(v: &[ExtSymbol]) -> BTreeSet<u32> {
    let mut open = BTreeSet::new();
    for s in v {
        match *s {
            ExtSymbol::Open(i) => {
                open.insert(i);
            }
            ExtSymbol::Close(i) => {
                open.remove(&i);
            }
            _ => {}
        }
    }
    open
}

/// True iff every `#i` that has some `[i` before it also has a `]i` between
/// the rightmost such `[i` and itself.
pub fn is_matching(v: &[ExtSymbol]) -> bool {
    v.iter().enumerate().all(|(p, s)| match *s {
        ExtSymbol::Num(i) => match v[..p].iter().rposition(|t| *t == ExtSymbol::Open(i)) {
            Some(o) => v[o + 1..p].contains(&ExtSymbol::Close(i)),
            None => true,
        },
        _ => true,
    })
}

/// Incremental dereferencing state: the dereferenced prefix, every memory
/// cell and the set of open cells, updated one symbol at a time.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MemState {
    deref: String,
    mems: Vec<String>,
    open: Vec<bool>,
}

impl MemState {
    /// A state with cells `1..=kappa` preallocated. Cells with larger indices
    /// are added on demand.
    pub fn new(kappa: u32) -> Self {
        MemState {
            deref: String::new(),
            mems: vec![String::new(); kappa as usize],
            open: vec![false; kappa as usize],
        }
    }

    pub fn of(v: &[ExtSymbol]) -> Self {
        let mut st = MemState::default();
        for &s in v {
            st.push(s);
        }
        st
    }

    fn ensure(&mut self, i: u32) -> usize {
        let k = i as usize;
        if self.mems.len() < k {
            self.mems.resize(k, String::new());
            self.open.resize(k, false);
        }
        k - 1
    }

    pub fn push(&mut self, s: ExtSymbol) {
        match s {
            ExtSymbol::Letter(c) => {
                self.deref.push(c);
                for (m, &o) in self.mems.iter_mut().zip(&self.open) {
                    if o {
                        m.push(c);
                    }
                }
            }
            ExtSymbol::Num(i) => {
                let copied = self.mem(i).to_string();
                self.deref.push_str(&copied);
                for (m, &o) in self.mems.iter_mut().zip(&self.open) {
                    if o {
                        m.push_str(&copied);
                    }
                }
            }
            ExtSymbol::Open(i) => {
                let k = self.ensure(i);
                self.mems[k].clear();
                self.open[k] = true;
            }
            ExtSymbol::Close(i) => {
                let k = self.ensure(i);
                self.open[k] = false;
            }
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn deref(&self) -> &str {
        &self.deref
    }

    pub fn mem(&self, i: u32) -> &str {
        self.mems.get(i as usize - 1).map_or("", String::as_str)
    }

    pub fn is_open(&self, i: u32) -> bool {
        self.open.get(i as usize - 1).copied().unwrap_or(false)
    }

    pub fn open_set(&self) -> BTreeSet<u32> {
        (1..=self.open.len() as u32)
            .filter(|&i| self.is_open(i))
            .collect()
    }

    /// Memory cells `1..=kappa` in order.
    pub fn mems(&self, kappa: u32) -> Vec<String> {
        (1..=kappa).map(|i| self.mem(i).to_string()).collect()
    }
}

/// All ref-strings of the rewb's ref-language of length at most `max_len`.
///
/// Computed by structural recursion on the expression: groups become
/// bracket pairs and references become number characters.
pub fn ref_enumerate(r: &Rewb, max_len: usize) -> BTreeSet<RefString> {
    ref_lang(r, max_len).into_iter().map(RefString).collect()
}

fn ref_lang(r: &Rewb, n: usize) -> BTreeSet<Vec<ExtSymbol>> {
    let single = |s: ExtSymbol| -> BTreeSet<Vec<ExtSymbol>> {
        if n >= 1 {
            BTreeSet::from([vec![s]])
        } else {
            BTreeSet::new()
        }
    };
    match r {
        Rewb::Terminal(c) => single(ExtSymbol::Letter(*c)),
        Rewb::Ref(i) => single(ExtSymbol::Num(*i)),
        Rewb::Epsilon => BTreeSet::from([Vec::new()]),
        Rewb::Group(i, body) => {
            if n < 2 {
                return BTreeSet::new();
            }
            ref_lang(body, n - 2)
                .into_iter()
                .map(|w| {
                    let mut v = Vec::with_capacity(w.len() + 2);
                    v.push(ExtSymbol::Open(*i));
                    v.extend(w);
                    v.push(ExtSymbol::Close(*i));
                    v
                })
                .collect()
        }
        Rewb::Alt(l, rr) => {
            let mut out = ref_lang(l, n);
            out.extend(ref_lang(rr, n));
            out
        }
        Rewb::Concat(l, rr) => {
            let left = ref_lang(l, n);
            let right = ref_lang(rr, n);
            concat_bounded(&left, &right, n)
        }
        Rewb::Star(body) => {
            let pieces: Vec<_> = ref_lang(body, n)
                .into_iter()
                .filter(|w| !w.is_empty())
                .collect();
            let mut all = BTreeSet::from([Vec::new()]);
            let mut frontier = all.clone();
            while !frontier.is_empty() {
                let mut next = BTreeSet::new();
                for u in &frontier {
                    for p in &pieces {
                        if u.len() + p.len() <= n {
                            let mut w = u.clone();
                            w.extend_from_slice(p);
                            if !all.contains(&w) {
                                next.insert(w);
                            }
                        }
                    }
                }
                all.extend(next.iter().cloned());
                frontier = next;
            }
            all
        }
    }
}

fn concat_bounded(
    left: &BTreeSet<Vec<ExtSymbol>>,
    right: &BTreeSet<Vec<ExtSymbol>>,
    n: usize,
) -> BTreeSet<Vec<ExtSymbol>> {
    let mut out = BTreeSet::new();
    for u in left {
        for w in right {
            if u.len() + w.len() <= n {
                let mut v = u.clone();
                v.extend_from_slice(w);
                out.insert(v);
            }
        }
    }
    out
}
