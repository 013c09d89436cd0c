//! Brute-force language oracle.
//!
//! Walks the ref-language breadth-first by ref-string length while
//! dereferencing incrementally, so every reported word is literally
//! `deref(v)` for some ref-string `v` of the language. The automaton used for
//! the walk is a position (Glushkov) automaton built here directly from the
//! expression, independent of [`crate::nfa`].

use std::collections::{BTreeSet, HashSet};

use crate::semantics::{ExtSymbol, MemState};
use crate::syntax::Rewb;

/// Position automaton of a rewb over the extended alphabet. State 0 is the
/// initial state; state `p >= 1` is "just read position `p`".
#[derive(Clone, Debug)]
pub struct PositionAutomaton {
    /// Symbol of each position; index 0 is a placeholder for the initial state.
    pub symbols: Vec<Option<ExtSymbol>>,
    pub follow: Vec<BTreeSet<usize>>,
    pub finals: BTreeSet<usize>,
}

struct Info {
    nullable: bool,
    first: BTreeSet<usize>,
    last: BTreeSet<usize>,
}

impl PositionAutomaton {
    pub fn new(r: &Rewb) -> Self {
        let mut pa = PositionAutomaton {
            symbols: vec![None],
            follow: vec![BTreeSet::new()],
            finals: BTreeSet::new(),
        };
        let info = pa.build(r);
        pa.follow[0] = info.first.clone();
        pa.finals = info.last;
        if info.nullable {
            pa.finals.insert(0);
        }
        pa
    }

    fn position(&mut self, s: ExtSymbol) -> Info {
        let p = self.symbols.len();
        self.symbols.push(Some(s));
        self.follow.push(BTreeSet::new());
        Info {
            nullable: false,
            first: BTreeSet::from([p]),
            last: BTreeSet::from([p]),
        }
    }

    fn seq(&mut self, l: Info, r: Info) -> Info {
        for &x in &l.last {
            self.follow[x].extend(r.first.iter().copied());
        }
        let mut first = l.first;
        if l.nullable {
            first.extend(r.first.iter().copied());
        }
        let mut last = r.last;
        if r.nullable {
            last.extend(l.last.iter().copied());
        }
        Info {
            nullable: l.nullable && r.nullable,
            first,
            last,
        }
    }

    fn build(&mut self, r: &Rewb) -> Info {
        match r {
            Rewb::Terminal(c) => self.position(ExtSymbol::Letter(*c)),
            Rewb::Ref(i) => self.position(ExtSymbol::Num(*i)),
            Rewb::Epsilon => Info {
                nullable: true,
                first: BTreeSet::new(),
                last: BTreeSet::new(),
            },
            Rewb::Group(i, body) => {
                let open = self.position(ExtSymbol::Open(*i));
                let inner = self.build(body);
                let lhs = self.seq(open, inner);
                let close = self.position(ExtSymbol::Close(*i));
                self.seq(lhs, close)
            }
            Rewb::Concat(l, r) => {
                let a = self.build(l);
                let b = self.build(r);
                self.seq(a, b)
            }
            Rewb::Alt(l, r) => {
                let a = self.build(l);
                let b = self.build(r);
                let mut first = a.first;
                first.extend(b.first);
                let mut last = a.last;
                last.extend(b.last);
                Info {
                    nullable: a.nullable || b.nullable,
                    first,
                    last,
                }
            }
            Rewb::Star(body) => {
                let b = self.build(body);
                for &x in &b.last {
                    self.follow[x].extend(b.first.iter().copied());
                }
                Info {
                    nullable: true,
                    first: b.first,
                    last: b.last,
                }
            }
        }
    }

    /// Successor positions of `p` with their symbols.
    pub fn successors(&self, p: usize) -> impl Iterator<Item = (ExtSymbol, usize)> + '_ {
        self.follow[p]
            .iter()
            .map(|&q| (self.symbols[q].expect("positions carry symbols"), q))
    }
}

/// Result of a bounded oracle run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult {
    pub words: BTreeSet<String>,
    /// True iff the walk closed off: every configuration reachable without
    /// the dereferenced prefix exceeding the word bound was visited within
    /// the ref-string bound, so `words` is the complete truncated language.
    pub saturated: bool,
    /// Ref-string length at which the walk stopped.
    pub explored_ref_len: usize,
}

/// `{ deref(v) : v in R(r), |v| <= max_ref_len, |deref(v)| <= max_word_len }`
/// together with a saturation flag.
///
/// Configurations are (position, dereferencing state) pairs. A configuration
/// seen before is not expanded again; since every continuation depends only
/// on the configuration, the walk is complete once a level produces no new
/// configuration whose dereferenced prefix still fits the word bound.
pub fn lang_oracle(r: &Rewb, max_word_len: usize, max_ref_len: usize) -> OracleResult {
    let pa = PositionAutomaton::new(r);
    let kappa = r.max_group_index();
    let start = (0usize, MemState::new(kappa));
    let mut seen: HashSet<(usize, MemState)> = HashSet::from([start.clone()]);
    let mut frontier = vec![start];
    let mut words = BTreeSet::new();
    let mut level = 0;
    loop {
        for (p, st) in &frontier {
            if pa.finals.contains(p) {
                words.insert(st.deref().to_string());
            }
        }
        let mut next = Vec::new();
        for (p, st) in &frontier {
            for (sym, q) in pa.successors(*p) {
                let mut st2 = st.clone();
                st2.push(sym);
                if st2.deref().len() > max_word_len {
                    continue;
                }
                let key = (q, st2);
                if seen.insert(key.clone()) {
                    next.push(key);
                }
            }
        }
        if next.is_empty() {
            return OracleResult {
                words,
                saturated: true,
                explored_ref_len: level,
            };
        }
        if level == max_ref_len {
            return OracleResult {
                words,
                saturated: false,
                explored_ref_len: level,
            };
        }
        frontier = next;
        level += 1;
    }
}
