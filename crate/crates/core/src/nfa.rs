//! ε-free NFA over the extended alphabet recognizing a rewb's ref-language.
//!
//! States are partial derivatives of the bracketed expression (groups become
//! `[i body ]i`, references become `#i`), numbered in breadth-first order of
//! discovery with outgoing symbols explored in [`ExtSymbol`] order. Two extra
//! conditions are then enforced:
//!
//! * (a) every state is reachable and co-reachable (the automaton is trim);
//! * (b) a bracket edge `q -[i-> q'` or `q -]i-> q'` is the only edge from `q`
//!   to `q'`.
//!
//! Under (a) and (b) every state has a well-defined set of open memory cells,
//! computed by [`ExtNfa::open_sets`].

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;
use std::rc::Rc;

use crate::error::{Error, Result};
use crate::semantics::{open_set, ExtSymbol, RefString};
use crate::syntax::Rewb;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub from: usize,
    pub label: ExtSymbol,
    pub to: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtNfa {
    pub num_states: usize,
    pub start: usize,
    pub finals: BTreeSet<usize>,
    /// Sorted by `(from, label, to)`.
    pub edges: Vec<Edge>,
    /// Largest memory index on any label (or in the source expression).
    pub kappa: u32,
}

/// Per-state sets of open memory cells, indexed by state.
pub type OpenSetTable = Vec<BTreeSet<u32>>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Term {
    Eps,
    Sym(ExtSymbol),
    Cat(Rc<Term>, Rc<Term>),
    Alt(Rc<Term>, Rc<Term>),
    Star(Rc<Term>),
}

fn cat(l: Rc<Term>, r: Rc<Term>) -> Rc<Term> {
    match (&*l, &*r) {
        (Term::Eps, _) => r,
        (_, Term::Eps) => l,
        (Term::Cat(a, b), _) => Rc::new(Term::Cat(a.clone(), cat(b.clone(), r))),
        _ => Rc::new(Term::Cat(l, r)),
    }
}

fn to_term(r: &Rewb) -> Rc<Term> {
    match r {
        Rewb::Terminal(c) => Rc::new(Term::Sym(ExtSymbol::Letter(*c))),
        Rewb::Epsilon => Rc::new(Term::Eps),
        Rewb::Ref(i) => Rc::new(Term::Sym(ExtSymbol::Num(*i))),
        Rewb::Concat(l, r) => cat(to_term(l), to_term(r)),
        Rewb::Alt(l, r) => Rc::new(Term::Alt(to_term(l), to_term(r))),
        Rewb::Star(b) => Rc::new(Term::Star(to_term(b))),
        Rewb::Group(i, b) => cat(
            Rc::new(Term::Sym(ExtSymbol::Open(*i))),
            cat(to_term(b), Rc::new(Term::Sym(ExtSymbol::Close(*i)))),
        ),
    }
}

fn nullable(t: &Term) -> bool {
    match t {
        Term::Eps | Term::Star(_) => true,
        Term::Sym(_) => false,
        Term::Cat(a, b) => nullable(a) && nullable(b),
        Term::Alt(a, b) => nullable(a) || nullable(b),
    }
}

fn first_symbols(t: &Term, out: &mut BTreeSet<ExtSymbol>) {
    match t {
        Term::Eps => {}
        Term::Sym(s) => {
            out.insert(*s);
        }
        Term::Cat(a, b) => {
            first_symbols(a, out);
            if nullable(a) {
                first_symbols(b, out);
            }
        }
        Term::Alt(a, b) => {
            first_symbols(a, out);
            first_symbols(b, out);
        }
        Term::Star(a) => first_symbols(a, out),
    }
}

/// Partial derivatives of `t` by `s`, in a deterministic order without repeats.
fn derive(t: &Rc<Term>, s: ExtSymbol, out: &mut Vec<Rc<Term>>) {
    fn add(out: &mut Vec<Rc<Term>>, t: Rc<Term>) {
        if !out.contains(&t) {
            out.push(t);
        }
    }
    match &**t {
        Term::Eps => {}
        Term::Sym(x) => {
            if *x == s {
                add(out, Rc::new(Term::Eps));
            }
        }
        Term::Cat(a, b) => {
            let mut da = Vec::new();
            derive(a, s, &mut da);
            for d in da {
                add(out, cat(d, b.clone()));
            }
            if nullable(a) {
                derive(b, s, out);
            }
        }
        Term::Alt(a, b) => {
            derive(a, s, out);
            derive(b, s, out);
        }
        Term::Star(a) => {
            let mut da = Vec::new();
            derive(a, s, &mut da);
            for d in da {
                add(out, cat(d, t.clone()));
            }
        }
    }
}

impl ExtNfa {
    /// Builds the trim NFA satisfying conditions (a) and (b).
    pub fn build(r: &Rewb) -> ExtNfa {
        let start = to_term(r);
        let mut ids: HashMap<Rc<Term>, usize> = HashMap::from([(start.clone(), 0)]);
        let mut terms = vec![start];
        let mut edges = Vec::new();
        let mut queue = VecDeque::from([0usize]);
        while let Some(q) = queue.pop_front() {
            let t = terms[q].clone();
            let mut syms = BTreeSet::new();
            first_symbols(&t, &mut syms);
            for s in syms {
                let mut ds = Vec::new();
                derive(&t, s, &mut ds);
                for d in ds {
                    let to = *ids.entry(d.clone()).or_insert_with(|| {
                        terms.push(d);
                        queue.push_back(terms.len() - 1);
                        terms.len() - 1
                    });
                    edges.push(Edge {
                        from: q,
                        label: s,
                        to,
                    });
                }
            }
        }
        let finals = terms
            .iter()
            .enumerate()
            .filter(|(_, t)| nullable(t))
            .map(|(q, _)| q)
            .collect();
        let mut nfa = ExtNfa {
            num_states: terms.len(),
            start: 0,
            finals,
            edges,
            kappa: r.max_group_index(),
        };
        nfa.separate_bracket_edges();
        nfa.trim();
        nfa.edges.sort();
        nfa.edges.dedup();
        debug_assert!(nfa.check_conditions().is_ok());
        nfa
    }

    /// Redirects every bracket edge that shares its endpoints with another
    /// edge to a fresh copy of the target state.
    fn separate_bracket_edges(&mut self) {
        loop {
            let mut pair_count: HashMap<(usize, usize), usize> = HashMap::new();
            for e in &self.edges {
                *pair_count.entry((e.from, e.to)).or_default() += 1;
            }
            let Some(pos) = self
                .edges
                .iter()
                .position(|e| e.label.is_bracket() && pair_count[&(e.from, e.to)] > 1)
            else {
                return;
            };
            let bad = self.edges[pos];
            let fresh = self.num_states;
            self.num_states += 1;
            self.edges[pos].to = fresh;
            let copied: Vec<Edge> = self
                .edges
                .iter()
                .filter(|e| e.from == bad.to)
                .map(|e| Edge {
                    from: fresh,
                    label: e.label,
                    to: if e.to == bad.to && e.label == bad.label {
                        fresh
                    } else {
                        e.to
                    },
                })
                .collect();
            self.edges.extend(copied);
            if self.finals.contains(&bad.to) {
                self.finals.insert(fresh);
            }
        }
    }

    fn trim(&mut self) {
        let forward = self.reach(&[self.start], false);
        let finals: Vec<usize> = self.finals.iter().copied().collect();
        let backward = self.reach(&finals, true);
        let keep: Vec<usize> = (0..self.num_states)
            .filter(|q| forward[*q] && backward[*q])
            .collect();
        if keep.len() == self.num_states {
            return;
        }
        // The start state is kept even when the language is empty, so that
        // the automaton always has one.
        let mut keep = keep;
        if !keep.contains(&self.start) {
            keep.insert(0, self.start);
            keep.sort();
        }
        let renum: HashMap<usize, usize> = keep.iter().enumerate().map(|(n, &q)| (q, n)).collect();
        self.edges = self
            .edges
            .iter()
            .filter_map(|e| {
                Some(Edge {
                    from: *renum.get(&e.from)?,
                    label: e.label,
                    to: *renum.get(&e.to)?,
                })
            })
            .collect();
        self.finals = self
            .finals
            .iter()
            .filter_map(|q| renum.get(q).copied())
            .collect();
        self.start = renum[&self.start];
        self.num_states = keep.len();
    }

    fn reach(&self, from: &[usize], reverse: bool) -> Vec<bool> {
        let mut seen = vec![false; self.num_states];
        let mut stack: Vec<usize> = from.to_vec();
        for &q in from {
            seen[q] = true;
        }
        while let Some(q) = stack.pop() {
            for e in &self.edges {
                let (a, b) = if reverse {
                    (e.to, e.from)
                } else {
                    (e.from, e.to)
                };
                if a == q && !seen[b] {
                    seen[b] = true;
                    stack.push(b);
                }
            }
        }
        seen
    }

    /// Verifies ε-freeness (by construction), trimness and the bracket-edge
    /// condition.
    pub fn check_conditions(&self) -> Result<()> {
        let forward = self.reach(&[self.start], false);
        let finals: Vec<usize> = self.finals.iter().copied().collect();
        let backward = self.reach(&finals, true);
        for q in 0..self.num_states {
            if !forward[q] {
                return Err(Error::Internal(format!("state {q} is unreachable")));
            }
            if !backward[q] && !self.finals.is_empty() {
                return Err(Error::Internal(format!(
                    "state {q} cannot reach a final state"
                )));
            }
        }
        for e in &self.edges {
            if e.label.is_bracket()
                && self
                    .edges
                    .iter()
                    .any(|f| f != e && f.from == e.from && f.to == e.to)
            {
                return Err(Error::Internal(format!(
                    "bracket edge {} -{}-> {} has a parallel edge",
                    e.from, e.label, e.to
                )));
            }
        }
        Ok(())
    }

    pub fn out_edges(&self, q: usize) -> impl Iterator<Item = &Edge> + '_ {
        let lo = self.edges.partition_point(|e| e.from < q);
        self.edges[lo..].iter().take_while(move |e| e.from == q)
    }

    /// Open-cell set of every state, by forward propagation from the start
    /// state. Fails if two paths reach a state with different open sets.
    pub fn open_sets(&self) -> Result<OpenSetTable> {
        let mut table: Vec<Option<BTreeSet<u32>>> = vec![None; self.num_states];
        table[self.start] = Some(BTreeSet::new());
        let mut queue = VecDeque::from([self.start]);
        while let Some(q) = queue.pop_front() {
            let m = table[q].clone().expect("queued states are labelled");
            for e in self.out_edges(q) {
                let mut m2 = m.clone();
                match e.label {
                    ExtSymbol::Open(i) => {
                        m2.insert(i);
                    }
                    ExtSymbol::Close(i) => {
                        m2.remove(&i);
                    }
                    _ => {}
                }
                match &table[e.to] {
                    None => {
                        table[e.to] = Some(m2);
                        queue.push_back(e.to);
                    }
                    Some(existing) if *existing != m2 => {
                        return Err(Error::Internal(format!(
                            "state {} reached with open sets {:?} and {:?}",
                            e.to, existing, m2
                        )))
                    }
                    Some(_) => {}
                }
            }
        }
        table
            .into_iter()
            .enumerate()
            .map(|(q, m)| m.ok_or_else(|| Error::Internal(format!("state {q} is unreachable"))))
            .collect()
    }

    pub fn accepts(&self, v: &[ExtSymbol]) -> bool {
        self.find_run(v).is_some()
    }

    /// A run `q_0, q_1, ..., q_n` of the automaton on `v` ending in a final
    /// state, if any. The smallest run in lexicographic state order is chosen.
    pub fn find_run(&self, v: &[ExtSymbol]) -> Option<Vec<usize>> {
        // alive[i] = states from which v[i..] can be accepted
        let n = v.len();
        let mut alive = vec![vec![false; self.num_states]; n + 1];
        for &f in &self.finals {
            alive[n][f] = true;
        }
        for i in (0..n).rev() {
            for e in &self.edges {
                if e.label == v[i] && alive[i + 1][e.to] {
                    alive[i][e.from] = true;
                }
            }
        }
        if !alive[0][self.start] {
            return None;
        }
        let mut run = vec![self.start];
        let mut q = self.start;
        for (i, &s) in v.iter().enumerate() {
            q = self
                .out_edges(q)
                .find(|e| e.label == s && alive[i + 1][e.to])?
                .to;
            run.push(q);
        }
        Some(run)
    }

    /// Checks that `run` is a run of the automaton on `v` from the start
    /// state to a final state.
    pub fn check_run(&self, v: &[ExtSymbol], run: &[usize]) -> Result<()> {
        if run.len() != v.len() + 1 {
            return Err(Error::RunMismatch(format!(
                "run has {} states for {} symbols",
                run.len(),
                v.len()
            )));
        }
        if run[0] != self.start {
            return Err(Error::RunMismatch(format!(
                "run starts at {} instead of {}",
                run[0], self.start
            )));
        }
        for (i, s) in v.iter().enumerate() {
            let e = Edge {
                from: run[i],
                label: *s,
                to: run[i + 1],
            };
            if self.edges.binary_search(&e).is_err() {
                return Err(Error::RunMismatch(format!(
                    "no edge {} -{}-> {}",
                    e.from, e.label, e.to
                )));
            }
        }
        if !self.finals.contains(run.last().expect("nonempty")) {
            return Err(Error::RunMismatch("run ends in a non-final state".into()));
        }
        Ok(())
    }

    /// All accepted ref-strings of length at most `max_len`.
    pub fn enumerate(&self, max_len: usize) -> BTreeSet<RefString> {
        let mut out = BTreeSet::new();
        let mut level: BTreeSet<(usize, Vec<ExtSymbol>)> =
            BTreeSet::from([(self.start, Vec::new())]);
        for len in 0..=max_len {
            for (q, w) in &level {
                if self.finals.contains(q) {
                    out.insert(RefString(w.clone()));
                }
            }
            if len == max_len {
                break;
            }
            let mut next = BTreeSet::new();
            for (q, w) in &level {
                for e in self.out_edges(*q) {
                    let mut w2 = w.clone();
                    w2.push(e.label);
                    next.insert((e.to, w2));
                }
            }
            level = next;
        }
        out
    }

    /// Labels that occur on some edge.
    pub fn alphabet(&self) -> BTreeSet<ExtSymbol> {
        self.edges.iter().map(|e| e.label).collect()
    }

    /// Text dump: header lines, per-state open sets, then one line per edge.
    pub fn dump(&self, open: Option<&OpenSetTable>) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "states {}", self.num_states);
        let _ = writeln!(s, "start {}", self.start);
        let finals: Vec<String> = self.finals.iter().map(|q| q.to_string()).collect();
        let _ = writeln!(s, "finals {}", finals.join(" "));
        if let Some(table) = open {
            for (q, m) in table.iter().enumerate() {
                let items: Vec<String> = m.iter().map(|i| i.to_string()).collect();
                let _ = writeln!(s, "open {q} = {{{}}}", items.join(","));
            }
        }
        for e in &self.edges {
            let _ = writeln!(s, "{} -{}-> {}", e.from, e.label, e.to);
        }
        s
    }

    /// Edges grouped by source, as a map for diagnostics.
    pub fn edge_map(&self) -> BTreeMap<usize, Vec<(ExtSymbol, usize)>> {
        let mut m: BTreeMap<usize, Vec<(ExtSymbol, usize)>> = BTreeMap::new();
        for e in &self.edges {
            m.entry(e.from).or_default().push((e.label, e.to));
        }
        m
    }
}

/// Free-function form of [`ExtNfa::build`].
pub fn build_nfa(r: &Rewb) -> ExtNfa {
    ExtNfa::build(r)
}

/// Free-function form of [`ExtNfa::open_sets`].
pub fn open_sets(n: &ExtNfa) -> Result<OpenSetTable> {
    n.open_sets()
}

/// Free-function form of [`ExtNfa::enumerate`].
pub fn nfa_enumerate(n: &ExtNfa, max_len: usize) -> BTreeSet<RefString> {
    n.enumerate(max_len)
}

/// True iff `open(v)` equals the open set of the run's target state at every
/// prefix. Used by tests as a direct check of the per-state table.
pub fn run_respects_open_sets(v: &[ExtSymbol], run: &[usize], table: &OpenSetTable) -> bool {
    (0..=v.len()).all(|i| open_set(&v[..i]) == table[run[i]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::ref_enumerate;

    fn nfa(s: &str) -> ExtNfa {
        ExtNfa::build(&Rewb::parse(s).unwrap())
    }

    fn edges(n: &ExtNfa) -> Vec<String> {
        n.edges
            .iter()
            .map(|e| format!("{} -{}-> {}", e.from, e.label, e.to))
            .collect()
    }

    #[test]
    fn loop_of_references_nfa() {
        let n = nfa("(_1a*)_1(c\\1)*");
        assert_eq!(n.num_states, 4);
        assert_eq!(
            edges(&n),
            [
                "0 -[1-> 1",
                "1 -a-> 1",
                "1 -]1-> 2",
                "2 -c-> 3",
                "3 -#1-> 2"
            ]
        );
        assert_eq!(n.finals, BTreeSet::from([2]));
        let m = n.open_sets().unwrap();
        assert_eq!(
            m,
            vec![
                BTreeSet::new(),
                BTreeSet::from([1]),
                BTreeSet::new(),
                BTreeSet::new()
            ]
        );
    }

    #[test]
    fn starred_block_nfa() {
        let n = nfa("((_1a*)_1(_2\\1)_2\\2\\2)*");
        assert_eq!(n.num_states, 7);
        assert_eq!(
            edges(&n),
            [
                "0 -[1-> 1",
                "1 -a-> 1",
                "1 -]1-> 2",
                "2 -[2-> 3",
                "3 -#1-> 4",
                "4 -]2-> 5",
                "5 -#2-> 6",
                "6 -#2-> 0"
            ]
        );
        assert_eq!(n.finals, BTreeSet::from([0]));
        let m = n.open_sets().unwrap();
        assert_eq!(m[3], BTreeSet::from([2]));
        assert_eq!(m[5], BTreeSet::new());
    }

    #[test]
    fn epsilon_nfa() {
        let n = nfa("~");
        assert_eq!(n.num_states, 1);
        assert!(n.edges.is_empty());
        assert_eq!(n.finals, BTreeSet::from([0]));
        assert_eq!(n.open_sets().unwrap(), vec![BTreeSet::new()]);
        assert_eq!(n.enumerate(0).len(), 1);
    }

    #[test]
    fn bracket_edges_are_separated() {
        // `a` and `]1` lead to the same derivative from the state after `[1`
        for s in [
            "(_1~)_1a*+(_1a)_1a*",
            "((_1~)_1+a)*",
            "(_1(a+~))_1(a+~)",
            "(_1a*)_1a*+a(_1~)_1a*",
        ] {
            let n = nfa(s);
            n.check_conditions().unwrap();
            n.open_sets().unwrap();
            let r = Rewb::parse(s).unwrap();
            assert_eq!(n.enumerate(6), ref_enumerate(&r, 6), "{s}");
        }
    }

    #[test]
    fn agrees_with_structural_enumeration() {
        for s in [
            "(_1(a+b)*)_1\\1",
            "(_1a*)_1(c\\1)*",
            "((_1a*)_1(_2\\1)_2\\2\\2)*",
            "(a+b)*c",
            "\\1+(_1a*)_1c\\1",
        ] {
            let r = Rewb::parse(s).unwrap();
            assert_eq!(nfa(s).enumerate(7), ref_enumerate(&r, 7), "{s}");
        }
    }

    #[test]
    fn runs() {
        let n = nfa("(_1a*)_1(c\\1)*");
        let v: RefString = "[1 a ]1 c #1".parse().unwrap();
        let run = n.find_run(&v.0).unwrap();
        assert_eq!(run, vec![0, 1, 1, 2, 3, 2]);
        n.check_run(&v.0, &run).unwrap();
        assert!(n.check_run(&v.0, &[0, 1, 1, 2, 3, 3]).is_err());
        assert!(n
            .find_run(&"[1 a c".parse::<RefString>().unwrap().0)
            .is_none());
    }
}
