//! Nonerasing stack automata and the automaton of a closed-star rewb.
//!
//! The stack holds the ref-string guessed so far, on top of `Z0`. Letters
//! and brackets are pushed as the NFA reads them. After pushing a number
//! `i`, the automaton walks its stack pointer down to the most recent `[i`,
//! matches the bracketed content against the input (recursively expanding
//! nested numbers), and walks back up. Control states are NFA states
//! extended with a stack of commands `call_i^x`, `exec_i^x`, `ret_i^x`;
//! the superscript `x` counts the `i`s passed on the way down so the way
//! back up knows where it started.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use crate::analysis::{compute_bounds, is_closed_star, Bounds, DEFAULT_CAP};
use crate::error::{Error, Result};
use crate::nfa::ExtNfa;
use crate::semantics::{ExtSymbol, MemState};
use crate::syntax::Rewb;

/// Stack alphabet: the extended alphabet plus the bottom symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gamma {
    Bottom,
    Sym(ExtSymbol),
}

impl fmt::Display for Gamma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gamma::Bottom => f.write_str("Z0"),
            Gamma::Sym(s) => write!(f, "{s}"),
        }
    }
}

/// An input symbol: a letter or the endmarker.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum InSym {
    Letter(char),
    End,
}

impl fmt::Display for InSym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InSym::Letter(c) => write!(f, "{c}"),
            InSym::End => f.write_str("<|"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Op {
    Call,
    Exec,
    Ret,
}

/// One command `op_i^x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cmd {
    pub op: Op,
    pub i: u32,
    pub x: u32,
}

impl fmt::Display for Cmd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.op {
            Op::Call => "call",
            Op::Exec => "exec",
            Op::Ret => "ret",
        };
        write!(f, "{op}{}^{}", self.i, self.x)
    }
}

/// A control state `q·ξ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State {
    pub base: usize,
    pub cmds: Vec<Cmd>,
}

impl State {
    fn with(&self, last: Option<Cmd>) -> State {
        let mut cmds = self.cmds[..self.cmds.len() - 1].to_vec();
        cmds.extend(last);
        State {
            base: self.base,
            cmds,
        }
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q{}", self.base)?;
        for c in &self.cmds {
            write!(f, ".{c}")?;
        }
        Ok(())
    }
}

/// Pointer movement in stack-reading mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dir {
    Left,
    Stay,
    Right,
}

impl Dir {
    fn symbol(self) -> &'static str {
        match self {
            Dir::Left => "<",
            Dir::Stay => "0",
            Dir::Right => ">",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Action {
    /// Pushdown mode: the top symbol is replaced by this non-empty string.
    Push(Vec<Gamma>),
    /// Stack-reading mode.
    Read(Dir),
}

/// A transition `δ(from, input, stack) ∋ (to, advance, action)`. Pushdown
/// transitions always require the pointer at the top; reading transitions
/// state explicitly whether they expect it there.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transition {
    pub from: usize,
    /// `None` matches every input symbol including the endmarker.
    pub input: Option<InSym>,
    pub stack: Gamma,
    pub at_top: bool,
    pub to: usize,
    /// Whether the input head advances.
    pub advance: bool,
    pub action: Action,
}

/// An instantaneous description. The input word is held by the caller;
/// `pos` is the index of the next unread letter (`pos == |w|` means only
/// the endmarker remains).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InstDesc {
    pub state: usize,
    pub pos: usize,
    pub stack: Vec<Gamma>,
    pub ptr: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Yes,
    No,
    BudgetExceeded,
}

/// Outcome of the cascade started by pushing a number.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BigStep {
    /// Back in a base state; `steps` reading moves were taken.
    Done { id: InstDesc, steps: u64 },
    /// The input did not match the referenced content.
    DeadEnd { steps: u64 },
}

#[derive(Clone, Debug)]
pub struct Nesa {
    pub states: Vec<State>,
    pub start: usize,
    pub finals: BTreeSet<usize>,
    pub sigma_in: BTreeSet<char>,
    pub gamma: BTreeSet<Gamma>,
    pub transitions: Vec<Transition>,
    /// Transition indices per source state.
    by_state: Vec<Vec<usize>>,
    index: HashMap<State, usize>,
    pub theta: u32,
    pub sigma: u32,
    pub nfa: ExtNfa,
}

struct Builder<'a> {
    nfa: &'a ExtNfa,
    theta: u32,
    sigma: u32,
    gamma: Vec<Gamma>,
    states: Vec<State>,
    index: HashMap<State, usize>,
    queue: VecDeque<usize>,
    transitions: Vec<Transition>,
}

impl Builder<'_> {
    fn intern(&mut self, s: State) -> usize {
        if let Some(&id) = self.index.get(&s) {
            return id;
        }
        let id = self.states.len();
        self.index.insert(s.clone(), id);
        self.states.push(s);
        self.queue.push_back(id);
        id
    }

    #[allow(clippy::too_many_arguments)]
    fn read(
        &mut self,
        from: usize,
        input: Option<InSym>,
        stack: Gamma,
        at_top: bool,
        to: State,
        advance: bool,
        d: Dir,
    ) {
        let to = self.intern(to);
        self.transitions.push(Transition {
            from,
            input,
            stack,
            at_top,
            to,
            advance,
            action: Action::Read(d),
        });
    }

    fn expand(&mut self, id: usize) {
        let state = self.states[id].clone();
        let Some(&last) = state.cmds.last() else {
            self.base_rules(id, state.base);
            return;
        };
        let (i, x) = (last.i, last.x);
        let cmd = |op, x| Some(Cmd { op, i, x });
        for g in self.gamma.clone() {
            for at_top in [false, true] {
                if g == Gamma::Bottom && at_top {
                    // the stack always holds at least one pushed symbol here
                    continue;
                }
                let sym = match g {
                    Gamma::Sym(s) => Some(s),
                    Gamma::Bottom => None,
                };
                match last.op {
                    Op::Call => match sym {
                        Some(ExtSymbol::Num(j)) if j == i => {
                            if x < self.theta {
                                self.read(
                                    id,
                                    None,
                                    g,
                                    at_top,
                                    state.with(cmd(Op::Call, x + 1)),
                                    false,
                                    Dir::Left,
                                );
                            }
                        }
                        Some(ExtSymbol::Open(j)) if j == i && !at_top => {
                            self.read(
                                id,
                                None,
                                g,
                                at_top,
                                state.with(cmd(Op::Exec, x)),
                                false,
                                Dir::Right,
                            );
                        }
                        None => self.read(
                            id,
                            None,
                            g,
                            at_top,
                            state.with(cmd(Op::Ret, x)),
                            false,
                            Dir::Right,
                        ),
                        _ => self.read(id, None, g, at_top, state.clone(), false, Dir::Left),
                    },
                    Op::Exec if !at_top => match sym {
                        Some(ExtSymbol::Letter(a)) => {
                            self.read(
                                id,
                                Some(InSym::Letter(a)),
                                g,
                                false,
                                state.clone(),
                                true,
                                Dir::Right,
                            );
                        }
                        Some(ExtSymbol::Open(j) | ExtSymbol::Close(j)) if j != i => {
                            self.read(id, None, g, false, state.clone(), false, Dir::Right);
                        }
                        Some(ExtSymbol::Num(j)) if j != i => {
                            if state.cmds.len() < self.sigma as usize {
                                let mut next = state.clone();
                                next.cmds.push(Cmd {
                                    op: Op::Call,
                                    i: j,
                                    x: 0,
                                });
                                self.read(id, None, g, false, next, false, Dir::Stay);
                            }
                        }
                        Some(ExtSymbol::Close(j)) if j == i => {
                            self.read(
                                id,
                                None,
                                g,
                                false,
                                state.with(cmd(Op::Ret, x)),
                                false,
                                Dir::Right,
                            );
                        }
                        _ => {}
                    },
                    Op::Exec => {}
                    Op::Ret if x > 0 => match sym {
                        Some(ExtSymbol::Num(j)) if j == i && at_top => {
                            self.read(
                                id,
                                None,
                                g,
                                true,
                                state.with(cmd(Op::Ret, x - 1)),
                                false,
                                Dir::Stay,
                            );
                        }
                        Some(ExtSymbol::Num(j)) if j == i => {
                            self.read(
                                id,
                                None,
                                g,
                                false,
                                state.with(cmd(Op::Ret, x - 1)),
                                false,
                                Dir::Right,
                            );
                        }
                        _ => self.read(id, None, g, at_top, state.clone(), false, Dir::Right),
                    },
                    Op::Ret => self.read(id, None, g, at_top, state.with(None), false, Dir::Stay),
                }
            }
        }
    }

    /// Rules for an NFA edge out of a base state: push the symbol, and for
    /// a number enter `call_i^0`.
    fn base_rules(&mut self, id: usize, q: usize) {
        let edges: Vec<_> = self.nfa.out_edges(q).copied().collect();
        for e in edges {
            let (to, input, advance) = match e.label {
                ExtSymbol::Letter(a) => (
                    State {
                        base: e.to,
                        cmds: vec![],
                    },
                    Some(InSym::Letter(a)),
                    true,
                ),
                ExtSymbol::Open(_) | ExtSymbol::Close(_) => (
                    State {
                        base: e.to,
                        cmds: vec![],
                    },
                    None,
                    false,
                ),
                ExtSymbol::Num(i) => (
                    State {
                        base: e.to,
                        cmds: vec![Cmd {
                            op: Op::Call,
                            i,
                            x: 0,
                        }],
                    },
                    None,
                    false,
                ),
            };
            let to = self.intern(to);
            for z in self.gamma.clone() {
                self.transitions.push(Transition {
                    from: id,
                    input,
                    stack: z,
                    at_top: true,
                    to,
                    advance,
                    action: Action::Push(vec![z, Gamma::Sym(e.label)]),
                });
            }
        }
    }
}

impl Nesa {
    pub fn build(r: &Rewb) -> Result<Self> {
        Self::build_with_cap(r, DEFAULT_CAP)
    }

    pub fn build_with_cap(r: &Rewb, cap: u32) -> Result<Self> {
        if !is_closed_star(r) {
            return Err(Error::NotClosedStar);
        }
        let nfa = ExtNfa::build(r);
        let open = nfa.open_sets()?;
        let bounds = compute_bounds(&nfa, &open, cap)?;
        Ok(Self::from_parts(nfa, &bounds))
    }

    /// The automaton for `nfa` with the given counter bounds.
    pub fn from_parts(nfa: ExtNfa, bounds: &Bounds) -> Self {
        let mut gamma: BTreeSet<Gamma> = nfa.alphabet().into_iter().map(Gamma::Sym).collect();
        gamma.insert(Gamma::Bottom);
        let sigma_in = nfa
            .alphabet()
            .into_iter()
            .filter_map(|s| match s {
                ExtSymbol::Letter(c) => Some(c),
                _ => None,
            })
            .collect();
        let mut b = Builder {
            nfa: &nfa,
            theta: bounds.theta,
            sigma: bounds.sigma,
            gamma: gamma.iter().copied().collect(),
            states: Vec::new(),
            index: HashMap::new(),
            queue: VecDeque::new(),
            transitions: Vec::new(),
        };
        // base states first so that state `q` of the NFA is state `q` here
        for q in 0..nfa.num_states {
            b.intern(State {
                base: q,
                cmds: vec![],
            });
        }
        while let Some(id) = b.queue.pop_front() {
            b.expand(id);
        }
        let Builder {
            states,
            index,
            mut transitions,
            ..
        } = b;
        transitions.sort();
        transitions.dedup();
        let mut by_state = vec![Vec::new(); states.len()];
        for (k, t) in transitions.iter().enumerate() {
            by_state[t.from].push(k);
        }
        Nesa {
            start: nfa.start,
            finals: nfa.finals.clone(),
            states,
            sigma_in,
            gamma,
            transitions,
            by_state,
            index,
            theta: bounds.theta,
            sigma: bounds.sigma,
            nfa,
        }
    }

    pub fn state_id(&self, s: &State) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn is_base(&self, id: usize) -> bool {
        self.states[id].cmds.is_empty()
    }

    /// The initial description for any input: start state, stack `Z0`.
    pub fn initial(&self) -> InstDesc {
        InstDesc {
            state: self.start,
            pos: 0,
            stack: vec![Gamma::Bottom],
            ptr: 0,
        }
    }

    pub fn is_accepting(&self, w: &[char], id: &InstDesc) -> bool {
        id.pos == w.len() && self.finals.contains(&id.state)
    }

    fn applicable<'a>(
        &'a self,
        w: &'a [char],
        id: &'a InstDesc,
    ) -> impl Iterator<Item = &'a Transition> + 'a {
        let input = w.get(id.pos).map_or(InSym::End, |&c| InSym::Letter(c));
        let top = id.ptr + 1 == id.stack.len();
        self.by_state[id.state]
            .iter()
            .map(|&k| &self.transitions[k])
            .filter(move |t| {
                t.input.is_none_or(|i| i == input)
                    && t.stack == id.stack[id.ptr]
                    && t.at_top == top
                    && !(t.advance && input == InSym::End)
                    && match t.action {
                        Action::Push(_) => top,
                        Action::Read(Dir::Left) => id.ptr > 0,
                        Action::Read(Dir::Right) => !top,
                        Action::Read(Dir::Stay) => true,
                    }
            })
    }

    /// All one-step successors of `id` on input `w`.
    pub fn step(&self, w: &[char], id: &InstDesc) -> Vec<InstDesc> {
        self.applicable(w, id)
            .map(|t| {
                let pos = id.pos + usize::from(t.advance);
                match &t.action {
                    Action::Push(y) => {
                        let mut stack = id.stack[..id.ptr].to_vec();
                        stack.extend_from_slice(y);
                        let ptr = stack.len() - 1;
                        InstDesc {
                            state: t.to,
                            pos,
                            stack,
                            ptr,
                        }
                    }
                    Action::Read(d) => {
                        let ptr = match d {
                            Dir::Left => id.ptr - 1,
                            Dir::Stay => id.ptr,
                            Dir::Right => id.ptr + 1,
                        };
                        InstDesc {
                            state: t.to,
                            pos,
                            stack: id.stack.clone(),
                            ptr,
                        }
                    }
                }
            })
            .collect()
    }

    /// Runs the reading cascade from `id` (a state carrying commands) until
    /// a base state is reached. Each intermediate description must have at
    /// most one successor; otherwise an internal error is reported.
    fn cascade(
        &self,
        w: &[char],
        mut id: InstDesc,
        mut trace: Option<&mut Vec<InstDesc>>,
    ) -> Result<BigStep> {
        let mut steps = 0u64;
        while !self.is_base(id.state) {
            let mut next = self.step(w, &id);
            steps += 1;
            if next.len() > 1 {
                return Err(Error::Internal(format!(
                    "{} successors at {}",
                    next.len(),
                    self.render(w, &id)
                )));
            }
            match next.pop() {
                None => return Ok(BigStep::DeadEnd { steps }),
                Some(n) => {
                    if let Some(t) = trace.as_deref_mut() {
                        t.push(n.clone());
                    }
                    id = n;
                }
            }
        }
        Ok(BigStep::Done { id, steps })
    }

    /// From a base description, pushes `Num(i)` moving to NFA state `to`
    /// and runs the cascade that copies `mem_i` of the stack from the input.
    pub fn istep_bigstep(&self, w: &[char], id: &InstDesc, i: u32, to: usize) -> Result<BigStep> {
        let target = State {
            base: to,
            cmds: vec![Cmd {
                op: Op::Call,
                i,
                x: 0,
            }],
        };
        let Some(target) = self.state_id(&target) else {
            return Ok(BigStep::DeadEnd { steps: 0 });
        };
        let first = self
            .step(w, id)
            .into_iter()
            .find(|n| n.state == target && n.stack.last() == Some(&Gamma::Sym(ExtSymbol::Num(i))));
        match first {
            None => Ok(BigStep::DeadEnd { steps: 0 }),
            Some(n) => self.cascade(w, n, None),
        }
    }

    /// Guided acceptance: branches only on the NFA edge taken from a base
    /// state, runs every cascade deterministically and memoizes on
    /// (base state, input position, dereferencing state of the stack).
    pub fn accepts(&self, w: &str, budget: u64) -> Result<Verdict> {
        Ok(self.search(w, budget, false)?.0)
    }

    /// As [`Self::accepts`], also returning the full accepting computation.
    pub fn accepting_run(&self, w: &str, budget: u64) -> Result<(Verdict, Option<Vec<InstDesc>>)> {
        self.search(w, budget, true)
    }

    fn search(&self, w: &str, budget: u64, keep: bool) -> Result<(Verdict, Option<Vec<InstDesc>>)> {
        let w: Vec<char> = w.chars().collect();
        let kappa = self.nfa.kappa;
        let mut s = Search {
            nesa: self,
            w: &w,
            budget,
            used: 0,
            seen: HashSet::new(),
            path: keep.then(Vec::new),
        };
        let init = self.initial();
        if let Some(p) = s.path.as_mut() {
            p.push(init.clone());
        }
        let found = s.dfs(init, MemState::new(kappa))?;
        let verdict = match found {
            Some(true) => Verdict::Yes,
            Some(false) => Verdict::No,
            None => Verdict::BudgetExceeded,
        };
        let path = if verdict == Verdict::Yes {
            s.path
        } else {
            None
        };
        Ok((verdict, path))
    }

    /// Unguided breadth-first search over the general step relation,
    /// discarding descriptions whose stack exceeds `max_stack` symbols.
    /// Returns `true` as soon as an accepting description is found; `false`
    /// means none exists within the stack bound.
    pub fn explore(&self, w: &str, max_stack: usize, budget: u64) -> Result<bool> {
        let w: Vec<char> = w.chars().collect();
        let mut seen = HashSet::new();
        let mut queue = VecDeque::from([self.initial()]);
        let mut used = 0u64;
        while let Some(id) = queue.pop_front() {
            if self.is_accepting(&w, &id) {
                return Ok(true);
            }
            used += 1;
            if used > budget {
                return Err(Error::BudgetExceeded { budget });
            }
            for n in self.step(&w, &id) {
                if n.stack.len() <= max_stack && seen.insert(n.clone()) {
                    queue.push_back(n);
                }
            }
        }
        Ok(false)
    }

    /// Every pushdown transition pushes a non-empty string and leaves the
    /// replaced symbol in place; the input head never moves left.
    pub fn audit_nonerasing(&self) -> Result<()> {
        for t in &self.transitions {
            if let Action::Push(y) = &t.action {
                if y.is_empty() || y[0] != t.stack || !t.at_top {
                    return Err(Error::Internal(format!(
                        "erasing transition {}",
                        self.render_transition(t)
                    )));
                }
            }
        }
        for s in &self.states {
            if s.cmds.len() > self.sigma as usize || s.cmds.iter().any(|c| c.x > self.theta) {
                return Err(Error::Internal(format!(
                    "state {s} exceeds the command bounds"
                )));
            }
        }
        Ok(())
    }

    pub fn render_transition(&self, t: &Transition) -> String {
        let input = t.input.map_or("*".to_string(), |i| i.to_string());
        let top = if t.at_top { "$" } else { "" };
        let adv = if t.advance { ">" } else { "0" };
        let (mode, effect) = match &t.action {
            Action::Push(y) => {
                let y: Vec<String> = y.iter().map(Gamma::to_string).collect();
                ("push", format!("{}$", y.join(" ")))
            }
            Action::Read(d) => ("read", d.symbol().to_string()),
        };
        format!(
            "{mode} {} {input} {}{top} -> {} {adv} {effect}",
            self.states[t.from], t.stack, self.states[t.to]
        )
    }

    /// Renders `(state, remaining input, stack)` with the pointer shown as
    /// `^` before the symbol it reads and `$` after the top symbol.
    pub fn render(&self, w: &[char], id: &InstDesc) -> String {
        let rest: String = w[id.pos..].iter().collect();
        let stack: Vec<String> = id
            .stack
            .iter()
            .enumerate()
            .map(|(k, g)| {
                let mark = if k == id.ptr { "^" } else { "" };
                let top = if k + 1 == id.stack.len() { "$" } else { "" };
                format!("{mark}{g}{top}")
            })
            .collect();
        format!("({}, {rest}<|, {})", self.states[id.state], stack.join(" "))
    }

    /// Text form: alphabets, states and every transition in both modes.
    pub fn dump(&self) -> String {
        let mut out = String::from("nesa\n");
        let sig: Vec<String> = self.sigma_in.iter().map(char::to_string).collect();
        let gam: Vec<String> = self.gamma.iter().map(Gamma::to_string).collect();
        out += &format!("input {}\n", sig.join(" "));
        out += &format!("stack {}\n", gam.join(" "));
        out += &format!("theta {}\nsigma {}\n", self.theta, self.sigma);
        out += &format!("states {}\n", self.states.len());
        for s in &self.states {
            out += &format!("state {s}\n");
        }
        out += &format!("start {}\n", self.states[self.start]);
        let fin: Vec<String> = self
            .finals
            .iter()
            .map(|&f| self.states[f].to_string())
            .collect();
        out += &format!("finals {}\n", fin.join(" "));
        for t in &self.transitions {
            out += &self.render_transition(t);
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for Nesa {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.dump())
    }
}

struct Search<'a> {
    nesa: &'a Nesa,
    w: &'a [char],
    budget: u64,
    used: u64,
    seen: HashSet<(usize, usize, MemState)>,
    path: Option<Vec<InstDesc>>,
}

impl Search<'_> {
    /// `Some(found)`, or `None` once the budget is spent.
    fn dfs(&mut self, id: InstDesc, mem: MemState) -> Result<Option<bool>> {
        let n = self.nesa;
        if n.is_accepting(self.w, &id) {
            return Ok(Some(true));
        }
        if !self.seen.insert((id.state, id.pos, mem.clone())) {
            return Ok(Some(false));
        }
        for next in n.step(self.w, &id) {
            self.used += 1;
            if self.used > self.budget {
                return Ok(None);
            }
            let Some(&Gamma::Sym(pushed)) = next.stack.last() else {
                return Err(Error::Internal("base step did not push a symbol".into()));
            };
            let mark = self.path.as_ref().map_or(0, Vec::len);
            if let Some(p) = self.path.as_mut() {
                p.push(next.clone());
            }
            let landed = if n.is_base(next.state) {
                Some(next)
            } else {
                let start = next.pos;
                match n.cascade(self.w, next, self.path.as_mut())? {
                    BigStep::DeadEnd { steps } => {
                        self.used += steps;
                        None
                    }
                    BigStep::Done { id: done, steps } => {
                        self.used += steps;
                        let ExtSymbol::Num(i) = pushed else {
                            return Err(Error::Internal("cascade after a non-number".into()));
                        };
                        let copied: String = self.w[start..done.pos].iter().collect();
                        if copied != mem.mem(i) || done.ptr + 1 != done.stack.len() {
                            return Err(Error::Internal(format!(
                                "cascade for #{i} copied {copied:?}, expected {:?}",
                                mem.mem(i)
                            )));
                        }
                        Some(done)
                    }
                }
            };
            if let Some(landed) = landed {
                let mut m = mem.clone();
                m.push(pushed);
                match self.dfs(landed, m)? {
                    Some(true) => return Ok(Some(true)),
                    None => return Ok(None),
                    Some(false) => {}
                }
            }
            if let Some(p) = self.path.as_mut() {
                p.truncate(mark);
            }
            if self.used > self.budget {
                return Ok(None);
            }
        }
        Ok(Some(false))
    }
}

/// Free-function form of [`Nesa::build`].
pub fn build_nesa(r: &Rewb) -> Result<Nesa> {
    Nesa::build(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::lang_oracle;

    const EX42: &str = "((_1a*)_1(_2\\1)_2\\2\\2)*";

    fn words(sigma: &[char], max_len: usize) -> Vec<String> {
        let mut all = vec![String::new()];
        let mut layer = vec![String::new()];
        for _ in 0..max_len {
            layer = layer
                .iter()
                .flat_map(|w| sigma.iter().map(move |c| format!("{w}{c}")))
                .collect();
            all.extend(layer.iter().cloned());
        }
        all
    }

    #[test]
    fn example_automaton_accepts_a4() {
        let n = Nesa::build(&Rewb::parse(EX42).unwrap()).unwrap();
        n.audit_nonerasing().unwrap();
        assert_eq!(n.accepts("aaaa", 1 << 20).unwrap(), Verdict::Yes);
        assert_eq!(n.accepts("aaa", 1 << 20).unwrap(), Verdict::No);
        assert_eq!(n.accepts("", 1 << 20).unwrap(), Verdict::Yes);
        let (_, run) = n.accepting_run("aaaa", 1 << 20).unwrap();
        let run = run.unwrap();
        let last = run.last().unwrap();
        assert!(n.is_accepting(&['a'; 4], last));
        // each step of the recorded run is a successor of the previous one
        let w = ['a'; 4];
        for pair in run.windows(2) {
            assert!(
                n.step(&w, &pair[0]).contains(&pair[1]),
                "{}",
                n.render(&w, &pair[0])
            );
        }
    }

    #[test]
    fn base_states_mirror_the_nfa() {
        let n = Nesa::build(&Rewb::parse(EX42).unwrap()).unwrap();
        for e in &n.nfa.edges {
            let pushes = n.transitions.iter().filter(|t| {
                t.from == e.from
                    && matches!(&t.action, Action::Push(y) if y[1] == Gamma::Sym(e.label))
            });
            assert_eq!(pushes.count(), n.gamma.len());
        }
    }

    #[test]
    fn agrees_with_oracle() {
        for src in [
            EX42,
            "(_1(a+b)*)_1\\1",
            "(_1a*)_1c\\1",
            "((_1a*)_1c\\1)*",
            "\\1+(_1a*)_1c\\1",
            "(a+b)*c",
        ] {
            let r = Rewb::parse(src).unwrap();
            let n = Nesa::build(&r).unwrap();
            let sigma: Vec<char> = r.letters().into_iter().collect();
            let oracle = lang_oracle(&r, 6, 40);
            assert!(oracle.saturated, "{src}");
            for w in words(&sigma, 6) {
                let v = n.accepts(&w, 1 << 22).unwrap();
                assert_eq!(
                    v == Verdict::Yes,
                    oracle.words.contains(&w),
                    "{src} on {w:?}"
                );
            }
        }
    }

    #[test]
    fn regular_rewb_never_calls() {
        let n = Nesa::build(&Rewb::parse("(_1a+b)_1*c").unwrap()).unwrap();
        assert!(n.states.iter().all(|s| s.cmds.is_empty()));
        assert_eq!(n.accepts("abc", 1000).unwrap(), Verdict::Yes);
    }

    #[test]
    fn big_step_copies_memory() {
        let n = Nesa::build(&Rewb::parse("(_1a)_1\\1").unwrap()).unwrap();
        let w = ['a', 'a'];
        let mut id = n.initial();
        for _ in 0..3 {
            id = n.step(&w, &id).pop().unwrap();
        }
        assert_eq!(id.stack.len(), 4);
        let e = n.nfa.out_edges(id.state).next().copied().unwrap();
        let BigStep::Done { id: done, .. } = n.istep_bigstep(&w, &id, 1, e.to).unwrap() else {
            panic!("dead end");
        };
        assert_eq!(done.pos, 2);
        assert_eq!(done.ptr, 4);
        assert!(n.is_accepting(&w, &done));
    }

    #[test]
    fn big_step_without_group_copies_nothing() {
        let n = Nesa::build(&Rewb::parse("\\1+(_1a*)_1c\\1").unwrap()).unwrap();
        let w = ['b'];
        let id = n.initial();
        let e = n
            .nfa
            .out_edges(id.state)
            .find(|e| e.label == ExtSymbol::Num(1))
            .copied()
            .unwrap();
        let BigStep::Done { id: done, .. } = n.istep_bigstep(&w, &id, 1, e.to).unwrap() else {
            panic!("dead end");
        };
        assert_eq!(done.pos, 0);
        assert_eq!(
            done.stack,
            vec![Gamma::Bottom, Gamma::Sym(ExtSymbol::Num(1))]
        );
    }

    #[test]
    fn unguided_search_agrees_on_small_words() {
        let r = Rewb::parse("(_1(a+b)*)_1\\1").unwrap();
        let n = Nesa::build(&r).unwrap();
        for w in words(&['a', 'b'], 4) {
            let guided = n.accepts(&w, 1 << 20).unwrap() == Verdict::Yes;
            let blind = n.explore(&w, 12, 1 << 22).unwrap();
            assert_eq!(guided, blind, "{w:?}");
        }
    }

    #[test]
    fn not_closed_star_is_rejected() {
        assert!(matches!(
            Nesa::build(&Rewb::parse("(_1a*)_1(c\\1)*").unwrap()),
            Err(Error::NotClosedStar)
        ));
    }
}
