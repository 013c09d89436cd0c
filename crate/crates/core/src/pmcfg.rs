//! The `(κ+1)`-dimensional unary PMCFG of a rewb.
//!
//! Nonterminal `A_q` stands for NFA state `q` and derives tuples
//! `(deref(v), mem_1(v), ..., mem_κ(v))` for the ref-strings `v` leading
//! from the start state to `q`. Each NFA edge `q -c-> q'` becomes a unary
//! rule `A_q' -> φ[A_q]` whose function performs the dereferencing step for
//! `c` with the open set `M` of `q'`:
//!
//! * letter `a`: `i_a{M}` appends `a` to `x` and to every open cell;
//! * number `k`: `p_k{M}` appends `y_k` to `x` and to every open cell while
//!   keeping `y_k` (the only source of duplication);
//! * `[k`: `r_k` empties cell `k`;
//! * `]k`: `id`.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::grammar::{Function, Grammar, GrammarKind, Item};
use crate::nfa::{Edge, ExtNfa, OpenSetTable};
use crate::semantics::ExtSymbol;
use crate::syntax::Rewb;

/// A constructed PMCFG together with the automaton it was built from and
/// the correspondence between edges and functions.
#[derive(Clone, Debug)]
pub struct PmcfgConstruction {
    pub grammar: Grammar,
    pub nfa: ExtNfa,
    pub open: OpenSetTable,
    pub kappa: u32,
    /// Nonterminal of each NFA state.
    pub state_nonterminal: Vec<usize>,
    /// Function applied along each NFA edge.
    pub edge_function: BTreeMap<Edge, usize>,
    /// The nullary function producing the all-empty tuple.
    pub init_function: usize,
}

pub(crate) fn set_name(m: &BTreeSet<u32>) -> String {
    let items: Vec<String> = m.iter().map(u32::to_string).collect();
    format!("{{{}}}", items.join(","))
}

fn arg(comp: usize) -> Item {
    Item::Arg { arg: 0, comp }
}

fn word(c: char) -> Item {
    Item::Word(c.to_string())
}

impl PmcfgConstruction {
    pub fn build(r: &Rewb) -> Result<Self> {
        let nfa = ExtNfa::build(r);
        let open = nfa.open_sets()?;
        let kappa = nfa.kappa;
        let dim = kappa as usize + 1;
        let mut g = Grammar::new(GrammarKind::Pmcfg);
        let s = g.add_nonterminal("S", 1);
        g.start = s;
        let state_nonterminal: Vec<usize> = (0..nfa.num_states)
            .map(|q| g.add_nonterminal(format!("A{q}"), dim))
            .collect();

        let o = g.add_function(Function::new("o", vec![dim], vec![vec![arg(0)]])?);
        let mut by_name: BTreeMap<String, usize> = BTreeMap::new();
        let mut edge_function = BTreeMap::new();
        for e in &nfa.edges {
            let m = &open[e.to];
            let f = step_function(e.label, m, kappa)?;
            let id = *by_name
                .entry(f.name.clone())
                .or_insert_with(|| g.add_function(f));
            edge_function.insert(*e, id);
        }
        let init_function = g.add_function(Function::new("eps", vec![], vec![Vec::new(); dim])?);

        for &f in &nfa.finals {
            g.add_rule(s, o, vec![state_nonterminal[f]]);
        }
        for e in &nfa.edges {
            g.add_rule(
                state_nonterminal[e.to],
                edge_function[e],
                vec![state_nonterminal[e.from]],
            );
        }
        g.add_rule(state_nonterminal[nfa.start], init_function, vec![]);
        g.check()?;
        Ok(PmcfgConstruction {
            grammar: g,
            nfa,
            open,
            kappa,
            state_nonterminal,
            edge_function,
            init_function,
        })
    }

    /// Applies the edge functions along `run` to the all-empty tuple and
    /// returns every intermediate tuple, starting with the initial one.
    /// Element `i` is `(deref(v[..i]), mem_1(v[..i]), ..., mem_κ(v[..i]))`.
    pub fn functional_deref_trace(
        &self,
        v: &[ExtSymbol],
        run: &[usize],
    ) -> Result<Vec<Vec<String>>> {
        self.nfa.check_run(v, run)?;
        let init = &self.grammar.functions[self.init_function];
        let mut tuples = vec![init.eval(&[])?];
        for (i, &c) in v.iter().enumerate() {
            let e = Edge {
                from: run[i],
                label: c,
                to: run[i + 1],
            };
            let f = &self.grammar.functions[self.edge_function[&e]];
            let next = f.eval(&[tuples.last().expect("nonempty")])?;
            tuples.push(next);
        }
        Ok(tuples)
    }

    /// [`Self::functional_deref_trace`] along the run found by the NFA.
    pub fn trace(&self, v: &[ExtSymbol]) -> Result<Vec<Vec<String>>> {
        let run = self
            .nfa
            .find_run(v)
            .ok_or_else(|| Error::RunMismatch("ref-string is not accepted".into()))?;
        self.functional_deref_trace(v, &run)
    }
}

/// The dereferencing step for symbol `c` when the cells in `m` are open.
fn step_function(c: ExtSymbol, m: &BTreeSet<u32>, kappa: u32) -> Result<Function> {
    let dim = kappa as usize + 1;
    let keep = |j: usize| vec![arg(j)];
    let body: Vec<Vec<Item>>;
    let name = match c {
        ExtSymbol::Letter(a) => {
            body = (0..dim)
                .map(|j| {
                    if j == 0 || m.contains(&(j as u32)) {
                        vec![arg(j), word(a)]
                    } else {
                        keep(j)
                    }
                })
                .collect();
            format!("i_{a}{}", set_name(m))
        }
        ExtSymbol::Num(k) => {
            let src = k as usize;
            body = (0..dim)
                .map(|j| {
                    if j == 0 || m.contains(&(j as u32)) {
                        vec![arg(j), arg(src)]
                    } else {
                        keep(j)
                    }
                })
                .collect();
            format!("p_{k}{}", set_name(m))
        }
        ExtSymbol::Open(k) => {
            body = (0..dim)
                .map(|j| if j == k as usize { Vec::new() } else { keep(j) })
                .collect();
            format!("r_{k}")
        }
        ExtSymbol::Close(_) => {
            body = (0..dim).map(keep).collect();
            "id".to_string()
        }
    };
    Function::new(name, vec![dim], body)
}

/// Free-function form of [`PmcfgConstruction::build`], returning the grammar.
pub fn build_pmcfg(r: &Rewb) -> Result<Grammar> {
    Ok(PmcfgConstruction::build(r)?.grammar)
}
