//! The `(κ·ρ+1)`-dimensional unary MCFG of a closed-star rewb.
//!
//! Each memory cell `k` is represented by a block of `ρ` components
//! `y_{k,1..ρ}`. Instead of reading a cell and keeping it, as the PMCFG
//! does, a paste consumes one prepared copy and hands further copies to the
//! open cells, so no component is ever used twice. How many copies a cell
//! must hold is read off the counters `t` and `s` (see [`crate::analysis`]),
//! which are part of every nonterminal `A_q^{τ,σ}`.
//!
//! Within block `k`, the first `(t_k/θ)·depth_{s_k}` components are "valid
//! copies" of `mem_k`; they are laid out as `θ` sub-blocks of
//! `depth_{s_k}/θ` components, and a paste of cell `k` uses sub-block
//! number `t_k`: its first component goes to `x`, the next `κ` runs of
//! `depth_{s_k-1}` components go to the open cells `1..κ`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::analysis::{compute_bounds, is_closed_star, ts_sequence, Bounds, TsTuple, DEFAULT_CAP};
use crate::error::{Error, Result};
use crate::grammar::{Function, Grammar, GrammarKind, Item};
use crate::nfa::{Edge, ExtNfa, OpenSetTable};
use crate::pmcfg::set_name;
use crate::semantics::{ExtSymbol, MemState};
use crate::syntax::Rewb;

#[derive(Clone, Debug)]
pub struct McfgConstruction {
    pub grammar: Grammar,
    pub nfa: ExtNfa,
    pub open: OpenSetTable,
    pub bounds: Bounds,
    pub kappa: u32,
    /// Memory components per cell.
    pub rho: usize,
    /// Function for an edge taken with the given counter tuple before it.
    pub step_function: HashMap<(Edge, TsTuple), usize>,
    pub init_function: usize,
}

/// Block geometry shared by the function builders.
#[derive(Clone, Copy)]
struct Layout {
    kappa: usize,
    rho: usize,
}

impl Layout {
    fn dim(self) -> usize {
        self.kappa * self.rho + 1
    }

    /// 0-based tuple position of component `r` (1-based) of block `k`
    /// (1-based).
    fn comp(self, k: usize, r: usize) -> usize {
        1 + (k - 1) * self.rho + (r - 1)
    }
}

fn arg(comp: usize) -> Item {
    Item::Arg { arg: 0, comp }
}

fn tuple_name(v: &[u32]) -> String {
    v.iter().map(u32::to_string).collect::<Vec<_>>().join(".")
}

impl McfgConstruction {
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
        let kappa = nfa.kappa;
        let rho = usize::try_from(bounds.rho)
            .map_err(|_| Error::Internal("ρ does not fit in memory".into()))?;
        let layout = Layout {
            kappa: kappa as usize,
            rho,
        };
        let dim = layout.dim();

        let mut g = Grammar::new(GrammarKind::Mcfg);
        let s = g.add_nonterminal("S", 1);
        g.start = s;
        let mut triple_nt: HashMap<(usize, &TsTuple), usize> = HashMap::new();
        for t in &bounds.reachable {
            let name = format!(
                "A{}_t{}_s{}",
                t.state,
                tuple_name(&t.ts.t),
                tuple_name(&t.ts.s)
            );
            triple_nt.insert((t.state, &t.ts), g.add_nonterminal(name, dim));
        }

        let o = g.add_function(Function::new("o", vec![dim], vec![vec![arg(0)]])?);
        let init_function = g.add_function(Function::new("eps", vec![], vec![Vec::new(); dim])?);
        let mut by_name: BTreeMap<String, usize> = BTreeMap::new();
        let mut step_function = HashMap::new();

        let zero = TsTuple::zero(kappa);
        for &f in &nfa.finals {
            g.add_rule(s, o, vec![triple_nt[&(f, &zero)]]);
        }
        let mut incoming: Vec<Vec<Edge>> = vec![Vec::new(); nfa.num_states];
        for e in &nfa.edges {
            incoming[e.to].push(*e);
        }
        for t in &bounds.reachable {
            for e in &incoming[t.state] {
                let pre = t.ts.step_back(e.label, &open[t.state]);
                let source = *triple_nt.get(&(e.from, &pre)).ok_or_else(|| {
                    Error::Internal(format!("predecessor of A{} is not reachable", t.state))
                })?;
                let f = step_function_for(e.label, &open[t.state], &pre, &bounds, layout)?;
                let id = *by_name
                    .entry(f.name.clone())
                    .or_insert_with(|| g.add_function(f));
                step_function.insert((*e, pre), id);
                g.add_rule(triple_nt[&(t.state, &t.ts)], id, vec![source]);
            }
            if t.state == nfa.start {
                g.add_rule(triple_nt[&(t.state, &t.ts)], init_function, vec![]);
            }
        }
        g.check()?;
        Ok(McfgConstruction {
            grammar: g,
            nfa,
            open,
            bounds,
            kappa,
            rho,
            step_function,
            init_function,
        })
    }

    fn layout(&self) -> Layout {
        Layout {
            kappa: self.kappa as usize,
            rho: self.rho,
        }
    }

    /// Applies the functions along `run` to the all-empty tuple, choosing the
    /// counter annotations from the counters of `v`. Returns every
    /// intermediate tuple, starting with the initial one.
    pub fn block_trace(&self, v: &[ExtSymbol], run: &[usize]) -> Result<Vec<Vec<String>>> {
        self.nfa.check_run(v, run)?;
        let ts = ts_sequence(v, self.kappa);
        let mut tuples = vec![self.grammar.functions[self.init_function].eval(&[])?];
        for (i, &c) in v.iter().enumerate() {
            let e = Edge {
                from: run[i],
                label: c,
                to: run[i + 1],
            };
            let id = self.step_function.get(&(e, ts[i].clone())).ok_or_else(|| {
                Error::RunMismatch(format!(
                    "no function for edge {} -{}-> {} at {}",
                    e.from, c, e.to, ts[i]
                ))
            })?;
            let next = self.grammar.functions[*id].eval(&[tuples.last().expect("nonempty")])?;
            tuples.push(next);
        }
        Ok(tuples)
    }

    /// [`Self::block_trace`] along the run found by the NFA.
    pub fn trace(&self, v: &[ExtSymbol]) -> Result<Vec<Vec<String>>> {
        let run = self
            .nfa
            .find_run(v)
            .ok_or_else(|| Error::RunMismatch("ref-string is not accepted".into()))?;
        self.block_trace(v, &run)
    }

    /// Block `k` (1-based) of a tuple.
    pub fn block<'a>(&self, tuple: &'a [String], k: u32) -> &'a [String] {
        let l = self.layout();
        let start = l.comp(k as usize, 1);
        &tuple[start..start + self.rho]
    }

    /// Number of leading components of block `k` that hold copies of
    /// `mem_k` at a position with counters `ts`.
    pub fn valid_copies(&self, ts: &TsTuple, k: u32) -> usize {
        let theta = self.bounds.theta as u64;
        if theta == 0 {
            return 0;
        }
        (ts.t(k) as u64 * (self.bounds.depth[ts.s(k) as usize] / theta)) as usize
    }

    /// Checks, at every prefix of `v`, that the first component is the
    /// dereferenced prefix and that each block's valid-copies region equals
    /// the memory cell. Returns the first failing position.
    pub fn check_valid_copies(&self, v: &[ExtSymbol]) -> Result<std::result::Result<(), usize>> {
        let tuples = self.trace(v)?;
        let ts = ts_sequence(v, self.kappa);
        let mut st = MemState::new(self.kappa);
        for (i, tuple) in tuples.iter().enumerate() {
            if i > 0 {
                st.push(v[i - 1]);
            }
            if tuple[0] != st.deref() {
                return Ok(Err(i));
            }
            for k in 1..=self.kappa {
                let n = self.valid_copies(&ts[i], k);
                if self.block(tuple, k)[..n].iter().any(|y| y != st.mem(k)) {
                    return Ok(Err(i));
                }
            }
        }
        Ok(Ok(()))
    }
}

/// The dereferencing step for `c` with open set `m` and counters `pre`
/// before the step.
fn step_function_for(
    c: ExtSymbol,
    m: &BTreeSet<u32>,
    pre: &TsTuple,
    b: &Bounds,
    l: Layout,
) -> Result<Function> {
    let dim = l.dim();
    let mut body: Vec<Vec<Item>> = (0..dim).map(|j| vec![arg(j)]).collect();
    let name = match c {
        ExtSymbol::Letter(a) => {
            body[0].push(Item::Word(a.to_string()));
            for &j in m {
                for r in 1..=l.rho {
                    body[l.comp(j as usize, r)].push(Item::Word(a.to_string()));
                }
            }
            format!("i_{a}{}", set_name(m))
        }
        ExtSymbol::Open(k) => {
            for r in 1..=l.rho {
                body[l.comp(k as usize, r)].clear();
            }
            format!("r_{k}")
        }
        ExtSymbol::Close(_) => "id".to_string(),
        ExtSymbol::Num(k) => {
            paste(&mut body, k, m, pre, b, l)?;
            format!(
                "p_{k}{}({})({})",
                set_name(m),
                tuple_name(&pre.t),
                tuple_name(&pre.s)
            )
        }
    };
    Function::new(name, vec![dim], body)
}

fn paste(
    body: &mut [Vec<Item>],
    k: u32,
    m: &BTreeSet<u32>,
    pre: &TsTuple,
    b: &Bounds,
    l: Layout,
) -> Result<()> {
    let (tau, sigma) = (pre.t(k) as u64, pre.s(k) as usize);
    if tau == 0 || sigma == 0 || b.theta == 0 {
        return Err(Error::Internal(format!(
            "paste of cell {k} with counters {pre}"
        )));
    }
    let theta = b.theta as u64;
    let width = b.depth[sigma];
    if !width.is_multiple_of(theta) {
        return Err(Error::Internal(format!(
            "θ = {theta} does not divide depth_{sigma} = {width}"
        )));
    }
    let sub = b.depth[sigma - 1] as usize;
    let psi0 = ((tau - 1) * (width / theta) + 1) as usize;
    let psi = |j: usize| psi0 + j * sub;
    let rho = l.rho;
    let check = |r: usize| {
        if r == 0 || r > rho {
            Err(Error::Internal(format!(
                "component {r} of cell {k} out of range 1..={rho}"
            )))
        } else {
            Ok(())
        }
    };
    check(psi0)?;
    let ku = k as usize;
    body[0].push(arg(l.comp(ku, psi0)));
    for j in 1..=l.kappa {
        if j == ku {
            for r in psi0..=rho {
                body[l.comp(ku, r)].clear();
            }
        } else if m.contains(&(j as u32)) {
            for r in 1..=rho {
                let slot = &mut body[l.comp(j, r)];
                if r <= sub {
                    let src = psi(j - 1) + r;
                    check(src)?;
                    slot.push(arg(l.comp(ku, src)));
                } else {
                    slot.clear();
                }
            }
        }
    }
    Ok(())
}

/// Free-function form of [`McfgConstruction::build`], returning the grammar.
pub fn build_mcfg(r: &Rewb) -> Result<Grammar> {
    Ok(McfgConstruction::build(r)?.grammar)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derive::bounded_language;
    use crate::oracle::lang_oracle;
    use crate::semantics::RefString;

    fn blocks(c: &McfgConstruction, t: &[String]) -> (String, Vec<Vec<String>>) {
        (
            t[0].clone(),
            (1..=c.kappa).map(|k| c.block(t, k).to_vec()).collect(),
        )
    }

    fn rep(s: &str, n: usize) -> Vec<String> {
        vec![s.to_string(); n]
    }

    fn cat(parts: &[(&str, usize)]) -> Vec<String> {
        parts.iter().flat_map(|(s, n)| rep(s, *n)).collect()
    }

    #[test]
    fn starred_block_example() {
        let r = Rewb::parse("((_1a*)_1(_2\\1)_2\\2\\2)*").unwrap();
        let c = McfgConstruction::build(&r).unwrap();
        assert_eq!(c.rho, 10);
        assert_eq!(c.grammar.dimension(), 21);
        assert!(c.grammar.is_nonduplicating());
        assert!(c.grammar.is_unary());
        assert!(c.grammar.function_index("p_1{2}(1.2)(2.1)").is_some());

        let v: RefString = "[1 a ]1 [2 #1 ]2 #2 #2".parse().unwrap();
        let tr = c.trace(&v.0).unwrap();
        assert_eq!(
            blocks(&c, &tr[4]),
            ("a".into(), vec![rep("a", 10), rep("", 10)])
        );
        assert_eq!(
            blocks(&c, &tr[5]),
            ("aa".into(), vec![rep("", 10), cat(&[("a", 2), ("", 8)])])
        );
        assert_eq!(
            blocks(&c, &tr[7]),
            ("aaa".into(), vec![rep("", 10), cat(&[("a", 1), ("", 9)])])
        );
        assert_eq!(
            blocks(&c, &tr[8]),
            ("aaaa".into(), vec![rep("", 10), rep("", 10)])
        );
        assert_eq!(c.check_valid_copies(&v.0).unwrap(), Ok(()));

        let lang = bounded_language(&c.grammar, 8, 1 << 22);
        assert!(lang.words.contains("aaaa"));
        assert_eq!(lang.words, lang_oracle(&r, 8, 64).words);
    }

    #[test]
    fn rejects_non_closed_star() {
        let r = Rewb::parse("(_1a*)_1(c\\1)*").unwrap();
        assert!(matches!(
            McfgConstruction::build(&r),
            Err(Error::NotClosedStar)
        ));
    }

    #[test]
    fn regular_rewb_has_one_dimension() {
        let r = Rewb::parse("(a+b)*c").unwrap();
        let c = McfgConstruction::build(&r).unwrap();
        assert_eq!(c.grammar.dimension(), 1);
        assert_eq!(bounded_language(&c.grammar, 3, 10_000).words.len(), 7);
    }

    #[test]
    fn copy_language() {
        let r = Rewb::parse("(_1(a+b)*)_1\\1").unwrap();
        let c = McfgConstruction::build(&r).unwrap();
        assert_eq!((c.bounds.theta, c.bounds.sigma, c.rho), (1, 1, 1));
        assert_eq!(
            bounded_language(&c.grammar, 6, 100_000).words,
            lang_oracle(&r, 6, 64).words
        );
    }
}
