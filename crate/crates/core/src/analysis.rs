//! Closedness, the closed-star condition, and the `t`/`s` reference counters
//! with their bounds.
//!
//! For a ref-string `v`, the counters are computed right to left. `t[k]`
//! counts how many times the current content of cell `k` will still be
//! referenced directly before the cell is re-opened; `s[k]` bounds how many
//! times that content is passed on from cell to cell. For closed-star rewbs
//! both stay bounded over the whole ref-language; [`compute_bounds`] finds
//! the bounds by a backward fixpoint over the NFA.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::nfa::{Edge, ExtNfa, OpenSetTable};
use crate::semantics::ExtSymbol;
use crate::syntax::Rewb;

/// Indices whose groups are captured on every path through `r`.
pub fn capt(r: &Rewb) -> BTreeSet<u32> {
    match r {
        Rewb::Terminal(_) | Rewb::Epsilon | Rewb::Ref(_) => BTreeSet::new(),
        Rewb::Star(b) => capt(b),
        Rewb::Concat(l, rr) => capt(l).union(&capt(rr)).copied().collect(),
        Rewb::Alt(l, rr) => capt(l).intersection(&capt(rr)).copied().collect(),
        Rewb::Group(i, b) => {
            let mut s = capt(b);
            s.insert(*i);
            s
        }
    }
}

/// Derivability of `bound ⊢ r`: every reference in `r` is either to an index
/// in `bound` or to a group captured earlier on every path inside `r`.
pub fn is_closed_under(r: &Rewb, bound: &BTreeSet<u32>) -> bool {
    match r {
        Rewb::Terminal(_) | Rewb::Epsilon => true,
        Rewb::Ref(i) => bound.contains(i),
        Rewb::Star(b) | Rewb::Group(_, b) => is_closed_under(b, bound),
        Rewb::Alt(l, rr) => is_closed_under(l, bound) && is_closed_under(rr, bound),
        Rewb::Concat(l, rr) => {
            if !is_closed_under(l, bound) {
                return false;
            }
            let mut more = bound.clone();
            more.extend(capt(l));
            is_closed_under(rr, &more)
        }
    }
}

pub fn is_closed(r: &Rewb) -> bool {
    is_closed_under(r, &BTreeSet::new())
}

/// True iff the body of every starred subexpression is closed.
pub fn is_closed_star(r: &Rewb) -> bool {
    match r {
        Rewb::Terminal(_) | Rewb::Epsilon | Rewb::Ref(_) => true,
        Rewb::Star(b) => is_closed(b) && is_closed_star(b),
        Rewb::Group(_, b) => is_closed_star(b),
        Rewb::Concat(l, rr) | Rewb::Alt(l, rr) => is_closed_star(l) && is_closed_star(rr),
    }
}

/// The pair of counter vectors at one position; component `k - 1` belongs to
/// cell `k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TsTuple {
    pub t: Vec<u32>,
    pub s: Vec<u32>,
}

impl TsTuple {
    pub fn zero(kappa: u32) -> Self {
        TsTuple {
            t: vec![0; kappa as usize],
            s: vec![0; kappa as usize],
        }
    }

    pub fn t(&self, k: u32) -> u32 {
        self.t[k as usize - 1]
    }

    pub fn s(&self, k: u32) -> u32 {
        self.s[k as usize - 1]
    }

    /// The tuple before reading `c`, given the tuple after it and the set of
    /// cells open after reading `c`.
    pub fn step_back(&self, c: ExtSymbol, open_after: &BTreeSet<u32>) -> TsTuple {
        let mut prev = self.clone();
        match c {
            ExtSymbol::Letter(_) | ExtSymbol::Close(_) => {}
            ExtSymbol::Open(j) => {
                prev.t[j as usize - 1] = 0;
                prev.s[j as usize - 1] = 0;
            }
            ExtSymbol::Num(j) => {
                let k = j as usize - 1;
                prev.t[k] = self.t[k] + 1;
                let passed = open_after.iter().map(|&l| self.s(l) + 1).max().unwrap_or(0);
                prev.s[k] = 1.max(self.s[k]).max(passed);
            }
        }
        prev
    }
}

impl fmt::Display for TsTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[u32]| v.iter().map(u32::to_string).collect::<Vec<_>>().join(",");
        write!(f, "t({}) s({})", join(&self.t), join(&self.s))
    }
}

/// Counter tuples of `v` at positions `0..=|v|`: element `i` is the tuple
/// between `v[..i]` and `v[i..]`.
pub fn ts_sequence(v: &[ExtSymbol], kappa: u32) -> Vec<TsTuple> {
    let mut opens = Vec::with_capacity(v.len());
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
        opens.push(open.clone());
    }
    let mut seq = vec![TsTuple::zero(kappa); v.len() + 1];
    for i in (1..=v.len()).rev() {
        seq[i - 1] = seq[i].step_back(v[i - 1], &opens[i - 1]);
    }
    seq
}

/// `depth_0 = 0`, `depth_l = theta * (1 + kappa * depth_{l-1})` for
/// `l = 1..=sigma`; `None` on overflow.
pub fn depths(theta: u32, sigma: u32, kappa: u32) -> Option<Vec<u64>> {
    let mut d = vec![0u64];
    for l in 1..=sigma as usize {
        let next = (kappa as u64)
            .checked_mul(d[l - 1])?
            .checked_add(1)?
            .checked_mul(theta as u64)?;
        d.push(next);
    }
    Some(d)
}

/// A node of the backward fixpoint: an NFA state with the counter tuple at
/// that point of a run.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Triple {
    pub state: usize,
    pub ts: TsTuple,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bounds {
    pub kappa: u32,
    pub theta: u32,
    pub sigma: u32,
    /// `depth_0..=depth_sigma`.
    pub depth: Vec<u64>,
    pub rho: u64,
    /// Every triple that lies on some accepting run, sorted.
    pub reachable: Vec<Triple>,
}

impl Bounds {
    pub fn report(&self) -> BoundsReport {
        BoundsReport {
            kappa: self.kappa,
            theta: Some(self.theta),
            sigma: Some(self.sigma),
            rho: Some(self.rho),
            depth: self.depth.clone(),
            reachable_count: self.reachable.len(),
            diverged: false,
            witness_cycle: None,
        }
    }
}

/// Failure of the fixpoint to stay below the cap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Divergence {
    pub kappa: u32,
    pub cap: u32,
    /// `'t'` or `'s'`.
    pub counter: char,
    pub cell: u32,
    /// Edges from the offending triple forward to a final state.
    pub witness_path: Vec<Edge>,
    /// A loop of the witness path, when the path revisits a state.
    pub witness_cycle: Option<Vec<Edge>>,
}

impl Divergence {
    pub fn report(&self) -> BoundsReport {
        BoundsReport {
            kappa: self.kappa,
            theta: None,
            sigma: None,
            rho: None,
            depth: Vec::new(),
            reachable_count: 0,
            diverged: true,
            witness_cycle: Some(
                self.witness_cycle
                    .as_ref()
                    .unwrap_or(&self.witness_path)
                    .iter()
                    .map(edge_text)
                    .collect(),
            ),
        }
    }
}

fn edge_text(e: &Edge) -> String {
    format!("{} -{}-> {}", e.from, e.label, e.to)
}

impl fmt::Display for Divergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{} exceeds cap {}", self.counter, self.cell, self.cap)?;
        if let Some(c) = &self.witness_cycle {
            let items: Vec<String> = c.iter().map(edge_text).collect();
            write!(f, " around the cycle {}", items.join(", "))?;
        }
        Ok(())
    }
}

/// Machine-readable form of a bounds computation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundsReport {
    pub kappa: u32,
    pub theta: Option<u32>,
    pub sigma: Option<u32>,
    pub rho: Option<u64>,
    pub depth: Vec<u64>,
    pub reachable_count: usize,
    pub diverged: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_cycle: Option<Vec<String>>,
}

pub const DEFAULT_CAP: u32 = 64;

/// Backward fixpoint from every `(final, 0, 0)`: each edge `q -c-> q'` is
/// stepped in reverse, using the open set of `q'`. Returns the suprema of
/// the counters, the derived depths and the set of visited triples.
pub fn compute_bounds(n: &ExtNfa, table: &OpenSetTable, cap: u32) -> Result<Bounds, Divergence> {
    let kappa = n.kappa;
    let mut index: HashMap<Triple, usize> = HashMap::new();
    // parent[i] = (edge, successor triple) through which triple i was found
    let mut parent: Vec<Option<(Edge, usize)>> = Vec::new();
    let mut nodes: Vec<Triple> = Vec::new();
    let mut queue = VecDeque::new();
    for &f in &n.finals {
        let t = Triple {
            state: f,
            ts: TsTuple::zero(kappa),
        };
        index.insert(t.clone(), nodes.len());
        queue.push_back(nodes.len());
        nodes.push(t);
        parent.push(None);
    }
    let mut incoming: Vec<Vec<Edge>> = vec![Vec::new(); n.num_states];
    for e in &n.edges {
        incoming[e.to].push(*e);
    }
    while let Some(id) = queue.pop_front() {
        let node = nodes[id].clone();
        for e in &incoming[node.state] {
            let ts = node.ts.step_back(e.label, &table[node.state]);
            let prev = Triple { state: e.from, ts };
            if index.contains_key(&prev) {
                continue;
            }
            let over_t = prev.ts.t.iter().position(|&x| x > cap);
            let over_s = prev.ts.s.iter().position(|&x| x > cap);
            if over_t.is_some() || over_s.is_some() {
                let (counter, k) = match over_t {
                    Some(k) => ('t', k),
                    None => ('s', over_s.expect("checked")),
                };
                let mut path = vec![*e];
                let mut cur = id;
                while let Some((edge, next)) = parent[cur] {
                    path.push(edge);
                    cur = next;
                }
                return Err(Divergence {
                    kappa,
                    cap,
                    counter,
                    cell: k as u32 + 1,
                    witness_cycle: find_cycle(&path),
                    witness_path: path,
                });
            }
            index.insert(prev.clone(), nodes.len());
            queue.push_back(nodes.len());
            nodes.push(prev);
            parent.push(Some((*e, id)));
        }
    }
    let theta = nodes
        .iter()
        .flat_map(|t| t.ts.t.iter().copied())
        .max()
        .unwrap_or(0);
    let sigma = nodes
        .iter()
        .flat_map(|t| t.ts.s.iter().copied())
        .max()
        .unwrap_or(0);
    let depth = depths(theta, sigma, kappa).ok_or(Divergence {
        kappa,
        cap,
        counter: 's',
        cell: 0,
        witness_path: Vec::new(),
        witness_cycle: None,
    })?;
    let rho = *depth.last().expect("depth_0 exists");
    nodes.sort();
    Ok(Bounds {
        kappa,
        theta,
        sigma,
        depth,
        rho,
        reachable: nodes,
    })
}

/// The first loop in a forward edge path: a segment starting and ending at
/// the same state.
fn find_cycle(path: &[Edge]) -> Option<Vec<Edge>> {
    for (i, e) in path.iter().enumerate() {
        if let Some(j) = path[i..].iter().position(|f| f.to == e.from) {
            return Some(path[i..=i + j].to_vec());
        }
    }
    None
}
