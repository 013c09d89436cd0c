//! Bounded bottom-up generation for (P)MCFGs.

use std::collections::{BTreeSet, HashSet, VecDeque};

use crate::grammar::Grammar;

/// How trustworthy a bounded generation result is.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    /// Every derivable word up to the length bound was found.
    Complete,
    /// Tuples were pruned on first-component length although the grammar has
    /// no monotonicity certificate; words may be missing.
    PossiblyIncomplete,
    /// The item budget ran out; the result is partial.
    BudgetExceeded,
}

/// Derived items of a bounded run: for each nonterminal, the distinct tuples
/// found, in discovery order.
#[derive(Clone, Debug)]
pub struct Chart {
    pub items: Vec<Vec<Vec<String>>>,
    pub status: Status,
}

impl Chart {
    pub fn len(&self) -> usize {
        self.items.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundedLanguage {
    pub words: BTreeSet<String>,
    pub status: Status,
    /// Number of distinct (nonterminal, tuple) items derived.
    pub items: usize,
}

/// Forward chaining from the nullary rules. Every distinct
/// (nonterminal, tuple) pair is kept once; tuples whose first component is
/// longer than `max_len` are discarded. At most `budget` items are derived.
pub fn derive_chart(g: &Grammar, max_len: usize, budget: usize) -> Chart {
    let certified = g.has_monotonicity_certificate();
    let n = g.nonterminals.len();
    let mut seen: Vec<HashSet<Vec<String>>> = vec![HashSet::new(); n];
    let mut items: Vec<Vec<Vec<String>>> = vec![Vec::new(); n];
    let mut agenda: VecDeque<(usize, Vec<String>)> = VecDeque::new();
    let mut pruned = false;
    let mut count = 0usize;

    // rules indexed by the nonterminals they consume
    let mut users: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (ri, r) in g.rules.iter().enumerate() {
        for (p, &a) in r.args.iter().enumerate() {
            if !users[a].contains(&(ri, p)) {
                users[a].push((ri, p));
            }
        }
    }

    let mut offer = |lhs: usize,
                     tuple: Vec<String>,
                     seen: &mut Vec<HashSet<Vec<String>>>,
                     agenda: &mut VecDeque<(usize, Vec<String>)>,
                     pruned: &mut bool|
     -> bool {
        if tuple.first().is_some_and(|x| x.len() > max_len) {
            *pruned = true;
            return true;
        }
        if seen[lhs].contains(&tuple) {
            return true;
        }
        if count >= budget {
            return false;
        }
        count += 1;
        seen[lhs].insert(tuple.clone());
        agenda.push_back((lhs, tuple));
        true
    };

    let mut exhausted = false;
    for r in g.rules.iter().filter(|r| r.args.is_empty()) {
        let t = g.functions[r.fun].eval_unchecked(&[]);
        if !offer(r.lhs, t, &mut seen, &mut agenda, &mut pruned) {
            exhausted = true;
        }
    }

    'outer: while let Some((a, tuple)) = agenda.pop_front() {
        items[a].push(tuple);
        let newest = items[a].len() - 1;
        for &(ri, p) in &users[a] {
            let rule = &g.rules[ri];
            let f = &g.functions[rule.fun];
            // every combination that uses the new item at position p and
            // already processed items elsewhere
            let sizes: Vec<usize> = rule
                .args
                .iter()
                .enumerate()
                .map(|(q, &b)| if q == p { 1 } else { items[b].len() })
                .collect();
            if sizes.contains(&0) {
                continue;
            }
            let mut idx = vec![0usize; rule.args.len()];
            loop {
                let args: Vec<&[String]> = rule
                    .args
                    .iter()
                    .enumerate()
                    .map(|(q, &b)| {
                        if q == p {
                            items[a][newest].as_slice()
                        } else {
                            items[b][idx[q]].as_slice()
                        }
                    })
                    .collect();
                let out = f.eval_unchecked(&args);
                if !offer(rule.lhs, out, &mut seen, &mut agenda, &mut pruned) {
                    exhausted = true;
                    break 'outer;
                }
                // odometer increment
                let mut q = 0;
                loop {
                    if q == idx.len() {
                        break;
                    }
                    idx[q] += 1;
                    if idx[q] < sizes[q] {
                        break;
                    }
                    idx[q] = 0;
                    q += 1;
                }
                if q == idx.len() {
                    break;
                }
            }
        }
    }
    // flush what was accepted but not yet processed
    for (a, t) in agenda {
        items[a].push(t);
    }
    let status = if exhausted {
        Status::BudgetExceeded
    } else if pruned && !certified {
        Status::PossiblyIncomplete
    } else {
        Status::Complete
    };
    Chart { items, status }
}

/// All words of length at most `max_len` derivable from the start symbol.
pub fn bounded_language(g: &Grammar, max_len: usize, budget: usize) -> BoundedLanguage {
    let chart = derive_chart(g, max_len, budget);
    let words = chart.items[g.start]
        .iter()
        .map(|t| t[0].clone())
        .filter(|w| w.len() <= max_len)
        .collect();
    BoundedLanguage {
        words,
        status: chart.status,
        items: chart.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::parse_grammar;
    use crate::grammar::tests::{COPY_MCFG, COPY_PMCFG};

    fn copies(max_len: usize) -> BTreeSet<String> {
        let mut out = BTreeSet::from([String::new()]);
        let mut ws = vec![String::new()];
        for _ in 0..max_len / 2 {
            ws = ws
                .iter()
                .flat_map(|w| [format!("{w}a"), format!("{w}b")])
                .collect();
            out.extend(ws.iter().map(|w| format!("{w}{w}")));
        }
        out
    }

    #[test]
    fn copy_grammars_agree() {
        let g = parse_grammar(COPY_PMCFG).unwrap();
        let h = parse_grammar(COPY_MCFG).unwrap();
        for l in 0..=8 {
            let a = bounded_language(&g, l, 1 << 20);
            let b = bounded_language(&h, l, 1 << 20);
            assert_eq!(a.words, copies(l), "pmcfg at {l}");
            assert_eq!(b.words, copies(l), "mcfg at {l}");
        }
        let four = bounded_language(&g, 4, 1 << 20).words;
        assert_eq!(four.len(), 7);
        assert!(four.contains("abab") && four.contains("bbbb") && !four.contains("aabb"));
    }

    #[test]
    fn copy_pmcfg_is_certified() {
        // `cp` uses its argument twice in the first component, so the
        // first component still dominates; the certificate holds.
        let g = parse_grammar(COPY_PMCFG).unwrap();
        assert!(g.has_monotonicity_certificate());
        assert_eq!(bounded_language(&g, 4, 1000).status, Status::Complete);
    }

    #[test]
    fn epsilon_only() {
        let g =
            parse_grammar("pmcfg\nstart S\nnonterm S dim 1\nfun e : -> 1 = <>\nrule S -> e[]\n")
                .unwrap();
        let res = bounded_language(&g, 3, 10);
        assert_eq!(res.words, BTreeSet::from([String::new()]));
        assert_eq!(res.status, Status::Complete);
    }

    #[test]
    fn uncertified_pruning_is_flagged() {
        // S -> f[A] drops the first component of A
        let text = "pmcfg\nstart S\nnonterm S dim 1\nnonterm A dim 2\n\
fun f : 2 -> 1 = <$1.2>\nfun e : -> 2 = <;>\nfun g : 2 -> 2 = <$1.1 \"a\" ; $1.2>\n\
rule S -> f[A]\nrule A -> e[]\nrule A -> g[A]\n";
        let g = parse_grammar(text).unwrap();
        assert!(!g.has_monotonicity_certificate());
        let res = bounded_language(&g, 2, 100);
        assert_eq!(res.words, BTreeSet::from([String::new()]));
        assert_eq!(res.status, Status::PossiblyIncomplete);
    }

    #[test]
    fn budget_is_enforced() {
        let g = parse_grammar(COPY_PMCFG).unwrap();
        let res = bounded_language(&g, 8, 5);
        assert_eq!(res.status, Status::BudgetExceeded);
        assert!(res.items <= 5);
    }

    #[test]
    fn binary_rules() {
        let text = "pmcfg\nstart S\nnonterm S dim 1\nfun c : 1,1 -> 1 = <$1.1 $2.1>\nfun a : -> 1 = <\"a\">\nfun b : -> 1 = <\"b\">\nrule S -> c[S,S]\nrule S -> a[]\nrule S -> b[]\n";
        let g = parse_grammar(text).unwrap();
        let res = bounded_language(&g, 3, 1000);
        assert_eq!(res.words.len(), 2 + 4 + 8);
        assert_eq!(res.status, Status::Complete);
    }
}
