mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rewb::semantics::{
    deref, deref_pre, fetch, is_matching, mem, open_set, ref_enumerate, ExtSymbol, MemState,
    RefString,
};
use rewb::{lang_oracle, Rewb};

fn symbol() -> impl Strategy<Value = ExtSymbol> {
    prop_oneof![
        prop::sample::select(vec!['a', 'b']).prop_map(ExtSymbol::Letter),
        (1u32..=2).prop_map(ExtSymbol::Open),
        (1u32..=2).prop_map(ExtSymbol::Close),
        (1u32..=2).prop_map(ExtSymbol::Num),
    ]
}

fn v(s: &str) -> Vec<ExtSymbol> {
    s.parse::<RefString>().unwrap().0
}

#[test]
fn worked_dereferences() {
    assert_eq!(deref(&v("[1 a [2 b ]2 #2 ]1 #1")), "abbabb");
    assert_eq!(deref(&v("[1 a ]1 #1 [1 b b ]1 #1")), "aabbbb");
    assert_eq!(deref(&v("a b c #1 #2")), "abc");
}

#[test]
fn fetch_and_pre_deref() {
    let x = v("[1 a [2 b ]2 #2 ]1 #1");
    assert_eq!(fetch(2, &x[..5]), "b");
    let pre: RefString = RefString(deref_pre(&x));
    assert_eq!(pre.to_string(), "[1 a [2 b ]2 b ]1 a b b");
    assert_eq!(mem(1, &x), "abb");
    assert_eq!(mem(1, &x[..4]), "ab");
    assert_eq!(open_set(&x[..4]), BTreeSet::from([1, 2]));
    assert_eq!(open_set(&x[..5]), BTreeSet::from([1]));
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 1000, failure_persistence: None, ..ProptestConfig::default() })]

    /// The incremental law for memory cells, checked against the
    /// definition at every prefix.
    #[test]
    fn incremental_memory_law(x in prop::collection::vec(symbol(), 0..14)) {
        let mut st = MemState::new(2);
        for n in 0..x.len() {
            let (p, c) = (&x[..n], x[n]);
            let q = &x[..=n];
            for i in 1..=2u32 {
                let before = mem(i, p);
                let expected = match c {
                    ExtSymbol::Open(j) if j == i => String::new(),
                    ExtSymbol::Letter(a) if open_set(p).contains(&i) => format!("{before}{a}"),
                    ExtSymbol::Num(j) if open_set(p).contains(&i) => format!("{before}{}", mem(j, p)),
                    _ => before,
                };
                prop_assert_eq!(mem(i, q), expected.clone());
            }
            st.push(c);
            prop_assert_eq!(st.deref(), deref(q));
            prop_assert_eq!(st.mems(2), vec![mem(1, q), mem(2, q)]);
            prop_assert_eq!(st.open_set(), open_set(q));
        }
        let again = MemState::of(&x);
        prop_assert_eq!((again.deref(), again.mems(2)), (st.deref(), st.mems(2)));
    }

    #[test]
    fn refstring_text_round_trips(x in prop::collection::vec(symbol(), 0..10)) {
        let r = RefString(x);
        prop_assert_eq!(r.to_string().parse::<RefString>().unwrap(), r);
    }
}

#[test]
fn ref_language_strings_are_matching_and_closed() {
    for (_, r) in common::corpus() {
        for x in ref_enumerate(&r, 9) {
            assert!(is_matching(&x.0), "{x} of {r}");
            assert!(open_set(&x.0).is_empty(), "{x} of {r}");
        }
    }
}

#[test]
fn oracle_contains_dereferenced_ref_language() {
    for (_, r) in common::corpus() {
        let res = lang_oracle(&r, 6, 64);
        assert!(res.saturated, "{r}");
        let from_refs: BTreeSet<String> = ref_enumerate(&r, 12)
            .iter()
            .map(|x| deref(&x.0))
            .filter(|w| w.len() <= 6)
            .collect();
        assert!(from_refs.is_subset(&res.words), "{r}");
    }
}

#[test]
fn copy_language_by_oracle() {
    let r = Rewb::parse("(_1(a+b)*)_1\\1").unwrap();
    let res = lang_oracle(&r, 6, 64);
    assert_eq!(res.words.len(), 15);
    assert!(res
        .words
        .iter()
        .all(|w| w[..w.len() / 2] == w[w.len() / 2..]));
}
