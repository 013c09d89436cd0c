#![allow(dead_code)]

use rewb::harness::{parse_corpus, CorpusEntry};
use rewb::Rewb;

pub const SHIPPED: &str = include_str!("../../corpus/shipped.txt");

pub fn corpus() -> Vec<(CorpusEntry, Rewb)> {
    parse_corpus(SHIPPED)
        .unwrap()
        .into_iter()
        .map(|e| {
            let r = Rewb::parse(&e.source).unwrap();
            (e, r)
        })
        .collect()
}

pub fn closed_star_corpus() -> Vec<Rewb> {
    corpus()
        .into_iter()
        .map(|(_, r)| r)
        .filter(rewb::is_closed_star)
        .collect()
}
