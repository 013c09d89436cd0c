//! Classifies rewbs as closed and closed-star, and for the closed-star ones
//! computes the counter bounds that size the MCFG. A starred reference to
//! an outside capture makes the counters grow without bound; the witness
//! cycle shows where.

use rewb::harness::{classify, render_bounds};
use rewb::Rewb;

fn main() {
    let rewbs = [
        r"(_1a*)_1c\1",
        r"((_1a*)_1c\1)*",
        r"\1+(_1a*)_1c\1",
        r"(_1a*)_1(c\1)*",
        r"(_1a*)_1\1",
        r"(_1a*)_1\2",
        r"\1",
        r"((_1a*)_1(_2\1)_2\2\2)*",
    ];
    for src in rewbs {
        let r = Rewb::parse(src).expect("valid rewb");
        let c = classify(&r, rewb::analysis::DEFAULT_CAP).expect("classification");
        println!("{src}");
        println!(
            "  closed: {}  closed-star: {}  kappa: {}",
            c.closed, c.closed_star, c.kappa
        );
        for line in render_bounds(&c.bounds).lines() {
            println!("  {line}");
        }
    }
}
