//! Prints seeded random valid rewbs with at most two capture indices, one
//! per line, annotated with their classification. The shipped corpus was
//! extended with this output.
//!
//!     cargo run --example random_rewbs -- 2024 12

use rewb::harness::{random_corpus, RandomConfig};
use rewb::{is_closed, is_closed_star};

fn main() {
    let mut args = std::env::args().skip(1);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(2024);
    let n = args.next().and_then(|s| s.parse().ok()).unwrap_or(12);
    let yn = |b| if b { "yes" } else { "no" };
    for r in random_corpus(seed, n, &RandomConfig::default()) {
        println!(
            "{r}  # expect: closed-star={} closed={}",
            yn(is_closed_star(&r)),
            yn(is_closed(&r))
        );
    }
}
