//! Dereferences a ref-string symbol by symbol, showing the output so far,
//! the memory cells and which cells are open.
//!
//!     cargo run --example deref_walkthrough -- "[1 a [2 b ]2 #2 ]1 #1"

use rewb::semantics::{deref, MemState, RefString};

fn main() {
    let text = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "[1 a [2 b ]2 #2 ]1 #1".to_string());
    let v: RefString = match text.parse() {
        Ok(v) => v,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(2);
        }
    };
    let kappa = v
        .symbols()
        .iter()
        .filter_map(|s| s.index())
        .max()
        .unwrap_or(0);
    let mut st = MemState::new(kappa);
    println!("{:<6} {:<12} {:<24} open", "symbol", "output", "cells");
    for &c in v.symbols() {
        st.push(c);
        let cells: Vec<String> = (1..=kappa).map(|i| format!("{i}:{}", st.mem(i))).collect();
        let open: Vec<String> = st.open_set().iter().map(u32::to_string).collect();
        println!(
            "{:<6} {:<12} {:<24} {{{}}}",
            c.to_string(),
            st.deref(),
            cells.join(" "),
            open.join(",")
        );
    }
    assert_eq!(st.deref(), deref(v.symbols()));
    println!("deref = {}", deref(v.symbols()));
}
