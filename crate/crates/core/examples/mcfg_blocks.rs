//! The MCFG of a closed-star rewb keeps several copies of each memory cell
//! so that no argument component is used twice. This prints the copies
//! held after each symbol of a ref-string, next to the counters that decide
//! how many of them must be valid.
//!
//!     cargo run --example mcfg_blocks -- '((_1a*)_1(_2\1)_2\2\2)*' '[1 a ]1 [2 #1 ]2 #2 #2'

use rewb::analysis::ts_sequence;
use rewb::{bounded_language, McfgConstruction, RefString, Rewb};

fn show(cells: &[String]) -> String {
    // runs of equal components, as `(w)n`
    let mut out = String::new();
    let mut k = 0;
    while k < cells.len() {
        let mut n = 1;
        while k + n < cells.len() && cells[k + n] == cells[k] {
            n += 1;
        }
        let w = if cells[k].is_empty() { "ε" } else { &cells[k] };
        out += &format!("({w}){n}");
        k += n;
    }
    out
}

fn main() {
    let mut args = std::env::args().skip(1);
    let src = args
        .next()
        .unwrap_or_else(|| r"((_1a*)_1(_2\1)_2\2\2)*".to_string());
    let refs = args
        .next()
        .unwrap_or_else(|| "[1 a ]1 [2 #1 ]2 #2 #2".to_string());
    let r = Rewb::parse(&src).expect("valid rewb");
    let c = match McfgConstruction::build(&r) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{src}: {e}");
            std::process::exit(2);
        }
    };
    let b = &c.bounds;
    println!(
        "theta {} sigma {} rho {}  dimension {}",
        b.theta,
        b.sigma,
        b.rho,
        c.grammar.dimension()
    );
    println!(
        "{} nonterminals, {} functions, {} rules",
        c.grammar.nonterminals.len(),
        c.grammar.functions.len(),
        c.grammar.rules.len()
    );

    let v: RefString = refs.parse().expect("ref-string");
    let tuples = c
        .trace(v.symbols())
        .expect("ref-string in the ref-language");
    let ts = ts_sequence(v.symbols(), c.kappa);
    for (k, t) in tuples.iter().enumerate() {
        let sym = if k == 0 {
            "".to_string()
        } else {
            v.symbols()[k - 1].to_string()
        };
        let x = if t[0].is_empty() { "ε" } else { &t[0] };
        let blocks: Vec<String> = (1..=c.kappa).map(|i| show(c.block(t, i))).collect();
        println!(
            "{k:>2} {sym:<3} {:<14} x={x:<6} {}",
            ts[k].to_string(),
            blocks.join("  ")
        );
    }
    assert_eq!(c.check_valid_copies(v.symbols()).expect("trace"), Ok(()));

    let lang = bounded_language(&c.grammar, 8, 1 << 22);
    let words: Vec<&str> = lang
        .words
        .iter()
        .map(|w| if w.is_empty() { "ε" } else { w.as_str() })
        .collect();
    println!("words up to length 8: {}", words.join(" "));
}
