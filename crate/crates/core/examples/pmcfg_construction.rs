//! Builds the unary PMCFG of a rewb, prints it in grammar text form and
//! replays a ref-string through its functions.
//!
//!     cargo run --example pmcfg_construction -- '(_1a*)_1(c\1)*' '[1 a ]1 c #1'

use rewb::{bounded_language, PmcfgConstruction, RefString, Rewb};

fn main() {
    let mut args = std::env::args().skip(1);
    let src = args.next().unwrap_or_else(|| r"(_1a*)_1(c\1)*".to_string());
    let refs = args.next().unwrap_or_else(|| "[1 a ]1 c #1".to_string());
    let r = Rewb::parse(&src).expect("valid rewb");
    let c = PmcfgConstruction::build(&r).expect("construction");

    println!("{}", c.nfa.dump(Some(&c.open)));
    print!("{}", c.grammar);

    let v: RefString = refs.parse().expect("ref-string");
    match c.trace(v.symbols()) {
        Ok(tuples) => {
            println!("\ntrace of {v}:");
            for (k, t) in tuples.iter().enumerate() {
                let prefix = RefString(v.symbols()[..k].to_vec());
                let comps: Vec<&str> = t
                    .iter()
                    .map(|w| if w.is_empty() { "ε" } else { w.as_str() })
                    .collect();
                println!("  {:<16} ({})", prefix.to_string(), comps.join(", "));
            }
        }
        Err(e) => println!("\n{v}: {e}"),
    }

    let lang = bounded_language(&c.grammar, 7, 1 << 20);
    let words: Vec<&str> = lang
        .words
        .iter()
        .map(|w| if w.is_empty() { "ε" } else { w.as_str() })
        .collect();
    println!("\nwords up to length 7: {}", words.join(" "));
}
