//! Runs the nonerasing stack automaton of a closed-star rewb on a word and
//! prints the accepting computation. `^` marks the stack pointer and `$`
//! the top of the stack.
//!
//!     cargo run --example nesa_run -- '((_1a*)_1(_2\1)_2\2\2)*' aaaa

use rewb::{Nesa, Rewb, Verdict};

fn main() {
    let mut args = std::env::args().skip(1);
    let src = args
        .next()
        .unwrap_or_else(|| r"((_1a*)_1(_2\1)_2\2\2)*".to_string());
    let word = args.next().unwrap_or_else(|| "aaaa".to_string());
    let r = Rewb::parse(&src).expect("valid rewb");
    let n = match Nesa::build(&r) {
        Ok(n) => n,
        Err(e) => {
            eprintln!("{src}: {e}");
            std::process::exit(2);
        }
    };
    n.audit_nonerasing().expect("construction is nonerasing");
    let calls = n.states.iter().filter(|s| !s.cmds.is_empty()).count();
    println!(
        "{} states ({} with pending commands), {} transitions",
        n.states.len(),
        calls,
        n.transitions.len()
    );

    let chars: Vec<char> = word.chars().collect();
    match n.accepting_run(&word, 1 << 22).expect("search") {
        (Verdict::Yes, Some(run)) => {
            for id in &run {
                println!("{}", n.render(&chars, id));
            }
            println!("accepted in {} moves", run.len() - 1);
        }
        (v, _) => println!("{word}: {v:?}"),
    }
}
