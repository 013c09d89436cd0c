//! Compares every applicable engine on a few rewbs and prints the reports.
//! The same check backs `rewb check` and `rewb corpus`.

use rewb::harness::{check, CheckConfig};
use rewb::Rewb;

fn main() {
    let cfg = CheckConfig {
        max_len: 7,
        ..CheckConfig::default()
    };
    let mut all_ok = true;
    for src in [
        r"(_1(a+b)*)_1\1",
        r"(_1a*)_1(c\1)*",
        r"((_1a*)_1(_2\1)_2\2\2)*",
        r"((_1(a+b)*)_1c\1)*",
    ] {
        let r = Rewb::parse(src).expect("valid rewb");
        let rep = check(&r, &cfg).expect("check runs");
        print!("{}", rep.render_text());
        println!();
        all_ok &= rep.ok;
    }
    if !all_ok {
        std::process::exit(1);
    }
}
