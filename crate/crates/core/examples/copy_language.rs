//! The copy language `{ww}` three ways: by the dereferencing oracle, by the
//! constructed PMCFG, and by a hand-written two-dimensional MCFG in the
//! grammar text format.

use rewb::{bounded_language, lang_oracle, parse_grammar, PmcfgConstruction, Rewb};

const HAND_WRITTEN: &str = r#"
mcfg
start S
nonterm S dim 1
nonterm A dim 2
fun join : 2 -> 1 = <$1.1 $1.2>
fun pa : 2 -> 2 = <$1.1 "a" ; $1.2 "a">
fun pb : 2 -> 2 = <$1.1 "b" ; $1.2 "b">
fun e : -> 2 = < ; >
rule S -> join[A]
rule A -> pa[A]
rule A -> pb[A]
rule A -> e[]
"#;

fn main() {
    let r = Rewb::parse(r"(_1(a+b)*)_1\1").expect("valid rewb");
    let oracle = lang_oracle(&r, 6, 1024);

    let built = PmcfgConstruction::build(&r).expect("construction");
    let from_pmcfg = bounded_language(&built.grammar, 6, 1 << 20);

    let hand = parse_grammar(HAND_WRITTEN).expect("grammar text");
    let from_hand = bounded_language(&hand, 6, 1 << 20);

    println!(
        "oracle:      {} words (saturated: {})",
        oracle.words.len(),
        oracle.saturated
    );
    println!(
        "pmcfg:       {} words ({:?})",
        from_pmcfg.words.len(),
        from_pmcfg.status
    );
    println!(
        "hand mcfg:   {} words ({:?})",
        from_hand.words.len(),
        from_hand.status
    );
    assert_eq!(oracle.words, from_pmcfg.words);
    assert_eq!(oracle.words, from_hand.words);
    let shown: Vec<&str> = oracle
        .words
        .iter()
        .map(|w| if w.is_empty() { "ε" } else { w.as_str() })
        .collect();
    println!("{}", shown.join(" "));
}
