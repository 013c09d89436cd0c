use std::process::{Command, Output};

fn rewb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rewb"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const CORPUS: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/corpus/shipped.txt");

#[test]
fn classify_table() {
    for (src, cs) in [
        ("((_1a*)_1c\\1)*", "yes"),
        ("(_1a*)_1(c\\1)*", "no"),
        ("a*", "yes"),
    ] {
        let o = rewb(&["classify", src]);
        assert!(o.status.success());
        assert!(
            stdout(&o).contains(&format!("closed-star: {cs}\n")),
            "{src}"
        );
    }
    assert!(stdout(&rewb(&["classify", "a*"])).contains("kappa: 0\n"));
}

#[test]
fn check_exit_codes() {
    let ok = rewb(&["check", "(_1(a+b)*)_1\\1", "--max-len", "6"]);
    assert!(ok.status.success());
    assert!(stdout(&ok).contains("result: ok"));
    let not_cs = rewb(&["check", "(_1a*)_1(c\\1)*", "--engines", "oracle,mcfg"]);
    assert_eq!(not_cs.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&not_cs.stderr).contains("closed-star"));
    let two = rewb(&[
        "check",
        "(_1a*)_1(c\\1)*",
        "--engines",
        "oracle,pmcfg",
        "--max-len",
        "7",
    ]);
    assert!(two.status.success());
    let bad = rewb(&["check", "(_1a", "--max-len", "3"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn json_reports_are_stable() {
    let args = [
        "--format",
        "json",
        "check",
        "((_1a*)_1(_2\\1)_2\\2\\2)*",
        "--max-len",
        "8",
        "--verbose",
    ];
    let a = rewb(&args);
    let b = rewb(&args);
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["schema"], "rewb-report/1");
    assert_eq!(v["ok"], true);
    let words = v["engines"][0]["words"].as_array().unwrap();
    assert!(words.iter().any(|w| w == "aaaa"));
    let quiet: serde_json::Value = serde_json::from_slice(&rewb(&args[..6]).stdout).unwrap();
    assert!(quiet["engines"][0].get("words").is_none());
    assert!(quiet["engines"][0].get("millis").is_none());
}

#[test]
fn emit_and_trace() {
    let nfa = stdout(&rewb(&["emit", "(_1a*)_1(c\\1)*", "--target", "nfa"]));
    assert!(nfa.contains("3 -#1-> 2"));
    let p = stdout(&rewb(&[
        "emit",
        "(_1a*)_1(c\\1)*",
        "--target",
        "pmcfg",
        "--trace",
        "[1 a ]1 c #1",
    ]));
    assert!(p.contains("rule S -> o[A2]"));
    assert!(p.contains("trace 5 (aca, a)"));
    let n = stdout(&rewb(&[
        "emit",
        "(_1(a+b)*)_1\\1",
        "--target",
        "nesa",
        "--trace",
        "abab",
    ]));
    assert!(n.starts_with("nesa\n"));
    assert!(n.contains("trace (q"));
    assert_eq!(
        rewb(&["emit", "(_1a*)_1(c\\1)*", "--target", "mcfg"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn bounds_and_deref() {
    let b = stdout(&rewb(&["bounds", "((_1a*)_1(_2\\1)_2\\2\\2)*"]));
    assert!(b.contains("theta: 2\nsigma: 2\nrho: 10\n"));
    let d = rewb(&["bounds", "(_1a*)_1(c\\1)*"]);
    assert_eq!(d.status.code(), Some(1));
    assert!(stdout(&d).contains("diverged"));
    assert_eq!(
        stdout(&rewb(&["deref", "[1 a ]1 #1 [1 b b ]1 #1"]))
            .lines()
            .next(),
        Some("aabbbb")
    );
}

#[test]
fn lang_lists_words() {
    let o = rewb(&["lang", "(_1(a+b)*)_1\\1", "--max-len", "4"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 7);
}

#[test]
fn shipped_corpus_is_green() {
    let o = rewb(&["corpus", CORPUS, "--max-len", "6"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).ends_with("entries passed\n"));
}

#[test]
fn wrong_expectation_fails_the_run() {
    let dir = std::env::temp_dir().join(format!("rewb-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("bad.txt");
    std::fs::write(&file, "(_1a*)_1(c\\1)*  # expect: closed-star=yes\n").unwrap();
    let o = rewb(&["corpus", file.to_str().unwrap(), "--max-len", "4"]);
    assert_eq!(o.status.code(), Some(1));
    let _ = std::fs::remove_dir_all(&dir);
}
