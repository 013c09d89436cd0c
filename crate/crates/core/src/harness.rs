//! Cross-engine checks, corpus runs and random rewbs.
//!
//! Every engine produces the set of words of length at most `max_len`; a
//! check compares all requested engines pairwise. Reports serialize to a
//! versioned JSON schema and render as plain text. They contain no timing
//! data unless asked to, so identical inputs give identical bytes.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{compute_bounds, is_closed, is_closed_star, BoundsReport, DEFAULT_CAP};
use crate::derive::{bounded_language, Status};
use crate::error::{Error, Result};
use crate::mcfg::McfgConstruction;
use crate::nesa::{Nesa, Verdict};
use crate::nfa::ExtNfa;
use crate::oracle::lang_oracle;
use crate::pmcfg::PmcfgConstruction;
use crate::semantics::RefString;
use crate::syntax::Rewb;

pub const SCHEMA: &str = "rewb-report/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Oracle,
    Pmcfg,
    Mcfg,
    Nesa,
}

impl Engine {
    pub const ALL: [Engine; 4] = [Engine::Oracle, Engine::Pmcfg, Engine::Mcfg, Engine::Nesa];

    pub fn name(self) -> &'static str {
        match self {
            Engine::Oracle => "oracle",
            Engine::Pmcfg => "pmcfg",
            Engine::Mcfg => "mcfg",
            Engine::Nesa => "nesa",
        }
    }

    /// Whether the engine only exists for closed-star rewbs.
    pub fn needs_closed_star(self) -> bool {
        matches!(self, Engine::Mcfg | Engine::Nesa)
    }
}

impl std::fmt::Display for Engine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Engine {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Engine::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| format!("unknown engine `{s}`"))
    }
}

/// Parses a comma-separated engine list.
pub fn parse_engines(s: &str) -> Result<Vec<Engine>, String> {
    let mut out: Vec<Engine> = s
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(Engine::from_str)
        .collect::<Result<_, _>>()?;
    out.sort();
    out.dedup();
    Ok(out)
}

/// All engines that apply to `r`.
pub fn default_engines(r: &Rewb) -> Vec<Engine> {
    let cs = is_closed_star(r);
    Engine::ALL
        .into_iter()
        .filter(|e| cs || !e.needs_closed_star())
        .collect()
}

#[derive(Clone, Debug)]
pub struct CheckConfig {
    pub max_len: usize,
    /// `None` selects [`default_engines`].
    pub engines: Option<Vec<Engine>>,
    /// Item budget for grammar generation and step budget per NESA query.
    pub budget: u64,
    /// Ref-string length at which the oracle gives up if not saturated.
    pub oracle_ref_cap: usize,
    pub bounds_cap: u32,
    pub verbose: bool,
    pub timings: bool,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            max_len: 8,
            engines: None,
            budget: 1 << 22,
            oracle_ref_cap: 1024,
            bounds_cap: DEFAULT_CAP,
            verbose: false,
            timings: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub rewb: String,
    pub kappa: u32,
    pub closed: bool,
    pub closed_star: bool,
    pub bounds: BoundsReport,
}

pub fn classify(r: &Rewb, cap: u32) -> Result<Classification> {
    let nfa = ExtNfa::build(r);
    let open = nfa.open_sets()?;
    let bounds = match compute_bounds(&nfa, &open, cap) {
        Ok(b) => b.report(),
        Err(d) => d.report(),
    };
    Ok(Classification {
        rewb: r.to_string(),
        kappa: r.max_group_index(),
        closed: is_closed(r),
        closed_star: is_closed_star(r),
        bounds,
    })
}

impl Classification {
    pub fn render_text(&self) -> String {
        let yn = |b: bool| if b { "yes" } else { "no" };
        let mut out = format!(
            "rewb: {}\nkappa: {}\nclosed: {}\nclosed-star: {}\n",
            self.rewb,
            self.kappa,
            yn(self.closed),
            yn(self.closed_star)
        );
        out += &render_bounds(&self.bounds);
        out
    }
}

pub fn render_bounds(b: &BoundsReport) -> String {
    match (b.theta, b.sigma, b.rho) {
        (Some(t), Some(s), Some(r)) => {
            let depth: Vec<String> = b.depth.iter().map(u64::to_string).collect();
            format!(
                "theta: {t}\nsigma: {s}\nrho: {r}\ndepth: {}\nreachable triples: {}\n",
                depth.join(" "),
                b.reachable_count
            )
        }
        _ => {
            let mut out = String::from("bounds: diverged\n");
            if let Some(c) = &b.witness_cycle {
                let _ = writeln!(out, "witness: {}", c.join(", "));
            }
            out
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EngineReport {
    pub engine: Engine,
    /// `saturated`, `complete`, or the reason the result may be partial.
    pub status: String,
    pub complete: bool,
    pub count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub words: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub millis: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Diff {
    pub left: Engine,
    pub right: Engine,
    pub only_left: Vec<String>,
    pub only_right: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub schema: &'static str,
    pub rewb: String,
    pub max_len: usize,
    pub engines: Vec<EngineReport>,
    pub diffs: Vec<Diff>,
    pub agree: bool,
    pub ok: bool,
    #[serde(skip)]
    pub languages: Vec<(Engine, BTreeSet<String>)>,
}

/// Every word over `sigma` of length at most `max_len`.
pub fn all_words(sigma: &BTreeSet<char>, max_len: usize) -> Vec<String> {
    let mut all = vec![String::new()];
    let mut layer = vec![String::new()];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|w| sigma.iter().map(move |c| format!("{w}{c}")))
            .collect();
        all.extend(layer.iter().cloned());
    }
    all
}

fn status_name(s: Status) -> &'static str {
    match s {
        Status::Complete => "complete",
        Status::PossiblyIncomplete => "possibly-incomplete",
        Status::BudgetExceeded => "budget-exceeded",
    }
}

/// The bounded language of `r` according to one engine, with a status and
/// a completeness flag.
pub fn engine_language(
    r: &Rewb,
    engine: Engine,
    cfg: &CheckConfig,
) -> Result<(BTreeSet<String>, String, bool)> {
    let budget = usize::try_from(cfg.budget).unwrap_or(usize::MAX);
    Ok(match engine {
        Engine::Oracle => {
            let res = lang_oracle(r, cfg.max_len, cfg.oracle_ref_cap);
            let status = if res.saturated {
                "saturated"
            } else {
                "unsaturated"
            };
            (res.words, status.into(), res.saturated)
        }
        Engine::Pmcfg => {
            let c = PmcfgConstruction::build(r)?;
            let res = bounded_language(&c.grammar, cfg.max_len, budget);
            (
                res.words,
                status_name(res.status).into(),
                res.status == Status::Complete,
            )
        }
        Engine::Mcfg => {
            let c = McfgConstruction::build_with_cap(r, cfg.bounds_cap)?;
            let res = bounded_language(&c.grammar, cfg.max_len, budget);
            (
                res.words,
                status_name(res.status).into(),
                res.status == Status::Complete,
            )
        }
        Engine::Nesa => {
            let n = Nesa::build_with_cap(r, cfg.bounds_cap)?;
            let mut words = BTreeSet::new();
            let mut complete = true;
            for w in all_words(&r.letters(), cfg.max_len) {
                match n.accepts(&w, cfg.budget)? {
                    Verdict::Yes => {
                        words.insert(w);
                    }
                    Verdict::No => {}
                    Verdict::BudgetExceeded => complete = false,
                }
            }
            let status = if complete {
                "complete"
            } else {
                "budget-exceeded"
            };
            (words, status.into(), complete)
        }
    })
}

/// Runs the requested engines and compares them pairwise.
pub fn check(r: &Rewb, cfg: &CheckConfig) -> Result<CheckReport> {
    let engines = cfg.engines.clone().unwrap_or_else(|| default_engines(r));
    if engines.iter().any(|e| e.needs_closed_star()) && !is_closed_star(r) {
        return Err(Error::NotClosedStar);
    }
    let mut reports = Vec::new();
    let mut languages = Vec::new();
    for &e in &engines {
        let t0 = Instant::now();
        let (words, status, complete) = engine_language(r, e, cfg)?;
        let millis = cfg.timings.then(|| t0.elapsed().as_secs_f64() * 1e3);
        reports.push(EngineReport {
            engine: e,
            status,
            complete,
            count: words.len(),
            words: cfg.verbose.then(|| words.iter().cloned().collect()),
            millis,
        });
        languages.push((e, words));
    }
    let mut diffs = Vec::new();
    for a in 0..languages.len() {
        for b in a + 1..languages.len() {
            let (l, lw) = &languages[a];
            let (rr, rw) = &languages[b];
            diffs.push(Diff {
                left: *l,
                right: *rr,
                only_left: lw.difference(rw).cloned().collect(),
                only_right: rw.difference(lw).cloned().collect(),
            });
        }
    }
    let agree = diffs
        .iter()
        .all(|d| d.only_left.is_empty() && d.only_right.is_empty());
    let ok = agree && reports.iter().all(|e| e.complete);
    Ok(CheckReport {
        schema: SCHEMA,
        rewb: r.to_string(),
        max_len: cfg.max_len,
        engines: reports,
        diffs,
        agree,
        ok,
        languages,
    })
}

fn show_word(w: &str) -> &str {
    if w.is_empty() {
        "ε"
    } else {
        w
    }
}

impl CheckReport {
    pub fn render_text(&self) -> String {
        let mut out = format!("rewb: {}\nmax-len: {}\n", self.rewb, self.max_len);
        for e in &self.engines {
            let _ = write!(
                out,
                "{:<7} {:>6} words  {}",
                e.engine.name(),
                e.count,
                e.status
            );
            if let Some(ms) = e.millis {
                let _ = write!(out, "  {ms:.1} ms");
            }
            out.push('\n');
            if let Some(ws) = &e.words {
                let ws: Vec<&str> = ws.iter().map(|w| show_word(w)).collect();
                let _ = writeln!(out, "        {}", ws.join(" "));
            }
        }
        for d in &self.diffs {
            if d.only_left.is_empty() && d.only_right.is_empty() {
                continue;
            }
            let l: Vec<&str> = d.only_left.iter().map(|w| show_word(w)).collect();
            let r: Vec<&str> = d.only_right.iter().map(|w| show_word(w)).collect();
            let _ = writeln!(
                out,
                "mismatch {} vs {}: only {} [{}], only {} [{}]",
                d.left,
                d.right,
                d.left,
                l.join(" "),
                d.right,
                r.join(" ")
            );
        }
        let _ = writeln!(out, "result: {}", if self.ok { "ok" } else { "FAILED" });
        out
    }
}

/// One line of a corpus file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CorpusEntry {
    pub line: usize,
    pub source: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expect_closed_star: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expect_closed: Option<bool>,
}

/// Parses a corpus: one rewb per line, optionally followed by
/// `# expect: closed-star=yes closed=no`. Blank lines and lines starting
/// with `#` are skipped.
pub fn parse_corpus(text: &str) -> Result<Vec<CorpusEntry>> {
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let (src, note) = match t.split_once('#') {
            Some((s, n)) => (s.trim(), Some(n.trim())),
            None => (t, None),
        };
        let mut e = CorpusEntry {
            line,
            source: src.to_string(),
            expect_closed_star: None,
            expect_closed: None,
        };
        if let Some(note) = note {
            let Some(rest) = note.strip_prefix("expect:") else {
                out.push(e);
                continue;
            };
            for kv in rest.split_whitespace() {
                let bad = || Error::GrammarSyntax {
                    line,
                    message: format!("bad expectation `{kv}`"),
                };
                let (key, val) = kv.split_once('=').ok_or_else(bad)?;
                let val = match val {
                    "yes" | "true" => true,
                    "no" | "false" => false,
                    _ => return Err(bad()),
                };
                match key {
                    "closed-star" => e.expect_closed_star = Some(val),
                    "closed" => e.expect_closed = Some(val),
                    _ => return Err(bad()),
                }
            }
        }
        out.push(e);
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct EntryReport {
    pub line: usize,
    pub source: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classification: Option<Classification>,
    pub expectation_met: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub check: Option<CheckReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CorpusReport {
    pub schema: &'static str,
    pub max_len: usize,
    pub total: usize,
    pub passed: usize,
    pub entries: Vec<EntryReport>,
    pub ok: bool,
}

fn run_entry(e: &CorpusEntry, cfg: &CheckConfig) -> EntryReport {
    let mut rep = EntryReport {
        line: e.line,
        source: e.source.clone(),
        classification: None,
        expectation_met: false,
        check: None,
        error: None,
        ok: false,
    };
    let r = match Rewb::parse(&e.source)
        .map_err(Error::from)
        .and_then(|r| r.validate().map(|()| r).map_err(Error::from))
    {
        Ok(r) => r,
        Err(err) => {
            rep.error = Some(err.to_string());
            return rep;
        }
    };
    match classify(&r, cfg.bounds_cap) {
        Ok(c) => {
            rep.expectation_met = e.expect_closed_star.is_none_or(|x| x == c.closed_star)
                && e.expect_closed.is_none_or(|x| x == c.closed);
            rep.classification = Some(c);
        }
        Err(err) => {
            rep.error = Some(err.to_string());
            return rep;
        }
    }
    match check(&r, cfg) {
        Ok(c) => {
            rep.ok = rep.expectation_met && c.ok;
            rep.check = Some(c);
        }
        Err(err) => rep.error = Some(err.to_string()),
    }
    rep
}

/// Classifies and checks every entry, in parallel, keeping file order.
pub fn run_corpus(entries: &[CorpusEntry], cfg: &CheckConfig) -> CorpusReport {
    let entries: Vec<EntryReport> = entries.par_iter().map(|e| run_entry(e, cfg)).collect();
    let passed = entries.iter().filter(|e| e.ok).count();
    CorpusReport {
        schema: SCHEMA,
        max_len: cfg.max_len,
        total: entries.len(),
        passed,
        ok: passed == entries.len(),
        entries,
    }
}

impl CorpusReport {
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            let mark = if e.ok { "ok  " } else { "FAIL" };
            let _ = write!(out, "{mark} line {:>3}  {}", e.line, e.source);
            if let Some(c) = &e.classification {
                let _ = write!(
                    out,
                    "  closed-star={}",
                    if c.closed_star { "yes" } else { "no" }
                );
            }
            if !e.expectation_met && e.classification.is_some() {
                out += "  (unexpected classification)";
            }
            if let Some(c) = &e.check {
                let counts: Vec<String> = c
                    .engines
                    .iter()
                    .map(|x| format!("{}={}", x.engine, x.count))
                    .collect();
                let _ = write!(out, "  {}", counts.join(" "));
            }
            if let Some(err) = &e.error {
                let _ = write!(out, "  error: {err}");
            }
            out.push('\n');
        }
        let _ = writeln!(out, "{}/{} entries passed", self.passed, self.total);
        out
    }
}

/// What `emit` produces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    Pmcfg,
    Mcfg,
    Nesa,
    Nfa,
}

impl FromStr for Target {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "pmcfg" => Ok(Target::Pmcfg),
            "mcfg" => Ok(Target::Mcfg),
            "nesa" => Ok(Target::Nesa),
            "nfa" => Ok(Target::Nfa),
            _ => Err(format!("unknown target `{s}`")),
        }
    }
}

fn render_tuple(t: &[String]) -> String {
    let items: Vec<&str> = t.iter().map(|w| show_word(w)).collect();
    format!("({})", items.join(", "))
}

/// Serializes a construction. With `trace`, also prints a run: a ref-string
/// for the grammars and the NFA, an input word for the NESA.
pub fn emit(r: &Rewb, target: Target, trace: Option<&str>, cap: u32) -> Result<String> {
    let mut out = String::new();
    match target {
        Target::Nfa => {
            let n = ExtNfa::build(r);
            let open = n.open_sets()?;
            out += &n.dump(Some(&open));
            if let Some(t) = trace {
                let v: RefString = t.parse()?;
                let run = n
                    .find_run(&v.0)
                    .ok_or_else(|| Error::RunMismatch("ref-string is not accepted".into()))?;
                let states: Vec<String> = run.iter().map(usize::to_string).collect();
                let _ = writeln!(out, "run {}", states.join(" "));
            }
        }
        Target::Pmcfg => {
            let c = PmcfgConstruction::build(r)?;
            out += &c.grammar.to_text();
            if let Some(t) = trace {
                let v: RefString = t.parse()?;
                for (k, tuple) in c.trace(&v.0)?.iter().enumerate() {
                    let _ = writeln!(out, "trace {k} {}", render_tuple(tuple));
                }
            }
        }
        Target::Mcfg => {
            let c = McfgConstruction::build_with_cap(r, cap)?;
            out += &c.grammar.to_text();
            if let Some(t) = trace {
                let v: RefString = t.parse()?;
                for (k, tuple) in c.trace(&v.0)?.iter().enumerate() {
                    let mut parts = vec![show_word(&tuple[0]).to_string()];
                    for cell in 1..=c.kappa {
                        parts.push(render_tuple(c.block(tuple, cell)));
                    }
                    let _ = writeln!(out, "trace {k} {}", parts.join(" "));
                }
            }
        }
        Target::Nesa => {
            let n = Nesa::build_with_cap(r, cap)?;
            out += &n.dump();
            if let Some(w) = trace {
                let chars: Vec<char> = w.chars().collect();
                let (verdict, run) = n.accepting_run(w, CheckConfig::default().budget)?;
                match run {
                    Some(run) => {
                        for id in &run {
                            let _ = writeln!(out, "trace {}", n.render(&chars, id));
                        }
                    }
                    None => {
                        let _ = writeln!(out, "trace none ({verdict:?})");
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Shape of generated rewbs.
#[derive(Clone, Debug)]
pub struct RandomConfig {
    pub letters: Vec<char>,
    /// Largest group index; also the largest referenced index.
    pub max_index: u32,
    pub max_depth: u32,
    /// Reject candidates without at least one group and one reference.
    pub require_reference: bool,
    /// Reject closed-star candidates with a larger `ρ` (or diverging bounds).
    pub max_rho: u64,
    pub max_size: usize,
}

impl Default for RandomConfig {
    fn default() -> Self {
        RandomConfig {
            letters: vec!['a', 'b'],
            max_index: 2,
            max_depth: 4,
            require_reference: true,
            max_rho: 12,
            max_size: 16,
        }
    }
}

/// A random valid rewb: groups never enclose a group or reference of their
/// own index.
pub fn random_rewb<R: Rng>(rng: &mut R, cfg: &RandomConfig) -> Rewb {
    fn go<R: Rng>(rng: &mut R, cfg: &RandomConfig, depth: u32, inside: &mut Vec<u32>) -> Rewb {
        let free: Vec<u32> = (1..=cfg.max_index)
            .filter(|i| !inside.contains(i))
            .collect();
        let leaf = depth == 0 || rng.gen_bool(0.3);
        if leaf {
            let roll: f64 = rng.gen();
            if roll < 0.25 && !free.is_empty() {
                return Rewb::Ref(free[rng.gen_range(0..free.len())]);
            }
            if roll < 0.3 {
                return Rewb::Epsilon;
            }
            return Rewb::Terminal(cfg.letters[rng.gen_range(0..cfg.letters.len())]);
        }
        let roll: f64 = rng.gen();
        if roll < 0.4 {
            Rewb::concat(
                go(rng, cfg, depth - 1, inside),
                go(rng, cfg, depth - 1, inside),
            )
        } else if roll < 0.55 {
            Rewb::alt(
                go(rng, cfg, depth - 1, inside),
                go(rng, cfg, depth - 1, inside),
            )
        } else if roll < 0.72 {
            Rewb::star(go(rng, cfg, depth - 1, inside))
        } else if !free.is_empty() {
            let i = free[rng.gen_range(0..free.len())];
            inside.push(i);
            let body = go(rng, cfg, depth - 1, inside);
            inside.pop();
            Rewb::group(i, body)
        } else {
            Rewb::concat(
                go(rng, cfg, depth - 1, inside),
                go(rng, cfg, depth - 1, inside),
            )
        }
    }
    go(rng, cfg, cfg.max_depth, &mut Vec::new())
}

fn has_ref_and_group(r: &Rewb) -> (bool, bool) {
    match r {
        Rewb::Ref(_) => (true, false),
        Rewb::Terminal(_) | Rewb::Epsilon => (false, false),
        Rewb::Star(b) => has_ref_and_group(b),
        Rewb::Group(_, b) => (has_ref_and_group(b).0, true),
        Rewb::Concat(a, b) | Rewb::Alt(a, b) => {
            let (x, y) = has_ref_and_group(a);
            let (u, v) = has_ref_and_group(b);
            (x || u, y || v)
        }
    }
}

/// Whether a generated rewb passes the filters of `cfg`.
pub fn acceptable(r: &Rewb, cfg: &RandomConfig) -> bool {
    if r.size() > cfg.max_size || r.validate().is_err() {
        return false;
    }
    if cfg.require_reference && has_ref_and_group(r) != (true, true) {
        return false;
    }
    if !is_closed_star(r) {
        return true;
    }
    let nfa = ExtNfa::build(r);
    let Ok(open) = nfa.open_sets() else {
        return false;
    };
    compute_bounds(&nfa, &open, DEFAULT_CAP).is_ok_and(|b| b.rho <= cfg.max_rho)
}

/// `n` distinct acceptable rewbs from a fixed seed.
pub fn random_corpus(seed: u64, n: usize, cfg: &RandomConfig) -> Vec<Rewb> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    while out.len() < n {
        let r = random_rewb(&mut rng, cfg);
        if acceptable(&r, cfg) && seen.insert(r.to_string()) {
            out.push(r);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn copy_language_all_engines() {
        let r = Rewb::parse("(_1(a+b)*)_1\\1").unwrap();
        let cfg = CheckConfig {
            max_len: 6,
            ..CheckConfig::default()
        };
        let rep = check(&r, &cfg).unwrap();
        assert_eq!(rep.engines.len(), 4);
        assert!(rep.ok, "{}", rep.render_text());
        assert!(rep.engines.iter().all(|e| e.count == 15));
    }

    #[test]
    fn mcfg_demands_closed_star() {
        let r = Rewb::parse("(_1a*)_1(c\\1)*").unwrap();
        let cfg = CheckConfig {
            engines: Some(vec![Engine::Oracle, Engine::Mcfg]),
            ..CheckConfig::default()
        };
        assert!(matches!(check(&r, &cfg), Err(Error::NotClosedStar)));
        assert_eq!(default_engines(&r), [Engine::Oracle, Engine::Pmcfg]);
    }

    #[test]
    fn corpus_parsing() {
        let text = "# header\n\n(_1a*)_1c\\1   # expect: closed-star=yes closed=yes\n\\1 # expect: closed=no\na*\n";
        let es = parse_corpus(text).unwrap();
        assert_eq!(es.len(), 3);
        assert_eq!(es[0].line, 3);
        assert_eq!(es[0].expect_closed_star, Some(true));
        assert_eq!(es[1].expect_closed, Some(false));
        assert_eq!(es[2].expect_closed_star, None);
        assert!(parse_corpus("a # expect: closed-star=maybe").is_err());
    }

    #[test]
    fn wrong_expectation_is_red() {
        let es = parse_corpus(
            "(_1a*)_1(c\\1)* # expect: closed-star=yes\na* # expect: closed-star=yes\n",
        )
        .unwrap();
        let rep = run_corpus(
            &es,
            &CheckConfig {
                max_len: 4,
                ..CheckConfig::default()
            },
        );
        assert!(!rep.entries[0].ok);
        assert!(rep.entries[1].ok);
        assert_eq!(rep.passed, 1);
        assert!(run_corpus(&[], &CheckConfig::default()).ok);
    }

    #[test]
    fn reports_are_deterministic() {
        let es = parse_corpus("((_1a*)_1\\1)*\n(_1a+b)_1\\1*\n").unwrap();
        let cfg = CheckConfig {
            max_len: 5,
            ..CheckConfig::default()
        };
        let a = serde_json::to_string(&run_corpus(&es, &cfg)).unwrap();
        let b = serde_json::to_string(&run_corpus(&es, &cfg)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn random_rewbs_are_valid() {
        let cfg = RandomConfig::default();
        let rs = random_corpus(7, 20, &cfg);
        assert_eq!(rs.len(), 20);
        for r in &rs {
            assert!(r.validate().is_ok());
            assert!(r.max_group_index() <= 2);
            assert_eq!(Rewb::parse(&r.to_string()).unwrap(), *r);
        }
        assert_eq!(random_corpus(7, 20, &cfg), rs);
    }

    #[test]
    fn emit_targets() {
        let r = Rewb::parse("(_1a*)_1(c\\1)*").unwrap();
        let nfa = emit(&r, Target::Nfa, Some("[1 a ]1 c #1"), DEFAULT_CAP).unwrap();
        assert!(nfa.contains("states 4"));
        let p = emit(&r, Target::Pmcfg, Some("[1 a ]1 c #1"), DEFAULT_CAP).unwrap();
        assert!(p.contains("trace 5 (aca, a)"), "{p}");
        assert!(emit(&r, Target::Mcfg, None, DEFAULT_CAP).is_err());
        let e = Rewb::parse("((_1a*)_1(_2\\1)_2\\2\\2)*").unwrap();
        let n = emit(&e, Target::Nesa, Some("aaaa"), DEFAULT_CAP).unwrap();
        assert!(
            n.lines().last().unwrap().starts_with("trace (q0, <|"),
            "{}",
            n.lines().last().unwrap()
        );
    }
}
