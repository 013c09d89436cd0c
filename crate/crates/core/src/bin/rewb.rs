use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use rewb::analysis::compute_bounds;
use rewb::harness::{self, CheckConfig, Engine, Target};
use rewb::nfa::ExtNfa;
use rewb::oracle::lang_oracle;
use rewb::semantics::{deref, mem, RefString};
use rewb::{Error, Rewb};

#[derive(Parser)]
#[command(
    name = "rewb",
    version,
    about = "Workbench for regular expressions with backreferences"
)]
struct Cli {
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    format: Format,
    /// Include word sets in reports.
    #[arg(long, global = true)]
    verbose: bool,
    /// Include wall-clock timings (reports are no longer byte-stable).
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Closedness, closed-star and counter bounds.
    Classify { rewb: String },
    /// Words up to a length, by the dereferencing oracle.
    Lang {
        rewb: String,
        #[arg(long, default_value_t = 8)]
        max_len: usize,
        /// Hard cap on ref-string length; the walk normally stops earlier.
        #[arg(long, default_value_t = 1024)]
        max_ref_len: usize,
    },
    /// Print a construction.
    Emit {
        rewb: String,
        #[arg(long, value_parser = parse_target)]
        target: Target,
        /// A ref-string (grammars, nfa) or word (nesa) to trace.
        #[arg(long)]
        trace: Option<String>,
        #[arg(long, default_value_t = rewb::analysis::DEFAULT_CAP)]
        cap: u32,
    },
    /// Counter bounds θ, σ, ρ or a divergence witness.
    Bounds {
        rewb: String,
        #[arg(long, default_value_t = rewb::analysis::DEFAULT_CAP)]
        cap: u32,
    },
    /// Compare engines on all words up to a length.
    Check {
        rewb: String,
        #[arg(long, default_value_t = 8)]
        max_len: usize,
        /// Comma-separated subset of oracle,pmcfg,mcfg,nesa.
        #[arg(long, value_delimiter = ',', value_parser = parse_engine)]
        engines: Vec<Engine>,
        #[arg(long, default_value_t = 1 << 22)]
        budget: u64,
    },
    /// Classify and check every rewb of a corpus file.
    Corpus {
        file: std::path::PathBuf,
        #[arg(long, default_value_t = 8)]
        max_len: usize,
        #[arg(long, default_value_t = 1 << 22)]
        budget: u64,
    },
    /// Dereference a ref-string such as `[1 a ]1 #1`.
    Deref { refstring: String },
}

fn parse_engine(s: &str) -> Result<Engine, String> {
    s.parse()
}

fn parse_target(s: &str) -> Result<Target, String> {
    s.parse()
}

fn load(src: &str) -> Result<Rewb, Error> {
    let r = Rewb::parse(src)?;
    r.validate()?;
    Ok(r)
}

fn emit_out(s: &str) {
    // a closed pipe (e.g. `| head`) is not an error worth a panic
    let _ = std::io::stdout().lock().write_all(s.as_bytes());
}

fn print<T: Serialize>(format: Format, value: &T, text: impl FnOnce() -> String) {
    match format {
        Format::Json => {
            emit_out(&(serde_json::to_string_pretty(value).expect("reports serialize") + "\n"))
        }
        Format::Text => emit_out(&text()),
    }
}

#[derive(Serialize)]
struct LangReport {
    schema: &'static str,
    rewb: String,
    max_len: usize,
    saturated: bool,
    explored_ref_len: usize,
    count: usize,
    words: Vec<String>,
}

#[derive(Serialize)]
struct DerefReport {
    refstring: String,
    deref: String,
    mems: Vec<String>,
}

fn run(cli: Cli) -> Result<bool, Error> {
    let f = cli.format;
    match cli.cmd {
        Cmd::Classify { rewb } => {
            let c = harness::classify(&load(&rewb)?, rewb::analysis::DEFAULT_CAP)?;
            print(f, &c, || c.render_text());
            Ok(true)
        }
        Cmd::Lang {
            rewb,
            max_len,
            max_ref_len,
        } => {
            let r = load(&rewb)?;
            let res = lang_oracle(&r, max_len, max_ref_len);
            let rep = LangReport {
                schema: harness::SCHEMA,
                rewb: r.to_string(),
                max_len,
                saturated: res.saturated,
                explored_ref_len: res.explored_ref_len,
                count: res.words.len(),
                words: res.words.into_iter().collect(),
            };
            print(f, &rep, || {
                let mut out = String::new();
                for w in &rep.words {
                    out += if w.is_empty() { "ε" } else { w };
                    out.push('\n');
                }
                if !rep.saturated {
                    out += "# not saturated\n";
                }
                out
            });
            Ok(rep.saturated)
        }
        Cmd::Emit {
            rewb,
            target,
            trace,
            cap,
        } => {
            emit_out(&harness::emit(
                &load(&rewb)?,
                target,
                trace.as_deref(),
                cap,
            )?);
            Ok(true)
        }
        Cmd::Bounds { rewb, cap } => {
            let nfa = ExtNfa::build(&load(&rewb)?);
            let open = nfa.open_sets()?;
            let (rep, ok) = match compute_bounds(&nfa, &open, cap) {
                Ok(b) => (b.report(), true),
                Err(d) => (d.report(), false),
            };
            print(f, &rep, || harness::render_bounds(&rep));
            Ok(ok)
        }
        Cmd::Check {
            rewb,
            max_len,
            engines,
            budget,
        } => {
            let engines = (!engines.is_empty()).then_some(engines);
            let cfg = CheckConfig {
                max_len,
                engines,
                budget,
                verbose: cli.verbose,
                timings: cli.timings,
                ..CheckConfig::default()
            };
            let rep = harness::check(&load(&rewb)?, &cfg)?;
            print(f, &rep, || rep.render_text());
            Ok(rep.ok)
        }
        Cmd::Corpus {
            file,
            max_len,
            budget,
        } => {
            let text = std::fs::read_to_string(&file)
                .map_err(|e| Error::Internal(format!("{}: {e}", file.display())))?;
            let entries = harness::parse_corpus(&text)?;
            let cfg = CheckConfig {
                max_len,
                budget,
                verbose: cli.verbose,
                timings: cli.timings,
                ..CheckConfig::default()
            };
            let rep = harness::run_corpus(&entries, &cfg);
            print(f, &rep, || rep.render_text());
            Ok(rep.ok)
        }
        Cmd::Deref { refstring } => {
            let v: RefString = refstring.parse()?;
            let kappa = v.0.iter().filter_map(|s| s.index()).max().unwrap_or(0);
            let rep = DerefReport {
                refstring: v.to_string(),
                deref: deref(&v.0),
                mems: (1..=kappa).map(|i| mem(i, &v.0)).collect(),
            };
            print(f, &rep, || {
                let mut out = format!("{}\n", rep.deref);
                for (i, m) in rep.mems.iter().enumerate() {
                    out += &format!("mem{} = {m}\n", i + 1);
                }
                out
            });
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
