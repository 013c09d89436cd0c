//! A workbench for regular expressions with backreferences (rewbs).
//!
//! A rewb such as `(_1(a+b)*)_1\1` is read as a regular expression over an
//! extended alphabet of letters, brackets `[i`, `]i` and numbers `#i`; its
//! words ("ref-strings") are then dereferenced, replacing each `#i` by the
//! current content of memory cell `i`. This crate implements that
//! semantics directly ([`semantics`], [`oracle`]) and three machine models
//! for the same languages:
//!
//! * [`pmcfg`]: a unary parallel multiple context-free grammar, for every
//!   rewb;
//! * [`mcfg`]: a unary multiple context-free grammar, for closed-star rewbs
//!   (no starred subexpression references a capture made outside it);
//! * [`nesa`]: a nonerasing stack automaton, for closed-star rewbs.
//!
//! [`harness`] enumerates the bounded languages of all of them and compares
//! the results.
//!
//! ```
//! use rewb::{lang_oracle, Rewb};
//!
//! let r = Rewb::parse(r"(_1(a+b)*)_1\1").unwrap();
//! let res = lang_oracle(&r, 4, 32);
//! assert!(res.saturated);
//! assert!(res.words.contains("abab") && !res.words.contains("abba"));
//! ```

pub mod analysis;
pub mod derive;
pub mod error;
pub mod grammar;
pub mod harness;
pub mod mcfg;
pub mod nesa;
pub mod nfa;
pub mod oracle;
pub mod pmcfg;
pub mod semantics;
pub mod syntax;

pub use analysis::{compute_bounds, is_closed, is_closed_star, ts_sequence, Bounds, TsTuple};
pub use derive::{bounded_language, BoundedLanguage, Status};
pub use error::{Error, Result};
pub use grammar::{parse_grammar, Grammar};
pub use mcfg::{build_mcfg, McfgConstruction};
pub use nesa::{build_nesa, Nesa, Verdict};
pub use nfa::{build_nfa, ExtNfa};
pub use oracle::lang_oracle;
pub use pmcfg::{build_pmcfg, PmcfgConstruction};
pub use semantics::{deref, mem, ExtSymbol, MemState, RefString};
pub use syntax::Rewb;
