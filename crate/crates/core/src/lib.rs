//! Longest common prefix (and suffix) of context-free languages.
//!
//! Words that may be exponentially long are kept as straight-line programs
//! ([`slp`]); every nonterminal's language is summarized by a representative
//! of at most three words ([`rep`]); a capped worklist fixpoint over the
//! normalized grammar ([`solver`]) yields the answer.
//!
//! ```
//! use cflcp::{compute_lcp, Grammar};
//!
//! let g = Grammar::parse("S -> A 'ababaac'\nA -> 'ab' A 'abaab' | 'ab' A 'abaac' | eps").unwrap();
//! let report = compute_lcp(&g).unwrap();
//! assert_eq!(report.lcp.expand(1024).unwrap(), "ababa");
//! ```

pub mod cli;
pub mod grammar;
pub mod oracle;
pub mod rep;
pub mod slp;
pub mod solver;

pub use grammar::{parse_grammar, Grammar, GrammarError, Rule, Symbol};
pub use rep::{reduce, CanonicalKey, Extension, Rep, RepError};
pub use slp::{OmegaLcp, Slp, SlpError};
pub use solver::{compute_lcp, compute_lcs, SolveError, SolveReport};
