//! Ground truth on explicit strings: bounded-height enumeration, naive lcp,
//! and the pumping check for `(x, x̄)[(y₁, ȳ₁) + … + (y_k, ȳ_k)]* w`.
//!
//! Nothing here touches SLPs or representatives.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::grammar::{Grammar, Symbol};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("enumeration budget exceeded ({words} words, {bytes} bytes)")]
    BudgetExceeded { words: usize, bytes: usize },
    #[error("lcp of an empty set")]
    EmptySet,
    #[error("height must be at least 1")]
    ZeroHeight,
    #[error("pump exponent bound must be at least 3, got {0}")]
    ExponentTooSmall(usize),
}

#[derive(Clone, Copy, Debug)]
pub struct Budget {
    pub max_words: usize,
    pub max_bytes: usize,
}

impl Default for Budget {
    fn default() -> Budget {
        Budget {
            max_words: 200_000,
            max_bytes: 32 << 20,
        }
    }
}

struct Meter {
    budget: Budget,
    words: usize,
    bytes: usize,
}

impl Meter {
    fn charge(&mut self, word: &str) -> Result<(), OracleError> {
        self.words += 1;
        self.bytes += word.len();
        if self.words > self.budget.max_words || self.bytes > self.budget.max_bytes {
            return Err(OracleError::BudgetExceeded {
                words: self.words,
                bytes: self.bytes,
            });
        }
        Ok(())
    }
}

/// All words with a derivation tree of height at most `height`, counting
/// only nonterminal nodes on a root-to-leaf path.
pub fn enumerate_bounded(g: &Grammar, height: usize, budget: Budget) -> Result<BTreeSet<String>, OracleError> {
    enumerate_truncated(g, height, None, budget)
}

/// Like [`enumerate_bounded`], with every word cut to its first `cut`
/// letters. The lcp of the result equals the lcp of the untruncated set
/// whenever `cut` is at least the length of the shortest word.
pub fn enumerate_truncated(
    g: &Grammar,
    height: usize,
    cut: Option<usize>,
    budget: Budget,
) -> Result<BTreeSet<String>, OracleError> {
    if height == 0 {
        return Err(OracleError::ZeroHeight);
    }
    let mut meter = Meter {
        budget,
        words: 0,
        bytes: 0,
    };
    let truncate = |mut w: String| {
        if let Some(n) = cut {
            if let Some((i, _)) = w.char_indices().nth(n) {
                w.truncate(i);
            }
        }
        w
    };
    // level[A] = words of A with height <= h
    let mut level: HashMap<&str, BTreeSet<String>> = HashMap::new();
    for _ in 0..height {
        let mut next: HashMap<&str, BTreeSet<String>> = HashMap::new();
        for a in g.nonterminals() {
            let mut out = BTreeSet::new();
            for r in g.rules_for(a) {
                let mut partial: BTreeSet<String> = BTreeSet::from([String::new()]);
                for s in &r.rhs {
                    let mut grown = BTreeSet::new();
                    match s {
                        Symbol::Terminal(t) => {
                            for p in &partial {
                                let w = truncate(format!("{p}{t}"));
                                meter.charge(&w)?;
                                grown.insert(w);
                            }
                        }
                        Symbol::Nonterminal(b) => {
                            let Some(sub) = level.get(b.as_str()) else {
                                partial.clear();
                                break;
                            };
                            for p in &partial {
                                for q in sub {
                                    let w = truncate(format!("{p}{q}"));
                                    meter.charge(&w)?;
                                    grown.insert(w);
                                }
                            }
                        }
                    }
                    partial = grown;
                }
                out.extend(partial);
            }
            if !out.is_empty() {
                next.insert(a.as_str(), out);
            }
        }
        level = next;
    }
    Ok(level.remove(g.start()).unwrap_or_default())
}

/// Length of a shortest word with a derivation tree of height at most
/// `height`, if any.
pub fn shortest_bounded(g: &Grammar, height: usize) -> Option<usize> {
    let mut level: HashMap<&str, usize> = HashMap::new();
    for _ in 0..height {
        let mut next = HashMap::new();
        for r in g.rules() {
            let len = r.rhs.iter().try_fold(0usize, |acc, s| match s {
                Symbol::Terminal(t) => Some(acc + t.chars().count()),
                Symbol::Nonterminal(b) => level.get(b.as_str()).map(|n| acc + n),
            });
            if let Some(len) = len {
                let e = next.entry(r.lhs.as_str()).or_insert(len);
                *e = (*e).min(len);
            }
        }
        level = next;
    }
    level.get(g.start()).copied()
}

/// lcp of all words of height at most `height`, enumerating only the
/// prefixes that can matter.
pub fn lcp_bounded(g: &Grammar, height: usize, budget: Budget) -> Result<String, OracleError> {
    let cut = shortest_bounded(g, height).ok_or(OracleError::EmptySet)?;
    let words = enumerate_truncated(g, height, Some(cut), budget)?;
    naive_lcp(words.iter())
}

/// Letter-by-letter lcp of a nonempty set of words.
pub fn naive_lcp<I, S>(words: I) -> Result<String, OracleError>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut it = words.into_iter();
    let first = it.next().ok_or(OracleError::EmptySet)?;
    let mut acc: String = first.as_ref().to_string();
    for w in it {
        let keep: usize = acc
            .chars()
            .zip(w.as_ref().chars())
            .take_while(|(a, b)| a == b)
            .map(|(a, _)| a.len_utf8())
            .sum();
        acc.truncate(keep);
    }
    Ok(acc)
}

/// `x y_{i1} … y_{im} w ȳ_{im} … ȳ_{i1} x̄` for every index sequence of length at
/// most `max_exponent`.
pub fn pump_language(
    x: &str,
    x_bar: &str,
    w: &str,
    pairs: &[(&str, &str)],
    max_exponent: usize,
) -> Vec<String> {
    let mut out = Vec::new();
    // (left part after x, right part before x̄)
    let mut frontier: Vec<(String, String)> = vec![(String::new(), String::new())];
    for depth in 0..=max_exponent {
        for (left, right) in &frontier {
            out.push(format!("{x}{left}{w}{right}{x_bar}"));
        }
        if depth == max_exponent || pairs.is_empty() {
            break;
        }
        frontier = frontier
            .iter()
            .flat_map(|(left, right)| {
                pairs
                    .iter()
                    .map(move |(y, y_bar)| (format!("{left}{y}"), format!("{y_bar}{right}")))
            })
            .collect();
    }
    out
}

/// Words `x yᵢ^e w ȳᵢ^e x̄` for `e ∈ {0, 1, 2}` and each pair `i`.
pub fn pump_restricted(x: &str, x_bar: &str, w: &str, pairs: &[(&str, &str)]) -> Vec<String> {
    let mut out = vec![format!("{x}{w}{x_bar}")];
    for (y, y_bar) in pairs {
        for e in 1..=2 {
            out.push(format!("{x}{}{w}{}{x_bar}", y.repeat(e), y_bar.repeat(e)));
        }
    }
    out
}

/// True iff the lcp over all interleavings with total exponent at most
/// `max_exponent` equals the lcp over single-pair exponents at most two.
pub fn check_pump(
    x: &str,
    x_bar: &str,
    w: &str,
    pairs: &[(&str, &str)],
    max_exponent: usize,
) -> Result<bool, OracleError> {
    if max_exponent < 3 {
        return Err(OracleError::ExponentTooSmall(max_exponent));
    }
    let full = naive_lcp(pump_language(x, x_bar, w, pairs, max_exponent))?;
    let restricted = naive_lcp(pump_restricted(x, x_bar, w, pairs))?;
    Ok(full == restricted)
}
