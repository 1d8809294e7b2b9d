//! Representative sublanguages of at most three words.
//!
//! Two languages are lcp-equivalent when they have the same lcp after
//! right-concatenation with any word. Every nonempty language `L` with lcp
//! `u` satisfies `⊓(L·z) = u·(z ⊓ W)` for an extension `W` that is either
//! unconstrained (`L = {u}`), a finite word, or an ω-power `v^ω`. The pair
//! `(u, W)` is the [`CanonicalKey`], and a subset of at most three words of
//! `L` always reproduces it.

use std::fmt;

use num_bigint::BigUint;
use thiserror::Error;

use crate::slp::{render, OmegaLcp, Slp};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RepError {
    #[error("cannot reduce an empty language")]
    EmptyInput,
}

/// The extension `W` of a canonical key.
#[derive(Clone, Debug)]
pub enum Extension {
    /// Singleton language: `⊓(L·z) = u·z`.
    Top,
    Finite(Slp),
    /// `v^ω` for some nonempty `v` (not necessarily primitive).
    Periodic(Slp),
}

#[derive(Clone, Debug)]
pub struct CanonicalKey {
    pub u: Slp,
    pub ext: Extension,
}

impl PartialEq for Extension {
    fn eq(&self, other: &Extension) -> bool {
        match (self, other) {
            (Extension::Top, Extension::Top) => true,
            (Extension::Finite(a), Extension::Finite(b)) => a.equals(b),
            (Extension::Periodic(a), Extension::Periodic(b)) => a.commutes(b),
            _ => false,
        }
    }
}

impl PartialEq for CanonicalKey {
    fn eq(&self, other: &CanonicalKey) -> bool {
        self.u.equals(&other.u) && self.ext == other.ext
    }
}

impl CanonicalKey {
    /// `(u=<word-or-#len>, ext=Top|Finite(<word>)|Periodic(<word>))`
    pub fn render(&self, budget: usize) -> String {
        let ext = match &self.ext {
            Extension::Top => "Top".to_string(),
            Extension::Finite(w) => format!("Finite({})", render(w, budget)),
            Extension::Periodic(v) => format!("Periodic({})", render(v, budget)),
        };
        format!("(u={}, ext={})", render(&self.u, budget), ext)
    }
}

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(256))
    }
}

/// A sublanguage of one to three distinct words with its cached key.
#[derive(Clone, Debug)]
pub struct Rep {
    words: Vec<Slp>,
    key: CanonicalKey,
}

impl Rep {
    pub fn singleton(w: Slp) -> Rep {
        Rep {
            key: CanonicalKey {
                u: w.clone(),
                ext: Extension::Top,
            },
            words: vec![w],
        }
    }

    pub fn words(&self) -> &[Slp] {
        &self.words
    }

    pub fn key(&self) -> &CanonicalKey {
        &self.key
    }

    /// The lcp of the represented language.
    pub fn lcp(&self) -> &Slp {
        &self.key.u
    }

    pub fn equivalent(&self, other: &Rep) -> bool {
        self.key == other.key
    }

    /// Two words of the representative whose lcp is the language's lcp.
    pub fn witness_pair(&self) -> (Slp, Slp) {
        let first = &self.words[0];
        let partner = self
            .words
            .iter()
            .min_by_key(|w| first.lcp_len(w))
            .expect("nonempty");
        (first.clone(), partner.clone())
    }

    pub fn concat(&self, other: &Rep) -> Rep {
        if other.words.len() == 1 && other.words[0].is_empty() {
            return self.clone();
        }
        let product: Vec<Slp> = self
            .words
            .iter()
            .flat_map(|a| other.words.iter().map(move |b| a.concat(b)))
            .collect();
        reduce(&product).expect("product of nonempty languages")
    }

    pub fn union(&self, other: &Rep) -> Rep {
        let all: Vec<Slp> = self.words.iter().chain(&other.words).cloned().collect();
        reduce(&all).expect("union of nonempty languages")
    }
}

/// Reduces a finite language to an equivalent subset of at most three words.
///
/// Ties are broken by first occurrence in `words`; the output keeps input
/// order.
pub fn reduce(words: &[Slp]) -> Result<Rep, RepError> {
    let mut distinct: Vec<Slp> = Vec::with_capacity(words.len());
    for w in words {
        if !distinct.iter().any(|d| d.equals(w)) {
            distinct.push(w.clone());
        }
    }
    let Some(first) = distinct.first() else {
        return Err(RepError::EmptyInput);
    };
    if distinct.len() == 1 {
        return Ok(Rep::singleton(first.clone()));
    }

    // lcp(first, w) are all prefixes of `first`, so the shortest one is ⊓L
    // and its partner forms a witness pair.
    let (partner, u_len) = distinct[1..]
        .iter()
        .enumerate()
        .map(|(i, w)| (i + 1, first.lcp_len(w)))
        .min_by(|a, b| a.1.cmp(&b.1))
        .expect("at least two words");
    let u = first.prefix(&u_len).expect("lcp within length");

    // u ∈ L iff some word has length |u|, since u is a prefix of every word
    let Some(u_index) = distinct.iter().position(|w| *w.len() == u_len) else {
        return Ok(Rep {
            words: vec![first.clone(), distinct[partner].clone()],
            key: CanonicalKey {
                u,
                ext: Extension::Finite(Slp::empty()),
            },
        });
    };

    let suffixes: Vec<(usize, Slp)> = distinct
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != u_index)
        .map(|(i, w)| (i, w.suffix_from(&u_len).expect("u is a prefix")))
        .collect();

    // commutation is transitive on nonempty words, so comparing against the
    // first suffix decides whether every pair commutes
    let (i0, v0) = &suffixes[0];
    if suffixes[1..].iter().all(|(_, v)| v.commutes(v0)) {
        let mut idx = [u_index, *i0];
        idx.sort_unstable();
        return Ok(Rep {
            words: idx.iter().map(|&i| distinct[i].clone()).collect(),
            key: CanonicalKey {
                u,
                ext: Extension::Periodic(v0.clone()),
            },
        });
    }

    let mut best: Option<(BigUint, usize, usize, Slp)> = None;
    for a in 0..suffixes.len() {
        for b in a + 1..suffixes.len() {
            let omega = suffixes[a]
                .1
                .omega_lcp(&suffixes[b].1)
                .expect("suffixes are nonempty");
            if let OmegaLcp::Finite(w) = omega {
                if best.as_ref().map_or(true, |(len, ..)| w.len() < len) {
                    best = Some((w.len().clone(), a, b, w));
                }
            }
        }
    }
    let (_, a, b, w) = best.expect("some pair does not commute");
    let mut idx = [u_index, suffixes[a].0, suffixes[b].0];
    idx.sort_unstable();
    Ok(Rep {
        words: idx.iter().map(|&i| distinct[i].clone()).collect(),
        key: CanonicalKey {
            u,
            ext: Extension::Finite(w),
        },
    })
}

pub fn key_of(r: &Rep) -> &CanonicalKey {
    r.key()
}

pub fn equivalent(r1: &Rep, r2: &Rep) -> bool {
    r1.equivalent(r2)
}

pub fn concat_reps(r1: &Rep, r2: &Rep) -> Rep {
    r1.concat(r2)
}

pub fn union_reps(r1: &Rep, r2: &Rep) -> Rep {
    r1.union(r2)
}
