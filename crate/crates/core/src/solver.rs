//! Round-robin worklist fixpoint computing the lcp of a context-free
//! language.
//!
//! Each nonterminal `A` carries a [`Rep`] equivalent to a growing sublanguage
//! of `L(A)`. A sweep recomputes every dirty nonterminal once from its rules;
//! a nonterminal becomes dirty when one of the nonterminals on its right-hand
//! sides changes its canonical key. Derivation trees of height `4N` already
//! determine the lcp of `L(G)`, so at most `4N` sweeps are run.

use std::collections::HashMap;

use thiserror::Error;

use crate::grammar::{Grammar, GrammarError, Symbol};
use crate::rep::{reduce, CanonicalKey, Rep};
use crate::slp::Slp;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error(transparent)]
    Grammar(#[from] GrammarError),
    #[error("internal error: start symbol `{0}` never received a value")]
    Unassigned(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonterminalStats {
    pub name: String,
    pub recomputed: usize,
    pub updated: usize,
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub lcp: Slp,
    pub sweeps_used: usize,
    /// Nonterminal count of the normalized grammar (0 on the ε shortcut).
    pub nonterminal_count: usize,
    /// `true` when the worklist emptied before the sweep cap.
    pub converged: bool,
    /// Final canonical key per nonterminal of the normalized grammar.
    pub keys: Vec<(String, CanonicalKey)>,
    pub stats: Vec<NonterminalStats>,
    /// Two words of the language whose lcp is `lcp`.
    pub witness: (Slp, Slp),
    /// lcp of the start symbol's representative after each sweep.
    pub trace: Vec<Option<Slp>>,
    /// The grammar actually iterated on; `None` when ε ∈ L short-circuits.
    pub normalized: Option<Grammar>,
}

impl SolveReport {
    pub fn sweep_cap(&self) -> usize {
        4 * self.nonterminal_count
    }

    pub fn stats_for(&self, name: &str) -> Option<&NonterminalStats> {
        self.stats.iter().find(|s| s.name == name)
    }
}

enum Sym {
    Lit(Rep),
    Var(usize),
}

struct Indexed {
    names: Vec<String>,
    rules: Vec<Vec<Vec<Sym>>>,
    dependents: Vec<Vec<usize>>,
    start: usize,
}

impl Indexed {
    fn new(g: &Grammar) -> Indexed {
        let names: Vec<String> = g.nonterminals().to_vec();
        let index: HashMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        let mut rules: Vec<Vec<Vec<Sym>>> = (0..names.len()).map(|_| Vec::new()).collect();
        let mut dependents: Vec<Vec<usize>> = vec![Vec::new(); names.len()];
        for r in g.rules() {
            let a = index[r.lhs.as_str()];
            let rhs = r
                .rhs
                .iter()
                .map(|s| match s {
                    Symbol::Terminal(w) => Sym::Lit(Rep::singleton(Slp::literal(w))),
                    Symbol::Nonterminal(n) => {
                        let b = index[n.as_str()];
                        if !dependents[b].contains(&a) {
                            dependents[b].push(a);
                        }
                        Sym::Var(b)
                    }
                })
                .collect();
            rules[a].push(rhs);
        }
        Indexed {
            start: index[g.start()],
            names,
            rules,
            dependents,
        }
    }

    /// Dependencies before dependents, as far as cycles allow.
    fn evaluation_order(&self) -> Vec<usize> {
        let n = self.names.len();
        let mut visited = vec![false; n];
        let mut order = Vec::with_capacity(n);
        let roots = std::iter::once(self.start).chain(0..n);
        for root in roots {
            if visited[root] {
                continue;
            }
            visited[root] = true;
            let mut stack: Vec<(usize, Vec<usize>)> = vec![(root, self.deps(root))];
            while let Some((node, pending)) = stack.last_mut() {
                if let Some(next) = pending.pop() {
                    if !visited[next] {
                        visited[next] = true;
                        let deps = self.deps(next);
                        stack.push((next, deps));
                    }
                } else {
                    order.push(*node);
                    stack.pop();
                }
            }
        }
        order
    }

    fn deps(&self, a: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.rules[a]
            .iter()
            .flatten()
            .filter_map(|s| match s {
                Sym::Var(b) => Some(*b),
                Sym::Lit(_) => None,
            })
            .collect();
        out.dedup();
        out.reverse();
        out
    }

    /// Union over rules of the concatenation of their symbols' values;
    /// rules mentioning an unassigned nonterminal are skipped.
    fn evaluate(&self, a: usize, values: &[Option<Rep>]) -> Option<Rep> {
        let mut total: Option<Rep> = None;
        'rules: for rhs in &self.rules[a] {
            let mut acc: Option<Rep> = None;
            for sym in rhs {
                let part = match sym {
                    Sym::Lit(r) => r,
                    Sym::Var(b) => match &values[*b] {
                        Some(r) => r,
                        None => continue 'rules,
                    },
                };
                acc = Some(match acc {
                    None => part.clone(),
                    Some(prev) => prev.concat(part),
                });
            }
            let acc = acc.expect("normalized rules are nonempty");
            total = Some(match total {
                None => acc,
                Some(prev) => prev.union(&acc),
            });
        }
        total
    }
}

/// Longest common prefix of `L(g)`.
pub fn compute_lcp(g: &Grammar) -> Result<SolveReport, SolveError> {
    if g.is_empty() {
        return Err(GrammarError::EmptyLanguage.into());
    }
    if g.derives_epsilon() {
        return Ok(SolveReport {
            lcp: Slp::empty(),
            sweeps_used: 0,
            nonterminal_count: 0,
            converged: true,
            keys: Vec::new(),
            stats: Vec::new(),
            witness: (Slp::empty(), Slp::empty()),
            trace: Vec::new(),
            normalized: None,
        });
    }
    let normalized = g.normalize()?;
    let ix = Indexed::new(&normalized);
    let n = ix.names.len();
    let cap = 4 * n;

    let mut values: Vec<Option<Rep>> = (0..n)
        .map(|a| {
            let words: Vec<Slp> = normalized
                .terminal_only_rules(&ix.names[a])
                .map(|r| {
                    Slp::concat_all(
                        r.rhs
                            .iter()
                            .map(|s| match s {
                                Symbol::Terminal(w) => Slp::literal(w),
                                Symbol::Nonterminal(_) => unreachable!("terminal-only rule"),
                            })
                            .collect::<Vec<_>>()
                            .iter(),
                    )
                })
                .collect();
            reduce(&words).ok()
        })
        .collect();

    let mut dirty: Vec<bool> = (0..n)
        .map(|a| ix.rules[a].iter().flatten().any(|s| matches!(s, Sym::Var(_))))
        .collect();
    let mut stats: Vec<NonterminalStats> = ix
        .names
        .iter()
        .map(|name| NonterminalStats {
            name: name.clone(),
            recomputed: 0,
            updated: 0,
        })
        .collect();
    let order = ix.evaluation_order();
    let mut trace = Vec::new();
    let mut sweeps = 0;

    while dirty.iter().any(|&d| d) && sweeps < cap {
        sweeps += 1;
        for &a in &order {
            if !dirty[a] {
                continue;
            }
            dirty[a] = false;
            stats[a].recomputed += 1;
            let Some(next) = ix.evaluate(a, &values) else {
                continue;
            };
            let changed = values[a].as_ref().map_or(true, |old| !old.equivalent(&next));
            if changed {
                values[a] = Some(next);
                stats[a].updated += 1;
                for &d in &ix.dependents[a] {
                    dirty[d] = true;
                }
            }
        }
        trace.push(values[ix.start].as_ref().map(|r| r.lcp().clone()));
    }
    let converged = !dirty.iter().any(|&d| d);

    let start_rep = values[ix.start]
        .as_ref()
        .ok_or_else(|| SolveError::Unassigned(ix.names[ix.start].clone()))?;
    let lcp = start_rep
        .words()
        .iter()
        .skip(1)
        .fold(start_rep.words()[0].clone(), |acc, w| acc.lcp(w));
    let witness = start_rep.witness_pair();
    let keys = ix
        .names
        .iter()
        .zip(&values)
        .filter_map(|(name, v)| v.as_ref().map(|r| (name.clone(), r.key().clone())))
        .collect();

    Ok(SolveReport {
        lcp,
        sweeps_used: sweeps,
        nonterminal_count: n,
        converged,
        keys,
        stats,
        witness,
        trace,
        normalized: Some(normalized),
    })
}

/// Longest common suffix of `L(g)`: the lcp of the reversed grammar, with
/// the answer and witnesses reversed back. Keys, trace and the normalized
/// grammar refer to the reversed grammar.
pub fn compute_lcs(g: &Grammar) -> Result<SolveReport, SolveError> {
    let mut report = compute_lcp(&g.reverse())?;
    report.lcp = report.lcp.reversed();
    report.witness = (report.witness.0.reversed(), report.witness.1.reversed());
    Ok(report)
}
