#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap, HashSet};

use cflcp::{Grammar, Rule, Slp, Symbol};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn random_word<R: Rng>(rng: &mut R, alphabet: &[char], max_len: usize) -> String {
    let n = rng.gen_range(0..=max_len);
    (0..n).map(|_| *alphabet.choose(rng).unwrap()).collect()
}

pub fn nonempty_word<R: Rng>(rng: &mut R, alphabet: &[char], max_len: usize) -> String {
    let n = rng.gen_range(1..=max_len);
    (0..n).map(|_| *alphabet.choose(rng).unwrap()).collect()
}

/// Pairs of words biased towards sharing a period, so commuting and
/// near-commuting cases show up often.
pub fn periodic_pair<R: Rng>(rng: &mut R, max_len: usize) -> (String, String) {
    match rng.gen_range(0..3) {
        0 => (nonempty_word(rng, &['a', 'b'], max_len), nonempty_word(rng, &['a', 'b'], max_len)),
        1 => {
            let root = nonempty_word(rng, &['a', 'b'], 5);
            let u = root.repeat(rng.gen_range(1..=(max_len / root.len()).max(1)));
            let v = root.repeat(rng.gen_range(1..=(max_len / root.len()).max(1)));
            (u, v)
        }
        _ => {
            // a power of a root, perturbed in its last letter or truncated
            let root = nonempty_word(rng, &['a', 'b'], 5);
            let u = root.repeat(rng.gen_range(1..=(max_len / root.len()).max(1)));
            let mut v: String = root.repeat(max_len / root.len() + 1).chars().take(rng.gen_range(1..=max_len)).collect();
            if rng.gen_bool(0.5) {
                let last = v.pop().unwrap();
                v.push(if last == 'a' { 'b' } else { 'a' });
            }
            (u, v)
        }
    }
}

/// Random SLP for a word of length at most `max_len`, with a random
/// concatenation shape (not the balanced `literal` shape).
pub fn random_shape<R: Rng>(rng: &mut R, word: &str) -> Slp {
    let chars: Vec<char> = word.chars().collect();
    fn build<R: Rng>(rng: &mut R, chars: &[char]) -> Slp {
        match chars.len() {
            0 => Slp::empty(),
            1 => Slp::leaf(chars[0]),
            n if n <= 8 || rng.gen_bool(0.1) => {
                Slp::literal(&chars.iter().collect::<String>())
            }
            n => {
                let cut = rng.gen_range(1..n);
                build(rng, &chars[..cut]).concat(&build(rng, &chars[cut..]))
            }
        }
    }
    build(rng, &chars)
}

/// A random SLP built by repeated concatenation from small pieces, grown
/// towards a random target length of at most `max_len` letters. Returns the
/// SLP and its explicit word.
pub fn random_slp<R: Rng>(rng: &mut R, max_len: usize) -> (Slp, String) {
    let target = rng.gen_range(1..=max_len);
    let mut pool: Vec<(Slp, String)> = Vec::new();
    for _ in 0..rng.gen_range(1..6) {
        let w = nonempty_word(rng, &['a', 'b'], 6);
        pool.push((Slp::literal(&w), w));
    }
    let mut longest = 0;
    for _ in 0..200 {
        let (a, wa) = if rng.gen_bool(0.5) {
            pool[longest].clone()
        } else {
            pool.choose(rng).unwrap().clone()
        };
        let (b, wb) = pool.choose(rng).unwrap().clone();
        if wa.len() + wb.len() > target {
            if pool[longest].1.len() * 2 > target {
                break;
            }
            continue;
        }
        pool.push((a.concat(&b), wa + &wb));
        if pool.last().unwrap().1.len() > pool[longest].1.len() {
            longest = pool.len() - 1;
        }
    }
    pool.swap_remove(longest)
}

/// A second SLP related to `w`: same word in a new shape, a prefix plus a
/// random tail, or an unrelated word.
pub fn related_slp<R: Rng>(rng: &mut R, w: &str, max_len: usize) -> (Slp, String) {
    match rng.gen_range(0..4) {
        0 => (random_shape(rng, w), w.to_string()),
        1 | 2 => {
            let k = rng.gen_range(0..=w.len());
            let tail = random_word(rng, &['a', 'b'], 12);
            let mut out = w[..k].to_string();
            out.push_str(&tail);
            out.truncate(max_len);
            (random_shape(rng, &out), out)
        }
        _ => random_slp(rng, max_len),
    }
}

pub fn explicit_lcp(a: &str, b: &str) -> String {
    a.chars().zip(b.chars()).take_while(|(x, y)| x == y).map(|(x, _)| x).collect()
}

/// All words of `L(g)` with at most `max_len` letters, by least fixpoint on
/// length-bounded sets. Independent of derivation heights and normal forms.
pub fn words_up_to(g: &Grammar, max_len: usize) -> BTreeSet<String> {
    let mut sets: HashMap<&str, HashSet<String>> = g.nonterminals().iter().map(|n| (n.as_str(), HashSet::new())).collect();
    loop {
        let mut changed = false;
        for r in g.rules() {
            let mut partial: HashSet<String> = HashSet::from([String::new()]);
            for s in &r.rhs {
                let mut grown = HashSet::new();
                for p in &partial {
                    match s {
                        Symbol::Terminal(t) => {
                            let w = format!("{p}{t}");
                            if w.chars().count() <= max_len {
                                grown.insert(w);
                            }
                        }
                        Symbol::Nonterminal(b) => {
                            for q in &sets[b.as_str()] {
                                let w = format!("{p}{q}");
                                if w.chars().count() <= max_len {
                                    grown.insert(w);
                                }
                            }
                        }
                    }
                }
                partial = grown;
            }
            let target = sets.get_mut(r.lhs.as_str()).unwrap();
            for w in partial {
                changed |= target.insert(w);
            }
        }
        if !changed {
            return sets[g.start()].iter().cloned().collect();
        }
    }
}

/// CYK-style membership for proper grammars (no ε-rules, no unit rules);
/// terminals may be multi-letter literals and right-hand sides any length.
pub fn cyk_member(g: &Grammar, word: &str) -> bool {
    assert!(g.is_proper());
    let w: Vec<char> = word.chars().collect();
    let n = w.len();
    if n == 0 {
        return false;
    }
    let names = g.nonterminals();
    let idx: HashMap<&str, usize> = names.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    // chart[i][j][A]: A derives w[i..j]
    let mut chart = vec![vec![vec![false; names.len()]; n + 1]; n + 1];
    fn sym_derives(
        s: &Symbol,
        i: usize,
        j: usize,
        w: &[char],
        chart: &[Vec<Vec<bool>>],
        idx: &HashMap<&str, usize>,
    ) -> bool {
        match s {
            Symbol::Terminal(t) => {
                let t: Vec<char> = t.chars().collect();
                j - i == t.len() && w[i..j] == t[..]
            }
            Symbol::Nonterminal(b) => chart[i][j][idx[b.as_str()]],
        }
    }
    fn seq_derives(
        rhs: &[Symbol],
        i: usize,
        j: usize,
        w: &[char],
        chart: &[Vec<Vec<bool>>],
        idx: &HashMap<&str, usize>,
    ) -> bool {
        match rhs {
            [] => i == j,
            [s] => i < j && sym_derives(s, i, j, w, chart, idx),
            [s, rest @ ..] => (i + 1..j)
                .any(|k| sym_derives(s, i, k, w, chart, idx) && seq_derives(rest, k, j, w, chart, idx)),
        }
    }
    for len in 1..=n {
        for i in 0..=n - len {
            let j = i + len;
            for r in g.rules() {
                let a = idx[r.lhs.as_str()];
                if !chart[i][j][a] && seq_derives(&r.rhs, i, j, &w, &chart, &idx) {
                    chart[i][j][a] = true;
                }
            }
        }
    }
    chart[0][n][idx[g.start()]]
}

#[derive(Clone, Copy)]
pub struct GrammarShape {
    pub max_nonterminals: usize,
    pub max_rules: usize,
    pub max_rhs: usize,
    pub max_literal: usize,
    /// Allow ε-rules and unit rules.
    pub improper: bool,
}

/// Random grammar over {a, b}; every nonterminal gets at least one rule.
/// The result may have an empty language.
pub fn random_grammar<R: Rng>(rng: &mut R, shape: GrammarShape) -> Grammar {
    let k = rng.gen_range(1..=shape.max_nonterminals);
    let names: Vec<String> = ["S", "A", "B", "C", "D", "E"][..k].iter().map(|s| s.to_string()).collect();
    let mut rules = Vec::new();
    for name in &names {
        for _ in 0..rng.gen_range(1..=shape.max_rules) {
            let min = if shape.improper { 0 } else { 1 };
            let len = rng.gen_range(min..=shape.max_rhs);
            let mut rhs: Vec<Symbol> = (0..len)
                .map(|_| {
                    if rng.gen_bool(0.5) {
                        Symbol::Nonterminal(names.choose(rng).unwrap().clone())
                    } else {
                        Symbol::Terminal(nonempty_word(rng, &['a', 'b'], shape.max_literal))
                    }
                })
                .collect();
            if !shape.improper && rhs.len() == 1 && matches!(rhs[0], Symbol::Nonterminal(_)) {
                rhs[0] = Symbol::Terminal(nonempty_word(rng, &['a', 'b'], shape.max_literal));
            }
            rules.push(Rule::new(name, rhs));
        }
    }
    Grammar::new(rules, "S").unwrap()
}

pub enum OracleLcp {
    /// From the full height-bounded word set.
    Exact(String),
    /// From the word set cut to the shortest word's length.
    Truncated(String),
    OverBudget,
}

impl OracleLcp {
    pub fn word(&self) -> Option<&str> {
        match self {
            OracleLcp::Exact(w) | OracleLcp::Truncated(w) => Some(w),
            OracleLcp::OverBudget => None,
        }
    }
}

/// lcp of all words of height at most `height`, exact enumeration first.
pub fn oracle_lcp(g: &Grammar, height: usize) -> OracleLcp {
    use cflcp::oracle::{enumerate_bounded, lcp_bounded, naive_lcp, Budget};
    if let Ok(words) = enumerate_bounded(g, height, Budget::default()) {
        return OracleLcp::Exact(naive_lcp(&words).expect("nonempty language"));
    }
    match lcp_bounded(g, height, Budget::default()) {
        Ok(w) => OracleLcp::Truncated(w),
        Err(_) => OracleLcp::OverBudget,
    }
}
