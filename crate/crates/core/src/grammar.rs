//! Context-free grammars: the text format, validation, and the normal forms
//! the solver needs (proper, then binarized).
//!
//! Format, one rule per line:
//!
//! ```text
//! # comment
//! start: S
//! S -> A 'ababaac'
//! A -> 'ab' A 'abaab' | 'ab' A 'abaac' | eps
//! ```
//!
//! Terminal literals are single-quoted (`\'` and `\\` escape), `''` and `eps`
//! denote the empty word, and an empty alternative is also ε.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GrammarError {
    #[error("empty input: no rules")]
    EmptyInput,
    #[error("{line}:{column}: syntax error: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{line}:{column}: undefined nonterminal `{name}`")]
    UndefinedNonterminal {
        name: String,
        line: usize,
        column: usize,
    },
    #[error("undefined start symbol `{0}`")]
    UndefinedStart(String),
    #[error("the language contains no nonempty word")]
    EmptyLanguage,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    Terminal(String),
    Nonterminal(String),
}

impl Symbol {
    pub fn t(word: &str) -> Symbol {
        Symbol::Terminal(word.to_string())
    }

    pub fn nt(name: &str) -> Symbol {
        Symbol::Nonterminal(name.to_string())
    }

    pub fn as_nonterminal(&self) -> Option<&str> {
        match self {
            Symbol::Nonterminal(n) => Some(n),
            Symbol::Terminal(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rule {
    pub lhs: String,
    pub rhs: Vec<Symbol>,
}

impl Rule {
    pub fn new(lhs: &str, rhs: Vec<Symbol>) -> Rule {
        Rule {
            lhs: lhs.to_string(),
            rhs,
        }
    }

    fn nonterminals(&self) -> impl Iterator<Item = &str> {
        self.rhs.iter().filter_map(Symbol::as_nonterminal)
    }

    fn is_terminal_only(&self) -> bool {
        self.rhs.iter().all(|s| matches!(s, Symbol::Terminal(_)))
    }
}

/// A validated context-free grammar. Nonterminals are listed in order of
/// first appearance as a left-hand side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grammar {
    terminals: BTreeSet<char>,
    nonterminals: Vec<String>,
    rules: Vec<Rule>,
    start: String,
}

impl Grammar {
    /// Builds a grammar, dropping empty terminal literals. Every referenced
    /// nonterminal must have at least one rule.
    pub fn new(rules: Vec<Rule>, start: &str) -> Result<Grammar, GrammarError> {
        if rules.is_empty() {
            return Err(GrammarError::EmptyInput);
        }
        let rules: Vec<Rule> = rules
            .into_iter()
            .map(|r| Rule {
                lhs: r.lhs,
                rhs: r
                    .rhs
                    .into_iter()
                    .filter(|s| !matches!(s, Symbol::Terminal(w) if w.is_empty()))
                    .collect(),
            })
            .collect();
        let mut nonterminals: Vec<String> = Vec::new();
        let mut seen = HashSet::new();
        for r in &rules {
            if seen.insert(r.lhs.clone()) {
                nonterminals.push(r.lhs.clone());
            }
        }
        for r in &rules {
            if let Some(name) = r.nonterminals().find(|n| !seen.contains(*n)) {
                return Err(GrammarError::UndefinedNonterminal {
                    name: name.to_string(),
                    line: 0,
                    column: 0,
                });
            }
        }
        if !seen.contains(start) {
            return Err(GrammarError::UndefinedStart(start.to_string()));
        }
        let terminals = rules
            .iter()
            .flat_map(|r| r.rhs.iter())
            .filter_map(|s| match s {
                Symbol::Terminal(w) => Some(w.chars()),
                Symbol::Nonterminal(_) => None,
            })
            .flatten()
            .collect();
        Ok(Grammar {
            terminals,
            nonterminals,
            rules,
            start: start.to_string(),
        })
    }

    pub fn parse(text: &str) -> Result<Grammar, GrammarError> {
        parse_grammar(text)
    }

    pub fn terminals(&self) -> &BTreeSet<char> {
        &self.terminals
    }

    pub fn nonterminals(&self) -> &[String] {
        &self.nonterminals
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn start(&self) -> &str {
        &self.start
    }

    pub fn rules_for<'a>(&'a self, lhs: &'a str) -> impl Iterator<Item = &'a Rule> + 'a {
        self.rules.iter().filter(move |r| r.lhs == lhs)
    }

    pub fn max_rhs_len(&self) -> usize {
        self.rules.iter().map(|r| r.rhs.len()).max().unwrap_or(0)
    }

    /// No ε-rules and no unit rules `A -> B`.
    pub fn is_proper(&self) -> bool {
        self.rules.iter().all(|r| {
            !r.rhs.is_empty() && !(r.rhs.len() == 1 && matches!(r.rhs[0], Symbol::Nonterminal(_)))
        })
    }

    /// Nonterminals deriving ε.
    pub fn nullable(&self) -> HashSet<String> {
        self.closure(|r, set| {
            r.rhs
                .iter()
                .all(|s| matches!(s, Symbol::Nonterminal(n) if set.contains(n)))
        })
    }

    /// Nonterminals deriving at least one terminal word.
    pub fn productive(&self) -> HashSet<String> {
        self.closure(|r, set| r.nonterminals().all(|n| set.contains(n)))
    }

    fn closure(&self, fires: impl Fn(&Rule, &HashSet<String>) -> bool) -> HashSet<String> {
        let mut set = HashSet::new();
        loop {
            let before = set.len();
            for r in &self.rules {
                if !set.contains(&r.lhs) && fires(r, &set) {
                    set.insert(r.lhs.clone());
                }
            }
            if set.len() == before {
                return set;
            }
        }
    }

    pub fn derives_epsilon(&self) -> bool {
        self.nullable().contains(&self.start)
    }

    /// True iff the language is empty.
    pub fn is_empty(&self) -> bool {
        !self.productive().contains(&self.start)
    }

    /// Drops rules mentioning unproductive nonterminals, then nonterminals
    /// unreachable from the start symbol.
    pub fn prune(&self) -> Result<Grammar, GrammarError> {
        let productive = self.productive();
        if !productive.contains(&self.start) {
            return Err(GrammarError::EmptyLanguage);
        }
        let rules: Vec<Rule> = self
            .rules
            .iter()
            .filter(|r| productive.contains(&r.lhs) && r.nonterminals().all(|n| productive.contains(n)))
            .cloned()
            .collect();
        let mut reachable: HashSet<&str> = HashSet::from([self.start.as_str()]);
        let mut stack = vec![self.start.as_str()];
        while let Some(a) = stack.pop() {
            for r in rules.iter().filter(|r| r.lhs == a) {
                for b in r.nonterminals() {
                    if reachable.insert(b) {
                        stack.push(b);
                    }
                }
            }
        }
        let rules = rules
            .iter()
            .filter(|r| reachable.contains(r.lhs.as_str()))
            .cloned()
            .collect();
        Grammar::new(rules, &self.start)
    }

    /// Equivalent proper grammar for `L(self) \ {ε}`, pruned of useless
    /// nonterminals.
    pub fn properize(&self) -> Result<Grammar, GrammarError> {
        let g = self.prune()?;
        let g = g.split_nullable_heavy_rules();
        let nullable = g.nullable();

        // ε-elimination: every way of dropping nullable occurrences
        let mut rules: Vec<Rule> = Vec::new();
        let mut seen: HashSet<Rule> = HashSet::new();
        for r in &g.rules {
            let positions: Vec<usize> = r
                .rhs
                .iter()
                .enumerate()
                .filter(|(_, s)| matches!(s, Symbol::Nonterminal(n) if nullable.contains(n)))
                .map(|(i, _)| i)
                .collect();
            for mask in 0u32..(1 << positions.len()) {
                let rhs: Vec<Symbol> = r
                    .rhs
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| {
                        positions
                            .iter()
                            .position(|p| p == i)
                            .map_or(true, |bit| mask & (1 << bit) == 0)
                    })
                    .map(|(_, s)| s.clone())
                    .collect();
                let rhs = if mask == 0 { rhs } else { merge_adjacent_terminals(rhs) };
                if rhs.is_empty() {
                    continue;
                }
                let rule = Rule {
                    lhs: r.lhs.clone(),
                    rhs,
                };
                if seen.insert(rule.clone()) {
                    rules.push(rule);
                }
            }
        }

        // unit elimination: A inherits the non-unit rules of every B with A =>* B
        let is_unit = |r: &Rule| r.rhs.len() == 1 && matches!(r.rhs[0], Symbol::Nonterminal(_));
        let mut out: Vec<Rule> = Vec::new();
        let mut seen: HashSet<Rule> = HashSet::new();
        for a in &g.nonterminals {
            let mut reach: Vec<&str> = vec![a.as_str()];
            let mut i = 0;
            while i < reach.len() {
                let b = reach[i];
                for r in rules.iter().filter(|r| r.lhs == b && is_unit(r)) {
                    let c = r.rhs[0].as_nonterminal().expect("unit rule");
                    if !reach.contains(&c) {
                        reach.push(c);
                    }
                }
                i += 1;
            }
            for b in reach {
                for r in rules.iter().filter(|r| r.lhs == b && !is_unit(r)) {
                    let rule = Rule {
                        lhs: a.clone(),
                        rhs: r.rhs.clone(),
                    };
                    if seen.insert(rule.clone()) {
                        out.push(rule);
                    }
                }
            }
        }
        if out.is_empty() {
            return Err(GrammarError::EmptyLanguage);
        }
        let g = Grammar {
            terminals: g.terminals.clone(),
            nonterminals: g.nonterminals.clone(),
            rules: out,
            start: g.start.clone(),
        };
        // rebuild so the nonterminal list matches the surviving rules
        let pruned = g.prune()?;
        Grammar::new(pruned.rules, &pruned.start)
    }

    // ε-elimination enumerates subsets of nullable occurrences; rules with
    // many of them are split first so the expansion stays small.
    fn split_nullable_heavy_rules(&self) -> Grammar {
        const MAX_NULLABLE: usize = 6;
        let nullable = self.nullable();
        let heavy = |r: &Rule| {
            r.nonterminals().filter(|n| nullable.contains(*n)).count() > MAX_NULLABLE
        };
        if !self.rules.iter().any(heavy) {
            return self.clone();
        }
        let mut fresh = FreshNames::new(&self.nonterminals);
        let mut rules = Vec::new();
        for r in &self.rules {
            if heavy(r) {
                rules.extend(split_rule(r, &mut fresh));
            } else {
                rules.push(r.clone());
            }
        }
        Grammar::new(rules, &self.start).expect("splitting preserves validity")
    }

    /// Splits every right-hand side longer than two symbols into a chain of
    /// binary rules with fresh nonterminals: `S -> x1 x2 x3` becomes
    /// `S -> x1 S_1`, `S_1 -> x2 x3`.
    pub fn binarize(&self) -> Grammar {
        if self.max_rhs_len() <= 2 {
            return self.clone();
        }
        let mut fresh = FreshNames::new(&self.nonterminals);
        let mut rules = Vec::new();
        for r in &self.rules {
            rules.extend(split_rule(r, &mut fresh));
        }
        Grammar::new(rules, &self.start).expect("binarization preserves validity")
    }

    /// The grammar of the letter-reversed language.
    pub fn reverse(&self) -> Grammar {
        let rules = self
            .rules
            .iter()
            .map(|r| Rule {
                lhs: r.lhs.clone(),
                rhs: r
                    .rhs
                    .iter()
                    .rev()
                    .map(|s| match s {
                        Symbol::Terminal(w) => Symbol::Terminal(w.chars().rev().collect()),
                        nt => nt.clone(),
                    })
                    .collect(),
            })
            .collect();
        Grammar {
            terminals: self.terminals.clone(),
            nonterminals: self.nonterminals.clone(),
            rules,
            start: self.start.clone(),
        }
    }

    /// Proper and binarized: the form the solver runs on.
    pub fn normalize(&self) -> Result<Grammar, GrammarError> {
        Ok(self.properize()?.binarize())
    }

    pub(crate) fn terminal_only_rules<'a>(&'a self, lhs: &'a str) -> impl Iterator<Item = &'a Rule> + 'a {
        self.rules_for(lhs).filter(|r| r.is_terminal_only())
    }
}

fn merge_adjacent_terminals(rhs: Vec<Symbol>) -> Vec<Symbol> {
    let mut out: Vec<Symbol> = Vec::with_capacity(rhs.len());
    for s in rhs {
        match (out.last_mut(), s) {
            (Some(Symbol::Terminal(prev)), Symbol::Terminal(w)) => prev.push_str(&w),
            (_, s) => out.push(s),
        }
    }
    out
}

struct FreshNames {
    taken: HashSet<String>,
    counters: HashMap<String, usize>,
}

impl FreshNames {
    fn new(existing: &[String]) -> FreshNames {
        FreshNames {
            taken: existing.iter().cloned().collect(),
            counters: HashMap::new(),
        }
    }

    fn next(&mut self, base: &str) -> String {
        let counter = self.counters.entry(base.to_string()).or_insert(0);
        loop {
            *counter += 1;
            let name = format!("{base}_{counter}");
            if self.taken.insert(name.clone()) {
                return name;
            }
        }
    }
}

fn split_rule(r: &Rule, fresh: &mut FreshNames) -> Vec<Rule> {
    if r.rhs.len() <= 2 {
        return vec![r.clone()];
    }
    let mut out = Vec::new();
    let mut lhs = r.lhs.clone();
    let mut rest = &r.rhs[..];
    while rest.len() > 2 {
        let next = fresh.next(&r.lhs);
        out.push(Rule {
            lhs,
            rhs: vec![rest[0].clone(), Symbol::Nonterminal(next.clone())],
        });
        lhs = next;
        rest = &rest[1..];
    }
    out.push(Rule {
        lhs,
        rhs: rest.to_vec(),
    });
    out
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Nonterminal(n) => f.write_str(n),
            Symbol::Terminal(w) => {
                f.write_str("'")?;
                for c in w.chars() {
                    match c {
                        '\'' => f.write_str("\\'")?,
                        '\\' => f.write_str("\\\\")?,
                        c => write!(f, "{c}")?,
                    }
                }
                f.write_str("'")
            }
        }
    }
}

/// Renders in the input format; `parse(g.to_string())` yields `g` back.
impl fmt::Display for Grammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "start: {}", self.start)?;
        for r in &self.rules {
            write!(f, "{} ->", r.lhs)?;
            if r.rhs.is_empty() {
                write!(f, " eps")?;
            }
            for s in &r.rhs {
                write!(f, " {s}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Ident(String),
    Literal(String),
    Arrow,
    Bar,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> GrammarError {
    GrammarError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

/// Tokens of one line with their 1-based columns; stops at `#`.
fn tokenize(line: &str, line_no: usize) -> Result<Vec<(Token, usize)>, GrammarError> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c == '#' {
            break;
        } else if c == '|' {
            out.push((Token::Bar, col));
            i += 1;
        } else if c == '-' && chars.get(i + 1) == Some(&'>') {
            out.push((Token::Arrow, col));
            i += 2;
        } else if c == '\'' {
            let mut lit = String::new();
            i += 1;
            loop {
                match chars.get(i) {
                    None => return Err(syntax(line_no, col, "unterminated terminal literal")),
                    Some('\'') => {
                        i += 1;
                        break;
                    }
                    Some('\\') => match chars.get(i + 1) {
                        Some(&e @ ('\'' | '\\')) => {
                            lit.push(e);
                            i += 2;
                        }
                        _ => return Err(syntax(line_no, i + 1, "invalid escape (use \\' or \\\\)")),
                    },
                    Some(&c) => {
                        lit.push(c);
                        i += 1;
                    }
                }
            }
            out.push((Token::Literal(lit), col));
        } else if is_ident_start(c) {
            let begin = i;
            while i < chars.len() && is_ident_char(chars[i]) {
                i += 1;
            }
            out.push((Token::Ident(chars[begin..i].iter().collect()), col));
        } else {
            return Err(syntax(line_no, col, format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

pub fn parse_grammar(text: &str) -> Result<Grammar, GrammarError> {
    let mut rules: Vec<Rule> = Vec::new();
    let mut start: Option<(String, usize, usize)> = None;
    // first use of each referenced nonterminal, for error positions
    let mut references: Vec<(String, usize, usize)> = Vec::new();

    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = line.trim_start();
        if let Some(rest) = trimmed.strip_prefix("start:") {
            let col = line.len() - trimmed.len() + 1;
            let toks = tokenize(rest, line_no)?;
            match toks.as_slice() {
                [(Token::Ident(name), c)] => {
                    if start.is_some() {
                        return Err(syntax(line_no, col, "duplicate `start:` directive"));
                    }
                    start = Some((name.clone(), line_no, col + "start:".len() + c - 1));
                }
                _ => return Err(syntax(line_no, col, "expected `start: <Ident>`")),
            }
            continue;
        }
        let toks = tokenize(line, line_no)?;
        if toks.is_empty() {
            continue;
        }
        let lhs = match &toks[0] {
            (Token::Ident(name), _) => name.clone(),
            (_, col) => return Err(syntax(line_no, *col, "expected a nonterminal on the left")),
        };
        match toks.get(1) {
            Some((Token::Arrow, _)) => {}
            Some((_, col)) => return Err(syntax(line_no, *col, "expected `->`")),
            None => return Err(syntax(line_no, line.chars().count() + 1, "expected `->`")),
        }
        let mut alt: Vec<Symbol> = Vec::new();
        for (tok, col) in &toks[2..] {
            match tok {
                Token::Bar => rules.push(Rule::new(&lhs, std::mem::take(&mut alt))),
                Token::Arrow => return Err(syntax(line_no, *col, "unexpected `->`")),
                Token::Literal(w) => alt.push(Symbol::Terminal(w.clone())),
                Token::Ident(name) if name == "eps" => {}
                Token::Ident(name) => {
                    references.push((name.clone(), line_no, *col));
                    alt.push(Symbol::Nonterminal(name.clone()));
                }
            }
        }
        rules.push(Rule::new(&lhs, alt));
    }

    if rules.is_empty() {
        return Err(GrammarError::EmptyInput);
    }
    let defined: HashSet<&str> = rules.iter().map(|r| r.lhs.as_str()).collect();
    if let Some((name, line, column)) = references.iter().find(|(n, _, _)| !defined.contains(n.as_str())) {
        return Err(GrammarError::UndefinedNonterminal {
            name: name.clone(),
            line: *line,
            column: *column,
        });
    }
    let start_name = match start {
        Some((name, line, column)) => {
            if !defined.contains(name.as_str()) {
                return Err(GrammarError::UndefinedNonterminal { name, line, column });
            }
            name
        }
        None => rules[0].lhs.clone(),
    };
    Grammar::new(rules, &start_name)
}
