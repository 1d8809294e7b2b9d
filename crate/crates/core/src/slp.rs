//! Straight-line programs: words of possibly exponential length kept as an
//! immutable, hash-consed DAG of concatenations.
//!
//! Every node caches its length (arbitrary precision), its depth and two
//! Karp–Rabin fingerprints. Equality, prefix tests and lcp are answered from
//! the fingerprints without ever expanding the word. The fingerprint
//! parameters are fixed once per process, either from [`seed_fingerprints`]
//! or lazily from OS randomness.

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, OnceLock, Weak};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SlpError {
    #[error("index {index} out of range for word of length {length}")]
    OutOfRange { index: BigUint, length: BigUint },
    #[error("word of length {length} exceeds the expansion budget of {limit}")]
    BudgetExceeded { length: BigUint, limit: usize },
    #[error("omega power of the empty word")]
    EmptyPeriod,
    #[error("fingerprints already initialized with a different seed")]
    AlreadySeeded,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

// Two 61-bit primes: 2^61 - 1 and the next prime below it.
const MODULI: [u64; 2] = [(1 << 61) - 1, 2_305_843_009_213_693_921];

#[derive(Debug)]
struct FingerprintParams {
    seed: u64,
    bases: [u64; 2],
}

static PARAMS: OnceLock<FingerprintParams> = OnceLock::new();

fn make_params(seed: u64) -> FingerprintParams {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let bases = [
        rng.gen_range(1 << 20..MODULI[0] - 1),
        rng.gen_range(1 << 20..MODULI[1] - 1),
    ];
    FingerprintParams { seed, bases }
}

fn params() -> &'static FingerprintParams {
    PARAMS.get_or_init(|| make_params(rand::random()))
}

/// Fixes the fingerprint bases for this process. Must run before the first
/// word is built; calling it again with the same seed is a no-op.
pub fn seed_fingerprints(seed: u64) -> Result<(), SlpError> {
    let p = PARAMS.get_or_init(|| make_params(seed));
    if p.seed == seed {
        Ok(())
    } else {
        Err(SlpError::AlreadySeeded)
    }
}

/// The seed the fingerprint bases were derived from.
pub fn fingerprint_seed() -> u64 {
    params().seed
}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

#[inline]
fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 + b as u128) % m as u128) as u64
}

/// Fingerprint of a word under both moduli: (hash, base^len).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Fp {
    hash: [u64; 2],
    pow: [u64; 2],
}

impl Fp {
    const EMPTY: Fp = Fp {
        hash: [0, 0],
        pow: [1, 1],
    };

    fn letter(c: char) -> Fp {
        let p = params();
        let v = c as u64 + 1;
        Fp {
            hash: [v % MODULI[0], v % MODULI[1]],
            pow: p.bases,
        }
    }

    fn concat(self, rhs: Fp) -> Fp {
        let mut out = Fp::EMPTY;
        for i in 0..2 {
            let m = MODULI[i];
            out.hash[i] = add_mod(mul_mod(self.hash[i], rhs.pow[i], m), rhs.hash[i], m);
            out.pow[i] = mul_mod(self.pow[i], rhs.pow[i], m);
        }
        out
    }
}

enum Kind {
    Empty,
    Leaf(char),
    Cat(Slp, Slp),
}

struct Node {
    id: u64,
    kind: Kind,
    len: BigUint,
    depth: u32,
    fp: Fp,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum ConsKey {
    Leaf(char),
    Cat(u64, u64),
}

struct ConsTable {
    map: HashMap<ConsKey, Weak<Node>>,
    sweep_at: usize,
}

static NEXT_ID: AtomicU64 = AtomicU64::new(1);
static EMPTY: OnceLock<Slp> = OnceLock::new();
static CONS: OnceLock<Mutex<ConsTable>> = OnceLock::new();

fn cons_table() -> &'static Mutex<ConsTable> {
    CONS.get_or_init(|| {
        Mutex::new(ConsTable {
            map: HashMap::new(),
            sweep_at: 1024,
        })
    })
}

fn intern(key: ConsKey, build: impl FnOnce(u64) -> Node) -> Slp {
    let mut table = cons_table().lock().unwrap_or_else(|e| e.into_inner());
    if let Some(node) = table.map.get(&key).and_then(Weak::upgrade) {
        return Slp(node);
    }
    let node = Arc::new(build(NEXT_ID.fetch_add(1, Ordering::Relaxed)));
    table.map.insert(key, Arc::downgrade(&node));
    if table.map.len() >= table.sweep_at {
        table.map.retain(|_, w| w.strong_count() > 0);
        table.sweep_at = (table.map.len() * 2).max(1024);
    }
    Slp(node)
}

/// A word represented as a straight-line program.
///
/// Cloning is an `Arc` bump. `PartialEq` is word equality (fingerprint based),
/// not structural identity.
#[derive(Clone)]
pub struct Slp(Arc<Node>);

impl Slp {
    pub fn empty() -> Slp {
        EMPTY
            .get_or_init(|| {
                Slp(Arc::new(Node {
                    id: 0,
                    kind: Kind::Empty,
                    len: BigUint::zero(),
                    depth: 0,
                    fp: Fp::EMPTY,
                }))
            })
            .clone()
    }

    pub fn leaf(c: char) -> Slp {
        intern(ConsKey::Leaf(c), |id| Node {
            id,
            kind: Kind::Leaf(c),
            len: BigUint::one(),
            depth: 1,
            fp: Fp::letter(c),
        })
    }

    /// Balanced SLP for an explicit word.
    pub fn literal(word: &str) -> Slp {
        let letters: Vec<Slp> = word.chars().map(Slp::leaf).collect();
        Self::balanced(&letters)
    }

    fn balanced(parts: &[Slp]) -> Slp {
        match parts.len() {
            0 => Slp::empty(),
            1 => parts[0].clone(),
            n => {
                let (l, r) = parts.split_at(n / 2);
                Self::balanced(l).concat(&Self::balanced(r))
            }
        }
    }

    pub fn concat(&self, other: &Slp) -> Slp {
        if self.is_empty() {
            return other.clone();
        }
        if other.is_empty() {
            return self.clone();
        }
        let (l, r) = (self.clone(), other.clone());
        intern(ConsKey::Cat(l.0.id, r.0.id), |id| Node {
            id,
            len: &l.0.len + &r.0.len,
            depth: l.0.depth.max(r.0.depth) + 1,
            fp: l.0.fp.concat(r.0.fp),
            kind: Kind::Cat(l, r),
        })
    }

    /// Concatenation of a sequence of words.
    pub fn concat_all<'a>(parts: impl IntoIterator<Item = &'a Slp>) -> Slp {
        parts
            .into_iter()
            .fold(Slp::empty(), |acc, p| acc.concat(p))
    }

    pub fn len(&self) -> &BigUint {
        &self.0.len
    }

    pub fn is_empty(&self) -> bool {
        matches!(self.0.kind, Kind::Empty)
    }

    pub fn depth(&self) -> u32 {
        self.0.depth
    }

    /// Node identity; equal ids imply equal words, not conversely.
    pub fn id(&self) -> u64 {
        self.0.id
    }

    /// Number of distinct nodes reachable from this one.
    pub fn node_count(&self) -> usize {
        self.topological().len()
    }

    pub fn char_at(&self, index: &BigUint) -> Result<char, SlpError> {
        if index >= self.len() {
            return Err(SlpError::OutOfRange {
                index: index.clone(),
                length: self.len().clone(),
            });
        }
        let mut node = self;
        let mut i = index.clone();
        loop {
            match &node.0.kind {
                Kind::Leaf(c) => return Ok(*c),
                Kind::Cat(l, r) => {
                    if i < l.0.len {
                        node = l;
                    } else {
                        i -= &l.0.len;
                        node = r;
                    }
                }
                Kind::Empty => unreachable!("index checked against length"),
            }
        }
    }

    /// The first `n` letters.
    pub fn prefix(&self, n: &BigUint) -> Result<Slp, SlpError> {
        if n > self.len() {
            return Err(SlpError::OutOfRange {
                index: n.clone(),
                length: self.len().clone(),
            });
        }
        let mut lefts: Vec<&Slp> = Vec::new();
        let mut node = self;
        let mut n = n.clone();
        let tail = loop {
            if n.is_zero() {
                break Slp::empty();
            }
            if n == node.0.len {
                break node.clone();
            }
            match &node.0.kind {
                Kind::Cat(l, r) => {
                    if n <= l.0.len {
                        node = l;
                    } else {
                        n -= &l.0.len;
                        lefts.push(l);
                        node = r;
                    }
                }
                // a leaf has length 1, so 0 < n < len is impossible
                _ => unreachable!(),
            }
        };
        Ok(lefts.into_iter().rev().fold(tail, |acc, l| l.concat(&acc)))
    }

    /// Suffix starting at offset `n`.
    pub fn suffix_from(&self, n: &BigUint) -> Result<Slp, SlpError> {
        if n > self.len() {
            return Err(SlpError::OutOfRange {
                index: n.clone(),
                length: self.len().clone(),
            });
        }
        let mut rights: Vec<&Slp> = Vec::new();
        let mut node = self;
        let mut n = n.clone();
        let head = loop {
            if n.is_zero() {
                break node.clone();
            }
            if n == node.0.len {
                break Slp::empty();
            }
            match &node.0.kind {
                Kind::Cat(l, r) => {
                    if n < l.0.len {
                        rights.push(r);
                        node = l;
                    } else {
                        n -= &l.0.len;
                        node = r;
                    }
                }
                _ => unreachable!(),
            }
        };
        Ok(rights.into_iter().rev().fold(head, |acc, r| acc.concat(r)))
    }

    fn prefix_fp(&self, n: &BigUint) -> Fp {
        let mut acc = Fp::EMPTY;
        let mut node = self;
        let mut n = n.clone();
        loop {
            if n.is_zero() {
                return acc;
            }
            if n == node.0.len {
                return acc.concat(node.0.fp);
            }
            match &node.0.kind {
                Kind::Cat(l, r) => {
                    if n <= l.0.len {
                        node = l;
                    } else {
                        n -= &l.0.len;
                        acc = acc.concat(l.0.fp);
                        node = r;
                    }
                }
                _ => unreachable!(),
            }
        }
    }

    /// Word equality (randomized, see module docs).
    pub fn equals(&self, other: &Slp) -> bool {
        self.0.id == other.0.id || (self.0.len == other.0.len && self.0.fp == other.0.fp)
    }

    /// Longest common prefix, returned as a prefix of `self`.
    pub fn lcp(&self, other: &Slp) -> Slp {
        let k = self.lcp_len(other);
        self.prefix(&k).expect("lcp length bounded by both lengths")
    }

    /// Length of the longest common prefix.
    pub fn lcp_len(&self, other: &Slp) -> BigUint {
        if self.0.id == other.0.id {
            return self.len().clone();
        }
        let m = self.len().min(other.len()).clone();
        if self.prefix_fp(&m) == other.prefix_fp(&m) {
            return m;
        }
        // invariant: prefixes of length lo agree, prefixes of length hi differ
        let mut hi = m;
        loop {
            let mut lo = BigUint::zero();
            while &hi - &lo > BigUint::one() {
                let mid: BigUint = (&lo + &hi) >> 1;
                if self.prefix_fp(&mid) == other.prefix_fp(&mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let a = self.char_at(&lo).expect("lo < min length");
            let b = other.char_at(&lo).expect("lo < min length");
            if a != b {
                return lo;
            }
            // Fingerprints collided on the length-lo prefixes: prefixes of
            // length lo+1 differ while letter lo agrees, so the true lcp is < lo.
            hi = lo;
        }
    }

    pub fn is_prefix_of(&self, other: &Slp) -> bool {
        self.len() <= other.len() && self.lcp_len(other) == *self.len()
    }

    /// `self · other == other · self`.
    pub fn commutes(&self, other: &Slp) -> bool {
        self.concat(other).equals(&other.concat(self))
    }

    /// lcp of `self^ω` and `other^ω`.
    pub fn omega_lcp(&self, other: &Slp) -> Result<OmegaLcp, SlpError> {
        if self.is_empty() || other.is_empty() {
            return Err(SlpError::EmptyPeriod);
        }
        if self.commutes(other) {
            return Ok(OmegaLcp::Infinite(self.clone()));
        }
        let uv = self.concat(other);
        let vu = other.concat(self);
        Ok(OmegaLcp::Finite(uv.lcp(&vu)))
    }

    /// The explicit word, if it has at most `limit` letters.
    pub fn expand(&self, limit: usize) -> Result<String, SlpError> {
        match self.len().to_usize() {
            Some(n) if n <= limit => {
                let mut out = String::with_capacity(n);
                let mut stack = vec![self];
                while let Some(node) = stack.pop() {
                    match &node.0.kind {
                        Kind::Empty => {}
                        Kind::Leaf(c) => out.push(*c),
                        Kind::Cat(l, r) => {
                            stack.push(r);
                            stack.push(l);
                        }
                    }
                }
                Ok(out)
            }
            _ => Err(SlpError::BudgetExceeded {
                length: self.len().clone(),
                limit,
            }),
        }
    }

    /// The letter-reversed word. Shared subterms stay shared.
    pub fn reversed(&self) -> Slp {
        let mut memo: HashMap<u64, Slp> = HashMap::new();
        for node in self.topological() {
            let rev = match &node.0.kind {
                Kind::Empty | Kind::Leaf(_) => node.clone(),
                Kind::Cat(l, r) => memo[&r.0.id].concat(&memo[&l.0.id]),
            };
            memo.insert(node.0.id, rev);
        }
        memo.remove(&self.0.id).expect("root visited")
    }

    /// Distinct reachable nodes, children before parents, left before right.
    fn topological(&self) -> Vec<Slp> {
        let mut seen = std::collections::HashSet::new();
        let mut order = Vec::new();
        let mut stack: Vec<(Slp, bool)> = vec![(self.clone(), false)];
        while let Some((node, expanded)) = stack.pop() {
            if expanded {
                order.push(node);
                continue;
            }
            if !seen.insert(node.0.id) {
                continue;
            }
            stack.push((node.clone(), true));
            if let Kind::Cat(l, r) = &node.0.kind {
                if !seen.contains(&r.0.id) {
                    stack.push((r.clone(), false));
                }
                if !seen.contains(&l.0.id) {
                    stack.push((l.clone(), false));
                }
            }
        }
        order
    }

    /// Line-oriented serialization: `n<k> = leaf '<c>'` / `n<k> = n<i> n<j>`,
    /// children before parents, closed by `root n<k>` (`root eps` for ε).
    pub fn serialize(&self) -> String {
        if self.is_empty() {
            return "root eps\n".to_string();
        }
        let mut names: HashMap<u64, usize> = HashMap::new();
        let mut out = String::new();
        for (k, node) in self.topological().into_iter().enumerate() {
            match &node.0.kind {
                Kind::Leaf(c) => out.push_str(&format!("n{k} = leaf '{}'\n", escape_char(*c))),
                Kind::Cat(l, r) => {
                    out.push_str(&format!("n{k} = n{} n{}\n", names[&l.0.id], names[&r.0.id]))
                }
                Kind::Empty => unreachable!("empty is never a child"),
            }
            names.insert(node.0.id, k);
        }
        out.push_str(&format!("root n{}\n", names[&self.0.id]));
        out
    }

    /// Parses the format written by [`Slp::serialize`].
    pub fn deserialize(text: &str) -> Result<Slp, SlpError> {
        let err = |line: usize, message: &str| SlpError::Parse {
            line,
            message: message.to_string(),
        };
        let mut defs: HashMap<&str, Slp> = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(root) = line.strip_prefix("root ") {
                let root = root.trim();
                if root == "eps" {
                    return Ok(Slp::empty());
                }
                return defs
                    .get(root)
                    .cloned()
                    .ok_or_else(|| err(line_no, "root refers to an undefined node"));
            }
            let (name, body) = line
                .split_once(" = ")
                .ok_or_else(|| err(line_no, "expected `n<k> = ...`"))?;
            let node = if let Some(lit) = body.strip_prefix("leaf ") {
                Slp::leaf(unescape_char(lit.trim()).ok_or_else(|| err(line_no, "bad leaf literal"))?)
            } else {
                let mut it = body.split_whitespace();
                let (Some(l), Some(r), None) = (it.next(), it.next(), it.next()) else {
                    return Err(err(line_no, "expected two child nodes"));
                };
                let l = defs.get(l).ok_or_else(|| err(line_no, "undefined child"))?;
                let r = defs.get(r).ok_or_else(|| err(line_no, "undefined child"))?;
                l.concat(r)
            };
            defs.insert(name, node);
        }
        Err(err(text.lines().count(), "missing `root` line"))
    }
}

fn escape_char(c: char) -> String {
    match c {
        '\'' => "\\'".into(),
        '\\' => "\\\\".into(),
        c => c.to_string(),
    }
}

fn unescape_char(lit: &str) -> Option<char> {
    let inner = lit.strip_prefix('\'')?.strip_suffix('\'')?;
    let mut chars = inner.chars();
    let c = match chars.next()? {
        '\\' => chars.next()?,
        c => c,
    };
    chars.next().is_none().then_some(c)
}

impl PartialEq for Slp {
    fn eq(&self, other: &Slp) -> bool {
        self.equals(other)
    }
}

impl Eq for Slp {}

impl Hash for Slp {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.len.hash(state);
        self.0.fp.hash[0].hash(state);
    }
}

impl From<&str> for Slp {
    fn from(s: &str) -> Slp {
        Slp::literal(s)
    }
}

/// Renders the word if it has at most `budget` letters, else `#<length>`.
pub fn render(w: &Slp, budget: usize) -> String {
    w.expand(budget)
        .unwrap_or_else(|_| format!("#{}", w.len()))
}

impl fmt::Debug for Slp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", render(self, 64))
    }
}

impl Drop for Node {
    fn drop(&mut self) {
        // Unlink long chains iteratively so dropping a deep word cannot
        // overflow the stack.
        let mut pending: Vec<Arc<Node>> = Vec::new();
        if let Kind::Cat(l, r) = std::mem::replace(&mut self.kind, Kind::Empty) {
            pending.push(l.0);
            pending.push(r.0);
        }
        while let Some(node) = pending.pop() {
            if let Ok(mut inner) = Arc::try_unwrap(node) {
                if let Kind::Cat(l, r) = std::mem::replace(&mut inner.kind, Kind::Empty) {
                    pending.push(l.0);
                    pending.push(r.0);
                }
            }
        }
    }
}

/// Result of intersecting two ω-powers.
#[derive(Clone, Debug)]
pub enum OmegaLcp {
    Finite(Slp),
    /// `period^ω`; the period is any nonempty word, not necessarily primitive.
    Infinite(Slp),
}

impl OmegaLcp {
    /// Length of a finite result; `None` for an infinite one.
    pub fn finite_len(&self) -> Option<&BigUint> {
        match self {
            OmegaLcp::Finite(w) => Some(w.len()),
            OmegaLcp::Infinite(_) => None,
        }
    }
}

impl PartialEq for OmegaLcp {
    fn eq(&self, other: &OmegaLcp) -> bool {
        match (self, other) {
            (OmegaLcp::Finite(a), OmegaLcp::Finite(b)) => a.equals(b),
            (OmegaLcp::Infinite(a), OmegaLcp::Infinite(b)) => a.commutes(b),
            _ => false,
        }
    }
}

/// `|u| + |v| - gcd(|u|, |v|)`: the Fine–Wilf threshold.
pub fn fine_wilf_bound(u: &Slp, v: &Slp) -> BigUint {
    let g = u.len().gcd(v.len());
    u.len() + v.len() - g
}
