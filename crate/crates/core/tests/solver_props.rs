mod common;

use cflcp::oracle::{enumerate_truncated, Budget};
use cflcp::{compute_lcp, compute_lcs, Grammar, Slp};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{cyk_member, oracle_lcp, random_grammar, words_up_to, GrammarShape};

const SHAPE: GrammarShape = GrammarShape {
    max_nonterminals: 4,
    max_rules: 3,
    max_rhs: 3,
    max_literal: 2,
    improper: true,
};

fn grammar(seed: u64) -> Grammar {
    random_grammar(&mut ChaCha8Rng::seed_from_u64(seed), SHAPE)
}

fn expand(w: &Slp) -> String {
    w.expand(usize::MAX).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn agrees_with_oracle(seed in any::<u64>()) {
        let g = grammar(seed);
        prop_assume!(!g.is_empty());
        let report = compute_lcp(&g).unwrap();
        let lcp = expand(&report.lcp);
        match &report.normalized {
            None => {
                prop_assert!(g.derives_epsilon());
                prop_assert_eq!(lcp.as_str(), "");
            }
            Some(n) => {
                let h = 4 * n.nonterminals().len();
                if let Some(expected) = oracle_lcp(n, h).word() {
                    prop_assert_eq!(&lcp, expected);
                }
                // never overshoots: every word at height 4N + 2 starts with it
                if let Ok(cut) = enumerate_truncated(n, h + 2, Some(lcp.len()), Budget::default()) {
                    prop_assert!(cut.iter().all(|w| *w == lcp));
                }
            }
        }
        for w in words_up_to(&g, 8) {
            prop_assert!(w.starts_with(&lcp), "{} does not start with {}", w, lcp);
        }
    }

    #[test]
    fn report_invariants(seed in any::<u64>()) {
        let g = grammar(seed);
        prop_assume!(!g.is_empty() && !g.derives_epsilon());
        let report = compute_lcp(&g).unwrap();
        let n = report.normalized.as_ref().unwrap();
        prop_assert_eq!(report.nonterminal_count, n.nonterminals().len());
        prop_assert!(report.sweeps_used <= report.sweep_cap());
        prop_assert_eq!(report.trace.len(), report.sweeps_used);
        for pair in report.trace.windows(2) {
            if let (Some(before), Some(after)) = (&pair[0], &pair[1]) {
                prop_assert!(after.is_prefix_of(before));
            }
        }
        let (w1, w2) = &report.witness;
        prop_assert!(w1.lcp(w2).equals(&report.lcp));
        for w in [w1, w2] {
            if w.len() <= &num_bigint::BigUint::from(60u32) {
                prop_assert!(cyk_member(n, &expand(w)));
            }
        }
    }

    #[test]
    fn suffix_agrees_with_reversed_oracle(seed in any::<u64>()) {
        let g = grammar(seed);
        prop_assume!(!g.is_empty() && !g.derives_epsilon());
        let report = compute_lcs(&g).unwrap();
        let n = report.normalized.as_ref().unwrap();
        if let Some(expected) = oracle_lcp(n, 4 * n.nonterminals().len()).word() {
            let expected: String = expected.chars().rev().collect();
            prop_assert_eq!(expand(&report.lcp), expected);
        }
    }
}
