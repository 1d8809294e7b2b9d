mod common;

use cflcp::slp::{fine_wilf_bound, OmegaLcp};
use cflcp::Slp;
use num_bigint::BigUint;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{explicit_lcp, periodic_pair, random_shape, random_slp, related_slp};

fn word(max: usize) -> impl Strategy<Value = String> {
    proptest::collection::vec(prop_oneof![Just('a'), Just('b')], 0..=max).prop_map(|v| v.into_iter().collect())
}

fn nonempty(max: usize) -> impl Strategy<Value = String> {
    proptest::collection::vec(prop_oneof![Just('a'), Just('b')], 1..=max).prop_map(|v| v.into_iter().collect())
}

/// lcp of u^ω and v^ω computed on explicit strings long enough to decide it.
fn explicit_omega(u: &str, v: &str) -> Option<String> {
    let n = 2 * (u.len() + v.len()) + 2;
    let uu: String = u.chars().cycle().take(n).collect();
    let vv: String = v.chars().cycle().take(n).collect();
    let l = explicit_lcp(&uu, &vv);
    (l.len() < n).then_some(l)
}

proptest! {
    #[test]
    fn operations_match_explicit_strings(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (x, wx) = random_slp(&mut rng, 2000);
        let (y, wy) = related_slp(&mut rng, &wx, 2000);
        prop_assert_eq!(x.expand(usize::MAX).unwrap(), wx.clone());
        prop_assert_eq!(y.expand(usize::MAX).unwrap(), wy.clone());
        prop_assert_eq!(x.len(), &BigUint::from(wx.len()));
        let l = x.lcp(&y);
        prop_assert_eq!(l.expand(usize::MAX).unwrap(), explicit_lcp(&wx, &wy));
        prop_assert_eq!(x.equals(&y), wx == wy);
        prop_assert_eq!(x.is_prefix_of(&y), wy.starts_with(&wx));
        let xy = x.concat(&y);
        prop_assert_eq!(xy.expand(usize::MAX).unwrap(), format!("{wx}{wy}"));
        prop_assert_eq!(x.reversed().expand(usize::MAX).unwrap(), wx.chars().rev().collect::<String>());
        let back = Slp::deserialize(&xy.serialize()).unwrap();
        prop_assert!(back.equals(&xy));
        for k in [0, wx.len() / 3, wx.len() / 2, wx.len()] {
            let kb = BigUint::from(k);
            prop_assert_eq!(x.prefix(&kb).unwrap().expand(usize::MAX).unwrap(), wx[..k].to_string());
            prop_assert_eq!(x.suffix_from(&kb).unwrap().expand(usize::MAX).unwrap(), wx[k..].to_string());
            if k < wx.len() {
                prop_assert_eq!(x.char_at(&kb).unwrap(), wx.as_bytes()[k] as char);
            }
        }
    }

    #[test]
    fn lcp_is_maximal(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (x, wx) = random_slp(&mut rng, 500);
        let (y, wy) = related_slp(&mut rng, &wx, 500);
        let l = x.lcp(&y);
        prop_assert!(l.is_prefix_of(&x) && l.is_prefix_of(&y));
        let n = l.len().clone();
        if n < *x.len() && n < *y.len() {
            prop_assert_ne!(x.char_at(&n).unwrap(), y.char_at(&n).unwrap());
        }
        let _ = wy;
    }

    #[test]
    fn shape_does_not_matter(w in word(64), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_shape(&mut rng, &w);
        let b = Slp::literal(&w);
        prop_assert!(a.equals(&b));
        prop_assert_eq!(a.lcp(&b).len().clone(), BigUint::from(w.len()));
    }

    #[test]
    fn fine_wilf(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (u, v) = periodic_pair(&mut rng, 30);
        let (su, sv) = (Slp::literal(&u), Slp::literal(&v));
        let bound = fine_wilf_bound(&su, &sv);
        let explicit = explicit_omega(&u, &v);
        match explicit {
            None => prop_assert!(su.commutes(&sv)),
            Some(l) => {
                prop_assert!(!su.commutes(&sv));
                prop_assert!(BigUint::from(l.len()) < bound);
            }
        }
        prop_assert_eq!(su.commutes(&sv), format!("{u}{v}") == format!("{v}{u}"));
    }

    #[test]
    fn omega_lcp_matches_explicit(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (u, v) = periodic_pair(&mut rng, 30);
        let got = Slp::literal(&u).omega_lcp(&Slp::literal(&v)).unwrap();
        match (explicit_omega(&u, &v), got) {
            (None, OmegaLcp::Infinite(p)) => {
                prop_assert!(p.commutes(&Slp::literal(&u)));
            }
            (Some(l), OmegaLcp::Finite(w)) => {
                prop_assert_eq!(w.expand(usize::MAX).unwrap(), l.clone());
                prop_assert_eq!(l, explicit_lcp(&format!("{u}{v}"), &format!("{v}{u}")));
            }
            (e, g) => prop_assert!(false, "explicit {:?} vs {:?}", e, g),
        }
    }

    #[test]
    fn powers_against_a_suffix(y in nonempty(5), w in word(8)) {
        // lcp{ y^i w : i <= 6 } = lcp(w, yw)
        let words: Vec<String> = (0..=6).map(|i| format!("{}{w}", y.repeat(i))).collect();
        let naive = cflcp::oracle::naive_lcp(&words).unwrap();
        let (sy, sw) = (Slp::literal(&y), Slp::literal(&w));
        prop_assert_eq!(sw.lcp(&sy.concat(&sw)).expand(usize::MAX).unwrap(), naive);
    }

    #[test]
    fn power_lcp_is_proper_unless_prefix(y in nonempty(5), w in word(10)) {
        let (sy, sw) = (Slp::literal(&y), Slp::literal(&w));
        let yw = sy.concat(&sw);
        if !sw.is_prefix_of(&yw) {
            prop_assert!(sw.lcp_len(&yw) < *sw.len());
        }
    }

    #[test]
    fn two_pumps_against_a_suffix(x in word(4), y in nonempty(4), w in word(8)) {
        // lcp{ x y^i w } over i <= 6 equals the lcp over i <= 2
        let all: Vec<String> = (0..=6).map(|i| format!("{x}{}{w}", y.repeat(i))).collect();
        let few: Vec<String> = (0..=2).map(|i| format!("{x}{}{w}", y.repeat(i))).collect();
        prop_assert_eq!(cflcp::oracle::naive_lcp(&all).unwrap(), cflcp::oracle::naive_lcp(&few).unwrap());
    }
}
