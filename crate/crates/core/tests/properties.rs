use bjcomp_core::oracle::{simulate, SweepRanges};
use bjcomp_core::probability::{chunk_plan, monte_carlo_chunk, MonteCarloEstimate, OutcomeCounts};
use bjcomp_core::{
    composition_count, enumerate_legal, general_count, i_ace_set, iterate_compositions,
    monte_carlo, CardDistribution, Outcome, Query, Regime, RuleSet,
};
use proptest::prelude::*;

/// Number of m-part compositions of n with parts in [lo, hi], by dynamic programming.
fn dp_count(n: u32, m: usize, lo: u32, hi: u32) -> u64 {
    let mut ways = vec![0u64; n as usize + 1];
    ways[0] = 1;
    for _ in 0..m {
        let mut next = vec![0u64; n as usize + 1];
        for (sum, &w) in ways.iter().enumerate() {
            if w == 0 {
                continue;
            }
            for p in lo..=hi {
                let t = sum + p as usize;
                if t <= n as usize {
                    next[t] += w;
                }
            }
        }
        ways = next;
    }
    ways[n as usize]
}

proptest! {
    #[test]
    fn compositions_are_sorted_bounded_and_complete(n in 0u32..16, m in 0usize..7, lo in 1u32..4, extra in 0u32..10) {
        let hi = lo + extra;
        let items: Vec<_> = iterate_compositions(n, m, lo, hi).unwrap().collect();
        for c in &items {
            prop_assert_eq!(c.len(), m);
            prop_assert_eq!(c.sum(), n);
            prop_assert!(c.parts().iter().all(|&p| (lo..=hi).contains(&p)));
        }
        prop_assert!(items.windows(2).all(|w| w[0].parts() < w[1].parts()));
        prop_assert_eq!(items.len() as u64, dp_count(n, m, lo, hi));
    }

    #[test]
    fn composition_count_symmetry(n in 1i64..60, m in 1i64..60) {
        prop_assume!(m <= n);
        prop_assert_eq!(composition_count(m, n), composition_count(n - m + 1, n));
    }

    #[test]
    fn breakdown_identity_when_upcard_leaves_room(stand in 4u32..30, spread in 0u32..8, max_card in 2u32..14, d in 1u32..14, dw in 0u32..8, m in 1u32..12) {
        let r = RuleSet::new(stand, stand + spread, max_card).unwrap();
        let q = Query::new(d, stand + dw.min(spread), m);
        prop_assume!(q.validate(&r).is_ok() && d + 2 <= stand);
        let b = general_count(&q, &r).unwrap();
        prop_assert_eq!(b.identity_net().unwrap(), b.net);
    }

    #[test]
    fn simulation_is_deterministic_and_consistent(up in 2u32..12, cards in prop::collection::vec(1u32..11, 1..8)) {
        let r = RuleSet::default();
        let first = simulate(up, &cards, &r);
        prop_assert_eq!(&first, &simulate(up, &cards, &r));
        if let Ok(t) = first {
            prop_assert_eq!(t.counted_values.len(), cards.len());
            let last = *t.running_totals.last().unwrap();
            prop_assert_eq!(last, t.upcard_value + t.counted_values.iter().sum::<u32>());
            let before_last = &t.running_totals[..t.running_totals.len() - 1];
            prop_assert!(before_last.iter().all(|&x| x < r.stand()));
            match t.outcome {
                Outcome::Stood(total) => prop_assert!(total == last && (17..=21).contains(&total)),
                Outcome::Busted(total) => {
                    prop_assert!(total == last && total > 21);
                    prop_assert!(!t.counted_values.contains(&11) && t.upcard_value != 11);
                }
                Outcome::Incomplete => prop_assert!(last < 17),
            }
        }
    }

    #[test]
    fn chunk_merge_order_does_not_matter(up in 2u32..12, trials in 1u64..200_000, seed: u64) {
        let r = RuleSet::default();
        let cd = CardDistribution::default();
        let chunks: Vec<OutcomeCounts> = chunk_plan(trials)
            .map(|(i, n)| monte_carlo_chunk(up, &r, &cd, seed, i, n).unwrap())
            .collect();
        let mut reversed = OutcomeCounts::new(&r);
        for c in chunks.iter().rev() {
            reversed.merge(c).unwrap();
        }
        prop_assert_eq!(reversed.trials(), trials);
        prop_assert_eq!(
            MonteCarloEstimate::from_counts(&reversed).unwrap(),
            monte_carlo(up, &r, &cd, trials, seed).unwrap()
        );
    }
}

#[test]
fn enumeration_never_exceeds_unrestricted_count() {
    let r = RuleSet::default();
    for q in SweepRanges::new(2..=11, 17..=21).queries(&r).unwrap() {
        if q.gap() > 14 {
            continue;
        }
        let legal = enumerate_legal(&q, &r).unwrap().count() as u64;
        assert!(legal <= composition_count(q.cards.into(), q.gap()).unwrap(), "{q:?}");
    }
}

#[test]
fn forced_eleven_prefixes_are_never_legal_in_closed_regime() {
    let r = RuleSet::default();
    for q in SweepRanges::new(2..=10, 17..=21)
        .with_regime(Regime::Closed)
        .queries(&r)
        .unwrap()
    {
        let legal: Vec<_> = enumerate_legal(&q, &r).unwrap().collect();
        for i in 1..q.cards as usize {
            for lambda in i_ace_set(i, q.upcard, &r).unwrap() {
                let mut prefix = lambda.into_parts();
                prefix.push(1);
                assert!(
                    !legal.iter().any(|c| c.parts().starts_with(&prefix)),
                    "{q:?} yields a completion of {prefix:?}"
                );
            }
        }
    }
}

#[test]
fn forced_eleven_ace_can_be_demoted_later_in_general_regime() {
    // 3 + 2 + A(11) = 16, a ten busts it back to 16 with the ace at 1, then 1 more
    let r = RuleSet::default();
    let legal: Vec<Vec<u32>> = enumerate_legal(&Query::new(3, 17, 4), &r)
        .unwrap()
        .map(|c| c.into_parts())
        .collect();
    assert!(legal.contains(&vec![2, 1, 10, 1]));
    assert!(i_ace_set(1, 3, &r).unwrap().iter().any(|c| c.parts() == [2]));
}
