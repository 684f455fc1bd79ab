use std::collections::BTreeSet;

use escape_core::fixpoint::{breakpoints, SUBSET_ORACLE_MAX};
use escape_core::numerics::{geometric_block_sum, interval_strictly_below, weight_sum};
use escape_core::*;
use proptest::prelude::*;

fn rational(max_num: i64, max_den: i64) -> impl Strategy<Value = Rational> {
    (-max_num..=max_num, 1..=max_den).prop_map(|(p, q)| Rational::new(p, q).unwrap())
}

/// Values concentrated around [0, 2], where g has its structure.
fn value() -> impl Strategy<Value = Rational> {
    prop_oneof![
        4 => (1i64..=64).prop_flat_map(|q| (-q / 2..=5 * q / 2, Just(q)))
            .prop_map(|(p, q)| Rational::new(p, q).unwrap()),
        1 => rational(1000, 1000),
    ]
}

fn tail() -> impl Strategy<Value = TailRule> {
    prop_oneof![
        value().prop_map(TailRule::Constant),
        Just(TailRule::Cycle),
        ((1i64..=16, 1i64..=16, any::<bool>()), rational(8, 8)).prop_map(|((p, q, neg), b)| {
            let a = Rational::new(if neg { -p } else { p }, q).unwrap();
            TailRule::Affine { a, b }
        }),
    ]
}

fn spec_with_len(max_len: usize) -> impl Strategy<Value = EnumerationSpec> {
    (prop::collection::vec(value(), 0..=max_len), tail()).prop_map(|(prefix, tail)| {
        let tail = match tail {
            TailRule::Cycle if prefix.is_empty() => TailRule::Constant(Rational::one()),
            t => t,
        };
        EnumerationSpec::new(prefix, tail).unwrap()
    })
}

fn spec() -> impl Strategy<Value = EnumerationSpec> {
    spec_with_len(8)
}

fn probe() -> impl Strategy<Value = Rational> {
    (-50i64..=250, 1i64..=100).prop_map(|(p, q)| Rational::new(p, q).unwrap())
}

fn budget() -> IterationBudget {
    IterationBudget::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn rational_display_round_trips(r in rational(1_000_000, 1_000_000)) {
        let back: Rational = r.to_string().parse().unwrap();
        prop_assert_eq!(back, r.clone());
        prop_assert!(escape_core::numerics::is_canonical(&r));
    }

    #[test]
    fn weight_sums_are_below_two_and_monotone(
        small in prop::collection::btree_set(0u64..40, 0..12),
        extra in prop::collection::btree_set(0u64..40, 0..12),
    ) {
        let big: BTreeSet<u64> = small.union(&extra).copied().collect();
        prop_assert!(weight_sum(&big) < Rational::two());
        prop_assert!(weight_sum(&small) <= weight_sum(&big));
    }

    #[test]
    fn geometric_block_partial_sums_converge(first in 0u64..20, period in 1u64..6, k in 0u64..30) {
        let closed = geometric_block_sum(first, period).unwrap();
        let partial: Rational = (0..k).map(|j| Rational::dyadic(first + j * period)).sum();
        let remainder = &closed - &partial;
        prop_assert!(!remainder.is_negative());
        prop_assert!(remainder <= Rational::dyadic(first + k * period) * Rational::two());
    }

    #[test]
    fn interval_comparison_only_sharpens(
        lo in probe(), width in 0i64..100, shrink_lo in 0i64..100, shrink_hi in 0i64..100, x in probe(),
    ) {
        let w = Rational::new(width, 50).unwrap();
        let outer = RatInterval::new(lo.clone(), &lo + &w).unwrap();
        let a = &lo + &w * Rational::new(shrink_lo, 200).unwrap();
        let b = outer.hi() - &w * Rational::new(shrink_hi, 200).unwrap();
        let inner = if a <= b { RatInterval::new(a, b).unwrap() } else { RatInterval::point(lo.clone()) };
        prop_assert!(outer.contains_interval(&inner));
        let coarse = interval_strictly_below(&outer, &x);
        let fine = interval_strictly_below(&inner, &x);
        prop_assert!(fine.refines(coarse));
    }

    #[test]
    fn value_at_is_total(s in spec(), n in 0u64..10_000) {
        let v = s.value_at(n);
        if (n as usize) < s.prefix().len() {
            prop_assert_eq!(&v, &s.prefix()[n as usize]);
        }
    }

    #[test]
    fn eligibility_is_monotone(s in spec(), x in probe(), y in probe()) {
        let (x, y) = if x <= y { (x, y) } else { (y, x) };
        prop_assert!(s.eligible_prefix_indices(&x).is_subset(&s.eligible_prefix_indices(&y)));
        prop_assert!(s.tail_weight_sum(&x) <= s.tail_weight_sum(&y));
    }

    #[test]
    fn closed_form_tail_matches_truncation(s in spec(), x in probe(), k in 0u64..80) {
        let len = s.tail_start();
        let truncated: Rational = (len..len + k)
            .filter(|&n| s.value_at(n) < x)
            .map(Rational::dyadic)
            .sum();
        let closed = s.tail_weight_sum(&x);
        prop_assert!(closed >= truncated);
        prop_assert!(&closed - &truncated <= Rational::tail_from(len + k));
    }

    #[test]
    fn tail_hits_matches_scan(s in spec(), n in 0u64..200, nudge in (-1i64..=1)) {
        let len = s.tail_start();
        let v = s.value_at(len + n) + Rational::new(nudge, 7).unwrap();
        let horizon = len + 4 * len + 64 + 200;
        let scanned = (len..=horizon).any(|m| s.value_at(m) == v);
        match s.tail() {
            TailRule::Constant(_) | TailRule::Cycle => prop_assert_eq!(s.tail_hits(&v), scanned),
            TailRule::Affine { a, b } => {
                let solved = &(&v - b) / a;
                let in_range = solved.to_natural().is_some_and(|m| m <= horizon);
                if in_range || solved < Rational::from_integer(len) {
                    prop_assert_eq!(s.tail_hits(&v), scanned);
                }
            }
        }
    }

    #[test]
    fn g_is_monotone_and_bounded(s in spec(), x in probe(), y in probe()) {
        let (x, y) = if x <= y { (x, y) } else { (y, x) };
        let gx = g_exact(&s, &x);
        let gy = g_exact(&s, &y);
        prop_assert!(gx <= gy);
        prop_assert!(!gx.is_negative() && gy <= Rational::two());
        prop_assert!(!g_exact(&s, &Rational::zero()).is_negative());
    }

    #[test]
    fn jump_lemma(s in spec(), n0 in 0u64..24, below in 0i64..40, above in 1i64..40) {
        let v = s.value_at(n0);
        let x = &v - Rational::new(below, 16).unwrap();
        let y = &v + Rational::new(above, 16).unwrap();
        prop_assert!(g_exact(&s, &y) >= g_exact(&s, &x) + Rational::dyadic(n0));
    }

    #[test]
    fn g_bounds_are_sound(s in spec(), x in probe(), n_known in 1u64..12, e in 1i64..1000, j in 0i64..20) {
        let ienum = intervalize(&s, Rational::new(j, 100).unwrap()).unwrap();
        let eps = Rational::new(e, 1000).unwrap();
        let r = g_bounds(&ienum, n_known, &eps, &x).unwrap();
        let g = g_exact(&s, &x);
        prop_assert!(r.lower <= g && g <= r.upper);
        prop_assert_eq!(&r.upper - &r.lower, weight_sum(&r.undecided) + &r.tail_allowance);
    }

    #[test]
    fn gfp_is_greatest_and_fixed(s in spec(), probes in prop::collection::vec(1i64..=1000, 64)) {
        let (x0, trace) = gfp_descend(&s, budget()).unwrap();
        prop_assert_eq!(g_exact(&s, &x0), x0.clone());
        prop_assert!(!x0.is_negative() && x0 <= Rational::two());
        prop_assert!(trace.terminated);
        prop_assert!(trace.iterates.iter().all(|z| z >= &x0));
        prop_assert!(trace.iterates.windows(2).rev().skip(1).all(|w| w[0] > w[1]));
        let gap = Rational::two() - &x0;
        for p in probes {
            let y = &x0 + &gap * Rational::new(p, 1000).unwrap();
            if y > x0 {
                prop_assert!(y > g_exact(&s, &y), "postfixpoint {} above x0 {}", y, x0);
            }
        }
    }

    #[test]
    fn three_routes_agree(s in spec_with_len(12)) {
        let (x0, _) = gfp_descend(&s, budget()).unwrap();
        prop_assert_eq!(sup_postfix_oracle(&s), x0.clone());
        prop_assert_eq!(subset_fixpoint_oracle(&s, SUBSET_ORACLE_MAX).unwrap(), x0);
    }

    #[test]
    fn breakpoints_lie_in_range_and_are_values(s in spec()) {
        for b in breakpoints(&s) {
            prop_assert!(!b.is_negative() && b <= Rational::two());
        }
    }

    #[test]
    fn certificates_never_report_equality(s in spec()) {
        let cert = compute_escape(&s, budget()).unwrap();
        prop_assert_eq!(&cert.fixpoint_witness, &cert.x0);
        prop_assert!(cert.oracle_agreement);
        for n in 0..(s.tail_start() + 64) {
            prop_assert_ne!(s.value_at(n), cert.x0.clone());
        }
        prop_assert!(cert.verdicts.iter().all(|v| v.gap.is_positive()));
    }

    #[test]
    fn adjoin_strictly_raises_the_gfp(prefix in prop::collection::vec(value(), 0..8), c in value()) {
        let s = EnumerationSpec::new(prefix, TailRule::Constant(c)).unwrap();
        match adjoin_escape_demo(&s, budget()) {
            Ok(demo) => {
                prop_assert!(demo.new_x0 >= &demo.x0 + &demo.weight);
                let cert = compute_escape(&demo.extended, budget()).unwrap();
                prop_assert_eq!(cert.x0, demo.new_x0);
            }
            Err(EscapeError::DemoNotApplicable(_)) => {
                let (x0, _) = gfp_descend(&s, budget()).unwrap();
                let TailRule::Constant(c) = s.tail() else { unreachable!() };
                prop_assert!(c < &(x0 + Rational::dyadic(s.tail_start())));
            }
            Err(e) => prop_assert!(false, "unexpected error {}", e),
        }
    }

    #[test]
    fn enclosures_are_sound_and_narrow(s in spec(), j in 0i64..10) {
        let ienum = intervalize(&s, Rational::new(j, 100).unwrap()).unwrap();
        let (x0, _) = gfp_descend(&s, budget()).unwrap();
        let epsilons = ["1/10", "1/100", "1/10000"].map(|e| e.parse::<Rational>().unwrap());
        let mut previous_row: Option<Vec<RatInterval>> = None;
        for n_known in [1u64, 2, 4, 8, 16] {
            let row: Vec<RatInterval> = epsilons
                .iter()
                .map(|eps| enclose_escape(&ienum, n_known, eps, budget()).unwrap().interval)
                .collect();
            for pair in row.windows(2) {
                prop_assert!(pair[0].contains_interval(&pair[1]));
            }
            for enc in &row {
                prop_assert!(enc.contains(&x0), "{} misses {}", enc, x0);
            }
            if let Some(prev) = &previous_row {
                for (wide, narrow) in prev.iter().zip(&row) {
                    prop_assert!(wide.contains_interval(narrow));
                }
            }
            previous_row = Some(row);
        }
    }
}
