use direction_space::directions::{
    delta_pseudometric, direction_report, moves_towards_infinity, Verdict,
};
use direction_space::instances::{build_example_group, build_tree, ExampleElement, TreeAut};
use direction_space::TruncationProfile;
use proptest::prelude::*;

#[test]
fn tree_shifts_group_by_attracting_end() {
    let t = build_tree(3, 8).unwrap();
    let p = TruncationProfile::default().with_power_bound(12);
    let g = TreeAut::shift(3, 0, 1);
    let elements = vec![
        g.clone(),
        TreeAut::shift(3, 1, 2),
        g.power(2),
        TreeAut::identity(),
        g.inverse(),
    ];
    let r = direction_report(&t, &elements, &p).unwrap();
    assert_eq!(r.grouping, "ends");
    assert_eq!(r.excluded.len(), 1);
    assert_eq!(r.excluded[0].0, 3);
    assert_eq!(r.classes.len(), 3);
    assert!(r.classes.iter().any(|c| c.contains(&0) && c.contains(&2)));
    assert!(r.pairs.iter().all(|pair| pair.consistent));
}

#[test]
fn identity_does_not_move_towards_infinity() {
    let e = build_example_group(2).unwrap();
    assert!(!moves_towards_infinity(
        &e,
        &ExampleElement::alpha_power(0),
        &TruncationProfile::default()
    )
    .unwrap());
    assert!(moves_towards_infinity(
        &e,
        &ExampleElement::alpha_power(-2),
        &TruncationProfile::default()
    )
    .unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn opposite_shifts_are_at_distance_two(n in 1i64..4, m in 1i64..4, order in 2u32..4, big_n in 4usize..24) {
        let e = build_example_group(order).unwrap();
        let p = TruncationProfile::default().with_power_bound(big_n);
        let r = delta_pseudometric(&e, &ExampleElement::alpha_power(n), &ExampleElement::alpha_power(-m), &p).unwrap();
        prop_assert_eq!(r.delta, 2.0);
    }

    #[test]
    fn same_sign_shifts_are_one_class(n in 1i64..4, m in 1i64..4, sign in prop::bool::ANY) {
        let e = build_example_group(2).unwrap();
        let s = if sign { 1 } else { -1 };
        // Rows need k up to N log s(a) / log s(b), so K must cover three times N.
        let p = TruncationProfile { exponent_bound: 128, ..TruncationProfile::default() };
        let r = delta_pseudometric(&e, &ExampleElement::alpha_power(s * n), &ExampleElement::alpha_power(s * m), &p).unwrap();
        prop_assert_eq!(r.verdict, Verdict::SameClass);
        prop_assert!(r.delta <= 2.0 * r.slack);
    }
}
