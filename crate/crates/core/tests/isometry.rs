use std::collections::BTreeSet;

use direction_space::graph::Vertex;
use direction_space::instances::{build_ladder, build_tree, LadderMove, TreeAut};
use direction_space::isometry::{
    apply_power, attracting_end, brute_force_threads, classify, find_axis, same_end,
    short_lex_axis, solve_inverse_limit, translation_length, verify_axis_window, InverseSystem,
    IsometryClass,
};
use direction_space::verify::branch_swap;
use direction_space::TruncationProfile;
use proptest::prelude::*;

fn p() -> TruncationProfile {
    TruncationProfile::default()
}

#[test]
fn identity_and_rotations_are_elliptic() {
    let t = build_tree(3, 8).unwrap();
    assert_eq!(
        classify(&t, &TreeAut::identity(), &p()).unwrap().kind(),
        "Elliptic"
    );
    let r = TreeAut::rotation(&[0], vec![1, 2, 0]);
    match classify(&t, &r, &p()).unwrap() {
        IsometryClass::Elliptic { vertex, period, .. } => {
            assert_eq!((vertex, period), (Vertex::new(vec![0]), 1))
        }
        other => panic!("expected elliptic, got {other:?}"),
    }
}

#[test]
fn shifts_translate_by_their_length() {
    let t = build_tree(3, 8).unwrap();
    for l in 1..=3 {
        let g = TreeAut::shift_by(3, 0, 1, l);
        assert_eq!(translation_length(&t, &g, &p()).unwrap(), l);
        let w = find_axis(&t, &g, &p()).unwrap();
        verify_axis_window(&t, &g, &w).unwrap();
        assert_eq!(w.shift, l);
    }
}

#[test]
fn conjugated_shift_has_a_verified_axis_off_the_root() {
    let t = build_tree(3, 8).unwrap();
    let g = TreeAut::shift(3, 0, 1).conjugate_by(&TreeAut::left(&[2, 1]));
    let w = find_axis(&t, &g, &p()).unwrap();
    verify_axis_window(&t, &g, &w).unwrap();
    assert!(!w.vertices.contains(&Vertex::new(vec![])));
    let (sw, _) = short_lex_axis(&t, &g, &p(), 1).unwrap();
    assert_eq!(sw, w);
}

#[test]
fn ladder_glide_needs_its_square() {
    let l = build_ladder(2).unwrap();
    let g = LadderMove::glide(&l, 1);
    match classify(&l, &g, &p()).unwrap() {
        IsometryClass::Hyperbolic {
            power,
            displacement,
            ..
        } => assert_eq!((power, displacement), (2, 2)),
        other => panic!("expected hyperbolic, got {other:?}"),
    }
    let w = find_axis(&l, &g, &p()).unwrap();
    verify_axis_window(&l, &g, &w).unwrap();
    let (sw, _) = short_lex_axis(&l, &g, &p(), 0).unwrap();
    verify_axis_window(&l, &g, &sw).unwrap();
}

/// The colouring is invariant under the translation the construction used,
/// and the window it returns is a single row whatever the seed.
#[test]
fn ladder_shortlex_colouring_is_invariant() {
    for width in [2, 3] {
        let l = build_ladder(width).unwrap();
        let g = LadderMove::shift(&l, 1);
        let mut rows_seen = BTreeSet::new();
        for seed in 0..4 {
            let (w, d) = short_lex_axis(&l, &g, &p(), seed).unwrap();
            verify_axis_window(&l, &g, &w).unwrap();
            let rows: BTreeSet<i32> = w.vertices.iter().map(|x| x.code()[1]).collect();
            assert_eq!(rows.len(), 1);
            rows_seen.extend(rows);
            assert_eq!(d.window_colors.len(), w.len());
            let k = d.construction_power as i64;
            for ((a, b), c) in &d.edge_colors {
                let (x, y) = (apply_power(&g, a, k), apply_power(&g, b, k));
                let image = if x <= y { (x, y) } else { (y, x) };
                if let Some(c2) = d.edge_colors.get(&image) {
                    assert_eq!(c, c2);
                }
            }
        }
        assert!(!rows_seen.is_empty());
    }
}

#[test]
fn ends_of_tree_shifts() {
    let t = build_tree(3, 8).unwrap();
    let g = TreeAut::shift(3, 0, 1);
    let h = g.conjugate_by(&branch_swap());
    let k = TreeAut::shift(3, 1, 2);
    let (eg, eh, ek) = (
        attracting_end(&t, &g, &p()).unwrap(),
        attracting_end(&t, &h, &p()).unwrap(),
        attracting_end(&t, &k, &p()).unwrap(),
    );
    assert!(same_end(&t, &eg, &eh, p().end_threshold));
    assert!(!same_end(&t, &eg, &ek, p().end_threshold));
}

fn system() -> impl Strategy<Value = InverseSystem> {
    prop::collection::vec(1usize..=5, 1..=6).prop_flat_map(|sizes| {
        let maps: Vec<_> = (1..sizes.len())
            .map(|i| prop::collection::vec(0..sizes[i - 1], sizes[i]))
            .collect();
        (Just(sizes), maps).prop_map(|(s, m)| InverseSystem::new(s, m))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn solver_thread_is_compatible(sys in system()) {
        let sol = solve_inverse_limit(&sys).unwrap();
        let threads = brute_force_threads(&sys, 1 << 20).unwrap();
        prop_assert!(threads.contains(&sol.thread));
        prop_assert_eq!(sol.threads_at_depth, threads.len());
        prop_assert!(sol.surviving_bound <= sol.level_bound);
        prop_assert!(sol.surviving_bound >= 1);
    }

    #[test]
    fn axis_windows_verify_for_random_conjugates(word in prop::collection::vec(0i32..3, 0..4), l in 1usize..3) {
        let t = build_tree(3, 8).unwrap();
        let reduced: Vec<i32> = word.iter().fold(Vec::new(), |mut acc, &x| {
            if acc.last() == Some(&x) { acc.pop(); } else { acc.push(x); }
            acc
        });
        let g = TreeAut::shift_by(3, 0, 1, l).conjugate_by(&TreeAut::left(&reduced));
        let w = find_axis(&t, &g, &p()).unwrap();
        verify_axis_window(&t, &g, &w).unwrap();
        prop_assert_eq!(w.shift, l);
    }
}
