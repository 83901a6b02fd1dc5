use direction_space::cos::{
    cos_distance, displacement, limit_iterates, scale_estimate, tidy_above_check, tidy_search,
    CosHandle, GroupInstance, ScaleMethod,
};
use direction_space::graph::{ball, Graph, Vertex};
use direction_space::instances::{
    build_coset_graph, build_example_group, build_tree, ExampleElement, TreeAut,
};
use direction_space::isometry::Isometry;
use direction_space::oracle::{example_index_brute, BallAutomorphisms};
use direction_space::TruncationProfile;
use num_bigint::BigUint;
use proptest::prelude::*;

fn w(s: &str) -> Vertex {
    Vertex::new(s.bytes().map(|b| (b - b'0') as i32).collect())
}

#[test]
fn scale_is_multiplicative_on_powers() {
    let t = build_tree(3, 8).unwrap();
    let p = TruncationProfile::default();
    let g = TreeAut::shift(3, 0, 1);
    let s = tidy_search(&t, &g, &p).unwrap().exact.unwrap();
    for k in 1..=3u32 {
        let sk = tidy_search(&t, &g.power(k as i64), &p)
            .unwrap()
            .exact
            .unwrap();
        assert_eq!(sk, s.pow(k));
    }
}

#[test]
fn vertex_stabilizer_iterates_follow_sphere_counts() {
    let t = build_tree(3, 8).unwrap();
    let g = TreeAut::shift(3, 0, 1);
    let it = limit_iterates(&t, &g, &CosHandle::stabilizer(vec![w("")]).unwrap(), 12).unwrap();
    for (i, x) in it.iter().enumerate() {
        let n = (i + 1) as f64;
        let want = (3.0 * 2f64.powf(n - 1.0)).powf(1.0 / n);
        assert!((x - want).abs() < 1e-9, "n={n}: {x} vs {want}");
    }
}

#[test]
fn axis_segment_displacement_is_symmetric() {
    let t = build_tree(3, 8).unwrap();
    let g = TreeAut::shift(3, 0, 1);
    let d = displacement(&t, &g, &CosHandle::stabilizer(vec![w(""), w("0")]).unwrap()).unwrap();
    assert_eq!(
        (d.forward, d.backward),
        (BigUint::from(2u32), BigUint::from(2u32))
    );
}

#[test]
fn tidy_above_agrees_with_automorphism_counts() {
    let t = build_tree(3, 8).unwrap();
    let autos = BallAutomorphisms::new(&t, 3).unwrap();
    let gs = [
        TreeAut::shift(3, 0, 1),
        TreeAut::rotation(&[], vec![1, 2, 0]),
        TreeAut::twist(&[0], vec![0, 2, 1]),
    ];
    let tuples: [&[&str]; 4] = [&[""], &["", "0"], &["", "1"], &["", "12"]];
    for g in &gs {
        for tuple in tuples {
            let vs: Vec<Vertex> = tuple.iter().map(|s| w(s)).collect();
            let u = CosHandle::stabilizer(vs.clone()).unwrap();
            // Counting in the ball quotient is exact once every translate stays inside the ball.
            let inside = vs
                .iter()
                .all(|v| g.forward(v).code().len() <= 3 && g.backward(v).code().len() <= 3);
            if inside {
                assert_eq!(
                    tidy_above_check(&t, g, &u, 1).unwrap(),
                    autos.tidy_above_depth_one(g, &vs).unwrap(),
                    "{} {:?}",
                    g.label,
                    tuple
                );
            }
        }
    }
}

#[test]
fn example_scales_and_coset_scales() {
    let e = build_example_group(3).unwrap();
    let p = TruncationProfile::default();
    for n in -3i64..=3 {
        let s = scale_estimate(&e, &ExampleElement::alpha_power(n), &p).unwrap();
        assert_eq!(
            s.exact.unwrap(),
            BigUint::from(3u32).pow(n.unsigned_abs() as u32)
        );
        assert_eq!(s.method, ScaleMethod::ClosedForm);
    }
    let s3: Vec<Vec<u32>> = vec![
        vec![0, 1, 2],
        vec![1, 0, 2],
        vec![2, 1, 0],
        vec![0, 2, 1],
        vec![1, 2, 0],
        vec![2, 0, 1],
    ];
    let c = build_coset_graph(&s3, &[vec![1, 0, 2]], &[vec![1, 2, 0], vec![2, 0, 1]]).unwrap();
    for g in 0..6 {
        assert_eq!(
            scale_estimate(&c, &g, &p).unwrap().exact.unwrap(),
            BigUint::from(1u32)
        );
    }
}

fn tree_handle() -> impl Strategy<Value = CosHandle> {
    let t = build_tree(3, 4).unwrap();
    let vs = ball(&t, &t.basepoint(), 2);
    prop::collection::vec(prop::sample::select(vs), 1..=3)
        .prop_map(|v| CosHandle::stabilizer(v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn example_index_matches_enumeration(n1 in -3i64..=3, m1 in -3i64..=3, n2 in -3i64..=3, m2 in -3i64..=3) {
        let e = build_example_group(2).unwrap();
        let closed = e.index(&CosHandle::product(n1, m1), &CosHandle::product(n2, m2)).unwrap();
        prop_assert_eq!(closed, example_index_brute(2, (n1, m1), (n2, m2), -4, 4).unwrap());
    }

    #[test]
    fn tree_distance_is_a_pseudometric(u in tree_handle(), v in tree_handle(), x in tree_handle()) {
        let t = build_tree(3, 8).unwrap();
        let uv = cos_distance(&t, &u, &v).unwrap();
        let vx = cos_distance(&t, &v, &x).unwrap();
        let ux = cos_distance(&t, &u, &x).unwrap();
        prop_assert_eq!(&uv.product, &cos_distance(&t, &v, &u).unwrap().product);
        prop_assert!(ux.product <= &uv.product * &vx.product);
        prop_assert_eq!(cos_distance(&t, &u, &u).unwrap().product, BigUint::from(1u32));
    }

    #[test]
    fn translating_both_handles_preserves_distance(u in tree_handle(), v in tree_handle(), l in 1usize..3) {
        let t = build_tree(3, 8).unwrap();
        let g = TreeAut::shift_by(3, 0, 1, l);
        let before = cos_distance(&t, &u, &v).unwrap();
        let after = cos_distance(&t, &t.act(&g, &u).unwrap(), &t.act(&g, &v).unwrap()).unwrap();
        prop_assert_eq!(before.product, after.product);
    }
}
