use direction_space::graph::{
    ball, distance, estimate_hyperbolicity, geodesic, gromov_product, slim_delta_all_geodesics,
    FiniteGraph, Graph, ScanPolicy, Vertex,
};
use direction_space::instances::build_tree;
use direction_space::HalfInt;
use proptest::prelude::*;

const H: usize = 1 << 10;

fn all_vertices(g: &FiniteGraph) -> Vec<Vertex> {
    ball(g, &g.basepoint(), g.len())
}

/// Four-point constant by a direct loop over every quadruple.
fn fourpoint_brute(g: &FiniteGraph) -> HalfInt {
    let vs = all_vertices(g);
    let d = |a: &Vertex, b: &Vertex| distance(g, a, b, H).unwrap() as i64;
    let mut worst = 0;
    for x in &vs {
        for y in &vs {
            for z in &vs {
                for w in &vs {
                    let mut s = [d(x, y) + d(z, w), d(x, z) + d(y, w), d(x, w) + d(y, z)];
                    s.sort();
                    worst = worst.max(s[2] - s[1]);
                }
            }
        }
    }
    HalfInt::from_twice(worst)
}

#[test]
fn cycle_constants_are_frozen() {
    let fourpoint = [(4, "1"), (5, "1/2"), (6, "1"), (8, "2")];
    let slim = [(4, "1"), (5, "1"), (6, "3/2"), (8, "2")];
    for ((n, fp), (_, sl)) in fourpoint.iter().zip(&slim) {
        let c = FiniteGraph::cycle(*n);
        let r = estimate_hyperbolicity(&c, &all_vertices(&c), ScanPolicy::exhaustive()).unwrap();
        assert_eq!(
            r.delta_fourpoint,
            HalfInt::parse(fp).unwrap(),
            "four-point on C{n}"
        );
        assert_eq!(r.delta_slim, HalfInt::parse(sl).unwrap(), "slim on C{n}");
        assert_eq!(r.delta_fourpoint, fourpoint_brute(&c));
    }
}

#[test]
fn tree_ball_sizes() {
    let t = build_tree(3, 8).unwrap();
    let sizes: Vec<usize> = (0..=7).map(|r| ball(&t, &t.basepoint(), r).len()).collect();
    assert_eq!(sizes, [1, 4, 10, 22, 46, 94, 190, 382]);
}

#[test]
fn tree_slim_constant_is_zero() {
    let t = build_tree(3, 8).unwrap();
    let sample = ball(&t, &t.basepoint(), 3);
    assert_eq!(
        slim_delta_all_geodesics(&t, &sample, H, 8).unwrap(),
        HalfInt::from_int(0)
    );
}

#[test]
fn sampled_scan_is_reproducible() {
    let t = build_tree(3, 8).unwrap();
    let sample = ball(&t, &t.basepoint(), 5);
    let a = estimate_hyperbolicity(&t, &sample, ScanPolicy::default().with_seed(7)).unwrap();
    let b = estimate_hyperbolicity(&t, &sample, ScanPolicy::default().with_seed(7)).unwrap();
    assert_eq!(a, b);
    assert!(!a.sample_spec.quadruples_exhaustive);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn metric_and_geodesic_invariants(n in 3usize..14, p in 0.05f64..0.6, seed in 0u64..1000) {
        let g = FiniteGraph::random_connected(n, p, seed);
        let vs = all_vertices(&g);
        prop_assert_eq!(vs.len(), n);
        for x in &vs {
            for y in &vs {
                let dxy = distance(&g, x, y, H).unwrap();
                prop_assert_eq!(dxy, distance(&g, y, x, H).unwrap());
                prop_assert_eq!(dxy == 0, x == y);
                let path = geodesic(&g, x, y, H).unwrap();
                prop_assert_eq!(path.len(), dxy);
                path.validate(&g, H).unwrap();
                for z in &vs {
                    prop_assert!(dxy <= distance(&g, x, z, H).unwrap() + distance(&g, z, y, H).unwrap());
                    let gp = gromov_product(&g, x, y, z, H).unwrap();
                    let bound = distance(&g, x, z, H).unwrap().min(distance(&g, y, z, H).unwrap());
                    prop_assert!(gp >= HalfInt::from_int(0) && gp <= HalfInt::from_int(bound as i64));
                }
            }
        }
    }

    #[test]
    fn fourpoint_matches_direct_loop(n in 3usize..9, p in 0.1f64..0.7, seed in 0u64..500) {
        let g = FiniteGraph::random_connected(n, p, seed);
        let r = estimate_hyperbolicity(&g, &all_vertices(&g), ScanPolicy::exhaustive()).unwrap();
        prop_assert_eq!(r.delta_fourpoint, fourpoint_brute(&g));
    }
}
