use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{all_geodesics, distance, geodesic, gromov_product, GeodesicPath, Graph, Vertex};
use crate::error::{Error, Result};
use crate::half::HalfInt;

/// How many quadruples and triangles to scan before switching from an
/// exhaustive scan to a seeded random subsample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ScanPolicy {
    pub exhaustive_quadruple_limit: u64,
    pub quadruple_samples: usize,
    pub exhaustive_triangle_limit: u64,
    pub triangle_samples: usize,
    pub seed: u64,
    pub horizon: usize,
}

impl Default for ScanPolicy {
    fn default() -> Self {
        ScanPolicy {
            exhaustive_quadruple_limit: 10_000_000,
            quadruple_samples: 1_000_000,
            exhaustive_triangle_limit: 200_000,
            triangle_samples: 20_000,
            seed: 0,
            horizon: 1 << 20,
        }
    }
}

impl ScanPolicy {
    pub fn exhaustive() -> Self {
        ScanPolicy {
            exhaustive_quadruple_limit: u64::MAX,
            exhaustive_triangle_limit: u64::MAX,
            ..Self::default()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SampleSpec {
    pub vertices: usize,
    pub quadruples: u64,
    pub quadruples_exhaustive: bool,
    pub triangles: u64,
    pub triangles_exhaustive: bool,
    pub seed: u64,
    pub description: String,
}

/// Exact maxima over the declared sample.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HyperbolicityReport {
    pub delta_slim: HalfInt,
    pub delta_fourpoint: HalfInt,
    pub sample_spec: SampleSpec,
}

pub(crate) fn pairwise(g: &dyn Graph, vs: &[Vertex], horizon: usize) -> Result<Vec<Vec<i64>>> {
    vs.par_iter()
        .map(|u| {
            vs.iter()
                .map(|v| distance(g, u, v, horizon).map(|d| d as i64))
                .collect()
        })
        .collect()
}

/// Slim-triangle and four-point constants over `sample`.
pub fn estimate_hyperbolicity(
    g: &dyn Graph,
    sample: &[Vertex],
    policy: ScanPolicy,
) -> Result<HyperbolicityReport> {
    let mut vs: Vec<Vertex> = sample.to_vec();
    vs.sort();
    vs.dedup();
    if vs.is_empty() {
        return Err(Error::EmptySample);
    }
    let n = vs.len();
    let d = pairwise(g, &vs, policy.horizon)?;

    let total_quads = (n as u64).saturating_pow(4);
    let quads_exhaustive = total_quads <= policy.exhaustive_quadruple_limit;
    let four_twice = if quads_exhaustive {
        (0..n)
            .into_par_iter()
            .map(|p| {
                let mut best = 0;
                for x in 0..n {
                    for y in 0..n {
                        for z in 0..n {
                            best = best.max(four_point_twice(&d, x, y, z, p));
                        }
                    }
                }
                best
            })
            .max()
            .unwrap_or(0)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(policy.seed);
        let quads: Vec<[u32; 4]> = (0..policy.quadruple_samples)
            .map(|_| std::array::from_fn(|_| rng.random_range(0..n as u32)))
            .collect();
        quads
            .par_iter()
            .map(|q| {
                four_point_twice(
                    &d,
                    q[0] as usize,
                    q[1] as usize,
                    q[2] as usize,
                    q[3] as usize,
                )
            })
            .max()
            .unwrap_or(0)
    };

    let total_tri = (n as u64) * (n as u64).saturating_sub(1) * (n as u64).saturating_sub(2) / 6;
    let tri_exhaustive = total_tri <= policy.exhaustive_triangle_limit;
    let triangles: Vec<[usize; 3]> = if tri_exhaustive {
        let mut t = Vec::with_capacity(total_tri as usize);
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    t.push([a, b, c]);
                }
            }
        }
        t
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(policy.seed ^ 0x9e37_79b9_7f4a_7c15);
        (0..policy.triangle_samples)
            .map(|_| {
                let mut t = [0; 3];
                for s in &mut t {
                    *s = rng.random_range(0..n);
                }
                t.sort_unstable();
                t
            })
            .collect()
    };
    let slim_twice = if n < 3 {
        0
    } else {
        let geo: Vec<Vec<Option<GeodesicPath>>> = (0..n)
            .into_par_iter()
            .map(|i| {
                (0..n)
                    .map(|j| {
                        (i < j)
                            .then(|| geodesic(g, &vs[i], &vs[j], policy.horizon))
                            .transpose()
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        let side = |i: usize, j: usize| geo[i.min(j)][i.max(j)].as_ref().expect("geodesic cached");
        triangles
            .par_iter()
            .map(|&[a, b, c]| {
                let (ab, bc, ac) = (side(a, b), side(b, c), side(a, c));
                let m1 = side_gap_twice(g, ab, &[bc, ac], policy.horizon)?;
                let m2 = side_gap_twice(g, bc, &[ab, ac], policy.horizon)?;
                let m3 = side_gap_twice(g, ac, &[ab, bc], policy.horizon)?;
                Ok(m1.max(m2).max(m3))
            })
            .try_reduce(|| 0, |x, y| Ok(x.max(y)))?
    };

    let description = format!(
        "{} vertices of {}; quadruples {}; triangles {}",
        n,
        g.name(),
        if quads_exhaustive {
            "exhaustive".to_string()
        } else {
            format!(
                "{} sampled (seed {})",
                policy.quadruple_samples, policy.seed
            )
        },
        if tri_exhaustive {
            "exhaustive".to_string()
        } else {
            format!("{} sampled (seed {})", policy.triangle_samples, policy.seed)
        },
    );
    Ok(HyperbolicityReport {
        delta_slim: HalfInt::from_twice(slim_twice),
        delta_fourpoint: HalfInt::from_twice(four_twice),
        sample_spec: SampleSpec {
            vertices: n,
            quadruples: if quads_exhaustive {
                total_quads
            } else {
                policy.quadruple_samples as u64
            },
            quadruples_exhaustive: quads_exhaustive,
            triangles: triangles.len() as u64,
            triangles_exhaustive: tri_exhaustive,
            seed: policy.seed,
            description,
        },
    })
}

// Twice min{(x|z)_p, (y|z)_p} - (x|y)_p, clamped at 0.
fn four_point_twice(d: &[Vec<i64>], x: usize, y: usize, z: usize, p: usize) -> i64 {
    let prod = |a: usize, b: usize| d[a][p] + d[b][p] - d[a][b];
    (prod(x, z).min(prod(y, z)) - prod(x, y)).max(0)
}

// Twice the largest distance from a half-integer point of `side` to the union
// of `others`. The supremum over the metric edge is attained at a vertex or a
// midpoint, and the nearest point of a path to any point is one of its vertices.
fn side_gap_twice(
    g: &dyn Graph,
    side: &GeodesicPath,
    others: &[&GeodesicPath],
    horizon: usize,
) -> Result<i64> {
    let targets: Vec<&Vertex> = others.iter().flat_map(|p| p.vertices.iter()).collect();
    let shared: HashSet<(&Vertex, &Vertex)> = others
        .iter()
        .flat_map(|p| {
            p.vertices.windows(2).map(|w| {
                if w[0] <= w[1] {
                    (&w[0], &w[1])
                } else {
                    (&w[1], &w[0])
                }
            })
        })
        .collect();
    let mut near = Vec::with_capacity(side.vertices.len());
    for v in &side.vertices {
        let mut best = i64::MAX;
        for t in &targets {
            best = best.min(distance(g, v, t, horizon)? as i64);
            if best == 0 {
                break;
            }
        }
        near.push(best);
    }
    let mut worst = near.iter().map(|m| 2 * m).max().unwrap_or(0);
    for (i, w) in side.vertices.windows(2).enumerate() {
        let key = if w[0] <= w[1] {
            (&w[0], &w[1])
        } else {
            (&w[1], &w[0])
        };
        if !shared.contains(&key) {
            worst = worst.max(1 + 2 * near[i].min(near[i + 1]));
        }
    }
    Ok(worst)
}

/// Slim constant when every side ranges over all geodesics between its
/// endpoints (at most `cap` each), for finite graphs.
pub fn slim_delta_all_geodesics(
    g: &dyn Graph,
    sample: &[Vertex],
    horizon: usize,
    cap: usize,
) -> Result<HalfInt> {
    let mut vs: Vec<Vertex> = sample.to_vec();
    vs.sort();
    vs.dedup();
    if vs.is_empty() {
        return Err(Error::EmptySample);
    }
    let n = vs.len();
    let mut all = vec![vec![Vec::new(); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            all[i][j] = all_geodesics(g, &vs[i], &vs[j], horizon, cap)?;
        }
    }
    let mut tri = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                tri.push([a, b, c]);
            }
        }
    }
    let worst = tri
        .par_iter()
        .map(|&[a, b, c]| {
            let sides = [&all[a][b], &all[b][c], &all[a][c]];
            let mut worst = 0;
            for s in 0..3 {
                let (o1, o2) = (sides[(s + 1) % 3], sides[(s + 2) % 3]);
                for g0 in sides[s] {
                    for g1 in o1 {
                        for g2 in o2 {
                            worst = worst.max(side_gap_twice(g, g0, &[g1, g2], horizon)?);
                        }
                    }
                }
            }
            Ok(worst)
        })
        .try_reduce(|| 0, |x, y| Ok(x.max(y)))?;
    Ok(HalfInt::from_twice(worst))
}

/// `d(p, γ) - 2δ <= (x|y)_p <= d(p, γ)` for the tie-broken geodesic γ from x to y.
pub fn check_standard_estimate(
    g: &dyn Graph,
    p: &Vertex,
    x: &Vertex,
    y: &Vertex,
    delta: HalfInt,
    horizon: usize,
) -> Result<bool> {
    let gamma = geodesic(g, x, y, horizon)?;
    let mut dp = usize::MAX;
    for v in &gamma.vertices {
        dp = dp.min(distance(g, p, v, horizon)?);
    }
    let dp = HalfInt::from_int(dp as i64);
    let prod = gromov_product(g, x, y, p, horizon)?;
    Ok(dp - delta.scale(2) <= prod && prod <= dp)
}

/// Every vertex of γ₀ lies within `8δ + 2d(γ₀(0), γ₁(0)) + 2d(γ₀(end), γ₁(end))` of γ₁.
pub fn check_ribbon(
    g: &dyn Graph,
    g0: &GeodesicPath,
    g1: &GeodesicPath,
    delta: HalfInt,
    horizon: usize,
) -> Result<bool> {
    g0.validate(g, horizon)?;
    g1.validate(g, horizon)?;
    let d0 = distance(g, g0.start(), g1.start(), horizon)? as i64;
    let d1 = distance(g, g0.end(), g1.end(), horizon)? as i64;
    let bound = delta.scale(8) + HalfInt::from_int(2 * d0 + 2 * d1);
    for v in &g0.vertices {
        let mut best = usize::MAX;
        for w in &g1.vertices {
            best = best.min(distance(g, v, w, horizon)?);
        }
        if HalfInt::from_int(best as i64) > bound {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Geodesics with common endpoints stay within 4δ of each other at equal times.
pub fn check_fellow_travel(
    g: &dyn Graph,
    g0: &GeodesicPath,
    g1: &GeodesicPath,
    delta: HalfInt,
    horizon: usize,
) -> Result<bool> {
    if g0.is_empty()
        || g1.is_empty()
        || g0.len() != g1.len()
        || g0.start() != g1.start()
        || g0.end() != g1.end()
    {
        return Err(Error::EndpointMismatch);
    }
    let bound = delta.scale(4);
    for (a, b) in g0.vertices.iter().zip(&g1.vertices) {
        if HalfInt::from_int(distance(g, a, b, horizon)? as i64) > bound {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Finite proxy for convergence at infinity: every Gromov product at the
/// basepoint among the second half of the sequence is at least `threshold`.
pub fn sequence_converges_at_infinity(
    g: &dyn Graph,
    seq: &[Vertex],
    threshold: u64,
    horizon: usize,
) -> bool {
    if seq.is_empty() {
        return false;
    }
    let p = g.basepoint();
    let tail = &seq[seq.len() / 2..];
    let t = HalfInt::from_int(threshold as i64);
    for (i, a) in tail.iter().enumerate() {
        for b in &tail[i..] {
            match gromov_product(g, a, b, &p, horizon) {
                Ok(v) if v >= t => {}
                _ => return false,
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::FiniteGraph;

    fn all(g: &FiniteGraph) -> Vec<Vertex> {
        g.vertices().unwrap()
    }

    #[test]
    fn cycles_four_point_matches_brute_force() {
        // Values from an independent exhaustive scan of all n^4 quadruples.
        for (n, twice) in [(4, 2), (5, 1), (6, 2), (8, 4)] {
            let g = FiniteGraph::cycle(n);
            let r = estimate_hyperbolicity(&g, &all(&g), ScanPolicy::exhaustive()).unwrap();
            assert_eq!(r.delta_fourpoint, HalfInt::from_twice(twice), "C{n}");
        }
    }

    #[test]
    fn single_vertex_sample_is_zero() {
        let g = FiniteGraph::cycle(6);
        let r = estimate_hyperbolicity(&g, &[Vertex::single(2)], ScanPolicy::default()).unwrap();
        assert_eq!(
            (r.delta_slim, r.delta_fourpoint),
            (HalfInt::ZERO, HalfInt::ZERO)
        );
        assert_eq!(
            estimate_hyperbolicity(&g, &[], ScanPolicy::default()),
            Err(Error::EmptySample)
        );
    }

    #[test]
    fn cycle_slim_constants() {
        // Frozen from an independent scan at quarter-edge resolution.
        for (n, twice) in [(4, 2), (5, 2), (6, 3), (8, 4)] {
            let g = FiniteGraph::cycle(n);
            let r = estimate_hyperbolicity(&g, &all(&g), ScanPolicy::exhaustive()).unwrap();
            assert_eq!(r.delta_slim, HalfInt::from_twice(twice), "C{n}");
        }
    }

    #[test]
    fn standard_estimate_trivial_cases() {
        let g = FiniteGraph::cycle(6);
        let v = |i| Vertex::single(i);
        assert!(check_standard_estimate(&g, &v(0), &v(0), &v(3), HalfInt::ZERO, 10).unwrap());
        assert!(check_standard_estimate(&g, &v(1), &v(0), &v(3), HalfInt::ZERO, 10).unwrap());
    }

    #[test]
    fn fellow_travel_and_ribbon_on_cycle_arcs() {
        let g = FiniteGraph::cycle(6);
        let v = |i| Vertex::single(i);
        let a = GeodesicPath::new(vec![v(0), v(1), v(2), v(3)]);
        let b = GeodesicPath::new(vec![v(0), v(5), v(4), v(3)]);
        let delta = estimate_hyperbolicity(&g, &all(&g), ScanPolicy::exhaustive())
            .unwrap()
            .delta_slim;
        assert!(check_fellow_travel(&g, &a, &b, delta, 10).unwrap());
        assert!(!check_fellow_travel(&g, &a, &b, HalfInt::ZERO, 10).unwrap());
        assert!(check_ribbon(&g, &a, &b, delta, 10).unwrap());
        assert!(check_ribbon(&g, &a, &a, HalfInt::ZERO, 10).unwrap());
        let c = GeodesicPath::new(vec![v(0), v(1), v(2)]);
        assert_eq!(
            check_fellow_travel(&g, &a, &c, delta, 10),
            Err(Error::EndpointMismatch)
        );
    }

    #[test]
    fn convergence_proxy() {
        let g = FiniteGraph::path(30);
        let far: Vec<Vertex> = (0..20).map(Vertex::single).collect();
        assert!(sequence_converges_at_infinity(&g, &far, 5, 100));
        let constant = vec![Vertex::single(0); 10];
        assert!(!sequence_converges_at_infinity(&g, &constant, 1, 100));
        let alternating: Vec<Vertex> = (0..10)
            .map(|i| Vertex::single(if i % 2 == 0 { 3 } else { 0 }))
            .collect();
        assert!(!sequence_converges_at_infinity(&g, &alternating, 1, 100));
        assert!(!sequence_converges_at_infinity(&g, &[], 1, 100));
    }
}
