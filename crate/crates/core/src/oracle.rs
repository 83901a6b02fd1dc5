//! Brute-force oracles used to cross-check the closed-form index computations.

use std::collections::{HashMap, HashSet};

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::graph::{ball, Graph, Vertex};
use crate::instances::tree::{hull, tree_distance};
use crate::instances::{TreeAut, TreeInstance};
use crate::isometry::Isometry;

/// Largest automorphism group enumerated.
pub const MAX_AUTOMORPHISMS: u64 = 1 << 20;

/// Every automorphism of the ball of given radius about the root of a regular
/// tree. Each automorphism fixes the root and is stored as a permutation of
/// the ball's vertex indices.
#[derive(Debug, Clone)]
pub struct BallAutomorphisms {
    pub vertices: Vec<Vertex>,
    index: HashMap<Vertex, usize>,
    pub perms: Vec<Vec<usize>>,
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

impl BallAutomorphisms {
    pub fn new(t: &TreeInstance, radius: usize) -> Result<Self> {
        let root = t.basepoint();
        let vertices = ball(t, &root, radius);
        let index: HashMap<Vertex, usize> = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), i))
            .collect();
        let depth = |v: &Vertex| v.code().len();
        let children: Vec<Vec<usize>> = vertices
            .iter()
            .map(|v| {
                if depth(v) == radius {
                    return Vec::new();
                }
                let mut c: Vec<usize> = t
                    .neighbors(v)
                    .iter()
                    .filter(|w| depth(w) > depth(v))
                    .map(|w| index[w])
                    .collect();
                c.sort();
                c
            })
            .collect();
        let internal: Vec<usize> = (0..vertices.len())
            .filter(|&i| !children[i].is_empty())
            .collect();
        let total = internal.iter().try_fold(1u64, |acc, &i| {
            acc.checked_mul(factorial(children[i].len()))
        });
        match total {
            Some(n) if n <= MAX_AUTOMORPHISMS => {}
            _ => return Err(Error::DepthInfeasible(radius)),
        }
        let local: Vec<Vec<Vec<usize>>> = internal
            .iter()
            .map(|&i| permutations(children[i].len()))
            .collect();
        let mut perms = Vec::new();
        let mut digits = vec![0usize; internal.len()];
        let slot: HashMap<usize, usize> =
            internal.iter().enumerate().map(|(s, &i)| (i, s)).collect();
        loop {
            // Vertices are in ball order, so parents are mapped before children.
            let mut image = vec![usize::MAX; vertices.len()];
            image[0] = 0;
            for &i in &internal {
                let sigma = &local[slot[&i]][digits[slot[&i]]];
                let target = &children[image[i]];
                for (c, &child) in children[i].iter().enumerate() {
                    image[child] = target[sigma[c]];
                }
            }
            perms.push(image);
            let mut pos = 0;
            loop {
                if pos == digits.len() {
                    return Ok(BallAutomorphisms {
                        vertices,
                        index,
                        perms,
                    });
                }
                digits[pos] += 1;
                if digits[pos] < local[pos].len() {
                    break;
                }
                digits[pos] = 0;
                pos += 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.perms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perms.is_empty()
    }

    fn indices(&self, tuple: &[Vertex]) -> Result<Vec<usize>> {
        tuple
            .iter()
            .map(|v| {
                self.index
                    .get(v)
                    .copied()
                    .ok_or(Error::OracleHorizonExceeded)
            })
            .collect()
    }

    /// Automorphisms fixing every vertex of `tuple`.
    pub fn stabilizer(&self, tuple: &[Vertex]) -> Result<Vec<usize>> {
        let ix = self.indices(tuple)?;
        Ok((0..self.perms.len())
            .filter(|&p| ix.iter().all(|&i| self.perms[p][i] == i))
            .collect())
    }

    /// Size of the orbit of the ordered tuple under the given automorphisms.
    pub fn orbit_size(&self, group: &[usize], tuple: &[Vertex]) -> Result<usize> {
        let ix = self.indices(tuple)?;
        let images: HashSet<Vec<usize>> = group
            .iter()
            .map(|&p| ix.iter().map(|&i| self.perms[p][i]).collect())
            .collect();
        Ok(images.len())
    }

    /// `[G_A : G_A ∩ G_B]` by orbit counting. Stabilizers in the full group
    /// restrict onto stabilizers in the ball only when they fix the root, so
    /// the root must lie in the hull of `a`.
    pub fn tuple_index(&self, a: &[Vertex], b: &[Vertex]) -> Result<usize> {
        if !hull(a).contains(&self.vertices[0]) {
            return Err(Error::Unsupported(
                "the root must lie in the hull of the first tuple".into(),
            ));
        }
        let ga = self.stabilizer(a)?;
        self.orbit_size(&ga, b)
    }

    /// Whether `U = U_+ U_-` for `U = G_A`, `U_+ = U ∩ gU`, `U_- = U ∩ g^-1 U`,
    /// by counting `|U_+ U_-| = |U_+| |U_-| / |U_+ ∩ U_-|` in the ball quotient.
    pub fn tidy_above_depth_one(&self, g: &TreeAut, a: &[Vertex]) -> Result<bool> {
        if !a.contains(&self.vertices[0]) {
            return Err(Error::Unsupported("the tuple must contain the root".into()));
        }
        let ga: Vec<Vertex> = a.iter().map(|v| g.forward(v)).collect();
        let gia: Vec<Vertex> = a.iter().map(|v| g.backward(v)).collect();
        let plus: Vec<Vertex> = a.iter().chain(&ga).cloned().collect();
        let minus: Vec<Vertex> = a.iter().chain(&gia).cloned().collect();
        let both: Vec<Vertex> = plus.iter().chain(&gia).cloned().collect();
        let u = self.stabilizer(a)?.len();
        let up = self.stabilizer(&plus)?.len();
        let um = self.stabilizer(&minus)?.len();
        let upm = self.stabilizer(&both)?.len();
        Ok(up * um == u * upm)
    }
}

/// `[U : U ∩ V]` in one coordinate of the example group, counting vectors on
/// the window `lo..=hi`: `U` has support below `n`, `V` below `m`.
fn coordinate_index(order: u32, n: i64, m: i64, lo: i64, hi: i64) -> Result<u64> {
    let width = (hi - lo + 1) as u32;
    let total = (order as u64)
        .checked_pow(width)
        .filter(|&t| t <= 1 << 24)
        .ok_or(Error::DepthInfeasible(width as usize))?;
    let (mut in_u, mut in_both) = (0u64, 0u64);
    let mut digits = vec![0u32; width as usize];
    for _ in 0..total {
        let below = |bound: i64| {
            digits
                .iter()
                .enumerate()
                .all(|(i, &x)| x == 0 || lo + (i as i64) < bound)
        };
        if below(n) {
            in_u += 1;
            if below(m) {
                in_both += 1;
            }
        }
        for d in digits.iter_mut() {
            *d += 1;
            if *d < order {
                break;
            }
            *d = 0;
        }
    }
    Ok(in_u / in_both)
}

/// `[U_{n1,m1} : U_{n1,m1} ∩ U_{n2,m2}]` in the example group over `Z/order`,
/// by counting truncated vectors on `lo..=hi`. Exact when every parameter
/// lies in `lo..=hi + 1`.
pub fn example_index_brute(
    order: u32,
    (n1, m1): (i64, i64),
    (n2, m2): (i64, i64),
    lo: i64,
    hi: i64,
) -> Result<BigUint> {
    for p in [n1, m1, n2, m2] {
        if p < lo || p > hi + 1 {
            return Err(Error::OracleHorizonExceeded);
        }
    }
    let a = coordinate_index(order, n1, n2, lo, hi)?;
    let b = coordinate_index(order, m1, m2, lo, hi)?;
    Ok(BigUint::from(a) * BigUint::from(b))
}

/// The tuples used for the ball-automorphism comparison: the root alone or
/// with one more vertex, and pairs whose geodesic passes through the root.
pub fn root_hull_tuples(t: &TreeInstance, radius: usize) -> Vec<Vec<Vertex>> {
    let root = t.basepoint();
    let vs = ball(t, &root, radius);
    let mut out = vec![vec![root.clone()]];
    for (i, x) in vs.iter().enumerate() {
        for y in &vs[i + 1..] {
            if tree_distance(x.code(), y.code()) == x.code().len() + y.code().len() {
                out.push(vec![x.clone(), y.clone()]);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::build_tree;

    #[test]
    fn radius_three_group_has_3072_elements() {
        let t = build_tree(3, 8).unwrap();
        assert_eq!(BallAutomorphisms::new(&t, 3).unwrap().len(), 3072);
        assert_eq!(BallAutomorphisms::new(&t, 1).unwrap().len(), 6);
    }

    #[test]
    fn example_brute_force_small_case() {
        let v = example_index_brute(2, (-1, 1), (0, 0), -4, 4).unwrap();
        assert_eq!(v, BigUint::from(2u32));
    }
}
