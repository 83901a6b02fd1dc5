//! Coset graphs `G/U` of a finite permutation group with respect to a
//! symmetric generating set, with `G` acting by left multiplication.

use std::collections::HashMap;

use num_bigint::BigUint;

use crate::cos::{CosHandle, GroupInstance};
use crate::error::{Error, Result};
use crate::graph::{FiniteGraph, Graph, Vertex};
use crate::isometry::Isometry;
use crate::profile::TruncationProfile;

pub type Perm = Vec<u32>;

const MAX_GROUP_ORDER: usize = 1 << 16;

#[derive(Debug, Clone)]
pub struct CosetInstance {
    elements: Vec<Perm>,
    lookup: HashMap<Perm, usize>,
    mul: Vec<Vec<usize>>,
    inv: Vec<usize>,
    subgroup: Vec<usize>,
    gens: Vec<usize>,
    /// `coset_of[g]` is the index of `gU`.
    coset_of: Vec<usize>,
    /// `action[g][c]` is the index of `g · (coset c)`.
    action: Vec<Vec<usize>>,
    graph: FiniteGraph,
}

fn compose(a: &Perm, b: &Perm) -> Perm {
    b.iter().map(|&x| a[x as usize]).collect()
}

fn validate_perm(p: &Perm, n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if p.len() != n {
        return Err(Error::InvariantViolation(format!(
            "permutation {p:?} has degree {} not {n}",
            p.len()
        )));
    }
    for &x in p {
        if x as usize >= n || std::mem::replace(&mut seen[x as usize], true) {
            return Err(Error::InvariantViolation(format!(
                "{p:?} is not a permutation"
            )));
        }
    }
    Ok(())
}

/// Closure of `gens` under composition, identity first, in BFS order.
fn closure(gens: &[Perm], n: usize) -> Result<Vec<Perm>> {
    let id: Perm = (0..n as u32).collect();
    let mut out = vec![id.clone()];
    let mut seen: HashMap<Perm, usize> = HashMap::from([(id, 0)]);
    let mut i = 0;
    while i < out.len() {
        for g in gens {
            let p = compose(g, &out[i]);
            if !seen.contains_key(&p) {
                if out.len() >= MAX_GROUP_ORDER {
                    return Err(Error::Unsupported(format!(
                        "group order exceeds {MAX_GROUP_ORDER}"
                    )));
                }
                seen.insert(p.clone(), out.len());
                out.push(p);
            }
        }
        i += 1;
    }
    Ok(out)
}

pub fn build_coset_graph(
    group: &[Perm],
    subgroup: &[Perm],
    gens: &[Perm],
) -> Result<CosetInstance> {
    let n = group
        .first()
        .or(subgroup.first())
        .or(gens.first())
        .map_or(1, Vec::len);
    for p in group.iter().chain(subgroup).chain(gens) {
        validate_perm(p, n)?;
    }
    let elements = closure(group, n)?;
    let lookup: HashMap<Perm, usize> = elements
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, p)| (p, i))
        .collect();
    let find = |p: &Perm| {
        lookup
            .get(p)
            .copied()
            .ok_or_else(|| Error::InvariantViolation(format!("{p:?} is not in the group")))
    };
    let mul: Vec<Vec<usize>> = elements
        .iter()
        .map(|a| elements.iter().map(|b| lookup[&compose(a, b)]).collect())
        .collect();
    let inv: Vec<usize> = (0..elements.len())
        .map(|a| {
            (0..elements.len())
                .find(|&b| mul[a][b] == 0)
                .expect("group")
        })
        .collect();
    let mut subgroup_idx: Vec<usize> = closure(subgroup, n)?
        .iter()
        .map(find)
        .collect::<Result<_>>()?;
    subgroup_idx.sort_unstable();
    let gens_idx: Vec<usize> = gens.iter().map(find).collect::<Result<_>>()?;
    if gens_idx.iter().any(|&s| !gens_idx.contains(&inv[s])) {
        return Err(Error::NotSymmetricGenerators);
    }
    // Cosets numbered by their smallest element.
    let mut coset_of = vec![usize::MAX; elements.len()];
    let mut count = 0;
    for g in 0..elements.len() {
        if coset_of[g] == usize::MAX {
            for &u in &subgroup_idx {
                coset_of[mul[g][u]] = count;
            }
            count += 1;
        }
    }
    let reps: Vec<usize> = (0..count)
        .map(|c| {
            coset_of
                .iter()
                .position(|&x| x == c)
                .expect("nonempty coset")
        })
        .collect();
    let action: Vec<Vec<usize>> = (0..elements.len())
        .map(|g| reps.iter().map(|&r| coset_of[mul[g][r]]).collect())
        .collect();
    let mut edges = std::collections::BTreeSet::new();
    for &r in &reps {
        for &s in &gens_idx {
            let (a, b) = (coset_of[r], coset_of[mul[r][s]]);
            if a != b {
                edges.insert((a.min(b), a.max(b)));
            }
        }
    }
    // Left translates of the edges above cover every (gU, gsU).
    let mut all = std::collections::BTreeSet::new();
    for row in &action {
        for &(a, b) in &edges {
            let (x, y) = (row[a], row[b]);
            all.insert((x.min(y), x.max(y)));
        }
    }
    let names = (0..count).map(|c| format!("c{c}")).collect();
    let edges: Vec<(usize, usize)> = all.into_iter().collect();
    let graph = FiniteGraph::new(
        names,
        &edges,
        format!("coset:{}/{}", elements.len(), subgroup_idx.len()),
    )?;
    Ok(CosetInstance {
        elements,
        lookup,
        mul,
        inv,
        subgroup: subgroup_idx,
        gens: gens_idx,
        coset_of,
        action,
        graph,
    })
}

impl CosetInstance {
    pub fn group_order(&self) -> usize {
        self.elements.len()
    }

    pub fn coset_count(&self) -> usize {
        self.graph.len()
    }

    pub fn coset_graph(&self) -> &FiniteGraph {
        &self.graph
    }

    pub fn is_connected(&self) -> bool {
        self.graph.is_connected()
    }

    pub fn element(&self, i: usize) -> &Perm {
        &self.elements[i]
    }

    pub fn element_index(&self, p: &Perm) -> Option<usize> {
        self.lookup.get(p).copied()
    }

    pub fn generators(&self) -> &[usize] {
        &self.gens
    }

    pub fn coset_of(&self, g: usize) -> usize {
        self.coset_of[g]
    }

    pub fn act_on_coset(&self, g: usize, c: usize) -> usize {
        self.action[g][c]
    }

    /// Elements fixing every coset in `cs`.
    pub fn pointwise_stabilizer(&self, cs: &[usize]) -> Vec<usize> {
        (0..self.elements.len())
            .filter(|&g| cs.iter().all(|&c| self.action[g][c] == c))
            .collect()
    }

    /// `g U g⁻¹` for a representative `g` of coset `c`.
    pub fn conjugate_subgroup(&self, c: usize) -> Vec<usize> {
        let g = self
            .coset_of
            .iter()
            .position(|&x| x == c)
            .expect("coset exists");
        let mut out: Vec<usize> = self
            .subgroup
            .iter()
            .map(|&u| self.mul[self.mul[g][u]][self.inv[g]])
            .collect();
        out.sort_unstable();
        out
    }

    fn tuple(&self, u: &CosHandle) -> Result<Vec<usize>> {
        match u {
            CosHandle::Stabilizer(vs) => vs
                .iter()
                .map(|v| match v.code() {
                    [c] if *c >= 0 && (*c as usize) < self.coset_count() => Ok(*c as usize),
                    _ => Err(Error::InvariantViolation(format!("{v:?} is not a coset"))),
                })
                .collect(),
            CosHandle::Algebraic(_) => Err(Error::IncompatibleInstances),
        }
    }
}

/// Left multiplication by one group element.
pub struct CosetIso<'a> {
    inst: &'a CosetInstance,
    g: usize,
}

impl Isometry for CosetIso<'_> {
    fn forward(&self, v: &Vertex) -> Vertex {
        Vertex::single(self.inst.action[self.g][v.code()[0] as usize] as i32)
    }
    fn backward(&self, v: &Vertex) -> Vertex {
        Vertex::single(self.inst.action[self.inst.inv[self.g]][v.code()[0] as usize] as i32)
    }
    fn label(&self) -> String {
        format!("g{}", self.g)
    }
}

impl GroupInstance for CosetInstance {
    type Element = usize;

    fn name(&self) -> String {
        self.graph.name()
    }

    fn identity(&self) -> usize {
        0
    }

    fn compose(&self, a: &usize, b: &usize) -> usize {
        self.mul[*a][*b]
    }

    fn inverse(&self, a: &usize) -> usize {
        self.inv[*a]
    }

    fn validate_handle(&self, u: &CosHandle) -> Result<()> {
        let t = self.tuple(u)?;
        if t.is_empty() || t.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvariantViolation(
                "stabilizer tuple is not sorted, nonempty and duplicate-free".into(),
            ));
        }
        Ok(())
    }

    fn act(&self, a: &usize, u: &CosHandle) -> Result<CosHandle> {
        let t = self.tuple(u)?;
        CosHandle::stabilizer(
            t.iter()
                .map(|&c| Vertex::single(self.action[*a][c] as i32))
                .collect(),
        )
    }

    fn index(&self, u: &CosHandle, v: &CosHandle) -> Result<BigUint> {
        let a = self.tuple(u)?;
        let mut ab = a.clone();
        ab.extend(self.tuple(v)?);
        let big = self.pointwise_stabilizer(&a).len();
        let small = self.pointwise_stabilizer(&ab).len();
        Ok(BigUint::from((big / small) as u64))
    }

    fn intersect(&self, u: &CosHandle, v: &CosHandle) -> Result<CosHandle> {
        let mut t = self.tuple(u)?;
        t.extend(self.tuple(v)?);
        CosHandle::stabilizer(t.into_iter().map(|c| Vertex::single(c as i32)).collect())
    }

    fn is_subgroup(&self, v: &CosHandle, u: &CosHandle) -> Result<bool> {
        let big = self.pointwise_stabilizer(&self.tuple(u)?);
        Ok(self
            .pointwise_stabilizer(&self.tuple(v)?)
            .iter()
            .all(|g| big.binary_search(g).is_ok()))
    }

    fn graph(&self) -> Option<&dyn Graph> {
        Some(&self.graph)
    }

    fn isometry<'a>(&'a self, a: &usize) -> Option<Box<dyn Isometry + 'a>> {
        Some(Box::new(CosetIso { inst: self, g: *a }))
    }

    // Every element of a finite group is uniscalar.
    fn closed_form_scale(&self, _a: &usize) -> Option<BigUint> {
        Some(BigUint::from(1u32))
    }

    fn base_handle(&self, _a: &usize, _profile: &TruncationProfile) -> Result<CosHandle> {
        Ok(CosHandle::Stabilizer(vec![Vertex::single(0)]))
    }

    fn candidate_family(
        &self,
        _a: &usize,
        _radius: usize,
        _profile: &TruncationProfile,
    ) -> Result<Vec<CosHandle>> {
        let n = self.coset_count();
        let mut out: Vec<CosHandle> = (0..n)
            .map(|c| CosHandle::Stabilizer(vec![Vertex::single(c as i32)]))
            .collect();
        for a in 0..n {
            for b in a + 1..n {
                out.push(CosHandle::Stabilizer(vec![
                    Vertex::single(a as i32),
                    Vertex::single(b as i32),
                ]));
            }
        }
        out.push(CosHandle::Stabilizer(
            (0..n).map(|c| Vertex::single(c as i32)).collect(),
        ));
        Ok(out)
    }

    fn index_constant(
        &self,
        _a: &usize,
        _b: &usize,
        _profile: &TruncationProfile,
    ) -> Result<BigUint> {
        Ok(BigUint::from(1u32))
    }

    fn format_element(&self, a: &usize) -> String {
        format!("{:?}", self.elements[*a])
    }

    fn format_handle(&self, u: &CosHandle) -> String {
        match self.tuple(u) {
            Ok(t) => format!(
                "G[{}]",
                t.iter()
                    .map(|c| format!("c{c}"))
                    .collect::<Vec<_>>()
                    .join(",")
            ),
            Err(_) => "unsupported handle".into(),
        }
    }
}

/// `S_n` on `{0..n-1}` generated by a transposition and an `n`-cycle.
pub fn symmetric_group_generators(n: usize) -> Vec<Perm> {
    let mut t: Perm = (0..n as u32).collect();
    t.swap(0, 1);
    let c: Perm = (0..n as u32).map(|i| (i + 1) % n as u32).collect();
    vec![t, c]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s3() -> Vec<Perm> {
        symmetric_group_generators(3)
    }

    #[test]
    fn s3_mod_transposition_is_triangle() {
        let inst =
            build_coset_graph(&s3(), &[vec![1, 0, 2]], &[vec![1, 2, 0], vec![2, 0, 1]]).unwrap();
        assert_eq!(inst.group_order(), 6);
        assert_eq!(inst.coset_count(), 3);
        assert_eq!(inst.coset_graph().edge_count(), 3);
        assert!(inst.is_connected());
    }

    #[test]
    fn whole_group_gives_single_vertex() {
        let inst = build_coset_graph(&s3(), &s3(), &[vec![1, 0, 2]]).unwrap();
        assert_eq!(inst.coset_count(), 1);
        assert_eq!(inst.coset_graph().edge_count(), 0);
    }

    #[test]
    fn trivial_subgroup_gives_cayley_graph() {
        let transpositions = vec![vec![1, 0, 2], vec![2, 1, 0], vec![0, 2, 1]];
        let inst = build_coset_graph(&s3(), &[], &transpositions).unwrap();
        assert_eq!(inst.coset_count(), 6);
        assert_eq!(inst.coset_graph().edge_count(), 9);
        assert!(inst.is_connected());
    }

    #[test]
    fn asymmetric_generators_rejected() {
        let r = build_coset_graph(&s3(), &[], &[vec![1, 2, 0]]);
        assert!(matches!(r, Err(Error::NotSymmetricGenerators)));
    }

    #[test]
    fn disconnected_is_flagged_not_fatal() {
        let inst = build_coset_graph(&s3(), &[], &[vec![1, 0, 2]]).unwrap();
        assert!(!inst.is_connected());
    }

    #[test]
    fn stabilizer_is_conjugate_subgroup() {
        let inst =
            build_coset_graph(&s3(), &[vec![1, 0, 2]], &[vec![1, 2, 0], vec![2, 0, 1]]).unwrap();
        for c in 0..inst.coset_count() {
            assert_eq!(inst.pointwise_stabilizer(&[c]), inst.conjugate_subgroup(c));
        }
    }
}
