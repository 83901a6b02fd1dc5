//! The regular tree `T_{q+1}` with its full automorphism group.
//!
//! Vertices are reduced words over the letters `0..=q` (no letter repeated
//! twice in a row); the root is the empty word and `w` is adjacent to `w·a`
//! for every letter `a`, where appending the last letter deletes it.

use std::collections::{HashSet, VecDeque};

use num_bigint::BigUint;

use crate::cos::{CosHandle, GroupInstance};
use crate::error::{Error, Result};
use crate::graph::{ball, Graph, Vertex};
use crate::isometry::{min_displacement, Isometry};
use crate::profile::TruncationProfile;

const LETTERS: &[u8] = b"0123456789abcdefghijklmnopqrstuvwxyz";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeInstance {
    degree: usize,
    horizon: usize,
}

/// The tree of the given degree; `horizon` is the default radius of ball enumerations.
pub fn build_tree(degree: usize, horizon: usize) -> Result<TreeInstance> {
    if degree < 3 {
        return Err(Error::ArityTooSmall(degree));
    }
    if degree > LETTERS.len() {
        return Err(Error::Unsupported(format!(
            "degree {degree} exceeds {}",
            LETTERS.len()
        )));
    }
    Ok(TreeInstance { degree, horizon })
}

/// `u·v`, reduced.
pub fn word_mul(u: &[i32], v: &[i32]) -> Vec<i32> {
    let mut out = u.to_vec();
    for &x in v {
        if out.last() == Some(&x) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    out
}

pub fn word_inverse(w: &[i32]) -> Vec<i32> {
    w.iter().rev().copied().collect()
}

fn lcp(u: &[i32], v: &[i32]) -> usize {
    u.iter().zip(v).take_while(|(a, b)| a == b).count()
}

pub fn tree_distance(u: &[i32], v: &[i32]) -> usize {
    u.len() + v.len() - 2 * lcp(u, v)
}

/// Vertices of the geodesic from `u` to `v`.
pub fn tree_path(u: &[i32], v: &[i32]) -> Vec<Vertex> {
    let p = lcp(u, v);
    let mut out: Vec<Vertex> = (p..=u.len())
        .rev()
        .map(|i| Vertex::new(u[..i].to_vec()))
        .collect();
    out.extend((p + 1..=v.len()).map(|i| Vertex::new(v[..i].to_vec())));
    out
}

/// Vertices of the convex hull of a finite set.
pub fn hull(vs: &[Vertex]) -> HashSet<Vertex> {
    let mut out = HashSet::new();
    if let Some(first) = vs.first() {
        out.insert(first.clone());
        for v in &vs[1..] {
            out.extend(tree_path(first.code(), v.code()));
        }
    }
    out
}

impl TreeInstance {
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `q`, one less than the degree.
    pub fn q(&self) -> u64 {
        self.degree as u64 - 1
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// The ball of radius `horizon` about the root.
    pub fn ball_vertices(&self) -> Vec<Vertex> {
        ball(self, &Vertex::default(), self.horizon)
    }

    pub fn is_reduced(&self, w: &[i32]) -> bool {
        w.iter().all(|&a| a >= 0 && (a as usize) < self.degree)
            && w.windows(2).all(|p| p[0] != p[1])
    }

    pub fn validate_word(&self, w: &[i32]) -> Result<()> {
        if self.is_reduced(w) {
            Ok(())
        } else {
            Err(Error::InvariantViolation(format!(
                "{w:?} is not a reduced word for degree {}",
                self.degree
            )))
        }
    }

    pub fn validate_perm(&self, p: &[i32]) -> Result<()> {
        let mut seen = vec![false; self.degree];
        if p.len() != self.degree {
            return Err(Error::InvalidIsometry(format!(
                "permutation has {} entries, expected {}",
                p.len(),
                self.degree
            )));
        }
        for &x in p {
            if x < 0 || x as usize >= self.degree || std::mem::replace(&mut seen[x as usize], true)
            {
                return Err(Error::InvalidIsometry(format!(
                    "{p:?} is not a permutation"
                )));
            }
        }
        Ok(())
    }

    pub fn validate_aut(&self, a: &TreeAut) -> Result<()> {
        for op in &a.ops {
            match op {
                TreeOp::Left(w) => self.validate_word(w)?,
                TreeOp::Perm(p) => self.validate_perm(p)?,
                TreeOp::Twist(u, p) => {
                    self.validate_word(u)?;
                    self.validate_perm(p)?;
                    if let Some(&last) = u.last() {
                        if p[last as usize] != last {
                            return Err(Error::InvalidIsometry(format!(
                                "twist at {} must fix the letter {}",
                                format_word(u),
                                LETTERS[last as usize] as char
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// `[G_A : G_A ∩ G_B]`, grown vertex by vertex from the hull of `A` to the
    /// hull of `A ∪ B`: each new vertex contributes the number of unfixed
    /// neighbours of its parent.
    pub fn tuple_index(&self, a: &[Vertex], b: &[Vertex]) -> BigUint {
        let inner = hull(a);
        let mut both: Vec<Vertex> = a.to_vec();
        both.extend_from_slice(b);
        let outer = hull(&both);
        let mut fixed = inner.clone();
        let mut start: Vec<Vertex> = inner.into_iter().collect();
        start.sort();
        let mut queue: VecDeque<Vertex> = start.into();
        let mut acc = BigUint::from(1u32);
        let mut small: u64 = 1;
        while let Some(p) = queue.pop_front() {
            let nbrs = self.neighbors(&p);
            for y in &nbrs {
                if outer.contains(y) && !fixed.contains(y) {
                    let free = nbrs.iter().filter(|z| !fixed.contains(*z)).count() as u64;
                    small *= free;
                    if small > u32::MAX as u64 {
                        acc *= small;
                        small = 1;
                    }
                    fixed.insert(y.clone());
                    queue.push_back(y.clone());
                }
            }
        }
        acc * small
    }

    /// Orbit size of `v` under `G_u`: `(q+1) q^(d-1)` for `d >= 1`, else 1.
    pub fn sphere_count(&self, d: usize) -> BigUint {
        if d == 0 {
            BigUint::from(1u32)
        } else {
            BigUint::from(self.degree as u64) * num_traits::pow(BigUint::from(self.q()), d - 1)
        }
    }

    /// Minimal-displacement vertex of `a` nearest the root.
    pub fn anchor(&self, a: &TreeAut, profile: &TruncationProfile) -> Result<(usize, Vertex)> {
        min_displacement(self, a, profile)
    }
}

pub fn format_word(w: &[i32]) -> String {
    w.iter().map(|&a| LETTERS[a as usize] as char).collect()
}

pub fn parse_word(s: &str) -> Result<Vec<i32>> {
    let s = s.trim();
    if s == "root" || s == "-" {
        return Ok(Vec::new());
    }
    s.bytes()
        .map(|c| {
            LETTERS
                .iter()
                .position(|&l| l == c.to_ascii_lowercase())
                .map(|i| i as i32)
                .ok_or_else(|| Error::ParseError {
                    line: 0,
                    reason: format!("bad letter {:?} in word {s:?}", c as char),
                })
        })
        .collect()
}

impl Graph for TreeInstance {
    fn neighbors(&self, v: &Vertex) -> Vec<Vertex> {
        let w = v.code();
        let mut out = Vec::with_capacity(self.degree);
        if let Some((_, parent)) = w.split_last() {
            out.push(Vertex::new(parent.to_vec()));
        }
        for a in 0..self.degree as i32 {
            if w.last() != Some(&a) {
                let mut c = w.to_vec();
                c.push(a);
                out.push(Vertex::new(c));
            }
        }
        out
    }

    fn basepoint(&self) -> Vertex {
        Vertex::default()
    }

    fn contains(&self, v: &Vertex) -> bool {
        self.is_reduced(v.code())
    }

    fn exact_distance(&self, u: &Vertex, v: &Vertex) -> Option<usize> {
        Some(tree_distance(u.code(), v.code()))
    }

    fn has_exact_distance(&self) -> bool {
        true
    }

    fn format_vertex(&self, v: &Vertex) -> String {
        format_word(v.code())
    }

    fn parse_vertex(&self, s: &str) -> Result<Vertex> {
        let w = parse_word(s)?;
        self.validate_word(&w)?;
        Ok(Vertex::new(w))
    }

    fn name(&self) -> String {
        format!("tree:{}", self.degree)
    }
}

/// Generators of the automorphisms used here.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TreeOp {
    /// `x -> w·x`.
    Left(Vec<i32>),
    /// Letterwise permutation.
    Perm(Vec<i32>),
    /// `u·r -> u·π(r)` on words with prefix `u`, identity elsewhere; π fixes the last letter of `u`.
    Twist(Vec<i32>, Vec<i32>),
}

fn perm_inverse(p: &[i32]) -> Vec<i32> {
    let mut out = vec![0; p.len()];
    for (i, &x) in p.iter().enumerate() {
        out[x as usize] = i as i32;
    }
    out
}

fn apply_perm(p: &[i32], w: &[i32]) -> Vec<i32> {
    w.iter().map(|&a| p[a as usize]).collect()
}

impl TreeOp {
    fn apply(&self, x: &[i32]) -> Vec<i32> {
        match self {
            TreeOp::Left(w) => word_mul(w, x),
            TreeOp::Perm(p) => apply_perm(p, x),
            TreeOp::Twist(u, p) => {
                if x.len() >= u.len() && x[..u.len()] == u[..] {
                    let mut out = u.clone();
                    out.extend(apply_perm(p, &x[u.len()..]));
                    out
                } else {
                    x.to_vec()
                }
            }
        }
    }

    fn inverse(&self) -> TreeOp {
        match self {
            TreeOp::Left(w) => TreeOp::Left(word_inverse(w)),
            TreeOp::Perm(p) => TreeOp::Perm(perm_inverse(p)),
            TreeOp::Twist(u, p) => TreeOp::Twist(u.clone(), perm_inverse(p)),
        }
    }
}

/// A product of generators, applied right to left.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TreeAut {
    pub ops: Vec<TreeOp>,
    pub label: String,
}

fn transposition(n: usize, a: i32, b: i32) -> Vec<i32> {
    let mut p: Vec<i32> = (0..n as i32).collect();
    p.swap(a as usize, b as usize);
    p
}

impl TreeAut {
    pub fn identity() -> Self {
        TreeAut {
            ops: Vec::new(),
            label: "identity".into(),
        }
    }

    pub fn from_ops(ops: Vec<TreeOp>, label: impl Into<String>) -> Self {
        TreeAut {
            ops,
            label: label.into(),
        }
    }

    /// The unit translation along the line through the root with attracting
    /// ray `a, ab, aba, ...` and repelling ray `b, ba, bab, ...`:
    /// `x -> a·τ(x)` with τ the transposition of `a` and `b`.
    pub fn shift(degree: usize, a: i32, b: i32) -> Self {
        TreeAut {
            ops: vec![
                TreeOp::Left(vec![a]),
                TreeOp::Perm(transposition(degree, a, b)),
            ],
            label: format!(
                "shift:1:{}{}",
                LETTERS[a as usize] as char, LETTERS[b as usize] as char
            ),
        }
    }

    /// Translation of length `step` along the same line.
    pub fn shift_by(degree: usize, a: i32, b: i32, step: usize) -> Self {
        let unit = TreeAut::shift(degree, a, b);
        let mut out = unit.power(step as i64);
        out.label = format!(
            "shift:{step}:{}{}",
            LETTERS[a as usize] as char, LETTERS[b as usize] as char
        );
        out
    }

    /// `x -> v·π(v⁻¹·x)`: fixes `v` and permutes its neighbours by π.
    pub fn rotation(v: &[i32], perm: Vec<i32>) -> Self {
        TreeAut {
            ops: vec![
                TreeOp::Left(v.to_vec()),
                TreeOp::Perm(perm.clone()),
                TreeOp::Left(word_inverse(v)),
            ],
            label: format!("rotation:{}:{}", format_word(v), format_word(&perm)),
        }
    }

    pub fn twist(u: &[i32], perm: Vec<i32>) -> Self {
        TreeAut {
            ops: vec![TreeOp::Twist(u.to_vec(), perm.clone())],
            label: format!("twist:{}:{}", format_word(u), format_word(&perm)),
        }
    }

    pub fn left(w: &[i32]) -> Self {
        TreeAut {
            ops: vec![TreeOp::Left(w.to_vec())],
            label: format!("left:{}", format_word(w)),
        }
    }

    /// `self ∘ other`.
    pub fn then_after(&self, other: &TreeAut) -> TreeAut {
        let mut ops = self.ops.clone();
        ops.extend(other.ops.iter().cloned());
        TreeAut {
            ops,
            label: format!("{}*{}", self.label, other.label),
        }
    }

    pub fn inverse(&self) -> TreeAut {
        TreeAut {
            ops: self.ops.iter().rev().map(TreeOp::inverse).collect(),
            label: format!("({})^-1", self.label),
        }
    }

    pub fn power(&self, n: i64) -> TreeAut {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut ops = Vec::with_capacity(base.ops.len() * n.unsigned_abs() as usize);
        for _ in 0..n.unsigned_abs() {
            ops.extend(base.ops.iter().cloned());
        }
        TreeAut {
            ops,
            label: format!("({})^{n}", self.label),
        }
    }

    /// `h self h⁻¹`.
    pub fn conjugate_by(&self, h: &TreeAut) -> TreeAut {
        let mut out = h.then_after(self).then_after(&h.inverse());
        out.label = format!("{}.{}", h.label, self.label);
        out
    }

    pub fn apply(&self, x: &[i32]) -> Vec<i32> {
        let mut w = x.to_vec();
        for op in self.ops.iter().rev() {
            w = op.apply(&w);
        }
        w
    }

    pub fn apply_inverse(&self, x: &[i32]) -> Vec<i32> {
        let mut w = x.to_vec();
        for op in &self.ops {
            w = op.inverse().apply(&w);
        }
        w
    }
}

impl Isometry for TreeAut {
    fn forward(&self, v: &Vertex) -> Vertex {
        Vertex::new(self.apply(v.code()))
    }
    fn backward(&self, v: &Vertex) -> Vertex {
        Vertex::new(self.apply_inverse(v.code()))
    }
    fn label(&self) -> String {
        self.label.clone()
    }
}

impl GroupInstance for TreeInstance {
    type Element = TreeAut;

    fn name(&self) -> String {
        Graph::name(self)
    }

    fn identity(&self) -> TreeAut {
        TreeAut::identity()
    }

    fn compose(&self, a: &TreeAut, b: &TreeAut) -> TreeAut {
        a.then_after(b)
    }

    fn inverse(&self, a: &TreeAut) -> TreeAut {
        a.inverse()
    }

    fn power(&self, a: &TreeAut, n: i64) -> TreeAut {
        a.power(n)
    }

    fn validate_handle(&self, u: &CosHandle) -> Result<()> {
        match u {
            CosHandle::Stabilizer(vs) => {
                if vs.is_empty() {
                    return Err(Error::InvariantViolation(
                        "stabilizer tuple is empty".into(),
                    ));
                }
                if vs.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::InvariantViolation(
                        "stabilizer tuple is not sorted and duplicate-free".into(),
                    ));
                }
                vs.iter().try_for_each(|v| self.validate_word(v.code()))
            }
            CosHandle::Algebraic(_) => Err(Error::IncompatibleInstances),
        }
    }

    fn act(&self, a: &TreeAut, u: &CosHandle) -> Result<CosHandle> {
        match u {
            CosHandle::Stabilizer(vs) => {
                CosHandle::stabilizer(vs.iter().map(|v| a.forward(v)).collect())
            }
            CosHandle::Algebraic(_) => Err(Error::IncompatibleInstances),
        }
    }

    fn index(&self, u: &CosHandle, v: &CosHandle) -> Result<BigUint> {
        match (u, v) {
            (CosHandle::Stabilizer(a), CosHandle::Stabilizer(b)) => Ok(self.tuple_index(a, b)),
            _ => Err(Error::IncompatibleInstances),
        }
    }

    fn intersect(&self, u: &CosHandle, v: &CosHandle) -> Result<CosHandle> {
        match (u, v) {
            (CosHandle::Stabilizer(a), CosHandle::Stabilizer(b)) => {
                CosHandle::stabilizer(a.iter().chain(b).cloned().collect())
            }
            _ => Err(Error::IncompatibleInstances),
        }
    }

    fn is_subgroup(&self, v: &CosHandle, u: &CosHandle) -> Result<bool> {
        match (v, u) {
            (CosHandle::Stabilizer(b), CosHandle::Stabilizer(a)) => {
                let h = hull(b);
                Ok(a.iter().all(|x| h.contains(x)))
            }
            _ => Err(Error::IncompatibleInstances),
        }
    }

    fn graph(&self) -> Option<&dyn Graph> {
        Some(self)
    }

    fn isometry<'a>(&'a self, a: &TreeAut) -> Option<Box<dyn Isometry + 'a>> {
        Some(Box::new(a.clone()))
    }

    fn base_handle(&self, a: &TreeAut, profile: &TruncationProfile) -> Result<CosHandle> {
        let (_, v) = self.anchor(a, profile)?;
        CosHandle::stabilizer(vec![v])
    }

    fn limit_handle(&self, a: &TreeAut, profile: &TruncationProfile) -> Result<CosHandle> {
        let (_, v) = self.anchor(a, profile)?;
        let w = a.forward(&v);
        CosHandle::stabilizer(vec![v, w])
    }

    fn candidate_family(
        &self,
        a: &TreeAut,
        radius: usize,
        profile: &TruncationProfile,
    ) -> Result<Vec<CosHandle>> {
        let (_, c) = self.anchor(a, profile)?;
        let vs = ball(self, &c, radius);
        let mut out: Vec<CosHandle> = vs
            .iter()
            .map(|v| CosHandle::Stabilizer(vec![v.clone()]))
            .collect();
        for (i, x) in vs.iter().enumerate() {
            for y in &vs[i + 1..] {
                out.push(CosHandle::stabilizer(vec![x.clone(), y.clone()])?);
            }
        }
        Ok(out)
    }

    fn index_constant(
        &self,
        a: &TreeAut,
        b: &TreeAut,
        profile: &TruncationProfile,
    ) -> Result<BigUint> {
        let (la, u) = self.anchor(a, profile)?;
        let (lb, v) = self.anchor(b, profile)?;
        let e = tree_distance(u.code(), v.code()) + la.max(lb).max(1) - 1;
        Ok(BigUint::from(self.degree as u64) * num_traits::pow(BigUint::from(self.q()), e))
    }

    fn format_element(&self, a: &TreeAut) -> String {
        a.label.clone()
    }

    fn format_handle(&self, u: &CosHandle) -> String {
        match u {
            CosHandle::Stabilizer(vs) => {
                let parts: Vec<String> = vs
                    .iter()
                    .map(|v| format!("{:?}", format_word(v.code())))
                    .collect();
                format!("G[{}]", parts.join(","))
            }
            CosHandle::Algebraic(a) => format!("{a:?}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Vec<i32> {
        parse_word(s).unwrap()
    }

    #[test]
    fn ball_sizes() {
        let t = build_tree(3, 6).unwrap();
        assert_eq!(t.ball_vertices().len(), 190);
        assert_eq!(t.neighbors(&Vertex::default()).len(), 3);
        assert!(matches!(build_tree(2, 3), Err(Error::ArityTooSmall(2))));
    }

    #[test]
    fn neighbours_sorted_and_symmetric() {
        let t = build_tree(4, 3).unwrap();
        for v in t.ball_vertices() {
            let n = t.neighbors(&v);
            assert_eq!(n.len(), 4);
            assert!(n.windows(2).all(|p| p[0] < p[1]));
            for x in &n {
                assert!(t.neighbors(x).contains(&v));
            }
        }
    }

    #[test]
    fn shift_moves_along_coded_line() {
        let g = TreeAut::shift(3, 0, 1);
        assert_eq!(g.apply(&[]), w("0"));
        assert_eq!(g.apply(&w("0")), w("01"));
        assert_eq!(g.apply(&w("01")), w("010"));
        assert_eq!(g.apply_inverse(&[]), w("1"));
        assert_eq!(g.apply_inverse(&w("1")), w("10"));
        assert_eq!(g.apply_inverse(&g.apply(&w("2120"))), w("2120"));
    }

    #[test]
    fn twist_requires_fixed_letter() {
        let t = build_tree(3, 3).unwrap();
        let bad = TreeAut::twist(&w("0"), vec![1, 0, 2]);
        assert!(t.validate_aut(&bad).is_err());
        let good = TreeAut::twist(&w("0"), vec![0, 2, 1]);
        t.validate_aut(&good).unwrap();
        assert_eq!(good.apply(&w("01")), w("02"));
        assert_eq!(good.apply(&w("10")), w("10"));
    }

    #[test]
    fn rotation_fixes_centre() {
        let r = TreeAut::rotation(&w("01"), vec![1, 2, 0]);
        assert_eq!(r.apply(&w("01")), w("01"));
        assert_eq!(r.apply(&w("012")), w("010"));
        assert_eq!(r.apply(&w("0")), w("012"));
    }

    #[test]
    fn sphere_counts_match_tuple_index() {
        let t = build_tree(3, 4).unwrap();
        let root = vec![Vertex::default()];
        for v in t.ball_vertices() {
            let d = v.code().len();
            assert_eq!(t.tuple_index(&root, &[v.clone()]), t.sphere_count(d));
        }
        assert_eq!(t.sphere_count(3), BigUint::from(12u32));
    }
}
