//! Locally finite graphs: vertices, BFS distances, tie-broken geodesics and
//! Gromov products.

mod finite;
mod hyperbolicity;

use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::half::HalfInt;

pub use finite::FiniteGraph;
pub use hyperbolicity::{
    check_fellow_travel, check_ribbon, check_standard_estimate, estimate_hyperbolicity,
    sequence_converges_at_infinity, slim_delta_all_geodesics, HyperbolicityReport, ScanPolicy,
};

/// A vertex is identified by its integer code; equality and order are those of the code.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize)]
pub struct Vertex(pub Vec<i32>);

impl Vertex {
    pub fn new(code: Vec<i32>) -> Self {
        Vertex(code)
    }

    pub fn single(i: i32) -> Self {
        Vertex(vec![i])
    }

    pub fn code(&self) -> &[i32] {
        &self.0
    }
}

/// A connected or disconnected, locally finite, simple graph whose vertices
/// can be enumerated lazily from their neighbours.
pub trait Graph: Send + Sync {
    /// Neighbours of `v` in increasing code order.
    fn neighbors(&self, v: &Vertex) -> Vec<Vertex>;

    fn basepoint(&self) -> Vertex;

    /// Whether `v` is a well-formed vertex code of this graph.
    fn contains(&self, v: &Vertex) -> bool;

    /// Closed-form metric, if the instance has one. `None` both when there is
    /// no closed form and when the vertices are in different components.
    fn exact_distance(&self, _u: &Vertex, _v: &Vertex) -> Option<usize> {
        None
    }

    fn has_exact_distance(&self) -> bool {
        false
    }

    /// All vertices, for finite graphs.
    fn vertices(&self) -> Option<Vec<Vertex>> {
        None
    }

    fn format_vertex(&self, v: &Vertex) -> String;

    fn parse_vertex(&self, s: &str) -> Result<Vertex>;

    fn name(&self) -> String;
}

/// BFS distance, bounded by `horizon`.
pub fn distance(g: &dyn Graph, u: &Vertex, v: &Vertex, horizon: usize) -> Result<usize> {
    if u == v {
        return Ok(0);
    }
    if g.has_exact_distance() {
        return match g.exact_distance(u, v) {
            Some(d) if d <= horizon => Ok(d),
            _ => Err(Error::Unreachable { horizon }),
        };
    }
    let mut seen: HashMap<Vertex, usize> = HashMap::new();
    let mut queue = VecDeque::new();
    seen.insert(u.clone(), 0);
    queue.push_back(u.clone());
    while let Some(x) = queue.pop_front() {
        let dx = seen[&x];
        if dx == horizon {
            continue;
        }
        for y in g.neighbors(&x) {
            if &y == v {
                return Ok(dx + 1);
            }
            if !seen.contains_key(&y) {
                seen.insert(y.clone(), dx + 1);
                queue.push_back(y);
            }
        }
    }
    Err(Error::Unreachable { horizon })
}

/// Distances from `source` to every vertex within `radius`.
pub fn bfs_distances(g: &dyn Graph, source: &Vertex, radius: usize) -> HashMap<Vertex, usize> {
    let mut seen: HashMap<Vertex, usize> = HashMap::new();
    let mut queue = VecDeque::new();
    seen.insert(source.clone(), 0);
    queue.push_back(source.clone());
    while let Some(x) = queue.pop_front() {
        let dx = seen[&x];
        if dx == radius {
            continue;
        }
        for y in g.neighbors(&x) {
            if !seen.contains_key(&y) {
                seen.insert(y.clone(), dx + 1);
                queue.push_back(y);
            }
        }
    }
    seen
}

/// The closed ball of the given radius, ordered by distance from the centre and then by code.
pub fn ball(g: &dyn Graph, center: &Vertex, radius: usize) -> Vec<Vertex> {
    let mut out: Vec<(usize, Vertex)> = bfs_distances(g, center, radius)
        .into_iter()
        .map(|(v, d)| (d, v))
        .collect();
    out.sort();
    out.into_iter().map(|(_, v)| v).collect()
}

/// A path given by its vertex sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct GeodesicPath {
    pub vertices: Vec<Vertex>,
}

impl GeodesicPath {
    pub fn new(vertices: Vec<Vertex>) -> Self {
        GeodesicPath { vertices }
    }

    pub fn len(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn start(&self) -> &Vertex {
        &self.vertices[0]
    }

    pub fn end(&self) -> &Vertex {
        self.vertices.last().expect("path has at least one vertex")
    }

    /// Checks adjacency of consecutive vertices and that the endpoints are at
    /// distance equal to the length.
    pub fn validate(&self, g: &dyn Graph, horizon: usize) -> Result<()> {
        if self.vertices.is_empty() {
            return Err(Error::NotGeodesic("empty path".into()));
        }
        for w in self.vertices.windows(2) {
            if !g.neighbors(&w[0]).contains(&w[1]) {
                return Err(Error::NotGeodesic(format!(
                    "{} and {} are not adjacent",
                    g.format_vertex(&w[0]),
                    g.format_vertex(&w[1])
                )));
            }
        }
        let d = distance(g, self.start(), self.end(), horizon.max(self.len()))?;
        if d != self.len() {
            return Err(Error::NotGeodesic(format!(
                "length {} but endpoints at distance {d}",
                self.len()
            )));
        }
        Ok(())
    }
}

/// The tie-broken geodesic from `u` to `v`.
///
/// The walk starts at the smaller code and always steps to the smallest
/// neighbour that is one closer to the target; the result is reversed when
/// needed, so `geodesic(u, v)` is the reverse of `geodesic(v, u)`.
pub fn geodesic(g: &dyn Graph, u: &Vertex, v: &Vertex, horizon: usize) -> Result<GeodesicPath> {
    let (a, b) = if u <= v { (u, v) } else { (v, u) };
    let d = distance(g, a, b, horizon)?;
    let dist_to_b: Box<dyn Fn(&Vertex) -> Option<usize>> = if g.has_exact_distance() {
        Box::new(move |x: &Vertex| g.exact_distance(x, b))
    } else {
        let table = bfs_distances(g, b, d);
        Box::new(move |x: &Vertex| table.get(x).copied())
    };
    let mut path = vec![a.clone()];
    let mut cur = a.clone();
    for step in (0..d).rev() {
        let next = g
            .neighbors(&cur)
            .into_iter()
            .find(|y| dist_to_b(y) == Some(step))
            .ok_or_else(|| Error::InvariantViolation("BFS layers inconsistent".into()))?;
        path.push(next.clone());
        cur = next;
    }
    if u > v {
        path.reverse();
    }
    Ok(GeodesicPath::new(path))
}

/// All geodesics from `u` to `v`, in lexicographic order of their vertex sequences.
pub fn all_geodesics(
    g: &dyn Graph,
    u: &Vertex,
    v: &Vertex,
    horizon: usize,
    cap: usize,
) -> Result<Vec<GeodesicPath>> {
    let d = distance(g, u, v, horizon)?;
    let table = bfs_distances(g, v, d);
    let mut out = Vec::new();
    let mut stack = vec![u.clone()];
    fn walk(
        g: &dyn Graph,
        table: &HashMap<Vertex, usize>,
        stack: &mut Vec<Vertex>,
        out: &mut Vec<GeodesicPath>,
        cap: usize,
    ) {
        if out.len() >= cap {
            return;
        }
        let cur = stack.last().unwrap().clone();
        let dc = table[&cur];
        if dc == 0 {
            out.push(GeodesicPath::new(stack.clone()));
            return;
        }
        for y in g.neighbors(&cur) {
            if table.get(&y) == Some(&(dc - 1)) {
                stack.push(y);
                walk(g, table, stack, out, cap);
                stack.pop();
            }
        }
    }
    walk(g, &table, &mut stack, &mut out, cap);
    Ok(out)
}

/// `(x|y)_p`, exact.
pub fn gromov_product(
    g: &dyn Graph,
    x: &Vertex,
    y: &Vertex,
    p: &Vertex,
    horizon: usize,
) -> Result<HalfInt> {
    let dxp = distance(g, x, p, horizon)? as i64;
    let dyp = distance(g, y, p, horizon)? as i64;
    let dxy = distance(g, x, y, horizon)? as i64;
    Ok(HalfInt::from_twice(dxp + dyp - dxy))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_graph_distances() {
        let g = FiniteGraph::path(5);
        let v = |i| Vertex::single(i);
        assert_eq!(distance(&g, &v(0), &v(4), 10).unwrap(), 4);
        assert_eq!(distance(&g, &v(2), &v(2), 0).unwrap(), 0);
        assert_eq!(
            distance(&g, &v(0), &v(4), 3),
            Err(Error::Unreachable { horizon: 3 })
        );
        let p = geodesic(&g, &v(0), &v(4), 10).unwrap();
        assert_eq!(p.vertices, (0..5).map(v).collect::<Vec<_>>());
        assert_eq!(geodesic(&g, &v(3), &v(3), 0).unwrap().len(), 0);
    }

    #[test]
    fn gromov_product_basics() {
        let g = FiniteGraph::path(5);
        let v = |i| Vertex::single(i);
        assert_eq!(
            gromov_product(&g, &v(0), &v(4), &v(2), 10).unwrap(),
            HalfInt::ZERO
        );
        assert_eq!(
            gromov_product(&g, &v(3), &v(1), &v(3), 10).unwrap(),
            HalfInt::ZERO
        );
        assert_eq!(
            gromov_product(&g, &v(4), &v(4), &v(1), 10).unwrap(),
            HalfInt::from_int(3)
        );
    }

    #[test]
    fn cycle_antipodal_geodesic_is_lexicographic_minimum() {
        let g = FiniteGraph::cycle(6);
        let v = |i| Vertex::single(i);
        let all = all_geodesics(&g, &v(0), &v(3), 10, 10).unwrap();
        assert_eq!(all.len(), 2);
        let chosen = geodesic(&g, &v(0), &v(3), 10).unwrap();
        assert_eq!(chosen, all[0]);
        assert_eq!(chosen.vertices, vec![v(0), v(1), v(2), v(3)]);
        let back = geodesic(&g, &v(3), &v(0), 10).unwrap();
        let mut rev = back.vertices.clone();
        rev.reverse();
        assert_eq!(rev, chosen.vertices);
    }

    #[test]
    fn disconnected_is_unreachable() {
        let g = FiniteGraph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        let r = distance(&g, &Vertex::single(0), &Vertex::single(3), 100);
        assert!(matches!(r, Err(Error::Unreachable { .. })));
    }

    #[test]
    fn validate_rejects_non_geodesic() {
        let g = FiniteGraph::cycle(6);
        let v = |i| Vertex::single(i);
        let p = GeodesicPath::new(vec![v(0), v(1), v(2), v(3), v(4)]);
        assert!(matches!(p.validate(&g, 10), Err(Error::NotGeodesic(_))));
        let q = GeodesicPath::new(vec![v(0), v(2)]);
        assert!(matches!(q.validate(&g, 10), Err(Error::NotGeodesic(_))));
    }
}
