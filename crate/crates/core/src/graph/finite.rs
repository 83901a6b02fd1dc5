use std::collections::{HashMap, HashSet, VecDeque};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use super::{Graph, Vertex};
use crate::error::{Error, Result};

/// A finite simple graph. Vertex `i` has code `[i]`, in file order.
#[derive(Debug, Clone)]
pub struct FiniteGraph {
    names: Vec<String>,
    index: HashMap<String, usize>,
    adj: Vec<Vec<usize>>,
    // All-pairs distances, `u32::MAX` for different components.
    dist: Vec<Vec<u32>>,
    label: String,
}

#[derive(Deserialize)]
struct GraphFile {
    vertices: Vec<String>,
    edges: Vec<(String, String)>,
}

impl FiniteGraph {
    pub fn new(
        names: Vec<String>,
        edges: &[(usize, usize)],
        label: impl Into<String>,
    ) -> Result<Self> {
        let n = names.len();
        let mut index = HashMap::new();
        for (i, name) in names.iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::InvariantViolation(format!(
                    "duplicate vertex {name:?}"
                )));
            }
        }
        let mut adj = vec![Vec::new(); n];
        let mut seen = HashSet::new();
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::InvariantViolation(format!(
                    "edge ({a}, {b}) names a missing vertex"
                )));
            }
            if a == b {
                return Err(Error::InvariantViolation(format!(
                    "self-loop at vertex {:?}",
                    names[a]
                )));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(Error::InvariantViolation(format!(
                    "duplicate edge ({:?}, {:?})",
                    names[a], names[b]
                )));
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        for row in &mut adj {
            row.sort_unstable();
        }
        let dist = (0..n).map(|s| bfs_row(&adj, s)).collect();
        Ok(FiniteGraph {
            names,
            index,
            adj,
            dist,
            label: label.into(),
        })
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        FiniteGraph::new(
            (0..n).map(|i| i.to_string()).collect(),
            edges,
            format!("graph:{n}"),
        )
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        let mut g = FiniteGraph::from_edges(n, &edges).expect("path is simple");
        g.label = format!("P{n}");
        g
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycle needs at least 3 vertices");
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        let mut g = FiniteGraph::from_edges(n, &edges).expect("cycle is simple");
        g.label = format!("C{n}");
        g
    }

    /// A random connected graph: a random spanning tree plus each remaining
    /// pair independently with probability `p`.
    pub fn random_connected(n: usize, p: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut edges = HashSet::new();
        for i in 1..n {
            let j = rng.random_range(0..i);
            edges.insert((j, i));
        }
        for i in 0..n {
            for j in i + 1..n {
                if !edges.contains(&(i, j)) && rng.random_bool(p) {
                    edges.insert((i, j));
                }
            }
        }
        let mut edges: Vec<_> = edges.into_iter().collect();
        edges.sort_unstable();
        let mut g = FiniteGraph::from_edges(n, &edges).expect("generated graph is simple");
        g.label = format!("random:{n}:{seed}");
        g
    }

    /// Parses the `{"vertices": [...], "edges": [[a, b], ...]}` format.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: GraphFile = serde_json::from_str(text).map_err(|e| Error::ParseError {
            line: e.line(),
            reason: e.to_string(),
        })?;
        let mut index = HashMap::new();
        for (i, name) in file.vertices.iter().enumerate() {
            if index.insert(name.as_str(), i).is_some() {
                return Err(Error::InvariantViolation(format!(
                    "duplicate vertex {name:?}"
                )));
            }
        }
        let mut edges = Vec::with_capacity(file.edges.len());
        for (a, b) in &file.edges {
            let ia = *index.get(a.as_str()).ok_or_else(|| {
                Error::InvariantViolation(format!("edge ({a:?}, {b:?}) names unknown vertex {a:?}"))
            })?;
            let ib = *index.get(b.as_str()).ok_or_else(|| {
                Error::InvariantViolation(format!("edge ({a:?}, {b:?}) names unknown vertex {b:?}"))
            })?;
            edges.push((ia, ib));
        }
        FiniteGraph::new(file.vertices.clone(), &edges, "file")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::ParseError {
            line: 0,
            reason: format!("{}: {e}", path.display()),
        })?;
        let mut g = FiniteGraph::from_json(&text)?;
        g.label = format!("file:{}", path.display());
        Ok(g)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn is_connected(&self) -> bool {
        self.dist
            .first()
            .is_none_or(|row| row.iter().all(|&d| d != u32::MAX))
    }

    pub fn vertex_name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adj
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    fn idx(v: &Vertex) -> Option<usize> {
        match v.code() {
            [i] if *i >= 0 => Some(*i as usize),
            _ => None,
        }
    }
}

fn bfs_row(adj: &[Vec<usize>], s: usize) -> Vec<u32> {
    let mut d = vec![u32::MAX; adj.len()];
    d[s] = 0;
    let mut q = VecDeque::from([s]);
    while let Some(x) = q.pop_front() {
        for &y in &adj[x] {
            if d[y] == u32::MAX {
                d[y] = d[x] + 1;
                q.push_back(y);
            }
        }
    }
    d
}

impl Graph for FiniteGraph {
    fn neighbors(&self, v: &Vertex) -> Vec<Vertex> {
        match FiniteGraph::idx(v).filter(|&i| i < self.len()) {
            Some(i) => self.adj[i]
                .iter()
                .map(|&j| Vertex::single(j as i32))
                .collect(),
            None => Vec::new(),
        }
    }

    fn basepoint(&self) -> Vertex {
        Vertex::single(0)
    }

    fn contains(&self, v: &Vertex) -> bool {
        FiniteGraph::idx(v).is_some_and(|i| i < self.len())
    }

    fn exact_distance(&self, u: &Vertex, v: &Vertex) -> Option<usize> {
        let (a, b) = (FiniteGraph::idx(u)?, FiniteGraph::idx(v)?);
        let d = *self.dist.get(a)?.get(b)?;
        (d != u32::MAX).then_some(d as usize)
    }

    fn has_exact_distance(&self) -> bool {
        true
    }

    fn vertices(&self) -> Option<Vec<Vertex>> {
        Some((0..self.len()).map(|i| Vertex::single(i as i32)).collect())
    }

    fn format_vertex(&self, v: &Vertex) -> String {
        match FiniteGraph::idx(v).filter(|&i| i < self.len()) {
            Some(i) => self.names[i].clone(),
            None => format!("{:?}", v.code()),
        }
    }

    fn parse_vertex(&self, s: &str) -> Result<Vertex> {
        self.index_of(s)
            .map(|i| Vertex::single(i as i32))
            .ok_or_else(|| Error::ParseError {
                line: 0,
                reason: format!("unknown vertex {s:?}"),
            })
    }

    fn name(&self) -> String {
        self.label.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loads_path_file() {
        let g = FiniteGraph::from_json(
            r#"{"vertices":["a","b","c","d","e"],"edges":[["a","b"],["b","c"],["c","d"],["d","e"]]}"#,
        )
        .unwrap();
        assert_eq!(g.len(), 5);
        assert_eq!(g.edge_count(), 4);
        assert!(g.is_connected());
        assert_eq!(g.parse_vertex("c").unwrap(), Vertex::single(2));
    }

    #[test]
    fn self_loop_names_vertex() {
        let err = FiniteGraph::from_json(r#"{"vertices":["a","b"],"edges":[["a","b"],["b","b"]]}"#)
            .unwrap_err();
        match err {
            Error::InvariantViolation(msg) => assert!(msg.contains("\"b\""), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_edge_names_pair() {
        let err = FiniteGraph::from_json(r#"{"vertices":["a","b"],"edges":[["a","b"],["b","a"]]}"#)
            .unwrap_err();
        match err {
            Error::InvariantViolation(msg) => assert!(msg.contains("duplicate edge"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_json_reports_line() {
        let err = FiniteGraph::from_json("{\n\"vertices\": [\"a\",\n").unwrap_err();
        assert!(matches!(err, Error::ParseError { line: 3, .. }), "{err:?}");
    }

    #[test]
    fn random_graph_is_connected_and_deterministic() {
        let a = FiniteGraph::random_connected(12, 0.2, 7);
        let b = FiniteGraph::random_connected(12, 0.2, 7);
        assert!(a.is_connected());
        assert_eq!(a.adjacency(), b.adjacency());
    }
}
