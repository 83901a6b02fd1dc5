//! Concrete instances and the descriptors used to name them and their elements.

pub mod coset;
pub mod example;
pub mod ladder;
pub mod tree;

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde_json::Value;

use crate::error::{Error, Result};
use crate::graph::{FiniteGraph, Graph, Vertex};
use crate::isometry::{IdentityMap, Isometry};

pub use coset::{build_coset_graph, CosetInstance, Perm};
pub use example::{build_example_group, ExampleElement, ExampleGroup};
pub use ladder::{build_ladder, LadderGraph, LadderMove};
pub use tree::{build_tree, TreeAut, TreeInstance, TreeOp};

fn parse_err(reason: impl Into<String>) -> Error {
    Error::ParseError {
        line: 0,
        reason: reason.into(),
    }
}

/// A loaded instance of any kind.
#[derive(Debug, Clone)]
pub enum AnyInstance {
    Tree(TreeInstance),
    Example(ExampleGroup),
    Coset(CosetInstance),
    Ladder(LadderGraph),
    File(FiniteGraph),
}

impl AnyInstance {
    /// `tree:3`, `example:2`, `ladder`, `ladder:3`, `file:path`, a JSON
    /// descriptor, or a path to a JSON descriptor file.
    pub fn parse(spec: &str, horizon: usize) -> Result<AnyInstance> {
        let spec = spec.trim();
        if spec.starts_with('{') {
            let v: Value = serde_json::from_str(spec).map_err(|e| Error::ParseError {
                line: e.line(),
                reason: e.to_string(),
            })?;
            return AnyInstance::from_json(&v, horizon);
        }
        let (kind, arg) = spec.split_once(':').unwrap_or((spec, ""));
        let num = |default: usize| -> Result<usize> {
            if arg.is_empty() {
                Ok(default)
            } else {
                arg.parse()
                    .map_err(|_| parse_err(format!("bad parameter {arg:?} in {spec:?}")))
            }
        };
        match kind {
            "tree" => Ok(AnyInstance::Tree(build_tree(num(3)?, horizon)?)),
            "example" => Ok(AnyInstance::Example(build_example_group(num(2)? as u32)?)),
            "ladder" => Ok(AnyInstance::Ladder(build_ladder(num(2)?)?)),
            "file" => AnyInstance::load(Path::new(arg), horizon),
            _ if Path::new(spec).exists() => AnyInstance::load(Path::new(spec), horizon),
            _ => Err(parse_err(format!("unknown instance {spec:?}"))),
        }
    }

    /// Reads either a descriptor file or a finite graph file.
    pub fn load(path: &Path, horizon: usize) -> Result<AnyInstance> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| parse_err(format!("{}: {e}", path.display())))?;
        let v: Value = serde_json::from_str(&text).map_err(|e| Error::ParseError {
            line: e.line(),
            reason: e.to_string(),
        })?;
        if v.get("kind").is_some() {
            AnyInstance::from_json(&v, horizon)
        } else {
            FiniteGraph::load(path).map(AnyInstance::File)
        }
    }

    pub fn from_json(v: &Value, horizon: usize) -> Result<AnyInstance> {
        let kind = v
            .get("kind")
            .and_then(Value::as_str)
            .ok_or_else(|| parse_err("descriptor needs a \"kind\""))?;
        let int = |key: &str, default: u64| v.get(key).and_then(Value::as_u64).unwrap_or(default);
        match kind {
            "tree" => Ok(AnyInstance::Tree(build_tree(
                int("degree", 3) as usize,
                horizon,
            )?)),
            "example" => Ok(AnyInstance::Example(build_example_group(
                int("order", 2) as u32
            )?)),
            "ladder" => Ok(AnyInstance::Ladder(build_ladder(int("width", 2) as usize)?)),
            "file" => {
                let p = v
                    .get("path")
                    .and_then(Value::as_str)
                    .ok_or_else(|| parse_err("file descriptor needs \"path\""))?;
                FiniteGraph::load(Path::new(p)).map(AnyInstance::File)
            }
            "coset" => {
                let perms = |key: &str| -> Result<Vec<Perm>> {
                    match v.get(key) {
                        None => Ok(Vec::new()),
                        Some(x) => serde_json::from_value(x.clone())
                            .map_err(|e| parse_err(format!("{key}: {e}"))),
                    }
                };
                Ok(AnyInstance::Coset(build_coset_graph(
                    &perms("group")?,
                    &perms("subgroup")?,
                    &perms("gens")?,
                )?))
            }
            other => Err(parse_err(format!("unknown instance kind {other:?}"))),
        }
    }

    pub fn graph(&self) -> Option<&dyn Graph> {
        match self {
            AnyInstance::Tree(t) => Some(t),
            AnyInstance::Example(_) => None,
            AnyInstance::Coset(c) => Some(c.coset_graph()),
            AnyInstance::Ladder(l) => Some(l),
            AnyInstance::File(f) => Some(f),
        }
    }

    pub fn name(&self) -> String {
        match self {
            AnyInstance::Tree(t) => Graph::name(t),
            AnyInstance::Example(e) => crate::cos::GroupInstance::name(e),
            AnyInstance::Coset(c) => crate::cos::GroupInstance::name(c),
            AnyInstance::Ladder(l) => l.name(),
            AnyInstance::File(f) => f.name(),
        }
    }

    pub fn parse_element(&self, spec: &str) -> Result<AnyElement> {
        match self {
            AnyInstance::Tree(t) => parse_tree_element(t, spec).map(AnyElement::Tree),
            AnyInstance::Example(_) => parse_example_element(spec).map(AnyElement::Example),
            AnyInstance::Coset(c) => parse_coset_element(c, spec).map(AnyElement::Coset),
            AnyInstance::Ladder(l) => parse_ladder_element(l, spec).map(AnyElement::Ladder),
            AnyInstance::File(f) => parse_file_element(f, spec).map(AnyElement::Permutation),
        }
    }
}

/// An element of any instance.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyElement {
    Tree(TreeAut),
    Example(ExampleElement),
    Coset(usize),
    Ladder(Option<LadderMove>),
    Permutation(PermutationIsometry),
}

/// An explicit vertex permutation of a finite graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutationIsometry {
    forward: Vec<usize>,
    backward: Vec<usize>,
    label: String,
}

impl PermutationIsometry {
    /// Validates bijectivity and adjacency preservation.
    pub fn new(g: &FiniteGraph, forward: Vec<usize>, label: impl Into<String>) -> Result<Self> {
        let n = g.len();
        if forward.len() != n {
            return Err(Error::InvariantViolation(format!(
                "map covers {} of {n} vertices",
                forward.len()
            )));
        }
        let mut backward = vec![usize::MAX; n];
        for (i, &j) in forward.iter().enumerate() {
            if j >= n || backward[j] != usize::MAX {
                return Err(Error::InvariantViolation(format!(
                    "map is not a bijection at {:?}",
                    g.vertex_name(i)
                )));
            }
            backward[j] = i;
        }
        for (a, row) in g.adjacency().iter().enumerate() {
            for &b in row {
                if !g.adjacency()[forward[a]].contains(&forward[b]) {
                    return Err(Error::InvariantViolation(format!(
                        "edge ({:?}, {:?}) is not mapped to an edge",
                        g.vertex_name(a),
                        g.vertex_name(b)
                    )));
                }
            }
        }
        Ok(PermutationIsometry {
            forward,
            backward,
            label: label.into(),
        })
    }

    pub fn identity(n: usize) -> Self {
        PermutationIsometry {
            forward: (0..n).collect(),
            backward: (0..n).collect(),
            label: "identity".into(),
        }
    }

    /// Parses `{"map": {"a": "b", ...}}`; unlisted vertices are fixed.
    pub fn from_json(g: &FiniteGraph, text: &str) -> Result<Self> {
        #[derive(serde::Deserialize)]
        struct MapFile {
            map: HashMap<String, String>,
        }
        let f: MapFile = serde_json::from_str(text).map_err(|e| Error::ParseError {
            line: e.line(),
            reason: e.to_string(),
        })?;
        let mut forward: Vec<usize> = (0..g.len()).collect();
        for (a, b) in &f.map {
            let ia = g
                .index_of(a)
                .ok_or_else(|| Error::InvariantViolation(format!("unknown vertex {a:?}")))?;
            let ib = g
                .index_of(b)
                .ok_or_else(|| Error::InvariantViolation(format!("unknown vertex {b:?}")))?;
            forward[ia] = ib;
        }
        PermutationIsometry::new(g, forward, "map")
    }
}

impl Isometry for PermutationIsometry {
    fn forward(&self, v: &Vertex) -> Vertex {
        Vertex::single(self.forward[v.code()[0] as usize] as i32)
    }
    fn backward(&self, v: &Vertex) -> Vertex {
        Vertex::single(self.backward[v.code()[0] as usize] as i32)
    }
    fn label(&self) -> String {
        self.label.clone()
    }
}

impl AnyElement {
    /// The element as a graph isometry, when the instance has a graph.
    pub fn as_isometry<'a>(&'a self, inst: &'a AnyInstance) -> Option<Box<dyn Isometry + 'a>> {
        match (self, inst) {
            (AnyElement::Tree(a), _) => Some(Box::new(a.clone())),
            (AnyElement::Coset(g), AnyInstance::Coset(c)) => {
                crate::cos::GroupInstance::isometry(c, g)
            }
            (AnyElement::Ladder(Some(m)), _) => Some(Box::new(*m)),
            (AnyElement::Ladder(None), _) => Some(Box::new(IdentityMap)),
            (AnyElement::Permutation(p), _) => Some(Box::new(p.clone())),
            _ => None,
        }
    }
}

fn parse_json(spec: &str) -> Result<Value> {
    serde_json::from_str(spec).map_err(|e| Error::ParseError {
        line: e.line(),
        reason: e.to_string(),
    })
}

fn read_spec(spec: &str) -> Result<String> {
    let spec = spec.trim();
    if let Some(p) = spec.strip_prefix('@') {
        std::fs::read_to_string(p).map_err(|e| parse_err(format!("{p}: {e}")))
    } else {
        Ok(spec.to_string())
    }
}

fn perm_from_value(t: &TreeInstance, v: &Value) -> Result<Vec<i32>> {
    let p: Vec<i32> = match v {
        Value::String(s) => tree::parse_word(s)?,
        other => serde_json::from_value(other.clone())
            .map_err(|e| parse_err(format!("permutation: {e}")))?,
    };
    t.validate_perm(&p)?;
    Ok(p)
}

fn axis_letters(t: &TreeInstance, code: &str) -> Result<(i32, i32)> {
    let w = tree::parse_word(code)?;
    match w[..] {
        [a, b] if a != b && (a.max(b) as usize) < t.degree() => Ok((a, b)),
        _ => Err(parse_err(format!(
            "axis code {code:?} must be two distinct letters"
        ))),
    }
}

/// Tree elements: `identity`, `shift:l[:ab]`, `rotation:v:perm`,
/// `twist:u:perm`, `left:w`, a JSON descriptor, or `@file`.
pub fn parse_tree_element(t: &TreeInstance, spec: &str) -> Result<TreeAut> {
    let spec = read_spec(spec)?;
    let a = if spec.starts_with('{') {
        tree_element_from_json(t, &parse_json(&spec)?)?
    } else {
        let parts: Vec<&str> = spec.split(':').collect();
        match parts[..] {
            ["identity"] | ["id"] => TreeAut::identity(),
            ["shift", l] | ["shift", l, _] => {
                let step: usize = l
                    .parse()
                    .map_err(|_| parse_err(format!("bad step {l:?}")))?;
                let (a, b) = axis_letters(t, parts.get(2).copied().unwrap_or("01"))?;
                TreeAut::shift_by(t.degree(), a, b, step)
            }
            ["rotation", v, p] => TreeAut::rotation(
                &t.parse_vertex(v)?.0,
                perm_from_value(t, &Value::String(p.into()))?,
            ),
            ["twist", u, p] => TreeAut::twist(
                &t.parse_vertex(u)?.0,
                perm_from_value(t, &Value::String(p.into()))?,
            ),
            ["left", w] => TreeAut::left(&t.parse_vertex(w)?.0),
            _ => return Err(parse_err(format!("unknown tree element {spec:?}"))),
        }
    };
    t.validate_aut(&a)?;
    Ok(a)
}

fn tree_element_from_json(t: &TreeInstance, v: &Value) -> Result<TreeAut> {
    let kind = v
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| parse_err("element needs a \"kind\""))?;
    let sub = |key: &str| -> Result<TreeAut> {
        tree_element_from_json(
            t,
            v.get(key)
                .ok_or_else(|| parse_err(format!("{kind} needs {key:?}")))?,
        )
    };
    let word = |key: &str| -> Result<Vec<i32>> {
        let s = v
            .get(key)
            .and_then(Value::as_str)
            .ok_or_else(|| parse_err(format!("{kind} needs {key:?}")))?;
        Ok(t.parse_vertex(s)?.0)
    };
    let perm = |key: &str| {
        perm_from_value(
            t,
            v.get(key)
                .ok_or_else(|| parse_err(format!("{kind} needs {key:?}")))?,
        )
    };
    Ok(match kind {
        "identity" => TreeAut::identity(),
        "translation" => {
            let code = v.get("axis_code").and_then(Value::as_str).unwrap_or("01");
            let (a, b) = axis_letters(t, code)?;
            let step = v.get("step").and_then(Value::as_u64).unwrap_or(1) as usize;
            TreeAut::shift_by(t.degree(), a, b, step)
        }
        "rotation" => TreeAut::rotation(&word("fixed")?, perm("local_perm")?),
        "twist" => TreeAut::twist(&word("at")?, perm("perm")?),
        "left" => TreeAut::left(&word("word")?),
        "inverse" => sub("of")?.inverse(),
        "power" => sub("of")?.power(v.get("exp").and_then(Value::as_i64).unwrap_or(1)),
        "conjugate" => sub("of")?.conjugate_by(&sub("by")?),
        "compose" => {
            let list = v
                .get("of")
                .and_then(Value::as_array)
                .ok_or_else(|| parse_err("compose needs a list \"of\""))?;
            let mut acc = TreeAut::identity();
            for item in list {
                acc = acc.then_after(&tree_element_from_json(t, item)?);
            }
            acc
        }
        other => return Err(parse_err(format!("unknown tree element kind {other:?}"))),
    })
}

/// Example-group elements: `identity`, `a`, `a-inverse`, `a^n`, or
/// `{"shift": n, "first": {"i": v}, "second": {...}}`.
pub fn parse_example_element(spec: &str) -> Result<ExampleElement> {
    let spec = read_spec(spec)?;
    match spec.as_str() {
        "identity" | "id" => return Ok(ExampleElement::default()),
        "a" => return Ok(ExampleElement::alpha_power(1)),
        "a-inverse" | "a^-1" => return Ok(ExampleElement::alpha_power(-1)),
        _ => {}
    }
    if let Some(n) = spec.strip_prefix("a^") {
        let n: i64 = n
            .parse()
            .map_err(|_| parse_err(format!("bad exponent in {spec:?}")))?;
        return Ok(ExampleElement::alpha_power(n));
    }
    if spec.starts_with('{') {
        let v = parse_json(&spec)?;
        let coords = |key: &str| -> Result<BTreeMap<i64, u32>> {
            let mut out = BTreeMap::new();
            if let Some(obj) = v.get(key).and_then(Value::as_object) {
                for (k, x) in obj {
                    let i: i64 = k
                        .parse()
                        .map_err(|_| parse_err(format!("bad coordinate {k:?}")))?;
                    let x = x
                        .as_u64()
                        .ok_or_else(|| parse_err(format!("bad value at {k:?}")))?
                        as u32;
                    if x != 0 {
                        out.insert(i, x);
                    }
                }
            }
            Ok(out)
        };
        return Ok(ExampleElement {
            first: coords("first")?,
            second: coords("second")?,
            shift: v.get("shift").and_then(Value::as_i64).unwrap_or(0),
        });
    }
    Err(parse_err(format!("unknown example element {spec:?}")))
}

/// Checks that coordinates lie in `F`.
pub fn validate_example_element(g: &ExampleGroup, e: &ExampleElement) -> Result<()> {
    if e.first
        .values()
        .chain(e.second.values())
        .any(|&x| x >= g.order())
    {
        return Err(Error::InvariantViolation(format!(
            "coordinate outside Z/{}",
            g.order()
        )));
    }
    Ok(())
}

/// Coset-graph elements: `identity`, `g<i>` (element index) or a permutation `[..]`.
pub fn parse_coset_element(c: &CosetInstance, spec: &str) -> Result<usize> {
    let spec = read_spec(spec)?;
    if spec == "identity" || spec == "id" {
        return Ok(0);
    }
    if let Some(i) = spec.strip_prefix('g') {
        let i: usize = i
            .parse()
            .map_err(|_| parse_err(format!("bad element {spec:?}")))?;
        return if i < c.group_order() {
            Ok(i)
        } else {
            Err(parse_err(format!("element {i} out of range")))
        };
    }
    let p: Perm = serde_json::from_str(&spec)
        .map_err(|e| parse_err(format!("bad permutation {spec:?}: {e}")))?;
    c.element_index(&p)
        .ok_or_else(|| Error::InvariantViolation(format!("{p:?} is not in the group")))
}

/// Ladder elements: `identity`, `shift:k`, `glide:k`.
pub fn parse_ladder_element(l: &LadderGraph, spec: &str) -> Result<Option<LadderMove>> {
    let spec = read_spec(spec)?;
    let parts: Vec<&str> = spec.split(':').collect();
    let step = |s: Option<&&str>| -> Result<i32> {
        s.map_or(Ok(1), |x| {
            x.parse()
                .map_err(|_| parse_err(format!("bad step in {spec:?}")))
        })
    };
    match parts.first().copied() {
        Some("identity") | Some("id") => Ok(None),
        Some("shift") => Ok(Some(LadderMove::shift(l, step(parts.get(1))?))),
        Some("glide") => Ok(Some(LadderMove::glide(l, step(parts.get(1))?))),
        _ => Err(parse_err(format!("unknown ladder element {spec:?}"))),
    }
}

/// Finite-graph elements: `identity`, `{"map": {...}}` or `@file`.
pub fn parse_file_element(g: &FiniteGraph, spec: &str) -> Result<PermutationIsometry> {
    let text = read_spec(spec)?;
    if text == "identity" || text == "id" {
        return Ok(PermutationIsometry::identity(g.len()));
    }
    if !text.starts_with('{') && Path::new(&text).exists() {
        let body = std::fs::read_to_string(&text).map_err(|e| parse_err(format!("{text}: {e}")))?;
        return PermutationIsometry::from_json(g, &body);
    }
    PermutationIsometry::from_json(g, &text)
}

/// Loads an isometry specification file for the given instance.
pub fn load_isometry(path: &Path, inst: &AnyInstance) -> Result<AnyElement> {
    inst.parse_element(&format!("@{}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instance_shorthands() {
        assert!(matches!(
            AnyInstance::parse("tree:3", 8).unwrap(),
            AnyInstance::Tree(_)
        ));
        assert!(matches!(
            AnyInstance::parse("example:2", 8).unwrap(),
            AnyInstance::Example(_)
        ));
        assert!(matches!(
            AnyInstance::parse("ladder", 8).unwrap(),
            AnyInstance::Ladder(_)
        ));
        assert!(
            matches!(AnyInstance::parse(r#"{"kind":"tree","degree":4}"#, 8).unwrap(), AnyInstance::Tree(t) if t.degree() == 4)
        );
        assert!(AnyInstance::parse("tree:2", 8).is_err());
        assert!(AnyInstance::parse("nonsense", 8).is_err());
    }

    #[test]
    fn tree_element_forms_agree() {
        let t = build_tree(3, 8).unwrap();
        let a = parse_tree_element(&t, "shift:2:01").unwrap();
        let b =
            parse_tree_element(&t, r#"{"kind":"translation","axis_code":"01","step":2}"#).unwrap();
        for v in t.ball_vertices().iter().take(40) {
            assert_eq!(a.forward(v), b.forward(v));
        }
        let r = parse_tree_element(
            &t,
            r#"{"kind":"rotation","fixed":"0","local_perm":[0,2,1]}"#,
        )
        .unwrap();
        assert_eq!(r.forward(&Vertex::new(vec![0])), Vertex::new(vec![0]));
        assert!(parse_tree_element(&t, "shift:1:00").is_err());
        assert!(parse_tree_element(&t, "twist:0:102").is_err());
    }

    #[test]
    fn example_shorthands() {
        assert_eq!(parse_example_element("a").unwrap().shift, 1);
        assert_eq!(parse_example_element("a-inverse").unwrap().shift, -1);
        assert_eq!(parse_example_element("a^-3").unwrap().shift, -3);
        let e = parse_example_element(r#"{"shift":2,"first":{"-1":1},"second":{}}"#).unwrap();
        assert_eq!(e.first.get(&-1), Some(&1));
    }

    #[test]
    fn permutation_breaking_adjacency_names_edge() {
        let g = FiniteGraph::path(4);
        let err = PermutationIsometry::from_json(&g, r#"{"map":{"0":"1","1":"0"}}"#).unwrap_err();
        match err {
            Error::InvariantViolation(m) => assert!(m.contains("edge"), "{m}"),
            other => panic!("{other:?}"),
        }
        let flip =
            PermutationIsometry::from_json(&g, r#"{"map":{"0":"3","1":"2","2":"1","3":"0"}}"#)
                .unwrap();
        assert_eq!(flip.forward(&Vertex::single(1)), Vertex::single(2));
    }
}
