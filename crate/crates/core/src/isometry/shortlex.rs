//! The short-lex axis construction: separate the near-axis region into
//! translated balls, colour edges by their orbit under a power of the
//! isometry, and thread short-lex paths between growing pairs of balls
//! through an inverse limit.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{
    apply_power, classify, hyperbolic_power, metric_horizon, verify_axis_window, window_half_width,
    AxisWindow, Isometry, Power,
};
use crate::error::{Error, Result};
use crate::graph::{ball, distance, estimate_hyperbolicity, Graph, ScanPolicy, Vertex};
use crate::half::HalfInt;
use crate::isometry::{solve_inverse_limit, InverseSystem};
use crate::profile::TruncationProfile;

type Edge = (Vertex, Vertex);

fn edge(a: &Vertex, b: &Vertex) -> Edge {
    if a <= b {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShortLexDiagnostics {
    /// Hyperbolicity constant measured near the starting vertex.
    pub delta: HalfInt,
    /// `120 delta + 1`, the literal ball radius, capped at the horizon.
    pub k_literal: usize,
    /// Smallest radius for which the separation checks passed.
    pub k: usize,
    /// Smallest power of the base translation giving separation and a proper colouring.
    pub multiplier: usize,
    /// Exponent of the isometry that the construction translates by.
    pub construction_power: usize,
    pub surrogate_vertices: usize,
    pub surrogate_edges: usize,
    /// Number of edge orbits (colours) in the surrogate.
    pub colors: usize,
    /// Edge orbits meeting the levels `-j..=j`, for growing `j`.
    pub edge_orbits_by_window: Vec<usize>,
    pub edge_orbits_stable: bool,
    /// `|X_i|` per level.
    pub level_sizes: Vec<usize>,
    pub threads_at_depth: usize,
    pub surviving_bound: usize,
    pub level_bound: usize,
    /// Level whose selected path was found invariant.
    pub invariant_level: usize,
    /// Colour rank of each window edge, in order.
    pub window_colors: Vec<usize>,
    /// Colour rank of every surrogate edge.
    #[serde(skip)]
    pub edge_colors: BTreeMap<Edge, usize>,
}

/// Geodesics between the far translates of a few minimal-displacement vertices.
struct Surrogate {
    adj: HashMap<Vertex, Vec<Vertex>>,
    edges: BTreeSet<Edge>,
}

impl Surrogate {
    fn new() -> Self {
        Surrogate {
            adj: HashMap::new(),
            edges: BTreeSet::new(),
        }
    }

    fn add_interval(&mut self, g: &dyn Graph, s: &Vertex, t: &Vertex, h: usize) -> Result<()> {
        let total = distance(g, s, t, h)?;
        let mut layer = vec![s.clone()];
        self.adj.entry(s.clone()).or_default();
        for k in 0..total {
            let mut next = BTreeSet::new();
            for x in &layer {
                for y in g.neighbors(x) {
                    if distance(g, &y, t, h)? == total - k - 1 {
                        self.add_edge(x, &y);
                        next.insert(y);
                    }
                }
            }
            layer = next.into_iter().collect();
        }
        Ok(())
    }

    fn add_edge(&mut self, a: &Vertex, b: &Vertex) {
        if self.edges.insert(edge(a, b)) {
            self.adj.entry(a.clone()).or_default().push(b.clone());
            self.adj.entry(b.clone()).or_default().push(a.clone());
        }
    }

    /// BFS distances inside the surrogate, avoiding `blocked`.
    fn bfs(&self, source: &Vertex, blocked: &dyn Fn(&Vertex) -> bool) -> HashMap<Vertex, usize> {
        let mut dist = HashMap::new();
        if blocked(source) {
            return dist;
        }
        dist.insert(source.clone(), 0);
        let mut queue = VecDeque::from([source.clone()]);
        while let Some(x) = queue.pop_front() {
            let dx = dist[&x];
            for y in &self.adj[&x] {
                if !dist.contains_key(y) && !blocked(y) {
                    dist.insert(y.clone(), dx + 1);
                    queue.push_back(y.clone());
                }
            }
        }
        dist
    }
}

struct Attempt {
    surrogate: Surrogate,
    /// Ball index `i` of each surrogate vertex lying in `B_i`.
    level: HashMap<Vertex, i64>,
    half_levels: i64,
}

/// Checks properties (i)-(iii) of the separating ball for `B = ball(v, k)`
/// translated by `hn`, on a window of `d` balls each side.
#[allow(clippy::too_many_arguments)]
fn separation(
    g: &dyn Graph,
    hn: &dyn Isometry,
    v: &Vertex,
    seeds: &[Vertex],
    k: usize,
    d: i64,
    metric: usize,
) -> Result<Option<Attempt>> {
    let far = d + 1;
    let mut surrogate = Surrogate::new();
    let sources: Vec<Vertex> = seeds.iter().map(|a| apply_power(hn, a, -far)).collect();
    let targets: Vec<Vertex> = seeds.iter().map(|b| apply_power(hn, b, far)).collect();
    for s in &sources {
        for t in &targets {
            surrogate.add_interval(g, s, t, metric)?;
        }
    }
    let centers: Vec<(i64, Vertex)> = (-far..=far).map(|i| (i, apply_power(hn, v, i))).collect();
    // (ii): each surrogate vertex lies in at most one translated ball.
    let mut level = HashMap::new();
    for x in surrogate.adj.keys() {
        let mut hit = None;
        for (i, c) in &centers {
            if distance(g, x, c, metric)? <= k {
                if hit.is_some() {
                    return Ok(None);
                }
                hit = Some(*i);
            }
        }
        if let Some(i) = hit {
            level.insert(x.clone(), i);
        }
    }
    let in_ball = |x: &Vertex, i: i64| level.get(x) == Some(&i);
    // (i): no geodesic between the far endpoints avoids B.
    for s in &sources {
        let dist = surrogate.bfs(s, &|x| in_ball(x, 0));
        for t in &targets {
            if dist.get(t) == Some(&distance(g, s, t, metric)?) {
                return Ok(None);
            }
        }
    }
    // (iii): geodesics from B_i to B_j cross every B_k in between.
    let mut members: BTreeMap<i64, Vec<Vertex>> = BTreeMap::new();
    for (x, &i) in &level {
        if i.abs() <= d {
            members.entry(i).or_default().push(x.clone());
        }
    }
    for list in members.values_mut() {
        list.sort();
    }
    for (&i, xs) in &members {
        for x in xs {
            let free = surrogate.bfs(x, &|_| false);
            for kk in i + 1..d {
                let avoiding = surrogate.bfs(x, &|y| in_ball(y, kk));
                for (&j, ys) in members.range(kk + 1..) {
                    debug_assert!(j > kk);
                    for y in ys {
                        let dg = distance(g, x, y, metric)?;
                        if free.get(y) == Some(&dg) && avoiding.get(y) == Some(&dg) {
                            return Ok(None);
                        }
                    }
                }
            }
        }
    }
    Ok(Some(Attempt {
        surrogate,
        level,
        half_levels: d,
    }))
}

/// Orbit colouring of surrogate edges under `hn`, ranked by a seeded shuffle.
/// `None` when some vertex of the core sees a colour twice.
fn coloring(att: &Attempt, hn: &dyn Isometry, seed: u64) -> Option<BTreeMap<Edge, usize>> {
    let edges: Vec<&Edge> = att.surrogate.edges.iter().collect();
    let index: HashMap<&Edge, usize> = edges.iter().enumerate().map(|(i, e)| (*e, i)).collect();
    let mut parent: Vec<usize> = (0..edges.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (i, (a, b)) in edges.iter().enumerate() {
        let image = edge(&hn.forward(a), &hn.forward(b));
        if let Some(&j) = index.get(&image) {
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            parent[ri.max(rj)] = ri.min(rj);
        }
    }
    // Components are keyed by their smallest edge; the edge list is sorted.
    let mut roots: Vec<usize> = (0..edges.len())
        .filter(|&i| find(&mut parent, i) == i)
        .collect();
    roots.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let rank: HashMap<usize, usize> = roots.iter().enumerate().map(|(r, &c)| (c, r)).collect();
    let colors: BTreeMap<Edge, usize> = edges
        .iter()
        .enumerate()
        .map(|(i, e)| ((*e).clone(), rank[&find(&mut parent, i)]))
        .collect();
    for (x, nbrs) in &att.surrogate.adj {
        if core_level(att, x).is_none_or(|l| l.abs() > att.half_levels) {
            continue;
        }
        let mut seen = HashSet::new();
        for y in nbrs {
            if !seen.insert(colors[&edge(x, y)]) {
                return None;
            }
        }
    }
    Some(colors)
}

/// Ball index of a surrogate vertex, or of the nearest ball when it lies in none.
fn core_level(att: &Attempt, x: &Vertex) -> Option<i64> {
    att.level.get(x).copied().or_else(|| {
        // Vertices between balls take the level of an adjacent ball vertex.
        att.surrogate
            .adj
            .get(x)?
            .iter()
            .filter_map(|y| att.level.get(y))
            .min_by_key(|l| l.abs())
            .copied()
    })
}

/// Short-lex path from `x` to `y` inside the surrogate: shortest, then
/// lexicographically smallest in (colour rank, vertex code) per step.
fn short_lex_path(
    att: &Attempt,
    colors: &BTreeMap<Edge, usize>,
    x: &Vertex,
    y: &Vertex,
) -> Option<Vec<Vertex>> {
    let to_y = att.surrogate.bfs(y, &|_| false);
    let mut cur = x.clone();
    let mut path = vec![cur.clone()];
    let mut remaining = *to_y.get(x)?;
    while remaining > 0 {
        let next = att.surrogate.adj[&cur]
            .iter()
            .filter(|w| to_y.get(*w) == Some(&(remaining - 1)))
            .min_by_key(|w| (colors[&edge(&cur, w)], (*w).clone()))?
            .clone();
        path.push(next.clone());
        cur = next;
        remaining -= 1;
    }
    Some(path)
}

/// The shortest segment of `path` running from `B_{-j}` to `B_j`, first in order on ties.
fn minimal_segment(att: &Attempt, path: &[Vertex], j: i64) -> Option<Vec<Vertex>> {
    let mut last_start = None;
    let mut best: Option<(usize, usize)> = None;
    for (idx, x) in path.iter().enumerate() {
        match att.level.get(x) {
            Some(&l) if l == -j => last_start = Some(idx),
            Some(&l) if l == j => {
                if let Some(a) = last_start {
                    if best.is_none_or(|(ba, bb)| idx - a < bb - ba) {
                        best = Some((a, idx));
                    }
                }
            }
            _ => {}
        }
    }
    best.map(|(a, b)| path[a..=b].to_vec())
}

/// Axis window via the short-lex construction. `color_seed` fixes the total
/// order on colours.
pub fn short_lex_axis(
    g: &dyn Graph,
    iso: &dyn Isometry,
    profile: &TruncationProfile,
    color_seed: u64,
) -> Result<(AxisWindow, ShortLexDiagnostics)> {
    if !classify(g, iso, profile)?.is_hyperbolic() {
        return Err(Error::NotHyperbolic);
    }
    let metric = metric_horizon(profile);
    let (p0, l0, v) = hyperbolic_power(g, iso, profile)?.ok_or(Error::NotHyperbolic)?;
    let h0 = Power {
        base: iso,
        exp: p0 as i64,
    };

    let near = ball(g, &v, profile.horizon.min(3));
    let report = estimate_hyperbolicity(g, &near, ScanPolicy::default().with_seed(profile.seed))?;
    let delta = report.delta_slim.max(report.delta_fourpoint);
    let k_literal = (60 * delta.twice() as usize + 1).min(profile.horizon);

    // Seeds for the surrogate: vertices near v translated minimally and linearly.
    let mut seeds = Vec::new();
    for x in ball(g, &v, l0) {
        if distance(g, &x, &h0.forward(&x), metric)? == l0
            && super::linear_growth(g, &h0, &x, l0, 4, metric)?
        {
            seeds.push(x);
        }
    }

    let reach = window_half_width(profile);
    let mut coloring_failed = false;
    for k in 0..=k_literal {
        for n in 1..=profile.power_bound {
            let hn = Power {
                base: &h0,
                exp: n as i64,
            };
            let step = n * l0;
            let d = ((reach + 2 * k).div_ceil(step) + 2) as i64;
            let Some(att) = separation(g, &hn, &v, &seeds, k, d, metric)? else {
                continue;
            };
            let Some(colors) = coloring(&att, &hn, color_seed) else {
                coloring_failed = true;
                continue;
            };
            return finish(
                g, iso, profile, &v, l0, p0, n, k, k_literal, delta, &hn, att, colors,
            );
        }
    }
    if coloring_failed {
        Err(Error::ColoringDegenerate)
    } else {
        Err(Error::HorizonTooSmall(format!(
            "separation not certified for radius <= {k_literal}"
        )))
    }
}

#[allow(clippy::too_many_arguments)]
fn finish(
    g: &dyn Graph,
    iso: &dyn Isometry,
    profile: &TruncationProfile,
    v: &Vertex,
    l0: usize,
    p0: usize,
    n: usize,
    k: usize,
    k_literal: usize,
    delta: HalfInt,
    hn: &dyn Isometry,
    att: Attempt,
    colors: BTreeMap<Edge, usize>,
) -> Result<(AxisWindow, ShortLexDiagnostics)> {
    let metric = metric_horizon(profile);
    let d = att.half_levels;
    let mut members: BTreeMap<i64, Vec<Vertex>> = BTreeMap::new();
    for (x, &i) in &att.level {
        members.entry(i).or_default().push(x.clone());
    }
    for list in members.values_mut() {
        list.sort();
    }
    let empty = Vec::new();
    let ball_at = |i: i64| members.get(&i).unwrap_or(&empty);

    // X_i for i = 1..=d, each keyed by its vertex sequence.
    let mut levels: Vec<Vec<Vec<Vertex>>> = Vec::new();
    for i in 1..=d {
        let mut xs = BTreeSet::new();
        for x in ball_at(-i) {
            for y in ball_at(i) {
                if let Some(p) = short_lex_path(&att, &colors, x, y) {
                    xs.insert(p);
                }
            }
        }
        if xs.is_empty() {
            return Err(Error::HorizonTooSmall(format!(
                "no short-lex path at level {i}"
            )));
        }
        levels.push(xs.into_iter().collect());
    }
    let mut maps = Vec::new();
    for i in 1..levels.len() {
        let lookup: HashMap<&Vec<Vertex>, usize> = levels[i - 1]
            .iter()
            .enumerate()
            .map(|(j, p)| (p, j))
            .collect();
        let mut table = Vec::with_capacity(levels[i].len());
        for p in &levels[i] {
            let seg = minimal_segment(&att, p, i as i64).ok_or_else(|| {
                Error::HorizonTooSmall(format!("a level-{} path misses level {i}", i + 1))
            })?;
            let j = lookup.get(&seg).ok_or_else(|| {
                Error::HorizonTooSmall(format!("restriction to level {i} is not short-lex"))
            })?;
            table.push(*j);
        }
        maps.push(table);
    }
    let sys = InverseSystem::new(levels.iter().map(Vec::len).collect(), maps);
    let sol = solve_inverse_limit(&sys)?;

    let width = reach_width(profile, l0);
    let mut chosen = None;
    'levels: for lvl in (0..levels.len()).rev() {
        let path = &levels[lvl][sol.thread[lvl]];
        let pos: HashMap<&Vertex, usize> = path.iter().enumerate().map(|(i, x)| (x, i)).collect();
        let c = match pos.get(v) {
            Some(&c) => c,
            None => {
                let mut best = (usize::MAX, 0);
                for (i, x) in path.iter().enumerate() {
                    best = best.min((distance(g, x, v, metric)?, i));
                }
                best.1
            }
        };
        if c < width || c + width >= path.len() {
            continue;
        }
        for m in 1..=(profile.power_bound / n).max(1) {
            let q = Power {
                base: hn,
                exp: m as i64,
            };
            let Some(&to) = pos.get(&q.forward(&path[c])) else {
                continue;
            };
            if to <= c {
                continue;
            }
            let s = to - c;
            if (0..path.len() - s).all(|i| q.forward(&path[i]) == path[i + s]) {
                chosen = Some((lvl, path[c - width..=c + width].to_vec(), m));
                break 'levels;
            }
        }
    }
    let (lvl, vertices, m) =
        chosen.ok_or_else(|| Error::HorizonTooSmall("no invariant short-lex path".into()))?;
    let construction_power = p0 * n * m;

    let mut window = None;
    for p in 1..=construction_power {
        let img = apply_power(iso, &vertices[0], p as i64);
        if let Some(s) = vertices.iter().position(|x| *x == img) {
            let w = AxisWindow {
                vertices: vertices.clone(),
                power: p,
                shift: s,
                center: width,
            };
            if s > 0 && verify_axis_window(g, iso, &w).is_ok() {
                window = Some(w);
                break;
            }
        }
    }
    let window = window.ok_or(Error::AxisNotFoundWithinHorizon)?;

    let mut edge_orbits_by_window = Vec::new();
    for j in 1..=d {
        let seen: BTreeSet<usize> = colors
            .iter()
            .filter(|((a, b), _)| {
                [a, b]
                    .iter()
                    .all(|x| core_level(&att, x).is_some_and(|l| l.abs() <= j))
            })
            .map(|(_, &c)| c)
            .collect();
        edge_orbits_by_window.push(seen.len());
    }
    let tail = &edge_orbits_by_window[edge_orbits_by_window.len().saturating_sub(2)..];
    let edge_orbits_stable = tail.len() == 2 && tail[0] == tail[1];
    let window_colors = window
        .vertices
        .windows(2)
        .map(|w| {
            colors
                .get(&edge(&w[0], &w[1]))
                .copied()
                .unwrap_or(usize::MAX)
        })
        .collect();
    let diagnostics = ShortLexDiagnostics {
        delta,
        k_literal,
        k,
        multiplier: n,
        construction_power,
        surrogate_vertices: att.surrogate.adj.len(),
        surrogate_edges: att.surrogate.edges.len(),
        colors: colors.values().collect::<BTreeSet<_>>().len(),
        edge_orbits_by_window,
        edge_orbits_stable,
        level_sizes: sys.sizes.clone(),
        threads_at_depth: sol.threads_at_depth,
        surviving_bound: sol.surviving_bound,
        level_bound: sol.level_bound,
        invariant_level: lvl + 1,
        window_colors,
        edge_colors: colors,
    };
    Ok((window, diagnostics))
}

/// Half-width of the returned window, matching the concatenation method.
fn reach_width(profile: &TruncationProfile, l0: usize) -> usize {
    window_half_width(profile).div_ceil(l0) * l0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{build_ladder, build_tree, LadderMove, TreeAut};
    use crate::isometry::find_axis;

    #[test]
    fn tree_shift_matches_concatenation() {
        let t = build_tree(3, 8).unwrap();
        let g = TreeAut::shift(3, 0, 1);
        let p = TruncationProfile::default();
        let a = find_axis(&t, &g, &p).unwrap();
        let (b, diag) = short_lex_axis(&t, &g, &p, 0).unwrap();
        assert_eq!(a, b);
        assert_eq!(diag.k, 0);
    }

    #[test]
    fn ladder_axis_is_a_row() {
        let l = build_ladder(2).unwrap();
        let g = LadderMove::shift(&l, 1);
        let p = TruncationProfile::default();
        let (w, _) = short_lex_axis(&l, &g, &p, 0).unwrap();
        let rows: BTreeSet<i32> = w.vertices.iter().map(|x| x.code()[1]).collect();
        assert_eq!(rows.len(), 1);
    }
}
