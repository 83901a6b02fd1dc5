//! Isometries of graphs: classification, translation length, ends and axes.

mod inverse_limit;
mod shortlex;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{
    ball, distance, geodesic, gromov_product, sequence_converges_at_infinity, Graph, Vertex,
};
use crate::half::HalfInt;
use crate::profile::TruncationProfile;

pub use inverse_limit::{
    brute_force_threads, solve_inverse_limit, InverseLimitSolution, InverseSystem,
};
pub use shortlex::{short_lex_axis, ShortLexDiagnostics};

/// A vertex bijection preserving adjacency.
pub trait Isometry: Send + Sync {
    fn forward(&self, v: &Vertex) -> Vertex;
    fn backward(&self, v: &Vertex) -> Vertex;
    fn label(&self) -> String;
}

/// `iso^k(v)` for any integer `k`.
pub fn apply_power(iso: &dyn Isometry, v: &Vertex, k: i64) -> Vertex {
    let mut x = v.clone();
    if k >= 0 {
        for _ in 0..k {
            x = iso.forward(&x);
        }
    } else {
        for _ in 0..-k {
            x = iso.backward(&x);
        }
    }
    x
}

/// `base^exp` as an isometry in its own right.
pub struct Power<'a> {
    pub base: &'a dyn Isometry,
    pub exp: i64,
}

impl Isometry for Power<'_> {
    fn forward(&self, v: &Vertex) -> Vertex {
        apply_power(self.base, v, self.exp)
    }
    fn backward(&self, v: &Vertex) -> Vertex {
        apply_power(self.base, v, -self.exp)
    }
    fn label(&self) -> String {
        format!("({})^{}", self.base.label(), self.exp)
    }
}

pub struct Inverse<'a>(pub &'a dyn Isometry);

impl Isometry for Inverse<'_> {
    fn forward(&self, v: &Vertex) -> Vertex {
        self.0.backward(v)
    }
    fn backward(&self, v: &Vertex) -> Vertex {
        self.0.forward(v)
    }
    fn label(&self) -> String {
        format!("({})^-1", self.0.label())
    }
}

pub struct IdentityMap;

impl Isometry for IdentityMap {
    fn forward(&self, v: &Vertex) -> Vertex {
        v.clone()
    }
    fn backward(&self, v: &Vertex) -> Vertex {
        v.clone()
    }
    fn label(&self) -> String {
        "identity".into()
    }
}

/// Distances inside orbit windows never need BFS beyond this.
pub(crate) fn metric_horizon(profile: &TruncationProfile) -> usize {
    4 * (profile.horizon + 1) * (profile.power_bound + 2)
}

/// Checks `backward ∘ forward = id` and adjacency preservation on the horizon ball.
pub fn validate_isometry(
    g: &dyn Graph,
    iso: &dyn Isometry,
    profile: &TruncationProfile,
) -> Result<()> {
    let vs = ball(g, &g.basepoint(), profile.horizon);
    vs.par_iter().try_for_each(|v| {
        let fv = iso.forward(v);
        if !g.contains(&fv) || &iso.backward(&fv) != v {
            return Err(Error::InvalidIsometry(format!(
                "backward does not invert forward at {}",
                g.format_vertex(v)
            )));
        }
        let image_nbrs = g.neighbors(&fv);
        for w in g.neighbors(v) {
            let fw = iso.forward(&w);
            if !image_nbrs.contains(&fw) {
                return Err(Error::InvalidIsometry(format!(
                    "edge ({}, {}) is not mapped to an edge",
                    g.format_vertex(v),
                    g.format_vertex(&w)
                )));
            }
        }
        if image_nbrs.len() != g.neighbors(v).len() {
            return Err(Error::InvalidIsometry(format!(
                "degree changes at {}",
                g.format_vertex(v)
            )));
        }
        Ok(())
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IsometryClass {
    /// `vertex` returns to itself after `period` steps; its orbit has the given diameter.
    Elliptic {
        vertex: Vertex,
        period: usize,
        orbit_diameter: usize,
    },
    /// `iso^power` moves `vertex` by `displacement`, which is minimal over the
    /// ball, and `d(vertex, iso^(power k)(vertex)) = k * displacement` for `k <= N`.
    Hyperbolic {
        vertex: Vertex,
        power: usize,
        displacement: usize,
    },
    Undetermined {
        min_displacement: usize,
        reason: String,
    },
}

impl IsometryClass {
    pub fn kind(&self) -> &'static str {
        match self {
            IsometryClass::Elliptic { .. } => "Elliptic",
            IsometryClass::Hyperbolic { .. } => "Hyperbolic",
            IsometryClass::Undetermined { .. } => "Undetermined",
        }
    }

    pub fn is_hyperbolic(&self) -> bool {
        matches!(self, IsometryClass::Hyperbolic { .. })
    }
}

/// Minimal displacement over the horizon ball and the first vertex attaining
/// it, in ball order (distance from the basepoint, then code).
pub fn min_displacement(
    g: &dyn Graph,
    iso: &dyn Isometry,
    profile: &TruncationProfile,
) -> Result<(usize, Vertex)> {
    let h = metric_horizon(profile);
    let vs = ball(g, &g.basepoint(), profile.horizon);
    let disp: Vec<usize> = vs
        .par_iter()
        .map(|v| distance(g, v, &iso.forward(v), h))
        .collect::<Result<_>>()?;
    let (i, d) = disp
        .iter()
        .enumerate()
        .min_by_key(|&(i, d)| (*d, i))
        .expect("ball contains the basepoint");
    Ok((*d, vs[i].clone()))
}

fn linear_growth(
    g: &dyn Graph,
    iso: &dyn Isometry,
    v: &Vertex,
    step: usize,
    n: usize,
    h: usize,
) -> Result<bool> {
    let mut x = v.clone();
    for k in 1..=n {
        x = iso.forward(&x);
        if distance(g, v, &x, h)? != k * step {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The smallest power `p` of `iso` whose minimal displacement is positive and
/// grows linearly along the orbit of a minimizing vertex.
fn hyperbolic_power(
    g: &dyn Graph,
    iso: &dyn Isometry,
    profile: &TruncationProfile,
) -> Result<Option<(usize, usize, Vertex)>> {
    let h = metric_horizon(profile);
    for p in 1..=profile.power_bound {
        let pw = Power {
            base: iso,
            exp: p as i64,
        };
        let (l, v) = min_displacement(g, &pw, profile)?;
        if l == 0 {
            return Ok(None);
        }
        if linear_growth(g, &pw, &v, l, profile.power_bound, h)? {
            return Ok(Some((p, l, v)));
        }
    }
    Ok(None)
}

pub fn classify(
    g: &dyn Graph,
    iso: &dyn Isometry,
    profile: &TruncationProfile,
) -> Result<IsometryClass> {
    profile.validate()?;
    validate_isometry(g, iso, profile)?;
    let h = metric_horizon(profile);
    let (l, v0) = min_displacement(g, iso, profile)?;
    if l == 0 {
        return Ok(IsometryClass::Elliptic {
            vertex: v0,
            period: 1,
            orbit_diameter: 0,
        });
    }
    let vs = ball(g, &g.basepoint(), profile.horizon);
    let mut order = vec![v0.clone()];
    order.extend(vs.into_iter().filter(|v| v != &v0));
    let closing = order
        .par_iter()
        .map(|v| orbit_closure(g, iso, v, profile.power_bound, h))
        .collect::<Result<Vec<_>>>()?;
    for (v, c) in order.iter().zip(closing) {
        if let Some((period, diameter)) = c {
            if diameter <= profile.horizon {
                return Ok(IsometryClass::Elliptic {
                    vertex: v.clone(),
                    period,
                    orbit_diameter: diameter,
                });
            }
        }
    }
    if let Some((power, displacement, vertex)) = hyperbolic_power(g, iso, profile)? {
        return Ok(IsometryClass::Hyperbolic {
            vertex,
            power,
            displacement,
        });
    }
    Ok(IsometryClass::Undetermined {
        min_displacement: l,
        reason: format!(
            "no closed orbit and no linear growth within power bound {}",
            profile.power_bound
        ),
    })
}

fn orbit_closure(
    g: &dyn Graph,
    iso: &dyn Isometry,
    v: &Vertex,
    n: usize,
    h: usize,
) -> Result<Option<(usize, usize)>> {
    let mut orbit = vec![v.clone()];
    let mut x = iso.forward(v);
    while &x != v {
        if orbit.len() >= n {
            return Ok(None);
        }
        orbit.push(x.clone());
        x = iso.forward(&x);
    }
    let mut diameter = 0;
    for (i, a) in orbit.iter().enumerate() {
        for b in &orbit[i + 1..] {
            diameter = diameter.max(distance(g, a, b, h)?);
        }
    }
    Ok(Some((orbit.len(), diameter)))
}

/// Minimal displacement of `iso` over the horizon ball.
pub fn translation_length(
    g: &dyn Graph,
    iso: &dyn Isometry,
    profile: &TruncationProfile,
) -> Result<usize> {
    if !classify(g, iso, profile)?.is_hyperbolic() {
        return Err(Error::NotHyperbolic);
    }
    Ok(min_displacement(g, iso, profile)?.0)
}

/// The orbit `iso^n(basepoint)`, `n = 1..=N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedEnd {
    pub orbit: Vec<Vertex>,
}

pub fn attracting_end(
    g: &dyn Graph,
    iso: &dyn Isometry,
    profile: &TruncationProfile,
) -> Result<TruncatedEnd> {
    if !classify(g, iso, profile)?.is_hyperbolic() {
        return Err(Error::NotHyperbolic);
    }
    let mut orbit = Vec::with_capacity(profile.power_bound);
    let mut x = g.basepoint();
    for _ in 0..profile.power_bound {
        x = iso.forward(&x);
        orbit.push(x.clone());
    }
    if !sequence_converges_at_infinity(g, &orbit, profile.end_threshold, metric_horizon(profile)) {
        return Err(Error::ConvergenceCheckFailed {
            threshold: profile.end_threshold,
        });
    }
    Ok(TruncatedEnd { orbit })
}

pub fn repelling_end(
    g: &dyn Graph,
    iso: &dyn Isometry,
    profile: &TruncationProfile,
) -> Result<TruncatedEnd> {
    attracting_end(g, &Inverse(iso), profile)
}

/// Pairwise Gromov products at the basepoint between the two tails.
pub fn cross_products(
    g: &dyn Graph,
    e1: &TruncatedEnd,
    e2: &TruncatedEnd,
    horizon: usize,
) -> Vec<HalfInt> {
    let p = g.basepoint();
    let t1 = &e1.orbit[e1.orbit.len() / 2..];
    let t2 = &e2.orbit[e2.orbit.len() / 2..];
    t1.iter()
        .flat_map(|a| t2.iter().map(move |b| (a, b)))
        .map(|(a, b)| gromov_product(g, a, b, &p, horizon).unwrap_or(HalfInt::ZERO))
        .collect()
}

/// Whether every tail-to-tail Gromov product reaches `threshold`.
pub fn same_end(g: &dyn Graph, e1: &TruncatedEnd, e2: &TruncatedEnd, threshold: u64) -> bool {
    if e1.orbit.is_empty() || e2.orbit.is_empty() {
        return false;
    }
    let h = 4 * (e1.orbit.len() + e2.orbit.len()) * (e1.orbit.len() + e2.orbit.len() + 2);
    let t = HalfInt::from_int(threshold as i64);
    cross_products(g, e1, e2, h).into_iter().all(|v| v >= t)
}

/// A finite geodesic window on which `iso^power` acts as a shift by `shift` positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxisWindow {
    pub vertices: Vec<Vertex>,
    pub power: usize,
    pub shift: usize,
    /// Index of the vertex the construction was centred on.
    pub center: usize,
}

impl AxisWindow {
    pub fn len(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

/// Geodesity of the window and the exact shift relation on the overlap.
pub fn verify_axis_window(g: &dyn Graph, iso: &dyn Isometry, w: &AxisWindow) -> Result<()> {
    let path = crate::graph::GeodesicPath::new(w.vertices.clone());
    path.validate(g, w.vertices.len() + 1)?;
    if w.shift == 0 || w.shift >= w.vertices.len() {
        return Err(Error::InvariantViolation(format!(
            "shift {} does not fit the window",
            w.shift
        )));
    }
    let pw = Power {
        base: iso,
        exp: w.power as i64,
    };
    for i in 0..w.vertices.len() - w.shift {
        if pw.forward(&w.vertices[i]) != w.vertices[i + w.shift] {
            return Err(Error::InvariantViolation(format!(
                "translation fails at window index {i}"
            )));
        }
    }
    Ok(())
}

/// Half-width, in edges, of the windows returned by the axis constructions.
pub(crate) fn window_half_width(profile: &TruncationProfile) -> usize {
    profile.horizon + 1
}

/// Axis by concatenating translates of one geodesic segment.
pub fn find_axis(
    g: &dyn Graph,
    iso: &dyn Isometry,
    profile: &TruncationProfile,
) -> Result<AxisWindow> {
    if !classify(g, iso, profile)?.is_hyperbolic() {
        return Err(Error::NotHyperbolic);
    }
    let h = metric_horizon(profile);
    for p in 1..=profile.power_bound {
        let pw = Power {
            base: iso,
            exp: p as i64,
        };
        let (l, v) = min_displacement(g, &pw, profile)?;
        if l == 0 || !linear_growth(g, &pw, &v, l, profile.power_bound, h)? {
            continue;
        }
        let seg = geodesic(g, &v, &pw.forward(&v), h)?;
        let m = window_half_width(profile).div_ceil(l) as i64;
        let mut vertices = vec![apply_power(&pw, &v, -m)];
        for j in -m..m {
            for x in &seg.vertices[1..] {
                vertices.push(apply_power(&pw, x, j));
            }
        }
        let w = AxisWindow {
            vertices,
            power: p,
            shift: l,
            center: m as usize * l,
        };
        if verify_axis_window(g, iso, &w).is_ok() {
            return Ok(w);
        }
    }
    Err(Error::AxisNotFoundWithinHorizon)
}
