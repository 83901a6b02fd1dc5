//! Rays of compact open subgroups, the asymptotic relation between them, and
//! the directed pseudometric `delta_+` with its symmetrization.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;

use crate::cos::{
    cos_distance, ln_big, scale_estimate, CosDistance, CosHandle, GroupInstance, ScaleEstimate,
};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::isometry::{apply_power, repelling_end, same_end, TruncatedEnd};
use crate::profile::TruncationProfile;

/// The sequence `n -> a^n(U)`, materialized on demand.
pub struct Ray<'a, I: GroupInstance> {
    pub instance: &'a I,
    pub element: I::Element,
    pub base: CosHandle,
}

impl<'a, I: GroupInstance> Ray<'a, I> {
    pub fn new(instance: &'a I, element: I::Element, base: CosHandle) -> Self {
        Ray {
            instance,
            element,
            base,
        }
    }

    pub fn term(&self, n: usize) -> Result<CosHandle> {
        let an = self.instance.power(&self.element, n as i64);
        self.instance.act(&an, &self.base)
    }

    /// Terms `0..=n`, each obtained from the previous one.
    pub fn terms(&self, n: usize) -> Result<Vec<CosHandle>> {
        let mut out = vec![self.base.clone()];
        for _ in 0..n {
            let next = self
                .instance
                .act(&self.element, out.last().expect("nonempty"))?;
            out.push(next);
        }
        Ok(out)
    }
}

fn scale_of<I: GroupInstance>(
    inst: &I,
    a: &I::Element,
    profile: &TruncationProfile,
) -> Result<ScaleEstimate> {
    scale_estimate(inst, a, profile)
}

fn exact_scale(s: &ScaleEstimate) -> Result<BigUint> {
    s.exact
        .clone()
        .ok_or_else(|| Error::Unsupported("scale is not exact".into()))
}

pub fn moves_towards_infinity<I: GroupInstance>(
    inst: &I,
    a: &I::Element,
    profile: &TruncationProfile,
) -> Result<bool> {
    let s = scale_of(inst, a, profile)?;
    Ok(match &s.exact {
        Some(v) => !v.is_one(),
        None => s.approx > 1.0,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticVerdict {
    pub related: bool,
    /// The exponent pair whose rays were compared last: the bounded pair when
    /// related, the first diverging pair otherwise.
    pub exponents: (usize, usize),
    /// Largest distance `d(a^(ka n) U_a, b^(kb n) U_b)` over `n <= N`.
    pub bound_witness: CosDistance,
    /// Distances per `n = 1..=N` for the reported pair.
    pub distances: Vec<CosDistance>,
    /// Whether the distances strictly increase over the upper half of the window.
    pub growth_witness: bool,
}

/// Exponent bound for the pair search: `ceil(log s(a) N / log s(b))`, capped.
fn exponent_limit(sa: f64, sb: f64, profile: &TruncationProfile) -> usize {
    let n = profile.power_bound as f64;
    let k = if sb.ln() > 0.0 && sa.ln() > 0.0 {
        (sa.ln() * n / sb.ln()).ceil() as usize
    } else {
        profile.power_bound
    };
    k.clamp(1, profile.exponent_bound)
}

/// Pairs `(ka, kb)` in order of speed mismatch `|ka log s(a) - kb log s(b)|`,
/// then by size.
fn exponent_pairs(sa: &ScaleEstimate, sb: &ScaleEstimate, limit: usize) -> Vec<(usize, usize)> {
    let (la, lb) = (sa.log(), sb.log());
    let exact_match = |ka: usize, kb: usize| match (&sa.exact, &sb.exact) {
        (Some(x), Some(y)) => Some(x.pow(ka as u32) == y.pow(kb as u32)),
        _ => None,
    };
    let mut pairs: Vec<((bool, u64, usize, usize), (usize, usize))> = Vec::new();
    for ka in 1..=limit {
        for kb in 1..=limit {
            let mismatch = (ka as f64 * la - kb as f64 * lb).abs();
            let exact = exact_match(ka, kb).unwrap_or(mismatch < 1e-12);
            pairs.push(((!exact, (mismatch * 1e9) as u64, ka + kb, ka), (ka, kb)));
        }
    }
    pairs.sort();
    pairs.into_iter().map(|(_, p)| p).collect()
}

/// How many exponent pairs the asymptotic search compares.
const PAIRS_TRIED: usize = 4;

fn ray_distances<I: GroupInstance>(
    inst: &I,
    a: &I::Element,
    b: &I::Element,
    u: &CosHandle,
    v: &CosHandle,
    (ka, kb): (usize, usize),
    n: usize,
) -> Result<Vec<CosDistance>> {
    let ak = inst.power(a, ka as i64);
    let bk = inst.power(b, kb as i64);
    (1..=n)
        .into_par_iter()
        .map(|i| {
            let x = inst.act(&inst.power(&ak, i as i64), u)?;
            let y = inst.act(&inst.power(&bk, i as i64), v)?;
            cos_distance(inst, &x, &y)
        })
        .collect()
}

/// Searches speed-matched exponent pairs first. A pair relates the rays when
/// the upper half of the window sets no new maximum; it witnesses divergence
/// when the distances strictly increase there.
pub fn asymptotic<I: GroupInstance>(
    inst: &I,
    a: &I::Element,
    b: &I::Element,
    profile: &TruncationProfile,
) -> Result<AsymptoticVerdict> {
    profile.validate()?;
    let sa = scale_of(inst, a, profile)?;
    let sb = scale_of(inst, b, profile)?;
    let u = inst.base_handle(a, profile)?;
    let v = inst.base_handle(b, profile)?;
    let n = profile.power_bound;
    let half = profile.upper_half_start();
    let limit = exponent_limit(sa.approx, sb.approx, profile);
    let mut first_growth: Option<AsymptoticVerdict> = None;
    let mut all_grow = true;
    for pair in exponent_pairs(&sa, &sb, limit)
        .into_iter()
        .take(PAIRS_TRIED)
    {
        let ds = ray_distances(inst, a, b, &u, &v, pair, n)?;
        let early = ds[..half - 1].iter().map(|d| &d.product).max();
        let late = ds[half - 1..]
            .iter()
            .map(|d| &d.product)
            .max()
            .expect("upper half nonempty");
        let bound = ds
            .iter()
            .max_by(|x, y| x.product.cmp(&y.product))
            .expect("nonempty")
            .clone();
        let growth = ds[half - 1..]
            .windows(2)
            .all(|w| w[1].product > w[0].product);
        let verdict = |related| AsymptoticVerdict {
            related,
            exponents: pair,
            bound_witness: bound.clone(),
            distances: ds.clone(),
            growth_witness: growth,
        };
        if early.is_some_and(|e| late <= e) {
            return Ok(verdict(true));
        }
        if growth {
            first_growth.get_or_insert_with(|| verdict(false));
        } else {
            all_grow = false;
        }
    }
    match first_growth {
        Some(v) if all_grow => Ok(v),
        _ => Err(Error::Inconclusive(
            "distances neither stabilize nor grow monotonically in the window".into(),
        )),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaRow {
    pub n: usize,
    pub k: usize,
    pub index: BigUint,
    pub value: f64,
    /// `log C / (n log s(a))`.
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaPlusTable {
    pub rows: Vec<DeltaRow>,
    /// Largest row value over `n` in the upper half of the window.
    pub headline: f64,
    /// Row slack at the start of the upper half.
    pub slack: f64,
    pub scale_a: BigUint,
    pub scale_b: BigUint,
    pub constant: BigUint,
}

/// `log(index) / (n log s)`, exact when the index is a power of `s`.
fn row_value(index: &BigUint, s: &BigUint, n: usize) -> f64 {
    let ls = ln_big(s);
    let approx = ln_big(index) / (n as f64 * ls);
    let j = (ln_big(index) / ls).round();
    if j >= 0.0 && j < u32::MAX as f64 && &s.pow(j as u32) == index {
        j / n as f64
    } else {
        approx
    }
}

/// Rows `delta_{+,n}` for `n = 1..=N`, each minimizing over `k = 0..=K` with
/// `s(b)^k <= s(a)^n`; ties go to the smallest `k`.
pub fn delta_plus<I: GroupInstance>(
    inst: &I,
    a: &I::Element,
    b: &I::Element,
    u: &CosHandle,
    v: &CosHandle,
    profile: &TruncationProfile,
) -> Result<DeltaPlusTable> {
    profile.validate()?;
    inst.validate_handle(u)?;
    inst.validate_handle(v)?;
    let sa = exact_scale(&scale_of(inst, a, profile)?)?;
    let sb = exact_scale(&scale_of(inst, b, profile)?)?;
    if sa.is_one() || sb.is_one() {
        return Err(Error::NotTowardsInfinity);
    }
    let big_k = profile.exponent_bound;
    let n_max = profile.power_bound;
    let constant = inst.index_constant(a, b, profile)?;
    let log_c = ln_big(&constant);

    let vk: Vec<CosHandle> = (0..=big_k)
        .into_par_iter()
        .map(|k| inst.act(&inst.power(b, k as i64), v))
        .collect::<Result<_>>()?;
    let rows: Vec<DeltaRow> = (1..=n_max)
        .into_par_iter()
        .map(|n| {
            let un = inst.act(&inst.power(a, n as i64), u)?;
            let cap = sa.pow(n as u32);
            let mut best: Option<(BigUint, usize)> = None;
            let mut sbk = BigUint::one();
            for (k, vkk) in vk.iter().enumerate() {
                if sbk > cap {
                    break;
                }
                let idx = inst.index(&un, vkk)?;
                if best.as_ref().is_none_or(|(b, _)| &idx < b) {
                    best = Some((idx, k));
                }
                sbk *= &sb;
            }
            let (index, k) = best.expect("k = 0 always satisfies the constraint");
            let value = row_value(&index, &sa, n);
            Ok(DeltaRow {
                n,
                k,
                index,
                value,
                slack: log_c / (n as f64 * ln_big(&sa)),
            })
        })
        .collect::<Result<_>>()?;
    let start = profile.upper_half_start();
    let headline = rows[start - 1..]
        .iter()
        .map(|r| r.value)
        .fold(f64::NEG_INFINITY, f64::max);
    let slack = rows[start - 1].slack;
    Ok(DeltaPlusTable {
        rows,
        headline,
        slack,
        scale_a: sa,
        scale_b: sb,
        constant,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    SameClass,
    Distinct,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::SameClass => "same-class",
            Verdict::Distinct => "distinct",
            Verdict::Inconclusive => "inconclusive",
        }
    }

    /// `delta <= 2 slack` is same-class, `delta >= 2 - 2 slack` is distinct.
    pub fn from_delta(delta: f64, slack: f64) -> Verdict {
        if delta <= 2.0 * slack {
            Verdict::SameClass
        } else if delta >= 2.0 - 2.0 * slack {
            Verdict::Distinct
        } else {
            Verdict::Inconclusive
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaReport {
    pub ab: DeltaPlusTable,
    pub ba: DeltaPlusTable,
    pub delta: f64,
    /// Sum of the two directed slacks.
    pub slack: f64,
    pub verdict: Verdict,
}

/// `delta(a, b) = delta_+(a, b) + delta_+(b, a)` with the default base handles.
pub fn delta_pseudometric<I: GroupInstance>(
    inst: &I,
    a: &I::Element,
    b: &I::Element,
    profile: &TruncationProfile,
) -> Result<DeltaReport> {
    let u = inst.base_handle(a, profile)?;
    let v = inst.base_handle(b, profile)?;
    delta_with_bases(inst, a, b, &u, &v, profile)
}

pub fn delta_with_bases<I: GroupInstance>(
    inst: &I,
    a: &I::Element,
    b: &I::Element,
    u: &CosHandle,
    v: &CosHandle,
    profile: &TruncationProfile,
) -> Result<DeltaReport> {
    let ab = delta_plus(inst, a, b, u, v, profile)?;
    let ba = delta_plus(inst, b, a, v, u, profile)?;
    let delta = ab.headline + ba.headline;
    let slack = ab.slack + ba.slack;
    Ok(DeltaReport {
        verdict: Verdict::from_delta(delta, slack),
        ab,
        ba,
        delta,
        slack,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairEntry {
    pub i: usize,
    pub j: usize,
    pub delta: std::result::Result<DeltaReport, String>,
    pub same_class: bool,
    /// Whether the verdict agrees with the grouping.
    pub consistent: bool,
    /// Largest orbit of the basepoint under `G_{a^n v} ∩ G_{b^m v}`, `n, m <= N`,
    /// with whether it is constant over the grid. Distinct-class pairs on graph instances only.
    pub double_stabilizer: Option<(BigUint, bool)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectionReport {
    /// Indices of the elements moving towards infinity.
    pub moving: Vec<usize>,
    /// Elements that do not move towards infinity, or whose scale failed.
    pub excluded: Vec<(usize, String)>,
    /// Classes of moving elements, as indices into the input list.
    pub classes: Vec<Vec<usize>>,
    /// How the classes were formed: `"ends"` or `"asymptotic"`.
    pub grouping: &'static str,
    pub pairs: Vec<PairEntry>,
}

fn union_find_classes(n: usize, related: impl Fn(usize, usize) -> bool) -> Vec<usize> {
    let mut class: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in 0..i {
            if class[j] == j && related(i, j) {
                class[i] = j;
                break;
            }
        }
    }
    class
}

fn attracting_orbit<I: GroupInstance>(
    inst: &I,
    a: &I::Element,
    profile: &TruncationProfile,
) -> Result<TruncatedEnd> {
    let g = inst
        .graph()
        .ok_or_else(|| Error::Unsupported("instance has no graph".into()))?;
    let iso = inst
        .isometry(a)
        .ok_or_else(|| Error::Unsupported("element has no isometry".into()))?;
    crate::isometry::attracting_end(g, iso.as_ref(), profile)
}

/// Groups the moving elements into classes and tabulates pairwise `delta`.
/// Per-pair errors are recorded, not raised.
pub fn direction_report<I: GroupInstance>(
    inst: &I,
    elements: &[I::Element],
    profile: &TruncationProfile,
) -> Result<DirectionReport> {
    profile.validate()?;
    let mut moving = Vec::new();
    let mut excluded = Vec::new();
    for (i, e) in elements.iter().enumerate() {
        match moves_towards_infinity(inst, e, profile) {
            Ok(true) => moving.push(i),
            Ok(false) => excluded.push((i, "does not move towards infinity".to_string())),
            Err(err) => excluded.push((i, err.to_string())),
        }
    }

    let graph_ends: Option<Vec<TruncatedEnd>> = match inst.graph() {
        Some(_) => moving
            .iter()
            .map(|&i| attracting_orbit(inst, &elements[i], profile))
            .collect::<Result<_>>()
            .ok(),
        None => None,
    };
    let (class_of, grouping) = match (&graph_ends, inst.graph()) {
        (Some(ends), Some(g)) => (
            union_find_classes(moving.len(), |i, j| {
                same_end(g, &ends[i], &ends[j], profile.end_threshold)
            }),
            "ends",
        ),
        _ => (
            union_find_classes(moving.len(), |i, j| {
                asymptotic(inst, &elements[moving[i]], &elements[moving[j]], profile)
                    .is_ok_and(|v| v.related)
            }),
            "asymptotic",
        ),
    };
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut root_to_class = std::collections::BTreeMap::new();
    for (pos, &root) in class_of.iter().enumerate() {
        let c = *root_to_class.entry(root).or_insert_with(|| {
            classes.push(Vec::new());
            classes.len() - 1
        });
        classes[c].push(moving[pos]);
    }

    let pair_ix: Vec<(usize, usize)> = (0..moving.len())
        .flat_map(|i| (i + 1..moving.len()).map(move |j| (i, j)))
        .collect();
    let pairs = pair_ix
        .par_iter()
        .map(|&(i, j)| {
            let (a, b) = (&elements[moving[i]], &elements[moving[j]]);
            let same_class = class_of[i] == class_of[j];
            let delta = delta_pseudometric(inst, a, b, profile).map_err(|e| e.to_string());
            let consistent = match &delta {
                Ok(r) => {
                    r.verdict
                        == if same_class {
                            Verdict::SameClass
                        } else {
                            Verdict::Distinct
                        }
                }
                Err(_) => false,
            };
            let double_stabilizer = if !same_class && grouping == "ends" {
                double_stabilizer_witness(inst, a, b, profile).ok()
            } else {
                None
            };
            PairEntry {
                i: moving[i],
                j: moving[j],
                delta,
                same_class,
                consistent,
                double_stabilizer,
            }
        })
        .collect();
    Ok(DirectionReport {
        moving,
        excluded,
        classes,
        grouping,
        pairs,
    })
}

/// `max_{n,m <= N} [G_{a^n v, b^m v} : G_{a^n v, b^m v} ∩ G_v]` for the basepoint `v`,
/// and whether the count is constant over the grid.
pub fn double_stabilizer_witness<I: GroupInstance>(
    inst: &I,
    a: &I::Element,
    b: &I::Element,
    profile: &TruncationProfile,
) -> Result<(BigUint, bool)> {
    let g: &dyn Graph = inst
        .graph()
        .ok_or_else(|| Error::Unsupported("instance has no graph".into()))?;
    let ia = inst
        .isometry(a)
        .ok_or_else(|| Error::Unsupported("element has no isometry".into()))?;
    let ib = inst
        .isometry(b)
        .ok_or_else(|| Error::Unsupported("element has no isometry".into()))?;
    let v = g.basepoint();
    let n = profile.power_bound;
    let an: Vec<_> = (1..=n)
        .map(|k| apply_power(ia.as_ref(), &v, k as i64))
        .collect();
    let bm: Vec<_> = (1..=n)
        .map(|k| apply_power(ib.as_ref(), &v, k as i64))
        .collect();
    let gv = CosHandle::stabilizer(vec![v.clone()])?;
    let counts: Vec<BigUint> = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let (x, y) = (&an[idx / n], &bm[idx % n]);
            let w = CosHandle::stabilizer(vec![x.clone(), y.clone()])?;
            inst.index(&w, &gv)
        })
        .collect::<Result<_>>()?;
    let max = counts.iter().max().expect("grid nonempty").clone();
    let constant = counts.iter().all(|c| c == &counts[0]);
    Ok((max, constant))
}

/// Number of distinct truncated ends among `h(omega_-(g))`. On instances
/// without a graph the conjugates `h g^-1 h^-1` are grouped by the
/// asymptotic relation instead.
pub fn boundary_orbit_probe<I: GroupInstance>(
    inst: &I,
    g: &I::Element,
    conjugators: &[I::Element],
    profile: &TruncationProfile,
) -> Result<usize> {
    if !moves_towards_infinity(inst, g, profile)? {
        return Err(Error::NotTowardsInfinity);
    }
    if let (Some(graph), Some(iso)) = (inst.graph(), inst.isometry(g)) {
        let end = repelling_end(graph, iso.as_ref(), profile)?;
        let mut reps: Vec<TruncatedEnd> = Vec::new();
        for h in conjugators {
            let hi = inst
                .isometry(h)
                .ok_or_else(|| Error::Unsupported("conjugator has no isometry".into()))?;
            let moved = TruncatedEnd {
                orbit: end.orbit.iter().map(|x| hi.forward(x)).collect(),
            };
            if !reps
                .iter()
                .any(|r| same_end(graph, r, &moved, profile.end_threshold))
            {
                reps.push(moved);
            }
        }
        return Ok(reps.len());
    }
    let ginv = inst.inverse(g);
    let mut reps: Vec<I::Element> = Vec::new();
    for h in conjugators {
        let c = inst.compose(&inst.compose(h, &ginv), &inst.inverse(h));
        let mut found = false;
        for r in &reps {
            if asymptotic(inst, r, &c, profile)?.related {
                found = true;
                break;
            }
        }
        if !found {
            reps.push(c);
        }
    }
    Ok(reps.len())
}

/// `f64` view of a big integer, saturating.
pub fn big_to_f64(x: &BigUint) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{build_example_group, build_tree, ExampleElement, TreeAut};

    #[test]
    fn example_inverse_pair_is_exactly_two() {
        let e = build_example_group(2).unwrap();
        let p = TruncationProfile::default().with_power_bound(8);
        let r = delta_pseudometric(
            &e,
            &ExampleElement::alpha_power(1),
            &ExampleElement::alpha_power(-1),
            &p,
        )
        .unwrap();
        assert_eq!(r.delta, 2.0);
        assert!(r.ab.rows.iter().all(|row| row.k == 0 && row.value == 1.0));
        assert_eq!(r.verdict, Verdict::Distinct);
    }

    #[test]
    fn tree_inverse_rows_follow_sphere_counts() {
        let t = build_tree(3, 8).unwrap();
        let g = TreeAut::shift(3, 0, 1);
        let p = TruncationProfile::default();
        let r = delta_pseudometric(&t, &g, &g.inverse(), &p).unwrap();
        for row in &r.ab.rows {
            let n = row.n as f64;
            let want = (3f64.ln() + (n - 1.0) * 2f64.ln()) / (n * 2f64.ln());
            assert!((row.value - want).abs() < 1e-9, "{row:?}");
            assert_eq!(row.k, 0);
        }
        assert!((r.ab.rows[39].value - 1.014624062518029).abs() < 1e-12);
        assert!(r.delta >= 1.9);
        assert_eq!(r.verdict, Verdict::Distinct);
    }

    #[test]
    fn same_end_shifts_are_asymptotic() {
        let t = build_tree(3, 8).unwrap();
        let g = TreeAut::shift(3, 0, 1);
        let g2 = g.power(2);
        let p = TruncationProfile::default();
        let v = asymptotic(&t, &g, &g2, &p).unwrap();
        assert!(v.related);
        assert_eq!(v.exponents, (2, 1));
        assert!(v
            .distances
            .iter()
            .all(|d| d.product == v.distances[0].product));
        let w = asymptotic(&t, &g, &g.inverse(), &p).unwrap();
        assert!(!w.related && w.growth_witness);
    }
}
