//! The acceptance checks, each reduced to one pass/fail line with a detail
//! string. Shared by the `verify` command and the acceptance test target.

use std::collections::HashSet;
use std::time::Instant;

use num_bigint::BigUint;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cos::{
    cos_distance, scale_estimate, scale_with_method, tidy_search, CosHandle, GroupInstance,
    ScaleMethod,
};
use crate::directions::{asymptotic, delta_pseudometric, delta_with_bases, direction_report};
use crate::error::{Error, Result};
use crate::graph::{
    all_geodesics, ball, check_fellow_travel, check_ribbon, check_standard_estimate,
    estimate_hyperbolicity, slim_delta_all_geodesics, FiniteGraph, Graph, ScanPolicy, Vertex,
};
use crate::half::HalfInt;
use crate::instances::{build_example_group, build_tree, ExampleElement, TreeAut, TreeInstance};
use crate::isometry::{
    brute_force_threads, find_axis, short_lex_axis, solve_inverse_limit, verify_axis_window,
    InverseSystem,
};
use crate::oracle::{example_index_brute, root_hull_tuples, BallAutomorphisms};
use crate::profile::TruncationProfile;

pub const CRITERIA: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub millis: u128,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2} {}: {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail
        )
    }
}

pub fn name(id: usize) -> &'static str {
    match id {
        1 => "tree four-point constant",
        2 => "tree shift scales",
        3 => "example group scales",
        4 => "inverse pair distance",
        5 => "distinct and equal tree directions",
        6 => "asymptotic exponents",
        7 => "example direction classes",
        8 => "axis windows agree",
        9 => "inverse limit solver",
        10 => "index oracles",
        11 => "geometry inequalities",
        12 => "distance axioms",
        _ => "unknown",
    }
}

/// Runs one criterion. Errors from the library count as failures.
pub fn run(id: usize) -> CriterionResult {
    let start = Instant::now();
    let outcome = match id {
        1 => tree_fourpoint(),
        2 => tree_scales(),
        3 => example_scales(),
        4 => inverse_pair(),
        5 => tree_directions(),
        6 => exponents(),
        7 => example_classes(),
        8 => axes(),
        9 => inverse_limits(),
        10 => oracles(),
        11 => geometry(),
        12 => axioms(),
        other => Err(Error::Unsupported(format!("no criterion {other}"))),
    };
    let (passed, detail) = match outcome {
        Ok((p, d)) => (p, d),
        Err(e) => (false, format!("error: {e}")),
    };
    CriterionResult {
        id,
        name: name(id),
        passed,
        detail,
        millis: start.elapsed().as_millis(),
    }
}

pub fn run_all() -> Vec<CriterionResult> {
    (1..=CRITERIA).map(run).collect()
}

/// `"all"` or `"acceptance"` for every criterion, else a comma-separated list of ids.
pub fn parse_suite(s: &str) -> Result<Vec<usize>> {
    match s {
        "all" | "acceptance" => Ok((1..=CRITERIA).collect()),
        _ => s
            .split(',')
            .map(|x| match x.trim().parse::<usize>() {
                Ok(i) if (1..=CRITERIA).contains(&i) => Ok(i),
                _ => Err(Error::ParseError {
                    line: 0,
                    reason: format!("unknown criterion {x:?}"),
                }),
            })
            .collect(),
    }
}

type Check = Result<(bool, String)>;

fn tree() -> Result<TreeInstance> {
    build_tree(3, 8)
}

fn word(s: &str) -> Vertex {
    Vertex::new(s.bytes().map(|b| (b - b'0') as i32).collect())
}

fn tree_fourpoint() -> Check {
    let t = tree()?;
    let sample = ball(&t, &t.basepoint(), 5);
    let r = estimate_hyperbolicity(&t, &sample, ScanPolicy::default())?;
    let ok = r.delta_fourpoint == HalfInt::from_int(0) && sample.len() == 94;
    Ok((
        ok,
        format!(
            "delta_fourpoint = {} on {} vertices ({} quadruples)",
            r.delta_fourpoint,
            sample.len(),
            r.sample_spec.quadruples
        ),
    ))
}

fn tree_scales() -> Check {
    let t = tree()?;
    let p = TruncationProfile::default();
    let mut ok = true;
    let mut parts = Vec::new();
    for l in 1..=3usize {
        let g = TreeAut::shift_by(3, 0, 1, l);
        let want = BigUint::from(1u32 << l);
        let tidy = tidy_search(&t, &g, &p)?;
        let lim = scale_with_method(&t, &g, ScaleMethod::LimitFormula, &p.with_power_bound(12))?;
        let sq = tidy_search(&t, &g.power(2), &p)?;
        let want_f = (1u32 << l) as f64;
        let l_ok = tidy.exact.as_ref() == Some(&want)
            && (lim.approx - want_f).abs() <= 0.01 * want_f
            && sq.exact == Some(&want * &want);
        ok &= l_ok;
        parts.push(format!(
            "l={l}: tidy {} limit {:.6} square {}",
            tidy.exact.map(|v| v.to_string()).unwrap_or_default(),
            lim.approx,
            sq.exact.map(|v| v.to_string()).unwrap_or_default()
        ));
    }
    Ok((ok, parts.join("; ")))
}

fn example_scales() -> Check {
    let e = build_example_group(2)?;
    let p = TruncationProfile::default();
    let mut ok = true;
    let mut parts = Vec::new();
    for n in 1..=3i64 {
        let a = ExampleElement::alpha_power(n);
        let s = scale_estimate(&e, &a, &p)?;
        let tidy = tidy_search(&e, &a, &p)?;
        let want = BigUint::from(1u32 << n);
        ok &= s.method == ScaleMethod::ClosedForm
            && s.exact.as_ref() == Some(&want)
            && tidy.exact == Some(want);
        parts.push(format!(
            "s(alpha^{n}) = {}",
            s.exact.map(|v| v.to_string()).unwrap_or_default()
        ));
    }
    Ok((ok, parts.join(", ")))
}

/// Row value of the tree unit shift against its inverse: `[g^n U : g^n U ∩ U]`
/// is `3 * 2^(n-1)` for the vertex stabilizer at the anchor.
fn tree_inverse_row(n: usize) -> f64 {
    (3f64.ln() + (n as f64 - 1.0) * 2f64.ln()) / (n as f64 * 2f64.ln())
}

fn inverse_pair() -> Check {
    let e = build_example_group(2)?;
    let (a, b) = (
        ExampleElement::alpha_power(1),
        ExampleElement::alpha_power(-1),
    );
    let mut ok = true;
    let mut parts = Vec::new();
    for n in [4usize, 5, 8, 13, 20, 40] {
        let r = delta_pseudometric(
            &e,
            &a,
            &b,
            &TruncationProfile::default().with_power_bound(n),
        )?;
        ok &= r.delta == 2.0;
        parts.push(format!("N={n}: {}", r.delta));
    }
    let t = tree()?;
    let g = TreeAut::shift(3, 0, 1);
    let r = delta_pseudometric(&t, &g, &g.inverse(), &TruncationProfile::default())?;
    let rows_ok =
        r.ab.rows
            .iter()
            .chain(&r.ba.rows)
            .all(|row| (row.value - tree_inverse_row(row.n)).abs() <= 1e-3);
    ok &= rows_ok && r.delta >= 1.9;
    parts.push(format!("tree: delta {:.6}, rows match {rows_ok}", r.delta));
    Ok((ok, parts.join("; ")))
}

/// An automorphism fixing the ray `0, 01, 010, ...` and exchanging the
/// branches at `1` and `2`.
pub fn branch_swap() -> TreeAut {
    TreeAut::twist(&[0], vec![0, 2, 1]).then_after(&TreeAut::twist(&[], vec![0, 2, 1]))
}

fn tree_directions() -> Check {
    let t = tree()?;
    let p = TruncationProfile::default();
    let gs = [
        TreeAut::shift(3, 0, 1),
        TreeAut::shift(3, 1, 2),
        TreeAut::shift(3, 2, 0),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for i in 0..3 {
        for j in i + 1..3 {
            let r = delta_pseudometric(&t, &gs[i], &gs[j], &p)?;
            ok &= r.delta >= 1.9;
            parts.push(format!("{i}{j}: {:.4}", r.delta));
        }
    }
    let g = &gs[0];
    let h = g.conjugate_by(&branch_swap());
    let (u, v) = (t.base_handle(g, &p)?, t.base_handle(&h, &p)?);
    let r = delta_with_bases(&t, g, &h, &u, &v, &p)?;
    let unit_rows =
        r.ab.rows
            .iter()
            .chain(&r.ba.rows)
            .all(|row| row.k == row.n && row.index == BigUint::from(1u32));
    ok &= r.delta == 0.0 && unit_rows;
    parts.push(format!(
        "same end: {} (index 1 at k = n: {unit_rows})",
        r.delta
    ));
    Ok((ok, parts.join(", ")))
}

fn exponents() -> Check {
    let t = tree()?;
    let g = TreeAut::shift(3, 0, 1);
    let g2 = TreeAut::shift_by(3, 0, 1, 2);
    let v = asymptotic(&t, &g, &g2, &TruncationProfile::default())?;
    let constant = v
        .distances
        .iter()
        .all(|d| d.product == v.bound_witness.product);
    let ok = v.related && v.exponents == (2, 1) && constant;
    Ok((
        ok,
        format!(
            "related {} with exponents {:?}, bound {}",
            v.related, v.exponents, v.bound_witness.product
        ),
    ))
}

fn example_classes() -> Check {
    let e = build_example_group(2)?;
    let elements = e.sample_elements(&[1, 2, 3, -1, -2, -3], 0);
    let r = direction_report(&e, &elements, &TruncationProfile::default())?;
    let mut cross_ok = true;
    for pair in r.pairs.iter().filter(|p| !p.same_class) {
        match &pair.delta {
            Ok(d) => cross_ok &= d.delta == 2.0,
            Err(_) => cross_ok = false,
        }
    }
    let ok = r.classes.len() == 2 && cross_ok && r.moving.len() == 6;
    Ok((
        ok,
        format!(
            "{} classes ({}), cross-class delta exactly 2: {cross_ok}",
            r.classes.len(),
            r.grouping
        ),
    ))
}

fn axes() -> Check {
    let t = tree()?;
    let p = TruncationProfile::default();
    let g = TreeAut::shift(3, 0, 1);
    let plain = find_axis(&t, &g, &p)?;
    verify_axis_window(&t, &g, &plain)?;
    let mut ok = plain.len() >= 17;
    for seed in 0..3 {
        let (w, _) = short_lex_axis(&t, &g, &p, seed)?;
        verify_axis_window(&t, &g, &w)?;
        ok &= w == plain;
    }
    Ok((
        ok,
        format!(
            "window length {}, identical for seeds 0..3: {ok}",
            plain.len()
        ),
    ))
}

fn random_system(rng: &mut ChaCha8Rng, depth: usize, max_size: usize) -> InverseSystem {
    let sizes: Vec<usize> = (0..depth).map(|_| rng.random_range(1..=max_size)).collect();
    let maps = (0..depth - 1)
        .map(|i| {
            (0..sizes[i + 1])
                .map(|_| rng.random_range(0..sizes[i]))
                .collect()
        })
        .collect();
    InverseSystem::new(sizes, maps)
}

/// The pigeonhole rule replayed on the enumerated thread list.
fn pigeonhole_on_threads(threads: &[Vec<usize>], depth: usize) -> Vec<usize> {
    let mut alive: Vec<&Vec<usize>> = threads.iter().collect();
    let mut out = Vec::with_capacity(depth);
    for level in 0..depth {
        let mut counts = std::collections::BTreeMap::new();
        for t in &alive {
            *counts.entry(t[level]).or_insert(0usize) += 1;
        }
        let best = counts
            .iter()
            .max_by_key(|(&x, &c)| (c, std::cmp::Reverse(x)))
            .map(|(&x, _)| x)
            .expect("threads exist");
        alive.retain(|t| t[level] == best);
        out.push(best);
    }
    out
}

fn inverse_limits() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let (depth, systems) = (8, 200);
    let mut agree = 0;
    for _ in 0..systems {
        let sys = random_system(&mut rng, depth, 6);
        let sol = solve_inverse_limit(&sys)?;
        let threads = brute_force_threads(&sys, 2_000_000).ok_or(Error::DepthInfeasible(depth))?;
        let images = (0..depth)
            .map(|i| threads.iter().map(|t| t[i]).collect::<HashSet<_>>().len())
            .min()
            .unwrap_or(0);
        if threads.contains(&sol.thread)
            && sol.thread == pigeonhole_on_threads(&threads, depth)
            && sol.threads_at_depth == threads.len()
            && sol.surviving_bound == images
            && sol.surviving_bound <= sol.level_bound
        {
            agree += 1;
        }
    }
    Ok((
        agree == systems,
        format!("{agree}/{systems} random systems agree with enumeration"),
    ))
}

fn oracles() -> Check {
    let t = tree()?;
    let autos = BallAutomorphisms::new(&t, 3)?;
    let vs = ball(&t, &t.basepoint(), 3);
    let mut bs: Vec<Vec<Vertex>> = vs.iter().map(|v| vec![v.clone()]).collect();
    for (i, x) in vs.iter().enumerate() {
        for y in &vs[i + 1..] {
            bs.push(vec![x.clone(), y.clone()]);
        }
    }
    let (mut tree_cases, mut tree_bad) = (0usize, 0usize);
    for a in root_hull_tuples(&t, 3) {
        let ga = autos.stabilizer(&a)?;
        for b in &bs {
            tree_cases += 1;
            if BigUint::from(autos.orbit_size(&ga, b)?) != t.tuple_index(&a, b) {
                tree_bad += 1;
            }
        }
    }
    let e = build_example_group(2)?;
    let range = -4i64..=4;
    let coord: Vec<Vec<BigUint>> = range
        .clone()
        .map(|n| {
            range
                .clone()
                .map(|m| example_index_brute(2, (n, 0), (m, 0), -6, 6))
                .collect::<Result<_>>()
        })
        .collect::<Result<_>>()?;
    let at = |x: i64| (x + 4) as usize;
    let (mut ex_cases, mut ex_bad) = (0usize, 0usize);
    for n1 in range.clone() {
        for m1 in range.clone() {
            for n2 in range.clone() {
                for m2 in range.clone() {
                    ex_cases += 1;
                    let brute = &coord[at(n1)][at(n2)] * &coord[at(m1)][at(m2)];
                    if e.index(&CosHandle::product(n1, m1), &CosHandle::product(n2, m2))? != brute {
                        ex_bad += 1;
                    }
                }
            }
        }
    }
    Ok((
        tree_bad == 0 && ex_bad == 0,
        format!(
            "tree {}/{tree_cases} over {} automorphisms, example {}/{ex_cases}",
            tree_cases - tree_bad,
            autos.len(),
            ex_cases - ex_bad
        ),
    ))
}

const SAMPLES: usize = 500;

fn geometry_on(
    g: &dyn Graph,
    vs: &[Vertex],
    delta: HalfInt,
    rng: &mut ChaCha8Rng,
) -> Result<usize> {
    let h = 1 << 10;
    let pick = |rng: &mut ChaCha8Rng| vs.choose(rng).expect("nonempty").clone();
    let mut failures = 0;
    for _ in 0..SAMPLES {
        let (p, x, y) = (pick(rng), pick(rng), pick(rng));
        if !check_standard_estimate(g, &p, &x, &y, delta, h)? {
            failures += 1;
        }
        let (x1, y1) = (pick(rng), pick(rng));
        let g0 = all_geodesics(g, &x, &y, h, 64)?
            .choose(rng)
            .expect("geodesic exists")
            .clone();
        let g1 = all_geodesics(g, &x1, &y1, h, 64)?
            .choose(rng)
            .expect("geodesic exists")
            .clone();
        if !check_ribbon(g, &g0, &g1, delta, h)? {
            failures += 1;
        }
        let g2 = all_geodesics(g, &x, &y, h, 64)?
            .choose(rng)
            .expect("geodesic exists")
            .clone();
        if !check_fellow_travel(g, &g0, &g2, delta, h)? {
            failures += 1;
        }
    }
    Ok(failures)
}

fn geometry() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut parts = Vec::new();
    let mut all_ok = true;
    let t = tree()?;
    let tv = ball(&t, &t.basepoint(), 4);
    let f = geometry_on(&t, &tv, HalfInt::from_int(0), &mut rng)?;
    all_ok &= f == 0;
    parts.push(format!("T3: {f} failures"));
    let finite = [
        FiniteGraph::cycle(6),
        FiniteGraph::cycle(8),
        FiniteGraph::random_connected(12, 0.2, 1),
        FiniteGraph::random_connected(12, 0.2, 2),
    ];
    for g in &finite {
        let vs = ball(g, &g.basepoint(), g.len());
        let delta = slim_delta_all_geodesics(g, &vs, 1 << 10, 64)?;
        let f = geometry_on(g, &vs, delta, &mut rng)?;
        all_ok &= f == 0;
        parts.push(format!("{} (delta {delta}): {f} failures", g.name()));
    }
    Ok((all_ok, parts.join(", ")))
}

fn triangle_violations<I: GroupInstance>(inst: &I, family: &[CosHandle]) -> Result<(usize, usize)> {
    let n = family.len();
    let mut d = vec![vec![BigUint::from(0u32); n]; n];
    let mut bad = 0;
    for i in 0..n {
        for j in 0..n {
            let c = cos_distance(inst, &family[i], &family[j])?;
            d[i][j] = c.product;
        }
    }
    for i in 0..n {
        if d[i][i] != BigUint::from(1u32) {
            bad += 1;
        }
        for j in 0..n {
            if d[i][j] != d[j][i] {
                bad += 1;
            }
            for k in 0..n {
                if d[i][k] > &d[i][j] * &d[j][k] {
                    bad += 1;
                }
            }
        }
    }
    Ok((bad, n * n * n))
}

fn axioms() -> Check {
    let t = tree()?;
    let tuples: [&[&str]; 10] = [
        &[""],
        &["0"],
        &["1"],
        &["2"],
        &["01"],
        &["10"],
        &["012"],
        &["0", "1"],
        &["01", "2"],
        &["010", "121"],
    ];
    let tree_family = tuples
        .iter()
        .map(|s| CosHandle::stabilizer(s.iter().map(|w| word(w)).collect()))
        .collect::<Result<Vec<_>>>()?;
    let (tb, tn) = triangle_violations(&t, &tree_family)?;
    let e = build_example_group(2)?;
    let params = [
        (0, 0),
        (1, -1),
        (-2, 2),
        (3, 0),
        (0, 3),
        (-1, -1),
        (2, 2),
        (4, -4),
        (-3, 1),
        (1, 1),
    ];
    let ex_family: Vec<CosHandle> = params
        .iter()
        .map(|&(n, m)| CosHandle::product(n, m))
        .collect();
    let (eb, en) = triangle_violations(&e, &ex_family)?;
    Ok((
        tb == 0 && eb == 0,
        format!("violations: tree {tb} of {tn} triples, example {eb} of {en} triples"),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn branch_swap_fixes_the_attracting_ray() {
        let b = branch_swap();
        assert_eq!(b.apply(&[0, 1, 0, 1]), vec![0, 1, 0, 1]);
        assert_eq!(b.apply(&[1, 0]), vec![2, 0]);
        tree().unwrap().validate_aut(&b).unwrap();
    }

    #[test]
    fn suites_parse() {
        assert_eq!(parse_suite("all").unwrap().len(), 12);
        assert_eq!(parse_suite("3,5").unwrap(), vec![3, 5]);
        assert!(parse_suite("13").is_err());
    }
}
