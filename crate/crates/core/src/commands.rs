//! String-level entry points shared by the command-line tool and the Python
//! bindings: parse the instance and elements, run, and render.

use serde_json::{json, Value};

use crate::cos::{
    cos_distance, scale_estimate, scale_with_method, CosHandle, GroupInstance, ScaleMethod,
};
use crate::directions::{asymptotic, delta_pseudometric, direction_report};
use crate::error::{Error, Result};
use crate::graph::{ball, estimate_hyperbolicity, Graph, ScanPolicy};
use crate::instances::{
    parse_coset_element, parse_example_element, parse_tree_element, validate_example_element,
    AnyInstance,
};
use crate::isometry::{classify as classify_iso, find_axis, short_lex_axis};
use crate::profile::TruncationProfile;
use crate::report;

/// A rendered result: JSON for stdout, optional CSV rows, a one-line summary.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub json: Value,
    pub csv: Option<String>,
    pub summary: String,
}

impl Outcome {
    fn new(json: Value, summary: String) -> Self {
        Outcome {
            json,
            csv: None,
            summary,
        }
    }
}

/// Runs `$body` with `$g` bound to the group instance and `$parse` to its
/// element parser.
macro_rules! with_group {
    ($inst:expr, $g:ident, $parse:ident => $body:expr) => {
        match $inst {
            AnyInstance::Tree($g) => {
                let $parse = |s: &str| parse_tree_element($g, s);
                $body
            }
            AnyInstance::Example($g) => {
                let $parse = |s: &str| -> Result<_> {
                    let e = parse_example_element(s)?;
                    validate_example_element($g, &e)?;
                    Ok(e)
                };
                $body
            }
            AnyInstance::Coset($g) => {
                let $parse = |s: &str| parse_coset_element($g, s);
                $body
            }
            other => Err(Error::Unsupported(format!(
                "{} has no compact open subgroup oracle",
                other.name()
            ))),
        }
    };
}

fn graph_of(inst: &AnyInstance) -> Result<&dyn Graph> {
    inst.graph()
        .ok_or_else(|| Error::Unsupported(format!("{} is not a graph instance", inst.name())))
}

pub fn hyperbolicity(
    inst: &AnyInstance,
    radius: usize,
    profile: &TruncationProfile,
) -> Result<Outcome> {
    let g = graph_of(inst)?;
    let sample = ball(g, &g.basepoint(), radius);
    let r = estimate_hyperbolicity(g, &sample, ScanPolicy::default().with_seed(profile.seed))?;
    let summary = format!(
        "{}: delta_fourpoint = {}, delta_slim = {} over {} vertices",
        inst.name(),
        r.delta_fourpoint,
        r.delta_slim,
        r.sample_spec.vertices
    );
    Ok(Outcome::new(report::hyperbolicity(&r), summary))
}

pub fn classify(inst: &AnyInstance, iso: &str, profile: &TruncationProfile) -> Result<Outcome> {
    let g = graph_of(inst)?;
    let e = inst.parse_element(iso)?;
    let i = e
        .as_isometry(inst)
        .ok_or_else(|| Error::Unsupported("element does not act on the graph".into()))?;
    let c = classify_iso(g, i.as_ref(), profile)?;
    let summary = format!("{iso}: {}", c.kind());
    Ok(Outcome::new(report::class(g, &c), summary))
}

pub fn axis(
    inst: &AnyInstance,
    iso: &str,
    profile: &TruncationProfile,
    shortlex: bool,
    seed: u64,
) -> Result<Outcome> {
    let g = graph_of(inst)?;
    let e = inst.parse_element(iso)?;
    let i = e
        .as_isometry(inst)
        .ok_or_else(|| Error::Unsupported("element does not act on the graph".into()))?;
    let (w, diag) = if shortlex {
        let (w, d) = short_lex_axis(g, i.as_ref(), profile, seed)?;
        (w, Some(d))
    } else {
        (find_axis(g, i.as_ref(), profile)?, None)
    };
    let summary = format!(
        "{iso}: axis window of length {}, power {}, shift {}",
        w.len(),
        w.power,
        w.shift
    );
    Ok(Outcome::new(report::axis(g, &w, diag.as_ref()), summary))
}

pub fn parse_method(s: &str) -> Result<ScaleMethod> {
    match s {
        "closed-form" | "ClosedForm" => Ok(ScaleMethod::ClosedForm),
        "limit" | "limit-formula" | "LimitFormula" => Ok(ScaleMethod::LimitFormula),
        "tidy" | "tidy-search" | "TidySearch" => Ok(ScaleMethod::TidySearch),
        other => Err(Error::ParseError {
            line: 0,
            reason: format!("unknown scale method {other:?}"),
        }),
    }
}

pub fn scale(
    inst: &AnyInstance,
    iso: &str,
    profile: &TruncationProfile,
    method: Option<ScaleMethod>,
) -> Result<Outcome> {
    with_group!(inst, g, parse => {
        let a = parse(iso)?;
        let s = match method {
            Some(m) => scale_with_method(g, &a, m, profile)?,
            None => scale_estimate(g, &a, profile)?,
        };
        let j = report::scale(&s, |h| g.format_handle(h));
        let summary = format!("s({iso}) = {} via {}", j["value"], s.method.as_str());
        Ok(Outcome::new(j, summary))
    })
}

/// `{"stabilizer": [...]}`, `{"algebraic": {"family": "U", "params": {...}}}`,
/// `U:n,m`, or a comma-separated vertex list.
pub fn parse_handle(inst: &AnyInstance, s: &str) -> Result<CosHandle> {
    let s = s.trim();
    let bad = |reason: String| Error::ParseError { line: 0, reason };
    if let Some(rest) = s.strip_prefix("U:") {
        let parts: Vec<&str> = rest.split(',').collect();
        let [n, m] = parts[..] else {
            return Err(bad(format!("expected U:n,m, got {s:?}")));
        };
        let n = n
            .trim()
            .parse()
            .map_err(|_| bad(format!("bad parameter in {s:?}")))?;
        let m = m
            .trim()
            .parse()
            .map_err(|_| bad(format!("bad parameter in {s:?}")))?;
        return Ok(CosHandle::product(n, m));
    }
    let names: Vec<String> = if s.starts_with('{') {
        let v: Value = serde_json::from_str(s).map_err(|e| Error::ParseError {
            line: e.line(),
            reason: e.to_string(),
        })?;
        if let Some(alg) = v.get("algebraic") {
            let params = alg.get("params").unwrap_or(&Value::Null);
            let get = |k: &str| {
                params
                    .get(k)
                    .and_then(Value::as_i64)
                    .ok_or_else(|| bad(format!("algebraic handle needs {k:?}")))
            };
            return Ok(CosHandle::product(get("first")?, get("second")?));
        }
        let list = v
            .get("stabilizer")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("handle needs \"stabilizer\" or \"algebraic\"".into()))?;
        list.iter()
            .map(|x| {
                x.as_str()
                    .map(str::to_string)
                    .ok_or_else(|| bad("vertex names are strings".into()))
            })
            .collect::<Result<_>>()?
    } else {
        s.strip_prefix("stab:")
            .unwrap_or(s)
            .split(',')
            .map(|x| x.trim().to_string())
            .collect()
    };
    let g = graph_of(inst)?;
    let vs = names
        .iter()
        .map(|n| g.parse_vertex(n))
        .collect::<Result<Vec<_>>>()?;
    CosHandle::stabilizer(vs)
}

pub fn cosdist(
    inst: &AnyInstance,
    u: &str,
    v: &str,
    _profile: &TruncationProfile,
) -> Result<Outcome> {
    let hu = parse_handle(inst, u)?;
    let hv = parse_handle(inst, v)?;
    with_group!(inst, g, _parse => {
        let d = cos_distance(g, &hu, &hv)?;
        let summary = format!("d({}, {}) = log {} = {}", g.format_handle(&hu), g.format_handle(&hv), d.product, report::num(d.log));
        Ok(Outcome::new(report::cos_distance(&d), summary))
    })
}

pub fn delta(inst: &AnyInstance, a: &str, b: &str, profile: &TruncationProfile) -> Result<Outcome> {
    with_group!(inst, g, parse => {
        let (x, y) = (parse(a)?, parse(b)?);
        let r = delta_pseudometric(g, &x, &y, profile)?;
        let summary = format!("delta({a}, {b}) = {} ({}, slack {})", report::num(r.delta), r.verdict.as_str(), report::num(r.slack));
        Ok(Outcome { json: report::delta(&r), csv: Some(report::delta_csv(&r)), summary })
    })
}

pub fn asymptotic_relation(
    inst: &AnyInstance,
    a: &str,
    b: &str,
    profile: &TruncationProfile,
) -> Result<Outcome> {
    with_group!(inst, g, parse => {
        let (x, y) = (parse(a)?, parse(b)?);
        let v = asymptotic(g, &x, &y, profile)?;
        let summary = format!("{a} ~ {b}: {}", if v.related { "related" } else { "unrelated" });
        Ok(Outcome::new(report::asymptotic(&v), summary))
    })
}

pub fn directions(
    inst: &AnyInstance,
    isos: &[String],
    profile: &TruncationProfile,
) -> Result<Outcome> {
    with_group!(inst, g, parse => {
        let elements = isos.iter().map(|s| parse(s)).collect::<Result<Vec<_>>>()?;
        let r = direction_report(g, &elements, profile)?;
        let summary = format!(
            "{} elements, {} moving towards infinity, {} classes ({})",
            elements.len(),
            r.moving.len(),
            r.classes.len(),
            r.grouping
        );
        Ok(Outcome {
            json: report::directions(g, &elements, &r),
            csv: Some(report::directions_csv(g, &elements, &r)),
            summary,
        })
    })
}

/// A short description of an instance for reports.
pub fn describe(inst: &AnyInstance) -> Value {
    json!({ "name": inst.name() })
}
