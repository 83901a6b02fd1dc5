//! JSON and CSV rendering of results. Floats carry 12 significant digits and
//! big integers are decimal strings.

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};

use crate::cos::{CosDistance, CosHandle, GroupInstance, ScaleEstimate};
use crate::directions::{AsymptoticVerdict, DeltaPlusTable, DeltaReport, DirectionReport};
use crate::error::Error;
use crate::graph::{Graph, HyperbolicityReport};
use crate::isometry::{AxisWindow, IsometryClass, ShortLexDiagnostics};
use crate::profile::TruncationProfile;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// A float rounded to 12 significant digits.
pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::String(x.to_string());
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    json!(rounded)
}

pub fn big(x: &BigUint) -> Value {
    Value::String(x.to_str_radix(10))
}

/// A big integer as a JSON number when it is exactly representable, else a string.
pub fn big_or_number(x: &BigUint) -> Value {
    match x.to_u64() {
        Some(v) if v < 1 << 53 => json!(v),
        _ => big(x),
    }
}

pub fn profile(p: &TruncationProfile) -> Value {
    json!({
        "horizon": p.horizon,
        "power_bound": p.power_bound,
        "exponent_bound": p.exponent_bound,
        "end_threshold": p.end_threshold,
        "seed": p.seed,
    })
}

/// Wraps a command result with the profile and library version.
pub fn envelope(command: &str, p: &TruncationProfile, result: Value) -> Value {
    json!({ "command": command, "version": VERSION, "profile": profile(p), "result": result })
}

pub fn error(command: &str, p: &TruncationProfile, e: &Error) -> Value {
    json!({
        "command": command,
        "version": VERSION,
        "profile": profile(p),
        "error": { "kind": e.kind(), "message": e.to_string() },
    })
}

pub fn hyperbolicity(r: &HyperbolicityReport) -> Value {
    serde_json::to_value(r).expect("report serializes")
}

pub fn class(g: &dyn Graph, c: &IsometryClass) -> Value {
    match c {
        IsometryClass::Elliptic {
            vertex,
            period,
            orbit_diameter,
        } => json!({
            "kind": "Elliptic",
            "vertex": g.format_vertex(vertex),
            "period": period,
            "orbit_diameter": orbit_diameter,
        }),
        IsometryClass::Hyperbolic {
            vertex,
            power,
            displacement,
        } => json!({
            "kind": "Hyperbolic",
            "vertex": g.format_vertex(vertex),
            "power": power,
            "displacement": displacement,
        }),
        IsometryClass::Undetermined {
            min_displacement,
            reason,
        } => json!({
            "kind": "Undetermined",
            "min_displacement": min_displacement,
            "reason": reason,
        }),
    }
}

pub fn axis(g: &dyn Graph, w: &AxisWindow, diagnostics: Option<&ShortLexDiagnostics>) -> Value {
    let mut out = json!({
        "vertices": w.vertices.iter().map(|v| g.format_vertex(v)).collect::<Vec<_>>(),
        "length": w.len(),
        "power": w.power,
        "shift": w.shift,
        "center": w.center,
    });
    if let Some(d) = diagnostics {
        out["shortlex"] = serde_json::to_value(d).expect("diagnostics serialize");
    }
    out
}

pub fn scale(s: &ScaleEstimate, format_handle: impl Fn(&CosHandle) -> String) -> Value {
    json!({
        "value": match &s.exact { Some(v) => big_or_number(v), None => num(s.approx) },
        "approx": num(s.approx),
        "method": s.method.as_str(),
        "window": s.window,
        "iterates": s.iterates.iter().map(|&x| num(x)).collect::<Vec<_>>(),
        "witness": s.witness.as_ref().map(format_handle),
        "familyRelative": s.family_relative,
    })
}

pub fn cos_distance(d: &CosDistance) -> Value {
    json!({
        "forward": big(&d.forward),
        "backward": big(&d.backward),
        "product": big(&d.product),
        "distance": num(d.log),
    })
}

fn rows(t: &DeltaPlusTable) -> Value {
    t.rows
        .iter()
        .map(|r| json!({ "n": r.n, "k": r.k, "index": big(&r.index), "value": num(r.value), "slack": num(r.slack) }))
        .collect()
}

pub fn delta_plus(t: &DeltaPlusTable) -> Value {
    json!({
        "headline": num(t.headline),
        "slack": num(t.slack),
        "scale_a": big(&t.scale_a),
        "scale_b": big(&t.scale_b),
        "constant": big(&t.constant),
        "rows": rows(t),
    })
}

pub fn delta(r: &DeltaReport) -> Value {
    json!({
        "deltaPlus_ab": num(r.ab.headline),
        "deltaPlus_ba": num(r.ba.headline),
        "delta": num(r.delta),
        "rows": rows(&r.ab),
        "rows_ba": rows(&r.ba),
        "verdict": r.verdict.as_str(),
        "slack": num(r.slack),
        "slack_ab": num(r.ab.slack),
        "slack_ba": num(r.ba.slack),
        "constant": big(&r.ab.constant),
    })
}

/// Rows of a delta report as CSV, both directions, with a direction column.
pub fn delta_csv(r: &DeltaReport) -> String {
    let mut out = String::from("direction,n,k,index,value,slack\n");
    for (tag, t) in [("ab", &r.ab), ("ba", &r.ba)] {
        for row in &t.rows {
            out.push_str(&format!(
                "{tag},{},{},{},{},{}\n",
                row.n,
                row.k,
                row.index,
                num(row.value),
                num(row.slack)
            ));
        }
    }
    out
}

pub fn asymptotic(v: &AsymptoticVerdict) -> Value {
    json!({
        "related": v.related,
        "exponents": [v.exponents.0, v.exponents.1],
        "boundWitness": cos_distance(&v.bound_witness),
        "growthWitness": v.growth_witness,
        "distances": v.distances.iter().map(|d| big(&d.product)).collect::<Vec<_>>(),
    })
}

pub fn directions<I: GroupInstance>(
    inst: &I,
    elements: &[I::Element],
    r: &DirectionReport,
) -> Value {
    let label = |i: usize| inst.format_element(&elements[i]);
    let pairs: Vec<Value> = r
        .pairs
        .iter()
        .map(|p| {
            let mut o = Map::new();
            o.insert("a".into(), json!(label(p.i)));
            o.insert("b".into(), json!(label(p.j)));
            o.insert("sameClass".into(), json!(p.same_class));
            o.insert("consistent".into(), json!(p.consistent));
            match &p.delta {
                Ok(d) => {
                    o.insert("delta".into(), num(d.delta));
                    o.insert("deltaPlus_ab".into(), num(d.ab.headline));
                    o.insert("deltaPlus_ba".into(), num(d.ba.headline));
                    o.insert("verdict".into(), json!(d.verdict.as_str()));
                    o.insert("slack".into(), num(d.slack));
                }
                Err(e) => {
                    o.insert("error".into(), json!(e));
                }
            }
            if let Some((k, constant)) = &p.double_stabilizer {
                o.insert("doubleStabilizerOrbit".into(), big(k));
                o.insert("doubleStabilizerConstant".into(), json!(constant));
            }
            Value::Object(o)
        })
        .collect();
    json!({
        "elements": (0..elements.len()).map(label).collect::<Vec<_>>(),
        "moving": r.moving,
        "excluded": r.excluded.iter().map(|(i, why)| json!({ "element": label(*i), "reason": why })).collect::<Vec<_>>(),
        "grouping": r.grouping,
        "classes": r.classes.iter().map(|c| c.iter().map(|&i| label(i)).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "classCount": r.classes.len(),
        "pairs": pairs,
    })
}

/// Pairwise delta rows of a direction report as CSV.
pub fn directions_csv<I: GroupInstance>(
    inst: &I,
    elements: &[I::Element],
    r: &DirectionReport,
) -> String {
    let mut out = String::from("a,b,direction,n,k,index,value,slack\n");
    for p in &r.pairs {
        let Ok(d) = &p.delta else { continue };
        let (a, b) = (
            inst.format_element(&elements[p.i]),
            inst.format_element(&elements[p.j]),
        );
        for (tag, t) in [("ab", &d.ab), ("ba", &d.ba)] {
            for row in &t.rows {
                out.push_str(&format!(
                    "{a},{b},{tag},{},{},{},{},{}\n",
                    row.n,
                    row.k,
                    row.index,
                    num(row.value),
                    num(row.slack)
                ));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(num(2.0).to_string(), "2.0");
        assert_eq!(num(1.014624062518029).to_string(), "1.01462406252");
        assert_eq!(
            big(&BigUint::from(10u32).pow(30)).as_str().unwrap().len(),
            31
        );
    }
}
