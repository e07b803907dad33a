//! Named reference domains and the textual / JSON domain formats.
//!
//! Preset strings have the form `name` or `name:p1,p2,...`; angle parameters
//! accept plain radians, `pi`-expressions such as `pi/4` or `2pi/3`, and degrees
//! with a `deg` suffix.
//!
//! JSON documents are either `{"kind": "<preset>", "params": {...}}`,
//! `{"kind": "polygon", "vertices": [[x, y], ...]}` or
//! `{"kind": "arc_polygon", "vertices": [[x, y], ...], "bulges": [b1, ...]}`,
//! optionally with `"anchor": [x, y]`. A bulge is `tan(arc angle / 4)` and `0`
//! means a straight edge; a positive bulge bows the edge to the right of the
//! direction of travel, i.e. outward for a counter-clockwise boundary.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde_json::Value;

use super::curve::Piece;
use super::domain::{DomainKind, DomainSpec, Edge};
use crate::error::{Error, Result};

/// Preset names with their parameter names and defaults.
pub const PRESETS: &[(&str, &[(&str, f64)])] = &[
    ("disk", &[("r", 1.0)]),
    ("ellipse", &[("a", 2.0), ("b", 1.0)]),
    ("square", &[("s", 1.0)]),
    ("rectangle", &[("w", 2.0), ("h", 1.0)]),
    ("regular_ngon", &[("n", 6.0), ("r", 1.0)]),
    ("truncated_wedge", &[("theta", PI / 3.0), ("cap", 0.5)]),
    ("sector", &[("theta", PI / 2.0), ("r", 1.0)]),
    ("lens", &[("theta1", PI / 2.0), ("theta2", PI / 2.0)]),
    ("lshape", &[]),
];

fn canonical_name(name: &str) -> &str {
    match name {
        "ngon" => "regular_ngon",
        "wedge" => "truncated_wedge",
        "l_shape" | "lshaped" => "lshape",
        "circle" => "disk",
        other => other,
    }
}

/// Parses `pi/4`, `2pi/3`, `0.5*pi`, `45deg` or a plain number.
pub fn parse_number(field: &str, s: &str) -> Result<f64> {
    let t = s.trim().to_ascii_lowercase().replace(' ', "");
    let bad = || Error::parse(field, format!("cannot parse number `{s}`"));
    if let Some(deg) = t.strip_suffix("deg") {
        return deg.parse::<f64>().map(|v| v.to_radians()).map_err(|_| bad());
    }
    if let Some(pos) = t.find("pi") {
        let coef = t[..pos].trim_end_matches('*');
        let c = if coef.is_empty() { 1.0 } else { coef.parse::<f64>().map_err(|_| bad())? };
        let rest = &t[pos + 2..];
        let d = match rest.strip_prefix('/') {
            Some(den) => den.parse::<f64>().map_err(|_| bad())?,
            None if rest.is_empty() => 1.0,
            None => return Err(bad()),
        };
        return Ok(c * PI / d);
    }
    t.parse::<f64>().map_err(|_| bad())
}

/// Builds a domain from a preset string such as `ellipse:2,1` or `lens:pi/4,pi/5`.
pub fn preset_from_str(spec: &str) -> Result<DomainSpec> {
    let (name, args) = match spec.split_once(':') {
        Some((n, a)) => (n.trim(), a),
        None => (spec.trim(), ""),
    };
    let name = canonical_name(name);
    let entry = PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::parse("domain", format!("unknown preset `{name}`")))?;
    let given: Vec<&str> = if args.trim().is_empty() {
        Vec::new()
    } else {
        args.split(',').collect()
    };
    if given.len() > entry.1.len() {
        return Err(Error::parse(
            "domain",
            format!("preset `{name}` takes at most {} parameters", entry.1.len()),
        ));
    }
    let mut params: Vec<f64> = entry.1.iter().map(|(_, v)| *v).collect();
    for (k, g) in given.iter().enumerate() {
        params[k] = parse_number(entry.1[k].0, g)?;
    }
    preset(name, &params)
}

/// Builds a named preset from explicit parameters (see [`PRESETS`] for the order).
pub fn preset(name: &str, params: &[f64]) -> Result<DomainSpec> {
    let name = canonical_name(name);
    let p = |k: usize, field: &str| -> Result<f64> {
        params
            .get(k)
            .copied()
            .ok_or_else(|| Error::parse(field, "missing parameter"))
    };
    let positive = |v: f64, field: &str| -> Result<f64> {
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(Error::parse(field, format!("must be positive, got {v}")))
        }
    };
    let kind = DomainKind::Preset {
        name: name.to_string(),
        params: params.to_vec(),
    };
    let c = |re: f64, im: f64| C64::new(re, im);
    let mut d = match name {
        "disk" => {
            let r = positive(p(0, "r")?, "r")?;
            ellipse_domain(r, r)?
        }
        "ellipse" => {
            let a = positive(p(0, "a")?, "a")?;
            let b = positive(p(1, "b")?, "b")?;
            ellipse_domain(a, b)?
        }
        "square" => {
            let s = positive(p(0, "s")?, "s")?;
            rectangle(s, s)?
        }
        "rectangle" => {
            let w = positive(p(0, "w")?, "w")?;
            let h = positive(p(1, "h")?, "h")?;
            rectangle(w, h)?
        }
        "regular_ngon" => {
            let n = p(0, "n")?;
            if n < 3.0 || n.fract() != 0.0 {
                return Err(Error::parse("n", "need an integer n >= 3"));
            }
            let r = positive(p(1, "r")?, "r")?;
            let n = n as usize;
            let off = -PI / 2.0 - PI / n as f64;
            let v: Vec<C64> = (0..n)
                .map(|k| C64::from_polar(r, off + 2.0 * PI * k as f64 / n as f64))
                .collect();
            DomainSpec::from_polygon(&v)?
        }
        "truncated_wedge" => {
            let theta = p(0, "theta")?;
            if !(theta > 0.0 && theta < PI) {
                return Err(Error::parse("theta", "truncated wedge needs 0 < theta < pi"));
            }
            let cap = positive(p(1, "cap")?, "cap")?;
            truncated_wedge(theta, cap)?
        }
        "sector" => {
            let theta = p(0, "theta")?;
            if !(theta > 0.0 && theta < 2.0 * PI) {
                return Err(Error::parse("theta", "sector needs 0 < theta < 2 pi"));
            }
            let r = positive(p(1, "r")?, "r")?;
            let a = C64::from_polar(r, -theta / 2.0);
            let b = C64::from_polar(r, theta / 2.0);
            let edges = vec![
                Edge::single(Piece::Line { a: c(0.0, 0.0), b: a }),
                Edge::single(Piece::Arc {
                    a,
                    center: c(0.0, 0.0),
                    sweep: theta,
                }),
                Edge::single(Piece::Line { a: b, b: c(0.0, 0.0) }),
            ];
            DomainSpec::new(kind.clone(), edges, None)?
        }
        "lens" => {
            let t1 = p(0, "theta1")?;
            let t2 = p(1, "theta2")?;
            for (v, f) in [(t1, "theta1"), (t2, "theta2")] {
                if !(v > 0.0 && v < PI) {
                    return Err(Error::parse(f, "lens angles must lie in (0, pi)"));
                }
            }
            lens(t1, t2)?
        }
        "lshape" => DomainSpec::from_polygon(&[
            c(0.0, 0.0),
            c(2.0, 0.0),
            c(2.0, 1.0),
            c(1.0, 1.0),
            c(1.0, 2.0),
            c(0.0, 2.0),
        ])?,
        _ => return Err(Error::parse("domain", format!("unknown preset `{name}`"))),
    };
    d.kind = kind;
    Ok(d)
}

fn ellipse_domain(a: f64, b: f64) -> Result<DomainSpec> {
    DomainSpec::new(
        DomainKind::Ellipse { a, b },
        vec![Edge::single(Piece::Ellipse {
            center: C64::new(0.0, 0.0),
            a,
            b,
            rotation: 0.0,
        })],
        Some(C64::new(0.0, 0.0)),
    )
}

fn rectangle(w: f64, h: f64) -> Result<DomainSpec> {
    let (x, y) = (w / 2.0, h / 2.0);
    DomainSpec::from_polygon(&[
        C64::new(-x, -y),
        C64::new(x, -y),
        C64::new(x, y),
        C64::new(-x, y),
    ])
}

/// Cone of opening `theta` capped by a circle of radius `cap` tangent to both
/// sides, so the tip is the only corner.
fn truncated_wedge(theta: f64, cap: f64) -> Result<DomainSpec> {
    let half = theta / 2.0;
    let dist = cap / half.sin();
    let leg = dist * half.cos();
    let p1 = C64::from_polar(leg, -half);
    let p2 = C64::from_polar(leg, half);
    let o = C64::new(0.0, 0.0);
    let edge = Edge {
        pieces: vec![
            Piece::Line { a: o, b: p1 },
            Piece::arc_with_start_tangent(p1, p2, C64::from_polar(1.0, -half)),
            Piece::Line { a: p2, b: o },
        ],
    };
    let kind = DomainKind::Preset {
        name: "truncated_wedge".into(),
        params: vec![theta, cap],
    };
    DomainSpec::new(kind, vec![edge], None)
}

/// Two-vertex domain with corners of opening `theta1` at `-1` and `theta2` at `+1`.
/// Each side is a tangent-continuous pair of circular arcs (a biarc); the upper
/// side mirrors the lower one.
fn lens(theta1: f64, theta2: f64) -> Result<DomainSpec> {
    let p0 = C64::new(-1.0, 0.0);
    let p1 = C64::new(1.0, 0.0);
    let t0 = C64::from_polar(1.0, -theta1 / 2.0);
    let t1 = C64::from_polar(1.0, theta2 / 2.0);
    let lower = biarc(p0, t0, p1, t1);
    let upper = Edge {
        pieces: lower
            .iter()
            .rev()
            .map(|p| conjugate_piece(p).reversed())
            .collect(),
    };
    DomainSpec::new(
        DomainKind::Preset {
            name: "lens".into(),
            params: vec![theta1, theta2],
        },
        vec![Edge { pieces: lower }, upper],
        None,
    )
}

fn conjugate_piece(p: &Piece) -> Piece {
    match p {
        Piece::Line { a, b } => Piece::Line { a: a.conj(), b: b.conj() },
        Piece::Arc { a, center, sweep } => Piece::Arc {
            a: a.conj(),
            center: center.conj(),
            sweep: -sweep,
        },
        _ => unreachable!("biarcs only contain segments and arcs"),
    }
}

/// Biarc from `p0` (tangent `t0`) to `p1` (tangent `t1`) with equal control lengths.
fn biarc(p0: C64, t0: C64, p1: C64, t1: C64) -> Vec<Piece> {
    let dot = |u: C64, v: C64| u.re * v.re + u.im * v.im;
    let v = p1 - p0;
    let t = t0 + t1;
    let denom = 2.0 * (1.0 - dot(t0, t1));
    let d = if denom.abs() < 1e-14 {
        dot(v, v) / (4.0 * dot(v, t0))
    } else {
        (-dot(v, t) + (dot(v, t).powi(2) + denom * dot(v, v)).sqrt()) / denom
    };
    let q0 = p0 + d * t0;
    let q1 = p1 - d * t1;
    let pm = 0.5 * (q0 + q1);
    let first = Piece::arc_with_start_tangent(p0, pm, t0);
    let second = Piece::arc_with_start_tangent(p1, pm, -t1).reversed();
    vec![first, second]
}

fn json_point(v: &Value, field: &str) -> Result<C64> {
    let arr = v
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| Error::parse(field, "expected [x, y]"))?;
    let x = arr[0].as_f64().ok_or_else(|| Error::parse(field, "x is not a number"))?;
    let y = arr[1].as_f64().ok_or_else(|| Error::parse(field, "y is not a number"))?;
    Ok(C64::new(x, y))
}

fn json_points(doc: &Value, field: &str) -> Result<Vec<C64>> {
    doc.get(field)
        .and_then(Value::as_array)
        .ok_or_else(|| Error::parse(field, "missing or not an array"))?
        .iter()
        .enumerate()
        .map(|(k, v)| json_point(v, &format!("{field}[{k}]")))
        .collect()
}

/// Builds a domain from a JSON document (see the module docs for the schema).
pub fn domain_from_json(text: &str) -> Result<DomainSpec> {
    let doc: Value = serde_json::from_str(text).map_err(|e| Error::parse("json", e.to_string()))?;
    let kind = doc
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::parse("kind", "missing or not a string"))?;
    let mut d = match kind {
        "polygon" => DomainSpec::from_polygon(&json_points(&doc, "vertices")?)?,
        "arc_polygon" => {
            let v = json_points(&doc, "vertices")?;
            let b = doc
                .get("bulges")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::parse("bulges", "missing or not an array"))?
                .iter()
                .enumerate()
                .map(|(k, x)| {
                    x.as_f64()
                        .ok_or_else(|| Error::parse(format!("bulges[{k}]"), "not a number"))
                })
                .collect::<Result<Vec<f64>>>()?;
            DomainSpec::from_arc_polygon(&v, &b)?
        }
        other => {
            let name = canonical_name(other);
            let entry = PRESETS
                .iter()
                .find(|(n, _)| *n == name)
                .ok_or_else(|| Error::parse("kind", format!("unknown kind `{other}`")))?;
            let obj = doc.get("params");
            let mut params = Vec::new();
            for (pname, default) in entry.1.iter() {
                let v = match obj.and_then(|o| o.get(*pname)) {
                    None => *default,
                    Some(Value::String(s)) => parse_number(&format!("params.{pname}"), s)?,
                    Some(x) => x
                        .as_f64()
                        .ok_or_else(|| Error::parse(format!("params.{pname}"), "not a number"))?,
                };
                params.push(v);
            }
            preset(name, &params)?
        }
    };
    if let Some(a) = doc.get("anchor") {
        let anchor = json_point(a, "anchor")?;
        if !d.contains(anchor) {
            return Err(Error::Geometry("anchor lies outside the domain".into()));
        }
        d.anchor = anchor;
    }
    Ok(d)
}

/// Accepts either a preset string or a JSON document.
pub fn build_domain(source: &str) -> Result<DomainSpec> {
    if source.trim_start().starts_with('{') {
        domain_from_json(source)
    } else {
        preset_from_str(source)
    }
}
