//! Body/potential specification parsing: built-in aliases (`box{n}`,
//! `ball{n}`, `boxball{n}`), a small INI-style file format for custom
//! bodies, and the serializable experiment configuration.
//!
//! Body file grammar (one `key = value` per line, `#` comments):
//!
//! ```text
//! kind = box            kind = ball        kind = polytope
//! lower = -1 -1         dim = 3            circumradius = 2
//! upper = 1 1           radius = 1.0       halfspace = 1 0 | 1
//!                                          halfspace = -1 0 | 1
//! ```
//!
//! Intersections hold two `[first]` / `[second]` sections, each containing
//! a non-intersection body. Numbers may be separated by spaces or commas;
//! a `halfspace` row reads `a₁ … a_n | b` for the constraint a·x ≤ b.

use serde::{Deserialize, Serialize};

use crate::geometry::{BodyKind, ConvexBody};
use crate::potential::Potential;
use crate::volume::unit_ball_volume;
use crate::{Error, Result};

fn parse_floats(s: &str) -> Result<Vec<f64>> {
    let vals: Vec<f64> = s
        .split([',', ' ', '\t'])
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|_| Error::Invalid(format!("bad number '{t}'"))))
        .collect::<Result<_>>()?;
    if vals.is_empty() {
        return Err(Error::Invalid("expected at least one number".into()));
    }
    Ok(vals)
}

struct Chunk<'a> {
    lines: Vec<(&'a str, &'a str)>,
}

impl<'a> Chunk<'a> {
    fn get(&self, key: &str) -> Option<&'a str> {
        self.lines.iter().find(|(k, _)| *k == key).map(|(_, v)| *v)
    }

    fn require(&self, key: &str) -> Result<&'a str> {
        self.get(key).ok_or_else(|| Error::Invalid(format!("body file: missing '{key}'")))
    }

    fn all(&self, key: &str) -> Vec<&'a str> {
        self.lines.iter().filter(|(k, _)| *k == key).map(|(_, v)| *v).collect()
    }
}

fn split_chunks(text: &str) -> Result<(Chunk<'_>, Vec<(&str, Chunk<'_>)>)> {
    let mut top = Chunk { lines: Vec::new() };
    let mut sections: Vec<(&str, Chunk<'_>)> = Vec::new();
    for raw in text.lines() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            sections.push((name.trim(), Chunk { lines: Vec::new() }));
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Invalid(format!("body file: expected 'key = value', got '{line}'")))?;
        let entry = (k.trim(), v.trim());
        match sections.last_mut() {
            Some((_, chunk)) => chunk.lines.push(entry),
            None => top.lines.push(entry),
        }
    }
    Ok((top, sections))
}

fn body_from_chunk(chunk: &Chunk<'_>) -> Result<ConvexBody> {
    match chunk.require("kind")? {
        "box" => {
            let lower = parse_floats(chunk.require("lower")?)?;
            let upper = parse_floats(chunk.require("upper")?)?;
            ConvexBody::axis_box(lower, upper)
        }
        "ball" => {
            let dim: usize = chunk
                .require("dim")?
                .parse()
                .map_err(|_| Error::Invalid("body file: bad dim".into()))?;
            let radius: f64 = chunk
                .require("radius")?
                .parse()
                .map_err(|_| Error::Invalid("body file: bad radius".into()))?;
            ConvexBody::ball(dim, radius)
        }
        "polytope" => {
            let circumradius: f64 = chunk
                .require("circumradius")?
                .parse()
                .map_err(|_| Error::Invalid("body file: bad circumradius".into()))?;
            let rows = chunk.all("halfspace");
            if rows.is_empty() {
                return Err(Error::Invalid("body file: polytope needs halfspace rows".into()));
            }
            let mut a = Vec::with_capacity(rows.len());
            let mut b = Vec::with_capacity(rows.len());
            for row in rows {
                let (lhs, rhs) = row.split_once('|').ok_or_else(|| {
                    Error::Invalid("body file: halfspace must read 'a1 .. an | b'".into())
                })?;
                a.push(parse_floats(lhs)?);
                let bv = parse_floats(rhs)?;
                if bv.len() != 1 {
                    return Err(Error::Invalid("body file: halfspace offset must be one number".into()));
                }
                b.push(bv[0]);
            }
            ConvexBody::polytope(a, b, circumradius)
        }
        "intersection" => {
            Err(Error::Invalid("body file: intersections cannot nest inside sections".into()))
        }
        other => Err(Error::Invalid(format!("body file: unknown kind '{other}'"))),
    }
}

pub fn parse_body(text: &str) -> Result<ConvexBody> {
    let (top, sections) = split_chunks(text)?;
    match top.require("kind")? {
        "intersection" => {
            let find = |name: &str| -> Result<&Chunk<'_>> {
                sections
                    .iter()
                    .find(|(n, _)| *n == name)
                    .map(|(_, c)| c)
                    .ok_or_else(|| Error::Invalid(format!("body file: intersection needs a [{name}] section")))
            };
            if sections.len() != 2 {
                return Err(Error::Invalid(
                    "body file: intersection takes exactly [first] and [second] sections".into(),
                ));
            }
            let first = body_from_chunk(find("first")?)?;
            let second = body_from_chunk(find("second")?)?;
            ConvexBody::intersection(first, second)
        }
        _ => {
            if !sections.is_empty() {
                return Err(Error::Invalid("body file: sections only belong to intersections".into()));
            }
            body_from_chunk(&top)
        }
    }
}

fn serialize_kind(kind: &BodyKind, out: &mut String) {
    use std::fmt::Write;
    match kind {
        BodyKind::Ball { radius } => {
            // dim is carried by the parent body; reconstructed below
            writeln!(out, "kind = ball").unwrap();
            writeln!(out, "radius = {radius}").unwrap();
        }
        BodyKind::AxisBox { lower, upper } => {
            writeln!(out, "kind = box").unwrap();
            writeln!(out, "lower = {}", join(lower)).unwrap();
            writeln!(out, "upper = {}", join(upper)).unwrap();
        }
        BodyKind::Polytope { a, b } => {
            writeln!(out, "kind = polytope").unwrap();
            for (row, bi) in a.iter().zip(b) {
                writeln!(out, "halfspace = {} | {bi}", join(row)).unwrap();
            }
        }
        BodyKind::Intersection { .. } => unreachable!("handled by serialize_body"),
    }
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

/// Inverse of `parse_body`: `parse_body(serialize_body(b))` reproduces the
/// body exactly (f64 Display output round-trips).
pub fn serialize_body(body: &ConvexBody) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    match body.kind() {
        BodyKind::Intersection { first, second } => {
            writeln!(out, "kind = intersection").unwrap();
            writeln!(out, "[first]").unwrap();
            write_simple(first, &mut out);
            writeln!(out, "[second]").unwrap();
            write_simple(second, &mut out);
        }
        _ => write_simple(body, &mut out),
    }
    out
}

fn write_simple(body: &ConvexBody, out: &mut String) {
    use std::fmt::Write;
    serialize_kind(body.kind(), out);
    if matches!(body.kind(), BodyKind::Ball { .. }) {
        writeln!(out, "dim = {}", body.dim()).unwrap();
    }
    if matches!(body.kind(), BodyKind::Polytope { .. }) {
        writeln!(out, "circumradius = {}", body.circumradius()).unwrap();
    }
}

/// `None` when `rest` is not a digit string (the name is a file path, not
/// an alias); `Some(Err)` when it is alias-shaped but the dimension is bad.
fn alias_dim(rest: &str) -> Option<Result<usize>> {
    if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    Some(match rest.parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err(Error::Invalid(format!("alias dimension must be a positive integer, got '{rest}'"))),
    })
}

/// Built-in test bodies: `box{n}` = [−1,1]ⁿ, `ball{n}` = unit ball,
/// `boxball{n}` = [−1,1]ⁿ ∩ (√n/2)·𝔹ⁿ.
pub fn body_from_alias(name: &str) -> Option<Result<ConvexBody>> {
    if let Some(dim) = name.strip_prefix("boxball").and_then(alias_dim) {
        return Some(dim.and_then(|n| {
            let cube = ConvexBody::axis_box(vec![-1.0; n], vec![1.0; n])?;
            let ball = ConvexBody::ball(n, (n as f64).sqrt() / 2.0)?;
            ConvexBody::intersection(cube, ball)
        }));
    }
    if let Some(dim) = name.strip_prefix("box").and_then(alias_dim) {
        return Some(dim.and_then(|n| ConvexBody::axis_box(vec![-1.0; n], vec![1.0; n])));
    }
    if let Some(dim) = name.strip_prefix("ball").and_then(alias_dim) {
        return Some(dim.and_then(|n| ConvexBody::ball(n, 1.0)));
    }
    None
}

/// Resolve a `--body` argument: alias first, else a body-file path.
/// Returns the body plus a short label for report rows (alias name or file
/// stem).
pub fn resolve_body(spec: &str) -> Result<(ConvexBody, String)> {
    if let Some(built) = body_from_alias(spec) {
        return Ok((built?, spec.to_string()));
    }
    let text = std::fs::read_to_string(spec)?;
    let body = parse_body(&text)
        .map_err(|e| Error::Invalid(format!("body file '{spec}': {e}")))?;
    let label = std::path::Path::new(spec)
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or(spec)
        .to_string();
    Ok((body, label))
}

/// Reference volume used for the `normalized` report column: 2ⁿ for boxes,
/// the analytic ball volume, the analytic value for boxball while the ball
/// fits inside the cube (n ≤ 4), a fixed 0.2·2ⁿ convention beyond that,
/// and 1 for file-defined bodies (reported volume unnormalized).
pub fn reference_volume(label: &str) -> f64 {
    let dim_of = |rest: &str| alias_dim(rest).and_then(|d| d.ok());
    if let Some(n) = label.strip_prefix("boxball").and_then(dim_of) {
        let rho = (n as f64).sqrt() / 2.0;
        return if rho <= 1.0 {
            unit_ball_volume(n) * rho.powi(n as i32)
        } else {
            0.2 * 2f64.powi(n as i32)
        };
    }
    if let Some(n) = label.strip_prefix("box").and_then(dim_of) {
        return 2f64.powi(n as i32);
    }
    if let Some(n) = label.strip_prefix("ball").and_then(dim_of) {
        return unit_ball_volume(n);
    }
    1.0
}

/// Parse a `--potential` argument: `uniform`, `gaussian` (σ=1) or
/// `gaussian:<sigma>`.
pub fn parse_potential(spec: &str, body: &ConvexBody) -> Result<Potential> {
    match spec {
        "uniform" => Ok(Potential::uniform()),
        "gaussian" => Potential::gaussian(1.0, body.circumradius()),
        other => {
            if let Some(sig) = other.strip_prefix("gaussian:") {
                let sigma: f64 = sig
                    .parse()
                    .map_err(|_| Error::Invalid(format!("bad gaussian sigma '{sig}'")))?;
                Potential::gaussian(sigma, body.circumradius())
            } else {
                Err(Error::Invalid(format!(
                    "unknown potential '{other}' (expected uniform, gaussian, gaussian:<sigma>)"
                )))
            }
        }
    }
}

/// Resolved run parameters; round-trips through JSON unchanged so runs can
/// be replayed from their recorded configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub command: String,
    pub body: String,
    pub potential: String,
    pub eta: Option<f64>,
    pub steps: usize,
    pub seed: u64,
    pub out: Option<String>,
    pub threads: usize,
}

impl ExperimentConfig {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Invalid(format!("bad config json: {e}")))
    }
}
