//! Reader for the Euclidean 2-D subset of TSPLIB.
//!
//! Accepts `TYPE: TSP`, `EDGE_WEIGHT_TYPE: EUC_2D`, a `NODE_COORD_SECTION`
//! and an optional `EOF`. Coordinates are shifted to the origin and divided
//! by the larger bounding-box side, which keeps distance ratios intact; the
//! divisor is recorded as the instance scale.

use super::{Point, TspInstance};
use crate::error::{Error, Result};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

pub fn parse_tsplib(text: &str, k: usize) -> Result<TspInstance> {
    let mut dimension: Option<usize> = None;
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let mut in_coords = false;
    let mut last_line = 0;

    for (no, line) in lines.by_ref() {
        last_line = no;
        if line.is_empty() {
            continue;
        }
        let (key, value) = match line.split_once(':') {
            Some((k, v)) => (k.trim(), v.trim()),
            None => (line, ""),
        };
        match key {
            "NODE_COORD_SECTION" => {
                in_coords = true;
                break;
            }
            "EOF" => break,
            "TYPE" => {
                if value != "TSP" {
                    return Err(Error::UnsupportedFormat(format!("TYPE {value}")));
                }
            }
            "EDGE_WEIGHT_TYPE" => {
                if value != "EUC_2D" {
                    return Err(Error::UnsupportedFormat(format!("EDGE_WEIGHT_TYPE {value}")));
                }
            }
            "DIMENSION" => {
                let d = value
                    .parse::<usize>()
                    .map_err(|_| parse_err(no, format!("bad DIMENSION {value:?}")))?;
                dimension = Some(d);
            }
            "NAME" | "COMMENT" | "CAPACITY" => {}
            other if other.ends_with("_SECTION") => {
                return Err(Error::UnsupportedFormat(format!("section {other}")));
            }
            _ => {}
        }
    }

    if !in_coords {
        return Err(parse_err(last_line + 1, "missing NODE_COORD_SECTION"));
    }
    let n = dimension.ok_or_else(|| parse_err(last_line, "DIMENSION must precede the coordinates"))?;

    let mut raw: Vec<Point> = Vec::with_capacity(n);
    for (no, line) in lines {
        if line.is_empty() {
            continue;
        }
        if line == "EOF" {
            break;
        }
        if raw.len() == n {
            return Err(parse_err(no, "more coordinate rows than DIMENSION"));
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(parse_err(no, format!("expected `index x y`, got {line:?}")));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| parse_err(no, format!("bad number {s:?}")));
        let (x, y) = (num(fields[1])?, num(fields[2])?);
        if !x.is_finite() || !y.is_finite() {
            return Err(parse_err(no, "non-finite coordinate"));
        }
        raw.push([x, y]);
    }
    if raw.len() != n {
        return Err(parse_err(last_line, format!("expected {n} coordinates, found {}", raw.len())));
    }

    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in &raw {
        for d in 0..2 {
            lo[d] = lo[d].min(p[d]);
            hi[d] = hi[d].max(p[d]);
        }
    }
    let side = (hi[0] - lo[0]).max(hi[1] - lo[1]);
    let scale = if side > 0.0 { side } else { 1.0 };
    let coords = raw
        .iter()
        .map(|p| [((p[0] - lo[0]) / scale).clamp(0.0, 1.0), ((p[1] - lo[1]) / scale).clamp(0.0, 1.0)])
        .collect();
    Ok(TspInstance::knn(coords, k.clamp(1, n.saturating_sub(1).max(1)))?.with_scale(scale))
}
