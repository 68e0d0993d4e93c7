//! Binary checkpoint: a fixed header followed by little-endian `f64`s in
//! parameter declaration order.
//!
//! ```text
//! magic "CDGN" | version u32 | kind u8 | layers u32 | width u32
//! | node features u32 | edge features u32 | time dim u32 | count u64 | data
//! ```

use super::gnn::{GnnDims, GnnParams, ProblemKind};
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"CDGN";
const VERSION: u32 = 1;

pub fn write_checkpoint(params: &GnnParams) -> Vec<u8> {
    let d = params.dims();
    let mut out = Vec::with_capacity(40 + 8 * params.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.push(match d.kind {
        ProblemKind::Tsp => 0,
        ProblemKind::Mis => 1,
    });
    for v in [d.layers, d.width, d.kind.node_features(), d.kind.edge_features(), d.time_dim] {
        out.extend_from_slice(&(v as u32).to_le_bytes());
    }
    out.extend_from_slice(&(params.len() as u64).to_le_bytes());
    for v in params.as_slice() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

fn bad(msg: impl Into<String>) -> Error {
    Error::UnsupportedFormat(format!("checkpoint: {}", msg.into()))
}

pub fn read_checkpoint(bytes: &[u8]) -> Result<GnnParams> {
    let mut pos = 0;
    let mut take = |n: usize| -> Result<&[u8]> {
        let s = bytes.get(pos..pos + n).ok_or_else(|| bad("truncated header"))?;
        pos += n;
        Ok(s)
    };
    if take(4)? != MAGIC {
        return Err(bad("bad magic"));
    }
    let u32_at = |s: &[u8]| u32::from_le_bytes(s.try_into().expect("4 bytes")) as usize;
    let version = u32_at(take(4)?);
    if version != VERSION as usize {
        return Err(bad(format!("unsupported version {version}")));
    }
    let kind = match take(1)?[0] {
        0 => ProblemKind::Tsp,
        1 => ProblemKind::Mis,
        k => return Err(bad(format!("unknown problem kind {k}"))),
    };
    let layers = u32_at(take(4)?);
    let width = u32_at(take(4)?);
    let node_in = u32_at(take(4)?);
    let edge_in = u32_at(take(4)?);
    let time_dim = u32_at(take(4)?);
    if node_in != kind.node_features() || edge_in != kind.edge_features() {
        return Err(bad(format!("feature dims ({node_in}, {edge_in}) do not match {kind:?}")));
    }
    let count = u64::from_le_bytes(take(8)?.try_into().expect("8 bytes")) as usize;
    let body = &bytes[pos..];
    if body.len() != 8 * count {
        return Err(bad(format!("expected {count} values, found {} bytes", body.len())));
    }
    let data = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    GnnParams::from_vec(GnnDims { kind, layers, width, time_dim }, data)
}
