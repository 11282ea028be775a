//! The on-disk index snapshot.
//!
//! Little-endian layout, version 1:
//!
//! ```text
//! magic       4 bytes  "DVRS"
//! version     u32      1
//! builder     u8       0 slow-colorful | 1 slow-diverse | 2 fast
//! rho         u8       0 none | 1 binary | 2 euclidean
//! alpha       f64
//! k           u32
//! k_prime     u32
//! degree_cap  u32      0 = none
//! build_beam  u32      0 = none
//! m           u32      0 = none
//! start       u32      0xFFFFFFFF = none
//! n           u32
//! dim         u32
//! offsets     (n+1) × u64   offsets[0] = 0, strictly nondecreasing
//! neighbors   offsets[n] × u32
//! colors      n × u32
//! ```

use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{BuilderKind, DiverseGraph, GraphMeta};
use crate::metric::RhoMode;

const MAGIC: &[u8; 4] = b"DVRS";
const VERSION: u32 = 1;
const NO_START: u32 = u32::MAX;
/// Fixed-size header: magic, version, builder, rho, alpha, and eight u32
/// fields (k, k', degree cap, build beam, m, start, n, dim).
const HEADER_LEN: usize = 50;

/// Serializes a graph, its colors, and the dataset dimension it was built
/// over.
pub fn index_to_bytes(g: &DiverseGraph, colors: &[u32], dim: usize) -> Result<Vec<u8>> {
    if colors.len() != g.n() {
        return Err(Error::usage(format!(
            "got {} colors for a {}-node graph",
            colors.len(),
            g.n()
        )));
    }
    let meta = g.meta();
    let total: usize = g.total_edges();
    let mut out = Vec::with_capacity(HEADER_LEN + (g.n() + 1) * 8 + total * 4 + g.n() * 4);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.push(match meta.builder {
        BuilderKind::SlowColorful => 0,
        BuilderKind::SlowDiverse => 1,
        BuilderKind::Fast => 2,
    });
    out.push(match meta.rho_mode {
        None => 0,
        Some(RhoMode::BinaryColor) => 1,
        Some(RhoMode::Euclidean) => 2,
    });
    out.extend_from_slice(&meta.alpha.to_le_bytes());
    out.extend_from_slice(&(meta.k as u32).to_le_bytes());
    out.extend_from_slice(&(meta.k_prime as u32).to_le_bytes());
    out.extend_from_slice(&(meta.degree_cap.unwrap_or(0) as u32).to_le_bytes());
    out.extend_from_slice(&(meta.build_beam.unwrap_or(0) as u32).to_le_bytes());
    out.extend_from_slice(&(meta.m.unwrap_or(0) as u32).to_le_bytes());
    out.extend_from_slice(&meta.start_node.unwrap_or(NO_START).to_le_bytes());
    out.extend_from_slice(&(g.n() as u32).to_le_bytes());
    out.extend_from_slice(&(dim as u32).to_le_bytes());

    let mut offset = 0u64;
    out.extend_from_slice(&offset.to_le_bytes());
    for nbrs in g.adjacency() {
        offset += nbrs.len() as u64;
        out.extend_from_slice(&offset.to_le_bytes());
    }
    for nbrs in g.adjacency() {
        for &v in nbrs {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    for &c in colors {
        out.extend_from_slice(&c.to_le_bytes());
    }
    Ok(out)
}

/// Parses a snapshot back into the graph, its colors, and the stored
/// dataset dimension.
pub fn index_from_bytes(bytes: &[u8]) -> Result<(DiverseGraph, Vec<u32>, usize)> {
    let mut r = Reader { bytes, pos: 0 };
    let magic = r.take(4, "magic")?;
    if magic != MAGIC {
        return Err(Error::format(0, format!("bad magic {magic:?}, expected \"DVRS\"")));
    }
    let version = r.u32("version")?;
    if version != VERSION {
        return Err(Error::format(4, format!("unsupported version {version}")));
    }
    let builder_pos = r.pos;
    let builder = match r.u8("builder tag")? {
        0 => BuilderKind::SlowColorful,
        1 => BuilderKind::SlowDiverse,
        2 => BuilderKind::Fast,
        b => return Err(Error::format(builder_pos as u64, format!("unknown builder tag {b}"))),
    };
    let rho_pos = r.pos;
    let rho_mode = match r.u8("rho tag")? {
        0 => None,
        1 => Some(RhoMode::BinaryColor),
        2 => Some(RhoMode::Euclidean),
        b => return Err(Error::format(rho_pos as u64, format!("unknown rho tag {b}"))),
    };
    let alpha = f64::from_le_bytes(r.take(8, "alpha")?.try_into().unwrap());
    let k = r.u32("k")? as usize;
    let k_prime = r.u32("k_prime")? as usize;
    let degree_cap = r.u32("degree cap")?;
    let build_beam = r.u32("build beam")?;
    let m = r.u32("m")?;
    let start = r.u32("start node")?;
    let n = r.u32("node count")? as usize;
    let dim = r.u32("dimension")? as usize;

    let mut offsets = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let pos = r.pos;
        let o = u64::from_le_bytes(r.take(8, "offset")?.try_into().unwrap());
        if let Some(&prev) = offsets.last() {
            if o < prev {
                return Err(Error::format(
                    pos as u64,
                    format!("offset {i} decreases: {o} after {prev}"),
                ));
            }
        } else if o != 0 {
            return Err(Error::format(pos as u64, format!("first offset must be 0, got {o}")));
        }
        offsets.push(o);
    }
    let total = offsets[n] as usize;
    let mut neighbors = Vec::with_capacity(total);
    for _ in 0..total {
        neighbors.push(r.u32("neighbor")?);
    }
    let mut colors = Vec::with_capacity(n);
    for _ in 0..n {
        colors.push(r.u32("color")?);
    }
    if r.pos != bytes.len() {
        return Err(Error::format(
            r.pos as u64,
            format!("{} trailing bytes after snapshot", bytes.len() - r.pos),
        ));
    }

    let adj: Vec<Vec<u32>> = (0..n)
        .map(|i| neighbors[offsets[i] as usize..offsets[i + 1] as usize].to_vec())
        .collect();
    let meta = GraphMeta {
        builder,
        alpha,
        k,
        k_prime,
        rho_mode,
        degree_cap: nonzero(degree_cap),
        build_beam: nonzero(build_beam),
        m: nonzero(m),
        start_node: if start == NO_START { None } else { Some(start) },
    };
    let neighbors_start = HEADER_LEN as u64 + (n as u64 + 1) * 8;
    let g = DiverseGraph::new(adj, meta)
        .map_err(|e| Error::format(neighbors_start, format!("invalid adjacency: {e}")))?;
    Ok((g, colors, dim))
}

fn nonzero(v: u32) -> Option<usize> {
    if v == 0 {
        None
    } else {
        Some(v as usize)
    }
}

pub fn save_index(g: &DiverseGraph, colors: &[u32], dim: usize, path: &Path) -> Result<()> {
    let bytes = index_to_bytes(g, colors, dim)?;
    std::fs::write(path, bytes)?;
    Ok(())
}

pub fn load_index(path: &Path) -> Result<(DiverseGraph, Vec<u32>, usize)> {
    let bytes = std::fs::read(path)?;
    index_from_bytes(&bytes)
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, len: usize, what: &str) -> Result<&'a [u8]> {
        if self.pos + len > self.bytes.len() {
            return Err(Error::format(
                self.bytes.len() as u64,
                format!("truncated while reading {what}"),
            ));
        }
        let s = &self.bytes[self.pos..self.pos + len];
        self.pos += len;
        Ok(s)
    }

    fn u8(&mut self, what: &str) -> Result<u8> {
        Ok(self.take(1, what)?[0])
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }
}
