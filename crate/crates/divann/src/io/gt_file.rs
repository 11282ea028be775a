//! The ground-truth file: a fixed-width binary record per query.
//!
//! Little-endian layout: header `u32` query count, `u16` k, `u16` k', then
//! per query k ids (u32) followed by k distances (f32). Queries with fewer
//! than k results pad the id tail with the sentinel `0xFFFFFFFF` and the
//! distance tail with +∞; a sentinel followed by a real id is malformed.

use std::path::Path;

use crate::error::{Error, Result};
use crate::oracle::{GroundTruth, GtEntry};

const SENTINEL: u32 = u32::MAX;

pub fn gt_to_bytes(gt: &GroundTruth) -> Result<Vec<u8>> {
    if gt.k == 0 || gt.k > u16::MAX as usize || gt.k_prime > u16::MAX as usize {
        return Err(Error::usage(format!(
            "k = {} and k' = {} must fit in 16 bits (k ≥ 1)",
            gt.k, gt.k_prime
        )));
    }
    let mut out = Vec::with_capacity(8 + gt.entries.len() * gt.k * 8);
    out.extend_from_slice(&(gt.entries.len() as u32).to_le_bytes());
    out.extend_from_slice(&(gt.k as u16).to_le_bytes());
    out.extend_from_slice(&(gt.k_prime as u16).to_le_bytes());
    for (qi, e) in gt.entries.iter().enumerate() {
        if e.ids.len() != e.dists.len() || e.ids.len() > gt.k {
            return Err(Error::usage(format!(
                "query {qi}: {} ids / {} distances for k = {}",
                e.ids.len(),
                e.dists.len(),
                gt.k
            )));
        }
        if e.ids.contains(&SENTINEL) {
            return Err(Error::usage(format!(
                "query {qi}: id 0xFFFFFFFF collides with the padding sentinel"
            )));
        }
        for &id in &e.ids {
            out.extend_from_slice(&id.to_le_bytes());
        }
        for _ in e.ids.len()..gt.k {
            out.extend_from_slice(&SENTINEL.to_le_bytes());
        }
        for &d in &e.dists {
            out.extend_from_slice(&d.to_le_bytes());
        }
        for _ in e.dists.len()..gt.k {
            out.extend_from_slice(&f32::INFINITY.to_le_bytes());
        }
    }
    Ok(out)
}

pub fn gt_from_bytes(bytes: &[u8]) -> Result<GroundTruth> {
    let need = |pos: usize, len: usize| -> Result<&[u8]> {
        if pos + len > bytes.len() {
            return Err(Error::format(
                bytes.len() as u64,
                "truncated ground-truth file",
            ));
        }
        Ok(&bytes[pos..pos + len])
    };
    let qcount = u32::from_le_bytes(need(0, 4)?.try_into().unwrap()) as usize;
    let k = u16::from_le_bytes(need(4, 2)?.try_into().unwrap()) as usize;
    let k_prime = u16::from_le_bytes(need(6, 2)?.try_into().unwrap()) as usize;
    if k == 0 {
        return Err(Error::format(4, "k must be at least 1"));
    }
    let mut pos = 8;
    let mut entries = Vec::with_capacity(qcount);
    for qi in 0..qcount {
        let mut ids = Vec::with_capacity(k);
        let mut padded = false;
        for i in 0..k {
            let at = pos;
            let id = u32::from_le_bytes(need(pos, 4)?.try_into().unwrap());
            pos += 4;
            if id == SENTINEL {
                padded = true;
            } else if padded {
                return Err(Error::format(
                    at as u64,
                    format!("query {qi}: id in slot {i} follows a padding sentinel"),
                ));
            } else {
                ids.push(id);
            }
        }
        let mut dists = Vec::with_capacity(ids.len());
        for i in 0..k {
            let d = f32::from_le_bytes(need(pos, 4)?.try_into().unwrap());
            pos += 4;
            if i < ids.len() {
                dists.push(d);
            }
        }
        entries.push(GtEntry { ids, dists });
    }
    if pos != bytes.len() {
        return Err(Error::format(
            pos as u64,
            format!("{} trailing bytes after ground truth", bytes.len() - pos),
        ));
    }
    Ok(GroundTruth { k, k_prime, entries })
}

pub fn save_gt(gt: &GroundTruth, path: &Path) -> Result<()> {
    std::fs::write(path, gt_to_bytes(gt)?)?;
    Ok(())
}

pub fn load_gt(path: &Path) -> Result<GroundTruth> {
    gt_from_bytes(&std::fs::read(path)?)
}
