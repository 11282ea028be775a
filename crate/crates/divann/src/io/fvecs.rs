//! The fvecs vector container: per record a 4-byte little-endian dimension
//! followed by that many little-endian 32-bit floats, all records sharing
//! one dimension.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::dataset::VectorDataset;
use crate::error::{Error, Result};

/// Writes every point of the dataset as one fvecs record.
pub fn save_fvecs(ds: &VectorDataset, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    let dim = ds.dim() as u32;
    for i in 0..ds.n() {
        w.write_all(&dim.to_le_bytes())?;
        for &v in ds.point(i as u32) {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads an fvecs file into a dataset with all colors zero (colors live in a
/// separate file).
pub fn load_fvecs(path: &Path) -> Result<VectorDataset> {
    let mut r = BufReader::new(File::open(path)?);
    let mut offset: u64 = 0;
    let mut dim: Option<usize> = None;
    let mut data: Vec<f32> = Vec::new();
    let mut record = 0usize;
    loop {
        let mut dim_buf = [0u8; 4];
        match read_exact_or_eof(&mut r, &mut dim_buf) {
            ReadOutcome::Eof => break,
            ReadOutcome::Partial(got) => {
                return Err(Error::format(
                    offset + got as u64,
                    format!("record {record}: truncated dimension field"),
                ));
            }
            ReadOutcome::Full => {}
        }
        let d = u32::from_le_bytes(dim_buf) as usize;
        if d == 0 {
            return Err(Error::format(offset, format!("record {record}: zero dimension")));
        }
        match dim {
            None => dim = Some(d),
            Some(expect) if expect != d => {
                return Err(Error::format(
                    offset,
                    format!("record {record}: dimension {d} differs from first record's {expect}"),
                ));
            }
            Some(_) => {}
        }
        offset += 4;
        let mut buf = vec![0u8; d * 4];
        match read_exact_or_eof(&mut r, &mut buf) {
            ReadOutcome::Full => {}
            ReadOutcome::Eof | ReadOutcome::Partial(_) => {
                return Err(Error::format(
                    offset,
                    format!("record {record}: truncated coordinate block"),
                ));
            }
        }
        for chunk in buf.chunks_exact(4) {
            data.push(f32::from_le_bytes(chunk.try_into().unwrap()));
        }
        offset += (d * 4) as u64;
        record += 1;
    }
    let dim = dim.ok_or_else(|| Error::format(0, "file holds no records"))?;
    let n = data.len() / dim;
    VectorDataset::new(dim, data, vec![0; n])
}

enum ReadOutcome {
    Full,
    Eof,
    Partial(usize),
}

/// Fills `buf` completely, or reports a clean EOF before the first byte, or
/// how many bytes arrived before the stream ended mid-field.
fn read_exact_or_eof(r: &mut impl Read, buf: &mut [u8]) -> ReadOutcome {
    let mut got = 0;
    while got < buf.len() {
        match r.read(&mut buf[got..]) {
            Ok(0) => {
                return if got == 0 {
                    ReadOutcome::Eof
                } else {
                    ReadOutcome::Partial(got)
                };
            }
            Ok(m) => got += m,
            Err(ref e) if e.kind() == std::io::ErrorKind::Interrupted => continue,
            Err(_) => return ReadOutcome::Partial(got),
        }
    }
    ReadOutcome::Full
}
