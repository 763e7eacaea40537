//! Binary node and signal files.
//!
//! Nodes: `"NFNB"`, `u8` version, `u8` D, `u64` J, then `D·J` `f64`, coordinate fastest.
//! Signals: `"NFSB"`, `u8` version, `u8` D, `D` × `u64` extents, then interleaved
//! `(re, im)` `f64`. Node-domain vectors are stored with `D = 1` and extent `J`.
//! All integers and floats are little-endian.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::CliError;

pub const NODE_MAGIC: &[u8; 4] = b"NFNB";
pub const SIGNAL_MAGIC: &[u8; 4] = b"NFSB";
pub const VERSION: u8 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct NodeFile {
    pub dims: usize,
    pub coords: Vec<f64>,
}

impl NodeFile {
    pub fn len(&self) -> usize {
        self.coords.len().checked_div(self.dims).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignalFile {
    pub shape: Vec<usize>,
    pub data: Vec<Complex64>,
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
    what: &'a str,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], CliError> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| CliError::Format(format!("{}: truncated file", self.what)))?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u8(&mut self) -> Result<u8, CliError> {
        Ok(self.take(1)?[0])
    }

    fn u64(&mut self) -> Result<u64, CliError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64s(&mut self, count: usize) -> Result<Vec<f64>, CliError> {
        let bytes = count
            .checked_mul(8)
            .ok_or_else(|| CliError::Format(format!("{}: size overflow", self.what)))?;
        Ok(self
            .take(bytes)?
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }

    fn header(&mut self, magic: &[u8; 4]) -> Result<usize, CliError> {
        if self.take(4)? != magic {
            return Err(CliError::Format(format!("{}: bad magic", self.what)));
        }
        let version = self.u8()?;
        if version != VERSION {
            return Err(CliError::Format(format!(
                "{}: unsupported version {version}",
                self.what
            )));
        }
        let dims = self.u8()? as usize;
        if dims == 0 {
            return Err(CliError::Format(format!("{}: zero dimensions", self.what)));
        }
        Ok(dims)
    }

    fn finish(&self) -> Result<(), CliError> {
        if self.pos != self.bytes.len() {
            return Err(CliError::Format(format!("{}: trailing bytes", self.what)));
        }
        Ok(())
    }
}

fn to_usize(v: u64, what: &str) -> Result<usize, CliError> {
    usize::try_from(v).map_err(|_| CliError::Format(format!("{what}: extent too large")))
}

pub fn decode_nodes(bytes: &[u8], what: &str) -> Result<NodeFile, CliError> {
    let mut r = Reader {
        bytes,
        pos: 0,
        what,
    };
    let dims = r.header(NODE_MAGIC)?;
    let j = to_usize(r.u64()?, what)?;
    let count = j
        .checked_mul(dims)
        .ok_or_else(|| CliError::Format(format!("{what}: size overflow")))?;
    let coords = r.f64s(count)?;
    r.finish()?;
    Ok(NodeFile { dims, coords })
}

pub fn encode_nodes(dims: usize, coords: &[f64]) -> Vec<u8> {
    let j = coords.len() / dims;
    let mut out = Vec::with_capacity(14 + 8 * coords.len());
    out.extend_from_slice(NODE_MAGIC);
    out.push(VERSION);
    out.push(dims as u8);
    out.extend_from_slice(&(j as u64).to_le_bytes());
    for c in coords {
        out.extend_from_slice(&c.to_le_bytes());
    }
    out
}

pub fn decode_signal(bytes: &[u8], what: &str) -> Result<SignalFile, CliError> {
    let mut r = Reader {
        bytes,
        pos: 0,
        what,
    };
    let dims = r.header(SIGNAL_MAGIC)?;
    let shape = (0..dims)
        .map(|_| r.u64().and_then(|v| to_usize(v, what)))
        .collect::<Result<Vec<_>, _>>()?;
    let len = shape
        .iter()
        .try_fold(1usize, |a, &b| a.checked_mul(b))
        .and_then(|l| l.checked_mul(2))
        .ok_or_else(|| CliError::Format(format!("{what}: size overflow")))?;
    let flat = r.f64s(len)?;
    r.finish()?;
    let data = flat
        .chunks_exact(2)
        .map(|c| Complex64::new(c[0], c[1]))
        .collect();
    Ok(SignalFile { shape, data })
}

pub fn encode_signal(shape: &[usize], data: &[Complex64]) -> Vec<u8> {
    let mut out = Vec::with_capacity(6 + 8 * shape.len() + 16 * data.len());
    out.extend_from_slice(SIGNAL_MAGIC);
    out.push(VERSION);
    out.push(shape.len() as u8);
    for &s in shape {
        out.extend_from_slice(&(s as u64).to_le_bytes());
    }
    for v in data {
        out.extend_from_slice(&v.re.to_le_bytes());
        out.extend_from_slice(&v.im.to_le_bytes());
    }
    out
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::Io(path.display().to_string(), e))
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let io = |e| CliError::Io(path.display().to_string(), e);
    let mut w = BufWriter::new(fs::File::create(path).map_err(io)?);
    w.write_all(bytes).map_err(io)?;
    w.flush().map_err(io)
}

pub fn read_nodes(path: &Path) -> Result<NodeFile, CliError> {
    decode_nodes(&read(path)?, &path.display().to_string())
}

pub fn write_nodes(path: &Path, dims: usize, coords: &[f64]) -> Result<(), CliError> {
    write(path, &encode_nodes(dims, coords))
}

pub fn read_signal(path: &Path) -> Result<SignalFile, CliError> {
    decode_signal(&read(path)?, &path.display().to_string())
}

pub fn write_signal(path: &Path, shape: &[usize], data: &[Complex64]) -> Result<(), CliError> {
    write(path, &encode_signal(shape, data))
}
