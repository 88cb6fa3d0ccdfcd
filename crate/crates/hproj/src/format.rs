//! On-disk formats: MATF binary matrices, CSV matrices, reflector chains
//! and the `.hproj` projector container.
//!
//! MATF layout: `b"MATF"`, then `u32` LE version (1), rows, cols, then
//! `rows * cols` `f64` LE values in row-major order.
//!
//! `.hproj` layout: one line of JSON header terminated by `\n`, followed by
//! the `U` chain and the `V` chain as two MATF blocks.

use std::fs;
use std::path::Path;

use hproj_core::{Matrix, ProjectorParams, ReflectorChain};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MATF_MAGIC: &[u8; 4] = b"MATF";
pub const MATF_VERSION: u32 = 1;
pub const HPROJ_VERSION: u32 = 1;
const MATF_HEADER_LEN: usize = 16;

pub fn encode_matf(m: &Matrix) -> Vec<u8> {
    let mut out = Vec::with_capacity(MATF_HEADER_LEN + 8 * m.as_slice().len());
    out.extend_from_slice(MATF_MAGIC);
    out.extend_from_slice(&MATF_VERSION.to_le_bytes());
    out.extend_from_slice(&(m.rows() as u32).to_le_bytes());
    out.extend_from_slice(&(m.cols() as u32).to_le_bytes());
    for v in m.as_slice() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

fn read_u32(bytes: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(bytes[at..at + 4].try_into().expect("4 bytes"))
}

/// Decodes one MATF block from the front of `bytes`, returning the matrix
/// and the number of bytes consumed.
pub fn decode_matf_prefix(bytes: &[u8]) -> Result<(Matrix, usize)> {
    if bytes.len() < MATF_HEADER_LEN {
        return Err(Error::malformed("MATF header is truncated"));
    }
    if &bytes[..4] != MATF_MAGIC {
        return Err(Error::malformed("missing MATF magic"));
    }
    let version = read_u32(bytes, 4);
    if version != MATF_VERSION {
        return Err(Error::malformed(format!("unsupported MATF version {version}")));
    }
    let rows = read_u32(bytes, 8) as usize;
    let cols = read_u32(bytes, 12) as usize;
    let payload = rows
        .checked_mul(cols)
        .and_then(|n| n.checked_mul(8))
        .ok_or_else(|| Error::malformed("MATF dimensions overflow"))?;
    let end = MATF_HEADER_LEN + payload;
    if bytes.len() < end {
        return Err(Error::malformed(format!(
            "MATF payload is truncated: {rows}x{cols} needs {payload} bytes, found {}",
            bytes.len() - MATF_HEADER_LEN
        )));
    }
    let data = bytes[MATF_HEADER_LEN..end]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    Ok((Matrix::new(rows, cols, data)?, end))
}

/// Decodes a buffer holding exactly one MATF block.
pub fn decode_matf(bytes: &[u8]) -> Result<Matrix> {
    let (m, used) = decode_matf_prefix(bytes)?;
    if used != bytes.len() {
        return Err(Error::malformed(format!(
            "{} trailing bytes after MATF block",
            bytes.len() - used
        )));
    }
    Ok(m)
}

/// One row per line, comma separated, shortest round-trip decimals.
pub fn encode_csv(m: &Matrix) -> String {
    let mut out = String::new();
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|v| format!("{v:?}")).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn decode_csv(text: &str) -> Result<Matrix> {
    let mut data = Vec::new();
    let mut cols = None;
    let mut rows = 0;
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let values = line
            .split(',')
            .map(|f| {
                f.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::malformed(format!("line {}: {f:?}: {e}", n + 1)))
            })
            .collect::<Result<Vec<f64>>>()?;
        match cols {
            None => cols = Some(values.len()),
            Some(c) if c != values.len() => {
                return Err(Error::malformed(format!(
                    "line {} has {} fields, expected {c}",
                    n + 1,
                    values.len()
                )))
            }
            _ => {}
        }
        data.extend(values);
        rows += 1;
    }
    Ok(Matrix::new(rows, cols.unwrap_or(0), data)?)
}

fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

pub fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Reads a matrix, as CSV when the extension is `.csv` and MATF otherwise.
pub fn load_matrix(path: &Path) -> Result<Matrix> {
    let bytes = read_bytes(path)?;
    let parsed = if is_csv(path) {
        let text = String::from_utf8(bytes).map_err(|_| Error::malformed("CSV is not UTF-8"))?;
        decode_csv(&text)
    } else {
        decode_matf(&bytes)
    };
    parsed.map_err(|e| e.at(path))
}

pub fn save_matrix(path: &Path, m: &Matrix) -> Result<()> {
    if is_csv(path) {
        write_bytes(path, encode_csv(m).as_bytes())
    } else {
        write_bytes(path, &encode_matf(m))
    }
}

/// Chains are `m x d` matrices, one reflector per row; placeholders are
/// zero rows.
pub fn load_chain(path: &Path) -> Result<ReflectorChain> {
    let rows = load_matrix(path)?;
    ReflectorChain::from_rows(&rows).map_err(|e| Error::from(e).at(path))
}

pub fn save_chain(path: &Path, chain: &ReflectorChain) -> Result<()> {
    save_matrix(path, &chain.to_rows())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ProjectorHeader {
    version: u32,
    out_dim: usize,
    in_dim: usize,
    rank: usize,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    steps: u64,
}

pub fn encode_projector(p: &ProjectorParams) -> Vec<u8> {
    let header = ProjectorHeader {
        version: HPROJ_VERSION,
        out_dim: p.out_dim(),
        in_dim: p.in_dim(),
        rank: p.rank(),
        seed: p.seed(),
        steps: p.steps(),
    };
    let mut out = serde_json::to_vec(&header).expect("header serializes");
    out.push(b'\n');
    out.extend(encode_matf(&p.u_chain().to_rows()));
    out.extend(encode_matf(&p.v_chain().to_rows()));
    out
}

pub fn decode_projector(bytes: &[u8]) -> Result<ProjectorParams> {
    let newline = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| Error::malformed("projector header is not terminated"))?;
    let header: ProjectorHeader =
        serde_json::from_slice(&bytes[..newline]).map_err(|e| Error::malformed(format!("projector header: {e}")))?;
    if header.version != HPROJ_VERSION {
        return Err(Error::malformed(format!(
            "unsupported projector version {}",
            header.version
        )));
    }
    let rest = &bytes[newline + 1..];
    let (u_rows, used) = decode_matf_prefix(rest)?;
    let v_rows = decode_matf(&rest[used..])?;
    if u_rows.cols() != header.out_dim || v_rows.cols() != header.in_dim {
        return Err(Error::malformed(format!(
            "chain dimensions {}x{} do not match header {}x{}",
            u_rows.cols(),
            v_rows.cols(),
            header.out_dim,
            header.in_dim
        )));
    }
    let p = ProjectorParams::from_chains(
        header.out_dim,
        header.in_dim,
        header.rank,
        ReflectorChain::from_rows(&u_rows)?,
        ReflectorChain::from_rows(&v_rows)?,
    )?;
    Ok(p.with_seed(header.seed).with_steps(header.steps))
}

pub fn save_projector(path: &Path, p: &ProjectorParams) -> Result<()> {
    write_bytes(path, &encode_projector(p))
}

pub fn load_projector(path: &Path) -> Result<ProjectorParams> {
    decode_projector(&read_bytes(path)?).map_err(|e| e.at(path))
}

/// True for paths that name a projector container.
pub fn is_projector_path(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("hproj"))
}
