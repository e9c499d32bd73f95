//! Binary snapshots of spinor fields.
//!
//! Little-endian layout: magic `NDGS`, format version `u32`, `N` as `u32`, then
//! `L, m, c, p, τ` as `f64`, then `4N³` complex values as `(re, im)` `f64`
//! pairs, component-major with x fastest.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::error::ParamError;
use crate::field::SpinorField;
use crate::grid::GridSpec;

pub const MAGIC: [u8; 4] = *b"NDGS";
pub const VERSION: u32 = 1;
pub const HEADER_BYTES: usize = 4 + 4 + 4 + 5 * 8;

#[derive(Debug, Error)]
pub enum FieldIoError {
    #[error("not a field file (magic {0:?})")]
    BadMagic([u8; 4]),
    #[error("unsupported format version {found} (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },
    #[error("file ends inside the {0}")]
    TruncatedPayload(&'static str),
    #[error("header describes an invalid grid: {0}")]
    BadHeader(#[from] ParamError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn read_or_truncated(r: &mut impl Read, buf: &mut [u8], part: &'static str) -> Result<(), FieldIoError> {
    r.read_exact(buf).map_err(|e| match e.kind() {
        io::ErrorKind::UnexpectedEof => FieldIoError::TruncatedPayload(part),
        _ => FieldIoError::Io(e),
    })
}

pub fn write_field(mut w: impl Write, u: &SpinorField) -> Result<(), FieldIoError> {
    let g = u.grid();
    let mut head = Vec::with_capacity(HEADER_BYTES);
    head.extend_from_slice(&MAGIC);
    head.extend_from_slice(&VERSION.to_le_bytes());
    head.extend_from_slice(&(g.n as u32).to_le_bytes());
    for v in [g.half_width, g.mass, g.c, g.p, g.tau] {
        head.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&head)?;
    let mut buf = Vec::with_capacity(16 * 4096);
    for chunk in u.data().chunks(4096) {
        buf.clear();
        for z in chunk {
            buf.extend_from_slice(&z.re.to_le_bytes());
            buf.extend_from_slice(&z.im.to_le_bytes());
        }
        w.write_all(&buf)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads only the header and returns the grid it describes.
pub fn read_header(mut r: impl Read) -> Result<GridSpec, FieldIoError> {
    let mut magic = [0u8; 4];
    read_or_truncated(&mut r, &mut magic, "header")?;
    if magic != MAGIC {
        return Err(FieldIoError::BadMagic(magic));
    }
    let mut word = [0u8; 4];
    read_or_truncated(&mut r, &mut word, "header")?;
    let version = u32::from_le_bytes(word);
    if version != VERSION {
        return Err(FieldIoError::VersionMismatch {
            found: version,
            expected: VERSION,
        });
    }
    read_or_truncated(&mut r, &mut word, "header")?;
    let n = u32::from_le_bytes(word) as usize;
    let mut vals = [0.0; 5];
    let mut dword = [0u8; 8];
    for v in &mut vals {
        read_or_truncated(&mut r, &mut dword, "header")?;
        *v = f64::from_le_bytes(dword);
    }
    let [l, m, c, p, tau] = vals;
    Ok(GridSpec::new(n, l, m, c, p, tau)?)
}

pub fn read_field(mut r: impl Read) -> Result<SpinorField, FieldIoError> {
    let grid = read_header(&mut r)?;
    let len = 4 * grid.nodes();
    let mut bytes = vec![0u8; 16 * len];
    read_or_truncated(&mut r, &mut bytes, "payload")?;
    let data = bytes
        .chunks_exact(16)
        .map(|b| {
            Complex64::new(
                f64::from_le_bytes(b[..8].try_into().expect("8 bytes")),
                f64::from_le_bytes(b[8..].try_into().expect("8 bytes")),
            )
        })
        .collect();
    Ok(SpinorField::from_data(grid, data)?)
}

pub fn save_field(u: &SpinorField, path: impl AsRef<Path>) -> Result<(), FieldIoError> {
    write_field(BufWriter::new(File::create(path)?), u)
}

pub fn load_field(path: impl AsRef<Path>) -> Result<SpinorField, FieldIoError> {
    read_field(BufReader::new(File::open(path)?))
}

pub fn load_header(path: impl AsRef<Path>) -> Result<GridSpec, FieldIoError> {
    read_header(BufReader::new(File::open(path)?))
}

/// Lower-case hex SHA-256 of a file's bytes.
pub fn sha256_file(path: impl AsRef<Path>) -> io::Result<String> {
    let mut hasher = Sha256::new();
    io::copy(&mut BufReader::new(File::open(path)?), &mut hasher)?;
    Ok(hasher.finalize().iter().map(|b| format!("{b:02x}")).collect())
}
