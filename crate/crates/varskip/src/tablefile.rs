//! Binary table cache: `VSKT`, format version, a JSON header with the schema,
//! then the row-major cells as little-endian `u32`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use varskip_core::data::{Column, Table};

use crate::{AppError, AppResult};

const MAGIC: &[u8; 4] = b"VSKT";
const VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Header {
    name: String,
    columns: Vec<Column>,
    n_rows: usize,
}

pub(crate) fn write_u32(w: &mut impl Write, v: u32) -> std::io::Result<()> {
    w.write_all(&v.to_le_bytes())
}

pub(crate) fn read_u32(r: &mut impl Read) -> std::io::Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

pub(crate) fn write_json_block(w: &mut impl Write, value: &impl Serialize, path: &Path) -> AppResult<()> {
    let bytes = serde_json::to_vec(value)?;
    w.write_all(&(bytes.len() as u64).to_le_bytes()).map_err(|e| AppError::io(path, e))?;
    w.write_all(&bytes).map_err(|e| AppError::io(path, e))
}

pub(crate) fn read_json_block<T: for<'de> Deserialize<'de>>(r: &mut impl Read, path: &Path) -> AppResult<T> {
    let mut len = [0u8; 8];
    r.read_exact(&mut len).map_err(|e| AppError::io(path, e))?;
    let len = u64::from_le_bytes(len) as usize;
    if len > 1 << 30 {
        return Err(AppError::format(path, "header too large"));
    }
    let mut buf = vec![0u8; len];
    r.read_exact(&mut buf).map_err(|e| AppError::io(path, e))?;
    serde_json::from_slice(&buf).map_err(|e| AppError::format(path, format!("bad header: {e}")))
}

pub(crate) fn check_magic(r: &mut impl Read, path: &Path, magic: &[u8; 4], version: u32) -> AppResult<()> {
    let mut m = [0u8; 4];
    r.read_exact(&mut m).map_err(|e| AppError::io(path, e))?;
    if &m != magic {
        return Err(AppError::format(path, "wrong file type"));
    }
    let v = read_u32(r).map_err(|e| AppError::io(path, e))?;
    if v != version {
        return Err(AppError::format(path, format!("unsupported format version {v}")));
    }
    Ok(())
}

pub fn write_table(path: &Path, table: &Table) -> AppResult<()> {
    let file = File::create(path).map_err(|e| AppError::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| AppError::io(path, e);
    w.write_all(MAGIC).map_err(io)?;
    write_u32(&mut w, VERSION).map_err(io)?;
    let header = Header { name: table.name().to_string(), columns: table.columns().to_vec(), n_rows: table.n_rows() };
    write_json_block(&mut w, &header, path)?;
    for &v in table.rows() {
        write_u32(&mut w, v).map_err(io)?;
    }
    w.flush().map_err(io)
}

pub fn read_table(path: &Path) -> AppResult<Table> {
    let file = File::open(path).map_err(|e| AppError::io(path, e))?;
    let mut r = BufReader::new(file);
    check_magic(&mut r, path, MAGIC, VERSION)?;
    let header: Header = read_json_block(&mut r, path)?;
    let cells = header.n_rows * header.columns.len();
    let mut raw = vec![0u8; cells * 4];
    r.read_exact(&mut raw).map_err(|e| AppError::io(path, e))?;
    let rows = raw.chunks_exact(4).map(|b| u32::from_le_bytes([b[0], b[1], b[2], b[3]])).collect();
    Ok(Table::new(header.name, header.columns, rows)?)
}
