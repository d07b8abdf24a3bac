//! Chunk files: a fixed big-endian header followed by, for every stripe, the
//! node's `α` symbols at `symbol_width` bytes each.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use metrrc::gf::{Elem, Field, FieldSpec};
use metrrc::layout::NodeId;
use metrrc::params::{CodeParams, Mode};

use crate::error::{CliError, Result};

pub const MAGIC: &[u8; 8] = b"METRRC01";
pub const HEADER_LEN: usize = 41;
pub const EXTENSION: &str = "chunk";

const FLAG_SYSTEMATIC: u8 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChunkHeader {
    pub mode: Mode,
    pub field: FieldSpec,
    pub params: CodeParams,
    /// Length of the original file in bytes.
    pub payload_len: u64,
    pub node: NodeId,
    pub systematic: bool,
}

fn u16_of(v: usize, what: &str) -> Result<u16, String> {
    u16::try_from(v).map_err(|_| format!("{what} = {v} does not fit in 16 bits"))
}

impl ChunkHeader {
    pub fn to_bytes(&self) -> Result<[u8; HEADER_LEN], String> {
        let mut out = [0u8; HEADER_LEN];
        let mut w = &mut out[..];
        let mut put = |bytes: &[u8]| {
            let (head, tail) = std::mem::take(&mut w).split_at_mut(bytes.len());
            head.copy_from_slice(bytes);
            w = tail;
        };
        put(MAGIC);
        put(&[match self.mode {
            Mode::Msrr => 0,
            Mode::Mbrr => 1,
        }]);
        let (kind, a, b) = match self.field {
            FieldSpec::Prime(q) => (0u8, q, 0u32),
            FieldSpec::Binary { m, poly } => (1u8, m, poly),
        };
        put(&[kind]);
        put(&a.to_be_bytes());
        put(&b.to_be_bytes());
        let p = &self.params;
        for (v, name) in [(p.n, "n"), (p.u, "u"), (p.k, "k"), (p.l, "l"), (p.dbar, "d̄")] {
            put(&u16_of(v, name)?.to_be_bytes());
        }
        put(&self.payload_len.to_be_bytes());
        put(&u16_of(self.node.rack, "rack")?.to_be_bytes());
        put(&u16_of(self.node.slot, "slot")?.to_be_bytes());
        put(&[if self.systematic { FLAG_SYSTEMATIC } else { 0 }]);
        Ok(out)
    }

    pub fn parse(bytes: &[u8]) -> Result<Self, String> {
        if bytes.len() < HEADER_LEN {
            return Err(format!("{} bytes, header needs {HEADER_LEN}", bytes.len()));
        }
        if &bytes[..8] != MAGIC {
            return Err("bad magic".into());
        }
        let u16_at = |i: usize| u16::from_be_bytes([bytes[i], bytes[i + 1]]) as usize;
        let u32_at = |i: usize| u32::from_be_bytes(bytes[i..i + 4].try_into().unwrap());
        let mode = match bytes[8] {
            0 => Mode::Msrr,
            1 => Mode::Mbrr,
            m => return Err(format!("unknown mode byte {m}")),
        };
        let field = match bytes[9] {
            0 => FieldSpec::Prime(u32_at(10)),
            1 => FieldSpec::Binary { m: u32_at(10), poly: u32_at(14) },
            k => return Err(format!("unknown field kind {k}")),
        };
        let params =
            CodeParams::new(u16_at(18), u16_at(20), u16_at(22), u16_at(24), u16_at(26)).map_err(|e| e.to_string())?;
        let payload_len = u64::from_be_bytes(bytes[28..36].try_into().unwrap());
        let node = NodeId::new(u16_at(36), u16_at(38));
        if node.rack >= params.nbar() || node.slot >= params.u {
            return Err(format!("node {node} outside the {}x{} grid", params.nbar(), params.u));
        }
        let flags = bytes[40];
        if flags & !FLAG_SYSTEMATIC != 0 {
            return Err(format!("unknown flags {flags:#04x}"));
        }
        Ok(ChunkHeader { mode, field, params, payload_len, node, systematic: flags & FLAG_SYSTEMATIC != 0 })
    }

    /// Same stripe set, any node.
    pub fn compatible(&self, other: &ChunkHeader) -> bool {
        ChunkHeader { node: other.node, ..*self } == *other
    }
}

pub fn chunk_name(node: NodeId) -> String {
    format!("node-{:03}-{:03}.{EXTENSION}", node.rack, node.slot)
}

pub fn chunk_path(dir: &Path, node: NodeId) -> PathBuf {
    dir.join(chunk_name(node))
}

/// Writes symbols big-endian at the field's width.
pub fn put_symbols(out: &mut Vec<u8>, field: &Field, symbols: &[Elem]) {
    let w = field.symbol_width();
    for s in symbols {
        out.extend_from_slice(&s.0.to_be_bytes()[4 - w..]);
    }
}

pub fn get_symbols(bytes: &[u8], field: &Field) -> Result<Vec<Elem>, String> {
    let w = field.symbol_width();
    if !bytes.len().is_multiple_of(w) {
        return Err(format!("body of {} bytes is not a whole number of {w}-byte symbols", bytes.len()));
    }
    bytes
        .chunks(w)
        .map(|c| {
            let mut buf = [0u8; 4];
            buf[4 - w..].copy_from_slice(c);
            let v = u32::from_be_bytes(buf);
            if v >= field.order() {
                Err(format!("symbol {v} outside {}", field.spec()))
            } else {
                Ok(Elem(v))
            }
        })
        .collect()
}

pub struct Chunk {
    pub header: ChunkHeader,
    pub symbols: Vec<Elem>,
}

pub fn write_chunk(dir: &Path, header: &ChunkHeader, field: &Field, symbols: &[Elem]) -> Result<PathBuf> {
    let path = chunk_path(dir, header.node);
    let mut bytes = header.to_bytes().map_err(|reason| CliError::Chunk { path: path.clone(), reason })?.to_vec();
    put_symbols(&mut bytes, field, symbols);
    fs::write(&path, bytes).map_err(CliError::io(&path))?;
    Ok(path)
}

pub fn read_chunk(path: &Path) -> Result<Chunk> {
    let bytes = fs::read(path).map_err(CliError::io(path))?;
    let bad = |reason: String| CliError::Chunk { path: path.to_path_buf(), reason };
    let header = ChunkHeader::parse(&bytes).map_err(bad)?;
    let field = Field::new(header.field).map_err(|e| bad(e.to_string()))?;
    let symbols = get_symbols(&bytes[HEADER_LEN..], &field).map_err(bad)?;
    Ok(Chunk { header, symbols })
}

/// Every chunk file in `dir`, keyed by node index; all headers must agree.
pub fn read_dir(dir: &Path) -> Result<BTreeMap<usize, Chunk>> {
    let mut out: BTreeMap<usize, Chunk> = BTreeMap::new();
    let mut first: Option<ChunkHeader> = None;
    let entries = fs::read_dir(dir).map_err(CliError::io(dir))?;
    let mut paths: Vec<PathBuf> = Vec::new();
    for entry in entries {
        let path = entry.map_err(CliError::io(dir))?.path();
        if path.extension().is_some_and(|e| e == EXTENSION) {
            paths.push(path);
        }
    }
    paths.sort();
    for path in paths {
        let chunk = read_chunk(&path)?;
        let h = chunk.header;
        if let Some(f) = &first {
            if !f.compatible(&h) {
                return Err(CliError::Param(format!(
                    "{} does not belong to the same stripe set as the other chunks",
                    path.display()
                )));
            }
        } else {
            first = Some(h);
        }
        let index = h.node.index(h.params.u);
        if out.insert(index, chunk).is_some() {
            return Err(CliError::Chunk { path, reason: format!("duplicate chunk for node {}", h.node) });
        }
    }
    Ok(out)
}
