//! Versioned binary snapshot container.
//!
//! All integers are little-endian.
//!
//! ```text
//! magic     4 bytes  "CKG1"
//! version   u16      currently 1
//! section*  4 times, in this order, each framed as `u64 byte_len` + payload:
//!   strings        u32 count, then per string: u32 len, UTF-8 bytes
//!   nodes          u64 count, then per node (id = position):
//!                    u32 label_count, u32 string_idx * label_count, props
//!   relationships  u64 count, then per relationship (id = position):
//!                    u32 type string_idx, u64 src, u64 dst, props
//!   indexed keys   u32 count, u32 string_idx * count
//!
//! props := u32 count, then per entry: u32 key string_idx, u8 tag, payload
//!   tag 0 text       u32 string_idx
//!   tag 1 int        i64
//!   tag 2 real       u64 (IEEE-754 bits)
//!   tag 3 bool       u8 (0 or 1)
//!   tag 4 text list  u32 len, u32 string_idx * len
//! ```
//!
//! Strings are interned in first-use order while walking nodes by id (labels
//! and property keys in sorted order), then relationships, then indexed keys,
//! so re-saving a loaded snapshot reproduces the same bytes.

use std::collections::HashMap;
use std::fs;
use std::io;
use std::path::Path;

use thiserror::Error;

use crate::graph::{Graph, NodeId, Properties};
use crate::value::PropertyValue;

pub const MAGIC: &[u8; 4] = b"CKG1";
pub const FORMAT_VERSION: u16 = 1;

const TAG_TEXT: u8 = 0;
const TAG_INT: u8 = 1;
const TAG_REAL: u8 = 2;
const TAG_BOOL: u8 = 3;
const TAG_TEXT_LIST: u8 = 4;

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("snapshot i/o failed: {0}")]
    IoFailure(#[from] io::Error),
    #[error("not a supported snapshot: {0}")]
    FormatVersionMismatch(String),
    #[error("corrupt snapshot at byte {offset}: {reason}")]
    CorruptSnapshot { offset: usize, reason: String },
}

/// Writes `graph` to `path`, returning the number of bytes written.
pub fn save(graph: &Graph, path: impl AsRef<Path>) -> Result<u64, SnapshotError> {
    let bytes = encode(graph);
    fs::write(path, &bytes)?;
    Ok(bytes.len() as u64)
}

pub fn load(path: impl AsRef<Path>) -> Result<Graph, SnapshotError> {
    let bytes = fs::read(path)?;
    decode(&bytes)
}

#[derive(Default)]
struct Interner {
    strings: Vec<String>,
    lookup: HashMap<String, u32>,
}

impl Interner {
    fn intern(&mut self, s: &str) -> u32 {
        if let Some(&idx) = self.lookup.get(s) {
            return idx;
        }
        let idx = self.strings.len() as u32;
        self.strings.push(s.to_owned());
        self.lookup.insert(s.to_owned(), idx);
        idx
    }
}

fn put_u32(buf: &mut Vec<u8>, v: u32) {
    buf.extend_from_slice(&v.to_le_bytes());
}

fn put_u64(buf: &mut Vec<u8>, v: u64) {
    buf.extend_from_slice(&v.to_le_bytes());
}

fn encode_props(buf: &mut Vec<u8>, strings: &mut Interner, props: &Properties) {
    put_u32(buf, props.len() as u32);
    for (key, value) in props {
        put_u32(buf, strings.intern(key));
        match value {
            PropertyValue::Text(s) => {
                buf.push(TAG_TEXT);
                put_u32(buf, strings.intern(s));
            }
            PropertyValue::Int(i) => {
                buf.push(TAG_INT);
                buf.extend_from_slice(&i.to_le_bytes());
            }
            PropertyValue::Real(r) => {
                buf.push(TAG_REAL);
                put_u64(buf, r.to_bits());
            }
            PropertyValue::Bool(b) => {
                buf.push(TAG_BOOL);
                buf.push(u8::from(*b));
            }
            PropertyValue::TextList(items) => {
                buf.push(TAG_TEXT_LIST);
                put_u32(buf, items.len() as u32);
                for item in items {
                    put_u32(buf, strings.intern(item));
                }
            }
        }
    }
}

pub fn encode(graph: &Graph) -> Vec<u8> {
    let mut strings = Interner::default();

    let mut nodes = Vec::new();
    put_u64(&mut nodes, graph.node_count() as u64);
    for node in graph.nodes() {
        put_u32(&mut nodes, node.labels.len() as u32);
        for label in &node.labels {
            put_u32(&mut nodes, strings.intern(label));
        }
        encode_props(&mut nodes, &mut strings, &node.properties);
    }

    let mut rels = Vec::new();
    put_u64(&mut rels, graph.rel_count() as u64);
    for rel in graph.relationships() {
        put_u32(&mut rels, strings.intern(&rel.rel_type));
        put_u64(&mut rels, rel.src.0);
        put_u64(&mut rels, rel.dst.0);
        encode_props(&mut rels, &mut strings, &rel.properties);
    }

    let mut keys = Vec::new();
    put_u32(&mut keys, graph.indexed_keys().len() as u32);
    for key in graph.indexed_keys() {
        put_u32(&mut keys, strings.intern(key));
    }

    let mut table = Vec::new();
    put_u32(&mut table, strings.strings.len() as u32);
    for s in &strings.strings {
        put_u32(&mut table, s.len() as u32);
        table.extend_from_slice(s.as_bytes());
    }

    let mut out = Vec::with_capacity(6 + 32 + table.len() + nodes.len() + rels.len() + keys.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    for section in [table, nodes, rels, keys] {
        put_u64(&mut out, section.len() as u64);
        out.extend_from_slice(&section);
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn corrupt(&self, reason: impl Into<String>) -> SnapshotError {
        SnapshotError::CorruptSnapshot {
            offset: self.pos,
            reason: reason.into(),
        }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], SnapshotError> {
        if self.bytes.len() - self.pos < n {
            return Err(self.corrupt(format!("unexpected end of data, wanted {n} bytes")));
        }
        let slice = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(slice)
    }

    fn u8(&mut self) -> Result<u8, SnapshotError> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16, SnapshotError> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32, SnapshotError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, SnapshotError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    /// Reads one section frame and returns a reader over its payload, with
    /// offsets still relative to the whole file.
    fn section(&mut self) -> Result<Reader<'a>, SnapshotError> {
        let len = self.u64()?;
        let start = self.pos;
        if len > (self.bytes.len() - start) as u64 {
            return Err(self.corrupt(format!("section length {len} exceeds file")));
        }
        self.pos += len as usize;
        Ok(Reader {
            bytes: &self.bytes[..start + len as usize],
            pos: start,
        })
    }

    fn finish(&self) -> Result<(), SnapshotError> {
        if self.pos != self.bytes.len() {
            return Err(self.corrupt("trailing bytes"));
        }
        Ok(())
    }

    fn string<'s>(&mut self, table: &'s [String]) -> Result<&'s str, SnapshotError> {
        let at = self.pos;
        let idx = self.u32()? as usize;
        table.get(idx).map(String::as_str).ok_or(SnapshotError::CorruptSnapshot {
            offset: at,
            reason: format!("string index {idx} out of range"),
        })
    }

    fn props(&mut self, table: &[String]) -> Result<Properties, SnapshotError> {
        let count = self.u32()?;
        let mut props = Properties::new();
        for _ in 0..count {
            let key = self.string(table)?.to_owned();
            let at = self.pos;
            let value = match self.u8()? {
                TAG_TEXT => PropertyValue::Text(self.string(table)?.to_owned()),
                TAG_INT => PropertyValue::Int(self.u64()? as i64),
                TAG_REAL => PropertyValue::Real(f64::from_bits(self.u64()?)),
                TAG_BOOL => match self.u8()? {
                    0 => PropertyValue::Bool(false),
                    1 => PropertyValue::Bool(true),
                    b => return Err(self.corrupt(format!("invalid bool byte {b}"))),
                },
                TAG_TEXT_LIST => {
                    let len = self.u32()?;
                    let mut items = Vec::new();
                    for _ in 0..len {
                        items.push(self.string(table)?.to_owned());
                    }
                    PropertyValue::TextList(items)
                }
                tag => {
                    return Err(SnapshotError::CorruptSnapshot {
                        offset: at,
                        reason: format!("unknown value tag {tag}"),
                    })
                }
            };
            if props.insert(key, value).is_some() {
                return Err(self.corrupt("duplicate property key"));
            }
        }
        Ok(props)
    }
}

pub fn decode(bytes: &[u8]) -> Result<Graph, SnapshotError> {
    if bytes.len() < 6 || &bytes[..4] != MAGIC {
        return Err(SnapshotError::FormatVersionMismatch(
            "missing CKG1 magic bytes".into(),
        ));
    }
    let mut reader = Reader { bytes, pos: 4 };
    let version = reader.u16()?;
    if version != FORMAT_VERSION {
        return Err(SnapshotError::FormatVersionMismatch(format!(
            "format version {version}, expected {FORMAT_VERSION}"
        )));
    }

    let mut section = reader.section()?;
    let count = section.u32()?;
    let mut table = Vec::new();
    for _ in 0..count {
        let len = section.u32()? as usize;
        let at = section.pos;
        let raw = section.take(len)?;
        let s = std::str::from_utf8(raw).map_err(|e| SnapshotError::CorruptSnapshot {
            offset: at + e.valid_up_to(),
            reason: "invalid UTF-8 in string table".into(),
        })?;
        table.push(s.to_owned());
    }
    section.finish()?;

    let mut nodes_section = reader.section()?;
    let mut rels_section = reader.section()?;
    let mut keys_section = reader.section()?;
    reader.finish()?;

    let key_count = keys_section.u32()?;
    let mut keys = Vec::new();
    for _ in 0..key_count {
        keys.push(keys_section.string(&table)?.to_owned());
    }
    keys_section.finish()?;
    let mut graph = Graph::with_indexed_keys(keys);

    let node_count = nodes_section.u64()?;
    for _ in 0..node_count {
        let at = nodes_section.pos;
        let label_count = nodes_section.u32()?;
        let mut labels = Vec::new();
        for _ in 0..label_count {
            labels.push(nodes_section.string(&table)?.to_owned());
        }
        let props = nodes_section.props(&table)?;
        graph
            .add_node(labels, props)
            .map_err(|e| SnapshotError::CorruptSnapshot {
                offset: at,
                reason: e.to_string(),
            })?;
    }
    nodes_section.finish()?;

    let rel_count = rels_section.u64()?;
    for _ in 0..rel_count {
        let at = rels_section.pos;
        let rel_type = rels_section.string(&table)?.to_owned();
        let src = NodeId(rels_section.u64()?);
        let dst = NodeId(rels_section.u64()?);
        let props = rels_section.props(&table)?;
        graph
            .add_relationship(src, dst, rel_type, props)
            .map_err(|e| SnapshotError::CorruptSnapshot {
                offset: at,
                reason: e.to_string(),
            })?;
    }
    rels_section.finish()?;

    Ok(graph)
}
