//! Binary file formats.
//!
//! Both formats are little-endian with a four-byte magic and a `u16`
//! version.
//!
//! Descriptor files (`NOHV`):
//!
//! ```text
//! "NOHV" | u16 version=1 | u32 dimension | u64 count
//! count * ( u32 image_id | u64 global_index | dimension * f64 )
//! ```
//!
//! Index files (`NOHI`):
//!
//! ```text
//! "NOHI" | u16 version=1 | u16 flags | u32 dimension
//!        | u64 descriptor_count | u64 node_count
//! nodes in pre-order (node, left subtree, right subtree):
//!   internal: u8 0 | u8 identity_flag | n*f64 V
//!           | n*f64 S_R | n*f64 T_R | n*f64 S_L | n*f64 T_L
//!   leaf:     u8 1 | u32 cluster_id | u64 size
//!           | size * ( u64 global_index | u32 image_id | n*f64 coords )
//! ```
//!
//! Flag bit 0 marks the axis-aligned baseline; an identity reflection is
//! written as flag 1 with an all-zero `V`. Writing is deterministic, so
//! serializing the same tree twice is byte-identical.

use std::io::{self, Read, Write};
use std::path::Path;

use byteorder::{ReadBytesExt, WriteBytesExt, LE};
use nohis_core::linalg::Reflection;
use nohis_core::tree::{Mbr, Node, TreeStyle};
use nohis_core::{NohisTree, VectorSet};

pub const VECTOR_MAGIC: [u8; 4] = *b"NOHV";
pub const INDEX_MAGIC: [u8; 4] = *b"NOHI";
pub const FORMAT_VERSION: u16 = 1;
const FLAG_AXIS_ALIGNED: u16 = 1;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("bad magic (not a {expected} file)")]
    BadMagic { expected: &'static str },
    #[error("unsupported format version {0}")]
    UnsupportedVersion(u16),
    #[error("truncated stream")]
    Truncated,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("corrupt stream: {0}")]
    Corrupt(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl From<nohis_core::Error> for FormatError {
    fn from(e: nohis_core::Error) -> Self {
        FormatError::Corrupt(e.to_string())
    }
}

fn eof_as_truncated(e: io::Error) -> FormatError {
    if e.kind() == io::ErrorKind::UnexpectedEof {
        FormatError::Truncated
    } else {
        FormatError::Io(e)
    }
}

/// Guards an operation that pairs two dimensioned artifacts (an index and a
/// query file, say).
pub fn check_dimension(expected: usize, got: usize) -> Result<(), FormatError> {
    if expected == got {
        Ok(())
    } else {
        Err(FormatError::DimensionMismatch { expected, got })
    }
}

/// Contents of a descriptor file.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorFile {
    pub vectors: VectorSet,
    pub image_ids: Vec<u32>,
    pub global_indices: Vec<u64>,
}

impl VectorFile {
    pub fn dim(&self) -> usize {
        self.vectors.dim()
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

pub fn write_vectors<W: Write>(mut w: W, file: &VectorFile) -> Result<(), FormatError> {
    w.write_all(&VECTOR_MAGIC)?;
    w.write_u16::<LE>(FORMAT_VERSION)?;
    w.write_u32::<LE>(file.dim() as u32)?;
    w.write_u64::<LE>(file.len() as u64)?;
    for (i, row) in file.vectors.rows().enumerate() {
        w.write_u32::<LE>(file.image_ids[i])?;
        w.write_u64::<LE>(file.global_indices[i])?;
        for &c in row {
            w.write_f64::<LE>(c)?;
        }
    }
    Ok(())
}

pub fn write_vectors_to_path(path: &Path, file: &VectorFile) -> Result<(), FormatError> {
    let out = std::fs::File::create(path)?;
    let mut buf = io::BufWriter::new(out);
    write_vectors(&mut buf, file)?;
    buf.flush()?;
    Ok(())
}

pub fn read_vectors<R: Read>(mut r: R) -> Result<VectorFile, FormatError> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(eof_as_truncated)?;
    if magic != VECTOR_MAGIC {
        return Err(FormatError::BadMagic { expected: "NOHV" });
    }
    let version = r.read_u16::<LE>().map_err(eof_as_truncated)?;
    if version != FORMAT_VERSION {
        return Err(FormatError::UnsupportedVersion(version));
    }
    let dim = r.read_u32::<LE>().map_err(eof_as_truncated)? as usize;
    if dim == 0 {
        return Err(FormatError::Corrupt("zero dimension".into()));
    }
    let count = r.read_u64::<LE>().map_err(eof_as_truncated)? as usize;
    let mut vectors = VectorSet::with_capacity(dim, count.min(1 << 20));
    let mut image_ids = Vec::with_capacity(count.min(1 << 20));
    let mut global_indices = Vec::with_capacity(count.min(1 << 20));
    let mut row = vec![0.0f64; dim];
    for _ in 0..count {
        image_ids.push(r.read_u32::<LE>().map_err(eof_as_truncated)?);
        global_indices.push(r.read_u64::<LE>().map_err(eof_as_truncated)?);
        for c in &mut row {
            *c = r.read_f64::<LE>().map_err(eof_as_truncated)?;
            if !c.is_finite() {
                return Err(FormatError::Corrupt("non-finite component".into()));
            }
        }
        vectors.push(&row);
    }
    Ok(VectorFile { vectors, image_ids, global_indices })
}

pub fn read_vectors_from_path(path: &Path) -> Result<VectorFile, FormatError> {
    let f = std::fs::File::open(path)?;
    read_vectors(io::BufReader::new(f))
}

fn write_vec<W: Write>(w: &mut W, v: &[f64]) -> Result<(), FormatError> {
    for &c in v {
        w.write_f64::<LE>(c)?;
    }
    Ok(())
}

pub fn write_index<W: Write>(mut w: W, tree: &NohisTree) -> Result<(), FormatError> {
    let n = tree.dim();
    w.write_all(&INDEX_MAGIC)?;
    w.write_u16::<LE>(FORMAT_VERSION)?;
    let flags = match tree.style() {
        TreeStyle::Reflected => 0,
        TreeStyle::AxisAligned => FLAG_AXIS_ALIGNED,
    };
    w.write_u16::<LE>(flags)?;
    w.write_u32::<LE>(n as u32)?;
    w.write_u64::<LE>(tree.descriptor_count() as u64)?;
    w.write_u64::<LE>(tree.nodes().len() as u64)?;
    // The arena is already in pre-order.
    let zeros = vec![0.0f64; n];
    for node in tree.nodes() {
        match node {
            Node::Internal { reflection, left_mbr, right_mbr, .. } => {
                w.write_u8(0)?;
                match reflection {
                    Reflection::Identity => {
                        w.write_u8(1)?;
                        write_vec(&mut w, &zeros)?;
                    }
                    Reflection::Householder(v) => {
                        w.write_u8(0)?;
                        write_vec(&mut w, v)?;
                    }
                }
                write_vec(&mut w, &right_mbr.lo)?;
                write_vec(&mut w, &right_mbr.hi)?;
                write_vec(&mut w, &left_mbr.lo)?;
                write_vec(&mut w, &left_mbr.hi)?;
            }
            Node::Leaf { coords, global_indices, image_ids, cluster_id } => {
                w.write_u8(1)?;
                w.write_u32::<LE>(*cluster_id)?;
                w.write_u64::<LE>(coords.len() as u64)?;
                for (i, row) in coords.rows().enumerate() {
                    w.write_u64::<LE>(global_indices[i])?;
                    w.write_u32::<LE>(image_ids[i])?;
                    write_vec(&mut w, row)?;
                }
            }
        }
    }
    Ok(())
}

pub fn write_index_to_path(path: &Path, tree: &NohisTree) -> Result<(), FormatError> {
    let out = std::fs::File::create(path)?;
    let mut buf = io::BufWriter::new(out);
    write_index(&mut buf, tree)?;
    buf.flush()?;
    Ok(())
}

fn read_vec<R: Read>(r: &mut R, n: usize) -> Result<Vec<f64>, FormatError> {
    let mut v = vec![0.0f64; n];
    for c in &mut v {
        *c = r.read_f64::<LE>().map_err(eof_as_truncated)?;
        if !c.is_finite() {
            return Err(FormatError::Corrupt("non-finite component".into()));
        }
    }
    Ok(v)
}

pub fn read_index<R: Read>(mut r: R) -> Result<NohisTree, FormatError> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(eof_as_truncated)?;
    if magic != INDEX_MAGIC {
        return Err(FormatError::BadMagic { expected: "NOHI" });
    }
    let version = r.read_u16::<LE>().map_err(eof_as_truncated)?;
    if version != FORMAT_VERSION {
        return Err(FormatError::UnsupportedVersion(version));
    }
    let flags = r.read_u16::<LE>().map_err(eof_as_truncated)?;
    let style = if flags & FLAG_AXIS_ALIGNED != 0 {
        TreeStyle::AxisAligned
    } else {
        TreeStyle::Reflected
    };
    let dim = r.read_u32::<LE>().map_err(eof_as_truncated)? as usize;
    if dim == 0 {
        return Err(FormatError::Corrupt("zero dimension".into()));
    }
    let descriptor_count = r.read_u64::<LE>().map_err(eof_as_truncated)? as usize;
    let node_count = r.read_u64::<LE>().map_err(eof_as_truncated)? as usize;
    if node_count == 0 || node_count > 2 * descriptor_count.max(1) {
        return Err(FormatError::Corrupt(format!(
            "implausible node count {node_count} for {descriptor_count} descriptors"
        )));
    }

    let mut nodes: Vec<Node> = Vec::with_capacity(node_count.min(1 << 20));
    // Internal nodes still waiting for children; pre-order fills the left
    // child first, then (after that whole subtree) the right.
    let mut pending: Vec<usize> = Vec::new();
    let mut read_descriptors = 0usize;
    for _ in 0..node_count {
        let slot = nodes.len();
        if slot > 0 {
            let Some(&parent) = pending.last() else {
                return Err(FormatError::Corrupt("node outside any subtree".into()));
            };
            match &mut nodes[parent] {
                Node::Internal { left, right, .. } => {
                    if *left == usize::MAX {
                        *left = slot;
                    } else {
                        *right = slot;
                        pending.pop();
                    }
                }
                Node::Leaf { .. } => unreachable!("pending entries are internal"),
            }
        }
        let tag = r.read_u8().map_err(eof_as_truncated)?;
        match tag {
            0 => {
                let identity = r.read_u8().map_err(eof_as_truncated)?;
                let v = read_vec(&mut r, dim)?;
                let reflection = match identity {
                    1 => Reflection::Identity,
                    0 => Reflection::Householder(v),
                    other => {
                        return Err(FormatError::Corrupt(format!(
                            "invalid identity flag {other}"
                        )))
                    }
                };
                let right_lo = read_vec(&mut r, dim)?;
                let right_hi = read_vec(&mut r, dim)?;
                let left_lo = read_vec(&mut r, dim)?;
                let left_hi = read_vec(&mut r, dim)?;
                nodes.push(Node::Internal {
                    reflection,
                    left_mbr: Mbr { lo: left_lo, hi: left_hi },
                    right_mbr: Mbr { lo: right_lo, hi: right_hi },
                    left: usize::MAX,
                    right: usize::MAX,
                });
                pending.push(slot);
            }
            1 => {
                let cluster_id = r.read_u32::<LE>().map_err(eof_as_truncated)?;
                let size = r.read_u64::<LE>().map_err(eof_as_truncated)? as usize;
                if size == 0 || read_descriptors + size > descriptor_count {
                    return Err(FormatError::Corrupt(format!("invalid leaf size {size}")));
                }
                read_descriptors += size;
                let mut coords = VectorSet::with_capacity(dim, size);
                let mut global_indices = Vec::with_capacity(size);
                let mut image_ids = Vec::with_capacity(size);
                for _ in 0..size {
                    global_indices.push(r.read_u64::<LE>().map_err(eof_as_truncated)?);
                    image_ids.push(r.read_u32::<LE>().map_err(eof_as_truncated)?);
                    let row = read_vec(&mut r, dim)?;
                    coords.push(&row);
                }
                nodes.push(Node::Leaf { coords, global_indices, image_ids, cluster_id });
            }
            other => return Err(FormatError::Corrupt(format!("invalid node tag {other}"))),
        }
    }
    if !pending.is_empty() {
        return Err(FormatError::Corrupt("internal node missing children".into()));
    }
    if read_descriptors != descriptor_count {
        return Err(FormatError::Corrupt(format!(
            "descriptor count mismatch: header {descriptor_count}, leaves {read_descriptors}"
        )));
    }
    Ok(NohisTree::from_parts(style, dim, nodes)?)
}

pub fn read_index_from_path(path: &Path) -> Result<NohisTree, FormatError> {
    let f = std::fs::File::open(path)?;
    read_index(io::BufReader::new(f))
}
