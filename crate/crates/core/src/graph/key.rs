//! Canonical byte encodings. Every vertex has exactly one encoding, decode
//! inverts encode, and distinct vertices of one graph never share bytes.
//! Nested variable-length parts carry 32-bit big-endian length prefixes so
//! the layout stays injective.

use super::{GraphError, LampState, StretchedVertex, Vertex, VertexKey};
use std::collections::BTreeMap;

const TAG_LATTICE: u8 = 0x01;
const TAG_TREE: u8 = 0x02;
const TAG_EXPLICIT: u8 = 0x03;
const TAG_GW: u8 = 0x04;
const TAG_STRETCH_ORIGINAL: u8 = 0x05;
const TAG_STRETCH_INTERIOR: u8 = 0x06;
const TAG_LAMP: u8 = 0x07;

pub(super) fn encode(v: &Vertex) -> Vec<u8> {
    let mut out = Vec::new();
    write_vertex(&mut out, v);
    out
}

fn write_vertex(out: &mut Vec<u8>, v: &Vertex) {
    match v {
        Vertex::Lattice(coords) => {
            assert!(coords.len() <= u8::MAX as usize, "lattice dimension capped at 255");
            out.push(TAG_LATTICE);
            out.push(coords.len() as u8);
            for &c in coords {
                // Flipping the sign bit makes byte order agree with integer
                // order coordinate-wise.
                out.extend_from_slice(&((c as u64) ^ (1u64 << 63)).to_be_bytes());
            }
        }
        Vertex::TreePath { b, path } => {
            out.push(TAG_TREE);
            out.push(*b);
            out.extend_from_slice(path);
        }
        Vertex::Explicit(idx) => {
            out.push(TAG_EXPLICIT);
            out.extend_from_slice(&idx.to_be_bytes());
        }
        Vertex::GwPath(path) => {
            out.push(TAG_GW);
            out.extend_from_slice(path);
        }
        Vertex::Stretched(sv) => match sv.as_ref() {
            StretchedVertex::Original(inner) => {
                out.push(TAG_STRETCH_ORIGINAL);
                write_vertex(out, inner);
            }
            StretchedVertex::PathInterior { edge, index } => {
                out.push(TAG_STRETCH_INTERIOR);
                write_prefixed(out, &encode(&edge.0));
                write_prefixed(out, &encode(&edge.1));
                out.extend_from_slice(&index.to_be_bytes());
            }
        },
        Vertex::Lamp(state) => {
            out.push(TAG_LAMP);
            write_prefixed(out, state.marker_key.as_bytes());
            out.extend_from_slice(&(state.lamps.len() as u32).to_be_bytes());
            for (site, &elem) in &state.lamps {
                write_prefixed(out, site.as_bytes());
                out.extend_from_slice(&elem.to_be_bytes());
            }
        }
    }
}

fn write_prefixed(out: &mut Vec<u8>, bytes: &[u8]) {
    out.extend_from_slice(&(bytes.len() as u32).to_be_bytes());
    out.extend_from_slice(bytes);
}

pub(super) fn decode(bytes: &[u8]) -> Result<Vertex, GraphError> {
    let mut cursor = Cursor { bytes, pos: 0 };
    let v = read_vertex(&mut cursor)?;
    if cursor.pos != bytes.len() {
        return Err(GraphError::MalformedKey(format!(
            "{} trailing bytes",
            bytes.len() - cursor.pos
        )));
    }
    Ok(v)
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], GraphError> {
        if self.pos + n > self.bytes.len() {
            return Err(GraphError::MalformedKey("truncated key".into()));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn take_u8(&mut self) -> Result<u8, GraphError> {
        Ok(self.take(1)?[0])
    }

    fn take_u16(&mut self) -> Result<u16, GraphError> {
        Ok(u16::from_be_bytes(self.take(2)?.try_into().expect("length checked")))
    }

    fn take_u32(&mut self) -> Result<u32, GraphError> {
        Ok(u32::from_be_bytes(self.take(4)?.try_into().expect("length checked")))
    }

    fn rest(&mut self) -> &'a [u8] {
        let s = &self.bytes[self.pos..];
        self.pos = self.bytes.len();
        s
    }

    fn take_prefixed(&mut self) -> Result<&'a [u8], GraphError> {
        let len = self.take_u32()? as usize;
        self.take(len)
    }
}

fn read_vertex(c: &mut Cursor) -> Result<Vertex, GraphError> {
    match c.take_u8()? {
        TAG_LATTICE => {
            let d = c.take_u8()? as usize;
            let mut coords = Vec::with_capacity(d);
            for _ in 0..d {
                let raw = u64::from_be_bytes(c.take(8)?.try_into().expect("length checked"));
                coords.push((raw ^ (1u64 << 63)) as i64);
            }
            Ok(Vertex::Lattice(coords))
        }
        TAG_TREE => {
            let b = c.take_u8()?;
            Ok(Vertex::TreePath { b, path: c.rest().to_vec() })
        }
        TAG_EXPLICIT => Ok(Vertex::Explicit(c.take_u32()?)),
        TAG_GW => Ok(Vertex::GwPath(c.rest().to_vec())),
        TAG_STRETCH_ORIGINAL => {
            let inner = read_vertex(c)?;
            Ok(Vertex::Stretched(Box::new(StretchedVertex::Original(inner))))
        }
        TAG_STRETCH_INTERIOR => {
            let a = decode(c.take_prefixed()?)?;
            let b = decode(c.take_prefixed()?)?;
            let index = c.take_u32()?;
            Ok(Vertex::Stretched(Box::new(StretchedVertex::PathInterior {
                edge: (a, b),
                index,
            })))
        }
        TAG_LAMP => {
            let marker = c.take_prefixed()?.to_vec();
            let n = c.take_u32()? as usize;
            let mut lamps = BTreeMap::new();
            let mut prev: Option<Vec<u8>> = None;
            for _ in 0..n {
                let site = c.take_prefixed()?.to_vec();
                if let Some(p) = &prev {
                    if *p >= site {
                        return Err(GraphError::MalformedKey(
                            "lamp sites not strictly ascending".into(),
                        ));
                    }
                }
                let elem = c.take_u16()?;
                if elem == 0 {
                    return Err(GraphError::MalformedKey("lamp stores identity".into()));
                }
                prev = Some(site.clone());
                lamps.insert(VertexKey(site), elem);
            }
            Ok(Vertex::Lamp(Box::new(LampState {
                marker_key: VertexKey(marker),
                lamps,
            })))
        }
        tag => Err(GraphError::MalformedKey(format!("unknown family tag {tag:#04x}"))),
    }
}
