//! `RIX1` index files.
//!
//! All integers little-endian:
//!
//! ```text
//! "RIX1" | version u32 | entry count u32 | feature_dim u32
//! per entry:
//!   id     u16 byte length + UTF-8
//!   class  u16 byte length + UTF-8
//!   multi-label bitset u32 (bit c = class c present)
//!   region count u32
//!   per region: class_id u8 | pixel_count u32 | feature_dim × f32
//!   global descriptor: feature_dim × f32
//!   per baseline (stats, color, lbp, glcm): present u8 | length u32 | length × f32
//! ```
//!
//! An absent baseline is written as flag 0 with length 0.

use std::collections::BTreeMap;

use crate::dataio::MultiLabelSet;
use crate::descriptor::DescriptorMatrix;
use crate::error::{Error, Result};
use crate::scheme::Scheme;

use super::{IndexEntry, IndexedRegions, RetrievalIndex, MAX_INDEX_CLASSES};

pub const RIX_MAGIC: &[u8; 4] = b"RIX1";
pub const RIX_VERSION: u32 = 1;

struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }

    fn u16(&mut self, v: u16) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    fn f32s(&mut self, vs: &[f32]) {
        for v in vs {
            self.buf.extend_from_slice(&v.to_le_bytes());
        }
    }

    fn string(&mut self, s: &str) -> Result<()> {
        let len = u16::try_from(s.len()).map_err(|_| {
            Error::argument(format!("string of {} bytes exceeds u16 length", s.len()))
        })?;
        self.u16(len);
        self.buf.extend_from_slice(s.as_bytes());
        Ok(())
    }
}

fn bitset(labels: &MultiLabelSet) -> Result<u32> {
    labels.iter().try_fold(0u32, |acc, &c| {
        if (c as usize) < MAX_INDEX_CLASSES {
            Ok(acc | (1 << c))
        } else {
            Err(Error::argument(format!(
                "class {c} does not fit the 32-bit label set"
            )))
        }
    })
}

pub fn encode_index(index: &RetrievalIndex) -> Result<Vec<u8>> {
    let mut w = Writer { buf: Vec::new() };
    w.buf.extend_from_slice(RIX_MAGIC);
    w.u32(RIX_VERSION);
    w.u32(index.entries().len() as u32);
    w.u32(index.feature_dim() as u32);
    for e in index.entries() {
        w.string(&e.image_id)?;
        w.string(&e.class_label)?;
        w.u32(bitset(&e.multi_labels)?);
        w.u32(e.recnn.len() as u32);
        for (i, row) in e.recnn.descriptors.rows().enumerate() {
            w.u8(e.recnn.class_ids[i]);
            w.u32(e.recnn.pixel_counts[i]);
            w.f32s(row);
        }
        w.f32s(&e.recnn_plus);
        for scheme in Scheme::BASELINES {
            match e.baselines.get(&scheme) {
                Some(v) => {
                    w.u8(1);
                    w.u32(v.len() as u32);
                    w.f32s(v);
                }
                None => {
                    w.u8(0);
                    w.u32(0);
                }
            }
        }
    }
    Ok(w.buf)
}

struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if self.data.len() - self.pos < n {
            return Err(Error::format(
                self.data.len(),
                format!("truncated while reading {what}"),
            ));
        }
        let s = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u8(&mut self, what: &str) -> Result<u8> {
        Ok(self.take(1, what)?[0])
    }

    fn u16(&mut self, what: &str) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2, what)?.try_into().unwrap()))
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn f32s(&mut self, n: usize, what: &str) -> Result<Vec<f32>> {
        let bytes = n
            .checked_mul(4)
            .ok_or_else(|| Error::format(self.pos, format!("{what} length overflows")))?;
        let at = self.pos;
        let values: Vec<f32> = self
            .take(bytes, what)?
            .chunks_exact(4)
            .map(|b| f32::from_le_bytes(b.try_into().unwrap()))
            .collect();
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::format(at, format!("non-finite value in {what}")));
        }
        Ok(values)
    }

    fn string(&mut self, what: &str) -> Result<String> {
        let len = self.u16(what)? as usize;
        let at = self.pos;
        let bytes = self.take(len, what)?;
        String::from_utf8(bytes.to_vec())
            .map_err(|_| Error::format(at, format!("{what} is not valid UTF-8")))
    }
}

pub fn decode_index(data: &[u8]) -> Result<RetrievalIndex> {
    if data.len() < 4 || &data[..4] != RIX_MAGIC {
        return Err(Error::format(0, "expected magic RIX1"));
    }
    let mut r = Reader { data, pos: 4 };
    let version = r.u32("version")?;
    if version != RIX_VERSION {
        return Err(Error::format(
            4,
            format!("unsupported index version {version}"),
        ));
    }
    let count = r.u32("entry count")? as usize;
    let dim = r.u32("feature dimension")? as usize;
    if dim == 0 {
        return Err(Error::format(12, "feature dimension must be positive"));
    }
    let mut entries = Vec::with_capacity(count.min(1 << 16));
    for _ in 0..count {
        let image_id = r.string("image id")?;
        let class_label = r.string("class label")?;
        let bits = r.u32("multi-label bitset")?;
        let multi_labels: MultiLabelSet = (0..32u8).filter(|c| bits & (1 << c) != 0).collect();
        let regions = r.u32("region count")? as usize;
        let mut recnn = IndexedRegions {
            class_ids: Vec::with_capacity(regions.min(1 << 16)),
            pixel_counts: Vec::with_capacity(regions.min(1 << 16)),
            descriptors: DescriptorMatrix::new(dim),
        };
        for _ in 0..regions {
            recnn.class_ids.push(r.u8("region class")?);
            recnn.pixel_counts.push(r.u32("region pixel count")?);
            recnn.descriptors.push(&r.f32s(dim, "region descriptor")?)?;
        }
        let recnn_plus = r.f32s(dim, "global descriptor")?;
        let mut baselines = BTreeMap::new();
        for scheme in Scheme::BASELINES {
            let flag_at = r.pos;
            let present = r.u8("baseline flag")?;
            let len = r.u32("baseline length")? as usize;
            match present {
                0 if len == 0 => {}
                0 => {
                    return Err(Error::format(
                        flag_at,
                        format!("absent {scheme} with nonzero length"),
                    ))
                }
                1 => {
                    baselines.insert(scheme, r.f32s(len, "baseline descriptor")?);
                }
                other => return Err(Error::format(flag_at, format!("bad presence flag {other}"))),
            }
        }
        entries.push(IndexEntry {
            image_id,
            class_label,
            multi_labels,
            recnn,
            recnn_plus,
            baselines,
        });
    }
    if r.pos != data.len() {
        return Err(Error::format(r.pos, "trailing bytes after last entry"));
    }
    RetrievalIndex::new(entries, None).map_err(|e| match e {
        Error::Argument(m) => Error::Data(m),
        other => other,
    })
}
