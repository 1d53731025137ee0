//! `RFM1` dense feature tensors.
//!
//! Layout: the magic `RFM1`, then height, width and channels as u32
//! little-endian, then `height * width * channels` f32 little-endian values,
//! row-major with the channel index varying fastest.

use crate::error::{Error, Result};

pub const FMAP_MAGIC: &[u8; 4] = b"RFM1";
const HEADER_LEN: usize = 16;

/// An H×W×C real-valued tensor stored channel-fastest, so the C values of a
/// pixel are contiguous.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMap {
    height: usize,
    width: usize,
    channels: usize,
    values: Vec<f32>,
}

impl FeatureMap {
    pub fn new(height: usize, width: usize, channels: usize, values: Vec<f32>) -> Result<Self> {
        if height == 0 || width == 0 || channels == 0 {
            return Err(Error::argument(format!(
                "feature map dimensions must be positive, got {height}x{width}x{channels}"
            )));
        }
        if values.len() != height * width * channels {
            return Err(Error::argument(format!(
                "expected {} values for {height}x{width}x{channels}, got {}",
                height * width * channels,
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Data(format!(
                "non-finite feature value at index {i}"
            )));
        }
        Ok(FeatureMap {
            height,
            width,
            channels,
            values,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    /// The C-dim descriptor at `(row, col)`.
    pub fn pixel(&self, row: usize, col: usize) -> &[f32] {
        let start = (row * self.width + col) * self.channels;
        &self.values[start..start + self.channels]
    }

    pub fn into_values(self) -> Vec<f32> {
        self.values
    }

    pub(crate) fn from_parts_unchecked(
        height: usize,
        width: usize,
        channels: usize,
        values: Vec<f32>,
    ) -> Self {
        debug_assert_eq!(values.len(), height * width * channels);
        FeatureMap {
            height,
            width,
            channels,
            values,
        }
    }
}

fn read_u32(data: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(data[at..at + 4].try_into().unwrap())
}

pub fn read_fmap(data: &[u8]) -> Result<FeatureMap> {
    if data.len() < 4 || &data[..4] != FMAP_MAGIC {
        return Err(Error::format(0, "expected magic RFM1"));
    }
    if data.len() < HEADER_LEN {
        return Err(Error::format(data.len(), "truncated header"));
    }
    let height = read_u32(data, 4) as usize;
    let width = read_u32(data, 8) as usize;
    let channels = read_u32(data, 12) as usize;
    let count = height
        .checked_mul(width)
        .and_then(|n| n.checked_mul(channels))
        .ok_or_else(|| Error::format(4, "dimensions overflow"))?;
    if count == 0 {
        return Err(Error::format(
            4,
            format!("degenerate shape {height}x{width}x{channels}"),
        ));
    }
    let expected = count
        .checked_mul(4)
        .and_then(|n| n.checked_add(HEADER_LEN))
        .ok_or_else(|| Error::format(4, "dimensions overflow"))?;
    if data.len() != expected {
        return Err(Error::format(
            data.len().min(expected),
            format!("header implies {expected} bytes, stream has {}", data.len()),
        ));
    }
    let values = data[HEADER_LEN..]
        .chunks_exact(4)
        .map(|b| f32::from_le_bytes(b.try_into().unwrap()))
        .collect();
    FeatureMap::new(height, width, channels, values)
}

pub fn write_fmap(map: &FeatureMap) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + map.values.len() * 4);
    out.extend_from_slice(FMAP_MAGIC);
    for dim in [map.height, map.width, map.channels] {
        out.extend_from_slice(&(dim as u32).to_le_bytes());
    }
    for v in &map.values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_by_one_by_two_is_24_bytes() {
        let map = FeatureMap::new(1, 1, 2, vec![1.5, -2.0]).unwrap();
        let bytes = write_fmap(&map);
        assert_eq!(bytes.len(), 24);
        assert_eq!(read_fmap(&bytes).unwrap(), map);
    }

    #[test]
    fn rejects_degenerate_and_truncated() {
        let mut bytes = FMAP_MAGIC.to_vec();
        bytes.extend_from_slice(&[0; 12]);
        assert!(matches!(read_fmap(&bytes), Err(Error::Format { .. })));

        let map = FeatureMap::new(2, 2, 1, vec![0.0; 4]).unwrap();
        let bytes = write_fmap(&map);
        let err = read_fmap(&bytes[..bytes.len() - 1]).unwrap_err();
        assert!(matches!(err, Error::Format { .. }));

        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(
            read_fmap(&bad),
            Err(Error::Format { offset: 0, .. })
        ));
    }

    #[test]
    fn rejects_non_finite_values() {
        let mut bytes = write_fmap(&FeatureMap::new(1, 1, 1, vec![0.0]).unwrap());
        bytes[16..20].copy_from_slice(&f32::NAN.to_le_bytes());
        assert!(matches!(read_fmap(&bytes), Err(Error::Data(_))));
    }
}
