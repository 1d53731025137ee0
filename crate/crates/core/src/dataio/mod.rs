//! Readers and writers for the on-disk formats, plus multi-label derivation.

mod fmap;
mod manifest;
mod pnm;

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

pub use fmap::{read_fmap, write_fmap, FeatureMap, FMAP_MAGIC};
pub(crate) use manifest::ManifestLine;
pub use manifest::{load_manifest, parse_manifest, ManifestRecord};
pub use pnm::{
    decode_image, decode_labelmap, encode_image, encode_labelmap, LabelMap, RasterImage,
    IGNORE_LABEL,
};

use crate::error::{Error, Result};

/// The set of pixel classes present in an image.
pub type MultiLabelSet = BTreeSet<u8>;

/// Classes covering at least `min_pixels` pixels. The ignore label is never
/// reported.
pub fn derive_multilabels(map: &LabelMap, min_pixels: usize) -> Result<MultiLabelSet> {
    if min_pixels == 0 {
        return Err(Error::argument("min_pixels must be at least 1"));
    }
    let mut counts = [0usize; 256];
    for &l in map.labels() {
        counts[l as usize] += 1;
    }
    Ok(counts[..IGNORE_LABEL as usize]
        .iter()
        .enumerate()
        .filter(|(_, &n)| n >= min_pixels)
        .map(|(c, _)| c as u8)
        .collect())
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

pub fn read_image(path: impl AsRef<Path>) -> Result<RasterImage> {
    decode_image(&read_file(path.as_ref())?)
}

pub fn read_labelmap(path: impl AsRef<Path>, num_classes: usize) -> Result<LabelMap> {
    decode_labelmap(&read_file(path.as_ref())?, num_classes)
}

pub fn read_feature_map(path: impl AsRef<Path>) -> Result<FeatureMap> {
    read_fmap(&read_file(path.as_ref())?)
}
