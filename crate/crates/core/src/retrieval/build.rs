use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{baseline_descriptor, BaselineConfig};
use crate::dataio::{
    derive_multilabels, read_feature_map, read_image, read_labelmap, FeatureMap, LabelMap,
    ManifestRecord, RasterImage,
};
use crate::error::{Error, Result};
use crate::region::{
    connected_components, global_max_pool, region_max_pool, Connectivity, RegionFeatureSet,
};
use crate::scheme::Scheme;
use crate::tensor::{bilinear_upsample, flatten_local_features, relu};

use super::{IndexEntry, IndexedRegions, RetrievalIndex, MAX_INDEX_CLASSES};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexConfig {
    /// Size of the pixel-class vocabulary of the label maps.
    pub num_classes: usize,
    pub connectivity: Connectivity,
    /// Regions smaller than this are dropped before pooling.
    pub min_region_px: usize,
    /// A class joins an image's multi-label set once it covers this many
    /// pixels.
    pub multilabel_min_pixels: usize,
    /// Baseline schemes to compute, from `Scheme::BASELINES`.
    pub baselines: Vec<Scheme>,
    pub baseline_params: BaselineConfig,
}

impl Default for IndexConfig {
    fn default() -> Self {
        IndexConfig {
            num_classes: 17,
            connectivity: Connectivity::Eight,
            min_region_px: 1,
            multilabel_min_pixels: 1,
            baselines: Scheme::BASELINES.to_vec(),
            baseline_params: BaselineConfig::default(),
        }
    }
}

impl IndexConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_classes == 0 || self.num_classes > MAX_INDEX_CLASSES {
            return Err(Error::argument(format!(
                "num_classes must be in 1..={MAX_INDEX_CLASSES} for indexing, got {}",
                self.num_classes
            )));
        }
        if self.min_region_px == 0 || self.multilabel_min_pixels == 0 {
            return Err(Error::argument("pixel thresholds must be at least 1"));
        }
        if let Some(s) = self.baselines.iter().find(|s| !s.is_baseline()) {
            return Err(Error::argument(format!("{s} is not a baseline scheme")));
        }
        self.baseline_params.validate()
    }
}

/// Everything extracted from one image.
#[derive(Clone, Debug, PartialEq)]
pub struct ImageFeatures {
    pub regions: RegionFeatureSet,
    pub recnn_plus: Vec<f32>,
    pub baselines: BTreeMap<Scheme, Vec<f32>>,
}

/// Runs the per-image pipeline: rectify, upsample to the label-map grid,
/// flatten, label connected regions, pool per region and globally, then
/// compute the configured baselines from the raster.
pub fn extract_features(
    image: &RasterImage,
    labels: &LabelMap,
    features: &FeatureMap,
    cfg: &IndexConfig,
) -> Result<ImageFeatures> {
    if image.height() != labels.height() || image.width() != labels.width() {
        return Err(Error::Data(format!(
            "raster is {}x{} but label map is {}x{}",
            image.height(),
            image.width(),
            labels.height(),
            labels.width()
        )));
    }
    let upsampled = bilinear_upsample(&relu(features), labels.height(), labels.width())?;
    let local = flatten_local_features(upsampled);
    let (rmap, regions) = connected_components(labels, cfg.connectivity);
    let pooled = region_max_pool(&local, &rmap, &regions, cfg.min_region_px)?;
    if pooled.is_empty() {
        return Err(Error::Data(format!(
            "no region has at least {} pixels",
            cfg.min_region_px
        )));
    }
    let recnn_plus = global_max_pool(&local)?;
    let mut baselines = BTreeMap::new();
    for &scheme in &cfg.baselines {
        let d = baseline_descriptor(image, scheme, &cfg.baseline_params)?;
        baselines.insert(scheme, d.values);
    }
    Ok(ImageFeatures {
        regions: pooled,
        recnn_plus,
        baselines,
    })
}

fn index_entry(record: &ManifestRecord, cfg: &IndexConfig) -> Result<IndexEntry> {
    let image = read_image(&record.image_path)?;
    let labels = read_labelmap(&record.label_path, cfg.num_classes)?;
    let features = read_feature_map(&record.feature_path)?;
    let extracted = extract_features(&image, &labels, &features, cfg)?;
    Ok(IndexEntry {
        image_id: record.image_id.clone(),
        class_label: record.class_label.clone(),
        multi_labels: derive_multilabels(&labels, cfg.multilabel_min_pixels)?,
        recnn: IndexedRegions::from(&extracted.regions),
        recnn_plus: extracted.recnn_plus,
        baselines: extracted.baselines,
    })
}

/// Extracts every manifest image into an index. Images are processed in
/// parallel; the result does not depend on the thread count.
pub fn build_index(records: &[ManifestRecord], cfg: &IndexConfig) -> Result<RetrievalIndex> {
    cfg.validate()?;
    if records.is_empty() {
        return Err(Error::argument("manifest has no images"));
    }
    let results: Vec<Result<IndexEntry>> = records
        .par_iter()
        .map(|r| index_entry(r, cfg).map_err(|e| e.for_image(&r.image_id)))
        .collect();
    let mut entries = results.into_iter().collect::<Result<Vec<_>>>()?;
    entries.sort_by(|a, b| a.image_id.cmp(&b.image_id));
    RetrievalIndex::new(entries, Some(cfg.clone()))
}
