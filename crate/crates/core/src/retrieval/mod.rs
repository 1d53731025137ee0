//! Archive indexing and exhaustive ranked search.
//!
//! Every query is scored against every entry, the query itself included, so
//! under any scheme the query normally comes back first at distance 0. Ties
//! are broken by ascending image id.

mod build;
mod rix;

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::Path;

use rayon::prelude::*;

pub use build::{build_index, extract_features, ImageFeatures, IndexConfig};
pub use rix::{decode_index, encode_index, RIX_MAGIC, RIX_VERSION};

use crate::dataio::MultiLabelSet;
use crate::descriptor::DescriptorMatrix;
use crate::error::{Error, Result};
use crate::metrics::{
    aggregate, query_metrics, GroundTruth, MetricsReport, QueryMetrics, RankedList,
    RetrievalWindow, DEFAULT_K_LIST,
};
use crate::region::RegionFeatureSet;
use crate::scheme::Scheme;
use crate::similarity::{region_set_distance, symmetric_region_set_distance, vector_distance};

/// Multi-label sets are stored as 32-bit masks.
pub const MAX_INDEX_CLASSES: usize = 32;

/// Region descriptors as persisted: per region its class and size, and the
/// pooled descriptor as a matrix row.
#[derive(Clone, Debug, PartialEq)]
pub struct IndexedRegions {
    pub class_ids: Vec<u8>,
    pub pixel_counts: Vec<u32>,
    pub descriptors: DescriptorMatrix,
}

impl IndexedRegions {
    pub fn len(&self) -> usize {
        self.class_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.class_ids.is_empty()
    }
}

impl From<&RegionFeatureSet> for IndexedRegions {
    fn from(set: &RegionFeatureSet) -> Self {
        IndexedRegions {
            class_ids: set.regions.iter().map(|r| r.class_id).collect(),
            pixel_counts: set.regions.iter().map(|r| r.pixel_count as u32).collect(),
            descriptors: set.descriptors.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IndexEntry {
    pub image_id: String,
    pub class_label: String,
    pub multi_labels: MultiLabelSet,
    pub recnn: IndexedRegions,
    pub recnn_plus: Vec<f32>,
    pub baselines: BTreeMap<Scheme, Vec<f32>>,
}

impl IndexEntry {
    fn vector(&self, scheme: Scheme) -> Option<&[f32]> {
        match scheme {
            Scheme::Recnn => None,
            Scheme::RecnnPlus => Some(&self.recnn_plus),
            other => self.baselines.get(&other).map(Vec::as_slice),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RetrievalIndex {
    entries: Vec<IndexEntry>,
    feature_dim: usize,
    /// Settings the index was built with. Index files do not record them,
    /// so a loaded index has none.
    config: Option<IndexConfig>,
}

impl RetrievalIndex {
    pub fn new(mut entries: Vec<IndexEntry>, config: Option<IndexConfig>) -> Result<Self> {
        let first = entries
            .first()
            .ok_or_else(|| Error::argument("an index needs at least one entry"))?;
        let feature_dim = first.recnn_plus.len();
        entries.sort_by(|a, b| a.image_id.cmp(&b.image_id));
        for pair in entries.windows(2) {
            if pair[0].image_id == pair[1].image_id {
                return Err(Error::argument(format!(
                    "duplicate image id {}",
                    pair[0].image_id
                )));
            }
        }
        for e in &entries {
            if e.recnn.is_empty() {
                return Err(Error::argument(format!(
                    "entry {} has no regions",
                    e.image_id
                )));
            }
            if e.recnn_plus.len() != feature_dim || e.recnn.descriptors.dim() != feature_dim {
                return Err(Error::argument(format!(
                    "entry {} has feature dimension {} / {}, index uses {feature_dim}",
                    e.image_id,
                    e.recnn_plus.len(),
                    e.recnn.descriptors.dim()
                )));
            }
            if e.recnn.pixel_counts.len() != e.recnn.len()
                || e.recnn.descriptors.len() != e.recnn.len()
            {
                return Err(Error::argument(format!(
                    "entry {} has inconsistent region metadata",
                    e.image_id
                )));
            }
        }
        Ok(RetrievalIndex {
            entries,
            feature_dim,
            config,
        })
    }

    pub fn entries(&self) -> &[IndexEntry] {
        &self.entries
    }

    pub fn feature_dim(&self) -> usize {
        self.feature_dim
    }

    pub fn config(&self) -> Option<&IndexConfig> {
        self.config.as_ref()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, image_id: &str) -> Option<&IndexEntry> {
        self.entries
            .binary_search_by(|e| e.image_id.as_str().cmp(image_id))
            .ok()
            .map(|i| &self.entries[i])
    }

    pub fn ground_truth(&self) -> GroundTruth {
        GroundTruth::from_class_labels(
            self.entries
                .iter()
                .map(|e| (e.image_id.as_str(), e.class_label.as_str())),
        )
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, encode_index(self)?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        decode_index(&fs::read(path).map_err(|e| Error::io(path, e))?)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct QueryOptions {
    /// Drop entries sharing no pixel class with the query before ranking.
    pub label_filter: bool,
    /// Average both argument orders of the region-set distance.
    pub symmetric_regions: bool,
}

/// Distance from `query` to `candidate` under `scheme`.
pub fn scheme_distance(
    query: &IndexEntry,
    candidate: &IndexEntry,
    scheme: Scheme,
    symmetric_regions: bool,
) -> Result<f64> {
    if scheme == Scheme::Recnn {
        let (q, c) = (&query.recnn.descriptors, &candidate.recnn.descriptors);
        return if symmetric_regions {
            symmetric_region_set_distance(q, c)
        } else {
            region_set_distance(q, c)
        };
    }
    let missing = |id: &str| Error::argument(format!("entry {id} has no {scheme} descriptor"));
    let q = query
        .vector(scheme)
        .ok_or_else(|| missing(&query.image_id))?;
    let c = candidate
        .vector(scheme)
        .ok_or_else(|| missing(&candidate.image_id))?;
    vector_distance(q, c, scheme.norm())
}

/// Unordered `(image_id, distance)` pairs for every candidate that survives
/// the label filter.
pub fn query_distances(
    index: &RetrievalIndex,
    query_id: &str,
    scheme: Scheme,
    opts: QueryOptions,
) -> Result<Vec<(String, f64)>> {
    let query = index
        .get(query_id)
        .ok_or_else(|| Error::argument(format!("unknown image id {query_id:?}")))?;
    let candidates: Vec<&IndexEntry> = index
        .entries
        .iter()
        .filter(|e| !opts.label_filter || !e.multi_labels.is_disjoint(&query.multi_labels))
        .collect();
    candidates
        .par_iter()
        .map(|e| {
            Ok((
                e.image_id.clone(),
                scheme_distance(query, e, scheme, opts.symmetric_regions)?,
            ))
        })
        .collect()
}

pub fn query_ranked(
    index: &RetrievalIndex,
    query_id: &str,
    scheme: Scheme,
    opts: QueryOptions,
) -> Result<RankedList> {
    Ok(RankedList::from_distances(query_distances(
        index, query_id, scheme, opts,
    )?))
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalOptions {
    pub k_list: Vec<usize>,
    pub query: QueryOptions,
    pub window: RetrievalWindow,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            k_list: DEFAULT_K_LIST.to_vec(),
            query: QueryOptions::default(),
            window: RetrievalWindow::default(),
        }
    }
}

/// Uses every entry once as a query, with same-class entries (the query
/// included) as its relevant set, and averages the per-query measures.
pub fn evaluate_scheme(
    index: &RetrievalIndex,
    scheme: Scheme,
    opts: &EvalOptions,
) -> Result<MetricsReport> {
    let classes: HashSet<&str> = index
        .entries
        .iter()
        .map(|e| e.class_label.as_str())
        .collect();
    if index.len() < 2 || classes.len() < 2 {
        return Err(Error::argument(
            "evaluation needs at least two entries in at least two classes",
        ));
    }
    if let Some(&k) = opts.k_list.iter().find(|&&k| k == 0) {
        return Err(Error::argument(format!(
            "precision cut-off must be positive, got {k}"
        )));
    }
    let gt = index.ground_truth();
    let gtm = gt.gtm();
    let per_query: Vec<QueryMetrics> = index
        .entries
        .par_iter()
        .map(|e| {
            let ranked = query_ranked(index, &e.image_id, scheme, opts.query)?;
            let relevant = gt
                .relevant(&e.image_id)
                .expect("every entry has ground truth");
            Ok(query_metrics(
                &ranked.relevance(relevant),
                relevant.len(),
                gtm,
                &opts.k_list,
                opts.window,
            ))
        })
        .collect::<Result<_>>()?;
    Ok(aggregate(scheme, &opts.k_list, &per_query))
}
