//! Region convolutional features for multi-label image retrieval.
//!
//! The crate turns dense per-pixel feature maps and segmentation label maps
//! into region descriptors, ranks an archive against queries, and scores
//! the rankings:
//!
//! 1. [`tensor`]: rectify, bilinearly upsample to label-map resolution, and
//!    flatten into one local descriptor per pixel.
//! 2. [`region`]: label connected same-class regions and max-pool the
//!    local descriptors inside each one (plus a global pool over the image).
//! 3. [`similarity`]: L1/L2 vector distances and the region-set distance.
//! 4. [`retrieval`]: build and persist an index, rank it exhaustively.
//! 5. [`metrics`]: ANMRR, mAP, P@k, interpolated PR, and segmentation scores.
//!
//! [`baselines`] provides hand-crafted comparison descriptors, [`dataio`]
//! the file formats, and [`synth`] a deterministic synthetic archive.
//!
//! ```
//! use recnn::dataio::{FeatureMap, LabelMap};
//! use recnn::region::{connected_components, global_max_pool, region_max_pool, Connectivity};
//! use recnn::tensor::{bilinear_upsample, flatten_local_features, relu};
//!
//! # fn main() -> recnn::Result<()> {
//! // A 1x2 feature map with two channels, upsampled onto a 2x4 segmentation.
//! let fmap = FeatureMap::new(1, 2, 2, vec![1.0, -1.0, 0.0, 2.0])?;
//! let labels = LabelMap::new(2, 4, vec![0, 0, 1, 1, 0, 0, 1, 1], 17)?;
//!
//! let local = flatten_local_features(bilinear_upsample(&relu(&fmap), 2, 4)?);
//! let (rmap, regions) = connected_components(&labels, Connectivity::Eight);
//! let set = region_max_pool(&local, &rmap, &regions, 1)?;
//!
//! assert_eq!(set.len(), 2);
//! assert_eq!(set.descriptors.column_max().unwrap(), global_max_pool(&local)?);
//! # Ok(())
//! # }
//! ```

pub mod baselines;
pub mod dataio;
pub mod descriptor;
mod error;
pub mod metrics;
pub mod region;
pub mod retrieval;
pub mod scheme;
pub mod similarity;
pub mod synth;
pub mod tensor;

pub use error::{Error, Result};
pub use scheme::Scheme;

#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/local-features.md")]
    mod local_features {}
    #[doc = include_str!("../../../book/src/regions.md")]
    mod regions {}
    #[doc = include_str!("../../../book/src/distance.md")]
    mod distance {}
    #[doc = include_str!("../../../book/src/retrieval.md")]
    mod retrieval {}
    #[doc = include_str!("../../../book/src/baselines.md")]
    mod baselines {}
    #[doc = include_str!("../../../book/src/formats.md")]
    mod formats {}
    #[doc = include_str!("../../../book/src/synthetic.md")]
    mod synthetic {}
}
