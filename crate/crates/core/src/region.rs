//! Connected regions of a segmentation and their max-pooled descriptors.
//!
//! Regions are maximal sets of same-class pixels joined under 4- or
//! 8-adjacency. Each retained region is described by the elementwise maximum
//! of the local descriptors of its pixels, and the whole image by the
//! elementwise maximum over all pixels. When every pixel belongs to some
//! retained region the two levels agree exactly: the maximum over region
//! descriptors equals the global pool.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataio::{LabelMap, IGNORE_LABEL};
use crate::descriptor::{max_into, DescriptorMatrix};
use crate::error::{Error, Result};
use crate::tensor::LocalFeatureMatrix;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Connectivity {
    Four,
    #[default]
    Eight,
}

impl FromStr for Connectivity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "4" => Ok(Connectivity::Four),
            "8" => Ok(Connectivity::Eight),
            other => Err(Error::argument(format!(
                "connectivity must be 4 or 8, got {other:?}"
            ))),
        }
    }
}

impl fmt::Display for Connectivity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Connectivity::Four => "4",
            Connectivity::Eight => "8",
        })
    }
}

/// Per-pixel region ids. 0 marks ignored pixels; regions are numbered
/// `1..=n` in raster order of their first pixel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegionLabelMap {
    height: usize,
    width: usize,
    ids: Vec<u32>,
}

impl RegionLabelMap {
    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn ids(&self) -> &[u32] {
        &self.ids
    }

    pub fn get(&self, row: usize, col: usize) -> u32 {
        self.ids[row * self.width + col]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundingBox {
    pub min_row: usize,
    pub min_col: usize,
    pub max_row: usize,
    pub max_col: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region {
    pub id: u32,
    pub class_id: u8,
    pub pixel_count: usize,
    pub bbox: BoundingBox,
}

struct DisjointSets {
    parent: Vec<u32>,
}

impl DisjointSets {
    fn with_capacity(n: usize) -> Self {
        DisjointSets {
            parent: Vec::with_capacity(n),
        }
    }

    fn make_set(&mut self) -> u32 {
        let id = self.parent.len() as u32;
        self.parent.push(id);
        id
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra < rb {
            self.parent[rb as usize] = ra;
        } else if rb < ra {
            self.parent[ra as usize] = rb;
        }
    }
}

/// Two-pass union-find labeling of same-class regions.
pub fn connected_components(
    map: &LabelMap,
    connectivity: Connectivity,
) -> (RegionLabelMap, Vec<Region>) {
    let (h, w) = (map.height(), map.width());
    let labels = map.labels();
    const NONE: u32 = u32::MAX;
    let mut provisional = vec![NONE; h * w];
    let mut sets = DisjointSets::with_capacity(h * w / 4 + 1);

    let mut neighbours: Vec<(isize, isize)> = vec![(0, -1), (-1, 0)];
    if connectivity == Connectivity::Eight {
        neighbours.extend([(-1, -1), (-1, 1)]);
    }

    for r in 0..h {
        for c in 0..w {
            let class = labels[r * w + c];
            if class == IGNORE_LABEL {
                continue;
            }
            let mut current = NONE;
            for &(dr, dc) in &neighbours {
                let (nr, nc) = (r as isize + dr, c as isize + dc);
                if nr < 0 || nc < 0 || nc >= w as isize {
                    continue;
                }
                let n = nr as usize * w + nc as usize;
                if labels[n] != class {
                    continue;
                }
                let other = provisional[n];
                if current == NONE {
                    current = other;
                } else if other != current {
                    sets.union(current, other);
                }
            }
            provisional[r * w + c] = if current == NONE {
                sets.make_set()
            } else {
                current
            };
        }
    }

    // Second pass: renumber roots in raster order of first appearance.
    let mut final_id = vec![0u32; sets.parent.len()];
    let mut regions: Vec<Region> = Vec::new();
    let mut ids = vec![0u32; h * w];
    for r in 0..h {
        for c in 0..w {
            let p = provisional[r * w + c];
            if p == NONE {
                continue;
            }
            let root = sets.find(p) as usize;
            if final_id[root] == 0 {
                regions.push(Region {
                    id: regions.len() as u32 + 1,
                    class_id: labels[r * w + c],
                    pixel_count: 0,
                    bbox: BoundingBox {
                        min_row: r,
                        min_col: c,
                        max_row: r,
                        max_col: c,
                    },
                });
                final_id[root] = regions.len() as u32;
            }
            let id = final_id[root];
            ids[r * w + c] = id;
            let region = &mut regions[id as usize - 1];
            region.pixel_count += 1;
            let bb = &mut region.bbox;
            bb.min_col = bb.min_col.min(c);
            bb.max_col = bb.max_col.max(c);
            bb.max_row = r;
        }
    }

    (
        RegionLabelMap {
            height: h,
            width: w,
            ids,
        },
        regions,
    )
}

/// Pooled region descriptors of one image: row `j` of `descriptors` belongs
/// to `regions[j]`.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionFeatureSet {
    pub regions: Vec<Region>,
    pub descriptors: DescriptorMatrix,
}

impl RegionFeatureSet {
    pub fn len(&self) -> usize {
        self.regions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.descriptors.dim()
    }
}

/// Max-pools local descriptors within each region holding at least
/// `min_region_px` pixels. Output order follows region id.
pub fn region_max_pool(
    features: &LocalFeatureMatrix,
    rmap: &RegionLabelMap,
    regions: &[Region],
    min_region_px: usize,
) -> Result<RegionFeatureSet> {
    if features.height() != rmap.height() || features.width() != rmap.width() {
        return Err(Error::argument(format!(
            "feature grid {}x{} does not match region grid {}x{}",
            features.height(),
            features.width(),
            rmap.height(),
            rmap.width()
        )));
    }
    let dim = features.dim();
    let mut pooled: Vec<Option<Vec<f32>>> = vec![None; regions.len()];
    for (i, &id) in rmap.ids().iter().enumerate() {
        if id == 0 {
            continue;
        }
        let x = features.column(i);
        match &mut pooled[id as usize - 1] {
            Some(acc) => max_into(acc, x),
            slot @ None => *slot = Some(x.to_vec()),
        }
    }

    let mut kept = Vec::new();
    let mut descriptors = DescriptorMatrix::new(dim);
    for (region, desc) in regions.iter().zip(pooled) {
        if region.pixel_count < min_region_px {
            continue;
        }
        let desc = desc.ok_or_else(|| {
            Error::argument(format!(
                "region {} has no pixels in the region map",
                region.id
            ))
        })?;
        descriptors.push(&desc)?;
        kept.push(region.clone());
    }
    Ok(RegionFeatureSet {
        regions: kept,
        descriptors,
    })
}

/// Elementwise maximum over every local descriptor of the image.
pub fn global_max_pool(features: &LocalFeatureMatrix) -> Result<Vec<f32>> {
    let mut cols = features.columns();
    let mut acc = cols
        .next()
        .ok_or_else(|| Error::argument("cannot pool an empty feature matrix"))?
        .to_vec();
    for col in cols {
        max_into(&mut acc, col);
    }
    Ok(acc)
}
