//! Dense transforms applied to feature maps before region pooling.
//!
//! The order is fixed: rectify, then upsample to label-map resolution, then
//! flatten into one local descriptor per pixel. Upsampling before rectifying
//! is not equivalent, because interpolation mixes values across sign changes.

use crate::dataio::FeatureMap;
use crate::error::{Error, Result};

pub fn relu(map: &FeatureMap) -> FeatureMap {
    let values = map.values().iter().map(|&v| v.max(0.0)).collect();
    FeatureMap::from_parts_unchecked(map.height(), map.width(), map.channels(), values)
}

/// Source sample positions and blend weight for one output axis under the
/// half-pixel-centre convention, clamped to the input edge.
fn axis_taps(input: usize, output: usize) -> Vec<(usize, usize, f64)> {
    let scale = input as f64 / output as f64;
    let last = (input - 1) as f64;
    (0..output)
        .map(|i| {
            let src = ((i as f64 + 0.5) * scale - 0.5).clamp(0.0, last);
            let lo = src.floor() as usize;
            let hi = (lo + 1).min(input - 1);
            (lo, hi, src - lo as f64)
        })
        .collect()
}

#[inline]
fn lerp(a: f64, b: f64, t: f64) -> f64 {
    a + (b - a) * t
}

/// Bilinear resize to `out_h`×`out_w`. Output sample `i` reads source
/// coordinate `(i + 0.5) * in / out - 0.5`, clamped to `[0, in - 1]`. Each
/// channel is interpolated independently.
pub fn bilinear_upsample(map: &FeatureMap, out_h: usize, out_w: usize) -> Result<FeatureMap> {
    if out_h == 0 || out_w == 0 {
        return Err(Error::argument(format!(
            "upsample target must be nonempty, got {out_h}x{out_w}"
        )));
    }
    if out_h < map.height() || out_w < map.width() {
        return Err(Error::argument(format!(
            "upsample target {out_h}x{out_w} is smaller than source {}x{}",
            map.height(),
            map.width()
        )));
    }
    let c = map.channels();
    if out_h == map.height() && out_w == map.width() {
        return Ok(map.clone());
    }
    let rows = axis_taps(map.height(), out_h);
    let cols = axis_taps(map.width(), out_w);
    let mut values = Vec::with_capacity(out_h * out_w * c);
    for &(r0, r1, fy) in &rows {
        for &(c0, c1, fx) in &cols {
            let (p00, p01) = (map.pixel(r0, c0), map.pixel(r0, c1));
            let (p10, p11) = (map.pixel(r1, c0), map.pixel(r1, c1));
            for k in 0..c {
                let top = lerp(p00[k] as f64, p01[k] as f64, fx);
                let bottom = lerp(p10[k] as f64, p11[k] as f64, fx);
                values.push(lerp(top, bottom, fy) as f32);
            }
        }
    }
    Ok(FeatureMap::from_parts_unchecked(out_h, out_w, c, values))
}

/// One C-dim local descriptor per pixel, columns in row-major pixel order.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalFeatureMatrix {
    height: usize,
    width: usize,
    dim: usize,
    data: Vec<f32>,
}

impl LocalFeatureMatrix {
    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Descriptor dimension (number of feature channels).
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of descriptors, one per pixel.
    pub fn len(&self) -> usize {
        self.height * self.width
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn column(&self, i: usize) -> &[f32] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[f32]> + '_ {
        self.data.chunks_exact(self.dim)
    }

    pub fn coord_of(&self, i: usize) -> (usize, usize) {
        (i / self.width, i % self.width)
    }

    pub fn index_of(&self, row: usize, col: usize) -> usize {
        row * self.width + col
    }

    /// Reassembles the feature map the matrix was flattened from.
    pub fn to_feature_map(&self) -> FeatureMap {
        FeatureMap::from_parts_unchecked(self.height, self.width, self.dim, self.data.clone())
    }
}

/// Flattens a map into its local feature matrix. Since the map is stored
/// channel-fastest this is a relabeling of the same buffer.
pub fn flatten_local_features(map: FeatureMap) -> LocalFeatureMatrix {
    let (height, width, dim) = (map.height(), map.width(), map.channels());
    LocalFeatureMatrix {
        height,
        width,
        dim,
        data: map.into_values(),
    }
}
