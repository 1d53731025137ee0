//! Deterministic synthetic archives with known structure.
//!
//! Each broad class ("composition") owns a distinct set of pixel classes of
//! equal size. Its layout is a background of the first class with one
//! axis-aligned rectangle per remaining class, so every image has exactly as
//! many connected regions as classes, under either adjacency. Pixel class `c`
//! has the one-hot feature prototype `e_c`; each feature value gets
//! independent Gaussian noise.
//!
//! Randomness comes from SplitMix64 seeded with `seed ^ image_index`, so any
//! image can be regenerated on its own, and identical configs produce
//! byte-identical files.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dataio::{
    encode_image, encode_labelmap, write_fmap, FeatureMap, LabelMap, ManifestLine, RasterImage,
};
use crate::error::{Error, Result};

/// Colours for up to 17 pixel classes.
pub const PALETTE: [[u8; 3]; 17] = [
    [230, 25, 75],
    [60, 180, 75],
    [255, 225, 25],
    [0, 130, 200],
    [245, 130, 48],
    [145, 30, 180],
    [70, 240, 240],
    [240, 50, 230],
    [210, 245, 60],
    [250, 190, 212],
    [0, 128, 128],
    [220, 190, 255],
    [170, 110, 40],
    [255, 250, 200],
    [128, 0, 0],
    [170, 255, 195],
    [128, 128, 0],
];

pub const MANIFEST_NAME: &str = "manifest.jsonl";

#[derive(Clone, Copy, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal via Box-Muller, one draw per pair of uniforms.
    pub fn next_gaussian(&mut self) -> f64 {
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub num_images: usize,
    pub num_compositions: usize,
    pub num_pixel_classes: usize,
    pub height: usize,
    pub width: usize,
    pub channels: usize,
    pub noise_sigma: f64,
    pub seed: u64,
    /// Feature maps are generated at `1 / feature_stride` of the image
    /// resolution; 1 emits them at full resolution.
    pub feature_stride: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            num_images: 40,
            num_compositions: 4,
            num_pixel_classes: 6,
            height: 64,
            width: 64,
            channels: 8,
            noise_sigma: 0.0,
            seed: 0,
            feature_stride: 1,
        }
    }
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

impl SynthConfig {
    /// Number of pixel classes used by every composition.
    pub fn classes_per_composition(&self) -> usize {
        (self.num_pixel_classes / 2).max(1)
    }

    pub fn validate(&self) -> Result<()> {
        let arg = |m: String| Err(Error::argument(m));
        if self.num_images == 0 || self.num_compositions == 0 {
            return arg("need at least one image and one composition".into());
        }
        if !self.num_images.is_multiple_of(self.num_compositions) {
            return arg(format!(
                "{} images do not divide evenly into {} compositions",
                self.num_images, self.num_compositions
            ));
        }
        if self.num_pixel_classes == 0 || self.num_pixel_classes > PALETTE.len() {
            return arg(format!(
                "pixel classes must be in 1..={}, got {}",
                PALETTE.len(),
                self.num_pixel_classes
            ));
        }
        if self.channels < self.num_pixel_classes {
            return arg(format!(
                "{} channels cannot hold {} distinct one-hot prototypes",
                self.channels, self.num_pixel_classes
            ));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return arg(format!(
                "noise sigma must be finite and >= 0, got {}",
                self.noise_sigma
            ));
        }
        let s = self.classes_per_composition();
        let available = binomial(self.num_pixel_classes, s);
        if self.num_compositions > available {
            return arg(format!(
                "{} pixel classes give only {available} distinct compositions of {s} classes",
                self.num_pixel_classes
            ));
        }
        if self.feature_stride == 0
            || !self.height.is_multiple_of(self.feature_stride)
            || !self.width.is_multiple_of(self.feature_stride)
        {
            return arg(format!(
                "feature stride {} must divide the image size {}x{}",
                self.feature_stride, self.height, self.width
            ));
        }
        let rects = s - 1;
        if let Some(cell) = self.width.checked_div(rects) {
            let margin = (cell / 4).max(1);
            let v_margin = (self.height / 4).max(1);
            if cell < 2 * margin + 1 || self.height < 2 * v_margin + 1 {
                return arg(format!(
                    "{}x{} is too small for {rects} separated rectangles",
                    self.height, self.width
                ));
            }
        }
        Ok(())
    }

    /// The sorted pixel classes of composition `k`: the `k`-th subset of
    /// size `classes_per_composition` in lexicographic order.
    pub fn composition_classes(&self, k: usize) -> Vec<u8> {
        let s = self.classes_per_composition();
        let n = self.num_pixel_classes;
        let mut combo: Vec<usize> = (0..s).collect();
        for _ in 0..k {
            let mut i = s;
            while i > 0 && combo[i - 1] == n - s + i - 1 {
                i -= 1;
            }
            assert!(i > 0, "composition {k} out of range");
            combo[i - 1] += 1;
            for j in i..s {
                combo[j] = combo[j - 1] + 1;
            }
        }
        combo.into_iter().map(|c| c as u8).collect()
    }

    /// Connected regions in every image of composition `k`.
    pub fn expected_region_count(&self, _k: usize) -> usize {
        self.classes_per_composition()
    }

    pub fn composition_of(&self, image_index: usize) -> usize {
        image_index % self.num_compositions
    }

    pub fn image_id(&self, image_index: usize) -> String {
        format!("img{image_index:04}")
    }

    pub fn class_label(&self, composition: usize) -> String {
        format!("comp{composition:02}")
    }

    pub fn label_map(&self, composition: usize) -> LabelMap {
        let classes = self.composition_classes(composition);
        let (h, w) = (self.height, self.width);
        let mut labels = vec![classes[0]; h * w];
        let rects = &classes[1..];
        if !rects.is_empty() {
            let cell = w / rects.len();
            let margin = (cell / 4).max(1);
            let v_margin = (h / 4).max(1);
            for (i, &c) in rects.iter().enumerate() {
                for r in v_margin..h - v_margin {
                    for col in i * cell + margin..(i + 1) * cell - margin {
                        labels[r * w + col] = c;
                    }
                }
            }
        }
        LabelMap::new(h, w, labels, self.num_pixel_classes).expect("valid synthetic label map")
    }

    pub fn raster(&self, labels: &LabelMap) -> RasterImage {
        let pixels = labels
            .labels()
            .iter()
            .flat_map(|&c| PALETTE[c as usize])
            .collect();
        RasterImage::new(self.height, self.width, pixels).expect("valid synthetic raster")
    }

    pub fn feature_map(&self, image_index: usize, labels: &LabelMap) -> FeatureMap {
        let stride = self.feature_stride;
        let (fh, fw, c) = (self.height / stride, self.width / stride, self.channels);
        let mut rng = SplitMix64::new(self.seed ^ image_index as u64);
        let mut values = Vec::with_capacity(fh * fw * c);
        for fr in 0..fh {
            for fc in 0..fw {
                let class = labels.get(fr * stride + stride / 2, fc * stride + stride / 2) as usize;
                for k in 0..c {
                    let proto = if k == class { 1.0 } else { 0.0 };
                    let v = if self.noise_sigma > 0.0 {
                        proto + self.noise_sigma * rng.next_gaussian()
                    } else {
                        proto
                    };
                    values.push(v as f32);
                }
            }
        }
        FeatureMap::new(fh, fw, c, values).expect("finite synthetic features")
    }
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Writes images, label maps, feature maps and `manifest.jsonl` into
/// `out_dir`, returning the manifest path.
pub fn generate_dataset(cfg: &SynthConfig, out_dir: impl AsRef<Path>) -> Result<PathBuf> {
    cfg.validate()?;
    let out_dir = out_dir.as_ref();
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let label_maps: Vec<LabelMap> = (0..cfg.num_compositions)
        .map(|k| cfg.label_map(k))
        .collect();
    let mut manifest = String::new();
    for i in 0..cfg.num_images {
        let k = cfg.composition_of(i);
        let id = cfg.image_id(i);
        let labels = &label_maps[k];
        let (image, lbl, feat) = (
            format!("{id}.ppm"),
            format!("{id}.pgm"),
            format!("{id}.fmap"),
        );
        write(&out_dir.join(&image), &encode_image(&cfg.raster(labels)))?;
        write(&out_dir.join(&lbl), &encode_labelmap(labels))?;
        write(
            &out_dir.join(&feat),
            &write_fmap(&cfg.feature_map(i, labels)),
        )?;
        let line = ManifestLine {
            id,
            class: cfg.class_label(k),
            image,
            labels: lbl,
            features: feat,
        };
        manifest.push_str(&serde_json::to_string(&line).expect("manifest line serializes"));
        manifest.push('\n');
    }
    let path = out_dir.join(MANIFEST_NAME);
    write(&path, manifest.as_bytes())?;
    Ok(path)
}
