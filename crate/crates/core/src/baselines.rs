//! Hand-crafted global descriptors used as comparison points.
//!
//! All four work on the RGB raster. LBP and GLCM first convert to 8-bit
//! luma with integer arithmetic, `(299 R + 587 G + 114 B + 500) / 1000`, so
//! the grayscale image is identical on every platform.

use serde::{Deserialize, Serialize};

use crate::dataio::RasterImage;
use crate::error::{Error, Result};
use crate::scheme::Scheme;

#[derive(Clone, Debug, PartialEq)]
pub struct DescriptorVector {
    pub scheme: Scheme,
    pub values: Vec<f32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaselineConfig {
    /// Uniform bins per colour channel; must divide 256.
    pub color_bins: usize,
    /// Gray levels for co-occurrence counting; must divide 256.
    pub glcm_levels: usize,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        BaselineConfig {
            color_bins: 32,
            glcm_levels: 32,
        }
    }
}

impl BaselineConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("color_bins", self.color_bins),
            ("glcm_levels", self.glcm_levels),
        ] {
            if v == 0 || v > 256 || 256 % v != 0 {
                return Err(Error::argument(format!("{name} must divide 256, got {v}")));
            }
        }
        Ok(())
    }
}

pub fn gray_value([r, g, b]: [u8; 3]) -> u8 {
    ((299 * r as u32 + 587 * g as u32 + 114 * b as u32 + 500) / 1000) as u8
}

pub fn to_gray(img: &RasterImage) -> Vec<u8> {
    img.rgb_pixels().map(gray_value).collect()
}

/// Per-channel mean and population standard deviation of values scaled to
/// `[0, 1]`: `[mean_r, mean_g, mean_b, std_r, std_g, std_b]`.
pub fn stats_descriptor(img: &RasterImage) -> DescriptorVector {
    let n = (img.height() * img.width()) as f64;
    let mut sum = [0u64; 3];
    let mut sum_sq = [0u64; 3];
    for px in img.rgb_pixels() {
        for ch in 0..3 {
            let v = px[ch] as u64;
            sum[ch] += v;
            sum_sq[ch] += v * v;
        }
    }
    let mut values = vec![0.0f32; 6];
    for ch in 0..3 {
        let mean = sum[ch] as f64 / n;
        let var = (sum_sq[ch] as f64 / n - mean * mean).max(0.0);
        values[ch] = (mean / 255.0) as f32;
        values[3 + ch] = (var.sqrt() / 255.0) as f32;
    }
    DescriptorVector {
        scheme: Scheme::Stats,
        values,
    }
}

/// Per-channel histograms with `bins` uniform bins, each normalized to sum 1,
/// concatenated R, G, B.
pub fn color_histogram(img: &RasterImage, bins: usize) -> DescriptorVector {
    let mut counts = vec![0u64; 3 * bins];
    for px in img.rgb_pixels() {
        for ch in 0..3 {
            counts[ch * bins + px[ch] as usize * bins / 256] += 1;
        }
    }
    let n = (img.height() * img.width()) as f64;
    DescriptorVector {
        scheme: Scheme::Color,
        values: counts.iter().map(|&c| (c as f64 / n) as f32).collect(),
    }
}

pub const LBP_BINS: usize = 10;

/// Rotation-invariant uniform code of an 8-bit circular pattern: the number
/// of set bits when the pattern has at most two 0/1 transitions, else 9.
pub fn riu2_code(pattern: u8) -> usize {
    let transitions = (pattern ^ pattern.rotate_right(1)).count_ones();
    if transitions <= 2 {
        pattern.count_ones() as usize
    } else {
        LBP_BINS - 1
    }
}

/// Rotation-invariant uniform LBP histogram, 8 neighbours at radius 1.
///
/// Neighbours are visited counter-clockwise starting east; diagonal samples
/// are bilinearly interpolated. Bit `p` is set when neighbour `p` is at
/// least the centre value. Only interior pixels are coded.
pub fn lbp_descriptor(img: &RasterImage) -> Result<DescriptorVector> {
    let (h, w) = (img.height(), img.width());
    if h < 3 || w < 3 {
        return Err(Error::argument(format!(
            "LBP needs at least a 3x3 image, got {h}x{w}"
        )));
    }
    let gray = to_gray(img);
    let at = |r: usize, c: usize| gray[r * w + c] as f64;

    // Diagonal samples sit at distance 1 along both axes scaled by 1/sqrt(2).
    // Interpolating differences from the centre keeps flat areas exactly
    // zero, and summing the two axial terms first makes the value
    // independent of which axis is which.
    let a = std::f64::consts::FRAC_1_SQRT_2;
    let w_axial = a * (1.0 - a);
    let w_diag = a * a;

    let mut hist = [0u64; LBP_BINS];
    for r in 1..h - 1 {
        for c in 1..w - 1 {
            let centre = at(r, c);
            let d = |rr: usize, cc: usize| at(rr, cc) - centre;
            let (n, s, e, wst) = (d(r - 1, c), d(r + 1, c), d(r, c + 1), d(r, c - 1));
            let diag = |axial_a: f64, axial_b: f64, corner: f64| {
                w_axial * (axial_a + axial_b) + w_diag * corner
            };
            let samples = [
                e,
                diag(n, e, d(r - 1, c + 1)),
                n,
                diag(n, wst, d(r - 1, c - 1)),
                wst,
                diag(s, wst, d(r + 1, c - 1)),
                s,
                diag(s, e, d(r + 1, c + 1)),
            ];
            let pattern =
                samples.iter().enumerate().fold(
                    0u8,
                    |acc, (p, &v)| if v >= 0.0 { acc | (1 << p) } else { acc },
                );
            hist[riu2_code(pattern)] += 1;
        }
    }
    let total = ((h - 2) * (w - 2)) as f64;
    Ok(DescriptorVector {
        scheme: Scheme::Lbp,
        values: hist.iter().map(|&n| (n as f64 / total) as f32).collect(),
    })
}

/// Pixel offsets `(d_row, d_col)` of the four co-occurrence directions.
pub const GLCM_OFFSETS: [(isize, isize); 4] = [(0, 1), (1, 0), (1, 1), (1, -1)];

/// Contrast, correlation, energy and homogeneity of a normalized symmetric
/// co-occurrence matrix given as `levels × levels` probabilities.
fn glcm_features(p: &[f64], levels: usize) -> [f64; 4] {
    let mut mu = 0.0;
    for i in 0..levels {
        for j in 0..levels {
            mu += i as f64 * p[i * levels + j];
        }
    }
    let mut var = 0.0;
    let (mut contrast, mut cov, mut energy, mut homogeneity) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..levels {
        for j in 0..levels {
            let pij = p[i * levels + j];
            if pij == 0.0 {
                continue;
            }
            let di = i as f64 - mu;
            let dj = j as f64 - mu;
            let diff = i.abs_diff(j) as f64;
            var += di * di * pij;
            cov += di * dj * pij;
            contrast += diff * diff * pij;
            energy += pij * pij;
            homogeneity += pij / (1.0 + diff);
        }
    }
    // The matrix is symmetric, so both marginals share mean and variance.
    let correlation = if var > 0.0 { cov / var } else { 1.0 };
    [contrast, correlation, energy, homogeneity]
}

/// Texture features from co-occurrence matrices at the four offsets, offset
/// major: `[contrast, correlation, energy, homogeneity] × 4`.
///
/// An offset with no valid pixel pair (image too narrow or short) reports the
/// constant-image values `[0, 1, 1, 1]`. Zero-variance matrices report
/// correlation 1.
pub fn glcm_descriptor(img: &RasterImage, levels: usize) -> DescriptorVector {
    let (h, w) = (img.height(), img.width());
    let quant: Vec<usize> = to_gray(img)
        .into_iter()
        .map(|g| g as usize * levels / 256)
        .collect();
    let mut values = Vec::with_capacity(16);
    let mut counts = vec![0u64; levels * levels];
    for &(dr, dc) in &GLCM_OFFSETS {
        counts.iter_mut().for_each(|c| *c = 0);
        let mut pairs = 0u64;
        for r in 0..h {
            let rr = r as isize + dr;
            if rr < 0 || rr >= h as isize {
                continue;
            }
            for c in 0..w {
                let cc = c as isize + dc;
                if cc < 0 || cc >= w as isize {
                    continue;
                }
                let i = quant[r * w + c];
                let j = quant[rr as usize * w + cc as usize];
                counts[i * levels + j] += 1;
                counts[j * levels + i] += 1;
                pairs += 2;
            }
        }
        let feats = if pairs == 0 {
            [0.0, 1.0, 1.0, 1.0]
        } else {
            let p: Vec<f64> = counts.iter().map(|&n| n as f64 / pairs as f64).collect();
            glcm_features(&p, levels)
        };
        values.extend(feats.iter().map(|&v| v as f32));
    }
    DescriptorVector {
        scheme: Scheme::Glcm,
        values,
    }
}

/// Computes one baseline scheme. Fails for non-baseline schemes and for
/// images too small for LBP.
pub fn baseline_descriptor(
    img: &RasterImage,
    scheme: Scheme,
    cfg: &BaselineConfig,
) -> Result<DescriptorVector> {
    match scheme {
        Scheme::Stats => Ok(stats_descriptor(img)),
        Scheme::Color => Ok(color_histogram(img, cfg.color_bins)),
        Scheme::Lbp => lbp_descriptor(img),
        Scheme::Glcm => Ok(glcm_descriptor(img, cfg.glcm_levels)),
        other => Err(Error::argument(format!("{other} is not a baseline scheme"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform(h: usize, w: usize, rgb: [u8; 3]) -> RasterImage {
        RasterImage::new(h, w, rgb.repeat(h * w)).unwrap()
    }

    fn from_gray(h: usize, w: usize, g: &[u8]) -> RasterImage {
        RasterImage::new(h, w, g.iter().flat_map(|&v| [v, v, v]).collect()).unwrap()
    }

    #[test]
    fn stats_examples() {
        let d = stats_descriptor(&uniform(4, 4, [128; 3]));
        for v in &d.values[..3] {
            assert!((*v as f64 - 128.0 / 255.0).abs() < 1e-6);
        }
        assert_eq!(&d.values[3..], &[0.0; 3]);

        assert_eq!(
            stats_descriptor(&uniform(2, 2, [0; 3])).values,
            vec![0.0; 6]
        );

        let d = stats_descriptor(&from_gray(1, 2, &[0, 255]));
        assert_eq!(d.values, vec![0.5; 6]);
    }

    #[test]
    fn color_examples() {
        let d = color_histogram(&uniform(3, 3, [10, 200, 255]), 32);
        assert_eq!(d.values.len(), 96);
        assert_eq!(d.values.iter().filter(|&&v| v != 0.0).count(), 3);
        assert_eq!(d.values[1], 1.0);
        assert_eq!(d.values[32 + 25], 1.0);
        assert_eq!(d.values[64 + 31], 1.0);

        let img = RasterImage::new(1, 2, vec![0, 0, 0, 255, 0, 0]).unwrap();
        let d = color_histogram(&img, 32);
        assert_eq!((d.values[0], d.values[31]), (0.5, 0.5));
        assert_eq!(d.values.iter().sum::<f32>(), 3.0);
    }

    #[test]
    fn gray_rounds_half_up() {
        assert_eq!(gray_value([255, 255, 255]), 255);
        assert_eq!(gray_value([0, 0, 0]), 0);
        // 0.299 * 1 = 0.299 -> 0; 0.587 * 1 = 0.587 -> 1
        assert_eq!(gray_value([1, 0, 0]), 0);
        assert_eq!(gray_value([0, 1, 0]), 1);
    }

    #[test]
    fn riu2_codes() {
        assert_eq!(riu2_code(0), 0);
        assert_eq!(riu2_code(0xff), 8);
        assert_eq!(riu2_code(0b0000_0111), 3);
        assert_eq!(riu2_code(0b1000_0011), 3);
        assert_eq!(riu2_code(0b0101_0101), 9);
        for p in 0..=255u8 {
            assert_eq!(riu2_code(p), riu2_code(p.rotate_left(2)));
        }
    }

    #[test]
    fn lbp_constant_image_is_all_ones() {
        let d = lbp_descriptor(&uniform(5, 4, [77, 12, 200])).unwrap();
        assert_eq!(d.values[8], 1.0);
        assert_eq!(d.values.iter().sum::<f32>(), 1.0);
    }

    #[test]
    fn lbp_isolated_peak_and_pit() {
        #[rustfmt::skip]
        let pit = from_gray(3, 3, &[
            9, 9, 9,
            9, 1, 9,
            9, 9, 9,
        ]);
        assert_eq!(lbp_descriptor(&pit).unwrap().values[8], 1.0);
        #[rustfmt::skip]
        let peak = from_gray(3, 3, &[
            1, 1, 1,
            1, 9, 1,
            1, 1, 1,
        ]);
        assert_eq!(lbp_descriptor(&peak).unwrap().values[0], 1.0);
    }

    #[test]
    fn lbp_rejects_small_images() {
        assert!(lbp_descriptor(&uniform(2, 5, [0; 3])).is_err());
    }

    #[test]
    fn glcm_constant_image() {
        let d = glcm_descriptor(&uniform(4, 4, [90; 3]), 32);
        assert_eq!(d.values, [0.0, 1.0, 1.0, 1.0].repeat(4));
    }

    #[test]
    fn glcm_two_pixel_contrast() {
        let d = glcm_descriptor(&from_gray(1, 2, &[0, 255]), 32);
        assert_eq!(d.values[0], 961.0);
        assert_eq!(d.values[2], 0.5);
        assert_eq!(d.values[3], 0.5 / 32.0 * 2.0);
        // Remaining offsets have no pairs in a single row.
        assert_eq!(&d.values[4..], &[0.0, 1.0, 1.0, 1.0].repeat(3)[..]);
    }

    #[test]
    fn glcm_correlation_of_anti_diagonal() {
        // Levels 0 and 31 always paired with each other: perfect
        // anti-correlation.
        let d = glcm_descriptor(&from_gray(1, 2, &[0, 255]), 32);
        assert!((d.values[1] + 1.0).abs() < 1e-6);
    }

    #[test]
    fn config_validation() {
        assert!(BaselineConfig::default().validate().is_ok());
        let bad = BaselineConfig {
            color_bins: 30,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }
}
