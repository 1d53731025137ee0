use std::collections::BTreeMap;

use proptest::prelude::*;
use recnn::baselines::{
    color_histogram, glcm_descriptor, lbp_descriptor, stats_descriptor, BaselineConfig,
};
use recnn::dataio::{
    decode_image, decode_labelmap, derive_multilabels, encode_image, encode_labelmap, read_fmap,
    write_fmap, FeatureMap, LabelMap, RasterImage,
};
use recnn::descriptor::DescriptorMatrix;
use recnn::metrics::{
    average_precision, interpolated_pr, nmrr, precision_at_k, seg_metrics, RetrievalWindow,
};
use recnn::retrieval::{decode_index, encode_index, IndexEntry, IndexedRegions, RetrievalIndex};
use recnn::tensor::{bilinear_upsample, flatten_local_features, relu};
use recnn::Scheme;

fn feature_map(max_side: usize, max_c: usize) -> impl Strategy<Value = FeatureMap> {
    (1..=max_side, 1..=max_side, 1..=max_c).prop_flat_map(|(h, w, c)| {
        proptest::collection::vec(-10.0f32..10.0, h * w * c)
            .prop_map(move |v| FeatureMap::new(h, w, c, v).unwrap())
    })
}

fn raster(min: usize, max: usize) -> impl Strategy<Value = RasterImage> {
    (min..=max, min..=max).prop_flat_map(|(h, w)| {
        proptest::collection::vec(any::<u8>(), h * w * 3)
            .prop_map(move |v| RasterImage::new(h, w, v).unwrap())
    })
}

fn rotate90(img: &RasterImage) -> RasterImage {
    let (h, w) = (img.height(), img.width());
    let mut px = Vec::with_capacity(h * w * 3);
    // New image is w x h; new (r, c) = old (h - 1 - c, r).
    for r in 0..w {
        for c in 0..h {
            px.extend_from_slice(&img.pixel(h - 1 - c, r));
        }
    }
    RasterImage::new(w, h, px).unwrap()
}

proptest! {
    #[test]
    fn relu_is_idempotent_and_nonnegative(map in feature_map(6, 4)) {
        let once = relu(&map);
        prop_assert!(once.values().iter().all(|&v| v >= 0.0));
        prop_assert_eq!(relu(&once), once);
    }

    #[test]
    fn upsample_stays_within_input_range(map in feature_map(5, 3), dh in 0usize..9, dw in 0usize..9) {
        let out = bilinear_upsample(&map, map.height() + dh, map.width() + dw).unwrap();
        let lo = map.values().iter().cloned().fold(f32::INFINITY, f32::min);
        let hi = map.values().iter().cloned().fold(f32::NEG_INFINITY, f32::max);
        prop_assert!(out.values().iter().all(|&v| v >= lo && v <= hi));
    }

    #[test]
    fn upsample_channels_are_independent(map in feature_map(4, 3), dh in 0usize..5, dw in 0usize..5) {
        let (h, w, c) = (map.height(), map.width(), map.channels());
        let out = bilinear_upsample(&map, h + dh, w + dw).unwrap();
        for k in 0..c {
            let single: Vec<f32> = map.values().iter().skip(k).step_by(c).cloned().collect();
            let single = bilinear_upsample(&FeatureMap::new(h, w, 1, single).unwrap(), h + dh, w + dw).unwrap();
            let picked: Vec<f32> = out.values().iter().skip(k).step_by(c).cloned().collect();
            prop_assert_eq!(single.values(), picked.as_slice());
        }
    }

    #[test]
    fn flatten_is_lossless_and_max_matches(map in feature_map(6, 4)) {
        let f = flatten_local_features(map.clone());
        prop_assert_eq!(f.len(), map.height() * map.width());
        for i in 0..f.len() {
            let (r, c) = f.coord_of(i);
            prop_assert_eq!(f.index_of(r, c), i);
            prop_assert_eq!(f.column(i), map.pixel(r, c));
        }
        prop_assert_eq!(f.to_feature_map(), map.clone());
        for k in 0..map.channels() {
            let by_channel = map.values().iter().skip(k).step_by(map.channels()).cloned().fold(f32::NEG_INFINITY, f32::max);
            let by_column = f.columns().map(|col| col[k]).fold(f32::NEG_INFINITY, f32::max);
            prop_assert_eq!(by_channel, by_column);
        }
    }

    #[test]
    fn netpbm_and_fmap_round_trip(img in raster(1, 6), map in feature_map(5, 4), labels in proptest::collection::vec(prop_oneof![0u8..17, Just(255u8)], 12)) {
        let bytes = encode_image(&img);
        prop_assert_eq!(decode_image(&bytes).unwrap(), img);
        prop_assert_eq!(encode_image(&decode_image(&bytes).unwrap()), bytes);

        let lm = LabelMap::new(3, 4, labels, 17).unwrap();
        let bytes = encode_labelmap(&lm);
        prop_assert_eq!(decode_labelmap(&bytes, 17).unwrap(), lm);

        let bytes = write_fmap(&map);
        prop_assert_eq!(bytes.len(), 16 + 4 * map.values().len());
        prop_assert_eq!(write_fmap(&read_fmap(&bytes).unwrap()), bytes);
    }

    #[test]
    fn multilabels_shrink_as_threshold_grows(labels in proptest::collection::vec(0u8..5, 1..40), t in 1usize..6) {
        let map = LabelMap::new(1, labels.len(), labels, 17).unwrap();
        let lo = derive_multilabels(&map, t).unwrap();
        let hi = derive_multilabels(&map, t + 1).unwrap();
        prop_assert!(hi.is_subset(&lo));
    }

    #[test]
    fn histograms_are_normalized(img in raster(3, 8)) {
        let color = color_histogram(&img, 32);
        prop_assert_eq!(color.values.len(), 96);
        prop_assert!(color.values.iter().all(|&v| v >= 0.0));
        for ch in 0..3 {
            let s: f32 = color.values[ch * 32..(ch + 1) * 32].iter().sum();
            prop_assert!((s - 1.0).abs() < 1e-5);
        }
        let lbp = lbp_descriptor(&img).unwrap();
        prop_assert_eq!(lbp.values.len(), 10);
        prop_assert!((lbp.values.iter().sum::<f32>() - 1.0).abs() < 1e-5);
        prop_assert_eq!(stats_descriptor(&img).values.len(), 6);
    }

    #[test]
    fn glcm_energy_in_unit_interval(img in raster(1, 8)) {
        let g = glcm_descriptor(&img, 32);
        prop_assert_eq!(g.values.len(), 16);
        for o in 0..4 {
            let (contrast, corr, energy, homog) = (g.values[4 * o], g.values[4 * o + 1], g.values[4 * o + 2], g.values[4 * o + 3]);
            prop_assert!(energy > 0.0 && energy <= 1.0);
            prop_assert!(homog > 0.0 && homog <= 1.0);
            prop_assert!(contrast >= 0.0);
            prop_assert!((-1.0 - 1e-5..=1.0 + 1e-5).contains(&corr));
        }
        prop_assert_eq!(glcm_descriptor(&img, 32), g);
    }

    #[test]
    fn lbp_is_invariant_to_quarter_turns(img in raster(3, 8)) {
        let base = lbp_descriptor(&img).unwrap();
        let rotated = rotate90(&img);
        prop_assert_eq!(lbp_descriptor(&rotated).unwrap().values, base.values.clone());
        prop_assert_eq!(lbp_descriptor(&rotate90(&rotate90(&rotated))).unwrap().values, base.values);
    }

    #[test]
    fn ranking_metrics_in_unit_interval(bits in proptest::collection::vec(any::<bool>(), 1..30), extra_missing in 0usize..4) {
        let found = bits.iter().filter(|&&b| b).count();
        let ng = found + extra_missing;
        prop_assume!(ng >= 1);
        let gtm = ng + 3;
        let ap = average_precision(&bits, ng);
        let nm = nmrr(&bits, ng, RetrievalWindow::Mpeg7.window(ng, gtm));
        prop_assert!((0.0..=1.0).contains(&ap));
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&nm));
        for k in [1, 5, 10] {
            prop_assert!((0.0..=1.0).contains(&precision_at_k(&bits, k)));
        }
        let pr = interpolated_pr(&bits, ng);
        prop_assert!(pr.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(pr.iter().all(|p| (0.0..=1.0).contains(p)));

        // NMRR is zero exactly when the relevant items fill the top ng ranks.
        let top_filled = bits.len() >= ng && bits[..ng].iter().all(|&b| b);
        prop_assert_eq!(nm == 0.0, top_filled);
    }

    #[test]
    fn seg_metrics_ignore_class_permutation(pairs in proptest::collection::vec((0u8..4, 0u8..4), 1..50)) {
        let gt: Vec<u8> = pairs.iter().map(|p| p.0).collect();
        let pred: Vec<u8> = pairs.iter().map(|p| p.1).collect();
        let perm = [3u8, 0, 2, 1];
        let n = gt.len();
        let a = seg_metrics(&LabelMap::new(1, n, pred.clone(), 17).unwrap(), &LabelMap::new(1, n, gt.clone(), 17).unwrap()).unwrap();
        let pgt: Vec<u8> = gt.iter().map(|&c| perm[c as usize]).collect();
        let ppred: Vec<u8> = pred.iter().map(|&c| perm[c as usize]).collect();
        let b = seg_metrics(&LabelMap::new(1, n, ppred, 17).unwrap(), &LabelMap::new(1, n, pgt, 17).unwrap()).unwrap();
        prop_assert!((a.pixel_acc - b.pixel_acc).abs() < 1e-12);
        prop_assert!((a.mean_acc - b.mean_acc).abs() < 1e-12);
        prop_assert!((a.mean_iu - b.mean_iu).abs() < 1e-12);
        for v in [a.pixel_acc, a.mean_acc, a.mean_iu] {
            prop_assert!((0.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn rix_round_trip(
        n in 1usize..5,
        dim in 1usize..4,
        vals in proptest::collection::vec(-4.0f32..4.0, 64),
        labels in proptest::collection::vec(0u8..32, 0..5),
        with_lbp in any::<bool>(),
    ) {
        let v = |i: usize| vals[i % vals.len()];
        let entries: Vec<IndexEntry> = (0..n).map(|i| {
            let regions = 1 + i % 3;
            let rows: Vec<Vec<f32>> = (0..regions).map(|r| (0..dim).map(|k| v(i * 7 + r * 3 + k)).collect()).collect();
            let mut baselines = BTreeMap::from([(Scheme::Stats, vec![v(i), v(i + 1)])]);
            if with_lbp {
                baselines.insert(Scheme::Lbp, vec![v(i + 2); 10]);
            }
            IndexEntry {
                image_id: format!("id-{i}"),
                class_label: format!("class {}", i % 2),
                multi_labels: labels.iter().copied().collect(),
                recnn: IndexedRegions {
                    class_ids: (0..regions as u8).collect(),
                    pixel_counts: (1..=regions as u32).collect(),
                    descriptors: DescriptorMatrix::from_rows(dim, &rows).unwrap(),
                },
                recnn_plus: (0..dim).map(|k| v(i + k)).collect(),
                baselines,
            }
        }).collect();
        let idx = RetrievalIndex::new(entries, None).unwrap();
        let bytes = encode_index(&idx).unwrap();
        let back = decode_index(&bytes).unwrap();
        prop_assert_eq!(&back, &idx);
        prop_assert_eq!(encode_index(&back).unwrap(), bytes);
    }
}

#[test]
fn baselines_are_deterministic() {
    let img = RasterImage::new(4, 5, (0..60).map(|i| (i * 37 % 256) as u8).collect()).unwrap();
    let cfg = BaselineConfig::default();
    for scheme in Scheme::BASELINES {
        let a = recnn::baselines::baseline_descriptor(&img, scheme, &cfg).unwrap();
        let b = recnn::baselines::baseline_descriptor(&img.clone(), scheme, &cfg).unwrap();
        assert_eq!(a, b);
    }
}
