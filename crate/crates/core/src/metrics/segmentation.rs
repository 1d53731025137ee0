use crate::dataio::{LabelMap, IGNORE_LABEL};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SegmentationScores {
    pub pixel_acc: f64,
    pub mean_acc: f64,
    pub mean_iu: f64,
}

/// Confusion counts `n[i][j]`: ground-truth class `i` predicted as `j`.
/// Row and column 255 collect ignore-labelled predictions.
#[derive(Clone, Debug, PartialEq)]
pub struct ConfusionMatrix {
    counts: Vec<u64>,
}

const SIDE: usize = 256;

impl ConfusionMatrix {
    pub fn from_maps(pred: &LabelMap, gt: &LabelMap) -> Result<Self> {
        if pred.height() != gt.height() || pred.width() != gt.width() {
            return Err(Error::argument(format!(
                "prediction {}x{} and ground truth {}x{} differ in shape",
                pred.height(),
                pred.width(),
                gt.height(),
                gt.width()
            )));
        }
        let mut counts = vec![0u64; SIDE * SIDE];
        for (&g, &p) in gt.labels().iter().zip(pred.labels()) {
            if g != IGNORE_LABEL {
                counts[g as usize * SIDE + p as usize] += 1;
            }
        }
        Ok(ConfusionMatrix { counts })
    }

    /// Builds a matrix from a dense `k × k` table of counts.
    pub fn from_table(table: &[Vec<u64>]) -> Self {
        let mut counts = vec![0u64; SIDE * SIDE];
        for (i, row) in table.iter().enumerate() {
            for (j, &n) in row.iter().enumerate() {
                counts[i * SIDE + j] = n;
            }
        }
        ConfusionMatrix { counts }
    }

    pub fn get(&self, gt: u8, pred: u8) -> u64 {
        self.counts[gt as usize * SIDE + pred as usize]
    }

    /// Pixel accuracy, mean per-class accuracy and mean IU over the classes
    /// present in the ground truth.
    pub fn scores(&self) -> Result<SegmentationScores> {
        let mut total = 0u64;
        let mut correct = 0u64;
        let mut acc_sum = 0.0;
        let mut iu_sum = 0.0;
        let mut classes = 0usize;
        for i in 0..IGNORE_LABEL as usize {
            let row = &self.counts[i * SIDE..(i + 1) * SIDE];
            let t_i: u64 = row.iter().sum();
            if t_i == 0 {
                continue;
            }
            let n_ii = row[i];
            let predicted_i: u64 = (0..IGNORE_LABEL as usize)
                .map(|g| self.counts[g * SIDE + i])
                .sum();
            total += t_i;
            correct += n_ii;
            acc_sum += n_ii as f64 / t_i as f64;
            iu_sum += n_ii as f64 / (t_i + predicted_i - n_ii) as f64;
            classes += 1;
        }
        if total == 0 {
            return Err(Error::argument("ground truth has no labelled pixels"));
        }
        Ok(SegmentationScores {
            pixel_acc: correct as f64 / total as f64,
            mean_acc: acc_sum / classes as f64,
            mean_iu: iu_sum / classes as f64,
        })
    }
}

pub fn seg_metrics(pred: &LabelMap, gt: &LabelMap) -> Result<SegmentationScores> {
    ConfusionMatrix::from_maps(pred, gt)?.scores()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(v: &[u8]) -> LabelMap {
        LabelMap::new(1, v.len(), v.to_vec(), 17).unwrap()
    }

    #[test]
    fn perfect_prediction() {
        let m = map(&[0, 1, 1, 4, 255]);
        let s = seg_metrics(&m, &m).unwrap();
        assert_eq!((s.pixel_acc, s.mean_acc, s.mean_iu), (1.0, 1.0, 1.0));
    }

    #[test]
    fn two_class_confusion() {
        let s = ConfusionMatrix::from_table(&[vec![3, 1], vec![1, 3]])
            .scores()
            .unwrap();
        assert_eq!((s.pixel_acc, s.mean_acc, s.mean_iu), (0.75, 0.75, 0.6));

        let gt = map(&[0, 0, 0, 0, 1, 1, 1, 1]);
        let pred = map(&[0, 0, 0, 1, 1, 1, 1, 0]);
        assert_eq!(seg_metrics(&pred, &gt).unwrap(), s);
    }

    #[test]
    fn ignore_pixels_excluded() {
        let gt = map(&[0, 255, 255]);
        let pred = map(&[0, 1, 2]);
        let s = seg_metrics(&pred, &gt).unwrap();
        assert_eq!(s.pixel_acc, 1.0);
        assert_eq!(s.mean_iu, 1.0);
    }

    #[test]
    fn errors() {
        assert!(seg_metrics(&map(&[0, 1]), &map(&[255, 255])).is_err());
        assert!(seg_metrics(&map(&[0]), &map(&[0, 1])).is_err());
    }
}
