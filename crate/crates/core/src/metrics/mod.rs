//! Retrieval and segmentation evaluation.

mod ranking;
mod segmentation;

pub use ranking::{
    aggregate, anmrr, average_precision, evaluate_rankings, interpolated_pr, nmrr, precision_at_k,
    query_metrics, recall_levels, GroundTruth, MetricsReport, QueryMetrics, RankedList,
    RetrievalWindow, PR_POINTS,
};
pub use segmentation::{seg_metrics, ConfusionMatrix, SegmentationScores};

/// The precision cut-offs reported by default.
pub const DEFAULT_K_LIST: [usize; 4] = [5, 10, 20, 50];
