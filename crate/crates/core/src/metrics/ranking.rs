//! Ranking quality measures.
//!
//! Every measure here depends only on the relevance pattern of a ranking
//! (which ranks hold relevant items) and on `ng`, the number of relevant
//! items for the query. Relevant items missing from a ranking count as never
//! retrieved.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::scheme::Scheme;

/// Candidates ordered by ascending distance, ties broken by ascending id.
#[derive(Clone, Debug, PartialEq)]
pub struct RankedList {
    items: Vec<(String, f64)>,
}

impl RankedList {
    /// Sorts `(image_id, distance)` pairs into rank order.
    pub fn from_distances(mut items: Vec<(String, f64)>) -> Self {
        items.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
        RankedList { items }
    }

    pub fn items(&self) -> &[(String, f64)] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> + '_ {
        self.items.iter().map(|(id, _)| id.as_str())
    }

    /// 1-based rank of `id`, if present.
    pub fn rank_of(&self, id: &str) -> Option<usize> {
        self.items.iter().position(|(i, _)| i == id).map(|p| p + 1)
    }

    pub fn relevance(&self, relevant: &HashSet<String>) -> Vec<bool> {
        self.items
            .iter()
            .map(|(id, _)| relevant.contains(id))
            .collect()
    }

    pub fn truncate(&mut self, len: usize) {
        self.items.truncate(len);
    }
}

/// Fraction of the first `k` positions holding relevant items. A list
/// shorter than `k` still divides by `k`.
pub fn precision_at_k(relevance: &[bool], k: usize) -> f64 {
    assert!(k >= 1, "k must be at least 1");
    let hits = relevance.iter().take(k).filter(|&&r| r).count();
    hits as f64 / k as f64
}

/// Mean of the precision at each relevant item's rank, divided by `ng`.
pub fn average_precision(relevance: &[bool], ng: usize) -> f64 {
    assert!(ng >= 1, "a query needs at least one relevant item");
    let mut hits = 0usize;
    let mut sum = 0.0;
    for (i, &rel) in relevance.iter().enumerate() {
        if rel {
            hits += 1;
            sum += hits as f64 / (i + 1) as f64;
        }
    }
    sum / ng as f64
}

/// How many ranks count toward ANMRR before the over-rank penalty applies.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum RetrievalWindow {
    /// `K = min(4·NG, 2·GTM)`, the MPEG-7 convention.
    #[default]
    Mpeg7,
    /// `K = 2·NG`.
    TwiceGroundTruth,
}

impl RetrievalWindow {
    pub fn window(self, ng: usize, gtm: usize) -> usize {
        match self {
            RetrievalWindow::Mpeg7 => (4 * ng).min(2 * gtm),
            RetrievalWindow::TwiceGroundTruth => 2 * ng,
        }
    }
}

/// Normalized modified retrieval rank of one query with window `k`.
///
/// Relevant items ranked beyond `k` (or absent) are charged rank `1.25 k`.
/// Result is 0 when all relevant items fill the top `ng` ranks and 1 when
/// none is within the window.
pub fn nmrr(relevance: &[bool], ng: usize, k: usize) -> f64 {
    assert!(ng >= 1, "a query needs at least one relevant item");
    let penalty = 1.25 * k as f64;
    let mut found = 0usize;
    let mut rank_sum = 0.0;
    for (i, &rel) in relevance.iter().enumerate() {
        if rel {
            let rank = i + 1;
            rank_sum += if rank <= k { rank as f64 } else { penalty };
            found += 1;
        }
    }
    rank_sum += (ng - found) as f64 * penalty;
    let ngf = ng as f64;
    let avr = rank_sum / ngf;
    let mrr = avr - 0.5 - ngf / 2.0;
    let denom = penalty - 0.5 - 0.5 * ngf;
    assert!(
        denom > 0.0,
        "degenerate NMRR denominator for ng={ng}, k={k}"
    );
    mrr / denom
}

pub const PR_POINTS: usize = 11;

/// Interpolated precision at recall 0.0, 0.1, ..., 1.0: the best precision
/// reached at any recall at or above each level, 0 if that recall is never
/// reached.
pub fn interpolated_pr(relevance: &[bool], ng: usize) -> [f64; PR_POINTS] {
    assert!(ng >= 1, "a query needs at least one relevant item");
    // best[h] = max precision over ranks where exactly h relevant items
    // have been seen.
    let mut best = vec![0.0f64; ng + 1];
    let mut hits = 0usize;
    for (i, &rel) in relevance.iter().enumerate() {
        if rel {
            hits += 1;
        }
        let p = hits as f64 / (i + 1) as f64;
        if p > best[hits] {
            best[hits] = p;
        }
    }
    // Suffix max so best[h] covers all recalls >= h / ng.
    for h in (0..ng).rev() {
        best[h] = best[h].max(best[h + 1]);
    }
    let mut out = [0.0; PR_POINTS];
    for (level, slot) in out.iter_mut().enumerate() {
        // smallest h with h / ng >= level / 10
        let h = (level * ng).div_ceil(10);
        *slot = best[h];
    }
    out
}

pub fn recall_levels() -> [f64; PR_POINTS] {
    std::array::from_fn(|i| i as f64 / 10.0)
}

/// Relevant sets for a batch of queries.
#[derive(Clone, Debug, Default)]
pub struct GroundTruth {
    relevant: BTreeMap<String, HashSet<String>>,
}

impl GroundTruth {
    /// Inserts the relevant set of `query`; the query is always added to its
    /// own set.
    pub fn insert(&mut self, query: impl Into<String>, relevant: impl IntoIterator<Item = String>) {
        let query = query.into();
        let mut set: HashSet<String> = relevant.into_iter().collect();
        set.insert(query.clone());
        self.relevant.insert(query, set);
    }

    /// Single-label relevance: items sharing a class label are relevant to
    /// each other.
    pub fn from_class_labels<'a>(labels: impl IntoIterator<Item = (&'a str, &'a str)>) -> Self {
        let mut by_class: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        let labels: Vec<_> = labels.into_iter().collect();
        for &(id, class) in &labels {
            by_class.entry(class).or_default().push(id);
        }
        let mut gt = GroundTruth::default();
        for &(id, class) in &labels {
            gt.insert(id, by_class[class].iter().map(|s| s.to_string()));
        }
        gt
    }

    pub fn relevant(&self, query: &str) -> Option<&HashSet<String>> {
        self.relevant.get(query)
    }

    pub fn ng(&self, query: &str) -> Option<usize> {
        self.relevant.get(query).map(HashSet::len)
    }

    /// Largest relevant-set size over all queries.
    pub fn gtm(&self) -> usize {
        self.relevant.values().map(HashSet::len).max().unwrap_or(0)
    }

    pub fn queries(&self) -> impl Iterator<Item = &str> + '_ {
        self.relevant.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.relevant.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relevant.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub scheme: Scheme,
    pub anmrr: f64,
    pub map: f64,
    pub p_at: BTreeMap<usize, f64>,
    /// `(recall, precision)` at recall 0.0, 0.1, ..., 1.0.
    pub pr_curve: Vec<(f64, f64)>,
    pub num_queries: usize,
}

/// Per-query measures, kept so averages can be formed in a fixed order.
#[derive(Clone, Debug, PartialEq)]
pub struct QueryMetrics {
    pub average_precision: f64,
    pub nmrr: f64,
    pub precision_at: Vec<f64>,
    pub pr: [f64; PR_POINTS],
}

pub fn query_metrics(
    relevance: &[bool],
    ng: usize,
    gtm: usize,
    k_list: &[usize],
    window: RetrievalWindow,
) -> QueryMetrics {
    QueryMetrics {
        average_precision: average_precision(relevance, ng),
        nmrr: nmrr(relevance, ng, window.window(ng, gtm)),
        precision_at: k_list
            .iter()
            .map(|&k| precision_at_k(relevance, k))
            .collect(),
        pr: interpolated_pr(relevance, ng),
    }
}

/// Averages per-query measures, in the given order.
pub fn aggregate(scheme: Scheme, k_list: &[usize], per_query: &[QueryMetrics]) -> MetricsReport {
    let n = per_query.len() as f64;
    let mean = |f: &dyn Fn(&QueryMetrics) -> f64| per_query.iter().map(f).sum::<f64>() / n;
    let levels = recall_levels();
    MetricsReport {
        scheme,
        anmrr: mean(&|q| q.nmrr),
        map: mean(&|q| q.average_precision),
        p_at: k_list
            .iter()
            .enumerate()
            .map(|(i, &k)| (k, mean(&|q| q.precision_at[i])))
            .collect(),
        pr_curve: (0..PR_POINTS)
            .map(|i| (levels[i], mean(&|q| q.pr[i])))
            .collect(),
        num_queries: per_query.len(),
    }
}

/// Scores a batch of rankings against ground truth. Rankings are keyed by
/// query id; every query in `rankings` must appear in `gt`.
pub fn evaluate_rankings(
    scheme: Scheme,
    rankings: &BTreeMap<String, RankedList>,
    gt: &GroundTruth,
    k_list: &[usize],
    window: RetrievalWindow,
) -> MetricsReport {
    let gtm = gt.gtm();
    let per_query: Vec<QueryMetrics> = rankings
        .iter()
        .map(|(q, ranked)| {
            let relevant = gt
                .relevant(q)
                .unwrap_or_else(|| panic!("query {q} has no ground truth"));
            query_metrics(
                &ranked.relevance(relevant),
                relevant.len(),
                gtm,
                k_list,
                window,
            )
        })
        .collect();
    aggregate(scheme, k_list, &per_query)
}

/// Mean NMRR over the rankings.
pub fn anmrr(
    rankings: &BTreeMap<String, RankedList>,
    gt: &GroundTruth,
    window: RetrievalWindow,
) -> f64 {
    evaluate_rankings(Scheme::Recnn, rankings, gt, &[], window).anmrr
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(bits: &[u8]) -> Vec<bool> {
        bits.iter().map(|&b| b == 1).collect()
    }

    #[test]
    fn precision_examples() {
        assert_eq!(precision_at_k(&rel(&[1, 1, 0, 1, 0]), 5), 0.6);
        assert_eq!(precision_at_k(&rel(&[1, 1, 1]), 3), 1.0);
        assert_eq!(precision_at_k(&rel(&[0, 0, 1]), 2), 0.0);
        assert_eq!(precision_at_k(&rel(&[1, 1]), 4), 0.5);
    }

    #[test]
    fn average_precision_examples() {
        let ap = average_precision(&rel(&[1, 0, 1]), 2);
        assert!((ap - (1.0 + 2.0 / 3.0) / 2.0).abs() < 1e-12);
        assert_eq!(average_precision(&rel(&[1, 1, 0, 0]), 2), 1.0);
        assert_eq!(average_precision(&rel(&[0, 0, 0, 1]), 1), 0.25);
    }

    #[test]
    fn nmrr_examples() {
        assert_eq!(nmrr(&rel(&[1, 1, 0, 0]), 2, 4), 0.0);
        assert_eq!(nmrr(&rel(&[0, 0, 0, 0, 1, 1]), 2, 4), 1.0);
        assert_eq!(nmrr(&rel(&[0, 0, 0, 0]), 2, 4), 1.0);
        assert_eq!(RetrievalWindow::Mpeg7.window(2, 2), 4);
        assert_eq!(RetrievalWindow::Mpeg7.window(10, 12), 24);
        assert_eq!(RetrievalWindow::TwiceGroundTruth.window(3, 12), 6);
    }

    #[test]
    fn interpolated_pr_examples() {
        assert_eq!(interpolated_pr(&rel(&[1, 1, 0]), 2), [1.0; 11]);
        let pr = interpolated_pr(&rel(&[1, 0, 1]), 2);
        for (i, p) in pr.iter().enumerate() {
            let expected = if i <= 5 { 1.0 } else { 2.0 / 3.0 };
            assert!((p - expected).abs() < 1e-12, "level {i}: {p}");
        }
        // Recall 1 never reached.
        let pr = interpolated_pr(&rel(&[1, 0]), 2);
        assert_eq!(pr[10], 0.0);
        assert_eq!(pr[5], 1.0);
    }

    #[test]
    fn ranked_list_tie_break() {
        let list = RankedList::from_distances(vec![
            ("b".into(), 1.0),
            ("c".into(), 0.0),
            ("a".into(), 1.0),
        ]);
        assert_eq!(list.ids().collect::<Vec<_>>(), ["c", "a", "b"]);
        assert_eq!(list.rank_of("b"), Some(3));
    }

    #[test]
    fn ground_truth_from_labels() {
        let gt = GroundTruth::from_class_labels([("a", "x"), ("b", "x"), ("c", "y")]);
        assert_eq!(gt.ng("a"), Some(2));
        assert_eq!(gt.ng("c"), Some(1));
        assert_eq!(gt.gtm(), 2);
        assert!(gt.relevant("c").unwrap().contains("c"));
    }
}
