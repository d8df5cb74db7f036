//! Per-frame detection metrics in the classic 2D style: confusion counts
//! from IoU match results, precision/recall, and all-points interpolated
//! average precision. Computed alongside the comprehension metrics so the
//! two regimes can be compared on the same run.

use serde::{Deserialize, Serialize};

use super::ConfusionCounts;
use crate::matching::FrameMatchResult;

/// One point of the precision-recall curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PRPoint {
    pub threshold: f64,
    pub precision: f64,
    pub recall: f64,
}

/// Aggregate per-frame detection counts: tp = matched pairs, fp = unmatched
/// predictions, fn = unmatched visible labelled objects. tn stays 0 in this
/// regime.
pub fn confusion_detection(frames: &[FrameMatchResult]) -> ConfusionCounts {
    let mut counts = ConfusionCounts::default();
    for f in frames {
        counts.tp += f.pairs.len() as u64;
        counts.fp += f.unmatched_predictions.len() as u64;
        counts.fn_ += f.unmatched_objects.len() as u64;
    }
    counts
}

/// Precision and recall with the zero-denominator convention: no
/// predictions (or no objects) means no mistakes, so the respective value
/// defaults to `empty_value` (1.0 in the standard configuration).
pub fn precision_recall_with(counts: &ConfusionCounts, empty_value: f64) -> (f64, f64) {
    let precision = if counts.tp + counts.fp == 0 {
        empty_value
    } else {
        counts.tp as f64 / (counts.tp + counts.fp) as f64
    };
    let recall = if counts.tp + counts.fn_ == 0 {
        empty_value
    } else {
        counts.tp as f64 / (counts.tp + counts.fn_) as f64
    };
    (precision, recall)
}

pub fn precision_recall(counts: &ConfusionCounts) -> (f64, f64) {
    precision_recall_with(counts, 1.0)
}

/// A prediction with its confidence and whether it matched ground truth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankedPrediction {
    pub confidence: f64,
    pub is_tp: bool,
}

/// Precision/recall points swept over every distinct confidence value,
/// highest threshold first. Ties in confidence are processed as one group.
pub fn pr_curve(predictions: &[RankedPrediction], n_positive: u64) -> Vec<PRPoint> {
    let mut order: Vec<usize> = (0..predictions.len()).collect();
    // Stable sort keeps input order for equal confidences.
    order.sort_by(|&a, &b| {
        predictions[b]
            .confidence
            .partial_cmp(&predictions[a].confidence)
            .unwrap()
    });
    let mut points = Vec::new();
    let (mut tp, mut fp) = (0u64, 0u64);
    for (rank, &i) in order.iter().enumerate() {
        if predictions[i].is_tp {
            tp += 1;
        } else {
            fp += 1;
        }
        let last_of_group = match order.get(rank + 1) {
            Some(&next) => predictions[next].confidence != predictions[i].confidence,
            None => true,
        };
        if last_of_group {
            points.push(PRPoint {
                threshold: predictions[i].confidence,
                precision: tp as f64 / (tp + fp) as f64,
                recall: if n_positive == 0 { 1.0 } else { tp as f64 / n_positive as f64 },
            });
        }
    }
    points
}

/// All-points interpolated average precision: the precision envelope is
/// made non-increasing and integrated over recall. Returns 1.0 when there
/// are no positives to find (vacuous), 0.0 when positives exist but no
/// prediction was made.
pub fn average_precision(predictions: &[RankedPrediction], n_positive: u64) -> f64 {
    if n_positive == 0 {
        return 1.0;
    }
    if predictions.is_empty() {
        return 0.0;
    }
    let points = pr_curve(predictions, n_positive);
    // Non-increasing precision envelope, built right to left.
    let mut envelope = vec![0.0f64; points.len()];
    let mut running = 0.0f64;
    for (i, p) in points.iter().enumerate().rev() {
        running = running.max(p.precision);
        envelope[i] = running;
    }
    let mut ap = 0.0;
    let mut prev_recall = 0.0;
    for (i, p) in points.iter().enumerate() {
        ap += (p.recall - prev_recall) * envelope[i];
        prev_recall = p.recall;
    }
    ap
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::MatchPair;
    use proptest::prelude::*;

    #[test]
    fn perfect_frame_has_no_errors() {
        let frame = FrameMatchResult {
            t: 0.0,
            pairs: vec![MatchPair { prediction_index: 0, object_id: "a".into(), score: 0.0 }],
            unmatched_predictions: vec![],
            unmatched_objects: vec![],
        };
        let c = confusion_detection(&[frame]);
        assert_eq!((c.tp, c.fp, c.fn_, c.tn), (1, 0, 0, 0));
    }

    #[test]
    fn empty_predictions_count_as_misses() {
        let frame = FrameMatchResult {
            t: 0.0,
            pairs: vec![],
            unmatched_predictions: vec![],
            unmatched_objects: vec!["a".into(), "b".into(), "c".into()],
        };
        let c = confusion_detection(&[frame]);
        assert_eq!((c.tp, c.fn_), (0, 3));
    }

    #[test]
    fn precision_recall_values() {
        let c = ConfusionCounts { tp: 5, fp: 0, fn_: 0, tn: 0 };
        assert_eq!(precision_recall(&c), (1.0, 1.0));
        let zero = ConfusionCounts::default();
        assert_eq!(precision_recall(&zero), (1.0, 1.0));
        assert_eq!(precision_recall_with(&zero, 0.0), (0.0, 0.0));
        let c = ConfusionCounts { tp: 3, fp: 1, fn_: 2, tn: 0 };
        assert_eq!(precision_recall(&c), (0.75, 0.6));
    }

    #[test]
    fn ap_perfect_and_worst_cases() {
        let all_tp: Vec<RankedPrediction> = (0..5)
            .map(|i| RankedPrediction { confidence: 1.0 - i as f64 * 0.1, is_tp: true })
            .collect();
        assert_eq!(average_precision(&all_tp, 5), 1.0);
        let all_fp: Vec<RankedPrediction> = (0..5)
            .map(|i| RankedPrediction { confidence: 1.0 - i as f64 * 0.1, is_tp: false })
            .collect();
        assert_eq!(average_precision(&all_fp, 3), 0.0);
        assert_eq!(average_precision(&[], 3), 0.0);
    }

    /// Independent oracle: enumerate every distinct threshold, recount
    /// tp/fp from scratch by filtering, build the envelope numerically,
    /// and integrate over recall.
    pub(crate) fn ap_brute_force(predictions: &[RankedPrediction], n_positive: u64) -> f64 {
        if n_positive == 0 {
            return 1.0;
        }
        if predictions.is_empty() {
            return 0.0;
        }
        let mut thresholds: Vec<f64> = predictions.iter().map(|p| p.confidence).collect();
        thresholds.sort_by(|a, b| b.partial_cmp(a).unwrap());
        thresholds.dedup();
        let mut points: Vec<(f64, f64)> = Vec::new();
        for tau in thresholds {
            let kept: Vec<&RankedPrediction> =
                predictions.iter().filter(|p| p.confidence >= tau).collect();
            let tp = kept.iter().filter(|p| p.is_tp).count() as f64;
            let fp = kept.len() as f64 - tp;
            points.push((tp / n_positive as f64, tp / (tp + fp)));
        }
        points.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut ap = 0.0;
        let mut prev_recall = 0.0;
        for i in 0..points.len() {
            let envelope = points[i..]
                .iter()
                .map(|p| p.1)
                .fold(f64::MIN, f64::max);
            ap += (points[i].0 - prev_recall) * envelope;
            prev_recall = points[i].0;
        }
        ap
    }

    proptest! {
        #[test]
        fn ap_matches_exhaustive_threshold_oracle(
            flags in proptest::collection::vec(any::<bool>(), 1..20),
            confs in proptest::collection::vec(0.0f64..1.0, 20),
            extra_pos in 0u64..5,
        ) {
            let preds: Vec<RankedPrediction> = flags.iter().zip(&confs)
                .map(|(&is_tp, &confidence)| RankedPrediction { confidence, is_tp })
                .collect();
            let n_pos = preds.iter().filter(|p| p.is_tp).count() as u64 + extra_pos;
            prop_assume!(n_pos > 0);
            let got = average_precision(&preds, n_pos);
            let want = ap_brute_force(&preds, n_pos);
            prop_assert!((got - want).abs() < 1e-9, "got {got}, oracle {want}");
            prop_assert!((0.0..=1.0).contains(&got));
        }

        #[test]
        fn ap_depends_only_on_ranking(
            flags in proptest::collection::vec(any::<bool>(), 1..15),
        ) {
            // Distinct confidences, then a strictly monotone transform.
            let preds: Vec<RankedPrediction> = flags.iter().enumerate()
                .map(|(i, &is_tp)| RankedPrediction { confidence: 0.9 - i as f64 * 0.05, is_tp })
                .collect();
            let transformed: Vec<RankedPrediction> = preds.iter()
                .map(|p| RankedPrediction { confidence: (p.confidence * 3.0).tanh(), is_tp: p.is_tp })
                .collect();
            let n_pos = preds.iter().filter(|p| p.is_tp).count() as u64;
            prop_assume!(n_pos > 0);
            prop_assert_eq!(
                average_precision(&preds, n_pos),
                average_precision(&transformed, n_pos)
            );
        }
    }
}
