//! Comprehension-oriented metrics: OOS-aware confusion accounting,
//! detection latency against an acceptable-latency budget, latency-recall
//! curves, ambiguity-neutral scoring, distractor TN accounting, 3D
//! localization error statistics, and tracking continuity.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::ConfusionCounts;
use crate::geometry::VisibilityTimeline;
use crate::scenario::Label;

/// Evaluation knobs shared by the whole pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationConfig {
    /// Acceptable detection latency, seconds.
    pub adl: f64,
    /// 3D matching threshold, meters.
    pub tau_loc: f64,
    /// Consecutive matched-and-correct frames required for comprehension.
    pub persistence_frames: u32,
    /// Grid of latency budgets for the latency-recall curve, ascending.
    pub adl_grid: Vec<f64>,
    /// IoU threshold for the legacy 2D regime.
    pub iou_threshold: f64,
    /// Value of precision/recall when the denominator is zero.
    #[serde(default = "default_empty_value")]
    pub zero_denominator_value: f64,
}

fn default_empty_value() -> f64 {
    1.0
}

impl Default for EvaluationConfig {
    fn default() -> Self {
        EvaluationConfig {
            adl: 1.0,
            // Experimental convention, not a published constant.
            tau_loc: 0.25,
            persistence_frames: 1,
            adl_grid: vec![0.1, 0.25, 0.5, 1.0, 2.0, 4.0],
            iou_threshold: 0.5,
            zero_denominator_value: 1.0,
        }
    }
}

impl EvaluationConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.adl > 0.0) {
            return Err("adl must be > 0".into());
        }
        if !(self.tau_loc > 0.0) {
            return Err("tau_loc must be > 0".into());
        }
        if self.persistence_frames < 1 {
            return Err("persistence_frames must be >= 1".into());
        }
        if self.adl_grid.windows(2).any(|w| w[1] < w[0]) {
            return Err("adl_grid must be sorted ascending".into());
        }
        if !(self.iou_threshold > 0.0 && self.iou_threshold <= 1.0) {
            return Err("iou_threshold must be in (0, 1]".into());
        }
        Ok(())
    }
}

/// Classify prediction/truth label pairs with OOS as a first-class outcome:
/// tp = both known and equal; fp = predicted a known class that is wrong
/// (including on OOS ground truth); fn = predicted OOS on a known class;
/// tn = predicted OOS on OOS ground truth. The four cases partition every
/// event list.
pub fn oos_confusion(events: &[(Label, Label)]) -> ConfusionCounts {
    let mut counts = ConfusionCounts::default();
    for (predicted, truth) in events {
        match (predicted, truth) {
            (Label::Class(p), Label::Class(t)) if p == t => counts.tp += 1,
            (Label::Class(_), _) => counts.fp += 1,
            (Label::Oos, Label::Class(_)) => counts.fn_ += 1,
            (Label::Oos, Label::Oos) => counts.tn += 1,
        }
    }
    counts
}

/// What the matcher saw for one object at one visible frame.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameObs {
    pub frame_index: usize,
    pub t: f64,
    /// Present iff a prediction was matched to this object at this frame.
    pub matched: Option<MatchedPrediction>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchedPrediction {
    pub label: Label,
    pub track_id: String,
    pub distance: f64,
    pub correct_class: bool,
}

/// Per-object observation sequence over its visible frames, time-ordered.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectObservations {
    pub object_id: String,
    pub class_label: String,
    pub frames: Vec<FrameObs>,
}

/// Latency outcome for one in-scope object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectOutcome {
    pub object_id: String,
    /// When the object first entered the view; absent if never visible.
    pub entry_time: Option<f64>,
    /// When comprehension was first achieved (end of the first
    /// persistence-length run of matched-and-correct visible frames).
    pub comprehension_time: Option<f64>,
    /// comprehension_time - entry_time.
    pub latency: Option<f64>,
    /// Present iff the object was comprehended or had enough exposure for a
    /// verdict; absent for short-exposure objects with no comprehension.
    pub adl_compliant: Option<bool>,
    /// Visible span shorter than the latency budget, and never
    /// comprehended: excluded from the compliance denominator.
    pub excluded_short_exposure: bool,
    /// Total visible span, seconds.
    pub exposure: f64,
}

/// Per-object latency outcomes. Comprehension is a run of
/// `persistence_frames` consecutive visible frames (no visibility gap
/// inside the run) each matched with the correct class label; the run's
/// last frame time is the comprehension time. Entry time is the start of
/// the first visibility interval and is not reset by later re-entries.
pub fn detection_latency(
    observations: &[ObjectObservations],
    timeline: &VisibilityTimeline,
    config: &EvaluationConfig,
) -> Vec<ObjectOutcome> {
    observations
        .iter()
        .map(|obs| {
            let entry_time = timeline.entry_time(&obs.object_id);
            let exposure = timeline.exposure(&obs.object_id);
            let comprehension_time =
                first_comprehension(&obs.frames, config.persistence_frames as usize);
            let latency = match (entry_time, comprehension_time) {
                (Some(entry), Some(done)) => Some(done - entry),
                _ => None,
            };
            let excluded_short_exposure = latency.is_none() && exposure < config.adl;
            let adl_compliant = match latency {
                Some(l) => Some(l <= config.adl),
                None if exposure >= config.adl => Some(false),
                None => None,
            };
            ObjectOutcome {
                object_id: obs.object_id.clone(),
                entry_time,
                comprehension_time,
                latency,
                adl_compliant,
                excluded_short_exposure,
                exposure,
            }
        })
        .collect()
}

/// Time of the last frame of the first run of `persistence` consecutive
/// matched-and-correct frames. Runs break on visibility gaps (non-adjacent
/// frame indices).
fn first_comprehension(frames: &[FrameObs], persistence: usize) -> Option<f64> {
    let mut run = 0usize;
    let mut prev_index: Option<usize> = None;
    for f in frames {
        let contiguous = prev_index.map_or(true, |p| f.frame_index == p + 1);
        let hit = f.matched.as_ref().is_some_and(|m| m.correct_class);
        run = if hit {
            if contiguous { run + 1 } else { 1 }
        } else {
            0
        };
        if run >= persistence {
            return Some(f.t);
        }
        prev_index = Some(f.frame_index);
    }
    None
}

/// Fraction of objects comprehended within the latency budget, over the
/// objects that could have been (comprehended, or exposed at least `adl`).
/// 1.0 when the denominator is empty.
pub fn adl_compliance(outcomes: &[ObjectOutcome], adl: f64) -> f64 {
    let mut numerator = 0u64;
    let mut denominator = 0u64;
    for o in outcomes {
        let in_denominator = o.latency.is_some() || o.exposure >= adl;
        if in_denominator {
            denominator += 1;
            if o.latency.is_some_and(|l| l <= adl) {
                numerator += 1;
            }
        }
    }
    if denominator == 0 {
        1.0
    } else {
        numerator as f64 / denominator as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatencyRecallCurve {
    /// (latency budget, compliance) pairs over the configured grid.
    pub points: Vec<(f64, f64)>,
    /// Trapezoid area under the curve, normalized by the grid span.
    pub auc: f64,
}

pub fn latency_recall_curve(outcomes: &[ObjectOutcome], adl_grid: &[f64]) -> LatencyRecallCurve {
    let points: Vec<(f64, f64)> =
        adl_grid.iter().map(|&adl| (adl, adl_compliance(outcomes, adl))).collect();
    let auc = match points.len() {
        0 => 1.0,
        1 => points[0].1,
        _ => {
            let span = points.last().unwrap().0 - points[0].0;
            if span <= 0.0 {
                points[0].1
            } else {
                let mut area = 0.0;
                for w in points.windows(2) {
                    area += (w[1].0 - w[0].0) * (w[0].1 + w[1].1) / 2.0;
                }
                area / span
            }
        }
    };
    LatencyRecallCurve { points, auc }
}

/// A matched classification event with the ambiguity context it occurred
/// under (the ambiguity set active for the matched object at that time, if
/// any).
#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationEvent {
    pub t: f64,
    pub object_id: String,
    pub predicted: Label,
    pub truth: Label,
    pub ambiguity_set: Option<BTreeSet<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmbiguityAdjusted {
    pub counts: ConfusionCounts,
    /// Ambiguous-interval events excluded from the confusion counts.
    pub neutral_count: u64,
    /// OOS-or-withheld fraction among ambiguous-interval opportunities.
    pub honesty_rate: f64,
}

/// Score classification events with ambiguity neutrality: during an
/// object's ambiguity interval a prediction inside the ambiguity set is a
/// lucky guess and scores nothing, an OOS prediction is honest abstention
/// (also neutral), and a label outside the set is wrong from any viewpoint
/// and counts as a false positive. Events outside ambiguity intervals are
/// scored by the plain OOS confusion rules. `withheld_ambiguous` is the
/// number of ambiguous-interval visible frames with no matched prediction
/// at all; it feeds the honesty rate only.
pub fn ambiguity_adjusted_score(
    events: &[ClassificationEvent],
    withheld_ambiguous: u64,
) -> AmbiguityAdjusted {
    let mut counts = ConfusionCounts::default();
    let mut neutral_count = 0u64;
    let mut ambiguous_events = 0u64;
    let mut honest = 0u64;
    for e in events {
        match &e.ambiguity_set {
            Some(set) => {
                ambiguous_events += 1;
                match &e.predicted {
                    Label::Oos => {
                        neutral_count += 1;
                        honest += 1;
                    }
                    Label::Class(c) if set.contains(c) => neutral_count += 1,
                    Label::Class(_) => counts.fp += 1,
                }
            }
            None => {
                let single = oos_confusion(&[(e.predicted.clone(), e.truth.clone())]);
                counts.tp += single.tp;
                counts.fp += single.fp;
                counts.fn_ += single.fn_;
                counts.tn += single.tn;
            }
        }
    }
    let opportunities = ambiguous_events + withheld_ambiguous;
    let honesty_rate = if opportunities == 0 {
        1.0
    } else {
        (honest + withheld_ambiguous) as f64 / opportunities as f64
    };
    AmbiguityAdjusted { counts, neutral_count, honesty_rate }
}

/// One distractor object's fate over one evaluation window.
#[derive(Debug, Clone, PartialEq)]
pub struct DistractorWindowObs {
    pub object_id: String,
    pub window: [f64; 2],
    /// True iff some in-scope-labeled prediction matched this distractor
    /// inside the window.
    pub matched_in_scope: bool,
}

/// Detection-level OOS accounting: visible distractors that drew no
/// in-scope-labeled match are true negatives, those that did are false
/// positives; in-scope objects contribute tp (comprehended) and fn
/// (visible but never comprehended).
pub fn oos_detection_counts(
    distractors: &[DistractorWindowObs],
    in_scope_outcomes: &[ObjectOutcome],
) -> ConfusionCounts {
    let mut counts = ConfusionCounts::default();
    for d in distractors {
        if d.matched_in_scope {
            counts.fp += 1;
        } else {
            counts.tn += 1;
        }
    }
    for o in in_scope_outcomes {
        if o.entry_time.is_none() {
            continue;
        }
        if o.comprehension_time.is_some() {
            counts.tp += 1;
        } else {
            counts.fn_ += 1;
        }
    }
    counts
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalizationStats {
    pub n: u64,
    pub mean: Option<f64>,
    pub median: Option<f64>,
    pub rms: Option<f64>,
    pub max: Option<f64>,
}

/// Order statistics and moments over matched 3D distances (correct-class
/// pairs only). Empty input yields n = 0 with absent stats.
pub fn localization_error_stats(distances: &[f64]) -> LocalizationStats {
    let n = distances.len() as u64;
    if n == 0 {
        return LocalizationStats { n, mean: None, median: None, rms: None, max: None };
    }
    let mut sorted = distances.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let sum: f64 = sorted.iter().sum();
    let sum_sq: f64 = sorted.iter().map(|d| d * d).sum();
    let mid = sorted.len() / 2;
    let median = if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    };
    LocalizationStats {
        n,
        mean: Some(sum / n as f64),
        median: Some(median),
        rms: Some((sum_sq / n as f64).sqrt()),
        max: Some(*sorted.last().unwrap()),
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TrackingStats {
    /// Matched track identity changed between two matched frames of the
    /// same object.
    pub id_switches: u64,
    /// Breaks in matched runs during continuous visibility, summed over
    /// objects.
    pub fragmentation: u64,
    /// Fraction of visibility re-entries after which the object was
    /// re-comprehended within the latency budget. 1.0 when there were no
    /// re-entries.
    pub occlusion_recovery_rate: f64,
    /// Number of visibility-gap re-entries observed.
    pub reentries: u64,
}

pub fn tracking_continuity(
    observations: &[ObjectObservations],
    config: &EvaluationConfig,
) -> TrackingStats {
    let mut stats = TrackingStats { occlusion_recovery_rate: 1.0, ..Default::default() };
    let mut reentries = 0u64;
    let mut recovered = 0u64;
    for obs in observations {
        // Split into blocks of continuous visibility (consecutive frames).
        let mut blocks: Vec<&[FrameObs]> = Vec::new();
        let mut start = 0usize;
        for i in 1..obs.frames.len() {
            if obs.frames[i].frame_index != obs.frames[i - 1].frame_index + 1 {
                blocks.push(&obs.frames[start..i]);
                start = i;
            }
        }
        if start < obs.frames.len() {
            blocks.push(&obs.frames[start..]);
        }

        let mut last_track_id: Option<&str> = None;
        for block in &blocks {
            let mut runs = 0u64;
            let mut in_run = false;
            for f in *block {
                match &f.matched {
                    Some(m) => {
                        if let Some(prev) = last_track_id {
                            if prev != m.track_id {
                                stats.id_switches += 1;
                            }
                        }
                        last_track_id = Some(&m.track_id);
                        if !in_run {
                            runs += 1;
                            in_run = true;
                        }
                    }
                    None => in_run = false,
                }
            }
            stats.fragmentation += runs.saturating_sub(1);
        }

        for block in blocks.iter().skip(1) {
            reentries += 1;
            let reentry_t = block[0].t;
            if let Some(done) = first_comprehension(block, config.persistence_frames as usize) {
                if done - reentry_t <= config.adl {
                    recovered += 1;
                }
            }
        }
    }
    stats.reentries = reentries;
    if reentries > 0 {
        stats.occlusion_recovery_rate = recovered as f64 / reentries as f64;
    }
    stats
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn class(s: &str) -> Label {
        Label::Class(s.to_string())
    }

    #[test]
    fn oos_confusion_cases() {
        assert_eq!(oos_confusion(&[(class("cube"), class("cube"))]).tp, 1);
        assert_eq!(oos_confusion(&[(Label::Oos, Label::Oos)]).tn, 1);
        assert_eq!(oos_confusion(&[(class("cube"), class("tile"))]).fp, 1);
        assert_eq!(oos_confusion(&[(class("cube"), Label::Oos)]).fp, 1);
        assert_eq!(oos_confusion(&[(Label::Oos, class("cube"))]).fn_, 1);
    }

    fn obs(frames: Vec<(usize, f64, Option<bool>)>) -> ObjectObservations {
        ObjectObservations {
            object_id: "o".into(),
            class_label: "cube".into(),
            frames: frames
                .into_iter()
                .map(|(frame_index, t, hit)| FrameObs {
                    frame_index,
                    t,
                    matched: hit.map(|correct_class| MatchedPrediction {
                        label: if correct_class { class("cube") } else { class("tile") },
                        track_id: "trk".into(),
                        distance: 0.0,
                        correct_class,
                    }),
                })
                .collect(),
        }
    }

    fn timeline(id: &str, intervals: Vec<[f64; 2]>) -> VisibilityTimeline {
        let mut tl = VisibilityTimeline::default();
        tl.per_object.insert(id.into(), intervals);
        tl
    }

    #[test]
    fn latency_from_entry_to_first_correct_frame() {
        let o = obs(vec![
            (20, 2.0, None),
            (24, 2.4, Some(false)),
            (28, 2.8, Some(true)),
        ]);
        let tl = timeline("o", vec![[2.0, 3.0]]);
        let cfg = EvaluationConfig::default();
        let outcomes = detection_latency(&[o], &tl, &cfg);
        assert_eq!(outcomes[0].entry_time, Some(2.0));
        assert_eq!(outcomes[0].comprehension_time, Some(2.8));
        assert!((outcomes[0].latency.unwrap() - 0.8).abs() < 1e-12);
        assert_eq!(outcomes[0].adl_compliant, Some(true));
    }

    #[test]
    fn never_predicted_object_fails_when_exposed() {
        let o = obs(vec![(0, 0.0, None), (1, 0.1, None)]);
        let tl = timeline("o", vec![[0.0, 5.0]]);
        let cfg = EvaluationConfig { adl: 1.0, ..Default::default() };
        let outcomes = detection_latency(&[o], &tl, &cfg);
        assert_eq!(outcomes[0].comprehension_time, None);
        assert_eq!(outcomes[0].adl_compliant, Some(false));
        assert!(!outcomes[0].excluded_short_exposure);
    }

    #[test]
    fn short_exposure_without_comprehension_is_excluded() {
        let o = obs(vec![(0, 0.0, None)]);
        let tl = timeline("o", vec![[0.0, 0.3]]);
        let cfg = EvaluationConfig { adl: 1.0, ..Default::default() };
        let outcomes = detection_latency(&[o], &tl, &cfg);
        assert!(outcomes[0].excluded_short_exposure);
        assert_eq!(outcomes[0].adl_compliant, None);
        assert_eq!(adl_compliance(&outcomes, 1.0), 1.0);
    }

    #[test]
    fn persistence_requires_consecutive_frames() {
        let o = obs(vec![
            (0, 0.0, Some(true)),
            (1, 0.1, None),
            (2, 0.2, Some(true)),
            (3, 0.3, Some(true)),
        ]);
        let tl = timeline("o", vec![[0.0, 0.3]]);
        let cfg = EvaluationConfig { persistence_frames: 2, ..Default::default() };
        let outcomes = detection_latency(&[o], &tl, &cfg);
        assert_eq!(outcomes[0].comprehension_time, Some(0.3));
    }

    #[test]
    fn compliance_counts() {
        let mk = |latency: f64| ObjectOutcome {
            object_id: "x".into(),
            entry_time: Some(0.0),
            comprehension_time: Some(latency),
            latency: Some(latency),
            adl_compliant: None,
            excluded_short_exposure: false,
            exposure: 10.0,
        };
        assert_eq!(adl_compliance(&[mk(0.3), mk(0.3)], 1.0), 1.0);
        assert_eq!(adl_compliance(&[mk(0.4), mk(1.6)], 1.0), 0.5);
        assert_eq!(adl_compliance(&[], 1.0), 1.0);
    }

    #[test]
    fn curve_is_flat_for_instant_detector() {
        let outcomes: Vec<ObjectOutcome> = (0..5)
            .map(|i| ObjectOutcome {
                object_id: format!("o{i}"),
                entry_time: Some(0.0),
                comprehension_time: Some(0.0),
                latency: Some(0.0),
                adl_compliant: Some(true),
                excluded_short_exposure: false,
                exposure: 10.0,
            })
            .collect();
        let curve = latency_recall_curve(&outcomes, &[0.1, 0.5, 1.0]);
        assert!(curve.points.iter().all(|&(_, c)| c == 1.0));
        assert_eq!(curve.auc, 1.0);
        let empty = latency_recall_curve(&[], &[0.1, 0.5, 1.0]);
        assert_eq!(empty.auc, 1.0);
    }

    #[test]
    fn ambiguity_scoring_rules() {
        let set: BTreeSet<String> = ["cube".to_string(), "rect_cube".to_string()].into();
        let inside_guess = ClassificationEvent {
            t: 0.0,
            object_id: "o".into(),
            predicted: class("rect_cube"),
            truth: class("rect_cube"),
            ambiguity_set: Some(set.clone()),
        };
        let outside_guess = ClassificationEvent {
            predicted: class("tile"),
            ..inside_guess.clone()
        };
        let honest = ClassificationEvent { predicted: Label::Oos, ..inside_guess.clone() };
        let plain = ClassificationEvent {
            predicted: class("rect_cube"),
            ambiguity_set: None,
            ..inside_guess.clone()
        };
        let r = ambiguity_adjusted_score(&[inside_guess, outside_guess, honest, plain], 0);
        assert_eq!(r.counts.tp, 1); // only the unambiguous event
        assert_eq!(r.counts.fp, 1); // the out-of-set guess
        assert_eq!(r.neutral_count, 2);
        assert!((r.honesty_rate - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn neutral_events_score_like_deleted_events() {
        let set: BTreeSet<String> = ["cube".to_string(), "rect_cube".to_string()].into();
        let mut events = vec![
            ClassificationEvent {
                t: 0.0,
                object_id: "o".into(),
                predicted: class("cube"),
                truth: class("cube"),
                ambiguity_set: None,
            },
            ClassificationEvent {
                t: 1.0,
                object_id: "o".into(),
                predicted: class("rect_cube"),
                truth: class("rect_cube"),
                ambiguity_set: Some(set),
            },
        ];
        let with_neutral = ambiguity_adjusted_score(&events, 0);
        events.retain(|e| e.ambiguity_set.is_none());
        let deleted = ambiguity_adjusted_score(&events, 0);
        assert_eq!(with_neutral.counts, deleted.counts);
    }

    #[test]
    fn distractor_accounting() {
        let silent = |i: usize| DistractorWindowObs {
            object_id: format!("d{i}"),
            window: [0.0, 10.0],
            matched_in_scope: false,
        };
        let counts = oos_detection_counts(&(0..4).map(silent).collect::<Vec<_>>(), &[]);
        assert_eq!((counts.tn, counts.fp), (4, 0));
        let mut ds: Vec<_> = (0..4).map(silent).collect();
        ds[0].matched_in_scope = true;
        let counts = oos_detection_counts(&ds, &[]);
        assert_eq!((counts.tn, counts.fp), (3, 1));
    }

    #[test]
    fn localization_stats_arithmetic() {
        let s = localization_error_stats(&[0.0, 0.0, 0.0]);
        assert_eq!(s.mean, Some(0.0));
        assert_eq!(s.rms, Some(0.0));
        let s = localization_error_stats(&[0.1, 0.3]);
        assert!((s.mean.unwrap() - 0.2).abs() < 1e-12);
        assert_eq!(s.max, Some(0.3));
        assert!((s.median.unwrap() - 0.2).abs() < 1e-12);
        let empty = localization_error_stats(&[]);
        assert_eq!(empty.n, 0);
        assert_eq!(empty.mean, None);
    }

    #[test]
    fn stable_track_has_no_switches() {
        let o = obs(vec![(0, 0.0, Some(true)), (1, 0.1, Some(true)), (2, 0.2, Some(true))]);
        let stats = tracking_continuity(&[o], &EvaluationConfig::default());
        assert_eq!(stats.id_switches, 0);
        assert_eq!(stats.fragmentation, 0);
        assert_eq!(stats.occlusion_recovery_rate, 1.0);
    }

    #[test]
    fn track_id_change_counts_one_switch() {
        let mut o = obs(vec![(0, 0.0, Some(true)), (1, 0.1, Some(true))]);
        o.frames[1].matched.as_mut().unwrap().track_id = "trk2".into();
        let stats = tracking_continuity(&[o], &EvaluationConfig::default());
        assert_eq!(stats.id_switches, 1);
    }

    #[test]
    fn matched_gap_during_visibility_is_fragmentation() {
        let o = obs(vec![(0, 0.0, Some(true)), (1, 0.1, None), (2, 0.2, Some(true))]);
        let stats = tracking_continuity(&[o], &EvaluationConfig::default());
        assert_eq!(stats.fragmentation, 1);
    }

    #[test]
    fn reentry_recovery_within_budget() {
        // Visible frames 0..2, gap, re-enters at frame 10 and is re-acquired
        // two frames later.
        let o = obs(vec![
            (0, 0.0, Some(true)),
            (1, 0.1, Some(true)),
            (10, 1.0, None),
            (11, 1.1, None),
            (12, 1.2, Some(true)),
        ]);
        let stats = tracking_continuity(&[o], &EvaluationConfig { adl: 1.0, ..Default::default() });
        assert_eq!(stats.reentries, 1);
        assert_eq!(stats.occlusion_recovery_rate, 1.0);
        let strict = tracking_continuity(&[obs(vec![
            (0, 0.0, Some(true)),
            (10, 1.0, None),
        ])], &EvaluationConfig::default());
        assert_eq!(strict.occlusion_recovery_rate, 0.0);
    }

    proptest! {
        #[test]
        fn oos_confusion_partitions_events(
            pairs in proptest::collection::vec((0u8..3, 0u8..3), 0..50),
        ) {
            let to_label = |v: u8| match v {
                0 => Label::Oos,
                1 => class("cube"),
                _ => class("tile"),
            };
            let events: Vec<(Label, Label)> =
                pairs.iter().map(|&(p, t)| (to_label(p), to_label(t))).collect();
            let counts = oos_confusion(&events);
            prop_assert_eq!(counts.total(), events.len() as u64);
        }

        #[test]
        fn compliance_monotone_in_adl(
            latencies in proptest::collection::vec(0.0f64..5.0, 0..20),
            exposures in proptest::collection::vec(0.0f64..10.0, 0..20),
            a in 0.0f64..5.0,
            b in 0.0f64..5.0,
        ) {
            let mut outcomes: Vec<ObjectOutcome> = latencies.iter().map(|&l| ObjectOutcome {
                object_id: "x".into(),
                entry_time: Some(0.0),
                comprehension_time: Some(l),
                latency: Some(l),
                adl_compliant: None,
                excluded_short_exposure: false,
                exposure: l + 1.0,
            }).collect();
            outcomes.extend(exposures.iter().map(|&e| ObjectOutcome {
                object_id: "y".into(),
                entry_time: Some(0.0),
                comprehension_time: None,
                latency: None,
                adl_compliant: None,
                excluded_short_exposure: false,
                exposure: e,
            }));
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(adl_compliance(&outcomes, lo) <= adl_compliance(&outcomes, hi) + 1e-12);
        }
    }
}
