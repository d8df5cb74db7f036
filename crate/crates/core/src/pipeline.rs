//! End-to-end evaluation: visibility, per-frame matching in both regimes,
//! then every metric block of the report.
//!
//! The two regimes are matched independently. The 3D regime matches all
//! prediction events against all visible objects (distractors included,
//! class-agnostic) by world distance. The legacy regime reproduces the
//! classic per-frame 2D pipeline: only in-scope-labeled predictions, only
//! in-scope ground truth, projected boxes matched by IoU.

use std::collections::BTreeMap;
use std::time::{SystemTime, UNIX_EPOCH};

use crate::geometry::{compute_visibility, projected_bbox, BBox2D};
use crate::matching::{match_frame, match_iou, FrameMatchResult, GtState};
use crate::math::Vec3;
use crate::metrics::doc::{
    adl_compliance, ambiguity_adjusted_score, detection_latency, latency_recall_curve,
    localization_error_stats, oos_confusion, oos_detection_counts, tracking_continuity,
    ClassificationEvent, DistractorWindowObs, EvaluationConfig, FrameObs, MatchedPrediction,
    ObjectObservations,
};
use crate::metrics::legacy::{
    average_precision, confusion_detection, pr_curve, precision_recall_with, RankedPrediction,
};
use crate::report::{
    scenario_digest, Diagnostics, DocBlock, FrameCounts, LegacyBlock, MetricReport,
    REPORT_SCHEMA_VERSION,
};
use crate::scenario::{interpolate_pose, Label, PredictionStream, Scenario};

pub fn evaluate(
    scenario: &Scenario,
    stream: &PredictionStream,
    config: &EvaluationConfig,
) -> MetricReport {
    let timeline = compute_visibility(scenario);
    let times = scenario.frame_times();
    let n_frames = times.len();

    // Class extents for projecting predicted boxes in the legacy regime,
    // taken from the first scenario instance of each in-scope class.
    let mut class_extents: BTreeMap<&str, Vec3> = BTreeMap::new();
    for obj in &scenario.objects {
        if scenario.taxonomy.is_in_scope(&obj.class_label) {
            class_extents.entry(obj.class_label.as_str()).or_insert(obj.extent);
        }
    }

    // Bucket events by frame index.
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); n_frames];
    let mut events_beyond_duration = 0u64;
    for (i, e) in stream.events.iter().enumerate() {
        let idx = (e.t / scenario.frame_interval + 1e-6).floor() as usize;
        if idx < n_frames {
            buckets[idx].push(i);
        } else {
            events_beyond_duration += 1;
        }
    }

    let in_scope_objects: Vec<&crate::scenario::ObjectTrack> = scenario
        .objects
        .iter()
        .filter(|o| scenario.taxonomy.is_in_scope(&o.class_label))
        .collect();

    let mut observations: BTreeMap<&str, ObjectObservations> = in_scope_objects
        .iter()
        .map(|o| {
            (
                o.object_id.as_str(),
                ObjectObservations {
                    object_id: o.object_id.clone(),
                    class_label: o.class_label.clone(),
                    frames: Vec::new(),
                },
            )
        })
        .collect();

    let mut legacy_frames: Vec<FrameMatchResult> = Vec::with_capacity(n_frames);
    let mut ranked: Vec<RankedPrediction> = Vec::new();
    let mut n_positive = 0u64;
    let mut classification_events: Vec<ClassificationEvent> = Vec::new();
    let mut withheld_ambiguous = 0u64;
    let mut correct_distances: Vec<f64> = Vec::new();
    let mut distractor_hit: BTreeMap<&str, bool> = scenario
        .objects
        .iter()
        .filter(|o| scenario.taxonomy.is_distractor(&o.class_label))
        .filter(|o| !timeline.intervals(&o.object_id).is_empty())
        .map(|o| (o.object_id.as_str(), false))
        .collect();

    for (frame_index, &t) in times.iter().enumerate() {
        let bucket = &buckets[frame_index];
        let visible: Vec<&crate::scenario::ObjectTrack> = scenario
            .objects
            .iter()
            .filter(|o| timeline.visible_at(&o.object_id, t))
            .collect();

        // --- 3D world-coordinate regime ---
        let positions: Vec<Vec3> = bucket.iter().map(|&i| stream.events[i].pos).collect();
        let states: Vec<GtState> = visible
            .iter()
            .map(|o| GtState { object_id: o.object_id.clone(), position: o.position_at(t) })
            .collect();
        let frame_match = match_frame(t, &positions, &states, config.tau_loc);

        let mut matched_by_object: BTreeMap<&str, &crate::matching::MatchPair> = BTreeMap::new();
        for pair in &frame_match.pairs {
            matched_by_object.insert(pair.object_id.as_str(), pair);
        }

        for obj in &visible {
            let is_in_scope = scenario.taxonomy.is_in_scope(&obj.class_label);
            let ambiguity = obj
                .ambiguity_intervals
                .iter()
                .find(|iv| t >= iv.interval[0] && t <= iv.interval[1]);
            match matched_by_object.get(obj.object_id.as_str()) {
                Some(pair) => {
                    let event_index = bucket[pair.prediction_index];
                    let event = &stream.events[event_index];
                    let truth = if is_in_scope {
                        Label::Class(obj.class_label.clone())
                    } else {
                        Label::Oos
                    };
                    let correct_class = event.label == truth && !truth.is_oos();
                    if is_in_scope {
                        classification_events.push(ClassificationEvent {
                            t,
                            object_id: obj.object_id.clone(),
                            predicted: event.label.clone(),
                            truth: truth.clone(),
                            ambiguity_set: ambiguity.map(|iv| iv.ambiguity_set.clone()),
                        });
                        if correct_class {
                            correct_distances.push(pair.score);
                        }
                        let track_id = event
                            .track_id
                            .clone()
                            .unwrap_or_else(|| format!("evt-{event_index}"));
                        observations.get_mut(obj.object_id.as_str()).unwrap().frames.push(
                            FrameObs {
                                frame_index,
                                t,
                                matched: Some(MatchedPrediction {
                                    label: event.label.clone(),
                                    track_id,
                                    distance: pair.score,
                                    correct_class,
                                }),
                            },
                        );
                    } else {
                        classification_events.push(ClassificationEvent {
                            t,
                            object_id: obj.object_id.clone(),
                            predicted: event.label.clone(),
                            truth,
                            ambiguity_set: None,
                        });
                        if !event.label.is_oos() {
                            if let Some(hit) = distractor_hit.get_mut(obj.object_id.as_str()) {
                                *hit = true;
                            }
                        }
                    }
                }
                None => {
                    if is_in_scope {
                        if ambiguity.is_some() {
                            withheld_ambiguous += 1;
                        }
                        observations
                            .get_mut(obj.object_id.as_str())
                            .unwrap()
                            .frames
                            .push(FrameObs { frame_index, t, matched: None });
                    }
                }
            }
        }

        // --- legacy 2D regime ---
        let pose = interpolate_pose(&scenario.camera.trajectory, t)
            .expect("validated trajectory")
            .0;
        let intr = &scenario.camera.intrinsics;
        let mut pred_boxes: Vec<BBox2D> = Vec::new();
        let mut pred_confs: Vec<f64> = Vec::new();
        let mut boxless_predictions = 0u64;
        for &i in bucket {
            let event = &stream.events[i];
            let Some(class) = event.label.as_class() else {
                continue; // OOS events have no place in the legacy regime
            };
            let extent = class_extents.get(class).copied().unwrap_or(Vec3::ZERO);
            match projected_bbox(&pose, intr, event.pos, extent) {
                Some(b) => {
                    pred_boxes.push(b);
                    pred_confs.push(event.conf);
                }
                None => {
                    boxless_predictions += 1;
                    ranked.push(RankedPrediction { confidence: event.conf, is_tp: false });
                }
            }
        }
        let mut gt_boxes: Vec<(String, BBox2D)> = Vec::new();
        let mut boxless_objects: Vec<String> = Vec::new();
        for obj in &visible {
            if !scenario.taxonomy.is_in_scope(&obj.class_label) {
                continue;
            }
            n_positive += 1;
            match projected_bbox(&pose, intr, obj.position_at(t), obj.extent) {
                Some(b) => gt_boxes.push((obj.object_id.clone(), b)),
                None => boxless_objects.push(obj.object_id.clone()),
            }
        }
        let mut legacy_match = match_iou(t, &pred_boxes, &gt_boxes, config.iou_threshold);
        for pair in &legacy_match.pairs {
            ranked.push(RankedPrediction { confidence: pred_confs[pair.prediction_index], is_tp: true });
        }
        for &pi in &legacy_match.unmatched_predictions {
            ranked.push(RankedPrediction { confidence: pred_confs[pi], is_tp: false });
        }
        // Boxless entries still count in the frame totals.
        for _ in 0..boxless_predictions {
            legacy_match.unmatched_predictions.push(usize::MAX);
        }
        legacy_match.unmatched_objects.extend(boxless_objects);
        legacy_frames.push(legacy_match);
    }

    // --- aggregate ---
    let obs_list: Vec<ObjectObservations> = observations.into_values().collect();
    let outcomes = detection_latency(&obs_list, &timeline, config);
    let compliance = adl_compliance(&outcomes, config.adl);
    let curve = latency_recall_curve(&outcomes, &config.adl_grid);
    let label_pairs: Vec<(Label, Label)> = classification_events
        .iter()
        .map(|e| (e.predicted.clone(), e.truth.clone()))
        .collect();
    let oos_counts = oos_confusion(&label_pairs);
    let ambiguity = ambiguity_adjusted_score(&classification_events, withheld_ambiguous);
    let localization = localization_error_stats(&correct_distances);
    let tracking = tracking_continuity(&obs_list, config);
    let distractor_windows: Vec<DistractorWindowObs> = distractor_hit
        .iter()
        .map(|(&id, &hit)| DistractorWindowObs {
            object_id: id.to_string(),
            window: [0.0, scenario.duration],
            matched_in_scope: hit,
        })
        .collect();
    let oos_detection = oos_detection_counts(&distractor_windows, &outcomes);

    let legacy_counts = confusion_detection(&legacy_frames);
    let (precision, recall) =
        precision_recall_with(&legacy_counts, config.zero_denominator_value);
    let ap = average_precision(&ranked, n_positive);
    let legacy_pr_curve = pr_curve(&ranked, n_positive);
    let per_frame: Vec<FrameCounts> = legacy_frames
        .iter()
        .map(|f| FrameCounts {
            t: f.t,
            tp: f.pairs.len() as u64,
            fp: f.unmatched_predictions.len() as u64,
            fn_: f.unmatched_objects.len() as u64,
        })
        .collect();

    let excluded_short_exposure: Vec<String> = outcomes
        .iter()
        .filter(|o| o.excluded_short_exposure)
        .map(|o| o.object_id.clone())
        .collect();

    MetricReport {
        schema_version: REPORT_SCHEMA_VERSION.to_string(),
        generated_at: unix_timestamp(),
        scenario_digest: scenario_digest(scenario),
        config: config.clone(),
        legacy: LegacyBlock {
            counts: legacy_counts,
            precision,
            recall,
            average_precision: ap,
            pr_curve: legacy_pr_curve,
            per_frame,
        },
        doc: DocBlock {
            oos_counts,
            outcomes,
            adl_compliance: compliance,
            latency_recall: curve,
            ambiguity,
            localization,
            tracking,
            oos_detection,
        },
        diagnostics: Diagnostics {
            reorder_count: stream.reorder_count,
            events_beyond_duration,
            excluded_short_exposure,
        },
    }
}

fn unix_timestamp() -> String {
    let secs = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    format!("{secs}")
}
