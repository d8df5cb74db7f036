//! Ground-truth and prediction data model, file formats, validation,
//! and time interpolation.
//!
//! All quantities are meters and seconds. The world frame is right-handed
//! with +Z up; orientations are unit quaternions serialized `[w, x, y, z]`.
//! Scenario files are JSON with `schema_version` `"doc-eval/1"`; prediction
//! files are JSON Lines with one event per line and `"OOS"` as the
//! out-of-scope sentinel label.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{DataError, EmptyTrajectory};
use crate::math::{Pose, Quat, Vec3};

pub const SCENARIO_SCHEMA_VERSION: &str = "doc-eval/1";

/// Sentinel label for out-of-scope predictions.
pub const OOS_SENTINEL: &str = "OOS";

/// A prediction label: either a supported class or the out-of-scope sentinel.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "String", into = "String")]
pub enum Label {
    Oos,
    Class(String),
}

impl Label {
    pub fn is_oos(&self) -> bool {
        matches!(self, Label::Oos)
    }

    pub fn as_class(&self) -> Option<&str> {
        match self {
            Label::Oos => None,
            Label::Class(c) => Some(c),
        }
    }
}

impl From<String> for Label {
    fn from(s: String) -> Self {
        if s == OOS_SENTINEL {
            Label::Oos
        } else {
            Label::Class(s)
        }
    }
}

impl From<Label> for String {
    fn from(l: Label) -> Self {
        match l {
            Label::Oos => OOS_SENTINEL.to_string(),
            Label::Class(c) => c,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Oos => f.write_str(OOS_SENTINEL),
            Label::Class(c) => f.write_str(c),
        }
    }
}

/// The supported class set plus the distractor classes used for TN
/// accounting. The `"OOS"` sentinel may not appear in either set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassTaxonomy {
    /// Ordered set of supported class labels.
    pub in_scope_labels: Vec<String>,
    /// Labels of objects whose correct system response is OOS or silence.
    pub distractor_labels: BTreeSet<String>,
}

impl ClassTaxonomy {
    pub fn is_in_scope(&self, label: &str) -> bool {
        self.in_scope_labels.iter().any(|l| l == label)
    }

    pub fn is_distractor(&self, label: &str) -> bool {
        self.distractor_labels.contains(label)
    }

    pub fn validate(&self) -> Result<(), DataError> {
        if self.in_scope_labels.is_empty() {
            return Err(DataError::validation("taxonomy", "in_scope_labels must be nonempty"));
        }
        let mut seen = BTreeSet::new();
        for l in &self.in_scope_labels {
            if !seen.insert(l.clone()) {
                return Err(DataError::validation(
                    "taxonomy",
                    format!("duplicate in_scope label {l:?}"),
                ));
            }
            if self.distractor_labels.contains(l) {
                return Err(DataError::validation(
                    "taxonomy",
                    format!("label {l:?} appears in both in_scope and distractor sets"),
                ));
            }
        }
        if self.is_in_scope(OOS_SENTINEL) || self.distractor_labels.contains(OOS_SENTINEL) {
            return Err(DataError::validation(
                "taxonomy",
                "the literal label \"OOS\" is reserved and may not appear in the taxonomy",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CameraIntrinsics {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: u32,
    pub height: u32,
    /// Near clip distance in meters; depths at or below it are invisible.
    pub near: f64,
    /// Far clip distance in meters; depths at or beyond it are invisible.
    pub far: f64,
}

impl CameraIntrinsics {
    pub fn validate(&self) -> Result<(), DataError> {
        if !(self.fx > 0.0 && self.fy > 0.0) {
            return Err(DataError::validation("camera.intrinsics", "fx and fy must be > 0"));
        }
        if !(self.near > 0.0 && self.near < self.far) {
            return Err(DataError::validation("camera.intrinsics", "require 0 < near < far"));
        }
        if self.width < 1 || self.height < 1 {
            return Err(DataError::validation("camera.intrinsics", "width and height must be >= 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectorySample {
    pub t: f64,
    pub position: Vec3,
    pub orientation: Quat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CameraTrajectory {
    pub samples: Vec<TrajectorySample>,
}

impl CameraTrajectory {
    pub fn validate(&self) -> Result<(), DataError> {
        if self.samples.is_empty() {
            return Err(DataError::validation("camera.trajectory", "must have at least one sample"));
        }
        for w in self.samples.windows(2) {
            if !(w[1].t > w[0].t) {
                return Err(DataError::validation(
                    "camera.trajectory",
                    "sample timestamps must be strictly increasing",
                ));
            }
        }
        for s in &self.samples {
            if (s.orientation.norm() - 1.0).abs() > 1e-6 {
                return Err(DataError::validation(
                    "camera.trajectory",
                    format!("orientation at t={} is not unit-norm", s.t),
                ));
            }
        }
        Ok(())
    }
}

/// Interpolate the camera pose at time `t`. Position is linear, orientation
/// is shortest-arc slerp. Outside the sampled range the pose is clamped to
/// the nearest endpoint and the returned flag is set.
pub fn interpolate_pose(trajectory: &CameraTrajectory, t: f64) -> Result<(Pose, bool), EmptyTrajectory> {
    let samples = &trajectory.samples;
    let first = samples.first().ok_or(EmptyTrajectory)?;
    let last = samples.last().unwrap();
    if t <= first.t {
        let pose = Pose { position: first.position, orientation: first.orientation.normalized() };
        return Ok((pose, t < first.t));
    }
    if t >= last.t {
        let pose = Pose { position: last.position, orientation: last.orientation.normalized() };
        return Ok((pose, t > last.t));
    }
    // Binary search for the bracketing segment.
    let idx = samples.partition_point(|s| s.t <= t);
    let (a, b) = (&samples[idx - 1], &samples[idx]);
    if t == a.t {
        return Ok((Pose { position: a.position, orientation: a.orientation.normalized() }, false));
    }
    let alpha = (t - a.t) / (b.t - a.t);
    let pose = Pose {
        position: a.position.lerp(b.position, alpha),
        orientation: a.orientation.normalized().slerp(b.orientation.normalized(), alpha),
    };
    Ok((pose, false))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrackSample {
    pub t: f64,
    pub position: Vec3,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmbiguityInterval {
    /// `[t0, t1]` with `t0 < t1`.
    pub interval: [f64; 2],
    /// Class labels indistinguishable from the object's own class during
    /// this interval; always contains the object's class plus at least one
    /// other label.
    pub ambiguity_set: BTreeSet<String>,
}

/// A ground-truth object: a (possibly static) centroid track in world
/// coordinates with axis-aligned half-extents. The centroid is the
/// reference point for all 3D scoring; the extent is used only for
/// projection, visibility, and simulated ambiguity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectTrack {
    pub object_id: String,
    pub class_label: String,
    pub track: Vec<TrackSample>,
    /// Axis-aligned half-extents in the object frame, meters.
    pub extent: Vec3,
    /// Authored override of computed visibility; `None` means visibility is
    /// derived geometrically from the camera frustum.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub visibility_intervals: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ambiguity_intervals: Vec<AmbiguityInterval>,
}

impl ObjectTrack {
    /// Linearly interpolated centroid position at `t`, clamped to the track
    /// endpoints. A single-sample track is a static object.
    pub fn position_at(&self, t: f64) -> Vec3 {
        let track = &self.track;
        let first = &track[0];
        if track.len() == 1 || t <= first.t {
            return first.position;
        }
        let last = track.last().unwrap();
        if t >= last.t {
            return last.position;
        }
        let idx = track.partition_point(|s| s.t <= t);
        let (a, b) = (&track[idx - 1], &track[idx]);
        let alpha = (t - a.t) / (b.t - a.t);
        a.position.lerp(b.position, alpha)
    }

    fn validate(&self, taxonomy: &ClassTaxonomy) -> Result<(), DataError> {
        let subject = format!("object {:?}", self.object_id);
        if self.track.is_empty() {
            return Err(DataError::validation(subject, "track must have at least one sample"));
        }
        for w in self.track.windows(2) {
            if !(w[1].t > w[0].t) {
                return Err(DataError::validation(
                    subject,
                    "track timestamps must be strictly increasing",
                ));
            }
        }
        if !taxonomy.is_in_scope(&self.class_label) && !taxonomy.is_distractor(&self.class_label) {
            return Err(DataError::validation(
                subject,
                format!("class_label {:?} not found in taxonomy", self.class_label),
            ));
        }
        if let Some(vis) = &self.visibility_intervals {
            validate_intervals(&subject, "visibility_intervals", vis)?;
        }
        let amb: Vec<[f64; 2]> = self.ambiguity_intervals.iter().map(|a| a.interval).collect();
        validate_intervals(&subject, "ambiguity_intervals", &amb)?;
        for a in &self.ambiguity_intervals {
            if !a.ambiguity_set.contains(&self.class_label) {
                return Err(DataError::validation(
                    &subject,
                    "ambiguity_set must contain the object's own class_label",
                ));
            }
            if a.ambiguity_set.len() < 2 {
                return Err(DataError::validation(
                    &subject,
                    "ambiguity_set must contain at least one label besides the object's own",
                ));
            }
        }
        Ok(())
    }

    pub fn max_time(&self) -> f64 {
        self.track.last().map(|s| s.t).unwrap_or(0.0)
    }
}

fn validate_intervals(subject: &str, field: &str, intervals: &[[f64; 2]]) -> Result<(), DataError> {
    let mut prev_end = f64::NEG_INFINITY;
    for iv in intervals {
        if !(iv[0] < iv[1]) {
            return Err(DataError::validation(
                subject,
                format!("{field}: interval [{}, {}] must satisfy t0 < t1", iv[0], iv[1]),
            ));
        }
        if iv[0] < prev_end {
            return Err(DataError::validation(
                subject,
                format!("{field}: intervals must be non-overlapping and increasing"),
            ));
        }
        prev_end = iv[1];
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CameraConfig {
    pub intrinsics: CameraIntrinsics,
    pub trajectory: CameraTrajectory,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: String,
    pub taxonomy: ClassTaxonomy,
    pub camera: CameraConfig,
    pub objects: Vec<ObjectTrack>,
    /// Nominal capture period, seconds.
    pub frame_interval: f64,
    pub duration: f64,
}

impl Scenario {
    pub fn validate(&self) -> Result<(), DataError> {
        if self.schema_version != SCENARIO_SCHEMA_VERSION {
            return Err(DataError::Schema {
                found: self.schema_version.clone(),
                expected: SCENARIO_SCHEMA_VERSION.to_string(),
            });
        }
        self.taxonomy.validate()?;
        self.camera.intrinsics.validate()?;
        self.camera.trajectory.validate()?;
        if !(self.frame_interval > 0.0) {
            return Err(DataError::validation("scenario", "frame_interval must be > 0"));
        }
        let mut max_t: f64 = self.camera.trajectory.samples.last().map(|s| s.t).unwrap_or(0.0);
        let mut ids = BTreeSet::new();
        for obj in &self.objects {
            obj.validate(&self.taxonomy)?;
            if !ids.insert(obj.object_id.clone()) {
                return Err(DataError::validation(
                    format!("object {:?}", obj.object_id),
                    "duplicate object_id",
                ));
            }
            max_t = max_t.max(obj.max_time());
        }
        if self.duration < max_t {
            return Err(DataError::validation(
                "scenario",
                format!("duration {} is less than the maximum timestamp {}", self.duration, max_t),
            ));
        }
        Ok(())
    }

    pub fn object(&self, id: &str) -> Option<&ObjectTrack> {
        self.objects.iter().find(|o| o.object_id == id)
    }

    /// Frame sample times: 0, dt, 2dt, ... up to and including `duration`.
    pub fn frame_times(&self) -> Vec<f64> {
        let n = (self.duration / self.frame_interval + 1e-9).floor() as usize;
        (0..=n).map(|k| k as f64 * self.frame_interval).collect()
    }
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario, DataError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| DataError::Io { path: path.display().to_string(), source: e })?;
    parse_scenario(&text, &path.display().to_string())
}

pub fn parse_scenario(text: &str, origin: &str) -> Result<Scenario, DataError> {
    let value: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| DataError::Parse { path: origin.to_string(), message: e.to_string() })?;
    // Check the schema version before strict field decoding so an unknown
    // version reports as a schema error, not a shape mismatch.
    if let Some(v) = value.get("schema_version").and_then(|v| v.as_str()) {
        if v != SCENARIO_SCHEMA_VERSION {
            return Err(DataError::Schema {
                found: v.to_string(),
                expected: SCENARIO_SCHEMA_VERSION.to_string(),
            });
        }
    }
    let scenario: Scenario = serde_json::from_value(value)
        .map_err(|e| DataError::Parse { path: origin.to_string(), message: e.to_string() })?;
    scenario.validate()?;
    Ok(scenario)
}

pub fn scenario_to_json(scenario: &Scenario) -> String {
    let mut s = serde_json::to_string_pretty(scenario).expect("scenario serialization");
    s.push('\n');
    s
}

pub fn save_scenario(scenario: &Scenario, path: impl AsRef<Path>) -> Result<(), DataError> {
    let path = path.as_ref();
    std::fs::write(path, scenario_to_json(scenario))
        .map_err(|e| DataError::Io { path: path.display().to_string(), source: e })
}

/// One timestamped detector output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredictionEvent {
    pub t: f64,
    pub label: Label,
    /// World-frame position, meters.
    pub pos: Vec3,
    /// Confidence in [0, 1].
    pub conf: f64,
    /// Detector's own track identity, if it maintains one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub track_id: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PredictionStream {
    /// Events sorted by `t` ascending, input order preserved for ties.
    pub events: Vec<PredictionEvent>,
    pub source_metadata: BTreeMap<String, String>,
    /// Number of input records that arrived out of timestamp order.
    pub reorder_count: u64,
}

impl PredictionStream {
    pub fn from_events(mut events: Vec<PredictionEvent>) -> Self {
        let reorder_count =
            events.windows(2).filter(|w| w[1].t < w[0].t).count() as u64;
        events.sort_by(|a, b| a.t.partial_cmp(&b.t).unwrap());
        PredictionStream { events, source_metadata: BTreeMap::new(), reorder_count }
    }
}

pub fn load_predictions(
    path: impl AsRef<Path>,
    taxonomy: &ClassTaxonomy,
) -> Result<PredictionStream, DataError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| DataError::Io { path: path.display().to_string(), source: e })?;
    parse_predictions(&text, &path.display().to_string(), taxonomy)
}

pub fn parse_predictions(
    text: &str,
    origin: &str,
    taxonomy: &ClassTaxonomy,
) -> Result<PredictionStream, DataError> {
    let mut events = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let event: PredictionEvent = serde_json::from_str(line).map_err(|e| DataError::Parse {
            path: origin.to_string(),
            message: format!("line {}: {}", lineno + 1, e),
        })?;
        validate_event(&event, taxonomy, lineno + 1)?;
        events.push(event);
    }
    Ok(PredictionStream::from_events(events))
}

fn validate_event(
    event: &PredictionEvent,
    taxonomy: &ClassTaxonomy,
    lineno: usize,
) -> Result<(), DataError> {
    let subject = format!("prediction line {lineno}");
    if !(event.t >= 0.0) {
        return Err(DataError::validation(subject, "t must be >= 0"));
    }
    if !(0.0..=1.0).contains(&event.conf) {
        return Err(DataError::validation(subject, format!("confidence {} out of [0,1]", event.conf)));
    }
    if let Label::Class(c) = &event.label {
        if !taxonomy.is_in_scope(c) {
            return Err(DataError::validation(
                subject,
                format!("label {c:?} is not OOS and not an in-scope class"),
            ));
        }
    }
    Ok(())
}

pub fn predictions_to_jsonl(stream: &PredictionStream) -> String {
    let mut out = String::new();
    for e in &stream.events {
        out.push_str(&serde_json::to_string(e).expect("event serialization"));
        out.push('\n');
    }
    out
}

pub fn save_predictions(stream: &PredictionStream, path: impl AsRef<Path>) -> Result<(), DataError> {
    let path = path.as_ref();
    std::fs::write(path, predictions_to_jsonl(stream))
        .map_err(|e| DataError::Io { path: path.display().to_string(), source: e })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn taxonomy() -> ClassTaxonomy {
        ClassTaxonomy {
            in_scope_labels: vec!["cube".into(), "rect_cube".into()],
            distractor_labels: ["tile".to_string()].into_iter().collect(),
        }
    }

    fn minimal_scenario() -> Scenario {
        Scenario {
            schema_version: SCENARIO_SCHEMA_VERSION.into(),
            taxonomy: taxonomy(),
            camera: CameraConfig {
                intrinsics: CameraIntrinsics {
                    fx: 500.0,
                    fy: 500.0,
                    cx: 320.0,
                    cy: 240.0,
                    width: 640,
                    height: 480,
                    near: 0.05,
                    far: 50.0,
                },
                trajectory: CameraTrajectory {
                    samples: vec![
                        TrajectorySample { t: 0.0, position: Vec3::ZERO, orientation: Quat::IDENTITY },
                        TrajectorySample {
                            t: 1.0,
                            position: Vec3::new(0.0, 0.0, 1.0),
                            orientation: Quat::IDENTITY,
                        },
                    ],
                },
            },
            objects: vec![ObjectTrack {
                object_id: "obj-0".into(),
                class_label: "cube".into(),
                track: vec![TrackSample { t: 0.0, position: Vec3::new(0.0, 0.0, 5.0) }],
                extent: Vec3::new(0.5, 0.5, 0.5),
                visibility_intervals: None,
                ambiguity_intervals: vec![],
            }],
            frame_interval: 0.1,
            duration: 1.0,
        }
    }

    #[test]
    fn minimal_scenario_validates() {
        minimal_scenario().validate().unwrap();
    }

    #[test]
    fn unknown_class_label_is_named_in_error() {
        let mut s = minimal_scenario();
        s.objects[0].class_label = "widget".into();
        let err = s.validate().unwrap_err();
        assert!(err.to_string().contains("widget"), "error was: {err}");
    }

    #[test]
    fn scenario_round_trips() {
        let s = minimal_scenario();
        let text = scenario_to_json(&s);
        let s2 = parse_scenario(&text, "mem").unwrap();
        assert_eq!(s, s2);
        assert_eq!(text, scenario_to_json(&s2));
    }

    #[test]
    fn unknown_schema_version_is_schema_error() {
        let mut s = minimal_scenario();
        s.schema_version = "doc-eval/99".into();
        let text = serde_json::to_string(&s).unwrap();
        match parse_scenario(&text, "mem") {
            Err(DataError::Schema { found, .. }) => assert_eq!(found, "doc-eval/99"),
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn predictions_sorted_with_reorder_count() {
        let text = "\
{\"t\":0.2,\"label\":\"cube\",\"pos\":[0,0,1],\"conf\":0.9}
{\"t\":0.1,\"label\":\"OOS\",\"pos\":[0,0,1],\"conf\":0.5}
{\"t\":0.3,\"label\":\"cube\",\"pos\":[0,0,1],\"conf\":0.8}
";
        let stream = parse_predictions(text, "mem", &taxonomy()).unwrap();
        let ts: Vec<f64> = stream.events.iter().map(|e| e.t).collect();
        assert_eq!(ts, vec![0.1, 0.2, 0.3]);
        assert_eq!(stream.reorder_count, 1);
    }

    #[test]
    fn distractor_label_prediction_rejected() {
        let text = "{\"t\":0.0,\"label\":\"tile\",\"pos\":[0,0,1],\"conf\":0.9}\n";
        let err = parse_predictions(text, "mem", &taxonomy()).unwrap_err();
        assert!(matches!(err, DataError::Validation { .. }));
    }

    #[test]
    fn empty_prediction_file_is_empty_stream() {
        let stream = parse_predictions("", "mem", &taxonomy()).unwrap();
        assert!(stream.events.is_empty());
        assert_eq!(stream.reorder_count, 0);
    }

    #[test]
    fn interpolate_pose_hits_samples_and_midpoints() {
        let traj = CameraTrajectory {
            samples: vec![
                TrajectorySample { t: 0.0, position: Vec3::ZERO, orientation: Quat::IDENTITY },
                TrajectorySample {
                    t: 1.0,
                    position: Vec3::new(2.0, 0.0, 0.0),
                    orientation: Quat::IDENTITY,
                },
            ],
        };
        let (p, clamped) = interpolate_pose(&traj, 0.0).unwrap();
        assert!(!clamped);
        assert_eq!(p.position, Vec3::ZERO);
        let (p, _) = interpolate_pose(&traj, 0.5).unwrap();
        assert_eq!(p.position, Vec3::new(1.0, 0.0, 0.0));
        let (_, clamped) = interpolate_pose(&traj, 2.0).unwrap();
        assert!(clamped);
    }

    #[test]
    fn slerp_midpoint_matches_axis_angle_oracle() {
        use crate::math::distance3;
        let q90 = Quat::from_axis_angle(Vec3::new(0.0, 0.0, 1.0), std::f64::consts::FRAC_PI_2);
        let traj = CameraTrajectory {
            samples: vec![
                TrajectorySample { t: 0.0, position: Vec3::ZERO, orientation: Quat::IDENTITY },
                TrajectorySample { t: 1.0, position: Vec3::ZERO, orientation: q90 },
            ],
        };
        let (p, _) = interpolate_pose(&traj, 0.5).unwrap();
        // Independent oracle: rotation of 45 degrees about Z applied to the
        // basis vectors via an explicit rotation matrix.
        let theta = std::f64::consts::FRAC_PI_4;
        let oracle = |v: Vec3| {
            Vec3::new(
                theta.cos() * v.x - theta.sin() * v.y,
                theta.sin() * v.x + theta.cos() * v.y,
                v.z,
            )
        };
        for v in [Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.0), Vec3::new(0.0, 0.0, 1.0)] {
            let got = p.orientation.rotate(v);
            assert!(distance3(got, oracle(v)) < 1e-12);
        }
        assert!((p.orientation.norm() - 1.0).abs() < 1e-9);
    }
}
