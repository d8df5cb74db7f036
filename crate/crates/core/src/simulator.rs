//! Synthetic scenario generation and parametric detector simulation.
//!
//! Everything here is a deterministic function of (config, seed): the RNG
//! is always ChaCha8, never a platform generator, so outputs are
//! byte-identical across runs and platforms at the serialization layer.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::SimError;
use crate::geometry::compute_visibility;
use crate::math::{Quat, Vec3};
use crate::scenario::{
    AmbiguityInterval, CameraConfig, CameraIntrinsics, CameraTrajectory, ClassTaxonomy, Label,
    ObjectTrack, PredictionEvent, PredictionStream, Scenario, TrackSample, TrajectorySample,
    interpolate_pose, SCENARIO_SCHEMA_VERSION,
};

const MAX_PLACEMENT_ATTEMPTS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Region {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrajectoryKind {
    Orbit { radius: f64, height: f64, angular_speed: f64 },
    Waypoints { points: Vec<[f64; 3]> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneConfig {
    pub seed: u64,
    pub n_in_scope: usize,
    pub n_distractor: usize,
    /// Supported classes: label -> full cuboid dimensions, meters.
    pub in_scope_shapes: BTreeMap<String, [f64; 3]>,
    /// Distractor classes: label -> full cuboid dimensions, meters.
    pub distractor_shapes: BTreeMap<String, [f64; 3]>,
    /// Axis-aligned placement bounds.
    pub region: Region,
    pub duration: f64,
    pub frame_interval: f64,
    pub trajectory: TrajectoryKind,
    #[serde(default)]
    pub intrinsics: Option<CameraIntrinsics>,
}

impl SceneConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if self.n_in_scope > 0 && self.in_scope_shapes.is_empty() {
            return Err(SimError::config("in_scope_shapes", "must be nonempty when n_in_scope > 0"));
        }
        if self.n_distractor > 0 && self.distractor_shapes.is_empty() {
            return Err(SimError::config(
                "distractor_shapes",
                "must be nonempty when n_distractor > 0",
            ));
        }
        for (name, shapes) in
            [("in_scope_shapes", &self.in_scope_shapes), ("distractor_shapes", &self.distractor_shapes)]
        {
            for (label, dims) in shapes {
                if dims.iter().any(|&d| !(d > 0.0)) {
                    return Err(SimError::config(name, format!("class {label:?} has non-positive dimensions")));
                }
                if label == crate::scenario::OOS_SENTINEL {
                    return Err(SimError::config(name, "the label \"OOS\" is reserved"));
                }
            }
        }
        for axis in 0..3 {
            if !(self.region.max[axis] > self.region.min[axis]) {
                return Err(SimError::config("region", "region must be non-degenerate on every axis"));
            }
        }
        if !(self.duration > 0.0) {
            return Err(SimError::config("duration", "must be > 0"));
        }
        if !(self.frame_interval > 0.0) {
            return Err(SimError::config("frame_interval", "must be > 0"));
        }
        if let TrajectoryKind::Orbit { radius, angular_speed: _, height: _ } = self.trajectory {
            if !(radius > 0.0) {
                return Err(SimError::config("trajectory.radius", "orbit radius must be > 0"));
            }
        }
        if let TrajectoryKind::Waypoints { points } = &self.trajectory {
            if points.is_empty() {
                return Err(SimError::config("trajectory.points", "waypoint list must be nonempty"));
            }
        }
        if let Some(intr) = &self.intrinsics {
            intr.validate().map_err(|e| SimError::config("intrinsics", e.to_string()))?;
        }
        Ok(())
    }

    pub fn region_center(&self) -> Vec3 {
        Vec3::new(
            (self.region.min[0] + self.region.max[0]) / 2.0,
            (self.region.min[1] + self.region.max[1]) / 2.0,
            (self.region.min[2] + self.region.max[2]) / 2.0,
        )
    }
}

fn default_intrinsics() -> CameraIntrinsics {
    CameraIntrinsics {
        fx: 500.0,
        fy: 500.0,
        cx: 320.0,
        cy: 240.0,
        width: 640,
        height: 480,
        near: 0.05,
        far: 100.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartupLatency {
    Constant(f64),
    Uniform([f64; 2]),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AmbiguityPolicy {
    /// Guess uniformly among the labels the view cannot discriminate.
    GuessUniformInSet,
    EmitOos,
    EmitTrueLabel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistractorPolicy {
    /// Emit nothing for distractor objects.
    Silent,
    EmitOos,
    /// With probability `prob` (drawn once per distractor object) the
    /// detector consistently mislabels it with a random in-scope class;
    /// otherwise it emits OOS.
    Mislabel { prob: f64 },
}

/// Parametric detector used to synthesize prediction streams with known
/// ground-truth behavior.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorModel {
    pub startup_latency: StartupLatency,
    pub per_frame_detect_prob: f64,
    /// Isotropic Gaussian position noise, meters per axis.
    pub localization_noise_sigma: f64,
    /// Per true label, a distribution over predicted labels; "OOS" is a
    /// valid key. Labels absent from the map are predicted faithfully.
    #[serde(default)]
    pub confusion: BTreeMap<String, BTreeMap<String, f64>>,
    pub ambiguity_policy: AmbiguityPolicy,
    pub distractor_policy: DistractorPolicy,
    /// Per emitted event, probability that the reported track identity
    /// changes from then on.
    #[serde(default)]
    pub id_switch_prob: f64,
    /// Confidence drawn uniformly from this inclusive range.
    #[serde(default = "default_confidence_range")]
    pub confidence_range: [f64; 2],
}

fn default_confidence_range() -> [f64; 2] {
    [1.0, 1.0]
}

impl DetectorModel {
    /// An error-free detector: no delay, detects every frame, exact
    /// positions, faithful labels, stable identities.
    pub fn ideal() -> Self {
        DetectorModel {
            startup_latency: StartupLatency::Constant(0.0),
            per_frame_detect_prob: 1.0,
            localization_noise_sigma: 0.0,
            confusion: BTreeMap::new(),
            ambiguity_policy: AmbiguityPolicy::EmitTrueLabel,
            distractor_policy: DistractorPolicy::EmitOos,
            id_switch_prob: 0.0,
            confidence_range: [1.0, 1.0],
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        match self.startup_latency {
            StartupLatency::Constant(c) if c < 0.0 => {
                return Err(SimError::config("startup_latency", "must be >= 0"));
            }
            StartupLatency::Uniform([a, b]) if !(0.0 <= a && a <= b) => {
                return Err(SimError::config("startup_latency", "uniform bounds must satisfy 0 <= a <= b"));
            }
            _ => {}
        }
        if !(0.0..=1.0).contains(&self.per_frame_detect_prob) {
            return Err(SimError::config("per_frame_detect_prob", "must be in [0, 1]"));
        }
        if !(self.localization_noise_sigma >= 0.0) {
            return Err(SimError::config("localization_noise_sigma", "must be >= 0"));
        }
        for (label, dist) in &self.confusion {
            let sum: f64 = dist.values().sum();
            if dist.values().any(|&p| !(0.0..=1.0).contains(&p)) || (sum - 1.0).abs() > 1e-9 {
                return Err(SimError::config(
                    "confusion",
                    format!("distribution for {label:?} must be normalized probabilities"),
                ));
            }
        }
        if let DistractorPolicy::Mislabel { prob } = self.distractor_policy {
            if !(0.0..=1.0).contains(&prob) {
                return Err(SimError::config("distractor_policy.prob", "must be in [0, 1]"));
            }
        }
        if !(0.0..=1.0).contains(&self.id_switch_prob) {
            return Err(SimError::config("id_switch_prob", "must be in [0, 1]"));
        }
        let [lo, hi] = self.confidence_range;
        if !(0.0 <= lo && lo <= hi && hi <= 1.0) {
            return Err(SimError::config("confidence_range", "must satisfy 0 <= lo <= hi <= 1"));
        }
        Ok(())
    }
}

/// Top-level simulator config file: a scene and an optional detector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub scene: SceneConfig,
    #[serde(default)]
    pub detector: Option<DetectorModel>,
}

/// Generate a deterministic scenario from the config seed: non-overlapping
/// static cuboid objects in the placement region, the configured camera
/// trajectory, and ambiguity intervals derived from the cuboid ambiguity
/// oracle.
pub fn generate_scene(config: &SceneConfig) -> Result<Scenario, SimError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let in_scope_labels: Vec<String> = config.in_scope_shapes.keys().cloned().collect();
    let distractor_labels: Vec<String> = config.distractor_shapes.keys().cloned().collect();

    let mut objects: Vec<ObjectTrack> = Vec::new();
    let mut placed: Vec<(Vec3, Vec3)> = Vec::new(); // (center, half-extent)
    let mut attempts = 0usize;

    let place = |rng: &mut ChaCha8Rng,
                     label: &str,
                     dims: [f64; 3],
                     object_id: String,
                     placed: &mut Vec<(Vec3, Vec3)>,
                     attempts: &mut usize|
     -> Result<ObjectTrack, SimError> {
        let half = Vec3::new(dims[0] / 2.0, dims[1] / 2.0, dims[2] / 2.0);
        loop {
            if *attempts >= MAX_PLACEMENT_ATTEMPTS {
                return Err(SimError::Placement { attempts: *attempts });
            }
            *attempts += 1;
            let mut center = Vec3::ZERO;
            let mut fits = true;
            for axis in 0..3 {
                let lo = config.region.min[axis] + [half.x, half.y, half.z][axis];
                let hi = config.region.max[axis] - [half.x, half.y, half.z][axis];
                if lo >= hi {
                    fits = false;
                    break;
                }
                let v = rng.gen_range(lo..hi);
                match axis {
                    0 => center.x = v,
                    1 => center.y = v,
                    _ => center.z = v,
                }
            }
            if !fits {
                return Err(SimError::Placement { attempts: *attempts });
            }
            let overlaps = placed.iter().any(|&(c, h)| {
                (center.x - c.x).abs() < half.x + h.x
                    && (center.y - c.y).abs() < half.y + h.y
                    && (center.z - c.z).abs() < half.z + h.z
            });
            if overlaps {
                continue;
            }
            placed.push((center, half));
            return Ok(ObjectTrack {
                object_id,
                class_label: label.to_string(),
                track: vec![TrackSample { t: 0.0, position: center }],
                extent: half,
                visibility_intervals: None,
                ambiguity_intervals: vec![],
            });
        }
    };

    for i in 0..config.n_in_scope {
        let label = in_scope_labels[rng.gen_range(0..in_scope_labels.len())].clone();
        let dims = config.in_scope_shapes[&label];
        objects.push(place(&mut rng, &label, dims, format!("obj-{i:03}"), &mut placed, &mut attempts)?);
    }
    for i in 0..config.n_distractor {
        let label = distractor_labels[rng.gen_range(0..distractor_labels.len())].clone();
        let dims = config.distractor_shapes[&label];
        objects.push(place(&mut rng, &label, dims, format!("dst-{i:03}"), &mut placed, &mut attempts)?);
    }

    let trajectory = generate_trajectory(config);
    let mut scenario = Scenario {
        schema_version: SCENARIO_SCHEMA_VERSION.to_string(),
        taxonomy: ClassTaxonomy {
            in_scope_labels,
            distractor_labels: distractor_labels.into_iter().collect(),
        },
        camera: CameraConfig {
            intrinsics: config.intrinsics.unwrap_or_else(default_intrinsics),
            trajectory,
        },
        objects,
        frame_interval: config.frame_interval,
        duration: config.duration,
    };

    // Ambiguity intervals from the view-dependent cuboid oracle, for
    // in-scope objects only.
    let shapes: BTreeMap<String, Vec3> = config
        .in_scope_shapes
        .iter()
        .map(|(l, d)| (l.clone(), Vec3::new(d[0] / 2.0, d[1] / 2.0, d[2] / 2.0)))
        .collect();
    let times = scenario.frame_times();
    let fi = scenario.frame_interval;
    let mut per_object_intervals: Vec<Vec<AmbiguityInterval>> = Vec::new();
    for obj in &scenario.objects {
        if !scenario.taxonomy.is_in_scope(&obj.class_label) {
            per_object_intervals.push(vec![]);
            continue;
        }
        let mut intervals: Vec<AmbiguityInterval> = Vec::new();
        let mut run: Option<(f64, f64, BTreeSet<String>)> = None;
        for &t in &times {
            let set = ambiguity_oracle(&scenario, &shapes, &obj.object_id, t);
            let ambiguous = set.len() > 1;
            run = match run.take() {
                Some((start, _, prev_set)) if ambiguous && prev_set == set => {
                    Some((start, t, prev_set))
                }
                Some((start, end, prev_set)) => {
                    intervals.push(AmbiguityInterval {
                        interval: [start, end + fi / 2.0],
                        ambiguity_set: prev_set,
                    });
                    ambiguous.then_some((t, t, set))
                }
                None => ambiguous.then_some((t, t, set)),
            };
        }
        if let Some((start, end, set)) = run {
            intervals.push(AmbiguityInterval { interval: [start, end + fi / 2.0], ambiguity_set: set });
        }
        per_object_intervals.push(intervals);
    }
    for (obj, intervals) in scenario.objects.iter_mut().zip(per_object_intervals) {
        obj.ambiguity_intervals = intervals;
    }

    scenario.validate().expect("generated scenario must validate");
    Ok(scenario)
}

/// Which class labels could present the same visible cuboid dimensions as
/// `object_id` does from the camera pose at `t`, within a 1e-6 m tolerance.
///
/// With one front-facing face (head-on view) only that face's dimension
/// pair is observable; with two or more faces all three dimensions are.
/// The result always contains the object's own class; a singleton means
/// the view discriminates.
pub fn ambiguity_oracle(
    scenario: &Scenario,
    class_half_extents: &BTreeMap<String, Vec3>,
    object_id: &str,
    t: f64,
) -> BTreeSet<String> {
    const EPS: f64 = 1e-6;
    let obj = scenario.object(object_id).expect("object exists");
    let (pose, _) = interpolate_pose(&scenario.camera.trajectory, t).expect("validated trajectory");
    let center = obj.position_at(t);
    let half = obj.extent;

    // Front-facing faces: outward normal points toward the camera.
    let mut visible_axes: Vec<usize> = Vec::new();
    for axis in 0..3 {
        let h = [half.x, half.y, half.z][axis];
        for sign in [-1.0, 1.0] {
            let mut normal = Vec3::ZERO;
            match axis {
                0 => normal.x = sign,
                1 => normal.y = sign,
                _ => normal.z = sign,
            }
            let face_center = center.add(normal.scale(h));
            if normal.dot(pose.position.sub(face_center)) > 0.0 {
                visible_axes.push(axis);
            }
        }
    }
    visible_axes.sort_unstable();
    visible_axes.dedup();

    let full = |v: Vec3| [2.0 * v.x, 2.0 * v.y, 2.0 * v.z];
    let own_dims = full(half);

    let observed: Observation = if visible_axes.len() <= 1 {
        // Head-on: only the face orthogonal to the single visible axis.
        let axis = visible_axes.first().copied().unwrap_or(2);
        Observation::Face(face_dims(own_dims, axis))
    } else {
        Observation::AllDims(sorted3(own_dims))
    };

    let mut set = BTreeSet::new();
    set.insert(obj.class_label.clone());
    for (label, h) in class_half_extents {
        let dims = full(*h);
        let compatible = match &observed {
            Observation::AllDims(d) => {
                let cd = sorted3(dims);
                (0..3).all(|i| (cd[i] - d[i]).abs() <= EPS)
            }
            Observation::Face(pair) => (0..3).any(|axis| {
                let fp = face_dims(dims, axis);
                (fp[0] - pair[0]).abs() <= EPS && (fp[1] - pair[1]).abs() <= EPS
            }),
        };
        if compatible {
            set.insert(label.clone());
        }
    }
    set
}

enum Observation {
    /// Sorted dimension pair of the single visible face.
    Face([f64; 2]),
    /// Sorted full dimension triple.
    AllDims([f64; 3]),
}

fn face_dims(dims: [f64; 3], orthogonal_axis: usize) -> [f64; 2] {
    let mut pair: Vec<f64> = (0..3).filter(|&a| a != orthogonal_axis).map(|a| dims[a]).collect();
    pair.sort_by(|a, b| a.partial_cmp(b).unwrap());
    [pair[0], pair[1]]
}

fn sorted3(mut dims: [f64; 3]) -> [f64; 3] {
    dims.sort_by(|a, b| a.partial_cmp(b).unwrap());
    dims
}

/// Camera trajectory for the configured kind, sampled at the frame
/// interval and always looking at the region center.
pub fn generate_trajectory(config: &SceneConfig) -> CameraTrajectory {
    let center = config.region_center();
    let n = (config.duration / config.frame_interval + 1e-9).floor() as usize;
    let times: Vec<f64> = (0..=n).map(|k| k as f64 * config.frame_interval).collect();
    let samples = match &config.trajectory {
        TrajectoryKind::Orbit { radius, height, angular_speed } => times
            .iter()
            .map(|&t| {
                let theta = angular_speed * t;
                let position = Vec3::new(
                    center.x + radius * theta.cos(),
                    center.y + radius * theta.sin(),
                    center.z + height,
                );
                TrajectorySample { t, position, orientation: look_at(position, center) }
            })
            .collect(),
        TrajectoryKind::Waypoints { points } => {
            let pts: Vec<Vec3> = points.iter().map(|&p| Vec3::from(p)).collect();
            times
                .iter()
                .map(|&t| {
                    let position = if pts.len() == 1 {
                        pts[0]
                    } else {
                        let span = config.duration / (pts.len() - 1) as f64;
                        let seg = ((t / span).floor() as usize).min(pts.len() - 2);
                        let alpha = (t - seg as f64 * span) / span;
                        pts[seg].lerp(pts[seg + 1], alpha.clamp(0.0, 1.0))
                    };
                    TrajectorySample { t, position, orientation: look_at(position, center) }
                })
                .collect()
        }
    };
    CameraTrajectory { samples }
}

/// Orientation with +Z (optical axis) pointing from `from` toward `to`,
/// +X right and +Y down relative to world +Z up.
pub fn look_at(from: Vec3, to: Vec3) -> Quat {
    let forward = to.sub(from).normalized();
    let mut up = Vec3::new(0.0, 0.0, 1.0);
    if forward.dot(up).abs() > 0.999 {
        up = Vec3::new(0.0, 1.0, 0.0);
    }
    let right = forward.cross(up).normalized();
    let down = forward.cross(right);
    Quat::from_columns(right, down, forward)
}

/// Simulate the parametric detector over a scenario. Deterministic given
/// (scenario, model, seed).
pub fn simulate_detector(scenario: &Scenario, model: &DetectorModel, seed: u64) -> PredictionStream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let timeline = compute_visibility(scenario);

    // Per-object draws, in scenario object order.
    struct ObjSim {
        delay: f64,
        /// For distractors under the mislabel policy: the consistently
        /// wrong in-scope label, if this object was drawn as mislabeled.
        mislabel: Option<String>,
        track_seq: u32,
    }
    let mut sims: Vec<ObjSim> = Vec::with_capacity(scenario.objects.len());
    for obj in &scenario.objects {
        let delay = match model.startup_latency {
            StartupLatency::Constant(c) => c,
            StartupLatency::Uniform([a, b]) => {
                if a < b { rng.gen_range(a..b) } else { a }
            }
        };
        let mislabel = if scenario.taxonomy.is_distractor(&obj.class_label) {
            match model.distractor_policy {
                DistractorPolicy::Mislabel { prob } if rng.gen::<f64>() < prob => {
                    let labels = &scenario.taxonomy.in_scope_labels;
                    Some(labels[rng.gen_range(0..labels.len())].clone())
                }
                _ => None,
            }
        } else {
            None
        };
        sims.push(ObjSim { delay, mislabel, track_seq: 0 });
    }

    let normal = StandardNormal;
    let mut events: Vec<PredictionEvent> = Vec::new();
    for &t in &scenario.frame_times() {
        for (oi, obj) in scenario.objects.iter().enumerate() {
            if !timeline.visible_at(&obj.object_id, t) {
                continue;
            }
            let entry = timeline.entry_time(&obj.object_id).unwrap();
            if t < entry + sims[oi].delay - 1e-9 {
                continue;
            }
            if model.per_frame_detect_prob < 1.0 && rng.gen::<f64>() >= model.per_frame_detect_prob
            {
                continue;
            }

            let is_distractor = scenario.taxonomy.is_distractor(&obj.class_label);
            let label = if is_distractor {
                match &model.distractor_policy {
                    DistractorPolicy::Silent => continue,
                    DistractorPolicy::EmitOos => Label::Oos,
                    DistractorPolicy::Mislabel { .. } => match &sims[oi].mislabel {
                        Some(wrong) => Label::Class(wrong.clone()),
                        None => Label::Oos,
                    },
                }
            } else {
                let ambiguity = obj
                    .ambiguity_intervals
                    .iter()
                    .find(|iv| t >= iv.interval[0] && t <= iv.interval[1]);
                match ambiguity {
                    Some(iv) => match model.ambiguity_policy {
                        AmbiguityPolicy::EmitTrueLabel => Label::Class(obj.class_label.clone()),
                        AmbiguityPolicy::EmitOos => Label::Oos,
                        AmbiguityPolicy::GuessUniformInSet => {
                            let choices: Vec<&String> = iv.ambiguity_set.iter().collect();
                            Label::Class(choices[rng.gen_range(0..choices.len())].clone())
                        }
                    },
                    None => sample_confusion(&mut rng, model, &obj.class_label),
                }
            };

            let truth = obj.position_at(t);
            let pos = if model.localization_noise_sigma > 0.0 {
                let s = model.localization_noise_sigma;
                let dx: f64 = normal.sample(&mut rng);
                let dy: f64 = normal.sample(&mut rng);
                let dz: f64 = normal.sample(&mut rng);
                Vec3::new(truth.x + s * dx, truth.y + s * dy, truth.z + s * dz)
            } else {
                truth
            };

            if model.id_switch_prob > 0.0 && rng.gen::<f64>() < model.id_switch_prob {
                sims[oi].track_seq += 1;
            }
            let [clo, chi] = model.confidence_range;
            let conf = if clo < chi { rng.gen_range(clo..chi) } else { clo };

            events.push(PredictionEvent {
                t,
                label,
                pos,
                conf,
                track_id: Some(format!("trk-{}-{}", obj.object_id, sims[oi].track_seq)),
            });
        }
    }

    let mut stream = PredictionStream::from_events(events);
    stream.source_metadata.insert("generator".into(), "doc-eval simulator".into());
    stream.source_metadata.insert("rng".into(), "chacha8".into());
    stream.source_metadata.insert("seed".into(), seed.to_string());
    stream
}

fn sample_confusion(rng: &mut ChaCha8Rng, model: &DetectorModel, truth: &str) -> Label {
    match model.confusion.get(truth) {
        None => Label::Class(truth.to_string()),
        Some(dist) => {
            let mut draw = rng.gen::<f64>();
            let mut last: Option<&String> = None;
            for (label, &p) in dist {
                last = Some(label);
                if draw < p {
                    return Label::from(label.clone());
                }
                draw -= p;
            }
            // Floating-point remainder lands on the last entry.
            Label::from(last.expect("nonempty distribution").clone())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::project_point;

    fn basic_config() -> SceneConfig {
        SceneConfig {
            seed: 42,
            n_in_scope: 3,
            n_distractor: 2,
            in_scope_shapes: [
                ("cube".to_string(), [0.4, 0.4, 0.4]),
                ("rect_cube".to_string(), [0.4, 0.4, 0.8]),
            ]
            .into(),
            distractor_shapes: [("tile".to_string(), [0.6, 0.6, 0.1])].into(),
            region: Region { min: [-2.0, -2.0, 0.0], max: [2.0, 2.0, 1.5] },
            duration: 5.0,
            frame_interval: 0.1,
            trajectory: TrajectoryKind::Orbit {
                radius: 6.0,
                height: 2.0,
                angular_speed: std::f64::consts::TAU / 5.0,
            },
            intrinsics: None,
        }
    }

    #[test]
    fn same_seed_same_scene_bytes() {
        let a = generate_scene(&basic_config()).unwrap();
        let b = generate_scene(&basic_config()).unwrap();
        assert_eq!(
            crate::scenario::scenario_to_json(&a),
            crate::scenario::scenario_to_json(&b)
        );
    }

    #[test]
    fn single_static_object_is_always_visible() {
        let config = SceneConfig {
            n_in_scope: 1,
            n_distractor: 0,
            trajectory: TrajectoryKind::Waypoints { points: vec![[6.0, 0.0, 1.0]] },
            ..basic_config()
        };
        let scenario = generate_scene(&config).unwrap();
        assert_eq!(scenario.objects.len(), 1);
        let tl = compute_visibility(&scenario);
        let intervals = tl.intervals(&scenario.objects[0].object_id);
        assert_eq!(intervals.len(), 1);
        assert_eq!(intervals[0], [0.0, 5.0]);
    }

    #[test]
    fn overpacked_region_fails_placement() {
        let config = SceneConfig {
            n_in_scope: 40,
            n_distractor: 0,
            region: Region { min: [-0.5, -0.5, 0.0], max: [0.5, 0.5, 0.5] },
            ..basic_config()
        };
        match generate_scene(&config) {
            Err(SimError::Placement { .. }) => {}
            other => panic!("expected placement error, got {other:?}"),
        }
    }

    #[test]
    fn orbit_geometry_holds() {
        let config = basic_config();
        let traj = generate_trajectory(&config);
        let center = config.region_center();
        let first = traj.samples.first().unwrap();
        let last = traj.samples.last().unwrap();
        // Full revolution: endpoints within one sample arc.
        let arc = 6.0 * std::f64::consts::TAU / 5.0 * config.frame_interval;
        assert!(crate::math::distance3(first.position, last.position) <= arc + 1e-9);
        for s in &traj.samples {
            let horizontal = Vec3::new(s.position.x - center.x, s.position.y - center.y, 0.0);
            assert!((horizontal.norm() - 6.0).abs() < 1e-9);
            // Look-at constraint: the region center projects onto the
            // principal point.
            let intr = default_intrinsics();
            let pose = crate::math::Pose { position: s.position, orientation: s.orientation };
            let (u, v, _) = project_point(&pose, &intr, center).unwrap();
            assert!((u - intr.cx).abs() < 1.0 && (v - intr.cy).abs() < 1.0, "u={u} v={v}");
        }
    }

    fn two_class_scene_with_object_at(
        label: &str,
        dims: [f64; 3],
        camera: Vec3,
    ) -> (Scenario, BTreeMap<String, Vec3>) {
        let scenario = Scenario {
            schema_version: SCENARIO_SCHEMA_VERSION.into(),
            taxonomy: ClassTaxonomy {
                in_scope_labels: vec!["cube".into(), "rect_cube".into()],
                distractor_labels: BTreeSet::new(),
            },
            camera: CameraConfig {
                intrinsics: default_intrinsics(),
                trajectory: CameraTrajectory {
                    samples: vec![TrajectorySample {
                        t: 0.0,
                        position: camera,
                        orientation: look_at(camera, Vec3::ZERO),
                    }],
                },
            },
            objects: vec![ObjectTrack {
                object_id: "obj".into(),
                class_label: label.into(),
                track: vec![TrackSample { t: 0.0, position: Vec3::ZERO }],
                extent: Vec3::new(dims[0] / 2.0, dims[1] / 2.0, dims[2] / 2.0),
                visibility_intervals: None,
                ambiguity_intervals: vec![],
            }],
            frame_interval: 0.1,
            duration: 1.0,
        };
        let shapes: BTreeMap<String, Vec3> = [
            ("cube".to_string(), Vec3::new(0.5, 0.5, 0.5)),
            ("rect_cube".to_string(), Vec3::new(0.5, 0.5, 1.0)),
        ]
        .into();
        (scenario, shapes)
    }

    #[test]
    fn head_on_square_face_is_ambiguous() {
        // 1x1x2 cuboid seen head-on along its long axis: only the 1x1 face
        // shows, indistinguishable from the unit cube.
        let (scenario, shapes) =
            two_class_scene_with_object_at("rect_cube", [1.0, 1.0, 2.0], Vec3::new(0.0, 0.0, 5.0));
        let set = ambiguity_oracle(&scenario, &shapes, "obj", 0.0);
        let expect: BTreeSet<String> = ["cube".to_string(), "rect_cube".to_string()].into();
        assert_eq!(set, expect);
    }

    #[test]
    fn side_face_discriminates() {
        let (scenario, shapes) =
            two_class_scene_with_object_at("rect_cube", [1.0, 1.0, 2.0], Vec3::new(5.0, 0.0, 0.0));
        let set = ambiguity_oracle(&scenario, &shapes, "obj", 0.0);
        let expect: BTreeSet<String> = ["rect_cube".to_string()].into();
        assert_eq!(set, expect);
    }

    #[test]
    fn single_class_taxonomy_is_always_singleton() {
        let (mut scenario, _) =
            two_class_scene_with_object_at("cube", [1.0, 1.0, 1.0], Vec3::new(0.0, 0.0, 5.0));
        scenario.taxonomy.in_scope_labels = vec!["cube".into()];
        let shapes: BTreeMap<String, Vec3> =
            [("cube".to_string(), Vec3::new(0.5, 0.5, 0.5))].into();
        let set = ambiguity_oracle(&scenario, &shapes, "obj", 0.0);
        assert_eq!(set.len(), 1);
    }

    #[test]
    fn ambiguity_is_symmetric_for_matching_faces() {
        // A cube seen head-on presents a 1x1 face, which rect_cube can also
        // present, so each class appears in the other's set.
        let (scenario, shapes) =
            two_class_scene_with_object_at("cube", [1.0, 1.0, 1.0], Vec3::new(0.0, 0.0, 5.0));
        let set = ambiguity_oracle(&scenario, &shapes, "obj", 0.0);
        assert!(set.contains("rect_cube"));
        let (scenario2, shapes2) =
            two_class_scene_with_object_at("rect_cube", [1.0, 1.0, 2.0], Vec3::new(0.0, 0.0, 5.0));
        let set2 = ambiguity_oracle(&scenario2, &shapes2, "obj", 0.0);
        assert!(set2.contains("cube"));
    }

    #[test]
    fn ideal_detector_hits_every_visible_frame_exactly() {
        let config = SceneConfig { n_distractor: 0, ..basic_config() };
        let scenario = generate_scene(&config).unwrap();
        let stream = simulate_detector(&scenario, &DetectorModel::ideal(), 1);
        let timeline = compute_visibility(&scenario);
        let expected: usize = scenario
            .frame_times()
            .iter()
            .map(|&t| {
                scenario
                    .objects
                    .iter()
                    .filter(|o| timeline.visible_at(&o.object_id, t))
                    .count()
            })
            .sum();
        assert_eq!(stream.events.len(), expected);
        for e in &stream.events {
            assert_eq!(e.conf, 1.0);
        }
    }

    #[test]
    fn startup_delay_suppresses_early_predictions() {
        let config = SceneConfig { n_distractor: 0, ..basic_config() };
        let scenario = generate_scene(&config).unwrap();
        let model = DetectorModel {
            startup_latency: StartupLatency::Constant(0.5),
            ..DetectorModel::ideal()
        };
        let stream = simulate_detector(&scenario, &model, 1);
        let timeline = compute_visibility(&scenario);
        for e in &stream.events {
            // Every event's matched object entered at least 0.5 s earlier.
            let earliest_entry = scenario
                .objects
                .iter()
                .filter_map(|o| timeline.entry_time(&o.object_id))
                .fold(f64::INFINITY, f64::min);
            assert!(e.t >= earliest_entry + 0.5 - 1e-9);
        }
    }

    #[test]
    fn same_seed_same_prediction_bytes() {
        let scenario = generate_scene(&basic_config()).unwrap();
        let model = DetectorModel {
            per_frame_detect_prob: 0.7,
            localization_noise_sigma: 0.05,
            ..DetectorModel::ideal()
        };
        let a = simulate_detector(&scenario, &model, 9);
        let b = simulate_detector(&scenario, &model, 9);
        assert_eq!(
            crate::scenario::predictions_to_jsonl(&a),
            crate::scenario::predictions_to_jsonl(&b)
        );
    }
}
