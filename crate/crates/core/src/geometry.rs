//! Pinhole projection, frustum visibility, projected 2D boxes (legacy
//! scoring only), IoU, and 3D distance.
//!
//! Boundary convention: a point counts as visible only strictly inside the
//! image rectangle and strictly between the near and far planes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::math::{Pose, Vec3};
use crate::scenario::{CameraIntrinsics, Scenario, interpolate_pose};

/// Axis-aligned 2D box in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BBox2D {
    pub x_min: f64,
    pub y_min: f64,
    pub x_max: f64,
    pub y_max: f64,
}

impl BBox2D {
    pub fn area(&self) -> f64 {
        (self.x_max - self.x_min).max(0.0) * (self.y_max - self.y_min).max(0.0)
    }
}

/// Intersection over union of two boxes; 0 by convention when the union has
/// zero area.
pub fn iou(a: &BBox2D, b: &BBox2D) -> f64 {
    let ix = (a.x_max.min(b.x_max) - a.x_min.max(b.x_min)).max(0.0);
    let iy = (a.y_max.min(b.y_max) - a.y_min.max(b.y_min)).max(0.0);
    let inter = ix * iy;
    let union = a.area() + b.area() - inter;
    if union <= 0.0 {
        0.0
    } else {
        inter / union
    }
}

/// Project a world point through the camera. Returns `(u, v, depth)` or
/// `None` when the depth falls outside `(near, far)`.
pub fn project_point(
    pose: &Pose,
    intrinsics: &CameraIntrinsics,
    world_point: Vec3,
) -> Option<(f64, f64, f64)> {
    let local = pose.world_to_local(world_point);
    let depth = local.z;
    if depth <= intrinsics.near || depth >= intrinsics.far {
        return None;
    }
    let u = intrinsics.cx + intrinsics.fx * local.x / depth;
    let v = intrinsics.cy + intrinsics.fy * local.y / depth;
    Some((u, v, depth))
}

/// True iff the point projects strictly inside the image rectangle with
/// depth strictly between the clip planes.
pub fn in_frustum(pose: &Pose, intrinsics: &CameraIntrinsics, point: Vec3) -> bool {
    match project_point(pose, intrinsics, point) {
        Some((u, v, _)) => {
            u > 0.0 && u < intrinsics.width as f64 && v > 0.0 && v < intrinsics.height as f64
        }
        None => false,
    }
}

/// Per-object visibility intervals at frame resolution. Each interval spans
/// the sample times of one maximal run of visible frames, so a single
/// visible frame yields a degenerate `[t, t]` interval.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct VisibilityTimeline {
    pub per_object: BTreeMap<String, Vec<[f64; 2]>>,
}

impl VisibilityTimeline {
    pub fn intervals(&self, object_id: &str) -> &[[f64; 2]] {
        self.per_object.get(object_id).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn visible_at(&self, object_id: &str, t: f64) -> bool {
        const EPS: f64 = 1e-9;
        self.intervals(object_id)
            .iter()
            .any(|iv| t >= iv[0] - EPS && t <= iv[1] + EPS)
    }

    /// Start of the first visibility interval, i.e. when the object first
    /// enters the view.
    pub fn entry_time(&self, object_id: &str) -> Option<f64> {
        self.intervals(object_id).first().map(|iv| iv[0])
    }

    /// Total visible span, summed over intervals.
    pub fn exposure(&self, object_id: &str) -> f64 {
        self.intervals(object_id).iter().map(|iv| iv[1] - iv[0]).sum()
    }
}

/// Compute per-object visibility sampled at the scenario frame interval:
/// an object is visible at a frame iff its centroid is in the frustum at
/// the interpolated camera pose. Authored `visibility_intervals` override
/// the geometric computation entirely (clipped to `[0, duration]`).
pub fn compute_visibility(scenario: &Scenario) -> VisibilityTimeline {
    let times = scenario.frame_times();
    let poses: Vec<Pose> = times
        .iter()
        .map(|&t| interpolate_pose(&scenario.camera.trajectory, t).expect("validated trajectory").0)
        .collect();
    let mut per_object = BTreeMap::new();
    for obj in &scenario.objects {
        let intervals = if let Some(authored) = &obj.visibility_intervals {
            authored
                .iter()
                .filter_map(|iv| {
                    let t0 = iv[0].max(0.0);
                    let t1 = iv[1].min(scenario.duration);
                    (t0 < t1).then_some([t0, t1])
                })
                .collect()
        } else {
            let mut intervals: Vec<[f64; 2]> = Vec::new();
            let mut run_start: Option<f64> = None;
            for (k, &t) in times.iter().enumerate() {
                let visible =
                    in_frustum(&poses[k], &scenario.camera.intrinsics, obj.position_at(t));
                match (visible, run_start) {
                    (true, None) => run_start = Some(t),
                    (true, Some(_)) => {}
                    (false, Some(start)) => {
                        intervals.push([start, times[k - 1]]);
                        run_start = None;
                    }
                    (false, None) => {}
                }
            }
            if let Some(start) = run_start {
                intervals.push([start, *times.last().unwrap()]);
            }
            intervals
        };
        per_object.insert(obj.object_id.clone(), intervals);
    }
    VisibilityTimeline { per_object }
}

/// Axis-aligned box over the projections of the 8 extent corners, clipped
/// to the image. `None` if fewer than 2 corners project between the clip
/// planes or the clipped box is empty.
pub fn projected_bbox(
    pose: &Pose,
    intrinsics: &CameraIntrinsics,
    centroid: Vec3,
    extent: Vec3,
) -> Option<BBox2D> {
    let mut n = 0;
    let (mut x_min, mut y_min) = (f64::INFINITY, f64::INFINITY);
    let (mut x_max, mut y_max) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for sx in [-1.0, 1.0] {
        for sy in [-1.0, 1.0] {
            for sz in [-1.0, 1.0] {
                let corner = centroid.add(Vec3::new(sx * extent.x, sy * extent.y, sz * extent.z));
                if let Some((u, v, _)) = project_point(pose, intrinsics, corner) {
                    n += 1;
                    x_min = x_min.min(u);
                    y_min = y_min.min(v);
                    x_max = x_max.max(u);
                    y_max = y_max.max(v);
                }
            }
        }
    }
    if n < 2 {
        return None;
    }
    let bbox = BBox2D {
        x_min: x_min.max(0.0),
        y_min: y_min.max(0.0),
        x_max: x_max.min(intrinsics.width as f64),
        y_max: y_max.min(intrinsics.height as f64),
    };
    (bbox.x_min < bbox.x_max && bbox.y_min < bbox.y_max).then_some(bbox)
}
