//! Deterministic evaluation engine and scenario simulator for real-time
//! 3D object comprehension systems.
//!
//! The crate scores prediction streams against world-coordinate ground
//! truth on two regimes side by side: the classic per-frame 2D detection
//! metrics (IoU matching, precision/recall, average precision) and a
//! comprehension-oriented suite built around detection latency against an
//! acceptable-latency budget, OOS-aware confusion accounting, ambiguity
//! neutrality, 3D localization error, and tracking continuity. A seeded
//! simulator generates scenarios and parametric detector outputs so every
//! metric has a closed-form or constructed oracle.

pub mod error;
pub mod geometry;
pub mod matching;
pub mod math;
pub mod metrics;
pub mod pipeline;
pub mod report;
pub mod scenario;
pub mod simulator;

pub use error::{DataError, SimError};
pub use geometry::{compute_visibility, in_frustum, iou, project_point, projected_bbox, BBox2D, VisibilityTimeline};
pub use matching::{match_frame, match_iou, FrameMatchResult, GtState, MatchPair};
pub use math::{distance3, Pose, Quat, Vec3};
pub use metrics::doc::EvaluationConfig;
pub use metrics::ConfusionCounts;
pub use pipeline::evaluate;
pub use report::{load_report, report_to_json, save_report, scenario_digest, MetricReport};
pub use scenario::{
    interpolate_pose, load_predictions, load_scenario, save_predictions, save_scenario,
    ClassTaxonomy, Label, ObjectTrack, PredictionEvent, PredictionStream, Scenario,
};
pub use simulator::{
    ambiguity_oracle, generate_scene, generate_trajectory, simulate_detector, DetectorModel,
    SceneConfig, SimulationConfig,
};
