//! Prediction-to-truth assignment: per-frame 3D distance matching for the
//! world-coordinate regime and IoU matching for the legacy 2D regime.
//!
//! Both regimes use an optimal assignment (Jonker-Volgonant style augmenting
//! paths), never greedy nearest-first, so the result does not depend on
//! input iteration order. Infeasible pairs (beyond the distance threshold /
//! below the IoU threshold) are priced high enough that the solver first
//! maximizes the number of feasible pairs, then optimizes total score.

use crate::geometry::{BBox2D, iou};
use crate::math::{Vec3, distance3};

/// Cost assigned to pairs that must never match.
const INFEASIBLE: f64 = 1e12;

/// Minimum-cost assignment of rows to columns. Entries >= `INFEASIBLE / 2`
/// never appear in the result. Deterministic for a fixed matrix.
pub fn min_cost_matching(cost: &[Vec<f64>]) -> Vec<(usize, usize)> {
    let n_rows = cost.len();
    let n_cols = cost.first().map(Vec::len).unwrap_or(0);
    if n_rows == 0 || n_cols == 0 {
        return Vec::new();
    }
    let assignment = if n_rows <= n_cols {
        solve(&|i, j| cost[i][j], n_rows, n_cols)
            .into_iter()
            .enumerate()
            .filter_map(|(j, row)| row.map(|i| (i, j)))
            .collect::<Vec<_>>()
    } else {
        solve(&|i, j| cost[j][i], n_cols, n_rows)
            .into_iter()
            .enumerate()
            .filter_map(|(j, row)| row.map(|i| (j, i)))
            .collect::<Vec<_>>()
    };
    let mut pairs: Vec<(usize, usize)> = assignment
        .into_iter()
        .filter(|&(i, j)| cost[i][j] < INFEASIBLE / 2.0)
        .collect();
    pairs.sort_unstable();
    pairs
}

/// Augmenting-path assignment for `n <= m`. Returns, per column, the row
/// assigned to it (every row ends up assigned).
fn solve(cost: &dyn Fn(usize, usize) -> f64, n: usize, m: usize) -> Vec<Option<usize>> {
    // 1-indexed potentials with column 0 as the virtual start column.
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; m + 1];
    let mut assigned = vec![0usize; m + 1]; // row (1-based) matched to column, 0 = free
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        assigned[0] = i;
        let mut j0 = 0usize;
        let mut min_to = vec![f64::INFINITY; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = assigned[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=m {
                if !used[j] {
                    let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                    if cur < min_to[j] {
                        min_to[j] = cur;
                        way[j] = j0;
                    }
                    if min_to[j] < delta {
                        delta = min_to[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[assigned[j]] += delta;
                    v[j] -= delta;
                } else {
                    min_to[j] -= delta;
                }
            }
            j0 = j1;
            if assigned[j0] == 0 {
                break;
            }
        }
        // Walk the augmenting path back to the start.
        while j0 != 0 {
            let j1 = way[j0];
            assigned[j0] = assigned[j1];
            j0 = j1;
        }
    }
    (0..=m)
        .skip(1)
        .map(|j| (assigned[j] != 0).then(|| assigned[j] - 1))
        .collect()
}

/// A ground-truth object's state at one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct GtState {
    pub object_id: String,
    pub position: Vec3,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchPair {
    pub prediction_index: usize,
    pub object_id: String,
    /// 3D distance in meters (world regime) or IoU (legacy regime).
    pub score: f64,
}

/// Assignment result for one frame.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FrameMatchResult {
    pub t: f64,
    pub pairs: Vec<MatchPair>,
    pub unmatched_predictions: Vec<usize>,
    /// Restricted to objects visible at `t`.
    pub unmatched_objects: Vec<String>,
}

/// Match predictions to visible objects by 3D world distance. Pairs farther
/// apart than `tau_loc` never match; class labels do not constrain matching
/// (classification correctness is scored downstream). The assignment
/// minimizes total distance over a maximum set of feasible pairs.
pub fn match_frame(
    t: f64,
    prediction_positions: &[Vec3],
    objects: &[GtState],
    tau_loc: f64,
) -> FrameMatchResult {
    // Canonical object order for deterministic tie-breaking.
    let mut order: Vec<usize> = (0..objects.len()).collect();
    order.sort_by(|&a, &b| objects[a].object_id.cmp(&objects[b].object_id));
    let cost: Vec<Vec<f64>> = order
        .iter()
        .map(|&oi| {
            prediction_positions
                .iter()
                .map(|&p| {
                    let d = distance3(objects[oi].position, p);
                    if d <= tau_loc { d } else { INFEASIBLE }
                })
                .collect()
        })
        .collect();
    let matched = min_cost_matching(&cost);
    build_result(t, matched, &order, objects, prediction_positions.len(), |oi, pi| {
        distance3(objects[oi].position, prediction_positions[pi])
    })
}

/// Match predicted boxes to ground-truth boxes by IoU. Pairs with IoU below
/// `iou_threshold` never match; the assignment maximizes total IoU over a
/// maximum set of feasible pairs.
pub fn match_iou(
    t: f64,
    predicted: &[BBox2D],
    ground_truth: &[(String, BBox2D)],
    iou_threshold: f64,
) -> FrameMatchResult {
    let mut order: Vec<usize> = (0..ground_truth.len()).collect();
    order.sort_by(|&a, &b| ground_truth[a].0.cmp(&ground_truth[b].0));
    let cost: Vec<Vec<f64>> = order
        .iter()
        .map(|&oi| {
            predicted
                .iter()
                .map(|p| {
                    let overlap = iou(&ground_truth[oi].1, p);
                    if overlap >= iou_threshold { 1.0 - overlap } else { INFEASIBLE }
                })
                .collect()
        })
        .collect();
    let matched = min_cost_matching(&cost);
    let states: Vec<GtState> = ground_truth
        .iter()
        .map(|(id, _)| GtState { object_id: id.clone(), position: Vec3::ZERO })
        .collect();
    build_result(t, matched, &order, &states, predicted.len(), |oi, pi| {
        iou(&ground_truth[oi].1, &predicted[pi])
    })
}

fn build_result(
    t: f64,
    matched: Vec<(usize, usize)>,
    order: &[usize],
    objects: &[GtState],
    n_predictions: usize,
    score: impl Fn(usize, usize) -> f64,
) -> FrameMatchResult {
    let mut pairs = Vec::with_capacity(matched.len());
    let mut pred_used = vec![false; n_predictions];
    let mut obj_used = vec![false; objects.len()];
    for (row, pi) in matched {
        let oi = order[row];
        pred_used[pi] = true;
        obj_used[oi] = true;
        pairs.push(MatchPair {
            prediction_index: pi,
            object_id: objects[oi].object_id.clone(),
            score: score(oi, pi),
        });
    }
    pairs.sort_by(|a, b| {
        a.object_id
            .cmp(&b.object_id)
            .then(a.prediction_index.cmp(&b.prediction_index))
    });
    let unmatched_predictions = (0..n_predictions).filter(|&i| !pred_used[i]).collect();
    let mut unmatched_objects: Vec<String> = objects
        .iter()
        .enumerate()
        .filter(|&(i, _)| !obj_used[i])
        .map(|(_, o)| o.object_id.clone())
        .collect();
    unmatched_objects.sort();
    FrameMatchResult { t, pairs, unmatched_predictions, unmatched_objects }
}
