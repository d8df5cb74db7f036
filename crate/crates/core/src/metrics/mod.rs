//! Metric computation: the legacy per-frame detection regime and the
//! comprehension-oriented regime (latency, ambiguity, OOS accounting,
//! 3D localization, tracking continuity).

pub mod doc;
pub mod legacy;

use serde::{Deserialize, Serialize};

/// TP/FP/FN/TN counts. `tn` is meaningful only in regimes that define it
/// (the OOS regimes); the legacy detection regime leaves it 0 by
/// construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }
}
