use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::candidates::WaypointCandidate;

/// Memory of the last alternative chosen, for anti-jitter selection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectionState {
    pub previous: Option<Vector3<f64>>,
    pub alpha: f64,
}

impl SelectionState {
    pub fn new(alpha: f64) -> Self {
        assert!((0.0..=1.0).contains(&alpha), "alpha must lie in [0, 1]");
        Self {
            previous: None,
            alpha,
        }
    }

    /// `alpha |AC| + (1 - alpha) |AB|`, or `|AC|` without a previous
    /// alternative. A is the candidate, B the previous alternative and C the
    /// commanded waypoint.
    pub fn cost(&self, candidate: &Vector3<f64>, commanded: &Vector3<f64>) -> f64 {
        let ac = (candidate - commanded).norm();
        match self.previous {
            Some(b) => self.alpha * ac + (1.0 - self.alpha) * (candidate - b).norm(),
            None => ac,
        }
    }
}

/// Index of the cheapest candidate; the earliest wins ties. `None` for an
/// empty set.
pub fn select_best(
    candidates: &[WaypointCandidate],
    commanded: &Vector3<f64>,
    sel: &SelectionState,
) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, c) in candidates.iter().enumerate() {
        let cost = sel.cost(&c.position, commanded);
        if best.is_none_or(|(_, b)| cost < b) {
            best = Some((i, cost));
        }
    }
    best.map(|(i, _)| i)
}
