use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::cloud::{CloudPoint, PointCloud};
use crate::trajectory::Aabb;

/// Per-axis half-extents of the collision and warning boxes around each
/// trajectory sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClearanceSpec {
    pub l_coll: Vector3<f64>,
    pub l_warn: Vector3<f64>,
}

impl ClearanceSpec {
    /// Vehicle half-extent plus 0.3 m for collision, another 0.5 m for the
    /// warning zone.
    pub fn for_vehicle(half_extent: Vector3<f64>) -> Self {
        let l_coll = half_extent.add_scalar(0.3);
        Self {
            l_coll,
            l_warn: l_coll.add_scalar(0.5),
        }
    }

    pub fn uniform(l_coll: f64, l_warn: f64) -> Self {
        Self {
            l_coll: Vector3::repeat(l_coll),
            l_warn: Vector3::repeat(l_warn),
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        for i in 0..3 {
            let (c, w) = (self.l_coll[i], self.l_warn[i]);
            if !(c.is_finite() && w.is_finite() && c > 0.0 && c < w) {
                return Err(format!(
                    "need 0 < l_coll < l_warn on axis {i}, got {c} and {w}"
                ));
            }
        }
        Ok(())
    }

    /// The larger of the two boxes on every axis.
    pub fn outer(&self) -> Vector3<f64> {
        self.l_coll.sup(&self.l_warn)
    }
}

impl Default for ClearanceSpec {
    fn default() -> Self {
        Self::for_vehicle(Vector3::repeat(0.5))
    }
}

/// Strict membership of `p` in the open box `p_test ± l`.
#[inline]
pub fn check_static(p_test: &Vector3<f64>, point: &CloudPoint, l: &Vector3<f64>) -> bool {
    inside_open(p_test, &point.p, l)
}

#[inline]
fn inside_open(center: &Vector3<f64>, p: &Vector3<f64>, l: &Vector3<f64>) -> bool {
    (0..3).all(|i| p[i] > center[i] - l[i] && p[i] < center[i] + l[i])
}

/// Whether the moving point is strictly inside the open box `p_test ± l` at
/// some time in `window`.
///
/// Per axis the entry and exit times `(p_test ± l - p) / v` are ordered; a
/// zero velocity component is inside for all time or never. The point hits
/// when the latest entry precedes the earliest exit and that open interval
/// meets the closed window.
pub fn check_moving(
    p_test: &Vector3<f64>,
    point: &CloudPoint,
    l: &Vector3<f64>,
    window: (f64, f64),
) -> bool {
    let (t_lo, t_hi) = window;
    let mut enter = f64::NEG_INFINITY;
    let mut exit = f64::INFINITY;
    for i in 0..3 {
        let lo = p_test[i] - l[i];
        let hi = p_test[i] + l[i];
        let (p, v) = (point.p[i], point.v[i]);
        if v == 0.0 {
            if !(p > lo && p < hi) {
                return false;
            }
            continue;
        }
        let t1 = (lo - p) / v;
        let t2 = (hi - p) / v;
        let (a, b) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        enter = enter.max(a);
        exit = exit.min(b);
    }
    enter < exit && enter < t_hi && exit > t_lo
}

/// Closed variant used for cropping: does the path `p + v t`, `t ∈ [0, horizon]`,
/// touch the closed box?
fn path_touches(b: &Aabb, point: &CloudPoint, horizon: f64) -> bool {
    let mut enter = 0.0f64;
    let mut exit = horizon;
    for i in 0..3 {
        let (p, v) = (point.p[i], point.v[i]);
        if v == 0.0 {
            if p < b.min[i] || p > b.max[i] {
                return false;
            }
            continue;
        }
        let t1 = (b.min[i] - p) / v;
        let t2 = (b.max[i] - p) / v;
        let (a, c) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        enter = enter.max(a);
        exit = exit.min(c);
        if enter > exit {
            return false;
        }
    }
    true
}

/// Indices of the points that can reach `b` within `horizon` seconds.
///
/// Static points are kept when inside the closed box; moving points when
/// their path over `[0, horizon]` touches it.
pub fn crop_cloud(cloud: &PointCloud, b: &Aabb, horizon: f64) -> Vec<usize> {
    let (bmin, bmax) = (b.min, b.max);
    let mut out = Vec::new();
    for (i, pt) in cloud.points.iter().enumerate() {
        // Reject on the box swept by the path before the exact slab test.
        let mut overlap = true;
        for k in 0..3 {
            let (p, q) = (pt.p[k], pt.p[k] + pt.v[k] * horizon);
            overlap &= p.min(q) <= bmax[k];
            overlap &= p.max(q) >= bmin[k];
        }
        if overlap && (pt.is_static() || path_touches(b, pt, horizon)) {
            out.push(i);
        }
    }
    out
}
