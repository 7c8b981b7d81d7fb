use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::PlanError;

/// Kinematic state of a single axis.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AxisState {
    pub p: f64,
    pub v: f64,
    pub a: f64,
}

impl AxisState {
    pub const fn new(p: f64, v: f64, a: f64) -> Self {
        Self { p, v, a }
    }

    pub const fn at_rest(p: f64) -> Self {
        Self { p, v: 0.0, a: 0.0 }
    }

    pub fn is_finite(&self) -> bool {
        self.p.is_finite() && self.v.is_finite() && self.a.is_finite()
    }

    /// State after applying constant jerk `j` for `t` seconds.
    #[inline]
    pub fn advance(&self, j: f64, t: f64) -> Self {
        Self {
            p: self.p + t * (self.v + t * (0.5 * self.a + t * j / 6.0)),
            v: self.v + t * (self.a + 0.5 * j * t),
            a: self.a + j * t,
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.p - other.p)
            .abs()
            .max((self.v - other.v).abs())
            .max((self.a - other.a).abs())
    }
}

/// Full translational state of the vehicle.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct State3 {
    pub axes: [AxisState; 3],
    pub timestamp: f64,
}

impl State3 {
    pub fn new(position: Vector3<f64>, velocity: Vector3<f64>, acceleration: Vector3<f64>) -> Self {
        Self {
            axes: std::array::from_fn(|i| {
                AxisState::new(position[i], velocity[i], acceleration[i])
            }),
            timestamp: 0.0,
        }
    }

    /// Hover at `position`: a bare waypoint becomes a rest state.
    pub fn at_rest(position: Vector3<f64>) -> Self {
        Self {
            axes: std::array::from_fn(|i| AxisState::at_rest(position[i])),
            timestamp: 0.0,
        }
    }

    pub fn with_timestamp(mut self, timestamp: f64) -> Self {
        self.timestamp = timestamp;
        self
    }

    pub fn position(&self) -> Vector3<f64> {
        Vector3::new(self.axes[0].p, self.axes[1].p, self.axes[2].p)
    }

    pub fn velocity(&self) -> Vector3<f64> {
        Vector3::new(self.axes[0].v, self.axes[1].v, self.axes[2].v)
    }

    pub fn acceleration(&self) -> Vector3<f64> {
        Vector3::new(self.axes[0].a, self.axes[1].a, self.axes[2].a)
    }

    pub fn is_finite(&self) -> bool {
        self.axes.iter().all(AxisState::is_finite) && self.timestamp.is_finite()
    }

    /// Largest per-component difference in p, v and a over all axes.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.axes
            .iter()
            .zip(other.axes.iter())
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(0.0, f64::max)
    }
}

/// Per-axis kinematic limits. Lower and upper bounds may differ in magnitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisConstraints {
    pub v_min: f64,
    pub v_max: f64,
    pub a_min: f64,
    pub a_max: f64,
    pub j_min: f64,
    pub j_max: f64,
}

impl AxisConstraints {
    pub fn symmetric(v: f64, a: f64, j: f64) -> Self {
        Self {
            v_min: -v,
            v_max: v,
            a_min: -a,
            a_max: a,
            j_min: -j,
            j_max: j,
        }
    }

    pub fn validate(&self) -> Result<(), PlanError> {
        let ok = |lo: f64, hi: f64| lo.is_finite() && hi.is_finite() && lo < 0.0 && 0.0 < hi;
        if ok(self.v_min, self.v_max) && ok(self.a_min, self.a_max) && ok(self.j_min, self.j_max) {
            Ok(())
        } else {
            Err(PlanError::InvalidConstraints(format!(
                "bounds must straddle zero: v [{}, {}], a [{}, {}], j [{}, {}]",
                self.v_min, self.v_max, self.a_min, self.a_max, self.j_min, self.j_max
            )))
        }
    }

    /// Mirror the bounds for motion in the negative direction.
    pub fn mirrored(&self) -> Self {
        Self {
            v_min: -self.v_max,
            v_max: -self.v_min,
            a_min: -self.a_max,
            a_max: -self.a_min,
            j_min: -self.j_max,
            j_max: -self.j_min,
        }
    }
}

impl Default for AxisConstraints {
    fn default() -> Self {
        Self::symmetric(3.0, 2.0, 4.0)
    }
}

/// Constraints for the x, y and z axes.
pub type Constraints3 = [AxisConstraints; 3];
