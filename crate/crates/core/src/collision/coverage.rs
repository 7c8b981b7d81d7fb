use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

/// Spinning lidar with blind cones above and below.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensorModel {
    /// Vertical opening angle of the observed band (rad).
    pub theta: f64,
    /// Maximum range (m).
    pub range: f64,
    /// Unit normal of the scan plane, up during hover.
    pub normal: Vector3<f64>,
    /// Points closer than this to the sensor count as inside the vehicle.
    pub body_radius: f64,
}

impl SensorModel {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.theta > 0.0 && self.theta < std::f64::consts::PI) {
            return Err(format!("opening angle {} outside (0, pi)", self.theta));
        }
        if !(self.range > 0.0) {
            return Err(format!("range {} must be positive", self.range));
        }
        if !((self.normal.norm() - 1.0).abs() < 1e-9) {
            return Err("sensor normal must be a unit vector".into());
        }
        if !(self.body_radius >= 0.0) {
            return Err("body radius must be non-negative".into());
        }
        Ok(())
    }

    /// Tangent of the cone's half angle about the normal, `tan(pi/2 - theta/2)`.
    fn cone_slope(&self) -> f64 {
        (std::f64::consts::FRAC_PI_2 - 0.5 * self.theta).tan()
    }
}

impl Default for SensorModel {
    fn default() -> Self {
        Self {
            theta: 33.2f64.to_radians(),
            range: 120.0,
            normal: Vector3::z(),
            body_radius: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverageClass {
    Observable,
    UpperCone,
    LowerCone,
    OutOfRange,
    InsideBody,
}

impl CoverageClass {
    /// Observable space or the vehicle's own volume.
    pub fn is_covered(self) -> bool {
        matches!(self, CoverageClass::Observable | CoverageClass::InsideBody)
    }
}

/// Where `p_test` lies relative to the sensor at `origin`.
///
/// With `q = p_test - origin`, the projection on the normal is
/// `p_is = (n·q) n`, the cone radius at that height is
/// `|p_is| tan(pi/2 - theta/2)` and the point is blind when its distance to
/// the normal is smaller. Range is tested on `|q|`.
pub fn coverage_class(
    p_test: &Vector3<f64>,
    sensor: &SensorModel,
    origin: &Vector3<f64>,
) -> CoverageClass {
    let q = p_test - origin;
    let dist = q.norm();
    if dist <= sensor.body_radius {
        return CoverageClass::InsideBody;
    }
    let h = sensor.normal.dot(&q);
    let p_is = sensor.normal * h;
    let l_cone = h.abs() * sensor.cone_slope();
    let l_test = (q - p_is).norm();
    if l_test < l_cone {
        if h > 0.0 {
            return CoverageClass::UpperCone;
        }
        if h < 0.0 {
            return CoverageClass::LowerCone;
        }
    }
    if dist > sensor.range {
        return CoverageClass::OutOfRange;
    }
    CoverageClass::Observable
}
