use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CloudPoint {
    pub p: Vector3<f64>,
    /// Constant velocity; zero for static returns.
    pub v: Vector3<f64>,
}

impl CloudPoint {
    pub fn fixed(p: Vector3<f64>) -> Self {
        Self {
            p,
            v: Vector3::zeros(),
        }
    }

    pub fn moving(p: Vector3<f64>, v: Vector3<f64>) -> Self {
        Self { p, v }
    }

    pub fn is_static(&self) -> bool {
        self.v == Vector3::zeros()
    }

    pub fn is_finite(&self) -> bool {
        self.p.iter().chain(self.v.iter()).all(|x| x.is_finite())
    }

    /// Position after `t` seconds of constant-velocity motion.
    pub fn predict(&self, t: f64) -> Vector3<f64> {
        self.p + self.v * t
    }
}

/// One lidar scan.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    pub points: Vec<CloudPoint>,
    /// Sensor position when the scan was taken.
    pub origin: Vector3<f64>,
    pub timestamp: f64,
}

impl PointCloud {
    pub fn new(points: Vec<CloudPoint>, origin: Vector3<f64>) -> Self {
        Self {
            points,
            origin,
            timestamp: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}
