use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::trajectory::{State3, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateSource {
    Commanded,
    Spheroid {
        shell: usize,
    },
    Tube {
        radius: usize,
        ring: usize,
        arc: usize,
    },
}

impl CandidateSource {
    pub fn label(&self) -> String {
        match self {
            CandidateSource::Commanded => "commanded".into(),
            CandidateSource::Spheroid { shell } => format!("spheroid:{shell}"),
            CandidateSource::Tube { radius, ring, arc } => format!("tube:{radius}:{ring}:{arc}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaypointCandidate {
    pub position: Vector3<f64>,
    pub source: CandidateSource,
}

/// Concentric shells around the vehicle, squashed vertically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpheroidParams {
    pub radii: Vec<f64>,
    pub points_per_shell: usize,
    /// Vertical semi-axis as a fraction of the horizontal radius.
    pub flattening: f64,
}

impl Default for SpheroidParams {
    fn default() -> Self {
        Self {
            radii: vec![1.5, 3.0, 4.5],
            points_per_shell: 22,
            flattening: 0.25,
        }
    }
}

impl SpheroidParams {
    pub fn validate(&self) -> Result<(), String> {
        check_radii(&self.radii)?;
        if !(self.flattening > 0.0 && self.flattening <= 1.0) {
            return Err(format!("flattening {} outside (0, 1]", self.flattening));
        }
        Ok(())
    }

    pub fn count(&self) -> usize {
        self.radii.len() * self.points_per_shell
    }
}

/// Rings of waypoints around the original trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TubeParams {
    pub radii: Vec<f64>,
    pub rings: usize,
    pub points_per_ring: usize,
}

impl Default for TubeParams {
    fn default() -> Self {
        Self {
            radii: vec![1.0, 2.0, 3.0],
            rings: 4,
            points_per_ring: 17,
        }
    }
}

impl TubeParams {
    pub fn validate(&self) -> Result<(), String> {
        check_radii(&self.radii)
    }

    pub fn count(&self) -> usize {
        self.radii.len() * self.rings * self.points_per_ring
    }
}

fn check_radii(radii: &[f64]) -> Result<(), String> {
    if radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err("radii must be positive".into());
    }
    if radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err("radii must be strictly increasing".into());
    }
    Ok(())
}

/// Fibonacci lattice on each shell, the vertical axis scaled by the
/// flattening factor.
pub fn spheroid_waypoints(center: &State3, params: &SpheroidParams) -> Vec<WaypointCandidate> {
    let c = center.position();
    let n = params.points_per_shell;
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    let mut out = Vec::with_capacity(params.count());
    for (shell, &r) in params.radii.iter().enumerate() {
        for i in 0..n {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let rho = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            let offset = Vector3::new(rho * phi.cos(), rho * phi.sin(), params.flattening * z) * r;
            out.push(WaypointCandidate {
                position: c + offset,
                source: CandidateSource::Spheroid { shell },
            });
        }
    }
    out
}

/// Rings at `T (k+1) / (rings+1)` along `original`, in the plane orthogonal
/// to the local velocity (horizontal when nearly at rest), points equally
/// spaced in angle. Smaller radii come first.
pub fn tube_waypoints(original: &Trajectory, params: &TubeParams) -> Vec<WaypointCandidate> {
    let mut out = Vec::with_capacity(params.count());
    if original.duration() <= 0.0 {
        return out;
    }
    let frames: Vec<_> = (0..params.rings)
        .map(|k| {
            let t = original.duration() * (k + 1) as f64 / (params.rings + 1) as f64;
            let s = original.eval_clamped(t);
            (s.position(), ring_basis(&s.velocity()))
        })
        .collect();
    let m = params.points_per_ring;
    for (ri, &r) in params.radii.iter().enumerate() {
        for (ring, (center, (u, w))) in frames.iter().enumerate() {
            for arc in 0..m {
                let ang = 2.0 * std::f64::consts::PI * arc as f64 / m as f64;
                out.push(WaypointCandidate {
                    position: center + (u * ang.cos() + w * ang.sin()) * r,
                    source: CandidateSource::Tube {
                        radius: ri,
                        ring,
                        arc,
                    },
                });
            }
        }
    }
    out
}

/// Orthonormal pair spanning the plane orthogonal to `vel`.
fn ring_basis(vel: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let speed = vel.norm();
    if speed < 1e-6 {
        return (Vector3::x(), Vector3::y());
    }
    let d = vel / speed;
    let helper = if d.z.abs() < 0.9 {
        Vector3::z()
    } else {
        Vector3::x()
    };
    let u = d.cross(&helper).normalize();
    let w = d.cross(&u);
    (u, w)
}
