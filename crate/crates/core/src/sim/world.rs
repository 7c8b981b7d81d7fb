use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::collision::{coverage_class, CloudPoint, PointCloud, SensorModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObstacleKind {
    /// Solid box, surface sampled on a grid per face.
    Box,
    /// Solid ball, surface sampled with a Fibonacci lattice.
    Sphere,
    /// `count` random points inside the box `center ± half_extent`.
    Points,
}

fn default_density() -> f64 {
    20.0
}

/// An obstacle in the scenario file. Moving obstacles translate rigidly at
/// `velocity` from `spawn` on and do not exist before.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Obstacle {
    pub kind: ObstacleKind,
    pub center: Vector3<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_extent: Option<Vector3<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(default = "Vector3::zeros")]
    pub velocity: Vector3<f64>,
    #[serde(default)]
    pub spawn: f64,
    /// Surface points per square meter.
    #[serde(default = "default_density")]
    pub density: f64,
}

impl Obstacle {
    pub fn validate(&self) -> Result<(), String> {
        let finite = |v: &Vector3<f64>| v.iter().all(|x| x.is_finite());
        if !finite(&self.center) || !finite(&self.velocity) || !self.spawn.is_finite() {
            return Err("obstacle fields must be finite".into());
        }
        match self.kind {
            ObstacleKind::Box | ObstacleKind::Points => match self.half_extent {
                Some(h) if h.iter().all(|x| x.is_finite() && *x > 0.0) => {}
                _ => {
                    return Err(format!(
                        "{:?} obstacle needs a positive half_extent",
                        self.kind
                    ))
                }
            },
            ObstacleKind::Sphere => match self.radius {
                Some(r) if r.is_finite() && r > 0.0 => {}
                _ => return Err("sphere obstacle needs a positive radius".into()),
            },
        }
        if self.kind == ObstacleKind::Points && self.count.is_none() {
            return Err("points obstacle needs a count".into());
        }
        if self.kind != ObstacleKind::Points && !(self.density > 0.0) {
            return Err("density must be positive".into());
        }
        Ok(())
    }

    fn half(&self) -> Vector3<f64> {
        self.half_extent.unwrap_or_else(Vector3::zeros)
    }

    /// Surface area that the sampler covers (zero for point sets).
    pub fn surface_area(&self) -> f64 {
        match self.kind {
            ObstacleKind::Box => {
                let e = self.half() * 2.0;
                2.0 * (e.x * e.y + e.y * e.z + e.x * e.z)
            }
            ObstacleKind::Sphere => {
                let r = self.radius.unwrap_or(0.0);
                4.0 * std::f64::consts::PI * r * r
            }
            ObstacleKind::Points => 0.0,
        }
    }
}

/// Obstacles plus their precomputed body-frame point samples.
#[derive(Debug, Clone)]
pub struct World {
    obstacles: Vec<Obstacle>,
    /// Offsets from the obstacle center.
    samples: Vec<Vec<Vector3<f64>>>,
}

impl World {
    pub fn new(obstacles: Vec<Obstacle>, seed: u64) -> Result<Self, String> {
        for (i, o) in obstacles.iter().enumerate() {
            o.validate().map_err(|e| format!("obstacle {i}: {e}"))?;
        }
        let samples = obstacles
            .iter()
            .enumerate()
            .map(|(i, o)| match o.kind {
                ObstacleKind::Box => box_surface(&o.half(), o.density),
                ObstacleKind::Sphere => sphere_surface(o.radius.unwrap_or(0.0), o.density),
                ObstacleKind::Points => {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
                    let h = o.half();
                    (0..o.count.unwrap_or(0))
                        .map(|_| Vector3::from_fn(|k, _| rng.gen_range(-h[k]..=h[k])))
                        .collect()
                }
            })
            .collect();
        Ok(Self { obstacles, samples })
    }

    pub fn obstacles(&self) -> &[Obstacle] {
        &self.obstacles
    }

    /// Center of obstacle `i` at time `t`, `None` before it spawns.
    pub fn center_at(&self, i: usize, t: f64) -> Option<Vector3<f64>> {
        let o = &self.obstacles[i];
        (t >= o.spawn).then(|| o.center + o.velocity * (t - o.spawn))
    }

    /// Smallest factor `s` such that the box `p ± s·l` touches an obstacle
    /// at time `t`. Values below one mean the collision box is violated.
    pub fn clearance_ratio(&self, p: &Vector3<f64>, l: &Vector3<f64>, t: f64) -> f64 {
        let mut best = f64::INFINITY;
        for (i, o) in self.obstacles.iter().enumerate() {
            let Some(c) = self.center_at(i, t) else {
                continue;
            };
            let r = match o.kind {
                ObstacleKind::Box => {
                    let d = ((p - c).abs() - o.half()).map(|x| x.max(0.0));
                    (0..3).map(|k| d[k] / l[k]).fold(0.0, f64::max)
                }
                ObstacleKind::Sphere => sphere_ratio(p, &c, o.radius.unwrap_or(0.0), l),
                ObstacleKind::Points => self.samples[i]
                    .iter()
                    .map(|q| {
                        let d = (c + q - p).abs();
                        (0..3).map(|k| d[k] / l[k]).fold(0.0, f64::max)
                    })
                    .fold(f64::INFINITY, f64::min),
            };
            best = best.min(r);
        }
        best
    }

    /// Euclidean distance from `p` to the nearest obstacle surface (negative
    /// inside a sphere, zero inside a box).
    pub fn distance(&self, p: &Vector3<f64>, t: f64) -> f64 {
        let mut best = f64::INFINITY;
        for (i, o) in self.obstacles.iter().enumerate() {
            let Some(c) = self.center_at(i, t) else {
                continue;
            };
            let d = match o.kind {
                ObstacleKind::Box => ((p - c).abs() - o.half()).map(|x| x.max(0.0)).norm(),
                ObstacleKind::Sphere => (p - c).norm() - o.radius.unwrap_or(0.0),
                ObstacleKind::Points => self.samples[i]
                    .iter()
                    .map(|q| (c + q - p).norm())
                    .fold(f64::INFINITY, f64::min),
            };
            best = best.min(d);
        }
        best
    }

    /// Simulated lidar scan from `position` at time `t`. Points in the blind
    /// cones or beyond range are dropped; moving obstacles report their
    /// velocity with every point.
    pub fn synth_scan(&self, t: f64, position: &Vector3<f64>, sensor: &SensorModel) -> PointCloud {
        let mut points = Vec::new();
        for (i, o) in self.obstacles.iter().enumerate() {
            let Some(c) = self.center_at(i, t) else {
                continue;
            };
            for q in &self.samples[i] {
                let p = c + q;
                if coverage_class(&p, sensor, position).is_covered() {
                    points.push(CloudPoint::moving(p, o.velocity));
                }
            }
        }
        PointCloud {
            points,
            origin: *position,
            timestamp: t,
        }
    }
}

fn sphere_ratio(p: &Vector3<f64>, c: &Vector3<f64>, radius: f64, l: &Vector3<f64>) -> f64 {
    let off = (c - p).abs();
    if off.norm() <= radius {
        return 0.0;
    }
    let dist = |s: f64| (off - l * s).map(|x| x.max(0.0)).norm();
    let mut lo = 0.0;
    let mut hi = (0..3).map(|k| off[k] / l[k]).fold(0.0, f64::max);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if dist(mid) > radius {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn box_surface(h: &Vector3<f64>, density: f64) -> Vec<Vector3<f64>> {
    let step = 1.0 / density.sqrt();
    let mut out = Vec::new();
    for axis in 0..3 {
        let (u, v) = ((axis + 1) % 3, (axis + 2) % 3);
        let nu = ((2.0 * h[u] / step).round() as usize).max(1);
        let nv = ((2.0 * h[v] / step).round() as usize).max(1);
        for side in [-1.0, 1.0] {
            for i in 0..nu {
                for j in 0..nv {
                    let mut p = Vector3::zeros();
                    p[axis] = side * h[axis];
                    p[u] = -h[u] + 2.0 * h[u] * (i as f64 + 0.5) / nu as f64;
                    p[v] = -h[v] + 2.0 * h[v] * (j as f64 + 0.5) / nv as f64;
                    out.push(p);
                }
            }
        }
    }
    out
}

fn sphere_surface(radius: f64, density: f64) -> Vec<Vector3<f64>> {
    let n = ((density * 4.0 * std::f64::consts::PI * radius * radius).round() as usize).max(1);
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let rho = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            Vector3::new(rho * phi.cos(), rho * phi.sin(), z) * radius
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere(center: Vector3<f64>, radius: f64) -> Obstacle {
        Obstacle {
            kind: ObstacleKind::Sphere,
            center,
            half_extent: None,
            radius: Some(radius),
            count: None,
            velocity: Vector3::zeros(),
            spawn: 0.0,
            density: 50.0,
        }
    }

    fn block(center: Vector3<f64>, h: Vector3<f64>) -> Obstacle {
        Obstacle {
            kind: ObstacleKind::Box,
            half_extent: Some(h),
            radius: None,
            ..sphere(center, 1.0)
        }
    }

    #[test]
    fn scan_drops_blind_and_far_obstacles() {
        let s = SensorModel::default();
        let w = World::new(
            vec![
                sphere(Vector3::new(0.0, 0.0, 10.0), 1.0),
                sphere(Vector3::new(150.0, 0.0, 0.0), 1.0),
            ],
            0,
        )
        .unwrap();
        assert!(w.synth_scan(0.0, &Vector3::zeros(), &s).is_empty());
    }

    #[test]
    fn point_count_matches_density_times_area() {
        let s = SensorModel::default();
        for o in [
            sphere(Vector3::new(20.0, 0.0, 0.0), 1.0),
            block(Vector3::new(30.0, 5.0, 0.0), Vector3::new(1.0, 2.0, 1.5)),
        ] {
            let expect = o.density * o.surface_area();
            let w = World::new(vec![o], 0).unwrap();
            let n = w.synth_scan(0.0, &Vector3::zeros(), &s).len() as f64;
            assert!((n - expect).abs() <= 0.1 * expect, "{n} vs {expect}");
        }
    }

    #[test]
    fn moving_obstacle_spawns_and_reports_velocity() {
        let mut o = sphere(Vector3::new(10.0, 0.0, 0.0), 0.5);
        o.velocity = Vector3::new(0.0, 1.25, 0.0);
        o.spawn = 2.0;
        let w = World::new(vec![o], 0).unwrap();
        let s = SensorModel::default();
        assert!(w.synth_scan(1.0, &Vector3::zeros(), &s).is_empty());
        let scan = w.synth_scan(4.0, &Vector3::zeros(), &s);
        assert!(!scan.is_empty());
        assert!(scan
            .points
            .iter()
            .all(|p| p.v == Vector3::new(0.0, 1.25, 0.0)));
        assert_eq!(w.center_at(0, 4.0), Some(Vector3::new(10.0, 2.5, 0.0)));
    }

    #[test]
    fn clearance_ratio_for_box_and_sphere() {
        let l = Vector3::new(0.5, 1.0, 2.0);
        let w = World::new(vec![block(Vector3::zeros(), Vector3::repeat(1.0))], 0).unwrap();
        assert!((w.clearance_ratio(&Vector3::new(2.0, 0.0, 0.0), &l, 0.0) - 2.0).abs() < 1e-12);
        assert!((w.clearance_ratio(&Vector3::new(2.0, 3.0, 0.0), &l, 0.0) - 2.0).abs() < 1e-12);
        assert_eq!(
            w.clearance_ratio(&Vector3::new(0.5, 0.0, 0.0), &l, 0.0),
            0.0
        );
        let w = World::new(vec![sphere(Vector3::zeros(), 1.0)], 0).unwrap();
        // Straight along x the box face touches at s = (3 - 1) / 0.5.
        assert!((w.clearance_ratio(&Vector3::new(3.0, 0.0, 0.0), &l, 0.0) - 4.0).abs() < 1e-9);
    }

    #[test]
    fn seeded_point_sets_are_reproducible() {
        let o = Obstacle {
            kind: ObstacleKind::Points,
            count: Some(50),
            half_extent: Some(Vector3::repeat(1.0)),
            radius: None,
            ..sphere(Vector3::new(5.0, 0.0, 0.0), 1.0)
        };
        let a = World::new(vec![o.clone()], 7).unwrap();
        let b = World::new(vec![o.clone()], 7).unwrap();
        let c = World::new(vec![o], 8).unwrap();
        let s = SensorModel::default();
        let scan = |w: &World| w.synth_scan(0.0, &Vector3::zeros(), &s).points;
        assert_eq!(scan(&a), scan(&b));
        assert_ne!(scan(&a), scan(&c));
    }
}
