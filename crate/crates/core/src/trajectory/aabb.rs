use nalgebra::Vector3;

use super::poly::quadratic_roots;
use super::Trajectory;

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: Vector3<f64>,
    pub max: Vector3<f64>,
}

impl Aabb {
    pub fn new(min: Vector3<f64>, max: Vector3<f64>) -> Self {
        debug_assert!((0..3).all(|i| min[i] <= max[i]));
        Self { min, max }
    }

    pub fn around(center: Vector3<f64>, half_extent: Vector3<f64>) -> Self {
        Self::new(center - half_extent, center + half_extent)
    }

    pub fn point(p: Vector3<f64>) -> Self {
        Self { min: p, max: p }
    }

    pub fn inflated(&self, half_extent: Vector3<f64>) -> Self {
        Self::new(self.min - half_extent, self.max + half_extent)
    }

    pub fn union(&self, other: &Aabb) -> Self {
        Self::new(self.min.inf(&other.min), self.max.sup(&other.max))
    }

    pub fn extend(&mut self, p: Vector3<f64>) {
        self.min = self.min.inf(&p);
        self.max = self.max.sup(&p);
    }

    pub fn center(&self) -> Vector3<f64> {
        0.5 * (self.min + self.max)
    }

    pub fn extent(&self) -> Vector3<f64> {
        self.max - self.min
    }

    /// Closed containment test.
    #[inline]
    pub fn contains(&self, p: &Vector3<f64>) -> bool {
        (0..3).all(|i| p[i] >= self.min[i] && p[i] <= self.max[i])
    }

    pub fn volume(&self) -> f64 {
        let e = self.extent();
        e.x * e.y * e.z
    }
}

/// Exact bounding box of the trajectory's positions, inflated by
/// `half_extent` on every side.
///
/// Per axis and segment the candidates are both segment ends and the roots
/// of `v + a t + j t²/2 = 0` inside the segment. With `j = 0` the root is
/// `-v/a`; with `j = a = 0` the segment is linear and only its ends count.
pub fn compute_aabb(traj: &Trajectory, half_extent: Vector3<f64>) -> Aabb {
    let mut min = traj.start().position();
    let mut max = min;
    for (i, axis) in traj.axes().iter().enumerate() {
        for seg in &axis.segments {
            let s = seg.start;
            let end = seg.end();
            min[i] = min[i].min(s.p).min(end.p);
            max[i] = max[i].max(s.p).max(end.p);
            for t_ex in quadratic_roots(0.5 * seg.j, s.a, s.v).iter() {
                if t_ex > 0.0 && t_ex < seg.duration {
                    let p_ex = seg.state_at(t_ex).p;
                    min[i] = min[i].min(p_ex);
                    max[i] = max[i].max(p_ex);
                }
            }
        }
    }
    Aabb::new(min, max).inflated(half_extent)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trajectory::{plan_3d, AxisConstraints, AxisProfile, AxisState, State3};

    #[test]
    fn monotone_move_spans_exactly_start_to_goal() {
        let c = [AxisConstraints::symmetric(2.0, 2.0, 4.0); 3];
        let traj = plan_3d(
            &State3::at_rest(Vector3::zeros()),
            &State3::at_rest(Vector3::new(1.0, 0.0, 0.0)),
            &c,
        )
        .unwrap();
        let b = compute_aabb(&traj, Vector3::zeros());
        assert_eq!(b.min.x, 0.0);
        assert!((b.max.x - 1.0).abs() < 1e-12);
        assert_eq!(b.min.y, 0.0);
        assert_eq!(b.max.y, 0.0);
        let inflated = compute_aabb(&traj, Vector3::new(0.5, 0.25, 0.1));
        assert!((inflated.min.x + 0.5).abs() < 1e-12);
        assert!((inflated.max.z - 0.1).abs() < 1e-12);
    }

    #[test]
    fn single_segment_interior_maximum() {
        // p(t) = t - t³/6 on [0, 2]: p'(t) = 1 - t²/2 vanishes at √2,
        // giving p = √2 - √2/3 = 2√2/3.
        let x = AxisProfile::from_jerks(AxisState::new(0.0, 1.0, 0.0), &[(-1.0, 2.0)]);
        let rest = AxisProfile::hold(AxisState::at_rest(0.0), 2.0);
        let traj = Trajectory::from_profiles([x, rest.clone(), rest]);
        let b = compute_aabb(&traj, Vector3::zeros());
        assert_eq!(b.min.x, 0.0);
        assert!(
            (b.max.x - 2.0 * 2f64.sqrt() / 3.0).abs() < 1e-12,
            "{}",
            b.max.x
        );
        assert!((b.max.x - 0.9428).abs() < 1e-4);
    }

    #[test]
    fn linear_and_quadratic_segments() {
        // j = 0: extremum at -v/a.  p(t) = 2t - t²/2 peaks at t = 2 with p = 2.
        let x = AxisProfile::from_jerks(AxisState::new(0.0, 2.0, -1.0), &[(0.0, 3.0)]);
        // j = a = 0: linear, only the ends count.
        let y = AxisProfile::from_jerks(AxisState::new(1.0, -1.0, 0.0), &[(0.0, 3.0)]);
        let z = AxisProfile::hold(AxisState::at_rest(0.0), 3.0);
        let traj = Trajectory::from_profiles([x, y, z]);
        let b = compute_aabb(&traj, Vector3::zeros());
        assert!((b.max.x - 2.0).abs() < 1e-12);
        assert!((b.min.x - 0.0).abs() < 1e-12);
        assert!((b.min.y + 2.0).abs() < 1e-12 && (b.max.y - 1.0).abs() < 1e-12);
    }
}
