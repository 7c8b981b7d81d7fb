//! Rollout of trajectories into discrete samples.

use nalgebra::Vector3;

use super::poly::{cubic_roots, quadratic_roots};
use super::{State3, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    /// Seconds since trajectory start.
    pub t: f64,
    pub state: State3,
}

impl Sample {
    pub fn position(&self) -> Vector3<f64> {
        self.state.position()
    }
}

/// Samples every `dt` seconds plus the final state.
pub fn sample_constant_time(traj: &Trajectory, dt: f64) -> Vec<Sample> {
    assert!(dt > 0.0, "dt must be positive");
    let mut out = Vec::with_capacity((traj.duration() / dt) as usize + 2);
    let mut k = 0usize;
    loop {
        let t = k as f64 * dt;
        if t >= traj.duration() - 1e-12 {
            break;
        }
        out.push(Sample {
            t,
            state: traj.eval_clamped(t),
        });
        k += 1;
    }
    out.push(Sample {
        t: traj.duration(),
        state: traj.eval_clamped(traj.duration()),
    });
    out
}

/// Samples such that on every axis consecutive positions differ by at most
/// `dp` (per-axis step, may differ between axes).
///
/// From each sample the next time is the smallest positive solution of
/// `±dp = v t + a t²/2 + j t³/6` over all axes. Segment borders are always
/// sampled and restart the search.
pub fn sample_constant_distance(traj: &Trajectory, dp: Vector3<f64>) -> Vec<Sample> {
    assert!(
        dp.iter().all(|d| *d > 0.0),
        "dp must be positive on every axis"
    );
    let borders = traj.breakpoints();
    let mut out = vec![Sample {
        t: 0.0,
        state: traj.eval_clamped(0.0),
    }];
    for w in borders.windows(2) {
        let (b0, b1) = (w[0], w[1]);
        if b1 - b0 <= 0.0 {
            continue;
        }
        let mid = 0.5 * (b0 + b1);
        let segs: [_; 3] = std::array::from_fn(|i| {
            let axis = traj.axis(i);
            if axis.segments.is_empty() {
                None
            } else {
                let k = axis.segment_index(mid);
                Some((axis.segments[k], axis.segment_start_time(k)))
            }
        });
        let mut t = b0;
        loop {
            let remaining = b1 - t;
            let mut step = f64::INFINITY;
            for i in 0..3 {
                if let Some((seg, t0)) = segs[i] {
                    let s = seg.state_at(t - t0);
                    if let Some(dt) = first_crossing(s.v, s.a, seg.j, dp[i], remaining) {
                        step = step.min(dt);
                    }
                }
            }
            if !(step < remaining - 1e-12) || step <= 0.0 {
                out.push(Sample {
                    t: b1,
                    state: traj.eval_clamped(b1),
                });
                break;
            }
            t += step;
            out.push(Sample {
                t,
                state: traj.eval_clamped(t),
            });
        }
    }
    out
}

#[inline]
fn displacement(v: f64, a: f64, j: f64, t: f64) -> f64 {
    t * (v + t * (0.5 * a + t * j / 6.0))
}

/// Smallest `t` in `(0, limit]` with `|v t + a t²/2 + j t³/6| = d`.
///
/// The displacement is monotone between the stationary points of the cubic,
/// so each monotone piece is checked in order and the crossing inside the
/// first piece that reaches `d` is located with the closed-form roots
/// (bisection if rounding put the analytic root outside the piece).
fn first_crossing(v: f64, a: f64, j: f64, d: f64, limit: f64) -> Option<f64> {
    let mut cuts = [0.0; 4];
    let mut n = 1;
    let mut stationary: Vec<f64> = quadratic_roots(0.5 * j, a, v)
        .iter()
        .filter(|t| *t > 0.0 && *t < limit)
        .collect();
    stationary.sort_by(f64::total_cmp);
    for t in stationary {
        cuts[n] = t;
        n += 1;
    }
    cuts[n] = limit;
    n += 1;
    for k in 0..n - 1 {
        let (lo, hi) = (cuts[k], cuts[k + 1]);
        let d_hi = displacement(v, a, j, hi);
        if d_hi.abs() < d {
            continue;
        }
        let target = d.copysign(d_hi);
        let analytic = cubic_roots(j / 6.0, 0.5 * a, v, -target)
            .iter()
            .filter(|t| *t > lo && *t <= hi)
            .fold(f64::INFINITY, f64::min);
        if analytic.is_finite() && displacement(v, a, j, analytic).abs() <= d * (1.0 + 1e-12) {
            return Some(analytic);
        }
        // Bisection on the monotone piece.
        let (mut l, mut h) = (lo, hi);
        for _ in 0..200 {
            let m = 0.5 * (l + h);
            if m <= l || m >= h {
                break;
            }
            if displacement(v, a, j, m).abs() < d {
                l = m;
            } else {
                h = m;
            }
        }
        return Some(l);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trajectory::{plan_3d, AxisConstraints, AxisProfile, AxisState};

    #[test]
    fn constant_velocity_samples_every_tenth_second() {
        let x = AxisProfile::from_jerks(AxisState::new(0.0, 1.0, 0.0), &[(0.0, 1.0)]);
        let z = AxisProfile::hold(AxisState::at_rest(0.0), 1.0);
        let traj = Trajectory::from_profiles([x, z.clone(), z]);
        let s = sample_constant_distance(&traj, Vector3::new(0.1, 0.1, 0.1));
        assert_eq!(s.len(), 11);
        for (k, sample) in s.iter().enumerate() {
            assert!(
                (sample.t - 0.1 * k as f64).abs() < 1e-9,
                "{} vs {}",
                sample.t,
                0.1 * k as f64
            );
        }
    }

    #[test]
    fn first_crossing_handles_reversal() {
        // v = 1, a = -2: displacement t - t² peaks at 0.25 then returns.
        // With d = 0.3 the positive side is never reached; the crossing is
        // on the negative side at t - t² = -0.3.
        let t = first_crossing(1.0, -2.0, 0.0, 0.3, 10.0).unwrap();
        let expect = (1.0 + (1.0f64 + 1.2).sqrt()) / 2.0;
        assert!((t - expect).abs() < 1e-12);
        assert!(first_crossing(0.0, 0.0, 0.0, 0.1, 5.0).is_none());
    }

    #[test]
    fn borders_are_sampled_and_steps_bounded() {
        let c = [AxisConstraints::symmetric(3.0, 2.0, 4.0); 3];
        let traj = plan_3d(
            &State3::new(
                Vector3::zeros(),
                Vector3::new(1.0, -1.0, 0.5),
                Vector3::new(0.0, 1.0, -0.5),
            ),
            &State3::at_rest(Vector3::new(3.0, 1.0, -2.0)),
            &c,
        )
        .unwrap();
        let dp = Vector3::new(0.1, 0.05, 0.2);
        let s = sample_constant_distance(&traj, dp);
        assert_eq!(s[0].t, 0.0);
        assert_eq!(s.last().unwrap().t, traj.duration());
        for b in traj.breakpoints() {
            assert!(
                s.iter().any(|x| (x.t - b).abs() < 1e-12),
                "border {b} missing"
            );
        }
        for w in s.windows(2) {
            assert!(w[1].t > w[0].t);
            let d = w[1].position() - w[0].position();
            for i in 0..3 {
                assert!(d[i].abs() <= dp[i] + 1e-9);
            }
        }
    }
}
