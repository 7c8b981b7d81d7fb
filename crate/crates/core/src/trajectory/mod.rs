//! Per-axis time-optimal jerk-limited trajectories, their synchronization
//! into 3D motions, evaluation, sampling and analytic bounding boxes.

mod aabb;
mod axis;
pub mod poly;
mod sampling;
mod state;

pub use aabb::{compute_aabb, Aabb};
pub use axis::{plan_axis, plan_axis_fixed_time, AxisProfile, Segment};
pub use sampling::{sample_constant_distance, sample_constant_time, Sample};
pub use state::{AxisConstraints, AxisState, Constraints3, State3};

use nalgebra::Vector3;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PlanError {
    #[error("invalid constraints: {0}")]
    InvalidConstraints(String),
    #[error("infeasible {which} state: {reason}")]
    InfeasibleState { which: &'static str, reason: String },
    #[error("duration {requested} s is shorter than the feasible minimum {minimum} s")]
    FixedTimeInfeasible { requested: f64, minimum: f64 },
    #[error("no profile satisfies the boundary conditions")]
    NoSolution,
    #[error("axis {axis}: {source}")]
    Axis {
        axis: usize,
        #[source]
        source: Box<PlanError>,
    },
    #[error("time {t} outside trajectory [0, {duration}]")]
    OutOfRange { t: f64, duration: f64 },
}

impl PlanError {
    fn on_axis(self, axis: usize) -> Self {
        PlanError::Axis {
            axis,
            source: Box::new(self),
        }
    }
}

/// A synchronized 3D trajectory: one jerk-limited profile per axis, all of
/// the same duration. Immutable once planned.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    axes: [AxisProfile; 3],
    duration: f64,
    start: State3,
    target: State3,
}

impl Trajectory {
    /// Assemble a trajectory from per-axis profiles. Shorter axes are padded
    /// with a zero-jerk continuation so all share the longest duration.
    pub fn from_profiles(mut axes: [AxisProfile; 3]) -> Self {
        let duration = axes.iter().map(|a| a.duration).fold(0.0, f64::max);
        for a in axes.iter_mut() {
            if a.duration < duration {
                let mut pieces: Vec<(f64, f64)> =
                    a.segments.iter().map(|s| (s.j, s.duration)).collect();
                pieces.push((0.0, duration - a.duration));
                *a = AxisProfile::from_jerks(a.start, &pieces);
            }
        }
        let start = State3 {
            axes: std::array::from_fn(|i| axes[i].start),
            timestamp: 0.0,
        };
        let target = State3 {
            axes: std::array::from_fn(|i| axes[i].end_state()),
            timestamp: 0.0,
        };
        Self {
            axes,
            duration,
            start,
            target,
        }
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn start(&self) -> &State3 {
        &self.start
    }

    pub fn target(&self) -> &State3 {
        &self.target
    }

    pub fn axis(&self, i: usize) -> &AxisProfile {
        &self.axes[i]
    }

    pub fn axes(&self) -> &[AxisProfile; 3] {
        &self.axes
    }

    /// Total number of constant-jerk segments over all axes.
    pub fn segment_count(&self) -> usize {
        self.axes.iter().map(|a| a.segments.len()).sum()
    }

    /// State at `t` seconds after the trajectory start. The returned
    /// timestamp is absolute (start timestamp + `t`).
    /// Times within rounding distance of the ends are clamped.
    pub fn eval(&self, t: f64) -> Result<State3, PlanError> {
        let slack = 1e-12 * self.duration.max(1.0);
        if !(t >= -slack && t <= self.duration + slack) {
            return Err(PlanError::OutOfRange {
                t,
                duration: self.duration,
            });
        }
        Ok(self.eval_unchecked(t.clamp(0.0, self.duration)))
    }

    /// Like [`eval`](Self::eval) but clamps `t` into range.
    pub fn eval_clamped(&self, t: f64) -> State3 {
        self.eval_unchecked(t.clamp(0.0, self.duration))
    }

    fn eval_unchecked(&self, t: f64) -> State3 {
        State3 {
            axes: std::array::from_fn(|i| self.axes[i].eval(t)),
            timestamp: self.start.timestamp + t,
        }
    }

    pub fn position(&self, t: f64) -> Vector3<f64> {
        self.eval_clamped(t).position()
    }

    /// All segment border times over all axes, sorted and deduplicated,
    /// including 0 and the duration.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = vec![0.0, self.duration];
        for axis in &self.axes {
            for i in 0..axis.segments.len() {
                out.push(axis.segment_start_time(i));
            }
        }
        out.retain(|t| *t >= 0.0 && *t <= self.duration);
        out.sort_by(f64::total_cmp);
        out.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);
        out
    }

    /// The part of the trajectory after `t`, re-based so it starts at zero.
    pub fn tail(&self, t: f64) -> Trajectory {
        let t = t.clamp(0.0, self.duration);
        let axes: [AxisProfile; 3] = std::array::from_fn(|i| {
            let mut a = self.axes[i].tail(t);
            a.set_duration(self.duration - t);
            a
        });
        let start = self.eval_unchecked(t);
        Trajectory {
            axes,
            duration: self.duration - t,
            start,
            target: self.target,
        }
    }
}

/// Plan a synchronized 3D trajectory: every axis runs for the slowest axis's
/// time-optimal duration.
///
/// In rare cases an axis cannot be stretched to exactly that duration (the
/// set of feasible durations has a gap); the shared duration is then raised
/// to the next value every axis can meet.
pub fn plan_3d(start: &State3, target: &State3, c: &Constraints3) -> Result<Trajectory, PlanError> {
    let mut optimal = Vec::with_capacity(3);
    for i in 0..3 {
        optimal.push(plan_axis(start.axes[i], target.axes[i], &c[i]).map_err(|e| e.on_axis(i))?);
    }
    let t_max = optimal.iter().map(|p| p.duration).fold(0.0, f64::max);

    let synchronize = |duration: f64| -> Result<[AxisProfile; 3], PlanError> {
        let mut out: [Option<AxisProfile>; 3] = [None, None, None];
        for i in 0..3 {
            let profile = if optimal[i].duration == duration {
                optimal[i].clone()
            } else {
                axis::stretch(optimal[i].clone(), target.axes[i], &c[i], duration)
                    .map_err(|e| e.on_axis(i))?
            };
            out[i] = Some(profile);
        }
        Ok(out.map(|p| p.expect("all axes planned")))
    };

    let axes = match synchronize(t_max) {
        Ok(axes) => axes,
        Err(first_err) => {
            let mut found = None;
            let mut step = 1e-3 * t_max.max(1e-3);
            for _ in 0..60 {
                if let Ok(axes) = synchronize(t_max + step) {
                    found = Some((axes, t_max + step));
                    break;
                }
                step *= 1.5;
            }
            let (axes, _) = found.ok_or(first_err)?;
            axes
        }
    };
    let duration = axes[0].duration;
    Ok(Trajectory {
        axes,
        duration,
        start: *start,
        target: *target,
    })
}
