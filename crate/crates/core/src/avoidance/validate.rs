use std::time::{Duration, Instant};

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::candidates::{SpheroidParams, TubeParams, WaypointCandidate};
use crate::collision::{
    classify_trajectory, collision_pass, coverage_pass, crop_cloud, merge_passes, ClearanceSpec,
    Context, PointCloud, SafetyReport, SensorModel,
};
use crate::trajectory::{
    compute_aabb, plan_3d, sample_constant_distance, AxisConstraints, Constraints3, PlanError,
    State3, Trajectory,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateMode {
    /// Validate exactly this many candidates (fewer if fewer exist).
    FixedCount(usize),
    /// Validate until the budget runs out.
    Adaptive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReplanConfig {
    pub constraints: Constraints3,
    pub clearance: ClearanceSpec,
    pub sensor: SensorModel,
    /// Per-axis sampling distance (m).
    pub dp: Vector3<f64>,
    /// Wall-clock budget per replanning step (s).
    pub budget: f64,
    pub mode: CandidateMode,
    pub spheroid: SpheroidParams,
    pub tube: TubeParams,
    /// Blend between distance to the commanded waypoint and distance to the
    /// previous alternative.
    pub alpha: f64,
    /// Crop the cloud with the trajectory box before checking.
    pub crop: bool,
}

impl Default for ReplanConfig {
    fn default() -> Self {
        Self {
            constraints: [AxisConstraints::default(); 3],
            clearance: ClearanceSpec::default(),
            sensor: SensorModel::default(),
            dp: Vector3::repeat(0.1),
            budget: 0.05,
            mode: CandidateMode::Adaptive,
            spheroid: SpheroidParams::default(),
            tube: TubeParams::default(),
            alpha: 0.5,
            crop: true,
        }
    }
}

impl ReplanConfig {
    pub fn validate(&self) -> Result<(), String> {
        for c in &self.constraints {
            c.validate().map_err(|e| e.to_string())?;
        }
        self.clearance.validate()?;
        self.sensor.validate()?;
        self.spheroid.validate()?;
        self.tube.validate()?;
        if self.dp.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
            return Err("dp must be positive on every axis".into());
        }
        if !(self.budget > 0.0) {
            return Err(format!("budget {} must be positive", self.budget));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(format!("alpha {} outside [0, 1]", self.alpha));
        }
        Ok(())
    }
}

/// Wall-clock time spent in each stage of the validation pipeline.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StageTimes {
    pub generation: Duration,
    pub aabb: Duration,
    pub crop: Duration,
    pub rollout: Duration,
    pub collision: Duration,
    pub coverage: Duration,
}

impl StageTimes {
    pub fn total(&self) -> Duration {
        self.generation + self.aabb + self.crop + self.rollout + self.collision + self.coverage
    }

    pub fn add(&mut self, o: &StageTimes) {
        self.generation += o.generation;
        self.aabb += o.aabb;
        self.crop += o.crop;
        self.rollout += o.rollout;
        self.collision += o.collision;
        self.coverage += o.coverage;
    }
}

/// A planned and checked candidate.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub candidate: WaypointCandidate,
    pub trajectory: Trajectory,
    pub report: SafetyReport,
    pub times: StageTimes,
}

/// Box, crop, sample and classify an already planned trajectory against a
/// scan.
pub fn check_trajectory(
    traj: &Trajectory,
    cloud: &PointCloud,
    cfg: &ReplanConfig,
    context: Context,
) -> (SafetyReport, StageTimes) {
    let mut times = StageTimes::default();
    let horizon = traj.duration();

    let t = Instant::now();
    // Points within the warning box of any sample lie inside the trajectory
    // box inflated by l_warn, so cropping cannot change a verdict.
    let b = compute_aabb(traj, cfg.clearance.outer().add_scalar(1e-9));
    times.aabb = t.elapsed();

    let t = Instant::now();
    let subset = cfg.crop.then(|| crop_cloud(cloud, &b, horizon));
    times.crop = t.elapsed();

    let t = Instant::now();
    let samples = sample_constant_distance(traj, cfg.dp);
    times.rollout = t.elapsed();

    let t = Instant::now();
    let collision = collision_pass(&samples, cloud, subset.as_deref(), &cfg.clearance, horizon);
    times.collision = t.elapsed();

    let t = Instant::now();
    let coverage = coverage_pass(&samples, &cfg.sensor, &cloud.origin);
    let report = classify_trajectory(merge_passes(&samples, collision, coverage), context);
    times.coverage = t.elapsed();

    (report, times)
}

/// Plan from `start` to rest at the candidate waypoint and check the result.
pub fn validate_candidate(
    start: &State3,
    wp: &WaypointCandidate,
    cloud: &PointCloud,
    cfg: &ReplanConfig,
) -> Result<Evaluation, PlanError> {
    let t = Instant::now();
    let trajectory = plan_3d(start, &State3::at_rest(wp.position), &cfg.constraints)?;
    let generation = t.elapsed();
    let (report, mut times) = check_trajectory(&trajectory, cloud, cfg, Context::Candidate);
    times.generation = generation;
    Ok(Evaluation {
        candidate: *wp,
        trajectory,
        report,
        times,
    })
}
