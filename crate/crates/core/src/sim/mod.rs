//! Closed-loop simulation: synthetic lidar, replanning at a fixed rate and
//! perfect tracking of the active trajectory.

mod world;

pub use world::{Obstacle, ObstacleKind, World};

use std::time::Duration;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::avoidance::{
    replan_step, ActivePlan, DecisionKind, ReplanConfig, SelectionState, StageTimes,
};
use crate::trajectory::{State3, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StartState {
    pub position: Vector3<f64>,
    #[serde(default = "Vector3::zeros")]
    pub velocity: Vector3<f64>,
    #[serde(default = "Vector3::zeros")]
    pub acceleration: Vector3<f64>,
}

impl StartState {
    pub fn state(&self) -> State3 {
        State3::new(self.position, self.velocity, self.acceleration)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub name: String,
    pub start: StartState,
    /// Commanded waypoints, flown in order; the last one is the goal.
    pub waypoints: Vec<Vector3<f64>>,
    #[serde(default)]
    pub obstacles: Vec<Obstacle>,
    #[serde(default)]
    pub replan: ReplanConfig,
    /// Loop rate (Hz).
    #[serde(default = "Scenario::default_rate")]
    pub rate: f64,
    /// Simulated time limit (s).
    #[serde(default = "Scenario::default_max_time")]
    pub max_time: f64,
    #[serde(default)]
    pub seed: u64,
    /// Position tolerance for reaching a waypoint (m).
    #[serde(default = "Scenario::default_goal_tolerance")]
    pub goal_tolerance: f64,
    /// Speed below which the vehicle counts as stopped (m/s).
    #[serde(default = "Scenario::default_goal_speed")]
    pub goal_speed: f64,
}

impl Scenario {
    fn default_rate() -> f64 {
        20.0
    }
    fn default_max_time() -> f64 {
        60.0
    }
    fn default_goal_tolerance() -> f64 {
        0.1
    }
    fn default_goal_speed() -> f64 {
        0.05
    }

    pub fn validate(&self) -> Result<(), String> {
        self.replan.validate()?;
        if !(self.rate > 0.0 && self.rate.is_finite()) {
            return Err(format!("rate {} must be positive", self.rate));
        }
        if !(self.max_time > 0.0 && self.max_time.is_finite()) {
            return Err(format!("max_time {} must be positive", self.max_time));
        }
        if self.waypoints.is_empty() {
            return Err("at least one waypoint is required".into());
        }
        if !(self.goal_tolerance > 0.0 && self.goal_speed > 0.0) {
            return Err("goal tolerances must be positive".into());
        }
        let start = self.start.state();
        for (i, c) in self.replan.constraints.iter().enumerate() {
            let s = start.axes[i];
            if !s.is_finite() || s.v < c.v_min || s.v > c.v_max || s.a < c.a_min || s.a > c.a_max {
                return Err(format!("start state violates the bounds on axis {i}"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Goal,
    Collision,
    Timeout,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    pub t: f64,
    pub state: State3,
    pub decision: DecisionKind,
    pub candidates: usize,
    pub safe_candidates: usize,
    /// Alternative waypoint chosen this step, if any.
    pub selected: Option<Vector3<f64>>,
    /// End point of the active trajectory after the decision.
    pub target: Vector3<f64>,
    pub cloud_points: usize,
    /// Smallest clearance ratio over the step interval (>= 1 keeps l_coll).
    pub clearance_ratio: f64,
    pub min_distance: f64,
    pub times: StageTimes,
    pub replan_time: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimLog {
    pub name: String,
    pub steps: Vec<StepRecord>,
    pub termination: Termination,
    pub goal_reached: bool,
    pub collision: bool,
    pub total_time: f64,
    pub replans: usize,
    pub min_clearance_ratio: f64,
    pub min_distance: f64,
}

/// Ground truth is checked at this many points per control interval.
const TRUTH_SUBSTEPS: usize = 10;

struct Active {
    traj: Trajectory,
    t0: f64,
    pursues_commanded: bool,
}

/// Run a scenario to the goal, a collision or the time limit.
pub fn run(scenario: &Scenario) -> Result<SimLog, String> {
    scenario.validate()?;
    let world = World::new(scenario.obstacles.clone(), scenario.seed)?;
    let cfg = &scenario.replan;
    let l_coll = cfg.clearance.l_coll;
    let dt = 1.0 / scenario.rate;
    let mut sel = SelectionState::new(cfg.alpha);
    let mut active: Option<Active> = None;
    let mut wp = 0usize;
    let mut steps = Vec::new();
    let mut termination = Termination::Timeout;
    let mut collision = false;
    let mut min_ratio = f64::INFINITY;
    let mut min_dist = f64::INFINITY;
    let start = scenario.start.state();

    for k in 0.. {
        let t = k as f64 * dt;
        if t > scenario.max_time + 1e-9 {
            break;
        }
        let state = match &active {
            Some(a) => a.traj.eval_clamped(t - a.t0),
            None => start,
        }
        .with_timestamp(t);

        let pos = state.position();
        let at_rest = state.velocity().norm() < scenario.goal_speed;
        if (pos - scenario.waypoints[wp]).norm() < scenario.goal_tolerance && at_rest {
            if wp + 1 == scenario.waypoints.len() {
                termination = Termination::Goal;
                break;
            }
            wp += 1;
            if let Some(a) = &mut active {
                a.pursues_commanded = false;
            }
        }
        let commanded = scenario.waypoints[wp];

        let cloud = world.synth_scan(t, &pos, &cfg.sensor);
        let plan = active.as_ref().map(|a| ActivePlan {
            remaining: a.traj.tail(t - a.t0),
            pursues_commanded: a.pursues_commanded,
        });
        let out = replan_step(&cloud, &state, plan.as_ref(), &commanded, &mut sel, cfg);
        let kind = out.decision.kind();
        let mut selected = None;
        if let Some(traj) = out.decision.trajectory() {
            if let crate::avoidance::Decision::Alternative { candidate, .. } = &out.decision {
                selected = Some(candidate.position);
            }
            active = Some(Active {
                traj: traj.clone(),
                t0: t,
                pursues_commanded: kind == DecisionKind::Commanded,
            });
        }
        let a = active
            .as_ref()
            .expect("a decision always leaves an active trajectory");

        let mut ratio = f64::INFINITY;
        let mut dist = f64::INFINITY;
        for s in 0..=TRUTH_SUBSTEPS {
            let ts = t + dt * s as f64 / TRUTH_SUBSTEPS as f64;
            let p = a.traj.position(ts - a.t0);
            ratio = ratio.min(world.clearance_ratio(&p, &l_coll, ts));
            dist = dist.min(world.distance(&p, ts));
        }
        min_ratio = min_ratio.min(ratio);
        min_dist = min_dist.min(dist);

        steps.push(StepRecord {
            step: k,
            t,
            state,
            decision: kind,
            candidates: out.candidates,
            safe_candidates: out.safe_candidates,
            selected,
            target: a.traj.target().position(),
            cloud_points: cloud.len(),
            clearance_ratio: ratio,
            min_distance: dist,
            times: out.times,
            replan_time: out.elapsed,
        });
        if ratio < 1.0 {
            collision = true;
            termination = Termination::Collision;
            break;
        }
    }

    let replans = steps
        .iter()
        .filter(|s| {
            matches!(
                s.decision,
                DecisionKind::Alternative | DecisionKind::Emergency
            )
        })
        .count();
    Ok(SimLog {
        name: scenario.name.clone(),
        total_time: steps.last().map_or(0.0, |s| s.t),
        steps,
        goal_reached: termination == Termination::Goal,
        termination,
        collision,
        replans,
        min_clearance_ratio: min_ratio,
        min_distance: min_dist,
    })
}

impl SimLog {
    /// True when two runs agree on everything except wall-clock timings.
    pub fn same_outcome(&self, other: &SimLog) -> bool {
        let strip = |s: &StepRecord| StepRecord {
            times: StageTimes::default(),
            replan_time: Duration::ZERO,
            ..s.clone()
        };
        self.termination == other.termination
            && self.steps.len() == other.steps.len()
            && self
                .steps
                .iter()
                .zip(&other.steps)
                .all(|(a, b)| strip(a) == strip(b))
            && self.min_clearance_ratio.to_bits() == other.min_clearance_ratio.to_bits()
    }
}
