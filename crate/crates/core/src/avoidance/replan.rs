use std::time::{Duration, Instant};

use nalgebra::Vector3;
use rayon::prelude::*;

use super::candidates::{spheroid_waypoints, tube_waypoints, WaypointCandidate};
use super::select::{select_best, SelectionState};
use super::validate::{
    check_trajectory, validate_candidate, CandidateMode, Evaluation, ReplanConfig, StageTimes,
};
use crate::collision::{Context, PointCloud, SampleClass};
use crate::trajectory::{plan_3d, State3, Trajectory};

/// The trajectory being flown, from the current time on.
#[derive(Debug, Clone)]
pub struct ActivePlan {
    pub remaining: Trajectory,
    /// Whether it ends at the commanded waypoint rather than an alternative.
    pub pursues_commanded: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecisionKind {
    Keep,
    Commanded,
    Alternative,
    Emergency,
}

impl DecisionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DecisionKind::Keep => "keep",
            DecisionKind::Commanded => "commanded",
            DecisionKind::Alternative => "alternative",
            DecisionKind::Emergency => "emergency",
        }
    }
}

#[derive(Debug, Clone)]
pub enum Decision {
    /// Continue the active trajectory.
    Keep,
    /// Fly a fresh plan to the commanded waypoint.
    Commanded(Trajectory),
    /// Switch to a safe alternative.
    Alternative {
        candidate: WaypointCandidate,
        trajectory: Trajectory,
    },
    /// Nothing is safe; fly the least bad option.
    Emergency {
        candidate: Option<WaypointCandidate>,
        trajectory: Trajectory,
    },
}

impl Decision {
    pub fn kind(&self) -> DecisionKind {
        match self {
            Decision::Keep => DecisionKind::Keep,
            Decision::Commanded(_) => DecisionKind::Commanded,
            Decision::Alternative { .. } => DecisionKind::Alternative,
            Decision::Emergency { .. } => DecisionKind::Emergency,
        }
    }

    pub fn trajectory(&self) -> Option<&Trajectory> {
        match self {
            Decision::Keep => None,
            Decision::Commanded(t) => Some(t),
            Decision::Alternative { trajectory, .. } | Decision::Emergency { trajectory, .. } => {
                Some(trajectory)
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct ReplanOutcome {
    pub decision: Decision,
    /// Alternative candidates validated this step.
    pub candidates: usize,
    pub safe_candidates: usize,
    pub times: StageTimes,
    pub elapsed: Duration,
    pub reason: String,
}

/// One sense-decide cycle.
///
/// A trajectory that pursues the commanded waypoint is kept while it checks
/// safe. When flying an alternative (or nothing), a fresh plan to the
/// commanded waypoint is tried first, then the alternative is kept if still
/// safe. Otherwise tube candidates around the commanded plan and spheroid
/// candidates around the vehicle are validated and the cheapest safe one is
/// selected.
pub fn replan_step(
    cloud: &PointCloud,
    state: &State3,
    current: Option<&ActivePlan>,
    commanded: &Vector3<f64>,
    sel: &mut SelectionState,
    cfg: &ReplanConfig,
) -> ReplanOutcome {
    let clock = Instant::now();
    let mut times = StageTimes::default();
    let outcome = |decision, candidates, safe, times, reason: String| ReplanOutcome {
        decision,
        candidates,
        safe_candidates: safe,
        times,
        elapsed: clock.elapsed(),
        reason,
    };

    if let Some(cur) = current.filter(|c| c.pursues_commanded) {
        let (report, t) = check_trajectory(&cur.remaining, cloud, cfg, Context::Executing);
        times.add(&t);
        if report.is_safe() {
            return outcome(Decision::Keep, 0, 0, times, report.reason);
        }
    }

    let t = Instant::now();
    let commanded_plan = plan_3d(state, &State3::at_rest(*commanded), &cfg.constraints).ok();
    times.generation += t.elapsed();
    if current.is_none_or(|c| !c.pursues_commanded) {
        if let Some(traj) = &commanded_plan {
            let (report, t) = check_trajectory(traj, cloud, cfg, Context::Candidate);
            times.add(&t);
            if report.is_safe() {
                sel.previous = None;
                return outcome(
                    Decision::Commanded(traj.clone()),
                    0,
                    0,
                    times,
                    report.reason,
                );
            }
        }
        if let Some(cur) = current {
            let (report, t) = check_trajectory(&cur.remaining, cloud, cfg, Context::Executing);
            times.add(&t);
            if report.is_safe() {
                return outcome(Decision::Keep, 0, 0, times, report.reason);
            }
        }
    }

    let t = Instant::now();
    let mut pool = match &commanded_plan {
        Some(traj) => tube_waypoints(traj, &cfg.tube),
        None => Vec::new(),
    };
    pool.extend(spheroid_waypoints(state, &cfg.spheroid));
    times.generation += t.elapsed();

    let evaluations = run_candidates(state, &pool, cloud, cfg, clock);
    let considered = evaluations.len();
    let mut safe = Vec::new();
    let mut planned = Vec::new();
    for e in evaluations.into_iter().flatten() {
        times.add(&e.times);
        if e.report.is_safe() {
            safe.push(e);
        } else {
            planned.push(e);
        }
    }
    let n_safe = safe.len();

    let wps: Vec<_> = safe.iter().map(|e| e.candidate).collect();
    if let Some(i) = select_best(&wps, commanded, sel) {
        let e = safe.swap_remove(i);
        sel.previous = Some(e.candidate.position);
        let reason = format!("{n_safe} of {considered} candidates safe");
        let d = Decision::Alternative {
            candidate: e.candidate,
            trajectory: e.trajectory,
        };
        return outcome(d, considered, n_safe, times, reason);
    }

    let reason = format!("no safe candidate among {considered}");
    let decision = match least_bad(&planned) {
        Some(i) => Decision::Emergency {
            candidate: Some(planned[i].candidate),
            trajectory: planned[i].trajectory.clone(),
        },
        None => Decision::Emergency {
            candidate: None,
            trajectory: match current {
                Some(c) => c.remaining.clone(),
                None => standstill(state),
            },
        },
    };
    outcome(decision, considered, 0, times, reason)
}

/// Validate candidates in order. Fixed-count mode takes a prefix of the
/// pool; adaptive mode stops issuing new batches once the budget is spent.
fn run_candidates(
    state: &State3,
    pool: &[WaypointCandidate],
    cloud: &PointCloud,
    cfg: &ReplanConfig,
    clock: Instant,
) -> Vec<Option<Evaluation>> {
    let eval = |wp: &WaypointCandidate| validate_candidate(state, wp, cloud, cfg).ok();
    match cfg.mode {
        CandidateMode::FixedCount(n) => pool[..n.min(pool.len())].par_iter().map(eval).collect(),
        CandidateMode::Adaptive => {
            let batch = rayon::current_num_threads().max(1);
            let deadline = Duration::from_secs_f64(cfg.budget);
            let mut out = Vec::with_capacity(pool.len());
            for chunk in pool.chunks(batch) {
                if !out.is_empty() && clock.elapsed() >= deadline {
                    break;
                }
                out.par_extend(chunk.par_iter().map(eval));
            }
            out
        }
    }
}

/// Fewest colliding samples, then the latest first collision.
fn least_bad(evals: &[Evaluation]) -> Option<usize> {
    let key = |e: &Evaluation| {
        (
            e.report.count(SampleClass::Collide),
            -e.report.first_collision().unwrap_or(f64::INFINITY),
        )
    };
    let mut best: Option<(usize, (usize, f64))> = None;
    for (i, e) in evals.iter().enumerate() {
        let k = key(e);
        if best.is_none_or(|(_, b)| k.0 < b.0 || (k.0 == b.0 && k.1 < b.1)) {
            best = Some((i, k));
        }
    }
    best.map(|(i, _)| i)
}

fn standstill(state: &State3) -> Trajectory {
    use crate::trajectory::AxisProfile;
    Trajectory::from_profiles(std::array::from_fn(|i| {
        AxisProfile::hold(state.axes[i], 0.0)
    }))
}
