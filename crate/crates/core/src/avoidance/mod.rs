//! Alternative waypoints, candidate validation and selection.

mod candidates;
mod replan;
mod select;
mod validate;

pub use candidates::{
    spheroid_waypoints, tube_waypoints, CandidateSource, SpheroidParams, TubeParams,
    WaypointCandidate,
};
pub use replan::{replan_step, ActivePlan, Decision, DecisionKind, ReplanOutcome};
pub use select::{select_best, SelectionState};
pub use validate::{
    check_trajectory, validate_candidate, CandidateMode, Evaluation, ReplanConfig, StageTimes,
};
