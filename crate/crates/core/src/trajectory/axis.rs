//! Single-axis time-optimal, jerk-limited profiles.
//!
//! A profile is a chain of constant-jerk phases. Time-optimal profiles take
//! one of two shapes:
//!
//! * **cruise**: a fastest velocity change from the start to `(v_c, a = 0)`,
//!   an optional constant-velocity phase, and a fastest velocity change to the
//!   target. Covers every profile whose peak velocity is reached with zero
//!   acceleration, including the classic seven-phase rest-to-rest motion.
//! * **three-ramp**: jerk `±j`, `∓j`, `±j` with optional acceleration
//!   plateaus at the bounds. Covers profiles whose acceleration never passes
//!   through zero between the outer ramps (for instance a start that is
//!   already decelerating hard).
//!
//! Each shape is reduced to a scalar equation in the remaining free parameter
//! which is bracketed on a grid and refined by bisection. The fastest valid
//! candidate wins.

use super::state::{AxisConstraints, AxisState};
use super::PlanError;

/// Constant-jerk piece of an axis trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub duration: f64,
    /// Jerk applied for the whole segment (m/s³).
    pub j: f64,
    /// State at the start of the segment.
    pub start: AxisState,
}

impl Segment {
    /// State `t` seconds into the segment (not clamped).
    #[inline]
    pub fn state_at(&self, t: f64) -> AxisState {
        self.start.advance(self.j, t)
    }

    #[inline]
    pub fn end(&self) -> AxisState {
        self.state_at(self.duration)
    }
}

/// A planned single-axis motion.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisProfile {
    pub segments: Vec<Segment>,
    /// Start time of every segment, cumulative.
    offsets: Vec<f64>,
    pub start: AxisState,
    pub duration: f64,
}

impl AxisProfile {
    fn from_phases(start: AxisState, phases: &Phases) -> Self {
        let mut segments = Vec::with_capacity(phases.len);
        let mut offsets = Vec::with_capacity(phases.len);
        let mut state = start;
        let mut t = 0.0;
        for ph in phases.iter().filter(|ph| ph.duration > 0.0) {
            segments.push(Segment {
                duration: ph.duration,
                j: ph.jerk,
                start: state,
            });
            offsets.push(t);
            state = state.advance(ph.jerk, ph.duration);
            t += ph.duration;
        }
        Self {
            segments,
            offsets,
            start,
            duration: t,
        }
    }

    /// Profile from explicit `(jerk, duration)` pieces.
    pub fn from_jerks(start: AxisState, pieces: &[(f64, f64)]) -> Self {
        let mut segments = Vec::with_capacity(pieces.len());
        let mut offsets = Vec::with_capacity(pieces.len());
        let mut state = start;
        let mut t = 0.0;
        for &(j, duration) in pieces.iter().filter(|p| p.1 > 0.0) {
            segments.push(Segment {
                duration,
                j,
                start: state,
            });
            offsets.push(t);
            state = state.advance(j, duration);
            t += duration;
        }
        Self {
            segments,
            offsets,
            start,
            duration: t,
        }
    }

    /// A profile that stays at `state` for `duration` seconds with zero jerk.
    pub fn hold(state: AxisState, duration: f64) -> Self {
        let mut phases = Phases::default();
        phases.push(0.0, duration);
        Self::from_phases(state, &phases)
    }

    /// Time at which segment `i` begins.
    pub fn segment_start_time(&self, i: usize) -> f64 {
        self.offsets[i]
    }

    pub fn end_state(&self) -> AxisState {
        self.segments.last().map_or(self.start, Segment::end)
    }

    /// Evaluate at `t`. Times past the end extrapolate the last segment,
    /// which only matters for rounding-level overshoot.
    pub fn eval(&self, t: f64) -> AxisState {
        if self.segments.is_empty() || t <= 0.0 {
            return if self.segments.is_empty() {
                self.start.advance(0.0, t.max(0.0))
            } else {
                self.start
            };
        }
        let idx = self.segment_index(t);
        self.segments[idx].state_at(t - self.offsets[idx])
    }

    /// Index of the segment containing `t` (the later one at a border).
    pub fn segment_index(&self, t: f64) -> usize {
        match self.offsets.partition_point(|&o| o <= t) {
            0 => 0,
            n => n - 1,
        }
    }

    /// Remainder of the profile from `t` on, re-based to start at zero.
    pub fn tail(&self, t: f64) -> Self {
        let t = t.clamp(0.0, self.duration);
        let start = self.eval(t);
        let mut segments = Vec::new();
        let mut offsets = Vec::new();
        let mut elapsed = 0.0;
        if !self.segments.is_empty() {
            let first = self.segment_index(t);
            for (i, seg) in self.segments.iter().enumerate().skip(first) {
                let skip = if i == first { t - self.offsets[i] } else { 0.0 };
                let duration = seg.duration - skip;
                if duration <= 0.0 {
                    continue;
                }
                let seg_start = if i == first { start } else { seg.start };
                segments.push(Segment {
                    duration,
                    j: seg.j,
                    start: seg_start,
                });
                offsets.push(elapsed);
                elapsed += duration;
            }
        }
        Self {
            segments,
            offsets,
            start,
            duration: elapsed,
        }
    }

    /// Stretch or shrink the final segment so the total duration is exactly
    /// `duration`. Used to absorb rounding-level mismatches after
    /// synchronization.
    pub(crate) fn set_duration(&mut self, duration: f64) {
        let delta = duration - self.duration;
        match self.segments.last_mut() {
            Some(last) if last.duration + delta > 0.0 => {
                last.duration += delta;
            }
            Some(_) => {}
            None => {
                *self = Self::hold(self.start, duration);
                return;
            }
        }
        self.duration = duration;
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Phase {
    jerk: f64,
    duration: f64,
}

/// Inline list of at most eight phases.
#[derive(Debug, Clone, Copy, Default)]
struct Phases {
    items: [Phase; 8],
    len: usize,
}

impl Phases {
    fn push(&mut self, jerk: f64, duration: f64) {
        debug_assert!(self.len < self.items.len());
        self.items[self.len] = Phase {
            jerk,
            duration: duration.max(0.0),
        };
        self.len += 1;
    }

    fn extend(&mut self, other: &Phases) {
        for ph in other.iter() {
            self.push(ph.jerk, ph.duration);
        }
    }

    fn iter(&self) -> impl Iterator<Item = &Phase> {
        self.items[..self.len].iter()
    }

    fn duration(&self) -> f64 {
        self.iter().map(|p| p.duration).sum()
    }

    fn end_state(&self, start: AxisState) -> AxisState {
        self.iter()
            .fold(start, |s, ph| s.advance(ph.jerk, ph.duration))
    }
}

const TIME_EPS: f64 = 1e-12;
const END_TOL: f64 = 1e-9;
const BOUND_TOL: f64 = 1e-9;
const SCAN_POINTS: usize = 48;
const BISECT_ITERS: usize = 100;

/// Fastest change from `(v_s, a_s)` to `(v_e, a_e)` using a first ramp with
/// jerk `j1`, an optional plateau at `a_lim` and a second ramp with jerk `j2`.
/// `branch` selects the sign of the turning acceleration.
fn velocity_change(
    v_s: f64,
    a_s: f64,
    v_e: f64,
    a_e: f64,
    j1: f64,
    j2: f64,
    a_lim: f64,
    branch: f64,
) -> Option<Phases> {
    let k = 0.5 / j1 - 0.5 / j2;
    let dv = v_e - v_s;
    let mut x = (dv + 0.5 * a_s * a_s / j1 - 0.5 * a_e * a_e / j2) / k;
    if x < 0.0 {
        let scale = a_s.abs().max(a_e.abs()).max(1.0);
        if x < -1e-12 * scale * scale {
            return None;
        }
        x = 0.0;
    }
    let mut a_m = branch * x.sqrt();
    let mut t1 = (a_m - a_s) / j1;
    let mut t3 = (a_e - a_m) / j2;
    if t1 < -TIME_EPS || t3 < -TIME_EPS {
        return None;
    }
    let mut t2 = 0.0;
    if (a_m - a_lim) * j1.signum() > 0.0 {
        a_m = a_lim;
        t1 = (a_m - a_s) / j1;
        t3 = (a_e - a_m) / j2;
        let dv_ramps = 0.5 * (a_m * a_m - a_s * a_s) / j1 + 0.5 * (a_e * a_e - a_m * a_m) / j2;
        t2 = (dv - dv_ramps) / a_m;
        if t1 < -TIME_EPS || t3 < -TIME_EPS || t2 < -TIME_EPS {
            return None;
        }
    }
    let mut out = Phases::default();
    out.push(j1, t1);
    out.push(0.0, t2);
    out.push(j2, t3);
    Some(out)
}

/// Time-optimal velocity change over both ramp orders and both branches.
fn fastest_velocity_change(
    v_s: f64,
    a_s: f64,
    v_e: f64,
    a_e: f64,
    c: &AxisConstraints,
) -> Option<Phases> {
    let options = [
        (c.j_max, c.j_min, c.a_max, 1.0),
        (c.j_max, c.j_min, c.a_max, -1.0),
        (c.j_min, c.j_max, c.a_min, 1.0),
        (c.j_min, c.j_max, c.a_min, -1.0),
    ];
    let mut best: Option<Phases> = None;
    for (j1, j2, lim, branch) in options {
        if let Some(ph) = velocity_change(v_s, a_s, v_e, a_e, j1, j2, lim, branch) {
            if best.is_none_or(|b| ph.duration() < b.duration()) {
                best = Some(ph);
            }
        }
    }
    best
}

/// The two velocity changes of a cruise-shaped profile through `(v_c, 0)`.
/// Returns the halves and the position residual left for the cruise phase.
fn cruise_halves(
    start: AxisState,
    target: AxisState,
    c: &AxisConstraints,
    v_c: f64,
) -> Option<(Phases, Phases, f64)> {
    let first = fastest_velocity_change(start.v, start.a, v_c, 0.0, c)?;
    let second = fastest_velocity_change(v_c, 0.0, target.v, target.a, c)?;
    let mid = first.end_state(AxisState::new(0.0, start.v, start.a));
    let end = second.end_state(AxisState::new(0.0, v_c, 0.0));
    let residual = (target.p - start.p) - mid.p - end.p;
    Some((first, second, residual))
}

fn assemble_cruise(first: &Phases, cruise: f64, second: &Phases) -> Phases {
    let mut out = *first;
    out.push(0.0, cruise);
    out.extend(second);
    out
}

/// Cruise-shaped profile with cruise duration implied by the position residual.
fn cruise_profile(
    start: AxisState,
    target: AxisState,
    c: &AxisConstraints,
    v_c: f64,
) -> Option<Phases> {
    let (first, second, residual) = cruise_halves(start, target, c, v_c)?;
    let cruise = if v_c == 0.0 {
        if residual.abs() > END_TOL {
            return None;
        }
        0.0
    } else {
        residual / v_c
    };
    if cruise < -TIME_EPS {
        return None;
    }
    Some(assemble_cruise(&first, cruise.max(0.0), &second))
}

/// Three-ramp profile: ramp with jerk `j_up` for up to `ramp_max`, then a
/// plateau at the bound for the rest of `s`, then a fixed-order velocity
/// change to the target.
fn three_ramp_profile(
    start: AxisState,
    target: AxisState,
    c: &AxisConstraints,
    sigma: f64,
    branch: f64,
    s: f64,
) -> Option<Phases> {
    let (j_up, j_down, a_up, a_down) = if sigma > 0.0 {
        (c.j_max, c.j_min, c.a_max, c.a_min)
    } else {
        (c.j_min, c.j_max, c.a_min, c.a_max)
    };
    let ramp_max = ((a_up - start.a) / j_up).max(0.0);
    let ramp = s.min(ramp_max);
    let plateau = (s - ramp_max).max(0.0);
    let mut out = Phases::default();
    out.push(j_up, ramp);
    out.push(0.0, plateau);
    let mid = out.end_state(start);
    let rest = velocity_change(
        mid.v, mid.a, target.v, target.a, j_down, j_up, a_down, branch,
    )?;
    out.extend(&rest);
    Some(out)
}

fn three_ramp_extent(start: AxisState, c: &AxisConstraints, sigma: f64) -> (f64, f64) {
    let (j_up, a_up, v_lim) = if sigma > 0.0 {
        (c.j_max, c.a_max, c.v_max)
    } else {
        (c.j_min, c.a_min, c.v_min)
    };
    let ramp_max = ((a_up - start.a) / j_up).max(0.0);
    let after = start.advance(j_up, ramp_max);
    let plateau_max = ((v_lim - after.v) / a_up).max(0.0);
    (ramp_max, plateau_max)
}

/// Grid over `[lo, hi]` with `n` intervals (both ends included).
fn linspace(lo: f64, hi: f64, n: usize, out: &mut Vec<f64>) {
    if hi <= lo {
        out.push(lo);
        return;
    }
    for i in 0..=n {
        out.push(lo + (hi - lo) * i as f64 / n as f64);
    }
}

/// Sign changes of `f` over consecutive grid points, refined by bisection.
/// Points where `f` is undefined break the bracket.
fn bracket_roots(grid: &[f64], f: impl Fn(f64) -> Option<f64>, roots: &mut Vec<f64>) {
    let mut prev: Option<(f64, f64)> = None;
    for &x in grid {
        let fx = f(x);
        if let Some(fx) = fx {
            if fx == 0.0 {
                roots.push(x);
            } else if let Some((px, pf)) = prev {
                if pf != 0.0 && pf.signum() != fx.signum() {
                    if let Some(r) = bisect(&f, px, pf, x) {
                        roots.push(r);
                    }
                }
            }
        }
        prev = fx.map(|v| (x, v));
    }
}

fn bisect(f: &impl Fn(f64) -> Option<f64>, mut lo: f64, mut f_lo: f64, mut hi: f64) -> Option<f64> {
    for _ in 0..BISECT_ITERS {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Some(mid);
        }
        if fm.signum() == f_lo.signum() {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Check bounds along the profile and that it lands on the target.
fn is_valid(start: AxisState, target: AxisState, phases: &Phases, c: &AxisConstraints) -> bool {
    let mut s = start;
    for ph in phases.iter() {
        if ph.duration > 0.0 && (ph.jerk < c.j_min - BOUND_TOL || ph.jerk > c.j_max + BOUND_TOL) {
            return false;
        }
        if ph.jerk != 0.0 {
            let t_turn = -s.a / ph.jerk;
            if t_turn > 0.0 && t_turn < ph.duration {
                let v = s.advance(ph.jerk, t_turn).v;
                if v < c.v_min - BOUND_TOL || v > c.v_max + BOUND_TOL {
                    return false;
                }
            }
        }
        s = s.advance(ph.jerk, ph.duration);
        if s.v < c.v_min - BOUND_TOL
            || s.v > c.v_max + BOUND_TOL
            || s.a < c.a_min - BOUND_TOL
            || s.a > c.a_max + BOUND_TOL
        {
            return false;
        }
    }
    let scale = 1.0 + target.p.abs();
    (s.p - target.p).abs() <= END_TOL * scale
        && (s.v - target.v).abs() <= END_TOL
        && (s.a - target.a).abs() <= END_TOL
}

/// Reject states that are outside the bounds or that force a velocity
/// overshoot because the acceleration cannot be removed fast enough.
fn check_boundary(state: AxisState, c: &AxisConstraints, is_start: bool) -> Result<(), PlanError> {
    let which = if is_start { "start" } else { "target" };
    let fail = |reason: String| Err(PlanError::InfeasibleState { which, reason });
    if !state.is_finite() {
        return fail("non-finite state".into());
    }
    if state.v < c.v_min - BOUND_TOL || state.v > c.v_max + BOUND_TOL {
        return fail(format!(
            "velocity {} outside [{}, {}]",
            state.v, c.v_min, c.v_max
        ));
    }
    if state.a < c.a_min - BOUND_TOL || state.a > c.a_max + BOUND_TOL {
        return fail(format!(
            "acceleration {} outside [{}, {}]",
            state.a, c.a_min, c.a_max
        ));
    }
    // Velocity where the acceleration reaches zero (forward in time for the
    // start, backward for the target).
    let v_turn = if is_start {
        let j = if state.a > 0.0 { c.j_min } else { c.j_max };
        state.v - 0.5 * state.a * state.a / j
    } else {
        let j = if state.a > 0.0 { c.j_max } else { c.j_min };
        state.v - 0.5 * state.a * state.a / j
    };
    if v_turn < c.v_min - 1e-7 || v_turn > c.v_max + 1e-7 {
        return fail(format!(
            "acceleration {} cannot be removed before velocity leaves [{}, {}]",
            state.a, c.v_min, c.v_max
        ));
    }
    Ok(())
}

fn is_trivial(start: AxisState, target: AxisState) -> bool {
    start.max_abs_diff(&target) <= 1e-12
}

/// Time-optimal jerk-limited profile from `start` to `target`.
pub fn plan_axis(
    start: AxisState,
    target: AxisState,
    c: &AxisConstraints,
) -> Result<AxisProfile, PlanError> {
    c.validate()?;
    check_boundary(start, c, true)?;
    check_boundary(target, c, false)?;
    if is_trivial(start, target) {
        return Ok(AxisProfile::from_phases(start, &Phases::default()));
    }
    let phases = optimal_phases(start, target, c).ok_or(PlanError::NoSolution)?;
    Ok(AxisProfile::from_phases(start, &phases))
}

fn optimal_phases(start: AxisState, target: AxisState, c: &AxisConstraints) -> Option<Phases> {
    let mut best: Option<Phases> = None;
    let mut consider = |ph: Option<Phases>| {
        if let Some(ph) = ph {
            if is_valid(start, target, &ph, c) && best.is_none_or(|b| ph.duration() < b.duration())
            {
                best = Some(ph);
            }
        }
    };

    // Cruise at a velocity bound.
    consider(cruise_profile(start, target, c, c.v_max));
    consider(cruise_profile(start, target, c, c.v_min));

    // Peak velocity below the bounds: zero-length cruise.
    let mut grid = Vec::with_capacity(2 * SCAN_POINTS + 4);
    linspace(c.v_min, c.v_max, 2 * SCAN_POINTS, &mut grid);
    grid.push(0.0);
    grid.sort_by(f64::total_cmp);
    let mut roots = Vec::new();
    bracket_roots(
        &grid,
        |v_c| cruise_halves(start, target, c, v_c).map(|(_, _, r)| r),
        &mut roots,
    );
    for &v_c in &roots {
        if let Some((first, second, _)) = cruise_halves(start, target, c, v_c) {
            consider(Some(assemble_cruise(&first, 0.0, &second)));
        }
    }

    // Three-ramp shapes.
    for sigma in [1.0, -1.0] {
        let (ramp_max, plateau_max) = three_ramp_extent(start, c, sigma);
        grid.clear();
        linspace(0.0, ramp_max, SCAN_POINTS, &mut grid);
        if plateau_max > 0.0 {
            grid.pop();
            linspace(ramp_max, ramp_max + plateau_max, SCAN_POINTS, &mut grid);
        }
        for branch in [1.0, -1.0] {
            let residual = |s: f64| {
                three_ramp_profile(start, target, c, sigma, branch, s)
                    .map(|ph| ph.end_state(start).p - target.p)
            };
            roots.clear();
            bracket_roots(&grid, residual, &mut roots);
            for &s in &roots {
                consider(three_ramp_profile(start, target, c, sigma, branch, s));
            }
        }
    }
    best
}

/// Jerk-limited profile from `start` to `target` taking exactly `duration`
/// seconds.
///
/// The optimal profile is slowed down by lowering its peak velocity; when the
/// optimum has no zero-acceleration point to cruise at, an intermediate
/// acceleration hold is used instead.
pub fn plan_axis_fixed_time(
    start: AxisState,
    target: AxisState,
    c: &AxisConstraints,
    duration: f64,
) -> Result<AxisProfile, PlanError> {
    let optimal = plan_axis(start, target, c)?;
    stretch(optimal, target, c, duration)
}

/// Stretch an already planned time-optimal profile to `duration`.
pub(crate) fn stretch(
    optimal: AxisProfile,
    target: AxisState,
    c: &AxisConstraints,
    duration: f64,
) -> Result<AxisProfile, PlanError> {
    let start = optimal.start;
    if !duration.is_finite() || duration < optimal.duration - 1e-9 {
        return Err(PlanError::FixedTimeInfeasible {
            requested: duration,
            minimum: optimal.duration,
        });
    }
    if duration - optimal.duration <= 1e-9 {
        let mut p = optimal;
        p.set_duration(duration.max(p.duration));
        return Ok(p);
    }
    if is_trivial(start, target) {
        return Ok(AxisProfile::hold(start, duration));
    }
    let phases = stretched_cruise(start, target, c, duration)
        .or_else(|| stretched_hold(start, target, c, duration))
        .ok_or(PlanError::FixedTimeInfeasible {
            requested: duration,
            minimum: optimal.duration,
        })?;
    let mut profile = AxisProfile::from_phases(start, &phases);
    profile.set_duration(duration);
    Ok(profile)
}

fn close_enough(ph: &Phases, duration: f64) -> bool {
    (ph.duration() - duration).abs() <= 1e-9 * duration.max(1.0)
}

/// Cruise-shaped profile whose cruise velocity is chosen so the total time
/// equals `duration`.
fn stretched_cruise(
    start: AxisState,
    target: AxisState,
    c: &AxisConstraints,
    duration: f64,
) -> Option<Phases> {
    // Stop, wait, continue: exact when the stop lands on the target position.
    if let Some((first, second, residual)) = cruise_halves(start, target, c, 0.0) {
        if residual.abs() <= END_TOL {
            let wait = duration - first.duration() - second.duration();
            if wait >= 0.0 {
                let ph = assemble_cruise(&first, wait, &second);
                if is_valid(start, target, &ph, c) {
                    return Some(ph);
                }
            }
        }
    }

    let mut grid = Vec::with_capacity(4 * SCAN_POINTS);
    linspace(c.v_min, c.v_max, 2 * SCAN_POINTS, &mut grid);
    for k in 1..=48 {
        let f = 0.5f64.powi(k);
        grid.push(c.v_max * f);
        grid.push(c.v_min * f);
    }
    // Points where the cruise length is zero bound the feasible runs.
    let mut zero_cruise = Vec::new();
    let mut sorted = grid.clone();
    sorted.push(0.0);
    sorted.sort_by(f64::total_cmp);
    bracket_roots(
        &sorted,
        |v_c| cruise_halves(start, target, c, v_c).map(|(_, _, r)| r),
        &mut zero_cruise,
    );
    grid.extend(zero_cruise.iter().copied().filter(|&v| v != 0.0));
    grid.retain(|&v| v != 0.0);
    // Fastest candidates first.
    grid.sort_by(|a, b| b.abs().total_cmp(&a.abs()).then(b.total_cmp(a)));

    let excess = |v_c: f64| -> Option<f64> {
        let (first, second, residual) = cruise_halves(start, target, c, v_c)?;
        let cruise = residual / v_c;
        if cruise < -1e-9 {
            return None;
        }
        Some(first.duration() + second.duration() + cruise.max(0.0) - duration)
    };
    let build = |v_c: f64| -> Option<Phases> {
        let (first, second, residual) = cruise_halves(start, target, c, v_c)?;
        let ph = assemble_cruise(&first, (residual / v_c).max(0.0), &second);
        (is_valid(start, target, &ph, c) && close_enough(&ph, duration)).then_some(ph)
    };

    // Walk each sign separately so brackets never straddle v_c = 0.
    for sign in [1.0, -1.0] {
        let side: Vec<f64> = grid
            .iter()
            .copied()
            .filter(|v| v.signum() == sign)
            .collect();
        let mut roots = Vec::new();
        bracket_roots(&side, excess, &mut roots);
        for v_c in roots {
            if let Some(ph) = build(v_c) {
                return Some(ph);
            }
        }
    }
    None
}

/// Three-ramp profile with a hold at an intermediate acceleration, the hold
/// length chosen to hit the target position and the hold acceleration chosen
/// to hit the duration.
fn stretched_hold(
    start: AxisState,
    target: AxisState,
    c: &AxisConstraints,
    duration: f64,
) -> Option<Phases> {
    for sigma in [1.0, -1.0] {
        let (j_up, j_down, a_up, a_down) = if sigma > 0.0 {
            (c.j_max, c.j_min, c.a_max, c.a_min)
        } else {
            (c.j_min, c.j_max, c.a_min, c.a_max)
        };
        if (a_up - start.a) * sigma < 0.0 {
            continue;
        }
        for branch in [1.0, -1.0] {
            // Profile for hold acceleration `a_hold` and hold time `h`.
            let build = |a_hold: f64, h: f64| -> Option<Phases> {
                let mut out = Phases::default();
                out.push(j_up, (a_hold - start.a) / j_up);
                out.push(0.0, h);
                let mid = out.end_state(start);
                let rest = velocity_change(
                    mid.v, mid.a, target.v, target.a, j_down, j_up, a_down, branch,
                )?;
                out.extend(&rest);
                Some(out)
            };
            // First hold time that lands on the target position.
            let hold_for = |a_hold: f64| -> Option<f64> {
                let ramp = (a_hold - start.a) / j_up;
                let after = start.advance(j_up, ramp);
                let v_lim = if a_hold > 0.0 { c.v_max } else { c.v_min };
                let h_max = if a_hold == 0.0 {
                    duration
                } else {
                    ((v_lim - after.v) / a_hold).clamp(0.0, duration)
                };
                let mut grid = Vec::new();
                linspace(0.0, h_max, SCAN_POINTS, &mut grid);
                let mut roots = Vec::new();
                bracket_roots(
                    &grid,
                    |h| build(a_hold, h).map(|ph| ph.end_state(start).p - target.p),
                    &mut roots,
                );
                roots.first().copied()
            };
            let excess = |a_hold: f64| -> Option<f64> {
                let h = hold_for(a_hold)?;
                Some(build(a_hold, h)?.duration() - duration)
            };
            let mut grid = Vec::new();
            linspace(start.a, a_up, SCAN_POINTS, &mut grid);
            let mut roots = Vec::new();
            bracket_roots(&grid, excess, &mut roots);
            for a_hold in roots {
                if let Some(ph) = hold_for(a_hold).and_then(|h| build(a_hold, h)) {
                    if is_valid(start, target, &ph, c) && close_enough(&ph, duration) {
                        return Some(ph);
                    }
                }
            }
        }
    }
    None
}
