use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::checks::{check_moving, check_static, ClearanceSpec};
use super::cloud::PointCloud;
use super::coverage::{coverage_class, CoverageClass, SensorModel};
use crate::trajectory::Sample;

/// Per-sample classification, ordered by severity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleClass {
    Safe,
    Unobserved,
    Warn,
    Collide,
}

impl SampleClass {
    pub fn as_str(self) -> &'static str {
        match self {
            SampleClass::Safe => "safe",
            SampleClass::Unobserved => "unobserved",
            SampleClass::Warn => "warn",
            SampleClass::Collide => "collide",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleVerdict {
    pub index: usize,
    /// Sample time since trajectory start.
    pub t: f64,
    pub class: SampleClass,
    pub coverage: CoverageClass,
    /// Cloud indices inside the box that decided `class` (collision box for
    /// `Collide`, warning box for `Warn`).
    pub points: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Context {
    /// The trajectory currently being flown.
    Executing,
    /// An alternative under consideration.
    Candidate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Safe,
    Replan,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SafetyReport {
    pub samples: Vec<SampleVerdict>,
    pub verdict: Verdict,
    pub reason: String,
}

impl SafetyReport {
    pub fn is_safe(&self) -> bool {
        self.verdict == Verdict::Safe
    }

    pub fn count(&self, class: SampleClass) -> usize {
        self.samples.iter().filter(|s| s.class == class).count()
    }

    /// Time of the first colliding sample, if any.
    pub fn first_collision(&self) -> Option<f64> {
        self.samples
            .iter()
            .find(|s| s.class == SampleClass::Collide)
            .map(|s| s.t)
    }
}

/// Collision pass only: `Collide`, `Warn` or `Safe` per sample, with the
/// offending cloud indices. `subset` restricts the points checked.
pub fn collision_pass(
    samples: &[Sample],
    cloud: &PointCloud,
    subset: Option<&[usize]>,
    spec: &ClearanceSpec,
    horizon: f64,
) -> Vec<(SampleClass, Vec<usize>)> {
    let outer = spec.outer();
    let window = (0.0, horizon);
    let hit = |p: &Vector3<f64>, idx: usize, l: &Vector3<f64>| {
        let pt = &cloud.points[idx];
        if pt.is_static() {
            check_static(p, pt, l)
        } else {
            check_moving(p, pt, l, window)
        }
    };
    samples
        .iter()
        .map(|s| {
            let p = s.position();
            let mut coll = Vec::new();
            let mut warn = Vec::new();
            let mut visit = |idx: usize| {
                if hit(&p, idx, &outer) {
                    if hit(&p, idx, &spec.l_coll) {
                        coll.push(idx);
                    }
                    if hit(&p, idx, &spec.l_warn) {
                        warn.push(idx);
                    }
                }
            };
            match subset {
                Some(ids) => ids.iter().for_each(|&i| visit(i)),
                None => (0..cloud.points.len()).for_each(&mut visit),
            }
            if !coll.is_empty() {
                (SampleClass::Collide, coll)
            } else if !warn.is_empty() {
                (SampleClass::Warn, warn)
            } else {
                (SampleClass::Safe, Vec::new())
            }
        })
        .collect()
}

/// Coverage pass only, relative to the scan origin.
pub fn coverage_pass(
    samples: &[Sample],
    sensor: &SensorModel,
    origin: &Vector3<f64>,
) -> Vec<CoverageClass> {
    samples
        .iter()
        .map(|s| coverage_class(&s.position(), sensor, origin))
        .collect()
}

/// Merge both passes: collide over warn over unobserved over safe.
pub fn merge_passes(
    samples: &[Sample],
    collision: Vec<(SampleClass, Vec<usize>)>,
    coverage: Vec<CoverageClass>,
) -> Vec<SampleVerdict> {
    samples
        .iter()
        .zip(collision)
        .zip(coverage)
        .enumerate()
        .map(|(index, ((s, (class, points)), cov))| {
            let class = if class == SampleClass::Safe && !cov.is_covered() {
                SampleClass::Unobserved
            } else {
                class
            };
            SampleVerdict {
                index,
                t: s.t,
                class,
                coverage: cov,
                points,
            }
        })
        .collect()
}

/// Classify every sample against the cloud (optionally a cropped subset)
/// and the sensor's coverage from the scan origin.
pub fn classify_samples(
    samples: &[Sample],
    cloud: &PointCloud,
    subset: Option<&[usize]>,
    spec: &ClearanceSpec,
    sensor: &SensorModel,
    horizon: f64,
) -> Vec<SampleVerdict> {
    let collision = collision_pass(samples, cloud, subset, spec, horizon);
    let coverage = coverage_pass(samples, sensor, &cloud.origin);
    merge_passes(samples, collision, coverage)
}

/// Trajectory-level verdict.
///
/// Any colliding or unobserved sample requires a replan. Warning samples are
/// tolerated only as a prefix starting at the first sample that later clears
/// to a non-warning sample: leaving a warning zone is allowed, entering one
/// is not. The rule is the same for both contexts; `context` only changes the
/// wording of the reason.
pub fn classify_trajectory(samples: Vec<SampleVerdict>, context: Context) -> SafetyReport {
    let what = match context {
        Context::Executing => "current trajectory",
        Context::Candidate => "candidate",
    };
    let fail = |samples, reason: String| SafetyReport {
        samples,
        verdict: Verdict::Replan,
        reason,
    };
    if let Some(s) = samples.iter().find(|s| s.class == SampleClass::Collide) {
        let reason = format!("{what} collides at sample {} (t={:.3})", s.index, s.t);
        return fail(samples, reason);
    }
    if let Some(s) = samples.iter().find(|s| s.class == SampleClass::Unobserved) {
        let reason = format!(
            "{what} enters unobserved space at sample {} (t={:.3})",
            s.index, s.t
        );
        return fail(samples, reason);
    }
    let prefix = samples
        .iter()
        .take_while(|s| s.class == SampleClass::Warn)
        .count();
    if prefix == samples.len() && prefix > 0 {
        let reason = format!("{what} stays within warning distance");
        return fail(samples, reason);
    }
    if let Some(s) = samples[prefix..]
        .iter()
        .find(|s| s.class == SampleClass::Warn)
    {
        let reason = format!(
            "{what} enters warning distance at sample {} (t={:.3})",
            s.index, s.t
        );
        return fail(samples, reason);
    }
    let reason = if prefix > 0 {
        format!("{what} leaves warning distance after {prefix} samples")
    } else {
        format!("{what} is clear")
    };
    SafetyReport {
        samples,
        verdict: Verdict::Safe,
        reason,
    }
}
