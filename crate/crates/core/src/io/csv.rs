use std::fmt::Write;

use crate::collision::SafetyReport;
use crate::sim::{SimLog, StepRecord};
use crate::trajectory::{Sample, State3};

pub const SAMPLE_HEADER: &str = "t,px,py,pz,vx,vy,vz,ax,ay,az";

/// Trajectory samples as CSV with [`SAMPLE_HEADER`] columns.
pub fn samples_csv(samples: &[Sample]) -> String {
    let mut out = String::from(SAMPLE_HEADER);
    out.push('\n');
    for s in samples {
        let (p, v, a) = (
            s.state.position(),
            s.state.velocity(),
            s.state.acceleration(),
        );
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            s.t, p.x, p.y, p.z, v.x, v.y, v.z, a.x, a.y, a.z
        );
    }
    out
}

/// Read back [`samples_csv`] output.
pub fn parse_samples_csv(text: &str) -> Result<Vec<Sample>, super::ParseError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 || line.trim().is_empty() {
            continue;
        }
        let err = |msg: String| super::ParseError { line: i + 1, msg };
        let v: Vec<f64> = line
            .split(',')
            .map(|f| {
                f.trim()
                    .parse::<f64>()
                    .map_err(|e| err(format!("'{f}': {e}")))
            })
            .collect::<Result<_, _>>()?;
        if v.len() != 10 {
            return Err(err(format!("expected 10 columns, found {}", v.len())));
        }
        let mut state = State3::default();
        for k in 0..3 {
            state.axes[k].p = v[1 + k];
            state.axes[k].v = v[4 + k];
            state.axes[k].a = v[7 + k];
        }
        out.push(Sample { t: v[0], state });
    }
    Ok(out)
}

/// Per-sample verdicts; offending point indices are `;`-separated.
pub fn verdicts_csv(report: &SafetyReport, samples: &[Sample]) -> String {
    let mut out = String::from("index,t,px,py,pz,class,coverage,points\n");
    for (v, s) in report.samples.iter().zip(samples) {
        let p = s.position();
        let pts: Vec<String> = v.points.iter().map(|i| i.to_string()).collect();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            v.index,
            v.t,
            p.x,
            p.y,
            p.z,
            v.class.as_str(),
            super::coverage_str(v.coverage),
            pts.join(";")
        );
    }
    out
}

pub const STEP_HEADER: &str = "step,t,px,py,pz,vx,vy,vz,ax,ay,az,decision,candidates,safe_candidates,\
selected_x,selected_y,selected_z,target_x,target_y,target_z,cloud_points,clearance_ratio,min_distance,\
generation_us,aabb_us,crop_us,rollout_us,collision_us,coverage_us,replan_us";

/// One row per simulation step. Timing columns are wall-clock and vary
/// between runs; everything else is deterministic.
pub fn steps_csv(log: &SimLog) -> String {
    let mut out = String::from(STEP_HEADER);
    out.push('\n');
    for s in &log.steps {
        out.push_str(&step_row(s));
        out.push('\n');
    }
    out
}

fn step_row(s: &StepRecord) -> String {
    let (p, v, a) = (
        s.state.position(),
        s.state.velocity(),
        s.state.acceleration(),
    );
    let sel = match s.selected {
        Some(w) => format!("{},{},{}", w.x, w.y, w.z),
        None => ",,".into(),
    };
    let us = |d: std::time::Duration| d.as_secs_f64() * 1e6;
    let tm = &s.times;
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{:.3},{:.3},{:.3},{:.3},{:.3},{:.3},{:.3}",
        s.step,
        s.t,
        p.x,
        p.y,
        p.z,
        v.x,
        v.y,
        v.z,
        a.x,
        a.y,
        a.z,
        s.decision.as_str(),
        s.candidates,
        s.safe_candidates,
        sel,
        s.target.x,
        s.target.y,
        s.target.z,
        s.cloud_points,
        s.clearance_ratio,
        s.min_distance,
        us(tm.generation),
        us(tm.aabb),
        us(tm.crop),
        us(tm.rollout),
        us(tm.collision),
        us(tm.coverage),
        us(s.replan_time),
    )
}
