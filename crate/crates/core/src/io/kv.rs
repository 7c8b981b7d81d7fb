//! Flat `key=value` text, one entry per line, nesting by dotted keys.

use std::collections::BTreeMap;
use std::fmt::Write;

use super::ParseError;
use crate::collision::{SafetyReport, SampleClass, Verdict};
use crate::sim::{SimLog, Termination};

/// Ordered key-value document.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KeyValues(pub Vec<(String, String)>);

impl KeyValues {
    pub fn push(&mut self, key: &str, value: impl ToString) {
        self.0.push((key.to_string(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn to_map(&self) -> BTreeMap<String, String> {
        self.0.iter().cloned().collect()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.0 {
            let _ = writeln!(out, "{k}={v}");
        }
        out
    }

    /// Parse `key=value` lines; `#` comments and blank lines are skipped.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut out = KeyValues::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end();
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(ParseError {
                    line: i + 1,
                    msg: "expected key=value".into(),
                });
            };
            if k.is_empty() || k.contains(char::is_whitespace) {
                return Err(ParseError {
                    line: i + 1,
                    msg: format!("bad key '{k}'"),
                });
            }
            out.push(k, v);
        }
        Ok(out)
    }
}

pub fn verdict_str(v: Verdict) -> &'static str {
    match v {
        Verdict::Safe => "safe",
        Verdict::Replan => "replan",
    }
}

pub fn termination_str(t: Termination) -> &'static str {
    match t {
        Termination::Goal => "goal",
        Termination::Collision => "collision",
        Termination::Timeout => "timeout",
    }
}

pub fn report_kv(report: &SafetyReport, cloud_points: usize, cropped_points: usize) -> KeyValues {
    let mut kv = KeyValues::default();
    kv.push("verdict", verdict_str(report.verdict));
    kv.push("reason", &report.reason);
    kv.push("samples", report.samples.len());
    for class in [
        SampleClass::Safe,
        SampleClass::Warn,
        SampleClass::Collide,
        SampleClass::Unobserved,
    ] {
        kv.push(&format!("count.{}", class.as_str()), report.count(class));
    }
    kv.push(
        "first_collision_t",
        report
            .first_collision()
            .map_or(String::from("none"), |t| t.to_string()),
    );
    kv.push("cloud.points", cloud_points);
    kv.push("cloud.cropped", cropped_points);
    kv
}

pub fn summary_kv(log: &SimLog) -> KeyValues {
    let mut kv = KeyValues::default();
    kv.push("name", &log.name);
    kv.push("termination", termination_str(log.termination));
    kv.push("goal_reached", log.goal_reached);
    kv.push("collision", log.collision);
    kv.push("total_time", log.total_time);
    kv.push("steps", log.steps.len());
    kv.push("replans", log.replans);
    kv.push(
        "candidates.total",
        log.steps.iter().map(|s| s.candidates).sum::<usize>(),
    );
    kv.push(
        "candidates.max_per_step",
        log.steps.iter().map(|s| s.candidates).max().unwrap_or(0),
    );
    kv.push("min_clearance_ratio", log.min_clearance_ratio);
    kv.push("min_distance", log.min_distance);
    kv
}
