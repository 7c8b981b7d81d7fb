//! Point-cloud cropping, clearance checks and lidar coverage.

mod checks;
mod classify;
mod cloud;
mod coverage;

pub use checks::{check_moving, check_static, crop_cloud, ClearanceSpec};
pub use classify::{
    classify_samples, classify_trajectory, collision_pass, coverage_pass, merge_passes, Context,
    SafetyReport, SampleClass, SampleVerdict, Verdict,
};
pub use cloud::{CloudPoint, PointCloud};
pub use coverage::{coverage_class, CoverageClass, SensorModel};
