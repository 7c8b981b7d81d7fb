//! Timing harness for the validation pipeline.

use std::time::{Duration, Instant};

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::avoidance::{
    spheroid_waypoints, tube_waypoints, validate_candidate, ReplanConfig, StageTimes,
    WaypointCandidate,
};
use crate::collision::{CloudPoint, PointCloud};
use crate::io::KeyValues;
use crate::trajectory::{plan_3d, State3};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Stats {
    pub mean_us: f64,
    pub median_us: f64,
    pub p99_us: f64,
}

impl Stats {
    pub fn from_durations(d: &[Duration]) -> Self {
        if d.is_empty() {
            return Self::default();
        }
        let mut us: Vec<f64> = d.iter().map(|x| x.as_secs_f64() * 1e6).collect();
        us.sort_by(f64::total_cmp);
        let pick = |q: f64| us[((q * (us.len() - 1) as f64).round() as usize).min(us.len() - 1)];
        Self {
            mean_us: us.iter().sum::<f64>() / us.len() as f64,
            median_us: pick(0.5),
            p99_us: pick(0.99),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub cloud_size: usize,
    pub candidates: usize,
    pub repetitions: usize,
    pub workers: usize,
    pub generation: Stats,
    pub aabb: Stats,
    pub crop: Stats,
    pub rollout: Stats,
    pub collision: Stats,
    pub coverage: Stats,
    /// Whole `validate_candidate` call, timed from outside.
    pub total: Stats,
    /// Crop plus collision check per candidate, with cropping.
    pub check_with_crop_us: f64,
    /// Collision check per candidate over the full cloud.
    pub check_without_crop_us: f64,
    pub mean_retained_fraction: f64,
    /// Candidates validated within one replanning budget.
    pub candidates_per_budget: usize,
    pub budget_s: f64,
}

impl BenchReport {
    pub fn crop_speedup(&self) -> f64 {
        self.check_without_crop_us / self.check_with_crop_us
    }

    pub fn stage_sum_us(&self) -> f64 {
        [
            self.generation,
            self.aabb,
            self.crop,
            self.rollout,
            self.collision,
            self.coverage,
        ]
        .iter()
        .map(|s| s.mean_us)
        .sum()
    }

    pub fn to_kv(&self) -> KeyValues {
        let mut kv = KeyValues::default();
        kv.push("cloud_size", self.cloud_size);
        kv.push("candidates", self.candidates);
        kv.push("repetitions", self.repetitions);
        kv.push("workers", self.workers);
        for (name, s) in [
            ("generation", self.generation),
            ("aabb", self.aabb),
            ("crop", self.crop),
            ("rollout", self.rollout),
            ("collision", self.collision),
            ("coverage", self.coverage),
            ("total", self.total),
        ] {
            kv.push(&format!("{name}.mean_us"), format!("{:.3}", s.mean_us));
            kv.push(&format!("{name}.median_us"), format!("{:.3}", s.median_us));
            kv.push(&format!("{name}.p99_us"), format!("{:.3}", s.p99_us));
        }
        kv.push("stage_sum_us", format!("{:.3}", self.stage_sum_us()));
        kv.push(
            "ablation.with_crop_us",
            format!("{:.3}", self.check_with_crop_us),
        );
        kv.push(
            "ablation.without_crop_us",
            format!("{:.3}", self.check_without_crop_us),
        );
        kv.push("ablation.speedup", format!("{:.2}", self.crop_speedup()));
        kv.push(
            "ablation.retained_fraction",
            format!("{:.5}", self.mean_retained_fraction),
        );
        kv.push("budget_s", self.budget_s);
        kv.push("candidates_per_budget", self.candidates_per_budget);
        kv
    }
}

/// `n` static points uniform in a cube of side `side` centered at `center`.
pub fn synthetic_cloud(n: usize, side: f64, center: Vector3<f64>, seed: u64) -> PointCloud {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = 0.5 * side;
    let points = (0..n)
        .map(|_| CloudPoint::fixed(center + Vector3::from_fn(|_, _| rng.gen_range(-h..h))))
        .collect();
    PointCloud::new(points, center)
}

/// The benchmark scene: vehicle at the cube center in hover, a commanded
/// waypoint 5 m away, and the candidate pool of the replanner.
pub struct Scene {
    pub cloud: PointCloud,
    pub start: State3,
    pub commanded: Vector3<f64>,
    pub pool: Vec<WaypointCandidate>,
}

pub fn scene(cloud_size: usize, candidates: usize, cfg: &ReplanConfig, seed: u64) -> Scene {
    let cloud = synthetic_cloud(cloud_size, 100.0, Vector3::zeros(), seed);
    let start = State3::at_rest(Vector3::zeros());
    let commanded = Vector3::new(4.0, 3.0, 0.0);
    let original = plan_3d(&start, &State3::at_rest(commanded), &cfg.constraints)
        .expect("hover-to-hover plan is always feasible");
    let mut base = tube_waypoints(&original, &cfg.tube);
    base.extend(spheroid_waypoints(&start, &cfg.spheroid));
    let pool = (0..candidates.max(1))
        .map(|i| base[i % base.len()])
        .collect();
    Scene {
        cloud,
        start,
        commanded,
        pool,
    }
}

/// Time every stage over `repetitions` passes through `candidates`
/// candidates, compare checking with and without cropping, and count how
/// many candidates fit into one budget.
pub fn run_bench(
    cloud_size: usize,
    candidates: usize,
    repetitions: usize,
    cfg: &ReplanConfig,
    seed: u64,
) -> BenchReport {
    let sc = scene(cloud_size, candidates, cfg, seed);
    let mut with_crop = cfg.clone();
    with_crop.crop = true;
    let mut no_crop = cfg.clone();
    no_crop.crop = false;

    // Warm caches and the allocator.
    for wp in sc.pool.iter().take(8) {
        let _ = validate_candidate(&sc.start, wp, &sc.cloud, &with_crop);
    }

    let mut stages: Vec<StageTimes> = Vec::new();
    let mut totals = Vec::new();
    let mut retained = 0.0;
    let mut n_retained = 0usize;
    for _ in 0..repetitions.max(1) {
        for wp in &sc.pool {
            let t = Instant::now();
            let e = validate_candidate(&sc.start, wp, &sc.cloud, &with_crop);
            totals.push(t.elapsed());
            if let Ok(e) = e {
                stages.push(e.times);
                let b = crate::trajectory::compute_aabb(&e.trajectory, cfg.clearance.outer());
                retained += crate::collision::crop_cloud(&sc.cloud, &b, e.trajectory.duration())
                    .len() as f64
                    / sc.cloud.len().max(1) as f64;
                n_retained += 1;
            }
        }
    }
    let pick = |f: fn(&StageTimes) -> Duration| {
        Stats::from_durations(&stages.iter().map(f).collect::<Vec<_>>())
    };

    let mut crop_check = Duration::ZERO;
    let mut full_check = Duration::ZERO;
    let mut n = 0u32;
    for wp in &sc.pool {
        if let (Ok(a), Ok(b)) = (
            validate_candidate(&sc.start, wp, &sc.cloud, &with_crop),
            validate_candidate(&sc.start, wp, &sc.cloud, &no_crop),
        ) {
            crop_check += a.times.crop + a.times.collision;
            full_check += b.times.collision;
            n += 1;
        }
    }
    let n = n.max(1) as f64;

    BenchReport {
        cloud_size,
        candidates: sc.pool.len(),
        repetitions: repetitions.max(1),
        workers: rayon::current_num_threads(),
        generation: pick(|s| s.generation),
        aabb: pick(|s| s.aabb),
        crop: pick(|s| s.crop),
        rollout: pick(|s| s.rollout),
        collision: pick(|s| s.collision),
        coverage: pick(|s| s.coverage),
        total: Stats::from_durations(&totals),
        check_with_crop_us: crop_check.as_secs_f64() * 1e6 / n,
        check_without_crop_us: full_check.as_secs_f64() * 1e6 / n,
        mean_retained_fraction: retained / n_retained.max(1) as f64,
        candidates_per_budget: candidates_within_budget(&sc, &with_crop),
        budget_s: cfg.budget,
    }
}

/// Candidates validated before the budget's deadline, batching one
/// candidate per worker as the adaptive replanner does.
pub fn candidates_within_budget(sc: &Scene, cfg: &ReplanConfig) -> usize {
    let batch = rayon::current_num_threads().max(1);
    let deadline = Duration::from_secs_f64(cfg.budget);
    let clock = Instant::now();
    let mut done = 0usize;
    let mut i = 0usize;
    while clock.elapsed() < deadline {
        let chunk: Vec<_> = (0..batch)
            .map(|k| sc.pool[(i + k) % sc.pool.len()])
            .collect();
        i += batch;
        let finished: Vec<bool> = chunk
            .par_iter()
            .map(|wp| validate_candidate(&sc.start, wp, &sc.cloud, cfg).is_ok())
            .collect();
        if clock.elapsed() <= deadline {
            done += finished.len();
        }
    }
    done
}
