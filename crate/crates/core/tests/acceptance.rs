//! Acceptance suite. Every criterion prints one PASS/FAIL line; the test
//! fails if any criterion fails. Criteria run sequentially in one test so
//! the timing criteria are not disturbed by concurrent tests.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::time::Instant;

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use trajguard::avoidance::{
    check_trajectory, select_best, CandidateSource, ReplanConfig, SelectionState, WaypointCandidate,
};
use trajguard::bench;
use trajguard::collision::{
    check_moving, coverage_class, crop_cloud, CloudPoint, Context, CoverageClass, PointCloud,
    SensorModel,
};
use trajguard::trajectory::{
    compute_aabb, plan_3d, plan_axis, sample_constant_distance, AxisConstraints, AxisState, State3,
    Trajectory,
};

type Outcome = Result<String, String>;

fn random_constraints(rng: &mut ChaCha8Rng) -> AxisConstraints {
    AxisConstraints {
        v_min: -rng.gen_range(0.5..4.0),
        v_max: rng.gen_range(0.5..4.0),
        a_min: -rng.gen_range(0.5..4.0),
        a_max: rng.gen_range(0.5..4.0),
        j_min: -rng.gen_range(0.5..8.0),
        j_max: rng.gen_range(0.5..8.0),
    }
}

/// A state from which the acceleration can be removed without leaving the
/// velocity bounds (and, mirrored, one that can be reached that way).
fn random_state(rng: &mut ChaCha8Rng, c: &AxisConstraints, arriving: bool) -> AxisState {
    let a = rng.gen_range(c.a_min..=c.a_max) * 0.9;
    let (up, down) = if arriving {
        (a < 0.0, a > 0.0)
    } else {
        (a > 0.0, a < 0.0)
    };
    let lo = c.v_min
        + if down {
            0.5 * a * a / c.j_max.min(-c.j_min)
        } else {
            0.0
        };
    let hi = c.v_max
        - if up {
            0.5 * a * a / c.j_max.min(-c.j_min)
        } else {
            0.0
        };
    let v = if lo < hi { rng.gen_range(lo..hi) } else { 0.0 };
    AxisState::new(rng.gen_range(-6.0..6.0), v, if lo < hi { a } else { 0.0 })
}

fn random_trajectory(rng: &mut ChaCha8Rng) -> Trajectory {
    loop {
        let c: [AxisConstraints; 3] = std::array::from_fn(|_| random_constraints(rng));
        let start = State3 {
            axes: std::array::from_fn(|i| random_state(rng, &c[i], false)),
            timestamp: 0.0,
        };
        let target = State3 {
            axes: std::array::from_fn(|i| random_state(rng, &c[i], true)),
            timestamp: 0.0,
        };
        if let Ok(t) = plan_3d(&start, &target, &c) {
            return t;
        }
    }
}

fn dense_times(duration: f64, dt: f64) -> impl Iterator<Item = f64> {
    let n = (duration / dt).ceil() as usize;
    (0..=n).map(move |k| (k as f64 * dt).min(duration))
}

fn c1_aabb() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let clock = Instant::now();
    let mut worst_escape = 0.0f64;
    let mut worst_gap = 0.0f64;
    for _ in 0..1000 {
        let traj = random_trajectory(&mut rng);
        let b = compute_aabb(&traj, Vector3::zeros());
        let mut lo = Vector3::repeat(f64::INFINITY);
        let mut hi = Vector3::repeat(f64::NEG_INFINITY);
        for t in dense_times(traj.duration(), 1e-3) {
            let p = traj.position(t);
            lo = lo.inf(&p);
            hi = hi.sup(&p);
        }
        for i in 0..3 {
            worst_escape = worst_escape.max(b.min[i] - lo[i]).max(hi[i] - b.max[i]);
            worst_gap = worst_gap.max(lo[i] - b.min[i]).max(b.max[i] - hi[i]);
        }
    }
    let secs = clock.elapsed().as_secs_f64();
    let msg =
        format!("max escape {worst_escape:.2e} m, max face gap {worst_gap:.2e} m, {secs:.1} s");
    if worst_escape <= 1e-12 && worst_gap <= 1e-5 && secs < 30.0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn c2_sampling() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let dp = Vector3::repeat(0.1);
    let mut worst = 0.0f64;
    let mut samples_total = 0usize;
    for _ in 0..500 {
        let traj = random_trajectory(&mut rng);
        let s = sample_constant_distance(&traj, dp);
        samples_total += s.len();
        if s.first().map(|x| x.t) != Some(0.0) || s.last().map(|x| x.t) != Some(traj.duration()) {
            return Err("samples do not span the trajectory".into());
        }
        for w in s.windows(2) {
            let (p0, t0, t1) = (w[0].position(), w[0].t, w[1].t);
            // Every intermediate position stays within dp of the previous sample.
            let n = ((t1 - t0) / 1e-3).ceil().max(1.0) as usize;
            for k in 1..=n {
                let t = t0 + (t1 - t0) * k as f64 / n as f64;
                let d = traj.position(t) - p0;
                worst = worst.max(d.abs().max());
            }
        }
    }
    let msg = format!("max per-axis displacement {worst:.12} m over {samples_total} samples");
    if worst <= 0.1 + 1e-9 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn c3_slab() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let dt = 1e-3;
    let (mut agree, mut conservative) = (0usize, 0usize);
    for _ in 0..10_000 {
        let center = Vector3::from_fn(|_, _| rng.gen_range(-2.0..2.0));
        let l = Vector3::from_fn(|_, _| rng.gen_range(0.1..1.5));
        let p = Vector3::from_fn(|_, _| rng.gen_range(-6.0..6.0));
        let v = Vector3::from_fn(|_, _| {
            if rng.gen_bool(0.15) {
                0.0
            } else {
                rng.gen_range(-8.0..8.0)
            }
        });
        let t_lo = rng.gen_range(0.0..1.0);
        let t_hi = t_lo + rng.gen_range(0.0..2.0);
        let point = CloudPoint::moving(p, v);
        let slab = check_moving(&center, &point, &l, (t_lo, t_hi));
        let n = ((t_hi - t_lo) / dt).ceil() as usize;
        let stepped = (0..=n).any(|k| {
            let t = (t_lo + k as f64 * dt).min(t_hi);
            let q = p + v * t;
            (0..3).all(|i| q[i] > center[i] - l[i] && q[i] < center[i] + l[i])
        });
        match (slab, stepped) {
            (a, b) if a == b => agree += 1,
            (true, false) => {
                // Must be a crossing shorter than one step.
                let (mut enter, mut exit) = (t_lo, t_hi);
                for i in 0..3 {
                    if v[i] != 0.0 {
                        let (a, b) = (
                            (center[i] - l[i] - p[i]) / v[i],
                            (center[i] + l[i] - p[i]) / v[i],
                        );
                        enter = enter.max(a.min(b));
                        exit = exit.min(a.max(b));
                    }
                }
                if exit - enter > dt + 1e-12 {
                    return Err(format!(
                        "slab hit of {:.2e} s missed by stepping",
                        exit - enter
                    ));
                }
                conservative += 1;
            }
            (false, true) => return Err(format!("slab test missed a hit: p={p:?} v={v:?}")),
            _ => unreachable!(),
        }
    }
    Ok(format!(
        "{agree} agree, {conservative} conservative sub-step crossings"
    ))
}

fn c4_cone() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let theta = 33.2f64.to_radians();
    let (mut checked, mut boundary) = (0usize, 0usize);
    for k in 0..100_000 {
        let normal = if k % 2 == 0 {
            Vector3::z()
        } else {
            Vector3::from_fn(|_, _| rng.gen_range(-1.0..1.0)).normalize()
        };
        let sensor = SensorModel {
            theta,
            range: 120.0,
            normal,
            body_radius: 0.5,
        };
        let origin = Vector3::from_fn(|_, _| rng.gen_range(-10.0..10.0));
        let dir = Vector3::from_fn(|_, _| rng.gen_range(-1.0..1.0f64));
        if dir.norm() < 1e-6 {
            continue;
        }
        let r = 10f64.powf(rng.gen_range(-1.0..2.3));
        let q = dir.normalize() * r;
        let p = origin + q;
        let dist = (p - origin).norm();
        let elevation = (normal.dot(&(p - origin)) / dist).clamp(-1.0, 1.0).asin();
        let near = (elevation.abs() - theta / 2.0).abs() < 1e-9
            || (dist - 120.0).abs() < 1e-9
            || (dist - 0.5).abs() < 1e-9;
        if near {
            boundary += 1;
            continue;
        }
        let expected = if dist <= 0.5 {
            CoverageClass::InsideBody
        } else if elevation > theta / 2.0 {
            CoverageClass::UpperCone
        } else if elevation < -theta / 2.0 {
            CoverageClass::LowerCone
        } else if dist > 120.0 {
            CoverageClass::OutOfRange
        } else {
            CoverageClass::Observable
        };
        let got = coverage_class(&p, &sensor, &origin);
        if got != expected {
            return Err(format!(
                "point at elevation {:.4} deg, range {dist:.3}: expected {expected:?}, got {got:?}",
                elevation * 180.0 / PI
            ));
        }
        checked += 1;
    }
    Ok(format!(
        "{checked} points agree, {boundary} skipped at the boundary"
    ))
}

fn c5_crop() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let with_crop = ReplanConfig::default();
    let no_crop = ReplanConfig {
        crop: false,
        ..ReplanConfig::default()
    };
    let mut unsafe_scenes = 0;
    for scene in 0..200 {
        let start = State3::new(
            Vector3::zeros(),
            Vector3::from_fn(|_, _| rng.gen_range(-1.0..1.0)),
            Vector3::zeros(),
        );
        let goal = Vector3::new(
            rng.gen_range(-6.0..6.0),
            rng.gen_range(-6.0..6.0),
            rng.gen_range(-1.0..1.0),
        );
        let traj = plan_3d(&start, &State3::at_rest(goal), &with_crop.constraints)
            .map_err(|e| e.to_string())?;
        let n = rng.gen_range(0..60);
        let points = (0..n)
            .map(|_| {
                let t = rng.gen_range(0.0..=traj.duration());
                let p = traj.position(t) + Vector3::from_fn(|_, _| rng.gen_range(-4.0..4.0));
                if rng.gen_bool(0.3) {
                    CloudPoint::moving(p, Vector3::from_fn(|_, _| rng.gen_range(-2.0..2.0)))
                } else {
                    CloudPoint::fixed(p)
                }
            })
            .collect();
        let cloud = PointCloud::new(points, Vector3::zeros());
        for ctx in [Context::Candidate, Context::Executing] {
            let (a, _) = check_trajectory(&traj, &cloud, &with_crop, ctx);
            let (b, _) = check_trajectory(&traj, &cloud, &no_crop, ctx);
            if a != b {
                return Err(format!(
                    "scene {scene}: reports differ with and without crop"
                ));
            }
            if !a.is_safe() {
                unsafe_scenes += 1;
            }
        }
    }
    let sc = bench::scene(65_536, 1, &with_crop, 7);
    let traj = plan_3d(
        &sc.start,
        &State3::at_rest(sc.commanded),
        &with_crop.constraints,
    )
    .map_err(|e| e.to_string())?;
    let length = (sc.commanded - sc.start.position()).norm();
    let b = compute_aabb(&traj, with_crop.clearance.outer().add_scalar(1e-9));
    let kept = crop_cloud(&sc.cloud, &b, traj.duration()).len() as f64 / sc.cloud.len() as f64;
    let msg = format!(
        "200 scenes identical ({unsafe_scenes}/400 reports unsafe); {length:.1} m trajectory keeps {:.3}% of 65536 points",
        kept * 100.0
    );
    if kept < 0.10 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn c6_speedup(report: &bench::BenchReport) -> Outcome {
    let s = report.crop_speedup();
    let msg = format!(
        "collision check {:.1} us with crop vs {:.1} us without: {s:.1}x",
        report.check_with_crop_us, report.check_without_crop_us
    );
    if s >= 3.0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn c7_throughput(report: &bench::BenchReport) -> Outcome {
    let msg = format!(
        "mean {:.1} us per candidate, {} candidates in {:.0} ms on {} worker(s)",
        report.total.mean_us,
        report.candidates_per_budget,
        report.budget_s * 1e3,
        report.workers
    );
    if report.total.mean_us < 1000.0 && report.candidates_per_budget >= 50 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// Shortest rest-to-rest 7-phase profile found by a discretized search.
///
/// For a positive distance `d` the profile ramps acceleration up to `a1`
/// with `j_max`, holds, ramps down with `j_min` to the peak velocity `vp`,
/// cruises, then mirrors this with `a2 < 0`. For fixed `vp` the two halves
/// separate, so each acceleration is searched on its own grid, and the best
/// grid point is refined by coordinate descent. Every evaluated point is a
/// feasible profile, so the result bounds the true optimum from above.
fn brute_force_duration(d: f64, c: &AxisConstraints) -> f64 {
    let c = if d < 0.0 { c.mirrored() } else { *c };
    let d = d.abs();
    let (jp, jn) = (c.j_max, -c.j_min);
    // Time and distance of one half reaching `vp` with peak acceleration `a`.
    let half = |a: f64, vp: f64, j_in: f64, j_out: f64| -> Option<(f64, f64)> {
        let (t1, t3) = (a / j_in, a / j_out);
        let dv_ramps = 0.5 * a * t1 + 0.5 * a * t3;
        if dv_ramps > vp * (1.0 + 1e-12) {
            return None;
        }
        let t2 = ((vp - dv_ramps) / a).max(0.0);
        let mut x = 0.0;
        let mut s = AxisState::at_rest(0.0);
        for (j, t) in [(j_in, t1), (0.0, t2), (-j_out, t3)] {
            let next = s.advance(j, t);
            x = next.p;
            s = next;
        }
        Some((t1 + t2 + t3, x))
    };
    let total = |vp: f64, a1: f64, a2: f64| -> Option<f64> {
        let (ta, xa) = half(a1, vp, jp, jn)?;
        // Deceleration run backwards in time accelerates from rest with the
        // same jerk order.
        let (td, xd) = half(a2, vp, jp, jn)?;
        let cruise = (d - xa - xd) / vp;
        (cruise >= 0.0).then_some(ta + td + cruise)
    };
    let vmax = c.v_max;
    let (amax, amin) = (c.a_max, -c.a_min);
    let n = 300;
    let mut best = (f64::INFINITY, 0.0, 0.0, 0.0);
    for iv in 1..=n {
        let vp = vmax * iv as f64 / n as f64;
        let pick = |amax: f64, j_in: f64, j_out: f64| {
            let mut b = (f64::INFINITY, 0.0);
            for ia in 1..=n {
                let a = amax * ia as f64 / n as f64;
                if let Some((t, x)) = half(a, vp, j_in, j_out) {
                    let score = t - x / vp;
                    if score < b.0 {
                        b = (score, a);
                    }
                }
            }
            b.1
        };
        let a1 = pick(amax, jp, jn);
        let a2 = pick(amin, jp, jn);
        if a1 > 0.0 && a2 > 0.0 {
            if let Some(t) = total(vp, a1, a2) {
                if t < best.0 {
                    best = (t, vp, a1, a2);
                }
            }
        }
    }
    let (mut t_best, mut x) = (best.0, [best.1, best.2, best.3]);
    let limits = [vmax, amax, amin];
    let mut step = [vmax / n as f64, amax / n as f64, amin / n as f64];
    for _ in 0..200 {
        let mut improved = false;
        for k in 0..3 {
            for sign in [1.0, -1.0] {
                let mut y = x;
                y[k] = (y[k] + sign * step[k]).clamp(1e-12, limits[k]);
                if let Some(t) = total(y[0], y[1], y[2]) {
                    if t < t_best {
                        t_best = t;
                        x = y;
                        improved = true;
                    }
                }
            }
        }
        if !improved {
            step.iter_mut().for_each(|s| *s *= 0.5);
        }
    }
    t_best
}

fn c8_optimality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut worst_excess, mut worst_boundary, mut worst_violation) =
        (f64::NEG_INFINITY, 0.0f64, 0.0f64);
    for _ in 0..100 {
        let c = random_constraints(&mut rng);
        let d = rng.gen_range(0.05..10.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let start = AxisState::at_rest(rng.gen_range(-5.0..5.0));
        let target = AxisState::at_rest(start.p + d);
        let profile = plan_axis(start, target, &c).map_err(|e| e.to_string())?;
        let oracle = brute_force_duration(d, &c);
        worst_excess = worst_excess.max(profile.duration - oracle);
        worst_boundary = worst_boundary.max(profile.eval(profile.duration).max_abs_diff(&target));
        for t in dense_times(profile.duration, profile.duration / 5000.0) {
            let s = profile.eval(t);
            worst_violation = worst_violation
                .max(s.v - c.v_max)
                .max(c.v_min - s.v)
                .max(s.a - c.a_max)
                .max(c.a_min - s.a);
        }
        for seg in &profile.segments {
            worst_violation = worst_violation.max(seg.j - c.j_max).max(c.j_min - seg.j);
        }
    }
    let msg = format!(
        "planned - search <= {worst_excess:.2e} s, boundary error {worst_boundary:.2e}, bound violation {worst_violation:.2e}"
    );
    if worst_excess <= 1e-4 && worst_boundary <= 1e-6 && worst_violation <= 1e-9 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn c9_scenarios() -> Outcome {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let mut parts = Vec::new();
    for name in ["ball", "wall", "empty"] {
        let path = dir.join(format!("{name}.scn"));
        let text =
            std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
        let sc = trajguard::io::parse_scenario(&text).map_err(|e| e.to_string())?;
        let a = trajguard::sim::run(&sc)?;
        let b = trajguard::sim::run(&sc)?;
        if !a.same_outcome(&b) {
            return Err(format!("{name}: reruns differ"));
        }
        if a.collision || a.min_clearance_ratio < 1.0 {
            return Err(format!(
                "{name}: collision, clearance ratio {:.3}",
                a.min_clearance_ratio
            ));
        }
        if name == "empty" && !(a.goal_reached && a.replans == 0) {
            return Err(format!(
                "empty: goal_reached={} replans={}",
                a.goal_reached, a.replans
            ));
        }
        parts.push(format!(
            "{name}: {:?} after {:.2} s, {} replans, clearance ratio {:.2}",
            a.termination, a.total_time, a.replans, a.min_clearance_ratio
        ));
    }
    Ok(parts.join("; "))
}

fn c10_selection() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let point = |rng: &mut ChaCha8Rng| Vector3::from_fn(|_, _| rng.gen_range(-10.0..10.0));
    let cand = |p| WaypointCandidate {
        position: p,
        source: CandidateSource::Spheroid { shell: 0 },
    };
    for case in 0..2000 {
        let n = rng.gen_range(1..30);
        let cands: Vec<_> = (0..n).map(|_| cand(point(&mut rng))).collect();
        let commanded = point(&mut rng);
        let previous = point(&mut rng);

        let sel = SelectionState {
            previous: Some(previous),
            alpha: 1.0,
        };
        let nearest = (0..n)
            .min_by(|&a, &b| {
                let da = (cands[a].position - commanded).norm();
                let db = (cands[b].position - commanded).norm();
                da.total_cmp(&db)
            })
            .unwrap();
        if select_best(&cands, &commanded, &sel) != Some(nearest) {
            return Err(format!(
                "case {case}: alpha=1 did not pick the candidate nearest the goal"
            ));
        }

        let sel = SelectionState {
            previous: Some(previous),
            alpha: rng.gen_range(0.0..=1.0),
        };
        let k = rng.gen_range(0.1..10.0);
        let scaled: Vec<_> = cands.iter().map(|c| cand(c.position * k)).collect();
        let sel_scaled = SelectionState {
            previous: Some(previous * k),
            alpha: sel.alpha,
        };
        let a = select_best(&cands, &commanded, &sel).unwrap();
        let b = select_best(&scaled, &(commanded * k), &sel_scaled).unwrap();
        let costs = |i: usize| {
            (
                sel.cost(&cands[i].position, &commanded),
                sel.cost(&cands[a].position, &commanded),
            )
        };
        if a != b && (costs(b).0 - costs(b).1).abs() > 1e-9 * costs(b).1.max(1.0) {
            return Err(format!("case {case}: argmin changed under scaling by {k}"));
        }

        let keep = rng.gen_range(0..n);
        let sticky = SelectionState {
            previous: Some(cands[keep].position),
            alpha: 0.0,
        };
        let got = select_best(&cands, &commanded, &sticky).unwrap();
        if cands[got].position != cands[keep].position {
            return Err(format!("case {case}: alpha=0 left the previous waypoint"));
        }
    }
    Ok("2000 random candidate sets: nearest at alpha=1, scale invariant, sticky at alpha=0".into())
}

#[test]
fn acceptance() {
    let cfg = ReplanConfig::default();
    let started = Instant::now();
    let report = bench::run_bench(65_536, 100, 5, &cfg, 7);
    let results: Vec<(&str, Outcome)> = vec![
        ("1 aabb soundness and tightness", c1_aabb()),
        ("2 constant-distance sampling", c2_sampling()),
        ("3 slab test vs time stepping", c3_slab()),
        ("4 cone classification", c4_cone()),
        ("5 crop invariance and reduction", c5_crop()),
        ("6 crop speedup", c6_speedup(&report)),
        ("7 throughput", c7_throughput(&report)),
        ("8 time optimality", c8_optimality()),
        ("9 closed-loop scenarios", c9_scenarios()),
        ("10 selection metric", c10_selection()),
    ];
    let mut failed = 0;
    for (name, r) in &results {
        match r {
            Ok(msg) => println!("PASS  criterion {name}: {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL  criterion {name}: {msg}");
            }
        }
    }
    println!(
        "{} of {} criteria passed in {:.1} s",
        results.len() - failed,
        results.len(),
        started.elapsed().as_secs_f64()
    );
    assert_eq!(failed, 0, "{failed} acceptance criteria failed");
}
