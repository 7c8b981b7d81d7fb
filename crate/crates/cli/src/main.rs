use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nalgebra::Vector3;

use trajguard::avoidance::{CandidateMode, ReplanConfig};
use trajguard::collision::{classify_samples, classify_trajectory, crop_cloud, Context};
use trajguard::io;
use trajguard::trajectory::{
    compute_aabb, plan_3d, sample_constant_distance, sample_constant_time, State3,
};

const EXIT_UNSAFE: u8 = 2;
const EXIT_ERROR: u8 = 1;

#[derive(Parser)]
#[command(
    name = "trajguard",
    version,
    about = "Jerk-limited trajectories with point-cloud obstacle avoidance"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args)]
struct Common {
    /// TOML replanning configuration (defaults for every other flag).
    #[arg(long, global = true, env = "TRAJGUARD_CONFIG")]
    config: Option<PathBuf>,
    /// Sampling distance per axis: one value or x,y,z (m).
    #[arg(long, global = true, value_parser = parse_vec_or_scalar, allow_hyphen_values = true)]
    dp: Option<Vector3<f64>>,
    /// Collision half-extent: one value or x,y,z (m).
    #[arg(long, global = true, value_parser = parse_vec_or_scalar)]
    lcoll: Option<Vector3<f64>>,
    /// Warning half-extent: one value or x,y,z (m).
    #[arg(long, global = true, value_parser = parse_vec_or_scalar)]
    lwarn: Option<Vector3<f64>>,
    /// Selection blend between goal distance and previous alternative.
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// Replanning budget (ms).
    #[arg(long = "budget-ms", global = true)]
    budget_ms: Option<f64>,
    /// Validate exactly this many candidates per replan instead of filling the budget.
    #[arg(long, global = true)]
    candidates: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for candidate validation (0 = all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(flatten)]
    limits: Limits,
}

/// Kinematic bounds; each takes one value or x,y,z.
#[derive(Args)]
struct Limits {
    #[arg(long, global = true, value_parser = parse_vec_or_scalar, allow_hyphen_values = true)]
    vmin: Option<Vector3<f64>>,
    #[arg(long, global = true, value_parser = parse_vec_or_scalar, allow_hyphen_values = true)]
    vmax: Option<Vector3<f64>>,
    #[arg(long, global = true, value_parser = parse_vec_or_scalar, allow_hyphen_values = true)]
    amin: Option<Vector3<f64>>,
    #[arg(long, global = true, value_parser = parse_vec_or_scalar, allow_hyphen_values = true)]
    amax: Option<Vector3<f64>>,
    #[arg(long, global = true, value_parser = parse_vec_or_scalar, allow_hyphen_values = true)]
    jmin: Option<Vector3<f64>>,
    #[arg(long, global = true, value_parser = parse_vec_or_scalar, allow_hyphen_values = true)]
    jmax: Option<Vector3<f64>>,
}

#[derive(Args)]
struct Endpoints {
    /// Start position x,y,z.
    #[arg(long, value_parser = parse_vec, allow_hyphen_values = true)]
    from: Vector3<f64>,
    #[arg(long = "from-vel", value_parser = parse_vec, allow_hyphen_values = true)]
    from_vel: Option<Vector3<f64>>,
    #[arg(long = "from-acc", value_parser = parse_vec, allow_hyphen_values = true)]
    from_acc: Option<Vector3<f64>>,
    /// Target position x,y,z.
    #[arg(long, value_parser = parse_vec, allow_hyphen_values = true)]
    to: Vector3<f64>,
    #[arg(long = "to-vel", value_parser = parse_vec, allow_hyphen_values = true)]
    to_vel: Option<Vector3<f64>>,
    #[arg(long = "to-acc", value_parser = parse_vec, allow_hyphen_values = true)]
    to_acc: Option<Vector3<f64>>,
}

impl Endpoints {
    fn states(&self) -> (State3, State3) {
        let z = Vector3::zeros();
        (
            State3::new(
                self.from,
                self.from_vel.unwrap_or(z),
                self.from_acc.unwrap_or(z),
            ),
            State3::new(self.to, self.to_vel.unwrap_or(z), self.to_acc.unwrap_or(z)),
        )
    }
}

#[derive(Subcommand)]
enum Command {
    /// Plan a trajectory and print its samples as CSV.
    Plan {
        #[command(flatten)]
        ends: Endpoints,
        /// Constant-time sampling step (s); without it, constant-distance sampling with --dp.
        #[arg(long)]
        dt: Option<f64>,
    },
    /// Check a planned trajectory against a point cloud file.
    Check {
        #[command(flatten)]
        ends: Endpoints,
        /// Cloud file: "x y z [vx vy vz]" per line.
        #[arg(long)]
        cloud: PathBuf,
        /// Write per-sample verdicts as CSV here.
        #[arg(long)]
        verdicts: Option<PathBuf>,
        /// Judge as the executing trajectory instead of a candidate.
        #[arg(long)]
        executing: bool,
    },
    /// Run a closed-loop scenario and write steps.csv and summary.txt.
    Sim {
        scenario: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Time the validation pipeline on a synthetic cloud.
    Bench {
        #[arg(long = "cloud-size", default_value_t = 65536)]
        cloud_size: usize,
        #[arg(long, default_value_t = 5)]
        repetitions: usize,
    },
}

fn parse_vec(s: &str) -> Result<Vector3<f64>, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("'{x}': {e}")))
        .collect::<Result<_, _>>()?;
    match v[..] {
        [x, y, z] if v.iter().all(|c| c.is_finite()) => Ok(Vector3::new(x, y, z)),
        _ => Err("expected three finite comma-separated numbers".into()),
    }
}

fn parse_vec_or_scalar(s: &str) -> Result<Vector3<f64>, String> {
    if s.contains(',') {
        return parse_vec(s);
    }
    match s.trim().parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(Vector3::repeat(x)),
        _ => Err(format!("'{s}' is not a finite number")),
    }
}

fn apply_overrides(mut cfg: ReplanConfig, c: &Common) -> Result<ReplanConfig, String> {
    if let Some(dp) = c.dp {
        cfg.dp = dp;
    }
    if let Some(l) = c.lcoll {
        cfg.clearance.l_coll = l;
    }
    if let Some(l) = c.lwarn {
        cfg.clearance.l_warn = l;
    }
    if let Some(a) = c.alpha {
        cfg.alpha = a;
    }
    if let Some(ms) = c.budget_ms {
        cfg.budget = ms / 1000.0;
    }
    if let Some(n) = c.candidates {
        cfg.mode = CandidateMode::FixedCount(n);
    }
    let l = &c.limits;
    for i in 0..3 {
        let ax = &mut cfg.constraints[i];
        let set = |dst: &mut f64, src: Option<Vector3<f64>>| {
            if let Some(v) = src {
                *dst = v[i];
            }
        };
        set(&mut ax.v_min, l.vmin);
        set(&mut ax.v_max, l.vmax);
        set(&mut ax.a_min, l.amin);
        set(&mut ax.a_max, l.amax);
        set(&mut ax.j_min, l.jmin);
        set(&mut ax.j_max, l.jmax);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn base_config(c: &Common) -> Result<ReplanConfig, String> {
    match &c.config {
        Some(path) => {
            let text =
                std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            io::parse_config(&text).map_err(|e| format!("{}: {e}", path.display()))
        }
        None => Ok(ReplanConfig::default()),
    }
}

fn write_file(path: &std::path::Path, text: &str) -> Result<(), String> {
    std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}

fn run(cli: Cli) -> Result<u8, String> {
    if let Some(n) = cli.common.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| e.to_string())?;
    }
    match cli.cmd {
        Command::Plan { ends, dt } => {
            let cfg = apply_overrides(base_config(&cli.common)?, &cli.common)?;
            let (start, target) = ends.states();
            let traj = plan_3d(&start, &target, &cfg.constraints).map_err(|e| e.to_string())?;
            let samples = match dt {
                Some(dt) if dt > 0.0 && dt.is_finite() => sample_constant_time(&traj, dt),
                Some(dt) => return Err(format!("--dt {dt} must be positive")),
                None => sample_constant_distance(&traj, cfg.dp),
            };
            print!("{}", io::samples_csv(&samples));
            Ok(0)
        }
        Command::Check {
            ends,
            cloud,
            verdicts,
            executing,
        } => {
            let cfg = apply_overrides(base_config(&cli.common)?, &cli.common)?;
            let text =
                std::fs::read_to_string(&cloud).map_err(|e| format!("{}: {e}", cloud.display()))?;
            let pc = io::parse_cloud(&text).map_err(|e| format!("{}: {e}", cloud.display()))?;
            let (start, target) = ends.states();
            let traj = plan_3d(&start, &target, &cfg.constraints).map_err(|e| e.to_string())?;
            let b = compute_aabb(&traj, cfg.clearance.outer().add_scalar(1e-9));
            let subset = crop_cloud(&pc, &b, traj.duration());
            let samples = sample_constant_distance(&traj, cfg.dp);
            let v = classify_samples(
                &samples,
                &pc,
                Some(&subset),
                &cfg.clearance,
                &cfg.sensor,
                traj.duration(),
            );
            let ctx = if executing {
                Context::Executing
            } else {
                Context::Candidate
            };
            let report = classify_trajectory(v, ctx);
            print!(
                "{}",
                io::report_kv(&report, pc.len(), subset.len()).render()
            );
            if let Some(path) = verdicts {
                write_file(&path, &io::verdicts_csv(&report, &samples))?;
            }
            Ok(if report.is_safe() { 0 } else { EXIT_UNSAFE })
        }
        Command::Sim { scenario, out } => {
            let text = std::fs::read_to_string(&scenario)
                .map_err(|e| format!("{}: {e}", scenario.display()))?;
            let mut sc =
                io::parse_scenario(&text).map_err(|e| format!("{}: {e}", scenario.display()))?;
            if cli.common.config.is_some() {
                sc.replan = base_config(&cli.common)?;
            }
            sc.replan = apply_overrides(sc.replan, &cli.common)?;
            if let Some(seed) = cli.common.seed {
                sc.seed = seed;
            }
            let log = trajguard::sim::run(&sc)?;
            std::fs::create_dir_all(&out).map_err(|e| format!("{}: {e}", out.display()))?;
            let summary = io::summary_kv(&log).render();
            write_file(&out.join("steps.csv"), &io::steps_csv(&log))?;
            write_file(&out.join("summary.txt"), &summary)?;
            print!("{summary}");
            Ok(if log.collision { EXIT_UNSAFE } else { 0 })
        }
        Command::Bench {
            cloud_size,
            repetitions,
        } => {
            if cloud_size == 0 || repetitions == 0 {
                return Err("cloud size and repetitions must be positive".into());
            }
            let cfg = apply_overrides(base_config(&cli.common)?, &cli.common)?;
            let candidates = match cfg.mode {
                CandidateMode::FixedCount(n) if n > 0 => n,
                _ => 100,
            };
            let seed = cli.common.seed.unwrap_or(1);
            let report =
                trajguard::bench::run_bench(cloud_size, candidates, repetitions, &cfg, seed);
            print!("{}", report.to_kv().render());
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_ERROR)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
