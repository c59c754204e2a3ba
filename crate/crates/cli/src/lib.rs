//! The `monocis` command line: `verify`, `synth`, `simulate` and `validate`.
//!
//! Every command prints a JSON [`RunReport`] on stdout and, with `--out`,
//! writes the same report plus CSV exports into a directory. Exit codes:
//! 0 success, 1 property failure, 2 usage or input error, 3 sound result
//! with stalled boxes.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use monocis_core::io::{antichain_to_csv, points_from_csv, points_to_csv};
use monocis_core::{
    extract_controller, parse_config, synthesize, validate_monotonicity, verify_invariant, verify_invariant_par,
    AxisBox, LowerSet, MonotoneSystem, Outcome, Point, Problem, SearchOptions, SynthOptions, VerifyReport,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

/// Version of the JSON report layout; bumped on incompatible changes.
pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PROPERTY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_STALLED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "monocis", version, about = "Controlled invariant sets for monotone systems")]
pub struct Cli {
    /// Worker threads for the parallel verification and simulation modes.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,

    /// Directory for the report and CSV exports.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check that an antichain describes a controlled invariant.
    Verify(VerifyArgs),
    /// Compute an epsilon-approximation of the maximal controlled invariant.
    Synth(SynthArgs),
    /// Run the invariance controller against random disturbances.
    Simulate(SimulateArgs),
    /// Sample the declared monotonicity class for counterexamples.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub config: PathBuf,
    /// CSV with header `x1,...,xn`, one maximal point per row.
    pub invariant: PathBuf,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    pub config: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub nmax: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    pub config: PathBuf,
    pub invariant: PathBuf,
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
    #[arg(long, default_value_t = 100)]
    pub runs: usize,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    pub config: PathBuf,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Input {
        path: PathBuf,
        source: monocis_core::Error,
    },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] monocis_core::Error),
    #[error("writing {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub command: String,
    /// SHA-256 of the config file text, hex encoded.
    pub config_digest: String,
    pub tool_version: String,
    pub seed: u64,
    pub exit_code: i32,
    pub wall_time_s: f64,
    pub results: Value,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// A finished command: the report plus files to place under `--out`.
pub struct Execution {
    pub report: RunReport,
    pub files: Vec<(String, String)>,
}

struct Loaded {
    problem: Problem,
    digest: String,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_owned(),
        source,
    })
}

fn load_config(path: &Path) -> Result<Loaded, CliError> {
    let text = read(path)?;
    let problem = parse_config(&text).map_err(|source| CliError::Input {
        path: path.to_owned(),
        source,
    })?;
    Ok(Loaded {
        problem,
        digest: hex::encode(Sha256::digest(text.as_bytes())),
    })
}

fn load_invariant(path: &Path, sys: &MonotoneSystem) -> Result<LowerSet, CliError> {
    let text = read(path)?;
    let input = |source| CliError::Input {
        path: path.to_owned(),
        source,
    };
    let points = points_from_csv(&text, Some(sys.dim())).map_err(input)?;
    LowerSet::from_points(sys.space().clone(), points).map_err(input)
}

fn verify(sys: &MonotoneSystem, x: &LowerSet, k: &LowerSet, jobs: usize) -> monocis_core::Result<VerifyReport> {
    if jobs > 1 {
        verify_invariant_par(sys, x, k)
    } else {
        verify_invariant(sys, x, k)
    }
}

/// Staircase through the maximal points of a planar lower set, clipped to
/// the working box; other dimensions fall back to the bare antichain.
pub fn boundary_polyline(k: &LowerSet, work: &AxisBox) -> Vec<Point> {
    let s = k.space().signs().to_vec();
    let pts = k.boundary().elements();
    if s.len() != 2 || pts.is_empty() {
        return pts.to_vec();
    }
    let signed = |p: &[f64]| [f64::from(s[0]) * p[0], f64::from(s[1]) * p[1]];
    let unsign = |q: [f64; 2]| Point::new(vec![f64::from(s[0]) * q[0], f64::from(s[1]) * q[1]]);
    let mut sorted: Vec<[f64; 2]> = pts.iter().map(|p| signed(p)).collect();
    sorted.sort_by(|a, b| a[0].total_cmp(&b[0]));
    let bottom = signed(&work.bottom(&s));
    let mut line = vec![unsign([bottom[0], sorted[0][1]])];
    for (i, p) in sorted.iter().enumerate() {
        if i > 0 {
            line.push(unsign([sorted[i - 1][0], p[1]]));
        }
        line.push(unsign(*p));
    }
    line.push(unsign([sorted[sorted.len() - 1][0], bottom[1]]));
    line
}

fn cmd_verify(cli: &Cli, a: &VerifyArgs) -> Result<Execution, CliError> {
    let cfg = load_config(&a.config)?;
    let sys = &cfg.problem.system;
    let x = &cfg.problem.constraint;
    let k = load_invariant(&a.invariant, sys)?;
    let report = verify(sys, x, &k, cli.jobs)?;
    let code = if report.is_invariant { EXIT_OK } else { EXIT_PROPERTY };
    let results = json!({
        "is_invariant": report.is_invariant,
        "states_checked": report.states_checked,
        "successor_evaluations": report.successor_evaluations,
        "witness": report.failure(),
        "per_state": report.per_state,
    });
    Ok(Execution {
        report: new_report("verify", &cfg, cfg.problem.settings.seed, code, results),
        files: vec![("k.csv".into(), antichain_to_csv(k.boundary()))],
    })
}

fn cmd_synth(cli: &Cli, a: &SynthArgs) -> Result<Execution, CliError> {
    let cfg = load_config(&a.config)?;
    let settings = &cfg.problem.settings;
    let epsilon = a.epsilon.unwrap_or(settings.epsilon);
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(CliError::Usage(format!("--epsilon must be positive, got {epsilon}")));
    }
    let nmax = a.nmax.unwrap_or(settings.nmax);
    if nmax == 0 {
        return Err(CliError::Usage("--nmax must be at least 1".into()));
    }
    let seed = a.seed.unwrap_or(settings.seed);
    let sys = &cfg.problem.system;
    let x = &cfg.problem.constraint;
    let opts = SynthOptions {
        epsilon,
        search: SearchOptions {
            n_max: nmax,
            node_budget: usize::try_from(settings.budget).unwrap_or(usize::MAX),
            restrict_to_u_min: settings.u_min_only,
        },
        seeds: settings.seeds.iter().map(|s| Point::new(s.clone())).collect(),
    };
    let r = synthesize(sys, x, &opts)?;
    let check = verify(sys, x, &r.k, cli.jobs)?;
    let stalled = r.stalled_boxes();
    let code = if !check.is_invariant {
        EXIT_PROPERTY
    } else if stalled > 0 {
        EXIT_STALLED
    } else {
        EXIT_OK
    };
    let results = json!({
        "outcome": r.outcome,
        "epsilon_optimal": matches!(r.outcome, Outcome::EpsilonOptimal | Outcome::AllFeasible | Outcome::NoneFeasible),
        "epsilon": epsilon,
        "nmax": nmax,
        "gap_final": r.gap_final,
        "iterations": r.gap_trace.len() - 1,
        "verified": check.is_invariant,
        "stalled_boxes": stalled,
        "undecided_boxes": r.undecided.len(),
        "counters": r.counters,
        "k": r.k.boundary().sorted(),
        "f1_size": r.f1.boundary().len(),
        "f2_size": r.f2.boundary().len(),
    });
    let certificates = serde_json::to_string_pretty(&r.certificates).map_err(monocis_core::Error::from)?;
    let files = vec![
        ("k.csv".into(), antichain_to_csv(r.k.boundary())),
        ("f1.csv".into(), antichain_to_csv(r.f1.boundary())),
        ("f2.csv".into(), antichain_to_csv(r.f2.boundary())),
        ("boundary.csv".into(), points_to_csv(sys.dim(), &boundary_polyline(&r.k, sys.work_box()))),
        ("certificates.json".into(), certificates),
    ];
    Ok(Execution {
        report: new_report("synth", &cfg, seed, code, results),
        files,
    })
}

/// Uniform disturbance in the declared box, or a uniformly chosen maximal
/// disturbance when no box is declared.
fn sample_disturbance(sys: &MonotoneSystem, rng: &mut ChaCha8Rng) -> Point {
    match sys.dist_box() {
        Some(b) => uniform(rng, b),
        None => {
            let d = sys.disturbances();
            d[rng.gen_range(0..d.len())].clone()
        }
    }
}

fn uniform(rng: &mut ChaCha8Rng, b: &AxisBox) -> Point {
    Point::new(
        b.lo()
            .iter()
            .zip(b.hi())
            .map(|(l, h)| if l == h { *l } else { rng.gen_range(*l..=*h) })
            .collect(),
    )
}

/// Uniform in the working box restricted to `k`; falls back to a maximal
/// point of `k` when rejection sampling keeps missing.
fn sample_start(k: &LowerSet, work: &AxisBox, rng: &mut ChaCha8Rng) -> Point {
    for _ in 0..10_000 {
        let p = uniform(rng, work);
        if k.contains(&p) {
            return p;
        }
    }
    let b = k.boundary().elements();
    b[rng.gen_range(0..b.len())].clone()
}

struct Run {
    trajectory: Vec<Point>,
    escaped: bool,
}

fn cmd_simulate(cli: &Cli, a: &SimulateArgs) -> Result<Execution, CliError> {
    let cfg = load_config(&a.config)?;
    let sys = &cfg.problem.system;
    let k = load_invariant(&a.invariant, sys)?;
    if k.is_empty() {
        return Err(CliError::Usage("the invariant is empty".into()));
    }
    let seed = a.seed.unwrap_or(cfg.problem.settings.seed);
    let check = verify(sys, &cfg.problem.constraint, &k, cli.jobs)?;
    if let Some(fail) = check.failure() {
        return Err(CliError::Usage(format!(
            "the invariant fails verification at {:?}; refusing to simulate",
            fail.state
        )));
    }
    let controller = extract_controller(sys, &k)?;
    let work = sys.work_box().clone();

    // Each run owns a generator seeded from (seed, run index), so results
    // do not depend on the number of worker threads.
    let one = |run: usize| -> Result<Run, monocis_core::Error> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(run as u64);
        let mut ctrl = controller.clone();
        let mut x = sample_start(&k, &work, &mut rng);
        let mut trajectory = vec![x.clone()];
        for _ in 0..a.steps {
            let u = ctrl.query(&x)?;
            let d = sample_disturbance(sys, &mut rng);
            x = sys.step(&x, u, &d)?;
            trajectory.push(x.clone());
            if !k.contains(&x) {
                return Ok(Run { trajectory, escaped: true });
            }
        }
        Ok(Run { trajectory, escaped: false })
    };
    let runs: Vec<Run> = if cli.jobs > 1 {
        (0..a.runs).into_par_iter().map(one).collect::<Result<_, _>>()?
    } else {
        (0..a.runs).map(one).collect::<Result<_, _>>()?
    };

    let escaped: Vec<usize> = runs.iter().enumerate().filter(|(_, r)| r.escaped).map(|(i, _)| i).collect();
    let code = if escaped.is_empty() { EXIT_OK } else { EXIT_PROPERTY };
    let results = json!({
        "runs": a.runs,
        "steps": a.steps,
        "all_inside": escaped.is_empty(),
        "escaped_runs": escaped,
        "escaping_trajectory": escaped.first().map(|&i| &runs[i].trajectory),
    });
    let mut csv = String::from("run,step");
    for i in 1..=sys.dim() {
        csv.push_str(&format!(",x{i}"));
    }
    csv.push('\n');
    for (i, r) in runs.iter().enumerate() {
        for (step, p) in r.trajectory.iter().enumerate() {
            csv.push_str(&format!("{i},{step}"));
            for v in p.iter() {
                csv.push_str(&format!(",{v}"));
            }
            csv.push('\n');
        }
    }
    Ok(Execution {
        report: new_report("simulate", &cfg, seed, code, results),
        files: vec![("trajectories.csv".into(), csv)],
    })
}

fn cmd_validate(_cli: &Cli, a: &ValidateArgs) -> Result<Execution, CliError> {
    let cfg = load_config(&a.config)?;
    let seed = a.seed.unwrap_or(cfg.problem.settings.seed);
    let r = validate_monotonicity(&cfg.problem.system, a.samples, seed)?;
    let code = if r.counterexample.is_none() { EXIT_OK } else { EXIT_PROPERTY };
    let results = json!({
        "class": cfg.problem.system.class(),
        "class_confirmed": r.class_confirmed,
        "untested": r.untested,
        "samples": r.samples,
        "counterexample": r.counterexample,
    });
    Ok(Execution {
        report: new_report("validate", &cfg, seed, code, results),
        files: Vec::new(),
    })
}

fn new_report(command: &str, cfg: &Loaded, seed: u64, exit_code: i32, results: Value) -> RunReport {
    RunReport {
        schema_version: SCHEMA_VERSION,
        command: command.into(),
        config_digest: cfg.digest.clone(),
        tool_version: env!("CARGO_PKG_VERSION").into(),
        seed,
        exit_code,
        wall_time_s: 0.0,
        results,
    }
}

/// Runs a parsed command; the report's wall time covers the whole command.
pub fn execute(cli: &Cli) -> Result<Execution, CliError> {
    let start = Instant::now();
    let run = || match &cli.command {
        Command::Verify(a) => cmd_verify(cli, a),
        Command::Synth(a) => cmd_synth(cli, a),
        Command::Simulate(a) => cmd_simulate(cli, a),
        Command::Validate(a) => cmd_validate(cli, a),
    };
    let mut exec = if cli.jobs > 1 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.jobs)
            .build()
            .map_err(|e| CliError::Usage(format!("--jobs: {e}")))?
            .install(run)?
    } else {
        run()?
    };
    exec.report.wall_time_s = start.elapsed().as_secs_f64();
    Ok(exec)
}

fn write_outputs(dir: &Path, exec: &Execution) -> Result<(), CliError> {
    let write = |name: &str, text: &str| {
        let path = dir.join(name);
        fs::write(&path, text).map_err(|source| CliError::Write { path, source })
    };
    fs::create_dir_all(dir).map_err(|source| CliError::Write {
        path: dir.to_owned(),
        source,
    })?;
    for (name, text) in &exec.files {
        write(name, text)?;
    }
    write("report.json", &exec.report.to_json())
}

/// Parses `args`, runs the command, prints the report and returns the
/// process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let exec = match execute(&cli) {
        Ok(e) => e,
        Err(e) => {
            eprintln!("monocis: {e}");
            return EXIT_USAGE;
        }
    };
    if let Some(dir) = &cli.out {
        if let Err(e) = write_outputs(dir, &exec) {
            eprintln!("monocis: {e}");
            return EXIT_USAGE;
        }
    }
    println!("{}", exec.report.to_json());
    exec.report.exit_code
}
