//! The `firesat` command line.

use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use firesat_core::constellation::{expand_with, GeneBounds, WalkerChromosome};
use firesat_core::coverage::CoverageEvaluator;
use firesat_core::edgesim::{edge_latency, latency_sweep, LinkBudget, PathMode};
use firesat_core::firedetect::{generate_synthetic_scene, FirePixel, SceneSpec};
use firesat_core::kepler::{ground_track, OrbitalElements};
use firesat_core::optimizer::{CoverageFitness, Mode, Nsga2, OptimizerError, RunState};
use log::info;
use serde::Serialize;
use serde_json::json;

use crate::config::RunConfig;
use crate::error::{AppError, Result};
use crate::io::{config_hash, read_json, write_json, OutputLock, RunManifest, MANIFEST_FILE};
use crate::{export, fixtures, parallel, replay, scene_file};

#[derive(Debug, Parser)]
#[command(name = "firesat", version, about = "LEO constellation design, fire detection and relay latency toolkit")]
pub struct Cli {
    /// Run configuration JSON; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
pub enum Command {
    /// Ground tracks for a chromosome or a single set of elements.
    Propagate(PropagateArgs),
    /// Expand a chromosome into per-satellite elements.
    Expand(ExpandArgs),
    /// Coverage report for a chromosome over a region.
    Evaluate(EvaluateArgs),
    /// NSGA-II search for a constellation.
    Optimize(OptimizeArgs),
    /// Classify fire pixels in a scene file.
    Detect(DetectArgs),
    /// Detection time against the number of edge nodes.
    LatencySweep(SweepArgs),
    /// Recompute the published reference numbers from the bundled fixtures.
    ReplayPaper(ReplayArgs),
    /// Write a synthetic scene with known fire pixels.
    SynthScene(SynthArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Propagate(_) => "propagate",
            Command::Expand(_) => "expand",
            Command::Evaluate(_) => "evaluate",
            Command::Optimize(_) => "optimize",
            Command::Detect(_) => "detect",
            Command::LatencySweep(_) => "latency-sweep",
            Command::ReplayPaper(_) => "replay-paper",
            Command::SynthScene(_) => "synth-scene",
        }
    }

    fn out_dir_flag(&self) -> Option<&Path> {
        let d = match self {
            Command::Propagate(a) => &a.out_dir,
            Command::Expand(a) => &a.out_dir,
            Command::Evaluate(a) => &a.out_dir,
            Command::Optimize(a) => &a.out_dir,
            Command::Detect(a) => &a.out_dir,
            Command::LatencySweep(a) => return a.out.as_deref().and_then(Path::parent).or(a.out_dir.as_deref()),
            Command::ReplayPaper(a) => &a.out_dir,
            Command::SynthScene(a) => &a.out_dir,
        };
        d.as_deref()
    }
}

#[derive(Debug, Args, Serialize)]
pub struct PropagateArgs {
    /// Chromosome JSON.
    #[arg(long, conflicts_with = "elements")]
    pub chromosome: Option<PathBuf>,
    /// Orbital elements JSON for one satellite.
    #[arg(long)]
    pub elements: Option<PathBuf>,
    /// Keep every k-th satellite of the constellation.
    #[arg(long, default_value_t = 1)]
    pub every: usize,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub duration: Option<f64>,
    #[arg(long)]
    pub permissive_phasing: bool,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ExpandArgs {
    #[arg(long)]
    pub chromosome: PathBuf,
    /// Allow phasing up to the number of planes.
    #[arg(long)]
    pub permissive_phasing: bool,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub chromosome: PathBuf,
    #[arg(long)]
    pub region: Option<PathBuf>,
    #[arg(long)]
    pub dt: Option<f64>,
    /// Evaluate every k-th satellite only.
    #[arg(long, default_value_t = 1)]
    pub subsample: usize,
    #[arg(long)]
    pub permissive_phasing: bool,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
pub enum ModeArg {
    Scalar,
    Multi,
}

#[derive(Debug, Args, Serialize)]
pub struct OptimizeArgs {
    #[arg(long)]
    pub region: Option<PathBuf>,
    #[arg(long)]
    pub population: Option<usize>,
    #[arg(long)]
    pub generations: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Cap on the total satellite count.
    #[arg(long)]
    pub max_total: Option<u32>,
    #[arg(long)]
    pub dt: Option<f64>,
    /// Checkpoint every G generations.
    #[arg(long)]
    pub checkpoint_every: Option<usize>,
    /// Continue from a checkpoint file.
    #[arg(long)]
    pub resume: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct DetectArgs {
    #[arg(long)]
    pub scene: PathBuf,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct SweepArgs {
    /// Node counts: `a..b` (inclusive), `a..=b`, `n` or a comma list.
    #[arg(long, default_value = "1..100")]
    pub nodes: String,
    /// Link budget JSON.
    #[arg(long)]
    pub budget: Option<PathBuf>,
    /// Plateau tolerance, seconds.
    #[arg(long, default_value_t = firesat_core::edgesim::DEFAULT_PLATEAU_EPS)]
    pub epsilon: f64,
    /// Use the slant visibility range for the LEO to GEO hop.
    #[arg(long)]
    pub slant: bool,
    /// CSV output file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ReplayArgs {
    #[arg(long)]
    pub data_dir: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub subsample: usize,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct SynthArgs {
    /// Scene spec JSON; the bundled 64×64 spec when absent.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

/// What a command produced.
struct Outcome {
    seed: Option<u64>,
    outputs: Vec<String>,
    summary: serde_json::Value,
}

/// Parses `1..100`, `1..=100`, `7` or `1,2,5`.
pub fn parse_nodes(s: &str) -> Result<Vec<u64>> {
    let bad = || AppError::Config(format!("cannot parse node range {s:?}"));
    let num = |t: &str| t.trim().parse::<u64>().map_err(|_| bad());
    let v: Vec<u64> = if let Some((a, b)) = s.split_once("..=").or_else(|| s.split_once("..")) {
        (num(a)?..=num(b)?).collect()
    } else {
        s.split(',').map(num).collect::<Result<_>>()?
    };
    if v.is_empty() || v.contains(&0) {
        return Err(AppError::Config("node counts must be non-empty and at least 1".into()));
    }
    Ok(v)
}

fn file_name(p: &Path) -> String {
    p.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default()
}

fn bounds(cfg: &RunConfig, permissive: bool) -> GeneBounds {
    GeneBounds { phasing_up_to_planes: cfg.bounds.phasing_up_to_planes || permissive, ..cfg.bounds }
}

fn propagate(a: &PropagateArgs, cfg: &RunConfig, out: &Path) -> Result<Outcome> {
    let dt = a.dt.unwrap_or(cfg.dt_s);
    let duration = a.duration.unwrap_or(cfg.day_length_s);
    let sats: Vec<(usize, OrbitalElements)> = match (&a.chromosome, &a.elements) {
        (Some(c), _) => {
            let c: WalkerChromosome = read_json(c)?;
            let con = expand_with(&c, &bounds(cfg, a.permissive_phasing))?;
            con.sats.into_iter().enumerate().step_by(a.every.max(1)).collect()
        }
        (None, Some(e)) => {
            let e: OrbitalElements = read_json(e)?;
            let e = OrbitalElements::new(e.a_km, e.e, e.i_deg, e.raan_deg, e.argp_deg, e.ma0_deg)?;
            vec![(0, e)]
        }
        (None, None) => return Err(AppError::Config("give --chromosome or --elements".into())),
    };
    let tracks =
        sats.iter().map(|(k, s)| Ok((*k, ground_track(s, &cfg.earth, dt, duration)?))).collect::<Result<Vec<_>>>()?;
    let path = out.join("ground_track.csv");
    export::ground_tracks(&path, &tracks)?;
    Ok(Outcome {
        seed: None,
        outputs: vec![file_name(&path)],
        summary: json!({ "satellites": tracks.len(), "samples_per_satellite": tracks.first().map_or(0, |t| t.1.len()) }),
    })
}

fn expand(a: &ExpandArgs, cfg: &RunConfig, out: &Path) -> Result<Outcome> {
    let c: WalkerChromosome = read_json(&a.chromosome)?;
    let con = expand_with(&c, &bounds(cfg, a.permissive_phasing))?;
    let path = out.join("elements.csv");
    export::elements(&path, &con)?;
    Ok(Outcome { seed: None, outputs: vec![file_name(&path)], summary: json!({ "satellites": con.len() }) })
}

fn coverage_evaluator(cfg: &RunConfig, region: Option<&PathBuf>, dt: Option<f64>) -> Result<CoverageEvaluator> {
    let mut cfg = cfg.clone();
    if let Some(r) = region {
        cfg.region = Some(r.clone());
    }
    if let Some(dt) = dt {
        cfg.dt_s = dt;
    }
    let (_, grid) = cfg.load_region()?;
    Ok(CoverageEvaluator::new(grid, cfg.earth, cfg.eval_config())?)
}

fn evaluate(a: &EvaluateArgs, cfg: &RunConfig, out: &Path) -> Result<Outcome> {
    let c: WalkerChromosome = read_json(&a.chromosome)?;
    let con = expand_with(&c, &bounds(cfg, a.permissive_phasing))?.subsample(a.subsample.max(1));
    let ev = coverage_evaluator(cfg, a.region.as_ref(), a.dt)?;
    let report = parallel::evaluate_coverage(&ev, &con)?;
    let rp = out.join("coverage_report.json");
    let hp = out.join("hourly_visibility.csv");
    write_json(&rp, &report)?;
    export::hourly_visibility(&hp, &report)?;
    Ok(Outcome {
        seed: None,
        outputs: vec![file_name(&rp), file_name(&hp)],
        summary: json!({
            "status": report.status,
            "fitness": if report.fitness.is_finite() { json!(report.fitness) } else { json!("inf") },
            "c_mean": report.c_mean,
            "p_cov": report.p_cov,
            "p_cov_fraction": report.p_cov_fraction,
            "r_mean_min": report.r_mean_min,
            "n_sats": report.n_sats,
        }),
    })
}

fn optimize(a: &OptimizeArgs, cfg: &RunConfig, out: &Path) -> Result<Outcome> {
    let mut ga = cfg.ga;
    ga.seed = a.seed.unwrap_or(cfg.effective_seed());
    if let Some(p) = a.population {
        ga.population = p;
    }
    if let Some(g) = a.generations {
        ga.generations = g;
    }
    if let Some(m) = a.mode {
        ga.mode = match m {
            ModeArg::Scalar => Mode::Scalar,
            ModeArg::Multi => Mode::MultiObjective,
        };
    }
    let mut gb = cfg.bounds;
    if let Some(m) = a.max_total {
        gb.max_total = m;
    }
    let ev = coverage_evaluator(cfg, a.region.as_ref(), a.dt)?;
    let fitness = parallel::ParallelCoverageFitness(CoverageFitness { evaluator: ev, bounds: gb });
    let opt_err = |e: OptimizerError<_>| AppError::Optimizer(e.to_string());

    let mut run = match &a.resume {
        Some(p) => {
            let state: RunState = read_json(p)?;
            let mut st = state;
            st.config.generations = ga.generations.max(st.generation);
            Nsga2::resume(st).map_err(opt_err)?
        }
        None => {
            let mut r = Nsga2::new(ga, gb).map_err(opt_err)?;
            r.initialize(&fitness).map_err(opt_err)?;
            r
        }
    };
    let every = a.checkpoint_every.unwrap_or(cfg.checkpoint_every);
    let ckpt = out.join("checkpoint.json");
    let mut outputs = Vec::new();
    while !run.is_done() {
        run.step(&fitness).map_err(opt_err)?;
        info!("generation {} done", run.generation());
        if every > 0 && run.generation() % every == 0 {
            write_json(&ckpt, &run.state())?;
        }
    }
    if every > 0 {
        write_json(&ckpt, &run.state())?;
        outputs.push(file_name(&ckpt));
    }
    let result = run.result();
    let best = result.best.clone().ok_or_else(|| AppError::Optimizer("empty population".into()))?;
    let bp = out.join("best.json");
    let ap = out.join("archive.json");
    let sp = out.join("ga_stats.csv");
    write_json(&bp, &json!({ "chromosome": best.genes, "fitness": best }))?;
    write_json(&ap, &result.archive)?;
    export::ga_stats(&sp, &result.history)?;
    outputs.extend([file_name(&bp), file_name(&ap), file_name(&sp)]);
    Ok(Outcome {
        seed: Some(run.state().config.seed),
        outputs,
        summary: json!({ "best": best.genes, "best_fitness": best.scalar, "archive_size": result.archive.len() }),
    })
}

fn detect(a: &DetectArgs, out: &Path) -> Result<Outcome> {
    let scene = scene_file::read_scene(&a.scene)?;
    let report = parallel::classify_scene(&scene)?;
    let jp = out.join("fire_report.json");
    let cp = out.join("fires.csv");
    write_json(&jp, &report)?;
    export::fires(&cp, &report)?;
    Ok(Outcome {
        seed: None,
        outputs: vec![file_name(&jp), file_name(&cp)],
        summary: json!({ "scene_id": report.scene_id, "fire_pixels": report.fire_pixels.len(), "counts": report.counts }),
    })
}

fn sweep(a: &SweepArgs, cfg: &RunConfig, out: &Path) -> Result<Outcome> {
    let budget: LinkBudget = match &a.budget {
        Some(p) => read_json(p)?,
        None => cfg.budget,
    };
    let mut geom = cfg.geometry;
    if a.slant {
        geom.path = PathMode::Slant;
    }
    let nodes = parse_nodes(&a.nodes)?;
    let rows = nodes
        .iter()
        .map(|&n| edge_latency(&budget, n, &geom, &cfg.earth))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let summary = latency_sweep(&budget, &geom, &cfg.earth, nodes, a.epsilon)?;
    let path = a.out.clone().unwrap_or_else(|| out.join("sweep.csv"));
    export::latency_sweep(&path, &rows)?;
    Ok(Outcome {
        seed: None,
        outputs: vec![file_name(&path)],
        summary: json!({
            "asymptote_s": summary.asymptote_s,
            "epsilon_s": summary.epsilon_s,
            "plateau": summary.plateau,
            "single_sat_s": summary.single_sat_s,
        }),
    })
}

fn replay_paper(a: &ReplayArgs, cfg: &RunConfig, out: &Path) -> Result<Outcome> {
    let opts = replay::ReplayOptions {
        data_dir: a.data_dir.clone().unwrap_or_else(fixtures::default_data_dir),
        subsample: a.subsample,
        dt_s: a.dt.unwrap_or(cfg.dt_s),
        earth: cfg.earth,
    };
    let report = replay::run(&opts)?;
    let path = out.join("replay_report.json");
    write_json(&path, &report)?;
    Ok(Outcome { seed: None, outputs: vec![file_name(&path)], summary: json!({ "entries": report.entries }) })
}

fn synth_scene(a: &SynthArgs, out: &Path) -> Result<Outcome> {
    let spec: SceneSpec = match &a.spec {
        Some(p) => read_json(p)?,
        None => fixtures::bundled_scene_spec(),
    };
    let scene = generate_synthetic_scene(&spec)?;
    let truth: Vec<FirePixel> = firesat_core::firedetect::classify_scene(&scene_file::quantize(&scene))?.fire_pixels;
    let sp = out.join(fixtures::SCENE);
    let tp = out.join(fixtures::SCENE_TRUTH);
    scene_file::write_scene(&sp, &scene)?;
    write_json(&tp, &truth)?;
    Ok(Outcome {
        seed: None,
        outputs: vec![file_name(&sp), file_name(&tp)],
        summary: json!({ "scene_id": scene.id, "fire_pixels": truth.len() }),
    })
}

fn dispatch(cmd: &Command, cfg: &RunConfig, out: &Path) -> Result<Outcome> {
    match cmd {
        Command::Propagate(a) => propagate(a, cfg, out),
        Command::Expand(a) => expand(a, cfg, out),
        Command::Evaluate(a) => evaluate(a, cfg, out),
        Command::Optimize(a) => optimize(a, cfg, out),
        Command::Detect(a) => detect(a, out),
        Command::LatencySweep(a) => sweep(a, cfg, out),
        Command::ReplayPaper(a) => replay_paper(a, cfg, out),
        Command::SynthScene(a) => synth_scene(a, out),
    }
}

/// Runs a parsed command line and returns the process exit code. Errors go to
/// stderr as one JSON line.
pub fn run(cli: Cli) -> i32 {
    let started = Instant::now();
    let started_unix_s = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    let cfg = match &cli.config {
        Some(p) => match RunConfig::load(p) {
            Ok(c) => c,
            Err(e) => return fail(&e),
        },
        None => RunConfig::default(),
    };
    let out = cli
        .command
        .out_dir_flag()
        .map(Path::to_path_buf)
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("firesat-out"));
    let lock = match OutputLock::acquire(&out) {
        Ok(l) => l,
        Err(e) => return fail(&e),
    };
    let hash = config_hash(&json!({ "command": &cli.command, "config": &cfg }));
    let result = dispatch(&cli.command, &cfg, &out);
    let mut manifest = RunManifest {
        command: cli.command.name().into(),
        version: env!("CARGO_PKG_VERSION").into(),
        seed: None,
        config_hash: hash,
        started_unix_s,
        wall_time_s: 0.0,
        success: false,
        error: None,
        outputs: Vec::new(),
    };
    let code = match result {
        Ok(o) => {
            manifest.seed = o.seed.or(Some(cfg.effective_seed()));
            manifest.outputs = o.outputs;
            manifest.success = true;
            manifest.wall_time_s = started.elapsed().as_secs_f64();
            match write_json(&out.join(MANIFEST_FILE), &manifest) {
                Ok(()) => {
                    println!("{}", o.summary);
                    0
                }
                Err(e) => fail(&e),
            }
        }
        Err(e) => {
            manifest.error = Some(e.to_string());
            manifest.wall_time_s = started.elapsed().as_secs_f64();
            let _ = write_json(&out.join(MANIFEST_FILE), &manifest);
            fail(&e)
        }
    };
    drop(lock);
    code
}

fn fail(e: &AppError) -> i32 {
    eprintln!("{}", e.to_json_line());
    1
}
