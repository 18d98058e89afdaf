use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use kppwaves::connect::{self, wave_profile, Classification, WaveProfile};
use kppwaves::model::{classify_speed, critical_speed, CanonicalModel, Regime, ScalingMap, SpeedClass};
use kppwaves::pde::{advect_profile_test, AdvectOptions, AdvectReport};
use kppwaves::phaseplane::{build_system, FixedPointInfo, PhaseSystem};
use kppwaves::Error;
use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Resolved, RunConfig};
use crate::output::{speed_tag, write_json, write_table, Format};
use crate::Command;

pub struct Settings {
    pub config: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub format: Format,
}

/// Why a run stopped; decides the exit status.
#[derive(Debug)]
pub enum Failure {
    /// Bad config, unsupported parameters, or a missing input file.
    Validation(String),
    /// A computation failed; whatever was written is kept.
    Computation(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 2,
            Failure::Computation(_) => 3,
        }
    }

    fn missing_artifact(path: &Path, hint: &str) -> Failure {
        Failure::Validation(format!("MissingArtifact: expected file {} ({hint})", path.display()))
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Validation(msg) | Failure::Computation(msg) => f.write_str(msg),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter { .. } | Error::DegenerateScale | Error::Unsupported { .. } => Failure::Validation(e.to_string()),
            _ => Failure::Computation(e.to_string()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Computation(format!("{e:#}"))
    }
}

type Outcome = Result<(), Failure>;

struct Context {
    cfg: RunConfig,
    model: Resolved,
    dir: PathBuf,
    format: Format,
}

impl Context {
    fn canonical(&self) -> &CanonicalModel {
        &self.model.canonical
    }
}

pub fn run(command: Command, settings: &Settings) -> Outcome {
    let path = settings
        .config
        .as_ref()
        .ok_or_else(|| Failure::Validation("--config PATH is required".into()))?;
    let text = fs::read_to_string(path).map_err(|e| Failure::Validation(format!("reading {}: {e}", path.display())))?;
    let mut cfg: RunConfig = serde_json::from_str(&text).map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))?;
    if let Some(out) = &settings.out {
        cfg.output_dir = out.clone();
    }
    cfg.validate().map_err(|e| Failure::Validation(e.to_string()))?;
    let model = cfg.resolve()?;
    if let Some(jobs) = settings.jobs {
        if jobs == 0 {
            return Err(Failure::Validation("--jobs: must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Failure::Computation(e.to_string()))?;
    }
    let dir = cfg.output_dir.clone();
    fs::create_dir_all(&dir).map_err(|e| Failure::Computation(format!("creating {}: {e}", dir.display())))?;
    write_json(&dir.join("effective_config.json"), &cfg)?;
    let ctx = Context {
        cfg,
        model,
        dir,
        format: settings.format,
    };
    match command {
        Command::Analyze => analyze(&ctx),
        Command::Shoot => shoot(&ctx),
        Command::Pde => pde(&ctx),
        Command::Sweep => sweep(&ctx),
    }
}

#[derive(Serialize)]
struct AnalyzeReport {
    model: CanonicalModel,
    /// Map from canonical to configured units; absent for a canonical config.
    scaling: Option<ScalingMap>,
    regime: Regime,
    /// Critical speed magnitude in canonical units.
    critical_speed: f64,
    /// Critical speed magnitude in configured units.
    critical_speed_configured: f64,
    speeds: Vec<SpeedAnalysis>,
}

#[derive(Serialize)]
struct SpeedAnalysis {
    c: f64,
    canonical_c: f64,
    predicted: SpeedClass,
    /// Reduced system at speed magnitude `|c|`.
    system: PhaseSystem,
    fixed_points: Vec<FixedPointInfo>,
}

fn analyze(ctx: &Context) -> Outcome {
    let cm = ctx.canonical();
    cm.ensure_supported()?;
    let c_star = critical_speed(cm)?;
    let speeds = ctx
        .cfg
        .speeds
        .iter()
        .map(|&c| {
            let canonical_c = ctx.model.canonical_speed(c);
            let system = build_system(cm, canonical_c.abs())?;
            Ok(SpeedAnalysis {
                c,
                canonical_c,
                predicted: classify_speed(cm, canonical_c)?,
                system,
                fixed_points: system.fixed_points(),
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let report = AnalyzeReport {
        model: *cm,
        scaling: ctx.model.scaling,
        regime: cm.regime,
        critical_speed: c_star,
        critical_speed_configured: ctx.model.scaling.map_or(c_star, |s| c_star * s.a / s.b),
        speeds,
    };
    write_json(&ctx.dir.join("analyze.json"), &report)?;
    println!("{}", serde_json::to_string_pretty(&report).map_err(anyhow::Error::from)?);
    Ok(())
}

/// One row of `classification.json`.
#[derive(Debug, Serialize, Deserialize)]
struct ShotEntry {
    c: f64,
    canonical_c: f64,
    classification: Option<Classification>,
    low_confidence: bool,
    x0: Option<f64>,
    n_oscillations: usize,
    /// Overshoot amplitudes above 1, from the front toward the rear.
    overshoot_amplitudes: Vec<f64>,
    support_edge: Option<f64>,
    trajectory_file: Option<String>,
    profile_file: Option<String>,
    /// Full profile, the input of `pde`.
    wave_file: Option<String>,
    error: Option<String>,
}

fn wave_file(c: f64) -> String {
    format!("wave_{}.json", speed_tag(c))
}

fn shoot(ctx: &Context) -> Outcome {
    let cm = ctx.canonical();
    cm.ensure_supported()?;
    if ctx.cfg.speeds.is_empty() {
        warn!("no speeds configured; nothing to shoot");
        return Ok(());
    }
    let opts = ctx.cfg.shoot_options();
    opts.validate()?;
    let results: Vec<_> = ctx
        .cfg
        .speeds
        .par_iter()
        .map(|&c| (c, wave_profile(cm, ctx.model.canonical_speed(c), &opts)))
        .collect();
    let mut entries = Vec::with_capacity(results.len());
    for (c, result) in results {
        let tag = speed_tag(c);
        let mut entry = ShotEntry {
            c,
            canonical_c: ctx.model.canonical_speed(c),
            classification: None,
            low_confidence: false,
            x0: None,
            n_oscillations: 0,
            overshoot_amplitudes: Vec::new(),
            support_edge: None,
            trajectory_file: None,
            profile_file: None,
            wave_file: None,
            error: None,
        };
        match result {
            Err(e) => {
                warn!("c = {c}: {e}");
                entry.error = Some(e.to_string());
            }
            Ok((report, profile)) => {
                entry.classification = Some(report.classification);
                entry.low_confidence = report.low_confidence;
                entry.x0 = report.x0;
                entry.n_oscillations = report.n_oscillations;
                if let Some(traj) = &report.trajectory {
                    let path = write_table(&ctx.dir, &format!("trajectory_{tag}"), &traj.samples, ctx.format)?;
                    write_json(
                        &ctx.dir.join(format!("trajectory_{tag}.events.json")),
                        &serde_json::json!({
                            "seed": traj.seed,
                            "termination": traj.termination,
                            "steps": traj.steps,
                            "events": traj.events,
                        }),
                    )?;
                    entry.trajectory_file = Some(file_name(&path));
                }
                if let Some(profile) = &profile {
                    let path = write_table(&ctx.dir, &format!("profile_{tag}"), &profile.samples, ctx.format)?;
                    entry.profile_file = Some(file_name(&path));
                    write_json(&ctx.dir.join(wave_file(c)), profile)?;
                    entry.wave_file = Some(wave_file(c));
                    entry.overshoot_amplitudes = profile.overshoot_amplitudes();
                    entry.support_edge = profile.support_edge;
                }
                info!("c = {c}: {:?}", report.classification);
            }
        }
        println!(
            "c = {c:+.6}: {}",
            entry
                .classification
                .map_or_else(|| format!("failed ({})", entry.error.as_deref().unwrap_or("")), |k| format!("{k:?}"))
        );
        entries.push(entry);
    }
    write_json(&ctx.dir.join("classification.json"), &entries)?;
    let failed = entries.iter().filter(|e| e.error.is_some()).count();
    if failed > 0 {
        return Err(Failure::Computation(format!("{failed} of {} speeds failed", entries.len())));
    }
    Ok(())
}

fn file_name(path: &Path) -> String {
    path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default()
}

#[derive(Serialize)]
struct SnapshotRow {
    t: f64,
    x: f64,
    u: f64,
}

#[derive(Serialize)]
struct FrontRow {
    t: f64,
    x_front: Option<f64>,
}

#[derive(Serialize)]
struct PdeEntry {
    c: f64,
    canonical_c: f64,
    classification: Option<Classification>,
    /// Largest sup-norm gap between the solution and the translated profile.
    max_error: Option<f64>,
    /// Fitted front speed in canonical units; null when there is no front to track.
    measured_speed: Option<f64>,
    domain: Option<(f64, f64)>,
    dx: Option<f64>,
    steps: Option<usize>,
    max_u: Option<f64>,
    suggested_domain: Option<(f64, f64)>,
    skipped: Option<String>,
    error: Option<String>,
}

impl PdeEntry {
    fn new(c: f64, canonical_c: f64, classification: Option<Classification>) -> Self {
        Self {
            c,
            canonical_c,
            classification,
            max_error: None,
            measured_speed: None,
            domain: None,
            dx: None,
            steps: None,
            max_u: None,
            suggested_domain: None,
            skipped: None,
            error: None,
        }
    }
}

/// Front-track rows kept in the CSV.
const FRONT_ROWS: usize = 2000;

fn pde(ctx: &Context) -> Outcome {
    let cm = ctx.canonical();
    cm.ensure_supported()?;
    if cm.q < 0.0 {
        return Err(Failure::Validation(format!("model.q: PDE runs need q >= 0, got {}", cm.q)));
    }
    if ctx.cfg.speeds.is_empty() {
        warn!("no speeds configured; nothing to advect");
        return Ok(());
    }
    let index_path = ctx.dir.join("classification.json");
    let index: BTreeMap<String, Option<Classification>> = if index_path.exists() {
        let text = fs::read_to_string(&index_path).map_err(|e| Failure::Validation(format!("reading {}: {e}", index_path.display())))?;
        let entries: Vec<ShotEntry> = serde_json::from_str(&text).map_err(|e| Failure::Validation(format!("{}: {e}", index_path.display())))?;
        entries.into_iter().map(|e| (speed_tag(e.c), e.classification)).collect()
    } else {
        BTreeMap::new()
    };

    // Every input is located and parsed before any run starts.
    let mut jobs: Vec<(f64, Option<WaveProfile>)> = Vec::new();
    for &c in &ctx.cfg.speeds {
        let path = ctx.dir.join(wave_file(c));
        if path.exists() {
            let text = fs::read_to_string(&path).map_err(|e| Failure::Validation(format!("reading {}: {e}", path.display())))?;
            let profile: WaveProfile = serde_json::from_str(&text).map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))?;
            let expected = ctx.model.canonical_speed(c);
            if (profile.c - expected).abs() > 1e-9 * (1.0 + expected.abs()) {
                return Err(Failure::Validation(format!(
                    "{} holds a profile at canonical speed {}, expected {expected}",
                    path.display(),
                    profile.c
                )));
            }
            jobs.push((c, Some(profile)));
        } else if index.get(&speed_tag(c)) == Some(&Some(Classification::None)) {
            jobs.push((c, None));
        } else {
            return Err(Failure::missing_artifact(&path, "run `kppwaves shoot` with the same config first"));
        }
    }

    let p = &ctx.cfg.pde;
    let opts = AdvectOptions {
        n: p.n,
        cfl: p.cfl,
        domain: p.x_min.zip(p.x_max),
        snapshot_times: p.snapshot_times.clone(),
        ..AdvectOptions::default()
    };
    let results: Vec<(f64, Option<WaveProfile>, Option<kppwaves::Result<AdvectReport>>)> = jobs
        .into_par_iter()
        .map(|(c, profile)| {
            let report = profile.as_ref().map(|pr| advect_profile_test(pr, cm, p.t_end, &opts));
            (c, profile, report)
        })
        .collect();

    let mut entries = Vec::with_capacity(results.len());
    for (c, profile, report) in results {
        let tag = speed_tag(c);
        let mut entry = PdeEntry::new(c, ctx.model.canonical_speed(c), profile.as_ref().map(|p| p.classification));
        match report {
            None => {
                entry.classification = Some(Classification::None);
                entry.skipped = Some("no travelling wave at this speed".into());
            }
            Some(Err(e)) => {
                warn!("c = {c}: {e}");
                if let Error::DomainTooSmall {
                    suggested_min,
                    suggested_max,
                    ..
                } = e
                {
                    entry.suggested_domain = Some((suggested_min, suggested_max));
                }
                entry.error = Some(e.to_string());
            }
            Some(Ok(rep)) => {
                let rows: Vec<SnapshotRow> = rep
                    .snapshots
                    .iter()
                    .flat_map(|s| s.x.iter().zip(&s.u).map(move |(&x, &u)| SnapshotRow { t: s.t, x, u }))
                    .collect();
                write_table(&ctx.dir, &format!("snapshots_{tag}"), &rows, ctx.format)?;
                let stride = rep.front_track.len().div_ceil(FRONT_ROWS).max(1);
                let last = rep.front_track.len().saturating_sub(1);
                let front: Vec<FrontRow> = rep
                    .front_track
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| i % stride == 0 || *i == last)
                    .map(|(_, r)| FrontRow { t: r.t, x_front: r.x })
                    .collect();
                write_table(&ctx.dir, &format!("front_{tag}"), &front, ctx.format)?;
                entry.max_error = Some(rep.max_error);
                entry.measured_speed = rep.measured_speed;
                entry.domain = Some(rep.domain);
                entry.dx = Some(rep.dx);
                entry.steps = Some(rep.steps);
                entry.max_u = Some(rep.max_u);
            }
        }
        println!(
            "c = {c:+.6}: {}",
            match (&entry.max_error, &entry.error, &entry.skipped) {
                (Some(err), _, _) => format!("max_error {err:.3e}, speed {}", entry.measured_speed.map_or("undefined".into(), |s| format!("{s:.6}"))),
                (_, Some(e), _) => format!("failed ({e})"),
                (_, _, Some(s)) => format!("skipped ({s})"),
                _ => String::new(),
            }
        );
        entries.push(entry);
    }
    write_json(&ctx.dir.join("pde_summary.json"), &entries)?;
    let failed = entries.iter().filter(|e| e.error.is_some()).count();
    if failed > 0 {
        return Err(Failure::Computation(format!("{failed} of {} advection runs failed", entries.len())));
    }
    Ok(())
}

#[derive(Serialize)]
struct SweepOutRow {
    c: f64,
    canonical_c: f64,
    predicted_class: SpeedClass,
    observed_class: Option<Classification>,
    x0: Option<f64>,
    n_oscillations: usize,
    agreement_flag: bool,
    low_confidence: bool,
    error: Option<String>,
}

#[derive(Serialize)]
struct SweepSummary {
    /// `−c*` in configured units, where the waves turn from oscillatory to monotone.
    transition_speed: f64,
    /// Fastest observed monotone speed and the slowest oscillatory speed beyond it.
    bracket: Option<(f64, f64)>,
    bracket_contains_transition: bool,
    rows: usize,
    disagreements: usize,
    failures: usize,
}

fn sweep(ctx: &Context) -> Outcome {
    let cm = ctx.canonical();
    cm.ensure_supported()?;
    let speeds = ctx.cfg.sweep_speeds();
    if speeds.is_empty() {
        warn!("no speeds to sweep");
        return Ok(());
    }
    let opts = ctx.cfg.shoot_options();
    opts.validate()?;
    let canonical: Vec<f64> = speeds.iter().map(|&c| ctx.model.canonical_speed(c)).collect();
    let rows = connect::sweep(cm, &canonical, &opts)?;
    let mut out: Vec<SweepOutRow> = speeds
        .iter()
        .zip(rows)
        .map(|(&c, r)| SweepOutRow {
            c,
            canonical_c: r.c,
            predicted_class: r.predicted,
            observed_class: r.observed,
            x0: r.x0,
            n_oscillations: r.n_oscillations,
            agreement_flag: r.agreement,
            low_confidence: r.low_confidence,
            error: r.error,
        })
        .collect();
    out.sort_by(|a, b| a.c.total_cmp(&b.c));
    write_table(&ctx.dir, "sweep", &out, ctx.format)?;

    let c_star = critical_speed(cm)?;
    let transition = ctx.model.scaling.map_or(-c_star, |s| -c_star * s.a / s.b);
    let monotone = out
        .iter()
        .filter(|r| r.observed_class == Some(Classification::Monotone))
        .map(|r| r.c)
        .fold(None, |acc: Option<f64>, c| Some(acc.map_or(c, |a| a.max(c))));
    let bracket = monotone.and_then(|lo| {
        out.iter()
            .filter(|r| r.observed_class == Some(Classification::Oscillatory) && r.c > lo)
            .map(|r| r.c)
            .fold(None, |acc: Option<f64>, c| Some(acc.map_or(c, |a| a.min(c))))
            .map(|hi| (lo, hi))
    });
    let summary = SweepSummary {
        transition_speed: transition,
        bracket,
        bracket_contains_transition: bracket.is_some_and(|(lo, hi)| lo <= transition + 1e-9 * (1.0 + transition.abs()) && transition < hi),
        rows: out.len(),
        disagreements: out.iter().filter(|r| r.error.is_none() && !r.agreement_flag).count(),
        failures: out.iter().filter(|r| r.error.is_some()).count(),
    };
    write_json(&ctx.dir.join("sweep_summary.json"), &summary)?;
    for r in &out {
        println!(
            "c = {:+.6}: predicted {:?}, observed {}{}",
            r.c,
            r.predicted_class,
            r.observed_class.map_or_else(|| "failed".to_string(), |k| format!("{k:?}")),
            if r.low_confidence { " (low confidence)" } else { "" }
        );
    }
    if summary.failures > 0 {
        return Err(Failure::Computation(format!("{} of {} sweep rows failed", summary.failures, summary.rows)));
    }
    Ok(())
}
