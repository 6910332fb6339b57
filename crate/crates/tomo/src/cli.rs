//! Batch command-line driver.
//!
//! Five subcommands share one JSON config schema: `forward` solves a single
//! traveltime field on the sharp truth, `gen-data` synthesizes observations
//! on a refined grid, `invert` runs the phase-field descent against an
//! observation file, `profile` tabulates the 1-D interface profile, and
//! `param-study` repeats the whole generate-and-invert pipeline while one
//! parameter sweeps a value list.
//!
//! Every command writes `summary.json` carrying the fully resolved
//! configuration (including derived ε and δ) next to its data files, so an
//! output directory is self-describing. Study tables report the normalized
//! regularizer σ𝓙/P — the per-unit-length convention under which a clean
//! interface of length L contributes σ·L — and `objective` in those tables
//! is misfit + σ𝓙/P.

use crate::config::{self, Resolved, RunConfig};
use crate::descent::{self, DescentResult};
use crate::error::Result;
use crate::fem::lumped_mass;
use crate::grid::Grid;
use crate::obs::Observations;
use crate::phase_field::{self, InverseProblem};
use crate::profile;
use crate::scenario;
use crate::{eikonal, io, obs};
use std::path::{Path, PathBuf};

#[derive(clap::Parser)]
#[command(
    name = "tomo",
    version,
    about = "Recover a binary slowness field from first-arrival traveltimes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(clap::Args)]
pub struct Common {
    /// JSON run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Directory receiving all output files (created if missing).
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Dotted-path config override, e.g. `--set model.gamma=1e-3`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

#[derive(clap::Subcommand)]
pub enum Command {
    /// Solve one traveltime field on the sharp truth and write T.csv.
    Forward(Common),
    /// Generate synthetic observations on a refined grid into obs.json.
    GenData(Common),
    /// Invert an observation file; writes u/w/s/history CSVs and a summary.
    Invert {
        #[command(flatten)]
        common: Common,
        /// Observations produced by gen-data.
        #[arg(long)]
        obs: PathBuf,
    },
    /// Tabulate the 1-D interface profile and its constants.
    Profile(Common),
    /// Re-run the generate-and-invert pipeline over a list of values.
    ParamStudy {
        #[command(flatten)]
        common: Common,
        /// Which parameter the values replace.
        #[arg(long, value_enum)]
        vary: Vary,
        /// Comma-separated values, e.g. `--values 4,6,8,10,12,14`.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Vary {
    /// Interface width in units of ħ (`model.width`).
    Width,
    /// Curvature weight (`model.gamma`).
    Gamma,
    /// Regularization weight (`model.sigma`).
    Sigma,
    /// Observation noise; sets both `data.nu` and `model.nu`.
    Noise,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Forward(c) => cmd_forward(&prepare(&c)?, &c.out_dir),
        Command::GenData(c) => cmd_gen_data(&prepare(&c)?, &c.out_dir),
        Command::Invert { common: c, obs } => cmd_invert(&prepare(&c)?, &obs, &c.out_dir),
        Command::Profile(c) => cmd_profile(&prepare(&c)?, &c.out_dir),
        Command::ParamStudy { common: c, vary, values } => {
            std::fs::create_dir_all(&c.out_dir)?;
            let base = config::load(&c.config, &c.set)?;
            cmd_param_study(base, vary, &values, &c.out_dir)
        }
    }
}

fn prepare(c: &Common) -> Result<Resolved> {
    std::fs::create_dir_all(&c.out_dir)?;
    config::load(&c.config, &c.set)?.resolve()
}

fn write_summary(out_dir: &Path, r: &Resolved, run: serde_json::Value) -> Result<()> {
    let mut summary = r.summary();
    summary["run"] = run;
    io::write_json(&out_dir.join("summary.json"), &summary)
}

pub fn cmd_forward(r: &Resolved, out_dir: &Path) -> Result<()> {
    let source = r.single_source()?;
    let mut grid = r.grid.clone();
    grid.source = source;
    let slowness = r.truth.sample(&grid);
    let fmm = eikonal::solve(&grid, &slowness, source)?;
    io::write_grid_field(&out_dir.join("T.csv"), &grid, &fmm.times)?;

    // The latest-arriving node is worth surfacing: where it sits (interior
    // vs boundary) shows whether the obstacle shields part of the domain.
    let last = *fmm.order.last().expect("grid has at least one node");
    write_summary(
        out_dir,
        r,
        serde_json::json!({
            "command": "forward",
            "source": grid.coords(source),
            "t_max": fmm.times[last],
            "t_max_at": grid.coords(last),
            "t_max_on_boundary": grid.is_boundary(last),
        }),
    )
}

pub fn cmd_gen_data(r: &Resolved, out_dir: &Path) -> Result<()> {
    let observations = generate_observations(r)?;
    observations.save(&out_dir.join("obs.json"))?;
    let d = &r.config.data;
    write_summary(
        out_dir,
        r,
        serde_json::json!({
            "command": "gen-data",
            "n_sources": observations.sources.len(),
            "n_receivers": r.seg.nodes.len(),
            "fine_h": r.grid.h / d.refine as f64,
            "nu": d.nu,
            "seed": d.seed,
        }),
    )
}

fn generate_observations(r: &Resolved) -> Result<Observations> {
    let d = &r.config.data;
    obs::generate(
        &r.truth,
        &r.experiment,
        r.grid.lx,
        r.grid.lz,
        r.grid.h,
        d.refine,
        d.nu,
        d.seed,
    )
}

pub fn cmd_invert(r: &Resolved, obs_path: &Path, out_dir: &Path) -> Result<()> {
    let observations = Observations::load(obs_path)?;
    let pr = r.problem(&observations)?;
    let res = descent::run(&pr, r.initial_u(), &r.descent)?;
    write_inversion_files(&pr, &res, out_dir)?;
    write_summary(out_dir, r, invert_report(r, &pr, &res))
}

fn write_inversion_files(pr: &InverseProblem, res: &DescentResult, out_dir: &Path) -> Result<()> {
    io::write_mesh_field(&out_dir.join("u.csv"), &pr.mesh, &res.u)?;
    io::write_mesh_field(&out_dir.join("w.csv"), &pr.mesh, &res.w)?;
    let s = phase_field::slowness_from_u(&pr.basis, &res.u, &pr.params);
    io::write_grid_field_shortest(&out_dir.join("s.csv"), &pr.grid, &s)?;
    io::write_history(&out_dir.join("history.csv"), &res.history)
}

fn invert_report(r: &Resolved, pr: &InverseProblem, res: &DescentResult) -> serde_json::Value {
    let lumped = lumped_mass(&pr.mass);
    let perimeter = phase_field::perimeter_estimate(res.final_eval.j_unscaled, r.p_gamma);
    serde_json::json!({
        "command": "invert",
        "stop": io::stop_reason_label(res.stop),
        "iterations": res.history.len(),
        "objective": res.final_eval.objective,
        "misfit": res.final_eval.misfit,
        "regularizer": res.final_eval.regularizer,
        "regularizer_normalized": pr.params.sigma * perimeter,
        "perimeter_estimate": perimeter,
        "misclassified_area": scenario::misclassified_area(&pr.mesh, &lumped, &res.u, &r.truth),
    })
}

pub fn cmd_profile(r: &Resolved, out_dir: &Path) -> Result<()> {
    let pd = profile::build(r.config.model.gamma)?;
    let n = 2001;
    let span = 1.2 * pd.delta;
    io::write_table(
        &out_dir.join("profile.csv"),
        "t,z,dz,ddz",
        (0..n).map(|k| {
            let t = -span + 2.0 * span * k as f64 / (n - 1) as f64;
            let (z, dz, ddz) = profile::profile_eval(&pd, t);
            vec![t, z, dz, ddz]
        }),
    )?;
    write_summary(
        out_dir,
        r,
        serde_json::json!({
            "command": "profile",
            "lambda1": pd.lambda1,
            "lambda2": pd.lambda2,
            "delta": pd.delta,
            "p_gamma": pd.p_gamma,
            "delta_residual": profile::delta_residual(&pd),
            "epsilon": r.params.epsilon,
        }),
    )
}

/// One completed study entry.
struct StudyRow {
    value: f64,
    misfit: f64,
    /// σ𝓙/P — length-normalized regularizer as reported in study tables.
    regularizer: f64,
    perimeter_estimate: f64,
    misclassified_area: f64,
    iterations: usize,
    stop: &'static str,
}

impl StudyRow {
    fn objective(&self) -> f64 {
        self.misfit + self.regularizer
    }
}

fn apply_vary(cfg: &mut RunConfig, vary: Vary, value: f64) {
    match vary {
        Vary::Width => {
            cfg.model.width = Some(value);
            cfg.model.epsilon = None;
        }
        Vary::Gamma => cfg.model.gamma = value,
        Vary::Sigma => cfg.model.sigma = value,
        Vary::Noise => {
            cfg.data.nu = value;
            cfg.model.nu = if value > 0.0 { value } else { 1.0 };
        }
    }
}

fn run_study_entry(base: &RunConfig, vary: Vary, value: f64) -> Result<StudyRow> {
    let mut cfg = base.clone();
    apply_vary(&mut cfg, vary, value);
    let r = cfg.resolve()?;
    let observations = generate_observations(&r)?;
    let pr = r.problem(&observations)?;
    let res = descent::run(&pr, r.initial_u(), &r.descent)?;
    let lumped = lumped_mass(&pr.mass);
    let perimeter = phase_field::perimeter_estimate(res.final_eval.j_unscaled, r.p_gamma);
    Ok(StudyRow {
        value,
        misfit: res.final_eval.misfit,
        regularizer: pr.params.sigma * perimeter,
        perimeter_estimate: perimeter,
        misclassified_area: scenario::misclassified_area(&pr.mesh, &lumped, &res.u, &r.truth),
        iterations: res.history.len(),
        stop: io::stop_reason_label(res.stop),
    })
}

pub fn cmd_param_study(base: RunConfig, vary: Vary, values: &[f64], out_dir: &Path) -> Result<()> {
    let rows: Vec<StudyRow> = std::thread::scope(|scope| {
        let base = &base;
        let handles: Vec<_> = values
            .iter()
            .map(|&v| scope.spawn(move || run_study_entry(base, vary, v)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("study worker panicked"))
            .collect::<Result<_>>()
    })?;

    io::write_table(
        &out_dir.join("study.csv"),
        "value,misfit,regularizer,objective,perimeter_estimate,misclassified_area,iterations",
        rows.iter().map(|row| {
            vec![
                row.value,
                row.misfit,
                row.regularizer,
                row.objective(),
                row.perimeter_estimate,
                row.misclassified_area,
                row.iterations as f64,
            ]
        }),
    )?;

    // The study summary echoes the base config; per-entry resolved values
    // (ε and effective σ differ per row) are recoverable from the config
    // plus each row's value.
    let entries: Vec<serde_json::Value> = rows
        .iter()
        .map(|row| {
            serde_json::json!({
                "value": row.value,
                "misfit": row.misfit,
                "regularizer": row.regularizer,
                "objective": row.objective(),
                "perimeter_estimate": row.perimeter_estimate,
                "misclassified_area": row.misclassified_area,
                "iterations": row.iterations,
                "stop": row.stop,
            })
        })
        .collect();
    let summary = serde_json::json!({
        "config": base,
        "run": {
            "command": "param-study",
            "vary": format!("{vary:?}").to_lowercase(),
            "entries": entries,
        },
    });
    io::write_json(&out_dir.join("summary.json"), &summary)
}

/// Latest-arrival report reused by contrast sweeps: solves the forward
/// problem and returns (max time, its node, whether that node is on the
/// domain boundary).
pub fn latest_arrival(grid: &Grid, slowness: &[f64], source: usize) -> Result<(f64, usize, bool)> {
    let fmm = eikonal::solve(grid, slowness, source)?;
    let last = *fmm.order.last().expect("grid has at least one node");
    Ok((fmm.times[last], last, grid.is_boundary(last)))
}
