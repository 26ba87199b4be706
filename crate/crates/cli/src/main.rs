//! `respicam` — estimate respiratory rate from chest-motion video clips.
//!
//! Subcommands: `run` (one configuration over a manifest), `matrix` (the full
//! 18-configuration benchmark) and `synth` (render a synthetic clip with a
//! known ground-truth rate).

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};

use respicam_core::runner::{per_subject_csv, render_table, CellResult};
use respicam_core::{
    manifest, run_matrix, runner, synth, DetectorKind, Error, Params, PipelineConfig, SynthSpec,
};

#[derive(Parser)]
#[command(
    name = "respicam",
    version,
    about = "Camera-based respiratory rate estimation"
)]
struct Cli {
    /// TOML parameter file (missing keys keep their defaults).
    #[arg(long, global = true, value_name = "FILE")]
    config_file: Option<PathBuf>,

    /// Parameter override, e.g. --set signal.high_hz=0.5 (repeatable).
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum DetectorArg {
    Harris,
    Shitomasi,
}

impl From<DetectorArg> for DetectorKind {
    fn from(d: DetectorArg) -> DetectorKind {
        match d {
            DetectorArg::Harris => DetectorKind::Harris,
            DetectorArg::Shitomasi => DetectorKind::ShiTomasi,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration over every subject in a manifest.
    Run {
        #[arg(long, value_name = "MANIFEST")]
        manifest: PathBuf,
        /// Filter/size acronym: FLBM FLBL FLBS LPBM LPBL LPBS SOBM SOBL SOBS.
        #[arg(long, value_name = "ACRONYM")]
        config: String,
        #[arg(long, value_enum)]
        detector: DetectorArg,
        /// Per-subject results CSV.
        #[arg(long, default_value = "results.csv")]
        out: PathBuf,
    },
    /// Evaluate all 18 configurations and write the report CSVs.
    Matrix {
        #[arg(long, value_name = "MANIFEST")]
        manifest: PathBuf,
        /// Output directory for static.csv / dynamic.csv / per_subject.csv.
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
    },
    /// Render a synthetic clip plus a single-subject manifest.
    Synth {
        /// Ground-truth respiratory rate in breaths per minute.
        #[arg(long)]
        rr: f64,
        /// Clip length in seconds.
        #[arg(long, default_value_t = 60.0)]
        duration: f64,
        #[arg(long, default_value_t = 30.0)]
        fps: f64,
        /// Breathing motion amplitude in pixels.
        #[arg(long, default_value_t = 2.0)]
        amplitude: f64,
        /// Additive Gaussian pixel noise sigma.
        #[arg(long, default_value_t = 2.0)]
        noise: f64,
        /// Vertical drift in px/s (marks the clip dynamic).
        #[arg(long, default_value_t = 0.0)]
        drift: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Synthetic face box side in pixels; clips with drift need
        /// face >= drift*duration plus some margin to stay trackable.
        #[arg(long, default_value_t = 48)]
        face: u32,
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
    },
}

fn load_params(cli: &Cli) -> anyhow::Result<Params> {
    let mut params = match &cli.config_file {
        Some(path) => Params::from_file(path).context("loading --config-file")?,
        None => Params::default(),
    };
    for assignment in &cli.overrides {
        params.apply_override(assignment)?;
    }
    Ok(params)
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    let params = load_params(&cli)?;
    match cli.command {
        Command::Run {
            manifest: manifest_path,
            config,
            detector,
            out,
        } => {
            let cfg = PipelineConfig::from_acronym(&config, detector.into())?;
            let records = manifest::load_manifest(&manifest_path)?;
            let cells: Vec<CellResult> = records
                .iter()
                .map(|rec| CellResult {
                    subject_id: rec.id.clone(),
                    condition: rec.condition,
                    config: cfg,
                    gt_rr_bpm: rec.gt_rr_bpm,
                    outcome: runner::run_config(rec, cfg, &params).map_err(|e| e.to_string()),
                })
                .collect();
            std::fs::write(&out, per_subject_csv(&cells))
                .with_context(|| format!("writing {}", out.display()))?;
            for cell in &cells {
                match &cell.outcome {
                    Ok(est) => println!(
                        "{}: {est:.2} bpm (gt {:.2}, err {:+.2})",
                        cell.subject_id,
                        cell.gt_rr_bpm,
                        est - cell.gt_rr_bpm
                    ),
                    Err(e) => println!("{}: FAILED ({e})", cell.subject_id),
                }
            }
            let pairs: Vec<(f64, f64)> = cells
                .iter()
                .filter_map(|c| c.outcome.as_ref().ok().map(|&e| (e, c.gt_rr_bpm)))
                .collect();
            if let Ok((mae, rmse, sd)) = respicam_core::metrics::compute_metrics(&pairs) {
                println!(
                    "{}: MAE {mae:.2}  RMSE {rmse:.2}  SD {sd:.2}  ({} subjects, {} failed)",
                    cfg.label(),
                    pairs.len(),
                    cells.len() - pairs.len()
                );
            }
            println!("wrote {}", out.display());
            Ok(if pairs.is_empty() { 3 } else { 0 })
        }
        Command::Matrix {
            manifest: manifest_path,
            out,
        } => {
            let table = run_matrix(&manifest_path, &out, &params)?;
            for (condition, rows) in &table.conditions {
                println!("== {} ==", condition.label());
                print!("{}", render_table(rows));
            }
            println!("reports written to {}", out.display());
            Ok(if table.all_failed() { 3 } else { 0 })
        }
        Command::Synth {
            rr,
            duration,
            fps,
            amplitude,
            noise,
            drift,
            seed,
            face,
            out,
        } => {
            let spec = SynthSpec {
                rr_bpm: rr,
                amplitude_px: amplitude,
                duration_s: duration,
                fps,
                noise_sigma: noise,
                texture_seed: seed,
                drift_px_per_s: drift,
                face_px: face,
            };
            let manifest_path = synth::synth_manifest(&[spec], &out)?;
            println!(
                "rendered {} frames at {fps} fps; manifest at {}",
                spec.n_frames(),
                manifest_path.display()
            );
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = match err.downcast_ref::<Error>() {
                Some(Error::ManifestError { .. }) => 2,
                _ => 1,
            };
            ExitCode::from(code)
        }
    }
}
