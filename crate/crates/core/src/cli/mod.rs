//! Command-line surface: configuration, recorded data and subcommand dispatch.

pub mod config;
pub mod dataset;

use clap::{Parser, Subcommand};
use ndarray::Array2;
use num_complex::Complex64;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::analysis::{empirical_lpd, empirical_rip, sparse_one_bit_delta};
use crate::error::{Error, Result};
use crate::montecarlo::{
    alpha_csv, alpha_summary, alpha_sweep, decay_csv, decay_curve, frame_dither_seed, localize_frames, run_experiment,
    sensing_for, synthetic_frames, threads_from_env, Experiment, Profile, SweepData,
};
use crate::pbp::Estimate;
use crate::quantizer::{QuantizerConfig, FULL_RESOLUTION_BITS};
use crate::radar_model::{RadarConfig, Scene, Target};
use crate::seed::rng_from;

pub use config::{parse_config, parse_config_str, Config};
pub use dataset::{ingest_recorded, parse_dataset, RecordedDataset};

#[derive(Debug, Parser)]
#[command(name = "qbr", version, about = "Quantized two-antenna FMCW radar localization")]
pub struct Cli {
    /// TOML configuration file; defaults apply when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub runs: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub profile: Option<ProfileArg>,
    /// Measurement counts, comma separated.
    #[arg(long = "M", global = true, value_delimiter = ',')]
    pub m: Vec<usize>,
    /// Dither weights, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    pub alpha: Vec<f64>,
    /// Write the raw observations as a dataset file.
    #[arg(long, global = true)]
    pub dump: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Worker threads; overrides QBR_THREADS (0 = all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum ProfileArg {
    Desk,
    Paper,
}

impl From<ProfileArg> for Profile {
    fn from(p: ProfileArg) -> Self {
        match p {
            ProfileArg::Desk => Profile::Desk,
            ProfileArg::Paper => Profile::Paper,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Synthesize, quantize and localize one scene.
    Simulate {
        /// Scene file with `[[targets]]` records; overrides the config scene.
        #[arg(long)]
        scene: Option<PathBuf>,
        /// Number of acquisitions of the scene.
        #[arg(long, default_value_t = 1)]
        frames: usize,
    },
    /// Monte Carlo error maps.
    McMap,
    /// Reconstruction error against the number of measurements.
    Decay,
    /// Localization error against the dither weight.
    AlphaSweep {
        /// Recorded dataset to sweep instead of synthetic frames.
        #[arg(long)]
        data: Option<PathBuf>,
    },
    /// Per-frame estimates from a recorded dataset.
    Localize {
        data: PathBuf,
        /// Number of targets to keep; defaults to the configured sparsity.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Sampled restricted isometry constant of the sensing matrix.
    CheckRip,
    /// Sampled projection distortion of the quantized map.
    CheckLpd,
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Loads the configuration and applies command-line overrides.
pub fn resolve_config(cli: &Cli) -> Result<Config> {
    let mut cfg = match &cli.config {
        Some(p) => parse_config(p)?,
        None => Config::default(),
    };
    if let Some(p) = cli.profile {
        let profile = Profile::from(p);
        let (rc, ac) = profile.grid();
        cfg.profile = profile;
        cfg.experiment.range_cells = rc;
        cfg.experiment.angle_cells = ac;
        cfg.experiment.runs = profile.runs(cfg.experiment.sparsity);
    }
    if let Some(r) = cli.runs {
        cfg.experiment.runs = r;
    }
    if let Some(s) = cli.seed {
        cfg.experiment.seed = s;
        cfg.quantizer.seed = s;
    }
    if !cli.m.is_empty() {
        cfg.m_list = cli.m.clone();
    }
    if !cli.alpha.is_empty() {
        cfg.alphas = cli.alpha.clone();
        cfg.quantizer.alpha = cli.alpha[0];
        cfg.experiment.alpha = cli.alpha[0];
    }
    cfg.validate()?;
    Ok(cfg)
}

fn threads(cli: &Cli) -> usize {
    cli.threads.unwrap_or_else(threads_from_env)
}

fn write_out(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, contents)?;
    log::info!("wrote {}", path.display());
    Ok(path)
}

/// Applies `--M` to commands that take a single measurement count.
fn single_m(cli: &Cli, cfg: &Config) -> Result<RadarConfig> {
    let radar = match cli.m.as_slice() {
        [] => cfg.radar,
        [m] => cfg.radar.with_num_freqs(*m),
        _ => return Err(Error::Validation(vec!["this command takes a single --M value".into()])),
    };
    radar.validate()?;
    Ok(radar)
}

pub fn dispatch(cli: &Cli) -> Result<()> {
    let cfg = resolve_config(cli)?;
    match &cli.command {
        Command::Simulate { scene, frames } => simulate(cli, &cfg, scene.as_deref(), *frames),
        Command::McMap => mc_map(cli, &cfg),
        Command::Decay => {
            let points = decay_curve(&cfg.experiment, &cfg.m_list, threads(cli))?;
            for p in &points {
                println!("M={} mean_error={:.6e}", p.m, p.mean_error);
            }
            write_out(&cli.out, "decay.csv", &decay_csv(&points))?;
            Ok(())
        }
        Command::AlphaSweep { data } => alpha_sweep_cmd(cli, &cfg, data.as_deref()),
        Command::Localize { data, k } => localize_cmd(cli, &cfg, data, *k),
        Command::CheckRip => check_rip(cli, &cfg),
        Command::CheckLpd => check_lpd(cli, &cfg),
    }
}

fn gamma_csv(gamma: &Array2<Complex64>) -> String {
    let mut s = String::from("m,re_a1,im_a1,re_a2,im_a2\n");
    for (m, r) in gamma.rows().into_iter().enumerate() {
        let _ = writeln!(s, "{m},{:.16e},{:.16e},{:.16e},{:.16e}", r[0].re, r[0].im, r[1].re, r[1].im);
    }
    s
}

/// `frame,range_m,angle_deg,magnitude` for every detected target.
pub fn frame_estimates_csv(estimates: &[Estimate]) -> String {
    let mut s = String::from("frame,range_m,angle_deg,magnitude\n");
    for (f, est) in estimates.iter().enumerate() {
        for t in &est.targets {
            let _ = writeln!(s, "{f},{:.16e},{:.16e},{:.16e}", t.range, t.angle.to_degrees(), t.magnitude);
        }
    }
    s
}

/// Mean and two-sigma spread of one tracked target over frames.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetStats {
    pub mean_range: f64,
    pub two_sigma_range: f64,
    /// Radians.
    pub mean_angle: f64,
    pub two_sigma_angle: f64,
    pub frames: usize,
}

fn mean_two_sigma(v: &[f64]) -> (f64, f64) {
    let n = v.len().max(1) as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, 2.0 * var.sqrt())
}

/// Per-target statistics over frames. Detections in each frame are ordered by
/// range and the i-th detection is attributed to track i.
pub fn frame_statistics(estimates: &[Estimate]) -> Vec<TargetStats> {
    let k = estimates.iter().map(|e| e.targets.len()).max().unwrap_or(0);
    (0..k)
        .map(|i| {
            let mut ranges = Vec::new();
            let mut angles = Vec::new();
            for est in estimates {
                let mut ts: Vec<_> = est.targets.iter().collect();
                ts.sort_by(|a, b| a.range.total_cmp(&b.range));
                if let Some(t) = ts.get(i) {
                    ranges.push(t.range);
                    angles.push(t.angle);
                }
            }
            let (mean_range, two_sigma_range) = mean_two_sigma(&ranges);
            let (mean_angle, two_sigma_angle) = mean_two_sigma(&angles);
            TargetStats {
                mean_range,
                two_sigma_range,
                mean_angle,
                two_sigma_angle,
                frames: ranges.len(),
            }
        })
        .collect()
}

pub fn stats_csv(stats: &[TargetStats]) -> String {
    let mut s = String::from("track,mean_range_m,two_sigma_range_m,mean_angle_deg,two_sigma_angle_deg,frames\n");
    for (i, t) in stats.iter().enumerate() {
        let _ = writeln!(
            s,
            "{i},{:.16e},{:.16e},{:.16e},{:.16e},{}",
            t.mean_range,
            t.two_sigma_range,
            t.mean_angle.to_degrees(),
            t.two_sigma_angle.to_degrees(),
            t.frames
        );
    }
    s
}

/// Two-target scene used when the α-sweep has no configured scene: a strong
/// target at 4.8 m and a weaker one further out at a different angle.
pub fn default_sweep_scene(cfg: &RadarConfig) -> Scene {
    let near = cfg.nearest_bin(4.8);
    let far = cfg.nearest_bin(12.0).max(near + 2).min(cfg.num_ranges - 1);
    Scene::new(vec![
        Target {
            range_bin: near,
            angle: 20f64.to_radians(),
            amplitude: 1.0,
            phase: 0.0,
        },
        Target {
            range_bin: far,
            angle: (-25f64).to_radians(),
            amplitude: 0.35,
            phase: 1.0,
        },
    ])
}

fn simulate(cli: &Cli, cfg: &Config, scene_path: Option<&Path>, frames: usize) -> Result<()> {
    let radar = single_m(cli, cfg)?;
    let scene = match (scene_path, &cfg.scene) {
        (Some(p), _) => config::parse_scene(p)?,
        (None, Some(s)) => s.clone(),
        (None, None) => {
            let spec = crate::montecarlo::ExperimentSpec { radar, ..cfg.experiment };
            Experiment::new(spec)?.draw_scene(0).scene
        }
    };
    scene.validate(radar.num_ranges)?;
    if frames == 0 {
        return Err(Error::Validation(vec!["frames must be positive".into()]));
    }
    let seed = cfg.experiment.seed;
    let quantizer = crate::montecarlo::ExperimentSpec { radar, ..cfg.experiment }.quantizer();
    let gammas = synthetic_frames(&radar, &scene, frames, cfg.experiment.snr_db, seed)?;
    let estimates = localize_frames(&radar, &gammas, scene.sparsity().max(1), &quantizer, seed)?;
    let z = quantizer.quantize(&gammas[0], frame_dither_seed(seed, 0))?;

    write_out(&cli.out, "scene.toml", &config::scene_to_toml(&scene))?;
    write_out(&cli.out, "gamma.csv", &gamma_csv(&gammas[0]))?;
    write_out(&cli.out, "z.csv", &gamma_csv(&z.z))?;
    write_out(&cli.out, "estimates.csv", &frame_estimates_csv(&estimates))?;
    if let Some(path) = &cli.dump {
        RecordedDataset::new(radar, "simulate", gammas)?.write(path)?;
        log::info!("dumped {frames} frames to {}", path.display());
    }
    println!("delta={:.6e}", z.delta);
    for t in &estimates[0].targets {
        println!("range={:.4} m angle={:.3} deg magnitude={:.4e}", t.range, t.angle.to_degrees(), t.magnitude);
    }
    Ok(())
}

fn mc_map(cli: &Cli, cfg: &Config) -> Result<()> {
    let radar = single_m(cli, cfg)?;
    let spec = crate::montecarlo::ExperimentSpec { radar, ..cfg.experiment };
    let result = run_experiment(&spec, threads(cli))?;
    write_out(&cli.out, "error_map.csv", &result.overall.to_csv())?;
    if let Some(m) = &result.strongest {
        write_out(&cli.out, "error_map_strongest.csv", &m.to_csv())?;
    }
    if let Some(m) = &result.weakest {
        write_out(&cli.out, "error_map_weakest.csv", &m.to_csv())?;
    }
    println!(
        "runs={} mean_position_error={:.6e} mean_signal_error={:.6e} empty_cells={}",
        spec.runs,
        result.mean_error,
        result.mean_signal_error,
        result.overall.empty_cells()
    );
    Ok(())
}

fn alpha_sweep_cmd(cli: &Cli, cfg: &Config, data: Option<&Path>) -> Result<()> {
    let recorded = data.map(ingest_recorded).transpose()?;
    let radar = match &recorded {
        Some(ds) => ds.header.radar,
        None => single_m(cli, cfg)?,
    };
    let scene = cfg.scene.clone().unwrap_or_else(|| default_sweep_scene(&radar));
    let spec = crate::montecarlo::ExperimentSpec {
        radar,
        sparsity: scene.sparsity(),
        snr_db: cfg.experiment.snr_db.or(Some(15.0)),
        ..cfg.experiment
    };
    let source = match &recorded {
        Some(ds) => SweepData::Recorded(&ds.frames),
        None => SweepData::Synthetic {
            frames: cfg.frames,
            snr_db: spec.snr_db,
        },
    };
    let points = alpha_sweep(&spec, &scene, &cfg.alphas, source)?;
    for (alpha, worst_detection, mean) in alpha_summary(&points) {
        println!("alpha={alpha} worst_detection_rate={worst_detection:.3} mean_error={mean:.4e}");
    }
    write_out(&cli.out, "alpha_sweep.csv", &alpha_csv(&points))?;
    Ok(())
}

fn localize_cmd(cli: &Cli, cfg: &Config, data: &Path, k: Option<usize>) -> Result<()> {
    let ds = ingest_recorded(data)?;
    let radar = ds.header.radar;
    if cfg.alphas.len() > 1 && !cli.alpha.is_empty() {
        log::warn!("localize uses only the first --alpha value");
    }
    let quantizer = crate::montecarlo::ExperimentSpec { radar, ..cfg.experiment }.quantizer();
    let k = k.unwrap_or(cfg.experiment.sparsity);
    let estimates = localize_frames(&radar, &ds.frames, k, &quantizer, cfg.experiment.seed)?;
    let stats = frame_statistics(&estimates);
    write_out(&cli.out, "estimates.csv", &frame_estimates_csv(&estimates))?;
    write_out(&cli.out, "target_stats.csv", &stats_csv(&stats))?;
    for (i, t) in stats.iter().enumerate() {
        println!(
            "track {i}: range {:.3} ± {:.3} m, angle {:.2} ± {:.2} deg over {} frames",
            t.mean_range,
            t.two_sigma_range,
            t.mean_angle.to_degrees(),
            t.two_sigma_angle.to_degrees(),
            t.frames
        );
    }
    Ok(())
}

fn measurement_list(cli: &Cli, cfg: &Config) -> Vec<usize> {
    if cli.m.is_empty() {
        vec![cfg.radar.num_freqs]
    } else {
        cli.m.clone()
    }
}

fn check_rip(cli: &Cli, cfg: &Config) -> Result<()> {
    let k = cfg.experiment.sparsity;
    let mut reports = Vec::new();
    for (i, m) in measurement_list(cli, cfg).into_iter().enumerate() {
        let (_, phi) = sensing_for(&cfg.radar, m, cfg.experiment.seed)?;
        let mut rng = rng_from(cfg.experiment.seed, i as u64);
        let r = empirical_rip(&phi, k, cfg.trials, &mut rng);
        println!("M={} K={} epsilon_hat={:.6e}", r.measurements, r.sparsity, r.epsilon_hat);
        reports.push(r);
    }
    let json = serde_json::to_string_pretty(&reports).map_err(|e| Error::Format(e.to_string()))?;
    write_out(&cli.out, "rip.json", &json)?;
    Ok(())
}

/// Quantization width for the LPD check when none is configured: wide enough
/// that no unit-norm `k`-sparse input saturates.
fn lpd_delta(cfg: &Config, k: usize) -> f64 {
    let margin = cfg.experiment.delta_margin;
    match cfg.quantizer.bit_depth {
        b if b >= FULL_RESOLUTION_BITS => 1.0,
        1 => sparse_one_bit_delta(k, margin),
        b => sparse_one_bit_delta(k, margin) / ((1u64 << b) - 1) as f64,
    }
}

fn check_lpd(cli: &Cli, cfg: &Config) -> Result<()> {
    let k = cfg.experiment.sparsity;
    let delta = cfg.fixed_delta.unwrap_or_else(|| lpd_delta(cfg, k));
    let alphas = if cli.alpha.is_empty() { vec![cfg.quantizer.alpha] } else { cli.alpha.clone() };
    let mut reports = Vec::new();
    for (i, m) in measurement_list(cli, cfg).into_iter().enumerate() {
        let (_, phi) = sensing_for(&cfg.radar, m, cfg.experiment.seed)?;
        for (j, &alpha) in alphas.iter().enumerate() {
            let q = QuantizerConfig { delta, alpha, ..cfg.quantizer };
            let mut rng = rng_from(cfg.experiment.seed, (i * alphas.len() + j) as u64);
            let r = empirical_lpd(&phi, &q, k, cfg.trials, &mut rng)?;
            println!("M={} K={} alpha={} delta={:.4e} nu_hat={:.6e}", r.measurements, k, alpha, delta, r.nu_hat);
            reports.push(r);
        }
    }
    let json = serde_json::to_string_pretty(&reports).map_err(|e| Error::Format(e.to_string()))?;
    write_out(&cli.out, "lpd.json", &json)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_apply() {
        let cli = Cli::try_parse_from(["qbr", "--seed", "9", "--runs", "12", "--alpha", "0,0.5", "mc-map"]).unwrap();
        let cfg = resolve_config(&cli).unwrap();
        assert_eq!(cfg.experiment.seed, 9);
        assert_eq!(cfg.experiment.runs, 12);
        assert_eq!(cfg.experiment.alpha, 0.0);
        assert_eq!(cfg.alphas, vec![0.0, 0.5]);
    }

    #[test]
    fn unknown_subcommand_is_a_usage_error() {
        assert_eq!(run(["qbr", "frobnicate"]), 2);
    }

    #[test]
    fn bad_alpha_flag_is_a_config_error() {
        let cli = Cli::try_parse_from(["qbr", "--alpha", "1.5", "mc-map"]).unwrap();
        assert!(matches!(resolve_config(&cli), Err(Error::Validation(_))));
    }

    #[test]
    fn default_scene_has_target_at_4_8_m() {
        let cfg = RadarConfig::default();
        let s = default_sweep_scene(&cfg);
        assert!((cfg.range_of_bin(s.targets[0].range_bin) - 4.8).abs() < 0.3);
        s.validate(cfg.num_ranges).unwrap();
    }
}
