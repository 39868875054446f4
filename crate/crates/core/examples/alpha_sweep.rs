//! Dither weight sweep on noisy synthetic frames of a two-target scene.

use qbr::cli::default_sweep_scene;
use qbr::montecarlo::{alpha_summary, alpha_sweep, SweepData};
use qbr::prelude::*;

fn main() -> qbr::Result<()> {
    let cfg = RadarConfig::default();
    let scene = default_sweep_scene(&cfg);
    let spec = ExperimentSpec { sparsity: 2, seed: 4, ..ExperimentSpec::default() };
    let alphas: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
    let points = alpha_sweep(&spec, &scene, &alphas, SweepData::Synthetic { frames: 106, snr_db: Some(15.0) })?;
    println!(" alpha  both-found  mean error (m)");
    for (alpha, worst, mean) in alpha_summary(&points) {
        println!("{alpha:>6.1}  {:>9.1}%  {mean:>13.3}", worst * 100.0);
    }
    Ok(())
}
