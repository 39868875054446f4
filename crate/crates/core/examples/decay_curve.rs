//! Reconstruction error of 1-bit dithered PBP against the number of samples.

use qbr::montecarlo::{decay_curve, log_log_slope};
use qbr::prelude::*;

fn main() -> qbr::Result<()> {
    let spec = ExperimentSpec { runs: 300, seed: 2, ..ExperimentSpec::default() };
    let points = decay_curve(&spec, &[128, 256, 512, 1024, 2048], 0)?;
    for p in &points {
        println!("M = {:>4}: mean ‖X̂ - X‖ = {:.4e}", p.m, p.mean_error);
    }
    println!("log-log slope {:.3}", log_log_slope(&points));
    Ok(())
}
