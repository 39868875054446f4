//! Sampled restricted isometry and projection distortion constants.

use qbr::analysis::{empirical_lpd, empirical_rip, sparse_one_bit_delta};
use qbr::montecarlo::sensing_for;
use qbr::quantizer::QuantizerConfig;
use qbr::radar_model::RadarConfig;
use qbr::seed::rng_from;

fn main() -> qbr::Result<()> {
    let radar = RadarConfig::default();
    let k = 2;
    for m in [64, 128, 256, 512, 1024] {
        let (_, phi) = sensing_for(&radar, m, 1)?;
        let rip = empirical_rip(&phi, k, 2000, &mut rng_from(1, m as u64));
        let q = QuantizerConfig { delta: sparse_one_bit_delta(k, 1.0), bit_depth: 1, alpha: 1.0, ..Default::default() };
        let lpd = empirical_lpd(&phi, &q, k, 2000, &mut rng_from(2, m as u64))?;
        println!("M = {m:>4}: ε̂ = {:.3e}, ν̂ = {:.3e}", rip.epsilon_hat, lpd.nu_hat);
    }
    Ok(())
}
