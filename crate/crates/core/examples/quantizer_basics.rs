//! Scalar quantization, weighted dither and the 1-bit regime.

use num_complex::Complex64;
use qbr::quantizer::{bit_budget, draw_dither, one_bit_delta, quantize_observations, quantize_scalar, QuantizerConfig};
use qbr::radar_model::{synthesize, RadarConfig, Scene, Target};

fn main() -> qbr::Result<()> {
    for lambda in [0.0, 0.3, -0.3, 1.7] {
        println!("Q({lambda:+.1}) with δ = 1: {:+.1}", quantize_scalar(lambda, 1.0)?);
    }

    // Averaging dithered quantizations recovers values between grid points.
    let lambda = 0.3;
    let xi = draw_dither(100_000, 1.0, 1.0, 7);
    let mean = xi.iter().map(|d| quantize_scalar(lambda + d.re, 1.0)).sum::<qbr::Result<f64>>()? / xi.len() as f64;
    println!("mean of Q(0.3 + ξ) over 1e5 draws: {mean:.4}");

    let cfg = RadarConfig::default();
    let scene = Scene::new(vec![Target { range_bin: 42, angle: 0.4, amplitude: 1.0, phase: 0.0 }]);
    let (gamma, _) = synthesize(&cfg, &scene)?;
    let delta = one_bit_delta(&gamma, 1.0)?;
    let q = QuantizerConfig { delta, bit_depth: 1, alpha: 1.0, seed: 1, ..Default::default() };
    let z = quantize_observations(&gamma, &q)?;
    let levels: std::collections::BTreeSet<String> =
        z.z.iter().flat_map(|c: &Complex64| [c.re, c.im]).map(|v| format!("{v:+.4}")).collect();
    println!("1-bit width δ = {delta:.4}; output levels {levels:?}");

    for (m, b) in [(512, 1), (16, 32), (256, 32)] {
        println!("M = {m:>3}, b = {b:>2}: {:>5} bits per antenna", bit_budget(m, b));
    }
    Ok(())
}
