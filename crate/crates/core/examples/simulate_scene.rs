//! Builds the sensing matrix for the default K-band setup and synthesizes the
//! raw two-antenna samples of a three-target scene.

use qbr::prelude::*;
use qbr::radar_model::{build_gain, frequency_grid, range_grid};

fn main() -> qbr::Result<()> {
    let cfg = RadarConfig::default();
    let ranges = range_grid(&cfg);
    let freqs = frequency_grid(&cfg);
    println!(
        "N = {} ranges, {:.4} m apart, up to {:.2} m; M = {} samples from {:.3} GHz to {:.3} GHz",
        cfg.num_ranges,
        cfg.range_resolution(),
        ranges[cfg.num_ranges - 1],
        cfg.num_freqs,
        freqs[0] / 1e9,
        freqs[cfg.sweep_samples - 1] / 1e9
    );

    let scene = Scene::new(vec![
        Target { range_bin: 20, angle: 10f64.to_radians(), amplitude: 1.0, phase: 0.3 },
        Target { range_bin: 75, angle: -35f64.to_radians(), amplitude: 0.6, phase: 2.0 },
        Target { range_bin: 180, angle: 55f64.to_radians(), amplitude: 0.3, phase: 4.1 },
    ]);
    let (gamma, x) = synthesize(&cfg, &scene)?;
    let gain = build_gain(&cfg, &scene);

    for t in &scene.targets {
        let n = t.range_bin;
        let dphi = (x.0[[n, 1]] * x.0[[n, 0]].conj()).arg();
        println!(
            "bin {n:>3} at {:>7.3} m, {:>6.1} deg: G = {:.3}, antenna phase difference {:+.4} rad",
            cfg.range_of_bin(n),
            t.angle.to_degrees(),
            gain[n],
            dphi
        );
    }
    let power: f64 = gamma.iter().map(|z| z.norm_sqr()).sum::<f64>() / gamma.len() as f64;
    println!("Γ is {}x{}, mean sample power {power:.4}", gamma.nrows(), gamma.ncols());
    Ok(())
}
