//! Localizes two targets from 1-bit dithered samples with projected back projection.

use qbr::metrics::position_error;
use qbr::prelude::*;

fn main() -> qbr::Result<()> {
    let cfg = RadarConfig::default();
    let phi = build_phi(&cfg);
    let scene = Scene::new(vec![
        Target { range_bin: 30, angle: 25f64.to_radians(), amplitude: 1.0, phase: 0.0 },
        Target { range_bin: 110, angle: -40f64.to_radians(), amplitude: 0.7, phase: 1.2 },
    ]);
    let (gamma, x) = synthesize(&cfg, &scene)?;

    for (label, q) in [
        ("32-bit", AdaptiveQuantizer { bit_depth: 32, alpha: 0.0, ..Default::default() }),
        ("1-bit dithered", AdaptiveQuantizer::default()),
    ] {
        let z = q.quantize(&gamma, 3)?;
        let est = localize(&phi, z.z.view(), scene.sparsity(), &cfg)?;
        println!("{label}: ‖X̂ - X‖ = {:.4}", SignalMatrix(est.x_hat.clone()).frobenius_distance(&x));
        for t in &est.targets {
            println!("  bin {:>3}: {:>7.3} m, {:>7.2} deg", t.range_bin, t.range, t.angle.to_degrees());
        }
        for t in &scene.targets {
            let err = position_error((cfg.range_of_bin(t.range_bin), t.angle), &est.positions())?;
            println!("  target at bin {:>3}: position error {err:.3} m", t.range_bin);
        }
    }
    Ok(())
}
