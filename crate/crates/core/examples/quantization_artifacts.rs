//! Without dither, 1-bit samples of a target at a quarter of the range limit
//! repeat every four samples and the angle estimate locks onto a few values.
//! Dither breaks the repetition.

use qbr::prelude::*;

fn main() -> qbr::Result<()> {
    let cfg = RadarConfig::default();
    let phi = build_phi(&cfg);
    let bin = cfg.nearest_bin(cfg.max_range() / 4.0);
    for phase in [0.4, 1.9, 3.5, 5.0] {
        let scene = Scene::new(vec![Target { range_bin: bin, angle: 40f64.to_radians(), amplitude: 1.0, phase }]);
        let (gamma, _) = synthesize(&cfg, &scene)?;
        let mut line = format!("phase {phase:.1}:");
        for alpha in [0.0, 1.0] {
            let q = AdaptiveQuantizer { alpha, ..Default::default() };
            let angles: Vec<f64> = (0..5)
                .map(|s| {
                    let z = q.quantize(&gamma, s)?.z;
                    Ok(localize(&phi, z.view(), 1, &cfg)?.targets[0].angle.to_degrees())
                })
                .collect::<qbr::Result<_>>()?;
            line += &format!("  α={alpha}: {:?}", angles.iter().map(|a| format!("{a:.1}")).collect::<Vec<_>>());
        }
        println!("{line}");
    }
    println!("true angle 40.0 deg at {:.2} m", cfg.range_of_bin(bin));
    Ok(())
}
