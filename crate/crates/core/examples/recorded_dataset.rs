//! Writes noisy frames in the dataset format, reads them back, localizes each
//! frame and reports the per-target mean and two-sigma spread.

use qbr::cli::{default_sweep_scene, frame_statistics, ingest_recorded, RecordedDataset};
use qbr::montecarlo::{localize_frames, synthetic_frames};
use qbr::prelude::*;

fn main() -> qbr::Result<()> {
    let cfg = RadarConfig::default();
    let scene = default_sweep_scene(&cfg);
    let frames = synthetic_frames(&cfg, &scene, 106, Some(15.0), 5)?;
    let dir = std::env::temp_dir().join("qbr-dataset-example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("two_targets.txt");
    RecordedDataset::new(cfg, "synthetic-2target", frames)?.write(&path)?;

    let ds = ingest_recorded(&path)?;
    println!("{} frames of {}x2 from {}", ds.frames.len(), ds.header.radar.num_freqs, path.display());
    for alpha in [0.0, 0.55] {
        let q = AdaptiveQuantizer { alpha, ..Default::default() };
        let estimates = localize_frames(&ds.header.radar, &ds.frames, 2, &q, 5)?;
        println!("α = {alpha}:");
        for (i, s) in frame_statistics(&estimates).iter().enumerate() {
            println!(
                "  track {i}: {:.2} ± {:.2} m, {:.1} ± {:.1} deg",
                s.mean_range,
                s.two_sigma_range,
                s.mean_angle.to_degrees(),
                s.two_sigma_angle.to_degrees()
            );
        }
    }
    for t in &scene.targets {
        println!("truth: {:.2} m, {:.1} deg", cfg.range_of_bin(t.range_bin), t.angle.to_degrees());
    }
    Ok(())
}
