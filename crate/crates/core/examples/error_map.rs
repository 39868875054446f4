//! Small Monte Carlo error map for one and two targets, written as CSV.
//!
//! `cargo run --release --example error_map -- [runs] [out_dir]`

use qbr::prelude::*;

fn main() -> qbr::Result<()> {
    let mut args = std::env::args().skip(1);
    let runs: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(2000);
    let out = std::path::PathBuf::from(args.next().unwrap_or_else(|| ".".into()));

    for k in [1, 2] {
        let spec = ExperimentSpec {
            runs: runs * k,
            range_cells: 10,
            angle_cells: 10,
            seed: 1,
            ..ExperimentSpec::with_profile(RadarConfig::default(), k, Profile::Desk)
        };
        let result = run_experiment(&spec, 0)?;
        let path = out.join(format!("error_map_k{k}.csv"));
        std::fs::write(&path, result.overall.to_csv())?;
        println!(
            "K = {k}: mean position error {:.3} m over {} trials, {} empty cells -> {}",
            result.mean_error,
            spec.runs,
            result.overall.empty_cells(),
            path.display()
        );
        if let (Some(s), Some(w)) = (&result.strongest, &result.weakest) {
            let mean = |m: &ErrorMap| {
                let v: Vec<f64> = m.cells().filter_map(|c| m.mean(c).ok().flatten()).collect();
                v.iter().sum::<f64>() / v.len().max(1) as f64
            };
            println!("  strongest target {:.3} m, weakest {:.3} m (cell averages)", mean(s), mean(w));
        }
    }
    Ok(())
}
