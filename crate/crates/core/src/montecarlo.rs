//! Randomized localization experiments.
//!
//! A trial draws a scene on a polar grid of cells, synthesizes the two-antenna
//! observations, quantizes them with a width recomputed from that trial's own
//! peak amplitude, runs PBP and scores every true target against the full
//! estimate list. Trial `i` derives all of its randomness from
//! `(seed, i)`, so results are independent of scheduling and thread count.

use ndarray::Array2;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::metrics::{position_error, ErrorMap};
use crate::pbp::{localize, Estimate};
use crate::quantizer::{AdaptiveQuantizer, DitherMode};
use crate::radar_model::{
    build_phi, build_phi_subsampled, random_sweep_subset, sense, signal_matrix, RadarConfig, Scene,
    SignalMatrix, Target,
};
use crate::seed::{derive_seed, rng_from};

// Sub-streams of a trial seed.
const SCENE_STREAM: u64 = 0;
const DITHER_STREAM: u64 = 1;
const NOISE_STREAM: u64 = 2;

const MAX_REDRAWS: usize = 10_000;

/// Estimates within this many range bins of a true target count as a detection.
pub const DETECTION_RADIUS_BINS: usize = 1;

/// Preset trial budgets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Profile {
    /// 20×20 cells, 40 runs per cell per target.
    #[default]
    Desk,
    /// 40×40 cells, 320 000 runs per target.
    Paper,
}

impl Profile {
    pub fn grid(self) -> (usize, usize) {
        match self {
            Profile::Desk => (20, 20),
            Profile::Paper => (40, 40),
        }
    }

    pub fn runs(self, sparsity: usize) -> usize {
        match self {
            Profile::Desk => 20 * 20 * 40 * sparsity,
            Profile::Paper => 320_000 * sparsity,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    /// Radar and sampling setup; `num_freqs` is the measurement count M.
    pub radar: RadarConfig,
    pub sparsity: usize,
    pub bit_depth: u32,
    pub alpha: f64,
    pub dither_mode: DitherMode,
    /// Multiplier on the saturation width used for δ.
    pub delta_margin: f64,
    pub runs: usize,
    pub range_cells: usize,
    pub angle_cells: usize,
    pub seed: u64,
    /// Cells whose center angle exceeds this magnitude (radians) are never drawn.
    pub angle_limit: Option<f64>,
    /// Additive complex Gaussian noise on Γ, in dB relative to mean sample power.
    pub snr_db: Option<f64>,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        ExperimentSpec::with_profile(RadarConfig::default(), 1, Profile::Desk)
    }
}

impl ExperimentSpec {
    pub fn with_profile(radar: RadarConfig, sparsity: usize, profile: Profile) -> Self {
        let (range_cells, angle_cells) = profile.grid();
        ExperimentSpec {
            radar,
            sparsity,
            bit_depth: 1,
            alpha: 1.0,
            dither_mode: DitherMode::Shared,
            delta_margin: 1.0,
            runs: profile.runs(sparsity),
            range_cells,
            angle_cells,
            seed: 0,
            angle_limit: None,
            snr_db: None,
        }
    }

    pub fn quantizer(&self) -> AdaptiveQuantizer {
        AdaptiveQuantizer {
            bit_depth: self.bit_depth,
            alpha: self.alpha,
            dither_mode: self.dither_mode,
            margin: self.delta_margin,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.radar.validate()?;
        let mut problems = Vec::new();
        if self.runs == 0 {
            problems.push("runs must be positive".to_string());
        }
        if self.range_cells == 0 || self.angle_cells == 0 {
            problems.push("grid dimensions must be positive".to_string());
        }
        if self.sparsity == 0 {
            problems.push("sparsity must be at least 1".to_string());
        }
        if self.sparsity > self.radar.num_ranges.min(self.range_cells) {
            problems.push(format!(
                "sparsity {} exceeds the number of distinct range cells",
                self.sparsity
            ));
        }
        if !(1..=32).contains(&self.bit_depth) {
            problems.push(format!("bit_depth must be in 1..=32, got {}", self.bit_depth));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            problems.push(format!("alpha must be in [0, 1], got {}", self.alpha));
        }
        if !(self.delta_margin.is_finite() && self.delta_margin >= 1.0) {
            problems.push(format!("delta_margin must be >= 1, got {}", self.delta_margin));
        }
        if self.allowed_angle_cells().is_empty() {
            problems.push("angle_limit excludes every angle cell".to_string());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(problems))
        }
    }

    pub fn empty_map(&self) -> ErrorMap {
        ErrorMap::new(self.range_cells, self.angle_cells, self.radar.max_range())
    }

    fn allowed_angle_cells(&self) -> Vec<usize> {
        let map = ErrorMap::new(1, self.angle_cells, 1.0);
        (0..self.angle_cells)
            .filter(|&j| match self.angle_limit {
                Some(limit) => map.cell_center((0, j)).1.abs() <= limit,
                None => true,
            })
            .collect()
    }

    pub fn trial_seed(&self, trial: u64) -> u64 {
        derive_seed(self.seed, trial)
    }
}

/// A scene drawn on the polar grid, with the cell of each target.
#[derive(Debug, Clone, PartialEq)]
pub struct DrawnScene {
    pub scene: Scene,
    pub cells: Vec<(usize, usize)>,
}

/// Picks `K` cells uniformly (distinct range bins, redrawing on collision) and
/// places a target at each cell's center. The first target has unit
/// amplitude, the others `U[0, 1]`; all phases are `U[0, 2π)`.
pub fn draw_scene<R: Rng + ?Sized>(spec: &ExperimentSpec, rng: &mut R) -> DrawnScene {
    let map = spec.empty_map();
    let angles = spec.allowed_angle_cells();
    let mut used_bins = Vec::with_capacity(spec.sparsity);
    let mut cells = Vec::with_capacity(spec.sparsity);
    let mut targets = Vec::with_capacity(spec.sparsity);
    for k in 0..spec.sparsity {
        let mut pick = None;
        for _ in 0..MAX_REDRAWS {
            let i = rng.random_range(0..spec.range_cells);
            let j = angles[rng.random_range(0..angles.len())];
            let bin = spec.radar.nearest_bin(map.cell_center((i, j)).0);
            if !used_bins.contains(&bin) {
                pick = Some((i, j, bin));
                break;
            }
        }
        // Collisions this persistent only happen on degenerate grids; fall back
        // to the first free range cell.
        let (i, j, bin) = pick.unwrap_or_else(|| {
            (0..spec.range_cells)
                .map(|i| (i, angles[0], spec.radar.nearest_bin(map.cell_center((i, angles[0])).0)))
                .find(|(_, _, b)| !used_bins.contains(b))
                .expect("validated sparsity leaves a free range cell")
        });
        let amplitude = if k == 0 { 1.0 } else { rng.random::<f64>() };
        let phase = rng.random_range(0.0..2.0 * PI);
        used_bins.push(bin);
        cells.push((i, j));
        targets.push(Target {
            range_bin: bin,
            angle: map.cell_center((i, j)).1,
            amplitude,
            phase,
        });
    }
    DrawnScene {
        scene: Scene::new(targets),
        cells,
    }
}

/// Adds circular complex Gaussian noise at `snr_db` below the mean sample power.
pub fn add_noise<R: Rng + ?Sized>(gamma: &mut Array2<Complex64>, snr_db: f64, rng: &mut R) {
    let power = gamma.iter().map(|z| z.norm_sqr()).sum::<f64>() / gamma.len().max(1) as f64;
    let sigma = (power / 10f64.powf(snr_db / 10.0) / 2.0).sqrt();
    for z in gamma.iter_mut() {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        *z += Complex64::new(sigma * re, sigma * im);
    }
}

/// Whether some non-degenerate estimate lies within the detection radius of `bin`.
pub fn detects(estimate: &Estimate, bin: usize) -> bool {
    estimate
        .targets
        .iter()
        .any(|t| !t.degenerate && t.range_bin.abs_diff(bin) <= DETECTION_RADIUS_BINS)
}

/// Position error of each true target against every estimate.
pub fn score(cfg: &RadarConfig, scene: &Scene, estimate: &Estimate) -> Result<Vec<f64>> {
    let positions = estimate.positions();
    scene
        .targets
        .iter()
        .map(|t| position_error((cfg.range_of_bin(t.range_bin), t.angle), &positions))
        .collect()
}

#[derive(Debug, Clone)]
pub struct TrialOutcome {
    pub truth: DrawnScene,
    pub x: SignalMatrix,
    pub estimate: Estimate,
    /// Per true target, in scene order.
    pub errors: Vec<f64>,
    /// `‖X̂ - X‖_F`.
    pub signal_error: f64,
}

/// Aggregated maps; the strongest/weakest split exists when `K ≥ 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub overall: ErrorMap,
    pub strongest: Option<ErrorMap>,
    pub weakest: Option<ErrorMap>,
    pub mean_error: f64,
    pub mean_signal_error: f64,
}

/// Experiment with its sensing matrix built once.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub spec: ExperimentSpec,
    phi: Array2<Complex64>,
}

impl Experiment {
    pub fn new(spec: ExperimentSpec) -> Result<Self> {
        spec.validate()?;
        let phi = build_phi(&spec.radar);
        Ok(Experiment { spec, phi })
    }

    pub fn phi(&self) -> &Array2<Complex64> {
        &self.phi
    }

    pub fn draw_scene(&self, trial: u64) -> DrawnScene {
        let mut rng = rng_from(self.spec.trial_seed(trial), SCENE_STREAM);
        draw_scene(&self.spec, &mut rng)
    }

    /// Observations for a given scene, with noise when configured.
    fn observe(&self, x: &SignalMatrix, trial_seed: u64) -> Result<Array2<Complex64>> {
        let mut gamma = sense(&self.phi, x)?;
        if let Some(snr) = self.spec.snr_db {
            add_noise(&mut gamma, snr, &mut rng_from(trial_seed, NOISE_STREAM));
        }
        Ok(gamma)
    }

    pub fn run_trial(&self, trial: u64) -> Result<TrialOutcome> {
        let seed = self.spec.trial_seed(trial);
        let truth = self.draw_scene(trial);
        let x = signal_matrix(&self.spec.radar, &truth.scene)?;
        let gamma = self.observe(&x, seed)?;
        let q = self
            .spec
            .quantizer()
            .quantize(&gamma, derive_seed(seed, DITHER_STREAM))?;
        let estimate = localize(&self.phi, q.z.view(), self.spec.sparsity, &self.spec.radar)?;
        let errors = score(&self.spec.radar, &truth.scene, &estimate)?;
        let signal_error = SignalMatrix(estimate.x_hat.clone()).frobenius_distance(&x);
        Ok(TrialOutcome {
            truth,
            x,
            estimate,
            errors,
            signal_error,
        })
    }

    /// Runs every trial on a pool of `threads` workers (0 = all cores).
    pub fn run(&self, threads: usize) -> Result<ExperimentResult> {
        let k = self.spec.sparsity;
        let outcomes: Vec<Summary> = in_pool(threads, || {
            (0..self.spec.runs as u64)
                .into_par_iter()
                .map(|i| self.run_trial(i).map(Summary::from))
                .collect::<Result<Vec<_>>>()
        })?;

        let mut overall = self.spec.empty_map();
        let mut strongest = (k >= 2).then(|| self.spec.empty_map());
        let mut weakest = (k >= 2).then(|| self.spec.empty_map());
        let (mut err_sum, mut err_n, mut sig_sum) = (0.0, 0usize, 0.0);
        // Sequential fold in trial order keeps floating-point sums reproducible.
        for s in &outcomes {
            for (t, &e) in s.errors.iter().enumerate() {
                overall.accumulate(s.cells[t], e)?;
                err_sum += e;
                err_n += 1;
            }
            if let (Some(map), Some(t)) = (strongest.as_mut(), s.strongest) {
                map.accumulate(s.cells[t], s.errors[t])?;
            }
            if let (Some(map), Some(t)) = (weakest.as_mut(), s.weakest) {
                map.accumulate(s.cells[t], s.errors[t])?;
            }
            sig_sum += s.signal_error;
        }
        Ok(ExperimentResult {
            overall,
            strongest,
            weakest,
            mean_error: err_sum / err_n.max(1) as f64,
            mean_signal_error: sig_sum / outcomes.len().max(1) as f64,
        })
    }
}

struct Summary {
    cells: Vec<(usize, usize)>,
    errors: Vec<f64>,
    strongest: Option<usize>,
    weakest: Option<usize>,
    signal_error: f64,
}

impl From<TrialOutcome> for Summary {
    fn from(o: TrialOutcome) -> Self {
        let targets = &o.truth.scene.targets;
        let (strongest, weakest) = if targets.len() >= 2 {
            let weakest = targets
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.amplitude.total_cmp(&b.1.amplitude))
                .map(|(i, _)| i);
            (o.truth.scene.strongest(), weakest)
        } else {
            (None, None)
        };
        Summary {
            cells: o.truth.cells,
            errors: o.errors,
            strongest,
            weakest,
            signal_error: o.signal_error,
        }
    }
}

pub(crate) fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(f),
        Err(e) => {
            log::warn!("falling back to the global pool: {e}");
            f()
        }
    }
}

/// Aggregates all trials of `spec` into error maps.
pub fn run_experiment(spec: &ExperimentSpec, threads: usize) -> Result<ExperimentResult> {
    Experiment::new(*spec)?.run(threads)
}

/// Sensing matrix for `m` measurements: whole sweeps when `m` is a multiple of
/// the sweep length, otherwise a random subset of one sweep's samples.
pub fn sensing_for(radar: &RadarConfig, m: usize, seed: u64) -> Result<(RadarConfig, Array2<Complex64>)> {
    let cfg = radar.with_num_freqs(m);
    if m > 0 && m.is_multiple_of(radar.sweep_samples) {
        cfg.validate()?;
        return Ok((cfg, build_phi(&cfg)));
    }
    if m == 0 || m > radar.sweep_samples {
        return Err(Error::Validation(vec![format!(
            "M = {m} is neither a whole number of {}-sample sweeps nor a subset of one sweep",
            radar.sweep_samples
        )]));
    }
    let rows = random_sweep_subset(radar, m, &mut rng_from(seed, m as u64));
    Ok((cfg, build_phi_subsampled(radar, &rows)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayPoint {
    pub m: usize,
    pub mean_error: f64,
}

/// Mean `‖X̂ - X‖_F` for each measurement count. Scene `i` is the same at every
/// `M`; only the dither (and sensing rows) change.
pub fn decay_curve(spec: &ExperimentSpec, m_list: &[usize], threads: usize) -> Result<Vec<DecayPoint>> {
    spec.validate()?;
    if m_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Validation(vec!["M list must be strictly ascending".into()]));
    }
    let quantizer = spec.quantizer();
    m_list
        .iter()
        .map(|&m| {
            let (cfg, phi) = sensing_for(&spec.radar, m, spec.seed)?;
            let errors: Vec<f64> = in_pool(threads, || {
                (0..spec.runs as u64)
                    .into_par_iter()
                    .map(|i| {
                        let seed = spec.trial_seed(i);
                        let drawn = draw_scene(spec, &mut rng_from(seed, SCENE_STREAM));
                        let x = signal_matrix(&cfg, &drawn.scene)?;
                        let mut gamma = sense(&phi, &x)?;
                        if let Some(snr) = spec.snr_db {
                            add_noise(&mut gamma, snr, &mut rng_from(derive_seed(seed, m as u64), NOISE_STREAM));
                        }
                        let dseed = derive_seed(derive_seed(seed, DITHER_STREAM), m as u64);
                        let z = quantizer.quantize(&gamma, dseed)?.z;
                        let est = crate::pbp::pbp(&phi, z.view(), spec.sparsity)?;
                        Ok(SignalMatrix(est.matrix).frobenius_distance(&x))
                    })
                    .collect::<Result<Vec<_>>>()
            })?;
            Ok(DecayPoint {
                m,
                mean_error: errors.iter().sum::<f64>() / errors.len() as f64,
            })
        })
        .collect()
}

/// Least-squares slope of `log(error)` against `log(M)`.
pub fn log_log_slope(points: &[DecayPoint]) -> f64 {
    let xs: Vec<f64> = points.iter().map(|p| (p.m as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.mean_error.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    cov / var
}

/// Source of the unquantized frames swept over α.
#[derive(Debug, Clone, Copy)]
pub enum SweepData<'a> {
    /// Frames synthesized from the scene with fresh noise each.
    Synthetic { frames: usize, snr_db: Option<f64> },
    /// Raw recorded frames (M×2 each).
    Recorded(&'a [Array2<Complex64>]),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlphaPoint {
    pub alpha: f64,
    pub target_index: usize,
    pub mean_error: f64,
    /// Fraction of frames in which the target was detected.
    pub detection_rate: f64,
}

/// Noisy synthetic frames of a fixed scene; frame `f` uses noise seed `(seed, f)`.
pub fn synthetic_frames(
    cfg: &RadarConfig,
    scene: &Scene,
    frames: usize,
    snr_db: Option<f64>,
    seed: u64,
) -> Result<Vec<Array2<Complex64>>> {
    let phi = build_phi(cfg);
    let x = signal_matrix(cfg, scene)?;
    let clean = sense(&phi, &x)?;
    Ok((0..frames as u64)
        .map(|f| {
            let mut g = clean.clone();
            if let Some(snr) = snr_db {
                add_noise(&mut g, snr, &mut rng_from(derive_seed(seed, f), NOISE_STREAM));
            }
            g
        })
        .collect())
}

/// Dither seed of frame `frame`; shared by the α-sweep, `localize` and `simulate`.
pub fn frame_dither_seed(seed: u64, frame: u64) -> u64 {
    derive_seed(derive_seed(seed, frame), DITHER_STREAM)
}

/// Localizes every frame with the given quantizer.
pub fn localize_frames(
    cfg: &RadarConfig,
    frames: &[Array2<Complex64>],
    sparsity: usize,
    quantizer: &AdaptiveQuantizer,
    seed: u64,
) -> Result<Vec<Estimate>> {
    let phi = build_phi(cfg);
    frames
        .iter()
        .enumerate()
        .map(|(f, gamma)| {
            if gamma.dim() != (cfg.num_freqs, 2) {
                return Err(Error::DimensionMismatch(format!(
                    "frame {f} is {:?}, expected ({}, 2)",
                    gamma.dim(),
                    cfg.num_freqs
                )));
            }
            let z = quantizer.quantize(gamma, frame_dither_seed(seed, f as u64))?.z;
            localize(&phi, z.view(), sparsity, cfg)
        })
        .collect()
}

/// Mean per-target position error and detection rate for each dither weight.
///
/// Every α reuses the same frames and the same base dither `ξ`, scaled by α.
pub fn alpha_sweep(spec: &ExperimentSpec, scene: &Scene, alphas: &[f64], data: SweepData<'_>) -> Result<Vec<AlphaPoint>> {
    spec.radar.validate()?;
    scene.validate(spec.radar.num_ranges)?;
    if let Some(a) = alphas.iter().find(|a| !(0.0..=1.0).contains(*a)) {
        return Err(Error::Validation(vec![format!("alpha {a} outside [0, 1]")]));
    }
    if scene.targets.is_empty() {
        return Err(Error::Validation(vec!["alpha sweep needs at least one true target".into()]));
    }
    let owned;
    let frames: &[Array2<Complex64>] = match data {
        SweepData::Synthetic { frames, snr_db } => {
            owned = synthetic_frames(&spec.radar, scene, frames, snr_db, spec.seed)?;
            &owned
        }
        SweepData::Recorded(frames) => frames,
    };
    let k = scene.sparsity();
    let mut out = Vec::with_capacity(alphas.len() * k);
    for &alpha in alphas {
        let quantizer = AdaptiveQuantizer { alpha, ..spec.quantizer() };
        let estimates = localize_frames(&spec.radar, frames, k, &quantizer, spec.seed)?;
        for (t, target) in scene.targets.iter().enumerate() {
            let truth = (spec.radar.range_of_bin(target.range_bin), target.angle);
            let mut err = 0.0;
            let mut hits = 0usize;
            for est in &estimates {
                err += position_error(truth, &est.positions())?;
                hits += detects(est, target.range_bin) as usize;
            }
            let n = estimates.len().max(1) as f64;
            out.push(AlphaPoint {
                alpha,
                target_index: t,
                mean_error: err / n,
                detection_rate: hits as f64 / n,
            });
        }
    }
    Ok(out)
}

/// Per-α summary: the worst detection rate over targets and the mean error.
pub fn alpha_summary(points: &[AlphaPoint]) -> Vec<(f64, f64, f64)> {
    let mut alphas: Vec<f64> = points.iter().map(|p| p.alpha).collect();
    alphas.dedup();
    alphas
        .into_iter()
        .map(|a| {
            let rows: Vec<&AlphaPoint> = points.iter().filter(|p| p.alpha == a).collect();
            let worst = rows.iter().map(|p| p.detection_rate).fold(1.0, f64::min);
            let mean = rows.iter().map(|p| p.mean_error).sum::<f64>() / rows.len() as f64;
            (a, worst, mean)
        })
        .collect()
}

pub fn decay_csv(points: &[DecayPoint]) -> String {
    let mut s = String::from("M,mean_error\n");
    for p in points {
        s.push_str(&format!("{},{:.16e}\n", p.m, p.mean_error));
    }
    s
}

pub fn alpha_csv(points: &[AlphaPoint]) -> String {
    let mut s = String::from("alpha,target_index,mean_error_m\n");
    for p in points {
        s.push_str(&format!("{},{},{:.16e}\n", p.alpha, p.target_index, p.mean_error));
    }
    s
}

/// Thread count from `QBR_THREADS` (0 or unset = all cores).
pub fn threads_from_env() -> usize {
    std::env::var("QBR_THREADS")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_spec(k: usize) -> ExperimentSpec {
        ExperimentSpec {
            runs: 64,
            range_cells: 8,
            angle_cells: 8,
            ..ExperimentSpec::with_profile(RadarConfig::default(), k, Profile::Desk)
        }
    }

    #[test]
    fn single_target_has_unit_amplitude() {
        let spec = small_spec(1);
        for i in 0..50 {
            let d = Experiment::new(spec).unwrap().draw_scene(i);
            assert_eq!(d.scene.targets.len(), 1);
            assert_eq!(d.scene.targets[0].amplitude, 1.0);
        }
    }

    #[test]
    fn same_rng_state_same_scene() {
        let spec = small_spec(3);
        let a = draw_scene(&spec, &mut rng_from(5, 0));
        let b = draw_scene(&spec, &mut rng_from(5, 0));
        assert_eq!(a, b);
        a.scene.validate(spec.radar.num_ranges).unwrap();
    }

    #[test]
    fn angle_limit_respected() {
        let spec = ExperimentSpec { angle_limit: Some(0.5), ..small_spec(2) };
        for i in 0..200 {
            let d = draw_scene(&spec, &mut rng_from(1, i));
            assert!(d.scene.targets.iter().all(|t| t.angle.abs() <= 0.5));
        }
    }

    #[test]
    fn trial_reports_exactly_k_targets() {
        let exp = Experiment::new(small_spec(1)).unwrap();
        let out = exp.run_trial(3).unwrap();
        assert_eq!(out.estimate.targets.len(), 1);
        assert_eq!(out.errors.len(), 1);
    }

    #[test]
    fn single_run_fills_k_cells() {
        for k in [1, 2] {
            let spec = ExperimentSpec { runs: 1, ..small_spec(k) };
            let res = run_experiment(&spec, 1).unwrap();
            assert_eq!(res.overall.nonempty_cells(), k);
        }
    }

    #[test]
    fn noise_level_matches_snr() {
        let mut g = Array2::from_elem((20_000, 2), Complex64::new(1.0, 0.0));
        add_noise(&mut g, 10.0, &mut rng_from(0, 0));
        let p: f64 = g.iter().map(|z| (z - Complex64::ONE).norm_sqr()).sum::<f64>() / g.len() as f64;
        assert!((p - 0.1).abs() < 0.005, "{p}");
    }

    #[test]
    fn slope_of_exact_power_law() {
        let pts: Vec<DecayPoint> = [100usize, 400, 1600]
            .iter()
            .map(|&m| DecayPoint { m, mean_error: 3.0 / (m as f64).sqrt() })
            .collect();
        assert!((log_log_slope(&pts) + 0.5).abs() < 1e-12);
    }

    #[test]
    fn subsampled_sensing_for_partial_sweep() {
        let radar = RadarConfig::default();
        let (cfg, phi) = sensing_for(&radar, 128, 0).unwrap();
        assert_eq!(phi.dim(), (128, 256));
        assert_eq!(cfg.num_freqs, 128);
        assert!(sensing_for(&radar, 300, 0).is_err());
        assert_eq!(sensing_for(&radar, 512, 0).unwrap().1.dim(), (512, 256));
    }

    #[test]
    fn spec_validation_collects_problems() {
        let spec = ExperimentSpec { runs: 0, alpha: 2.0, sparsity: 0, ..ExperimentSpec::default() };
        match spec.validate() {
            Err(Error::Validation(v)) => assert!(v.len() >= 3, "{v:?}"),
            other => panic!("{other:?}"),
        }
    }
}
