//! Two-antenna FMCW sensing model.
//!
//! After coherent demodulation each sampled frequency `f_m` of the saw-tooth
//! sweep sees a target at range `R_n` as the phase `exp(-i 4π f_m R_n / c)`.
//! Stacking these phases gives the range sensing matrix `Φ` (M×N). The second
//! antenna, a distance `d` away, sees the same range profile rotated by the
//! per-target gain `exp(i 2π f0 d sin θ / c)`, so the observations read
//!
//! ```text
//! Γ = [γ1, γ2] = Φ [x, G x]
//! ```
//!
//! with `x` the complex range profile and `G` diagonal.
//!
//! Range bins are indexed from zero: bin `i` sits at `(i + 1) · c / (2B)`, so
//! the first bin is one resolution cell away from the radar and the last bin
//! lies at the maximum range `N · c / (2B)`.

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Physical and sampling parameters of the radar.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadarConfig {
    /// Carrier (start) frequency of the sweep, Hz.
    pub f0: f64,
    /// Swept bandwidth, Hz.
    pub bandwidth: f64,
    /// Number of frequency samples M.
    pub num_freqs: usize,
    /// Number of range bins N.
    pub num_ranges: usize,
    /// Distance between the two receiving antennas, m.
    pub antenna_spacing: f64,
    pub speed_of_light: f64,
    /// Samples per saw-tooth; `num_freqs` must hold a whole number of sweeps.
    pub sweep_samples: usize,
}

impl Default for RadarConfig {
    /// K-band setup: 24 GHz carrier, 250 MHz sweep, 256 range bins, two
    /// 256-sample saw-tooths and half-wavelength antenna spacing.
    fn default() -> Self {
        let f0 = 24e9;
        RadarConfig {
            f0,
            bandwidth: 250e6,
            num_freqs: 512,
            num_ranges: 256,
            antenna_spacing: SPEED_OF_LIGHT / (2.0 * f0),
            speed_of_light: SPEED_OF_LIGHT,
            sweep_samples: 256,
        }
    }
}

impl RadarConfig {
    /// Half-wavelength spacing `c / (2 f0)` for the current carrier.
    pub fn half_wavelength(&self) -> f64 {
        self.speed_of_light / (2.0 * self.f0)
    }

    /// Range resolution `c / (2B)`.
    pub fn range_resolution(&self) -> f64 {
        self.speed_of_light / (2.0 * self.bandwidth)
    }

    pub fn max_range(&self) -> f64 {
        self.num_ranges as f64 * self.range_resolution()
    }

    /// Range of bin `bin` (zero-based).
    pub fn range_of_bin(&self, bin: usize) -> f64 {
        (bin + 1) as f64 * self.range_resolution()
    }

    /// Zero-based bin closest to `range`, clamped to the grid.
    pub fn nearest_bin(&self, range: f64) -> usize {
        let n = (range / self.range_resolution()).round() as i64 - 1;
        n.clamp(0, self.num_ranges as i64 - 1) as usize
    }

    /// Phase advance `2π f0 d / c` per unit of `sin θ` between the antennas.
    pub fn phase_per_sine(&self) -> f64 {
        2.0 * PI * self.f0 * self.antenna_spacing / self.speed_of_light
    }

    /// Same configuration with a different number of frequency samples.
    pub fn with_num_freqs(mut self, num_freqs: usize) -> Self {
        self.num_freqs = num_freqs;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if !(self.f0.is_finite() && self.f0 >= 0.0) {
            problems.push(format!("f0 must be finite and non-negative, got {}", self.f0));
        }
        if !(self.bandwidth.is_finite() && self.bandwidth > 0.0) {
            problems.push(format!("bandwidth must be positive, got {}", self.bandwidth));
        }
        if !(self.speed_of_light.is_finite() && self.speed_of_light > 0.0) {
            problems.push(format!(
                "speed_of_light must be positive, got {}",
                self.speed_of_light
            ));
        }
        if !(self.antenna_spacing.is_finite() && self.antenna_spacing > 0.0) {
            problems.push(format!(
                "antenna_spacing must be positive, got {}",
                self.antenna_spacing
            ));
        }
        if self.num_freqs == 0 {
            problems.push("num_freqs must be positive".into());
        }
        if self.num_ranges == 0 {
            problems.push("num_ranges must be positive".into());
        }
        if self.sweep_samples == 0 {
            problems.push("sweep_samples must be positive".into());
        } else if !self.num_freqs.is_multiple_of(self.sweep_samples) {
            problems.push(format!(
                "num_freqs ({}) must be a whole number of sweeps of {} samples",
                self.num_freqs, self.sweep_samples
            ));
        }
        if !problems.is_empty() {
            return Err(Error::Validation(problems));
        }
        if self.f0 > 0.0 && self.bandwidth / self.f0 > 0.1 {
            log::warn!(
                "B/f0 = {:.3}: the narrowband gain approximation degrades",
                self.bandwidth / self.f0
            );
        }
        Ok(())
    }
}

/// A point target on the range grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Target {
    /// Zero-based range bin.
    pub range_bin: usize,
    /// Angle of arrival in radians, within [-π/2, π/2].
    pub angle: f64,
    pub amplitude: f64,
    /// Phase of the complex coefficient, radians.
    pub phase: f64,
}

impl Target {
    pub fn coefficient(&self) -> Complex64 {
        Complex64::from_polar(self.amplitude, self.phase)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub targets: Vec<Target>,
}

impl Scene {
    pub fn new(targets: Vec<Target>) -> Self {
        Scene { targets }
    }

    pub fn sparsity(&self) -> usize {
        self.targets.len()
    }

    /// Checks that every bin lies on the grid and no two targets share one.
    pub fn validate(&self, num_ranges: usize) -> Result<()> {
        let mut owner = vec![None; num_ranges];
        for (i, t) in self.targets.iter().enumerate() {
            if t.range_bin >= num_ranges {
                return Err(Error::RangeBinOutOfGrid {
                    bin: t.range_bin,
                    num_ranges,
                });
            }
            if let Some(first) = owner[t.range_bin] {
                return Err(Error::DuplicateRangeBin {
                    bin: t.range_bin,
                    first,
                    second: i,
                });
            }
            owner[t.range_bin] = Some(i);
        }
        Ok(())
    }

    /// Index of the target with the largest amplitude (first one on ties).
    pub fn strongest(&self) -> Option<usize> {
        self.targets
            .iter()
            .enumerate()
            .fold(None, |best: Option<(usize, f64)>, (i, t)| match best {
                Some((_, a)) if a >= t.amplitude => best,
                _ => Some((i, t.amplitude)),
            })
            .map(|(i, _)| i)
    }
}

/// Joint-support unknown `X = (x1, x2)`, an N×2 complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalMatrix(pub Array2<Complex64>);

impl SignalMatrix {
    pub fn zeros(num_ranges: usize) -> Self {
        SignalMatrix(Array2::zeros((num_ranges, 2)))
    }

    pub fn num_ranges(&self) -> usize {
        self.0.nrows()
    }

    /// Rows where either column is nonzero.
    pub fn support(&self) -> Vec<usize> {
        self.0
            .rows()
            .into_iter()
            .enumerate()
            .filter(|(_, r)| r.iter().any(|z| *z != Complex64::ZERO))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn frobenius_distance(&self, other: &SignalMatrix) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// Bin ranges `R_n = (n + 1) c / (2B)`, in meters.
pub fn range_grid(cfg: &RadarConfig) -> Vec<f64> {
    (0..cfg.num_ranges).map(|n| cfg.range_of_bin(n)).collect()
}

/// Sampled sweep frequencies; the ramp restarts every `sweep_samples` samples.
pub fn frequency_grid(cfg: &RadarConfig) -> Vec<f64> {
    let s = cfg.sweep_samples as f64;
    (0..cfg.num_freqs)
        .map(|m| cfg.f0 + cfg.bandwidth * ((m % cfg.sweep_samples) as f64 / s))
        .collect()
}

/// `Φ_mn = exp(-i 4π f_m R_n / c)` for arbitrary frequency and range lists.
pub fn phi_from_grids(freqs: &[f64], ranges: &[f64], speed_of_light: f64) -> Array2<Complex64> {
    Array2::from_shape_fn((freqs.len(), ranges.len()), |(m, n)| {
        // Reduce 2fR/c modulo one turn before scaling: the raw phase is in the
        // tens of thousands of radians at K-band.
        let turns = 2.0 * (freqs[m] / speed_of_light) * ranges[n];
        Complex64::from_polar(1.0, -2.0 * PI * (turns - turns.round()))
    })
}

/// Range sensing matrix Φ (M×N) for the configured sweep.
pub fn build_phi(cfg: &RadarConfig) -> Array2<Complex64> {
    phi_from_grids(&frequency_grid(cfg), &range_grid(cfg), cfg.speed_of_light)
}

/// Draws `m` distinct sample positions of a single sweep, sorted ascending.
pub fn random_sweep_subset<R: Rng + ?Sized>(cfg: &RadarConfig, m: usize, rng: &mut R) -> Vec<usize> {
    let m = m.min(cfg.sweep_samples);
    let mut rows = index::sample(rng, cfg.sweep_samples, m).into_vec();
    rows.sort_unstable();
    rows
}

/// Sensing matrix restricted to the given positions of one sweep.
pub fn build_phi_subsampled(cfg: &RadarConfig, rows: &[usize]) -> Array2<Complex64> {
    let s = cfg.sweep_samples as f64;
    let freqs: Vec<f64> = rows
        .iter()
        .map(|&k| cfg.f0 + cfg.bandwidth * ((k % cfg.sweep_samples) as f64 / s))
        .collect();
    phi_from_grids(&freqs, &range_grid(cfg), cfg.speed_of_light)
}

/// Diagonal of the inter-antenna gain `G`, one entry per range bin.
///
/// Empty bins carry a unit gain; it only ever multiplies zero.
pub fn build_gain(cfg: &RadarConfig, scene: &Scene) -> Array1<Complex64> {
    let k = cfg.phase_per_sine();
    let mut g = Array1::from_elem(cfg.num_ranges, Complex64::ONE);
    for t in &scene.targets {
        if t.range_bin < cfg.num_ranges {
            g[t.range_bin] = Complex64::from_polar(1.0, k * t.angle.sin());
        }
    }
    g
}

/// Ground-truth `X = (x, Gx)` for a scene.
pub fn signal_matrix(cfg: &RadarConfig, scene: &Scene) -> Result<SignalMatrix> {
    scene.validate(cfg.num_ranges)?;
    let g = build_gain(cfg, scene);
    let mut x = Array2::zeros((cfg.num_ranges, 2));
    for t in &scene.targets {
        let c = t.coefficient();
        x[[t.range_bin, 0]] = c;
        x[[t.range_bin, 1]] = g[t.range_bin] * c;
    }
    Ok(SignalMatrix(x))
}

/// `Φ X` for a sparse `X`: only the support columns of Φ are touched.
pub fn sense(phi: &Array2<Complex64>, x: &SignalMatrix) -> Result<Array2<Complex64>> {
    if phi.ncols() != x.num_ranges() {
        return Err(Error::ShapeMismatch(format!(
            "Φ has {} columns but X has {} rows",
            phi.ncols(),
            x.num_ranges()
        )));
    }
    let mut gamma = Array2::zeros((phi.nrows(), 2));
    for n in x.support() {
        let (a, b) = (x.0[[n, 0]], x.0[[n, 1]]);
        for (mut out, &p) in gamma.rows_mut().into_iter().zip(phi.column(n).iter()) {
            out[0] += p * a;
            out[1] += p * b;
        }
    }
    Ok(gamma)
}

/// Noiseless two-antenna observations `Γ = Φ X` along with the ground truth `X`.
pub fn synthesize(cfg: &RadarConfig, scene: &Scene) -> Result<(Array2<Complex64>, SignalMatrix)> {
    cfg.validate()?;
    let x = signal_matrix(cfg, scene)?;
    let gamma = sense(&build_phi(cfg), &x)?;
    Ok((gamma, x))
}
