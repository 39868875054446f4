//! Uniform scalar quantization with weighted uniform dithering.
//!
//! The quantizer maps `λ` to `δ⌊λ/δ⌋ + δ/2`, i.e. onto the shifted lattice
//! `δℤ + δ/2`, and acts separately on real and imaginary parts. The quantized
//! sensing map applied to each antenna column is
//!
//! ```text
//! A(u) = Q(Φu + αξ),   ξ_m ~ U[-δ/2, δ/2] + i U[-δ/2, δ/2]
//! ```
//!
//! In the 1-bit regime (`δ > 2 max |Re/Im (Φu)|`) every output is `±δ/2`.
//! The two output cells are `[-δ, 0)` and `[0, δ)`, so a dither of at most
//! `δ/2` per part never pushes a saturated sample into a third level.

use ndarray::Array2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::radar_model::SignalMatrix;

/// Bit depth treated as full resolution: samples pass through unquantized.
pub const FULL_RESOLUTION_BITS: u32 = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DitherMode {
    /// One dither vector added to both antenna columns.
    #[default]
    Shared,
    /// Independent dither per antenna.
    Independent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantizerConfig {
    /// Quantization width δ.
    pub delta: f64,
    /// 1..=32; 32 disables quantization.
    pub bit_depth: u32,
    /// Dither weight α in [0, 1].
    pub alpha: f64,
    pub dither_mode: DitherMode,
    pub seed: u64,
}

impl Default for QuantizerConfig {
    fn default() -> Self {
        QuantizerConfig {
            delta: 1.0,
            bit_depth: 1,
            alpha: 1.0,
            dither_mode: DitherMode::Shared,
            seed: 0,
        }
    }
}

impl QuantizerConfig {
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if !(self.delta.is_finite() && self.delta > 0.0) {
            problems.push(format!("delta must be positive, got {}", self.delta));
        }
        if !(1..=FULL_RESOLUTION_BITS).contains(&self.bit_depth) {
            problems.push(format!("bit_depth must be in 1..=32, got {}", self.bit_depth));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            problems.push(format!("alpha must be in [0, 1], got {}", self.alpha));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(problems))
        }
    }

    pub fn is_full_resolution(&self) -> bool {
        self.bit_depth >= FULL_RESOLUTION_BITS
    }

    /// Largest output level `(2^(b-1) - 1/2) δ`; outputs are clamped to
    /// `[-limit, limit]` for finite bit depths.
    pub fn output_limit(&self) -> f64 {
        (2f64.powi(self.bit_depth as i32 - 1) - 0.5) * self.delta
    }
}

/// Output of the quantized sensing map.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizedObservations {
    /// M×2 quantized samples, one column per antenna.
    pub z: Array2<Complex64>,
    /// Realized (weighted) dither, M×2. Both columns are equal in shared mode.
    pub dither: Array2<Complex64>,
    pub delta: f64,
}

/// `δ⌊λ/δ⌋ + δ/2`.
pub fn quantize_scalar(lambda: f64, delta: f64) -> Result<f64> {
    if !lambda.is_finite() {
        return Err(Error::NonFinite(lambda));
    }
    Ok(quantize_unchecked(lambda, delta))
}

#[inline]
fn quantize_unchecked(lambda: f64, delta: f64) -> f64 {
    delta * (lambda / delta).floor() + 0.5 * delta
}

/// Quantizes real and imaginary parts independently.
pub fn quantize_complex(u: &[Complex64], delta: f64) -> Result<Vec<Complex64>> {
    u.iter()
        .map(|z| Ok(Complex64::new(quantize_scalar(z.re, delta)?, quantize_scalar(z.im, delta)?)))
        .collect()
}

/// RNG stream used for the dither of one antenna column.
fn dither_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn fill_dither<R: Rng>(rng: &mut R, m: usize, delta: f64, alpha: f64) -> Vec<Complex64> {
    let half = 0.5 * delta;
    (0..m)
        .map(|_| {
            // Both parts are drawn even for α = 0 so the stream does not depend on α.
            let re = rng.random_range(-half..half);
            let im = rng.random_range(-half..half);
            Complex64::new(alpha * re, alpha * im)
        })
        .collect()
}

/// `M` complex dither samples `α(u + iv)` with `u, v ~ U[-δ/2, δ/2)`.
///
/// The same seed always yields the same vector, and for a fixed seed the
/// vectors for different `alpha` are scaled copies of one another.
pub fn draw_dither(m: usize, delta: f64, alpha: f64, seed: u64) -> Vec<Complex64> {
    fill_dither(&mut dither_rng(seed, 0), m, delta, alpha)
}

fn check_shapes(phi: &Array2<Complex64>, x: &SignalMatrix) -> Result<()> {
    if phi.ncols() != x.num_ranges() || x.0.ncols() != 2 {
        return Err(Error::ShapeMismatch(format!(
            "Φ is {}x{}, X is {}x{}",
            phi.nrows(),
            phi.ncols(),
            x.0.nrows(),
            x.0.ncols()
        )));
    }
    Ok(())
}

/// Quantizes given observations `Γ = Φ X`, adding the configured dither.
pub fn quantize_observations(gamma: &Array2<Complex64>, qcfg: &QuantizerConfig) -> Result<QuantizedObservations> {
    qcfg.validate()?;
    if gamma.ncols() != 2 {
        return Err(Error::ShapeMismatch(format!(
            "observations need two columns, got {}",
            gamma.ncols()
        )));
    }
    let m = gamma.nrows();
    let mut dither = Array2::zeros((m, 2));
    let first = fill_dither(&mut dither_rng(qcfg.seed, 0), m, qcfg.delta, qcfg.alpha);
    let second = match qcfg.dither_mode {
        DitherMode::Shared => first.clone(),
        DitherMode::Independent => fill_dither(&mut dither_rng(qcfg.seed, 1), m, qcfg.delta, qcfg.alpha),
    };
    for (i, (a, b)) in first.into_iter().zip(second).enumerate() {
        dither[[i, 0]] = a;
        dither[[i, 1]] = b;
    }

    let mut z = gamma + &dither;
    if let Some(bad) = z.iter().flat_map(|c| [c.re, c.im]).find(|v| !v.is_finite()) {
        return Err(Error::NonFinite(bad));
    }
    if !qcfg.is_full_resolution() {
        let (delta, limit) = (qcfg.delta, qcfg.output_limit());
        z.mapv_inplace(|c| {
            Complex64::new(
                quantize_unchecked(c.re, delta).clamp(-limit, limit),
                quantize_unchecked(c.im, delta).clamp(-limit, limit),
            )
        });
    }
    Ok(QuantizedObservations {
        z,
        dither,
        delta: qcfg.delta,
    })
}

/// The quantized map `Z = (A(x1), A(x2))` with `A(u) = Q(Φu + ξ)`.
///
/// At full resolution the dithered samples `ΦX + ξ` are returned as is.
pub fn apply_map(phi: &Array2<Complex64>, x: &SignalMatrix, qcfg: &QuantizerConfig) -> Result<QuantizedObservations> {
    check_shapes(phi, x)?;
    let gamma = crate::radar_model::sense(phi, x)?;
    quantize_observations(&gamma, qcfg)
}

/// Largest real or imaginary magnitude over both columns.
pub fn max_component(gamma: &Array2<Complex64>) -> f64 {
    gamma
        .iter()
        .map(|z| z.re.abs().max(z.im.abs()))
        .fold(0.0, f64::max)
}

/// Quantization width that saturates every sample to `±δ/2`:
/// `margin · 2 · max(|Re Γ|, |Im Γ|)`.
///
/// With `margin = 1` this sits at the boundary of the strict 1-bit condition;
/// the half-open dither range and the output clamp keep it two-level.
pub fn one_bit_delta(gamma: &Array2<Complex64>, margin: f64) -> Result<f64> {
    let peak = max_component(gamma);
    if peak == 0.0 || !peak.is_finite() {
        return Err(Error::ZeroSignal);
    }
    Ok(margin * 2.0 * peak)
}

/// Width for a `bit_depth`-bit quantizer whose `2^b` cells cover the signal
/// plus a full-width dither: `margin · 2 max|Γ| / (2^b - 1)`.
///
/// Reduces to [`one_bit_delta`] at `b = 1`.
pub fn multi_bit_delta(gamma: &Array2<Complex64>, bit_depth: u32, margin: f64) -> Result<f64> {
    let one = one_bit_delta(gamma, margin)?;
    Ok(one / (2f64.powi(bit_depth as i32) - 1.0))
}

/// Quantizer whose width follows each acquisition's own peak amplitude.
///
/// Finite bit depths use [`multi_bit_delta`] (the 1-bit rule at `b = 1`); at
/// full resolution the width only scales the dither.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveQuantizer {
    pub bit_depth: u32,
    pub alpha: f64,
    pub dither_mode: DitherMode,
    /// Factor applied on top of the saturation width, at least 1.
    pub margin: f64,
}

impl Default for AdaptiveQuantizer {
    /// 1-bit with full dither.
    fn default() -> Self {
        AdaptiveQuantizer {
            bit_depth: 1,
            alpha: 1.0,
            dither_mode: DitherMode::Shared,
            margin: 1.0,
        }
    }
}

impl AdaptiveQuantizer {
    pub fn delta_for(&self, gamma: &Array2<Complex64>) -> Result<f64> {
        if self.bit_depth >= FULL_RESOLUTION_BITS {
            return Ok(one_bit_delta(gamma, self.margin).unwrap_or(1.0));
        }
        multi_bit_delta(gamma, self.bit_depth, self.margin)
    }

    pub fn config_for(&self, gamma: &Array2<Complex64>, seed: u64) -> Result<QuantizerConfig> {
        Ok(QuantizerConfig {
            delta: self.delta_for(gamma)?,
            bit_depth: self.bit_depth,
            alpha: self.alpha,
            dither_mode: self.dither_mode,
            seed,
        })
    }

    pub fn quantize(&self, gamma: &Array2<Complex64>, seed: u64) -> Result<QuantizedObservations> {
        quantize_observations(gamma, &self.config_for(gamma, seed)?)
    }
}

/// Bits spent per real channel for `m` samples at `bit_depth` bits.
pub fn bit_budget(m: usize, bit_depth: u32) -> u64 {
    m as u64 * bit_depth as u64
}
