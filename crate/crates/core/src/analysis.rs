//! Empirical checks of the recovery theory on small instances.
//!
//! The restricted isometry and projection distortion constants are suprema
//! over all sparse unit vectors; the estimates here are maxima over random
//! samples and therefore lower bounds ("sampled" constants).

use ndarray::{Array1, Array2, ArrayView2};
use num_complex::Complex64;
use rand::seq::index;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quantizer::{quantize_observations, QuantizerConfig};

/// Largest support enumeration the brute-force projector accepts.
pub const MAX_ORACLE_SUPPORTS: u64 = 1 << 20;

fn binomial(n: usize, k: usize) -> u64 {
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc.saturating_mul((n - i) as u64) / (i as u64 + 1))
}

/// Projection onto `Θ^K` by enumerating every support of size `k`.
///
/// For a fixed support the closest matrix is the restriction of `u` to it, so
/// only the residual of each support needs comparing. Returns the minimizer
/// and its squared Frobenius distance; ties keep the first support in
/// lexicographic order.
pub fn projector_oracle(u: ArrayView2<Complex64>, k: usize) -> Result<(Array2<Complex64>, f64)> {
    let n = u.nrows();
    let k = k.min(n);
    if binomial(n, k) > MAX_ORACLE_SUPPORTS {
        return Err(Error::TooLarge { n, k });
    }
    let mut best: Option<(Vec<usize>, f64)> = None;
    let mut support: Vec<usize> = (0..k).collect();
    loop {
        let mut kept = Array2::zeros(u.dim());
        for &i in &support {
            kept.row_mut(i).assign(&u.row(i));
        }
        let dist: f64 = u.iter().zip(kept.iter()).map(|(a, b)| (a - b).norm_sqr()).sum();
        if best.as_ref().is_none_or(|(_, d)| dist < *d) {
            best = Some((support.clone(), dist));
        }
        if !next_combination(&mut support, n) {
            break;
        }
    }
    let (support, dist) = best.expect("at least one support");
    let mut v = Array2::zeros(u.dim());
    for &i in &support {
        v.row_mut(i).assign(&u.row(i));
    }
    Ok((v, dist))
}

/// Advances `c` to the next k-subset of `0..n` in lexicographic order.
fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    if k == 0 {
        return false;
    }
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Random `k`-sparse complex Gaussian vector with unit norm.
pub fn random_sparse_unit<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Array1<Complex64> {
    let mut v = Array1::zeros(n);
    for i in index::sample(rng, n, k.min(n)) {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        v[i] = Complex64::new(re, im);
    }
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.mapv_inplace(|z| z / norm);
    }
    v
}

fn apply(phi: &Array2<Complex64>, v: &Array1<Complex64>) -> Array1<Complex64> {
    let mut out = Array1::zeros(phi.nrows());
    for (j, &c) in v.iter().enumerate() {
        if c != Complex64::ZERO {
            out.scaled_add(c, &phi.column(j));
        }
    }
    out
}

/// `a* b`.
fn inner(a: &Array1<Complex64>, b: &Array1<Complex64>) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

#[derive(Debug, Clone, Serialize)]
pub struct RipReport {
    pub sparsity: usize,
    pub trials: usize,
    pub measurements: usize,
    /// Sampled `max |‖Φu‖²/M - ‖u‖²| / ‖u‖²`.
    pub epsilon_hat: f64,
    /// Witness as `[re, im]` pairs.
    pub worst_case_vector: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LpdReport {
    pub sparsity: usize,
    pub trials: usize,
    pub measurements: usize,
    /// Sampled `max |⟨A(w), Φv⟩ - ⟨Φw, Φv⟩| / M`.
    pub nu_hat: f64,
    pub delta: f64,
    pub alpha: f64,
    pub bit_depth: u32,
}

fn to_pairs(v: &Array1<Complex64>) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

/// Sampled restricted isometry constant of `Φ/√M` over `k`-sparse vectors.
pub fn empirical_rip<R: Rng + ?Sized>(phi: &Array2<Complex64>, k: usize, trials: usize, rng: &mut R) -> RipReport {
    let (m, n) = phi.dim();
    let mut worst = (0.0, Array1::zeros(n));
    for _ in 0..trials.max(1) {
        let u = random_sparse_unit(n, k, rng);
        let energy = apply(phi, &u).iter().map(|z| z.norm_sqr()).sum::<f64>() / m as f64;
        let eps = (energy - 1.0).abs();
        if eps > worst.0 {
            worst = (eps, u);
        }
    }
    RipReport {
        sparsity: k,
        trials: trials.max(1),
        measurements: m,
        epsilon_hat: worst.0,
        worst_case_vector: to_pairs(&worst.1),
    }
}

/// Sampled projection distortion of the quantized map against `Φ`.
///
/// Each sample draws fresh unit `k`-sparse `w, v` and a fresh dither.
pub fn empirical_lpd<R: Rng + ?Sized>(
    phi: &Array2<Complex64>,
    qcfg: &QuantizerConfig,
    k: usize,
    trials: usize,
    rng: &mut R,
) -> Result<LpdReport> {
    qcfg.validate()?;
    let (m, n) = phi.dim();
    let mut nu = 0.0f64;
    for _ in 0..trials.max(1) {
        let w = random_sparse_unit(n, k, rng);
        let v = random_sparse_unit(n, k, rng);
        let phi_w = apply(phi, &w);
        let phi_v = apply(phi, &v);
        // The quantizer takes two columns; only the first is used here.
        let mut gamma = Array2::zeros((m, 2));
        gamma.column_mut(0).assign(&phi_w);
        let q = QuantizerConfig { seed: rng.random(), ..*qcfg };
        let a_w = quantize_observations(&gamma, &q)?.z.column(0).to_owned();
        let dev = (inner(&a_w, &phi_v) - inner(&phi_w, &phi_v)).norm() / m as f64;
        nu = nu.max(dev);
    }
    Ok(LpdReport {
        sparsity: k,
        trials: trials.max(1),
        measurements: m,
        nu_hat: nu,
        delta: qcfg.delta,
        alpha: qcfg.alpha,
        bit_depth: qcfg.bit_depth,
    })
}

/// 1-bit width valid for every unit-norm `k`-sparse input: `|Φw|∞ ≤ ‖w‖₁ ≤ √k`
/// for unit-modulus `Φ`.
pub fn sparse_one_bit_delta(k: usize, margin: f64) -> f64 {
    margin * 2.0 * (k as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pbp::hard_threshold_joint;
    use crate::radar_model::{build_phi, RadarConfig};
    use crate::seed::rng_from;

    fn random_u<R: Rng>(n: usize, rng: &mut R) -> Array2<Complex64> {
        Array2::from_shape_fn((n, 2), |_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    }

    #[test]
    fn combinations_enumerate_binomial() {
        let mut c = vec![0, 1, 2];
        let mut count = 1;
        while next_combination(&mut c, 7) {
            count += 1;
        }
        assert_eq!(count, 35);
        assert_eq!(binomial(10, 3), 120);
        assert_eq!(binomial(5, 5), 1);
    }

    #[test]
    fn oracle_full_sparsity_is_identity() {
        let u = random_u(6, &mut rng_from(0, 0));
        let (v, d) = projector_oracle(u.view(), 6).unwrap();
        assert_eq!(v, u);
        assert_eq!(d, 0.0);
    }

    #[test]
    fn oracle_rejects_large_instances() {
        let u = Array2::zeros((60, 2));
        assert!(matches!(projector_oracle(u.view(), 10), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn oracle_distance_matches_closed_form() {
        let mut rng = rng_from(1, 0);
        for _ in 0..200 {
            let u = random_u(10, &mut rng);
            let (_, d) = projector_oracle(u.view(), 2).unwrap();
            let v = hard_threshold_joint(u.view(), 2).matrix;
            let dc: f64 = u.iter().zip(v.iter()).map(|(a, b)| (a - b).norm_sqr()).sum();
            assert!((d - dc).abs() <= 1e-12 * d.max(1e-300));
        }
    }

    #[test]
    fn tied_rows_give_equal_distance() {
        let u = Array2::from_elem((5, 2), Complex64::new(0.5, -0.5));
        let (_, d) = projector_oracle(u.view(), 2).unwrap();
        let v = hard_threshold_joint(u.view(), 2).matrix;
        let dc: f64 = u.iter().zip(v.iter()).map(|(a, b)| (a - b).norm_sqr()).sum();
        assert_eq!(d, dc);
    }

    #[test]
    fn rip_of_scaled_dft_vanishes() {
        let cfg = RadarConfig { num_freqs: 64, num_ranges: 64, sweep_samples: 64, ..RadarConfig::default() };
        let phi = build_phi(&cfg);
        let r = empirical_rip(&phi, 5, 200, &mut rng_from(2, 0));
        assert!(r.epsilon_hat < 1e-10, "{}", r.epsilon_hat);
        let r = empirical_rip(&phi, 1, 50, &mut rng_from(2, 1));
        assert!(r.epsilon_hat < 1e-10);
    }

    #[test]
    fn lpd_without_quantization_vanishes() {
        let cfg = RadarConfig { num_freqs: 64, num_ranges: 32, sweep_samples: 64, ..RadarConfig::default() };
        let phi = build_phi(&cfg);
        let q = QuantizerConfig { delta: 1.0, bit_depth: 32, alpha: 0.0, ..Default::default() };
        let r = empirical_lpd(&phi, &q, 2, 100, &mut rng_from(3, 0)).unwrap();
        assert!(r.nu_hat < 1e-12);
    }
}
