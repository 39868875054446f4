//! Projected back projection (PBP) and polar target extraction.
//!
//! The estimate is `X̂ = P(Φ* Z / M)` where `P` is the Frobenius projection
//! onto matrices whose two columns share a support of at most `K` rows. That
//! projection keeps the `K` rows with the largest joint magnitude
//! `S(U)_n = (|U_n1|² + |U_n2|²)^½` and zeroes the others.

use ndarray::{Array2, ArrayView2};
use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::radar_model::RadarConfig;

/// A matrix of `Θ^K` together with its (sorted) support.
#[derive(Debug, Clone, PartialEq)]
pub struct JointSparse {
    pub matrix: Array2<Complex64>,
    pub support: Vec<usize>,
}

/// A localized target in polar coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectedTarget {
    pub range_bin: usize,
    pub range: f64,
    /// Radians.
    pub angle: f64,
    /// Joint magnitude of the estimate row.
    pub magnitude: f64,
    /// Set when the row is identically zero and the angle is meaningless.
    pub degenerate: bool,
}

impl DetectedTarget {
    pub fn position(&self) -> (f64, f64) {
        (self.range, self.angle)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub x_hat: Array2<Complex64>,
    pub support: Vec<usize>,
    pub targets: Vec<DetectedTarget>,
}

impl Estimate {
    pub fn positions(&self) -> Vec<(f64, f64)> {
        self.targets.iter().map(DetectedTarget::position).collect()
    }
}

/// `Φ* Z / M`.
pub fn back_project(phi: &Array2<Complex64>, z: ArrayView2<Complex64>) -> Result<Array2<Complex64>> {
    if phi.nrows() != z.nrows() {
        return Err(Error::ShapeMismatch(format!(
            "Φ has {} rows but Z has {}",
            phi.nrows(),
            z.nrows()
        )));
    }
    let (m, n) = phi.dim();
    let cols = z.ncols();
    let mut out = Array2::<Complex64>::zeros((n, cols));
    // Row-major sweep over Φ keeps the inner loop contiguous.
    let mut acc = vec![Complex64::ZERO; n * cols];
    for (phi_row, z_row) in phi.rows().into_iter().zip(z.rows()) {
        for (j, &p) in phi_row.iter().enumerate() {
            let pc = p.conj();
            for (c, &zz) in z_row.iter().enumerate() {
                acc[j * cols + c] += pc * zz;
            }
        }
    }
    let scale = 1.0 / m as f64;
    for (o, a) in out.iter_mut().zip(acc) {
        *o = a * scale;
    }
    Ok(out)
}

/// Row-wise `(|U_n1|² + |U_n2|²)^½`.
pub fn joint_magnitude(u: ArrayView2<Complex64>) -> Vec<f64> {
    u.rows()
        .into_iter()
        .map(|r| r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect()
}

/// Indices of the `k` largest values; ties go to the lowest index. Sorted ascending.
pub(crate) fn top_k(values: &[f64], k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    order.truncate(k);
    order.sort_unstable();
    order
}

/// Projection onto `Θ^K`: keep the `k` rows of largest joint magnitude.
pub fn hard_threshold_joint(u: ArrayView2<Complex64>, k: usize) -> JointSparse {
    let k = k.min(u.nrows());
    let support = top_k(&joint_magnitude(u), k);
    let mut matrix = Array2::zeros(u.dim());
    for &n in &support {
        matrix.row_mut(n).assign(&u.row(n));
    }
    JointSparse { matrix, support }
}

/// `P_{Θ^K}(Φ* Z / M)`.
pub fn pbp(phi: &Array2<Complex64>, z: ArrayView2<Complex64>, k: usize) -> Result<JointSparse> {
    if k == 0 || k > phi.ncols() {
        return Err(Error::Validation(vec![format!(
            "sparsity must be in 1..={}, got {k}",
            phi.ncols()
        )]));
    }
    Ok(hard_threshold_joint(back_project(phi, z)?.view(), k))
}

/// Angle from the inter-antenna phase of one estimate row.
///
/// Uses `∠(x̂1* x̂2)`, the orientation under which synthesis followed by
/// extraction returns the scene angle; the arcsin argument is clamped.
pub fn row_angle(x1: Complex64, x2: Complex64, cfg: &RadarConfig) -> f64 {
    let phase = (x1.conj() * x2).arg();
    (phase / cfg.phase_per_sine()).clamp(-1.0, 1.0).asin()
}

/// Polar coordinates of every support row.
pub fn extract_targets(est: &JointSparse, cfg: &RadarConfig) -> Vec<DetectedTarget> {
    est.support
        .iter()
        .map(|&n| {
            let (x1, x2) = (est.matrix[[n, 0]], est.matrix[[n, 1]]);
            let magnitude = (x1.norm_sqr() + x2.norm_sqr()).sqrt();
            DetectedTarget {
                range_bin: n,
                range: cfg.range_of_bin(n),
                angle: row_angle(x1, x2, cfg),
                magnitude,
                degenerate: magnitude == 0.0,
            }
        })
        .collect()
}

/// PBP followed by target extraction.
pub fn localize(phi: &Array2<Complex64>, z: ArrayView2<Complex64>, k: usize, cfg: &RadarConfig) -> Result<Estimate> {
    let js = pbp(phi, z, k)?;
    let targets = extract_targets(&js, cfg);
    Ok(Estimate {
        x_hat: js.matrix,
        support: js.support,
        targets,
    })
}

/// CSV rows `range_m,angle_deg,magnitude` for an estimate.
pub fn estimate_csv(est: &Estimate) -> String {
    let mut s = String::from("range_m,angle_deg,magnitude\n");
    for t in &est.targets {
        s.push_str(&format!(
            "{:.16e},{:.16e},{:.16e}\n",
            t.range,
            t.angle * 180.0 / PI,
            t.magnitude
        ));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radar_model::{build_phi, sense, signal_matrix, Scene, Target};
    use ndarray::array;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn small_cfg(n: usize) -> RadarConfig {
        RadarConfig { num_freqs: n, num_ranges: n, sweep_samples: n, ..RadarConfig::default() }
    }

    #[test]
    fn back_project_zero_and_shape() {
        let phi = build_phi(&small_cfg(16));
        let z = Array2::zeros((16, 2));
        assert!(back_project(&phi, z.view()).unwrap().iter().all(|v| *v == Complex64::ZERO));
        let bad = Array2::zeros((15, 2));
        assert!(matches!(back_project(&phi, bad.view()), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn back_project_recovers_column() {
        let cfg = small_cfg(32);
        let phi = build_phi(&cfg);
        let mut z = Array2::zeros((32, 1));
        z.column_mut(0).assign(&phi.column(7));
        let u = back_project(&phi, z.view()).unwrap();
        for n in 0..32 {
            let want = if n == 7 { 1.0 } else { 0.0 };
            assert!((u[[n, 0]] - c(want, 0.0)).norm() < 1e-9);
        }
    }

    #[test]
    fn back_project_is_linear() {
        let phi = build_phi(&small_cfg(8));
        let z1 = Array2::from_shape_fn((8, 2), |(i, j)| c(i as f64, j as f64 - 0.5));
        let z2 = Array2::from_shape_fn((8, 2), |(i, j)| c((i * j) as f64, 1.0));
        let sum = back_project(&phi, (&z1 + &z2).view()).unwrap();
        let parts = back_project(&phi, z1.view()).unwrap() + back_project(&phi, z2.view()).unwrap();
        for (a, b) in sum.iter().zip(parts.iter()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn joint_magnitude_examples() {
        let u = array![[c(3.0, 0.0), c(0.0, 4.0)], [c(0.0, 0.0), c(0.0, 0.0)]];
        assert_eq!(joint_magnitude(u.view()), vec![5.0, 0.0]);
        let scaled = u.mapv(|z| z * c(0.0, -2.0));
        assert_eq!(joint_magnitude(scaled.view()), vec![10.0, 0.0]);
    }

    #[test]
    fn threshold_identity_and_single_row() {
        let u = Array2::from_shape_fn((5, 2), |(i, j)| c(i as f64 + 1.0, j as f64));
        let v = hard_threshold_joint(u.view(), 5);
        assert_eq!(v.matrix, u);
        assert_eq!(v.support, vec![0, 1, 2, 3, 4]);

        let mut u = Array2::zeros((6, 2));
        u[[4, 1]] = c(0.0, -2.0);
        let v = hard_threshold_joint(u.view(), 1);
        assert_eq!(v.support, vec![4]);
        assert_eq!(v.matrix, u);
    }

    #[test]
    fn threshold_ties_prefer_low_index() {
        let u = Array2::from_elem((4, 2), c(1.0, 0.0));
        assert_eq!(hard_threshold_joint(u.view(), 2).support, vec![0, 1]);
    }

    #[test]
    fn pbp_of_zero_is_zero() {
        let phi = build_phi(&small_cfg(8));
        let z = Array2::zeros((8, 2));
        let est = pbp(&phi, z.view(), 3).unwrap();
        assert_eq!(est.support, vec![0, 1, 2]);
        assert!(est.matrix.iter().all(|v| *v == Complex64::ZERO));
        let targets = extract_targets(&est, &small_cfg(8));
        assert!(targets.iter().all(|t| t.degenerate && t.magnitude == 0.0));
    }

    #[test]
    fn pbp_rejects_bad_sparsity() {
        let phi = build_phi(&small_cfg(8));
        let z = Array2::zeros((8, 2));
        assert!(pbp(&phi, z.view(), 0).is_err());
        assert!(pbp(&phi, z.view(), 9).is_err());
    }

    #[test]
    fn pbp_finds_unquantized_support() {
        let cfg = small_cfg(64);
        let phi = build_phi(&cfg);
        let scene = Scene::new(vec![Target { range_bin: 40, angle: 0.2, amplitude: 1.0, phase: 1.0 }]);
        let x = signal_matrix(&cfg, &scene).unwrap();
        let z = sense(&phi, &x).unwrap();
        assert_eq!(pbp(&phi, z.view(), 1).unwrap().support, vec![40]);
    }

    #[test]
    fn angle_extraction_examples() {
        let cfg = RadarConfig::default();
        assert_eq!(row_angle(c(0.3, 0.4), c(0.3, 0.4), &cfg), 0.0);
        let a = row_angle(c(1.0, 0.0), c(-1.0, 0.0), &cfg);
        assert!((a.abs() - PI / 2.0).abs() < 1e-12);
        // Spacing below half a wavelength can overshoot; clamped.
        let narrow = RadarConfig { antenna_spacing: cfg.half_wavelength() / 2.0, ..cfg };
        assert!((row_angle(c(1.0, 0.0), c(-1.0, 0.0), &narrow) - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn angle_round_trip_noiseless() {
        let cfg = RadarConfig { num_freqs: 256, ..RadarConfig::default() };
        let phi = build_phi(&cfg);
        let theta = 30f64.to_radians();
        let scene = Scene::new(vec![Target { range_bin: 99, angle: theta, amplitude: 1.0, phase: 0.0 }]);
        let x = signal_matrix(&cfg, &scene).unwrap();
        let z = sense(&phi, &x).unwrap();
        let est = localize(&phi, z.view(), 1, &cfg).unwrap();
        assert_eq!(est.support, vec![99]);
        assert!((est.targets[0].angle - theta).abs() < 1e-9);
    }

    #[test]
    fn csv_has_header_and_rows() {
        let cfg = small_cfg(8);
        let phi = build_phi(&cfg);
        let est = localize(&phi, Array2::zeros((8, 2)).view(), 2, &cfg).unwrap();
        let csv = estimate_csv(&est);
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.starts_with("range_m,angle_deg,magnitude\n"));
    }
}
