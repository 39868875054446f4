//! Position error and polar error maps.

use num_complex::Complex64;
use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Cartesian distance `min_k |R e^{iθ} - R̂_k e^{iθ̂_k}|` between a true
/// position and the closest estimate.
pub fn position_error(truth: (f64, f64), estimates: &[(f64, f64)]) -> Result<f64> {
    let t = Complex64::from_polar(truth.0, truth.1);
    estimates
        .iter()
        .map(|&(r, a)| (t - Complex64::from_polar(r, a)).norm())
        .min_by(f64::total_cmp)
        .ok_or(Error::EmptyEstimate)
}

/// Mean position error accumulated over a polar grid covering
/// `[0, max_range] × [-π/2, π/2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorMap {
    pub range_bins: usize,
    pub angle_bins: usize,
    pub max_range: f64,
    sum_error: Vec<f64>,
    count: Vec<u64>,
}

impl ErrorMap {
    pub fn new(range_bins: usize, angle_bins: usize, max_range: f64) -> Self {
        ErrorMap {
            range_bins,
            angle_bins,
            max_range,
            sum_error: vec![0.0; range_bins * angle_bins],
            count: vec![0; range_bins * angle_bins],
        }
    }

    fn index(&self, cell: (usize, usize)) -> Result<usize> {
        if cell.0 >= self.range_bins || cell.1 >= self.angle_bins {
            return Err(Error::IndexOutOfRange {
                range_cell: cell.0,
                angle_cell: cell.1,
                range_bins: self.range_bins,
                angle_bins: self.angle_bins,
            });
        }
        Ok(cell.0 * self.angle_bins + cell.1)
    }

    pub fn accumulate(&mut self, cell: (usize, usize), error: f64) -> Result<()> {
        let i = self.index(cell)?;
        self.sum_error[i] += error;
        self.count[i] += 1;
        Ok(())
    }

    /// Adds another map of the same shape cell by cell.
    pub fn merge(&mut self, other: &ErrorMap) -> Result<()> {
        if (self.range_bins, self.angle_bins) != (other.range_bins, other.angle_bins) {
            return Err(Error::ShapeMismatch(format!(
                "cannot merge {}x{} map into {}x{}",
                other.range_bins, other.angle_bins, self.range_bins, self.angle_bins
            )));
        }
        for (a, b) in self.sum_error.iter_mut().zip(&other.sum_error) {
            *a += b;
        }
        for (a, b) in self.count.iter_mut().zip(&other.count) {
            *a += b;
        }
        Ok(())
    }

    pub fn count(&self, cell: (usize, usize)) -> Result<u64> {
        Ok(self.count[self.index(cell)?])
    }

    /// Mean error of a cell, `None` when nothing landed there.
    pub fn mean(&self, cell: (usize, usize)) -> Result<Option<f64>> {
        let i = self.index(cell)?;
        Ok((self.count[i] > 0).then(|| self.sum_error[i] / self.count[i] as f64))
    }

    pub fn range_width(&self) -> f64 {
        self.max_range / self.range_bins as f64
    }

    pub fn angle_width(&self) -> f64 {
        PI / self.angle_bins as f64
    }

    /// Center of a cell as `(range m, angle rad)`.
    pub fn cell_center(&self, cell: (usize, usize)) -> (f64, f64) {
        (
            (cell.0 as f64 + 0.5) * self.range_width(),
            -PI / 2.0 + (cell.1 as f64 + 0.5) * self.angle_width(),
        )
    }

    /// Cell containing a polar position, clamped to the grid edges.
    pub fn cell_of(&self, range: f64, angle: f64) -> (usize, usize) {
        let i = (range / self.range_width()).floor().max(0.0) as usize;
        let j = ((angle + PI / 2.0) / self.angle_width()).floor().max(0.0) as usize;
        (i.min(self.range_bins - 1), j.min(self.angle_bins - 1))
    }

    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.range_bins).flat_map(move |i| (0..self.angle_bins).map(move |j| (i, j)))
    }

    pub fn empty_cells(&self) -> usize {
        self.count.iter().filter(|&&c| c == 0).count()
    }

    pub fn nonempty_cells(&self) -> usize {
        self.count.len() - self.empty_cells()
    }

    /// `range_center_m,angle_center_deg,mean_error_m,count`, range-major.
    /// Empty cells carry `NaN` as their mean.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("range_center_m,angle_center_deg,mean_error_m,count\n");
        for cell in self.cells() {
            let (r, a) = self.cell_center(cell);
            let i = cell.0 * self.angle_bins + cell.1;
            let mean = if self.count[i] > 0 {
                format!("{:.16e}", self.sum_error[i] / self.count[i] as f64)
            } else {
                "NaN".to_string()
            };
            let _ = writeln!(s, "{:.6},{:.6},{},{}", r, a.to_degrees(), mean, self.count[i]);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn position_error_examples() {
        assert_eq!(position_error((10.0, 0.0), &[(10.0, 0.0)]).unwrap(), 0.0);
        let e = position_error((10.0, 0.0), &[(10.0, PI / 2.0)]).unwrap();
        assert!((e - 10.0 * 2f64.sqrt()).abs() < 1e-12);
        let e = position_error((5.0, 30f64.to_radians()), &[(6.0, 30f64.to_radians()), (5.0, 32f64.to_radians())]).unwrap();
        assert!((e - 10.0 * 1f64.to_radians().sin()).abs() < 1e-12);
        assert!((e - 0.1745).abs() < 1e-4);
        assert!(matches!(position_error((1.0, 0.0), &[]), Err(Error::EmptyEstimate)));
    }

    #[test]
    fn accumulate_and_mean() {
        let mut map = ErrorMap::new(4, 3, 10.0);
        map.accumulate((1, 2), 2.0).unwrap();
        assert_eq!(map.mean((1, 2)).unwrap(), Some(2.0));
        map.accumulate((0, 0), 1.0).unwrap();
        map.accumulate((0, 0), 3.0).unwrap();
        assert_eq!(map.mean((0, 0)).unwrap(), Some(2.0));
        assert_eq!(map.mean((3, 1)).unwrap(), None);
        assert!(matches!(map.accumulate((4, 0), 1.0), Err(Error::IndexOutOfRange { .. })));
        assert!(map.to_csv().contains(",NaN,0\n"));
        assert_eq!(map.to_csv().lines().count(), 13);
    }

    #[test]
    fn cell_lookup_round_trips_centers() {
        let map = ErrorMap::new(20, 20, 153.6);
        for cell in map.cells() {
            let (r, a) = map.cell_center(cell);
            assert_eq!(map.cell_of(r, a), cell);
        }
        assert_eq!(map.cell_of(1e9, 10.0), (19, 19));
        assert_eq!(map.cell_of(-1.0, -10.0), (0, 0));
    }
}
