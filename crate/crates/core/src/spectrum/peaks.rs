use serde::Serialize;

use super::SpectrumSeries;

/// A local maximum of a sampled spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Peak {
    pub position: f64,
    pub height: f64,
    /// Full width at half maximum; `None` when neither flank falls to half
    /// height before the grid edge or a neighbouring valley.
    pub fwhm: Option<f64>,
}

/// Three-point local maxima refined by a parabola through the neighbours.
///
/// Widths come from linear interpolation of the half-height crossings. A
/// flank that reaches a valley before dropping to half height is mirrored
/// from the other side.
pub fn find_peaks(series: &SpectrumSeries) -> Vec<Peak> {
    let x = series.detunings();
    let y = &series.values;
    let n = y.len();
    if n < 3 {
        return Vec::new();
    }
    let floor = 1e-12 * series.max();
    let mut peaks = Vec::new();
    for i in 1..n - 1 {
        if !(y[i] > y[i - 1] && y[i] >= y[i + 1] && y[i] > floor) {
            continue;
        }
        let (position, height) = refine(x, y, i);
        let half = height / 2.0;
        let left = flank(x, y, i, half, false).map(|c| position - c);
        let right = flank(x, y, i, half, true).map(|c| c - position);
        let fwhm = match (left, right) {
            (Some(l), Some(r)) => Some(l + r),
            (Some(h), None) | (None, Some(h)) => Some(2.0 * h),
            (None, None) => None,
        };
        peaks.push(Peak { position, height, fwhm });
    }
    peaks
}

fn refine(x: &[f64], y: &[f64], i: usize) -> (f64, f64) {
    let (ym, y0, yp) = (y[i - 1], y[i], y[i + 1]);
    let curvature = ym - 2.0 * y0 + yp;
    if curvature >= 0.0 {
        return (x[i], y0);
    }
    let offset = 0.5 * (ym - yp) / curvature;
    let step = if offset >= 0.0 {
        x[i + 1] - x[i]
    } else {
        x[i] - x[i - 1]
    };
    (x[i] + offset * step, y0 - 0.25 * (ym - yp) * offset)
}

/// Position where the curve first drops to `half` walking away from `i`,
/// stopping at a local minimum or the grid edge.
fn flank(x: &[f64], y: &[f64], i: usize, half: f64, rightwards: bool) -> Option<f64> {
    let mut j = i;
    loop {
        let next = if rightwards {
            if j + 1 >= y.len() {
                return None;
            }
            j + 1
        } else {
            j.checked_sub(1)?
        };
        if y[next] <= half {
            let t = (y[j] - half) / (y[j] - y[next]);
            return Some(x[j] + t * (x[next] - x[j]));
        }
        if y[next] > y[j] {
            return None;
        }
        j = next;
    }
}

#[cfg(test)]
mod tests {
    use super::super::{DetuningGrid, Normalization, SpectrumSeries};
    use super::*;

    fn series(grid: DetuningGrid, f: impl Fn(f64) -> f64) -> SpectrumSeries {
        let values = grid.values().iter().map(|&d| f(d)).collect();
        SpectrumSeries {
            grid,
            values,
            normalization: Normalization::None,
        }
    }

    #[test]
    fn single_lorentzian() {
        let grid = DetuningGrid::uniform(-10.0, 10.0, 2001).unwrap();
        let s = series(grid, |d| 1.0 / (0.25 + (d - 0.3).powi(2)));
        let peaks = find_peaks(&s);
        assert_eq!(peaks.len(), 1);
        assert!((peaks[0].position - 0.3).abs() < 1e-3);
        assert!((peaks[0].fwhm.unwrap() - 1.0).abs() < 0.01);
        assert!((peaks[0].height - 4.0).abs() < 1e-2);
    }

    #[test]
    fn flat_series_has_no_peaks() {
        let grid = DetuningGrid::uniform(-1.0, 1.0, 21).unwrap();
        assert!(find_peaks(&series(grid.clone(), |_| 2.0)).is_empty());
        assert!(find_peaks(&series(grid, |_| 0.0)).is_empty());
    }

    #[test]
    fn two_separated_lines() {
        let grid = DetuningGrid::uniform(-10.0, 10.0, 2001).unwrap();
        let s = series(grid, |d| {
            1.0 / (1.0 + (d + 4.0).powi(2)) + 0.5 / (0.01 + (d - 3.0).powi(2))
        });
        let peaks = find_peaks(&s);
        assert_eq!(peaks.len(), 2);
        assert!((peaks[0].fwhm.unwrap() - 2.0).abs() < 0.05);
        assert!((peaks[1].fwhm.unwrap() - 0.2).abs() < 0.01);
    }

    #[test]
    fn edge_peak_without_flanks() {
        let grid = DetuningGrid::uniform(-1.0, 1.0, 21).unwrap();
        let s = series(grid, |d| 10.0 - d * d);
        let peaks = find_peaks(&s);
        assert_eq!(peaks.len(), 1);
        assert!(peaks[0].fwhm.is_none());
    }
}
