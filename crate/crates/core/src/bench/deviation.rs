//! Grid-to-grid deviation metrics and a synthetic degradation used to
//! exercise the deviation pipeline without device access.

use serde::{Deserialize, Serialize};

use super::grid::DecisionGrid;
use crate::error::{invalid, Result};
use crate::rng::SeededRng;

pub const HISTOGRAM_BINS: usize = 20;

/// Counts over 20 uniform bins on `[−1, 1]`; the last bin is closed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

impl Histogram {
    pub fn of(values: &[f64]) -> Self {
        let edges = (0..=HISTOGRAM_BINS)
            .map(|k| -1.0 + 2.0 * k as f64 / HISTOGRAM_BINS as f64)
            .collect();
        let mut counts = vec![0; HISTOGRAM_BINS];
        for &v in values {
            let idx = (((v + 1.0) / 2.0) * HISTOGRAM_BINS as f64).floor();
            let idx = (idx.max(0.0) as usize).min(HISTOGRAM_BINS - 1);
            counts[idx] += 1;
        }
        Self { edges, counts }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridDeviation {
    pub mad: f64,
    pub mse: f64,
    /// `|a − b|` in the grids' row-major layout.
    pub absdiff: Vec<f64>,
    pub hist_a: Histogram,
    pub hist_b: Histogram,
}

pub fn grid_deviation(a: &DecisionGrid, b: &DecisionGrid) -> Result<GridDeviation> {
    if !a.same_shape(b) {
        return Err(invalid("grids differ in region or resolution"));
    }
    let absdiff: Vec<f64> = a.scores.iter().zip(&b.scores).map(|(x, y)| (x - y).abs()).collect();
    let n = absdiff.len() as f64;
    let mad = absdiff.iter().sum::<f64>() / n;
    let mse = absdiff.iter().map(|d| d * d).sum::<f64>() / n;
    Ok(GridDeviation {
        mad,
        mse,
        absdiff,
        hist_a: Histogram::of(&a.scores),
        hist_b: Histogram::of(&b.scores),
    })
}

/// `s ← clamp(contraction·s + bias + noise, −1, 1)`. With `noise_shots`,
/// the noise is a binomial shot draw around the contracted score.
pub fn synthetic_degradation(
    grid: &DecisionGrid,
    contraction: f64,
    bias: f64,
    noise_shots: Option<u32>,
    rng: &mut SeededRng,
) -> Result<DecisionGrid> {
    if !(contraction.is_finite() && bias.is_finite()) {
        return Err(invalid("contraction and bias must be finite"));
    }
    if noise_shots == Some(0) {
        return Err(invalid("noise shots must be >= 1"));
    }
    Ok(grid.map_scores(|s| {
        let mut v = (contraction * s + bias).clamp(-1.0, 1.0);
        if let Some(n) = noise_shots {
            v = crate::qsim::sample_z_from_expectation(v, n, rng);
        }
        v.clamp(-1.0, 1.0)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::grid::Interval;

    fn constant(v: f64) -> DecisionGrid {
        DecisionGrid::new(Interval::new(0.0, 1.0), Interval::new(0.0, 1.0), 3, 3, vec![v; 9]).unwrap()
    }

    #[test]
    fn identical_grids_have_zero_deviation() {
        let g = constant(0.3);
        let d = grid_deviation(&g, &g).unwrap();
        assert_eq!((d.mad, d.mse), (0.0, 0.0));
    }

    #[test]
    fn opposite_constants() {
        let d = grid_deviation(&constant(1.0), &constant(-1.0)).unwrap();
        assert_eq!((d.mad, d.mse), (2.0, 4.0));
        assert_eq!(d.hist_a.counts[19], 9);
        assert_eq!(d.hist_b.counts[0], 9);
    }

    #[test]
    fn shape_mismatch() {
        let other = DecisionGrid::new(Interval::new(0.0, 1.0), Interval::new(0.0, 1.0), 2, 2, vec![0.0; 4]).unwrap();
        assert!(grid_deviation(&constant(0.0), &other).is_err());
    }

    #[test]
    fn histogram_has_twenty_bins() {
        let h = Histogram::of(&[-1.0, -0.85, 0.0, 0.999, 1.0]);
        assert_eq!(h.counts.len(), 20);
        assert_eq!(h.edges.len(), 21);
        assert_eq!(h.counts.iter().sum::<usize>(), 5);
        assert_eq!(h.counts[0], 1);
        assert_eq!(h.counts[1], 1);
        assert_eq!(h.counts[10], 1);
        assert_eq!(h.counts[19], 2);
    }

    #[test]
    fn degradation_examples() {
        let g = DecisionGrid::new(Interval::new(0.0, 1.0), Interval::new(0.0, 1.0), 2, 2, vec![1.0, -1.0, 0.5, -0.2]).unwrap();
        let mut rng = SeededRng::new(0);
        assert_eq!(synthetic_degradation(&g, 1.0, 0.0, None, &mut rng).unwrap(), g);
        let flat = synthetic_degradation(&g, 0.0, 0.25, None, &mut rng).unwrap();
        assert!(flat.scores.iter().all(|&s| s == 0.25));
        let clamped = synthetic_degradation(&g, 0.0, 3.0, None, &mut rng).unwrap();
        assert!(clamped.scores.iter().all(|&s| s == 1.0));

        let sat = DecisionGrid::new(Interval::new(0.0, 1.0), Interval::new(0.0, 1.0), 2, 2, vec![1.0, -1.0, 1.0, -1.0]).unwrap();
        let squeezed = synthetic_degradation(&sat, 0.7, 0.0, None, &mut rng).unwrap();
        assert!(squeezed.scores.iter().all(|s| s.abs() <= 0.7 + 1e-12));
        let noisy = synthetic_degradation(&sat, 0.7, 0.0, Some(1024), &mut rng).unwrap();
        assert!(noisy.scores.iter().all(|s| s.abs() <= 0.7 + 0.2));
    }
}
