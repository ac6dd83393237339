use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::data::{fmt_f64, Point};
use crate::error::{invalid, Error, Result};
use crate::model::TrainedModel;
use crate::qsim::Shots;
use crate::rng::SeededRng;

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }
}

/// Default plotting region `[−0.5, 1.5]²`.
pub const DEFAULT_REGION: (Interval, Interval) = (Interval::new(-0.5, 1.5), Interval::new(-0.5, 1.5));

/// Scores `f(x) = 2p − 1` on a cell-centered lattice, row-major with rows
/// along y: `scores[iy * nx + ix]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionGrid {
    pub x_range: Interval,
    pub y_range: Interval,
    pub nx: usize,
    pub ny: usize,
    pub scores: Vec<f64>,
}

impl DecisionGrid {
    pub fn new(x_range: Interval, y_range: Interval, nx: usize, ny: usize, scores: Vec<f64>) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(invalid(format!("grid resolution must be >= 2 per axis, got {nx}x{ny}")));
        }
        if !(x_range.lo < x_range.hi && y_range.lo < y_range.hi) {
            return Err(invalid("grid ranges must have lo < hi"));
        }
        if scores.len() != nx * ny {
            return Err(invalid(format!("expected {} scores, got {}", nx * ny, scores.len())));
        }
        if scores.iter().any(|s| !(-1.0..=1.0).contains(s)) {
            return Err(invalid("grid scores must lie in [-1, 1]"));
        }
        Ok(Self {
            x_range,
            y_range,
            nx,
            ny,
            scores,
        })
    }

    pub fn x_at(&self, ix: usize) -> f64 {
        cell_center(self.x_range, self.nx, ix)
    }

    pub fn y_at(&self, iy: usize) -> f64 {
        cell_center(self.y_range, self.ny, iy)
    }

    pub fn score(&self, ix: usize, iy: usize) -> f64 {
        self.scores[iy * self.nx + ix]
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.nx == other.nx && self.ny == other.ny && self.x_range == other.x_range && self.y_range == other.y_range
    }

    pub fn map_scores(&self, f: impl FnMut(f64) -> f64) -> Self {
        Self {
            scores: self.scores.iter().copied().map(f).collect(),
            ..self.clone()
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y,f\n");
        for iy in 0..self.ny {
            for ix in 0..self.nx {
                out.push_str(&format!(
                    "{},{},{}\n",
                    fmt_f64(self.x_at(ix)),
                    fmt_f64(self.y_at(iy)),
                    fmt_f64(self.score(ix, iy))
                ));
            }
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_csv())?;
        Ok(())
    }

    /// Rebuilds a grid from `x,y,f` rows written by [`DecisionGrid::to_csv`].
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some("x,y,f") {
            return Err(Error::Parse("grid CSV must start with header 'x,y,f'".into()));
        }
        let mut rows: Vec<[f64; 3]> = Vec::new();
        for (i, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let vals: Vec<f64> = line
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::Parse(format!("grid CSV line {}: '{line}'", i + 2)))?;
            if vals.len() != 3 {
                return Err(Error::Parse(format!("grid CSV line {}: expected 3 fields", i + 2)));
            }
            rows.push([vals[0], vals[1], vals[2]]);
        }
        let nx = rows.iter().take_while(|r| r[1] == rows[0][1]).count();
        if nx < 2 || rows.len() % nx != 0 {
            return Err(Error::Parse("grid CSV is not a rectangular lattice".into()));
        }
        let ny = rows.len() / nx;
        let dx = rows[1][0] - rows[0][0];
        let dy = if ny > 1 { rows[nx][1] - rows[0][1] } else { 0.0 };
        let x_range = Interval::new(rows[0][0] - dx / 2.0, rows[nx - 1][0] + dx / 2.0);
        let y_range = Interval::new(rows[0][1] - dy / 2.0, rows[rows.len() - 1][1] + dy / 2.0);
        Self::new(x_range, y_range, nx, ny, rows.iter().map(|r| r[2]).collect())
    }
}

fn cell_center(range: Interval, n: usize, i: usize) -> f64 {
    range.lo + (i as f64 + 0.5) * (range.hi - range.lo) / n as f64
}

/// Evaluates `f(x) = 2p − 1` over the lattice. `shots` overrides the
/// quantum model's shot budget; classical models ignore it.
pub fn decision_grid(
    model: &TrainedModel,
    region: (Interval, Interval),
    resolution: (usize, usize),
    shots: Option<Shots>,
    rng: &mut SeededRng,
) -> Result<DecisionGrid> {
    let (nx, ny) = resolution;
    if nx < 2 || ny < 2 {
        return Err(invalid(format!("grid resolution must be >= 2 per axis, got {nx}x{ny}")));
    }
    let mut scores = Vec::with_capacity(nx * ny);
    for iy in 0..ny {
        for ix in 0..nx {
            let x: Point = [cell_center(region.0, nx, ix), cell_center(region.1, ny, iy)];
            let p = model.probability(&x, shots, rng)?;
            scores.push((2.0 * p - 1.0).clamp(-1.0, 1.0));
        }
    }
    DecisionGrid::new(region.0, region.1, nx, ny, scores)
}
