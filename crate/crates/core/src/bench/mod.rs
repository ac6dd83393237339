//! Metrics, decision grids, sweeps, loss landscapes, separability and grid
//! deviation analysis.

pub mod deviation;
pub mod grid;
pub mod landscape;
pub mod record;
pub mod runner;
pub mod separability;
pub mod sweep;

pub use crate::metrics::accuracy;
pub use deviation::{grid_deviation, synthetic_degradation, GridDeviation, Histogram};
pub use grid::{decision_grid, DecisionGrid, Interval, DEFAULT_REGION};
pub use landscape::{landscape_value, loss_landscape_slice, LandscapeSlice};
pub use record::{runs_csv, RunRecord, RUN_CSV_HEADER};
pub use runner::{run_cell, run_cells, Cell, CellOutcome, DatasetSpec, TrainSettings};
pub use separability::{check_linear_separability, Separability};
pub use sweep::{run_sweep, SweepOutput, SweepPoint, SweepResult, SweepRow};
