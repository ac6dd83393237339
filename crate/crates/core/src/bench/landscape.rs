use serde::{Deserialize, Serialize};

use crate::data::LabeledDataset;
use crate::error::{invalid, Result};
use crate::qsim::Shots;
use crate::rng::SeededRng;
use crate::vqc::{vqc_loss, VqcModel};

/// Training BCE on a 2-D slice through parameter space around `θ*`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandscapeSlice {
    pub axis_i: usize,
    pub axis_j: usize,
    /// Offsets applied to `θ_i` and `θ_j` (shared lattice).
    pub offsets: Vec<f64>,
    /// `values[a][b]` is the loss at `(θ_i + offsets[a], θ_j + offsets[b])`.
    pub values: Vec<Vec<f64>>,
}

impl LandscapeSlice {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("d_i,d_j,bce\n");
        for (a, di) in self.offsets.iter().enumerate() {
            for (b, dj) in self.offsets.iter().enumerate() {
                out.push_str(&format!("{di},{dj},{}\n", self.values[a][b]));
            }
        }
        out
    }
}

/// Exact training BCE with `θ_i` and `θ_j` shifted by `(di, dj)`.
pub fn landscape_value(
    model: &VqcModel,
    data: &LabeledDataset,
    axis_i: usize,
    axis_j: usize,
    di: f64,
    dj: f64,
) -> Result<f64> {
    let mut params = model.params().to_vec();
    params[axis_i] += di;
    params[axis_j] += dj;
    let shifted = VqcModel::new(model.depth(), params, Shots::Analytic)?;
    vqc_loss(&shifted, data, &mut SeededRng::new(0))
}

/// Evaluates a `resolution × resolution` lattice over `[−span, span]²`.
/// With odd resolution the middle entry is `θ*` itself.
pub fn loss_landscape_slice(
    model: &VqcModel,
    data: &LabeledDataset,
    axis_i: usize,
    axis_j: usize,
    span: f64,
    resolution: usize,
) -> Result<LandscapeSlice> {
    let n = model.n_params();
    if axis_i >= n || axis_j >= n {
        return Err(invalid(format!("axes ({axis_i}, {axis_j}) out of range for {n} parameters")));
    }
    if axis_i == axis_j {
        return Err(invalid("landscape axes must differ"));
    }
    if resolution < 2 {
        return Err(invalid("landscape resolution must be >= 2"));
    }
    if !(span.is_finite() && span > 0.0) {
        return Err(invalid("span must be positive"));
    }
    let offsets: Vec<f64> = (0..resolution)
        .map(|k| {
            if 2 * k + 1 == resolution {
                0.0
            } else {
                -span + 2.0 * span * k as f64 / (resolution - 1) as f64
            }
        })
        .collect();
    let values = offsets
        .iter()
        .map(|&di| {
            offsets
                .iter()
                .map(|&dj| landscape_value(model, data, axis_i, axis_j, di, dj))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LandscapeSlice {
        axis_i,
        axis_j,
        offsets,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::gen_dataset_a;
    use std::f64::consts::TAU;

    #[test]
    fn center_and_periodicity() {
        let a = gen_dataset_a();
        let m = VqcModel::init(2, Shots::Analytic, 5).unwrap();
        let slice = loss_landscape_slice(&m, &a, 0, 7, 1.0, 5).unwrap();
        let center = slice.values[2][2];
        let direct = vqc_loss(&m, &a, &mut SeededRng::new(0)).unwrap();
        assert_eq!(center, direct);
        let wrapped = landscape_value(&m, &a, 0, 7, TAU, 0.0).unwrap();
        assert!((wrapped - center).abs() < 1e-9);
        assert_eq!(slice.to_csv().lines().count(), 26);
    }

    #[test]
    fn argument_errors() {
        let a = gen_dataset_a();
        let m = VqcModel::init(1, Shots::Analytic, 5).unwrap();
        assert!(loss_landscape_slice(&m, &a, 0, 6, 1.0, 5).is_err());
        assert!(loss_landscape_slice(&m, &a, 2, 2, 1.0, 5).is_err());
        assert!(loss_landscape_slice(&m, &a, 0, 1, 1.0, 1).is_err());
    }
}
