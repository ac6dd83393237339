//! Trained-model wrapper shared by grids, records and checkpoints.

use serde::{Deserialize, Serialize};

use crate::classical::{Classifier, LinearModel, MlpModel};
use crate::data::Point;
use crate::error::{invalid, Error, Result};
use crate::qsim::Shots;
use crate::rng::SeededRng;
use crate::vqc::{vqc_probability, vqc_score, VqcModel};

/// Which architecture a run trains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModelSpec {
    Lr,
    Mlp { hidden: usize },
    Vqc { depth: usize, shots: Shots },
}

impl ModelSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            ModelSpec::Lr => "LR",
            ModelSpec::Mlp { .. } => "MLP",
            ModelSpec::Vqc { .. } => "VQC",
        }
    }

    /// Human-readable row label, e.g. `VQC(L=2; 1024 shots)`.
    pub fn label(&self) -> String {
        match self {
            ModelSpec::Lr => "LR".to_string(),
            ModelSpec::Mlp { hidden } => format!("MLP(h={hidden})"),
            ModelSpec::Vqc { depth, shots: Shots::Analytic } => format!("VQC(L={depth}; analytic)"),
            ModelSpec::Vqc { depth, shots: Shots::Finite(n) } => format!("VQC(L={depth}; {n} shots)"),
        }
    }

    /// Short identifier safe for file names.
    pub fn slug(&self) -> String {
        match self {
            ModelSpec::Lr => "lr".to_string(),
            ModelSpec::Mlp { hidden } => format!("mlp_h{hidden}"),
            ModelSpec::Vqc { depth, shots } => format!("vqc_L{depth}_{shots}"),
        }
    }

    pub fn n_params(&self) -> usize {
        match self {
            ModelSpec::Lr => 3,
            ModelSpec::Mlp { hidden } => 4 * hidden + 1,
            ModelSpec::Vqc { depth, .. } => 6 * depth,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ModelSpec::Mlp { hidden: 0 } => Err(invalid("MLP hidden units must be >= 1")),
            ModelSpec::Vqc { depth: 0, .. } => Err(invalid("VQC depth must be >= 1")),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrainedModel {
    Linear(LinearModel),
    Mlp(MlpModel),
    Vqc(VqcModel),
}

impl TrainedModel {
    /// `p(y=1|x)`. Quantum models sample when they (or `shots_override`)
    /// carry a finite shot budget; classical models ignore both.
    pub fn probability(&self, x: &Point, shots_override: Option<Shots>, rng: &mut SeededRng) -> Result<f64> {
        match self {
            TrainedModel::Linear(m) => Ok(m.predict_proba(x)),
            TrainedModel::Mlp(m) => Ok(m.predict_proba(x)),
            TrainedModel::Vqc(m) => {
                let m = match shots_override {
                    Some(s) if s != m.shots => std::borrow::Cow::Owned(m.with_shots(s)),
                    _ => std::borrow::Cow::Borrowed(m),
                };
                vqc_probability(vqc_score(&m, x, rng)?)
            }
        }
    }

    pub fn n_params(&self) -> usize {
        match self {
            TrainedModel::Linear(m) => m.n_params(),
            TrainedModel::Mlp(m) => m.n_params(),
            TrainedModel::Vqc(m) => m.n_params(),
        }
    }
}

/// JSON checkpoint. VQC: `{model, depth_L, params, shots, seed}`; the
/// classical models mirror it with `hidden_h` in place of `depth_L`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub model: String,
    #[serde(rename = "depth_L", default, skip_serializing_if = "Option::is_none")]
    pub depth_l: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hidden_h: Option<usize>,
    pub params: Vec<f64>,
    #[serde(default)]
    pub shots: Shots,
    pub seed: u64,
}

impl Checkpoint {
    pub fn from_model(model: &TrainedModel, seed: u64) -> Self {
        match model {
            TrainedModel::Linear(m) => Self {
                model: "lr".into(),
                depth_l: None,
                hidden_h: None,
                params: m.params(),
                shots: Shots::Analytic,
                seed,
            },
            TrainedModel::Mlp(m) => Self {
                model: "mlp".into(),
                depth_l: None,
                hidden_h: Some(m.hidden_units()),
                params: m.params(),
                shots: Shots::Analytic,
                seed,
            },
            TrainedModel::Vqc(m) => Self {
                model: "vqc".into(),
                depth_l: Some(m.depth()),
                hidden_h: None,
                params: m.params().to_vec(),
                shots: m.shots,
                seed,
            },
        }
    }

    pub fn to_model(&self) -> Result<TrainedModel> {
        match self.model.as_str() {
            "lr" => {
                if self.params.len() != 3 {
                    return Err(invalid("LR checkpoint needs 3 parameters"));
                }
                let mut m = LinearModel { w: [0.0; 2], b: 0.0 };
                m.set_params(&self.params);
                Ok(TrainedModel::Linear(m))
            }
            "mlp" => {
                let h = self.hidden_h.ok_or_else(|| invalid("MLP checkpoint lacks hidden_h"))?;
                let mut m = MlpModel::zeros(h)?;
                if self.params.len() != m.n_params() {
                    return Err(invalid("MLP checkpoint parameter count mismatch"));
                }
                m.set_params(&self.params);
                Ok(TrainedModel::Mlp(m))
            }
            "vqc" => {
                let l = self.depth_l.ok_or_else(|| invalid("VQC checkpoint lacks depth_L"))?;
                Ok(TrainedModel::Vqc(VqcModel::new(l, self.params.clone(), self.shots)?))
            }
            other => Err(invalid(format!("unknown model kind '{other}'"))),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("checkpoint serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}
