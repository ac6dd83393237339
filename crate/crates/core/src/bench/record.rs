use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::data::Provenance;
use crate::model::ModelSpec;
use crate::optim::FitSummary;

pub const RUN_CSV_HEADER: &str = "run_id,model,variant,sigma,n_per_cluster,threshold_t,seed,L,h,shots,lr,epochs,n_params,train_acc,test_acc,train_bce,test_bce,train_time_s";

/// One training run: configuration, data provenance and final metrics.
/// A diverged run keeps `summary = None` and the error message.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run_id: String,
    pub model: ModelSpec,
    pub provenance: Provenance,
    pub seed: u64,
    pub lr: f64,
    pub epochs: usize,
    pub n_params: usize,
    pub summary: Option<FitSummary>,
    /// Class counts `[y=0, y=1]` of the test split.
    pub test_class_counts: [usize; 2],
    /// Whether `summary.train_time_s` is a real measurement.
    pub timed: bool,
    pub error: Option<String>,
}

impl RunRecord {
    pub fn test_acc(&self) -> f64 {
        self.summary.map_or(f64::NAN, |s| s.test_acc)
    }

    pub fn test_bce(&self) -> f64 {
        self.summary.map_or(f64::NAN, |s| s.test_bce)
    }

    pub fn train_acc(&self) -> f64 {
        self.summary.map_or(f64::NAN, |s| s.train_acc)
    }

    pub fn csv_row(&self) -> String {
        let (l, h, shots) = match self.model {
            ModelSpec::Lr => (String::new(), String::new(), String::new()),
            ModelSpec::Mlp { hidden } => (String::new(), hidden.to_string(), String::new()),
            ModelSpec::Vqc { depth, shots } => (depth.to_string(), String::new(), shots.to_string()),
        };
        let p = &self.provenance;
        let (n_per_cluster, sigma) = match p.variant {
            crate::data::Variant::C => (String::new(), String::new()),
            _ => (p.n_per_cluster.to_string(), p.sigma.to_string()),
        };
        let metrics = match self.summary {
            Some(s) => {
                let time = if self.timed { format!("{:.6}", s.train_time_s) } else { String::new() };
                format!("{},{},{},{},{}", s.train_acc, s.test_acc, s.train_bce, s.test_bce, time)
            }
            None => "NaN,NaN,NaN,NaN,".to_string(),
        };
        let mut row = String::new();
        write!(
            row,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.run_id,
            self.model.kind(),
            p.variant,
            sigma,
            n_per_cluster,
            p.threshold_t,
            self.seed,
            l,
            h,
            shots,
            self.lr,
            self.epochs,
            self.n_params,
            metrics
        )
        .expect("writing to a String");
        row
    }
}

pub fn runs_csv(records: &[RunRecord]) -> String {
    let mut out = String::from(RUN_CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::gen_dataset_b;
    use crate::qsim::Shots;

    fn record(timed: bool) -> RunRecord {
        RunRecord {
            run_id: "vqc_L2_1024-B-seed3".into(),
            model: ModelSpec::Vqc { depth: 2, shots: Shots::Finite(1024) },
            provenance: gen_dataset_b(0.1, 100, 42).unwrap().provenance,
            seed: 3,
            lr: 0.1,
            epochs: 150,
            n_params: 12,
            summary: Some(FitSummary {
                train_acc: 1.0,
                test_acc: 0.9875,
                train_bce: 0.04,
                test_bce: 0.05,
                n_params: 12,
                train_time_s: 1.25,
            }),
            test_class_counts: [40, 40],
            timed,
            error: None,
        }
    }

    #[test]
    fn header_has_exact_columns() {
        let cols: Vec<&str> = RUN_CSV_HEADER.split(',').collect();
        assert_eq!(cols.len(), 18);
        assert_eq!(cols[0], "run_id");
        assert_eq!(cols[17], "train_time_s");
    }

    #[test]
    fn row_layout() {
        let row = record(true).csv_row();
        assert_eq!(
            row,
            "vqc_L2_1024-B-seed3,VQC,B,0.1,100,0.5,3,2,,1024,0.1,150,12,1,0.9875,0.04,0.05,1.250000"
        );
        assert_eq!(row.split(',').count(), 18);
        let untimed = record(false).csv_row();
        assert!(untimed.ends_with(",0.05,"));
        assert_eq!(untimed.split(',').count(), 18);
    }
}
