//! Benchmark suite comparing a two-qubit variational quantum classifier with
//! logistic regression and a small MLP on XOR-style datasets.

pub mod classical;
pub mod config;
pub mod data;
pub mod error;
pub mod experiment;
pub mod bench;
pub mod metrics;
pub mod model;
pub mod optim;
pub mod qsim;
pub mod render;
pub mod rng;
pub mod svg;
pub mod verify;
pub mod vqc;

pub use error::{Error, Result};
