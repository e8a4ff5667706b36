use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use causet_core::chainstats::BoundParams;
use causet_core::noldus::BoundParse;

/// Everything that determines a run's outputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub master_seed: u64,
    pub out: PathBuf,
    pub plots: bool,
    pub experiment: Experiment,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Experiment {
    Sample {
        dim: usize,
        lambda: f64,
        height: f64,
    },
    EstimateC {
        dim: usize,
        lambdas: Vec<f64>,
        trials: usize,
        max_points: f64,
    },
    Tail {
        dim: usize,
        lambdas: Vec<f64>,
        trials: usize,
        mus: Vec<f64>,
        /// `None` fits `K` at the smallest λ.
        k: Option<f64>,
        confidence: f64,
        max_points: f64,
    },
    Converge {
        dim: usize,
        lambdas: Vec<f64>,
        eps: Vec<f64>,
        trials: usize,
        probe: usize,
        params: BoundParams,
        bound_parse: BoundParse,
        full_pair_limit: usize,
        max_points: f64,
    },
    Noldus {
        x1: PathBuf,
        x2: PathBuf,
        max_size: usize,
    },
    LatticeCheck {
        dim: usize,
        eps: Vec<f64>,
        probe: usize,
        height: f64,
        max_lattice: usize,
        pair_budget: u64,
    },
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Sample { .. } => "sample",
            Experiment::EstimateC { .. } => "estimate-c",
            Experiment::Tail { .. } => "tail",
            Experiment::Converge { .. } => "converge",
            Experiment::Noldus { .. } => "noldus",
            Experiment::LatticeCheck { .. } => "lattice-check",
        }
    }
}

impl ExperimentConfig {
    /// SHA-256 of the JSON form with the output directory blanked, so that the
    /// same experiment hashes alike wherever it is written.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.out = PathBuf::new();
        let bytes = serde_json::to_vec(&c).expect("config serializes");
        hex::encode(Sha256::digest(&bytes))
    }
}
