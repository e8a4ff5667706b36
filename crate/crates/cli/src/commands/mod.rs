mod converge;
mod estimate_c;
mod lattice;
mod noldus;
mod sample;
mod tail;

use crate::config::{Experiment, ExperimentConfig};
use crate::error::CliResult;
use crate::output::Run;

pub fn dispatch(config: &ExperimentConfig) -> CliResult<()> {
    let mut run = Run::start(config)?;
    let result = match &config.experiment {
        Experiment::Sample { .. } => sample::run(config, &mut run),
        Experiment::EstimateC { .. } => estimate_c::run(config, &mut run),
        Experiment::Tail { .. } => tail::run(config, &mut run),
        Experiment::Converge { .. } => converge::run(config, &mut run),
        Experiment::Noldus { .. } => noldus::run(config, &mut run),
        Experiment::LatticeCheck { .. } => lattice::run(config, &mut run),
    };
    // timings are kept even when the experiment stops early
    let finished = run.finish();
    result.and(finished)
}

/// Cell text for an optional number.
fn opt(x: Option<f64>) -> String {
    x.map(crate::output::num).unwrap_or_else(|| "NA".into())
}
