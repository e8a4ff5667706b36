use causet_core::{sample_interval, Interval, RngSpec};

use crate::config::{Experiment, ExperimentConfig};
use crate::error::CliResult;
use crate::output::Run;

pub fn run(config: &ExperimentConfig, run: &mut Run) -> CliResult<()> {
    let Experiment::Sample { dim, lambda, height } = config.experiment else {
        unreachable!()
    };
    let q = Interval::standard(dim, height);
    let s = run.time("sample", || sample_interval(lambda, &q, RngSpec::new(config.master_seed, 0)))?;
    let mut w = run.create("sample.csv")?;
    s.write_csv(&mut w, Some(run.comment()))?;
    std::io::Write::flush(&mut w)?;
    run.json("sample.json", &s.envelope())
}
