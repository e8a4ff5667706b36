use serde::Serialize;

use causet_core::chainstats::{check_mean_convergence, estimate_heights, ConvergenceReport, HeightEnsemble, HeightOptions};

use crate::config::{Experiment, ExperimentConfig};
use crate::error::{CliError, CliResult};
use crate::output::{num, Run};
use crate::plot::{Chart, Series};

const HEADER: [&str; 8] = ["lambda", "d", "trials", "mean", "sd", "c_hat", "se", "status"];

#[derive(Serialize)]
struct Row {
    lambda: f64,
    mean: f64,
    sd: f64,
    c_hat: f64,
    se: f64,
}

#[derive(Serialize)]
struct Report<'a> {
    experiment: &'a str,
    dim: usize,
    trials: usize,
    rows: Vec<Row>,
    band_check: Option<ConvergenceReport>,
    note: String,
    error: Option<String>,
}

pub fn run(config: &ExperimentConfig, run: &mut Run) -> CliResult<()> {
    let Experiment::EstimateC {
        dim,
        ref lambdas,
        trials,
        max_points,
    } = config.experiment
    else {
        unreachable!()
    };
    let mut ensembles: Vec<HeightEnsemble> = Vec::new();
    let mut failure = None;
    for (i, &lambda) in lambdas.iter().enumerate() {
        let opts = HeightOptions {
            max_expected_points: max_points,
            stream_offset: (i as u64) << 32,
        };
        match run.time(format!("lambda={lambda}"), || {
            estimate_heights(lambda, dim, trials, config.master_seed, &opts)
        }) {
            Ok(e) => ensembles.push(e),
            Err(e) => {
                failure = Some((lambda, CliError::from(e)));
                break;
            }
        }
    }

    let mut rows: Vec<Vec<String>> = ensembles
        .iter()
        .map(|e| {
            vec![
                num(e.lambda),
                dim.to_string(),
                e.trials.to_string(),
                num(e.mean),
                num(e.sd),
                num(e.c_hat),
                num(e.c_se()),
                "ok".into(),
            ]
        })
        .collect();
    if let Some((lambda, err)) = &failure {
        let status = match err {
            CliError::Budget(_) => "budget-exceeded",
            _ => "error",
        };
        let mut r = vec![num(*lambda), dim.to_string(), trials.to_string()];
        r.extend(std::iter::repeat_n("NA".to_string(), 4));
        r.push(status.into());
        rows.push(r);
    }
    run.csv("estimate_c.csv", &HEADER, &rows)?;

    let (band_check, note) = if ensembles.len() >= 3 {
        let r = check_mean_convergence(&ensembles)?;
        let note = format!(
            "fixed-exponent fit c = {} (free fit c = {} at beta = {}); band {}",
            r.c,
            r.c_free,
            r.beta_free,
            if r.band_satisfied { "satisfied" } else { "violated" }
        );
        (Some(r), note)
    } else {
        (
            None,
            format!("band check skipped: needs at least 3 λ values, have {}", ensembles.len()),
        )
    };
    if config.plots {
        run.write("c_hat.svg", plot(&ensembles, band_check.as_ref()).as_bytes())?;
    }
    let report = Report {
        experiment: config.experiment.name(),
        dim,
        trials,
        rows: ensembles
            .iter()
            .map(|e| Row {
                lambda: e.lambda,
                mean: e.mean,
                sd: e.sd,
                c_hat: e.c_hat,
                se: e.c_se(),
            })
            .collect(),
        band_check,
        note,
        error: failure.as_ref().map(|(_, e)| e.to_string()),
    };
    run.json("report.json", &report)?;
    match failure {
        Some((_, e)) => Err(e),
        None => Ok(()),
    }
}

fn plot(ensembles: &[HeightEnsemble], band: Option<&ConvergenceReport>) -> String {
    let x = |l: f64| l.log10();
    let mut series = vec![Series::line(
        "c_hat ± 2 SE",
        "steelblue",
        ensembles.iter().map(|e| (x(e.lambda), e.c_hat)).collect(),
    )
    .with_bars(
        ensembles
            .iter()
            .map(|e| (x(e.lambda), e.c_hat - 2.0 * e.c_se(), e.c_hat + 2.0 * e.c_se()))
            .collect(),
    )];
    if let Some(b) = band {
        series.push(Series::line("fitted c", "black", b.rows.iter().map(|r| (x(r.lambda), b.c)).collect()).dashed());
        series.push(Series::line("band lower edge", "firebrick", b.rows.iter().map(|r| (x(r.lambda), r.lower)).collect()).dashed());
    }
    Chart {
        title: "Normalized mean chain height".into(),
        x_label: "log10 λ".into(),
        y_label: "c_hat".into(),
        log_y: false,
        series,
    }
    .render()
}
