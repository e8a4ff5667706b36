use serde::Serialize;

use causet_core::chainstats::{deviation_scale, estimate_heights, fit_k, tail_report, HeightOptions, TailReport, TailRow};

use crate::config::{Experiment, ExperimentConfig};
use crate::error::CliResult;
use crate::output::{num, Run};
use crate::plot::{Chart, Series};

use super::opt;

const HEADER: [&str; 14] = [
    "lambda",
    "d",
    "trials",
    "k",
    "reading",
    "mu",
    "threshold",
    "exceed",
    "freq",
    "lo",
    "hi",
    "bound",
    "in_corollary_range",
    "within_bound",
];

const COLORS: [&str; 6] = ["steelblue", "darkorange", "seagreen", "purple", "goldenrod", "teal"];

#[derive(Serialize)]
struct SdCheck {
    lambda: f64,
    sd: f64,
    cap: f64,
    within: bool,
}

#[derive(Serialize)]
struct Report<'a> {
    experiment: &'a str,
    dim: usize,
    k: f64,
    k_fitted: bool,
    confidence: f64,
    sd_checks: Vec<SdCheck>,
    reports: Vec<Summary>,
}

#[derive(Serialize)]
struct Summary {
    lambda: f64,
    trials: usize,
    mean: f64,
    sd: f64,
    rows: Vec<TailRow>,
    corollary: TailRow,
}

pub fn run(config: &ExperimentConfig, run: &mut Run) -> CliResult<()> {
    let Experiment::Tail {
        dim,
        ref lambdas,
        trials,
        ref mus,
        k,
        confidence,
        max_points,
    } = config.experiment
    else {
        unreachable!()
    };
    let mut ensembles = Vec::with_capacity(lambdas.len());
    for (i, &lambda) in lambdas.iter().enumerate() {
        let opts = HeightOptions {
            max_expected_points: max_points,
            stream_offset: (i as u64) << 32,
        };
        ensembles.push(run.time(format!("lambda={lambda}"), || {
            estimate_heights(lambda, dim, trials, config.master_seed, &opts)
        })?);
    }
    let k_value = match k {
        Some(k) => k,
        None => fit_k(&ensembles[0])?,
    };
    let mut sd_checks = Vec::new();
    let mut reports: Vec<TailReport> = Vec::new();
    for e in ensembles {
        let cap = k_value * deviation_scale(e.lambda, dim)?;
        sd_checks.push(SdCheck {
            lambda: e.lambda,
            sd: e.sd,
            cap,
            within: e.sd <= cap,
        });
        reports.push(tail_report(e, mus, k_value, confidence)?);
    }

    let mut rows = Vec::new();
    for r in &reports {
        let e = &r.ensemble;
        let line = |reading: &str, t: &TailRow| {
            vec![
                num(e.lambda),
                dim.to_string(),
                e.trials.to_string(),
                num(k_value),
                reading.to_string(),
                num(t.mu),
                num(t.point.threshold),
                t.point.exceed.to_string(),
                num(t.point.freq),
                num(t.point.lo),
                num(t.point.hi),
                opt(t.bound),
                t.in_corollary_range.to_string(),
                t.within_bound().map(|b| b.to_string()).unwrap_or_else(|| "NA".into()),
            ]
        };
        rows.extend(r.rows.iter().map(|t| line("theorem", t)));
        rows.push(line("corollary", &r.corollary));
    }
    run.csv("tail.csv", &HEADER, &rows)?;
    if config.plots {
        run.write("tail.svg", plot(&reports, mus).as_bytes())?;
    }
    let report = Report {
        experiment: config.experiment.name(),
        dim,
        k: k_value,
        k_fitted: k.is_none(),
        confidence,
        sd_checks,
        reports: reports
            .into_iter()
            .map(|r| Summary {
                lambda: r.ensemble.lambda,
                trials: r.ensemble.trials,
                mean: r.ensemble.mean,
                sd: r.ensemble.sd,
                rows: r.rows,
                corollary: r.corollary,
            })
            .collect(),
    };
    run.json("report.json", &report)
}

fn plot(reports: &[TailReport], mus: &[f64]) -> String {
    let mut series: Vec<Series> = reports
        .iter()
        .enumerate()
        .map(|(i, r)| {
            Series::line(
                format!("empirical, λ={}", r.ensemble.lambda),
                COLORS[i % COLORS.len()],
                r.rows.iter().map(|t| (t.mu, t.point.freq)).collect(),
            )
            .with_bars(r.rows.iter().map(|t| (t.mu, t.point.lo, t.point.hi)).collect())
        })
        .collect();
    let mut grid: Vec<f64> = mus.to_vec();
    grid.extend(reports.iter().map(|r| r.corollary.mu));
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    series.push(
        Series::line("4μ² exp(-μ²)", "black", grid.iter().map(|&m| (m, 4.0 * m * m * (-m * m).exp())).collect()).dashed(),
    );
    series.push(Series::line(
        "corollary reading μ = √log λ",
        "firebrick",
        reports.iter().map(|r| (r.corollary.mu, r.corollary.point.freq)).collect(),
    ));
    Chart {
        title: "Tail of |H - mean H| against the deviation bound".into(),
        x_label: "μ".into(),
        y_label: "P(|H - mean| >= μ K scale)".into(),
        log_y: true,
        series,
    }
    .render()
}
