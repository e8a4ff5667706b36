use serde::Serialize;

use causet_core::chainstats::{check_point_budget, map_trials};
use causet_core::noldus::{estimate_dn_upper, theorem_bound, DnUpperOptions};
use causet_core::stats::wilson_interval;
use causet_core::{sample_interval, Interval, Result};

use crate::config::{Experiment, ExperimentConfig};
use crate::error::CliResult;
use crate::output::{num, Run};
use crate::plot::{Chart, Series};

use super::opt;

const HEADER: [&str; 16] = [
    "lambda",
    "eps",
    "d",
    "trials",
    "exceed",
    "freq",
    "lo",
    "hi",
    "empty_samples",
    "fallbacks",
    "mean_upper",
    "max_upper",
    "discretization_error",
    "bound",
    "bound_in_window",
    "bound_parse",
];

const CONFIDENCE: f64 = 0.95;
const COLORS: [&str; 6] = ["steelblue", "darkorange", "seagreen", "purple", "goldenrod", "teal"];

#[derive(Clone, Serialize)]
struct Cell {
    lambda: f64,
    eps: f64,
    trials: usize,
    exceed: usize,
    freq: f64,
    lo: f64,
    hi: f64,
    empty_samples: usize,
    fallbacks: usize,
    mean_upper: Option<f64>,
    max_upper: Option<f64>,
    discretization_error: Option<f64>,
    bound: Option<f64>,
    bound_in_window: Option<bool>,
}

#[derive(Serialize)]
struct Report<'a> {
    experiment: &'a str,
    dim: usize,
    confidence: f64,
    note: &'a str,
    cells: &'a [Cell],
    nonincreasing_in_lambda: Vec<(f64, bool)>,
}

/// Per-trial outcome for each ε: `(upper, fallbacks, discretization error)`,
/// or `None` for an empty sample.
type Trial = Option<Vec<(f64, usize, f64)>>;

pub fn run(config: &ExperimentConfig, run: &mut Run) -> CliResult<()> {
    let Experiment::Converge {
        dim,
        ref lambdas,
        ref eps,
        trials,
        probe,
        ref params,
        bound_parse,
        full_pair_limit,
        max_points,
    } = config.experiment
    else {
        unreachable!()
    };
    let q = Interval::standard(dim, 1.0);
    let h = q.proper_time;
    let options: Vec<DnUpperOptions<f64>> = eps
        .iter()
        .map(|&e| DnUpperOptions {
            full_pair_limit,
            ..DnUpperOptions::new(probe, e)
        })
        .collect();
    let mut cells = Vec::new();
    for (k, &lambda) in lambdas.iter().enumerate() {
        check_point_budget(lambda, dim, max_points)?;
        let outcomes: Vec<Result<Trial>> = run.time(format!("lambda={lambda}"), || {
            map_trials(trials, config.master_seed, (k as u64) << 32, |spec| {
                let s = sample_interval(lambda, &q, spec)?;
                if s.is_empty() {
                    return Ok(None);
                }
                options
                    .iter()
                    .map(|o| estimate_dn_upper(&s, params.c_d, o).map(|r| (r.upper, r.fallbacks, r.discretization_error)))
                    .collect::<Result<Vec<_>>>()
                    .map(Some)
            })
        });
        let outcomes = outcomes.into_iter().collect::<Result<Vec<Trial>>>()?;
        let empty = outcomes.iter().filter(|t| t.is_none()).count();
        for (j, &e) in eps.iter().enumerate() {
            let vals: Vec<(f64, usize, f64)> = outcomes.iter().flatten().map(|t| t[j]).collect();
            // an empty sample has no map into Q worth measuring; count it as a large distance
            let exceed = empty + vals.iter().filter(|v| v.0 >= e).count();
            let (lo, hi) = wilson_interval(exceed, trials, CONFIDENCE);
            let mean = |f: &dyn Fn(&(f64, usize, f64)) -> f64| {
                (!vals.is_empty()).then(|| vals.iter().map(f).sum::<f64>() / vals.len() as f64)
            };
            let bound = theorem_bound(e, lambda, dim, h, params, bound_parse).ok();
            cells.push(Cell {
                lambda,
                eps: e,
                trials,
                exceed,
                freq: exceed as f64 / trials as f64,
                lo,
                hi,
                empty_samples: empty,
                fallbacks: vals.iter().map(|v| v.1).sum(),
                mean_upper: mean(&|v| v.0),
                max_upper: vals.iter().map(|v| v.0).reduce(f64::max),
                discretization_error: mean(&|v| v.2),
                bound: bound.map(|b| b.value),
                bound_in_window: bound.map(|b| b.in_window),
            });
        }
    }

    let rows: Vec<Vec<String>> = cells
        .iter()
        .map(|c| {
            vec![
                num(c.lambda),
                num(c.eps),
                dim.to_string(),
                c.trials.to_string(),
                c.exceed.to_string(),
                num(c.freq),
                num(c.lo),
                num(c.hi),
                c.empty_samples.to_string(),
                c.fallbacks.to_string(),
                opt(c.mean_upper),
                opt(c.max_upper),
                opt(c.discretization_error),
                opt(c.bound),
                c.bound_in_window.map(|b| b.to_string()).unwrap_or_else(|| "NA".into()),
                bound_parse.to_string(),
            ]
        })
        .collect();
    run.csv("converge.csv", &HEADER, &rows)?;

    // consecutive λ at fixed ε: the later frequency is lower or the intervals overlap
    let nonincreasing = eps
        .iter()
        .map(|&e| {
            let at: Vec<&Cell> = cells.iter().filter(|c| c.eps == e).collect();
            (e, at.windows(2).all(|w| w[1].freq <= w[0].freq || w[1].lo <= w[0].hi))
        })
        .collect();
    if config.plots {
        run.write("converge.svg", plot(&cells, eps).as_bytes())?;
    }
    run.json(
        "report.json",
        &Report {
            experiment: config.experiment.name(),
            dim,
            confidence: CONFIDENCE,
            note: "empty samples count as exceedances; bound is NA where undefined (λ <= 1)",
            cells: &cells,
            nonincreasing_in_lambda: nonincreasing,
        },
    )
}

fn plot(cells: &[Cell], eps: &[f64]) -> String {
    let mut series = Vec::new();
    for (i, &e) in eps.iter().enumerate() {
        let at: Vec<&Cell> = cells.iter().filter(|c| c.eps == e).collect();
        let color = COLORS[i % COLORS.len()];
        series.push(
            Series::line(format!("empirical, ε={e}"), color, at.iter().map(|c| (c.lambda.log10(), c.freq)).collect())
                .with_bars(at.iter().map(|c| (c.lambda.log10(), c.lo, c.hi)).collect()),
        );
        series.push(
            Series::line(
                format!("bound (capped at 1), ε={e}"),
                color,
                at.iter().filter_map(|c| c.bound.map(|b| (c.lambda.log10(), b.min(1.0)))).collect(),
            )
            .dashed(),
        );
    }
    Chart {
        title: "P(upper bound on d_N >= ε)".into(),
        x_label: "log10 λ".into(),
        y_label: "frequency".into(),
        log_y: true,
        series,
    }
    .render()
}
