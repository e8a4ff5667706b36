use serde::Serialize;

use causet_core::noldus::{build_lattice, check_brackets, check_lattice_gaps, probe_grid};
use causet_core::Interval;

use crate::config::{Experiment, ExperimentConfig};
use crate::error::CliResult;
use crate::output::{num, Run};

const HEADER: [&str; 16] = [
    "eps",
    "eta",
    "lattice_points",
    "probes",
    "probe_pairs",
    "containment_violations",
    "sandwich_violations",
    "spread_violations",
    "spread_max_excess",
    "gap_pairs_checked",
    "gap_exhaustive",
    "gap_threshold",
    "gap_violations",
    "gap_min_positive",
    "quantization_violations",
    "flag",
];

/// Slack allowed on the spread property before a pair counts as a violation.
const SPREAD_TOLERANCE: f64 = 1e-9;

#[derive(Serialize)]
struct Entry {
    eps: f64,
    eta: f64,
    lattice_points: usize,
    probes: usize,
    probe_pairs: u64,
    containment_violations: usize,
    sandwich_violations: u64,
    spread_violations: u64,
    spread_max_excess: f64,
    gap_pairs_checked: u64,
    gap_exhaustive: bool,
    gap_threshold: f64,
    gap_violations: u64,
    gap_first_violation: Option<(usize, usize, f64)>,
    gap_min_positive: f64,
    quantization_violations: u64,
    flags: Vec<String>,
}

pub fn run(config: &ExperimentConfig, run: &mut Run) -> CliResult<()> {
    let Experiment::LatticeCheck {
        dim,
        ref eps,
        probe,
        height,
        max_lattice,
        pair_budget,
    } = config.experiment
    else {
        unreachable!()
    };
    let q = Interval::standard(dim, height);
    let probes = probe_grid(&q, probe);
    let mut entries = Vec::new();
    for &e in eps {
        let lattice = run.time(format!("lattice eps={e}"), || build_lattice(&q, e, max_lattice))?;
        let b = run.time(format!("brackets eps={e}"), || check_brackets(&lattice, &probes, SPREAD_TOLERANCE))?;
        let g = run.time(format!("gaps eps={e}"), || check_lattice_gaps(&lattice, pair_budget));
        let mut flags = Vec::new();
        if b.spread_violations > 0 {
            flags.push(format!(
                "LEMMA DISCREPANCY FLAGGED: bracket spread exceeds ε/4 on {} of {} probe pairs (max excess {})",
                b.spread_violations, b.pairs, b.spread_max_excess
            ));
        }
        if g.violations > 0 {
            flags.push(format!(
                "LEMMA DISCREPANCY FLAGGED: {} timelike lattice pairs closer than {} (smallest {})",
                g.violations, g.stated_threshold, g.min_positive
            ));
        }
        if b.containment_violations > 0 || b.sandwich_violations > 0 || g.quantization_violations > 0 {
            flags.push("construction check failed: containment, sandwich or quantization".into());
        }
        entries.push(Entry {
            eps: e,
            eta: lattice.frame.eta,
            lattice_points: lattice.len(),
            probes: b.probes,
            probe_pairs: b.pairs,
            containment_violations: b.containment_violations,
            sandwich_violations: b.sandwich_violations,
            spread_violations: b.spread_violations,
            spread_max_excess: b.spread_max_excess,
            gap_pairs_checked: g.pairs_checked,
            gap_exhaustive: g.exhaustive,
            gap_threshold: g.stated_threshold,
            gap_violations: g.violations,
            gap_first_violation: g.first_violation,
            gap_min_positive: g.min_positive,
            quantization_violations: g.quantization_violations,
            flags,
        });
    }
    let rows: Vec<Vec<String>> = entries
        .iter()
        .map(|x| {
            vec![
                num(x.eps),
                num(x.eta),
                x.lattice_points.to_string(),
                x.probes.to_string(),
                x.probe_pairs.to_string(),
                x.containment_violations.to_string(),
                x.sandwich_violations.to_string(),
                x.spread_violations.to_string(),
                num(x.spread_max_excess),
                x.gap_pairs_checked.to_string(),
                x.gap_exhaustive.to_string(),
                num(x.gap_threshold),
                x.gap_violations.to_string(),
                num(x.gap_min_positive),
                x.quantization_violations.to_string(),
                if x.flags.is_empty() { "none" } else { "flagged" }.to_string(),
            ]
        })
        .collect();
    run.csv("lattice.csv", &HEADER, &rows)?;
    run.json("lattice.json", &entries)
}
