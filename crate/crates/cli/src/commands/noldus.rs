use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use serde::Serialize;

use causet_core::noldus::noldus_exact;
use causet_core::CausalSpace;

use crate::config::{Experiment, ExperimentConfig};
use crate::error::{CliError, CliResult};
use crate::output::{num, Run};

#[derive(Serialize)]
struct Report<'a> {
    experiment: &'a str,
    x1: &'a Path,
    x2: &'a Path,
    sizes: (usize, usize),
    distance: f64,
    psi_distortion: f64,
    phi_distortion: f64,
    psi: &'a [usize],
    phi: &'a [usize],
}

fn load(path: &Path) -> CliResult<CausalSpace> {
    let f = File::open(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    CausalSpace::read_csv(BufReader::new(f)).map_err(|e| match CliError::from(e) {
        CliError::Usage(m) => CliError::Usage(format!("{}: {m}", path.display())),
        CliError::Io(m) => CliError::Io(format!("{}: {m}", path.display())),
        other => other,
    })
}

/// `i, j, d_from(i, j), d_to(f(i), f(j)), |difference|` over all ordered pairs.
fn distortion_rows(f: &[usize], from: &CausalSpace, to: &CausalSpace) -> Vec<Vec<String>> {
    let mut rows = Vec::with_capacity(f.len() * f.len());
    for i in 0..f.len() {
        for j in 0..f.len() {
            let (a, b) = (from.get(i, j), to.get(f[i], f[j]));
            rows.push(vec![
                i.to_string(),
                j.to_string(),
                f[i].to_string(),
                f[j].to_string(),
                num(a),
                num(b),
                num((a - b).abs()),
            ]);
        }
    }
    rows
}

pub fn run(config: &ExperimentConfig, run: &mut Run) -> CliResult<()> {
    let Experiment::Noldus { ref x1, ref x2, max_size } = config.experiment else {
        unreachable!()
    };
    let a = load(x1)?;
    let b = load(x2)?;
    let exact = run.time("noldus_exact", || noldus_exact(&a, &b, max_size))?;
    let maps = &exact.maps;

    let mut map_rows: Vec<Vec<String>> = maps
        .psi
        .iter()
        .enumerate()
        .map(|(i, &k)| vec!["psi".into(), i.to_string(), k.to_string()])
        .collect();
    map_rows.extend(maps.phi.iter().enumerate().map(|(i, &k)| vec!["phi".into(), i.to_string(), k.to_string()]));
    run.csv("maps.csv", &["map", "from", "to"], &map_rows)?;
    let header = ["i", "j", "image_i", "image_j", "d_source", "d_target", "abs_diff"];
    run.csv("psi_distortion.csv", &header, &distortion_rows(&maps.psi, &a, &b))?;
    run.csv("phi_distortion.csv", &header, &distortion_rows(&maps.phi, &b, &a))?;
    run.json(
        "noldus.json",
        &Report {
            experiment: config.experiment.name(),
            x1,
            x2,
            sizes: (a.len(), b.len()),
            distance: exact.distance,
            psi_distortion: exact.psi_distortion,
            phi_distortion: exact.phi_distortion,
            psi: &maps.psi,
            phi: &maps.phi,
        },
    )
}
