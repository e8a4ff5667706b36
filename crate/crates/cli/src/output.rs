//! Output directory handling. CSV and JSON outputs depend only on the
//! configuration; wall-clock timings go to a separate `timing.log`.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};

pub struct Run {
    dir: PathBuf,
    comment: String,
    timings: Vec<(String, f64)>,
    started: Instant,
}

impl Run {
    /// Creates the output directory and writes `config.json`.
    pub fn start(config: &ExperimentConfig) -> CliResult<Self> {
        let dir = config.out.clone();
        fs::create_dir_all(&dir).map_err(|e| io_err(&dir, e))?;
        let run = Run {
            comment: format!("config_hash={} seed={}", config.hash(), config.master_seed),
            dir,
            timings: Vec::new(),
            started: Instant::now(),
        };
        run.json("config.json", config)?;
        Ok(run)
    }

    pub fn comment(&self) -> &str {
        &self.comment
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn create(&self, name: &str) -> CliResult<BufWriter<fs::File>> {
        let p = self.path(name);
        fs::File::create(&p).map(BufWriter::new).map_err(|e| io_err(&p, e))
    }

    /// CSV with the hash comment line, a header row and the given rows.
    pub fn csv(&self, name: &str, header: &[&str], rows: &[Vec<String>]) -> CliResult<()> {
        let mut text = String::new();
        writeln!(text, "# {}", self.comment).unwrap();
        writeln!(text, "{}", header.join(",")).unwrap();
        for r in rows {
            debug_assert_eq!(r.len(), header.len(), "{name}: row width");
            writeln!(text, "{}", r.join(",")).unwrap();
        }
        self.write(name, text.as_bytes())
    }

    pub fn json<S: Serialize>(&self, name: &str, value: &S) -> CliResult<()> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    pub fn write(&self, name: &str, bytes: &[u8]) -> CliResult<()> {
        let p = self.path(name);
        let mut f = self.create(name)?;
        f.write_all(bytes).and_then(|_| f.flush()).map_err(|e| io_err(&p, e))
    }

    pub fn time<R>(&mut self, label: impl Into<String>, f: impl FnOnce() -> R) -> R {
        let t = Instant::now();
        let r = f();
        self.timings.push((label.into(), t.elapsed().as_secs_f64()));
        r
    }

    pub fn finish(self) -> CliResult<()> {
        let mut text = String::new();
        for (label, secs) in &self.timings {
            writeln!(text, "{label}\t{secs:.3}s").unwrap();
        }
        writeln!(text, "total\t{:.3}s", self.started.elapsed().as_secs_f64()).unwrap();
        self.write("timing.log", text.as_bytes())
    }
}

fn io_err(p: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", p.display()))
}

/// Shortest round-trip decimal form.
pub fn num(x: f64) -> String {
    format!("{x}")
}
