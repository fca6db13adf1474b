//! Machine-readable run reports: per-check records, norm-trace tables, and
//! the JSON / CSV writers with their environment stamps.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::config::RunConfig;

/// Outcome of one named check.
#[derive(Clone, Debug, Serialize)]
pub struct Record {
    pub name: String,
    /// The identity or quantity the check exercises, as a formula string;
    /// "plumbing" for checks of the harness itself.
    pub tag: String,
    pub value: f64,
    pub target: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Present when a guard refused the computation instead of failing it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
    pub wall_ms: u64,
}

impl Record {
    /// A check that passes when |value - target| <= tolerance.
    pub fn near(name: &str, tag: &str, value: f64, target: f64, tolerance: f64) -> Record {
        Record {
            name: name.into(),
            tag: tag.into(),
            value,
            target,
            tolerance,
            pass: (value - target).abs() <= tolerance,
            skipped: None,
            wall_ms: 0,
        }
    }

    /// A check on an error quantity that passes when value <= tolerance.
    pub fn below(name: &str, tag: &str, value: f64, tolerance: f64) -> Record {
        Record {
            name: name.into(),
            tag: tag.into(),
            value,
            target: 0.0,
            tolerance,
            pass: value <= tolerance,
            skipped: None,
            wall_ms: 0,
        }
    }

    /// A one-sided bound: passes when value <= bound + slack.
    pub fn at_most(name: &str, tag: &str, value: f64, bound: f64, slack: f64) -> Record {
        Record {
            name: name.into(),
            tag: tag.into(),
            value,
            target: bound,
            tolerance: slack,
            pass: value <= bound + slack,
            skipped: None,
            wall_ms: 0,
        }
    }

    /// A record for a computation a guard refused; counts as skipped, not
    /// failed.
    pub fn skipped(name: &str, tag: &str, reason: &str) -> Record {
        Record {
            name: name.into(),
            tag: tag.into(),
            value: f64::NAN,
            target: 0.0,
            tolerance: 0.0,
            pass: true,
            skipped: Some(format!("skipped({reason})")),
            wall_ms: 0,
        }
    }
}

/// One column pair of a norm-trace table; levels the guard refused carry
/// None.
#[derive(Clone, Debug, Serialize)]
pub struct TraceColumn {
    pub label: String,
    pub levels: Vec<usize>,
    pub norms: Vec<Option<f64>>,
}

impl TraceColumn {
    pub fn from_parts(
        label: &str,
        all_levels: &[usize],
        computed: &[usize],
        norms: &[f64],
    ) -> TraceColumn {
        let cells = all_levels
            .iter()
            .map(|k| computed.iter().position(|c| c == k).map(|i| norms[i]))
            .collect();
        TraceColumn {
            label: label.into(),
            levels: all_levels.to_vec(),
            norms: cells,
        }
    }
}

/// A full run report: configuration echo, environment stamp, the records
/// sorted by name, and any norm traces.
#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub config: String,
    pub stamp: Vec<String>,
    pub records: Vec<Record>,
    pub traces: Vec<TraceColumn>,
}

impl Report {
    pub fn new(command: &str, config: &RunConfig) -> Report {
        Report {
            command: command.into(),
            config: config.summary(),
            stamp: environment_stamp(),
            records: Vec::new(),
            traces: Vec::new(),
        }
    }

    pub fn push(&mut self, r: Record) {
        self.records.push(r);
    }

    /// Assembly is single-threaded and ordered by check name.
    pub fn finish(&mut self) {
        self.records.sort_by(|a, b| a.name.cmp(&b.name));
    }

    pub fn all_pass(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    /// Writes <command>-<timestamp>.json (always) and .csv (when traces are
    /// present); returns the JSON path and the CSV path if written.
    pub fn write(&self, out_dir: &Path) -> io::Result<(PathBuf, Option<PathBuf>)> {
        fs::create_dir_all(out_dir)?;
        let ts = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_millis())
            .unwrap_or(0);
        let base = format!("{}-{ts}", self.command);
        let json_path = out_dir.join(format!("{base}.json"));
        let json = serde_json::to_string_pretty(self).map_err(io::Error::other)?;
        fs::write(&json_path, json)?;
        if self.traces.is_empty() {
            return Ok((json_path, None));
        }
        let csv_path = out_dir.join(format!("{base}.csv"));
        fs::write(&csv_path, self.csv())?;
        Ok((json_path, Some(csv_path)))
    }

    /// CSV body: '#'-prefixed stamp lines, then one table per trace pair.
    /// Everything outside the stamp lines is a pure function of the inputs,
    /// which is what the determinism contract promises.
    pub fn csv(&self) -> String {
        let mut s = String::new();
        for line in &self.stamp {
            let _ = writeln!(s, "# {line}");
        }
        let _ = writeln!(s, "# config: {}", self.config);
        if self.traces.is_empty() {
            return s;
        }
        let mut header = String::from("K");
        for t in &self.traces {
            header.push(',');
            header.push_str(&t.label);
        }
        let _ = writeln!(s, "{header}");
        // Traces in one report share the level axis.
        for (i, k) in self.traces[0].levels.iter().enumerate() {
            let mut row = format!("{k}");
            for t in &self.traces {
                let cell = match t.norms.get(i) {
                    Some(Some(v)) => format!("{v}"),
                    _ => "skipped(guard)".to_string(),
                };
                row.push(',');
                row.push_str(&cell);
            }
            let _ = writeln!(s, "{row}");
        }
        s
    }

    /// Console summary, one line per record.
    pub fn print(&self) {
        for r in &self.records {
            let status = match &r.skipped {
                Some(reason) => reason.clone(),
                None => (if r.pass { "pass" } else { "FAIL" }).to_string(),
            };
            println!(
                "{status:>14}  {name:<28} {tag:<44} value {value:.3e}  target {target:.3e}  tol {tol:.1e}  {ms} ms",
                name = r.name,
                tag = r.tag,
                value = r.value,
                target = r.target,
                tol = r.tolerance,
                ms = r.wall_ms,
            );
        }
        let failed = self.records.iter().filter(|r| !r.pass).count();
        println!(
            "{} checks, {} failed, {} skipped",
            self.records.len(),
            failed,
            self.records.iter().filter(|r| r.skipped.is_some()).count()
        );
    }
}

fn environment_stamp() -> Vec<String> {
    vec![
        format!("twisted-fock {}", env!("CARGO_PKG_VERSION")),
        format!("os: {}", std::env::consts::OS),
        format!("threads: {}", rayon::current_num_threads()),
    ]
}
