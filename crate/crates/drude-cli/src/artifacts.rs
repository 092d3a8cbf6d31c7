//! Experiment reports and their on-disk form: CSV tables with `#` metadata,
//! a JSON summary, a gnuplot script and optional binary field dumps.
//!
//! Everything is rendered in memory first and written into a staging
//! directory that is renamed into place, so a failed run leaves no partial
//! artifacts behind.

use drude_spectral::fields::{write_binary, FieldState};
use drude_spectral::MediumParams;
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

/// Value of the `schema` key of every summary.
pub const SUMMARY_SCHEMA: &str = "drude-summary/1";

/// A numeric table written as CSV.
#[derive(Debug, Clone)]
pub struct Table {
    /// File stem.
    pub name: String,
    /// Column names.
    pub header: Vec<String>,
    /// Rows; NaN is written as an empty field.
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    /// Empty table with the given columns.
    pub fn new(name: &str, header: &[&str]) -> Self {
        Self { name: name.into(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    /// Appends a row; its length must match the header.
    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// A gnuplot panel drawn from one table.
#[derive(Debug, Clone)]
pub struct Plot {
    /// Table to read.
    pub table: String,
    /// Column of the abscissa (0-based).
    pub x: usize,
    /// Columns of the curves (0-based).
    pub ys: Vec<usize>,
    /// Logarithmic x axis.
    pub logx: bool,
    /// Logarithmic y axis.
    pub logy: bool,
}

impl Plot {
    /// Linear-axes panel.
    pub fn lin(table: &str, x: usize, ys: &[usize]) -> Self {
        Self { table: table.into(), x, ys: ys.to_vec(), logx: false, logy: false }
    }

    /// Log-log panel.
    pub fn loglog(table: &str, x: usize, ys: &[usize]) -> Self {
        Self { logx: true, logy: true, ..Self::lin(table, x, ys) }
    }
}

/// One pass/fail comparison against a threshold.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    /// Name of the checked quantity.
    pub name: String,
    /// Measured value.
    pub value: f64,
    /// Inclusive lower bound.
    pub min: Option<f64>,
    /// Inclusive upper bound.
    pub max: Option<f64>,
    /// Whether the value lies within the bounds.
    pub pass: bool,
}

impl Check {
    /// value ∈ [min, max] with either bound optional.
    pub fn range(name: &str, value: f64, min: Option<f64>, max: Option<f64>) -> Self {
        let pass = value.is_finite() && min.is_none_or(|m| value >= m) && max.is_none_or(|m| value <= m);
        Self { name: name.into(), value, min, max, pass }
    }

    /// value ≤ max.
    pub fn at_most(name: &str, value: f64, max: f64) -> Self {
        Self::range(name, value, None, Some(max))
    }

    /// value ≥ min.
    pub fn at_least(name: &str, value: f64, min: f64) -> Self {
        Self::range(name, value, Some(min), None)
    }

    /// |value − target| ≤ tol.
    pub fn near(name: &str, value: f64, target: f64, tol: f64) -> Self {
        Self::range(name, value, Some(target - tol), Some(target + tol))
    }

    /// A boolean condition recorded as 1 (true) or 0 (false).
    pub fn holds(name: &str, ok: bool) -> Self {
        Self::range(name, if ok { 1.0 } else { 0.0 }, Some(1.0), None)
    }
}

/// Everything an experiment produced, before it touches the disk.
#[derive(Debug, Default)]
pub struct Report {
    /// CSV tables.
    pub tables: Vec<Table>,
    /// Gnuplot panels.
    pub plots: Vec<Plot>,
    /// Threshold checks.
    pub checks: Vec<Check>,
    /// Named scalar results.
    pub metrics: BTreeMap<String, f64>,
    /// Binary field dumps by file stem.
    pub dumps: Vec<(String, FieldState)>,
}

impl Report {
    /// Records a named scalar.
    pub fn metric(&mut self, name: &str, value: f64) {
        self.metrics.insert(name.into(), value);
    }

    /// True when every check passed.
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Machine-readable summary of one run.
#[derive(Debug, Serialize)]
pub struct Summary<'a> {
    /// Always [`SUMMARY_SCHEMA`].
    pub schema: &'static str,
    /// Experiment name.
    pub experiment: &'a str,
    /// All checks passed.
    pub pass: bool,
    /// Scenario file name.
    pub config: &'a str,
    /// Worker cap (0 = library default).
    pub workers: usize,
    /// Medium constants.
    pub medium: MediumParams,
    /// Named scalars.
    pub metrics: &'a BTreeMap<String, f64>,
    /// Threshold checks.
    pub checks: &'a [Check],
    /// Files written next to the summary.
    pub artifacts: Vec<String>,
}

/// Metadata shared by the CSV headers and the summary.
#[derive(Debug, Clone)]
pub struct RunInfo {
    /// Experiment name.
    pub experiment: String,
    /// Scenario file name.
    pub config: String,
    /// Worker cap.
    pub workers: usize,
    /// Medium constants.
    pub medium: MediumParams,
}

fn fmt_num(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        format!("{v:e}")
    }
}

/// Renders a table as RFC 4180 CSV preceded by `#` metadata lines.
pub fn render_csv(table: &Table, info: &RunInfo) -> Result<Vec<u8>, csv::Error> {
    let mut out = Vec::new();
    let m = info.medium;
    out.extend_from_slice(
        format!(
            "# drude {} ({})\n# scenario: {}\n# medium: eps0={:e} mu0={:e} omega_e={:e} omega_m={:e}\n",
            info.experiment, table.name, info.config, m.eps0, m.mu0, m.omega_e, m.omega_m
        )
        .as_bytes(),
    );
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&table.header)?;
    for row in &table.rows {
        w.write_record(row.iter().map(|v| fmt_num(*v)))?;
    }
    w.into_inner().map_err(|e| e.into_error().into())
}

/// Renders the gnuplot script drawing every panel into `<experiment>.png`.
pub fn render_gnuplot(report: &Report, experiment: &str) -> String {
    let mut s = format!(
        "# gnuplot script; run `gnuplot {experiment}.gp` in this directory\nset datafile separator ','\nset terminal pngcairo size 900,{} enhanced\nset output '{experiment}.png'\nset key outside right\nset grid\nset multiplot layout {},1\n",
        360 * report.plots.len().max(1),
        report.plots.len().max(1)
    );
    for plot in &report.plots {
        let Some(table) = report.tables.iter().find(|t| t.name == plot.table) else { continue };
        s.push_str(if plot.logx { "set logscale x\n" } else { "unset logscale x\n" });
        s.push_str(if plot.logy { "set logscale y\n" } else { "unset logscale y\n" });
        s.push_str(&format!("set xlabel '{}' noenhanced\n", table.header[plot.x]));
        let curves: Vec<String> = plot
            .ys
            .iter()
            .map(|&y| {
                let col = if plot.logy { format!("(abs(${}))", y + 1) } else { format!("{}", y + 1) };
                format!("'{}.csv' skip 1 using {}:{} with linespoints title '{}' noenhanced", table.name, plot.x + 1, col, table.header[y])
            })
            .collect();
        s.push_str(&format!("plot {}\n", curves.join(", \\\n     ")));
    }
    s.push_str("unset multiplot\n");
    s
}

/// Writes all artifacts into `<root>/<experiment>/`, replacing a previous run.
pub fn write_all(report: &Report, info: &RunInfo, root: &Path) -> std::io::Result<PathBuf> {
    std::fs::create_dir_all(root)?;
    let dest = root.join(&info.experiment);
    let staging = root.join(format!(".{}.partial-{}", info.experiment, std::process::id()));
    if staging.exists() {
        std::fs::remove_dir_all(&staging)?;
    }
    std::fs::create_dir(&staging)?;
    let result = write_into(report, info, &staging);
    if let Err(e) = result {
        let _ = std::fs::remove_dir_all(&staging);
        return Err(e);
    }
    if dest.exists() {
        std::fs::remove_dir_all(&dest)?;
    }
    std::fs::rename(&staging, &dest)?;
    Ok(dest)
}

fn write_into(report: &Report, info: &RunInfo, dir: &Path) -> std::io::Result<()> {
    let mut artifacts = Vec::new();
    for t in &report.tables {
        let bytes = render_csv(t, info).map_err(std::io::Error::other)?;
        let name = format!("{}.csv", t.name);
        std::fs::write(dir.join(&name), bytes)?;
        artifacts.push(name);
    }
    let gp = format!("{}.gp", info.experiment);
    std::fs::write(dir.join(&gp), render_gnuplot(report, &info.experiment))?;
    artifacts.push(gp);
    for (stem, field) in &report.dumps {
        write_binary(field, &dir.join(format!("{stem}.bin"))).map_err(std::io::Error::other)?;
        artifacts.push(format!("{stem}.bin"));
        artifacts.push(format!("{stem}.json"));
    }
    let summary = Summary {
        schema: SUMMARY_SCHEMA,
        experiment: &info.experiment,
        pass: report.pass(),
        config: &info.config,
        workers: info.workers,
        medium: info.medium,
        metrics: &report.metrics,
        checks: &report.checks,
        artifacts,
    };
    let json = serde_json::to_string_pretty(&summary).map_err(std::io::Error::other)?;
    std::fs::write(dir.join("summary.json"), json + "\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn info() -> RunInfo {
        RunInfo { experiment: "demo".into(), config: "demo.toml".into(), workers: 1, medium: MediumParams::non_critical() }
    }

    #[test]
    fn csv_has_metadata_header_and_empty_nan_fields() {
        let mut t = Table::new("demo", &["t", "gap"]);
        t.push(vec![1.0, f64::NAN]);
        t.push(vec![2.5, 0.125]);
        let text = String::from_utf8(render_csv(&t, &info()).unwrap()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[..3].iter().all(|l| l.starts_with('#')));
        assert_eq!(&lines[3..], ["t,gap", "1e0,", "2.5e0,1.25e-1"]);
    }

    #[test]
    fn checks_respect_their_bounds() {
        assert!(Check::at_most("a", 1.0, 1.0).pass);
        assert!(!Check::at_most("a", f64::NAN, 1.0).pass);
        assert!(Check::near("b", 0.51, 0.5, 0.02).pass);
        assert!(!Check::near("b", 0.53, 0.5, 0.02).pass);
        assert!(!Check::holds("c", false).pass);
    }

    #[test]
    fn artifacts_replace_a_previous_run() {
        let dir = tempfile::tempdir().unwrap();
        let mut r = Report::default();
        let mut t = Table::new("demo", &["x", "y"]);
        t.push(vec![0.0, 1.0]);
        r.tables.push(t);
        r.plots.push(Plot::lin("demo", 0, &[1]));
        r.checks.push(Check::at_most("y", 1.0, 2.0));
        std::fs::create_dir_all(dir.path().join("demo")).unwrap();
        std::fs::write(dir.path().join("demo/stale.csv"), "old").unwrap();
        let out = write_all(&r, &info(), dir.path()).unwrap();
        let mut names: Vec<String> = std::fs::read_dir(&out).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
        names.sort();
        assert_eq!(names, ["demo.csv", "demo.gp", "summary.json"]);
        let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
        assert_eq!(v["pass"], true);
        assert_eq!(v["artifacts"][0], "demo.csv");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
