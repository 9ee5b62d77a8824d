//! Report rows and their output formats.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

/// Membership of a row in a plotted curve.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub key: String,
    /// Abscissa, the take-off mass in kg.
    pub x: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub scenario: String,
    pub case: String,
    pub metric: String,
    pub value: f64,
    pub unit: String,
    /// Formula or source of the value.
    pub provenance: String,
    pub series: Option<Series>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    PrettyTable,
    Csv,
    PlotData,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pretty-table" | "pretty" | "table" => Ok(Format::PrettyTable),
            "csv" => Ok(Format::Csv),
            "plot-data" | "plot" => Ok(Format::PlotData),
            other => Err(format!(
                "unknown format `{other}` (expected pretty-table, csv or plot-data)"
            )),
        }
    }
}

#[derive(Debug, Error)]
pub enum EmitError {
    #[error("nothing to emit: the run produced no rows")]
    Empty,
    #[error("plot-data output needs --out <directory>")]
    NoOutputDir,
    #[error("no row belongs to a plotted series; plot-data applies to battery sweeps")]
    NoSeries,
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> EmitError + '_ {
    move |source| EmitError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub const CSV_HEADER: [&str; 6] = ["scenario", "case", "metric", "value", "unit", "provenance"];

/// Shortest representation that parses back to the same value.
pub fn format_value(v: f64) -> String {
    format!("{v}")
}

pub fn write_csv<W: Write>(rows: &[ReportRow], out: W) -> Result<(), EmitError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.scenario.as_str(),
            r.case.as_str(),
            r.metric.as_str(),
            &format_value(r.value),
            r.unit.as_str(),
            r.provenance.as_str(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

fn display_value(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e12 {
        format!("{v:.0}")
    } else if v.abs() >= 100.0 {
        format!("{v:.1}")
    } else if v.abs() >= 1.0 {
        format!("{v:.3}")
    } else {
        format!("{v:.4}")
    }
}

/// Aligned text table, one block per scenario.
pub fn pretty_table(rows: &[ReportRow]) -> String {
    let cells: Vec<[String; 5]> = rows
        .iter()
        .map(|r| {
            [
                r.scenario.clone(),
                r.case.clone(),
                r.metric.clone(),
                display_value(r.value),
                r.unit.clone(),
            ]
        })
        .collect();
    let header = ["scenario", "case", "metric", "value", "unit"];
    let mut widths = header.map(str::len);
    for c in &cells {
        for (w, s) in widths.iter_mut().zip(c) {
            *w = (*w).max(s.chars().count());
        }
    }
    let mut out = String::new();
    let line = |out: &mut String, c: [&str; 5]| {
        let text = format!(
            "{:<w0$}  {:<w1$}  {:<w2$}  {:>w3$}  {:<w4$}",
            c[0],
            c[1],
            c[2],
            c[3],
            c[4],
            w0 = widths[0],
            w1 = widths[1],
            w2 = widths[2],
            w3 = widths[3],
            w4 = widths[4],
        );
        out.push_str(text.trim_end());
        out.push('\n');
    };
    line(&mut out, header);
    let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    line(&mut out, [&rule[0], &rule[1], &rule[2], &rule[3], &rule[4]]);
    let mut last: Option<&str> = None;
    for c in &cells {
        if last.is_some_and(|l| l != c[0]) {
            out.push('\n');
        }
        last = Some(&c[0]);
        line(&mut out, [&c[0], &c[1], &c[2], &c[3], &c[4]]);
    }
    out.trim_end().to_string() + "\n"
}

fn sanitize(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '.' | '=' | '-') {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// Column names in first-seen order, then one value map per abscissa.
type SeriesTable = (Vec<String>, Vec<(f64, BTreeMap<String, f64>)>);

/// One CSV per series: take-off mass, then one column per metric.
pub fn write_plot_data(rows: &[ReportRow], dir: &Path) -> Result<Vec<PathBuf>, EmitError> {
    // (scenario, key) -> x -> metric -> value, in first-seen order of metrics
    let mut series: BTreeMap<(String, String), SeriesTable> = BTreeMap::new();
    for r in rows {
        let Some(s) = &r.series else { continue };
        if r.metric == "takeoff_mass" {
            continue;
        }
        let entry = series.entry((r.scenario.clone(), s.key.clone())).or_default();
        let column = match r.unit.as_str() {
            "-" | "flag" | "" => r.metric.clone(),
            "%" => format!("{}_pct", r.metric),
            unit => format!("{}_{unit}", r.metric),
        };
        if !entry.0.contains(&column) {
            entry.0.push(column.clone());
        }
        match entry.1.iter_mut().find(|(x, _)| *x == s.x) {
            Some((_, values)) => {
                values.insert(column, r.value);
            }
            None => entry.1.push((s.x, BTreeMap::from([(column, r.value)]))),
        }
    }
    if series.is_empty() {
        return Err(EmitError::NoSeries);
    }
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut paths = Vec::new();
    for ((scenario, key), (columns, mut points)) in series {
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        let path = dir.join(format!("{}__{}.csv", sanitize(&scenario), sanitize(&key)));
        let file = fs::File::create(&path).map_err(io_err(&path))?;
        let mut w = csv::Writer::from_writer(file);
        let mut header = vec!["takeoff_mass_kg".to_string()];
        header.extend(columns.iter().cloned());
        w.write_record(&header)?;
        for (x, values) in &points {
            let mut record = vec![format_value(*x)];
            record.extend(
                columns
                    .iter()
                    .map(|c| values.get(c).map(|v| format_value(*v)).unwrap_or_default()),
            );
            w.write_record(&record)?;
        }
        w.flush().map_err(io_err(&path))?;
        paths.push(path);
    }
    Ok(paths)
}

/// Write `rows` in `format`. Tables and CSV go to `out/report.{txt,csv}` when
/// an output directory is given and to `stdout` otherwise; plot data always
/// needs a directory. Returns the files written.
pub fn emit(
    rows: &[ReportRow],
    format: Format,
    out: Option<&Path>,
    stdout: &mut dyn Write,
) -> Result<Vec<PathBuf>, EmitError> {
    if rows.is_empty() {
        return Err(EmitError::Empty);
    }
    match (format, out) {
        (Format::PlotData, None) => Err(EmitError::NoOutputDir),
        (Format::PlotData, Some(dir)) => write_plot_data(rows, dir),
        (Format::Csv, Some(dir)) => {
            fs::create_dir_all(dir).map_err(io_err(dir))?;
            let path = dir.join("report.csv");
            write_csv(rows, fs::File::create(&path).map_err(io_err(&path))?)?;
            Ok(vec![path])
        }
        (Format::Csv, None) => {
            write_csv(rows, &mut *stdout)?;
            Ok(Vec::new())
        }
        (Format::PrettyTable, Some(dir)) => {
            fs::create_dir_all(dir).map_err(io_err(dir))?;
            let path = dir.join("report.txt");
            fs::write(&path, pretty_table(rows)).map_err(io_err(&path))?;
            Ok(vec![path])
        }
        (Format::PrettyTable, None) => {
            stdout
                .write_all(pretty_table(rows).as_bytes())
                .map_err(io_err(Path::new("<stdout>")))?;
            Ok(Vec::new())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(metric: &str, value: f64, series: Option<(&str, f64)>) -> ReportRow {
        ReportRow {
            scenario: "s".into(),
            case: "c".into(),
            metric: metric.into(),
            value,
            unit: "W".into(),
            provenance: "a, b".into(),
            series: series.map(|(k, x)| Series { key: k.into(), x }),
        }
    }

    #[test]
    fn csv_round_trips_values() {
        let mut buf = Vec::new();
        write_csv(&[row("p", 0.1 + 0.2, None)], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "scenario,case,metric,value,unit,provenance\ns,c,p,0.30000000000000004,W,\"a, b\"\n"
        );
    }

    #[test]
    fn empty_rows_are_refused() {
        let dir = tempfile::tempdir().unwrap();
        let err = emit(&[], Format::Csv, Some(dir.path()), &mut io::sink()).unwrap_err();
        assert!(matches!(err, EmitError::Empty));
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
    }

    #[test]
    fn plot_data_groups_by_series() {
        let dir = tempfile::tempdir().unwrap();
        let rows = vec![
            row("p", 2.0, Some(("E_d=50Wh/kg", 20.0))),
            row("p", 1.0, Some(("E_d=50Wh/kg", 16.0))),
            row("p", 3.0, Some(("E_d=180Wh/kg", 16.0))),
            row("q", 9.0, None),
        ];
        let paths = emit(&rows, Format::PlotData, Some(dir.path()), &mut io::sink()).unwrap();
        assert_eq!(paths.len(), 2);
        let text = fs::read_to_string(dir.path().join("s__E_d=50Wh_kg.csv")).unwrap();
        assert_eq!(text, "takeoff_mass_kg,p_W\n16,1\n20,2\n");
    }

    #[test]
    fn plot_data_needs_a_directory() {
        let rows = vec![row("p", 1.0, Some(("k", 1.0)))];
        assert!(matches!(
            emit(&rows, Format::PlotData, None, &mut io::sink()),
            Err(EmitError::NoOutputDir)
        ));
    }

    #[test]
    fn pretty_table_aligns() {
        let table = pretty_table(&[row("total_power", 2040.0, None), row("x", 0.5, None)]);
        let lines: Vec<_> = table.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[2].contains("2040"));
        assert_eq!(lines[2].rfind('W'), lines[3].rfind('W'));
    }
}
