//! Reproduction of the published tables from the bundled scenarios.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use aerobs_core::{ModelError, ServiceTime};
use thiserror::Error;

use crate::config::{parse_scenario, ConfigError, Ledger, ScenarioConfig};
use crate::report::{format_value, ReportRow};
use crate::run::{run_scenario, Overrides, ScenarioOutcome, Stages};

/// Scenario files shipped with the crate, by id.
pub const BUNDLED: &[(&str, &str)] = &[
    ("fwd-10m", include_str!("../scenarios/fwd-10m.scenario")),
    ("fwd-5m", include_str!("../scenarios/fwd-5m.scenario")),
    ("hap-25m-split", include_str!("../scenarios/hap-25m-split.scenario")),
    ("hap-30m-full", include_str!("../scenarios/hap-30m-full.scenario")),
    ("hap-30m-split", include_str!("../scenarios/hap-30m-split.scenario")),
    ("hap-35m-split", include_str!("../scenarios/hap-35m-split.scenario")),
    ("hap-60m-full", include_str!("../scenarios/hap-60m-full.scenario")),
    ("hap-60m-split", include_str!("../scenarios/hap-60m-split.scenario")),
    ("rwd-micro", include_str!("../scenarios/rwd-micro.scenario")),
    ("rwd-pico", include_str!("../scenarios/rwd-pico.scenario")),
];

pub fn bundled_scenario(id: &str, ledger: &Ledger) -> Option<Result<ScenarioConfig, ConfigError>> {
    BUNDLED
        .iter()
        .find(|(name, _)| *name == id)
        .map(|(name, src)| parse_scenario(src, &format!("{name}.scenario"), ledger))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableId {
    I,
    II,
    III,
    V,
    Fig2Sweep,
}

impl TableId {
    pub const ALL: [TableId; 5] = [TableId::I, TableId::II, TableId::III, TableId::V, TableId::Fig2Sweep];

    pub fn name(self) -> &'static str {
        match self {
            TableId::I => "I",
            TableId::II => "II",
            TableId::III => "III",
            TableId::V => "V",
            TableId::Fig2Sweep => "fig2-sweep",
        }
    }

    /// Bundled scenarios the table draws on, in output order.
    pub fn scenarios(self) -> &'static [&'static str] {
        match self {
            TableId::I => &["fwd-10m", "fwd-5m"],
            TableId::II => &[
                "hap-25m-split",
                "hap-30m-full",
                "hap-30m-split",
                "hap-35m-split",
                "hap-60m-full",
                "hap-60m-split",
            ],
            TableId::III => &[
                "fwd-10m",
                "fwd-5m",
                "hap-25m-split",
                "hap-30m-full",
                "hap-35m-split",
                "hap-60m-full",
                "rwd-micro",
                "rwd-pico",
            ],
            TableId::V | TableId::Fig2Sweep => &["rwd-micro", "rwd-pico"],
        }
    }

    fn stages(self) -> Stages {
        match self {
            TableId::III => Stages::POWER,
            TableId::I | TableId::II | TableId::Fig2Sweep => Stages::ENDURANCE,
            TableId::V => Stages::DIMENSIONING,
        }
    }
}

impl fmt::Display for TableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TableId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "I" | "i" => Ok(TableId::I),
            "II" | "ii" => Ok(TableId::II),
            "III" | "iii" => Ok(TableId::III),
            "V" | "v" => Ok(TableId::V),
            "fig2-sweep" | "fig2" => Ok(TableId::Fig2Sweep),
            other => Err(format!("unknown table `{other}` (expected I, II, III, V or fig2-sweep)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Criterion {
    /// |computed − expected| ≤ tol·|expected|
    Relative { expected: f64, tol: f64 },
    /// |computed − expected| ≤ tol
    Absolute { expected: f64, tol: f64 },
    Exact { expected: f64 },
    Within { lo: f64, hi: f64 },
    Above { bound: f64 },
}

impl Criterion {
    pub fn holds(&self, v: f64) -> bool {
        match *self {
            Criterion::Relative { expected, tol } => (v - expected).abs() <= tol * expected.abs(),
            Criterion::Absolute { expected, tol } => (v - expected).abs() <= tol,
            Criterion::Exact { expected } => v == expected,
            Criterion::Within { lo, hi } => (lo..=hi).contains(&v),
            Criterion::Above { bound } => v > bound,
        }
    }

    pub fn expected_text(&self) -> String {
        match *self {
            Criterion::Relative { expected, .. }
            | Criterion::Absolute { expected, .. }
            | Criterion::Exact { expected } => format_value(expected),
            Criterion::Within { lo, hi } => format!("[{lo}, {hi}]"),
            Criterion::Above { bound } => format!("> {bound}"),
        }
    }

    pub fn tolerance_text(&self) -> String {
        match *self {
            Criterion::Relative { tol, .. } => format!("±{}%", tol * 100.0),
            Criterion::Absolute { tol, .. } => format!("±{tol}"),
            Criterion::Exact { .. } => "exact".to_string(),
            Criterion::Within { .. } | Criterion::Above { .. } => "bound".to_string(),
        }
    }
}

/// One computed-versus-published comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub table: TableId,
    pub cell: String,
    pub computed: f64,
    pub unit: String,
    pub criterion: Criterion,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.computed.is_finite() && self.criterion.holds(self.computed)
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] table {} {}: computed {:.4} {}, expected {} ({})",
            if self.passed() { "PASS" } else { "FAIL" },
            self.table,
            self.cell,
            self.computed,
            self.unit,
            self.criterion.expected_text(),
            self.criterion.tolerance_text()
        )
    }
}

#[derive(Debug, Error)]
pub enum ReproduceError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{scenario}: {source}")]
    Model { scenario: String, source: ModelError },
}

#[derive(Debug, Clone)]
pub struct ReproduceReport {
    pub table: TableId,
    pub outcomes: Vec<ScenarioOutcome>,
    pub rows: Vec<ReportRow>,
    pub checks: Vec<Check>,
}

impl ReproduceReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }

    pub fn write_checks_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["table", "cell", "computed", "expected", "tolerance", "unit", "status"])?;
        for c in &self.checks {
            w.write_record([
                c.table.name(),
                c.cell.as_str(),
                &format_value(c.computed),
                &c.criterion.expected_text(),
                &c.criterion.tolerance_text(),
                c.unit.as_str(),
                if c.passed() { "pass" } else { "fail" },
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_checks_file(&self, path: &Path) -> Result<(), csv::Error> {
        self.write_checks_csv(std::fs::File::create(path)?)
    }
}

struct Checks {
    table: TableId,
    list: Vec<Check>,
}

impl Checks {
    fn push(&mut self, cell: impl Into<String>, computed: f64, unit: &str, criterion: Criterion) {
        self.list.push(Check {
            table: self.table,
            cell: cell.into(),
            computed,
            unit: unit.to_string(),
            criterion,
        });
    }

    fn rel(&mut self, cell: impl Into<String>, computed: f64, unit: &str, expected: f64, tol: f64) {
        self.push(cell, computed, unit, Criterion::Relative { expected, tol });
    }

    fn exact(&mut self, cell: impl Into<String>, computed: f64, unit: &str, expected: f64) {
        self.push(cell, computed, unit, Criterion::Exact { expected });
    }
}

fn outcome<'a>(outcomes: &'a [ScenarioOutcome], id: &str) -> &'a ScenarioOutcome {
    outcomes.iter().find(|o| o.id == id).expect("bundled scenario ran")
}

/// Hours of service, or NaN when indefinite (fails any tolerance).
fn hours(t: ServiceTime) -> f64 {
    t.hours().unwrap_or(f64::NAN)
}

fn table_iii(outcomes: &[ScenarioOutcome], c: &mut Checks) {
    // (scenario, total kW, % without BS)
    const ROWS: [(&str, f64, f64); 8] = [
        ("rwd-pico", 2.04, 74.0),
        ("rwd-micro", 4.04, 37.0),
        ("fwd-5m", 1.15, 71.0),
        ("fwd-10m", 2.39, 91.0),
        ("hap-30m-full", 1.78, 17.0),
        ("hap-60m-full", 2.68, 45.0),
        ("hap-25m-split", 1.45, 24.0),
        ("hap-35m-split", 1.65, 33.0),
    ];
    for (id, kw, pct) in ROWS {
        let o = outcome(outcomes, id);
        let p = o
            .power
            .iter()
            .find(|p| p.battery_mass.is_none_or(|m| m == 5.0 && p.panel_area == 0.0))
            .expect("reference power point");
        c.rel(format!("{id} total power"), p.total / 1000.0, "kW", kw, 0.01);
        c.push(
            format!("{id} share without BS"),
            p.share_without_bs(),
            "%",
            Criterion::Absolute { expected: pct, tol: 1.0 },
        );
    }
}

fn table_i(outcomes: &[ScenarioOutcome], c: &mut Checks) {
    // (scenario, total kW, Enugu h, York h)
    const ROWS: [(&str, f64, f64, f64); 2] = [("fwd-5m", 1.15, 8.56, 1.28), ("fwd-10m", 2.39, 16.47, 2.47)];
    for (id, kw, enugu, york) in ROWS {
        let o = outcome(outcomes, id);
        let total = o.endurance[0].result.total_power;
        c.rel(format!("{id} total power"), total / 1000.0, "kW", kw, 0.02);
        for (region, expected) in [("Enugu", enugu), ("York", york)] {
            let e = o
                .endurance
                .iter()
                .find(|e| e.region.eq_ignore_ascii_case(region))
                .expect("region in bundled scenario");
            c.rel(format!("{id} service time {region}"), hours(e.result.service_time), "h", expected, 0.04);
        }
    }
}

fn table_ii(outcomes: &[ScenarioOutcome], c: &mut Checks) {
    // (scenario, total kW, psi Enugu, psi York)
    const ROWS: [(&str, f64, f64, f64); 6] = [
        ("hap-30m-full", 1.78, 7.72, 1.15),
        ("hap-30m-split", 1.54, 9.6, 1.44),
        ("hap-60m-full", 2.68, 21.0, 3.15),
        ("hap-60m-split", 2.44, 24.24, 3.63),
        ("hap-25m-split", 1.45, 7.1, 1.06),
        ("hap-35m-split", 1.65, 12.21, 1.83),
    ];
    for (id, kw, enugu, york) in ROWS {
        let o = outcome(outcomes, id);
        c.rel(
            format!("{id} total power"),
            o.endurance[0].result.total_power / 1000.0,
            "kW",
            kw,
            0.01,
        );
        for (region, expected) in [("Enugu", enugu), ("York", york)] {
            let e = o
                .endurance
                .iter()
                .find(|e| e.region.eq_ignore_ascii_case(region))
                .expect("region in bundled scenario");
            c.rel(format!("{id} psi {region}"), e.result.ratio, "-", expected, 0.05);
            c.push(
                format!("{id} psi {region} self-sustaining"),
                e.result.ratio,
                "-",
                Criterion::Above { bound: 1.0 },
            );
        }
    }
}

fn table_v(outcomes: &[ScenarioOutcome], c: &mut Checks) {
    // (scenario, R_c m, N_ABS, N_BB range, total range)
    type Row = (&'static str, f64, u64, (u64, u64), (u64, u64));
    const ROWS: [Row; 2] = [
        ("rwd-pico", 251.0, 6, (7, 10), (42, 60)),
        ("rwd-micro", 351.0, 3, (14, 17), (42, 51)),
    ];
    for (id, radius, n_abs, n_bb, totals) in ROWS {
        let d = outcome(outcomes, id).dimensioning.as_ref().expect("dimensioning ran");
        c.rel(format!("{id} coverage radius"), d.coverage_radius, "m", radius, 0.02);
        c.exact(format!("{id} N_ABS"), d.n_abs as f64, "count", n_abs as f64);
        let (lo, hi) = d.backup_batteries_range();
        c.exact(format!("{id} N_BB min"), lo as f64, "count", n_bb.0 as f64);
        c.exact(format!("{id} N_BB max"), hi as f64, "count", n_bb.1 as f64);
        let (lo, hi) = d.total_batteries_range();
        c.exact(format!("{id} total batteries min"), lo as f64, "count", totals.0 as f64);
        c.exact(format!("{id} total batteries max"), hi as f64, "count", totals.1 as f64);
    }
}

/// Largest service-time gain, in minutes, of any panel over no panel at the
/// same battery mass and energy density.
pub fn max_solar_gain_minutes(o: &ScenarioOutcome) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for e in o.endurance.iter().filter(|e| e.panel_area > 0.0) {
        let Some(b) = e.battery else { continue };
        let base = o.endurance.iter().find(|x| {
            x.panel_area == 0.0 && x.region == e.region && x.battery == Some(b)
        });
        if let (Some(base), Some(t)) = (base, e.result.service_time.hours()) {
            if let Some(t0) = base.result.service_time.hours() {
                best = best.max((t - t0) * 60.0);
            }
        }
    }
    best
}

fn fig2(outcomes: &[ScenarioOutcome], rows: &[ReportRow], c: &mut Checks) {
    let mut keys: Vec<(&str, &str)> = rows
        .iter()
        .filter_map(|r| r.series.as_ref().map(|s| (r.scenario.as_str(), s.key.as_str())))
        .collect();
    keys.sort_unstable();
    keys.dedup();
    c.exact("series", keys.len() as f64, "count", 18.0);
    for (id, expected) in [("rwd-pico", 2.04), ("rwd-micro", 4.04)] {
        let o = outcome(outcomes, id);
        let e = o
            .endurance
            .iter()
            .find(|e| e.panel_area == 0.0 && e.battery.is_some_and(|b| b.mass == 5.0))
            .expect("5 kg point");
        c.rel(format!("{id} total power at 5 kg"), e.result.total_power / 1000.0, "kW", expected, 0.01);
    }
    c.push(
        "rwd-pico max solar gain",
        max_solar_gain_minutes(outcome(outcomes, "rwd-pico")),
        "min",
        Criterion::Within { lo: 2.0, hi: 5.0 },
    );
    c.push(
        "rwd-micro max solar gain",
        max_solar_gain_minutes(outcome(outcomes, "rwd-micro")),
        "min",
        Criterion::Within { lo: 0.0, hi: 1.5 },
    );
}

/// Run the bundled scenarios behind `table` and compare against the
/// published values.
pub fn reproduce(table: TableId, overrides: Overrides) -> Result<ReproduceReport, ReproduceError> {
    let ledger = Ledger::builtin()?;
    let mut outcomes = Vec::new();
    let mut rows = Vec::new();
    for id in table.scenarios() {
        let mut config = bundled_scenario(id, &ledger).expect("listed scenario is bundled")?;
        overrides.apply(&mut config);
        let o = run_scenario(&config, table.stages()).map_err(|source| ReproduceError::Model {
            scenario: id.to_string(),
            source,
        })?;
        rows.extend(o.rows(config.mode == aerobs_core::DeploymentMode::Split));
        outcomes.push(o);
    }
    let mut checks = Checks { table, list: Vec::new() };
    match table {
        TableId::I => table_i(&outcomes, &mut checks),
        TableId::II => table_ii(&outcomes, &mut checks),
        TableId::III => table_iii(&outcomes, &mut checks),
        TableId::V => table_v(&outcomes, &mut checks),
        TableId::Fig2Sweep => fig2(&outcomes, &rows, &mut checks),
    }
    Ok(ReproduceReport {
        table,
        outcomes,
        rows,
        checks: checks.list,
    })
}
