use std::fs;
use std::path::Path;

use aerobs::config::{load_scenario, DEFAULT_SEED};
use aerobs::reproduce::{bundled_scenario, BUNDLED};
use aerobs::{emit, run_scenario, scenario_rows, Format, Ledger, ReportRow, Stages};
use aerobs_core::ServiceTime;
use approx::assert_relative_eq;

fn bundled(id: &str) -> aerobs::ScenarioConfig {
    bundled_scenario(id, &Ledger::builtin().unwrap()).unwrap().unwrap()
}

fn find<'a>(rows: &'a [ReportRow], case: &str, metric: &str) -> &'a ReportRow {
    rows.iter()
        .find(|r| r.case == case && r.metric == metric)
        .unwrap_or_else(|| panic!("no row {case}/{metric}"))
}

#[test]
fn bundled_files_on_disk_match_embedded_copies() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios");
    for (id, src) in BUNDLED {
        let path = dir.join(format!("{id}.scenario"));
        assert_eq!(&fs::read_to_string(&path).unwrap(), src);
        let config = load_scenario(&path).unwrap();
        assert_eq!(config, bundled(id));
    }
}

#[test]
fn rwd_pico_round_trip() {
    let c = bundled("rwd-pico");
    assert_eq!(c.platform.name, "rwd");
    assert_eq!(c.profile.mass, 3.0);
    let battery = c.battery.as_ref().unwrap();
    assert_eq!(battery.masses, vec![5.0, 6.0, 7.0, 8.0, 9.0]);
    assert_eq!(battery.energy_densities, vec![50.0, 180.0, 350.0]);
    assert_eq!(c.solar.as_ref().unwrap().areas, vec![0.0, 0.5, 1.0]);
    assert_eq!(c.search.seed, DEFAULT_SEED);
    assert_eq!(c.coverage.as_ref().unwrap().altitude, 100.0);
}

#[test]
fn rwd_pico_total_power_row() {
    let rows = scenario_rows(&bundled("rwd-pico"), Stages::POWER).unwrap();
    let total = find(&rows, "m_b=5kg;A_pv=0m2", "total_power");
    assert_relative_eq!(total.value / 1000.0, 2.04, max_relative = 0.01);
    assert_eq!(total.unit, "W");
    assert!(!total.provenance.is_empty());
    assert_eq!(rows.iter().filter(|r| r.metric == "total_power").count(), 15);
}

#[test]
fn fwd_10m_enugu_service_time() {
    let rows = scenario_rows(&bundled("fwd-10m"), Stages::ENDURANCE).unwrap();
    let case = format!("A_pv={}m2;region=enugu", 100.0 / 9.5);
    assert_relative_eq!(find(&rows, &case, "service_time").value, 16.47, max_relative = 0.04);
}

#[test]
fn hap_60m_full_enugu_ratio() {
    let outcome = run_scenario(&bundled("hap-60m-full"), Stages::ENDURANCE).unwrap();
    let enugu = outcome.endurance.iter().find(|e| e.region == "enugu").unwrap();
    assert_relative_eq!(enugu.result.ratio, 21.0, max_relative = 0.05);
    assert_eq!(enugu.result.service_time, ServiceTime::Indefinite { low_margin: false });
    let york = outcome.endurance.iter().find(|e| e.region == "york").unwrap();
    assert!(york.result.ratio > 1.0);
}

#[test]
fn hap_30m_york_is_flagged_low_margin() {
    let rows = scenario_rows(&bundled("hap-30m-full"), Stages::ENDURANCE).unwrap();
    let flag = rows
        .iter()
        .find(|r| r.case.ends_with("region=york") && r.metric == "low_margin")
        .unwrap();
    assert_eq!(flag.value, 1.0);
}

#[test]
fn rows_are_finite_and_carry_units() {
    for (id, _) in BUNDLED {
        let stages = if id.starts_with("rwd") {
            Stages::ENDURANCE
        } else {
            Stages { coverage: false, dimensioning: false, ..Stages::ALL }
        };
        for r in scenario_rows(&bundled(id), stages).unwrap() {
            assert!(r.value.is_finite(), "{id} {r:?}");
            assert!(!r.unit.is_empty(), "{id} {r:?}");
        }
    }
}

#[test]
fn csv_round_trips_through_a_generic_parser() {
    let rows = scenario_rows(&bundled("fwd-5m"), Stages::ALL).unwrap();
    let mut buf = Vec::new();
    emit(&rows, Format::Csv, None, &mut buf).unwrap();
    let mut reader = csv::Reader::from_reader(buf.as_slice());
    assert_eq!(
        reader.headers().unwrap(),
        vec!["scenario", "case", "metric", "value", "unit", "provenance"]
    );
    let parsed: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(parsed.len(), rows.len());
    for (record, row) in parsed.iter().zip(&rows) {
        assert_eq!(&record[0], row.scenario);
        assert_eq!(&record[2], row.metric);
        assert_eq!(record[3].parse::<f64>().unwrap(), row.value);
        assert_eq!(&record[5], row.provenance);
    }
}

#[test]
fn fig2_plot_data_has_eighteen_series() {
    let dir = tempfile::tempdir().unwrap();
    let report = aerobs::reproduce(aerobs::TableId::Fig2Sweep, Default::default()).unwrap();
    let files = emit(&report.rows, Format::PlotData, Some(dir.path()), &mut std::io::sink()).unwrap();
    assert_eq!(files.len(), 18);
    let text = fs::read_to_string(dir.path().join("rwd-micro__E_d=180Wh_kg_A_pv=0.5m2_region=enugu.csv")).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("takeoff_mass_kg,"));
    assert!(header.contains("service_time_h"));
    assert!(header.contains("comm_power_W"));
    assert_eq!(lines.count(), 5);
}

#[test]
fn inline_scenario_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("custom.scenario");
    fs::write(
        &path,
        r#"
        platform = "hap-60m"
        bs = "macro"
        mode = "split"
        backhaul_fraction = 0.1
        [solar]
        area = "100 m2"
        region = { name = "equator", daily_irradiance = "8 kWh_per_m2_day" }
        "#,
    )
    .unwrap();
    let c = load_scenario(&path).unwrap();
    assert_eq!(c.id, "custom");
    let rows = scenario_rows(&c, Stages::ALL).unwrap();
    let case = "A_pv=100m2";
    assert_relative_eq!(find(&rows, case, "comm_power").value, 1237.0);
    assert_relative_eq!(find(&rows, case, "backhaul_power").value, 123.7, max_relative = 1e-12);
    let ratio = find(&rows, "A_pv=100m2;region=equator", "harvest_ratio").value;
    let total = find(&rows, case, "total_power").value;
    assert_relative_eq!(ratio, 100.0 * 8.0 * 1000.0 * 0.3775 / (24.0 * total), max_relative = 1e-12);
}
