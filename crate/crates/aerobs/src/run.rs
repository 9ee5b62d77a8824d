//! Evaluate a validated scenario.

use aerobs_core::{
    backhaul_power, check_feasibility, combined_bs_power, coverage_radius, dimension, mechanical_power,
    rwd_service_time, BatterySpec, CombinedBsPower, CoverageResult, DimensioningReport,
    DimensioningScenario, EnduranceResult, Feasibility, ModelError, PayloadRule, PlatformKind,
    PlatformSpec, ServiceTime, SolarPanel,
};

use crate::config::ScenarioConfig;
use crate::report::{ReportRow, Series};

/// Which parts of a scenario to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Stages {
    pub power: bool,
    pub endurance: bool,
    pub coverage: bool,
    pub dimensioning: bool,
}

impl Stages {
    pub const ALL: Stages = Stages {
        power: true,
        endurance: true,
        coverage: true,
        dimensioning: true,
    };
    pub const POWER: Stages = Stages {
        power: true,
        endurance: false,
        coverage: false,
        dimensioning: false,
    };
    pub const ENDURANCE: Stages = Stages {
        power: false,
        endurance: true,
        coverage: false,
        dimensioning: false,
    };
    pub const COVERAGE: Stages = Stages {
        power: false,
        endurance: false,
        coverage: true,
        dimensioning: false,
    };
    pub const DIMENSIONING: Stages = Stages {
        power: false,
        endurance: false,
        coverage: false,
        dimensioning: true,
    };
}

/// Command-line overrides of the Monte Carlo settings.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub samples: Option<usize>,
}

impl Overrides {
    pub fn apply(&self, config: &mut ScenarioConfig) {
        if let Some(seed) = self.seed {
            config.search.seed = seed;
        }
        if let Some(samples) = self.samples {
            config.search.samples = samples;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerPoint {
    /// kg; `None` for platforms without a battery sweep
    pub battery_mass: Option<f64>,
    /// m²
    pub panel_area: f64,
    /// kg
    pub takeoff_mass: f64,
    /// W
    pub mechanical_without_bs: f64,
    pub combined: CombinedBsPower,
    /// W
    pub total: f64,
    /// W, present only when the scenario opts in
    pub backhaul: Option<f64>,
}

impl PowerPoint {
    /// Percentage of the total spent keeping the empty platform aloft.
    pub fn share_without_bs(&self) -> f64 {
        100.0 * self.mechanical_without_bs / self.total
    }

    /// Percentage of the total attributable to carrying and running the BS.
    pub fn combined_share(&self) -> f64 {
        100.0 * self.combined.total() / self.total
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EndurancePoint {
    pub battery: Option<BatterySpec>,
    pub panel_area: f64,
    pub region: String,
    pub power: PowerPoint,
    pub result: EnduranceResult,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioOutcome {
    pub id: String,
    pub platform: String,
    pub profile: String,
    pub kind: PlatformKind,
    pub feasibility: Feasibility,
    pub power: Vec<PowerPoint>,
    pub endurance: Vec<EndurancePoint>,
    pub coverage: Option<(f64, CoverageResult)>,
    pub dimensioning: Option<DimensioningReport>,
}

fn panel_template(config: &ScenarioConfig) -> SolarPanel {
    config
        .solar
        .as_ref()
        .map(|s| s.panel)
        .unwrap_or_else(|| SolarPanel::gaas(0.0))
}

fn panel_areas(config: &ScenarioConfig) -> Vec<f64> {
    match &config.solar {
        Some(s) => s.areas.clone(),
        None if config.platform.kind() == PlatformKind::RotaryWing => vec![0.0],
        None => vec![config.platform.default_panel_area()],
    }
}

/// The platform with battery and, where the payload rule counts them, panels
/// loaded; no base station yet.
fn loaded_spec(config: &ScenarioConfig, battery_mass: f64, panel_area: f64) -> PlatformSpec {
    let mut spec = config.platform.spec;
    let panel = SolarPanel {
        area: panel_area,
        ..panel_template(config)
    };
    let panel_mass = match spec.mass_budget.rule {
        PayloadRule::BsBatteryPanels | PayloadRule::BsAndPanels => panel.area * panel.areal_density,
        PayloadRule::FullPayloadBs | PayloadRule::BsOnly => 0.0,
    };
    spec.mass_budget = spec
        .mass_budget
        .with_battery_mass(battery_mass)
        .with_solar_panel_mass(panel_mass);
    spec
}

fn power_point(
    config: &ScenarioConfig,
    battery_mass: Option<f64>,
    panel_area: f64,
) -> Result<PowerPoint, ModelError> {
    let spec = loaded_spec(config, battery_mass.unwrap_or(0.0), panel_area);
    let combined = combined_bs_power(&spec, &config.profile, config.mode)?;
    let mechanical_without_bs = mechanical_power(&spec.without_bs())?;
    let total = mechanical_without_bs + combined.total();
    let backhaul = if config.backhaul_fraction > 0.0 {
        Some(backhaul_power(combined.comm, config.backhaul_fraction)?)
    } else {
        None
    };
    Ok(PowerPoint {
        battery_mass,
        panel_area,
        takeoff_mass: spec.with_bs_mass(config.profile.mass).mass_budget.takeoff_mass(),
        mechanical_without_bs,
        combined,
        total,
        backhaul,
    })
}

fn power_stage(config: &ScenarioConfig) -> Result<Vec<PowerPoint>, ModelError> {
    let masses: Vec<Option<f64>> = match (&config.battery, config.platform.kind()) {
        (Some(b), PlatformKind::RotaryWing) => b.masses.iter().copied().map(Some).collect(),
        _ => vec![None],
    };
    let mut points = Vec::new();
    for m in &masses {
        for &a in &panel_areas(config) {
            points.push(power_point(config, *m, a)?);
        }
    }
    Ok(points)
}

fn endurance_stage(config: &ScenarioConfig) -> Result<Vec<EndurancePoint>, ModelError> {
    let Some(solar) = &config.solar else {
        if config.platform.kind() == PlatformKind::RotaryWing && config.battery.is_some() {
            return rwd_endurance(config, &[0.0], &[aerobs_core::Region::new("none", 0.0)]);
        }
        return Ok(Vec::new());
    };
    if config.platform.kind() == PlatformKind::RotaryWing {
        if config.battery.is_none() {
            return Ok(Vec::new());
        }
        return rwd_endurance(config, &solar.areas, &solar.regions);
    }

    let mut points = Vec::new();
    for &area in &solar.areas {
        let power = power_point(config, None, area)?;
        for region in &solar.regions {
            let panel = SolarPanel { area, ..solar.panel };
            let harvested = aerobs_core::average_harvested_power(&panel, region)?;
            let result =
                aerobs_core::classify_endurance(harvested / power.total, power.total, config.low_margin_below)?;
            points.push(EndurancePoint {
                battery: None,
                panel_area: area,
                region: region.name.clone(),
                power: power.clone(),
                result,
            });
        }
    }
    Ok(points)
}

fn rwd_endurance(
    config: &ScenarioConfig,
    areas: &[f64],
    regions: &[aerobs_core::Region],
) -> Result<Vec<EndurancePoint>, ModelError> {
    let battery = config.battery.as_ref().expect("checked by caller");
    let template = panel_template(config);
    let mut points = Vec::new();
    for &density in &battery.energy_densities {
        for &area in areas {
            for region in regions {
                for &mass in &battery.masses {
                    let spec = BatterySpec::new(mass, density);
                    let panel = SolarPanel { area, ..template };
                    let mut result =
                        rwd_service_time(&config.platform.spec, &config.profile, &spec, &panel, region)?;
                    if let ServiceTime::Indefinite { .. } = result.service_time {
                        result.service_time = ServiceTime::Indefinite {
                            low_margin: result.ratio < config.low_margin_below,
                        };
                    }
                    points.push(EndurancePoint {
                        battery: Some(spec),
                        panel_area: area,
                        region: region.name.clone(),
                        power: power_point(config, Some(mass), area)?,
                        result,
                    });
                }
            }
        }
    }
    Ok(points)
}

fn coverage_stage(config: &ScenarioConfig) -> Result<Option<(f64, CoverageResult)>, ModelError> {
    let Some(cov) = &config.coverage else {
        return Ok(None);
    };
    let tx = config.profile.tx_power_dbm()?;
    let rx = config
        .profile
        .rx_sensitivity
        .ok_or(ModelError::MissingRadio("rx_sensitivity"))?;
    let result = coverage_radius(tx, rx, cov.altitude, &cov.environment, &config.search)?;
    if let Some(d) = &result.diagnostic {
        log::warn!("{}: {d}", config.id);
    }
    Ok(Some((cov.altitude, result)))
}

fn dimensioning_stage(config: &ScenarioConfig) -> Result<Option<DimensioningReport>, ModelError> {
    let (Some(dim), Some(cov), Some(battery)) = (&config.dimensioning, &config.coverage, &config.battery) else {
        return Ok(None);
    };
    // only the mass enters the backup-battery count
    let batteries: Vec<BatterySpec> = battery
        .masses
        .iter()
        .map(|&m| BatterySpec::new(m, battery.energy_densities[0]))
        .collect();
    let report = dimension(&DimensioningScenario {
        platform: &config.platform.spec,
        profile: &config.profile,
        mode: config.mode,
        batteries: &batteries,
        area: dim.area,
        station: dim.station,
        altitude: cov.altitude,
        environment: &cov.environment,
        search: config.search,
    })?;
    Ok(Some(report))
}

/// Evaluate the requested stages of a scenario.
pub fn run_scenario(config: &ScenarioConfig, stages: Stages) -> Result<ScenarioOutcome, ModelError> {
    let feasibility = check_feasibility(&config.platform.spec, &config.profile, &config.platform.compatible);
    let power = if stages.power { power_stage(config)? } else { Vec::new() };
    let endurance = if stages.endurance {
        endurance_stage(config)?
    } else {
        Vec::new()
    };
    let dimensioning = if stages.dimensioning {
        dimensioning_stage(config)?
    } else {
        None
    };
    let coverage = match (&dimensioning, &config.coverage) {
        (Some(d), Some(c)) if stages.coverage => Some((c.altitude, d.coverage.clone())),
        _ if stages.coverage => coverage_stage(config)?,
        _ => None,
    };
    Ok(ScenarioOutcome {
        id: config.id.clone(),
        platform: config.platform.name.clone(),
        profile: config.profile_name.clone(),
        kind: config.platform.kind(),
        feasibility,
        power,
        endurance,
        coverage,
        dimensioning,
    })
}

const MECH_RWD: &str = "hover power: blade profile + (1+k) W^1.5 / sqrt(2 rho A_D)";
const MECH_FWD: &str = "loiter power: (c1 + c2/(g^2 r^2)) V^3 + c2/V";
const MECH_HAP: &str = "C_D/(eta_p C_L^1.5) sqrt(2 W^3/(rho A_w)) + avionics";
const COMM_FULL: &str = "P_BB + P_RF + P_PA + P_OH";
const COMM_SPLIT: &str = "P_RF + P_PA + P_OH (baseband on the ground)";

fn mech_note(kind: PlatformKind) -> &'static str {
    match kind {
        PlatformKind::RotaryWing => MECH_RWD,
        PlatformKind::FixedWing => MECH_FWD,
        PlatformKind::Hap => MECH_HAP,
    }
}

fn fmt_num(v: f64) -> String {
    format!("{v}")
}

fn power_case(p: &PowerPoint) -> String {
    match p.battery_mass {
        Some(m) => format!("m_b={}kg;A_pv={}m2", fmt_num(m), fmt_num(p.panel_area)),
        None => format!("A_pv={}m2", fmt_num(p.panel_area)),
    }
}

impl ScenarioOutcome {
    fn row(&self, case: &str, metric: &str, value: f64, unit: &str, provenance: &str) -> ReportRow {
        ReportRow {
            scenario: self.id.clone(),
            case: case.to_string(),
            metric: metric.to_string(),
            value,
            unit: unit.to_string(),
            provenance: provenance.to_string(),
            series: None,
        }
    }

    fn power_rows(&self, case: &str, p: &PowerPoint, comm_note: &str, out: &mut Vec<ReportRow>) {
        let mech = mech_note(self.kind);
        out.push(self.row(case, "takeoff_mass", p.takeoff_mass, "kg", "structural + payload masses"));
        out.push(self.row(case, "mechanical_power_without_bs", p.mechanical_without_bs, "W", mech));
        out.push(self.row(
            case,
            "excess_mechanical_power",
            p.combined.excess_mechanical,
            "W",
            "mechanical power with BS minus without",
        ));
        out.push(self.row(case, "comm_power", p.combined.comm, "W", comm_note));
        out.push(self.row(
            case,
            "combined_bs_power",
            p.combined.total(),
            "W",
            "excess mechanical + communication power",
        ));
        out.push(self.row(case, "total_power", p.total, "W", "mechanical power with BS + communication power"));
    }

    /// Flatten the outcome into report rows.
    pub fn rows(&self, comm_mode_split: bool) -> Vec<ReportRow> {
        let comm_note = if comm_mode_split { COMM_SPLIT } else { COMM_FULL };
        let mut out = Vec::new();

        for p in &self.power {
            let case = power_case(p);
            self.power_rows(&case, p, comm_note, &mut out);
            out.push(self.row(
                &case,
                "share_without_bs",
                p.share_without_bs(),
                "%",
                "mechanical power without BS / total power",
            ));
            out.push(self.row(
                &case,
                "combined_bs_share",
                p.combined_share(),
                "%",
                "combined BS power / total power",
            ));
            if let Some(b) = p.backhaul {
                out.push(self.row(&case, "backhaul_power", b, "W", "fraction x communication power"));
                out.push(self.row(&case, "total_power_with_backhaul", p.total + b, "W", "total power + backhaul"));
            }
        }

        for e in &self.endurance {
            let mut key = String::new();
            if let Some(b) = &e.battery {
                key.push_str(&format!("E_d={}Wh/kg;", fmt_num(b.energy_density)));
            }
            key.push_str(&format!("A_pv={}m2;region={}", fmt_num(e.panel_area), e.region));
            let case = match &e.battery {
                Some(b) => format!("m_b={}kg;{key}", fmt_num(b.mass)),
                None => key.clone(),
            };
            let series = e.battery.map(|_| Series {
                key: key.clone(),
                x: e.power.takeoff_mass,
            });
            let start = out.len();
            self.power_rows(&case, &e.power, comm_note, &mut out);
            let (ratio_note, time_note) = match self.kind {
                PlatformKind::RotaryWing => ("P_sol / P_T", "T = E_d m_b / (P_T - P_sol)"),
                _ => ("psi = E_T / (24 P_T)", "T = 24 psi"),
            };
            out.push(self.row(
                &case,
                "harvested_power",
                e.result.harvested_power,
                "W",
                "A G_T eta / 24 h",
            ));
            out.push(self.row(&case, "harvest_ratio", e.result.ratio, "-", ratio_note));
            out.push(self.row(
                &case,
                "robustness_margin",
                e.result.robustness_margin,
                "-",
                "harvest ratio - 1",
            ));
            match e.result.service_time {
                ServiceTime::Hours(h) => {
                    out.push(self.row(&case, "service_time", h, "h", time_note));
                }
                ServiceTime::Indefinite { low_margin } => {
                    out.push(self.row(&case, "indefinite_service", 1.0, "flag", "harvest ratio >= 1"));
                    out.push(self.row(
                        &case,
                        "low_margin",
                        if low_margin { 1.0 } else { 0.0 },
                        "flag",
                        "harvest ratio below the robustness threshold",
                    ));
                }
            }
            if let Some(s) = &series {
                for r in &mut out[start..] {
                    r.series = Some(s.clone());
                }
            }
        }

        if let Some((altitude, c)) = &self.coverage {
            let case = format!("h={}m", fmt_num(*altitude));
            out.push(self.row(
                &case,
                "coverage_radius",
                c.radius,
                "m",
                "largest ground range with P(P_rx > P_min) above the reliability target",
            ));
            out.push(self.row(
                &case,
                "outage_at_radius",
                c.outage_at_radius,
                "-",
                "empirical P(P_rx <= P_min) at the coverage radius",
            ));
            out.push(self.row(&case, "samples_per_point", c.samples_per_point as f64, "count", "Monte Carlo draws"));
            out.push(self.row(&case, "seed", c.seed as f64, "-", "ChaCha8 seed; stream = radius index"));
        }

        if let Some(d) = &self.dimensioning {
            out.push(self.row("fleet", "n_abs", d.n_abs as f64, "count", "ceil(A_s / (pi R_c^2))"));
            for p in &d.points {
                let case = format!("m_b={}kg", fmt_num(p.battery_mass));
                out.push(self.row(
                    &case,
                    "total_power",
                    p.total_power,
                    "W",
                    "mechanical power with BS + communication power",
                ));
                out.push(self.row(&case, "backup_batteries", p.backup_batteries as f64, "count", "ceil(P_T / P_c)"));
                out.push(self.row(&case, "total_batteries", p.total_batteries as f64, "count", "n_abs x backup batteries"));
                out.push(self.row(
                    &case,
                    "total_battery_mass",
                    p.total_battery_mass,
                    "kg",
                    "total batteries x battery mass",
                ));
            }
        }
        out
    }
}

/// Run a scenario and flatten it into report rows.
pub fn scenario_rows(config: &ScenarioConfig, stages: Stages) -> Result<Vec<ReportRow>, ModelError> {
    let outcome = run_scenario(config, stages)?;
    Ok(outcome.rows(config.mode == aerobs_core::DeploymentMode::Split))
}
