//! Ledger and scenario files.
//!
//! Both are TOML. The ledger holds named platforms, base-station profiles,
//! panels, regions and channel environments. A scenario picks entries from
//! the ledger by name (or defines them inline) and adds the sweep, coverage
//! and dimensioning inputs for one run.
//!
//! Loading happens in two passes. Serde handles syntax and reports the first
//! structural problem with its line and key. Resolution then checks units,
//! ranges and cross-references and reports every violation it finds.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use aerobs_core::{
    check_feasibility, BsClass, BsProfile, ChannelEnvironment, ChargingStation, CoverageSearch,
    DeploymentMode, FixedWingParams, HapParams, MassBudget, ModelError, PayloadRule, PlatformKind,
    PlatformSpec, PlatformVariant, Region, RotorParams, ServiceArea, SolarPanel, Verdict,
};
use serde::Deserialize;
use thiserror::Error;

use crate::units::{Quantity, Unit};

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_SAMPLES: usize = 10_000;
pub const DEFAULT_RELIABILITY: f64 = 0.99;
pub const DEFAULT_RADIUS_STEP: f64 = 1.0;
pub const DEFAULT_LOW_MARGIN_BELOW: f64 = aerobs_core::endurance::DEFAULT_LOW_MARGIN_BELOW;

const BUILTIN_LEDGER: &str = include_str!("../data/ledger.toml");

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{origin}: parse error: {message}")]
    Parse { origin: String, message: String },
    #[error("{origin}: {} validation error(s):\n{}", .errors.len(), ValidationList(.errors))]
    Validation { origin: String, errors: Vec<String> },
}

struct ValidationList<'a>(&'a [String]);

impl fmt::Display for ValidationList<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "  - {e}")?;
        }
        Ok(())
    }
}

impl ConfigError {
    pub fn errors(&self) -> &[String] {
        match self {
            ConfigError::Validation { errors, .. } => errors,
            _ => &[],
        }
    }
}

// ---------------------------------------------------------------------------
// Raw file structures
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLedger {
    version: u32,
    #[serde(default)]
    panels: BTreeMap<String, RawPanel>,
    #[serde(default)]
    regions: BTreeMap<String, RawRegion>,
    #[serde(default)]
    platforms: BTreeMap<String, RawPlatform>,
    #[serde(default)]
    profiles: BTreeMap<String, RawProfile>,
    #[serde(default)]
    environments: BTreeMap<String, RawEnvironment>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPanel {
    #[serde(rename = "provenance")]
    _provenance: Option<String>,
    efficiency: Option<Quantity>,
    areal_density: Option<Quantity>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRegion {
    name: Option<String>,
    #[serde(rename = "provenance")]
    _provenance: Option<String>,
    daily_irradiance: Option<Quantity>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPlatform {
    kind: Option<String>,
    provenance: Option<String>,
    structural_mass: Option<Quantity>,
    max_payload: Option<Quantity>,
    payload_rule: Option<String>,
    compatible: Option<Vec<String>>,
    panel_area: Option<Quantity>,
    // rotary wing
    profile_drag_coeff: Option<Quantity>,
    correction_factor: Option<Quantity>,
    rotor_solidity: Option<Quantity>,
    rotor_radius: Option<Quantity>,
    blade_angular_velocity: Option<Quantity>,
    // fixed wing
    wingspan: Option<Quantity>,
    aspect_ratio: Option<Quantity>,
    zero_lift_drag_coeff: Option<Quantity>,
    oswald_efficiency: Option<Quantity>,
    turn_radius: Option<Quantity>,
    gravity: Option<Quantity>,
    // HAP
    wing_area: Option<Quantity>,
    drag_coeff: Option<Quantity>,
    propeller_efficiency: Option<Quantity>,
    avionics_mass: Option<Quantity>,
    avionics_power_ratio: Option<Quantity>,
    // shared
    air_density: Option<Quantity>,
    speed: Option<Quantity>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProfile {
    class: Option<String>,
    #[serde(rename = "provenance")]
    _provenance: Option<String>,
    mass: Option<Quantity>,
    p_bb: Option<Quantity>,
    p_rf: Option<Quantity>,
    p_pa: Option<Quantity>,
    p_oh: Option<Quantity>,
    tx_power: Option<Quantity>,
    rx_sensitivity: Option<Quantity>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEnvironment {
    #[serde(rename = "provenance")]
    _provenance: Option<String>,
    frequency: Option<Quantity>,
    mean_los: Option<Quantity>,
    mean_nlos: Option<Quantity>,
    sigma_scale_los: Option<Quantity>,
    sigma_scale_nlos: Option<Quantity>,
    sigma_decay_los: Option<Quantity>,
    sigma_decay_nlos: Option<Quantity>,
    los_coeff: Option<Quantity>,
    los_exp: Option<Quantity>,
    theta0: Option<Quantity>,
}

/// A ledger reference or an inline definition.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Ref<T> {
    Name(String),
    Inline(T),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    id: Option<String>,
    description: Option<String>,
    platform: Option<Ref<RawPlatform>>,
    bs: Option<Ref<RawProfile>>,
    mode: Option<String>,
    backhaul_fraction: Option<Quantity>,
    low_margin_below: Option<Quantity>,
    battery: Option<RawBattery>,
    solar: Option<RawSolar>,
    coverage: Option<RawCoverage>,
    monte_carlo: Option<RawMonteCarlo>,
    dimensioning: Option<RawDimensioning>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBattery {
    mass: Option<Quantity>,
    masses: Option<Vec<Quantity>>,
    energy_density: Option<Quantity>,
    energy_densities: Option<Vec<Quantity>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSolar {
    panel: Option<Ref<RawPanel>>,
    area: Option<Quantity>,
    areas: Option<Vec<Quantity>>,
    region: Option<Ref<RawRegion>>,
    regions: Option<Vec<Ref<RawRegion>>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCoverage {
    environment: Option<Ref<RawEnvironment>>,
    altitude: Option<Quantity>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMonteCarlo {
    seed: Option<u64>,
    samples: Option<u64>,
    radius_step: Option<Quantity>,
    reliability: Option<Quantity>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDimensioning {
    service_area: Option<Quantity>,
    charging_power: Option<Quantity>,
}

// ---------------------------------------------------------------------------
// Resolved structures
// ---------------------------------------------------------------------------

/// A back-solved default, echoed into the run log whenever it is used.
#[derive(Debug, Clone, PartialEq)]
pub struct LedgerNote {
    pub key: String,
    pub value: f64,
    pub unit: String,
    pub oracle: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlatformEntry {
    pub name: String,
    pub spec: PlatformSpec,
    pub compatible: Vec<BsClass>,
    /// Panel area used when a scenario does not give one.
    pub panel_area: Option<f64>,
    pub provenance: Option<String>,
}

impl PlatformEntry {
    pub fn kind(&self) -> PlatformKind {
        self.spec.kind()
    }

    /// Default panel area: the declared one, else the wing area for fixed
    /// wings, else none.
    pub fn default_panel_area(&self) -> f64 {
        self.panel_area.unwrap_or(match &self.spec.variant {
            PlatformVariant::FixedWing(fw) => fw.wing_area(),
            _ => 0.0,
        })
    }
}

#[derive(Debug, Clone)]
pub struct Ledger {
    pub version: u32,
    pub panels: BTreeMap<String, SolarPanel>,
    pub regions: BTreeMap<String, Region>,
    pub platforms: BTreeMap<String, PlatformEntry>,
    pub profiles: BTreeMap<String, BsProfile>,
    pub environments: BTreeMap<String, ChannelEnvironment>,
    notes: BTreeMap<String, Vec<LedgerNote>>,
}

impl Ledger {
    pub fn builtin() -> Result<Self, ConfigError> {
        Self::parse(BUILTIN_LEDGER, "builtin ledger")
    }

    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let src = read(path)?;
        Self::parse(&src, &path.display().to_string())
    }

    pub fn parse(src: &str, origin: &str) -> Result<Self, ConfigError> {
        let raw: RawLedger = toml::from_str(src).map_err(|e| ConfigError::Parse {
            origin: origin.to_string(),
            message: e.to_string(),
        })?;
        let mut r = Resolver::default();
        let mut ledger = Ledger {
            version: raw.version,
            panels: BTreeMap::new(),
            regions: BTreeMap::new(),
            platforms: BTreeMap::new(),
            profiles: BTreeMap::new(),
            environments: BTreeMap::new(),
            notes: BTreeMap::new(),
        };
        for (name, p) in &raw.panels {
            let key = format!("panels.{name}");
            let panel = r.panel(&key, p);
            ledger.notes.insert(key, r.take_notes());
            ledger.panels.insert(name.clone(), panel);
        }
        for (name, reg) in &raw.regions {
            let key = format!("regions.{name}");
            let region = r.region(&key, name, reg);
            ledger.notes.insert(key, r.take_notes());
            ledger.regions.insert(name.clone(), region);
        }
        for (name, p) in &raw.platforms {
            let key = format!("platforms.{name}");
            let entry = r.platform(&key, name, p);
            ledger.notes.insert(key, r.take_notes());
            if let Some(entry) = entry {
                ledger.platforms.insert(name.clone(), entry);
            }
        }
        for (name, p) in &raw.profiles {
            let key = format!("profiles.{name}");
            let profile = r.profile(&key, p);
            ledger.notes.insert(key, r.take_notes());
            if let Some(profile) = profile {
                ledger.profiles.insert(name.clone(), profile);
            }
        }
        for (name, e) in &raw.environments {
            let key = format!("environments.{name}");
            let env = r.environment(&key, e);
            ledger.notes.insert(key, r.take_notes());
            ledger.environments.insert(name.clone(), env);
        }
        r.finish(origin)?;
        Ok(ledger)
    }

    /// Back-solved values recorded for one entry, e.g. `platforms.hap-30m`.
    pub fn notes_for(&self, entry: &str) -> &[LedgerNote] {
        self.notes.get(entry).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Every back-solved value in the ledger.
    pub fn all_notes(&self) -> impl Iterator<Item = &LedgerNote> {
        self.notes.values().flatten()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatterySweep {
    /// kg
    pub masses: Vec<f64>,
    /// Wh·kg⁻¹
    pub energy_densities: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolarSetup {
    pub panel_name: String,
    /// Cell properties; the area is taken from `areas`.
    pub panel: SolarPanel,
    pub areas: Vec<f64>,
    pub regions: Vec<Region>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageSetup {
    pub environment_name: String,
    pub environment: ChannelEnvironment,
    /// m
    pub altitude: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensioningSetup {
    pub area: ServiceArea,
    pub station: ChargingStation,
}

/// A fully validated scenario with defaults applied.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub id: String,
    pub description: Option<String>,
    pub platform: PlatformEntry,
    pub profile_name: String,
    pub profile: BsProfile,
    pub mode: DeploymentMode,
    /// Zero unless the scenario opts in to backhaul overhead.
    pub backhaul_fraction: f64,
    pub low_margin_below: f64,
    pub battery: Option<BatterySweep>,
    pub solar: Option<SolarSetup>,
    pub coverage: Option<CoverageSetup>,
    pub search: CoverageSearch,
    pub dimensioning: Option<DimensioningSetup>,
    /// Back-solved ledger values this scenario depends on.
    pub defaults: Vec<LedgerNote>,
    pub ledger_version: u32,
}

fn read(path: &Path) -> Result<String, ConfigError> {
    std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Load and validate a scenario file against the builtin ledger.
pub fn load_scenario(path: &Path) -> Result<ScenarioConfig, ConfigError> {
    let ledger = Ledger::builtin()?;
    load_scenario_with(path, &ledger)
}

pub fn load_scenario_with(path: &Path, ledger: &Ledger) -> Result<ScenarioConfig, ConfigError> {
    let src = read(path)?;
    parse_scenario(&src, &path.display().to_string(), ledger)
}

pub fn parse_scenario(src: &str, origin: &str, ledger: &Ledger) -> Result<ScenarioConfig, ConfigError> {
    let raw: RawScenario = toml::from_str(src).map_err(|e| ConfigError::Parse {
        origin: origin.to_string(),
        message: e.to_string(),
    })?;
    let config = Resolver::default().scenario(&raw, ledger, origin)?;
    log::info!(
        "scenario `{}`: platform `{}`, base station `{}`, ledger v{}",
        config.id,
        config.platform.name,
        config.profile_name,
        config.ledger_version
    );
    for note in &config.defaults {
        log::info!(
            "  default {} = {} {} ({})",
            note.key,
            note.value,
            note.unit,
            note.oracle
        );
    }
    Ok(config)
}

// ---------------------------------------------------------------------------
// Resolution with error collection
// ---------------------------------------------------------------------------

#[derive(Default)]
struct Resolver {
    errors: Vec<String>,
    notes: Vec<LedgerNote>,
}

impl Resolver {
    fn error(&mut self, msg: String) {
        self.errors.push(msg);
    }

    fn take_notes(&mut self) -> Vec<LedgerNote> {
        std::mem::take(&mut self.notes)
    }

    fn finish(self, origin: &str) -> Result<(), ConfigError> {
        if self.errors.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Validation {
                origin: origin.to_string(),
                errors: self.errors,
            })
        }
    }

    fn note(&mut self, key: &str, q: &Quantity, unit: &str) {
        if let Some(oracle) = &q.oracle {
            self.notes.push(LedgerNote {
                key: key.to_string(),
                value: q.value,
                unit: unit.to_string(),
                oracle: oracle.clone(),
            });
        }
    }

    fn checked(&mut self, key: &str, q: &Quantity, unit: Option<Unit>) -> Option<f64> {
        let v = match unit {
            Some(u) => q.expect(u),
            None => q.expect_plain(),
        };
        match v {
            Ok(v) if v.is_nan() => {
                self.error(format!("`{key}` is not a number"));
                None
            }
            Ok(v) => {
                self.note(key, q, unit.map(Unit::suffix).unwrap_or(""));
                Some(v)
            }
            Err(msg) => {
                self.error(format!("`{key}`: {msg}"));
                None
            }
        }
    }

    /// Required value; NaN when missing or invalid (an error is recorded).
    fn req(&mut self, key: &str, q: &Option<Quantity>, unit: Option<Unit>) -> f64 {
        match q {
            Some(q) => self.checked(key, q, unit).unwrap_or(f64::NAN),
            None => {
                self.error(format!("`{key}` is required"));
                f64::NAN
            }
        }
    }

    fn opt(&mut self, key: &str, q: &Option<Quantity>, unit: Option<Unit>) -> Option<f64> {
        q.as_ref().map(|q| self.checked(key, q, unit).unwrap_or(f64::NAN))
    }

    fn non_negative(&mut self, key: &str, v: f64) -> f64 {
        if v.is_finite() && v < 0.0 {
            self.error(format!("`{key}` must be non-negative, got {v}"));
        } else if v.is_infinite() {
            self.error(format!("`{key}` must be finite, got {v}"));
        }
        v
    }

    fn positive(&mut self, key: &str, v: f64) -> f64 {
        if v.is_infinite() {
            self.error(format!("`{key}` must be finite, got {v}"));
        } else if !v.is_nan() && v <= 0.0 {
            self.error(format!("`{key}` must be strictly positive, got {v}"));
        }
        v
    }

    fn model(&mut self, key: &str, r: Result<(), ModelError>) {
        if let Err(e) = r {
            // NaN values stem from errors already recorded
            if !matches!(e, ModelError::Domain { value, .. } if value.is_nan()) {
                self.error(format!("`{key}`: {e}"));
            }
        }
    }

    fn forbid(&mut self, key: &str, field: &str, present: bool, kind: &str) {
        if present {
            self.error(format!("`{key}.{field}` does not apply to {kind} platforms"));
        }
    }

    fn panel(&mut self, key: &str, p: &RawPanel) -> SolarPanel {
        let panel = SolarPanel {
            area: 0.0,
            efficiency: self.req(&format!("{key}.efficiency"), &p.efficiency, None),
            areal_density: self.req(&format!("{key}.areal_density"), &p.areal_density, Some(Unit::KgPerM2)),
        };
        self.model(key, panel.validate());
        panel
    }

    fn region(&mut self, key: &str, name: &str, reg: &RawRegion) -> Region {
        let g = self.req(&format!("{key}.daily_irradiance"), &reg.daily_irradiance, Some(Unit::KWhPerM2Day));
        let region = Region::new(reg.name.clone().unwrap_or_else(|| name.to_string()), g);
        self.non_negative(&format!("{key}.daily_irradiance"), g);
        region
    }

    fn platform(&mut self, key: &str, name: &str, p: &RawPlatform) -> Option<PlatformEntry> {
        let k = |f: &str| format!("{key}.{f}");
        let structural = self.req(&k("structural_mass"), &p.structural_mass, Some(Unit::Kg));
        let max_payload = self.req(&k("max_payload"), &p.max_payload, Some(Unit::Kg));
        self.non_negative(&k("structural_mass"), structural);
        self.non_negative(&k("max_payload"), max_payload);
        let panel_area = self.opt(&k("panel_area"), &p.panel_area, Some(Unit::M2));
        if let Some(a) = panel_area {
            self.non_negative(&k("panel_area"), a);
        }
        let compatible = p
            .compatible
            .iter()
            .flatten()
            .filter_map(|c| match c.parse::<BsClass>() {
                Ok(c) => Some(c),
                Err(e) => {
                    self.error(format!("`{}`: {e}", k("compatible")));
                    None
                }
            })
            .collect();

        let kind = p.kind.as_deref().unwrap_or_default();
        let (variant, default_rule) = match kind {
            "rotary_wing" => {
                for (f, present) in [
                    ("wingspan", p.wingspan.is_some()),
                    ("wing_area", p.wing_area.is_some()),
                    ("speed", p.speed.is_some()),
                ] {
                    self.forbid(key, f, present, "rotary_wing");
                }
                let rotor = RotorParams {
                    profile_drag_coeff: self.req(&k("profile_drag_coeff"), &p.profile_drag_coeff, None),
                    correction_factor: self.req(&k("correction_factor"), &p.correction_factor, None),
                    air_density: self.req(&k("air_density"), &p.air_density, Some(Unit::KgPerM3)),
                    rotor_solidity: self.req(&k("rotor_solidity"), &p.rotor_solidity, None),
                    rotor_radius: self.req(&k("rotor_radius"), &p.rotor_radius, Some(Unit::M)),
                    blade_angular_velocity: self.req(
                        &k("blade_angular_velocity"),
                        &p.blade_angular_velocity,
                        Some(Unit::RadPerS),
                    ),
                };
                self.model(key, rotor.validate());
                (PlatformVariant::RotaryWing(rotor), PayloadRule::BsBatteryPanels)
            }
            "fixed_wing" => {
                for (f, present) in [
                    ("rotor_radius", p.rotor_radius.is_some()),
                    ("wing_area", p.wing_area.is_some()),
                ] {
                    self.forbid(key, f, present, "fixed_wing");
                }
                let fw = FixedWingParams {
                    wingspan: self.req(&k("wingspan"), &p.wingspan, Some(Unit::M)),
                    aspect_ratio: self.req(&k("aspect_ratio"), &p.aspect_ratio, None),
                    zero_lift_drag_coeff: self.req(&k("zero_lift_drag_coeff"), &p.zero_lift_drag_coeff, None),
                    oswald_efficiency: self.req(&k("oswald_efficiency"), &p.oswald_efficiency, None),
                    air_density: self.req(&k("air_density"), &p.air_density, Some(Unit::KgPerM3)),
                    speed: self.req(&k("speed"), &p.speed, Some(Unit::MPerS)),
                    turn_radius: self.req(&k("turn_radius"), &p.turn_radius, Some(Unit::M)),
                    gravity: self
                        .opt(&k("gravity"), &p.gravity, Some(Unit::MPerS2))
                        .unwrap_or(aerobs_core::GRAVITY),
                };
                self.model(key, fw.validate());
                (PlatformVariant::FixedWing(fw), PayloadRule::FullPayloadBs)
            }
            "hap" => {
                for (f, present) in [
                    ("rotor_radius", p.rotor_radius.is_some()),
                    ("wingspan", p.wingspan.is_some()),
                ] {
                    self.forbid(key, f, present, "hap");
                }
                let hap = HapParams {
                    wing_area: self.req(&k("wing_area"), &p.wing_area, Some(Unit::M2)),
                    drag_coeff: self.req(&k("drag_coeff"), &p.drag_coeff, None),
                    propeller_efficiency: self.req(&k("propeller_efficiency"), &p.propeller_efficiency, None),
                    air_density: self.req(&k("air_density"), &p.air_density, Some(Unit::KgPerM3)),
                    speed: self.req(&k("speed"), &p.speed, Some(Unit::MPerS)),
                    avionics_mass: self.req(&k("avionics_mass"), &p.avionics_mass, Some(Unit::Kg)),
                    avionics_power_ratio: self.req(
                        &k("avionics_power_ratio"),
                        &p.avionics_power_ratio,
                        Some(Unit::WPerKg),
                    ),
                };
                self.model(key, hap.validate());
                (PlatformVariant::Hap(hap), PayloadRule::BsOnly)
            }
            "" => {
                self.error(format!("`{}` is required", k("kind")));
                return None;
            }
            other => {
                self.error(format!(
                    "`{}`: unknown platform kind `{other}` (expected rotary_wing, fixed_wing or hap)",
                    k("kind")
                ));
                return None;
            }
        };

        let rule = match p.payload_rule.as_deref() {
            None => default_rule,
            Some("bs_battery_panels") => PayloadRule::BsBatteryPanels,
            Some("full_payload_bs") => PayloadRule::FullPayloadBs,
            Some("bs_and_panels") => PayloadRule::BsAndPanels,
            Some("bs_only") => PayloadRule::BsOnly,
            Some(other) => {
                self.error(format!("`{}`: unknown payload rule `{other}`", k("payload_rule")));
                default_rule
            }
        };

        Some(PlatformEntry {
            name: name.to_string(),
            spec: PlatformSpec::new(variant, MassBudget::new(structural, max_payload, rule)),
            compatible,
            panel_area,
            provenance: p.provenance.clone(),
        })
    }

    fn profile(&mut self, key: &str, p: &RawProfile) -> Option<BsProfile> {
        let k = |f: &str| format!("{key}.{f}");
        let class = match p.class.as_deref() {
            Some(c) => match c.parse::<BsClass>() {
                Ok(c) => Some(c),
                Err(e) => {
                    self.error(format!("`{}`: {e}", k("class")));
                    None
                }
            },
            None => {
                self.error(format!("`{}` is required", k("class")));
                None
            }
        };
        let profile = BsProfile {
            class: class.unwrap_or(BsClass::Pico),
            mass: self.req(&k("mass"), &p.mass, Some(Unit::Kg)),
            p_bb: self.req(&k("p_bb"), &p.p_bb, Some(Unit::W)),
            p_rf: self.req(&k("p_rf"), &p.p_rf, Some(Unit::W)),
            p_pa: self.req(&k("p_pa"), &p.p_pa, Some(Unit::W)),
            p_oh: self.req(&k("p_oh"), &p.p_oh, Some(Unit::W)),
            tx_power: self.opt(&k("tx_power"), &p.tx_power, Some(Unit::W)),
            rx_sensitivity: self.opt(&k("rx_sensitivity"), &p.rx_sensitivity, Some(Unit::Dbm)),
        };
        self.model(key, profile.validate());
        class.map(|_| profile)
    }

    fn environment(&mut self, key: &str, e: &RawEnvironment) -> ChannelEnvironment {
        let k = |f: &str| format!("{key}.{f}");
        let env = ChannelEnvironment {
            frequency: self.req(&k("frequency"), &e.frequency, Some(Unit::MHz)),
            mean_los: self.req(&k("mean_los"), &e.mean_los, Some(Unit::Db)),
            mean_nlos: self.req(&k("mean_nlos"), &e.mean_nlos, Some(Unit::Db)),
            sigma_scale_los: self.req(&k("sigma_scale_los"), &e.sigma_scale_los, None),
            sigma_scale_nlos: self.req(&k("sigma_scale_nlos"), &e.sigma_scale_nlos, None),
            sigma_decay_los: self.req(&k("sigma_decay_los"), &e.sigma_decay_los, Some(Unit::PerDeg)),
            sigma_decay_nlos: self.req(&k("sigma_decay_nlos"), &e.sigma_decay_nlos, Some(Unit::PerDeg)),
            los_coeff: self.req(&k("los_coeff"), &e.los_coeff, None),
            los_exp: self.req(&k("los_exp"), &e.los_exp, None),
            theta0: self.req(&k("theta0"), &e.theta0, Some(Unit::Deg)),
        };
        self.model(key, env.validate());
        env
    }

    /// Look up a named ledger entry or resolve an inline one. Returns the
    /// display name and the notes of the ledger entry used.
    fn reference<R, T: Clone>(
        &mut self,
        key: &str,
        reference: &Ref<R>,
        table: &BTreeMap<String, T>,
        section: &str,
        ledger: &Ledger,
        inline: impl FnOnce(&mut Self, &R) -> Option<T>,
    ) -> Option<(String, T)> {
        match reference {
            Ref::Name(name) => match table.get(name) {
                Some(v) => {
                    self.notes
                        .extend(ledger.notes_for(&format!("{section}.{name}")).iter().cloned());
                    Some((name.clone(), v.clone()))
                }
                None => {
                    let known: Vec<_> = table.keys().map(String::as_str).collect();
                    self.error(format!(
                        "`{key}`: no {section} entry named `{name}` (known: {})",
                        known.join(", ")
                    ));
                    None
                }
            },
            Ref::Inline(raw) => {
                let before = self.notes.len();
                let value = inline(self, raw);
                // inline values are the user's own; only ledger notes are echoed
                self.notes.truncate(before);
                value.map(|v| (format!("{key} (inline)"), v))
            }
        }
    }

    fn list(
        &mut self,
        key: &str,
        single: &Option<Quantity>,
        many: &Option<Vec<Quantity>>,
        unit: Unit,
    ) -> Option<Vec<f64>> {
        match (single, many) {
            (Some(_), Some(_)) => {
                self.error(format!("`{key}`: give either a single value or a list, not both"));
                None
            }
            (Some(q), None) => Some(vec![self.req(key, &Some(q.clone()), Some(unit))]),
            (None, Some(qs)) if qs.is_empty() => {
                self.error(format!("`{key}s` must not be empty"));
                None
            }
            (None, Some(qs)) => Some(
                qs.iter()
                    .enumerate()
                    .map(|(i, q)| self.req(&format!("{key}s[{i}]"), &Some(q.clone()), Some(unit)))
                    .collect(),
            ),
            (None, None) => None,
        }
    }

    fn scenario(mut self, raw: &RawScenario, ledger: &Ledger, origin: &str) -> Result<ScenarioConfig, ConfigError> {
        let id = raw.id.clone().unwrap_or_else(|| {
            Path::new(origin)
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "scenario".to_string())
        });

        let platform = match &raw.platform {
            Some(r) => self.reference("platform", r, &ledger.platforms, "platforms", ledger, |s, p| {
                s.platform("platform", "inline", p)
            }),
            None => {
                self.error("`platform` is required".to_string());
                None
            }
        };
        let profile = match &raw.bs {
            Some(r) => self.reference("bs", r, &ledger.profiles, "profiles", ledger, |s, p| s.profile("bs", p)),
            None => {
                self.error("`bs` is required".to_string());
                None
            }
        };

        let mode = match raw.mode.as_deref() {
            None | Some("full") => DeploymentMode::FullBs,
            Some("split") => DeploymentMode::Split,
            Some(other) => {
                self.error(format!("`mode`: unknown deployment mode `{other}` (expected full or split)"));
                DeploymentMode::FullBs
            }
        };

        let backhaul_fraction = self.opt("backhaul_fraction", &raw.backhaul_fraction, None).unwrap_or(0.0);
        if !(0.0..=aerobs_core::payload::MAX_BACKHAUL_FRACTION).contains(&backhaul_fraction) {
            self.error(format!("`backhaul_fraction` must lie in [0, 0.1], got {backhaul_fraction}"));
        }
        let low_margin_below = self
            .opt("low_margin_below", &raw.low_margin_below, None)
            .unwrap_or(DEFAULT_LOW_MARGIN_BELOW);
        if low_margin_below.is_nan() || low_margin_below < 1.0 {
            self.error(format!("`low_margin_below` must be at least 1, got {low_margin_below}"));
        }

        let battery = raw.battery.as_ref().and_then(|b| {
            let masses = self.list("battery.mass", &b.mass, &b.masses, Unit::Kg);
            let densities = self.list("battery.energy_density", &b.energy_density, &b.energy_densities, Unit::WhPerKg);
            if masses.is_none() {
                self.error("`battery.mass` or `battery.masses` is required".to_string());
            }
            if densities.is_none() {
                self.error("`battery.energy_density` or `battery.energy_densities` is required".to_string());
            }
            let (masses, densities) = (masses?, densities?);
            let single = masses.len() == 1;
            for (i, &m) in masses.iter().enumerate() {
                let key = if single { "battery.mass".to_string() } else { format!("battery.masses[{i}]") };
                self.non_negative(&key, m);
            }
            for (i, &d) in densities.iter().enumerate() {
                let key = if densities.len() == 1 {
                    "battery.energy_density".to_string()
                } else {
                    format!("battery.energy_densities[{i}]")
                };
                self.positive(&key, d);
            }
            Some(BatterySweep {
                masses,
                energy_densities: densities,
            })
        });

        let solar = raw.solar.as_ref().and_then(|s| {
            let panel = match &s.panel {
                Some(r) => self.reference("solar.panel", r, &ledger.panels, "panels", ledger, |s, p| {
                    Some(s.panel("solar.panel", p))
                }),
                None => match ledger.panels.get("gaas") {
                    Some(p) => Some(("gaas".to_string(), *p)),
                    None => {
                        self.error("`solar.panel` is required (the ledger has no `gaas` panel)".to_string());
                        None
                    }
                },
            };
            let areas = self.list("solar.area", &s.area, &s.areas, Unit::M2);
            if let Some(areas) = &areas {
                let single = areas.len() == 1;
                for (i, &a) in areas.iter().enumerate() {
                    let key = if single { "solar.area".to_string() } else { format!("solar.areas[{i}]") };
                    self.non_negative(&key, a);
                }
            }
            let region_refs: Vec<(String, &Ref<RawRegion>)> = match (&s.region, &s.regions) {
                (Some(_), Some(_)) => {
                    self.error("`solar.region`: give either `region` or `regions`, not both".to_string());
                    Vec::new()
                }
                (Some(r), None) => vec![("solar.region".to_string(), r)],
                (None, Some(rs)) => rs
                    .iter()
                    .enumerate()
                    .map(|(i, r)| (format!("solar.regions[{i}]"), r))
                    .collect(),
                (None, None) => {
                    self.error("`solar.region` or `solar.regions` is required".to_string());
                    Vec::new()
                }
            };
            let mut regions = Vec::new();
            for (key, r) in region_refs {
                if let Some((_, region)) =
                    self.reference(&key, r, &ledger.regions, "regions", ledger, |s, raw| {
                        let name = raw.name.clone().unwrap_or_else(|| "custom".to_string());
                        Some(s.region(&key, &name, raw))
                    })
                {
                    regions.push(region);
                }
            }
            let (panel_name, panel) = panel?;
            let areas = areas.unwrap_or_else(|| {
                vec![platform.as_ref().map(|(_, p)| p.default_panel_area()).unwrap_or(0.0)]
            });
            Some(SolarSetup {
                panel_name,
                panel,
                areas,
                regions,
            })
        });

        let coverage = raw.coverage.as_ref().and_then(|c| {
            let env = match &c.environment {
                Some(r) => self.reference(
                    "coverage.environment",
                    r,
                    &ledger.environments,
                    "environments",
                    ledger,
                    |s, e| Some(s.environment("coverage.environment", e)),
                ),
                None => {
                    self.error("`coverage.environment` is required".to_string());
                    None
                }
            };
            let altitude = self.req("coverage.altitude", &c.altitude, Some(Unit::M));
            self.positive("coverage.altitude", altitude);
            let (environment_name, environment) = env?;
            Some(CoverageSetup {
                environment_name,
                environment,
                altitude,
            })
        });

        let mc = raw.monte_carlo.as_ref();
        let search = CoverageSearch {
            seed: mc.and_then(|m| m.seed).unwrap_or(DEFAULT_SEED),
            samples: mc
                .and_then(|m| m.samples)
                .map(|s| s as usize)
                .unwrap_or(DEFAULT_SAMPLES),
            radius_step: mc
                .and_then(|m| self.opt("monte_carlo.radius_step", &m.radius_step, Some(Unit::M)))
                .unwrap_or(DEFAULT_RADIUS_STEP),
            reliability: mc
                .and_then(|m| self.opt("monte_carlo.reliability", &m.reliability, None))
                .unwrap_or(DEFAULT_RELIABILITY),
        };
        if search.samples == 0 {
            self.error("`monte_carlo.samples` must be at least 1".to_string());
        }
        self.positive("monte_carlo.radius_step", search.radius_step);
        if !(search.reliability > 0.0 && search.reliability < 1.0) {
            self.error(format!(
                "`monte_carlo.reliability` must lie strictly between 0 and 1, got {}",
                search.reliability
            ));
        }

        let dimensioning = raw.dimensioning.as_ref().map(|d| {
            let area = self.req("dimensioning.service_area", &d.service_area, Some(Unit::Km2));
            let power = self.req("dimensioning.charging_power", &d.charging_power, Some(Unit::W));
            self.positive("dimensioning.service_area", area);
            self.positive("dimensioning.charging_power", power);
            DimensioningSetup {
                area: ServiceArea { area },
                station: ChargingStation { charging_power: power },
            }
        });

        if dimensioning.is_some() {
            if raw.coverage.is_none() {
                self.error("`dimensioning` needs a `coverage` section to size the fleet".to_string());
            }
            if raw.battery.is_none() {
                self.error("`dimensioning` needs a `battery` section for the backup-battery sweep".to_string());
            }
        }

        if let (Some((_, platform)), Some((name, profile))) = (&platform, &profile) {
            let verdict = check_feasibility(&platform.spec, profile, &platform.compatible);
            if verdict.verdict == Verdict::Infeasible {
                self.error(format!("`bs`: `{name}` on `{}`: {}", platform.name, verdict.reason));
            } else if battery.is_some() && platform.kind() != PlatformKind::RotaryWing {
                self.error("`battery` applies only to rotary-wing platforms".to_string());
            }
            if coverage.is_some() && profile.tx_power.is_none() {
                self.error(format!("`bs`: `{name}` has no tx_power, needed for coverage"));
            }
            if coverage.is_some() && profile.rx_sensitivity.is_none() {
                self.error(format!("`bs`: `{name}` has no rx_sensitivity, needed for coverage"));
            }
        }

        let defaults = self.take_notes();
        if !self.errors.is_empty() {
            return Err(ConfigError::Validation {
                origin: origin.to_string(),
                errors: self.errors,
            });
        }
        let (_, platform) = platform.expect("validated");
        let (profile_name, profile) = profile.expect("validated");
        Ok(ScenarioConfig {
            id,
            description: raw.description.clone(),
            platform,
            profile_name,
            profile,
            mode,
            backhaul_fraction,
            low_margin_below,
            battery,
            solar,
            coverage,
            search,
            dimensioning,
            defaults,
            ledger_version: ledger.version,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ledger() -> Ledger {
        Ledger::builtin().unwrap()
    }

    #[test]
    fn builtin_ledger_is_valid() {
        let l = ledger();
        assert_eq!(l.platforms.len(), 7);
        assert_eq!(l.profiles["micro"].mass, 12.0);
        assert!(l.all_notes().count() >= 10);
        let hap30: Vec<_> = l.notes_for("platforms.hap-30m").iter().map(|n| n.key.as_str()).collect();
        assert!(hap30.contains(&"platforms.hap-30m.wing_area"));
        assert!(hap30.contains(&"platforms.hap-30m.panel_area"));
    }

    #[test]
    fn fixed_wing_panel_defaults_to_wing_area() {
        let l = ledger();
        assert_eq!(l.platforms["fwd-10m"].default_panel_area(), 100.0 / 9.5);
        assert_eq!(l.platforms["hap-60m"].default_panel_area(), 367.1);
        assert_eq!(l.platforms["rwd"].default_panel_area(), 0.0);
    }

    #[test]
    fn minimal_scenario_applies_defaults() {
        let c = parse_scenario("platform = \"rwd\"\nbs = \"pico\"\n", "mini.scenario", &ledger()).unwrap();
        assert_eq!(c.id, "mini");
        assert_eq!(c.search.seed, DEFAULT_SEED);
        assert_eq!(c.search.samples, DEFAULT_SAMPLES);
        assert_eq!(c.mode, DeploymentMode::FullBs);
        assert_eq!(c.backhaul_fraction, 0.0);
        assert!(c.defaults.iter().any(|n| n.key == "profiles.pico.p_bb"));
    }

    #[test]
    fn every_violation_is_listed() {
        let src = r#"
            platform = "rwd"
            bs = "pico"
            mode = "sideways"
            [battery]
            mass = "-1 kg"
            energy_density = "350 Wh_per_kg"
            [dimensioning]
            service_area = "1 m2"
            charging_power = "300 W"
        "#;
        let err = parse_scenario(src, "bad", &ledger()).unwrap_err();
        let errors = err.errors();
        assert!(errors.iter().any(|e| e.contains("`battery.mass`")), "{errors:?}");
        assert!(errors.iter().any(|e| e.contains("`mode`")));
        assert!(errors.iter().any(|e| e.contains("`dimensioning.service_area`") && e.contains("km2")));
        assert!(errors.iter().any(|e| e.contains("coverage")));
        assert!(errors.len() >= 4);
    }

    #[test]
    fn unit_mismatch_fails_instead_of_converting() {
        let src = "platform = \"rwd\"\nbs = \"pico\"\n[battery]\nmass = \"5000 g\"\nenergy_density = \"350 Wh_per_kg\"\n";
        let err = parse_scenario(src, "units", &ledger()).unwrap_err();
        assert!(err.errors()[0].contains("`g`"));
    }

    #[test]
    fn parse_errors_carry_location() {
        let err = parse_scenario("platform = \"rwd\"\nbs = \n", "broken", &ledger()).unwrap_err();
        match err {
            ConfigError::Parse { message, .. } => assert!(message.contains("line 2"), "{message}"),
            other => panic!("unexpected {other:?}"),
        }
        let err = parse_scenario("platform = \"rwd\"\nbs = \"pico\"\ncolour = 3\n", "typo", &ledger()).unwrap_err();
        assert!(err.to_string().contains("colour"));
    }

    #[test]
    fn unknown_names_and_infeasible_payloads() {
        let err = parse_scenario("platform = \"blimp\"\nbs = \"pico\"\n", "x", &ledger()).unwrap_err();
        assert!(err.errors()[0].contains("blimp"));
        let err = parse_scenario("platform = \"hap-25m\"\nbs = \"macro\"\n", "x", &ledger()).unwrap_err();
        assert!(err.errors()[0].contains("exceeds"));
    }

    #[test]
    fn inline_region_and_platform() {
        let src = r#"
            bs = "micro-compact"
            [platform]
            kind = "fixed_wing"
            structural_mass = "40 kg"
            max_payload = "12 kg"
            wingspan = "6 m"
            aspect_ratio = 9.5
            zero_lift_drag_coeff = 0.0447
            oswald_efficiency = 0.7548
            air_density = "1.112 kg_per_m3"
            speed = "20 m_per_s"
            turn_radius = "inf m"
            [solar]
            regions = ["york", { name = "lagos", daily_irradiance = "5.5 kWh_per_m2_day" }]
        "#;
        let c = parse_scenario(src, "inline", &ledger()).unwrap();
        let solar = c.solar.unwrap();
        assert_eq!(solar.regions[1].name, "lagos");
        assert_eq!(solar.regions[1].daily_irradiance, 5.5);
        assert_eq!(solar.areas, vec![36.0 / 9.5]);
        assert_eq!(c.platform.spec.mass_budget.rule, PayloadRule::FullPayloadBs);
    }
}
