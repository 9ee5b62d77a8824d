//! Service time and the harvested-to-consumed energy ratio ψ.
//!
//! A platform whose daily harvest covers its daily consumption (ψ ≥ 1) can in
//! principle stay aloft indefinitely. Below that, fixed-wing platforms fly for
//! 24ψ hours on harvest alone, while rotary-wing drones drain a battery whose
//! load is reduced by whatever the panel supplies.

use crate::error::{non_negative, positive, ModelError, Result};
use crate::payload::{bs_comm_power, BsProfile, DeploymentMode};
use crate::platform::{mechanical_power, PlatformSpec, PlatformVariant};
use crate::solar::{average_harvested_power, daily_energy, panel_mass, Region, SolarPanel, HOURS_PER_DAY};

/// ψ below this (but ≥ 1) is reported as indefinite with a low margin.
pub const DEFAULT_LOW_MARGIN_BELOW: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatterySpec {
    /// kg
    pub mass: f64,
    /// Wh·kg⁻¹
    pub energy_density: f64,
}

impl BatterySpec {
    pub fn new(mass: f64, energy_density: f64) -> Self {
        Self { mass, energy_density }
    }

    pub fn validate(&self) -> Result<()> {
        non_negative("battery.mass", self.mass)?;
        positive("battery.energy_density", self.energy_density)?;
        Ok(())
    }

    /// Stored energy, Wh.
    pub fn capacity(&self) -> f64 {
        self.mass * self.energy_density
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ServiceTime {
    Hours(f64),
    /// Harvest meets or exceeds consumption.
    Indefinite { low_margin: bool },
}

impl ServiceTime {
    pub fn hours(&self) -> Option<f64> {
        match self {
            ServiceTime::Hours(h) => Some(*h),
            ServiceTime::Indefinite { .. } => None,
        }
    }

    pub fn is_indefinite(&self) -> bool {
        matches!(self, ServiceTime::Indefinite { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnduranceResult {
    /// W
    pub total_power: f64,
    /// W, 24-hour average
    pub harvested_power: f64,
    pub ratio: f64,
    pub service_time: ServiceTime,
    pub robustness_margin: f64,
}

/// Mechanical power at the full loaded mass plus communication power.
pub fn total_power(spec: &PlatformSpec, profile: &BsProfile, mode: DeploymentMode) -> Result<f64> {
    if profile.mass > spec.mass_budget.max_payload {
        return Err(ModelError::Infeasible {
            bs_mass: profile.mass,
            max_payload: spec.mass_budget.max_payload,
            budget: "maximum payload",
        });
    }
    let mechanical = mechanical_power(&spec.with_bs_mass(profile.mass))?;
    Ok(mechanical + bs_comm_power(profile, mode)?)
}

/// ψ: daily harvested energy over daily consumed energy.
pub fn harvest_ratio(
    spec: &PlatformSpec,
    profile: &BsProfile,
    mode: DeploymentMode,
    panel: &SolarPanel,
    region: &Region,
) -> Result<f64> {
    let p = positive("total_power", total_power(spec, profile, mode)?)?;
    Ok(daily_energy(panel, region)? / (HOURS_PER_DAY * p))
}

/// Service time of a solar-only platform from its ψ: 24ψ hours below 1,
/// indefinite at or above 1.
pub fn classify_endurance(ratio: f64, total_power: f64, low_margin_below: f64) -> Result<EnduranceResult> {
    non_negative("ratio", ratio)?;
    positive("total_power", total_power)?;
    Ok(EnduranceResult {
        total_power,
        harvested_power: ratio * total_power,
        ratio,
        service_time: if ratio >= 1.0 {
            ServiceTime::Indefinite {
                low_margin: ratio < low_margin_below,
            }
        } else {
            ServiceTime::Hours(HOURS_PER_DAY * ratio)
        },
        robustness_margin: ratio - 1.0,
    })
}

/// Battery-limited hover time of a rotary-wing drone.
///
/// The battery and panel masses are loaded into `spec`'s mass budget before
/// the hover power is evaluated, so a heavier battery both stores more energy
/// and draws more power.
pub fn rwd_service_time(
    spec: &PlatformSpec,
    profile: &BsProfile,
    battery: &BatterySpec,
    panel: &SolarPanel,
    region: &Region,
) -> Result<EnduranceResult> {
    battery.validate()?;
    let mut loaded = *spec;
    loaded.mass_budget = loaded
        .mass_budget
        .with_battery_mass(battery.mass)
        .with_solar_panel_mass(panel_mass(panel)?);
    let p_total = total_power(&loaded, profile, DeploymentMode::FullBs)?;
    if p_total <= 0.0 {
        return Err(ModelError::Domain {
            param: "total_power",
            value: p_total,
            reason: "must be strictly positive",
        });
    }
    let p_sol = average_harvested_power(panel, region)?;
    let ratio = p_sol / p_total;
    let service_time = if p_sol >= p_total {
        ServiceTime::Indefinite {
            low_margin: ratio < DEFAULT_LOW_MARGIN_BELOW,
        }
    } else {
        ServiceTime::Hours(battery.capacity() / (p_total - p_sol))
    };
    Ok(EnduranceResult {
        total_power: p_total,
        harvested_power: p_sol,
        ratio,
        service_time,
        robustness_margin: ratio - 1.0,
    })
}

/// Endurance of any platform: battery-limited for rotary wing, harvest-ratio
/// based otherwise.
pub fn endurance(
    spec: &PlatformSpec,
    profile: &BsProfile,
    mode: DeploymentMode,
    battery: Option<&BatterySpec>,
    panel: &SolarPanel,
    region: &Region,
    low_margin_below: f64,
) -> Result<EnduranceResult> {
    match spec.variant {
        PlatformVariant::RotaryWing(_) => {
            let battery = battery.ok_or(ModelError::Domain {
                param: "battery",
                value: f64::NAN,
                reason: "rotary-wing endurance needs a battery",
            })?;
            rwd_service_time(spec, profile, battery, panel, region)
        }
        _ => {
            let ratio = harvest_ratio(spec, profile, mode, panel, region)?;
            classify_endurance(ratio, total_power(spec, profile, mode)?, low_margin_below)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::payload::fixtures::*;
    use crate::platform::fixtures::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn no_panel() -> SolarPanel {
        SolarPanel::gaas(0.0)
    }

    #[test]
    fn total_power_examples() {
        let p = total_power(&rwd_spec(0.0, 5.0), &pico(), DeploymentMode::FullBs).unwrap();
        assert_relative_eq!(p, 2040.0, max_relative = 0.001);

        let micro_fwd = BsProfile { mass: 10.0, ..micro() };
        let p = total_power(&fwd_spec(10.0), &micro_fwd, DeploymentMode::FullBs).unwrap();
        assert_relative_eq!(p, 2390.0, max_relative = 0.01);

        let p = total_power(&hap_spec(340.27), &macro_bs(), DeploymentMode::FullBs).unwrap();
        assert_relative_eq!(p, 2680.0, max_relative = 0.01);
    }

    #[test]
    fn rwd_pico_five_kg() {
        let r = rwd_service_time(
            &rwd_spec(0.0, 0.0),
            &pico(),
            &BatterySpec::new(5.0, 350.0),
            &no_panel(),
            &Region::enugu(),
        )
        .unwrap();
        assert_relative_eq!(r.service_time.hours().unwrap(), 1750.0 / 2040.0, max_relative = 0.001);
    }

    #[test]
    fn one_square_metre_gains_a_few_minutes() {
        let spec = rwd_spec(0.0, 0.0);
        let battery = BatterySpec::new(9.0, 350.0);
        let bare = rwd_service_time(&spec, &pico(), &battery, &no_panel(), &Region::enugu()).unwrap();
        let solar = rwd_service_time(&spec, &pico(), &battery, &SolarPanel::gaas(1.0), &Region::enugu()).unwrap();
        let gain_min = (solar.service_time.hours().unwrap() - bare.service_time.hours().unwrap()) * 60.0;
        assert!((3.0..=5.0).contains(&gain_min), "gain {gain_min} min");
    }

    #[test]
    fn doubling_energy_density_doubles_time() {
        let spec = rwd_spec(0.0, 0.0);
        let a = rwd_service_time(&spec, &micro(), &BatterySpec::new(7.0, 180.0), &no_panel(), &Region::york()).unwrap();
        let b = rwd_service_time(&spec, &micro(), &BatterySpec::new(7.0, 360.0), &no_panel(), &Region::york()).unwrap();
        assert_eq!(b.service_time.hours().unwrap(), 2.0 * a.service_time.hours().unwrap());
    }

    #[test]
    fn fwd_ratio_and_hours() {
        let micro_fwd = BsProfile { mass: 10.0, ..micro() };
        let spec = fwd_spec(10.0);
        let panel = SolarPanel::gaas(100.0 / 9.5);
        let psi = harvest_ratio(&spec, &micro_fwd, DeploymentMode::FullBs, &panel, &Region::enugu()).unwrap();
        assert!((psi - 0.686).abs() < 0.03);
        let r = classify_endurance(psi, 2392.77, DEFAULT_LOW_MARGIN_BELOW).unwrap();
        assert_relative_eq!(r.service_time.hours().unwrap(), 16.47, max_relative = 0.04);
    }

    #[test]
    fn hap_ratio_well_above_one() {
        let panel = SolarPanel::gaas(367.1);
        let psi = harvest_ratio(&hap_spec(340.27), &macro_bs(), DeploymentMode::FullBs, &panel, &Region::enugu()).unwrap();
        assert!((psi / 21.0 - 1.0).abs() < 0.05);
    }

    #[test]
    fn classification_boundaries() {
        let at_one = classify_endurance(1.0, 100.0, 1.5).unwrap();
        assert_eq!(at_one.service_time, ServiceTime::Indefinite { low_margin: true });
        let half = classify_endurance(0.5, 100.0, 1.5).unwrap();
        assert_eq!(half.service_time, ServiceTime::Hours(12.0));
        let thin = classify_endurance(1.15, 1780.0, 1.5).unwrap();
        assert_eq!(thin.service_time, ServiceTime::Indefinite { low_margin: true });
        assert_relative_eq!(thin.robustness_margin, 0.15, max_relative = 1e-12);
        let robust = classify_endurance(21.0, 2680.0, 1.5).unwrap();
        assert_eq!(robust.service_time, ServiceTime::Indefinite { low_margin: false });
    }

    #[test]
    fn pico_outlasts_micro() {
        let spec = rwd_spec(0.0, 0.0);
        for mb in 5..=9 {
            for ed in [50.0, 180.0, 350.0] {
                for area in [0.0, 0.5, 1.0] {
                    let b = BatterySpec::new(mb as f64, ed);
                    let panel = SolarPanel::gaas(area);
                    let p = rwd_service_time(&spec, &pico(), &b, &panel, &Region::enugu()).unwrap();
                    let m = rwd_service_time(&spec, &micro(), &b, &panel, &Region::enugu()).unwrap();
                    assert!(p.service_time.hours() > m.service_time.hours());
                }
            }
        }
    }

    #[test]
    fn rwd_without_battery_is_an_error() {
        let e = endurance(&rwd_spec(0.0, 0.0), &pico(), DeploymentMode::FullBs, None, &no_panel(), &Region::enugu(), 1.5);
        assert!(e.is_err());
    }

    proptest! {
        #[test]
        fn service_time_grows_with_energy_density_and_panel(
            mb in 1.0f64..9.0, ed in 20.0f64..400.0, area in 0.0f64..2.0, d in 0.01f64..1.0,
        ) {
            let spec = rwd_spec(0.0, 0.0);
            let base = rwd_service_time(&spec, &pico(), &BatterySpec::new(mb, ed), &SolarPanel::gaas(area), &Region::enugu()).unwrap();
            let more_ed = rwd_service_time(&spec, &pico(), &BatterySpec::new(mb, ed * (1.0 + d)), &SolarPanel::gaas(area), &Region::enugu()).unwrap();
            let more_area = rwd_service_time(&spec, &pico(), &BatterySpec::new(mb, ed), &SolarPanel::gaas(area + d), &Region::enugu()).unwrap();
            prop_assert!(more_ed.service_time.hours() > base.service_time.hours());
            prop_assert!(more_area.service_time.hours() > base.service_time.hours());
        }

        #[test]
        fn indefinite_exactly_at_or_above_one(psi in 0.0f64..3.0) {
            let r = classify_endurance(psi, 1000.0, 1.5).unwrap();
            prop_assert_eq!(r.service_time.is_indefinite(), psi >= 1.0);
            if psi < 1.0 {
                prop_assert_eq!(r.service_time.hours().unwrap(), 24.0 * psi);
            }
        }
    }
}
