//! Fleet size and backup-battery counts for continuous coverage of an area
//! with hot-swapped batteries.

use std::f64::consts::PI;

use crate::coverage::{coverage_radius, ChannelEnvironment, CoverageResult, CoverageSearch};
use crate::endurance::{total_power, BatterySpec};
use crate::error::{positive, ModelError, Result};
use crate::payload::{BsProfile, DeploymentMode};
use crate::platform::PlatformSpec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ServiceArea {
    /// km²
    pub area: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChargingStation {
    /// W delivered to each charging battery.
    pub charging_power: f64,
}

/// Ceiling that ignores floating-point noise just above an integer.
fn robust_ceil(x: f64) -> u64 {
    let nearest = x.round();
    if (x - nearest).abs() <= 1e-9 * nearest.abs().max(1.0) {
        nearest as u64
    } else {
        x.ceil() as u64
    }
}

/// Number of circular cells of radius `coverage_radius` (m) needed to tile
/// the service area.
pub fn num_abs(area: &ServiceArea, coverage_radius: f64) -> Result<u64> {
    positive("service_area", area.area)?;
    positive("coverage_radius", coverage_radius)?;
    let area_m2 = area.area * 1.0e6;
    Ok(robust_ceil(area_m2 / (PI * coverage_radius * coverage_radius)))
}

/// Spare batteries per platform so that one is always charged when the
/// flying one runs out.
///
/// Charging time is capacity / P_c and service time is capacity / P_T, so
/// the capacity cancels and the count depends only on P_T / P_c.
pub fn num_backup_batteries(total_power: f64, station: &ChargingStation) -> Result<u64> {
    positive("total_power", total_power)?;
    positive("charging_power", station.charging_power)?;
    Ok(robust_ceil(total_power / station.charging_power))
}

/// One battery-mass point of the dimensioning sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub battery_mass: f64,
    pub total_power: f64,
    pub backup_batteries: u64,
    pub total_batteries: u64,
    /// kg
    pub total_battery_mass: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DimensioningReport {
    pub coverage: CoverageResult,
    pub coverage_radius: f64,
    pub n_abs: u64,
    pub points: Vec<SweepPoint>,
}

impl DimensioningReport {
    fn range<T: PartialOrd + Copy>(&self, f: impl Fn(&SweepPoint) -> T) -> (T, T) {
        let mut it = self.points.iter().map(f);
        let first = it.next().expect("report has at least one sweep point");
        it.fold((first, first), |(lo, hi), v| {
            (if v < lo { v } else { lo }, if v > hi { v } else { hi })
        })
    }

    pub fn backup_batteries_range(&self) -> (u64, u64) {
        self.range(|p| p.backup_batteries)
    }

    pub fn total_batteries_range(&self) -> (u64, u64) {
        self.range(|p| p.total_batteries)
    }

    pub fn total_battery_mass_range(&self) -> (f64, f64) {
        self.range(|p| p.total_battery_mass)
    }
}

/// Everything needed to dimension one platform/base-station pairing.
#[derive(Debug, Clone)]
pub struct DimensioningScenario<'a> {
    pub platform: &'a PlatformSpec,
    pub profile: &'a BsProfile,
    pub mode: DeploymentMode,
    pub batteries: &'a [BatterySpec],
    pub area: ServiceArea,
    pub station: ChargingStation,
    pub altitude: f64,
    pub environment: &'a ChannelEnvironment,
    pub search: CoverageSearch,
}

pub fn dimension(s: &DimensioningScenario<'_>) -> Result<DimensioningReport> {
    if s.batteries.is_empty() {
        return Err(ModelError::Domain {
            param: "battery_sweep",
            value: 0.0,
            reason: "needs at least one battery mass",
        });
    }
    let tx = s.profile.tx_power_dbm()?;
    let sensitivity = s
        .profile
        .rx_sensitivity
        .ok_or(ModelError::MissingRadio("rx_sensitivity"))?;
    let coverage = coverage_radius(tx, sensitivity, s.altitude, s.environment, &s.search)?;
    if !coverage.has_coverage() || coverage.radius <= 0.0 {
        return Err(ModelError::Domain {
            param: "coverage_radius",
            value: coverage.radius,
            reason: "the base station covers no area at this altitude",
        });
    }
    let n_abs = num_abs(&s.area, coverage.radius)?;

    let points = s
        .batteries
        .iter()
        .map(|b| {
            b.validate()?;
            let mut spec = *s.platform;
            spec.mass_budget = spec.mass_budget.with_battery_mass(b.mass);
            let p = total_power(&spec, s.profile, s.mode)?;
            let backup = num_backup_batteries(p, &s.station)?;
            let total = n_abs * backup;
            Ok(SweepPoint {
                battery_mass: b.mass,
                total_power: p,
                backup_batteries: backup,
                total_batteries: total,
                total_battery_mass: total as f64 * b.mass,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(DimensioningReport {
        coverage_radius: coverage.radius,
        coverage,
        n_abs,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::payload::fixtures::*;
    use crate::platform::fixtures::*;
    use proptest::prelude::*;

    const KM2: ServiceArea = ServiceArea { area: 1.0 };
    const STATION: ChargingStation = ChargingStation { charging_power: 300.0 };

    #[test]
    fn abs_counts() {
        assert_eq!(num_abs(&KM2, 251.0).unwrap(), 6);
        assert_eq!(num_abs(&KM2, 351.0).unwrap(), 3);
        let r = 400.0;
        let exact = ServiceArea { area: PI * r * r / 1.0e6 };
        assert_eq!(num_abs(&exact, r).unwrap(), 1);
        assert!(num_abs(&KM2, 0.0).is_err());
    }

    #[test]
    fn backup_counts() {
        assert_eq!(num_backup_batteries(2040.0, &STATION).unwrap(), 7);
        assert_eq!(num_backup_batteries(4988.9, &STATION).unwrap(), 17);
        assert_eq!(num_backup_batteries(300.0, &STATION).unwrap(), 1);
        assert!(num_backup_batteries(0.0, &STATION).is_err());
    }

    #[test]
    fn pico_dimensioning() {
        let batteries: Vec<_> = (5..=9).map(|m| BatterySpec::new(m as f64, 350.0)).collect();
        let platform = rwd_spec(0.0, 0.0);
        let profile = pico();
        let env = ChannelEnvironment::urban_2000mhz();
        let s = DimensioningScenario {
            platform: &platform,
            profile: &profile,
            mode: DeploymentMode::FullBs,
            batteries: &batteries,
            area: KM2,
            station: STATION,
            altitude: 100.0,
            environment: &env,
            search: CoverageSearch { samples: 2000, ..Default::default() },
        };
        let r = dimension(&s).unwrap();
        assert_eq!(r.backup_batteries_range(), (7, 10));
        for p in &r.points {
            assert_eq!(p.total_batteries, r.n_abs * p.backup_batteries);
        }
    }

    #[test]
    fn missing_radio_parameters() {
        let batteries = [BatterySpec::new(5.0, 350.0)];
        let platform = hap_spec(340.0);
        let profile = macro_bs();
        let env = ChannelEnvironment::urban_2000mhz();
        let s = DimensioningScenario {
            platform: &platform,
            profile: &profile,
            mode: DeploymentMode::FullBs,
            batteries: &batteries,
            area: KM2,
            station: STATION,
            altitude: 100.0,
            environment: &env,
            search: CoverageSearch::default(),
        };
        assert_eq!(dimension(&s).unwrap_err(), ModelError::MissingRadio("tx_power"));
    }

    proptest! {
        #[test]
        fn fewer_backups_with_faster_charging(p in 1.0f64..10_000.0, pc in 10.0f64..1000.0, dpc in 0.0f64..500.0) {
            let slow = num_backup_batteries(p, &ChargingStation { charging_power: pc }).unwrap();
            let fast = num_backup_batteries(p, &ChargingStation { charging_power: pc + dpc }).unwrap();
            prop_assert!(fast <= slow);
        }

        #[test]
        fn fewer_abs_with_larger_radius(r in 10.0f64..2000.0, dr in 0.0f64..500.0, a in 0.01f64..50.0) {
            let area = ServiceArea { area: a };
            prop_assert!(num_abs(&area, r + dr).unwrap() <= num_abs(&area, r).unwrap());
        }
    }
}
