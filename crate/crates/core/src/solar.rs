//! Daily solar harvest from a photovoltaic panel.

use crate::error::{fraction, non_negative, Result};

/// Hours over which the daily harvest is averaged.
pub const HOURS_PER_DAY: f64 = 24.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolarPanel {
    /// m²
    pub area: f64,
    pub efficiency: f64,
    /// kg·m⁻²
    pub areal_density: f64,
}

impl SolarPanel {
    /// Thin-film GaAs cells: 37.75 % efficiency, 114 g·m⁻².
    pub fn gaas(area: f64) -> Self {
        Self {
            area,
            efficiency: 0.3775,
            areal_density: 0.114,
        }
    }

    pub fn validate(&self) -> Result<()> {
        non_negative("panel.area", self.area)?;
        fraction("panel.efficiency", self.efficiency)?;
        non_negative("panel.areal_density", self.areal_density)?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub name: String,
    /// Daily irradiance, kWh·m⁻²·day⁻¹.
    pub daily_irradiance: f64,
}

impl Region {
    pub fn new(name: impl Into<String>, daily_irradiance: f64) -> Self {
        Self {
            name: name.into(),
            daily_irradiance,
        }
    }

    pub fn enugu() -> Self {
        Self::new("enugu", 10.0)
    }

    pub fn york() -> Self {
        Self::new("york", 1.5)
    }

    pub fn validate(&self) -> Result<()> {
        non_negative("region.daily_irradiance", self.daily_irradiance).map(|_| ())
    }
}

/// Energy harvested over one day, in Wh.
pub fn daily_energy(panel: &SolarPanel, region: &Region) -> Result<f64> {
    panel.validate()?;
    region.validate()?;
    Ok(panel.area * region.daily_irradiance * 1000.0 * panel.efficiency)
}

/// Daily harvest spread evenly over 24 h, in W.
pub fn average_harvested_power(panel: &SolarPanel, region: &Region) -> Result<f64> {
    Ok(daily_energy(panel, region)? / HOURS_PER_DAY)
}

pub fn panel_mass(panel: &SolarPanel) -> Result<f64> {
    panel.validate()?;
    Ok(panel.area * panel.areal_density)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn daily_energy_examples() {
        let wing = 10.0 * 10.0 / 9.5;
        let e = daily_energy(&SolarPanel::gaas(wing), &Region::enugu()).unwrap();
        assert_relative_eq!(e, 39_736.842_105_263_16, max_relative = 1e-12);
        assert_eq!(daily_energy(&SolarPanel::gaas(0.0), &Region::enugu()).unwrap(), 0.0);
        let york = daily_energy(&SolarPanel::gaas(1.0), &Region::york()).unwrap();
        assert_relative_eq!(york, 566.25, max_relative = 1e-12);
    }

    #[test]
    fn average_power_examples() {
        let p = average_harvested_power(&SolarPanel::gaas(1.0), &Region::enugu()).unwrap();
        assert_relative_eq!(p, 3775.0 / 24.0, max_relative = 1e-12);
        assert!((p - 157.3).abs() < 0.05);
        let half = average_harvested_power(&SolarPanel::gaas(0.5), &Region::enugu()).unwrap();
        assert_relative_eq!(half, p / 2.0, max_relative = 1e-15);
        assert_eq!(average_harvested_power(&SolarPanel::gaas(0.0), &Region::york()).unwrap(), 0.0);
    }

    #[test]
    fn masses() {
        assert_relative_eq!(panel_mass(&SolarPanel::gaas(1.0)).unwrap(), 0.114);
        assert_eq!(panel_mass(&SolarPanel::gaas(0.0)).unwrap(), 0.0);
        assert_relative_eq!(panel_mass(&SolarPanel::gaas(0.5)).unwrap(), 0.057);
    }

    #[test]
    fn rejects_bad_panels() {
        let mut p = SolarPanel::gaas(1.0);
        p.efficiency = 1.2;
        assert!(daily_energy(&p, &Region::enugu()).is_err());
        assert!(daily_energy(&SolarPanel::gaas(-1.0), &Region::enugu()).is_err());
        assert!(daily_energy(&SolarPanel::gaas(1.0), &Region::new("x", -2.0)).is_err());
    }

    proptest! {
        #[test]
        fn linear_in_each_factor(a in 0.0f64..500.0, g in 0.0f64..12.0, eta in 0.0f64..0.5) {
            let panel = SolarPanel { area: a, efficiency: eta, areal_density: 0.114 };
            let base = daily_energy(&panel, &Region::new("r", g)).unwrap();
            let doubled_area = daily_energy(&SolarPanel { area: 2.0 * a, ..panel }, &Region::new("r", g)).unwrap();
            let doubled_g = daily_energy(&panel, &Region::new("r", 2.0 * g)).unwrap();
            let doubled_eta = daily_energy(&SolarPanel { efficiency: 2.0 * eta, ..panel }, &Region::new("r", g));
            prop_assert_eq!(doubled_area, 2.0 * base);
            prop_assert_eq!(doubled_g, 2.0 * base);
            if 2.0 * eta <= 1.0 {
                prop_assert_eq!(doubled_eta.unwrap(), 2.0 * base);
            }
            let avg = average_harvested_power(&panel, &Region::new("r", g)).unwrap();
            prop_assert!((avg * 24.0 - base).abs() <= 1e-12 * base.max(1.0));
        }
    }
}
