//! Base-station communication power, backhaul overhead and payload
//! feasibility.

use std::fmt;

use crate::error::{non_negative, positive, ModelError, Result};
use crate::platform::{mechanical_power, PlatformSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BsClass {
    Pico,
    Micro,
    Macro,
    /// Antenna and RF front end only; baseband stays on the ground.
    Split,
}

impl BsClass {
    pub fn name(self) -> &'static str {
        match self {
            BsClass::Pico => "pico",
            BsClass::Micro => "micro",
            BsClass::Macro => "macro",
            BsClass::Split => "split",
        }
    }
}

impl fmt::Display for BsClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for BsClass {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "pico" => Ok(BsClass::Pico),
            "micro" => Ok(BsClass::Micro),
            "macro" => Ok(BsClass::Macro),
            "split" => Ok(BsClass::Split),
            other => Err(format!("unknown base station class `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DeploymentMode {
    FullBs,
    /// Baseband processing offloaded to the ground.
    Split,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BsProfile {
    pub class: BsClass,
    /// kg
    pub mass: f64,
    /// Baseband power, W.
    pub p_bb: f64,
    /// RF chain power, W.
    pub p_rf: f64,
    /// Power amplifier, W.
    pub p_pa: f64,
    /// Overhead (cooling, supply losses), W.
    pub p_oh: f64,
    /// Radiated power in W, required only for coverage analysis.
    pub tx_power: Option<f64>,
    /// Receiver sensitivity of the served user, dBm.
    pub rx_sensitivity: Option<f64>,
}

impl BsProfile {
    pub fn validate(&self) -> Result<()> {
        positive("bs.mass", self.mass)?;
        non_negative("bs.p_bb", self.p_bb)?;
        non_negative("bs.p_rf", self.p_rf)?;
        non_negative("bs.p_pa", self.p_pa)?;
        non_negative("bs.p_oh", self.p_oh)?;
        if let Some(tx) = self.tx_power {
            positive("bs.tx_power", tx)?;
        }
        Ok(())
    }

    /// Transmit power in dBm.
    pub fn tx_power_dbm(&self) -> Result<f64> {
        let w = self.tx_power.ok_or(ModelError::MissingRadio("tx_power"))?;
        positive("bs.tx_power", w)?;
        Ok(watts_to_dbm(w))
    }
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * (watts * 1000.0).log10()
}

/// Communication power drawn by the base station.
pub fn bs_comm_power(profile: &BsProfile, mode: DeploymentMode) -> Result<f64> {
    profile.validate()?;
    let baseband = match (profile.class, mode) {
        (BsClass::Split, _) | (_, DeploymentMode::Split) => 0.0,
        _ => profile.p_bb,
    };
    Ok(baseband + profile.p_rf + profile.p_pa + profile.p_oh)
}

/// Upper bound on the backhaul share of service-link power.
pub const MAX_BACKHAUL_FRACTION: f64 = 0.1;

/// Backhaul power as a fraction of the service-link power.
pub fn backhaul_power(service_link_power: f64, fraction: f64) -> Result<f64> {
    non_negative("service_link_power", service_link_power)?;
    non_negative("backhaul_fraction", fraction)?;
    if fraction > MAX_BACKHAUL_FRACTION {
        return Err(ModelError::Domain {
            param: "backhaul_fraction",
            value: fraction,
            reason: "must not exceed 0.1",
        });
    }
    Ok(fraction * service_link_power)
}

/// The two power streams that exist only because a base station is carried.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CombinedBsPower {
    /// Extra mechanical power needed to lift the base station mass.
    pub excess_mechanical: f64,
    pub comm: f64,
}

impl CombinedBsPower {
    pub fn total(&self) -> f64 {
        self.excess_mechanical + self.comm
    }
}

fn ensure_fits(spec: &PlatformSpec, profile: &BsProfile) -> Result<()> {
    if profile.mass > spec.mass_budget.max_payload {
        return Err(ModelError::Infeasible {
            bs_mass: profile.mass,
            max_payload: spec.mass_budget.max_payload,
            budget: "maximum payload",
        });
    }
    Ok(())
}

pub fn combined_bs_power(
    spec: &PlatformSpec,
    profile: &BsProfile,
    mode: DeploymentMode,
) -> Result<CombinedBsPower> {
    ensure_fits(spec, profile)?;
    let with = mechanical_power(&spec.with_bs_mass(profile.mass))?;
    let without = mechanical_power(&spec.without_bs())?;
    Ok(CombinedBsPower {
        excess_mechanical: with - without,
        comm: bs_comm_power(profile, mode)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    FeasibleAndCompatible,
    FeasibleOnly,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Feasibility {
    pub verdict: Verdict,
    pub reason: String,
}

/// Feasibility is a mass check; compatibility is membership of the profile's
/// class in the platform's declared list of compatible classes.
pub fn check_feasibility(
    spec: &PlatformSpec,
    profile: &BsProfile,
    compatible: &[BsClass],
) -> Feasibility {
    let max = spec.mass_budget.max_payload;
    if profile.mass > max {
        return Feasibility {
            verdict: Verdict::Infeasible,
            reason: format!(
                "{} kg {} base station exceeds the {} kg maximum payload",
                profile.mass, profile.class, max
            ),
        };
    }
    if compatible.contains(&profile.class) {
        Feasibility {
            verdict: Verdict::FeasibleAndCompatible,
            reason: format!("{} fits the {} kg payload and meets coverage needs", profile.class, max),
        }
    } else {
        Feasibility {
            verdict: Verdict::FeasibleOnly,
            reason: format!(
                "{} fits the {} kg payload but is not a compatible class for this platform",
                profile.class, max
            ),
        }
    }
}
