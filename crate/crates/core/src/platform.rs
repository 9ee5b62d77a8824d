//! Mechanical power of the three platform classes.
//!
//! All weights passed to the power functions are in newtons; masses are
//! converted with [`GRAVITY`]. Rotary-wing drones hover, fixed-wing drones fly
//! a banked circle at constant speed, and fixed-wing HAPs cruise where
//! propulsion power turns out to be independent of weight.

use std::f64::consts::PI;

use crate::error::{non_negative, positive, fraction, ModelError, Result};

/// Gravitational acceleration used for every mass → weight conversion (m·s⁻²).
pub const GRAVITY: f64 = 9.8;

/// Which payload items count against `max_payload`, and how the take-off
/// mass is assembled from the budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PayloadRule {
    /// Base station, battery and solar panels all ride as payload (rotary wing).
    BsBatteryPanels,
    /// Only the base station counts; when one is carried the airframe flies
    /// at its full rated payload (fixed wing).
    FullPayloadBs,
    /// Base station plus solar panels (heavy-payload HAP).
    BsAndPanels,
    /// Base station only; panels belong to the structure (light-payload HAP).
    BsOnly,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassBudget {
    pub structural_mass: f64,
    pub bs_mass: f64,
    pub battery_mass: f64,
    pub solar_panel_mass: f64,
    pub max_payload: f64,
    pub rule: PayloadRule,
}

impl MassBudget {
    /// An empty budget: structure only, nothing carried.
    pub fn new(structural_mass: f64, max_payload: f64, rule: PayloadRule) -> Self {
        Self {
            structural_mass,
            bs_mass: 0.0,
            battery_mass: 0.0,
            solar_panel_mass: 0.0,
            max_payload,
            rule,
        }
    }

    pub fn with_bs_mass(mut self, kg: f64) -> Self {
        self.bs_mass = kg;
        self
    }

    pub fn with_battery_mass(mut self, kg: f64) -> Self {
        self.battery_mass = kg;
        self
    }

    pub fn with_solar_panel_mass(mut self, kg: f64) -> Self {
        self.solar_panel_mass = kg;
        self
    }

    pub fn validate(&self) -> Result<()> {
        non_negative("structural_mass", self.structural_mass)?;
        non_negative("bs_mass", self.bs_mass)?;
        non_negative("battery_mass", self.battery_mass)?;
        non_negative("solar_panel_mass", self.solar_panel_mass)?;
        non_negative("max_payload", self.max_payload)?;
        Ok(())
    }

    /// Mass counted against `max_payload` under this budget's rule.
    pub fn payload_mass(&self) -> f64 {
        match self.rule {
            PayloadRule::BsBatteryPanels => {
                self.bs_mass + self.battery_mass + self.solar_panel_mass
            }
            PayloadRule::BsAndPanels => self.bs_mass + self.solar_panel_mass,
            PayloadRule::FullPayloadBs | PayloadRule::BsOnly => self.bs_mass,
        }
    }

    /// Amount by which the payload items exceed `max_payload`, if any.
    pub fn payload_overrun(&self) -> Option<f64> {
        let excess = self.payload_mass() - self.max_payload;
        (excess > 0.0).then_some(excess)
    }

    /// Total take-off mass in kg.
    pub fn takeoff_mass(&self) -> f64 {
        let bs = match self.rule {
            PayloadRule::FullPayloadBs if self.bs_mass > 0.0 => self.bs_mass.max(self.max_payload),
            _ => self.bs_mass,
        };
        self.structural_mass + bs + self.battery_mass + self.solar_panel_mass
    }

    /// Take-off weight in newtons.
    pub fn weight(&self) -> f64 {
        self.takeoff_mass() * GRAVITY
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotorParams {
    pub profile_drag_coeff: f64,
    pub correction_factor: f64,
    /// kg·m⁻³
    pub air_density: f64,
    pub rotor_solidity: f64,
    /// m
    pub rotor_radius: f64,
    /// rad·s⁻¹
    pub blade_angular_velocity: f64,
}

impl RotorParams {
    pub fn disc_area(&self) -> f64 {
        PI * self.rotor_radius * self.rotor_radius
    }

    pub fn validate(&self) -> Result<()> {
        non_negative("profile_drag_coeff", self.profile_drag_coeff)?;
        non_negative("correction_factor", self.correction_factor)?;
        positive("air_density", self.air_density)?;
        non_negative("rotor_solidity", self.rotor_solidity)?;
        positive("rotor_radius", self.rotor_radius)?;
        positive("blade_angular_velocity", self.blade_angular_velocity)?;
        Ok(())
    }

    /// Blade profile power: the weight-independent part of hover power.
    pub fn profile_power(&self) -> f64 {
        let tip = self.blade_angular_velocity * self.rotor_radius;
        self.profile_drag_coeff / 8.0
            * self.air_density
            * self.rotor_solidity
            * self.disc_area()
            * tip.powi(3)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedWingParams {
    /// m
    pub wingspan: f64,
    pub aspect_ratio: f64,
    pub zero_lift_drag_coeff: f64,
    pub oswald_efficiency: f64,
    pub air_density: f64,
    /// m·s⁻¹
    pub speed: f64,
    /// Loiter circle radius in m; `f64::INFINITY` for straight flight.
    pub turn_radius: f64,
    pub gravity: f64,
}

impl FixedWingParams {
    pub fn wing_area(&self) -> f64 {
        self.wingspan * self.wingspan / self.aspect_ratio
    }

    pub fn validate(&self) -> Result<()> {
        positive("wingspan", self.wingspan)?;
        positive("aspect_ratio", self.aspect_ratio)?;
        positive("zero_lift_drag_coeff", self.zero_lift_drag_coeff)?;
        positive("oswald_efficiency", self.oswald_efficiency)?;
        positive("air_density", self.air_density)?;
        positive("speed", self.speed)?;
        positive("gravity", self.gravity)?;
        if self.turn_radius.is_nan() || self.turn_radius <= 0.0 {
            return Err(ModelError::Domain {
                param: "turn_radius",
                value: self.turn_radius,
                reason: "must be positive or infinite",
            });
        }
        Ok(())
    }

    /// Parasitic drag coefficient group, ½ρC_D0·A_w.
    pub fn c1(&self) -> f64 {
        0.5 * self.air_density * self.zero_lift_drag_coeff * self.wing_area()
    }

    /// Induced drag coefficient group at the given weight; scales with W².
    pub fn c2(&self, weight: f64) -> f64 {
        2.0 * weight * weight
            / (PI * self.oswald_efficiency * self.aspect_ratio * self.air_density * self.wing_area())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HapParams {
    /// m²
    pub wing_area: f64,
    pub drag_coeff: f64,
    pub propeller_efficiency: f64,
    pub air_density: f64,
    pub speed: f64,
    /// kg, part of the structural mass
    pub avionics_mass: f64,
    /// W·kg⁻¹
    pub avionics_power_ratio: f64,
}

impl HapParams {
    pub fn validate(&self) -> Result<()> {
        positive("wing_area", self.wing_area)?;
        positive("drag_coeff", self.drag_coeff)?;
        positive("propeller_efficiency", self.propeller_efficiency)?;
        fraction("propeller_efficiency", self.propeller_efficiency)?;
        positive("air_density", self.air_density)?;
        positive("speed", self.speed)?;
        non_negative("avionics_mass", self.avionics_mass)?;
        non_negative("avionics_power_ratio", self.avionics_power_ratio)?;
        Ok(())
    }

    /// Lift coefficient needed to hold `weight` newtons at cruise speed.
    pub fn lift_coeff(&self, weight: f64) -> f64 {
        2.0 * weight / (self.air_density * self.speed * self.speed * self.wing_area)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PlatformVariant {
    RotaryWing(RotorParams),
    FixedWing(FixedWingParams),
    Hap(HapParams),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlatformSpec {
    pub variant: PlatformVariant,
    pub mass_budget: MassBudget,
}

impl PlatformSpec {
    pub fn new(variant: PlatformVariant, mass_budget: MassBudget) -> Self {
        Self { variant, mass_budget }
    }

    pub fn validate(&self) -> Result<()> {
        match &self.variant {
            PlatformVariant::RotaryWing(p) => p.validate()?,
            PlatformVariant::FixedWing(p) => p.validate()?,
            PlatformVariant::Hap(p) => p.validate()?,
        }
        self.mass_budget.validate()
    }

    /// The same platform carrying a base station of the given mass.
    pub fn with_bs_mass(mut self, kg: f64) -> Self {
        self.mass_budget.bs_mass = kg;
        self
    }

    pub fn without_bs(self) -> Self {
        self.with_bs_mass(0.0)
    }

    pub fn kind(&self) -> PlatformKind {
        match self.variant {
            PlatformVariant::RotaryWing(_) => PlatformKind::RotaryWing,
            PlatformVariant::FixedWing(_) => PlatformKind::FixedWing,
            PlatformVariant::Hap(_) => PlatformKind::Hap,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PlatformKind {
    RotaryWing,
    FixedWing,
    Hap,
}

/// Hover power of a rotary-wing drone: blade profile power plus induced power.
pub fn rwd_hover_power(rotor: &RotorParams, weight: f64) -> Result<f64> {
    rotor.validate()?;
    non_negative("weight", weight)?;
    let disc = rotor.disc_area();
    let induced = (1.0 + rotor.correction_factor) * weight.powf(1.5)
        / (2.0 * rotor.air_density * disc).sqrt();
    Ok(rotor.profile_power() + induced)
}

/// Propulsion power of a fixed-wing drone on a circle of radius `turn_radius`.
pub fn fwd_propulsion_power(fw: &FixedWingParams, weight: f64) -> Result<f64> {
    fw.validate()?;
    non_negative("weight", weight)?;
    let c1 = fw.c1();
    let c2 = fw.c2(weight);
    // g²r² → ∞ for straight flight, leaving c1·V³
    let turn = c2 / (fw.gravity * fw.gravity * fw.turn_radius * fw.turn_radius);
    Ok((c1 + turn) * fw.speed.powi(3) + c2 / fw.speed)
}

/// Propulsion power of a fixed-wing HAP in level cruise.
///
/// Evaluated in the drag/lift-coefficient form. Substituting the lift
/// coefficient cancels the weight, so the result equals C_D·ρ·A_w·V³/(2η_p)
/// for any positive weight.
pub fn hap_propulsion_power(hap: &HapParams, weight: f64) -> Result<f64> {
    hap.validate()?;
    positive("weight", weight)?;
    let cl = hap.lift_coeff(weight);
    let lift_term = (2.0 * weight.powi(3) / (hap.air_density * hap.wing_area)).sqrt();
    Ok(hap.drag_coeff / (hap.propeller_efficiency * cl.powf(1.5)) * lift_term)
}

pub fn hap_avionics_power(hap: &HapParams) -> Result<f64> {
    non_negative("avionics_mass", hap.avionics_mass)?;
    non_negative("avionics_power_ratio", hap.avionics_power_ratio)?;
    Ok(hap.avionics_mass * hap.avionics_power_ratio)
}

/// Mechanical power to keep the platform aloft with its current mass budget.
pub fn mechanical_power(spec: &PlatformSpec) -> Result<f64> {
    spec.mass_budget.validate()?;
    let weight = spec.mass_budget.weight();
    match &spec.variant {
        PlatformVariant::RotaryWing(rotor) => rwd_hover_power(rotor, weight),
        PlatformVariant::FixedWing(fw) => fwd_propulsion_power(fw, weight),
        PlatformVariant::Hap(hap) => {
            // weight cancels; a massless budget still has a defined cruise power
            let w = if weight > 0.0 { weight } else { GRAVITY };
            Ok(hap_propulsion_power(hap, w)? + hap_avionics_power(hap)?)
        }
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn rotor() -> RotorParams {
        RotorParams {
            profile_drag_coeff: 0.012,
            correction_factor: 0.1,
            air_density: 1.225,
            rotor_solidity: 0.05,
            rotor_radius: 0.4,
            blade_angular_velocity: 300.0,
        }
    }

    pub fn fixed_wing(wingspan: f64) -> FixedWingParams {
        FixedWingParams {
            wingspan,
            aspect_ratio: 9.5,
            zero_lift_drag_coeff: 0.0447,
            oswald_efficiency: 0.7548,
            air_density: 1.112,
            speed: 20.0,
            turn_radius: 158.0,
            gravity: GRAVITY,
        }
    }

    pub fn hap(wing_area: f64) -> HapParams {
        HapParams {
            wing_area,
            drag_coeff: 0.0071,
            propeller_efficiency: 0.8,
            air_density: 0.08891,
            speed: 20.0,
            avionics_mass: 22.0,
            avionics_power_ratio: 6.0,
        }
    }

    pub fn rwd_spec(bs: f64, battery: f64) -> PlatformSpec {
        PlatformSpec::new(
            PlatformVariant::RotaryWing(rotor()),
            MassBudget::new(8.0, 12.0, PayloadRule::BsBatteryPanels)
                .with_bs_mass(bs)
                .with_battery_mass(battery),
        )
    }

    pub fn fwd_spec(wingspan: f64) -> PlatformSpec {
        let (structural, payload) = if wingspan < 7.5 { (44.0, 11.0) } else { (50.0, 10.0) };
        PlatformSpec::new(
            PlatformVariant::FixedWing(fixed_wing(wingspan)),
            MassBudget::new(structural, payload, PayloadRule::FullPayloadBs),
        )
    }

    pub fn hap_spec(wing_area: f64) -> PlatformSpec {
        PlatformSpec::new(
            PlatformVariant::Hap(hap(wing_area)),
            MassBudget::new(592.0, 270.0, PayloadRule::BsAndPanels),
        )
    }
}
